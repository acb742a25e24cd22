//! Dilated convex window families on the integer lattice.
//!
//! A window family is a convex center-symmetric shape together with a list
//! of scales. Each scale yields a finite set of lattice points:
//!
//! * `Box` uses a fundamental-domain convention: scale `r` gives exactly
//!   `r` consecutive integers per axis (so `r^d` points in total), anchored
//!   as symmetrically as possible around 0. Ratios downstream maximize over
//!   all translates, so the anchoring never affects a density value, while
//!   the exact point count makes period-aligned scales give exact ratios.
//! * `CrossPolytope` at scale `r` is the l1 ball of radius `r`.
//! * `Hull` dilates a user-given symmetric polytope with rational vertices;
//!   lattice membership is decided by exact rational facet inequalities.
//!
//! Windows are nested across scales and always contain 0.

use serde::{Deserialize, Serialize};

use crate::rat::Rat;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowShape {
    Box,
    CrossPolytope,
    Hull(Vec<Vec<Rat>>),
}

/// How the translate supremum is resolved for a scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranslateSearch {
    /// Periodic sets only: one full period cell per coordinate is scanned,
    /// which is exhaustive because ratios are period-invariant in the
    /// translate.
    FullPeriod,
    /// Inclusive coordinate bounds for the translate; required whenever the
    /// measure has no periodic structure.
    Range(Vec<(i64, i64)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowFamily {
    pub shape: WindowShape,
    pub scales: Vec<u64>,
    pub translates: TranslateSearch,
}

impl WindowFamily {
    pub fn validate(&self, dimension: usize) -> Result<(), Error> {
        if self.scales.is_empty() {
            return Err(Error::InvalidWindow("empty scale list".into()));
        }
        if self.scales[0] == 0 {
            return Err(Error::InvalidWindow("scale 0 is not allowed".into()));
        }
        if self.scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidWindow(
                "scales must be strictly increasing".into(),
            ));
        }
        if let WindowShape::Hull(vertices) = &self.shape {
            validate_hull(vertices, dimension)?;
        }
        if let TranslateSearch::Range(bounds) = &self.translates {
            if bounds.len() != dimension {
                return Err(Error::InvalidWindow(format!(
                    "translate range has {} bounds, group dimension is {}",
                    bounds.len(),
                    dimension
                )));
            }
            if bounds.iter().any(|&(lo, hi)| lo > hi) {
                return Err(Error::InvalidWindow("empty translate range".into()));
            }
        }
        Ok(())
    }
}

/// Per-axis integer interval of the size-`r` box window.
fn box_interval(r: u64) -> (i64, i64) {
    let r = r as i64;
    (-((r - 1) / 2), r / 2)
}

/// Lattice points of the window at one scale, in lexicographic order.
pub fn window_points(
    shape: &WindowShape,
    dimension: usize,
    scale: u64,
) -> Result<Vec<Vec<i64>>, Error> {
    if scale == 0 {
        return Err(Error::InvalidWindow("scale 0 is not allowed".into()));
    }
    match shape {
        WindowShape::Box => {
            let (lo, hi) = box_interval(scale);
            let mut out = Vec::new();
            let mut current = vec![lo; dimension];
            loop {
                out.push(current.clone());
                let mut i = dimension;
                loop {
                    if i == 0 {
                        return Ok(out);
                    }
                    i -= 1;
                    current[i] += 1;
                    if current[i] <= hi {
                        break;
                    }
                    current[i] = lo;
                }
            }
        }
        WindowShape::CrossPolytope => {
            let r = scale as i64;
            let mut out = Vec::new();
            let mut current = vec![0i64; dimension];
            cross_points(r, 0, &mut current, &mut out);
            Ok(out)
        }
        WindowShape::Hull(vertices) => hull_points(vertices, dimension, scale),
    }
}

fn cross_points(budget: i64, axis: usize, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if axis == current.len() - 1 {
        for x in -budget..=budget {
            current[axis] = x;
            out.push(current.clone());
        }
        return;
    }
    for x in -budget..=budget {
        current[axis] = x;
        cross_points(budget - x.abs(), axis + 1, current, out);
    }
}

/// Common-denominator integer form of the hull vertices.
fn scaled_vertices(vertices: &[Vec<Rat>]) -> (Vec<Vec<i64>>, i64) {
    let mut denom: i64 = 1;
    for v in vertices {
        for c in v {
            denom = num_integer::lcm(denom, c.denom());
        }
    }
    let scaled = vertices
        .iter()
        .map(|v| v.iter().map(|c| c.numer() * (denom / c.denom())).collect())
        .collect();
    (scaled, denom)
}

fn validate_hull(vertices: &[Vec<Rat>], dimension: usize) -> Result<(), Error> {
    if dimension > 2 {
        return Err(Error::Unsupported(
            "hull windows are implemented for dimensions 1 and 2".into(),
        ));
    }
    if vertices.iter().any(|v| v.len() != dimension) {
        return Err(Error::InvalidWindow(
            "hull vertex arity differs from group dimension".into(),
        ));
    }
    if vertices.is_empty() {
        return Err(Error::InvalidWindow("hull without vertices".into()));
    }
    // Center symmetry of the vertex set.
    let negated: std::collections::BTreeSet<Vec<(i64, i64)>> = vertices
        .iter()
        .map(|v| v.iter().map(|c| (-c.numer(), c.denom())).collect())
        .collect();
    let given: std::collections::BTreeSet<Vec<(i64, i64)>> = vertices
        .iter()
        .map(|v| v.iter().map(|c| (c.numer(), c.denom())).collect())
        .collect();
    if given != negated {
        return Err(Error::InvalidWindow(
            "hull vertex set is not center-symmetric".into(),
        ));
    }
    match dimension {
        1 => {
            let max = vertices.iter().map(|v| v[0]).max().unwrap();
            if max <= Rat::zero() {
                return Err(Error::InvalidWindow(
                    "hull does not contain 0 in its interior".into(),
                ));
            }
            Ok(())
        }
        2 => {
            let (scaled, _) = scaled_vertices(vertices);
            let facets = hull_facets(&scaled)?;
            // 0 strictly inside means every facet bound is strictly negative
            // in the a.x >= b form.
            if facets.iter().any(|&(_, _, b)| b >= 0) {
                return Err(Error::InvalidWindow(
                    "hull does not contain 0 in its interior".into(),
                ));
            }
            Ok(())
        }
        _ => unreachable!(),
    }
}

/// Convex hull edges of an integer polygon as inequalities
/// `a0*x + a1*y >= b` satisfied by the hull.
fn hull_facets(points: &[Vec<i64>]) -> Result<Vec<(i64, i64, i64)>, Error> {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::InvalidWindow(
            "hull needs at least three distinct vertices in dimension 2".into(),
        ));
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i128 {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    // Monotone chain; hull comes out counterclockwise.
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let hull: Vec<(i64, i64)> = lower.into_iter().chain(upper).collect();
    if hull.len() < 3 {
        return Err(Error::InvalidWindow(
            "hull vertices are collinear".into(),
        ));
    }
    let mut facets = Vec::with_capacity(hull.len());
    for i in 0..hull.len() {
        let p = hull[i];
        let q = hull[(i + 1) % hull.len()];
        let e = (q.0 - p.0, q.1 - p.1);
        // Interior lies to the left of each directed edge: (-e1, e0).x >= b.
        let a = (-e.1, e.0);
        let b = a.0 * p.0 + a.1 * p.1;
        facets.push((a.0, a.1, b));
    }
    Ok(facets)
}

fn hull_points(
    vertices: &[Vec<Rat>],
    dimension: usize,
    scale: u64,
) -> Result<Vec<Vec<i64>>, Error> {
    validate_hull(vertices, dimension)?;
    let (scaled, denom) = scaled_vertices(vertices);
    let r = scale as i128;
    let l = denom as i128;
    match dimension {
        1 => {
            let max = scaled.iter().map(|v| v[0]).max().unwrap() as i128;
            let min = scaled.iter().map(|v| v[0]).min().unwrap() as i128;
            // x in rK  <=>  r*min <= L*x <= r*max
            let lo = div_ceil_i128(r * min, l);
            let hi = div_floor_i128(r * max, l);
            Ok((lo..=hi).map(|x| vec![x as i64]).collect())
        }
        2 => {
            let facets = hull_facets(&scaled)?;
            let bound = scaled
                .iter()
                .flat_map(|v| v.iter().map(|c| c.abs()))
                .max()
                .unwrap() as i128;
            let b = (r * bound / l + 1) as i64;
            let mut out = Vec::new();
            for x in -b..=b {
                for y in -b..=b {
                    let inside = facets.iter().all(|&(a0, a1, c)| {
                        l * (a0 as i128 * x as i128 + a1 as i128 * y as i128) >= r * c as i128
                    });
                    if inside {
                        out.push(vec![x, y]);
                    }
                }
            }
            Ok(out)
        }
        _ => unreachable!(),
    }
}

/// Period-aligned scale list reaching at least 64: three small multiples of
/// the period lcm plus the three largest ones, so the tail half of the
/// scales sits near the maximal scale.
pub fn aligned_scales(period_lcm: u64) -> Vec<u64> {
    let k = (64u64.div_ceil(period_lcm)).max(3);
    let mut scales: Vec<u64> = vec![1, 2, 3, k - 2, k - 1, k]
        .into_iter()
        .map(|i| i * period_lcm)
        .collect();
    scales.sort();
    scales.dedup();
    scales
}

/// Least common multiple of a period vector.
pub fn lcm_of(periods: &[u64]) -> u64 {
    periods.iter().fold(1u64, |acc, &x| num_integer::lcm(acc, x))
}

fn div_floor_i128(a: i128, b: i128) -> i128 {
    num_integer::Integer::div_floor(&a, &b)
}

fn div_ceil_i128(a: i128, b: i128) -> i128 {
    num_integer::Integer::div_ceil(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_windows_have_exactly_scale_points_per_axis() {
        for r in 1..=9u64 {
            let pts = window_points(&WindowShape::Box, 1, r).unwrap();
            assert_eq!(pts.len(), r as usize);
            assert!(pts.contains(&vec![0]));
        }
        let pts = window_points(&WindowShape::Box, 2, 3).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![-1, -1]);
        assert_eq!(pts[8], vec![1, 1]);
    }

    #[test]
    fn box_windows_nest() {
        let mut previous: Vec<Vec<i64>> = Vec::new();
        for r in 1..=8u64 {
            let pts = window_points(&WindowShape::Box, 2, r).unwrap();
            for p in &previous {
                assert!(pts.contains(p), "scale {r} lost point {p:?}");
            }
            previous = pts;
        }
    }

    #[test]
    fn cross_polytope_counts() {
        // |x| + |y| <= r has 2r^2 + 2r + 1 lattice points.
        for r in 1..=6u64 {
            let pts = window_points(&WindowShape::CrossPolytope, 2, r).unwrap();
            assert_eq!(pts.len(), (2 * r * r + 2 * r + 1) as usize);
        }
        let one_d = window_points(&WindowShape::CrossPolytope, 1, 4).unwrap();
        assert_eq!(one_d.len(), 9);
    }

    #[test]
    fn cross_polytope_is_symmetric() {
        let pts = window_points(&WindowShape::CrossPolytope, 2, 5).unwrap();
        for p in &pts {
            let neg: Vec<i64> = p.iter().map(|&c| -c).collect();
            assert!(pts.contains(&neg));
        }
    }

    #[test]
    fn square_hull_matches_symmetric_box() {
        let one = Rat::from_integer(1);
        let vertices = vec![
            vec![one, one],
            vec![one, Rat::from_integer(-1)],
            vec![Rat::from_integer(-1), one],
            vec![Rat::from_integer(-1), Rat::from_integer(-1)],
        ];
        let pts = window_points(&WindowShape::Hull(vertices), 2, 3).unwrap();
        // Dilation by 3 of the unit square gives [-3,3]^2.
        assert_eq!(pts.len(), 49);
        assert!(pts.contains(&vec![3, -3]));
        assert!(!pts.contains(&vec![4, 0]));
    }

    #[test]
    fn octagon_hull_excludes_corners() {
        let v = |a: i64, b: i64| vec![Rat::from_integer(a), Rat::from_integer(b)];
        let vertices = vec![
            v(2, 1),
            v(1, 2),
            v(-1, 2),
            v(-2, 1),
            v(-2, -1),
            v(-1, -2),
            v(1, -2),
            v(2, -1),
        ];
        let pts = window_points(&WindowShape::Hull(vertices), 2, 1).unwrap();
        assert!(pts.contains(&vec![2, 1]));
        assert!(pts.contains(&vec![0, 0]));
        assert!(!pts.contains(&vec![2, 2]));
    }

    #[test]
    fn hull_validation_rejects_bad_inputs() {
        let v = |a: i64, b: i64| vec![Rat::from_integer(a), Rat::from_integer(b)];
        // Not symmetric.
        let asym = WindowFamily {
            shape: WindowShape::Hull(vec![v(0, 1), v(1, 0), v(-1, -1)]),
            scales: vec![1],
            translates: TranslateSearch::FullPeriod,
        };
        assert!(asym.validate(2).is_err());
        // Collinear, so 0 cannot be interior.
        let flat = WindowFamily {
            shape: WindowShape::Hull(vec![v(1, 1), v(-1, -1), v(2, 2), v(-2, -2)]),
            scales: vec![1],
            translates: TranslateSearch::FullPeriod,
        };
        assert!(flat.validate(2).is_err());
    }

    #[test]
    fn family_validation_checks_scales_and_ranges() {
        let fam = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![4, 4],
            translates: TranslateSearch::FullPeriod,
        };
        assert!(fam.validate(1).is_err());
        let fam = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![],
            translates: TranslateSearch::FullPeriod,
        };
        assert!(fam.validate(1).is_err());
        let fam = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![4],
            translates: TranslateSearch::Range(vec![(0, 3), (0, 3)]),
        };
        assert!(fam.validate(1).is_err());
        assert!(fam.validate(2).is_ok());
    }

    #[test]
    fn window_family_json_shape() {
        let fam: WindowFamily = serde_json::from_str(
            r#"{"shape":"box","scales":[4,8],"translates":"full-period"}"#,
        )
        .unwrap();
        assert_eq!(fam.shape, WindowShape::Box);
        assert_eq!(fam.translates, TranslateSearch::FullPeriod);
        let ranged: WindowFamily = serde_json::from_str(
            r#"{"shape":"cross-polytope","scales":[2],"translates":{"range":[[-4,4]]}}"#,
        )
        .unwrap();
        assert_eq!(ranged.translates, TranslateSearch::Range(vec![(-4, 4)]));
    }
}
