//! Subset and measure descriptions with constant-time membership.
//!
//! A [`SetSpec`] describes a subset of a group: an explicit element list, a
//! periodic residue pattern on the lattice, denominator bands on the
//! rational torus, or a finite union of those. A [`MeasureSpec`] is either
//! the set-trace of the counting Haar measure, the counting measure of a
//! point set (the two agree on every finite window of a discrete group), or
//! finitely many weighted point masses.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::group::{Element, Group, GroupSpec};
use crate::rat::Rat;
use crate::Error;

/// Subset description. Membership is decidable elementwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetSpec {
    /// Finite list of canonical elements.
    Explicit(Vec<Element>),
    /// Residue pattern in `Z^d`: all points congruent to one of `residues`
    /// modulo the period vector `m`, coordinatewise. Residues must be
    /// reduced into `[0, m_i)`.
    Periodic { m: Vec<u64>, residues: Vec<Vec<u64>> },
    /// Half-open denominator intervals `(lo, hi]` on the rational torus: a
    /// reduced fraction `p/q` belongs iff some band satisfies `lo < q <= hi`.
    FareyBands(Vec<(u64, u64)>),
    /// Union of member sets.
    Union(Vec<SetSpec>),
}

impl SetSpec {
    pub fn empty() -> Self {
        SetSpec::Explicit(Vec::new())
    }

    /// Checks structural invariants against the group the set lives in.
    pub fn validate(&self, group: &Group) -> Result<(), Error> {
        match self {
            SetSpec::Explicit(elems) => {
                for e in elems {
                    if !group.is_canonical(e) {
                        return Err(Error::NotCanonical(format!(
                            "set element {:?} in {:?}",
                            e,
                            group.spec()
                        )));
                    }
                }
                Ok(())
            }
            SetSpec::Periodic { m, residues } => {
                let GroupSpec::Zd { dimension } = group.spec() else {
                    return Err(Error::InvalidSetSpec(
                        "periodic residues require a lattice group".into(),
                    ));
                };
                if m.len() != *dimension {
                    return Err(Error::InvalidSetSpec(format!(
                        "period vector has length {}, group dimension is {}",
                        m.len(),
                        dimension
                    )));
                }
                if m.iter().any(|&mi| mi == 0) {
                    return Err(Error::InvalidSetSpec("period entry 0".into()));
                }
                for r in residues {
                    if r.len() != *dimension {
                        return Err(Error::InvalidSetSpec(format!(
                            "residue {:?} has wrong arity",
                            r
                        )));
                    }
                    if r.iter().zip(m).any(|(&ri, &mi)| ri >= mi) {
                        return Err(Error::InvalidSetSpec(format!(
                            "residue {:?} not reduced modulo {:?}",
                            r, m
                        )));
                    }
                }
                Ok(())
            }
            SetSpec::FareyBands(bands) => {
                if *group.spec() != GroupSpec::Qz {
                    return Err(Error::InvalidSetSpec(
                        "denominator bands require the rational torus".into(),
                    ));
                }
                for &(lo, hi) in bands {
                    if lo >= hi {
                        return Err(Error::InvalidSetSpec(format!(
                            "band ({lo}, {hi}] is empty or reversed"
                        )));
                    }
                }
                let mut sorted: Vec<_> = bands.clone();
                sorted.sort();
                for w in sorted.windows(2) {
                    if w[1].0 < w[0].1 {
                        return Err(Error::InvalidSetSpec(format!(
                            "bands ({}, {}] and ({}, {}] overlap",
                            w[0].0, w[0].1, w[1].0, w[1].1
                        )));
                    }
                }
                Ok(())
            }
            SetSpec::Union(members) => {
                for s in members {
                    s.validate(group)?;
                }
                Ok(())
            }
        }
    }

    /// Membership test for a canonical element.
    pub fn contains(&self, group: &Group, x: &Element) -> Result<bool, Error> {
        if !group.is_canonical(x) {
            return Err(Error::NotCanonical(format!("{:?}", x)));
        }
        match self {
            SetSpec::Explicit(elems) => Ok(elems.contains(x)),
            SetSpec::Periodic { m, residues } => {
                let Element::Coords(c) = x else {
                    return Err(Error::GroupMismatch(
                        "lattice set queried with a torus element".into(),
                    ));
                };
                let reduced: Vec<u64> = c
                    .iter()
                    .zip(m)
                    .map(|(&xi, &mi)| xi.rem_euclid(mi as i64) as u64)
                    .collect();
                Ok(residues.contains(&reduced))
            }
            SetSpec::FareyBands(bands) => {
                let Element::Fraction { den, .. } = x else {
                    return Err(Error::GroupMismatch(
                        "band set queried with a lattice element".into(),
                    ));
                };
                Ok(bands.iter().any(|&(lo, hi)| lo < *den && *den <= hi))
            }
            SetSpec::Union(members) => {
                for s in members {
                    if s.contains(group, x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Intersects the set with a finite window, returning the members in
    /// canonical order.
    pub fn enumerate_in_window(
        &self,
        group: &Group,
        window: &[Element],
    ) -> Result<Vec<Element>, Error> {
        let mut hits = BTreeSet::new();
        for x in window {
            if self.contains(group, x)? {
                hits.insert(x.clone());
            }
        }
        Ok(hits.into_iter().collect())
    }

    /// Exact difference set `A - A`.
    ///
    /// Supported for explicit finite sets (result is explicit) and for
    /// periodic residue sets (result is periodic with the same period).
    /// The result always contains `0` for a nonempty input and is closed
    /// under negation.
    pub fn difference_set(&self, group: &Group) -> Result<SetSpec, Error> {
        match self {
            SetSpec::Explicit(elems) => {
                let mut out = BTreeSet::new();
                for a in elems {
                    for b in elems {
                        out.insert(group.sub(a, b)?);
                    }
                }
                Ok(SetSpec::Explicit(out.into_iter().collect()))
            }
            SetSpec::Periodic { m, residues } => {
                let mut out = BTreeSet::new();
                for a in residues {
                    for b in residues {
                        let diff: Vec<u64> = a
                            .iter()
                            .zip(b)
                            .zip(m)
                            .map(|((&ai, &bi), &mi)| {
                                (ai as i64 - bi as i64).rem_euclid(mi as i64) as u64
                            })
                            .collect();
                        out.insert(diff);
                    }
                }
                Ok(SetSpec::Periodic {
                    m: m.clone(),
                    residues: out.into_iter().collect(),
                })
            }
            SetSpec::FareyBands(_) | SetSpec::Union(_) => Err(Error::Unsupported(
                "difference set is only computed for explicit or periodic sets".into(),
            )),
        }
    }

    /// Period vector if this is a periodic residue set.
    pub fn period(&self) -> Option<&[u64]> {
        match self {
            SetSpec::Periodic { m, .. } => Some(m),
            _ => None,
        }
    }
}

/// Measure description over a group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureSpec {
    /// Trace of the counting Haar measure on a set.
    Trace(SetSpec),
    /// Counting measure of a point set.
    Counting(SetSpec),
    /// Finitely many nonnegative point masses.
    Weighted(Vec<(Element, Rat)>),
}

impl MeasureSpec {
    pub fn validate(&self, group: &Group) -> Result<(), Error> {
        match self {
            MeasureSpec::Trace(s) | MeasureSpec::Counting(s) => s.validate(group),
            MeasureSpec::Weighted(masses) => {
                for (e, w) in masses {
                    if !group.is_canonical(e) {
                        return Err(Error::NotCanonical(format!("{:?}", e)));
                    }
                    if w.is_negative() {
                        return Err(Error::InvalidSetSpec(format!(
                            "negative point mass {w} at {:?}",
                            e
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Total mass of a finite window. On discrete groups the trace and the
    /// counting variants both count points of the underlying set.
    pub fn mass(&self, group: &Group, window: &[Element]) -> Result<Rat, Error> {
        match self {
            MeasureSpec::Trace(s) | MeasureSpec::Counting(s) => {
                let mut count: i64 = 0;
                for x in window {
                    if s.contains(group, x)? {
                        count += 1;
                    }
                }
                Ok(Rat::from_integer(count))
            }
            MeasureSpec::Weighted(masses) => {
                let table: BTreeMap<&Element, Rat> =
                    masses.iter().map(|(e, w)| (e, *w)).collect();
                let mut total = Rat::zero();
                for x in window {
                    if !group.is_canonical(x) {
                        return Err(Error::NotCanonical(format!("{:?}", x)));
                    }
                    if let Some(w) = table.get(x) {
                        total += *w;
                    }
                }
                Ok(total)
            }
        }
    }

    /// Underlying set for trace/counting measures.
    pub fn support_set(&self) -> Option<&SetSpec> {
        match self {
            MeasureSpec::Trace(s) | MeasureSpec::Counting(s) => Some(s),
            MeasureSpec::Weighted(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zd(d: usize) -> Group {
        Group::new(GroupSpec::Zd { dimension: d }).unwrap()
    }

    fn z(n: u64) -> Group {
        Group::new(GroupSpec::Finite { moduli: vec![n] }).unwrap()
    }

    fn qz() -> Group {
        Group::new(GroupSpec::Qz).unwrap()
    }

    #[test]
    fn periodic_membership_reduces_coordinates() {
        let g = zd(1);
        let s = SetSpec::Periodic {
            m: vec![4],
            residues: vec![vec![0], vec![1]],
        };
        s.validate(&g).unwrap();
        assert!(s.contains(&g, &Element::coords([9])).unwrap());
        assert!(!s.contains(&g, &Element::coords([2])).unwrap());
        assert!(s.contains(&g, &Element::coords([-4])).unwrap());
    }

    #[test]
    fn band_membership_is_by_denominator() {
        let g = qz();
        let s = SetSpec::FareyBands(vec![(2, 24)]);
        s.validate(&g).unwrap();
        assert!(s.contains(&g, &Element::fraction(1, 3).unwrap()).unwrap());
        assert!(!s.contains(&g, &Element::fraction(1, 2).unwrap()).unwrap());
        assert!(!s.contains(&g, &Element::fraction(0, 1).unwrap()).unwrap());
    }

    #[test]
    fn explicit_membership() {
        let g = z(6);
        let s = SetSpec::Explicit(vec![Element::coords([0]), Element::coords([3])]);
        assert!(!s.contains(&g, &Element::coords([2])).unwrap());
        assert!(s.contains(&g, &Element::coords([3])).unwrap());
    }

    #[test]
    fn window_enumeration_is_sorted() {
        let g = zd(1);
        let evens = SetSpec::Periodic {
            m: vec![2],
            residues: vec![vec![0]],
        };
        let window: Vec<Element> = (0..10).map(|i| Element::coords([i])).collect();
        let hits = evens.enumerate_in_window(&g, &window).unwrap();
        let expect: Vec<Element> = [0, 2, 4, 6, 8]
            .iter()
            .map(|&i| Element::coords([i]))
            .collect();
        assert_eq!(hits, expect);
        assert!(SetSpec::empty()
            .enumerate_in_window(&g, &window)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn farey_band_window() {
        let g = qz();
        let s = SetSpec::FareyBands(vec![(2, 24)]);
        let window = crate::group::farey_subgroup(4).unwrap();
        let hits = s.enumerate_in_window(&g, &window).unwrap();
        assert_eq!(hits.len(), 4);
        let denominators: Vec<u64> = hits
            .iter()
            .map(|e| match e {
                Element::Fraction { den, .. } => *den,
                _ => unreachable!(),
            })
            .collect();
        assert!(denominators.iter().all(|&q| q == 3 || q == 4));
    }

    #[test]
    fn difference_set_explicit() {
        let g = z(10);
        let a = SetSpec::Explicit(
            [0, 1, 3].iter().map(|&i| Element::coords([i])).collect(),
        );
        let d = a.difference_set(&g).unwrap();
        let expect: Vec<Element> = [0, 1, 2, 3, 7, 8, 9]
            .iter()
            .map(|&i| Element::coords([i]))
            .collect();
        assert_eq!(d, SetSpec::Explicit(expect));

        let single = SetSpec::Explicit(vec![g.zero()]);
        assert_eq!(
            single.difference_set(&g).unwrap(),
            SetSpec::Explicit(vec![g.zero()])
        );
    }

    #[test]
    fn difference_set_periodic() {
        let g = zd(1);
        let a = SetSpec::Periodic {
            m: vec![3],
            residues: vec![vec![0]],
        };
        assert_eq!(a.difference_set(&g).unwrap(), a);

        let bands = SetSpec::FareyBands(vec![(2, 24)]);
        assert!(bands.difference_set(&qz()).is_err());
    }

    #[test]
    fn rejects_unreduced_residues_and_overlapping_bands() {
        let g = zd(1);
        let bad = SetSpec::Periodic {
            m: vec![4],
            residues: vec![vec![5]],
        };
        assert!(bad.validate(&g).is_err());
        let overlapping = SetSpec::FareyBands(vec![(2, 24), (10, 30)]);
        assert!(overlapping.validate(&qz()).is_err());
    }

    #[test]
    fn weighted_mass_sums_point_masses() {
        let g = z(5);
        let m = MeasureSpec::Weighted(vec![
            (Element::coords([0]), Rat::new(1, 2)),
            (Element::coords([2]), Rat::new(3, 4)),
        ]);
        m.validate(&g).unwrap();
        let window = g.elements().unwrap();
        assert_eq!(m.mass(&g, &window).unwrap(), Rat::new(5, 4));
        assert_eq!(
            m.mass(&g, &[Element::coords([2])]).unwrap(),
            Rat::new(3, 4)
        );
    }

    #[test]
    fn set_spec_json_shapes() {
        let s: SetSpec =
            serde_json::from_str(r#"{"periodic":{"m":[4],"residues":[[0],[1]]}}"#).unwrap();
        assert_eq!(
            s,
            SetSpec::Periodic {
                m: vec![4],
                residues: vec![vec![0], vec![1]],
            }
        );
        let bands: SetSpec = serde_json::from_str(r#"{"fareybands":[[2,24]]}"#).unwrap();
        assert_eq!(bands, SetSpec::FareyBands(vec![(2, 24)]));
        let explicit: SetSpec = serde_json::from_str(r#"{"explicit":[[0],[3]]}"#).unwrap();
        assert_eq!(
            explicit,
            SetSpec::Explicit(vec![Element::coords([0]), Element::coords([3])])
        );
        let union: SetSpec =
            serde_json::from_str(r#"{"union":[{"explicit":[[1]]},{"fareybands":[]}]}"#).unwrap();
        match union {
            SetSpec::Union(m) => assert_eq!(m.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        let measure: MeasureSpec =
            serde_json::from_str(r#"{"trace":{"periodic":{"m":[4],"residues":[[0]]}}}"#).unwrap();
        assert!(matches!(measure, MeasureSpec::Trace(_)));
    }
}
