//! Density computations: exact on finite groups, exact for periodic lattice
//! sets via the residue oracle, and windowed finite-scale estimates with
//! witnesses otherwise.
//!
//! The two brute-force evaluators implement the compact-translate and the
//! finite-translate formulations of uniform upper density,
//!
//! ```text
//!   inf over nonempty C of  sup over nonempty V of  nu(V) / #(C+V)
//! ```
//!
//! enumerated independently, so that their agreement on discrete groups is
//! a genuine cross-check rather than a tautology. Windowed reports never
//! extrapolate a limit: they carry per-scale ratios, the running maximum,
//! and the maximum over the tail half of the scales, and they are flagged
//! `Exact` only when produced by a finite-group evaluation or the periodic
//! oracle.

use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::group::{Element, Group, GroupSpec};
use crate::rat::Rat;
use crate::set::{MeasureSpec, SetSpec};
use crate::window::{window_points, TranslateSearch, WindowFamily};
use crate::Error;

/// Whether a report's values are exact densities or finite-scale evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Exact,
    Estimate,
}

/// One scale of a density report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleRecord {
    /// Scale parameter: the dilation factor for window families, the chain
    /// index for subgroup sequences.
    pub scale: u64,
    /// Number of lattice points (equivalently, counting Haar measure) of
    /// the window at this scale.
    pub window_size: u64,
    /// Lexicographically least translate achieving the maximal mass, when a
    /// translate search was performed.
    pub translate: Option<Element>,
    /// Measure mass of the (best translate of the) window.
    pub mass: Rat,
    /// `mass / window_size`, exactly.
    pub ratio: Rat,
}

/// Finite-scale density evidence with witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub exactness: Exactness,
    pub records: Vec<ScaleRecord>,
    /// Maximum ratio over all scales.
    pub max_ratio: Rat,
    /// Maximum ratio over the last half of the scales (rounded up), the
    /// part of the report that stands in for the limit superior.
    pub tail_max_ratio: Rat,
}

fn finalize(records: Vec<ScaleRecord>, exactness: Exactness) -> DensityReport {
    let max_ratio = records.iter().map(|r| r.ratio).max().expect("nonempty");
    let tail = records.len() - records.len().div_ceil(2);
    let tail_max_ratio = records[tail..]
        .iter()
        .map(|r| r.ratio)
        .max()
        .expect("nonempty");
    DensityReport {
        exactness,
        records,
        max_ratio,
        tail_max_ratio,
    }
}

/// Upper density of a set along an increasing chain of finite subgroups:
/// the ratio `#(A intersect H_n) / #H_n` for each chain member, without any
/// translate search.
pub fn upper_density_sequence(
    group: &Group,
    set: &SetSpec,
    chain: &[Vec<Element>],
) -> Result<DensityReport, Error> {
    set.validate(group)?;
    if chain.is_empty() {
        return Err(Error::InvalidArgument("empty subgroup chain".into()));
    }
    let mut previous: Option<BTreeSet<Element>> = None;
    let mut records = Vec::with_capacity(chain.len());
    for (i, window) in chain.iter().enumerate() {
        if window.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "chain member {} is empty",
                i + 1
            )));
        }
        let current: BTreeSet<Element> = window.iter().cloned().collect();
        if let Some(prev) = &previous {
            if !prev.is_subset(&current) {
                return Err(Error::InvalidArgument(format!(
                    "chain member {} does not contain member {}",
                    i + 1,
                    i
                )));
            }
        }
        let mut mass: i64 = 0;
        for x in &current {
            if set.contains(group, x)? {
                mass += 1;
            }
        }
        let size = current.len() as i64;
        records.push(ScaleRecord {
            scale: (i + 1) as u64,
            window_size: size as u64,
            translate: None,
            mass: Rat::from_integer(mass),
            ratio: Rat::new(mass, size),
        });
        previous = Some(current);
    }
    Ok(finalize(records, Exactness::Estimate))
}

/// Fast membership evaluation for the windowed scan.
enum MassEval<'a> {
    PeriodicBits {
        m: Vec<i64>,
        strides: Vec<usize>,
        bits: Vec<bool>,
    },
    Generic(&'a SetSpec),
    Weighted(HashMap<&'a [i64], Rat>),
}

impl<'a> MassEval<'a> {
    fn build(measure: &'a MeasureSpec) -> Result<Self, Error> {
        match measure {
            MeasureSpec::Trace(s) | MeasureSpec::Counting(s) => {
                if let SetSpec::Periodic { m, residues } = s {
                    let mi: Vec<i64> = m.iter().map(|&x| x as i64).collect();
                    let mut strides = vec![1usize; m.len()];
                    for i in (0..m.len().saturating_sub(1)).rev() {
                        strides[i] = strides[i + 1] * m[i + 1] as usize;
                    }
                    let volume: usize = m.iter().product::<u64>() as usize;
                    let mut bits = vec![false; volume];
                    for r in residues {
                        let idx: usize = r
                            .iter()
                            .zip(&strides)
                            .map(|(&ri, &s)| ri as usize * s)
                            .sum();
                        bits[idx] = true;
                    }
                    Ok(MassEval::PeriodicBits {
                        m: mi,
                        strides,
                        bits,
                    })
                } else {
                    Ok(MassEval::Generic(s))
                }
            }
            MeasureSpec::Weighted(masses) => {
                let mut table: HashMap<&[i64], Rat> = HashMap::new();
                for (e, w) in masses {
                    let Element::Coords(c) = e else {
                        return Err(Error::GroupMismatch(
                            "weighted lattice measure needs coordinate elements".into(),
                        ));
                    };
                    let entry = table.entry(c.as_slice()).or_insert_with(Rat::zero);
                    *entry = *entry + *w;
                }
                Ok(MassEval::Weighted(table))
            }
        }
    }

    fn mass(&self, group: &Group, points: &[Vec<i64>], shift: &[i64]) -> Result<Rat, Error> {
        match self {
            MassEval::PeriodicBits { m, strides, bits } => {
                let mut count: i64 = 0;
                for p in points {
                    let mut idx = 0usize;
                    for i in 0..p.len() {
                        idx += (p[i] + shift[i]).rem_euclid(m[i]) as usize * strides[i];
                    }
                    if bits[idx] {
                        count += 1;
                    }
                }
                Ok(Rat::from_integer(count))
            }
            MassEval::Generic(set) => {
                let mut count: i64 = 0;
                for p in points {
                    let x: Vec<i64> = p.iter().zip(shift).map(|(&a, &b)| a + b).collect();
                    if set.contains(group, &Element::Coords(x))? {
                        count += 1;
                    }
                }
                Ok(Rat::from_integer(count))
            }
            MassEval::Weighted(table) => {
                let mut total = Rat::zero();
                for p in points {
                    let x: Vec<i64> = p.iter().zip(shift).map(|(&a, &b)| a + b).collect();
                    if let Some(w) = table.get(x.as_slice()) {
                        total += *w;
                    }
                }
                Ok(total)
            }
        }
    }
}

/// Iterates translate vectors over an inclusive box in lexicographic order.
struct TranslateIter {
    lo: Vec<i64>,
    hi: Vec<i64>,
    current: Option<Vec<i64>>,
}

impl TranslateIter {
    fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        let current = Some(lo.clone());
        TranslateIter { lo, hi, current }
    }
}

impl Iterator for TranslateIter {
    type Item = Vec<i64>;
    fn next(&mut self) -> Option<Vec<i64>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] <= self.hi[i] {
                self.current = Some(next);
                break;
            }
            next[i] = self.lo[i];
        }
        Some(out)
    }
}

/// Uniform (Banach-type) upper density evidence on the lattice: for every
/// scale, the maximal window mass over all searched translates, with the
/// lexicographically least maximizing translate as witness.
pub fn uniform_upper_density_windows(
    group: &Group,
    measure: &MeasureSpec,
    family: &WindowFamily,
) -> Result<DensityReport, Error> {
    let GroupSpec::Zd { dimension } = group.spec() else {
        return Err(Error::Unsupported(
            "windowed density requires the lattice group".into(),
        ));
    };
    let dimension = *dimension;
    measure.validate(group)?;
    family.validate(dimension)?;

    let (lo, hi): (Vec<i64>, Vec<i64>) = match &family.translates {
        TranslateSearch::FullPeriod => {
            let Some(SetSpec::Periodic { m, .. }) = measure.support_set() else {
                return Err(Error::MustSpecifyRange(
                    "full-period translate search needs a periodic set".into(),
                ));
            };
            (
                vec![0; dimension],
                m.iter().map(|&mi| mi as i64 - 1).collect(),
            )
        }
        TranslateSearch::Range(bounds) => (
            bounds.iter().map(|&(l, _)| l).collect(),
            bounds.iter().map(|&(_, h)| h).collect(),
        ),
    };

    let eval = MassEval::build(measure)?;
    let mut records = Vec::with_capacity(family.scales.len());
    for &scale in &family.scales {
        let points = window_points(&family.shape, dimension, scale)?;
        let size = points.len() as i64;
        let mut best: Option<(Rat, Vec<i64>)> = None;
        for shift in TranslateIter::new(lo.clone(), hi.clone()) {
            let mass = eval.mass(group, &points, &shift)?;
            // Strict improvement keeps the lexicographically least witness.
            if best.as_ref().map_or(true, |(b, _)| mass > *b) {
                best = Some((mass, shift));
            }
        }
        let (mass, witness) = best.expect("translate range is nonempty");
        records.push(ScaleRecord {
            scale,
            window_size: size as u64,
            translate: Some(Element::Coords(witness)),
            mass,
            ratio: mass / Rat::from_integer(size),
        });
    }
    Ok(finalize(records, Exactness::Estimate))
}

/// Integer-weight view of a measure over an enumerated finite group;
/// the true weight of element `i` is `weights[i] / scale`.
struct FiniteWeights {
    weights: Vec<u64>,
    scale: u64,
}

fn finite_weights(
    group: &Group,
    elements: &[Element],
    measure: &MeasureSpec,
) -> Result<FiniteWeights, Error> {
    measure.validate(group)?;
    match measure {
        MeasureSpec::Trace(s) | MeasureSpec::Counting(s) => {
            let mut weights = Vec::with_capacity(elements.len());
            for e in elements {
                weights.push(if s.contains(group, e)? { 1 } else { 0 });
            }
            Ok(FiniteWeights { weights, scale: 1 })
        }
        MeasureSpec::Weighted(masses) => {
            let mut per_element = vec![Rat::zero(); elements.len()];
            for (e, w) in masses {
                let idx = group.element_index(e)?;
                per_element[idx] = per_element[idx] + *w;
            }
            let mut denom: i64 = 1;
            for w in &per_element {
                denom = denom.lcm(&w.denom());
            }
            let weights: Vec<u64> = per_element
                .iter()
                .map(|w| (w.numer() * (denom / w.denom())) as u64)
                .collect();
            let total: u64 = weights.iter().sum();
            if total > 1 << 40 {
                return Err(Error::InvalidArgument(
                    "weighted measure too large for exact brute force".into(),
                ));
            }
            Ok(FiniteWeights {
                weights,
                scale: denom as u64,
            })
        }
    }
}

fn addition_table(group: &Group, elements: &[Element]) -> Result<Vec<Vec<usize>>, Error> {
    let n = elements.len();
    let mut table = vec![vec![0usize; n]; n];
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            table[i][j] = group.element_index(&group.add(a, b)?)?;
        }
    }
    Ok(table)
}

fn check_cap(group: &Group, cap: u64) -> Result<Vec<Element>, Error> {
    let Some(order) = group.order() else {
        return Err(Error::Unsupported(
            "exact density evaluation requires a finite group".into(),
        ));
    };
    if order > cap {
        return Err(Error::CapExceeded { order, cap });
    }
    if order > 16 {
        return Err(Error::CapExceeded { order, cap: 16 });
    }
    group.elements()
}

/// Compares fractions `a.0/a.1 < b.0/b.1` without overflow.
fn frac_less(a: (u64, u64), b: (u64, u64)) -> bool {
    (a.0 as u128) * (b.1 as u128) < (b.0 as u128) * (a.1 as u128)
}

/// Exact uniform upper density on a finite group, compact-translate form:
/// the infimum over nonempty `C` of the supremum over nonempty `V` of
/// `nu(V) / #(C+V)`. On a finite group the compact sets are all subsets.
pub fn density_def1_finite(group: &Group, measure: &MeasureSpec, cap: u64) -> Result<Rat, Error> {
    let elements = check_cap(group, cap)?;
    let n = elements.len();
    let w = finite_weights(group, &elements, measure)?;
    let add = addition_table(group, &elements)?;
    let size: u64 = 1 << n;

    // Translates of every subset mask by every single element, tabulated
    // by dynamic programming over the lowest set bit.
    let mut trans: Vec<Vec<u64>> = vec![vec![0; size as usize]; n];
    for (g, row) in trans.iter_mut().enumerate() {
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            row[mask as usize] = row[(mask & (mask - 1)) as usize] | (1u64 << add[g][low]);
        }
    }
    let mut nu = vec![0u64; size as usize];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        nu[mask as usize] = nu[(mask & (mask - 1)) as usize] + w.weights[low];
    }

    let mut best: Option<(u64, u64)> = None;
    for c_mask in 1..size {
        let mut sup: Option<(u64, u64)> = None;
        for v_mask in 1..size {
            let mut sumset = 0u64;
            let mut bits = c_mask;
            while bits != 0 {
                let g = bits.trailing_zeros() as usize;
                sumset |= trans[g][v_mask as usize];
                bits &= bits - 1;
            }
            let ratio = (nu[v_mask as usize], u64::from(sumset.count_ones()));
            if sup.map_or(true, |s| frac_less(s, ratio)) {
                sup = Some(ratio);
                // This C can no longer lower the running infimum.
                if let Some(b) = best {
                    if !frac_less(ratio, b) {
                        break;
                    }
                }
            }
        }
        let sup = sup.expect("at least one V");
        if best.map_or(true, |b| frac_less(sup, b)) {
            best = Some(sup);
        }
    }
    let (num, den) = best.expect("at least one C");
    Ok(Rat::new(num as i64, den as i64) / Rat::from_integer(w.scale as i64))
}

/// Exact uniform upper density on a finite group, finite-translate form:
/// the infimum runs over nonempty finite `F`, enumerated by cardinality,
/// with sumsets computed elementwise. Must agree with
/// [`density_def1_finite`] on every discrete group.
pub fn density_def2_finite(group: &Group, measure: &MeasureSpec, cap: u64) -> Result<Rat, Error> {
    let elements = check_cap(group, cap)?;
    let n = elements.len();
    let w = finite_weights(group, &elements, measure)?;
    let add = addition_table(group, &elements)?;
    let size: u64 = 1 << n;

    let mut order: Vec<u64> = (1..size).collect();
    order.sort_by_key(|m| (m.count_ones(), *m));

    let mut masses = vec![0u64; size as usize];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        masses[mask as usize] = masses[(mask & (mask - 1)) as usize] + w.weights[low];
    }

    let mut best: Option<(u64, u64)> = None;
    for &f_mask in &order {
        let mut sup: Option<(u64, u64)> = None;
        for v_mask in (1..size).rev() {
            let mut sumset = 0u64;
            let mut f_bits = f_mask;
            while f_bits != 0 {
                let f = f_bits.trailing_zeros() as usize;
                let mut v_bits = v_mask;
                while v_bits != 0 {
                    let v = v_bits.trailing_zeros() as usize;
                    sumset |= 1u64 << add[f][v];
                    v_bits &= v_bits - 1;
                }
                f_bits &= f_bits - 1;
            }
            let ratio = (masses[v_mask as usize], u64::from(sumset.count_ones()));
            if sup.map_or(true, |s| frac_less(s, ratio)) {
                sup = Some(ratio);
                if let Some(b) = best {
                    if !frac_less(ratio, b) {
                        break;
                    }
                }
            }
        }
        let sup = sup.expect("at least one V");
        if best.map_or(true, |b| frac_less(sup, b)) {
            best = Some(sup);
        }
    }
    let (num, den) = best.expect("at least one F");
    Ok(Rat::new(num as i64, den as i64) / Rat::from_integer(w.scale as i64))
}

/// Exact uniform upper density of a periodic lattice set: the residue count
/// divided by the period volume. The value is re-checked internally by an
/// exhaustive membership scan over three full periods.
pub fn periodic_banach_oracle(group: &Group, set: &SetSpec) -> Result<Rat, Error> {
    set.validate(group)?;
    let SetSpec::Periodic { m, residues } = set else {
        return Err(Error::Unsupported(
            "the periodic oracle needs a periodic residue set".into(),
        ));
    };
    let volume: u64 = m.iter().product();
    if volume > 1 << 24 {
        return Err(Error::InvalidArgument(format!(
            "period volume {volume} out of range"
        )));
    }
    let unique: BTreeSet<&Vec<u64>> = residues.iter().collect();
    let density = Rat::new(unique.len() as i64, volume as i64);

    // Independent recount over three full periods per axis.
    let dims = m.len();
    let mut counted: u64 = 0;
    let mut current = vec![0i64; dims];
    'outer: loop {
        if set.contains(group, &Element::Coords(current.clone()))? {
            counted += 1;
        }
        let mut i = dims;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            current[i] += 1;
            if current[i] < 3 * m[i] as i64 {
                break;
            }
            current[i] = 0;
        }
    }
    let expected = unique.len() as u64 * 3u64.pow(dims as u32);
    if counted != expected {
        return Err(Error::Internal(format!(
            "periodic oracle recount mismatch: counted {counted}, expected {expected}"
        )));
    }
    Ok(density)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::farey_subgroup;
    use crate::window::WindowShape;

    fn zd(d: usize) -> Group {
        Group::new(GroupSpec::Zd { dimension: d }).unwrap()
    }

    fn z(n: u64) -> Group {
        Group::new(GroupSpec::Finite { moduli: vec![n] }).unwrap()
    }

    fn explicit(items: &[i64]) -> SetSpec {
        SetSpec::Explicit(items.iter().map(|&i| Element::coords([i])).collect())
    }

    #[test]
    fn farey_band_sequence_ratios() {
        let g = Group::new(GroupSpec::Qz).unwrap();
        let set = SetSpec::FareyBands(vec![(2, 24)]);
        let chain: Vec<Vec<Element>> = (2..=24).map(|n| farey_subgroup(n).unwrap()).collect();
        let report = upper_density_sequence(&g, &set, &chain).unwrap();
        assert_eq!(report.records[0].ratio, Rat::zero());
        assert_eq!(report.records[0].window_size, 2);
        let last = report.records.last().unwrap();
        assert_eq!(last.window_size, 180);
        assert_eq!(last.ratio, Rat::new(178, 180));
        assert_eq!(report.max_ratio, Rat::new(89, 90));
        assert_eq!(report.exactness, Exactness::Estimate);
    }

    #[test]
    fn whole_group_and_empty_set_sequences() {
        let g = Group::new(GroupSpec::Qz).unwrap();
        let chain: Vec<Vec<Element>> = (1..=6).map(|n| farey_subgroup(n).unwrap()).collect();
        let all = SetSpec::FareyBands(vec![(0, 1000)]);
        let report = upper_density_sequence(&g, &all, &chain).unwrap();
        assert!(report.records.iter().all(|r| r.ratio == Rat::one()));
        let report = upper_density_sequence(&g, &SetSpec::empty(), &chain).unwrap();
        assert!(report.records.iter().all(|r| r.ratio == Rat::zero()));
    }

    #[test]
    fn sequence_rejects_bad_chains() {
        let g = Group::new(GroupSpec::Qz).unwrap();
        let chain = vec![farey_subgroup(3).unwrap(), farey_subgroup(2).unwrap()];
        assert!(upper_density_sequence(&g, &SetSpec::empty(), &chain).is_err());
        assert!(upper_density_sequence(&g, &SetSpec::empty(), &[]).is_err());
        let with_empty = vec![Vec::new()];
        assert!(upper_density_sequence(&g, &SetSpec::empty(), &with_empty).is_err());
    }

    #[test]
    fn windowed_density_on_half_residues() {
        let g = zd(1);
        let measure = MeasureSpec::Trace(SetSpec::Periodic {
            m: vec![4],
            residues: vec![vec![0], vec![1]],
        });
        let family = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![4, 8, 12, 16],
            translates: TranslateSearch::FullPeriod,
        };
        let report = uniform_upper_density_windows(&g, &measure, &family).unwrap();
        // Period-aligned box scales give the exact density at every scale.
        for rec in &report.records {
            assert_eq!(rec.ratio, Rat::new(1, 2), "scale {}", rec.scale);
        }
        assert_eq!(report.tail_max_ratio, Rat::new(1, 2));
        assert_eq!(report.exactness, Exactness::Estimate);
    }

    #[test]
    fn windowed_density_counting_sparse_lattice() {
        let g = zd(1);
        let measure = MeasureSpec::Counting(SetSpec::Periodic {
            m: vec![5],
            residues: vec![vec![0]],
        });
        let family = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![5, 10, 20, 40],
            translates: TranslateSearch::FullPeriod,
        };
        let report = uniform_upper_density_windows(&g, &measure, &family).unwrap();
        for rec in &report.records {
            assert_eq!(rec.ratio, Rat::new(1, 5));
        }
    }

    #[test]
    fn windowed_density_whole_lattice_is_one() {
        let g = zd(1);
        let measure = MeasureSpec::Trace(SetSpec::Periodic {
            m: vec![1],
            residues: vec![vec![0]],
        });
        let family = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![3, 7],
            translates: TranslateSearch::FullPeriod,
        };
        let report = uniform_upper_density_windows(&g, &measure, &family).unwrap();
        assert!(report.records.iter().all(|r| r.ratio == Rat::one()));
    }

    #[test]
    fn windowed_density_requires_range_for_explicit_sets() {
        let g = zd(1);
        let measure = MeasureSpec::Trace(explicit(&[0, 1, 2]));
        let family = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![4],
            translates: TranslateSearch::FullPeriod,
        };
        assert!(matches!(
            uniform_upper_density_windows(&g, &measure, &family),
            Err(Error::MustSpecifyRange(_))
        ));
        let ranged = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![4],
            translates: TranslateSearch::Range(vec![(-4, 4)]),
        };
        let report = uniform_upper_density_windows(&g, &measure, &ranged).unwrap();
        // Window {-1,0,1,2} shifted by 0 or 1 covers all of {0,1,2}; the
        // lexicographically least maximizer is 0.
        assert_eq!(report.records[0].ratio, Rat::new(3, 4));
        assert_eq!(report.records[0].translate, Some(Element::coords([0])));
    }

    #[test]
    fn windowed_density_rejects_farey_bands() {
        let g = zd(1);
        let measure = MeasureSpec::Trace(SetSpec::FareyBands(vec![(2, 4)]));
        let family = WindowFamily {
            shape: WindowShape::Box,
            scales: vec![4],
            translates: TranslateSearch::Range(vec![(0, 0)]),
        };
        assert!(uniform_upper_density_windows(&g, &measure, &family).is_err());
    }

    #[test]
    fn finite_density_examples() {
        let g = z(6);
        let a = MeasureSpec::Trace(explicit(&[0, 3]));
        assert_eq!(density_def1_finite(&g, &a, 12).unwrap(), Rat::new(1, 3));
        assert_eq!(density_def2_finite(&g, &a, 12).unwrap(), Rat::new(1, 3));

        let empty = MeasureSpec::Trace(SetSpec::empty());
        assert_eq!(density_def1_finite(&g, &empty, 12).unwrap(), Rat::zero());

        let whole = MeasureSpec::Trace(explicit(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(density_def1_finite(&g, &whole, 12).unwrap(), Rat::one());
        assert_eq!(density_def2_finite(&g, &whole, 12).unwrap(), Rat::one());

        let g5 = z(5);
        let three = MeasureSpec::Trace(explicit(&[0, 1, 2]));
        assert_eq!(density_def2_finite(&g5, &three, 12).unwrap(), Rat::new(3, 5));
    }

    #[test]
    fn finite_density_respects_cap() {
        let g = z(13);
        let a = MeasureSpec::Trace(SetSpec::Explicit(vec![g.zero()]));
        assert!(matches!(
            density_def1_finite(&g, &a, 12),
            Err(Error::CapExceeded { order: 13, cap: 12 })
        ));
    }

    #[test]
    fn finite_density_weighted_measure() {
        let g = z(5);
        let m = MeasureSpec::Weighted(vec![
            (Element::coords([0]), Rat::new(1, 2)),
            (Element::coords([2]), Rat::new(1, 3)),
        ]);
        let d1 = density_def1_finite(&g, &m, 12).unwrap();
        let d2 = density_def2_finite(&g, &m, 12).unwrap();
        // Total mass 5/6 spread over a group of order 5.
        assert_eq!(d1, Rat::new(1, 6));
        assert_eq!(d1, d2);
    }

    #[test]
    fn periodic_oracle_values() {
        let g = zd(1);
        let half = SetSpec::Periodic {
            m: vec![4],
            residues: vec![vec![0], vec![1]],
        };
        assert_eq!(periodic_banach_oracle(&g, &half).unwrap(), Rat::new(1, 2));

        let g2 = zd(2);
        let even_sum = SetSpec::Periodic {
            m: vec![2, 2],
            residues: vec![vec![0, 0], vec![1, 1]],
        };
        assert_eq!(
            periodic_banach_oracle(&g2, &even_sum).unwrap(),
            Rat::new(1, 2)
        );

        let full = SetSpec::Periodic {
            m: vec![2],
            residues: vec![vec![0], vec![1]],
        };
        assert_eq!(periodic_banach_oracle(&g, &full).unwrap(), Rat::one());

        assert!(periodic_banach_oracle(&g, &SetSpec::empty()).is_err());
    }
}
