//! Property suites that machine-check the density theory on desk-scale
//! instances, plus the end-to-end syndeticity pipeline.
//!
//! Every suite is deterministic given a seed, runs a fixed corpus, and
//! reports failures with a complete serialized reproducer. The pipeline's
//! final cover check is a direct enumeration over the scope, independent of
//! all intermediate certificates.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cover::{gap_statistics, greedy_packing_complement, syndetic_certificate,
    CoverCertificate};
use crate::density::{density_def1_finite, density_def2_finite, periodic_banach_oracle,
    uniform_upper_density_windows, upper_density_sequence};
use crate::group::{farey_subgroup, Element, Group, GroupSpec};
use crate::partition::{exact_counting_density, fatten, folner_box, greedy_partition,
    pair_differences, PartitionCertificate};
use crate::rat::Rat;
use crate::set::{MeasureSpec, SetSpec};
use crate::window::{aligned_scales, lcm_of, TranslateSearch, WindowFamily, WindowShape};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

/// A single counterexample, serialized completely enough to reproduce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub input: serde_json::Value,
    pub expected: String,
    pub observed: String,
}

/// Outcome of one property suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub instances_run: u64,
    pub failures: Vec<CheckFailure>,
    pub status: CheckStatus,
}

impl CheckResult {
    fn new(name: &str, instances_run: u64, failures: Vec<CheckFailure>) -> Self {
        let status = if failures.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckResult {
            name: name.to_string(),
            instances_run,
            failures,
            status,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

fn zd(d: usize) -> Group {
    Group::new(GroupSpec::Zd { dimension: d }).expect("valid dimension")
}

fn coords_list(items: &[i64]) -> Vec<Element> {
    items.iter().map(|&i| Element::coords([i])).collect()
}

/// Random nonempty periodic residue set with period entries in
/// `[1, max_period]`.
fn random_periodic(rng: &mut ChaCha8Rng, dimension: usize, max_period: u64) -> SetSpec {
    let m: Vec<u64> = (0..dimension)
        .map(|_| rng.gen_range(1..=max_period))
        .collect();
    let volume: u64 = m.iter().product();
    let mut residues = BTreeSet::new();
    for idx in 0..volume {
        if rng.gen_bool(0.5) {
            residues.insert(unrank(idx, &m));
        }
    }
    if residues.is_empty() {
        residues.insert(unrank(rng.gen_range(0..volume), &m));
    }
    SetSpec::Periodic {
        m,
        residues: residues.into_iter().collect(),
    }
}

/// Sparse variant biased toward few residues, which exercises the packing
/// corpora much harder.
fn random_sparse_periodic(rng: &mut ChaCha8Rng, max_period: u64) -> SetSpec {
    let m = rng.gen_range(2..=max_period);
    let count = 1 + rng.gen_range(0..=(m / 4));
    let mut residues = BTreeSet::new();
    residues.insert(vec![rng.gen_range(0..m)]);
    while (residues.len() as u64) < count {
        residues.insert(vec![rng.gen_range(0..m)]);
    }
    SetSpec::Periodic {
        m: vec![m],
        residues: residues.into_iter().collect(),
    }
}

fn unrank(mut idx: u64, m: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; m.len()];
    for i in (0..m.len()).rev() {
        out[i] = idx % m[i];
        idx /= m[i];
    }
    out
}

/// Exhaustive check that the compact-translate and finite-translate density
/// definitions agree (and equal the counting ratio for set traces) on small
/// finite groups, plus a matched-scope relaxation comparison on the lattice.
pub fn check_density_definitions(seed: u64) -> Result<CheckResult, Error> {
    let mut failures = Vec::new();
    let mut instances: u64 = 0;

    for n in 1..=6u64 {
        let group = Group::new(GroupSpec::Finite { moduli: vec![n] })?;
        let elements = group.elements()?;
        for mask in 0..(1u64 << n) {
            let members: Vec<Element> = elements
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| e.clone())
                .collect();
            let count = members.len() as i64;
            let measure = MeasureSpec::Trace(SetSpec::Explicit(members.clone()));
            let d1 = density_def1_finite(&group, &measure, 10)?;
            let d2 = density_def2_finite(&group, &measure, 10)?;
            let expected = Rat::new(count, n as i64);
            instances += 1;
            if d1 != d2 || d1 != expected {
                failures.push(CheckFailure {
                    input: json!({"group": group.spec(), "set": SetSpec::Explicit(members)}),
                    expected: format!("def1 = def2 = {expected}"),
                    observed: format!("def1 = {d1}, def2 = {d2}"),
                });
            }
        }
    }

    // Random weighted measures on a product group.
    let group = Group::new(GroupSpec::Finite { moduli: vec![2, 3] })?;
    let elements = group.elements()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1);
    for _ in 0..20 {
        let mut masses: Vec<(Element, Rat)> = Vec::new();
        for e in &elements {
            if rng.gen_bool(0.7) {
                masses.push((
                    e.clone(),
                    Rat::new(rng.gen_range(0..5), rng.gen_range(1..4)),
                ));
            }
        }
        let measure = MeasureSpec::Weighted(masses.clone());
        let d1 = density_def1_finite(&group, &measure, 10)?;
        let d2 = density_def2_finite(&group, &measure, 10)?;
        instances += 1;
        if d1 != d2 {
            failures.push(CheckFailure {
                input: json!({"group": group.spec(), "measure": measure}),
                expected: "def1 = def2".into(),
                observed: format!("def1 = {d1}, def2 = {d2}"),
            });
        }
    }

    // Widening the translate family can only lower the min-max relaxation:
    // the compact-style family extends the finite-style one.
    let line = zd(1);
    for _ in 0..10 {
        let set = random_periodic(&mut rng, 1, 6);
        let m0 = set.period().unwrap()[0] as i64;
        let measure = MeasureSpec::Trace(set.clone());
        let narrow = [coords_list(&[0]), coords_list(&[0, 1])];
        let wide = [
            coords_list(&[0]),
            coords_list(&[0, 1]),
            coords_list(&[0, 1, 2]),
        ];
        let windows: Vec<Vec<Element>> = vec![
            (0..m0).map(|i| Element::coords([i])).collect(),
            (0..2 * m0).map(|i| Element::coords([i])).collect(),
        ];
        let wide_value = windowed_relaxation(&line, &measure, &wide, &windows, m0)?;
        let narrow_value = windowed_relaxation(&line, &measure, &narrow, &windows, m0)?;
        instances += 1;
        if wide_value > narrow_value {
            failures.push(CheckFailure {
                input: json!({"set": set}),
                expected: "relaxation over the wider family is not larger".into(),
                observed: format!("wide = {wide_value}, narrow = {narrow_value}"),
            });
        }
    }

    Ok(CheckResult::new("density-definitions", instances, failures))
}

/// Min over translate candidates of max over windows and shifts of the
/// window mass ratio; the finite surrogate for the inf-sup definitions on
/// the lattice.
fn windowed_relaxation(
    group: &Group,
    measure: &MeasureSpec,
    candidates: &[Vec<Element>],
    windows: &[Vec<Element>],
    period: i64,
) -> Result<Rat, Error> {
    let mut best: Option<Rat> = None;
    for c in candidates {
        let mut sup: Option<Rat> = None;
        for v in windows {
            // Sumset size is translate invariant.
            let mut sumset = BTreeSet::new();
            for a in c {
                for b in v {
                    sumset.insert(group.add(a, b)?);
                }
            }
            let denom = Rat::from_integer(sumset.len() as i64);
            for shift in 0..period {
                let translated: Vec<Element> = v
                    .iter()
                    .map(|e| group.add(e, &Element::coords([shift])))
                    .collect::<Result<_, _>>()?;
                let ratio = measure.mass(group, &translated)? / denom;
                if sup.map_or(true, |s| ratio > s) {
                    sup = Some(ratio);
                }
            }
        }
        let sup = sup.expect("nonempty windows");
        if best.map_or(true, |b| sup < b) {
            best = Some(sup);
        }
    }
    Ok(best.expect("nonempty candidates"))
}

/// Subadditivity of the uniform upper density under measure sums, checked
/// with exact rationals on random finite-group instances.
pub fn check_subadditivity(seed: u64, instances: u64) -> Result<CheckResult, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x50b);
    let mut failures = Vec::new();
    let shapes: [&[u64]; 5] = [&[4], &[5], &[6], &[2, 3], &[2, 4]];
    for _ in 0..instances {
        let moduli = shapes[rng.gen_range(0..shapes.len())].to_vec();
        let group = Group::new(GroupSpec::Finite { moduli })?;
        let elements = group.elements()?;
        let count = rng.gen_range(2..=4);
        let mut parts: Vec<MeasureSpec> = Vec::with_capacity(count);
        for _ in 0..count {
            if rng.gen_bool(0.5) {
                let members: Vec<Element> = elements
                    .iter()
                    .filter(|_| rng.gen_bool(0.4))
                    .cloned()
                    .collect();
                parts.push(MeasureSpec::Trace(SetSpec::Explicit(members)));
            } else {
                let mut masses: Vec<(Element, Rat)> = Vec::new();
                for e in &elements {
                    if rng.gen_bool(0.4) {
                        masses.push((
                            e.clone(),
                            Rat::new(rng.gen_range(0..4), rng.gen_range(1..4)),
                        ));
                    }
                }
                parts.push(MeasureSpec::Weighted(masses));
            }
        }
        let total = sum_measures(&group, &parts)?;
        let lhs = density_def1_finite(&group, &total, 12)?;
        let mut rhs = Rat::zero();
        for part in &parts {
            rhs += density_def1_finite(&group, part, 12)?;
        }
        if lhs > rhs {
            failures.push(CheckFailure {
                input: json!({"group": group.spec(), "measures": parts}),
                expected: format!("density of the sum <= {rhs}"),
                observed: format!("{lhs}"),
            });
        }
    }
    Ok(CheckResult::new("subadditivity", instances, failures))
}

/// Pointwise sum of measures as a single weighted measure.
pub fn sum_measures(group: &Group, parts: &[MeasureSpec]) -> Result<MeasureSpec, Error> {
    let elements = group.elements()?;
    let mut weights = vec![Rat::zero(); elements.len()];
    for part in parts {
        part.validate(group)?;
        match part {
            MeasureSpec::Trace(s) | MeasureSpec::Counting(s) => {
                for (i, e) in elements.iter().enumerate() {
                    if s.contains(group, e)? {
                        weights[i] += Rat::one();
                    }
                }
            }
            MeasureSpec::Weighted(masses) => {
                for (e, w) in masses {
                    weights[group.element_index(e)?] += *w;
                }
            }
        }
    }
    Ok(MeasureSpec::Weighted(
        elements
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .collect(),
    ))
}

/// Exhaustive greedy-cover suite over all nonempty subsets of small cyclic
/// groups: packing, maximality, the verified cover, and the size bound.
pub fn check_difference_cover(max_order: u64) -> Result<CheckResult, Error> {
    let mut failures = Vec::new();
    let mut instances: u64 = 0;
    for n in 1..=max_order {
        let group = Group::new(GroupSpec::Finite { moduli: vec![n] })?;
        let elements = group.elements()?;
        for mask in 1..(1u64 << n) {
            let members: Vec<Element> = elements
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| e.clone())
                .collect();
            let set = SetSpec::Explicit(members.clone());
            let cert = greedy_packing_complement(&group, &set)?;
            instances += 1;
            let mut complaints = Vec::new();
            if !cert.verified {
                complaints.push("cover verification failed".to_string());
            }
            if cert.translates.len() as u64 > cert.bound {
                complaints.push(format!(
                    "#B = {} exceeds bound {}",
                    cert.translates.len(),
                    cert.bound
                ));
            }
            // Independent packing and maximality checks.
            let diff = set.difference_set(&group)?;
            let zero = group.zero();
            let b_diffs = pair_differences(&group, &cert.translates)?;
            for d in &b_diffs {
                if *d != zero && diff.contains(&group, d)? {
                    complaints.push(format!("difference {:?} violates packing", d));
                    break;
                }
            }
            'maximality: for candidate in &elements {
                if cert.translates.contains(candidate) {
                    continue;
                }
                for existing in &cert.translates {
                    let d = group.sub(candidate, existing)?;
                    if d != zero && diff.contains(&group, &d)? {
                        continue 'maximality;
                    }
                }
                complaints.push(format!("{:?} could still be added", candidate));
                break;
            }
            if !complaints.is_empty() {
                failures.push(CheckFailure {
                    input: json!({"group": group.spec(), "set": set}),
                    expected: "verified maximal cover within the bound".into(),
                    observed: complaints.join("; "),
                });
            }
        }
    }
    Ok(CheckResult::new("difference-cover", instances, failures))
}

/// Difference sets of positive-density periodic sets have bounded gaps,
/// within the span of the syndeticity certificate.
pub fn check_gap_bound(seed: u64, instances: u64) -> Result<CheckResult, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9a9);
    let line = zd(1);
    let mut failures = Vec::new();
    for _ in 0..instances {
        let set = random_periodic(&mut rng, 1, 20);
        let period = set.period().unwrap()[0];
        let cert = syndetic_certificate(&line, &set)?;
        let span = certificate_span(&cert)?;
        let stats = gap_statistics(&line, &set, 3 * period as i64)?;
        if stats.max_gap > span + 1 {
            failures.push(CheckFailure {
                input: json!({"set": set, "certificate": cert}),
                expected: format!("max gap <= span(B) + 1 = {}", span + 1),
                observed: format!("{}", stats.max_gap),
            });
        }
    }
    Ok(CheckResult::new("gap-bound", instances, failures))
}

fn certificate_span(cert: &CoverCertificate) -> Result<u64, Error> {
    let coords: Vec<i64> = cert
        .translates
        .iter()
        .map(|e| {
            e.as_coords()
                .map(|c| c[0])
                .ok_or_else(|| Error::GroupMismatch("lattice certificate expected".into()))
        })
        .collect::<Result<_, _>>()?;
    let max = coords.iter().copied().max().unwrap_or(0);
    let min = coords.iter().copied().min().unwrap_or(0);
    Ok((max - min) as u64)
}

/// Greedy partitions stay within the local count and verify their
/// difference condition; Folner boxes satisfy their growth inequality under
/// an independent recount.
pub fn check_partition(seed: u64, instances: u64, folner_pairs: u64) -> Result<CheckResult, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbe7);
    let line = zd(1);
    let mut failures = Vec::new();
    for _ in 0..instances {
        let set = random_periodic(&mut rng, 1, 12);
        let period = set.period().unwrap()[0] as i64;
        let radius = rng.gen_range(1..=4i64);
        let q: Vec<Element> = (-radius..=radius).map(|i| Element::coords([i])).collect();
        let scope: Vec<Element> = (0..3 * period.max(radius + 1))
            .map(|i| Element::coords([i]))
            .collect();
        let cert = greedy_partition(&line, &set, &q, &scope)?;
        let mut complaints = Vec::new();
        if !cert.verified {
            complaints.push("difference check failed".to_string());
        }
        if cert.parts.len() as u64 > cert.k_local {
            complaints.push(format!(
                "{} parts exceed local count {}",
                cert.parts.len(),
                cert.k_local
            ));
        }
        // Parts must be disjoint and union back to the set on the scope.
        let mut seen = BTreeSet::new();
        let mut duplicated = false;
        for part in &cert.parts {
            let SetSpec::Explicit(members) = part else {
                complaints.push("non-explicit part".into());
                continue;
            };
            for e in members {
                if !seen.insert(e.clone()) {
                    duplicated = true;
                }
            }
        }
        if duplicated {
            complaints.push("parts are not disjoint".into());
        }
        let expected: BTreeSet<Element> = set
            .enumerate_in_window(&line, &scope)?
            .into_iter()
            .collect();
        if seen != expected {
            complaints.push("parts do not union to the set on the scope".into());
        }
        if !complaints.is_empty() {
            failures.push(CheckFailure {
                input: json!({"set": set, "q": q, "scope_len": scope.len()}),
                expected: "verified partition within the local count".into(),
                observed: complaints.join("; "),
            });
        }
    }

    for _ in 0..folner_pairs {
        let dimension = if rng.gen_bool(0.7) { 1 } else { 2 };
        let count = rng.gen_range(1..=6);
        let mut points = BTreeSet::new();
        for _ in 0..count {
            let p: Vec<i64> = (0..dimension).map(|_| rng.gen_range(-6..=6i64)).collect();
            points.insert(p);
        }
        let c: Vec<Element> = points.iter().cloned().map(Element::Coords).collect();
        let eps = Rat::new(1, rng.gen_range(2..=10));
        let v = folner_box(&c, dimension, eps)?;
        // Independent recount of the sumset.
        let mut sumset = BTreeSet::new();
        for a in &c {
            for b in &v {
                let sum: Vec<i64> = a
                    .as_coords()
                    .unwrap()
                    .iter()
                    .zip(b.as_coords().unwrap())
                    .map(|(&x, &y)| x + y)
                    .collect();
                sumset.insert(sum);
            }
        }
        let lhs = Rat::from_integer(sumset.len() as i64);
        let rhs = (Rat::one() + eps) * Rat::from_integer(v.len() as i64);
        if lhs >= rhs {
            failures.push(CheckFailure {
                input: json!({"c": c, "epsilon": eps}),
                expected: format!("#(C+V) < {rhs}"),
                observed: format!("{lhs}"),
            });
        }
    }
    Ok(CheckResult::new(
        "partition",
        instances + folner_pairs,
        failures,
    ))
}

/// Packing bound and fattening suite.
///
/// For every packing-admissible `H` (all differences of `H` avoid `S - S`
/// away from 0) inside a fundamental domain of a random periodic `S`, the
/// size bound `#H <= 1/rho` must hold. When additionally the differences of
/// `Q = H - H` avoid `S - S` (the hypothesis that makes the `Q`-translates
/// of `S` pairwise disjoint), fattening multiplies the density exactly:
/// `density(S + Q) = rho * #Q`.
pub fn check_packing_and_fattening(
    seed: u64,
    min_pairs: u64,
) -> Result<CheckResult, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xac4);
    let line = zd(1);
    let mut failures = Vec::new();
    let mut admissible_pairs: u64 = 0;
    let mut fattening_pairs: u64 = 0;
    let mut sets: u64 = 0;

    while admissible_pairs < min_pairs && sets < 400 {
        let set = random_sparse_periodic(&mut rng, 12);
        sets += 1;
        let m = set.period().unwrap()[0];
        let rho = exact_counting_density(&line, &set)?;
        let diff = set.difference_set(&line)?;
        let zero = line.zero();

        for mask in 1u64..(1 << m) {
            let h: Vec<Element> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| Element::coords([i as i64]))
                .collect();
            // Packing admissibility of H itself.
            let mut admissible = true;
            'pairs: for a in &h {
                for b in &h {
                    let d = line.sub(a, b)?;
                    if d != zero && diff.contains(&line, &d)? {
                        admissible = false;
                        break 'pairs;
                    }
                }
            }
            if !admissible {
                continue;
            }
            admissible_pairs += 1;
            if Rat::from_integer(h.len() as i64) > rho.recip() {
                failures.push(CheckFailure {
                    input: json!({"set": set, "h": h}),
                    expected: format!("#H <= 1/rho = {}", rho.recip()),
                    observed: format!("{}", h.len()),
                });
                continue;
            }
            // Stronger admissibility: differences of Q = H - H also avoid
            // S - S, which is what makes the Q-translates disjoint.
            let q = pair_differences(&line, &h)?;
            let mut q_admissible = true;
            'qpairs: for a in &q {
                for b in &q {
                    let d = line.sub(a, b)?;
                    if d != zero && diff.contains(&line, &d)? {
                        q_admissible = false;
                        break 'qpairs;
                    }
                }
            }
            if !q_admissible {
                continue;
            }
            fattening_pairs += 1;
            let fat = fatten(&line, &set, &h)?;
            let fat_density = exact_counting_density(&line, &fat)?;
            let target = rho * Rat::from_integer(q.len() as i64);
            if fat_density < target {
                failures.push(CheckFailure {
                    input: json!({"set": set, "h": h}),
                    expected: format!("fattened density >= rho * #(H-H) = {target}"),
                    observed: format!("{fat_density}"),
                });
            } else if fat_density != target {
                // Discrete periodic instances always achieve equality.
                failures.push(CheckFailure {
                    input: json!({"set": set, "h": h}),
                    expected: format!("fattened density = {target}"),
                    observed: format!("{fat_density}"),
                });
            }
        }
    }

    if admissible_pairs < min_pairs {
        failures.push(CheckFailure {
            input: json!({"sets": sets}),
            expected: format!("at least {min_pairs} admissible pairs"),
            observed: format!("{admissible_pairs}"),
        });
    }
    if fattening_pairs == 0 {
        failures.push(CheckFailure {
            input: json!({"sets": sets}),
            expected: "a nonempty fattening corpus".into(),
            observed: "0 pairs".into(),
        });
    }
    Ok(CheckResult::new(
        "packing",
        admissible_pairs,
        failures,
    ))
}

/// Octagonal test hull used alongside the box and cross shapes.
fn octagon() -> WindowShape {
    let v = |a: i64, b: i64| vec![Rat::from_integer(a), Rat::from_integer(b)];
    WindowShape::Hull(vec![
        v(2, 1),
        v(1, 2),
        v(-1, 2),
        v(-2, 1),
        v(-2, -1),
        v(-1, -2),
        v(1, -2),
        v(2, -1),
    ])
}

fn segment_hull() -> WindowShape {
    WindowShape::Hull(vec![vec![Rat::from_integer(1)], vec![Rat::from_integer(-1)]])
}

/// Shape invariance of windowed density on periodic lattice sets: box
/// ratios are exact at period-aligned scales, and every shape's tail
/// maximum stays within `1/r_max` of the periodic oracle.
pub fn check_shape_invariance(seed: u64, sets: u64) -> Result<CheckResult, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a4e);
    let mut failures = Vec::new();
    for _ in 0..sets {
        let dimension = if rng.gen_bool(0.5) { 1 } else { 2 };
        let group = zd(dimension);
        let set = random_periodic(&mut rng, dimension, 8);
        let oracle = periodic_banach_oracle(&group, &set)?;
        let scales = aligned_scales(lcm_of(set.period().unwrap()));
        let r_max = *scales.last().unwrap();
        let tolerance = Rat::new(1, r_max as i64);
        let measure = MeasureSpec::Trace(set.clone());

        let mut shapes = vec![WindowShape::Box, WindowShape::CrossPolytope];
        shapes.push(if dimension == 1 { segment_hull() } else { octagon() });
        for shape in shapes {
            let family = WindowFamily {
                shape: shape.clone(),
                scales: scales.clone(),
                translates: TranslateSearch::FullPeriod,
            };
            let report = uniform_upper_density_windows(&group, &measure, &family)?;
            if shape == WindowShape::Box {
                // Full periods per axis at every aligned scale: exact.
                for rec in &report.records {
                    if rec.ratio != oracle {
                        failures.push(CheckFailure {
                            input: json!({"set": set, "shape": shape, "scale": rec.scale}),
                            expected: format!("exact ratio {oracle}"),
                            observed: format!("{}", rec.ratio),
                        });
                    }
                }
            }
            let tail = report.tail_max_ratio;
            if tail < oracle || tail - oracle > tolerance {
                failures.push(CheckFailure {
                    input: json!({"set": set, "shape": shape, "scales": scales}),
                    expected: format!(
                        "tail max within {tolerance} above the oracle {oracle}"
                    ),
                    observed: format!("{tail}"),
                });
            }
        }
    }
    Ok(CheckResult::new("shape-invariance", sets, failures))
}

/// Everything the syndeticity pipeline produced, all certificates included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    /// Quotient on which all finite checks ran.
    pub quotient: GroupSpec,
    /// The window `H - H` in the ambient lattice.
    pub window: Vec<Element>,
    pub partition: PartitionCertificate,
    /// Index of the part carried forward (first with density >= rho/n).
    pub selected_part: usize,
    pub part_density: Rat,
    /// The fattened set `S_j + (H - H)`, periodic in the lattice.
    pub fattened: SetSpec,
    pub fattened_density: Rat,
    pub cover: CoverCertificate,
    /// Direct enumeration check that `B + (H-H) + (H-H) + (S-S)` covers the
    /// quotient, independent of every intermediate step.
    pub final_cover_verified: bool,
}

/// End-to-end syndeticity construction for a periodic lattice set `s` and a
/// finite `h`: partition by the window `H - H`, select a dense part, fatten
/// it, cover the fattened set, and verify the final translate cover.
pub fn syndetic_pipeline(
    group: &Group,
    s: &SetSpec,
    h: &[Element],
) -> Result<PipelineReport, Error> {
    s.validate(group)?;
    let GroupSpec::Zd { .. } = group.spec() else {
        return Err(Error::PipelineStage {
            stage: "input".into(),
            reason: "the pipeline runs on periodic lattice sets".into(),
        });
    };
    let SetSpec::Periodic { m, residues } = s else {
        return Err(Error::PipelineStage {
            stage: "input".into(),
            reason: "the pipeline needs a periodic set".into(),
        });
    };
    if residues.is_empty() {
        return Err(Error::PipelineStage {
            stage: "input".into(),
            reason: "zero density".into(),
        });
    }
    if h.is_empty() {
        return Err(Error::PipelineStage {
            stage: "input".into(),
            reason: "empty H".into(),
        });
    }
    let rho = periodic_banach_oracle(group, s)?;

    // Window Q = H - H, which must avoid the period lattice away from 0:
    // otherwise no partition into period-m parts can satisfy the window
    // condition, since every part repeats with period m.
    let window = pair_differences(group, h)?;
    let zero = group.zero();
    for q in &window {
        if *q == zero {
            continue;
        }
        let c = q.as_coords().expect("lattice window");
        if c.iter().zip(m).all(|(&qi, &mi)| qi.rem_euclid(mi as i64) == 0) {
            return Err(Error::PipelineStage {
                stage: "window".into(),
                reason: format!("{:?} in H - H lies on the period lattice", q),
            });
        }
    }

    // Reduce to the quotient.
    let quotient = Group::new(GroupSpec::Finite { moduli: m.clone() })?;
    let members: Vec<Element> = residues
        .iter()
        .map(|r| Element::Coords(r.iter().map(|&x| x as i64).collect()))
        .collect();
    let set_q = SetSpec::Explicit(members);
    let window_q: Vec<Element> = {
        let mut reduced = BTreeSet::new();
        for q in &window {
            reduced.insert(quotient.canonicalize(q)?);
        }
        reduced.into_iter().collect()
    };
    let scope = quotient.elements()?;
    let partition = greedy_partition(&quotient, &set_q, &window_q, &scope)?;
    if !partition.verified {
        return Err(Error::PipelineStage {
            stage: "partition".into(),
            reason: "certificate failed verification".into(),
        });
    }

    // One part carries at least rho/n of the density.
    let n = partition.parts.len().max(1);
    let volume: u64 = m.iter().product();
    let threshold = rho / Rat::from_integer(n as i64);
    let mut selected: Option<(usize, Rat)> = None;
    for (j, part) in partition.parts.iter().enumerate() {
        let SetSpec::Explicit(part_members) = part else {
            unreachable!("partition parts are explicit")
        };
        let density = Rat::new(part_members.len() as i64, volume as i64);
        if density >= threshold {
            selected = Some((j, density));
            break;
        }
    }
    let Some((selected_part, part_density)) = selected else {
        return Err(Error::PipelineStage {
            stage: "selection".into(),
            reason: "no part reaches rho/n, which contradicts subadditivity".into(),
        });
    };

    // Lift the selected part back to a periodic set and fatten it.
    let SetSpec::Explicit(part_members) = &partition.parts[selected_part] else {
        unreachable!()
    };
    let part_periodic = SetSpec::Periodic {
        m: m.clone(),
        residues: part_members
            .iter()
            .map(|e| {
                e.as_coords()
                    .expect("quotient coordinates")
                    .iter()
                    .map(|&x| x as u64)
                    .collect()
            })
            .collect(),
    };
    let fattened = fatten(group, &part_periodic, h).map_err(|e| Error::PipelineStage {
        stage: "fattening".into(),
        reason: e.to_string(),
    })?;
    let fattened_density = periodic_banach_oracle(group, &fattened)?;

    let cover = greedy_packing_complement(group, &fattened)?;
    if !cover.verified {
        return Err(Error::PipelineStage {
            stage: "cover".into(),
            reason: "certificate failed verification".into(),
        });
    }

    // Final check on the quotient: B + Q + Q + (S - S) covers everything.
    let diff_q = set_q.difference_set(&quotient)?;
    let SetSpec::Explicit(diff_members) = &diff_q else { unreachable!() };
    let mut reach: BTreeSet<Element> = diff_members.iter().cloned().collect();
    for _ in 0..2 {
        let mut next = BTreeSet::new();
        for a in &reach {
            for q in &window_q {
                next.insert(quotient.add(a, q)?);
            }
        }
        reach = next;
    }
    let mut with_b = BTreeSet::new();
    for a in &reach {
        for b in &cover.translates {
            with_b.insert(quotient.add(a, b)?);
        }
    }
    let final_cover_verified = with_b.len() as u64 == volume;

    Ok(PipelineReport {
        quotient: quotient.spec().clone(),
        window,
        partition,
        selected_part,
        part_density,
        fattened,
        fattened_density,
        cover,
        final_cover_verified,
    })
}

/// Pipeline suite: the pinned two-residue example plus randomized periodic
/// sets, every run ending in an independently verified translate cover.
pub fn check_syndetic_pipeline(seed: u64, instances: u64) -> Result<CheckResult, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x919);
    let line = zd(1);
    let mut failures = Vec::new();

    let mut corpus: Vec<(SetSpec, Vec<Element>)> = vec![(
        SetSpec::Periodic {
            m: vec![5],
            residues: vec![vec![0], vec![1]],
        },
        coords_list(&[0, 1]),
    )];
    let h_choices: [&[i64]; 3] = [&[0, 1], &[0, 2], &[0, 1, 2]];
    while corpus.len() < (instances as usize) + 1 {
        let set = random_periodic(&mut rng, 1, 12);
        let m = set.period().unwrap()[0];
        if m < 5 {
            continue;
        }
        let h = coords_list(h_choices[rng.gen_range(0..h_choices.len())]);
        corpus.push((set, h));
    }

    for (set, h) in &corpus {
        match syndetic_pipeline(&line, set, h) {
            Ok(report) => {
                if !report.final_cover_verified {
                    failures.push(CheckFailure {
                        input: json!({"set": set, "h": h}),
                        expected: "final translate cover verified".into(),
                        observed: "cover check failed".into(),
                    });
                }
            }
            Err(err) => {
                failures.push(CheckFailure {
                    input: json!({"set": set, "h": h}),
                    expected: "pipeline completes".into(),
                    observed: err.to_string(),
                });
            }
        }
    }
    Ok(CheckResult::new(
        "syndetic-pipeline",
        corpus.len() as u64,
        failures,
    ))
}

/// Oscillation of the subgroup-chain density for denominator-band sets:
/// the ratio is exactly 0 early, climbs above the high threshold at the
/// band end, and a far second band pulls an intermediate ratio below the
/// low threshold.
pub fn check_farey_oscillation(low: Rat, high: Rat) -> Result<CheckResult, Error> {
    let torus = Group::new(GroupSpec::Qz)?;
    let mut failures = Vec::new();
    let mut instances = 0u64;

    let chain: Vec<Vec<Element>> = (2..=24).map(|n| farey_subgroup(n)).collect::<Result<_, _>>()?;
    let band = SetSpec::FareyBands(vec![(2, 24)]);
    let report = upper_density_sequence(&torus, &band, &chain)?;
    instances += 1;
    let first = report.records.first().unwrap().ratio;
    let last = report.records.last().unwrap().ratio;
    if first != Rat::zero() || last != Rat::new(178, 180) {
        failures.push(CheckFailure {
            input: json!({"set": band}),
            expected: "ratio 0 at n=2 and 178/180 at n=24".into(),
            observed: format!("first = {first}, last = {last}"),
        });
    }
    if last < high {
        failures.push(CheckFailure {
            input: json!({"set": band, "high": high}),
            expected: format!("late ratio above {high}"),
            observed: format!("{last}"),
        });
    }

    // A far band leaves a long stretch of small ratios in between.
    let two_bands = SetSpec::FareyBands(vec![(2, 24), (100, 200)]);
    let long_chain: Vec<Vec<Element>> =
        (2..=100).map(|n| farey_subgroup(n)).collect::<Result<_, _>>()?;
    let report = upper_density_sequence(&torus, &two_bands, &long_chain)?;
    instances += 1;
    let dip = report.records.last().unwrap().ratio;
    if dip >= low {
        failures.push(CheckFailure {
            input: json!({"set": two_bands, "low": low}),
            expected: format!("ratio at n=100 below {low}"),
            observed: format!("{dip}"),
        });
    }

    let empty = SetSpec::FareyBands(vec![]);
    let report = upper_density_sequence(&torus, &empty, &chain)?;
    instances += 1;
    if report.max_ratio != Rat::zero() {
        failures.push(CheckFailure {
            input: json!({"set": empty}),
            expected: "all ratios 0".into(),
            observed: format!("max = {}", report.max_ratio),
        });
    }

    Ok(CheckResult::new("farey-oscillation", instances, failures))
}

/// Names of all suites, in execution order.
pub fn suite_names() -> &'static [&'static str] {
    &[
        "density-definitions",
        "subadditivity",
        "difference-cover",
        "gap-bound",
        "partition",
        "packing",
        "shape-invariance",
        "syndetic-pipeline",
        "farey-oscillation",
    ]
}

/// Runs one named suite, or all of them for `"all"`.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckResult>, Error> {
    let run_one = |n: &str| -> Result<CheckResult, Error> {
        match n {
            "density-definitions" => check_density_definitions(seed),
            "subadditivity" => check_subadditivity(seed, 100),
            "difference-cover" => check_difference_cover(10),
            "gap-bound" => check_gap_bound(seed, 30),
            "partition" => check_partition(seed, 100, 20),
            "packing" => check_packing_and_fattening(seed, 10_000),
            "shape-invariance" => check_shape_invariance(seed, 50),
            "syndetic-pipeline" => check_syndetic_pipeline(seed, 20),
            "farey-oscillation" => check_farey_oscillation(Rat::new(1, 10), Rat::new(9, 10)),
            other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        }
    };
    if name == "all" {
        suite_names().iter().map(|n| run_one(n)).collect()
    } else {
        Ok(vec![run_one(name)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_pipeline_example() {
        let line = zd(1);
        let s = SetSpec::Periodic {
            m: vec![5],
            residues: vec![vec![0], vec![1]],
        };
        let report = syndetic_pipeline(&line, &s, &coords_list(&[0, 1])).unwrap();
        assert_eq!(report.partition.parts.len(), 2);
        assert_eq!(report.selected_part, 0);
        assert_eq!(report.part_density, Rat::new(1, 5));
        assert_eq!(report.fattened_density, Rat::new(3, 5));
        assert_eq!(report.cover.translates, coords_list(&[0]));
        assert!(report.final_cover_verified);
    }

    #[test]
    fn pipeline_whole_line_is_trivially_syndetic() {
        let line = zd(1);
        let s = SetSpec::Periodic {
            m: vec![1],
            residues: vec![vec![0]],
        };
        let report = syndetic_pipeline(&line, &s, &coords_list(&[0])).unwrap();
        assert_eq!(report.cover.translates, coords_list(&[0]));
        assert!(report.final_cover_verified);
    }

    #[test]
    fn pipeline_degenerate_window_reduces_to_cover() {
        let line = zd(1);
        let s = SetSpec::Periodic {
            m: vec![10],
            residues: vec![vec![0], vec![1], vec![3]],
        };
        let report = syndetic_pipeline(&line, &s, &coords_list(&[0])).unwrap();
        assert_eq!(report.partition.parts.len(), 1);
        assert_eq!(report.cover.translates, coords_list(&[0, 4]));
        assert!(report.final_cover_verified);
    }

    #[test]
    fn pipeline_rejects_window_on_period_lattice() {
        let line = zd(1);
        let s = SetSpec::Periodic {
            m: vec![3],
            residues: vec![vec![0]],
        };
        // H - H contains 3, a period multiple.
        let err = syndetic_pipeline(&line, &s, &coords_list(&[0, 3]));
        assert!(matches!(err, Err(Error::PipelineStage { .. })));
    }

    #[test]
    fn oscillation_suite_passes() {
        let result = check_farey_oscillation(Rat::new(1, 10), Rat::new(9, 10)).unwrap();
        assert!(result.passed(), "{:?}", result.failures);
    }

    #[test]
    fn small_randomized_suites_pass() {
        let result = check_subadditivity(7, 10).unwrap();
        assert!(result.passed(), "{:?}", result.failures);
        let result = check_gap_bound(7, 5).unwrap();
        assert!(result.passed(), "{:?}", result.failures);
        let result = check_partition(7, 10, 5).unwrap();
        assert!(result.passed(), "{:?}", result.failures);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 0).is_err());
    }
}
