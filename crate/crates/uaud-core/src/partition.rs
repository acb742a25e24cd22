//! Local counts, bounded-degree greedy partitions, Folner-style boxes, the
//! fattening construction and the packing bound.
//!
//! The partition machinery splits a set `S` into finitely many parts whose
//! internal differences avoid a prescribed symmetric window `Q`. The number
//! of parts never exceeds the local count, the maximal number of points of
//! `S` in any translate `s + Q`. Parts come out of a greedy coloring in
//! canonical order, so the result is deterministic, and every certificate
//! is re-verified by a direct difference check.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::group::{Element, Group, GroupSpec};
use crate::rat::Rat;
use crate::set::SetSpec;
use crate::Error;

/// Checkable evidence for a difference-avoiding partition on a finite scope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    /// The symmetric window the parts avoid (sorted, contains 0).
    pub q: Vec<Element>,
    /// Disjoint parts whose union is the set restricted to the scope.
    pub parts: Vec<SetSpec>,
    /// Maximal number of set points in any window translate `s + Q`.
    pub k_local: u64,
    /// True iff every part passed the direct difference check.
    pub verified: bool,
    /// The scope the partition was computed on, in canonical order.
    pub scope: Vec<Element>,
}

/// Validates that a window is finite, symmetric and contains 0; returns it
/// as a sorted deduplicated list.
fn normalize_window(group: &Group, q: &[Element]) -> Result<Vec<Element>, Error> {
    let window: BTreeSet<Element> = q.iter().cloned().collect();
    for e in &window {
        if !group.is_canonical(e) {
            return Err(Error::NotCanonical(format!("{:?}", e)));
        }
        if !window.contains(&group.neg(e)?) {
            return Err(Error::InvalidWindow(format!(
                "window is not symmetric: missing the negation of {:?}",
                e
            )));
        }
    }
    if !window.contains(&group.zero()) {
        return Err(Error::InvalidWindow("window must contain 0".into()));
    }
    Ok(window.into_iter().collect())
}

/// Maximal number of points of `s` landing in a window translate `x + Q`,
/// over all `x` in `S` restricted to the scope. Zero for an empty set.
pub fn local_count(
    group: &Group,
    set: &SetSpec,
    q: &[Element],
    scope: &[Element],
) -> Result<u64, Error> {
    set.validate(group)?;
    let q = normalize_window(group, q)?;
    let mut best: u64 = 0;
    for x in scope {
        if !set.contains(group, x)? {
            continue;
        }
        let mut count: u64 = 0;
        for offset in &q {
            if set.contains(group, &group.add(x, offset)?)? {
                count += 1;
            }
        }
        best = best.max(count);
    }
    Ok(best)
}

/// Greedy partition of `S` on a finite scope into parts with
/// `(S_j - S_j) meet Q = {0}`.
///
/// Elements are processed in canonical order; each is placed in the lowest
/// indexed part containing none of its `Q`-neighbors. The certificate is
/// verified by re-checking all pairwise differences of every part.
pub fn greedy_partition(
    group: &Group,
    set: &SetSpec,
    q: &[Element],
    scope: &[Element],
) -> Result<PartitionCertificate, Error> {
    set.validate(group)?;
    let q = normalize_window(group, q)?;
    let scope_sorted: Vec<Element> = {
        let s: BTreeSet<Element> = scope.iter().cloned().collect();
        s.into_iter().collect()
    };
    let members = set.enumerate_in_window(group, &scope_sorted)?;
    let k_local = local_count(group, set, &q, &scope_sorted)?;

    let q_set: BTreeSet<&Element> = q.iter().collect();
    let zero = group.zero();
    let mut parts: Vec<Vec<Element>> = Vec::new();
    for x in &members {
        let mut placed = false;
        for part in parts.iter_mut() {
            let conflict = part.iter().try_fold(false, |acc, y| -> Result<bool, Error> {
                if acc {
                    return Ok(true);
                }
                let d = group.sub(x, y)?;
                Ok(d != zero && q_set.contains(&d))
            })?;
            if !conflict {
                part.push(x.clone());
                placed = true;
                break;
            }
        }
        if !placed {
            parts.push(vec![x.clone()]);
        }
    }

    // Independent verification: every internal difference avoids Q minus 0.
    let mut verified = true;
    'check: for part in &parts {
        for a in part {
            for b in part {
                let d = group.sub(a, b)?;
                if d != zero && q_set.contains(&d) {
                    verified = false;
                    break 'check;
                }
            }
        }
    }

    Ok(PartitionCertificate {
        q,
        parts: parts.into_iter().map(SetSpec::Explicit).collect(),
        k_local,
        verified,
        scope: scope_sorted,
    })
}

/// Smallest centered box `V = [-s, s]^d` with `#(C+V) < (1+eps) * #V`,
/// found by growing the side. Such a box always exists because the sumset
/// excess of a box is a lower-order boundary term.
pub fn folner_box(
    c: &[Element],
    dimension: usize,
    epsilon: Rat,
) -> Result<Vec<Element>, Error> {
    if c.is_empty() {
        return Err(Error::InvalidArgument(
            "Folner box needs a nonempty finite set".into(),
        ));
    }
    if epsilon <= Rat::zero() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let coords: Vec<&[i64]> = c
        .iter()
        .map(|e| {
            e.as_coords()
                .filter(|v| v.len() == dimension)
                .ok_or_else(|| Error::GroupMismatch("lattice points expected".into()))
        })
        .collect::<Result<_, _>>()?;

    for side in 0..=1_000_000i64 {
        let volume = (2 * side + 1).pow(dimension as u32);
        // #(C+V) for a box V: count the union of shifted boxes exactly.
        let mut sumset: BTreeSet<Vec<i64>> = BTreeSet::new();
        for point in &coords {
            let mut current: Vec<i64> = point.iter().map(|&x| x - side).collect();
            'fill: loop {
                sumset.insert(current.clone());
                let mut i = dimension;
                loop {
                    if i == 0 {
                        break 'fill;
                    }
                    i -= 1;
                    current[i] += 1;
                    if current[i] <= point[i] + side {
                        break;
                    }
                    current[i] = point[i] - side;
                }
            }
        }
        let grown = sumset.len() as i64;
        // Strict inequality, checked in exact rational arithmetic.
        if Rat::from_integer(grown) < (Rat::one() + epsilon) * Rat::from_integer(volume) {
            let mut out = Vec::with_capacity(volume as usize);
            let mut current = vec![-side; dimension];
            'emit: loop {
                out.push(Element::Coords(current.clone()));
                let mut i = dimension;
                loop {
                    if i == 0 {
                        break 'emit;
                    }
                    i -= 1;
                    current[i] += 1;
                    if current[i] <= side {
                        break;
                    }
                    current[i] = -side;
                }
            }
            return Ok(out);
        }
    }
    Err(Error::Internal("Folner box growth did not terminate".into()))
}

/// Difference set `H - H` of a finite list of lattice or finite-group
/// elements, sorted.
pub fn pair_differences(group: &Group, h: &[Element]) -> Result<Vec<Element>, Error> {
    let mut out = BTreeSet::new();
    for a in h {
        for b in h {
            out.insert(group.sub(a, b)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// Fattens a point set `S` to `A = S + (H - H)`.
///
/// Requires the packing hypothesis `(S-S) meet (H-H) = {0}`; on failure the
/// error names a violating pair from `H`. For a periodic `S` the result is
/// periodic with the same period.
pub fn fatten(group: &Group, set: &SetSpec, h: &[Element]) -> Result<SetSpec, Error> {
    set.validate(group)?;
    if h.is_empty() {
        return Err(Error::InvalidArgument("fattening needs a nonempty H".into()));
    }
    let diff = set.difference_set(group)?;
    let zero = group.zero();
    for a in h {
        for b in h {
            let d = group.sub(a, b)?;
            if d != zero && diff.contains(group, &d)? {
                return Err(Error::PackingViolated {
                    witness: format!("{:?} - {:?} lies in S - S", a, b),
                });
            }
        }
    }
    let offsets = pair_differences(group, h)?;
    match set {
        SetSpec::Explicit(members) => {
            let mut out = BTreeSet::new();
            for s in members {
                for q in &offsets {
                    out.insert(group.add(s, q)?);
                }
            }
            Ok(SetSpec::Explicit(out.into_iter().collect()))
        }
        SetSpec::Periodic { m, residues } => {
            let mut out: BTreeSet<Vec<u64>> = BTreeSet::new();
            for r in residues {
                for q in &offsets {
                    let q = q
                        .as_coords()
                        .ok_or_else(|| Error::GroupMismatch("lattice points expected".into()))?;
                    let shifted: Vec<u64> = r
                        .iter()
                        .zip(q)
                        .zip(m)
                        .map(|((&ri, &qi), &mi)| {
                            (ri as i64 + qi).rem_euclid(mi as i64) as u64
                        })
                        .collect();
                    out.insert(shifted);
                }
            }
            Ok(SetSpec::Periodic {
                m: m.clone(),
                residues: out.into_iter().collect(),
            })
        }
        _ => Err(Error::Unsupported(
            "fattening needs an explicit or periodic set".into(),
        )),
    }
}

/// Packing bound check: if `(H-H) meet (S-S) = {0}` then `#H <= 1/rho`
/// must hold for the exact counting density `rho` of `S`; returns whether
/// the packing condition holds. A bound violation would contradict the
/// disjointness of the translates `s + H` and is reported as an internal
/// error.
pub fn packing_bound_check(group: &Group, set: &SetSpec, h: &[Element]) -> Result<bool, Error> {
    set.validate(group)?;
    let diff = set.difference_set(group)?;
    let zero = group.zero();
    for a in h {
        for b in h {
            let d = group.sub(a, b)?;
            if d != zero && diff.contains(group, &d)? {
                return Ok(false);
            }
        }
    }
    let density = exact_counting_density(group, set)?;
    if density.is_zero() {
        return Err(Error::ZeroDensity(
            "packing bound needs positive density".into(),
        ));
    }
    let unique: BTreeSet<&Element> = h.iter().collect();
    let size = Rat::from_integer(unique.len() as i64);
    if size > density.recip() {
        return Err(Error::Internal(format!(
            "packing bound violated: #H = {} with density {}",
            unique.len(),
            density
        )));
    }
    Ok(true)
}

/// Exact counting density of a periodic lattice set or of an explicit set
/// in a finite group.
pub fn exact_counting_density(group: &Group, set: &SetSpec) -> Result<Rat, Error> {
    match (group.spec(), set) {
        (GroupSpec::Zd { .. }, SetSpec::Periodic { .. }) => {
            crate::density::periodic_banach_oracle(group, set)
        }
        (GroupSpec::Finite { .. }, _) => {
            let members = set.enumerate_in_window(group, &group.elements()?)?;
            Ok(Rat::new(
                members.len() as i64,
                group.order().expect("finite") as i64,
            ))
        }
        _ => Err(Error::Unsupported(
            "exact density needs a periodic lattice set or a finite group".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zd1() -> Group {
        Group::new(GroupSpec::Zd { dimension: 1 }).unwrap()
    }

    fn coords_list(items: &[i64]) -> Vec<Element> {
        items.iter().map(|&i| Element::coords([i])).collect()
    }

    fn range_scope(lo: i64, hi: i64) -> Vec<Element> {
        (lo..hi).map(|i| Element::coords([i])).collect()
    }

    fn whole_line() -> SetSpec {
        SetSpec::Periodic {
            m: vec![1],
            residues: vec![vec![0]],
        }
    }

    fn two_of_four() -> SetSpec {
        // 4Z union (4Z + 1)
        SetSpec::Periodic {
            m: vec![4],
            residues: vec![vec![0], vec![1]],
        }
    }

    #[test]
    fn local_count_examples() {
        let g = zd1();
        let q = coords_list(&[-2, -1, 0, 1, 2]);
        let k = local_count(&g, &whole_line(), &q, &range_scope(0, 100)).unwrap();
        assert_eq!(k, 5);

        let q3 = coords_list(&[-1, 0, 1]);
        let k = local_count(&g, &two_of_four(), &q3, &range_scope(0, 100)).unwrap();
        assert_eq!(k, 2);

        let k = local_count(&g, &SetSpec::empty(), &q3, &range_scope(0, 100)).unwrap();
        assert_eq!(k, 0);
    }

    #[test]
    fn local_count_rejects_asymmetric_window() {
        let g = zd1();
        let q = coords_list(&[0, 1]);
        assert!(local_count(&g, &whole_line(), &q, &range_scope(0, 10)).is_err());
        let no_zero = coords_list(&[-1, 1]);
        assert!(local_count(&g, &whole_line(), &no_zero, &range_scope(0, 10)).is_err());
    }

    #[test]
    fn greedy_partition_of_the_line() {
        let g = zd1();
        let q = coords_list(&[-2, -1, 0, 1, 2]);
        let cert = greedy_partition(&g, &whole_line(), &q, &range_scope(0, 100)).unwrap();
        assert!(cert.verified);
        assert!(cert.parts.len() as u64 <= cert.k_local);
        // Greedy in canonical order reuses part 0 at distance 3, so the
        // parts are the residue classes modulo 3.
        assert_eq!(cert.parts.len(), 3);
        for (j, part) in cert.parts.iter().enumerate() {
            let SetSpec::Explicit(members) = part else { panic!() };
            for e in members {
                let x = e.as_coords().unwrap()[0];
                assert_eq!(x.rem_euclid(3), j as i64);
            }
        }
    }

    #[test]
    fn greedy_partition_splits_adjacent_residues() {
        let g = zd1();
        let q = coords_list(&[-1, 0, 1]);
        let cert = greedy_partition(&g, &two_of_four(), &q, &range_scope(0, 40)).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.parts.len(), 2);
        let SetSpec::Explicit(first) = &cert.parts[0] else { panic!() };
        assert!(first
            .iter()
            .all(|e| e.as_coords().unwrap()[0].rem_euclid(4) == 0));
        let SetSpec::Explicit(second) = &cert.parts[1] else { panic!() };
        assert!(second
            .iter()
            .all(|e| e.as_coords().unwrap()[0].rem_euclid(4) == 1));
    }

    #[test]
    fn greedy_partition_of_empty_set() {
        let g = zd1();
        let q = coords_list(&[-1, 0, 1]);
        let cert = greedy_partition(&g, &SetSpec::empty(), &q, &range_scope(0, 10)).unwrap();
        assert!(cert.parts.is_empty());
        assert!(cert.verified);
        assert_eq!(cert.k_local, 0);
    }

    #[test]
    fn folner_box_on_interval() {
        let c = coords_list(&(0..10).collect::<Vec<_>>());
        let v = folner_box(&c, 1, Rat::new(1, 10)).unwrap();
        // First centered interval satisfying #(C+V) < 1.1 #V is [-45, 45].
        assert_eq!(v.len(), 91);
        assert_eq!(v[0], Element::coords([-45]));
        assert_eq!(v[90], Element::coords([45]));
    }

    #[test]
    fn folner_box_singleton() {
        let v = folner_box(&coords_list(&[0]), 1, Rat::new(1, 100)).unwrap();
        assert_eq!(v, coords_list(&[0]));
    }

    #[test]
    fn folner_box_square() {
        let mut c = Vec::new();
        for x in -5..=5 {
            for y in -5..=5 {
                c.push(Element::coords([x, y]));
            }
        }
        let v = folner_box(&c, 2, Rat::new(1, 2)).unwrap();
        // Side 45 box: 55^2 = 3025 < 1.5 * 45^2 = 3037.5.
        assert_eq!(v.len(), 45 * 45);
    }

    #[test]
    fn fatten_periodic_examples() {
        let g = zd1();
        let five_z = SetSpec::Periodic {
            m: vec![5],
            residues: vec![vec![0]],
        };
        let a = fatten(&g, &five_z, &coords_list(&[0, 1])).unwrap();
        assert_eq!(
            exact_counting_density(&g, &a).unwrap(),
            Rat::new(3, 5)
        );

        let same = fatten(&g, &five_z, &coords_list(&[0])).unwrap();
        assert_eq!(same, five_z);

        let full = fatten(&g, &five_z, &coords_list(&[0, 1, 2])).unwrap();
        assert_eq!(exact_counting_density(&g, &full).unwrap(), Rat::one());
    }

    #[test]
    fn fatten_rejects_packing_violation() {
        let g = zd1();
        let five_z = SetSpec::Periodic {
            m: vec![5],
            residues: vec![vec![0]],
        };
        // 5 - 0 = 5 lies in S - S.
        let err = fatten(&g, &five_z, &coords_list(&[0, 1, 2, 3, 4, 5]));
        assert!(matches!(err, Err(Error::PackingViolated { .. })));
    }

    #[test]
    fn packing_bound_examples() {
        let g = zd1();
        let five_z = SetSpec::Periodic {
            m: vec![5],
            residues: vec![vec![0]],
        };
        assert!(packing_bound_check(&g, &five_z, &coords_list(&[0, 1, 2, 3, 4])).unwrap());
        assert!(!packing_bound_check(&g, &five_z, &coords_list(&[0, 1, 2, 3, 4, 5])).unwrap());
        assert!(packing_bound_check(&g, &whole_line(), &coords_list(&[7])).unwrap());
        assert!(!packing_bound_check(&g, &whole_line(), &coords_list(&[0, 1])).unwrap());
    }
}
