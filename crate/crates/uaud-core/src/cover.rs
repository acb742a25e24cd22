//! Greedy translate covers of difference sets, with checkable certificates.
//!
//! For a nonempty set `A` of density `rho` in a finite group (or a periodic
//! subset of the lattice, reduced to its quotient), the greedy construction
//! produces a finite `B`, maximal with `(A-A) meet (B-B) = {0}`, such that
//! the translates of `A-A` by `B` cover the whole group, with the size
//! guarantee `#B <= floor(1/rho)`. Verification of a certificate is a
//! direct enumeration that never trusts the construction.

use serde::{Deserialize, Serialize};

use crate::group::{Element, Group, GroupSpec};
use crate::rat::Rat;
use crate::set::SetSpec;
use crate::Error;

/// Checkable evidence that finitely many translates of a difference set
/// cover a finite scope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificate {
    /// The translate set, sorted in canonical order.
    #[serde(rename = "B")]
    pub translates: Vec<Element>,
    /// Exact density of the underlying set on the scope.
    pub density: Rat,
    /// `floor(1 / density)`, the guaranteed bound on `#B`.
    pub bound: u64,
    /// True iff the cover was confirmed by direct enumeration.
    pub verified: bool,
    /// The finite group (possibly a quotient of the lattice) on which the
    /// cover was checked.
    pub scope: GroupSpec,
}

/// Finite working form of a cover problem: a finite group together with
/// the explicit member list of the set under consideration.
struct FiniteScope {
    group: Group,
    members: Vec<Element>,
}

/// Reduces the supported inputs to a finite group. Periodic lattice sets go
/// to their quotient modulo the period; a cover there lifts to the lattice.
fn reduce_to_finite(group: &Group, set: &SetSpec) -> Result<FiniteScope, Error> {
    set.validate(group)?;
    match (group.spec(), set) {
        (GroupSpec::Finite { .. }, _) => {
            let members = set.enumerate_in_window(group, &group.elements()?)?;
            Ok(FiniteScope {
                group: group.clone(),
                members,
            })
        }
        (GroupSpec::Zd { .. }, SetSpec::Periodic { m, residues }) => {
            let quotient = Group::new(GroupSpec::Finite { moduli: m.clone() })?;
            let mut members: Vec<Element> = residues
                .iter()
                .map(|r| Element::Coords(r.iter().map(|&x| x as i64).collect()))
                .collect();
            members.sort();
            members.dedup();
            Ok(FiniteScope {
                group: quotient,
                members,
            })
        }
        _ => Err(Error::Unsupported(
            "covering needs a finite group or a periodic lattice set".into(),
        )),
    }
}

/// True iff the translates of `diff` by `b` cover every element of `scope`.
/// This re-checks by direct enumeration and is independent of how `b` was
/// constructed.
pub fn verify_translates_cover(
    group: &Group,
    diff: &SetSpec,
    b: &[Element],
    scope: &[Element],
) -> Result<bool, Error> {
    for g in scope {
        let mut covered = false;
        for t in b {
            if diff.contains(group, &group.sub(g, t)?)? {
                covered = true;
                break;
            }
        }
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy construction of a maximal `B` with `(A-A) meet (B-B) = {0}`,
/// together with the verified cover certificate for `A-A+B`.
///
/// Candidates are scanned in canonical group order starting from 0, so the
/// result is deterministic. The density used for the bound is the exact
/// counting density of `A` on the finite scope.
pub fn greedy_packing_complement(group: &Group, set: &SetSpec) -> Result<CoverCertificate, Error> {
    let scope = reduce_to_finite(group, set)?;
    if scope.members.is_empty() {
        return Err(Error::ZeroDensity(
            "cover construction needs a nonempty set".into(),
        ));
    }
    let order = scope.group.order().expect("finite scope");
    let density = Rat::new(scope.members.len() as i64, order as i64);
    let bound = density.recip().floor() as u64;

    let a_spec = SetSpec::Explicit(scope.members.clone());
    let diff = a_spec.difference_set(&scope.group)?;
    let SetSpec::Explicit(diff_elems) = &diff else {
        unreachable!("difference of explicit set is explicit")
    };
    let diff_set: std::collections::BTreeSet<&Element> = diff_elems.iter().collect();
    let zero = scope.group.zero();

    let mut b: Vec<Element> = Vec::new();
    for candidate in scope.group.elements()? {
        // Adding `candidate` keeps (A-A) meet (B-B) = {0} iff none of its
        // differences with the current B lands in (A-A) minus 0. The
        // difference set is symmetric, so one direction suffices.
        let mut blocked = false;
        for existing in &b {
            let d = scope.group.sub(&candidate, existing)?;
            if d != zero && diff_set.contains(&d) {
                blocked = true;
                break;
            }
        }
        if !blocked {
            b.push(candidate);
        }
    }

    let all = scope.group.elements()?;
    let verified = verify_translates_cover(&scope.group, &diff, &b, &all)?;
    Ok(CoverCertificate {
        translates: b,
        density,
        bound,
        verified,
        scope: scope.group.spec().clone(),
    })
}

/// Syndeticity certificate for the difference set of `s`: a finite set of
/// translates `B` with `(S-S)+B` covering the scope, of size at most
/// `floor(1/density(S))`.
pub fn syndetic_certificate(group: &Group, s: &SetSpec) -> Result<CoverCertificate, Error> {
    greedy_packing_complement(group, s)
}

/// Positive elements of `A - A` up to a range bound, with their consecutive
/// gaps (measured from 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapStatistics {
    pub elements: Vec<i64>,
    pub gaps: Vec<u64>,
    pub max_gap: u64,
}

/// Gap statistics of the difference set of a periodic subset of the
/// integers. The set must have positive density (nonempty residues), and
/// the range must reach at least one full period.
pub fn gap_statistics(group: &Group, set: &SetSpec, range_max: i64) -> Result<GapStatistics, Error> {
    set.validate(group)?;
    let GroupSpec::Zd { dimension: 1 } = group.spec() else {
        return Err(Error::Unsupported(
            "gap statistics are computed on the one-dimensional lattice".into(),
        ));
    };
    let SetSpec::Periodic { m, residues } = set else {
        return Err(Error::Unsupported(
            "gap statistics need a periodic set".into(),
        ));
    };
    if residues.is_empty() {
        return Err(Error::ZeroDensity(
            "gaps of an empty set are unbounded".into(),
        ));
    }
    let period = m[0] as i64;
    if range_max < period {
        return Err(Error::InvalidArgument(format!(
            "range {range_max} is shorter than one period {period}"
        )));
    }
    let diff = set.difference_set(group)?;
    let mut elements = Vec::new();
    for x in 1..=range_max {
        if diff.contains(group, &Element::coords([x]))? {
            elements.push(x);
        }
    }
    let mut gaps = Vec::with_capacity(elements.len());
    let mut previous = 0i64;
    for &x in &elements {
        gaps.push((x - previous) as u64);
        previous = x;
    }
    let max_gap = gaps.iter().copied().max().unwrap_or(0);
    Ok(GapStatistics {
        elements,
        gaps,
        max_gap,
    })
}
