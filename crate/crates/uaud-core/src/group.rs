//! Discrete abelian groups with exact element arithmetic.
//!
//! Three group kinds are supported: finite products of cyclic groups
//! `Z_{m_1} x ... x Z_{m_k}`, the integer lattice `Z^d`, and the rational
//! torus `Q/Z`. The Haar measure on all of them is the counting measure.
//! Elements carry a unique canonical form (reduced coordinates, reduced
//! fractions) and a canonical total order, which fixes deterministic
//! iteration for every greedy construction built on top.

use std::cmp::Ordering;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::Error;

/// Description of a discrete abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    /// Finite product of cyclic groups; order is the product of the moduli.
    Finite { moduli: Vec<u64> },
    /// The integer lattice of the given dimension.
    Zd { dimension: usize },
    /// The rational torus Q/Z, exposed through finite truncations only.
    Qz,
}

/// A group element in canonical form.
///
/// `Coords` serves both finite cyclic products (coordinates reduced into
/// `[0, m_i)`) and the lattice (arbitrary signed coordinates). `Fraction`
/// is a reduced `p/q` with `0 <= p < q`, so `0` is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Fraction { num: u64, den: u64 },
    Coords(Vec<i64>),
}

impl Element {
    pub fn coords(v: impl Into<Vec<i64>>) -> Self {
        Element::Coords(v.into())
    }

    /// Reduced fraction `p/q` taken modulo 1.
    pub fn fraction(num: u64, den: u64) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::InvalidArgument("fraction with denominator 0".into()));
        }
        let p = num % den;
        let g = p.gcd(&den);
        Ok(Element::Fraction {
            num: p / g,
            den: den / g,
        })
    }

    pub fn as_coords(&self) -> Option<&[i64]> {
        match self {
            Element::Coords(c) => Some(c),
            Element::Fraction { .. } => None,
        }
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            // Lexicographic on coordinates.
            (Element::Coords(a), Element::Coords(b)) => a.cmp(b),
            // Fractions ordered by value; exact via cross multiplication.
            (
                Element::Fraction { num: p, den: q },
                Element::Fraction { num: p2, den: q2 },
            ) => (*p as u128 * *q2 as u128).cmp(&(*p2 as u128 * *q as u128)),
            (Element::Coords(_), Element::Fraction { .. }) => Ordering::Less,
            (Element::Fraction { .. }, Element::Coords(_)) => Ordering::Greater,
        }
    }
}

/// Handle over a validated [`GroupSpec`], exposing the group law.
///
/// Immutable after creation; all operations are pure, so a handle can be
/// shared freely between concurrent workers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    spec: GroupSpec,
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self, Error> {
        match &spec {
            GroupSpec::Finite { moduli } => {
                if moduli.is_empty() {
                    return Err(Error::InvalidGroupSpec("moduli list is empty".into()));
                }
                if moduli.iter().any(|&m| m == 0) {
                    return Err(Error::InvalidGroupSpec("modulus 0 is not allowed".into()));
                }
            }
            GroupSpec::Zd { dimension } => {
                if *dimension == 0 {
                    return Err(Error::InvalidGroupSpec("dimension 0 is not allowed".into()));
                }
            }
            GroupSpec::Qz => {}
        }
        Ok(Group { spec })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Group order for finite groups, `None` for the infinite ones.
    pub fn order(&self) -> Option<u64> {
        match &self.spec {
            GroupSpec::Finite { moduli } => Some(moduli.iter().product()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.spec, GroupSpec::Finite { .. })
    }

    pub fn zero(&self) -> Element {
        match &self.spec {
            GroupSpec::Finite { moduli } => Element::Coords(vec![0; moduli.len()]),
            GroupSpec::Zd { dimension } => Element::Coords(vec![0; *dimension]),
            GroupSpec::Qz => Element::Fraction { num: 0, den: 1 },
        }
    }

    pub fn is_canonical(&self, e: &Element) -> bool {
        match (&self.spec, e) {
            (GroupSpec::Finite { moduli }, Element::Coords(c)) => {
                c.len() == moduli.len()
                    && c.iter()
                        .zip(moduli)
                        .all(|(&x, &m)| x >= 0 && (x as u64) < m)
            }
            (GroupSpec::Zd { dimension }, Element::Coords(c)) => c.len() == *dimension,
            (GroupSpec::Qz, Element::Fraction { num, den }) => {
                *num < *den && num.gcd(den) == 1
            }
            _ => false,
        }
    }

    /// Reduces an element into canonical form, or reports a kind mismatch.
    pub fn canonicalize(&self, e: &Element) -> Result<Element, Error> {
        match (&self.spec, e) {
            (GroupSpec::Finite { moduli }, Element::Coords(c)) => {
                if c.len() != moduli.len() {
                    return Err(Error::GroupMismatch(format!(
                        "expected {} coordinates, got {}",
                        moduli.len(),
                        c.len()
                    )));
                }
                Ok(Element::Coords(
                    c.iter()
                        .zip(moduli)
                        .map(|(&x, &m)| x.rem_euclid(m as i64))
                        .collect(),
                ))
            }
            (GroupSpec::Zd { dimension }, Element::Coords(c)) => {
                if c.len() != *dimension {
                    return Err(Error::GroupMismatch(format!(
                        "expected {} coordinates, got {}",
                        dimension,
                        c.len()
                    )));
                }
                Ok(e.clone())
            }
            (GroupSpec::Qz, Element::Fraction { num, den }) => Element::fraction(*num, *den),
            _ => Err(Error::GroupMismatch(format!(
                "element {:?} does not belong to {:?}",
                e, self.spec
            ))),
        }
    }

    fn require_canonical(&self, e: &Element) -> Result<(), Error> {
        if self.is_canonical(e) {
            Ok(())
        } else {
            Err(Error::NotCanonical(format!("{:?}", e)))
        }
    }

    /// Canonical sum of two canonical elements.
    pub fn add(&self, a: &Element, b: &Element) -> Result<Element, Error> {
        self.require_canonical(a)?;
        self.require_canonical(b)?;
        match (&self.spec, a, b) {
            (GroupSpec::Finite { moduli }, Element::Coords(x), Element::Coords(y)) => {
                Ok(Element::Coords(
                    x.iter()
                        .zip(y)
                        .zip(moduli)
                        .map(|((&u, &v), &m)| (u + v).rem_euclid(m as i64))
                        .collect(),
                ))
            }
            (GroupSpec::Zd { .. }, Element::Coords(x), Element::Coords(y)) => Ok(
                Element::Coords(x.iter().zip(y).map(|(&u, &v)| u + v).collect()),
            ),
            (
                GroupSpec::Qz,
                Element::Fraction { num: p, den: q },
                Element::Fraction { num: p2, den: q2 },
            ) => {
                // p/q + p2/q2 mod 1, with u128 intermediates before reduction.
                let num = *p as u128 * *q2 as u128 + *p2 as u128 * *q as u128;
                let den = *q as u128 * *q2 as u128;
                let num = num % den;
                let g = num.gcd(&den);
                Ok(Element::Fraction {
                    num: (num / g) as u64,
                    den: (den / g) as u64,
                })
            }
            _ => unreachable!("canonical elements match the group kind"),
        }
    }

    /// Canonical additive inverse.
    pub fn neg(&self, a: &Element) -> Result<Element, Error> {
        self.require_canonical(a)?;
        match (&self.spec, a) {
            (GroupSpec::Finite { moduli }, Element::Coords(x)) => Ok(Element::Coords(
                x.iter()
                    .zip(moduli)
                    .map(|(&u, &m)| (-u).rem_euclid(m as i64))
                    .collect(),
            )),
            (GroupSpec::Zd { .. }, Element::Coords(x)) => {
                Ok(Element::Coords(x.iter().map(|&u| -u).collect()))
            }
            (GroupSpec::Qz, Element::Fraction { num: p, den: q }) => {
                if *p == 0 {
                    Ok(Element::Fraction { num: 0, den: 1 })
                } else {
                    // q-p and q stay coprime, so the result is already reduced.
                    Ok(Element::Fraction {
                        num: q - p,
                        den: *q,
                    })
                }
            }
            _ => unreachable!("canonical elements match the group kind"),
        }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element, Error> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// All elements of a finite group in canonical (lexicographic) order.
    pub fn elements(&self) -> Result<Vec<Element>, Error> {
        let GroupSpec::Finite { moduli } = &self.spec else {
            return Err(Error::Unsupported(
                "enumeration requires a finite group".into(),
            ));
        };
        let order: u64 = moduli.iter().product();
        let mut out = Vec::with_capacity(order as usize);
        let mut current = vec![0i64; moduli.len()];
        loop {
            out.push(Element::Coords(current.clone()));
            // Mixed-radix increment with the last coordinate fastest,
            // which matches lexicographic order.
            let mut i = moduli.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                current[i] += 1;
                if (current[i] as u64) < moduli[i] {
                    break;
                }
                current[i] = 0;
            }
        }
    }

    /// Index of a canonical element in the [`Group::elements`] order.
    pub fn element_index(&self, e: &Element) -> Result<usize, Error> {
        let GroupSpec::Finite { moduli } = &self.spec else {
            return Err(Error::Unsupported("indexing requires a finite group".into()));
        };
        self.require_canonical(e)?;
        let Element::Coords(c) = e else { unreachable!() };
        let mut idx: u64 = 0;
        for (x, m) in c.iter().zip(moduli) {
            idx = idx * m + *x as u64;
        }
        Ok(idx as usize)
    }
}

/// The subgroup of Q/Z consisting of all reduced fractions with denominator
/// at most `n`, sorted by value. Its cardinality is the totient summatory
/// function at `n`.
pub fn farey_subgroup(n: u64) -> Result<Vec<Element>, Error> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "farey subgroup needs n >= 1".into(),
        ));
    }
    let mut out = vec![Element::Fraction { num: 0, den: 1 }];
    for q in 2..=n {
        for p in 1..q {
            if p.gcd(&q) == 1 {
                out.push(Element::Fraction { num: p, den: q });
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Group {
        Group::new(GroupSpec::Finite { moduli: vec![n] }).unwrap()
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(Group::new(GroupSpec::Finite { moduli: vec![6, 0] }).is_err());
        assert!(Group::new(GroupSpec::Finite { moduli: vec![] }).is_err());
        assert!(Group::new(GroupSpec::Zd { dimension: 0 }).is_err());
    }

    #[test]
    fn cyclic_addition_wraps() {
        let g = z(6);
        let s = g
            .add(&Element::coords([4]), &Element::coords([5]))
            .unwrap();
        assert_eq!(s, Element::coords([3]));
        let n = g.neg(&Element::coords([4])).unwrap();
        assert_eq!(g.add(&Element::coords([4]), &n).unwrap(), g.zero());
    }

    #[test]
    fn lattice_addition_is_componentwise() {
        let g = Group::new(GroupSpec::Zd { dimension: 2 }).unwrap();
        let s = g
            .add(&Element::coords([1, 2]), &Element::coords([3, -4]))
            .unwrap();
        assert_eq!(s, Element::coords([4, -2]));
    }

    #[test]
    fn torus_addition_reduces_mod_one() {
        let g = Group::new(GroupSpec::Qz).unwrap();
        let half = Element::fraction(1, 2).unwrap();
        let two_thirds = Element::fraction(2, 3).unwrap();
        let s = g.add(&half, &two_thirds).unwrap();
        assert_eq!(s, Element::fraction(1, 6).unwrap());
        let n = g.neg(&two_thirds).unwrap();
        assert_eq!(n, Element::fraction(1, 3).unwrap());
    }

    #[test]
    fn add_rejects_non_canonical_and_mismatched() {
        let g = z(6);
        assert!(g.add(&Element::coords([7]), &g.zero()).is_err());
        assert!(g
            .add(&Element::fraction(1, 2).unwrap(), &g.zero())
            .is_err());
        assert!(g.add(&Element::coords([1, 2]), &g.zero()).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let g = Group::new(GroupSpec::Finite {
            moduli: vec![2, 3],
        })
        .unwrap();
        let elems = g.elements().unwrap();
        assert_eq!(elems.len(), 6);
        assert_eq!(elems[0], Element::coords([0, 0]));
        assert_eq!(elems[1], Element::coords([0, 1]));
        assert_eq!(elems[3], Element::coords([1, 0]));
        let mut sorted = elems.clone();
        sorted.sort();
        assert_eq!(elems, sorted);
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(g.element_index(e).unwrap(), i);
        }
    }

    #[test]
    fn farey_small_cases() {
        assert_eq!(
            farey_subgroup(1).unwrap(),
            vec![Element::fraction(0, 1).unwrap()]
        );
        let f3 = farey_subgroup(3).unwrap();
        assert_eq!(
            f3,
            vec![
                Element::fraction(0, 1).unwrap(),
                Element::fraction(1, 3).unwrap(),
                Element::fraction(1, 2).unwrap(),
                Element::fraction(2, 3).unwrap(),
            ]
        );
        // phi(1)+phi(2)+phi(3)+phi(4) = 1+1+2+2
        assert_eq!(farey_subgroup(4).unwrap().len(), 6);
        assert!(farey_subgroup(0).is_err());
    }

    #[test]
    fn fraction_order_is_by_value() {
        let a = Element::fraction(1, 3).unwrap();
        let b = Element::fraction(1, 2).unwrap();
        assert!(a < b);
    }

    #[test]
    fn group_spec_json_shapes() {
        let f: GroupSpec = serde_json::from_str(r#"{"kind":"finite","moduli":[2,3]}"#).unwrap();
        assert_eq!(f, GroupSpec::Finite { moduli: vec![2, 3] });
        let zd: GroupSpec = serde_json::from_str(r#"{"kind":"zd","dimension":2}"#).unwrap();
        assert_eq!(zd, GroupSpec::Zd { dimension: 2 });
        let qz: GroupSpec = serde_json::from_str(r#"{"kind":"qz"}"#).unwrap();
        assert_eq!(qz, GroupSpec::Qz);
        assert_eq!(
            serde_json::to_string(&qz).unwrap(),
            r#"{"kind":"qz"}"#
        );
    }
}
