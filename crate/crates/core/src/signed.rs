//! Finite signed sets: a plus part and a disjoint minus part.

use crate::elem::Elem;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

pub const DEFAULT_BUDGET: usize = 1_000_000;
pub const BUDGET_ENV: &str = "SIJ_BUDGET";

static BUDGET: AtomicUsize = AtomicUsize::new(0);
static ENV_BUDGET: OnceLock<usize> = OnceLock::new();

/// Maximum support size any constructed signed set may have.
pub fn budget() -> usize {
    match BUDGET.load(Ordering::Relaxed) {
        0 => *ENV_BUDGET.get_or_init(|| {
            std::env::var(BUDGET_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
                .filter(|&b| b >= 1)
                .unwrap_or(DEFAULT_BUDGET)
        }),
        b => b,
    }
}

pub fn set_budget(b: usize) {
    BUDGET.store(b.max(1), Ordering::Relaxed);
}

pub(crate) fn check_budget(what: &str, needed: usize) -> Result<()> {
    let b = budget();
    if needed > b {
        Err(Error::Budget {
            what: what.to_string(),
            needed,
            budget: b,
        })
    } else {
        Ok(())
    }
}

/// +1 or −1.
pub type Sign = i8;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SignedSet {
    elems: BTreeMap<Elem, Sign>,
}

impl SignedSet {
    pub fn empty() -> SignedSet {
        SignedSet::default()
    }

    /// ({Unit}, ∅), the empty product.
    pub fn unit() -> SignedSet {
        SignedSet::from_signed([(Elem::Unit, 1)]).unwrap()
    }

    pub fn singleton(e: Elem, sign: Sign) -> SignedSet {
        SignedSet::from_signed([(e, sign)]).unwrap()
    }

    /// Builds a set from (element, sign) pairs; an element listed twice is an error.
    pub fn from_signed(items: impl IntoIterator<Item = (Elem, Sign)>) -> Result<SignedSet> {
        let mut elems = BTreeMap::new();
        for (e, s) in items {
            if s != 1 && s != -1 {
                return Err(Error::Invariant(format!("sign {s} is not ±1")));
            }
            if let Some(prev) = elems.insert(e.clone(), s) {
                return Err(Error::Invariant(format!(
                    "element {e} occurs twice (signs {prev} and {s})"
                )));
            }
        }
        check_budget("signed set", elems.len())?;
        Ok(SignedSet { elems })
    }

    pub fn from_parts(
        plus: impl IntoIterator<Item = Elem>,
        minus: impl IntoIterator<Item = Elem>,
    ) -> Result<SignedSet> {
        SignedSet::from_signed(
            plus.into_iter()
                .map(|e| (e, 1))
                .chain(minus.into_iter().map(|e| (e, -1))),
        )
    }

    pub fn sign(&self, e: &Elem) -> Option<Sign> {
        self.elems.get(e).copied()
    }
    pub fn contains(&self, e: &Elem) -> bool {
        self.elems.contains_key(e)
    }
    /// Support size |S⁺|+|S⁻|.
    pub fn len(&self) -> usize {
        self.elems.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
    /// #S = |S⁺| − |S⁻|.
    pub fn size(&self) -> i64 {
        self.elems.values().map(|&s| s as i64).sum()
    }
    pub fn iter(&self) -> impl Iterator<Item = (&Elem, Sign)> {
        self.elems.iter().map(|(e, &s)| (e, s))
    }
    pub fn plus(&self) -> impl Iterator<Item = &Elem> {
        self.iter().filter(|p| p.1 > 0).map(|p| p.0)
    }
    pub fn minus(&self) -> impl Iterator<Item = &Elem> {
        self.iter().filter(|p| p.1 < 0).map(|p| p.0)
    }
    pub fn support(&self) -> impl Iterator<Item = &Elem> {
        self.elems.keys()
    }

    pub fn opposite(&self) -> SignedSet {
        SignedSet {
            elems: self.elems.iter().map(|(e, &s)| (e.clone(), -s)).collect(),
        }
    }

    /// Keeps the elements whose statistic equals `a`, with their signs.
    pub fn restrict<V: PartialEq>(&self, eta: impl Fn(&Elem) -> V, a: &V) -> SignedSet {
        SignedSet {
            elems: self
                .elems
                .iter()
                .filter(|(e, _)| eta(e) == *a)
                .map(|(e, &s)| (e.clone(), s))
                .collect(),
        }
    }

    pub fn map_elems(&self, f: impl Fn(&Elem) -> Elem) -> Result<SignedSet> {
        SignedSet::from_signed(self.iter().map(|(e, s)| (f(e), s)))
    }
}

/// The signed interval [a,b).
pub fn interval(a: i64, b: i64) -> Result<SignedSet> {
    check_budget("interval", a.abs_diff(b) as usize)?;
    let elems = if a <= b {
        (a..b).map(|v| (Elem::Atom(v), 1)).collect()
    } else {
        (b..a).map(|v| (Elem::Atom(v), -1)).collect()
    };
    Ok(SignedSet { elems })
}

/// Parts are tagged by position: element s of part i becomes Tagged(i, s).
pub fn disjoint_union(parts: &[&SignedSet]) -> Result<SignedSet> {
    check_budget("disjoint union", parts.iter().map(|p| p.len()).sum())?;
    let mut elems = BTreeMap::new();
    for (i, p) in parts.iter().enumerate() {
        for (e, s) in p.iter() {
            elems.insert(Elem::tag(i as u32, e.clone()), s);
        }
    }
    Ok(SignedSet { elems })
}

/// Flat n-ary product with Tuple elements; the empty product is ({Unit}, ∅).
pub fn cartesian_product(parts: &[&SignedSet]) -> Result<SignedSet> {
    if parts.is_empty() {
        return Ok(SignedSet::unit());
    }
    let total = parts
        .iter()
        .try_fold(1usize, |acc, p| acc.checked_mul(p.len()))
        .unwrap_or(usize::MAX);
    check_budget("cartesian product", total)?;
    let mut acc: Vec<(Vec<Elem>, Sign)> = vec![(Vec::new(), 1)];
    for p in parts {
        let mut next = Vec::with_capacity(acc.len() * p.len());
        for (prefix, s) in &acc {
            for (e, t) in p.iter() {
                let mut v = prefix.clone();
                v.push(e.clone());
                next.push((v, s * t));
            }
        }
        acc = next;
    }
    Ok(SignedSet {
        elems: acc.into_iter().map(|(v, s)| (Elem::tup(v), s)).collect(),
    })
}

/// ⊔_{t∈T} S_t with elements Tuple[s, t] and sign sign(t)·sign(s).
pub fn indexed_union(
    index: &SignedSet,
    mut family: impl FnMut(&Elem) -> Result<SignedSet>,
) -> Result<SignedSet> {
    let mut elems = BTreeMap::new();
    for (t, st) in index.iter() {
        let fiber = family(t)?;
        check_budget("indexed union", elems.len() + fiber.len())?;
        for (s, ss) in fiber.iter() {
            elems.insert(Elem::pair(s.clone(), t.clone()), st * ss);
        }
    }
    Ok(SignedSet { elems })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atom(v: i64) -> Elem {
        Elem::Atom(v)
    }

    #[test]
    fn interval_cases() {
        let s = interval(2, 5).unwrap();
        assert_eq!(
            s.plus().cloned().collect::<Vec<_>>(),
            vec![atom(2), atom(3), atom(4)]
        );
        assert_eq!(s.size(), 3);
        assert!(interval(5, 5).unwrap().is_empty());
        let r = interval(5, 2).unwrap();
        assert_eq!(r.minus().count(), 3);
        assert_eq!(r.size(), -3);
        assert_eq!(r, s.opposite());
    }

    #[test]
    fn opposite_examples() {
        let s = SignedSet::singleton(atom(1), 1);
        assert_eq!(s.opposite().minus().count(), 1);
        assert_eq!(SignedSet::empty().opposite(), SignedSet::empty());
        assert_eq!(s.opposite().opposite(), s);
    }

    #[test]
    fn union_examples() {
        let a = SignedSet::singleton(atom(1), 1);
        let b = SignedSet::singleton(atom(2), -1);
        let u = disjoint_union(&[&a, &b]).unwrap();
        assert_eq!(u.sign(&Elem::tag(0, atom(1))), Some(1));
        assert_eq!(u.sign(&Elem::tag(1, atom(2))), Some(-1));
        assert!(disjoint_union(&[]).unwrap().is_empty());
        let v = disjoint_union(&[&interval(1, 3).unwrap(), &interval(3, 2).unwrap()]).unwrap();
        assert_eq!(v.size(), 1);
    }

    #[test]
    fn product_examples() {
        let s = SignedSet::from_parts([atom(0)], [atom(1)]).unwrap();
        let t = SignedSet::singleton(atom(2), 1);
        let p = cartesian_product(&[&s, &t]).unwrap();
        assert_eq!(p.sign(&Elem::atoms(&[0, 2])), Some(1));
        assert_eq!(p.sign(&Elem::atoms(&[1, 2])), Some(-1));
        assert!(cartesian_product(&[&s, &SignedSet::empty()])
            .unwrap()
            .is_empty());
        let r = interval(3, 1).unwrap();
        let q = cartesian_product(&[&r, &r]).unwrap();
        assert_eq!(q.size(), 4);
        assert_eq!(q.plus().count(), 4);
        assert_eq!(cartesian_product(&[]).unwrap(), SignedSet::unit());
    }

    #[test]
    fn indexed_union_examples() {
        let fam = |_: &Elem| SignedSet::from_parts([atom(10)], [atom(11)]);
        let plus_idx = SignedSet::singleton(atom(0), 1);
        let u = indexed_union(&plus_idx, fam).unwrap();
        assert_eq!(u.sign(&Elem::pair(atom(10), atom(0))), Some(1));
        let minus_idx = SignedSet::singleton(atom(0), -1);
        let u = indexed_union(&minus_idx, fam).unwrap();
        assert_eq!(u.sign(&Elem::pair(atom(10), atom(0))), Some(-1));
        assert_eq!(u.sign(&Elem::pair(atom(11), atom(0))), Some(1));
    }

    #[test]
    fn restrict_examples() {
        let s = interval(0, 5).unwrap();
        let r = s.restrict(|e| e.atom() % 2, &0);
        assert_eq!(r.size(), 3);
        assert!(s.restrict(|e| e.atom(), &99).is_empty());
        assert_eq!(s.restrict(|_| 0, &0), s);
    }

    #[test]
    fn duplicate_elements_rejected() {
        assert!(SignedSet::from_parts([atom(1)], [atom(1)]).is_err());
    }

    fn arb_set() -> impl Strategy<Value = SignedSet> {
        prop::collection::btree_map(-6i64..6, prop::bool::ANY, 0..5).prop_map(|m| {
            SignedSet::from_signed(
                m.into_iter()
                    .map(|(v, p)| (Elem::Atom(v), if p { 1 } else { -1 })),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn interval_size(a in -20i64..20, b in -20i64..20) {
            prop_assert_eq!(interval(a, b).unwrap().size(), b - a);
            prop_assert_eq!(interval(b, a).unwrap(), interval(a, b).unwrap().opposite());
        }

        #[test]
        fn sizes_additive_multiplicative(s in arb_set(), t in arb_set()) {
            prop_assert_eq!(disjoint_union(&[&s, &t]).unwrap().size(), s.size() + t.size());
            prop_assert_eq!(cartesian_product(&[&s, &t]).unwrap().size(), s.size() * t.size());
        }

        #[test]
        fn indexed_union_plus_singleton_is_union(s in arb_set(), t in arb_set()) {
            let parts = [&s, &t];
            let idx = SignedSet::from_parts((0..2).map(Elem::Atom), []).unwrap();
            let iu = indexed_union(&idx, |i| Ok(parts[i.atom() as usize].clone())).unwrap();
            let du = disjoint_union(&parts).unwrap();
            let relabeled = iu.map_elems(|e| Elem::tag(e.get(1).atom() as u32, e.get(0).clone())).unwrap();
            prop_assert_eq!(relabeled, du);
        }
    }
}
