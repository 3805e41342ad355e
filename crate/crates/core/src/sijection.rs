//! Sijections as evaluable combinator trees, plus the verifier and graph export.

use crate::elem::Elem;
use crate::error::{iface, Error, Result};
use crate::signed::{cartesian_product, disjoint_union, indexed_union, interval, SignedSet};
use rayon::prelude::*;
use rustc_hash::FxHashMap as HashMap;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Dom,
    Cod,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Dom => Side::Cod,
            Side::Cod => Side::Dom,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Side::Dom => "domain",
            Side::Cod => "codomain",
        }
    }
}

pub type Sided = (Side, Elem);
pub type Sij = Arc<Sijection>;

enum Rule {
    Identity,
    Table(HashMap<Sided, Sided>),
    Inverse(Sij),
    Opposite(Sij),
    Compose(Sij, Sij),
    Product(Vec<Sij>),
    Union(Vec<Sij>),
    Indexed { psi: Sij, fam: HashMap<Sided, Sij> },
    Cancel(Sij),
}

pub struct Sijection {
    dom: Arc<SignedSet>,
    cod: Arc<SignedSet>,
    rule: Rule,
}

impl std::fmt::Debug for Sijection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Sijection(|dom|={}, |cod|={})",
            self.dom.len(),
            self.cod.len()
        )
    }
}

impl Sijection {
    pub fn dom(&self) -> &Arc<SignedSet> {
        &self.dom
    }
    pub fn cod(&self) -> &Arc<SignedSet> {
        &self.cod
    }
    pub fn set(&self, side: Side) -> &Arc<SignedSet> {
        match side {
            Side::Dom => &self.dom,
            Side::Cod => &self.cod,
        }
    }

    /// True for S⁺ ⊔ T⁻, the class that is mapped onto S⁻ ⊔ T⁺.
    pub fn in_p_class(&self, side: Side, e: &Elem) -> bool {
        let s = self.set(side).sign(e).unwrap_or(0);
        match side {
            Side::Dom => s > 0,
            Side::Cod => s < 0,
        }
    }

    /// Evaluates on a support element, checking membership first.
    pub fn apply(&self, side: Side, e: &Elem) -> Result<Sided> {
        if !self.set(side).contains(e) {
            return iface(format!("{e} is not in the {} support", side.name()));
        }
        self.eval(side, e)
    }

    fn eval(&self, side: Side, e: &Elem) -> Result<Sided> {
        match &self.rule {
            Rule::Identity => Ok((side.flip(), e.clone())),
            Rule::Table(m) => m
                .get(&(side, e.clone()))
                .cloned()
                .ok_or_else(|| Error::Invariant(format!("table has no image for {e}"))),
            Rule::Inverse(f) => f.eval(side.flip(), e).map(|(s, x)| (s.flip(), x)),
            Rule::Opposite(f) => f.eval(side, e),
            Rule::Compose(f, g) => self.eval_compose(f, g, side, e),
            Rule::Product(parts) => eval_product(parts, side, e),
            Rule::Union(parts) => {
                let (i, x) = e.tagged();
                let part = parts
                    .get(i as usize)
                    .ok_or_else(|| Error::Interface(format!("tag {i} out of range")))?;
                let (s, y) = part.eval(side, x)?;
                Ok((s, Elem::tag(i, y)))
            }
            Rule::Indexed { psi, fam } => {
                let (s, t) = (e.get(0), e.get(1));
                let (y, u) = psi.eval(side, t)?;
                if psi.in_p_class(side, t) {
                    let phi = fam
                        .get(&(side, t.clone()))
                        .ok_or_else(|| Error::Interface(format!("missing family member at {t}")))?;
                    let (r, s2) = phi.eval(Side::Dom, s)?;
                    Ok(match r {
                        Side::Dom => (side, Elem::pair(s2, t.clone())),
                        Side::Cod => (y, Elem::pair(s2, u)),
                    })
                } else {
                    let phi = fam
                        .get(&(y, u.clone()))
                        .ok_or_else(|| Error::Interface(format!("missing family member at {u}")))?;
                    let (r, s2) = phi.eval(Side::Cod, s)?;
                    Ok(match r {
                        Side::Cod => (side, Elem::pair(s2, t.clone())),
                        Side::Dom => (y, Elem::pair(s2, u)),
                    })
                }
            }
            Rule::Cancel(f) => {
                let (i, x) = e.tagged();
                let inner = if i == 0 { Side::Dom } else { Side::Cod };
                let (s, y) = f.eval(inner, x)?;
                Ok((Side::Dom, Elem::tag((s == Side::Cod) as u32, y)))
            }
        }
    }

    fn eval_compose(&self, f: &Sij, g: &Sij, side: Side, e: &Elem) -> Result<Sided> {
        // State: which map to apply next, and from which of its sides.
        let cap = f.dom.len() + f.cod.len() + g.cod.len() + 2;
        let (mut use_f, mut from, mut cur) = match side {
            Side::Dom => (true, Side::Dom, e.clone()),
            Side::Cod => (false, Side::Cod, e.clone()),
        };
        for _ in 0..cap {
            let (s, x) = if use_f {
                f.eval(from, &cur)?
            } else {
                g.eval(from, &cur)?
            };
            match (use_f, s) {
                (true, Side::Dom) => return Ok((Side::Dom, x)),
                (false, Side::Cod) => return Ok((Side::Cod, x)),
                (true, Side::Cod) => {
                    use_f = false;
                    from = Side::Dom;
                }
                (false, Side::Dom) => {
                    use_f = true;
                    from = Side::Cod;
                }
            }
            cur = x;
        }
        Err(Error::Invariant(format!(
            "composition did not terminate within {cap} steps from {e}"
        )))
    }
}

fn eval_product(parts: &[Sij], side: Side, e: &Elem) -> Result<Sided> {
    if parts.is_empty() {
        return Ok((side.flip(), e.clone()));
    }
    let coords = e.items();
    let mut images = Vec::with_capacity(parts.len());
    for (i, (p, c)) in parts.iter().zip(coords).enumerate() {
        let (s, y) = p.eval(side, c)?;
        if s == side {
            let mut v = coords.to_vec();
            v[i] = y;
            return Ok((side, Elem::tup(v)));
        }
        images.push(y);
    }
    Ok((side.flip(), Elem::tup(images)))
}

fn mk(dom: Arc<SignedSet>, cod: Arc<SignedSet>, rule: Rule) -> Sij {
    Arc::new(Sijection { dom, cod, rule })
}

pub fn identity(s: Arc<SignedSet>) -> Sij {
    mk(s.clone(), s, Rule::Identity)
}

/// Builds a sijection from explicit pairs; each pair is stored in both directions.
pub fn from_pairs(
    dom: Arc<SignedSet>,
    cod: Arc<SignedSet>,
    pairs: impl IntoIterator<Item = (Sided, Sided)>,
) -> Result<Sij> {
    let mut m = HashMap::default();
    for (a, b) in pairs {
        if m.insert(a.clone(), b.clone()).is_some() || m.insert(b.clone(), a.clone()).is_some() {
            return Err(Error::Invariant(format!(
                "element paired twice: {} / {}",
                a.1, b.1
            )));
        }
    }
    let expected = dom.len() + cod.len();
    if m.len() != expected {
        return iface(format!(
            "pairing covers {} of {} support elements",
            m.len(),
            expected
        ));
    }
    Ok(mk(dom, cod, Rule::Table(m)))
}

/// The bijective relabeling s ↦ f(s); the codomain is the signed image.
pub fn relabel(dom: Arc<SignedSet>, f: impl Fn(&Elem) -> Elem) -> Result<Sij> {
    let mut m = HashMap::with_capacity_and_hasher(2 * dom.len(), Default::default());
    let mut img = Vec::with_capacity(dom.len());
    for (e, s) in dom.iter() {
        let y = f(e);
        img.push((y.clone(), s));
        m.insert((Side::Dom, e.clone()), (Side::Cod, y.clone()));
        m.insert((Side::Cod, y), (Side::Dom, e.clone()));
    }
    let cod = Arc::new(SignedSet::from_signed(img)?);
    Ok(mk(dom, cod, Rule::Table(m)))
}

pub fn inverse(f: &Sij) -> Sij {
    mk(f.cod.clone(), f.dom.clone(), Rule::Inverse(f.clone()))
}

/// −S ⇄ −T with the same underlying involution.
pub fn opposite(f: &Sij) -> Sij {
    mk(
        Arc::new(f.dom.opposite()),
        Arc::new(f.cod.opposite()),
        Rule::Opposite(f.clone()),
    )
}

/// ψ∘φ for φ: S⇄T and ψ: T⇄U.
pub fn compose(f: &Sij, g: &Sij) -> Result<Sij> {
    if !Arc::ptr_eq(&f.cod, &g.dom) && *f.cod != *g.dom {
        let a: Vec<_> = f
            .cod
            .iter()
            .filter(|(e, s)| g.dom.sign(e) != Some(*s))
            .take(1)
            .collect();
        let b: Vec<_> = g
            .dom
            .iter()
            .filter(|(e, s)| f.cod.sign(e) != Some(*s))
            .take(1)
            .collect();
        return iface(format!(
            "composition middle sets differ (sizes {} vs {}); first mismatch {:?} / {:?}",
            f.cod.len(),
            g.dom.len(),
            a.first().map(|p| p.0.to_string()),
            b.first().map(|p| p.0.to_string())
        ));
    }
    Ok(mk(
        f.dom.clone(),
        g.cod.clone(),
        Rule::Compose(f.clone(), g.clone()),
    ))
}

/// Left-to-right composition of a chain.
pub fn compose_all(chain: &[Sij]) -> Result<Sij> {
    let mut it = chain.iter();
    let mut acc = it
        .next()
        .ok_or_else(|| Error::Interface("empty composition chain".into()))?
        .clone();
    for g in it {
        acc = compose(&acc, g)?;
    }
    Ok(acc)
}

/// Flat n-ary product; the first coordinate whose image stays on its side wins.
pub fn product(parts: &[Sij]) -> Result<Sij> {
    let doms: Vec<&SignedSet> = parts.iter().map(|p| &*p.dom).collect();
    let cods: Vec<&SignedSet> = parts.iter().map(|p| &*p.cod).collect();
    Ok(mk(
        Arc::new(cartesian_product(&doms)?),
        Arc::new(cartesian_product(&cods)?),
        Rule::Product(parts.to_vec()),
    ))
}

pub fn union(parts: &[Sij]) -> Result<Sij> {
    let doms: Vec<&SignedSet> = parts.iter().map(|p| &*p.dom).collect();
    let cods: Vec<&SignedSet> = parts.iter().map(|p| &*p.cod).collect();
    Ok(mk(
        Arc::new(disjoint_union(&doms)?),
        Arc::new(disjoint_union(&cods)?),
        Rule::Union(parts.to_vec()),
    ))
}

/// Disjoint union with signed index along ψ: T ⇄ T̃.  `fam` is called once
/// for each element (side, t) of the class S⁺⊔T̃⁻ of ψ and must return a
/// sijection from the fiber over t to the fiber over ψ(t).
pub fn indexed_union_sij(
    psi: &Sij,
    mut fam: impl FnMut(Side, &Elem) -> Result<Sij>,
) -> Result<Sij> {
    let mut map: HashMap<Sided, Sij> = HashMap::default();
    let mut fibers: HashMap<Sided, Arc<SignedSet>> = HashMap::default();
    for side in [Side::Dom, Side::Cod] {
        for (t, _) in psi.set(side).iter() {
            if !psi.in_p_class(side, t) {
                continue;
            }
            let phi = fam(side, t)?;
            let (y, u) = psi.eval(side, t)?;
            fibers.insert((side, t.clone()), phi.dom.clone());
            fibers.insert((y, u), phi.cod.clone());
            map.insert((side, t.clone()), phi);
        }
    }
    let fiber_set = |side: Side| {
        indexed_union(psi.set(side), |t| {
            fibers
                .get(&(side, t.clone()))
                .map(|f| (**f).clone())
                .ok_or_else(|| Error::Interface(format!("no fiber over {t}")))
        })
    };
    let dom = Arc::new(fiber_set(Side::Dom)?);
    let cod = Arc::new(fiber_set(Side::Cod)?);
    Ok(mk(
        dom,
        cod,
        Rule::Indexed {
            psi: psi.clone(),
            fam: map,
        },
    ))
}

/// ⊔_{t∈I} F(t) ⇄ ⊔_{t∈I} G(t), applying f(t) in each fiber.
pub fn fiberwise(index: Arc<SignedSet>, mut f: impl FnMut(&Elem) -> Result<Sij>) -> Result<Sij> {
    let id = identity(index);
    indexed_union_sij(&id, |side, t| match side {
        Side::Dom => f(t),
        Side::Cod => Ok(inverse(&f(t)?)),
    })
}

/// S ⊔ −T ⇄ (∅,∅) induced by φ: S ⇄ T.
pub fn cancel_opposite(f: &Sij) -> Result<Sij> {
    let neg = f.cod.opposite();
    Ok(mk(
        Arc::new(disjoint_union(&[&f.dom, &neg])?),
        Arc::new(SignedSet::empty()),
        Rule::Cancel(f.clone()),
    ))
}

/// [a,b) ⇄ [a,c) ⊔ [c,b), matching equal integers.  Every integer occurs in
/// the two supports either not at all or exactly twice with opposite class,
/// so the value-preserving matching is unique.
pub fn interval_split(a: i64, b: i64, c: i64) -> Result<Sij> {
    let dom = Arc::new(interval(a, b)?);
    let left = interval(a, c)?;
    let right = interval(c, b)?;
    let cod = Arc::new(disjoint_union(&[&left, &right])?);
    let mut occ: HashMap<i64, Vec<Sided>> = HashMap::default();
    for e in dom.support() {
        occ.entry(e.atom())
            .or_default()
            .push((Side::Dom, e.clone()));
    }
    for e in cod.support() {
        occ.entry(e.tagged().1.atom())
            .or_default()
            .push((Side::Cod, e.clone()));
    }
    let mut pairs = Vec::new();
    for (v, list) in occ {
        if list.len() != 2 {
            return Err(Error::Invariant(format!(
                "value {v} occurs {} times in interval split",
                list.len()
            )));
        }
        pairs.push((list[0].clone(), list[1].clone()));
    }
    from_pairs(dom, cod, pairs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    pub witness: Option<String>,
}

impl VerifyReport {
    pub fn valid(&self) -> bool {
        self.witness.is_none()
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.witness {
            None => write!(f, "valid ({} elements)", self.checked),
            Some(w) => write!(f, "invalid: {w}"),
        }
    }
}

/// All support elements of both sides, domain first, in canonical order.
pub fn all_elements(f: &Sijection) -> Vec<Sided> {
    f.dom
        .support()
        .map(|e| (Side::Dom, e.clone()))
        .chain(f.cod.support().map(|e| (Side::Cod, e.clone())))
        .collect()
}

fn check_element(f: &Sijection, side: Side, e: &Elem) -> Option<String> {
    let (s, y) = match f.eval(side, e) {
        Ok(r) => r,
        Err(err) => return Some(format!("{} {e}: evaluation failed: {err}", side.name())),
    };
    if !f.set(s).contains(&y) {
        return Some(format!(
            "{} {e} maps to {y}, which is not in the {} support",
            side.name(),
            s.name()
        ));
    }
    if f.in_p_class(side, e) == f.in_p_class(s, &y) {
        return Some(format!(
            "{} {e} maps to {} {y} of the same sign class",
            side.name(),
            s.name()
        ));
    }
    match f.eval(s, &y) {
        Ok((s2, e2)) if s2 == side && e2 == *e => None,
        Ok((s2, e2)) => Some(format!(
            "not an involution: {} {e} -> {} {y} -> {} {e2}",
            side.name(),
            s.name(),
            s2.name()
        )),
        Err(err) => Some(format!("{} {y}: evaluation failed: {err}", s.name())),
    }
}

/// Checks totality, the involution law and the sign-class condition on every
/// support element.
/// Smallest work unit handed to the thread pool.
pub(crate) const PAR_CHUNK: usize = 2048;

pub fn verify(f: &Sijection) -> VerifyReport {
    let elems = all_elements(f);
    let witness = elems
        .par_iter()
        .with_min_len(PAR_CHUNK)
        .filter_map(|(side, e)| check_element(f, *side, e))
        .find_first(|_| true);
    VerifyReport {
        checked: elems.len(),
        witness,
    }
}

/// The graph edges {v, φ(v)} for v in S⁺ ⊔ T⁻.
pub fn edges(f: &Sijection) -> Result<Vec<(Sided, Sided)>> {
    let mut out = Vec::new();
    for (side, e) in all_elements(f) {
        if f.in_p_class(side, &e) {
            let img = f.eval(side, &e)?;
            out.push(((side, e), img));
        }
    }
    Ok(out)
}

/// Explicit (element, image) pairs over both supports.
pub fn materialize(f: &Sijection) -> Result<Vec<(Sided, Sided)>> {
    all_elements(f)
        .into_par_iter()
        .with_min_len(PAR_CHUNK)
        .map(|(s, e)| f.eval(s, &e).map(|img| ((s, e), img)))
        .collect()
}

/// Test hook: re-pairs the edges of `f` by rotating partners among edges
/// with the same side pattern.  The result is still a sijection between the
/// same sets but generally breaks compatibility.
pub fn scramble(f: &Sijection) -> Result<Sij> {
    let mut groups: BTreeMap<(Side, Side), Vec<(Sided, Sided)>> = BTreeMap::new();
    for (a, b) in edges(f)? {
        groups.entry((a.0, b.0)).or_default().push((a, b));
    }
    let mut pairs = Vec::new();
    for list in groups.into_values() {
        let m = list.len();
        for (j, (a, _)) in list.iter().enumerate() {
            pairs.push((a.clone(), list[(j + 1) % m].1.clone()));
        }
    }
    from_pairs(f.dom.clone(), f.cod.clone(), pairs)
}

/// Same sets and the same image everywhere.
pub fn pointwise_eq(f: &Sijection, g: &Sijection) -> Result<Option<String>> {
    if *f.dom != *g.dom || *f.cod != *g.cod {
        return Ok(Some("domains or codomains differ".into()));
    }
    for (s, e) in all_elements(f) {
        let a = f.eval(s, &e)?;
        let b = g.eval(s, &e)?;
        if a != b {
            return Ok(Some(format!(
                "{} {e}: {} {} vs {} {}",
                s.name(),
                a.0.name(),
                a.1,
                b.0.name(),
                b.1
            )));
        }
    }
    Ok(None)
}

/// DOT rendering: one cluster per side, plus elements as circles and minus
/// elements as boxes.
pub fn to_dot(f: &Sijection) -> Result<String> {
    let mut ids: HashMap<Sided, String> = HashMap::default();
    let mut out = String::from("graph sijection {\n");
    for (side, prefix) in [(Side::Dom, "d"), (Side::Cod, "c")] {
        let _ = writeln!(
            out,
            "  subgraph cluster_{} {{\n    label=\"{}\";",
            prefix,
            side.name()
        );
        for (i, (e, s)) in f.set(side).iter().enumerate() {
            let id = format!("{prefix}{i}");
            let shape = if s > 0 { "circle" } else { "box" };
            let sign = if s > 0 { '+' } else { '-' };
            let _ = writeln!(out, "    {id} [label=\"{sign} {e}\", shape={shape}];");
            ids.insert((side, e.clone()), id);
        }
        out.push_str("  }\n");
    }
    for (a, b) in edges(f)? {
        let _ = writeln!(out, "  {} -- {};", ids[&a], ids[&b]);
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elem::Elem;

    fn atom(v: i64) -> Elem {
        Elem::Atom(v)
    }

    fn set(plus: &[&str], minus: &[&str]) -> Arc<SignedSet> {
        Arc::new(
            SignedSet::from_parts(
                plus.iter().map(|s| Elem::parse(s).unwrap()),
                minus.iter().map(|s| Elem::parse(s).unwrap()),
            )
            .unwrap(),
        )
    }

    #[test]
    fn identity_examples() {
        let s = set(&["1"], &[]);
        let id = identity(s);
        assert_eq!(id.apply(Side::Dom, &atom(1)).unwrap(), (Side::Cod, atom(1)));
        assert!(verify(&identity(Arc::new(SignedSet::empty()))).valid());
    }

    #[test]
    fn split_figure() {
        // [1,3) ⊔ [3,2) ⇄ [1,2)
        let f = inverse(&interval_split(1, 2, 3).unwrap());
        assert!(verify(&f).valid());
        let two0 = Elem::tag(0, atom(2));
        let two1 = Elem::tag(1, atom(2));
        assert_eq!(f.apply(Side::Dom, &two0).unwrap(), (Side::Dom, two1));
        assert_eq!(
            f.apply(Side::Dom, &Elem::tag(0, atom(1))).unwrap(),
            (Side::Cod, atom(1))
        );
        assert_eq!(edges(&f).unwrap().len(), 2);
    }

    #[test]
    fn split_degenerate_is_tagging() {
        let f = interval_split(2, 5, 5).unwrap();
        for v in 2..5 {
            assert_eq!(
                f.apply(Side::Dom, &atom(v)).unwrap(),
                (Side::Cod, Elem::tag(0, atom(v)))
            );
        }
    }

    #[test]
    fn split_all_orders_valid() {
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    let f = interval_split(a, b, c).unwrap();
                    assert!(verify(&f).valid(), "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn compose_with_inverse_pairs_within_domain() {
        let f = inverse(&interval_split(1, 2, 3).unwrap());
        let g = compose(&f, &inverse(&f)).unwrap();
        assert!(verify(&g).valid());
        let two0 = Elem::tag(0, atom(2));
        assert_eq!(
            g.apply(Side::Dom, &two0).unwrap(),
            (Side::Dom, Elem::tag(1, atom(2)))
        );
        let one = Elem::tag(0, atom(1));
        assert_eq!(g.apply(Side::Dom, &one).unwrap(), (Side::Cod, one.clone()));
    }

    #[test]
    fn compose_identity() {
        let s = Arc::new(interval(0, 4).unwrap());
        let id = identity(s.clone());
        let g = compose(&id, &id).unwrap();
        assert_eq!(pointwise_eq(&g, &id).unwrap(), None);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = identity(Arc::new(interval(0, 2).unwrap()));
        let b = identity(Arc::new(interval(0, 3).unwrap()));
        assert!(matches!(compose(&a, &b), Err(Error::Interface(_))));
    }

    #[test]
    fn cancel_identity_pairs_copies() {
        let s = Arc::new(interval(0, 3).unwrap());
        let c = cancel_opposite(&identity(s)).unwrap();
        assert!(verify(&c).valid());
        assert_eq!(
            c.apply(Side::Dom, &Elem::tag(0, atom(1))).unwrap(),
            (Side::Dom, Elem::tag(1, atom(1)))
        );
        let e = cancel_opposite(&identity(Arc::new(SignedSet::empty()))).unwrap();
        assert!(e.dom().is_empty());
        let x = cancel_opposite(&inverse(&interval_split(1, 2, 3).unwrap())).unwrap();
        assert!(verify(&x).valid());
    }

    #[test]
    fn union_and_product_with_empty() {
        let s = Arc::new(interval(0, 2).unwrap());
        let u = union(&[identity(s.clone()), identity(s.clone())]).unwrap();
        assert_eq!(pointwise_eq(&u, &identity(u.dom().clone())).unwrap(), None);
        assert_eq!(edges(&u).unwrap().len(), 4);
        let p = product(&[identity(s), identity(Arc::new(SignedSet::empty()))]).unwrap();
        assert!(p.dom().is_empty() && p.cod().is_empty());
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let f = interval_split(0, 3, 3).unwrap();
        let mut pairs = materialize(&f).unwrap();
        // Swap the images of the first two domain elements.
        let (i0, i1) = (pairs[0].1.clone(), pairs[1].1.clone());
        pairs[0].1 = i1;
        pairs[1].1 = i0;
        let m: HashMap<Sided, Sided> = pairs.into_iter().collect();
        let bad = mk(f.dom().clone(), f.cod().clone(), Rule::Table(m));
        let r = verify(&bad);
        assert!(!r.valid());
        assert!(r.witness.unwrap().contains("involution"));
    }

    #[test]
    fn indexed_union_moves_fiber() {
        // Index T = ({p}, {q}) with ψ: T ⇄ ∅ pairing p with q; fibers are all {0}.
        let t = set(&["0"], &["1"]);
        let psi = from_pairs(
            t.clone(),
            Arc::new(SignedSet::empty()),
            [((Side::Dom, atom(0)), (Side::Dom, atom(1)))],
        )
        .unwrap();
        let fib = Arc::new(SignedSet::singleton(atom(7), 1));
        let f = indexed_union_sij(&psi, |_, _| Ok(identity(fib.clone()))).unwrap();
        assert!(verify(&f).valid());
        assert_eq!(
            f.apply(Side::Dom, &Elem::pair(atom(7), atom(0))).unwrap(),
            (Side::Dom, Elem::pair(atom(7), atom(1)))
        );
    }

    #[test]
    fn dot_export_has_edges() {
        let f = identity(set(&["1"], &["2"]));
        let dot = to_dot(&f).unwrap();
        assert_eq!(dot.matches(" -- ").count(), 2);
        assert!(dot.contains("shape=box"));
    }
}
