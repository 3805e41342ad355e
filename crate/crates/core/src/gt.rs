//! Gelfand-Tsetlin signed sets and the sijections β, ρ, π, σ, γ_row, τ.
//!
//! Element encoding: a pattern with bottom row of length 1 is `Atom(k1)`;
//! for length n ≥ 2 it is `Tuple[T', Tuple(l)]` with `l` the second bottom
//! row and `T'` a pattern over `l`.  The bottom row itself is not stored.

use crate::elem::Elem;
use crate::error::{iface, Error, Result};
use crate::memo::Memo;
use crate::signed::{cartesian_product, disjoint_union, indexed_union, interval, SignedSet};
use crate::sijection::{
    cancel_opposite, compose, compose_all, fiberwise, identity, indexed_union_sij, interval_split,
    inverse, opposite, product, relabel, union, Side, Sij,
};
use crate::statistics::{Shape, StatValue, Statistic};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// `Tuple(v)`, or `Unit` for the empty product.
pub fn tuple_or_unit(v: Vec<Elem>) -> Elem {
    if v.is_empty() {
        Elem::Unit
    } else {
        Elem::tup(v)
    }
}

/// ∏ [a_j, b_j) with elements Tuple(y).
pub fn box_set(a: &[i64], b: &[i64]) -> Result<SignedSet> {
    let parts = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| interval(x, y))
        .collect::<Result<Vec<_>>>()?;
    cartesian_product(&parts.iter().collect::<Vec<_>>())
}

fn adjacent_bounds(k: &[i64]) -> (Vec<i64>, Vec<i64>) {
    (k[..k.len() - 1].to_vec(), k[1..].to_vec())
}

static GT: Memo<Vec<i64>, Arc<SignedSet>> = Memo::new();

pub fn gt(k: &[i64]) -> Result<Arc<SignedSet>> {
    if k.is_empty() {
        return iface("GT needs a nonempty bottom row");
    }
    GT.get_or(k.to_vec(), || {
        if k.len() == 1 {
            return Ok(Arc::new(SignedSet::singleton(Elem::Atom(k[0]), 1)));
        }
        let (a, b) = adjacent_bounds(k);
        let idx = box_set(&a, &b)?;
        Ok(Arc::new(indexed_union(&idx, |l| {
            gt(&l.ints()).map(|s| (*s).clone())
        })?))
    })
}

/// Rows of a pattern, top first; `k` supplies the bottom row.
pub fn gt_rows(e: &Elem, k: &[i64]) -> Vec<Vec<i64>> {
    let mut rows = Vec::with_capacity(k.len());
    let mut cur = e;
    let mut bottoms = vec![k.to_vec()];
    while let Elem::Tuple(v) = cur {
        bottoms.push(v[1].ints());
        cur = &v[0];
    }
    rows.push(vec![cur.atom()]);
    bottoms.pop();
    while let Some(r) = bottoms.pop() {
        rows.push(r);
    }
    rows
}

/// Rows strictly above the bottom row of a pattern with bottom length n.
pub fn gt_upper_rows(e: &Elem, n: usize) -> Vec<Vec<i64>> {
    if n <= 1 {
        return vec![];
    }
    let mut rows = gt_rows(e, &vec![0; n]);
    rows.pop();
    rows
}

pub fn eta_row(e: &Elem, k: &[i64]) -> StatValue {
    StatValue::multiseq(gt_rows(e, k))
}

pub fn eta_top(e: &Elem, k: &[i64]) -> i64 {
    gt_rows(e, k)[0][0]
}

/// A pattern given as explicit rows, as an element of GT(bottom row).
pub fn gt_elem_from_rows(rows: &[Vec<i64>]) -> Elem {
    let mut e = Elem::Atom(rows[0][0]);
    for r in &rows[..rows.len() - 1] {
        e = Elem::pair(e, Elem::atoms(r));
    }
    e
}

pub fn gt_rows_statistic(k: Vec<i64>) -> Statistic {
    Statistic::uniform("eta_row", move |e| Ok(eta_row(e, &k)))
}

/// β_{a,b,x}: ∏[a_i,b_i) ⇄ ⊔_{m∈S_1×…×S_n} [m_1,m_2)×…×[m_n,x) with
/// S_i = ({a_i},{b_i}).  Codomain elements are Tuple[Tuple(y), Tuple(m)]
/// with m_i = Tagged(0, a_i) or Tagged(1, b_i).
pub fn beta(a: &[i64], b: &[i64], x: i64) -> Result<Sij> {
    if a.len() != b.len() || a.is_empty() {
        return iface("beta needs nonempty a, b of equal length");
    }
    static MEMO: Memo<(Vec<i64>, Vec<i64>, i64), Sij> = Memo::new();
    MEMO.get_or((a.to_vec(), b.to_vec(), x), || beta_build(a, b, x))
}

fn s_elem(j: u32, a: i64, b: i64) -> Elem {
    Elem::tag(j, Elem::Atom(if j == 0 { a } else { b }))
}

fn m_value(m: &Elem) -> i64 {
    m.tagged().1.atom()
}

/// S_1 × … × S_n.
pub fn s_index(a: &[i64], b: &[i64]) -> Result<SignedSet> {
    let parts = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            disjoint_union(&[
                &SignedSet::singleton(Elem::Atom(x), 1),
                &SignedSet::singleton(Elem::Atom(y), -1),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    cartesian_product(&parts.iter().collect::<Vec<_>>())
}

fn beta_build(a: &[i64], b: &[i64], x: i64) -> Result<Sij> {
    let n = a.len();
    let dom = Arc::new(box_set(a, b)?);
    let (a1, b1) = (a[0], b[0]);
    if n == 1 {
        let r1 = relabel(dom, |e| e.get(0).clone())?;
        let sp = interval_split(a1, b1, x)?;
        let r2 = relabel(sp.cod().clone(), |e| {
            let (j, y) = e.tagged();
            Elem::pair(
                Elem::tup(vec![y.clone()]),
                Elem::tup(vec![s_elem(j, a1, b1)]),
            )
        })?;
        return compose_all(&[r1, sp, r2]);
    }
    let r1 = relabel(dom, |e| {
        let v = e.items();
        Elem::pair(v[0].clone(), Elem::tup(v[1..].to_vec()))
    })?;
    let rest = beta(&a[1..], &b[1..], x)?;
    let prod = product(&[identity(Arc::new(interval(a1, b1)?)), rest])?;
    let r3 = relabel(prod.cod().clone(), |e| {
        let (y1, inner) = (e.get(0), e.get(1));
        Elem::pair(
            Elem::pair(y1.clone(), inner.get(0).clone()),
            inner.get(1).clone(),
        )
    })?;
    let mrest = Arc::new(s_index(&a[1..], &b[1..])?);
    let fib = fiberwise(mrest, |m| {
        let vals: Vec<i64> = m.items().iter().map(m_value).chain([x]).collect();
        let r = box_set(&vals[..n - 1], &vals[1..])?;
        product(&[interval_split(a1, b1, vals[0])?, identity(Arc::new(r))])
    })?;
    let r5 = relabel(fib.cod().clone(), |e| {
        let (ys, ms) = (e.get(0), e.get(1));
        let (j, y1) = ys.get(0).tagged();
        let mut yv = vec![y1.clone()];
        yv.extend(ys.get(1).items().iter().cloned());
        let mut mv = vec![s_elem(j, a1, b1)];
        mv.extend(ms.items().iter().cloned());
        Elem::pair(Elem::tup(yv), Elem::tup(mv))
    })?;
    compose_all(&[r1, prod, r3, fib, r5])
}

pub fn beta_normal_statistic(n: usize) -> Statistic {
    crate::statistics::normal_statistic(Shape::Box(n), Shape::Fiber(Box::new(Shape::Box(n))))
}

/// ρ_{a,b,x}: ⊔_{l∈∏[a_i,b_i)} GT(l) ⇄ ⊔_{m∈∏S_i} GT(m,x).  Codomain
/// elements are Tuple[G, Tuple(m)] with G ∈ GT(values of m, x).
pub fn rho(a: &[i64], b: &[i64], x: i64) -> Result<Sij> {
    static MEMO: Memo<(Vec<i64>, Vec<i64>, i64), Sij> = Memo::new();
    MEMO.get_or((a.to_vec(), b.to_vec(), x), || {
        rho_from_beta(&beta(a, b, x)?)
    })
}

/// β without storing the top-level instance; for large parameter sweeps.
pub fn beta_uncached(a: &[i64], b: &[i64], x: i64) -> Result<Sij> {
    if a.len() != b.len() || a.is_empty() {
        return iface("beta needs nonempty a, b of equal length");
    }
    beta_build(a, b, x)
}

/// ρ without storing the top-level instance.
pub fn rho_uncached(a: &[i64], b: &[i64], x: i64) -> Result<Sij> {
    rho_from_beta(&beta_uncached(a, b, x)?)
}

/// ρ derived from an already built β(a, b, x).
pub fn rho_from_beta(bt: &Sij) -> Result<Sij> {
    let iu = indexed_union_sij(bt, |side, t| {
        let l = match side {
            Side::Dom => t.ints(),
            Side::Cod => t.get(0).ints(),
        };
        Ok(identity(gt(&l)?))
    })?;
    let r = relabel(iu.cod().clone(), |e| {
        let (g, t) = (e.get(0), e.get(1));
        Elem::pair(Elem::pair(g.clone(), t.get(0).clone()), t.get(1).clone())
    })?;
    compose(&iu, &r)
}

/// Rows of a ρ-side element, top first (n+1 rows on the codomain side).
pub fn rho_rows(side: Side, e: &Elem, x: i64) -> Vec<Vec<i64>> {
    let (g, t) = (e.get(0), e.get(1));
    match side {
        Side::Dom => gt_rows(g, &t.ints()),
        Side::Cod => {
            let mut k: Vec<i64> = t.items().iter().map(m_value).collect();
            k.push(x);
            gt_rows(g, &k)
        }
    }
}

/// The matching of equal values in the two ends of a product chain, and
/// cancellation of pairs of opposite fibers.
///
/// `index` carries an involution ι that preserves signs; R is the set where
/// `in_r` holds, R' = ι(R), and fixed points of ι must have empty fibers.
/// `swap(t)` for t ∈ R' is a sijection F(t) ⇄ −F(ι t).  The result is
/// ⊔_{t∈index} F(t) ⇄ (∅,∅) with elements Tuple[s, t].
pub fn cancel_pairs(
    index: &SignedSet,
    fiber: impl Fn(&Elem) -> Result<Arc<SignedSet>>,
    iota: impl Fn(&Elem) -> Elem,
    in_r: impl Fn(&Elem) -> bool,
    swap: impl Fn(&Elem) -> Result<Sij>,
) -> Result<Sij> {
    let mut r_items = Vec::new();
    let mut rp_items = Vec::new();
    for (t, s) in index.iter() {
        let it = iota(t);
        if it == *t {
            if !fiber(t)?.is_empty() {
                return Err(Error::Invariant(format!(
                    "fixed point {t} has a nonempty fiber"
                )));
            }
        } else if in_r(t) {
            r_items.push((t.clone(), s));
        } else {
            if index.sign(&it) != Some(s) || !in_r(&it) {
                return Err(Error::Invariant(format!(
                    "involution does not map {t} onto a same-sign element of R"
                )));
            }
            rp_items.push((t.clone(), s));
        }
    }
    let r_idx = Arc::new(SignedSet::from_signed(r_items)?);
    let rp_idx = Arc::new(SignedSet::from_signed(rp_items)?);
    let fib = |t: &Elem| fiber(t).map(|f| (*f).clone());
    let dom = Arc::new(indexed_union(index, fib)?);
    let in_r_ref = &in_r;
    let a = relabel(dom, |e| Elem::tag((!in_r_ref(e.get(1))) as u32, e.clone()))?;
    let d_r = Arc::new(indexed_union(&r_idx, fib)?);
    let psi = relabel(rp_idx, &iota)?;
    let x = indexed_union_sij(&psi, |side, t| match side {
        Side::Dom => swap(t),
        Side::Cod => Ok(inverse(&swap(&iota(t))?)),
    })?;
    let b = union(&[identity(d_r), x])?;
    let c = relabel(b.cod().clone(), |e| {
        let (j, inner) = e.tagged();
        Elem::pair(Elem::tag(j, inner.get(0).clone()), inner.get(1).clone())
    })?;
    let d = fiberwise(r_idx, |u| cancel_opposite(&identity(fiber(u)?)))?;
    compose_all(&[a, b, c, d])
}

/// σ_{a,b,i}: ⊔_{l∈∏[a_j,b_j)} GT(l) ⇄ (∅,∅), for a_i = a_{i+1} and
/// b_i = b_{i+1} (1-based i).
pub fn sigma(a: &[i64], b: &[i64], i: usize) -> Result<Sij> {
    let n = a.len();
    if b.len() != n || i == 0 || i >= n {
        return iface(format!("sigma: bad shape (n={n}, i={i})"));
    }
    let q = i - 1;
    if a[q] != a[q + 1] || b[q] != b[q + 1] {
        return iface(format!(
            "sigma needs a_i = a_(i+1) and b_i = b_(i+1); got a={a:?}, b={b:?}, i={i}"
        ));
    }
    static MEMO: Memo<(Vec<i64>, Vec<i64>, usize), Sij> = Memo::new();
    MEMO.get_or((a.to_vec(), b.to_vec(), i), || {
        let idx = box_set(a, b)?;
        cancel_pairs(
            &idx,
            |t| gt(&t.ints()),
            |t| {
                let mut v = t.items().to_vec();
                v.swap(q, q + 1);
                Elem::tup(v)
            },
            |t| t.get(q).atom() < t.get(q + 1).atom(),
            |t| pi(&t.ints(), i),
        )
    })
}

/// σ-side statistic: η_row of Tuple[G, Tuple(l)].
pub fn indexed_gt_rows(e: &Elem) -> Vec<Vec<i64>> {
    gt_rows(e.get(0), &e.get(1).ints())
}

/// π_{k,i}: GT(k) ⇄ −GT(k with k_i, k_{i+1} swapped), 1-based i.
pub fn pi(k: &[i64], i: usize) -> Result<Sij> {
    let n = k.len();
    if i == 0 || i >= n {
        return iface(format!("pi: position {i} out of range for n={n}"));
    }
    static MEMO: Memo<(Vec<i64>, usize), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), i), || pi_build(k, i))
}

enum TermKind {
    Survivor,
    /// Cancelled by σ after flipping the interval at `flip`; σ acts at `at` (1-based).
    Cancel {
        flip: usize,
        at: usize,
    },
}

fn pi_build(k: &[i64], i: usize) -> Result<Sij> {
    let n = k.len();
    let mut kp = k.to_vec();
    kp.swap(i - 1, i);
    let target = gt(&kp)?.opposite();
    if n == 2 {
        let f = identity(gt(k)?);
        if **f.cod() != target {
            return Err(Error::Invariant(
                "pi base case: sets are not opposite".into(),
            ));
        }
        return Ok(f);
    }
    let p = i - 1;
    let (lo0, hi0) = adjacent_bounds(k);
    // (interval index, split arguments)
    let splits: Vec<(usize, (i64, i64, i64))> = if p == 0 {
        vec![(1, (k[1], k[2], k[0]))]
    } else if p == n - 2 {
        vec![(n - 3, (k[n - 3], k[n - 2], k[n - 1]))]
    } else {
        vec![
            (p - 1, (k[p - 1], k[p], k[p + 1])),
            (p + 1, (k[p + 1], k[p + 2], k[p])),
        ]
    };
    let kinds: Vec<TermKind> = if p == 0 {
        vec![TermKind::Cancel { flip: 0, at: 1 }, TermKind::Survivor]
    } else if p == n - 2 {
        vec![
            TermKind::Survivor,
            TermKind::Cancel {
                flip: n - 2,
                at: n - 2,
            },
        ]
    } else {
        vec![
            TermKind::Cancel { flip: p, at: p + 1 },
            TermKind::Survivor,
            TermKind::Cancel { flip: p, at: p },
            TermKind::Cancel { flip: p, at: p },
        ]
    };
    let factors = (0..n - 1)
        .map(|j| match splits.iter().find(|s| s.0 == j) {
            Some(&(_, (a, b, c))) => interval_split(a, b, c),
            None => Ok(identity(Arc::new(interval(lo0[j], hi0[j])?))),
        })
        .collect::<Result<Vec<_>>>()?;
    let psi_m = product(&factors)?;
    let split_pos: Vec<usize> = splits.iter().map(|s| s.0).collect();
    let to_terms = relabel(psi_m.cod().clone(), |z| {
        let mut term = 0u32;
        let ys = z
            .items()
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if split_pos.contains(&j) {
                    let (t, y) = c.tagged();
                    term = 2 * term + t;
                    y.clone()
                } else {
                    c.clone()
                }
            })
            .collect();
        Elem::tag(term, Elem::tup(ys))
    })?;
    let psi = compose(&psi_m, &to_terms)?;
    let iu = indexed_union_sij(&psi, |side, t| {
        let l = match side {
            Side::Dom => t.ints(),
            Side::Cod => t.tagged().1.ints(),
        };
        Ok(identity(gt(&l)?))
    })?;
    let regroup = relabel(iu.cod().clone(), |e| {
        let (term, y) = e.get(1).tagged();
        Elem::tag(term, Elem::pair(e.get(0).clone(), y.clone()))
    })?;
    let mut term_sets: BTreeMap<u32, Vec<(Elem, i8)>> = BTreeMap::new();
    for (e, s) in regroup.cod().iter() {
        let (term, x) = e.tagged();
        term_sets.entry(term).or_default().push((x.clone(), s));
    }
    let mut parts = Vec::new();
    for (term, kind) in kinds.iter().enumerate() {
        let set = Arc::new(SignedSet::from_signed(
            term_sets.remove(&(term as u32)).unwrap_or_default(),
        )?);
        let (mut lo, mut hi) = (lo0.clone(), hi0.clone());
        let mut bits = term;
        for &(j, (a, b, c)) in splits.iter().rev() {
            if bits & 1 == 0 {
                (lo[j], hi[j]) = (a, c);
            } else {
                (lo[j], hi[j]) = (c, b);
            }
            bits >>= 1;
        }
        parts.push(match *kind {
            TermKind::Survivor => identity(set),
            TermKind::Cancel { flip, at } => {
                let (mut a2, mut b2) = (lo.clone(), hi.clone());
                a2[flip] = hi[flip];
                b2[flip] = lo[flip];
                let s = opposite(&sigma(&a2, &b2, at)?);
                if **s.dom() != *set {
                    return Err(Error::Invariant(format!(
                        "pi({k:?},{i}): cancelled term {term} does not match sigma domain"
                    )));
                }
                s
            }
        });
    }
    let u = union(&parts)?;
    let strip = relabel(u.cod().clone(), |e| e.tagged().1.clone())?;
    if **strip.cod() != target {
        return Err(Error::Invariant(format!(
            "pi({k:?},{i}): surviving term is not -GT({kp:?})"
        )));
    }
    compose_all(&[iu, regroup, u, strip])
}

/// Codomain part layout of γ_row for bottom length n: part P_i (k_i → x)
/// has tag i−1 (i = 1..n); part Q_i has tag n+i−1 (i = 1..n−2).
pub fn gamma_part_bounds(k: &[i64], x: i64, tag: usize) -> (Vec<i64>, Vec<i64>) {
    let n = k.len();
    if tag < n {
        let mut kk = k.to_vec();
        kk[tag] = x;
        adjacent_bounds(&kk)
    } else {
        let i = tag - n + 1; // Q_i, 1-based
        let (mut lo, mut hi) = adjacent_bounds(k);
        for j in [i - 1, i] {
            lo[j] = k[i];
            hi[j] = x;
        }
        (lo, hi)
    }
}

/// γ_{k,x}: ∏[k_j,k_{j+1}) ⇄ ⊔ P_i ⊔ ⊔ Q_i, elements Tagged(tag, Tuple(y)).
pub fn gamma_row(k: &[i64], x: i64) -> Result<Sij> {
    let n = k.len();
    if n < 2 {
        return iface("gamma_row needs n >= 2");
    }
    static MEMO: Memo<(Vec<i64>, i64), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), x), || gamma_row_build(k, x))
}

fn gamma_row_build(k: &[i64], x: i64) -> Result<Sij> {
    let n = k.len();
    let (lo, hi) = adjacent_bounds(k);
    let dom = Arc::new(box_set(&lo, &hi)?);
    if n == 2 {
        let r1 = relabel(dom, |e| e.get(0).clone())?;
        let sp = interval_split(k[0], k[1], x)?;
        let r2 = relabel(sp.cod().clone(), |e| {
            let (j, y) = e.tagged();
            Elem::tag(1 - j, Elem::tup(vec![y.clone()]))
        })?;
        return compose_all(&[r1, sp, r2]);
    }
    let s1 = relabel(dom, |e| {
        let v = e.items();
        Elem::pair(Elem::tup(v[..n - 2].to_vec()), v[n - 2].clone())
    })?;
    let g = gamma_row(&k[..n - 1], x)?;
    let s2 = product(&[g, identity(Arc::new(interval(k[n - 2], k[n - 1])?))])?;
    let merge_tag = (2 * n - 5) as u32;
    let s3 = relabel(s2.cod().clone(), |e| {
        let (t, yp) = e.get(0).tagged();
        let mut y = yp.items().to_vec();
        y.push(e.get(1).clone());
        let t = t as usize;
        if t <= n - 3 {
            Elem::tag(t as u32, Elem::tup(y))
        } else if t == n - 2 {
            let pfx = tuple_or_unit(y[..n - 3].to_vec());
            Elem::tag(
                merge_tag,
                Elem::tup(vec![pfx, y[n - 3].clone(), y[n - 2].clone()]),
            )
        } else {
            Elem::tag((t - 1) as u32, Elem::tup(y))
        }
    })?;
    let (u, v, w) = (k[n - 3], k[n - 2], k[n - 1]);
    let pfx = Arc::new(box_set(&lo[..n - 3], &hi[..n - 3])?);
    let merge = gamma_merge(pfx, u, v, w, x)?;
    let mut parts = Vec::new();
    for tag in 0..(2 * n - 5) {
        let final_tag = if tag <= n - 3 { tag } else { tag + 2 };
        let (plo, phi) = gamma_part_bounds(k, x, final_tag);
        parts.push(identity(Arc::new(box_set(&plo, &phi)?)));
    }
    parts.push(merge);
    let s4 = union(&parts)?;
    let s5 = relabel(s4.cod().clone(), |e| {
        let (t, inner) = e.tagged();
        let t = t as usize;
        if t <= n - 3 {
            e.clone()
        } else if t < 2 * n - 5 {
            Elem::tag((t + 2) as u32, inner.clone())
        } else {
            let (j, y) = inner.tagged();
            let tag = [n - 2, n - 1, 2 * n - 3][j as usize];
            Elem::tag(tag as u32, y.clone())
        }
    })?;
    compose_all(&[s1, s2, s3, s4, s5])
}

/// Pfx×[u,x)×[v,w) ⇄ Pfx×[u,x)×[x,w) ⊔ Pfx×[u,v)×[v,x) ⊔ Pfx×[v,x)×[v,x);
/// domain elements Tuple[p, a, b], codomain Tagged(j, Tuple(p…, a, b)).
fn gamma_merge(pfx: Arc<SignedSet>, u: i64, v: i64, w: i64, x: i64) -> Result<Sij> {
    let flat = |p: &Elem, a: &Elem, b: &Elem| {
        let mut y = match p {
            Elem::Unit => vec![],
            _ => p.items().to_vec(),
        };
        y.push(a.clone());
        y.push(b.clone());
        Elem::tup(y)
    };
    let unflat = |e: &Elem| {
        let y = e.items();
        let m = y.len();
        (
            tuple_or_unit(y[..m - 2].to_vec()),
            y[m - 2].clone(),
            y[m - 1].clone(),
        )
    };
    let t1 = cartesian_product(&[&pfx, &interval(u, x)?, &interval(x, w)?])?;
    let t2 = cartesian_product(&[&pfx, &interval(u, v)?, &interval(v, x)?])?;
    let t3 = cartesian_product(&[&pfx, &interval(v, x)?, &interval(v, x)?])?;
    let re = |s: &SignedSet| s.map_elems(|e| flat(e.get(0), e.get(1), e.get(2)));
    let start = Arc::new(disjoint_union(&[&re(&t1)?, &re(&t2)?, &re(&t3)?])?);
    let c1 = relabel(start, |e| {
        let (j, y) = e.tagged();
        let (p, a, b) = unflat(y);
        match j {
            0 => e.clone(),
            _ => Elem::tag(1, Elem::tup(vec![p, Elem::tag(j - 1, a), b])),
        }
    })?;
    let t1_set = Arc::new(re(&t1)?);
    let c2 = union(&[
        identity(t1_set),
        product(&[
            identity(pfx.clone()),
            inverse(&interval_split(u, x, v)?),
            identity(Arc::new(interval(v, x)?)),
        ])?,
    ])?;
    let c3 = relabel(c2.cod().clone(), |e| {
        let (j, y) = e.tagged();
        if j == 0 {
            let (p, a, b) = unflat(y);
            Elem::tup(vec![p, a, Elem::tag(1, b)])
        } else {
            let v = y.items();
            Elem::tup(vec![v[0].clone(), v[1].clone(), Elem::tag(0, v[2].clone())])
        }
    })?;
    let c4 = product(&[
        identity(pfx),
        identity(Arc::new(interval(u, x)?)),
        inverse(&interval_split(v, w, x)?),
    ])?;
    Ok(inverse(&compose_all(&[c1, c2, c3, c4])?))
}

pub fn gamma_normal_statistic(n: usize) -> Statistic {
    crate::statistics::normal_statistic(
        Shape::Box(n - 1),
        Shape::UnionOf(Box::new(Shape::Box(n - 1))),
    )
}

/// τ_{k,x}: GT(k) ⇄ ⊔_{i=1}^n GT(k with k_i → x); codomain elements
/// Tagged(i−1, G).
pub fn tau(k: &[i64], x: i64) -> Result<Sij> {
    if k.is_empty() {
        return iface("tau needs n >= 1");
    }
    static MEMO: Memo<(Vec<i64>, i64), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), x), || {
        let n = k.len();
        if n == 1 {
            let cod = Arc::new(disjoint_union(&[&*gt(&[x])?])?);
            return crate::sijection::from_pairs(
                gt(k)?,
                cod,
                [(
                    (Side::Dom, Elem::Atom(k[0])),
                    (Side::Cod, Elem::tag(0, Elem::Atom(x))),
                )],
            );
        }
        let g = gamma_row(k, x)?;
        let iu = indexed_union_sij(&g, |side, t| {
            let l = match side {
                Side::Dom => t.ints(),
                Side::Cod => t.tagged().1.ints(),
            };
            Ok(identity(gt(&l)?))
        })?;
        let regroup = relabel(iu.cod().clone(), |e| {
            let (tag, y) = e.get(1).tagged();
            Elem::tag(tag, Elem::pair(e.get(0).clone(), y.clone()))
        })?;
        let mut parts = Vec::new();
        for tag in 0..(2 * n - 2) {
            let (lo, hi) = gamma_part_bounds(k, x, tag);
            if tag < n {
                let mut kk = k.to_vec();
                kk[tag] = x;
                parts.push(identity(gt(&kk)?));
            } else {
                parts.push(sigma(&lo, &hi, tag - n + 1)?);
            }
        }
        let u = union(&parts)?;
        compose_all(&[iu, regroup, u])
    })
}

/// Bottom row of the τ codomain part with the given tag.
pub fn tau_part_row(k: &[i64], x: i64, tag: usize) -> Vec<i64> {
    let mut kk = k.to_vec();
    kk[tag] = x;
    kk
}

/// ∏_{i<j} (k_j − k_i)/(j − i), exactly.
pub fn gt_size_formula(k: &[i64]) -> i64 {
    let n = k.len();
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 0..n {
        for j in i + 1..n {
            num *= (k[j] - k[i]) as i128;
            den *= (j - i) as i128;
        }
    }
    (num / den) as i64
}

/// Sign of the sorting permutation; 0 when k has a repeated entry.
pub fn sgn_seq(k: &[i64]) -> i64 {
    let mut s = 1;
    for i in 0..k.len() {
        for j in i + 1..k.len() {
            if k[i] == k[j] {
                return 0;
            }
            if k[i] > k[j] {
                s = -s;
            }
        }
    }
    s
}

/// Half-open interlacing a_{i+1,j} ≤ a_{i,j} < a_{i+1,j+1} on sorted rows.
pub fn is_classical_profile(rows: &[Vec<i64>]) -> bool {
    rows.iter().enumerate().all(|(i, r)| r.len() == i + 1)
        && rows
            .windows(2)
            .all(|w| (0..w[0].len()).all(|j| w[1][j] <= w[0][j] && w[0][j] < w[1][j + 1]))
}

/// sgn(k) on classical profiles over the multiset of k, 0 on others.
pub fn restricted_count(k: &[i64], a: &[Vec<i64>]) -> Result<i64> {
    let mut bottom = k.to_vec();
    bottom.sort_unstable();
    let mut last = a.last().cloned().unwrap_or_default();
    last.sort_unstable();
    if a.len() != k.len() || last != bottom {
        return iface("row profile does not end in the multiset of k");
    }
    let sorted: Vec<Vec<i64>> = a
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.sort_unstable();
            r
        })
        .collect();
    Ok(if is_classical_profile(&sorted) {
        sgn_seq(k)
    } else {
        0
    })
}

/// Every classical pattern (as sorted rows, top first) with the given
/// strictly increasing bottom row.
pub fn classical_patterns(bottom: &[i64]) -> Vec<Vec<Vec<i64>>> {
    if bottom.len() == 1 {
        return vec![vec![bottom.to_vec()]];
    }
    let mut out = Vec::new();
    let n = bottom.len();
    let mut l = vec![0i64; n - 1];
    fn rec(j: usize, bottom: &[i64], l: &mut Vec<i64>, out: &mut Vec<Vec<Vec<i64>>>) {
        if j == l.len() {
            for mut p in classical_patterns(l) {
                p.push(bottom.to_vec());
                out.push(p);
            }
            return;
        }
        for v in bottom[j]..bottom[j + 1] {
            l[j] = v;
            rec(j + 1, bottom, l, out);
        }
    }
    rec(0, bottom, &mut l, &mut out);
    out
}

/// p_{i,j}, q_{i,j} for 1 ≤ j ≤ i ≤ n−1, stored as `p[i-1][j-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GgtParams {
    pub p: Vec<Vec<usize>>,
    pub q: Vec<Vec<usize>>,
}

impl GgtParams {
    pub fn classical(n: usize) -> GgtParams {
        let rows = |off: usize| (1..n).map(|i| (1..=i).map(|j| j + off).collect()).collect();
        GgtParams {
            p: rows(0),
            q: rows(1),
        }
    }

    /// Bottom-row length these parameters describe.
    pub fn n(&self) -> usize {
        self.p.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.q.len() != self.p.len() {
            return iface("p and q have different heights");
        }
        for i in 1..=self.p.len() {
            let (pr, qr) = (&self.p[i - 1], &self.q[i - 1]);
            if pr.len() != i || qr.len() != i {
                return iface(format!("row {i} must have {i} entries"));
            }
            if pr.iter().chain(qr).any(|&v| v == 0 || v > i + 1) {
                return iface(format!("row {i} entries must lie in 1..={}", i + 1));
            }
        }
        Ok(())
    }

    /// Plain text: one `i j p q` line per entry.
    pub fn parse(text: &str) -> Result<GgtParams> {
        let mut entries = Vec::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let v: Vec<usize> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad number in {line:?}")))
                })
                .collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(Error::Parse(format!("expected `i j p q`, got {line:?}")));
            }
            entries.push((v[0], v[1], v[2], v[3]));
        }
        let h = entries.iter().map(|e| e.0).max().unwrap_or(0);
        let mut p: Vec<Vec<usize>> = (1..=h).map(|i| vec![0; i]).collect();
        let mut q = p.clone();
        for (i, j, pv, qv) in entries {
            if i == 0 || j == 0 || j > i {
                return Err(Error::Parse(format!("bad index ({i},{j})")));
            }
            p[i - 1][j - 1] = pv;
            q[i - 1][j - 1] = qv;
        }
        let params = GgtParams { p, q };
        params.validate()?;
        Ok(params)
    }
}

pub fn ggt(k: &[i64], params: &GgtParams) -> Result<SignedSet> {
    params.validate()?;
    if params.n() != k.len() {
        return iface("parameters do not match the length of k");
    }
    ggt_rec(k, params)
}

fn ggt_rec(k: &[i64], params: &GgtParams) -> Result<SignedSet> {
    let n = k.len();
    if n == 1 {
        return Ok(SignedSet::singleton(Elem::Atom(k[0]), 1));
    }
    let a: Vec<i64> = params.p[n - 2].iter().map(|&p| k[p - 1]).collect();
    let b: Vec<i64> = params.q[n - 2].iter().map(|&q| k[q - 1]).collect();
    let idx = box_set(&a, &b)?;
    indexed_union(&idx, |l| ggt_rec(&l.ints(), params))
}

/// Sign of the parameters: 0 when some G_i is not a tree, otherwise the
/// product of edge orientation signs and sgn(r_i), with r_i(0) = 1.
pub fn ggt_param_sign(params: &GgtParams) -> i64 {
    let mut sign = 1;
    for i in 1..=params.p.len() {
        let verts = i + 1;
        let edges: Vec<(usize, usize)> = params.p[i - 1]
            .iter()
            .zip(&params.q[i - 1])
            .map(|(&p, &q)| (p - 1, q - 1))
            .collect();
        let mut adj = vec![Vec::new(); verts];
        for &(p, q) in &edges {
            if p == q {
                return 0;
            }
            adj[p].push(q);
            adj[q].push(p);
        }
        // i edges on i+1 vertices form a tree iff connected.
        let mut dist = vec![usize::MAX; verts];
        dist[0] = 0;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            return 0;
        }
        let mut r = vec![0usize];
        let mut flips = 0;
        for &(p, q) in &edges {
            if dist[p] > dist[q] {
                r.push(p);
                flips += 1;
            } else {
                r.push(q);
            }
        }
        let rk: Vec<i64> = r.iter().map(|&v| v as i64).collect();
        sign *= sgn_seq(&rk) * if flips % 2 == 0 { 1 } else { -1 };
    }
    sign
}

pub fn ggt_size_formula(k: &[i64], params: &GgtParams) -> i64 {
    let mut sorted = k.to_vec();
    sorted.sort_unstable();
    sgn_seq(k) * ggt_param_sign(params) * gt_size_formula(&sorted)
}

/// Outcome of composing every π-path that returns to GT(k).
#[derive(Clone, Debug)]
pub struct IntegrabilityReport {
    pub paths_checked: usize,
    pub failures: Vec<String>,
}

/// Composite of π along a path of 1-based positions, starting at GT(k).
pub fn pi_path(k: &[i64], path: &[usize]) -> Result<(Sij, Vec<i64>)> {
    let mut cur = k.to_vec();
    let mut acc = identity(gt(k)?);
    for (step, &i) in path.iter().enumerate() {
        let p = pi(&cur, i)?;
        let p = if step % 2 == 0 { p } else { opposite(&p) };
        acc = compose(&acc, &p)?;
        cur.swap(i - 1, i);
    }
    Ok((acc, cur))
}

pub fn check_partial_integrability(k: &[i64], bound: usize) -> Result<IntegrabilityReport> {
    let n = k.len();
    if !(2..=3).contains(&n) || k.windows(2).any(|w| w[0] >= w[1]) {
        return iface("integrability check needs strictly increasing k with 2 <= n <= 3");
    }
    let mut report = IntegrabilityReport {
        paths_checked: 0,
        failures: vec![],
    };
    let mut paths: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..bound {
        let mut next = Vec::new();
        for p in &frontier {
            for i in 1..n {
                let mut q = p.clone();
                q.push(i);
                next.push(q);
            }
        }
        paths.extend(next.iter().cloned());
        frontier = next;
    }
    let base = gt(k)?;
    for path in paths {
        let mut cur = k.to_vec();
        for &i in &path {
            cur.swap(i - 1, i);
        }
        if cur != k || path.len() % 2 != 0 {
            continue;
        }
        let (f, _) = pi_path(k, &path)?;
        report.paths_checked += 1;
        for e in base.plus() {
            let img = f.apply(Side::Dom, e)?;
            if img != (Side::Cod, e.clone()) {
                report.failures.push(format!(
                    "path {path:?} sends {e} to {} {}",
                    img.0.name(),
                    img.1
                ));
                break;
            }
        }
    }
    Ok(report)
}

/// Count elements of GT(k) by their η_row profile.
pub fn profile_counts(k: &[i64]) -> Result<HashMap<Vec<Vec<i64>>, i64>> {
    let mut m: HashMap<Vec<Vec<i64>>, i64> = HashMap::new();
    for (e, s) in gt(k)?.iter() {
        let StatValue::MultiSeq(rows) = eta_row(e, k) else {
            unreachable!()
        };
        *m.entry(rows).or_default() += s as i64;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sijection::verify;
    use crate::statistics::check_compatibility;

    #[test]
    fn gt_examples() {
        let s = gt(&[1, 3]).unwrap();
        assert_eq!(s.size(), 2);
        assert!(s.contains(&Elem::pair(Elem::Atom(1), Elem::atoms(&[1]))));
        assert_eq!(gt(&[3, 1]).unwrap().size(), -2);
        assert_eq!(gt(&[1, 3, 5]).unwrap().size(), 8);
        assert_eq!(gt_size_formula(&[1, 3, 5]), 8);
        assert_eq!(gt_size_formula(&[3, 1]), -2);
        assert_eq!(gt_size_formula(&[2, 2]), 0);
    }

    #[test]
    fn rows_and_tops() {
        let rows = vec![vec![4], vec![2, 5], vec![2, 5, 7]];
        let e = gt_elem_from_rows(&rows);
        assert!(gt(&[2, 5, 7]).unwrap().contains(&e));
        assert_eq!(gt_rows(&e, &[2, 5, 7]), rows);
        assert_eq!(
            eta_row(&e, &[2, 5, 7]),
            StatValue::MultiSeq(vec![vec![4], vec![2, 5], vec![2, 5, 7]])
        );
        assert_eq!(eta_top(&e, &[2, 5, 7]), 4);
        assert_eq!(
            eta_row(&Elem::Atom(3), &[3]),
            StatValue::MultiSeq(vec![vec![3]])
        );
    }

    #[test]
    fn restrict_by_top() {
        let s = gt(&[1, 3]).unwrap();
        let r = s.restrict(|e| eta_top(e, &[1, 3]), &2);
        assert_eq!(r.size(), 1);
        assert!(s.restrict(|e| eta_top(e, &[1, 3]), &9).is_empty());
    }

    #[test]
    fn sgn_examples() {
        assert_eq!(sgn_seq(&[1, 2]), 1);
        assert_eq!(sgn_seq(&[2, 1]), -1);
        assert_eq!(sgn_seq(&[1, 1]), 0);
    }

    #[test]
    fn beta_cases() {
        let f = beta(&[0, 2], &[2, 4], 5).unwrap();
        assert!(verify(&f).valid());
        assert!(check_compatibility(&f, &beta_normal_statistic(2)).compatible());
        let e = beta(&[1, 2], &[1, 2], 0).unwrap();
        assert!(e.dom().is_empty());
        assert_eq!(e.cod().size(), 0);
        // n = 1 agrees with the interval split up to relabeling
        let g = beta(&[1], &[4], 2).unwrap();
        let s = interval_split(1, 4, 2).unwrap();
        for v in 1..4 {
            let (side, img) = g.apply(Side::Dom, &Elem::atoms(&[v])).unwrap();
            let (side2, img2) = s.apply(Side::Dom, &Elem::Atom(v)).unwrap();
            assert_eq!(side, side2);
            assert_eq!(img.get(0).get(0), img2.tagged().1);
        }
    }

    #[test]
    fn rho_trace() {
        let f = rho(&[1], &[2], 5).unwrap();
        assert!(verify(&f).valid());
        let dom_e = Elem::pair(Elem::Atom(1), Elem::atoms(&[1]));
        let (side, img) = f.apply(Side::Dom, &dom_e).unwrap();
        assert_eq!(side, Side::Cod);
        assert_eq!(rho_rows(Side::Cod, &img, 5), vec![vec![1], vec![1, 5]]);
        assert_eq!(img.get(1), &Elem::tup(vec![Elem::tag(0, Elem::Atom(1))]));
    }

    #[test]
    fn pi_small() {
        let f = pi(&[1, 3], 1).unwrap();
        assert!(verify(&f).valid());
        for t in [1, 2] {
            let e = Elem::pair(Elem::Atom(t), Elem::atoms(&[t]));
            assert_eq!(f.apply(Side::Dom, &e).unwrap(), (Side::Cod, e.clone()));
        }
        for k in [[0, 2, 4], [1, 0, 3], [2, 2, 0], [3, 1, 2]] {
            for i in 1..3 {
                let f = pi(&k, i).unwrap();
                assert!(verify(&f).valid(), "{k:?} {i}");
                let mut kp = k.to_vec();
                kp.swap(i - 1, i);
                let (k1, k2) = (k.to_vec(), kp.clone());
                let eta = Statistic::sided(
                    "eta_row",
                    move |e| Ok(eta_row(e, &k1)),
                    move |e| Ok(eta_row(e, &k2)),
                );
                assert!(check_compatibility(&f, &eta).compatible(), "{k:?} {i}");
            }
        }
    }

    #[test]
    fn sigma_cases() {
        let f = sigma(&[0, 1, 1], &[2, 1, 1], 2).unwrap();
        assert!(verify(&f).valid());
        assert_eq!(f.dom().size(), 0);
        let g = sigma(&[0, 0, 3], &[3, 3, 1], 1).unwrap();
        assert!(verify(&g).valid());
        assert!(!g.dom().is_empty());
        assert!(matches!(
            sigma(&[0, 1], &[2, 1], 1),
            Err(Error::Interface(_))
        ));
    }

    #[test]
    fn gamma_row_cases() {
        for (k, x) in [
            (vec![0, 2], 1),
            (vec![0, 2, 4], 1),
            (vec![1, 0, 3, 2], 2),
            (vec![0, 2, 4], 2),
        ] {
            let f = gamma_row(&k, x).unwrap();
            assert!(verify(&f).valid(), "{k:?} {x}");
            assert!(check_compatibility(&f, &gamma_normal_statistic(k.len())).compatible());
        }
        // n = 2 matches the interval split [k1,k2) ⇄ [k1,x) ⊔ [x,k2).
        let f = gamma_row(&[0, 4], 2).unwrap();
        let (_, img) = f.apply(Side::Dom, &Elem::atoms(&[3])).unwrap();
        assert_eq!(img, Elem::tag(0, Elem::atoms(&[3])));
    }

    #[test]
    fn tau_cases() {
        let f = tau(&[4], 7).unwrap();
        assert!(verify(&f).valid());
        let f = tau(&[0, 2], 4).unwrap();
        assert!(verify(&f).valid());
        let top = Statistic::sided(
            "eta_top",
            |e| Ok(StatValue::Int(gt_upper_rows(e, 2)[0][0])),
            |e| Ok(StatValue::Int(gt_upper_rows(e.tagged().1, 2)[0][0])),
        );
        assert!(check_compatibility(&f, &top).compatible());
        let k = [0, 2, 5];
        let total: i64 = (0..3)
            .map(|i| gt(&tau_part_row(&k, 3, i)).unwrap().size())
            .sum();
        assert_eq!(gt(&k).unwrap().size(), total);
        assert!(verify(&tau(&k, 3).unwrap()).valid());
    }

    #[test]
    fn restricted_count_examples() {
        let a = vec![vec![1], vec![1, 3], vec![1, 3, 5]];
        assert_eq!(restricted_count(&[1, 3, 5], &a).unwrap(), 1);
        assert_eq!(restricted_count(&[3, 1, 5], &a).unwrap(), -1);
        let bad = vec![vec![5], vec![1, 3], vec![1, 3, 5]];
        assert_eq!(restricted_count(&[1, 3, 5], &bad).unwrap(), 0);
        assert!(restricted_count(&[1, 3, 6], &a).is_err());
        let counts = profile_counts(&[1, 3, 5]).unwrap();
        assert_eq!(counts[&a], 1);
    }

    #[test]
    fn ggt_examples() {
        let c = GgtParams::classical(3);
        assert_eq!(ggt(&[1, 3, 5], &c).unwrap(), *gt(&[1, 3, 5]).unwrap());
        assert_eq!(ggt_param_sign(&c), 1);
        let rev = GgtParams {
            p: vec![vec![2]],
            q: vec![vec![1]],
        };
        assert_eq!(ggt(&[1, 3], &rev).unwrap().size(), -2);
        assert_eq!(ggt_param_sign(&rev), -1);
        assert_eq!(ggt_size_formula(&[1, 3], &rev), -2);
        let cyc = GgtParams {
            p: vec![vec![1], vec![1, 1]],
            q: vec![vec![2], vec![2, 2]],
        };
        assert_eq!(ggt_param_sign(&cyc), 0);
        assert_eq!(ggt(&[0, 2, 5], &cyc).unwrap().size(), 0);
        let parsed = GgtParams::parse("1 1 2 1\n").unwrap();
        assert_eq!(parsed, rev);
    }

    #[test]
    fn integrability_small() {
        let r = check_partial_integrability(&[0, 2], 2).unwrap();
        assert_eq!(r.paths_checked, 2);
        assert!(r.failures.is_empty());
    }
}
