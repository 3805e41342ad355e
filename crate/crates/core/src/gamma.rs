//! Γ: GMT(k) ⇄ SGT(k) through Φ₁, Φ₃′ and Φ₄′, its x-limits and translation
//! behaviour, and the weighted sijection GMT(k) ⇄ AR_n × SGT(k).

use crate::elem::{Arrow, Elem};
use crate::error::{iface, Error, Result};
use crate::gt::{gt, gt_rows, pi, rho, tau};
use crate::memo::Memo;
use crate::signed::{cartesian_product, indexed_union, SignedSet};
use crate::sijection::{
    compose, compose_all, fiberwise, from_pairs, identity, inverse, opposite, product, relabel,
    union, Side, Sij,
};
use crate::statistics::{StatValue, Statistic};
use crate::triangles::{
    ap, ap_apply, ap_arrows, ap_from, ap_get, ar, c_vector, eta_inv_gmt, eta_inv_sgt, eta_top_gmt,
    eta_top_sgt, gmt, gmt_index, gmt_view, sgt, SignMode,
};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// X₊ = max(k) + n.
pub fn x_plus(k: &[i64]) -> i64 {
    k.iter().copied().max().unwrap_or(0) + k.len() as i64
}

/// X₋ = min(k) − n.
pub fn x_minus(k: &[i64]) -> i64 {
    k.iter().copied().min().unwrap_or(0) - k.len() as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    PlusInfinity,
    MinusInfinity,
}

/// m_i(μ,T,ω), 1-based i ≤ n−1, with c taken from T ∈ AP_{n−1}.
pub fn mid_value(k: &[i64], mu: &[Arrow], c: &[i64], i: usize, omega: u32) -> i64 {
    if omega == 0 {
        k[i - 1] + mu[i - 1].d_ne() + c[i - 1]
    } else {
        k[i] - mu[i].d_nw() + c[i - 1]
    }
}

fn mid_row(k: &[i64], mu: &[Arrow], t: &Elem, omega: &[u32]) -> Vec<i64> {
    let c = c_vector(t, k.len() - 1);
    (1..k.len())
        .map(|i| mid_value(k, mu, &c, i, omega[i - 1]))
        .collect()
}

/// AR_n × AP_{n−1}, elements Tuple[μ, T].
fn arrow_index(n: usize, mode: SignMode) -> Result<Arc<SignedSet>> {
    static MEMO: Memo<(usize, SignMode), Arc<SignedSet>> = Memo::new();
    MEMO.get_or((n, mode), || {
        Ok(Arc::new(cartesian_product(&[
            &*ar(n, mode)?,
            &*ap(n - 1, mode)?,
        ])?))
    })
}

fn need_n2(k: &[i64], what: &str) -> Result<()> {
    if k.len() < 2 {
        return iface(format!("{what} needs n >= 2"));
    }
    Ok(())
}

/// Domain of Φ₁: ⊔_{μ} ⊔_{l∈μ(k)} SGT(l), elements Tuple[Tuple[A,T], Tuple[Tuple(l), μ]].
pub fn phi1_domain(k: &[i64], mode: SignMode) -> Result<Arc<SignedSet>> {
    Ok(Arc::new(indexed_union(&*gmt_index(k, mode)?, |t| {
        sgt(&t.get(0).ints(), mode).map(|s| (*s).clone())
    })?))
}

/// Φ₁.  Codomain elements Tuple[Tuple[G, Tuple(m)], Tuple[μ,T]] with
/// m_i = Tagged(ω_i, value).
pub fn phi1(k: &[i64], x: i64, mode: SignMode) -> Result<Sij> {
    need_n2(k, "phi1")?;
    static MEMO: Memo<(Vec<i64>, i64, SignMode), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), x, mode), || {
        let n = k.len();
        let reorder = relabel(phi1_domain(k, mode)?, |e| {
            let (s, t) = (e.get(0), e.get(1));
            let tp = s.get(1);
            let lp = ap_apply(tp, &t.get(0).ints());
            Elem::pair(
                Elem::pair(s.get(0).clone(), Elem::atoms(&lp)),
                Elem::pair(t.get(1).clone(), tp.clone()),
            )
        })?;
        let per_fiber = fiberwise(arrow_index(n, mode)?, |j| {
            let mu = j.get(0).arrow_seq();
            let t = j.get(1);
            let a = mid_row(k, &mu, t, &vec![0; n - 1]);
            let b = mid_row(k, &mu, t, &vec![1; n - 1]);
            rho(&a, &b, x)
        })?;
        compose(&reorder, &per_fiber)
    })
}

/// Index i with ω = ω⁽ⁱ⁾ (0…0 1…1, i−1 zeros), if ω is a staircase word.
fn staircase(omega: &[u32]) -> Option<usize> {
    let zeros = omega.iter().take_while(|&&w| w == 0).count();
    omega[zeros..].iter().all(|&w| w == 1).then_some(zeros + 1)
}

/// π-chain moving the last entry of `seq` to position i (1-based):
/// GT(seq) ⇄ (−1)^{n−i} GT(target).
fn move_last_to(seq: &[i64], i: usize) -> Result<Sij> {
    let mut cur = seq.to_vec();
    let mut chain = Vec::new();
    for (step, p) in (i..seq.len()).rev().enumerate() {
        let f = pi(&cur, p)?;
        chain.push(if step % 2 == 1 { opposite(&f) } else { f });
        cur.swap(p - 1, p);
    }
    if chain.is_empty() {
        return Ok(identity(gt(seq)?));
    }
    compose_all(&chain)
}

/// The involution on AR_n × AP_{n−1} for a non-staircase ω; i is the first
/// position with ω_i = 1, ω_{i+1} = 0.
pub fn omega2_involution(n: usize, i: usize, mu: &[Arrow], t: &Elem) -> (Vec<Arrow>, Elem) {
    let m = n - 1;
    let tp = ap_from(m, |p, q| {
        if q == i && p < i {
            ap_get(t, p, i + 1)
        } else if q == i + 1 && p < i {
            ap_get(t, p, i)
        } else if p == i && q == i + 1 {
            mu[i].reverse()
        } else if p == i && q >= i + 2 {
            ap_get(t, i + 1, q)
        } else if p == i + 1 && q >= i + 2 {
            ap_get(t, i, q)
        } else {
            ap_get(t, p, q)
        }
    });
    let mut mup = mu.to_vec();
    mup[i] = ap_get(t, i, i + 1).reverse();
    (mup, tp)
}

fn first_descent(omega: &[u32]) -> usize {
    (0..omega.len() - 1)
        .find(|&j| omega[j] == 1 && omega[j + 1] == 0)
        .map(|j| j + 1)
        .expect("non-staircase word")
}

/// Φ₃′.  Codomain elements Tagged(i−1, Tuple[G, Tuple[μ,T]]) with
/// G ∈ GT(m_1(0), …, m_{i−1}(0), x, m_i(1), …, m_{n−1}(1)).
pub fn phi3p(k: &[i64], x: i64, mode: SignMode) -> Result<Sij> {
    need_n2(k, "phi3p")?;
    static MEMO: Memo<(Vec<i64>, i64, SignMode), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), x, mode), || phi3p_build(k, x, mode))
}

fn phi3p_build(k: &[i64], x: i64, mode: SignMode) -> Result<Sij> {
    let n = k.len();
    let c1 = phi1(k, x, mode)?.cod().clone();
    let split = relabel(c1, |e| {
        let (g, ms) = (e.get(0).get(0), e.get(0).get(1));
        let omega: Vec<u32> = ms.items().iter().map(|m| m.tagged().0).collect();
        let j = e.get(1);
        match staircase(&omega) {
            Some(i) => Elem::tag(i as u32 - 1, Elem::pair(g.clone(), j.clone())),
            None => {
                let w: Vec<i64> = omega.iter().map(|&w| w as i64).collect();
                Elem::tag(
                    n as u32,
                    Elem::pair(
                        g.clone(),
                        Elem::tup(vec![Elem::atoms(&w), j.get(0).clone(), j.get(1).clone()]),
                    ),
                )
            }
        }
    })?;
    let jidx = arrow_index(n, mode)?;
    let mut parts = Vec::with_capacity(n + 1);
    for i in 1..=n {
        let omega: Vec<u32> = (1..n).map(|j| (j >= i) as u32).collect();
        parts.push(fiberwise(jidx.clone(), |j| {
            let mut seq = mid_row(k, &j.get(0).arrow_seq(), j.get(1), &omega);
            seq.push(x);
            let f = move_last_to(&seq, i)?;
            Ok(if (n - i) % 2 == 1 { opposite(&f) } else { f })
        })?);
    }
    parts.push(omega2_cancel(k, x, mode)?);
    compose(&split, &union(&parts)?)
}

/// ⊔_{ω∈Ω₂} ⊔_{(μ,T)} GT(m(μ,T,ω), x) ⇄ (∅,∅).
fn omega2_cancel(k: &[i64], x: i64, mode: SignMode) -> Result<Sij> {
    let n = k.len();
    let jidx = arrow_index(n, mode)?;
    let mut items = Vec::new();
    for bits in 0u32..(1 << (n - 1)) {
        let omega: Vec<u32> = (0..n - 1).map(|j| (bits >> j) & 1).collect();
        if staircase(&omega).is_some() {
            continue;
        }
        let w: Vec<i64> = omega.iter().map(|&b| b as i64).collect();
        let ws = if bits.count_ones() % 2 == 0 { 1 } else { -1 };
        for (j, s) in jidx.iter() {
            items.push((
                Elem::tup(vec![Elem::atoms(&w), j.get(0).clone(), j.get(1).clone()]),
                ws * s,
            ));
        }
    }
    let index = SignedSet::from_signed(items)?;
    let parse = |t: &Elem| {
        let omega: Vec<u32> = t.get(0).ints().iter().map(|&b| b as u32).collect();
        (omega, t.get(1).arrow_seq(), t.get(2).clone())
    };
    let seq = |t: &Elem| {
        let (omega, mu, tt) = parse(t);
        let mut s = mid_row(k, &mu, &tt, &omega);
        s.push(x);
        s
    };
    let iota = |t: &Elem| {
        let (omega, mu, tt) = parse(t);
        let (mup, tp) = omega2_involution(n, first_descent(&omega), &mu, &tt);
        Elem::tup(vec![t.get(0).clone(), Elem::arrows(&mup), tp])
    };
    crate::gt::cancel_pairs(
        &index,
        |t| gt(&seq(t)),
        iota,
        |t| *t < iota(t),
        |t| pi(&seq(t), first_descent(&parse(t).0)),
    )
}

/// Ψ_{n,i} on arrows: (μ, T ∈ AP_{n−1}) ↦ (μ_i, T′ ∈ AP_n).
pub fn psi_rearrange(n: usize, i: usize, mu: &[Arrow], t: &Elem) -> (Arrow, Elem) {
    let tp = ap_from(n, |p, q| {
        if q < i {
            ap_get(t, p, q)
        } else if p < i && i < q {
            ap_get(t, p, q - 1)
        } else if i < p {
            ap_get(t, p - 1, q - 1)
        } else if q == i {
            mu[p - 1].reverse()
        } else {
            mu[q - 1].reverse()
        }
    });
    (mu[i - 1], tp)
}

/// ⊔_{T∈AP_n} ⊔_i GT(T(k) with entry i replaced by x), elements
/// Tuple[Tagged(i−1, G), T].
fn tau_index_set(k: &[i64], x: i64, mode: SignMode) -> Result<Arc<SignedSet>> {
    Ok(Arc::new(indexed_union(&*ap(k.len(), mode)?, |t| {
        tau(&ap_apply(t, k), x).map(|f| (**f.cod()).clone())
    })?))
}

fn tau_merge(k: &[i64], x: i64, mode: SignMode) -> Result<Sij> {
    fiberwise(ap(k.len(), mode)?, |t| {
        Ok(inverse(&tau(&ap_apply(t, k), x)?))
    })
}

fn rearranged(n: usize, e: &Elem) -> (Arrow, Elem) {
    let (tag, inner) = e.tagged();
    let (g, j) = (inner.get(0), inner.get(1));
    let (a, tp) = psi_rearrange(n, tag as usize + 1, &j.get(0).arrow_seq(), j.get(1));
    (a, Elem::pair(Elem::tag(tag, g.clone()), tp))
}

/// φ_{AR₁}: AR₁ ⇄ ({·}, ∅).
pub fn phi_ar1() -> Result<Sij> {
    let a = |x| Elem::arrows(&[x]);
    from_pairs(
        ar(1, SignMode::Signed)?,
        Arc::new(SignedSet::unit()),
        [
            ((Side::Dom, a(Arrow::NW)), (Side::Cod, Elem::Unit)),
            ((Side::Dom, a(Arrow::NE)), (Side::Dom, a(Arrow::NWNE))),
        ],
    )
}

/// Φ₄′: Φ₃′-codomain ⇄ SGT(k), signed arrows.
pub fn phi4p(k: &[i64], x: i64) -> Result<Sij> {
    need_n2(k, "phi4p")?;
    static MEMO: Memo<(Vec<i64>, i64), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), x), || {
        let n = k.len();
        let mode = SignMode::Signed;
        let c3 = phi3p(k, x, mode)?.cod().clone();
        let r1 = relabel(c3, |e| {
            let (a, y) = rearranged(n, e);
            Elem::pair(y, Elem::arrows(&[a]))
        })?;
        let cancel = product(&[identity(tau_index_set(k, x, mode)?), phi_ar1()?])?;
        let drop_unit = relabel(cancel.cod().clone(), |e| e.get(0).clone())?;
        compose_all(&[r1, cancel, drop_unit, tau_merge(k, x, mode)?])
    })
}

/// Φ₄″: Φ₃′-codomain ⇄ AR₁ × SGT(k), unsigned arrows.
pub fn phi4pp(k: &[i64], x: i64) -> Result<Sij> {
    need_n2(k, "phi4pp")?;
    static MEMO: Memo<(Vec<i64>, i64), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), x), || {
        let n = k.len();
        let mode = SignMode::Unsigned;
        let c3 = phi3p(k, x, mode)?.cod().clone();
        let r1 = relabel(c3, |e| {
            let (a, y) = rearranged(n, e);
            Elem::pair(Elem::arrows(&[a]), y)
        })?;
        let merge = product(&[identity(ar(1, mode)?), tau_merge(k, x, mode)?])?;
        compose(&r1, &merge)
    })
}

/// Γ_{k,x}: GMT(k) ⇄ SGT(k).
pub fn gamma_sij(k: &[i64], x: i64) -> Result<Sij> {
    if k.is_empty() {
        return iface("gamma needs n >= 1");
    }
    static MEMO: Memo<(Vec<i64>, i64), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), x), || {
        let mode = SignMode::Signed;
        if k.len() == 1 {
            let a = |x| Elem::arrows(&[x]);
            return from_pairs(
                gmt(k, mode)?,
                sgt(k, mode)?,
                [
                    (
                        (Side::Dom, a(Arrow::NW)),
                        (Side::Cod, Elem::pair(Elem::Atom(k[0]), Elem::Unit)),
                    ),
                    ((Side::Dom, a(Arrow::NE)), (Side::Dom, a(Arrow::NWNE))),
                ],
            );
        }
        let lower = fiberwise(gmt_index(k, mode)?, |t| gamma_sij(&t.get(0).ints(), x))?;
        compose_all(&[lower, phi1(k, x, mode)?, phi3p(k, x, mode)?, phi4p(k, x)?])
    })
}

pub fn gamma_limit(k: &[i64], dir: Limit) -> Result<Sij> {
    gamma_sij(
        k,
        match dir {
            Limit::PlusInfinity => x_plus(k),
            Limit::MinusInfinity => x_minus(k),
        },
    )
}

pub fn translate_seq(k: &[i64], t: i64) -> Vec<i64> {
    k.iter().map(|v| v + t).collect()
}

/// Checks f_t ∘ Γ_{k,±∞} = Γ_{f_t(k),±∞} ∘ f_t on every support element;
/// returns the first counterexample.
pub fn check_equivariance(k: &[i64], t: i64, dir: Limit) -> Result<Option<String>> {
    let g = gamma_limit(k, dir)?;
    let h = gamma_limit(&translate_seq(k, t), dir)?;
    for side in [Side::Dom, Side::Cod] {
        for e in g.set(side).support() {
            let (s1, y1) = g.apply(side, e)?;
            let (s2, y2) = h.apply(side, &e.translate(t))?;
            if s1 != s2 || y1.translate(t) != y2 {
                return Ok(Some(format!("{} {e} (t={t})", side.name())));
            }
        }
    }
    Ok(None)
}

/// GMT(k) ⇄ AR_n × SGT(k) in the unsigned-double-arrow convention.
/// Codomain elements Tuple[Tuple(μ), Tuple[A, T]].
pub fn gmt_ar_sgt(k: &[i64], x: i64) -> Result<Sij> {
    if k.is_empty() {
        return iface("gmt_ar_sgt needs n >= 1");
    }
    static MEMO: Memo<(Vec<i64>, i64), Sij> = Memo::new();
    MEMO.get_or((k.to_vec(), x), || {
        let mode = SignMode::Unsigned;
        let n = k.len();
        if n == 1 {
            let s = Elem::pair(Elem::Atom(k[0]), Elem::Unit);
            return relabel(gmt(k, mode)?, |e| Elem::pair(e.clone(), s.clone()));
        }
        let lower = fiberwise(gmt_index(k, mode)?, |t| gmt_ar_sgt(&t.get(0).ints(), x))?;
        let pull = relabel(lower.cod().clone(), |e| {
            let (nu, s) = (e.get(0).get(0), e.get(0).get(1));
            Elem::pair(nu.clone(), Elem::pair(s.clone(), e.get(1).clone()))
        })?;
        let id = || ar(n - 1, mode).map(identity);
        let p1 = product(&[id()?, phi1(k, x, mode)?])?;
        let p3 = product(&[id()?, phi3p(k, x, mode)?])?;
        let p4 = product(&[id()?, phi4pp(k, x)?])?;
        let join = relabel(p4.cod().clone(), |e| {
            let mut mu = e.get(0).arrow_seq();
            mu.extend(e.get(1).get(0).arrow_seq());
            Elem::pair(Elem::arrows(&mu), e.get(1).get(1).clone())
        })?;
        compose_all(&[lower, pull, p1, p3, p4, join])
    })
}

/// (η_u, η_v, η_w, η_{X_1}, …, η_{X_n}).
pub type Weights = Vec<i64>;

fn count(arrows: &[Arrow], a: Arrow) -> i64 {
    arrows.iter().filter(|&&b| b == a).count() as i64
}

pub fn weights_gmt(e: &Elem, k: &[i64]) -> Weights {
    let v = gmt_view(e, k);
    let all: Vec<Arrow> = v.arrows.concat();
    let mut w = vec![
        count(&all, Arrow::NE),
        count(&all, Arrow::NW),
        count(&all, Arrow::NWNE),
    ];
    let mut prev = 0;
    for (row, mu) in v.rows.iter().zip(&v.arrows) {
        let s: i64 = row.iter().sum();
        w.push(s - prev + count(mu, Arrow::NE) - count(mu, Arrow::NW));
        prev = s;
    }
    w
}

/// Weights of Tuple[Tuple(μ), Tuple[A, T]] ∈ AR_n × SGT(k).
pub fn weights_arsgt(e: &Elem, k: &[i64]) -> Weights {
    let mu = e.get(0).arrow_seq();
    let s = e.get(1);
    let t = ap_arrows(s.get(1));
    let mut w = vec![
        count(&mu, Arrow::NE) + count(&t, Arrow::SW),
        count(&mu, Arrow::NW) + count(&t, Arrow::SE),
        count(&mu, Arrow::NWNE) + count(&t, Arrow::SESW),
    ];
    let rows = gt_rows(s.get(0), &ap_apply(s.get(1), k));
    let mut prev = 0;
    for (row, a) in rows.iter().zip(&mu) {
        let sum: i64 = row.iter().sum();
        w.push(sum - prev + a.d_ne() - a.d_nw());
        prev = sum;
    }
    w
}

/// Names of the n+3 weighted statistics.
pub fn weight_names(n: usize) -> Vec<String> {
    let mut v: Vec<String> = ["eta_u", "eta_v", "eta_w"].map(String::from).to_vec();
    v.extend((1..=n).map(|i| format!("eta_X{i}")));
    v
}

/// The j-th weighted statistic on GMT(k) ⊔ (AR_n × SGT(k)).
pub fn weight_statistic(k: Vec<i64>, j: usize) -> Statistic {
    let k2 = k.clone();
    Statistic::sided(
        weight_names(k.len())[j].clone(),
        move |e| Ok(StatValue::Int(weights_gmt(e, &k)[j])),
        move |e| Ok(StatValue::Int(weights_arsgt(e, &k2)[j])),
    )
}

pub fn eta_top_statistic(k: Vec<i64>) -> Statistic {
    let k2 = k.clone();
    Statistic::sided(
        "eta_top",
        move |e| Ok(StatValue::Int(eta_top_gmt(e, &k))),
        move |e| Ok(StatValue::Int(eta_top_sgt(e, &k2))),
    )
}

pub fn eta_inv_statistic(k: Vec<i64>) -> Statistic {
    Statistic::sided(
        "eta_inv",
        move |e| Ok(StatValue::Int(eta_inv_gmt(e, &k))),
        |e| Ok(StatValue::Int(eta_inv_sgt(e))),
    )
}

/// Integer Laurent polynomial in u, v, w, X_1..X_n; zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    pub terms: BTreeMap<Vec<i64>, i64>,
}

impl LaurentPoly {
    pub fn add_term(&mut self, exps: Vec<i64>, coeff: i64) {
        let c = self.terms.entry(exps.clone()).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&exps);
        }
    }

    /// Value at u = v = w = X_i = 1.
    pub fn eval_ones(&self) -> i64 {
        self.terms.values().sum()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (exps, c) in self.terms.iter().rev() {
            let mut parts = Vec::new();
            for (name, &e) in ["u", "v", "w"].iter().zip(exps) {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            for (i, &e) in exps.iter().enumerate().skip(3) {
                if e != 0 {
                    parts.push(format!("X{}^{e}", i - 2));
                }
            }
            let mono = if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join(" ")
            };
            writeln!(f, "{c} {mono}")?;
        }
        Ok(())
    }
}

/// Σ_{S⁺} weight − Σ_{S⁻} weight.
pub fn weighted_sum(s: &SignedSet, weight: impl Fn(&Elem) -> Weights) -> LaurentPoly {
    let mut p = LaurentPoly::default();
    for (e, sign) in s.iter() {
        p.add_term(weight(e), sign as i64);
    }
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightedSide {
    Gmt,
    ArSgt,
}

pub fn weighted_side(k: &[i64], side: WeightedSide) -> Result<LaurentPoly> {
    if k.is_empty() {
        return iface("weighted sum needs n >= 1");
    }
    let mode = SignMode::Unsigned;
    Ok(match side {
        WeightedSide::Gmt => weighted_sum(&*gmt(k, mode)?, |e| weights_gmt(e, k)),
        WeightedSide::ArSgt => {
            let set = cartesian_product(&[&*ar(k.len(), mode)?, &*sgt(k, mode)?])?;
            weighted_sum(&set, |e| weights_arsgt(e, k))
        }
    })
}

/// Checks both weight relations on one weight vector.
pub fn weight_relations_hold(w: &Weights, k: &[i64]) -> bool {
    let n = k.len() as i64;
    let xs: i64 = w[3..].iter().sum();
    w[0] + w[1] + w[2] == n * (n + 1) / 2 && xs - w[0] + w[1] == k.iter().sum::<i64>()
}

/// Γ applied after ι_MT: the SGT(k) partner of an MT(k) element.
pub fn mt_to_sgt(k: &[i64], x: i64, e: &Elem) -> Result<Elem> {
    let (side, g) = crate::triangles::iota_mt(k)?.apply(Side::Dom, e)?;
    if side != Side::Cod {
        return Err(Error::Invariant("ι_MT mapped an MT element into MT".into()));
    }
    match gamma_sij(k, x)?.apply(Side::Dom, &g)? {
        (Side::Cod, s) => Ok(s),
        _ => Err(Error::Invariant(format!("{g} is cancelled inside GMT"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gt::gt_elem_from_rows;
    use crate::sijection::{pointwise_eq, verify};
    use crate::statistics::check_compatibility;

    #[test]
    fn gamma_base() {
        let g = gamma_sij(&[5], 9).unwrap();
        assert!(verify(&g).valid());
        assert_eq!(
            g.apply(Side::Dom, &Elem::arrows(&[Arrow::NW])).unwrap(),
            (Side::Cod, Elem::pair(Elem::Atom(5), Elem::Unit))
        );
        assert_eq!(
            g.apply(Side::Dom, &Elem::arrows(&[Arrow::NE])).unwrap(),
            (Side::Dom, Elem::arrows(&[Arrow::NWNE]))
        );
    }

    #[test]
    fn pipeline_pieces_small() {
        let k = [0, 2];
        for mode in [SignMode::Signed, SignMode::Unsigned] {
            assert!(verify(&phi1(&k, 4, mode).unwrap()).valid());
            assert!(verify(&phi3p(&k, 4, mode).unwrap()).valid());
        }
        assert!(verify(&phi4p(&k, 4).unwrap()).valid());
        assert!(verify(&phi4pp(&k, 4).unwrap()).valid());
        let g = gamma_sij(&k, 4).unwrap();
        assert!(verify(&g).valid());
        assert!(check_compatibility(&g, &eta_top_statistic(k.to_vec())).compatible());
        assert!(check_compatibility(&g, &eta_inv_statistic(k.to_vec())).compatible());
        assert!(matches!(
            phi1(&[3], 4, SignMode::Signed),
            Err(Error::Interface(_))
        ));
    }

    #[test]
    fn gamma_135() {
        let k = [1, 3, 5];
        let g = gamma_sij(&k, 9).unwrap();
        assert!(verify(&g).valid());
        assert!(check_compatibility(&g, &eta_top_statistic(k.to_vec())).compatible());
        assert!(check_compatibility(&g, &eta_inv_statistic(k.to_vec())).compatible());
        let e = gt_elem_from_rows(&[vec![2], vec![1, 4], vec![1, 3, 5]]);
        let s = mt_to_sgt(&k, x_plus(&k), &e).unwrap();
        assert_eq!(eta_inv_sgt(&s), 1);
    }

    #[test]
    fn involution_and_rearrangement() {
        use Arrow::*;
        // n = 4 pattern over AP_3; involution at i = 1 then back.
        let t = ap_from(3, |p, q| [SE, SW, SESW][(p + q) % 3]);
        let mu = vec![NW, NE, NWNE, NE];
        let (mu2, t2) = omega2_involution(4, 1, &mu, &t);
        let (mu3, t3) = omega2_involution(4, 1, &mu2, &t2);
        assert_eq!((mu3, t3), (mu.clone(), t.clone()));
        let k = [2, 5, 1, 4];
        let c = c_vector(&t, 3);
        let c2 = c_vector(&t2, 3);
        assert_eq!(mid_value(&k, &mu, &c, 1, 1), mid_value(&k, &mu2, &c2, 2, 0));
        assert_eq!(mid_value(&k, &mu, &c, 2, 0), mid_value(&k, &mu2, &c2, 1, 1));
        // Ψ_{5,3}: the second row of T′ is (r(μ_2), t_{2,3}, t_{2,4}).
        let t4 = ap_from(4, |p, q| [SE, SW, SESW][(p * q) % 3]);
        let mu5 = vec![NW, NE, NWNE, NE, NW];
        let (a, tp) = psi_rearrange(5, 3, &mu5, &t4);
        assert_eq!(a, NWNE);
        assert_eq!(ap_get(&tp, 1, 3), NW.reverse());
        assert_eq!(ap_get(&tp, 2, 3), NE.reverse());
        assert_eq!(ap_get(&tp, 3, 4), NE.reverse());
        assert_eq!(ap_get(&tp, 3, 5), NW.reverse());
        assert_eq!(ap_get(&tp, 2, 4), ap_get(&t4, 2, 3));
        assert_eq!(ap_get(&tp, 2, 5), ap_get(&t4, 2, 4));
        assert_eq!(ap_get(&tp, 4, 5), ap_get(&t4, 3, 4));
        assert_eq!(ap_get(&tp, 1, 2), ap_get(&t4, 1, 2));
    }

    #[test]
    fn limits_and_translation() {
        let k = [0, 2];
        let base = gamma_sij(&k, x_plus(&k)).unwrap();
        assert_eq!(
            pointwise_eq(&base, &gamma_sij(&k, x_plus(&k) + 1).unwrap()).unwrap(),
            None
        );
        let low = gamma_sij(&k, x_minus(&k)).unwrap();
        assert_eq!(
            pointwise_eq(&low, &gamma_sij(&k, x_minus(&k) - 2).unwrap()).unwrap(),
            None
        );
        assert_eq!(
            check_equivariance(&k, 1, Limit::PlusInfinity).unwrap(),
            None
        );
        assert_eq!(
            check_equivariance(&k, 0, Limit::MinusInfinity).unwrap(),
            None
        );
    }

    #[test]
    fn weighted_small() {
        let p = weighted_side(&[0], WeightedSide::Gmt).unwrap();
        assert_eq!(p.to_string(), "1 u X1^1\n1 v X1^-1\n1 w\n");
        assert_eq!(p, weighted_side(&[0], WeightedSide::ArSgt).unwrap());
        for k in [vec![0, 2], vec![2, 0], vec![1, 1, 3]] {
            let a = weighted_side(&k, WeightedSide::Gmt).unwrap();
            assert_eq!(a, weighted_side(&k, WeightedSide::ArSgt).unwrap(), "{k:?}");
            assert_eq!(a.eval_ones(), gmt(&k, SignMode::Unsigned).unwrap().size());
        }
        let k = vec![0, 2];
        let f = gmt_ar_sgt(&k, 4).unwrap();
        assert!(verify(&f).valid());
        for j in 0..5 {
            assert!(
                check_compatibility(&f, &weight_statistic(k.clone(), j)).compatible(),
                "{j}"
            );
        }
        for e in f.dom().support() {
            assert!(weight_relations_hold(&weights_gmt(e, &k), &k));
        }
        for e in f.cod().support() {
            assert!(weight_relations_hold(&weights_arsgt(e, &k), &k));
        }
    }
}
