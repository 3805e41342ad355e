//! Alternating sign matrices, monotone triangles, arrow rows and patterns,
//! GMT and SGT signed sets, ι_MT and the transfer-matrix multiplicities.

use crate::elem::{Arrow, Elem};
use crate::error::{iface, Error, Result};
use crate::gt::{box_set, gt, gt_rows, is_classical_profile};
use crate::memo::Memo;
use crate::signed::{cartesian_product, check_budget, indexed_union, SignedSet};
use crate::sijection::{from_pairs, Side, Sided, Sij};
use crate::statistics::{StatValue, Statistic};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Whether double arrows count negatively (inclusion-exclusion signs) or
/// every arrow configuration is positive (weighted enumeration).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignMode {
    Signed,
    Unsigned,
}

impl SignMode {
    pub fn arrow_sign(self, a: Arrow) -> i8 {
        match self {
            SignMode::Signed if a.is_double() => -1,
            _ => 1,
        }
    }
}

pub type Matrix = Vec<Vec<i64>>;

pub fn is_asm(a: &Matrix) -> bool {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return false;
    }
    let line_ok = |v: &mut dyn Iterator<Item = i64>| {
        let mut last = -1;
        let mut sum = 0;
        for x in v {
            match x {
                0 => {}
                1 | -1 => {
                    if x == last {
                        return false;
                    }
                    last = x;
                    sum += x;
                }
                _ => return false,
            }
        }
        sum == 1
    };
    (0..n).all(|i| line_ok(&mut a[i].iter().copied()) && line_ok(&mut (0..n).map(|r| a[r][i])))
}

/// All n×n alternating sign matrices, in lexicographic row order.
pub fn asm_enumerate(n: usize) -> Result<Vec<Matrix>> {
    if n > 5 {
        return Err(Error::Budget {
            what: "ASM enumeration".into(),
            needed: n,
            budget: 5,
        });
    }
    // Rows are built from column partial sums c ∈ {0,1}^n: row i of the
    // matrix is c_i − c_{i−1}, and c_i has exactly i ones.
    fn rec(n: usize, prev: &[i64], acc: &mut Matrix, out: &mut Vec<Matrix>) {
        let i = acc.len();
        if i == n {
            out.push(acc.clone());
            return;
        }
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != i + 1 {
                continue;
            }
            let c: Vec<i64> = (0..n).map(|j| ((mask >> (n - 1 - j)) & 1) as i64).collect();
            let row: Vec<i64> = (0..n).map(|j| c[j] - prev[j]).collect();
            let mut partial = 0;
            if row.iter().all(|&x| {
                partial += x;
                partial == 0 || partial == 1
            }) && partial == 1
            {
                acc.push(row);
                rec(n, &c, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &vec![0; n], &mut Vec::new(), &mut out);
    Ok(out)
}

/// Column partial sums, positions of ones, then the j−1 shift for the
/// half-open convention.  Rows top first.
pub fn asm_to_mt(a: &Matrix) -> Result<Vec<Vec<i64>>> {
    if !is_asm(a) {
        return iface("not an alternating sign matrix");
    }
    let n = a.len();
    let mut c = vec![0i64; n];
    let mut rows = Vec::with_capacity(n);
    for r in a {
        for j in 0..n {
            c[j] += r[j];
        }
        let row: Vec<i64> = (0..n)
            .filter(|&j| c[j] == 1)
            .enumerate()
            .map(|(pos, j)| (j + 1 + pos) as i64)
            .collect();
        rows.push(row);
    }
    Ok(rows)
}

pub fn mt_to_asm(rows: &[Vec<i64>]) -> Result<Matrix> {
    let n = rows.len();
    let bottom: Vec<i64> = (0..n as i64).map(|j| 2 * j + 1).collect();
    if rows.last() != Some(&bottom) || !is_mt_rows(rows) {
        return iface("not a monotone triangle with bottom row 1,3,…,2n−1");
    }
    let mut prev = vec![0i64; n];
    let mut a = Vec::with_capacity(n);
    for r in rows {
        let mut c = vec![0i64; n];
        for (pos, &b) in r.iter().enumerate() {
            c[(b - pos as i64 - 1) as usize] = 1;
        }
        a.push((0..n).map(|j| c[j] - prev[j]).collect());
        prev = c;
    }
    Ok(a)
}

/// Whitespace-separated integers, one matrix row per line.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad entry {t:?}")))
                })
                .collect()
        })
        .collect()
}

pub fn eta_inv_asm(a: &Matrix) -> i64 {
    let n = a.len();
    let mut total = 0;
    for i in 0..n {
        for i2 in i + 1..n {
            for j in 0..n {
                for j2 in 0..=j {
                    total += a[i][j] * a[i2][j2];
                }
            }
        }
    }
    total
}

/// #{(i,j): b_{i+1,j} ≤ b_{i,j} = b_{i+1,j+1} − 1}, rows top first.
pub fn eta_inv_mt(rows: &[Vec<i64>]) -> i64 {
    rows.windows(2)
        .map(|w| {
            (0..w[0].len())
                .filter(|&j| w[1][j] <= w[0][j] && w[0][j] == w[1][j + 1] - 1)
                .count() as i64
        })
        .sum()
}

/// A classical pattern whose rows above the bottom have gaps of at least 2.
pub fn is_mt_rows(rows: &[Vec<i64>]) -> bool {
    is_classical_profile(rows)
        && rows[..rows.len().saturating_sub(1)]
            .iter()
            .all(|r| r.windows(2).all(|w| w[0] < w[1] - 1))
}

pub fn is_strictly_increasing(k: &[i64]) -> bool {
    k.windows(2).all(|w| w[0] < w[1])
}

/// MT(k) inside GT(k); empty unless k is strictly increasing.
pub fn mt(k: &[i64]) -> Result<Arc<SignedSet>> {
    static MEMO: Memo<Vec<i64>, Arc<SignedSet>> = Memo::new();
    MEMO.get_or(k.to_vec(), || {
        if !is_strictly_increasing(k) {
            return Ok(Arc::new(SignedSet::empty()));
        }
        let all = gt(k)?;
        Ok(Arc::new(SignedSet::from_signed(
            all.iter()
                .filter(|(e, _)| is_mt_rows(&gt_rows(e, k)))
                .map(|(e, s)| (e.clone(), s)),
        )?))
    })
}

fn arrow_factor(mode: SignMode, arrows: [Arrow; 3]) -> SignedSet {
    SignedSet::from_signed(arrows.map(|a| (Elem::Arrow(a), mode.arrow_sign(a))))
        .expect("three distinct arrows")
}

/// AR_n with elements Tuple(μ_1..μ_n).
pub fn ar(n: usize, mode: SignMode) -> Result<Arc<SignedSet>> {
    static MEMO: Memo<(usize, SignMode), Arc<SignedSet>> = Memo::new();
    MEMO.get_or((n, mode), || {
        let f = arrow_factor(mode, Arrow::ROW);
        Ok(Arc::new(cartesian_product(&vec![&f; n])?))
    })
}

/// AP_n with elements Tuple[D_1, …, D_{n−1}], D_d = Tuple(t_{1,1+d}, …,
/// t_{n−d,n}); AP_1 = {Unit}.
pub fn ap(n: usize, mode: SignMode) -> Result<Arc<SignedSet>> {
    static MEMO: Memo<(usize, SignMode), Arc<SignedSet>> = Memo::new();
    MEMO.get_or((n, mode), || {
        let f = arrow_factor(mode, Arrow::PATTERN);
        let diags = (1..n)
            .map(|d| cartesian_product(&vec![&f; n - d]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(cartesian_product(
            &diags.iter().collect::<Vec<_>>(),
        )?))
    })
}

/// t_{i,j}, 1 ≤ i < j ≤ n.
pub fn ap_get(t: &Elem, i: usize, j: usize) -> Arrow {
    t.get(j - i - 1).get(i - 1).arrow()
}

pub fn ap_from(n: usize, f: impl Fn(usize, usize) -> Arrow) -> Elem {
    if n <= 1 {
        return Elem::Unit;
    }
    Elem::tup(
        (1..n)
            .map(|d| Elem::arrows(&(1..=n - d).map(|i| f(i, i + d)).collect::<Vec<_>>()))
            .collect(),
    )
}

pub fn ap_arrows(t: &Elem) -> Vec<Arrow> {
    match t {
        Elem::Unit => vec![],
        _ => t.items().iter().flat_map(|d| d.arrow_seq()).collect(),
    }
}

pub fn c_vector(t: &Elem, n: usize) -> Vec<i64> {
    (1..=n)
        .map(|i| {
            let sw: i64 = (i + 1..=n).map(|j| ap_get(t, i, j).d_sw()).sum();
            let se: i64 = (1..i).map(|j| ap_get(t, j, i).d_se()).sum();
            sw - se
        })
        .collect()
}

pub fn ap_apply(t: &Elem, k: &[i64]) -> Vec<i64> {
    c_vector(t, k.len())
        .iter()
        .zip(k)
        .map(|(c, x)| c + x)
        .collect()
}

/// Bounds of μ(k) = ∏ [k_i + δ↗(μ_i), k_{i+1} − δ↖(μ_{i+1})).
pub fn mu_bounds(mu: &[Arrow], k: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let n = k.len();
    let lo = (0..n - 1).map(|i| k[i] + mu[i].d_ne()).collect();
    let hi = (0..n - 1).map(|i| k[i + 1] - mu[i + 1].d_nw()).collect();
    (lo, hi)
}

pub fn mu_apply(mu: &[Arrow], k: &[i64]) -> Result<SignedSet> {
    if mu.len() != k.len() {
        return iface("arrow row and sequence lengths differ");
    }
    let (lo, hi) = mu_bounds(mu, k);
    box_set(&lo, &hi)
}

/// ⊔_{μ∈AR_n} μ(k), elements Tuple[Tuple(l), μ].
pub fn gmt_index(k: &[i64], mode: SignMode) -> Result<Arc<SignedSet>> {
    static MEMO: Memo<(Vec<i64>, SignMode), Arc<SignedSet>> = Memo::new();
    MEMO.get_or((k.to_vec(), mode), || {
        Ok(Arc::new(indexed_union(&*ar(k.len(), mode)?, |mu| {
            mu_apply(&mu.arrow_seq(), k)
        })?))
    })
}

/// GMT(k): AR_1 for n = 1 (elements Tuple[a]), otherwise elements
/// Tuple[g, Tuple[Tuple(l), μ]] with g ∈ GMT(l).
pub fn gmt(k: &[i64], mode: SignMode) -> Result<Arc<SignedSet>> {
    if k.is_empty() {
        return iface("GMT needs n >= 1");
    }
    static MEMO: Memo<(Vec<i64>, SignMode), Arc<SignedSet>> = Memo::new();
    MEMO.get_or((k.to_vec(), mode), || {
        if k.len() == 1 {
            return ar(1, mode);
        }
        let idx = gmt_index(k, mode)?;
        Ok(Arc::new(indexed_union(&idx, |t| {
            gmt(&t.get(0).ints(), mode).map(|s| (*s).clone())
        })?))
    })
}

/// Rows k^(1)..k^(n) and arrow rows μ^(1)..μ^(n) of a GMT element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GmtView {
    pub rows: Vec<Vec<i64>>,
    pub arrows: Vec<Vec<Arrow>>,
}

pub fn gmt_view(e: &Elem, k: &[i64]) -> GmtView {
    if k.len() == 1 {
        return GmtView {
            rows: vec![k.to_vec()],
            arrows: vec![e.arrow_seq()],
        };
    }
    let t = e.get(1);
    let mut v = gmt_view(e.get(0), &t.get(0).ints());
    v.rows.push(k.to_vec());
    v.arrows.push(t.get(1).arrow_seq());
    v
}

pub fn gmt_elem(view: &GmtView) -> Elem {
    let mut e = Elem::arrows(&view.arrows[0]);
    for i in 1..view.rows.len() {
        e = Elem::pair(
            e,
            Elem::pair(
                Elem::atoms(&view.rows[i - 1]),
                Elem::arrows(&view.arrows[i]),
            ),
        );
    }
    e
}

pub fn eta_inv_ar(mu: &[Arrow]) -> i64 {
    mu.iter().map(|a| a.d_ne()).sum()
}

pub fn eta_inv_gmt(e: &Elem, k: &[i64]) -> i64 {
    gmt_view(e, k).arrows.iter().map(|m| eta_inv_ar(m)).sum()
}

pub fn eta_top_gmt(e: &Elem, k: &[i64]) -> i64 {
    gmt_view(e, k).rows[0][0]
}

/// SGT(k) = ⊔_{T∈AP_n} GT(T(k)), elements Tuple[A, T].
pub fn sgt(k: &[i64], mode: SignMode) -> Result<Arc<SignedSet>> {
    static MEMO: Memo<(Vec<i64>, SignMode), Arc<SignedSet>> = Memo::new();
    MEMO.get_or((k.to_vec(), mode), || {
        Ok(Arc::new(indexed_union(&*ap(k.len(), mode)?, |t| {
            gt(&ap_apply(t, k)).map(|s| (*s).clone())
        })?))
    })
}

pub fn sgt_rows(e: &Elem, k: &[i64]) -> Vec<Vec<i64>> {
    gt_rows(e.get(0), &ap_apply(e.get(1), k))
}

pub fn eta_inv_sgt(e: &Elem) -> i64 {
    ap_arrows(e.get(1)).iter().map(|a| a.d_sw()).sum()
}

pub fn eta_top_sgt(e: &Elem, k: &[i64]) -> i64 {
    sgt_rows(e, k)[0][0]
}

/// The arrow row singled out for the second bottom row l.
pub fn mu_l(k: &[i64], l: &[i64]) -> Vec<Arrow> {
    (0..k.len())
        .map(|i| {
            if i >= 1 && k[i] == l[i - 1] + 1 {
                Arrow::NE
            } else {
                Arrow::NW
            }
        })
        .collect()
}

fn toggle_nw(a: Arrow) -> Option<Arrow> {
    match a {
        Arrow::NE => Some(Arrow::NWNE),
        Arrow::NWNE => Some(Arrow::NE),
        _ => None,
    }
}

/// MT elements and signed GMT elements sharing one second bottom row.
type MtGroup = (Vec<Elem>, Vec<(Elem, i8)>);

/// ι_MT: MT(k) ⇄ GMT(k) for strictly increasing k.
pub fn iota_mt(k: &[i64]) -> Result<Sij> {
    if k.is_empty() || !is_strictly_increasing(k) {
        return iface(format!(
            "iota_mt needs a strictly increasing bottom row, got {k:?}"
        ));
    }
    static MEMO: Memo<Vec<i64>, Sij> = Memo::new();
    MEMO.get_or(k.to_vec(), || iota_mt_build(k))
}

fn iota_mt_build(k: &[i64]) -> Result<Sij> {
    let n = k.len();
    let dom = mt(k)?;
    let cod = gmt(k, SignMode::Signed)?;
    if n == 1 {
        let a = |x| Elem::arrows(&[x]);
        return from_pairs(
            dom,
            cod,
            [
                ((Side::Dom, Elem::Atom(k[0])), (Side::Cod, a(Arrow::NW))),
                ((Side::Cod, a(Arrow::NE)), (Side::Cod, a(Arrow::NWNE))),
            ],
        );
    }
    check_budget("iota_mt", cod.len() + dom.len())?;
    // Group both sides by the second bottom row.
    let mut groups: BTreeMap<Vec<i64>, MtGroup> = BTreeMap::new();
    for e in dom.support() {
        let rows = gt_rows(e, k);
        groups
            .entry(rows[n - 2].clone())
            .or_default()
            .0
            .push(e.clone());
    }
    for (e, s) in cod.iter() {
        groups
            .entry(e.get(1).get(0).ints())
            .or_default()
            .1
            .push((e.clone(), s));
    }
    let mut pairs: Vec<(Sided, Sided)> = Vec::new();
    for (l, (mts, gmts)) in &groups {
        match toggle_pairs(k, l, gmts)? {
            Some(p) => pairs.extend(p),
            None => pairs.extend(balanced_pairs(k, mts, gmts)?),
        }
    }
    from_pairs(dom, cod, pairs)
}

/// The toggle rule on the arrow row, recursing through ι_MT(l) at μ_l.
/// Returns None when the group does not have the shape the rule needs.
fn toggle_pairs(k: &[i64], l: &[i64], gmts: &[(Elem, i8)]) -> Result<Option<Vec<(Sided, Sided)>>> {
    let n = k.len();
    let gapped = l.len() < 2 || l.windows(2).all(|w| w[0] < w[1] - 1);
    let interlaced = (0..n - 1).all(|j| k[j] <= l[j] && l[j] < k[j + 1]);
    if !gapped || !interlaced {
        return Ok(None);
    }
    let ml = mu_l(k, l);
    let mu_signs: HashMap<Vec<Arrow>, i8> = gmts
        .iter()
        .map(|(e, s)| (e.get(1).get(1).arrow_seq(), s * sub_sign(e)))
        .collect();
    if mu_signs.get(&ml) != Some(&1) {
        return Ok(None);
    }
    let partner_mu = |mu: &[Arrow]| -> Option<Vec<Arrow>> {
        let i = (0..n).find(|&i| mu[i] != ml[i])?;
        let mut m = mu.to_vec();
        m[i] = toggle_nw(mu[i])?;
        Some(m)
    };
    for (mu, s) in &mu_signs {
        if *mu == ml {
            continue;
        }
        match partner_mu(mu) {
            Some(p) if mu_signs.get(&p) == Some(&-s) => {}
            _ => return Ok(None),
        }
    }
    let sub = iota_mt(l)?;
    let lt = Elem::atoms(l);
    let mut pairs = Vec::new();
    for (e, _) in gmts {
        let (g, mu) = (e.get(0), e.get(1).get(1).arrow_seq());
        if mu != ml {
            let p = partner_mu(&mu).expect("checked above");
            let other = Elem::pair(g.clone(), Elem::pair(lt.clone(), Elem::arrows(&p)));
            if e < &other {
                pairs.push(((Side::Cod, e.clone()), (Side::Cod, other)));
            }
            continue;
        }
        let (side, img) = sub.apply(Side::Cod, g)?;
        let other = match side {
            Side::Cod => (
                Side::Cod,
                Elem::pair(img, Elem::pair(lt.clone(), Elem::arrows(&ml))),
            ),
            Side::Dom => (Side::Dom, Elem::pair(img, lt.clone())),
        };
        if other.0 == Side::Dom || (Side::Cod, e.clone()) < other {
            pairs.push(((Side::Cod, e.clone()), other));
        }
    }
    Ok(Some(pairs))
}

/// Sign of the fiber element g inside a GMT element Tuple[g, t].
fn sub_sign(e: &Elem) -> i8 {
    let t = e.get(1);
    let l = t.get(0).ints();
    let g = e.get(0);
    gmt(&l, SignMode::Signed)
        .ok()
        .and_then(|s| s.sign(g))
        .unwrap_or(1)
}

/// Fallback: pair P-class with N-class elements inside each (η_MT, η_inv)
/// class, then inside each η_MT class.
fn balanced_pairs(k: &[i64], mts: &[Elem], gmts: &[(Elem, i8)]) -> Result<Vec<(Sided, Sided)>> {
    type Key = (Vec<Vec<i64>>, i64);
    let mut pos: BTreeMap<Key, Vec<Sided>> = BTreeMap::new();
    let mut neg: BTreeMap<Key, Vec<Sided>> = BTreeMap::new();
    for e in mts {
        let rows = gt_rows(e, k);
        let key = (rows.clone(), eta_inv_mt(&rows));
        pos.entry(key).or_default().push((Side::Dom, e.clone()));
    }
    for (e, s) in gmts {
        let v = gmt_view(e, k);
        let key = (v.rows, v.arrows.iter().map(|m| eta_inv_ar(m)).sum());
        let bucket = if *s < 0 { &mut pos } else { &mut neg };
        bucket.entry(key).or_default().push((Side::Cod, e.clone()));
    }
    let mut pairs = Vec::new();
    let mut left_p: BTreeMap<Vec<Vec<i64>>, Vec<Sided>> = BTreeMap::new();
    let mut left_n: BTreeMap<Vec<Vec<i64>>, Vec<Sided>> = BTreeMap::new();
    let keys: Vec<Key> = pos.keys().chain(neg.keys()).cloned().collect();
    for key in keys {
        let mut p = pos.remove(&key).unwrap_or_default();
        let mut q = neg.remove(&key).unwrap_or_default();
        let m = p.len().min(q.len());
        for (a, b) in p.drain(..m).zip(q.drain(..m)) {
            pairs.push((a, b));
        }
        left_p.entry(key.0.clone()).or_default().extend(p);
        left_n.entry(key.0).or_default().extend(q);
    }
    for (rows, p) in left_p {
        let q = left_n.remove(&rows).unwrap_or_default();
        if p.len() != q.len() {
            return Err(Error::Invariant(format!(
                "GMT({k:?}) rows {rows:?} do not balance ({} vs {})",
                p.len(),
                q.len()
            )));
        }
        pairs.extend(p.into_iter().zip(q));
    }
    Ok(pairs)
}

/// η_MT on MT(k) ⊔ GMT(k).
pub fn eta_mt_statistic(k: Vec<i64>) -> Statistic {
    let k2 = k.clone();
    Statistic::sided(
        "eta_MT",
        move |e| Ok(StatValue::MultiSeq(gt_rows(e, &k))),
        move |e| Ok(StatValue::MultiSeq(gmt_view(e, &k2).rows)),
    )
}

/// η_inv on MT(k) ⊔ GMT(k).
pub fn eta_inv_mt_statistic(k: Vec<i64>) -> Statistic {
    let k2 = k.clone();
    Statistic::sided(
        "eta_inv",
        move |e| Ok(StatValue::Int(eta_inv_mt(&gt_rows(e, &k)))),
        move |e| Ok(StatValue::Int(eta_inv_gmt(e, &k2))),
    )
}

type Mat2 = [[i64; 2]; 2];

pub const A1: Mat2 = [[0, 1], [0, 1]];
pub const A2: Mat2 = [[1, 0], [0, 0]];
pub const A3: Mat2 = [[1, 0], [1, 0]];
pub const A4: Mat2 = [[0, 1], [-1, 1]];
pub const A5: Mat2 = [[1, -1], [1, -1]];
pub const A6: Mat2 = [[0, 0], [1, 0]];
pub const O: Mat2 = [[0, 0], [0, 0]];

fn neg(m: Mat2) -> Mat2 {
    m.map(|r| r.map(|x| -x))
}

/// T_j chosen by the relation between k_j, k_{j+1} and l_j.
pub fn transfer_matrix(kj: i64, kj1: i64, lj: i64) -> Mat2 {
    if kj1 >= kj + 2 {
        if lj == kj {
            A1
        } else if lj == kj1 - 1 {
            A2
        } else if kj < lj && lj < kj1 - 1 {
            A3
        } else {
            O
        }
    } else if kj1 == kj + 1 {
        if lj == kj {
            A4
        } else {
            O
        }
    } else if lj == kj {
        neg(A5)
    } else if lj == kj1 - 1 {
        neg(A6)
    } else if kj1 - 1 < lj && lj < kj {
        neg(A3)
    } else {
        O
    }
}

/// #M_{k,l} = (1 0) T_{n−1} ⋯ T_1 (1 1)ᵗ.
pub fn m_multiplicity(k: &[i64], l: &[i64]) -> Result<i64> {
    if k.is_empty() || l.len() + 1 != k.len() {
        return iface("m_multiplicity needs |l| = |k| − 1");
    }
    let mut v = [1i64, 1];
    for j in 0..l.len() {
        let t = transfer_matrix(k[j], k[j + 1], l[j]);
        v = [
            t[0][0] * v[0] + t[0][1] * v[1],
            t[1][0] * v[0] + t[1][1] * v[1],
        ];
    }
    Ok(v[0])
}

pub fn is_partially_successive(m: &[i64]) -> bool {
    m.windows(3).any(|w| w[0] == w[1] - 1 && w[1] == w[2] - 1)
}

/// Whether some chain m^(1) ≺' ⋯ ≺' m exists, with l ≺' k iff #M_{k,l} ≠ 0.
pub fn mt_prime_nonempty(m: &[i64]) -> Result<bool> {
    if m.len() == 1 {
        return Ok(true);
    }
    static MEMO: Memo<Vec<i64>, bool> = Memo::new();
    MEMO.get_or(m.to_vec(), || {
        // Nonzero transfer matrices need l_j within one of [k_j, k_{j+1}].
        let ranges: Vec<(i64, i64)> = m
            .windows(2)
            .map(|w| (w[0].min(w[1]) - 1, w[0].max(w[1]) + 1))
            .collect();
        let mut l: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            if m_multiplicity(m, &l)? != 0 && mt_prime_nonempty(&l)? {
                return Ok(true);
            }
            let mut j = 0;
            loop {
                if j == l.len() {
                    return Ok(false);
                }
                if l[j] < ranges[j].1 {
                    l[j] += 1;
                    break;
                }
                l[j] = ranges[j].0;
                j += 1;
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sijection::verify;
    use crate::statistics::check_compatibility;

    fn intro_asm() -> Matrix {
        vec![
            vec![0, 0, 1, 0],
            vec![1, 0, -1, 1],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
        ]
    }

    #[test]
    fn asm_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| asm_enumerate(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 7, 42]);
        assert_eq!(asm_enumerate(1).unwrap(), vec![vec![vec![1]]]);
        assert!(is_asm(&intro_asm()));
        assert!(!is_asm(&vec![vec![1, 0], vec![1, 0]]));
        assert_eq!(eta_inv_asm(&intro_asm()), 2);
    }

    #[test]
    fn asm_mt_examples() {
        let a = vec![
            vec![0, 0, 1, 0],
            vec![1, 0, -1, 1],
            vec![0, 0, 1, 0],
            vec![0, 1, 0, 0],
        ];
        let rows = asm_to_mt(&a).unwrap();
        assert_eq!(
            rows,
            vec![vec![3], vec![1, 5], vec![1, 4, 6], vec![1, 3, 5, 7]]
        );
        assert_eq!(mt_to_asm(&rows).unwrap(), a);
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(
            asm_to_mt(&id).unwrap(),
            vec![vec![1], vec![1, 3], vec![1, 3, 5]]
        );
        for a in asm_enumerate(4).unwrap() {
            let rows = asm_to_mt(&a).unwrap();
            assert_eq!(mt_to_asm(&rows).unwrap(), a);
            assert_eq!(eta_inv_asm(&a), eta_inv_mt(&rows));
        }
        assert_eq!(mt(&[1, 3, 5, 7]).unwrap().size(), 42);
    }

    #[test]
    fn arrow_actions() {
        use Arrow::*;
        let s = mu_apply(&[NW, NWNE, NE], &[1, 3, 5]).unwrap();
        assert_eq!(s, SignedSet::singleton(Elem::atoms(&[1, 4]), 1));
        assert_eq!(mu_apply(&[NE, NW], &[0, 0]).unwrap().size(), -2);
        assert_eq!(mu_apply(&[NW], &[4]).unwrap(), SignedSet::unit());
        let t = Elem::tup(vec![
            Elem::arrows(&[SE, SESW, SW]),
            Elem::arrows(&[SESW, SW]),
            Elem::arrows(&[SW]),
        ]);
        assert_eq!(c_vector(&t, 4), vec![2, 1, -1, 0]);
        assert_eq!(ap_apply(&t, &[3, 1, 4, 1]), vec![5, 2, 3, 1]);
        assert_eq!(ap_from(4, |i, j| ap_get(&t, i, j)), t);
        let all_se = ap_from(4, |_, _| SE);
        assert_eq!(c_vector(&all_se, 4), vec![0, -1, -2, -3]);
        assert_eq!(c_vector(&Elem::Unit, 1), vec![0]);
    }

    #[test]
    fn gmt_and_sgt_examples() {
        use Arrow::*;
        let g = gmt(&[7], SignMode::Signed).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(eta_top_gmt(&Elem::arrows(&[NE]), &[7]), 7);
        assert_eq!(sgt(&[7], SignMode::Signed).unwrap().size(), 1);
        let view = GmtView {
            rows: vec![vec![2], vec![1, 4], vec![1, 3, 5]],
            arrows: vec![vec![NW], vec![NWNE, NWNE], vec![NW, NWNE, NE]],
        };
        let e = gmt_elem(&view);
        let set = gmt(&[1, 3, 5], SignMode::Signed).unwrap();
        assert_eq!(set.sign(&e), Some(-1));
        assert_eq!(gmt_view(&e, &[1, 3, 5]), view);
        // Sign from the definitions: (−1)^{#SESW} = (−1)^2 for the pattern
        // and the sign of the GT element over (5,2,3,1).
        let t = Elem::tup(vec![
            Elem::arrows(&[SE, SESW, SW]),
            Elem::arrows(&[SESW, SW]),
            Elem::arrows(&[SW]),
        ]);
        let a =
            crate::gt::gt_elem_from_rows(&[vec![2], vec![3, 1], vec![4, 2, 1], vec![5, 2, 3, 1]]);
        let sg = sgt(&[3, 1, 4, 1], SignMode::Signed).unwrap();
        let x = Elem::pair(a, t);
        assert_eq!(sg.sign(&x), Some(-1));
        assert_eq!(eta_top_sgt(&x, &[3, 1, 4, 1]), 2);
        let t2 = Elem::tup(vec![Elem::arrows(&[SE, SESW]), Elem::arrows(&[SW])]);
        let a2 = crate::gt::gt_elem_from_rows(&[vec![3], vec![1, 4], vec![1, 5, 2]]);
        assert_eq!(eta_inv_sgt(&Elem::pair(a2, t2)), 2);
        for k in [[0, 0], [1, 3], [3, 0], [2, 1]] {
            let a = gmt(&k, SignMode::Signed).unwrap().size();
            let b = sgt(&k, SignMode::Signed).unwrap().size();
            assert_eq!(a, b, "{k:?}");
        }
    }

    #[test]
    fn iota_examples() {
        let f = iota_mt(&[4]).unwrap();
        assert!(verify(&f).valid());
        assert_eq!(
            f.apply(Side::Dom, &Elem::Atom(4)).unwrap(),
            (Side::Cod, Elem::arrows(&[Arrow::NW]))
        );
        for k in [vec![1, 3, 5], vec![0, 2], vec![0, 3, 4]] {
            let f = iota_mt(&k).unwrap();
            assert!(verify(&f).valid(), "{k:?}");
            assert!(check_compatibility(&f, &eta_mt_statistic(k.clone())).compatible());
        }
        let k = vec![1, 3, 5];
        assert!(check_compatibility(&iota_mt(&k).unwrap(), &eta_inv_mt_statistic(k)).compatible());
        assert!(matches!(iota_mt(&[2, 1]), Err(Error::Interface(_))));
    }

    fn brute_m(k: &[i64], l: &[i64]) -> i64 {
        ar(k.len(), SignMode::Signed)
            .unwrap()
            .iter()
            .map(|(mu, s)| {
                let set = mu_apply(&mu.arrow_seq(), k).unwrap();
                s as i64 * set.sign(&Elem::atoms(l)).unwrap_or(0) as i64
            })
            .sum()
    }

    #[test]
    fn transfer_examples() {
        assert_eq!(m_multiplicity(&[3, 1], &[0]).unwrap(), 0);
        assert_eq!(m_multiplicity(&[1, 3], &[1]).unwrap(), 1);
        for k in [[0, 2, 3], [3, 1, 1], [0, 1, 2], [2, 2, 4]] {
            for a in -1..5 {
                for b in -1..5 {
                    assert_eq!(m_multiplicity(&k, &[a, b]).unwrap(), brute_m(&k, &[a, b]));
                }
            }
        }
    }

    #[test]
    fn successive() {
        assert!(is_partially_successive(&[0, 1, 2]));
        assert!(!is_partially_successive(&[0, 1, 3]));
        assert!(!mt_prime_nonempty(&[0, 1, 2]).unwrap());
        assert!(mt_prime_nonempty(&[0, 2, 4]).unwrap());
    }
}
