//! The acceptance suite: eleven criteria, each reported as one outcome with
//! its own time limit.  Criteria 4 and 5 share one sweep over the
//! construction grid.

use crate::elem::Elem;
use crate::error::Result;
use crate::gamma::{
    check_equivariance, eta_inv_statistic, eta_top_statistic, gamma_sij, gmt_ar_sgt, phi1, phi3p,
    phi4p, phi4pp, translate_seq, weight_names, weight_relations_hold, weight_statistic,
    weighted_side, weights_arsgt, weights_gmt, x_minus, x_plus, Limit, WeightedSide,
};
use crate::gt::{
    beta, beta_normal_statistic, beta_uncached, check_partial_integrability,
    gamma_normal_statistic, gamma_row, ggt, ggt_param_sign, ggt_size_formula, gt, gt_rows,
    gt_size_formula, gt_upper_rows, indexed_gt_rows, is_classical_profile, pi, profile_counts,
    restricted_count, rho, rho_from_beta, rho_rows, sgn_seq, sigma, tau, GgtParams,
};
use crate::memo::Memo;
use crate::signed::{cartesian_product, SignedSet};
use crate::sijection::{
    compose, from_pairs, identity, interval_split, pointwise_eq, product, scramble, verify, Side,
    Sij,
};
use crate::statistics::{check_compatibility, StatValue, Statistic};
use crate::triangles::{
    ar, asm_enumerate, asm_to_mt, eta_inv_asm, eta_inv_mt, eta_inv_mt_statistic, eta_mt_statistic,
    gmt, iota_mt, is_partially_successive, is_strictly_increasing, m_multiplicity, mt,
    mt_prime_nonempty, mt_to_asm, mu_apply, SignMode,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    /// n ≤ 3 everywhere.
    Quick,
    /// n ≤ 4 where a criterion asks for it.
    Full,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub full: bool,
    /// Test hook: replaces π by a re-paired sijection in criterion 5.
    pub corrupt_pi: bool,
}

impl Options {
    fn level(&self) -> Level {
        if self.full {
            Level::Full
        } else {
            Level::Quick
        }
    }
}

/// A failed check: `key` names the instance, `detail` the witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub key: String,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub checked: usize,
    pub failures: Vec<Failure>,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.elapsed <= self.limit
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} {:>2} {} ({} checks, {:.1}s of {}s)",
            self.id,
            self.title,
            self.checked,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        );
        if self.elapsed > self.limit {
            s.push_str(" [time limit exceeded]");
        }
        for f in self.failures.iter().take(8) {
            let note = if is_known_unattainable(self.id, &f.key) {
                " [known unattainable]"
            } else {
                ""
            };
            s.push_str(&format!("\n     {}{note}: {}", f.key, f.detail));
        }
        if self.failures.len() > 8 {
            s.push_str(&format!("\n     … {} more", self.failures.len() - 8));
        }
        s
    }
}

/// Failure keys that no implementation can clear, with the reason.  For these
/// bottom rows the η_inv-graded signed counts of GMT(k) and MT(k) differ
/// (GMT − MT has +1 at η_inv = 3 and −1 at η_inv = 2), so no η_inv-compatible
/// sijection between them exists.
pub const KNOWN_UNATTAINABLE: &[(usize, &str, &str)] = &[
    (5, "iota_mt k=[0, 1, 2] eta_inv", GRADED_MISMATCH),
    (5, "iota_mt k=[0, 2, 3] eta_inv", GRADED_MISMATCH),
    (5, "iota_mt k=[0, 3, 4] eta_inv", GRADED_MISMATCH),
    (5, "iota_mt k=[1, 2, 3] eta_inv", GRADED_MISMATCH),
    (5, "iota_mt k=[1, 3, 4] eta_inv", GRADED_MISMATCH),
    (5, "iota_mt k=[2, 3, 4] eta_inv", GRADED_MISMATCH),
];

const GRADED_MISMATCH: &str = "eta_inv-graded signed counts of GMT(k) and MT(k) differ";

pub fn is_known_unattainable(id: usize, key: &str) -> bool {
    KNOWN_UNATTAINABLE
        .iter()
        .any(|(c, k, _)| *c == id && *k == key)
}

pub const TITLES: [&str; 11] = [
    "enumeration formula",
    "restricted counts",
    "GGT formula",
    "sijection validity",
    "compatibility",
    "ASM bridge",
    "transfer matrices",
    "weighted identity",
    "stabilization and equivariance",
    "engine laws",
    "integrability spot check",
];

/// Time limits in seconds, per criterion.
pub const LIMITS: [u64; 11] = [60, 60, 120, 600, 600, 30, 120, 300, 60, 10, 30];

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<Failure>,
}

impl Tally {
    fn check(&mut self, ok: bool, key: impl FnOnce() -> String, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(Failure {
                key: key(),
                detail: detail(),
            });
        }
    }

    fn result<T>(&mut self, key: impl FnOnce() -> String, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checked += 1;
                self.failures.push(Failure {
                    key: key(),
                    detail: e.to_string(),
                });
                None
            }
        }
    }

    fn witness(&mut self, key: impl FnOnce() -> String, w: Option<String>) {
        self.checked += 1;
        if let Some(detail) = w {
            self.failures.push(Failure { key: key(), detail });
        }
    }
}

/// All sequences of length n with entries in lo..=hi, lexicographic.
pub fn grid(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (lo..=hi).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn run_criterion(id: usize, opts: &Options) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    match id {
        1 => c1_enumeration(&mut t, opts.level()),
        2 => c2_restricted(&mut t),
        3 => c3_ggt(&mut t),
        4 => {
            let s = sweep();
            t.checked = s.validity.checked;
            t.failures = s.validity.failures.clone();
        }
        5 => {
            let s = sweep();
            t.checked = s.compat.checked;
            t.failures = s.compat.failures.clone();
            if opts.corrupt_pi {
                corrupt_pi_check(&mut t);
            }
        }
        6 => c6_asm(&mut t),
        7 => c7_transfer(&mut t, opts.level()),
        8 => c8_weighted(&mut t),
        9 => c9_limits(&mut t),
        10 => c10_engine(&mut t),
        11 => c11_integrability(&mut t),
        _ => t.failures.push(Failure {
            key: format!("criterion {id}"),
            detail: "no such criterion".into(),
        }),
    }
    Outcome {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        checked: t.checked,
        failures: t.failures,
        elapsed: start.elapsed(),
        limit: Duration::from_secs(LIMITS.get(id.wrapping_sub(1)).copied().unwrap_or(0)),
    }
}

pub fn run_all(opts: &Options) -> Vec<Outcome> {
    (1..=11).map(|id| run_criterion(id, opts)).collect()
}

fn c1_enumeration(t: &mut Tally, level: Level) {
    let nmax = if level == Level::Full { 4 } else { 3 };
    for n in 1..=nmax {
        for k in grid(n, 0, 5) {
            let Some(set) = t.result(|| format!("gt k={k:?}"), gt(&k)) else {
                continue;
            };
            let mut sorted = k.clone();
            sorted.sort_unstable();
            let size = set.size();
            t.check(
                size == gt_size_formula(&k) && size == sgn_seq(&k) * gt_size_formula(&sorted),
                || format!("gt k={k:?}"),
                || format!("size {size}, formula {}", gt_size_formula(&k)),
            );
        }
    }
}

fn c2_restricted(t: &mut Tally) {
    for n in 1..=3 {
        for k in grid(n, 0, 4) {
            let Some(counts) = t.result(|| format!("profiles k={k:?}"), profile_counts(&k)) else {
                continue;
            };
            let mut profiles: Vec<&Vec<Vec<i64>>> = counts.keys().collect();
            profiles.sort();
            for a in profiles {
                let c = counts[a];
                let want = restricted_count(&k, a).unwrap_or(i64::MIN);
                t.check(
                    (-1..=1).contains(&c) && c == want,
                    || format!("k={k:?} A={a:?}"),
                    || format!("count {c}, expected {want}"),
                );
            }
            let mut sorted = k.clone();
            sorted.sort_unstable();
            if sgn_seq(&k) != 0 {
                for a in crate::gt::classical_patterns(&sorted) {
                    debug_assert!(is_classical_profile(&a));
                    let c = counts.get(&a).copied().unwrap_or(0);
                    t.check(
                        c == sgn_seq(&k),
                        || format!("k={k:?} classical A={a:?}"),
                        || format!("count {c}, sgn {}", sgn_seq(&k)),
                    );
                }
            }
        }
    }
}

/// Random parameters for n ∈ {2, 3}; entries of row i in 1..=i+1.
fn random_params(rng: &mut ChaCha8Rng, n: usize) -> GgtParams {
    let mut row = |i: usize| (0..i).map(|_| rng.gen_range(1..=i + 1)).collect::<Vec<_>>();
    let p = (1..n).map(&mut row).collect();
    let q = (1..n).map(&mut row).collect();
    GgtParams { p, q }
}

fn c3_ggt(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6767);
    let (total, min_non_tree) = (200, 30);
    let (mut tree, mut non_tree) = (0, 0);
    while tree + non_tree < total || non_tree < min_non_tree {
        let n = rng.gen_range(2..=3);
        let params = random_params(&mut rng, n);
        let is_tree = ggt_param_sign(&params) != 0;
        if is_tree && tree >= total - min_non_tree {
            continue;
        }
        if is_tree {
            tree += 1;
        } else {
            non_tree += 1;
        }
        let k: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=5)).collect();
        let key = || format!("ggt k={k:?} p={:?} q={:?}", params.p, params.q);
        let Some(set) = t.result(key, ggt(&k, &params)) else {
            continue;
        };
        let want = ggt_size_formula(&k, &params);
        t.check(
            set.size() == want && (is_tree || set.size() == 0),
            key,
            || format!("size {}, formula {want}", set.size()),
        );
    }
    t.check(
        non_tree >= min_non_tree,
        || "non-tree share".into(),
        || format!("{non_tree}"),
    );
}

/// Results of the shared construction sweep.
struct Sweep {
    validity: Tally,
    compat: Tally,
}

fn sweep() -> Arc<Sweep> {
    static MEMO: Memo<(), Arc<Sweep>> = Memo::new();
    MEMO.get_or((), || Ok::<_, ()>(Arc::new(run_sweep())))
        .expect("infallible")
}

fn first_rows(rows: Vec<Vec<i64>>, n: usize) -> StatValue {
    StatValue::multiseq(rows.into_iter().take(n).collect())
}

fn run_sweep() -> Sweep {
    let mut v = Tally::default();
    let mut c = Tally::default();
    let cell = |key: String, f: Result<Sij>, stats: &[Statistic], v: &mut Tally, c: &mut Tally| {
        let Some(f) = v.result(|| key.clone(), f) else {
            return;
        };
        let r = verify(&f);
        v.witness(|| key.clone(), r.witness);
        for eta in stats {
            let r = check_compatibility(&f, eta);
            c.witness(|| format!("{key} {}", eta.name), r.witness);
        }
    };
    for a in 0..=4 {
        for b in 0..=4 {
            for m in 0..=4 {
                cell(
                    format!("interval_split {a},{b},{m}"),
                    interval_split(a, b, m),
                    &[],
                    &mut v,
                    &mut c,
                );
            }
        }
    }
    for n in 1..=3 {
        let boxes = grid(n, 0, 4);
        for a in &boxes {
            for b in &boxes {
                for x in -1..=6 {
                    let (bt, rh) = if n == 3 {
                        let bt = beta_uncached(a, b, x);
                        let rh = bt.as_ref().map_err(Clone::clone).and_then(rho_from_beta);
                        (bt, rh)
                    } else {
                        (beta(a, b, x), rho(a, b, x))
                    };
                    let key = format!("a={a:?} b={b:?} x={x}");
                    cell(
                        format!("beta {key}"),
                        bt,
                        &[beta_normal_statistic(n)],
                        &mut v,
                        &mut c,
                    );
                    cell(
                        format!("rho {key}"),
                        rh,
                        &rho_statistics(n, x),
                        &mut v,
                        &mut c,
                    );
                }
            }
            if n >= 2 {
                for b in &boxes {
                    for i in 1..n {
                        if a[i - 1] == a[i] && b[i - 1] == b[i] {
                            let eta = sigma_statistic();
                            cell(
                                format!("sigma a={a:?} b={b:?} i={i}"),
                                sigma(a, b, i),
                                &[eta],
                                &mut v,
                                &mut c,
                            );
                        }
                    }
                }
            }
        }
        for k in grid(n, 0, 4) {
            for i in 1..n {
                cell(
                    format!("pi k={k:?} i={i}"),
                    pi(&k, i),
                    &[pi_row_statistic(&k, i)],
                    &mut v,
                    &mut c,
                );
            }
            for x in -1..=6 {
                if n >= 2 {
                    cell(
                        format!("gamma_row k={k:?} x={x}"),
                        gamma_row(&k, x),
                        &[gamma_normal_statistic(n)],
                        &mut v,
                        &mut c,
                    );
                }
                let eta = tau_statistic(n);
                cell(
                    format!("tau k={k:?} x={x}"),
                    tau(&k, x),
                    &[eta],
                    &mut v,
                    &mut c,
                );
            }
            if is_strictly_increasing(&k) {
                cell(
                    format!("iota_mt k={k:?}"),
                    iota_mt(&k),
                    &[eta_mt_statistic(k.clone()), eta_inv_mt_statistic(k.clone())],
                    &mut v,
                    &mut c,
                );
            }
        }
        for k in grid(n, 0, 3) {
            let xp = x_plus(&k);
            if n >= 2 {
                for mode in [SignMode::Signed, SignMode::Unsigned] {
                    cell(
                        format!("phi1 k={k:?} {mode:?}"),
                        phi1(&k, xp, mode),
                        &[],
                        &mut v,
                        &mut c,
                    );
                    cell(
                        format!("phi3p k={k:?} {mode:?}"),
                        phi3p(&k, xp, mode),
                        &[],
                        &mut v,
                        &mut c,
                    );
                }
                cell(format!("phi4p k={k:?}"), phi4p(&k, xp), &[], &mut v, &mut c);
                cell(
                    format!("phi4pp k={k:?}"),
                    phi4pp(&k, xp),
                    &[],
                    &mut v,
                    &mut c,
                );
            }
            let lo = k.iter().min().copied().unwrap_or(0);
            for x in [x_minus(&k), lo + 1, xp] {
                let stats = [eta_top_statistic(k.clone()), eta_inv_statistic(k.clone())];
                cell(
                    format!("gamma k={k:?} x={x}"),
                    gamma_sij(&k, x),
                    &stats,
                    &mut v,
                    &mut c,
                );
            }
            let stats: Vec<Statistic> = (0..weight_names(n).len())
                .map(|j| weight_statistic(k.clone(), j))
                .collect();
            cell(
                format!("gmt_ar_sgt k={k:?}"),
                gmt_ar_sgt(&k, xp),
                &stats,
                &mut v,
                &mut c,
            );
        }
    }
    Sweep {
        validity: v,
        compat: c,
    }
}

/// η_top and the first n rows (as a multiset) for ρ(a, b, x) with |a| = n.
pub fn rho_statistics(n: usize, x: i64) -> Vec<Statistic> {
    let top = Statistic::new("eta_top", move |side, e| {
        Ok(StatValue::Int(rho_rows(side, e, x)[0][0]))
    });
    let rows = Statistic::new("eta_row,1..n", move |side, e| {
        Ok(first_rows(rho_rows(side, e, x), n))
    });
    vec![top, rows]
}

pub fn sigma_statistic() -> Statistic {
    Statistic::uniform("eta_row", |e| Ok(StatValue::multiseq(indexed_gt_rows(e))))
}

/// Rows 1..n−1 for τ(k, x) with |k| = n.
pub fn tau_statistic(n: usize) -> Statistic {
    Statistic::sided(
        "eta_row,1..n-1",
        move |e| Ok(StatValue::multiseq(gt_upper_rows(e, n))),
        move |e| Ok(StatValue::multiseq(gt_upper_rows(e.tagged().1, n))),
    )
}

/// η_row on GT(k) against η_row on GT(k with positions i, i+1 swapped).
pub fn pi_row_statistic(k: &[i64], i: usize) -> Statistic {
    let mut kp = k.to_vec();
    kp.swap(i - 1, i);
    let k1 = k.to_vec();
    Statistic::sided(
        "eta_row",
        move |e| Ok(StatValue::multiseq(gt_rows(e, &k1))),
        move |e| Ok(StatValue::multiseq(gt_rows(e, &kp))),
    )
}

/// The negative example: π(0,2,4; 1) with its edges re-paired, checked
/// against η_row.  Returns the incompatibility witness, if any.
pub fn corrupted_pi_witness() -> Result<Option<String>> {
    let k = [0, 2, 4];
    let p: Sij = pi(&k, 1)?;
    let bad = scramble(&p)?;
    Ok(check_compatibility(&bad, &pi_row_statistic(&k, 1)).witness)
}

fn corrupt_pi_check(t: &mut Tally) {
    let key = || "pi k=[0, 2, 4] i=1 eta_row (corrupted)".to_string();
    if let Some(w) = t.result(key, corrupted_pi_witness()) {
        t.witness(key, w);
    }
}

fn c6_asm(t: &mut Tally) {
    let want = [1, 2, 7, 42];
    for n in 1..=4 {
        let Some(list) = t.result(|| format!("asm n={n}"), asm_enumerate(n)) else {
            continue;
        };
        t.check(
            list.len() == want[n - 1],
            || format!("count n={n}"),
            || format!("{}", list.len()),
        );
        for a in &list {
            let rows = match asm_to_mt(a) {
                Ok(r) => r,
                Err(e) => {
                    t.check(false, || format!("asm_to_mt {a:?}"), || e.to_string());
                    continue;
                }
            };
            t.check(
                mt_to_asm(&rows).ok().as_ref() == Some(a),
                || format!("roundtrip {a:?}"),
                || format!("{rows:?}"),
            );
            t.check(
                eta_inv_asm(a) == eta_inv_mt(&rows),
                || format!("eta_inv {a:?}"),
                || format!("{} vs {}", eta_inv_asm(a), eta_inv_mt(&rows)),
            );
        }
        let bottom: Vec<i64> = (0..n as i64).map(|j| 2 * j + 1).collect();
        if let Some(s) = t.result(|| format!("mt n={n}"), mt(&bottom)) {
            t.check(
                s.len() == want[n - 1],
                || format!("#MT n={n}"),
                || format!("{}", s.len()),
            );
        }
    }
}

/// Signed count of l over all arrow rows: Σ_μ sign(μ)·sign(l in μ(k)).
pub fn brute_multiplicity(k: &[i64], l: &[i64]) -> Result<i64> {
    let mut total = 0;
    let target = Elem::atoms(l);
    for (mu, s) in ar(k.len(), SignMode::Signed)?.iter() {
        if let Some(sl) = mu_apply(&mu.arrow_seq(), k)?.sign(&target) {
            total += (s * sl) as i64;
        }
    }
    Ok(total)
}

fn c7_transfer(t: &mut Tally, level: Level) {
    let nmax = if level == Level::Full { 4 } else { 3 };
    for n in 2..=nmax {
        for k in grid(n, 0, 4) {
            for l in grid(n - 1, -1, 5) {
                let key = || format!("k={k:?} l={l:?}");
                let (Some(m), Some(b)) = (
                    t.result(key, m_multiplicity(&k, &l)),
                    t.result(key, brute_multiplicity(&k, &l)),
                ) else {
                    continue;
                };
                t.check(m == b, key, || format!("transfer {m}, brute force {b}"));
                if !is_partially_successive(&l) {
                    t.check((-1..=1).contains(&m), key, || format!("multiplicity {m}"));
                }
            }
            if is_partially_successive(&k) {
                emptiness(t, &k);
            }
        }
        for l in grid(n - 1, -1, 5)
            .into_iter()
            .filter(|l| is_partially_successive(l))
        {
            emptiness(t, &l);
        }
    }
}

fn emptiness(t: &mut Tally, m: &[i64]) {
    let key = || format!("emptiness m={m:?}");
    if let Some(ne) = t.result(key, mt_prime_nonempty(m)) {
        t.check(!ne, key, || "a ≺' chain exists".into());
    }
    if let Some(s) = t.result(key, mt(m)) {
        t.check(s.is_empty(), key, || format!("MT has {} elements", s.len()));
    }
    if m.len() <= 3 {
        if let Some(s) = t.result(key, gmt(m, SignMode::Signed)) {
            t.check(s.size() == 0, key, || format!("size(GMT) = {}", s.size()));
        }
    }
}

fn c8_weighted(t: &mut Tally) {
    let mode = SignMode::Unsigned;
    for n in 1..=3 {
        for k in grid(n, 0, 3) {
            let key = || format!("k={k:?}");
            let (Some(a), Some(b)) = (
                t.result(key, weighted_side(&k, WeightedSide::Gmt)),
                t.result(key, weighted_side(&k, WeightedSide::ArSgt)),
            ) else {
                continue;
            };
            t.check(a == b, key, || format!("GMT side:\n{a}AR×SGT side:\n{b}"));
            if let Some(g) = t.result(key, gmt(&k, mode)) {
                for e in g.support() {
                    let w = weights_gmt(e, &k);
                    t.check(
                        weight_relations_hold(&w, &k),
                        || format!("GMT {e}"),
                        || format!("{w:?}"),
                    );
                }
            }
            let side = ar(n, mode).and_then(|a| {
                let s = crate::triangles::sgt(&k, mode)?;
                cartesian_product(&[&*a, &*s])
            });
            if let Some(s) = t.result(key, side) {
                for e in s.support() {
                    let w = weights_arsgt(e, &k);
                    t.check(
                        weight_relations_hold(&w, &k),
                        || format!("AR×SGT {e}"),
                        || format!("{w:?}"),
                    );
                }
            }
        }
    }
}

fn c9_limits(t: &mut Tally) {
    let mut ks = grid(1, 0, 3);
    ks.extend(grid(2, 0, 3));
    ks.extend([vec![0, 1, 3], vec![3, 0, 2], vec![2, 2, 1]]);
    for k in &ks {
        for (base, offsets) in [(x_plus(k), [1, 3]), (x_minus(k), [-1, -3])] {
            let Some(g) = t.result(|| format!("gamma k={k:?} x={base}"), gamma_sij(k, base)) else {
                continue;
            };
            for d in offsets {
                let key = || format!("stabilization k={k:?} x={base}+({d})");
                if let Some(h) = t.result(key, gamma_sij(k, base + d)) {
                    let w = pointwise_eq(&g, &h);
                    if let Some(w) = t.result(key, w) {
                        t.witness(key, w);
                    }
                }
            }
        }
    }
    for k in grid(2, 0, 3) {
        for s in -2..=2 {
            for dir in [Limit::PlusInfinity, Limit::MinusInfinity] {
                let key = || format!("equivariance k={k:?} t={s} {dir:?}");
                if let Some(w) = t.result(key, check_equivariance(&k, s, dir)) {
                    t.witness(key, w);
                }
                debug_assert_eq!(translate_seq(&k, 0), k);
            }
        }
    }
}

/// A random signed set with the given size and at most `max` elements, over
/// atoms offset by `base`.
fn random_set(rng: &mut ChaCha8Rng, size: i64, base: i64) -> SignedSet {
    let minus = rng.gen_range(0..=2i64);
    let plus = (size + minus).max(0);
    let minus = plus - size;
    SignedSet::from_signed(
        (0..plus)
            .map(|j| (Elem::Atom(base + j), 1))
            .chain((0..minus).map(|j| (Elem::Atom(base + 100 + j), -1))),
    )
    .expect("distinct atoms")
}

/// A uniformly re-paired sijection S ⇄ T (sizes must agree).
fn random_sij(rng: &mut ChaCha8Rng, s: Arc<SignedSet>, t: Arc<SignedSet>) -> Result<Sij> {
    let mut p: Vec<(Side, Elem)> = s.plus().map(|e| (Side::Dom, e.clone())).collect();
    p.extend(t.minus().map(|e| (Side::Cod, e.clone())));
    let mut q: Vec<(Side, Elem)> = s.minus().map(|e| (Side::Dom, e.clone())).collect();
    q.extend(t.plus().map(|e| (Side::Cod, e.clone())));
    q.shuffle(rng);
    from_pairs(s, t, p.into_iter().zip(q))
}

fn reassoc_left(e: &Elem) -> Elem {
    let (ab, c) = (e.get(0), e.get(1));
    Elem::tup(vec![ab.get(0).clone(), ab.get(1).clone(), c.clone()])
}

fn reassoc_right(e: &Elem) -> Elem {
    let (a, bc) = (e.get(0), e.get(1));
    Elem::tup(vec![a.clone(), bc.get(0).clone(), bc.get(1).clone()])
}

fn c10_engine(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5151);
    for trial in 0..100 {
        let key = || format!("triple {trial}");
        let size = rng.gen_range(-2..=2);
        let sets: Vec<Arc<SignedSet>> = (0..4)
            .map(|j| Arc::new(random_set(&mut rng, size, 1000 * j)))
            .collect();
        let fs: Result<Vec<Sij>> = (0..3)
            .map(|j| random_sij(&mut rng, sets[j].clone(), sets[j + 1].clone()))
            .collect();
        let Some(fs) = t.result(key, fs) else {
            continue;
        };
        let lhs = compose(&fs[0], &fs[1]).and_then(|ab| compose(&ab, &fs[2]));
        let rhs = compose(&fs[1], &fs[2]).and_then(|bc| compose(&fs[0], &bc));
        if let (Some(l), Some(r)) = (t.result(key, lhs), t.result(key, rhs)) {
            if let Some(w) = t.result(key, pointwise_eq(&l, &r)) {
                t.witness(|| format!("compose associativity {trial}"), w);
            }
        }
        let left = product(&fs[..2]).and_then(|ab| product(&[ab, fs[2].clone()]));
        let right = product(&fs[1..]).and_then(|bc| product(&[fs[0].clone(), bc]));
        let flat = product(&fs);
        if let (Some(l), Some(r), Some(f)) = (
            t.result(key, left),
            t.result(key, right),
            t.result(key, flat),
        ) {
            let mut bad = None;
            for side in [Side::Dom, Side::Cod] {
                for e in f.set(side).support() {
                    let a = f.apply(side, e).ok();
                    let lf = |e: &Elem| {
                        Elem::pair(
                            Elem::pair(e.get(0).clone(), e.get(1).clone()),
                            e.get(2).clone(),
                        )
                    };
                    let rf = |e: &Elem| {
                        Elem::pair(
                            e.get(0).clone(),
                            Elem::pair(e.get(1).clone(), e.get(2).clone()),
                        )
                    };
                    let b = l
                        .apply(side, &lf(e))
                        .ok()
                        .map(|(s, y)| (s, reassoc_left(&y)));
                    let c = r
                        .apply(side, &rf(e))
                        .ok()
                        .map(|(s, y)| (s, reassoc_right(&y)));
                    if a.is_none() || a != b || a != c {
                        bad.get_or_insert(format!("{} {e}", side.name()));
                    }
                }
            }
            t.witness(|| format!("product associativity {trial}"), bad);
        }
    }
    match product_counterexample() {
        Ok((l, r)) => {
            let b = Elem::Atom(1);
            let bd = Elem::Atom(-1);
            t.check(
                l == (Side::Cod, Elem::pair(b.clone(), bd.clone()))
                    && r == (Side::Cod, Elem::pair(bd, b)),
                || "product counterexample".into(),
                || format!("{} / {}", l.1, r.1),
            );
        }
        Err(e) => t.check(false, || "product counterexample".into(), || e.to_string()),
    }
}

/// S = ({A}, ∅), T = ({A, B}, {B†}) with A ↔ A and B ↔ B†; evaluates the two
/// factorizations of φ × φ at (B, B).  A, B, B† are atoms 0, 1, −1.
pub fn product_counterexample() -> Result<((Side, Elem), (Side, Elem))> {
    let (a, b, bd) = (Elem::Atom(0), Elem::Atom(1), Elem::Atom(-1));
    let s = Arc::new(SignedSet::singleton(a.clone(), 1));
    let t = Arc::new(SignedSet::from_signed([
        (a.clone(), 1),
        (b.clone(), 1),
        (bd.clone(), -1),
    ])?);
    let phi = from_pairs(
        s.clone(),
        t.clone(),
        [
            ((Side::Dom, a.clone()), (Side::Cod, a)),
            ((Side::Cod, b.clone()), (Side::Cod, bd)),
        ],
    )?;
    let (id_s, id_t) = (identity(s), identity(t));
    let lhs = compose(
        &product(&[phi.clone(), id_s.clone()])?,
        &product(&[id_t.clone(), phi.clone()])?,
    )?;
    let rhs = compose(&product(&[id_s, phi.clone()])?, &product(&[phi, id_t])?)?;
    let bb = Elem::pair(b.clone(), b);
    Ok((lhs.apply(Side::Cod, &bb)?, rhs.apply(Side::Cod, &bb)?))
}

fn c11_integrability(t: &mut Tally) {
    let k = [0, 2, 4];
    if let Some(r) = t.result(
        || "integrability".into(),
        check_partial_integrability(&k, 4),
    ) {
        t.check(
            r.paths_checked > 0,
            || "integrability".into(),
            || "no paths".into(),
        );
        for f in r.failures {
            t.check(false, || "integrability".into(), || f);
        }
    }
}
