//! Randomized subspace-search oracle for Gelfand and Kolmogorov numbers of
//! small identity embeddings (`N ≤ 6`), evaluating the defining infima
//! directly.
//!
//! Kolmogorov: minimize over `(n−1)`-dimensional subspaces `V` the worst-case
//! `ℓ_{p_dst}` distance from the `ℓ_{p_src}` unit ball to `V`. Gelfand:
//! minimize over codimension-`(n−1)` subspaces `M` the norm of the identity
//! restricted to `M`.
//!
//! For a Banach target the Kolmogorov objective is evaluated through the
//! quotient-norm identity `sup_{x∈B_{p1}} dist_{p2}(x, V) =
//! max_{w ∈ V^⊥} ‖w‖_{p1^*} / ‖w‖_{p2′}` (with `p1^* = (max(p1,1))′`, since
//! the supremum of a convex function over the quasi-ball is attained on the
//! extreme points of its convex hull). Both families therefore reduce to
//! maximizing a norm ratio over a subspace, handled by seeded multi-start
//! compass ascent; the outer subspace search is a seeded multi-start compass
//! descent over orthonormal frames. Runs are deterministic given the seed:
//! every random stream is split per start index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::WidthKind;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::finite::{FiniteEmbedding, Method, WidthResult, WidthValue};

/// Largest dimension the oracle accepts.
pub const MAX_ORACLE_DIM: usize = 6;

/// Default iteration budget (outer objective evaluations).
pub const DEFAULT_ORACLE_BUDGET: usize = 20_000;

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Number of random outer starts (canonical starts are always added).
    pub starts: usize,
    /// Step tolerance terminating the outer refinement.
    pub step_tol: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            starts: 64,
            step_tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Quality {
    Search,
    Certify,
}

pub fn lp_norm(x: &[f64], p: Exponent) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        let pv = p.get();
        x.iter().map(|v| v.abs().powf(pv)).sum::<f64>().powf(1.0 / pv)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two-pass modified Gram-Schmidt. Returns `None` on rank deficiency.
fn orthonormalize(cols: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
    for col in cols {
        let mut v = col.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nrm = norm2(&v);
        if nrm < 1e-10 {
            return None;
        }
        for vi in v.iter_mut() {
            *vi /= nrm;
        }
        out.push(v);
    }
    Some(out)
}

/// Orthonormal basis of the orthogonal complement of `frame` in `R^n`.
fn complement(frame: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n - frame.len());
    for i in 0..n {
        if frame.len() + out.len() >= n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for _ in 0..2 {
            for q in frame.iter().chain(out.iter()) {
                let c = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nrm = norm2(&v);
        if nrm < 1e-8 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= nrm;
        }
        out.push(v);
    }
    out
}

/// Deterministic compass extremization: coordinate steps with shrinking step
/// size. `sign = -1` minimizes, `sign = +1` maximizes.
fn compass(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step0: f64,
    tol: f64,
    max_evals: usize,
    sign: f64,
) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut best = f(&x);
    let mut step = step0;
    let mut evals = 1usize;
    while step > tol && evals < max_evals {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step;
                let v = f(&x);
                evals += 1;
                if sign * (v - best) > 0.0 {
                    best = v;
                    improved = true;
                } else {
                    x[i] = old;
                }
                if evals >= max_evals {
                    return (x, best);
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, best)
}

/// Maximize `‖Bu‖_{p_num} / ‖Bu‖_{p_den}` over the span of the orthonormal
/// frame `basis`.
fn ratio_max(
    basis: &[Vec<f64>],
    p_num: Exponent,
    p_den: Exponent,
    rand_starts: &[Vec<f64>],
    quality: Quality,
) -> f64 {
    let k = basis.len();
    if k == 0 {
        return 0.0;
    }
    let n = basis[0].len();
    if p_num == p_den {
        return 1.0;
    }
    if k == 1 {
        return lp_norm(&basis[0], p_num) / lp_norm(&basis[0], p_den);
    }
    if p_den.get() == 2.0 {
        if p_num.get() == 2.0 {
            return 1.0;
        }
        if p_num.is_infinite() {
            // max_i ‖row_i‖_2 over the orthonormal frame
            let mut best = 0.0f64;
            for i in 0..n {
                let row: f64 = basis.iter().map(|b| b[i] * b[i]).sum();
                best = best.max(row);
            }
            return best.sqrt();
        }
    }

    let expand = |u: &[f64]| -> Vec<f64> {
        let mut w = vec![0.0; n];
        for (c, b) in u.iter().zip(basis) {
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi += c * bi;
            }
        }
        w
    };
    let mut g = |u: &[f64]| -> f64 {
        let s = norm2(u);
        if s < 1e-14 {
            return 0.0;
        }
        let w = expand(u);
        lp_norm(&w, p_num) / lp_norm(&w, p_den)
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for i in 0..k {
        let mut e = vec![0.0; k];
        e[i] = 1.0;
        starts.push(e);
    }
    starts.push(vec![1.0; k]);
    // coordinate images: coefficients of the L2 projections of the axes
    for i in 0..n {
        let u: Vec<f64> = basis.iter().map(|b| b[i]).collect();
        if norm2(&u) > 1e-9 {
            starts.push(u);
        }
    }
    let n_rand = match quality {
        Quality::Search => 4.min(rand_starts.len()),
        Quality::Certify => rand_starts.len(),
    };
    for r in rand_starts.iter().take(n_rand) {
        starts.push(r[..k].to_vec());
    }

    let (tol, evals) = match quality {
        Quality::Search => (1e-7, 400),
        Quality::Certify => (1e-11, 4_000),
    };
    let mut best = 0.0f64;
    for s in &starts {
        let v0 = g(s);
        if v0 <= 0.0 {
            continue;
        }
        let (_, v) = compass(&mut g, s, 0.4, tol, evals, 1.0);
        best = best.max(v.max(v0));
    }
    best
}

/// Whether the searched frame spans the subspace the norm ratio is taken
/// over, or its orthogonal complement. The objective depends on the frame
/// only through its span, so both parameterizations are equivalent; the
/// smaller one conditions the search better.
#[derive(Clone, Copy, PartialEq)]
enum FrameRole {
    RatioSpan,
    RatioComplement,
}

struct Oracle<'a> {
    emb: &'a FiniteEmbedding,
    kind: WidthKind,
    rand_starts: Vec<Vec<f64>>,
}

impl<'a> Oracle<'a> {
    fn new(emb: &'a FiniteEmbedding, kind: WidthKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let rand_starts = (0..16)
            .map(|_| (0..emb.dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        Oracle {
            emb,
            kind,
            rand_starts,
        }
    }

    /// Norm-ratio exponents: Kolmogorov uses the quotient-norm identity
    /// `sup_{x∈B_{p_src}} dist_{p_dst}(x, V) = max_{w∈V^⊥}
    /// ‖w‖_{(max(p_src,1))′}/‖w‖_{p_dst′}`, Gelfand the restricted norm.
    fn ratio_exponents(&self) -> (Exponent, Exponent) {
        match self.kind {
            WidthKind::Kolmogorov => {
                let p_num = if self.emb.p_src.get() <= 1.0 {
                    Exponent::INF
                } else {
                    self.emb.p_src.conjugate()
                };
                (p_num, self.emb.p_dst.conjugate())
            }
            WidthKind::Gelfand => (self.emb.p_dst, self.emb.p_src),
            WidthKind::Approximation => unreachable!("oracle kinds are gelfand/kolmogorov"),
        }
    }

    /// Objective value for one orthonormal frame in the given role.
    fn objective(&self, frame: &[Vec<f64>], role: FrameRole, quality: Quality) -> f64 {
        let (p_num, p_den) = self.ratio_exponents();
        let value = match role {
            FrameRole::RatioSpan => {
                ratio_max(frame, p_num, p_den, &self.rand_starts, quality)
            }
            FrameRole::RatioComplement => {
                let w = complement(frame, self.emb.dim);
                ratio_max(&w, p_num, p_den, &self.rand_starts, quality)
            }
        };
        self.emb.scale * value
    }

    /// Dimension of the subspace the norm ratio is taken over.
    fn ratio_cols(&self, n: usize) -> usize {
        match self.kind {
            // the ratio lives on V^⊥ with dim V = n − 1
            WidthKind::Kolmogorov => self.emb.dim - (n - 1),
            // the ratio lives on M with codim M = n − 1
            WidthKind::Gelfand => self.emb.dim - (n - 1),
            WidthKind::Approximation => unreachable!(),
        }
    }
}

fn coordinate_frames(n: usize, k: usize) -> Vec<Vec<Vec<f64>>> {
    // all k-subsets of the coordinate axes
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let frame: Vec<Vec<f64>> = idx
            .iter()
            .map(|&i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        out.push(frame);
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if idx[j] < n - k + j {
                idx[j] += 1;
                for l in j + 1..k {
                    idx[l] = idx[l - 1] + 1;
                }
                break;
            }
        }
    }
}

fn flatten(frame: &[Vec<f64>]) -> Vec<f64> {
    frame.iter().flatten().copied().collect()
}

fn unflatten(raw: &[f64], n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|j| raw[j * n..(j + 1) * n].to_vec()).collect()
}

fn run_search(oracle: &Oracle, ratio_cols: usize, budget: usize, cfg: &OracleConfig) -> f64 {
    let n = oracle.emb.dim;
    // parameterize the smaller of the ratio subspace and its complement
    let (k, role) = if ratio_cols <= n - ratio_cols {
        (ratio_cols, FrameRole::RatioSpan)
    } else {
        (n - ratio_cols, FrameRole::RatioComplement)
    };
    if k == 0 {
        // single configuration: the ratio subspace is {0} or everything
        let frame = if role == FrameRole::RatioSpan {
            Vec::new()
        } else {
            coordinate_frames(n, 0).pop().unwrap_or_default()
        };
        return oracle.objective(&frame, role, Quality::Certify);
    }

    let mut starts: Vec<Vec<Vec<f64>>> = coordinate_frames(n, k);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x51_7c_c1_b7_27_22_0a_95);
    let n_random = cfg.starts.saturating_sub(starts.len()).max(4);
    for _ in 0..n_random {
        let cols: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        starts.push(cols);
    }

    let mut evals = 0usize;
    let mut scored: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
    for cols in &starts {
        if let Some(frame) = orthonormalize(cols) {
            let v = oracle.objective(&frame, role, Quality::Search);
            evals += 1;
            scored.push((v, frame));
        }
        if evals >= budget {
            break;
        }
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let spread = scored.last().map(|l| l.0 - scored[0].0).unwrap_or(0.0);
    if spread < 1e-13 {
        return oracle.objective(&scored[0].1, role, Quality::Certify);
    }

    let refine_count = 4.min(scored.len());
    let share = (budget.saturating_sub(evals) / (refine_count + 2).max(1)).max(200);
    let mut f = |raw: &[f64]| -> f64 {
        match orthonormalize(&unflatten(raw, n, k)) {
            Some(fr) => oracle.objective(&fr, role, Quality::Search),
            None => f64::INFINITY,
        }
    };
    let mut best_frames: Vec<(f64, Vec<f64>)> = Vec::new();
    for (v0, frame) in scored.into_iter().take(refine_count) {
        let x0 = flatten(&frame);
        let (x, v) = compass(&mut f, &x0, 0.3, cfg.step_tol, share, -1.0);
        best_frames.push((v.min(v0), x));
    }
    best_frames.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // restart polish on the best candidate: fresh shrinking schedules escape
    // stale step sizes of the first pass
    let (mut best_v, mut best_x) = best_frames[0].clone();
    for step in [0.05, 0.01] {
        let (x, v) = compass(&mut f, &best_x, step, cfg.step_tol, share, -1.0);
        if v < best_v {
            best_v = v;
            best_x = x;
        }
    }
    // certify the polished frame and the runner-up with a thorough inner pass
    let mut certified = f64::INFINITY;
    let mut frames: Vec<&[f64]> = vec![&best_x];
    if best_frames.len() > 1 {
        frames.push(&best_frames[1].1);
    }
    for raw in frames {
        if let Some(fr) = orthonormalize(&unflatten(raw, n, k)) {
            certified = certified.min(oracle.objective(&fr, role, Quality::Certify));
        }
    }
    certified
}

fn check_oracle_inputs(emb: &FiniteEmbedding, kind: WidthKind) -> Result<()> {
    if emb.dim > MAX_ORACLE_DIM {
        return Err(Error::Refused(format!(
            "subspace oracle limited to N ≤ {MAX_ORACLE_DIM}, got N = {}",
            emb.dim
        )));
    }
    if kind == WidthKind::Approximation {
        return Err(Error::not_applicable(
            "subspace_search_oracle",
            "oracle kinds are gelfand and kolmogorov",
        ));
    }
    if kind == WidthKind::Kolmogorov && emb.p_dst.get() < 1.0 {
        return Err(Error::not_applicable(
            "subspace_search_oracle",
            "quasi-Banach targets (p_dst < 1) are not supported for the \
             Kolmogorov objective",
        ));
    }
    Ok(())
}

/// Upper estimate of the `n`-th Gelfand or Kolmogorov number of `emb` by
/// randomized multi-start subspace search. Deterministic given the seed in
/// [`OracleConfig`]; `budget` caps outer objective evaluations.
pub fn subspace_search_oracle(
    emb: &FiniteEmbedding,
    n: usize,
    kind: WidthKind,
    budget: usize,
) -> Result<WidthResult> {
    subspace_search_oracle_with(emb, n, kind, budget, &OracleConfig::default())
}

pub fn subspace_search_oracle_with(
    emb: &FiniteEmbedding,
    n: usize,
    kind: WidthKind,
    budget: usize,
    cfg: &OracleConfig,
) -> Result<WidthResult> {
    if n < 1 {
        return Err(Error::invalid("n", "rank index must be at least 1"));
    }
    check_oracle_inputs(emb, kind)?;
    if n > emb.dim {
        return Ok(WidthResult {
            kind,
            n,
            value: WidthValue::Exact { value: 0.0 },
            method: Method::OracleSubspace,
        });
    }
    let oracle = Oracle::new(emb, kind, cfg.seed);
    let value = run_search(&oracle, oracle.ratio_cols(n), budget.max(64), cfg);
    Ok(WidthResult {
        kind,
        n,
        value: WidthValue::Exact { value },
        method: Method::OracleSubspace,
    })
}

/// Oracle values for `n = 1..=N+1` with chained starts: each search is
/// seeded with the previous best subspace (extended or restricted by one
/// dimension), and values are clamped non-increasing, which preserves the
/// upper-estimate property by monotonicity of s-numbers.
pub fn oracle_sweep(
    emb: &FiniteEmbedding,
    kind: WidthKind,
    budget: usize,
    cfg: &OracleConfig,
) -> Result<Vec<WidthResult>> {
    check_oracle_inputs(emb, kind)?;
    let oracle = Oracle::new(emb, kind, cfg.seed);
    let mut out = Vec::with_capacity(emb.dim + 1);
    let mut prev: f64 = f64::INFINITY;
    for n in 1..=emb.dim {
        let value = run_search(&oracle, oracle.ratio_cols(n), budget.max(64), cfg).min(prev);
        prev = value;
        out.push(WidthResult {
            kind,
            n,
            value: WidthValue::Exact { value },
            method: Method::OracleSubspace,
        });
    }
    out.push(WidthResult {
        kind,
        n: emb.dim + 1,
        value: WidthValue::Exact { value: 0.0 },
        method: Method::OracleSubspace,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    fn emb(n: usize, ps: f64, pd: f64) -> FiniteEmbedding {
        let ps = if ps.is_infinite() { Exponent::INF } else { p(ps) };
        let pd = if pd.is_infinite() { Exponent::INF } else { p(pd) };
        FiniteEmbedding::new(n, ps, pd).unwrap()
    }

    fn value(r: WidthResult) -> f64 {
        r.exact_value().unwrap()
    }

    #[test]
    fn first_width_is_operator_norm() {
        let r = subspace_search_oracle(&emb(2, 1.0, 2.0), 1, WidthKind::Kolmogorov, 500).unwrap();
        assert!((value(r) - 1.0).abs() < 1e-9);
        let r = subspace_search_oracle(&emb(3, 2.0, 1.0), 1, WidthKind::Gelfand, 500).unwrap();
        assert!((value(r) - 3f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn diagonal_line_is_optimal_in_the_plane() {
        let d2 = subspace_search_oracle(&emb(2, 1.0, 2.0), 2, WidthKind::Kolmogorov, 3000).unwrap();
        assert!(
            (value(d2) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6,
            "d2 = {}",
            value(d2)
        );
        let c2 = subspace_search_oracle(&emb(2, 1.0, 2.0), 2, WidthKind::Gelfand, 3000).unwrap();
        assert!((value(c2) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn euclidean_identity_widths_are_one() {
        for n in 1..=4 {
            let r = subspace_search_oracle(&emb(4, 2.0, 2.0), n, WidthKind::Kolmogorov, 500)
                .unwrap();
            assert!((value(r) - 1.0).abs() < 1e-9);
            let r = subspace_search_oracle(&emb(4, 2.0, 2.0), n, WidthKind::Gelfand, 500).unwrap();
            assert!((value(r) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn index_beyond_dimension_vanishes() {
        let r = subspace_search_oracle(&emb(3, 1.0, 2.0), 4, WidthKind::Kolmogorov, 500).unwrap();
        assert_eq!(value(r), 0.0);
    }

    #[test]
    fn refuses_large_dimension() {
        assert!(matches!(
            subspace_search_oracle(&emb(7, 1.0, 2.0), 1, WidthKind::Kolmogorov, 500),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = OracleConfig {
            seed: 7,
            ..Default::default()
        };
        let a = subspace_search_oracle_with(&emb(3, 2.0, f64::INFINITY), 2, WidthKind::Kolmogorov,
            2000, &cfg)
        .unwrap();
        let b = subspace_search_oracle_with(&emb(3, 2.0, f64::INFINITY), 2, WidthKind::Kolmogorov,
            2000, &cfg)
        .unwrap();
        assert_eq!(value(a).to_bits(), value(b).to_bits());
    }

    #[test]
    fn gelfand_matches_exact_formula_for_nonincreasing_pairs() {
        // coordinate subspaces are optimal; the exact value is
        // (N−n+1)^{1/p_dst − 1/p_src}
        for (ps, pd) in [(2.0, 1.0), (3.0, 1.5)] {
            for n in 1..=4usize {
                let e = emb(4, ps, pd);
                let exact = ((4 - n + 1) as f64)
                    .powf(e.p_dst.recip() - e.p_src.recip());
                let got = value(
                    subspace_search_oracle(&e, n, WidthKind::Gelfand, 4000).unwrap(),
                );
                assert!(
                    got >= exact - 1e-8 && got <= exact * 1.05,
                    "({ps},{pd}) n={n}: got {got}, exact {exact}"
                );
            }
        }
    }

    #[test]
    fn sweep_is_monotone() {
        let cfg = OracleConfig::default();
        let table = oracle_sweep(&emb(4, 1.0, 2.0), WidthKind::Kolmogorov, 2000, &cfg).unwrap();
        for w in table.windows(2) {
            assert!(value(w[0].clone()) >= value(w[1].clone()));
        }
        assert_eq!(value(table[4].clone()), 0.0);
    }
}
