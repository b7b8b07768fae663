//! Empirical verification of the predicted decay exponents: compute upper
//! bounds for `s_n` of the truncated block model over a geometric grid of
//! rank budgets, fit a log-log slope, and compare with the classifier's `ϰ`.
//!
//! Two bound routes exist. When the fine indices collapse the mixed norms
//! (`q1 = p1`, `q2 = p2`) and `p2 ≤ p1`, the truncated model is a diagonal
//! operator `ℓ_{p1} → ℓ_{p2}` and its approximation and Gelfand numbers are
//! exactly `(Σ_{k≥n} σ_(k)^r)^{1/r}` over the sorted merged entries, with
//! `1/r = 1/p2 − 1/p1` (the `n`-th largest entry when `r = ∞`); this equals
//! the optimal allocation of the per-block exact widths combined with power
//! `r`, and it dominates the Kolmogorov numbers. Otherwise bounds come from
//! greedy rank allocation over per-block tables combined with the
//! subadditivity power `ρ = min(1, p2, q2)`.
//!
//! Truncation levels are chosen per direction: each direction stops at the
//! smallest level whose certified tail mass stays below half the remainder
//! target `tolerance/10` (on the unit-norm scale, at the largest grid
//! point), and the critical direction (the smaller of `α`, `δ`) is then
//! deepened until the model has enough rank capacity for the grid. The
//! slope is fitted on the truncated-model bounds; the tail estimate is
//! reported alongside.

use serde::{Deserialize, Serialize};

use crate::assemble::{assemble_sweep, block_operators, default_rho};
use crate::classify::{approximation_exponent, gelfand_exponent, kolmogorov_exponent};
use crate::classify::{CaseLabel, FamilyOutcome, WidthKind};
use crate::error::{Error, Result};
use crate::model::{ball_volume, build_blocks, WeightedSequenceModel, MAX_LEVEL};
use crate::params::EmbeddingParams;

/// One fitted sample: rank budget and assembled upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSample {
    pub n: u64,
    pub bound: f64,
}

/// How the bound samples were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundRoute {
    /// Exact widths of the merged diagonal model.
    DiagonalExact,
    /// Greedy rank allocation over per-block tables.
    BlockAssembly,
}

/// Fitted log-log slope with verdict against the predicted exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub samples: Vec<RateSample>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub predicted_kappa: f64,
    pub case: CaseLabel,
    pub tolerance: f64,
    /// `true` iff `|slope + ϰ| ≤ tolerance`.
    pub pass: bool,
    pub route: BoundRoute,
    /// Bounds built from envelope shapes with undetermined constants.
    pub shape_only: bool,
    /// Certified mass of the blocks left out of the truncated model.
    pub remainder_estimate: f64,
    pub remainder_target: f64,
    /// Exponent governing the tail control (`1/r` for the diagonal route,
    /// the ideal-norm `1/s` for the assembly route).
    pub ideal_exponent: f64,
    pub truncation: (u32, u32),
    pub rho: f64,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Cap on the truncation levels.
    pub level_cap: u32,
    /// Accept envelope-based (shape-only) block tables.
    pub allow_shape_only: bool,
    /// Override for the subadditivity power `ρ` of the assembly route.
    pub rho: Option<f64>,
    /// Fractions of the admissible `1/s` interval tried for the tail gate
    /// of the assembly route.
    pub ideal_fractions: Vec<f64>,
    /// Fraction of the grid discarded at each end before fitting.
    pub trim_fraction: f64,
    /// Rank capacity the truncated model must hold, as a multiple of the
    /// largest grid point.
    pub capacity_factor: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            level_cap: MAX_LEVEL,
            allow_shape_only: false,
            rho: None,
            ideal_fractions: vec![0.15, 0.3, 0.5, 0.7, 0.85],
            trim_fraction: 0.1,
            capacity_factor: 4,
        }
    }
}

/// Geometric grid `start, start·factor, …` up to `end` (inclusive).
pub fn geometric_grid(start: u64, end: u64, factor: u64) -> Result<Vec<u64>> {
    if start < 1 || end < start {
        return Err(Error::invalid("grid", "need 1 ≤ start ≤ end"));
    }
    if factor < 2 {
        return Err(Error::invalid("grid", "factor must be at least 2"));
    }
    let mut out = Vec::new();
    let mut n = start;
    while n <= end {
        out.push(n);
        match n.checked_mul(factor) {
            Some(next) => n = next,
            None => break,
        }
    }
    Ok(out)
}

/// Ordinary least squares on `(ln n, ln bound)` with symmetric trimming.
/// Returns `(slope, intercept, max_residual)`.
pub fn fit_loglog(samples: &[RateSample], trim_fraction: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::invalid("trim_fraction", "must lie in [0, 0.5)"));
    }
    let trim = (samples.len() as f64 * trim_fraction).floor() as usize;
    let kept = &samples[trim..samples.len() - trim];
    if kept.len() < 2 {
        return Err(Error::invalid(
            "samples",
            "need at least two points after trimming",
        ));
    }
    let mut xs = Vec::with_capacity(kept.len());
    let mut ys = Vec::with_capacity(kept.len());
    for (idx, s) in kept.iter().enumerate() {
        if idx > 0 && s.n <= kept[idx - 1].n {
            return Err(Error::invalid("samples", "grid must be strictly increasing"));
        }
        if !(s.bound > 0.0) {
            return Err(Error::invalid(
                "samples",
                format!("bound at n = {} is not positive", s.n),
            ));
        }
        xs.push((s.n as f64).ln());
        ys.push(s.bound.ln());
    }
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0f64, f64::max);
    Ok((slope, intercept, max_residual))
}

/// Intra-block width decay rate of the regime for the assembly route.
/// Negative for the non-increasing regime (widths grow with dimension).
fn block_decay_rate(params: &EmbeddingParams, kind: WidthKind) -> Result<(f64, bool)> {
    let inv1 = params.p1.recip();
    let inv2 = params.p2.recip();
    if inv1 == inv2 {
        return Ok((0.0, false));
    }
    if inv2 > inv1 {
        return Ok((inv1 - inv2, false));
    }
    let p1 = params.p1.get();
    let p2 = params.p2.get();
    match kind {
        WidthKind::Kolmogorov => {
            if p2 <= 1.0 {
                Ok((0.0, false))
            } else if params.p2.is_infinite() {
                Ok((1.0 / p1.max(2.0), true))
            } else {
                Err(Error::not_applicable(
                    "verify_exponent",
                    "no Kolmogorov block shape for p1 < p2 < inf",
                ))
            }
        }
        WidthKind::Gelfand => {
            if p1 <= 1.0 {
                let r = if p2 > 2.0 { inv1 - 0.5 } else { inv1 - inv2 };
                Ok((r, true))
            } else {
                Err(Error::not_applicable(
                    "verify_exponent",
                    "Gelfand block shapes need p1 ≤ 1 when p1 < p2",
                ))
            }
        }
        WidthKind::Approximation => {
            if p1 <= 1.0 && params.p2.is_infinite() {
                let ratio = params.mu() / params.d();
                let lambda = (2.0 * ratio / (1.0 + 2.0 * ratio) * 0.9).min(0.5);
                Ok((lambda / (2.0 * (1.0 - lambda)), true))
            } else {
                Err(Error::not_applicable(
                    "verify_exponent",
                    "approximation block shapes need p1 ≤ 1 and p2 = inf",
                ))
            }
        }
    }
}

/// Per-direction geometric tail sums of `coeff · x^j · y^i` outside the
/// `[0, J] × [0, I]` rectangle: the `j`-overflow region (`j > J`, all `i`)
/// and the `i`-overflow region (`j ≤ J`, `i > I`). Requires `x, y < 1`.
fn tail_regions(coeff: f64, x: f64, y: f64, j_max: u32, i_max: u32) -> (f64, f64) {
    let jt = f64::from(j_max) + 1.0;
    let it = f64::from(i_max) + 1.0;
    let over_j = coeff * x.powf(jt) / (1.0 - x) / (1.0 - y);
    let over_i = coeff * (1.0 - x.powf(jt)) / (1.0 - x) * y.powf(it) / (1.0 - y);
    (over_j, over_i)
}

struct Truncation {
    j_max: u32,
    i_max: u32,
    remainder: f64,
}

/// Smallest level with `tail(level) < share`; errors when the cap binds.
fn smallest_level(share: f64, cap: u32, tail: impl Fn(u32) -> f64) -> Result<u32> {
    for level in 0..=cap {
        if tail(level) < share {
            return Ok(level);
        }
    }
    Err(Error::TruncationLimit(format!(
        "tail estimate {:.3e} at level {cap} (the cap) does not reach the share \
         {share:.3e} of the remainder target; the truncation levels are the binding limit",
        tail(cap)
    )))
}

/// Chooses per-direction truncation levels against the remainder target and
/// then deepens the critical direction until the model holds `capacity`
/// ranks. `tail_j`/`tail_i` must be non-increasing in their level.
fn choose_truncation(
    params: &EmbeddingParams,
    target: f64,
    cap: u32,
    capacity: u64,
    tail_j: impl Fn(u32, u32) -> f64,
    tail_i: impl Fn(u32, u32) -> f64,
    combine: impl Fn(f64, f64) -> f64,
) -> Result<Truncation> {
    let mut j_max = smallest_level(target / 2.0, cap, |j| tail_j(j, cap))?;
    let mut i_max = smallest_level(target / 2.0, cap, |i| tail_i(j_max, i))?;
    let dim_capacity = |j_max: u32, i_max: u32| -> u64 {
        let mut total = 0u64;
        for j in 0..=j_max {
            for i in 0..=i_max {
                match crate::model::block_dim(params.dim, j, i) {
                    Ok(d) => total = total.saturating_add(d),
                    Err(_) => return u64::MAX,
                }
            }
        }
        total
    };
    let bump_i = params.alpha <= params.delta();
    while dim_capacity(j_max, i_max) < capacity {
        let level = if bump_i { &mut i_max } else { &mut j_max };
        if *level >= cap {
            return Err(Error::TruncationLimit(format!(
                "model rank capacity {} at J = {j_max}, I = {i_max} (cap {cap}) cannot \
                 resolve budgets up to {capacity}; the truncation levels are the \
                 binding limit",
                dim_capacity(j_max, i_max)
            )));
        }
        *level += 1;
    }
    let remainder = combine(tail_j(j_max, i_max), tail_i(j_max, i_max));
    if remainder >= target {
        return Err(Error::TruncationLimit(format!(
            "combined tail estimate {remainder:.3e} does not reach the remainder \
             target {target:.3e} within the level cap {cap}"
        )));
    }
    Ok(Truncation {
        j_max,
        i_max,
        remainder,
    })
}

/// Exact widths of the merged diagonal model: `(Σ_{k≥n} σ_(k)^r)^{1/r}`
/// over sorted entries with block multiplicities; the `n`-th largest entry
/// when `r = ∞`.
fn diagonal_bounds(mut entries: Vec<(f64, u64)>, r: f64, grid: &[u64]) -> Vec<f64> {
    entries.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite sigma"));
    let mut out = Vec::with_capacity(grid.len());
    if r.is_infinite() {
        for &n in grid {
            let mut cum = 0u64;
            let mut val = 0.0;
            for &(s, d) in &entries {
                cum = cum.saturating_add(d);
                if cum >= n {
                    val = s;
                    break;
                }
            }
            out.push(val);
        }
    } else {
        for &n in grid {
            let mut skip = n - 1;
            let mut total = 0.0f64;
            for &(s, d) in &entries {
                if skip >= d {
                    skip -= d;
                    continue;
                }
                total += (d - skip) as f64 * s.powf(r);
                skip = 0;
            }
            out.push(total.powf(1.0 / r));
        }
    }
    out
}

/// Verifies the predicted decay exponent with the default configuration.
pub fn verify_exponent(
    params: &EmbeddingParams,
    kind: WidthKind,
    n_grid: &[u64],
    tolerance: f64,
) -> Result<RateFit> {
    verify_exponent_with(params, kind, n_grid, tolerance, &VerifyConfig::default())
}

pub fn verify_exponent_with(
    params: &EmbeddingParams,
    kind: WidthKind,
    n_grid: &[u64],
    tolerance: f64,
    cfg: &VerifyConfig,
) -> Result<RateFit> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance", "must be positive"));
    }
    if n_grid.len() < 3 {
        return Err(Error::invalid("grid", "need at least three grid points"));
    }
    for w in n_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("grid", "grid must be strictly increasing"));
        }
    }
    if n_grid[0] < 1 {
        return Err(Error::invalid("grid", "grid indices start at 1"));
    }

    let outcome = match kind {
        WidthKind::Approximation => approximation_exponent(params)?,
        WidthKind::Gelfand => gelfand_exponent(params)?,
        WidthKind::Kolmogorov => kolmogorov_exponent(params)?,
    };
    let (kappa, case) = match outcome {
        FamilyOutcome::Covered { kappa, case } => (kappa, case),
        FamilyOutcome::NotCovered { reason } => return Err(Error::NotCovered { reason }),
    };

    let n_max = *n_grid.last().expect("grid validated non-empty");
    let target = tolerance / 10.0;
    let cap = cfg.level_cap.min(MAX_LEVEL);
    let capacity = cfg.capacity_factor.max(2) * n_max;
    let d = params.d();
    let delta = params.delta();
    let alpha = params.alpha;
    let vol = ball_volume(params.dim, 1.0).max(1.0);

    let inv1 = params.p1.recip();
    let inv2 = params.p2.recip();
    let diagonal_route =
        params.q1 == params.p1 && params.q2 == params.p2 && inv2 >= inv1;

    if diagonal_route {
        // merged diagonal model with exact ℓ_r tail aggregation
        let r = if inv2 == inv1 {
            f64::INFINITY
        } else {
            1.0 / (inv2 - inv1)
        };
        let (tail_j, tail_i): (Box<dyn Fn(u32, u32) -> f64>, Box<dyn Fn(u32, u32) -> f64>) =
            if r.is_infinite() {
                // tail mass in sup form: the largest excluded entry
                (
                    Box::new(move |j, _| 2f64.powf(-delta * (f64::from(j) + 1.0))),
                    Box::new(move |_, i| 2f64.powf(-alpha * (f64::from(i) + 1.0))),
                )
            } else {
                let x = 2f64.powf(d - r * delta);
                let y = 2f64.powf(d - r * alpha);
                if x >= 1.0 || y >= 1.0 {
                    return Err(Error::TruncationLimit(
                        "diagonal tail mass diverges; the embedding is too close to \
                         non-compact for the grid"
                            .to_string(),
                    ));
                }
                let coeff = vol;
                (
                    Box::new(move |j, i| tail_regions(coeff, x, y, j, i).0.powf(1.0 / r)),
                    Box::new(move |j, i| tail_regions(coeff, x, y, j, i).1.powf(1.0 / r)),
                )
            };
        let combine = |a: f64, b: f64| -> f64 {
            if r.is_infinite() {
                a.max(b)
            } else {
                (a.powf(r) + b.powf(r)).powf(1.0 / r)
            }
        };
        let trunc = choose_truncation(params, target, cap, capacity, tail_j, tail_i, combine)?;
        let model = WeightedSequenceModel::new(*params, trunc.j_max, trunc.i_max)?;
        let blocks = build_blocks(&model)?;
        let entries: Vec<(f64, u64)> = blocks.iter().map(|b| (b.sigma, b.dim)).collect();
        let bounds = diagonal_bounds(entries, r, n_grid);
        let samples: Vec<RateSample> = n_grid
            .iter()
            .zip(&bounds)
            .map(|(&n, &bound)| RateSample { n, bound })
            .collect();
        let (slope, intercept, max_residual) = fit_loglog(&samples, cfg.trim_fraction)?;
        let pass = (slope + kappa).abs() <= tolerance;
        return Ok(RateFit {
            samples,
            slope,
            intercept,
            max_residual,
            predicted_kappa: kappa,
            case,
            tolerance,
            pass,
            route: BoundRoute::DiagonalExact,
            shape_only: false,
            remainder_estimate: trunc.remainder,
            remainder_target: target,
            ideal_exponent: if r.is_infinite() { 0.0 } else { 1.0 / r },
            truncation: (trunc.j_max, trunc.i_max),
            rho: cfg.rho.unwrap_or_else(|| default_rho(params)),
        });
    }

    // assembly route: per-block tables combined with the ρ-power
    let (decay, shape_only) = block_decay_rate(params, kind)?;
    if shape_only && !cfg.allow_shape_only {
        return Err(Error::not_applicable(
            "verify_exponent",
            "this regime only admits envelope-based block tables; enable \
             shape-only fits to proceed",
        ));
    }
    let rho = cfg.rho.unwrap_or_else(|| default_rho(params));

    // admissible interval for 1/s: (max(decay, 0), μ/d + decay)
    let lo = decay.max(0.0);
    let hi = params.mu() / d + decay;
    if hi <= lo {
        return Err(Error::TruncationLimit(format!(
            "empty ideal-exponent interval ({lo}, {hi}) for this regime"
        )));
    }
    let mut chosen: Option<(Truncation, f64)> = None;
    for f in &cfg.ideal_fractions {
        let inv_s = lo + f * (hi - lo);
        let a = inv_s - decay;
        let x = 2f64.powf(rho * (d * a - delta));
        let y = 2f64.powf(rho * (d * a - alpha));
        if x >= 1.0 || y >= 1.0 {
            continue;
        }
        let coeff = vol.powf(rho * a.max(0.0));
        let scale = (n_max as f64).powf(-inv_s);
        let tail_j =
            |j: u32, i: u32| scale * tail_regions(coeff, x, y, j, i).0.powf(1.0 / rho);
        let tail_i =
            |j: u32, i: u32| scale * tail_regions(coeff, x, y, j, i).1.powf(1.0 / rho);
        let combine = |a: f64, b: f64| (a.powf(rho) + b.powf(rho)).powf(1.0 / rho);
        match choose_truncation(params, target, cap, capacity, tail_j, tail_i, combine) {
            Ok(trunc) => {
                if chosen
                    .as_ref()
                    .map_or(true, |(best, _)| trunc.remainder < best.remainder)
                {
                    chosen = Some((trunc, inv_s));
                }
            }
            Err(_) => continue,
        }
    }
    let Some((trunc, inv_s)) = chosen else {
        return Err(Error::TruncationLimit(format!(
            "no ideal exponent in ({lo:.4}, {hi:.4}) certifies the tail below \
             {target:.3e} within the level cap {cap}; the truncation levels are \
             the binding limit"
        )));
    };

    let model = WeightedSequenceModel::new(*params, trunc.j_max, trunc.i_max)?;
    let blocks = build_blocks(&model)?;
    let (ops, tables_shaped) = block_operators(params, kind, &blocks)?;
    let bounds = assemble_sweep(&ops, trunc.j_max + trunc.i_max, n_grid, rho)?;
    let samples: Vec<RateSample> = n_grid
        .iter()
        .zip(&bounds)
        .map(|(&n, &bound)| RateSample { n, bound })
        .collect();
    let (slope, intercept, max_residual) = fit_loglog(&samples, cfg.trim_fraction)?;
    let pass = (slope + kappa).abs() <= tolerance;
    Ok(RateFit {
        samples,
        slope,
        intercept,
        max_residual,
        predicted_kappa: kappa,
        case,
        tolerance,
        pass,
        route: BoundRoute::BlockAssembly,
        shape_only: tables_shaped,
        remainder_estimate: trunc.remainder,
        remainder_target: target,
        ideal_exponent: inv_s,
        truncation: (trunc.j_max, trunc.i_max),
        rho,
    })
}
