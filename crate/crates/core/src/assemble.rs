//! Ideal quasi-norms of width sequences and blockwise assembly of upper
//! bounds: given per-block width tables, distribute a total rank budget
//! over the blocks and combine the resulting widths through the power
//! `ρ = min(1, p2, q2)` of the target quasi-norm. Subadditivity of the
//! s-number scale makes `(Σ_b s_{n_b}(block)^ρ)^{1/ρ}` a valid upper bound
//! for `s_n` of the assembled operator whenever `Σ_b (n_b − 1) ≤ n − 1`.

use serde::{Deserialize, Serialize};

use crate::classify::WidthKind;
use crate::error::{Error, Result};
use crate::model::Block;
use crate::params::EmbeddingParams;

/// `sup_n n^{1/r} s_n` over a tabulated width sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealNormEstimate {
    pub r: f64,
    pub value: f64,
    /// Index attaining the supremum (smallest such).
    pub attained_n: usize,
    pub kind: Option<WidthKind>,
    /// Power used when this estimate enters the quasi-triangle inequality.
    pub rho: Option<f64>,
}

/// Evaluates the ideal quasi-norm `sup n^{1/r} s_n` of a tabulated,
/// non-increasing, nonnegative width sequence.
pub fn ideal_norm(widths: &[f64], r: f64) -> Result<IdealNormEstimate> {
    if widths.is_empty() {
        return Err(Error::InvalidTable("empty width table".to_string()));
    }
    if !(r > 0.0) {
        return Err(Error::invalid("r", format!("must be positive, got {r}")));
    }
    let mut prev = f64::INFINITY;
    for (idx, &w) in widths.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidTable(format!(
                "entry {idx} is not a finite nonnegative width: {w}"
            )));
        }
        if w > prev * (1.0 + 1e-12) {
            return Err(Error::InvalidTable(format!(
                "width sequence increases at index {idx}"
            )));
        }
        prev = prev.min(w);
    }
    let mut best = 0.0f64;
    let mut attained = 1usize;
    for (idx, &w) in widths.iter().enumerate() {
        let v = ((idx + 1) as f64).powf(1.0 / r) * w;
        if v > best {
            best = v;
            attained = idx + 1;
        }
    }
    Ok(IdealNormEstimate {
        r,
        value: best,
        attained_n: attained,
        kind: None,
        rho: None,
    })
}

/// Closed-form width table of one block, evaluable at any rank index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum BlockTable {
    /// `σ` for `n ≤ D` (equal source and target exponents).
    Flat { sigma: f64, dim: u64 },
    /// `σ (D − n + 1)^e`, `e = 1/p2 − 1/p1 > 0` (non-increasing regime).
    Power { sigma: f64, dim: u64, exponent: f64 },
    /// `σ min{1, n^{−1/2} ln(4eD/n)^{3/2}}` (target `ℓ_∞`, source below 2).
    LogSqrt { sigma: f64, dim: u64 },
    /// `σ min{1, (ln(1 + D/(n−1))/(n−1))^{1/p}}` (target `ℓ_∞`, source `p ≥ 2`).
    LogPow { sigma: f64, dim: u64, p: f64 },
    /// `σ min{1, ((ln(D/(n−1)) + 1)/(n−1))^e}` (Gelfand, source ≤ 1).
    GelfandLog { sigma: f64, dim: u64, exponent: f64 },
    /// `σ` up to `D^λ`, then `σ n^{−1/2}` (approximation, source ≤ 1, target `ℓ_∞`).
    SqrtPiece { sigma: f64, dim: u64, lambda: f64 },
}

impl BlockTable {
    pub fn dim(&self) -> u64 {
        match *self {
            BlockTable::Flat { dim, .. }
            | BlockTable::Power { dim, .. }
            | BlockTable::LogSqrt { dim, .. }
            | BlockTable::LogPow { dim, .. }
            | BlockTable::GelfandLog { dim, .. }
            | BlockTable::SqrtPiece { dim, .. } => dim,
        }
    }

    /// `s_n` of the block (upper value for envelope shapes).
    pub fn eval(&self, n: u64) -> f64 {
        if n == 0 {
            return f64::INFINITY;
        }
        if n > self.dim() {
            return 0.0;
        }
        let nf = n as f64;
        match *self {
            BlockTable::Flat { sigma, .. } => sigma,
            BlockTable::Power { sigma, dim, exponent } => {
                sigma * ((dim - n + 1) as f64).powf(exponent)
            }
            BlockTable::LogSqrt { sigma, dim } => {
                let shape =
                    nf.powf(-0.5) * (4.0 * std::f64::consts::E * dim as f64 / nf).ln().powf(1.5);
                sigma * shape.min(1.0)
            }
            BlockTable::LogPow { sigma, dim, p } => {
                if n == 1 {
                    return sigma;
                }
                let base = (1.0 + dim as f64 / (nf - 1.0)).ln() / (nf - 1.0);
                sigma * base.powf(1.0 / p).min(1.0)
            }
            BlockTable::GelfandLog { sigma, dim, exponent } => {
                if n == 1 {
                    return sigma;
                }
                let base = ((dim as f64 / (nf - 1.0)).ln() + 1.0) / (nf - 1.0);
                sigma * base.powf(exponent).min(1.0)
            }
            BlockTable::SqrtPiece { sigma, dim, lambda } => {
                if nf <= (dim as f64).powf(lambda) {
                    sigma
                } else {
                    sigma * nf.powf(-0.5)
                }
            }
        }
    }

    /// `sup_{1 ≤ n ≤ D} n^{1/s} · eval(n)` by geometric scan with local
    /// integer polish; exact for the flat shape.
    pub fn ideal_sup(&self, inv_s: f64) -> f64 {
        let dim = self.dim();
        if dim == 0 {
            return 0.0;
        }
        if let BlockTable::Flat { sigma, dim } = *self {
            return sigma * (dim as f64).powf(inv_s);
        }
        let score = |n: u64| -> f64 { (n as f64).powf(inv_s) * self.eval(n) };
        let mut best = 0.0f64;
        let mut best_n = 1u64;
        let mut n = 1u64;
        while n <= dim {
            let v = score(n);
            if v > best {
                best = v;
                best_n = n;
            }
            n = (n + n / 8).max(n + 1);
        }
        let lo = best_n.saturating_sub(best_n / 8).max(1);
        let hi = (best_n + best_n / 8).min(dim);
        let mut n = lo;
        while n <= hi {
            best = best.max(score(n));
            n += 1;
            if n - lo > 4096 {
                break;
            }
        }
        best.max(score(dim))
    }
}

/// A block together with its width table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockOperator {
    pub block: Block,
    pub table: BlockTable,
}

/// Canonical subadditivity power for the target quasi-norm:
/// `ρ = min(1, p2, q2)`.
pub fn default_rho(params: &EmbeddingParams) -> f64 {
    1f64.min(params.p2.get()).min(params.q2.get())
}

/// Builds the width table of one block for the given family. Returns the
/// table plus `shape_only = true` when the table is an envelope shape with
/// undetermined constants rather than a certified value.
pub fn block_table(
    params: &EmbeddingParams,
    kind: WidthKind,
    block: &Block,
) -> Result<(BlockTable, bool)> {
    let sigma = block.sigma;
    let dim = block.dim;
    let inv1 = params.p1.recip();
    let inv2 = params.p2.recip();
    if inv1 == inv2 {
        return Ok((BlockTable::Flat { sigma, dim }, false));
    }
    if inv2 > inv1 {
        // p2 < p1: exact for approximation and Gelfand numbers, and an upper
        // bound for Kolmogorov numbers, which they dominate
        return Ok((
            BlockTable::Power {
                sigma,
                dim,
                exponent: inv2 - inv1,
            },
            false,
        ));
    }
    // p1 < p2: envelope shapes only
    let p1 = params.p1.get();
    let p2 = params.p2.get();
    match kind {
        WidthKind::Kolmogorov => {
            if p2 <= 1.0 {
                // source-exponent normalization makes the block flat
                return Ok((BlockTable::Flat { sigma, dim }, false));
            }
            if !params.p2.is_infinite() {
                return Err(Error::not_applicable(
                    "block_table",
                    "no Kolmogorov block shape for p1 < p2 < inf",
                ));
            }
            let p_eff = p1.max(1.0);
            if p_eff < 2.0 {
                Ok((BlockTable::LogSqrt { sigma, dim }, true))
            } else {
                Ok((BlockTable::LogPow { sigma, dim, p: p_eff }, true))
            }
        }
        WidthKind::Gelfand => {
            if p1 > 1.0 {
                return Err(Error::not_applicable(
                    "block_table",
                    "Gelfand block shapes need p1 ≤ 1 when p1 < p2",
                ));
            }
            let exponent = if p2 > 2.0 { inv1 - 0.5 } else { inv1 - inv2 };
            Ok((BlockTable::GelfandLog { sigma, dim, exponent }, true))
        }
        WidthKind::Approximation => {
            if p1 > 1.0 || !params.p2.is_infinite() {
                return Err(Error::not_applicable(
                    "block_table",
                    "approximation block shapes need p1 ≤ 1 and p2 = inf",
                ));
            }
            // λ must satisfy λ/(2(1−λ)) < μ/d; stay clearly inside
            let ratio = params.mu() / params.d();
            let lambda = (2.0 * ratio / (1.0 + 2.0 * ratio) * 0.9).min(0.5);
            Ok((BlockTable::SqrtPiece { sigma, dim, lambda }, true))
        }
    }
}

/// Builds tables for a whole block family.
pub fn block_operators(
    params: &EmbeddingParams,
    kind: WidthKind,
    blocks: &[Block],
) -> Result<(Vec<BlockOperator>, bool)> {
    let mut shape_only = false;
    let mut ops = Vec::with_capacity(blocks.len());
    for b in blocks {
        let (table, shaped) = block_table(params, kind, b)?;
        shape_only |= shaped;
        ops.push(BlockOperator { block: *b, table });
    }
    Ok((ops, shape_only))
}

/// Result of a rank-allocation run.
#[derive(Clone, Debug, PartialEq)]
pub struct Assembly {
    pub bound: f64,
    /// Rank index assigned to each block (aligned with the input slice).
    pub allocation: Vec<u64>,
}

/// Upper bound for `s_{n_budget}` of the assembled operator: greedy
/// marginal-gain waterfilling with jump candidates, followed by local
/// exchange. Blocks beyond the cutoff diagonal `m_cutoff` receive no rank
/// and contribute their norms.
pub fn assemble_upper_bound(
    ops: &[BlockOperator],
    m_cutoff: u32,
    n_budget: u64,
    rho: f64,
) -> Result<Assembly> {
    if n_budget < 1 {
        return Err(Error::invalid("n_budget", "rank budget must be at least 1"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid("rho", format!("must lie in (0, 1], got {rho}")));
    }
    let mut alloc: Vec<u64> = vec![1; ops.len()];
    let head: Vec<usize> = ops
        .iter()
        .enumerate()
        .filter(|(_, op)| op.block.diagonal() <= m_cutoff)
        .map(|(i, _)| i)
        .collect();
    let mut spent: u64 = 0;
    let cap = n_budget - 1;

    // candidate rank jumps: geometric ladder plus the affordable full kill
    let best_jump = |op: &BlockOperator, current: u64, remaining: u64| -> Option<(u64, f64)> {
        let k_max = (op.table.dim() + 1).min(current + remaining);
        if k_max <= current {
            return None;
        }
        let cur_val = op.table.eval(current).powf(rho);
        let mut best: Option<(u64, f64)> = None;
        let mut step = 1u64;
        loop {
            let k = (current + step).min(k_max);
            let gain = cur_val - op.table.eval(k).powf(rho);
            let ratio = gain / (k - current) as f64;
            if best.map_or(true, |(_, r)| ratio > r) {
                best = Some((k, ratio));
            }
            if k == k_max {
                break;
            }
            step *= 2;
        }
        best.filter(|&(_, r)| r > 0.0)
    };

    loop {
        let remaining = cap - spent;
        if remaining == 0 {
            break;
        }
        let mut pick: Option<(usize, u64, f64)> = None;
        for &b in &head {
            if let Some((k, ratio)) = best_jump(&ops[b], alloc[b], remaining) {
                if pick.map_or(true, |(_, _, r)| ratio > r) {
                    pick = Some((b, k, ratio));
                }
            }
        }
        match pick {
            Some((b, k, _)) => {
                spent += k - alloc[b];
                alloc[b] = k;
            }
            None => break,
        }
    }

    // local exchange: move single units while it pays off
    for _ in 0..200 {
        let mut donor: Option<(usize, f64)> = None;
        for &b in &head {
            if alloc[b] > 1 {
                let loss =
                    ops[b].table.eval(alloc[b] - 1).powf(rho) - ops[b].table.eval(alloc[b]).powf(rho);
                if donor.map_or(true, |(_, l)| loss < l) {
                    donor = Some((b, loss));
                }
            }
        }
        let Some((db, loss)) = donor else { break };
        let mut taker: Option<(usize, f64)> = None;
        for &b in &head {
            if b == db || alloc[b] > ops[b].table.dim() {
                continue;
            }
            let gain = ops[b].table.eval(alloc[b]).powf(rho)
                - ops[b].table.eval(alloc[b] + 1).powf(rho);
            if taker.map_or(true, |(_, g)| gain > g) {
                taker = Some((b, gain));
            }
        }
        let Some((tb, gain)) = taker else { break };
        if gain > loss * (1.0 + 1e-12) {
            alloc[db] -= 1;
            alloc[tb] += 1;
        } else {
            break;
        }
    }

    let total: f64 = ops
        .iter()
        .zip(&alloc)
        .map(|(op, &n)| op.table.eval(n).powf(rho))
        .sum();
    Ok(Assembly {
        bound: total.powf(1.0 / rho),
        allocation: alloc,
    })
}

/// Monotone sweep over increasing budgets: larger budgets reuse the bound
/// of smaller ones when greedy happens to do worse, which stays valid by
/// monotonicity of s-numbers.
pub fn assemble_sweep(
    ops: &[BlockOperator],
    m_cutoff: u32,
    budgets: &[u64],
    rho: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(budgets.len());
    let mut best = f64::INFINITY;
    for &n in budgets {
        let a = assemble_upper_bound(ops, m_cutoff, n, rho)?;
        best = best.min(a.bound);
        out.push(best);
    }
    Ok(out)
}

/// Reference allocation by dynamic programming over exact unit costs;
/// exponential-free test oracle for small instances.
pub fn dp_optimal_assembly(
    ops: &[BlockOperator],
    m_cutoff: u32,
    n_budget: u64,
    rho: f64,
) -> Result<f64> {
    if n_budget < 1 {
        return Err(Error::invalid("n_budget", "rank budget must be at least 1"));
    }
    let cap = (n_budget - 1) as usize;
    // value[c] = minimal ρ-sum over blocks processed so far with c units spent
    let mut value = vec![0.0f64; cap + 1];
    for op in ops {
        let fixed = op.block.diagonal() > m_cutoff;
        let mut next = vec![f64::INFINITY; cap + 1];
        for c in 0..=cap {
            if !value[c].is_finite() {
                continue;
            }
            let max_units = if fixed {
                0
            } else {
                (op.table.dim() as usize).min(cap - c)
            };
            for units in 0..=max_units {
                let v = value[c] + op.table.eval(units as u64 + 1).powf(rho);
                let idx = c + units;
                if v < next[idx] {
                    next[idx] = v;
                }
            }
        }
        value = next;
    }
    let best = value.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(best.powf(1.0 / rho))
}
