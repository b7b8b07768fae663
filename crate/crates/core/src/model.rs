//! Weighted sequence-space model of the embedding: a doubly indexed family
//! of blocks `(j, i)` where `j` is the dyadic smoothness level and `i` the
//! weight annulus, with the head/tail split along diagonals `j + i = m`.
//!
//! Block `(j, i)` collects the lattice points `k ∈ Z^d` with
//! `2^{i−1} ≤ 2^{−j}|k| < 2^i` (all `|2^{−j}k| < 1` for `i = 0`), carries
//! the scaling factor `σ = 2^{−jδ−iα}`, and acts as `σ · id` between
//! `ℓ_{p1}` and `ℓ_{p2}` on its coordinates. Dimensions are exact lattice
//! counts where the count is affordable (`d ≤ 3` up to a cost cap) and the
//! rounded volume of the annulus beyond.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{check_compact, EmbeddingParams};

/// Hard ceiling on the truncation levels.
pub const MAX_LEVEL: u32 = 14;

/// Cost cap for exact lattice counting (loop iterations, roughly).
const EXACT_COUNT_COST_CAP: u64 = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSequenceModel {
    pub params: EmbeddingParams,
    /// Maximum smoothness level `j`.
    pub j_max: u32,
    /// Maximum annulus index `i`.
    pub i_max: u32,
}

impl WeightedSequenceModel {
    pub fn new(params: EmbeddingParams, j_max: u32, i_max: u32) -> Result<Self> {
        params.validate()?;
        if j_max > MAX_LEVEL || i_max > MAX_LEVEL {
            return Err(Error::invalid(
                "j_max",
                format!("truncation levels capped at {MAX_LEVEL}"),
            ));
        }
        Ok(WeightedSequenceModel {
            params,
            j_max,
            i_max,
        })
    }
}

/// One block of the discretized embedding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub j: u32,
    pub i: u32,
    /// Lattice-point count of the annulus.
    pub dim: u64,
    /// Scaling factor `2^{−jδ−iα}`.
    pub sigma: f64,
}

impl Block {
    pub fn diagonal(&self) -> u32 {
        self.j + self.i
    }
}

/// `#{k ∈ Z : k² < s}`.
fn count_1d(s: u64) -> u64 {
    if s == 0 {
        return 0;
    }
    let r = isqrt(s - 1);
    2 * r + 1
}

/// Integer square root: largest `r` with `r² ≤ s`.
fn isqrt(s: u64) -> u64 {
    if s == 0 {
        return 0;
    }
    let mut r = (s as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |rr| rr > s) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |rr| rr <= s) {
        r += 1;
    }
    r
}

/// `#{k ∈ Z^d : |k|² < s}` by exact enumeration over the leading coordinate.
fn lattice_ball_count(d: u32, s: u64) -> u64 {
    match d {
        1 => count_1d(s),
        2 => {
            if s == 0 {
                return 0;
            }
            let r = isqrt(s - 1);
            let mut total = count_1d(s);
            for k in 1..=r {
                total += 2 * count_1d(s - k * k);
            }
            total
        }
        3 => {
            if s == 0 {
                return 0;
            }
            let r = isqrt(s - 1);
            let mut total = lattice_ball_count(2, s);
            for k in 1..=r {
                total += 2 * lattice_ball_count(2, s - k * k);
            }
            total
        }
        _ => unreachable!("exact counting is limited to d ≤ 3"),
    }
}

fn gamma_half_integer(two_a: u32) -> f64 {
    // Γ(two_a / 2) for two_a ≥ 1
    if two_a % 2 == 0 {
        let mut g = 1.0;
        for k in 2..(two_a / 2) {
            g *= k as f64;
        }
        g
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut a = 0.5;
        while (2.0 * a) as u32 + 1 < two_a {
            g *= a;
            a += 1.0;
        }
        g
    }
}

/// Volume of the Euclidean ball of radius `r` in `R^d`.
pub fn ball_volume(d: u32, r: f64) -> f64 {
    let df = f64::from(d);
    std::f64::consts::PI.powf(df / 2.0) / gamma_half_integer(d + 2) * r.powf(df)
}

/// Estimated cost of an exact count at squared radius `s` in dimension `d`.
fn exact_count_cost(d: u32, s: u64) -> u64 {
    let r = isqrt(s.saturating_sub(1)) + 1;
    match d {
        1 => 1,
        2 => r,
        3 => r.saturating_mul(r),
        _ => u64::MAX,
    }
}

/// Lattice count of `{k : |k|² < s}`, exact when affordable.
fn ball_count(d: u32, s: u64, log2_radius: u32) -> Result<u64> {
    if d <= 3 && exact_count_cost(d, s) <= EXACT_COUNT_COST_CAP {
        return Ok(lattice_ball_count(d, s));
    }
    let vol = ball_volume(d, 2f64.powi(log2_radius as i32));
    if vol > u64::MAX as f64 / 2.0 {
        return Err(Error::invalid(
            "dim",
            format!("block dimension overflows at d = {d}, radius 2^{log2_radius}"),
        ));
    }
    Ok(vol.round() as u64)
}

/// Lattice-point count of block `(j, i)` in dimension `d`.
pub fn block_dim(d: u32, j: u32, i: u32) -> Result<u64> {
    let outer_log2 = j + i;
    if 2 * outer_log2 >= 63 && d >= 2 {
        // exact integer radii would overflow; fall back to volumes
        let outer = ball_volume(d, 2f64.powi(outer_log2 as i32));
        let inner = if i == 0 {
            0.0
        } else {
            ball_volume(d, 2f64.powi(outer_log2 as i32 - 1))
        };
        let v = (outer - inner).round();
        if v > u64::MAX as f64 / 2.0 {
            return Err(Error::invalid(
                "dim",
                format!("block dimension overflows at (j, i) = ({j}, {i}), d = {d}"),
            ));
        }
        return Ok(v as u64);
    }
    let s_outer = 1u64 << (2 * outer_log2);
    if i == 0 {
        ball_count(d, s_outer, outer_log2)
    } else {
        let s_inner = 1u64 << (2 * (outer_log2 - 1));
        Ok(ball_count(d, s_outer, outer_log2)? - ball_count(d, s_inner, outer_log2 - 1)?)
    }
}

/// Block factor `2^{−jδ−iα}`.
pub fn block_sigma(delta: f64, alpha: f64, j: u32, i: u32) -> f64 {
    2f64.powf(-(f64::from(j) * delta + f64::from(i) * alpha))
}

/// Builds every block `(j, i)` with `j ≤ j_max`, `i ≤ i_max`.
///
/// Refuses non-compact parameter tuples: the blockwise factors would not
/// produce a convergent assembly.
pub fn build_blocks(model: &WeightedSequenceModel) -> Result<Vec<Block>> {
    if !check_compact(&model.params)? {
        return Err(Error::NotCompact {
            detail: "block assembly requires a compact embedding".to_string(),
        });
    }
    let delta = model.params.delta();
    let alpha = model.params.alpha;
    let d = model.params.dim;
    let mut blocks = Vec::with_capacity(((model.j_max + 1) * (model.i_max + 1)) as usize);
    for j in 0..=model.j_max {
        for i in 0..=model.i_max {
            blocks.push(Block {
                j,
                i,
                dim: block_dim(d, j, i)?,
                sigma: block_sigma(delta, alpha, j, i),
            });
        }
    }
    Ok(blocks)
}

/// Splits blocks at cutoff `M`: the head holds every block with
/// `j + i ≤ M`, the tail the rest of the truncated family.
pub fn split_pq(blocks: &[Block], m_cutoff: u32) -> (Vec<Block>, Vec<Block>) {
    let mut head = Vec::new();
    let mut tail = Vec::new();
    for b in blocks {
        if b.diagonal() <= m_cutoff {
            head.push(*b);
        } else {
            tail.push(*b);
        }
    }
    (head, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Exponent;

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    fn compact_params(dim: u32) -> EmbeddingParams {
        EmbeddingParams::besov(3.0, p(2.0), 0.0, p(2.0), 1.0, dim)
    }

    #[test]
    fn one_dimensional_counts() {
        // |2^{-2} k| < 1  =>  k in {-3..3}
        assert_eq!(block_dim(1, 2, 0).unwrap(), 7);
        // 4 ≤ |k| < 8, both signs
        assert_eq!(block_dim(1, 0, 3).unwrap(), 8);
        assert_eq!(block_dim(1, 0, 0).unwrap(), 1);
        assert_eq!(block_dim(1, 1, 0).unwrap(), 3);
    }

    #[test]
    fn sigma_substitution() {
        assert_eq!(block_sigma(2.0, 1.0, 1, 2), 0.0625);
    }

    #[test]
    fn brute_force_counts_in_low_dimensions() {
        for d in [2u32, 3] {
            for m in 0..=3u32 {
                let s = 1u64 << (2 * m);
                let mut brute = 0u64;
                let r = 1i64 << m;
                let dims = d as usize;
                let mut k = vec![-r; dims];
                'outer: loop {
                    let sq: i64 = k.iter().map(|v| v * v).sum();
                    if (sq as u64) < s {
                        brute += 1;
                    }
                    for idx in 0..dims {
                        k[idx] += 1;
                        if k[idx] <= r {
                            continue 'outer;
                        }
                        k[idx] = -r;
                    }
                    break;
                }
                assert_eq!(lattice_ball_count(d, s), brute, "d={d}, m={m}");
            }
        }
    }

    #[test]
    fn dimension_growth_is_two_sided_geometric() {
        // c1·2^{(j+i)d} ≤ dim ≤ c2·2^{(j+i)d} with fixed constants
        for d in [1u32, 2, 3] {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for m in 1..=12u32 {
                let dim = block_dim(d, 0, m).unwrap() as f64;
                let scale = 2f64.powi((m * d) as i32);
                lo = lo.min(dim / scale);
                hi = hi.max(dim / scale);
            }
            assert!(lo > 0.0, "d={d}: lower constant degenerate");
            assert!(hi / lo < 8.0, "d={d}: ratio {}", hi / lo);
        }
    }

    #[test]
    fn split_partitions_by_diagonal() {
        let model = WeightedSequenceModel::new(compact_params(1), 2, 2).unwrap();
        let blocks = build_blocks(&model).unwrap();
        assert_eq!(blocks.len(), 9);

        let (head, tail) = split_pq(&blocks, 0);
        assert_eq!(head.len(), 1);
        assert_eq!(tail.len(), 8);

        let (head, tail) = split_pq(&blocks, 1);
        assert_eq!(head.len(), 3);
        assert_eq!(tail.len(), 6);

        let (_, tail) = split_pq(&blocks, 4);
        assert!(tail.is_empty());

        // disjoint and exhaustive for every cutoff
        for m in 0..=4 {
            let (head, tail) = split_pq(&blocks, m);
            assert_eq!(head.len() + tail.len(), blocks.len());
            assert!(head.iter().all(|b| b.diagonal() <= m));
            assert!(tail.iter().all(|b| b.diagonal() > m));
        }
    }

    #[test]
    fn non_compact_refused() {
        let params = EmbeddingParams::besov(0.4, p(2.0), 0.0, p(1.0), 0.2, 1);
        let model = WeightedSequenceModel::new(params, 2, 2).unwrap();
        assert!(matches!(
            build_blocks(&model),
            Err(Error::NotCompact { .. })
        ));
    }

    #[test]
    fn volume_estimate_matches_exact_order() {
        // sanity for the d > 3 path: volume vs exact count in d = 3
        let exact = lattice_ball_count(3, 1 << 12) as f64;
        let vol = ball_volume(3, 2f64.powi(6));
        assert!((exact / vol - 1.0).abs() < 0.05);
    }
}
