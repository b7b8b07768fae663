//! Embedding parameters, derived quantities, and the compactness criterion.
//!
//! The object under study is the embedding of a polynomially weighted
//! smoothness space `A^{s1}_{p1,q1}(R^d, w_alpha)` into an unweighted
//! `A^{s2}_{p2,q2}(R^d)`, where `A` is either the Besov (`B`) or
//! Triebel-Lizorkin (`F`) scale and `w_alpha(x) = (1+|x|^2)^{alpha/2}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{serde_extended_f64, Exponent};

/// Relative tolerance for detecting case-boundary coincidences.
///
/// Inputs within this tolerance of a boundary are treated as lying on it;
/// the classifier then reports the boundary instead of picking a side.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// `|a - b| ≤ BOUNDARY_TOL · max(|a|, |b|)`; infinities only match exactly.
pub(crate) fn near(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= BOUNDARY_TOL * a.abs().max(b.abs())
}

/// Which scale a space belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    B,
    F,
}

/// The full parameter tuple of the embedding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub s1: f64,
    pub s2: f64,
    pub p1: Exponent,
    pub q1: Exponent,
    pub p2: Exponent,
    pub q2: Exponent,
    /// Weight exponent, `> 0`.
    pub alpha: f64,
    /// Euclidean dimension, `≥ 1`.
    pub dim: u32,
    pub source_type: SpaceKind,
    pub target_type: SpaceKind,
}

impl EmbeddingParams {
    /// Besov-to-Besov embedding; `q1 = p1`, `q2 = p2`.
    pub fn besov(s1: f64, p1: Exponent, s2: f64, p2: Exponent, alpha: f64, dim: u32) -> Self {
        EmbeddingParams {
            s1,
            s2,
            p1,
            q1: p1,
            p2,
            q2: p2,
            alpha,
            dim,
            source_type: SpaceKind::B,
            target_type: SpaceKind::B,
        }
    }

    pub fn with_q(mut self, q1: Exponent, q2: Exponent) -> Self {
        self.q1 = q1;
        self.q2 = q2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s1.is_finite() {
            return Err(Error::invalid("s1", "must be finite"));
        }
        if !self.s2.is_finite() {
            return Err(Error::invalid("s2", "must be finite"));
        }
        if self.s2 >= self.s1 {
            return Err(Error::invalid(
                "s2",
                format!("requires s2 < s1, got s1 = {}, s2 = {}", self.s1, self.s2),
            ));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(
                "alpha",
                format!("weight exponent must be positive, got {}", self.alpha),
            ));
        }
        if self.dim < 1 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        if self.source_type == SpaceKind::F && self.p1.is_infinite() {
            return Err(Error::invalid("p1", "F-type source requires p1 < inf"));
        }
        if self.target_type == SpaceKind::F && self.p2.is_infinite() {
            return Err(Error::invalid("p2", "F-type target requires p2 < inf"));
        }
        Ok(())
    }

    pub fn d(&self) -> f64 {
        f64::from(self.dim)
    }

    /// `δ = s1 − s2 − d(1/p1 − 1/p2)`.
    pub fn delta(&self) -> f64 {
        self.s1 - self.s2 - self.d() * (self.p1.recip() - self.p2.recip())
    }

    /// `μ = min(α, δ)`.
    pub fn mu(&self) -> f64 {
        self.alpha.min(self.delta())
    }

    /// `1/p̃ = μ/d + 1/p1`. May be nonpositive when the embedding is not
    /// compact; under compactness it is strictly positive.
    pub fn inv_p_tilde(&self) -> f64 {
        self.mu() / self.d() + self.p1.recip()
    }
}

/// Quantities derived from the parameter tuple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub delta: f64,
    pub mu: f64,
    /// Reciprocal of `μ/d + 1/p1`; serialized as `"inf"`/`"-inf"` when the
    /// defining sum is zero or the value is otherwise non-finite.
    #[serde(with = "serde_extended_f64")]
    pub p_tilde: f64,
    /// `(1/p1 − 1/p2)/(1/2 − 1/p2)`; undefined when `p2 = 2`.
    pub theta: Option<f64>,
    /// `(1/p2′ − 1/p1′)/(1/2 − 1/p1′)`; undefined when `p1′ = 2`.
    pub theta1: Option<f64>,
    /// `t = min(p1′, p2)`.
    pub t: Exponent,
    pub p1_conj: Exponent,
    pub p2_conj: Exponent,
}

/// Evaluates every derived quantity of the parameter tuple.
pub fn derive_quantities(params: &EmbeddingParams) -> Result<DerivedQuantities> {
    params.validate()?;
    let delta = params.delta();
    let mu = params.mu();
    let inv_pt = mu / params.d() + params.p1.recip();
    let p_tilde = if inv_pt == 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv_pt
    };
    let p1_conj = params.p1.conjugate();
    let p2_conj = params.p2.conjugate();
    let theta = if params.p2.get() == 2.0 {
        None
    } else {
        Some((params.p1.recip() - params.p2.recip()) / (0.5 - params.p2.recip()))
    };
    let theta1 = if p1_conj.get() == 2.0 {
        None
    } else {
        Some((p2_conj.recip() - p1_conj.recip()) / (0.5 - p1_conj.recip()))
    };
    Ok(DerivedQuantities {
        delta,
        mu,
        p_tilde,
        theta,
        theta1,
        t: Exponent::min(p1_conj, params.p2),
        p1_conj,
        p2_conj,
    })
}

/// Compactness criterion: the embedding is compact if and only if
/// `min(α, δ) > d · max(1/p2 − 1/p1, 0)`.
pub fn check_compact(params: &EmbeddingParams) -> Result<bool> {
    params.validate()?;
    let gap = (params.p2.recip() - params.p1.recip()).max(0.0);
    Ok(params.mu() > params.d() * gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn derive_direct_substitution() {
        let params = EmbeddingParams::besov(2.0, p(2.0), 0.0, p(2.0), 1.0, 1);
        let q = derive_quantities(&params).unwrap();
        assert_eq!(q.delta, 2.0);
        assert_eq!(q.mu, 1.0);
        // 1/p̃ = 1 + 1/2 = 3/2
        assert!((q.p_tilde - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(q.p1_conj.get(), 2.0);
        assert_eq!(q.p2_conj.get(), 2.0);
        assert_eq!(q.t.get(), 2.0);
        assert!(q.theta.is_none());
        assert!(q.theta1.is_none());
    }

    #[test]
    fn conjugates_follow_convention() {
        let params = EmbeddingParams::besov(3.0, Exponent::INF, 0.0, p(0.5), 1.0, 1);
        let q = derive_quantities(&params).unwrap();
        assert_eq!(q.p1_conj.get(), 1.0);
        assert!(q.p2_conj.is_infinite());
    }

    #[test]
    fn compactness_criterion() {
        // min(1, 2) = 1 > 0
        let params = EmbeddingParams::besov(2.0, p(2.0), 0.0, p(2.0), 1.0, 1);
        assert!(check_compact(&params).unwrap());

        // p1 = 3, p2 = 1: d max(1/p2 - 1/p1, 0) = 2/3 beats mu = min(0.2, 0.7)
        let params = EmbeddingParams::besov(0.7 + (1.0 / 3.0 - 1.0), p(3.0), 0.0, p(1.0), 0.2, 1);
        assert!((params.delta() - 0.7).abs() < 1e-12);
        assert!(!check_compact(&params).unwrap());
    }

    #[test]
    fn zero_alpha_is_rejected() {
        let mut params = EmbeddingParams::besov(2.0, p(2.0), 0.0, p(2.0), 1.0, 1);
        params.alpha = 0.0;
        match check_compact(&params) {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "alpha"),
            other => panic!("expected alpha validation error, got {other:?}"),
        }
    }

    #[test]
    fn f_space_validity() {
        let mut params = EmbeddingParams::besov(2.0, Exponent::INF, 0.0, p(2.0), 1.0, 1);
        params.source_type = SpaceKind::F;
        assert!(params.validate().is_err());
        params.source_type = SpaceKind::B;
        assert!(params.validate().is_ok());
    }

    #[test]
    fn smoothness_ordering_enforced() {
        let params = EmbeddingParams::besov(1.0, p(2.0), 1.0, p(2.0), 1.0, 1);
        match params.validate() {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "s2"),
            other => panic!("expected s2 error, got {other:?}"),
        }
    }
}
