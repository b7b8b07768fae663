//! Widths of finite-dimensional identity and diagonal operators between
//! `ℓ_p` spaces: exact values where a closed formula exists, two-sided rate
//! envelopes elsewhere, and a spectral oracle for the Euclidean case.
//!
//! Envelope shapes come with absolute constants the estimates leave
//! undetermined; such shapes are evaluated with every undetermined constant
//! set to `1` and flagged `constants_undetermined`. Downstream consumers
//! must compare rates, never absolute levels, of flagged values.

use serde::{Deserialize, Serialize};

use crate::classify::WidthKind;
use crate::error::{Error, Result};
use crate::exponent::Exponent;

/// Default `λ` for the piecewise approximation-number envelope.
pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Default factor `c ∈ (0, 1]` in the test-index construction `n = ⌈c·m⌉ + 1`
/// used by the Kolmogorov lower shape on a half-dimension section.
pub const DEFAULT_SECTION_FACTOR: f64 = 0.5;

/// A scaled identity `scale · id : ℓ_{p_src}^N → ℓ_{p_dst}^N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteEmbedding {
    /// Dimension `N ≥ 1`.
    pub dim: usize,
    pub p_src: Exponent,
    pub p_dst: Exponent,
    /// Nonnegative scale factor.
    pub scale: f64,
}

impl FiniteEmbedding {
    pub fn new(dim: usize, p_src: Exponent, p_dst: Exponent) -> Result<Self> {
        Self::scaled(dim, p_src, p_dst, 1.0)
    }

    pub fn scaled(dim: usize, p_src: Exponent, p_dst: Exponent, scale: f64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(Error::invalid(
                "scale",
                format!("must be finite and nonnegative, got {scale}"),
            ));
        }
        Ok(FiniteEmbedding {
            dim,
            p_src,
            p_dst,
            scale,
        })
    }

    /// `‖scale · id‖`: `scale` for `p_src ≤ p_dst`, else
    /// `scale · N^{1/p_dst − 1/p_src}`.
    pub fn operator_norm(&self) -> f64 {
        let e = self.p_dst.recip() - self.p_src.recip();
        if e <= 0.0 {
            self.scale
        } else {
            self.scale * (self.dim as f64).powf(e)
        }
    }
}

/// A diagonal operator with nonnegative entries on `ℓ_p^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalOperator {
    pub entries: Vec<f64>,
    pub p: Exponent,
}

impl DiagonalOperator {
    pub fn new(entries: Vec<f64>, p: Exponent) -> Result<Self> {
        if entries.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::invalid(
                "entries",
                "diagonal entries must be finite and nonnegative",
            ));
        }
        Ok(DiagonalOperator { entries, p })
    }
}

/// Provenance of a width value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactFormula,
    Envelope,
    OracleSpectral,
    OracleSubspace,
    Reduction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WidthValue {
    Exact { value: f64 },
    Envelope {
        lower_shape: f64,
        upper_shape: f64,
        constants_undetermined: bool,
    },
}

/// A width value (or two-sided envelope) for one rank index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthResult {
    pub kind: WidthKind,
    pub n: usize,
    pub value: WidthValue,
    pub method: Method,
}

impl WidthResult {
    fn exact(kind: WidthKind, n: usize, value: f64, method: Method) -> Self {
        WidthResult {
            kind,
            n,
            value: WidthValue::Exact { value },
            method,
        }
    }

    fn envelope(kind: WidthKind, n: usize, lower: f64, upper: f64) -> Self {
        WidthResult {
            kind,
            n,
            value: WidthValue::Envelope {
                lower_shape: lower,
                upper_shape: upper,
                constants_undetermined: true,
            },
            method: Method::Envelope,
        }
    }

    /// The exact value, or the envelope's upper shape.
    pub fn upper(&self) -> f64 {
        match self.value {
            WidthValue::Exact { value } => value,
            WidthValue::Envelope { upper_shape, .. } => upper_shape,
        }
    }

    pub fn exact_value(&self) -> Option<f64> {
        match self.value {
            WidthValue::Exact { value } => Some(value),
            WidthValue::Envelope { .. } => None,
        }
    }
}

fn check_index(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::invalid("n", "rank index must be at least 1"));
    }
    Ok(())
}

/// Exact widths in the non-increasing regime `p_dst ≤ p_src`:
/// `scale · (N − n + 1)^{1/p_dst − 1/p_src}` for `n ≤ N`, `0` beyond.
///
/// Valid for approximation and Gelfand numbers over the whole quasi-Banach
/// range; Kolmogorov numbers obey no such formula when `p_dst < 1`, so that
/// kind is rejected here and served by [`kolmogorov_envelope`].
pub fn exact_width_nonincreasing(
    emb: &FiniteEmbedding,
    n: usize,
    kind: WidthKind,
) -> Result<WidthResult> {
    check_index(n)?;
    if kind == WidthKind::Kolmogorov {
        return Err(Error::not_applicable(
            "exact_width_nonincreasing",
            "no exact Kolmogorov formula in this regime; use kolmogorov_envelope",
        ));
    }
    if emb.p_dst.get() > emb.p_src.get() {
        return Err(Error::not_applicable(
            "exact_width_nonincreasing",
            "requires p_dst ≤ p_src; use an envelope for increasing exponents",
        ));
    }
    if n > emb.dim {
        return Ok(WidthResult::exact(kind, n, 0.0, Method::ExactFormula));
    }
    let e = emb.p_dst.recip() - emb.p_src.recip();
    let value = emb.scale * ((emb.dim - n + 1) as f64).powf(e);
    Ok(WidthResult::exact(kind, n, value, Method::ExactFormula))
}

/// Two-sided shape envelope for Kolmogorov numbers.
///
/// Covered regimes: `p_dst = ∞` with `1 ≤ p_src < ∞` (logarithmic shapes),
/// and `p_dst ≤ p_src` (the lower shape realizes the half-dimension section
/// bound `m^{1/p_dst − 1/p_src}` at indices up to `⌈c·m⌉ + 1`, `m = ⌊N/2⌋`;
/// the upper shape is the approximation-number value, which dominates).
/// Sources with `p_src < 1` and `p_src < p_dst` must first be normalized via
/// [`reduce_quasi_banach`].
pub fn kolmogorov_envelope(emb: &FiniteEmbedding, n: usize) -> Result<WidthResult> {
    check_index(n)?;
    let kind = WidthKind::Kolmogorov;
    if n > emb.dim {
        return Ok(WidthResult::exact(kind, n, 0.0, Method::ExactFormula));
    }
    let nf = n as f64;
    let dimf = emb.dim as f64;
    let inv_src = emb.p_src.recip();
    let inv_dst = emb.p_dst.recip();

    if inv_dst >= inv_src {
        // p_dst ≤ p_src (flat included)
        let e = inv_dst - inv_src;
        let m = emb.dim / 2;
        let section_index = (DEFAULT_SECTION_FACTOR * m as f64).ceil() as usize + 1;
        let lower = if m >= 1 && n <= section_index {
            emb.scale * (m as f64).powf(e)
        } else {
            0.0
        };
        let upper = emb.scale * (dimf - nf + 1.0).powf(e);
        return Ok(WidthResult::envelope(kind, n, lower.min(upper), upper));
    }

    if !emb.p_dst.is_infinite() {
        return Err(Error::not_applicable(
            "kolmogorov_envelope",
            "no envelope for p_src < p_dst < inf; reduce the source exponent or \
             use the subspace oracle",
        ));
    }
    let ps = emb.p_src.get();
    if ps < 1.0 {
        return Err(Error::not_applicable(
            "kolmogorov_envelope",
            "p_src < 1 with p_dst = inf: apply reduce_quasi_banach first",
        ));
    }
    if ps < 2.0 {
        // sqrt-with-log shapes; the matching lower bound needs n ≤ N/4
        let (lower, upper) = if 4 * n <= emb.dim {
            (
                nf.powf(-0.5),
                nf.powf(-0.5)
                    * (std::f64::consts::E * dimf / nf).ln().powf(1.5),
            )
        } else {
            (
                0.0,
                nf.powf(-0.5)
                    * (4.0 * std::f64::consts::E * dimf / nf).ln().powf(1.5),
            )
        };
        return Ok(WidthResult::envelope(
            kind,
            n,
            emb.scale * lower,
            emb.scale * upper,
        ));
    }
    if ps.is_infinite() {
        unreachable!("p_src = p_dst = inf is handled by the non-increasing branch");
    }
    // 2 ≤ p_src < inf: log(1 + N/(n−1))/(n−1) shape, capped at the norm;
    // the explicit 1/4 prefactor on the lower estimate is determined
    let base = if n == 1 {
        f64::INFINITY
    } else {
        (1.0 + dimf / (nf - 1.0)).ln() / (nf - 1.0)
    };
    let shape = base.powf(1.0 / ps).min(1.0);
    Ok(WidthResult::envelope(
        kind,
        n,
        emb.scale * 0.25 * shape,
        emb.scale * shape,
    ))
}

/// Two-sided shape envelope for Gelfand numbers of `ℓ_{p_src}^N → ℓ_{p_dst}^N`
/// with `0 < p_src ≤ 1 < …`, i.e. `p_src ≤ 1` and `p_src < p_dst`.
///
/// Both regimes share the base `min{1, (ln(N/(n−1)) + 1)/(n−1)}`; the target
/// exponent decides the shape powers. When the dimension is exactly `2n` the
/// lower shape switches to the section bound (`n^{1/2−1/p_src}` for
/// `p_dst ≥ 2`, `n^{1/p_dst−1/p_src}` otherwise).
pub fn gelfand_envelope(emb: &FiniteEmbedding, n: usize) -> Result<WidthResult> {
    check_index(n)?;
    let kind = WidthKind::Gelfand;
    let ps = emb.p_src.get();
    let pd = emb.p_dst.get();
    if ps > 1.0 || pd <= ps {
        return Err(Error::not_applicable(
            "gelfand_envelope",
            "requires 0 < p_src ≤ 1 and p_src < p_dst",
        ));
    }
    if n > emb.dim {
        return Ok(WidthResult::exact(kind, n, 0.0, Method::ExactFormula));
    }
    if n == 1 {
        // the first width is the operator norm, which is 1 here
        return Ok(WidthResult::exact(kind, n, emb.scale, Method::ExactFormula));
    }
    let nf = n as f64;
    let dimf = emb.dim as f64;
    let inv_src = emb.p_src.recip();
    let inv_dst = emb.p_dst.recip();
    let base = (((dimf / (nf - 1.0)).ln() + 1.0) / (nf - 1.0)).min(1.0);
    let at_double = emb.dim == 2 * n;
    let (lower, upper) = if pd > 2.0 {
        let lower = if at_double {
            nf.powf(0.5 - inv_src)
        } else {
            base.powf(inv_src - inv_dst)
        };
        (lower, base.powf(inv_src - 0.5))
    } else {
        let lower = if at_double {
            nf.powf(inv_dst - inv_src)
        } else {
            base.powf(inv_src - inv_dst)
        };
        (lower, base.powf(inv_src - inv_dst))
    };
    Ok(WidthResult::envelope(
        kind,
        n,
        emb.scale * lower.min(upper),
        emb.scale * upper,
    ))
}

/// Piecewise envelope for approximation numbers of `ℓ_{p_src}^N → ℓ_∞^N`,
/// `0 < p_src ≤ 1`: upper shape `1` for `n ≤ N^λ`, `n^{−1/2}` for
/// `N^λ < n ≤ N`, exact `0` beyond; the lower shape `n^{−1/2}` applies on
/// dimension exactly `2n`.
pub fn approximation_envelope(
    emb: &FiniteEmbedding,
    n: usize,
    lambda: f64,
) -> Result<WidthResult> {
    check_index(n)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid(
            "lambda",
            format!("must lie in (0, 1), got {lambda}"),
        ));
    }
    let kind = WidthKind::Approximation;
    if emb.p_src.get() > 1.0 || !emb.p_dst.is_infinite() {
        return Err(Error::not_applicable(
            "approximation_envelope",
            "requires 0 < p_src ≤ 1 and p_dst = inf",
        ));
    }
    if n > emb.dim {
        return Ok(WidthResult::exact(kind, n, 0.0, Method::ExactFormula));
    }
    let nf = n as f64;
    let upper = if nf <= (emb.dim as f64).powf(lambda) {
        1.0
    } else {
        nf.powf(-0.5)
    };
    let lower = if emb.dim == 2 * n { nf.powf(-0.5) } else { 0.0 };
    Ok(WidthResult::envelope(
        kind,
        n,
        emb.scale * lower.min(upper),
        emb.scale * upper,
    ))
}

/// Source-exponent normalization for Kolmogorov numbers: for `0 < p_src < 1`
/// and `p_src < p_dst` every Kolmogorov number agrees with the one of
/// `ℓ_{min(1, p_dst)}^N → ℓ_{p_dst}^N`.
pub fn reduce_quasi_banach(emb: &FiniteEmbedding) -> Result<FiniteEmbedding> {
    let ps = emb.p_src.get();
    let pd = emb.p_dst.get();
    if !(ps < 1.0) || !(ps < pd) {
        return Err(Error::not_applicable(
            "reduce_quasi_banach",
            "requires 0 < p_src < 1 and p_src < p_dst",
        ));
    }
    let new_src = if pd < 1.0 { emb.p_dst } else { Exponent::new(1.0)? };
    Ok(FiniteEmbedding {
        p_src: new_src,
        ..*emb
    })
}

/// Spectral oracle for diagonal operators on `ℓ_2`: every width family
/// coincides with the singular numbers, i.e. the sorted diagonal.
pub fn diagonal_spectral_oracle(op: &DiagonalOperator, n: usize) -> Result<WidthResult> {
    check_index(n)?;
    if op.p.get() != 2.0 {
        return Err(Error::not_applicable(
            "diagonal_spectral_oracle",
            "singular-value identity only claimed for p = 2",
        ));
    }
    let mut sorted = op.entries.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("entries validated finite"));
    let value = sorted.get(n - 1).copied().unwrap_or(0.0);
    Ok(WidthResult::exact(
        WidthKind::Approximation,
        n,
        value,
        Method::OracleSpectral,
    ))
}

/// Adjoint transfer: widths of `id : ℓ_{p_src}^N → ℓ_{p_dst}^N` equal the
/// dual-kind widths of `id : ℓ_{p_dst′}^N → ℓ_{p_src′}^N` in the Banach
/// range (`c_n(T*) = d_n(T)` and `d_n(T*) = c_n(T)`).
pub fn dual_transfer(
    emb: &FiniteEmbedding,
    kind: WidthKind,
) -> Result<(FiniteEmbedding, WidthKind)> {
    if emb.p_src.get() < 1.0 || emb.p_dst.get() < 1.0 {
        return Err(Error::not_applicable(
            "dual_transfer",
            "adjoint identity used only in the Banach range 1 ≤ p ≤ inf",
        ));
    }
    let dual_kind = match kind {
        WidthKind::Kolmogorov => WidthKind::Gelfand,
        WidthKind::Gelfand => WidthKind::Kolmogorov,
        WidthKind::Approximation => {
            return Err(Error::not_applicable(
                "dual_transfer",
                "defined for Gelfand and Kolmogorov numbers",
            ))
        }
    };
    Ok((
        FiniteEmbedding {
            dim: emb.dim,
            p_src: emb.p_dst.conjugate(),
            p_dst: emb.p_src.conjugate(),
            scale: emb.scale,
        },
        dual_kind,
    ))
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

    #[test]
    fn exact_formula_values() {
        let r = exact_width_nonincreasing(&emb(10, f64::INFINITY, 1.0), 3, WidthKind::Gelfand)
            .unwrap();
        assert_eq!(r.exact_value().unwrap(), 8.0);

        let r = exact_width_nonincreasing(&emb(5, 3.0, 3.0), 5, WidthKind::Approximation).unwrap();
        assert_eq!(r.exact_value().unwrap(), 1.0);

        let r = exact_width_nonincreasing(&emb(4, 2.0, 1.0), 2, WidthKind::Gelfand).unwrap();
        assert!((r.exact_value().unwrap() - 3f64.sqrt()).abs() < 1e-15);

        let r = exact_width_nonincreasing(&emb(4, 2.0, 1.0), 5, WidthKind::Gelfand).unwrap();
        assert_eq!(r.exact_value().unwrap(), 0.0);
    }

    #[test]
    fn exact_formula_rejections() {
        assert!(exact_width_nonincreasing(&emb(4, 1.0, 2.0), 1, WidthKind::Gelfand).is_err());
        assert!(exact_width_nonincreasing(&emb(4, 2.0, 1.0), 1, WidthKind::Kolmogorov).is_err());
    }

    #[test]
    fn kolmogorov_envelope_log_shapes() {
        // 1 ≤ p_src < 2, p_dst = inf, n ≤ N/4
        let r = kolmogorov_envelope(&emb(16, 1.0, f64::INFINITY), 4).unwrap();
        match r.value {
            WidthValue::Envelope {
                lower_shape,
                upper_shape,
                constants_undetermined,
            } => {
                assert!(constants_undetermined);
                assert!((lower_shape - 0.5).abs() < 1e-15);
                let expected = 0.5 * (std::f64::consts::E * 4.0).ln().powf(1.5);
                assert!((upper_shape - expected).abs() < 1e-12);
                assert!((upper_shape - 1.8431302494865576).abs() < 1e-10);
            }
            _ => panic!("expected envelope"),
        }

        // 2 ≤ p_src < inf
        let r = kolmogorov_envelope(&emb(100, 3.0, f64::INFINITY), 11).unwrap();
        match r.value {
            WidthValue::Envelope {
                lower_shape,
                upper_shape,
                ..
            } => {
                let base = (1.0f64 + 10.0).ln() / 10.0;
                let expected = base.powf(1.0 / 3.0).min(1.0);
                assert!((upper_shape - expected).abs() < 1e-12);
                assert!((upper_shape - 0.6212647848166917).abs() < 1e-10);
                assert!((lower_shape - 0.25 * expected).abs() < 1e-12);
            }
            _ => panic!("expected envelope"),
        }

        // rank property
        let r = kolmogorov_envelope(&emb(16, 1.0, f64::INFINITY), 20).unwrap();
        assert_eq!(r.exact_value().unwrap(), 0.0);
    }

    #[test]
    fn kolmogorov_envelope_requires_reduction_below_one() {
        let e = emb(8, 0.5, f64::INFINITY);
        assert!(kolmogorov_envelope(&e, 2).is_err());
        let reduced = reduce_quasi_banach(&e).unwrap();
        assert_eq!(reduced.p_src.get(), 1.0);
        assert!(kolmogorov_envelope(&reduced, 2).is_ok());
    }

    #[test]
    fn kolmogorov_envelope_nonincreasing_regime() {
        let r = kolmogorov_envelope(&emb(16, 2.0, 1.0), 3).unwrap();
        match r.value {
            WidthValue::Envelope {
                lower_shape,
                upper_shape,
                ..
            } => {
                // upper = (16-3+1)^{1/2}, lower = section shape 8^{1/2} at small n
                assert!((upper_shape - 14f64.sqrt()).abs() < 1e-12);
                assert!((lower_shape - 8f64.sqrt()).abs() < 1e-12);
                assert!(lower_shape <= upper_shape);
            }
            _ => panic!("expected envelope"),
        }
        // at large n the section lower bound no longer applies
        let r = kolmogorov_envelope(&emb(16, 2.0, 1.0), 12).unwrap();
        match r.value {
            WidthValue::Envelope { lower_shape, .. } => assert_eq!(lower_shape, 0.0),
            _ => panic!("expected envelope"),
        }
    }

    #[test]
    fn gelfand_envelope_shapes() {
        let r = gelfand_envelope(&emb(100, 1.0, f64::INFINITY), 11).unwrap();
        match r.value {
            WidthValue::Envelope {
                lower_shape,
                upper_shape,
                ..
            } => {
                let base: f64 = ((10.0f64.ln() + 1.0) / 10.0).min(1.0);
                assert!((upper_shape - base.sqrt()).abs() < 1e-12);
                assert!((upper_shape - 0.5746812240707057).abs() < 1e-10);
                assert!((lower_shape - base.powf(1.0)).abs() < 1e-12);
            }
            _ => panic!("expected envelope"),
        }

        // matching exponents on both sides for p_dst ≤ 2
        let r = gelfand_envelope(&emb(100, 1.0, 2.0), 11).unwrap();
        match r.value {
            WidthValue::Envelope {
                lower_shape,
                upper_shape,
                ..
            } => {
                assert!((lower_shape - upper_shape).abs() < 1e-15);
            }
            _ => panic!("expected envelope"),
        }

        // section lower bound at dimension 2n
        let r = gelfand_envelope(&emb(8, 0.5, 2.0), 4).unwrap();
        match r.value {
            WidthValue::Envelope { lower_shape, .. } => {
                assert!((lower_shape - 0.125).abs() < 1e-15);
            }
            _ => panic!("expected envelope"),
        }
    }

    #[test]
    fn gelfand_envelope_first_width_is_norm() {
        let r = gelfand_envelope(&emb(10, 1.0, 2.0), 1).unwrap();
        assert_eq!(r.exact_value().unwrap(), 1.0);
    }

    #[test]
    fn approximation_envelope_piecewise() {
        let e = emb(16, 1.0, f64::INFINITY);
        let r = approximation_envelope(&e, 2, 0.5).unwrap();
        assert_eq!(r.upper(), 1.0);
        let r = approximation_envelope(&e, 8, 0.5).unwrap();
        assert!((r.upper() - 8f64.powf(-0.5)).abs() < 1e-15);
        let r = approximation_envelope(&e, 17, 0.5).unwrap();
        assert_eq!(r.exact_value().unwrap(), 0.0);
        // section lower bound at dimension 2n
        let r = approximation_envelope(&e, 8, 0.5).unwrap();
        match r.value {
            WidthValue::Envelope { lower_shape, .. } => {
                assert!((lower_shape - 8f64.powf(-0.5)).abs() < 1e-15);
            }
            _ => panic!("expected envelope"),
        }
        assert!(approximation_envelope(&e, 2, 1.0).is_err());
        assert!(approximation_envelope(&e, 2, 0.0).is_err());
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_quasi_banach(&emb(8, 0.5, 2.0)).unwrap();
        assert_eq!(r.p_src.get(), 1.0);
        let r = reduce_quasi_banach(&emb(8, 0.5, 0.8)).unwrap();
        assert!((r.p_src.get() - 0.8).abs() < 1e-15);
        assert!(reduce_quasi_banach(&emb(8, 1.0, 2.0)).is_err());
    }

    #[test]
    fn spectral_oracle() {
        let op = DiagonalOperator::new(vec![3.0, 2.0, 1.0], p(2.0)).unwrap();
        assert_eq!(
            diagonal_spectral_oracle(&op, 2).unwrap().exact_value(),
            Some(2.0)
        );
        assert_eq!(
            diagonal_spectral_oracle(&op, 4).unwrap().exact_value(),
            Some(0.0)
        );
        let id = DiagonalOperator::new(vec![1.0; 5], p(2.0)).unwrap();
        assert_eq!(
            diagonal_spectral_oracle(&id, 3).unwrap().exact_value(),
            Some(1.0)
        );
        let bad = DiagonalOperator::new(vec![1.0], p(3.0)).unwrap();
        assert!(diagonal_spectral_oracle(&bad, 1).is_err());
    }

    #[test]
    fn dual_transfer_examples() {
        let (dual, kind) =
            dual_transfer(&emb(8, 2.0, f64::INFINITY), WidthKind::Kolmogorov).unwrap();
        assert_eq!(kind, WidthKind::Gelfand);
        assert_eq!(dual.p_src.get(), 1.0);
        assert_eq!(dual.p_dst.get(), 2.0);

        let (dual, kind) = dual_transfer(&emb(8, 1.0, 2.0), WidthKind::Gelfand).unwrap();
        assert_eq!(kind, WidthKind::Kolmogorov);
        assert_eq!(dual.p_src.get(), 2.0);
        assert!(dual.p_dst.is_infinite());

        let (dual, _) = dual_transfer(&emb(8, 2.0, 2.0), WidthKind::Gelfand).unwrap();
        assert_eq!(dual.p_src.get(), 2.0);
        assert_eq!(dual.p_dst.get(), 2.0);

        assert!(dual_transfer(&emb(8, 0.5, 2.0), WidthKind::Gelfand).is_err());
        assert!(dual_transfer(&emb(8, 1.0, 2.0), WidthKind::Approximation).is_err());
    }

    #[test]
    fn envelope_lower_never_exceeds_upper() {
        for dim in [4usize, 8, 16, 33] {
            for n in 1..=dim + 1 {
                for (ps, pd) in [(1.0, f64::INFINITY), (1.5, f64::INFINITY), (3.0, f64::INFINITY)]
                {
                    if let Ok(r) = kolmogorov_envelope(&emb(dim, ps, pd), n) {
                        if let WidthValue::Envelope {
                            lower_shape,
                            upper_shape,
                            ..
                        } = r.value
                        {
                            assert!(lower_shape <= upper_shape + 1e-12);
                            assert!(lower_shape <= 1.0 + 1e-12);
                        }
                    }
                }
                for (ps, pd) in [(1.0, f64::INFINITY), (0.5, 2.0), (1.0, 2.0), (0.7, 4.0)] {
                    if let Ok(r) = gelfand_envelope(&emb(dim, ps, pd), n) {
                        if let WidthValue::Envelope {
                            lower_shape,
                            upper_shape,
                            ..
                        } = r.value
                        {
                            assert!(lower_shape <= upper_shape + 1e-12, "({ps},{pd},{dim},{n})");
                            assert!(lower_shape <= 1.0 + 1e-12);
                        }
                    }
                }
            }
        }
    }
}
