//! Case analysis producing the decay exponent `ϰ` with `s_n ∼ n^{−ϰ}` for
//! each width family, plus the width-equivalence relations between families.
//!
//! The exponent tables are labelled `T1` (Kolmogorov numbers), `T2` (Gelfand
//! numbers) and `A` (approximation numbers); clauses `(i)`..`(vi)` identify
//! the parameter region. Case conditions are strict inequalities; inputs on
//! (or within [`BOUNDARY_TOL`](crate::params::BOUNDARY_TOL) of) a boundary
//! are reported as not covered rather than assigned to a side.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{near, EmbeddingParams};

/// The three s-number families handled by the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthKind {
    Approximation,
    Gelfand,
    Kolmogorov,
}

impl fmt::Display for WidthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WidthKind::Approximation => "approximation",
            WidthKind::Gelfand => "gelfand",
            WidthKind::Kolmogorov => "kolmogorov",
        };
        write!(f, "{s}")
    }
}

/// Identifies which exponent table produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTable {
    T1,
    T2,
    A,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Clause {
    fn as_str(self) -> &'static str {
        match self {
            Clause::I => "i",
            Clause::II => "ii",
            Clause::III => "iii",
            Clause::IV => "iv",
            Clause::V => "v",
            Clause::VI => "vi",
        }
    }
}

/// A case label such as `T1(iv)` or `A(ii)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CaseLabel {
    pub table: CaseTable,
    pub clause: Clause,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.table {
            CaseTable::T1 => "T1",
            CaseTable::T2 => "T2",
            CaseTable::A => "A",
        };
        write!(f, "{t}({})", self.clause.as_str())
    }
}

impl FromStr for CaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("case_label", format!("cannot parse {s:?}"));
        let (table, rest) = if let Some(r) = s.strip_prefix("T1") {
            (CaseTable::T1, r)
        } else if let Some(r) = s.strip_prefix("T2") {
            (CaseTable::T2, r)
        } else if let Some(r) = s.strip_prefix('A') {
            (CaseTable::A, r)
        } else {
            return Err(bad());
        };
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let clause = match inner {
            "i" => Clause::I,
            "ii" => Clause::II,
            "iii" => Clause::III,
            "iv" => Clause::IV,
            "v" => Clause::V,
            "vi" => Clause::VI,
            _ => return Err(bad()),
        };
        Ok(CaseLabel { table, clause })
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CaseLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CaseLabel::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Why a parameter tuple falls outside the exponent tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotCoveredReason {
    /// `δ = α`; decay may depend on the fine indices `q1`, `q2`.
    Limiting,
    /// Exactly on a case boundary such as `μ = d/p2`.
    Boundary,
    /// `p2 ≤ p̃ < p1`, outside the admissible parameter range.
    OutsideParameterRange,
    /// The embedding is not compact, so widths do not tend to zero.
    NotCompact,
}

impl fmt::Display for NotCoveredReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NotCoveredReason::Limiting => "limiting",
            NotCoveredReason::Boundary => "boundary",
            NotCoveredReason::OutsideParameterRange => "outside-parameter-range",
            NotCoveredReason::NotCompact => "not-compact",
        };
        write!(f, "{s}")
    }
}

/// Per-family classification outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum FamilyOutcome {
    Covered { kappa: f64, case: CaseLabel },
    NotCovered { reason: NotCoveredReason },
}

impl FamilyOutcome {
    pub fn kappa(&self) -> Option<f64> {
        match self {
            FamilyOutcome::Covered { kappa, .. } => Some(*kappa),
            FamilyOutcome::NotCovered { .. } => None,
        }
    }

    pub fn case(&self) -> Option<CaseLabel> {
        match self {
            FamilyOutcome::Covered { case, .. } => Some(*case),
            FamilyOutcome::NotCovered { .. } => None,
        }
    }

    pub fn reason(&self) -> Option<NotCoveredReason> {
        match self {
            FamilyOutcome::Covered { .. } => None,
            FamilyOutcome::NotCovered { reason } => Some(*reason),
        }
    }

    fn not_covered(reason: NotCoveredReason) -> Self {
        FamilyOutcome::NotCovered { reason }
    }
}

/// One of the three pairwise width equivalences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquivalencePair {
    #[serde(rename = "a~c")]
    ApproxGelfand,
    #[serde(rename = "a~d")]
    ApproxKolmogorov,
    #[serde(rename = "c~d")]
    GelfandKolmogorov,
}

impl fmt::Display for EquivalencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EquivalencePair::ApproxGelfand => "a~c",
            EquivalencePair::ApproxKolmogorov => "a~d",
            EquivalencePair::GelfandKolmogorov => "c~d",
        };
        write!(f, "{s}")
    }
}

impl EquivalencePair {
    pub fn kinds(self) -> (WidthKind, WidthKind) {
        match self {
            EquivalencePair::ApproxGelfand => (WidthKind::Approximation, WidthKind::Gelfand),
            EquivalencePair::ApproxKolmogorov => {
                (WidthKind::Approximation, WidthKind::Kolmogorov)
            }
            EquivalencePair::GelfandKolmogorov => (WidthKind::Gelfand, WidthKind::Kolmogorov),
        }
    }
}

/// An established equivalence with the sub-case conditions that hold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub pair: EquivalencePair,
    pub subcases: Vec<String>,
}

/// An equivalence that could not be assessed because a family is uncovered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmittedEquivalence {
    pub pair: EquivalencePair,
    pub reason: NotCoveredReason,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct WidthEquivalences {
    pub established: Vec<Equivalence>,
    pub omitted: Vec<OmittedEquivalence>,
}

/// Full classification of a parameter tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub compact: bool,
    pub limiting: bool,
    pub approximation: FamilyOutcome,
    pub gelfand: FamilyOutcome,
    pub kolmogorov: FamilyOutcome,
    pub equivalences: WidthEquivalences,
}

impl Classification {
    pub fn family(&self, kind: WidthKind) -> &FamilyOutcome {
        match kind {
            WidthKind::Approximation => &self.approximation,
            WidthKind::Gelfand => &self.gelfand,
            WidthKind::Kolmogorov => &self.kolmogorov,
        }
    }
}

/// Comparison of `μ` against a case-splitting threshold.
enum MuSplit {
    Above,
    Below,
    OnBoundary,
}

fn split_mu(mu: f64, threshold: f64) -> MuSplit {
    if near(mu, threshold) {
        MuSplit::OnBoundary
    } else if mu > threshold {
        MuSplit::Above
    } else {
        MuSplit::Below
    }
}

/// Shared gate: validity, admissible range, compactness, limiting case.
///
/// Returns `Ok(None)` when the table may be consulted, `Ok(Some(outcome))`
/// when the tuple is uncovered, and `Err` for invalid or non-compact input.
fn gate(params: &EmbeddingParams) -> Result<Option<FamilyOutcome>> {
    params.validate()?;
    let p1 = params.p1.get();
    let p2 = params.p2.get();
    if p2 < p1 {
        // Admissible only when p̃ < p2; the region p2 ≤ p̃ < p1 is outside
        // the tables whether or not the embedding is compact.
        let inv_pt = params.inv_p_tilde();
        let inv_p2 = params.p2.recip();
        if inv_pt <= inv_p2 || near(inv_pt, inv_p2) {
            return Ok(Some(FamilyOutcome::not_covered(
                NotCoveredReason::OutsideParameterRange,
            )));
        }
    } else {
        let gap = (params.p2.recip() - params.p1.recip()).max(0.0);
        if params.mu() <= params.d() * gap {
            return Err(Error::NotCompact {
                detail: format!(
                    "min(alpha, delta) = {} does not exceed d*max(1/p2 - 1/p1, 0) = {}",
                    params.mu(),
                    params.d() * gap
                ),
            });
        }
    }
    if near(params.delta(), params.alpha) {
        return Ok(Some(FamilyOutcome::not_covered(NotCoveredReason::Limiting)));
    }
    Ok(None)
}

fn covered(table: CaseTable, clause: Clause, kappa: f64) -> FamilyOutcome {
    FamilyOutcome::Covered {
        kappa,
        case: CaseLabel { table, clause },
    }
}

/// Decay exponent of the Kolmogorov numbers (`d_n ∼ n^{−ϰ}`), table `T1`.
pub fn kolmogorov_exponent(params: &EmbeddingParams) -> Result<FamilyOutcome> {
    if let Some(out) = gate(params)? {
        return Ok(out);
    }
    let p1 = params.p1.get();
    let p2 = params.p2.get();
    let inv_p1 = params.p1.recip();
    let inv_p2 = params.p2.recip();
    let d = params.d();
    let mu = params.mu();

    if p2 < p1 {
        return Ok(covered(
            CaseTable::T1,
            Clause::II,
            mu / d + inv_p1 - inv_p2,
        ));
    }
    if p2 <= 2.0 || p1 == p2 {
        return Ok(covered(CaseTable::T1, Clause::I, mu / d));
    }
    if p1 < 2.0 {
        // p1 < 2 < p2, split at mu = d/p2
        return Ok(match split_mu(mu, d * inv_p2) {
            MuSplit::Above => covered(CaseTable::T1, Clause::III, mu / d + 0.5 - inv_p2),
            MuSplit::Below => covered(CaseTable::T1, Clause::IV, (mu / d) * (p2 / 2.0)),
            MuSplit::OnBoundary => FamilyOutcome::not_covered(NotCoveredReason::Boundary),
        });
    }
    // 2 ≤ p1 < p2, split at mu = (d/p2)·θ; p2 > 2 here so θ is defined
    let theta = (inv_p1 - inv_p2) / (0.5 - inv_p2);
    Ok(match split_mu(mu, d * inv_p2 * theta) {
        MuSplit::Above => covered(CaseTable::T1, Clause::V, mu / d + inv_p1 - inv_p2),
        MuSplit::Below => covered(CaseTable::T1, Clause::VI, (mu / d) * (p2 / 2.0)),
        MuSplit::OnBoundary => FamilyOutcome::not_covered(NotCoveredReason::Boundary),
    })
}

/// Decay exponent of the Gelfand numbers (`c_n ∼ n^{−ϰ}`), table `T2`.
pub fn gelfand_exponent(params: &EmbeddingParams) -> Result<FamilyOutcome> {
    if let Some(out) = gate(params)? {
        return Ok(out);
    }
    let p1 = params.p1.get();
    let p2 = params.p2.get();
    let inv_p1 = params.p1.recip();
    let inv_p2 = params.p2.recip();
    let inv_p1c = params.p1.conjugate().recip();
    let inv_p2c = params.p2.conjugate().recip();
    let d = params.d();
    let mu = params.mu();

    if p2 < p1 {
        return Ok(covered(
            CaseTable::T2,
            Clause::II,
            mu / d + inv_p1 - inv_p2,
        ));
    }
    if p1 >= 2.0 || p1 == p2 {
        return Ok(covered(CaseTable::T2, Clause::I, mu / d));
    }
    if p2 > 2.0 {
        // p1 < 2 < p2, split at mu = d/p1′; the lower branch needs p1 > 1,
        // which holds automatically since the threshold vanishes otherwise
        return Ok(match split_mu(mu, d * inv_p1c) {
            MuSplit::Above => covered(CaseTable::T2, Clause::III, mu / d + inv_p1 - 0.5),
            MuSplit::Below => covered(
                CaseTable::T2,
                Clause::IV,
                (mu / d) * (params.p1.conjugate().get() / 2.0),
            ),
            MuSplit::OnBoundary => FamilyOutcome::not_covered(NotCoveredReason::Boundary),
        });
    }
    // p1 < p2 ≤ 2, split at mu = (d/p1′)·θ1; p1 < 2 so p1′ > 2 and θ1 is defined
    let theta1 = (inv_p2c - inv_p1c) / (0.5 - inv_p1c);
    Ok(match split_mu(mu, d * inv_p1c * theta1) {
        MuSplit::Above => covered(CaseTable::T2, Clause::V, mu / d + inv_p1 - inv_p2),
        MuSplit::Below => covered(
            CaseTable::T2,
            Clause::VI,
            (mu / d) * (params.p1.conjugate().get() / 2.0),
        ),
        MuSplit::OnBoundary => FamilyOutcome::not_covered(NotCoveredReason::Boundary),
    })
}

/// Decay exponent of the approximation numbers (`a_n ∼ n^{−ϰ}`), table `A`.
pub fn approximation_exponent(params: &EmbeddingParams) -> Result<FamilyOutcome> {
    if let Some(out) = gate(params)? {
        return Ok(out);
    }
    let p1 = params.p1.get();
    let p2 = params.p2.get();
    let inv_p1 = params.p1.recip();
    let inv_p2 = params.p2.recip();
    let d = params.d();
    let mu = params.mu();

    if p2 < p1 {
        return Ok(covered(CaseTable::A, Clause::II, mu / d + inv_p1 - inv_p2));
    }
    if p2 <= 2.0 || p1 >= 2.0 {
        return Ok(covered(CaseTable::A, Clause::I, mu / d));
    }
    // p1 < 2 < p2, split at mu = d/t with t = min(p1′, p2)
    let t = Exponent::min(params.p1.conjugate(), params.p2);
    Ok(match split_mu(mu, d * t.recip()) {
        MuSplit::Above => covered(CaseTable::A, Clause::III, mu / d + 0.5 - t.recip()),
        MuSplit::Below => covered(CaseTable::A, Clause::IV, (mu / d) * (t.get() / 2.0)),
        MuSplit::OnBoundary => FamilyOutcome::not_covered(NotCoveredReason::Boundary),
    })
}

use crate::exponent::Exponent;

/// Evaluates all three exponent tables plus the equivalence relations.
pub fn classify(params: &EmbeddingParams) -> Result<Classification> {
    params.validate()?;
    let compact = check_compact_quiet(params);
    let limiting = near(params.delta(), params.alpha);
    let family = |r: Result<FamilyOutcome>| -> Result<FamilyOutcome> {
        match r {
            Ok(out) => Ok(out),
            Err(Error::NotCompact { .. }) => {
                Ok(FamilyOutcome::not_covered(NotCoveredReason::NotCompact))
            }
            Err(e) => Err(e),
        }
    };
    let approximation = family(approximation_exponent(params))?;
    let gelfand = family(gelfand_exponent(params))?;
    let kolmogorov = family(kolmogorov_exponent(params))?;
    let equivalences = equivalences_for(params, &approximation, &gelfand, &kolmogorov);
    Ok(Classification {
        compact,
        limiting,
        approximation,
        gelfand,
        kolmogorov,
        equivalences,
    })
}

fn check_compact_quiet(params: &EmbeddingParams) -> bool {
    let gap = (params.p2.recip() - params.p1.recip()).max(0.0);
    params.mu() > params.d() * gap
}

/// Width-equivalence relations: which of `a ∼ c`, `a ∼ d`, `c ∼ d` hold,
/// with the sub-case conditions that establish them.
pub fn compare_widths(params: &EmbeddingParams) -> Result<WidthEquivalences> {
    let c = classify(params)?;
    Ok(c.equivalences)
}

fn equivalences_for(
    params: &EmbeddingParams,
    approximation: &FamilyOutcome,
    gelfand: &FamilyOutcome,
    kolmogorov: &FamilyOutcome,
) -> WidthEquivalences {
    let p1 = params.p1.get();
    let p2 = params.p2.get();
    let p1c = params.p1.conjugate().get();
    let d = params.d();
    let mu = params.mu();
    let inv_pt = params.inv_p_tilde();
    let inv_p2 = params.p2.recip();

    // p̃ < p2 ≤ p1, strictly off the p̃ boundary
    let tilde_range = p2 <= p1 && inv_pt > inv_p2 && !near(inv_pt, inv_p2);
    let p1c_eq_p2 = near(p1c, p2) || p1c == p2;
    let p1c_le_p2 = p1c <= p2 || p1c_eq_p2;
    let p2_le_p1c = p2 <= p1c || p1c_eq_p2;

    let mut ac = Vec::new();
    if p1 >= 2.0 && p1 < p2 {
        ac.push("(i)(a)".to_string());
    }
    if tilde_range {
        ac.push("(i)(b)".to_string());
    }
    if p1 >= 1.0 && p1 < p1c && p1c_le_p2 && !near(mu, d / p1c) {
        ac.push("(i)(c)".to_string());
    }

    let mut ad = Vec::new();
    if p1 < p2 && p2 <= 2.0 {
        ad.push("(ii)(a)".to_string());
    }
    if tilde_range {
        ad.push("(ii)(b)".to_string());
    }
    if p1 < 2.0 && p2 > 2.0 && p2_le_p1c && !near(mu, d * inv_p2) {
        ad.push("(ii)(c)".to_string());
    }

    let mut cd = Vec::new();
    if tilde_range {
        cd.push("(iii)(a)".to_string());
    }
    if p1 >= 1.0 && p1 < p1c && p1c_eq_p2 && !near(mu, d * inv_p2) {
        cd.push("(iii)(b)".to_string());
    }

    let mut out = WidthEquivalences::default();
    let mut push = |pair: EquivalencePair, subcases: Vec<String>| {
        if subcases.is_empty() {
            return;
        }
        let (x, y) = pair.kinds();
        let outcome_of = |k: WidthKind| match k {
            WidthKind::Approximation => approximation,
            WidthKind::Gelfand => gelfand,
            WidthKind::Kolmogorov => kolmogorov,
        };
        match (outcome_of(x).reason(), outcome_of(y).reason()) {
            (None, None) => out.established.push(Equivalence { pair, subcases }),
            (Some(reason), _) | (_, Some(reason)) => {
                out.omitted.push(OmittedEquivalence { pair, reason })
            }
        }
    };
    push(EquivalencePair::ApproxGelfand, ac);
    push(EquivalencePair::ApproxKolmogorov, ad);
    push(EquivalencePair::GelfandKolmogorov, cd);
    out
}
