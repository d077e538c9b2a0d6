//! Three-valued verdicts and the report type shared by the checks.

use crate::real::Real;
use serde::Serialize;
use std::collections::BTreeMap;

/// A sign is only asserted when `|value| > SIGN_SAFETY * error`.
pub const SIGN_SAFETY: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// Verdict for a value whose expected sign is `sign` (`-1` or `+1`).
    pub fn for_sign<T: Real>(value: T, error: T, sign: i8) -> Self {
        if !value.is_finite() || !error.is_finite() {
            return Verdict::Inconclusive;
        }
        if value.abs() <= T::lit(SIGN_SAFETY) * error || value == T::zero() {
            return Verdict::Inconclusive;
        }
        if (value > T::zero()) == (sign > 0) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Which inequality a report checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// `u_v(core + delta B) <= M_v(core)`: the unfolded region lies in the core hull.
    UnfoldedInHull,
    /// Planar segment integral `F(2, alpha, a, xi) < 0` for `xi <= a/2`.
    PlanarSegment,
    /// Transformed integral over `[-a, c]` negative once `a >= psi(c) c`.
    TransformedIntegral,
    /// `F(n, alpha, a, xi) < 0` for `a >= a0(xi0)`, `xi <= xi0`.
    SegmentThreshold,
    /// `F` and the rescaled transformed integral agree.
    ChangeOfVariables,
    /// Upper boundary-curve integral of a planar parallel body is negative.
    SectionCurve,
    /// Sign of every diagonal second derivative on the core hull.
    HessianSigns,
}

impl LemmaId {
    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaId::UnfoldedInHull => "unfolded_in_hull",
            LemmaId::PlanarSegment => "planar_segment",
            LemmaId::TransformedIntegral => "transformed_integral",
            LemmaId::SegmentThreshold => "segment_threshold",
            LemmaId::ChangeOfVariables => "change_of_variables",
            LemmaId::SectionCurve => "section_curve",
            LemmaId::HessianSigns => "hessian_signs",
        }
    }
}

/// One evaluated instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult<T> {
    pub params: BTreeMap<String, T>,
    pub value: T,
    pub error: T,
    pub verdict: Verdict,
    /// Signed slack of the claim: positive when it holds.
    pub margin: T,
    /// Whether the instance satisfies the claim's hypotheses; other cases are
    /// computed and listed but never decide the overall verdict.
    pub in_hypothesis: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport<T> {
    pub lemma_id: LemmaId,
    pub params: BTreeMap<String, T>,
    pub cases: Vec<CaseResult<T>>,
    /// For sign checks, the smallest case margin over in-hypothesis cases. For
    /// [`LemmaId::UnfoldedInHull`], the largest excess `u_v - M_v(core)`.
    pub worst_margin: T,
    pub verdict: Verdict,
}

impl<T: Real> LemmaReport<T> {
    /// Aggregates cases: any failing in-hypothesis case fails the report, otherwise any
    /// inconclusive one makes it inconclusive.
    pub fn from_cases(lemma_id: LemmaId, params: BTreeMap<String, T>, cases: Vec<CaseResult<T>>) -> Self {
        let asserted = cases.iter().filter(|c| c.in_hypothesis);
        let mut verdict = Verdict::Pass;
        let mut worst = T::infinity();
        for c in asserted {
            match c.verdict {
                Verdict::Fail => verdict = Verdict::Fail,
                Verdict::Inconclusive if verdict == Verdict::Pass => verdict = Verdict::Inconclusive,
                _ => {}
            }
            worst = worst.min(c.margin);
        }
        Self {
            lemma_id,
            params,
            cases,
            worst_margin: worst,
            verdict,
        }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut p = (0, 0, 0);
        for c in self.cases.iter().filter(|c| c.in_hypothesis) {
            match c.verdict {
                Verdict::Pass => p.0 += 1,
                Verdict::Fail => p.1 += 1,
                Verdict::Inconclusive => p.2 += 1,
            }
        }
        p
    }
}

/// Case for an expected strict sign; the margin is `sign * value - 10 * error`.
pub fn sign_case<T: Real>(
    params: BTreeMap<String, T>,
    value: T,
    error: T,
    sign: i8,
    in_hypothesis: bool,
) -> CaseResult<T> {
    let s = if sign > 0 { T::one() } else { -T::one() };
    CaseResult {
        params,
        value,
        error,
        verdict: Verdict::for_sign(value, error, sign),
        margin: s * value - T::lit(SIGN_SAFETY) * error,
        in_hypothesis,
    }
}

/// Builds a parameter map from name/value pairs.
pub fn params<T: Real>(pairs: &[(&str, T)]) -> BTreeMap<String, T> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}
