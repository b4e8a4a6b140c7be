//! Sample-complexity formulas in terms of a complexity measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which complexity measure the quote is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuoteFormula {
    /// VC dimension `d`: `(C/ε²)·max(d·ln(1/ε), ln(1/δ))`.
    Vc,
    /// Fat-shattering dimension: `(C/ε²)·max(fat·ln(1/ε), ln(1/δ))`.
    Fat,
    /// Metric entropy `log N`: `(C/ε²)·max(log N, ln(1/δ))`.
    Cover,
    /// Rademacher complexity: `(C/ε²)·max(R, ln(1/δ))`.
    Rademacher,
}

impl std::str::FromStr for QuoteFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vc" => Ok(QuoteFormula::Vc),
            "fat" => Ok(QuoteFormula::Fat),
            "cover" | "entropy" | "covering" => Ok(QuoteFormula::Cover),
            "rademacher" | "ra" => Ok(QuoteFormula::Rademacher),
            _ => Err(Error::InvalidParameter(format!("unknown formula '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexityQuote {
    pub formula: QuoteFormula,
    /// The complexity value plugged in.
    pub input: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub constant_c: f64,
    pub bound: f64,
    /// `"complexity"` or `"confidence"`: which branch of the max is larger.
    pub dominant_term: String,
}

impl SampleComplexityQuote {
    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }
}

pub fn sample_complexity_quote(
    formula: QuoteFormula,
    input: f64,
    epsilon: f64,
    delta: f64,
    constant_c: f64,
) -> Result<SampleComplexityQuote> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} outside (0, 1)")));
    }
    if !(constant_c > 0.0) || !constant_c.is_finite() {
        return Err(Error::InvalidParameter(format!("constant C = {constant_c}")));
    }
    if !(input >= 0.0) || !input.is_finite() {
        return Err(Error::InvalidParameter(format!("complexity input {input}")));
    }
    let complexity = match formula {
        QuoteFormula::Vc | QuoteFormula::Fat => input * (1.0 / epsilon).ln(),
        QuoteFormula::Cover | QuoteFormula::Rademacher => input,
    };
    let confidence = (1.0 / delta).ln();
    let (term, dominant) = if complexity >= confidence {
        (complexity, "complexity")
    } else {
        (confidence, "confidence")
    };
    Ok(SampleComplexityQuote {
        formula,
        input,
        epsilon,
        delta,
        constant_c,
        bound: constant_c / (epsilon * epsilon) * term,
        dominant_term: dominant.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fat_arithmetic() {
        let q = sample_complexity_quote(QuoteFormula::Fat, 2.0, 0.1, 0.05, 1.0).unwrap();
        let want = 100.0 * 2.0 * 10f64.ln();
        assert!((q.bound - want).abs() < 1e-9 * want);
        assert_eq!(q.dominant_term, "complexity");
    }

    #[test]
    fn tiny_delta_dominates() {
        let q = sample_complexity_quote(QuoteFormula::Fat, 2.0, 0.1, 1e-300, 1.0).unwrap();
        assert_eq!(q.dominant_term, "confidence");
    }

    #[test]
    fn linear_in_c_and_vc_equals_fat() {
        let a = sample_complexity_quote(QuoteFormula::Vc, 3.0, 0.2, 0.1, 1.0).unwrap();
        let b = sample_complexity_quote(QuoteFormula::Vc, 3.0, 0.2, 0.1, 2.0).unwrap();
        assert!((b.bound - 2.0 * a.bound).abs() < 1e-12);
        let f = sample_complexity_quote(QuoteFormula::Fat, 3.0, 0.2, 0.1, 1.0).unwrap();
        assert_eq!(f.bound, a.bound);
        assert!(sample_complexity_quote(QuoteFormula::Cover, 1.0, 1.0, 0.1, 1.0).is_err());
    }
}
