//! Local Lemma certificates and the inequality check.
//!
//! All quantities are held by their natural logarithm. Certificates of
//! interest routinely contain values such as `2^-3400` or `4^200` that are
//! not representable as `f64`, while their logarithms are.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LllError;

/// Slack magnitudes below this are reported as marginal rather than passed.
pub const MARGINAL_SLACK: f64 = 1e-12;

/// A nonnegative real number stored as its natural logarithm.
///
/// Zero is represented by `ln = -inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogNum(f64);

impl LogNum {
    pub const ZERO: LogNum = LogNum(f64::NEG_INFINITY);
    pub const ONE: LogNum = LogNum(0.0);

    pub fn from_ln(ln: f64) -> Self {
        LogNum(ln)
    }

    pub fn from_value(x: f64) -> Self {
        LogNum(x.ln())
    }

    /// `base^exponent` for a positive base.
    pub fn pow(base: f64, exponent: f64) -> Self {
        LogNum(exponent * base.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// Linear value; may underflow to 0 or overflow to infinity.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    fn is_valid(self) -> bool {
        !self.0.is_nan() && self.0 != f64::INFINITY
    }
}

impl fmt::Display for LogNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.value();
        if v.is_normal() || v == 0.0 && self.is_zero() {
            write!(f, "{v}")
        } else {
            write!(f, "exp({})", self.0)
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LogNumRepr {
    Value(f64),
    Ln { ln: f64 },
}

impl Serialize for LogNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.value();
        // Plain numbers only when the linear value reproduces the same log.
        let repr = if (v.is_normal() && v.ln() == self.0) || (v == 0.0 && self.is_zero()) {
            LogNumRepr::Value(v)
        } else {
            LogNumRepr::Ln { ln: self.0 }
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match LogNumRepr::deserialize(d)? {
            LogNumRepr::Value(v) if v >= 0.0 => Ok(LogNum::from_value(v)),
            LogNumRepr::Value(v) => Err(serde::de::Error::custom(format!(
                "expected a nonnegative number, got {v}"
            ))),
            LogNumRepr::Ln { ln } => Ok(LogNum(ln)),
        }
    }
}

/// The `(p_i, a_i, Δ_ij)` data of a Local Lemma application with `r` event classes.
///
/// Classes are numbered `1..=r`; vectors are indexed by `class - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LllCertificate {
    r: usize,
    p: Vec<LogNum>,
    a: Vec<LogNum>,
    delta: Vec<Vec<LogNum>>,
}

#[derive(Deserialize)]
struct RawCertificate {
    r: usize,
    p: Vec<LogNum>,
    a: Vec<LogNum>,
    delta: Vec<Vec<LogNum>>,
}

impl<'de> Deserialize<'de> for LllCertificate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawCertificate::deserialize(d)?;
        LllCertificate::new(raw.r, raw.p, raw.a, raw.delta).map_err(serde::de::Error::custom)
    }
}

impl LllCertificate {
    pub fn new(
        r: usize,
        p: Vec<LogNum>,
        a: Vec<LogNum>,
        delta: Vec<Vec<LogNum>>,
    ) -> Result<Self, LllError> {
        let invalid = |reason: String| Err(LllError::InvalidCertificate(reason));
        if p.len() != r || a.len() != r || delta.len() != r {
            return invalid(format!(
                "expected {r} classes, got |p|={}, |a|={}, rows(delta)={}",
                p.len(),
                a.len(),
                delta.len()
            ));
        }
        for (i, &pi) in p.iter().enumerate() {
            if !pi.is_valid() || pi.is_zero() || pi.ln() > 0.0 {
                return invalid(format!("p_{} = {pi} is outside (0, 1]", i + 1));
            }
        }
        for (i, &ai) in a.iter().enumerate() {
            if !ai.is_valid() || ai.ln() >= 0.0 {
                return invalid(format!("a_{} = {ai} is outside [0, 1)", i + 1));
            }
        }
        for (i, row) in delta.iter().enumerate() {
            if row.len() != r {
                return invalid(format!("delta row {} has length {}", i + 1, row.len()));
            }
            if let Some(j) = row.iter().position(|d| !d.is_valid()) {
                return invalid(format!("delta_{},{} is not a finite nonnegative number", i + 1, j + 1));
            }
        }
        Ok(LllCertificate { r, p, a, delta })
    }

    /// Builds a certificate from log-space closures over 1-based class indices.
    pub fn from_fn(
        r: usize,
        ln_p: impl Fn(usize) -> f64,
        ln_a: impl Fn(usize) -> f64,
        ln_delta: impl Fn(usize, usize) -> f64,
    ) -> Result<Self, LllError> {
        let p = (1..=r).map(|i| LogNum::from_ln(ln_p(i))).collect();
        let a = (1..=r).map(|i| LogNum::from_ln(ln_a(i))).collect();
        let delta = (1..=r)
            .map(|i| (1..=r).map(|j| LogNum::from_ln(ln_delta(i, j))).collect())
            .collect();
        Self::new(r, p, a, delta)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn p(&self) -> &[LogNum] {
        &self.p
    }

    pub fn a(&self) -> &[LogNum] {
        &self.a
    }

    pub fn delta(&self) -> &[Vec<LogNum>] {
        &self.delta
    }

    /// Replaces `p`, keeping `a` and `Δ`.
    pub fn with_p(&self, p: Vec<LogNum>) -> Result<Self, LllError> {
        Self::new(self.r, p, self.a.clone(), self.delta.clone())
    }
}

/// `ln(-ln(1 - a))` given `ln a`, accurate for tiny `a`.
fn ln_neg_ln1m(ln_a: f64) -> f64 {
    if ln_a == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if ln_a < -20.0 {
        // -ln(1-a) = a (1 + a/2 + a^2/3 + ...)
        let a = ln_a.exp();
        ln_a + (a / 2.0 + a * a / 3.0).ln_1p()
    } else {
        (-(-ln_a.exp()).ln_1p()).ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    /// |slack| below [`MARGINAL_SLACK`]; double precision cannot decide.
    Marginal,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSlack {
    pub class: usize,
    /// `ln a_i + Σ_j Δ_ij ln(1 - a_j) - ln p_i`.
    pub slack: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub classes: Vec<ClassSlack>,
}

impl CertificateReport {
    /// True iff every class holds with a non-marginal slack.
    pub fn holds(&self) -> bool {
        self.classes.iter().all(|c| c.verdict == Verdict::Holds)
    }

    pub fn min_slack(&self) -> Option<f64> {
        self.classes.iter().map(|c| c.slack).reduce(f64::min)
    }

    pub fn failing(&self) -> impl Iterator<Item = &ClassSlack> {
        self.classes.iter().filter(|c| c.verdict != Verdict::Holds)
    }
}

/// Checks `p_i <= a_i Π_j (1 - a_j)^Δ_ij` for every class, in log space.
pub fn check_certificate(cert: &LllCertificate) -> CertificateReport {
    let log_factor: Vec<f64> = cert.a.iter().map(|a| ln_neg_ln1m(a.ln())).collect();
    let classes = (0..cert.r)
        .map(|i| {
            let penalty: f64 = cert.delta[i]
                .iter()
                .zip(&log_factor)
                .map(|(d, lf)| (d.ln() + lf).exp())
                .sum();
            let slack = cert.a[i].ln() - penalty - cert.p[i].ln();
            let verdict = if slack.abs() < MARGINAL_SLACK {
                Verdict::Marginal
            } else if slack > 0.0 {
                Verdict::Holds
            } else {
                Verdict::Fails
            };
            ClassSlack {
                class: i + 1,
                slack,
                verdict,
            }
        })
        .collect();
    CertificateReport { classes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: f64, a: f64, d: f64) -> LllCertificate {
        LllCertificate::new(
            1,
            vec![LogNum::from_value(p)],
            vec![LogNum::from_value(a)],
            vec![vec![LogNum::from_value(d)]],
        )
        .unwrap()
    }

    #[test]
    fn empty_certificate_holds() {
        let cert = LllCertificate::new(0, vec![], vec![], vec![]).unwrap();
        assert!(check_certificate(&cert).holds());
    }

    #[test]
    fn p_one_against_half_fails() {
        let report = check_certificate(&single(1.0, 0.5, 0.0));
        assert!(!report.holds());
        assert_eq!(report.classes[0].verdict, Verdict::Fails);
        assert!((report.classes[0].slack - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn equality_is_marginal() {
        let report = check_certificate(&single(0.25, 0.25, 0.0));
        assert_eq!(report.classes[0].verdict, Verdict::Marginal);
        assert!(!report.holds());
    }

    #[test]
    fn rejects_invariant_violations() {
        let one = LogNum::ONE;
        let half = LogNum::from_value(0.5);
        assert!(LllCertificate::new(1, vec![half], vec![one], vec![vec![LogNum::ZERO]]).is_err());
        assert!(
            LllCertificate::new(1, vec![LogNum::ZERO], vec![half], vec![vec![LogNum::ZERO]])
                .is_err()
        );
        assert!(LllCertificate::new(2, vec![half], vec![half], vec![vec![LogNum::ZERO]]).is_err());
        assert!(LllCertificate::new(
            1,
            vec![LogNum::from_value(2.0)],
            vec![half],
            vec![vec![LogNum::ZERO]]
        )
        .is_err());
    }

    #[test]
    fn tiny_a_log_factor_matches_series() {
        for &a in &[1e-3, 1e-9, 1e-12, 1e-30] {
            let direct = (-(-a as f64).ln_1p()).ln();
            let ours = ln_neg_ln1m((a as f64).ln());
            assert!((direct - ours).abs() < 1e-12, "a={a}");
        }
        // beyond f64 range the factor is ln a itself
        assert!((ln_neg_ln1m(-5000.0) + 5000.0).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip_keeps_unrepresentable_values() {
        let cert = LllCertificate::new(
            1,
            vec![LogNum::from_ln(-3000.0)],
            vec![LogNum::from_value(0.5)],
            vec![vec![LogNum::from_value(3.0)]],
        )
        .unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("\"ln\":-3000"));
        let back: LllCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back.p()[0].ln(), -3000.0);
        assert!((back.delta()[0][0].value() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn json_rejects_invalid_certificate() {
        let text = r#"{"r":1,"p":[0.5],"a":[1.0],"delta":[[0]]}"#;
        assert!(serde_json::from_str::<LllCertificate>(text).is_err());
    }
}
