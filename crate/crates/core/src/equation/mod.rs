//! Equations of the form `c1*x1^k1 + ... + cs*xs^ks = n` over the natural numbers.

mod parse;

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use parse::{parse_equation, parse_template};

/// Exact solution count.
pub type CountValue = BigUint;

/// One `c * x^k` summand. Serialized as the pair `[c, k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(u64, u32)", into = "(u64, u32)")]
pub struct Term {
    pub coefficient: u64,
    pub exponent: u32,
}

impl Term {
    pub const fn new(coefficient: u64, exponent: u32) -> Self {
        Term {
            coefficient,
            exponent,
        }
    }

    /// `c * x^k`, or `None` on overflow.
    pub fn value_at(&self, x: u64) -> Option<u64> {
        x.checked_pow(self.exponent)?.checked_mul(self.coefficient)
    }

    /// All values `c * x^k <= limit` for `x` in the domain, ascending.
    pub fn values_up_to(&self, limit: u64, domain: SolutionDomain) -> Vec<u64> {
        let mut out = Vec::new();
        let mut x = domain.first_value();
        while let Some(v) = self.value_at(x) {
            if v > limit {
                break;
            }
            out.push(v);
            // c*x^k is constant in x only when it is zero, which validation excludes
            if self.coefficient == 0 || self.exponent == 0 {
                break;
            }
            x += 1;
        }
        out
    }
}

impl From<(u64, u32)> for Term {
    fn from((c, k): (u64, u32)) -> Self {
        Term::new(c, k)
    }
}

impl From<Term> for (u64, u32) {
    fn from(t: Term) -> Self {
        (t.coefficient, t.exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolutionDomain {
    #[serde(rename = "nonnegative", alias = "nonneg")]
    NonNegative,
    #[serde(rename = "positive")]
    Positive,
}

impl SolutionDomain {
    /// Smallest admissible variable value.
    pub fn first_value(self) -> u64 {
        match self {
            SolutionDomain::NonNegative => 0,
            SolutionDomain::Positive => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolutionDomain::NonNegative => "nonnegative",
            SolutionDomain::Positive => "positive",
        }
    }
}

impl std::str::FromStr for SolutionDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" | "natural" => Ok(SolutionDomain::Positive),
            "nonnegative" | "nonneg" | "non-negative" => Ok(SolutionDomain::NonNegative),
            other => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown solution domain '{other}'"),
            }),
        }
    }
}

impl fmt::Display for SolutionDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationClass {
    /// Every exponent is 1.
    Linear,
    /// Every exponent equals the same `k > 1`.
    EqualPowers,
    MixedPowers,
}

/// Outcome of [`Equation::validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The left-hand side and solution domain of an equation, without its target.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquationTemplate {
    pub terms: Vec<Term>,
    pub domain: SolutionDomain,
}

impl EquationTemplate {
    pub fn new(terms: Vec<Term>, domain: SolutionDomain) -> Self {
        EquationTemplate { terms, domain }
    }

    pub fn with_rhs(&self, rhs: u64) -> Equation {
        Equation {
            terms: self.terms.clone(),
            rhs,
            domain: self.domain,
        }
    }
}

/// `terms[0] + ... + terms[s-1] = rhs`, solved over `domain`.
///
/// The number of variables is `terms.len()`. Construction does not validate;
/// call [`Equation::validate`] or rely on the counters, which reject invalid
/// equations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Equation {
    pub terms: Vec<Term>,
    pub rhs: u64,
    pub domain: SolutionDomain,
}

impl Equation {
    pub fn new(terms: Vec<Term>, rhs: u64, domain: SolutionDomain) -> Self {
        Equation { terms, rhs, domain }
    }

    /// Builds from `(coefficient, exponent)` pairs.
    pub fn from_pairs(pairs: &[(u64, u32)], rhs: u64, domain: SolutionDomain) -> Self {
        Equation::new(pairs.iter().map(|&p| p.into()).collect(), rhs, domain)
    }

    /// `x1 + ... + xs = rhs`.
    pub fn linear_unit(s: usize, rhs: u64, domain: SolutionDomain) -> Self {
        Equation::new(vec![Term::new(1, 1); s], rhs, domain)
    }

    /// `x1^k + ... + xs^k = rhs`.
    pub fn equal_powers(s: usize, k: u32, rhs: u64, domain: SolutionDomain) -> Self {
        Equation::new(vec![Term::new(1, k); s], rhs, domain)
    }

    pub fn variables(&self) -> usize {
        self.terms.len()
    }

    pub fn template(&self) -> EquationTemplate {
        EquationTemplate::new(self.terms.clone(), self.domain)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.terms.is_empty() {
            violations.push("empty term list".to_string());
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.coefficient == 0 {
                violations.push(format!("term {}: coefficient must be ≥ 1", i + 1));
            }
            if t.exponent == 0 {
                violations.push(format!("term {}: exponent must be ≥ 1", i + 1));
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidEquation(report.violations))
        }
    }

    /// Terms sorted by exponent, then coefficient, both descending.
    ///
    /// Reordering terms relabels variables, so every count is unchanged.
    pub fn canonicalize(&self) -> Result<Equation> {
        self.ensure_valid()?;
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| {
            b.exponent
                .cmp(&a.exponent)
                .then(b.coefficient.cmp(&a.coefficient))
        });
        Ok(Equation { terms, ..*self })
    }

    pub fn is_canonical(&self) -> bool {
        self.terms
            .windows(2)
            .all(|w| (w[0].exponent, w[0].coefficient) >= (w[1].exponent, w[1].coefficient))
    }

    pub fn classify(&self) -> Result<EquationClass> {
        self.ensure_valid()?;
        let k0 = self.terms[0].exponent;
        let all_equal = self.terms.iter().all(|t| t.exponent == k0);
        Ok(if all_equal && k0 == 1 {
            EquationClass::Linear
        } else if all_equal {
            EquationClass::EqualPowers
        } else {
            EquationClass::MixedPowers
        })
    }

    /// Exponents in term order.
    pub fn exponents(&self) -> Vec<u32> {
        self.terms.iter().map(|t| t.exponent).collect()
    }

    /// Compact text form `[[c,k],...] ; n ; domain`.
    pub fn to_compact(&self) -> String {
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("[{},{}]", t.coefficient, t.exponent))
            .collect();
        format!("[{}] ; {} ; {}", terms.join(","), self.rhs, self.domain)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}x^{}", t.coefficient, t.exponent)?;
        }
        write!(f, " = {}", self.rhs)
    }
}
