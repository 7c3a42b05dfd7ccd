//! Upper-bound exponents `e` in estimates `R(n) << n^(e + eps)`, as exact
//! rationals. The arbitrary `eps` terms are never given values; an
//! [`ExponentBound`] only records how many of them the estimate carries.

use serde::{Deserialize, Serialize};

use super::gamma::gamma_fn;
use super::rational::ExactRational;
use crate::error::{Error, Result};

/// Which estimate produced an exponent. Serialized with the tags used in
/// exponent reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    /// `s/k - 1` from the Hardy–Littlewood main term, `s > 2^k`.
    #[serde(rename = "eq26")]
    MainTerm,
    /// `(s - deficit(s)) / k` from Hua's lemma along the binary digits of `s`.
    #[serde(rename = "eq33")]
    EqualPowers,
    /// `sum 1/k_i` from `|f_i| <= N_i`.
    #[serde(rename = "eq42")]
    Trivial,
    /// Cauchy–Schwarz chain over distinct exponents.
    #[serde(rename = "eq45")]
    MixedChain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub description: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Validity {
    pub valid: bool,
    pub conditions: Vec<Condition>,
}

impl Validity {
    fn from_conditions(conditions: Vec<Condition>) -> Self {
        Validity {
            valid: conditions.iter().all(|c| c.holds),
            conditions,
        }
    }

    fn always() -> Self {
        Validity {
            valid: true,
            conditions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentBound {
    pub formula: Formula,
    #[serde(rename = "exponent")]
    pub base_exponent: ExactRational,
    pub epsilon_slots: u32,
    pub validity: Validity,
}

/// `s = 2^j_1 + ... + 2^j_t` with `j_1 > ... > j_t >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryDecomposition {
    pub indices: Vec<u32>,
}

impl BinaryDecomposition {
    pub fn terms(&self) -> usize {
        self.indices.len()
    }

    pub fn value(&self) -> u64 {
        self.indices.iter().map(|&j| 1u64 << j).sum()
    }
}

pub fn binary_decomposition(s: u64) -> Result<BinaryDecomposition> {
    if s == 0 {
        return Err(Error::Precondition("s must be ≥ 1".into()));
    }
    let indices = (0..64u32).rev().filter(|&j| s >> j & 1 == 1).collect();
    Ok(BinaryDecomposition { indices })
}

/// How the last term of the deficit sum is weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeficitForm {
    /// `(j_t + t - 1) / 2^(t-1)`: the last factor of a `t`-fold Hölder chain
    /// carries the same weight as the one before it.
    #[default]
    Chain,
    /// `(j_t + t) / 2^t`, which gives `(j_1 + 1)/2` instead of `j_1` when `s`
    /// is a power of two. Kept for side-by-side reports.
    AsPrinted,
}

/// Exponent saved over the trivial bound `N^s` for `int |f|^s`:
/// `sum_{i<t} (j_i + i)/2^i + (j_t + t - 1)/2^(t-1)`.
pub fn hua_deficit(s: u64) -> Result<ExactRational> {
    hua_deficit_with(s, DeficitForm::Chain)
}

pub fn hua_deficit_with(s: u64, form: DeficitForm) -> Result<ExactRational> {
    let d = binary_decomposition(s)?;
    let t = d.terms() as i128;
    let head: ExactRational = d.indices[..d.terms() - 1]
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let i = i as i128 + 1;
            ExactRational::new(i128::from(j) + i, 1 << i)
        })
        .sum();
    let jt = i128::from(d.indices[d.terms() - 1]);
    let last = match form {
        DeficitForm::Chain => ExactRational::new(jt + t - 1, 1 << (t - 1)),
        DeficitForm::AsPrinted => ExactRational::new(jt + t, 1 << t),
    };
    Ok(head + last)
}

fn floor_log2(s: u64) -> u32 {
    63 - s.leading_zeros()
}

/// `(s - deficit(s)) / k` for `x_1^k + ... + x_s^k = n`.
///
/// Valid when every moment used has `j <= k`: `floor(log2 s) + 1 <= k`, or
/// `floor(log2 s) <= k` when `s` is a power of two.
pub fn exponent_equal_powers(s: u64, k: u32) -> Result<ExponentBound> {
    exponent_equal_powers_with(s, k, DeficitForm::Chain)
}

pub fn exponent_equal_powers_with(s: u64, k: u32, form: DeficitForm) -> Result<ExponentBound> {
    if s < 2 || k < 1 {
        return Err(Error::Precondition(format!(
            "need s ≥ 2 and k ≥ 1, got s = {s}, k = {k}"
        )));
    }
    let deficit = hua_deficit_with(s, form)?;
    let single = s.is_power_of_two();
    let top = floor_log2(s) + u32::from(!single);
    let condition = Condition {
        description: if single {
            format!("floor(log2 {s}) = {top} ≤ k = {k}")
        } else {
            format!("floor(log2 {s}) + 1 = {top} ≤ k = {k}")
        },
        holds: top <= k,
    };
    Ok(ExponentBound {
        formula: Formula::EqualPowers,
        base_exponent: (ExactRational::integer(i128::from(s)) - deficit)
            / ExactRational::integer(i128::from(k)),
        epsilon_slots: 1,
        validity: Validity::from_conditions(vec![condition]),
    })
}

/// `sum_i 1/k_i`.
pub fn preliminary_exponent(ks: &[u32]) -> Result<ExactRational> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::Precondition(
            "exponents must be a non-empty list of naturals".into(),
        ));
    }
    Ok(ks
        .iter()
        .map(|&k| ExactRational::new(1, i128::from(k)))
        .sum())
}

/// Weight of `1/k` for the factor taking Hua index `j` in the chain:
/// `(2^j - j) / 2^j`.
fn chain_weight(j: u32) -> ExactRational {
    let p = 1i128 << j;
    ExactRational::new(p - i128::from(j), p)
}

/// Exponent of the Cauchy–Schwarz chain for `x_1^k_1 + ... + x_s^k_s = n`
/// with `k_1 >= ... >= k_s`.
///
/// The chain peels the smallest exponent first: `f_s` is paired with Hua
/// index 1, `f_{s-1}` with index 2, and so on, while `f_1` shares index
/// `s - 1` with `f_2`. Hence
/// `E = sum_{i=1}^{s-1} (2^i - i)/(2^i k_{s-i+1}) + (2^{s-1} - s + 1)/(2^{s-1} k_1)`.
/// Validity needs `k_{s-i+1} >= i` for `i < s` and `k_1 >= s - 1`.
pub fn exponent_mixed_powers(ks: &[u32]) -> Result<ExponentBound> {
    let s = ks.len();
    if s < 2 {
        return Err(Error::Precondition("need at least two exponents".into()));
    }
    if ks.contains(&0) {
        return Err(Error::Precondition("exponents must be ≥ 1".into()));
    }
    if ks.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Precondition(format!(
            "exponents must be sorted in descending order, got {ks:?}"
        )));
    }
    if s > 100 {
        return Err(Error::Precondition(
            "at most 100 exponents are supported".into(),
        ));
    }
    let mut exponent = ExactRational::zero();
    let mut conditions = Vec::with_capacity(s);
    for i in 1..s {
        let k = ks[s - i];
        exponent = exponent + chain_weight(i as u32) / ExactRational::integer(i128::from(k));
        conditions.push(Condition {
            description: format!("k_{} = {k} ≥ {i}", s - i + 1),
            holds: k as usize >= i,
        });
    }
    let j = (s - 1) as u32;
    exponent = exponent + chain_weight(j) / ExactRational::integer(i128::from(ks[0]));
    conditions.push(Condition {
        description: format!("k_1 = {} ≥ {}", ks[0], s - 1),
        holds: ks[0] as usize >= s - 1,
    });
    Ok(ExponentBound {
        formula: Formula::MixedChain,
        base_exponent: exponent,
        epsilon_slots: s as u32,
        validity: Validity::from_conditions(conditions),
    })
}

/// `s/k - 1`, the pointwise exponent implied by the main term when `s > 2^k`.
pub fn exponent_main_term(s: u64, k: u32) -> Result<ExponentBound> {
    if s < 1 || k < 1 {
        return Err(Error::Precondition("need s ≥ 1 and k ≥ 1".into()));
    }
    let holds = k > 1 && k < 63 && s > 1u64 << k;
    Ok(ExponentBound {
        formula: Formula::MainTerm,
        base_exponent: ExactRational::new(i128::from(s), i128::from(k)) - ExactRational::integer(1),
        epsilon_slots: 1,
        validity: Validity::from_conditions(vec![Condition {
            description: format!("k = {k} > 1 and s = {s} > 2^k"),
            holds,
        }]),
    })
}

/// The trivial bound as an [`ExponentBound`].
pub fn preliminary_bound(ks: &[u32]) -> Result<ExponentBound> {
    Ok(ExponentBound {
        formula: Formula::Trivial,
        base_exponent: preliminary_exponent(ks)?,
        epsilon_slots: 0,
        validity: Validity::always(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub ks: Vec<u32>,
    pub preliminary: ExactRational,
    pub refined: ExponentBound,
    /// `preliminary - refined`; positive whenever the chain is an improvement.
    pub gap: ExactRational,
}

impl ComparisonReport {
    pub fn improves(&self) -> bool {
        self.gap.is_positive()
    }
}

/// Chain exponent against `sum 1/k_i`. Validity of the chain is carried in
/// `refined.validity`.
pub fn exponent_comparison(ks: &[u32]) -> Result<ComparisonReport> {
    let refined = exponent_mixed_powers(ks)?;
    let preliminary = preliminary_exponent(ks)?;
    Ok(ComparisonReport {
        ks: ks.to_vec(),
        preliminary,
        gap: preliminary - refined.base_exponent,
        refined,
    })
}

/// CSV with header `ks,eq42,eq45,gap`; exponent lists are space separated.
pub fn write_comparison_csv<W: std::io::Write>(reports: &[ComparisonReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ks", "eq42", "eq45", "gap"])?;
    for r in reports {
        let ks: Vec<String> = r.ks.iter().map(u32::to_string).collect();
        w.write_record([
            ks.join(" "),
            r.preliminary.to_string(),
            r.refined.base_exponent.to_string(),
            r.gap.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Every bound that applies to an equation with these exponents, in any
/// order: the trivial bound always, the chain for two or more terms, and the
/// equal-power bounds when all exponents coincide. Validity is not filtered.
pub fn applicable_bounds(ks: &[u32]) -> Result<Vec<ExponentBound>> {
    let mut sorted = ks.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut out = vec![preliminary_bound(&sorted)?];
    if sorted.len() >= 2 {
        out.push(exponent_mixed_powers(&sorted)?);
    }
    let s = sorted.len() as u64;
    if sorted.iter().all(|&k| k == sorted[0]) {
        let k = sorted[0];
        if s >= 2 {
            out.push(exponent_equal_powers(s, k)?);
        }
        if k > 1 {
            out.push(exponent_main_term(s, k)?);
        }
    }
    Ok(out)
}

/// The smallest exponent among the valid bounds.
pub fn best_valid_bound(bounds: &[ExponentBound]) -> Option<&ExponentBound> {
    bounds
        .iter()
        .filter(|b| b.validity.valid)
        .min_by(|a, b| a.base_exponent.cmp(&b.base_exponent))
}

/// Both readings of the main-term constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTermCoefficient {
    /// `Γ(1 + 1/k) / Γ(s/k)`.
    pub paper_form: f64,
    /// `Γ(1 + 1/k)^s / Γ(s/k)`.
    pub standard_form: f64,
}

pub fn main_term_coefficient(s: u64, k: u32) -> Result<MainTermCoefficient> {
    if s < 1 || k < 1 {
        return Err(Error::Precondition("need s ≥ 1 and k ≥ 1".into()));
    }
    let k = f64::from(k);
    let g = gamma_fn(1.0 + 1.0 / k)?;
    let denom = gamma_fn(s as f64 / k)?;
    Ok(MainTermCoefficient {
        paper_form: g / denom,
        standard_form: g.powi(s as i32) / denom,
    })
}

/// Whether `Γ(1 + 1/k) / Γ(s/k) < 1`. Only defined for `k > 1`, `s > 2^k`.
pub fn paper_inequality_25(s: u64, k: u32) -> Result<bool> {
    if k <= 1 || k >= 63 || s <= 1u64 << k {
        return Err(Error::Precondition(format!(
            "requires k > 1 and s > 2^k, got s = {s}, k = {k}"
        )));
    }
    Ok(main_term_coefficient(s, k)?.paper_form < 1.0)
}
