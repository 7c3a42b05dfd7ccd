//! Truncated power series with exact coefficients.
//!
//! The count of solutions with right-hand side `n` is the `t^n` coefficient of
//! `prod_i sum_x t^(c_i * x^k_i)`. Extracting that coefficient from the
//! truncated product is the same quantity as the residue of `phi(z)/z^(n+1)`
//! at the origin, so no contour integration or symbolic differentiation is
//! needed.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::equation::{CountValue, Equation, SolutionDomain};
use crate::error::{BudgetKind, Error, Result};
use crate::exec::{Budget, Exec};

/// Coefficients `a_0 ..= a_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coefficients: Vec<CountValue>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coefficients: vec![BigUint::zero(); order + 1],
        }
    }

    /// The constant series 1.
    pub fn one(order: usize) -> Self {
        let mut s = PowerSeries::zero(order);
        s.coefficients[0] = BigUint::from(1u32);
        s
    }

    /// Builds from explicit coefficients; the order is `len - 1`.
    ///
    /// # Panics
    /// If `coefficients` is empty.
    pub fn from_coefficients(coefficients: Vec<CountValue>) -> Self {
        assert!(
            !coefficients.is_empty(),
            "a series has at least one coefficient"
        );
        PowerSeries { coefficients }
    }

    pub fn from_u64s(values: &[u64]) -> Self {
        PowerSeries::from_coefficients(values.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[CountValue] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<CountValue> {
        self.coefficients
    }

    /// Coefficients as decimal strings, for dumps.
    pub fn to_json(&self) -> String {
        let strings: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        serde_json::to_string(&strings).expect("string array serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let strings: Vec<String> = serde_json::from_str(json)?;
        if strings.is_empty() {
            return Err(Error::Precondition("empty coefficient array".into()));
        }
        let coefficients = strings
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse::<BigUint>().map_err(|_| Error::Parse {
                    pos: i,
                    msg: format!("coefficient '{s}' is not a decimal integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PowerSeries { coefficients })
    }

    fn nonzero_indices(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect()
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        let json = serde_json::to_string(&strings).map_err(serde::de::Error::custom)?;
        PowerSeries::from_json(&json).map_err(serde::de::Error::custom)
    }
}

/// `sum_x t^(c * x^k)` truncated at `order`, with `x` starting at 0 or 1.
pub fn term_series(c: u64, k: u32, order: usize, domain: SolutionDomain) -> PowerSeries {
    let mut s = PowerSeries::zero(order);
    let term = crate::equation::Term::new(c, k);
    for v in term.values_up_to(order as u64, domain) {
        s.coefficients[v as usize] = BigUint::from(1u32);
    }
    s
}

/// Cauchy product truncated at the common order.
pub fn series_product(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries> {
    series_product_with(a, b, Exec::Sequential)
}

/// [`series_product`] with an explicit execution policy. Output coefficients
/// are computed independently, so the parallel path is bit-identical.
pub fn series_product_with(a: &PowerSeries, b: &PowerSeries, exec: Exec) -> Result<PowerSeries> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch {
            left: a.order(),
            right: b.order(),
        });
    }
    // iterate over the sparser factor's support
    let (sparse, dense) = if a.nonzero_indices().len() <= b.nonzero_indices().len() {
        (a, b)
    } else {
        (b, a)
    };
    let support = sparse.nonzero_indices();
    let order = a.order();
    let mut out = vec![BigUint::zero(); order + 1];
    exec.fill(&mut out, |m| {
        let mut acc = BigUint::zero();
        for &i in support.iter().take_while(|&&i| i <= m) {
            let d = &dense.coefficients[m - i];
            if !d.is_zero() {
                acc += &sparse.coefficients[i] * d;
            }
        }
        acc
    });
    Ok(PowerSeries { coefficients: out })
}

/// The `t^n` coefficient.
pub fn coefficient(series: &PowerSeries, n: u64) -> Result<CountValue> {
    usize::try_from(n)
        .ok()
        .and_then(|i| series.coefficients.get(i))
        .cloned()
        .ok_or(Error::BeyondTruncation {
            index: n,
            order: series.order(),
        })
}

/// Product of all term series of `eq`, truncated at `order`.
pub fn equation_series(
    eq: &Equation,
    order: usize,
    budget: &Budget,
    exec: Exec,
) -> Result<PowerSeries> {
    eq.ensure_valid()?;
    budget.check(BudgetKind::Memory, series_bytes_estimate(eq, order))?;
    let mut acc = PowerSeries::one(order);
    for t in &eq.terms {
        let f = term_series(t.coefficient, t.exponent, order, eq.domain);
        acc = series_product_with(&f, &acc, exec)?;
    }
    Ok(acc)
}

/// Counts solutions as the `t^rhs` coefficient of the generating function.
pub fn residue_count(eq: &Equation, budget: &Budget, exec: Exec) -> Result<CountValue> {
    let order = usize::try_from(eq.rhs)
        .map_err(|_| Error::Precondition("right-hand side exceeds addressable size".into()))?;
    let series = equation_series(eq, order, budget, exec)?;
    coefficient(&series, eq.rhs)
}

/// Upper estimate of the bytes held by two coefficient arrays of length
/// `order + 1` whose entries are bounded by the total tuple count.
pub fn series_bytes_estimate(eq: &Equation, order: usize) -> u128 {
    let bits: f64 = eq
        .terms
        .iter()
        .map(|t| {
            let values = t.values_up_to(order as u64, eq.domain).len().max(1);
            (values as f64).log2()
        })
        .sum();
    let limbs = (bits / 64.0).ceil() as u128 + 1;
    let per_slot = std::mem::size_of::<BigUint>() as u128 + 8 * limbs;
    2 * (order as u128 + 1) * per_slot
}
