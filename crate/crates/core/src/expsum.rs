//! Weyl sums, exact Fourier-coefficient counting and Hua moments.
//!
//! All sampling is at rational points `r / M`. Phases are reduced modulo `M`
//! in integer arithmetic before any transcendental call, so every sample is
//! accurate to machine precision no matter how large `c * m^k` grows.

use std::f64::consts::TAU;
use std::io::Write;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{least_squares_loglog, SlopeFit};
use crate::equation::{CountValue, Equation, SolutionDomain};
use crate::error::{BudgetKind, Error, Result};
use crate::exec::{Budget, CompensatedSum, Exec};

/// A value of an exponential sum.
pub type ComplexSample = Complex64;

/// Samples per deterministic accumulation block.
const BLOCK: usize = 1024;

/// Phase tables larger than this are replaced by direct `sin_cos` calls.
const MAX_PHASE_TABLE: u64 = 1 << 24;

/// Largest `N` with `N^k <= n`, by integer verification.
///
/// # Panics
/// If `k == 0`.
pub fn nth_root_index(n: u64, k: u32) -> u64 {
    assert!(k >= 1, "root index must be ≥ 1");
    if k == 1 || n < 2 {
        return n;
    }
    let exceeds = |x: u64| x.checked_pow(k).is_none_or(|p| p > n);
    let mut x = (n as f64).powf(1.0 / f64::from(k)).round() as u64;
    while x > 0 && exceeds(x) {
        x -= 1;
    }
    while !exceeds(x + 1) {
        x += 1;
    }
    x
}

/// `e(theta) = exp(2*pi*i*theta)`.
fn unit(theta: f64) -> Complex64 {
    let (s, c) = (TAU * theta).sin_cos();
    Complex64::new(c, s)
}

/// Fractional part of `x * v`, with the product reduced exactly.
///
/// A finite double in `(0, 1)` is `mant / 2^shift`, so
/// `frac(x * v) = ((mant * v) mod 2^shift) / 2^shift`; arithmetic modulo
/// 2^128 is enough whenever `shift <= 128`.
fn frac_of_product(x: f64, v: u128) -> f64 {
    let x = x - x.floor();
    if x == 0.0 {
        return 0.0;
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let (mant, exp) = if raw_exp == 0 {
        (u128::from(bits & ((1 << 52) - 1)), -1074)
    } else {
        (
            u128::from((bits & ((1 << 52) - 1)) | (1 << 52)),
            raw_exp - 1075,
        )
    };
    let shift = -exp;
    if shift > 128 {
        // x < 2^-75; only reachable for astronomically small arguments
        return (x * v as f64).fract();
    }
    let prod = mant.wrapping_mul(v);
    let reduced = if shift == 128 {
        prod
    } else {
        prod & ((1u128 << shift) - 1)
    };
    reduced as f64 * (-f64::from(shift)).exp2()
}

/// `sum_{m=1..N} e(x * c * m^k)` for real `x`.
pub fn weyl_sum(x: f64, n_terms: u64, k: u32, c: u64) -> ComplexSample {
    let terms = (1..=n_terms).map(|m| {
        let v = u128::from(c).wrapping_mul(u128::from(m).wrapping_pow(k));
        unit(frac_of_product(x, v))
    });
    sum_complex(terms)
}

/// `sum_{m=1..N} e(r/M * c * m^k)`, with the phase `(r * c * m^k) mod M`
/// computed exactly.
pub fn weyl_sum_at_fraction(r: u64, modulus: u64, n_terms: u64, k: u32, c: u64) -> ComplexSample {
    assert!(modulus > 0, "modulus must be positive");
    let terms = (1..=n_terms).map(|m| {
        let w = residue_of_term(c, m, k, modulus);
        let phase = (u128::from(r) * u128::from(w)) % u128::from(modulus);
        unit(phase as f64 / modulus as f64)
    });
    sum_complex(terms)
}

fn sum_complex(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for z in terms {
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// `c * m^k mod M` by square-and-multiply.
fn residue_of_term(c: u64, m: u64, k: u32, modulus: u64) -> u64 {
    let md = u128::from(modulus);
    let mut base = u128::from(m) % md;
    let mut e = k;
    let mut acc = 1u128 % md;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % md;
        }
        base = base * base % md;
        e >>= 1;
    }
    (acc * (u128::from(c) % md) % md) as u64
}

/// Values `e(j / M)` for `j in 0..M`, or direct evaluation for huge `M`.
struct PhaseTable {
    modulus: u64,
    table: Option<Vec<Complex64>>,
}

impl PhaseTable {
    fn new(modulus: u64, exec: Exec) -> Self {
        let table = (modulus <= MAX_PHASE_TABLE)
            .then(|| exec.map_range(modulus as usize, |j| unit(j as f64 / modulus as f64)));
        PhaseTable { modulus, table }
    }

    fn at(&self, j: u64) -> Complex64 {
        match &self.table {
            Some(t) => t[j as usize],
            None => unit(j as f64 / self.modulus as f64),
        }
    }

    /// `e(r * w / M)`.
    fn at_product(&self, r: u64, w: u64) -> Complex64 {
        self.at(((u128::from(r) * u128::from(w)) % u128::from(self.modulus)) as u64)
    }
}

/// `(1/M) * sum_{r<M} g(r)`, summed in fixed blocks so the result does not
/// depend on scheduling.
fn average_over_samples<F>(modulus: u64, exec: Exec, g: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync + Send,
{
    let blocks = modulus.div_ceil(BLOCK as u64) as usize;
    let partial = exec.map_range(blocks, |b| {
        let lo = b as u64 * BLOCK as u64;
        let hi = (lo + BLOCK as u64).min(modulus);
        sum_complex((lo..hi).map(&g))
    });
    sum_complex(partial.into_iter()) / modulus as f64
}

/// Degree bound `D = sum_i c_i * floor(n^(1/k_i))^k_i` of the product of the
/// per-term exponential sums.
pub fn trig_degree(eq: &Equation) -> u128 {
    eq.terms
        .iter()
        .map(|t| {
            let n = nth_root_index(eq.rhs, t.exponent);
            u128::from(t.coefficient) * u128::from(n).pow(t.exponent)
        })
        .sum()
}

/// Sample count that makes the discrete average equal the integral:
/// one more than the larger of the degree bound and the target frequency.
pub fn exact_sample_count(eq: &Equation) -> u128 {
    trig_degree(eq).max(u128::from(eq.rhs)) + 1
}

/// The raw average `(1/M) sum_r prod_i f_i(r/M) e(-r n / M)`.
pub fn fourier_coefficient(eq: &Equation, samples: u64, exec: Exec) -> Result<ComplexSample> {
    eq.ensure_valid()?;
    if samples == 0 {
        return Err(Error::Precondition("sample count must be positive".into()));
    }
    let phases = PhaseTable::new(samples, exec);
    let residues: Vec<Vec<u64>> = eq
        .terms
        .iter()
        .map(|t| {
            let n = nth_root_index(eq.rhs, t.exponent);
            (1..=n)
                .map(|m| residue_of_term(t.coefficient, m, t.exponent, samples))
                .collect()
        })
        .collect();
    let zero_term = eq.domain == SolutionDomain::NonNegative;
    let target = eq.rhs % samples;
    let value = average_over_samples(samples, exec, |r| {
        let mut prod = phases.at((samples
            - (u128::from(r) * u128::from(target) % u128::from(samples)) as u64)
            % samples);
        for ws in &residues {
            let mut f = if zero_term {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            };
            for &w in ws {
                f += phases.at_product(r, w);
            }
            prod *= f;
        }
        prod
    });
    Ok(value)
}

/// Counts solutions as the `n`-th Fourier coefficient of the product of
/// exponential sums, sampled at `M` equidistant points.
///
/// With the default `M` the quadrature is exact, so the result is an integer
/// up to rounding. The rounding is checked: real part within `1e-6 * M` of an
/// integer and imaginary part within `1e-6 * M` of zero.
pub fn fourier_count(
    eq: &Equation,
    budget: &Budget,
    exec: Exec,
    samples_override: Option<u64>,
) -> Result<CountValue> {
    eq.ensure_valid()?;
    let samples = match samples_override {
        Some(m) => u128::from(m),
        None => exact_sample_count(eq),
    };
    budget.check(
        BudgetKind::Samples,
        samples.saturating_mul(eq.terms.len() as u128),
    )?;
    let samples = u64::try_from(samples).map_err(|_| Error::BudgetExceeded {
        kind: BudgetKind::Samples,
        required: samples,
        limit: u128::from(budget.samples),
    })?;
    let value = fourier_coefficient(eq, samples, exec)?;
    round_count(value, samples)
}

fn round_count(value: Complex64, samples: u64) -> Result<CountValue> {
    let tol = 1e-6 * samples as f64;
    let rounded = value.re.round();
    if !value.re.is_finite()
        || !value.im.is_finite()
        || (value.re - rounded).abs() > tol
        || value.im.abs() > tol
        || rounded < 0.0
    {
        return Err(Error::Rounding {
            re: value.re,
            im: value.im,
            samples,
        });
    }
    // integers above 2^53 are not represented exactly; refuse rather than guess
    if rounded > 9_007_199_254_740_992.0 {
        return Err(Error::Rounding {
            re: value.re,
            im: value.im,
            samples,
        });
    }
    Ok(BigUint::from(rounded as u64))
}

/// `(1/M) sum_r prod_i |f_i(r/M)|` divided by the exact count: how much the
/// absolute-value bound overshoots on this equation. Not an exact quadrature,
/// since `|f|` is not a trigonometric polynomial. `None` when the count is 0.
pub fn absolute_bound_ratio(eq: &Equation, count: &CountValue, exec: Exec) -> Result<Option<f64>> {
    eq.ensure_valid()?;
    let count: f64 = match u64::try_from(count) {
        Ok(0) => return Ok(None),
        Ok(c) => c as f64,
        Err(_) => return Ok(None),
    };
    let samples = u64::try_from(exact_sample_count(eq))
        .map_err(|_| Error::Precondition("sample count overflow".into()))?;
    let phases = PhaseTable::new(samples, exec);
    let zero_term = eq.domain == SolutionDomain::NonNegative;
    let residues: Vec<Vec<u64>> = eq
        .terms
        .iter()
        .map(|t| {
            (1..=nth_root_index(eq.rhs, t.exponent))
                .map(|m| residue_of_term(t.coefficient, m, t.exponent, samples))
                .collect()
        })
        .collect();
    let avg = average_over_samples(samples, exec, |r| {
        let mut prod = 1.0;
        for ws in &residues {
            let mut f = if zero_term {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            };
            for &w in ws {
                f += phases.at_product(r, w);
            }
            prod *= f.norm();
        }
        Complex64::new(prod, 0.0)
    });
    Ok(Some(avg.re / count))
}

/// One row of a Hua-moment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    #[serde(rename = "N")]
    pub n_max: u64,
    pub k: u32,
    pub j: u32,
    #[serde(with = "decimal")]
    pub combinatorial: CountValue,
    pub quadrature: f64,
    pub samples: u64,
}

impl MomentRecord {
    /// Whether the two routes agree within `1e-6 * samples`.
    pub fn agrees(&self) -> bool {
        let exact = self
            .combinatorial
            .to_string()
            .parse::<f64>()
            .unwrap_or(f64::NAN);
        (self.quadrature - exact).abs() <= 1e-6 * self.samples as f64
    }
}

/// CSV with header `N,k,j,combinatorial,quadrature,samples`.
pub fn write_moment_csv<W: Write>(records: &[MomentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "k", "j", "combinatorial", "quadrature", "samples"])?;
    for r in records {
        w.write_record([
            r.n_max.to_string(),
            r.k.to_string(),
            r.j.to_string(),
            r.combinatorial.to_string(),
            format!("{:.6}", r.quadrature),
            r.samples.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn check_moment_args(n_max: u64, k: u32, j: u32) -> Result<u64> {
    if n_max == 0 || k == 0 || j == 0 {
        return Err(Error::Precondition("N, k and j must all be ≥ 1".into()));
    }
    if j > 16 {
        return Err(Error::Precondition(format!(
            "moment index j = {j} is too large"
        )));
    }
    Ok(1u64 << (j - 1))
}

/// `int_0^1 |f(x)|^(2^j) dx` for `f(x) = sum_{m<=N} e(x m^k)`, counted as the
/// number of solutions of `x_1^k + .. + x_h^k = y_1^k + .. + y_h^k` with
/// `h = 2^(j-1)` and all variables in `1..=N`.
///
/// Builds the histogram of `h`-fold sums by repeated convolution and returns
/// the sum of squared multiplicities.
pub fn hua_moment_combinatorial(
    n_max: u64,
    k: u32,
    j: u32,
    budget: &Budget,
    exec: Exec,
) -> Result<CountValue> {
    let h = check_moment_args(n_max, k, j)?;
    let top = u128::from(n_max)
        .checked_pow(k)
        .and_then(|p| p.checked_mul(u128::from(h)))
        .ok_or_else(|| Error::Precondition("power range overflows".into()))?;
    budget.check(BudgetKind::Memory, (top + 1) * 16)?;
    budget.check(
        BudgetKind::Nodes,
        u128::from(h) * u128::from(n_max) * (top + 1),
    )?;
    if (n_max as f64).powi(h as i32) >= u64::MAX as f64 {
        return Err(Error::Precondition(
            "histogram multiplicities overflow".into(),
        ));
    }
    let powers: Vec<usize> = (1..=n_max).map(|m| m.pow(k) as usize).collect();

    let mut hist = vec![0u64; 1];
    hist[0] = 1;
    for _ in 0..h {
        let len = hist.len() + powers[powers.len() - 1];
        let mut next = vec![0u64; len];
        let prev = &hist;
        exec.fill(&mut next, |v| {
            powers
                .iter()
                .take_while(|&&p| p <= v)
                .filter_map(|&p| prev.get(v - p))
                .sum()
        });
        hist = next;
    }
    let mut total = BigUint::zero();
    let mut acc = 0u128;
    for &m in &hist {
        let sq = u128::from(m) * u128::from(m);
        match acc.checked_add(sq) {
            Some(a) => acc = a,
            None => {
                total += acc;
                acc = sq;
            }
        }
    }
    total += acc;
    Ok(total)
}

/// The same moment by enumerating all `N^(2h)` tuples. Only for tiny inputs.
pub fn hua_moment_enumerated(n_max: u64, k: u32, j: u32, budget: &Budget) -> Result<CountValue> {
    let h = check_moment_args(n_max, k, j)?;
    let nodes = u128::from(n_max)
        .checked_pow(2 * h as u32)
        .unwrap_or(u128::MAX);
    budget.check(BudgetKind::Nodes, nodes)?;
    let powers: Vec<i128> = (1..=n_max).map(|m| i128::from(m).pow(k)).collect();

    fn walk(powers: &[i128], depth: u64, h: u64, balance: i128) -> u64 {
        if depth == 2 * h {
            return u64::from(balance == 0);
        }
        let sign = if depth < h { 1 } else { -1 };
        powers
            .iter()
            .map(|&p| walk(powers, depth + 1, h, balance + sign * p))
            .sum()
    }
    Ok(BigUint::from(walk(&powers, 0, h, 0)))
}

/// Samples needed to integrate `|f|^(2^j)` exactly: `2^j * N^k + 1`.
pub fn hua_sample_count(n_max: u64, k: u32, j: u32) -> Option<u64> {
    n_max
        .checked_pow(k)?
        .checked_mul(1u64.checked_shl(j)?)?
        .checked_add(1)
}

/// `(1/M) sum_r |f(r/M)|^(2^j)` with `M` from [`hua_sample_count`].
pub fn hua_moment_quadrature(
    n_max: u64,
    k: u32,
    j: u32,
    budget: &Budget,
    exec: Exec,
) -> Result<f64> {
    check_moment_args(n_max, k, j)?;
    let samples = hua_sample_count(n_max, k, j)
        .ok_or_else(|| Error::Precondition("sample count overflows".into()))?;
    budget.check(BudgetKind::Samples, u128::from(samples))?;
    let phases = PhaseTable::new(samples, exec);
    let residues: Vec<u64> = (1..=n_max)
        .map(|m| residue_of_term(1, m, k, samples))
        .collect();
    let half_power = 1i32 << (j - 1);
    let avg = average_over_samples(samples, exec, |r| {
        let mut f = Complex64::zero();
        for &w in &residues {
            f += phases.at_product(r, w);
        }
        Complex64::new(f.norm_sqr().powi(half_power), 0.0)
    });
    Ok(avg.re)
}

/// Both moment routes for one `(N, k, j)`.
pub fn hua_moment_record(
    n_max: u64,
    k: u32,
    j: u32,
    budget: &Budget,
    exec: Exec,
) -> Result<MomentRecord> {
    let combinatorial = hua_moment_combinatorial(n_max, k, j, budget, exec)?;
    let quadrature = hua_moment_quadrature(n_max, k, j, budget, exec)?;
    Ok(MomentRecord {
        n_max,
        k,
        j,
        combinatorial,
        quadrature,
        samples: hua_sample_count(n_max, k, j).expect("checked by quadrature"),
    })
}

/// Least-squares slope of `log(moment)` against `log(N)`, using the
/// combinatorial moments. Requires `1 <= j <= k` and at least four
/// increasing values of `N`.
pub fn hua_slope_fit(
    k: u32,
    j: u32,
    n_values: &[u64],
    budget: &Budget,
    exec: Exec,
) -> Result<SlopeFit> {
    if j == 0 || j > k {
        return Err(Error::Precondition(format!(
            "Hua's lemma needs 1 ≤ j ≤ k, got j = {j}, k = {k}"
        )));
    }
    if n_values.len() < 4 {
        return Err(Error::InsufficientPoints {
            have: n_values.len(),
            need: 4,
        });
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "N values must be strictly increasing".into(),
        ));
    }
    let mut points = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let m = hua_moment_combinatorial(n, k, j, budget, exec)?;
        points.push((n as f64, biguint_to_f64(&m)));
    }
    least_squares_loglog(&points)
}

pub(crate) fn biguint_to_f64(v: &BigUint) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY)
}

mod decimal {
    use super::CountValue;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &CountValue, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CountValue, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
