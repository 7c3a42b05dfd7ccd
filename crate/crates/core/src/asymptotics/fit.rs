use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::biguint_to_f64;
use crate::sweep::SweepTable;

use super::gamma::ln_gamma;

/// Slack added to a bound exponent before comparing a fitted slope with it.
pub const SLOPE_SLACK: f64 = 0.2;

/// Minimum number of usable points for any fit.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Ordinary least squares of `ln y` on `ln x`. Points with a non-positive
/// coordinate are skipped.
pub fn least_squares_loglog(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            have: logs.len(),
            need: MIN_FIT_POINTS,
        });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
        points: logs.len(),
    })
}

/// Growth exponent of a sweep.
///
/// With `summatory = false` the counts themselves are fitted. With
/// `summatory = true` the partial sums `S(n) = sum_{m<=n} R(m)` are fitted;
/// that needs a dense table (consecutive `n`, starting at 0 or 1, no failed
/// records) so that the running sum is the true summatory function.
pub fn empirical_slope(table: &SweepTable, summatory: bool) -> Result<SlopeFit> {
    if !summatory {
        let points: Vec<(f64, f64)> = table
            .counts()
            .map(|(n, c)| (n as f64, biguint_to_f64(c)))
            .collect();
        return least_squares_loglog(&points);
    }
    let records = &table.records;
    let first = records.first().map(|r| r.n).unwrap_or(0);
    if first > 1 || records.windows(2).any(|w| w[1].n != w[0].n + 1) {
        return Err(Error::Precondition(
            "summatory fits need consecutive n starting at 0 or 1".into(),
        ));
    }
    let mut running = BigUint::default();
    let mut points = Vec::with_capacity(records.len());
    for r in records {
        let c = r
            .count
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("record n = {} has no count", r.n)))?;
        running += c;
        points.push((r.n as f64, biguint_to_f64(&running)));
    }
    least_squares_loglog(&points)
}

/// `n^(s-1) / ((s-1)! * prod a_i)`, the leading term of the number of
/// positive solutions of `a_1 x_1 + ... + a_s x_s = n`.
pub fn linear_main_term(coefficients: &[u64], n: u64) -> Result<f64> {
    if coefficients.is_empty() || coefficients.contains(&0) {
        return Err(Error::Precondition(
            "coefficients must be a non-empty list of naturals".into(),
        ));
    }
    let s = coefficients.len();
    let nf = n as f64;
    let direct = nf.powi(s as i32 - 1)
        / ((1..s).map(|i| i as f64).product::<f64>()
            * coefficients.iter().map(|&a| a as f64).product::<f64>());
    if direct.is_finite() && direct > 0.0 {
        return Ok(direct);
    }
    if n == 0 {
        return Ok(if s == 1 {
            1.0 / coefficients[0] as f64
        } else {
            0.0
        });
    }
    let log = (s as f64 - 1.0) * nf.ln()
        - ln_gamma(s as f64)?
        - coefficients.iter().map(|&a| (a as f64).ln()).sum::<f64>();
    Ok(log.exp())
}
