//! Batch counting over a schedule of right-hand sides.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::count::{count_brute_force, dp_table};
use crate::equation::{CountValue, EquationTemplate};
use crate::error::{Error, Result};
use crate::exec::{Budget, Exec};
use crate::expsum::fourier_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Dp,
    Fourier,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Dp => "dp",
            Method::Fourier => "fourier",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "brute" => Ok(Method::Brute),
            "dp" => Ok(Method::Dp),
            "fourier" => Ok(Method::Fourier),
            other => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown sweep method '{other}'"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RecordStatus {
    Ok,
    /// A method refused or errored; the sweep carried on.
    Failed {
        reason: String,
    },
    /// Two methods disagreed.
    Mismatch {
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: u64,
    #[serde(with = "opt_decimal")]
    pub count: Option<CountValue>,
    pub method: String,
    pub seconds: f64,
    #[serde(flatten)]
    pub status: RecordStatus,
}

/// Counts for one equation template over increasing right-hand sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub template: EquationTemplate,
    pub method: String,
    pub records: Vec<SweepRecord>,
}

impl SweepTable {
    /// Records whose count is known.
    pub fn counts(&self) -> impl Iterator<Item = (u64, &CountValue)> {
        self.records
            .iter()
            .filter_map(|r| r.count.as_ref().map(|c| (r.n, c)))
    }

    pub fn failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status != RecordStatus::Ok)
            .count()
    }

    /// CSV with header `n,count,method,seconds`; failed counts are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "count", "method", "seconds"])?;
        for r in &self.records {
            w.write_record([
                r.n.to_string(),
                r.count.as_ref().map(|c| c.to_string()).unwrap_or_default(),
                r.method.clone(),
                format!("{:.6}", r.seconds),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON array of records with counts as decimal strings.
    pub fn records_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.records)?)
    }
}

/// Runs every requested method for each `n`, cross-checking when several are
/// given. Per-record failures are recorded, not propagated.
///
/// The DP method computes one coefficient table up to `max(n_values)` and
/// reads every record from it; its per-record time is the table build time
/// divided evenly across records.
pub fn count_sweep(
    template: &EquationTemplate,
    n_values: &[u64],
    methods: &[Method],
    budget: &Budget,
    exec: Exec,
) -> Result<SweepTable> {
    if n_values.is_empty() {
        return Err(Error::Precondition("n_values must be non-empty".into()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "n_values must be strictly increasing".into(),
        ));
    }
    if methods.is_empty() {
        return Err(Error::Precondition(
            "at least one method is required".into(),
        ));
    }
    template.with_rhs(0).ensure_valid()?;
    let max_n = *n_values.last().expect("non-empty");

    let mut per_method: Vec<Vec<(std::result::Result<CountValue, String>, f64)>> = Vec::new();
    for &m in methods {
        let column = match m {
            Method::Dp => {
                let start = Instant::now();
                match dp_table(&template.with_rhs(max_n), max_n, budget, exec) {
                    Ok(table) => {
                        let share = start.elapsed().as_secs_f64() / n_values.len() as f64;
                        n_values
                            .iter()
                            .map(|&n| (Ok(table[n as usize].clone()), share))
                            .collect()
                    }
                    Err(e) => n_values.iter().map(|_| (Err(e.to_string()), 0.0)).collect(),
                }
            }
            Method::Brute | Method::Fourier => exec.map_slice(n_values, |&n| {
                let eq = template.with_rhs(n);
                let start = Instant::now();
                // the records are already spread across threads
                let r = match m {
                    Method::Brute => count_brute_force(&eq, budget, Exec::Sequential),
                    _ => fourier_count(&eq, budget, Exec::Sequential, None),
                };
                (r.map_err(|e| e.to_string()), start.elapsed().as_secs_f64())
            }),
        };
        per_method.push(column);
    }

    let tag = methods
        .iter()
        .map(|m| m.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let records = n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let seconds = per_method.iter().map(|col| col[i].1).sum();
            let mut count: Option<CountValue> = None;
            let mut status = RecordStatus::Ok;
            for (col, m) in per_method.iter().zip(methods) {
                match (&col[i].0, &count) {
                    (Err(reason), _) => {
                        if status == RecordStatus::Ok {
                            status = RecordStatus::Failed {
                                reason: format!("{}: {reason}", m.as_str()),
                            };
                        }
                    }
                    (Ok(c), None) => count = Some(c.clone()),
                    (Ok(c), Some(prev)) if c != prev => {
                        status = RecordStatus::Mismatch {
                            detail: format!("{} gave {c}, earlier method gave {prev}", m.as_str()),
                        };
                    }
                    _ => {}
                }
            }
            if matches!(status, RecordStatus::Mismatch { .. }) {
                count = None;
            }
            SweepRecord {
                n,
                count,
                method: tag.clone(),
                seconds,
                status,
            }
        })
        .collect();

    Ok(SweepTable {
        template: template.clone(),
        method: tag,
        records,
    })
}

mod opt_decimal {
    use super::CountValue;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<CountValue>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(c) => s.serialize_str(&c.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CountValue>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}
