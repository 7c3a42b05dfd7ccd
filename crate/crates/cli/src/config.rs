//! Sweep campaign configuration (JSON).

use std::path::{Path, PathBuf};

use dioph_core::equation::parse_template;
use dioph_core::genfunc::series_bytes_estimate;
use dioph_core::sweep::Method;
use dioph_core::{Budget, EquationTemplate, SolutionDomain};
use serde::Deserialize;

use crate::CliError;

/// Upper limit for geometric schedules without an explicit maximum.
const GEOMETRIC_HARD_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EquationSpec {
    Text(String),
    Template(EquationTemplate),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    List(Vec<u64>),
    /// Every integer in `start..=end`.
    Range {
        start: u64,
        end: u64,
    },
    Geometric {
        #[serde(default = "default_start")]
        start: u64,
        #[serde(default = "default_ratio")]
        ratio: u64,
        max: Option<u64>,
    },
}

fn default_start() -> u64 {
    16
}

fn default_ratio() -> u64 {
    2
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    #[default]
    None,
    Pointwise,
    Summatory,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub equation: EquationSpec,
    #[serde(default)]
    pub domain: Option<SolutionDomain>,
    pub schedule: Schedule,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub fit: FitKind,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub budgets: Option<Budget>,
    #[serde(default)]
    pub parallelism: Option<usize>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Dp]
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let config: CampaignConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.methods.is_empty() {
            return Err(CliError::Usage("config lists no methods".into()));
        }
        if let Some(b) = &self.budgets {
            if b.nodes == 0 || b.memory_bytes == 0 || b.samples == 0 {
                return Err(CliError::Usage("budgets must be positive".into()));
            }
        }
        if self.parallelism == Some(0) {
            return Err(CliError::Usage("parallelism must be positive".into()));
        }
        Ok(())
    }

    pub fn template(&self) -> Result<EquationTemplate, CliError> {
        let domain = self.domain.unwrap_or(SolutionDomain::Positive);
        let template = match &self.equation {
            EquationSpec::Text(t) => parse_template(t, domain)?,
            EquationSpec::Template(t) => t.clone(),
        };
        template.with_rhs(0).ensure_valid()?;
        Ok(template)
    }

    /// Expands the schedule into strictly increasing `n` values.
    pub fn n_values(
        &self,
        template: &EquationTemplate,
        budget: &Budget,
    ) -> Result<Vec<u64>, CliError> {
        let values = match &self.schedule {
            Schedule::List(v) => v.clone(),
            Schedule::Range { start, end } => (*start..=*end).collect(),
            Schedule::Geometric { start, ratio, max } => {
                if *start == 0 || *ratio < 2 {
                    return Err(CliError::Usage(
                        "geometric schedules need start ≥ 1 and ratio ≥ 2".into(),
                    ));
                }
                let ceiling = max.unwrap_or_else(|| memory_ceiling(template, budget));
                let mut v = Vec::new();
                let mut n = *start;
                while n <= ceiling {
                    v.push(n);
                    n = match n.checked_mul(*ratio) {
                        Some(next) => next,
                        None => break,
                    };
                }
                v
            }
        };
        if values.is_empty() {
            return Err(CliError::Usage("schedule is empty".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage(
                "schedule must be strictly increasing".into(),
            ));
        }
        Ok(values)
    }
}

/// Largest power of two whose coefficient table fits the memory budget.
fn memory_ceiling(template: &EquationTemplate, budget: &Budget) -> u64 {
    let mut n = 16u64;
    while n < GEOMETRIC_HARD_CAP {
        let next = n * 2;
        let eq = template.with_rhs(next);
        if series_bytes_estimate(&eq, next as usize) > u128::from(budget.memory_bytes) {
            break;
        }
        n = next;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> CampaignConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn schedules_expand() {
        let c = parse(r#"{"equation":"x+x","schedule":{"range":{"start":2,"end":5}}}"#);
        let t = c.template().unwrap();
        assert_eq!(
            c.n_values(&t, &Budget::default()).unwrap(),
            vec![2, 3, 4, 5]
        );

        let c = parse(r#"{"equation":"x^2+x^2","schedule":{"geometric":{"max":100}}}"#);
        let t = c.template().unwrap();
        assert_eq!(
            c.n_values(&t, &Budget::default()).unwrap(),
            vec![16, 32, 64]
        );

        let c = parse(r#"{"equation":"x","schedule":{"list":[3,2]}}"#);
        let t = c.template().unwrap();
        assert!(c.n_values(&t, &Budget::default()).is_err());
    }

    #[test]
    fn geometric_ceiling_follows_memory_budget() {
        let c = parse(r#"{"equation":"x^2+x^2+x^2","schedule":{"geometric":{}}}"#);
        let t = c.template().unwrap();
        let small = Budget {
            memory_bytes: 1 << 20,
            ..Budget::default()
        };
        let v = c.n_values(&t, &small).unwrap();
        assert_eq!(v[0], 16);
        assert!(*v.last().unwrap() < 1 << 16);
    }

    #[test]
    fn template_forms() {
        let c = parse(
            r#"{"equation":{"terms":[[1,2],[1,2]],"domain":"nonnegative"},"schedule":{"list":[1]}}"#,
        );
        assert_eq!(c.template().unwrap().domain, SolutionDomain::NonNegative);
        let c = parse(
            r#"{"equation":"x^2+x^2","domain":"nonnegative","schedule":{"list":[1]},"methods":["dp","brute"],"fit":"summatory"}"#,
        );
        assert_eq!(c.methods, vec![Method::Dp, Method::Brute]);
        assert_eq!(c.fit, FitKind::Summatory);
    }
}
