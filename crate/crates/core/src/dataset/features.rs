//! Declarative feature engineering from a filtered table to a numeric dataset.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::csv_table::{status_label, RawTable};
use super::Dataset;
use crate::error::{Error, Result};

const DEFAULT_CONFIG: &str = include_str!("../../configs/crunchbase_features.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureRule {
    Numeric {
        name: String,
        column: String,
        #[serde(default)]
        required: bool,
    },
    DaysBetween {
        name: String,
        from: String,
        to: String,
        #[serde(default = "yes")]
        required: bool,
    },
    Frequency {
        name: String,
        column: String,
    },
}

fn yes() -> bool {
    true
}

impl FeatureRule {
    pub fn name(&self) -> &str {
        match self {
            FeatureRule::Numeric { name, .. }
            | FeatureRule::DaysBetween { name, .. }
            | FeatureRule::Frequency { name, .. } => name,
        }
    }

    fn columns(&self) -> Vec<&str> {
        match self {
            FeatureRule::Numeric { column, .. } | FeatureRule::Frequency { column, .. } => {
                vec![column]
            }
            FeatureRule::DaysBetween { from, to, .. } => vec![from, to],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub status_column: String,
    #[serde(rename = "feature")]
    pub features: Vec<FeatureRule>,
}

impl FeatureConfig {
    /// The shipped 17-feature configuration for the Crunchbase export.
    pub fn crunchbase_default() -> Self {
        toml::from_str(DEFAULT_CONFIG).expect("bundled feature config parses")
    }

    pub fn default_toml() -> &'static str {
        DEFAULT_CONFIG
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        FeatureConfig::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineerSummary {
    pub input_rows: usize,
    pub kept_rows: usize,
    pub dropped_rows: usize,
    /// First failing feature per dropped row, counted by feature name.
    pub drop_reasons: BTreeMap<String, usize>,
}

/// A cell that is neither blank nor a finite number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unparseable;

/// Parses a money-like cell. `Ok(None)` means blank ("" or "-").
pub fn parse_number(cell: &str) -> std::result::Result<Option<f64>, Unparseable> {
    let cleaned: String = cell
        .chars()
        .filter(|c| !matches!(c, ',' | '$' | ' ' | '\t'))
        .collect();
    if cleaned.is_empty() || cleaned == "-" {
        return Ok(None);
    }
    match cleaned.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Unparseable),
    }
}

pub fn parse_date(cell: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(cell.trim(), "%Y-%m-%d").ok()
}

/// Whole calendar days from `from` to `to` (negative if `to` is earlier).
pub fn days_between(from: NaiveDate, to: NaiveDate) -> i64 {
    (to - from).num_days()
}

enum Resolved {
    Numeric {
        col: usize,
        required: bool,
    },
    Days {
        from: usize,
        to: usize,
        required: bool,
    },
    Frequency {
        col: usize,
    },
}

pub fn engineer_features(
    table: &RawTable,
    config: &FeatureConfig,
) -> Result<(Dataset, EngineerSummary)> {
    if config.features.is_empty() {
        return Err(Error::InvalidConfig(
            "feature config lists no features".into(),
        ));
    }
    let status_col = table.column(&config.status_column)?;
    let mut resolved = Vec::with_capacity(config.features.len());
    for rule in &config.features {
        for c in rule.columns() {
            table.column(c)?;
        }
        resolved.push(match rule {
            FeatureRule::Numeric {
                column, required, ..
            } => Resolved::Numeric {
                col: table.column(column)?,
                required: *required,
            },
            FeatureRule::DaysBetween {
                from, to, required, ..
            } => Resolved::Days {
                from: table.column(from)?,
                to: table.column(to)?,
                required: *required,
            },
            FeatureRule::Frequency { column, .. } => Resolved::Frequency {
                col: table.column(column)?,
            },
        });
    }

    let mut summary = EngineerSummary {
        input_rows: table.len(),
        ..EngineerSummary::default()
    };
    // first pass: parse, dropping rows with bad cells; frequency slots left NaN
    let mut kept: Vec<(usize, Vec<f64>, u8)> = Vec::new();
    'rows: for (r, row) in table.rows.iter().enumerate() {
        let Some(label) = status_label(&row[status_col]) else {
            *summary.drop_reasons.entry("status".into()).or_default() += 1;
            continue;
        };
        let mut values = Vec::with_capacity(resolved.len());
        for (rule, res) in config.features.iter().zip(&resolved) {
            let v = match *res {
                Resolved::Numeric { col, required } => match parse_number(&row[col]) {
                    Ok(Some(v)) => Some(v),
                    Ok(None) if !required => Some(0.0),
                    _ => None,
                },
                Resolved::Days { from, to, required } => {
                    match (parse_date(&row[from]), parse_date(&row[to])) {
                        (Some(a), Some(b)) => Some(days_between(a, b) as f64),
                        _ if !required => Some(0.0),
                        _ => None,
                    }
                }
                Resolved::Frequency { .. } => Some(f64::NAN),
            };
            match v {
                Some(v) => values.push(v),
                None => {
                    *summary
                        .drop_reasons
                        .entry(rule.name().to_string())
                        .or_default() += 1;
                    continue 'rows;
                }
            }
        }
        kept.push((r, values, label));
    }
    summary.kept_rows = kept.len();
    summary.dropped_rows = table.len() - kept.len();
    if kept.is_empty() {
        return Err(Error::AllRowsDropped(table.len()));
    }

    // second pass: frequency encodings over the kept rows
    for (k, res) in resolved.iter().enumerate() {
        if let Resolved::Frequency { col } = *res {
            let mut counts: HashMap<&str, usize> = HashMap::new();
            for (r, _, _) in &kept {
                *counts.entry(table.rows[*r][col].as_str()).or_default() += 1;
            }
            let n = kept.len() as f64;
            for (r, values, _) in kept.iter_mut() {
                values[k] = counts[table.rows[*r][col].as_str()] as f64 / n;
            }
        }
    }

    let feature_names = config
        .features
        .iter()
        .map(|f| f.name().to_string())
        .collect();
    let (features, labels) = kept.into_iter().map(|(_, v, l)| (v, l)).unzip();
    let ds = Dataset::new(features, labels, feature_names)?;
    Ok((ds, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::csv_table::parse_csv;

    fn table(s: &str) -> RawTable {
        parse_csv(s.as_bytes(), Path::new("mem.csv")).unwrap()
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1,500,000"), Ok(Some(1_500_000.0)));
        assert_eq!(parse_number(" $2,000 "), Ok(Some(2000.0)));
        assert_eq!(parse_number(""), Ok(None));
        assert_eq!(parse_number("-"), Ok(None));
        assert_eq!(parse_number("-12"), Ok(Some(-12.0)));
        assert!(parse_number("abc").is_err());
    }

    #[test]
    fn calendar_days() {
        let a = parse_date("2010-01-01").unwrap();
        let b = parse_date("2010-07-01").unwrap();
        assert_eq!(days_between(a, b), 181);
        assert!(parse_date("2010-13-01").is_none());
    }

    #[test]
    fn default_config_has_seventeen_features() {
        let c = FeatureConfig::crunchbase_default();
        assert_eq!(c.features.len(), 17);
        assert_eq!(c.status_column, "status");
    }

    fn small_config() -> FeatureConfig {
        FeatureConfig::from_toml(
            r#"
status_column = "status"
[[feature]]
kind = "numeric"
name = "total"
column = "total"
required = true
[[feature]]
kind = "numeric"
name = "seed"
column = "seed"
[[feature]]
kind = "days_between"
name = "age"
from = "founded"
to = "first"
[[feature]]
kind = "frequency"
name = "market_freq"
column = "market"
"#,
        )
        .unwrap()
    }

    #[test]
    fn engineering_rules() {
        let t = table(
            "status,total,seed,founded,first,market\n\
             closed,\"1,500,000\",,2010-01-01,2010-07-01,web\n\
             acquired,10,5,2011-01-01,2011-01-11,web\n\
             ipo,-,5,2011-01-01,2011-01-11,bio\n\
             closed,7,x,2011-01-01,2011-01-11,bio\n\
             closed,7,1,never,2011-01-11,bio\n\
             operating,1,1,2011-01-01,2011-01-11,bio\n",
        );
        let (ds, summary) = engineer_features(&t, &small_config()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.labels, vec![0, 1]);
        assert_eq!(ds.features[0], vec![1_500_000.0, 0.0, 181.0, 1.0]);
        assert_eq!(ds.features[1], vec![10.0, 5.0, 10.0, 1.0]);
        assert_eq!(summary.dropped_rows, 4);
        assert_eq!(summary.drop_reasons["total"], 1);
        assert_eq!(summary.drop_reasons["seed"], 1);
        assert_eq!(summary.drop_reasons["age"], 1);
        assert_eq!(summary.drop_reasons["status"], 1);
    }

    #[test]
    fn engineering_errors() {
        let t = table("status,total\nclosed,x\n");
        let cfg = FeatureConfig::from_toml(
            "status_column = \"status\"\n[[feature]]\nkind = \"numeric\"\nname = \"t\"\ncolumn = \"total\"\nrequired = true\n",
        )
        .unwrap();
        assert!(matches!(
            engineer_features(&t, &cfg),
            Err(Error::AllRowsDropped(1))
        ));
        assert!(matches!(
            engineer_features(&t, &small_config()),
            Err(Error::MissingColumn(_))
        ));
    }
}
