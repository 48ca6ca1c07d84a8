//! TOML scenario files.
//!
//! ```toml
//! N = 3
//! tau = 1.0
//! P0 = 1.0
//! N0 = 1.0
//! rho = 0.1
//! g11 = [100.0, 420.0, 200.0]
//! g12 = [0.0, 0.0, 0.0]
//! g21 = [1.0, 1.0, 1.0]
//! g22 = [0.0833, 0.1429, 0.5]
//! Ea0 = 1.0
//! Ea = [1.0, 2.0, 1.0]
//! Da = [0.0, 0.0, 0.0]
//! Q0 = 0.0
//! log_base = 2.718281828459045   # optional, natural log by default
//! alpha = [0.0833, 0.1429, 0.5]  # optional, replaces g12/g22/N0
//! relaxed = false                # optional; when true rho may be omitted
//! ```

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::model::{InterferenceLimit, LinkGains, ScenarioConfig, DEFAULT_LOG_BASE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("missing field `{field}`")]
    MissingField { field: &'static str },

    #[error("line {line}: trace length mismatch: `{field}` has {found} entries, expected N = {expected}")]
    LengthMismatch {
        field: &'static str,
        line: usize,
        found: usize,
        expected: usize,
    },

    #[error("line {line}: negative value {value} in `{field}`")]
    NegativeValue {
        field: &'static str,
        line: usize,
        value: f64,
    },

    #[error("line {line}: `{field}` {reason}")]
    InvalidValue {
        field: &'static str,
        line: usize,
        reason: String,
    },
}

/// A validated scenario plus parse-time notes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: ScenarioConfig,
    /// The file asked for the problem without ISR data.
    pub relaxed: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "N")]
    slots: Option<Spanned<i64>>,
    tau: Option<Spanned<f64>>,
    #[serde(rename = "P0")]
    p0: Option<Spanned<f64>>,
    #[serde(rename = "N0")]
    n0: Option<Spanned<f64>>,
    rho: Option<Spanned<f64>>,
    g11: Option<Spanned<Vec<f64>>>,
    g12: Option<Spanned<Vec<f64>>>,
    g21: Option<Spanned<Vec<f64>>>,
    g22: Option<Spanned<Vec<f64>>>,
    alpha: Option<Spanned<Vec<f64>>>,
    #[serde(rename = "Ea0")]
    ea0: Option<Spanned<f64>>,
    #[serde(rename = "Ea")]
    ea: Option<Spanned<Vec<f64>>>,
    #[serde(rename = "Da")]
    da: Option<Spanned<Vec<f64>>>,
    #[serde(rename = "Q0")]
    q0: Option<Spanned<f64>>,
    log_base: Option<Spanned<f64>>,
    relaxed: Option<bool>,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn of(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.0.len());
        self.0[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }
}

/// Reads a scenario file and enforces every model invariant.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let lines = Lines(text);
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.span().map_or(1, |s| lines.of(s)),
        message: e.message().trim().to_string(),
    })?;
    let mut warnings = Vec::new();
    let relaxed = raw.relaxed.unwrap_or(false);

    let slots = required(&raw.slots, "N")?;
    if *slots.get_ref() < 1 {
        return Err(ConfigError::InvalidValue {
            field: "N",
            line: lines.of(slots.span()),
            reason: format!("must be at least 1, got {}", slots.get_ref()),
        });
    }
    let n = *slots.get_ref() as usize;

    let scalar = |field: &'static str, v: &Option<Spanned<f64>>, default: Option<f64>| -> Result<f64, ConfigError> {
        match v {
            Some(s) => nonnegative(field, *s.get_ref(), lines.of(s.span())),
            None => default.ok_or(ConfigError::MissingField { field }),
        }
    };
    let trace = |field: &'static str, v: &Option<Spanned<Vec<f64>>>, positive: bool| -> Result<Vec<f64>, ConfigError> {
        let s = required(v, field)?;
        let line = lines.of(s.span());
        if s.get_ref().len() != n {
            return Err(ConfigError::LengthMismatch {
                field,
                line,
                found: s.get_ref().len(),
                expected: n,
            });
        }
        for &x in s.get_ref() {
            nonnegative(field, x, line)?;
            if positive && x == 0.0 {
                return Err(ConfigError::InvalidValue {
                    field,
                    line,
                    reason: "entries must be strictly positive".into(),
                });
            }
        }
        Ok(s.get_ref().clone())
    };

    let tau = scalar("tau", &raw.tau, Some(1.0))?;
    if tau == 0.0 {
        return Err(ConfigError::InvalidValue {
            field: "tau",
            line: raw.tau.as_ref().map_or(1, |s| lines.of(s.span())),
            reason: "must be positive".into(),
        });
    }
    let log_base = scalar("log_base", &raw.log_base, Some(DEFAULT_LOG_BASE))?;
    if log_base <= 1.0 {
        return Err(ConfigError::InvalidValue {
            field: "log_base",
            line: raw.log_base.as_ref().map_or(1, |s| lines.of(s.span())),
            reason: format!("must exceed 1, got {log_base}"),
        });
    }

    let link = if raw.alpha.is_some() {
        let present: Vec<&str> = [
            ("g12", raw.g12.is_some()),
            ("g22", raw.g22.is_some()),
            ("N0", raw.n0.is_some()),
        ]
        .into_iter()
        .filter_map(|(k, p)| p.then_some(k))
        .collect();
        if !present.is_empty() {
            warnings.push(format!("alpha overrides {}", present.join("/")));
        }
        LinkGains::Effective {
            alpha: trace("alpha", &raw.alpha, true)?,
        }
    } else {
        LinkGains::Physical {
            p0: scalar("P0", &raw.p0, None)?,
            n0: scalar("N0", &raw.n0, None)?,
            g12: trace("g12", &raw.g12, false)?,
            g22: trace("g22", &raw.g22, true)?,
        }
    };
    if let LinkGains::Physical { p0, n0, .. } = &link {
        if *n0 == 0.0 && *p0 == 0.0 {
            return Err(ConfigError::InvalidValue {
                field: "N0",
                line: raw.n0.as_ref().map_or(1, |s| lines.of(s.span())),
                reason: "P0*g12 + N0 must be positive".into(),
            });
        }
    }

    let interference = match &raw.rho {
        None if relaxed => None,
        None => return Err(ConfigError::MissingField { field: "rho" }),
        Some(_) => {
            let p0 = scalar("P0", &raw.p0, None)?;
            if p0 == 0.0 {
                return Err(ConfigError::InvalidValue {
                    field: "P0",
                    line: raw.p0.as_ref().map_or(1, |s| lines.of(s.span())),
                    reason: "must be positive when rho is given".into(),
                });
            }
            Some(InterferenceLimit {
                rho: scalar("rho", &raw.rho, None)?,
                p0,
                g11: trace("g11", &raw.g11, true)?,
                g21: trace("g21", &raw.g21, false)?,
            })
        }
    };

    let config = ScenarioConfig {
        tau,
        link,
        interference,
        initial_energy: scalar("Ea0", &raw.ea0, None)?,
        energy_arrivals: trace("Ea", &raw.ea, false)?,
        data_arrivals: trace("Da", &raw.da, false)?,
        initial_queue: scalar("Q0", &raw.q0, None)?,
        log_base,
    };
    config.validate().map_err(|e| ConfigError::InvalidValue {
        field: "config",
        line: 1,
        reason: e.to_string(),
    })?;
    Ok(ParsedConfig {
        config,
        relaxed,
        warnings,
    })
}

fn required<'a, T>(v: &'a Option<Spanned<T>>, field: &'static str) -> Result<&'a Spanned<T>, ConfigError> {
    v.as_ref().ok_or(ConfigError::MissingField { field })
}

fn nonnegative(field: &'static str, value: f64, line: usize) -> Result<f64, ConfigError> {
    if value.is_nan() || value.is_infinite() {
        return Err(ConfigError::InvalidValue {
            field,
            line,
            reason: format!("must be finite, got {value}"),
        });
    }
    if value < 0.0 {
        return Err(ConfigError::NegativeValue { field, line, value });
    }
    Ok(value)
}

#[derive(Serialize)]
struct WriteConfig {
    #[serde(rename = "N")]
    slots: usize,
    tau: f64,
    #[serde(rename = "P0", skip_serializing_if = "Option::is_none")]
    p0: Option<f64>,
    #[serde(rename = "N0", skip_serializing_if = "Option::is_none")]
    n0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g11: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g12: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g21: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g22: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<f64>>,
    #[serde(rename = "Ea0")]
    ea0: f64,
    #[serde(rename = "Ea")]
    ea: Vec<f64>,
    #[serde(rename = "Da")]
    da: Vec<f64>,
    #[serde(rename = "Q0")]
    q0: f64,
    log_base: f64,
    relaxed: bool,
}

/// Writes `cfg` in the format [`parse_config`] reads.
pub fn to_toml(cfg: &ScenarioConfig, relaxed: bool) -> String {
    let (mut p0, mut n0, mut g12, mut g22, mut alpha) = (None, None, None, None, None);
    match &cfg.link {
        LinkGains::Physical {
            p0: p,
            n0: noise,
            g12: a,
            g22: b,
        } => {
            p0 = Some(*p);
            n0 = Some(*noise);
            g12 = Some(a.clone());
            g22 = Some(b.clone());
        }
        LinkGains::Effective { alpha: a } => alpha = Some(a.clone()),
    }
    let (mut rho, mut g11, mut g21) = (None, None, None);
    if let Some(lim) = &cfg.interference {
        rho = Some(lim.rho);
        p0 = Some(lim.p0);
        g11 = Some(lim.g11.clone());
        g21 = Some(lim.g21.clone());
    }
    let out = WriteConfig {
        slots: cfg.slots(),
        tau: cfg.tau,
        p0,
        n0,
        rho,
        g11,
        g12,
        g21,
        g22,
        alpha,
        ea0: cfg.initial_energy,
        ea: cfg.energy_arrivals.clone(),
        da: cfg.data_arrivals.clone(),
        q0: cfg.initial_queue,
        log_base: cfg.log_base,
        relaxed,
    };
    toml::to_string(&out).expect("scenario fields are plain numbers")
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
N = 3
tau = 1
rho = 0.1
P0 = 1
g11 = [100, 420, 200]
g21 = [1, 1, 1]
alpha = [0.08333333333333333, 0.14285714285714285, 0.5]
Ea0 = 1
Ea = [1, 2, 1]
Da = [0, 0, 0]
Q0 = 0
";

    #[test]
    fn example_round_trips() {
        let first = parse_config(EXAMPLE).unwrap();
        let text = to_toml(&first.config, first.relaxed);
        let second = parse_config(&text).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn physical_gains_round_trip() {
        let text = "N = 2\nP0 = 2\nN0 = 0.5\ng12 = [0.1, 0.2]\ng22 = [1, 3]\nrho = 0.2\ng11 = [5, 6]\ng21 = [0.5, 0]\nEa0 = 1\nEa = [1, 1]\nDa = [1, 1]\nQ0 = 2\nlog_base = 2\n";
        let parsed = parse_config(text).unwrap();
        assert_eq!(parsed.config.log_base, 2.0);
        assert!(parsed.warnings.is_empty());
        assert_eq!(parse_config(&to_toml(&parsed.config, false)).unwrap(), parsed);
    }

    #[test]
    fn length_mismatch_names_field_and_line() {
        let text = EXAMPLE.replace("Ea = [1, 2, 1]", "Ea = [1, 2]");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(
            err,
            ConfigError::LengthMismatch {
                field: "Ea",
                line: 9,
                found: 2,
                expected: 3
            }
        );
        assert!(err.to_string().contains("trace length mismatch"));
    }

    #[test]
    fn missing_and_negative_fields_are_distinct() {
        let text = EXAMPLE.replace("Q0 = 0\n", "");
        assert_eq!(
            parse_config(&text).unwrap_err(),
            ConfigError::MissingField { field: "Q0" }
        );

        let text = EXAMPLE.replace("Da = [0, 0, 0]", "Da = [0, -1, 0]");
        assert_eq!(
            parse_config(&text).unwrap_err(),
            ConfigError::NegativeValue {
                field: "Da",
                line: 10,
                value: -1.0
            }
        );
    }

    #[test]
    fn relaxed_configs_may_omit_rho() {
        let text = "N = 1\nalpha = [0.5]\nEa0 = 1\nEa = [0]\nDa = [0]\nQ0 = 1\nrelaxed = true\n";
        let parsed = parse_config(text).unwrap();
        assert!(parsed.relaxed);
        assert!(parsed.config.interference.is_none());
        let strict = text.replace("relaxed = true\n", "");
        assert_eq!(
            parse_config(&strict).unwrap_err(),
            ConfigError::MissingField { field: "rho" }
        );
    }

    #[test]
    fn alpha_overrides_gains_with_warning() {
        let text = EXAMPLE.replace("Q0 = 0", "Q0 = 0\ng22 = [1, 1, 1]\ng12 = [0, 0, 0]\nN0 = 1");
        let parsed = parse_config(&text).unwrap();
        assert_eq!(parsed.warnings, vec!["alpha overrides g12/g22/N0".to_string()]);
        assert!(matches!(parsed.config.link, LinkGains::Effective { .. }));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse_config("N = 3\nEa = [1, 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { .. }), "{err:?}");
        let err = parse_config("N = 1\nbogus = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }), "{err:?}");
    }
}
