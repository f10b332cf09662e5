//! Flag and config-file options. Flags override the file; unset values fall
//! back to per-command defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use cvcat::analysis::GammaRule;
use cvcat::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum GammaRuleArg {
    #[value(name = "fixed")]
    #[serde(rename = "fixed")]
    Fixed,
    #[value(name = "ym/30")]
    #[serde(rename = "ym/30")]
    YmOver30,
}

impl From<GammaRuleArg> for GammaRule {
    fn from(rule: GammaRuleArg) -> Self {
        match rule {
            GammaRuleArg::Fixed => GammaRule::Fixed,
            GammaRuleArg::YmOver30 => GammaRule::ProportionalYmOver30,
        }
    }
}

/// Which state a command acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Squeezed vacuum of the ancilla.
    Squeezed,
    /// Cubic phase state of the ancilla.
    Cubic,
    /// Ideal cat matched to the gate parameters.
    Cat,
    /// Conditional output of the gate on a vacuum target.
    Gate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Variable {
    #[value(name = "inverse-s")]
    #[serde(rename = "inverse-s")]
    InverseS,
    #[value(name = "ym")]
    #[serde(rename = "ym")]
    Ym,
}

/// Every tunable of a run. The JSON config file is a flat object with these keys.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Cubic deformation coefficient γ
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Measured ancilla momentum y_m
    #[arg(long = "ym", allow_hyphen_values = true)]
    pub ym: Option<f64>,
    /// Ancilla squeezing in dB
    #[arg(long, allow_hyphen_values = true)]
    pub db: Option<f64>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Lower edge of the coordinate grid
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    /// Upper edge of the coordinate grid
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    /// Number of coordinate grid points
    #[arg(long)]
    pub points: Option<usize>,
    /// γ rule for sweeps
    #[arg(long, value_enum)]
    pub gamma_rule: Option<GammaRuleArg>,
    /// Squeezing range for 1/s sweeps, `lo:hi` in dB
    #[arg(long, allow_hyphen_values = true)]
    pub db_range: Option<String>,
    /// Outcome range for y_m sweeps, `lo:hi`
    #[arg(long, allow_hyphen_values = true)]
    pub ym_range: Option<String>,
    /// Swept variable for sweep-probability
    #[arg(long, value_enum)]
    pub variable: Option<Variable>,
    /// Number of sweep samples
    #[arg(long)]
    pub samples: Option<usize>,
    /// Wigner samples along x
    #[arg(long)]
    pub n_x: Option<usize>,
    /// Wigner samples along p
    #[arg(long)]
    pub n_p: Option<usize>,
    /// Wigner window `x_min:x_max:p_min:p_max` (automatic when absent)
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Contour level of the support region, in standard deviations
    #[arg(long)]
    pub sigma_level: Option<f64>,
    /// Vertices of the support region
    #[arg(long)]
    pub n_boundary: Option<usize>,
    /// Add the Wigner logarithmic negativity column to sweeps
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub wln: Option<bool>,
    /// Refine the cat parameters locally (not part of the modelled protocol)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub optimize_cat: Option<bool>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),*) => {
        Options { $($field: $top.$field.or($base.$field),)* }
    };
}

impl Options {
    /// Fields set in `self` win over `base`.
    pub fn over(self, base: Options) -> Options {
        overlay!(
            self, base, gamma, ym, db, out, format, x_min, x_max, points, gamma_rule, db_range, ym_range,
            variable, samples, n_x, n_p, window, kind, sigma_level, n_boundary, wln, optimize_cat
        )
    }

    pub fn load(path: &Path) -> Result<Options> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Domain(format!("config {}: {e}", path.display())))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(0.1)
    }

    pub fn ym(&self) -> f64 {
        self.ym.unwrap_or(3.0)
    }

    pub fn db(&self) -> f64 {
        self.db.unwrap_or(5.0)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

/// Defaults for every field, so a dumped config pins the whole run.
pub fn defaults(kind: Kind) -> Options {
    Options {
        gamma: Some(0.1),
        ym: Some(3.0),
        db: Some(5.0),
        out: None,
        format: Some(Format::Csv),
        x_min: Some(-12.0),
        x_max: Some(12.0),
        points: Some(cvcat::states::DEFAULT_POINTS),
        gamma_rule: Some(GammaRuleArg::Fixed),
        db_range: None,
        ym_range: Some("-40:40".into()),
        variable: Some(Variable::InverseS),
        samples: None,
        n_x: Some(cvcat::phase_space::DEFAULT_WIGNER_POINTS),
        n_p: Some(cvcat::phase_space::DEFAULT_WIGNER_POINTS),
        window: None,
        kind: Some(kind),
        sigma_level: Some(2.0),
        n_boundary: Some(256),
        wln: Some(false),
        optimize_cat: Some(false),
    }
}

/// Parses `a:b` (or more colon-separated reals).
pub fn parse_reals(text: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let values: std::result::Result<Vec<f64>, _> = text.split(':').map(|p| p.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if v.len() == count && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(Error::Domain(format!("{what} must be {count} colon-separated numbers, got '{text}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let flags = Options { gamma: Some(0.5), ..Default::default() };
        let file = Options { gamma: Some(0.2), ym: Some(15.0), ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.gamma, Some(0.5));
        assert_eq!(merged.ym, Some(15.0));
    }

    #[test]
    fn config_round_trip() {
        let opts = defaults(Kind::Gate);
        let text = serde_json::to_string(&opts).unwrap();
        assert!(text.contains("\"gamma_rule\":\"fixed\""));
        let back: Options = serde_json::from_str(&text).unwrap();
        assert_eq!(back, opts);
        assert!(serde_json::from_str::<Options>("{\"bogus\": 1}").is_err());
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_reals("0:20", 2, "range").unwrap(), vec![0.0, 20.0]);
        assert_eq!(parse_reals("-40:40", 2, "range").unwrap(), vec![-40.0, 40.0]);
        assert!(parse_reals("1:x", 2, "range").is_err());
        assert!(parse_reals("1:2:3", 2, "range").is_err());
    }
}
