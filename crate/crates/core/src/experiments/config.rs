//! TOML experiment configuration and per-scenario parameter schemas.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::ConditionId;
use crate::error::{Error, Result};
use crate::integrator::{Schedule, StepMode};
use crate::linalg::Vector;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    TwoD,
    PdeNeumann,
    Tikhonov,
    Sweeping,
    QuasiAutonomous,
    RotationErgodic,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::TwoD,
        Scenario::PdeNeumann,
        Scenario::Tikhonov,
        Scenario::Sweeping,
        Scenario::QuasiAutonomous,
        Scenario::RotationErgodic,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::TwoD => "two_d",
            Scenario::PdeNeumann => "pde_neumann",
            Scenario::Tikhonov => "tikhonov",
            Scenario::Sweeping => "sweeping",
            Scenario::QuasiAutonomous => "quasi_autonomous",
            Scenario::RotationErgodic => "rotation_ergodic",
            Scenario::Custom => "custom",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// A parameter value: number, list of numbers, or word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl Param {
    /// Parses a command-line value: a number, a comma-separated list, or a word.
    pub fn parse_cli(s: &str) -> Param {
        if let Ok(v) = s.parse::<f64>() {
            return Param::Number(v);
        }
        let parts: Option<Vec<f64>> = s
            .trim_matches(|c| c == '[' || c == ']')
            .split(',')
            .map(|p| p.trim().parse().ok())
            .collect();
        match parts {
            Some(v) if s.contains(',') || s.starts_with('[') => Param::List(v),
            _ => Param::Text(s.to_string()),
        }
    }

    fn kind(&self) -> ParamKind {
        match self {
            Param::Number(_) => ParamKind::Number,
            Param::List(_) => ParamKind::List,
            Param::Text(_) => ParamKind::Text,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Number(v) => write!(f, "{v}"),
            Param::List(v) => {
                let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", items.join(", "))
            }
            Param::Text(s) => write!(f, "\"{s}\""),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Number,
    List,
    Text,
}

/// One documented parameter of a scenario.
#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: Param,
    pub doc: &'static str,
}

fn num(key: &'static str, v: f64, doc: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        default: Param::Number(v),
        doc,
    }
}

fn list(key: &'static str, v: &[f64], doc: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        default: Param::List(v.to_vec()),
        doc,
    }
}

fn text(key: &'static str, v: &str, doc: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        default: Param::Text(v.to_string()),
        doc,
    }
}

const FAMILY_DOC: &str = "schedule family: power | exponential | logarithmic | constant | oscillating | none";

/// Parameters accepted by a scenario, with defaults.
pub fn scenario_schema(scenario: Scenario) -> Vec<ParamSpec> {
    let mut common = vec![
        text("mode", "implicit", "stepping: implicit | forward_backward"),
        num("record_every", 1.0, "record every k-th grid node"),
        num("refine", 1.0, "1 to rerun on the halved grid and report the final-state delta"),
    ];
    let mut specific = match scenario {
        Scenario::TwoD => vec![
            num("a", 2.0, "barrier half-width, a > b > 0"),
            num("b", 1.0, "flat half-width of the objective"),
            text("beta_family", "power", FAMILY_DOC),
            num("beta_c", 1.0, "beta(t) = c (1+t)^p"),
            num("beta_p", 2.0, "beta exponent"),
            num("T", 1e3, "horizon"),
            list("x0", &[1.5, 0.5], "initial state"),
            num("h_min", 1e-4, "smallest step (near t = 0)"),
            num("h_rel", 1e-3, "relative step h = h_rel * t between the clamps"),
            num("h_max", 0.1, "largest step"),
            num("samples", 1000.0, "strong-minimum samples in the final decade"),
        ],
        Scenario::PdeNeumann => vec![
            num("N", 64.0, "grid nodes on [0, 1], endpoints included"),
            num("c", 0.1, "data h(x) = c cos(pi x)"),
            list("h_values", &[], "explicit data at the N nodes (overrides c)"),
            num("demean", 0.0, "1 to subtract the mean of the data instead of failing"),
            num("a", -1.0, "lower obstacle level"),
            num("b", 1.0, "upper obstacle level"),
            text("beta_family", "power", FAMILY_DOC),
            num("beta_c", 1.0, "beta(t) = c (1+t)^p"),
            num("beta_p", 1.0, "beta exponent"),
            num("u0", 3.0, "constant initial state"),
            num("T", 100.0, "horizon"),
            num("h_min", 1e-4, "smallest step"),
            num("h_rel", 1e-2, "relative step"),
            num("h_max", 0.1, "largest step"),
        ],
        Scenario::Tikhonov => vec![
            text("eps_family", "power", FAMILY_DOC),
            num("eps_c", 1.0, "eps(t) = c (1+t)^p, or c (1 + amp sin(omega t)) (1+t)^p"),
            num("eps_p", -1.0, "eps exponent"),
            num("eps_amp", 0.5, "oscillation amplitude"),
            num("eps_omega", 1.0, "oscillation frequency"),
            list("x0", &[0.0, 5.0], "initial state"),
            num("T", 1e4, "horizon"),
            num("h_min", 1e-3, "smallest step"),
            num("h_rel", 1e-2, "relative step"),
            num("h_max", 0.1, "largest step"),
        ],
        Scenario::Sweeping => vec![
            text("drift_family", "exponential", "exponential (e^-t) | log (1/log(2+t)) | static"),
            list("center", &[0.0, 0.0], "limit center c_inf of the unit ball"),
            list("direction", &[2.0, 0.0], "drift direction d"),
            num("radius", 1.0, "ball radius"),
            list("x0", &[], "initial state (default: c(0) + radius * e_2)"),
            num("T", 50.0, "horizon"),
            num("h", 1e-3, "uniform step"),
        ],
        Scenario::QuasiAutonomous => vec![
            list("segment_start", &[-1.0, 0.0], "segment endpoint"),
            list("segment_end", &[1.0, 0.0], "segment endpoint"),
            text("drift_family", "exponential", "exponential (e^-t) | power ((1+t)^p)"),
            num("drift_p", -0.6, "power drift exponent"),
            text("drift_direction", "perp", "perp | parallel, relative to the segment"),
            num("drift_scale", 1.0, "drift size"),
            list("x0", &[0.5, 1.0], "initial state"),
            num("T", 1e4, "horizon"),
            num("h_min", 1e-3, "smallest step"),
            num("h_rel", 1e-2, "relative step"),
            num("h_max", 0.1, "largest step"),
        ],
        Scenario::RotationErgodic => vec![
            list("x0", &[1.0, 0.0], "initial state"),
            num("T", 1e3, "horizon"),
            num("h", 1e-4, "uniform step"),
            num("window", 0.1, "final window fraction for the oscillation measure"),
        ],
        Scenario::Custom => vec![
            num("n", 2.0, "dimension"),
            text("operator_1", "identity", "catalog operator id"),
            text("operator_2", "", "optional second catalog operator id"),
            text("operator_3", "", "optional third catalog operator id"),
            text("weight_1_family", "constant", FAMILY_DOC),
            num("weight_1_c", 1.0, "weight scale"),
            num("weight_1_p", 0.0, "weight exponent"),
            text("weight_2_family", "constant", FAMILY_DOC),
            num("weight_2_c", 1.0, "weight scale"),
            num("weight_2_p", 0.0, "weight exponent"),
            text("weight_3_family", "constant", FAMILY_DOC),
            num("weight_3_c", 1.0, "weight scale"),
            num("weight_3_p", 0.0, "weight exponent"),
            list("x0", &[1.0, 0.0], "initial state"),
            num("T", 10.0, "horizon"),
            num("h", 0.01, "uniform step"),
        ],
    };
    if scenario == Scenario::RotationErgodic {
        common[1] = num("record_every", 1000.0, "record every k-th grid node");
        common[2] = num("refine", 0.0, "1 to rerun on the halved grid");
    }
    if scenario == Scenario::TwoD {
        common[0] = text("mode", "forward_backward", "stepping: implicit | forward_backward");
        common[1] = num("record_every", 10.0, "record every k-th grid node");
    }
    if scenario == Scenario::PdeNeumann {
        common[0] = text("mode", "forward_backward", "stepping: implicit | forward_backward");
    }
    if matches!(scenario, Scenario::Tikhonov | Scenario::QuasiAutonomous) {
        common[1] = num("record_every", 10.0, "record every k-th grid node");
    }
    specific.append(&mut common);
    specific
}

/// Catalog parameters passed through for custom flows (any numeric key).
const CUSTOM_PASSTHROUGH: &str = "custom";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; nothing is written when absent.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub summary: bool,
    #[serde(default)]
    pub svg: bool,
    /// Conditions to verdict; the scenario's defaults when absent.
    #[serde(default)]
    pub conditions: Option<Vec<String>>,
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            csv: true,
            summary: true,
            svg: false,
            conditions: None,
        }
    }
}

/// ω evaluation request for the `omega` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaConfig {
    pub psi: String,
    pub phi: String,
    #[serde(default = "two")]
    pub n: usize,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub dual: bool,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    #[serde(default)]
    pub parameters: BTreeMap<String, Param>,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub omega: Option<OmegaConfig>,
}

fn default_seed() -> u64 {
    crate::fitzpatrick::DEFAULT_SEED
}

impl ExperimentConfig {
    /// Scenario defaults.
    pub fn for_scenario(scenario: Scenario) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario,
            parameters: BTreeMap::new(),
            outputs: OutputConfig::default(),
            seed: default_seed(),
            omega: None,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn with_param(mut self, key: &str, value: Param) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    /// Checks the schema version, parameter names, kinds and ranges.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let schema = scenario_schema(self.scenario);
        for (key, value) in &self.parameters {
            match schema.iter().find(|s| s.key == key) {
                Some(spec) => {
                    let want = spec.default.kind();
                    let ok = want == value.kind()
                        || (want == ParamKind::List && matches!(value, Param::Number(_)));
                    if !ok {
                        return Err(Error::Config(format!(
                            "parameter `{key}` of {} has the wrong type (default {})",
                            self.scenario, spec.default
                        )));
                    }
                }
                None if self.scenario == Scenario::Custom && matches!(value, Param::Number(_)) => {
                    log::debug!("{CUSTOM_PASSTHROUGH}: passing `{key}` to the catalog");
                }
                None => {
                    return Err(Error::Config(format!(
                        "unknown parameter `{key}` for scenario {}",
                        self.scenario
                    )))
                }
            }
        }
        if let Some(conds) = &self.outputs.conditions {
            for c in conds {
                c.parse::<ConditionId>()?;
            }
        }
        self.check_ranges()
    }

    fn check_ranges(&self) -> Result<()> {
        let positive = |key: &str| -> Result<()> {
            let v = self.number(key)?;
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("`{key}` must be positive, got {v}")))
            }
        };
        positive("T")?;
        positive("record_every")?;
        self.mode()?;
        match self.scenario {
            Scenario::TwoD => {
                let (a, b) = (self.number("a")?, self.number("b")?);
                if !(0.0 < b && b < a) {
                    return Err(Error::Config(format!("two_d needs 0 < b < a, got a = {a}, b = {b}")));
                }
                let x0 = self.vector("x0", 2)?;
                if x0[0].abs() >= a {
                    return Err(Error::Config(format!("x0 must satisfy |x| < a, got {}", x0[0])));
                }
                self.schedule("beta")?;
            }
            Scenario::PdeNeumann => {
                let n = self.number("N")?;
                if n < 3.0 || n.fract() != 0.0 {
                    return Err(Error::Config(format!("N must be an integer >= 3, got {n}")));
                }
                if self.number("a")? > self.number("b")? {
                    return Err(Error::Config("pde_neumann needs a <= b".into()));
                }
                self.schedule("beta")?;
            }
            Scenario::Tikhonov => {
                self.vector("x0", 2)?;
                self.schedule("eps")?;
            }
            Scenario::RotationErgodic => {
                positive("h")?;
                self.vector("x0", 2)?;
            }
            Scenario::Sweeping => {
                positive("h")?;
                positive("radius")?;
            }
            Scenario::QuasiAutonomous | Scenario::Custom => {}
        }
        Ok(())
    }

    pub fn param(&self, key: &str) -> Result<Param> {
        if let Some(p) = self.parameters.get(key) {
            return Ok(p.clone());
        }
        scenario_schema(self.scenario)
            .into_iter()
            .find(|s| s.key == key)
            .map(|s| s.default)
            .ok_or_else(|| Error::Config(format!("scenario {} has no parameter `{key}`", self.scenario)))
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        match self.param(key)? {
            Param::Number(v) => Ok(v),
            other => Err(Error::Config(format!("`{key}` must be a number, got {other}"))),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        Ok(self.number(key)? != 0.0)
    }

    pub fn text(&self, key: &str) -> Result<String> {
        match self.param(key)? {
            Param::Text(s) => Ok(s),
            other => Err(Error::Config(format!("`{key}` must be a word, got {other}"))),
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.param(key)? {
            Param::List(v) => Ok(v),
            Param::Number(v) => Ok(vec![v]),
            other => Err(Error::Config(format!("`{key}` must be a list, got {other}"))),
        }
    }

    /// A list parameter of the given length.
    pub fn vector(&self, key: &str, n: usize) -> Result<Vector> {
        let v = self.list(key)?;
        if v.len() != n {
            return Err(Error::Config(format!("`{key}` must have {n} entries, got {}", v.len())));
        }
        Ok(Vector::from_vec(v))
    }

    pub fn mode(&self) -> Result<StepMode> {
        match self.text("mode")?.as_str() {
            "implicit" => Ok(StepMode::Implicit),
            "forward_backward" => Ok(StepMode::ForwardBackward),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }

    /// Schedule `<prefix>_family` with `<prefix>_c`, `<prefix>_p` (and
    /// `<prefix>_amp`, `<prefix>_omega` for the oscillating family).
    /// `None` for the family `none`.
    pub fn schedule(&self, prefix: &str) -> Result<Option<Schedule>> {
        let family = self.text(&format!("{prefix}_family"))?;
        let c = || self.number(&format!("{prefix}_c"));
        let p = || self.number(&format!("{prefix}_p"));
        let s = match family.as_str() {
            "none" => return Ok(None),
            "power" => Schedule::Power { c: c()?, p: p()? },
            "exponential" => Schedule::Exponential { c: c()?, r: p()? },
            "logarithmic" => Schedule::Logarithmic { c: c()?, p: p()? },
            "constant" => Schedule::Constant { c: c()? },
            "oscillating" => Schedule::OscillatingPower {
                c: c()?,
                amp: self.number(&format!("{prefix}_amp"))?,
                omega: self.number(&format!("{prefix}_omega"))?,
                p: p()?,
            },
            other => return Err(Error::Config(format!("unknown schedule family `{other}`"))),
        };
        Ok(Some(s))
    }

    /// Requested conditions, or the given defaults.
    pub fn conditions(&self, defaults: &[ConditionId]) -> Result<Vec<ConditionId>> {
        match &self.outputs.conditions {
            Some(list) => list.iter().map(|c| c.parse()).collect(),
            None => Ok(defaults.to_vec()),
        }
    }

    /// Numeric parameters, for catalog lookups.
    pub fn numeric_params(&self) -> BTreeMap<String, f64> {
        self.parameters
            .iter()
            .filter_map(|(k, v)| match v {
                Param::Number(x) => Some((k.clone(), *x)),
                _ => None,
            })
            .collect()
    }
}

/// Markdown table of every scenario's parameters and defaults.
pub fn schema_documentation() -> String {
    let mut out = String::new();
    for sc in Scenario::ALL {
        out.push_str(&format!("### {sc}\n\n| key | default | meaning |\n|---|---|---|\n"));
        for spec in scenario_schema(sc) {
            out.push_str(&format!("| `{}` | {} | {} |\n", spec.key, spec.default, spec.doc.replace('|', "\\|")));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_validation() {
        let text = r#"
schema_version = 1
scenario = "two_d"
seed = 7

[parameters]
a = 2.0
b = 1.0
beta_p = 1.0
x0 = [1.5, 0.5]

[outputs]
svg = true
conditions = ["C7"]
"#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.number("beta_p").unwrap(), 1.0);
        assert_eq!(cfg.number("T").unwrap(), 1e3);
        assert_eq!(cfg.conditions(&[]).unwrap(), vec![ConditionId::C7]);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let missing = "scenario = \"two_d\"\n";
        assert!(matches!(ExperimentConfig::from_toml_str(missing), Err(Error::Config(_))));
        let version = "schema_version = 9\nscenario = \"two_d\"\n";
        assert!(ExperimentConfig::from_toml_str(version).is_err());
        let range = "schema_version = 1\nscenario = \"two_d\"\n[parameters]\na = 1.0\nb = 2.0\n";
        assert!(ExperimentConfig::from_toml_str(range).is_err());
        let unknown = "schema_version = 1\nscenario = \"two_d\"\n[parameters]\nbogus = 1.0\n";
        assert!(ExperimentConfig::from_toml_str(unknown).is_err());
        let cond = "schema_version = 1\nscenario = \"two_d\"\n[outputs]\nconditions = [\"C9\"]\n";
        assert!(ExperimentConfig::from_toml_str(cond).is_err());
    }

    #[test]
    fn cli_params() {
        assert_eq!(Param::parse_cli("2.5"), Param::Number(2.5));
        assert_eq!(Param::parse_cli("1,2"), Param::List(vec![1.0, 2.0]));
        assert_eq!(Param::parse_cli("power"), Param::Text("power".into()));
        assert!(schema_documentation().contains("| `beta_p` | 2 |"));
    }
}
