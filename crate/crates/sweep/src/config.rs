//! JSON sweep configuration and its validation.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use su11mzi::detection::Scheme;
use su11mzi::mzi::BeamSplitterPair;
use su11mzi::StateSpec;

/// A validation failure, located by a JSON-style field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// How a Barut-Girardello entry fixes `|ξ|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BgcsParametrization {
    /// Entries give `xi` directly.
    #[default]
    DirectXi,
    /// Entries give `v` and `|ξ| = tanh(v/2)`.
    XiEqualsTanhHalfV,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateEntry {
    Perelomov {
        label: String,
        a: f64,
        v: f64,
        #[serde(default)]
        phi: f64,
    },
    BarutGirardello {
        label: String,
        a: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        xi: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<f64>,
        #[serde(default)]
        phase: f64,
    },
    Vacuum {
        label: String,
    },
}

impl StateEntry {
    pub fn label(&self) -> &str {
        match self {
            Self::Perelomov { label, .. } | Self::BarutGirardello { label, .. } | Self::Vacuum { label } => label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Offset applied to grid points that land on a singularity of a scheme.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    1e-6
}

impl ThetaGrid {
    pub fn intensity_default() -> Self {
        Self {
            start: 0.01 * PI,
            stop: 0.99 * PI,
            count: 99,
            epsilon: default_epsilon(),
        }
    }

    pub fn homodyne_default() -> Self {
        Self {
            start: -0.45 * PI,
            stop: 0.45 * PI,
            count: 91,
            epsilon: default_epsilon(),
        }
    }

    /// Evenly spaced points, `start·(1 − s) + stop·s`, so symmetric grids
    /// hit zero exactly.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                self.start * (1.0 - s) + self.stop * s
            })
            .collect()
    }

    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.count < 2 {
            return Err(ConfigError::new(format!("{path}.count"), "must be at least 2"));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.start >= self.stop {
            return Err(ConfigError::new(path, "requires finite start < stop"));
        }
        if self.start < -2.0 * PI || self.stop > 2.0 * PI {
            return Err(ConfigError::new(path, "must lie within [-2π, 2π]"));
        }
        if !(0.0..=1e-3).contains(&self.epsilon) {
            return Err(ConfigError::new(format!("{path}.epsilon"), "must lie in [0, 1e-3]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitterConfig {
    /// `[|α|, |α′|]` for intensity-difference and single-mode detection.
    #[serde(default = "default_intensity_splitters")]
    pub intensity: [f64; 2],
    /// `[|α|, |α′|]` for homodyne detection.
    #[serde(default = "default_homodyne_splitters")]
    pub homodyne: [f64; 2],
}

fn default_intensity_splitters() -> [f64; 2] {
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2]
}

fn default_homodyne_splitters() -> [f64; 2] {
    [1.0, 0.0]
}

impl Default for SplitterConfig {
    fn default() -> Self {
        Self {
            intensity: default_intensity_splitters(),
            homodyne: default_homodyne_splitters(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Closed-form vs oracle Fisher information, relative.
    pub qfi_rel: f64,
    /// Closed-form vs finite-difference sensitivity, relative.
    pub sensitivity_rel: f64,
    /// Allowed undershoot of Δθ below its Cramér-Rao bound.
    pub qcrb_slack: f64,
    /// Finite-difference step of the sensitivity oracle.
    pub fd_step: f64,
    /// Golden-section termination width for optimal-θ searches.
    pub optimum_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            qfi_rel: 1e-8,
            sensitivity_rel: 1e-5,
            qcrb_slack: 1e-9,
            fd_step: 1e-4,
            optimum_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleCheckConfig {
    /// Transmittances `|α|²` at which Fisher informations are compared.
    pub transmittances: Vec<f64>,
    /// Grid points per scheme at which sensitivities are compared.
    pub sensitivity_points: usize,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        Self {
            transmittances: vec![0.1, 0.5, 0.9],
            sensitivity_points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioPair {
    pub numerator: String,
    pub denominator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub states: Vec<StateEntry>,
    #[serde(default)]
    pub bgcs_parametrization: BgcsParametrization,
    /// Number of `|α|²` points of the Fisher-information sweep.
    #[serde(default = "default_qfi_points")]
    pub qfi_points: usize,
    #[serde(default = "ThetaGrid::intensity_default")]
    pub theta_grid: ThetaGrid,
    #[serde(default = "ThetaGrid::homodyne_default")]
    pub homodyne_theta_grid: ThetaGrid,
    #[serde(default)]
    pub splitters: SplitterConfig,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<String>,
    #[serde(default = "default_ratio_schemes")]
    pub ratio_schemes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioPair>,
    #[serde(default)]
    pub oracle: bool,
    /// Fock cutoff applied to every state in oracle computations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    /// Per-label cutoff overrides, taking precedence over `cutoff`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cutoffs: BTreeMap<String, usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub oracle_check: OracleCheckConfig,
}

fn default_qfi_points() -> usize {
    101
}

fn default_schemes() -> Vec<String> {
    Scheme::ALL.iter().map(|s| s.name().to_string()).collect()
}

fn default_ratio_schemes() -> Vec<String> {
    vec!["dif".into(), "sing".into()]
}

impl Default for SweepConfig {
    /// PCS `(a = 1, v = 1)` against BGCS `(a = 1, |ξ| = tanh ½)`.
    fn default() -> Self {
        Self {
            states: vec![
                StateEntry::Perelomov {
                    label: "pcs".into(),
                    a: 1.0,
                    v: 1.0,
                    phi: 0.0,
                },
                StateEntry::BarutGirardello {
                    label: "bgcs".into(),
                    a: 1.0,
                    xi: None,
                    v: Some(1.0),
                    phase: 0.0,
                },
            ],
            bgcs_parametrization: BgcsParametrization::XiEqualsTanhHalfV,
            qfi_points: default_qfi_points(),
            theta_grid: ThetaGrid::intensity_default(),
            homodyne_theta_grid: ThetaGrid::homodyne_default(),
            splitters: SplitterConfig::default(),
            schemes: default_schemes(),
            ratio_schemes: default_ratio_schemes(),
            ratio: None,
            oracle: false,
            cutoff: None,
            cutoffs: BTreeMap::new(),
            tolerances: Tolerances::default(),
            oracle_check: OracleCheckConfig::default(),
        }
    }
}

/// A state with its column label and oracle cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    pub label: String,
    pub spec: StateSpec,
    pub cutoff: Option<usize>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub states: Vec<LabeledState>,
    pub qfi_points: usize,
    pub theta_grid: ThetaGrid,
    pub homodyne_theta_grid: ThetaGrid,
    pub intensity_splitters: BeamSplitterPair,
    pub homodyne_splitters: BeamSplitterPair,
    pub schemes: Vec<Scheme>,
    pub ratio_schemes: Vec<Scheme>,
    /// Indices into `states`.
    pub ratio: Option<(usize, usize)>,
    pub oracle: bool,
    pub tolerances: Tolerances,
    pub oracle_check: OracleCheckConfig,
}

impl Plan {
    pub fn state(&self, label: &str) -> Option<&LabeledState> {
        self.states.iter().find(|s| s.label == label)
    }
}

fn parse_scheme(name: &str, path: &str) -> Result<Scheme, ConfigError> {
    Scheme::ALL.into_iter().find(|s| s.name() == name).ok_or_else(|| {
        ConfigError::new(
            path,
            format!("unknown scheme `{name}` (expected dif, sing, hom_b, hom_c)"),
        )
    })
}

fn parse_schemes(names: &[String], path: &str) -> Result<Vec<Scheme>, ConfigError> {
    if names.is_empty() {
        return Err(ConfigError::new(path, "must name at least one scheme"));
    }
    let mut out = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let s = parse_scheme(name, &format!("{path}[{i}]"))?;
        if out.contains(&s) {
            return Err(ConfigError::new(
                format!("{path}[{i}]"),
                format!("duplicate scheme `{name}`"),
            ));
        }
        out.push(s);
    }
    Ok(out)
}

fn finite(value: f64, path: String) -> Result<f64, ConfigError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ConfigError::new(path, "must be finite"))
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("$", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("$", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn resolve_state(&self, i: usize, entry: &StateEntry) -> Result<StateSpec, ConfigError> {
        let path = format!("states[{i}]");
        let invalid =
            |field: &str, e: su11mzi::states::StateError| ConfigError::new(format!("{path}.{field}"), e.to_string());
        match entry {
            StateEntry::Perelomov { a, v, phi, .. } => {
                let (a, v, phi) = (
                    finite(*a, format!("{path}.a"))?,
                    finite(*v, format!("{path}.v"))?,
                    finite(*phi, format!("{path}.phi"))?,
                );
                su11mzi::BargmannIndex::new(a).map_err(|e| invalid("a", e))?;
                StateSpec::perelomov(a, v, phi).map_err(|e| invalid("v", e))
            }
            StateEntry::BarutGirardello { a, xi, v, phase, .. } => {
                let a = finite(*a, format!("{path}.a"))?;
                let phase = finite(*phase, format!("{path}.phase"))?;
                su11mzi::BargmannIndex::new(a).map_err(|e| invalid("a", e))?;
                match (self.bgcs_parametrization, xi, v) {
                    (BgcsParametrization::DirectXi, Some(xi), None) => {
                        StateSpec::barut_girardello(a, finite(*xi, format!("{path}.xi"))?, phase)
                            .map_err(|e| invalid("xi", e))
                    }
                    (BgcsParametrization::XiEqualsTanhHalfV, None, Some(v)) => {
                        StateSpec::barut_girardello_from_v(a, finite(*v, format!("{path}.v"))?, phase)
                            .map_err(|e| invalid("v", e))
                    }
                    (BgcsParametrization::DirectXi, _, _) => Err(ConfigError::new(
                        &path,
                        "bgcs_parametrization `direct_xi` requires `xi` and no `v`",
                    )),
                    (BgcsParametrization::XiEqualsTanhHalfV, _, _) => Err(ConfigError::new(
                        &path,
                        "bgcs_parametrization `xi_equals_tanh_half_v` requires `v` and no `xi`",
                    )),
                }
            }
            StateEntry::Vacuum { .. } => Ok(StateSpec::Vacuum),
        }
    }

    /// Checks every field and resolves labels, states and schemes.
    pub fn validate(&self) -> Result<Plan, ConfigError> {
        if self.states.is_empty() {
            return Err(ConfigError::new("states", "must contain at least one state"));
        }
        let mut states: Vec<LabeledState> = Vec::new();
        for (i, entry) in self.states.iter().enumerate() {
            let label = entry.label();
            let valid_label = !label.is_empty()
                && label
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if !valid_label {
                return Err(ConfigError::new(
                    format!("states[{i}].label"),
                    "must be non-empty snake_case ([a-z0-9_])",
                ));
            }
            if states.iter().any(|s| s.label == label) {
                return Err(ConfigError::new(
                    format!("states[{i}].label"),
                    format!("duplicate label `{label}`"),
                ));
            }
            let spec = self.resolve_state(i, entry)?;
            let cutoff = self.cutoffs.get(label).copied().or(self.cutoff);
            states.push(LabeledState {
                label: label.to_string(),
                spec,
                cutoff,
            });
        }
        for (label, &cutoff) in &self.cutoffs {
            if !states.iter().any(|s| &s.label == label) {
                return Err(ConfigError::new(format!("cutoffs.{label}"), "no state with this label"));
            }
            if cutoff < 2 {
                return Err(ConfigError::new(format!("cutoffs.{label}"), "must be at least 2"));
            }
        }
        if matches!(self.cutoff, Some(c) if c < 2) {
            return Err(ConfigError::new("cutoff", "must be at least 2"));
        }
        if self.qfi_points < 2 {
            return Err(ConfigError::new("qfi_points", "must be at least 2"));
        }
        self.theta_grid.validate("theta_grid")?;
        self.homodyne_theta_grid.validate("homodyne_theta_grid")?;
        let pair = |v: [f64; 2], path: &str| {
            BeamSplitterPair::new(v[0], v[1]).map_err(|e| ConfigError::new(path, e.to_string()))
        };
        let intensity_splitters = pair(self.splitters.intensity, "splitters.intensity")?;
        let homodyne_splitters = pair(self.splitters.homodyne, "splitters.homodyne")?;
        let schemes = parse_schemes(&self.schemes, "schemes")?;
        let ratio_schemes = parse_schemes(&self.ratio_schemes, "ratio_schemes")?;

        let index_of = |label: &str, path: &str| {
            states
                .iter()
                .position(|s| s.label == label)
                .ok_or_else(|| ConfigError::new(path, format!("no state labelled `{label}`")))
        };
        let ratio = match &self.ratio {
            Some(r) => Some((
                index_of(&r.numerator, "ratio.numerator")?,
                index_of(&r.denominator, "ratio.denominator")?,
            )),
            None if states.len() == 2 => Some((0, 1)),
            None => None,
        };

        let t = &self.tolerances;
        for (name, value) in [
            ("qfi_rel", t.qfi_rel),
            ("sensitivity_rel", t.sensitivity_rel),
            ("qcrb_slack", t.qcrb_slack),
            ("optimum_tol", t.optimum_tol),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::new(format!("tolerances.{name}"), "must be positive"));
            }
        }
        if !(su11mzi::oracle::MIN_STEP..=su11mzi::oracle::MAX_STEP).contains(&t.fd_step) {
            return Err(ConfigError::new("tolerances.fd_step", "must lie in [1e-6, 1e-3]"));
        }
        for (i, q) in self.oracle_check.transmittances.iter().enumerate() {
            if !(0.0..=1.0).contains(q) {
                return Err(ConfigError::new(
                    format!("oracle_check.transmittances[{i}]"),
                    "must lie in [0, 1]",
                ));
            }
        }

        Ok(Plan {
            states,
            qfi_points: self.qfi_points,
            theta_grid: self.theta_grid,
            homodyne_theta_grid: self.homodyne_theta_grid,
            intensity_splitters,
            homodyne_splitters,
            schemes,
            ratio_schemes,
            ratio,
            oracle: self.oracle,
            tolerances: self.tolerances,
            oracle_check: self.oracle_check.clone(),
        })
    }
}
