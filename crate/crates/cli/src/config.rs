//! Run configuration: a TOML file (or preset, or manifest) plus flag overrides.

use eqwalk::rational::phase_to_rational;
use eqwalk::spectrum::Axis;
use eqwalk::{FieldPhase, Walk, WalkSpec};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt;

/// Default tolerance, in turns, for reading decimal phases as `q/p`.
pub const PHASE_TOLERANCE: f64 = 1e-9;
/// Decimal phases whose nearest convergent needs a larger denominator stay real.
pub const MAX_DENOMINATOR: u64 = 1 << 20;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// A number as written in a config: plain, or text such as `"3pi/4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Written {
    Number(f64),
    Text(String),
}

impl fmt::Display for Written {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Written::Number(v) => write!(f, "{v}"),
            Written::Text(s) => f.write_str(s),
        }
    }
}

/// `[-][c][*]pi[*q][/p]` as the exact fraction `c q / p` of pi.
fn pi_multiple(text: &str) -> Option<(i64, u64)> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('π', "pi").to_lowercase();
    let (sign, s) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest.to_string()),
        None => (1, s),
    };
    let (head, tail) = s.split_once("pi")?;
    let coef: i64 = match head.trim_end_matches('*') {
        "" => 1,
        c => c.parse().ok()?,
    };
    let (num, den) = match tail.split_once('/') {
        Some((n, d)) => (n, d.parse::<u64>().ok()?),
        None => (tail, 1),
    };
    let num: i64 = match num {
        "" => 1,
        n => n.strip_prefix('*')?.parse().ok()?,
    };
    (den > 0).then_some((sign * coef * num, den))
}

/// An angle in radians: a number or a multiple of pi such as `"pi/4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Written", into = "Written")]
pub struct Angle {
    written: Written,
    radians: f64,
}

impl Angle {
    pub fn radians(&self) -> f64 {
        self.radians
    }

    pub fn from_radians(v: f64) -> Self {
        Angle {
            written: Written::Number(v),
            radians: v,
        }
    }

    fn quarter_pi() -> Self {
        Angle {
            written: Written::Text("pi/4".into()),
            radians: FRAC_PI_4,
        }
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::from_radians(0.0)
    }
}

impl TryFrom<Written> for Angle {
    type Error = ConfigError;

    fn try_from(w: Written) -> Result<Self, ConfigError> {
        let radians = match &w {
            Written::Number(v) => *v,
            Written::Text(s) => match s.trim().parse::<f64>() {
                Ok(v) => v,
                Err(_) => match pi_multiple(s) {
                    Some((n, d)) => PI * n as f64 / d as f64,
                    None => return bad(format!("cannot read angle '{s}' (try 0.3 or \"pi/4\")")),
                },
            },
        };
        if !radians.is_finite() {
            return bad(format!("angle {w} is not finite"));
        }
        Ok(Angle {
            written: w,
            radians,
        })
    }
}

impl From<Angle> for Written {
    fn from(a: Angle) -> Written {
        a.written
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.written.fmt(f)
    }
}

/// A field phase as written: `"2pi*q/p"` (exact) or radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Written", into = "Written")]
pub struct Phase {
    written: Written,
    exact: Option<(i64, u64)>,
    radians: f64,
}

impl Phase {
    pub fn zero() -> Self {
        Phase {
            written: Written::Number(0.0),
            exact: Some((0, 1)),
            radians: 0.0,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Phase::try_from(Written::Text(text.to_string()))
    }

    /// The lattice phase; decimals go through the continued-fraction
    /// convergents and come back with a note of what was chosen.
    pub fn resolve(&self, tolerance: f64) -> Result<(FieldPhase, Option<String>), ConfigError> {
        if let Some((n, d)) = self.exact {
            let phase = FieldPhase::rational(n, d).map_err(|e| ConfigError(e.to_string()))?;
            return Ok((phase, None));
        }
        let r =
            phase_to_rational(self.radians, tolerance).map_err(|e| ConfigError(e.to_string()))?;
        match r {
            FieldPhase::Rational { p, .. } if p <= MAX_DENOMINATOR => Ok((
                r,
                Some(format!(
                    "phase {} rad read as {r} (tolerance {tolerance:e} turns)",
                    self.written
                )),
            )),
            _ => {
                let phase =
                    FieldPhase::real(self.radians).map_err(|e| ConfigError(e.to_string()))?;
                Ok((
                    phase,
                    Some(format!(
                        "phase {} rad has no convergent with denominator <= {MAX_DENOMINATOR} \
                         within {tolerance:e} turns; kept as a real phase",
                        self.written
                    )),
                ))
            }
        }
    }
}

impl TryFrom<Written> for Phase {
    type Error = ConfigError;

    fn try_from(w: Written) -> Result<Self, ConfigError> {
        let number = match &w {
            Written::Number(v) => Some(*v),
            Written::Text(s) => s.trim().parse::<f64>().ok(),
        };
        if let Some(v) = number {
            if !v.is_finite() {
                return bad(format!("phase {w} is not finite"));
            }
            return Ok(Phase {
                exact: (v == 0.0).then_some((0, 1)),
                written: w,
                radians: v,
            });
        }
        let Written::Text(s) = &w else { unreachable!() };
        // multiples of pi are exact: c pi q / p = 2 pi (c q) / (2 p)
        match pi_multiple(s) {
            Some((n, d)) => Ok(Phase {
                exact: Some((n, 2 * d)),
                radians: PI * n as f64 / d as f64,
                written: w,
            }),
            None => bad(format!(
                "cannot read phase '{s}' (try \"2pi*1/120\" or a decimal in radians)"
            )),
        }
    }
}

impl From<Phase> for Written {
    fn from(p: Phase) -> Written {
        p.written
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::zero()
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.written.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WalkConfig {
    OneD {
        #[serde(default = "Angle::quarter_pi")]
        theta: Angle,
        #[serde(default)]
        alpha: Angle,
        #[serde(default)]
        beta: Angle,
    },
    Grover2d,
    /// Angles `pi/4 +- delta_theta` unless `theta_x`/`theta_y` are given.
    Alternate2d {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_x: Option<Angle>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_y: Option<Angle>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta_theta: Option<f64>,
        #[serde(default)]
        alpha: Angle,
        #[serde(default)]
        beta: Angle,
    },
    Dft2d,
    Hadamard2d,
    Custom4 {
        coin: String,
    },
}

impl WalkConfig {
    pub fn resolve(&self) -> Result<Walk, ConfigError> {
        Ok(match self {
            WalkConfig::OneD { theta, alpha, beta } => Walk::OneD {
                theta: theta.radians(),
                alpha: alpha.radians(),
                beta: beta.radians(),
            },
            WalkConfig::Grover2d => Walk::Grover2d,
            WalkConfig::Alternate2d {
                theta_x,
                theta_y,
                delta_theta,
                alpha,
                beta,
            } => {
                let (tx, ty) = match (theta_x, theta_y, delta_theta) {
                    (None, None, d) => {
                        let d = d.unwrap_or(0.0);
                        (FRAC_PI_4 + d, FRAC_PI_4 - d)
                    }
                    (_, _, Some(_)) => {
                        return bad("alternate walk: give delta_theta or theta_x/theta_y, not both")
                    }
                    (x, y, None) => (
                        x.as_ref().map_or(FRAC_PI_4, Angle::radians),
                        y.as_ref().map_or(FRAC_PI_4, Angle::radians),
                    ),
                };
                Walk::Alternate2d {
                    theta_x: tx,
                    theta_y: ty,
                    alpha: alpha.radians(),
                    beta: beta.radians(),
                }
            }
            WalkConfig::Dft2d => Walk::Dft2d,
            WalkConfig::Hadamard2d => Walk::Hadamard2d,
            WalkConfig::Custom4 { coin } => Walk::Custom4 { coin: coin.clone() },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    #[serde(default)]
    pub x: Phase,
    #[serde(default)]
    pub y: Phase,
}

/// Initial coin state: a named preset or explicit `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Named(String),
    Explicit(Vec<[f64; 2]>),
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Named("default".into())
    }
}

/// Named coin states.
pub const NAMED_STATES: &[(&str, &str)] = &[
    ("default", "the family's default state"),
    ("grover-symmetric", "1/2 (1, -1, -1, 1)"),
    ("dft-symmetric", "1/2 (1, i, i, -1)"),
    ("plus-i", "(1, i)/sqrt2"),
    ("minus-i", "(1, -i)/sqrt2"),
    ("up", "(1, 0)"),
    ("down", "(0, 1)"),
];

fn named_state(name: &str, walk: &Walk) -> Option<Vec<C64>> {
    let c = C64::new;
    let h = FRAC_1_SQRT_2;
    Some(match name {
        "default" => walk.default_initial(),
        "grover-symmetric" => vec![c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        "dft-symmetric" => vec![c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(-0.5, 0.0)],
        "plus-i" => vec![c(h, 0.0), c(0.0, h)],
        "minus-i" => vec![c(h, 0.0), c(0.0, -h)],
        "up" => vec![c(1.0, 0.0), c(0.0, 0.0)],
        "down" => vec![c(0.0, 0.0), c(1.0, 0.0)],
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObserverKind {
    Widths,
    Snapshot,
    Amplitudes,
    Periods,
}

fn default_observers() -> Vec<ObserverKind> {
    vec![
        ObserverKind::Widths,
        ObserverKind::Snapshot,
        ObserverKind::Periods,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthComponent {
    SigmaX,
    SigmaY,
    SigmaD,
    SigmaA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodsConfig {
    #[serde(default = "PeriodsConfig::default_series")]
    pub series: Vec<WidthComponent>,
    /// Longest lag searched; defaults to a third of the series, capped at 40.
    #[serde(default)]
    pub max_period: Option<usize>,
}

impl PeriodsConfig {
    fn default_series() -> Vec<WidthComponent> {
        vec![WidthComponent::SigmaX]
    }
}

impl Default for PeriodsConfig {
    fn default() -> Self {
        PeriodsConfig {
            series: Self::default_series(),
            max_period: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Points per momentum axis over `[-pi, pi]`.
    #[serde(default = "SpectrumConfig::default_grid")]
    pub grid: usize,
    /// Stroboscopic sheets for a field `2pi/p`; plain dispersion when absent.
    #[serde(default)]
    pub p: Option<u32>,
    #[serde(default = "SpectrumConfig::default_axis")]
    pub axis: Axis,
    /// Also report the largest deviation from the numerical eigenphases.
    #[serde(default = "SpectrumConfig::default_oracle")]
    pub oracle: bool,
}

impl SpectrumConfig {
    fn default_grid() -> usize {
        101
    }

    fn default_axis() -> Axis {
        Axis::X
    }

    fn default_oracle() -> bool {
        true
    }
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            grid: Self::default_grid(),
            p: None,
            axis: Self::default_axis(),
            oracle: Self::default_oracle(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi_x: Vec<Phase>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi_y: Vec<Phase>,
    /// Coin angle: `theta` of the 1D walk, both angles of the alternate walk.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theta: Vec<Angle>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta_theta: Vec<f64>,
    /// Entries run concurrently; defaults to the number of CPUs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub walk: WalkConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default = "RunConfig::default_tolerance")]
    pub phase_tolerance: f64,
    #[serde(default)]
    pub steps: u64,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default = "default_observers")]
    pub observers: Vec<ObserverKind>,
    /// Extra snapshot times besides the final one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot_times: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub periods: PeriodsConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// A config resolved into a runnable spec, with notes on any conversions.
pub struct Resolved {
    pub spec: WalkSpec,
    pub notes: Vec<String>,
}

impl RunConfig {
    fn default_tolerance() -> f64 {
        PHASE_TOLERANCE
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config error: {e}")))
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        if self.phase_tolerance.is_nan() || self.phase_tolerance <= 0.0 {
            return bad("phase_tolerance must be positive");
        }
        let walk = self.walk.resolve()?;
        let mut notes = Vec::new();
        let (fx, nx) = self.field.x.resolve(self.phase_tolerance)?;
        let (fy, ny) = self.field.y.resolve(self.phase_tolerance)?;
        notes.extend(nx.into_iter().chain(ny));
        if !walk.is_2d() && !fy.is_zero() {
            return bad("field.y is set but the walk is one-dimensional");
        }
        let coin = match &self.initial {
            InitialConfig::Named(name) => named_state(name, &walk).ok_or_else(|| {
                let known: Vec<&str> = NAMED_STATES.iter().map(|(n, _)| *n).collect();
                ConfigError(format!(
                    "unknown initial state '{name}' (known: {})",
                    known.join(", ")
                ))
            })?,
            InitialConfig::Explicit(v) => v.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        };
        let spec = WalkSpec::new(walk, fx, fy, self.steps).with_initial(&coin);
        spec.validate()
            .map_err(|e| ConfigError(format!("invalid run: {e}")))?;
        Ok(Resolved { spec, notes })
    }

    /// One config per point of the sweep grid, labelled by its coordinates.
    pub fn sweep_entries(&self) -> Result<Vec<(String, RunConfig)>, ConfigError> {
        let Some(sweep) = &self.sweep else {
            return bad("config has no [sweep] section");
        };
        let axes: Vec<Vec<(String, Setting)>> = vec![
            sweep
                .phi_x
                .iter()
                .map(|p| (format!("phi_x={p}"), Setting::PhiX(p.clone())))
                .collect(),
            sweep
                .phi_y
                .iter()
                .map(|p| (format!("phi_y={p}"), Setting::PhiY(p.clone())))
                .collect(),
            sweep
                .theta
                .iter()
                .map(|a| (format!("theta={a}"), Setting::Theta(a.clone())))
                .collect(),
            sweep
                .delta_theta
                .iter()
                .map(|&d| (format!("delta_theta={d}"), Setting::DeltaTheta(d)))
                .collect(),
        ];
        let mut base = self.clone();
        base.sweep = None;
        let mut entries = vec![(Vec::<String>::new(), base)];
        for axis in axes.into_iter().filter(|a| !a.is_empty()) {
            let mut next = Vec::with_capacity(entries.len() * axis.len());
            for (labels, cfg) in &entries {
                for (label, setting) in &axis {
                    let mut cfg = cfg.clone();
                    setting.apply(&mut cfg)?;
                    let mut labels = labels.clone();
                    labels.push(label.clone());
                    next.push((labels, cfg));
                }
            }
            entries = next;
        }
        Ok(entries
            .into_iter()
            .map(|(labels, cfg)| (sanitize(&labels.join(",")), cfg))
            .collect())
    }

    pub fn set_theta(&mut self, a: &Angle) -> Result<(), ConfigError> {
        match &mut self.walk {
            WalkConfig::OneD { theta, .. } => *theta = a.clone(),
            WalkConfig::Alternate2d {
                theta_x,
                theta_y,
                delta_theta,
                ..
            } => {
                *theta_x = Some(a.clone());
                *theta_y = Some(a.clone());
                *delta_theta = None;
            }
            _ => return bad("theta applies to the one_d and alternate2d walks only"),
        }
        Ok(())
    }

    pub fn set_delta_theta(&mut self, d: f64) -> Result<(), ConfigError> {
        match &mut self.walk {
            WalkConfig::Alternate2d {
                theta_x,
                theta_y,
                delta_theta,
                ..
            } => {
                *theta_x = None;
                *theta_y = None;
                *delta_theta = Some(d);
                Ok(())
            }
            _ => bad("delta_theta applies to the alternate2d walk only"),
        }
    }
}

enum Setting {
    PhiX(Phase),
    PhiY(Phase),
    Theta(Angle),
    DeltaTheta(f64),
}

impl Setting {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        match self {
            Setting::PhiX(p) => cfg.field.x = p.clone(),
            Setting::PhiY(p) => cfg.field.y = p.clone(),
            Setting::Theta(a) => cfg.set_theta(a)?,
            Setting::DeltaTheta(d) => cfg.set_delta_theta(*d)?,
        }
        Ok(())
    }
}

/// A label usable as a directory name.
fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '.' | '-' | '_' | '=' | ',' => c,
            _ => '_',
        })
        .collect()
}
