//! Run configuration: one JSON document with a `version` field. Unknown keys
//! are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use transhyp::families::{make_cylinder, make_enneper, CylinderParams, EnneperParams};
use transhyp::verify::{AxisSpec, GridSpec, SamplingMode, Tolerances, DEFAULT_POINT_CAP};
use transhyp::{Interval, Profile, TranslationGraph};

use crate::error::{CliError, CliResult};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub graph: Option<GraphConfig>,
    pub grid: Option<GridConfig>,
    pub r_set: Option<Vec<usize>>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub seed: Option<u64>,
    #[serde(default, rename = "assert")]
    pub assertions: AssertConfig,
    pub ode: Option<OdeConfig>,
    pub identities: Option<IdentitiesConfig>,
    pub sym: Option<SymConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Linear {
        slope: f64,
        #[serde(default)]
        offset: f64,
    },
    Polynomial {
        coefficients: Vec<f64>,
        domain: Option<[f64; 2]>,
    },
    Logcos {
        slope: f64,
        #[serde(default = "one")]
        beta: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Cylinder,
    Enneper,
}

/// Either an explicit profile list or a named family with its parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub profiles: Option<Vec<ProfileConfig>>,
    pub family: Option<FamilyName>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub linear: Option<Vec<f64>>,
    pub slopes: Option<Vec<f64>>,
    pub phases: Option<Vec<f64>>,
    pub free: Option<Vec<ProfileConfig>>,
    pub offset: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum GraphSpec {
    Profiles(Vec<ProfileConfig>),
    Cylinder(CylinderParams),
    Enneper(EnneperParams),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    #[default]
    Lattice,
    Random,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub mode: GridMode,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Per-axis counts, overriding `count`.
    pub counts: Option<Vec<usize>>,
    #[serde(default = "default_inset")]
    pub inset: f64,
    /// Explicit per-axis spans, overriding the domain-derived ones.
    pub axes: Option<Vec<[f64; 2]>>,
    /// Span used on axes whose domain is the whole line.
    #[serde(default = "default_unbounded")]
    pub unbounded: [f64; 2],
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub zero: Option<f64>,
    pub constant: Option<f64>,
    pub oracle_rel: Option<f64>,
    pub oracle_abs: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<String>,
    pub report: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertConfig {
    /// `r` values whose `S_r` must vanish on the grid.
    #[serde(default)]
    pub zero: Vec<usize>,
    /// `r` values whose `S_r` must be constant on the grid.
    #[serde(default)]
    pub constant: Vec<usize>,
    /// Closed form must agree with the eigen oracle for every scanned `r`.
    #[serde(default = "yes")]
    pub oracle: bool,
}

impl Default for AssertConfig {
    fn default() -> Self {
        Self {
            zero: Vec::new(),
            constant: Vec::new(),
            oracle: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeConfig {
    #[serde(default = "one")]
    pub slope: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default)]
    pub phase: f64,
    /// Span as `[lo, hi]`; defaults to the domain inset by `x_inset`.
    pub span: Option<[f64; 2]>,
    #[serde(default = "default_x_inset")]
    pub x_inset: f64,
    #[serde(default = "default_ode_step")]
    pub step: f64,
    #[serde(default = "default_ode_tol")]
    pub tol: f64,
    /// Step of the coarsest run in the convergence study.
    #[serde(default = "default_convergence_step")]
    pub convergence_step: f64,
    #[serde(default = "default_halvings")]
    pub halvings: usize,
    /// Accepted range of the error ratio per halving.
    #[serde(default = "default_factor_band")]
    pub factor_band: [f64; 2],
}

impl Default for OdeConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every ODE field has a default")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteName {
    #[default]
    FiniteDifference,
    Analytic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    pub r: usize,
    /// Explicit evaluation points; otherwise `samples` seeded random points.
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Index lists (1-based) for the `W^{r+2}` identity, each of length 1 or 2.
    #[serde(default)]
    pub w: Vec<Vec<usize>>,
    /// Index lists (1-based) of length `r + 1` for the `G_r` identity.
    #[serde(default)]
    pub gr: Vec<Vec<usize>>,
    #[serde(default = "default_w_tol")]
    pub w_tol: f64,
    #[serde(default = "default_gr_tol")]
    pub gr_tol: f64,
    pub w_step: Option<f64>,
    pub gr_step: Option<f64>,
    #[serde(default)]
    pub route: RouteName,
    #[serde(default = "default_inset")]
    pub inset: f64,
    #[serde(default = "default_unbounded")]
    pub unbounded: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymConfig {
    pub values: Vec<f64>,
    #[serde(default = "default_sym_tol")]
    pub tol: f64,
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_count() -> usize {
    10
}
fn default_inset() -> f64 {
    0.05
}
fn default_unbounded() -> [f64; 2] {
    [-2.0, 2.0]
}
fn default_x_inset() -> f64 {
    0.05
}
fn default_ode_step() -> f64 {
    1e-3
}
fn default_ode_tol() -> f64 {
    1e-6
}
fn default_convergence_step() -> f64 {
    0.01
}
fn default_halvings() -> usize {
    3
}
fn default_factor_band() -> [f64; 2] {
    [12.0, 20.0]
}
fn default_samples() -> usize {
    10
}
fn default_w_tol() -> f64 {
    1e-5
}
fn default_gr_tol() -> f64 {
    1e-4
}
fn default_sym_tol() -> f64 {
    1e-10
}

/// A parsed config together with where it came from, for diagnostics.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub config: RunConfig,
}

impl LoadedConfig {
    pub fn config_error(&self, message: impl Into<String>) -> CliError {
        CliError::Config {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    pub fn graph_spec(&self) -> CliResult<GraphSpec> {
        let g = self.config.graph.as_ref().ok_or_else(|| self.config_error("missing `graph` section"))?;
        g.spec().map_err(|m| self.config_error(m))
    }

    pub fn tolerances(&self) -> CliResult<Tolerances> {
        let t = &self.config.tolerances;
        let d = Tolerances::default();
        let out = Tolerances {
            zero: t.zero.unwrap_or(d.zero),
            constant: t.constant.unwrap_or(d.constant),
            oracle_rel: t.oracle_rel.unwrap_or(d.oracle_rel),
            oracle_abs: t.oracle_abs.unwrap_or(d.oracle_abs),
        };
        for (name, v) in [
            ("zero", out.zero),
            ("constant", out.constant),
            ("oracle_rel", out.oracle_rel),
            ("oracle_abs", out.oracle_abs),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(self.config_error(format!("tolerance `{name}` must be positive, got {v}")));
            }
        }
        Ok(out)
    }

    pub fn section<'a, T>(&self, name: &str, value: &'a Option<T>) -> CliResult<&'a T> {
        value.as_ref().ok_or_else(|| self.config_error(format!("missing `{name}` section")))
    }
}

pub fn load(path: &Path) -> CliResult<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let loaded = LoadedConfig {
        path: path.to_path_buf(),
        config,
    };
    if loaded.config.version != CONFIG_VERSION {
        return Err(loaded.config_error(format!(
            "unsupported config version {} (expected {CONFIG_VERSION})",
            loaded.config.version
        )));
    }
    Ok(loaded)
}

impl ProfileConfig {
    pub fn build(&self) -> transhyp::Result<Profile> {
        match self {
            ProfileConfig::Linear { slope, offset } => Ok(Profile::linear(*slope, *offset)),
            ProfileConfig::Polynomial { coefficients, domain } => {
                let p = Profile::polynomial(coefficients.clone());
                match domain {
                    Some([lo, hi]) => p.restricted(Interval::new(*lo, *hi)?),
                    None => Ok(p),
                }
            }
            ProfileConfig::Logcos {
                slope,
                beta,
                phase,
                offset,
            } => Profile::logcos(*slope, *beta, *phase, *offset),
        }
    }
}

impl GraphConfig {
    /// Checks that exactly one of `profiles` and `family` is given and that
    /// only the fields of the chosen form appear.
    pub fn spec(&self) -> Result<GraphSpec, String> {
        let present = |name: &'static str, set: bool| set.then_some(name);
        let family_fields: Vec<&str> = [
            present("n", self.n.is_some()),
            present("r", self.r.is_some()),
            present("linear", self.linear.is_some()),
            present("slopes", self.slopes.is_some()),
            present("phases", self.phases.is_some()),
            present("free", self.free.is_some()),
            present("offset", self.offset.is_some()),
        ]
        .into_iter()
        .flatten()
        .collect();
        match (&self.profiles, self.family) {
            (Some(_), Some(_)) => Err("graph: give exactly one of `profiles` and `family`, not both".into()),
            (None, None) => Err("graph: give exactly one of `profiles` and `family`".into()),
            (Some(p), None) => {
                if !family_fields.is_empty() {
                    return Err(format!("graph: {family_fields:?} only apply to family graphs"));
                }
                Ok(GraphSpec::Profiles(p.clone()))
            }
            (None, Some(family)) => {
                let n = self.n.ok_or("graph: family needs `n`")?;
                let r = self.r.ok_or("graph: family needs `r`")?;
                let offset = self.offset.unwrap_or(0.0);
                match family {
                    FamilyName::Cylinder => {
                        if self.slopes.is_some() || self.phases.is_some() {
                            return Err("graph: cylinder takes `linear` and `free`, not `slopes` or `phases`".into());
                        }
                        let free = self
                            .free
                            .as_ref()
                            .ok_or("graph: cylinder needs `free` profiles")?
                            .iter()
                            .map(|p| p.build())
                            .collect::<transhyp::Result<Vec<_>>>()
                            .map_err(|e| e.to_string())?;
                        Ok(GraphSpec::Cylinder(CylinderParams {
                            n,
                            r,
                            linear: self.linear.clone().ok_or("graph: cylinder needs `linear`")?,
                            free,
                            offset,
                        }))
                    }
                    FamilyName::Enneper => {
                        if self.free.is_some() {
                            return Err("graph: Enneper family takes no `free` profiles".into());
                        }
                        let slopes = self.slopes.clone().ok_or("graph: Enneper family needs `slopes`")?;
                        Ok(GraphSpec::Enneper(EnneperParams {
                            n,
                            r,
                            linear: self.linear.clone().unwrap_or_default(),
                            phases: self.phases.clone().unwrap_or_else(|| vec![0.0; slopes.len() + 1]),
                            slopes,
                            offset,
                        }))
                    }
                }
            }
        }
    }
}

impl GraphSpec {
    pub fn build(&self) -> transhyp::Result<TranslationGraph> {
        match self {
            GraphSpec::Profiles(p) => TranslationGraph::new(p.iter().map(ProfileConfig::build).collect::<transhyp::Result<_>>()?),
            GraphSpec::Cylinder(p) => make_cylinder(p),
            GraphSpec::Enneper(p) => make_enneper(p),
        }
    }

    /// The rank a family is built for.
    pub fn designated_r(&self) -> Option<usize> {
        match self {
            GraphSpec::Profiles(_) => None,
            GraphSpec::Cylinder(p) => Some(p.r),
            GraphSpec::Enneper(p) => Some(p.r),
        }
    }
}

impl GridConfig {
    pub fn build(&self, domains: &[Interval], seed: u64) -> transhyp::Result<GridSpec> {
        let mode = match self.mode {
            GridMode::Lattice => SamplingMode::Lattice,
            GridMode::Random => SamplingMode::Random { seed },
        };
        let n = domains.len();
        let counts = match &self.counts {
            Some(c) if c.len() != n => {
                return Err(transhyp::Error::Grid(format!("{} counts given for {n} axes", c.len())));
            }
            Some(c) => c.clone(),
            None => vec![self.count; n],
        };
        let mut spec = match &self.axes {
            Some(axes) => {
                if axes.len() != n {
                    return Err(transhyp::Error::Grid(format!("{} axes given for dimension {n}", axes.len())));
                }
                GridSpec {
                    axes: axes.iter().map(|&[lo, hi]| AxisSpec { lo, hi, count: 0 }).collect(),
                    mode,
                    inset: self.inset,
                    cap: DEFAULT_POINT_CAP,
                }
            }
            None => GridSpec::for_domains(domains, 0, self.inset, Interval::new(self.unbounded[0], self.unbounded[1])?, mode)?,
        };
        for (a, c) in spec.axes.iter_mut().zip(counts) {
            a.count = c;
        }
        if let Some(cap) = self.cap {
            spec.cap = cap;
        }
        spec.validate(domains)?;
        Ok(spec)
    }
}
