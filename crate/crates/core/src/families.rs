//! Translation graphs with identically vanishing `S_r`, `2 < r < n`:
//!
//! - the vertical-cylinder family: `n - r + 1` affine profiles followed by
//!   `r - 1` arbitrary ones, so every `r`-subset of second derivatives
//!   contains a zero;
//! - the generalized periodic Enneper family: `n - r - 1` affine profiles
//!   followed by `r + 1` log-cos profiles whose slopes satisfy `Σ 1/a_k = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypersurface::TranslationGraph;
use crate::profile::{logcos_domain, Interval, Profile};
use crate::sympoly::elementary_symmetric;

/// Threshold on `σ / max|a|^deg` below which a symmetric function of the
/// slopes counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Relative tolerance of the slope constraint `Σ 1/a_k = 0`.
pub const SLOPE_CONSTRAINT_TOL: f64 = 1e-12;

fn check_rank(n: usize, r: usize) -> Result<()> {
    if !(2 < r && r < n) {
        return Err(Error::Parameter(format!("family needs 2 < r < n, got n={n}, r={r}")));
    }
    Ok(())
}

fn check_finite(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Parameter(format!("{name}[{i}] is not finite"))),
        None => Ok(()),
    }
}

/// `σ_deg(slopes)` after validating it is not degenerate.
fn nondegenerate_sigma(slopes: &[f64], deg: usize, label: &str) -> Result<f64> {
    let sigma = elementary_symmetric(slopes)[deg];
    let scale = slopes.iter().fold(0.0_f64, |m, a| m.max(a.abs())).powi(deg as i32);
    if (sigma / scale).abs() <= DEGENERACY_TOL {
        return Err(Error::Degenerate {
            function: format!("sigma_{deg}({label})"),
            value: sigma,
        });
    }
    Ok(sigma)
}

/// `a_m = -(a_1 ... a_{m-1}) / σ_{m-2}(a_1, ..., a_{m-1})`, the slope that
/// closes `Σ_{k=1}^m 1/a_k = 0`.
pub fn closing_slope(slopes: &[f64]) -> Result<f64> {
    if slopes.is_empty() {
        return Err(Error::Parameter("closing slope needs at least one slope".into()));
    }
    if let Some(i) = slopes.iter().position(|&a| a == 0.0) {
        return Err(Error::Parameter(format!("slope a_{} must be nonzero", i + 1)));
    }
    check_finite("slopes", slopes)?;
    let sigma = nondegenerate_sigma(slopes, slopes.len() - 1, "slopes")?;
    let product: f64 = slopes.iter().product();
    Ok(-product / sigma)
}

/// `|Σ 1/a_k| / Σ |1/a_k|`.
pub fn slope_constraint_residual(slopes: &[f64]) -> f64 {
    let sum: f64 = slopes.iter().map(|a| 1.0 / a).sum();
    let scale: f64 = slopes.iter().map(|a| 1.0 / a.abs()).sum();
    sum.abs() / scale
}

/// Solution family of `Σ_k Π_{j≠k} f_j'' (β + f_k'^2) = 0`.
#[derive(Debug, Clone)]
pub struct LemmaFamily {
    pub beta: f64,
    /// All `m` slopes; the last is derived.
    pub slopes: Vec<f64>,
    pub phases: Vec<f64>,
    pub profiles: Vec<Profile>,
}

impl LemmaFamily {
    pub fn derived_slope(&self) -> f64 {
        *self.slopes.last().expect("lemma family has m >= 2 slopes")
    }

    pub fn domains(&self) -> Vec<Interval> {
        self.profiles.iter().map(Profile::domain).collect()
    }
}

/// `m` log-cos profiles `f_k = -(1/a_k) ln cos(a_k √β x + b_k) + c_k` with
/// `a_m` closing the slope constraint; `c_1 = c` and `c_k = 0` otherwise.
pub fn make_lemma_family(m: usize, beta: f64, slopes: &[f64], phases: &[f64], c: f64) -> Result<LemmaFamily> {
    if m < 2 {
        return Err(Error::Parameter(format!("lemma family needs m >= 2, got {m}")));
    }
    if slopes.len() != m - 1 {
        return Err(Error::Parameter(format!("expected {} free slopes, got {}", m - 1, slopes.len())));
    }
    if phases.len() != m {
        return Err(Error::Parameter(format!("expected {m} phases, got {}", phases.len())));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
    }
    check_finite("phases", phases)?;
    let a_m = closing_slope(slopes)?;
    let mut all = slopes.to_vec();
    all.push(a_m);
    let profiles = all
        .iter()
        .zip(phases)
        .enumerate()
        .map(|(k, (&a, &b))| Profile::logcos(a, beta, b, if k == 0 { c } else { 0.0 }))
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaFamily {
        beta,
        slopes: all,
        phases: phases.to_vec(),
        profiles,
    })
}

/// Residual of `Σ_k Π_{j≠k} f_j''(x_j) (β + f_k'(x_k)^2)` and the largest
/// term magnitude, at `x`.
pub fn lemma_residual(family: &LemmaFamily, x: &[f64]) -> Result<(f64, f64)> {
    if x.len() != family.profiles.len() {
        return Err(Error::Input(format!(
            "point has {} coordinates, family has {} profiles",
            x.len(),
            family.profiles.len()
        )));
    }
    let jets = family
        .profiles
        .iter()
        .zip(x)
        .enumerate()
        .map(|(i, (p, &xi))| p.derivatives(xi).map_err(|e| e.on_axis(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = 0.0;
    let mut largest = 0.0_f64;
    for k in 0..jets.len() {
        let term = jets
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, d)| d[2])
            .product::<f64>()
            * (family.beta + jets[k][1] * jets[k][1]);
        sum += term;
        largest = largest.max(term.abs());
    }
    Ok((sum, largest))
}

#[derive(Debug, Clone)]
pub struct CylinderParams {
    pub n: usize,
    pub r: usize,
    /// `a_1 .. a_{n-r+1}`.
    pub linear: Vec<f64>,
    /// `f_{n-r+2} .. f_n`.
    pub free: Vec<Profile>,
    pub offset: f64,
}

impl CylinderParams {
    pub fn validate(&self) -> Result<()> {
        check_rank(self.n, self.r)?;
        let (n, r) = (self.n, self.r);
        if self.linear.len() != n - r + 1 {
            return Err(Error::Parameter(format!(
                "cylinder n={n}, r={r} needs {} linear coefficients, got {}",
                n - r + 1,
                self.linear.len()
            )));
        }
        if self.free.len() != r - 1 {
            return Err(Error::Parameter(format!(
                "cylinder n={n}, r={r} needs {} free profiles, got {}",
                r - 1,
                self.free.len()
            )));
        }
        check_finite("linear", &self.linear)?;
        check_finite("offset", &[self.offset])
    }
}

pub fn make_cylinder(p: &CylinderParams) -> Result<TranslationGraph> {
    p.validate()?;
    let linear = p
        .linear
        .iter()
        .enumerate()
        .map(|(i, &a)| Profile::linear(a, if i == 0 { p.offset } else { 0.0 }));
    TranslationGraph::new(linear.chain(p.free.iter().cloned()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnneperParams {
    pub n: usize,
    pub r: usize,
    /// `a_1 .. a_{n-r-1}`, possibly empty.
    pub linear: Vec<f64>,
    /// `a_{n-r} .. a_{n-1}`, all nonzero.
    pub slopes: Vec<f64>,
    /// `b_{n-r} .. b_n`.
    pub phases: Vec<f64>,
    pub offset: f64,
}

impl EnneperParams {
    pub fn validate(&self) -> Result<()> {
        check_rank(self.n, self.r)?;
        let (n, r) = (self.n, self.r);
        if self.linear.len() != n - r - 1 {
            return Err(Error::Parameter(format!(
                "Enneper n={n}, r={r} needs {} linear coefficients, got {}",
                n - r - 1,
                self.linear.len()
            )));
        }
        if self.slopes.len() != r {
            return Err(Error::Parameter(format!(
                "Enneper n={n}, r={r} needs {r} slopes, got {}",
                self.slopes.len()
            )));
        }
        if self.phases.len() != r + 1 {
            return Err(Error::Parameter(format!(
                "Enneper n={n}, r={r} needs {} phases, got {}",
                r + 1,
                self.phases.len()
            )));
        }
        check_finite("linear", &self.linear)?;
        check_finite("phases", &self.phases)?;
        check_finite("offset", &[self.offset])?;
        closing_slope(&self.slopes).map(|_| ())
    }

    /// `β = 1 + Σ a_i^2` over the linear block.
    pub fn beta(&self) -> f64 {
        1.0 + self.linear.iter().map(|a| a * a).sum::<f64>()
    }

    /// `a_n = -(a_{n-r} ... a_{n-1}) / σ_{r-1}(a_{n-r}, ..., a_{n-1})`.
    pub fn effective_last_slope(&self) -> Result<f64> {
        closing_slope(&self.slopes)
    }

    /// All `r + 1` curved slopes including the derived one.
    pub fn curved_slopes(&self) -> Result<Vec<f64>> {
        let mut all = self.slopes.clone();
        all.push(self.effective_last_slope()?);
        Ok(all)
    }
}

pub fn make_enneper(p: &EnneperParams) -> Result<TranslationGraph> {
    p.validate()?;
    let lemma = make_lemma_family(p.r + 1, p.beta(), &p.slopes, &p.phases, p.offset)?;
    let linear = p.linear.iter().map(|&a| Profile::linear(a, 0.0));
    TranslationGraph::new(linear.chain(lemma.profiles).collect())
}

/// The real line for each linear coordinate, then
/// `{ x : |a_k √β x + b_k| < π/2 }` for each curved one.
pub fn admissible_domain(p: &EnneperParams) -> Result<Vec<Interval>> {
    p.validate()?;
    let beta = p.beta();
    let mut out = vec![Interval::REAL_LINE; p.linear.len()];
    for (a, b) in p.curved_slopes()?.iter().zip(&p.phases) {
        out.push(logcos_domain(*a, beta, *b)?);
    }
    Ok(out)
}
