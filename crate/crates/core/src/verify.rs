//! Grid scans of `S_r`, constancy detection, and finite-difference checks of
//! the derivative identities used in the classification argument.
//!
//! Points are evaluated in parallel but collected in grid order, and every
//! statistic is reduced sequentially in that order. Reports are therefore
//! bit-identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypersurface::{curvature_polynomials, frame_at, s_r_oracle_eigen, TranslationGraph};
use crate::profile::{Interval, Profile};
use crate::stencil::{mixed_partial, REACH};

/// Default cap on the number of grid points.
pub const DEFAULT_POINT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// `|S_r| <= zero` counts as vanishing.
    pub zero: f64,
    /// Constancy band: `max - min <= constant * max(1, max |S_r|)`.
    pub constant: f64,
    /// Relative agreement between the closed form and the eigen oracle.
    pub oracle_rel: f64,
    /// Absolute floor for the oracle comparison.
    pub oracle_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: 1e-8,
            constant: 1e-7,
            oracle_rel: 1e-8,
            oracle_abs: 1e-10,
        }
    }
}

/// `|a - b| / max(|a|, |b|, abs / rel)`: at most `rel` exactly when
/// `|a - b| <= max(rel * max(|a|, |b|), abs)`.
pub fn scaled_discrepancy(a: f64, b: f64, rel: f64, abs: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(abs / rel)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplingMode {
    /// Tensor lattice including both endpoints of every axis.
    Lattice,
    /// Uniform random points in the box, as many as the lattice would have.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub axes: Vec<AxisSpec>,
    pub mode: SamplingMode,
    /// Bounded domains must be inset by this fraction of their length.
    pub inset: f64,
    pub cap: usize,
}

impl GridSpec {
    /// Axes covering each domain inset by `inset`; unbounded domains are
    /// intersected with `unbounded` first.
    pub fn for_domains(
        domains: &[Interval],
        count: usize,
        inset: f64,
        unbounded: Interval,
        mode: SamplingMode,
    ) -> Result<Self> {
        let axes = domains
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let span = if d.is_bounded() {
                    d.inset(inset)
                } else {
                    d.intersect(&unbounded)
                        .ok_or_else(|| Error::Grid(format!("axis {}: {unbounded} misses domain {d}", i + 1)))?
                        .inset(inset)
                };
                Ok(AxisSpec {
                    lo: span.lo,
                    hi: span.hi,
                    count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            axes,
            mode,
            inset,
            cap: DEFAULT_POINT_CAP,
        })
    }

    /// Product of the per-axis counts.
    pub fn total_points(&self) -> usize {
        self.axes.iter().fold(1usize, |acc, a| acc.saturating_mul(a.count))
    }

    pub fn validate(&self, domains: &[Interval]) -> Result<()> {
        if self.axes.len() != domains.len() {
            return Err(Error::Grid(format!(
                "grid has {} axes, graph dimension is {}",
                self.axes.len(),
                domains.len()
            )));
        }
        if !(0.0..0.5).contains(&self.inset) {
            return Err(Error::Grid(format!("inset fraction {} must lie in [0, 0.5)", self.inset)));
        }
        for (i, (a, d)) in self.axes.iter().zip(domains).enumerate() {
            if a.count < 2 {
                return Err(Error::Grid(format!("axis {}: needs at least 2 samples, got {}", i + 1, a.count)));
            }
            if !(a.lo.is_finite() && a.hi.is_finite() && a.lo < a.hi) {
                return Err(Error::Grid(format!("axis {}: invalid span [{}, {}]", i + 1, a.lo, a.hi)));
            }
            let allowed = d.inset(self.inset);
            let tol = 1e-12 * d.len().clamp(1.0, 1e12);
            let inside = if d.is_bounded() {
                a.lo >= allowed.lo - tol && a.hi <= allowed.hi + tol && d.contains(a.lo) && d.contains(a.hi)
            } else {
                d.contains(a.lo) && d.contains(a.hi)
            };
            if !inside {
                return Err(Error::Domain {
                    axis: Some(i),
                    x: if d.contains(a.lo) { a.hi } else { a.lo },
                    lo: allowed.lo,
                    hi: allowed.hi,
                });
            }
        }
        if self.total_points() > self.cap {
            return Err(Error::Grid(format!(
                "{} points exceed the cap of {}",
                self.total_points(),
                self.cap
            )));
        }
        Ok(())
    }

    /// Grid points; lattice order has the last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let total = self.total_points();
        match self.mode {
            SamplingMode::Lattice => (0..total)
                .map(|mut idx| {
                    let mut x = vec![0.0; self.axes.len()];
                    for (k, a) in self.axes.iter().enumerate().rev() {
                        let j = idx % a.count;
                        idx /= a.count;
                        x[k] = a.lo + (a.hi - a.lo) * j as f64 / (a.count - 1) as f64;
                    }
                    x
                })
                .collect(),
            SamplingMode::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..total)
                    .map(|_| self.axes.iter().map(|a| rng.gen_range(a.lo..=a.hi)).collect())
                    .collect()
            }
        }
    }
}

/// Everything computed at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    pub x: Vec<f64>,
    pub w: f64,
    /// `S_0 ..= S_n` (closed form).
    pub s: Vec<f64>,
    /// `S_1 ..= S_n` from the eigen oracle.
    pub s_eigen: Vec<f64>,
}

/// Evaluate closed form and eigen oracle at every grid point.
pub fn evaluate_grid(g: &TranslationGraph, spec: &GridSpec) -> Result<Vec<PointSample>> {
    spec.validate(&g.domains())?;
    spec.points()
        .into_par_iter()
        .map(|x| {
            let f = frame_at(g, &x)?;
            let s_eigen = (1..=g.dim()).map(|r| s_r_oracle_eigen(&f, r)).collect::<Result<_>>()?;
            Ok(PointSample {
                w: f.w,
                s: f.s,
                s_eigen,
                x,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RStats {
    pub r: usize,
    pub max_abs: f64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub constant: bool,
    /// Mean of `S_r`; the asserted value when `constant` holds.
    pub value: f64,
    /// Largest scaled closed-vs-eigen discrepancy (see [`scaled_discrepancy`]).
    pub oracle_max_disc: f64,
    pub oracle_agrees: bool,
}

impl RStats {
    pub fn is_zero(&self, tols: &Tolerances) -> bool {
        self.max_abs <= tols.zero
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub graph: String,
    pub grid: GridSpec,
    pub points: usize,
    pub per_r: Vec<RStats>,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

impl VerificationReport {
    pub fn stats(&self, r: usize) -> Option<&RStats> {
        self.per_r.iter().find(|s| s.r == r)
    }
}

fn check_r_set(r_set: &[usize], n: usize) -> Result<()> {
    if r_set.is_empty() {
        return Err(Error::Parameter("empty r set".into()));
    }
    match r_set.iter().find(|&&r| r < 1 || r > n) {
        Some(&r) => Err(Error::Range {
            what: "r",
            value: r as i64,
            lo: 1,
            hi: n as i64,
        }),
        None => Ok(()),
    }
}

/// Sequential, order-fixed reduction of evaluated samples.
pub fn summarize(samples: &[PointSample], r: usize, tols: &Tolerances) -> RStats {
    let count = samples.len().max(1) as f64;
    let (mut sum, mut min, mut max, mut max_abs, mut disc) = (0.0, f64::INFINITY, f64::NEG_INFINITY, 0.0_f64, 0.0_f64);
    for p in samples {
        let v = p.s[r];
        sum += v;
        min = min.min(v);
        max = max.max(v);
        max_abs = max_abs.max(v.abs());
        disc = disc.max(scaled_discrepancy(v, p.s_eigen[r - 1], tols.oracle_rel, tols.oracle_abs));
    }
    let mean = sum / count;
    let var = samples.iter().map(|p| (p.s[r] - mean).powi(2)).sum::<f64>() / count;
    if samples.is_empty() {
        (min, max) = (0.0, 0.0);
    }
    let constant = max - min <= tols.constant * max_abs.max(1.0);
    RStats {
        r,
        max_abs,
        mean,
        std: var.sqrt(),
        min,
        max,
        constant,
        value: mean,
        oracle_max_disc: disc,
        oracle_agrees: disc <= tols.oracle_rel,
    }
}

pub fn scan(g: &TranslationGraph, spec: &GridSpec, r_set: &[usize], tols: &Tolerances) -> Result<VerificationReport> {
    check_r_set(r_set, g.dim())?;
    let samples = evaluate_grid(g, spec)?;
    Ok(report_from_samples(g, spec, &samples, r_set, tols))
}

pub fn report_from_samples(
    g: &TranslationGraph,
    spec: &GridSpec,
    samples: &[PointSample],
    r_set: &[usize],
    tols: &Tolerances,
) -> VerificationReport {
    VerificationReport {
        graph: g.describe(),
        grid: spec.clone(),
        points: samples.len(),
        per_r: r_set.iter().map(|&r| summarize(samples, r, tols)).collect(),
        tolerances: *tols,
        seed: match spec.mode {
            SamplingMode::Random { seed } => Some(seed),
            SamplingMode::Lattice => None,
        },
    }
}

/// Evidence attached to a constant-nonzero finding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub stats: RStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Theorem2Verdict {
    ConstantZero,
    /// A constant but nonzero `S_r` with `2 < r < n` would contradict the
    /// classification; reported as a numerical anomaly.
    ConstantNonzero { witness: Box<Witness> },
    Nonconstant,
}

pub fn theorem2_witness_scan(
    g: &TranslationGraph,
    spec: &GridSpec,
    r: usize,
    tols: &Tolerances,
) -> Result<Theorem2Verdict> {
    let n = g.dim();
    if !(2 < r && r < n) {
        return Err(Error::Parameter(format!("constancy scan needs 2 < r < n, got n={n}, r={r}")));
    }
    let report = scan(g, spec, &[r], tols)?;
    let stats = report.per_r[0].clone();
    Ok(if !stats.constant {
        Theorem2Verdict::Nonconstant
    } else if stats.is_zero(tols) {
        Theorem2Verdict::ConstantZero
    } else {
        Theorem2Verdict::ConstantNonzero {
            witness: Box::new(Witness {
                grid: spec.clone(),
                tolerances: *tols,
                stats,
            }),
        }
    })
}

/// Finite-difference vs closed-form comparison at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    /// Left side (mixed partial derivative).
    pub lhs: f64,
    /// Right side (closed form).
    pub rhs: f64,
    pub abs_error: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1)`.
    pub rel_error: f64,
    pub passed: bool,
}

impl IdentityReport {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_error = (lhs - rhs).abs();
        let rel_error = abs_error / lhs.abs().max(rhs.abs()).max(1.0);
        Self {
            lhs,
            rhs,
            abs_error,
            rel_error,
            passed: rel_error <= tol,
        }
    }
}

fn check_indices(indices: &[usize], n: usize) -> Result<()> {
    for (k, &i) in indices.iter().enumerate() {
        if i >= n {
            return Err(Error::range("index", i, 0, n - 1));
        }
        if indices[..k].contains(&i) {
            return Err(Error::Parameter(format!("indices {indices:?} are not distinct")));
        }
    }
    Ok(())
}

/// Relative steps `step * max(1, |x_i|)` along `axes`, after checking the
/// stencil stays inside every touched domain.
fn stencil_steps(g: &TranslationGraph, x: &[f64], axes: &[usize], step: f64) -> Result<Vec<f64>> {
    axes.iter()
        .map(|&i| {
            let h = step * x[i].abs().max(1.0);
            let d = g.profiles()[i].domain();
            let reach = REACH * h;
            if d.contains(x[i] - reach) && d.contains(x[i] + reach) {
                Ok(h)
            } else {
                Err(Error::Stencil {
                    x: x[i],
                    h: reach,
                    lo: d.lo,
                    hi: d.hi,
                })
            }
        })
        .collect()
}

/// Default relative step for [`w_derivative_identity_check`].
pub const W_IDENTITY_STEP: f64 = 1e-4;

/// `∂^m W^{r+2} / ∂x_{i_1} ... ∂x_{i_m} = Π_{j=1}^m (r + 4 - 2j) Π_k f'_{i_k} f''_{i_k} W^{r+2-2m}`
/// for distinct indices and `m` in `{1, 2}`.
pub fn w_derivative_identity_check(
    g: &TranslationGraph,
    x: &[f64],
    r: usize,
    indices: &[usize],
    tol: f64,
) -> Result<IdentityReport> {
    w_derivative_identity_check_with_step(g, x, r, indices, tol, W_IDENTITY_STEP)
}

pub fn w_derivative_identity_check_with_step(
    g: &TranslationGraph,
    x: &[f64],
    r: usize,
    indices: &[usize],
    tol: f64,
    step: f64,
) -> Result<IdentityReport> {
    let m = indices.len();
    if !(1..=2).contains(&m) {
        return Err(Error::Unsupported(format!("W-derivative identity checked for m in {{1, 2}}, got m={m}")));
    }
    if r < 1 {
        return Err(Error::range("r", r, 1, usize::MAX));
    }
    let n = g.dim();
    check_indices(indices, n)?;
    let jets = g.jets(x)?;
    let steps = stencil_steps(g, x, indices, step)?;

    let power = (r + 2) as f64 / 2.0;
    let base = 1.0 + jets.iter().map(|j| j[1] * j[1]).sum::<f64>();
    let profiles = g.profiles();
    // f_i'(x_i + δ)^2 - f_i'(x_i)^2, factored to avoid squaring first.
    let dq = |i: usize, xi: f64| {
        let d = profiles[i].eval(xi, 1).unwrap_or(f64::NAN);
        (d - jets[i][1]) * (d + jets[i][1])
    };
    // (1 + t)^p - 1 without cancellation.
    let rise = |t: f64| (power * t.ln_1p()).exp_m1();
    // Only the indexed coordinates move, so W^{r+2}(y) = (base + Σ dq)^p. The
    // stencil weights sum to zero, which lets the stencil see increments
    // instead of raw values: for m = 1 it differentiates W^{r+2}(y) - W^{r+2}(x),
    // for m = 2 the double difference
    //   (b + a1 + a2)^p - (b + a1)^p - (b + a2)^p + b^p,
    // whose mixed partial is that of W^{r+2}. Rounding then scales with the
    // increments rather than with W^{r+2} itself.
    let scale = base.powf(power);
    let w_pow = |p: &[f64]| match indices {
        [i] => scale * rise(dq(*i, p[*i]) / base),
        [i, j] => {
            let a = dq(*i, p[*i]) / base;
            let b = dq(*j, p[*j]) / base;
            scale * ((1.0 + a).powf(power) * rise(b / (1.0 + a)) - rise(b))
        }
        _ => unreachable!("m checked above"),
    };
    let lhs = mixed_partial(w_pow, x, indices, &steps);

    let w = base.sqrt();
    let prefactor: f64 = (1..=m).map(|j| (r + 4) as f64 - 2.0 * j as f64).product();
    let rhs = prefactor * indices.iter().map(|&i| jets[i][1] * jets[i][2]).product::<f64>() * w.powi(r as i32 + 2 - 2 * m as i32);
    Ok(IdentityReport::new(lhs, rhs, tol))
}

/// How the left side of the `G_r` identity is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum DerivativeRoute {
    /// Tensor sixth-order stencil with relative step `step`; `r <= 3` only.
    FiniteDifference { step: f64 },
    /// Term-by-term differentiation of the defining subset sum.
    Analytic,
}

/// Default relative step for the `G_r` stencil. With polynomial profiles of
/// degree <= 4, `G_r` has degree <= 6 in each variable and the stencil is
/// exact, so a wide step only limits rounding.
pub const GR_IDENTITY_STEP: f64 = 0.1;

/// Largest `r` for which the nested stencil is used.
pub const GR_MAX_FD_RANK: usize = 3;

/// `∂^{r+1} G_r / ∂x_{l_1} ... ∂x_{l_{r+1}} = 2 Σ_k f'_{l_k} f''_{l_k} Π_{m≠k} f'''_{l_m}`
/// where `G_r = W^{r+2} S_r`.
pub fn gr_derivative_identity_check(
    g: &TranslationGraph,
    x: &[f64],
    r: usize,
    indices: &[usize],
    tol: f64,
    route: DerivativeRoute,
) -> Result<IdentityReport> {
    let n = g.dim();
    if r < 1 || r > n {
        return Err(Error::range("r", r, 1, n));
    }
    if indices.len() != r + 1 {
        return Err(Error::Parameter(format!("need r + 1 = {} indices, got {}", r + 1, indices.len())));
    }
    check_indices(indices, n)?;
    let jets = g.jets(x)?;

    let lhs = match route {
        DerivativeRoute::FiniteDifference { step } => {
            if r > GR_MAX_FD_RANK {
                return Err(Error::Unsupported(format!(
                    "finite-difference G_r check limited to r <= {GR_MAX_FD_RANK}, got r={r}; use the analytic route"
                )));
            }
            let steps = stencil_steps(g, x, indices, step)?;
            let profiles = g.profiles();
            let g_r_at = |p: &[f64]| {
                let (grad, hess): (Vec<f64>, Vec<f64>) = profiles
                    .iter()
                    .zip(p)
                    .map(|(pr, &xi)| (pr.eval(xi, 1).unwrap_or(f64::NAN), pr.eval(xi, 2).unwrap_or(f64::NAN)))
                    .unzip();
                curvature_polynomials(&grad, &hess)[r]
            };
            mixed_partial(g_r_at, x, indices, &steps)
        }
        DerivativeRoute::Analytic => analytic_mixed_g_r(&jets, r, indices)?,
    };

    let rhs = 2.0
        * indices
            .iter()
            .enumerate()
            .map(|(k, &lk)| {
                jets[lk][1]
                    * jets[lk][2]
                    * indices
                        .iter()
                        .enumerate()
                        .filter(|&(m, _)| m != k)
                        .map(|(_, &lm)| jets[lm][3])
                        .product::<f64>()
            })
            .sum::<f64>();
    Ok(IdentityReport::new(lhs, rhs, tol))
}

/// Largest dimension for the subset enumeration in the analytic route.
const ANALYTIC_MAX_DIM: usize = 20;

/// Mixed partial of `G_r` over distinct `axes`, differentiating each term
/// `Π_{i∈I} f_i''` and `Π_{i∈I} f_i'' · f_m'^2` of the defining sum as a
/// product of single-variable factors.
fn analytic_mixed_g_r(jets: &[[f64; 4]], r: usize, axes: &[usize]) -> Result<f64> {
    let n = jets.len();
    if n > ANALYTIC_MAX_DIM {
        return Err(Error::Unsupported(format!("analytic route enumerates subsets; n={n} is too large")));
    }
    let in_axes = |i: usize| axes.contains(&i);
    let hess_factor = |i: usize| if in_axes(i) { jets[i][3] } else { jets[i][2] };
    let grad_sq_factor = |m: usize| {
        if in_axes(m) {
            2.0 * jets[m][1] * jets[m][2]
        } else {
            jets[m][1] * jets[m][1]
        }
    };
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let member = |i: usize| mask & (1 << i) != 0;
        let hess_part: f64 = (0..n).filter(|&i| member(i)).map(hess_factor).product();
        // The "1" term depends only on the variables in I.
        if axes.iter().all(|&l| member(l)) {
            total += hess_part;
        }
        for m in (0..n).filter(|&m| !member(m)) {
            if axes.iter().all(|&l| member(l) || l == m) {
                total += hess_part * grad_sq_factor(m);
            }
        }
    }
    Ok(total)
}

/// Seeded random profiles for negative controls and oracle sweeps.
pub mod random {
    use super::*;

    /// Polynomial of degree <= `max_degree` with coefficients in `[-2, 2]`.
    pub fn polynomial_profile<R: Rng>(rng: &mut R, max_degree: usize) -> Profile {
        Profile::polynomial((0..=max_degree).map(|_| rng.gen_range(-2.0..=2.0)).collect())
    }

    /// `n` polynomial profiles of degree <= 4 with coefficients in `[-2, 2]`.
    pub fn polynomial_graph(n: usize, seed: u64) -> Result<TranslationGraph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TranslationGraph::new((0..n).map(|_| polynomial_profile(&mut rng, 4)).collect())
    }

    /// Log-cos profile with slope magnitude in `[0.3, 2]`, `β` in
    /// `[0.5, 3]` and phase in `[-1, 1]`.
    pub fn logcos_profile<R: Rng>(rng: &mut R) -> Profile {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let slope = sign * rng.gen_range(0.3..=2.0);
        let beta = rng.gen_range(0.5..=3.0);
        let phase = rng.gen_range(-1.0..=1.0);
        let offset = rng.gen_range(-1.0..=1.0);
        Profile::logcos(slope, beta, phase, offset).expect("parameters drawn inside the valid ranges")
    }

    /// Even mix of polynomial (degree <= 4) and log-cos profiles.
    pub fn mixed_graph<R: Rng>(rng: &mut R, n: usize) -> Result<TranslationGraph> {
        TranslationGraph::new(
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        polynomial_profile(rng, 4)
                    } else {
                        logcos_profile(rng)
                    }
                })
                .collect(),
        )
    }

    /// Uniform point in each domain inset by `inset`, with unbounded domains
    /// replaced by `unbounded`.
    pub fn point_in<R: Rng>(rng: &mut R, domains: &[Interval], inset: f64, unbounded: Interval) -> Vec<f64> {
        domains
            .iter()
            .map(|d| {
                let span = if d.is_bounded() { *d } else { d.intersect(&unbounded).unwrap_or(unbounded) };
                let s = span.inset(inset);
                rng.gen_range(s.lo..=s.hi)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_enneper, EnneperParams};

    fn enneper43() -> TranslationGraph {
        make_enneper(&EnneperParams {
            n: 4,
            r: 3,
            linear: vec![],
            slopes: vec![1.0, 1.0, 1.0],
            phases: vec![0.0; 4],
            offset: 0.0,
        })
        .unwrap()
    }

    fn random_grid(g: &TranslationGraph, count: usize, seed: u64) -> GridSpec {
        GridSpec::for_domains(
            &g.domains(),
            count,
            0.05,
            Interval::new(-1.0, 1.0).unwrap(),
            SamplingMode::Random { seed },
        )
        .unwrap()
    }

    #[test]
    fn enneper_scan_is_constant_zero() {
        let g = enneper43();
        let spec = random_grid(&g, 6, 1);
        let tols = Tolerances::default();
        let rep = scan(&g, &spec, &[1, 2, 3, 4], &tols).unwrap();
        assert_eq!(rep.points, 6usize.pow(4));
        let s3 = rep.stats(3).unwrap();
        assert!(s3.max_abs <= 1e-8 && s3.constant && s3.oracle_agrees, "{s3:?}");
        assert_eq!(theorem2_witness_scan(&g, &spec, 3, &tols).unwrap(), Theorem2Verdict::ConstantZero);
    }

    #[test]
    fn flat_scan_is_exactly_zero() {
        let g = TranslationGraph::new(vec![Profile::linear(1.0, 0.0), Profile::linear(-0.5, 2.0), Profile::linear(0.0, 0.0)])
            .unwrap();
        let spec = GridSpec::for_domains(&g.domains(), 3, 0.0, Interval::new(-1.0, 1.0).unwrap(), SamplingMode::Lattice)
            .unwrap();
        let rep = scan(&g, &spec, &[1, 2, 3], &Tolerances::default()).unwrap();
        for s in &rep.per_r {
            assert_eq!((s.max_abs, s.mean, s.std, s.min, s.max, s.value), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
            assert!(s.constant);
        }
    }

    #[test]
    fn quadratic_graph_is_nonconstant() {
        let p = Profile::polynomial(vec![0.0, 0.0, 0.5]);
        let g = TranslationGraph::new(vec![p.clone(), p.clone(), p.clone(), p]).unwrap();
        let spec = random_grid(&g, 4, 3);
        let tols = Tolerances::default();
        assert_eq!(theorem2_witness_scan(&g, &spec, 3, &tols).unwrap(), Theorem2Verdict::Nonconstant);
        assert!(theorem2_witness_scan(&g, &spec, 2, &tols).is_err());
    }

    #[test]
    fn lattice_order_and_count() {
        let spec = GridSpec {
            axes: vec![AxisSpec { lo: 0.0, hi: 1.0, count: 2 }, AxisSpec { lo: -1.0, hi: 1.0, count: 3 }],
            mode: SamplingMode::Lattice,
            inset: 0.0,
            cap: 10,
        };
        let pts = spec.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, -1.0]);
        assert_eq!(pts[1], vec![0.0, 0.0]);
        assert_eq!(pts[5], vec![1.0, 1.0]);
    }

    #[test]
    fn grid_validation() {
        let g = enneper43();
        let mut spec = random_grid(&g, 3, 0);
        assert!(spec.validate(&g.domains()).is_ok());
        spec.axes[2].hi = 2.0;
        assert!(matches!(spec.validate(&g.domains()), Err(Error::Domain { axis: Some(2), .. })));
        let mut spec = random_grid(&g, 3, 0);
        spec.axes[0].count = 1;
        assert!(matches!(spec.validate(&g.domains()), Err(Error::Grid(_))));
        let mut spec = random_grid(&g, 3, 0);
        spec.cap = 10;
        assert!(matches!(spec.validate(&g.domains()), Err(Error::Grid(_))));
    }

    #[test]
    fn w_identity() {
        let g = TranslationGraph::new(vec![
            Profile::polynomial(vec![0.1, 0.5, -0.3, 0.2]),
            Profile::logcos(0.8, 1.5, 0.1, 0.0).unwrap(),
            Profile::polynomial(vec![0.0, -1.0, 0.4]),
        ])
        .unwrap();
        let x = [0.3, -0.2, 0.6];
        for r in 1..=3 {
            let rep = w_derivative_identity_check(&g, &x, r, &[1], 1e-6).unwrap();
            assert!(rep.passed, "{rep:?}");
            let rep = w_derivative_identity_check(&g, &x, r, &[0, 2], 1e-5).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
        assert!(w_derivative_identity_check(&g, &x, 3, &[0, 1, 2], 1e-5).is_err());
        assert!(w_derivative_identity_check(&g, &x, 3, &[1, 1], 1e-5).is_err());
    }

    #[test]
    fn w_identity_flat() {
        let g = TranslationGraph::new(vec![Profile::linear(1.0, 0.0), Profile::linear(2.0, 0.0)]).unwrap();
        let rep = w_derivative_identity_check(&g, &[0.5, 0.5], 3, &[0, 1], 1e-6).unwrap();
        assert_eq!(rep.rhs, 0.0);
        assert!(rep.lhs.abs() < 1e-6 && rep.passed);
    }

    #[test]
    fn gr_identity_routes_agree() {
        let g = TranslationGraph::new(vec![
            Profile::polynomial(vec![0.0, 0.3, -0.5, 0.2, 0.1]),
            Profile::polynomial(vec![1.0, -0.2, 0.4, -0.3, 0.05]),
            Profile::polynomial(vec![0.0, 0.1, 0.7, 0.1, -0.2]),
            Profile::polynomial(vec![0.0, 0.0, -0.6, 0.5, 0.3]),
        ])
        .unwrap();
        let x = [0.4, -0.3, 0.2, 0.7];
        let fd = gr_derivative_identity_check(&g, &x, 3, &[0, 1, 2, 3], 1e-4, DerivativeRoute::FiniteDifference {
            step: GR_IDENTITY_STEP,
        })
        .unwrap();
        assert!(fd.passed, "{fd:?}");
        let an = gr_derivative_identity_check(&g, &x, 3, &[0, 1, 2, 3], 1e-12, DerivativeRoute::Analytic).unwrap();
        assert!(an.passed, "{an:?}");
        for r in 1..=2 {
            let idx: Vec<usize> = (0..=r).collect();
            let fd = gr_derivative_identity_check(&g, &x, r, &idx, 1e-6, DerivativeRoute::FiniteDifference {
                step: GR_IDENTITY_STEP,
            })
            .unwrap();
            assert!(fd.passed, "r={r} {fd:?}");
        }
    }

    #[test]
    fn gr_identity_rank_limit() {
        let p = Profile::polynomial(vec![0.0, 0.2, 0.5, 0.1]);
        let g = TranslationGraph::new(vec![p.clone(); 6]).unwrap();
        let x = [0.1; 6];
        let idx = [0, 1, 2, 3, 4];
        let err = gr_derivative_identity_check(&g, &x, 4, &idx, 1e-4, DerivativeRoute::FiniteDifference { step: 0.1 });
        assert!(matches!(err, Err(Error::Unsupported(_))));
        let an = gr_derivative_identity_check(&g, &x, 4, &idx, 1e-12, DerivativeRoute::Analytic).unwrap();
        assert!(an.passed, "{an:?}");
    }

    #[test]
    fn stencil_must_fit_domain() {
        let g = TranslationGraph::new(vec![Profile::logcos(1.0, 1.0, 0.0, 0.0).unwrap(), Profile::linear(0.0, 0.0)]).unwrap();
        let err = w_derivative_identity_check_with_step(&g, &[1.5, 0.0], 1, &[0], 1e-6, 0.05);
        assert!(matches!(err, Err(Error::Stencil { .. })));
    }

    #[test]
    fn scaled_discrepancy_floor() {
        assert!(scaled_discrepancy(1e-12, 5e-11, 1e-8, 1e-10) <= 1e-8);
        assert!(scaled_discrepancy(1.0, 1.0 + 1e-9, 1e-8, 1e-10) <= 1e-8);
        assert!(scaled_discrepancy(1.0, 1.0 + 1e-7, 1e-8, 1e-10) > 1e-8);
    }
}
