//! Fixed-step RK4 integration of `f' = v`, `v' = a (β + v^2)` compared with
//! the closed-form log-cos profile `f = -(1/a) ln cos(a √β x + b)`,
//! `v = √β tan(a √β x + b)`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum distance of `|a √β x + b|` from `π/2` over an admissible span.
pub const MIN_MARGIN: f64 = 0.05;

/// `|v|` above which integration is declared singular.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeRun {
    pub slope: f64,
    pub beta: f64,
    pub phase: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub f: f64,
    pub v: f64,
}

impl OdeRun {
    pub fn new(slope: f64, beta: f64, phase: f64, x_lo: f64, x_hi: f64, step: f64) -> Result<Self> {
        if !(slope != 0.0 && slope.is_finite()) {
            return Err(Error::Parameter(format!("slope must be finite and nonzero, got {slope}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Parameter(format!("step must be positive, got {step}")));
        }
        if !(x_lo <= x_hi) || !phase.is_finite() || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::Parameter(format!("invalid span [{x_lo}, {x_hi}]")));
        }
        let run = Self {
            slope,
            beta,
            phase,
            x_lo,
            x_hi,
            step,
        };
        let worst = run.argument(x_lo).abs().max(run.argument(x_hi).abs());
        // slack for spans produced by `inset_span`, which sit on the margin
        if worst > FRAC_PI_2 - MIN_MARGIN + 1e-12 {
            return Err(Error::Parameter(format!(
                "span [{x_lo}, {x_hi}] comes within {:.3e} of a cosine zero (margin {MIN_MARGIN})",
                FRAC_PI_2 - worst
            )));
        }
        Ok(run)
    }

    /// The widest span with the required margin, as `[lo, hi]`.
    pub fn admissible_span(slope: f64, beta: f64, phase: f64) -> (f64, f64) {
        Self::inset_span(slope, beta, phase, 0.0)
    }

    /// The closed-form domain shrunk by `x_inset` at each end (in `x`), or by
    /// more if needed to keep the margin of [`MIN_MARGIN`] in the argument.
    pub fn inset_span(slope: f64, beta: f64, phase: f64, x_inset: f64) -> (f64, f64) {
        let k = slope * beta.sqrt();
        let margin = MIN_MARGIN.max(x_inset * k.abs());
        let a = (-(FRAC_PI_2 - margin) - phase) / k;
        let b = ((FRAC_PI_2 - margin) - phase) / k;
        (a.min(b), a.max(b))
    }

    /// `a √β x + b`.
    pub fn argument(&self, x: f64) -> f64 {
        self.slope * self.beta.sqrt() * x + self.phase
    }

    pub fn exact(&self, x: f64) -> TrajectoryPoint {
        let u = self.argument(x);
        TrajectoryPoint {
            x,
            f: -u.cos().ln() / self.slope,
            v: self.beta.sqrt() * u.tan(),
        }
    }

    pub fn steps(&self) -> usize {
        ((self.x_hi - self.x_lo) / self.step).round() as usize
    }
}

/// RK4 from the closed-form state at `x_lo` to `x_hi`. The step is adjusted
/// to `(x_hi - x_lo) / N` with `N = round((x_hi - x_lo) / h)`.
pub fn integrate(run: &OdeRun) -> Result<Vec<TrajectoryPoint>> {
    let start = run.exact(run.x_lo);
    integrate_system(run.slope, run.beta, start, run.x_hi, run.steps())
}

/// RK4 for `f' = v`, `v' = a (β + v^2)` in `steps` equal steps from `start`
/// to `x_end`, returning every state including the initial one.
pub fn integrate_system(
    slope: f64,
    beta: f64,
    start: TrajectoryPoint,
    x_end: f64,
    steps: usize,
) -> Result<Vec<TrajectoryPoint>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start);
    if steps == 0 {
        return Ok(out);
    }
    let h = (x_end - start.x) / steps as f64;
    let accel = |v: f64| slope * (beta + v * v);
    let (mut f, mut v) = (start.f, start.v);
    for i in 1..=steps {
        let k1f = v;
        let k1v = accel(v);
        let k2f = v + 0.5 * h * k1v;
        let k2v = accel(k2f);
        let k3f = v + 0.5 * h * k2v;
        let k3v = accel(k3f);
        let k4f = v + h * k3v;
        let k4v = accel(k4f);
        f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let x = start.x + i as f64 * h;
        if !(v.abs() <= BLOWUP) {
            return Err(Error::Singularity { x, v: v.abs() });
        }
        out.push(TrajectoryPoint { x, f, v });
    }
    Ok(out)
}

/// `max |f - f_exact|` and `max |v - v_exact|` along a trajectory.
pub fn sup_error(run: &OdeRun, trajectory: &[TrajectoryPoint]) -> (f64, f64) {
    trajectory.iter().fold((0.0_f64, 0.0_f64), |(ef, ev), p| {
        let e = run.exact(p.x);
        (ef.max((p.f - e.f).abs()), ev.max((p.v - e.v).abs()))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstIntegralReport {
    /// `b`, the value the invariant should take.
    pub expected: f64,
    /// `max |arctan(v/√β) - a √β x - b|`.
    pub max_deviation: f64,
    pub passed: bool,
}

/// Checks that `arctan(v / √β) - a √β x` stays at `b` along `trajectory`,
/// using the slope, beta and phase of `run`.
pub fn arctan_first_integral_check(run: &OdeRun, trajectory: &[TrajectoryPoint], tol: f64) -> FirstIntegralReport {
    let sb = run.beta.sqrt();
    let max_deviation = trajectory
        .iter()
        .map(|p| ((p.v / sb).atan() - run.slope * sb * p.x - run.phase).abs())
        .fold(0.0, f64::max);
    FirstIntegralReport {
        expected: run.phase,
        max_deviation,
        passed: max_deviation <= tol,
    }
}

/// Sup-errors at `h, h/2, ..., h/2^halvings` and the successive ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub factors: Vec<f64>,
}

/// Sup-error of `f` and `v` combined, at successively halved steps.
pub fn convergence_study(run: &OdeRun, halvings: usize) -> Result<ConvergenceReport> {
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for k in 0..=halvings {
        let r = OdeRun {
            step: run.step / f64::powi(2.0, k as i32),
            ..*run
        };
        let traj = integrate(&r)?;
        let (ef, ev) = sup_error(&r, &traj);
        steps.push(r.step);
        errors.push(ef.max(ev));
    }
    let factors = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(ConvergenceReport { steps, errors, factors })
}
