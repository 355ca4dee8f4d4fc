//! Single-variable profile curves `f_i` of a translation graph.
//!
//! Every profile carries analytic derivatives up to third order and an open
//! domain interval on which those derivatives are finite.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest derivative order a profile provides.
pub const MAX_ORDER: usize = 3;

/// An open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::Parameter(format!("empty or invalid interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Shrink a bounded interval by `fraction` of its length at each end.
    /// Unbounded ends are left as they are.
    pub fn inset(&self, fraction: f64) -> Interval {
        if !self.is_bounded() {
            return *self;
        }
        let d = fraction * self.len();
        Interval {
            lo: self.lo + d,
            hi: self.hi - d,
        }
    }

    /// Intersection with `other`, `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied value and derivatives of orders 0..=3.
#[derive(Clone)]
pub struct CustomFns {
    pub name: String,
    pub derivs: [Evaluator; 4],
}

impl fmt::Debug for CustomFns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFns").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// `a x + c`.
    Linear { slope: f64, offset: f64 },
    /// `Σ c_k x^k`, coefficients in ascending degree.
    Polynomial(Vec<f64>),
    /// `-(1/a) ln cos(a √β x + b) + c`, on the branch where the cosine is
    /// positive. Its derivative is `√β tan(a √β x + b)`, so
    /// `f'' / (β + f'^2) = a` identically.
    LogCos {
        slope: f64,
        beta: f64,
        phase: f64,
        offset: f64,
    },
    Custom(CustomFns),
}

#[derive(Debug, Clone)]
pub struct Profile {
    kind: ProfileKind,
    domain: Interval,
}

impl Profile {
    pub fn linear(slope: f64, offset: f64) -> Self {
        Self {
            kind: ProfileKind::Linear { slope, offset },
            domain: Interval::REAL_LINE,
        }
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        Self {
            kind: ProfileKind::Polynomial(coefficients),
            domain: Interval::REAL_LINE,
        }
    }

    /// Log-cos profile on its maximal branch `|a √β x + b| < π/2`.
    pub fn logcos(slope: f64, beta: f64, phase: f64, offset: f64) -> Result<Self> {
        let domain = logcos_domain(slope, beta, phase)?;
        if !offset.is_finite() {
            return Err(Error::Parameter(format!("offset must be finite, got {offset}")));
        }
        Ok(Self {
            kind: ProfileKind::LogCos {
                slope,
                beta,
                phase,
                offset,
            },
            domain,
        })
    }

    /// A profile from four evaluators for orders 0..=3 on an explicit domain.
    pub fn custom(name: impl Into<String>, derivs: [Evaluator; 4], domain: Interval) -> Self {
        Self {
            kind: ProfileKind::Custom(CustomFns {
                name: name.into(),
                derivs,
            }),
            domain,
        }
    }

    /// Restrict the profile to `domain`, which must lie inside the current one.
    pub fn restricted(mut self, domain: Interval) -> Result<Self> {
        if !domain.is_subset_of(&self.domain) {
            return Err(Error::Parameter(format!(
                "restriction {domain} is not inside the profile domain {}",
                self.domain
            )));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Human-readable one-line description.
    pub fn describe(&self) -> String {
        let body = match &self.kind {
            ProfileKind::Linear { slope, offset } => format!("linear(slope={slope}, offset={offset})"),
            ProfileKind::Polynomial(c) => format!("polynomial({c:?})"),
            ProfileKind::LogCos {
                slope,
                beta,
                phase,
                offset,
            } => format!("logcos(slope={slope}, beta={beta}, phase={phase}, offset={offset})"),
            ProfileKind::Custom(c) => format!("custom({})", c.name),
        };
        format!("{body} on {}", self.domain)
    }

    /// `f^{(order)}(x)` for `order` in `0..=3`.
    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        if order > MAX_ORDER {
            return Err(Error::range("derivative order", order, 0, MAX_ORDER));
        }
        if !self.domain.contains(x) {
            return Err(Error::Domain {
                axis: None,
                x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(self.eval_unchecked(x, order))
    }

    /// `[f, f', f'', f''']` at `x`.
    pub fn derivatives(&self, x: f64) -> Result<[f64; 4]> {
        self.eval(x, 0)?;
        Ok(std::array::from_fn(|k| self.eval_unchecked(x, k)))
    }

    fn eval_unchecked(&self, x: f64, order: usize) -> f64 {
        match &self.kind {
            ProfileKind::Linear { slope, offset } => match order {
                0 => slope * x + offset,
                1 => *slope,
                _ => 0.0,
            },
            ProfileKind::Polynomial(c) => poly_derivative(c, x, order),
            ProfileKind::LogCos {
                slope,
                beta,
                phase,
                offset,
            } => {
                let sb = beta.sqrt();
                let u = slope * sb * x + phase;
                let sec2 = 1.0 / (u.cos() * u.cos());
                match order {
                    0 => -u.cos().ln() / slope + offset,
                    1 => sb * u.tan(),
                    2 => slope * beta * sec2,
                    _ => 2.0 * slope * slope * beta * sb * sec2 * u.tan(),
                }
            }
            ProfileKind::Custom(c) => (c.derivs[order])(x),
        }
    }
}

/// `{ x : |a √β x + b| < π/2 }`.
pub fn logcos_domain(slope: f64, beta: f64, phase: f64) -> Result<Interval> {
    if !(slope != 0.0 && slope.is_finite()) {
        return Err(Error::Parameter(format!("log-cos slope must be finite and nonzero, got {slope}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!("log-cos beta must be positive, got {beta}")));
    }
    if !phase.is_finite() {
        return Err(Error::Parameter(format!("log-cos phase must be finite, got {phase}")));
    }
    let k = slope * beta.sqrt();
    let a = (-FRAC_PI_2 - phase) / k;
    let b = (FRAC_PI_2 - phase) / k;
    Interval::new(a.min(b), a.max(b))
}

pub fn logcos_from_slope(a: f64, beta: f64, b: f64, c: f64) -> Result<Profile> {
    Profile::logcos(a, beta, b, c)
}

/// Horner evaluation of the `order`-th derivative of `Σ c_k x^k`.
fn poly_derivative(c: &[f64], x: f64, order: usize) -> f64 {
    if c.len() <= order {
        return 0.0;
    }
    let mut acc = 0.0;
    for k in (order..c.len()).rev() {
        let falling = ((k - order + 1)..=k).fold(1.0, |p, j| p * j as f64);
        acc = acc * x + falling * c[k];
    }
    acc
}

/// Largest relative mismatch between finite differences of order `k - 1`
/// and the analytic order `k`, for `k = 1, 2, 3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub samples: usize,
    /// Indexed by `order - 1`.
    pub max_rel_error: [f64; 3],
    pub passed: bool,
}

impl ConsistencyReport {
    pub fn worst(&self) -> f64 {
        self.max_rel_error.iter().copied().fold(0.0, f64::max)
    }
}

/// Default span used when a profile's domain is unbounded.
const UNBOUNDED_SPAN: Interval = Interval { lo: -2.0, hi: 2.0 };

/// Derivative consistency on the domain inset by 5% (or on `[-2, 2]` for
/// unbounded sides).
pub fn derivative_consistency(p: &Profile, samples: usize, tol: f64) -> Result<ConsistencyReport> {
    let dom = p.domain();
    let base = if dom.is_bounded() {
        dom
    } else {
        dom.intersect(&UNBOUNDED_SPAN)
            .ok_or_else(|| Error::Parameter(format!("no default sampling span inside {dom}")))?
    };
    let span = base.inset(0.05);
    derivative_consistency_on(p, span, samples, tol)
}

/// Central differences with `h = max(1e-5, 1e-5 |x|)` at `samples` evenly
/// spaced points of `span` (endpoints included when `samples > 1`).
pub fn derivative_consistency_on(
    p: &Profile,
    span: Interval,
    samples: usize,
    tol: f64,
) -> Result<ConsistencyReport> {
    if samples == 0 {
        return Err(Error::Parameter("derivative consistency needs at least one sample".into()));
    }
    if !span.is_bounded() {
        return Err(Error::Parameter(format!("sampling span {span} must be bounded")));
    }
    let dom = p.domain();
    let mut worst = [0.0_f64; 3];
    for i in 0..samples {
        let x = if samples == 1 {
            span.midpoint()
        } else {
            span.lo + span.len() * i as f64 / (samples - 1) as f64
        };
        let h = (1e-5 * x.abs()).max(1e-5);
        if !(dom.contains(x - h) && dom.contains(x + h)) {
            return Err(Error::Stencil {
                x,
                h,
                lo: dom.lo,
                hi: dom.hi,
            });
        }
        for k in 1..=MAX_ORDER {
            let fd = (p.eval(x + h, k - 1)? - p.eval(x - h, k - 1)?) / (2.0 * h);
            let exact = p.eval(x, k)?;
            let err = (fd - exact).abs() / exact.abs().max(1.0);
            worst[k - 1] = worst[k - 1].max(err);
        }
    }
    Ok(ConsistencyReport {
        samples,
        max_rel_error: worst,
        passed: worst.iter().all(|&e| e <= tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_eval() {
        let p = Profile::linear(3.0, 1.0);
        assert_eq!(p.eval(5.0, 0).unwrap(), 16.0);
        assert_eq!(p.eval(5.0, 1).unwrap(), 3.0);
        assert_eq!(p.eval(5.0, 2).unwrap(), 0.0);
        assert_eq!(p.eval(5.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn order_out_of_range() {
        let p = Profile::linear(3.0, 1.0);
        assert!(matches!(p.eval(0.0, 4), Err(Error::Range { value: 4, .. })));
    }

    #[test]
    fn logcos_eval() {
        let p = logcos_from_slope(1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(p.eval(0.0, 0).unwrap(), 0.0);
        assert_eq!(p.eval(0.5, 1).unwrap(), 0.5_f64.tan());
        assert!((p.eval(0.5, 0).unwrap() + 0.5_f64.cos().ln()).abs() < 1e-16);
    }

    #[test]
    fn logcos_outside_domain() {
        let p = logcos_from_slope(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(p.eval(2.0, 0), Err(Error::Domain { .. })));
        assert!(p.eval(PI / 2.0, 1).is_err());
    }

    #[test]
    fn logcos_domains() {
        let d = logcos_from_slope(1.0, 1.0, 0.0, 0.0).unwrap().domain();
        assert!((d.lo + PI / 2.0).abs() < 1e-15 && (d.hi - PI / 2.0).abs() < 1e-15);
        let d = logcos_from_slope(2.0, 4.0, 0.0, 0.0).unwrap().domain();
        assert!((d.lo + PI / 8.0).abs() < 1e-15 && (d.hi - PI / 8.0).abs() < 1e-15);
        let d = logcos_from_slope(-1.0, 1.0, PI / 4.0, 0.0).unwrap().domain();
        assert!((d.lo + PI / 4.0).abs() < 1e-15 && (d.hi - 3.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn logcos_parameter_errors() {
        assert!(matches!(logcos_from_slope(0.0, 1.0, 0.0, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(logcos_from_slope(1.0, 0.0, 0.0, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(logcos_from_slope(1.0, -2.0, 0.0, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn logcos_first_integral() {
        for &(a, beta, b) in &[(1.0, 1.0, 0.0), (-2.0, 4.0, 0.3), (0.7, 2.5, -1.1)] {
            let p = Profile::logcos(a, beta, b, 0.0).unwrap();
            let span = p.domain().inset(0.02);
            for i in 0..=50 {
                let x = span.lo + span.len() * i as f64 / 50.0;
                let ratio = p.eval(x, 2).unwrap() / (beta + p.eval(x, 1).unwrap().powi(2));
                assert!((ratio - a).abs() <= 1e-10 * a.abs(), "a={a} x={x} ratio={ratio}");
            }
        }
    }

    #[test]
    fn polynomial_derivatives() {
        // 1 + 2x - x^2 + 0.5x^3 + 3x^4
        let p = Profile::polynomial(vec![1.0, 2.0, -1.0, 0.5, 3.0]);
        let x = 0.7_f64;
        let f = 1.0 + 2.0 * x - x * x + 0.5 * x.powi(3) + 3.0 * x.powi(4);
        let f1 = 2.0 - 2.0 * x + 1.5 * x * x + 12.0 * x.powi(3);
        let f2 = -2.0 + 3.0 * x + 36.0 * x * x;
        let f3 = 3.0 + 72.0 * x;
        let d = p.derivatives(x).unwrap();
        for (got, want) in d.iter().zip([f, f1, f2, f3]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        assert_eq!(Profile::polynomial(vec![]).eval(1.0, 0).unwrap(), 0.0);
        assert_eq!(Profile::polynomial(vec![4.0, 1.0]).eval(9.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn consistency_linear_and_cubic() {
        let rep = derivative_consistency(&Profile::linear(3.0, -2.0), 25, 1e-6).unwrap();
        assert_eq!(rep.max_rel_error[1], 0.0);
        assert_eq!(rep.max_rel_error[2], 0.0);
        assert!(rep.passed);

        let cubic = Profile::polynomial(vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(cubic.eval(0.3, 3).unwrap(), 6.0);
        let rep = derivative_consistency(&cubic, 25, 1e-6).unwrap();
        assert!(rep.max_rel_error[2] < 1e-9, "{rep:?}");
        assert!(rep.passed);
    }

    #[test]
    fn consistency_logcos() {
        let p = logcos_from_slope(1.0, 1.0, 0.0, 0.0).unwrap();
        let rep = derivative_consistency_on(&p, Interval::new(-1.4, 1.4).unwrap(), 100, 1e-6).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.worst() <= 1e-6);
    }

    #[test]
    fn consistency_stencil_error() {
        let p = Profile::polynomial(vec![0.0, 1.0])
            .restricted(Interval::new(0.0, 1.0).unwrap())
            .unwrap();
        let err = derivative_consistency_on(&p, Interval::new(0.0, 1.0).unwrap(), 5, 1e-6);
        assert!(matches!(err, Err(Error::Stencil { .. })));
    }

    #[test]
    fn restriction_must_be_nested() {
        let p = Profile::logcos(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(p.clone().restricted(Interval::new(-1.0, 1.0).unwrap()).is_ok());
        assert!(p.restricted(Interval::new(-2.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn interval_helpers() {
        let i = Interval::new(-1.0, 3.0).unwrap();
        assert_eq!(i.inset(0.25), Interval { lo: 0.0, hi: 2.0 });
        assert!(Interval::new(1.0, 1.0).is_err());
        assert_eq!(Interval::REAL_LINE.inset(0.1), Interval::REAL_LINE);
        assert!(i.intersect(&Interval::new(5.0, 6.0).unwrap()).is_none());
    }
}
