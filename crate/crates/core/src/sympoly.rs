//! Elementary symmetric polynomials `σ_r`, their normalized means
//! `H_r = σ_r / C(n, r)` and the classical inequalities between them.
//!
//! Comparisons use a relative tolerance with an absolute floor of
//! [`ABS_FLOOR`]: two quantities are "equal" when they differ by at most
//! `tol * max(1, scale)` for the scale stated at each check.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute floor under every relative comparison in this module.
pub const ABS_FLOOR: f64 = 1e-12;

/// Multiple of the caller's tolerance allowed on the conclusion of
/// [`zero_propagation_check`].
pub const ZERO_PROPAGATION_SLACK: f64 = 100.0;

/// An ordered, non-empty list of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymInput {
    values: Vec<f64>,
}

impl SymInput {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("symmetric-function input needs n >= 1 values".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("value {} is not finite", i + 1)));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `σ_0 ..= σ_n`.
    pub fn all(&self) -> Vec<f64> {
        elementary_symmetric(&self.values)
    }

    /// `H_0 ..= H_n`.
    pub fn means(&self) -> Vec<f64> {
        let n = self.len();
        self.all()
            .into_iter()
            .enumerate()
            .map(|(r, s)| s / binomial(n, r))
            .collect()
    }
}

impl TryFrom<Vec<f64>> for SymInput {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// All elementary symmetric polynomials `σ_0 ..= σ_n` of `values`.
///
/// Uses the one-pass recurrence `e_j <- e_j + x * e_{j-1}`, fed in ascending
/// order so that any permutation of the input yields bit-identical output.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    elementary_symmetric_in_order(&sorted)
}

/// Same recurrence as [`elementary_symmetric`] without the sort.
pub fn elementary_symmetric_in_order(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (k, &x) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `C(n, r)` as a float; zero when `r > n`.
pub fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn elem_sym(values: &SymInput, r: usize) -> Result<f64> {
    let n = values.len();
    if r > n {
        return Err(Error::range("r", r, 0, n));
    }
    Ok(values.all()[r])
}

pub fn normalized_h(values: &SymInput, r: usize) -> Result<f64> {
    let n = values.len();
    Ok(elem_sym(values, r)? / binomial(n, r))
}

/// `max - min <= tol * max(1, max |v|)`.
fn values_all_equal(values: &[f64], tol: f64) -> bool {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    hi - lo <= tol.max(ABS_FLOOR) * scale
}

/// Outcome of the Newton inequalities `H_r^2 >= H_{r-1} H_{r+1}`, `1 <= r < n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonReport {
    /// `H_r^2 - H_{r-1} H_{r+1}` for `r = 1 .. n-1`.
    pub gaps: Vec<f64>,
    /// Per-gap "equality within tolerance" flags.
    pub equalities: Vec<bool>,
    /// Every gap is `>= -tol * scale`.
    pub holds: bool,
    /// Equality at `r = 1`, or at some `1 < r < n` with `|H_{r+1}| > tol`.
    pub equality_detected: bool,
    /// The values themselves coincide within tolerance.
    pub values_all_equal: bool,
}

impl NewtonReport {
    /// The equality case is detected exactly when the values coincide.
    pub fn consistent(&self) -> bool {
        self.equality_detected == self.values_all_equal
    }
}

pub fn newton_check(values: &SymInput, tol: f64) -> Result<NewtonReport> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Input("Newton inequalities need n >= 2".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let h = values.means();
    let scale = h.iter().fold(1.0_f64, |m, v| m.max(v * v));
    let band = tol.max(ABS_FLOOR) * scale;

    let gaps: Vec<f64> = (1..n).map(|r| h[r] * h[r] - h[r - 1] * h[r + 1]).collect();
    let equalities: Vec<bool> = gaps.iter().map(|g| g.abs() <= band).collect();
    let holds = gaps.iter().all(|&g| g >= -band);
    let equality_detected = equalities
        .iter()
        .enumerate()
        .any(|(i, &eq)| eq && (i == 0 || h[i + 2].abs() > tol));

    Ok(NewtonReport {
        gaps,
        equalities,
        holds,
        equality_detected,
        values_all_equal: values_all_equal(values.values(), tol),
    })
}

/// Outcome of the Maclaurin chain `H_1 >= H_2^{1/2} >= ... >= H_r^{1/r}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MaclaurinReport {
    /// Some `H_j`, `j <= r`, is not positive; the chain says nothing.
    NotApplicable { first_nonpositive: usize },
    Checked {
        /// `H_j^{1/j}` for `j = 1 ..= r`.
        roots: Vec<f64>,
        /// `roots[j] ~= roots[j+1]` within tolerance.
        equalities: Vec<bool>,
        holds: bool,
        values_all_equal: bool,
    },
}

impl MaclaurinReport {
    pub fn is_applicable(&self) -> bool {
        matches!(self, MaclaurinReport::Checked { .. })
    }

    /// Vacuously true when not applicable.
    pub fn holds(&self) -> bool {
        match self {
            MaclaurinReport::NotApplicable { .. } => true,
            MaclaurinReport::Checked { holds, .. } => *holds,
        }
    }
}

/// `r` is the chain length; positivity of every `H_1 ..= H_r` is required.
pub fn maclaurin_check(values: &SymInput, r: usize, tol: f64) -> Result<MaclaurinReport> {
    let n = values.len();
    if r < 1 || r > n {
        return Err(Error::range("r", r, 1, n));
    }
    let h = values.means();
    if let Some(j) = (1..=r).find(|&j| !(h[j] > 0.0)) {
        return Ok(MaclaurinReport::NotApplicable {
            first_nonpositive: j,
        });
    }
    let roots: Vec<f64> = (1..=r).map(|j| h[j].powf(1.0 / j as f64)).collect();
    let band = |a: f64, b: f64| tol.max(ABS_FLOOR) * a.abs().max(b.abs()).max(1.0);
    let equalities: Vec<bool> = roots
        .windows(2)
        .map(|w| (w[0] - w[1]).abs() <= band(w[0], w[1]))
        .collect();
    let holds = roots.windows(2).all(|w| w[0] >= w[1] - band(w[0], w[1]));
    Ok(MaclaurinReport::Checked {
        roots,
        equalities,
        holds,
        values_all_equal: values_all_equal(values.values(), tol),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroPropagationReport {
    /// `|H_r| <= tol` and `|H_{r+1}| <= tol`.
    pub premise: bool,
    /// `max_{r <= j <= n} |H_j|`.
    pub max_tail: f64,
    /// Entries with `|λ_i| > tol'`.
    pub nonzero_entries: usize,
    /// Premise false, or the conclusion holds with `tol' = 100 tol`.
    pub holds: bool,
}

/// If `H_r = H_{r+1} = 0` then every later `H_j` vanishes and at most
/// `r - 1` entries are nonzero. The conclusion is checked against
/// `tol' = ZERO_PROPAGATION_SLACK * tol`.
pub fn zero_propagation_check(values: &SymInput, r: usize, tol: f64) -> Result<ZeroPropagationReport> {
    let n = values.len();
    if r < 1 || r >= n {
        return Err(Error::range("r", r, 1, n.saturating_sub(1)));
    }
    let h = values.means();
    let premise = h[r].abs() <= tol && h[r + 1].abs() <= tol;
    let relaxed = ZERO_PROPAGATION_SLACK * tol;
    let max_tail = h[r..].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let nonzero_entries = values.values().iter().filter(|v| v.abs() > relaxed).count();
    let holds = !premise || (max_tail <= relaxed && nonzero_entries < r);
    Ok(ZeroPropagationReport {
        premise,
        max_tail,
        nonzero_entries,
        holds,
    })
}
