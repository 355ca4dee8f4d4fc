//! Pointwise extrinsic geometry of a translation graph
//! `x ↦ (x, f_1(x_1) + ... + f_n(x_n))`.
//!
//! With `g = ∇F = (f_1', ..., f_n')` and `W = sqrt(1 + |g|^2)` the metric is
//! `G = I + g gᵀ`, the upward unit normal satisfies `W ξ = e_{n+1} - g`, the
//! second fundamental form is `B = diag(f_i'') / W` and the shape operator is
//! `A = G⁻¹ B`. `S_r` is computed three ways:
//!
//! 1. [`s_r_closed`]: the closed form
//!    `S_r = W^{-(r+2)} Σ_{|I|=r} Π_{i∈I} f_i'' (1 + Σ_{m∉I} f_m'^2)`;
//! 2. [`s_r_oracle_eigen`]: `σ_r` of the eigenvalues of `G^{-1/2} B G^{-1/2}`;
//! 3. [`s_r_oracle_charpoly`]: coefficients of `det(A - λI)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::profile::{Interval, Profile};
use crate::sympoly::elementary_symmetric;

/// Choice of unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// `W ξ = e_{n+1} - ∇F`, giving `B_ii = +f_i'' / W`.
    #[default]
    Upward,
    /// The opposite normal; odd `S_r` change sign.
    Downward,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Upward => 1.0,
            Orientation::Downward => -1.0,
        }
    }
}

/// Graph of `F(x) = Σ f_i(x_i)` over the product of the profile domains.
#[derive(Debug, Clone)]
pub struct TranslationGraph {
    profiles: Vec<Profile>,
}

impl TranslationGraph {
    pub fn new(profiles: Vec<Profile>) -> Result<Self> {
        if profiles.len() < 2 {
            return Err(Error::Parameter(format!(
                "a translation graph needs n >= 2 profiles, got {}",
                profiles.len()
            )));
        }
        Ok(Self { profiles })
    }

    pub fn dim(&self) -> usize {
        self.profiles.len()
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn domains(&self) -> Vec<Interval> {
        self.profiles.iter().map(Profile::domain).collect()
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.profiles.iter().map(Profile::describe).collect();
        format!("translation graph n={}: [{}]", self.dim(), parts.join("; "))
    }

    /// Reorder profiles by `perm` (the new `i`-th profile is the old `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.dim()];
        if perm.len() != self.dim() || perm.iter().any(|&p| p >= self.dim() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Input(format!("{perm:?} is not a permutation of 0..{}", self.dim())));
        }
        Self::new(perm.iter().map(|&p| self.profiles[p].clone()).collect())
    }

    /// `F(x)`.
    pub fn height(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        self.profiles
            .iter()
            .zip(x)
            .enumerate()
            .map(|(i, (p, &xi))| p.eval(xi, 0).map_err(|e| e.on_axis(i)))
            .sum()
    }

    /// Profile derivatives `[f_i, f_i', f_i'', f_i''']` per axis.
    pub fn jets(&self, x: &[f64]) -> Result<Vec<[f64; 4]>> {
        self.check_len(x)?;
        self.profiles
            .iter()
            .zip(x)
            .enumerate()
            .map(|(i, (p, &xi))| p.derivatives(xi).map_err(|e| e.on_axis(i)))
            .collect()
    }

    /// `(∇F, (f_i''))` at `x`.
    pub fn gradient_and_hessian(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let jets = self.jets(x)?;
        Ok(jets.iter().map(|j| (j[1], j[2])).unzip())
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Input(format!(
                "point has {} coordinates, graph dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// All geometric data of the graph at one point.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub point: Vec<f64>,
    pub orientation: Orientation,
    /// `f_i'(x_i)`.
    pub grad: Vec<f64>,
    /// `f_i''(x_i)`.
    pub hess: Vec<f64>,
    /// `sqrt(1 + |∇F|^2)`.
    pub w: f64,
    /// `G = I + ∇F ∇Fᵀ`.
    pub metric: DMatrix<f64>,
    /// Diagonal of `B`.
    pub secff: Vec<f64>,
    /// `A = G⁻¹ B`.
    pub shape: DMatrix<f64>,
    /// Eigenvalues of `A`, ascending.
    pub principal: Vec<f64>,
    /// `S_0 ..= S_n` from the closed form.
    pub s: Vec<f64>,
}

impl PointFrame {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// `det G` by LU factorisation, independent of the `W^2` shortcut.
    pub fn metric_det(&self) -> f64 {
        self.metric.clone().lu().determinant()
    }
}

pub fn frame_at(g: &TranslationGraph, x: &[f64]) -> Result<PointFrame> {
    frame_at_oriented(g, x, Orientation::Upward)
}

pub fn frame_at_oriented(g: &TranslationGraph, x: &[f64], orientation: Orientation) -> Result<PointFrame> {
    let (grad, hess) = g.gradient_and_hessian(x)?;
    let n = grad.len();
    let sign = orientation.sign();
    let q: f64 = grad.iter().map(|v| v * v).sum();
    let w = (1.0 + q).sqrt();
    debug_assert!(w >= 1.0);

    let gv = DVector::from_column_slice(&grad);
    let metric = DMatrix::identity(n, n) + &gv * gv.transpose();
    let secff: Vec<f64> = hess.iter().map(|h| sign * h / w).collect();

    // G⁻¹ = I - g gᵀ / W², so A = B - g (gᵀ B) / W².
    let mut shape = DMatrix::from_diagonal(&DVector::from_column_slice(&secff));
    for i in 0..n {
        for j in 0..n {
            shape[(i, j)] -= grad[i] * grad[j] * secff[j] / (w * w);
        }
    }

    let principal = principal_curvatures(&grad, &secff, w);

    let mut s: Vec<f64> = curvature_polynomials(&grad, &hess)
        .into_iter()
        .enumerate()
        .map(|(r, gr)| sign.powi(r as i32) * gr / w.powi(r as i32 + 2))
        .collect();
    s[0] = 1.0;

    Ok(PointFrame {
        point: x.to_vec(),
        orientation,
        grad,
        hess,
        w,
        metric,
        secff,
        shape,
        principal,
        s,
    })
}

/// Eigenvalues of `G^{-1/2} B G^{-1/2}`, ascending.
///
/// For `G = I + g gᵀ`, `G^{-1/2} = I + c g gᵀ` with `c = -1 / (W (W + 1))`.
fn principal_curvatures(grad: &[f64], secff: &[f64], w: f64) -> Vec<f64> {
    let n = grad.len();
    let c = -1.0 / (w * (w + 1.0));
    let p = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + c * grad[i] * grad[j]);
    // P diag(d) P, then symmetrise against rounding.
    let pd = DMatrix::from_fn(n, n, |i, j| p[(i, j)] * secff[j]);
    let mut m = &pd * &p;
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// `G_r = Σ_{|I|=r} Π_{i∈I} f_i'' (1 + Σ_{m∉I} f_m'^2)` for `r = 0 ..= n`,
/// so that `S_r = G_r / W^{r+2}`.
///
/// Rearrangement: `G_r = e_r + u_r`, where `e_r = σ_r(f'')` and
/// `u_r = Σ_{|I|=r} Π_{i∈I} f_i'' Σ_{m∉I} f_m'^2`. Both are built in one pass
/// over the coordinates; adding coordinate `j` with `a = f_j''`, `q = f_j'^2`
/// updates
///
/// ```text
/// u_k <- u_k + q e_k + a u_{k-1}      (j excluded from I: q joins the sum;
///                                       j in I: a multiplies)
/// e_k <- e_k + a e_{k-1}
/// ```
///
/// Every term is a product of the defining sum's own factors, so the scheme
/// avoids the cancellation in the equivalent form
/// `W² σ_r(f'') - Σ_{|I|=r} Π_{i∈I} f_i'' Σ_{i∈I} f_i'^2`.
pub fn curvature_polynomials(grad: &[f64], hess: &[f64]) -> Vec<f64> {
    let n = grad.len();
    let mut e = vec![0.0; n + 1];
    let mut u = vec![0.0; n + 1];
    e[0] = 1.0;
    for (j, (&d, &h)) in grad.iter().zip(hess).enumerate() {
        let q = d * d;
        for k in (1..=j + 1).rev() {
            u[k] += q * e[k] + h * u[k - 1];
            e[k] += h * e[k - 1];
        }
        u[0] += q * e[0];
    }
    e.iter().zip(&u).map(|(a, b)| a + b).collect()
}

fn check_r(r: usize, n: usize) -> Result<()> {
    if r < 1 || r > n {
        return Err(Error::range("r", r, 1, n));
    }
    Ok(())
}

/// `W^{r+2} S_r`, the polynomial part of the closed form.
pub fn g_r(g: &TranslationGraph, x: &[f64], r: usize) -> Result<f64> {
    check_r(r, g.dim())?;
    let (grad, hess) = g.gradient_and_hessian(x)?;
    Ok(curvature_polynomials(&grad, &hess)[r])
}

/// Closed-form `S_r` with the upward normal.
pub fn s_r_closed(g: &TranslationGraph, x: &[f64], r: usize) -> Result<f64> {
    check_r(r, g.dim())?;
    let (grad, hess) = g.gradient_and_hessian(x)?;
    let w2 = 1.0 + grad.iter().map(|v| v * v).sum::<f64>();
    Ok(curvature_polynomials(&grad, &hess)[r] / w2.sqrt().powi(r as i32 + 2))
}

/// `σ_r` of the frame's principal curvatures.
pub fn s_r_oracle_eigen(f: &PointFrame, r: usize) -> Result<f64> {
    check_r(r, f.dim())?;
    Ok(elementary_symmetric(&f.principal)[r])
}

/// `S_r` read off `det(A - λI) = Σ_k (-1)^{n-k} S_k λ^{n-k}`.
pub fn s_r_oracle_charpoly(f: &PointFrame, r: usize) -> Result<f64> {
    let n = f.dim();
    check_r(r, n)?;
    let coeffs = charpoly_coefficients(&f.shape);
    let sign = if (n - r) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * coeffs[n - r])
}

/// Coefficients of `det(A - λI)` in ascending powers of `λ`, by the
/// Faddeev–LeVerrier recursion.
pub fn charpoly_coefficients(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "characteristic polynomial of a non-square matrix");
    // p(λ) = det(λI - A) = Σ c_k λ^k with c_n = 1.
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m;
        for i in 0..n {
            m[(i, i)] += c[n - k + 1];
        }
        c[n - k] = -(a * &m).trace() / k as f64;
    }
    // det(A - λI) = (-1)^n p(λ)
    if n % 2 == 1 {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_square() -> Profile {
        Profile::polynomial(vec![0.0, 0.0, 0.5])
    }

    #[test]
    fn identity_frame() {
        let g = TranslationGraph::new(vec![half_square(), half_square()]).unwrap();
        let f = frame_at(&g, &[0.0, 0.0]).unwrap();
        assert_eq!(f.grad, vec![0.0, 0.0]);
        assert_eq!(f.w, 1.0);
        assert_eq!(f.metric, DMatrix::identity(2, 2));
        assert_eq!(f.secff, vec![1.0, 1.0]);
        assert_eq!(f.shape, DMatrix::identity(2, 2));
        assert_eq!(f.principal, vec![1.0, 1.0]);
        assert_eq!(f.s, vec![1.0, 2.0, 1.0]);
        assert_eq!(s_r_oracle_eigen(&f, 2).unwrap(), 1.0);
        assert_eq!(s_r_oracle_charpoly(&f, 1).unwrap(), 2.0);
        assert_eq!(s_r_oracle_charpoly(&f, 2).unwrap(), 1.0);
    }

    #[test]
    fn one_curved_direction() {
        let g = TranslationGraph::new(vec![half_square(), Profile::linear(0.0, 0.0)]).unwrap();
        let f = frame_at(&g, &[1.0, 0.0]).unwrap();
        assert!((f.w - 2.0_f64.sqrt()).abs() < 1e-15);
        let want = 2.0_f64.powf(-1.5);
        assert!((f.s[1] - want).abs() < 1e-15);
        assert!((s_r_oracle_eigen(&f, 1).unwrap() - want).abs() < 1e-15);
        assert!((s_r_closed(&g, &[1.0, 0.0], 1).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn flat_hyperplane() {
        let g = TranslationGraph::new(vec![Profile::linear(0.3, 1.0), Profile::linear(-2.0, 0.0), Profile::linear(5.0, 0.0)])
            .unwrap();
        let f = frame_at(&g, &[0.1, 2.0, -3.0]).unwrap();
        assert_eq!(f.s[0], 1.0);
        for r in 1..=3 {
            assert_eq!(f.s[r], 0.0);
            assert_eq!(s_r_oracle_eigen(&f, r).unwrap(), 0.0);
            assert_eq!(s_r_oracle_charpoly(&f, r).unwrap(), 0.0);
            assert_eq!(g_r(&g, &[0.1, 2.0, -3.0], r).unwrap(), 0.0);
        }
        assert!(f.principal.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn g_r_hand_values() {
        let g = TranslationGraph::new(vec![half_square(), half_square()]).unwrap();
        assert_eq!(g_r(&g, &[0.0, 0.0], 2).unwrap(), 1.0);
        let g = TranslationGraph::new(vec![half_square(), half_square(), half_square()]).unwrap();
        assert_eq!(g_r(&g, &[1.0, 0.0, 0.0], 2).unwrap(), 4.0);
    }

    #[test]
    fn charpoly_of_zero_and_identity() {
        let c = charpoly_coefficients(&DMatrix::identity(2, 2));
        // (1 - λ)^2 = 1 - 2λ + λ^2
        assert_eq!(c, vec![1.0, -2.0, 1.0]);
        let c = charpoly_coefficients(&DMatrix::zeros(3, 3));
        // det(-λI) = -λ^3
        assert_eq!(c, vec![0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn errors() {
        let g = TranslationGraph::new(vec![Profile::logcos(1.0, 1.0, 0.0, 0.0).unwrap(), half_square()]).unwrap();
        assert!(matches!(
            frame_at(&g, &[2.0, 0.0]),
            Err(Error::Domain { axis: Some(0), .. })
        ));
        assert!(matches!(s_r_closed(&g, &[0.0, 0.0], 3), Err(Error::Range { .. })));
        assert!(matches!(s_r_closed(&g, &[0.0, 0.0], 0), Err(Error::Range { .. })));
        assert!(frame_at(&g, &[0.0]).is_err());
        assert!(TranslationGraph::new(vec![half_square()]).is_err());
    }

    #[test]
    fn frame_invariants() {
        let g = TranslationGraph::new(vec![
            Profile::polynomial(vec![0.0, 1.0, -0.5, 0.3]),
            Profile::logcos(1.3, 2.0, 0.2, 0.0).unwrap(),
            half_square(),
        ])
        .unwrap();
        let f = frame_at(&g, &[0.4, 0.1, -0.7]).unwrap();
        let q: f64 = f.grad.iter().map(|v| v * v).sum();
        assert!((f.w * f.w - (1.0 + q)).abs() <= 1e-12 * f.w * f.w);
        assert!((f.metric_det() - f.w * f.w).abs() <= 1e-9 * f.w * f.w);
        assert_eq!(f.metric, f.metric.transpose());
        assert!(f.metric.clone().cholesky().is_some());
        assert_eq!(f.s[0], 1.0);
    }

    #[test]
    fn downward_normal_flips_odd_curvatures() {
        let g = TranslationGraph::new(vec![
            Profile::polynomial(vec![0.0, 1.0, -0.5, 0.3]),
            Profile::logcos(1.3, 2.0, 0.2, 0.0).unwrap(),
            half_square(),
        ])
        .unwrap();
        let x = [0.4, 0.1, -0.7];
        let up = frame_at(&g, &x).unwrap();
        let down = frame_at_oriented(&g, &x, Orientation::Downward).unwrap();
        for r in 1..=3 {
            let want = if r % 2 == 1 { -up.s[r] } else { up.s[r] };
            assert!((down.s[r] - want).abs() <= 1e-14 * want.abs().max(1.0));
            let eig = s_r_oracle_eigen(&down, r).unwrap();
            assert!((eig - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }
}
