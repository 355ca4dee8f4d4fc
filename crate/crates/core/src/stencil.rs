//! Central finite-difference stencils for first and mixed partial derivatives.

/// Offsets and weights of the 7-point, sixth-order central first-derivative
/// stencil (weights to be divided by `h`). It differentiates polynomials of
/// degree <= 6 exactly.
const CENTRAL6: [(f64, f64); 6] = [
    (-3.0, -1.0 / 60.0),
    (-2.0, 9.0 / 60.0),
    (-1.0, -45.0 / 60.0),
    (1.0, 45.0 / 60.0),
    (2.0, -9.0 / 60.0),
    (3.0, 1.0 / 60.0),
];

/// Half-width of the stencil in units of `h`.
pub const REACH: f64 = 3.0;

/// Second-order central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `∂^m f / ∂x_{axes[0]} ... ∂x_{axes[m-1]}` at `x` by the tensor product of
/// sixth-order central stencils, one per listed axis. `steps[k]` is the step
/// along `axes[k]`. Axes are expected to be distinct.
///
/// The evaluation order is fixed, so the result is deterministic.
pub fn mixed_partial<F>(f: F, x: &[f64], axes: &[usize], steps: &[f64]) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(axes.len(), steps.len(), "one step per differentiated axis");
    let mut point = x.to_vec();
    recurse(&f, &mut point, axes, steps)
}

fn recurse<F>(f: &F, point: &mut [f64], axes: &[usize], steps: &[f64]) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let Some((&axis, rest)) = axes.split_first() else {
        return f(point);
    };
    let h = steps[0];
    let centre = point[axis];
    let mut acc = 0.0;
    for &(offset, weight) in &CENTRAL6 {
        point[axis] = centre + offset * h;
        acc += weight * recurse(f, point, rest, &steps[1..]);
    }
    point[axis] = centre;
    acc / h
}
