use nalgebra::Matrix3;

use crate::Vec3;

fn central_hessian(f: &impl Fn(&Vec3) -> f64, at: &Vec3, h: f64) -> Matrix3<f64> {
    let basis = [Vec3::x(), Vec3::y(), Vec3::z()];
    let centre = f(at);
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        let e = basis[i] * h;
        m[(i, i)] = (f(&(at + e)) - 2.0 * centre + f(&(at - e))) / (h * h);
        for j in (i + 1)..3 {
            let g = basis[j] * h;
            let v = (f(&(at + e + g)) - f(&(at + e - g)) - f(&(at - e + g)) + f(&(at - e - g)))
                / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Central-difference Hessian with one level of Richardson extrapolation,
/// `(4 H(h/2) - H(h)) / 3`.
pub(crate) fn hessian(f: impl Fn(&Vec3) -> f64, at: &Vec3, h: f64) -> Matrix3<f64> {
    let coarse = central_hessian(&f, at, h);
    let fine = central_hessian(&f, at, 0.5 * h);
    (fine * 4.0 - coarse) / 3.0
}
