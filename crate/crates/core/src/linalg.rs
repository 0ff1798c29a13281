//! Small complex linear-algebra helpers shared by the estimators.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `<a, b> = sum_i conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Scales `v` to unit norm. Returns `false` when the norm is zero or not finite.
pub fn normalize(v: &mut [C64]) -> bool {
    let n = norm(v);
    if !(n > 0.0 && n.is_finite()) {
        return false;
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    true
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let mut out = v.to_vec();
    normalize(&mut out);
    out
}

pub fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `|<a, b>|^2` for normalized vectors.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr()
}

/// Outer product `v v^dagger`.
pub fn projector(v: &[C64]) -> CMatrix {
    let n = v.len();
    CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

/// Largest entry of `|A - A^dagger|`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Unitarity residual `max |U^dagger U - I|`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// Index of the largest-modulus component; ties resolve to the lowest index.
pub fn pivot_index(v: &[C64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[best].norm() + 1e-15 {
            best = i;
        }
    }
    best
}

/// Multiplies by a global phase so the largest-modulus component is real positive.
pub fn canonical_phase(v: &mut [C64]) {
    if v.is_empty() {
        return;
    }
    let p = v[pivot_index(v)];
    if p.norm() == 0.0 {
        return;
    }
    let rot = p.conj() / p.norm();
    for x in v.iter_mut() {
        *x *= rot;
    }
}

/// Trapezoid weights for a uniform grid with spacing `dx`.
pub fn trapezoid_weights(points: usize, dx: f64) -> Vec<f64> {
    let mut w = vec![dx; points];
    if points > 1 {
        w[0] = 0.5 * dx;
        w[points - 1] = 0.5 * dx;
    }
    w
}
