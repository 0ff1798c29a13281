//! Density matrices assembled from pure components, and the two-column
//! "row" form `psi(x) = (phi_0(x), phi_1(x)) L` with its Pauli expansion.

use nalgebra::Matrix2;

use crate::basis::{BasisSet, Space, StateVector};
use crate::linalg::{hermitian_eigenvalues, hermiticity_residual, trace, CMatrix, C64, I};
use crate::mle::DesignModel;
use crate::sampler::SampleSet;
use crate::{Error, Result};

/// Tolerance on `sum f_i = 1` for component weights.
pub const WEIGHT_TOL: f64 = 1e-12;

/// `rho = sum_i f_i c_i c_i^dagger` together with the components it came from.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub rho: CMatrix,
    pub components: Vec<StateVector>,
    pub weights: Vec<f64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.rho).re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.rho)
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        trace(&(&self.rho * &self.rho)).re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.rho)
    }
}

pub(crate) fn check_simplex(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::invalid("need at least one component"));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::invalid("component weights must be nonnegative"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::invalid(format!("component weights sum to {sum}, not 1")));
    }
    Ok(())
}

pub fn assemble_density(components: &[StateVector], weights: &[f64]) -> Result<DensityMatrix> {
    if components.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            got: weights.len(),
        });
    }
    check_simplex(weights)?;
    let s = components[0].len();
    let mut rho = CMatrix::zeros(s, s);
    for (c, &f) in components.iter().zip(weights) {
        if c.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: c.len(),
            });
        }
        rho += c.projector() * C64::new(f, 0.0);
    }
    // Symmetrize away rounding so the Hermitian invariant holds to the last bit.
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    Ok(DensityMatrix {
        rho,
        components: components.to_vec(),
        weights: weights.to_vec(),
    })
}

/// `Tr((a - b)^2)`. For large samples its mean is about `2 (s - 1) / N`.
pub fn density_deviation(estimate: &CMatrix, truth: &CMatrix) -> Result<f64> {
    if estimate.shape() != truth.shape() {
        return Err(Error::DimensionMismatch {
            expected: truth.nrows(),
            got: estimate.nrows(),
        });
    }
    let d = estimate - truth;
    Ok(trace(&(&d * &d)).re)
}

/// Large-sample mean of [`density_deviation`] for `s`-dimensional states and `n` points.
pub fn expected_density_deviation(s: usize, n: f64) -> f64 {
    2.0 * (s as f64 - 1.0) / n
}

/// `sum_k ln(a_k^T rho conj(a_k))` over coordinate and momentum samples.
///
/// Only an evaluator: the structureless density-matrix likelihood is used for
/// comparisons, never maximized.
pub fn density_loglik(rho: &CMatrix, samples: &SampleSet, basis: &BasisSet) -> Result<f64> {
    if rho.nrows() != basis.size() || rho.ncols() != basis.size() {
        return Err(Error::DimensionMismatch {
            expected: basis.size(),
            got: rho.nrows(),
        });
    }
    let model = DesignModel::from_samples(samples, basis)?;
    let rows = model.rows();
    let dens = rows.conjugate() * rho.transpose();
    let mut total = 0.0;
    for k in 0..rows.nrows() {
        let p: C64 = (0..rows.ncols()).map(|j| dens[(k, j)] * rows[(k, j)]).sum();
        total += p.re.max(f64::MIN_POSITIVE).ln();
    }
    Ok(total)
}

/// Coefficients of `L = a0 E + a1 s1 + a2 s2 + a3 s3` and the entry form
/// `L = [[b1, b3], [b2, b4]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCoefficients {
    pub a: [C64; 4],
    pub b: [C64; 4],
}

impl PauliCoefficients {
    pub fn reconstruct(&self) -> Matrix2<C64> {
        let [a0, a1, a2, a3] = self.a;
        Matrix2::new(a0 + a3, a1 - I * a2, a1 + I * a2, a0 - a3)
    }

    /// `2 (|a0|^2 + |a1|^2 + |a2|^2 + |a3|^2)`, which equals `Tr(L L^dagger)`.
    pub fn norm_identity(&self) -> f64 {
        2.0 * self.a.iter().map(|x| x.norm_sqr()).sum::<f64>()
    }
}

pub fn pauli_matrices() -> [Matrix2<C64>; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    [
        Matrix2::new(z, one, one, z),
        Matrix2::new(z, -I, I, z),
        Matrix2::new(one, z, z, -one),
    ]
}

pub fn pauli_decompose(l: &Matrix2<C64>) -> PauliCoefficients {
    let half = C64::new(0.5, 0.0);
    let [s1, s2, s3] = pauli_matrices();
    let a0 = l.trace() * half;
    let a1 = (s1 * l).trace() * half;
    let a2 = (s2 * l).trace() * half;
    let a3 = (s3 * l).trace() * half;
    PauliCoefficients {
        a: [a0, a1, a2, a3],
        b: [a0 + a3, a1 + I * a2, a1 - I * a2, a0 - a3],
    }
}

/// Coordinate and momentum densities of the row function
/// `psi(x) = (phi_0(x), phi_1(x)) L`, i.e. `P(x) = psi(x) psi(x)^dagger`.
/// Both integrate to `Tr(L L^dagger)`.
pub fn psi_row_density(l: &Matrix2<C64>, basis: &BasisSet, points: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if basis.size() < 2 {
        return Err(Error::invalid("the row form needs at least two basis functions"));
    }
    let eval = |space: Space| -> Vec<f64> {
        points
            .iter()
            .map(|&x| {
                let row = basis.row(space, x);
                (0..2)
                    .map(|k| (row[0] * l[(0, k)] + row[1] * l[(1, k)]).norm_sqr())
                    .sum()
            })
            .collect()
    };
    Ok((eval(Space::Coordinate), eval(Space::Momentum)))
}

/// `P(x) = sum_ij rho_ij phi_i(x) conj(phi_j(x))` over the leading `rho.nrows()` functions.
pub fn density_from_rho(rho: &CMatrix, basis: &BasisSet, space: Space, points: &[f64]) -> Result<Vec<f64>> {
    let s = rho.nrows();
    if s > basis.size() {
        return Err(Error::DimensionMismatch {
            expected: basis.size(),
            got: s,
        });
    }
    Ok(points
        .iter()
        .map(|&x| {
            let row = basis.row(space, x);
            let mut p = C64::new(0.0, 0.0);
            for i in 0..s {
                for j in 0..s {
                    p += rho[(i, j)] * row[i] * row[j].conj();
                }
            }
            p.re
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisDescriptor;
    use crate::linalg::c;
    use crate::sampler::rng_from_seed;
    use rand::Rng;

    fn random_l(seed: u64) -> Matrix2<C64> {
        let mut rng = rng_from_seed(seed);
        let mut l = Matrix2::from_fn(|_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let n = (l * l.adjoint()).trace().re.sqrt();
        l /= C64::new(n, 0.0);
        l
    }

    #[test]
    fn pure_component_is_projector() {
        let mut rng = rng_from_seed(3);
        let st = StateVector::random(4, &mut rng);
        let d = assemble_density(&[st], &[1.0]).unwrap();
        let sq = &d.rho * &d.rho;
        assert!((sq - &d.rho).iter().all(|x| x.norm() < 1e-12));
        assert!((d.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_equal_mixture_spectrum() {
        let a = StateVector::basis_state(3, 0);
        let b = StateVector::basis_state(3, 2);
        let d = assemble_density(&[a, b], &[0.5, 0.5]).unwrap();
        let ev = d.eigenvalues();
        assert!(ev[0].abs() < 1e-12 && (ev[1] - 0.5).abs() < 1e-12 && (ev[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bad_weights_and_dimensions_fail() {
        let a = StateVector::basis_state(3, 0);
        let b = StateVector::basis_state(2, 0);
        assert!(assemble_density(&[a.clone(), b], &[0.5, 0.5]).is_err());
        assert!(assemble_density(&[a.clone()], &[0.9]).is_err());
        assert!(assemble_density(&[a], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn pure_deviation_is_twice_infidelity() {
        let mut rng = rng_from_seed(8);
        for _ in 0..20 {
            let a = StateVector::random(3, &mut rng);
            let b = StateVector::random(3, &mut rng);
            let d = density_deviation(&a.projector(), &b.projector()).unwrap();
            assert!((d - 2.0 * (1.0 - a.fidelity(&b))).abs() < 1e-12);
        }
        let a = StateVector::basis_state(2, 1);
        assert_eq!(density_deviation(&a.projector(), &a.projector()).unwrap(), 0.0);
    }

    #[test]
    fn pauli_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let p = pauli_decompose(&(Matrix2::identity() * c(r, 0.0)));
        assert!((p.a[0] - c(r, 0.0)).norm() < 1e-15);
        assert!(p.a[1..].iter().all(|x| x.norm() < 1e-15));
        assert!((p.norm_identity() - 1.0).abs() < 1e-12);

        let p = pauli_decompose(&pauli_matrices()[0]);
        assert!((p.a[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((p.b[1] - c(1.0, 0.0)).norm() < 1e-15 && (p.b[2] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_round_trip_and_norm() {
        for seed in 0..20 {
            let l = random_l(seed);
            let p = pauli_decompose(&l);
            assert!((p.reconstruct() - l).iter().all(|x| x.norm() < 1e-12));
            assert!((p.norm_identity() - 1.0).abs() < 1e-12);
            let b = Matrix2::new(p.b[0], p.b[2], p.b[1], p.b[3]);
            assert!((b - l).iter().all(|x| x.norm() < 1e-12));
        }
    }

    #[test]
    fn row_density_routes_agree_and_normalize() {
        let basis = BasisDescriptor::oscillator(3).build().unwrap();
        let grid = basis.grid().to_vec();
        let l = random_l(5);
        let (px, pp) = psi_row_density(&l, &basis, &grid).unwrap();
        assert!((basis.integrate(&px) - 1.0).abs() < 1e-8);
        assert!((basis.integrate(&pp) - 1.0).abs() < 1e-8);

        let rho2 = l * l.adjoint();
        let rho = CMatrix::from_fn(2, 2, |i, j| rho2[(i, j)]);
        let direct = density_from_rho(&rho, &basis, Space::Coordinate, &grid).unwrap();
        let gap = px.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-12, "{gap}");
    }

    #[test]
    fn diagonal_row_is_ground_density() {
        let basis = BasisDescriptor::oscillator(2).build().unwrap();
        let l = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let pts = [-1.0, 0.0, 0.7];
        let (px, _) = psi_row_density(&l, &basis, &pts).unwrap();
        for (x, p) in pts.iter().zip(px) {
            let phi0 = crate::basis::hermite::hermite_functions(*x, 1)[0];
            assert!((p - phi0 * phi0).abs() < 1e-14);
        }
    }

    #[test]
    fn density_loglik_matches_pure_loglik() {
        let basis = BasisDescriptor::oscillator(3).build().unwrap();
        let mut rng = rng_from_seed(1);
        let st = StateVector::random(3, &mut rng);
        let data = crate::sampler::sample_complementary(&basis, &st, 40, 40, 2).unwrap();
        let a = density_loglik(&st.projector(), &data, &basis).unwrap();
        let b = crate::mle::loglik(&data, &basis, st.coeffs()).unwrap();
        assert!((a - b).abs() < 1e-9 * b.abs());
    }
}
