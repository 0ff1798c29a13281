//! Fisher information and covariance of the root estimator.

use crate::linalg::{projector, CMatrix, C64};

#[derive(Debug, Clone)]
pub struct FisherCovariance {
    /// `(s-1) x (s-1)` Fisher matrix over the non-pivot components.
    pub fisher: CMatrix,
    /// `s x s` covariance `(delta_ij - c_i c_j^*) / (n + m)`.
    pub covariance: CMatrix,
    /// Component eliminated through the normalization condition.
    pub pivot: usize,
    /// Original indices of the Fisher rows/columns.
    pub fisher_indices: Vec<usize>,
}

/// Fisher matrix `I_ij = N (delta_ij + c_i c_j^* / |c_p|^2)` on the independent
/// components and the full covariance matrix for `N = n + m` observations.
///
/// The eliminated component `p` is the largest-modulus one, so `|c_p| > 0` for
/// every normalized state.
pub fn fisher_and_covariance(state: &[C64], n_plus_m: f64) -> FisherCovariance {
    let s = state.len();
    let pivot = crate::linalg::pivot_index(state);
    let pivot_sq = state[pivot].norm_sqr();
    let idx: Vec<usize> = (0..s).filter(|&i| i != pivot).collect();
    let fisher = CMatrix::from_fn(idx.len(), idx.len(), |a, b| {
        let (i, j) = (idx[a], idx[b]);
        let delta = if a == b { 1.0 } else { 0.0 };
        (C64::new(delta, 0.0) + state[i] * state[j].conj() / pivot_sq) * n_plus_m
    });
    FisherCovariance {
        fisher,
        covariance: covariance_matrix(state, n_plus_m),
        pivot,
        fisher_indices: idx,
    }
}

/// `Sigma = (E - rho) / N`.
pub fn covariance_matrix(state: &[C64], n_plus_m: f64) -> CMatrix {
    let s = state.len();
    (CMatrix::identity(s, s) - projector(state)) / C64::new(n_plus_m, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, hermitian_eigenvalues, max_abs, normalized, trace};

    fn random_state(seed: u64, s: usize) -> Vec<C64> {
        use rand::Rng;
        let mut rng = crate::sampler::rng_from_seed(seed);
        normalized(
            &(0..s)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn two_level_ground_state() {
        let fc = fisher_and_covariance(&[c(1.0, 0.0), c(0.0, 0.0)], 10.0);
        assert!((fc.covariance[(0, 0)].re).abs() < 1e-15);
        assert!((fc.covariance[(1, 1)].re - 0.1).abs() < 1e-15);
        assert!(fc.covariance[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn covariance_annihilates_state() {
        for seed in 0..10 {
            let st = random_state(seed, 5);
            let fc = fisher_and_covariance(&st, 400.0);
            let v = nalgebra::DVector::from_column_slice(&st);
            let sc = &fc.covariance * v;
            assert!(sc.iter().all(|x| x.norm() < 1e-12));
            assert!((trace(&fc.covariance).re - 4.0 / 400.0).abs() < 1e-10);
        }
    }

    #[test]
    fn covariance_spectrum() {
        let st = random_state(42, 3);
        let fc = fisher_and_covariance(&st, 400.0);
        let ev = hermitian_eigenvalues(&(fc.covariance.clone() * c(400.0, 0.0)));
        assert!(ev[0].abs() < 1e-10);
        assert!((ev[1] - 1.0).abs() < 1e-10 && (ev[2] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fisher_inverse_is_reduced_covariance() {
        let st = random_state(9, 4);
        let fc = fisher_and_covariance(&st, 250.0);
        let inv = fc.fisher.clone().try_inverse().unwrap();
        let reduced = CMatrix::from_fn(3, 3, |a, b| {
            fc.covariance[(fc.fisher_indices[a], fc.fisher_indices[b])]
        });
        assert!(max_abs(&(inv - reduced)) < 1e-12);
    }

    #[test]
    fn pivot_avoids_zero_leading_component() {
        let st = [c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.8)];
        let fc = fisher_and_covariance(&st, 100.0);
        assert_eq!(fc.pivot, 2);
        assert!(fc.fisher.iter().all(|x| x.re.is_finite()));
    }
}
