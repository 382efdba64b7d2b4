//! Jacobi coordinates: the linear transform that decouples the
//! pair-interaction Hamiltonian into independent oscillators.
//!
//! Per axis, xi_i = (1/i) sum_{j<=i} x_j - x_{i+1} for 1 <= i <= N-1
//! (relative modes) and xi_N = mean of all coordinates (center of mass).
//! For D > 1 the transform acts axis by axis; there is no cross-axis
//! coupling.

use crate::error::Result;
use crate::scalar::Scalar;
use crate::system::{Configuration, SystemParams};

/// Jacobi coordinates of a configuration: one length-N vector per axis,
/// entries 0..N-2 the relative modes and entry N-1 the center of mass.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiVector {
    axes: Vec<Vec<f64>>,
}

impl JacobiVector {
    pub fn n_particles(&self) -> usize {
        self.axes[0].len()
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    /// Relative mode i (1-based, 1 <= i <= N-1) along `axis`.
    pub fn xi(&self, i: usize, axis: usize) -> f64 {
        self.axes[axis][i - 1]
    }

    /// Center-of-mass coordinate along `axis`.
    pub fn center_of_mass(&self, axis: usize) -> f64 {
        self.axes[axis][self.n_particles() - 1]
    }

    pub fn axis(&self, axis: usize) -> &[f64] {
        &self.axes[axis]
    }

    pub fn from_axes(axes: Vec<Vec<f64>>) -> Self {
        JacobiVector { axes }
    }
}

/// Forward transform along a single axis, generic over the numeric path.
pub fn axis_to_jacobi<T: Scalar>(xs: &[T]) -> Vec<T> {
    let n = xs.len();
    let mut xi = Vec::with_capacity(n);
    let mut prefix = T::zero();
    for i in 1..n {
        prefix = prefix + xs[i - 1].clone();
        xi.push(prefix.clone() / T::from_i64(i as i64) - xs[i].clone());
    }
    prefix = prefix + xs[n - 1].clone();
    xi.push(prefix / T::from_i64(n as i64));
    xi
}

/// Inverse transform along a single axis, by back-substitution on the
/// prefix sums (exact in rational arithmetic).
pub fn axis_from_jacobi<T: Scalar>(xi: &[T]) -> Vec<T> {
    let n = xi.len();
    // s[i] = sum of the first i+1 coordinates
    let mut s = vec![T::zero(); n];
    s[n - 1] = xi[n - 1].clone() * T::from_i64(n as i64);
    for i in (1..n).rev() {
        // s_i = (s_{i+1} + xi_i) * i / (i+1), with 1-based i
        s[i - 1] = (s[i].clone() + xi[i - 1].clone()) * T::from_i64(i as i64)
            / T::from_i64((i + 1) as i64);
    }
    let mut xs = Vec::with_capacity(n);
    xs.push(s[0].clone());
    for i in 1..n {
        xs.push(s[i].clone() - s[i - 1].clone());
    }
    xs
}

/// Jacobi coordinates of a configuration, applied independently per axis.
pub fn to_jacobi(c: &Configuration) -> JacobiVector {
    let axes = (0..c.dimension())
        .map(|a| axis_to_jacobi(&c.axis(a)))
        .collect();
    JacobiVector { axes }
}

/// Reconstruct the configuration from its Jacobi coordinates.
pub fn from_jacobi(j: &JacobiVector) -> Result<Configuration> {
    let n = j.n_particles();
    let d = j.dimension();
    let per_axis: Vec<Vec<f64>> = (0..d).map(|a| axis_from_jacobi(j.axis(a))).collect();
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        for axis in per_axis.iter() {
            coords.push(axis[i]);
        }
    }
    Configuration::new(n, d, coords)
}

/// Both sides of the potential-term decomposition for a 1D configuration:
/// lhs = sum_{i<j} (x_i - x_j)^2, rhs = N * sum_i (mu_i/m) xi_i^2.
/// The two are equal for every configuration.
pub fn pair_sum_identity_check(c: &Configuration, params: &SystemParams) -> (f64, f64) {
    debug_assert_eq!(c.dimension(), 1);
    let n = c.n_particles();
    let lhs = c.pair_sum_sq();
    let j = to_jacobi(c);
    let mut rhs = 0.0;
    for i in 1..n {
        let mu_over_m = i as f64 / (i as f64 + 1.0);
        rhs += mu_over_m * j.xi(i, 0).powi(2);
    }
    rhs *= n as f64;
    let _ = params;
    (lhs, rhs)
}
