//! Exact polynomial machinery: Hermite polynomials, elementary symmetric
//! polynomials sigma_i, the banded V-determinant family (equal to the
//! complete homogeneous symmetric polynomials), the parity function
//! epsilon, the generalized Vandermonde determinant with an arbitrary
//! last-row power, and the antisymmetrized power sum built from it.
//!
//! Everything is generic over [`Scalar`], so the same code runs on
//! machine floats and on exact rationals; the identity tests run on the
//! rational path where equality is literal.

use crate::scalar::Scalar;

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n - 2n H_{n-1}, H_0 = 1, H_1 = 2x.
pub fn hermite<T: Scalar>(n: usize, x: &T) -> T {
    let two = T::from_i64(2);
    let mut h_prev = T::one();
    if n == 0 {
        return h_prev;
    }
    let mut h = two.clone() * x.clone();
    for k in 1..n {
        let next = two.clone() * x.clone() * h.clone()
            - T::from_i64(2 * k as i64) * h_prev.clone();
        h_prev = h;
        h = next;
    }
    h
}

/// Evaluation point for the symmetric polynomials: the variables
/// x_1..x_N with sigma_0..sigma_N cached at construction.
#[derive(Debug, Clone)]
pub struct SymmetricContext<T: Scalar> {
    vars: Vec<T>,
    sigma: Vec<T>,
}

impl<T: Scalar> SymmetricContext<T> {
    pub fn new(vars: Vec<T>) -> Self {
        // Coefficients of prod_j (1 + x_j t), one variable at a time.
        let n = vars.len();
        let mut sigma = vec![T::zero(); n + 1];
        sigma[0] = T::one();
        for (j, x) in vars.iter().enumerate() {
            for i in (1..=j + 1).rev() {
                sigma[i] = sigma[i].clone() + x.clone() * sigma[i - 1].clone();
            }
        }
        SymmetricContext { vars, sigma }
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[T] {
        &self.vars
    }

    /// sigma_i: 1 for i = 0, the elementary symmetric polynomial for
    /// 1 <= i <= N, and 0 beyond N.
    pub fn elementary_symmetric(&self, i: usize) -> T {
        self.sigma.get(i).cloned().unwrap_or_else(T::zero)
    }

    /// V_i: the i x i banded determinant in the sigmas, computed by the
    /// first-row cofactor recurrence V_i = sum_j (-1)^{j-1} sigma_j V_{i-j}.
    /// Coincides with the complete homogeneous symmetric polynomial h_i.
    pub fn v_determinant(&self, i: usize) -> T {
        self.v_up_to(i).pop().expect("nonempty")
    }

    /// V_0..V_imax as a vector (cheap shared computation for the
    /// per-point wavefunction sums).
    pub fn v_up_to(&self, imax: usize) -> Vec<T> {
        let n = self.n_vars();
        let mut v = Vec::with_capacity(imax + 1);
        v.push(T::one());
        for i in 1..=imax {
            let mut acc = T::zero();
            for j in 1..=i.min(n) {
                let term = self.sigma[j].clone() * v[i - j].clone();
                if j % 2 == 1 {
                    acc = acc + term;
                } else {
                    acc = acc - term;
                }
            }
            v.push(acc);
        }
        v
    }

    /// Product of (x_i - x_j) over all pairs j < i.
    pub fn vandermonde_product(&self) -> T {
        let mut acc = T::one();
        for i in 1..self.vars.len() {
            for j in 0..i {
                acc = acc * (self.vars[i].clone() - self.vars[j].clone());
            }
        }
        acc
    }
}

/// epsilon(k): 0 for even k, 1 for odd k.
pub fn epsilon_parity(k: usize) -> usize {
    k % 2
}

/// Determinant of the N x N matrix whose rows are the powers
/// 0, 1, ..., N-2 of the variables with a last row of gamma-th powers.
/// Vanishes for gamma < N-1; equals V_{gamma-N+1} times the full
/// Vandermonde product otherwise.
pub fn hyper_vandermonde<T: Scalar>(ctx: &SymmetricContext<T>, gamma: usize) -> T {
    let n = ctx.n_vars();
    debug_assert!(n >= 2);
    if gamma < n - 1 {
        return T::zero();
    }
    ctx.v_determinant(gamma - (n - 1)) * ctx.vandermonde_product()
}

/// The antisymmetrized power sum
/// sum_{k=1}^N a(P_kN) P_kN[ prod_{i>j}^{N-1} (x_i - x_j) * xi_{N-1}^l ],
/// with xi_{N-1} the last relative Jacobi coordinate, evaluated in
/// closed form. Vanishes for l < N-1; otherwise equals
/// sum_{i=0}^{l-N+1} l! (-N)^{l-i} / ((N-1)^l i! (l-i)!) sigma_1^i V_{l-N+1-i}
/// times the full Vandermonde product (the expansion of xi_{N-1}^l in
/// powers of x_N turns each term into a hyper-Vandermonde determinant,
/// which carries that common factor).
pub fn antisym_power_sum<T: Scalar>(ctx: &SymmetricContext<T>, l: usize) -> T {
    let n = ctx.n_vars();
    debug_assert!(n >= 2);
    if l < n - 1 {
        return T::zero();
    }
    let sigma1 = ctx.elementary_symmetric(1);
    let v = ctx.v_up_to(l - (n - 1));
    let l_fact = T::factorial(l as u64);
    let nm1_pow_l = T::from_i64((n - 1) as i64).powi(l as u32);
    let neg_n = T::from_i64(-(n as i64));

    let mut acc = T::zero();
    for i in 0..=l - (n - 1) {
        let coeff = l_fact.clone() * neg_n.powi((l - i) as u32)
            / (nm1_pow_l.clone() * T::factorial(i as u64) * T::factorial((l - i) as u64));
        acc = acc + coeff * sigma1.powi(i as u32) * v[l - (n - 1) - i].clone();
    }
    acc * ctx.vandermonde_product()
}
