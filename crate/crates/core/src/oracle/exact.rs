//! Exact rational brute-force counterparts of the symmetric-polynomial
//! closed forms: subset/monomial enumeration, cofactor determinants,
//! and the literal N-term exchange sums. O(n!) and proud of it — these
//! exist to be obviously correct, not fast.

use num::BigRational;
use rand::prelude::*;

use crate::jacobi::axis_to_jacobi;
use crate::scalar::{rat, Scalar};
use crate::system::Permutation;

/// sigma_i by subset enumeration.
pub fn sigma_brute(vars: &[BigRational], i: usize) -> BigRational {
    use itertools::Itertools;
    if i == 0 {
        return rat(1, 1);
    }
    if i > vars.len() {
        return rat(0, 1);
    }
    vars.iter()
        .combinations(i)
        .map(|c| c.into_iter().cloned().fold(rat(1, 1), |a, b| a * b))
        .fold(rat(0, 1), |a, b| a + b)
}

/// Complete homogeneous symmetric polynomial h_i by enumeration of
/// monomials with repetition.
pub fn h_brute(vars: &[BigRational], degree: usize) -> BigRational {
    fn rec(vars: &[BigRational], start: usize, left: usize) -> BigRational {
        if left == 0 {
            return rat(1, 1);
        }
        let mut acc = rat(0, 1);
        for j in start..vars.len() {
            acc += vars[j].clone() * rec(vars, j, left - 1);
        }
        acc
    }
    rec(vars, 0, degree)
}

/// Dense determinant by cofactor expansion (exact, O(n!)).
pub fn det_cofactor(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = rat(0, 1);
    for col in 0..n {
        let minor: Vec<Vec<BigRational>> = (1..n)
            .map(|r| {
                (0..n)
                    .filter(|&c| c != col)
                    .map(|c| m[r][c].clone())
                    .collect()
            })
            .collect();
        let term = m[0][col].clone() * det_cofactor(&minor);
        if col % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// The explicit power matrix of the generalized Vandermonde
/// determinant: rows of powers 0..N-2 and a last row of gamma-th powers.
pub fn power_matrix(vars: &[BigRational], gamma: usize) -> Vec<Vec<BigRational>> {
    let n = vars.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for p in 0..n - 1 {
        rows.push(vars.iter().map(|x| x.powi(p as u32)).collect());
    }
    rows.push(vars.iter().map(|x| x.powi(gamma as u32)).collect());
    rows
}

/// Vandermonde product over the first `upto` variables.
pub fn vprod_first(vars: &[BigRational], upto: usize) -> BigRational {
    let mut acc = rat(1, 1);
    for i in 1..upto {
        for j in 0..i {
            acc *= vars[i].clone() - vars[j].clone();
        }
    }
    acc
}

/// LHS of the generalized-Vandermonde identity: the N-term exchange sum
/// with Fermi signs, the product running over the first N-1 variables
/// of each permuted tuple.
pub fn exchange_sum_lhs(vars: &[BigRational], gamma: usize) -> BigRational {
    let n = vars.len();
    let mut acc = rat(0, 1);
    for k in 0..n {
        let p = Permutation::transposition(n, k, n - 1);
        let permuted: Vec<BigRational> = (0..n).map(|i| vars[p.map(i)].clone()).collect();
        let sign = if k == n - 1 { rat(1, 1) } else { rat(-1, 1) };
        acc += sign * vprod_first(&permuted, n - 1) * permuted[n - 1].powi(gamma as u32);
    }
    acc
}

/// Direct N-term exchange sum with xi_{N-1}^l in place of x_N^gamma.
pub fn exchange_sum_xi(vars: &[BigRational], l: usize) -> BigRational {
    let n = vars.len();
    let mut acc = rat(0, 1);
    for k in 0..n {
        let p = Permutation::transposition(n, k, n - 1);
        let permuted: Vec<BigRational> = (0..n).map(|i| vars[p.map(i)].clone()).collect();
        let xi = axis_to_jacobi(&permuted);
        let sign = if k == n - 1 { rat(1, 1) } else { rat(-1, 1) };
        acc += sign * vprod_first(&permuted, n - 1) * xi[n - 2].powi(l as u32);
    }
    acc
}

/// Distinct small rationals; small numerators and denominators keep the
/// exact determinants fast.
pub fn random_rationals(rng: &mut StdRng, n: usize) -> Vec<BigRational> {
    loop {
        let vals: Vec<BigRational> = (0..n)
            .map(|_| rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=4)))
            .collect();
        let distinct = vals
            .iter()
            .enumerate()
            .all(|(i, v)| vals[..i].iter().all(|w| w != v));
        if distinct {
            return vals;
        }
    }
}
