//! Grid diagonalization of the relative Hamiltonian for N = 2, 3:
//! finite differences on the Jacobi axes, a Sturm-bisection tridiagonal
//! eigensolver, and permutation-symmetry classification of the levels.
//! Entirely independent of the closed-form spectrum formulas.

use crate::error::{Error, Result};
use crate::system::{Permutation, Statistics, SystemParams};

/// Box and resolution of the finite-difference grid, per Jacobi axis,
/// in natural relative lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: 8.0,
            points_per_axis: 2000,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.half_width.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidParams("half_width must be positive".into()));
        }
        if self.points_per_axis < 64 {
            return Err(Error::InvalidParams(
                "points_per_axis must be at least 64".into(),
            ));
        }
        Ok(())
    }

    /// Same box with the spacing halved (2P - 1 points).
    fn refined(&self) -> GridSpec {
        GridSpec {
            half_width: self.half_width,
            points_per_axis: 2 * self.points_per_axis - 1,
        }
    }
}

// ---------------------------------------------------------------------
// Symmetric tridiagonal eigensolver
// ---------------------------------------------------------------------

/// Number of eigenvalues strictly below x, by the Sturm sign-change
/// count of the LDL^T pivots.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - x;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if d.abs() < 1e-300 {
            1e-300_f64.copysign(d)
        } else {
            d
        };
        d = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The k lowest eigenvalues, each by bisection inside Gershgorin bounds.
fn lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = (if i > 0 { off[i - 1].abs() } else { 0.0 })
            + (if i < n - 1 { off[i].abs() } else { 0.0 });
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (0..k)
        .map(|idx| {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-13 * (1.0 + b.abs()) {
                let mid = 0.5 * (a + b);
                if sturm_count(diag, off, mid) > idx {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Solve (T - sigma I) v = b by banded LU with partial pivoting
/// (LAPACK gttrf-style; the second superdiagonal absorbs row swaps).
fn shifted_solve(diag: &[f64], off: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d: Vec<f64> = diag.iter().map(|v| v - sigma).collect();
    let mut du: Vec<f64> = off.to_vec();
    let mut dl: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut pivot = vec![false; n.saturating_sub(1)];
    let mut rhs = b.to_vec();

    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            let safe = if d[i] == 0.0 { 1e-300 } else { d[i] };
            let m = dl[i] / safe;
            dl[i] = m;
            d[i + 1] -= m * du[i];
        } else {
            pivot[i] = true;
            let m = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = m;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - m * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -m;
            }
        }
    }
    // forward sweep
    for i in 0..n - 1 {
        if pivot[i] {
            rhs.swap(i, i + 1);
        }
        rhs[i + 1] -= dl[i] * rhs[i];
    }
    // back substitution
    let mut v = vec![0.0; n];
    let safe = |x: f64| if x == 0.0 { 1e-300 } else { x };
    v[n - 1] = rhs[n - 1] / safe(d[n - 1]);
    if n >= 2 {
        v[n - 2] = (rhs[n - 2] - du[n - 2] * v[n - 1]) / safe(d[n - 2]);
    }
    for i in (0..n.saturating_sub(2)).rev() {
        v[i] = (rhs[i] - du[i] * v[i + 1] - du2[i] * v[i + 2]) / safe(d[i]);
    }
    v
}

/// Eigenvector by inverse iteration at the converged eigenvalue,
/// normalized to sum(v^2) * h = 1.
fn eigenvector(diag: &[f64], off: &[f64], lambda: f64, h: f64) -> Vec<f64> {
    let n = diag.len();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..4 {
        v = shifted_solve(diag, off, lambda, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
    }
    let scale = (v.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
    v.iter().map(|x| x / scale).collect()
}

// ---------------------------------------------------------------------
// Discretized relative oscillators
// ---------------------------------------------------------------------

struct Mode1D {
    energies: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    xi: Vec<f64>,
    h: f64,
}

/// Central-difference discretization of one relative oscillator
/// -hbar^2/(2 mu) d^2/dxi^2 + mu omega'^2 xi^2 / 2 on [-L, L].
fn solve_mode(mu: f64, params: &SystemParams, grid: &GridSpec, k: usize) -> Mode1D {
    let p = grid.points_per_axis;
    let l = grid.half_width;
    let h = 2.0 * l / (p - 1) as f64;
    let omega_eff = params.effective_frequency();
    let t = params.hbar * params.hbar / (2.0 * mu * h * h);
    let xi: Vec<f64> = (0..p).map(|j| -l + j as f64 * h).collect();
    let diag: Vec<f64> = xi
        .iter()
        .map(|&x| 2.0 * t + 0.5 * mu * omega_eff * omega_eff * x * x)
        .collect();
    let off = vec![-t; p - 1];
    let energies = lowest_eigenvalues(&diag, &off, k);
    let vectors = energies
        .iter()
        .map(|&e| eigenvector(&diag, &off, e, h))
        .collect();
    Mode1D {
        energies,
        vectors,
        xi,
        h,
    }
}

// ---------------------------------------------------------------------
// N = 2: parity classification
// ---------------------------------------------------------------------

fn levels_n2(
    params: &SystemParams,
    stats: Statistics,
    grid: &GridSpec,
    n_levels: usize,
) -> Vec<f64> {
    let mode = solve_mode(params.mass / 2.0, params, grid, 2 * n_levels + 4);
    let p = grid.points_per_axis;
    let mut out = Vec::with_capacity(n_levels);
    for (e, v) in mode.energies.iter().zip(&mode.vectors) {
        // exchanging the two particles flips xi_1
        let parity: f64 = (0..p).map(|j| v[j] * v[p - 1 - j]).sum::<f64>() * mode.h;
        let keep = match stats {
            Statistics::Bose => parity > 0.0,
            Statistics::Fermi => parity < 0.0,
        };
        if keep {
            out.push(*e);
            if out.len() == n_levels {
                break;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------
// N = 3: Kronecker eigenpairs + S3 projector traces
// ---------------------------------------------------------------------

/// 2x2 matrices of the S3 action on the two relative Jacobi modes,
/// paired with the permutation sign: B_P = J M_P R with R the right
/// inverse of the Jacobi matrix J on the zero-mean subspace.
fn s3_actions() -> Vec<(f64, [[f64; 2]; 2])> {
    let j = [[1.0, -1.0, 0.0], [0.5, 0.5, -1.0]];
    // R = J^T (J J^T)^{-1}; J J^T = diag(2, 3/2)
    let r: Vec<[f64; 2]> = (0..3)
        .map(|row| [j[0][row] / 2.0, j[1][row] / 1.5])
        .collect();
    Permutation::all(3)
        .into_iter()
        .map(|p| {
            let mut b = [[0.0; 2]; 2];
            for (a, ja) in j.iter().enumerate() {
                for col in 0..2 {
                    b[a][col] = (0..3).map(|i| ja[i] * r[p.map(i)][col]).sum();
                }
            }
            (p.sign() as f64, b)
        })
        .collect()
}

/// Linear interpolation of a 1D grid function, zero outside the box.
fn interp(v: &[f64], xi: &[f64], h: f64, x: f64) -> f64 {
    let t = (x - xi[0]) / h;
    if t < 0.0 || t > (v.len() - 1) as f64 {
        return 0.0;
    }
    let i0 = (t.floor() as usize).min(v.len() - 2);
    let frac = t - i0 as f64;
    v[i0] * (1.0 - frac) + v[i0 + 1] * frac
}

/// <f, P f> for the separable grid function f = u (x) v under the
/// linear action B on the Jacobi plane.
fn self_overlap(u: &[f64], v: &[f64], xi: &[f64], h: f64, b: &[[f64; 2]; 2]) -> f64 {
    let p = xi.len();
    let mut acc = 0.0;
    for g1 in 0..p {
        for g2 in 0..p {
            let f = u[g1] * v[g2];
            if f == 0.0 {
                continue;
            }
            let x1 = b[0][0] * xi[g1] + b[0][1] * xi[g2];
            let x2 = b[1][0] * xi[g1] + b[1][1] * xi[g2];
            acc += f * interp(u, xi, h, x1) * interp(v, xi, h, x2);
        }
    }
    acc * h * h
}

fn levels_n3(
    params: &SystemParams,
    stats: Statistics,
    grid: &GridSpec,
    n_levels: usize,
) -> Result<Vec<f64>> {
    let k1 = n_levels + 10;
    let mode1 = solve_mode(params.mass / 2.0, params, grid, k1);
    let mode2 = solve_mode(2.0 * params.mass / 3.0, params, grid, k1);

    // all Kronecker pairs, ascending in energy
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(k1 * k1);
    for a in 0..k1 {
        for b in 0..k1 {
            pairs.push((mode1.energies[a] + mode2.energies[b], a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let cluster_tol = 0.05 * params.hbar * params.effective_frequency();
    let actions = s3_actions();
    let mut out = Vec::with_capacity(n_levels);

    let mut idx = 0;
    while idx < pairs.len() && out.len() < n_levels {
        let mut end = idx + 1;
        while end < pairs.len() && pairs[end].0 - pairs[idx].0 < cluster_tol {
            end += 1;
        }
        if end == pairs.len() {
            break; // cluster may be truncated; stop rather than misclassify
        }
        let cluster = &pairs[idx..end];
        let mean =
            cluster.iter().map(|c| c.0).sum::<f64>() / cluster.len() as f64;

        let (mut t_sym, mut t_anti) = (0.0, 0.0);
        for (sign, b) in &actions {
            for &(_, a, c) in cluster {
                let ov = self_overlap(
                    &mode1.vectors[a],
                    &mode2.vectors[c],
                    &mode1.xi,
                    mode1.h,
                    b,
                );
                t_sym += ov;
                t_anti += sign * ov;
            }
        }
        t_sym /= 6.0;
        t_anti /= 6.0;
        let count = match stats {
            Statistics::Bose => t_sym,
            Statistics::Fermi => t_anti,
        };
        let rounded = count.round();
        if (count - rounded).abs() > 0.25 || rounded < -0.25 {
            return Err(Error::Numeric(format!(
                "ambiguous symmetry projection {count:.3} at level cluster {mean:.6}"
            )));
        }
        for _ in 0..rounded as usize {
            if out.len() < n_levels {
                out.push(mean);
            }
        }
        idx = end;
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Public entry point
// ---------------------------------------------------------------------

fn levels_at(
    params: &SystemParams,
    stats: Statistics,
    grid: &GridSpec,
    n_levels: usize,
) -> Result<Vec<f64>> {
    match params.n_particles {
        2 => Ok(levels_n2(params, stats, grid, n_levels)),
        3 => levels_n3(params, stats, grid, n_levels),
        n => Err(Error::Unsupported(format!(
            "grid diagonalization supports N = 2, 3 (got {n})"
        ))),
    }
}

/// The lowest `n_levels` of the requested exchange sector, in units of
/// hbar omega, by finite-difference diagonalization of the relative
/// Hamiltonian. Runs the grid at h and h/2: refuses to answer if a
/// level moves by more than 1% and Richardson-extrapolates otherwise.
pub fn grid_diagonalize(
    params: &SystemParams,
    stats: Statistics,
    grid: &GridSpec,
    n_levels: usize,
) -> Result<Vec<f64>> {
    grid.validate()?;
    if params.dimension != 1 {
        return Err(Error::Unsupported("grid diagonalization is 1D".into()));
    }
    let coarse = levels_at(params, stats, grid, n_levels)?;
    let fine = levels_at(params, stats, &grid.refined(), n_levels)?;
    let unit = params.hbar * params.omega;
    coarse
        .iter()
        .zip(&fine)
        .enumerate()
        .map(|(level, (c, f))| {
            let delta = (f - c).abs();
            if delta > 0.01 * f.abs() {
                return Err(Error::GridNotConverged { level, delta });
            }
            Ok((4.0 * f - c) / 3.0 / unit)
        })
        .collect()
}
