//! Independent brute-force verification: explicit N!-term
//! (anti)symmetrization of oscillator-mode products, the two-step
//! exchange construction, finite-difference Hamiltonian residuals, and
//! Monte Carlo normalization. Nothing here shares an evaluation path
//! with the closed forms it checks.

pub mod exact;
pub mod grid;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jacobi::{axis_from_jacobi, axis_to_jacobi};
use crate::sympoly::hermite;
use crate::system::{apply_permutation, Configuration, Permutation, Statistics, SystemParams};
use crate::wavefn::LogValue;

pub use grid::{grid_diagonalize, GridSpec};

/// Oscillator quanta n_1..n_{N-1} of the Jacobi modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumNumberSet {
    pub n: Vec<usize>,
}

impl QuantumNumberSet {
    /// The 1D Fermi ground assignment (1, 2, ..., N-1): mode i carries
    /// i quanta.
    pub fn fermi_ground(n_particles: usize) -> Self {
        QuantumNumberSet {
            n: (1..n_particles).collect(),
        }
    }
}

const MAX_FACTORIAL_N: usize = 8;

/// Single normalized oscillator mode of relative coordinate i:
/// phi_n(xi_i) = N_{n,i} exp(-alpha_i^2 xi^2 / 2) H_n(alpha_i xi).
pub fn single_mode(n: usize, i: usize, xi: f64, params: &SystemParams) -> f64 {
    let alpha = params.alpha(i).expect("valid mode index");
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let norm = (alpha / (2f64.powi(n as i32) * fact * std::f64::consts::PI.sqrt())).sqrt();
    norm * (-alpha * alpha * xi * xi / 2.0).exp() * hermite(n, &(alpha * xi))
}

/// The full N!-term sum of Eq-by-definition (anti)symmetrization:
/// sum_P a(P) P [phi_{n_1}(xi_1) ... phi_{n_{N-1}}(xi_{N-1})].
pub fn antisymmetrize_product(
    q: &QuantumNumberSet,
    c: &Configuration,
    stats: Statistics,
    params: &SystemParams,
) -> Result<f64> {
    let n = params.n_particles;
    if n > MAX_FACTORIAL_N {
        return Err(Error::Unsupported(format!(
            "factorial enumeration limited to N <= {MAX_FACTORIAL_N}"
        )));
    }
    if c.dimension() != 1 || q.n.len() != n - 1 {
        return Err(Error::ShapeMismatch {
            expected: n - 1,
            got: q.n.len(),
        });
    }
    let mut acc = 0.0;
    for p in Permutation::all(n) {
        let permuted = apply_permutation(&p, c)?;
        let xi = axis_to_jacobi(&permuted.axis(0));
        let mut prod = stats.weight(&p);
        for (idx, &quanta) in q.n.iter().enumerate() {
            prod *= single_mode(quanta, idx + 1, xi[idx], params);
        }
        acc += prod;
    }
    Ok(acc)
}

/// The two-step exchange construction: an inner (N-1)!-fold
/// antisymmetrization of the first N-1 particles with quanta
/// (1, ..., N-2), then an outer N-term sum over the transpositions
/// P_{kN}, with phi_lambda on the last relative mode. Fermi signs
/// throughout.
pub fn two_step_exchange(lambda: usize, c: &Configuration, params: &SystemParams) -> Result<f64> {
    let n = params.n_particles;
    if n > MAX_FACTORIAL_N {
        return Err(Error::Unsupported(format!(
            "factorial enumeration limited to N <= {MAX_FACTORIAL_N}"
        )));
    }
    if c.dimension() != 1 {
        return Err(Error::Unsupported("two_step_exchange is 1D".into()));
    }
    let mut acc = 0.0;
    for k in 0..n {
        let outer = Permutation::transposition(n, k, n - 1);
        let outer_sign = if k == n - 1 { 1.0 } else { -1.0 };
        let base = apply_permutation(&outer, c)?;
        for inner in Permutation::all(n - 1) {
            // extend to fix the last particle
            let mut mapping: Vec<usize> = (0..n - 1).map(|i| inner.map(i)).collect();
            mapping.push(n - 1);
            let p = Permutation::new(mapping)?;
            let permuted = apply_permutation(&p, &base)?;
            let xi = axis_to_jacobi(&permuted.axis(0));
            let mut prod = outer_sign * inner.sign() as f64;
            for i in 1..=n - 2 {
                prod *= single_mode(i, i, xi[i - 1], params);
            }
            prod *= single_mode(lambda, n - 1, xi[n - 2], params);
            acc += prod;
        }
    }
    Ok(acc)
}

/// Relative residual |(H psi)(c)/psi(c) - E| / |E| by central second
/// differences at steps h and h/2, Richardson-extrapolated. The
/// wavefunctions under test carry no center-of-mass excitation, so the
/// full Cartesian Laplacian sees only the relative energy E.
pub fn hamiltonian_residual<F>(
    psi: F,
    e: f64,
    c: &Configuration,
    params: &SystemParams,
    h: f64,
) -> Result<f64>
where
    F: Fn(&Configuration) -> f64,
{
    let psi0 = psi(c);
    let ncoords = c.n_particles() * c.dimension();

    let lap_at = |step: f64| -> f64 {
        let mut lap = 0.0;
        for k in 0..ncoords {
            let mut plus = c.clone();
            let mut minus = c.clone();
            plus.as_mut_slice()[k] += step;
            minus.as_mut_slice()[k] -= step;
            lap += (psi(&plus) - 2.0 * psi0 + psi(&minus)) / (step * step);
        }
        lap
    };

    // node floor relative to the local scale of psi
    let mut scale = psi0.abs();
    for k in 0..ncoords {
        let mut plus = c.clone();
        plus.as_mut_slice()[k] += h;
        scale = scale.max(psi(&plus).abs());
    }
    if psi0.abs() < 1e-8 * scale || scale == 0.0 {
        return Err(Error::NearNode);
    }

    let lap_h = lap_at(h);
    let lap_h2 = lap_at(h / 2.0);
    let lap = (4.0 * lap_h2 - lap_h) / 3.0;

    let kinetic = -params.hbar * params.hbar / (2.0 * params.mass) * lap;
    let potential = 0.5 * params.mass * params.omega * params.omega * c.pair_sum_sq() * psi0;
    let e_est = (kinetic + potential) / psi0;
    Ok((e_est - e).abs() / e.abs())
}

/// Importance-sampled estimate of the squared norm over the relative
/// Jacobi coordinates. The proposal is the product of the mode
/// Gaussians (alpha_i/sqrt(pi)) exp(-alpha_i^2 xi^2) per axis, so the
/// ratio integrand is polynomial. Per-sample RNG streams keep the
/// result bitwise-deterministic for a fixed seed regardless of
/// parallelism.
pub fn mc_normalize_log<F>(
    psi: &F,
    params: &SystemParams,
    samples: usize,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&Configuration) -> LogValue + Sync,
{
    let n = params.n_particles;
    let d = params.dimension;
    let alphas: Vec<f64> = (1..n).map(|i| params.alpha(i)).collect::<Result<_>>()?;
    let log_q_const: f64 = alphas
        .iter()
        .map(|a| (a / std::f64::consts::PI.sqrt()).ln())
        .sum::<f64>()
        * d as f64;

    let ratios: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|sample| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(sample as u64);
            let mut log_q = log_q_const;
            let mut coords = vec![0.0; n * d];
            for axis in 0..d {
                let mut xi = Vec::with_capacity(n);
                for a in &alphas {
                    let sigma = 1.0 / (a * 2f64.sqrt());
                    let v: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * sigma;
                    log_q -= a * a * v * v;
                    xi.push(v);
                }
                xi.push(0.0); // center of mass pinned at the origin
                let xs = axis_from_jacobi(&xi);
                for i in 0..n {
                    coords[i * d + axis] = xs[i];
                }
            }
            let c = Configuration::new(n, d, coords).expect("valid shape");
            let lv = psi(&c);
            if lv.sign == 0 {
                0.0
            } else {
                (2.0 * lv.log_abs - log_q).exp()
            }
        })
        .collect();

    let total: f64 = ratios.iter().sum();
    let mean = total / samples as f64;
    if !mean.is_finite() {
        return Err(Error::Numeric("Monte Carlo norm estimate not finite".into()));
    }
    Ok(mean)
}

/// Value-domain wrapper around [`mc_normalize_log`].
pub fn mc_normalize<F>(psi: &F, params: &SystemParams, samples: usize, seed: u64) -> Result<f64>
where
    F: Fn(&Configuration) -> f64 + Sync,
{
    mc_normalize_log(
        &|c: &Configuration| LogValue::from_value(psi(c)),
        params,
        samples,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefn::{
        eval_bose_excited, eval_fermi_excited_1d, eval_fermi_ground_1d, eval_fermi_ground_1d_log,
        eval_psi_lambda_appendix,
    };

    fn random_config(rng: &mut StdRng, n: usize, d: usize) -> Configuration {
        Configuration::new(n, d, (0..n * d).map(|_| rng.gen_range(-1.5..1.5)).collect()).unwrap()
    }

    /// Gauss-Hermite-free quadrature: plain trapezoid on a wide box is
    /// plenty at these widths.
    fn quad_mode_overlap(m: usize, n: usize, i: usize, params: &SystemParams) -> f64 {
        let l = 12.0;
        let steps = 40_000;
        let h = 2.0 * l / steps as f64;
        let mut acc = 0.0;
        for k in 0..=steps {
            let xi = -l + k as f64 * h;
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            acc += w * single_mode(m, i, xi, params) * single_mode(n, i, xi, params);
        }
        acc * h
    }

    #[test]
    fn single_mode_ground_shape() {
        let p = SystemParams::natural(3, 1).unwrap();
        let v0 = single_mode(0, 1, 0.0, &p);
        assert!(v0 > 0.0);
        for &xi in &[-2.0, -0.5, 0.7, 3.0] {
            let v = single_mode(0, 1, xi, &p);
            assert!(v > 0.0 && v < v0);
        }
    }

    #[test]
    fn single_mode_orthonormality() {
        let p = SystemParams::natural(4, 1).unwrap();
        for i in 1..=3 {
            for m in 0..=6usize {
                for n in m..=6usize {
                    let want = if m == n { 1.0 } else { 0.0 };
                    let got = quad_mode_overlap(m, n, i, &p);
                    assert!((got - want).abs() < 1e-8, "i={i} m={m} n={n}: {got}");
                }
            }
        }
    }

    #[test]
    fn two_particle_closed_forms() {
        // Eq. (9): even n_1 annihilated, odd n_1 gives 2 phi_{n_1}(x_1 - x_2).
        let p = SystemParams::natural(2, 1).unwrap();
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..10 {
            let c = random_config(&mut rng, 2, 1);
            let xi = c.coord(0, 0) - c.coord(1, 0);
            for n1 in 0..=5usize {
                let q = QuantumNumberSet { n: vec![n1] };
                let got = antisymmetrize_product(&q, &c, Statistics::Fermi, &p).unwrap();
                if n1 % 2 == 0 {
                    assert!(got.abs() < 1e-12);
                } else {
                    let want = 2.0 * single_mode(n1, 1, xi, &p);
                    assert!((got - want).abs() < 1e-12 * want.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn ground_assignment_matches_closed_form() {
        // The N!-term sum with quanta n_i = i is the defining form of
        // the 1D Fermi ground state; the ratio to the closed form is a
        // global constant.
        let mut rng = StdRng::seed_from_u64(43);
        for n in 3..=5usize {
            let p = SystemParams::natural(n, 1).unwrap();
            let q = QuantumNumberSet {
                n: (1..n).collect(),
            };
            let mut ratio0 = None;
            for _ in 0..12 {
                let c = random_config(&mut rng, n, 1);
                let brute = antisymmetrize_product(&q, &c, Statistics::Fermi, &p).unwrap();
                let closed = eval_fermi_ground_1d(&c, &p, false);
                if closed.abs() < 1e-6 {
                    continue;
                }
                let r = brute / closed;
                match ratio0 {
                    None => ratio0 = Some(r),
                    Some(r0) => {
                        assert!((r - r0).abs() < 1e-9 * r0.abs(), "n={n}: {r} vs {r0}")
                    }
                }
            }
            assert!(ratio0.is_some());
        }
    }

    #[test]
    fn bose_excited_matches_symmetrized_product() {
        let mut rng = StdRng::seed_from_u64(47);
        for n in 3..=4usize {
            let p = SystemParams::natural(n, 1).unwrap();
            for k in 1..=3usize {
                let mut q = vec![0usize; n - 1];
                q[n - 2] = k + 1;
                let q = QuantumNumberSet { n: q };
                let mut ratio0: Option<f64> = None;
                for _ in 0..20 {
                    let c = random_config(&mut rng, n, 1);
                    let brute = antisymmetrize_product(&q, &c, Statistics::Bose, &p).unwrap();
                    let closed = eval_bose_excited(k, &c, &p, false).unwrap();
                    if closed.abs() < 1e-6 || brute.abs() < 1e-9 {
                        continue;
                    }
                    let r = brute / closed;
                    match ratio0 {
                        None => ratio0 = Some(r),
                        Some(r0) => assert!(
                            (r - r0).abs() < 1e-9 * r0.abs(),
                            "n={n} k={k}: {r} vs {r0}"
                        ),
                    }
                }
                assert!(ratio0.is_some(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn fermi_excited_matches_antisymmetrized_product() {
        let mut rng = StdRng::seed_from_u64(53);
        for n in 3..=5usize {
            let p = SystemParams::natural(n, 1).unwrap();
            for k in 1..=4usize {
                // quanta (1, 2, ..., N-2, N+k)
                let mut quanta: Vec<usize> = (1..n - 1).collect();
                quanta.push(n + k);
                let q = QuantumNumberSet { n: quanta };
                let mut ratio0: Option<f64> = None;
                for _ in 0..20 {
                    let c = random_config(&mut rng, n, 1);
                    let brute = antisymmetrize_product(&q, &c, Statistics::Fermi, &p).unwrap();
                    let closed = eval_fermi_excited_1d(k, &c, &p, false).unwrap();
                    if closed.abs() < 1e-6 || brute.abs() < 1e-9 {
                        continue;
                    }
                    let r = brute / closed;
                    match ratio0 {
                        None => ratio0 = Some(r),
                        Some(r0) => assert!(
                            (r - r0).abs() < 1e-9 * r0.abs(),
                            "n={n} k={k}: {r} vs {r0}"
                        ),
                    }
                }
                assert!(ratio0.is_some(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn two_step_exchange_vanishing_cases() {
        let mut rng = StdRng::seed_from_u64(59);
        for n in 3..=5usize {
            let p = SystemParams::natural(n, 1).unwrap();
            for _ in 0..8 {
                let c = random_config(&mut rng, n, 1);
                for lambda in 0..n - 1 {
                    let v = two_step_exchange(lambda, &c, &p).unwrap();
                    assert!(v.abs() < 1e-10, "n={n} lambda={lambda}: {v}");
                }
                let v = two_step_exchange(n, &c, &p).unwrap();
                assert!(v.abs() < 1e-9, "n={n} lambda=N: {v}");
            }
        }
    }

    #[test]
    fn two_step_matches_full_antisymmetrization() {
        let mut rng = StdRng::seed_from_u64(61);
        for n in 3..=5usize {
            let p = SystemParams::natural(n, 1).unwrap();
            for lambda in (n - 1)..=n + 3 {
                let mut quanta: Vec<usize> = (1..n - 1).collect();
                quanta.push(lambda);
                let q = QuantumNumberSet { n: quanta };
                let mut ratio0: Option<f64> = None;
                for _ in 0..20 {
                    let c = random_config(&mut rng, n, 1);
                    let two = two_step_exchange(lambda, &c, &p).unwrap();
                    let full = antisymmetrize_product(&q, &c, Statistics::Fermi, &p).unwrap();
                    if full.abs() < 1e-8 || two.abs() < 1e-10 {
                        continue;
                    }
                    let r = two / full;
                    match ratio0 {
                        None => ratio0 = Some(r),
                        Some(r0) => assert!(
                            (r - r0).abs() < 1e-8 * r0.abs(),
                            "n={n} lambda={lambda}: {r} vs {r0}"
                        ),
                    }
                }
                if lambda != n {
                    assert!(ratio0.is_some(), "n={n} lambda={lambda}");
                }
            }
        }
    }

    #[test]
    fn two_step_matches_appendix_closed_form() {
        let mut rng = StdRng::seed_from_u64(67);
        for n in 3..=5usize {
            let p = SystemParams::natural(n, 1).unwrap();
            for lambda in (n - 1)..=n + 3 {
                if lambda == n {
                    continue; // both sides identically zero
                }
                let mut ratio0: Option<f64> = None;
                for _ in 0..20 {
                    let c = random_config(&mut rng, n, 1);
                    let two = two_step_exchange(lambda, &c, &p).unwrap();
                    let closed = eval_psi_lambda_appendix(lambda - (n - 1), &c, &p);
                    if closed.abs() < 1e-8 || two.abs() < 1e-10 {
                        continue;
                    }
                    let r = two / closed;
                    match ratio0 {
                        None => ratio0 = Some(r),
                        Some(r0) => assert!(
                            (r - r0).abs() < 1e-8 * r0.abs(),
                            "n={n} lambda={lambda}: {r} vs {r0}"
                        ),
                    }
                }
                assert!(ratio0.is_some(), "n={n} lambda={lambda}");
            }
        }
    }

    #[test]
    fn residual_fermi_ground_1d() {
        let mut rng = StdRng::seed_from_u64(71);
        let p = SystemParams::natural(3, 1).unwrap();
        let e = 4.0 * 3f64.sqrt();
        let mut checked = 0;
        while checked < 50 {
            let c = random_config(&mut rng, 3, 1);
            match hamiltonian_residual(
                |c| eval_fermi_ground_1d(c, &p, false),
                e,
                &c,
                &p,
                1e-3,
            ) {
                Ok(r) => {
                    assert!(r <= 1e-6, "residual {r}");
                    checked += 1;
                }
                Err(Error::NearNode) => continue,
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn residual_detects_wrong_energy() {
        let mut rng = StdRng::seed_from_u64(73);
        let p = SystemParams::natural(3, 1).unwrap();
        let e = 4.0 * 3f64.sqrt();
        let wrong = e + 1.0;
        let mut detected = 0;
        let mut tried = 0;
        while tried < 20 {
            let c = random_config(&mut rng, 3, 1);
            if let Ok(r) = hamiltonian_residual(
                |c| eval_fermi_ground_1d(c, &p, false),
                wrong,
                &c,
                &p,
                1e-3,
            ) {
                tried += 1;
                if (r - 1.0 / wrong).abs() < 1e-3 {
                    detected += 1;
                }
            }
        }
        assert!(detected >= 18, "only {detected}/20 detected");
    }

    #[test]
    fn mc_normalize_printed_c0() {
        for n in 2..=3usize {
            let p = SystemParams::natural(n, 1).unwrap();
            let psi = |c: &Configuration| eval_fermi_ground_1d_log(c, &p, true);
            let norm = mc_normalize_log(&psi, &p, 200_000, 7).unwrap();
            assert!((norm - 1.0).abs() < 0.02, "n={n}: {norm}");
        }
    }

    #[test]
    fn mc_normalize_quadratic_scaling_and_determinism() {
        let p = SystemParams::natural(3, 1).unwrap();
        let psi = |c: &Configuration| eval_fermi_ground_1d(c, &p, true);
        let psi2 = |c: &Configuration| 2.0 * eval_fermi_ground_1d(c, &p, true);
        let a = mc_normalize(&psi, &p, 20_000, 11).unwrap();
        let b = mc_normalize(&psi2, &p, 20_000, 11).unwrap();
        assert!((b / a - 4.0).abs() < 1e-9);
        let again = mc_normalize(&psi, &p, 20_000, 11).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn mc_error_scales_as_inverse_sqrt() {
        // spread across seeds at three sample counts
        let p = SystemParams::natural(3, 1).unwrap();
        let psi = |c: &Configuration| eval_fermi_ground_1d(c, &p, true);
        let spread = |samples: usize| -> f64 {
            let vals: Vec<f64> = (0..8)
                .map(|s| mc_normalize(&psi, &p, samples, 100 + s).unwrap())
                .collect();
            let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt()
        };
        let s1 = spread(2_000);
        let s4 = spread(32_000);
        // 16x the samples should shrink the spread by about 4; allow slack
        let ratio = s1 / s4;
        assert!(ratio > 2.0 && ratio < 8.0, "ratio {ratio}");
    }
}
