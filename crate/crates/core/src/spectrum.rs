//! Energy levels and degeneracies: 1D Bose/Fermi spectra, the
//! D-dimensional shell structure, ground energies, asymptotics, excited
//! levels, and the ground-state degeneracy count.
//!
//! Energies are reported in units of hbar*omega.

use num::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::{Statistics, SystemParams};

/// One energy level: excitation label, energy in hbar*omega units,
/// degeneracy (None when the level's degeneracy is not known), and a
/// flag marking levels whose closed-form eigenfunction is identically
/// zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLine {
    pub label: usize,
    pub energy: f64,
    pub degeneracy: Option<u128>,
    pub vanishes_identically: bool,
}

/// Shell bookkeeping for the D-dimensional Fermi ground state: K is the
/// highest partially filled shell, `n_filled` counts states in shells
/// below K, `capacity` is the shell-K size, `leftover` the fermions
/// placed in shell K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShellStructure {
    pub k: u64,
    pub n_filled: u64,
    pub d_prev: u64,
    pub capacity: u64,
    pub leftover: u64,
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc
}

/// The unique shell index K with
/// binom(K+D-1, D) <= N-1 < binom(K+D, D), found by exact integer
/// search, plus the derived counts.
pub fn shell_structure(n: usize, d: usize) -> ShellStructure {
    assert!(n >= 2 && d >= 1);
    let target = (n - 1) as u128;
    let d64 = d as u64;
    let mut k: u64 = 1;
    loop {
        let below = binomial(k + d64 - 1, d64);
        let upto = binomial(k + d64, d64);
        if below <= target && target < upto {
            let n_filled = below as u64;
            return ShellStructure {
                k,
                n_filled,
                d_prev: binomial(k + d64 - 2, d64 - 1) as u64,
                capacity: binomial(k + d64 - 1, d64 - 1) as u64,
                leftover: n as u64 - n_filled,
            };
        }
        k += 1;
    }
}

/// 1D Bose level k: E_0 = (N-1)/2 * sqrt(N), E_k = E_0 + (k+1) sqrt(N)
/// for k >= 1 (the level E_0 + sqrt(N) is absent). Non-degenerate.
pub fn energy_1d_bose(k: usize, params: &SystemParams) -> SpectrumLine {
    let n = params.n_particles as f64;
    let sqrt_n = n.sqrt();
    let e0 = (n - 1.0) / 2.0 * sqrt_n;
    let energy = if k == 0 {
        e0
    } else {
        e0 + (k as f64 + 1.0) * sqrt_n
    };
    SpectrumLine {
        label: k,
        energy,
        degeneracy: Some(1),
        vanishes_identically: crate::wavefn::vanishes_identically(Statistics::Bose, k, params),
    }
}

/// 1D Fermi level i: E_0 = (N^2-1)/2 * sqrt(N), E_i = E_0 + (i+1) sqrt(N)
/// for i >= 1. Non-degenerate.
pub fn energy_1d_fermi(i: usize, params: &SystemParams) -> SpectrumLine {
    let n = params.n_particles as f64;
    let sqrt_n = n.sqrt();
    let e0 = (n * n - 1.0) / 2.0 * sqrt_n;
    let energy = if i == 0 {
        e0
    } else {
        e0 + (i as f64 + 1.0) * sqrt_n
    };
    SpectrumLine {
        label: i,
        energy,
        degeneracy: Some(1),
        vanishes_identically: crate::wavefn::vanishes_identically(Statistics::Fermi, i, params),
    }
}

/// Rational part of the D-dimensional Fermi ground energy:
/// E_0 / (hbar omega sqrt(N)) = (K + D/2) N - binom(K+D, D+1) - D/2,
/// exact.
pub fn ground_energy_fermi_d_rational(n: usize, d: usize) -> BigRational {
    let shell = shell_structure(n, d);
    let half_d = BigRational::from_i64(d as i64) / BigRational::from_i64(2);
    let k = BigRational::from_i64(shell.k as i64);
    let filled = binomial(shell.k + d as u64, d as u64 + 1);
    (k + half_d.clone()) * BigRational::from_i64(n as i64)
        - BigRational::from_i64(filled as i64)
        - half_d
}

/// D-dimensional Fermi ground energy in hbar*omega units:
/// sqrt(N) [ (K + D/2) N - (1/(D+1)!) prod_{i=0}^{D}(K+i) - D/2 ].
pub fn ground_energy_fermi_d(params: &SystemParams) -> f64 {
    let n = params.n_particles;
    let rational: f64 = {
        use num::ToPrimitive;
        ground_energy_fermi_d_rational(n, params.dimension)
            .to_f64()
            .expect("finite")
    };
    (n as f64).sqrt() * rational
}

/// Leading large-N term: sqrt(N) * (D N / (D+1)) * [D! (N-1)]^(1/D),
/// in hbar*omega units.
pub fn asymptotic_ground_energy(n: usize, d: usize) -> f64 {
    let nf = n as f64;
    let df = d as f64;
    let d_fact: f64 = (1..=d as u64).map(|i| i as f64).product();
    nf.sqrt() * (df * nf / (df + 1.0)) * (d_fact * (nf - 1.0)).powf(1.0 / df)
}

/// Ground-state degeneracy binom(capacity, leftover), exact.
pub fn degeneracy_ground_d(n: usize, d: usize) -> u128 {
    let shell = shell_structure(n, d);
    binomial(shell.capacity, shell.leftover)
}

/// D-dimensional Fermi excited level (D >= 2):
/// E_i = E_0 + i sqrt(N). No level is missing; excited degeneracies
/// are not known and are reported as None.
pub fn energy_d_excited(i: usize, params: &SystemParams) -> Result<SpectrumLine> {
    if params.dimension < 2 {
        return Err(Error::Unsupported(
            "D-dimensional excited levels require D >= 2; use energy_1d_fermi for D = 1".into(),
        ));
    }
    let e0 = ground_energy_fermi_d(params);
    let energy = e0 + i as f64 * (params.n_particles as f64).sqrt();
    let degeneracy = if i == 0 {
        Some(degeneracy_ground_d(params.n_particles, params.dimension))
    } else {
        None
    };
    Ok(SpectrumLine {
        label: i,
        energy,
        degeneracy,
        vanishes_identically: false,
    })
}

/// One row of the ground-state-energy table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure1Row {
    pub n: usize,
    pub d: usize,
    pub e0: f64,
}

/// Fermi ground energies over a grid of particle numbers and
/// dimensions, in hbar*omega units.
pub fn figure1_table(n_values: &[usize], dims: &[usize]) -> Vec<Figure1Row> {
    let mut rows = Vec::with_capacity(n_values.len() * dims.len());
    for &n in n_values {
        for &d in dims {
            let params = SystemParams::natural(n, d).expect("valid");
            rows.push(Figure1Row {
                n,
                d,
                e0: ground_energy_fermi_d(&params),
            });
        }
    }
    rows
}

/// CSV form of the table, header `N,D,E0`, full double precision.
pub fn figure1_csv(rows: &[Figure1Row]) -> String {
    let mut out = String::from("N,D,E0\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.16e}\n", r.n, r.d, r.e0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn shell_examples() {
        let s = shell_structure(3, 3);
        assert_eq!(s.k, 1);
        assert_eq!((s.n_filled, s.capacity, s.leftover), (1, 3, 2));

        let s = shell_structure(5, 1);
        assert_eq!(s.k, 4);
        assert_eq!((s.capacity, s.leftover), (1, 1));

        let s = shell_structure(6, 2);
        assert_eq!(s.k, 2);
        assert_eq!((s.n_filled, s.capacity, s.leftover), (3, 3, 3));
    }

    #[test]
    fn shell_one_dimension_forces_k() {
        for n in 2..=40 {
            let s = shell_structure(n, 1);
            assert_eq!(s.k, n as u64 - 1);
            assert_eq!(s.capacity, 1);
            assert_eq!(s.leftover, 1);
        }
    }

    #[test]
    fn shell_consistency_counts() {
        // Filling shell K adds exactly `capacity` states.
        for d in 1..=5u64 {
            for k in 1..=12u64 {
                let below = binomial(k + d - 1, d);
                let upto = binomial(k + d, d);
                let capacity = binomial(k + d - 1, d - 1);
                assert_eq!(upto - below, capacity, "d={d} k={k}");
            }
        }
    }

    #[test]
    fn bose_energies() {
        let p = SystemParams::natural(2, 1).unwrap();
        assert!((energy_1d_bose(0, &p).energy - 0.5 * 2f64.sqrt()).abs() < 1e-14);
        let p = SystemParams::natural(3, 1).unwrap();
        let s3 = 3f64.sqrt();
        assert!((energy_1d_bose(0, &p).energy - s3).abs() < 1e-14);
        assert!((energy_1d_bose(1, &p).energy - 3.0 * s3).abs() < 1e-13);
        assert_eq!(energy_1d_bose(1, &p).degeneracy, Some(1));
    }

    #[test]
    fn fermi_energies_1d() {
        let p = SystemParams::natural(2, 1).unwrap();
        let s2 = 2f64.sqrt();
        assert!((energy_1d_fermi(0, &p).energy - 1.5 * s2).abs() < 1e-14);
        assert!((energy_1d_fermi(1, &p).energy - 3.5 * s2).abs() < 1e-13);
        let p = SystemParams::natural(3, 1).unwrap();
        assert!((energy_1d_fermi(0, &p).energy - 4.0 * 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn ground_energy_d_examples() {
        let p = SystemParams::natural(3, 3).unwrap();
        assert!((ground_energy_fermi_d(&p) - 5.0 * 3f64.sqrt()).abs() < 1e-12);
        let p = SystemParams::natural(4, 2).unwrap();
        assert!((ground_energy_fermi_d(&p) - 14.0).abs() < 1e-12);
    }

    #[test]
    fn ground_energy_reduces_to_1d_formula() {
        for n in 2..=200usize {
            let got = ground_energy_fermi_d_rational(n, 1);
            let want = rat((n * n - 1) as i64, 2);
            assert_eq!(got, want, "n={n}");
        }
    }

    #[test]
    fn asymptotic_ratio() {
        // D=1, huge N: exact (N^2-1)/2 vs leading N(N-1)/2.
        let n = 1_000_000usize;
        let exact = (n as f64).sqrt() * ((n as f64).powi(2) - 1.0) / 2.0;
        let asym = asymptotic_ground_energy(n, 1);
        assert!((asym / exact - 1.0).abs() < 1e-5);

        let p = SystemParams::natural(10_000, 2).unwrap();
        let exact = ground_energy_fermi_d(&p);
        let asym = asymptotic_ground_energy(10_000, 2);
        assert!((asym / exact - 1.0).abs() < 0.05);
    }

    #[test]
    fn asymptotic_ratio_monotone() {
        for d in 1..=3usize {
            let mut prev_gap = f64::INFINITY;
            for &n in &[100usize, 1_000, 10_000, 100_000, 1_000_000] {
                let p = SystemParams::natural(n, d).unwrap();
                let gap = (asymptotic_ground_energy(n, d) / ground_energy_fermi_d(&p) - 1.0).abs();
                assert!(gap < prev_gap, "d={d} n={n}: {gap} !< {prev_gap}");
                prev_gap = gap;
            }
        }
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy_ground_d(3, 3), 3);
        assert_eq!(degeneracy_ground_d(6, 2), 1);
        for n in 2..=20 {
            assert_eq!(degeneracy_ground_d(n, 1), 1, "n={n}");
        }
    }

    #[test]
    fn degeneracy_one_iff_closed_shell_or_1d() {
        for n in 2..=60usize {
            for d in 1..=5usize {
                let s = shell_structure(n, d);
                let deg = degeneracy_ground_d(n, d);
                let closed = s.leftover == s.capacity;
                assert_eq!(deg == 1, closed || d == 1 || s.leftover == 0, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn excited_d_levels() {
        let p = SystemParams::natural(3, 3).unwrap();
        let s3 = 3f64.sqrt();
        let l0 = energy_d_excited(0, &p).unwrap();
        assert!((l0.energy - 5.0 * s3).abs() < 1e-12);
        assert_eq!(l0.degeneracy, Some(3));
        let l1 = energy_d_excited(1, &p).unwrap();
        assert!((l1.energy - 6.0 * s3).abs() < 1e-12);
        assert_eq!(l1.degeneracy, None);
        assert!((energy_d_excited(2, &p).unwrap().energy - 7.0 * s3).abs() < 1e-12);

        let p1 = SystemParams::natural(3, 1).unwrap();
        assert!(energy_d_excited(1, &p1).is_err());
    }

    #[test]
    fn level_monotonicity_and_first_gap() {
        for n in 2..=6usize {
            let p = SystemParams::natural(n, 1).unwrap();
            let sqrt_n = (n as f64).sqrt();
            for (f, name) in [
                (energy_1d_bose as fn(usize, &SystemParams) -> SpectrumLine, "bose"),
                (energy_1d_fermi, "fermi"),
            ] {
                let es: Vec<f64> = (0..6).map(|k| f(k, &p).energy).collect();
                for w in es.windows(2) {
                    assert!(w[1] > w[0], "{name} n={n}");
                }
                assert!(((es[1] - es[0]) / sqrt_n - 2.0).abs() < 1e-12, "{name}");
                for k in 1..5 {
                    assert!(((es[k + 1] - es[k]) / sqrt_n - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn figure1_values_and_trend() {
        let ns: Vec<usize> = (2..=100).collect();
        let rows = figure1_table(&ns, &[1, 2, 3]);
        assert_eq!(rows.len(), 99 * 3);
        let e = |n: usize, d: usize| {
            rows.iter()
                .find(|r| r.n == n && r.d == d)
                .map(|r| r.e0)
                .unwrap()
        };
        assert!((e(20, 1) - 892.1911).abs() < 0.01);
        assert!((e(20, 2) - 375.6594).abs() < 0.01);
        assert!((e(20, 3) - 328.7020).abs() < 0.01);
        for n in 10..=100usize {
            assert!(e(n, 1) > e(n, 2) && e(n, 2) > e(n, 3), "n={n}");
        }
        assert!(figure1_table(&[2, 3], &[]).is_empty());
    }
}
