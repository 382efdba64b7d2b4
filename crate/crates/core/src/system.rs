//! Shared domain types: system parameters, particle configurations,
//! permutations, and exchange statistics.

use std::io::BufRead;

use crate::error::{Error, Result};

/// Exchange symmetry class of the identical particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Bose,
    Fermi,
}

impl Statistics {
    /// Weight a(P) of a permutation: always +1 for bosons, the
    /// permutation sign for fermions.
    pub fn weight(self, p: &Permutation) -> f64 {
        match self {
            Statistics::Bose => 1.0,
            Statistics::Fermi => p.sign() as f64,
        }
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bose" | "boson" => Ok(Statistics::Bose),
            "fermi" | "fermion" => Ok(Statistics::Fermi),
            other => Err(Error::InvalidParams(format!("unknown statistics `{other}`"))),
        }
    }
}

/// Physical parameters of the N-body oscillator system.
///
/// Every pair interacts through (1/2) m omega^2 (r_i - r_j)^2; the
/// relative motion decouples into N-1 oscillators at the effective
/// frequency sqrt(N) * omega.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub n_particles: usize,
    pub dimension: usize,
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl SystemParams {
    pub fn new(
        n_particles: usize,
        dimension: usize,
        mass: f64,
        omega: f64,
        hbar: f64,
    ) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::InvalidParams(format!(
                "n_particles must be >= 2, got {n_particles}"
            )));
        }
        if dimension < 1 {
            return Err(Error::InvalidParams("dimension must be >= 1".into()));
        }
        if mass.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
            || omega.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
            || hbar.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        {
            return Err(Error::InvalidParams(format!(
                "mass, omega, hbar must be positive (got {mass}, {omega}, {hbar})"
            )));
        }
        Ok(SystemParams {
            n_particles,
            dimension,
            mass,
            omega,
            hbar,
        })
    }

    /// Natural units: hbar = m = omega = 1.
    pub fn natural(n_particles: usize, dimension: usize) -> Result<Self> {
        SystemParams::new(n_particles, dimension, 1.0, 1.0, 1.0)
    }

    /// Effective single-mode frequency omega' = sqrt(N) * omega.
    pub fn effective_frequency(&self) -> f64 {
        (self.n_particles as f64).sqrt() * self.omega
    }

    /// Reduced mass mu_i = i/(i+1) * m of the i-th Jacobi mode,
    /// 1 <= i <= N-1.
    pub fn reduced_mass(&self, i: usize) -> Result<f64> {
        if i < 1 || i > self.n_particles - 1 {
            return Err(Error::IndexOutOfRange {
                index: i,
                min: 1,
                max: self.n_particles - 1,
            });
        }
        Ok(i as f64 / (i as f64 + 1.0) * self.mass)
    }

    /// Gaussian width parameter alpha_i = sqrt(mu_i * omega' / hbar)
    /// of the i-th Jacobi mode.
    pub fn alpha(&self, i: usize) -> Result<f64> {
        Ok((self.reduced_mass(i)? * self.effective_frequency() / self.hbar).sqrt())
    }
}

/// An N x D array of particle coordinates, row-major, one particle per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    n_particles: usize,
    dimension: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn new(n_particles: usize, dimension: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != n_particles * dimension {
            return Err(Error::ShapeMismatch {
                expected: n_particles * dimension,
                got: coords.len(),
            });
        }
        for (idx, v) in coords.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / dimension,
                    col: idx % dimension,
                });
            }
        }
        Ok(Configuration {
            n_particles,
            dimension,
            coords,
        })
    }

    /// 1D configuration from a slice of particle positions.
    pub fn from_1d(xs: &[f64]) -> Result<Self> {
        Configuration::new(xs.len(), 1, xs.to_vec())
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Coordinate of particle `i` (0-based) along axis `axis`.
    pub fn coord(&self, i: usize, axis: usize) -> f64 {
        self.coords[i * self.dimension + axis]
    }

    pub fn coord_mut(&mut self, i: usize, axis: usize) -> &mut f64 {
        &mut self.coords[i * self.dimension + axis]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    /// Coordinates of one axis across all particles.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        (0..self.n_particles).map(|i| self.coord(i, axis)).collect()
    }

    /// Squared distance |r_i - r_j|^2.
    pub fn pair_dist_sq(&self, i: usize, j: usize) -> f64 {
        (0..self.dimension)
            .map(|a| {
                let d = self.coord(i, a) - self.coord(j, a);
                d * d
            })
            .sum()
    }

    /// Sum of squared pair distances over all N(N-1)/2 pairs.
    pub fn pair_sum_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n_particles {
            for j in 0..i {
                s += self.pair_dist_sq(i, j);
            }
        }
        s
    }
}

/// A bijection on {0..N-1} with its parity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n || seen[v] {
                return Err(Error::InvalidParams(format!(
                    "not a bijection on 0..{n}: {mapping:?}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    /// Transposition of `a` and `b` on `n` elements.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.swap(a, b);
        Permutation { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn map(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    /// Parity via cycle decomposition: (-1)^(n - #cycles).
    pub fn sign(&self) -> i32 {
        let n = self.mapping.len();
        let mut visited = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if visited[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                i = self.mapping[i];
            }
        }
        if (n - cycles).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Composition compatible with the row-mapping action:
    /// apply(p.compose(q), c) = apply(p, apply(q, c)).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mapping = (0..self.mapping.len())
            .map(|i| other.map(self.map(i)))
            .collect();
        Permutation { mapping }
    }

    /// All N! permutations of n elements.
    pub fn all(n: usize) -> Vec<Permutation> {
        use itertools::Itertools;
        (0..n)
            .permutations(n)
            .map(|mapping| Permutation { mapping })
            .collect()
    }
}

/// Permute particle rows: row i of the output is row p(i) of the input.
/// The sign is not applied to coordinates.
pub fn apply_permutation(p: &Permutation, c: &Configuration) -> Result<Configuration> {
    if p.len() != c.n_particles() {
        return Err(Error::ShapeMismatch {
            expected: c.n_particles(),
            got: p.len(),
        });
    }
    let d = c.dimension();
    let mut coords = Vec::with_capacity(c.n_particles() * d);
    for i in 0..c.n_particles() {
        coords.extend_from_slice(c.row(p.map(i)));
    }
    Configuration::new(c.n_particles(), d, coords)
}

/// Parse a configuration from CSV: one particle per row, D columns,
/// header optional. Values are decimal floats.
pub fn parse_configuration_csv<R: BufRead>(reader: R) -> Result<Configuration> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(vals) => rows.push(vals),
            Err(e) => {
                // A non-numeric first line is an optional header.
                if lineno == 0 && rows.is_empty() {
                    continue;
                }
                return Err(Error::Csv {
                    line: lineno + 1,
                    msg: e.to_string(),
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Csv {
            line: 0,
            msg: "no data rows".into(),
        });
    }
    let d = rows[0].len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            return Err(Error::Csv {
                line: i + 1,
                msg: format!("expected {d} columns, got {}", r.len()),
            });
        }
    }
    let n = rows.len();
    Configuration::new(n, d, rows.into_iter().flatten().collect())
}
