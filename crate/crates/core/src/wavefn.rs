//! Evaluation of the closed-form eigenfunctions: 1D Bose ground and
//! excited states, 1D Fermi ground and excited states (with the
//! analytic constants C0 and C1), the general lambda' family, and the
//! D-dimensional Fermi ground states built from the determinant of
//! shell monomials.
//!
//! Every evaluator has a log-domain return path (log|psi|, sign) next
//! to the direct value, since the Vandermonde times Gaussian product
//! under/overflows beyond N of about 10.

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::spectrum::{shell_structure, ShellStructure};
use crate::sympoly::{hermite, SymmetricContext};
use crate::system::{Configuration, Statistics, SystemParams};

/// A wavefunction amplitude in sign/log-magnitude form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub log_abs: f64,
    pub sign: i8,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue {
            log_abs: f64::NEG_INFINITY,
            sign: 0,
        }
    }

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            return LogValue::zero();
        }
        LogValue {
            log_abs: v.abs().ln(),
            sign: if v > 0.0 { 1 } else { -1 },
        }
    }

    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }

    /// Multiply by a positive factor given in log form.
    pub fn scaled(&self, log_factor: f64) -> Self {
        if self.sign == 0 {
            return *self;
        }
        LogValue {
            log_abs: self.log_abs + log_factor,
            sign: self.sign,
        }
    }
}

/// Exponent of the Gaussian pair factor:
/// -(m omega / (2 sqrt(N) hbar)) * sum over all pairs |r_i - r_j|^2.
pub fn gaussian_log(c: &Configuration, params: &SystemParams) -> f64 {
    let n = params.n_particles as f64;
    -params.mass * params.omega / (2.0 * n.sqrt() * params.hbar) * c.pair_sum_sq()
}

/// The Gaussian pair factor itself.
pub fn gaussian_pair_factor(c: &Configuration, params: &SystemParams) -> f64 {
    gaussian_log(c, params).exp()
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// prod_{i>j} (x_i - x_j) in sign/log form.
fn vandermonde_log(xs: &[f64]) -> LogValue {
    let mut log_abs = 0.0;
    let mut sign: i8 = 1;
    for i in 1..xs.len() {
        for j in 0..i {
            let d = xs[i] - xs[j];
            if d == 0.0 {
                return LogValue::zero();
            }
            log_abs += d.abs().ln();
            if d < 0.0 {
                sign = -sign;
            }
        }
    }
    LogValue { log_abs, sign }
}

/// The symmetric-polynomial factor S(lambda) of the 1D Fermi state
/// psi(lambda) = C * prod(x_i - x_j) * exp(gauss) * S(lambda), obtained
/// by expanding the Hermite polynomial of the last Jacobi mode and
/// folding each power through the antisymmetrized power-sum identity.
/// Returns (value, scale), where scale accumulates |term| so callers
/// can detect identical vanishing.
pub fn fermi_symmetric_part(lambda: usize, xs: &[f64], params: &SystemParams) -> (f64, f64) {
    let n = xs.len();
    if lambda < n - 1 {
        return (0.0, 0.0);
    }
    let ctx = SymmetricContext::new(xs.to_vec());
    let sigma1: f64 = ctx.elementary_symmetric(1);
    let v = ctx.v_up_to(lambda - (n - 1));
    let alpha = params.alpha(n - 1).expect("valid mode");
    let two_alpha = 2.0 * alpha;
    let nf = n as f64;

    let mut sum = 0.0;
    let mut scale = 0.0;
    for s in 0..=lambda / 2 {
        let l = lambda - 2 * s;
        if l < n - 1 {
            break;
        }
        let sign_s = if s % 2 == 0 { 1.0 } else { -1.0 };
        let coeff_h = fact(lambda) * sign_s * two_alpha.powi(l as i32) / (fact(s) * fact(l));
        for i in 0..=l - (n - 1) {
            let c2 = fact(l) * (-nf).powi((l - i) as i32)
                / ((nf - 1.0).powi(l as i32) * fact(i) * fact(l - i));
            let term = coeff_h * c2 * sigma1.powi(i as i32) * v[l - (n - 1) - i];
            sum += term;
            scale += term.abs();
        }
    }
    (sum, scale)
}

/// Scale carried by S(N-1): the ground state is
/// prod(x_ij) * exp(gauss) * kappa_0.
fn kappa_ground(params: &SystemParams) -> f64 {
    let n = params.n_particles;
    let nf = n as f64;
    let alpha = params.alpha(n - 1).expect("valid mode");
    ((2.0 * alpha) * -nf / (nf - 1.0)).powi(n as i32 - 1)
}

/// Scale relating S(N+1) to the simplified first-excited closed form:
/// S(N+1) = kappa_1 * [sum_pairs x_ij^2 - hbar sqrt(N)(N^2-1)/(2 m omega)].
fn kappa_first_excited(params: &SystemParams) -> f64 {
    let n = params.n_particles as f64;
    let alpha = params.alpha(params.n_particles - 1).expect("valid mode");
    kappa_ground(params) * 2.0 * alpha * alpha * n / (n - 1.0).powi(2)
}

/// log of the printed ground-state normalization constant C0.
pub fn log_c0(params: &SystemParams) -> f64 {
    let n = params.n_particles;
    let nf = n as f64;
    let mw = params.mass * params.omega / params.hbar;
    let mut log_sq = (nf * nf - 1.0) / 2.0 * mw.ln();
    log_sq += (1.0 - nf) / 2.0 * std::f64::consts::PI.ln();
    log_sq += (nf * nf - 3.0) / 4.0 * nf.ln();
    for i in 1..=n {
        log_sq += (i as f64 - 1.0) * 2f64.ln() - fact(i).ln();
    }
    0.5 * log_sq
}

/// log of the printed first-excited normalization constant C1.
pub fn log_c1(params: &SystemParams) -> f64 {
    let nf = params.n_particles as f64;
    let mw = params.mass * params.omega / params.hbar;
    // C1^2 = C0^2 * (m omega/hbar)^2 * 2/(N(N^2-1))
    log_c0(params) + mw.ln() + 0.5 * (2.0 / (nf * (nf * nf - 1.0))).ln()
}

// ---------------------------------------------------------------------
// 1D evaluators
// ---------------------------------------------------------------------

/// Bose ground state: C * exp(gauss). Valid for any D (the exponent
/// uses |r_ij|^2). The analytic constant normalizes the relative
/// coordinates.
pub fn eval_bose_ground_log(c: &Configuration, params: &SystemParams, normalized: bool) -> LogValue {
    let g = gaussian_log(c, params);
    let log_const = if normalized {
        let mut acc = 0.0;
        for i in 1..params.n_particles {
            let alpha = params.alpha(i).expect("valid mode");
            acc += 0.5 * (alpha / std::f64::consts::PI.sqrt()).ln();
        }
        acc * params.dimension as f64
    } else {
        0.0
    };
    LogValue {
        log_abs: g + log_const,
        sign: 1,
    }
}

pub fn eval_bose_ground(c: &Configuration, params: &SystemParams, normalized: bool) -> f64 {
    eval_bose_ground_log(c, params, normalized).value()
}

/// The symmetric Hermite sum of the Bose excited state:
/// sum_j H_{k+1}[ sqrt(m omega / (sqrt(N)(N-1) hbar)) (sum_i x_i - N x_j) ].
/// Returns (value, scale) with scale the sum of |terms|.
pub fn bose_excited_sum(k: usize, xs: &[f64], params: &SystemParams) -> (f64, f64) {
    let n = xs.len() as f64;
    let coeff =
        (params.mass * params.omega / (n.sqrt() * (n - 1.0) * params.hbar)).sqrt();
    let total: f64 = xs.iter().sum();
    let mut sum = 0.0;
    let mut scale = 0.0;
    for &x in xs {
        let h = hermite(k + 1, &(coeff * (total - n * x)));
        sum += h;
        scale += h.abs();
    }
    (sum, scale)
}

/// 1D Bose excited state k >= 1: gauss times the symmetric Hermite sum;
/// the prefactor is fixed numerically when `normalized` is set.
pub fn eval_bose_excited_log(
    k: usize,
    c: &Configuration,
    params: &SystemParams,
    normalized: bool,
) -> Result<LogValue> {
    if k == 0 {
        return Ok(eval_bose_ground_log(c, params, normalized));
    }
    if params.dimension != 1 {
        return Err(Error::Unsupported(
            "Bose excited closed forms are 1D only".into(),
        ));
    }
    let (sum, _) = bose_excited_sum(k, &c.axis(0), params);
    let g = gaussian_log(c, params);
    let base = LogValue::from_value(sum).scaled(g);
    if normalized {
        let log_const = normalization_log_constant(&DescriptorKey::bose(k, params))?;
        Ok(base.scaled(log_const))
    } else {
        Ok(base)
    }
}

pub fn eval_bose_excited(
    k: usize,
    c: &Configuration,
    params: &SystemParams,
    normalized: bool,
) -> Result<f64> {
    Ok(eval_bose_excited_log(k, c, params, normalized)?.value())
}

/// 1D Fermi ground state: C0 * prod(x_i - x_j) * exp(gauss).
pub fn eval_fermi_ground_1d_log(
    c: &Configuration,
    params: &SystemParams,
    normalized: bool,
) -> LogValue {
    let vdm = vandermonde_log(&c.axis(0));
    let g = gaussian_log(c, params);
    let log_const = if normalized { log_c0(params) } else { 0.0 };
    vdm.scaled(g + log_const)
}

pub fn eval_fermi_ground_1d(c: &Configuration, params: &SystemParams, normalized: bool) -> f64 {
    eval_fermi_ground_1d_log(c, params, normalized).value()
}

/// 1D Fermi excited state k >= 1:
/// prod(x_ij) * exp(gauss) * S(N+k), with the analytic C1 for k = 1 and
/// a numerically fixed constant otherwise when `normalized` is set.
pub fn eval_fermi_excited_1d_log(
    k: usize,
    c: &Configuration,
    params: &SystemParams,
    normalized: bool,
) -> Result<LogValue> {
    if k == 0 {
        return Ok(eval_fermi_ground_1d_log(c, params, normalized));
    }
    if params.dimension != 1 {
        return Err(Error::Unsupported(
            "Fermi excited closed forms are 1D only".into(),
        ));
    }
    let xs = c.axis(0);
    let (s, _) = fermi_symmetric_part(params.n_particles + k, &xs, params);
    let vdm = vandermonde_log(&xs);
    let scaled = LogValue::from_value(s).scaled(gaussian_log(c, params) + vdm.log_abs);
    let base = LogValue {
        log_abs: scaled.log_abs,
        sign: scaled.sign * vdm.sign,
    };
    if !normalized {
        return Ok(base);
    }
    if k == 1 {
        // C1/kappa_1 turns S(N+1) into the printed simplified form.
        let kappa = kappa_first_excited(params);
        let scaled = base.scaled(log_c1(params) - kappa.abs().ln());
        Ok(LogValue {
            log_abs: scaled.log_abs,
            sign: scaled.sign * kappa.signum() as i8,
        })
    } else {
        let log_const = normalization_log_constant(&DescriptorKey::fermi_1d(k, params))?;
        Ok(base.scaled(log_const))
    }
}

pub fn eval_fermi_excited_1d(
    k: usize,
    c: &Configuration,
    params: &SystemParams,
    normalized: bool,
) -> Result<f64> {
    Ok(eval_fermi_excited_1d_log(k, c, params, normalized)?.value())
}

/// The general closed form psi(lambda') with lambda = lambda' + N - 1,
/// scaled so lambda' = 0 reproduces the normalized ground state.
/// lambda' = 1 is identically zero; lambda' = k+1 is proportional to
/// the k-th excited state.
pub fn eval_psi_lambda_appendix(
    lambda_prime: usize,
    c: &Configuration,
    params: &SystemParams,
) -> f64 {
    let xs = c.axis(0);
    let n = params.n_particles;
    let (s, _) = fermi_symmetric_part(n - 1 + lambda_prime, &xs, params);
    let kappa0 = kappa_ground(params);
    let vdm = vandermonde_log(&xs);
    let lv = LogValue::from_value(s / kappa0)
        .scaled(gaussian_log(c, params) + log_c0(params) + vdm.log_abs);
    LogValue {
        log_abs: lv.log_abs,
        sign: lv.sign * vdm.sign,
    }
    .value()
}

// ---------------------------------------------------------------------
// D-dimensional Fermi ground states
// ---------------------------------------------------------------------

/// Multi-index of a shell monomial: exponents per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialIndex {
    pub exponents: Vec<u32>,
}

impl MonomialIndex {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn eval(&self, row: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(row)
            .map(|(&e, &x)| x.powi(e as i32))
            .product()
    }
}

/// All monomials of total degree K in D axes, graded-lexicographic
/// descending on the exponent tuple. This serial order is an artifact
/// convention; the shell selection indices refer to it (1-based).
pub fn monomial_basis(k: u32, d: usize) -> Vec<MonomialIndex> {
    fn rec(remaining: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<MonomialIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MonomialIndex {
                exponents: prefix.clone(),
            });
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            rec(remaining - e, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, d, &mut Vec::new(), &mut out);
    out
}

/// Dense determinant by LU with partial pivoting.
fn det_lu(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let (pivot, max) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if max == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        let pivot_row = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (x, pv) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= f * pv;
            }
        }
    }
    det
}

fn validate_selection(shell: &ShellStructure, selection: &[usize]) -> Result<()> {
    if selection.len() != shell.leftover as usize {
        return Err(Error::InvalidSelection(format!(
            "selection size {} != leftover {}",
            selection.len(),
            shell.leftover
        )));
    }
    for w in selection.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidSelection(
                "serial numbers must be strictly increasing".into(),
            ));
        }
    }
    if let (Some(&first), Some(&last)) = (selection.first(), selection.last()) {
        if first < 1 || last > shell.capacity as usize {
            return Err(Error::InvalidSelection(format!(
                "serial numbers must lie in 1..={}",
                shell.capacity
            )));
        }
    }
    Ok(())
}

/// The N x N determinant of shell monomials: the first n_filled columns
/// run over all monomials of shells 0..K-1 in graded order, the
/// remaining columns are the selected shell-K monomials; rows are
/// particles.
pub fn eval_psi_s(c: &Configuration, selection: &[usize]) -> Result<f64> {
    let n = c.n_particles();
    let d = c.dimension();
    let shell = shell_structure(n, d);
    validate_selection(&shell, selection)?;

    let mut cols: Vec<MonomialIndex> = Vec::with_capacity(n);
    for s in 0..shell.k {
        cols.extend(monomial_basis(s as u32, d));
    }
    let top = monomial_basis(shell.k as u32, d);
    for &serial in selection {
        cols.push(top[serial - 1].clone());
    }
    debug_assert_eq!(cols.len(), n);

    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| cols.iter().map(|m| m.eval(c.row(i))).collect())
        .collect();
    Ok(det_lu(a))
}

/// Which degenerate ground state to evaluate for D >= 2 Fermi systems.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionDescriptor {
    pub statistics: Statistics,
    pub excitation: usize,
    pub params: SystemParams,
    pub shell_selection: Option<Vec<usize>>,
    pub normalized: bool,
}

impl WavefunctionDescriptor {
    pub fn new(
        statistics: Statistics,
        excitation: usize,
        params: SystemParams,
        shell_selection: Option<Vec<usize>>,
        normalized: bool,
    ) -> Result<Self> {
        let needs_selection =
            params.dimension >= 2 && statistics == Statistics::Fermi && excitation == 0;
        if needs_selection {
            let shell = shell_structure(params.n_particles, params.dimension);
            let selection = match shell_selection {
                Some(s) => s,
                // Default: lexicographically first subset.
                None => (1..=shell.leftover as usize).collect(),
            };
            validate_selection(&shell, &selection)?;
            return Ok(WavefunctionDescriptor {
                statistics,
                excitation,
                params,
                shell_selection: Some(selection),
                normalized,
            });
        }
        if shell_selection.is_some() {
            return Err(Error::InvalidSelection(
                "shell selection only applies to D >= 2 Fermi ground states".into(),
            ));
        }
        Ok(WavefunctionDescriptor {
            statistics,
            excitation,
            params,
            shell_selection: None,
            normalized,
        })
    }

    pub fn eval_log(&self, c: &Configuration) -> Result<LogValue> {
        let p = &self.params;
        if c.n_particles() != p.n_particles || c.dimension() != p.dimension {
            return Err(Error::ShapeMismatch {
                expected: p.n_particles * p.dimension,
                got: c.n_particles() * c.dimension(),
            });
        }
        match (self.statistics, p.dimension, self.excitation) {
            (Statistics::Bose, _, 0) => Ok(eval_bose_ground_log(c, p, self.normalized)),
            (Statistics::Bose, 1, k) => eval_bose_excited_log(k, c, p, self.normalized),
            (Statistics::Fermi, 1, 0) => Ok(eval_fermi_ground_1d_log(c, p, self.normalized)),
            (Statistics::Fermi, 1, k) => eval_fermi_excited_1d_log(k, c, p, self.normalized),
            (Statistics::Fermi, _, 0) => {
                eval_fermi_ground_d_log(c, self.shell_selection.as_deref().unwrap(), p, self.normalized)
            }
            _ => Err(Error::Unsupported(
                "no closed form for this statistics/dimension/excitation".into(),
            )),
        }
    }

    pub fn eval(&self, c: &Configuration) -> Result<f64> {
        Ok(self.eval_log(c)?.value())
    }
}

/// D >= 2 Fermi ground state: C * psi_S * exp(gauss); the constant is
/// fixed numerically (the paper gives none).
pub fn eval_fermi_ground_d_log(
    c: &Configuration,
    selection: &[usize],
    params: &SystemParams,
    normalized: bool,
) -> Result<LogValue> {
    let psi_s = eval_psi_s(c, selection)?;
    let base = LogValue::from_value(psi_s).scaled(gaussian_log(c, params));
    if normalized {
        let log_const =
            normalization_log_constant(&DescriptorKey::fermi_d(selection.to_vec(), params))?;
        Ok(base.scaled(log_const))
    } else {
        Ok(base)
    }
}

pub fn eval_fermi_ground_d(
    c: &Configuration,
    selection: &[usize],
    params: &SystemParams,
    normalized: bool,
) -> Result<f64> {
    Ok(eval_fermi_ground_d_log(c, selection, params, normalized)?.value())
}

// ---------------------------------------------------------------------
// Identical-vanishing detection
// ---------------------------------------------------------------------

/// Whether the closed-form eigenfunction for this level is the zero
/// function (e.g. the two-particle even excitations, annihilated by
/// (anti)symmetrization). Decided by evaluating the symmetric part at
/// deterministic sample points and comparing against the accumulated
/// term magnitude.
pub fn vanishes_identically(stats: Statistics, excitation: usize, params: &SystemParams) -> bool {
    if excitation == 0 || params.dimension != 1 {
        return false;
    }
    use rand::prelude::*;
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let n = params.n_particles;
    for _ in 0..5 {
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (value, scale) = match stats {
            Statistics::Bose => bose_excited_sum(excitation, &xs, params),
            Statistics::Fermi => fermi_symmetric_part(n + excitation, &xs, params),
        };
        if scale > 0.0 && value.abs() > 1e-10 * scale {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------
// Numeric normalization constants (Monte Carlo, fixed seed, cached)
// ---------------------------------------------------------------------

const NORMALIZATION_SEED: u64 = 0x6e_62_6f_64_79; // "nbody"
const NORMALIZATION_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct DescriptorKey {
    stats: u8,
    excitation: usize,
    n: usize,
    d: usize,
    selection: Vec<usize>,
    mass_bits: u64,
    omega_bits: u64,
    hbar_bits: u64,
}

impl DescriptorKey {
    fn bose(k: usize, p: &SystemParams) -> Self {
        DescriptorKey {
            stats: 0,
            excitation: k,
            n: p.n_particles,
            d: p.dimension,
            selection: Vec::new(),
            mass_bits: p.mass.to_bits(),
            omega_bits: p.omega.to_bits(),
            hbar_bits: p.hbar.to_bits(),
        }
    }

    fn fermi_1d(k: usize, p: &SystemParams) -> Self {
        DescriptorKey {
            stats: 1,
            ..DescriptorKey::bose(k, p)
        }
    }

    fn fermi_d(selection: Vec<usize>, p: &SystemParams) -> Self {
        DescriptorKey {
            stats: 1,
            selection,
            ..DescriptorKey::bose(0, p)
        }
    }

    fn params(&self) -> SystemParams {
        SystemParams {
            n_particles: self.n,
            dimension: self.d,
            mass: f64::from_bits(self.mass_bits),
            omega: f64::from_bits(self.omega_bits),
            hbar: f64::from_bits(self.hbar_bits),
        }
    }
}

fn constant_cache() -> &'static Mutex<HashMap<DescriptorKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<DescriptorKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// log of the numeric normalization constant for states without a
/// printed analytic constant: 1/sqrt of the Monte Carlo norm of the
/// unnormalized state, deterministic for the fixed internal seed.
fn normalization_log_constant(key: &DescriptorKey) -> Result<f64> {
    if let Some(&v) = constant_cache().lock().unwrap().get(key) {
        return Ok(v);
    }
    let params = key.params();
    let key2 = key.clone();
    let psi = move |c: &Configuration| -> LogValue {
        let out = match (key2.stats, key2.d, key2.excitation) {
            (0, 1, k) => eval_bose_excited_log(k, c, &params, false),
            (1, 1, k) => eval_fermi_excited_1d_log(k, c, &params, false),
            (1, _, 0) => eval_fermi_ground_d_log(c, &key2.selection, &params, false),
            _ => Err(Error::Unsupported("no numeric constant for this state".into())),
        };
        out.unwrap_or_else(|_| LogValue::zero())
    };
    let params = key.params();
    let norm = crate::oracle::mc_normalize_log(
        &psi,
        &params,
        NORMALIZATION_SAMPLES,
        NORMALIZATION_SEED,
    )?;
    let log_const = -0.5 * norm.ln();
    constant_cache().lock().unwrap().insert(key.clone(), log_const);
    Ok(log_const)
}

// ---------------------------------------------------------------------
// Batch point I/O
// ---------------------------------------------------------------------

/// Parse a batch of configurations: one flattened N*D row per line,
/// header optional.
pub fn parse_points_csv<R: BufRead>(reader: R, n: usize, d: usize) -> Result<Vec<Configuration>> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = trimmed
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect();
        match parsed {
            Ok(vals) => {
                if vals.len() != n * d {
                    return Err(Error::Csv {
                        line: lineno + 1,
                        msg: format!("expected {} values, got {}", n * d, vals.len()),
                    });
                }
                out.push(Configuration::new(n, d, vals)?);
            }
            Err(e) => {
                if lineno == 0 && out.is_empty() {
                    continue; // optional header
                }
                return Err(Error::Csv {
                    line: lineno + 1,
                    msg: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{apply_permutation, Permutation};
    use rand::prelude::*;

    fn random_config(rng: &mut StdRng, n: usize, d: usize) -> Configuration {
        Configuration::new(n, d, (0..n * d).map(|_| rng.gen_range(-1.5..1.5)).collect()).unwrap()
    }

    #[test]
    fn gaussian_factor_cases() {
        let p = SystemParams::natural(3, 1).unwrap();
        let c = Configuration::from_1d(&[0.7, 0.7, 0.7]).unwrap();
        assert_eq!(gaussian_pair_factor(&c, &p), 1.0);

        let p = SystemParams::natural(2, 1).unwrap();
        let c = Configuration::from_1d(&[1.0, 0.0]).unwrap();
        let want = (-1.0 / (2.0 * 2f64.sqrt())).exp();
        assert!((gaussian_pair_factor(&c, &p) - want).abs() < 1e-15);
    }

    #[test]
    fn gaussian_translation_invariance() {
        let p = SystemParams::natural(4, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let c = random_config(&mut rng, 4, 2);
        let mut shifted = c.clone();
        for i in 0..4 {
            *shifted.coord_mut(i, 0) += 2.5;
            *shifted.coord_mut(i, 1) -= 1.25;
        }
        assert!((gaussian_log(&c, &p) - gaussian_log(&shifted, &p)).abs() < 1e-12);
    }

    #[test]
    fn bose_ground_symmetric_and_proportional() {
        let p = SystemParams::natural(4, 1).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let c = random_config(&mut rng, 4, 1);
            let v = eval_bose_ground(&c, &p, true);
            for perm in Permutation::all(4) {
                let pv = eval_bose_ground(&apply_permutation(&perm, &c).unwrap(), &p, true);
                assert!((v - pv).abs() <= 1e-12 * v.abs());
            }
            let ratio = eval_bose_ground(&c, &p, false) / gaussian_pair_factor(&c, &p);
            assert!((ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fermi_ground_nodes_and_antisymmetry() {
        let p = SystemParams::natural(4, 1).unwrap();
        let c = Configuration::from_1d(&[0.3, 0.3, -1.0, 2.0]).unwrap();
        assert_eq!(eval_fermi_ground_1d(&c, &p, false), 0.0);

        let mut rng = StdRng::seed_from_u64(9);
        for n in 2..=6usize {
            let p = SystemParams::natural(n, 1).unwrap();
            for _ in 0..20 {
                let c = random_config(&mut rng, n, 1);
                let v = eval_fermi_ground_1d(&c, &p, false);
                for a in 0..n {
                    for b in a + 1..n {
                        let t = Permutation::transposition(n, a, b);
                        let pv =
                            eval_fermi_ground_1d(&apply_permutation(&t, &c).unwrap(), &p, false);
                        assert!((pv + v).abs() <= 1e-12 * v.abs().max(pv.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn appendix_lambda_family() {
        let mut rng = StdRng::seed_from_u64(13);
        for n in 2..=5usize {
            let p = SystemParams::natural(n, 1).unwrap();
            for _ in 0..100 {
                let c = random_config(&mut rng, n, 1);
                // lambda' = 1 is the zero function
                let v1 = eval_psi_lambda_appendix(1, &c, &p);
                let v0 = eval_psi_lambda_appendix(0, &c, &p);
                assert!(v1.abs() <= 1e-10 * v0.abs().max(1e-300), "n={n}");
                // lambda' = 0 is the normalized ground state, exactly
                let g = eval_fermi_ground_1d(&c, &p, true);
                assert!((v0 - g).abs() <= 1e-12 * g.abs(), "n={n}");
            }
        }
    }

    #[test]
    fn first_excited_matches_simplified_form() {
        let mut rng = StdRng::seed_from_u64(17);
        for n in 2..=5usize {
            let p = SystemParams::natural(n, 1).unwrap();
            let c1 = log_c1(&p).exp();
            let shift = p.hbar * (n as f64).sqrt() * ((n * n) as f64 - 1.0)
                / (2.0 * p.mass * p.omega);
            for _ in 0..50 {
                let c = random_config(&mut rng, n, 1);
                let got = eval_fermi_excited_1d(1, &c, &p, true).unwrap();
                let xs = c.axis(0);
                let vdm: f64 = {
                    let mut acc = 1.0;
                    for i in 1..n {
                        for j in 0..i {
                            acc *= xs[i] - xs[j];
                        }
                    }
                    acc
                };
                let want = c1 * (c.pair_sum_sq() - shift) * vdm * gaussian_pair_factor(&c, &p);
                assert!(
                    (got - want).abs() <= 1e-9 * want.abs().max(got.abs()).max(1e-12),
                    "n={n}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn two_particle_even_excitations_vanish() {
        let p = SystemParams::natural(2, 1).unwrap();
        for k in 1..=6usize {
            let bose = vanishes_identically(Statistics::Bose, k, &p);
            let fermi = vanishes_identically(Statistics::Fermi, k, &p);
            assert_eq!(bose, k % 2 == 0, "bose k={k}");
            assert_eq!(fermi, k % 2 == 0, "fermi k={k}");
        }
        // N >= 3: nothing vanishes in the tested range
        let p = SystemParams::natural(3, 1).unwrap();
        for k in 1..=4usize {
            assert!(!vanishes_identically(Statistics::Bose, k, &p));
            assert!(!vanishes_identically(Statistics::Fermi, k, &p));
        }
    }

    #[test]
    fn monomial_basis_cases() {
        let b = monomial_basis(1, 3);
        assert_eq!(
            b.iter().map(|m| m.exponents.clone()).collect::<Vec<_>>(),
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
        assert_eq!(monomial_basis(0, 4).len(), 1);
        let b = monomial_basis(2, 2);
        assert_eq!(
            b.iter().map(|m| m.exponents.clone()).collect::<Vec<_>>(),
            vec![vec![2, 0], vec![1, 1], vec![0, 2]]
        );
    }

    #[test]
    fn psi_s_three_particles_three_dims() {
        // Selection {1,2} = monomials x, y: the printed expansion
        // x2 y3 - x3 y2 + x1 y2 - x2 y1 + x3 y1 - x1 y3.
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..20 {
            let c = random_config(&mut rng, 3, 3);
            let got = eval_psi_s(&c, &[1, 2]).unwrap();
            let (x, y): (Vec<f64>, Vec<f64>) = ((0..3).map(|i| c.coord(i, 0)).collect(),
                                                (0..3).map(|i| c.coord(i, 1)).collect());
            let want = x[1] * y[2] - x[2] * y[1] + x[0] * y[1] - x[1] * y[0] + x[2] * y[0]
                - x[0] * y[2];
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn psi_s_antisymmetry_and_coincidence() {
        let p = SystemParams::natural(3, 2).unwrap();
        let _ = p;
        let mut rng = StdRng::seed_from_u64(23);
        let c = random_config(&mut rng, 3, 2);
        let v = eval_psi_s(&c, &[1, 2]).unwrap();
        for a in 0..3 {
            for b in a + 1..3 {
                let t = Permutation::transposition(3, a, b);
                let pv = eval_psi_s(&apply_permutation(&t, &c).unwrap(), &[1, 2]).unwrap();
                assert!((pv + v).abs() <= 1e-12 * v.abs().max(pv.abs()));
            }
        }
        // identical rows
        let mut c2 = c.clone();
        *c2.coord_mut(1, 0) = c2.coord(0, 0);
        *c2.coord_mut(1, 1) = c2.coord(0, 1);
        assert_eq!(eval_psi_s(&c2, &[1, 2]).unwrap(), 0.0);
    }

    #[test]
    fn psi_s_selection_validation() {
        let mut rng = StdRng::seed_from_u64(29);
        let c = random_config(&mut rng, 3, 3);
        assert!(eval_psi_s(&c, &[1]).is_err()); // wrong size
        assert!(eval_psi_s(&c, &[2, 2]).is_err()); // duplicate
        assert!(eval_psi_s(&c, &[1, 4]).is_err()); // out of range
    }

    #[test]
    fn descriptor_defaults_and_validation() {
        let p = SystemParams::natural(3, 3).unwrap();
        let d = WavefunctionDescriptor::new(Statistics::Fermi, 0, p, None, false).unwrap();
        assert_eq!(d.shell_selection, Some(vec![1, 2]));

        let p1 = SystemParams::natural(3, 1).unwrap();
        assert!(
            WavefunctionDescriptor::new(Statistics::Fermi, 0, p1, Some(vec![1]), false).is_err()
        );
    }

    #[test]
    fn degenerate_selections_linearly_independent() {
        // Gram matrix over random points has full rank 3 for N=3, D=3.
        let mut rng = StdRng::seed_from_u64(31);
        let selections = [vec![1, 2], vec![1, 3], vec![2, 3]];
        let npts = 40;
        let mut vals = vec![Vec::new(); 3];
        for _ in 0..npts {
            let c = random_config(&mut rng, 3, 3);
            for (si, sel) in selections.iter().enumerate() {
                vals[si].push(eval_psi_s(&c, sel).unwrap());
            }
        }
        let mut gram = vec![vec![0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                gram[a][b] = (0..npts).map(|p| vals[a][p] * vals[b][p]).sum();
            }
        }
        // normalize then require a well-conditioned determinant
        let norm: Vec<f64> = (0..3).map(|a| gram[a][a].sqrt()).collect();
        for a in 0..3 {
            for b in 0..3 {
                gram[a][b] /= norm[a] * norm[b];
            }
        }
        let det = det_lu(gram);
        assert!(det.abs() > 1e-3, "gram det {det}");
    }

    #[test]
    fn log_value_round_trip() {
        let v = LogValue::from_value(-3.25e-7);
        assert!((v.value() + 3.25e-7).abs() < 1e-20);
        assert_eq!(LogValue::from_value(0.0).value(), 0.0);
    }

    #[test]
    fn points_csv_parsing() {
        let data = "a,b\n1,2\n3,4\n";
        let pts = parse_points_csv(data.as_bytes(), 2, 1).unwrap();
        assert_eq!(pts.len(), 2);
        let bad = "1,2\n3\n";
        match parse_points_csv(bad.as_bytes(), 2, 1) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected CSV error, got {other:?}"),
        }
    }
}
