//! Eigen-analysis of the closed-loop generator.
//!
//! Eigenvalues of the quadratic pencil `lambda^2 M + lambda D + K` are
//! computed from the first-order generator expressed in energy
//! coordinates `z = (Rᵀ q, Lᵀ v)`: the transformed matrix
//! `[[0, Wᵀ], [-W, -S]]` (with `W = L^{-1} R`, `S = L^{-1} D L^{-ᵀ}`) is
//! exactly skew-symmetric when undamped and has field of values in the
//! closed left half-plane for any positive semidefinite damping, so
//! computed real parts are trustworthy at roundoff scale. Eigenvectors
//! are recovered per mode by complex inverse iteration on the pencil
//! itself, which also certifies each `(lambda, x)` pair through its
//! pencil residual.

use nalgebra::{Complex, DMatrix, DVector};

use crate::assembly::{ConfigSnapshot, OperatorBundle};
use crate::dynamics::EnergyTrace;
use crate::error::{CoreError, Result};
use crate::mesh::Mesh;
use crate::model::{Actuation, BeamConfig, FeedbackGains};

pub type C64 = Complex<f64>;

/// Modes with piezo-field energy fraction at or above this threshold are
/// classified as axial-dominated in model comparisons.
pub const AXIAL_FRACTION_THRESHOLD: f64 = 0.5;

/// One eigenpair of the quadratic pencil, `v = lambda q` implied.
#[derive(Debug, Clone)]
pub struct PencilMode {
    pub lambda: C64,
    pub q: DVector<C64>,
    /// Relative pencil residual of the pair.
    pub residual: f64,
}

/// Reported mode: eigenvalue, boundary traces of the unit-energy
/// eigenvector, and the mass-weighted energy split across blocks.
#[derive(Debug, Clone)]
pub struct ModeInfo {
    pub lambda: C64,
    /// `|trace|` at every longitudinal tip, then bending value and slope
    /// at the tip, for the eigenvector normalized to unit potential
    /// energy.
    pub traces: Vec<f64>,
    pub trace_norm: f64,
    /// Mass-weighted fraction per longitudinal block, then the bending
    /// block; sums to one.
    pub mass_fractions: Vec<f64>,
    /// Fraction in the piezoelectric longitudinal block (the second field
    /// for three-layer bundles, all longitudinal blocks combined
    /// otherwise).
    pub axial_fraction: f64,
    pub residual: f64,
    pub q: DVector<C64>,
}

impl ModeInfo {
    pub fn frequency(&self) -> f64 {
        self.lambda.im.abs()
    }
}

/// Spectrum of the closed-loop pencil: the `count` lowest modes by
/// `|Im lambda|` (one representative per conjugate pair) plus the full
/// eigenvalue list.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub modes: Vec<ModeInfo>,
    /// All `2N` eigenvalues of the linearized generator.
    pub eigenvalues: Vec<C64>,
    /// Max real part over the reported modes.
    pub spectral_abscissa: f64,
    pub n_elem: usize,
    pub gain_values: Vec<(String, f64)>,
    pub actuation: Option<String>,
}

impl SpectrumReport {
    pub fn min_trace_norm(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.trace_norm)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Max real part over the reported modes.
pub fn spectral_abscissa(report: &SpectrumReport) -> f64 {
    report.spectral_abscissa
}

fn cholesky_lower(matrix: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    matrix
        .clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or_else(|| CoreError::Numerical(format!("{what} is not positive definite")))
}

/// Builds the first-order generator in energy coordinates.
fn energy_generator(
    mass: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
    damping: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let n = mass.nrows();
    let l = cholesky_lower(mass, "mass matrix")?;
    let r = cholesky_lower(stiffness, "stiffness matrix")?;
    let w = l
        .solve_lower_triangular(&r)
        .ok_or_else(|| CoreError::Numerical("singular mass factor".to_string()))?;
    let mut gen = DMatrix::zeros(2 * n, 2 * n);
    gen.view_mut((0, n), (n, n)).copy_from(&w.transpose());
    gen.view_mut((n, 0), (n, n)).copy_from(&(-&w));
    if damping.amax() != 0.0 {
        let x = l
            .solve_lower_triangular(damping)
            .ok_or_else(|| CoreError::Numerical("singular mass factor".to_string()))?;
        let s = l
            .solve_lower_triangular(&x.transpose())
            .ok_or_else(|| CoreError::Numerical("singular mass factor".to_string()))?;
        let s_sym = (&s + s.transpose()) * 0.5;
        let mut block = gen.view_mut((n, n), (n, n));
        block -= &s_sym;
    }
    Ok(gen)
}

/// All `2N` eigenvalues of the quadratic pencil
/// `lambda^2 M + lambda D + K` (`M`, `K` SPD, `D` PSD).
pub fn pencil_eigenvalues(
    mass: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
    damping: &DMatrix<f64>,
) -> Result<Vec<C64>> {
    let gen = energy_generator(mass, stiffness, damping)?;
    Ok(gen.complex_eigenvalues().iter().copied().collect())
}

/// Sorts eigenvalues ascending by `|Im|` (ties by real part) and keeps
/// one representative per conjugate pair (the `Im >= 0` member).
fn representatives(eigenvalues: &[C64]) -> Vec<C64> {
    let scale = eigenvalues
        .iter()
        .map(|l| l.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let tol = 1e-12 * scale;
    let mut reps: Vec<C64> = eigenvalues
        .iter()
        .copied()
        .filter(|l| l.im > tol || l.im.abs() <= tol)
        .collect();
    reps.sort_by(|a, b| {
        (a.im.abs(), a.re, a.im)
            .partial_cmp(&(b.im.abs(), b.re, b.im))
            .unwrap()
    });
    reps
}

/// Matrix infinity norm.
fn inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pencil_matrix(
    lambda: C64,
    mass: &DMatrix<f64>,
    damping: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
) -> DMatrix<C64> {
    let l2 = lambda * lambda;
    DMatrix::from_fn(mass.nrows(), mass.ncols(), |i, j| {
        l2 * mass[(i, j)] + lambda * damping[(i, j)] + stiffness[(i, j)]
    })
}

fn pencil_residual(
    lambda: C64,
    x: &DVector<C64>,
    mass: &DMatrix<f64>,
    damping: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
    norms: (f64, f64, f64),
) -> f64 {
    let c = pencil_matrix(lambda, mass, damping, stiffness);
    let r = &c * x;
    let scale = lambda.norm() * lambda.norm() * norms.0 + lambda.norm() * norms.1 + norms.2;
    r.norm() / (scale * x.norm())
}

/// Eigenvector of the pencil at `lambda` by shifted inverse iteration.
fn inverse_iteration(
    lambda: C64,
    mass: &DMatrix<f64>,
    damping: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
    norms: (f64, f64, f64),
) -> Result<(DVector<C64>, f64)> {
    let n = mass.nrows();
    let mut best: Option<(DVector<C64>, f64)> = None;
    for attempt in 0..3 {
        let shift = lambda * C64::new(1.0 + 5e-12 * (attempt as f64 + 1.0), 0.0);
        let c = pencil_matrix(shift, mass, damping, stiffness);
        let lu = c.lu();
        let mut x = DVector::from_fn(n, |i, _| {
            C64::new(
                0.7 + 0.13 * (i % 5) as f64,
                0.4 - 0.09 * (i % 7) as f64,
            )
        });
        x /= C64::new(x.norm(), 0.0);
        for _ in 0..3 {
            let Some(y) = lu.solve(&x) else { break };
            let norm = y.norm();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            x = y / C64::new(norm, 0.0);
            let res = pencil_residual(lambda, &x, mass, damping, stiffness, norms);
            if best.as_ref().is_none_or(|(_, b)| res < *b) {
                best = Some((x.clone(), res));
            }
            if res < 1e-12 {
                return Ok(best.unwrap());
            }
        }
        if best.as_ref().is_some_and(|(_, r)| *r < 1e-9) {
            break;
        }
    }
    best.ok_or_else(|| {
        CoreError::Numerical(format!(
            "inverse iteration failed for eigenvalue {lambda}"
        ))
    })
}

/// The `count` lowest modes by `|Im|` with pencil eigenvectors.
pub fn pencil_modes(
    mass: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
    damping: &DMatrix<f64>,
    count: usize,
) -> Result<Vec<PencilMode>> {
    let eigenvalues = pencil_eigenvalues(mass, stiffness, damping)?;
    let reps = representatives(&eigenvalues);
    if count > reps.len() {
        return Err(CoreError::InvalidArgument(format!(
            "requested {count} modes but only {} are available",
            reps.len()
        )));
    }
    let norms = (inf_norm(mass), inf_norm(damping), inf_norm(stiffness));
    reps.into_iter()
        .take(count)
        .map(|lambda| {
            let (q, residual) = inverse_iteration(lambda, mass, damping, stiffness, norms)?;
            Ok(PencilMode {
                lambda,
                q,
                residual,
            })
        })
        .collect()
}

fn hermitian_form(matrix: &DMatrix<f64>, x: &DVector<C64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..matrix.ncols() {
        for i in 0..matrix.nrows() {
            // conj(x_i) * m_ij * x_j summed; imaginary parts cancel.
            acc += matrix[(i, j)] * (x[i].conj() * x[j]).re;
        }
    }
    acc
}

fn block_mass_fraction(
    mass: &DMatrix<f64>,
    q: &DVector<C64>,
    block: std::ops::Range<usize>,
) -> f64 {
    let total = hermitian_form(mass, q);
    let sub = mass.view((block.start, block.start), (block.len(), block.len()));
    let qb = q.rows(block.start, block.len()).into_owned();
    let part = {
        let mut acc = 0.0;
        for j in 0..sub.ncols() {
            for i in 0..sub.nrows() {
                acc += sub[(i, j)] * (qb[i].conj() * qb[j]).re;
            }
        }
        acc
    };
    part / total
}

fn report_metadata(bundle: &OperatorBundle) -> (Vec<(String, f64)>, Option<String>) {
    match &bundle.config {
        ConfigSnapshot::ThreeLayer(c) => (
            vec![
                ("s1".to_string(), c.gains.s1),
                ("s3".to_string(), c.gains.s3),
                ("k1".to_string(), c.gains.k1),
                ("k2".to_string(), c.gains.k2),
            ],
            Some(c.actuation.to_string()),
        ),
        ConfigSnapshot::Multilayer(c) => {
            let mut gains: Vec<(String, f64)> = c
                .gains
                .s
                .iter()
                .enumerate()
                .map(|(i, s)| (format!("s{}", 2 * i + 1), *s))
                .collect();
            gains.push(("k1".to_string(), c.gains.k1));
            gains.push(("k2".to_string(), c.gains.k2));
            (gains, Some("charge".to_string()))
        }
        ConfigSnapshot::Synthetic { .. } => (
            bundle
                .channels
                .iter()
                .map(|c| (c.label.clone(), c.coef))
                .collect(),
            None,
        ),
    }
}

/// Computes the `count` lowest closed-loop modes of a bundle with
/// unit-potential-energy eigenvectors, boundary traces, and block energy
/// fractions.
pub fn compute_spectrum(bundle: &OperatorBundle, count: usize) -> Result<SpectrumReport> {
    if count == 0 || count > bundle.n_dofs() {
        return Err(CoreError::InvalidArgument(format!(
            "mode count must be in 1..={} (got {count})",
            bundle.n_dofs()
        )));
    }
    let eigenvalues = pencil_eigenvalues(&bundle.mass, &bundle.stiffness, &bundle.damping)?;
    let reps = representatives(&eigenvalues);
    if count > reps.len() {
        return Err(CoreError::InvalidArgument(format!(
            "requested {count} modes but only {} conjugate-pair representatives exist",
            reps.len()
        )));
    }
    let norms = (
        inf_norm(&bundle.mass),
        inf_norm(&bundle.damping),
        inf_norm(&bundle.stiffness),
    );
    let trace_dofs = bundle.trace_dofs();
    let n_axial = bundle.layout.n_axial_fields();

    let mut modes = Vec::with_capacity(count);
    for lambda in reps.into_iter().take(count) {
        let (mut q, residual) = inverse_iteration(
            lambda,
            &bundle.mass,
            &bundle.damping,
            &bundle.stiffness,
            norms,
        )?;
        // Unit potential energy: (1/2) q* K q = 1.
        let potential = 0.5 * hermitian_form(&bundle.stiffness, &q);
        q /= C64::new(potential.sqrt(), 0.0);
        let traces: Vec<f64> = trace_dofs.iter().map(|&d| q[d].norm()).collect();
        let trace_norm = traces.iter().map(|t| t * t).sum::<f64>().sqrt();
        let mut mass_fractions: Vec<f64> = (0..n_axial)
            .map(|f| block_mass_fraction(&bundle.mass, &q, bundle.layout.axial_block(f)))
            .collect();
        mass_fractions.push(block_mass_fraction(&bundle.mass, &q, bundle.layout.w_block()));
        let axial_fraction = if n_axial == 2 {
            mass_fractions[1]
        } else {
            mass_fractions[..n_axial].iter().sum()
        };
        modes.push(ModeInfo {
            lambda,
            traces,
            trace_norm,
            mass_fractions,
            axial_fraction,
            residual,
            q,
        });
    }
    let spectral_abscissa = modes
        .iter()
        .map(|m| m.lambda.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let (gain_values, actuation) = report_metadata(bundle);
    Ok(SpectrumReport {
        modes,
        eigenvalues,
        spectral_abscissa,
        n_elem: bundle.layout.n_elem(),
        gain_values,
        actuation,
    })
}

/// Boundary observability of the conservative eigenfunctions: per-mode
/// trace norms for the lowest `count` unit-energy modes with all gains
/// forced to zero. No conservative mode should vanish at the boundary.
#[derive(Debug, Clone)]
pub struct ObservabilityReport {
    /// `(frequency, trace_norm)` per mode, ascending frequency.
    pub modes: Vec<(f64, f64)>,
    pub min_trace_norm: f64,
}

pub fn observability_report(bundle: &OperatorBundle, count: usize) -> Result<ObservabilityReport> {
    let conservative = conservative_clone(bundle);
    let report = compute_spectrum(&conservative, count)?;
    let modes: Vec<(f64, f64)> = report
        .modes
        .iter()
        .map(|m| (m.frequency(), m.trace_norm))
        .collect();
    let min_trace_norm = report.min_trace_norm();
    Ok(ObservabilityReport {
        modes,
        min_trace_norm,
    })
}

fn conservative_clone(bundle: &OperatorBundle) -> OperatorBundle {
    let mut b = bundle.clone();
    b.damping.fill(0.0);
    for c in &mut b.channels {
        c.coef = 0.0;
    }
    b
}

/// One row of the charge-vs-voltage comparison: an axial-dominated mode
/// with its frequencies in both actuation modes.
#[derive(Debug, Clone)]
pub struct CompareRow {
    /// Index in the joint (frequency-sorted) mode list.
    pub mode_index: usize,
    pub omega_voltage: f64,
    pub omega_charge: f64,
    pub shift: f64,
    pub axial_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub n_elem: usize,
    pub count: usize,
}

/// Compares conservative charge- and voltage-actuated spectra on the same
/// mesh and reports the frequency shift of every axial-dominated mode
/// (piezo-field energy fraction at least [`AXIAL_FRACTION_THRESHOLD`],
/// classified on the charge-mode eigenvectors).
pub fn compare_models(config: &BeamConfig, n_elem: usize, count: usize) -> Result<CompareReport> {
    let mesh = Mesh::uniform(config.length, n_elem)?;
    let conservative = config.with_gains(FeedbackGains::zero())?;
    let charge = conservative.with_actuation(Actuation::Charge)?;
    let voltage = conservative.with_actuation(Actuation::Voltage)?;
    let charge_report = compute_spectrum(&crate::assembly::assemble(&charge, &mesh)?, count)?;
    let voltage_report = compute_spectrum(&crate::assembly::assemble(&voltage, &mesh)?, count)?;
    let rows: Vec<CompareRow> = charge_report
        .modes
        .iter()
        .zip(voltage_report.modes.iter())
        .enumerate()
        .filter(|(_, (c, _))| c.axial_fraction >= AXIAL_FRACTION_THRESHOLD)
        .map(|(k, (c, v))| CompareRow {
            mode_index: k,
            omega_voltage: v.frequency(),
            omega_charge: c.frequency(),
            shift: c.frequency() - v.frequency(),
            axial_fraction: c.axial_fraction,
        })
        .collect();
    if rows.is_empty() {
        return Err(CoreError::Numerical(format!(
            "no axial-dominated modes among the lowest {count}; raise the mode count"
        )));
    }
    Ok(CompareReport {
        rows,
        n_elem,
        count,
    })
}

/// Least-squares exponential decay rate of an energy trace.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Negated slope of `ln E(t)`.
    pub rate: f64,
    pub r_squared: f64,
    pub n_samples: usize,
}

/// Fits `ln E(t) = a - rate * t` over `window = (t_a, t_b)`.
pub fn decay_rate_fit(trace: &EnergyTrace, window: (f64, f64)) -> Result<DecayFit> {
    let (t_a, t_b) = window;
    let samples: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.energies)
        .filter(|(t, _)| **t >= t_a && **t <= t_b)
        .map(|(t, e)| (*t, *e))
        .collect();
    if samples.len() < 10 {
        return Err(CoreError::InvalidArgument(format!(
            "decay fit needs at least 10 samples in the window (got {})",
            samples.len()
        )));
    }
    if let Some((t, e)) = samples.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(CoreError::Numerical(format!(
            "nonpositive energy {e} at t = {t}: log-fit undefined"
        )));
    }
    let n = samples.len() as f64;
    let mean_t = samples.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_y = samples.iter().map(|(_, e)| e.ln()).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    for (t, e) in &samples {
        stt += (t - mean_t) * (t - mean_t);
        sty += (t - mean_t) * (e.ln() - mean_y);
    }
    let slope = sty / stt;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (t, e) in &samples {
        let y = e.ln();
        let fit = mean_y + slope * (t - mean_t);
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    // A flat log-energy trace has no variance to explain; call it a
    // perfect fit of a constant.
    let r_squared = if ss_tot > 1e-20 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(DecayFit {
        rate: -slope,
        r_squared,
        n_samples: samples.len(),
    })
}
