//! Spectral quantities built from an eigenbasis: cross coefficients of the
//! time-energy expansion, the energy density and its set integral, the
//! uniform concentration criterion J and its weighted variant, randomized
//! and time-asymptotic observability constants, and the truncated control
//! Gram operator.

use crate::domains::{gamma_weight, BoundaryCondition, DomainKind, EigenMode};
use crate::mesh::{cross_mass_gram, DensityField, Mesh, ModeMassMatrix, SubsetIndicator};
use crate::util::sum_pairwise;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Which evolution equation the initial data feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Equation {
    Wave,
    Schrodinger,
}

/// Truncated Fourier data of the initial conditions.
///
/// Wave data carries the two complex sequences (a_j, b_j) of the traveling
/// expansion; Schrodinger data carries the single sequence (c_j). The mode
/// list fixes the frequencies and point evaluations.
#[derive(Debug, Clone)]
pub struct InitialData {
    modes: Arc<Vec<EigenMode>>,
    coeffs: Coefficients,
}

#[derive(Debug, Clone)]
enum Coefficients {
    Wave { a: Vec<Complex64>, b: Vec<Complex64> },
    Schrodinger { c: Vec<Complex64> },
}

impl InitialData {
    pub fn wave(modes: Arc<Vec<EigenMode>>, a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if modes.is_empty() || a.len() != modes.len() || b.len() != modes.len() {
            return Err(Error::Config(
                "wave data needs one (a_j, b_j) pair per mode and at least one mode".into(),
            ));
        }
        if modes.iter().any(|m| m.lambda() <= 0.0) {
            return Err(Error::Config(
                "wave data requires strictly positive frequencies".into(),
            ));
        }
        Ok(InitialData {
            modes,
            coeffs: Coefficients::Wave { a, b },
        })
    }

    pub fn schrodinger(modes: Arc<Vec<EigenMode>>, c: Vec<Complex64>) -> Result<Self> {
        if modes.is_empty() || c.len() != modes.len() {
            return Err(Error::Config(
                "Schrodinger data needs one c_j per mode and at least one mode".into(),
            ));
        }
        Ok(InitialData {
            modes,
            coeffs: Coefficients::Schrodinger { c },
        })
    }

    pub fn equation(&self) -> Equation {
        match self.coeffs {
            Coefficients::Wave { .. } => Equation::Wave,
            Coefficients::Schrodinger { .. } => Equation::Schrodinger,
        }
    }

    pub fn modes(&self) -> &[EigenMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// True when every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        match &self.coeffs {
            Coefficients::Wave { a, b } => {
                a.iter().all(|z| z.norm_sqr() == 0.0) && b.iter().all(|z| z.norm_sqr() == 0.0)
            }
            Coefficients::Schrodinger { c } => c.iter().all(|z| z.norm_sqr() == 0.0),
        }
    }

    /// The frequency multiplier entering the energy density: lambda_j for
    /// the wave equation, lambda_j^2 for the Schrodinger equation.
    fn rate(&self, j: usize) -> f64 {
        let l = self.modes[j].lambda();
        match self.coeffs {
            Coefficients::Wave { .. } => l,
            Coefficients::Schrodinger { .. } => l * l,
        }
    }

    /// Time derivative of the solution at (t, x), from the expansion.
    pub fn solution_time_derivative(&self, t: f64, x: [f64; 2]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        match &self.coeffs {
            Coefficients::Wave { a, b } => {
                for (j, mode) in self.modes.iter().enumerate() {
                    let l = mode.lambda();
                    let rot = Complex64::from_polar(1.0, l * t);
                    let deriv = Complex64::i() * l * (a[j] * rot - b[j] * rot.conj());
                    s += deriv * mode.eval(x);
                }
            }
            Coefficients::Schrodinger { c } => {
                for (j, mode) in self.modes.iter().enumerate() {
                    let l2 = mode.lambda() * mode.lambda();
                    let rot = Complex64::from_polar(1.0, l2 * t);
                    s += Complex64::i() * l2 * c[j] * rot * mode.eval(x);
                }
            }
        }
        s
    }
}

/// integral of e^{i mu t} over [0, T], computed as T e^{i mu T/2} sinc(mu T/2).
///
/// The sinc form removes the cancellation of (e^{i mu T} - 1)/(i mu) for
/// near-resonant frequency gaps; |mu| < 1e-12 collapses to the exact
/// equal-frequency branch.
fn time_exp_integral(mu: f64, horizon: f64) -> Complex64 {
    if mu.abs() < 1e-12 {
        return Complex64::new(horizon, 0.0);
    }
    let z = 0.5 * mu * horizon;
    let sinc = if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z * z * z * z / 120.0
    } else {
        z.sin() / z
    };
    horizon * sinc * Complex64::from_polar(1.0, z)
}

/// The matrix alpha_{jk} of time integrals of paired mode oscillations.
#[derive(Debug, Clone)]
pub struct CrossCoefficients {
    equation: Equation,
    horizon: f64,
    size: usize,
    vals: Vec<Complex64>,
}

impl CrossCoefficients {
    pub fn equation(&self) -> Equation {
        self.equation
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.vals[j * self.size + k]
    }
}

/// Closed-form cross coefficients of the initial data over [0, T].
pub fn cross_coefficients(data: &InitialData, horizon: f64) -> Result<CrossCoefficients> {
    if !(horizon > 0.0) {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    let m = data.len();
    let mut vals = vec![Complex64::new(0.0, 0.0); m * m];
    match &data.coeffs {
        Coefficients::Wave { a, b } => {
            for j in 0..m {
                for k in 0..m {
                    let (lj, lk) = (data.modes[j].lambda(), data.modes[k].lambda());
                    let diff = lj - lk;
                    let sum = lj + lk;
                    vals[j * m + k] = a[j] * a[k].conj() * time_exp_integral(diff, horizon)
                        + b[j] * b[k].conj() * time_exp_integral(-diff, horizon)
                        - a[j] * b[k].conj() * time_exp_integral(sum, horizon)
                        - b[j] * a[k].conj() * time_exp_integral(-sum, horizon);
                }
            }
        }
        Coefficients::Schrodinger { c } => {
            for j in 0..m {
                for k in 0..m {
                    let (lj, lk) = (data.modes[j].lambda(), data.modes[k].lambda());
                    let gap = lj * lj - lk * lk;
                    vals[j * m + k] = c[j] * c[k].conj() * time_exp_integral(gap, horizon);
                }
            }
        }
    }
    Ok(CrossCoefficients {
        equation: data.equation(),
        horizon,
        size: m,
        vals,
    })
}

/// Energy density phi(x) = integral over [0, T] of |d_t y|^2, via the
/// spectral expansion; may be slightly negative from rounding.
pub fn energy_density_unclamped(data: &InitialData, alpha: &CrossCoefficients, x: [f64; 2]) -> f64 {
    let m = data.len();
    let v: Vec<f64> = data.modes.iter().map(|mode| mode.eval(x)).collect();
    let mut s = 0.0;
    for j in 0..m {
        let rj = data.rate(j);
        s += rj * rj * alpha.get(j, j).re * v[j] * v[j];
        for k in (j + 1)..m {
            s += 2.0 * rj * data.rate(k) * (alpha.get(j, k) * v[j] * v[k]).re;
        }
    }
    s
}

/// Energy density clamped at zero (it is a time integral of a square; the
/// spectral evaluation can undershoot by quadrature noise only).
pub fn energy_density(data: &InitialData, alpha: &CrossCoefficients, x: [f64; 2]) -> f64 {
    energy_density_unclamped(data, alpha, x).max(0.0)
}

/// Energy density sampled at every cell center, in cell order.
pub fn energy_density_on_mesh(
    data: &InitialData,
    alpha: &CrossCoefficients,
    mesh: &Mesh,
) -> Vec<f64> {
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| energy_density(data, alpha, mesh.center(c)))
        .collect()
}

/// True when the spectral expansion is diagonal over [0, T]: the 1D
/// Dirichlet basis with T an integer multiple of 2 pi (then all pairwise
/// frequency gaps integrate to zero for both equations).
pub fn diagonalizes_over_horizon(data: &InitialData, horizon: f64) -> bool {
    let d = data.modes[0].domain();
    if d.kind() != DomainKind::Interval1D || d.boundary() != BoundaryCondition::Dirichlet {
        return false;
    }
    let p = horizon / (2.0 * PI);
    (p - p.round()).abs() < 1e-12 && p.round() >= 1.0
}

/// Diagonal spectral weights d_j with phi(x) = sum_j d_j phi_j(x)^2, valid
/// when [`diagonalizes_over_horizon`] holds. For the wave equation
/// d_j = lambda_j^2 T (|a_j|^2 + |b_j|^2); for the Schrodinger equation
/// d_j = lambda_j^4 |c_j|^2 T.
pub fn diagonal_energy_weights(data: &InitialData, horizon: f64) -> Result<Vec<f64>> {
    if !diagonalizes_over_horizon(data, horizon) {
        return Err(Error::Config(
            "diagonal energy weights require the 1D Dirichlet basis and T in 2 pi N".into(),
        ));
    }
    Ok((0..data.len())
        .map(|j| {
            let r = data.rate(j);
            let amp = match &data.coeffs {
                Coefficients::Wave { a, b } => a[j].norm_sqr() + b[j].norm_sqr(),
                Coefficients::Schrodinger { c } => c[j].norm_sqr(),
            };
            r * r * amp * horizon
        })
        .collect())
}

/// G_T of a binary design: the cell quadrature of the energy density over
/// the set, assembled spectrally as sum_{j,k} r_j r_k alpha_{jk} G_{jk}
/// with G the cross-mass Gram on the set.
pub fn observed_energy(
    set: &SubsetIndicator,
    data: &InitialData,
    horizon: f64,
    q: usize,
) -> Result<f64> {
    let alpha = cross_coefficients(data, horizon)?;
    let density: Vec<f64> = set.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let gram = cross_mass_gram(set.mesh(), data.modes(), &density, q)?;
    let m = data.len();
    let mut s = 0.0;
    for j in 0..m {
        let rj = data.rate(j);
        s += rj * rj * alpha.get(j, j).re * gram[(j, j)];
        for k in (j + 1)..m {
            s += 2.0 * rj * data.rate(k) * (alpha.get(j, k).re) * gram[(j, k)];
        }
    }
    Ok(s)
}

/// A design argument: either a binary set or a relaxed density.
#[derive(Debug, Clone, Copy)]
pub enum Design<'a> {
    Set(&'a SubsetIndicator),
    Field(&'a DensityField),
}

impl<'a> Design<'a> {
    pub fn mesh(&self) -> &'a Arc<Mesh> {
        match self {
            Design::Set(s) => s.mesh(),
            Design::Field(f) => f.mesh(),
        }
    }

    /// Per-cell weight in [0, 1].
    pub fn cell_weight(&self, c: usize) -> f64 {
        match self {
            Design::Set(s) => {
                if s.contains(c) {
                    1.0
                } else {
                    0.0
                }
            }
            Design::Field(f) => f.values()[c],
        }
    }

    pub fn weights_vec(&self) -> Vec<f64> {
        let n = self.mesh().num_cells();
        (0..n).map(|c| self.cell_weight(c)).collect()
    }
}

/// Multiplicative mode weights gamma_j = lambda_j^2 / (1 + lambda_j^2).
#[derive(Debug, Clone)]
pub struct GammaWeights {
    values: Vec<f64>,
}

impl GammaWeights {
    pub fn from_modes(modes: &[EigenMode]) -> Self {
        GammaWeights {
            values: modes.iter().map(|m| gamma_weight(m.lambda())).collect(),
        }
    }

    /// All-ones weights (reduces the weighted criterion to the plain one).
    pub fn ones(n: usize) -> Self {
        GammaWeights { values: vec![1.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Result of a J evaluation: the minimum, the first row attaining it, and
/// all per-mode masses over the window.
#[derive(Debug, Clone, Serialize)]
pub struct JEvaluation {
    pub value: f64,
    pub argmin: usize,
    pub row_masses: Vec<f64>,
}

/// J over a window of modes: the minimum over the first `window` rows of
/// the design-weighted row mass, with optional gamma weights. Ties report
/// the smallest row index.
pub fn spectral_criterion(
    design: Design,
    mm: &ModeMassMatrix,
    window: usize,
    weights: Option<&GammaWeights>,
) -> Result<JEvaluation> {
    if window == 0 || window > mm.num_modes() {
        return Err(Error::Config(format!(
            "window {window} outside 1..={}",
            mm.num_modes()
        )));
    }
    if let Some(w) = weights {
        if w.values().len() < window {
            return Err(Error::Config("weights shorter than the window".into()));
        }
    }
    if !std::ptr::eq(Arc::as_ptr(design.mesh()), Arc::as_ptr(mm.mesh())) {
        // Allow distinct Arc instances over identical meshes.
        if design.mesh().num_cells() != mm.mesh().num_cells() {
            return Err(Error::Config("design and mass matrix meshes differ".into()));
        }
    }
    let row_masses: Vec<f64> = (0..window)
        .map(|j| {
            let base = match design {
                Design::Set(s) => mm.row_mass_on_set(j, s),
                Design::Field(f) => mm.row_mass_on_field(j, f),
            };
            match weights {
                Some(w) => w.values()[j] * base,
                None => base,
            }
        })
        .collect();
    let mut argmin = 0;
    for (j, &v) in row_masses.iter().enumerate() {
        if v < row_masses[argmin] {
            argmin = j;
        }
    }
    Ok(JEvaluation {
        value: row_masses[argmin],
        argmin,
        row_masses,
    })
}

/// Randomized observability constant: T J for the Schrodinger equation,
/// (T/2) J for the wave equation.
pub fn randomized_observability_constant(
    equation: Equation,
    design: Design,
    mm: &ModeMassMatrix,
    horizon: f64,
    window: usize,
) -> Result<f64> {
    if !(horizon > 0.0) {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    let j = spectral_criterion(design, mm, window, None)?;
    Ok(match equation {
        Equation::Schrodinger => horizon * j.value,
        Equation::Wave => 0.5 * horizon * j.value,
    })
}

/// One eigenvalue cluster of the truncated basis.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    /// Shared frequency of the cluster.
    pub lambda: f64,
    /// Number of modes in the cluster.
    pub size: usize,
    /// Smallest eigenvalue of the cluster Gram on the design.
    pub min_eigenvalue: f64,
}

/// Time-asymptotic observability constant at truncation level: the minimum
/// over eigenvalue clusters (grouped at |lambda_j - lambda_k| < 1e-9) of
/// the smallest eigenvalue of the cluster Gram restricted to the design.
/// Equals the Schrodinger-convention constant; the wave convention is half.
pub fn asymptotic_observability_constant(
    mesh: &Arc<Mesh>,
    modes: &[EigenMode],
    design: Design,
    q: usize,
) -> Result<(f64, Vec<ClusterReport>)> {
    if modes.is_empty() {
        return Err(Error::Numerical(
            "asymptotic constant needs at least one mode".into(),
        ));
    }
    let density = design.weights_vec();
    let mut reports = Vec::new();
    let mut start = 0;
    while start < modes.len() {
        let mut end = start + 1;
        while end < modes.len() && (modes[end].lambda() - modes[start].lambda()).abs() < 1e-9 {
            end += 1;
        }
        let cluster = &modes[start..end];
        let gram = cross_mass_gram(mesh, cluster, &density, q)?;
        let min_eig = if cluster.len() == 1 {
            gram[(0, 0)]
        } else {
            let eig = gram.symmetric_eigenvalues();
            eig.iter().copied().fold(f64::INFINITY, f64::min)
        };
        reports.push(ClusterReport {
            lambda: modes[start].lambda(),
            size: cluster.len(),
            min_eigenvalue: min_eig,
        });
        start = end;
    }
    let value = reports
        .iter()
        .map(|r| r.min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    Ok((value, reports))
}

/// Truncated control Gram operator on a design, with its extreme
/// eigenvalues. `observable` is false when lambda_min falls below 1e-14,
/// the non-observable-at-truncation signal.
#[derive(Debug, Clone)]
pub struct HumOperator {
    /// Number of modes M; the operator acts on 2M complex amplitudes.
    pub truncation: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub observable: bool,
    /// Control-operator norm estimate 1 / lambda_min (None when
    /// non-observable).
    pub gamma_norm_estimate: Option<f64>,
    /// Observability-constant estimate at truncation level, lambda_min / 2.
    pub ct_estimate: f64,
    matrix: DMatrix<Complex64>,
}

impl HumOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// Assembles the truncated control Gram operator of the wave equation on a
/// design over [0, T]: the 2M x 2M Hermitian matrix pairing forward and
/// backward amplitudes through time integrals and cross masses on the set.
pub fn hum_gram(
    mesh: &Arc<Mesh>,
    modes: &[EigenMode],
    design: Design,
    horizon: f64,
    q: usize,
) -> Result<HumOperator> {
    if !(horizon > 0.0) {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    if modes.is_empty() {
        return Err(Error::Config("empty truncation".into()));
    }
    let m = modes.len();
    let density = design.weights_vec();
    let gram = cross_mass_gram(mesh, modes, &density, q)?;

    // Blocks: P_j = sum_k U_{jk} A_k + (W^H)_{jk} B_k,
    //         Q_j = sum_k W_{jk} A_k + conj(U_{jk}) B_k.
    let mut full: DMatrix<Complex64> = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        for k in 0..m {
            let (lj, lk) = (modes[j].lambda(), modes[k].lambda());
            let g = gram[(j, k)];
            let u = time_exp_integral(lk - lj, horizon) * g;
            let w = time_exp_integral(lk + lj, horizon) * g;
            full[(j, k)] = u;
            full[(j, m + k)] = w.conj();
            full[(m + j, k)] = w;
            full[(m + j, m + k)] = u.conj();
        }
    }

    // Hermitian eigenvalues via the real symmetric embedding
    // [[Re, -Im], [Im, Re]] (each eigenvalue doubled).
    let n2 = 2 * m;
    let mut embed: DMatrix<f64> = DMatrix::zeros(2 * n2, 2 * n2);
    for i in 0..n2 {
        for j in 0..n2 {
            let z = full[(i, j)];
            embed[(i, j)] = z.re;
            embed[(i + n2, j + n2)] = z.re;
            embed[(i, j + n2)] = -z.im;
            embed[(i + n2, j)] = z.im;
        }
    }
    let eigs = embed.symmetric_eigenvalues();
    let lambda_min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let lambda_max = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let observable = lambda_min > 1e-14;
    Ok(HumOperator {
        truncation: m,
        lambda_min,
        lambda_max,
        observable,
        gamma_norm_estimate: observable.then(|| 1.0 / lambda_min),
        ct_estimate: 0.5 * lambda_min,
        matrix: full,
    })
}

/// Exportable summary of the constants attached to one design.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub j_value: f64,
    pub j_argmin: usize,
    pub j_weighted: f64,
    pub randomized_wave: f64,
    pub randomized_schrodinger: f64,
    /// Schrodinger-convention time-asymptotic constant (min cluster Gram
    /// eigenvalue).
    pub asymptotic_schrodinger: f64,
    /// Wave-convention time-asymptotic constant (half the above).
    pub asymptotic_wave: f64,
    pub hum_lambda_min: f64,
    pub hum_lambda_max: f64,
    pub hum_gamma_norm: Option<f64>,
    pub hum_observable: bool,
    pub horizon: f64,
    pub window: usize,
}

/// Computes every constant the CLI exports for a design.
pub fn constants_report(
    design: Design,
    mm: &ModeMassMatrix,
    horizon: f64,
    window: usize,
    hum_truncation: usize,
    q: usize,
) -> Result<ConstantsReport> {
    let j = spectral_criterion(design, mm, window, None)?;
    let gamma = GammaWeights::from_modes(&mm.modes()[..window]);
    let jw = spectral_criterion(design, mm, window, Some(&gamma))?;
    let rand_w =
        randomized_observability_constant(Equation::Wave, design, mm, horizon, window)?;
    let rand_s =
        randomized_observability_constant(Equation::Schrodinger, design, mm, horizon, window)?;
    let (asym, _) =
        asymptotic_observability_constant(mm.mesh(), &mm.modes()[..window], design, q)?;
    let hum = hum_gram(
        mm.mesh(),
        &mm.modes()[..hum_truncation.min(mm.num_modes())],
        design,
        horizon,
        q,
    )?;
    Ok(ConstantsReport {
        j_value: j.value,
        j_argmin: j.argmin,
        j_weighted: jw.value,
        randomized_wave: rand_w,
        randomized_schrodinger: rand_s,
        asymptotic_schrodinger: asym,
        asymptotic_wave: 0.5 * asym,
        hum_lambda_min: hum.lambda_min,
        hum_lambda_max: hum.lambda_max,
        hum_gamma_norm: hum.gamma_norm_estimate,
        hum_observable: hum.observable,
        horizon,
        window,
    })
}

/// Pairwise-summed dot product helper shared by the design solvers.
pub(crate) fn weighted_row_mass(row: &[f64], weights: &[f64]) -> f64 {
    let terms: Vec<f64> = row.iter().zip(weights).map(|(&w, &a)| w * a).collect();
    sum_pairwise(&terms)
}
