//! Model domains and Laplacian eigenbases.
//!
//! Supported domains: the interval [0, pi], the square [0, pi]^2, the flat
//! torus [0, 2pi]^2 and the unit disk. Eigenfunctions are real-valued and
//! L2-normalized; in the Neumann and torus cases the constant mode is
//! excluded so that all bases live in the zero-mean subspace.

pub mod bessel;

use crate::{Error, Result};
use bessel::BesselTable;
use serde::Serialize;
use std::f64::consts::PI;

pub use bessel::{bessel_j, bessel_j_deriv, bessel_zero, disk_radial};

/// Geometry of the model domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DomainKind {
    Interval1D,
    Square2D,
    Torus2D,
    Disk2D,
}

/// Boundary condition attached to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    /// Dirichlet on the edges normal to the first axis, Neumann on the
    /// others; eigenfunctions sin(j x1) cos(k x2) with j >= 1, k >= 0.
    MixedDN,
}

/// A validated (domain, boundary condition) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DomainSpec {
    kind: DomainKind,
    boundary: BoundaryCondition,
}

impl DomainSpec {
    /// Builds a spec, rejecting unsupported pairs.
    pub fn new(kind: DomainKind, boundary: BoundaryCondition) -> Result<Self> {
        let ok = match kind {
            DomainKind::Interval1D => matches!(
                boundary,
                BoundaryCondition::Dirichlet | BoundaryCondition::Neumann
            ),
            DomainKind::Square2D => true,
            // The torus has no boundary; it shares the zero-mean convention
            // with the Neumann case and is canonicalized to it.
            DomainKind::Torus2D => boundary == BoundaryCondition::Neumann,
            DomainKind::Disk2D => boundary == BoundaryCondition::Dirichlet,
        };
        if ok {
            Ok(DomainSpec { kind, boundary })
        } else {
            Err(Error::Config(format!(
                "unsupported domain/boundary pair: {kind:?} with {boundary:?}"
            )))
        }
    }

    pub fn interval(boundary: BoundaryCondition) -> Result<Self> {
        Self::new(DomainKind::Interval1D, boundary)
    }

    pub fn square(boundary: BoundaryCondition) -> Result<Self> {
        Self::new(DomainKind::Square2D, boundary)
    }

    pub fn torus() -> Self {
        DomainSpec {
            kind: DomainKind::Torus2D,
            boundary: BoundaryCondition::Neumann,
        }
    }

    pub fn disk() -> Self {
        DomainSpec {
            kind: DomainKind::Disk2D,
            boundary: BoundaryCondition::Dirichlet,
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.boundary
    }

    /// Total measure V(Omega).
    pub fn volume(&self) -> f64 {
        match self.kind {
            DomainKind::Interval1D => PI,
            DomainKind::Square2D => PI * PI,
            DomainKind::Torus2D => 4.0 * PI * PI,
            DomainKind::Disk2D => PI,
        }
    }

    /// Number of spatial coordinates (polar coordinates for the disk).
    pub fn dim(&self) -> usize {
        match self.kind {
            DomainKind::Interval1D => 1,
            _ => 2,
        }
    }

    /// Whether the constant function is an eigenfunction (excluded by
    /// default from enumerations).
    pub fn has_constant_mode(&self) -> bool {
        matches!(self.kind, DomainKind::Torus2D)
            || self.boundary == BoundaryCondition::Neumann
    }
}

/// Trigonometric flavor of a torus axis factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Trig {
    Cos,
    Sin,
}

/// Multi-index of an eigenmode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ModeIndex {
    /// 1D mode j (j >= 1, or 0 for the constant mode when included).
    Line { j: u32 },
    /// Square mode (j, k); admissible ranges depend on the boundary
    /// condition.
    Rect { j: u32, k: u32 },
    /// Torus mode with explicit per-axis trigonometric flavor.
    Torus { j: u32, k: u32, tx: Trig, ty: Trig },
    /// Disk mode (j, k, m): Bessel order j, zero index k, angular flavor
    /// m = 1 (cosine) or m = 2 (sine); j = 0 carries m = 1 only.
    Disk { j: u32, k: u32, m: u8 },
}

/// One L2-normalized eigenmode, evaluable pointwise.
///
/// Coordinates are the natural chart of the domain: `[x, 0]` on the
/// interval, `[x1, x2]` on square/torus, polar `[r, theta]` on the disk.
#[derive(Debug, Clone)]
pub struct EigenMode {
    domain: DomainSpec,
    index: ModeIndex,
    lambda: f64,
    /// |J'_j(z_jk)| for disk modes, 0 otherwise.
    radial_scale: f64,
}

impl EigenMode {
    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn index(&self) -> ModeIndex {
        self.index
    }

    /// Frequency lambda (square root of the Laplacian eigenvalue).
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Pointwise evaluation; reentrant, no interior mutability.
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.axis_factor(0, p[0]) * self.axis_factor(1, p[1])
    }

    /// Per-axis factor of the (tensor-product) eigenfunction, so that
    /// `eval(p) = axis_factor(0, p[0]) * axis_factor(1, p[1])`.
    /// For disk modes axis 0 is radial and axis 1 angular.
    pub fn axis_factor(&self, axis: usize, t: f64) -> f64 {
        debug_assert!(axis < 2);
        match self.index {
            ModeIndex::Line { j } => {
                if axis == 1 {
                    return 1.0;
                }
                match (j, self.domain.boundary) {
                    (0, _) => (1.0 / PI).sqrt(),
                    (j, BoundaryCondition::Dirichlet) => {
                        (2.0 / PI).sqrt() * (j as f64 * t).sin()
                    }
                    (j, _) => (2.0 / PI).sqrt() * (j as f64 * t).cos(),
                }
            }
            ModeIndex::Rect { j, k } => {
                let (idx, trig) = if axis == 0 {
                    (j, self.rect_trig(0))
                } else {
                    (k, self.rect_trig(1))
                };
                axis_trig_pi(idx, trig, t)
            }
            ModeIndex::Torus { j, k, tx, ty } => {
                let (idx, trig) = if axis == 0 { (j, tx) } else { (k, ty) };
                axis_trig_2pi(idx, trig, t)
            }
            ModeIndex::Disk { j, k, m } => {
                if axis == 0 {
                    let z = self.lambda;
                    debug_assert!(k >= 1);
                    let _ = k;
                    std::f64::consts::SQRT_2 * bessel::bessel_j_unchecked(j as usize, z * t)
                        / self.radial_scale
                } else if j == 0 {
                    1.0 / (2.0 * PI).sqrt()
                } else if m == 1 {
                    (j as f64 * t).cos() / PI.sqrt()
                } else {
                    (j as f64 * t).sin() / PI.sqrt()
                }
            }
        }
    }

    fn rect_trig(&self, axis: usize) -> Trig {
        match self.domain.boundary {
            BoundaryCondition::Dirichlet => Trig::Sin,
            BoundaryCondition::Neumann => Trig::Cos,
            BoundaryCondition::MixedDN => {
                if axis == 0 {
                    Trig::Sin
                } else {
                    Trig::Cos
                }
            }
        }
    }
}

/// Normalized trig factor on [0, pi].
fn axis_trig_pi(idx: u32, trig: Trig, t: f64) -> f64 {
    if idx == 0 {
        return match trig {
            Trig::Cos => (1.0 / PI).sqrt(),
            Trig::Sin => 0.0,
        };
    }
    let v = match trig {
        Trig::Cos => (idx as f64 * t).cos(),
        Trig::Sin => (idx as f64 * t).sin(),
    };
    (2.0 / PI).sqrt() * v
}

/// Normalized trig factor on [0, 2pi].
fn axis_trig_2pi(idx: u32, trig: Trig, t: f64) -> f64 {
    if idx == 0 {
        return match trig {
            Trig::Cos => 1.0 / (2.0 * PI).sqrt(),
            Trig::Sin => 0.0,
        };
    }
    let v = match trig {
        Trig::Cos => (idx as f64 * t).cos(),
        Trig::Sin => (idx as f64 * t).sin(),
    };
    v / PI.sqrt()
}

/// All modes with lambda <= cutoff, sorted by ascending lambda with
/// lexicographic multi-index tie-break. The constant mode is excluded.
pub fn enumerate_modes(domain: DomainSpec, cutoff: f64) -> Result<Vec<EigenMode>> {
    enumerate_modes_with_options(domain, cutoff, false)
}

/// As [`enumerate_modes`], optionally including the constant mode for the
/// Neumann/torus variants that keep the full H1 bookkeeping.
pub fn enumerate_modes_with_options(
    domain: DomainSpec,
    cutoff: f64,
    include_constant_mode: bool,
) -> Result<Vec<EigenMode>> {
    if !(cutoff > 0.0) {
        return Err(Error::Config(format!("cutoff must be positive, got {cutoff}")));
    }
    let mut modes = Vec::new();
    let push = |modes: &mut Vec<EigenMode>, index, lambda, radial_scale| {
        modes.push(EigenMode {
            domain,
            index,
            lambda,
            radial_scale,
        });
    };
    match domain.kind {
        DomainKind::Interval1D => {
            if include_constant_mode && domain.has_constant_mode() {
                push(&mut modes, ModeIndex::Line { j: 0 }, 0.0, 0.0);
            }
            let jmax = cutoff.floor() as u32;
            for j in 1..=jmax {
                push(&mut modes, ModeIndex::Line { j }, j as f64, 0.0);
            }
        }
        DomainKind::Square2D => {
            let (j0, k0) = match domain.boundary {
                BoundaryCondition::Dirichlet => (1u32, 1u32),
                BoundaryCondition::Neumann => (0, 0),
                BoundaryCondition::MixedDN => (1, 0),
            };
            let top = cutoff.floor() as u32;
            for j in j0..=top {
                for k in k0..=top {
                    if j == 0 && k == 0 {
                        continue;
                    }
                    let lambda = ((j * j + k * k) as f64).sqrt();
                    if lambda <= cutoff {
                        push(&mut modes, ModeIndex::Rect { j, k }, lambda, 0.0);
                    }
                }
            }
            if include_constant_mode && domain.has_constant_mode() {
                push(&mut modes, ModeIndex::Rect { j: 0, k: 0 }, 0.0, 0.0);
            }
        }
        DomainKind::Torus2D => {
            let top = cutoff.floor() as u32;
            for j in 0..=top {
                for k in 0..=top {
                    let lambda = ((j * j + k * k) as f64).sqrt();
                    if lambda > cutoff {
                        continue;
                    }
                    for tx in [Trig::Cos, Trig::Sin] {
                        if j == 0 && tx == Trig::Sin {
                            continue;
                        }
                        for ty in [Trig::Cos, Trig::Sin] {
                            if k == 0 && ty == Trig::Sin {
                                continue;
                            }
                            if j == 0 && k == 0 && !include_constant_mode {
                                continue;
                            }
                            push(&mut modes, ModeIndex::Torus { j, k, tx, ty }, lambda, 0.0);
                        }
                    }
                }
            }
        }
        DomainKind::Disk2D => {
            let mut j = 0u32;
            loop {
                // One extra zero guards the build; z_{j,1} grows with j so
                // the loop terminates.
                let table = BesselTable::build(j as usize, max_zeros_below(&cutoff, j)?)?;
                let mut any = false;
                for (ki, (&z, &d)) in table
                    .zeros
                    .iter()
                    .zip(table.deriv_at_zeros.iter())
                    .enumerate()
                {
                    if z > cutoff {
                        break;
                    }
                    any = true;
                    let k = (ki + 1) as u32;
                    push(&mut modes, ModeIndex::Disk { j, k, m: 1 }, z, d.abs());
                    if j >= 1 {
                        push(&mut modes, ModeIndex::Disk { j, k, m: 2 }, z, d.abs());
                    }
                }
                if !any {
                    break;
                }
                j += 1;
                if j as usize > bessel::MAX_ORDER {
                    return Err(Error::Config(format!(
                        "cutoff {cutoff} needs Bessel orders beyond the tabulated maximum"
                    )));
                }
            }
        }
    }
    modes.sort_by(|a, b| {
        a.lambda
            .total_cmp(&b.lambda)
            .then_with(|| a.index.cmp(&b.index))
    });
    Ok(modes)
}

/// Number of zeros of J_j that could fall below the cutoff (over-estimate
/// from the asymptotic pi-spacing, clamped to the tabulated range).
fn max_zeros_below(cutoff: &f64, _order: u32) -> Result<usize> {
    let est = (cutoff / PI).ceil() as usize + 2;
    Ok(est.min(bessel::MAX_ZERO_INDEX))
}

/// The paper-style mode window of size N, per domain:
/// the first N modes on the interval; the per-axis block (N^2 modes) on
/// square-like domains; the first N^2 modes in spectral order on the disk
/// and torus. Rectangular blocks are returned in "onion" order so that the
/// first m^2 entries form the window of size m for every m <= N.
pub fn modes_for_window(domain: DomainSpec, n: usize) -> Result<Vec<EigenMode>> {
    if n == 0 {
        return Err(Error::Config("window size must be at least 1".into()));
    }
    let n32 = n as u32;
    match domain.kind {
        DomainKind::Interval1D => enumerate_modes(domain, n as f64 + 0.5),
        DomainKind::Square2D => {
            let k_range = |j: u32| match domain.boundary {
                BoundaryCondition::MixedDN => 1..=j.max(1), // windows use k >= 1
                _ => 1..=j.max(1),
            };
            let _ = k_range;
            let mut modes: Vec<EigenMode> = enumerate_modes(domain, ((2 * n * n) as f64).sqrt() + 0.5)?
                .into_iter()
                .filter(|m| match m.index {
                    ModeIndex::Rect { j, k } => (1..=n32).contains(&j) && (1..=n32).contains(&k),
                    _ => false,
                })
                .collect();
            modes.sort_by(|a, b| {
                let (ea, la) = onion_key(a);
                let (eb, lb) = onion_key(b);
                ea.cmp(&eb)
                    .then(la.total_cmp(&lb))
                    .then_with(|| a.index.cmp(&b.index))
            });
            debug_assert_eq!(modes.len(), n * n);
            Ok(modes)
        }
        DomainKind::Torus2D | DomainKind::Disk2D => {
            let want = n * n;
            let mut cutoff = (n as f64) + 4.0;
            loop {
                let modes = enumerate_modes(domain, cutoff)?;
                if modes.len() >= want {
                    return Ok(modes.into_iter().take(want).collect());
                }
                cutoff += 4.0;
            }
        }
    }
}

/// (window entry level, lambda) used to order rectangular windows.
fn onion_key(m: &EigenMode) -> (u32, f64) {
    match m.index {
        ModeIndex::Rect { j, k } => (j.max(k), m.lambda),
        _ => (u32::MAX, m.lambda),
    }
}

/// gamma_j = lambda_j^2 / (1 + lambda_j^2), the weight induced by the full
/// H1 observability variant; strictly increasing in lambda.
pub fn gamma_weight(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    l2 / (1.0 + l2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_dirichlet_enumeration() {
        let d = DomainSpec::interval(BoundaryCondition::Dirichlet).unwrap();
        let modes = enumerate_modes(d, 3.5).unwrap();
        assert_eq!(modes.len(), 3);
        for (i, m) in modes.iter().enumerate() {
            assert_eq!(m.lambda(), (i + 1) as f64);
            let x = 0.3;
            let want = (2.0 / PI).sqrt() * ((i as f64 + 1.0) * x).sin();
            assert!((m.eval([x, 0.0]) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn square_smallest_mode() {
        let d = DomainSpec::square(BoundaryCondition::Dirichlet).unwrap();
        let modes = enumerate_modes(d, std::f64::consts::SQRT_2).unwrap();
        assert_eq!(modes.len(), 1);
        assert_eq!(modes[0].index(), ModeIndex::Rect { j: 1, k: 1 });
        assert!((modes[0].lambda() - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn disk_smallest_mode_is_first_bessel_zero() {
        let modes = enumerate_modes(DomainSpec::disk(), 3.0).unwrap();
        assert_eq!(modes.len(), 1);
        assert_eq!(modes[0].index(), ModeIndex::Disk { j: 0, k: 1, m: 1 });
        assert!((modes[0].lambda() - 2.404825558).abs() < 1e-8);
    }

    #[test]
    fn square_torus_eigenvalues_are_integer_sums() {
        for d in [
            DomainSpec::square(BoundaryCondition::Dirichlet).unwrap(),
            DomainSpec::square(BoundaryCondition::Neumann).unwrap(),
            DomainSpec::square(BoundaryCondition::MixedDN).unwrap(),
            DomainSpec::torus(),
        ] {
            for m in enumerate_modes(d, 9.0).unwrap() {
                let (j, k) = match m.index() {
                    ModeIndex::Rect { j, k } => (j, k),
                    ModeIndex::Torus { j, k, .. } => (j, k),
                    _ => unreachable!(),
                };
                // The stored frequency is bit-identical to the square root
                // of the integer eigenvalue j^2 + k^2.
                let lam2_int = j * j + k * k;
                assert_eq!(m.lambda(), (lam2_int as f64).sqrt());
            }
        }
    }

    #[test]
    fn disk_partner_modes_share_lambda() {
        let modes = enumerate_modes(DomainSpec::disk(), 12.0).unwrap();
        for m in &modes {
            if let ModeIndex::Disk { j, k, m: 1 } = m.index() {
                if j >= 1 {
                    let partner = modes
                        .iter()
                        .find(|b| b.index() == ModeIndex::Disk { j, k, m: 2 })
                        .expect("missing sine partner");
                    assert_eq!(m.lambda(), partner.lambda());
                }
            }
        }
    }

    #[test]
    fn enumeration_is_deterministic_and_sorted() {
        let d = DomainSpec::torus();
        let a = enumerate_modes(d, 7.3).unwrap();
        let b = enumerate_modes(d, 7.3).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.index(), y.index());
            assert_eq!(x.lambda(), y.lambda());
        }
        for w in a.windows(2) {
            assert!(
                w[0].lambda() < w[1].lambda()
                    || (w[0].lambda() == w[1].lambda() && w[0].index() < w[1].index())
            );
        }
    }

    #[test]
    fn constant_mode_handling() {
        let neu = DomainSpec::interval(BoundaryCondition::Neumann).unwrap();
        let without = enumerate_modes(neu, 2.5).unwrap();
        assert_eq!(without.len(), 2);
        assert!(without.iter().all(|m| m.lambda() > 0.0));
        let with = enumerate_modes_with_options(neu, 2.5, true).unwrap();
        assert_eq!(with.len(), 3);
        assert_eq!(with[0].lambda(), 0.0);
        assert!((with[0].eval([1.0, 0.0]) - (1.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unsupported_pairs_rejected() {
        assert!(DomainSpec::new(DomainKind::Disk2D, BoundaryCondition::Neumann).is_err());
        assert!(DomainSpec::new(DomainKind::Interval1D, BoundaryCondition::MixedDN).is_err());
        assert!(DomainSpec::new(DomainKind::Torus2D, BoundaryCondition::Dirichlet).is_err());
    }

    #[test]
    fn rectangular_window_is_onion_ordered() {
        let d = DomainSpec::square(BoundaryCondition::Dirichlet).unwrap();
        let modes = modes_for_window(d, 3).unwrap();
        assert_eq!(modes.len(), 9);
        for (count, level) in [(1usize, 1u32), (4, 2), (9, 3)] {
            for m in &modes[..count] {
                match m.index() {
                    ModeIndex::Rect { j, k } => assert!(j.max(k) <= level),
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn mixed_bc_modes_include_k_zero_in_enumeration() {
        let d = DomainSpec::square(BoundaryCondition::MixedDN).unwrap();
        let modes = enumerate_modes(d, 1.5).unwrap();
        // (1, 0) with lambda 1 and (1, 1) with lambda sqrt2.
        assert_eq!(modes.len(), 2);
        assert_eq!(modes[0].index(), ModeIndex::Rect { j: 1, k: 0 });
        // Edge-mode normalization: sqrt(2)/pi * sin(x1).
        let p = [0.7, 0.3];
        let want = 2.0_f64.sqrt() / PI * (0.7_f64).sin();
        assert!((modes[0].eval(p) - want).abs() < 1e-15);
    }

    #[test]
    fn gamma_weights_increase_and_stay_in_unit_interval() {
        let mut prev = 0.0;
        for j in 1..50 {
            let g = gamma_weight(j as f64);
            assert!(g > prev && g < 1.0);
            prev = g;
        }
        assert_eq!(gamma_weight(1.0), 0.5);
    }
}
