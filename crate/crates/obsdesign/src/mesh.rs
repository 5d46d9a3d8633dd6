//! Cell decompositions, discrete measures, quadrature of eigenfunction
//! products, and the two design representations (binary sets, relaxed
//! densities).
//!
//! All meshes are tensor products: uniform cells on the interval and on
//! square/torus grids, annular sectors (uniform in r and theta) on the
//! disk. Quadrature is a per-axis Gauss rule with q in {1, 2, 3} points;
//! since every supported eigenfunction factorizes along the mesh axes, the
//! 2D product rule is assembled from cached 1D integrals.

use crate::domains::{DomainKind, DomainSpec, EigenMode};
use crate::util::{gauss_rule, sum_pairwise};
use crate::{Error, Result};
use rayon::prelude::*;
use std::io::Write;
use std::sync::Arc;

/// Resolution parameters for [`build_mesh`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// n uniform cells on the interval.
    Line { n: usize },
    /// nx-by-ny uniform cells on square or torus.
    Grid { nx: usize, ny: usize },
    /// Polar grid: n_r annuli times n_theta sectors on the disk.
    Polar { n_r: usize, n_theta: usize },
}

/// A tensor-product cell decomposition of a domain.
#[derive(Debug)]
pub struct Mesh {
    domain: DomainSpec,
    resolution: Resolution,
    /// Cell edges along each axis (len = n_axis + 1).
    edges: [Vec<f64>; 2],
    centers: Vec<[f64; 2]>,
    measures: Vec<f64>,
}

impl Mesh {
    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn num_cells(&self) -> usize {
        self.measures.len()
    }

    /// Cell center in the natural chart ([x, 0] in 1D, polar on the disk).
    pub fn center(&self, cell: usize) -> [f64; 2] {
        self.centers[cell]
    }

    pub fn measure(&self, cell: usize) -> f64 {
        self.measures[cell]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    /// Number of cells along each axis ((n, 1) in 1D).
    pub fn axis_cells(&self) -> (usize, usize) {
        (self.edges[0].len() - 1, self.edges[1].len().max(2) - 1)
    }

    /// Axis-cell indices of a flat cell id (row-major, axis 0 fastest).
    pub fn split_id(&self, cell: usize) -> (usize, usize) {
        let (nx, _) = self.axis_cells();
        (cell % nx, cell / nx)
    }

    /// Flat id from axis-cell indices.
    pub fn flat_id(&self, ix: usize, iy: usize) -> usize {
        let (nx, _) = self.axis_cells();
        iy * nx + ix
    }

    /// Sum of all cell measures (pairwise summation).
    pub fn total_measure(&self) -> f64 {
        sum_pairwise(&self.measures)
    }

    /// Integrates `f` over one cell with the q-point per-axis Gauss rule;
    /// on the disk the area element r dr dtheta is included.
    pub fn integrate_cell<F: Fn([f64; 2]) -> f64>(&self, cell: usize, q: usize, f: F) -> f64 {
        let rule = gauss_rule(q);
        let (ix, iy) = self.split_id(cell);
        let (x0, x1) = (self.edges[0][ix], self.edges[0][ix + 1]);
        match self.domain.dim() {
            1 => {
                let (hx, mx) = (0.5 * (x1 - x0), 0.5 * (x0 + x1));
                rule.iter()
                    .map(|&(t, w)| w * hx * f([mx + hx * t, 0.0]))
                    .sum()
            }
            _ => {
                let (y0, y1) = (self.edges[1][iy], self.edges[1][iy + 1]);
                let (hx, mx) = (0.5 * (x1 - x0), 0.5 * (x0 + x1));
                let (hy, my) = (0.5 * (y1 - y0), 0.5 * (y0 + y1));
                let radial = self.domain.kind() == DomainKind::Disk2D;
                let mut s = 0.0;
                for &(tx, wx) in rule {
                    let x = mx + hx * tx;
                    let rw = if radial { x } else { 1.0 };
                    for &(ty, wy) in rule {
                        let y = my + hy * ty;
                        s += wx * wy * hx * hy * rw * f([x, y]);
                    }
                }
                s
            }
        }
    }

    /// Per-axis Gauss integral of an eigenmode factor (or a product of two
    /// factors) over one axis cell; the radial weight r is included on the
    /// disk's axis 0.
    fn axis_integral(&self, axis: usize, icell: usize, q: usize, f: &dyn Fn(f64) -> f64) -> f64 {
        let rule = gauss_rule(q);
        let (a, b) = (self.edges[axis][icell], self.edges[axis][icell + 1]);
        let (h, m) = (0.5 * (b - a), 0.5 * (a + b));
        let radial = axis == 0 && self.domain.kind() == DomainKind::Disk2D;
        rule.iter()
            .map(|&(t, w)| {
                let x = m + h * t;
                let rw = if radial { x } else { 1.0 };
                w * h * rw * f(x)
            })
            .sum()
    }
}

/// Builds a uniform tensor mesh for the domain.
pub fn build_mesh(domain: DomainSpec, resolution: Resolution) -> Result<Arc<Mesh>> {
    use std::f64::consts::PI;
    let uniform_edges = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    };
    let (edges, kind_ok) = match (domain.kind(), resolution) {
        (DomainKind::Interval1D, Resolution::Line { n }) => {
            ([uniform_edges(0.0, PI, n), vec![0.0, 1.0]], n >= 2)
        }
        (DomainKind::Square2D, Resolution::Grid { nx, ny }) => (
            [uniform_edges(0.0, PI, nx), uniform_edges(0.0, PI, ny)],
            nx >= 1 && ny >= 1 && nx.max(ny) >= 2,
        ),
        (DomainKind::Torus2D, Resolution::Grid { nx, ny }) => (
            [
                uniform_edges(0.0, 2.0 * PI, nx),
                uniform_edges(0.0, 2.0 * PI, ny),
            ],
            nx >= 2 && ny >= 2,
        ),
        (DomainKind::Disk2D, Resolution::Polar { n_r, n_theta }) => (
            [
                uniform_edges(0.0, 1.0, n_r),
                uniform_edges(0.0, 2.0 * PI, n_theta),
            ],
            n_r >= 1 && n_theta >= 1,
        ),
        (kind, res) => {
            return Err(Error::Config(format!(
                "resolution {res:?} does not match domain {kind:?}"
            )))
        }
    };
    if !kind_ok {
        return Err(Error::Config(format!(
            "resolution too coarse for {:?}: {:?}",
            domain.kind(),
            resolution
        )));
    }

    let nx = edges[0].len() - 1;
    let ny = if domain.dim() == 1 { 1 } else { edges[1].len() - 1 };
    let mut centers = Vec::with_capacity(nx * ny);
    let mut measures = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let (x0, x1) = (edges[0][ix], edges[0][ix + 1]);
            let (cx, mx) = (0.5 * (x0 + x1), x1 - x0);
            match domain.kind() {
                DomainKind::Interval1D => {
                    centers.push([cx, 0.0]);
                    measures.push(mx);
                }
                DomainKind::Square2D | DomainKind::Torus2D => {
                    let (y0, y1) = (edges[1][iy], edges[1][iy + 1]);
                    centers.push([cx, 0.5 * (y0 + y1)]);
                    measures.push(mx * (y1 - y0));
                }
                DomainKind::Disk2D => {
                    let (y0, y1) = (edges[1][iy], edges[1][iy + 1]);
                    centers.push([cx, 0.5 * (y0 + y1)]);
                    // Annular sector: (r_out^2 - r_in^2)/2 * dtheta.
                    measures.push(0.5 * (x1 * x1 - x0 * x0) * (y1 - y0));
                }
            }
        }
    }
    debug_assert!(measures.iter().all(|&m| m > 0.0));
    Ok(Arc::new(Mesh {
        domain,
        resolution,
        edges,
        centers,
        measures,
    }))
}

/// A binary design: one bit per cell with a target volume fraction.
#[derive(Debug, Clone)]
pub struct SubsetIndicator {
    mesh: Arc<Mesh>,
    bits: Vec<bool>,
    target_fraction: f64,
}

impl SubsetIndicator {
    /// Builds an indicator from explicit bits.
    pub fn new(mesh: Arc<Mesh>, bits: Vec<bool>, target_fraction: f64) -> Result<Self> {
        if bits.len() != mesh.num_cells() {
            return Err(Error::Config(format!(
                "indicator has {} bits for {} cells",
                bits.len(),
                mesh.num_cells()
            )));
        }
        if !(0.0..=1.0).contains(&target_fraction) {
            return Err(Error::Config(format!(
                "target fraction {target_fraction} outside [0, 1]"
            )));
        }
        Ok(SubsetIndicator {
            mesh,
            bits,
            target_fraction,
        })
    }

    /// Selects the cells whose center satisfies the predicate; the target
    /// fraction is derived from the selected measure.
    pub fn from_predicate<F: Fn([f64; 2]) -> bool>(mesh: Arc<Mesh>, pred: F) -> Self {
        let bits: Vec<bool> = (0..mesh.num_cells())
            .map(|c| pred(mesh.center(c)))
            .collect();
        let mass: f64 = sum_pairwise(
            &bits
                .iter()
                .zip(mesh.measures())
                .map(|(&b, &m)| if b { m } else { 0.0 })
                .collect::<Vec<_>>(),
        );
        let target_fraction = mass / mesh.total_measure();
        SubsetIndicator {
            mesh,
            bits,
            target_fraction,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn target_fraction(&self) -> f64 {
        self.target_fraction
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.bits[cell]
    }

    /// Measure of the selected cells (pairwise summation).
    pub fn measure(&self) -> f64 {
        let terms: Vec<f64> = self
            .bits
            .iter()
            .zip(self.mesh.measures())
            .map(|(&b, &m)| if b { m } else { 0.0 })
            .collect();
        sum_pairwise(&terms)
    }

    /// Converts to a relaxed field with values in {0, 1}; mass is preserved
    /// exactly.
    pub fn to_density(&self) -> DensityField {
        DensityField {
            mesh: Arc::clone(&self.mesh),
            values: self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
            target_fraction: self.target_fraction,
        }
    }

    /// Number of selected cells.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Cells in the symmetric difference with another indicator.
    pub fn symmetric_difference_count(&self, other: &SubsetIndicator) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// A relaxed design: a value in [0, 1] per cell with prescribed mass.
#[derive(Debug, Clone)]
pub struct DensityField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
    target_fraction: f64,
}

impl DensityField {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>, target_fraction: f64) -> Result<Self> {
        if values.len() != mesh.num_cells() {
            return Err(Error::Config(format!(
                "field has {} values for {} cells",
                values.len(),
                mesh.num_cells()
            )));
        }
        if values.iter().any(|&v| !(-1e-12..=1.0 + 1e-12).contains(&v)) {
            return Err(Error::Config("field values must lie in [0, 1]".into()));
        }
        Ok(DensityField {
            mesh,
            values,
            target_fraction,
        })
    }

    /// The constant field a = L.
    pub fn constant(mesh: Arc<Mesh>, level: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::Config(format!("level {level} outside [0, 1]")));
        }
        let n = mesh.num_cells();
        Ok(DensityField {
            mesh,
            values: vec![level; n],
            target_fraction: level,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn target_fraction(&self) -> f64 {
        self.target_fraction
    }

    /// Total mass (pairwise summation of a_c times cell measure).
    pub fn mass(&self) -> f64 {
        let terms: Vec<f64> = self
            .values
            .iter()
            .zip(self.mesh.measures())
            .map(|(&v, &m)| v * m)
            .collect();
        sum_pairwise(&terms)
    }

    /// Share of cells taking a value in {0, 1} up to 1e-9.
    pub fn bang_bang_fraction(&self) -> f64 {
        let n = self.values.len();
        let k = self
            .values
            .iter()
            .filter(|&&v| v <= 1e-9 || (1.0 - v).abs() <= 1e-9)
            .count();
        k as f64 / n as f64
    }
}

/// Rows = modes, columns = cells; entry = integral of phi_j^2 over the cell.
#[derive(Debug)]
pub struct ModeMassMatrix {
    mesh: Arc<Mesh>,
    modes: Vec<EigenMode>,
    /// Row-major storage, row j holds the per-cell masses of mode j.
    weights: Vec<f64>,
}

impl ModeMassMatrix {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn modes(&self) -> &[EigenMode] {
        &self.modes
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.mesh.num_cells();
        &self.weights[j * n..(j + 1) * n]
    }

    /// Sum of row j over all cells (discrete normalization of the mode).
    pub fn row_sum(&self, j: usize) -> f64 {
        sum_pairwise(self.row(j))
    }

    /// Mass of mode j on a binary set.
    pub fn row_mass_on_set(&self, j: usize, set: &SubsetIndicator) -> f64 {
        let terms: Vec<f64> = self
            .row(j)
            .iter()
            .zip(set.bits())
            .map(|(&w, &b)| if b { w } else { 0.0 })
            .collect();
        sum_pairwise(&terms)
    }

    /// Mass of mode j weighted by a relaxed field.
    pub fn row_mass_on_field(&self, j: usize, field: &DensityField) -> f64 {
        let terms: Vec<f64> = self
            .row(j)
            .iter()
            .zip(field.values())
            .map(|(&w, &a)| w * a)
            .collect();
        sum_pairwise(&terms)
    }
}

/// Assembles the mode-mass matrix with the q-point per-axis Gauss rule.
///
/// Eigenfunction squares factor along the mesh axes, so each entry is the
/// product of two cached 1D integrals and the assembly stays linear in
/// modes-plus-cells rather than quadratic.
pub fn mode_mass(mesh: &Arc<Mesh>, modes: &[EigenMode], q: usize) -> Result<ModeMassMatrix> {
    if !(1..=3).contains(&q) {
        return Err(Error::Config(format!("quadrature order {q} not in 1..=3")));
    }
    for m in modes {
        if m.domain() != mesh.domain() {
            return Err(Error::Config(
                "mode/mesh domain mismatch in mass assembly".into(),
            ));
        }
    }
    let (nx, ny) = mesh.axis_cells();
    let ncells = mesh.num_cells();
    let one_d = mesh.domain().dim() == 1;

    let weights: Vec<f64> = modes
        .par_iter()
        .flat_map_iter(|mode| {
            // Per-axis integrals of the squared axis factor.
            let ix: Vec<f64> = (0..nx)
                .map(|i| {
                    mesh.axis_integral(0, i, q, &|t| {
                        let v = mode.axis_factor(0, t);
                        v * v
                    })
                })
                .collect();
            let iy: Vec<f64> = if one_d {
                vec![1.0]
            } else {
                (0..ny)
                    .map(|i| {
                        mesh.axis_integral(1, i, q, &|t| {
                            let v = mode.axis_factor(1, t);
                            v * v
                        })
                    })
                    .collect()
            };
            (0..ncells).map(move |c| {
                let (cx, cy) = (c % nx, c / nx);
                ix[cx] * iy[cy]
            })
        })
        .collect();

    Ok(ModeMassMatrix {
        mesh: Arc::clone(mesh),
        modes: modes.to_vec(),
        weights,
    })
}

/// Gram matrix of cross masses restricted to a design:
/// G_{jk} = integral over the design of phi_j phi_k.
///
/// `density` gives the per-cell weight (bits or relaxed values).
pub fn cross_mass_gram(
    mesh: &Arc<Mesh>,
    modes: &[EigenMode],
    density: &[f64],
    q: usize,
) -> Result<nalgebra::DMatrix<f64>> {
    if density.len() != mesh.num_cells() {
        return Err(Error::Config("density length does not match mesh".into()));
    }
    if !(1..=3).contains(&q) {
        return Err(Error::Config(format!("quadrature order {q} not in 1..=3")));
    }
    let m = modes.len();
    let (nx, ny) = mesh.axis_cells();
    let one_d = mesh.domain().dim() == 1;
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|j| (j..m).map(move |k| (j, k)))
        .collect();
    let entries: Vec<f64> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let (mj, mk) = (&modes[j], &modes[k]);
            let ix: Vec<f64> = (0..nx)
                .map(|i| {
                    mesh.axis_integral(0, i, q, &|t| mj.axis_factor(0, t) * mk.axis_factor(0, t))
                })
                .collect();
            let iy: Vec<f64> = if one_d {
                vec![1.0]
            } else {
                (0..ny)
                    .map(|i| {
                        mesh.axis_integral(1, i, q, &|t| {
                            mj.axis_factor(1, t) * mk.axis_factor(1, t)
                        })
                    })
                    .collect()
            };
            let terms: Vec<f64> = (0..mesh.num_cells())
                .map(|c| {
                    let (cx, cy) = (c % nx, c / nx);
                    density[c] * ix[cx] * iy[cy]
                })
                .collect();
            sum_pairwise(&terms)
        })
        .collect();
    let mut g = nalgebra::DMatrix::zeros(m, m);
    for (&(j, k), &v) in pairs.iter().zip(&entries) {
        g[(j, k)] = v;
        g[(k, j)] = v;
    }
    Ok(g)
}

/// Measure of a binary design (exported for symmetry with `mass_of`).
pub fn measure_of(set: &SubsetIndicator) -> f64 {
    set.measure()
}

/// Mass of a relaxed design.
pub fn mass_of(field: &DensityField) -> f64 {
    field.mass()
}

/// Writes cell geometry and an optional per-cell value column as CSV with
/// columns `cell_id, center coordinates, measure[, value]`.
pub fn write_cells_csv<W: Write>(mesh: &Mesh, values: Option<&[f64]>, out: &mut W) -> std::io::Result<()> {
    let dim = mesh.domain().dim();
    let value_col = values.map(|_| ",value").unwrap_or("");
    if dim == 1 {
        writeln!(out, "cell_id,x,measure{value_col}")?;
    } else if mesh.domain().kind() == DomainKind::Disk2D {
        writeln!(out, "cell_id,r,theta,measure{value_col}")?;
    } else {
        writeln!(out, "cell_id,x1,x2,measure{value_col}")?;
    }
    for c in 0..mesh.num_cells() {
        let p = mesh.center(c);
        let coords = if dim == 1 {
            format!("{}", p[0])
        } else {
            format!("{},{}", p[0], p[1])
        };
        match values {
            Some(v) => writeln!(out, "{c},{coords},{},{}", mesh.measure(c), v[c])?,
            None => writeln!(out, "{c},{coords},{}", mesh.measure(c))?,
        }
    }
    Ok(())
}
