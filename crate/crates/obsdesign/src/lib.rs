//! Spectral tools for optimal observation design on model domains.
//!
//! The crate computes eigenbases of the Laplacian on an interval, square,
//! flat torus and unit disk, discretizes designs on tensor-product meshes,
//! evaluates the spectral concentration criteria and observability constants
//! built from those bases, and solves the two optimal-design problems
//! (level-set design for fixed initial data, truncated uniform design by a
//! dual saddle-point method). A separate module constructs a fractal set
//! whose induced energy density has all-positive cosine coefficients.

pub mod cantor;
pub mod design;
pub mod domains;
pub mod error;
pub mod functionals;
pub mod mesh;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) mod util {
    /// Pairwise (cascade) summation; keeps accumulation error at
    /// O(log n * eps) so that measure bookkeeping meets 1e-12 relative.
    pub fn sum_pairwise(v: &[f64]) -> f64 {
        match v.len() {
            0 => 0.0,
            1 => v[0],
            2 => v[0] + v[1],
            n if n <= 32 => {
                let mut s = 0.0;
                for &x in v {
                    s += x;
                }
                s
            }
            n => {
                let (lo, hi) = v.split_at(n / 2);
                sum_pairwise(lo) + sum_pairwise(hi)
            }
        }
    }

    /// Gauss-Legendre nodes and weights on [-1, 1] for q in {1, 2, 3}.
    pub fn gauss_rule(q: usize) -> &'static [(f64, f64)] {
        const Q1: [(f64, f64); 1] = [(0.0, 2.0)];
        const Q2: [(f64, f64); 2] = [(-0.577_350_269_189_625_8, 1.0), (0.577_350_269_189_625_8, 1.0)];
        const Q3: [(f64, f64); 3] = [
            (-0.774_596_669_241_483_4, 5.0 / 9.0),
            (0.0, 8.0 / 9.0),
            (0.774_596_669_241_483_4, 5.0 / 9.0),
        ];
        match q {
            1 => &Q1,
            2 => &Q2,
            3 => &Q3,
            _ => panic!("quadrature order must be 1, 2 or 3"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::util::sum_pairwise;

    #[test]
    fn pairwise_sum_matches_naive_on_small_inputs() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((sum_pairwise(&v) - naive).abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_of_uniform_cells_is_tight() {
        let n = 131_072;
        let v = vec![std::f64::consts::PI / n as f64; n];
        let rel = (sum_pairwise(&v) - std::f64::consts::PI).abs() / std::f64::consts::PI;
        assert!(rel < 1e-14, "relative error {rel}");
    }
}
