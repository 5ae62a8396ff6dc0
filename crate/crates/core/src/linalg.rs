//! Dense row-major matrices, stationary distributions by direct solve, and the
//! Perron root of nonnegative matrices.

use crate::error::{RateError, SolveError};
use crate::graph::strongly_connected_components;

/// Default absolute accuracy for [`spectral_radius`].
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;
/// Default iteration cap per irreducible block.
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

const PIVOT_EPS: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from nested rows; all rows must share one length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).iter().sum()).collect()
    }

    /// `self * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `x * self` for a row vector `x`.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += xr * a;
            }
        }
        out
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(indices.len(), indices.len());
        for (i, &r) in indices.iter().enumerate() {
            for (j, &c) in indices.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    /// Adjacency lists of the support graph (entries strictly positive).
    pub fn support(&self) -> Vec<Vec<usize>> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 0.0)
                    .map(|(c, _)| c)
                    .collect()
            })
            .collect()
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = a.rows();
    assert!(a.is_square() && b.len() == n);
    let mut m = a.data.clone();
    let mut rhs = b.to_vec();

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[r * n + col]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("non-empty pivot range");
        if pivot.abs() < PIVOT_EPS {
            return Err(SolveError::Singular { column: col, pivot });
        }
        if pivot_row != col {
            for c in 0..n {
                m.swap(col * n + c, pivot_row * n + c);
            }
            rhs.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = m[r * n + col] / m[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= factor * m[col * n + c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }

    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| m[r * n + c] * x[c]).sum();
        x[r] = (rhs[r] - tail) / m[r * n + r];
    }
    Ok(x)
}

/// Stationary distribution of an irreducible row-stochastic matrix.
///
/// Solves `(Tᵀ − I) π = 0` with the last equation replaced by `Σ π = 1`. The
/// solve does not care about periodicity.
pub fn stationary(transition: &DenseMatrix) -> Result<Vec<f64>, SolveError> {
    let n = transition.rows();
    assert!(transition.is_square());
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = DenseMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let identity = if r == c { 1.0 } else { 0.0 };
            a.set(r, c, transition.get(c, r) - identity);
        }
    }
    for c in 0..n {
        a.set(n - 1, c, 1.0);
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;

    let pi = solve(&a, &b)?;
    if let Some((index, &value)) = pi.iter().enumerate().find(|(_, &v)| v <= 0.0) {
        return Err(SolveError::NonPositive { index, value });
    }
    Ok(pi)
}

/// Certified enclosure of a spectral radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBracket {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

impl SpectralBracket {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Spectral radius of a square nonnegative matrix within absolute error `eps`.
pub fn spectral_radius(mat: &DenseMatrix, eps: f64) -> Result<f64, RateError> {
    spectral_bracket(mat, eps, DEFAULT_MAX_ITERATIONS).map(|b| b.value())
}

/// Encloses the spectral radius of a nonnegative matrix.
///
/// The support graph is condensed into strongly connected blocks; the radius is
/// the maximum over the irreducible diagonal blocks. Each block of size > 1 is
/// shifted by `alpha·I`, `alpha > 0`, which makes it primitive (so periodic
/// blocks converge too) without moving its Perron root relative to the shift.
/// Power iteration from the all-ones vector then yields Collatz–Wielandt bounds
/// `min_i (Bx)_i/x_i ≤ ρ(B) ≤ max_i (Bx)_i/x_i`.
pub fn spectral_bracket(
    mat: &DenseMatrix,
    eps: f64,
    max_iterations: usize,
) -> Result<SpectralBracket, RateError> {
    assert!(mat.is_square(), "spectral radius of a non-square matrix");
    assert!(eps > 0.0, "accuracy must be positive");

    let mut best = SpectralBracket {
        lower: 0.0,
        upper: 0.0,
        iterations: 0,
    };
    for block in strongly_connected_components(&mat.support()) {
        let bracket = if block.len() == 1 {
            let v = mat.get(block[0], block[0]);
            SpectralBracket {
                lower: v,
                upper: v,
                iterations: 0,
            }
        } else {
            irreducible_bracket(&mat.submatrix(&block), eps, max_iterations)?
        };
        if bracket.value() > best.value() {
            best = SpectralBracket {
                iterations: best.iterations.max(bracket.iterations),
                ..bracket
            };
        } else {
            best.iterations = best.iterations.max(bracket.iterations);
        }
    }
    Ok(best)
}

fn irreducible_bracket(
    block: &DenseMatrix,
    eps: f64,
    max_iterations: usize,
) -> Result<SpectralBracket, RateError> {
    let sums = block.row_sums();
    let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sums.iter().copied().fold(0.0, f64::max);
    // Row sums of an irreducible block are positive, so alpha > 0.
    let alpha = 0.5 * (lo + hi);
    if hi - lo <= eps {
        return Ok(SpectralBracket {
            lower: lo,
            upper: hi,
            iterations: 0,
        });
    }

    let n = block.rows();
    let mut x = vec![1.0; n];
    let mut bracket = SpectralBracket {
        lower: lo,
        upper: hi,
        iterations: 0,
    };
    for iteration in 1..=max_iterations {
        let mut y = block.mul_vec(&x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += alpha * xi;
        }
        let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter().zip(&x) {
            let r = yi / xi;
            rmin = rmin.min(r);
            rmax = rmax.max(r);
        }
        bracket = SpectralBracket {
            lower: (rmin - alpha).max(bracket.lower),
            upper: (rmax - alpha).min(bracket.upper),
            iterations: iteration,
        };
        if bracket.width() <= eps {
            return Ok(bracket);
        }
        let scale = y.iter().copied().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / scale).collect();
    }
    Err(RateError::Accuracy {
        iterations: max_iterations,
        lower: bracket.lower,
        upper: bracket.upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_of_two_state_chain() {
        let t = DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![1.0, 0.0]]);
        let pi = stationary(&t).unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((pi[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_of_periodic_cycle() {
        let t = DenseMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ]);
        let pi = stationary(&t).unwrap();
        for p in pi {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_rejects_reducible_chain() {
        let t = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(stationary(&t).is_err());
    }

    #[test]
    fn radius_of_periodic_two_cycle() {
        let t = DenseMatrix::from_rows(&[vec![0.0, 0.5], vec![0.25, 0.0]]);
        let r = spectral_radius(&t, 1e-12).unwrap();
        assert!((r - 0.125f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn radius_of_zero_and_empty() {
        assert_eq!(
            spectral_radius(&DenseMatrix::zeros(3, 3), 1e-10).unwrap(),
            0.0
        );
        assert_eq!(
            spectral_radius(&DenseMatrix::zeros(0, 0), 1e-10).unwrap(),
            0.0
        );
    }

    #[test]
    fn radius_of_stochastic_matrix_is_one() {
        let t = DenseMatrix::from_rows(&[vec![0.7, 0.3], vec![0.6, 0.4]]);
        let r = spectral_radius(&t, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radius_of_reducible_matrix_is_block_maximum() {
        // upper block triangular: blocks {0,1} with radius sqrt(0.02), {2} with 0.3
        let t = DenseMatrix::from_rows(&[
            vec![0.0, 0.1, 0.5],
            vec![0.2, 0.0, 0.5],
            vec![0.0, 0.0, 0.3],
        ]);
        let r = spectral_radius(&t, 1e-12).unwrap();
        assert!((r - 0.3).abs() < 1e-11);
    }

    #[test]
    fn iteration_cap_reports_bracket() {
        let t = DenseMatrix::from_rows(&[vec![0.1, 0.9], vec![0.8, 0.05]]);
        match spectral_bracket(&t, 1e-15, 1) {
            Err(RateError::Accuracy { lower, upper, .. }) => assert!(lower <= upper),
            other => panic!("expected accuracy failure, got {other:?}"),
        }
    }
}
