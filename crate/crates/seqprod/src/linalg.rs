//! Dense complex matrices and the Hermitian spectral toolkit.
//!
//! Everything upstream (effects, processes, universal constructions) reduces
//! to a small set of primitives implemented here: a cyclic Jacobi
//! eigendecomposition for Hermitian matrices with complex rotations, the
//! functional calculus built on it (`apply_function`, `sqrt_psd`,
//! `pinv_psd`), operator norms via singular values, and positivity tests.
//! All routines are deterministic for a fixed input: the Jacobi sweep order
//! is fixed and the final sort is stable, so repeated runs produce
//! bit-identical results.

use num_complex::Complex64;

use crate::tol::Tolerances;

/// Hard cap on Jacobi sweeps. Cyclic Jacobi converges quadratically once the
/// off-diagonal mass is small; at the dimensions this crate works with
/// (blocks ≤ 64) convergence takes well under twenty sweeps, so hitting the
/// cap indicates a non-finite or non-Hermitian input slipping past the gates.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Errors from the dense linear-algebra layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not Hermitian: ‖a − a*‖_F = {deviation:.3e} exceeds the gate")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:.3e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e} below the rejection threshold")]
    NotPositive { min_eigenvalue: f64 },
    #[error("shape mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
}

/// Dense complex matrix, row-major storage.
///
/// Used both for square algebra elements and for rectangular maps (Kraus
/// operators, isometries onto corners). Entries are validated finite at
/// construction; spectral routines additionally require squareness and
/// Hermiticity and report violations as [`LinalgError`]s rather than
/// producing garbage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> CMatrix {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Identity on `n` dimensions.
    pub fn identity(n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from row-major data; the entry count must match the shape and
    /// every entry must be finite.
    pub fn from_data(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<CMatrix, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch {
                left_rows: rows,
                left_cols: cols,
                right_rows: data.len(),
                right_cols: 1,
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Build entrywise from a closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> CMatrix {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Square matrix from rows of real entries (test and fixture helper).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> CMatrix {
        let n = rows.len();
        CMatrix::from_fn(n, rows.first().map_or(0, Vec::len), |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Diagonal square matrix with the given real diagonal.
    pub fn from_real_diag(diag: &[f64]) -> CMatrix {
        let n = diag.len();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) }
        })
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

    /// Dimension of a square matrix.
    pub fn dim(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add(&self, rhs: &CMatrix) -> Result<CMatrix, LinalgError> {
        self.check_same_shape(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(CMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, rhs: &CMatrix) -> Result<CMatrix, LinalgError> {
        self.check_same_shape(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(CMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius inner product `⟨self, rhs⟩ = Σ conj(self)·rhs`.
    pub fn frobenius_inner(&self, rhs: &CMatrix) -> Result<Complex64, LinalgError> {
        self.check_same_shape(rhs)?;
        Ok(self.data.iter().zip(&rhs.data).map(|(a, b)| a.conj() * b).sum())
    }

    /// Hermitian part `(a + a*)/2` of a square matrix.
    pub fn hermitian_part(&self) -> Result<CMatrix, LinalgError> {
        let n = self.dim()?;
        Ok(CMatrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5))
    }

    /// Frobenius distance to the adjoint, zero for Hermitian matrices.
    pub fn hermitian_deviation(&self) -> Result<f64, LinalgError> {
        let n = self.dim()?;
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                sum += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        Ok(sum.sqrt())
    }

    /// `‖a − a*‖_F ≤ hermitian_rel · max(1, ‖a‖_F)`.
    pub fn is_hermitian_within(&self, tols: &Tolerances) -> Result<bool, LinalgError> {
        let dev = self.hermitian_deviation()?;
        Ok(dev <= tols.hermitian_rel * self.frobenius_norm().max(1.0))
    }

    fn check_same_shape(&self, rhs: &CMatrix) -> Result<(), LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of a Hermitian eigendecomposition: `a = V·diag(λ)·V*` with
/// eigenvalues ascending and `V` unitary (columns are eigenvectors).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose `k`-th column is the eigenvector for
    /// `eigenvalues[k]`.
    pub vectors: CMatrix,
    /// Off-diagonal convergence threshold the iteration actually used.
    pub tol_used: f64,
}

impl EigenDecomposition {
    /// Rebuild `V·diag(g(λ))·V*` for an arbitrary spectral function `g`.
    pub fn rebuild(&self, g: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.eigenvalues.len();
        let values: Vec<Complex64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &gv) in values.iter().enumerate() {
            if gv == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * gv;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `‖V·diag(λ)·V* − a‖_F` against the original matrix.
    pub fn reconstruction_error(&self, a: &CMatrix) -> f64 {
        let rebuilt = self.rebuild(|l| Complex64::new(l, 0.0));
        match rebuilt.sub(a) {
            Ok(d) => d.frobenius_norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// `‖V*V − 1‖_F`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.eigenvalues.len();
        let vstar_v = self.vectors.adjoint().mul(&self.vectors).expect("square");
        vstar_v.sub(&CMatrix::identity(n)).expect("same shape").frobenius_norm()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi iteration with
/// complex plane rotations.
///
/// Each rotation annihilates one off-diagonal pair `(p, q)`: the complex
/// phase of `a[p][q]` is absorbed into a diagonal unitary, after which the
/// classical real Jacobi angle (Rutishauser's stable tangent formula) zeroes
/// the pair. Sweeps run in a fixed row-major order until the off-diagonal
/// Frobenius mass drops below `eig_sweep_rel · ‖a‖_F`, floored at the
/// rotations' own rounding floor, so the decomposition is deterministic for
/// a fixed input.
pub fn eig_hermitian(a: &CMatrix, tols: &Tolerances) -> Result<EigenDecomposition, LinalgError> {
    let n = a.dim()?;
    let dev = a.hermitian_deviation()?;
    let scale = a.frobenius_norm();
    if dev > tols.hermitian_rel * scale.max(1.0) {
        return Err(LinalgError::NotHermitian { deviation: dev });
    }

    // The sweep target is relative, but the rotations have a rounding floor
    // of their own: a near-identity rotation against a clustered diagonal
    // re-injects off-diagonal mass of order ε·‖a‖ every pass, so a target
    // below that floor is never met. 1024·ε keeps the stop above the floor
    // at every dimension handled here while staying far inside every
    // consumer tolerance.
    let threshold = tols.eig_sweep_rel.max(1024.0 * f64::EPSILON) * scale;
    let mut b = a.clone();
    let mut v = CMatrix::identity(n);

    let mut off = off_diagonal_mass(&b);
    let mut sweeps = 0;
    while off > threshold {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, off_diagonal: off });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate_pair(&mut b, &mut v, p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_mass(&b);
    }

    // Diagonal of the converged iterate is the spectrum; sort ascending and
    // permute the accumulated eigenvector columns the same way.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        b[(i, i)].re.partial_cmp(&b[(j, j)].re).expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| b[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    Ok(EigenDecomposition { eigenvalues, vectors, tol_used: threshold })
}

/// Off-diagonal Frobenius mass `(Σ_{i≠j} |b_ij|²)^{1/2}`.
fn off_diagonal_mass(b: &CMatrix) -> f64 {
    let n = b.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += b[(i, j)].norm_sqr() + b[(j, i)].norm_sqr();
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation annihilating the `(p, q)` entry of `b`,
/// accumulating the applied unitary into `v`.
fn rotate_pair(b: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    // The input is Hermitian only up to tolerance and the mirror entries
    // accumulate rounding separately, so decide the rotation from their
    // symmetrization; an exactly-zero (p, q) facing a nonzero (q, p)
    // residue would otherwise survive every sweep.
    let beta = (b[(p, q)] + b[(q, p)].conj()).scale(0.5);
    let r = beta.norm();
    if r == 0.0 {
        b[(p, q)] = Complex64::new(0.0, 0.0);
        b[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let n = b.rows();
    let alpha = b[(p, p)].re;
    let gamma = b[(q, q)].re;
    // Phase factor turning b[p][q] into the positive real r.
    let d = beta.conj() / r;

    // Rutishauser's formula for the smaller-angle tangent.
    let theta = (gamma - alpha) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        // Overflow-safe limit of the closed form below.
        1.0 / (2.0 * theta)
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // The combined 2x2 unitary on coordinates (p, q) is
    //   U = [[c, s], [−d·s, d·c]],
    // and we replace b by U*·b·U. Left action first (rows p, q) ...
    let d_conj_s = d.conj() * s;
    let d_conj_c = d.conj() * c;
    for j in 0..n {
        let bp = b[(p, j)];
        let bq = b[(q, j)];
        b[(p, j)] = bp * c - bq * d_conj_s;
        b[(q, j)] = bp * s + bq * d_conj_c;
    }
    // ... then right action (columns p, q), on b and on the accumulator.
    let d_s = d * s;
    let d_c = d * c;
    for i in 0..n {
        let bp = b[(i, p)];
        let bq = b[(i, q)];
        b[(i, p)] = bp * c - bq * d_s;
        b[(i, q)] = bp * s + bq * d_c;

        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * c - vq * d_s;
        v[(i, q)] = vp * s + vq * d_c;
    }
    // The rotation zeroes the pair analytically; pin it and keep the
    // diagonal exactly real so round-off cannot accumulate there.
    b[(p, q)] = Complex64::new(0.0, 0.0);
    b[(q, p)] = Complex64::new(0.0, 0.0);
    b[(p, p)] = Complex64::new(b[(p, p)].re, 0.0);
    b[(q, q)] = Complex64::new(b[(q, q)].re, 0.0);
}

/// Functional calculus: `g` applied to the spectrum of a Hermitian matrix,
/// `V·diag(g(λ))·V*`.
pub fn apply_function(
    a: &CMatrix,
    tols: &Tolerances,
    g: impl Fn(f64) -> Complex64,
) -> Result<CMatrix, LinalgError> {
    let eig = eig_hermitian(a, tols)?;
    Ok(eig.rebuild(g))
}

/// Square root of a positive semidefinite matrix.
///
/// Spectrum slightly negative from round-off is clamped to zero; anything
/// below `−psd_reject_rel · ‖a‖` is rejected as genuinely non-positive.
pub fn sqrt_psd(a: &CMatrix, tols: &Tolerances) -> Result<CMatrix, LinalgError> {
    let eig = psd_spectrum(a, tols)?;
    Ok(eig.rebuild(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)))
}

/// Moore–Penrose pseudo-inverse of a positive semidefinite matrix.
///
/// Eigenvalues at or below the shared rank cut ([`Tolerances::rank_cut`])
/// are treated as kernel, so `a · pinv_psd(a)` equals the support projection
/// produced by the same cut.
pub fn pinv_psd(a: &CMatrix, tols: &Tolerances) -> Result<CMatrix, LinalgError> {
    let eig = psd_spectrum(a, tols)?;
    let cut = tols.rank_cut(top_eigenvalue(&eig));
    Ok(eig.rebuild(|l| {
        if l > cut { Complex64::new(1.0 / l, 0.0) } else { Complex64::new(0.0, 0.0) }
    }))
}

/// Spectral projection onto the range of a positive semidefinite matrix,
/// using the same rank cut as [`pinv_psd`].
pub fn support_projection(a: &CMatrix, tols: &Tolerances) -> Result<CMatrix, LinalgError> {
    let eig = psd_spectrum(a, tols)?;
    let cut = tols.rank_cut(top_eigenvalue(&eig));
    Ok(eig.rebuild(|l| {
        if l > cut { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    }))
}

/// Eigendecomposition gated on positive semidefiniteness: rejects spectra
/// below `−psd_reject_rel · max(1, ‖a‖_op)`.
fn psd_spectrum(a: &CMatrix, tols: &Tolerances) -> Result<EigenDecomposition, LinalgError> {
    let eig = eig_hermitian(a, tols)?;
    let norm = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -tols.psd_reject_rel * norm.max(1.0) {
        return Err(LinalgError::NotPositive { min_eigenvalue: min });
    }
    Ok(eig)
}

fn top_eigenvalue(eig: &EigenDecomposition) -> f64 {
    eig.eigenvalues.last().copied().unwrap_or(0.0)
}

/// Operator norm (largest singular value), valid for rectangular inputs.
///
/// Computed as `sqrt(λ_max(a*·a))`; for self-adjoint `a` this coincides with
/// the largest absolute eigenvalue.
pub fn op_norm(a: &CMatrix, tols: &Tolerances) -> f64 {
    if a.frobenius_norm() == 0.0 {
        return 0.0;
    }
    let h = a.adjoint().mul(a).expect("a*·a shapes agree");
    // Symmetrize away one ulp of product round-off before the spectral call.
    let h = h.hermitian_part().expect("a*·a is square");
    let eig = eig_hermitian(&h, tols)
        .expect("a*·a of a finite matrix is Hermitian and Jacobi converges on it");
    top_eigenvalue(&eig).max(0.0).sqrt()
}

/// Spectral positivity test: true iff the spectrum stays above
/// `−tol · max(1, ‖a‖_op)`.
pub fn is_positive(a: &CMatrix, tol: f64, tols: &Tolerances) -> Result<bool, LinalgError> {
    Ok(min_eigenvalue_margin(a, tols)? >= -tol)
}

/// Smallest eigenvalue of a self-adjoint matrix, normalized by
/// `max(1, ‖a‖_op)`; positive values certify positivity with that margin.
pub fn min_eigenvalue_margin(a: &CMatrix, tols: &Tolerances) -> Result<f64, LinalgError> {
    let eig = eig_hermitian(a, tols)?;
    let norm = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    Ok(min / norm.max(1.0))
}

/// Order-free positivity test: a self-adjoint `a` is positive iff
/// `‖ ‖a‖·1 − a ‖ ≤ ‖a‖`, checked here with slack `tol · max(1, ‖a‖)`.
///
/// This is the route through norms alone; it must agree with the spectral
/// [`is_positive`] and the two are property-tested against each other.
pub fn is_positive_via_norm(a: &CMatrix, tol: f64, tols: &Tolerances) -> Result<bool, LinalgError> {
    let n = a.dim()?;
    let dev = a.hermitian_deviation()?;
    if dev > tols.hermitian_rel * a.frobenius_norm().max(1.0) {
        return Err(LinalgError::NotHermitian { deviation: dev });
    }
    let norm = op_norm(a, tols);
    let shifted = CMatrix::identity(n).scale_re(norm).sub(a)?;
    Ok(op_norm(&shifted, tols) <= norm + tol * norm.max(1.0))
}

/// Least-squares proportionality detection: a coefficient `α ≠ 0` with
/// `‖f − α·g‖_F ≤ proportionality · max(‖f‖_F, ‖g‖_F)`, if one exists.
///
/// By convention two zero matrices are proportional with coefficient one.
pub fn proportionality_coefficient(
    f: &CMatrix,
    g: &CMatrix,
    tols: &Tolerances,
) -> Result<Option<Complex64>, LinalgError> {
    let gg = g.frobenius_inner(g)?; // also checks shapes agree
    let f_norm = f.frobenius_norm();
    let g_norm = g.frobenius_norm();
    if f_norm == 0.0 && g_norm == 0.0 {
        return Ok(Some(Complex64::new(1.0, 0.0)));
    }
    if g_norm == 0.0 {
        // f ≠ 0 cannot be a nonzero multiple of the zero matrix.
        return Ok(None);
    }
    let alpha = g.frobenius_inner(f)? / gg;
    if alpha == Complex64::new(0.0, 0.0) {
        return Ok(None);
    }
    let residual = f.sub(&g.scale(alpha))?.frobenius_norm();
    if residual <= tols.proportionality * f_norm.max(g_norm) {
        Ok(Some(alpha))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eig_of_symmetric_flip() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let eig = eig_hermitian(&a, &tols()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(eig.reconstruction_error(&a) < 1e-13);
        assert!(eig.unitarity_error() < 1e-13);
    }

    #[test]
    fn eig_of_zero_matrix() {
        let a = CMatrix::zeros(3, 3);
        let eig = eig_hermitian(&a, &tols()).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.0, 0.0, 0.0]);
        assert_eq!(eig.vectors, CMatrix::identity(3));
    }

    #[test]
    fn eig_of_complex_hermitian() {
        // [[2, i], [−i, 2]] has eigenvalues 1 and 3.
        let a = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => c(2.0, 0.0),
            (0, 1) => c(0.0, 1.0),
            _ => c(0.0, -1.0),
        });
        let eig = eig_hermitian(&a, &tols()).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-13);
        assert!((eig.eigenvalues[1] - 3.0).abs() < 1e-13);
        assert!(eig.reconstruction_error(&a) < 1e-13);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        match eig_hermitian(&a, &tols()) {
            Err(LinalgError::NotHermitian { .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let a = CMatrix::from_fn(3, 3, |i, j| {
            c((i * 3 + j) as f64 / 7.0, 0.0) + c((j * 3 + i) as f64 / 7.0, 0.0)
        });
        let e1 = eig_hermitian(&a, &tols()).unwrap();
        let e2 = eig_hermitian(&a, &tols()).unwrap();
        assert_eq!(e1.eigenvalues, e2.eigenvalues);
        assert_eq!(e1.vectors, e2.vectors);
    }

    #[test]
    fn diagonal_input_keeps_exact_entries() {
        let a = CMatrix::from_real_diag(&[1.0, 0.25]);
        let eig = eig_hermitian(&a, &tols()).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.25, 1.0]);
        // Rebuild is exact: the eigenvector matrix is a permutation.
        assert_eq!(eig.rebuild(|l| c(l, 0.0)), a);
    }

    #[test]
    fn apply_function_sign_like() {
        let g = |l: f64| if (l - 4.0 / 9.0).abs() <= 1e-6 { c(-1.0, 0.0) } else { c(1.0, 0.0) };
        let p = CMatrix::from_real_diag(&[1.0, 2.0 / 3.0]);
        assert_eq!(apply_function(&p, &tols(), g).unwrap(), CMatrix::identity(2));
        let p2 = CMatrix::from_real_diag(&[1.0, 4.0 / 9.0]);
        assert_eq!(apply_function(&p2, &tols(), g).unwrap(), CMatrix::from_real_diag(&[1.0, -1.0]));
    }

    #[test]
    fn sqrt_of_rank_one() {
        let a = CMatrix::from_real_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]);
        let s = sqrt_psd(&a, &tols()).unwrap();
        let expected = 2.0f64.sqrt() / 4.0;
        for i in 0..2 {
            for j in 0..2 {
                assert!((s[(i, j)].re - expected).abs() < 1e-12);
                assert!(s[(i, j)].im.abs() < 1e-12);
            }
        }
        let back = s.mul(&s).unwrap();
        assert!(back.sub(&a).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn sqrt_clamps_round_off_negatives() {
        let a = CMatrix::from_real_diag(&[1.0, -1e-12]);
        let s = sqrt_psd(&a, &tols()).unwrap();
        assert_eq!(s[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn sqrt_rejects_genuinely_indefinite() {
        let a = CMatrix::from_real_diag(&[1.0, -0.5]);
        match sqrt_psd(&a, &tols()) {
            Err(LinalgError::NotPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.5).abs() < 1e-12);
            }
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn pinv_cuts_below_rank_threshold() {
        let a = CMatrix::from_real_diag(&[1.0, 1e-15]);
        let p = pinv_psd(&a, &tols()).unwrap();
        assert_eq!(p, CMatrix::from_real_diag(&[1.0, 0.0]));
    }

    #[test]
    fn pinv_times_matrix_is_support() {
        let a = CMatrix::from_real_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]);
        let product = a.mul(&pinv_psd(&a, &tols()).unwrap()).unwrap();
        let support = support_projection(&a, &tols()).unwrap();
        assert!(product.sub(&support).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn op_norm_of_nilpotent() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]);
        assert!((op_norm(&a, &tols()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn op_norm_of_rectangular_isometry_column() {
        let v = CMatrix::from_fn(2, 1, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!((op_norm(&v, &tols()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn positivity_tests_agree_on_indefinite_input() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(!is_positive(&a, 1e-8, &tols()).unwrap());
        assert!(!is_positive_via_norm(&a, 1e-8, &tols()).unwrap());
        let b = CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(is_positive(&b, 1e-8, &tols()).unwrap());
        assert!(is_positive_via_norm(&b, 1e-8, &tols()).unwrap());
    }

    #[test]
    fn proportionality_recovers_coefficient() {
        let g = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let f = g.scale(c(2.0, 0.0));
        let alpha = proportionality_coefficient(&f, &g, &tols()).unwrap().unwrap();
        assert!((alpha - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn proportionality_rejects_independent_pair() {
        let g = CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let f = CMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(proportionality_coefficient(&f, &g, &tols()).unwrap(), None);
    }

    #[test]
    fn proportionality_zero_zero_convention() {
        let z = CMatrix::zeros(2, 2);
        let alpha = proportionality_coefficient(&z, &z, &tols()).unwrap().unwrap();
        assert_eq!(alpha, c(1.0, 0.0));
    }

    #[test]
    fn from_data_rejects_non_finite() {
        let err = CMatrix::from_data(1, 1, vec![c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, LinalgError::NonFinite);
    }
}
