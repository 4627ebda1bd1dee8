//! Algebras, effects and the sequential product.
//!
//! An [`Algebra`] is a finite direct sum of full complex matrix blocks; an
//! [`Effect`] is a blockwise self-adjoint element with spectrum in `[0, 1]`.
//! The central operation is the sequential product `p ∗ q = √p·q·√p`,
//! together with the spectral ceiling `⌈p⌉` (support projection), the floor
//! `⌊p⌋ = 1 − ⌈1 − p⌉`, and the order/connectedness diagnostics used by the
//! axiom checkers.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{
    apply_function, eig_hermitian, is_positive, op_norm, sqrt_psd, support_projection,
    CMatrix, LinalgError,
};
use crate::tol::Tolerances;

/// Errors from effect and algebra construction and the effect-level
/// operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EffectError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("an algebra needs at least one block (use Algebra::empty for the degenerate corner)")]
    EmptyAlgebra,
    #[error("block {block} has dimension zero")]
    ZeroBlockDim { block: usize },
    #[error("expected {expected} blocks, got {got}")]
    BlockCountMismatch { expected: usize, got: usize },
    #[error("block {block} should be {expected}x{expected}, got {rows}x{cols}")]
    BlockDimMismatch { block: usize, expected: usize, rows: usize, cols: usize },
    #[error("block {block} is not self-adjoint (deviation {deviation:.3e})")]
    NotSelfAdjoint { block: usize, deviation: f64 },
    #[error("block {block} has eigenvalue {eigenvalue:.6} outside [0, 1]")]
    NotEffect { block: usize, eigenvalue: f64 },
    #[error("not a projection: ‖p² − p‖ = {deviation:.3e}")]
    NotProjection { deviation: f64 },
    #[error("operands live on different algebras: {left:?} vs {right:?}")]
    AlgebraMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("element norm {norm:.6} exceeds one")]
    NormTooLarge { norm: f64 },
}

/// A finite-dimensional von Neumann algebra `M_{n_1} ⊕ … ⊕ M_{n_k}`,
/// identified by its list of block dimensions.
///
/// The ordinary constructor requires at least one block; the degenerate
/// zero algebra (the corner of the zero effect) is available separately via
/// [`Algebra::empty`] and has no blocks at all.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    block_dims: Vec<usize>,
}

impl Algebra {
    /// Algebra with the given block dimensions (all nonzero, at least one).
    pub fn new(block_dims: Vec<usize>) -> Result<Algebra, EffectError> {
        if block_dims.is_empty() {
            return Err(EffectError::EmptyAlgebra);
        }
        if let Some(block) = block_dims.iter().position(|&d| d == 0) {
            return Err(EffectError::ZeroBlockDim { block });
        }
        Ok(Algebra { block_dims })
    }

    /// Single full matrix block `M_n`.
    pub fn full(n: usize) -> Result<Algebra, EffectError> {
        Algebra::new(vec![n])
    }

    /// The zero algebra `{0}`: no blocks, one element (the empty block
    /// list). It is the corner of the zero effect.
    pub fn empty() -> Algebra {
        Algebra { block_dims: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.block_dims.is_empty()
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Combined dimension `Σ nᵢ²` of the underlying vector space, which is
    /// also the dimension elements occupy under vectorization.
    pub fn vec_dim(&self) -> usize {
        self.block_dims.iter().map(|&d| d * d).sum()
    }

    /// The unit `1` as a block list.
    pub fn one_blocks(&self) -> Vec<CMatrix> {
        self.block_dims.iter().map(|&d| CMatrix::identity(d)).collect()
    }

    /// The zero element as a block list.
    pub fn zero_blocks(&self) -> Vec<CMatrix> {
        self.block_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect()
    }

    /// Validate that `blocks` is an element of this algebra (square blocks
    /// of the right dimensions, one per block).
    pub fn check_element(&self, blocks: &[CMatrix]) -> Result<(), EffectError> {
        if blocks.len() != self.num_blocks() {
            return Err(EffectError::BlockCountMismatch {
                expected: self.num_blocks(),
                got: blocks.len(),
            });
        }
        for (i, (m, &d)) in blocks.iter().zip(&self.block_dims).enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(EffectError::BlockDimMismatch {
                    block: i,
                    expected: d,
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
        }
        Ok(())
    }

    fn check_same(&self, other: &Algebra) -> Result<(), EffectError> {
        if self != other {
            return Err(EffectError::AlgebraMismatch {
                left: self.block_dims.clone(),
                right: other.block_dims.clone(),
            });
        }
        Ok(())
    }
}

/// Largest block operator norm of an element given as a block list.
pub fn blocks_op_norm(blocks: &[CMatrix], tols: &Tolerances) -> f64 {
    blocks.iter().map(|m| op_norm(m, tols)).fold(0.0, f64::max)
}

/// Blockwise difference of two elements.
pub fn blocks_sub(a: &[CMatrix], b: &[CMatrix]) -> Result<Vec<CMatrix>, LinalgError> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

/// Operator-norm distance `max_i ‖a_i − b_i‖` between two elements.
pub fn blocks_distance(a: &[CMatrix], b: &[CMatrix], tols: &Tolerances) -> Result<f64, LinalgError> {
    Ok(blocks_op_norm(&blocks_sub(a, b)?, tols))
}

/// An effect `0 ≤ p ≤ 1` of an algebra.
///
/// Construction validates blockwise self-adjointness and spectrum: spectra
/// within `effect_clamp` of `[0, 1]` are clamped onto the interval (the
/// matrix is rebuilt from the clamped spectrum only when clamping actually
/// changed something, so exact inputs pass through bit-identically), and
/// anything further out is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    algebra: Algebra,
    blocks: Vec<CMatrix>,
}

impl Effect {
    /// Validate and clamp `blocks` into an effect of `algebra`.
    pub fn new(algebra: Algebra, blocks: Vec<CMatrix>, tols: &Tolerances) -> Result<Effect, EffectError> {
        algebra.check_element(&blocks)?;
        let mut clean = Vec::with_capacity(blocks.len());
        for (i, m) in blocks.iter().enumerate() {
            let dev = m.hermitian_deviation()?;
            if dev > tols.hermitian_rel * m.frobenius_norm().max(1.0) {
                return Err(EffectError::NotSelfAdjoint { block: i, deviation: dev });
            }
            let h = m.hermitian_part()?;
            let eig = eig_hermitian(&h, tols)?;
            let in_range = eig.eigenvalues.iter().all(|&l| (0.0..=1.0).contains(&l));
            if in_range {
                clean.push(h);
                continue;
            }
            if let Some(&bad) = eig
                .eigenvalues
                .iter()
                .find(|&&l| l < -tols.effect_clamp || l > 1.0 + tols.effect_clamp)
            {
                return Err(EffectError::NotEffect { block: i, eigenvalue: bad });
            }
            clean.push(eig.rebuild(|l| Complex64::new(l.clamp(0.0, 1.0), 0.0)));
        }
        Ok(Effect { algebra, blocks: clean })
    }

    /// Effect on a single full matrix block.
    pub fn single_block(m: CMatrix, tols: &Tolerances) -> Result<Effect, EffectError> {
        let n = m.dim()?;
        Effect::new(Algebra::full(n)?, vec![m], tols)
    }

    /// The unit effect `1`.
    pub fn one(algebra: Algebra) -> Effect {
        let blocks = algebra.one_blocks();
        Effect { algebra, blocks }
    }

    /// The zero effect.
    pub fn zero(algebra: Algebra) -> Effect {
        let blocks = algebra.zero_blocks();
        Effect { algebra, blocks }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    /// Complement `1 − p`.
    pub fn complement(&self) -> Effect {
        let blocks = self
            .blocks
            .iter()
            .map(|m| {
                let n = m.rows();
                CMatrix::identity(n).sub(m).expect("same shape")
            })
            .collect();
        Effect { algebra: self.algebra.clone(), blocks }
    }

    /// Matrix square `p²` (again an effect, since the spectrum squares).
    pub fn square(&self) -> Effect {
        let blocks = self.blocks.iter().map(|m| m.mul(m).expect("square block")).collect();
        Effect { algebra: self.algebra.clone(), blocks }
    }

    /// Blockwise functional calculus on the spectrum, returning raw block
    /// matrices (callers decide whether the result is still an effect).
    pub fn apply_function_blocks(
        &self,
        tols: &Tolerances,
        g: impl Fn(f64) -> Complex64,
    ) -> Result<Vec<CMatrix>, LinalgError> {
        self.blocks.iter().map(|m| apply_function(m, tols, &g)).collect()
    }

    /// Blockwise positive square root `√p`.
    pub fn sqrt_blocks(&self, tols: &Tolerances) -> Result<Vec<CMatrix>, LinalgError> {
        self.blocks.iter().map(|m| sqrt_psd(m, tols)).collect()
    }

    /// Operator norm `max_i ‖p_i‖`.
    pub fn op_norm(&self, tols: &Tolerances) -> f64 {
        blocks_op_norm(&self.blocks, tols)
    }

    /// Operator-norm distance to another effect on the same algebra.
    pub fn distance(&self, other: &Effect, tols: &Tolerances) -> Result<f64, EffectError> {
        self.algebra.check_same(&other.algebra)?;
        Ok(blocks_distance(&self.blocks, &other.blocks, tols)?)
    }

    /// Order test `self ≤ other` with slack `tol`, blockwise.
    pub fn is_le(&self, other: &Effect, tol: f64, tols: &Tolerances) -> Result<bool, EffectError> {
        self.algebra.check_same(&other.algebra)?;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            if !is_positive(&b.sub(a)?, tol, tols)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A projection effect: `p² = p` within the projection gate.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    effect: Effect,
}

impl Projection {
    /// Validate `‖p² − p‖ ≤ projection` blockwise.
    pub fn new(effect: Effect, tols: &Tolerances) -> Result<Projection, EffectError> {
        let squared = effect.square();
        let dev = blocks_distance(squared.blocks(), effect.blocks(), tols)?;
        if dev > tols.projection {
            return Err(EffectError::NotProjection { deviation: dev });
        }
        Ok(Projection { effect })
    }

    pub fn as_effect(&self) -> &Effect {
        &self.effect
    }

    pub fn into_effect(self) -> Effect {
        self.effect
    }

    pub fn algebra(&self) -> &Algebra {
        self.effect.algebra()
    }

    pub fn blocks(&self) -> &[CMatrix] {
        self.effect.blocks()
    }

    /// Complement projection `1 − e`.
    pub fn complement(&self) -> Projection {
        Projection { effect: self.effect.complement() }
    }

    /// Rank per block (trace of the block, rounded).
    pub fn block_ranks(&self) -> Vec<usize> {
        self.effect
            .blocks()
            .iter()
            .map(|m| m.trace().re.round().max(0.0) as usize)
            .collect()
    }
}

/// Sequential product `p ∗ q = √p·q·√p`, blockwise on a shared algebra.
pub fn seq_product(p: &Effect, q: &Effect, tols: &Tolerances) -> Result<Effect, EffectError> {
    p.algebra().check_same(q.algebra())?;
    let mut blocks = Vec::with_capacity(p.blocks().len());
    for (pb, qb) in p.blocks().iter().zip(q.blocks()) {
        let s = sqrt_psd(pb, tols)?;
        blocks.push(s.mul(qb)?.mul(&s)?);
    }
    Effect::new(p.algebra().clone(), blocks, tols)
}

/// Spectral ceiling `⌈p⌉`: the smallest projection above `p`, i.e. the
/// support projection of each block at the shared rank cut.
pub fn ceil(p: &Effect, tols: &Tolerances) -> Result<Projection, EffectError> {
    let blocks = p
        .blocks()
        .iter()
        .map(|m| support_projection(m, tols))
        .collect::<Result<Vec<_>, _>>()?;
    let effect = Effect::new(p.algebra().clone(), blocks, tols)?;
    Projection::new(effect, tols)
}

/// Iterated-root approximation of the ceiling: `p^(1/2^n_max)` by functional
/// calculus, which increases monotonically to `⌈p⌉` as `n_max` grows.
/// Eigenvalues at or below the rank cut count as kernel, the convention
/// shared with [`ceil`]; the iterated root would otherwise promote a
/// recomputed kernel's round-off toward one.
pub fn ceil_by_limit(p: &Effect, n_max: u32, tols: &Tolerances) -> Result<Effect, EffectError> {
    let exponent = 1.0 / f64::powi(2.0, n_max as i32);
    let cut = tols.rank_cut(1.0);
    let blocks = p.apply_function_blocks(tols, |l| {
        if l > cut { Complex64::new(l.powf(exponent), 0.0) } else { Complex64::new(0.0, 0.0) }
    })?;
    Effect::new(p.algebra().clone(), blocks, tols)
}

/// Spectral floor `⌊p⌋ = 1 − ⌈1 − p⌉`: the largest projection below `p`.
pub fn floor(p: &Effect, tols: &Tolerances) -> Result<Projection, EffectError> {
    Ok(ceil(&p.complement(), tols)?.complement())
}

/// The four equivalent conditions connecting a contraction `a` to a pair of
/// projections. A correct implementation makes them agree on every input;
/// they are surfaced separately so the agreement itself can be tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectedFlags {
    /// `a*·e₁·a ≤ 1 − e₂`
    pub one_le: bool,
    /// `a·e₂·a* ≤ 1 − e₁`
    pub two_le: bool,
    /// `e₁·a·e₂ = 0`
    pub corner_12_zero: bool,
    /// `e₂·a*·e₁ = 0`
    pub corner_21_zero: bool,
}

impl ConnectedFlags {
    pub fn as_array(&self) -> [bool; 4] {
        [self.one_le, self.two_le, self.corner_12_zero, self.corner_21_zero]
    }

    /// All four flags equal (the content of the equivalence).
    pub fn agree(&self) -> bool {
        let [a, b, c, d] = self.as_array();
        a == b && b == c && c == d
    }

    pub fn all_hold(&self) -> bool {
        self.as_array().iter().all(|&f| f)
    }

    fn and(self, other: ConnectedFlags) -> ConnectedFlags {
        ConnectedFlags {
            one_le: self.one_le && other.one_le,
            two_le: self.two_le && other.two_le,
            corner_12_zero: self.corner_12_zero && other.corner_12_zero,
            corner_21_zero: self.corner_21_zero && other.corner_21_zero,
        }
    }
}

/// Single-block connectedness flags for a contraction `a` and projections
/// `e₁`, `e₂` on the same matrix block.
pub fn connected_flags_matrix(
    a: &CMatrix,
    e1: &CMatrix,
    e2: &CMatrix,
    tols: &Tolerances,
) -> Result<ConnectedFlags, LinalgError> {
    let n = a.dim()?;
    let one = CMatrix::identity(n);
    let a_star = a.adjoint();

    let lhs1 = one.sub(e2)?.sub(&a_star.mul(e1)?.mul(a)?)?.hermitian_part()?;
    let lhs2 = one.sub(e1)?.sub(&a.mul(e2)?.mul(&a_star)?)?.hermitian_part()?;
    Ok(ConnectedFlags {
        one_le: is_positive(&lhs1, tols.positivity, tols)?,
        two_le: is_positive(&lhs2, tols.positivity, tols)?,
        corner_12_zero: op_norm(&e1.mul(a)?.mul(e2)?, tols) <= tols.positivity,
        corner_21_zero: op_norm(&e2.mul(&a_star)?.mul(e1)?, tols) <= tols.positivity,
    })
}

/// Blockwise connectedness check for an element `a` (given as a block list,
/// `‖a‖ ≤ 1`) against two projections of the same algebra. Each flag is the
/// conjunction over blocks, which preserves the four-way equivalence.
pub fn check_connected(
    a: &[CMatrix],
    e1: &Projection,
    e2: &Projection,
    tols: &Tolerances,
) -> Result<ConnectedFlags, EffectError> {
    e1.algebra().check_same(e2.algebra())?;
    e1.algebra().check_element(a)?;
    let norm = blocks_op_norm(a, tols);
    if norm > 1.0 + tols.contraction {
        return Err(EffectError::NormTooLarge { norm });
    }
    let mut flags = ConnectedFlags { one_le: true, two_le: true, corner_12_zero: true, corner_21_zero: true };
    for ((ab, e1b), e2b) in a.iter().zip(e1.blocks()).zip(e2.blocks()) {
        flags = flags.and(connected_flags_matrix(ab, e1b, e2b, tols)?);
    }
    Ok(flags)
}

/// Bundled diagnostic for the order-theoretic characterization of
/// projections.
///
/// If `p` is a projection, samples elements `0 ≤ a ≤ p` and verifies
/// `a·p = p·a = a`. Otherwise `p` fails to be a projection, and the spectral
/// witness `w = min(p, 1 − p)` must be a nonzero positive element below both
/// `p` and `1 − p`; the diagnostic verifies exactly that. In both branches a
/// correct implementation returns `true`.
pub fn projection_order_tests(
    p: &Effect,
    rng: &mut impl Rng,
    samples: usize,
    tols: &Tolerances,
) -> Result<bool, EffectError> {
    let squared = p.square();
    let proj_dev = blocks_distance(squared.blocks(), p.blocks(), tols)?;
    if proj_dev <= tols.projection {
        for _ in 0..samples {
            for pb in p.blocks() {
                let n = pb.rows();
                let m = CMatrix::from_fn(n, n, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                let g = m.adjoint().mul(&m)?;
                let scale = op_norm(&g, tols) + 1.0;
                let a = pb.mul(&g)?.mul(pb)?.scale_re(1.0 / scale);
                let ap = a.mul(pb)?;
                let pa = pb.mul(&a)?;
                if op_norm(&ap.sub(&a)?, tols) > tols.positivity
                    || op_norm(&pa.sub(&a)?, tols) > tols.positivity
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    } else {
        // Not a projection: the pointwise minimum with the complement is a
        // nonzero positive element under both p and 1 − p.
        let witness_blocks = p.apply_function_blocks(tols, |l| {
            Complex64::new(l.clamp(0.0, 1.0).min(1.0 - l.clamp(0.0, 1.0)), 0.0)
        })?;
        let witness = Effect::new(p.algebra().clone(), witness_blocks, tols)?;
        let nonzero = witness.op_norm(tols) > tols.projection;
        let below_p = witness.is_le(p, tols.positivity, tols)?;
        let below_complement = witness.is_le(&p.complement(), tols.positivity, tols)?;
        Ok(nonzero && below_p && below_complement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn m2(rows: &[Vec<f64>]) -> CMatrix {
        CMatrix::from_real_rows(rows)
    }

    fn effect2(rows: &[Vec<f64>]) -> Effect {
        Effect::single_block(m2(rows), &tols()).unwrap()
    }

    #[test]
    fn algebra_rejects_empty_and_zero_blocks() {
        assert_eq!(Algebra::new(vec![]), Err(EffectError::EmptyAlgebra));
        assert_eq!(Algebra::new(vec![2, 0]), Err(EffectError::ZeroBlockDim { block: 1 }));
        assert!(Algebra::empty().is_empty());
        assert_eq!(Algebra::empty().vec_dim(), 0);
    }

    #[test]
    fn effect_construction_keeps_exact_blocks() {
        let p = effect2(&[vec![1.0, 0.0], vec![0.0, 0.25]]);
        assert_eq!(p.block(0), &m2(&[vec![1.0, 0.0], vec![0.0, 0.25]]));
    }

    #[test]
    fn effect_construction_clamps_round_off() {
        let p = effect2(&[vec![1.0 + 1e-12, 0.0], vec![0.0, -1e-12]]);
        let eig = eig_hermitian(p.block(0), &tols()).unwrap();
        assert!(eig.eigenvalues.iter().all(|&l| (0.0..=1.0).contains(&l)));
    }

    #[test]
    fn effect_construction_rejects_out_of_range() {
        let r = Effect::single_block(m2(&[vec![1.5, 0.0], vec![0.0, 0.0]]), &tols());
        match r {
            Err(EffectError::NotEffect { block: 0, eigenvalue }) => {
                assert!((eigenvalue - 1.5).abs() < 1e-12)
            }
            other => panic!("expected NotEffect, got {other:?}"),
        }
    }

    #[test]
    fn seq_product_matches_hand_computation() {
        let p = effect2(&[vec![1.0, 0.0], vec![0.0, 0.25]]);
        let q = effect2(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let r = seq_product(&p, &q, &tols()).unwrap();
        let expected = m2(&[vec![0.5, 0.25], vec![0.25, 0.125]]);
        assert!(r.block(0).sub(&expected).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn seq_product_units() {
        let q = effect2(&[vec![0.3, 0.1], vec![0.1, 0.8]]);
        let one = Effect::one(q.algebra().clone());
        let left = seq_product(&one, &q, &tols()).unwrap();
        assert!(left.distance(&q, &tols()).unwrap() < 1e-12);
        let right = seq_product(&q, &one, &tols()).unwrap();
        assert!(right.distance(&q, &tols()).unwrap() < 1e-12);
    }

    #[test]
    fn seq_product_with_projection_is_corner() {
        let e = effect2(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let q = effect2(&[vec![0.5, 0.2], vec![0.2, 0.7]]);
        let r = seq_product(&e, &q, &tols()).unwrap();
        let expected = m2(&[vec![0.5, 0.0], vec![0.0, 0.0]]);
        assert!(r.block(0).sub(&expected).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn seq_product_rejects_mismatched_algebras() {
        let p = effect2(&[vec![0.5, 0.0], vec![0.0, 0.5]]);
        let q = Effect::one(Algebra::full(3).unwrap());
        match seq_product(&p, &q, &tols()) {
            Err(EffectError::AlgebraMismatch { .. }) => {}
            other => panic!("expected AlgebraMismatch, got {other:?}"),
        }
    }

    #[test]
    fn ceil_of_rank_one() {
        let p = effect2(&[vec![0.25, 0.25], vec![0.25, 0.25]]);
        let e = ceil(&p, &tols()).unwrap();
        let expected = m2(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(e.blocks()[0].sub(&expected).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn ceil_is_idempotent_and_absorbs_sqrt() {
        let p = effect2(&[vec![0.7, 0.2], vec![0.2, 0.3]]);
        let e = ceil(&p, &tols()).unwrap();
        let ee = ceil(e.as_effect(), &tols()).unwrap();
        assert!(ee.as_effect().distance(e.as_effect(), &tols()).unwrap() < 1e-10);
        let s = &p.sqrt_blocks(&tols()).unwrap()[0];
        let es = e.blocks()[0].mul(s).unwrap();
        assert!(es.sub(s).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn ceil_by_limit_matches_iterated_root() {
        let p = effect2(&[vec![0.25, 0.0], vec![0.0, 0.0]]);
        let r = ceil_by_limit(&p, 4, &tols()).unwrap();
        let expected = 0.25f64.powf(1.0 / 16.0);
        assert!((r.block(0)[(0, 0)].re - expected).abs() < 1e-12);
        assert!((expected - 0.9170).abs() < 1e-4);
        assert_eq!(r.block(0)[(1, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn floor_drops_non_unit_eigenvalues() {
        let p = effect2(&[vec![1.0, 0.0], vec![0.0, 0.5]]);
        let e = floor(&p, &tols()).unwrap();
        let expected = m2(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(e.blocks()[0].sub(&expected).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn floor_below_effect_below_ceil() {
        let p = effect2(&[vec![0.9, 0.1], vec![0.1, 0.4]]);
        let lo = floor(&p, &tols()).unwrap();
        let hi = ceil(&p, &tols()).unwrap();
        assert!(lo.as_effect().is_le(&p, 1e-8, &tols()).unwrap());
        assert!(p.is_le(hi.as_effect(), 1e-8, &tols()).unwrap());
    }

    #[test]
    fn connected_flags_examples() {
        let t = tols();
        let id = CMatrix::identity(2);
        let e1 = m2(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let e2 = m2(&[vec![0.0, 0.0], vec![0.0, 1.0]]);
        let f = connected_flags_matrix(&id, &e1, &e2, &t).unwrap();
        assert!(f.agree() && f.all_hold());

        let f = connected_flags_matrix(&id, &e1, &e1, &t).unwrap();
        assert!(f.agree() && !f.all_hold());

        let flip = m2(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let f = connected_flags_matrix(&flip, &e1, &e1, &t).unwrap();
        assert!(f.agree() && f.all_hold());
    }

    #[test]
    fn check_connected_validates_norm() {
        let t = tols();
        let e = Projection::new(effect2(&[vec![1.0, 0.0], vec![0.0, 0.0]]), &t).unwrap();
        let big = m2(&[vec![2.0, 0.0], vec![0.0, 0.0]]);
        match check_connected(&[big], &e, &e, &t) {
            Err(EffectError::NormTooLarge { .. }) => {}
            other => panic!("expected NormTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn projection_order_diagnostic_on_projection() {
        let t = tols();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let p = effect2(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(projection_order_tests(&p, &mut rng, 20, &t).unwrap());
        let one = Effect::one(Algebra::full(2).unwrap());
        assert!(projection_order_tests(&one, &mut rng, 20, &t).unwrap());
    }

    #[test]
    fn projection_order_diagnostic_on_non_projection() {
        let t = tols();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let p = effect2(&[vec![0.5, 0.0], vec![0.0, 0.25]]);
        assert!(projection_order_tests(&p, &mut rng, 5, &t).unwrap());
    }

    #[test]
    fn orthogonal_projections_multiply_to_zero() {
        let p = m2(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let q = m2(&[vec![0.0, 0.0], vec![0.0, 1.0]]);
        // p + q ≤ 1 forces pq = qp = 0.
        assert_eq!(p.mul(&q).unwrap(), CMatrix::zeros(2, 2));
        assert_eq!(q.mul(&p).unwrap(), CMatrix::zeros(2, 2));
    }

    #[test]
    fn multi_block_effects_work_blockwise() {
        let t = tols();
        let alg = Algebra::new(vec![2, 2]).unwrap();
        let p = Effect::new(
            alg.clone(),
            vec![m2(&[vec![1.0, 0.0], vec![0.0, 0.25]]), CMatrix::identity(2).scale_re(0.5)],
            &t,
        )
        .unwrap();
        let q = Effect::one(alg);
        let r = seq_product(&p, &q, &t).unwrap();
        assert!(r.distance(&p, &t).unwrap() < 1e-12);
    }
}
