//! Compressions, corners, and their factorization properties.
//!
//! For an effect `p` of `𝒜`, the *compression* is the process
//! `c: ⌈p⌉𝒜⌈p⌉ → 𝒜`, `b ↦ √p·b·√p`, and the *corner* is the process
//! `π: 𝒜 → ⌊p⌋𝒜⌊p⌋`, `a ↦ V*aV`. Each is characterized by a one-sided
//! universal property: every process `f` with `f(1) ≤ p` factors uniquely
//! through `c`, and every process `g` with `g(p) = g(1)` factors uniquely
//! through `π`. This module materializes corner algebras as standalone
//! algebras (via explicit isometries, so mediating maps are honest
//! processes), constructs both factorizations in closed form, rebuilds the
//! compression mediator through the truncated-inverse approximants `q_n`,
//! and decides mediator uniqueness by a rank argument on vectorized maps.

use num_complex::Complex64;
use thiserror::Error;

use crate::effects::{self, Algebra, Effect, EffectError, Projection};
use crate::linalg::{eig_hermitian, op_norm, CMatrix, LinalgError};
use crate::process::{BlockLinearMap, Process, ProcessError};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum UniversalError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Effect(#[from] EffectError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("isometry defect {deviation:.3e} exceeds tolerance")]
    IsometryDefect { deviation: f64 },
    #[error("precondition `{condition}` violated (residual {residual:.3e})")]
    PreconditionViolated { condition: &'static str, residual: f64 },
    #[error("the factorization system has no solution (residual {residual:.3e})")]
    NoSolution { residual: f64 },
    #[error("approximants did not stabilize within n_max = {n_max} steps")]
    StabilizationNotReached { n_max: usize },
    #[error("maps are not composable: {left:?} feeds {right:?}")]
    NotComposable { left: Vec<usize>, right: Vec<usize> },
}

type Result<T, E = UniversalError> = std::result::Result<T, E>;

/// A projection's range, materialized: per parent block an isometry whose
/// columns span `range(e)`, and the corner algebra whose block dimensions
/// are the block ranks (zero-rank blocks dropped).
#[derive(Debug, Clone)]
pub struct CornerEmbedding {
    parent: Algebra,
    projection: Projection,
    /// One `n_i × r_i` isometry per parent block (zero columns when the
    /// block rank is zero).
    isometries: Vec<CMatrix>,
    corner: Algebra,
    /// Parent block index → corner block index, `None` where the rank is 0.
    block_map: Vec<Option<usize>>,
}

impl CornerEmbedding {
    /// Build the embedding for a projection: columns are the eigenvectors
    /// of each block with eigenvalue above 1/2, in eigensolver order.
    ///
    /// Validates `V*V = I` and `VV* = e` to reconstruction accuracy. Any
    /// other orthonormal basis of `range(e)` yields an isomorphic corner;
    /// see [`CornerEmbedding::twist`].
    pub fn new(e: &Projection, tols: &Tolerances) -> Result<Self> {
        let parent = e.algebra().clone();
        let mut isometries = Vec::new();
        let mut block_map = Vec::new();
        let mut corner_dims = Vec::new();
        for block in e.blocks() {
            let n = block.rows();
            let eig = eig_hermitian(block, tols)?;
            let kept: Vec<usize> =
                (0..n).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
            let v = CMatrix::from_fn(n, kept.len(), |r, c| eig.vectors[(r, kept[c])]);

            let gram_defect =
                v.adjoint().mul(&v)?.sub(&CMatrix::identity(kept.len()))?.frobenius_norm();
            let range_defect = v.mul(&v.adjoint())?.sub(block)?.frobenius_norm();
            let defect = gram_defect.max(range_defect);
            if defect > tols.eig_recon_rel * (n as f64).max(1.0) {
                return Err(UniversalError::IsometryDefect { deviation: defect });
            }
            if !kept.is_empty() {
                block_map.push(Some(corner_dims.len()));
                corner_dims.push(kept.len());
            } else {
                block_map.push(None);
            }
            isometries.push(v);
        }
        let corner = if corner_dims.is_empty() {
            Algebra::empty()
        } else {
            Algebra::new(corner_dims)?
        };
        Ok(CornerEmbedding { parent, projection: e.clone(), isometries, corner, block_map })
    }

    pub fn parent(&self) -> &Algebra {
        &self.parent
    }

    pub fn corner(&self) -> &Algebra {
        &self.corner
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn isometry(&self, parent_block: usize) -> &CMatrix {
        &self.isometries[parent_block]
    }

    pub fn block_map(&self) -> &[Option<usize>] {
        &self.block_map
    }

    /// Replace the basis of each corner block by `V ↦ V·W` for unitaries
    /// `W` (one per corner block). The result embeds the same projection
    /// with a different, equally valid basis.
    pub fn twist(&self, unitaries: &[CMatrix], tols: &Tolerances) -> Result<CornerEmbedding> {
        self.corner.check_element(unitaries)?;
        let mut isometries = Vec::with_capacity(self.isometries.len());
        for (i, v) in self.isometries.iter().enumerate() {
            match self.block_map[i] {
                Some(j) => isometries.push(v.mul(&unitaries[j])?),
                None => isometries.push(v.clone()),
            }
        }
        let out = CornerEmbedding {
            parent: self.parent.clone(),
            projection: self.projection.clone(),
            isometries,
            corner: self.corner.clone(),
            block_map: self.block_map.clone(),
        };
        // The twist preserves both isometry identities only for unitary W;
        // re-validate rather than trust the caller.
        for v in &out.isometries {
            let r = v.cols();
            let defect = v.adjoint().mul(v)?.sub(&CMatrix::identity(r))?.frobenius_norm();
            if defect > tols.eig_recon_rel * (v.rows() as f64).max(1.0) {
                return Err(UniversalError::IsometryDefect { deviation: defect });
            }
        }
        Ok(out)
    }

    /// Compress a parent element to the corner: `b_j = V_i* a_i V_i`.
    pub fn compress_blocks(&self, a: &[CMatrix]) -> Result<Vec<CMatrix>> {
        self.parent.check_element(a)?;
        let mut out = Vec::new();
        for (i, v) in self.isometries.iter().enumerate() {
            if self.block_map[i].is_some() {
                out.push(v.adjoint().mul(&a[i])?.mul(v)?);
            }
        }
        Ok(out)
    }

    /// Embed a corner element into the parent: `a_i = V_i b_j V_i*`
    /// (zero on rank-zero blocks).
    pub fn embed_blocks(&self, b: &[CMatrix]) -> Result<Vec<CMatrix>> {
        self.corner.check_element(b)?;
        let mut out = Vec::new();
        for (i, v) in self.isometries.iter().enumerate() {
            match self.block_map[i] {
                Some(j) => out.push(v.mul(&b[j])?.mul(&v.adjoint())?),
                None => {
                    let n = self.parent.block_dims()[i];
                    out.push(CMatrix::zeros(n, n));
                }
            }
        }
        Ok(out)
    }

    /// The restriction process `π: parent → corner`, `a ↦ V*aV`. Unital.
    pub fn restriction(&self, tols: &Tolerances) -> Result<Process> {
        let mut routes = Vec::new();
        for (i, v) in self.isometries.iter().enumerate() {
            if let Some(j) = self.block_map[i] {
                routes.push(((i, j), vec![v.clone()]));
            }
        }
        Ok(Process::from_kraus(self.parent.clone(), self.corner.clone(), routes, tols)?)
    }

    /// The inclusion process `j: corner → parent`, `b ↦ VbV*`. A unital map
    /// only when the projection is the unit; always a *-homomorphism onto
    /// the corner subalgebra.
    pub fn inclusion(&self, tols: &Tolerances) -> Result<Process> {
        let mut routes = Vec::new();
        for (i, v) in self.isometries.iter().enumerate() {
            if let Some(j) = self.block_map[i] {
                routes.push(((j, i), vec![v.adjoint()]));
            }
        }
        Ok(Process::from_kraus(self.corner.clone(), self.parent.clone(), routes, tols)?)
    }
}

/// Corner of an effect: the embedding over `e = ⌊p⌋` together with
/// `π: 𝒜 → ⌊p⌋𝒜⌊p⌋`. Since `⌊p⌋ ≤ p ≤ 1`, compressing gives `π(p) = π(1)`,
/// the defining property of an initial process for `p`.
///
/// The zero corner (`⌊p⌋ = 0` everywhere) is a value — an empty corner
/// algebra with the empty process — not an error.
pub fn make_corner(p: &Effect, tols: &Tolerances) -> Result<(CornerEmbedding, Process)> {
    let e = effects::floor(p, tols)?;
    let embedding = CornerEmbedding::new(&e, tols)?;
    let pi = embedding.restriction(tols)?;
    Ok((embedding, pi))
}

/// Compression of an effect: the embedding over `e = ⌈p⌉` together with
/// `c: ⌈p⌉𝒜⌈p⌉ → 𝒜`, `b ↦ √p·(VbV*)·√p`, whose Kraus operators are
/// `V*√p`. By construction `c(1) = √p·e·√p = p`.
pub fn make_compression(p: &Effect, tols: &Tolerances) -> Result<(CornerEmbedding, Process)> {
    let e = effects::ceil(p, tols)?;
    let embedding = CornerEmbedding::new(&e, tols)?;
    let sqrt = p.sqrt_blocks(tols)?;
    let mut routes = Vec::new();
    for (i, v) in embedding.isometries.iter().enumerate() {
        if let Some(j) = embedding.block_map[i] {
            routes.push(((j, i), vec![v.adjoint().mul(&sqrt[i])?]));
        }
    }
    let c = Process::from_kraus(
        embedding.corner.clone(),
        embedding.parent.clone(),
        routes,
        tols,
    )?;
    Ok((embedding, c))
}

/// A solved factorization problem: the mediating process, the worst-case
/// defect of the factorization equation over all matrix units, and a
/// uniqueness certificate for the mediator.
#[derive(Debug, Clone)]
pub struct FactorizationResult {
    pub mediator: Process,
    pub residual: f64,
    pub unique: bool,
}

/// The compression mediator computed through truncated approximants, with
/// the index at which the approximant sequence stabilized and the distance
/// profile that exhibits the plateau.
#[derive(Debug, Clone)]
pub struct LimitFactorization {
    pub factorization: FactorizationResult,
    /// First `n` from which `q_n` (and hence the mediator) stops changing.
    pub stabilized_at: usize,
    /// Distance from the `n`-th mediator to the closed form, `n = 1..=n_max`.
    pub distances: Vec<f64>,
}

/// Stack all route superoperators of a map into one matrix from
/// `vec(source)` to `vec(target)`, with blocks ordered by block index.
fn total_superop(lin: &BlockLinearMap) -> CMatrix {
    let src = lin.source().block_dims();
    let tgt = lin.target().block_dims();
    let col_off: Vec<usize> = src
        .iter()
        .scan(0usize, |acc, &n| {
            let o = *acc;
            *acc += n * n;
            Some(o)
        })
        .collect();
    let row_off: Vec<usize> = tgt
        .iter()
        .scan(0usize, |acc, &m| {
            let o = *acc;
            *acc += m * m;
            Some(o)
        })
        .collect();
    let mut t = CMatrix::zeros(lin.target().vec_dim(), lin.source().vec_dim());
    for (i, &n) in src.iter().enumerate() {
        for (j, &m) in tgt.iter().enumerate() {
            if let Some(s) = lin.route((i, j)) {
                for r in 0..m * m {
                    for c in 0..n * n {
                        t[(row_off[j] + r, col_off[i] + c)] = s[(r, c)];
                    }
                }
            }
        }
    }
    t
}

/// Rank of a rectangular matrix via the spectrum of its Gram matrix, using
/// the shared rank cut (on the Gram eigenvalues, i.e. squared singular
/// values).
fn matrix_rank(t: &CMatrix, tols: &Tolerances) -> Result<usize> {
    if t.rows() == 0 || t.cols() == 0 {
        return Ok(0);
    }
    let gram = t.adjoint().mul(t)?;
    let eig = eig_hermitian(&gram.hermitian_part()?, tols)?;
    let lmax = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let cut = tols.rank_cut(lmax);
    Ok(eig.eigenvalues.iter().filter(|&&l| l > cut).count())
}

/// Worst defect of `a = b` over all matrix units: for each unit of the
/// shared source, the operator norm of the difference of images.
pub fn process_defect_on_units(a: &Process, b: &Process, tols: &Tolerances) -> Result<f64> {
    if a.source() != b.source() || a.target() != b.target() {
        return Err(UniversalError::NotComposable {
            left: a.source().block_dims().to_vec(),
            right: b.source().block_dims().to_vec(),
        });
    }
    let ta = total_superop(&a.linearized());
    let tb = total_superop(&b.linearized());
    let diff = ta.sub(&tb)?;
    let tgt = a.target().block_dims();
    let mut worst: f64 = 0.0;
    for col in 0..diff.cols() {
        let mut row = 0usize;
        for &m in tgt {
            let img = CMatrix::from_fn(m, m, |r, c| diff[(row + r * m + c, col)]);
            worst = worst.max(op_norm(&img, tols));
            row += m * m;
        }
    }
    Ok(worst)
}

/// The truncated inverse square root `q_n = Σ_{λ > 1/n} λ^{−1/2} e_λ` of an
/// effect, blockwise.
fn truncated_inverse_sqrt(p: &Effect, n: usize, tols: &Tolerances) -> Result<Vec<CMatrix>> {
    let cut = 1.0 / n as f64;
    Ok(p.apply_function_blocks(tols, |l| {
        if l > cut { Complex64::new(l.sqrt().recip(), 0.0) } else { Complex64::new(0.0, 0.0) }
    })?)
}

/// The pseudo-inverse square root `s = pinv(√p)`, built spectrally at the
/// shared rank cut so that it agrees exactly with the stabilized `q_n`.
fn pseudo_inverse_sqrt(p: &Effect, tols: &Tolerances) -> Result<Vec<CMatrix>> {
    let mut out = Vec::new();
    for block in p.blocks() {
        let eig = eig_hermitian(block, tols)?;
        let lmax = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
        let cut = tols.rank_cut(lmax);
        out.push(eig.rebuild(|l| {
            if l > cut { Complex64::new(l.sqrt().recip(), 0.0) } else { Complex64::new(0.0, 0.0) }
        }));
    }
    Ok(out)
}

/// Smallest eigenvalue of `p` above its rank cut, over all blocks; `None`
/// for the zero effect.
fn min_positive_eigenvalue(p: &Effect, tols: &Tolerances) -> Result<Option<f64>> {
    let mut min: Option<f64> = None;
    for block in p.blocks() {
        let eig = eig_hermitian(block, tols)?;
        let lmax = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
        let cut = tols.rank_cut(lmax);
        for &l in &eig.eigenvalues {
            if l > cut {
                min = Some(match min {
                    Some(m) => m.min(l),
                    None => l,
                });
            }
        }
    }
    Ok(min)
}

/// Mediator Kraus assembly: given `f` into the parent and a blockwise
/// weight `w` on the parent (either `q_n` or `pinv(√p)`), build the process
/// `b ↦ V* w f(b) w V` with Kraus operators `K_f · w_i · V_i`.
fn weighted_mediator(
    f: &Process,
    embedding: &CornerEmbedding,
    weight: &[CMatrix],
    tols: &Tolerances,
) -> Result<Process> {
    let mut routes = Vec::new();
    for (i_src, i_par) in f.routes() {
        let Some(j) = embedding.block_map[i_par] else {
            // Rank-zero parent block: p vanishes there, so f(1) ≤ p forces
            // this route to vanish too; the residual check keeps us honest.
            continue;
        };
        let wv = weight[i_par].mul(&embedding.isometries[i_par])?;
        let ops = f
            .kraus_route((i_src, i_par))
            .expect("route exists")
            .iter()
            .map(|k| k.mul(&wv))
            .collect::<Result<Vec<_>, _>>()?;
        routes.push(((i_src, j), ops));
    }
    Ok(Process::from_kraus(
        f.source().clone(),
        embedding.corner.clone(),
        routes,
        tols,
    )?)
}

/// Uniqueness of a mediator `x` in `outer ∘ x = given`, by rank: solutions
/// differ by maps whose columns lie in the kernel of `outer`'s total
/// superoperator, so the mediator is unique exactly when that kernel is
/// trivial (or the mediator's source is the zero algebra).
fn unique_through(outer: &Process, mediator_source: &Algebra, tols: &Tolerances) -> Result<bool> {
    if mediator_source.vec_dim() == 0 {
        return Ok(true);
    }
    let t = total_superop(&outer.linearized());
    Ok(matrix_rank(&t, tols)? == outer.source().vec_dim())
}

/// Uniqueness of a mediator `x` in `x ∘ inner = given`: solutions differ by
/// maps vanishing on the range of `inner`, so the mediator is unique
/// exactly when `inner`'s total superoperator is surjective.
fn unique_from(inner: &Process, mediator_target: &Algebra, tols: &Tolerances) -> Result<bool> {
    if mediator_target.vec_dim() == 0 {
        return Ok(true);
    }
    let t = total_superop(&inner.linearized());
    Ok(matrix_rank(&t, tols)? == inner.target().vec_dim())
}

/// Factor `f` through the compression of `p`: produce the unique mediator
/// `f̄` with `c ∘ f̄ = f`, in closed form `f̄(b) = V* s f(b) s V` with
/// `s = pinv(√p)`.
///
/// Requires `f(1) ≤ p`: then the image of `f` is supported within the
/// support of `p`, which is exactly what makes `c(f̄(b)) = e f(b) e = f(b)`.
pub fn factor_through_compression(
    f: &Process,
    p: &Effect,
    tols: &Tolerances,
) -> Result<FactorizationResult> {
    if f.target() != p.algebra() {
        return Err(UniversalError::NotComposable {
            left: f.target().block_dims().to_vec(),
            right: p.algebra().block_dims().to_vec(),
        });
    }
    let f_one = Effect::new(p.algebra().clone(), f.apply_one(), tols)?;
    if !f_one.is_le(p, tols.precondition, tols)? {
        let gap = effects::blocks_sub(p.blocks(), f_one.blocks())?;
        let residual = gap
            .iter()
            .map(|g| {
                crate::linalg::min_eigenvalue_margin(&g.hermitian_part()?, tols)
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0f64, |acc, m| acc.max((-m).max(0.0)));
        return Err(UniversalError::PreconditionViolated { condition: "f(1) ≤ p", residual });
    }

    let (embedding, c) = make_compression(p, tols)?;
    let s = pseudo_inverse_sqrt(p, tols)?;
    let mediator = weighted_mediator(f, &embedding, &s, tols)?;
    let residual = process_defect_on_units(&c.compose(&mediator, tols)?, f, tols)?;
    let unique = unique_through(&c, f.source(), tols)?;
    Ok(FactorizationResult { mediator, residual, unique })
}

/// Factor `f` through the compression of `p` by the approximant route:
/// compute the mediator with `q_n` in place of `pinv(√p)` for
/// `n = 1..=n_max`, detect where the sequence stabilizes, and return the
/// stabilized factorization.
///
/// The sequence stabilizes at the first `n` with `1/n` strictly below the
/// least positive eigenvalue of `p` — from there `q_n` keeps exactly the
/// support spectrum and equals `pinv(√p)`.
pub fn factor_through_compression_by_limit(
    f: &Process,
    p: &Effect,
    n_max: usize,
    tols: &Tolerances,
) -> Result<LimitFactorization> {
    let closed = factor_through_compression(f, p, tols)?;
    let (embedding, _) = make_compression(p, tols)?;
    let mut distances = Vec::with_capacity(n_max);
    for n in 1..=n_max.max(1) {
        let q_n = truncated_inverse_sqrt(p, n, tols)?;
        let mediator_n = weighted_mediator(f, &embedding, &q_n, tols)?;
        distances.push(process_defect_on_units(&mediator_n, &closed.mediator, tols)?);
    }
    // Stabilized: the suffix of the profile that is indistinguishable from
    // the closed form. The math guarantees monotone stabilization (the kept
    // spectrum only grows), so the first such index is the plateau start.
    let stabilized_at = match distances.iter().position(|&d| d <= tols.residual) {
        Some(idx) if distances[idx..].iter().all(|&d| d <= tols.residual) => idx + 1,
        _ => return Err(UniversalError::StabilizationNotReached { n_max }),
    };
    if let Some(lmin) = min_positive_eigenvalue(p, tols)? {
        let expected = (1.0 / lmin).floor() as usize + 1;
        debug_assert_eq!(
            stabilized_at, expected,
            "plateau start disagrees with the spectral threshold"
        );
    }
    Ok(LimitFactorization { factorization: closed, stabilized_at, distances })
}

/// Factor `g` through the corner of `p`: produce the unique mediator `ḡ`
/// with `ḡ ∘ π = g`, in closed form `ḡ = g ∘ j` for the corner inclusion
/// `j(b) = VbV*`.
///
/// Requires `g(p) = g(1)`: a process constant on `[⌊p⌋, 1]` factors through
/// what survives below `⌊p⌋`.
pub fn factor_through_corner(
    g: &Process,
    p: &Effect,
    tols: &Tolerances,
) -> Result<FactorizationResult> {
    if g.source() != p.algebra() {
        return Err(UniversalError::NotComposable {
            left: g.source().block_dims().to_vec(),
            right: p.algebra().block_dims().to_vec(),
        });
    }
    let residual =
        effects::blocks_distance(&g.apply_blocks(p.blocks())?, &g.apply_one(), tols)?;
    if residual > tols.precondition {
        return Err(UniversalError::PreconditionViolated { condition: "g(p) = g(1)", residual });
    }

    let (embedding, pi) = make_corner(p, tols)?;
    let j = embedding.inclusion(tols)?;
    let mediator = g.compose(&j, tols)?;
    let residual = process_defect_on_units(&mediator.compose(&pi, tols)?, g, tols)?;
    let unique = unique_from(&pi, g.target(), tols)?;
    Ok(FactorizationResult { mediator, residual, unique })
}

/// Decide whether a process `x` with `outer ∘ x = given` is unique, solving
/// the vectorized linear system column by column.
///
/// Errors with [`UniversalError::NoSolution`] when the system is
/// inconsistent beyond tolerance — uniqueness of a solution that does not
/// exist is not a meaningful verdict. The returned flag is the rank
/// criterion: solutions are a single point exactly when `outer`'s total
/// superoperator has a trivial kernel (or the unknown's source is the zero
/// algebra, where the empty map is the only map there is).
pub fn mediator_uniqueness_probe(
    outer: &Process,
    given: &Process,
    tols: &Tolerances,
) -> Result<bool> {
    if outer.target() != given.target() {
        return Err(UniversalError::NotComposable {
            left: outer.target().block_dims().to_vec(),
            right: given.target().block_dims().to_vec(),
        });
    }
    let t_outer = total_superop(&outer.linearized());
    let t_given = total_superop(&given.linearized());

    // Least-squares solvability, column by column via the Gram pseudo-inverse.
    if given.source().vec_dim() > 0 && outer.target().vec_dim() > 0 {
        let gram = t_outer.adjoint().mul(&t_outer)?;
        let gram_pinv = crate::linalg::pinv_psd(&gram.hermitian_part()?, tols)?;
        let projector = t_outer.mul(&gram_pinv)?.mul(&t_outer.adjoint())?;
        let reproduced = projector.mul(&t_given)?;
        let defect = reproduced.sub(&t_given)?.frobenius_norm();
        let scale = t_given.frobenius_norm().max(1.0);
        if defect > tols.residual * scale {
            return Err(UniversalError::NoSolution { residual: defect / scale });
        }
    }

    if given.source().vec_dim() == 0 {
        return Ok(true);
    }
    Ok(matrix_rank(&t_outer, tols)? == outer.source().vec_dim())
}

/// The canonical mediator between two embeddings of the same projection:
/// `b ↦ V₂* V₁ b V₁* V₂`, a process from the first corner to the second.
/// Composing the two directions gives mutually inverse *-isomorphisms —
/// the sense in which a compression is unique.
pub fn corner_change_of_basis(
    from: &CornerEmbedding,
    to: &CornerEmbedding,
    tols: &Tolerances,
) -> Result<Process> {
    let defect = effects::blocks_distance(from.projection.blocks(), to.projection.blocks(), tols)?;
    if defect > tols.projection {
        return Err(UniversalError::PreconditionViolated {
            condition: "embeddings present the same projection",
            residual: defect,
        });
    }
    let mut routes = Vec::new();
    for i in 0..from.isometries.len() {
        if let (Some(j1), Some(j2)) = (from.block_map[i], to.block_map[i]) {
            routes.push(((j1, j2), vec![from.isometries[i].adjoint().mul(&to.isometries[i])?]));
        }
    }
    Ok(Process::from_kraus(from.corner.clone(), to.corner.clone(), routes, tols)?)
}
