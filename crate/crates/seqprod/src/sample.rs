//! Seeded instance generators.
//!
//! All randomness in the crate flows from one `u64` seed through
//! [`derive_rng`], which hashes a label path (suite, property, index) into an
//! independent ChaCha8 stream. Adding or reordering properties therefore
//! never perturbs the instances another property sees, and a fixed seed
//! reproduces every instance bit-for-bit on any platform.
//!
//! The generators favor coverage over distributional elegance: spectra are
//! uniform, unitaries come from eigenbases of random Hermitian matrices, and
//! shapes include rank-deficient and block-diagonal cases. What matters for
//! the verification suites is determinism and a spread of ranks and scales.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::effects::{Algebra, Effect, Projection};
use crate::linalg::{eig_hermitian, op_norm, CMatrix};
use crate::process::{Process, ProcessError};
use crate::tol::Tolerances;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent, reproducible RNG stream for `(labels, index)`
/// under the global `seed`.
///
/// The label path is hashed with FNV-1a (with explicit separators, so label
/// boundaries matter), expanded by SplitMix64 into a 32-byte ChaCha8 key.
pub fn derive_rng(seed: u64, labels: &[&str], index: u64) -> ChaCha8Rng {
    let mut hash = fnv1a(FNV_OFFSET, &seed.to_le_bytes());
    for label in labels {
        hash = fnv1a(hash, label.as_bytes());
        hash = fnv1a(hash, &[0xff]);
    }
    hash = fnv1a(hash, &index.to_le_bytes());

    let mut state = hash;
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Complex matrix with entries uniform on the unit square `[-1,1]²`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random Hermitian matrix `(m + m*)/2`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    random_matrix(rng, n, n).hermitian_part().expect("square by construction")
}

/// Random self-adjoint element of an algebra, blockwise Hermitian with
/// operator norm at most one.
pub fn random_self_adjoint_blocks(
    rng: &mut impl Rng,
    algebra: &Algebra,
    tols: &Tolerances,
) -> Vec<CMatrix> {
    algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let h = random_hermitian(rng, n);
            let norm = op_norm(&h, tols).max(1e-12);
            h.scale_re(1.0 / norm)
        })
        .collect()
}

/// Random general element of an algebra with blockwise operator norm one.
pub fn random_element_blocks(
    rng: &mut impl Rng,
    algebra: &Algebra,
    tols: &Tolerances,
) -> Vec<CMatrix> {
    algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let m = random_matrix(rng, n, n);
            let norm = op_norm(&m, tols).max(1e-12);
            m.scale_re(1.0 / norm)
        })
        .collect()
}

/// Random unitary: the eigenbasis of a random Hermitian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize, tols: &Tolerances) -> CMatrix {
    let h = random_hermitian(rng, n);
    eig_hermitian(&h, tols).expect("random Hermitian matrix").vectors
}

/// `V · diag(d) · V*` for a unitary `V`.
pub fn unitary_conjugate_diag(v: &CMatrix, diag: &[f64]) -> CMatrix {
    let n = diag.len();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        if diag[k] == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = v[(i, k)] * diag[k];
            for j in 0..n {
                out[(i, j)] += vik * v[(j, k)].conj();
            }
        }
    }
    out
}

/// Random effect with the given per-block spectra drawn from `spectrum`.
pub fn random_effect_with(
    rng: &mut impl Rng,
    algebra: &Algebra,
    tols: &Tolerances,
    mut spectrum: impl FnMut(&mut dyn rand::RngCore, usize) -> Vec<f64>,
) -> Effect {
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let v = random_unitary(rng, n, tols);
            let lambda = spectrum(rng, n);
            unitary_conjugate_diag(&v, &lambda)
        })
        .collect();
    Effect::new(algebra.clone(), blocks, tols).expect("spectrum lies in [0,1]")
}

/// Random effect with uniform spectrum on `[0, 1]`.
pub fn random_effect(rng: &mut impl Rng, algebra: &Algebra, tols: &Tolerances) -> Effect {
    random_effect_with(rng, algebra, tols, |rng, n| {
        (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()
    })
}

/// Random effect whose nonzero eigenvalues stay above `floor_value`; with
/// `rank < n` the remaining eigenvalues are exactly zero. Exercises kernels
/// and keeps `1/λ_min⁺` bounded for limit constructions.
pub fn random_effect_with_floor(
    rng: &mut impl Rng,
    algebra: &Algebra,
    floor_value: f64,
    full_rank: bool,
    tols: &Tolerances,
) -> Effect {
    random_effect_with(rng, algebra, tols, |rng, n| {
        let rank = if full_rank || n == 1 { n } else { rng.gen_range(1..=n) };
        (0..n)
            .map(|k| if k < rank { rng.gen_range(floor_value..1.0) } else { 0.0 })
            .collect()
    })
}

/// Random projection of the given rank on one block.
pub fn random_projection_matrix(rng: &mut impl Rng, n: usize, rank: usize, tols: &Tolerances) -> CMatrix {
    let v = random_unitary(rng, n, tols);
    let diag: Vec<f64> = (0..n).map(|k| if k < rank { 1.0 } else { 0.0 }).collect();
    unitary_conjugate_diag(&v, &diag)
}

/// Random projection with independently chosen block ranks (0..=n each).
pub fn random_projection(rng: &mut impl Rng, algebra: &Algebra, tols: &Tolerances) -> Projection {
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let rank = rng.gen_range(0..=n);
            random_projection_matrix(rng, n, rank, tols)
        })
        .collect();
    let effect = Effect::new(algebra.clone(), blocks, tols).expect("projection spectra are 0/1");
    Projection::new(effect, tols).expect("constructed from an exact 0/1 spectrum")
}

/// Random projection that is rank one in a single block and zero elsewhere.
pub fn random_rank_one_projection(
    rng: &mut impl Rng,
    algebra: &Algebra,
    tols: &Tolerances,
) -> Projection {
    let chosen = rng.gen_range(0..algebra.num_blocks());
    let blocks = algebra
        .block_dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            if i == chosen {
                random_projection_matrix(rng, n, 1, tols)
            } else {
                CMatrix::zeros(n, n)
            }
        })
        .collect();
    let effect = Effect::new(algebra.clone(), blocks, tols).expect("projection spectra are 0/1");
    Projection::new(effect, tols).expect("constructed from an exact 0/1 spectrum")
}

/// Random strictly contractive process with every route populated by
/// `kraus_per_route` Kraus operators, rescaled so `‖f(1)‖ = 1 − 1e-3`.
pub fn random_process(
    rng: &mut impl Rng,
    source: &Algebra,
    target: &Algebra,
    kraus_per_route: usize,
    tols: &Tolerances,
) -> Result<Process, ProcessError> {
    let mut routes = Vec::new();
    for (i, &n) in source.block_dims().iter().enumerate() {
        for (j, &m) in target.block_dims().iter().enumerate() {
            let kraus: Vec<CMatrix> =
                (0..kraus_per_route).map(|_| random_matrix(rng, n, m)).collect();
            routes.push(((i, j), kraus));
        }
    }
    // Rescale to a strict contraction before validation.
    let trial = Process::from_kraus_unchecked(source.clone(), target.clone(), routes.clone());
    let norm = crate::effects::blocks_op_norm(&trial.apply_one(), tols);
    if norm > 0.0 {
        let t = ((1.0 - 1e-3) / norm).sqrt();
        for (_, kraus) in &mut routes {
            for k in kraus.iter_mut() {
                *k = k.scale_re(t);
            }
        }
    }
    Process::from_kraus(source.clone(), target.clone(), routes, tols)
}

/// Random unital *-homomorphism-style process: conjugation by a random
/// unitary on each block, routed identically.
pub fn random_unitary_conjugation(
    rng: &mut impl Rng,
    algebra: &Algebra,
    tols: &Tolerances,
) -> Result<Process, ProcessError> {
    let routes = algebra
        .block_dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| ((i, i), vec![random_unitary(rng, n, tols)]))
        .collect();
    Process::from_kraus(algebra.clone(), algebra.clone(), routes, tols)
}

/// Random density-style matrix: positive semidefinite with trace one.
pub fn random_state_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
    let m = random_matrix(rng, n, n);
    let g = m.adjoint().mul(&m).expect("square");
    let tr = g.trace().re.max(1e-12);
    g.scale_re(1.0 / tr)
}
