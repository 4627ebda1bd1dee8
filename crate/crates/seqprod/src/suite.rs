//! Seeded verification suites with deterministic JSON reports.
//!
//! A suite is an ordered list of named properties. Each property draws its
//! randomness from a stream derived by hashing (seed, suite, property,
//! shape index), so adding or reordering properties never perturbs the
//! instances another one sees, and the same seed and config produce a
//! byte-identical report. The counterexample runners re-verify the bundled
//! fixture data live and compare the observed failure pattern against the
//! recorded one; `certify_map` turns a parsed map file into a certificate
//! record without judging it.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::axioms::{
    self, ax2_sign_candidate, ax4_phase_candidate, check_all, pqp_candidate, standard_candidate,
    uniqueness_demo, AxiomError, AxiomReport, Candidate, InstanceSet,
};
use crate::effects::{
    self, blocks_distance, blocks_op_norm, Algebra, Effect, EffectError, Projection,
};
use crate::json::{AnyMap, EffectJson, JsonError, MatrixJson};
use crate::linalg::{self, CMatrix, LinalgError};
use crate::process::{self, BlockLinearMap, Process, ProcessError};
use crate::sample::{self, derive_rng};
use crate::tol::Tolerances;
use crate::universal::{self, UniversalError};

/// Seed used when neither the CLI flag nor `SEQPROD_SEED` supplies one.
pub const DEFAULT_SEED: u64 = 1513;

/// Report schema version, bumped only on incompatible layout changes.
pub const SCHEMA: u32 = 1;

/// Largest block dimension a config accepts; guards against accidentally
/// requesting dense spectral work on large matrices.
pub const MAX_BLOCK_DIM: usize = 8;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite `{name}`; expected linalg, effects, processes, universal, axioms or all")]
    UnknownSuite { name: String },
    #[error("unknown counterexample `{name}`; expected ax1-pqp, ax2-sign or ax4-phase")]
    UnknownCounterexample { name: String },
    #[error("samples must be at least 1")]
    NoSamples,
    #[error("dims must list at least one algebra shape")]
    NoDims,
    #[error("block dimension {dim} exceeds the guard of {MAX_BLOCK_DIM}")]
    DimTooLarge { dim: usize },
    #[error(transparent)]
    Effect(#[from] EffectError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Universal(#[from] UniversalError),
    #[error(transparent)]
    Axiom(#[from] AxiomError),
    #[error(transparent)]
    Json(#[from] JsonError),
}

type Result<T, E = SuiteError> = std::result::Result<T, E>;

/// One run's worth of knobs: seed, algebra shapes, per-property sample
/// count, and the tolerance record every checker consults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub dims: Vec<Vec<usize>>,
    pub samples: usize,
    pub tols: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            dims: vec![vec![2], vec![3], vec![4], vec![2, 2]],
            samples: 25,
            tols: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(SuiteError::NoSamples);
        }
        if self.dims.is_empty() {
            return Err(SuiteError::NoDims);
        }
        for shape in &self.dims {
            for &dim in shape {
                if dim > MAX_BLOCK_DIM {
                    return Err(SuiteError::DimTooLarge { dim });
                }
            }
        }
        Ok(())
    }

    /// The configured shapes as algebras; rejects empty or zero-block shapes.
    pub fn algebras(&self) -> Result<Vec<Algebra>> {
        self.dims.iter().map(|shape| Ok(Algebra::new(shape.clone())?)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Linalg,
    Effects,
    Processes,
    Universal,
    Axioms,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Suite> {
        match name {
            "linalg" => Ok(Suite::Linalg),
            "effects" => Ok(Suite::Effects),
            "processes" => Ok(Suite::Processes),
            "universal" => Ok(Suite::Universal),
            "axioms" => Ok(Suite::Axioms),
            "all" => Ok(Suite::All),
            _ => Err(SuiteError::UnknownSuite { name: name.to_string() }),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Suite::Linalg => "linalg",
            Suite::Effects => "effects",
            Suite::Processes => "processes",
            Suite::Universal => "universal",
            Suite::Axioms => "axioms",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyStatus {
    Pass,
    Fail,
    NotDecidable,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub status: PropertyStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub dims: Vec<Vec<usize>>,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    /// Canonical serialization; one seed and config give one byte sequence.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Outcome of one property body before it is named and filed.
struct Outcome {
    status: PropertyStatus,
    residual: Option<f64>,
    detail: Option<String>,
    witness: Option<Value>,
}

impl Outcome {
    fn pass(residual: f64) -> Outcome {
        Outcome {
            status: PropertyStatus::Pass,
            residual: Some(residual),
            detail: None,
            witness: None,
        }
    }

    fn fail(residual: f64, detail: String) -> Outcome {
        Outcome {
            status: PropertyStatus::Fail,
            residual: Some(residual),
            detail: Some(detail),
            witness: None,
        }
    }

    /// Pass iff the worst residual is within `bound`.
    fn from_residual(worst: f64, bound: f64) -> Outcome {
        if worst <= bound {
            Outcome::pass(worst)
        } else {
            Outcome::fail(worst, format!("worst residual {worst:.3e} exceeds {bound:.1e}"))
        }
    }

    fn with_witness(mut self, witness: Value) -> Outcome {
        self.witness = Some(witness);
        self
    }
}

type PropResult = std::result::Result<Outcome, Box<dyn std::error::Error>>;

fn push_property(
    properties: &mut Vec<PropertyReport>,
    suite: &str,
    name: &str,
    body: impl FnOnce() -> PropResult,
) {
    let property = format!("{suite}/{name}");
    let report = match body() {
        Ok(o) => PropertyReport {
            property,
            status: o.status,
            residual: o.residual,
            detail: o.detail,
            witness: o.witness,
        },
        Err(e) => PropertyReport {
            property,
            status: PropertyStatus::Fail,
            residual: None,
            detail: Some(format!("checker error: {e}")),
            witness: None,
        },
    };
    properties.push(report);
}

/// Run one suite (or all of them) and assemble the ordered report.
pub fn run_suite(suite: Suite, config: &RunConfig) -> Result<SuiteReport> {
    config.validate()?;
    let algebras = config.algebras()?;
    let parts: &[Suite] = match suite {
        Suite::All => {
            &[Suite::Linalg, Suite::Effects, Suite::Processes, Suite::Universal, Suite::Axioms]
        }
        _ => std::slice::from_ref(&suite),
    };
    let mut properties = Vec::new();
    for &part in parts {
        collect_properties(part, &mut properties, config, &algebras);
    }
    let passed = properties.iter().all(|p| p.status == PropertyStatus::Pass);
    Ok(SuiteReport {
        schema: SCHEMA,
        suite: suite.label().to_string(),
        seed: config.seed,
        samples: config.samples,
        dims: config.dims.clone(),
        passed,
        properties,
    })
}

fn collect_properties(
    suite: Suite,
    properties: &mut Vec<PropertyReport>,
    config: &RunConfig,
    algebras: &[Algebra],
) {
    match suite {
        Suite::Linalg => linalg_properties(properties, config),
        Suite::Effects => effects_properties(properties, config, algebras),
        Suite::Processes => processes_properties(properties, config, algebras),
        Suite::Universal => universal_properties(properties, config, algebras),
        Suite::Axioms => axioms_properties(properties, config, algebras),
        Suite::All => unreachable!("all is expanded by run_suite"),
    }
}

// ---------------------------------------------------------------------------
// linalg

fn linalg_properties(properties: &mut Vec<PropertyReport>, config: &RunConfig) {
    let t = &config.tols;
    let suite = "linalg";

    push_property(properties, suite, "eigendecomposition-reconstructs", || {
        let mut worst = 0.0f64;
        for (i, shape) in config.dims.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "eig"], i as u64);
            for &n in shape {
                for _ in 0..config.samples {
                    let h = sample::random_hermitian(&mut rng, n);
                    let eig = linalg::eig_hermitian(&h, t)?;
                    worst = worst.max(eig.reconstruction_error(&h)).max(eig.unitarity_error());
                }
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "square-root-squares-back", || {
        let mut worst = 0.0f64;
        for (i, shape) in config.dims.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "sqrt"], i as u64);
            for &n in shape {
                for _ in 0..config.samples {
                    let h = sample::random_hermitian(&mut rng, n);
                    let a = h.mul(&h)?;
                    let s = linalg::sqrt_psd(&a, t)?;
                    let d = s.mul(&s)?.sub(&a)?.frobenius_norm() / a.frobenius_norm().max(1.0);
                    worst = worst.max(d);
                }
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "operator-norm-cstar-identity", || {
        let mut worst = 0.0f64;
        for (i, shape) in config.dims.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "cstar"], i as u64);
            for &n in shape {
                for _ in 0..config.samples {
                    let a = sample::random_matrix(&mut rng, n, n);
                    let norm = linalg::op_norm(&a, t);
                    let gram = linalg::op_norm(&a.adjoint().mul(&a)?, t);
                    let d = (gram - norm * norm).abs() / (norm * norm).max(1.0);
                    worst = worst.max(d);
                }
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "pseudo-inverse-recovers-support", || {
        let mut worst = 0.0f64;
        for (i, shape) in config.dims.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "pinv"], i as u64);
            for &n in shape {
                for _ in 0..config.samples {
                    let h = sample::random_hermitian(&mut rng, n);
                    let a = h.mul(&h)?;
                    let x = linalg::pinv_psd(&a, t)?;
                    let scale = a.frobenius_norm().max(1.0);
                    let sandwich = a.mul(&x)?.mul(&a)?.sub(&a)?.frobenius_norm() / scale;
                    let support = linalg::support_projection(&a, t)?;
                    let projects = a.mul(&x)?.sub(&support)?.frobenius_norm();
                    worst = worst.max(sandwich).max(projects);
                }
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "positivity-routes-agree", || {
        for (i, shape) in config.dims.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "positivity"], i as u64);
            for &n in shape {
                for k in 0..config.samples {
                    let h = sample::random_hermitian(&mut rng, n);
                    let pos = h.mul(&h)?.add(&CMatrix::identity(n).scale_re(0.1))?;
                    let shift = linalg::op_norm(&pos, t) + 1.0;
                    let neg = pos.sub(&CMatrix::identity(n).scale_re(shift))?;
                    let verdicts = [
                        linalg::is_positive(&pos, t.positivity, t)?,
                        linalg::is_positive_via_norm(&pos, t.positivity, t)?,
                        !linalg::is_positive(&neg, t.positivity, t)?,
                        !linalg::is_positive_via_norm(&neg, t.positivity, t)?,
                    ];
                    if verdicts.iter().any(|&v| !v) {
                        return Ok(Outcome::fail(
                            1.0,
                            format!("route disagreement on signed instance {k} at dim {n}"),
                        ));
                    }
                }
            }
        }
        Ok(Outcome::pass(0.0))
    });
}

// ---------------------------------------------------------------------------
// effects

fn effects_properties(
    properties: &mut Vec<PropertyReport>,
    config: &RunConfig,
    algebras: &[Algebra],
) {
    let t = &config.tols;
    let suite = "effects";

    push_property(properties, suite, "sampled-effects-stay-in-the-unit-interval", || {
        let mut worst = 0.0f64;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "interval"], i as u64);
            for _ in 0..config.samples {
                let p = sample::random_effect(&mut rng, alg, t);
                for block in p.blocks().iter().chain(p.complement().blocks()) {
                    let margin = linalg::min_eigenvalue_margin(block, t)?;
                    worst = worst.max((-margin).max(0.0));
                }
            }
        }
        Ok(Outcome::from_residual(worst, t.positivity))
    });

    push_property(properties, suite, "sequential-product-fixes-units", || {
        let mut worst = 0.0f64;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "units"], i as u64);
            let one = Effect::one(alg.clone());
            for _ in 0..config.samples {
                let p = sample::random_effect(&mut rng, alg, t);
                let q = sample::random_effect(&mut rng, alg, t);
                worst = worst.max(effects::seq_product(&p, &one, t)?.distance(&p, t)?);
                worst = worst.max(effects::seq_product(&one, &q, t)?.distance(&q, t)?);
                // The product itself re-runs the effect gates on construction.
                effects::seq_product(&p, &q, t)?;
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "ceiling-and-floor-bracket-the-effect", || {
        let mut worst = 0.0f64;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "bracket"], i as u64);
            for k in 0..config.samples {
                let p = sample::random_effect_with_floor(&mut rng, alg, 0.05, k % 2 == 0, t);
                let c = effects::ceil(&p, t)?;
                let f = effects::floor(&p, t)?;
                if !p.is_le(c.as_effect(), t.positivity, t)? {
                    return Ok(Outcome::fail(1.0, format!("p ≰ ⌈p⌉ on instance {k}")));
                }
                if !f.as_effect().is_le(&p, t.positivity, t)? {
                    return Ok(Outcome::fail(1.0, format!("⌊p⌋ ≰ p on instance {k}")));
                }
                // The support reproduces p: ⌈p⌉·p·⌈p⌉ = p.
                let mut reproduced = Vec::new();
                for (cb, pb) in c.blocks().iter().zip(p.blocks()) {
                    reproduced.push(cb.mul(pb)?.mul(cb)?);
                }
                worst = worst.max(blocks_distance(&reproduced, p.blocks(), t)?);
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "iterated-roots-reach-the-ceiling", || {
        let mut worst = 0.0f64;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "roots"], i as u64);
            for k in 0..config.samples {
                let p = sample::random_effect_with_floor(&mut rng, alg, 0.05, k % 2 == 0, t);
                let approximant = effects::ceil_by_limit(&p, 40, t)?;
                let ceiling = effects::ceil(&p, t)?;
                worst = worst.max(approximant.distance(ceiling.as_effect(), t)?);
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "connection-criteria-agree", || {
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "connected"], i as u64);
            for k in 0..config.samples {
                let raw = sample::random_element_blocks(&mut rng, alg, t);
                let norm = blocks_op_norm(&raw, t);
                let scale = if norm > 1.0 { 1.0 / (norm * (1.0 + 1e-12)) } else { 1.0 };
                let a: Vec<CMatrix> = raw.iter().map(|m| m.scale_re(scale)).collect();
                let e1 = sample::random_projection(&mut rng, alg, t);
                let e2 = sample::random_projection(&mut rng, alg, t);
                let flags = effects::check_connected(&a, &e1, &e2, t)?;
                if !flags.agree() {
                    return Ok(Outcome::fail(
                        1.0,
                        format!("criteria disagree on instance {k}: {flags:?}"),
                    ));
                }
                // Forcing the corner to vanish must switch all four on.
                let mut cut = Vec::new();
                for ((m, p1), p2) in a.iter().zip(e1.complement().blocks()).zip(e2.complement().blocks())
                {
                    cut.push(p1.mul(m)?.mul(p2)?);
                }
                let forced = effects::check_connected(&cut, &e1, &e2, t)?;
                if !forced.all_hold() {
                    return Ok(Outcome::fail(
                        1.0,
                        format!("vanishing corner not detected on instance {k}: {forced:?}"),
                    ));
                }
            }
        }
        Ok(Outcome::pass(0.0))
    });
}

// ---------------------------------------------------------------------------
// processes

fn processes_properties(
    properties: &mut Vec<PropertyReport>,
    config: &RunConfig,
    algebras: &[Algebra],
) {
    let t = &config.tols;
    let suite = "processes";

    push_property(properties, suite, "kraus-maps-are-completely-positive", || {
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "cp"], i as u64);
            for k in 0..config.samples {
                let f = sample::random_process(&mut rng, alg, alg, 2, t)?;
                if !f.linearized().is_completely_positive(t)? {
                    return Ok(Outcome::fail(1.0, format!("Choi verdict negative on instance {k}")));
                }
            }
        }
        Ok(Outcome::pass(0.0))
    });

    push_property(properties, suite, "transpose-is-positive-but-not-completely", || {
        for (i, alg) in algebras.iter().enumerate() {
            if alg.block_dims().iter().all(|&n| n < 2) {
                continue;
            }
            let mut rng = derive_rng(config.seed, &[suite, "transpose"], i as u64);
            let target = alg.clone();
            let transpose = BlockLinearMap::from_action(alg.clone(), alg.clone(), move |i, u| {
                let mut out: Vec<CMatrix> =
                    target.block_dims().iter().map(|&m| CMatrix::zeros(m, m)).collect();
                out[i] = u.transpose();
                Ok(out)
            })?;
            if !process::is_n_positive(&transpose, 1, &mut rng, 32, t)? {
                return Ok(Outcome::fail(1.0, "transpose flagged as non-positive".to_string()));
            }
            if transpose.is_completely_positive(t)? {
                return Ok(Outcome::fail(1.0, "transpose passed the Choi criterion".to_string()));
            }
        }
        Ok(Outcome::pass(0.0))
    });

    push_property(properties, suite, "composition-preserves-cp-and-contraction", || {
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "compose"], i as u64);
            for k in 0..config.samples {
                let f = sample::random_process(&mut rng, alg, alg, 2, t)?;
                let g = sample::random_process(&mut rng, alg, alg, 2, t)?;
                let comp = f.compose(&g, t)?;
                if !comp.linearized().is_completely_positive(t)? {
                    return Ok(Outcome::fail(1.0, format!("composite not CP on instance {k}")));
                }
                let norm = blocks_op_norm(&comp.apply_one(), t);
                if norm > 1.0 + t.contraction {
                    return Ok(Outcome::fail(
                        norm - 1.0,
                        format!("composite unit norm {norm} on instance {k}"),
                    ));
                }
            }
        }
        Ok(Outcome::pass(0.0))
    });

    push_property(properties, suite, "cauchy-schwarz-inequalities-hold", || {
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "cs"], i as u64);
            for k in 0..config.samples {
                let f = sample::random_process(&mut rng, alg, alg, 2, t)?;
                let a = sample::random_element_blocks(&mut rng, alg, t);
                let b = sample::random_element_blocks(&mut rng, alg, t);
                let r = process::cauchy_schwarz_inequalities(&f, &a, &b, t)?;
                if !r.all() {
                    return Ok(Outcome::fail(1.0, format!("instance {k}: {r:?}")));
                }
            }
        }
        Ok(Outcome::pass(0.0))
    });

    push_property(properties, suite, "kadison-inequality-for-unital-cp-maps", || {
        let mut worst = 0.0f64;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "kadison"], i as u64);
            let n = alg.block_dims()[0];
            let block = Algebra::full(n)?;
            for _ in 0..config.samples {
                let u = sample::random_unitary(&mut rng, n, t)
                    .scale_re(std::f64::consts::FRAC_1_SQRT_2);
                let v = sample::random_unitary(&mut rng, n, t)
                    .scale_re(std::f64::consts::FRAC_1_SQRT_2);
                let f = Process::from_kraus(block.clone(), block.clone(), vec![((0, 0), vec![u, v])], t)?;
                let a = sample::random_element_blocks(&mut rng, &block, t);
                let fa = f.apply_blocks(&a)?;
                let faa = f.apply_blocks(&[a[0].adjoint().mul(&a[0])?])?;
                let gap = faa[0].sub(&fa[0].adjoint().mul(&fa[0])?)?;
                let margin = linalg::min_eigenvalue_margin(&gap.hermitian_part()?, t)?;
                worst = worst.max((-margin).max(0.0));
            }
        }
        Ok(Outcome::from_residual(worst, t.positivity))
    });

    push_property(properties, suite, "block-positivity-criteria", || {
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "block2"], i as u64);
            let n = alg.block_dims()[0];
            for k in 0..config.samples {
                let hp = sample::random_hermitian(&mut rng, n);
                let hq = sample::random_hermitian(&mut rng, n);
                let p = hp.mul(&hp)?.add(&CMatrix::identity(n).scale_re(0.05))?;
                let q = hq.mul(&hq)?.add(&CMatrix::identity(n).scale_re(0.05))?;
                let c = sample::random_matrix(&mut rng, n, n);
                let contraction = c.scale_re(1.0 / (linalg::op_norm(&c, t) + 1e-6));
                let a = linalg::sqrt_psd(&p, t)?.mul(&contraction)?.mul(&linalg::sqrt_psd(&q, t)?)?;
                let good = process::block2_positivity(&p, &a, &q, t)?;
                if !(good.positive && good.dominated_left && good.dominated_right && good.norm_bound)
                {
                    return Ok(Outcome::fail(1.0, format!("instance {k} inside: {good:?}")));
                }
                let bad = process::block2_positivity(&p, &a.scale_re(1.5), &q, t)?;
                if bad.positive {
                    return Ok(Outcome::fail(
                        1.0,
                        format!("instance {k}: scaled corner kept the block matrix positive"),
                    ));
                }
            }
        }
        Ok(Outcome::pass(0.0))
    });

    push_property(properties, suite, "support-projections-dominate-images", || {
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "support"], i as u64);
            for k in 0..config.samples {
                let f = sample::random_process(&mut rng, alg, alg, 2, t)?;
                let a = sample::random_effect_with_floor(&mut rng, alg, 0.05, k % 2 == 0, t);
                let r = process::support_inequality_check(&f, &a, t)?;
                if !r.both() {
                    return Ok(Outcome::fail(1.0, format!("instance {k}: {r:?}")));
                }
            }
        }
        Ok(Outcome::pass(0.0))
    });
}

// ---------------------------------------------------------------------------
// universal

/// A random process into `p`'s algebra with `f(1) ≤ p`: conjugate the Kraus
/// operators of a strict contraction by `√p`.
fn random_process_below(
    rng: &mut impl Rng,
    source: &Algebra,
    p: &Effect,
    tols: &Tolerances,
) -> Result<Process> {
    let h = sample::random_process(rng, source, p.algebra(), 2, tols)?;
    let sqrt = p.sqrt_blocks(tols)?;
    let mut routes = Vec::new();
    for route in h.routes() {
        let ops = h
            .kraus_route(route)
            .expect("route exists")
            .iter()
            .map(|k| Ok(k.mul(&sqrt[route.1])?.scale_re(1.0 - 1e-3)))
            .collect::<Result<Vec<_>>>()?;
        routes.push((route, ops));
    }
    Ok(Process::from_kraus(source.clone(), p.algebra().clone(), routes, tols)?)
}

/// Smallest eigenvalue above the kernel cut, over all blocks.
fn min_positive_eigenvalue(p: &Effect, tols: &Tolerances) -> Result<Option<f64>> {
    let cut = tols.rank_cut(1.0);
    let mut min = f64::INFINITY;
    for block in p.blocks() {
        let eig = linalg::eig_hermitian(block, tols)?;
        for &l in &eig.eigenvalues {
            if l > cut && l < min {
                min = l;
            }
        }
    }
    Ok(if min.is_finite() { Some(min) } else { None })
}

fn universal_properties(
    properties: &mut Vec<PropertyReport>,
    config: &RunConfig,
    algebras: &[Algebra],
) {
    let t = &config.tols;
    let suite = "universal";
    let count = config.samples.min(12);

    push_property(properties, suite, "compressions-are-final", || {
        let mut worst = 0.0f64;
        let src = Algebra::full(3)?;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "final"], i as u64);
            for k in 0..count {
                let p = sample::random_effect_with_floor(&mut rng, alg, 0.05, k % 2 == 0, t);
                let f = random_process_below(&mut rng, &src, &p, t)?;
                let r = universal::factor_through_compression(&f, &p, t)?;
                if !r.unique {
                    return Ok(Outcome::fail(1.0, format!("mediator not unique on instance {k}")));
                }
                worst = worst.max(r.residual);
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "corners-are-initial", || {
        let mut worst = 0.0f64;
        let mut exercised = 0usize;
        let tgt = Algebra::full(3)?;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "initial"], i as u64);
            for k in 0..count {
                // The floor is the eigenvalue-1 eigenspace, so a continuous
                // spectrum never meets it; most instances force exact ones.
                let p = if k % 3 == 0 {
                    sample::random_effect_with_floor(&mut rng, alg, 0.05, true, t)
                } else {
                    sample::random_effect_with(&mut rng, alg, t, |rng, n| {
                        (0..n)
                            .map(|j| if j == 0 { 1.0 } else { rng.gen_range(0.05..0.95) })
                            .collect()
                    })
                };
                let (embedding, pi) = universal::make_corner(&p, t)?;
                if embedding.corner().is_empty() {
                    continue;
                }
                exercised += 1;
                let h = sample::random_process(&mut rng, embedding.corner(), &tgt, 2, t)?;
                let g = h.compose(&pi, t)?;
                let r = universal::factor_through_corner(&g, &p, t)?;
                if !r.unique {
                    return Ok(Outcome::fail(1.0, format!("mediator not unique on instance {k}")));
                }
                worst = worst.max(r.residual);
            }
        }
        if exercised == 0 {
            return Ok(Outcome::fail(1.0, "no instance produced a nonzero corner".to_string()));
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "approximants-stabilize-at-the-spectral-threshold", || {
        let mut worst = 0.0f64;
        let src = Algebra::full(2)?;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "limit"], i as u64);
            for k in 0..count {
                let p = sample::random_effect_with_floor(&mut rng, alg, 0.05, k % 2 == 0, t);
                let f = random_process_below(&mut rng, &src, &p, t)?;
                let lim = universal::factor_through_compression_by_limit(&f, &p, 40, t)?;
                worst = worst.max(lim.factorization.residual);
                if let Some(lmin) = min_positive_eigenvalue(&p, t)? {
                    let expected = (1.0 / lmin).floor() as usize + 1;
                    if lim.stabilized_at != expected {
                        return Ok(Outcome::fail(
                            1.0,
                            format!(
                                "instance {k}: plateau at {} but the smallest positive eigenvalue {lmin} demands {expected}",
                                lim.stabilized_at
                            ),
                        ));
                    }
                }
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "twisted-compressions-are-isomorphic", || {
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "iso"], i as u64);
            for k in 0..count.min(6) {
                let p = sample::random_effect_with_floor(&mut rng, alg, 0.05, false, t);
                let (e1, c1) = universal::make_compression(&p, t)?;
                let unitaries: Vec<CMatrix> = e1
                    .corner()
                    .block_dims()
                    .iter()
                    .map(|&r| sample::random_unitary(&mut rng, r, t))
                    .collect();
                let e2 = e1.twist(&unitaries, t)?;
                let sqrt = p.sqrt_blocks(t)?;
                let mut routes = Vec::new();
                for (parent, bm) in e2.block_map().iter().enumerate() {
                    if let Some(corner) = bm {
                        routes.push((
                            (*corner, parent),
                            vec![e2.isometry(parent).adjoint().mul(&sqrt[parent])?],
                        ));
                    }
                }
                let c2 = Process::from_kraus(e2.corner().clone(), e2.parent().clone(), routes, t)?;
                let m12 = universal::corner_change_of_basis(&e1, &e2, t)?;
                let m21 = universal::corner_change_of_basis(&e2, &e1, t)?;
                let d1 = universal::process_defect_on_units(&c2.compose(&m12, t)?, &c1, t)?;
                let d2 = universal::process_defect_on_units(&c1.compose(&m21, t)?, &c2, t)?;
                if d1.max(d2) > t.residual {
                    return Ok(Outcome::fail(
                        d1.max(d2),
                        format!("instance {k}: mediators do not interchange the compressions"),
                    ));
                }
                if !process::invertible_process_is_isomorphism(&m12, &m21, &mut rng, 6, t)? {
                    return Ok(Outcome::fail(
                        1.0,
                        format!("instance {k}: change of basis is not a *-isomorphism"),
                    ));
                }
            }
        }
        Ok(Outcome::pass(0.0))
    });

    push_property(properties, suite, "degenerate-data-defeats-uniqueness", || {
        let alg = Algebra::full(2)?;
        let outer = Process::from_kraus(alg.clone(), alg.clone(), vec![], t)?;
        let given = Process::from_kraus(Algebra::full(1)?, alg, vec![], t)?;
        if universal::mediator_uniqueness_probe(&outer, &given, t)? {
            return Ok(Outcome::fail(
                1.0,
                "zero data reported a unique mediator; every map solves 0 ∘ X = 0".to_string(),
            ));
        }
        Ok(Outcome::pass(0.0))
    });
}

// ---------------------------------------------------------------------------
// axioms

/// Bundled counterexample data: matrices frozen with their gap values and
/// the axioms the rule genuinely fails and passes.
#[derive(Debug, Deserialize)]
struct Ax1Fixture {
    schema: u32,
    name: String,
    unit_p: EffectJson,
    unit_gap: f64,
    iteration_p: EffectJson,
    iteration_q: EffectJson,
    iteration_gap: f64,
    expected_failures: Vec<String>,
    expected_passes: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct Ax2Fixture {
    schema: u32,
    name: String,
    p: EffectJson,
    q: EffectJson,
    q_matrix: MatrixJson,
    u_p: MatrixJson,
    u_p_squared: MatrixJson,
    iteration_gap: f64,
    iteration_gap_matrix: f64,
    expected_failures: Vec<String>,
    expected_passes: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct Ax4Fixture {
    schema: u32,
    name: String,
    p: EffectJson,
    e1: EffectJson,
    e2: EffectJson,
    backward_margin: f64,
    violation: f64,
    expected_failures: Vec<String>,
    expected_passes: Vec<String>,
}

const AX1_FIXTURE: &str = include_str!("../fixtures/ax1_pqp.json");
const AX2_FIXTURE: &str = include_str!("../fixtures/ax2_sign.json");
const AX4_FIXTURE: &str = include_str!("../fixtures/ax4_witness.json");

/// How close a recomputed gap must stay to its frozen fixture value.
const FIXTURE_GAP_TOL: f64 = 1e-9;

/// How close a recomputed certificate matrix must stay to its frozen entries.
const FIXTURE_ENTRY_TOL: f64 = 1e-12;

/// The observed axiom pattern of a candidate on an instance set.
fn observed_pattern(report: &AxiomReport) -> (Vec<String>, Vec<String>, Vec<String>) {
    let mut failures = Vec::new();
    let mut passes = Vec::new();
    let mut undecided = Vec::new();
    for (axiom, status) in report.entries() {
        if status.passed() {
            passes.push(axiom.to_string());
        } else if status.failed() {
            failures.push(axiom.to_string());
        } else {
            undecided.push(axiom.to_string());
        }
    }
    (failures, passes, undecided)
}

fn m2_instances(
    label: &str,
    seed: u64,
    samples: usize,
    tols: &Tolerances,
) -> Result<(InstanceSet, rand_chacha::ChaCha8Rng)> {
    let alg = Algebra::full(2)?;
    let mut rng = derive_rng(seed, &["counterexample", label], 0);
    let instances = InstanceSet::generate(&alg, &mut rng, samples, samples / 2 + 1, tols);
    Ok((instances, rng))
}

fn pattern_outcome(
    candidate: &Candidate,
    expected_failures: &[String],
    expected_passes: &[String],
    label: &str,
    config: &RunConfig,
) -> PropResult {
    let (instances, mut rng) = m2_instances(label, config.seed, config.samples.max(60), &config.tols)?;
    let report = check_all(candidate, &instances, &mut rng, &config.tols)?;
    let (failures, passes, undecided) = observed_pattern(&report);
    if !undecided.is_empty() {
        return Ok(Outcome {
            status: PropertyStatus::NotDecidable,
            residual: None,
            detail: Some(format!("undecided axioms: {}", undecided.join(", "))),
            witness: None,
        });
    }
    if failures.as_slice() == expected_failures && passes.as_slice() == expected_passes {
        Ok(Outcome::pass(0.0))
    } else {
        let witness = json!({
            "expected_failures": expected_failures,
            "observed_failures": failures,
            "observed_passes": passes,
        });
        Ok(Outcome::fail(
            1.0,
            format!("expected failures {{{}}}, observed {{{}}}", expected_failures.join(", "), failures.join(", ")),
        )
        .with_witness(witness))
    }
}

fn axioms_properties(
    properties: &mut Vec<PropertyReport>,
    config: &RunConfig,
    algebras: &[Algebra],
) {
    let t = &config.tols;
    let suite = "axioms";

    push_property(properties, suite, "standard-rule-passes-all-four-axioms", || {
        let mut worst = 0.0f64;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "standard"], i as u64);
            let instances =
                InstanceSet::generate(alg, &mut rng, config.samples, config.samples / 2 + 1, t);
            let report = check_all(&standard_candidate(), &instances, &mut rng, t)?;
            for (axiom, status) in report.entries() {
                match status {
                    axioms::AxiomStatus::Pass { max_residual } => {
                        worst = worst.max(*max_residual);
                    }
                    other => {
                        let detail = format!(
                            "{axiom} did not pass on shape {:?}: {other:?}",
                            alg.block_dims()
                        );
                        return Ok(Outcome::fail(1.0, detail));
                    }
                }
            }
        }
        Ok(Outcome::from_residual(worst, t.residual))
    });

    push_property(properties, suite, "standard-rule-is-the-canonical-product", || {
        let mut worst = 0.0f64;
        for (i, alg) in algebras.iter().enumerate() {
            let mut rng = derive_rng(config.seed, &[suite, "uniqueness"], i as u64);
            let instances =
                InstanceSet::generate(alg, &mut rng, config.samples, config.samples / 2 + 1, t);
            let report = uniqueness_demo(&standard_candidate(), &instances, &mut rng, t)?;
            if !report.pass {
                return Ok(Outcome::fail(
                    report.max_deviation,
                    format!("candidate strays from √p·q·√p on shape {:?}", alg.block_dims()),
                ));
            }
            worst = worst.max(report.max_deviation).max(report.waypoint_residual);
        }
        Ok(Outcome::from_residual(worst, t.uniqueness_demo))
    });

    push_property(properties, suite, "sandwich-rule-fails-decomposition-and-iteration", || {
        let fixture: Ax1Fixture = serde_json::from_str(AX1_FIXTURE)?;
        let cand = pqp_candidate();
        let p = fixture.unit_p.to_effect(t)?;
        let one = Effect::one(p.algebra().clone());
        let unit_gap = cand.apply(&p, &one, t)?.distance(&p, t)?;
        if (unit_gap - fixture.unit_gap).abs() > FIXTURE_GAP_TOL {
            return Ok(Outcome::fail(
                (unit_gap - fixture.unit_gap).abs(),
                format!("unit gap {unit_gap} drifted from the frozen {}", fixture.unit_gap),
            ));
        }
        let ip = fixture.iteration_p.to_effect(t)?;
        let iq = fixture.iteration_q.to_effect(t)?;
        let nested = cand.apply(&ip, &cand.apply(&ip, &iq, t)?, t)?;
        let flat = cand.apply(&cand.apply(&ip, &ip, t)?, &iq, t)?;
        let iteration_gap = blocks_op_norm(&effects::blocks_sub(nested.blocks(), flat.blocks())?, t);
        if (iteration_gap - fixture.iteration_gap).abs() > FIXTURE_GAP_TOL {
            return Ok(Outcome::fail(
                (iteration_gap - fixture.iteration_gap).abs(),
                format!(
                    "iteration gap {iteration_gap} drifted from the frozen {}",
                    fixture.iteration_gap
                ),
            ));
        }
        pattern_outcome(&cand, &fixture.expected_failures, &fixture.expected_passes, &fixture.name, config)
    });

    push_property(properties, suite, "sign-twist-fails-iteration-only", || {
        let fixture: Ax2Fixture = serde_json::from_str(AX2_FIXTURE)?;
        let cand = ax2_sign_candidate();
        let p = fixture.p.to_effect(t)?;
        let q = fixture.q.to_effect(t)?;

        for (matrix, frozen) in [(&fixture.u_p, &p), (&fixture.u_p_squared, &p.square())] {
            let cert = cand
                .corner_certificate(frozen, t)?
                .expect("spectral rules carry a certificate");
            let expected = matrix.to_matrix()?;
            let d = cert.unitary[0].sub(&expected)?.max_abs_entry();
            if d > FIXTURE_ENTRY_TOL {
                return Ok(Outcome::fail(d, "corner unitary drifted from the frozen entries".to_string()));
            }
        }

        let nested = cand.apply(&p, &cand.apply(&p, &q, t)?, t)?;
        let flat = cand.apply(&cand.apply(&p, &p, t)?, &q, t)?;
        let gap = blocks_op_norm(&effects::blocks_sub(nested.blocks(), flat.blocks())?, t);
        if (gap - fixture.iteration_gap).abs() > FIXTURE_GAP_TOL {
            return Ok(Outcome::fail(
                (gap - fixture.iteration_gap).abs(),
                format!("iteration gap {gap} drifted from the frozen {}", fixture.iteration_gap),
            ));
        }

        let qm = fixture.q_matrix.to_matrix()?;
        let nested_m = cand.apply_blocks(&p, &cand.apply_blocks(&p, std::slice::from_ref(&qm), t)?, t)?;
        let flat_m = cand.apply_blocks(&cand.apply(&p, &p, t)?, &[qm], t)?;
        let gap_m = blocks_op_norm(&effects::blocks_sub(&nested_m, &flat_m)?, t);
        if (gap_m - fixture.iteration_gap_matrix).abs() > FIXTURE_GAP_TOL {
            return Ok(Outcome::fail(
                (gap_m - fixture.iteration_gap_matrix).abs(),
                format!(
                    "matrix-level gap {gap_m} drifted from the frozen {}",
                    fixture.iteration_gap_matrix
                ),
            ));
        }
        pattern_outcome(&cand, &fixture.expected_failures, &fixture.expected_passes, &fixture.name, config)
    });

    push_property(properties, suite, "phase-twist-fails-orthogonality-only", || {
        let fixture: Ax4Fixture = serde_json::from_str(AX4_FIXTURE)?;
        let cand = ax4_phase_candidate();
        let p = fixture.p.to_effect(t)?;
        let e1 = Projection::new(fixture.e1.to_effect(t)?, t)?;
        let e2 = Projection::new(fixture.e2.to_effect(t)?, t)?;

        let forward = orthogonality_margin(&cand, &p, &e1, &e2, t)?;
        if forward < -t.positivity {
            return Ok(Outcome::fail(
                -forward,
                "the forward inequality of the frozen witness no longer holds".to_string(),
            ));
        }
        let backward = orthogonality_margin(&cand, &p, &e2, &e1, t)?;
        if (backward - fixture.backward_margin).abs() > FIXTURE_GAP_TOL {
            return Ok(Outcome::fail(
                (backward - fixture.backward_margin).abs(),
                format!(
                    "backward margin {backward} drifted from the frozen {}",
                    fixture.backward_margin
                ),
            ));
        }

        // The search must rediscover a violation of this size and the
        // untwisted rule must survive the same search.
        let alg = p.algebra();
        let mut rng = derive_rng(config.seed, &["axioms", "search"], 0);
        let found = axioms::search_orthogonality_witness(&cand, alg, &mut rng, config.samples, t)?;
        match found {
            Some(w) if w.violation > t.witness_margin => {}
            other => {
                return Ok(Outcome::fail(
                    1.0,
                    format!("witness search failed to reproduce the violation: {other:?}"),
                ));
            }
        }
        if let Some(w) =
            axioms::search_orthogonality_witness(&standard_candidate(), alg, &mut rng, config.samples, t)?
        {
            return Ok(Outcome::fail(
                w.violation,
                "the canonical rule produced an orthogonality violation".to_string(),
            ));
        }
        pattern_outcome(&cand, &fixture.expected_failures, &fixture.expected_passes, &fixture.name, config)
    });
}

/// Signed margin of `p ∗̃ e₁ ≤ 1 − e₂`; negative means violated.
fn orthogonality_margin(
    cand: &Candidate,
    p: &Effect,
    e1: &Projection,
    e2: &Projection,
    tols: &Tolerances,
) -> Result<f64> {
    let image = cand.apply(p, e1.as_effect(), tols)?;
    let bound = e2.as_effect().complement();
    let mut margin = f64::INFINITY;
    for (x, y) in image.blocks().iter().zip(bound.blocks()) {
        let gap = y.sub(x)?.hermitian_part()?;
        margin = margin.min(linalg::min_eigenvalue_margin(&gap, tols)?);
    }
    Ok(margin)
}

// ---------------------------------------------------------------------------
// counterexample reproduction

/// Everything `counterexample <name>` prints: the frozen matrices, the live
/// gap values, and the axiom pattern the rule actually exhibits.
#[derive(Debug, Serialize)]
pub struct CounterexampleReport {
    pub schema: u32,
    pub name: String,
    pub candidate: String,
    pub algebra: Vec<usize>,
    pub matrices: BTreeMap<String, MatrixJson>,
    pub gaps: BTreeMap<String, f64>,
    pub expected_failures: Vec<String>,
    pub expected_passes: Vec<String>,
    pub observed_failures: Vec<String>,
    pub observed_passes: Vec<String>,
    pub undecided: Vec<String>,
    pub fixture_matches: bool,
    pub notes: Vec<String>,
}

/// Reproduce one named counterexample live and compare against its fixture.
pub fn run_counterexample(name: &str, tols: &Tolerances) -> Result<CounterexampleReport> {
    match name {
        "ax1-pqp" => counterexample_ax1(tols),
        "ax2-sign" => counterexample_ax2(tols),
        "ax4-phase" => counterexample_ax4(tols),
        _ => Err(SuiteError::UnknownCounterexample { name: name.to_string() }),
    }
}

fn pattern_for(
    cand: &Candidate,
    label: &str,
    tols: &Tolerances,
) -> Result<(Vec<String>, Vec<String>, Vec<String>)> {
    let (instances, mut rng) = m2_instances(label, DEFAULT_SEED, 120, tols)?;
    let report = check_all(cand, &instances, &mut rng, tols)?;
    Ok(observed_pattern(&report))
}

fn single_block(e: &Effect) -> MatrixJson {
    MatrixJson::from_matrix(&e.blocks()[0])
}

fn counterexample_ax1(tols: &Tolerances) -> Result<CounterexampleReport> {
    let fixture: Ax1Fixture = serde_json::from_str(AX1_FIXTURE).expect("bundled fixture parses");
    debug_assert_eq!(fixture.schema, SCHEMA);
    let cand = pqp_candidate();
    let p = fixture.unit_p.to_effect(tols)?;
    let one = Effect::one(p.algebra().clone());
    let p_star_one = cand.apply(&p, &one, tols)?;
    let unit_gap = p_star_one.distance(&p, tols)?;

    let ip = fixture.iteration_p.to_effect(tols)?;
    let iq = fixture.iteration_q.to_effect(tols)?;
    let nested = cand.apply(&ip, &cand.apply(&ip, &iq, tols)?, tols)?;
    let flat = cand.apply(&cand.apply(&ip, &ip, tols)?, &iq, tols)?;
    let iteration_gap =
        blocks_op_norm(&effects::blocks_sub(nested.blocks(), flat.blocks())?, tols);

    let (observed_failures, observed_passes, undecided) =
        pattern_for(&cand, &fixture.name, tols)?;

    let gaps_hold = (unit_gap - fixture.unit_gap).abs() <= FIXTURE_GAP_TOL
        && (iteration_gap - fixture.iteration_gap).abs() <= FIXTURE_GAP_TOL;
    let pattern_holds = observed_failures == fixture.expected_failures
        && observed_passes == fixture.expected_passes
        && undecided.is_empty();

    let mut matrices = BTreeMap::new();
    matrices.insert("p".to_string(), single_block(&p));
    matrices.insert("p_star_one".to_string(), single_block(&p_star_one));
    matrices.insert("iteration_p".to_string(), single_block(&ip));
    matrices.insert("iteration_q".to_string(), single_block(&iq));
    matrices.insert("iteration_nested".to_string(), single_block(&nested));
    matrices.insert("iteration_flat".to_string(), single_block(&flat));
    let mut gaps = BTreeMap::new();
    gaps.insert("unit_gap".to_string(), unit_gap);
    gaps.insert("iteration_gap".to_string(), iteration_gap);

    Ok(CounterexampleReport {
        schema: SCHEMA,
        name: fixture.name,
        candidate: cand.name().to_string(),
        algebra: p.algebra().block_dims().to_vec(),
        matrices,
        gaps,
        expected_failures: fixture.expected_failures,
        expected_passes: fixture.expected_passes,
        observed_failures,
        observed_passes,
        undecided,
        fixture_matches: gaps_hold && pattern_holds,
        notes: vec![
            "conjugating by p itself already moves the unit: p ∗̃ 1 = p² = diag(1, 1/16) at p = diag(1, 1/4), a gap of 3/16".to_string(),
            "iteration falls with it: p ∗̃ (p ∗̃ q) = p²qp² while (p ∗̃ p) ∗̃ q = p³qp³, split by the frozen pair".to_string(),
            "compatibility and orthogonality survive, since the rule is a hom-compatible self-adjoint conjugation".to_string(),
        ],
    })
}

fn counterexample_ax2(tols: &Tolerances) -> Result<CounterexampleReport> {
    let fixture: Ax2Fixture = serde_json::from_str(AX2_FIXTURE).expect("bundled fixture parses");
    debug_assert_eq!(fixture.schema, SCHEMA);
    let cand = ax2_sign_candidate();
    let p = fixture.p.to_effect(tols)?;
    let q = fixture.q.to_effect(tols)?;

    let u_p = cand
        .corner_certificate(&p, tols)?
        .expect("spectral rules carry a certificate")
        .unitary
        .remove(0);
    let u_p_squared = cand
        .corner_certificate(&p.square(), tols)?
        .expect("spectral rules carry a certificate")
        .unitary
        .remove(0);
    let entries_hold = u_p.sub(&fixture.u_p.to_matrix()?)?.max_abs_entry() <= FIXTURE_ENTRY_TOL
        && u_p_squared.sub(&fixture.u_p_squared.to_matrix()?)?.max_abs_entry()
            <= FIXTURE_ENTRY_TOL;

    let nested = cand.apply(&p, &cand.apply(&p, &q, tols)?, tols)?;
    let flat = cand.apply(&cand.apply(&p, &p, tols)?, &q, tols)?;
    let gap = blocks_op_norm(&effects::blocks_sub(nested.blocks(), flat.blocks())?, tols);

    let qm = fixture.q_matrix.to_matrix()?;
    let nested_m = cand.apply_blocks(&p, &cand.apply_blocks(&p, std::slice::from_ref(&qm), tols)?, tols)?;
    let flat_m = cand.apply_blocks(&cand.apply(&p, &p, tols)?, std::slice::from_ref(&qm), tols)?;
    let gap_matrix = blocks_op_norm(&effects::blocks_sub(&nested_m, &flat_m)?, tols);

    let (observed_failures, observed_passes, undecided) =
        pattern_for(&cand, &fixture.name, tols)?;

    let gaps_hold = (gap - fixture.iteration_gap).abs() <= FIXTURE_GAP_TOL
        && (gap_matrix - fixture.iteration_gap_matrix).abs() <= FIXTURE_GAP_TOL;
    let pattern_holds = observed_failures == fixture.expected_failures
        && observed_passes == fixture.expected_passes
        && undecided.is_empty();

    let mut matrices = BTreeMap::new();
    matrices.insert("p".to_string(), single_block(&p));
    matrices.insert("q_effect".to_string(), single_block(&q));
    matrices.insert("q_matrix".to_string(), MatrixJson::from_matrix(&qm));
    matrices.insert("u_p".to_string(), MatrixJson::from_matrix(&u_p));
    matrices.insert("u_p_squared".to_string(), MatrixJson::from_matrix(&u_p_squared));
    matrices.insert("product_nested".to_string(), MatrixJson::from_matrix(&nested_m[0]));
    matrices.insert("product_flat".to_string(), MatrixJson::from_matrix(&flat_m[0]));
    let mut gaps = BTreeMap::new();
    gaps.insert("iteration_gap".to_string(), gap);
    gaps.insert("iteration_gap_matrix".to_string(), gap_matrix);

    Ok(CounterexampleReport {
        schema: SCHEMA,
        name: fixture.name,
        candidate: cand.name().to_string(),
        algebra: p.algebra().block_dims().to_vec(),
        matrices,
        gaps,
        expected_failures: fixture.expected_failures,
        expected_passes: fixture.expected_passes,
        observed_failures,
        observed_passes,
        undecided,
        fixture_matches: entries_hold && gaps_hold && pattern_holds,
        notes: vec![
            "the twist g flips sign only at the eigenvalue 4/9, so u_p = 1 while u_{p²} = diag(1, −1) at p = diag(1, 2/3)".to_string(),
            "squaring the conjugator and conjugating by the square then disagree on any q with off-diagonal mass".to_string(),
            "the two products differ by 2√2/3 in operator norm on the rank-one q above".to_string(),
        ],
    })
}

fn counterexample_ax4(tols: &Tolerances) -> Result<CounterexampleReport> {
    let fixture: Ax4Fixture = serde_json::from_str(AX4_FIXTURE).expect("bundled fixture parses");
    debug_assert_eq!(fixture.schema, SCHEMA);
    let cand = ax4_phase_candidate();
    let p = fixture.p.to_effect(tols)?;
    let e1 = Projection::new(fixture.e1.to_effect(tols)?, tols)?;
    let e2 = Projection::new(fixture.e2.to_effect(tols)?, tols)?;

    let forward = orthogonality_margin(&cand, &p, &e1, &e2, tols)?;
    let backward = orthogonality_margin(&cand, &p, &e2, &e1, tols)?;
    let violation = (-backward).max(0.0);

    let (observed_failures, observed_passes, undecided) =
        pattern_for(&cand, &fixture.name, tols)?;

    let margins_hold = forward >= -tols.positivity
        && (backward - fixture.backward_margin).abs() <= FIXTURE_GAP_TOL
        && (violation - fixture.violation).abs() <= FIXTURE_GAP_TOL;
    let pattern_holds = observed_failures == fixture.expected_failures
        && observed_passes == fixture.expected_passes
        && undecided.is_empty();

    let p_then_e1 = cand.apply(&p, e1.as_effect(), tols)?;
    let p_then_e2 = cand.apply(&p, e2.as_effect(), tols)?;
    let mut matrices = BTreeMap::new();
    matrices.insert("p".to_string(), single_block(&p));
    matrices.insert("e1".to_string(), single_block(e1.as_effect()));
    matrices.insert("e2".to_string(), single_block(e2.as_effect()));
    matrices.insert("p_then_e1".to_string(), single_block(&p_then_e1));
    matrices.insert("p_then_e2".to_string(), single_block(&p_then_e2));
    let mut gaps = BTreeMap::new();
    gaps.insert("forward_margin".to_string(), forward);
    gaps.insert("backward_margin".to_string(), backward);
    gaps.insert("violation".to_string(), violation);

    Ok(CounterexampleReport {
        schema: SCHEMA,
        name: fixture.name,
        candidate: cand.name().to_string(),
        algebra: p.algebra().block_dims().to_vec(),
        matrices,
        gaps,
        expected_failures: fixture.expected_failures,
        expected_passes: fixture.expected_passes,
        observed_failures,
        observed_passes,
        undecided,
        fixture_matches: margins_hold && pattern_holds,
        notes: vec![
            "the unimodular twist g(λ) = exp(iπ·ln λ/ln 2) rotates the corner without moving spectra, so decomposition and iteration survive".to_string(),
            "orthogonality is one-sided on the frozen pair: p ∗̃ e₁ ⊥ e₂ holds while p ∗̃ e₂ ⊥ e₁ fails by 0.476".to_string(),
            "the rotated projection e₂ aims along the twisted image of e₁, which is where the asymmetry concentrates".to_string(),
        ],
    })
}

// ---------------------------------------------------------------------------
// certification

/// What `certify <file>` reports about a parsed map. Every field is a
/// verdict at the run's tolerances; none of them gates the others.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateRecord {
    pub schema: u32,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub form: String,
    pub positive: bool,
    #[serde(rename = "2-positive")]
    pub two_positive: bool,
    #[serde(rename = "completely-positive")]
    pub completely_positive: bool,
    pub unital: bool,
    pub contractive: bool,
    pub multiplicative: bool,
    #[serde(rename = "projection-preserving")]
    pub projection_preserving: bool,
}

impl CertificateRecord {
    pub fn entries(&self) -> [(&'static str, bool); 7] {
        [
            ("positive", self.positive),
            ("2-positive", self.two_positive),
            ("completely-positive", self.completely_positive),
            ("unital", self.unital),
            ("contractive", self.contractive),
            ("multiplicative", self.multiplicative),
            ("projection-preserving", self.projection_preserving),
        ]
    }
}

/// Certify a parsed map. Sampled verdicts (positivity, multiplicativity,
/// projection preservation) draw from a stream derived from `seed`, so the
/// record for one file and seed is reproducible.
pub fn certify_map(map: &AnyMap, seed: u64, tols: &Tolerances) -> Result<CertificateRecord> {
    let lin = map.linearized();
    let form = match map {
        AnyMap::Kraus(_) => "kraus",
        AnyMap::Linear(_) => "superop",
    };
    let mut rng = derive_rng(seed, &["certify", form], 0);

    let positive = process::is_n_positive(&lin, 1, &mut rng, 48, tols)?;
    let two_positive = lin.two_positive_certificate(tols)?;
    let completely_positive = lin.is_completely_positive(tols)?;

    let one_image = lin.apply_one();
    let one = lin.target().one_blocks();
    let unital = blocks_distance(&one_image, &one, tols)? <= tols.unital;
    let contractive = blocks_op_norm(&one_image, tols) <= 1.0 + tols.contraction;

    let mut multiplicative = true;
    let mut projection_preserving = true;
    for _ in 0..24 {
        let a = sample::random_element_blocks(&mut rng, lin.source(), tols);
        let b = sample::random_element_blocks(&mut rng, lin.source(), tols);
        let mut ab = Vec::new();
        for (x, y) in a.iter().zip(&b) {
            ab.push(x.mul(y)?);
        }
        let lhs = lin.apply_blocks(&ab)?;
        let fa = lin.apply_blocks(&a)?;
        let fb = lin.apply_blocks(&b)?;
        let mut rhs = Vec::new();
        for (x, y) in fa.iter().zip(&fb) {
            rhs.push(x.mul(y)?);
        }
        if blocks_distance(&lhs, &rhs, tols)? > tols.residual {
            multiplicative = false;
            break;
        }
    }
    for _ in 0..24 {
        let e = sample::random_projection(&mut rng, lin.source(), tols);
        let image = lin.apply_blocks(e.blocks())?;
        let mut squared = Vec::new();
        for m in &image {
            squared.push(m.mul(m)?);
        }
        if blocks_distance(&squared, &image, tols)? > tols.projection {
            projection_preserving = false;
            break;
        }
    }

    Ok(CertificateRecord {
        schema: SCHEMA,
        source: lin.source().block_dims().to_vec(),
        target: lin.target().block_dims().to_vec(),
        form: form.to_string(),
        positive,
        two_positive,
        completely_positive,
        unital,
        contractive,
        multiplicative,
        projection_preserving,
    })
}
