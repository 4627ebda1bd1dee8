//! Centralized numeric tolerances.
//!
//! Every threshold the library consults lives in one [`Tolerances`] record so
//! that a run's numeric policy is a single value that can be inspected,
//! reported, or overridden (the CLI maps `--tol name=value` onto
//! [`Tolerances::set`]). Fields are grouped by the layer that consumes them;
//! each default records the rationale for its magnitude.

use serde::Serialize;

/// Tolerance configuration shared by all numeric operations.
///
/// Relative thresholds (`*_rel`) are multiplied by a scale taken from the
/// operand (Frobenius norm, largest eigenvalue, ...) at the point of use;
/// the remaining fields are absolute residual bounds on quantities that the
/// callers normalize to order one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// Hermiticity gate: `‖a − a*‖_F ≤ hermitian_rel · max(1, ‖a‖_F)`.
    /// One hundred units above f64 round-off; honest inputs are exactly
    /// Hermitian or off by a few ulp from products.
    pub hermitian_rel: f64,
    /// Jacobi sweep convergence: off-diagonal Frobenius mass relative to the
    /// input's Frobenius norm. Near round-off; cyclic Jacobi converges
    /// quadratically so the last sweep clears this comfortably.
    pub eig_sweep_rel: f64,
    /// Eigendecomposition reconstruction bound:
    /// `‖VΛV* − a‖ ≤ eig_recon_rel · max(1, ‖a‖)`.
    pub eig_recon_rel: f64,
    /// Matrix square root residual: `‖sqrt(a)² − a‖ ≤ sqrt_residual_rel · ‖a‖`.
    pub sqrt_residual_rel: f64,
    /// Reject a "positive semidefinite" input whose spectrum dips below
    /// `−psd_reject_rel · ‖a‖`; negatives above that are treated as
    /// round-off and clamped to zero.
    pub psd_reject_rel: f64,
    /// Rank cut for pseudo-inverse and support projections, relative to the
    /// largest eigenvalue. Shared by `pinv_psd` and `ceil` so the two agree
    /// on the kept spectrum by construction.
    pub rank_rel: f64,
    /// Absolute floor under the rank cut, so matrices of tiny norm do not
    /// promote round-off noise into "rank".
    pub rank_abs: f64,
    /// Effect spectrum clamp: eigenvalues within this of `[0, 1]` are clamped
    /// onto the interval at construction; further out is rejected.
    pub effect_clamp: f64,
    /// Projection gate: `‖p² − p‖ ≤ projection`.
    pub projection: f64,
    /// Process contractivity gate: `‖f(1)‖ ≤ 1 + contraction`.
    pub contraction: f64,
    /// Unitality gate: `‖f(1) − 1‖ ≤ unital`.
    pub unital: f64,
    /// Factorization preconditions (`f(1) ≤ p`, `g(p) = g(1)`) are enforced
    /// at this tolerance before a mediator is attempted.
    pub precondition: f64,
    /// Twisted candidates must carry `|g(λ)| = 1` to within this on every
    /// spectrum they are applied to.
    pub unimodular: f64,
    /// Decision threshold for positivity tests inside checkers: a self-adjoint
    /// quantity counts as positive when its spectrum stays above
    /// `−positivity · max(1, ‖·‖)`. Also the slack allowed on derived
    /// operator inequalities.
    pub positivity: f64,
    /// Residual bound for equalities that hold by theorem (factorization
    /// identities, axiom residuals on conforming candidates).
    pub residual: f64,
    /// A reported violation must clear this margin before a checker calls an
    /// instance a genuine counterexample; between `residual` and this the
    /// verdict stays undecided.
    pub witness_margin: f64,
    /// Agreement bound between a fully certified candidate and the canonical
    /// sequential product.
    pub uniqueness_demo: f64,
    /// Residual bound for proportionality detection:
    /// `‖f − α·g‖ ≤ proportionality · max(‖f‖, ‖g‖)`.
    pub proportionality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian_rel: 1e-12,
            eig_sweep_rel: 1e-14,
            eig_recon_rel: 1e-10,
            sqrt_residual_rel: 1e-9,
            psd_reject_rel: 1e-8,
            rank_rel: 1e-10,
            rank_abs: 1e-14,
            effect_clamp: 1e-9,
            projection: 1e-9,
            contraction: 1e-9,
            unital: 1e-9,
            precondition: 1e-9,
            unimodular: 1e-9,
            positivity: 1e-8,
            residual: 1e-8,
            witness_margin: 1e-6,
            uniqueness_demo: 1e-7,
            proportionality: 1e-9,
        }
    }
}

/// A `--tol name=value` override named a field that does not exist.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown tolerance `{name}`")]
pub struct UnknownTolerance {
    pub name: String,
}

impl Tolerances {
    /// Set a field by its snake_case name; used by CLI `--tol` overrides.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), UnknownTolerance> {
        let slot = match name {
            "hermitian_rel" => &mut self.hermitian_rel,
            "eig_sweep_rel" => &mut self.eig_sweep_rel,
            "eig_recon_rel" => &mut self.eig_recon_rel,
            "sqrt_residual_rel" => &mut self.sqrt_residual_rel,
            "psd_reject_rel" => &mut self.psd_reject_rel,
            "rank_rel" => &mut self.rank_rel,
            "rank_abs" => &mut self.rank_abs,
            "effect_clamp" => &mut self.effect_clamp,
            "projection" => &mut self.projection,
            "contraction" => &mut self.contraction,
            "unital" => &mut self.unital,
            "precondition" => &mut self.precondition,
            "unimodular" => &mut self.unimodular,
            "positivity" => &mut self.positivity,
            "residual" => &mut self.residual,
            "witness_margin" => &mut self.witness_margin,
            "uniqueness_demo" => &mut self.uniqueness_demo,
            "proportionality" => &mut self.proportionality,
            _ => {
                return Err(UnknownTolerance { name: name.to_string() });
            }
        };
        *slot = value;
        Ok(())
    }

    /// Rank cut for a positive matrix whose largest eigenvalue is `lambda_max`:
    /// eigenvalues at or below the cut count as kernel.
    pub fn rank_cut(&self, lambda_max: f64) -> f64 {
        (self.rank_rel * lambda_max.max(0.0)).max(self.rank_abs)
    }
}
