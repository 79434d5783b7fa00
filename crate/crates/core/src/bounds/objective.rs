use super::BoundVariant;
use crate::dual::WeightTable;
use crate::numerics::series::{DEFAULT_HARD_CAP, DEFAULT_REL_TOL};
use crate::Result;

/// The bound objective at one `q`, with the dual mean it induces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    /// Objective in nats; `0` when the mean constraint fails.
    pub value: f64,
    /// The unconstrained objective value.
    pub raw: f64,
    pub mu: f64,
    pub feasible: bool,
}

/// Evaluates the objective of `variant` at `q`.
///
/// `delta` and `epsilon` are only used by the deletion variants.
pub fn bound_objective(
    variant: BoundVariant,
    table: &mut WeightTable,
    q: f64,
    delta: f64,
    epsilon: f64,
) -> Result<ObjectiveValue> {
    let p = table.p();
    let d = 1.0 - p;
    let m = table.moments(q, DEFAULT_REL_TOL, DEFAULT_HARD_CAP)?;
    let log_q = libm::log(q);
    let (raw, mu, threshold) = match variant {
        BoundVariant::StickyExact => {
            let mu = libm::exp(m.log_first_moment - m.log_weight_sum);
            ((m.log_weight_sum - mu * log_q) / (d * mu), mu, 1.0 / d)
        }
        BoundVariant::DuplicationExact => {
            let mu = libm::exp(m.log_first_moment - m.log_weight_sum);
            (
                (1.0 + p) * (m.log_weight_sum - mu * log_q) / mu,
                mu,
                1.0 + p,
            )
        }
        _ => {
            let log_n = crate::numerics::log_add_exp(libm::log(delta), m.log_weight_sum);
            let mu = libm::exp(m.log_first_moment - log_n);
            let line = -epsilon - d * libm::log(delta) + log_n - mu * log_q;
            (p * line / (d * (1.0 + mu)), mu, p / d)
        }
    };
    let feasible = mu >= threshold;
    Ok(ObjectiveValue {
        value: if feasible { raw } else { 0.0 },
        raw,
        mu,
        feasible,
    })
}
