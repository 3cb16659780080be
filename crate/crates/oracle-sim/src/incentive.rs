//! Stackelberg pricing engine: payoff functions, best responses, the
//! feasible quality-weight interval, and the service-fee recommendation.
//!
//! The publisher (leader) posts a service fee P; a rational-malicious
//! executor (follower) picks a price deviation delta. Screening adopts a
//! submission deviating by delta with probability `e^{-delta}`, so
//!
//! ```text
//! U2(delta) = e^{-delta} * (P/n + K*delta/n)          follower
//! U1(P)     = a*e^{-delta} + (1-a)*e^{-delta}*(-P)    leader
//! ```
//!
//! Backward induction gives delta* = (K-P)/K and, inside the feasible
//! interval K/(1+K) <= a <= 2K/(1+2K),
//! P* = (K(a-1) + a)/(1-a).
//!
//! The user-facing knob is `u` in [0,1]; `alpha_effective` maps it onto
//! the feasible interval (the inverse of `normalize_alpha`, which maps the
//! interval onto [0,1]).

use crate::error::{Error, Result};

/// Parameter bundle for one pricing game.
#[derive(Debug, Clone, Copy)]
pub struct GameParams {
    /// Quantity of traded goods (K).
    pub quantity: f64,
    /// Number of aggregated submissions.
    pub committee: u32,
    /// Service fee (P).
    pub fee: f64,
    /// Price modification magnitude (delta).
    pub deviation: f64,
    /// Effective quality weight inside the feasible interval.
    pub alpha_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffPair {
    pub leader: f64,
    pub follower: f64,
}

/// Equilibrium point of the pricing game.
#[derive(Debug, Clone, Copy)]
pub struct Equilibrium {
    pub fee: f64,
    pub deviation: f64,
    pub payoffs: PayoffPair,
}

/// Improper profit from shifting the reported price: V = K|X - X'|.
pub fn improper_profit(quantity: f64, price: f64, modified_price: f64) -> f64 {
    quantity * (price - modified_price).abs()
}

/// Probability that a submission deviating by `deviation` survives
/// screening: e^{-deviation}.
pub fn screening_prob(deviation: f64) -> Result<f64> {
    if deviation < 0.0 {
        return Err(Error::input("deviation must be non-negative"));
    }
    Ok((-deviation).exp())
}

/// Executor's expected payoff: e^{-delta} * (P + K*delta) / n.
pub fn follower_payoff(g: &GameParams) -> Result<f64> {
    if g.committee == 0 {
        return Err(Error::input("committee size must be at least 1"));
    }
    let n = f64::from(g.committee);
    Ok((-g.deviation).exp() * (g.fee / n + g.quantity * g.deviation / n))
}

/// Publisher's expected payoff: a*e^{-delta} - (1-a)*e^{-delta}*P.
pub fn leader_payoff(g: &GameParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&g.alpha_eff) {
        return Err(Error::input("alpha_eff must lie in [0,1]"));
    }
    let h = (-g.deviation).exp();
    Ok(g.alpha_eff * h + (1.0 - g.alpha_eff) * h * (-g.fee))
}

/// Follower's optimal deviation for a posted fee: delta* = (K-P)/K.
/// Fees above K are outside the model's derivation; overpaying can only
/// push toward honesty, so delta* clamps to 0 with a warning.
pub fn follower_best_response(quantity: f64, fee: f64) -> f64 {
    if fee > quantity {
        log::warn!("fee {fee} exceeds quantity {quantity}; clamping deviation to 0");
        return 0.0;
    }
    (quantity - fee) / quantity
}

/// Maps the user-facing weight u in [0,1] onto the feasible interval:
/// alpha_eff = K(u + 1 + 2K) / ((1+K)(1+2K)).
pub fn alpha_effective(u: f64, quantity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::input("quality weight u must lie in [0,1]"));
    }
    if quantity <= 0.0 {
        return Err(Error::input("quantity must be positive"));
    }
    let k = quantity;
    Ok(k * (u + 1.0 + 2.0 * k) / ((1.0 + k) * (1.0 + 2.0 * k)))
}

/// Forward scaling map from the feasible interval onto [0,1]:
/// u = alpha(1+K)(1+2K)/K - (1+2K). Inverse of `alpha_effective`.
pub fn normalize_alpha(alpha: f64, quantity: f64) -> f64 {
    let k = quantity;
    alpha * (1.0 + k) * (1.0 + 2.0 * k) / k - (1.0 + 2.0 * k)
}

/// Recommended service fee P* = (K(a-1) + a)/(1-a) with a = alpha_effective(u,K).
pub fn recommend_fee(u: f64, quantity: f64) -> Result<f64> {
    let a = alpha_effective(u, quantity)?;
    Ok((quantity * (a - 1.0) + a) / (1.0 - a))
}

/// Compatibility form that feeds the forward scaling map straight into
/// the fee formula. For most inputs this lands outside [0, K]; the
/// second element of the return flags the violation (also logged).
pub fn recommend_fee_literal(alpha: f64, quantity: f64) -> (f64, bool) {
    let phi = normalize_alpha(alpha, quantity);
    let fee = (quantity * (phi - 1.0) + phi) / (1.0 - phi);
    let violates = !fee.is_finite() || fee < 0.0 || fee > quantity;
    if violates {
        log::warn!(
            "literal scaling-map composition gives fee {fee} outside [0, {quantity}] at alpha {alpha}"
        );
    }
    (fee, violates)
}

/// Composes the fee recommendation with the follower's best response and
/// evaluates both payoffs at that point.
pub fn equilibrium(u: f64, quantity: f64, committee: u32) -> Result<Equilibrium> {
    let fee = recommend_fee(u, quantity)?;
    let deviation = follower_best_response(quantity, fee);
    let g = GameParams {
        quantity,
        committee,
        fee,
        deviation,
        alpha_eff: alpha_effective(u, quantity)?,
    };
    Ok(Equilibrium {
        fee,
        deviation,
        payoffs: PayoffPair {
            leader: leader_payoff(&g)?,
            follower: follower_payoff(&g)?,
        },
    })
}
