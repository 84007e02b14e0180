//! Score arithmetic: CVSS v3.1 base weights and equations, with the four AI
//! metrics folded into the impact sub-score as a second multiplicative group.
//!
//! ```text
//! ISC_base = 1 - (1-C)(1-I)(1-A)
//! ISC_ai   = 1 - (1-DP)(1-MI)(1-AE)(1-DS)
//! ISC      = 1 - (1-ISC_base)(1 - coupling * ISC_ai)
//! ```
//!
//! With the AI group all-None the result is exactly the v3.1 base score.

use crate::num::ScoreFloat;

use super::environmental::EnvironmentalContext;
use super::score::ScoreValue;
use super::vector::{Impact, Scope, SeverityVector};

/// Default weight of the AI impact group relative to the CIA group.
pub const DEFAULT_AI_COUPLING: f64 = 0.95;

/// Ceiling applied to each environmental impact sub-score.
pub const ENVIRONMENTAL_ISC_CAP: f64 = 0.915;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Formula<T> {
    pub ai_coupling: T,
}

impl<T: ScoreFloat> Default for Formula<T> {
    fn default() -> Self {
        Self::new(T::lit(DEFAULT_AI_COUPLING))
    }
}

impl<T: ScoreFloat> Formula<T> {
    pub fn new(ai_coupling: T) -> Self {
        Self { ai_coupling }
    }

    pub fn exploitability(&self, v: &SeverityVector) -> T {
        T::lit(8.22)
            * T::lit(v.av.weight())
            * T::lit(v.ac.weight())
            * T::lit(v.pr.weight(v.scope))
            * T::lit(v.ui.weight())
    }

    pub fn base_isc(&self, v: &SeverityVector) -> T {
        combine(v.cia_metrics().iter().map(|m| T::lit(m.weight())))
    }

    pub fn ai_isc(&self, v: &SeverityVector) -> T {
        combine(v.ai_metrics().iter().map(|m| T::lit(m.weight())))
    }

    /// Unrounded score; zero whenever the impact sub-score is not positive.
    pub fn raw(&self, v: &SeverityVector) -> T {
        self.finish(v, self.base_isc(v), self.ai_isc(v))
    }

    /// Unrounded environmental score: overrides first, then requirement-weighted
    /// sub-scores capped at [`ENVIRONMENTAL_ISC_CAP`] or at the unweighted
    /// sub-score when that is already higher.
    pub fn raw_environmental(&self, v: &SeverityVector, env: &EnvironmentalContext) -> T {
        let v = env.overrides.overlay(v);
        let cap = T::lit(ENVIRONMENTAL_ISC_CAP);
        let weighted = |m: Impact, req: f64| T::lit(req) * T::lit(m.weight());
        let base = combine([
            weighted(v.c, env.cr.multiplier()),
            weighted(v.i, env.ir.multiplier()),
            weighted(v.a, env.ar.multiplier()),
        ])
        .min(cap.max(self.base_isc(&v)));
        let air = env.air.multiplier();
        let ai = combine(v.ai_metrics().map(|m| weighted(m, air))).min(cap.max(self.ai_isc(&v)));
        self.finish(&v, base, ai)
    }

    pub fn score(&self, v: &SeverityVector) -> ScoreValue {
        roundup(self.raw(v))
    }

    pub fn score_environmental(&self, v: &SeverityVector, env: &EnvironmentalContext) -> ScoreValue {
        roundup(self.raw_environmental(v, env))
    }

    fn finish(&self, v: &SeverityVector, base_isc: T, ai_isc: T) -> T {
        let one = T::one();
        let isc = one - (one - base_isc) * (one - self.ai_coupling * ai_isc);
        let impact = match v.scope {
            Scope::Unchanged => T::lit(6.42) * isc,
            Scope::Changed => {
                T::lit(7.52) * (isc - T::lit(0.029)) - T::lit(3.25) * (isc - T::lit(0.02)).powi(15)
            }
        };
        if impact <= T::zero() {
            return T::zero();
        }
        let ten = T::lit(10.0);
        let sum = impact + self.exploitability(v);
        match v.scope {
            Scope::Unchanged => sum.min(ten),
            Scope::Changed => (T::lit(1.08) * sum).min(ten),
        }
    }
}

/// `1 - prod(1 - w)` over the given weights.
fn combine<T: ScoreFloat>(weights: impl IntoIterator<Item = T>) -> T {
    let one = T::one();
    one - weights.into_iter().fold(one, |acc, w| acc * (one - w))
}

/// Smallest number of tenths whose value is at least `x`.
///
/// `x` is first scaled to an integer count of 1e-5 units so binary drift such
/// as `4.000000000001` does not bump the result to the next tenth.
pub fn roundup_tenths<T: ScoreFloat>(x: T) -> i64 {
    let scaled = (x * T::lit(100_000.0)).round().to_i64().unwrap_or(i64::MAX);
    if scaled % 10_000 == 0 {
        scaled / 10_000
    } else {
        scaled.div_euclid(10_000) + 1
    }
}

/// [`roundup_tenths`] clamped into the score range.
pub fn roundup<T: ScoreFloat>(x: T) -> ScoreValue {
    ScoreValue::from_tenths(roundup_tenths(x).clamp(0, 100) as u8).expect("clamped into range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::severity::vector::parse_vector;

    const ANCHOR: &str = "AIVSS:1.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:N/A:N/DP:N/MI:H/AE:N/DS:N";

    #[test]
    fn anchor_raw_value() {
        let v = parse_vector(ANCHOR).unwrap();
        let raw = Formula::<f64>::default().raw(&v);
        assert!((raw - 8.985036375).abs() < 1e-9, "raw = {raw}");
        assert_eq!(Formula::<f64>::default().score(&v).tenths(), 90);
    }

    #[test]
    fn f32_agrees_on_anchor() {
        let v = parse_vector(ANCHOR).unwrap();
        assert_eq!(Formula::<f32>::default().score(&v).tenths(), 90);
    }

    #[test]
    fn roundup_examples() {
        assert_eq!(roundup_tenths(4.0_f64), 40);
        assert_eq!(roundup_tenths(4.02_f64), 41);
        assert_eq!(roundup_tenths(4.000000000001_f64), 40);
        assert_eq!(roundup_tenths(0.0_f64), 0);
        assert_eq!(roundup_tenths(9.999_f64), 100);
    }

    #[test]
    fn zero_coupling_ignores_ai_group() {
        let v = parse_vector(ANCHOR).unwrap();
        let f = Formula::new(0.0_f64);
        assert_eq!(f.score(&v), f.score(&v.without_ai()));
    }
}
