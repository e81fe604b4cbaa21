//! Choosing `p` from the number of competitive arms, and classifying gap
//! profiles into the arithmetic / large-group / small-group regimes.
//!
//! All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::env::GapVector;
use crate::error::{Error, Result};

/// An open interval `(lo, hi)`, or `(lo, hi]` when `hi_closed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            hi_closed: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && (x < self.hi || (self.hi_closed && x == self.hi))
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "({:.2}, {:.2}{close}", self.lo, self.hi)
    }
}

/// Which row of the `f_K` table applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FkCondition {
    /// `f_K <= log K`.
    Few,
    /// `log K < f_K < K / log K`.
    Intermediate,
    /// `f_K >= K / log K`.
    Many,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PAdvice {
    pub num_arms: usize,
    pub competitive: f64,
    pub condition: FkCondition,
    /// The range prescribed for `condition`: `(1, 2]`, the interpolated
    /// interval, or `(0, 1)`.
    pub recommended: Interval,
    /// `(1 - loglog K / log(K/f_K), 1 + loglog K / log f_K)` clipped to
    /// `(0, 2]`, whatever the row. This is the form tabulated for
    /// `f_K = K^gamma`.
    pub interpolated: Interval,
}

impl PAdvice {
    /// A single `p`: the midpoint of the recommended range.
    pub fn suggest(&self) -> f64 {
        self.recommended.midpoint()
    }
}

/// Suitable range of `p` for `K` arms with `f_K` competitive ones.
///
/// `competitive` may be fractional (e.g. `K^0.3`); it must lie in
/// `[1, K - 1]`, and `K >= 3`.
pub fn advise_p(num_arms: usize, competitive: f64) -> Result<PAdvice> {
    if num_arms < 3 {
        return Err(Error::OutOfRange(format!("K = {num_arms} (need K >= 3)")));
    }
    let k = num_arms as f64;
    if !(1.0..=k - 1.0).contains(&competitive) {
        return Err(Error::OutOfRange(format!(
            "f_K = {competitive} (need 1 <= f_K <= {})",
            num_arms - 1
        )));
    }
    let log_k = k.ln();
    let loglog = log_k.ln();
    let lo = 1.0 - loglog / (k / competitive).ln();
    // log f_K = 0 at f_K = 1 gives +inf, which the clip turns into 2.
    let hi = 1.0 + loglog / competitive.ln();
    let interpolated = Interval {
        lo: lo.max(0.0),
        hi: hi.min(2.0),
        hi_closed: hi >= 2.0,
    };

    let condition = if competitive <= log_k {
        FkCondition::Few
    } else if competitive >= k / log_k {
        FkCondition::Many
    } else {
        FkCondition::Intermediate
    };
    let recommended = match condition {
        FkCondition::Few => Interval {
            lo: 1.0,
            hi: 2.0,
            hi_closed: true,
        },
        FkCondition::Intermediate => Interval::open(lo, hi),
        FkCondition::Many => Interval::open(0.0, 1.0),
    };
    Ok(PAdvice {
        num_arms,
        competitive,
        condition,
        recommended,
        interpolated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// `Delta_i = (i - 1) Delta_0`.
    Arithmetic { delta0: f64 },
    LargeGroup,
    SmallGroup,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    /// `f_K`: suboptimal arms with `Delta_i / Delta_2 <= 1 + epsilon`.
    pub competitive: usize,
    pub epsilon: f64,
    pub regime: Regime,
}

/// Default competitiveness slack for [`classify_regime`].
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Classifies a gap profile.
///
/// Arithmetic progressions are detected first (relative tolerance 1e-9).
/// Otherwise `f_K >= K / log K` is a large group, `f_K <= log K` a small one,
/// and anything in between is custom.
pub fn classify_regime(gaps: &GapVector, epsilon: f64) -> Result<RegimeSpec> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::OutOfRange(format!("epsilon = {epsilon}")));
    }
    let sorted = gaps.sorted_checked()?;
    let k = sorted.len() as f64;
    let delta2 = sorted[1];
    let competitive = sorted[1..]
        .iter()
        .filter(|&&d| d / delta2 <= 1.0 + epsilon)
        .count();

    let arithmetic = sorted[1..].iter().enumerate().all(|(j, &d)| {
        let expect = (j + 1) as f64 * delta2;
        (d - expect).abs() <= 1e-9 * expect
    });
    let regime = if arithmetic && sorted.len() > 2 {
        Regime::Arithmetic { delta0: delta2 }
    } else if competitive as f64 >= k / k.ln() {
        Regime::LargeGroup
    } else if competitive as f64 <= k.ln() {
        Regime::SmallGroup
    } else {
        Regime::Custom
    };
    Ok(RegimeSpec {
        competitive,
        epsilon,
        regime,
    })
}
