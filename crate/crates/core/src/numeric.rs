//! Small numerical helpers shared across modules.

use std::cmp::Ordering;

/// Neumaier compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Compensated arithmetic mean. Returns NaN for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// A real number stored as sign and natural log of its magnitude, so that
/// products over thousands of factors neither underflow nor overflow.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SignedLog {
    /// -1, 0 or +1.
    pub sign: i8,
    /// ln |x|; `-inf` when `sign == 0`.
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn product<I: IntoIterator<Item = f64>>(factors: I) -> Self {
        let mut sign = 1i8;
        let mut logs = Vec::new();
        for f in factors {
            if f == 0.0 {
                return Self::ZERO;
            }
            if f < 0.0 {
                sign = -sign;
            }
            logs.push(f.abs().ln());
        }
        SignedLog {
            sign,
            ln_abs: compensated_sum(logs),
        }
    }

    /// Converts back to `f64`; may overflow to infinity or underflow to zero.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.ln_abs.exp(),
        }
    }

    /// `self - other`, computed without leaving the log domain.
    pub fn minus(self, other: SignedLog) -> SignedLog {
        if other.sign == 0 {
            return self;
        }
        if self.sign == 0 {
            return SignedLog {
                sign: -other.sign,
                ln_abs: other.ln_abs,
            };
        }
        let (big, small, big_is_self) = if self.ln_abs >= other.ln_abs {
            (self, other, true)
        } else {
            (other, self, false)
        };
        // |big| (1 -/+ exp(small - big)) with the sign of the larger term.
        let d = small.ln_abs - big.ln_abs;
        let ln_factor = if big.sign == small.sign {
            let f = -d.exp_m1();
            if f == 0.0 {
                return Self::ZERO;
            }
            f.ln()
        } else {
            d.exp().ln_1p()
        };
        let big_sign = if big_is_self { big.sign } else { -big.sign };
        SignedLog {
            sign: big_sign,
            ln_abs: big.ln_abs + ln_factor,
        }
    }

    pub fn abs(self) -> SignedLog {
        SignedLog {
            sign: self.sign.abs(),
            ln_abs: self.ln_abs,
        }
    }
}

/// Total order on `f64` treating NaN as largest.
pub fn cmp_f64(a: &f64, b: &f64) -> Ordering {
    a.partial_cmp(b).unwrap_or_else(|| a.is_nan().cmp(&b.is_nan()))
}
