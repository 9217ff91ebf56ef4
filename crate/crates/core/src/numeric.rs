//! Exact and extended-range arithmetic shared by the oracle, the rank engine
//! and the simulator.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact nonnegative dyadic rational `mantissa · 2^exponent`. Every finite
/// double is one, and so is any product of doubles, which is what makes
/// probability ties decidable without a tolerance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigUint,
    exponent: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigUint::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mantissa: BigUint::one(),
            exponent: 0,
        }
    }

    /// Panics on negative or non-finite input.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite() && x >= 0.0, "dyadic from {x}");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Dyadic::normalized(BigUint::from(mant), exp)
    }

    fn normalized(mut mantissa: BigUint, mut exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Dyadic::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            mantissa >>= tz;
            exponent += tz as i64;
        }
        Dyadic { mantissa, exponent }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::normalized(&self.mantissa * &other.mantissa, self.exponent + other.exponent)
    }

    pub fn pow(&self, k: u32) -> Dyadic {
        if k == 0 {
            return Dyadic::one();
        }
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::normalized(self.mantissa.pow(k), self.exponent * k as i64)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        // Magnitude is in [2^(top-1), 2^top) with top = bits + exponent.
        let top_a = self.mantissa.bits() as i64 + self.exponent;
        let top_b = other.mantissa.bits() as i64 + other.exponent;
        if top_a != top_b {
            return top_a.cmp(&top_b);
        }
        let shift = self.exponent - other.exponent;
        if shift >= 0 {
            (&self.mantissa << shift as u64).cmp(&other.mantissa)
        } else {
            self.mantissa.cmp(&(&other.mantissa << (-shift) as u64))
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `log2` of a positive big integer, accurate to double precision.
pub fn log2_biguint(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits <= 64 {
        return value.to_u64().map(|v| (v as f64).log2()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (value >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// Running sum of positive terms given by their base-2 logarithms. The sum is
/// held as `value · 2^scale` with an integer `scale`, so rescaling is exact,
/// and `value` uses compensated (Neumaier) summation.
#[derive(Debug, Clone, Default)]
pub struct Log2Sum {
    scale: Option<i64>,
    sum: f64,
    compensation: f64,
}

impl Log2Sum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_log2(&mut self, log2_term: f64) {
        if log2_term == f64::NEG_INFINITY {
            return;
        }
        let target = log2_term.floor() as i64;
        let scale = match self.scale {
            None => {
                self.scale = Some(target);
                target
            }
            Some(s) if target > s + 512 => {
                let factor = (2f64).powi((s - target) as i32);
                self.sum *= factor;
                self.compensation *= factor;
                self.scale = Some(target);
                target
            }
            Some(s) => s,
        };
        self.add_scaled((log2_term - scale as f64).exp2());
    }

    /// Add a term already expressed in linear domain.
    pub fn add(&mut self, term: f64) {
        if term <= 0.0 {
            return;
        }
        self.add_log2(term.log2());
    }

    fn add_scaled(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Log2Sum) {
        if let Some(s) = other.scale {
            let total = other.sum + other.compensation;
            if total > 0.0 {
                self.add_log2(total.log2() + s as f64);
            }
        }
    }

    /// `log2` of the total; `-inf` when nothing positive was added.
    pub fn log2(&self) -> f64 {
        match self.scale {
            None => f64::NEG_INFINITY,
            Some(s) => (self.sum + self.compensation).log2() + s as f64,
        }
    }

    /// Linear total; may overflow to `inf` for very large sums.
    pub fn value(&self) -> f64 {
        match self.scale {
            None => 0.0,
            Some(s) => {
                let v = self.sum + self.compensation;
                if s.abs() < 1000 {
                    v * (2f64).powi(s as i32)
                } else {
                    self.log2().exp2()
                }
            }
        }
    }
}
