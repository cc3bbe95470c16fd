//! Real-axis gamma kernel: log-gamma with sign, Pochhammer symbols, the
//! generalized Pochhammer symbol `(γ)_{qn}`, and `Δ(m; l)` parameter arrays.
//!
//! Gamma ratios are carried as [`SignedLog`] so that products like
//! `Γ(γ+qn) / Γ(ηn+β)` stay representable far past the point where the
//! individual factors overflow.

use std::f64::consts::PI;
use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `ln(2π)/2`
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

const LN2_HI: f64 = 0.693_147_180_559_945_3;
const LN2_LO: f64 = 2.319_046_813_846_299_6e-17;

/// Below this the argument is shifted up before the asymptotic series is used.
const STIRLING_MIN: f64 = 15.0;

/// `B_{2k} / (2k (2k-1))` for k = 1..7.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// `(n-1)!` for n = 1..=23; every entry is exact in binary64.
const FACTORIAL: [f64; 23] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362_880.0,
    3_628_800.0,
    39_916_800.0,
    479_001_600.0,
    6_227_020_800.0,
    87_178_291_200.0,
    1_307_674_368_000.0,
    20_922_789_888_000.0,
    355_687_428_096_000.0,
    6_402_373_705_728_000.0,
    121_645_100_408_832_000.0,
    2_432_902_008_176_640_000.0,
    51_090_942_171_709_440_000.0,
    1_124_000_727_777_607_680_000.0,
];

/// A real number stored as `sign · exp(log_abs)`.
///
/// `sign == 0` marks an exact zero, in which case `log_abs` is meaningless
/// (it is kept at `-inf`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLog {
    pub log_abs: f64,
    pub sign: i8,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog {
        log_abs: 0.0,
        sign: 1,
    };
    pub const ZERO: SignedLog = SignedLog {
        log_abs: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn new(log_abs: f64, sign: i8) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            SignedLog {
                log_abs,
                sign: sign.signum(),
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                log_abs: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn recip(self) -> Self {
        if self.sign == 0 {
            SignedLog {
                log_abs: f64::INFINITY,
                sign: 1,
            }
        } else {
            SignedLog {
                log_abs: -self.log_abs,
                sign: self.sign,
            }
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.sign == 0 || rhs.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            log_abs: self.log_abs + rhs.log_abs,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, rhs: SignedLog) -> SignedLog {
        self * rhs.recip()
    }
}

/// The array `{ l/m, (l+1)/m, …, (l+m-1)/m }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaArray {
    pub m: usize,
    pub l: f64,
    pub entries: Vec<f64>,
}

pub fn delta_array(m: usize, l: f64) -> Result<DeltaArray> {
    if m < 1 {
        return Err(domain("delta array needs m >= 1"));
    }
    let mf = m as f64;
    let entries = (0..m).map(|r| (l + r as f64) / mf).collect();
    Ok(DeltaArray { m, l, entries })
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `sin(πx)` with the argument reduced exactly, so values near integers keep
/// their relative accuracy.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    let (r, s) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let v = if r <= 0.25 {
        (PI * r).sin()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).cos()
    } else {
        (PI * (1.0 - r)).sin()
    };
    s * v
}

/// `ln x` for x > 0, returned as a double-double pair (hi, lo).
fn ln_split(x: f64) -> (f64, f64) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    // normal numbers only; callers pass x >= 15
    let m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    let e = exp as f64;
    let ln_m = m.ln();
    let hi = e * LN2_HI;
    let lo = e.mul_add(LN2_HI, -hi) + e * LN2_LO;
    let s = hi + ln_m;
    let err = (hi - (s - (s - hi))) + (ln_m - (s - hi));
    (s, err + lo)
}

fn ln_gamma_stirling(x: f64) -> f64 {
    // (x - 1/2)(ln x - 1) - 1/2, with the product formed exactly
    let (lh, ll) = ln_split(x);
    let c = x - 0.5;
    let lm1 = lh - 1.0;
    let lm1_lo = ll + ((lh - lm1) - 1.0);
    let p = c * lm1;
    let p_lo = c.mul_add(lm1, -p) + c * lm1_lo;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for &b in STIRLING.iter().rev() {
        series = series * inv2 + b;
    }
    series *= inv;
    p + (p_lo + (HALF_LN_2PI - 0.5 + series))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x <= FACTORIAL.len() as f64 && x == x.floor() {
        return FACTORIAL[x as usize - 1].ln();
    }
    if x >= STIRLING_MIN {
        return ln_gamma_stirling(x);
    }
    let shift = (STIRLING_MIN - x).ceil() as u32;
    let mut prod = 1.0;
    for k in 0..shift {
        prod *= x + k as f64;
    }
    ln_gamma_stirling(x + shift as f64) - prod.ln()
}

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
///
/// Negative arguments go through the reflection formula. Nonpositive integers
/// are poles and return [`Error::Pole`].
pub fn log_gamma(x: f64) -> Result<SignedLog> {
    if !x.is_finite() {
        return Err(domain(format!("log_gamma of non-finite {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        return Ok(SignedLog {
            log_abs: ln_gamma_positive(x),
            sign: 1,
        });
    }
    // Γ(x) Γ(1-x) = π / sin(πx), and Γ(1-x) > 0 here
    let s = sin_pi(x);
    let log_abs = PI.ln() - s.abs().ln() - ln_gamma_positive(1.0 - x);
    Ok(SignedLog {
        log_abs,
        sign: if s > 0.0 { 1 } else { -1 },
    })
}

/// `Γ(x)` as a plain double (overflows to infinity past x ≈ 171.6).
pub fn gamma(x: f64) -> Result<f64> {
    if x > 0.0 && x <= FACTORIAL.len() as f64 && x == x.floor() {
        return Ok(FACTORIAL[x as usize - 1]);
    }
    log_gamma(x).map(SignedLog::to_f64)
}

/// `Π Γ(upper) / Π Γ(lower)`.
pub fn gamma_ratio(upper: &[f64], lower: &[f64]) -> Result<SignedLog> {
    let mut acc = SignedLog::ONE;
    for &a in upper {
        acc = acc * log_gamma(a)?;
    }
    for &b in lower {
        acc = acc / log_gamma(b)?;
    }
    Ok(acc)
}

const POCHHAMMER_DIRECT_MAX: u64 = 32;

fn pochhammer_product(l: f64, n: u64) -> SignedLog {
    let mut log_acc = 0.0;
    let mut prod = 1.0_f64;
    for k in 0..n {
        let f = l + k as f64;
        if f == 0.0 {
            return SignedLog::ZERO;
        }
        prod *= f;
        let a = prod.abs();
        if !(1e-280..=1e280).contains(&a) {
            log_acc += a.ln();
            prod = prod.signum();
        }
    }
    SignedLog {
        log_abs: log_acc + prod.abs().ln(),
        sign: if prod > 0.0 { 1 } else { -1 },
    }
}

/// Rising factorial `(l)_n = l (l+1) … (l+n-1)`.
///
/// Direct product up to n = 32; beyond that `Γ(l+n)/Γ(l)`, falling back to
/// the product when either argument is a gamma pole.
pub fn pochhammer(l: f64, n: u64) -> SignedLog {
    if n == 0 {
        return SignedLog::ONE;
    }
    if n <= POCHHAMMER_DIRECT_MAX {
        return pochhammer_product(l, n);
    }
    match (log_gamma(l + n as f64), log_gamma(l)) {
        (Ok(num), Ok(den)) => num / den,
        _ => pochhammer_product(l, n),
    }
}

/// Generalized Pochhammer symbol `(γ)_{qn} = Γ(γ + qn) / Γ(γ)`.
pub fn gen_pochhammer(gamma_base: f64, q: f64, n: u64) -> Result<SignedLog> {
    if !(gamma_base > 0.0) || !(q > 0.0) {
        return Err(domain(format!(
            "generalized Pochhammer needs γ > 0 and q > 0 (got γ = {gamma_base}, q = {q})"
        )));
    }
    if n == 0 {
        return Ok(SignedLog::ONE);
    }
    Ok(log_gamma(gamma_base + q * n as f64)? / log_gamma(gamma_base)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn log_gamma_small_values() {
        let g1 = log_gamma(1.0).unwrap();
        assert_eq!(g1.sign, 1);
        assert_eq!(g1.log_abs, 0.0);

        let half = log_gamma(0.5).unwrap();
        assert!((half.log_abs - 0.572_364_942_924_700_1).abs() < 1e-15);

        let five = log_gamma(5.0).unwrap();
        assert!((five.log_abs - 24f64.ln()).abs() < 1e-15);
        assert!((five.log_abs - 3.178_053_830_347_945_7).abs() < 1e-14);
    }

    #[test]
    fn reflection_signs() {
        // Γ(-0.5) = -2√π, Γ(-1.5) = 4√π/3
        let a = log_gamma(-0.5).unwrap();
        assert_eq!(a.sign, -1);
        assert!(rel(a.to_f64(), -2.0 * PI.sqrt()) < 1e-14);
        let b = log_gamma(-1.5).unwrap();
        assert_eq!(b.sign, 1);
        assert!(rel(b.to_f64(), 4.0 * PI.sqrt() / 3.0) < 1e-14);
    }

    #[test]
    fn poles_rejected() {
        for x in [0.0, -1.0, -2.0, -17.0] {
            assert_eq!(log_gamma(x), Err(Error::Pole(x)));
        }
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(12.3, 0), SignedLog::ONE);
        assert!(rel(pochhammer(3.0, 4).to_f64(), 360.0) < 1e-15);
        assert!(rel(pochhammer(0.5, 2).to_f64(), 0.75) < 1e-15);
        // crosses zero
        assert!(pochhammer(-2.0, 5).is_zero());
        // sign of (-2.5)(-1.5)(-0.5) = -1.875
        assert!(rel(pochhammer(-2.5, 3).to_f64(), -1.875) < 1e-15);
    }

    #[test]
    fn pochhammer_large_n_uses_gamma_ratio() {
        // (1)_40 = 40!
        let v = pochhammer(1.0, 40);
        let expected: f64 = (1..=40).map(|k| (k as f64).ln()).sum();
        assert!((v.log_abs - expected).abs() < 1e-12);
        // pole in the fast path falls back to the product: (-50)_{60} = 0
        assert!(pochhammer(-50.0, 60).is_zero());
    }

    #[test]
    fn gen_pochhammer_examples() {
        assert!(rel(gen_pochhammer(2.0, 1.0, 3).unwrap().to_f64(), 24.0) < 1e-13);
        assert!(rel(gen_pochhammer(1.0, 2.0, 1).unwrap().to_f64(), 2.0) < 1e-13);
        assert!(rel(gen_pochhammer(1.5, 0.5, 2).unwrap().to_f64(), 1.5) < 1e-13);
        assert!(gen_pochhammer(0.0, 1.0, 2).is_err());
        assert!(gen_pochhammer(1.0, -1.0, 2).is_err());
    }

    #[test]
    fn delta_array_examples() {
        assert_eq!(delta_array(2, 3.0).unwrap().entries, vec![1.5, 2.0]);
        assert_eq!(delta_array(1, 0.7).unwrap().entries, vec![0.7]);
        let d = delta_array(3, 1.0).unwrap().entries;
        assert!((d[0] - 1.0 / 3.0).abs() < 1e-16);
        assert!((d[1] - 2.0 / 3.0).abs() < 1e-16);
        assert_eq!(d[2], 1.0);
        assert!(delta_array(0, 1.0).is_err());
    }

    #[test]
    fn signed_log_arithmetic() {
        let a = SignedLog::from_f64(-3.0);
        let b = SignedLog::from_f64(0.5);
        assert!(rel((a * b).to_f64(), -1.5) < 1e-15);
        assert!(rel((a / b).to_f64(), -6.0) < 1e-15);
        assert!((a * SignedLog::ZERO).is_zero());
    }

    #[test]
    fn sin_pi_exact_at_integers() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-2.0), 0.0);
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-0.5) + 1.0).abs() < 1e-16);
    }

    // ln Γ(x) at 40 digits (mpmath), x taken as the exact binary64 value
    const LN_GAMMA_REF: [(f64, f64); 21] = [
        (0.1, 2.252712651734205902006),
        (0.37, 0.8769468194848793023385),
        (0.5, 0.5723649429247000870717),
        (0.999, 0.0005780385328913802381689),
        (1.5, -0.1207822376352452223455),
        (2.25, 0.1248717148923965943024),
        (3.7, 1.4280723266653881292),
        (7.3, 7.147892523022248692104),
        (9.99, 12.77931521435019336023),
        (14.5, 23.86276584168908490619),
        (15.0, 25.19122118273868150009),
        (15.2, 25.72746298876557509202),
        (23.5, 50.03349410501915216626),
        (31.7, 77.05864770136280356683),
        (50.25, 145.5418715963321179664),
        (77.7, 259.2604368975979850583),
        (99.5, 356.8353828236130744693),
        (123.4, 469.3360974421905857943),
        (150.9, 604.5187425868792461965),
        (169.9, 700.9240078752710447189),
        (170.0, 701.4372638087370853465),
    ];

    #[test]
    fn log_gamma_matches_high_precision_reference() {
        // absolute error in ln Γ is the relative error of Γ
        for (x, expected) in LN_GAMMA_REF {
            let got = log_gamma(x).unwrap().log_abs;
            assert!((got - expected).abs() <= 1e-13, "x = {x}: {got} vs {expected}");
        }
    }

    #[test]
    fn gamma_recurrence() {
        let mut x = 0.1;
        while x < 50.0 {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(rel(lhs, rhs) <= 1e-12, "x = {x}");
            x += 0.173;
        }
    }
}
