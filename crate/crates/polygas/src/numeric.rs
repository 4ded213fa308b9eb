//! Exact rational carrier plus the few controlled exits into floating point.
//!
//! Identities and inequalities are decided on `Rational` values; a logarithm
//! (or a decimal rendering) is taken once, at the end, on a fully reduced
//! ratio, so floating error never feeds back into an exact comparison.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// n! as a big integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Shorthand for small rational literals.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `num/den`, denominator always present.
pub fn ratio_str(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

// Scales |num|/den into [1/2, 2) with a 62-bit quotient so the final f64
// conversion is exact up to one rounding.
fn mantissa_exponent(num: &BigInt, den: &BigInt) -> (f64, i64) {
    let t = num.bits() as i64 - den.bits() as i64;
    let shift = 62usize;
    let scaled: BigInt = if t >= 0 {
        (num << shift) / (den << t as usize)
    } else {
        (num << (shift + (-t) as usize)) / den
    };
    let m = scaled.to_f64().expect("62-bit quotient fits f64");
    (m / (1u64 << shift) as f64, t)
}

/// Nearest-enough f64 for a rational of any size (error ~1 ulp).
pub fn rational_to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let (sign, num) = match q.numer().sign() {
        Sign::Minus => (-1.0, -q.numer()),
        _ => (1.0, q.numer().clone()),
    };
    let (m, t) = mantissa_exponent(&num, q.denom());
    sign * m * (t as f64).exp2()
}

/// ln of a strictly positive rational, computed from one scaled quotient to
/// avoid cancellation between large numerator and denominator logs.
pub fn ln_rational(q: &Rational) -> f64 {
    assert!(q.is_positive(), "ln argument must be positive");
    let d = q - Rational::one();
    // Near one the quotient path would round the deviation away; ln1p on the
    // exactly computed difference keeps full relative precision.
    if d.abs() < ratio(1, 4) {
        return rational_to_f64(&d).ln_1p();
    }
    let (m, t) = mantissa_exponent(q.numer(), q.denom());
    m.ln() + t as f64 * std::f64::consts::LN_2
}

/// ln(a/b) for positive rationals.
pub fn ln_ratio(a: &Rational, b: &Rational) -> f64 {
    ln_rational(&(a / b))
}

/// Parses `p/q`, `p`, or a leading-sign variant into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(Rational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(Rational::from_integer(num))
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents). Used to snap optimizer output onto an
/// exactly re-checkable point.
pub fn snap_to_rational(x: f64, max_den: u64) -> Rational {
    assert!(x.is_finite());
    let negative = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let limit = BigInt::from(max_den);
    for _ in 0..64 {
        let a = x.floor();
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > limit {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    let q = Rational::new(p1, q1.max(BigInt::one()));
    if negative {
        -q
    } else {
        q
    }
}

/// 12-significant-digit decimal rendering, positional when the exponent is
/// moderate, scientific otherwise. Deterministic for golden files.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let formatted = format!("{:.11e}", x);
    let (mantissa, exp) = formatted
        .split_once('e')
        .expect("scientific format always has an exponent");
    let exp: i32 = exp.parse().expect("valid exponent");
    if !(-4..=14).contains(&exp) {
        return formatted;
    }
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);
    let sign = if neg { "-" } else { "" };
    let body = if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("0.{zeros}{digits}")
    } else {
        let point = exp as usize + 1;
        if point >= digits.len() {
            format!("{}{}", digits, "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    };
    format!("{sign}{body}")
}

/// `num/den ~ decimal` rendering used throughout reports.
pub fn ratio_with_decimal(q: &Rational) -> String {
    format!("{} ~ {}", ratio_str(q), sig12(rational_to_f64(q)))
}
