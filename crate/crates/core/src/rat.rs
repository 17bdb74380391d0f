//! Exact rational scalars.
//!
//! All polytope geometry runs over `BigRational`; floats appear only when
//! values are handed to the numeric layers (solver, operator kernels).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in rational literal {0:?}")]
    ZeroDenominator(String),
}

/// Parses a base-10 rational written as `p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseRatError::Empty);
    }
    let (num, den) = match t.split_once('/') {
        None => (t, "1"),
        Some((n, d)) => (n.trim(), d.trim()),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| ParseRatError::Malformed(s.to_string()))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| ParseRatError::Malformed(s.to_string()))?;
    if d.is_zero() {
        return Err(ParseRatError::ZeroDenominator(s.to_string()));
    }
    Ok(Rat::new(n, d))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Canonical `p/q` rendering (`p` when the denominator is one).
pub fn rat_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering with `sig` significant digits, round half away from
/// zero. Plain notation while the exponent is moderate, otherwise `dEe`.
pub fn decimal_string(x: &Rat, sig: usize) -> String {
    assert!(sig > 0);
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let n = x.numer().abs();
    let d = x.denom().clone();
    let ten = BigInt::from(10);

    // mag = floor(log10(n/d)), by scaling comparisons only.
    let mut mag: i64 = 0;
    let mut lo = n.clone();
    let mut hi = d.clone();
    while lo < hi {
        lo *= &ten;
        mag -= 1;
    }
    while lo >= &hi * &ten {
        hi *= &ten;
        mag += 1;
    }

    // Round n/d * 10^(sig-1-mag) to an integer of sig digits.
    let shift = sig as i64 - 1 - mag;
    let (mut num, mut den) = (n, d);
    if shift >= 0 {
        num *= ten.pow(shift as u32);
    } else {
        den *= ten.pow((-shift) as u32);
    }
    let (q, r) = (num.clone() / &den, num % &den);
    let mut digits = if &r * 2 >= den { q + 1 } else { q }.to_string();
    if digits.len() > sig {
        // carried over (e.g. 999.. -> 1000..): drop the trailing zero
        digits.truncate(sig);
        mag += 1;
    }

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if mag >= 0 && (mag as usize) < sig + 4 {
        let ip = (mag as usize + 1).min(digits.len());
        out.push_str(&digits[..ip]);
        for _ in digits.len()..(mag as usize + 1) {
            out.push('0');
        }
        let frac = digits[ip..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else if mag < 0 && mag >= -7 {
        out.push_str("0.");
        for _ in 0..(-mag - 1) {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
    } else {
        let rest = digits[1..].trim_end_matches('0');
        out.push_str(&digits[..1]);
        if !rest.is_empty() {
            out.push('.');
            out.push_str(rest);
        }
        out.push('e');
        out.push_str(&mag.to_string());
    }
    out
}
