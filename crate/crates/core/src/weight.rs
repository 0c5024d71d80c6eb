//! Exact edge weights.
//!
//! Weights are kept as arbitrary-precision rationals so that cut values and
//! crossing costs compare without rounding noise. Hot loops work on `f64`
//! copies.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with denominator `10^15`, used when input is not a
/// plain decimal.
pub fn from_f64(x: f64) -> Rat {
    if x == 0.0 {
        return Rat::zero();
    }
    let scale = 1_000_000_000_000_000i64;
    Rat::new(BigInt::from((x * scale as f64).round() as i128), BigInt::from(scale))
}

/// Parses `"0.375"`, `"1"`, `"3/8"`, `"1e-3"`. Returns `None` on garbage.
pub fn parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rat::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if exp.unsigned_abs() > 400 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    if neg {
        num = -num;
    }
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if shift >= 0 {
        Rat::from_integer(num * num_traits::pow(ten, shift as usize))
    } else {
        Rat::new(num, num_traits::pow(ten, (-shift) as usize))
    };
    Some(r)
}

/// Shortest exact text: terminating decimals are written as decimals, other
/// rationals as `p/q`.
pub fn format(r: &Rat) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut d = den.clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scaled = r * Rat::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places + 1);
    let (ip, fp) = digits.split_at(digits.len() - places);
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{ip}.{fp}")
}

/// Smallest `d` such that every weight times `d` is an integer, if it stays
/// below `limit`.
pub fn common_denominator<'a>(ws: impl Iterator<Item = &'a Rat>, limit: &BigInt) -> Option<BigInt> {
    let mut d = BigInt::one();
    for w in ws {
        d = d.lcm(w.denom());
        if &d > limit {
            return None;
        }
    }
    Some(d)
}

pub(crate) fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format(r))
}
