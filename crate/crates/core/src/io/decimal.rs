//! Exact unit conversion at the text boundary.
//!
//! Multiplying an `f64` by a power of ten and printing it does not round-trip:
//! `1.7e-8 * 1e9` is `16.999999999999996`. These helpers shift the decimal
//! point of the shortest round-trip representation instead, so a value written
//! in nm and parsed back into meters is bit-identical to the original.

/// Plain decimal text of `x · 10^pow10`, using the shortest digits of `x`.
pub fn format_shifted(x: f64, pow10: i32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:e}");
    let (mantissa, exp) = sci.split_once('e').expect("`{:e}` always contains an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    // value = 0.digits × 10^point
    let point = exp + 1 + pow10;
    let n = digits.len() as i32;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point >= n {
        format!("{}{}", digits, "0".repeat((point - n) as usize))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

/// Inverse of [`format_shifted`]: parses `text` and divides by `10^pow10` exactly.
pub fn parse_shifted(text: &str, pow10: i32) -> Result<f64, std::num::ParseFloatError> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        if !v.is_finite() {
            return Ok(v);
        }
    }
    let (base, exp) = match t.split_once(['e', 'E']) {
        Some((b, e)) => match e.parse::<i32>() {
            Ok(e) => (b, e),
            Err(_) => return t.parse::<f64>(),
        },
        None => (t, 0),
    };
    format!("{base}e{}", exp - pow10).parse::<f64>()
}
