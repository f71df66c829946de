//! Number formatting: 12 significant digits, or exact hex with `--raw`.

use qfg_core::C64;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` with 12 significant digits in the shortest of fixed or exponent
/// notation, trailing zeros removed.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = e.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Bit pattern of `x` as `0x` followed by 16 hex digits.
pub fn raw(x: f64) -> String {
    format!("0x{:016x}", x.to_bits())
}

pub fn real(x: f64, raw_mode: bool) -> String {
    if raw_mode {
        raw(x)
    } else {
        sig(x)
    }
}

pub fn complex(z: C64, raw_mode: bool) -> String {
    format!("{} {}", real(z.re, raw_mode), real(z.im, raw_mode))
}

/// `x` rounded to 12 significant digits.
pub fn round(x: f64) -> f64 {
    sig(x).parse().unwrap_or(x)
}
