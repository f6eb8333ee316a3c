//! Small glue over `astro-float`.

use astro_float::{BigFloat, Sign};

pub(crate) use astro_float::RoundingMode;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Nearest `f64` (up to one ulp; only the leading mantissa word is used).
pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((mantissa, _, sign, exponent, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let Some(&top) = mantissa.last() else {
        return 0.0;
    };
    // value = top / 2^64 * 2^exponent
    let magnitude = ldexp(top as f64, exponent as i64 - 64);
    match sign {
        Sign::Neg => -magnitude,
        Sign::Pos => magnitude,
    }
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}
