//! Angle parsing and reduction.
//!
//! Accepted text forms: plain radians (`0.785`, `-1e-3`), degrees with a
//! `deg` suffix (`22.5deg`), and multiples or fractions of pi (`pi`, `-pi`,
//! `pi/2`, `3pi/4`, `-3*pi/4`).

use std::f64::consts::{PI, TAU};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse angle `{0}`")]
pub struct AngleParseError(pub String);

/// Reduces to `[0, 2π)`.
pub fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces to `[0, π)`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Distance between two axis orientations, which are defined modulo π.
pub fn axis_distance(a: f64, b: f64) -> f64 {
    let d = wrap_pi(a - b);
    d.min(PI - d)
}

fn plain_number(s: &str) -> Option<f64> {
    // reject things f64::from_str accepts that are not numbers here
    if s.is_empty() || s.eq_ignore_ascii_case("nan") || s.to_ascii_lowercase().contains("inf") {
        return None;
    }
    s.parse::<f64>().ok()
}

/// Parses an angle to radians.
pub fn parse_angle(text: &str) -> Result<f64, AngleParseError> {
    let err = || AngleParseError(text.to_string());
    let s = text.trim();
    if let Some(deg) = s.strip_suffix("deg") {
        return plain_number(deg.trim()).map(f64::to_radians).ok_or_else(err);
    }
    if let Some(pos) = s.find("pi") {
        let (coef, rest) = s.split_at(pos);
        let rest = &rest[2..];
        let coef = coef.trim().trim_end_matches('*').trim();
        let k = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => plain_number(c).ok_or_else(err)?,
        };
        let denom = match rest.trim() {
            "" => 1.0,
            r => {
                let d = r.strip_prefix('/').ok_or_else(err)?;
                plain_number(d.trim()).filter(|d| *d != 0.0).ok_or_else(err)?
            }
        };
        return Ok(k * PI / denom);
    }
    plain_number(s).ok_or_else(err)
}
