//! Thin wrappers over `libm` so the rest of the crate reads like std code.

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub(crate) fn sin_deg(deg: f64) -> f64 {
    libm::sin(deg.to_radians())
}

pub(crate) fn cos_deg(deg: f64) -> f64 {
    libm::cos(deg.to_radians())
}

pub(crate) fn tan_deg(deg: f64) -> f64 {
    libm::tan(deg.to_radians())
}

pub(crate) fn acos_deg(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0)).to_degrees()
}

/// Compass bearing of the vector `(dx, dy)` in degrees, clockwise from +y, in [0, 360).
pub(crate) fn bearing_deg(dx: f64, dy: f64) -> f64 {
    wrap_deg(libm::atan2(dx, dy).to_degrees())
}

/// Wraps an angle into [0, 360).
pub(crate) fn wrap_deg(deg: f64) -> f64 {
    let w = deg - 360.0 * floor(deg / 360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Smallest absolute difference between two headings, in [0, 180].
pub(crate) fn heading_delta(a: f64, b: f64) -> f64 {
    let d = wrap_deg(b - a);
    if d > 180.0 {
        360.0 - d
    } else {
        d
    }
}
