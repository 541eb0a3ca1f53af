//! Float helpers that work without `std`.

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn powf(x: f64, a: f64) -> f64 {
    libm::pow(x, a)
}

#[inline]
pub(crate) fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// `a <= b` up to a relative slack.
#[inline]
pub(crate) fn le_rel(a: f64, b: f64, rel: f64) -> bool {
    let scale = if abs(a) > abs(b) { abs(a) } else { abs(b) };
    a <= b + rel * scale
}
