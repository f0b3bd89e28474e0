//! `f64` elementary functions usable without `std`.

use num_traits::Float;

pub fn powf(x: f64, y: f64) -> f64 {
    Float::powf(x, y)
}

pub fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}

#[cfg(test)]
pub fn exp(x: f64) -> f64 {
    Float::exp(x)
}

pub fn ln(x: f64) -> f64 {
    Float::ln(x)
}

pub fn sin(x: f64) -> f64 {
    Float::sin(x)
}

#[cfg(test)]
pub fn cos(x: f64) -> f64 {
    Float::cos(x)
}

pub fn floor(x: f64) -> f64 {
    Float::floor(x)
}

pub fn round(x: f64) -> f64 {
    Float::round(x)
}
