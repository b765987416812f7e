//! Tolerance handling and small complex-number helpers.

use crate::{CMatrix, C64};

/// Relative tolerance with an absolute floor.
///
/// A quantity `r` measured against a magnitude `scale` passes when
/// `r <= max(rel * scale, abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64) -> Self {
        Tolerance {
            rel,
            abs: (rel * 1e-3).min(1e-12),
        }
    }

    /// Bound for a residual measured against `scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        (self.rel * scale).max(self.abs)
    }

    pub fn within(&self, residual: f64, scale: f64) -> bool {
        residual <= self.bound(scale)
    }
}

/// Largest entry magnitude of a matrix; 0 for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Entrywise maximum of `|a - b|`; matrices must have equal shape.
pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Formats a complex number for diagnostics, `re+imi` style.
pub fn fmt_c(z: C64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}

/// 1x1 matrix holding a scalar.
pub fn scalar(z: C64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}
