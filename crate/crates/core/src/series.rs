//! Truncated power series in one complex variable.
//!
//! Used as an independent computation route for Taylor data: the basis
//! cross-oracle expands the eigenfunction edge factors as series in `t`,
//! and the `tau` round-trip tests expand rational functions `num/den`.

use crate::C64;

/// Power series truncated after degree `order`; coefficient of `t^k` is
/// `coeffs[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<C64>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![C64::new(0.0, 0.0); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Series::zero(order);
        s.coeffs[0] = C64::new(1.0, 0.0);
        s
    }

    /// Series of a polynomial, truncated or zero-padded to `order`.
    pub fn from_poly(poly: &[C64], order: usize) -> Self {
        let mut s = Series::zero(order);
        for (k, c) in poly.iter().enumerate().take(order + 1) {
            s.coeffs[k] = *c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn add(&self, other: &Series) -> Series {
        assert_eq!(self.order(), other.order());
        Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Series) -> Series {
        let order = self.order();
        assert_eq!(order, other.order());
        let mut out = Series::zero(order);
        for i in 0..=order {
            if self.coeffs[i].norm() == 0.0 {
                continue;
            }
            for j in 0..=order - i {
                out.coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Series {
        let a0 = self.coeffs[0];
        assert!(
            a0.norm() > 0.0,
            "series inverse requires nonzero constant term"
        );
        let order = self.order();
        let mut out = Series::zero(order);
        out.coeffs[0] = C64::new(1.0, 0.0) / a0;
        for k in 1..=order {
            let mut acc = C64::new(0.0, 0.0);
            for i in 1..=k {
                acc += self.coeffs[i] * out.coeffs[k - i];
            }
            out.coeffs[k] = -acc / a0;
        }
        out
    }

    pub fn div(&self, other: &Series) -> Series {
        self.mul(&other.inverse())
    }
}

/// Taylor coefficients of `num(t) / den(t)` up to degree `order`;
/// requires `den(0) != 0`.
pub fn rational_taylor(num: &[C64], den: &[C64], order: usize) -> Vec<C64> {
    let n = Series::from_poly(num, order);
    let d = Series::from_poly(den, order);
    n.div(&d).coeffs.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn geometric_series() {
        // 1 / (1 - 0.3 t) = sum (0.3 t)^n
        let coeffs = rational_taylor(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(-0.3, 0.0)], 6);
        for (k, got) in coeffs.iter().enumerate() {
            let want = 0.3f64.powi(k as i32);
            assert!((got - c(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn mul_then_div_roundtrip() {
        let a = Series::from_poly(&[c(2.0, 0.0), c(-1.0, 0.5), c(0.25, 0.0)], 8);
        let b = Series::from_poly(&[c(1.0, 0.0), c(0.7, -0.2)], 8);
        let prod = a.mul(&b);
        let back = prod.div(&b);
        for k in 0..=8 {
            assert!((back.coeff(k) - a.coeff(k)).norm() < 1e-13);
        }
    }
}
