//! Arithmetic in GF(2^m) through exp/log tables.

use crate::error::{Error, Result};

/// Primitive polynomials indexed by m, bit i holding the coefficient of x^i.
///
/// m = 3: x^3 + x + 1, m = 4: x^4 + x + 1, m = 8: x^8 + x^4 + x^3 + x^2 + 1.
const PRIMITIVE_POLYS: [u32; 9] = [0, 0, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10001001, 0b100011101];

/// A binary extension field with generator alpha = x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    m: u32,
    order: usize,
    // exp is doubled so products of logs need no reduction
    exp: Vec<u8>,
    log: Vec<u8>,
}

impl GaloisField {
    /// Field with `q` elements; `q` must be 2^m for 2 <= m <= 8.
    pub fn new(q: usize) -> Result<Self> {
        if !q.is_power_of_two() || !(4..=256).contains(&q) {
            return Err(Error::UnsupportedField(q));
        }
        let m = q.trailing_zeros();
        let poly = PRIMITIVE_POLYS[m as usize];
        let mut exp = vec![0u8; 2 * q];
        let mut log = vec![0u8; q];
        let mut x: u32 = 1;
        for (i, e) in exp.iter_mut().enumerate().take(q - 1) {
            *e = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & (q as u32) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::Invariant(format!("polynomial {poly:#b} is not primitive")));
        }
        for i in q - 1..2 * q {
            exp[i] = exp[i - (q - 1)];
        }
        Ok(Self { m, order: q, exp, log })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        PRIMITIVE_POLYS[self.m as usize]
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "zero has no inverse");
        self.exp[(self.order - 1) - self.log[a as usize] as usize]
    }

    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        self.mul(a, self.inv(b))
    }

    /// alpha^e for any integer exponent.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> u8 {
        let period = (self.order - 1) as i64;
        self.exp[e.rem_euclid(period) as usize]
    }

    #[inline]
    pub fn log(&self, a: u8) -> Option<usize> {
        (a != 0).then(|| self.log[a as usize] as usize)
    }

    /// Evaluate a polynomial given highest-degree coefficient first.
    pub fn poly_eval(&self, poly: &[u8], x: u8) -> u8 {
        poly.iter().fold(0u8, |acc, &c| self.mul(acc, x) ^ c)
    }
}
