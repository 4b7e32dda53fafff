//! Systematic Reed-Solomon encoding and bounded-distance decoding.
//!
//! Codeword position `p` carries the coefficient of `x^(n-1-p)`, so the
//! message occupies positions `0..k` verbatim and the parity follows. The
//! generator has roots `alpha^1 ..= alpha^(n-k)`.

use super::code::{check_symbols, hamming, CodeParams, Codeword, DecodeResult, CODEBOOK_ENUMERATION_BOUND};
use super::gf::GaloisField;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ReedSolomon {
    code: CodeParams,
    gf: GaloisField,
    /// Monic generator, highest degree first.
    generator: Vec<u8>,
}

impl ReedSolomon {
    pub fn new(code: CodeParams) -> Result<Self> {
        code.check_reed_solomon()?;
        let gf = GaloisField::new(code.q())?;
        let parity = code.n() - code.k();
        let mut generator = vec![1u8];
        for i in 1..=parity {
            // multiply by (x + alpha^i)
            let root = gf.alpha_pow(i as i64);
            let mut next = vec![0u8; generator.len() + 1];
            for (j, &g) in generator.iter().enumerate() {
                next[j] ^= g;
                next[j + 1] ^= gf.mul(g, root);
            }
            generator = next;
        }
        Ok(Self { code, gf, generator })
    }

    pub fn code(&self) -> &CodeParams {
        &self.code
    }

    pub fn field(&self) -> &GaloisField {
        &self.gf
    }

    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    pub fn encode(&self, message: &[u8]) -> Result<Codeword> {
        let (n, k) = (self.code.n(), self.code.k());
        if message.len() != k {
            return Err(Error::LengthMismatch { expected: k, actual: message.len() });
        }
        check_symbols(message, self.code.q())?;
        let parity_len = n - k;
        let mut parity = vec![0u8; parity_len];
        for &s in message {
            let feedback = s ^ parity[0];
            parity.rotate_left(1);
            parity[parity_len - 1] = 0;
            if feedback != 0 {
                for (p, &g) in parity.iter_mut().zip(&self.generator[1..]) {
                    *p ^= self.gf.mul(feedback, g);
                }
            }
        }
        let mut symbols = Vec::with_capacity(n);
        symbols.extend_from_slice(message);
        symbols.extend_from_slice(&parity);
        Ok(Codeword::from_symbols(symbols))
    }

    /// Syndromes `S_j = r(alpha^j)`, `j = 1..=n-k`.
    pub fn syndromes(&self, received: &Codeword) -> Vec<u8> {
        (1..=self.code.n() - self.code.k())
            .map(|j| self.gf.poly_eval(received.symbols(), self.gf.alpha_pow(j as i64)))
            .collect()
    }

    /// Bounded-distance decoding: Berlekamp-Massey, Chien search, Forney.
    pub fn decode(&self, received: &Codeword) -> Result<DecodeResult> {
        let n = self.code.n();
        if received.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: received.len() });
        }
        check_symbols(received.symbols(), self.code.q())?;
        let radius = self.code.error_correction_radius();
        let syndromes = self.syndromes(received);
        if syndromes.iter().all(|&s| s == 0) {
            return Ok(DecodeResult::Decoded { codeword: received.clone(), error_count: 0 });
        }

        let locator = self.berlekamp_massey(&syndromes);
        let errors = locator.len() - 1;
        if errors > radius {
            return Ok(DecodeResult::Failure);
        }

        let gf = &self.gf;
        let positions: Vec<usize> = (0..n)
            .filter(|&p| {
                let x_inv = gf.alpha_pow(-((n - 1 - p) as i64));
                eval_low_first(gf, &locator, x_inv) == 0
            })
            .collect();
        if positions.len() != errors {
            return Ok(DecodeResult::Failure);
        }

        // Omega(x) = S(x) Lambda(x) mod x^(n-k)
        let two_t = syndromes.len();
        let mut omega = vec![0u8; two_t];
        for (i, &l) in locator.iter().enumerate() {
            for (j, &s) in syndromes.iter().enumerate() {
                if i + j < two_t {
                    omega[i + j] ^= gf.mul(l, s);
                }
            }
        }
        let derivative: Vec<u8> = locator
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();

        let mut corrected = received.clone().into_symbols();
        for &p in &positions {
            let x_inv = gf.alpha_pow(-((n - 1 - p) as i64));
            let denom = eval_low_first(gf, &derivative, x_inv);
            if denom == 0 {
                return Ok(DecodeResult::Failure);
            }
            let magnitude = gf.div(eval_low_first(gf, &omega, x_inv), denom);
            corrected[p] ^= magnitude;
        }
        let corrected = Codeword::from_symbols(corrected);
        if self.syndromes(&corrected).iter().any(|&s| s != 0) {
            return Ok(DecodeResult::Failure);
        }
        let error_count = hamming(received, &corrected)?;
        if error_count > radius {
            return Ok(DecodeResult::Failure);
        }
        Ok(DecodeResult::Decoded { codeword: corrected, error_count })
    }

    /// Shortest LFSR for the syndrome sequence, lowest degree first, trimmed to its length.
    fn berlekamp_massey(&self, syndromes: &[u8]) -> Vec<u8> {
        let gf = &self.gf;
        let mut c = vec![0u8; syndromes.len() + 1];
        let mut b = vec![0u8; syndromes.len() + 1];
        c[0] = 1;
        b[0] = 1;
        let (mut l, mut shift, mut last_disc) = (0usize, 1usize, 1u8);
        for i in 0..syndromes.len() {
            let mut disc = syndromes[i];
            for j in 1..=l {
                disc ^= gf.mul(c[j], syndromes[i - j]);
            }
            if disc == 0 {
                shift += 1;
                continue;
            }
            let coef = gf.div(disc, last_disc);
            let prev = c.clone();
            for j in 0..b.len() - shift {
                c[j + shift] ^= gf.mul(coef, b[j]);
            }
            if 2 * l <= i {
                l = i + 1 - l;
                b = prev;
                last_disc = disc;
                shift = 1;
            } else {
                shift += 1;
            }
        }
        c.truncate(l + 1);
        c
    }

    /// All `q^k` codewords, messages in lexicographic order.
    pub fn codebook(&self, bound: u128) -> Result<Vec<Codeword>> {
        let size = (self.code.q() as u128).pow(self.code.k() as u32);
        if size > bound {
            return Err(Error::BoundExceeded { size, bound });
        }
        let (k, q) = (self.code.k(), self.code.q());
        let mut message = vec![0u8; k];
        let mut out = Vec::with_capacity(size as usize);
        for _ in 0..size {
            out.push(self.encode(&message)?);
            for slot in message.iter_mut().rev() {
                *slot += 1;
                if (*slot as usize) < q {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(out)
    }
}

fn eval_low_first(gf: &GaloisField, poly: &[u8], x: u8) -> u8 {
    poly.iter().rev().fold(0u8, |acc, &c| gf.mul(acc, x) ^ c)
}

pub fn rs_encode(message: &[u8], code: &CodeParams) -> Result<Codeword> {
    ReedSolomon::new(*code)?.encode(message)
}

pub fn rs_decode(received: &Codeword, code: &CodeParams) -> Result<DecodeResult> {
    ReedSolomon::new(*code)?.decode(received)
}

/// Every codeword of the Reed-Solomon code with parameters `code`.
pub fn enumerate_codebook(code: &CodeParams, bound: u128) -> Result<Vec<Codeword>> {
    ReedSolomon::new(*code)?.codebook(bound)
}

/// [`enumerate_codebook`] under the default bound.
pub fn enumerate_codebook_default(code: &CodeParams) -> Result<Vec<Codeword>> {
    enumerate_codebook(code, CODEBOOK_ENUMERATION_BOUND)
}
