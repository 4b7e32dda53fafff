//! Block-code parameters, codewords and Hamming geometry.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on `q^k` for codebook enumeration.
pub const CODEBOOK_ENUMERATION_BOUND: u128 = 1 << 21;

/// Parameters `[n, k, d]_q` of a linear block code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCodeParams", into = "RawCodeParams")]
pub struct CodeParams {
    n: usize,
    k: usize,
    d: usize,
    q: usize,
}

#[derive(Serialize, Deserialize)]
struct RawCodeParams {
    n: usize,
    k: usize,
    d: usize,
    q: usize,
}

impl TryFrom<RawCodeParams> for CodeParams {
    type Error = Error;
    fn try_from(r: RawCodeParams) -> Result<Self> {
        CodeParams::new(r.n, r.k, r.d, r.q)
    }
}

impl From<CodeParams> for RawCodeParams {
    fn from(c: CodeParams) -> Self {
        RawCodeParams { n: c.n, k: c.k, d: c.d, q: c.q }
    }
}

impl CodeParams {
    pub fn new(n: usize, k: usize, d: usize, q: usize) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::InvalidCode(format!("need 1 <= k < n, got n={n}, k={k}")));
        }
        if !(2..=256).contains(&q) {
            return Err(Error::InvalidCode(format!("need 2 <= q <= 256, got q={q}")));
        }
        if d < 1 || d > n {
            return Err(Error::InvalidCode(format!("need 1 <= d <= n, got d={d}, n={n}")));
        }
        if d > n - k + 1 {
            return Err(Error::InvalidCode(format!(
                "Singleton bound violated: d={d} > n-k+1={}",
                n - k + 1
            )));
        }
        if (q as f64).powi(k as i32) >= u64::MAX as f64 {
            return Err(Error::InvalidCode(format!("q^k overflows for q={q}, k={k}")));
        }
        Ok(Self { n, k, d, q })
    }

    /// Reed-Solomon parameters `[n, k, n-k+1]_q`.
    pub fn reed_solomon(n: usize, k: usize, q: usize) -> Result<Self> {
        let code = Self::new(n, k, n.saturating_sub(k) + 1, q)?;
        code.check_reed_solomon()?;
        Ok(code)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn q(&self) -> usize {
        self.q
    }

    /// `d_o = floor((d - 1) / 2)`.
    pub fn error_correction_radius(&self) -> usize {
        (self.d - 1) / 2
    }

    /// Number of encoded codewords, `tau = q^k`.
    pub fn tau(&self) -> u64 {
        (self.q as u64).pow(self.k as u32)
    }

    /// Bits needed to store one codeword: `n log2 q` (rounded up per symbol).
    pub fn bits(&self) -> usize {
        self.n * bits_per_symbol(self.q) as usize
    }

    pub fn is_mds(&self) -> bool {
        self.d == self.n - self.k + 1
    }

    pub fn check_reed_solomon(&self) -> Result<()> {
        if !self.is_mds() {
            return Err(Error::NotReedSolomon(format!("d={} != n-k+1={}", self.d, self.n - self.k + 1)));
        }
        if !self.q.is_power_of_two() || self.q < 4 {
            return Err(Error::NotReedSolomon(format!("q={} is not 2^m with m >= 2", self.q)));
        }
        if self.n >= self.q {
            return Err(Error::NotReedSolomon(format!("need n < q, got n={}, q={}", self.n, self.q)));
        }
        Ok(())
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]_{}", self.n, self.k, self.d, self.q)
    }
}

/// Free-function form of [`CodeParams::error_correction_radius`].
pub fn error_correction_radius(code: &CodeParams) -> usize {
    code.error_correction_radius()
}

/// A word of `n` symbols over an alphabet of size `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Codeword(Vec<u8>);

impl Codeword {
    /// Validated construction against the code's length and alphabet.
    pub fn new(symbols: Vec<u8>, code: &CodeParams) -> Result<Self> {
        if symbols.len() != code.n() {
            return Err(Error::LengthMismatch { expected: code.n(), actual: symbols.len() });
        }
        check_symbols(&symbols, code.q())?;
        Ok(Self(symbols))
    }

    pub fn from_symbols(symbols: Vec<u8>) -> Self {
        Self(symbols)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.0
    }

    /// Number of nonzero symbols.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&s| s != 0).count()
    }
}

impl From<Vec<u8>> for Codeword {
    fn from(v: Vec<u8>) -> Self {
        Self(v)
    }
}

pub(crate) fn check_symbols(symbols: &[u8], q: usize) -> Result<()> {
    match symbols.iter().position(|&s| s as usize >= q) {
        Some(position) => Err(Error::SymbolOutOfRange { position, symbol: symbols[position] as u32, q }),
        None => Ok(()),
    }
}

/// Number of positions in which `x` and `y` differ.
pub fn hamming(x: &Codeword, y: &Codeword) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    Ok(x.0.iter().zip(&y.0).filter(|(a, b)| a != b).count())
}

/// Outcome of bounded-distance decoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeResult {
    Decoded { codeword: Codeword, error_count: usize },
    Failure,
}

impl DecodeResult {
    pub fn codeword(&self) -> Option<&Codeword> {
        match self {
            DecodeResult::Decoded { codeword, .. } => Some(codeword),
            DecodeResult::Failure => None,
        }
    }

    pub fn error_count(&self) -> Option<usize> {
        match self {
            DecodeResult::Decoded { error_count, .. } => Some(*error_count),
            DecodeResult::Failure => None,
        }
    }
}

/// Scan every codeword and return the unique one within `radius` of `received`.
pub fn nearest_codeword_bruteforce(received: &Codeword, codebook: &[Codeword], radius: usize) -> Result<DecodeResult> {
    if codebook.is_empty() {
        return Err(Error::InvalidCode("empty codebook".into()));
    }
    let mut found: Option<(&Codeword, usize)> = None;
    for c in codebook {
        let h = hamming(received, c)?;
        if h <= radius {
            if found.is_some() {
                return Err(Error::AmbiguousCodebook { radius });
            }
            found = Some((c, h));
        }
    }
    Ok(match found {
        Some((c, h)) => DecodeResult::Decoded { codeword: c.clone(), error_count: h },
        None => DecodeResult::Failure,
    })
}

/// Counts `A_w` of codewords of each Hamming weight `w = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDistribution {
    counts: Vec<u64>,
}

impl WeightDistribution {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, w: usize) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Tally weights of an explicit codebook.
    pub fn from_codebook(codebook: &[Codeword]) -> Self {
        let n = codebook.first().map_or(0, Codeword::len);
        let mut counts = vec![0u64; n + 1];
        for c in codebook {
            counts[c.weight()] += 1;
        }
        Self { counts }
    }
}

/// Closed-form weight enumerator of an MDS code:
/// `A_w = C(n,w) sum_{j=0}^{w-d} (-1)^j C(w,j) (q^{w-d+1-j} - 1)` for `w >= d`.
pub fn mds_weight_distribution(code: &CodeParams) -> Result<WeightDistribution> {
    if !code.is_mds() {
        return Err(Error::NotMds { d: code.d(), singleton: code.n() - code.k() + 1 });
    }
    let (n, d, q) = (code.n(), code.d(), code.q() as i128);
    let mut counts = vec![0u64; n + 1];
    counts[0] = 1;
    for (w, slot) in counts.iter_mut().enumerate().skip(d) {
        let mut acc: i128 = 0;
        for j in 0..=(w - d) {
            let term = binomial(w, j) as i128 * (q.pow((w - d + 1 - j) as u32) - 1);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let a = binomial(n, w) as i128 * acc;
        *slot = u64::try_from(a).map_err(|_| Error::Invariant(format!("A_{w} = {a} out of range")))?;
    }
    Ok(WeightDistribution { counts })
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub(crate) fn bits_per_symbol(q: usize) -> u32 {
    usize::BITS - (q - 1).leading_zeros()
}

/// Words of `Sigma^n` packed into a `u64`, `b` bits per symbol, position 0 most significant.
///
/// Used by exhaustive scans where the Hamming distance has to be cheap.
#[derive(Debug, Clone, Copy)]
pub struct PackedSpace {
    n: usize,
    q: usize,
    bits: u32,
    low_mask: u64,
}

impl PackedSpace {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        let bits = bits_per_symbol(q);
        if bits as usize * n > 64 {
            return Err(Error::InvalidCode(format!("cannot pack n={n} symbols of {bits} bits")));
        }
        let low_mask = (0..n).fold(0u64, |m, i| m | 1u64 << (i as u32 * bits));
        Ok(Self { n, q, bits, low_mask })
    }

    pub fn pack(&self, w: &Codeword) -> u64 {
        w.symbols().iter().fold(0u64, |acc, &s| (acc << self.bits) | s as u64)
    }

    pub fn unpack(&self, mut p: u64) -> Codeword {
        let mask = (1u64 << self.bits) - 1;
        let mut v = vec![0u8; self.n];
        for slot in v.iter_mut().rev() {
            *slot = (p & mask) as u8;
            p >>= self.bits;
        }
        Codeword::from_symbols(v)
    }

    /// Packed form of the `index`-th word of `Sigma^n`; a bijection on `0..q^n`.
    #[inline]
    pub fn word_at(&self, mut index: u64) -> u64 {
        if self.q.is_power_of_two() {
            return index;
        }
        let mut out = 0u64;
        for i in 0..self.n {
            let s = index % self.q as u64;
            index /= self.q as u64;
            out |= s << (i as u32 * self.bits);
        }
        out
    }

    #[inline]
    pub fn distance(&self, a: u64, b: u64) -> u32 {
        let x = a ^ b;
        let mut folded = x;
        for s in 1..self.bits {
            folded |= x >> s;
        }
        (folded & self.low_mask).count_ones()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_matches_table_one() {
        let cases = [(7, 5, 8, 1), (7, 3, 8, 2), (11, 5, 16, 3), (11, 3, 16, 4), (15, 5, 16, 5), (15, 3, 16, 6)];
        for (n, k, q, d_o) in cases {
            let code = CodeParams::reed_solomon(n, k, q).unwrap();
            assert_eq!(error_correction_radius(&code), d_o, "{code}");
        }
        assert_eq!(CodeParams::new(3, 1, 1, 2).unwrap().error_correction_radius(), 0);
    }

    #[test]
    fn params_reject_invalid() {
        assert!(CodeParams::new(7, 7, 1, 8).is_err());
        assert!(CodeParams::new(7, 0, 1, 8).is_err());
        assert!(CodeParams::new(7, 3, 6, 8).is_err());
        assert!(CodeParams::new(7, 3, 5, 1).is_err());
        assert!(CodeParams::reed_solomon(8, 3, 8).is_err());
        assert!(matches!(CodeParams::new(7, 3, 4, 8).unwrap().check_reed_solomon(), Err(Error::NotReedSolomon(_))));
    }

    #[test]
    fn hamming_identity_and_maximal() {
        let x = Codeword::from_symbols(vec![1, 2, 3, 4, 5, 6, 7]);
        let y = Codeword::from_symbols(vec![0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(hamming(&x, &x).unwrap(), 0);
        assert_eq!(hamming(&x, &y).unwrap(), 7);
        assert!(matches!(
            hamming(&x, &Codeword::zero(3)),
            Err(Error::LengthMismatch { expected: 7, actual: 3 })
        ));
    }

    #[test]
    fn codeword_validation() {
        let code = CodeParams::reed_solomon(7, 3, 8).unwrap();
        assert!(Codeword::new(vec![0; 7], &code).is_ok());
        assert!(matches!(
            Codeword::new(vec![0, 0, 8, 0, 0, 0, 0], &code),
            Err(Error::SymbolOutOfRange { position: 2, symbol: 8, q: 8 })
        ));
        assert!(Codeword::new(vec![0; 6], &code).is_err());
    }

    #[test]
    fn mds_enumerator_small_cases() {
        let code = CodeParams::reed_solomon(7, 3, 8).unwrap();
        let wd = mds_weight_distribution(&code).unwrap();
        assert_eq!(wd.counts(), &[1, 0, 0, 0, 0, 147, 147, 217]);
        assert_eq!(wd.total(), code.tau());

        let code = CodeParams::reed_solomon(7, 5, 8).unwrap();
        let wd = mds_weight_distribution(&code).unwrap();
        assert_eq!(wd.get(1), 0);
        assert_eq!(wd.get(2), 0);
        assert_eq!(wd.total(), 32768);

        for (n, k, q) in [(11, 5, 16), (11, 3, 16), (15, 5, 16), (15, 3, 16)] {
            let code = CodeParams::reed_solomon(n, k, q).unwrap();
            assert_eq!(mds_weight_distribution(&code).unwrap().total(), code.tau());
        }
        let non_mds = CodeParams::new(7, 3, 4, 8).unwrap();
        assert!(matches!(mds_weight_distribution(&non_mds), Err(Error::NotMds { .. })));
    }

    #[test]
    fn bruteforce_decoder_edge_cases() {
        let book = vec![Codeword::from_symbols(vec![0, 0, 0]), Codeword::from_symbols(vec![1, 1, 1])];
        let r = nearest_codeword_bruteforce(&book[1], &book, 1).unwrap();
        assert_eq!(r, DecodeResult::Decoded { codeword: book[1].clone(), error_count: 0 });
        // distance 3 from both codewords over q=3
        let far = Codeword::from_symbols(vec![2, 2, 2]);
        assert_eq!(nearest_codeword_bruteforce(&far, &book, 1).unwrap(), DecodeResult::Failure);
        assert_eq!(
            nearest_codeword_bruteforce(&far, &book, 3),
            Err(Error::AmbiguousCodebook { radius: 3 })
        );
        assert!(nearest_codeword_bruteforce(&far, &[], 1).is_err());
    }

    #[test]
    fn packed_distance_agrees_with_naive() {
        for q in [3usize, 8, 16] {
            let space = PackedSpace::new(7, q).unwrap();
            let mut state = 12345u64;
            for _ in 0..500 {
                let mut draw = || {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    Codeword::from_symbols((0..7).map(|i| ((state >> (8 + 4 * i)) % q as u64) as u8).collect())
                };
                let (a, b) = (draw(), draw());
                assert_eq!(space.distance(space.pack(&a), space.pack(&b)) as usize, hamming(&a, &b).unwrap());
                assert_eq!(space.unpack(space.pack(&a)), a);
            }
        }
    }

    #[test]
    fn word_at_is_bijective() {
        let space = PackedSpace::new(2, 3).unwrap();
        let mut sorted: Vec<_> = (0..9).map(|i| space.unpack(space.word_at(i)).into_symbols()).collect();
        assert!(sorted.iter().flatten().all(|&s| s < 3));
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 9);
    }
}
