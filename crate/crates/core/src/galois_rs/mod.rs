//! Finite fields, Reed-Solomon codes and Hamming geometry.

pub mod code;
pub mod codec;
pub mod gf;

pub use code::{
    error_correction_radius, hamming, mds_weight_distribution, nearest_codeword_bruteforce, CodeParams, Codeword,
    DecodeResult, PackedSpace, WeightDistribution, CODEBOOK_ENUMERATION_BOUND,
};
pub use codec::{enumerate_codebook, enumerate_codebook_default, rs_decode, rs_encode, ReedSolomon};
pub use gf::GaloisField;

/// Weight distribution from the MDS closed form when it applies, otherwise by enumerating the codebook.
pub fn weight_distribution(code: &CodeParams, codebook_bound: u128) -> crate::Result<WeightDistribution> {
    if code.is_mds() {
        mds_weight_distribution(code)
    } else {
        Ok(WeightDistribution::from_codebook(&enumerate_codebook(code, codebook_bound)?))
    }
}
