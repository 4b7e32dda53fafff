use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signguard_core::galois_rs::*;

fn small_codes() -> Vec<CodeParams> {
    vec![
        CodeParams::reed_solomon(7, 5, 8).unwrap(),
        CodeParams::reed_solomon(7, 3, 8).unwrap(),
        CodeParams::reed_solomon(5, 3, 8).unwrap(),
        CodeParams::reed_solomon(6, 2, 8).unwrap(),
        CodeParams::reed_solomon(3, 1, 4).unwrap(),
    ]
}

/// Random codeword with a random number of symbols (0..=n) replaced by different values.
fn noisy_word(book: &[Codeword], q: usize, rng: &mut ChaCha8Rng) -> Codeword {
    let mut w = book[rng.gen_range(0..book.len())].clone().into_symbols();
    let n = w.len();
    let flips = rng.gen_range(0..=n);
    let mut positions: Vec<usize> = (0..n).collect();
    for i in 0..flips {
        let j = rng.gen_range(i..n);
        positions.swap(i, j);
        let p = positions[i];
        w[p] = (w[p] as usize + rng.gen_range(1..q)) as u8 % q as u8;
    }
    Codeword::from_symbols(w)
}

#[test]
fn decoder_matches_bruteforce_on_random_words() {
    for code in small_codes() {
        let rs = ReedSolomon::new(code).unwrap();
        let book = rs.codebook(CODEBOOK_ENUMERATION_BOUND).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(code.n() as u64 * 100 + code.k() as u64);
        for _ in 0..10_000 {
            let r = noisy_word(&book, code.q(), &mut rng);
            let fast = rs.decode(&r).unwrap();
            let slow = nearest_codeword_bruteforce(&r, &book, code.error_correction_radius()).unwrap();
            assert_eq!(fast, slow, "{code} received {:?}", r.symbols());
        }
    }
}

#[test]
fn every_correctable_pattern_on_one_codeword_decodes() {
    // all error patterns of weight <= 2 on a fixed [7,3,5]_8 codeword
    let code = CodeParams::reed_solomon(7, 3, 8).unwrap();
    let rs = ReedSolomon::new(code).unwrap();
    let c = rs.encode(&[3, 0, 6]).unwrap();
    let mut checked = 0;
    for p1 in 0..7 {
        for p2 in p1..7 {
            for e1 in 1..8u8 {
                for e2 in 1..8u8 {
                    let mut r = c.clone().into_symbols();
                    r[p1] ^= e1;
                    if p2 != p1 {
                        r[p2] ^= e2;
                    } else if e2 > 1 {
                        continue;
                    }
                    let got = rs.decode(&Codeword::from_symbols(r)).unwrap();
                    let expected = if p1 == p2 { 1 } else { 2 };
                    assert_eq!(got, DecodeResult::Decoded { codeword: c.clone(), error_count: expected });
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 7 * 7 + 21 * 49);
}

#[test]
fn weight_distribution_of_735_by_enumeration() {
    let code = CodeParams::reed_solomon(7, 3, 8).unwrap();
    let book = enumerate_codebook_default(&code).unwrap();
    let mut counts = [0u64; 8];
    for c in &book {
        counts[c.symbols().iter().filter(|&&s| s != 0).count()] += 1;
    }
    assert_eq!(counts, [1, 0, 0, 0, 0, 147, 147, 217]);
    assert_eq!(mds_weight_distribution(&code).unwrap().counts(), &counts);
    assert_eq!(WeightDistribution::from_codebook(&book).counts(), &counts);
}

#[test]
fn closed_form_weights_match_enumeration() {
    for code in small_codes() {
        let book = enumerate_codebook_default(&code).unwrap();
        assert_eq!(mds_weight_distribution(&code).unwrap(), WeightDistribution::from_codebook(&book), "{code}");
    }
}

#[test]
fn minimum_distance_is_attained() {
    for code in small_codes() {
        let book = enumerate_codebook_default(&code).unwrap();
        let min = book.iter().filter(|c| c.weight() > 0).map(Codeword::weight).min().unwrap();
        assert_eq!(min, code.d(), "{code}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_laws_gf256(a in any::<u8>(), b in any::<u8>(), c in any::<u8>()) {
        let gf = GaloisField::new(256).unwrap();
        prop_assert_eq!(gf.mul(a, gf.add(b, c)), gf.add(gf.mul(a, b), gf.mul(a, c)));
        prop_assert_eq!(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)));
        prop_assert_eq!(gf.mul(a, b), gf.mul(b, a));
        if a != 0 {
            prop_assert_eq!(gf.mul(a, gf.inv(a)), 1);
            prop_assert_eq!(gf.div(gf.mul(a, b), a), b);
        }
    }

    #[test]
    fn codewords_decode_to_themselves(msg in proptest::collection::vec(0u8..16, 5)) {
        let code = CodeParams::reed_solomon(15, 5, 16).unwrap();
        let c = rs_encode(&msg, &code).unwrap();
        prop_assert_eq!(&c.symbols()[..5], &msg[..]);
        prop_assert_eq!(rs_decode(&c, &code).unwrap(), DecodeResult::Decoded { codeword: c.clone(), error_count: 0 });
    }

    #[test]
    fn up_to_radius_errors_are_corrected(
        msg in proptest::collection::vec(0u8..16, 3),
        errors in proptest::collection::btree_map(0usize..15, 1u8..16, 0..=6),
    ) {
        let code = CodeParams::reed_solomon(15, 3, 16).unwrap();
        let c = rs_encode(&msg, &code).unwrap();
        let mut r = c.clone().into_symbols();
        for (&p, &e) in &errors {
            r[p] ^= e;
        }
        let got = rs_decode(&Codeword::from_symbols(r), &code).unwrap();
        prop_assert_eq!(got, DecodeResult::Decoded { codeword: c, error_count: errors.len() });
    }

    #[test]
    fn hamming_is_a_metric(x in proptest::collection::vec(0u8..8, 7), y in proptest::collection::vec(0u8..8, 7), z in proptest::collection::vec(0u8..8, 7)) {
        let (x, y, z) = (Codeword::from_symbols(x), Codeword::from_symbols(y), Codeword::from_symbols(z));
        let d = |a: &Codeword, b: &Codeword| hamming(a, b).unwrap();
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
        prop_assert_eq!(d(&x, &x), 0);
    }
}
