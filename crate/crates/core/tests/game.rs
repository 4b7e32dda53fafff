use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use signguard_core::channel::{build_r, ChannelModel, RhoMethod};
use signguard_core::galois_rs::*;
use signguard_core::game::*;
use signguard_core::lp::{simplex_solve, LinearProgram};
use signguard_core::Error;

fn code735() -> CodeParams {
    CodeParams::reed_solomon(7, 3, 8).unwrap()
}

/// Full scan of 8^7 words against the [7,3,5]_8 codebook, shared by the tests below.
fn histograms735() -> &'static DistanceHistograms {
    static H: OnceLock<DistanceHistograms> = OnceLock::new();
    H.get_or_init(|| {
        let code = code735();
        distance_histograms(&code, &enumerate_codebook_default(&code).unwrap(), FULLSPACE_ENUMERATION_BOUND).unwrap()
    })
}

#[test]
fn false_alarm_row_matches_pairwise_enumeration() {
    let code = code735();
    let book = enumerate_codebook_default(&code).unwrap();
    for pe in [0.05, 0.2] {
        let ch = ChannelModel::for_code(&code, pe).unwrap();
        let rho = build_r(&code, &ch, RhoMethod::Analytic).unwrap();
        let row = false_alarm_row(&code, &rho, &SignPrior::Uniform, &mds_weight_distribution(&code).unwrap()).unwrap();
        let mut pairwise = [0.0f64; 3];
        for x in &book {
            for y in &book {
                let h = hamming(x, y).unwrap();
                for (j, p) in pairwise.iter_mut().enumerate() {
                    *p += rho.get(h, j) / book.len() as f64;
                }
            }
        }
        for j in 0..3 {
            assert!((row[j] - pairwise[j]).abs() <= 1e-10, "p_e={pe} j={j}: {} vs {}", row[j], pairwise[j]);
        }
        // a skewed prior over a linear code gives the same row
        let mut p = vec![0.0; 512];
        p[7] = 0.75;
        p[300] = 0.25;
        let skewed = false_alarm_row(&code, &rho, &SignPrior::Explicit(p), &mds_weight_distribution(&code).unwrap()).unwrap();
        assert_eq!(skewed, row);
    }
}

#[test]
fn exact_histograms_satisfy_necessary_conditions() {
    let code = code735();
    let hist = histograms735();
    assert_eq!(hist.words(), 8u64.pow(7));
    let wd = mds_weight_distribution(&code).unwrap();
    assert!(hist.classes.iter().any(|(h, m)| h == wd.counts() && *m == 512));
    for (h, _) in &hist.classes {
        assert_eq!(h.iter().sum::<u64>(), 512);
        let m = h.iter().position(|&v| v > 0).unwrap();
        assert!(m <= code.n() - code.k(), "covering radius exceeded: {h:?}");
        if m <= code.error_correction_radius() {
            assert_eq!(h[m], 1, "{h:?}");
            for r in (0..code.d() - m).filter(|&r| r != m) {
                assert_eq!(h[r], 0, "{h:?}");
            }
        }
    }
}

/// `delta` is a convex combination of the columns of its group of `Lambda`.
fn in_group_hull(lambda: &Lambda, delta: &[u64]) -> bool {
    let m = delta.iter().position(|&v| v > 0).unwrap();
    let group = lambda.groups().iter().find(|g| g.min_distance == m).unwrap();
    let rows = delta.len();
    let cols = group.width;
    // theta >= 0 with Lambda_g theta = delta and 1'theta = 1, as paired inequalities
    let mut a = DMatrix::zeros(2 * (rows + 1), cols);
    let mut b = DVector::zeros(2 * (rows + 1));
    for c in 0..cols {
        let col = lambda.column(group.start + c);
        for r in 0..rows {
            a[(r, c)] = col[r] as f64;
            a[(rows + 1 + r, c)] = -(col[r] as f64);
        }
        a[(rows, c)] = 1.0;
        a[(2 * rows + 1, c)] = -1.0;
    }
    for r in 0..rows {
        b[r] = delta[r] as f64;
        b[rows + 1 + r] = -(delta[r] as f64);
    }
    b[rows] = 1.0;
    b[2 * rows + 1] = -1.0;
    let lp = LinearProgram::new(DVector::zeros(cols), a, b).unwrap();
    match simplex_solve(&lp) {
        Ok(sol) => sol.primal_residual(&lp) <= 1e-6,
        Err(Error::Infeasible) => false,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn contiguous_histograms_are_representable() {
    let code = code735();
    let lambda = build_lambda(&code).unwrap();
    let mut checked = 0;
    for (h, _) in &histograms735().classes {
        let m = h.iter().position(|&v| v > 0).unwrap();
        let lo = code.d().saturating_sub(m).max(m);
        if (lo..=code.n()).all(|r| h[r] > 0) {
            assert!(in_group_hull(&lambda, h), "{h:?}");
            checked += 1;
        }
    }
    assert!(checked > 0);
    // a histogram with a gap in its free rows is outside the hull
    let mut gap = mds_weight_distribution(&code).unwrap().counts().to_vec();
    gap[6] += gap[5];
    gap[5] = 0;
    assert!(!in_group_hull(&lambda, &gap));
}

#[test]
fn exact_quotient_rewards_never_exceed_relaxed_rewards() {
    let code = code735();
    let w = GameWeights::reference_defaults(&code);
    for pe in [0.01, 0.05, 0.1, 0.2] {
        let ch = ChannelModel::for_code(&code, pe).unwrap();
        let rho = build_r(&code, &ch, RhoMethod::Analytic).unwrap();
        let xq = ExactQuotient::from_histograms(histograms735(), &rho, &w).unwrap();
        let s = reward_vector_s(&code, &rho, &w);
        assert_eq!(xq.kappa, histograms735().kappa());
        for class in &xq.representatives {
            assert!(class.reward <= s[class.min_distance()] + 1e-12);
        }
    }
}

#[test]
fn relaxed_game_matches_table_one_for_all_codes() {
    for (n, k, q, nu, mu) in [(7, 5, 8, 17, 4), (7, 3, 8, 21, 8), (11, 5, 16, 47, 16), (11, 3, 16, 47, 32), (15, 5, 16, 85, 64), (15, 3, 16, 81, 128)] {
        let code = CodeParams::reed_solomon(n, k, q).unwrap();
        let ch = ChannelModel::for_code(&code, 0.1).unwrap();
        let rho = build_r(&code, &ch, RhoMethod::Analytic).unwrap();
        let game = RelaxedGame::build(&code, &rho, &GameWeights::reference_defaults(&code), &SignPrior::Uniform, &mds_weight_distribution(&code).unwrap()).unwrap();
        assert_eq!((game.nu, game.mu), (nu, mu));
        assert_eq!(game.xi.shape(), (nu, mu));
        for c in 0..nu {
            assert_eq!(game.s_block.column(c).sum(), 1.0);
        }
        if game.shift > 0.0 {
            assert!(game.xi_plus.min() > 0.0);
        }
    }
}
