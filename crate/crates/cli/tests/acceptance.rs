//! One line per acceptance criterion: `PASS|FAIL <id> <name> (<runtime>): <detail>`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use signguard_core::channel::{build_r, decode_failure_prob, rho_mc_row, ChannelModel};
use signguard_core::evaluate::ReferenceTables;
use signguard_core::evaluate::{
    exact_best_response, reproduce_from_grid, reproduce_tables, simulate_no_attack, solve_reference_grid, Sweep, TableId,
};
use signguard_core::galois_rs::{
    enumerate_codebook_default, nearest_codeword_bruteforce, CodeParams, Codeword, DecodeResult, ReedSolomon, WeightDistribution,
};
use signguard_core::game::{exact_quotient, GameWeights};
use signguard_core::lp::saddle_check;
use signguard_core::{RhoMethod, SolvedInstance};

const MC_TRIALS: u64 = 100_000;
const MC_SIGMAS: f64 = 4.0;
const ROW_SUM_TOLERANCE: f64 = 1e-12;
const LP_TOLERANCE: f64 = 1e-6;
const CODEC_TRIALS: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion(id: u32, name: &str, limit: Duration, failures: &mut Vec<u32>, body: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = out.pass && in_time;
    let timing = if in_time { String::new() } else { format!("; exceeded runtime limit {limit:?}") };
    println!("{} {id} {name} ({:.2?}): {}{timing}", if pass { "PASS" } else { "FAIL" }, elapsed, out.detail);
    if !pass {
        failures.push(id);
    }
}

fn reference_codes() -> Vec<(String, CodeParams)> {
    let refs = ReferenceTables::get();
    refs.codes.iter().map(|c| (c.name.clone(), c.params().unwrap())).collect()
}

/// `|observed - expected|` within `k` binomial sd of the expected rate, plus one count.
fn within_sigmas(observed: f64, expected: f64, trials: u64) -> bool {
    let sd = (expected * (1.0 - expected) / trials as f64).sqrt();
    (observed - expected).abs() <= MC_SIGMAS * sd + 1.0 / trials as f64
}

fn table_one() -> Outcome {
    let report = reproduce_tables(TableId::I, &Sweep::default()).unwrap();
    let bad: Vec<String> = report.cells.iter().filter(|c| !c.pass).map(|c| format!("{} {}", c.code, c.column)).collect();
    outcome(report.passed, format!("{} exact cells, mismatches {bad:?}", report.cells.len()))
}

fn table_two() -> Outcome {
    let report = reproduce_tables(TableId::II, &Sweep::default()).unwrap();
    let worst = report.cells.iter().map(|c| c.abs_dev).fold(0.0, f64::max);
    let refs = ReferenceTables::get();
    let mc: Vec<(String, f64, f64, f64)> = refs
        .table_ii
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let code = refs.code(&r.code).unwrap();
            let ch = ChannelModel::for_code(&code, r.pe).unwrap();
            let pi = vec![0.0; code.error_correction_radius() + 1];
            let sim = simulate_no_attack(&code, &ch, &pi, &GameWeights::zero(), MC_TRIALS, 1000 + i as u64).unwrap();
            let lost = (sim.decode_error.count + sim.decode_failure.count) as f64 / MC_TRIALS as f64;
            (r.code.clone(), r.pe, lost, decode_failure_prob(&code, &ch))
        })
        .collect();
    let disagree: Vec<_> = mc.iter().filter(|(_, _, obs, exp)| !within_sigmas(*obs, *exp, MC_TRIALS)).collect();
    outcome(
        report.passed && disagree.is_empty(),
        format!(
            "{} cells, worst |dev| {worst:.2e} (limit 5e-4); MC at {MC_TRIALS} trials outside {MC_SIGMAS} sigma: {disagree:?}",
            report.cells.len()
        ),
    )
}

fn rho_agreement() -> Outcome {
    let refs = ReferenceTables::get();
    let mut jobs = Vec::new();
    for (ci, (_, code)) in reference_codes().into_iter().enumerate() {
        for (pi, &pe) in refs.pe.iter().enumerate() {
            for n1 in 0..=code.n() {
                jobs.push((code, pe, n1, (ci * 100 + pi * 20 + n1) as u64));
            }
        }
    }
    let results: Vec<(usize, f64, Vec<String>)> = jobs
        .par_iter()
        .map(|&(code, pe, n1, seed)| {
            let ch = ChannelModel::for_code(&code, pe).unwrap();
            let r = build_r(&code, &ch, RhoMethod::Analytic).unwrap();
            let row = r.full_row(n1);
            let sum_err = (row.iter().sum::<f64>() - 1.0).abs();
            let mc = rho_mc_row(n1, &ch, MC_TRIALS, seed).unwrap();
            let bad = row
                .iter()
                .zip(&mc)
                .enumerate()
                .filter(|(_, (&a, e))| !within_sigmas(e.estimate, a, MC_TRIALS))
                .map(|(n2, (a, e))| format!("{code} pe={pe} rho({n1},{n2}) analytic {a:.4e} mc {:.4e}", e.estimate))
                .collect();
            (row.len(), sum_err, bad)
        })
        .collect();
    let pairs: usize = results.iter().map(|r| r.0).sum();
    let worst_sum = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let bad: Vec<&String> = results.iter().flat_map(|r| &r.2).collect();
    outcome(
        bad.is_empty() && worst_sum <= ROW_SUM_TOLERANCE,
        format!("{pairs} (n1, n2) pairs over {} rows at {MC_TRIALS} trials, worst row-sum error {worst_sum:.1e}; outside {MC_SIGMAS} sigma: {bad:?}", results.len()),
    )
}

fn lp_properties(grid: &[SolvedInstance]) -> Outcome {
    let mut worst_gap = 0.0f64;
    let mut worst_saddle = 0.0f64;
    let mut bad = Vec::new();
    for s in grid {
        let eq = &s.equilibrium;
        let rel_gap = eq.duality_gap / eq.lp_objective.abs().max(1.0);
        let saddle = saddle_check(&s.game.xi, eq);
        let slack = (saddle.upper - eq.value).max(eq.value - saddle.lower);
        let simplex = |v: &[f64]| v.iter().all(|&x| x >= -LP_TOLERANCE) && (v.iter().sum::<f64>() - 1.0).abs() <= LP_TOLERANCE;
        let pi_ok = eq.pi_star.iter().all(|&p| (-LP_TOLERANCE..=1.0 + LP_TOLERANCE).contains(&p));
        worst_gap = worst_gap.max(rel_gap);
        worst_saddle = worst_saddle.max(slack);
        if rel_gap > LP_TOLERANCE || !saddle.passed || !pi_ok || !simplex(&eq.sigma_star) || !simplex(&eq.beta_star) {
            bad.push(format!("{} pe={}", s.instance.code, s.instance.p_e));
        }
    }
    outcome(
        bad.is_empty() && grid.len() == 24,
        format!("{} instances, worst relative duality gap {worst_gap:.1e}, worst saddle slack {worst_saddle:.1e}; failing {bad:?}", grid.len()),
    )
}

fn conservativeness(grid: &[SolvedInstance]) -> Outcome {
    let code = CodeParams::new(7, 3, 5, 8).unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    let mut kappa = 0;
    for s in grid.iter().filter(|s| s.instance.code == code) {
        let xq = exact_quotient(&code, &s.rho, &s.game.weights).unwrap();
        kappa = xq.kappa;
        let best = exact_best_response(&xq, &s.equilibrium.pi_star, &s.game.weights, &s.game.fa_row).unwrap();
        let ok = best.cost <= s.equilibrium.value + LP_TOLERANCE;
        pass &= ok;
        lines.push(format!("pe={} exact {:.4} <= relaxed {:.4}", s.instance.p_e, best.cost, s.equilibrium.value));
    }
    pass &= lines.len() == 4;
    outcome(pass, format!("[7,3,5]_8 over 8^7 words, {kappa} classes: {}", lines.join(", ")))
}

fn dominance(grid: &[SolvedInstance]) -> Outcome {
    let bad: Vec<String> = grid
        .iter()
        .filter(|s| s.equilibrium.value > s.equilibrium.value_no_detector + LP_TOLERANCE)
        .map(|s| format!("{} pe={}", s.instance.code, s.instance.p_e))
        .collect();
    let min_margin = grid.iter().map(|s| s.equilibrium.value_no_detector - s.equilibrium.value).fold(f64::INFINITY, f64::min);
    outcome(bad.is_empty(), format!("{} instances, smallest margin {min_margin:.4}; violations {bad:?}", grid.len()))
}

fn tables_three_to_five(grid: &[SolvedInstance]) -> Outcome {
    let sweep = Sweep::default();
    let reports: Vec<_> = [TableId::III, TableId::IV, TableId::V].into_iter().map(|t| reproduce_from_grid(t, &sweep, grid).unwrap()).collect();
    let (iii, iv, v) = (&reports[0], &reports[1], &reports[2]);
    let refs = ReferenceTables::get();
    let detector_helps = iii.cells.iter().zip(&iv.cells).all(|(a, b)| a.code == b.code && a.pe == b.pe && a.computed >= b.computed - LP_TOLERANCE);
    let floor: Vec<_> = iv.cells.iter().zip(&refs.table_iv).filter(|(_, r)| r.floor).map(|(c, _)| c).collect();
    let floor_ok = floor.iter().all(|c| c.pass);
    let highlighted: Vec<_> = v.cells.iter().zip(&refs.table_v).filter(|(_, r)| r.highlighted).map(|(c, _)| c).collect();
    let highlighted_ok = highlighted.iter().all(|c| c.pass);
    let soft: Vec<_> = reports.iter().flat_map(|r| &r.cells).filter(|c| !c.hard).collect();
    let soft_ok = soft.iter().all(|c| c.pass || (c.flagged && c.note.is_some()));
    let flagged = soft.iter().filter(|c| c.flagged).count();
    let worst_soft = soft.iter().map(|c| c.rel_dev).filter(|r| r.is_finite()).fold(0.0, f64::max);
    let worst_floor = floor.iter().map(|c| c.abs_dev).fold(0.0, f64::max);
    let worst_fa = highlighted.iter().map(|c| c.computed).fold(0.0, f64::max);
    outcome(
        detector_helps && floor_ok && highlighted_ok && soft_ok && reports.iter().all(|r| r.passed),
        format!(
            "(a) III >= IV: {detector_helps}; (b) {} floor cells, worst |dev| {worst_floor:.3} (limit 3); \
             (c) {} highlighted cells, worst false alarm {worst_fa:.4} (limit 0.11); \
             (d) {} soft cells, worst relative deviation {:.1}%, {flagged} flagged with notes",
            floor.len(),
            highlighted.len(),
            soft.len(),
            100.0 * worst_soft
        ),
    )
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, q: usize) -> Codeword {
    Codeword::from_symbols((0..n).map(|_| rng.gen_range(0..q) as u8).collect())
}

fn codec_suite() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for code in [CodeParams::new(7, 5, 3, 8).unwrap(), CodeParams::new(7, 3, 5, 8).unwrap(), CodeParams::new(6, 2, 5, 8).unwrap()] {
        let rs = ReedSolomon::new(code).unwrap();
        let book = enumerate_codebook_default(&code).unwrap();
        let radius = code.error_correction_radius();
        let mismatches = (0..CODEC_TRIALS)
            .into_par_iter()
            .filter(|&t| {
                let mut rng = ChaCha8Rng::seed_from_u64(t as u64);
                let sent = &book[rng.gen_range(0..book.len())];
                let mut word = if t % 2 == 0 { random_word(&mut rng, code.n(), code.q()) } else { sent.clone() };
                if t % 2 == 1 {
                    let mut symbols = word.into_symbols();
                    for _ in 0..rng.gen_range(0..=radius + 1) {
                        let i = rng.gen_range(0..code.n());
                        symbols[i] = rng.gen_range(0..code.q()) as u8;
                    }
                    word = Codeword::from_symbols(symbols);
                }
                rs.decode(&word).unwrap() != nearest_codeword_bruteforce(&word, &book, radius).unwrap()
            })
            .count();
        pass &= mismatches == 0;
        notes.push(format!("{code}: {mismatches}/{CODEC_TRIALS} mismatches vs brute force"));
    }

    // Every error pattern of weight <= d_o on a fixed [7,3,5]_8 codeword.
    let code = CodeParams::new(7, 3, 5, 8).unwrap();
    let rs = ReedSolomon::new(code).unwrap();
    let sent = rs.encode(&[3, 1, 6]).unwrap();
    let mut patterns = 0;
    let mut wrong = 0;
    for i in 0..7 {
        for j in i..7 {
            for a in 1..8u8 {
                for b in 0..8u8 {
                    if (i == j) != (b == 0) {
                        continue;
                    }
                    let mut s = sent.symbols().to_vec();
                    s[i] ^= a;
                    s[j] ^= b;
                    patterns += 1;
                    if !matches!(rs.decode(&Codeword::from_symbols(s)).unwrap(), DecodeResult::Decoded { ref codeword, .. } if *codeword == sent) {
                        wrong += 1;
                    }
                }
            }
        }
    }
    pass &= wrong == 0;
    notes.push(format!("{patterns} patterns of weight <= 2: {wrong} miscorrected"));

    let dist = WeightDistribution::from_codebook(&enumerate_codebook_default(&code).unwrap());
    let expected = [1u64, 0, 0, 0, 0, 147, 147, 217];
    pass &= dist.counts() == expected;
    notes.push(format!("[7,3,5]_8 weights {:?}", dist.counts()));
    outcome(pass, notes.join("; "))
}

fn run_cli(out: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_signguard"))
        .args(["--out", out.to_str().unwrap(), "--seed", "7"])
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for args in [&["tables", "II"][..], &["solve"][..]] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ran = run_cli(a.path(), args) && run_cli(b.path(), args);
        let (fa, fb) = (artifacts(a.path()), artifacts(b.path()));
        let same = ran && !fa.is_empty() && fa == fb;
        pass &= same;
        let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
        notes.push(format!("`{}` -> {names:?} identical: {same}", args.join(" ")));
    }
    outcome(pass, notes.join("; "))
}

fn main() {
    let mut failures = Vec::new();
    let grid_start = Instant::now();
    let grid = solve_reference_grid(&Sweep::default()).unwrap();
    let grid_time = grid_start.elapsed();
    println!("solved the 24-instance grid in {grid_time:.2?}");
    let secs = Duration::from_secs;

    criterion(1, "Table I exact", secs(1), &mut failures, table_one);
    criterion(2, "Table II within 5e-4 plus MC cross-check", secs(30), &mut failures, table_two);
    criterion(3, "rho analytic vs MC, row sums", secs(300), &mut failures, rho_agreement);
    criterion(4, "LP equilibrium properties", secs(60).saturating_sub(grid_time), &mut failures, || lp_properties(&grid));
    criterion(5, "conservativeness of the relaxation", secs(600), &mut failures, || conservativeness(&grid));
    criterion(6, "baseline dominance", secs(60), &mut failures, || dominance(&grid));
    criterion(7, "Tables III-V policy", secs(600), &mut failures, || tables_three_to_five(&grid));
    criterion(8, "codec suite", secs(300), &mut failures, codec_suite);
    criterion(9, "determinism of tables II and solve", secs(120), &mut failures, determinism);

    if failures.is_empty() {
        println!("all 9 criteria passed");
    } else {
        println!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
