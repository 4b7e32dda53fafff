use std::path::Path;

use serde::Serialize;
use signguard_core::channel::{build_r, decode_failure_prob, rho_mc_row, ChannelModel};
use signguard_core::evaluate::{
    exact_best_response, false_alarm_probability, figure_data, reproduce_from_grid, reproduce_tables, simulate_no_attack,
    solve_reference_grid, verify_contiguousness, BestResponse, FigureId, SimulationReport, TableId, TableReport,
};
use signguard_core::galois_rs::enumerate_codebook;
use signguard_core::game::{distance_histograms, ExactQuotient};
use signguard_core::lp::{saddle_check, SaddleReport};
use signguard_core::{solve_instance, RhoMethod};

use crate::config::{load_file, parse_code, FileConfig, Overrides, RunConfig};
use crate::error::CliError;
use crate::output::{float, write_csv, write_json};
use crate::{Cli, Outcome};

const CONSERVATIVE_SLACK: f64 = 1e-6;
const AGREEMENT_SIGMAS: f64 = 4.0;

pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };
    let code = cli.code.as_deref().map(parse_code).transpose()?;
    RunConfig::resolve(file, &Overrides { seed: cli.seed, pe: cli.pe, code })
}

#[derive(Serialize)]
struct EquilibriumFile<'a> {
    config: &'a RunConfig,
    seed: u64,
    code: String,
    nu: usize,
    mu: usize,
    d_o: usize,
    pi_star: &'a [f64],
    sigma_star: &'a [f64],
    beta_star: &'a [f64],
    value: f64,
    value_shifted: f64,
    value_no_detector: f64,
    shift: f64,
    lp_objective: f64,
    duality_gap: f64,
    false_alarm: f64,
    saddle: SaddleReport,
}

pub fn solve(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let solved = solve_instance(&cfg.instance())?;
    let eq = &solved.equilibrium;
    let game = &solved.game;
    let saddle = saddle_check(&game.xi, eq);
    let false_alarm = false_alarm_probability(&eq.pi_star, &game.fa_row)?;
    let file = EquilibriumFile {
        config: cfg,
        seed: cfg.mc.seed,
        code: game.code.to_string(),
        nu: game.nu,
        mu: game.mu,
        d_o: game.code.error_correction_radius(),
        pi_star: &eq.pi_star,
        sigma_star: &eq.sigma_star,
        beta_star: &eq.beta_star,
        value: eq.value,
        value_shifted: eq.value_shifted,
        value_no_detector: eq.value_no_detector,
        shift: eq.shift,
        lp_objective: eq.lp_objective,
        duality_gap: eq.duality_gap,
        false_alarm,
        saddle: saddle.clone(),
    };
    let path = write_json(out, "equilibrium.json", &file)?;
    if !saddle.passed {
        return Err(CliError::Invariant(format!("saddle check failed: {saddle:?}")));
    }
    Ok(Outcome {
        summary: format!(
            "{} p_e={}: value {:.6} (no detector {:.6}), false alarm {:.6}, pi* = {:?}",
            game.code, cfg.channel.pe, eq.value, eq.value_no_detector, false_alarm, eq.pi_star
        ),
        files: vec![path],
    })
}

fn parse_tables(id: &str) -> Result<Vec<TableId>, CliError> {
    if id.eq_ignore_ascii_case("all") {
        return Ok(TableId::ALL.to_vec());
    }
    id.parse::<TableId>().map(|t| vec![t]).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Serialize)]
struct TablesFile<'a> {
    config: &'a RunConfig,
    seed: u64,
    reports: &'a [TableReport],
}

pub fn tables(cfg: &RunConfig, out: &Path, id: &str) -> Result<Outcome, CliError> {
    let ids = parse_tables(id)?;
    let sweep = cfg.sweep();
    let grid = if ids.iter().any(|t| matches!(t, TableId::III | TableId::IV | TableId::V)) { Some(solve_reference_grid(&sweep)?) } else { None };
    let mut reports = Vec::new();
    let mut files = Vec::new();
    for t in ids {
        let report = match (&grid, t) {
            (Some(g), TableId::III | TableId::IV | TableId::V) => reproduce_from_grid(t, &sweep, g)?,
            _ => reproduce_tables(t, &sweep)?,
        };
        let rows: Vec<Vec<String>> = report
            .cells
            .iter()
            .map(|c| {
                vec![
                    c.code.clone(),
                    c.pe.map(|p| p.to_string()).unwrap_or_default(),
                    c.column.clone(),
                    float(c.computed),
                    float(c.reference),
                    float(c.abs_dev),
                    float(c.rel_dev),
                    c.hard.to_string(),
                    c.pass.to_string(),
                    c.flagged.to_string(),
                    c.note.clone().unwrap_or_default(),
                ]
            })
            .collect();
        files.push(write_csv(
            out,
            &format!("table_{t}.csv"),
            &["code", "pe", "column", "computed", "reference", "abs_dev", "rel_dev", "hard", "pass", "flagged", "note"],
            &rows,
        )?);
        reports.push(report);
    }
    files.push(write_json(out, "report.json", &TablesFile { config: cfg, seed: cfg.mc.seed, reports: &reports })?);
    let summary = reports
        .iter()
        .map(|r| format!("table {}: {} cells, {} hard failures, {} flagged", r.table, r.cells.len(), r.hard_failures, r.flagged))
        .collect::<Vec<_>>()
        .join("\n");
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.table.to_string()).collect();
    if !failed.is_empty() {
        return Err(CliError::Tolerance(format!("hard tolerance failures in table(s) {}\n{summary}", failed.join(", "))));
    }
    Ok(Outcome { summary, files })
}

#[derive(Serialize)]
struct SimulationFile<'a> {
    config: &'a RunConfig,
    seed: u64,
    pi_star: &'a [f64],
    simulation: &'a SimulationReport,
    analytic_decode_error_or_failure: f64,
    analytic_false_alarm: f64,
    decode_agrees: bool,
    false_alarm_agrees: bool,
}

pub fn simulate(cfg: &RunConfig, out: &Path, trials: Option<u64>) -> Result<Outcome, CliError> {
    let trials = trials.unwrap_or(cfg.mc.trials);
    if trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let solved = solve_instance(&cfg.instance())?;
    let pi = &solved.equilibrium.pi_star;
    let sim = simulate_no_attack(&solved.game.code, &solved.channel, pi, &solved.game.weights, trials, cfg.mc.seed)?;
    let lost = decode_failure_prob(&solved.game.code, &solved.channel);
    let fa = false_alarm_probability(pi, &solved.game.fa_row)?;
    let lost_count = sim.decode_error.count + sim.decode_failure.count;
    let lost_rate = lost_count as f64 / trials as f64;
    let tolerance = |p: f64| AGREEMENT_SIGMAS * (p * (1.0 - p) / trials as f64).sqrt() + 1.0 / trials as f64;
    let decode_agrees = (lost_rate - lost).abs() <= tolerance(lost);
    let false_alarm_agrees = sim.false_alarm.agrees_with(fa, trials, AGREEMENT_SIGMAS);
    let path = write_json(
        out,
        "report.json",
        &SimulationFile {
            config: cfg,
            seed: cfg.mc.seed,
            pi_star: pi,
            simulation: &sim,
            analytic_decode_error_or_failure: lost,
            analytic_false_alarm: fa,
            decode_agrees,
            false_alarm_agrees,
        },
    )?;
    let summary = format!(
        "{} p_e={} over {trials} trials: decode error+failure {:.6} (analytic {:.6}), false alarm {:.6} (analytic {:.6})",
        solved.game.code, cfg.channel.pe, lost_rate, lost, sim.false_alarm.rate, fa
    );
    if !(decode_agrees && false_alarm_agrees) {
        return Err(CliError::Tolerance(format!("simulation disagrees with analytic rates beyond {AGREEMENT_SIGMAS} sigma: {summary}")));
    }
    Ok(Outcome { summary, files: vec![path] })
}

#[derive(Serialize)]
struct ContiguitySummary {
    classes: usize,
    violating_classes: usize,
    class_rate: f64,
    word_rate: f64,
    by_min_distance: Vec<usize>,
}

#[derive(Serialize)]
struct OracleFile<'a> {
    config: &'a RunConfig,
    seed: u64,
    code: String,
    kappa: usize,
    relaxed_value: f64,
    exact_best_response: &'a BestResponse,
    margin: f64,
    verdict: &'static str,
    contiguity: ContiguitySummary,
}

pub fn oracle(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let solved = solve_instance(&cfg.instance())?;
    let code = solved.game.code;
    let book = enumerate_codebook(&code, cfg.bounds.codebook_max as u128)?;
    let hist = distance_histograms(&code, &book, cfg.bounds.fullspace_max as u128)?;
    let xq = ExactQuotient::from_histograms(&hist, &solved.rho, &solved.game.weights)?;
    let eq = &solved.equilibrium;
    let best = exact_best_response(&xq, &eq.pi_star, &solved.game.weights, &solved.game.fa_row)?;
    let contiguity = verify_contiguousness(&xq, &code);
    let margin = eq.value - best.cost;
    let verdict = if best.cost <= eq.value + CONSERVATIVE_SLACK { "PASS" } else { "FAIL" };
    let path = write_json(
        out,
        "report.json",
        &OracleFile {
            config: cfg,
            seed: cfg.mc.seed,
            code: code.to_string(),
            kappa: xq.kappa,
            relaxed_value: eq.value,
            exact_best_response: &best,
            margin,
            verdict,
            contiguity: ContiguitySummary {
                classes: contiguity.classes,
                violating_classes: contiguity.violating_classes,
                class_rate: contiguity.class_rate,
                word_rate: contiguity.word_rate,
                by_min_distance: contiguity.by_min_distance,
            },
        },
    )?;
    let summary = format!(
        "{code} p_e={}: exact best response {:.9} vs relaxed value {:.9} ({verdict}); {} classes, {} non-contiguous",
        cfg.channel.pe, best.cost, eq.value, xq.kappa, contiguity.violating_classes
    );
    if verdict == "FAIL" {
        return Err(CliError::Tolerance(format!("relaxation is not conservative: {summary}")));
    }
    Ok(Outcome { summary, files: vec![path] })
}

pub fn rho(cfg: &RunConfig, out: &Path, n1: Option<usize>) -> Result<Outcome, CliError> {
    let code = cfg.code();
    let ch = ChannelModel::for_code(&code, cfg.channel.pe)?;
    let starts: Vec<usize> = match n1 {
        Some(v) if v > code.n() => return Err(CliError::Config(format!("--n1 {v} exceeds n = {}", code.n()))),
        Some(v) => vec![v],
        None => (0..=code.n()).collect(),
    };
    let mut rows = Vec::new();
    match cfg.rho_method() {
        RhoMethod::Analytic => {
            let table = build_r(&code, &ch, RhoMethod::Analytic)?;
            for &a in &starts {
                for (b, v) in table.full_row(a).iter().enumerate() {
                    rows.push(vec![a.to_string(), b.to_string(), float(*v), String::new()]);
                }
            }
        }
        RhoMethod::MonteCarlo { trials, seed } => {
            for &a in &starts {
                for (b, e) in rho_mc_row(a, &ch, trials, seed)?.iter().enumerate() {
                    rows.push(vec![a.to_string(), b.to_string(), float(e.estimate), float(e.std_error)]);
                }
            }
        }
    }
    let path = write_csv(out, "rho.csv", &["n1", "n2", "rho", "std_error"], &rows)?;
    let first = &rows[..=code.n()];
    let summary = format!(
        "rho for {code} at p_e={}, n1={}: {}",
        cfg.channel.pe,
        starts[0],
        first.iter().map(|r| format!("{}:{}", r[1], r[2])).collect::<Vec<_>>().join(" ")
    );
    Ok(Outcome { summary, files: vec![path] })
}

pub fn figures(cfg: &RunConfig, out: &Path, id: &str) -> Result<Outcome, CliError> {
    let which: FigureId = id.parse().map_err(|e: signguard_core::Error| CliError::Config(e.to_string()))?;
    let grid = solve_reference_grid(&cfg.sweep())?;
    let data = figure_data(which, &grid);
    let rows: Vec<Vec<String>> = data.rows.iter().map(|r| vec![r.code.clone(), r.pe.to_string(), r.index.to_string(), float(r.value)]).collect();
    let path = write_csv(out, &format!("figure_{which}.csv"), &["code", "pe", "index", "value"], &rows)?;
    Ok(Outcome { summary: format!("{which}: {} rows over {} instances", rows.len(), grid.len()), files: vec![path] })
}
