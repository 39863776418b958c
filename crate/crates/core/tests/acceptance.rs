//! Acceptance gate: every criterion runs at its pinned tolerance and prints
//! one PASS/FAIL line. The process exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{dense_oracle, has_interior_maximum, mm1k_distribution, non_decreasing, non_increasing};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use splitbuf_core::metrics::ClassMetrics;
use splitbuf_core::model::{build_generator, BufferConfig, GeneratorMode, State, TrafficParams};
use splitbuf_core::sim::{run_simulation, validate, Class, Discipline, SimConfig, SimMetrics, ValidationReport};
use splitbuf_core::wgos::{sweep_metrics, sweep_threshold, wgos_gamma, CostWeights};
use splitbuf_core::{analyze, solve_steady_state, verify_residual};

const TOTAL: usize = 20;
const SOLVER_ENTRY_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-10;
const SUM_TOL: f64 = 1e-12;
const CLOSED_FORM_TOL: f64 = 1e-10;
const GAMMA_TOL: f64 = 1e-9;
/// Slack for monotone curve checks; absorbs only floating-point rounding.
const SHAPE_SLACK: f64 = 1e-12;
const LITTLE_TOL: f64 = 0.01;
const Z_LIMIT: f64 = 3.0;
const MIN_SIM_LOSS: f64 = 1e-4;

fn thresholds() -> Vec<usize> {
    (2..=16).collect()
}

fn reference_costs() -> CostWeights {
    CostWeights::new(300.0, 50.0, 1000.0, 1.0).unwrap()
}

fn rates(lr: f64, ln: f64) -> TrafficParams {
    TrafficParams::new(lr, ln, 20.0, 10.0).unwrap()
}

struct Gate {
    failed: Vec<String>,
}

impl Gate {
    fn record(&mut self, id: &str, title: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {title}: {detail}");
        if !ok {
            self.failed.push(id.to_string());
        }
    }
}

fn optimum_threshold(gate: &mut Gate) {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (label, lr, ln) in [("fig11", 12.0, 6.0), ("fig12", 12.0, 6.0), ("fig12", 12.0, 9.0)] {
        let p = rates(lr, ln);
        let mut stars = Vec::new();
        for mode in GeneratorMode::ALL {
            let s = sweep_threshold(&p, TOTAL, &thresholds(), &reference_costs(), mode).unwrap();
            stars.push((mode, s.r_star));
        }
        let hit = stars.iter().any(|&(_, r)| r == 3);
        if !hit {
            ok = false;
            for mode in GeneratorMode::ALL {
                let s = sweep_threshold(&p, TOTAL, &thresholds(), &reference_costs(), mode).unwrap();
                println!("    gamma vs R ({label}, lambda_rt={lr}, lambda_nrt={ln}, {mode}):");
                for row in &s.rows {
                    println!("      R={:2} gamma={}", row.r, row.gamma);
                }
            }
        }
        let stars: Vec<String> = stars.iter().map(|(m, r)| format!("{m}={r}")).collect();
        notes.push(format!("{label}({lr},{ln}) r*: {}", stars.join(" ")));
    }
    gate.record(
        "AC1",
        "optimum threshold R*=3",
        ok,
        format!("{} [{:.2?}]", notes.join("; "), start.elapsed()),
    );
}

fn curve_shapes(gate: &mut Gate) {
    struct Family {
        name: &'static str,
        curves: Vec<(f64, f64)>,
        peaked: Vec<(f64, f64)>,
    }
    let families = [
        Family {
            name: "scenario1",
            curves: vec![(2.0, 6.0), (12.0, 6.0), (18.0, 6.0)],
            peaked: vec![(12.0, 6.0), (18.0, 6.0)],
        },
        Family {
            name: "scenario2",
            curves: vec![(12.0, 2.0), (12.0, 6.0), (12.0, 9.0)],
            peaked: vec![(12.0, 2.0), (12.0, 6.0), (12.0, 9.0)],
        },
    ];
    for mode in GeneratorMode::ALL {
        let mut monotone_ok = true;
        let mut peak_ok = true;
        let mut peaks = Vec::new();
        for fam in &families {
            for &(lr, ln) in &fam.curves {
                let rows = sweep_metrics(&rates(lr, ln), TOTAL, &thresholds(), mode).unwrap();
                let col = |f: fn(&ClassMetrics) -> f64| rows.iter().map(|(_, m)| f(m)).collect::<Vec<_>>();
                let l_nrt = col(|m| m.l_nrt);
                let l_rt = col(|m| m.l_rt);
                let d_rt = col(|m| m.d_rt.unwrap());
                let d_nrt = col(|m| m.d_nrt.unwrap());
                monotone_ok &= non_decreasing(&l_nrt, SHAPE_SLACK)
                    && non_increasing(&l_rt, SHAPE_SLACK)
                    && non_decreasing(&d_rt, SHAPE_SLACK);
                if fam.peaked.contains(&(lr, ln)) {
                    let interior = has_interior_maximum(&d_nrt);
                    peak_ok &= interior;
                    let argmax = d_nrt
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.total_cmp(b.1))
                        .map(|(k, _)| k + 2)
                        .unwrap();
                    peaks.push(format!("{}({lr},{ln}) argmax R={argmax}", fam.name));
                }
            }
        }
        gate.record(
            &format!("AC2.{mode}.monotone"),
            "L_nrt up, L_rt down, D_rt up in R",
            monotone_ok,
            format!("mode {mode}, both scenarios"),
        );
        gate.record(
            &format!("AC2.{mode}.peak"),
            "D_nrt interior maximum (medium/high RT load)",
            peak_ok,
            peaks.join("; "),
        );
    }
}

fn solver_oracle(gate: &mut Gate) {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xAC3);
    let (mut worst_entry, mut worst_residual, mut worst_sum) = (0.0f64, 0.0f64, 0.0f64);
    let mut solves = 0;
    while solves < 50 {
        let r = rng.random_range(1..=5usize);
        let n = rng.random_range(1..=5usize);
        if (r + 1) * (n + 1) > 36 {
            continue;
        }
        let mut rate = || 10f64.powf(rng.random_range(-1.0..2.0));
        let p = TrafficParams::new(rate(), rate(), rate(), rate()).unwrap();
        let mode = if rng.random_bool(0.5) {
            GeneratorMode::PaperLiteral
        } else {
            GeneratorMode::StrictPriority
        };
        let gen = build_generator(p, BufferConfig::new(r, n).unwrap(), mode).unwrap();
        let ss = solve_steady_state(&gen).unwrap();
        let oracle = dense_oracle(&gen);
        for (a, b) in ss.probabilities().iter().zip(&oracle) {
            worst_entry = worst_entry.max((a - b).abs());
        }
        worst_residual = worst_residual.max(verify_residual(&gen, &ss).unwrap());
        worst_sum = worst_sum.max((ss.probabilities().iter().sum::<f64>() - 1.0).abs());
        solves += 1;
    }
    gate.record(
        "AC3",
        "GTH vs dense oracle",
        worst_entry <= SOLVER_ENTRY_TOL && worst_residual <= RESIDUAL_TOL && worst_sum <= SUM_TOL,
        format!("50 solves: max entry diff {worst_entry:e}, max residual {worst_residual:e}, max |sum-1| {worst_sum:e}"),
    );
}

fn closed_form(gate: &mut Gate) {
    let p = TrafficParams::new(0.0, 5.0, 20.0, 10.0).unwrap();
    let cfg = BufferConfig::new(4, 10).unwrap();
    let ss = solve_steady_state(&build_generator(p, cfg, GeneratorMode::PaperLiteral).unwrap()).unwrap();
    let m = ClassMetrics::compute(&ss, &p);
    let loss_err = (m.l_nrt - 1.0 / 2047.0).abs();
    let line_err = mm1k_distribution(5.0, 10.0, 10)
        .iter()
        .enumerate()
        .map(|(j, w)| (ss.prob(State::new(0, j)) - w).abs())
        .fold(0.0, f64::max);
    let off_line = ss.iter().filter(|(s, _)| s.i > 0).map(|(_, p)| p).fold(0.0, f64::max);

    let q = TrafficParams::new(7.0, 0.0, 10.0, 20.0).unwrap();
    let ss = solve_steady_state(&build_generator(q, BufferConfig::new(10, 4).unwrap(), GeneratorMode::StrictPriority).unwrap())
        .unwrap();
    let mm1r = mm1k_distribution(7.0, 10.0, 10);
    let rt_err = mm1r
        .iter()
        .enumerate()
        .map(|(i, w)| (ss.prob(State::new(i, 0)) - w).abs())
        .fold(0.0, f64::max);
    let rt_loss_err = (ClassMetrics::compute(&ss, &q).l_rt - mm1r[10]).abs();

    let ok = loss_err <= CLOSED_FORM_TOL
        && line_err <= CLOSED_FORM_TOL
        && off_line == 0.0
        && rt_err <= CLOSED_FORM_TOL
        && rt_loss_err <= CLOSED_FORM_TOL;
    gate.record(
        "AC4",
        "M/M/1/K reductions",
        ok,
        format!("|L_nrt-1/2047| {loss_err:e}, NRT line {line_err:e}, RT line {rt_err:e}, |L_rt-B| {rt_loss_err:e}"),
    );
}

struct SimCase {
    label: String,
    params: TrafficParams,
    buffer: BufferConfig,
}

fn sim_cases() -> Vec<SimCase> {
    let mut cases = vec![
        SimCase {
            label: "scenario1(12,6) R=8".into(),
            params: rates(12.0, 6.0),
            buffer: BufferConfig::new(8, 12).unwrap(),
        },
        SimCase {
            label: "scenario2(12,9) R=3".into(),
            params: rates(12.0, 9.0),
            buffer: BufferConfig::new(3, 17).unwrap(),
        },
    ];
    // Random draws are kept only where every loss probability is at least
    // MIN_SIM_LOSS; below that a replication sees a handful of loss events
    // and its estimate is too skewed for a normal 3-SE comparison.
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xAC5);
    let mut k = 0;
    while k < 5 {
        let total = rng.random_range(4..=20usize);
        let r = rng.random_range(1..total);
        let p = TrafficParams::new(
            rng.random_range(1.0..20.0),
            rng.random_range(1.0..12.0),
            rng.random_range(10.0..30.0),
            rng.random_range(5.0..20.0),
        )
        .unwrap();
        let buffer = BufferConfig::new(r, total - r).unwrap();
        let observable = GeneratorMode::ALL.iter().all(|&mode| {
            let m = analyze(&p, buffer, mode).unwrap();
            m.l_rt >= MIN_SIM_LOSS && m.l_nrt >= MIN_SIM_LOSS
        });
        if !observable {
            continue;
        }
        cases.push(SimCase {
            label: format!("random{k}"),
            params: p,
            buffer,
        });
        k += 1;
    }
    cases
}

fn simulation_agreement(gate: &mut Gate) -> Vec<SimMetrics> {
    let start = Instant::now();
    let mut runs = Vec::new();
    let mut worst = (0.0f64, String::new());
    let mut failures = Vec::new();
    for case in sim_cases() {
        println!("    {}: {:?} R={} N={}", case.label, case.params, case.buffer.r_threshold(), case.buffer.n_capacity());
        for mode in GeneratorMode::ALL {
            let discipline = Discipline::matching(mode);
            let analytic = analyze(&case.params, case.buffer, mode).unwrap();
            let sim = run_simulation(&SimConfig::new(case.params, case.buffer, discipline)).unwrap();
            let report: ValidationReport = validate(&analytic, mode, &sim).unwrap();
            for m in &report.metrics {
                let z = m.z.unwrap_or(f64::INFINITY);
                if z > worst.0 {
                    worst = (z, format!("{} {} {}", case.label, mode, m.name));
                }
                if !(z <= Z_LIMIT) {
                    failures.push(format!("{} {} {} z={z:.2}", case.label, mode, m.name));
                }
            }
            runs.push(sim);
        }
    }
    gate.record(
        "AC5",
        "analytic vs simulation within 3 SE",
        failures.is_empty(),
        format!(
            "{} runs x 6 metrics, worst z {:.2} ({}){} [{:.1?}]",
            runs.len(),
            worst.0,
            worst.1,
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) },
            start.elapsed()
        ),
    );
    runs
}

fn simulation_consistency(gate: &mut Gate, runs: &[SimMetrics]) {
    let flow_ok = runs
        .iter()
        .flat_map(|s| &s.replications)
        .all(|r| Class::BOTH.iter().all(|&c| r.conserves_flow(c)));
    let worst_little = runs
        .iter()
        .flat_map(|s| &s.replications)
        .flat_map(|r| Class::BOTH.map(|c| r.little_gap(c)))
        .flatten()
        .fold(0.0, f64::max);
    let replay = runs
        .iter()
        .take(2)
        .all(|s| run_simulation(&s.config).unwrap() == *s);
    gate.record(
        "AC6",
        "simulation internal consistency",
        flow_ok && worst_little <= LITTLE_TOL && replay,
        format!("flow conserved {flow_ok}, worst Little gap {worst_little:e}, seeded replay identical {replay}"),
    );
}

fn wgos_algebra(gate: &mut Gate) {
    let m = ClassMetrics {
        n_rt: 0.0,
        n_nrt: 0.0,
        l_rt: 0.1,
        l_nrt: 0.2,
        d_rt: Some(0.05),
        d_nrt: Some(0.5),
    };
    let gamma = wgos_gamma(&m, &rates(12.0, 6.0), &reference_costs()).unwrap().gamma;
    let hand_ok = (gamma - 53.4667).abs() <= 1e-4 && (gamma - 802.0 / 15.0).abs() <= GAMMA_TOL;

    let p = rates(12.0, 6.0);
    let base = sweep_threshold(&p, TOTAL, &thresholds(), &reference_costs(), GeneratorMode::PaperLiteral).unwrap();
    let mut scale_ok = true;
    for c in [0.5, 3.0, 1000.0] {
        let scaled = sweep_threshold(&p, TOTAL, &thresholds(), &reference_costs().scaled(c), GeneratorMode::PaperLiteral).unwrap();
        scale_ok &= scaled.r_star == base.r_star;
        for (a, b) in base.rows.iter().zip(&scaled.rows) {
            scale_ok &= (b.gamma - c * a.gamma).abs() <= GAMMA_TOL * (c * a.gamma).max(1.0);
        }
    }
    gate.record(
        "AC7",
        "WGoS algebra",
        hand_ok && scale_ok,
        format!("gamma {gamma} (802/15), linear scaling and argmin invariance {scale_ok}"),
    );
}

fn main() -> ExitCode {
    let mut gate = Gate { failed: Vec::new() };
    optimum_threshold(&mut gate);
    curve_shapes(&mut gate);
    solver_oracle(&mut gate);
    closed_form(&mut gate);
    let runs = simulation_agreement(&mut gate);
    simulation_consistency(&mut gate, &runs);
    wgos_algebra(&mut gate);

    if gate.failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED {}", gate.failed.join(", "));
        ExitCode::FAILURE
    }
}
