use std::path::Path;

use splitbuf_core::analyze;
use splitbuf_core::model::{GeneratorMode, TrafficParams};
use splitbuf_core::sim::{run_simulation, validate, Discipline, ValidationReport};
use splitbuf_core::wgos::{sweep_metrics, sweep_threshold, wgos_gamma, SweepResult};

use crate::config::ExperimentSpec;
use crate::error::{CliError, Result};
use crate::output::{metric_fields, num, opt, slug, Table, METRIC_COLUMNS};

/// Curves requested by the spec: one unnamed curve, or one per varied value.
fn curves(spec: &ExperimentSpec) -> Vec<(Option<f64>, TrafficParams)> {
    match &spec.vary {
        Some((target, values)) => values
            .iter()
            .map(|&v| (Some(v), target.apply(&spec.params, v)))
            .collect(),
        None => vec![(None, spec.params)],
    }
}

fn vary_prefix(spec: &ExperimentSpec) -> Vec<&'static str> {
    spec.vary.as_ref().map(|(t, _)| t.name()).into_iter().collect()
}

pub fn solve(spec: &ExperimentSpec, out: Option<&Path>) -> Result<()> {
    let buffer = spec.single_buffer()?;
    let mode = spec.single_mode()?;
    let metrics = analyze(&spec.params, buffer, mode)?;
    let gamma = spec
        .costs
        .map(|c| wgos_gamma(&metrics, &spec.params, &c))
        .transpose()?
        .map(|w| w.gamma);

    let mut table = Table::new(METRIC_COLUMNS.iter().copied().chain(["gamma"]));
    let mut row = metric_fields(buffer.r_threshold(), buffer.n_capacity(), &metrics);
    row.push(opt(gamma));
    table.push(row);
    table.print()?;
    if let Some(dir) = out {
        table.save(dir, "solve.csv")?;
    }
    Ok(())
}

pub fn sweep(spec: &ExperimentSpec, out: Option<&Path>) -> Result<()> {
    let with_gamma = spec.costs.is_some();
    let header = |prefix: &[&'static str]| {
        let mut h: Vec<&str> = prefix.to_vec();
        h.push("mode");
        h.extend(METRIC_COLUMNS);
        if with_gamma {
            h.push("gamma");
        }
        Table::new(h)
    };
    let prefix = vary_prefix(spec);
    let mut all = header(&prefix);
    for (value, params) in curves(spec) {
        let mut curve = header(&[]);
        for mode in spec.modes() {
            for (cfg, m) in sweep_metrics(&params, spec.total, &spec.r_values, mode)? {
                let mut row = vec![mode.to_string()];
                row.extend(metric_fields(cfg.r_threshold(), cfg.n_capacity(), &m));
                if let Some(costs) = &spec.costs {
                    row.push(num(wgos_gamma(&m, &params, costs)?.gamma));
                }
                let mut full: Vec<String> = value.iter().map(|v| num(*v)).collect();
                full.extend(row.iter().cloned());
                all.push(full);
                curve.push(row);
            }
        }
        if let (Some(dir), Some(v)) = (out, value) {
            let name = format!("sweep_{}_{}.csv", prefix[0], slug(v));
            curve.save(dir, &name)?;
        }
    }
    all.print()?;
    if let (Some(dir), None) = (out, &spec.vary) {
        all.save(dir, "sweep.csv")?;
    }
    Ok(())
}

pub fn optimize(spec: &ExperimentSpec, out: Option<&Path>) -> Result<()> {
    let costs = spec
        .costs
        .ok_or_else(|| CliError::Config("optimize needs cl_rt, cl_nrt, cd_rt and cd_nrt".into()))?;
    let prefix = vary_prefix(spec);
    let mut table = Table::new(
        prefix
            .iter()
            .copied()
            .chain(["mode"])
            .chain(METRIC_COLUMNS)
            .chain(["gamma"]),
    );
    let mut summary = Table::new(prefix.iter().copied().chain(["mode", "r_star", "gamma"]));

    for (value, params) in curves(spec) {
        for mode in spec.modes() {
            let result = sweep_threshold(&params, spec.total, &spec.r_values, &costs, mode)?;
            print_sweep(&result, value.map(|v| (prefix[0], v)));
            let lead: Vec<String> = value.iter().map(|v| num(*v)).collect();
            for row in &result.rows {
                let mut fields = lead.clone();
                fields.push(mode.to_string());
                fields.extend(metric_fields(row.r, row.n, &row.metrics));
                fields.push(num(row.gamma));
                table.push(fields);
            }
            let mut s = lead.clone();
            s.extend([mode.to_string(), result.r_star.to_string(), num(result.best().gamma)]);
            summary.push(s);
        }
    }
    if let Some(dir) = out {
        table.save(dir, "optimize.csv")?;
        summary.save(dir, "optimize_summary.csv")?;
    }
    Ok(())
}

fn print_sweep(result: &SweepResult, curve: Option<(&str, f64)>) {
    match curve {
        Some((name, v)) => println!("mode {}, {name} = {}", result.mode, num(v)),
        None => println!("mode {}", result.mode),
    }
    println!("{:>4} {:>4} {:>12} {:>12} {:>12} {:>12} {:>14}", "R", "N", "L_rt", "L_nrt", "D_rt", "D_nrt", "gamma");
    for row in &result.rows {
        let m = &row.metrics;
        let mark = if row.r == result.r_star { "  <-" } else { "" };
        println!(
            "{:>4} {:>4} {:>12.6e} {:>12.6e} {:>12.6} {:>12.6} {:>14.6}{mark}",
            row.r,
            row.n,
            m.l_rt,
            m.l_nrt,
            m.d_rt.unwrap_or(f64::NAN),
            m.d_nrt.unwrap_or(f64::NAN),
            row.gamma
        );
    }
    println!("optimal threshold R* = {} (gamma = {})\n", result.r_star, num(result.best().gamma));
}

pub fn simulate(spec: &ExperimentSpec, out: Option<&Path>) -> Result<()> {
    let buffer = spec.single_buffer()?;
    let discipline = match spec.discipline {
        Some(d) => d,
        None => Discipline::matching(spec.single_mode()?),
    };
    let sim = run_simulation(&spec.sim_config(buffer, discipline)?)?;
    let mut table = Table::new(["discipline", "R", "N", "metric", "mean", "std_error", "replications"]);
    for (name, est) in sim.named() {
        table.push(vec![
            discipline.to_string(),
            buffer.r_threshold().to_string(),
            buffer.n_capacity().to_string(),
            name.to_string(),
            opt(est.mean),
            opt(est.std_error),
            est.count.to_string(),
        ]);
    }
    table.print()?;
    eprintln!(
        "arrivals rt={} nrt={}, losses rt={} nrt={}, departures rt={} nrt={} over {} replications",
        sim.arrivals[0], sim.arrivals[1], sim.losses[0], sim.losses[1], sim.departures[0], sim.departures[1],
        sim.replications.len()
    );
    if let Some(dir) = out {
        table.save(dir, "simulate.csv")?;
    }
    Ok(())
}

/// Analytic/simulation pairs requested by the spec.
fn validation_pairs(spec: &ExperimentSpec) -> Vec<(GeneratorMode, Discipline)> {
    match (spec.discipline, &spec.modes) {
        (None, None) => GeneratorMode::ALL.iter().map(|&m| (m, Discipline::matching(m))).collect(),
        (None, Some(modes)) => modes.iter().map(|&m| (m, Discipline::matching(m))).collect(),
        (Some(d), None) => match d.analytic_counterpart() {
            Some(m) => vec![(m, d)],
            None => GeneratorMode::ALL.iter().map(|&m| (m, d)).collect(),
        },
        (Some(d), Some(modes)) => modes.iter().map(|&m| (m, d)).collect(),
    }
}

/// Returns `true` when every matched pair passed.
pub fn validate_cmd(spec: &ExperimentSpec, out: Option<&Path>) -> Result<bool> {
    let buffer = spec.single_buffer()?;
    let names = ["L_rt", "L_nrt", "N_rt", "N_nrt", "D_rt", "D_nrt"];
    let mut header: Vec<String> = ["mode", "discipline", "pairing", "R", "N"].map(String::from).to_vec();
    header.extend(names.iter().map(|n| n.to_string()));
    for prefix in ["sim_", "se_", "z_"] {
        header.extend(names.iter().map(|n| format!("{prefix}{n}")));
    }
    header.extend(["little_gap_rt", "little_gap_nrt", "flow_conserved", "pass"].map(String::from));
    let mut table = Table::new(header);

    let mut all_ok = true;
    for (mode, discipline) in validation_pairs(spec) {
        let analytic = analyze(&spec.params, buffer, mode)?;
        let sim = run_simulation(&spec.sim_config(buffer, discipline)?)?;
        let report = validate(&analytic, mode, &sim)?;
        print_report(&report, mode);
        if !report.comparison_only() {
            all_ok &= report.all_pass();
        }

        let mut row = vec![
            mode.to_string(),
            discipline.to_string(),
            if report.comparison_only() { "comparison-only" } else { "matched" }.to_string(),
            buffer.r_threshold().to_string(),
            buffer.n_capacity().to_string(),
        ];
        row.extend(report.metrics.iter().map(|m| opt(m.analytic)));
        row.extend(report.metrics.iter().map(|m| opt(m.simulated)));
        row.extend(report.metrics.iter().map(|m| opt(m.std_error)));
        row.extend(report.metrics.iter().map(|m| opt(m.z)));
        row.extend(report.little.iter().map(|l| opt(l.worst_gap)));
        row.push(report.flow_conserved.to_string());
        row.push(report.all_pass().to_string());
        table.push(row);
    }
    if let Some(dir) = out {
        table.save(dir, "validation.csv")?;
    }
    Ok(all_ok)
}

fn print_report(report: &ValidationReport, mode: GeneratorMode) {
    let flag = if report.comparison_only() { " [comparison-only]" } else { "" };
    println!("analytic {mode} vs simulated {}{flag}", report.discipline);
    for m in &report.metrics {
        println!(
            "  {:<6} analytic {:>14} sim {:>14} se {:>12} z {:>8} {}",
            m.name,
            fmt6(m.analytic),
            fmt6(m.simulated),
            fmt6(m.std_error),
            m.z.map_or("n/a".to_string(), |z| format!("{z:.2}")),
            if m.pass { "pass" } else { "FAIL" }
        );
    }
    for l in &report.little {
        println!(
            "  Little's law {:<3} worst relative gap {} {}",
            l.class.label(),
            l.worst_gap.map_or("n/a".to_string(), |g| format!("{g:.3e}")),
            if l.pass { "pass" } else { "FAIL" }
        );
    }
    println!("  flow conservation {}", if report.flow_conserved { "pass" } else { "FAIL" });
    println!();
}

fn fmt6(x: Option<f64>) -> String {
    x.map_or("n/a".to_string(), |v| format!("{v:.6e}"))
}
