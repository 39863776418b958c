//! Canned threshold sweeps for the standard loss, delay and cost curves.
//!
//! Every curve sweeps `R = 2..=16` at `T = 20` under both generator modes.

use std::path::Path;

use splitbuf_core::model::{GeneratorMode, TrafficParams};
use splitbuf_core::wgos::{sweep_metrics, sweep_threshold, CostWeights};

use crate::config::VaryTarget;
use crate::error::{CliError, Result};
use crate::output::{metric_fields, num, slug, Table, METRIC_COLUMNS};

pub const FIGURES: [&str; 10] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12"];

const TOTAL: usize = 20;
const R_MIN: usize = 2;
const R_MAX: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: &'static str,
    pub quantity: &'static str,
    pub base: TrafficParams,
    pub vary: VaryTarget,
    pub values: Vec<f64>,
    pub with_gamma: bool,
}

/// Shared operating point; each figure overrides the rate it varies.
fn base() -> TrafficParams {
    TrafficParams {
        lambda_rt: 12.0,
        lambda_nrt: 6.0,
        mu_rt: 20.0,
        mu_nrt: 10.0,
    }
}

pub fn cost_weights() -> CostWeights {
    CostWeights {
        cl_rt: 300.0,
        cl_nrt: 50.0,
        cd_rt: 1000.0,
        cd_nrt: 1.0,
    }
}

pub fn figure(id: &str) -> Option<Figure> {
    let (id, quantity, base, vary, values, with_gamma) = match id {
        "fig3" => ("fig3", "L_nrt", base(), VaryTarget::LambdaRt, vec![2.0, 12.0, 18.0], false),
        "fig4" => ("fig4", "D_nrt", base(), VaryTarget::LambdaRt, vec![2.0, 12.0, 18.0], false),
        "fig5" => ("fig5", "L_rt", base(), VaryTarget::LambdaRt, vec![2.0, 12.0, 18.0], false),
        "fig6" => ("fig6", "D_rt", base(), VaryTarget::LambdaRt, vec![2.0, 12.0, 18.0], false),
        "fig7" => ("fig7", "L_nrt", base(), VaryTarget::LambdaNrt, vec![2.0, 6.0, 9.0], false),
        "fig8" => ("fig8", "D_nrt", base(), VaryTarget::LambdaNrt, vec![2.0, 6.0, 9.0], false),
        "fig9" => ("fig9", "L_rt", base(), VaryTarget::LambdaNrt, vec![2.0, 6.0, 9.0], false),
        "fig10" => ("fig10", "D_rt", base(), VaryTarget::LambdaNrt, vec![2.0, 6.0, 9.0], false),
        "fig11" => ("fig11", "gamma", base(), VaryTarget::LambdaRt, vec![12.0, 18.0], true),
        "fig12" => ("fig12", "gamma", base(), VaryTarget::LambdaNrt, vec![2.0, 6.0, 9.0], true),
        _ => return None,
    };
    Some(Figure {
        id,
        quantity,
        base,
        vary,
        values,
        with_gamma,
    })
}

/// Writes one CSV per curve of `id` (or of every figure for `all`) into `dir`.
pub fn reproduce(id: &str, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let ids: Vec<&str> = if id == "all" {
        FIGURES.to_vec()
    } else if FIGURES.contains(&id) {
        vec![id]
    } else {
        return Err(CliError::Config(format!(
            "unknown figure id '{id}'; valid ids: {}, all",
            FIGURES.join(", ")
        )));
    };

    let rs: Vec<usize> = (R_MIN..=R_MAX).collect();
    let mut written = Vec::new();
    for id in ids {
        let fig = figure(id).expect("listed figure");
        for &value in &fig.values {
            let params = fig.vary.apply(&fig.base, value);
            let mut header: Vec<&str> = vec!["mode"];
            header.extend(METRIC_COLUMNS);
            if fig.with_gamma {
                header.push("gamma");
            }
            let mut table = Table::new(header);
            for mode in GeneratorMode::ALL {
                if fig.with_gamma {
                    let result = sweep_threshold(&params, TOTAL, &rs, &cost_weights(), mode)?;
                    for row in &result.rows {
                        let mut fields = vec![mode.to_string()];
                        fields.extend(metric_fields(row.r, row.n, &row.metrics));
                        fields.push(num(row.gamma));
                        table.push(fields);
                    }
                    println!(
                        "{id} {} = {} {mode}: R* = {} (gamma = {})",
                        fig.vary.name(),
                        num(value),
                        result.r_star,
                        num(result.best().gamma)
                    );
                } else {
                    for (cfg, m) in sweep_metrics(&params, TOTAL, &rs, mode)? {
                        let mut fields = vec![mode.to_string()];
                        fields.extend(metric_fields(cfg.r_threshold(), cfg.n_capacity(), &m));
                        table.push(fields);
                    }
                }
            }
            let name = format!("{id}_{}_{}.csv", fig.vary.name(), slug(value));
            let path = table.save(dir, &name)?;
            println!("wrote {} ({} vs R)", path.display(), fig.quantity);
            written.push(path);
        }
    }
    Ok(written)
}
