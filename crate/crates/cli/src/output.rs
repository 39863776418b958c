//! CSV emission shared by the subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use splitbuf_core::metrics::ClassMetrics;

use crate::error::{CliError, Result};

pub const METRIC_COLUMNS: [&str; 8] = ["R", "N", "L_rt", "L_nrt", "N_rt", "N_nrt", "D_rt", "D_nrt"];

/// Shortest round-trip decimal; undefined values become `NaN`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NaN".to_string(), num)
}

/// `R, N` followed by the six class metrics.
pub fn metric_fields(r: usize, n: usize, m: &ClassMetrics) -> Vec<String> {
    vec![
        r.to_string(),
        n.to_string(),
        num(m.l_rt),
        num(m.l_nrt),
        num(m.n_rt),
        num(m.n_nrt),
        opt(m.d_rt),
        opt(m.d_nrt),
    ]
}

/// A header plus rows, rendered identically to stdout and to files.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_to<W: Write>(&self, sink: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn print(&self) -> Result<()> {
        self.write_to(std::io::stdout().lock()).map_err(|source| CliError::Csv {
            path: PathBuf::from("<stdout>"),
            source,
        })
    }

    pub fn save(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(name);
        let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|source| CliError::Csv { path: path.clone(), source })?;
        Ok(path)
    }
}

/// File-name friendly rendering of a parameter value (`12` or `2.5` -> `2p5`).
pub fn slug(x: f64) -> String {
    num(x).replace('.', "p")
}
