//! Per-instance run report rows and their CSV encoding.

use std::fmt::Write as _;

/// One line of a batch run: gaps with and without the strong
/// inequalities, node and cut counters, wall time in seconds.
#[derive(Debug, Clone, Default)]
pub struct RunRow {
    pub name: String,
    pub igap_without: Option<f64>,
    pub igap_with: Option<f64>,
    pub pct_reduction: Option<f64>,
    pub nodes_without: Option<usize>,
    pub nodes_with: Option<usize>,
    pub cuts_added: Option<usize>,
    pub wall_time: f64,
}

pub const CSV_HEADER: &str =
    "name,igap_without,igap_with,pct_reduction,nodes_without,nodes_with,cuts_added,wall_time";

fn opt_f64(v: &Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_usize(v: &Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl RunRow {
    pub fn to_csv(&self) -> String {
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{}",
            self.name,
            opt_f64(&self.igap_without),
            opt_f64(&self.igap_with),
            opt_f64(&self.pct_reduction),
            opt_usize(&self.nodes_without),
            opt_usize(&self.nodes_with),
            opt_usize(&self.cuts_added),
            self.wall_time,
        );
        line
    }
}
