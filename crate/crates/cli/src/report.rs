use std::fmt::Write as _;

use fpda_core::fabric::{ConfigMode, ResourceReport};
use serde::{Deserialize, Serialize};

/// Summary of one `run`. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: ConfigMode,
    pub control_word: String,
    /// `fabric` when the netlist produced the output, `kernel` for 2-D
    /// blocks.
    pub engine: String,
    pub samples_in: usize,
    pub samples_out: usize,
    pub max_error_lsb: f64,
    pub tolerance_lsb: f64,
    pub within_tolerance: bool,
    pub saturations: usize,
    pub resources: ResourceReport,
    /// Absent with `--no-timing`.
    pub elapsed_ms: Option<f64>,
}

impl RunReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode         {} ({})", self.mode, self.control_word);
        let _ = writeln!(s, "engine       {}", self.engine);
        let _ = writeln!(s, "samples      {} in, {} out", self.samples_in, self.samples_out);
        let _ = writeln!(
            s,
            "max error    {:.3} LSB (tolerance {}, {})",
            self.max_error_lsb,
            self.tolerance_lsb,
            if self.within_tolerance { "ok" } else { "exceeded" }
        );
        let _ = writeln!(s, "saturations  {}", self.saturations);
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(s, "elapsed      {ms:.3} ms");
        }
        s.push_str(&self.resources.render_text());
        s
    }

    pub fn render_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
