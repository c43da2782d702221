//! Resource accounting against the reference per-mode counts.

use serde::{Deserialize, Serialize};

use super::netlist::Netlist;
use super::{table_iv, Census, CmKind, ConfigMode, POOL_CAPACITY};

/// Exact CM count of a netlist.
pub fn census(netlist: &Netlist) -> Census {
    let mut c = Census::default();
    for node in &netlist.nodes {
        if let Some(kind) = node.op.kind() {
            *c.get_mut(kind) += node.op.cm_count();
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub kind: CmKind,
    pub used: usize,
    pub pool: usize,
    pub expected: usize,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub mode: ConfigMode,
    pub rows: Vec<ResourceRow>,
    pub notes: Vec<String>,
}

impl ResourceReport {
    pub fn row(&self, kind: CmKind) -> &ResourceRow {
        self.rows.iter().find(|r| r.kind == kind).expect("one row per kind")
    }

    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    /// Every mismatching row has a note naming its kind.
    pub fn mismatches_explained(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| !r.matches)
            .all(|r| self.notes.iter().any(|n| n.starts_with(&format!("{}:", r.kind))))
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("resources {}\n", self.mode);
        s.push_str(&format!("{:<11} {:>5} {:>5} {:>9}  match\n", "cm", "used", "pool", "expected"));
        for r in &self.rows {
            s.push_str(&format!(
                "{:<11} {:>5} {:>5} {:>9}  {}\n",
                r.kind.to_string(),
                r.used,
                r.pool,
                r.expected,
                if r.matches { "yes" } else { "no" }
            ));
        }
        for n in &self.notes {
            s.push_str(&format!("note {n}\n"));
        }
        s
    }
}

fn mode_notes(mode: ConfigMode, used: &Census) -> Vec<String> {
    let expected = table_iv(mode);
    let mut notes = Vec::new();
    match mode {
        ConfigMode::Fir => {
            notes.push("mux2: input select driven by the decoder bit (sample or zero)".into());
        }
        ConfigMode::Iir => {
            notes.push("lut: 32 forward tables plus 30 for the 15-tap feedback filter".into());
            notes.push("adder: 31 forward, 29 feedback, 1 join and 1 rounding adder inside the feedback loop".into());
            notes.push("mux2: input select driven by the decoder bit (sample or zero)".into());
        }
        ConfigMode::Dwt => {
            if used.lut != expected.lut {
                notes.push(format!(
                    "lut: {} 16-entry tables against {} expected; each of the 8 coefficient slots holds a bank of two \
                     tables (odd and even phase) selected by the counter, and the expected figure counts one per slot",
                    used.lut, expected.lut
                ));
            }
            notes.push("counter: phase bit alternating odd and even taps; outputs on its 1 to 0 wrap".into());
            notes.push("register: 7 sample delays, 1 parked partial sum, 1 output hold".into());
        }
        ConfigMode::Fft => {
            notes.push(format!(
                "register: three banks (input, working, output) of 16 complex registers; {} if real and imaginary parts are counted separately",
                2 * used.register
            ));
            notes.push("mux4: one per butterfly input, selected by the stage bits s0 s1".into());
            notes.push("mux2: two s2 twiddle selects on each of butterflies 1 to 7; butterfly 0 always uses W^0".into());
        }
        ConfigMode::Dct => {
            notes.push("adder: 8 pre-stage sums, 4 second-level sums, 24 plane accumulators, 8 odd-output joins".into());
            notes.push("subtractor: 8 pre-stage differences, 4 second-level differences, 24 sign-plane subtractors".into());
            notes.push("mux2: s2 select on each odd output between the full row and its left half".into());
        }
    }
    for kind in CmKind::ALL {
        let (u, e) = (used.get(kind), expected.get(kind));
        if u != e && !notes.iter().any(|n| n.starts_with(&format!("{kind}:"))) {
            notes.push(format!("{kind}: derived {u}, expected {e}"));
        }
    }
    notes.push(format!(
        "pool: {} LUTs against at most 62 needed by any single mode",
        POOL_CAPACITY.lut
    ));
    notes.push("scaling units and shifters are wiring inside the adders and are not counted".into());
    notes
}

pub fn account(netlist: &Netlist) -> ResourceReport {
    let used = census(netlist);
    let expected = if netlist.nodes.is_empty() {
        Census::default()
    } else {
        table_iv(netlist.mode)
    };
    let rows = CmKind::ALL
        .iter()
        .map(|&kind| ResourceRow {
            kind,
            used: used.get(kind),
            pool: POOL_CAPACITY.get(kind),
            expected: expected.get(kind),
            matches: used.get(kind) == expected.get(kind),
        })
        .collect();
    let notes = if netlist.nodes.is_empty() {
        Vec::new()
    } else {
        mode_notes(netlist.mode, &used)
    };
    ResourceReport {
        mode: netlist.mode,
        rows,
        notes,
    }
}
