//! Netlist graph: CM instances, free wiring nodes and their connections.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::{CmKind, ConfigMode};
use crate::da::{DaLut, RowLut};
use crate::error::{Error, Result};
use crate::fourier::TwiddleEntry;
use crate::numerics::QFormat;

pub type NodeId = usize;

/// A signal on one wire during one tick.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Value {
    Bit(bool),
    Word(i64),
    Complex(i64, i64),
    /// Raw `[c - s, c + s, c]`.
    Twiddle([i64; 3]),
    /// One table read per bit plane, least significant first.
    Planes(Vec<i64>),
}

impl Value {
    pub fn word(&self) -> i64 {
        match self {
            Value::Word(v) => *v,
            other => panic!("expected a word, found {other:?}"),
        }
    }

    pub fn bit(&self) -> bool {
        match self {
            Value::Bit(b) => *b,
            other => panic!("expected a bit, found {other:?}"),
        }
    }
}

/// Lines driven by the decoder and the sequencer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ControlLine {
    /// The active mode's decoder bit.
    ModeEnable,
    /// Stage counter bit 0 (`s0`).
    StageS0,
    /// Stage counter bit 1 (`s1`).
    StageS1,
    LoadInput,
    LoadOutput,
    StageEnable,
    /// `s2`: the scalable path select.
    Scalable,
}

impl ControlLine {
    fn name(self) -> &'static str {
        match self {
            ControlLine::ModeEnable => "mode_enable",
            ControlLine::StageS0 => "s0",
            ControlLine::StageS1 => "s1",
            ControlLine::LoadInput => "load_input",
            ControlLine::LoadOutput => "load_output",
            ControlLine::StageEnable => "stage_enable",
            ControlLine::Scalable => "s2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Input(usize),
    Output(usize),
    Const(Value),
    Control(ControlLine),
    /// 1-bit counter, toggles every tick.
    Counter1,
    /// Inputs `[d]`, or `[d, enable]` latching when `enable == when`.
    Register { init: Value, when: bool },
    /// `a + (b << shift)` on words or complex pairs.
    Add { shift: u32 },
    /// `a - (b << shift)` on words or complex pairs.
    Sub { shift: u32 },
    Mul,
    NibbleLut(DaLut),
    /// Two 16-entry tables sharing the sample address; input 1 selects.
    BankedLut(Box<[DaLut; 2]>),
    /// Four word inputs, read as `width` bit planes.
    RowLut { lut: RowLut, width: u32 },
    /// Shift-accumulates every plane but the sign plane.
    PlaneAccumulate,
    /// `acc - (sign plane << (width - 1))`.
    SignPlaneSub,
    /// `[sel, d0, d1]`.
    Mux2,
    /// `[s0, s1, d0, d1, d2, d3]`, index `s0 + 2 s1`.
    Mux4,
    /// Rounds away `shift` bits half away from zero, then saturates into
    /// `format`. An optional second input gates saturation counting.
    Quantize { shift: u32, format: QFormat },
    /// `2^(shift-1) - [v < 0]`: the addend that makes a plain arithmetic
    /// shift round half away from zero.
    RoundBias { shift: u32 },
    /// Arithmetic right shift.
    Shift { shift: u32 },
    Re,
    Im,
    Join,
    /// Stage-indexed twiddles, inputs `[s0, s1]`.
    TwiddleRom(Vec<TwiddleEntry>),
    /// One raw field of a twiddle.
    TwiddleField(usize),
}

impl Op {
    /// The CM kind this node occupies, if any.
    pub fn kind(&self) -> Option<CmKind> {
        Some(match self {
            Op::Counter1 => CmKind::Counter1,
            Op::Register { .. } => CmKind::Register,
            Op::Add { .. } | Op::PlaneAccumulate => CmKind::Adder,
            Op::Sub { .. } | Op::SignPlaneSub => CmKind::Subtractor,
            Op::Mul => CmKind::Multiplier,
            Op::NibbleLut(_) | Op::BankedLut(_) | Op::RowLut { .. } => CmKind::Lut,
            Op::Mux2 => CmKind::Mux2,
            Op::Mux4 => CmKind::Mux4,
            _ => return None,
        })
    }

    /// Number of CMs of [`Op::kind`] this node stands for.
    pub fn cm_count(&self) -> usize {
        match self {
            Op::BankedLut(_) => 2,
            op if op.kind().is_some() => 1,
            _ => 0,
        }
    }

    fn arity(&self) -> std::ops::RangeInclusive<usize> {
        match self {
            Op::Input(_) | Op::Const(_) | Op::Control(_) | Op::Counter1 => 0..=0,
            Op::Output(_)
            | Op::NibbleLut(_)
            | Op::PlaneAccumulate
            | Op::RoundBias { .. }
            | Op::Shift { .. }
            | Op::Re
            | Op::Im
            | Op::TwiddleField(_) => 1..=1,
            Op::Register { .. } | Op::Quantize { .. } => 1..=2,
            Op::Add { .. } | Op::Sub { .. } | Op::Mul | Op::BankedLut(_) | Op::SignPlaneSub | Op::Join => 2..=2,
            Op::TwiddleRom(_) => 2..=2,
            Op::Mux2 => 3..=3,
            Op::RowLut { .. } => 4..=4,
            Op::Mux4 => 6..=6,
        }
    }

    /// Nodes whose value is state, not a function of this tick's inputs.
    pub fn is_sequential(&self) -> bool {
        matches!(self, Op::Register { .. } | Op::Counter1)
    }

    fn summary(&self) -> String {
        match self {
            Op::Input(p) => format!("input {p}"),
            Op::Output(p) => format!("output {p}"),
            Op::Const(v) => format!("const {v:?}"),
            Op::Control(c) => format!("control {}", c.name()),
            Op::Counter1 => "counter".into(),
            Op::Register { when, .. } => format!("register when={}", u8::from(*when)),
            Op::Add { shift } => format!("adder shift={shift}"),
            Op::Sub { shift } => format!("subtractor shift={shift}"),
            Op::Mul => "multiplier".into(),
            Op::NibbleLut(l) => format!("lut {:?} coeff={}", l.role(), l.coefficient().raw()),
            Op::BankedLut(b) => format!(
                "lut2 {:?} coeff={},{}",
                b[0].role(),
                b[0].coefficient().raw(),
                b[1].coefficient().raw()
            ),
            Op::RowLut { lut, width } => {
                let c: Vec<String> = lut.coefficients().iter().map(|c| c.raw().to_string()).collect();
                format!("rowlut width={width} coeff={}", c.join(","))
            }
            Op::PlaneAccumulate => "adder planes".into(),
            Op::SignPlaneSub => "subtractor sign_plane".into(),
            Op::Mux2 => "mux2".into(),
            Op::Mux4 => "mux4".into(),
            Op::Quantize { shift, format } => format!("quantize shift={shift} {format}"),
            Op::RoundBias { shift } => format!("round_bias shift={shift}"),
            Op::Shift { shift } => format!("shift {shift}"),
            Op::Re => "re".into(),
            Op::Im => "im".into(),
            Op::Join => "join".into(),
            Op::TwiddleRom(t) => {
                let k: Vec<String> = t.iter().map(|w| format!("{:?}", w.raw())).collect();
                format!("twiddle_rom {}", k.join(" "))
            }
            Op::TwiddleField(i) => format!("twiddle_field {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub op: Op,
    pub inputs: Vec<NodeId>,
    pub label: String,
}

/// Sequencing of a configured datapath. Input frames are applied on
/// `input_phase` of each `period`-tick cycle; outputs are collected on
/// `output_phase` from tick `warmup` on, when `valid` (if any) carries the
/// given bit. `flush` extra ticks run after the last frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub period: usize,
    pub input_phase: usize,
    pub output_phase: usize,
    pub warmup: usize,
    pub flush: usize,
    pub valid: Option<(NodeId, bool)>,
    pub scalable: bool,
}

impl Timing {
    pub fn streaming(latency: usize) -> Self {
        Self {
            period: 1,
            input_phase: 0,
            output_phase: 0,
            warmup: latency,
            flush: latency,
            valid: None,
            scalable: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    pub mode: ConfigMode,
    pub nodes: Vec<Node>,
    pub inputs: usize,
    pub outputs: usize,
    pub input_format: QFormat,
    pub output_format: QFormat,
    /// Value of an input port with no sample.
    pub idle_input: Value,
    pub timing: Timing,
}

impl Netlist {
    /// A netlist with no nodes.
    pub fn empty(mode: ConfigMode) -> Self {
        Self {
            mode,
            nodes: Vec::new(),
            inputs: 0,
            outputs: 0,
            input_format: QFormat::Q1_7,
            output_format: QFormat::Q1_7,
            idle_input: Value::Word(0),
            timing: Timing::streaming(0),
        }
    }

    /// Evaluation order of the combinational nodes. Fails when the
    /// combinational part has a cycle.
    pub fn topological_order(&self) -> Result<Vec<NodeId>> {
        let n = self.nodes.len();
        let mut pending = vec![0usize; n];
        let mut users: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (id, node) in self.nodes.iter().enumerate() {
            if node.op.is_sequential() {
                continue;
            }
            for &src in &node.inputs {
                if !self.nodes[src].op.is_sequential() {
                    pending[id] += 1;
                    users[src].push(id);
                }
            }
        }
        let mut ready: VecDeque<NodeId> = (0..n).filter(|&i| pending[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(id) = ready.pop_front() {
            order.push(id);
            for &u in &users[id] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push_back(u);
                }
            }
        }
        if order.len() != n {
            return Err(Error::InvalidNetlist("combinational cycle".into()));
        }
        Ok(order)
    }

    /// Checks arity, port numbering, acyclicity and that every node is
    /// driven from a source.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let mut seen_in = vec![false; self.inputs];
        let mut seen_out = vec![false; self.outputs];
        for (id, node) in self.nodes.iter().enumerate() {
            if !node.op.arity().contains(&node.inputs.len()) {
                return Err(Error::InvalidNetlist(format!(
                    "node {id} ({}) has {} inputs",
                    node.op.summary(),
                    node.inputs.len()
                )));
            }
            if let Some(&bad) = node.inputs.iter().find(|&&s| s >= n) {
                return Err(Error::InvalidNetlist(format!("node {id} reads missing node {bad}")));
            }
            let port = |seen: &mut Vec<bool>, p: usize| {
                if p >= seen.len() || std::mem::replace(&mut seen[p], true) {
                    Err(Error::InvalidNetlist(format!("node {id}: bad or repeated port {p}")))
                } else {
                    Ok(())
                }
            };
            match node.op {
                Op::Input(p) => port(&mut seen_in, p)?,
                Op::Output(p) => port(&mut seen_out, p)?,
                _ => {}
            }
        }
        if !seen_in.iter().chain(&seen_out).all(|&s| s) {
            return Err(Error::InvalidNetlist("unconnected port".into()));
        }
        self.topological_order()?;
        // Forward reachability from the sources.
        let mut users: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (id, node) in self.nodes.iter().enumerate() {
            for &s in &node.inputs {
                users[s].push(id);
            }
        }
        let mut reached = vec![false; n];
        let mut queue: VecDeque<NodeId> = (0..n).filter(|&i| self.nodes[i].inputs.is_empty()).collect();
        for &i in &queue {
            reached[i] = true;
        }
        while let Some(id) = queue.pop_front() {
            for &u in &users[id] {
                if !reached[u] {
                    reached[u] = true;
                    queue.push_back(u);
                }
            }
        }
        if let Some(id) = reached.iter().position(|&r| !r) {
            return Err(Error::InvalidNetlist(format!("node {id} is not driven from any source")));
        }
        if let Some((v, _)) = self.timing.valid {
            if v >= n {
                return Err(Error::InvalidNetlist("valid signal names a missing node".into()));
            }
        }
        Ok(())
    }

    /// Structured text dump: header, node list, edge list.
    pub fn export_text(&self) -> String {
        let t = &self.timing;
        let mut s = String::new();
        let _ = writeln!(s, "netlist {}", self.mode);
        let _ = writeln!(
            s,
            "ports in={} out={} input_format={} output_format={}",
            self.inputs, self.outputs, self.input_format, self.output_format
        );
        let valid = t.valid.map_or("-".to_string(), |(v, b)| format!("n{v}={}", u8::from(b)));
        let _ = writeln!(
            s,
            "timing period={} input_phase={} output_phase={} warmup={} flush={} valid={}",
            t.period, t.input_phase, t.output_phase, t.warmup, t.flush, valid
        );
        let _ = writeln!(s, "nodes {}", self.nodes.len());
        for (id, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "n{id} {} \"{}\"", node.op.summary(), node.label);
        }
        let edges: usize = self.nodes.iter().map(|n| n.inputs.len()).sum();
        let _ = writeln!(s, "edges {edges}");
        for (id, node) in self.nodes.iter().enumerate() {
            for (pin, src) in node.inputs.iter().enumerate() {
                let _ = writeln!(s, "n{src} -> n{id}.{pin}");
            }
        }
        s
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.export_text())
    }
}

/// Incremental construction. Registers may be created before their data
/// input exists and connected later.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    nodes: Vec<Node>,
    inputs: usize,
    outputs: usize,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, op: Op, inputs: &[NodeId], label: impl Into<String>) -> NodeId {
        match op {
            Op::Input(p) => self.inputs = self.inputs.max(p + 1),
            Op::Output(p) => self.outputs = self.outputs.max(p + 1),
            _ => {}
        }
        self.nodes.push(Node {
            op,
            inputs: inputs.to_vec(),
            label: label.into(),
        });
        self.nodes.len() - 1
    }

    pub fn connect(&mut self, node: NodeId, inputs: &[NodeId]) {
        self.nodes[node].inputs = inputs.to_vec();
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn finish(
        self,
        mode: ConfigMode,
        input_format: QFormat,
        output_format: QFormat,
        idle_input: Value,
        timing: Timing,
    ) -> Result<Netlist> {
        let netlist = Netlist {
            mode,
            nodes: self.nodes,
            inputs: self.inputs,
            outputs: self.outputs,
            input_format,
            output_format,
            idle_input,
            timing,
        };
        netlist.validate()?;
        Ok(netlist)
    }
}
