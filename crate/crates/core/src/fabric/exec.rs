//! Synchronous tick-by-tick evaluation of a netlist.

use super::netlist::{ControlLine, Netlist, NodeId, Op, Value};
use crate::error::{Error, Result};
use crate::fourier::stage_select;
use crate::numerics::{round_shift, ComplexFixed, FixedPoint};

/// Mutable state of a configured datapath: register and counter contents.
#[derive(Debug, Clone)]
pub struct Machine<'a> {
    netlist: &'a Netlist,
    order: Vec<NodeId>,
    state: Vec<Option<Value>>,
    tick: usize,
    saturations: usize,
}

fn quantize_word(v: i64, shift: u32, format: crate::numerics::QFormat) -> (i64, bool) {
    format.saturate(round_shift(v, shift))
}

impl<'a> Machine<'a> {
    pub fn new(netlist: &'a Netlist) -> Result<Self> {
        let order = netlist.topological_order()?;
        let state = netlist
            .nodes
            .iter()
            .map(|n| match &n.op {
                Op::Register { init, .. } => Some(init.clone()),
                Op::Counter1 => Some(Value::Bit(false)),
                _ => None,
            })
            .collect();
        Ok(Self {
            netlist,
            order,
            state,
            tick: 0,
            saturations: 0,
        })
    }

    pub fn tick(&self) -> usize {
        self.tick
    }

    pub fn saturations(&self) -> usize {
        self.saturations
    }

    fn phase(&self) -> usize {
        self.tick % self.netlist.timing.period
    }

    fn control(&self, line: ControlLine) -> bool {
        let phase = self.phase();
        let t = &self.netlist.timing;
        let staged = t.period > 1;
        let stage = if staged && phase >= 1 { phase - 1 } else { 0 };
        match line {
            ControlLine::ModeEnable => true,
            ControlLine::StageS0 => stage_select(stage).0,
            ControlLine::StageS1 => stage_select(stage).1,
            ControlLine::LoadInput | ControlLine::LoadOutput => phase == 0,
            ControlLine::StageEnable => staged && phase >= 1,
            ControlLine::Scalable => t.scalable,
        }
    }

    /// Evaluates one tick with the given port values, then clocks every
    /// register. Returns the values seen on the output ports and whether
    /// the valid signal was asserted.
    pub fn step(&mut self, inputs: &[Value]) -> Result<(Vec<Value>, bool)> {
        let nl = self.netlist;
        if inputs.len() != nl.inputs {
            return Err(Error::ArityMismatch {
                expected: nl.inputs,
                actual: inputs.len(),
            });
        }
        let mut values: Vec<Option<Value>> = vec![None; nl.nodes.len()];
        for &id in &self.order {
            let node = &nl.nodes[id];
            let arg = |i: usize| -> &Value {
                let src = node.inputs[i];
                values[src].as_ref().expect("evaluated in order")
            };
            let v = match &node.op {
                Op::Register { .. } | Op::Counter1 => self.state[id].clone().expect("sequential state"),
                Op::Input(p) => inputs[*p].clone(),
                Op::Output(_) => arg(0).clone(),
                Op::Const(v) => v.clone(),
                Op::Control(line) => Value::Bit(self.control(*line)),
                Op::Add { shift } => match (arg(0), arg(1)) {
                    (Value::Word(a), Value::Word(b)) => Value::Word(a + (b << shift)),
                    (Value::Complex(ar, ai), Value::Complex(br, bi)) => Value::Complex(ar + (br << shift), ai + (bi << shift)),
                    (a, b) => panic!("adder on {a:?}, {b:?}"),
                },
                Op::Sub { shift } => match (arg(0), arg(1)) {
                    (Value::Word(a), Value::Word(b)) => Value::Word(a - (b << shift)),
                    (Value::Complex(ar, ai), Value::Complex(br, bi)) => Value::Complex(ar - (br << shift), ai - (bi << shift)),
                    (a, b) => panic!("subtractor on {a:?}, {b:?}"),
                },
                Op::Mul => Value::Word(arg(0).word() * arg(1).word()),
                Op::NibbleLut(lut) => Value::Word(lut.read(arg(0).word())),
                Op::BankedLut(banks) => {
                    let bank = usize::from(arg(1).bit());
                    Value::Word(banks[bank].read(arg(0).word()))
                }
                Op::RowLut { lut, width } => {
                    let samples = [arg(0).word(), arg(1).word(), arg(2).word(), arg(3).word()];
                    Value::Planes(lut.read_planes(samples, *width))
                }
                Op::PlaneAccumulate => match arg(0) {
                    Value::Planes(p) => Value::Word(crate::da::accumulate_planes(p)),
                    other => panic!("plane accumulator on {other:?}"),
                },
                Op::SignPlaneSub => match arg(1) {
                    Value::Planes(p) => Value::Word(arg(0).word() - crate::da::sign_plane(p)),
                    other => panic!("sign-plane subtractor on {other:?}"),
                },
                Op::Mux2 => arg(1 + usize::from(arg(0).bit())).clone(),
                Op::Mux4 => {
                    let sel = usize::from(arg(0).bit()) + 2 * usize::from(arg(1).bit());
                    arg(2 + sel).clone()
                }
                Op::Quantize { shift, format } => {
                    let counted = node.inputs.len() < 2 || arg(1).bit();
                    let (v, sat) = match arg(0) {
                        Value::Word(w) => {
                            let (v, s) = quantize_word(*w, *shift, *format);
                            (Value::Word(v), s)
                        }
                        Value::Complex(re, im) => {
                            let (r, s1) = quantize_word(*re, *shift, *format);
                            let (i, s2) = quantize_word(*im, *shift, *format);
                            (Value::Complex(r, i), s1 || s2)
                        }
                        other => panic!("quantizer on {other:?}"),
                    };
                    if sat && counted {
                        self.saturations += 1;
                    }
                    v
                }
                Op::RoundBias { shift } => {
                    let w = arg(0).word();
                    Value::Word((1i64 << (shift - 1)) - i64::from(w < 0))
                }
                Op::Shift { shift } => Value::Word(arg(0).word() >> shift),
                Op::Re => match arg(0) {
                    Value::Complex(re, _) => Value::Word(*re),
                    other => panic!("re of {other:?}"),
                },
                Op::Im => match arg(0) {
                    Value::Complex(_, im) => Value::Word(*im),
                    other => panic!("im of {other:?}"),
                },
                Op::Join => Value::Complex(arg(0).word(), arg(1).word()),
                Op::TwiddleRom(table) => {
                    let sel = usize::from(arg(0).bit()) + 2 * usize::from(arg(1).bit());
                    Value::Twiddle(table[sel].raw())
                }
                Op::TwiddleField(i) => match arg(0) {
                    Value::Twiddle(t) => Value::Word(t[*i]),
                    other => panic!("twiddle field of {other:?}"),
                },
            };
            values[id] = Some(v);
        }
        let mut outputs = vec![Value::Word(0); nl.outputs];
        for (id, node) in nl.nodes.iter().enumerate() {
            if let Op::Output(p) = node.op {
                outputs[p] = values[id].clone().expect("evaluated");
            }
        }
        let valid = match nl.timing.valid {
            Some((id, want)) => values[id].as_ref().expect("evaluated").bit() == want,
            None => true,
        };
        for (id, node) in nl.nodes.iter().enumerate() {
            match &node.op {
                Op::Register { when, .. } => {
                    let enabled = node.inputs.len() < 2 || values[node.inputs[1]].as_ref().expect("evaluated").bit() == *when;
                    if enabled {
                        self.state[id] = values[node.inputs[0]].clone();
                    }
                }
                Op::Counter1 => {
                    let b = self.state[id].as_ref().expect("counter state").bit();
                    self.state[id] = Some(Value::Bit(!b));
                }
                _ => {}
            }
        }
        self.tick += 1;
        Ok((outputs, valid))
    }
}

/// Result of a full run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub outputs: Vec<Vec<Value>>,
    pub saturations: usize,
    pub ticks: usize,
}

/// Feeds `frames` (one value per input port each) through a fresh
/// machine and collects the valid output frames.
pub fn execute(netlist: &Netlist, frames: &[Vec<Value>]) -> Result<Execution> {
    if let Some(f) = frames.iter().find(|f| f.len() != netlist.inputs) {
        return Err(Error::ArityMismatch {
            expected: netlist.inputs,
            actual: f.len(),
        });
    }
    let t = netlist.timing;
    let mut machine = Machine::new(netlist)?;
    let idle = vec![netlist.idle_input.clone(); netlist.inputs];
    let total = frames.len() * t.period + t.flush;
    let mut outputs = Vec::new();
    for tick in 0..total {
        let phase = tick % t.period;
        let frame = if phase == t.input_phase {
            frames.get(tick / t.period).unwrap_or(&idle)
        } else {
            &idle
        };
        let (out, valid) = machine.step(frame)?;
        if tick >= t.warmup && phase == t.output_phase && valid {
            outputs.push(out);
        }
    }
    Ok(Execution {
        outputs,
        saturations: machine.saturations(),
        ticks: total,
    })
}

fn check_format(netlist: &Netlist, x: &FixedPoint) -> Result<()> {
    if x.format() != netlist.input_format {
        return Err(Error::FormatMismatch {
            left: x.format().to_string(),
            right: netlist.input_format.to_string(),
        });
    }
    Ok(())
}

fn word(netlist: &Netlist, v: &Value) -> FixedPoint {
    FixedPoint::from_raw(v.word(), netlist.output_format).expect("quantized output")
}

/// Single-port streams: FIR, IIR and the decimator.
pub fn run_stream(netlist: &Netlist, x: &[FixedPoint]) -> Result<(Vec<FixedPoint>, usize)> {
    let frames = x
        .iter()
        .map(|s| {
            check_format(netlist, s)?;
            Ok(vec![Value::Word(s.raw())])
        })
        .collect::<Result<Vec<_>>>()?;
    let run = execute(netlist, &frames)?;
    let y = run.outputs.iter().map(|f| word(netlist, &f[0])).collect();
    Ok((y, run.saturations))
}

/// 16-sample real blocks: the DCT. Inputs are widened to the netlist's
/// input format.
pub fn run_blocks(netlist: &Netlist, blocks: &[Vec<FixedPoint>]) -> Result<(Vec<Vec<FixedPoint>>, usize)> {
    let frames = blocks
        .iter()
        .map(|b| {
            if b.len() != netlist.inputs {
                return Err(Error::ArityMismatch {
                    expected: netlist.inputs,
                    actual: b.len(),
                });
            }
            b.iter()
                .map(|s| Ok(Value::Word(s.widen(netlist.input_format)?.raw())))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let run = execute(netlist, &frames)?;
    let y = run.outputs.iter().map(|f| f.iter().map(|v| word(netlist, v)).collect()).collect();
    Ok((y, run.saturations))
}

/// 16-sample complex frames: the FFT.
pub fn run_spectra(netlist: &Netlist, frames: &[Vec<ComplexFixed>]) -> Result<(Vec<Vec<ComplexFixed>>, usize)> {
    let values = frames
        .iter()
        .map(|f| {
            if f.len() != netlist.inputs {
                return Err(Error::ArityMismatch {
                    expected: netlist.inputs,
                    actual: f.len(),
                });
            }
            f.iter()
                .map(|z| {
                    let w = z.widen(netlist.input_format)?;
                    Ok(Value::Complex(w.re().raw(), w.im().raw()))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let run = execute(netlist, &values)?;
    let y = run
        .outputs
        .iter()
        .map(|f| {
            f.iter()
                .map(|v| match v {
                    Value::Complex(re, im) => ComplexFixed::from_raw(*re, *im, netlist.output_format).expect("quantized output"),
                    other => panic!("spectrum port carries {other:?}"),
                })
                .collect()
        })
        .collect();
    Ok((y, run.saturations))
}
