//! Per-mode netlist construction.

use super::netlist::{ControlLine, Netlist, NetlistBuilder, NodeId, Op, Timing, Value};
use super::{ConfigMode, FunctionSpec};
use crate::cosine::{even_plane_width, odd_plane_width, Dct16, DCT_COEFFICIENT, DCT_SAMPLE};
use crate::da::{adder_tree, build_unit, CoefficientUnit};
use crate::error::Result;
use crate::filter::{FirSpec, IirSpec, COEFFICIENT, SAMPLE};
use crate::fourier::{bit_reverse, butterfly_positions, FftPlan, TwiddleEntry, BUTTERFLIES, FFT_SAMPLE, FFT_SIZE, FFT_STAGES, TWIDDLE};
use crate::numerics::QFormat;
use crate::wavelet::{level_output_format, Branch, DilationPair, DWT_TAPS};

pub fn build(spec: &FunctionSpec) -> Result<Netlist> {
    match spec {
        FunctionSpec::Fir(s) => build_fir(s),
        FunctionSpec::Iir(s) => build_iir(s),
        FunctionSpec::Dwt { pair, branch, input } => build_dwt(pair, *branch, *input),
        FunctionSpec::Fft(plan) => build_fft(plan),
        FunctionSpec::Dct => build_dct(),
    }
}

fn register(b: &mut NetlistBuilder, d: &[NodeId], label: String) -> NodeId {
    b.add(
        Op::Register {
            init: Value::Word(0),
            when: true,
        },
        d,
        label,
    )
}

/// Delay line of `len` registers; the first latches `input`.
fn delay_line(b: &mut NetlistBuilder, input: NodeId, len: usize, name: &str) -> Vec<NodeId> {
    let mut regs = Vec::with_capacity(len);
    let mut prev = input;
    for k in 0..len {
        prev = register(b, &[prev], format!("{name}{k}"));
        regs.push(prev);
    }
    regs
}

/// Two nibble tables per tap, one adder joining them, then a balanced tree.
fn da_sum(b: &mut NetlistBuilder, units: &[CoefficientUnit], taps: &[NodeId], name: &str) -> NodeId {
    let products: Vec<NodeId> = units
        .iter()
        .zip(taps)
        .enumerate()
        .map(|(k, (u, &x))| {
            let lo = b.add(Op::NibbleLut(u.low().clone()), &[x], format!("{name}.lut{k}.lo"));
            let hi = b.add(Op::NibbleLut(u.high().clone()), &[x], format!("{name}.lut{k}.hi"));
            b.add(Op::Add { shift: 4 }, &[lo, hi], format!("{name}.unit{k}"))
        })
        .collect();
    tree(b, &products, name)
}

fn tree(b: &mut NetlistBuilder, leaves: &[NodeId], name: &str) -> NodeId {
    let mut n = 0;
    adder_tree(leaves, &mut |l, r| {
        n += 1;
        b.add(Op::Add { shift: 0 }, &[l, r], format!("{name}.tree{n}"))
    })
}

/// Input select driven by the mode's decoder bit: sample or zero.
fn input_select(b: &mut NetlistBuilder) -> NodeId {
    let x = b.add(Op::Input(0), &[], "x");
    let zero = b.add(Op::Const(Value::Word(0)), &[], "zero");
    let en = b.add(Op::Control(ControlLine::ModeEnable), &[], "c_mode");
    b.add(Op::Mux2, &[en, zero, x], "input_select")
}

fn product_fraction(sample: QFormat) -> u32 {
    (sample.fraction_bits() + COEFFICIENT.fraction_bits()) as u32
}

pub fn build_fir(spec: &FirSpec) -> Result<Netlist> {
    let mut b = NetlistBuilder::new();
    let x = input_select(&mut b);
    let taps = delay_line(&mut b, x, spec.len(), "x");
    let sum = da_sum(&mut b, spec.units(), &taps, "fir");
    let out = spec.output();
    let shift = product_fraction(SAMPLE) - out.fraction_bits() as u32;
    let y = b.add(Op::Quantize { shift, format: out }, &[sum], "round");
    b.add(Op::Output(0), &[y], "y");
    b.finish(ConfigMode::Fir, SAMPLE, out, Value::Word(0), Timing::streaming(1))
}

pub fn build_iir(spec: &IirSpec) -> Result<Netlist> {
    let mut b = NetlistBuilder::new();
    let x = input_select(&mut b);
    let taps = delay_line(&mut b, x, spec.len(), "x");
    let forward = da_sum(&mut b, spec.forward().units(), &taps, "forward");
    let shift = product_fraction(SAMPLE) - SAMPLE.fraction_bits() as u32;
    let feedback_len = spec.feedback().len();
    // The feedback registers are created first and closed over y below.
    let fb: Vec<NodeId> = (0..feedback_len).map(|k| register(&mut b, &[], format!("y{k}"))).collect();
    let total = if feedback_len == 0 {
        forward
    } else {
        let back = da_sum(&mut b, spec.feedback_units(), &fb, "feedback");
        b.add(Op::Add { shift: 0 }, &[forward, back], "join")
    };
    let bias = b.add(Op::RoundBias { shift }, &[total], "round_bias");
    let biased = b.add(Op::Add { shift: 0 }, &[total, bias], "round");
    let shifted = b.add(Op::Shift { shift }, &[biased], "shift");
    let y = b.add(Op::Quantize { shift: 0, format: SAMPLE }, &[shifted], "saturate");
    b.add(Op::Output(0), &[y], "y");
    for (k, &r) in fb.iter().enumerate() {
        let d = if k == 0 { y } else { fb[k - 1] };
        b.connect(r, &[d]);
    }
    b.finish(ConfigMode::Iir, SAMPLE, SAMPLE, Value::Word(0), Timing::streaming(1))
}

/// Two-phase polyphase decimator. The counter alternates between the odd
/// taps (phase 0) and the even taps (phase 1) of the branch filter, so four
/// coefficient slots serve all eight taps: slot `j` reads the delayed
/// sample `x[t-1-2j]` through a pair of banked nibble tables. Phase 0's
/// partial sum is parked in a register and added to phase 1's; the result
/// is latched on phase 1 and presented while the counter reads 0.
pub fn build_dwt(pair: &DilationPair, branch: Branch, input: QFormat) -> Result<Netlist> {
    let taps = pair.taps(branch);
    let mut b = NetlistBuilder::new();
    let x = b.add(Op::Input(0), &[], "x");
    let counter = b.add(Op::Counter1, &[], "phase");
    let line = delay_line(&mut b, x, DWT_TAPS - 1, "x");
    let mut leaves = Vec::with_capacity(DWT_TAPS / 2);
    for j in 0..DWT_TAPS / 2 {
        let odd = build_unit(taps[2 * j + 1]);
        let even = build_unit(taps[2 * j]);
        let sample = line[2 * j];
        let lo = b.add(
            Op::BankedLut(Box::new([odd.low().clone(), even.low().clone()])),
            &[sample, counter],
            format!("slot{j}.lo"),
        );
        let hi = b.add(
            Op::BankedLut(Box::new([odd.high().clone(), even.high().clone()])),
            &[sample, counter],
            format!("slot{j}.hi"),
        );
        leaves.push(b.add(Op::Add { shift: 4 }, &[lo, hi], format!("slot{j}")));
    }
    let partial = tree(&mut b, &leaves, "dwt");
    let parked = b.add(
        Op::Register {
            init: Value::Word(0),
            when: false,
        },
        &[partial, counter],
        "odd_partial",
    );
    let sum = b.add(Op::Add { shift: 0 }, &[parked, partial], "accumulate");
    let out = level_output_format(input);
    let shift = product_fraction(input) - out.fraction_bits() as u32;
    let y = b.add(Op::Quantize { shift, format: out }, &[sum, counter], "round");
    let held = b.add(
        Op::Register {
            init: Value::Word(0),
            when: true,
        },
        &[y, counter],
        "hold",
    );
    b.add(Op::Output(0), &[held], "y");
    let timing = Timing {
        valid: Some((counter, false)),
        ..Timing::streaming(1)
    };
    b.finish(ConfigMode::Dwt, input, out, Value::Word(0), timing)
}

/// Where each position lives in the working bank after `stage`: butterfly
/// `b` writes its top output to `W[2b]` and its bottom output to `W[2b+1]`.
fn location_after(stage: usize) -> [usize; FFT_SIZE] {
    let mut loc = [0; FFT_SIZE];
    for bf in 0..BUTTERFLIES {
        let (i, j, _) = butterfly_positions(stage, bf);
        loc[i] = 2 * bf;
        loc[j] = 2 * bf + 1;
    }
    loc
}

/// Eight butterflies reused over four stages. Input, working and output
/// banks hold 16 complex registers each; 4:1 multiplexers on the butterfly
/// inputs pick the input bank in stage 0 and the working bank afterwards.
pub fn build_fft(plan: &FftPlan) -> Result<Netlist> {
    let mut b = NetlistBuilder::new();
    let cplx = || Value::Complex(0, 0);
    let inputs: Vec<NodeId> = (0..FFT_SIZE).map(|p| b.add(Op::Input(p), &[], format!("x{p}"))).collect();
    let load_in = b.add(Op::Control(ControlLine::LoadInput), &[], "c_load_input");
    let load_out = b.add(Op::Control(ControlLine::LoadOutput), &[], "c_load_output");
    let stage_en = b.add(Op::Control(ControlLine::StageEnable), &[], "c_stage");
    let s0 = b.add(Op::Control(ControlLine::StageS0), &[], "s0");
    let s1 = b.add(Op::Control(ControlLine::StageS1), &[], "s1");
    let s2 = b.add(Op::Control(ControlLine::Scalable), &[], "s2");
    let bank = |b: &mut NetlistBuilder, name: &str| -> Vec<NodeId> {
        (0..FFT_SIZE)
            .map(|k| b.add(Op::Register { init: cplx(), when: true }, &[], format!("{name}{k}")))
            .collect()
    };
    let in_bank = bank(&mut b, "I");
    let work = bank(&mut b, "W");
    let out_bank = bank(&mut b, "O");
    for (k, &r) in in_bank.iter().enumerate() {
        b.connect(r, &[inputs[bit_reverse(k, FFT_STAGES as u32)], load_in]);
    }
    let locations: Vec<[usize; FFT_SIZE]> = (0..FFT_STAGES).map(location_after).collect();
    let scale = u32::from(plan.stage_scaling());
    for bf in 0..BUTTERFLIES {
        let operand = |b: &mut NetlistBuilder, pick: &dyn Fn(usize) -> usize, name: &str| {
            let sources: Vec<NodeId> = (0..FFT_STAGES)
                .map(|s| {
                    if s == 0 {
                        in_bank[pick(0)]
                    } else {
                        work[locations[s - 1][pick(s)]]
                    }
                })
                .collect();
            b.add(
                Op::Mux4,
                &[s0, s1, sources[0], sources[1], sources[2], sources[3]],
                format!("bf{bf}.{name}_select"),
            )
        };
        let top = operand(&mut b, &|s| butterfly_positions(s, bf).0, "top");
        let bottom = operand(&mut b, &|s| butterfly_positions(s, bf).1, "bottom");

        let table: Vec<TwiddleEntry> = (0..FFT_STAGES).map(|s| plan.twiddles()[butterfly_positions(s, bf).2]).collect();
        let rom = b.add(Op::TwiddleRom(table), &[s0, s1], format!("bf{bf}.rom"));
        let (pair, c) = if bf == 0 {
            let c = b.add(Op::TwiddleField(2), &[rom], "bf0.c");
            (rom, c)
        } else {
            // Alternate twiddle for a chained 32-point pass.
            let chain = b.add(
                Op::Const(Value::Twiddle(TwiddleEntry::unit_root(bf, 2 * FFT_SIZE).raw())),
                &[],
                format!("bf{bf}.chain"),
            );
            let pair = b.add(Op::Mux2, &[s2, rom, chain], format!("bf{bf}.pair_select"));
            let rom_c = b.add(Op::TwiddleField(2), &[rom], format!("bf{bf}.rom_c"));
            let chain_c = b.add(Op::TwiddleField(2), &[chain], format!("bf{bf}.chain_c"));
            let c = b.add(Op::Mux2, &[s2, rom_c, chain_c], format!("bf{bf}.c_select"));
            (pair, c)
        };
        let c_minus_s = b.add(Op::TwiddleField(0), &[pair], format!("bf{bf}.c_minus_s"));
        let c_plus_s = b.add(Op::TwiddleField(1), &[pair], format!("bf{bf}.c_plus_s"));

        let re = b.add(Op::Re, &[bottom], format!("bf{bf}.a"));
        let im = b.add(Op::Im, &[bottom], format!("bf{bf}.b"));
        let shared = b.add(Op::Sub { shift: 0 }, &[re, im], format!("bf{bf}.a_minus_b"));
        let p_b = b.add(Op::Mul, &[c_minus_s, im], format!("bf{bf}.mul_b"));
        let p_shared = b.add(Op::Mul, &[c, shared], format!("bf{bf}.mul_shared"));
        let p_a = b.add(Op::Mul, &[c_plus_s, re], format!("bf{bf}.mul_a"));
        let r = b.add(Op::Add { shift: 0 }, &[p_b, p_shared], format!("bf{bf}.r"));
        let i = b.add(Op::Sub { shift: 0 }, &[p_a, p_shared], format!("bf{bf}.i"));
        let tw_shift = TWIDDLE.fraction_bits() as u32;
        let rq = b.add(Op::Quantize { shift: tw_shift, format: FFT_SAMPLE }, &[r, stage_en], format!("bf{bf}.r_round"));
        let iq = b.add(Op::Quantize { shift: tw_shift, format: FFT_SAMPLE }, &[i, stage_en], format!("bf{bf}.i_round"));
        let wb = b.add(Op::Join, &[rq, iq], format!("bf{bf}.wb"));
        let sum = b.add(Op::Add { shift: 0 }, &[top, wb], format!("bf{bf}.sum"));
        let diff = b.add(Op::Sub { shift: 0 }, &[top, wb], format!("bf{bf}.diff"));
        let sum_q = b.add(Op::Quantize { shift: scale, format: FFT_SAMPLE }, &[sum, stage_en], format!("bf{bf}.sum_round"));
        let diff_q = b.add(Op::Quantize { shift: scale, format: FFT_SAMPLE }, &[diff, stage_en], format!("bf{bf}.diff_round"));
        b.connect(work[2 * bf], &[sum_q, stage_en]);
        b.connect(work[2 * bf + 1], &[diff_q, stage_en]);
    }
    let last = &locations[FFT_STAGES - 1];
    for (p, &r) in out_bank.iter().enumerate() {
        b.connect(r, &[work[last[p]], load_out]);
        b.add(Op::Output(p), &[r], format!("X{p}"));
    }
    let timing = Timing {
        period: FFT_STAGES + 1,
        input_phase: 0,
        output_phase: 1,
        warmup: FFT_STAGES + 1,
        flush: 2,
        valid: None,
        scalable: plan.scalable(),
    };
    b.finish(ConfigMode::Fft, FFT_SAMPLE, FFT_SAMPLE, cplx(), timing)
}

/// Even/odd pre-stage, 24 row tables with plane accumulators, and eight
/// odd-output joins behind the scalable select.
pub fn build_dct() -> Result<Netlist> {
    let tables = Dct16::standard();
    let mut b = NetlistBuilder::new();
    let regs: Vec<NodeId> = (0..16)
        .map(|p| {
            let x = b.add(Op::Input(p), &[], format!("x{p}"));
            register(&mut b, &[x], format!("X{p}"))
        })
        .collect();
    let s2 = b.add(Op::Control(ControlLine::Scalable), &[], "s2");
    let s1: Vec<NodeId> = (0..8).map(|i| b.add(Op::Add { shift: 0 }, &[regs[i], regs[15 - i]], format!("s{i}"))).collect();
    let d1: Vec<NodeId> = (0..8).map(|i| b.add(Op::Sub { shift: 0 }, &[regs[i], regs[15 - i]], format!("d{i}"))).collect();
    let ee: Vec<NodeId> = (0..4).map(|i| b.add(Op::Add { shift: 0 }, &[s1[i], s1[7 - i]], format!("ee{i}"))).collect();
    let eo: Vec<NodeId> = (0..4).map(|i| b.add(Op::Sub { shift: 0 }, &[s1[i], s1[7 - i]], format!("eo{i}"))).collect();
    let width = DCT_SAMPLE.total_bits();
    let row = |b: &mut NetlistBuilder, lut: &crate::da::RowLut, xs: &[NodeId], width: u32, name: String| {
        let planes = b.add(Op::RowLut { lut: lut.clone(), width }, xs, format!("{name}.lut"));
        let acc = b.add(Op::PlaneAccumulate, &[planes], format!("{name}.acc"));
        b.add(Op::SignPlaneSub, &[acc, planes], format!("{name}.sign"))
    };
    let mut y: Vec<Option<NodeId>> = vec![None; 16];
    for r in 0..4 {
        y[4 * r] = Some(row(&mut b, &tables.even_even[r], &ee, even_plane_width(width), format!("Y{}", 4 * r)));
        y[4 * r + 2] = Some(row(&mut b, &tables.even_odd[r], &eo, even_plane_width(width), format!("Y{}", 4 * r + 2)));
    }
    for r in 0..8 {
        let k = 2 * r + 1;
        let left = row(&mut b, &tables.odd_left[r], &d1[..4], odd_plane_width(width), format!("Y{k}.left"));
        let right = row(&mut b, &tables.odd_right[r], &d1[4..], odd_plane_width(width), format!("Y{k}.right"));
        let joined = b.add(Op::Add { shift: 0 }, &[left, right], format!("Y{k}.join"));
        y[k] = Some(b.add(Op::Mux2, &[s2, joined, left], format!("Y{k}.select")));
    }
    let shift = DCT_COEFFICIENT.fraction_bits() as u32;
    for (k, v) in y.into_iter().enumerate() {
        let q = b.add(Op::Quantize { shift, format: DCT_SAMPLE }, &[v.expect("every output")], format!("Y{k}.round"));
        let r = register(&mut b, &[q], format!("Y{k}"));
        b.add(Op::Output(k), &[r], format!("y{k}"));
    }
    let timing = Timing::streaming(2);
    b.finish(ConfigMode::Dct, DCT_SAMPLE, DCT_SAMPLE, Value::Word(0), timing)
}
