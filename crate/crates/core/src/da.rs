//! Distributed-arithmetic building blocks.
//!
//! Two table shapes are provided:
//!
//! * [`CoefficientUnit`]: two 16-entry tables per coefficient, addressed by
//!   the low (unsigned) and high (signed) nibble of an 8-bit sample. The
//!   FIR, IIR and wavelet paths use these.
//! * [`RowLut`]: one 16-entry table holding every subset sum of four
//!   coefficients, addressed by one bit plane of four samples at a time.
//!   The DCT uses these for its 4-wide matrix rows.
//!
//! Neither shape multiplies at evaluation time: outputs come from table
//! reads, shifts and adds only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{FixedPoint, WideAccumulator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NibbleRole {
    /// Bits 3..0, unsigned weight 1.
    Low,
    /// Bits 7..4, two's-complement weight 16.
    High,
}

impl NibbleRole {
    /// Numeric weight of a 4-bit address under this role.
    pub fn weight(self, address: u8) -> i64 {
        let a = (address & 0xF) as i64;
        match self {
            NibbleRole::Low => a,
            NibbleRole::High => {
                if a >= 8 {
                    a - 16
                } else {
                    a
                }
            }
        }
    }

    /// Extracts this role's nibble from an 8-bit two's-complement sample.
    pub fn address(self, sample_raw: i64) -> u8 {
        let byte = (sample_raw & 0xFF) as u8;
        match self {
            NibbleRole::Low => byte & 0xF,
            NibbleRole::High => byte >> 4,
        }
    }
}

/// Sixteen precomputed `coefficient * weight(address)` products.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaLut {
    entries: [i64; 16],
    role: NibbleRole,
    coefficient: FixedPoint,
}

impl DaLut {
    pub fn new(coefficient: FixedPoint, role: NibbleRole) -> Self {
        let mut entries = [0i64; 16];
        for (address, entry) in entries.iter_mut().enumerate() {
            *entry = coefficient.raw() * role.weight(address as u8);
        }
        Self {
            entries,
            role,
            coefficient,
        }
    }

    pub fn entries(&self) -> &[i64; 16] {
        &self.entries
    }

    pub fn role(&self) -> NibbleRole {
        self.role
    }

    pub fn coefficient(&self) -> FixedPoint {
        self.coefficient
    }

    pub fn lookup(&self, address: u8) -> i64 {
        self.entries[(address & 0xF) as usize]
    }

    /// Reads the entry selected by this table's nibble of `sample_raw`.
    pub fn read(&self, sample_raw: i64) -> i64 {
        self.lookup(self.role.address(sample_raw))
    }
}

/// The two tables that together replace one coefficient multiplier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientUnit {
    low: DaLut,
    high: DaLut,
}

impl CoefficientUnit {
    pub fn low(&self) -> &DaLut {
        &self.low
    }

    pub fn high(&self) -> &DaLut {
        &self.high
    }

    pub fn coefficient(&self) -> FixedPoint {
        self.low.coefficient
    }

    /// `low + (high << 4)` for an 8-bit sample, as a raw integer.
    pub fn product_raw(&self, sample_raw: i64) -> i64 {
        self.low.read(sample_raw) + (self.high.read(sample_raw) << 4)
    }
}

pub fn build_unit(coefficient: FixedPoint) -> CoefficientUnit {
    CoefficientUnit {
        low: DaLut::new(coefficient, NibbleRole::Low),
        high: DaLut::new(coefficient, NibbleRole::High),
    }
}

/// Multiplier-free `coefficient * sample` for an 8-bit sample.
pub fn eval_unit(unit: &CoefficientUnit, sample: FixedPoint) -> WideAccumulator {
    assert_eq!(
        sample.format().total_bits(),
        8,
        "coefficient units take 8-bit samples"
    );
    WideAccumulator::new(
        unit.product_raw(sample.raw()),
        unit.coefficient().format().fraction_bits() + sample.format().fraction_bits(),
    )
}

/// Visits the adds of a balanced binary tree over `n` leaves, left half
/// taking the extra leaf on odd splits. `combine(a, b)` receives node
/// handles and returns the handle of their sum, so the same shape drives
/// both arithmetic and netlist construction.
pub fn adder_tree<T: Clone>(leaves: &[T], combine: &mut impl FnMut(T, T) -> T) -> T {
    assert!(!leaves.is_empty(), "adder tree needs at least one leaf");
    if leaves.len() == 1 {
        return leaves[0].clone();
    }
    let split = leaves.len().div_ceil(2);
    let left = adder_tree(&leaves[..split], combine);
    let right = adder_tree(&leaves[split..], combine);
    combine(left, right)
}

/// Adder count and depth of the tree built by [`adder_tree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeCensus {
    pub adders: usize,
    pub depth: usize,
}

pub fn tree_census(leaves: usize) -> TreeCensus {
    let mut adders = 0;
    let depth = adder_tree(&vec![0usize; leaves.max(1)], &mut |a: usize, b: usize| {
        adders += 1;
        a.max(b) + 1
    });
    TreeCensus { adders, depth }
}

/// Exact dot product through coefficient units and a balanced adder tree.
pub fn da_dot(units: &[CoefficientUnit], samples: &[FixedPoint]) -> Result<WideAccumulator> {
    if units.len() != samples.len() || units.is_empty() {
        return Err(Error::LengthMismatch {
            expected: units.len().max(1),
            actual: samples.len(),
        });
    }
    let products: Vec<WideAccumulator> = units
        .iter()
        .zip(samples)
        .map(|(u, &s)| eval_unit(u, s))
        .collect();
    Ok(adder_tree(&products, &mut |a: WideAccumulator, b| a.add(b)))
}

/// Subset-sum table over four coefficients: entry `a` is the sum of the
/// coefficients whose bit is set in `a` (bit `j` selects coefficient `j`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowLut {
    entries: [i64; 16],
    coefficients: [FixedPoint; 4],
}

impl RowLut {
    pub fn new(coefficients: [FixedPoint; 4]) -> Self {
        let mut entries = [0i64; 16];
        for (address, entry) in entries.iter_mut().enumerate() {
            *entry = (0..4)
                .filter(|j| address & (1 << j) != 0)
                .map(|j| coefficients[j].raw())
                .sum();
        }
        Self {
            entries,
            coefficients,
        }
    }

    pub fn entries(&self) -> &[i64; 16] {
        &self.entries
    }

    pub fn coefficients(&self) -> &[FixedPoint; 4] {
        &self.coefficients
    }

    /// One table read per bit plane of the `width`-bit two's-complement
    /// samples, least significant plane first.
    pub fn read_planes(&self, samples: [i64; 4], width: u32) -> Vec<i64> {
        for &s in &samples {
            debug_assert!(fits_width(s, width), "sample {s} exceeds {width} bits");
        }
        (0..width)
            .map(|p| {
                let address = (0..4).fold(0usize, |acc, j| {
                    acc | ((((samples[j] >> p) & 1) as usize) << j)
                });
                self.entries[address]
            })
            .collect()
    }

    /// Exact `sum_j coefficient_j * sample_j`.
    pub fn eval(&self, samples: [i64; 4], width: u32) -> i64 {
        let planes = self.read_planes(samples, width);
        let magnitude = accumulate_planes(&planes);
        magnitude - sign_plane(&planes)
    }
}

/// Shift-accumulate of every plane except the sign plane.
pub fn accumulate_planes(planes: &[i64]) -> i64 {
    planes[..planes.len() - 1]
        .iter()
        .enumerate()
        .map(|(p, &v)| v << p)
        .sum()
}

/// Weighted sign plane, subtracted under two's complement.
pub fn sign_plane(planes: &[i64]) -> i64 {
    planes[planes.len() - 1] << (planes.len() - 1)
}

pub fn fits_width(value: i64, width: u32) -> bool {
    let half = 1i64 << (width - 1);
    (-half..half).contains(&value)
}
