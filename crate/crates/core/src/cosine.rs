//! 16-point DCT by even/odd decomposition with distributed-arithmetic rows.
//!
//! With `s1[i] = x[i] + x[15-i]` and `d1[i] = x[i] - x[15-i]` the even
//! outputs only see `s1` and the odd outputs only see `d1`. A second split
//! of `s1` into `s1[i] +- s1[7-i]` separates `Y[4r]` from `Y[4r+2]`. What
//! is left is six small matrices: two 4x4 even blocks and an 8x8 odd block
//! stored as left and right 8x4 halves.
//!
//! Every 4-wide matrix row becomes one [`RowLut`], read one bit plane of
//! its four inputs at a time.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::da::RowLut;
use crate::error::{Error, Result};
use crate::numerics::{quantize, round_shift, FixedPoint, QFormat};
use crate::oracle;

pub const DCT_SIZE: usize = 16;
pub const DCT_SAMPLE: QFormat = QFormat::Q2_13;
pub const DCT_COEFFICIENT: QFormat = QFormat::Q1_15;
/// The constant 1.0 block transforms to 2.0, so the 2-D result needs a
/// third integer bit.
pub const DCT2D_OUTPUT: QFormat = QFormat::new_unchecked(3, 13);

/// Bit-plane width of the even-path row inputs for `width`-bit samples.
pub fn even_plane_width(width: u32) -> u32 {
    width + 2
}

/// Bit-plane width of the odd-path row inputs for `width`-bit samples.
pub fn odd_plane_width(width: u32) -> u32 {
    width + 1
}

/// Word width used for the column pass of [`dct2d`].
pub const COLUMN_PASS_WIDTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    M,
    N,
    O,
}

impl Letter {
    pub const ALL: [Letter; 15] = [
        Letter::A,
        Letter::B,
        Letter::C,
        Letter::D,
        Letter::E,
        Letter::F,
        Letter::G,
        Letter::H,
        Letter::I,
        Letter::J,
        Letter::K,
        Letter::L,
        Letter::M,
        Letter::N,
        Letter::O,
    ];

    /// `j` such that the letter is `cos(j pi / 32)`.
    pub fn angle(self) -> u32 {
        const J: [u32; 15] = [8, 4, 12, 2, 6, 10, 14, 1, 3, 5, 7, 9, 11, 13, 15];
        J[self as usize]
    }

    pub fn value(self) -> f64 {
        (self.angle() as f64 * std::f64::consts::PI / 32.0).cos()
    }

    pub fn symbol(self) -> char {
        (b'A' + self as u8) as char
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedLetter {
    pub negative: bool,
    pub letter: Letter,
}

impl SignedLetter {
    pub fn value(self) -> f64 {
        if self.negative {
            -self.letter.value()
        } else {
            self.letter.value()
        }
    }

    /// The signed letter whose value is within `1e-12` of `v`.
    pub fn matching(v: f64) -> Option<Self> {
        Letter::ALL.iter().find_map(|&letter| {
            let l = letter.value();
            if (v - l).abs() < 1e-12 {
                Some(Self { negative: false, letter })
            } else if (v + l).abs() < 1e-12 {
                Some(Self { negative: true, letter })
            } else {
                None
            }
        })
    }
}

impl fmt::Display for SignedLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        write!(f, "{}", self.letter.symbol())
    }
}

impl FromStr for SignedLetter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            message: format!("not a DCT constant: {s:?}"),
        };
        let t = s.trim();
        let (negative, rest) = match t.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, t),
        };
        let mut chars = rest.chars();
        let c = chars.next().ok_or_else(bad)?;
        if chars.next().is_some() {
            return Err(bad());
        }
        let letter = Letter::ALL.iter().copied().find(|l| l.symbol() == c).ok_or_else(bad)?;
        Ok(Self { negative, letter })
    }
}

/// The fifteen cosines A..O in Q1.15.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DctConstants {
    values: [FixedPoint; 15],
}

impl Default for DctConstants {
    fn default() -> Self {
        Self::new()
    }
}

impl DctConstants {
    pub fn new() -> Self {
        Self {
            values: Letter::ALL.map(|l| quantize(l.value(), DCT_COEFFICIENT).expect("cosines below 1")),
        }
    }

    pub fn get(&self, letter: Letter) -> FixedPoint {
        self.values[letter as usize]
    }
}

type Block4 = [[SignedLetter; 4]; 4];
type Block8 = [[SignedLetter; 4]; 8];

/// Matrices of the even/odd split. Entries already include `C_k`; the
/// common `2/N` factor is applied separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DctDecomposition {
    /// Rows `Y0, Y4, Y8, Y12` over `s1[i] + s1[7-i]`.
    pub even_even: Block4,
    /// Rows `Y2, Y6, Y10, Y14` over `s1[i] - s1[7-i]`.
    pub even_odd: Block4,
    /// Rows `Y1, Y3, ..., Y15` over `d1[0..4]`.
    pub odd_left: Block8,
    /// Rows `Y1, Y3, ..., Y15` over `d1[4..8]`.
    pub odd_right: Block8,
}

/// Reference blocks, kept as letters for comparison.
const PRINTED_EVEN_EVEN: [[&str; 4]; 4] = [
    ["A", "A", "A", "A"],
    ["B", "C", "-C", "-B"],
    ["A", "-A", "-A", "A"],
    ["C", "-B", "B", "-C"],
];

const PRINTED_EVEN_ODD: [[&str; 4]; 4] = [
    ["D", "E", "F", "G"],
    ["E", "-G", "-D", "-F"],
    ["F", "-G", "D", "E"],
    ["G", "-F", "D", "-E"],
];

const PRINTED_ODD: [[&str; 4]; 8] = [
    ["H", "I", "J", "K"],
    ["I", "L", "O", "-M"],
    ["J", "O", "-K", "-I"],
    ["K", "-M", "-I", "O"],
    ["L", "-J", "-N", "H"],
    ["M", "-H", "L", "N"],
    ["N", "-K", "H", "-J"],
    ["O", "-N", "M", "-L"],
];

fn parse_block<const R: usize>(rows: &[[&str; 4]; R]) -> [[SignedLetter; 4]; R] {
    rows.map(|row| row.map(|s| s.parse().expect("valid transcription")))
}

pub fn printed_even_even() -> Block4 {
    parse_block(&PRINTED_EVEN_EVEN)
}

pub fn printed_even_odd() -> Block4 {
    parse_block(&PRINTED_EVEN_ODD)
}

/// Only the left half of the odd block has a reference.
pub fn printed_odd_left() -> Block8 {
    parse_block(&PRINTED_ODD)
}

/// One entry where a reference block disagrees with the derivation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDiff {
    pub block: String,
    /// Output index `k` of the row.
    pub output: usize,
    pub column: usize,
    pub printed: SignedLetter,
    pub derived: SignedLetter,
}

impl fmt::Display for MatrixDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} Y{} column {}: printed {}, derived {}",
            self.block, self.output, self.column, self.printed, self.derived
        )
    }
}

fn entry(k: usize, m: usize) -> SignedLetter {
    let ck = if k == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
    let v = ck * (m as f64 * std::f64::consts::PI / 32.0).cos();
    SignedLetter::matching(v).unwrap_or_else(|| panic!("cos({m} pi/32) for Y{k} is not a table constant"))
}

/// Splits the 16-point transform into the six 4-wide blocks, computing every
/// entry from the transform definition.
pub fn derive_decomposition(n: usize) -> Result<DctDecomposition> {
    if n != DCT_SIZE {
        return Err(Error::UnsupportedSize(n));
    }
    let mut dec = DctDecomposition {
        even_even: [[entry(0, 0); 4]; 4],
        even_odd: [[entry(0, 0); 4]; 4],
        odd_left: [[entry(0, 0); 4]; 8],
        odd_right: [[entry(0, 0); 4]; 8],
    };
    for r in 0..4 {
        for i in 0..4 {
            // cos((2i+1) k pi / 32) with k = 4r and 4r+2
            dec.even_even[r][i] = entry(4 * r, (2 * i + 1) * 4 * r);
            dec.even_odd[r][i] = entry(4 * r + 2, (2 * i + 1) * (4 * r + 2));
        }
    }
    for r in 0..8 {
        let k = 2 * r + 1;
        for i in 0..4 {
            dec.odd_left[r][i] = entry(k, (2 * i + 1) * k);
            dec.odd_right[r][i] = entry(k, (2 * (i + 4) + 1) * k);
        }
    }
    Ok(dec)
}

impl DctDecomposition {
    /// Evaluates the decomposition in double precision.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != DCT_SIZE {
            return Err(Error::LengthMismatch {
                expected: DCT_SIZE,
                actual: x.len(),
            });
        }
        let s1: Vec<f64> = (0..8).map(|i| x[i] + x[15 - i]).collect();
        let d1: Vec<f64> = (0..8).map(|i| x[i] - x[15 - i]).collect();
        let ee: Vec<f64> = (0..4).map(|i| s1[i] + s1[7 - i]).collect();
        let eo: Vec<f64> = (0..4).map(|i| s1[i] - s1[7 - i]).collect();
        let dot = |row: &[SignedLetter; 4], v: &[f64]| row.iter().zip(v).map(|(c, x)| c.value() * x).sum::<f64>();
        let scale = 2.0 / DCT_SIZE as f64;
        let mut y = vec![0.0; DCT_SIZE];
        for r in 0..4 {
            y[4 * r] = scale * dot(&self.even_even[r], &ee);
            y[4 * r + 2] = scale * dot(&self.even_odd[r], &eo);
        }
        for r in 0..8 {
            y[2 * r + 1] = scale * (dot(&self.odd_left[r], &d1[..4]) + dot(&self.odd_right[r], &d1[4..]));
        }
        Ok(y)
    }

    /// Every disagreement between the derived and the reference blocks.
    pub fn diff_printed(&self) -> Vec<MatrixDiff> {
        let mut out = Vec::new();
        let mut compare = |block: &str, derived: &[[SignedLetter; 4]], printed: &[[SignedLetter; 4]], output: &dyn Fn(usize) -> usize| {
            for (r, (d, p)) in derived.iter().zip(printed).enumerate() {
                for c in 0..4 {
                    if d[c] != p[c] {
                        out.push(MatrixDiff {
                            block: block.to_string(),
                            output: output(r),
                            column: c,
                            printed: p[c],
                            derived: d[c],
                        });
                    }
                }
            }
        };
        compare("even_even", &self.even_even, &printed_even_even(), &|r| 4 * r);
        compare("even_odd", &self.even_odd, &printed_even_odd(), &|r| 4 * r + 2);
        compare("odd_left", &self.odd_left, &printed_odd_left(), &|r| 2 * r + 1);
        out
    }
}

/// Row tables for the fixed-point transform. Coefficients are the signed
/// constants divided by 8, in Q1.15.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dct16 {
    pub even_even: [RowLut; 4],
    pub even_odd: [RowLut; 4],
    pub odd_left: [RowLut; 8],
    pub odd_right: [RowLut; 8],
}

fn row_lut(row: &[SignedLetter; 4]) -> RowLut {
    let scale = 2.0 / DCT_SIZE as f64;
    RowLut::new(row.map(|c| quantize(scale * c.value(), DCT_COEFFICIENT).expect("below 1/8")))
}

impl Dct16 {
    pub fn new(dec: &DctDecomposition) -> Self {
        Self {
            even_even: dec.even_even.each_ref().map(row_lut),
            even_odd: dec.even_odd.each_ref().map(row_lut),
            odd_left: dec.odd_left.each_ref().map(row_lut),
            odd_right: dec.odd_right.each_ref().map(row_lut),
        }
    }

    pub fn standard() -> &'static Dct16 {
        static TABLES: OnceLock<Dct16> = OnceLock::new();
        TABLES.get_or_init(|| Dct16::new(&derive_decomposition(DCT_SIZE).expect("16 points")))
    }

    /// Exact transform of `width`-bit integers. The result carries 15 more
    /// fraction bits than the input.
    pub fn transform_raw(&self, x: &[i64; 16], width: u32) -> [i64; 16] {
        let s1: [i64; 8] = std::array::from_fn(|i| x[i] + x[15 - i]);
        let d1: [i64; 8] = std::array::from_fn(|i| x[i] - x[15 - i]);
        let ee: [i64; 4] = std::array::from_fn(|i| s1[i] + s1[7 - i]);
        let eo: [i64; 4] = std::array::from_fn(|i| s1[i] - s1[7 - i]);
        let left: [i64; 4] = std::array::from_fn(|i| d1[i]);
        let right: [i64; 4] = std::array::from_fn(|i| d1[i + 4]);
        let (we, wo) = (even_plane_width(width), odd_plane_width(width));
        let mut y = [0i64; 16];
        for r in 0..4 {
            y[4 * r] = self.even_even[r].eval(ee, we);
            y[4 * r + 2] = self.even_odd[r].eval(eo, we);
        }
        for r in 0..8 {
            y[2 * r + 1] = self.odd_left[r].eval(left, wo) + self.odd_right[r].eval(right, wo);
        }
        y
    }
}

fn check_len(len: usize) -> Result<()> {
    if len != DCT_SIZE {
        return Err(Error::LengthMismatch {
            expected: DCT_SIZE,
            actual: len,
        });
    }
    Ok(())
}

fn to_q2_13(x: &[FixedPoint]) -> Result<[i64; 16]> {
    check_len(x.len())?;
    let mut raw = [0i64; 16];
    for (r, v) in raw.iter_mut().zip(x) {
        *r = v.widen(DCT_SAMPLE)?.raw();
    }
    Ok(raw)
}

fn saturate(raw: i64, format: QFormat) -> FixedPoint {
    FixedPoint::saturating(raw, format).0
}

/// 16-point transform in Q2.13. Inputs in narrower formats are widened.
pub fn dct16(input: &[FixedPoint]) -> Result<Vec<FixedPoint>> {
    let x = to_q2_13(input)?;
    let y = Dct16::standard().transform_raw(&x, DCT_SAMPLE.total_bits());
    let shift = DCT_COEFFICIENT.fraction_bits() as u32;
    Ok(y.iter().map(|&v| saturate(round_shift(v, shift), DCT_SAMPLE)).collect())
}

/// Unrounded 16-point transform: raw values with 28 fraction bits.
pub fn dct16_exact(input: &[FixedPoint]) -> Result<[i64; 16]> {
    let x = to_q2_13(input)?;
    Ok(Dct16::standard().transform_raw(&x, DCT_SAMPLE.total_bits()))
}

fn check_block(block: &[Vec<FixedPoint>]) -> Result<()> {
    let cols = block.first().map_or(0, Vec::len);
    if block.len() != DCT_SIZE || block.iter().any(|r| r.len() != DCT_SIZE) {
        return Err(Error::ShapeMismatch {
            rows: block.len(),
            cols,
        });
    }
    Ok(())
}

/// Row pass, then column pass over the unrounded row results; one rounding
/// into Q3.13 at the end.
pub fn dct2d(block: &[Vec<FixedPoint>]) -> Result<Vec<Vec<FixedPoint>>> {
    check_block(block)?;
    let tables = Dct16::standard();
    let rows: Vec<[i64; 16]> = block
        .iter()
        .map(|r| Ok(tables.transform_raw(&to_q2_13(r)?, DCT_SAMPLE.total_bits())))
        .collect::<Result<_>>()?;
    let mut out = vec![vec![FixedPoint::zero(DCT2D_OUTPUT); DCT_SIZE]; DCT_SIZE];
    let shift = 2 * DCT_COEFFICIENT.fraction_bits() as u32;
    for c in 0..DCT_SIZE {
        let column: [i64; 16] = std::array::from_fn(|r| rows[r][c]);
        let y = tables.transform_raw(&column, COLUMN_PASS_WIDTH);
        for (r, v) in y.iter().enumerate() {
            out[r][c] = saturate(round_shift(*v, shift), DCT2D_OUTPUT);
        }
    }
    Ok(out)
}

/// Double-precision reference for [`dct16`], rounded into Q2.13.
pub fn dct_reference(input: &[FixedPoint]) -> Result<Vec<FixedPoint>> {
    check_len(input.len())?;
    let x: Vec<f64> = input.iter().map(|v| v.value()).collect();
    let scale = (DCT_SAMPLE.fraction_bits() as f64).exp2();
    Ok(oracle::dct_direct(&x)
        .iter()
        .map(|v| saturate((v * scale).round() as i64, DCT_SAMPLE))
        .collect())
}
