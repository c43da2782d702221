//! Sample files in and out.

use std::io::Write;
use std::path::Path;

use fpda_core::cosine::DCT_SIZE;
use fpda_core::fabric::ConfigMode;
use fpda_core::formats::{complex_to_fixed, format_complex, format_reals, format_rows, parse_blocks, parse_complex, parse_reals, parse_rows, reals_to_fixed};
use fpda_core::fourier::FFT_SIZE;
use fpda_core::numerics::{ComplexFixed, FixedPoint, QFormat};
use rand::Rng;

use crate::pipeline::Input;
use crate::CliError;

fn parse(e: fpda_core::Error) -> CliError {
    CliError::parse(e.to_string())
}

/// Reads the file layout for `mode`: reals for the filters and the
/// decimator, `re,im` lines in frames of 16 for the FFT, 16-value rows (or
/// 16x16 blocks with `blocks`) for the DCT.
pub fn parse_input(mode: ConfigMode, text: &str, format: QFormat, blocks: bool) -> Result<Input, CliError> {
    match mode {
        ConfigMode::Fir | ConfigMode::Iir | ConfigMode::Dwt => {
            Ok(Input::Stream(reals_to_fixed(&parse_reals(text).map_err(parse)?, format).map_err(parse)?))
        }
        ConfigMode::Fft => {
            let v = parse_complex(text).map_err(parse)?;
            if v.len() % FFT_SIZE != 0 {
                let line = v.last().map_or(0, |r| r.0);
                return Err(CliError::parse(format!(
                    "parse error at line {line}: {} samples do not form whole {FFT_SIZE}-point frames",
                    v.len()
                )));
            }
            let z = complex_to_fixed(&v, format).map_err(parse)?;
            Ok(Input::Frames(z.chunks(FFT_SIZE).map(<[_]>::to_vec).collect()))
        }
        ConfigMode::Dct if blocks => {
            let b = parse_blocks(text).map_err(parse)?;
            let to_fixed = |row: &Vec<f64>| -> Result<Vec<FixedPoint>, CliError> {
                row.iter().map(|&v| fpda_core::formats::fixed(0, v, format).map_err(parse)).collect()
            };
            let fixed = b
                .iter()
                .map(|block| block.iter().map(to_fixed).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Input::Blocks(fixed))
        }
        ConfigMode::Dct => {
            let rows = parse_rows(text).map_err(parse)?;
            let fixed = rows
                .iter()
                .map(|(line, r)| r.iter().map(|&v| fpda_core::formats::fixed(*line, v, format).map_err(parse)).collect())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Input::Rows(fixed))
        }
    }
}

fn raw_sample(rng: &mut impl Rng, format: QFormat, scale: f64) -> FixedPoint {
    let hi = (format.max_raw() as f64 * scale) as i64;
    FixedPoint::from_raw(rng.gen_range(-hi..=hi), format).expect("inside the format")
}

/// A random input at half scale: 256 stream samples, 4 FFT frames, 4 DCT
/// rows or one 2-D block.
pub fn random_input(mode: ConfigMode, format: QFormat, blocks: bool, rng: &mut impl Rng) -> Input {
    let mut real = |n: usize| -> Vec<FixedPoint> { (0..n).map(|_| raw_sample(rng, format, 0.5)).collect() };
    match mode {
        ConfigMode::Fir | ConfigMode::Iir | ConfigMode::Dwt => Input::Stream(real(256)),
        ConfigMode::Fft => Input::Frames(
            (0..4)
                .map(|_| {
                    let v = real(2 * FFT_SIZE);
                    v.chunks(2).map(|p| ComplexFixed::new(p[0], p[1]).expect("same format")).collect()
                })
                .collect(),
        ),
        ConfigMode::Dct if blocks => Input::Blocks(vec![(0..DCT_SIZE).map(|_| real(DCT_SIZE)).collect()]),
        ConfigMode::Dct => Input::Rows((0..4).map(|_| real(DCT_SIZE)).collect()),
    }
}

/// The input file text for `input`, in the same layout `parse_input` reads.
pub fn render_input(input: &Input) -> String {
    match input {
        Input::Stream(x) => format_reals(x),
        Input::Frames(f) => format_complex(&f.concat()),
        Input::Rows(r) => format_rows(r),
        Input::Blocks(b) => format_rows(&b.concat()),
    }
}

/// Output text in the layout matching the input's.
pub fn render_output(input: &Input, y: &[FixedPoint]) -> String {
    match input {
        Input::Stream(_) => format_reals(y),
        Input::Frames(_) => {
            let z: Vec<ComplexFixed> = y
                .chunks(2)
                .map(|p| ComplexFixed::new(p[0], p[1]).expect("same format"))
                .collect();
            format_complex(&z)
        }
        Input::Rows(_) | Input::Blocks(_) => {
            let rows: Vec<Vec<FixedPoint>> = y.chunks(DCT_SIZE).map(<[_]>::to_vec).collect();
            format_rows(&rows)
        }
    }
}

/// Writes through a temporary file in the target directory, so the target
/// either keeps its old contents or holds the complete new text.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_inputs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (mode, format, blocks) in [
            (ConfigMode::Fir, QFormat::Q1_7, false),
            (ConfigMode::Fft, QFormat::Q2_13, false),
            (ConfigMode::Dct, QFormat::Q2_13, false),
            (ConfigMode::Dct, QFormat::Q2_13, true),
        ] {
            let input = random_input(mode, format, blocks, &mut rng);
            assert_eq!(parse_input(mode, &render_input(&input), format, blocks).unwrap(), input);
        }
    }

    #[test]
    fn partial_fft_frame_is_a_parse_error() {
        let e = parse_input(ConfigMode::Fft, "1,0\n", QFormat::Q2_13, false).unwrap_err();
        assert_eq!(e.code, 2);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
