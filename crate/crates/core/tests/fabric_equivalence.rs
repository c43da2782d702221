use fpda_core::cosine::dct16;
use fpda_core::fabric::{account, build, run_blocks, run_spectra, run_stream, CmKind, ConfigMode, FunctionSpec};
use fpda_core::filter::{fir_filter, iir_filter, FirSpec, IirSpec};
use fpda_core::fourier::{fft16, FftPlan};
use fpda_core::numerics::{ComplexFixed, FixedPoint, QFormat};
use fpda_core::wavelet::{decimate, level_output_format, Branch, DilationPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn samples(rng: &mut ChaCha8Rng, n: usize, format: QFormat) -> Vec<FixedPoint> {
    (0..n)
        .map(|_| FixedPoint::from_raw(rng.gen_range(format.min_raw()..=format.max_raw()), format).unwrap())
        .collect()
}

#[test]
fn fir_netlist_matches_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for taps in [1usize, 5, 16] {
        let coeffs: Vec<f64> = (0..taps).map(|_| rng.gen_range(-0.9..0.9)).collect();
        let spec = FirSpec::from_values(&coeffs).unwrap();
        let net = build(&FunctionSpec::Fir(spec.clone())).unwrap();
        for _ in 0..20 {
            let x = samples(&mut rng, 64, QFormat::Q1_7);
            assert_eq!(run_stream(&net, &x).unwrap().0, fir_filter(&spec, &x));
        }
    }
}

#[test]
fn iir_netlist_matches_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let a: Vec<f64> = (0..16).map(|_| rng.gen_range(-0.1..0.1)).collect();
        let b: Vec<f64> = (0..15).map(|_| rng.gen_range(-0.06..0.06)).collect();
        let spec = IirSpec::from_values(&a, &b).unwrap();
        let net = build(&FunctionSpec::Iir(spec.clone())).unwrap();
        let x = samples(&mut rng, 100, QFormat::Q1_7);
        assert_eq!(run_stream(&net, &x).unwrap().0, iir_filter(&spec, &x));
    }
}

#[test]
fn dwt_netlist_matches_decimator() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pair = DilationPair::daubechies8();
    for branch in [Branch::Lowpass, Branch::Highpass] {
        for input in [QFormat::Q1_7, QFormat::new(2, 6).unwrap()] {
            let net = build(&FunctionSpec::Dwt { pair: pair.clone(), branch, input }).unwrap();
            let filt = pair.branch_filter(branch, level_output_format(input));
            for n in [64usize, 65, 9] {
                let x = samples(&mut rng, n, input);
                let got = run_stream(&net, &x).unwrap().0;
                assert_eq!(got.len(), n / 2);
                assert_eq!(got, decimate(&filt, &x));
            }
        }
    }
}

#[test]
fn fft_netlist_matches_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for scaled in [false, true] {
        let plan = FftPlan::new().with_stage_scaling(scaled);
        let net = build(&FunctionSpec::Fft(plan.clone())).unwrap();
        let frames: Vec<Vec<ComplexFixed>> = (0..10)
            .map(|_| {
                let re = samples(&mut rng, 16, QFormat::Q2_13);
                let im = samples(&mut rng, 16, QFormat::Q2_13);
                re.into_iter().zip(im).map(|(r, i)| ComplexFixed::new(r, i).unwrap()).collect()
            })
            .collect();
        let (got, _) = run_spectra(&net, &frames).unwrap();
        assert_eq!(got.len(), frames.len());
        for (g, f) in got.iter().zip(&frames) {
            assert_eq!(g, &fft16(&plan, f).unwrap());
        }
    }
}

#[test]
fn dct_netlist_matches_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = build(&FunctionSpec::Dct).unwrap();
    let blocks: Vec<Vec<FixedPoint>> = (0..10).map(|_| samples(&mut rng, 16, QFormat::Q2_13)).collect();
    let (got, _) = run_blocks(&net, &blocks).unwrap();
    assert_eq!(got.len(), blocks.len());
    for (g, b) in got.iter().zip(&blocks) {
        assert_eq!(g, &dct16(b).unwrap());
    }
}

#[test]
fn census_rows() {
    let fir = build(&FunctionSpec::Fir(FirSpec::from_values(&[0.1; 16]).unwrap())).unwrap();
    let iir = build(&FunctionSpec::Iir(IirSpec::from_values(&[0.1; 16], &[0.05; 15]).unwrap())).unwrap();
    let dwt = build(&FunctionSpec::default_dwt()).unwrap();
    let fft = build(&FunctionSpec::Fft(FftPlan::new())).unwrap();
    let dct = build(&FunctionSpec::Dct).unwrap();
    for n in [&fir, &iir, &fft, &dct] {
        let r = account(n);
        assert!(r.all_match(), "{}", r.render_text());
    }
    let r = account(&dwt);
    assert_eq!(r.mode, ConfigMode::Dwt);
    assert!(!r.row(CmKind::Lut).matches);
    assert_eq!(r.row(CmKind::Lut).used, 16);
    assert!(r.rows.iter().filter(|x| x.kind != CmKind::Lut).all(|x| x.matches), "{}", r.render_text());
    assert!(r.mismatches_explained());
}
