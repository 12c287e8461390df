use ddanneal::noise::{sample_trace, static_disorder, NoiseSpectrum};
use proptest::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

fn std_of(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn empirical_std_equals_amplitude(amplitude in 0.1f64..2000.0, seed: u64, correlated: bool) {
        let spectrum = NoiseSpectrum::two_peak(3.0, amplitude).unwrap();
        let trace = sample_trace(&spectrum, 2000, 0.1, 3, correlated, seed).unwrap();
        for q in 0..3 {
            prop_assert!((std_of(trace.column(q)) - amplitude).abs() < 1e-9 * amplitude);
        }
    }
}

#[test]
fn same_seed_same_trace() {
    let spectrum = NoiseSpectrum::two_peak(3.0, 1.0).unwrap();
    let a = sample_trace(&spectrum, 1000, 0.1, 4, false, 9).unwrap();
    let b = sample_trace(&spectrum, 1000, 0.1, 4, false, 9).unwrap();
    let c = sample_trace(&spectrum, 1000, 0.1, 4, false, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.column(0), c.column(0));
}

#[test]
fn correlation_flag_controls_sharing() {
    let spectrum = NoiseSpectrum::two_peak(3.0, 1.0).unwrap();
    let shared = sample_trace(&spectrum, 500, 0.1, 3, true, 1).unwrap();
    assert!(shared.column(1) == shared.column(0) && shared.column(2) == shared.column(0));
    let own = sample_trace(&spectrum, 500, 0.1, 3, false, 1).unwrap();
    assert!(own.column(1) != own.column(0));

    let fixed = static_disorder(0.5, 3, 100, 0.01, false, 1).unwrap();
    assert!(fixed.column(0).iter().all(|&v| v == fixed.column(0)[0]));
    assert_ne!(fixed.value(0, 0), fixed.value(0, 1));
    let fixed = static_disorder(0.5, 3, 100, 0.01, true, 1).unwrap();
    assert_eq!(fixed.value(7, 0), fixed.value(7, 2));
}

/// Periodogram of a single-qubit trace, summed over seeds.
fn periodogram(spectrum: &NoiseSpectrum, n: usize, duration: f64, seeds: u64) -> Vec<f64> {
    let mut power = vec![0.0; n / 2];
    for seed in 0..seeds {
        let trace = sample_trace(spectrum, n, duration, 1, true, seed).unwrap();
        let mut bins: Vec<Complex64> = trace.column(0).iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut bins);
        for (p, b) in power.iter_mut().zip(&bins) {
            *p += b.norm_sqr();
        }
    }
    power
}

#[test]
fn periodogram_peaks_at_the_lorentzian_centres() {
    let (n, duration) = (4096, 2.0);
    let df = 1.0 / duration;
    let spectrum = NoiseSpectrum::single_peak(80.0, 3.0, 1.0).unwrap();
    let power = periodogram(&spectrum, n, duration, 20);
    let peak = (1..power.len()).max_by(|&a, &b| power[a].total_cmp(&power[b])).unwrap();
    assert!((peak as f64 * df - 80.0).abs() <= 3.0, "peak at {} Hz", peak as f64 * df);

    let two = NoiseSpectrum::two_peak(3.0, 1.0).unwrap();
    let power = periodogram(&two, n, duration, 20);
    let band = |lo: f64, hi: f64| -> f64 {
        power[(lo / df) as usize..(hi / df) as usize].iter().sum()
    };
    let (near50, near150, between) = (band(44.0, 56.0), band(132.0, 168.0), band(80.0, 120.0));
    assert!(near50 > 5.0 * between && near150 > 5.0 * between);
}
