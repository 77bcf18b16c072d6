use std::f64::consts::PI;

use super::AudioClip;
use crate::Scalar;

/// Length of the windowed-sinc interpolation kernel.
pub const RESAMPLER_TAPS: usize = 32;

const HALF_WIDTH: f64 = (RESAMPLER_TAPS / 2) as f64;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn hann(u: f64) -> f64 {
    if u.abs() >= HALF_WIDTH {
        0.0
    } else {
        0.5 * (1.0 + (PI * u / HALF_WIDTH).cos())
    }
}

/// Band-limited resampling with a 32-tap Hann-windowed sinc kernel.
///
/// Output length is `round(len * target / source)`. When downsampling the
/// kernel cutoff moves to the new Nyquist. Samples outside the clip are
/// treated as zero, and the kernel weights at each output position are
/// normalised to unit DC gain.
pub fn resample<T: Scalar>(clip: &AudioClip<T>, target_rate: u32) -> AudioClip<T> {
    assert!(target_rate > 0, "target sample rate must be positive");
    let source_rate = clip.sample_rate();
    if source_rate == target_rate {
        return clip.clone();
    }
    let input: Vec<f64> = clip.samples().iter().map(|s| s.as_f64()).collect();
    let ratio = f64::from(target_rate) / f64::from(source_rate);
    let out_len = ((input.len() as f64) * ratio).round().max(1.0) as usize;
    let cutoff = ratio.min(1.0);
    let step = f64::from(source_rate) / f64::from(target_rate);

    let mut out = Vec::with_capacity(out_len);
    for j in 0..out_len {
        let t = j as f64 * step;
        let base = t.floor() as i64;
        let mut acc = 0.0;
        let mut norm = 0.0;
        for k in (base - HALF_WIDTH as i64 + 1)..=(base + HALF_WIDTH as i64) {
            let u = t - k as f64;
            let w = cutoff * sinc(cutoff * u) * hann(u);
            norm += w;
            if k >= 0 && (k as usize) < input.len() {
                acc += w * input[k as usize];
            }
        }
        out.push(T::of(if norm != 0.0 { acc / norm } else { 0.0 }));
    }
    AudioClip::new(out, target_rate, clip.source_id().to_string())
        .expect("resampled finite input stays finite")
}
