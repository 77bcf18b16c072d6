use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AudioClip, ClipSet, LabeledClip};
use crate::{Label, Scalar};

pub const SYNTH_SAMPLE_RATE: u32 = 44_100;

const CLIP_SAMPLES: usize = 70_560; // 1.6 s
const NOISE_FLOOR: f64 = 2e-3;

struct Voice {
    /// (centre Hz, bandwidth Hz, relative gain)
    formants: [(f64, f64, f64); 3],
    decay_secs: f64,
}

fn voice(label: Label) -> Voice {
    match label {
        Label::Covid => Voice {
            formants: [(350.0, 120.0, 1.0), (1_100.0, 200.0, 0.6), (2_400.0, 300.0, 0.3)],
            decay_secs: 0.16,
        },
        Label::NonCovid => Voice {
            formants: [(750.0, 150.0, 0.5), (1_900.0, 250.0, 1.0), (4_200.0, 400.0, 0.7)],
            decay_secs: 0.09,
        },
    }
}

/// Two-pole resonator driven by `input`.
fn resonate(input: &[f64], centre: f64, bandwidth: f64, rate: f64) -> Vec<f64> {
    let r = (-PI * bandwidth / rate).exp();
    let a1 = 2.0 * r * (2.0 * PI * centre / rate).cos();
    let a2 = -r * r;
    let gain = 1.0 - r;
    let (mut y1, mut y2) = (0.0, 0.0);
    input
        .iter()
        .map(|&x| {
            let y = gain * x + a1 * y1 + a2 * y2;
            y2 = y1;
            y1 = y;
            y
        })
        .collect()
}

fn synth_clip(rng: &mut ChaCha8Rng, label: Label) -> Vec<f64> {
    let rate = f64::from(SYNTH_SAMPLE_RATE);
    let v = voice(label);
    let excitation: Vec<f64> = (0..CLIP_SAMPLES).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut burst = vec![0.0; CLIP_SAMPLES];
    for &(centre, bw, gain) in &v.formants {
        let jitter = rng.gen_range(0.96..1.04);
        for (b, y) in burst
            .iter_mut()
            .zip(resonate(&excitation, centre * jitter, bw, rate))
        {
            *b += gain * y;
        }
    }

    let onset = rng.gen_range(0.03..0.08) * rate;
    let attack = 0.015 * rate;
    let decay = v.decay_secs * rng.gen_range(0.9..1.1) * rate;
    let envelope = |i: usize| {
        let t = i as f64 - onset;
        if t < 0.0 {
            0.0
        } else if t < attack {
            t / attack
        } else {
            (-(t - attack) / decay).exp()
        }
    };
    let peak = burst.iter().fold(0.0f64, |m, s| m.max(s.abs())).max(1e-12);
    let level = rng.gen_range(0.5..0.8) / peak;

    burst
        .iter()
        .enumerate()
        .map(|(i, &b)| level * b * envelope(i) + NOISE_FLOOR * rng.gen_range(-1.0..1.0))
        .collect()
}

/// Deterministic two-class corpus of ~1.6 s single-burst "coughs" at 44.1 kHz.
///
/// The classes differ in resonance placement and decay time, so MFCCs of the
/// two classes are well separated. Clips alternate COVID / non-COVID and are
/// identified as `synth-<label>-<index>`.
pub fn synth_corpus<T: Scalar>(seed: u64, per_class: usize) -> ClipSet<T> {
    assert!(per_class >= 1, "per_class must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * per_class);
    for i in 0..per_class {
        for label in Label::ALL {
            let samples = synth_clip(&mut rng, label).into_iter().map(T::of).collect();
            let clip = AudioClip::new(samples, SYNTH_SAMPLE_RATE, format!("synth-{label}-{i:03}"))
                .expect("synthetic samples are finite");
            rows.push(LabeledClip { clip, label });
        }
    }
    ClipSet::new(rows).expect("synthetic source ids are unique")
}
