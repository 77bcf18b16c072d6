use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Hz to mel: `2595 log10(1 + f / 700)`.
pub fn mel_scale(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

/// Inverse of [`mel_scale`].
pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filterbank over the one-sided spectrum.
///
/// Knots are equally spaced in mel from 0 Hz to Nyquist (`n_filters + 2` of
/// them). Filter `m` rises linearly from knot `m` to 1 at knot `m + 1` and falls
/// back to 0 at knot `m + 2`; each FFT bin is weighted by evaluating the
/// triangle at the bin's frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelFilterbank<T> {
    weights: Vec<Vec<T>>,
    centers_hz: Vec<f64>,
    sample_rate: u32,
    fft_size: usize,
}

impl<T: Scalar> MelFilterbank<T> {
    pub fn new(n_filters: usize, fft_size: usize, sample_rate: u32) -> Result<Self> {
        if n_filters == 0 {
            return Err(Error::Config("filterbank needs at least one filter".into()));
        }
        if fft_size < 2 || sample_rate == 0 {
            return Err(Error::Config(format!(
                "invalid filterbank geometry: fft_size {fft_size}, rate {sample_rate}"
            )));
        }
        let n_bins = fft_size / 2 + 1;
        let nyquist = f64::from(sample_rate) / 2.0;
        let top = mel_scale(nyquist);
        let mut knots: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
            .collect();
        knots[0] = 0.0;
        knots[n_filters + 1] = nyquist;
        let bin_hz = f64::from(sample_rate) / fft_size as f64;

        let mut weights = Vec::with_capacity(n_filters);
        for m in 0..n_filters {
            let (lo, mid, hi) = (knots[m], knots[m + 1], knots[m + 2]);
            let row: Vec<T> = (0..n_bins)
                .map(|k| {
                    let f = k as f64 * bin_hz;
                    let w = if f <= lo || f >= hi {
                        0.0
                    } else if f <= mid {
                        (f - lo) / (mid - lo)
                    } else {
                        (hi - f) / (hi - mid)
                    };
                    T::of(w)
                })
                .collect();
            if row.iter().all(|w| *w <= T::zero()) {
                return Err(Error::Config(format!(
                    "{n_filters} mel filters are too many for a {fft_size}-point FFT at {sample_rate} Hz: filter {m} covers no bin"
                )));
            }
            weights.push(row);
        }
        Ok(Self {
            weights,
            centers_hz: knots[1..=n_filters].to_vec(),
            sample_rate,
            fft_size,
        })
    }

    /// Builds a filterbank from explicit weights (used to probe the pipeline).
    pub fn from_weights(weights: Vec<Vec<T>>, sample_rate: u32, fft_size: usize) -> Result<Self> {
        let n_bins = fft_size / 2 + 1;
        if weights.is_empty() || weights.iter().any(|r| r.len() != n_bins) {
            return Err(Error::Config(format!("filterbank rows must have {n_bins} bins")));
        }
        Ok(Self {
            centers_hz: vec![f64::NAN; weights.len()],
            weights,
            sample_rate,
            fft_size,
        })
    }

    pub fn weights(&self) -> &[Vec<T>] {
        &self.weights
    }

    pub fn centers_hz(&self) -> &[f64] {
        &self.centers_hz
    }

    pub fn n_filters(&self) -> usize {
        self.weights.len()
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Filter energies for a one-sided power spectrum.
    pub fn apply(&self, power: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(
            self.weights
                .iter()
                .map(|row| row.iter().zip(power).map(|(&w, &p)| w * p).sum::<T>()),
        );
    }
}

/// Convenience wrapper around [`MelFilterbank::new`] returning the weight matrix.
pub fn mel_filterbank<T: Scalar>(n_filters: usize, fft_size: usize, sample_rate: u32) -> Result<Vec<Vec<T>>> {
    MelFilterbank::new(n_filters, fft_size, sample_rate).map(|fb| fb.weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mel_reference_points() {
        assert_eq!(mel_scale(0.0), 0.0);
        assert!((mel_scale(700.0) - 2595.0 * 2f64.log10()).abs() < 1e-12);
        assert!((mel_scale(700.0) - 781.17).abs() < 5e-3);
        assert!((mel_scale(22_050.0) - 3923.33).abs() < 1e-2);
    }

    #[test]
    fn mel_round_trip_and_monotone() {
        let mut prev = -1.0;
        for i in 0..=2205 {
            let f = i as f64 * 10.0;
            let m = mel_scale(f);
            assert!(m > prev);
            prev = m;
            assert!((mel_to_hz(m) - f).abs() < 1e-9);
        }
    }

    #[test]
    fn triangle_shape() {
        for &(n, fft, rate) in &[(40, 2048, 44_100), (40, 512, 44_100), (26, 1024, 16_000), (40, 4096, 44_100)] {
            let fb = MelFilterbank::<f64>::new(n, fft, rate).unwrap();
            let bin_hz = f64::from(rate) / fft as f64;
            for (m, row) in fb.weights().iter().enumerate() {
                let max = row.iter().cloned().fold(0.0, f64::max);
                assert!(max > 0.0 && max <= 1.0);
                assert_eq!(row.iter().filter(|&&w| (w - max).abs() <= 1e-12).count(), 1);
                let (lo, hi) = if m == 0 { (0.0, fb.centers_hz()[1]) } else if m + 1 == n {
                    (fb.centers_hz()[m - 1], f64::from(rate) / 2.0)
                } else {
                    (fb.centers_hz()[m - 1], fb.centers_hz()[m + 1])
                };
                for (k, &w) in row.iter().enumerate() {
                    assert!((0.0..=1.0).contains(&w));
                    let f = k as f64 * bin_hz;
                    if f <= lo || f >= hi {
                        assert_eq!(w, 0.0, "filter {m} bin {k} f {f} lo {lo} hi {hi}");
                    }
                }
            }
        }
    }

    #[test]
    fn centers_equally_spaced_in_mel() {
        let fb = MelFilterbank::<f64>::new(40, 2048, 44_100).unwrap();
        let step = mel_scale(22_050.0) / 41.0;
        let bin_hz = 44_100.0 / 2048.0;
        for (m, (&c, row)) in fb.centers_hz().iter().zip(fb.weights()).enumerate() {
            assert!((mel_scale(c) - step * (m + 1) as f64).abs() < 1e-9);
            if m > 0 {
                assert!(c > fb.centers_hz()[m - 1]);
            }
            let nearest = (c / bin_hz).round();
            assert!((nearest * bin_hz - c).abs() <= bin_hz / 2.0);
            let argmax = row
                .iter()
                .enumerate()
                .fold((0, -1.0), |a, (k, &w)| if w > a.1 { (k, w) } else { a })
                .0;
            assert!((argmax as f64 * bin_hz - c).abs() <= bin_hz);
        }
    }

    #[test]
    fn interior_sum_in_unit_interval() {
        let fb = MelFilterbank::<f64>::new(40, 2048, 44_100).unwrap();
        for k in 1..1024 {
            let s: f64 = fb.weights().iter().map(|r| r[k]).sum();
            assert!(s > 0.0 && s <= 1.0 + 1e-12, "bin {k}: {s}");
        }
    }

    #[test]
    fn too_many_filters_rejected() {
        assert!(matches!(MelFilterbank::<f64>::new(200, 64, 44_100), Err(Error::Config(_))));
        assert!(MelFilterbank::<f64>::new(0, 64, 44_100).is_err());
    }
}
