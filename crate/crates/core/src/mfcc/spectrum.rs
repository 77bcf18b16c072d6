use std::sync::Arc;

use num_traits::Zero;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::Scalar;

/// Reusable forward FFT for power spectra of a fixed frame length.
pub struct SpectrumAnalyzer<T: Scalar> {
    fft: Arc<dyn Fft<T>>,
    buffer: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Scalar> SpectrumAnalyzer<T> {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "frame length {n} is not a power of two");
        let fft = FftPlanner::new().plan_fft_forward(n);
        let scratch = vec![Complex::zero(); fft.get_inplace_scratch_len()];
        Self {
            fft,
            buffer: vec![Complex::zero(); n],
            scratch,
        }
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// `|X_k|^2` for `k = 0..=n/2`, written into `out`.
    pub fn power_into(&mut self, frame: &[T], out: &mut Vec<T>) {
        assert_eq!(frame.len(), self.buffer.len());
        for (b, &x) in self.buffer.iter_mut().zip(frame) {
            *b = Complex::new(x, T::zero());
        }
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        out.clear();
        out.extend(self.buffer[..=frame.len() / 2].iter().map(|c| c.norm_sqr()));
    }
}

/// One-sided power spectrum of a frame whose length is a power of two.
pub fn power_spectrum<T: Scalar>(frame: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(frame.len() / 2 + 1);
    SpectrumAnalyzer::new(frame.len()).power_into(frame, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_frame() {
        assert!(power_spectrum(&[0.0f64; 32]).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn pure_cosine_lands_in_one_bin() {
        let n = 64;
        let frame: Vec<f64> = (0..n).map(|t| (2.0 * PI * 4.0 * t as f64 / n as f64).cos()).collect();
        let p = power_spectrum(&frame);
        assert_eq!(p.len(), 33);
        assert!((p[4] - 1024.0).abs() < 1e-9);
        for (k, &v) in p.iter().enumerate() {
            if k != 4 {
                assert!(v.abs() < 1e-9, "bin {k} = {v}");
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let frame: Vec<f32> = (0..16).map(|t| (t as f32 * 0.3).sin()).collect();
        let p = power_spectrum(&frame);
        assert_eq!(p.len(), 9);
        assert!(p.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}
