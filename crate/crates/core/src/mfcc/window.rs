use std::f64::consts::PI;

use crate::Scalar;

/// Periodic Hamming window: `0.54 - 0.46 cos(2 pi i / n)`.
pub fn hamming_window<T: Scalar>(n: usize) -> Vec<T> {
    assert!(n >= 2, "window length must be at least 2");
    (0..n)
        .map(|i| T::of(0.54 - 0.46 * (2.0 * PI * i as f64 / n as f64).cos()))
        .collect()
}

/// Splits `samples` into frames of `frame_length` starting every `hop_length`
/// samples. A trailing partial frame is dropped.
pub fn frame_signal<T>(samples: &[T], frame_length: usize, hop_length: usize) -> Vec<&[T]> {
    assert!(frame_length >= 2 && hop_length >= 1);
    if samples.len() < frame_length {
        return Vec::new();
    }
    (0..=(samples.len() - frame_length) / hop_length)
        .map(|f| &samples[f * hop_length..f * hop_length + frame_length])
        .collect()
}

/// Number of full frames `frame_signal` produces.
pub fn frame_count(len: usize, frame_length: usize, hop_length: usize) -> usize {
    if len < frame_length {
        0
    } else {
        (len - frame_length) / hop_length + 1
    }
}
