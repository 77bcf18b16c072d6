//! MFCC extraction: framing, Hamming window, power spectrum, mel
//! filterbank, log compression, DCT-II, and averaging of the first frames
//! into a fixed-length feature vector.

mod dct;
mod features;
mod mel;
mod spectrum;
mod window;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{AudioClip, ClipSet};
use crate::{Error, Result, Scalar};

pub use dct::{dct_ii, Dct};
pub use features::{FeatureSet, FeatureVector};
pub use mel::{mel_filterbank, mel_scale, mel_to_hz, MelFilterbank};
pub use spectrum::{power_spectrum, SpectrumAnalyzer};
pub use window::{frame_count, frame_signal, hamming_window};

/// How many leading frames are averaged into the feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "SegmentsRepr", try_from = "SegmentsRepr")]
pub enum Segments {
    Count(usize),
    All,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SegmentsRepr {
    Count(usize),
    Word(String),
}

impl From<Segments> for SegmentsRepr {
    fn from(s: Segments) -> Self {
        match s {
            Segments::Count(n) => SegmentsRepr::Count(n),
            Segments::All => SegmentsRepr::Word("all".into()),
        }
    }
}

impl TryFrom<SegmentsRepr> for Segments {
    type Error = Error;

    fn try_from(r: SegmentsRepr) -> Result<Self> {
        match r {
            SegmentsRepr::Count(n) => Ok(Segments::Count(n)),
            SegmentsRepr::Word(w) => w.parse(),
        }
    }
}

impl fmt::Display for Segments {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segments::Count(n) => write!(f, "{n}"),
            Segments::All => f.write_str("all"),
        }
    }
}

impl FromStr for Segments {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Segments::All);
        }
        s.parse::<usize>()
            .map(Segments::Count)
            .map_err(|_| Error::Config(format!("segments must be a positive integer or \"all\", got {s:?}")))
    }
}

/// Extraction hyperparameters. The hop is always half a frame and the FFT
/// size equals the frame length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfccConfig {
    pub frame_length: usize,
    pub n_mfcc: usize,
    pub n_segments: Segments,
    pub n_mel_filters: usize,
    /// Keep coefficient 0 (overall log energy) as the first feature.
    pub include_c0: bool,
    pub log_floor: f64,
}

impl Default for MfccConfig {
    /// The tuned operating point: 2048-sample frames, 19 coefficients, 17 segments.
    fn default() -> Self {
        Self {
            frame_length: 2048,
            n_mfcc: 19,
            n_segments: Segments::Count(17),
            n_mel_filters: 40,
            include_c0: true,
            log_floor: 1e-10,
        }
    }
}

impl MfccConfig {
    pub fn hop_length(&self) -> usize {
        self.frame_length / 2
    }

    pub fn fft_size(&self) -> usize {
        self.frame_length
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_length < 4 || !self.frame_length.is_power_of_two() {
            return Err(Error::Config(format!(
                "frame length {} must be a power of two >= 4",
                self.frame_length
            )));
        }
        let usable = if self.include_c0 { self.n_mel_filters } else { self.n_mel_filters.saturating_sub(1) };
        if self.n_mfcc < 2 || self.n_mfcc > usable {
            return Err(Error::Config(format!(
                "n_mfcc {} must lie in 2..={usable} for {} mel filters",
                self.n_mfcc, self.n_mel_filters
            )));
        }
        if self.n_segments == Segments::Count(0) {
            return Err(Error::Config("n_segments must be at least 1".into()));
        }
        if !(self.log_floor > 0.0 && self.log_floor.is_finite()) {
            return Err(Error::Config("log floor must be positive".into()));
        }
        Ok(())
    }

    fn first_coefficient(&self) -> usize {
        usize::from(!self.include_c0)
    }
}

/// `M x N` cepstral coefficients: one row per coefficient, one column per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfccMatrix<T> {
    rows: Vec<Vec<T>>,
    config: MfccConfig,
}

impl<T: Scalar> MfccMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>, config: MfccConfig) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::EmptyInput("MFCC matrix needs equal, non-empty rows".into()));
        }
        Ok(Self { rows, config })
    }

    pub fn n_coefficients(&self) -> usize {
        self.rows.len()
    }

    pub fn n_frames(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, m: usize) -> &[T] {
        &self.rows[m]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn get(&self, m: usize, frame: usize) -> T {
        self.rows[m][frame]
    }

    pub fn config(&self) -> &MfccConfig {
        &self.config
    }
}

/// Frame-level extraction engine for one configuration and sample rate.
pub struct MfccExtractor<T: Scalar> {
    config: MfccConfig,
    window: Vec<T>,
    filterbank: MelFilterbank<T>,
    dct: Dct<T>,
}

impl<T: Scalar> MfccExtractor<T> {
    pub fn new(config: MfccConfig, sample_rate: u32) -> Result<Self> {
        config.validate()?;
        let filterbank = MelFilterbank::new(config.n_mel_filters, config.fft_size(), sample_rate)?;
        Self::with_filterbank(config, filterbank)
    }

    /// Uses a caller-supplied filterbank instead of the mel design.
    pub fn with_filterbank(config: MfccConfig, filterbank: MelFilterbank<T>) -> Result<Self> {
        if filterbank.fft_size() != config.fft_size() {
            return Err(Error::Config("filterbank FFT size differs from frame length".into()));
        }
        let n_out = config.first_coefficient() + config.n_mfcc;
        if n_out > filterbank.n_filters() {
            return Err(Error::Config(format!(
                "{} coefficients requested from {} filters",
                n_out,
                filterbank.n_filters()
            )));
        }
        Ok(Self {
            window: hamming_window(config.frame_length),
            dct: Dct::new(filterbank.n_filters(), n_out),
            filterbank,
            config,
        })
    }

    pub fn extract(&self, clip: &AudioClip<T>) -> Result<MfccMatrix<T>> {
        if clip.sample_rate() != self.filterbank.sample_rate() {
            return Err(Error::Config(format!(
                "clip {:?} is at {} Hz but the extractor expects {} Hz",
                clip.source_id(),
                clip.sample_rate(),
                self.filterbank.sample_rate()
            )));
        }
        let frames = frame_signal(clip.samples(), self.config.frame_length, self.config.hop_length());
        if frames.is_empty() {
            return Err(Error::EmptyInput(format!(
                "clip {:?} has {} samples, shorter than one {}-sample frame",
                clip.source_id(),
                clip.len(),
                self.config.frame_length
            )));
        }
        let floor = T::of(self.config.log_floor);
        let skip = self.config.first_coefficient();
        let mut analyzer = SpectrumAnalyzer::new(self.config.fft_size());
        let mut windowed = vec![T::zero(); self.config.frame_length];
        let mut power = Vec::new();
        let mut energies = Vec::new();
        let mut rows = vec![Vec::with_capacity(frames.len()); self.config.n_mfcc];
        for frame in frames {
            for ((w, &x), &h) in windowed.iter_mut().zip(frame).zip(&self.window) {
                *w = x * h;
            }
            analyzer.power_into(&windowed, &mut power);
            self.filterbank.apply(&power, &mut energies);
            for e in energies.iter_mut() {
                *e = e.max(floor).ln();
            }
            let cepstrum = self.dct.forward(&energies);
            for (row, &c) in rows.iter_mut().zip(&cepstrum[skip..]) {
                row.push(c);
            }
        }
        MfccMatrix::from_rows(rows, self.config)
    }
}

/// Full MFCC matrix of one clip.
pub fn extract_mfcc<T: Scalar>(clip: &AudioClip<T>, config: &MfccConfig) -> Result<MfccMatrix<T>> {
    MfccExtractor::new(*config, clip.sample_rate())?.extract(clip)
}

/// Per-coefficient mean over the first `segments` frames. The flag is true
/// when fewer frames were available than requested (all of them are used).
pub fn segment_average<T: Scalar>(matrix: &MfccMatrix<T>, segments: Segments) -> (Vec<T>, bool) {
    let n = matrix.n_frames();
    let (take, short) = match segments {
        Segments::All => (n, false),
        Segments::Count(s) => (s.min(n), s > n),
    };
    let denom = T::from_usize(take).expect("frame count fits scalar");
    let values = matrix
        .rows()
        .iter()
        .map(|row| row[..take].iter().copied().sum::<T>() / denom)
        .collect();
    (values, short)
}

/// Extracts one feature vector per clip. Clips are processed in parallel;
/// output order follows the clip set. Returns warnings for clips with fewer
/// frames than requested segments.
pub fn extract_features<T: Scalar>(clips: &ClipSet<T>, config: &MfccConfig) -> Result<(FeatureSet<T>, Vec<String>)> {
    config.validate()?;
    let results: Vec<Result<(FeatureVector<T>, Option<String>)>> = clips
        .rows()
        .par_iter()
        .map(|row| {
            let matrix = extract_mfcc(&row.clip, config)?;
            let (values, short) = segment_average(&matrix, config.n_segments);
            let warning = short.then(|| {
                format!(
                    "{}: {} segments requested but only {} frames available; averaged all frames",
                    row.clip.source_id(),
                    config.n_segments,
                    matrix.n_frames()
                )
            });
            Ok((
                FeatureVector::new(values, row.label, row.clip.source_id().to_string())?,
                warning,
            ))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for r in results {
        let (fv, w) = r?;
        if let Some(w) = w {
            log::warn!("{w}");
            warnings.push(w);
        }
        rows.push(fv);
    }
    Ok((FeatureSet::new(rows, Some(*config))?, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(frame: usize, n_mfcc: usize) -> MfccConfig {
        MfccConfig {
            frame_length: frame,
            n_mfcc,
            n_segments: Segments::All,
            ..MfccConfig::default()
        }
    }

    fn noise_clip(len: usize, rate: u32) -> AudioClip<f64> {
        let mut state = 0x2545_f491_u64;
        let samples = (0..len)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect();
        AudioClip::new(samples, rate, "noise").unwrap()
    }

    #[test]
    fn matrix_shape_after_resampling_virufy_clip() {
        let clip = crate::corpus::resample(&noise_clip(78_960, 48_000), 44_100);
        assert_eq!(clip.len(), 72_545);
        for m in [2, 13, 39] {
            let mat = extract_mfcc(&clip, &config(2048, m)).unwrap();
            assert_eq!((mat.n_coefficients(), mat.n_frames()), (m, 69));
        }
    }

    #[test]
    fn short_clip_is_empty_input() {
        let clip = noise_clip(1000, 44_100);
        assert!(matches!(extract_mfcc(&clip, &config(2048, 13)), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn flat_log_energy_leaves_only_c0() {
        // Every filter sees the same total power, so the log energies are constant.
        let cfg = MfccConfig { n_mel_filters: 8, n_mfcc: 8, ..config(16, 8) };
        let ones = vec![vec![1.0f64; 9]; 8];
        let fb = MelFilterbank::from_weights(ones, 16_000, 16).unwrap();
        let ex = MfccExtractor::with_filterbank(cfg, fb).unwrap();
        let clip = noise_clip(64, 16_000);
        let mat = ex.extract(&clip).unwrap();
        for f in 0..mat.n_frames() {
            assert!(mat.get(0, f).abs() > 0.0);
            for m in 1..8 {
                assert!(mat.get(m, f).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dropping_c0_shifts_coefficients() {
        let clip = noise_clip(8192, 44_100);
        let with = extract_mfcc(&clip, &config(1024, 13)).unwrap();
        let without = extract_mfcc(&clip, &MfccConfig { include_c0: false, ..config(1024, 13) }).unwrap();
        assert_eq!(with.row(1), without.row(0));
        assert_eq!(with.row(12), without.row(11));
    }

    #[test]
    fn segment_average_cases() {
        let m = MfccMatrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]], MfccConfig::default()).unwrap();
        assert_eq!(segment_average(&m, Segments::Count(2)), (vec![1.5, 4.5], false));
        assert_eq!(segment_average(&m, Segments::Count(1)), (vec![1.0, 4.0], false));
        assert_eq!(segment_average(&m, Segments::All), (vec![2.0, 5.0], false));
        assert_eq!(segment_average(&m, Segments::Count(50)), (vec![2.0, 5.0], true));
    }

    #[test]
    fn all_segments_gives_row_means() {
        let rows: Vec<Vec<f64>> = (0..13).map(|m| (0..76).map(|n| (m * 76 + n) as f64).collect()).collect();
        let mat = MfccMatrix::from_rows(rows.clone(), MfccConfig::default()).unwrap();
        let (v, _) = segment_average(&mat, Segments::All);
        assert_eq!(v.len(), 13);
        for (m, r) in rows.iter().enumerate() {
            assert!((v[m] - r.iter().sum::<f64>() / 76.0).abs() < 1e-9);
        }
    }

    #[test]
    fn config_validation() {
        assert!(MfccConfig::default().validate().is_ok());
        assert!(MfccConfig { frame_length: 1000, ..MfccConfig::default() }.validate().is_err());
        assert!(MfccConfig { n_mfcc: 1, ..MfccConfig::default() }.validate().is_err());
        assert!(MfccConfig { n_mfcc: 41, ..MfccConfig::default() }.validate().is_err());
        assert!(MfccConfig { n_mfcc: 40, include_c0: false, ..MfccConfig::default() }.validate().is_err());
        assert!(MfccConfig { n_segments: Segments::Count(0), ..MfccConfig::default() }.validate().is_err());
        assert_eq!("all".parse::<Segments>().unwrap(), Segments::All);
        assert_eq!("17".parse::<Segments>().unwrap(), Segments::Count(17));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let clips = crate::corpus::synth_corpus::<f64>(3, 2);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| extract_features(&clips, &MfccConfig::default()).unwrap());
        let b = four.install(|| extract_features(&clips, &MfccConfig::default()).unwrap());
        assert_eq!(a.0, b.0);
    }
}
