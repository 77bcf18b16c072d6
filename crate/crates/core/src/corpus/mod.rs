//! Audio ingestion: labeled manifests, WAV decoding, resampling, and a
//! deterministic synthetic corpus used as a stand-in for the real recordings.

mod manifest;
mod resample;
mod synth;
mod wav;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Label, Result, Scalar};

pub use manifest::{load_manifest, parse_manifest, write_manifest, CorpusKind, ManifestEntry};
pub use resample::{resample, RESAMPLER_TAPS};
pub use synth::{synth_corpus, SYNTH_SAMPLE_RATE};
pub use wav::{read_wav, write_wav, WavEncoding};

/// Sample rate every clip is brought to before feature extraction.
pub const WORKING_SAMPLE_RATE: u32 = 44_100;

/// A mono buffer of finite samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioClip<T> {
    samples: Vec<T>,
    sample_rate: u32,
    source_id: String,
}

impl<T: Scalar> AudioClip<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32, source_id: impl Into<String>) -> Result<Self> {
        let source_id = source_id.into();
        if samples.is_empty() {
            return Err(Error::EmptyInput(format!("clip {source_id:?} has no samples")));
        }
        if sample_rate == 0 {
            return Err(Error::Validation(format!("clip {source_id:?} has a zero sample rate")));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Validation(format!(
                "clip {source_id:?} has a non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
            source_id,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// Scales the clip so its largest absolute sample is 1. Silent clips are returned as-is.
    pub fn peak_normalized(&self) -> Self {
        let peak = self
            .samples
            .iter()
            .fold(T::zero(), |m, &s| m.max(Float::abs(s)));
        if peak <= T::zero() {
            return self.clone();
        }
        Self {
            samples: self.samples.iter().map(|&s| s / peak).collect(),
            sample_rate: self.sample_rate,
            source_id: self.source_id.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledClip<T> {
    pub clip: AudioClip<T>,
    pub label: Label,
}

/// Labeled clips with unique source ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipSet<T> {
    rows: Vec<LabeledClip<T>>,
}

impl<T: Scalar> ClipSet<T> {
    pub fn new(rows: Vec<LabeledClip<T>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for row in &rows {
            if !seen.insert(row.clip.source_id()) {
                return Err(Error::Validation(format!(
                    "duplicate source id {:?}",
                    row.clip.source_id()
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[LabeledClip<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.rows.iter().filter(|r| r.label == label).count()
    }

    /// Resamples every clip to `rate` (clips already at that rate are untouched).
    pub fn resampled(&self, rate: u32) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| LabeledClip {
                    clip: resample(&r.clip, rate),
                    label: r.label,
                })
                .collect(),
        }
    }

    /// Scales every clip to unit peak amplitude.
    pub fn peak_normalized(&self) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| LabeledClip {
                    clip: r.clip.peak_normalized(),
                    label: r.label,
                })
                .collect(),
        }
    }
}

/// Options applied while turning manifest rows into clips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub target_rate: u32,
    pub peak_normalize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            target_rate: WORKING_SAMPLE_RATE,
            peak_normalize: false,
        }
    }
}

/// Resolves a manifest path: relative paths are taken relative to the manifest's directory.
pub fn resolve_entry_path(manifest_path: &Path, entry: &ManifestEntry) -> PathBuf {
    let p = Path::new(&entry.path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest_path
            .parent()
            .unwrap_or_else(|| Path::new(""))
            .join(p)
    }
}

/// Loads every non-excluded manifest row into a clip set. The manifest path
/// string is used as the source id.
pub fn load_corpus<T: Scalar>(manifest_path: &Path, opts: LoadOptions) -> Result<ClipSet<T>> {
    let entries = load_manifest(manifest_path)?;
    let mut rows = Vec::new();
    for entry in entries.iter().filter(|e| !e.excluded) {
        let wav_path = resolve_entry_path(manifest_path, entry);
        let clip: AudioClip<T> = read_wav(&wav_path)?;
        let clip = AudioClip::new(clip.samples, clip.sample_rate, entry.path.clone())?;
        let mut clip = resample(&clip, opts.target_rate);
        if opts.peak_normalize {
            clip = clip.peak_normalized();
        }
        rows.push(LabeledClip {
            clip,
            label: entry.label,
        });
    }
    ClipSet::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_rejects_bad_input() {
        assert!(AudioClip::<f64>::new(vec![], 100, "a").is_err());
        assert!(AudioClip::<f64>::new(vec![0.1], 0, "a").is_err());
        assert!(AudioClip::<f64>::new(vec![0.1, f64::NAN], 100, "a").is_err());
        assert!(AudioClip::<f32>::new(vec![0.1, 0.2], 100, "a").is_ok());
    }

    #[test]
    fn duplicate_source_ids_rejected() {
        let c = AudioClip::<f64>::new(vec![0.0; 4], 10, "same").unwrap();
        let rows = vec![
            LabeledClip { clip: c.clone(), label: Label::Covid },
            LabeledClip { clip: c, label: Label::NonCovid },
        ];
        assert!(matches!(ClipSet::new(rows), Err(Error::Validation(_))));
    }

    #[test]
    fn peak_normalize_scales_to_unit_peak() {
        let c = AudioClip::<f64>::new(vec![0.1, -0.25, 0.2], 10, "a").unwrap();
        let n = c.peak_normalized();
        assert_eq!(n.samples(), &[0.4, -1.0, 0.8]);
        let silent = AudioClip::<f64>::new(vec![0.0; 3], 10, "s").unwrap();
        assert_eq!(silent.peak_normalized(), silent);
    }
}
