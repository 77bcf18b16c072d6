use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use sha2::{Digest, Sha256};

use crate::corpus::ClipSet;
use crate::mfcc::{extract_features, FeatureSet, MfccConfig};
use crate::{Error, Result, Scalar};

enum Source<T> {
    Clips(ClipSet<T>),
    Features(Arc<FeatureSet<T>>),
}

/// Feature sets per MFCC configuration, memoised in memory and optionally on
/// disk under a content hash of (corpus, configuration).
pub struct FeatureStore<T> {
    source: Source<T>,
    corpus_hash: String,
    memo: Mutex<HashMap<String, Arc<FeatureSet<T>>>>,
    disk: Option<PathBuf>,
}

/// SHA-256 over source ids, labels, rates and raw sample bits.
pub fn corpus_fingerprint<T: Scalar>(clips: &ClipSet<T>) -> String {
    let mut h = Sha256::new();
    for row in clips.rows() {
        h.update(row.clip.source_id().as_bytes());
        h.update([0]);
        h.update(row.label.as_str().as_bytes());
        h.update(row.clip.sample_rate().to_le_bytes());
        h.update((row.clip.len() as u64).to_le_bytes());
        for s in row.clip.samples() {
            h.update(s.as_f64().to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

fn config_key(config: &MfccConfig) -> String {
    serde_json::to_string(config).expect("config serialises")
}

impl<T: Scalar> FeatureStore<T> {
    pub fn from_clips(clips: ClipSet<T>) -> Self {
        Self {
            corpus_hash: corpus_fingerprint(&clips),
            source: Source::Clips(clips),
            memo: Mutex::new(HashMap::new()),
            disk: None,
        }
    }

    /// A store over precomputed features; only that configuration is available.
    pub fn from_features(features: FeatureSet<T>) -> Self {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&features).expect("features serialise"));
        Self {
            corpus_hash: hex::encode(h.finalize()),
            source: Source::Features(Arc::new(features)),
            memo: Mutex::new(HashMap::new()),
            disk: None,
        }
    }

    /// Enables the on-disk cache in `dir` (created on first write).
    pub fn with_disk_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.disk = Some(dir.into());
        self
    }

    pub fn corpus_hash(&self) -> &str {
        &self.corpus_hash
    }

    pub fn has_audio(&self) -> bool {
        matches!(self.source, Source::Clips(_))
    }

    /// Cache key of a configuration over this corpus.
    pub fn cache_key(&self, config: &MfccConfig) -> String {
        let mut h = Sha256::new();
        h.update(self.corpus_hash.as_bytes());
        h.update(config_key(config).as_bytes());
        hex::encode(h.finalize())
    }

    fn disk_path(&self, dir: &Path, config: &MfccConfig) -> PathBuf {
        dir.join(format!("{}.json", self.cache_key(config)))
    }

    pub fn features(&self, config: &MfccConfig) -> Result<Arc<FeatureSet<T>>> {
        let clips = match &self.source {
            Source::Features(f) => {
                return match f.config() {
                    Some(c) if c != config => Err(Error::Config(
                        "features were loaded from a file; other MFCC settings need the audio corpus".into(),
                    )),
                    _ => Ok(Arc::clone(f)),
                };
            }
            Source::Clips(c) => c,
        };
        let key = config_key(config);
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return Ok(Arc::clone(hit));
        }
        let features = match &self.disk {
            Some(dir) => {
                let path = self.disk_path(dir, config);
                match std::fs::File::open(&path) {
                    Ok(f) => FeatureSet::read_json(std::io::BufReader::new(f))?,
                    Err(_) => {
                        let (fs, _) = extract_features(clips, config)?;
                        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                        let tmp = path.with_extension("json.tmp");
                        let file = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
                        fs.write_json(std::io::BufWriter::new(file))?;
                        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
                        fs
                    }
                }
            }
            None => extract_features(clips, config)?.0,
        };
        let features = Arc::new(features);
        self.memo.lock().unwrap().insert(key, Arc::clone(&features));
        Ok(features)
    }
}
