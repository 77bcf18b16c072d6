use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::AudioClip;
use crate::{Error, Result, Scalar};

const PCM16_SCALE: f64 = 32_768.0;

fn map_hound(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) => Error::io(path, e),
        hound::Error::Unsupported => Error::UnsupportedFormat(format!("{}: unsupported WAV variant", path.display())),
        other => Error::UnsupportedFormat(format!("{}: {other}", path.display())),
    }
}

/// Reads a PCM16 or float32 WAV file, downmixing stereo by per-sample channel mean.
/// The file stem is used as the source id.
pub fn read_wav<T: Scalar>(path: &Path) -> Result<AudioClip<T>> {
    let mut reader = WavReader::open(path).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    if !(1..=2).contains(&spec.channels) {
        return Err(Error::UnsupportedFormat(format!(
            "{}: {} channels (only mono and stereo are supported)",
            path.display(),
            spec.channels
        )));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / PCM16_SCALE))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: {bits}-bit {fmt:?} samples (expected 16-bit PCM or 32-bit float)",
                path.display()
            )))
        }
    };

    let channels = usize::from(spec.channels);
    let declared_frames = reader.duration() as usize;
    if interleaved.len() != declared_frames * channels {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "truncated data chunk"),
        ));
    }
    let samples: Vec<T> = interleaved
        .chunks_exact(channels)
        .map(|frame| T::of(frame.iter().sum::<f64>() / channels as f64))
        .collect();

    let source_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    AudioClip::new(samples, spec.sample_rate, source_id)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

/// Sample encoding used by [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Pcm16,
    Float32,
}

/// Writes a mono clip. PCM16 output clamps to the representable range.
pub fn write_wav<T: Scalar>(path: &Path, clip: &AudioClip<T>, encoding: WavEncoding) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate(),
        bits_per_sample: match encoding {
            WavEncoding::Pcm16 => 16,
            WavEncoding::Float32 => 32,
        },
        sample_format: match encoding {
            WavEncoding::Pcm16 => SampleFormat::Int,
            WavEncoding::Float32 => SampleFormat::Float,
        },
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| map_hound(path, e))?;
    for &s in clip.samples() {
        let v = s.as_f64();
        match encoding {
            WavEncoding::Pcm16 => {
                let q = (v * PCM16_SCALE).round().clamp(-32_768.0, 32_767.0) as i16;
                writer.write_sample(q)
            }
            WavEncoding::Float32 => writer.write_sample(v as f32),
        }
        .map_err(|e| map_hound(path, e))?;
    }
    writer.finalize().map_err(|e| map_hound(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_raw(path: &Path, channels: u16, bits: u16, format: SampleFormat, frames: usize, f: impl Fn(usize, u16) -> f64) {
        let spec = WavSpec { channels, sample_rate: 48_000, bits_per_sample: bits, sample_format: format };
        let mut w = WavWriter::create(path, spec).unwrap();
        for i in 0..frames {
            for c in 0..channels {
                let v = f(i, c);
                match (format, bits) {
                    (SampleFormat::Int, 8) => w.write_sample((v * 127.0) as i8).unwrap(),
                    (SampleFormat::Int, 16) => w.write_sample((v * 32_768.0) as i16).unwrap(),
                    (SampleFormat::Float, 32) => w.write_sample(v as f32).unwrap(),
                    _ => unreachable!(),
                }
            }
        }
        w.finalize().unwrap();
    }

    #[test]
    fn virufy_length_mono_pcm16() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("clip.wav");
        write_raw(&p, 1, 16, SampleFormat::Int, 78_960, |i, _| ((i % 100) as f64 / 100.0) - 0.5);
        let clip: AudioClip<f64> = read_wav(&p).unwrap();
        assert_eq!(clip.len(), 78_960);
        assert_eq!(clip.sample_rate(), 48_000);
        assert_eq!(clip.samples()[0], -0.5);
        assert!((clip.duration_secs() - 1.645).abs() < 1e-12);
    }

    #[test]
    fn stereo_opposite_channels_downmix_to_zero() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("st.wav");
        write_raw(&p, 2, 32, SampleFormat::Float, 500, |_, c| if c == 0 { 0.5 } else { -0.5 });
        let clip: AudioClip<f64> = read_wav(&p).unwrap();
        assert_eq!(clip.len(), 500);
        assert!(clip.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn eight_bit_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u8.wav");
        write_raw(&p, 1, 8, SampleFormat::Int, 100, |_, _| 0.25);
        assert!(matches!(read_wav::<f64>(&p), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn truncated_data_chunk_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.wav");
        write_raw(&p, 1, 16, SampleFormat::Int, 1000, |_, _| 0.1);
        let bytes = std::fs::read(&p).unwrap();
        std::fs::write(&p, &bytes[..bytes.len() - 301]).unwrap();
        assert!(matches!(read_wav::<f64>(&p), Err(Error::Io { .. })));
    }

    #[test]
    fn float_roundtrip_preserves_count_and_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.wav");
        let clip = AudioClip::<f64>::new((0..777).map(|i| (i as f64 * 0.01).sin() * 0.5).collect(), 44_100, "x").unwrap();
        write_wav(&p, &clip, WavEncoding::Float32).unwrap();
        let back: AudioClip<f64> = read_wav(&p).unwrap();
        assert_eq!(back.len(), 777);
        for (a, b) in clip.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() < 1e-7);
        }
    }
}
