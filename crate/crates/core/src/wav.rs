//! Mono WAV input and output (16-bit PCM or 32-bit float).

use std::io::{Cursor, Read, Seek};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::params::Waveform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavEncoding {
    Pcm16,
    #[default]
    Float32,
}

fn map_err(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::Io(io),
        hound::Error::Unsupported => Error::UnsupportedFormat("unsupported wav encoding".into()),
        other => Error::UnsupportedFormat(other.to_string()),
    }
}

fn read_from<R: Read>(reader: WavReader<R>) -> Result<Waveform> {
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{} channels, only mono is supported",
            spec.channels
        )));
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_err)?,
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_err)?,
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{bits}-bit {fmt:?} samples"
            )))
        }
    };
    Waveform::new(samples, spec.sample_rate)
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    read_from(WavReader::open(path).map_err(map_err)?)
}

pub fn wav_from_bytes(bytes: &[u8]) -> Result<Waveform> {
    read_from(WavReader::new(Cursor::new(bytes)).map_err(map_err)?)
}

fn write_to<W: std::io::Write + Seek>(w: W, wave: &Waveform, enc: WavEncoding) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: wave.sample_rate,
        bits_per_sample: match enc {
            WavEncoding::Pcm16 => 16,
            WavEncoding::Float32 => 32,
        },
        sample_format: match enc {
            WavEncoding::Pcm16 => SampleFormat::Int,
            WavEncoding::Float32 => SampleFormat::Float,
        },
    };
    let mut writer = WavWriter::new(w, spec).map_err(map_err)?;
    for &s in &wave.samples {
        let s = s.clamp(-1.0, 1.0);
        match enc {
            WavEncoding::Pcm16 => writer
                .write_sample((s * 32767.0).round() as i16)
                .map_err(map_err)?,
            WavEncoding::Float32 => writer.write_sample(s as f32).map_err(map_err)?,
        }
    }
    writer.finalize().map_err(map_err)
}

pub fn wav_to_bytes(wave: &Waveform, enc: WavEncoding) -> Result<Vec<u8>> {
    let mut buf = Cursor::new(Vec::new());
    write_to(&mut buf, wave, enc)?;
    Ok(buf.into_inner())
}

pub fn write_wav(path: impl AsRef<Path>, wave: &Waveform, enc: WavEncoding) -> Result<()> {
    crate::persistence::write_atomic(path.as_ref(), &wav_to_bytes(wave, enc)?)
}
