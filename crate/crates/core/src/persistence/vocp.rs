//! `.vocp` layout, all little-endian:
//!
//! | offset | size | field |
//! |--------|------|-------|
//! | 0  | 4  | magic `VOCP` |
//! | 4  | 4  | u32 version (1) |
//! | 8  | 4  | u32 sample rate |
//! | 12 | 4  | zero padding |
//! | 16 | 8  | f64 frame period (s) |
//! | 24 | 4  | u32 fft size |
//! | 28 | 4  | u32 frame count |
//! | 32 | 16 | reserved, zero |
//!
//! followed by f64 arrays: fo, envelope (frames x bins, row-major),
//! aperiodicity (same shape), with `bins = fft_size / 2 + 1`.

use std::path::Path;

use super::write_atomic;
use crate::error::{Error, Result};
use crate::params::VocoderParams;

pub const VOCP_MAGIC: [u8; 4] = *b"VOCP";
pub const VOCP_VERSION: u32 = 1;
pub const VOCP_HEADER_LEN: usize = 48;

pub fn vocp_to_bytes(p: &VocoderParams) -> Result<Vec<u8>> {
    p.validate()?;
    let frames = u32::try_from(p.frame_count())
        .map_err(|_| Error::InvalidParams("too many frames for vocp".into()))?;
    let fft = u32::try_from(p.fft_size)
        .map_err(|_| Error::InvalidParams("fft size too large for vocp".into()))?;
    let values = p.fo.len() + p.envelope.len() + p.aperiodicity.len();
    let mut out = Vec::with_capacity(VOCP_HEADER_LEN + 8 * values);
    out.extend_from_slice(&VOCP_MAGIC);
    out.extend_from_slice(&VOCP_VERSION.to_le_bytes());
    out.extend_from_slice(&p.sample_rate.to_le_bytes());
    out.extend_from_slice(&[0u8; 4]);
    out.extend_from_slice(&p.frame_period.to_le_bytes());
    out.extend_from_slice(&fft.to_le_bytes());
    out.extend_from_slice(&frames.to_le_bytes());
    out.extend_from_slice(&[0u8; 16]);
    for v in p.fo.iter().chain(&p.envelope).chain(&p.aperiodicity) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn vocp_from_bytes(bytes: &[u8]) -> Result<VocoderParams> {
    if bytes.len() < 4 || bytes[..4] != VOCP_MAGIC {
        return Err(Error::NotAVocpFile);
    }
    if bytes.len() < VOCP_HEADER_LEN {
        return Err(Error::CorruptFile(format!(
            "header truncated at {} bytes",
            bytes.len()
        )));
    }
    let version = u32_at(bytes, 4);
    if version != VOCP_VERSION {
        return Err(Error::UnsupportedVersion(format!("vocp version {version}")));
    }
    if bytes[12..16].iter().chain(&bytes[32..48]).any(|&b| b != 0) {
        return Err(Error::UnsupportedVersion(
            "vocp header uses reserved fields".into(),
        ));
    }
    let sample_rate = u32_at(bytes, 8);
    let frame_period = f64_at(bytes, 16);
    let fft_size = u32_at(bytes, 24) as usize;
    let frames = u32_at(bytes, 28) as usize;
    if fft_size < 2 || !fft_size.is_multiple_of(2) {
        return Err(Error::CorruptFile(format!("invalid fft size {fft_size}")));
    }
    let bins = fft_size / 2 + 1;
    let expected = frames
        .checked_mul(bins)
        .and_then(|n| n.checked_mul(2))
        .and_then(|n| n.checked_add(frames))
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(VOCP_HEADER_LEN))
        .ok_or_else(|| Error::CorruptFile("payload size overflows".into()))?;
    if bytes.len() != expected {
        return Err(Error::CorruptFile(format!(
            "expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let mut values = bytes[VOCP_HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let fo: Vec<f64> = values.by_ref().take(frames).collect();
    let envelope: Vec<f64> = values.by_ref().take(frames * bins).collect();
    let aperiodicity: Vec<f64> = values.collect();
    let p = VocoderParams {
        sample_rate,
        frame_period,
        fft_size,
        fo,
        envelope,
        aperiodicity,
    };
    p.validate()
        .map_err(|e| Error::CorruptFile(e.to_string()))?;
    Ok(p)
}

pub fn write_vocp(path: impl AsRef<Path>, p: &VocoderParams) -> Result<()> {
    write_atomic(path.as_ref(), &vocp_to_bytes(p)?)
}

pub fn read_vocp(path: impl AsRef<Path>) -> Result<VocoderParams> {
    vocp_from_bytes(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VocoderParams {
        VocoderParams {
            sample_rate: 16000,
            frame_period: 0.005,
            fft_size: 8,
            fo: vec![0.0, 120.5, 130.25],
            envelope: (0..15).map(|i| 1e-3 * (i + 1) as f64).collect(),
            aperiodicity: (0..15)
                .map(|i| 0.05 * (i + 1) as f64 / 1.0)
                .map(|v: f64| v.min(1.0))
                .collect(),
        }
    }

    #[test]
    fn layout_and_round_trip() {
        let p = sample();
        let b = vocp_to_bytes(&p).unwrap();
        assert_eq!(b.len(), 48 + 8 * (3 + 15 + 15));
        assert_eq!(&b[..4], b"VOCP");
        assert_eq!(u32_at(&b, 4), 1);
        assert_eq!(u32_at(&b, 8), 16000);
        assert_eq!(f64_at(&b, 16), 0.005);
        assert_eq!(u32_at(&b, 24), 8);
        assert_eq!(u32_at(&b, 28), 3);
        assert_eq!(f64_at(&b, 48 + 8), 120.5);
        assert_eq!(vocp_from_bytes(&b).unwrap(), p);
    }

    #[test]
    fn negative_cases() {
        let mut b = vocp_to_bytes(&sample()).unwrap();
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(vocp_from_bytes(&bad), Err(Error::NotAVocpFile)));
        let short = &b[..b.len() - 8];
        assert!(matches!(vocp_from_bytes(short), Err(Error::CorruptFile(_))));
        let mut v2 = b.clone();
        v2[4] = 2;
        assert!(matches!(
            vocp_from_bytes(&v2),
            Err(Error::UnsupportedVersion(_))
        ));
        b[40] = 1;
        assert!(matches!(
            vocp_from_bytes(&b),
            Err(Error::UnsupportedVersion(_))
        ));
        assert!(matches!(vocp_from_bytes(b"VO"), Err(Error::NotAVocpFile)));
    }
}
