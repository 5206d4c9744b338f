//! Batch operations behind the CLI subcommands. Each returns a
//! [`CommandError`] carrying the process exit code.

use std::fmt;
use std::path::{Path, PathBuf};

use vocmorph_core::persistence::{read_morph_object, read_vocp, write_vocp};
use vocmorph_core::wav::{read_wav, write_wav};
use vocmorph_core::{
    analyze, continuum, morph, rate_to_weights, synthesize, AnalysisConfig, WavEncoding,
    WeightMatrix,
};

/// Bad usage or bad data.
pub const EXIT_DATA: i32 = 2;
/// Anything else, e.g. failing to write an output.
pub const EXIT_INTERNAL: i32 = 1;

#[derive(Debug)]
pub struct CommandError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CommandError {}

fn data(context: impl fmt::Display, e: impl fmt::Display) -> CommandError {
    CommandError {
        code: EXIT_DATA,
        message: format!("{context}: {e}"),
    }
}

fn internal(context: impl fmt::Display, e: impl fmt::Display) -> CommandError {
    CommandError {
        code: EXIT_INTERNAL,
        message: format!("{context}: {e}"),
    }
}

/// Errors from the core library are data errors unless they come from I/O.
fn output(path: &Path, e: vocmorph_core::Error) -> CommandError {
    match e {
        vocmorph_core::Error::Io(_) => internal(path.display(), e),
        other => data(path.display(), other),
    }
}

pub type CommandResult<T> = Result<T, CommandError>;

pub fn analyze_file(input: &Path, out: &Path, cfg: &AnalysisConfig) -> CommandResult<usize> {
    let wave = read_wav(input).map_err(|e| data(input.display(), e))?;
    let params = analyze(&wave, cfg).map_err(|e| data(input.display(), e))?;
    write_vocp(out, &params).map_err(|e| output(out, e))?;
    Ok(params.frame_count())
}

pub fn synth_file(input: &Path, out: &Path, seed: u64, enc: WavEncoding) -> CommandResult<()> {
    let params = read_vocp(input).map_err(|e| data(input.display(), e))?;
    let wave = synthesize(&params, seed).map_err(|e| data(input.display(), e))?;
    write_wav(out, &wave, enc).map_err(|e| output(out, e))
}

/// Either a two-instance morphing rate or a full weight matrix.
#[derive(Debug, Clone)]
pub enum MorphWeights {
    Rate(f64),
    File(PathBuf),
}

pub fn load_weights(path: &Path) -> CommandResult<WeightMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| data(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| data(path.display(), e))
}

pub fn morph_file(
    object: &Path,
    weights: &MorphWeights,
    out: &Path,
    seed: u64,
    enc: WavEncoding,
) -> CommandResult<()> {
    let obj = read_morph_object(object).map_err(|e| data(object.display(), e))?;
    let w = match weights {
        MorphWeights::Rate(r) => {
            if !r.is_finite() {
                return Err(data("--rate", "must be finite"));
            }
            if obj.len() != 2 {
                return Err(data(
                    object.display(),
                    format!("--rate needs a two-instance object, found {}", obj.len()),
                ));
            }
            rate_to_weights(*r)
        }
        MorphWeights::File(p) => load_weights(p)?,
    };
    let params = morph(&obj, &w).map_err(|e| data("morph", e))?;
    let wave = synthesize(&params, seed).map_err(|e| data("synthesis", e))?;
    write_wav(out, &wave, enc).map_err(|e| output(out, e))
}

/// `steps` evenly spaced rates from `from` to `to`, both included.
pub fn continuum_rates(steps: usize, from: f64, to: f64) -> CommandResult<Vec<f64>> {
    if steps < 2 {
        return Err(data(
            "--steps",
            format!("need at least 2 steps, got {steps}"),
        ));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(data("--from/--to", "must be finite"));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                to
            } else {
                from + (to - from) * i as f64 / n
            }
        })
        .collect())
}

pub fn continuum_file_name(index: usize, steps: usize, rate: f64) -> String {
    let width = (steps - 1).to_string().len().max(2);
    format!("{index:0width$}_rate{rate:.4}.wav")
}

pub fn continuum_files(
    object: &Path,
    rates: &[f64],
    dir: &Path,
    seed: u64,
    enc: WavEncoding,
) -> CommandResult<Vec<PathBuf>> {
    let obj = read_morph_object(object).map_err(|e| data(object.display(), e))?;
    let waves = continuum(&obj, rates, seed).map_err(|e| data("continuum", e))?;
    std::fs::create_dir_all(dir).map_err(|e| internal(dir.display(), e))?;
    let mut written = Vec::with_capacity(waves.len());
    for (i, (w, r)) in waves.iter().zip(rates).enumerate() {
        let path = dir.join(continuum_file_name(i, rates.len(), *r));
        write_wav(&path, w, enc).map_err(|e| output(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
