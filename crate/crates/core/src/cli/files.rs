use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::builder::{ApproxSpace, Unrealized};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;

/// On-disk metric space. The build fields are present only for spaces
/// written by `build`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub n: usize,
    pub d: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SpaceFile {
    pub fn plain(x: &FiniteMetricSpace) -> Self {
        SpaceFile { n: x.len(), d: x.rows(), alphabet: None, rounds: None, budget: None, seed: None }
    }

    pub fn approx(a: &ApproxSpace) -> Self {
        SpaceFile {
            alphabet: Some(a.alphabet.values().to_vec()),
            rounds: Some(a.config.rounds),
            budget: Some(a.config.budget),
            seed: Some(a.config.seed),
            ..SpaceFile::plain(&a.space)
        }
    }

    pub fn space(&self) -> Result<FiniteMetricSpace> {
        if self.d.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: self.d.len() });
        }
        FiniteMetricSpace::from_rows(self.d.clone())
    }
}

#[derive(Serialize)]
pub struct ViolationsFile<'a> {
    pub k: usize,
    pub unrealized: &'a [Unrealized],
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_space(path: &Path) -> Result<(FiniteMetricSpace, SpaceFile)> {
    let file: SpaceFile = read_json(path)?;
    Ok((file.space()?, file))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn emit_with<F>(path: Option<&Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    emit(path, &String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))?)
}
