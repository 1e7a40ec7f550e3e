//! Saving and loading any model kind through one dispatch point.
//!
//! Every model file begins with a header line whose first token names the
//! kind: `linsep`, `winnow`, `nb`, `bo`, `dl` or `snow`. Loading reads the
//! token and hands the rest to the owning parser; an unknown header is an
//! error naming the offending token.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::HarnessError;
use crate::baselines::{BackoffModel, DecisionList, NbParams};
use crate::lin_sep::LinearSeparator;
use crate::snow::SnowNetwork;
use crate::winnow::WinnowLearner;

/// Any trained model the harness can persist.
#[derive(Debug, Clone)]
pub enum Model {
    LinSep(LinearSeparator),
    Winnow(WinnowLearner),
    Nb(NbParams),
    Bo(BackoffModel),
    Dl(DecisionList),
    Snow(SnowNetwork),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::LinSep(_) => "linsep",
            Model::Winnow(_) => "winnow",
            Model::Nb(_) => "nb",
            Model::Bo(_) => "bo",
            Model::Dl(_) => "dl",
            Model::Snow(_) => "snow",
        }
    }

    pub fn write<W: Write>(&self, w: W) -> std::io::Result<()> {
        match self {
            Model::LinSep(m) => m.write_model(w),
            Model::Winnow(m) => m.write_model(w),
            Model::Nb(m) => m.write_model(w),
            Model::Bo(m) => m.write_model(w),
            Model::Dl(m) => m.write_model(w),
            Model::Snow(m) => m.write_model(w),
        }
    }

    pub fn read(text: &str) -> Result<Model, HarnessError> {
        let header_token = text
            .split_whitespace()
            .next()
            .unwrap_or("")
            .to_string();
        let bytes = text.as_bytes();
        match header_token.as_str() {
            "linsep" => Ok(Model::LinSep(LinearSeparator::read_model(bytes)?)),
            "winnow" => Ok(Model::Winnow(WinnowLearner::read_model(bytes)?)),
            "nb" => Ok(Model::Nb(NbParams::read_model(bytes)?)),
            "bo" => Ok(Model::Bo(BackoffModel::read_model(bytes)?)),
            "dl" => Ok(Model::Dl(DecisionList::read_model(bytes)?)),
            "snow" => Ok(Model::Snow(SnowNetwork::read_model(bytes)?)),
            other => Err(HarnessError::UnknownModelHeader(other.to_string())),
        }
    }

    pub fn into_dl(self) -> Result<DecisionList, HarnessError> {
        match self {
            Model::Dl(dl) => Ok(dl),
            other => Err(HarnessError::ModelKindMismatch {
                expected: "dl",
                found: other.kind().to_string(),
            }),
        }
    }

    pub fn into_snow(self) -> Result<SnowNetwork, HarnessError> {
        match self {
            Model::Snow(net) => Ok(net),
            other => Err(HarnessError::ModelKindMismatch {
                expected: "snow",
                found: other.kind().to_string(),
            }),
        }
    }
}

pub fn save_model(path: &Path, model: &Model) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut w = BufWriter::new(file);
    model.write(&mut w).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn load_model(path: &Path) -> Result<Model, HarnessError> {
    let mut text = String::new();
    BufReader::new(File::open(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })?)
    .read_to_string(&mut text)
    .map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Model::read(&text)
}
