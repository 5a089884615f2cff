//! JSON state files and tableau text files.
//!
//! A state file looks like
//! `{"format":"eopgap-state","version":1,"kind":"pure","parties":[{"label":"A","dim":2},…],"data":[re,im,…]}`
//! with amplitudes (or the density matrix, row-major) interleaved as real
//! and imaginary parts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec};
use crate::qdense::{DensityOperator, Party, PartySpec, PureState};
use crate::stab::{self, StabilizerTableau};

pub const STATE_FORMAT: &str = "eopgap-state";
pub const STATE_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    format: String,
    version: u32,
    kind: StateKind,
    parties: Vec<Party>,
    data: Vec<f64>,
}

/// Anything the command line accepts as an input state.
#[derive(Clone, Debug)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityOperator),
    Tableau(StabilizerTableau),
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        msg: format!("column {}: {e}", e.column()),
    }
}

fn complex_pairs(data: &[f64], expected: usize) -> Result<Vec<crate::linalg::C64>> {
    if data.len() != 2 * expected {
        return Err(Error::dim(format!(
            "expected {} reals for dimension {}, got {}",
            2 * expected,
            expected,
            data.len()
        )));
    }
    Ok(data.chunks_exact(2).map(|p| c(p[0], p[1])).collect())
}

pub fn parse_state(text: &str) -> Result<LoadedState> {
    let file: StateFile = serde_json::from_str(text).map_err(json_error)?;
    if file.format != STATE_FORMAT {
        return Err(Error::parse(1, format!("unknown format {:?}", file.format)));
    }
    if file.version != STATE_VERSION {
        return Err(Error::Version(format!(
            "state file version {} is not supported (expected {STATE_VERSION})",
            file.version
        )));
    }
    let spec = PartySpec::new(file.parties.into_iter().map(|p| (p.label, p.dim)))?;
    let d = spec.total_dim();
    match file.kind {
        StateKind::Pure => {
            let amps = complex_pairs(&file.data, d)?;
            Ok(LoadedState::Pure(PureState::new(spec, CVec::from_vec(amps))?))
        }
        StateKind::Density => {
            let entries = complex_pairs(&file.data, d * d)?;
            let m = CMat::from_row_slice(d, d, &entries);
            Ok(LoadedState::Density(DensityOperator::new(spec, m)?))
        }
    }
}

/// JSON state files start with `{`; anything else is read as a tableau.
pub fn parse_input(text: &str) -> Result<LoadedState> {
    if text.trim_start().starts_with('{') {
        parse_state(text)
    } else {
        Ok(LoadedState::Tableau(stab::parse_tableau(text)?))
    }
}

pub fn read_input(path: &Path) -> Result<LoadedState> {
    parse_input(&std::fs::read_to_string(path)?)
}

fn parties(spec: &PartySpec) -> Vec<Party> {
    spec.parties().to_vec()
}

pub fn pure_to_json(psi: &PureState) -> Result<String> {
    let file = StateFile {
        format: STATE_FORMAT.into(),
        version: STATE_VERSION,
        kind: StateKind::Pure,
        parties: parties(psi.spec()),
        data: psi.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn density_to_json(rho: &DensityOperator) -> Result<String> {
    let m = rho.matrix();
    let d = m.nrows();
    let data = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .flat_map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
        .collect();
    let file = StateFile {
        format: STATE_FORMAT.into(),
        version: STATE_VERSION,
        kind: StateKind::Density,
        parties: parties(rho.spec()),
        data,
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn write_pure(path: &Path, psi: &PureState) -> Result<()> {
    Ok(std::fs::write(path, pure_to_json(psi)?)?)
}

pub fn write_density(path: &Path, rho: &DensityOperator) -> Result<()> {
    Ok(std::fs::write(path, density_to_json(rho)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdense::{fixtures, Region};

    #[test]
    fn round_trips() {
        let psi = fixtures::w(3);
        match parse_input(&pure_to_json(&psi).unwrap()).unwrap() {
            LoadedState::Pure(p) => assert_eq!(p.amplitudes(), psi.amplitudes()),
            other => panic!("{other:?}"),
        }
        let rho = psi.reduced(&Region::parse("A,C")).unwrap();
        match parse_input(&density_to_json(&rho).unwrap()).unwrap() {
            LoadedState::Density(r) => {
                assert_eq!(r.matrix(), rho.matrix());
                assert_eq!(r.spec(), rho.spec());
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_input("n=2\nXX\nZZ\n").unwrap(), LoadedState::Tableau(_)));
    }

    #[test]
    fn malformed_files() {
        let text = pure_to_json(&fixtures::bell()).unwrap();
        let truncated = &text[..text.len() / 2];
        assert!(matches!(parse_input(truncated), Err(Error::Parse { .. })));
        let bumped = text.replace("\"version\":1", "\"version\":7");
        assert!(matches!(parse_input(&bumped), Err(Error::Version(_))));
        let short = text.replace("\"dim\":2}]", "\"dim\":3}]");
        assert!(parse_input(&short).is_err());
    }
}
