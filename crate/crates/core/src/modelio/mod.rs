//! Model formats (`.ode`, `.crn`, `.ctmc`), pair lists, and model transforms.

mod crn;
mod ctmc;
mod expr;
pub mod fixtures;
mod lexer;
mod multisite;
mod ode;
mod pairs;

use std::path::Path;

use thiserror::Error;

pub use crn::{extend_params, parse_crn, write_crn, Complex, Crn, Reaction};
pub use ctmc::{
    crn_to_ctmc, default_state_cap, parse_ctmc, parse_population, union_ctmcs, write_ctmc, CtmcModel, Transition,
    DEFAULT_STATE_CAP, STATE_CAP_ENV,
};
pub use lexer::ParseError;
pub use multisite::{multisite, multisite_query};
pub use ode::{parse_ode, write_ode};
pub use pairs::{parse_pairs, parse_var_list, product_minus_identity};

use crate::poly::{PolyVectorField, Polynomial, Universe, Var};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{path}:{error}")]
    Parse { path: String, error: ParseError },
    #[error("{path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error("{0}: unknown model format (expected .ode, .crn or .ctmc)")]
    UnknownFormat(String),
    #[error("state space exceeds the cap of {0} states")]
    StateCap(usize),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Ode,
    Crn,
    Ctmc,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "ode" => Some(Format::Ode),
            "crn" => Some(Format::Crn),
            "ctmc" => Some(Format::Ctmc),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Ode,
    Crn(Crn),
    Ctmc(CtmcModel),
}

/// A parsed model: its vector field and where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelBundle {
    pub field: PolyVectorField,
    pub provenance: Provenance,
}

impl ModelBundle {
    pub fn from_ode(field: PolyVectorField) -> Self {
        ModelBundle {
            field,
            provenance: Provenance::Ode,
        }
    }

    pub fn from_crn(crn: Crn) -> Self {
        ModelBundle {
            field: crn.to_field(),
            provenance: Provenance::Crn(crn),
        }
    }

    pub fn from_ctmc(ctmc: CtmcModel) -> Self {
        ModelBundle {
            field: ctmc.to_field(),
            provenance: Provenance::Ctmc(ctmc),
        }
    }

    pub fn parse(text: &str, format: Format) -> Result<Self, ParseError> {
        Ok(match format {
            Format::Ode => ModelBundle::from_ode(parse_ode(text)?),
            Format::Crn => ModelBundle::from_crn(parse_crn(text)?),
            Format::Ctmc => ModelBundle::from_ctmc(parse_ctmc(text)?),
        })
    }

    /// Reads a model, choosing the parser by file extension.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let shown = path.display().to_string();
        let format = Format::from_path(path).ok_or_else(|| ModelError::UnknownFormat(shown.clone()))?;
        let text = std::fs::read_to_string(path).map_err(|error| ModelError::Io {
            path: shown.clone(),
            error,
        })?;
        ModelBundle::parse(&text, format).map_err(|error| ModelError::Parse { path: shown, error })
    }

    /// Disjoint union; variable names get the respective prefixes. Two
    /// chains stay a chain, anything else becomes a plain field.
    pub fn union(&self, other: &ModelBundle, prefixes: (&str, &str)) -> Result<ModelBundle, ModelError> {
        if let (Provenance::Ctmc(a), Provenance::Ctmc(b)) = (&self.provenance, &other.provenance) {
            return Ok(ModelBundle::from_ctmc(union_ctmcs(a, b, prefixes)?));
        }
        Ok(ModelBundle::from_ode(union_fields(&self.field, &other.field, prefixes)?))
    }
}

/// Block-diagonal union of two fields over prefixed, disjoint universes.
pub fn union_fields(
    a: &PolyVectorField,
    b: &PolyVectorField,
    prefixes: (&str, &str),
) -> Result<PolyVectorField, ModelError> {
    let names = a
        .universe()
        .names()
        .iter()
        .map(|n| format!("{}{n}", prefixes.0))
        .chain(b.universe().names().iter().map(|n| format!("{}{n}", prefixes.1)));
    let universe = Universe::from_names(names).map_err(|e| {
        ModelError::Invalid(format!("{e}; pass distinct prefixes"))
    })?;
    let shift = a.dim();
    let mut rhs: Vec<Polynomial> = a.rhs_all().to_vec();
    rhs.extend(b.rhs_all().iter().map(|p| p.rename(|x| Var::new(x.index() + shift))));
    Ok(PolyVectorField::new(universe, rhs).expect("renamed variables are in range"))
}
