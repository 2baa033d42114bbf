use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::lattice::{make_lattice_field, LatticeField, Law};
use crate::point::Region;
use crate::poisson::{make_poisson_cloud, PoissonCloud};

/// Everything needed to regenerate an environment bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentDescriptor {
    Poisson {
        seed: u64,
        rate: f64,
        region: Region,
        #[serde(default)]
        reflected: bool,
    },
    Lattice {
        seed: u64,
        rows: usize,
        cols: usize,
        law: Law,
        #[serde(default)]
        reflected: bool,
    },
}

pub enum Environment {
    Poisson(PoissonCloud),
    Lattice(LatticeField),
}

impl EnvironmentDescriptor {
    pub fn build(&self) -> Result<Environment, ModelError> {
        match self {
            Self::Poisson { seed, rate, region, reflected } => {
                let c = make_poisson_cloud(*seed, *rate, *region)?;
                Ok(Environment::Poisson(if *reflected { c.reflect() } else { c }))
            }
            Self::Lattice { seed, rows, cols, law, reflected } => {
                let f = make_lattice_field(*seed, *rows, *cols, law.clone())?;
                Ok(Environment::Lattice(if *reflected { f.reflect() } else { f }))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl From<&PoissonCloud> for EnvironmentDescriptor {
    fn from(c: &PoissonCloud) -> Self {
        let region = if c.reflected { c.region.mirrored() } else { c.region };
        Self::Poisson { seed: c.seed, rate: c.rate, region, reflected: c.reflected }
    }
}

impl From<&LatticeField> for EnvironmentDescriptor {
    fn from(f: &LatticeField) -> Self {
        let law = match (&f.law, f.reflected) {
            (Law::Explicit { .. }, true) => f.reflect().law,
            (l, _) => l.clone(),
        };
        Self::Lattice { seed: f.seed, rows: f.rows, cols: f.cols, law, reflected: f.reflected }
    }
}
