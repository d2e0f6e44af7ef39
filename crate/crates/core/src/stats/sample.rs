use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::env::EnvironmentSpec;
use crate::error::{Error, Result};

/// Where a sample came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub spec_hash: u64,
    pub master_seed: u64,
    pub horizon: u64,
}

/// Finite observations with provenance; timeouts are counted, not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    values: Vec<f64>,
    pub provenance: Provenance,
    pub timeouts: usize,
}

impl Sample {
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        Self::from_outcomes(values.into_iter().map(Some), provenance)
    }

    /// `None` entries are timeouts.
    pub fn from_outcomes<I: IntoIterator<Item = Option<f64>>>(outcomes: I, provenance: Provenance) -> Result<Self> {
        let mut values = Vec::new();
        let mut timeouts = 0;
        for o in outcomes {
            match o {
                Some(x) if x.is_finite() => values.push(x),
                Some(x) => return Err(Error::Input(format!("non-finite observation {x}"))),
                None => timeouts += 1,
            }
        }
        if values.is_empty() {
            return Err(Error::Input("sample has no finite observations".into()));
        }
        Ok(Sample { values, provenance, timeouts })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Stable (within this implementation) hash of a spec.
pub fn spec_hash(spec: &EnvironmentSpec) -> u64 {
    let mut h = DefaultHasher::new();
    format!("{spec:?}").hash(&mut h);
    h.finish()
}
