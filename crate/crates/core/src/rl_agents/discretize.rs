use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// Per-feature bin indices identifying a tabular state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(pub Vec<u16>);

impl fmt::Display for StateKey {
    /// Bins joined by `-`, e.g. `2-0-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for StateKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split('-')
            .map(|part| {
                part.parse::<u16>()
                    .map_err(|_| Error::invalid("state key", String::from(s)))
            })
            .collect::<Result<Vec<_>>>()
            .map(StateKey)
    }
}

/// Maps selected observation entries to bins by threshold comparison. A
/// value's bin is the number of cut points strictly below it, so values
/// exactly on a cut fall into the lower bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretizer {
    features: Vec<usize>,
    cuts: Vec<Vec<f64>>,
}

impl Discretizer {
    /// Explicit feature indices with their own sorted cut points.
    pub fn new(features: Vec<usize>, cuts: Vec<Vec<f64>>) -> Result<Self> {
        if features.len() != cuts.len() {
            return Err(Error::invalid("discretizer", "one cut list per feature"));
        }
        for c in &cuts {
            if c.windows(2).any(|w| !(w[0] < w[1])) || c.iter().any(|v| v.is_nan()) {
                return Err(Error::invalid("cuts", "must be strictly increasing"));
            }
        }
        Ok(Discretizer { features, cuts })
    }

    /// The same cut points for features `0..dim`.
    pub fn uniform(dim: usize, cuts: &[f64]) -> Result<Self> {
        Self::new((0..dim).collect(), (0..dim).map(|_| cuts.to_vec()).collect())
    }

    /// The same cut points applied to features `first..first + count`.
    pub fn range(first: usize, count: usize, cuts: &[f64]) -> Result<Self> {
        Self::new((first..first + count).collect(), (0..count).map(|_| cuts.to_vec()).collect())
    }

    pub fn dimension(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn key(&self, observation: &[f64]) -> Result<StateKey> {
        self.features
            .iter()
            .zip(&self.cuts)
            .map(|(&f, cuts)| {
                let v = *observation.get(f).ok_or_else(|| {
                    Error::ShapeMismatch(alloc::format!(
                        "discretizer reads feature {f} of a {}-long observation",
                        observation.len()
                    ))
                })?;
                Ok(cuts.iter().filter(|c| v > **c).count() as u16)
            })
            .collect::<Result<Vec<_>>>()
            .map(StateKey)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_bins() {
        let d = Discretizer::uniform(1, &[-0.001, 0.001]).unwrap();
        assert_eq!(d.key(&[-0.05]).unwrap(), StateKey(vec![0]));
        assert_eq!(d.key(&[0.0]).unwrap(), StateKey(vec![1]));
        assert_eq!(d.key(&[0.05]).unwrap(), StateKey(vec![2]));
        // ties go to the lower bin
        assert_eq!(d.key(&[-0.001]).unwrap(), StateKey(vec![0]));
        assert_eq!(d.key(&[0.001]).unwrap(), StateKey(vec![1]));
    }

    #[test]
    fn features_are_independent() {
        let d = Discretizer::uniform(2, &[-0.001, 0.001]).unwrap();
        assert_eq!(d.key(&[0.5, -0.5]).unwrap(), StateKey(vec![2, 0]));
    }

    #[test]
    fn range_reads_selected_features() {
        let d = Discretizer::range(2, 2, &[0.0]).unwrap();
        assert_eq!(d.key(&[9.0, 9.0, -1.0, 1.0]).unwrap(), StateKey(vec![0, 1]));
        assert!(d.key(&[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_unsorted_cuts() {
        assert!(Discretizer::uniform(1, &[0.1, -0.1]).is_err());
    }

    #[test]
    fn key_text_round_trip() {
        let k = StateKey(vec![2, 0, 1]);
        assert_eq!(k.to_string(), "2-0-1");
        assert_eq!("2-0-1".parse::<StateKey>().unwrap(), k);
        assert!("2-x".parse::<StateKey>().is_err());
    }
}
