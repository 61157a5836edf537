//! Binary label vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-length binary vector holding one instance's labels (true or predicted).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelVector(Vec<u8>);

impl LabelVector {
    /// Builds a vector from 0/1 values. Any other value is rejected.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::input(format!(
                "label bit {pos} is {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(LabelVector(bits))
    }

    pub fn zeros(n: usize) -> Self {
        LabelVector(vec![0; n])
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        LabelVector(bits.iter().map(|&b| u8::from(b)).collect())
    }

    /// Vector of length `n` with the given label indices set.
    pub fn from_indices(n: usize, set: &[usize]) -> Result<Self> {
        let mut bits = vec![0; n];
        for &i in set {
            if i >= n {
                return Err(Error::input(format!(
                    "label index {i} out of range for {n} labels"
                )));
            }
            bits[i] = 1;
        }
        Ok(LabelVector(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = u8::from(value);
    }

    /// Number of labels set to 1.
    pub fn cardinality(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Indices of the labels set to 1, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::input(format!(
                "label vector has length {}, expected {n}",
                self.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabelVector(")?;
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<u8>> for LabelVector {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        LabelVector::new(bits)
    }
}

impl<const N: usize> TryFrom<[u8; N]> for LabelVector {
    type Error = Error;

    fn try_from(bits: [u8; N]) -> Result<Self> {
        LabelVector::new(bits.to_vec())
    }
}
