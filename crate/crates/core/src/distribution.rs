//! Finite discrete distributions over integer counts.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;

const MASS_TOLERANCE: f64 = 1e-9;

/// A discrete distribution with strictly increasing integer support.
///
/// Values are signed so that perturbed counts (which may leave `[0, n]`) fit
/// the same type as raw counts.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    atoms: Vec<(i64, f64)>,
}

impl EmpiricalDistribution {
    /// Validates atoms: sorted strictly by value, non-negative, total mass 1.
    /// Zero-mass atoms are dropped.
    pub fn from_atoms(atoms: Vec<(i64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::param("atoms", "distribution needs at least one atom"));
        }
        if atoms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::param("atoms", "values must be strictly increasing"));
        }
        if atoms.iter().any(|&(_, p)| !p.is_finite() || p < 0.0) {
            return Err(Error::param("atoms", "probabilities must be finite and non-negative"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::param("atoms", alloc::format!("total mass {total} is not 1")));
        }
        let atoms = atoms.into_iter().filter(|a| a.1 > 0.0).collect();
        Ok(EmpiricalDistribution { atoms })
    }

    /// Normalizes a histogram. Values may repeat; their counts add.
    pub fn from_counts<I>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, u64)>,
    {
        let mut merged: BTreeMap<i64, u64> = BTreeMap::new();
        for (v, c) in counts {
            *merged.entry(v).or_default() += c;
        }
        let total: u64 = merged.values().sum();
        if total == 0 {
            return Err(Error::param("counts", "histogram is empty"));
        }
        let atoms = merged
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(v, c)| (v, c as f64 / total as f64))
            .collect();
        Ok(EmpiricalDistribution { atoms })
    }

    /// Empirical distribution of a sample.
    pub fn from_samples<I>(samples: I) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        Self::from_counts(samples.into_iter().map(|v| (v, 1)))
    }

    pub fn point_mass(value: i64) -> Self {
        EmpiricalDistribution {
            atoms: alloc::vec![(value, 1.0)],
        }
    }

    pub fn atoms(&self) -> &[(i64, f64)] {
        &self.atoms
    }

    pub fn mass_at(&self, value: i64) -> f64 {
        match self.atoms.binary_search_by_key(&value, |a| a.0) {
            Ok(i) => self.atoms[i].1,
            Err(_) => 0.0,
        }
    }

    /// `P(X <= value)`.
    pub fn cdf(&self, value: i64) -> f64 {
        self.atoms.iter().take_while(|a| a.0 <= value).map(|a| a.1).sum()
    }

    pub fn min_value(&self) -> i64 {
        self.atoms[0].0
    }

    pub fn max_value(&self) -> i64 {
        self.atoms[self.atoms.len() - 1].0
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, p)| v as f64 * p).sum()
    }

    /// Smallest value whose CDF reaches `level`.
    pub fn quantile(&self, level: f64) -> i64 {
        let mut acc = 0.0;
        for &(v, p) in &self.atoms {
            acc += p;
            if acc >= level {
                return v;
            }
        }
        self.max_value()
    }

    pub fn median(&self) -> i64 {
        self.quantile(0.5)
    }
}
