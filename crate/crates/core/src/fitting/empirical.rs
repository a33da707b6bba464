use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Ranked relative frequencies `D_1 ≥ D_2 ≥ … ≥ D_m` summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
    total_elements: Option<u64>,
    labels: Option<Vec<String>>,
}

impl EmpiricalDistribution {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of classes `m`.
    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Size of the base set `|M|`, when known.
    pub fn total_elements(&self) -> Option<u64> {
        self.total_elements
    }

    /// Class labels in ranked order.
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_total_elements(mut self, total: Option<u64>) -> Self {
        self.total_elements = total;
        self
    }

    /// Drops the first `k` ranked classes and renormalises the rest.
    pub fn without_top(&self, k: usize) -> Result<Self> {
        let values = self.values.get(k..).unwrap_or_default();
        let labels = self.labels.as_ref().map(|l| l[k.min(l.len())..].to_vec());
        let total = self.total_elements.map(|t| {
            let kept: f64 = values.iter().sum();
            (t as f64 * kept).round() as u64
        });
        match labels {
            Some(labels) => preprocess_labeled(values, labels, total),
            None => preprocess(values, total),
        }
    }
}

impl AsRef<[f64]> for EmpiricalDistribution {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn validate(counts: &[f64]) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (index, &value) in counts.iter().enumerate() {
        if !value.is_finite() {
            return Err(invalid(format!("non-finite count {value} at position {index}")));
        }
        if value < 0.0 {
            return Err(Error::NegativeValue { index, value });
        }
    }
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        Ok(total)
    } else {
        Err(Error::ZeroTotal)
    }
}

fn ranked_order(counts: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // stable: equal counts keep input order
    order.sort_by(|&a, &b| counts[b].total_cmp(&counts[a]));
    order
}

/// Sorts counts descending and normalises them to relative frequencies.
pub fn preprocess(counts: &[f64], total_elements: Option<u64>) -> Result<EmpiricalDistribution> {
    let total = validate(counts)?;
    let values = ranked_order(counts).into_iter().map(|i| counts[i] / total).collect();
    Ok(EmpiricalDistribution {
        values,
        total_elements,
        labels: None,
    })
}

/// Like [`preprocess`], carrying a label per class through the sort.
pub fn preprocess_labeled(
    counts: &[f64],
    labels: Vec<String>,
    total_elements: Option<u64>,
) -> Result<EmpiricalDistribution> {
    if labels.len() != counts.len() {
        return Err(Error::LengthMismatch {
            expected: counts.len(),
            found: labels.len(),
        });
    }
    let total = validate(counts)?;
    let order = ranked_order(counts);
    let values = order.iter().map(|&i| counts[i] / total).collect();
    let labels = order.iter().map(|&i| labels[i].clone()).collect();
    Ok(EmpiricalDistribution {
        values,
        total_elements,
        labels: Some(labels),
    })
}
