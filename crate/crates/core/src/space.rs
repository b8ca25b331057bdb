//! Finite sample spaces, events and signed probability distributions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported number of outcomes; events are `u64` bitmasks.
pub const MAX_OUTCOMES: usize = 64;

/// A nonempty, ordered set of distinctly labelled outcomes.
#[derive(Debug, PartialEq, Eq)]
pub struct SampleSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl SampleSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSpace("sample space must be nonempty".into()));
        }
        if labels.len() > MAX_OUTCOMES {
            return Err(Error::CapExceeded {
                what: "number of outcomes",
                actual: labels.len(),
                cap: MAX_OUTCOMES,
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::InvalidSpace(format!("duplicate outcome label `{label}`")));
            }
        }
        Ok(Arc::new(SampleSpace { labels, index }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn lookup(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Bitmask of all outcomes.
    pub fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }
}

pub(crate) fn same_space(a: &Arc<SampleSpace>, b: &Arc<SampleSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Iterate the indices of set bits, lowest first.
pub(crate) fn mask_members(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

/// A subset of a sample space.
#[derive(Clone, PartialEq, Eq)]
pub struct Event {
    space: Arc<SampleSpace>,
    mask: u64,
}

impl Event {
    pub fn from_mask(space: &Arc<SampleSpace>, mask: u64) -> Result<Self> {
        if mask & !space.full_mask() != 0 {
            return Err(Error::OutOfRange(format!(
                "event mask {mask:#x} has members outside a space of {} outcomes",
                space.len()
            )));
        }
        Ok(Event {
            space: Arc::clone(space),
            mask,
        })
    }

    pub fn from_indices(space: &Arc<SampleSpace>, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = 0u64;
        for i in indices {
            if i >= space.len() {
                return Err(Error::OutOfRange(format!("outcome index {i}")));
            }
            mask |= 1 << i;
        }
        Event::from_mask(space, mask)
    }

    pub fn from_labels<S: AsRef<str>>(space: &Arc<SampleSpace>, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let indices = labels
            .into_iter()
            .map(|l| space.lookup(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Event::from_indices(space, indices)
    }

    pub fn empty(space: &Arc<SampleSpace>) -> Self {
        Event {
            space: Arc::clone(space),
            mask: 0,
        }
    }

    pub fn full(space: &Arc<SampleSpace>) -> Self {
        Event {
            space: Arc::clone(space),
            mask: space.full_mask(),
        }
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, outcome: usize) -> bool {
        outcome < 64 && self.mask & (1 << outcome) != 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> {
        mask_members(self.mask)
    }

    pub fn complement(&self) -> Event {
        Event {
            space: Arc::clone(&self.space),
            mask: !self.mask & self.space.full_mask(),
        }
    }

    fn combine(&self, other: &Event, f: impl Fn(u64, u64) -> u64) -> Result<Event> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Event {
            space: Arc::clone(&self.space),
            mask: f(self.mask, other.mask),
        })
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.combine(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Event) -> Result<Event> {
        self.combine(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Event) -> Result<Event> {
        self.combine(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &Event) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.space.label(i))?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Event{self}")
    }
}

/// A finitely additive set function of total mass one, stored pointwise.
///
/// The probability of an event is the sum of its members' weights, so
/// additivity over disjoint events holds by construction. Weights may be
/// negative.
#[derive(Clone, PartialEq, Eq)]
pub struct SignedDistribution {
    space: Arc<SampleSpace>,
    weights: Vec<Scalar>,
}

impl SignedDistribution {
    pub fn new(space: &Arc<SampleSpace>, weights: Vec<Scalar>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} weights for {} outcomes",
                weights.len(),
                space.len()
            )));
        }
        let total: Scalar = weights.iter().sum();
        if total != Scalar::one() {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        Ok(SignedDistribution {
            space: Arc::clone(space),
            weights,
        })
    }

    pub fn uniform(space: &Arc<SampleSpace>) -> Self {
        let w = Scalar::ratio(1, space.len() as i64);
        SignedDistribution {
            space: Arc::clone(space),
            weights: vec![w; space.len()],
        }
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    pub fn weight(&self, outcome: usize) -> &Scalar {
        &self.weights[outcome]
    }

    pub fn into_weights(self) -> Vec<Scalar> {
        self.weights
    }

    pub(crate) fn prob_mask(&self, mask: u64) -> Scalar {
        mask_members(mask).map(|i| &self.weights[i]).sum()
    }

    pub fn prob(&self, event: &Event) -> Result<Scalar> {
        if !same_space(&self.space, event.space()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.prob_mask(event.mask()))
    }

    /// Whether every event has nonnegative probability.
    pub fn is_traditional(&self) -> bool {
        self.weights.iter().all(|w| w.sign() >= 0)
    }

    /// Whether `parts` partitions the space into events of nonnegative
    /// probability.
    pub fn is_test(&self, parts: &[Event]) -> bool {
        let mut covered = 0u64;
        for part in parts {
            if !same_space(&self.space, part.space()) || covered & part.mask() != 0 {
                return false;
            }
            covered |= part.mask();
            if self.prob_mask(part.mask()).is_negative() {
                return false;
            }
        }
        covered == self.space.full_mask()
    }

    /// Sum of the magnitudes of the negative weights.
    pub fn negative_mass(&self) -> Scalar {
        self.weights.iter().filter(|w| w.is_negative()).map(|w| -w).sum()
    }
}

impl fmt::Debug for SignedDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.space.labels().iter().zip(self.weights.iter().map(ToString::to_string)))
            .finish()
    }
}
