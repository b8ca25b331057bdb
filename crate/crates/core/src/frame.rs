//! Observation frames given by ensemble partitions, observed probabilities on
//! observable events, common refinement, fat-outcome normalization and
//! automorphisms.
//!
//! The collection of coobservable event sets is never materialized. A set of
//! events is coobservable exactly when every event in it is a union of parts
//! of one ensemble partition, i.e. lies in that ensemble's Boolean algebra.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{mask_members, same_space, Event, SampleSpace, SignedDistribution};

/// Largest ensemble partition whose Boolean algebra is enumerated.
pub const MAX_ENUMERATED_PARTS: usize = 16;

/// Default outcome-count cap for brute-force automorphism enumeration.
pub const DEFAULT_AUTOMORPHISM_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameViolation {
    #[error("frame has no ensembles")]
    NoEnsembles,
    #[error("ensemble `{ensemble}` has no parts")]
    NoParts { ensemble: String },
    #[error("ensemble `{ensemble}`: part {part} is empty")]
    EmptyPart { ensemble: String, part: usize },
    #[error("ensemble `{ensemble}`: outcome `{outcome}` lies in more than one part")]
    Overlap { ensemble: String, outcome: String },
    #[error("ensemble `{ensemble}`: outcome `{outcome}` is not covered by any part")]
    Uncovered { ensemble: String, outcome: String },
    #[error("ensemble `{ensemble}`: part belongs to a different sample space")]
    ForeignPart { ensemble: String },
    #[error("duplicate ensemble name `{0}`")]
    DuplicateName(String),
    #[error("ensembles `{first}` and `{second}` induce the same partition")]
    DuplicatePartition { first: String, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObservationViolation {
    #[error("ensemble `{ensemble}`: expected {expected} probabilities, got {actual}")]
    Shape {
        ensemble: String,
        expected: usize,
        actual: usize,
    },
    #[error("ensemble `{ensemble}`: part {part} has negative probability {value}")]
    Negative {
        ensemble: String,
        part: String,
        value: String,
    },
    #[error("ensemble `{ensemble}`: probabilities sum to {sum}, not 1")]
    SumNotOne { ensemble: String, sum: String },
    #[error("ensembles `{first}` and `{second}` disagree on event {event}: {first_value} vs {second_value}")]
    Disagreement {
        first: String,
        second: String,
        event: String,
        first_value: String,
        second_value: String,
    },
}

/// A partition of a sample space into nonempty, pairwise disjoint parts.
#[derive(Clone, PartialEq, Eq)]
pub struct Partition {
    space: Arc<SampleSpace>,
    parts: Vec<u64>,
}

fn check_partition(name: &str, space: &Arc<SampleSpace>, parts: &[Event]) -> Result<(), FrameViolation> {
    if parts.is_empty() {
        return Err(FrameViolation::NoParts {
            ensemble: name.to_string(),
        });
    }
    let mut covered = 0u64;
    for (k, part) in parts.iter().enumerate() {
        if !same_space(space, part.space()) {
            return Err(FrameViolation::ForeignPart {
                ensemble: name.to_string(),
            });
        }
        if part.is_empty() {
            return Err(FrameViolation::EmptyPart {
                ensemble: name.to_string(),
                part: k,
            });
        }
        let overlap = covered & part.mask();
        if overlap != 0 {
            return Err(FrameViolation::Overlap {
                ensemble: name.to_string(),
                outcome: space.label(overlap.trailing_zeros() as usize).to_string(),
            });
        }
        covered |= part.mask();
    }
    let missing = space.full_mask() & !covered;
    if missing != 0 {
        return Err(FrameViolation::Uncovered {
            ensemble: name.to_string(),
            outcome: space.label(missing.trailing_zeros() as usize).to_string(),
        });
    }
    Ok(())
}

impl Partition {
    pub fn new(space: &Arc<SampleSpace>, parts: Vec<Event>) -> Result<Self, FrameViolation> {
        check_partition("<partition>", space, &parts)?;
        Ok(Partition::from_checked(space, &parts))
    }

    fn from_checked(space: &Arc<SampleSpace>, parts: &[Event]) -> Self {
        Partition {
            space: Arc::clone(space),
            parts: parts.iter().map(Event::mask).collect(),
        }
    }

    /// The partition into singletons.
    pub fn discrete(space: &Arc<SampleSpace>) -> Self {
        Partition {
            space: Arc::clone(space),
            parts: (0..space.len()).map(|i| 1u64 << i).collect(),
        }
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.parts
    }

    pub fn part(&self, k: usize) -> Event {
        Event::from_mask(&self.space, self.parts[k]).expect("part lies in its space")
    }

    pub fn parts(&self) -> impl Iterator<Item = Event> + '_ {
        (0..self.parts.len()).map(|k| self.part(k))
    }

    /// Index of the part containing `outcome`.
    pub fn part_of(&self, outcome: usize) -> usize {
        self.parts
            .iter()
            .position(|&m| m & (1 << outcome) != 0)
            .expect("parts cover the space")
    }

    /// Whether `mask` is a union of parts.
    pub fn generates(&self, mask: u64) -> bool {
        self.parts.iter().all(|&p| p & mask == 0 || p & mask == p)
    }

    /// Whether every part of `self` lies inside a part of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.parts.iter().all(|&p| other.parts.iter().any(|&q| p & q == p))
    }

    /// Parts as a sorted list of masks; equal partitions have equal keys.
    pub fn canonical_key(&self) -> Vec<u64> {
        let mut k = self.parts.clone();
        k.sort_unstable();
        k
    }

    /// Every union of parts, indexed by the bitmask of chosen parts.
    pub fn algebra(&self) -> Result<Vec<u64>> {
        if self.parts.len() > MAX_ENUMERATED_PARTS {
            return Err(Error::CapExceeded {
                what: "parts per enumerated ensemble",
                actual: self.parts.len(),
                cap: MAX_ENUMERATED_PARTS,
            });
        }
        let k = self.parts.len();
        let mut events = vec![0u64; 1 << k];
        for sel in 1usize..(1 << k) {
            let low = sel.trailing_zeros() as usize;
            events[sel] = events[sel & (sel - 1)] | self.parts[low];
        }
        Ok(events)
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.parts()).finish()
    }
}

/// A named ensemble, represented by the partition formed by its atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ensemble {
    pub name: String,
    pub partition: Partition,
}

/// Check the partition and naming invariants of a prospective frame.
pub fn validate_frame(space: &Arc<SampleSpace>, ensembles: &[(String, Vec<Event>)]) -> Result<(), FrameViolation> {
    if ensembles.is_empty() {
        return Err(FrameViolation::NoEnsembles);
    }
    let mut names = HashSet::new();
    let mut seen: HashMap<Vec<u64>, &str> = HashMap::new();
    for (name, parts) in ensembles {
        if !names.insert(name.as_str()) {
            return Err(FrameViolation::DuplicateName(name.clone()));
        }
        check_partition(name, space, parts)?;
        let mut key: Vec<u64> = parts.iter().map(Event::mask).collect();
        key.sort_unstable();
        if let Some(first) = seen.insert(key, name) {
            return Err(FrameViolation::DuplicatePartition {
                first: first.to_string(),
                second: name.clone(),
            });
        }
    }
    Ok(())
}

/// A sample space together with the ensembles that generate its coobservable sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    space: Arc<SampleSpace>,
    ensembles: Vec<Ensemble>,
}

impl Frame {
    pub fn new(space: &Arc<SampleSpace>, ensembles: Vec<(String, Vec<Event>)>) -> Result<Self, FrameViolation> {
        validate_frame(space, &ensembles)?;
        let ensembles = ensembles
            .into_iter()
            .map(|(name, parts)| Ensemble {
                name,
                partition: Partition::from_checked(space, &parts),
            })
            .collect();
        Ok(Frame {
            space: Arc::clone(space),
            ensembles,
        })
    }

    /// Build from outcome-index lists, e.g. `("AB", vec![vec![0, 1], vec![2, 3]])`.
    pub fn from_indices(space: &Arc<SampleSpace>, ensembles: Vec<(String, Vec<Vec<usize>>)>) -> Result<Self> {
        let ensembles = ensembles
            .into_iter()
            .map(|(name, parts)| {
                let parts = parts
                    .into_iter()
                    .map(|p| Event::from_indices(space, p))
                    .collect::<Result<Vec<_>>>()?;
                Ok((name, parts))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Frame::new(space, ensembles)?)
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn ensembles(&self) -> &[Ensemble] {
        &self.ensembles
    }

    pub fn ensemble_index(&self, name: &str) -> Option<usize> {
        self.ensembles.iter().position(|e| e.name == name)
    }

    fn check_space(&self, e: &Event) -> Result<()> {
        if same_space(&self.space, e.space()) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Whether `e` is a union of parts of some ensemble.
    pub fn is_observable(&self, e: &Event) -> Result<bool> {
        self.check_space(e)?;
        Ok(self.ensembles.iter().any(|en| en.partition.generates(e.mask())))
    }

    /// Whether a single ensemble's algebra contains every event in `events`.
    pub fn is_coobservable(&self, events: &[Event]) -> Result<bool> {
        for e in events {
            self.check_space(e)?;
        }
        Ok(self
            .ensembles
            .iter()
            .any(|en| events.iter().all(|e| en.partition.generates(e.mask()))))
    }

    /// The coarsest partition refining every ensemble partition. Parts are
    /// ordered by their lowest outcome.
    pub fn common_refinement(&self) -> Partition {
        let mut by_signature: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        let mut order: Vec<Vec<usize>> = Vec::new();
        for w in 0..self.space.len() {
            let sig: Vec<usize> = self.ensembles.iter().map(|e| e.partition.part_of(w)).collect();
            let slot = by_signature.entry(sig.clone()).or_insert_with(|| {
                order.push(sig);
                0
            });
            *slot |= 1 << w;
        }
        Partition {
            space: Arc::clone(&self.space),
            parts: order.iter().map(|s| by_signature[s]).collect(),
        }
    }

    /// Whether every part of the common refinement is a single outcome.
    pub fn is_normalized(&self) -> bool {
        self.common_refinement().len() == self.space.len()
    }
}

/// Probabilities of the parts of each ensemble of a frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservedDistribution {
    frame: Frame,
    table: Vec<Vec<Scalar>>,
}

impl ObservedDistribution {
    /// Validates nonnegativity, normalization per ensemble, and agreement on
    /// events shared by two ensembles' algebras.
    pub fn new(frame: Frame, table: Vec<Vec<Scalar>>) -> Result<Self> {
        if table.len() != frame.ensembles.len() {
            return Err(ObservationViolation::Shape {
                ensemble: "<frame>".into(),
                expected: frame.ensembles.len(),
                actual: table.len(),
            }
            .into());
        }
        for (en, probs) in frame.ensembles.iter().zip(&table) {
            if probs.len() != en.partition.len() {
                return Err(ObservationViolation::Shape {
                    ensemble: en.name.clone(),
                    expected: en.partition.len(),
                    actual: probs.len(),
                }
                .into());
            }
            for (k, p) in probs.iter().enumerate() {
                if p.is_negative() {
                    return Err(ObservationViolation::Negative {
                        ensemble: en.name.clone(),
                        part: en.partition.part(k).to_string(),
                        value: p.to_string(),
                    }
                    .into());
                }
            }
            let sum: Scalar = probs.iter().sum();
            if sum != Scalar::one() {
                return Err(ObservationViolation::SumNotOne {
                    ensemble: en.name.clone(),
                    sum: sum.to_string(),
                }
                .into());
            }
        }
        let obs = ObservedDistribution { frame, table };
        obs.check_agreement()?;
        Ok(obs)
    }

    fn check_agreement(&self) -> Result<()> {
        let ens = &self.frame.ensembles;
        if ens.len() < 2 {
            return Ok(());
        }
        let mut maps: Vec<HashMap<u64, Scalar>> = Vec::with_capacity(ens.len());
        for (i, en) in ens.iter().enumerate() {
            let events = en.partition.algebra()?;
            let mut probs = vec![Scalar::zero(); events.len()];
            let mut map = HashMap::with_capacity(events.len());
            for sel in 1..events.len() {
                let low = sel.trailing_zeros() as usize;
                probs[sel] = &probs[sel & (sel - 1)] + &self.table[i][low];
            }
            for (m, p) in events.into_iter().zip(probs) {
                map.insert(m, p);
            }
            maps.push(map);
        }
        for i in 0..ens.len() {
            for j in i + 1..ens.len() {
                for (mask, pi) in &maps[i] {
                    if let Some(pj) = maps[j].get(mask) {
                        if pi != pj {
                            let event = Event::from_mask(&self.frame.space, *mask)?;
                            return Err(ObservationViolation::Disagreement {
                                first: ens[i].name.clone(),
                                second: ens[j].name.clone(),
                                event: event.to_string(),
                                first_value: pi.to_string(),
                                second_value: pj.to_string(),
                            }
                            .into());
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.frame.space
    }

    pub fn table(&self) -> &[Vec<Scalar>] {
        &self.table
    }

    pub fn part_prob(&self, ensemble: usize, part: usize) -> &Scalar {
        &self.table[ensemble][part]
    }

    /// Observed probability of `e`, or `None` when `e` is not observable.
    pub fn prob(&self, e: &Event) -> Result<Option<Scalar>> {
        self.frame.check_space(e)?;
        for (en, probs) in self.frame.ensembles.iter().zip(&self.table) {
            if en.partition.generates(e.mask()) {
                let p = en
                    .partition
                    .masks()
                    .iter()
                    .zip(probs)
                    .filter(|(&m, _)| m & e.mask() != 0)
                    .map(|(_, p)| p)
                    .sum();
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// First ensemble part on which `d` disagrees with the observed table.
    pub fn first_mismatch(&self, d: &SignedDistribution) -> Result<Option<String>> {
        if !same_space(&self.frame.space, d.space()) {
            return Err(Error::SpaceMismatch);
        }
        for (en, probs) in self.frame.ensembles.iter().zip(&self.table) {
            for (part, expected) in en.partition.parts().zip(probs) {
                let got = d.prob(&part)?;
                if &got != expected {
                    return Ok(Some(format!(
                        "ensemble `{}` part {}: {} instead of {}",
                        en.name, part, got, expected
                    )));
                }
            }
        }
        Ok(None)
    }

    /// Whether `d` assigns every ensemble part its observed probability, and
    /// hence (by additivity) agrees on every observable event.
    pub fn is_extended_by(&self, d: &SignedDistribution) -> Result<bool> {
        Ok(self.first_mismatch(d)?.is_none())
    }

    /// Merge the outcomes of each part of the common refinement.
    ///
    /// Merged outcomes are labelled by their sorted original labels joined
    /// with `+`; singleton parts keep their label. An already normalized
    /// space is returned unchanged.
    pub fn normalize_fat_outcomes(&self) -> Result<ObservedDistribution> {
        let refinement = self.frame.common_refinement();
        if refinement.len() == self.frame.space.len() {
            return Ok(self.clone());
        }
        let old = &self.frame.space;
        let labels: Vec<String> = refinement
            .masks()
            .iter()
            .map(|&m| {
                let mut ls: Vec<&str> = mask_members(m).map(|i| old.label(i)).collect();
                ls.sort_unstable();
                ls.join("+")
            })
            .collect();
        let space = SampleSpace::new(labels)?;
        let new_index: Vec<usize> = (0..old.len()).map(|w| refinement.part_of(w)).collect();
        let ensembles = self
            .frame
            .ensembles
            .iter()
            .map(|en| {
                let parts = en
                    .partition
                    .masks()
                    .iter()
                    .map(|&m| Event::from_indices(&space, mask_members(m).map(|w| new_index[w])))
                    .collect::<Result<Vec<_>>>()?;
                Ok((en.name.clone(), parts))
            })
            .collect::<Result<Vec<_>>>()?;
        let frame = Frame::new(&space, ensembles)?;
        ObservedDistribution::new(frame, self.table.clone())
    }
}

/// A permutation of outcome indices; `image(i)` is where outcome `i` goes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    perm: Vec<usize>,
}

impl Automorphism {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
            }
        }
        Ok(Automorphism { perm })
    }

    pub fn identity(n: usize) -> Self {
        Automorphism { perm: (0..n).collect() }
    }

    /// Build from disjoint cycles of outcome labels.
    pub fn from_cycles(space: &SampleSpace, cycles: &[Vec<String>]) -> Result<Self> {
        let mut perm: Vec<usize> = (0..space.len()).collect();
        let mut moved = vec![false; space.len()];
        for cycle in cycles {
            let idx = cycle
                .iter()
                .map(|l| {
                    space
                        .index_of(l)
                        .ok_or_else(|| Error::InvalidPermutation(format!("unknown outcome `{l}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            for &i in &idx {
                if std::mem::replace(&mut moved[i], true) {
                    return Err(Error::InvalidPermutation(format!(
                        "outcome `{}` appears twice",
                        space.label(i)
                    )));
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                perm[i] = idx[(k + 1) % idx.len()];
            }
        }
        Automorphism::new(perm)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply_mask(&self, mask: u64) -> u64 {
        mask_members(mask).fold(0, |acc, i| acc | 1 << self.perm[i])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Automorphism {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Automorphism { perm: inv }
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Automorphism{:?}", self.perm)
    }
}

/// Check that `g` maps every ensemble partition onto an ensemble partition
/// with matching part probabilities.
pub fn check_automorphism(obs: &ObservedDistribution, g: &Automorphism) -> Result<()> {
    let frame = obs.frame();
    if g.len() != frame.space.len() {
        return Err(Error::InvalidPermutation(format!(
            "permutation of {} points on a space of {} outcomes",
            g.len(),
            frame.space.len()
        )));
    }
    let keys: Vec<Vec<u64>> = frame.ensembles.iter().map(|e| e.partition.canonical_key()).collect();
    for (ei, en) in frame.ensembles.iter().enumerate() {
        let images: Vec<u64> = en.partition.masks().iter().map(|&m| g.apply_mask(m)).collect();
        let mut key = images.clone();
        key.sort_unstable();
        let Some(fi) = keys.iter().position(|k| *k == key) else {
            return Err(Error::NotAutomorphism {
                ensemble: en.name.clone(),
                reason: "is not an ensemble partition".into(),
            });
        };
        let target = &frame.ensembles[fi].partition;
        for (k, img) in images.iter().enumerate() {
            let j = target.masks().iter().position(|m| m == img).expect("keys matched");
            if obs.table[ei][k] != obs.table[fi][j] {
                return Err(Error::NotAutomorphism {
                    ensemble: en.name.clone(),
                    reason: format!(
                        "changes the probability of part {} ({} vs {})",
                        en.partition.part(k),
                        obs.table[ei][k],
                        obs.table[fi][j]
                    ),
                });
            }
        }
    }
    Ok(())
}

pub fn is_automorphism(obs: &ObservedDistribution, g: &Automorphism) -> bool {
    check_automorphism(obs, g).is_ok()
}

/// A finite set of automorphisms, sorted, intended to form a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    elements: Vec<Automorphism>,
}

impl AutomorphismGroup {
    pub fn trivial(n: usize) -> Self {
        AutomorphismGroup {
            elements: vec![Automorphism::identity(n)],
        }
    }

    /// Wrap a list of elements without checking any group law.
    pub fn from_elements(mut elements: Vec<Automorphism>) -> Self {
        elements.sort();
        elements.dedup();
        AutomorphismGroup { elements }
    }

    /// All automorphisms of `obs`, by brute force over permutations.
    pub fn enumerate(obs: &ObservedDistribution, cap: usize) -> Result<Self> {
        let n = obs.space().len();
        if n > cap {
            return Err(Error::CapExceeded {
                what: "outcomes for automorphism enumeration",
                actual: n,
                cap,
            });
        }
        let mut found = Vec::new();
        let mut perm: Vec<usize> = Vec::with_capacity(n);
        let mut used = vec![false; n];
        permutations(n, &mut perm, &mut used, &mut |p| {
            let g = Automorphism { perm: p.to_vec() };
            if is_automorphism(obs, &g) {
                found.push(g);
            }
        });
        let group = AutomorphismGroup { elements: found };
        group.check_group()?;
        Ok(group)
    }

    /// The group generated by `generators`, each of which must be an
    /// automorphism of `obs`.
    pub fn generate(obs: &ObservedDistribution, generators: &[Automorphism]) -> Result<Self> {
        let n = obs.space().len();
        for g in generators {
            check_automorphism(obs, g)?;
        }
        let id = Automorphism::identity(n);
        let mut seen: HashSet<Automorphism> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(h) = queue.pop_front() {
            for g in generators {
                let next = g.compose(&h);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        Ok(AutomorphismGroup::from_elements(seen.into_iter().collect()))
    }

    pub fn elements(&self) -> &[Automorphism] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &Automorphism) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    /// Identity, closure under composition, and inverses.
    pub fn check_group(&self) -> Result<()> {
        let Some(first) = self.elements.first() else {
            return Err(Error::NotAGroup("empty".into()));
        };
        let n = first.len();
        if self.elements.iter().any(|g| g.len() != n) {
            return Err(Error::NotAGroup("permutations of different degrees".into()));
        }
        if !self.contains(&Automorphism::identity(n)) {
            return Err(Error::NotAGroup("identity missing".into()));
        }
        for g in &self.elements {
            if !self.contains(&g.inverse()) {
                return Err(Error::NotAGroup(format!("inverse of {g:?} missing")));
            }
            for h in &self.elements {
                if !self.contains(&g.compose(h)) {
                    return Err(Error::NotAGroup(format!("{g:?} ∘ {h:?} missing")));
                }
            }
        }
        Ok(())
    }
}

fn permutations(n: usize, perm: &mut Vec<usize>, used: &mut [bool], visit: &mut impl FnMut(&[usize])) {
    if perm.len() == n {
        visit(perm);
        return;
    }
    for i in 0..n {
        if !used[i] {
            used[i] = true;
            perm.push(i);
            permutations(n, perm, used, visit);
            perm.pop();
            used[i] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn piponi_space() -> Arc<SampleSpace> {
        SampleSpace::new(["00", "01", "10", "11"]).unwrap()
    }

    fn piponi_frame() -> Frame {
        Frame::from_indices(
            &piponi_space(),
            vec![
                ("left".into(), vec![vec![0, 1], vec![2, 3]]),
                ("right".into(), vec![vec![0, 2], vec![1, 3]]),
                ("equal".into(), vec![vec![0, 3], vec![1, 2]]),
            ],
        )
        .unwrap()
    }

    fn piponi_obs() -> ObservedDistribution {
        let t = vec![Scalar::zero(), Scalar::one()];
        ObservedDistribution::new(piponi_frame(), vec![t.clone(), t.clone(), t]).unwrap()
    }

    fn ev(sp: &Arc<SampleSpace>, labels: &[&str]) -> Event {
        Event::from_labels(sp, labels.iter().copied()).unwrap()
    }

    #[test]
    fn frame_validation() {
        let sp = piponi_space();
        assert!(matches!(
            Frame::from_indices(&sp, vec![("bad".into(), vec![vec![0, 1], vec![1, 3]])]),
            Err(Error::Frame(FrameViolation::Overlap { .. }))
        ));
        assert!(matches!(
            Frame::from_indices(&sp, vec![("bad".into(), vec![vec![0, 1], vec![2]])]),
            Err(Error::Frame(FrameViolation::Uncovered { ref outcome, .. })) if outcome == "11"
        ));
        assert!(matches!(
            Frame::from_indices(&sp, vec![("e".into(), vec![vec![], vec![0, 1, 2, 3]])]),
            Err(Error::Frame(FrameViolation::EmptyPart { .. }))
        ));
        assert!(matches!(
            Frame::from_indices(
                &sp,
                vec![
                    ("a".into(), vec![vec![0, 1], vec![2, 3]]),
                    ("b".into(), vec![vec![3, 2], vec![1, 0]]),
                ]
            ),
            Err(Error::Frame(FrameViolation::DuplicatePartition { .. }))
        ));
        assert!(matches!(
            Frame::from_indices(
                &sp,
                vec![("a".into(), vec![vec![0, 1, 2, 3]]), ("a".into(), vec![vec![0], vec![1, 2, 3]])]
            ),
            Err(Error::Frame(FrameViolation::DuplicateName(_)))
        ));
        assert_eq!(Frame::new(&sp, vec![]), Err(FrameViolation::NoEnsembles));
    }

    #[test]
    fn observability() {
        let f = piponi_frame();
        let sp = f.space().clone();
        assert!(f.is_observable(&ev(&sp, &["00", "11"])).unwrap());
        assert!(!f.is_observable(&ev(&sp, &["01"])).unwrap());
        assert!(f.is_observable(&Event::full(&sp)).unwrap());
        assert!(f.is_observable(&Event::empty(&sp)).unwrap());
        assert!(f.is_coobservable(&[ev(&sp, &["00", "01"]), ev(&sp, &["10", "11"])]).unwrap());
        assert!(!f.is_coobservable(&[ev(&sp, &["00", "01"]), ev(&sp, &["00", "10"])]).unwrap());
        assert!(f.is_coobservable(&[]).unwrap());
        let other = SampleSpace::new(["x"]).unwrap();
        assert_eq!(f.is_observable(&Event::full(&other)), Err(Error::SpaceMismatch));
    }

    #[test]
    fn refinement() {
        let f = piponi_frame();
        let r = f.common_refinement();
        assert_eq!(r.masks(), &[1, 2, 4, 8]);
        assert!(f.is_normalized());
        let single = Frame::from_indices(&piponi_space(), vec![("a".into(), vec![vec![0, 1], vec![2, 3]])]).unwrap();
        assert_eq!(single.common_refinement().canonical_key(), single.ensembles()[0].partition.canonical_key());
        assert!(!single.is_normalized());
    }

    #[test]
    fn fat_outcomes_merge() {
        let single = Frame::from_indices(&piponi_space(), vec![("a".into(), vec![vec![0, 1], vec![2, 3]])]).unwrap();
        let obs = ObservedDistribution::new(single, vec![vec![Scalar::ratio(1, 3), Scalar::ratio(2, 3)]]).unwrap();
        let norm = obs.normalize_fat_outcomes().unwrap();
        assert_eq!(norm.space().labels(), &["00+01".to_string(), "10+11".to_string()]);
        assert_eq!(norm.table(), obs.table());
        assert!(norm.frame().is_normalized());
        assert_eq!(norm.normalize_fat_outcomes().unwrap(), norm);
        assert_eq!(piponi_obs().normalize_fat_outcomes().unwrap(), piponi_obs());
    }

    #[test]
    fn merged_labels_are_sorted() {
        let sp = SampleSpace::new(["c", "a", "b"]).unwrap();
        let f = Frame::from_indices(&sp, vec![("e".into(), vec![vec![0, 1], vec![2]])]).unwrap();
        let obs = ObservedDistribution::new(f, vec![vec![Scalar::ratio(1, 2), Scalar::ratio(1, 2)]]).unwrap();
        let norm = obs.normalize_fat_outcomes().unwrap();
        assert_eq!(norm.space().labels(), &["a+c".to_string(), "b".to_string()]);
    }

    #[test]
    fn observed_distribution_validation() {
        let f = piponi_frame();
        let bad_sum = vec![vec![Scalar::ratio(1, 2), Scalar::one()]; 3];
        assert!(matches!(
            ObservedDistribution::new(f.clone(), bad_sum),
            Err(Error::Observation(ObservationViolation::SumNotOne { ref ensemble, .. })) if ensemble == "left"
        ));
        let negative = vec![vec![Scalar::integer(-1), Scalar::integer(2)]; 3];
        assert!(matches!(
            ObservedDistribution::new(f.clone(), negative),
            Err(Error::Observation(ObservationViolation::Negative { .. }))
        ));
        // two ensembles sharing the event {00,01}, with different probabilities
        let sp = piponi_space();
        let g = Frame::from_indices(
            &sp,
            vec![
                ("a".into(), vec![vec![0, 1], vec![2, 3]]),
                ("b".into(), vec![vec![0, 1], vec![2], vec![3]]),
            ],
        )
        .unwrap();
        let r = ObservedDistribution::new(
            g,
            vec![
                vec![Scalar::zero(), Scalar::one()],
                vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
            ],
        );
        assert!(matches!(r, Err(Error::Observation(ObservationViolation::Disagreement { .. }))));
    }

    #[test]
    fn observed_event_probabilities() {
        let obs = piponi_obs();
        let sp = obs.space().clone();
        assert_eq!(obs.prob(&ev(&sp, &["10", "11"])).unwrap(), Some(Scalar::one()));
        assert_eq!(obs.prob(&Event::full(&sp)).unwrap(), Some(Scalar::one()));
        assert_eq!(obs.prob(&ev(&sp, &["01"])).unwrap(), None);
    }

    #[test]
    fn piponi_automorphisms() {
        let obs = piponi_obs();
        assert!(is_automorphism(&obs, &Automorphism::identity(4)));
        let swap = Automorphism::new(vec![0, 2, 1, 3]).unwrap();
        assert!(is_automorphism(&obs, &swap));
        // swapping 00 and 11 maps {00,01} to {11,01}, which is no ensemble part
        let bad = Automorphism::new(vec![3, 1, 2, 0]).unwrap();
        assert!(matches!(check_automorphism(&obs, &bad), Err(Error::NotAutomorphism { .. })));
        let group = AutomorphismGroup::enumerate(&obs, DEFAULT_AUTOMORPHISM_CAP).unwrap();
        assert!(group.contains(&swap));
        group.check_group().unwrap();
        let generated = AutomorphismGroup::generate(&obs, std::slice::from_ref(&swap)).unwrap();
        assert_eq!(generated.len(), 2);
    }

    #[test]
    fn permutation_parsing() {
        let sp = piponi_space();
        let g = Automorphism::from_cycles(&sp, &[vec!["01".into(), "10".into()]]).unwrap();
        assert_eq!(g.as_slice(), &[0, 2, 1, 3]);
        assert!(Automorphism::from_cycles(&sp, &[vec!["01".into(), "01".into()]]).is_err());
        assert!(Automorphism::from_cycles(&sp, &[vec!["zz".into()]]).is_err());
        assert!(Automorphism::new(vec![0, 0, 1]).is_err());
        assert!(Automorphism::from_cycles(&sp, &[]).unwrap().is_identity());
    }

    #[test]
    fn group_law_failures() {
        let g = Automorphism::new(vec![1, 2, 0]).unwrap();
        let not_closed = AutomorphismGroup::from_elements(vec![Automorphism::identity(3), g]);
        assert!(not_closed.check_group().is_err());
        let no_identity = AutomorphismGroup::from_elements(vec![Automorphism::new(vec![1, 0, 2]).unwrap()]);
        assert!(no_identity.check_group().is_err());
    }

    #[test]
    fn enumeration_cap() {
        let obs = piponi_obs();
        assert!(matches!(
            AutomorphismGroup::enumerate(&obs, 3),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn algebra_cap() {
        let sp = SampleSpace::new((0..17).map(|i| i.to_string())).unwrap();
        assert!(Partition::discrete(&sp).algebra().is_err());
    }
}
