//! Kochen-Specker selection checker for systems of orthogonal bases of
//! rays in four dimensions.
//!
//! A model of the basis operators in an observation frame makes every sample
//! point pick exactly one ray from each basis, consistently on rays shared by
//! several bases. Such selections are searched for exhaustively here; a
//! system with none admits no model in any frame.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bases beyond this count make the `4^bases` search impractical.
pub const MAX_SEARCH_BASES: usize = 16;

/// The 18-ray, 9-basis system of Cabello, Estebaranz and García-Alcaine.
pub const CABELLO_18_JSON: &str = include_str!("../data/cabello18.json");

/// A one-dimensional subspace with a canonical integer representative:
/// coprime coordinates, first nonzero coordinate positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ray([i64; 4]);

impl Ray {
    pub fn new(coords: [i64; 4]) -> Result<Self> {
        let g = coords.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g == 0 {
            return Err(Error::InvalidBasisSystem("zero vector is not a ray".into()));
        }
        let first = coords.iter().copied().find(|&c| c != 0).expect("nonzero vector");
        let scale = if first < 0 { -g } else { g };
        Ok(Ray(coords.map(|c| c / scale)))
    }

    pub fn coords(&self) -> [i64; 4] {
        self.0
    }

    pub fn dot(&self, other: &Ray) -> i64 {
        self.0.iter().zip(other.0).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// Four rays, intended to be pairwise orthogonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub rays: [Ray; 4],
}

impl Basis {
    pub fn is_orthogonal(&self) -> bool {
        (0..4).all(|i| (i + 1..4).all(|j| self.rays[i].dot(&self.rays[j]) == 0))
    }
}

/// On-disk form: `{"bases": [[[a,b,c,d], ×4], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSystemFile {
    pub bases: Vec<Vec<[i64; 4]>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSystem {
    bases: Vec<Basis>,
    /// Distinct rays in order of first appearance.
    rays: Vec<Ray>,
    /// For each basis, the index of each of its rays in `rays`.
    ray_ids: Vec<[usize; 4]>,
}

impl BasisSystem {
    pub fn new(bases: Vec<Basis>) -> Self {
        let mut index: HashMap<Ray, usize> = HashMap::new();
        let mut rays = Vec::new();
        let ray_ids = bases
            .iter()
            .map(|b| {
                b.rays.map(|r| {
                    *index.entry(r).or_insert_with(|| {
                        rays.push(r);
                        rays.len() - 1
                    })
                })
            })
            .collect();
        BasisSystem { bases, rays, ray_ids }
    }

    pub fn from_coords(bases: &[Vec<[i64; 4]>]) -> Result<Self> {
        let bases = bases
            .iter()
            .enumerate()
            .map(|(k, b)| {
                if b.len() != 4 {
                    return Err(Error::InvalidBasisSystem(format!(
                        "basis {k} has {} vectors, expected 4",
                        b.len()
                    )));
                }
                let rays = [Ray::new(b[0])?, Ray::new(b[1])?, Ray::new(b[2])?, Ray::new(b[3])?];
                Ok(Basis { rays })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BasisSystem::new(bases))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BasisSystemFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidBasisSystem(e.to_string()))?;
        BasisSystem::from_coords(&file.bases)
    }

    pub fn to_file(&self) -> BasisSystemFile {
        BasisSystemFile {
            bases: self.bases.iter().map(|b| b.rays.iter().map(Ray::coords).collect()).collect(),
        }
    }

    /// The bundled Cabello system.
    pub fn cabello() -> Self {
        BasisSystem::from_json(CABELLO_18_JSON).expect("bundled system parses")
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    /// Number of bases containing each distinct ray.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rays.len()];
        for ids in &self.ray_ids {
            for &r in ids {
                counts[r] += 1;
            }
        }
        counts
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub bases: usize,
    pub distinct_rays: usize,
    pub occurrences: Vec<usize>,
    pub orthogonal: Vec<bool>,
    /// Nine bases, eighteen rays, every ray in exactly two bases.
    pub cabello_profile: bool,
}

impl StructuralReport {
    pub fn all_orthogonal(&self) -> bool {
        self.orthogonal.iter().all(|&o| o)
    }
}

pub fn validate_system(s: &BasisSystem) -> StructuralReport {
    let occurrences = s.occurrences();
    let cabello_profile = s.bases.len() == 9 && s.rays.len() == 18 && occurrences.iter().all(|&c| c == 2);
    StructuralReport {
        bases: s.bases.len(),
        distinct_rays: s.rays.len(),
        orthogonal: s.bases.iter().map(Basis::is_orthogonal).collect(),
        occurrences,
        cabello_profile,
    }
}

/// The position (0..4) of the chosen ray within each basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Selection {
    pub choice: Vec<usize>,
}

impl Selection {
    /// Distinct-ray marking induced by the choice, or `None` if a ray is
    /// both chosen and rejected.
    pub fn marking(&self, s: &BasisSystem) -> Option<Vec<bool>> {
        let mut mark: Vec<Option<bool>> = vec![None; s.rays.len()];
        for (ids, &c) in s.ray_ids.iter().zip(&self.choice) {
            for (pos, &r) in ids.iter().enumerate() {
                let v = pos == c;
                match mark[r] {
                    Some(old) if old != v => return None,
                    _ => mark[r] = Some(v),
                }
            }
        }
        Some(mark.into_iter().map(|m| m.unwrap_or(false)).collect())
    }

    pub fn is_consistent(&self, s: &BasisSystem) -> bool {
        self.choice.len() == s.bases.len() && self.choice.iter().all(|&c| c < 4) && self.marking(s).is_some()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Unknown,
    Chosen,
    Rejected,
}

struct Search<'a> {
    ray_ids: &'a [[usize; 4]],
    marks: Vec<Mark>,
    choice: Vec<usize>,
    found: Vec<Selection>,
    limit: usize,
}

impl Search<'_> {
    fn run(&mut self, basis: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if basis == self.ray_ids.len() {
            self.found.push(Selection {
                choice: self.choice.clone(),
            });
            return;
        }
        let ids = self.ray_ids[basis];
        for pick in 0..4 {
            let feasible = ids.iter().enumerate().all(|(pos, &r)| match self.marks[r] {
                Mark::Unknown => true,
                Mark::Chosen => pos == pick,
                Mark::Rejected => pos != pick,
            });
            if !feasible {
                continue;
            }
            let saved = ids.map(|r| self.marks[r]);
            for (pos, &r) in ids.iter().enumerate() {
                self.marks[r] = if pos == pick { Mark::Chosen } else { Mark::Rejected };
            }
            self.choice.push(pick);
            self.run(basis + 1);
            self.choice.pop();
            for (&r, m) in ids.iter().zip(saved) {
                self.marks[r] = m;
            }
        }
    }
}

/// Consistent one-ray-per-basis selections in lexicographic order, at most
/// `limit` of them.
pub fn find_selections(s: &BasisSystem, limit: usize) -> Result<Vec<Selection>> {
    if s.bases.len() > MAX_SEARCH_BASES {
        return Err(Error::CapExceeded {
            what: "bases for selection search",
            actual: s.bases.len(),
            cap: MAX_SEARCH_BASES,
        });
    }
    let mut search = Search {
        ray_ids: &s.ray_ids,
        marks: vec![Mark::Unknown; s.rays.len()],
        choice: Vec::with_capacity(s.bases.len()),
        found: Vec::new(),
        limit,
    };
    search.run(0);
    Ok(search.found)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityVerdict {
    /// Every ray lies in exactly two bases and the basis count is odd, so no
    /// consistent selection exists.
    Obstruction { bases: usize },
    /// Every ray lies in exactly two bases but the basis count is even.
    NoObstruction { bases: usize },
    /// Some ray does not lie in exactly two bases.
    NotApplicable,
}

/// Counting argument: a consistent selection chooses one ray per basis and
/// each chosen ray is counted in both of its bases, so the number of bases
/// is twice the number of chosen rays.
pub fn parity_obstruction(s: &BasisSystem) -> ParityVerdict {
    if s.occurrences().iter().any(|&c| c != 2) {
        return ParityVerdict::NotApplicable;
    }
    let bases = s.bases.len();
    if bases % 2 == 1 {
        ParityVerdict::Obstruction { bases }
    } else {
        ParityVerdict::NoObstruction { bases }
    }
}

/// Whether some consistent selection exists, i.e. whether the reduction
/// leaves room for a model.
pub fn model_exists(s: &BasisSystem) -> Result<bool> {
    Ok(!find_selections(s, 1)?.is_empty())
}
