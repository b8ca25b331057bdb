//! JSON file formats. Scalars are always strings in the `a+b*sqrt2`
//! grammar so that files stay exact.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::{Frame, ObservedDistribution};
use crate::scalar::Scalar;
use crate::space::{Event, SampleSpace, SignedDistribution};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartEntry {
    pub outcomes: Vec<String>,
    pub prob: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntry {
    pub name: String,
    pub parts: Vec<PartEntry>,
}

/// An observation space: outcome labels and, per ensemble, its parts with
/// their observed probabilities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub outcomes: Vec<String>,
    pub ensembles: Vec<EnsembleEntry>,
}

impl SpaceFile {
    pub fn from_observed(obs: &ObservedDistribution) -> Self {
        let space = obs.space();
        let ensembles = obs
            .frame()
            .ensembles()
            .iter()
            .zip(obs.table())
            .map(|(en, probs)| EnsembleEntry {
                name: en.name.clone(),
                parts: en
                    .partition
                    .parts()
                    .zip(probs)
                    .map(|(part, p)| PartEntry {
                        outcomes: part.members().map(|i| space.label(i).to_string()).collect(),
                        prob: p.to_string(),
                    })
                    .collect(),
            })
            .collect();
        SpaceFile {
            outcomes: space.labels().to_vec(),
            ensembles,
        }
    }

    /// Parse every probability string, without validating the structure.
    pub fn parse_table(&self) -> Result<Vec<Vec<Scalar>>> {
        self.ensembles
            .iter()
            .map(|en| en.parts.iter().map(|p| Scalar::parse(&p.prob)).collect())
            .collect()
    }

    /// Resolve labels, then validate the frame and the observed table.
    pub fn to_observed(&self) -> Result<ObservedDistribution> {
        let table = self.parse_table()?;
        let space = SampleSpace::new(self.outcomes.iter().cloned())?;
        let ensembles = self
            .ensembles
            .iter()
            .map(|en| {
                let parts = en
                    .parts
                    .iter()
                    .map(|p| Event::from_labels(&space, &p.outcomes))
                    .collect::<Result<Vec<_>>>()?;
                Ok((en.name.clone(), parts))
            })
            .collect::<Result<Vec<_>>>()?;
        let frame = Frame::new(&space, ensembles)?;
        ObservedDistribution::new(frame, table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Outcome weights of a distribution, keyed by label in outcome order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionFile {
    pub weights: Vec<(String, String)>,
}

impl ExtensionFile {
    pub fn from_distribution(d: &SignedDistribution) -> Self {
        ExtensionFile::from_weights(d.space(), d.weights())
    }

    pub fn from_weights(space: &SampleSpace, weights: &[Scalar]) -> Self {
        ExtensionFile {
            weights: space
                .labels()
                .iter()
                .zip(weights)
                .map(|(l, w)| (l.clone(), w.to_string()))
                .collect(),
        }
    }

    /// Weights in the outcome order of `space`; every outcome must appear
    /// exactly once.
    pub fn to_distribution(&self, space: &Arc<SampleSpace>) -> Result<SignedDistribution> {
        let mut weights: Vec<Option<Scalar>> = vec![None; space.len()];
        for (label, text) in &self.weights {
            let i = space.lookup(label)?;
            if weights[i].is_some() {
                return Err(Error::InvalidDistribution(format!("outcome `{label}` listed twice")));
            }
            weights[i] = Some(Scalar::parse(text)?);
        }
        let weights = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| Error::InvalidDistribution(format!("outcome `{}` missing", space.label(i))))
            })
            .collect::<Result<Vec<_>>>()?;
        SignedDistribution::new(space, weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

struct WeightMap<'a>(&'a [(String, String)]);

impl Serialize for WeightMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for ExtensionFile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("weights", &WeightMap(&self.weights))?;
        map.end()
    }
}

struct OrderedPairs(Vec<(String, String)>);

impl<'de> Deserialize<'de> for OrderedPairs {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OrderedPairs;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from outcome label to scalar string")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<OrderedPairs, A::Error> {
                let mut pairs = Vec::new();
                let mut seen = HashSet::new();
                while let Some((k, v)) = access.next_entry::<String, String>()? {
                    if !seen.insert(k.clone()) {
                        return Err(serde::de::Error::custom(format!("duplicate outcome `{k}`")));
                    }
                    pairs.push((k, v));
                }
                Ok(OrderedPairs(pairs))
            }
        }
        d.deserialize_map(V)
    }
}

impl<'de> Deserialize<'de> for ExtensionFile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            weights: OrderedPairs,
        }
        let raw = Raw::deserialize(d)?;
        Ok(ExtensionFile {
            weights: raw.weights.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    #[test]
    fn scenario_files_round_trip() {
        for b in [
            scenarios::piponi(),
            scenarios::bell_default(),
            scenarios::hardy(),
            scenarios::hardy_hidden(),
        ] {
            let file = SpaceFile::from_observed(&b.observed);
            let text = file.to_json();
            let back: SpaceFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.to_observed().unwrap(), b.observed);
        }
    }

    #[test]
    fn extension_file_keeps_order_and_rejects_duplicates() {
        let text = r#"{"weights": {"11": "1/2", "00": "-1/2", "01": "1/2", "10": "1/2"}}"#;
        let f: ExtensionFile = serde_json::from_str(text).unwrap();
        assert_eq!(f.weights[0].0, "11");
        let sp = SampleSpace::new(["00", "01", "10", "11"]).unwrap();
        let d = f.to_distribution(&sp).unwrap();
        assert_eq!(d.weight(0), &Scalar::ratio(-1, 2));
        let back = ExtensionFile::from_distribution(&d).to_json();
        assert!(back.find("\"00\"").unwrap() < back.find("\"11\"").unwrap());

        let dup = r#"{"weights": {"00": "1", "00": "0"}}"#;
        assert!(serde_json::from_str::<ExtensionFile>(dup).is_err());
        let missing: ExtensionFile = serde_json::from_str(r#"{"weights": {"00": "1"}}"#).unwrap();
        assert!(missing.to_distribution(&sp).is_err());
    }

    #[test]
    fn bad_space_files() {
        let mut f = SpaceFile::from_observed(&scenarios::piponi().observed);
        f.ensembles[0].parts[0].prob = "1/2".into();
        assert!(matches!(f.to_observed(), Err(Error::Observation(_))));
        f.ensembles[0].parts[0].prob = "1/".into();
        assert!(matches!(f.to_observed(), Err(Error::Parse { .. })));
        f.ensembles[0].parts[0].prob = "0".into();
        f.ensembles[0].parts[0].outcomes[0] = "22".into();
        assert!(matches!(f.to_observed(), Err(Error::UnknownLabel(_))));
    }
}
