//! Built-in observation spaces: Piponi's two-bit box, the three-orientation
//! Bell experiment, and Hardy's two-qubit experiment.

use std::fmt;

use crate::error::{Error, Result};
use crate::frame::{Frame, ObservedDistribution};
use crate::scalar::Scalar;
use crate::space::SampleSpace;

/// An angle `kπ/8` with `0 ≤ k ≤ 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EighthAngle(u8);

impl EighthAngle {
    pub fn new(k: i64) -> Result<Self> {
        if (0..=4).contains(&k) {
            Ok(EighthAngle(k as u8))
        } else {
            Err(Error::OutOfRange(format!("angle {k}π/8 is outside 0..=4 eighths")))
        }
    }

    pub fn eighths(self) -> u8 {
        self.0
    }

    /// Angle between two orientations.
    pub fn between(self, other: EighthAngle) -> EighthAngle {
        EighthAngle(self.0.abs_diff(other.0))
    }
}

impl fmt::Display for EighthAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π/8", self.0)
    }
}

/// Exact `cos²(kπ/8)`.
pub fn cos2(angle: EighthAngle) -> Scalar {
    match angle.0 {
        0 => Scalar::one(),
        1 => Scalar::from_parts(1, 2, 1, 4),
        2 => Scalar::ratio(1, 2),
        3 => Scalar::from_parts(1, 2, -1, 4),
        4 => Scalar::zero(),
        _ => unreachable!("EighthAngle holds 0..=4"),
    }
}

pub fn sin2(angle: EighthAngle) -> Scalar {
    Scalar::one() - cos2(angle)
}

/// An observation space together with a note on where each table entry
/// comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioBundle {
    pub name: String,
    pub observed: ObservedDistribution,
    /// One note per ensemble part, in table order.
    pub notes: Vec<Vec<String>>,
}

impl ScenarioBundle {
    pub fn frame(&self) -> &Frame {
        self.observed.frame()
    }
}

type EnsembleSpec = (String, Vec<Vec<usize>>, Vec<Scalar>, Vec<String>);

fn bundle(name: &str, labels: Vec<String>, ensembles: Vec<EnsembleSpec>) -> ScenarioBundle {
    let space = SampleSpace::new(labels).expect("scenario labels are distinct");
    let mut parts = Vec::new();
    let mut table = Vec::new();
    let mut notes = Vec::new();
    for (ensemble, ps, probs, ns) in ensembles {
        parts.push((ensemble, ps));
        table.push(probs);
        notes.push(ns);
    }
    let frame = Frame::from_indices(&space, parts).expect("scenario frames are valid");
    let observed = ObservedDistribution::new(frame, table).expect("scenario tables are consistent");
    ScenarioBundle {
        name: name.to_string(),
        observed,
        notes,
    }
}

/// Two bits seen through a left door, a right door, and an equality test.
/// Each experiment reports the "1"/"unequal" side with certainty.
pub fn piponi() -> ScenarioBundle {
    let labels = ["00", "01", "10", "11"].map(String::from).to_vec();
    let zero_one = || vec![Scalar::zero(), Scalar::one()];
    let ens = |name: &str, a: [usize; 2], b: [usize; 2], na: &str, nb: &str| {
        (
            name.to_string(),
            vec![a.to_vec(), b.to_vec()],
            zero_one(),
            vec![na.to_string(), nb.to_string()],
        )
    };
    bundle(
        "piponi",
        labels,
        vec![
            ens("left", [0, 1], [2, 3], "P(l=0) = 0", "P(l=1) = 1"),
            ens("right", [0, 2], [1, 3], "P(r=0) = 0", "P(r=1) = 1"),
            ens("equal", [0, 3], [1, 2], "P(l=r) = 0", "P(l≠r) = 1"),
        ],
    )
}

const SIGNS: [char; 2] = ['+', '-'];

/// Three analyzer orientations `a`, `b`, `c`; outcome `xyz` records the
/// results along each. Experiments AB, BC and AC each reveal two letters,
/// which agree with probability `cos²θ` for the angle θ between them.
pub fn bell(a: EighthAngle, b: EighthAngle, c: EighthAngle) -> ScenarioBundle {
    // Outcome index 4x + 2y + z with + before −, so "+++" is first and "---" last.
    let labels: Vec<String> = (0..8)
        .map(|i| [SIGNS[i >> 2], SIGNS[(i >> 1) & 1], SIGNS[i & 1]].iter().collect())
        .collect();
    let half = Scalar::ratio(1, 2);
    let pair = |name: &str, first: usize, second: usize, theta: EighthAngle| {
        let mut parts = Vec::new();
        let mut probs = Vec::new();
        let mut notes = Vec::new();
        for u in 0..2 {
            for v in 0..2 {
                parts.push(
                    (0..8usize)
                        .filter(|&i| (i >> (2 - first)) & 1 == u && (i >> (2 - second)) & 1 == v)
                        .collect(),
                );
                let (law, p) = if u == v { ("cos", cos2(theta)) } else { ("sin", sin2(theta)) };
                probs.push(&half * &p);
                notes.push(format!("½{law}²({theta})"));
            }
        }
        (name.to_string(), parts, probs, notes)
    };
    bundle(
        "bell",
        labels,
        vec![
            pair("AB", 0, 1, a.between(b)),
            pair("BC", 1, 2, b.between(c)),
            pair("AC", 0, 2, a.between(c)),
        ],
    )
}

/// The orientations used in the worked example: ∠(A,B) = π/4, ∠(B,C) = π/8.
pub fn bell_default() -> ScenarioBundle {
    let k = |v| EighthAngle::new(v).expect("in range");
    bell(k(0), k(2), k(3))
}

/// Detector setting pairs, left then right.
pub const HARDY_SETTINGS: [&str; 4] = ["ZZ", "ZX", "XZ", "XX"];

/// Conditional probabilities of the result pairs (++, +−, −+, −−) for each
/// setting pair, from the state (|01⟩ + |10⟩ − |00⟩)/√3.
pub fn hardy_conditionals() -> [[Scalar; 4]; 4] {
    let r = Scalar::ratio;
    [
        [r(1, 3), r(1, 3), r(1, 3), r(0, 1)],
        [r(0, 1), r(2, 3), r(1, 6), r(1, 6)],
        [r(0, 1), r(1, 6), r(2, 3), r(1, 6)],
        [r(1, 12), r(1, 12), r(1, 12), r(3, 4)],
    ]
}

const RESULT_PAIRS: [&str; 4] = ["++", "+-", "-+", "--"];

/// Sixteen directly observed outcomes (settings, left result, right result)
/// in a single ensemble of singletons. Settings are chosen uniformly.
pub fn hardy() -> ScenarioBundle {
    let cond = hardy_conditionals();
    let quarter = Scalar::ratio(1, 4);
    let mut labels = Vec::new();
    let mut probs = Vec::new();
    let mut notes = Vec::new();
    for (s, setting) in HARDY_SETTINGS.iter().enumerate() {
        for (k, results) in RESULT_PAIRS.iter().enumerate() {
            labels.push(format!("{setting}{results}"));
            probs.push(&quarter * &cond[s][k]);
            notes.push(format!("¼·P[{results}|{setting}] = ¼·{}", cond[s][k]));
        }
    }
    let parts = (0..16).map(|i| vec![i]).collect();
    bundle("hardy", labels, vec![("direct".into(), parts, probs, notes)])
}

/// Sixteen hidden assignments `(z_l, x_l, z_r, x_r)` of values to both
/// observables on both sides. Each setting pair is an ensemble revealing the
/// two measured values.
pub fn hardy_hidden() -> ScenarioBundle {
    // label characters in order z_l x_l z_r x_r; index bit 3 is z_l
    let labels: Vec<String> = (0..16usize)
        .map(|i| (0..4).map(|b| SIGNS[(i >> (3 - b)) & 1]).collect())
        .collect();
    let cond = hardy_conditionals();
    // position (0..4) in the label of the left and right observable
    let reveal = [(0, 2), (0, 3), (1, 2), (1, 3)];
    let ensembles = HARDY_SETTINGS
        .iter()
        .zip(reveal)
        .enumerate()
        .map(|(s, (setting, (l, r)))| {
            let mut parts = Vec::new();
            let mut notes = Vec::new();
            for u in 0..2 {
                for v in 0..2 {
                    parts.push(
                        (0..16usize)
                            .filter(|&i| (i >> (3 - l)) & 1 == u && (i >> (3 - r)) & 1 == v)
                            .collect(),
                    );
                    notes.push(format!("P[{}|{setting}]", RESULT_PAIRS[2 * u + v]));
                }
            }
            (setting.to_string(), parts, cond[s].to_vec(), notes)
        })
        .collect();
    bundle("hardy-hidden", labels, ensembles)
}
