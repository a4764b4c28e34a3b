// SPDX-License-Identifier: Apache-2.0
//! Best known cut values for the evaluated G-Set graphs and K2000, together
//! with the accelerator's reported results, compiled in so accuracy can be
//! computed offline. A plain-text override file ("name value" per line) can
//! replace or extend the best known values.

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("registry line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no best known cut value for graph {0:?}")]
    UnknownGraph(String),
    #[error("best known cut value for {0:?} must be positive")]
    NonPositive(String),
    #[error("reading registry: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GraphKind {
    Random,
    Toroidal,
    Planar,
    Complete,
}

/// Best cut and mean accuracy (percent, over 1000 trials) at one sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reported {
    pub best_cut: i64,
    pub accuracy_percent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphRecord {
    pub name: &'static str,
    pub nodes: usize,
    pub edges: usize,
    /// Weights in {0, +-1} rather than {0, 1}.
    pub signed_weights: bool,
    pub kind: GraphKind,
    pub best_known: i64,
    pub samples_1000: Reported,
    pub samples_100: Reported,
}

#[allow(clippy::too_many_arguments)]
const fn rec(
    name: &'static str,
    nodes: usize,
    edges: usize,
    signed_weights: bool,
    kind: GraphKind,
    best_known: i64,
    samples_1000: (i64, f64),
    samples_100: (i64, f64),
) -> GraphRecord {
    GraphRecord {
        name,
        nodes,
        edges,
        signed_weights,
        kind,
        best_known,
        samples_1000: Reported {
            best_cut: samples_1000.0,
            accuracy_percent: samples_1000.1,
        },
        samples_100: Reported {
            best_cut: samples_100.0,
            accuracy_percent: samples_100.1,
        },
    }
}

pub const BENCHMARKS: [GraphRecord; 52] = [
    rec(
        "G1",
        800,
        19176,
        false,
        GraphKind::Random,
        11624,
        (11624, 99.75),
        (11585, 99.08),
    ),
    rec(
        "G2",
        800,
        19176,
        false,
        GraphKind::Random,
        11620,
        (11620, 99.77),
        (11595, 99.16),
    ),
    rec(
        "G3",
        800,
        19176,
        false,
        GraphKind::Random,
        11622,
        (11622, 99.80),
        (11583, 99.15),
    ),
    rec(
        "G4",
        800,
        19176,
        false,
        GraphKind::Random,
        11646,
        (11646, 99.84),
        (11594, 99.10),
    ),
    rec(
        "G5",
        800,
        19176,
        false,
        GraphKind::Random,
        11631,
        (11631, 99.83),
        (11597, 99.19),
    ),
    rec(
        "G6",
        800,
        19176,
        true,
        GraphKind::Random,
        2178,
        (2178, 99.05),
        (2158, 95.48),
    ),
    rec(
        "G7",
        800,
        19176,
        true,
        GraphKind::Random,
        2006,
        (2006, 98.69),
        (1965, 95.27),
    ),
    rec(
        "G8",
        800,
        19176,
        true,
        GraphKind::Random,
        2005,
        (2005, 98.89),
        (1978, 96.10),
    ),
    rec(
        "G9",
        800,
        19176,
        true,
        GraphKind::Random,
        2054,
        (2053, 98.71),
        (2017, 95.38),
    ),
    rec(
        "G10",
        800,
        19176,
        true,
        GraphKind::Random,
        2000,
        (2000, 98.68),
        (1967, 95.43),
    ),
    rec(
        "G11",
        800,
        1600,
        true,
        GraphKind::Toroidal,
        564,
        (558, 95.98),
        (520, 86.25),
    ),
    rec(
        "G12",
        800,
        1600,
        true,
        GraphKind::Toroidal,
        556,
        (546, 95.39),
        (522, 86.25),
    ),
    rec(
        "G13",
        800,
        1600,
        true,
        GraphKind::Toroidal,
        582,
        (576, 95.60),
        (538, 86.22),
    ),
    rec(
        "G14",
        800,
        4694,
        false,
        GraphKind::Planar,
        3064,
        (3053, 99.09),
        (3003, 96.94),
    ),
    rec(
        "G15",
        800,
        4661,
        false,
        GraphKind::Planar,
        3050,
        (3039, 99.00),
        (2984, 96.79),
    ),
    rec(
        "G16",
        800,
        4672,
        false,
        GraphKind::Planar,
        3052,
        (3041, 99.03),
        (2982, 96.90),
    ),
    rec(
        "G17",
        800,
        4667,
        false,
        GraphKind::Planar,
        3047,
        (3034, 99.00),
        (2982, 96.81),
    ),
    rec(
        "G18",
        800,
        4694,
        true,
        GraphKind::Planar,
        992,
        (989, 97.71),
        (966, 92.60),
    ),
    rec(
        "G19",
        800,
        4661,
        true,
        GraphKind::Planar,
        906,
        (904, 97.41),
        (864, 91.76),
    ),
    rec(
        "G20",
        800,
        4672,
        true,
        GraphKind::Planar,
        941,
        (941, 97.90),
        (910, 91.97),
    ),
    rec(
        "G21",
        800,
        4667,
        true,
        GraphKind::Planar,
        931,
        (930, 97.52),
        (891, 91.92),
    ),
    rec(
        "G43",
        1000,
        9990,
        false,
        GraphKind::Random,
        6660,
        (6660, 99.61),
        (6653, 98.89),
    ),
    rec(
        "G44",
        1000,
        9990,
        false,
        GraphKind::Random,
        6650,
        (6648, 99.67),
        (6627, 98.95),
    ),
    rec(
        "G45",
        1000,
        9990,
        false,
        GraphKind::Random,
        6654,
        (6653, 99.63),
        (6633, 98.92),
    ),
    rec(
        "G46",
        1000,
        9990,
        false,
        GraphKind::Random,
        6649,
        (6646, 99.64),
        (6630, 98.98),
    ),
    rec(
        "G47",
        1000,
        9990,
        false,
        GraphKind::Random,
        6657,
        (6655, 99.64),
        (6643, 98.95),
    ),
    rec(
        "G51",
        1000,
        5909,
        false,
        GraphKind::Planar,
        3848,
        (3830, 99.04),
        (3819, 98.43),
    ),
    rec(
        "G52",
        1000,
        5916,
        false,
        GraphKind::Planar,
        3851,
        (3834, 99.06),
        (3818, 98.49),
    ),
    rec(
        "G53",
        1000,
        5914,
        false,
        GraphKind::Planar,
        3850,
        (3834, 99.10),
        (3819, 98.47),
    ),
    rec(
        "G54",
        1000,
        5916,
        false,
        GraphKind::Planar,
        3852,
        (3840, 99.01),
        (3816, 98.35),
    ),
    rec(
        "G22",
        2000,
        19990,
        false,
        GraphKind::Random,
        13359,
        (13352, 99.57),
        (13281, 98.78),
    ),
    rec(
        "G23",
        2000,
        19990,
        false,
        GraphKind::Random,
        13344,
        (13331, 99.67),
        (13281, 98.93),
    ),
    rec(
        "G24",
        2000,
        19990,
        false,
        GraphKind::Random,
        13337,
        (13326, 99.63),
        (13260, 98.91),
    ),
    rec(
        "G25",
        2000,
        19990,
        false,
        GraphKind::Random,
        13340,
        (13335, 99.65),
        (13262, 98.91),
    ),
    rec(
        "G26",
        2000,
        19990,
        false,
        GraphKind::Random,
        13328,
        (13317, 99.64),
        (13257, 98.95),
    ),
    rec(
        "G27",
        2000,
        19990,
        true,
        GraphKind::Random,
        3341,
        (3330, 98.38),
        (3282, 95.51),
    ),
    rec(
        "G28",
        2000,
        19990,
        true,
        GraphKind::Random,
        3298,
        (3289, 98.45),
        (3081, 95.48),
    ),
    rec(
        "G29",
        2000,
        19990,
        true,
        GraphKind::Random,
        3405,
        (3394, 98.24),
        (3326, 95.54),
    ),
    rec(
        "G30",
        2000,
        19990,
        true,
        GraphKind::Random,
        3413,
        (3403, 98.52),
        (3335, 95.61),
    ),
    rec(
        "G31",
        2000,
        19990,
        true,
        GraphKind::Random,
        3310,
        (3297, 98.45),
        (3246, 95.60),
    ),
    rec(
        "G32",
        2000,
        4000,
        true,
        GraphKind::Toroidal,
        1410,
        (1370, 95.23),
        (1322, 90.97),
    ),
    rec(
        "G33",
        2000,
        4000,
        true,
        GraphKind::Toroidal,
        1382,
        (1348, 95.41),
        (1302, 91.06),
    ),
    rec(
        "G34",
        2000,
        4000,
        true,
        GraphKind::Toroidal,
        1384,
        (1348, 95.65),
        (1308, 91.34),
    ),
    rec(
        "G35",
        2000,
        11778,
        false,
        GraphKind::Planar,
        7687,
        (7644, 98.99),
        (7592, 98.37),
    ),
    rec(
        "G36",
        2000,
        11766,
        false,
        GraphKind::Planar,
        7680,
        (7633, 98.99),
        (7592, 98.39),
    ),
    rec(
        "G37",
        2000,
        11785,
        false,
        GraphKind::Planar,
        7691,
        (7652, 98.97),
        (7608, 98.36),
    ),
    rec(
        "G38",
        2000,
        11779,
        false,
        GraphKind::Planar,
        7688,
        (7657, 99.01),
        (7602, 98.35),
    ),
    rec(
        "G39",
        2000,
        11778,
        true,
        GraphKind::Planar,
        2408,
        (2392, 97.51),
        (2346, 95.32),
    ),
    rec(
        "G40",
        2000,
        11766,
        true,
        GraphKind::Planar,
        2400,
        (2382, 97.37),
        (2339, 95.00),
    ),
    rec(
        "G41",
        2000,
        11785,
        true,
        GraphKind::Planar,
        2405,
        (2383, 97.31),
        (2341, 94.81),
    ),
    rec(
        "G42",
        2000,
        11779,
        true,
        GraphKind::Planar,
        2481,
        (2455, 97.53),
        (2424, 95.17),
    ),
    rec(
        "K2000",
        2000,
        1999000,
        true,
        GraphKind::Complete,
        33337,
        (33101, 98.89),
        (32670, 97.99),
    ),
];

pub fn benchmark(name: &str) -> Option<&'static GraphRecord> {
    BENCHMARKS.iter().find(|r| r.name == name)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BestKnownRegistry {
    values: BTreeMap<String, i64>,
}

impl BestKnownRegistry {
    /// The compiled-in table.
    pub fn builtin() -> Self {
        BestKnownRegistry {
            values: BENCHMARKS
                .iter()
                .map(|r| (r.name.to_string(), r.best_known))
                .collect(),
        }
    }

    /// Parses "name value" lines. Blank lines and `#` comments are skipped.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, RegistryError> {
        let mut registry = BestKnownRegistry::default();
        registry.apply_overrides(reader)?;
        Ok(registry)
    }

    pub fn apply_overrides<R: BufRead>(&mut self, reader: R) -> Result<(), RegistryError> {
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| RegistryError::Io(e.to_string()))?;
            let lineno = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            let (Some(name), Some(value), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(RegistryError::Parse {
                    line: lineno,
                    message: format!("expected \"name value\", got {content:?}"),
                });
            };
            let value: i64 = value.parse().map_err(|_| RegistryError::Parse {
                line: lineno,
                message: format!("{value:?} is not an integer"),
            })?;
            if value <= 0 {
                return Err(RegistryError::NonPositive(name.to_string()));
            }
            self.values.insert(name.to_string(), value);
        }
        Ok(())
    }

    pub fn insert(&mut self, name: impl Into<String>, value: i64) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.values.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// `cut / best_known`.
    pub fn accuracy(&self, cut: i64, graph: &str) -> Result<f64, RegistryError> {
        let best = self
            .get(graph)
            .ok_or_else(|| RegistryError::UnknownGraph(graph.to_string()))?;
        Ok(cut as f64 / best as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_covers_table() {
        let reg = BestKnownRegistry::builtin();
        assert_eq!(reg.len(), 52);
        assert_eq!(reg.get("G1"), Some(11624));
        assert_eq!(reg.get("G11"), Some(564));
        assert_eq!(reg.get("K2000"), Some(33337));
        let gset = BENCHMARKS
            .iter()
            .filter(|r| r.name.starts_with('G'))
            .count();
        assert_eq!(gset, 51);
    }

    #[test]
    fn accuracy_examples() {
        let reg = BestKnownRegistry::builtin();
        assert_eq!(reg.accuracy(11624, "G1").unwrap(), 1.0);
        let a = reg.accuracy(11585, "G1").unwrap();
        assert!((a - 11585.0 / 11624.0).abs() < 1e-15);
        assert!((a - 0.99664).abs() < 1e-5);
        assert_eq!(reg.accuracy(0, "G1").unwrap(), 0.0);
        assert_eq!(
            reg.accuracy(1, "G99"),
            Err(RegistryError::UnknownGraph("G99".into()))
        );
    }

    #[test]
    fn overrides() {
        let mut reg = BestKnownRegistry::builtin();
        reg.apply_overrides("# custom\nG1 11700\n\nmine 42 # trailing\n".as_bytes())
            .unwrap();
        assert_eq!(reg.get("G1"), Some(11700));
        assert_eq!(reg.get("mine"), Some(42));
        assert_eq!(reg.len(), 53);

        let err = BestKnownRegistry::from_reader("G1 11624\nG2 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, RegistryError::Parse { line: 2, .. }));
        let err = BestKnownRegistry::from_reader("G1 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, RegistryError::Parse { line: 1, .. }));
        let err = BestKnownRegistry::from_reader("G1 -4\n".as_bytes()).unwrap_err();
        assert_eq!(err, RegistryError::NonPositive("G1".into()));
    }

    #[test]
    fn reported_values_consistent() {
        for r in &BENCHMARKS {
            assert!(r.samples_1000.best_cut <= r.best_known, "{}", r.name);
            assert!(r.samples_100.best_cut <= r.best_known, "{}", r.name);
            assert!(r.samples_1000.accuracy_percent <= 100.0);
        }
        assert_eq!(benchmark("K2000").unwrap().edges, 2000 * 1999 / 2);
    }
}
