use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A benchmark problem: one function in one dimension, aggregated over instances.
///
/// Ordered dimension-major, then by function id. Serialized as `fid:dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ProblemKey {
    pub fid: u32,
    pub dim: u32,
}

impl ProblemKey {
    pub fn new(fid: u32, dim: u32) -> Self {
        ProblemKey { fid, dim }
    }
}

impl Ord for ProblemKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.dim, self.fid).cmp(&(other.dim, other.fid))
    }
}

impl PartialOrd for ProblemKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Rendered as the composite column key `fid:dim`.
impl fmt::Display for ProblemKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.fid, self.dim)
    }
}

impl FromStr for ProblemKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (fid, dim) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `fid:dim`, got `{s}`"))?;
        let fid = fid.trim().parse().map_err(|e| format!("bad fid in `{s}`: {e}"))?;
        let dim = dim.trim().parse().map_err(|e| format!("bad dim in `{s}`: {e}"))?;
        Ok(ProblemKey { fid, dim })
    }
}

impl From<ProblemKey> for String {
    fn from(k: ProblemKey) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for ProblemKey {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// BBOB function group of a function id, labelled as in the usual summary tables.
pub fn bbob_group(fid: u32) -> Option<&'static str> {
    match fid {
        1..=5 => Some("F1 - F5"),
        6..=9 => Some("F6 - F9"),
        10..=14 => Some("F10 - F14"),
        15..=19 => Some("F15 - F19"),
        20..=24 => Some("F20 - F24"),
        _ => None,
    }
}

pub const BBOB_GROUPS: [&str; 5] = ["F1 - F5", "F6 - F9", "F10 - F14", "F15 - F19", "F20 - F24"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_as_composite_key() {
        let k = ProblemKey::new(4, 10);
        assert_eq!(serde_json::to_string(&k).unwrap(), "\"4:10\"");
        let m: std::collections::BTreeMap<ProblemKey, u8> = [(k, 1)].into();
        let back: std::collections::BTreeMap<ProblemKey, u8> =
            serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ordering_is_dimension_major() {
        let mut keys = vec![
            ProblemKey::new(3, 5),
            ProblemKey::new(24, 2),
            ProblemKey::new(1, 5),
        ];
        keys.sort();
        assert_eq!(
            keys,
            vec![ProblemKey::new(24, 2), ProblemKey::new(1, 5), ProblemKey::new(3, 5)]
        );
    }

    #[test]
    fn composite_key_round_trips() {
        let k: ProblemKey = "17:10".parse().unwrap();
        assert_eq!(k, ProblemKey::new(17, 10));
        assert_eq!(k.to_string(), "17:10");
        assert!("17".parse::<ProblemKey>().is_err());
    }

    #[test]
    fn groups_partition_all_functions() {
        for fid in 1..=24 {
            let g = bbob_group(fid).unwrap();
            assert_eq!(BBOB_GROUPS.iter().filter(|&&x| x == g).count(), 1);
        }
        let mut counts = [0; 5];
        for fid in 1..=24 {
            let g = bbob_group(fid).unwrap();
            counts[BBOB_GROUPS.iter().position(|&x| x == g).unwrap()] += 1;
        }
        assert_eq!(counts, [5, 4, 5, 5, 5]);
        assert_eq!(bbob_group(25), None);
        assert_eq!(bbob_group(0), None);
    }
}
