//! Play datasets and their CSV encoding.
//!
//! The file format is a header row `agent_0,...,agent_{n-1}` followed by one
//! row per profile, each cell `1` (retain) or `2` (upgrade), `\n` line endings.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{GmmError, Result};
use crate::graph::StrategyProfile;

/// Ordered multiset of strategy profiles over a fixed number of agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayDataset {
    n: usize,
    profiles: Vec<StrategyProfile>,
}

impl PlayDataset {
    pub fn new(n: usize, profiles: Vec<StrategyProfile>) -> Result<Self> {
        if let Some((k, p)) = profiles.iter().enumerate().find(|(_, p)| p.len() != n) {
            return Err(GmmError::InvalidProfile(format!(
                "profile {k} has {} actions, dataset has {n} agents",
                p.len()
            )));
        }
        Ok(PlayDataset { n, profiles })
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profiles(&self) -> &[StrategyProfile] {
        &self.profiles
    }

    pub fn iter(&self) -> std::slice::Iter<'_, StrategyProfile> {
        self.profiles.iter()
    }

    /// First `count` profiles (all of them if `count` exceeds the length).
    pub fn head(&self, count: usize) -> PlayDataset {
        PlayDataset {
            n: self.n,
            profiles: self.profiles[..count.min(self.len())].to_vec(),
        }
    }

    /// Splits at `at`: profiles `[0, at)` and `[at, len)`.
    pub fn split_at(&self, at: usize) -> (PlayDataset, PlayDataset) {
        let (a, b) = self.profiles.split_at(at.min(self.len()));
        (
            PlayDataset {
                n: self.n,
                profiles: a.to_vec(),
            },
            PlayDataset {
                n: self.n,
                profiles: b.to_vec(),
            },
        )
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.is_empty() {
            Err(GmmError::precondition("dataset is empty"))
        } else {
            Ok(())
        }
    }

    /// Fraction of profiles in which `agent` plays `action`.
    pub fn action_frequency(&self, agent: usize, action: u8) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let hits = self.profiles.iter().filter(|p| p.action(agent) == action).count();
        hits as f64 / self.len() as f64
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record((0..self.n).map(|i| format!("agent_{i}")))?;
        for p in &self.profiles {
            w.write_record(p.labels().map(|l| l.to_string()))?;
        }
        w.flush().map_err(|e| GmmError::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = r.headers()?.clone();
        for (i, h) in headers.iter().enumerate() {
            if h != format!("agent_{i}") {
                return Err(GmmError::InvalidProfile(format!(
                    "header column {i} is `{h}`, expected `agent_{i}`"
                )));
            }
        }
        let n = headers.len();
        let mut profiles = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let labels = rec
                .iter()
                .map(|cell| match cell {
                    "1" => Ok(1u8),
                    "2" => Ok(2u8),
                    other => Err(GmmError::InvalidProfile(format!(
                        "row {row}: cell `{other}` is not 1 or 2"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            profiles.push(StrategyProfile::from_labels(&labels)?);
        }
        PlayDataset::new(n, profiles)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| GmmError::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| GmmError::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

impl<'a> IntoIterator for &'a PlayDataset {
    type Item = &'a StrategyProfile;
    type IntoIter = std::slice::Iter<'a, StrategyProfile>;

    fn into_iter(self) -> Self::IntoIter {
        self.profiles.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_layout_is_exact() {
        let d = PlayDataset::new(
            3,
            vec![
                StrategyProfile::from_labels(&[1, 2, 1]).unwrap(),
                StrategyProfile::from_labels(&[2, 2, 2]).unwrap(),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "agent_0,agent_1,agent_2\n1,2,1\n2,2,2\n"
        );
    }

    #[test]
    fn rejects_bad_cells_and_headers() {
        assert!(PlayDataset::read_csv("agent_0,agent_1\n1,3\n".as_bytes()).is_err());
        assert!(PlayDataset::read_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(PlayDataset::read_csv("agent_0,agent_1\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn rejects_ragged_profiles() {
        let r = PlayDataset::new(2, vec![StrategyProfile::new(vec![0, 1, 0])]);
        assert!(r.is_err());
    }

    proptest! {
        #[test]
        fn csv_roundtrip(rows in prop::collection::vec(prop::collection::vec(0u8..2, 5), 0..20)) {
            let d = PlayDataset::new(5, rows.into_iter().map(StrategyProfile::new).collect()).unwrap();
            let mut buf = Vec::new();
            d.write_csv(&mut buf).unwrap();
            prop_assert_eq!(PlayDataset::read_csv(buf.as_slice()).unwrap(), d);
        }
    }
}
