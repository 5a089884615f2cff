use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Party {
    pub label: String,
    pub dim: usize,
}

/// Ordered named tensor factors. Every region-indexed quantity in the crate
/// resolves labels against one of these.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Party>", into = "Vec<Party>")]
pub struct PartySpec {
    parties: Vec<Party>,
}

impl TryFrom<Vec<Party>> for PartySpec {
    type Error = Error;
    fn try_from(parties: Vec<Party>) -> Result<Self> {
        for (i, p) in parties.iter().enumerate() {
            if p.label.is_empty() {
                return Err(Error::Spec(format!("party {i} has an empty label")));
            }
            if p.dim == 0 {
                return Err(Error::Spec(format!("party {} has dimension 0", p.label)));
            }
            if parties[..i].iter().any(|q| q.label == p.label) {
                return Err(Error::Spec(format!("duplicate label {}", p.label)));
            }
        }
        if parties.is_empty() {
            return Err(Error::Spec("no parties".into()));
        }
        let total = parties
            .iter()
            .try_fold(1usize, |acc, p| acc.checked_mul(p.dim));
        if total.is_none() {
            return Err(Error::Capacity("total dimension overflows".into()));
        }
        Ok(PartySpec { parties })
    }
}

impl From<PartySpec> for Vec<Party> {
    fn from(s: PartySpec) -> Self {
        s.parties
    }
}

impl PartySpec {
    pub fn new<S: Into<String>>(parties: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parties = parties
            .into_iter()
            .map(|(label, dim)| Party {
                label: label.into(),
                dim,
            })
            .collect::<Vec<_>>();
        Self::try_from(parties)
    }

    /// `n` parties labelled A, B, C, … (then P26, P27, …) with equal dimension.
    pub fn uniform(n: usize, dim: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (default_label(i), dim)))
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn len(&self) -> usize {
        self.parties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parties.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parties.iter().map(|p| p.label.as_str()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parties.iter().map(|p| p.dim).product()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.parties
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| Error::region(format!("unknown label {label}")))
    }

    /// Party indices of a region, in spec order.
    pub fn indices(&self, region: &Region) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(region.labels.len());
        for l in &region.labels {
            let i = self.index_of(l)?;
            if out.contains(&i) {
                return Err(Error::region(format!("label {l} repeated in region")));
            }
            out.push(i);
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn region_dim(&self, region: &Region) -> Result<usize> {
        Ok(self.indices(region)?.iter().map(|&i| self.parties[i].dim).product())
    }

    pub fn sub(&self, indices: &[usize]) -> PartySpec {
        PartySpec {
            parties: indices.iter().map(|&i| self.parties[i].clone()).collect(),
        }
    }

    /// Every label not in `region`.
    pub fn complement(&self, region: &Region) -> Result<Region> {
        let idx = self.indices(region)?;
        Ok(Region::new(
            (0..self.len())
                .filter(|i| !idx.contains(i))
                .map(|i| self.parties[i].label.clone()),
        ))
    }

    pub fn all(&self) -> Region {
        Region::new(self.parties.iter().map(|p| p.label.clone()))
    }

    /// Single-party regions in spec order.
    pub fn singletons(&self) -> Vec<Region> {
        self.parties
            .iter()
            .map(|p| Region::new([p.label.clone()]))
            .collect()
    }
}

pub(crate) fn default_label(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("P{i}")
    }
}

/// A set of party labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region {
    labels: Vec<String>,
}

impl Region {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Region {
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Self {
        Region { labels: Vec::new() }
    }

    /// Parses `"A,B"` or `"A B"`.
    pub fn parse(s: &str) -> Self {
        Region::new(
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty()),
        )
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut labels = self.labels.clone();
        for l in &other.labels {
            if !labels.contains(l) {
                labels.push(l.clone());
            }
        }
        Region { labels }
    }

    pub fn overlaps(&self, other: &Region) -> bool {
        self.labels.iter().any(|l| other.labels.contains(l))
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.labels.join(","))
    }
}

pub(crate) fn ensure_disjoint(regions: &[&Region]) -> Result<()> {
    for (i, a) in regions.iter().enumerate() {
        if a.is_empty() {
            return Err(Error::region("empty region"));
        }
        for b in &regions[i + 1..] {
            if a.overlaps(b) {
                return Err(Error::region(format!("regions {a} and {b} overlap")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert!(PartySpec::new([("A", 2), ("A", 2)]).is_err());
        assert!(PartySpec::new([("A", 0)]).is_err());
        let s = PartySpec::new([("A", 2), ("B", 3)]).unwrap();
        assert_eq!(s.total_dim(), 6);
        assert!(s.indices(&Region::parse("C")).is_err());
        assert_eq!(s.indices(&Region::parse("B,A")).unwrap(), vec![0, 1]);
    }

    #[test]
    fn serde_round_trip_validates() {
        let s = PartySpec::uniform(3, 2).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        let back: PartySpec = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
        let bad = r#"[{"label":"A","dim":2},{"label":"A","dim":2}]"#;
        assert!(serde_json::from_str::<PartySpec>(bad).is_err());
    }
}
