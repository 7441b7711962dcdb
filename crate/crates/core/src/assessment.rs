//! Lower/upper assessments and precise previsions.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::number::Rational;
use crate::space::{Gamble, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Lower,
    Upper,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Lower => Orientation::Upper,
            Orientation::Upper => Orientation::Lower,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Lower => "lower",
            Orientation::Upper => "upper",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One assessed gamble: `id ↦ value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub id: String,
    pub gamble: Gamble,
    pub value: Rational,
}

impl Entry {
    pub fn new(id: impl Into<String>, gamble: Gamble, value: Rational) -> Self {
        Self { id: id.into(), gamble, value }
    }
}

/// A finite lower or upper prevision, keyed by user-chosen identifiers.
///
/// Two entries may carry the same payoff vector under different ids; they are
/// distinct domain elements. Entry order is preserved and is what "first
/// entry" refers to in witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assessment {
    space: Space,
    orientation: Orientation,
    entries: Vec<Entry>,
}

impl Assessment {
    pub fn new(space: &Space, orientation: Orientation, entries: Vec<Entry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDomain);
        }
        for (i, e) in entries.iter().enumerate() {
            if e.gamble.space() != space {
                return Err(Error::SpaceMismatch);
            }
            if entries[..i].iter().any(|prev| prev.id == e.id) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
        }
        Ok(Self { space: space.clone(), orientation, entries })
    }

    pub fn lower(space: &Space, entries: Vec<Entry>) -> Result<Self> {
        Self::new(space, Orientation::Lower, entries)
    }

    pub fn upper(space: &Space, entries: Vec<Entry>) -> Result<Self> {
        Self::new(space, Orientation::Upper, entries)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// The first entry whose gamble is the zero vector, whatever its id.
    pub fn zero_entry(&self) -> Option<&Entry> {
        self.entries.iter().find(|e| e.gamble.is_zero())
    }

    /// `X ↦ v` becomes `−X ↦ −v` with the opposite orientation.
    pub fn conjugate(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| Entry::new(e.id.clone(), e.gamble.neg(), -&e.value))
            .collect();
        Self { space: self.space.clone(), orientation: self.orientation.flip(), entries }
    }

    /// The lower form of this assessment: itself if lower, its conjugate otherwise.
    pub fn to_lower(&self) -> Self {
        match self.orientation {
            Orientation::Lower => self.clone(),
            Orientation::Upper => self.conjugate(),
        }
    }

    pub(crate) fn require_lower(&self) -> Result<()> {
        if self.orientation != Orientation::Lower {
            return Err(Error::Orientation { expected: "lower" });
        }
        Ok(())
    }

    /// Same domain, values replaced entry by entry.
    pub fn with_values(&self, values: Vec<Rational>) -> Result<Self> {
        if values.len() != self.entries.len() {
            return Err(Error::DimensionMismatch { expected: self.entries.len(), found: values.len() });
        }
        let entries = self
            .entries
            .iter()
            .zip(values)
            .map(|(e, v)| Entry::new(e.id.clone(), e.gamble.clone(), v))
            .collect();
        Ok(Self { space: self.space.clone(), orientation: self.orientation, entries })
    }

    /// Adds `k` to every assessed value.
    pub fn shifted(&self, k: &Rational) -> Self {
        let values = self.entries.iter().map(|e| &e.value + k).collect();
        self.with_values(values).expect("same length")
    }

    pub fn with_entry(&self, entry: Entry) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.push(entry);
        Self::new(&self.space, self.orientation, entries)
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.entries.iter().map(|e| &e.value)
    }

    pub fn gambles(&self) -> impl Iterator<Item = &Gamble> {
        self.entries.iter().map(|e| &e.gamble)
    }
}

/// A probability mass vector, acting on gambles by expectation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisePrevision {
    space: Space,
    masses: Vec<Rational>,
}

impl PrecisePrevision {
    pub fn new(space: &Space, masses: Vec<Rational>) -> Result<Self> {
        if masses.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: masses.len() });
        }
        if masses.iter().any(Signed::is_negative) {
            return Err(Error::InvalidPrevision("negative mass".into()));
        }
        let total: Rational = masses.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidPrevision(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { space: space.clone(), masses })
    }

    pub fn dirac(space: &Space, atom: usize) -> Result<Self> {
        let mut masses = vec![Rational::zero(); space.len()];
        *masses
            .get_mut(atom)
            .ok_or(Error::DimensionMismatch { expected: space.len(), found: atom + 1 })? = Rational::one();
        Ok(Self { space: space.clone(), masses })
    }

    pub fn uniform(space: &Space) -> Self {
        let m = space.len() as i64;
        Self { space: space.clone(), masses: vec![crate::number::rat(1, m); space.len()] }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    /// Expectation of `g`.
    pub fn eval(&self, g: &Gamble) -> Result<Rational> {
        if g.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.masses.iter().zip(g.values()).map(|(p, x)| p * x).sum())
    }
}
