//! Possibility measures generated by an atom-wise assignment `π`, possibly unnormalised.

use num_traits::One;

use crate::assessment::{Assessment, Entry, PrecisePrevision};
use crate::envelope::EnvelopeSpec;
use crate::error::{Error, Result};
use crate::number::Rational;
use crate::space::{Gamble, Space};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PossibilityAssignment {
    space: Space,
    pi: Vec<Rational>,
}

impl PossibilityAssignment {
    pub fn new(space: &Space, pi: Vec<Rational>) -> Result<Self> {
        if pi.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: pi.len() });
        }
        if let Some(bad) = pi.iter().find(|v| !crate::number::is_unit_interval(v)) {
            return Err(Error::InvalidNumber(format!("possibility value {bad} outside [0, 1]")));
        }
        Ok(Self { space: space.clone(), pi })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn pi(&self) -> &[Rational] {
        &self.pi
    }

    pub fn is_normalised(&self) -> bool {
        self.pi.iter().max().is_some_and(One::is_one)
    }

    /// `Π(A) = max over ω ∈ A of π(ω)`.
    pub fn measure(&self, event: &[usize]) -> Result<Rational> {
        let event = normalise_event(&self.space, event)?;
        Ok(event.iter().map(|&i| self.pi[i].clone()).max().expect("non-empty event"))
    }
}

fn normalise_event(space: &Space, event: &[usize]) -> Result<Vec<usize>> {
    if event.is_empty() {
        return Err(Error::EmptyEvent);
    }
    let mut atoms = event.to_vec();
    atoms.sort_unstable();
    atoms.dedup();
    if let Some(&i) = atoms.iter().find(|&&i| i >= space.len()) {
        return Err(Error::DimensionMismatch { expected: space.len(), found: i + 1 });
    }
    Ok(atoms)
}

/// `{a,b}`-style label for an event.
pub fn event_label(space: &Space, event: &[usize]) -> String {
    let names: Vec<&str> = event.iter().map(|&i| space.atoms()[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

/// All `2^m − 1` non-empty events, ordered by their bitmask.
pub fn all_events(space: &Space) -> Vec<Vec<usize>> {
    let m = space.len();
    assert!(m < usize::BITS as usize, "too many atoms to enumerate events");
    (1usize..(1 << m)).map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect()).collect()
}

/// The upper probability `1_A ↦ Π(A)` over the given events, labelled by [`event_label`].
pub fn possibility_measure(p: &PossibilityAssignment, events: &[Vec<usize>]) -> Result<Assessment> {
    let mut entries = Vec::with_capacity(events.len());
    for event in events {
        let atoms = normalise_event(&p.space, event)?;
        let value = p.measure(&atoms)?;
        entries.push(Entry::new(event_label(&p.space, &atoms), Gamble::indicator(&p.space, &atoms)?, value));
    }
    Assessment::upper(&p.space, entries)
}

/// Dirac previsions on each atom with offsets `π(ω) − 1`; its upper envelope
/// on event indicators is `Π`.
pub fn possibility_envelope(p: &PossibilityAssignment) -> EnvelopeSpec {
    let previsions = (0..p.space.len())
        .map(|i| PrecisePrevision::dirac(&p.space, i).expect("atom index in range"))
        .collect();
    let alphas = p.pi.iter().map(|v| v - Rational::one()).collect();
    EnvelopeSpec::upper(previsions, alphas).expect("one prevision per atom")
}
