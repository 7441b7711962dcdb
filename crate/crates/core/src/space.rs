//! Finite possibility spaces and gambles over them.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::number::Rational;

/// An ordered, non-empty list of distinct atom labels.
///
/// Cloning is cheap; clones share the label storage.
#[derive(Clone)]
pub struct Space {
    atoms: Arc<[String]>,
}

impl Space {
    pub fn new<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one atom".into()));
        }
        for (i, label) in atoms.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidSpace(format!("atom {i} has an empty label")));
            }
            if atoms[..i].contains(label) {
                return Err(Error::InvalidSpace(format!("atom `{label}` appears twice")));
            }
        }
        Ok(Self { atoms: atoms.into() })
    }

    /// A space with atoms labelled `w0, w1, ...`.
    pub fn with_size(m: usize) -> Result<Self> {
        Self::new((0..m).map(|i| format!("w{i}")))
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == label)
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.atoms, &other.atoms) || self.atoms == other.atoms
    }
}

impl Eq for Space {}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.atoms.iter()).finish()
    }
}

/// A payoff vector over the atoms of a space.
#[derive(Clone, PartialEq, Eq)]
pub struct Gamble {
    space: Space,
    values: Vec<Rational>,
}

impl Gamble {
    pub fn new(space: &Space, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: values.len() });
        }
        Ok(Self { space: space.clone(), values })
    }

    pub fn from_ints(space: &Space, values: &[i64]) -> Result<Self> {
        Self::new(space, values.iter().map(|&v| crate::number::int(v)).collect())
    }

    pub fn zero(space: &Space) -> Self {
        Self::constant(space, Rational::zero())
    }

    pub fn constant(space: &Space, c: Rational) -> Self {
        Self { space: space.clone(), values: vec![c; space.len()] }
    }

    /// Indicator of the event made of the given atom indices.
    pub fn indicator(space: &Space, atoms: &[usize]) -> Result<Self> {
        let mut values = vec![Rational::zero(); space.len()];
        for &i in atoms {
            let slot = values
                .get_mut(i)
                .ok_or(Error::DimensionMismatch { expected: space.len(), found: i + 1 })?;
            *slot = crate::number::int(1);
        }
        Ok(Self { space: space.clone(), values })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn inf(&self) -> Rational {
        self.values.iter().min().cloned().expect("spaces are non-empty")
    }

    pub fn sup(&self) -> Rational {
        self.values.iter().max().cloned().expect("spaces are non-empty")
    }

    /// `(min, max)` over the atoms.
    pub fn inf_sup(&self) -> (Rational, Rational) {
        (self.inf(), self.sup())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        self.map(|v| v * factor)
    }

    pub fn shift(&self, c: &Rational) -> Self {
        self.map(|v| v + c)
    }

    pub fn add(&self, other: &Gamble) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Gamble) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Gamble, lambda: &Rational) -> Result<Self> {
        let rest = crate::number::int(1) - lambda;
        self.zip(other, |a, b| a * lambda + b * &rest)
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &Gamble) -> Result<bool> {
        self.check_space(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a <= b))
    }

    pub(crate) fn check_space(&self, other: &Gamble) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self { space: self.space.clone(), values: self.values.iter().map(f).collect() }
    }

    fn zip(&self, other: &Gamble, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        self.check_space(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(Self { space: self.space.clone(), values })
    }
}

impl fmt::Debug for Gamble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};

    #[test]
    fn space_rejects_bad_labels() {
        assert!(Space::new(Vec::<String>::new()).is_err());
        assert!(Space::new(["a", "a"]).is_err());
        assert!(Space::new(["a", ""]).is_err());
        assert_eq!(Space::new(["a", "b"]).unwrap().index_of("b"), Some(1));
    }

    #[test]
    fn inf_sup_of_indicator() {
        let s = Space::new(["a", "b"]).unwrap();
        let g = Gamble::indicator(&s, &[0]).unwrap();
        assert_eq!(g.inf_sup(), (int(0), int(1)));
    }

    #[test]
    fn inf_sup_of_zero() {
        let s = Space::with_size(3).unwrap();
        assert_eq!(Gamble::zero(&s).inf_sup(), (int(0), int(0)));
    }

    #[test]
    fn inf_sup_direct_scan() {
        let s = Space::with_size(3).unwrap();
        let g = Gamble::new(&s, vec![rat(-3, 2), int(5), int(5)]).unwrap();
        assert_eq!(g.inf_sup(), (rat(-3, 2), int(5)));
    }

    #[test]
    fn length_and_space_checks() {
        let s = Space::with_size(2).unwrap();
        let t = Space::with_size(3).unwrap();
        assert_eq!(
            Gamble::from_ints(&s, &[1, 2, 3]).unwrap_err(),
            Error::DimensionMismatch { expected: 2, found: 3 }
        );
        let a = Gamble::zero(&s);
        let b = Gamble::zero(&t);
        assert_eq!(a.add(&b).unwrap_err(), Error::SpaceMismatch);
        // equal labels make equal spaces even without shared storage
        let s2 = Space::with_size(2).unwrap();
        assert!(a.add(&Gamble::zero(&s2)).is_ok());
    }
}
