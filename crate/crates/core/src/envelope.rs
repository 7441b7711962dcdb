//! Lower (upper) envelopes of translated precise previsions, and recovery of
//! such a representation from a convex assessment.

use num_traits::{Signed, Zero};

use crate::assessment::{Assessment, Entry, Orientation, PrecisePrevision};
use crate::consistency::{check_avoids_sure_loss, check_convexity};
use crate::error::{Error, Result};
use crate::extension::{self, DualWitness};
use crate::number::Rational;
use crate::space::{Gamble, Space};

/// Finitely many precise previsions `Pⱼ` with offsets `αⱼ`. A lower spec
/// evaluates `X ↦ minⱼ (Pⱼ(X) + αⱼ)`, an upper one `X ↦ maxⱼ (Pⱼ(X) + αⱼ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeSpec {
    previsions: Vec<PrecisePrevision>,
    alphas: Vec<Rational>,
    orientation: Orientation,
}

impl EnvelopeSpec {
    pub fn new(previsions: Vec<PrecisePrevision>, alphas: Vec<Rational>, orientation: Orientation) -> Result<Self> {
        if previsions.is_empty() {
            return Err(Error::LengthMismatch("an envelope needs at least one prevision".into()));
        }
        if previsions.len() != alphas.len() {
            return Err(Error::LengthMismatch(format!(
                "{} previsions but {} offsets",
                previsions.len(),
                alphas.len()
            )));
        }
        let space = previsions[0].space();
        if previsions.iter().any(|p| p.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { previsions, alphas, orientation })
    }

    pub fn lower(previsions: Vec<PrecisePrevision>, alphas: Vec<Rational>) -> Result<Self> {
        Self::new(previsions, alphas, Orientation::Lower)
    }

    pub fn upper(previsions: Vec<PrecisePrevision>, alphas: Vec<Rational>) -> Result<Self> {
        Self::new(previsions, alphas, Orientation::Upper)
    }

    /// Builds a spec from dual points `(Qⱼ, rⱼ)` with `αⱼ = rⱼ`.
    pub fn from_points(points: &[DualFeasiblePoint], orientation: Orientation) -> Result<Self> {
        Self::new(
            points.iter().map(|p| p.q.clone()).collect(),
            points.iter().map(|p| p.r.clone()).collect(),
            orientation,
        )
    }

    pub fn space(&self) -> &Space {
        self.previsions[0].space()
    }

    pub fn previsions(&self) -> &[PrecisePrevision] {
        &self.previsions
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The extreme offset (min for lower, max for upper) is exactly 0.
    pub fn is_centered(&self) -> bool {
        let extreme = match self.orientation {
            Orientation::Lower => self.alphas.iter().min(),
            Orientation::Upper => self.alphas.iter().max(),
        };
        extreme.is_some_and(Zero::is_zero)
    }

    /// Value at `g` and the lowest index attaining it.
    pub fn eval(&self, g: &Gamble) -> Result<(Rational, usize)> {
        let mut best: Option<(Rational, usize)> = None;
        for (j, (p, alpha)) in self.previsions.iter().zip(&self.alphas).enumerate() {
            let v = p.eval(g)? + alpha;
            let better = match &best {
                None => true,
                Some((b, _)) => match self.orientation {
                    Orientation::Lower => &v < b,
                    Orientation::Upper => &v > b,
                },
            };
            if better {
                best = Some((v, j));
            }
        }
        Ok(best.expect("specs are non-empty"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeEvaluation {
    pub assessment: Assessment,
    /// For each entry, the lowest spec index attaining the extremum.
    pub attained_by: Vec<usize>,
}

/// Evaluates the envelope on each named gamble.
pub fn envelope_eval(spec: &EnvelopeSpec, gambles: &[(String, Gamble)]) -> Result<EnvelopeEvaluation> {
    let mut entries = Vec::with_capacity(gambles.len());
    let mut attained_by = Vec::with_capacity(gambles.len());
    for (id, g) in gambles {
        if g.space() != spec.space() {
            return Err(Error::SpaceMismatch);
        }
        let (v, j) = spec.eval(g)?;
        entries.push(Entry::new(id.clone(), g.clone(), v));
        attained_by.push(j);
    }
    let assessment = Assessment::new(spec.space(), spec.orientation, entries)?;
    Ok(EnvelopeEvaluation { assessment, attained_by })
}

/// A pair `(Q, r)`: precise prevision plus translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualFeasiblePoint {
    pub q: PrecisePrevision,
    pub r: Rational,
}

impl DualFeasiblePoint {
    pub fn value(&self, g: &Gamble) -> Result<Rational> {
        Ok(self.q.eval(g)? + &self.r)
    }

    /// Membership in the dominating set: `Q(X) + r ≥ μ_X` for a lower
    /// assessment, `≤` for an upper one.
    pub fn dominates(&self, a: &Assessment) -> Result<bool> {
        for e in a.entries() {
            let v = self.value(&e.gamble)?;
            let ok = match a.orientation() {
                Orientation::Lower => v >= e.value,
                Orientation::Upper => v <= e.value,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One dual point per domain entry, each attaining the assessed value there.
///
/// Evaluating these points as an envelope of the assessment's orientation
/// reproduces the assessment exactly on its domain.
pub fn recover_envelope(a: &Assessment) -> Result<Vec<DualFeasiblePoint>> {
    if !check_convexity(a)?.holds {
        return Err(Error::Precondition("assessment is not convex".into()));
    }
    let low = a.to_lower();
    let mut points = Vec::with_capacity(low.len());
    for e in low.entries() {
        let res = extension::convex_natural_extension(&low, &e.gamble)?;
        let Some(DualWitness::Translated { q, r }) = res.dual else {
            return Err(Error::Internal("convex extension without a translated dual witness".into()));
        };
        // Lower L(Y) = min (Q(Y) + r) conjugates to upper U(X) = max (Q(X) − r).
        let r = match a.orientation() {
            Orientation::Lower => r,
            Orientation::Upper => -r,
        };
        points.push(DualFeasiblePoint { q, r });
    }
    Ok(points)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PooledAssessment {
    pub evaluation: EnvelopeEvaluation,
    /// Some caution is non-negative, which guarantees avoiding sure loss.
    pub asl_by_construction: bool,
    /// Result of the explicit sure-loss check.
    pub avoids_sure_loss: bool,
}

/// Pools expert previsions `Pᵢ` after subtracting a caution `cᵢ` from each:
/// `X ↦ minᵢ (Pᵢ(X) − cᵢ)`.
pub fn pool_experts(
    previsions: Vec<PrecisePrevision>,
    cautions: &[Rational],
    gambles: &[(String, Gamble)],
) -> Result<PooledAssessment> {
    if previsions.len() != cautions.len() {
        return Err(Error::LengthMismatch(format!(
            "{} experts but {} cautions",
            previsions.len(),
            cautions.len()
        )));
    }
    let alphas = cautions.iter().map(|c| -c).collect();
    let spec = EnvelopeSpec::lower(previsions, alphas)?;
    let evaluation = envelope_eval(&spec, gambles)?;
    let asl_by_construction = cautions.iter().any(|c| !c.is_negative());
    let avoids_sure_loss = check_avoids_sure_loss(&evaluation.assessment)?.avoids_sure_loss;
    Ok(PooledAssessment { evaluation, asl_by_construction, avoids_sure_loss })
}
