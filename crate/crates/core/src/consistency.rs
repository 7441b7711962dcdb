//! The consistency ladder: sure loss, convexity, centered convexity, coherence.
//!
//! Upper assessments are conjugated, classified, and reported back in upper
//! terms. Convexity and coherence are decided as fixed points of the convex
//! natural and natural extension respectively.
//!
//! Centered convex assessments are 1-coherent but need not be 2-coherent;
//! n-coherence itself is not checked here.

use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::assessment::{Assessment, Orientation};
use crate::error::{Error, Result};
use crate::extension::{self, gain, gain_witness, ExtensionKind, ExtensionValue, GainWitness};
use crate::lp::{self, Bounds, LinearProgram, Relation};
use crate::number::{int, Rational};

/// Why an assessment fails a rung of the ladder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A combination of favourable bets that loses surely.
    SureLoss(GainWitness),
    /// The extension strictly improves on an assessed value. Values are in the
    /// assessment's own orientation: for uppers the extension is below the
    /// assessed value.
    ExtensionImproves { kind: ExtensionKind, id: String, assessed: Rational, extension: ExtensionValue },
    /// Convex, but the zero gamble is not assessed at 0.
    NonZeroAtZero { id: String, value: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn pass() -> Self {
        Self { holds: true, witness: None }
    }

    fn fail(w: Witness) -> Self {
        Self { holds: false, witness: Some(w) }
    }
}

/// Outcome of the sure-loss test, with the minimizing stakes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SureLossCheck {
    pub avoids_sure_loss: bool,
    /// `min over normalized stakes of sup G`; equals `k̄`.
    pub min_sup_gain: Rational,
    /// The minimizing stakes; present when sure loss is incurred.
    pub witness: Option<GainWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub orientation: Orientation,
    pub avoids_sure_loss: bool,
    /// Always true on finite domains.
    pub avoids_unbounded_sure_loss: bool,
    pub convex: bool,
    /// `None` when the zero gamble is not in the domain.
    pub centered_convex: Option<bool>,
    pub coherent: bool,
    pub k_bar: Rational,
    pub witnesses: Vec<Witness>,
}

fn lower_form(a: &Assessment) -> Result<Assessment> {
    if a.is_empty() {
        return Err(Error::EmptyDomain);
    }
    Ok(a.to_lower())
}

/// Maps a witness computed on the lower conjugate back to `orientation`.
fn reorient(w: Witness, orientation: Orientation) -> Witness {
    if orientation == Orientation::Lower {
        return w;
    }
    match w {
        Witness::ExtensionImproves { kind, id, assessed, extension } => Witness::ExtensionImproves {
            kind,
            id,
            assessed: -assessed,
            extension: match extension {
                ExtensionValue::Finite(v) => ExtensionValue::Finite(-v),
                inf => inf,
            },
        },
        Witness::NonZeroAtZero { id, value } => Witness::NonZeroAtZero { id, value: -value },
        // Σ sᵢ(Xᵢ' − μᵢ') with Xᵢ' = −Xᵢ, μᵢ' = −P̄(Xᵢ) is already the upper gain Σ sᵢ(P̄(Xᵢ) − Xᵢ).
        w @ Witness::SureLoss(_) => w,
    }
}

/// Sure-loss test: solves `min t` s.t. `t ≥ Σ sᵢ(Xᵢ(ω) − μᵢ)` for all atoms,
/// `s ≥ 0`, `Σ sᵢ = 1`. The assessment avoids sure loss iff the optimum is `≥ 0`.
pub fn check_avoids_sure_loss(a: &Assessment) -> Result<SureLossCheck> {
    let low = lower_form(a)?;
    let n = low.len();
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = int(1);
    let mut program = LinearProgram::minimize(objective).with_bounds(n, Bounds::free());
    for w in 0..low.space().len() {
        let mut row: Vec<Rational> = low.entries().iter().map(|e| &e.gamble.values()[w] - &e.value).collect();
        row.push(int(-1));
        program.add_constraint(row, Relation::Le, Rational::zero());
    }
    let mut row = vec![int(1); n];
    row.push(Rational::zero());
    program.add_constraint(row, Relation::Eq, int(1));
    let sol = lp::solve(&program)?;
    if !lp::verify_certificate(&program, &sol) {
        return Err(Error::Internal("sure-loss program certificate rejected".into()));
    }
    let min_sup_gain = sol.value.ok_or_else(|| Error::Internal("sure-loss program not optimal".into()))?;
    let avoids = !min_sup_gain.is_negative();
    let witness = (!avoids).then(|| gain_witness(&low, sol.primal[..n].to_vec()));
    Ok(SureLossCheck { avoids_sure_loss: avoids, min_sup_gain, witness })
}

/// Index and witness of the first entry that the extension strictly improves.
fn first_improvement(low: &Assessment, kind: ExtensionKind) -> Result<Option<Witness>> {
    let results: Vec<Option<Witness>> = low
        .entries()
        .par_iter()
        .map(|e| {
            let res = match kind {
                ExtensionKind::ConvexNatural => extension::convex_natural_extension(low, &e.gamble)?,
                ExtensionKind::Natural => extension::natural_extension(low, &e.gamble)?,
            };
            let improves = match &res.value {
                ExtensionValue::Finite(v) => v > &e.value,
                ExtensionValue::PlusInfinity => true,
            };
            Ok(improves.then(|| Witness::ExtensionImproves {
                kind,
                id: e.id.clone(),
                assessed: e.value.clone(),
                extension: res.value,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().next())
}

/// Convex iff `E_c(Xⱼ) = μⱼ` for every domain entry.
pub fn check_convexity(a: &Assessment) -> Result<Verdict> {
    let low = lower_form(a)?;
    Ok(match first_improvement(&low, ExtensionKind::ConvexNatural)? {
        None => Verdict::pass(),
        Some(w) => Verdict::fail(reorient(w, a.orientation())),
    })
}

/// Coherent iff it avoids sure loss and `E(Xⱼ) = μⱼ` for every domain entry.
pub fn check_coherence(a: &Assessment) -> Result<Verdict> {
    let low = lower_form(a)?;
    let asl = check_avoids_sure_loss(&low)?;
    coherence_given(&low, asl, a.orientation())
}

fn coherence_given(low: &Assessment, asl: SureLossCheck, orientation: Orientation) -> Result<Verdict> {
    if let Some(w) = asl.witness {
        return Ok(Verdict::fail(Witness::SureLoss(w)));
    }
    Ok(match first_improvement(low, ExtensionKind::Natural)? {
        None => Verdict::pass(),
        Some(w) => Verdict::fail(reorient(w, orientation)),
    })
}

/// `None` when no entry is the zero gamble; otherwise convexity plus value 0 at zero.
pub fn check_centered_convexity(a: &Assessment) -> Result<Option<Verdict>> {
    if a.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if a.zero_entry().is_none() {
        return Ok(None);
    }
    Ok(centered_given(a, check_convexity(a)?))
}

fn centered_given(a: &Assessment, convex: Verdict) -> Option<Verdict> {
    let zero = a.zero_entry()?;
    if !convex.holds {
        return Some(convex);
    }
    Some(if zero.value.is_zero() {
        Verdict::pass()
    } else {
        Verdict::fail(Witness::NonZeroAtZero { id: zero.id.clone(), value: zero.value.clone() })
    })
}

/// `k̄ = −E_c(0)`: the largest constant that can be added to the (lower) assessment
/// while still avoiding sure loss.
pub fn check_k_bar(a: &Assessment) -> Result<Rational> {
    let low = lower_form(a)?;
    Ok(-extension::ec_at_zero(&low)?)
}

/// Full ladder classification.
pub fn classify(a: &Assessment) -> Result<ConsistencyReport> {
    let low = lower_form(a)?;
    let orientation = a.orientation();
    let asl = check_avoids_sure_loss(&low)?;
    let k_bar = check_k_bar(&low)?;
    let convex = check_convexity(a)?;
    let centered = centered_given(a, convex.clone());
    let mut witnesses = Vec::new();
    let coherent = if let Some(w) = asl.witness.clone() {
        witnesses.push(Witness::SureLoss(w));
        false
    } else {
        let v = coherence_given(&low, asl.clone(), orientation)?;
        witnesses.extend(v.witness.clone());
        v.holds
    };
    if let Some(w) = convex.witness.clone() {
        witnesses.push(w);
    }
    if let Some(Verdict { witness: Some(w @ Witness::NonZeroAtZero { .. }), .. }) = &centered {
        witnesses.push(w.clone());
    }
    Ok(ConsistencyReport {
        orientation,
        avoids_sure_loss: asl.avoids_sure_loss,
        avoids_unbounded_sure_loss: true,
        convex: convex.holds,
        centered_convex: centered.map(|v| v.holds),
        coherent,
        k_bar,
        witnesses,
    })
}

/// Entries assessed outside `[inf X, sup X]`, split by side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InternalityViolations {
    /// Ids with `μ > sup X`.
    pub above: Vec<String>,
    /// Ids with `μ < inf X`.
    pub below: Vec<String>,
}

impl InternalityViolations {
    /// At most one side is violated; a convex assessment always satisfies this.
    pub fn one_sided(&self) -> bool {
        self.above.is_empty() || self.below.is_empty()
    }
}

/// Collects internality violations of the lower form of `a`.
pub fn internality_violations(a: &Assessment) -> InternalityViolations {
    let mut out = InternalityViolations::default();
    for e in a.to_lower().entries() {
        let (inf, sup) = e.gamble.inf_sup();
        if e.value > sup {
            out.above.push(e.id.clone());
        } else if e.value < inf {
            out.below.push(e.id.clone());
        }
    }
    out
}

/// A relaxed-gain combination `Σ sᵢ(Xᵢ − μᵢ) − s₀(X₀ − μ₀)` with `Σ sᵢ ≤ s₀` whose supremum is negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxedViolation {
    pub against: String,
    pub against_stake: Rational,
    pub stakes: Vec<(String, Rational)>,
    pub sup_gain: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxedCheck {
    pub trials: usize,
    pub violation: Option<RelaxedViolation>,
}

impl RelaxedCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Falsification test for centered convex assessments: samples gains with one bet
/// against a domain entry and favourable stakes summing to at most its stake,
/// and looks for a negative supremum. Finding none does not prove anything.
pub fn check_relaxed_centered<R: Rng>(a: &Assessment, trials: usize, rng: &mut R) -> Result<RelaxedCheck> {
    match check_centered_convexity(a)? {
        Some(v) if v.holds => {}
        _ => return Err(Error::Precondition("assessment is not centered convex".into())),
    }
    let low = a.to_lower();
    let n = low.len();
    for _ in 0..trials {
        let against = rng.gen_range(0..n);
        let against_stake = Rational::new(rng.gen_range(1..=8).into(), rng.gen_range(1..=4).into());
        // Split a random fraction of s₀ among a random subset of entries.
        let budget = &against_stake * Rational::new(rng.gen_range(0..=8).into(), 8.into());
        let raw: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.6) { rng.gen_range(0..=6) } else { 0 }).collect();
        let total: i64 = raw.iter().sum();
        let mut stakes: Vec<Rational> = if total == 0 {
            vec![Rational::zero(); n]
        } else {
            raw.iter().map(|&r| &budget * Rational::new(r.into(), total.into())).collect()
        };
        let favourable = stakes.clone();
        stakes[against] -= &against_stake;
        let g = gain(&low, &stakes);
        let sup_gain = g.into_iter().max().expect("non-empty space");
        if sup_gain.is_negative() {
            return Ok(RelaxedCheck {
                trials,
                violation: Some(RelaxedViolation {
                    against: low.entries()[against].id.clone(),
                    against_stake,
                    stakes: low.entries().iter().map(|e| e.id.clone()).zip(favourable).collect(),
                    sup_gain,
                }),
            });
        }
    }
    Ok(RelaxedCheck { trials, violation: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assessment::Entry;
    use crate::number::rat;
    use crate::space::{Gamble, Space};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab() -> Space {
        Space::new(["a", "b"]).unwrap()
    }

    fn ind(s: &Space, i: usize) -> Gamble {
        Gamble::indicator(s, &[i]).unwrap()
    }

    fn r1() -> Assessment {
        let s = ab();
        Assessment::lower(&s, vec![Entry::new("1_a", ind(&s, 0), rat(3, 5))]).unwrap()
    }

    fn r2() -> Assessment {
        let s = ab();
        Assessment::lower(
            &s,
            vec![Entry::new("1_a", ind(&s, 0), rat(7, 10)), Entry::new("1_b", ind(&s, 1), rat(7, 10))],
        )
        .unwrap()
    }

    fn r4(zero_value: Rational) -> Assessment {
        let s = ab();
        Assessment::lower(
            &s,
            vec![
                Entry::new("1_a", ind(&s, 0), rat(2, 5)),
                Entry::new("1_b", ind(&s, 1), rat(1, 5)),
                Entry::new("zero", Gamble::zero(&s), zero_value),
            ],
        )
        .unwrap()
    }

    #[test]
    fn sure_loss_examples() {
        assert!(check_avoids_sure_loss(&r1()).unwrap().avoids_sure_loss);
        let r2 = check_avoids_sure_loss(&r2()).unwrap();
        assert!(!r2.avoids_sure_loss);
        let w = r2.witness.unwrap();
        assert_eq!(w.coefficients, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(w.sup_gain, rat(-1, 5));
        let s = ab();
        let zero_one = Assessment::lower(&s, vec![Entry::new("z", Gamble::zero(&s), int(1))]).unwrap();
        let c = check_avoids_sure_loss(&zero_one).unwrap();
        assert!(!c.avoids_sure_loss);
        assert_eq!(c.witness.unwrap().sup_gain, int(-1));
    }

    #[test]
    fn coherence_examples() {
        assert!(check_coherence(&r1()).unwrap().holds);
        let pooled = check_coherence(&r4(rat(-1, 10))).unwrap();
        assert!(!pooled.holds);
        assert_eq!(
            pooled.witness,
            Some(Witness::ExtensionImproves {
                kind: ExtensionKind::Natural,
                id: "zero".into(),
                assessed: rat(-1, 10),
                extension: ExtensionValue::Finite(int(0)),
            })
        );
        // lower envelope of (1/2, 1/2) and (4/5, 1/5)
        let s = ab();
        let env = Assessment::lower(
            &s,
            vec![Entry::new("1_a", ind(&s, 0), rat(1, 2)), Entry::new("1_b", ind(&s, 1), rat(1, 5))],
        )
        .unwrap();
        assert!(check_coherence(&env).unwrap().holds);
        assert!(matches!(check_coherence(&r2()).unwrap().witness, Some(Witness::SureLoss(_))));
    }

    #[test]
    fn convexity_examples() {
        assert!(check_convexity(&r2()).unwrap().holds);
        assert!(check_convexity(&r1()).unwrap().holds);
        // R1 with 0 ↦ 0 adjoined is the precise prevision (3/5, 2/5) on its domain.
        let s = ab();
        let augmented = r1().with_entry(Entry::new("zero", Gamble::zero(&s), int(0))).unwrap();
        assert!(check_convexity(&augmented).unwrap().holds);
        // A non-internal value followed by 0 ↦ 0 breaks convexity.
        let low = Assessment::lower(
            &s,
            vec![Entry::new("1_a", ind(&s, 0), rat(-1, 5)), Entry::new("zero", Gamble::zero(&s), int(0))],
        )
        .unwrap();
        let v = check_convexity(&low).unwrap();
        assert!(!v.holds);
        assert!(matches!(v.witness, Some(Witness::ExtensionImproves { ref id, .. }) if id == "1_a"));
    }

    #[test]
    fn centered_examples() {
        assert_eq!(check_centered_convexity(&r4(int(0))).unwrap().map(|v| v.holds), Some(true));
        assert_eq!(check_centered_convexity(&r2()).unwrap(), None);
        let v = check_centered_convexity(&r4(rat(-1, 10))).unwrap().unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Witness::NonZeroAtZero { id: "zero".into(), value: rat(-1, 10) }));
    }

    #[test]
    fn k_bar_examples() {
        assert_eq!(check_k_bar(&r1()).unwrap(), rat(2, 5));
        assert_eq!(check_k_bar(&r2()).unwrap(), rat(-1, 5));
        assert_eq!(check_k_bar(&r4(int(0))).unwrap(), int(0));
    }

    #[test]
    fn relaxed_centered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = check_relaxed_centered(&r4(int(0)), 1000, &mut rng).unwrap();
        assert!(c.passed());
        assert!(matches!(check_relaxed_centered(&r2(), 10, &mut rng), Err(Error::Precondition(_))));
        assert!(check_relaxed_centered(&r4(int(0)), 0, &mut rng).unwrap().passed());
    }

    #[test]
    fn classify_ladder() {
        let r = classify(&r2()).unwrap();
        assert!(!r.avoids_sure_loss && r.convex && !r.coherent);
        assert_eq!(r.centered_convex, None);
        assert_eq!(r.k_bar, rat(-1, 5));
        let r = classify(&r4(rat(-1, 10))).unwrap();
        assert!(r.avoids_sure_loss && r.convex && !r.coherent);
        assert_eq!(r.centered_convex, Some(false));
    }

    #[test]
    fn upper_assessments_report_in_upper_terms() {
        // Upper probabilities 1/5 and 1/5 on a two-atom space: sure loss (sum < 1).
        let s = ab();
        let up = Assessment::upper(
            &s,
            vec![Entry::new("a", ind(&s, 0), rat(1, 5)), Entry::new("b", ind(&s, 1), rat(1, 5))],
        )
        .unwrap();
        let r = classify(&up).unwrap();
        assert_eq!(r.orientation, Orientation::Upper);
        assert!(!r.avoids_sure_loss);
        assert!(r.convex);
        // upper 4/5 on a and 3/5 on Ω: convexity pushes the upper of a down to 3/5
        let up = Assessment::upper(
            &s,
            vec![Entry::new("a", ind(&s, 0), rat(4, 5)), Entry::new("omega", Gamble::constant(&s, int(1)), rat(3, 5))],
        )
        .unwrap();
        let v = check_convexity(&up).unwrap();
        assert_eq!(
            v.witness,
            Some(Witness::ExtensionImproves {
                kind: ExtensionKind::ConvexNatural,
                id: "a".into(),
                assessed: rat(4, 5),
                extension: ExtensionValue::Finite(rat(3, 5)),
            })
        );
    }
}
