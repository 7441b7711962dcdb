//! Convex risk measures through the conjugacy `ρ(X) = P̄(−X)`.
//!
//! A risk assessment `{X ↦ ρ(X)}` induces the upper assessment `{−X ↦ ρ(X)}`,
//! equivalently the lower assessment `{X ↦ −ρ(X)}`, and every check here runs
//! on that lower form. Capital is not discounted: buying and selling are
//! taken to happen at the same time.

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::assessment::{Assessment, Entry};
use crate::consistency::{classify, ConsistencyReport};
use crate::envelope::EnvelopeSpec;
use crate::error::{Error, Result};
use crate::extension;
use crate::number::{int, Rational};
use crate::space::{Gamble, Space};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiskAssessment {
    space: Space,
    /// `value` holds `ρ(X)`.
    entries: Vec<Entry>,
}

impl RiskAssessment {
    pub fn new(space: &Space, entries: Vec<Entry>) -> Result<Self> {
        // Validation is shared with assessments.
        let checked = Assessment::lower(space, entries)?;
        Ok(Self { space: space.clone(), entries: checked.entries().to_vec() })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// `{−X ↦ ρ(X)}`.
    pub fn induced_upper(&self) -> Assessment {
        self.induced_lower().conjugate()
    }

    /// `{X ↦ −ρ(X)}`.
    pub fn induced_lower(&self) -> Assessment {
        let entries = self.entries.iter().map(|e| Entry::new(e.id.clone(), e.gamble.clone(), -&e.value)).collect();
        Assessment::lower(&self.space, entries).expect("validated on construction")
    }

    pub fn zero_entry(&self) -> Option<&Entry> {
        self.entries.iter().find(|e| e.gamble.is_zero())
    }
}

/// Builds `ρ(X) = maxⱼ (Pⱼ(−X) + αⱼ)` on the given positions from an upper spec.
pub fn envelope_risk(spec: &EnvelopeSpec, positions: &[(String, Gamble)]) -> Result<RiskAssessment> {
    let mut entries = Vec::with_capacity(positions.len());
    for (id, x) in positions {
        let (v, _) = spec.eval(&x.neg())?;
        entries.push(Entry::new(id.clone(), x.clone(), v));
    }
    RiskAssessment::new(spec.space(), entries)
}

/// A position is acceptable iff `ρ(X) ≤ 0`.
pub fn acceptable(rho: &Rational) -> bool {
    !rho.is_positive()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiskReport {
    /// Classification of the induced lower assessment `{X ↦ −ρ(X)}`.
    pub consistency: ConsistencyReport,
    pub convex: bool,
    /// `None` without a zero position; otherwise convex and `ρ(0) = 0`.
    pub centered: Option<bool>,
    pub avoids_sure_loss: bool,
    pub coherent: bool,
    pub rho_at_zero: Option<Rational>,
    /// `(id, ρ(X) ≤ 0)` per position.
    pub acceptability: Vec<(String, bool)>,
    /// Positions violating `−sup X ≤ ρ(X) ≤ −inf X`.
    pub outside_bounds: Vec<String>,
}

pub fn check_convex_risk(r: &RiskAssessment) -> Result<RiskReport> {
    let consistency = classify(&r.induced_lower())?;
    let acceptability = r.entries.iter().map(|e| (e.id.clone(), acceptable(&e.value))).collect();
    let outside_bounds = r
        .entries
        .iter()
        .filter(|e| {
            let (inf, sup) = e.gamble.inf_sup();
            e.value < -sup || e.value > -inf
        })
        .map(|e| e.id.clone())
        .collect();
    Ok(RiskReport {
        convex: consistency.convex,
        centered: consistency.centered_convex,
        avoids_sure_loss: consistency.avoids_sure_loss,
        coherent: consistency.coherent,
        rho_at_zero: r.zero_entry().map(|e| e.value.clone()),
        consistency,
        acceptability,
        outside_bounds,
    })
}

/// `ρ` of a new position under the convex natural extension: `−E_c(Y)` for the induced lower assessment.
pub fn risk_extension(r: &RiskAssessment, position: &Gamble) -> Result<Rational> {
    let value = extension::convex_natural_extension(&r.induced_lower(), position)?.finite_value()?;
    Ok(-value)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `ρ(X + α) ≠ ρ(X) − α`.
    Translation { x: Gamble, alpha: Rational, shifted: Rational, expected: Rational },
    /// `X ≤ Y` but `ρ(Y) > ρ(X)`.
    Monotonicity { x: Gamble, y: Gamble, rho_x: Rational, rho_y: Rational },
    /// `ρ(λX + (1−λ)Y) > λρ(X) + (1−λ)ρ(Y)`.
    Convexity { x: Gamble, y: Gamble, lambda: Rational, mixed: Rational, bound: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub trials: usize,
    pub violation: Option<AxiomViolation>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn sample_gamble<R: Rng>(rng: &mut R, space: &Space) -> Gamble {
    let values = (0..space.len()).map(|_| Rational::new(rng.gen_range(-12..=12).into(), 4.into())).collect();
    Gamble::new(space, values).expect("length matches")
}

/// Samples translation, monotonicity and convexity triples against `rho`.
pub fn check_axioms<R, F>(space: &Space, mut rho: F, trials: usize, rng: &mut R) -> Result<AxiomCheck>
where
    R: Rng,
    F: FnMut(&Gamble) -> Result<Rational>,
{
    for _ in 0..trials {
        let x = sample_gamble(rng, space);
        let y = sample_gamble(rng, space);
        let mut alpha = Rational::new(rng.gen_range(-8..=7).into(), 4.into());
        if alpha.is_zero() {
            alpha = Rational::new(2.into(), 1.into());
        }
        let lambda = Rational::new(rng.gen_range(0..=8).into(), 8.into());
        let bump: Vec<Rational> =
            (0..space.len()).map(|_| Rational::new(rng.gen_range(0..=6).into(), 2.into())).collect();
        let above = x.add(&Gamble::new(space, bump)?)?;

        let rho_x = rho(&x)?;
        let shifted = rho(&x.shift(&alpha))?;
        let expected = &rho_x - &alpha;
        if shifted != expected {
            return Ok(AxiomCheck {
                trials,
                violation: Some(AxiomViolation::Translation { x, alpha, shifted, expected }),
            });
        }
        let rho_above = rho(&above)?;
        if rho_above > rho_x {
            return Ok(AxiomCheck {
                trials,
                violation: Some(AxiomViolation::Monotonicity { x, y: above, rho_x, rho_y: rho_above }),
            });
        }
        let rho_y = rho(&y)?;
        let mixed = rho(&x.mix(&y, &lambda)?)?;
        let bound = &lambda * &rho_x + (int(1) - &lambda) * &rho_y;
        if mixed > bound {
            return Ok(AxiomCheck {
                trials,
                violation: Some(AxiomViolation::Convexity { x, y, lambda, mixed, bound }),
            });
        }
    }
    Ok(AxiomCheck { trials, violation: None })
}

/// Axiom sampling for the extension of `r` to all gambles on its space.
pub fn check_axioms_t1_m2_ci<R: Rng>(r: &RiskAssessment, trials: usize, rng: &mut R) -> Result<AxiomCheck> {
    check_axioms(r.space(), |g| risk_extension(r, g), trials, rng)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiquidityCase {
    pub x: Gamble,
    pub lambda: Rational,
    pub scaled: Rational,
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiquidityCheck {
    pub trials: usize,
    pub strict: usize,
    pub equal: usize,
    pub first_strict: Option<LiquidityCase>,
    pub violation: Option<LiquidityCase>,
}

impl LiquidityCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Samples `ρ(λX) ≥ λρ(X)` for `λ ∈ {1, 5/4, …, 4}`.
pub fn check_liquidity<R, F>(space: &Space, mut rho: F, trials: usize, rng: &mut R) -> Result<LiquidityCheck>
where
    R: Rng,
    F: FnMut(&Gamble) -> Result<Rational>,
{
    let mut out = LiquidityCheck { trials, strict: 0, equal: 0, first_strict: None, violation: None };
    for _ in 0..trials {
        let x = sample_gamble(rng, space);
        let lambda = Rational::new((4 + rng.gen_range(0..=12)).into(), 4.into());
        let scaled = rho(&x.scale(&lambda))?;
        let bound = &lambda * rho(&x)?;
        let case = LiquidityCase { x, lambda, scaled, bound };
        if case.scaled < case.bound {
            out.violation = Some(case);
            return Ok(out);
        }
        if case.scaled > case.bound {
            out.strict += 1;
            out.first_strict.get_or_insert(case);
        } else {
            out.equal += 1;
        }
    }
    Ok(out)
}

/// Liquidity sampling for the extension of a centered convex `r`.
pub fn check_liquidity_inequality<R: Rng>(r: &RiskAssessment, trials: usize, rng: &mut R) -> Result<LiquidityCheck> {
    if check_convex_risk(r)?.centered != Some(true) {
        return Err(Error::Precondition("risk measure is not centered convex".into()));
    }
    check_liquidity(r.space(), |g| risk_extension(r, g), trials, rng)
}

/// A normalized combination whose gain `Σ sᵢ(Xᵢ + ρ(Xᵢ)) − (X₀ + ρ(X₀))` has negative supremum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainViolation {
    pub against: String,
    pub stakes: Vec<(String, Rational)>,
    pub sup_gain: Rational,
}

/// Samples normalized gain combinations directly on the positions. Finding
/// a violation proves non-convexity; finding none proves nothing.
pub fn sample_convexity_gains<R: Rng>(r: &RiskAssessment, trials: usize, rng: &mut R) -> Option<GainViolation> {
    let n = r.entries.len();
    for _ in 0..trials {
        let against = rng.gen_range(0..n);
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let total: i64 = raw.iter().sum();
        let stakes: Vec<Rational> = if total == 0 {
            let mut v = vec![Rational::zero(); n];
            v[rng.gen_range(0..n)] = int(1);
            v
        } else {
            raw.iter().map(|&k| Rational::new(k.into(), total.into())).collect()
        };
        let x0 = &r.entries[against];
        let sup_gain = (0..r.space.len())
            .map(|w| {
                let favourable: Rational = r
                    .entries
                    .iter()
                    .zip(&stakes)
                    .map(|(e, s)| s * (&e.gamble.values()[w] + &e.value))
                    .sum();
                favourable - (&x0.gamble.values()[w] + &x0.value)
            })
            .max()
            .expect("non-empty space");
        if sup_gain.is_negative() {
            return Some(GainViolation {
                against: x0.id.clone(),
                stakes: r.entries.iter().map(|e| e.id.clone()).zip(stakes).collect(),
                sup_gain,
            });
        }
    }
    None
}
