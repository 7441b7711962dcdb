//! Natural and convex natural extension by linear programming.
//!
//! For a lower assessment `{Xᵢ ↦ μᵢ}` and a target `Z`, the convex natural
//! extension is
//!
//! ```text
//! E_c(Z) = max α  s.t.  Z(ω) − α ≥ Σ sᵢ (Xᵢ(ω) − μᵢ) for every atom ω,  s ≥ 0,  Σ sᵢ = 1
//!        = min Σ p(ω) Z(ω) + r  over probability vectors p and free r with p·Xᵢ + r ≥ μᵢ.
//! ```
//!
//! The natural extension drops `Σ sᵢ = 1` on the primal side and `r` on the
//! dual side. Both programs are always solved; a disagreement is reported as
//! an internal error.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::assessment::{Assessment, PrecisePrevision};
use crate::error::{Error, Result};
use crate::lp::{self, Bounds, LinearProgram, LpSolution, LpStatus, Relation};
use crate::number::{int, Rational};
use crate::space::Gamble;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionKind {
    Natural,
    ConvexNatural,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionValue {
    Finite(Rational),
    PlusInfinity,
}

impl ExtensionValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtensionValue::Finite(v) => Some(v),
            ExtensionValue::PlusInfinity => None,
        }
    }
}

/// Stakes `sᵢ` on the domain entries and the attained `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimalWitness {
    pub coefficients: Vec<Rational>,
    pub alpha: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualWitness {
    /// A precise prevision dominating the assessment (natural extension).
    Precise(PrecisePrevision),
    /// A pair `(Q, r)` with `Q(X) + r ≥ μ_X` on the domain (convex natural extension).
    Translated { q: PrecisePrevision, r: Rational },
}

/// A combination of bets in favour of domain entries, `G = Σ sᵢ (Xᵢ − μᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainWitness {
    pub ids: Vec<String>,
    pub coefficients: Vec<Rational>,
    pub sup_gain: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionResult {
    pub target: Gamble,
    pub kind: ExtensionKind,
    pub value: ExtensionValue,
    pub primal: Option<PrimalWitness>,
    pub dual: Option<DualWitness>,
    /// Set when the natural extension is infinite.
    pub sure_loss: Option<GainWitness>,
}

impl ExtensionResult {
    /// The value, or an error if it is infinite.
    pub fn finite_value(&self) -> Result<Rational> {
        self.value
            .finite()
            .cloned()
            .ok_or_else(|| Error::Precondition("extension is unbounded: the assessment incurs sure loss".into()))
    }
}

fn check_inputs(a: &Assessment, z: &Gamble) -> Result<()> {
    a.require_lower()?;
    if a.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if z.space() != a.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// `G(ω) = Σ sᵢ (Xᵢ(ω) − μᵢ)` for every atom.
pub fn gain(a: &Assessment, coefficients: &[Rational]) -> Vec<Rational> {
    let m = a.space().len();
    let mut g = vec![Rational::zero(); m];
    for (e, s) in a.entries().iter().zip(coefficients) {
        if s.is_zero() {
            continue;
        }
        for (gw, x) in g.iter_mut().zip(e.gamble.values()) {
            *gw += s * (x - &e.value);
        }
    }
    g
}

pub(crate) fn gain_witness(a: &Assessment, coefficients: Vec<Rational>) -> GainWitness {
    let sup_gain = gain(a, &coefficients).into_iter().max().expect("non-empty space");
    GainWitness { ids: a.entries().iter().map(|e| e.id.clone()).collect(), coefficients, sup_gain }
}

/// Primal program in variables `(s₀ … sₙ₋₁, α)`.
pub fn primal_program(a: &Assessment, z: &Gamble, kind: ExtensionKind) -> LinearProgram {
    let n = a.len();
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = int(1);
    let mut lp = LinearProgram::maximize(objective).with_bounds(n, Bounds::free());
    for (w, zw) in z.values().iter().enumerate() {
        let mut row: Vec<Rational> = a.entries().iter().map(|e| &e.gamble.values()[w] - &e.value).collect();
        row.push(int(1));
        lp.add_constraint(row, Relation::Le, zw.clone());
    }
    if kind == ExtensionKind::ConvexNatural {
        let mut row = vec![int(1); n];
        row.push(Rational::zero());
        lp.add_constraint(row, Relation::Eq, int(1));
    }
    lp
}

/// Dual program in variables `(p₀ … pₘ₋₁)` plus a free `r` for the convex kind.
pub fn dual_program(a: &Assessment, z: &Gamble, kind: ExtensionKind) -> LinearProgram {
    let m = a.space().len();
    let convex = kind == ExtensionKind::ConvexNatural;
    let mut objective = z.values().to_vec();
    if convex {
        objective.push(int(1));
    }
    let mut lp = LinearProgram::minimize(objective);
    if convex {
        lp = lp.with_bounds(m, Bounds::free());
    }
    for e in a.entries() {
        let mut row = e.gamble.values().to_vec();
        if convex {
            row.push(int(1));
        }
        lp.add_constraint(row, Relation::Ge, e.value.clone());
    }
    let mut row = vec![int(1); m];
    if convex {
        row.push(Rational::zero());
    }
    lp.add_constraint(row, Relation::Eq, int(1));
    lp
}

fn solve_checked(lp: &LinearProgram) -> Result<LpSolution> {
    let sol = lp::solve(lp)?;
    if !lp::verify_certificate(lp, &sol) {
        return Err(Error::Internal("solver returned an invalid certificate".into()));
    }
    Ok(sol)
}

fn extend(a: &Assessment, z: &Gamble, kind: ExtensionKind) -> Result<ExtensionResult> {
    check_inputs(a, z)?;
    let n = a.len();
    let m = a.space().len();
    let primal = solve_checked(&primal_program(a, z, kind))?;
    let dual = solve_checked(&dual_program(a, z, kind))?;
    match (primal.status, dual.status) {
        (LpStatus::Optimal, LpStatus::Optimal) => {
            let value = primal.value.clone().expect("optimal");
            if dual.value.as_ref() != Some(&value) {
                return Err(Error::Internal(format!(
                    "primal value {value} differs from dual value {:?}",
                    dual.value
                )));
            }
            let q = PrecisePrevision::new(a.space(), dual.primal[..m].to_vec())?;
            let dual_witness = match kind {
                ExtensionKind::Natural => DualWitness::Precise(q),
                ExtensionKind::ConvexNatural => DualWitness::Translated { q, r: dual.primal[m].clone() },
            };
            Ok(ExtensionResult {
                target: z.clone(),
                kind,
                value: ExtensionValue::Finite(value),
                primal: Some(PrimalWitness {
                    coefficients: primal.primal[..n].to_vec(),
                    alpha: primal.primal[n].clone(),
                }),
                dual: Some(dual_witness),
                sure_loss: None,
            })
        }
        (LpStatus::Unbounded, LpStatus::Infeasible) if kind == ExtensionKind::Natural => {
            // Along the ray α grows while Σ sᵢ(Xᵢ − μᵢ) ≤ −Δα < 0 everywhere.
            let ray = primal.ray.expect("unbounded solutions carry a ray");
            let stakes = &ray[..n];
            let total: Rational = stakes.iter().sum();
            if !total.is_positive() {
                return Err(Error::Internal("unbounded ray without stakes".into()));
            }
            let coefficients = stakes.iter().map(|s| s / &total).collect();
            Ok(ExtensionResult {
                target: z.clone(),
                kind,
                value: ExtensionValue::PlusInfinity,
                primal: None,
                dual: None,
                sure_loss: Some(gain_witness(a, coefficients)),
            })
        }
        (p, d) => Err(Error::Internal(format!("primal status {p:?} inconsistent with dual status {d:?}"))),
    }
}

/// Convex natural extension `E_c(z)`; finite for every finite domain.
pub fn convex_natural_extension(a: &Assessment, z: &Gamble) -> Result<ExtensionResult> {
    extend(a, z, ExtensionKind::ConvexNatural)
}

/// Natural extension `E(z)`; `+∞` exactly when the assessment incurs sure loss.
pub fn natural_extension(a: &Assessment, z: &Gamble) -> Result<ExtensionResult> {
    extend(a, z, ExtensionKind::Natural)
}

/// Evaluates an extension over many targets in parallel, preserving order.
pub fn extend_all(a: &Assessment, targets: &[Gamble], kind: ExtensionKind) -> Result<Vec<ExtensionResult>> {
    targets.par_iter().map(|z| extend(a, z, kind)).collect()
}

/// `E_c(0)`. Its negation is the largest uniform upward shift that still avoids sure loss.
pub fn ec_at_zero(a: &Assessment) -> Result<Rational> {
    convex_natural_extension(a, &Gamble::zero(a.space()))?.finite_value()
}
