//! Seeded generators for test instances. Every generator is built from a
//! representation result, so each one also exercises that result.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::assessment::{Assessment, Entry, PrecisePrevision};
use crate::consistency::check_k_bar;
use crate::envelope::EnvelopeSpec;
use crate::error::Result;
use crate::number::{int, Rational};
use crate::space::{Gamble, Space};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `k/den` with `|k| ≤ bound·den`.
pub fn small_rational<R: Rng>(rng: &mut R, bound: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(-bound * den..=bound * den).into(), den.into())
}

pub fn gamble<R: Rng>(rng: &mut R, space: &Space) -> Gamble {
    let values = (0..space.len()).map(|_| small_rational(rng, 5, 4)).collect();
    Gamble::new(space, values).expect("length matches")
}

/// A non-zero gamble, so that generated domains never hold a stray zero.
pub fn nonzero_gamble<R: Rng>(rng: &mut R, space: &Space) -> Gamble {
    loop {
        let g = gamble(rng, space);
        if !g.is_zero() {
            return g;
        }
    }
}

/// Masses drawn as integer weights, some of them zero.
pub fn precise_prevision<R: Rng>(rng: &mut R, space: &Space) -> PrecisePrevision {
    loop {
        let weights: Vec<i64> = (0..space.len()).map(|_| rng.gen_range(0..=6)).collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        let masses = weights.iter().map(|w| Rational::new((*w).into(), total.into())).collect();
        return PrecisePrevision::new(space, masses).expect("masses sum to one");
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaKind {
    /// All offsets zero: a coherent envelope.
    Zero,
    /// Offsets `≥ 0` with a zero among them: a centered lower envelope.
    Centered,
    /// Arbitrary offsets.
    Free,
}

pub fn envelope_spec<R: Rng>(rng: &mut R, space: &Space, count: usize, kind: AlphaKind) -> EnvelopeSpec {
    let previsions = (0..count).map(|_| precise_prevision(rng, space)).collect();
    let alphas = match kind {
        AlphaKind::Zero => vec![int(0); count],
        AlphaKind::Centered => {
            let mut a: Vec<Rational> = (0..count).map(|_| small_rational(rng, 2, 4).abs()).collect();
            let pick = rng.gen_range(0..count);
            a[pick] = int(0);
            a
        }
        AlphaKind::Free => (0..count).map(|_| small_rational(rng, 2, 4)).collect(),
    };
    EnvelopeSpec::lower(previsions, alphas).expect("consistent lengths")
}

fn domain<R: Rng>(rng: &mut R, space: &Space, n: usize) -> Vec<(String, Gamble)> {
    let mut out: Vec<(String, Gamble)> = Vec::with_capacity(n);
    while out.len() < n {
        let g = nonzero_gamble(rng, space);
        if out.iter().all(|(_, h)| h != &g) {
            out.push((format!("g{}", out.len()), g));
        }
    }
    out
}

fn from_spec(spec: &EnvelopeSpec, gambles: &[(String, Gamble)]) -> Assessment {
    let entries = gambles
        .iter()
        .map(|(id, g)| Entry::new(id.clone(), g.clone(), spec.eval(g).expect("same space").0))
        .collect();
    Assessment::lower(spec.space(), entries).expect("valid entries")
}

/// Lower envelope of 2 to 5 precise previsions on `n` gambles.
pub fn coherent_instance<R: Rng>(rng: &mut R, space: &Space, n: usize) -> Assessment {
    let count = rng.gen_range(2..=5);
    from_spec(&envelope_spec(rng, space, count, AlphaKind::Zero), &domain(rng, space, n))
}

/// Lower envelope of translated precise previsions on `n` gambles.
pub fn convex_instance<R: Rng>(rng: &mut R, space: &Space, n: usize) -> Assessment {
    let count = rng.gen_range(1..=5);
    from_spec(&envelope_spec(rng, space, count, AlphaKind::Free), &domain(rng, space, n))
}

/// A convex instance whose domain includes the zero gamble, under id `zero`.
/// With `centered` the offsets are those of a centered envelope.
pub fn convex_with_zero<R: Rng>(rng: &mut R, space: &Space, n: usize, centered: bool) -> Assessment {
    let count = rng.gen_range(1..=5);
    let kind = if centered { AlphaKind::Centered } else { AlphaKind::Free };
    let spec = envelope_spec(rng, space, count, kind);
    let mut gambles = domain(rng, space, n);
    let at = rng.gen_range(0..=gambles.len());
    gambles.insert(at, ("zero".to_string(), Gamble::zero(space)));
    from_spec(&spec, &gambles)
}

/// A convex instance shifted above its sure-loss threshold.
pub fn sure_loss_instance<R: Rng>(rng: &mut R, space: &Space, n: usize) -> Result<Assessment> {
    let base = convex_instance(rng, space, n);
    let k_bar = check_k_bar(&base)?;
    let delta = Rational::new(rng.gen_range(1..=8).into(), 4.into());
    Ok(base.shifted(&(k_bar + delta)))
}

/// Arbitrary values on arbitrary gambles; any classification can occur.
pub fn arbitrary_instance<R: Rng>(rng: &mut R, space: &Space, n: usize) -> Assessment {
    let entries = domain(rng, space, n)
        .into_iter()
        .map(|(id, g)| {
            let (inf, sup) = g.inf_sup();
            // mostly inside [inf, sup], sometimes outside
            let t = Rational::new(rng.gen_range(-2..=10).into(), 8.into());
            let v = &inf + t * (sup - &inf);
            Entry::new(id, g, v)
        })
        .collect();
    Assessment::lower(space, entries).expect("valid entries")
}

/// Picks `m` and `n` uniformly from `1..=max_m`, `1..=max_n`.
pub fn dimensions<R: Rng>(rng: &mut R, max_m: usize, max_n: usize) -> (usize, usize) {
    (rng.gen_range(1..=max_m), rng.gen_range(1..=max_n))
}

/// Random convex weights with denominator `den`.
pub fn simplex_weights<R: Rng>(rng: &mut R, k: usize, den: i64) -> Vec<Rational> {
    let mut cuts: Vec<i64> = (0..k.saturating_sub(1)).map(|_| rng.gen_range(0..=den)).collect();
    cuts.push(0);
    cuts.push(den);
    cuts.sort_unstable();
    let mut w: Vec<Rational> = cuts.windows(2).map(|c| Rational::new((c[1] - c[0]).into(), den.into())).collect();
    w.shuffle(rng);
    debug_assert!(w.iter().fold(Rational::zero(), |a, b| a + b) == int(1));
    w
}
