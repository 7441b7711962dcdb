//! Randomized invariants, driven by proptest-chosen seeds and sizes.

use cvxprev::consistency::{
    check_avoids_sure_loss, check_centered_convexity, check_coherence, check_convexity, check_k_bar, classify,
    internality_violations,
};
use cvxprev::correction::{correct, CorrectionMode};
use cvxprev::envelope::envelope_eval;
use cvxprev::extension::{convex_natural_extension, natural_extension, ExtensionValue};
use cvxprev::lp::{solve, verify_certificate, LinearProgram, LpStatus, Relation};
use cvxprev::models::{all_events, possibility_envelope, possibility_measure, PossibilityAssignment};
use cvxprev::random::{self, AlphaKind};
use cvxprev::risk::{check_convex_risk, envelope_risk, sample_convexity_gains, RiskAssessment};
use cvxprev::{rat, Assessment, Entry, Gamble, Rational, Space};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64, m: usize) -> (ChaCha8Rng, Space) {
    (random::seeded(seed), Space::with_size(m).unwrap())
}

fn ec(a: &Assessment, z: &Gamble) -> Rational {
    convex_natural_extension(a, z).unwrap().finite_value().unwrap()
}

fn lambda<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(0..=8), 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugation_is_an_involution(seed in any::<u64>(), m in 1usize..6, n in 1usize..6) {
        let (mut rng, s) = setup(seed, m);
        let a = random::arbitrary_instance(&mut rng, &s, n);
        prop_assert_eq!(a.conjugate().conjugate(), a);
    }

    #[test]
    fn precise_previsions_are_linear(seed in any::<u64>(), m in 1usize..7) {
        let (mut rng, s) = setup(seed, m);
        let p = random::precise_prevision(&mut rng, &s);
        let (x, y) = (random::gamble(&mut rng, &s), random::gamble(&mut rng, &s));
        let (a, b) = (random::small_rational(&mut rng, 3, 4), random::small_rational(&mut rng, 3, 4));
        let combo = x.scale(&a).add(&y.scale(&b)).unwrap();
        prop_assert_eq!(p.eval(&combo).unwrap(), a * p.eval(&x).unwrap() + b * p.eval(&y).unwrap());
    }

    #[test]
    fn random_programs_carry_valid_certificates(seed in any::<u64>(), vars in 1usize..5, rows in 1usize..5) {
        let mut rng = random::seeded(seed);
        let objective = (0..vars).map(|_| random::small_rational(&mut rng, 3, 2)).collect();
        let mut lp = if rng.gen_bool(0.5) { LinearProgram::maximize(objective) } else { LinearProgram::minimize(objective) };
        for _ in 0..rows {
            let row = (0..vars).map(|_| random::small_rational(&mut rng, 3, 2)).collect();
            let rel = [Relation::Le, Relation::Ge, Relation::Eq][rng.gen_range(0..3)];
            lp.add_constraint(row, rel, random::small_rational(&mut rng, 4, 2));
        }
        let sol = solve(&lp).unwrap();
        prop_assert!(verify_certificate(&lp, &sol));
        prop_assert_eq!(solve(&lp).unwrap(), sol.clone());
        if sol.status == LpStatus::Optimal {
            prop_assert!(lp.is_feasible(&sol.primal));
        }
    }

    #[test]
    fn natural_extension_dominates_convex_extension(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let (mut rng, s) = setup(seed, m);
        let a = random::arbitrary_instance(&mut rng, &s, n);
        let z = random::gamble(&mut rng, &s);
        let e = natural_extension(&a, &z).unwrap();
        let e_c = ec(&a, &z);
        if let ExtensionValue::Finite(v) = e.value {
            prop_assert!(v >= e_c);
        } else {
            prop_assert!(!check_avoids_sure_loss(&a).unwrap().avoids_sure_loss);
        }
        for entry in a.entries() {
            prop_assert!(ec(&a, &entry.gamble) >= entry.value);
        }
    }

    #[test]
    fn convex_extension_is_a_convex_prevision(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let (mut rng, s) = setup(seed, m);
        let a = random::arbitrary_instance(&mut rng, &s, n);
        let (x, y) = (random::gamble(&mut rng, &s), random::gamble(&mut rng, &s));
        let c = random::small_rational(&mut rng, 2, 4);
        let ex = ec(&a, &x);
        prop_assert_eq!(ec(&a, &x.shift(&c)), &ex + &c);
        let bump: Vec<Rational> = (0..m).map(|_| rat(rng.gen_range(0..=4), 2)).collect();
        let above = x.add(&Gamble::new(&s, bump).unwrap()).unwrap();
        prop_assert!(ec(&a, &above) >= ex);
        let l = lambda(&mut rng);
        let ey = ec(&a, &y);
        prop_assert!(ec(&a, &x.mix(&y, &l).unwrap()) >= &l * &ex + (Rational::one() - &l) * ey);
        let e0 = ec(&a, &Gamble::zero(&s));
        let (inf, sup) = x.inf_sup();
        prop_assert!(&e0 + inf <= ex && ex <= e0 + sup);
    }

    #[test]
    fn ladder_implications_hold(seed in any::<u64>(), m in 1usize..5, n in 1usize..5, kind in 0usize..4) {
        let (mut rng, s) = setup(seed, m);
        let a = match kind {
            0 => random::arbitrary_instance(&mut rng, &s, n),
            1 => random::coherent_instance(&mut rng, &s, n),
            2 => {
                let centered = rng.gen_bool(0.5);
                random::convex_with_zero(&mut rng, &s, n, centered)
            }
            _ => random::sure_loss_instance(&mut rng, &s, n).unwrap(),
        };
        let a = if rng.gen_bool(0.3) { a.conjugate() } else { a };
        let r = classify(&a).unwrap();
        prop_assert!(!r.coherent || (r.convex && r.avoids_sure_loss));
        prop_assert!(r.avoids_unbounded_sure_loss);
        if r.centered_convex == Some(true) {
            prop_assert!(r.convex && r.avoids_sure_loss);
        }
        prop_assert_eq!(r.avoids_sure_loss, !r.k_bar.is_negative());
        prop_assert_eq!(r.coherent, check_coherence(&a).unwrap().holds);
        if kind == 1 {
            prop_assert!(r.coherent);
        }
    }

    #[test]
    fn zero_value_decides_sure_loss_for_convex(seed in any::<u64>(), m in 1usize..5, n in 0usize..5) {
        let (mut rng, s) = setup(seed, m);
        let a = random::convex_with_zero(&mut rng, &s, n, false);
        prop_assert!(check_convexity(&a).unwrap().holds);
        let at_zero = a.zero_entry().unwrap().value.clone();
        prop_assert_eq!(check_avoids_sure_loss(&a).unwrap().avoids_sure_loss, !at_zero.is_positive());
    }

    #[test]
    fn centered_convex_is_internal_and_scales(seed in any::<u64>(), m in 1usize..5, n in 0usize..5) {
        let (mut rng, s) = setup(seed, m);
        let a = random::convex_with_zero(&mut rng, &s, n, true);
        for e in a.entries() {
            let (inf, sup) = e.gamble.inf_sup();
            prop_assert!(inf <= e.value && e.value <= sup);
        }
        let x = random::gamble(&mut rng, &s);
        let ex = ec(&a, &x);
        let l = random::small_rational(&mut rng, 3, 4);
        let scaled = ec(&a, &x.scale(&l));
        if !l.is_negative() && l <= Rational::one() {
            prop_assert!(scaled >= &l * ex);
        } else {
            prop_assert!(scaled <= &l * ex);
        }
    }

    #[test]
    fn convexity_survives_mixtures_and_shifts(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let (mut rng, s) = setup(seed, m);
        let gambles: Vec<(String, Gamble)> = random::convex_instance(&mut rng, &s, n)
            .entries().iter().map(|e| (e.id.clone(), e.gamble.clone())).collect();
        let one = envelope_eval(&random::envelope_spec(&mut rng, &s, 3, AlphaKind::Free), &gambles).unwrap().assessment;
        let two = envelope_eval(&random::envelope_spec(&mut rng, &s, 2, AlphaKind::Free), &gambles).unwrap().assessment;
        let l = lambda(&mut rng);
        let mixed: Vec<Rational> = one.values().zip(two.values()).map(|(x, y)| &l * x + (Rational::one() - &l) * y).collect();
        prop_assert!(check_convexity(&one.with_values(mixed).unwrap()).unwrap().holds);
        // A convergent sequence of convex mixtures: the prefix limit is again a mixture.
        let weights = random::simplex_weights(&mut rng, 3, 16);
        let three = envelope_eval(&random::envelope_spec(&mut rng, &s, 2, AlphaKind::Zero), &gambles).unwrap().assessment;
        let limit: Vec<Rational> = one.values().zip(two.values()).zip(three.values())
            .map(|((x, y), z)| &weights[0] * x + &weights[1] * y + &weights[2] * z)
            .collect();
        prop_assert!(check_convexity(&one.with_values(limit).unwrap()).unwrap().holds);
        let mu = random::small_rational(&mut rng, 3, 4);
        prop_assert!(check_convexity(&one.shifted(&mu)).unwrap().holds);
    }

    #[test]
    fn convex_assessments_are_one_sided(seed in any::<u64>(), m in 1usize..5, n in 1usize..6) {
        let (mut rng, s) = setup(seed, m);
        let a = random::convex_instance(&mut rng, &s, n);
        prop_assert!(internality_violations(&a).one_sided());
    }

    #[test]
    fn convex_cones_satisfy_concavity_and_monotone_translation(seed in any::<u64>(), m in 1usize..4) {
        let (mut rng, s) = setup(seed, m);
        let base = random::nonzero_gamble(&mut rng, &s);
        let other = random::nonzero_gamble(&mut rng, &s);
        let scales = [rat(1, 2), rat(1, 1), rat(2, 1)];
        let mut gambles: Vec<(String, Gamble)> = Vec::new();
        for (k, g) in [base, other].iter().enumerate() {
            for (j, c) in scales.iter().enumerate() {
                let h = g.scale(c);
                if gambles.iter().all(|(_, x)| x != &h) {
                    gambles.push((format!("g{k}_{j}"), h));
                }
            }
        }
        let spec = random::envelope_spec(&mut rng, &s, 3, AlphaKind::Free);
        let a = envelope_eval(&spec, &gambles).unwrap().assessment;
        prop_assert!(check_convexity(&a).unwrap().holds);
        for x in a.entries() {
            for y in a.entries() {
                // Largest μ with X ≥ Y + μ.
                let mu = x.gamble.sub(&y.gamble).unwrap().inf();
                prop_assert!(x.value >= &y.value + &mu);
                let l = lambda(&mut rng);
                let mix = x.gamble.mix(&y.gamble, &l).unwrap();
                if let Some(z) = a.entries().iter().find(|e| e.gamble == mix) {
                    prop_assert!(z.value >= &l * &x.value + (Rational::one() - &l) * &y.value);
                }
            }
        }
    }

    #[test]
    fn k_bar_is_the_sure_loss_threshold(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let (mut rng, s) = setup(seed, m);
        let a = random::arbitrary_instance(&mut rng, &s, n);
        let k = check_k_bar(&a).unwrap();
        prop_assert_eq!(&check_avoids_sure_loss(&a).unwrap().min_sup_gain, &k);
        let eps = rat(1, 1000);
        prop_assert!(check_avoids_sure_loss(&a.shifted(&k)).unwrap().avoids_sure_loss);
        prop_assert!(check_avoids_sure_loss(&a.shifted(&(&k - &eps))).unwrap().avoids_sure_loss);
        prop_assert!(!check_avoids_sure_loss(&a.shifted(&(&k + &eps))).unwrap().avoids_sure_loss);
    }

    #[test]
    fn corrections_meet_their_targets(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let (mut rng, s) = setup(seed, m);
        let a = if rng.gen_bool(0.5) {
            random::sure_loss_instance(&mut rng, &s, n).unwrap()
        } else {
            random::arbitrary_instance(&mut rng, &s, n)
        };
        let convex = correct(&a, CorrectionMode::Convex).unwrap();
        prop_assert!(check_convexity(&convex.corrected).unwrap().holds);
        for (c, o) in convex.corrected.values().zip(a.values()) {
            prop_assert!(c >= o);
        }
        let asl = check_avoids_sure_loss(&a).unwrap().avoids_sure_loss;
        prop_assert_eq!(check_avoids_sure_loss(&convex.corrected).unwrap().avoids_sure_loss, asl);
        let centered = correct(&a, CorrectionMode::Centered).unwrap();
        prop_assert_eq!(check_centered_convexity(&centered.corrected).unwrap().map(|v| v.holds), Some(true));
        let shifted = correct(&a, CorrectionMode::Shift).unwrap();
        prop_assert!(check_avoids_sure_loss(&shifted.corrected).unwrap().avoids_sure_loss);
        if !asl {
            let short = a.shifted(&-(&shifted.ec_zero - rat(1, 1000)));
            prop_assert!(!check_avoids_sure_loss(&short).unwrap().avoids_sure_loss);
        }
    }

    #[test]
    fn envelopes_attain_and_center(seed in any::<u64>(), m in 1usize..5, n in 0usize..5, kind in 0usize..3) {
        let (mut rng, s) = setup(seed, m);
        let kind = [AlphaKind::Zero, AlphaKind::Centered, AlphaKind::Free][kind];
        let count = rng.gen_range(1..=4);
        let spec = random::envelope_spec(&mut rng, &s, count, kind);
        let mut gambles: Vec<(String, Gamble)> = Vec::new();
        for k in 0..n {
            let g = random::nonzero_gamble(&mut rng, &s);
            if gambles.iter().all(|(_, h)| h != &g) {
                gambles.push((format!("g{k}"), g));
            }
        }
        gambles.push(("zero".into(), Gamble::zero(&s)));
        let out = envelope_eval(&spec, &gambles).unwrap();
        for (e, &j) in out.assessment.entries().iter().zip(&out.attained_by) {
            let attained = spec.previsions()[j].eval(&e.gamble).unwrap() + &spec.alphas()[j];
            prop_assert_eq!(&attained, &e.value);
            for (p, al) in spec.previsions().iter().zip(spec.alphas()) {
                prop_assert!(p.eval(&e.gamble).unwrap() + al >= e.value);
            }
        }
        let min_alpha = spec.alphas().iter().min().unwrap().clone();
        prop_assert_eq!(&out.assessment.zero_entry().unwrap().value, &min_alpha);
        prop_assert_eq!(check_centered_convexity(&out.assessment).unwrap().map(|v| v.holds), Some(min_alpha.is_zero()));
        if kind == AlphaKind::Zero {
            prop_assert!(check_coherence(&out.assessment).unwrap().holds);
        }
    }

    #[test]
    fn possibility_measures_preserve_suprema(seed in any::<u64>(), m in 1usize..6) {
        let (mut rng, s) = setup(seed, m);
        let pi: Vec<Rational> = (0..m).map(|_| rat(rng.gen_range(0..=10), 10)).collect();
        let p = PossibilityAssignment::new(&s, pi).unwrap();
        let events = all_events(&s);
        let a = &events[rng.gen_range(0..events.len())];
        let b = &events[rng.gen_range(0..events.len())];
        let mut union: Vec<usize> = a.iter().chain(b).copied().collect();
        union.sort_unstable();
        union.dedup();
        let (pa, pb, pu) = (p.measure(a).unwrap(), p.measure(b).unwrap(), p.measure(&union).unwrap());
        prop_assert_eq!(&pu, std::cmp::max(&pa, &pb));
        prop_assert!(pa <= pu && pb <= pu);
        let measure = possibility_measure(&p, &events).unwrap();
        let spec = possibility_envelope(&p);
        for e in measure.entries() {
            prop_assert_eq!(spec.eval(&e.gamble).unwrap().0, e.value.clone());
        }
    }

    #[test]
    fn sub_normalised_possibility_incurs_sure_loss(seed in any::<u64>(), m in 1usize..5) {
        let (mut rng, s) = setup(seed, m);
        let pi: Vec<Rational> = (0..m).map(|_| rat(rng.gen_range(0..=9), 10)).collect();
        let p = PossibilityAssignment::new(&s, pi).unwrap();
        let r = classify(&possibility_measure(&p, &all_events(&s)).unwrap()).unwrap();
        prop_assert!(!r.avoids_sure_loss);
        prop_assert_ne!(r.centered_convex, Some(true));
    }

    #[test]
    fn risk_classification_agrees_with_gain_sampling(seed in any::<u64>(), m in 1usize..4, n in 1usize..5) {
        let (mut rng, s) = setup(seed, m);
        let entries: Vec<Entry> = random::arbitrary_instance(&mut rng, &s, n)
            .entries().iter().map(|e| Entry::new(e.id.clone(), e.gamble.clone(), -&e.value)).collect();
        let r = RiskAssessment::new(&s, entries).unwrap();
        let report = check_convex_risk(&r).unwrap();
        let violation = sample_convexity_gains(&r, 200, &mut rng);
        if report.convex {
            prop_assert!(violation.is_none());
        }
        if violation.is_some() {
            prop_assert!(!report.convex);
        }
    }

    #[test]
    fn envelope_risk_is_reproduced_and_bounded(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let (mut rng, s) = setup(seed, m);
        let count = rng.gen_range(1..=4);
        let lower = random::envelope_spec(&mut rng, &s, count, AlphaKind::Centered);
        let spec = cvxprev::envelope::EnvelopeSpec::upper(
            lower.previsions().to_vec(),
            lower.alphas().iter().map(|x| -x).collect(),
        ).unwrap();
        let mut positions: Vec<(String, Gamble)> = (0..n).map(|k| (format!("x{k}"), random::gamble(&mut rng, &s))).collect();
        positions.retain(|(_, g)| !g.is_zero());
        positions.dedup_by(|a, b| a.1 == b.1);
        positions.push(("zero".into(), Gamble::zero(&s)));
        let r = envelope_risk(&spec, &positions).unwrap();
        for e in r.entries() {
            let expected = spec.previsions().iter().zip(spec.alphas())
                .map(|(p, al)| p.eval(&e.gamble.neg()).unwrap() + al)
                .max()
                .unwrap();
            prop_assert_eq!(&e.value, &expected);
        }
        let report = check_convex_risk(&r).unwrap();
        prop_assert_eq!(report.centered, Some(true));
        prop_assert!(report.avoids_sure_loss);
        prop_assert!(report.outside_bounds.is_empty());
    }
}
