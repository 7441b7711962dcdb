//! Canonical repairs of an assessment through its convex natural extension.

use num_traits::Zero;

use crate::assessment::{Assessment, Entry, Orientation};
use crate::consistency::{classify, ConsistencyReport};
use crate::error::{Error, Result};
use crate::extension::{self, ExtensionKind};
use crate::number::Rational;
use crate::space::Gamble;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionMode {
    /// `X ↦ E_c(X)`: the least convex assessment dominating the input.
    Convex,
    /// `X ↦ E_c(X) − E_c(0)`, with `0 ↦ 0` adjoined.
    Centered,
    /// `X ↦ μ_X − E_c(0)`: the smallest uniform shift that avoids sure loss.
    Shift,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionResult {
    pub mode: CorrectionMode,
    pub original: Assessment,
    pub corrected: Assessment,
    /// `E_c(0)` of the lower form of the original.
    pub ec_zero: Rational,
    /// False when the input already passed the mode's target check and was left alone.
    pub applied: bool,
    pub report_before: ConsistencyReport,
    pub report_after: ConsistencyReport,
}

/// Whether the report already satisfies what `mode` is meant to achieve.
///
/// For [`CorrectionMode::Centered`] without a zero gamble in the domain this
/// falls back to convex and avoiding sure loss.
pub fn passes_target(report: &ConsistencyReport, mode: CorrectionMode) -> bool {
    match mode {
        CorrectionMode::Convex => report.convex,
        CorrectionMode::Shift => report.avoids_sure_loss,
        CorrectionMode::Centered => match report.centered_convex {
            Some(c) => c,
            None => report.convex && report.avoids_sure_loss,
        },
    }
}

fn zero_id(a: &Assessment) -> String {
    let mut id = "zero".to_string();
    let mut k = 1;
    while a.get(&id).is_some() {
        id = format!("zero_{k}");
        k += 1;
    }
    id
}

fn corrected_lower(low: &Assessment, mode: CorrectionMode, ec_zero: &Rational) -> Result<Assessment> {
    match mode {
        CorrectionMode::Shift => Ok(low.shifted(&-ec_zero)),
        CorrectionMode::Convex | CorrectionMode::Centered => {
            let targets: Vec<Gamble> = low.gambles().cloned().collect();
            let values = extension::extend_all(low, &targets, ExtensionKind::ConvexNatural)?
                .into_iter()
                .map(|r| r.finite_value())
                .collect::<Result<Vec<_>>>()?;
            let fixed = low.with_values(values)?;
            if mode == CorrectionMode::Convex {
                return Ok(fixed);
            }
            let centered = fixed.shifted(&-ec_zero);
            if centered.zero_entry().is_some() {
                Ok(centered)
            } else {
                let id = zero_id(&centered);
                centered.with_entry(Entry::new(id, Gamble::zero(low.space()), Rational::zero()))
            }
        }
    }
}

/// Applies `mode` unconditionally.
pub fn correct(a: &Assessment, mode: CorrectionMode) -> Result<CorrectionResult> {
    correct_with(a, mode, false)
}

/// Like [`correct`], but returns the input unchanged when it already passes the mode's target check.
pub fn correct_if_inconsistent(a: &Assessment, mode: CorrectionMode) -> Result<CorrectionResult> {
    correct_with(a, mode, true)
}

fn correct_with(a: &Assessment, mode: CorrectionMode, only_if_inconsistent: bool) -> Result<CorrectionResult> {
    if a.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let low = a.to_lower();
    let ec_zero = extension::ec_at_zero(&low)?;
    let report_before = classify(a)?;
    if only_if_inconsistent && passes_target(&report_before, mode) {
        return Ok(CorrectionResult {
            mode,
            original: a.clone(),
            corrected: a.clone(),
            ec_zero,
            applied: false,
            report_after: report_before.clone(),
            report_before,
        });
    }
    let fixed = corrected_lower(&low, mode, &ec_zero)?;
    let corrected = match a.orientation() {
        Orientation::Lower => fixed,
        Orientation::Upper => fixed.conjugate(),
    };
    let report_after = classify(&corrected)?;
    Ok(CorrectionResult { mode, original: a.clone(), corrected, ec_zero, applied: true, report_before, report_after })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};
    use crate::space::Space;

    fn ab() -> Space {
        Space::new(["a", "b"]).unwrap()
    }

    fn r1() -> Assessment {
        let s = ab();
        Assessment::lower(&s, vec![Entry::new("1_a", Gamble::indicator(&s, &[0]).unwrap(), rat(3, 5))]).unwrap()
    }

    fn r2() -> Assessment {
        let s = ab();
        Assessment::lower(
            &s,
            vec![
                Entry::new("1_a", Gamble::indicator(&s, &[0]).unwrap(), rat(7, 10)),
                Entry::new("1_b", Gamble::indicator(&s, &[1]).unwrap(), rat(7, 10)),
            ],
        )
        .unwrap()
    }

    fn values(a: &Assessment) -> Vec<(String, Rational)> {
        a.entries().iter().map(|e| (e.id.clone(), e.value.clone())).collect()
    }

    #[test]
    fn r2_shift() {
        let res = correct(&r2(), CorrectionMode::Shift).unwrap();
        assert_eq!(res.ec_zero, rat(1, 5));
        assert_eq!(values(&res.corrected), vec![("1_a".into(), rat(1, 2)), ("1_b".into(), rat(1, 2))]);
        assert!(!res.report_before.avoids_sure_loss);
        assert!(res.report_after.avoids_sure_loss);
    }

    #[test]
    fn r2_centered() {
        let res = correct(&r2(), CorrectionMode::Centered).unwrap();
        assert_eq!(
            values(&res.corrected),
            vec![("1_a".into(), rat(1, 2)), ("1_b".into(), rat(1, 2)), ("zero".into(), int(0))]
        );
        assert_eq!(res.report_after.centered_convex, Some(true));
    }

    #[test]
    fn r1_convex_is_idempotent() {
        let res = correct(&r1(), CorrectionMode::Convex).unwrap();
        assert_eq!(res.corrected, r1());
    }

    #[test]
    fn r1_shift_and_centered_inflate() {
        let res = correct(&r1(), CorrectionMode::Shift).unwrap();
        assert_eq!(values(&res.corrected), vec![("1_a".into(), int(1))]);
        let res = correct(&r1(), CorrectionMode::Centered).unwrap();
        assert_eq!(values(&res.corrected), vec![("1_a".into(), int(1)), ("zero".into(), int(0))]);
        let res = correct_if_inconsistent(&r1(), CorrectionMode::Centered).unwrap();
        assert!(!res.applied);
        assert_eq!(res.corrected, r1());
    }

    #[test]
    fn upper_inputs_round_trip_through_conjugation() {
        let up = r2().conjugate().conjugate().conjugate();
        let res = correct(&up, CorrectionMode::Shift).unwrap();
        assert_eq!(res.corrected.orientation(), Orientation::Upper);
        assert_eq!(res.corrected, correct(&r2(), CorrectionMode::Shift).unwrap().corrected.conjugate());
    }

    #[test]
    fn zero_id_avoids_collisions() {
        let s = ab();
        let a = Assessment::lower(&s, vec![Entry::new("zero", Gamble::indicator(&s, &[0]).unwrap(), rat(7, 10))])
            .unwrap();
        let res = correct(&a, CorrectionMode::Centered).unwrap();
        assert!(res.corrected.get("zero_1").unwrap().gamble.is_zero());
    }
}
