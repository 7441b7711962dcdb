//! Exact rational linear programming.
//!
//! Dense two-phase tableau simplex with Bland's rule. Every answer carries a
//! certificate that [`verify_certificate`] re-checks from scratch:
//!
//! * optimal: a primal point and row multipliers whose dual objective equals
//!   the primal objective exactly;
//! * infeasible: Farkas multipliers proving no point satisfies the rows
//!   within the variable bounds;
//! * unbounded: a feasible point plus an improving recession ray.
//!
//! Dual sign convention, for a maximization: `≤` rows carry multipliers
//! `≥ 0`, `≥` rows `≤ 0`, `=` rows are free. A minimization flips every sign.
//! Variable bounds carry no explicit multipliers; their contribution is read
//! off the reduced costs `c − Aᵀy`. Farkas multipliers always use the
//! maximization convention.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::number::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bounds {
    pub fn free() -> Self {
        Self { lower: None, upper: None }
    }

    pub fn non_negative() -> Self {
        Self { lower: Some(Rational::zero()), upper: None }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Self { lower: Some(lower), upper: Some(upper) }
    }

    fn contains(&self, x: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| x >= l) && self.upper.as_ref().is_none_or(|u| x <= u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    fn holds(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coefficients, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub direction: Direction,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

impl LinearProgram {
    /// A program over `objective.len()` non-negative variables and no rows.
    pub fn new(direction: Direction, objective: Vec<Rational>) -> Self {
        let bounds = vec![Bounds::non_negative(); objective.len()];
        Self { direction, objective, constraints: Vec::new(), bounds }
    }

    pub fn maximize(objective: Vec<Rational>) -> Self {
        Self::new(Direction::Maximize, objective)
    }

    pub fn minimize(objective: Vec<Rational>) -> Self {
        Self::new(Direction::Minimize, objective)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_bounds(mut self, var: usize, bounds: Bounds) -> Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn add_constraint(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coefficients, relation, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedProgram(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(Error::MalformedProgram(format!(
                    "row {i} has {} coefficients, expected {n}",
                    c.coefficients.len()
                )));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l > u {
                    return Err(Error::MalformedProgram(format!("variable {j} has lower bound above upper bound")));
                }
            }
        }
        Ok(())
    }

    /// Whether `x` satisfies every row and bound.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.bounds.iter().zip(x).all(|(b, v)| b.contains(v))
            && self.constraints.iter().all(|c| c.holds(x))
    }

    fn sense(&self) -> Rational {
        match self.direction {
            Direction::Maximize => crate::number::int(1),
            Direction::Minimize => crate::number::int(-1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value; `None` unless optimal.
    pub value: Option<Rational>,
    /// Optimal point, or a feasible point when unbounded; empty when infeasible.
    pub primal: Vec<Rational>,
    /// Row multipliers when optimal, Farkas multipliers when infeasible.
    pub dual: Vec<Rational>,
    /// Improving recession direction when unbounded.
    pub ray: Option<Vec<Rational>>,
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How an original variable is expressed through non-negative columns.
enum VarMap {
    Shift { col: usize, lower: Rational },
    Flip { col: usize, upper: Rational },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    reduced: Vec<Rational>,
    width: usize,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width]
    }

    fn price(&mut self, cost: &[Rational]) {
        let mut reduced = cost.to_vec();
        reduced.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if cost[b].is_zero() {
                continue;
            }
            for (d, t) in reduced.iter_mut().zip(row) {
                *d -= &cost[b] * t;
            }
        }
        self.reduced = reduced;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !self.reduced[e].is_zero() {
            let f = self.reduced[e].clone();
            for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = e;
    }

    /// Bland's rule: lowest-index improving column, lowest-index leaving variable on ties.
    fn run(&mut self, allowed: &[bool]) -> Outcome {
        loop {
            let entering = (0..self.width).find(|&j| allowed[j] && self.reduced[j].is_positive());
            let Some(e) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[e];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Outcome::Unbounded(e),
                Some((r, _)) => self.pivot(r, e),
            }
        }
    }

    /// `c_Bᵀ B⁻¹`, read from the columns that formed the initial identity.
    fn multipliers(&self, cost: &[Rational], unit_cols: &[usize]) -> Vec<Rational> {
        unit_cols
            .iter()
            .map(|&u| self.rows.iter().zip(&self.basis).map(|(row, &b)| &cost[b] * &row[u]).sum())
            .collect()
    }

    fn point(&self) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); self.width];
        for (r, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs(r).clone();
        }
        z
    }
}

/// Solves `lp` exactly. Deterministic: equal inputs give identical solutions.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let sense = lp.sense();
    let cost_max: Vec<Rational> = lp.objective.iter().map(|c| c * &sense).collect();

    // Variable substitution into non-negative columns.
    let mut maps = Vec::with_capacity(n);
    let mut structural = 0usize;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for b in &lp.bounds {
        let map = match (&b.lower, &b.upper) {
            (Some(l), Some(u)) => {
                bound_rows.push((structural, u - l));
                VarMap::Shift { col: structural, lower: l.clone() }
            }
            (Some(l), None) => VarMap::Shift { col: structural, lower: l.clone() },
            (None, Some(u)) => VarMap::Flip { col: structural, upper: u.clone() },
            (None, None) => {
                structural += 1;
                VarMap::Split { pos: structural - 1, neg: structural }
            }
        };
        structural += 1;
        maps.push(map);
    }

    // Rows over structural columns.
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        let mut coef = vec![Rational::zero(); structural];
        let mut rhs = c.rhs.clone();
        for (a, map) in c.coefficients.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            match map {
                VarMap::Shift { col, lower } => {
                    coef[*col] += a;
                    rhs -= a * lower;
                }
                VarMap::Flip { col, upper } => {
                    coef[*col] -= a;
                    rhs -= a * upper;
                }
                VarMap::Split { pos, neg } => {
                    coef[*pos] += a;
                    coef[*neg] -= a;
                }
            }
        }
        rows.push((coef, c.relation, rhs));
    }
    for (col, width) in &bound_rows {
        let mut coef = vec![Rational::zero(); structural];
        coef[*col] = crate::number::int(1);
        rows.push((coef, Relation::Le, width.clone()));
    }

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let mut flipped = vec![false; m];
    let mut slack_of = vec![None; m];
    let mut next = structural;
    for (i, row) in rows.iter().enumerate() {
        if row.1 != Relation::Eq {
            slack_of[i] = Some(next);
            next += 1;
        }
        flipped[i] = row.2.is_negative();
    }
    debug_assert_eq!(next, structural + slack_count);
    // Rows whose slack enters the identity with +1 need no artificial.
    let mut unit_cols = vec![0usize; m];
    let mut artificial_of = vec![None; m];
    for (i, row) in rows.iter().enumerate() {
        let slack_sign_positive = match row.1 {
            Relation::Le => !flipped[i],
            Relation::Ge => flipped[i],
            Relation::Eq => false,
        };
        if slack_sign_positive {
            unit_cols[i] = slack_of[i].expect("inequality row has a slack");
        } else {
            artificial_of[i] = Some(next);
            unit_cols[i] = next;
            next += 1;
        }
    }
    let width = next;

    let mut tableau_rows = Vec::with_capacity(m);
    for (i, (coef, rel, rhs)) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); width + 1];
        row[..structural].clone_from_slice(coef);
        if let Some(s) = slack_of[i] {
            row[s] = match rel {
                Relation::Le => crate::number::int(1),
                _ => crate::number::int(-1),
            };
        }
        row[width] = rhs.clone();
        if flipped[i] {
            for v in row.iter_mut() {
                *v = -&*v;
            }
        }
        if let Some(a) = artificial_of[i] {
            row[a] = crate::number::int(1);
        }
        tableau_rows.push(row);
    }
    let is_artificial: Vec<bool> = {
        let mut v = vec![false; width];
        for a in artificial_of.iter().flatten() {
            v[*a] = true;
        }
        v
    };
    let mut t = Tableau { rows: tableau_rows, basis: unit_cols.clone(), reduced: Vec::new(), width };
    let row_sign = |i: usize, y: Rational| if flipped[i] { -y } else { y };

    // Phase 1: drive the artificials to zero.
    if is_artificial.iter().any(|&a| a) {
        let phase1: Vec<Rational> = is_artificial
            .iter()
            .map(|&a| if a { crate::number::int(-1) } else { Rational::zero() })
            .collect();
        t.price(&phase1);
        let everything = vec![true; width];
        match t.run(&everything) {
            Outcome::Optimal => {}
            Outcome::Unbounded(_) => {
                return Err(Error::Internal("phase one cannot be unbounded".into()));
            }
        }
        let infeasibility: Rational = (0..m).map(|r| &phase1[t.basis[r]] * t.rhs(r)).sum();
        if infeasibility.is_negative() {
            let y = t.multipliers(&phase1, &unit_cols);
            let farkas = (0..lp.constraints.len()).map(|i| row_sign(i, y[i].clone())).collect();
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: None,
                primal: Vec::new(),
                dual: farkas,
                ray: None,
            });
        }
        // Pivot zero-level artificials out wherever a real column can replace them.
        for r in 0..m {
            if !is_artificial[t.basis[r]] {
                continue;
            }
            if let Some(j) = (0..width).find(|&j| !is_artificial[j] && !t.rows[r][j].is_zero()) {
                t.pivot(r, j);
            }
        }
    }

    // Phase 2.
    let mut cost = vec![Rational::zero(); width];
    let mut offset = Rational::zero();
    for (c, map) in cost_max.iter().zip(&maps) {
        match map {
            VarMap::Shift { col, lower } => {
                cost[*col] = c.clone();
                offset += c * lower;
            }
            VarMap::Flip { col, upper } => {
                cost[*col] = -c;
                offset += c * upper;
            }
            VarMap::Split { pos, neg } => {
                cost[*pos] = c.clone();
                cost[*neg] = -c;
            }
        }
    }
    t.price(&cost);
    let allowed: Vec<bool> = is_artificial.iter().map(|a| !a).collect();
    let outcome = t.run(&allowed);
    let z = t.point();
    let recover = |z: &[Rational], with_offset: bool| -> Vec<Rational> {
        maps.iter()
            .map(|map| match map {
                VarMap::Shift { col, lower } => {
                    if with_offset {
                        lower + &z[*col]
                    } else {
                        z[*col].clone()
                    }
                }
                VarMap::Flip { col, upper } => {
                    if with_offset {
                        upper - &z[*col]
                    } else {
                        -&z[*col]
                    }
                }
                VarMap::Split { pos, neg } => &z[*pos] - &z[*neg],
            })
            .collect()
    };
    let primal = recover(&z, true);
    match outcome {
        Outcome::Unbounded(e) => {
            let mut dz = vec![Rational::zero(); width];
            dz[e] = crate::number::int(1);
            for (r, &b) in t.basis.iter().enumerate() {
                dz[b] = -&t.rows[r][e];
            }
            Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: None,
                primal,
                dual: Vec::new(),
                ray: Some(recover(&dz, false)),
            })
        }
        Outcome::Optimal => {
            let value_max: Rational = (0..m).map(|r| &cost[t.basis[r]] * t.rhs(r)).sum::<Rational>() + offset;
            let y = t.multipliers(&cost, &unit_cols);
            let dual = (0..lp.constraints.len()).map(|i| row_sign(i, y[i].clone()) * &sense).collect();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                value: Some(value_max * &sense),
                primal,
                dual,
                ray: None,
            })
        }
    }
}

/// Multiplier `y` respects the maximization sign convention for each row.
fn signs_ok(lp: &LinearProgram, y: &[Rational]) -> bool {
    lp.constraints.iter().zip(y).all(|(c, v)| match c.relation {
        Relation::Le => !v.is_negative(),
        Relation::Ge => !v.is_positive(),
        Relation::Eq => true,
    })
}

/// `sup { w·x : x within bounds }`, or `None` if unbounded above.
fn box_sup(bounds: &[Bounds], w: &[Rational]) -> Option<Rational> {
    let mut total = Rational::zero();
    for (b, wj) in bounds.iter().zip(w) {
        if wj.is_positive() {
            total += wj * b.upper.as_ref()?;
        } else if wj.is_negative() {
            total += wj * b.lower.as_ref()?;
        }
    }
    Some(total)
}

fn transpose_times(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); lp.num_vars()];
    for (c, yi) in lp.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (wj, a) in w.iter_mut().zip(&c.coefficients) {
            *wj += yi * a;
        }
    }
    w
}

/// Re-checks the certificate attached to `sol` against `lp` without trusting
/// the solver: feasibility by substitution, dual feasibility by sign and
/// reduced-cost checks, and exact equality of the two objective values.
pub fn verify_certificate(lp: &LinearProgram, sol: &LpSolution) -> bool {
    if lp.validate().is_err() {
        return false;
    }
    let sense = lp.sense();
    match sol.status {
        LpStatus::Optimal => {
            let Some(value) = &sol.value else { return false };
            if !lp.is_feasible(&sol.primal) || &dot(&lp.objective, &sol.primal) != value {
                return false;
            }
            if sol.dual.len() != lp.constraints.len() {
                return false;
            }
            let y: Vec<Rational> = sol.dual.iter().map(|v| v * &sense).collect();
            if !signs_ok(lp, &y) {
                return false;
            }
            let c: Vec<Rational> = lp.objective.iter().map(|v| v * &sense).collect();
            let aty = transpose_times(lp, &y);
            let reduced: Vec<Rational> = c.iter().zip(&aty).map(|(a, b)| a - b).collect();
            let rhs: Vec<Rational> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
            match box_sup(&lp.bounds, &reduced) {
                Some(extra) => (dot(&rhs, &y) + extra) * &sense == *value,
                None => false,
            }
        }
        LpStatus::Infeasible => {
            if sol.dual.len() != lp.constraints.len() || !signs_ok(lp, &sol.dual) {
                return false;
            }
            // y·(Ax − b) ≤ 0 on the feasible set, so inf over the box of y·Ax > y·b is a contradiction.
            let w: Vec<Rational> = transpose_times(lp, &sol.dual).into_iter().map(|v| -v).collect();
            let rhs: Vec<Rational> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
            match box_sup(&lp.bounds, &w) {
                Some(neg_inf) => -neg_inf > dot(&rhs, &sol.dual),
                None => false,
            }
        }
        LpStatus::Unbounded => {
            let Some(ray) = &sol.ray else { return false };
            if ray.len() != lp.num_vars() || !lp.is_feasible(&sol.primal) {
                return false;
            }
            if !(dot(&lp.objective, ray) * &sense).is_positive() {
                return false;
            }
            let rows_ok = lp.constraints.iter().all(|c| {
                let d = dot(&c.coefficients, ray);
                match c.relation {
                    Relation::Le => !d.is_positive(),
                    Relation::Ge => !d.is_negative(),
                    Relation::Eq => d.is_zero(),
                }
            });
            let bounds_ok = lp.bounds.iter().zip(ray).all(|(b, r)| {
                (b.lower.is_none() || !r.is_negative()) && (b.upper.is_none() || !r.is_positive())
            });
            rows_ok && bounds_ok
        }
    }
}
