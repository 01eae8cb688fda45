//! Feasibility of conjunctions of linear constraints with at most two
//! unknowns each, all coefficients +1: `x ≥ c`, `x = c`, `x + y ≥ c`,
//! `x + y = c` (equations being pairs of inequalities).
//!
//! Solving substitutes a negated companion for every variable, which turns
//! each constraint into a difference constraint between the two copies; the
//! system is feasible exactly when the resulting constraint graph has no
//! negative cycle, decided by iterative relaxation with exact rationals.
//! A satisfying assignment is read off the relaxation potentials as
//! `x = (d(x⁺) − d(x⁻)) / 2`.
//!
//! [`eliminate_oracle`] is an independent Fourier–Motzkin elimination used
//! only for cross-checking; it shares no code with the graph solver.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::value::Rat;

/// Variable id within a [`TwoVarSystem`].
pub type VarId = usize;

/// One constraint; coefficients are implicitly +1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoVarConstraint {
    /// `var ≥ bound`
    LowerBound { var: VarId, bound: Rat },
    /// `var = value`
    Equal { var: VarId, value: Rat },
    /// `x + y ≥ bound`
    SumLowerBound { x: VarId, y: VarId, bound: Rat },
    /// `x + y = value`
    SumEqual { x: VarId, y: VarId, value: Rat },
}

impl TwoVarConstraint {
    fn vars(&self) -> (VarId, Option<VarId>) {
        match self {
            TwoVarConstraint::LowerBound { var, .. } | TwoVarConstraint::Equal { var, .. } => (*var, None),
            TwoVarConstraint::SumLowerBound { x, y, .. } | TwoVarConstraint::SumEqual { x, y, .. } => {
                (*x, Some(*y))
            }
        }
    }
}

/// A conjunction of [`TwoVarConstraint`]s over variables `0..num_vars`.
#[derive(Debug, Clone, Default)]
pub struct TwoVarSystem {
    num_vars: usize,
    constraints: Vec<TwoVarConstraint>,
}

impl TwoVarSystem {
    pub fn new(num_vars: usize) -> Self {
        TwoVarSystem { num_vars, constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[TwoVarConstraint] {
        &self.constraints
    }

    pub fn push(&mut self, c: TwoVarConstraint) {
        self.constraints.push(c);
    }

    fn validate(&self) -> Result<()> {
        for c in &self.constraints {
            let (a, b) = c.vars();
            for v in std::iter::once(a).chain(b) {
                if v >= self.num_vars {
                    return Err(Error::BadVariable { var: v, num_vars: self.num_vars });
                }
            }
        }
        Ok(())
    }

    /// Exact check that an assignment satisfies every constraint. Kept as an
    /// independent evaluator so tests can re-check solver output.
    pub fn satisfied_by(&self, assignment: &[Rat]) -> Result<bool> {
        self.validate()?;
        if assignment.len() != self.num_vars {
            return Err(Error::BadVariable { var: assignment.len(), num_vars: self.num_vars });
        }
        Ok(self.constraints.iter().all(|c| match c {
            TwoVarConstraint::LowerBound { var, bound } => assignment[*var] >= *bound,
            TwoVarConstraint::Equal { var, value } => assignment[*var] == *value,
            TwoVarConstraint::SumLowerBound { x, y, bound } => &assignment[*x] + &assignment[*y] >= *bound,
            TwoVarConstraint::SumEqual { x, y, value } => &assignment[*x] + &assignment[*y] == *value,
        }))
    }
}

/// Decide feasibility and extract an exact satisfying assignment, or return
/// `None` when the system is infeasible.
pub fn solve_two_var(sys: &TwoVarSystem) -> Result<Option<Vec<Rat>>> {
    sys.validate()?;
    if sys.num_vars == 0 {
        // only zero-variable constraints are possible; none exist by typing
        return Ok(Some(Vec::new()));
    }
    // node 2v is x_v, node 2v+1 is the negated copy -x_v
    let pos = |v: VarId| 2 * v;
    let neg = |v: VarId| 2 * v + 1;
    let two = rat_two();
    let mut edges: Vec<(usize, usize, Rat)> = Vec::with_capacity(2 * sys.constraints.len());
    for c in &sys.constraints {
        match c {
            TwoVarConstraint::LowerBound { var, bound } => {
                edges.push((pos(*var), neg(*var), -bound * &two));
            }
            TwoVarConstraint::Equal { var, value } => {
                edges.push((pos(*var), neg(*var), -value * &two));
                edges.push((neg(*var), pos(*var), value * &two));
            }
            TwoVarConstraint::SumLowerBound { x, y, bound } => {
                if x == y {
                    edges.push((pos(*x), neg(*x), -bound.clone()));
                } else {
                    edges.push((pos(*y), neg(*x), -bound.clone()));
                    edges.push((pos(*x), neg(*y), -bound.clone()));
                }
            }
            TwoVarConstraint::SumEqual { x, y, value } => {
                if x == y {
                    edges.push((pos(*x), neg(*x), -value.clone()));
                    edges.push((neg(*x), pos(*x), value.clone()));
                } else {
                    edges.push((pos(*y), neg(*x), -value.clone()));
                    edges.push((pos(*x), neg(*y), -value.clone()));
                    edges.push((neg(*y), pos(*x), value.clone()));
                    edges.push((neg(*x), pos(*y), value.clone()));
                }
            }
        }
    }
    let n_nodes = 2 * sys.num_vars;
    // Bellman-Ford from a virtual source with zero edges to every node
    let mut dist = vec![Rat::zero(); n_nodes];
    for round in 0..=n_nodes {
        let mut changed = false;
        for (u, v, w) in &edges {
            let cand = &dist[*u] + w;
            if cand < dist[*v] {
                if round == n_nodes {
                    return Ok(None); // negative cycle: infeasible
                }
                dist[*v] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let assignment: Vec<Rat> = (0..sys.num_vars)
        .map(|v| (&dist[pos(v)] - &dist[neg(v)]) / &two)
        .collect();
    debug_assert!(sys.satisfied_by(&assignment)?);
    Ok(Some(assignment))
}

fn rat_two() -> Rat {
    crate::value::rat(2)
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin elimination oracle (test cross-check only)
// ---------------------------------------------------------------------------

/// Inequality `s1*v1 + s2*v2 >= c` with signs ±1; one or zero terms allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct FmForm {
    // sorted list of (var, sign), at most two entries, no duplicate vars
    terms: Vec<(VarId, i8)>,
}

/// Normalize one `≥` row (combine duplicate variables, halve ±2
/// coefficients, keep the strongest bound per form). Returns false when a
/// zero-term row `0 ≥ c` with positive c appears.
fn fm_add(rows: &mut HashMap<FmForm, Rat>, terms: Vec<(VarId, i8)>, c: Rat) -> bool {
    let mut combined: Vec<(VarId, i8)> = Vec::new();
    let mut scale_half = false;
    let mut ts = terms;
    ts.sort_by_key(|t| t.0);
    let mut idx = 0;
    while idx < ts.len() {
        if idx + 1 < ts.len() && ts[idx].0 == ts[idx + 1].0 {
            let s = ts[idx].1 + ts[idx + 1].1;
            if s != 0 {
                // coefficient ±2: halve the whole inequality
                combined.push((ts[idx].0, s / 2));
                scale_half = true;
            }
            idx += 2;
        } else {
            combined.push(ts[idx]);
            idx += 1;
        }
    }
    let c = if scale_half { c / rat_two() } else { c };
    if combined.is_empty() {
        return c <= Rat::zero(); // 0 >= c
    }
    let form = FmForm { terms: combined };
    match rows.get_mut(&form) {
        Some(existing) => {
            if c > *existing {
                *existing = c;
            }
        }
        None => {
            rows.insert(form, c);
        }
    }
    true
}

/// Decide feasibility by Fourier-Motzkin variable elimination. Independent
/// of [`solve_two_var`]; intended for small systems (≤ 12 variables or so).
pub fn eliminate_oracle(sys: &TwoVarSystem) -> Result<bool> {
    sys.validate()?;
    // normalize everything to >=-inequalities with ±1 coefficients
    let mut rows: HashMap<FmForm, Rat> = HashMap::new();
    for c in &sys.constraints {
        let ok = match c {
            TwoVarConstraint::LowerBound { var, bound } => fm_add(&mut rows, vec![(*var, 1)], bound.clone()),
            TwoVarConstraint::Equal { var, value } => {
                fm_add(&mut rows, vec![(*var, 1)], value.clone())
                    && fm_add(&mut rows, vec![(*var, -1)], -value.clone())
            }
            TwoVarConstraint::SumLowerBound { x, y, bound } => {
                fm_add(&mut rows, vec![(*x, 1), (*y, 1)], bound.clone())
            }
            TwoVarConstraint::SumEqual { x, y, value } => {
                fm_add(&mut rows, vec![(*x, 1), (*y, 1)], value.clone())
                    && fm_add(&mut rows, vec![(*x, -1), (*y, -1)], -value.clone())
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    for v in 0..sys.num_vars {
        let drained: Vec<(FmForm, Rat)> = rows.drain().collect();
        let mut with_pos = Vec::new();
        let mut with_neg = Vec::new();
        for (f, c) in drained {
            if f.terms.iter().any(|&(var, s)| var == v && s == 1) {
                with_pos.push((f, c));
            } else if f.terms.iter().any(|&(var, s)| var == v && s == -1) {
                with_neg.push((f, c));
            } else {
                rows.insert(f, c);
            }
        }
        for (fp, cp) in &with_pos {
            for (fn_, cn) in &with_neg {
                let terms: Vec<(VarId, i8)> = fp
                    .terms
                    .iter()
                    .chain(fn_.terms.iter())
                    .filter(|&&(var, _)| var != v)
                    .cloned()
                    .collect();
                if !fm_add(&mut rows, terms, cp + cn) {
                    return Ok(false);
                }
            }
        }
        // constraints mentioning v in only one direction are vacuously
        // satisfiable in v and are dropped
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::rat;

    fn lb(var: VarId, b: i64) -> TwoVarConstraint {
        TwoVarConstraint::LowerBound { var, bound: rat(b) }
    }
    fn eq(var: VarId, v: i64) -> TwoVarConstraint {
        TwoVarConstraint::Equal { var, value: rat(v) }
    }
    fn slb(x: VarId, y: VarId, b: i64) -> TwoVarConstraint {
        TwoVarConstraint::SumLowerBound { x, y, bound: rat(b) }
    }
    fn seq(x: VarId, y: VarId, v: i64) -> TwoVarConstraint {
        TwoVarConstraint::SumEqual { x, y, value: rat(v) }
    }

    fn sys(n: usize, cs: Vec<TwoVarConstraint>) -> TwoVarSystem {
        let mut s = TwoVarSystem::new(n);
        for c in cs {
            s.push(c);
        }
        s
    }

    #[test]
    fn feasible_sum_equation() {
        let s = sys(2, vec![lb(0, 0), lb(1, 0), seq(0, 1, 3)]);
        let a = solve_two_var(&s).unwrap().expect("feasible");
        assert!(s.satisfied_by(&a).unwrap());
        assert!(eliminate_oracle(&s).unwrap());
    }

    #[test]
    fn infeasible_sum_equation() {
        let s = sys(2, vec![lb(0, 1), lb(1, 1), seq(0, 1, 0)]);
        assert!(solve_two_var(&s).unwrap().is_none());
        assert!(!eliminate_oracle(&s).unwrap());
    }

    #[test]
    fn infeasible_fixed_values() {
        let s = sys(2, vec![slb(0, 1, 5), eq(0, 2), eq(1, 2)]);
        assert!(solve_two_var(&s).unwrap().is_none());
        assert!(!eliminate_oracle(&s).unwrap());
    }

    #[test]
    fn empty_system_is_feasible() {
        let s = TwoVarSystem::new(0);
        assert_eq!(solve_two_var(&s).unwrap(), Some(vec![]));
        assert!(eliminate_oracle(&s).unwrap());
    }

    #[test]
    fn contradictory_equalities() {
        let s = sys(1, vec![eq(0, 1), eq(0, 2)]);
        assert!(solve_two_var(&s).unwrap().is_none());
        assert!(!eliminate_oracle(&s).unwrap());
    }

    #[test]
    fn same_variable_sum() {
        // x + x = 3 means x = 3/2
        let s = sys(1, vec![seq(0, 0, 3)]);
        let a = solve_two_var(&s).unwrap().expect("feasible");
        assert_eq!(a[0], rat(3) / rat(2));
    }

    #[test]
    fn bad_variable_id() {
        let s = sys(1, vec![lb(3, 0)]);
        assert!(matches!(solve_two_var(&s), Err(Error::BadVariable { .. })));
    }

    #[test]
    fn feasibility_invariant_under_constraint_order() {
        let cs = vec![lb(0, 0), seq(0, 1, 4), slb(1, 2, 3), eq(2, -1), slb(0, 2, -1)];
        let base = solve_two_var(&sys(3, cs.clone())).unwrap().is_some();
        let mut rev = cs.clone();
        rev.reverse();
        assert_eq!(solve_two_var(&sys(3, rev)).unwrap().is_some(), base);
        let mut rot = cs;
        rot.rotate_left(2);
        assert_eq!(solve_two_var(&sys(3, rot)).unwrap().is_some(), base);
    }
}
