//! Exhaustive exponential-time factor-rank decision for tiny matrices,
//! used as ground truth by every other module.
//!
//! A factorization B ⊗ C = A is witnessed by a *winner pattern*: for each
//! cell (i, j), the inner index τ attaining `min_τ (B[i][τ] + C[τ][j])`.
//! For a fixed pattern the entries must satisfy
//! `B[i][τ(i,j)] + C[τ(i,j)][j] = A[i][j]` together with
//! `B[i][τ] + C[τ][j] ≥ A[i][j]` for every τ, which is a two-unknowns-per-
//! constraint system. Patterns are enumerated cell by cell in row-major
//! order as a depth-first search; after substituting the negated copy of C
//! the partial system is a difference-constraint graph, so a partial
//! pattern is pruned the moment its graph acquires a negative cycle. At a
//! completed pattern the full system is handed to
//! [`solve_two_var`](crate::constraints::solve_two_var) for the witness.
//!
//! The verdict is deterministic; the witness content depends on search
//! order. Budget violations are loud errors, never wrong verdicts.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::constraints::{solve_two_var, TwoVarConstraint, TwoVarSystem};
use crate::error::{Error, Result};
use crate::matrix::{verify_product, Factorization, TropMatrix};
use crate::value::{Rat, TropValue};

/// Default winner-pattern budget: `k^(m·n)` must not exceed this.
pub const DEFAULT_PATTERN_BUDGET: u64 = 10_000_000;

/// Decide factor rank ≤ k with the default budget; on success returns a
/// verified witness factorization with inner dimension k.
pub fn factor_rank_le_k(a: &TropMatrix, k: usize) -> Result<Option<Factorization>> {
    factor_rank_le_k_budgeted(a, k, DEFAULT_PATTERN_BUDGET)
}

/// Decide factor rank ≤ k, refusing to start when the pattern space
/// `k^(m·n)` exceeds `budget`.
pub fn factor_rank_le_k_budgeted(a: &TropMatrix, k: usize, budget: u64) -> Result<Option<Factorization>> {
    if k == 0 {
        return Err(Error::IndexOutOfRange { what: "inner dimension k", value: 0, min: 1, max: i64::MAX });
    }
    if let Some((i, j)) = a.find_infinite() {
        return Err(Error::InfiniteEntry { row: i, col: j, context: "exhaustive factor-rank search" });
    }
    let patterns = BigUint::from(k).pow((a.rows() * a.cols()) as u32);
    if patterns > BigUint::from(budget) {
        return Err(Error::BudgetExceeded { patterns: patterns.to_string(), budget });
    }
    let mut search = PatternSearch::new(a, k);
    Ok(match search.run() {
        Some(pattern) => Some(witness_for_pattern(a, k, &pattern)?),
        None => None,
    })
}

/// Least k with factor rank ≤ k (always ≤ min(m, n)).
pub fn factor_rank_exact(a: &TropMatrix) -> Result<usize> {
    factor_rank_exact_budgeted(a, DEFAULT_PATTERN_BUDGET)
}

/// Same as [`factor_rank_exact`] with an explicit pattern budget per k.
pub fn factor_rank_exact_budgeted(a: &TropMatrix, budget: u64) -> Result<usize> {
    for k in 1..=a.rows().min(a.cols()) {
        if factor_rank_le_k_budgeted(a, k, budget)?.is_some() {
            return Ok(k);
        }
    }
    Err(Error::Internal { detail: "factor rank above min(m,n), which is impossible".into() })
}

/// Build the spec'd two-variable system for a complete winner pattern and
/// extract the witness through the general solver.
fn witness_for_pattern(a: &TropMatrix, k: usize, pattern: &[usize]) -> Result<Factorization> {
    let (m, n) = (a.rows(), a.cols());
    let b_var = |i: usize, t: usize| i * k + t;
    let c_var = |t: usize, j: usize| m * k + t * n + j;
    let mut sys = TwoVarSystem::new(m * k + k * n);
    let cell = |i: usize, j: usize| a.get(i, j).finite().expect("finite checked").clone();
    for i in 0..m {
        for j in 0..n {
            let t = pattern[i * n + j];
            sys.push(TwoVarConstraint::SumEqual { x: b_var(i, t), y: c_var(t, j), value: cell(i, j) });
            for tau in 0..k {
                sys.push(TwoVarConstraint::SumLowerBound {
                    x: b_var(i, tau),
                    y: c_var(tau, j),
                    bound: cell(i, j),
                });
            }
        }
    }
    let assignment = solve_two_var(&sys)?.ok_or(Error::Internal {
        detail: "pattern accepted by incremental search but rejected by the solver".into(),
    })?;
    let left = TropMatrix::from_fn(m, k, |i, t| TropValue::Finite(assignment[b_var(i, t)].clone()))?;
    let right = TropMatrix::from_fn(k, n, |t, j| TropValue::Finite(assignment[c_var(t, j)].clone()))?;
    let f = Factorization::new(left, right)?;
    if !verify_product(a, &f)? {
        return Err(Error::Internal { detail: "oracle witness failed product verification".into() });
    }
    Ok(f)
}

/// Difference-constraint graph over nodes b(i,τ) and g(τ,j) = −C[τ][j].
/// Base edges encode the pattern-independent inequalities; one equation
/// edge per decided cell is pushed and popped as the search moves.
struct PatternSearch<'a> {
    a: &'a TropMatrix,
    k: usize,
    m: usize,
    n: usize,
    cells: Vec<Rat>,
    out: Vec<Vec<(usize, Rat)>>,
    dist: Vec<Rat>,
    /// stack of (g-node the equation edge hangs off, undo log of potentials)
    trail: Vec<(usize, Vec<(usize, Rat)>)>,
    pattern: Vec<usize>,
    row_major_bias: bool,
}

impl<'a> PatternSearch<'a> {
    fn new(a: &'a TropMatrix, k: usize) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let n_nodes = m * k + k * n;
        let cells: Vec<Rat> = (0..m * n)
            .map(|p| a.get(p / n, p % n).finite().expect("finite checked").clone())
            .collect();
        let mut out: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); n_nodes];
        let mut dist = vec![Rat::zero(); n_nodes];
        // base inequality edges b(i,t) -> g(t,j) of weight -A[i][j]
        for i in 0..m {
            for t in 0..k {
                for j in 0..n {
                    out[i * k + t].push((m * k + t * n + j, -&cells[i * n + j]));
                }
            }
        }
        // settle base potentials: g-nodes have no outgoing base edges
        for t in 0..k {
            for j in 0..n {
                let g = m * k + t * n + j;
                for i in 0..m {
                    let cand = -&cells[i * n + j];
                    if cand < dist[g] {
                        dist[g] = cand;
                    }
                }
            }
        }
        PatternSearch {
            a,
            k,
            m,
            n,
            cells,
            out,
            dist,
            trail: Vec::new(),
            pattern: vec![0; m * n],
            row_major_bias: m <= n,
        }
    }

    /// Depth-first search over cells; returns the first feasible pattern.
    fn run(&mut self) -> Option<Vec<usize>> {
        if self.descend(0) {
            Some(self.pattern.clone())
        } else {
            None
        }
    }

    fn descend(&mut self, cell: usize) -> bool {
        if cell == self.m * self.n {
            return true;
        }
        let (i, j) = (cell / self.n, cell % self.n);
        // try winners in an order that reaches the always-feasible selector
        // pattern first when k >= min(m, n)
        let start = if self.row_major_bias { i % self.k } else { j % self.k };
        for off in 0..self.k {
            let t = (start + off) % self.k;
            if self.push_equation(i, j, t) {
                self.pattern[cell] = t;
                if self.descend(cell + 1) {
                    return true;
                }
            }
            self.pop_equation(i, j, t);
        }
        false
    }

    /// Add the equation edge g(t,j) -> b(i,t) of weight +A[i][j] and repair
    /// potentials. Returns false when the graph now has a negative cycle.
    fn push_equation(&mut self, i: usize, j: usize, t: usize) -> bool {
        let b = i * self.k + t;
        let g = self.m * self.k + t * self.n + j;
        let w = self.cells[i * self.n + j].clone();
        self.out[g].push((b, w.clone()));
        let mut undo: Vec<(usize, Rat)> = Vec::new();
        let feasible = self.repair(g, &mut undo);
        self.trail.push((g, undo));
        feasible
    }

    fn pop_equation(&mut self, _i: usize, j: usize, t: usize) {
        let g = self.m * self.k + t * self.n + j;
        let (edge_node, undo) = self.trail.pop().expect("pop matches push");
        debug_assert_eq!(edge_node, g);
        self.out[g].pop();
        for (node, old) in undo.into_iter().rev() {
            self.dist[node] = old;
        }
    }

    /// Queue-based relaxation from `source` after one of its outgoing edges
    /// changed. Total relaxations are bounded by nodes × edges in the
    /// absence of a negative cycle; exceeding the bound reports a cycle.
    fn repair(&mut self, source: usize, undo: &mut Vec<(usize, Rat)>) -> bool {
        let n_nodes = self.dist.len();
        let n_edges: usize = self.out.iter().map(Vec::len).sum();
        let mut budget = n_nodes * n_edges + 1;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for idx in 0..self.out[u].len() {
                let (v, ref w) = self.out[u][idx];
                let cand = &self.dist[u] + w;
                if cand < self.dist[v] {
                    if budget == 0 {
                        return false;
                    }
                    budget -= 1;
                    undo.push((v, self.dist[v].clone()));
                    self.dist[v] = cand;
                    queue.push_back(v);
                }
            }
        }
        true
    }
}

// PatternSearch borrows the matrix only for its shape after construction.
impl std::fmt::Debug for PatternSearch<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PatternSearch({}x{}, k={})", self.a.rows(), self.a.cols(), self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> TropMatrix {
        TropMatrix::from_int_rows(rows).unwrap()
    }

    #[test]
    fn rank_two_refuted_on_three_cycle_matrix() {
        let a = m(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]);
        assert!(factor_rank_le_k(&a, 2).unwrap().is_none());
        assert!(factor_rank_le_k(&a, 3).unwrap().is_some());
    }

    #[test]
    fn any_square_matrix_has_rank_at_most_its_size() {
        let a = m(&[vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]]);
        let f = factor_rank_le_k(&a, 3).unwrap().expect("rank <= min(m,n)");
        assert!(verify_product(&a, &f).unwrap());
        assert_eq!(f.inner_dim(), 3);
    }

    #[test]
    fn constant_matrix_is_rank_one() {
        let a = m(&[vec![5, 5], vec![5, 5]]);
        let f = factor_rank_le_k(&a, 1).unwrap().expect("rank 1");
        assert!(verify_product(&a, &f).unwrap());
        assert_eq!(factor_rank_exact(&a).unwrap(), 1);
    }

    #[test]
    fn exact_rank_examples() {
        assert_eq!(factor_rank_exact(&m(&[vec![0, 0], vec![0, 0]])).unwrap(), 1);
        assert_eq!(factor_rank_exact(&m(&[vec![0, 2], vec![2, 0]])).unwrap(), 2);
    }

    #[test]
    fn monotone_in_k() {
        let a = m(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]);
        let r = factor_rank_exact(&a).unwrap();
        assert_eq!(r, 3);
        for k in r..=3 {
            assert!(factor_rank_le_k(&a, k).unwrap().is_some());
        }
        for k in 1..r {
            assert!(factor_rank_le_k(&a, k).unwrap().is_none());
        }
    }

    #[test]
    fn budget_is_enforced_loudly() {
        let a = m(&[vec![0, 1], vec![1, 0]]);
        match factor_rank_le_k_budgeted(&a, 2, 8) {
            Err(Error::BudgetExceeded { budget: 8, .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn infinite_entries_are_rejected() {
        let a = TropMatrix::new(
            1,
            2,
            vec![TropValue::from_int(0), TropValue::Infinity],
        )
        .unwrap();
        assert!(matches!(factor_rank_le_k(&a, 1), Err(Error::InfiniteEntry { .. })));
    }

    /// Verdicts agree with a plain non-incremental enumeration (independent
    /// oracle-of-the-oracle on very small inputs).
    #[test]
    fn matches_plain_enumeration_on_tiny_matrices() {
        use crate::constraints::{solve_two_var, TwoVarConstraint, TwoVarSystem};
        let plain = |a: &TropMatrix, k: usize| -> bool {
            let (m, n) = (a.rows(), a.cols());
            let total = k.pow((m * n) as u32);
            'patterns: for code in 0..total {
                let mut c = code;
                let mut pat = vec![0usize; m * n];
                for p in pat.iter_mut() {
                    *p = c % k;
                    c /= k;
                }
                let mut sys = TwoVarSystem::new(m * k + k * n);
                for i in 0..m {
                    for j in 0..n {
                        let v = a.get(i, j).finite().unwrap().clone();
                        let t = pat[i * n + j];
                        sys.push(TwoVarConstraint::SumEqual { x: i * k + t, y: m * k + t * n + j, value: v.clone() });
                        for tau in 0..k {
                            sys.push(TwoVarConstraint::SumLowerBound {
                                x: i * k + tau,
                                y: m * k + tau * n + j,
                                bound: v.clone(),
                            });
                        }
                    }
                }
                if solve_two_var(&sys).unwrap().is_some() {
                    return true;
                }
                continue 'patterns;
            }
            false
        };
        let cases = [
            m(&[vec![0, 1], vec![1, 0]]),
            m(&[vec![0, 0], vec![0, 1]]),
            m(&[vec![2, 0], vec![0, 2]]),
            m(&[vec![0, 1, 2], vec![2, 1, 0]]),
            m(&[vec![0, 3], vec![1, 0], vec![2, 2]]),
        ];
        for a in &cases {
            for k in 1..=2 {
                assert_eq!(
                    factor_rank_le_k(a, k).unwrap().is_some(),
                    plain(a, k),
                    "disagreement on {a:?} k={k}"
                );
            }
        }
    }
}
