//! Tropical permanent (minimum over permutation sums) and tropical rank.
//!
//! A square matrix is tropically singular when the permanent's minimum is
//! attained by at least two permutations. The tropical rank of a matrix is
//! the largest r admitting a nonsingular r-by-r submatrix. Everything here
//! is exhaustive enumeration guarded by a size cap.

use crate::error::{Error, Result};
use crate::matrix::TropMatrix;
use crate::value::TropValue;

/// Default enumeration cap: permanents are only computed for n ≤ 9.
pub const DEFAULT_ENUMERATION_CAP: usize = 9;

/// Exact tropical permanent of a square matrix together with a flag telling
/// whether the minimum is attained by at least two permutations.
///
/// All-infinite permutation sums count as attaining the minimum only when
/// the minimum itself is +∞.
pub fn tropical_permanent(d: &TropMatrix) -> Result<(TropValue, bool)> {
    tropical_permanent_capped(d, DEFAULT_ENUMERATION_CAP)
}

/// Same as [`tropical_permanent`] with an explicit cap.
pub fn tropical_permanent_capped(d: &TropMatrix, cap: usize) -> Result<(TropValue, bool)> {
    if d.rows() != d.cols() {
        return Err(Error::NotSquare { rows: d.rows(), cols: d.cols() });
    }
    let n = d.rows();
    if n > cap {
        return Err(Error::EnumerationCapExceeded { size: n, cap });
    }
    let mut best = TropValue::Infinity;
    let mut hits = 0usize;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut sum = TropValue::zero();
        for (i, &j) in p.iter().enumerate() {
            sum = sum.tropical_mul(d.get(i, j));
        }
        match sum.cmp(&best) {
            std::cmp::Ordering::Less => {
                best = sum;
                hits = 1;
            }
            std::cmp::Ordering::Equal => hits += 1,
            std::cmp::Ordering::Greater => {}
        }
    });
    // `best` starts at +∞ with zero hits; an all-infinite permanent is then
    // counted once per permutation, so `hits >= 2` works uniformly.
    Ok((best, hits >= 2))
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Is this square submatrix tropically nonsingular? A 1×1 infinite matrix is
/// singular by convention, which the finiteness check below covers for every
/// size (an infinite minimum of an n ≥ 2 permanent is always attained n!
/// times).
fn nonsingular(d: &TropMatrix, cap: usize) -> Result<bool> {
    let (value, twice) = tropical_permanent_capped(d, cap)?;
    Ok(!twice && value.is_finite())
}

/// Tropical rank: the largest r such that some r×r submatrix is nonsingular.
/// Returns 0 only for matrices with no finite entry.
pub fn tropical_rank(a: &TropMatrix) -> Result<usize> {
    tropical_rank_capped(a, DEFAULT_ENUMERATION_CAP)
}

/// Same as [`tropical_rank`] with an explicit cap on submatrix size.
pub fn tropical_rank_capped(a: &TropMatrix, cap: usize) -> Result<usize> {
    let max_r = a.rows().min(a.cols());
    if max_r > cap {
        return Err(Error::EnumerationCapExceeded { size: max_r, cap });
    }
    for r in (1..=max_r).rev() {
        let mut found = false;
        for_each_combination(a.rows(), r, &mut |rows| {
            if found {
                return;
            }
            for_each_combination(a.cols(), r, &mut |cols| {
                if found {
                    return;
                }
                let sub = a.submatrix(rows, cols).expect("in-range combination");
                if nonsingular(&sub, cap).expect("size within cap") {
                    found = true;
                }
            });
        });
        if found {
            return Ok(r);
        }
    }
    Ok(0)
}

/// Visit every k-combination of {0..n} in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, visit: &mut impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        visit(&idx);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> TropMatrix {
        TropMatrix::from_int_rows(rows).unwrap()
    }

    #[test]
    fn permanent_unique_minimum() {
        let d = m(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(tropical_permanent(&d).unwrap(), (TropValue::from_int(0), false));
    }

    #[test]
    fn permanent_attained_twice() {
        let d = m(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(tropical_permanent(&d).unwrap(), (TropValue::from_int(0), true));
    }

    #[test]
    fn permanent_three_by_three() {
        // all 6 permutations: identity gives 0, every other gives >= 4
        let d = m(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]);
        assert_eq!(tropical_permanent(&d).unwrap(), (TropValue::from_int(0), false));
    }

    #[test]
    fn permanent_rejects_rectangular_and_oversize() {
        let d = m(&[vec![0, 1]]);
        assert!(matches!(tropical_permanent(&d), Err(Error::NotSquare { .. })));
        let big = TropMatrix::from_fn(10, 10, |_, _| TropValue::from_int(0)).unwrap();
        assert!(matches!(tropical_permanent(&big), Err(Error::EnumerationCapExceeded { .. })));
    }

    #[test]
    fn permanent_all_infinite() {
        let d = TropMatrix::from_fn(2, 2, |_, _| TropValue::Infinity).unwrap();
        assert_eq!(tropical_permanent(&d).unwrap(), (TropValue::Infinity, true));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(tropical_rank(&m(&[vec![0, 0], vec![0, 0]])).unwrap(), 1);
        assert_eq!(tropical_rank(&m(&[vec![0, 2], vec![2, 0]])).unwrap(), 2);
        assert_eq!(tropical_rank(&m(&[vec![7]])).unwrap(), 1);
    }

    #[test]
    fn rank_of_infinite_cell_is_zero() {
        let d = TropMatrix::from_fn(1, 1, |_, _| TropValue::Infinity).unwrap();
        assert_eq!(tropical_rank(&d).unwrap(), 0);
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }
}
