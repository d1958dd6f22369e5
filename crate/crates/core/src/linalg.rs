//! Exact linear algebra over ℚ(i): dense reduced row echelon form, linear
//! solving and kernels, plus an incremental sparse echelon basis used for
//! span-membership queries in closure computations.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_width(rows: &[Vec<Scalar>], width: usize) -> Result<()> {
    for r in rows {
        if r.len() != width {
            return Err(Error::DimensionMismatch { expected: width, got: r.len() });
        }
    }
    Ok(())
}

/// In-place RREF; returns the pivot columns in row order.
fn rref_in_place(m: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].checked_inv().expect("nonzero pivot");
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (x, y) in other.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Reduced echelon basis of the row span (zero rows removed).
pub fn row_reduce(rows: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let Some(first) = rows.first() else {
        return Ok(Vec::new());
    };
    let width = first.len();
    check_width(rows, width)?;
    let mut m = rows.to_vec();
    let rank = rref_in_place(&mut m, width).len();
    m.truncate(rank);
    Ok(m)
}

/// Columns-as-rows transpose: entry `[d][i]` is `rows[i][d]`.
fn transpose(rows: &[Vec<Scalar>], width: usize) -> Vec<Vec<Scalar>> {
    (0..width)
        .map(|d| rows.iter().map(|r| r[d].clone()).collect())
        .collect()
}

/// Finds coefficients `c` with `Σ c_k · rows[k] = target`, or `None` when
/// the system is inconsistent. Free variables are set to zero.
pub fn solve_linear(rows: &[Vec<Scalar>], target: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    let width = target.len();
    check_width(rows, width)?;
    let n = rows.len();
    let mut aug = transpose(rows, width);
    for (d, r) in aug.iter_mut().enumerate() {
        r.push(target[d].clone());
    }
    let pivots = rref_in_place(&mut aug, n + 1);
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut sol = vec![Scalar::zero(); n];
    for (r, &col) in pivots.iter().enumerate() {
        sol[col] = aug[r][n].clone();
    }
    Ok(Some(sol))
}

/// Basis of `{c : Σ c_k · rows[k] = 0}`.
pub fn kernel(rows: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let n = rows.len();
    let Some(first) = rows.first() else {
        return Ok(Vec::new());
    };
    let width = first.len();
    check_width(rows, width)?;
    let mut m = transpose(rows, width);
    let pivots = rref_in_place(&mut m, n);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); n];
        v[free] = Scalar::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&m[r][free];
        }
        basis.push(v);
    }
    Ok(basis)
}

pub type SparseVec = BTreeMap<usize, Scalar>;

/// Incrementally maintained reduced echelon basis of sparse vectors. Every
/// stored row has leading coordinate 1 at its pivot, and no other stored row
/// has a nonzero entry in that pivot column.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

fn axpy(target: &mut SparseVec, factor: &Scalar, row: &SparseVec) {
    for (k, v) in row {
        let term = factor * v;
        let remove = {
            let slot = target.entry(*k).or_insert_with(Scalar::zero);
            *slot += &term;
            slot.is_zero()
        };
        if remove {
            target.remove(k);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }

    /// Remainder of `v` after elimination against the basis; zero iff `v`
    /// lies in the span.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        v.retain(|_, x| !x.is_zero());
        let pivot_hits: Vec<usize> = v.keys().filter(|k| self.rows.contains_key(k)).copied().collect();
        // Rows are fully reduced, so eliminating one pivot never reintroduces another.
        for p in pivot_hits {
            if let Some(f) = v.get(&p).cloned() {
                axpy(&mut v, &-f, &self.rows[&p]);
            }
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut r = self.reduce(v);
        let Some((&pivot, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.checked_inv().expect("nonzero lead");
        for x in r.values_mut() {
            *x *= &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(f) = row.get(&pivot).cloned() {
                axpy(row, &-f, &r);
            }
        }
        self.rows.insert(pivot, r);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn solve_examples() {
        let sol = solve_linear(&[v(&[1, 0]), v(&[0, 1])], &v(&[5, 7])).unwrap();
        assert_eq!(sol, Some(v(&[5, 7])));
        assert_eq!(solve_linear(&[v(&[1, 1])], &v(&[1, 0])).unwrap(), None);
    }

    #[test]
    fn row_reduce_dependent_rows() {
        assert_eq!(row_reduce(&[v(&[2, 4]), v(&[1, 2])]).unwrap(), vec![v(&[1, 2])]);
        assert!(row_reduce(&[]).unwrap().is_empty());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            solve_linear(&[v(&[1, 2, 3])], &v(&[1, 2])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(row_reduce(&[v(&[1]), v(&[1, 2])]).is_err());
    }

    #[test]
    fn kernel_of_dependent_rows() {
        let k = kernel(&[v(&[1, 2]), v(&[2, 4]), v(&[0, 1])]).unwrap();
        assert_eq!(k, vec![v(&[-2, 1, 0])]);
        assert!(kernel(&[v(&[1, 0]), v(&[0, 1])]).unwrap().is_empty());
    }

    #[test]
    fn echelon_membership() {
        let mut e = Echelon::new();
        let sv = |xs: &[(usize, i64)]| xs.iter().map(|&(k, x)| (k, Scalar::from_int(x))).collect::<SparseVec>();
        assert!(e.insert(sv(&[(0, 2), (3, 4)])));
        assert!(e.insert(sv(&[(3, 1), (5, 1)])));
        assert!(!e.insert(sv(&[(0, 1), (3, 2)])));
        assert!(e.contains(&sv(&[(0, 1), (5, -2)])));
        assert!(!e.contains(&sv(&[(5, 1)])));
        assert_eq!(e.dim(), 2);
        // fully reduced: pivot 3 no longer appears in the pivot-0 row
        assert!(!e.rows[&0].contains_key(&3));
    }

    fn arb_rows() -> impl Strategy<Value = Vec<Vec<Scalar>>> {
        prop::collection::vec(prop::collection::vec(-3i64..4, 4), 0..6)
            .prop_map(|rows| rows.into_iter().map(|r| v(&r)).collect())
    }

    proptest! {
        #[test]
        fn row_reduce_idempotent_and_span_preserving(rows in arb_rows()) {
            let red = row_reduce(&rows).unwrap();
            prop_assert_eq!(row_reduce(&red).unwrap(), red.clone());
            for r in &rows {
                if red.is_empty() {
                    prop_assert!(r.iter().all(Scalar::is_zero));
                } else {
                    prop_assert!(solve_linear(&red, r).unwrap().is_some());
                }
            }
        }

        #[test]
        fn kernel_vectors_annihilate(rows in arb_rows()) {
            for c in kernel(&rows).unwrap() {
                for d in 0..4 {
                    let mut acc = Scalar::zero();
                    for (k, r) in rows.iter().enumerate() {
                        acc += &(&c[k] * &r[d]);
                    }
                    prop_assert!(acc.is_zero());
                }
            }
        }
    }
}
