//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::ratlaurent::Rational;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of the matrix whose columns are given.
pub fn column_rank(columns: &[Vec<Rational>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let mut m = transpose(columns);
    rref(&mut m).len()
}

fn transpose(columns: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let rows = columns.first().map_or(0, Vec::len);
    (0..rows)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect()
}

/// Solves `sum_k x_k columns[k] = target` for linearly independent columns.
/// Returns `None` when `target` is outside their span.
pub fn solve_in_span(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let k = columns.len();
    let mut m: Vec<Vec<Rational>> = (0..target.len())
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][k].clone();
    }
    Some(x)
}

/// Laplace expansion along the first row.
pub fn cofactor_determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    match n {
        0 => Rational::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut total = Rational::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * cofactor_determinant(&minor);
                if j % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlaurent::{rat, ratio};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
    }

    #[test]
    fn determinant_small() {
        assert_eq!(cofactor_determinant(&mat(&[&[1, 2], &[3, 4]])), rat(-2));
        assert_eq!(
            cofactor_determinant(&mat(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]])),
            rat(6)
        );
    }

    #[test]
    fn span_solve() {
        let cols = mat(&[&[1, 0, 1], &[0, 1, 1]]);
        let x = solve_in_span(&cols, &[rat(2), rat(3), rat(5)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(3)]);
        assert!(solve_in_span(&cols, &[rat(2), rat(3), rat(4)]).is_none());
        let y = solve_in_span(&cols, &[ratio(1, 2), rat(0), ratio(1, 2)]).unwrap();
        assert_eq!(y, vec![ratio(1, 2), rat(0)]);
    }

    #[test]
    fn rank_counts_independent_columns() {
        let cols = mat(&[&[1, 2], &[2, 4], &[0, 1]]);
        assert_eq!(column_rank(&cols), 2);
    }
}
