//! Gaussian elimination over `F_{p^k}` with deterministic pivoting: the
//! pivot of each step is in the first column with a nonzero entry among the
//! remaining rows, taken from the least such row.

use crate::gf::FieldElem;

/// Reduced row-echelon form of `rows`. Zero rows are dropped; every pivot is
/// 1 and is the only nonzero entry of its column.
pub fn rref(mut rows: Vec<Vec<FieldElem>>) -> Vec<Vec<FieldElem>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pr) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][col].inv().expect("nonzero pivot");
        for x in rows[rank].iter_mut().skip(col) {
            *x *= inv;
        }
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot).skip(col) {
                *x -= f * y;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// Column index of the leading 1 of an echelon row.
pub fn pivot_col(row: &[FieldElem]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

pub fn rank(rows: Vec<Vec<FieldElem>>) -> usize {
    rref(rows).len()
}

/// Removes from `v` the components along the pivots of the echelon basis
/// `basis`; the result is zero iff `v` lies in its span.
pub fn reduce(v: &mut [FieldElem], basis: &[Vec<FieldElem>]) {
    for row in basis {
        let col = pivot_col(row).expect("nonzero echelon row");
        let f = v[col];
        if f.is_zero() {
            continue;
        }
        for (x, &y) in v.iter_mut().zip(row).skip(col) {
            *x -= f * y;
        }
    }
}

/// Basis of `{x : M x = 0}` for the `rows x ncols` matrix `m`, one vector per
/// free column in increasing order, with a 1 in that column.
pub fn nullspace(m: Vec<Vec<FieldElem>>, ncols: usize, one: FieldElem) -> Vec<Vec<FieldElem>> {
    let e = rref(m);
    let pivots: Vec<usize> = e.iter().map(|r| pivot_col(r).expect("nonzero row")).collect();
    let zero = one.ctx().zero();
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![zero; ncols];
            x[free] = one;
            for (row, &pc) in e.iter().zip(&pivots) {
                x[pc] = -row[free];
            }
            x
        })
        .collect()
}
