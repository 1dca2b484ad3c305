//! Finitely generated abelian groups through integer matrices in Smith normal
//! form. A diagonalizable group scheme is determined by its character group,
//! so `μ_r` corresponds to `Z/r` and `G_m` to `Z`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

/// Default bound on the magnitude of any intermediate entry.
pub const DEFAULT_CAP: i128 = 1 << 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("intermediate entry exceeds the magnitude cap")]
    Overflow,
    #[error("rows have inconsistent lengths")]
    Ragged,
    #[error("matrix has no entries")]
    Empty,
    #[error("cannot parse matrix entry `{0}`")]
    BadEntry(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    entries: Vec<i128>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows<R: AsRef<[i128]>>(rows: &[R]) -> Result<Self, LatticeError> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.is_empty() || cols == 0 {
            return Err(LatticeError::Empty);
        }
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LatticeError::Ragged);
            }
            entries.extend_from_slice(r);
        }
        Ok(IntMat {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn diag(values: &[i128]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn checked_mul(&self, rhs: &IntMat) -> Result<IntMat, LatticeError> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = IntMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0i128;
                for t in 0..self.cols {
                    let prod = self[(i, t)]
                        .checked_mul(rhs[(t, j)])
                        .ok_or(LatticeError::Overflow)?;
                    acc = acc.checked_add(prod).ok_or(LatticeError::Overflow)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free elimination (square matrices only).
    pub fn det(&self) -> Result<i128, LatticeError> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k * n + k] == 0 {
                let Some(swap) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return Ok(0);
                };
                for j in 0..n {
                    a.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let x = a[i * n + j]
                        .checked_mul(a[k * n + k])
                        .and_then(|v| v.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?))
                        .ok_or(LatticeError::Overflow)?;
                    a[i * n + j] = x / prev;
                }
            }
            prev = a[k * n + k];
        }
        Ok(sign * a[n * n - 1])
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == 0))
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.entries[i * self.cols + j]
    }
}

/// One row per line, entries separated by whitespace.
impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated rows; blank lines and `#` comments are skipped.
impl FromStr for IntMat {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rows = Vec::new();
        for line in s.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i128>()
                        .ok()
                        .filter(|v| v.abs() <= DEFAULT_CAP)
                        .ok_or_else(|| LatticeError::BadEntry(tok.chars().take(40).collect()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        IntMat::from_rows(&rows)
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` in Smith normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Smith {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl Smith {
    /// Nonzero diagonal entries of `D`.
    pub fn invariant_factors(&self) -> Vec<i128> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)])
            .filter(|&x| x != 0)
            .collect()
    }
}

struct Reducer {
    a: IntMat,
    u: IntMat,
    v: IntMat,
    cap: i128,
}

impl Reducer {
    fn bounded(&self, x: i128) -> Result<i128, LatticeError> {
        if x.abs() > self.cap {
            Err(LatticeError::Overflow)
        } else {
            Ok(x)
        }
    }

    /// row_i += q * row_j, mirrored on U.
    fn add_row(&mut self, i: usize, j: usize, q: i128) -> Result<(), LatticeError> {
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let x = m[(j, c)]
                    .checked_mul(q)
                    .and_then(|t| t.checked_add(m[(i, c)]))
                    .ok_or(LatticeError::Overflow)?;
                m[(i, c)] = x;
            }
        }
        for c in 0..self.a.cols {
            self.bounded(self.a[(i, c)])?;
        }
        Ok(())
    }

    /// col_i += q * col_j, mirrored on V.
    fn add_col(&mut self, i: usize, j: usize, q: i128) -> Result<(), LatticeError> {
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows {
                let x = m[(r, j)]
                    .checked_mul(q)
                    .and_then(|t| t.checked_add(m[(r, i)]))
                    .ok_or(LatticeError::Overflow)?;
                m[(r, i)] = x;
            }
        }
        for r in 0..self.a.rows {
            self.bounded(self.a[(r, i)])?;
        }
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let (x, y) = (m[(i, c)], m[(j, c)]);
                m[(i, c)] = y;
                m[(j, c)] = x;
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows {
                let (x, y) = (m[(r, i)], m[(r, j)]);
                m[(r, i)] = y;
                m[(r, j)] = x;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                m[(i, c)] = -m[(i, c)];
            }
        }
    }

    /// Least absolute nonzero entry in the trailing block, ties row-major.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(i128, usize, usize)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let x = self.a[(i, j)].abs();
                if x != 0 && best.is_none_or(|(b, _, _)| x < b) {
                    best = Some((x, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn run(&mut self) -> Result<(), LatticeError> {
        let n = self.a.rows.min(self.a.cols);
        for t in 0..n {
            loop {
                let Some((pi, pj)) = self.pivot(t) else {
                    return Ok(());
                };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                let piv = self.a[(t, t)];
                let mut clean = true;
                for i in t + 1..self.a.rows {
                    let q = self.a[(i, t)].div_euclid(piv);
                    if q != 0 {
                        self.add_row(i, t, -q)?;
                    }
                    clean &= self.a[(i, t)] == 0;
                }
                for j in t + 1..self.a.cols {
                    let q = self.a[(t, j)].div_euclid(piv);
                    if q != 0 {
                        self.add_col(j, t, -q)?;
                    }
                    clean &= self.a[(t, j)] == 0;
                }
                if !clean {
                    continue;
                }
                // Divisibility: fold an offending row into the pivot row.
                let offender = (t + 1..self.a.rows).find(|&i| {
                    (t + 1..self.a.cols).any(|j| self.a[(i, j)] % piv != 0)
                });
                match offender {
                    Some(i) => self.add_row(t, i, 1)?,
                    None => break,
                }
            }
            if self.a[(t, t)] < 0 {
                self.negate_row(t);
            }
        }
        Ok(())
    }
}

pub fn smith_normal_form(a: &IntMat) -> Result<Smith, LatticeError> {
    smith_normal_form_with_cap(a, DEFAULT_CAP)
}

pub fn smith_normal_form_with_cap(a: &IntMat, cap: i128) -> Result<Smith, LatticeError> {
    if a.entries.iter().any(|x| x.abs() > cap) {
        return Err(LatticeError::Overflow);
    }
    let mut r = Reducer {
        a: a.clone(),
        u: IntMat::identity(a.rows),
        v: IntMat::identity(a.cols),
        cap,
    };
    r.run()?;
    Ok(Smith {
        u: r.u,
        d: r.a,
        v: r.v,
    })
}

/// A finitely generated abelian group `Z^rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_s` with
/// `d_1 | d_2 | ... | d_s` and every `d_i ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<u128>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(r: u128) -> Self {
        if r == 0 {
            AbelianGroup {
                rank: 1,
                torsion: Vec::new(),
            }
        } else if r == 1 {
            Self::trivial()
        } else {
            AbelianGroup {
                rank: 0,
                torsion: vec![r],
            }
        }
    }

    /// Order, or `None` when the group is infinite.
    pub fn order(&self) -> Option<u128> {
        if self.rank > 0 {
            return None;
        }
        self.torsion.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d))
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Z^rows / im(A)`.
pub fn cokernel(a: &IntMat) -> Result<AbelianGroup, LatticeError> {
    let snf = smith_normal_form(a)?;
    let factors = snf.invariant_factors();
    Ok(AbelianGroup {
        rank: a.rows - factors.len(),
        torsion: factors
            .into_iter()
            .filter(|&d| d > 1)
            .map(|d| d as u128)
            .collect(),
    })
}

/// `m = p^e * m'` with `p` not dividing `m'`.
pub fn p_part_split(m: u64, p: u64) -> (u64, u64) {
    crate::gf::split_prime_part(m, p)
}

/// Character group of `μ_r`; `r = 0` stands for `G_m` itself.
pub fn char_group_of_mu(r: u64) -> AbelianGroup {
    AbelianGroup::cyclic(r as u128)
}
