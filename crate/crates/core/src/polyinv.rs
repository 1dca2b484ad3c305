//! Polynomials in `k[u,v]` and weighted `k[X,Y,Z]`, and the invariant-ring
//! engine for subgroup schemes of `SL_2`.
//!
//! A matrix `g = [[a,b],[c,d]]` acts by `(g.f)(u,v) = f(a u + c v, b u + d v)`,
//! so `diag(z, z^-1)` scales `u^i v^j` by `z^(i-j)` and `u` has weight 1.

use std::collections::BTreeMap;
use std::fmt;

use crate::gf::{self, FieldCtx, FieldElem, FieldError};
use crate::grpscheme::{ADEType, SubgroupScheme};
use crate::linalg;
use crate::mat2::{GroupClosure, Mat2};

#[derive(Debug, thiserror::Error)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("matrix is singular")]
    Singular,
    #[error("group order {order} is divisible by p = {p}")]
    NotReductive { order: usize, p: u64 },
    #[error("found {found} generators up to degree {dmax}, expected 3")]
    GeneratorCount { found: usize, dmax: u32 },
}

fn same_ctx(a: FieldCtx, b: FieldCtx) -> Result<(), FieldError> {
    if a == b {
        Ok(())
    } else {
        Err(FieldError::ContextMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

/// Writes `c*m` in canonical form, eliding a unit coefficient.
fn write_term(out: &mut String, c: FieldElem, mono: &str) {
    if !out.is_empty() {
        out.push_str(" + ");
    }
    match (mono.is_empty(), c.is_one()) {
        (true, _) => out.push_str(&c.to_string()),
        (false, true) => out.push_str(mono),
        (false, false) => out.push_str(&format!("{c}*{mono}")),
    }
}

fn power(var: &str, e: u32) -> Option<String> {
    match e {
        0 => None,
        1 => Some(var.to_string()),
        _ => Some(format!("{var}^{e}")),
    }
}

/// A polynomial in `k[u,v]`; the key `(a, b)` is the monomial `u^a v^b`.
#[derive(Clone, PartialEq, Eq)]
pub struct BivarPoly {
    ctx: FieldCtx,
    terms: BTreeMap<(u32, u32), FieldElem>,
}

impl BivarPoly {
    pub fn zero(ctx: FieldCtx) -> Self {
        BivarPoly {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: FieldElem, a: u32, b: u32) -> Self {
        let mut p = Self::zero(c.ctx());
        p.add_term(a, b, c);
        p
    }

    pub fn u(ctx: FieldCtx) -> Self {
        Self::monomial(ctx.one(), 1, 0)
    }

    pub fn v(ctx: FieldCtx) -> Self {
        Self::monomial(ctx.one(), 0, 1)
    }

    /// Homogeneous polynomial of degree `coeffs.len() - 1` whose entry `j`
    /// is the coefficient of `u^(d-j) v^j`.
    pub fn from_dense(ctx: FieldCtx, coeffs: &[FieldElem]) -> Self {
        let d = coeffs.len() as u32 - 1;
        let mut p = Self::zero(ctx);
        for (j, &c) in coeffs.iter().enumerate() {
            p.add_term(d - j as u32, j as u32, c);
        }
        p
    }

    /// Dense coefficients of the degree-`d` part, indexed by the `v` exponent.
    pub fn to_dense(&self, d: u32) -> Vec<FieldElem> {
        let mut out = vec![self.ctx.zero(); d as usize + 1];
        for (&(a, b), &c) in &self.terms {
            if a + b == d {
                out[b as usize] = c;
            }
        }
        out
    }

    fn add_term(&mut self, a: u32, b: u32, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_insert(self.ctx.zero());
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), FieldElem)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, a: u32, b: u32) -> FieldElem {
        self.terms.get(&(a, b)).copied().unwrap_or(self.ctx.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|&(a, b)| a + b);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, FieldError> {
        same_ctx(self.ctx, rhs.ctx)?;
        let mut out = self.clone();
        for (&(a, b), &c) in &rhs.terms {
            out.add_term(a, b, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.try_add(&rhs.scale(-self.ctx.one()))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, FieldError> {
        same_ctx(self.ctx, rhs.ctx)?;
        let mut out = Self::zero(self.ctx);
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: FieldElem) -> Self {
        let mut out = Self::zero(self.ctx);
        for (&(a, b), &c) in &self.terms {
            out.add_term(a, b, c * s);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.ctx.one());
        for _ in 0..e {
            out = out.try_mul(self).expect("same field");
        }
        out
    }

    pub fn embed(&self, dst: FieldCtx) -> Result<Self, FieldError> {
        let mut out = Self::zero(dst);
        for (&(a, b), &c) in &self.terms {
            out.add_term(a, b, gf::embed(c, dst)?);
        }
        Ok(out)
    }

    fn sorted_terms(&self) -> Vec<((u32, u32), FieldElem)> {
        let mut t: Vec<_> = self.terms().collect();
        t.sort_by_key(|&((a, b), _)| (a + b, std::cmp::Reverse(a)));
        t
    }
}

/// Canonical text: monomials by total degree, then by `u` exponent
/// descending.
impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for ((a, b), c) in self.sorted_terms() {
            let mono: Vec<String> = [power("u", a), power("v", b)].into_iter().flatten().collect();
            write_term(&mut out, c, &mono.join("*"));
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self, self.ctx)
    }
}

/// A polynomial in `k[X,Y,Z]` with positive variable weights; the key
/// `(i, j, l)` is `X^i Y^j Z^l`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeightedPoly3 {
    ctx: FieldCtx,
    weights: [u32; 3],
    terms: BTreeMap<(u32, u32, u32), FieldElem>,
}

impl WeightedPoly3 {
    pub fn zero(ctx: FieldCtx, weights: [u32; 3]) -> Self {
        WeightedPoly3 {
            ctx,
            weights,
            terms: BTreeMap::new(),
        }
    }

    /// From `(coefficient, (i, j, l))` pairs with integer coefficients.
    pub fn from_int_terms(ctx: FieldCtx, weights: [u32; 3], terms: &[(i64, [u32; 3])]) -> Self {
        let mut p = Self::zero(ctx, weights);
        for &(c, [i, j, l]) in terms {
            p.add_term((i, j, l), ctx.from_int(c));
        }
        p
    }

    pub fn add_term(&mut self, m: (u32, u32, u32), c: FieldElem) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert(self.ctx.zero());
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn weights(&self) -> [u32; 3] {
        self.weights
    }

    pub fn weighted_degree(&self, m: (u32, u32, u32)) -> u32 {
        m.0 * self.weights[0] + m.1 * self.weights[1] + m.2 * self.weights[2]
    }

    pub fn coeff(&self, m: (u32, u32, u32)) -> FieldElem {
        self.terms.get(&m).copied().unwrap_or(self.ctx.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographically descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32, u32), FieldElem)> + '_ {
        self.terms.iter().rev().map(|(&k, &c)| (k, c))
    }

    pub fn support(&self) -> Vec<(u32, u32, u32)> {
        self.terms().map(|(m, _)| m).collect()
    }

    pub fn scale(&self, s: FieldElem) -> Self {
        let mut out = Self::zero(self.ctx, self.weights);
        for (m, c) in self.terms() {
            out.add_term(m, c * s);
        }
        out
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, FieldError> {
        same_ctx(self.ctx, rhs.ctx)?;
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, FieldError> {
        same_ctx(self.ctx, rhs.ctx)?;
        let mut out = Self::zero(self.ctx, self.weights);
        for ((i1, j1, l1), c1) in self.terms() {
            for ((i2, j2, l2), c2) in rhs.terms() {
                out.add_term((i1 + i2, j1 + j2, l1 + l2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Reorders variables: variable `k` of the result is variable `perm[k]`
    /// of `self`.
    pub fn permute(&self, perm: [usize; 3]) -> Self {
        let w = self.weights;
        let mut out = Self::zero(self.ctx, [w[perm[0]], w[perm[1]], w[perm[2]]]);
        for ((i, j, l), c) in self.terms() {
            let e = [i, j, l];
            out.add_term((e[perm[0]], e[perm[1]], e[perm[2]]), c);
        }
        out
    }

    /// `self(s[0] X, s[1] Y, s[2] Z)`.
    pub fn scale_vars(&self, s: [FieldElem; 3]) -> Self {
        let mut out = Self::zero(self.ctx, self.weights);
        for ((i, j, l), c) in self.terms() {
            out.add_term((i, j, l), c * s[0].pow(i as u64) * s[1].pow(j as u64) * s[2].pow(l as u64));
        }
        out
    }

    pub fn embed(&self, dst: FieldCtx) -> Result<Self, FieldError> {
        let mut out = Self::zero(dst, self.weights);
        for (m, c) in self.terms() {
            out.add_term(m, gf::embed(c, dst)?);
        }
        Ok(out)
    }
}

/// Canonical text: lexicographically descending monomials.
impl fmt::Display for WeightedPoly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for ((i, j, l), c) in self.terms() {
            let mono: Vec<String> = [power("X", i), power("Y", j), power("Z", l)]
                .into_iter()
                .flatten()
                .collect();
            write_term(&mut out, c, &mono.join("*"));
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for WeightedPoly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (weights {:?})@{}", self, self.weights, self.ctx)
    }
}

/// The invariant ring as a hypersurface: three generators and one relation.
#[derive(Debug, Clone)]
pub struct InvariantPresentation {
    pub generators: Vec<(u32, BivarPoly)>,
    pub relation: WeightedPoly3,
    pub ade: ADEType,
}

/// `g.f`, i.e. `f(a u + c v, b u + d v)`.
pub fn act(g: &Mat2, f: &BivarPoly) -> Result<BivarPoly, PolyError> {
    same_ctx(g.ctx(), f.ctx)?;
    if g.det().is_zero() {
        return Err(PolyError::Singular);
    }
    let ctx = f.ctx;
    let l1 = BivarPoly::u(ctx)
        .scale(g.a)
        .try_add(&BivarPoly::v(ctx).scale(g.c))?;
    let l2 = BivarPoly::u(ctx)
        .scale(g.b)
        .try_add(&BivarPoly::v(ctx).scale(g.d))?;
    let mut out = BivarPoly::zero(ctx);
    for ((a, b), c) in f.terms() {
        out = out.try_add(&l1.pow(a).try_mul(&l2.pow(b))?.scale(c))?;
    }
    Ok(out)
}

/// Monomials `(a, b)` with `a + b = d` and `a = b (mod r)`, `a` descending.
pub fn mu_invariant_basis(r: u64, d: u32) -> Vec<(u32, u32)> {
    (0..=d)
        .map(|b| (d - b, b))
        .filter(|&(a, b)| (a as i64 - b as i64).rem_euclid(r as i64) == 0)
        .collect()
}

fn check_reductive(h: &GroupClosure) -> Result<(), PolyError> {
    if (h.order() as u64).is_multiple_of(h.ctx().p()) {
        return Err(PolyError::NotReductive {
            order: h.order(),
            p: h.ctx().p(),
        });
    }
    Ok(())
}

/// `(1/|H|) sum_{g in H} g.f`.
pub fn reynolds(h: &GroupClosure, f: &BivarPoly) -> Result<BivarPoly, PolyError> {
    check_reductive(h)?;
    let mut acc = BivarPoly::zero(f.ctx);
    for g in h.elements() {
        acc = acc.try_add(&act(g, f)?)?;
    }
    let n = h.ctx().from_int((h.order() as u64 % h.ctx().p()) as i64);
    Ok(acc.scale(n.inv()?))
}

/// Dense powers of a linear form `x u + y v`, indexed by the `v` exponent.
fn linear_powers(x: FieldElem, y: FieldElem, d: u32) -> Vec<Vec<FieldElem>> {
    let mut out = vec![vec![x.ctx().one()]];
    for i in 1..=d as usize {
        let prev = &out[i - 1];
        let mut next = vec![x.ctx().zero(); i + 1];
        for (j, &c) in prev.iter().enumerate() {
            next[j] += c * x;
            next[j + 1] += c * y;
        }
        out.push(next);
    }
    out
}

/// Representatives of the left cosets `tC` of the diagonal subgroup
/// `C = {diag(a, a^-1) in H : a^r = 1}`, which fixes every monomial passing
/// the `mu_r` filter.
fn coset_reps(h: &GroupClosure, r: u64) -> Vec<Mat2> {
    let c: Vec<Mat2> = h
        .elements()
        .iter()
        .copied()
        .filter(|g| g.is_diagonal() && g.a.pow(r).is_one())
        .collect();
    let mut covered = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for &t in h.elements() {
        if covered.contains(&t) {
            continue;
        }
        reps.push(t);
        covered.extend(c.iter().map(|&x| t * x));
    }
    reps
}

/// Dense images of the monomials `u^a v^b` (listed in `monos`) under `t`.
fn monomial_images(t: &Mat2, d: u32, monos: &[(u32, u32)]) -> Vec<Vec<FieldElem>> {
    let zero = t.ctx().zero();
    let mut rows = vec![vec![zero; d as usize + 1]; monos.len()];
    // Monomial matrices send u^a v^b to a single monomial.
    if t.is_diagonal() {
        for (row, &(a, b)) in rows.iter_mut().zip(monos) {
            row[b as usize] = t.a.pow(a as u64) * t.d.pow(b as u64);
        }
        return rows;
    }
    if t.is_antidiagonal() {
        for (row, &(a, b)) in rows.iter_mut().zip(monos) {
            row[a as usize] = t.c.pow(a as u64) * t.b.pow(b as u64);
        }
        return rows;
    }
    let p1 = linear_powers(t.a, t.c, d);
    let p2 = linear_powers(t.b, t.d, d);
    for (row, &(a, b)) in rows.iter_mut().zip(monos) {
        for (i, &x) in p1[a as usize].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in p2[b as usize].iter().enumerate() {
                row[i + j] += x * y;
            }
        }
    }
    rows
}

/// Per-scheme data reused across degrees.
struct Engine {
    ctx: FieldCtx,
    r: u64,
    reps: Vec<Mat2>,
    gens: Vec<Mat2>,
}

impl Engine {
    fn new(g: &SubgroupScheme) -> Result<Self, PolyError> {
        check_reductive(g.reduced_part())?;
        Ok(Engine {
            ctx: g.ctx(),
            r: g.r(),
            reps: coset_reps(g.reduced_part(), g.r()),
            gens: g.reduced_part().generators(),
        })
    }

    /// Echelon basis of the degree-`d` invariants, as dense rows.
    fn basis(&self, d: u32) -> Vec<Vec<FieldElem>> {
        let monos = mu_invariant_basis(self.r, d);
        if monos.is_empty() {
            return Vec::new();
        }
        if self.reps.len() > 2 * self.gens.len() {
            return self.fixed_space(d, &monos);
        }
        let zero = self.ctx.zero();
        let mut rows = vec![vec![zero; d as usize + 1]; monos.len()];
        for t in &self.reps {
            for (row, img) in rows.iter_mut().zip(monomial_images(t, d, &monos)) {
                for (x, y) in row.iter_mut().zip(img) {
                    *x += y;
                }
            }
        }
        linalg::rref(rows)
    }

    /// Same space as the coset average, computed as the common kernel of
    /// `g - 1` over the generators; cheaper for large groups.
    fn fixed_space(&self, d: u32, monos: &[(u32, u32)]) -> Vec<Vec<FieldElem>> {
        let n = d as usize + 1;
        let one = self.ctx.one();
        let mut eqs = Vec::new();
        for g in &self.gens {
            let imgs = monomial_images(g, d, monos);
            for i in 0..n {
                let row = monos
                    .iter()
                    .zip(&imgs)
                    .map(|(&(_, b), img)| if b as usize == i { img[i] - one } else { img[i] })
                    .collect();
                eqs.push(row);
            }
        }
        let kernel = linalg::nullspace(eqs, monos.len(), one);
        let rows = kernel
            .into_iter()
            .map(|k| {
                let mut dense = vec![self.ctx.zero(); n];
                for (&(_, b), c) in monos.iter().zip(k) {
                    dense[b as usize] = c;
                }
                dense
            })
            .collect();
        linalg::rref(rows)
    }
}

/// Basis of the degree-`d` invariants in reduced row-echelon form (leading
/// coefficient 1 on the lexicographically first monomial).
pub fn invariant_basis(g: &SubgroupScheme, d: u32) -> Result<Vec<BivarPoly>, PolyError> {
    let e = Engine::new(g)?;
    Ok(e.basis(d)
        .iter()
        .map(|row| BivarPoly::from_dense(g.ctx(), row))
        .collect())
}

/// Invariant bases for every degree `0..=dmax`.
pub fn invariant_bases(g: &SubgroupScheme, dmax: u32) -> Result<Vec<Vec<BivarPoly>>, PolyError> {
    let e = Engine::new(g)?;
    Ok((0..=dmax)
        .map(|d| {
            e.basis(d)
                .iter()
                .map(|row| BivarPoly::from_dense(g.ctx(), row))
                .collect()
        })
        .collect())
}

/// `dim (S_d)^G` for `d = 0..=dmax`.
pub fn hilbert(g: &SubgroupScheme, dmax: u32) -> Result<Vec<usize>, PolyError> {
    let e = Engine::new(g)?;
    Ok((0..=dmax).map(|d| e.basis(d).len()).collect())
}

/// Coefficients of `(1 - t^e) / prod (1 - t^{d_i})` through `t^dmax`.
pub fn expected_hilbert(t: ADEType, dmax: u32) -> Vec<usize> {
    let n = dmax as usize + 1;
    let mut series = vec![0i64; n];
    series[0] = 1;
    let e = t.relation_degree() as usize;
    if e < n {
        series[e] = -1;
    }
    for d in t.generator_degrees() {
        let d = d as usize;
        for i in d..n {
            series[i] += series[i - d];
        }
    }
    series.into_iter().map(|c| c as usize).collect()
}

/// Minimal homogeneous algebra generators of degree `<= dmax`, ascending by
/// degree; exactly three are required.
pub fn minimal_generators(g: &SubgroupScheme, dmax: u32) -> Result<Vec<(u32, BivarPoly)>, PolyError> {
    let e = Engine::new(g)?;
    let ctx = g.ctx();
    let mut bases: Vec<Vec<BivarPoly>> = Vec::new();
    let mut gens: Vec<(u32, BivarPoly)> = Vec::new();
    for d in 0..=dmax {
        let rows = e.basis(d);
        bases.push(rows.iter().map(|r| BivarPoly::from_dense(ctx, r)).collect());
        if d == 0 || rows.is_empty() {
            continue;
        }
        // Degree-d part of the subalgebra generated so far.
        let mut products = Vec::new();
        for (dg, p) in &gens {
            for b in &bases[(d - dg) as usize] {
                products.push(p.try_mul(b)?.to_dense(d));
            }
        }
        let span = linalg::rref(products);
        let mut rest = Vec::new();
        for mut row in rows {
            linalg::reduce(&mut row, &span);
            if row.iter().any(|x| !x.is_zero()) {
                rest.push(row);
            }
        }
        for row in linalg::rref(rest) {
            gens.push((d, BivarPoly::from_dense(ctx, &row)));
        }
        if gens.len() > 3 {
            break;
        }
    }
    if gens.len() != 3 {
        return Err(PolyError::GeneratorCount {
            found: gens.len(),
            dmax,
        });
    }
    Ok(gens)
}

/// Image of `rel` under `X, Y, Z -> gens`.
pub fn substitute(rel: &WeightedPoly3, gens: &[BivarPoly; 3]) -> Result<BivarPoly, PolyError> {
    let ctx = rel.ctx();
    for g in gens {
        same_ctx(ctx, g.ctx())?;
    }
    let mut cache: [Vec<BivarPoly>; 3] = Default::default();
    let mut pw = |k: usize, e: u32| -> BivarPoly {
        let c = &mut cache[k];
        if c.is_empty() {
            c.push(BivarPoly::constant(ctx.one()));
        }
        while c.len() <= e as usize {
            let next = c.last().unwrap().try_mul(&gens[k]).expect("same field");
            c.push(next);
        }
        c[e as usize].clone()
    };
    let mut out = BivarPoly::zero(ctx);
    for ((i, j, l), c) in rel.terms() {
        let term = pw(0, i).try_mul(&pw(1, j))?.try_mul(&pw(2, l))?;
        out = out.try_add(&term.scale(c))?;
    }
    Ok(out)
}
