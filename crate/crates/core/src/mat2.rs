//! 2x2 matrices over `F_{p^k}` and explicit finite matrix groups.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;

use crate::gf::{self, FieldCtx, FieldElem, FieldError};
use crate::text::{self, ElemLit, MatLit, ParseError};

/// Default bound on the size of a generated group.
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum MatError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("matrix is singular")]
    Singular,
    #[error("group has more than {cap} elements")]
    CapExceeded { cap: usize },
    #[error("group is not abelian")]
    NonAbelian,
    #[error("group contains a non-semisimple element")]
    NotSemisimple,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
    pub d: FieldElem,
}

impl Mat2 {
    /// `[[a, b], [c, d]]`; all entries must share one field.
    pub fn new(a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Result<Self, MatError> {
        let ctx = a.ctx();
        for e in [b, c, d] {
            if e.ctx() != ctx {
                return Err(FieldError::ContextMismatch {
                    left: ctx.to_string(),
                    right: e.ctx().to_string(),
                }
                .into());
            }
        }
        Ok(Mat2 { a, b, c, d })
    }

    pub fn identity(ctx: FieldCtx) -> Self {
        Self::scalar(ctx.one())
    }

    pub fn scalar(s: FieldElem) -> Self {
        let z = s.ctx().zero();
        Mat2 { a: s, b: z, c: z, d: s }
    }

    pub fn diag(x: FieldElem, y: FieldElem) -> Self {
        let z = x.ctx().zero();
        Mat2 { a: x, b: z, c: z, d: y }
    }

    pub fn antidiag(b: FieldElem, c: FieldElem) -> Self {
        let z = b.ctx().zero();
        Mat2 { a: z, b, c, d: z }
    }

    /// Entries given as integers reduced mod `p`.
    pub fn from_ints(ctx: FieldCtx, m: [[i64; 2]; 2]) -> Self {
        Mat2 {
            a: ctx.from_int(m[0][0]),
            b: ctx.from_int(m[0][1]),
            c: ctx.from_int(m[1][0]),
            d: ctx.from_int(m[1][1]),
        }
    }

    pub fn from_lit(ctx: FieldCtx, lit: &MatLit) -> Result<Self, MatError> {
        Ok(Mat2 {
            a: elem_from_lit(ctx, &lit[0][0])?,
            b: elem_from_lit(ctx, &lit[0][1])?,
            c: elem_from_lit(ctx, &lit[1][0])?,
            d: elem_from_lit(ctx, &lit[1][1])?,
        })
    }

    /// Parses `[[a,b],[c,d]]` over `ctx`.
    pub fn parse(ctx: FieldCtx, s: &str) -> Result<Self, MatError> {
        Self::from_lit(ctx, &text::parse_matrix(s)?)
    }

    pub fn ctx(&self) -> FieldCtx {
        self.a.ctx()
    }

    pub fn entries(&self) -> [FieldElem; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> FieldElem {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> FieldElem {
        self.a + self.d
    }

    pub fn inv(&self) -> Result<Self, MatError> {
        let det = self.det();
        if det.is_zero() {
            return Err(MatError::Singular);
        }
        let s = det.inv()?;
        Ok(Mat2 {
            a: self.d * s,
            b: -self.b * s,
            c: -self.c * s,
            d: self.a * s,
        })
    }

    pub fn try_mul(&self, rhs: &Mat2) -> Result<Mat2, MatError> {
        if self.ctx() != rhs.ctx() {
            return Err(FieldError::ContextMismatch {
                left: self.ctx().to_string(),
                right: rhs.ctx().to_string(),
            }
            .into());
        }
        Ok(*self * *rhs)
    }

    pub fn scale(&self, s: FieldElem) -> Mat2 {
        Mat2 {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
            c: self.c - rhs.c,
            d: self.d - rhs.d,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.d.is_one() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn is_diagonal(&self) -> bool {
        self.b.is_zero() && self.c.is_zero()
    }

    pub fn is_antidiagonal(&self) -> bool {
        self.a.is_zero() && self.d.is_zero()
    }

    pub fn is_scalar(&self) -> bool {
        self.is_diagonal() && self.a == self.d
    }

    /// `t * self * t^-1`, computed in the smallest field holding both.
    pub fn conjugate_by(&self, t: &Mat2) -> Result<Mat2, MatError> {
        let f = gf::common_field(self.ctx(), t.ctx())?;
        let g = self.embed(f)?;
        let t = t.embed(f)?;
        Ok(t * g * t.inv()?)
    }

    /// Entry-wise canonical embedding into a larger field.
    pub fn embed(&self, dst: FieldCtx) -> Result<Mat2, MatError> {
        Ok(Mat2 {
            a: gf::embed(self.a, dst)?,
            b: gf::embed(self.b, dst)?,
            c: gf::embed(self.c, dst)?,
            d: gf::embed(self.d, dst)?,
        })
    }

    /// Multiplicative order, or an error past `cap`.
    pub fn order(&self, cap: usize) -> Result<u64, MatError> {
        if self.det().is_zero() {
            return Err(MatError::Singular);
        }
        let mut acc = *self;
        for n in 1..=cap as u64 {
            if acc.is_identity() {
                return Ok(n);
            }
            acc = acc * *self;
        }
        Err(MatError::CapExceeded { cap })
    }

    fn key(&self) -> (u64, u64, u64, u64) {
        (self.a.code(), self.b.code(), self.c.code(), self.d.code())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, r: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

impl PartialOrd for Mat2 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Row-major code order; only meaningful within one field.
impl Ord for Mat2 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self, self.ctx())
    }
}

pub fn elem_from_lit(ctx: FieldCtx, lit: &ElemLit) -> Result<FieldElem, FieldError> {
    match lit {
        ElemLit::Int(n) => Ok(ctx.from_int(*n)),
        ElemLit::List(cs) => ctx.from_coeffs(cs),
    }
}

/// Random element of `SL_2(ctx)`.
pub fn random_sl2<R: rand::Rng + ?Sized>(ctx: FieldCtx, rng: &mut R) -> Mat2 {
    let q = ctx.size();
    let mut pick = || ctx.from_code(rng.gen_range(0..q)).expect("code below q");
    loop {
        let (a, b, c) = (pick(), pick(), pick());
        if !a.is_zero() {
            let d = (ctx.one() + b * c) / a;
            return Mat2 { a, b, c, d };
        }
        // a = 0 forces -bc = 1; reuse c as the free entry d.
        if !b.is_zero() {
            return Mat2 { a, b, c: -b.inv().expect("nonzero"), d: c };
        }
    }
}

/// Random element of the normalizer of the diagonal torus in `SL_2(ctx)`:
/// `diag(t, t^-1)` or `[[0, t], [-t^-1, 0]]`.
pub fn random_torus_normalizer<R: rand::Rng + ?Sized>(ctx: FieldCtx, rng: &mut R) -> Mat2 {
    let t = ctx.from_code(rng.gen_range(1..ctx.size())).expect("code below q");
    let ti = t.inv().expect("nonzero");
    if rng.gen_bool(0.5) {
        Mat2::diag(t, ti)
    } else {
        Mat2::antidiag(t, -ti)
    }
}

/// Rank of `g - I` equals 1.
pub fn is_pseudo_reflection(g: &Mat2) -> bool {
    let m = g.sub(&Mat2::identity(g.ctx()));
    !m.is_zero() && m.det().is_zero()
}

pub fn is_transvection(g: &Mat2) -> bool {
    let m = g.sub(&Mat2::identity(g.ctx()));
    is_pseudo_reflection(g) && (m * m).is_zero()
}

/// A finite group of matrices listed explicitly, sorted by code.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupClosure {
    ctx: FieldCtx,
    elements: Vec<Mat2>,
    gen_indices: Vec<usize>,
}

impl fmt::Debug for GroupClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupClosure(order {} over {})", self.order(), self.ctx)
    }
}

/// Breadth-first closure of `gens` under multiplication.
pub fn close_group(ctx: FieldCtx, gens: &[Mat2], cap: usize) -> Result<GroupClosure, MatError> {
    for g in gens {
        if g.ctx() != ctx {
            return Err(FieldError::ContextMismatch {
                left: ctx.to_string(),
                right: g.ctx().to_string(),
            }
            .into());
        }
        if g.det().is_zero() {
            return Err(MatError::Singular);
        }
    }
    let id = Mat2::identity(ctx);
    let mut seen: HashSet<Mat2> = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x * *g;
            if seen.insert(y) {
                if seen.len() > cap {
                    return Err(MatError::CapExceeded { cap });
                }
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<Mat2> = seen.into_iter().collect();
    elements.sort();
    let gen_indices = gens
        .iter()
        .map(|g| elements.binary_search(g).expect("generator in closure"))
        .collect();
    Ok(GroupClosure {
        ctx,
        elements,
        gen_indices,
    })
}

impl GroupClosure {
    pub fn trivial(ctx: FieldCtx) -> Self {
        GroupClosure {
            ctx,
            elements: vec![Mat2::identity(ctx)],
            gen_indices: Vec::new(),
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn gen_indices(&self) -> &[usize] {
        &self.gen_indices
    }

    pub fn generators(&self) -> Vec<Mat2> {
        self.gen_indices.iter().map(|&i| self.elements[i]).collect()
    }

    pub fn contains(&self, g: &Mat2) -> bool {
        g.ctx() == self.ctx && self.elements.binary_search(g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter()
            .all(|x| gens.iter().all(|y| *x * *y == *y * *x))
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.order() as u64;
        self.is_abelian()
            && self
                .elements
                .iter()
                .any(|g| g.order(self.order()).ok() == Some(n))
    }

    /// Elements commuting with every generator.
    pub fn center(&self) -> Vec<Mat2> {
        let gens = self.generators();
        self.elements
            .iter()
            .copied()
            .filter(|x| gens.iter().all(|g| *x * *g == *g * *x))
            .collect()
    }

    pub fn element_order(&self, g: &Mat2) -> Result<u64, MatError> {
        g.order(self.order().max(1))
    }

    /// The group carried into a field containing this one.
    pub fn embed(&self, dst: FieldCtx) -> Result<GroupClosure, MatError> {
        if dst == self.ctx {
            return Ok(self.clone());
        }
        let images = self
            .elements
            .iter()
            .map(|g| g.embed(dst))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_images(dst, images, &self.gen_indices))
    }

    fn from_images(ctx: FieldCtx, images: Vec<Mat2>, gen_indices: &[usize]) -> GroupClosure {
        let gens: Vec<Mat2> = gen_indices.iter().map(|&i| images[i]).collect();
        let mut elements = images;
        elements.sort();
        let gen_indices = gens
            .iter()
            .map(|g| elements.binary_search(g).expect("image of generator"))
            .collect();
        GroupClosure {
            ctx,
            elements,
            gen_indices,
        }
    }
}

/// Element-wise `t g t^-1`, over the smallest field holding both.
pub fn conjugate(t: &Mat2, h: &GroupClosure) -> Result<GroupClosure, MatError> {
    let f = gf::common_field(t.ctx(), h.ctx())?;
    let t = t.embed(f)?;
    let ti = t.inv()?;
    let images = h
        .elements
        .iter()
        .map(|g| Ok(t * g.embed(f)? * ti))
        .collect::<Result<Vec<_>, MatError>>()?;
    Ok(GroupClosure::from_images(f, images, &h.gen_indices))
}

/// `T` in `SL_2` (possibly over an extension) with `T g T^-1` diagonal for
/// every `g` in `h`.
pub fn simultaneous_diagonalize(h: &GroupClosure) -> Result<Mat2, MatError> {
    if !h.is_abelian() {
        return Err(MatError::NonAbelian);
    }
    if (h.order() as u64).is_multiple_of(h.ctx.p()) {
        return Err(MatError::NotSemisimple);
    }
    let Some(g) = h.elements.iter().find(|g| !g.is_scalar()) else {
        return Ok(Mat2::identity(h.ctx));
    };
    if h.elements.iter().all(|g| g.is_diagonal()) {
        return Ok(Mat2::identity(h.ctx));
    }
    let (f, l1, l2) = eigenvalues(g, h.order())?;
    let g = g.embed(f)?;
    let eigvec = |l: FieldElem| {
        let (x, y) = if !g.b.is_zero() {
            (g.b, l - g.a)
        } else {
            (l - g.d, g.c)
        };
        let s = if x.is_zero() { y } else { x };
        (x / s, y / s)
    };
    let (x1, y1) = eigvec(l1);
    let (x2, y2) = eigvec(l2);
    let det = x1 * y2 - x2 * y1;
    let p = Mat2 {
        a: x1,
        b: x2 / det,
        c: y1,
        d: y2 / det,
    };
    let t = p.inv()?;
    debug_assert!(t.det().is_one());
    Ok(t)
}

/// The two distinct eigenvalues of a semisimple non-scalar `g`, in the least
/// field containing them.
fn eigenvalues(g: &Mat2, cap: usize) -> Result<(FieldCtx, FieldElem, FieldElem), MatError> {
    let ctx = g.ctx();
    let (tr, det) = (g.trace(), g.det());
    if ctx.p() != 2 {
        let disc = tr * tr - det * ctx.from_int(4);
        if disc.is_zero() {
            return Err(MatError::NotSemisimple);
        }
        let (f, s) = gf::nth_root(ctx, disc, 2)?;
        let (tr, two) = (gf::embed(tr, f)?, f.from_int(2));
        return Ok((f, (tr + s) / two, (tr - s) / two));
    }
    // Characteristic 2: the eigenvalues are roots of unity of odd order
    // dividing the order of g (up to the determinant, which is 1 here).
    let m = g.order(cap)?;
    if m % 2 == 0 {
        return Err(MatError::NotSemisimple);
    }
    let f = gf::field_with_roots(2, ctx.k(), &[m])?;
    let z = gf::primitive_root_of_unity(f, m)?;
    let (tr, det) = (gf::embed(tr, f)?, gf::embed(det, f)?);
    let mut roots = Vec::new();
    let mut l = f.one();
    for _ in 0..m {
        if (l * l - tr * l + det).is_zero() && !roots.contains(&l) {
            roots.push(l);
        }
        l *= z;
    }
    match roots[..] {
        [l1, l2, ..] => Ok((f, l1, l2)),
        _ => Err(MatError::NotSemisimple),
    }
}
