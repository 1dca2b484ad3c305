//! Relations among invariant generators, matching against the ADE normal
//! forms, and classification of subgroup schemes.

use crate::gf::{self, FieldCtx, FieldElem, FieldError};
use crate::grpscheme::{ADEType, SchemeError, SubgroupScheme};
use crate::linalg;
use crate::mat2::{self, GroupClosure, Mat2, MatError};
use crate::polyinv::{self, BivarPoly, InvariantPresentation, PolyError, WeightedPoly3};

#[derive(Debug, thiserror::Error)]
pub enum ClassError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("expected three generators, got {0}")]
    NotThree(usize),
    #[error("relation space in weighted degree {e} has dimension {dim}, expected 1")]
    KernelDim { e: u32, dim: usize },
    #[error("no relation up to weighted degree {0}")]
    NoRelation(u32),
    #[error("{0} matches no ADE normal form")]
    NoNormalForm(String),
    #[error("not a catalog group: {0}")]
    NotCatalog(String),
    #[error("non-abelian scheme with scalar infinitesimal part (r = p = 2)")]
    ScalarCase,
    #[error("normalization is not implemented for type {0}")]
    Unsupported(ADEType),
    #[error("no antidiagonal element in the reduced part")]
    NoAntidiagonal,
}

/// Weights of the normal form of `t`.
pub fn template_weights(t: ADEType) -> [u32; 3] {
    match t {
        ADEType::A(n) => [n + 1, n + 1, 2],
        ADEType::D(n) => [2 * n - 2, 4, 2 * n - 4],
        ADEType::E6 => [12, 8, 6],
        ADEType::E7 => [18, 12, 8],
        ADEType::E8 => [30, 20, 12],
    }
}

/// The normal form of `t`: `XY + Z^(n+1)`, `X^2 + YZ^2 + Y^(n-1)`,
/// `X^2 + Y^3 + Z^4`, `X^2 + Y^3 + YZ^3`, `X^2 + Y^3 + Z^5`.
pub fn template(t: ADEType, ctx: FieldCtx) -> WeightedPoly3 {
    let terms: Vec<(i64, [u32; 3])> = match t {
        ADEType::A(n) => vec![(1, [1, 1, 0]), (1, [0, 0, n + 1])],
        ADEType::D(n) => vec![(1, [2, 0, 0]), (1, [0, 1, 2]), (1, [0, n - 1, 0])],
        ADEType::E6 => vec![(1, [2, 0, 0]), (1, [0, 3, 0]), (1, [0, 0, 4])],
        ADEType::E7 => vec![(1, [2, 0, 0]), (1, [0, 3, 0]), (1, [0, 1, 3])],
        ADEType::E8 => vec![(1, [2, 0, 0]), (1, [0, 3, 0]), (1, [0, 0, 5])],
    };
    WeightedPoly3::from_int_terms(ctx, template_weights(t), &terms)
}

/// Monomials `X^i Y^j Z^l` of weighted degree `e`, lexicographically
/// descending.
fn weighted_monomials(w: [u32; 3], e: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for i in (0..=e / w[0]).rev() {
        let rest = e - i * w[0];
        for j in (0..=rest / w[1]).rev() {
            let rest = rest - j * w[1];
            if rest.is_multiple_of(w[2]) {
                out.push((i, j, rest / w[2]));
            }
        }
    }
    out
}

/// The unique (up to scalar) relation of weighted degree `e` among three
/// homogeneous generators, scaled so its first monomial in lexicographically
/// descending order has coefficient 1.
pub fn find_relation(gens: &[(u32, BivarPoly)], e: u32) -> Result<WeightedPoly3, ClassError> {
    let [(d0, g0), (d1, g1), (d2, g2)] = gens else {
        return Err(ClassError::NotThree(gens.len()));
    };
    let ctx = g0.ctx();
    let w = [*d0, *d1, *d2];
    let monos = weighted_monomials(w, e);
    let g = [g0.clone(), g1.clone(), g2.clone()];
    let mut powers: [Vec<BivarPoly>; 3] = Default::default();
    for k in 0..3 {
        powers[k].push(BivarPoly::constant(ctx.one()));
        let top = e / w[k];
        for _ in 0..top {
            let next = powers[k].last().unwrap().try_mul(&g[k])?;
            powers[k].push(next);
        }
    }
    let mut columns = Vec::with_capacity(monos.len());
    for &(i, j, l) in &monos {
        let p = powers[0][i as usize]
            .try_mul(&powers[1][j as usize])?
            .try_mul(&powers[2][l as usize])?;
        columns.push(p.to_dense(e));
    }
    let rows: Vec<Vec<FieldElem>> = (0..=e as usize)
        .map(|pos| columns.iter().map(|c| c[pos]).collect())
        .collect();
    let kernel = linalg::nullspace(rows, monos.len(), ctx.one());
    if kernel.len() != 1 {
        return Err(ClassError::KernelDim {
            e,
            dim: kernel.len(),
        });
    }
    let v = &kernel[0];
    let lead = v.iter().find(|x| !x.is_zero()).expect("nonzero kernel vector");
    let s = lead.inv()?;
    let mut rel = WeightedPoly3::zero(ctx, w);
    for (&m, &c) in monos.iter().zip(v) {
        rel.add_term(m, c * s);
    }
    Ok(rel)
}

/// Searches weighted degrees upward for the first relation.
pub fn discover_relation(gens: &[(u32, BivarPoly)]) -> Result<(u32, WeightedPoly3), ClassError> {
    if gens.len() != 3 {
        return Err(ClassError::NotThree(gens.len()));
    }
    let top = gens.iter().map(|g| g.0).max().unwrap_or(0);
    for e in 1..=2 * top {
        match find_relation(gens, e) {
            Ok(rel) => return Ok((e, rel)),
            Err(ClassError::KernelDim { dim: 0, .. }) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(ClassError::NoRelation(2 * top))
}

/// How a relation was carried onto a normal form: permute, optionally
/// complete the square in `X`, then scale `X, Y, Z` by `scalars`; the result
/// is `lambda` times the template.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub ade: ADEType,
    /// Variable `k` of the normal form is variable `perm[k]` of the input.
    pub perm: [usize; 3],
    pub completed_square: bool,
    pub scalars: [FieldElem; 3],
    pub lambda: FieldElem,
    /// The transformed relation divided by `lambda`; equals the template.
    pub normal_form: WeightedPoly3,
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Catalog types whose normal-form weights are proportional to `w`.
fn candidate_types(w: [u32; 3]) -> Vec<ADEType> {
    let prop = |t: [u32; 3]| (0..3).all(|i| (0..3).all(|j| w[i] * t[j] == w[j] * t[i]));
    let mut out = Vec::new();
    if w[0] == w[1] && (2 * w[0]).is_multiple_of(w[2]) {
        let n = 2 * w[0] / w[2];
        if n >= 2 {
            out.push(ADEType::A(n - 1));
        }
    }
    if (2 * w[0]).is_multiple_of(w[1]) {
        let n = 2 * w[0] / w[1] + 1;
        if n >= 4 && prop(template_weights(ADEType::D(n))) {
            out.push(ADEType::D(n));
        }
    }
    for t in [ADEType::E6, ADEType::E7, ADEType::E8] {
        if prop(template_weights(t)) {
            out.push(t);
        }
    }
    out
}

/// `c X^2 + X L + M  ->  c X^2 + M - L^2/(4c)` when `X` occurs with degree
/// at most 2 and `X^2` has a constant coefficient.
fn complete_square(f: &WeightedPoly3) -> Result<Option<WeightedPoly3>, ClassError> {
    let ctx = f.ctx();
    let c = f.coeff((2, 0, 0));
    if ctx.p() == 2 || c.is_zero() {
        return Ok(None);
    }
    let mut lin = WeightedPoly3::zero(ctx, f.weights());
    let mut rest = WeightedPoly3::zero(ctx, f.weights());
    for ((i, j, l), a) in f.terms() {
        match i {
            0 => rest.add_term((0, j, l), a),
            1 => lin.add_term((0, j, l), a),
            2 if (j, l) == (0, 0) => rest.add_term((2, 0, 0), a),
            _ => return Ok(None),
        }
    }
    if lin.is_zero() {
        return Ok(None);
    }
    let s = -(ctx.from_int(4) * c).inv()?;
    Ok(Some(rest.try_add(&lin.try_mul(&lin)?.scale(s))?))
}

fn nth_root_in(ctx: FieldCtx, a: FieldElem, n: u32) -> Result<(FieldCtx, FieldElem), ClassError> {
    Ok(gf::nth_root(ctx, a, n as u64)?)
}

/// Scalars `[alpha, beta, gamma]` and `lambda` with
/// `f(alpha X, beta Y, gamma Z) = lambda * template`, given `f` with exactly
/// the template's support.
fn solve_scaling(
    t: ADEType,
    f: &WeightedPoly3,
) -> Result<(FieldCtx, [FieldElem; 3], FieldElem), ClassError> {
    let ctx = f.ctx();
    let one = ctx.one();
    match t {
        ADEType::A(n) => {
            // alpha beta c1 = lambda = c2 gamma^(n+1).
            let c1 = f.coeff((1, 1, 0));
            let c2 = f.coeff((0, 0, n + 1));
            Ok((ctx, [one, c2 / c1, one], c2))
        }
        ADEType::D(n) => {
            // beta = 1, lambda = c3, alpha^2 = c3/c1, gamma^2 = c3/c2.
            let (c1, c2, c3) = (f.coeff((2, 0, 0)), f.coeff((0, 1, 2)), f.coeff((0, n - 1, 0)));
            let (f1, alpha) = nth_root_in(ctx, c3 / c1, 2)?;
            let (f2, gamma) = nth_root_in(f1, gf::embed(c3 / c2, f1)?, 2)?;
            let alpha = gf::embed(alpha, f2)?;
            Ok((f2, [alpha, f2.one(), gamma], gf::embed(c3, f2)?))
        }
        ADEType::E6 => {
            // beta = gamma = c2/c3, lambda = c2^4/c3^3, alpha = c2^2/(c3^2 s)
            // with s^2 = c1/c3. Some square root is unavoidable here.
            let (c1, c2, c3) = (f.coeff((2, 0, 0)), f.coeff((0, 3, 0)), f.coeff((0, 0, 4)));
            let (f1, s) = nth_root_in(ctx, c1 / c3, 2)?;
            let (c2, c3) = (gf::embed(c2, f1)?, gf::embed(c3, f1)?);
            let b = c2 / c3;
            let alpha = c2 * c2 / (c3 * c3 * s);
            Ok((f1, [alpha, b, b], c2.pow(4) / c3.pow(3)))
        }
        ADEType::E7 => {
            let (c1, c2, c3) = (f.coeff((2, 0, 0)), f.coeff((0, 3, 0)), f.coeff((0, 1, 3)));
            let m = |i: u64, j: u64, l: u64| c1.pow(i) * c2.pow(j) * c3.pow(l);
            Ok((ctx, [m(4, 2, 3), m(3, 1, 2), m(2, 1, 1)], m(9, 4, 6)))
        }
        ADEType::E8 => {
            let (c1, c2, c3) = (f.coeff((2, 0, 0)), f.coeff((0, 3, 0)), f.coeff((0, 0, 5)));
            let m = |i: u64, j: u64, l: u64| c1.pow(i) * c2.pow(j) * c3.pow(l);
            Ok((ctx, [m(7, 5, 3), m(5, 3, 2), m(3, 2, 1)], m(15, 10, 6)))
        }
    }
}

/// Matches `rel` against the ADE normal forms up to permutation of
/// variables, completing the square in `X`, and diagonal scaling over an
/// extension field.
pub fn normalize_ade(rel: &WeightedPoly3) -> Result<Normalization, ClassError> {
    for perm in PERMS {
        let f = rel.permute(perm);
        for t in candidate_types(f.weights()) {
            for completed in [false, true] {
                let g = if completed {
                    match complete_square(&f)? {
                        Some(g) => g,
                        None => continue,
                    }
                } else {
                    f.clone()
                };
                let want = template(t, g.ctx());
                if g.support() != want.support() {
                    continue;
                }
                let (ext, scalars, lambda) = solve_scaling(t, &g)?;
                let normal = g
                    .embed(ext)?
                    .scale_vars(scalars)
                    .scale(lambda.inv()?);
                let want = want.embed(ext)?;
                if normal.terms().eq(want.terms()) {
                    return Ok(Normalization {
                        ade: t,
                        perm,
                        completed_square: completed,
                        scalars,
                        lambda,
                        normal_form: normal,
                    });
                }
            }
        }
    }
    Err(ClassError::NoNormalForm(rel.to_string()))
}

/// Generators, relation and type of the invariant ring of `g`, with
/// generators searched up to degree `dmax`.
pub fn present(g: &SubgroupScheme, dmax: u32) -> Result<InvariantPresentation, ClassError> {
    let generators = polyinv::minimal_generators(g, dmax)?;
    let (_, relation) = discover_relation(&generators)?;
    let ade = normalize_ade(&relation)?.ade;
    Ok(InvariantPresentation {
        generators,
        relation,
        ade,
    })
}

fn element_orders(h: &GroupClosure) -> Result<Vec<u64>, ClassError> {
    Ok(h.elements()
        .iter()
        .map(|g| h.element_order(g))
        .collect::<Result<_, _>>()?)
}

/// Type of a finite reduced subgroup of `SL_2` of order prime to `p`.
pub fn classify_reduced(h: &GroupClosure) -> Result<ADEType, ClassError> {
    let n = h.order() as u64;
    if n.is_multiple_of(h.ctx().p()) {
        return Err(PolyError::NotReductive {
            order: h.order(),
            p: h.ctx().p(),
        }
        .into());
    }
    if n == 1 {
        return Err(ClassError::NotCatalog("trivial group".into()));
    }
    let orders = element_orders(h)?;
    if orders.contains(&n) {
        return Ok(ADEType::A(n as u32 - 1));
    }
    let involutions = orders.iter().filter(|&&o| o == 2).count();
    if involutions == 1 && n.is_multiple_of(4) && n >= 8 && orders.contains(&(n / 2)) {
        return Ok(ADEType::D((n as u32 + 8) / 4));
    }
    match n {
        24 => Ok(ADEType::E6),
        48 => Ok(ADEType::E7),
        120 => Ok(ADEType::E8),
        _ => Err(ClassError::NotCatalog(format!("order {n}"))),
    }
}

/// Type of a valid subgroup scheme.
pub fn classify(g: &SubgroupScheme) -> Result<ADEType, ClassError> {
    g.check()?;
    let n = g.order();
    if g.is_abelian_scheme() {
        if n == 1 {
            return Err(ClassError::NotCatalog("trivial group".into()));
        }
        return Ok(ADEType::A(n as u32 - 1));
    }
    if g.is_reduced() {
        return classify_reduced(g.reduced_part());
    }
    if g.p() == 2 {
        return Err(ClassError::ScalarCase);
    }
    if !(n + 8).is_multiple_of(4) || n < 8 {
        return Err(ClassError::NotCatalog(format!("order {n}")));
    }
    Ok(ADEType::D((n as u32 + 8) / 4))
}

/// `T` in `SL_2` with `T G T^-1` equal to the catalog scheme of the same
/// type, for types A and D. Returns `T` and the conjugated scheme.
pub fn normalize_conjugator(g: &SubgroupScheme) -> Result<(Mat2, SubgroupScheme), ClassError> {
    let t = classify(g)?;
    match t {
        ADEType::A(_) => {
            let red = g.reduced_part();
            if red.elements().iter().all(|x| x.is_diagonal()) {
                return Ok((Mat2::identity(g.ctx()), g.clone()));
            }
            let tm = mat2::simultaneous_diagonalize(red)?;
            Ok((tm, g.conjugate(&tm)?))
        }
        ADEType::D(_) => {
            let (t1, g1) = diagonalize_index_two(g)?;
            let red = g1.reduced_part();
            let anti = red
                .elements()
                .iter()
                .find(|x| x.is_antidiagonal())
                .ok_or(ClassError::NoAntidiagonal)?;
            // anti = [[0, b], [-b^-1, 0]]
            let ctx = g1.ctx();
            let (f1, sqrt_b) = gf::nth_root(ctx, anti.b, 2)?;
            let f = gf::field_with_roots(ctx.p(), f1.k(), &[8])?;
            let z8 = gf::primitive_root_of_unity(f, 8)?;
            let sqrt_b = gf::embed(sqrt_b, f)?;
            let t2 = Mat2::diag(z8 / sqrt_b, sqrt_b / z8);
            let t1 = t1.embed(f)?;
            let tm = t2 * t1;
            Ok((tm, g1.embed(f)?.conjugate(&t2)?))
        }
        other => Err(ClassError::Unsupported(other)),
    }
}

/// Conjugates so that a cyclic subgroup of index 2 in the reduced part is
/// diagonal. Schemes with `r >= 3` are already in that position.
fn diagonalize_index_two(g: &SubgroupScheme) -> Result<(Mat2, SubgroupScheme), ClassError> {
    let red = g.reduced_part();
    if g.r() >= 3 {
        return Ok((Mat2::identity(g.ctx()), g.clone()));
    }
    let half = red.order() as u64 / 2;
    let gen = red
        .elements()
        .iter()
        .find(|x| red.element_order(x).ok() == Some(half))
        .ok_or_else(|| ClassError::NotCatalog("no cyclic subgroup of index 2".into()))?;
    let k = mat2::close_group(g.ctx(), &[*gen], red.order())?;
    let tm = mat2::simultaneous_diagonalize(&k)?;
    Ok((tm, g.conjugate(&tm)?))
}

/// Outcome of substituting the explicit generators for a type.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub ade: ADEType,
    pub p: u64,
    pub generators: [BivarPoly; 3],
    /// `(label, holds)` for each candidate identity checked.
    pub checks: Vec<(String, bool)>,
    /// For D: the `c` with `x^2 + y z^2 = c y^(n-1)`.
    pub constant: Option<FieldElem>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

fn invariant_under(g: &SubgroupScheme, f: &BivarPoly) -> Result<bool, ClassError> {
    let ctx = gf::common_field(g.ctx(), f.ctx())?;
    let f = f.embed(ctx)?;
    let r = g.r() as i64;
    if f.terms().any(|((a, b), _)| (a as i64 - b as i64).rem_euclid(r) != 0) {
        return Ok(false);
    }
    for x in g.extra_gens() {
        if polyinv::act(&x.embed(ctx)?, &f)? != f {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Substitutes the classical explicit invariants of types A and D:
/// `x = u^(n+1), y = -v^(n+1), z = uv` for `A_n`, and for `D_n`
/// `x = uv(u^(2n-4) - (-1)^n v^(2n-4))`, `y = -c^2 u^2 v^2`,
/// `z = c^-1 (u^(2n-4) + (-1)^n v^(2n-4))` with `c^(n-1) = 2`.
pub fn verify_explicit(t: ADEType, p: u64) -> Result<VerifyReport, ClassError> {
    let g = crate::grpscheme::make_catalog(t, p)?;
    match t {
        ADEType::A(n) => {
            let ctx = gf::build_field(p, 1)?;
            let one = ctx.one();
            let x = BivarPoly::monomial(one, n + 1, 0);
            let y = BivarPoly::monomial(-one, 0, n + 1);
            let z = BivarPoly::monomial(one, 1, 1);
            let w = [n + 1, n + 1, 2];
            let plus = WeightedPoly3::from_int_terms(ctx, w, &[(1, [1, 1, 0]), (1, [0, 0, n + 1])]);
            let gens = [x, y, z];
            let mut checks = Vec::new();
            for (i, q) in gens.iter().enumerate() {
                checks.push((format!("{} invariant", ["x", "y", "z"][i]), invariant_under(&g, q)?));
            }
            let holds = polyinv::substitute(&plus, &gens)?.is_zero();
            checks.push((format!("XY+Z^{}", n + 1), holds));
            let norm = normalize_ade(&plus)?;
            checks.push((format!("normal form {}", norm.ade), norm.ade == t));
            Ok(VerifyReport {
                ade: t,
                p,
                generators: gens,
                checks,
                constant: None,
            })
        }
        ADEType::D(n) => {
            let base = gf::build_field(p, 1)?;
            let (ctx, c) = gf::nth_root(base, base.from_int(2), (n - 1) as u64)?;
            let one = ctx.one();
            let sign = if n % 2 == 0 { one } else { -one };
            let m = 2 * n - 4;
            let x = BivarPoly::monomial(one, m + 1, 1).try_add(&BivarPoly::monomial(-sign, 1, m + 1))?;
            let y = BivarPoly::monomial(-(c * c), 2, 2);
            let z = BivarPoly::monomial(one, m, 0)
                .try_add(&BivarPoly::monomial(sign, 0, m))?
                .scale(c.inv()?);
            let w = template_weights(t);
            let lhs = WeightedPoly3::from_int_terms(ctx, w, &[(1, [2, 0, 0]), (1, [0, 1, 2])]);
            let rhs = WeightedPoly3::from_int_terms(ctx, w, &[(1, [0, n - 1, 0])]);
            let gens = [x, y, z];
            let mut checks = Vec::new();
            for (i, q) in gens.iter().enumerate() {
                checks.push((format!("{} invariant", ["x", "y", "z"][i]), invariant_under(&g, q)?));
            }
            let l = polyinv::substitute(&lhs, &gens)?;
            let r = polyinv::substitute(&rhs, &gens)?;
            // The constant c with l = c r, read off at the leading monomial of r.
            let constant = r
                .terms()
                .next()
                .map(|(mono, rc)| l.coeff(mono.0, mono.1) / rc)
                .filter(|k| l == r.scale(*k));
            checks.push((format!("X^2+YZ^2 proportional to Y^{}", n - 1), constant.is_some()));
            let plus = lhs.try_add(&rhs)?;
            let minus = lhs.try_add(&rhs.scale(-one))?;
            checks.push((
                format!("X^2+YZ^2+Y^{}", n - 1),
                polyinv::substitute(&plus, &gens)?.is_zero(),
            ));
            checks.push((
                format!("X^2+YZ^2-Y^{}", n - 1),
                polyinv::substitute(&minus, &gens)?.is_zero(),
            ));
            if let Some(k) = constant {
                let rel = lhs.try_add(&rhs.scale(-k))?;
                let norm = normalize_ade(&rel)?;
                checks.push((format!("normal form {}", norm.ade), norm.ade == t));
            }
            Ok(VerifyReport {
                ade: t,
                p,
                generators: gens,
                checks,
                constant,
            })
        }
        other => Err(ClassError::Unsupported(other)),
    }
}
