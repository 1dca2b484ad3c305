//! Finite linearly reductive subgroup schemes of `SL_2`, stored as a diagonal
//! `mu_r` (weights `(1, -1)`) together with explicit extra generators.
//!
//! The non-reduced part `mu_{p^e}` never appears as points; it is carried by
//! the integer `r`. The reduced part is the finite group generated by the
//! extra generators and the points `diag(z_m, z_m^-1)` of `mu_m`, where `m`
//! is the prime-to-`p` part of `r`.

use std::fmt;
use std::str::FromStr;

use crate::gf::{self, FieldCtx, FieldError};
use crate::mat2::{self, GroupClosure, Mat2, MatError};
use crate::text::{self, ParseError, SchemeText};

#[derive(Debug, thiserror::Error)]
pub enum SchemeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("type {ty} requires p >= {min}, got p = {p}")]
    Gate { ty: ADEType, p: u64, min: u64 },
    #[error("bad type `{0}`")]
    BadType(String),
    #[error("r must be positive")]
    ZeroR,
    #[error("modulus {given} is not the canonical modulus {expected}")]
    NonCanonicalModulus { given: String, expected: String },
    #[error("conjugation by {0} does not preserve the infinitesimal part")]
    MovesTorus(String),
    #[error("invalid scheme: {0}")]
    Invalid(String),
}

impl SchemeError {
    /// Whether the error is a resource limit rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            SchemeError::Field(FieldError::FieldTooLarge { .. })
                | SchemeError::Mat(MatError::CapExceeded { .. })
                | SchemeError::Mat(MatError::Field(FieldError::FieldTooLarge { .. }))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ADEType {
    A(u32),
    D(u32),
    E6,
    E7,
    E8,
}

impl ADEType {
    /// Checks the index range (`A_n`, n >= 1; `D_n`, n >= 4).
    pub fn new(letter: char, n: u32) -> Result<Self, SchemeError> {
        let t = match (letter.to_ascii_uppercase(), n) {
            ('A', n) if n >= 1 => ADEType::A(n),
            ('D', n) if n >= 4 => ADEType::D(n),
            ('E', 6) => ADEType::E6,
            ('E', 7) => ADEType::E7,
            ('E', 8) => ADEType::E8,
            _ => return Err(SchemeError::BadType(format!("{letter}{n}"))),
        };
        Ok(t)
    }

    pub fn letter(&self) -> char {
        match self {
            ADEType::A(_) => 'A',
            ADEType::D(_) => 'D',
            _ => 'E',
        }
    }

    pub fn index(&self) -> u32 {
        match *self {
            ADEType::A(n) | ADEType::D(n) => n,
            ADEType::E6 => 6,
            ADEType::E7 => 7,
            ADEType::E8 => 8,
        }
    }

    /// Smallest characteristic in which the type occurs.
    pub fn min_p(&self) -> u64 {
        match self {
            ADEType::A(_) => 2,
            ADEType::D(_) => 3,
            ADEType::E6 | ADEType::E7 => 5,
            ADEType::E8 => 7,
        }
    }

    /// `|G|`: n+1, 4n-8, 24, 48, 120.
    pub fn group_order(&self) -> u64 {
        match *self {
            ADEType::A(n) => n as u64 + 1,
            ADEType::D(n) => 4 * n as u64 - 8,
            ADEType::E6 => 24,
            ADEType::E7 => 48,
            ADEType::E8 => 120,
        }
    }

    /// Degrees of the three invariant generators, ascending.
    pub fn generator_degrees(&self) -> [u32; 3] {
        match *self {
            ADEType::A(n) => [2, n + 1, n + 1],
            ADEType::D(n) => [4, 2 * n - 4, 2 * n - 2],
            ADEType::E6 => [6, 8, 12],
            ADEType::E7 => [8, 12, 18],
            ADEType::E8 => [12, 20, 30],
        }
    }

    /// Degree of the single relation among the generators.
    pub fn relation_degree(&self) -> u32 {
        match *self {
            ADEType::A(n) => 2 * n + 2,
            ADEType::D(n) => 4 * n - 4,
            ADEType::E6 => 24,
            ADEType::E7 => 36,
            ADEType::E8 => 60,
        }
    }

    /// One-line tag, e.g. `D n=5 p=3 |G|=12`.
    pub fn tag(&self, p: u64) -> String {
        format!(
            "{} n={} p={} |G|={}",
            self.letter(),
            self.index(),
            p,
            self.group_order()
        )
    }
}

impl fmt::Display for ADEType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter(), self.index())
    }
}

impl FromStr for ADEType {
    type Err = SchemeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(|| SchemeError::BadType(s.into()))?;
        let n = chars
            .as_str()
            .trim_start_matches('_')
            .parse::<u32>()
            .map_err(|_| SchemeError::BadType(s.into()))?;
        ADEType::new(letter, n)
    }
}

/// A reason a scheme fails validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotSpecialLinear(usize),
    NotMonomial(usize),
    NotLinearlyReductive { order: usize },
    ScalarNonAbelian,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSpecialLinear(i) => write!(f, "generator {i} has determinant != 1"),
            Violation::NotMonomial(i) => {
                write!(f, "generator {i} is neither diagonal nor antidiagonal while r >= 3")
            }
            Violation::NotLinearlyReductive { order } => {
                write!(f, "reduced part has order {order}, divisible by p")
            }
            Violation::ScalarNonAbelian => {
                write!(f, "r = p = 2 with a non-abelian reduced part")
            }
        }
    }
}

#[derive(Clone)]
pub struct SubgroupScheme {
    ctx: FieldCtx,
    r: u64,
    extra_gens: Vec<Mat2>,
    p_e: u64,
    m: u64,
    reduced: GroupClosure,
}

impl fmt::Debug for SubgroupScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SubgroupScheme(r={}, {} extra gens, |G_red|={} over {})",
            self.r,
            self.extra_gens.len(),
            self.reduced.order(),
            self.ctx
        )
    }
}

impl SubgroupScheme {
    /// Builds the scheme and its reduced closure. The field must contain a
    /// primitive root of unity of the prime-to-`p` part of `r`.
    pub fn new(ctx: FieldCtx, r: u64, extra_gens: Vec<Mat2>) -> Result<Self, SchemeError> {
        Self::with_cap(ctx, r, extra_gens, mat2::DEFAULT_CAP)
    }

    pub fn with_cap(
        ctx: FieldCtx,
        r: u64,
        extra_gens: Vec<Mat2>,
        cap: usize,
    ) -> Result<Self, SchemeError> {
        if r == 0 {
            return Err(SchemeError::ZeroR);
        }
        let (p_e, m) = gf::split_prime_part(r, ctx.p());
        let mut gens = extra_gens.clone();
        if m > 1 {
            let z = gf::primitive_root_of_unity(ctx, m)?;
            gens.push(Mat2::diag(z, z.inv()?));
        }
        let reduced = mat2::close_group(ctx, &gens, cap)?;
        Ok(SubgroupScheme {
            ctx,
            r,
            extra_gens,
            p_e,
            m,
            reduced,
        })
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn extra_gens(&self) -> &[Mat2] {
        &self.extra_gens
    }

    /// `p^e` with `G° = mu_{p^e}`.
    pub fn connected_component(&self) -> u64 {
        self.p_e
    }

    /// Prime-to-`p` part of `r`.
    pub fn reduced_r(&self) -> u64 {
        self.m
    }

    pub fn reduced_part(&self) -> &GroupClosure {
        &self.reduced
    }

    pub fn is_reduced(&self) -> bool {
        self.p_e == 1
    }

    /// `dim k[G] = p^e |G_red|`.
    pub fn order(&self) -> u64 {
        self.p_e * self.reduced.order() as u64
    }

    pub fn is_abelian_scheme(&self) -> bool {
        if self.r >= 3 {
            self.extra_gens.iter().all(|g| g.is_diagonal())
        } else {
            self.reduced.is_abelian()
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, g) in self.extra_gens.iter().enumerate() {
            if !g.det().is_one() {
                out.push(Violation::NotSpecialLinear(i));
            }
            if self.r >= 3 && !g.is_diagonal() && !g.is_antidiagonal() {
                out.push(Violation::NotMonomial(i));
            }
        }
        let order = self.reduced.order();
        if (order as u64).is_multiple_of(self.p()) {
            out.push(Violation::NotLinearlyReductive { order });
        }
        if self.r == 2 && self.p() == 2 && !self.is_abelian_scheme() {
            out.push(Violation::ScalarNonAbelian);
        }
        out
    }

    /// `validate` as a `Result`.
    pub fn check(&self) -> Result<(), SchemeError> {
        let v = self.validate();
        if v.is_empty() {
            return Ok(());
        }
        let msg = v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        Err(SchemeError::Invalid(msg))
    }

    /// The same scheme over a larger field.
    pub fn embed(&self, dst: FieldCtx) -> Result<Self, SchemeError> {
        if dst == self.ctx {
            return Ok(self.clone());
        }
        let gens = self
            .extra_gens
            .iter()
            .map(|g| g.embed(dst))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dst, self.r, gens)
    }

    /// `T G T^-1`. Monomial `T` (and any `T` when `r <= 2`, where `mu_r` is
    /// central) keep `r`; a reduced scheme is otherwise rewritten with
    /// `r = 1` and its full reduced part as explicit generators.
    pub fn conjugate(&self, t: &Mat2) -> Result<Self, SchemeError> {
        let f = gf::common_field(self.ctx, t.ctx())?;
        let t = t.embed(f)?;
        let ti = t.inv()?;
        let conj = |g: &Mat2| -> Result<Mat2, SchemeError> { Ok(t * g.embed(f)? * ti) };
        if t.is_diagonal() || t.is_antidiagonal() || self.r <= 2 {
            let gens = self.extra_gens.iter().map(conj).collect::<Result<_, _>>()?;
            return Self::new(f, self.r, gens);
        }
        if !self.is_reduced() {
            return Err(SchemeError::MovesTorus(t.to_string()));
        }
        let gens = self
            .reduced
            .generators()
            .iter()
            .map(conj)
            .collect::<Result<_, _>>()?;
        Self::new(f, 1, gens)
    }

    /// Equality as subgroup schemes: same `mu_{p^e}` and same reduced points.
    pub fn same_subgroup(&self, other: &Self) -> Result<bool, SchemeError> {
        if self.p() != other.p() || self.p_e != other.p_e {
            return Ok(false);
        }
        if self.reduced.order() != other.reduced.order() {
            return Ok(false);
        }
        let f = gf::common_field(self.ctx, other.ctx)?;
        let a = self.reduced.embed(f)?;
        let b = other.reduced.embed(f)?;
        Ok(a.elements() == b.elements())
    }

    /// Canonical text: header, modulus, generators in stored order.
    pub fn to_text(&self) -> String {
        let modulus = self
            .ctx
            .modulus()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut out = format!(
            "{} {} {}\nmodulus: [{}]\n",
            self.p(),
            self.ctx.k(),
            self.r,
            modulus
        );
        for g in &self.extra_gens {
            out.push_str(&format!("gen: {g}\n"));
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self, SchemeError> {
        Self::from_parsed(&text::parse_scheme(s)?)
    }

    pub fn from_parsed(t: &SchemeText) -> Result<Self, SchemeError> {
        let ctx = gf::build_field(t.p, t.k)?;
        if let Some(given) = &t.modulus {
            let expected = ctx.modulus();
            let same = given.len() == expected.len()
                && given.iter().zip(&expected).all(|(&g, &e)| g == e as i64);
            if !same {
                return Err(SchemeError::NonCanonicalModulus {
                    given: format!("{given:?}"),
                    expected: format!("{expected:?}"),
                });
            }
        }
        let gens = t
            .gens
            .iter()
            .map(|g| Mat2::from_lit(ctx, g))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ctx, t.r, gens)
    }
}

/// The catalog scheme of type `t` in characteristic `p`, over the least
/// field holding the roots of unity it needs.
pub fn make_catalog(t: ADEType, p: u64) -> Result<SubgroupScheme, SchemeError> {
    let t = ADEType::new(t.letter(), t.index())?;
    if !gf::is_prime(p) {
        return Err(FieldError::NotPrime(p).into());
    }
    if p < t.min_p() {
        return Err(SchemeError::Gate {
            ty: t,
            p,
            min: t.min_p(),
        });
    }
    match t {
        ADEType::A(n) => {
            let r = n as u64 + 1;
            let ctx = gf::field_with_roots(p, 1, &[r])?;
            SubgroupScheme::new(ctx, r, Vec::new())
        }
        ADEType::D(n) => {
            let r = 2 * n as u64 - 4;
            let ctx = gf::field_with_roots(p, 1, &[r, 4])?;
            let z4 = gf::primitive_root_of_unity(ctx, 4)?;
            SubgroupScheme::new(ctx, r, vec![Mat2::antidiag(z4, z4)])
        }
        ADEType::E6 | ADEType::E7 => {
            let ctx = gf::field_with_roots(p, 1, &[8])?;
            let z8 = gf::primitive_root_of_unity(ctx, 8)?;
            let mut gens = binary_tetrahedral(z8)?;
            if t == ADEType::E7 {
                gens.push(Mat2::diag(z8, z8.inv()?));
            }
            SubgroupScheme::new(ctx, 1, gens)
        }
        ADEType::E8 => {
            let ctx = gf::field_with_roots(p, 1, &[10])?;
            let z10 = gf::primitive_root_of_unity(ctx, 10)?;
            let z5 = z10 * z10;
            let c = z5 + z5.inv()?;
            let s = (z5.pow(2) - z5.pow(3)).inv()?;
            let gens = vec![
                Mat2::diag(z10, z10.inv()?),
                Mat2::from_ints(ctx, [[0, 1], [-1, 0]]),
                Mat2::new(c, ctx.one(), ctx.one(), -c)?.scale(s),
            ];
            SubgroupScheme::new(ctx, 1, gens)
        }
    }
}

/// `diag(z4, z4^-1)`, `[[0,z4],[z4,0]]` and `(1/sqrt 2) [[z8^7,z8^7],[z8^5,z8]]`
/// with `sqrt 2 = z8 + z8^-1`.
fn binary_tetrahedral(z8: gf::FieldElem) -> Result<Vec<Mat2>, SchemeError> {
    let z4 = z8 * z8;
    let sqrt2 = z8 + z8.inv()?;
    let m = Mat2::new(z8.pow(7), z8.pow(7), z8.pow(5), z8)?.scale(sqrt2.inv()?);
    Ok(vec![Mat2::diag(z4, z4.inv()?), Mat2::antidiag(z4, z4), m])
}

/// Every catalog type with `|G| <= max_order` that exists in characteristic `p`,
/// in the order A, D, E.
pub fn catalog_types(p: u64, max_order: u64) -> Vec<ADEType> {
    let mut out: Vec<ADEType> = (1..max_order.min(u32::MAX as u64) as u32)
        .map(ADEType::A)
        .collect();
    if p >= 3 {
        out.extend((4..).map(ADEType::D).take_while(|t| t.group_order() <= max_order));
    }
    for t in [ADEType::E6, ADEType::E7, ADEType::E8] {
        if p >= t.min_p() && t.group_order() <= max_order {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn type_parsing() {
        assert_eq!("A3".parse::<ADEType>().unwrap(), ADEType::A(3));
        assert_eq!("d_5".parse::<ADEType>().unwrap(), ADEType::D(5));
        assert_eq!("E7".parse::<ADEType>().unwrap(), ADEType::E7);
        assert!("D3".parse::<ADEType>().is_err());
        assert!("E9".parse::<ADEType>().is_err());
        assert!("A0".parse::<ADEType>().is_err());
        assert_eq!(ADEType::D(5).tag(3), "D n=5 p=3 |G|=12");
    }

    #[test]
    fn catalog_examples() {
        let a3 = make_catalog(ADEType::A(3), 2).unwrap();
        assert_eq!(a3.r(), 4);
        assert!(a3.reduced_part().is_trivial());
        assert_eq!(a3.order(), 4);

        let d5 = make_catalog(ADEType::D(5), 3).unwrap();
        assert_eq!(d5.r(), 6);
        assert_eq!(d5.extra_gens().len(), 1);
        assert_eq!(d5.connected_component(), 3);
        assert_eq!(d5.reduced_part().order(), 4);
        assert_eq!(d5.order(), 12);

        assert!(matches!(
            make_catalog(ADEType::E8, 5),
            Err(SchemeError::Gate { min: 7, .. })
        ));
        assert_eq!(make_catalog(ADEType::E8, 7).unwrap().order(), 120);
    }

    #[test]
    fn components() {
        let a1 = make_catalog(ADEType::A(1), 2).unwrap();
        assert_eq!(a1.connected_component(), 2);
        assert!(a1.reduced_part().is_trivial());

        let d4 = make_catalog(ADEType::D(4), 5).unwrap();
        assert_eq!(d4.connected_component(), 1);
        assert_eq!(d4.reduced_part().order(), 8);

        let a4 = make_catalog(ADEType::A(4), 3).unwrap();
        assert_eq!(a4.connected_component(), 1);
        assert_eq!(a4.reduced_part().order(), 5);
    }

    #[test]
    fn orders_match_table() {
        for p in [2, 3, 5, 7, 11, 13] {
            for t in catalog_types(p, 120) {
                let g = match make_catalog(t, p) {
                    Err(e) if e.is_cap() => continue,
                    other => other.unwrap(),
                };
                assert_eq!(g.order(), t.group_order(), "{t} at p={p}");
                assert!(g.validate().is_empty(), "{t} at p={p}: {:?}", g.validate());
                assert_ne!(g.reduced_part().order() as u64 % p, 0);
                assert_eq!(g.is_reduced(), g.order() == g.reduced_part().order() as u64);
                for h in g.reduced_part().elements() {
                    assert!(h.det().is_one());
                    assert!(!mat2::is_pseudo_reflection(h));
                }
            }
        }
    }

    #[test]
    fn dihedral_square_is_central_point() {
        for (n, p) in [(4, 3), (5, 5), (7, 7)] {
            let g = make_catalog(ADEType::D(n), p).unwrap();
            let s = g.extra_gens()[0];
            let minus = Mat2::scalar(-g.ctx().one());
            assert_eq!(s * s, minus);
            assert!(g.reduced_part().contains(&minus));
        }
    }

    #[test]
    fn sqrt_two_from_eighth_root() {
        for p in [5, 7, 11, 13] {
            let ctx = gf::field_with_roots(p, 1, &[8]).unwrap();
            let z8 = gf::primitive_root_of_unity(ctx, 8).unwrap();
            let s = z8 + z8.inv().unwrap();
            assert_eq!(s * s, ctx.from_int(2));
        }
    }

    #[test]
    fn e7_reading_has_order_48() {
        for p in [5, 7, 11] {
            let g = make_catalog(ADEType::E7, p).unwrap();
            assert_eq!(g.reduced_part().order(), 48);
        }
    }

    #[test]
    fn abelian_scheme() {
        assert!(make_catalog(ADEType::A(5), 3).unwrap().is_abelian_scheme());
        assert!(!make_catalog(ADEType::D(5), 3).unwrap().is_abelian_scheme());
        assert!(!make_catalog(ADEType::E6, 5).unwrap().is_abelian_scheme());
    }

    #[test]
    fn validation_rejects_bad_input() {
        let f5 = gf::build_field(5, 1).unwrap();
        let bad_det = Mat2::from_ints(f5, [[2, 0], [0, 2]]);
        let g = SubgroupScheme::new(f5, 1, vec![bad_det]).unwrap();
        assert!(g.validate().contains(&Violation::NotSpecialLinear(0)));

        let f7 = gf::build_field(7, 1).unwrap();
        let skew = Mat2::from_ints(f7, [[1, 1], [0, 1]]);
        let g = SubgroupScheme::new(f7, 3, vec![skew]).unwrap();
        let v = g.validate();
        assert!(v.contains(&Violation::NotMonomial(0)));
        assert!(v.contains(&Violation::NotLinearlyReductive { order: 21 }));

        let f4 = gf::build_field(2, 2).unwrap();
        let rot = Mat2::from_ints(f4, [[0, 1], [1, 0]]);
        let g = SubgroupScheme::new(f4, 2, vec![rot]).unwrap();
        assert!(!g.validate().is_empty());

        assert!(matches!(
            SubgroupScheme::new(f7, 0, vec![]),
            Err(SchemeError::ZeroR)
        ));
        assert!(SubgroupScheme::new(f7, 5, vec![]).is_err());
    }

    #[test]
    fn text_round_trip() {
        for (t, p) in [
            (ADEType::A(1), 2),
            (ADEType::A(4), 3),
            (ADEType::D(5), 3),
            (ADEType::E8, 7),
        ] {
            let g = make_catalog(t, p).unwrap();
            let s = g.to_text();
            let h = SubgroupScheme::from_text(&s).unwrap();
            assert_eq!(h.to_text(), s);
            assert!(g.same_subgroup(&h).unwrap());
        }
    }

    #[test]
    fn rejects_non_canonical_modulus() {
        let err = SubgroupScheme::from_text("5 2 4\nmodulus: [3,0,1]\n").unwrap_err();
        assert!(matches!(err, SchemeError::NonCanonicalModulus { .. }));
    }

    #[test]
    fn conjugation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let e6 = make_catalog(ADEType::E6, 5).unwrap();
        let t = mat2::random_sl2(e6.ctx(), &mut rng);
        let h = e6.conjugate(&t).unwrap();
        assert_eq!(h.order(), 24);
        assert!(h.validate().is_empty());
        assert!(h.conjugate(&t.inv().unwrap()).unwrap().same_subgroup(&e6).unwrap());

        let d5 = make_catalog(ADEType::D(5), 3).unwrap();
        let n = mat2::random_torus_normalizer(d5.ctx(), &mut rng);
        let h = d5.conjugate(&n).unwrap();
        assert_eq!(h.r(), 6);
        assert!(h.validate().is_empty());
        let skew = Mat2::from_ints(d5.ctx(), [[1, 1], [0, 1]]);
        assert!(matches!(
            d5.conjugate(&skew),
            Err(SchemeError::MovesTorus(_))
        ));

        let a4 = make_catalog(ADEType::A(4), 3).unwrap();
        let h = a4.conjugate(&mat2::random_sl2(a4.ctx(), &mut rng)).unwrap();
        assert_eq!(h.order(), 5);
    }

    #[test]
    fn catalog_listing() {
        let p2: Vec<String> = catalog_types(2, 10).iter().map(|t| t.to_string()).collect();
        assert_eq!(p2, ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9"]);
        let p3 = catalog_types(3, 8);
        assert_eq!(p3.last(), Some(&ADEType::D(4)));
        assert_eq!(p3.len(), 8);
        assert!(catalog_types(7, 200).contains(&ADEType::E8));
    }
}
