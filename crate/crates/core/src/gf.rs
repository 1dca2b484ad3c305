//! Exact arithmetic in finite fields `F_{p^k}`.
//!
//! Every `(p, k)` pair has exactly one context: the modulus is the monic
//! irreducible polynomial of degree `k` with the least coefficient code, and
//! contexts are interned, so two handles for the same `(p, k)` compare equal
//! by identity. Elements carry their context and are `Copy`.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 24;
/// Fields are limited to at most `2^MAX_FIELD_BITS` elements so that element
/// codes fit a `u64` and `q - 1` can be factored by trial division.
pub const MAX_FIELD_BITS: u32 = 48;
const MAX_CHARACTERISTIC: u64 = 1 << 31;

type Coeffs = [u32; MAX_DEGREE];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is outside the supported range")]
    CharacteristicTooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("F_{p}^{k} exceeds the supported field size")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("operands live in different fields ({left} vs {right})")]
    ContextMismatch { left: String, right: String },
    #[error("root order {r} is not coprime to the characteristic {p}")]
    NotCoprime { r: u64, p: u64 },
    #[error("F_{p}^{k} has no primitive {r}-th root of unity; extend the field first")]
    FieldTooSmall { p: u64, k: u32, r: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("root index must be positive")]
    ZeroExponent,
    #[error("no embedding of F_{src_p}^{src_k} into F_{dst_p}^{dst_k}")]
    NoEmbedding {
        src_p: u64,
        src_k: u32,
        dst_p: u64,
        dst_k: u32,
    },
    #[error("coefficient list of length {len} does not fit degree {k}")]
    BadCoefficients { len: usize, k: u32 },
    #[error("code {code} is not an element of a field with {q} elements")]
    BadCode { code: u64, q: u64 },
}

/// Raw polynomial-residue arithmetic shared by the construction code and the
/// finished context.
#[derive(Clone)]
struct Arith {
    p: u64,
    k: usize,
    /// Low `k` coefficients of the monic modulus.
    modulus: Coeffs,
}

impl Arith {
    fn add(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let mut r = [0u32; MAX_DEGREE];
        for i in 0..self.k {
            let s = a[i] as u64 + b[i] as u64;
            r[i] = if s >= self.p { s - self.p } else { s } as u32;
        }
        r
    }

    fn sub(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let mut r = [0u32; MAX_DEGREE];
        for i in 0..self.k {
            let (x, y) = (a[i] as u64, b[i] as u64);
            r[i] = if x >= y { x - y } else { x + self.p - y } as u32;
        }
        r
    }

    fn neg(&self, a: &Coeffs) -> Coeffs {
        let mut r = [0u32; MAX_DEGREE];
        for i in 0..self.k {
            if a[i] != 0 {
                r[i] = (self.p - a[i] as u64) as u32;
            }
        }
        r
    }

    fn mul(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let p = self.p;
        let k = self.k;
        let mut r = [0u32; MAX_DEGREE];
        if k == 1 {
            r[0] = ((a[0] as u64 * b[0] as u64) % p) as u32;
            return r;
        }
        let mut t = [0u64; 2 * MAX_DEGREE];
        // With p < 2^20 a full row of products fits in a u64 without reduction.
        let lazy = p < (1 << 20);
        for i in 0..k {
            let ai = a[i] as u64;
            if ai == 0 {
                continue;
            }
            for j in 0..k {
                if lazy {
                    t[i + j] += ai * b[j] as u64;
                } else {
                    t[i + j] = (t[i + j] + ai * b[j] as u64) % p;
                }
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c = t[i] % p;
            t[i] = 0;
            if c == 0 {
                continue;
            }
            let neg_c = p - c;
            for j in 0..k {
                let m = self.modulus[j] as u64;
                if m != 0 {
                    t[i - k + j] = (t[i - k + j] % p + neg_c * m) % p;
                }
            }
        }
        for i in 0..k {
            r[i] = (t[i] % p) as u32;
        }
        r
    }

    fn one(&self) -> Coeffs {
        let mut r = [0u32; MAX_DEGREE];
        r[0] = 1;
        r
    }

    fn pow(&self, a: &Coeffs, mut e: u64) -> Coeffs {
        let mut base = *a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn code(&self, a: &Coeffs) -> u64 {
        a[..self.k]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c as u64)
    }

    fn decode(&self, mut code: u64) -> Coeffs {
        let mut r = [0u32; MAX_DEGREE];
        for slot in r.iter_mut().take(self.k) {
            *slot = (code % self.p) as u32;
            code /= self.p;
        }
        r
    }
}

struct FieldData {
    arith: Arith,
    q: u64,
    generator: Coeffs,
    /// Distinct prime divisors of `q - 1`.
    unit_primes: Vec<u64>,
    /// Image of the class of `x` of `F_{p^d}` in this field, keyed by `d`.
    embeddings: Mutex<HashMap<u32, Coeffs>>,
}

/// Handle to an interned finite field `F_{p^k}`.
#[derive(Clone, Copy)]
pub struct FieldCtx(&'static FieldData);

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for FieldCtx {}

impl Hash for FieldCtx {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p().hash(state);
        self.k().hash(state);
    }
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p(), self.k())
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p(), self.k())
    }
}

fn registry() -> &'static Mutex<HashMap<(u64, u32), &'static FieldData>> {
    static REGISTRY: OnceLock<Mutex<HashMap<(u64, u32), &'static FieldData>>> = OnceLock::new();
    REGISTRY.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Splits `m = p^e * rest` with `p` not dividing `rest`.
pub fn split_prime_part(mut m: u64, p: u64) -> (u64, u64) {
    let mut pe = 1;
    if m == 0 {
        return (1, 0);
    }
    while m.is_multiple_of(p) {
        m /= p;
        pe *= p;
    }
    (pe, m)
}

/// Least `k` such that `F_{p^k}` contains a primitive `r'`-th root of unity,
/// where `r'` is the prime-to-`p` part of `r`.
pub fn ext_degree_for_root(p: u64, r: u64) -> u32 {
    let (_, r) = split_prime_part(r.max(1), p);
    if r == 1 {
        return 1;
    }
    let base = p % r;
    let mut acc = base;
    let mut k = 1;
    while acc != 1 {
        acc = (acc as u128 * base as u128 % r as u128) as u64;
        k += 1;
    }
    k
}

fn field_size(p: u64, k: u32) -> Option<u64> {
    let q = p.checked_pow(k)?;
    (q <= 1u64 << MAX_FIELD_BITS).then_some(q)
}

// --- polynomials over F_p used only while choosing the modulus ---

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = inv_mod(f[df], p);
    while r.len() > df {
        let top = r.len() - 1;
        let c = r[top] * lead_inv % p;
        for (j, &fj) in f.iter().enumerate() {
            let idx = top - df + j;
            r[idx] = (r[idx] + (p - c) * fj % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut t = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            t[i + j] = (t[i + j] + x * y) % p;
        }
    }
    poly_rem(&t, f, p)
}

fn poly_powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's irreducibility test for a monic `f` of degree `k`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = (f.len() - 1) as u64;
    if k == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let k_primes = prime_factors(k);
    let mut h = x.clone();
    for i in 1..=k {
        h = poly_powmod(&h, p, f, p);
        if i < k && k_primes.iter().any(|&q| i == k / q) {
            let mut d = h.clone();
            d.resize(d.len().max(2), 0);
            d[1] = (d[1] + p - 1) % p;
            trim(&mut d);
            let g = poly_gcd(f, &d, p);
            if g.len() != 1 {
                return false;
            }
        }
    }
    let mut hx = h;
    hx.resize(hx.len().max(2), 0);
    hx[1] = (hx[1] + p - 1) % p;
    trim(&mut hx);
    hx.is_empty()
}

fn canonical_modulus(p: u64, k: u32, q: u64) -> Coeffs {
    for code in 0..q {
        let mut f = Vec::with_capacity(k as usize + 1);
        let mut c = code;
        for _ in 0..k {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            let mut m = [0u32; MAX_DEGREE];
            for (slot, &v) in m.iter_mut().zip(&f) {
                *slot = v as u32;
            }
            return m;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

fn construct(p: u64, k: u32) -> Result<FieldData, FieldError> {
    let q = field_size(p, k).ok_or(FieldError::FieldTooLarge { p, k })?;
    let modulus = canonical_modulus(p, k, q);
    let arith = Arith {
        p,
        k: k as usize,
        modulus,
    };
    let unit_primes = prime_factors(q - 1);
    let one = arith.one();
    let generator = (1..q)
        .map(|code| arith.decode(code))
        .find(|g| {
            unit_primes
                .iter()
                .all(|&l| arith.pow(g, (q - 1) / l) != one)
        })
        .expect("the unit group of a finite field is cyclic");
    Ok(FieldData {
        arith,
        q,
        generator,
        unit_primes,
        embeddings: Mutex::new(HashMap::new()),
    })
}

/// Returns the canonical context for `F_{p^k}`.
pub fn build_field(p: u64, k: u32) -> Result<FieldCtx, FieldError> {
    if p >= MAX_CHARACTERISTIC {
        return Err(FieldError::CharacteristicTooLarge(p));
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if k as usize > MAX_DEGREE || field_size(p, k).is_none() {
        return Err(FieldError::FieldTooLarge { p, k });
    }
    if let Some(data) = registry().lock().unwrap().get(&(p, k)) {
        return Ok(FieldCtx(data));
    }
    let data = construct(p, k)?;
    let mut reg = registry().lock().unwrap();
    let entry = reg
        .entry((p, k))
        .or_insert_with(|| Box::leak(Box::new(data)));
    Ok(FieldCtx(entry))
}

/// Smallest field of characteristic `p` containing primitive roots of unity
/// of all the given orders (prime-to-`p` parts) and an extension of degree
/// `min_degree`.
pub fn field_with_roots(p: u64, min_degree: u32, orders: &[u64]) -> Result<FieldCtx, FieldError> {
    let k = orders
        .iter()
        .fold(min_degree.max(1) as u64, |acc, &r| {
            lcm(acc, ext_degree_for_root(p, r) as u64)
        });
    let k = u32::try_from(k).map_err(|_| FieldError::FieldTooLarge { p, k: u32::MAX })?;
    build_field(p, k)
}

/// Smallest field containing both `a` and `b`.
pub fn common_field(a: FieldCtx, b: FieldCtx) -> Result<FieldCtx, FieldError> {
    if a.p() != b.p() {
        return Err(FieldError::NoEmbedding {
            src_p: a.p(),
            src_k: a.k(),
            dst_p: b.p(),
            dst_k: b.k(),
        });
    }
    if a == b {
        return Ok(a);
    }
    let k = lcm(a.k() as u64, b.k() as u64);
    let k = u32::try_from(k).map_err(|_| FieldError::FieldTooLarge { p: a.p(), k: u32::MAX })?;
    build_field(a.p(), k)
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.0.arith.p
    }

    pub fn k(&self) -> u32 {
        self.0.arith.k as u32
    }

    /// Number of elements.
    pub fn size(&self) -> u64 {
        self.0.q
    }

    /// Coefficients of the monic modulus, constant term first, including the
    /// leading 1.
    pub fn modulus(&self) -> Vec<u64> {
        let k = self.0.arith.k;
        let mut m: Vec<u64> = self.0.arith.modulus[..k].iter().map(|&c| c as u64).collect();
        m.push(1);
        m
    }

    fn elem(&self, c: Coeffs) -> FieldElem {
        FieldElem { ctx: *self, c }
    }

    pub fn zero(&self) -> FieldElem {
        self.elem([0; MAX_DEGREE])
    }

    pub fn one(&self) -> FieldElem {
        self.elem(self.0.arith.one())
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        let p = self.p() as i64;
        let mut c = [0u32; MAX_DEGREE];
        c[0] = n.rem_euclid(p) as u32;
        self.elem(c)
    }

    /// Element with the given residue coefficients, constant term first.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElem, FieldError> {
        if coeffs.len() > self.0.arith.k {
            return Err(FieldError::BadCoefficients {
                len: coeffs.len(),
                k: self.k(),
            });
        }
        let p = self.p() as i64;
        let mut c = [0u32; MAX_DEGREE];
        for (slot, &v) in c.iter_mut().zip(coeffs) {
            *slot = v.rem_euclid(p) as u32;
        }
        Ok(self.elem(c))
    }

    pub fn from_code(&self, code: u64) -> Result<FieldElem, FieldError> {
        if code >= self.size() {
            return Err(FieldError::BadCode {
                code,
                q: self.size(),
            });
        }
        Ok(self.elem(self.0.arith.decode(code)))
    }

    /// Least-code element of multiplicative order `q - 1`.
    pub fn generator(&self) -> FieldElem {
        self.elem(self.0.generator)
    }

    /// All elements in code order. Intended for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        let ctx = *self;
        (0..self.size()).map(move |code| ctx.elem(ctx.0.arith.decode(code)))
    }

    /// The residue class of `x`, i.e. the root of the modulus defining the field.
    pub fn primitive_element(&self) -> FieldElem {
        if self.k() == 1 {
            // F_p is presented as F_p[x]/(x), so x is zero.
            return self.zero();
        }
        let mut c = [0u32; MAX_DEGREE];
        c[1] = 1;
        self.elem(c)
    }

    fn check(&self, other: &FieldCtx) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

/// An element of `F_{p^k}`, stored as residue coefficients of the canonical
/// modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    ctx: FieldCtx,
    c: Coeffs,
}

impl FieldElem {
    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.c[..self.ctx.0.arith.k]
    }

    /// `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`.
    pub fn code(&self) -> u64 {
        self.ctx.0.arith.code(&self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// Whether the element lies in the prime subfield.
    pub fn in_prime_field(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0)
    }

    pub fn try_add(self, rhs: Self) -> Result<Self, FieldError> {
        self.ctx.check(&rhs.ctx)?;
        Ok(self.ctx.elem(self.ctx.0.arith.add(&self.c, &rhs.c)))
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self, FieldError> {
        self.ctx.check(&rhs.ctx)?;
        Ok(self.ctx.elem(self.ctx.0.arith.sub(&self.c, &rhs.c)))
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self, FieldError> {
        self.ctx.check(&rhs.ctx)?;
        Ok(self.ctx.elem(self.ctx.0.arith.mul(&self.c, &rhs.c)))
    }

    pub fn try_div(self, rhs: Self) -> Result<Self, FieldError> {
        self.ctx.check(&rhs.ctx)?;
        Ok(self * rhs.inv()?)
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(self.ctx.size() - 2))
    }

    pub fn pow(self, e: u64) -> Self {
        self.ctx.elem(self.ctx.0.arith.pow(&self.c, e))
    }

    /// `self^e` for a signed exponent; panics on a negative power of zero.
    pub fn powi(self, e: i64) -> Self {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inv().expect("negative power of zero").pow(e.unsigned_abs())
        }
    }

    /// Multiplicative order, or `None` for zero.
    pub fn order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let mut ord = self.ctx.size() - 1;
        for &l in &self.ctx.0.unit_primes {
            while ord.is_multiple_of(l) && self.pow(ord / l).is_one() {
                ord /= l;
            }
        }
        Some(ord)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self, self.ctx)
    }
}

/// Canonical text: an integer for prime-subfield elements, otherwise the full
/// coefficient list, constant term first.
impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.in_prime_field() {
            return write!(f, "{}", self.c[0]);
        }
        write!(f, "[")?;
        for (i, c) in self.coeffs().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by code; elements of different fields order by `(p, k)` first.
impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ctx.p(), self.ctx.k(), self.code()).cmp(&(other.ctx.p(), other.ctx.k(), other.code()))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $assign_tr for FieldElem {
            fn $assign(&mut self, rhs: FieldElem) {
                *self = $tr::$method(*self, rhs);
            }
        }
    };
}

binop!(Add, add, try_add, AddAssign, add_assign);
binop!(Sub, sub, try_sub, SubAssign, sub_assign);
binop!(Mul, mul, try_mul, MulAssign, mul_assign);

impl Div for FieldElem {
    type Output = FieldElem;
    fn div(self, rhs: FieldElem) -> FieldElem {
        match self.try_div(rhs) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        self.ctx.elem(self.ctx.0.arith.neg(&self.c))
    }
}

/// Deterministic primitive `r`-th root of unity: `g^((q-1)/r)` for the
/// canonical generator `g`.
pub fn primitive_root_of_unity(ctx: FieldCtx, r: u64) -> Result<FieldElem, FieldError> {
    let p = ctx.p();
    if r == 0 || gcd(r, p) != 1 {
        return Err(FieldError::NotCoprime { r, p });
    }
    let q = ctx.size();
    if !(q - 1).is_multiple_of(r) {
        return Err(FieldError::FieldTooSmall { p, k: ctx.k(), r });
    }
    Ok(ctx.generator().pow((q - 1) / r))
}

/// Canonical embedding of `src` into a field containing its field.
///
/// The class of `x` maps to the least-code root of the source modulus in the
/// target field.
pub fn embed(src: FieldElem, dst: FieldCtx) -> Result<FieldElem, FieldError> {
    let from = src.ctx;
    if from == dst {
        return Ok(src);
    }
    if from.p() != dst.p() || !dst.k().is_multiple_of(from.k()) {
        return Err(FieldError::NoEmbedding {
            src_p: from.p(),
            src_k: from.k(),
            dst_p: dst.p(),
            dst_k: dst.k(),
        });
    }
    if src.in_prime_field() {
        return Ok(dst.from_int(src.c[0] as i64));
    }
    let beta = dst.elem(embedding_root(from, dst));
    let mut acc = dst.zero();
    for &c in src.coeffs().iter().rev() {
        acc = acc * beta + dst.from_int(c as i64);
    }
    Ok(acc)
}

fn embedding_root(from: FieldCtx, dst: FieldCtx) -> Coeffs {
    if let Some(c) = dst.0.embeddings.lock().unwrap().get(&from.k()) {
        return *c;
    }
    let modulus: Vec<FieldElem> = from.modulus().iter().map(|&c| dst.from_int(c as i64)).collect();
    let eval = |x: FieldElem| {
        modulus
            .iter()
            .rev()
            .fold(dst.zero(), |acc, &c| acc * x + c)
    };
    // Subfield F_{p^d} inside dst: zero plus powers of h.
    let h = dst.generator().pow((dst.size() - 1) / (from.size() - 1));
    let mut x = dst.one();
    let mut first = None;
    for _ in 0..from.size() - 1 {
        if eval(x).is_zero() {
            first = Some(x);
            break;
        }
        x *= h;
    }
    let first = first.expect("the subfield contains every root of an irreducible factor");
    // The other roots form the Frobenius orbit of the first.
    let mut best = first;
    let mut y = first;
    for _ in 1..from.k() {
        y = y.pow(dst.p());
        if y.code() < best.code() {
            best = y;
        }
    }
    dst.0.embeddings.lock().unwrap().insert(from.k(), best.c);
    best.c
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Discrete log of `a` to the base `h`, where `h` has order `ell^e` and `a`
/// lies in the group it generates.
fn sylow_log(a: FieldElem, h: FieldElem, ell: u64, e: u32) -> Option<u64> {
    let top = h.pow(ell.pow(e - 1)); // order ell
    let mut x = 0u64;
    let mut ell_pow = 1u64;
    for i in 0..e {
        // (a * h^-x)^(ell^(e-1-i)) = top^digit
        let residue = a * h.pow(x).inv().ok()?;
        let probe = residue.pow(ell.pow(e - 1 - i));
        let mut t = a.ctx().one();
        let mut digit = None;
        for d in 0..ell {
            if t == probe {
                digit = Some(d);
                break;
            }
            t *= top;
        }
        let digit = digit?;
        x += digit * ell_pow;
        ell_pow *= ell;
    }
    Some(x)
}

/// One `n`-th root of `a` inside `a`'s own field, if it exists there.
fn root_in_field(a: FieldElem, n: u64) -> Option<FieldElem> {
    let ctx = a.ctx();
    if a.is_zero() {
        return Some(a);
    }
    let p = ctx.p();
    let (ps, n1) = split_prime_part(n, p);
    // p-th roots are unique: x -> x^p is the Frobenius automorphism.
    let mut a = a;
    let mut s = ps;
    while s > 1 {
        a = a.pow(ctx.size() / p);
        s /= p;
    }
    let m = ctx.size() - 1;
    let t = gcd(n1, m);
    if !a.pow(m / t).is_one() {
        return None;
    }
    if n1 == 1 {
        return Some(a);
    }
    // Split the cyclic unit group as C_{m1} x C_{m2} where m1 collects the
    // primes shared with n1.
    let mut m1 = 1u64;
    let mut m2 = m;
    for l in prime_factors(n1) {
        while m2.is_multiple_of(l) {
            m2 /= l;
            m1 *= l;
        }
    }
    // Projections onto the two factors: exponents that are 1 mod one part
    // and 0 mod the other.
    let project = |keep: u64, kill: u64| -> u64 {
        if keep == 1 {
            return 0;
        }
        let inv = mod_inverse(kill % keep, keep).expect("coprime parts");
        (kill as u128 * inv as u128 % m as u128) as u64
    };
    let a1 = a.pow(project(m1, m2));
    let a2 = a.pow(project(m2, m1));
    // Root in C_{m2}: n1 is invertible mod m2.
    let b2 = if m2 == 1 {
        ctx.one()
    } else {
        a2.pow(mod_inverse(n1 % m2, m2)?)
    };
    // Root in C_{m1} by Pohlig-Hellman over the small primes of n1.
    let b1 = if m1 == 1 {
        ctx.one()
    } else {
        let h = ctx.generator().pow(m2);
        let mut log = 0u64;
        let mut modulus = 1u64;
        for l in prime_factors(m1) {
            let mut e = 0u32;
            let mut le = 1u64;
            while m1.is_multiple_of(le * l) {
                le *= l;
                e += 1;
            }
            let hl = h.pow(m1 / le);
            let al = a1.pow(m1 / le);
            let x = sylow_log(al, hl, l, e)?;
            // CRT: log = x mod le, log = previous mod modulus.
            let inv = mod_inverse(modulus % le, le).unwrap_or(0);
            let diff = (x as i128 - log as i128).rem_euclid(le as i128) as u128;
            let step = diff * inv as u128 % le as u128;
            log = (log as u128 + modulus as u128 * step) as u64;
            modulus *= le;
        }
        let d = gcd(n1, m1);
        if !log.is_multiple_of(d) {
            return None;
        }
        let reduced = m1 / d;
        let exp = if reduced == 1 {
            0
        } else {
            ((log / d) as u128 * mod_inverse((n1 / d) % reduced, reduced)? as u128 % reduced as u128)
                as u64
        };
        h.pow(exp)
    };
    let b = b1 * b2;
    debug_assert_eq!(b.pow(n1), a);
    Some(b)
}

/// An `n`-th root of `a` in the least extension of `a`'s field that contains
/// one; among the roots there, the one with the least code.
pub fn nth_root(ctx: FieldCtx, a: FieldElem, n: u64) -> Result<(FieldCtx, FieldElem), FieldError> {
    ctx.check(&a.ctx)?;
    if n == 0 {
        return Err(FieldError::ZeroExponent);
    }
    if a.is_zero() {
        return Ok((ctx, a));
    }
    let mut m = 1u32;
    loop {
        let big_k = ctx
            .k()
            .checked_mul(m)
            .ok_or(FieldError::FieldTooLarge { p: ctx.p(), k: u32::MAX })?;
        let big = build_field(ctx.p(), big_k)?;
        let a_big = embed(a, big)?;
        if let Some(b) = root_in_field(a_big, n) {
            let (_, n1) = split_prime_part(n, big.p());
            let t = gcd(n1, big.size() - 1);
            let zeta = primitive_root_of_unity(big, t)?;
            let mut best = b;
            let mut cand = b;
            for _ in 1..t {
                cand *= zeta;
                if cand.code() < best.code() {
                    best = cand;
                }
            }
            return Ok((big, best));
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force irreducibility: no monic factor of degree 1..=k/2.
    fn brute_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        for d in 1..=k / 2 {
            let count = p.pow(d as u32);
            for code in 0..count {
                let mut g: Vec<u64> = (0..d).map(|i| code / p.pow(i as u32) % p).collect();
                g.push(1);
                if poly_rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn ext_degree_examples() {
        assert_eq!(ext_degree_for_root(3, 8), 2);
        assert_eq!(ext_degree_for_root(7, 5), 4);
        assert_eq!(ext_degree_for_root(5, 1), 1);
        assert_eq!(ext_degree_for_root(3, 6), 1);
    }

    #[test]
    fn ext_degree_matches_brute_force() {
        for p in [2u64, 3, 5, 7, 11] {
            for r in 1..40u64 {
                let (_, r1) = split_prime_part(r, p);
                let brute = (1u32..)
                    .find(|&k| (0..k).fold(1u64, |acc, _| acc * p % r1) == 1 % r1)
                    .unwrap();
                assert_eq!(ext_degree_for_root(p, r), brute, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn build_field_rejects_composites() {
        assert_eq!(build_field(4, 1), Err(FieldError::NotPrime(4)));
        assert!(matches!(build_field(7, 0), Err(FieldError::ZeroDegree)));
        assert!(matches!(build_field(2, 60), Err(FieldError::FieldTooLarge { .. })));
    }

    #[test]
    fn prime_field_context() {
        let f = build_field(7, 1).unwrap();
        assert_eq!(f.size(), 7);
        assert_eq!(f.modulus(), vec![0, 1]);
        assert_eq!(f.generator().code(), 3);
    }

    #[test]
    fn canonical_modulus_is_least_irreducible() {
        for (p, k) in [(3u64, 2u32), (2, 3), (2, 4), (5, 2), (3, 3), (7, 2)] {
            let f = build_field(p, k).unwrap();
            let m = f.modulus();
            let first = (0..p.pow(k))
                .map(|code| {
                    let mut g: Vec<u64> = (0..k).map(|i| code / p.pow(i) % p).collect();
                    g.push(1);
                    g
                })
                .find(|g| brute_irreducible(g, p))
                .unwrap();
            assert_eq!(m, first, "p={p} k={k}");
        }
        // x^2 + 1 is the least irreducible quadratic over F_3.
        assert_eq!(build_field(3, 2).unwrap().modulus(), vec![1, 0, 1]);
    }

    #[test]
    fn contexts_are_interned() {
        let a = build_field(3, 2).unwrap();
        let b = build_field(3, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.generator(), b.generator());
    }

    #[test]
    fn primitive_roots() {
        let f7 = build_field(7, 1).unwrap();
        assert_eq!(primitive_root_of_unity(f7, 3).unwrap(), f7.from_int(2));
        assert_eq!(primitive_root_of_unity(f7, 1).unwrap(), f7.one());
        assert_eq!(
            primitive_root_of_unity(f7, 7),
            Err(FieldError::NotCoprime { r: 7, p: 7 })
        );
        assert!(matches!(
            primitive_root_of_unity(f7, 4),
            Err(FieldError::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn generator_is_least_code_of_full_order() {
        for (p, k) in [(7u64, 1u32), (3, 2), (2, 4), (5, 2)] {
            let f = build_field(p, k).unwrap();
            let brute = f
                .elements()
                .filter(|x| !x.is_zero())
                .find(|x| {
                    let mut y = *x;
                    let mut n = 1;
                    while !y.is_one() {
                        y *= *x;
                        n += 1;
                    }
                    n == f.size() - 1
                })
                .unwrap();
            assert_eq!(f.generator(), brute);
        }
    }

    #[test]
    fn nth_root_examples() {
        let f7 = build_field(7, 1).unwrap();
        let (ctx, b) = nth_root(f7, f7.from_int(4), 2).unwrap();
        assert_eq!(ctx, f7);
        assert_eq!(b, f7.from_int(2));
        let (ctx, b) = nth_root(f7, f7.one(), 5).unwrap();
        assert_eq!((ctx, b), (f7, f7.one()));

        let f5 = build_field(5, 1).unwrap();
        let (ctx, b) = nth_root(f5, f5.from_int(2), 2).unwrap();
        assert_eq!(ctx.k(), 2);
        assert_eq!(b * b, embed(f5.from_int(2), ctx).unwrap());
    }

    #[test]
    fn nth_root_is_least_code_root() {
        let f = build_field(3, 2).unwrap();
        for a in f.elements().filter(|x| !x.is_zero()) {
            for n in 1..=8u64 {
                let (ctx, b) = nth_root(f, a, n).unwrap();
                let a_big = embed(a, ctx).unwrap();
                assert_eq!(b.pow(n), a_big);
                if ctx == f {
                    let least = f.elements().find(|x| x.pow(n) == a).unwrap();
                    assert_eq!(b, least);
                } else {
                    assert!(f.elements().all(|x| x.pow(n) != a));
                }
            }
        }
    }

    #[test]
    fn embed_examples() {
        let f3 = build_field(3, 1).unwrap();
        let f9 = build_field(3, 2).unwrap();
        let two = f3.from_int(2);
        assert_eq!(embed(two, f3).unwrap(), two);
        assert_eq!(embed(two, f9).unwrap(), f9.from_int(2));
        let f5 = build_field(5, 1).unwrap();
        assert!(matches!(embed(two, f5), Err(FieldError::NoEmbedding { .. })));
        let f27 = build_field(3, 3).unwrap();
        assert!(embed(f9.generator(), f27).is_err());
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let small = build_field(2, 2).unwrap();
        let big = build_field(2, 4).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                let (ea, eb) = (embed(a, big).unwrap(), embed(b, big).unwrap());
                assert_eq!(embed(a * b, big).unwrap(), ea * eb);
                assert_eq!(embed(a + b, big).unwrap(), ea + eb);
            }
        }
    }

    #[test]
    fn frobenius_fixes_every_element() {
        for (p, k) in [(2u64, 3u32), (3, 2), (5, 2), (7, 1)] {
            let f = build_field(p, k).unwrap();
            for x in f.elements() {
                assert_eq!(x.pow(f.size()), x);
                if !x.is_zero() {
                    assert!((x * x.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn mixed_contexts_are_rejected() {
        let a = build_field(3, 1).unwrap().one();
        let b = build_field(3, 2).unwrap().one();
        assert!(matches!(a.try_add(b), Err(FieldError::ContextMismatch { .. })));
        assert!(std::panic::catch_unwind(|| a * b).is_err());
    }

    #[test]
    fn display_is_canonical() {
        let f9 = build_field(3, 2).unwrap();
        assert_eq!(f9.from_int(-1).to_string(), "2");
        assert_eq!(f9.from_coeffs(&[1, 2]).unwrap().to_string(), "[1,2]");
        assert_eq!(f9.from_code(7).unwrap().coeffs(), &[1, 2]);
    }
}
