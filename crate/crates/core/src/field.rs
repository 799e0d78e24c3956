//! Arithmetic in small finite fields F_q, q = p^m.
//!
//! Elements are encoded as integers in `[0, q)`: the base-p digits of the
//! encoding are the coefficients of a polynomial in `x` of degree < m, the
//! constant coefficient being the least significant digit. Multiplication is
//! carried out modulo a fixed monic irreducible polynomial, chosen as the
//! smallest one under the same base-p encoding (so `x^3 + x + 1` is preferred
//! over `x^3 + x^2 + 1`). Fields are interned: two calls with the same `(p, m)`
//! return handles to the same tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Orders up to this size get a full addition table.
const ADD_TABLE_LIMIT: u32 = 256;

struct Inner {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficients from degree 0 up to degree m.
    modulus: Vec<u32>,
    /// exp[i] = g^i for a fixed generator g, i in [0, 2(q-1)).
    exp: Vec<u16>,
    /// log[a] for a != 0; log[0] is unused.
    log: Vec<u32>,
    neg: Vec<u16>,
    add: Option<Vec<u16>>,
}

/// A finite field F_q. Cheap to clone; all clones share the same tables.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.m == other.0.m)
    }
}

impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.q.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^m` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1 && p <= u32::MAX as u64).then_some((p as u32, m))
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), FieldSpec>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), FieldSpec>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FieldSpec {
    /// The field with `p^m` elements.
    pub fn new(p: u32, m: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p));
        }
        if m < 1 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_ORDER as u64);
        let Some(q) = q else {
            return Err(Error::OrderOverflow { p, m });
        };
        let mut reg = registry().lock().expect("field registry poisoned");
        if let Some(f) = reg.get(&(p, m)) {
            return Ok(f.clone());
        }
        let f = FieldSpec(Arc::new(Inner::build(p, m, q as u32)));
        reg.insert((p, m), f.clone());
        Ok(f)
    }

    /// The field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, m)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Coefficients of the modulus from the constant term upward (monic, length m+1).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_binary(&self) -> bool {
        self.0.q == 2
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.m == 1
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        let s = &self.0;
        if s.p == 2 {
            return a ^ b;
        }
        if s.m == 1 {
            let r = a as u32 + b as u32;
            return if r >= s.q { (r - s.q) as u16 } else { r as u16 };
        }
        if let Some(t) = &s.add {
            return t[a as usize * s.q as usize + b as usize];
        }
        digit_add(s.p, s.m, a as u32, b as u32) as u16
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        if self.0.p == 2 {
            a
        } else {
            self.0.neg[a as usize]
        }
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = &self.0;
        s.exp[(s.log[a as usize] + s.log[b as usize]) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u16) -> Option<u16> {
        if a == 0 {
            return None;
        }
        let s = &self.0;
        let l = s.log[a as usize];
        Some(s.exp[((s.q - 1 - l) % (s.q - 1)) as usize])
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let s = &self.0;
        let l = (s.log[a as usize] as u64 * (e % (s.q as u64 - 1))) % (s.q as u64 - 1);
        s.exp[l as usize]
    }

    /// A fixed generator of the multiplicative group.
    pub fn primitive_element(&self) -> u16 {
        self.0.exp[1.min(self.0.exp.len() - 1)]
    }

    pub fn element(&self, repr: u32) -> Result<FieldElement> {
        if repr >= self.q() {
            return Err(Error::EntryOutOfRange { value: repr, q: self.q() });
        }
        Ok(FieldElement { spec: self.clone(), repr: repr as u16 })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { spec: self.clone(), repr: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { spec: self.clone(), repr: 1 }
    }

    /// Polynomial-coefficient form of an element, most significant coefficient
    /// first, padded to m digits.
    pub fn format_element(&self, repr: u16) -> String {
        let mut digits = vec![0u32; self.m() as usize];
        let mut r = repr as u32;
        for d in digits.iter_mut().rev() {
            *d = r % self.p();
            r /= self.p();
        }
        digits.iter().map(|&d| digit_char(d)).collect()
    }

    /// Inverse of [`FieldSpec::format_element`]; shorter strings are accepted.
    pub fn parse_element(&self, s: &str) -> Option<u16> {
        if s.is_empty() || s.len() > self.m() as usize {
            return None;
        }
        let mut r: u32 = 0;
        for c in s.chars() {
            let d = c.to_digit(36)?;
            if d >= self.p() {
                return None;
            }
            r = r * self.p() + d;
        }
        Some(r as u16)
    }
}

/// Character for a digit in `[0, 36)`.
pub fn digit_char(d: u32) -> char {
    std::char::from_digit(d, 36).expect("digit out of range")
}

fn digit_add(p: u32, m: u32, mut a: u32, mut b: u32) -> u32 {
    let mut r = 0;
    let mut place = 1;
    for _ in 0..m {
        r += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    r
}

fn to_digits(p: u32, m: u32, mut a: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(m as usize);
    for _ in 0..m {
        v.push(a % p);
        a /= p;
    }
    v
}

fn from_digits(p: u32, d: &[u32]) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `m`, over F_p.
/// Coefficients run from degree 0 upward.
fn poly_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = r.pop().expect("nonempty");
        if lead != 0 {
            let off = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                r[off + i] = (r[off + i] + (p - lead) * c % p) % p;
            }
        }
    }
    r
}

fn poly_mul_mod(p: u32, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let mut r = poly_rem(p, &prod, m);
    r.resize(m.len() - 1, 0);
    r
}

/// Irreducibility by trial division by every monic polynomial of degree
/// between 1 and deg/2.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut g = to_digits(p, d as u32, low as u32);
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree m over F_p under the base-p encoding.
fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    let count = (p as u64).pow(m);
    for low in 0..count {
        let mut f = to_digits(p, m, low as u32);
        f.push(1);
        if is_irreducible(p, &f) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

impl Inner {
    fn build(p: u32, m: u32, q: u32) -> Inner {
        let modulus = if m == 1 { vec![0, 1] } else { smallest_irreducible(p, m) };
        let mul_repr = |a: u32, b: u32| -> u32 {
            if m == 1 {
                ((a as u64 * b as u64) % p as u64) as u32
            } else {
                let r = poly_mul_mod(p, &to_digits(p, m, a), &to_digits(p, m, b), &modulus);
                from_digits(p, &r)
            }
        };
        let order = q - 1;
        let mut exp = Vec::new();
        if order == 1 {
            exp = vec![1, 1];
        } else {
            for g in 2..q {
                let mut cycle = Vec::with_capacity(order as usize);
                let mut x = 1u32;
                loop {
                    cycle.push(x as u16);
                    x = mul_repr(x, g);
                    if x == 1 {
                        break;
                    }
                }
                if cycle.len() == order as usize {
                    exp = cycle;
                    break;
                }
            }
            let again = exp.clone();
            exp.extend(again);
        }
        let mut log = vec![0u32; q as usize];
        for (i, &e) in exp.iter().take(order as usize).enumerate() {
            log[e as usize] = i as u32;
        }
        let neg: Vec<u16> = (0..q)
            .map(|a| {
                let d: Vec<u32> = to_digits(p, m, a).iter().map(|&c| (p - c) % p).collect();
                from_digits(p, &d) as u16
            })
            .collect();
        let add = (q <= ADD_TABLE_LIMIT && m > 1).then(|| {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(p, m, a, b) as u16;
                }
            }
            t
        });
        Inner { p, m, q, modulus, exp, log, neg, add }
    }
}

/// An element of a specific field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    spec: FieldSpec,
    repr: u16,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.repr, self.spec)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec.format_element(self.repr))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Neg,
    Inv,
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn repr(&self) -> u16 {
        self.repr
    }

    pub fn is_zero(&self) -> bool {
        self.repr == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch { left: self.spec.q(), right: other.spec.q() });
        }
        Ok(())
    }

    fn wrap(&self, repr: u16) -> FieldElement {
        FieldElement { spec: self.spec.clone(), repr }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(self.wrap(self.spec.add(self.repr, other.repr)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(self.wrap(self.spec.mul(self.repr, other.repr)))
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.spec.neg(self.repr))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        self.spec.inv(self.repr).map(|r| self.wrap(r)).ok_or(Error::DivisionByZero)
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.wrap(self.spec.pow(self.repr, e))
    }
}

/// Applies `op` to `a` (and `b` for the binary operations).
pub fn field_arith(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement> {
    a.same_field(b)?;
    match op {
        FieldOp::Add => a.add(b),
        FieldOp::Mul => a.mul(b),
        FieldOp::Neg => Ok(a.neg()),
        FieldOp::Inv => a.inv(),
    }
}
