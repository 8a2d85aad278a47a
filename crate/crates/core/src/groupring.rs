//! Integral group rings `Z[A]` over a coefficient group with canonical keys.
//!
//! [`GroupRing`] is generic in the key group; the free abelian case
//! `A = Z^r` is [`Laurent`], keyed by [`Monomial`] exponent vectors, and
//! carries the valuation and exact-division machinery.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
    #[error("operands live over different coefficient groups")]
    MismatchedGroups,
    #[error("operation is undefined on the zero element")]
    ZeroInput,
    #[error("division by zero")]
    ZeroDivisor,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A group whose elements have canonical, totally ordered normal forms.
pub trait GroupKey: Clone + Ord + fmt::Debug {
    fn op(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn is_identity(&self) -> bool;
    /// Whether both keys belong to the same coefficient group.
    fn same_group(&self, other: &Self) -> bool;
    fn fmt_key(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

/// Finite integer combination of group elements; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupRing<K: Ord> {
    terms: BTreeMap<K, BigInt>,
}

impl<K: Ord> Default for GroupRing<K> {
    fn default() -> Self {
        GroupRing { terms: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    Neg,
}

impl<K: GroupKey> GroupRing<K> {
    pub fn zero() -> Self {
        GroupRing { terms: BTreeMap::new() }
    }

    pub fn term(key: K, coeff: impl Into<BigInt>) -> Self {
        let mut x = GroupRing::zero();
        x.add_term(key, coeff.into());
        x
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, BigInt)>) -> Self {
        let mut x = GroupRing::zero();
        for (k, c) in terms {
            x.add_term(k, c);
        }
        x
    }

    pub fn add_term(&mut self, key: K, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &K) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    fn compatible(&self, other: &Self) -> bool {
        match (self.terms.keys().next(), other.terms.keys().next()) {
            (Some(a), Some(b)) => a.same_group(b),
            _ => true,
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return GroupRing::zero();
        }
        GroupRing { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    /// `g * self`
    pub fn left_translate(&self, g: &K) -> Self {
        if g.is_identity() {
            return self.clone();
        }
        GroupRing::from_terms(self.terms.iter().map(|(k, c)| (g.op(k), c.clone())))
    }

    /// `self * g`
    pub fn right_translate(&self, g: &K) -> Self {
        if g.is_identity() {
            return self.clone();
        }
        GroupRing::from_terms(self.terms.iter().map(|(k, c)| (k.op(g), c.clone())))
    }

    /// Sum of coefficients; zero exactly on the fundamental ideal.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Extends a group homomorphism on keys to a ring homomorphism.
    pub fn map_keys<L: GroupKey>(&self, f: impl Fn(&K) -> L) -> GroupRing<L> {
        GroupRing::from_terms(self.terms.iter().map(|(k, c)| (f(k), c.clone())))
    }

    /// Ring homomorphism into an arbitrary commutative target, given key images.
    pub fn evaluate_with<T>(&self, zero: T, f: impl Fn(&K, &BigInt) -> T, add: impl Fn(T, T) -> T) -> T {
        self.terms.iter().fold(zero, |acc, (k, c)| add(acc, f(k, c)))
    }

    pub fn checked(op: RingOp, x: &Self, y: &Self) -> Result<Self, GroupRingError> {
        if !x.compatible(y) {
            return Err(GroupRingError::MismatchedGroups);
        }
        Ok(match op {
            RingOp::Add => x + y,
            RingOp::Sub => x - y,
            RingOp::Mul => x * y,
            RingOp::Neg => -x,
        })
    }
}

/// `x op y` with a coefficient-group check; `Neg` ignores `y`.
pub fn ring_arith<K: GroupKey>(op: RingOp, x: &GroupRing<K>, y: &GroupRing<K>) -> Result<GroupRing<K>, GroupRingError> {
    GroupRing::checked(op, x, y)
}

impl<K: GroupKey> Add for &GroupRing<K> {
    type Output = GroupRing<K>;
    fn add(self, rhs: &GroupRing<K>) -> GroupRing<K> {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl<K: GroupKey> Sub for &GroupRing<K> {
    type Output = GroupRing<K>;
    fn sub(self, rhs: &GroupRing<K>) -> GroupRing<K> {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl<K: GroupKey> Neg for &GroupRing<K> {
    type Output = GroupRing<K>;
    fn neg(self) -> GroupRing<K> {
        GroupRing { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }
}

impl<K: GroupKey> Mul for &GroupRing<K> {
    type Output = GroupRing<K>;
    fn mul(self, rhs: &GroupRing<K>) -> GroupRing<K> {
        let mut out = GroupRing::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a.op(b), x * y);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<K: GroupKey> $tr for GroupRing<K> {
            type Output = GroupRing<K>;
            fn $m(self, rhs: GroupRing<K>) -> GroupRing<K> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<K: GroupKey> Neg for GroupRing<K> {
    type Output = GroupRing<K>;
    fn neg(self) -> GroupRing<K> {
        -&self
    }
}

impl<K: GroupKey> fmt::Display for GroupRing<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if k.is_identity() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                k.fmt_key(f)?;
            }
        }
        Ok(())
    }
}

/// Exponent vector of a monomial `a_1^{e_1} ... a_r^{e_r}` in `Z^r`.
///
/// Exponents are `i64` with checked arithmetic: any overflow panics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<i64>);

impl Monomial {
    pub fn one(rank: usize) -> Self {
        Monomial(vec![0; rank])
    }

    pub fn var(rank: usize, axis: usize, exp: i64) -> Self {
        let mut v = vec![0; rank];
        v[axis] = exp;
        Monomial(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn pow(&self, n: i64) -> Self {
        Monomial(self.0.iter().map(|e| e.checked_mul(n).expect("exponent overflow")).collect())
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl GroupKey for Monomial {
    fn op(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    fn inverse(&self) -> Self {
        Monomial(self.0.iter().map(|e| e.checked_neg().expect("exponent overflow")).collect())
    }

    fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn same_group(&self, other: &Self) -> bool {
        self.0.len() == other.0.len()
    }

    fn fmt_key(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_monomial(&self.0, f)
    }
}

pub(crate) fn fmt_monomial(exps: &[i64], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (i, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "a{}", i + 1)?;
        } else {
            write!(f, "a{}^{}", i + 1, e)?;
        }
    }
    if first {
        write!(f, "1")?;
    }
    Ok(())
}

pub type Laurent = GroupRing<Monomial>;

/// Δ-adic valuation, or a lower bound when the truncated expansion vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Exact(u32),
    AtLeast(u32),
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(n) => write!(f, "{n}"),
            Valuation::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

pub const DEFAULT_OMEGA_CAP: u32 = 8;

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl Laurent {
    pub fn one(rank: usize) -> Self {
        Laurent::term(Monomial::one(rank), 1)
    }

    pub fn constant(rank: usize, c: impl Into<BigInt>) -> Self {
        Laurent::term(Monomial::one(rank), c)
    }

    /// `a_{axis+1}^exp`
    pub fn monomial(rank: usize, axis: usize, exp: i64) -> Self {
        Laurent::term(Monomial::var(rank, axis, exp), 1)
    }

    /// `1 - a_{axis+1}^m`
    pub fn one_minus(rank: usize, axis: usize, m: i64) -> Self {
        &Laurent::one(rank) - &Laurent::monomial(rank, axis, m)
    }

    pub fn rank(&self) -> Option<usize> {
        self.terms.keys().next().map(Monomial::rank)
    }

    /// Substitutes `a_i = 1 + y_i` and reports the lowest total `y`-degree.
    pub fn omega(&self, cap: u32) -> Result<Valuation, GroupRingError> {
        let rank = self.rank().ok_or(GroupRingError::ZeroInput)?;
        // Clearing negative exponents multiplies by a unit, which has valuation 0.
        let shift: Vec<i64> =
            (0..rank).map(|i| self.terms.keys().map(|m| m.0[i]).min().unwrap_or(0)).collect();
        let mut expansion: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (m, c) in &self.terms {
            let exps: Vec<u64> = m.0.iter().zip(&shift).map(|(e, s)| (e - s) as u64).collect();
            let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(vec![0; rank], c.clone())];
            for (i, &e) in exps.iter().enumerate() {
                let mut next = Vec::new();
                for (deg, coeff) in &partial {
                    let used: u32 = deg.iter().sum();
                    for k in 0..=e.min((cap - used) as u64) {
                        if used + k as u32 >= cap {
                            break;
                        }
                        let mut d = deg.clone();
                        d[i] = k as u32;
                        next.push((d, coeff * binomial(e, k)));
                    }
                }
                partial = next;
            }
            for (d, coeff) in partial {
                let slot = expansion.entry(d).or_default();
                *slot += coeff;
            }
        }
        let lowest = expansion
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, _)| d.iter().sum::<u32>())
            .min();
        Ok(match lowest {
            Some(n) => Valuation::Exact(n),
            None => Valuation::AtLeast(cap),
        })
    }

    /// Least and greatest exponent of `a_{axis+1}` over the support.
    pub fn exponent_range(&self, axis: usize) -> Result<(i64, i64), GroupRingError> {
        let lo = self.terms.keys().map(|m| m.0[axis]).min().ok_or(GroupRingError::ZeroInput)?;
        let hi = self.terms.keys().map(|m| m.0[axis]).max().ok_or(GroupRingError::ZeroInput)?;
        Ok((lo, hi))
    }

    /// One more than the sum of `|p_i| + |q_i|` over all axes.
    pub fn choose_m(&self) -> Result<i64, GroupRingError> {
        let rank = self.rank().ok_or(GroupRingError::ZeroInput)?;
        let mut total: i64 = 1;
        for axis in 0..rank {
            let (p, q) = self.exponent_range(axis)?;
            total += p.abs() + q.abs();
        }
        Ok(total)
    }

    /// Evaluates at `a_i = values[i]` over the integers (values must be units).
    pub fn evaluate_at(&self, values: &[i64]) -> BigInt {
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (e, v) in m.0.iter().zip(values) {
                assert!(*v == 1 || *v == -1 || *e >= 0, "negative power of a non-unit");
                t *= BigInt::from(*v).pow(e.unsigned_abs() as u32);
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `q` with `q * d == self`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Laurent) -> Result<Option<Laurent>, GroupRingError> {
        if d.is_zero() {
            return Err(GroupRingError::ZeroDivisor);
        }
        if !self.compatible(d) {
            return Err(GroupRingError::MismatchedGroups);
        }
        if self.is_zero() {
            return Ok(Some(Laurent::zero()));
        }
        let q = match binomial_axis(d) {
            Some((axis, m, sign)) => divide_binomial(self, axis, m, sign),
            None => divide_general(self, d),
        };
        Ok(q.filter(|q| &(q * d) == self))
    }
}

/// Detects `d = sign * (1 - a_axis^m)` with `m > 0`.
fn binomial_axis(d: &Laurent) -> Option<(usize, i64, BigInt)> {
    if d.len() != 2 {
        return None;
    }
    let mut it = d.terms();
    let (k0, c0) = it.next()?;
    let (k1, c1) = it.next()?;
    let (unit, unit_c, power, power_c) = if k0.is_identity() {
        (k0, c0, k1, c1)
    } else if k1.is_identity() {
        (k1, c1, k0, c0)
    } else {
        return None;
    };
    let _ = unit;
    if !c0.abs().is_one() || unit_c != &-power_c {
        return None;
    }
    let nonzero: Vec<(usize, i64)> =
        power.0.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (i, e)).collect();
    match nonzero.as_slice() {
        [(axis, m)] if *m > 0 => Some((*axis, *m, unit_c.clone())),
        _ => None,
    }
}

/// Back-substitution for `x = sign * (1 - t) * q` with `t = a_axis^m`,
/// treating the other variables as coefficients.
fn divide_binomial(x: &Laurent, axis: usize, m: i64, sign: BigInt) -> Option<Laurent> {
    // Group x by the remaining variables, giving univariate series along `axis`.
    let mut slices: BTreeMap<Monomial, BTreeMap<i64, BigInt>> = BTreeMap::new();
    for (k, c) in x.terms() {
        let mut rest = k.clone();
        let e = rest.0[axis];
        rest.0[axis] = 0;
        slices.entry(rest).or_default().insert(e, c * &sign);
    }
    let mut q = Laurent::zero();
    for (rest, series) in slices {
        let lo = *series.keys().next()?;
        let hi = *series.keys().next_back()?;
        if hi - lo < m {
            return None;
        }
        // q_k - q_{k-m} = x_k, solved upward from the lowest exponent.
        let mut sol: BTreeMap<i64, BigInt> = BTreeMap::new();
        for k in lo..=hi - m {
            let prev = sol.get(&(k - m)).cloned().unwrap_or_default();
            let v = series.get(&k).cloned().unwrap_or_default() + prev;
            sol.insert(k, v);
        }
        for (k, c) in sol {
            let mut key = rest.clone();
            key.0[axis] = k;
            q.add_term(key, c);
        }
    }
    Some(q)
}

/// Polynomial division after clearing units, under graded-lex order.
fn divide_general(x: &Laurent, d: &Laurent) -> Option<Laurent> {
    let rank = d.rank()?;
    let low = |p: &Laurent| -> Monomial {
        Monomial((0..rank).map(|i| p.terms.keys().map(|m| m.0[i]).min().unwrap_or(0)).collect())
    };
    let x_shift = low(x);
    let d_shift = low(d);
    let xp = x.right_translate(&x_shift.inverse());
    let dp = d.right_translate(&d_shift.inverse());
    let grlex = |m: &Monomial| (m.total_degree(), m.clone());
    let (lead_d, lead_c) = dp.terms().max_by_key(|(m, _)| grlex(m)).map(|(m, c)| (m.clone(), c.clone()))?;

    let mut rem = xp;
    let mut q = Laurent::zero();
    while let Some((lead_r, rc)) = rem.terms().max_by_key(|(m, _)| grlex(m)).map(|(m, c)| (m.clone(), c.clone())) {
        let shift = lead_r.op(&lead_d.inverse());
        if shift.0.iter().any(|&e| e < 0) || !rc.is_multiple_of(&lead_c) {
            return None;
        }
        let t = Laurent::term(shift, rc.div_floor(&lead_c));
        rem = &rem - &(&t * &dp);
        q = &q + &t;
    }
    Some(q.right_translate(&x_shift.op(&d_shift.inverse())))
}

/// Parses Laurent expressions such as `1 - a1`, `(1-a1)*(1-a2^-1)`, `3*a1^2*a2`.
pub fn parse_laurent(text: &str, rank: usize) -> Result<Laurent, GroupRingError> {
    let mut p = LaurentParser { src: text.as_bytes(), pos: 0, rank };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

struct LaurentParser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: usize,
}

impl LaurentParser<'_> {
    fn error(&self, msg: &str) -> GroupRingError {
        GroupRingError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Laurent, GroupRingError> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            -self.product()?
        } else {
            self.product()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Laurent, GroupRingError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Laurent, GroupRingError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.signed()?;
        if base.len() == 1 {
            let (k, c) = base.terms().next().map(|(k, c)| (k.clone(), c.clone())).expect("one term");
            if c.is_one() {
                return Ok(Laurent::term(k.pow(e), 1));
            }
        }
        if e < 0 {
            return Err(self.error("negative powers are only defined for monomials"));
        }
        let mut acc = Laurent::one(self.rank);
        for _ in 0..e {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Laurent, GroupRingError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'a') => {
                self.pos += 1;
                let start = self.pos;
                let i = self.unsigned()?;
                if i == 0 || i as usize > self.rank {
                    self.pos = start;
                    return Err(self.error("variable index out of range"));
                }
                Ok(Laurent::monomial(self.rank, i as usize - 1, 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.bigint()?;
                Ok(Laurent::constant(self.rank, v))
            }
            _ => Err(self.error("expected a number, a variable or '('")),
        }
    }

    fn digits(&mut self) -> Result<&str, GroupRingError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn bigint(&mut self) -> Result<BigInt, GroupRingError> {
        Ok(self.digits()?.parse().expect("digits"))
    }

    fn unsigned(&mut self) -> Result<u64, GroupRingError> {
        let pos = self.pos;
        self.digits()?.parse().map_err(|_| GroupRingError::Parse { pos, msg: "number too large".into() })
    }

    fn signed(&mut self) -> Result<i64, GroupRingError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let pos = self.pos;
        let v = self.bigint()?;
        let v = if neg { -v } else { v };
        v.to_i64().ok_or(GroupRingError::Parse { pos, msg: "exponent too large".into() })
    }
}
