//! Normal forms in the free solvable group `S_{r,d}` via the iterated Magnus embedding.
//!
//! An element of class `d >= 2` is stored as its image `top` in `S_{r,d-1}`
//! together with its left Fox coordinates, a vector of `r` elements of the
//! group ring `Z[S_{r,d-1}]`. The group law is the one of the matrices
//! `[[top, coords], [0, 1]]`:
//!
//! ```text
//! (t, u) * (s, v) = (t s, u + t v)        (t, u)^-1 = (t^-1, -t^-1 u)
//! ```
//!
//! so the coordinates obey the left product rule `D(uv) = D(u) + u D(v)`,
//! and every element satisfies `sum_j coords_j (a_j - 1) = top - 1`.
//! Equality of normal forms decides the word problem.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::groupring::{fmt_monomial, GroupKey, GroupRing, Laurent, Monomial};
use crate::words::{Symbol, SymbolKind, Word};

pub const DEFAULT_MAX_CLASS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MagnusError {
    #[error("rank and class must be positive (got r={rank}, d={class})")]
    InvalidContext { rank: usize, class: usize },
    #[error("class {class} exceeds the guard d <= {limit}")]
    ClassGuard { class: usize, limit: usize },
    #[error("elements belong to different groups")]
    ContextMismatch,
    #[error("generator z{index} exceeds rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("word contains the unknown x{0} where only generators are allowed")]
    UnexpectedVariable(usize),
    #[error("word contains the generator z{0} where only unknowns are allowed")]
    UnexpectedGenerator(usize),
    #[error("unknown x{0} has no value")]
    UnboundVariable(usize),
    #[error("exponent {0} does not fit in 64 bits")]
    ExponentTooLarge(BigInt),
    #[error("Fox derivatives need class d >= 2")]
    NoFoxTarget,
    #[error("element does not lie in the last nontrivial derived term")]
    NotInLastDerivedTerm,
    #[error("coefficient lives over a different group ring")]
    RingMismatch,
    #[error("operation requires class {expected}, context has class {found}")]
    WrongClass { expected: usize, found: usize },
    #[error("arity mismatch: word uses {needed} slots, {given} values given")]
    ArityMismatch { needed: usize, given: usize },
    #[error("coordinates violate the fundamental identity")]
    InvalidNormalForm,
}

/// The ambient group `S_{r,d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupContext {
    rank: usize,
    class: usize,
}

impl GroupContext {
    pub fn new(rank: usize, class: usize) -> Result<Self, MagnusError> {
        Self::with_class_limit(rank, class, DEFAULT_MAX_CLASS)
    }

    pub fn with_class_limit(rank: usize, class: usize, limit: usize) -> Result<Self, MagnusError> {
        if rank == 0 || class == 0 {
            return Err(MagnusError::InvalidContext { rank, class });
        }
        if class > limit {
            return Err(MagnusError::ClassGuard { class, limit });
        }
        Ok(GroupContext { rank, class })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn class(&self) -> usize {
        self.class
    }

    /// `S_{r,d-1}`; `None` for class 1.
    pub fn lower(&self) -> Option<GroupContext> {
        (self.class > 1).then(|| GroupContext { rank: self.rank, class: self.class - 1 })
    }

    pub fn identity(&self) -> SolvableElement {
        SolvableElement { ctx: *self, nf: NormalForm::identity(self.rank, self.class) }
    }

    pub fn generator(&self, i: usize) -> Result<SolvableElement, MagnusError> {
        if i == 0 || i > self.rank {
            return Err(MagnusError::GeneratorOutOfRange { index: i, rank: self.rank });
        }
        Ok(SolvableElement { ctx: *self, nf: NormalForm::generator(self.rank, self.class, i - 1) })
    }

    /// `z_1, ..., z_r`
    pub fn generators(&self) -> Vec<SolvableElement> {
        (1..=self.rank).map(|i| self.generator(i).expect("in range")).collect()
    }
}

/// Group ring over `S_{r,k}` normal forms.
pub type FoxRing = GroupRing<NormalForm>;

/// Recursive normal form; the context is implicit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormalForm {
    Base(Monomial),
    Ext { top: Box<NormalForm>, coords: Vec<FoxRing> },
}

impl NormalForm {
    pub fn identity(rank: usize, class: usize) -> Self {
        if class == 1 {
            NormalForm::Base(Monomial::one(rank))
        } else {
            NormalForm::Ext {
                top: Box::new(NormalForm::identity(rank, class - 1)),
                coords: vec![FoxRing::zero(); rank],
            }
        }
    }

    /// Basis element `z_{axis+1}`.
    pub fn generator(rank: usize, class: usize, axis: usize) -> Self {
        if class == 1 {
            NormalForm::Base(Monomial::var(rank, axis, 1))
        } else {
            let mut coords = vec![FoxRing::zero(); rank];
            coords[axis] = FoxRing::term(NormalForm::identity(rank, class - 1), 1);
            NormalForm::Ext { top: Box::new(NormalForm::generator(rank, class - 1, axis)), coords }
        }
    }

    pub fn class(&self) -> usize {
        match self {
            NormalForm::Base(_) => 1,
            NormalForm::Ext { top, .. } => 1 + top.class(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            NormalForm::Base(m) => m.rank(),
            NormalForm::Ext { coords, .. } => coords.len(),
        }
    }

    pub fn top(&self) -> Option<&NormalForm> {
        match self {
            NormalForm::Base(_) => None,
            NormalForm::Ext { top, .. } => Some(top),
        }
    }

    pub fn coords(&self) -> &[FoxRing] {
        match self {
            NormalForm::Base(_) => &[],
            NormalForm::Ext { coords, .. } => coords,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (NormalForm::Base(a), NormalForm::Base(b)) => NormalForm::Base(a.op(b)),
            (NormalForm::Ext { top: t, coords: u }, NormalForm::Ext { top: s, coords: v }) => NormalForm::Ext {
                top: Box::new(t.mul(s)),
                coords: u.iter().zip(v).map(|(x, y)| x + &y.left_translate(t)).collect(),
            },
            _ => panic!("multiplying normal forms of different classes"),
        }
    }

    pub fn inv(&self) -> Self {
        match self {
            NormalForm::Base(a) => NormalForm::Base(a.inverse()),
            NormalForm::Ext { top, coords } => {
                let ti = top.inv();
                let coords = coords.iter().map(|u| -&u.left_translate(&ti)).collect();
                NormalForm::Ext { top: Box::new(ti), coords }
            }
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc: Option<NormalForm> = None;
        let mut square = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => square.clone(),
                    Some(a) => a.mul(&square),
                });
            }
            k >>= 1;
            if k > 0 {
                square = square.mul(&square);
            }
        }
        acc.unwrap_or_else(|| NormalForm::identity(self.rank(), self.class()))
    }

    pub fn is_identity(&self) -> bool {
        match self {
            NormalForm::Base(m) => m.is_identity(),
            NormalForm::Ext { top, coords } => coords.iter().all(GroupRing::is_zero) && top.is_identity(),
        }
    }

    /// Image in `S_{r,k}` for `1 <= k <= class`.
    pub fn project(&self, k: usize) -> &NormalForm {
        let mut cur = self;
        while cur.class() > k {
            cur = cur.top().expect("class > 1 has a top");
        }
        cur
    }

    /// Image in `Z^r`.
    pub fn abelianization(&self) -> &Monomial {
        match self.project(1) {
            NormalForm::Base(m) => m,
            NormalForm::Ext { .. } => unreachable!(),
        }
    }

    /// Checks `sum_j coords_j (a_j - 1) = top - 1`, recursively through all levels.
    pub fn fundamental_identity_holds(&self) -> bool {
        match self {
            NormalForm::Base(_) => true,
            NormalForm::Ext { top, coords } => {
                let rank = coords.len();
                let class = top.class();
                let one = NormalForm::identity(rank, class);
                let mut lhs = FoxRing::zero();
                for (j, u) in coords.iter().enumerate() {
                    let a = NormalForm::generator(rank, class, j);
                    lhs = &lhs + &(&u.right_translate(&a) - u);
                }
                let rhs = &FoxRing::term((**top).clone(), 1) - &FoxRing::term(one, 1);
                lhs == rhs && top.fundamental_identity_holds()
            }
        }
    }

    fn serialize(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalForm::Base(m) => {
                let parts: Vec<String> = m.0.iter().map(|e| e.to_string()).collect();
                write!(f, "d1:({})", parts.join(","))
            }
            NormalForm::Ext { top, coords } => {
                write!(f, "d{}:", self.class())?;
                top.serialize(f)?;
                write!(f, "|[")?;
                for (i, c) in coords.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl GroupKey for NormalForm {
    fn op(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn inverse(&self) -> Self {
        self.inv()
    }

    fn is_identity(&self) -> bool {
        NormalForm::is_identity(self)
    }

    fn same_group(&self, other: &Self) -> bool {
        self.class() == other.class() && self.rank() == other.rank()
    }

    /// Abelian keys print as Laurent monomials, deeper keys as braced normal forms.
    fn fmt_key(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalForm::Base(m) => fmt_monomial(&m.0, f),
            NormalForm::Ext { .. } => {
                write!(f, "{{")?;
                self.serialize(f)?;
                write!(f, "}}")
            }
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.serialize(f)
    }
}

/// An element of `S_{r,d}` in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolvableElement {
    ctx: GroupContext,
    nf: NormalForm,
}

impl fmt::Display for SolvableElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.nf.serialize(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOp {
    Mul,
    Inv,
    Eq,
    IsIdentity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupOpResult {
    Element(SolvableElement),
    Bool(bool),
}

/// Result of [`derived_depth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivedDepth {
    Identity,
    Depth(usize),
}

impl SolvableElement {
    pub fn context(&self) -> GroupContext {
        self.ctx
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.nf
    }

    pub fn into_normal_form(self) -> NormalForm {
        self.nf
    }

    /// Wraps a normal form produced elsewhere after checking its shape and
    /// the fundamental identity. In class 2 every such vector is the image of
    /// a group element; deeper classes are accepted on the identity alone.
    pub fn from_normal_form(ctx: GroupContext, nf: NormalForm) -> Result<Self, MagnusError> {
        if nf.class() != ctx.class || nf.rank() != ctx.rank {
            return Err(MagnusError::ContextMismatch);
        }
        if !nf.fundamental_identity_holds() {
            return Err(MagnusError::InvalidNormalForm);
        }
        Ok(SolvableElement { ctx, nf })
    }

    /// Element of `S_{r,d}` in `G^{(d-1)}` with the given Fox coordinates.
    pub fn from_coords(ctx: GroupContext, coords: Vec<FoxRing>) -> Result<Self, MagnusError> {
        let lower = ctx.lower().ok_or(MagnusError::NoFoxTarget)?;
        if coords.len() != ctx.rank {
            return Err(MagnusError::ContextMismatch);
        }
        let nf = NormalForm::Ext { top: Box::new(lower.identity().nf), coords };
        Self::from_normal_form(ctx, nf)
    }

    fn same_ctx(&self, other: &Self) -> Result<(), MagnusError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(MagnusError::ContextMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MagnusError> {
        self.same_ctx(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let nf = self.nf.mul(&other.nf);
        debug_assert!(nf.fundamental_identity_holds());
        SolvableElement { ctx: self.ctx, nf }
    }

    pub fn inv(&self) -> Self {
        SolvableElement { ctx: self.ctx, nf: self.nf.inv() }
    }

    pub fn pow(&self, n: i64) -> Self {
        SolvableElement { ctx: self.ctx, nf: self.nf.pow(n) }
    }

    pub fn conjugate_by(&self, g: &Self) -> Result<Self, MagnusError> {
        // g self g^-1
        Ok(g.mul(self)?.mul_unchecked(&g.inv()))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, MagnusError> {
        self.same_ctx(other)?;
        Ok(self.mul_unchecked(other).mul_unchecked(&self.inv()).mul_unchecked(&other.inv()))
    }

    pub fn is_identity(&self) -> bool {
        self.nf.is_identity()
    }

    /// Image in `S_{r,d-1}`.
    pub fn top(&self) -> Option<SolvableElement> {
        let lower = self.ctx.lower()?;
        Some(SolvableElement { ctx: lower, nf: self.nf.top()?.clone() })
    }

    pub fn project(&self, class: usize) -> Result<SolvableElement, MagnusError> {
        if class == 0 || class > self.ctx.class {
            return Err(MagnusError::WrongClass { expected: class, found: self.ctx.class });
        }
        let ctx = GroupContext { rank: self.ctx.rank, class };
        Ok(SolvableElement { ctx, nf: self.nf.project(class).clone() })
    }

    pub fn coords(&self) -> &[FoxRing] {
        self.nf.coords()
    }

    /// Exponent sums of the generators.
    pub fn abelianization(&self) -> Vec<i64> {
        self.nf.abelianization().0.clone()
    }

    /// Whether the element lies in `G^{(d-1)}`.
    pub fn in_last_derived_term(&self) -> bool {
        match self.nf.top() {
            None => true,
            Some(t) => t.is_identity(),
        }
    }
}

pub fn group_op(op: GroupOp, a: &SolvableElement, b: &SolvableElement) -> Result<GroupOpResult, MagnusError> {
    Ok(match op {
        GroupOp::Mul => GroupOpResult::Element(a.mul(b)?),
        GroupOp::Inv => GroupOpResult::Element(a.inv()),
        GroupOp::Eq => {
            a.same_ctx(b)?;
            GroupOpResult::Bool(a == b)
        }
        GroupOp::IsIdentity => GroupOpResult::Bool(a.is_identity()),
    })
}

fn exponent_i64(e: &BigInt) -> Result<i64, MagnusError> {
    e.to_i64().ok_or_else(|| MagnusError::ExponentTooLarge(e.clone()))
}

/// Normal form of a word in the generators.
pub fn embed(w: &Word, ctx: GroupContext) -> Result<SolvableElement, MagnusError> {
    let gens = ctx.generators();
    evaluate_symbols(w, ctx, |s| match s.kind {
        SymbolKind::Generator if s.index <= ctx.rank => Ok(&gens[s.index - 1]),
        SymbolKind::Generator => Err(MagnusError::GeneratorOutOfRange { index: s.index, rank: ctx.rank }),
        SymbolKind::Variable => Err(MagnusError::UnexpectedVariable(s.index)),
    })
}

fn evaluate_symbols<'a>(
    w: &Word,
    ctx: GroupContext,
    lookup: impl Fn(Symbol) -> Result<&'a SolvableElement, MagnusError>,
) -> Result<SolvableElement, MagnusError> {
    let mut acc = ctx.identity();
    for (s, e) in w.letters() {
        let value = lookup(*s)?;
        if value.ctx != ctx {
            return Err(MagnusError::ContextMismatch);
        }
        acc = acc.mul_unchecked(&value.pow(exponent_i64(e)?));
    }
    Ok(acc)
}

/// Substitutes `x_i -> values[i-1]` in a word over unknowns.
pub fn evaluate(w: &Word, values: &[SolvableElement]) -> Result<SolvableElement, MagnusError> {
    let ctx = values.first().map(|v| v.ctx).ok_or(MagnusError::ArityMismatch { needed: w.max_variable(), given: 0 })?;
    evaluate_in(w, ctx, values)
}

/// [`evaluate`] with an explicit ambient group, so that `values` may be empty.
pub fn evaluate_in(w: &Word, ctx: GroupContext, values: &[SolvableElement]) -> Result<SolvableElement, MagnusError> {
    evaluate_symbols(w, ctx, |s| match s.kind {
        SymbolKind::Variable => values.get(s.index - 1).ok_or(MagnusError::UnboundVariable(s.index)),
        SymbolKind::Generator => Err(MagnusError::UnexpectedGenerator(s.index)),
    })
}

/// Applies the endomorphism `z_i -> images[i-1]` to a word over generators.
pub fn apply_endomorphism(w: &Word, images: &[SolvableElement]) -> Result<SolvableElement, MagnusError> {
    let ctx = images.first().map(|v| v.ctx).ok_or(MagnusError::ArityMismatch { needed: w.max_generator(), given: 0 })?;
    if w.max_generator() > images.len() {
        return Err(MagnusError::ArityMismatch { needed: w.max_generator(), given: images.len() });
    }
    evaluate_symbols(w, ctx, |s| match s.kind {
        SymbolKind::Generator => Ok(&images[s.index - 1]),
        SymbolKind::Variable => Err(MagnusError::UnexpectedVariable(s.index)),
    })
}

/// Left Fox derivative `D_j(w)` (axis `j` counts from 1) in `Z[S_{r,d-1}]`.
pub fn fox(w: &Word, j: usize, ctx: GroupContext) -> Result<FoxRing, MagnusError> {
    if ctx.class < 2 {
        return Err(MagnusError::NoFoxTarget);
    }
    if j == 0 || j > ctx.rank {
        return Err(MagnusError::GeneratorOutOfRange { index: j, rank: ctx.rank });
    }
    Ok(embed(w, ctx)?.coords()[j - 1].clone())
}

/// Pushes a Fox value through abelianization to `Z[Z^r]`.
pub fn to_abelian(x: &FoxRing) -> Laurent {
    x.map_keys(|k| k.abelianization().clone())
}

/// Class-1 keys as Laurent monomials.
pub fn to_laurent(x: &FoxRing) -> Laurent {
    x.map_keys(|k| match k {
        NormalForm::Base(m) => m.clone(),
        NormalForm::Ext { .. } => panic!("to_laurent expects abelian keys"),
    })
}

pub fn from_laurent(x: &Laurent) -> FoxRing {
    x.map_keys(|m| NormalForm::Base(m.clone()))
}

pub fn fox_abelian(w: &Word, j: usize, ctx: GroupContext) -> Result<Laurent, MagnusError> {
    Ok(to_abelian(&fox(w, j, ctx)?))
}

/// Free-group Fox derivative `D_i(c)` with the letters `z_q` sent to `values[q-1]`.
///
/// Computed letter by letter from the product rule, independently of the
/// normal-form group law.
pub fn fox_substituted(c: &Word, i: usize, values: &[NormalForm]) -> FoxRing {
    let rank = values[0].rank();
    let class = values[0].class();
    let mut prefix = NormalForm::identity(rank, class);
    let mut out = FoxRing::zero();
    for (s, e) in c.letters() {
        let a = &values[s.index - 1];
        let e = e.to_i64().expect("small exponent");
        if s.index == i {
            if e > 0 {
                let mut p = prefix.clone();
                for _ in 0..e {
                    out.add_term(p.clone(), BigInt::one());
                    p = p.mul(a);
                }
            } else {
                let ai = a.inv();
                let mut p = prefix.mul(&ai);
                for _ in 0..-e {
                    out.add_term(p.clone(), -BigInt::one());
                    p = p.mul(&ai);
                }
            }
        }
        prefix = prefix.mul(&a.pow(e));
    }
    out
}

/// Compares `D_j(c(h))` against `sum_i D_i(c)[h-bar] D_j(h_i)` for every axis `j`.
pub fn chain_rule_check(c: &Word, h: &[SolvableElement]) -> Result<bool, MagnusError> {
    if c.has_variables() {
        return Err(MagnusError::UnexpectedVariable(c.max_variable()));
    }
    if h.is_empty() || c.max_generator() > h.len() {
        return Err(MagnusError::ArityMismatch { needed: c.max_generator(), given: h.len() });
    }
    let ctx = h[0].ctx;
    if h.iter().any(|x| x.ctx != ctx) {
        return Err(MagnusError::ContextMismatch);
    }
    if ctx.class < 2 {
        return Err(MagnusError::NoFoxTarget);
    }
    let lhs = apply_endomorphism(c, h)?;
    let tops: Vec<NormalForm> = h.iter().map(|x| x.nf.top().expect("class >= 2").clone()).collect();
    let outer: Vec<FoxRing> = (1..=h.len()).map(|i| fox_substituted(c, i, &tops)).collect();
    for j in 0..ctx.rank {
        let mut rhs = FoxRing::zero();
        for (d_i, h_i) in outer.iter().zip(h) {
            rhs = &rhs + &(d_i * &h_i.coords()[j]);
        }
        if rhs != lhs.coords()[j] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `n` with the image of `a` in `S_{r,n}` trivial.
pub fn derived_depth(a: &SolvableElement) -> DerivedDepth {
    if a.is_identity() {
        return DerivedDepth::Identity;
    }
    let n = (1..=a.ctx.class).take_while(|&k| a.nf.project(k).is_identity()).count();
    DerivedDepth::Depth(n)
}

/// `c^alpha` for `c` in `G^{(d-1)}` and `alpha` in `Z[S_{r,d-1}]`, where a group
/// element `g` acts as `c -> g c g^-1`.
pub fn module_power(c: &SolvableElement, alpha: &FoxRing) -> Result<SolvableElement, MagnusError> {
    let lower = c.ctx.lower().ok_or(MagnusError::NoFoxTarget)?;
    if !c.in_last_derived_term() {
        return Err(MagnusError::NotInLastDerivedTerm);
    }
    if let Some((k, _)) = alpha.terms().next() {
        if k.class() != lower.class || k.rank() != lower.rank {
            return Err(MagnusError::RingMismatch);
        }
    }
    let coords = c.coords().iter().map(|u| alpha * u).collect();
    let nf = NormalForm::Ext { top: Box::new(lower.identity().nf), coords };
    Ok(SolvableElement { ctx: c.ctx, nf })
}

/// Rank over the fraction field of `Z[Z^r]` of the Fox-coordinate rows of
/// elements of `M_r'`.
pub fn module_rank(cs: &[SolvableElement]) -> Result<usize, MagnusError> {
    let Some(first) = cs.first() else { return Ok(0) };
    let ctx = first.ctx;
    if ctx.class != 2 {
        return Err(MagnusError::WrongClass { expected: 2, found: ctx.class });
    }
    let mut rows: Vec<Vec<Laurent>> = Vec::with_capacity(cs.len());
    for c in cs {
        if c.ctx != ctx {
            return Err(MagnusError::ContextMismatch);
        }
        if !c.in_last_derived_term() {
            return Err(MagnusError::NotInLastDerivedTerm);
        }
        rows.push(c.coords().iter().map(to_laurent).collect());
    }
    Ok(laurent_rank(rows))
}

/// Fraction-free elimination over the integral domain `Z[Z^r]`.
pub fn laurent_rank(mut rows: Vec<Vec<Laurent>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        let pivot = pivot_row[col].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let factor = row[col].clone();
            if factor.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &(&pivot * &*x) - &(&factor * y);
            }
        }
        rank += 1;
    }
    rank
}

/// Laurent coordinates of an element of class 2.
pub fn laurent_coords(a: &SolvableElement) -> Vec<Laurent> {
    a.coords().iter().map(to_laurent).collect()
}

impl SolvableElement {
    /// Convenience: element of `G^{(1)}` in `M_r` from Laurent coordinates.
    pub fn from_laurent_coords(ctx: GroupContext, coords: &[Laurent]) -> Result<Self, MagnusError> {
        if ctx.class != 2 {
            return Err(MagnusError::WrongClass { expected: 2, found: ctx.class });
        }
        Self::from_coords(ctx, coords.iter().map(from_laurent).collect())
    }
}

/// The constant `n` in `Z[S_{r,k}]`.
pub fn ring_constant(ctx: GroupContext, n: i64) -> FoxRing {
    let nf = ctx.identity().nf;
    if n == 0 {
        FoxRing::zero()
    } else {
        FoxRing::term(nf, n)
    }
}

/// The group element `g` as a ring element.
pub fn ring_element(g: &SolvableElement) -> FoxRing {
    FoxRing::term(g.nf.clone(), 1)
}
