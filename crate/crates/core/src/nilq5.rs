//! The quotient `M_r / γ₅M_r` of the free metabelian group.
//!
//! Elements are stored as abelianized exponents together with their Fox
//! coordinates in the shifted variables `y_i = a_i - 1`, truncated above
//! total degree 3. Since `w ∈ γ_c` exactly when `w` has trivial image in
//! `Z^r` and every coordinate lies in `Δ^{c-1}`, two elements agree mod `γ₅`
//! iff their exponents agree and their truncated coordinates agree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{smith_normal_form, IntMatrix, SmithDecomposition};
use crate::magnus::{laurent_coords, SolvableElement};
use crate::words::{SymbolKind, Word};

pub const TRUNCATION_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NilError {
    #[error("nilpotent quotient is taken from class 2, got class {0}")]
    WrongClass(usize),
    #[error("rank mismatch: quotient has rank {expected}, input has rank {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("generator z{0} out of range")]
    GeneratorOutOfRange(usize),
    #[error("unknown x{0} has no value")]
    UnboundVariable(usize),
    #[error("exponent does not fit in 64 bits")]
    ExponentTooLarge,
    #[error("element is not in γ{0} modulo γ5")]
    NotInGamma(usize),
    #[error("commutator weight {0} outside 2..=4")]
    UnsupportedWeight(usize),
    #[error("coordinates are not spanned by basic commutators")]
    Inconsistent,
}

fn add(x: i64, y: i64) -> i64 {
    x.checked_add(y).expect("nilq5 coefficient overflow")
}

fn mul(x: i64, y: i64) -> i64 {
    x.checked_mul(y).expect("nilq5 coefficient overflow")
}

/// Weight-`w` basic commutators `(i1,…,iw)` with `i1 > i2 <= i3 <= … <= iw`, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicCommutatorBasis {
    rank: usize,
    by_weight: BTreeMap<usize, Vec<Vec<usize>>>,
}

impl BasicCommutatorBasis {
    pub fn new(rank: usize) -> Self {
        let by_weight = (2..=4).map(|w| (w, basic_tuples(rank, w))).collect();
        BasicCommutatorBasis { rank, by_weight }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weight(&self, w: usize) -> &[Vec<usize>] {
        self.by_weight.get(&w).map_or(&[], Vec::as_slice)
    }
}

fn basic_tuples(rank: usize, w: usize) -> Vec<Vec<usize>> {
    fn tails(from: usize, rank: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if len == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..=rank {
            cur.push(i);
            tails(i, rank, len - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for i1 in 1..=rank {
        for i2 in 1..i1 {
            let mut cur = vec![i1, i2];
            tails(i2, rank, w - 2, &mut cur, &mut out);
        }
    }
    out
}

/// An element of `M_r / γ₅`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NilElement {
    pub exps: Vec<i64>,
    /// One dense truncated polynomial per axis, indexed by [`NilQuotient::monomials`].
    pub coords: Vec<Vec<i64>>,
}

/// Integer solver for `M n = b` through a Smith decomposition `U M V = D`.
#[derive(Debug, Clone)]
struct LinearSolver {
    u: Vec<Vec<i64>>,
    v: Vec<Vec<i64>>,
    diag: Vec<i64>,
    rows: usize,
}

impl LinearSolver {
    fn new(m: &IntMatrix) -> Self {
        let SmithDecomposition { u, d, v, .. } = smith_normal_form(m);
        let conv = |x: &IntMatrix| -> Vec<Vec<i64>> {
            x.to_rows().iter().map(|r| r.iter().map(|c| c.to_i64().expect("small")).collect()).collect()
        };
        let k = d.nrows().min(d.ncols());
        let diag = (0..k).map(|i| d[(i, i)].to_i64().expect("small")).collect();
        LinearSolver { u: conv(&u), v: conv(&v), diag, rows: m.nrows() }
    }

    fn solve(&self, b: &[i64]) -> Option<Vec<i64>> {
        let ub: Vec<i64> = self.u.iter().map(|row| row.iter().zip(b).fold(0, |s, (x, y)| add(s, mul(*x, *y)))).collect();
        let cols = self.v.len();
        let mut y = vec![0i64; cols];
        for i in 0..self.rows {
            let d = self.diag.get(i).copied().unwrap_or(0);
            if d == 0 {
                if ub[i] != 0 {
                    return None;
                }
            } else {
                let (q, r) = ub[i].div_rem(&d);
                if r != 0 {
                    return None;
                }
                y[i] = q;
            }
        }
        Some(self.v.iter().map(|row| row.iter().zip(&y).fold(0, |s, (x, c)| add(s, mul(*x, *c)))).collect())
    }
}

/// Arithmetic context for `M_r / γ₅` of a fixed rank.
#[derive(Debug, Clone)]
pub struct NilQuotient {
    rank: usize,
    monomials: Vec<Vec<u32>>,
    degree: Vec<usize>,
    index: HashMap<Vec<u32>, usize>,
    products: Vec<(usize, usize, usize)>,
    var_index: Vec<usize>,
    basis: BasicCommutatorBasis,
    solvers: BTreeMap<usize, LinearSolver>,
}

impl NilQuotient {
    pub fn new(rank: usize) -> Self {
        assert!(rank >= 1, "rank must be positive");
        let mut monomials = Vec::new();
        for deg in 0..=TRUNCATION_DEGREE {
            let mut cur = vec![0u32; rank];
            exponent_vectors(0, deg as u32, &mut cur, &mut monomials);
        }
        let degree: Vec<usize> = monomials.iter().map(|m| m.iter().sum::<u32>() as usize).collect();
        let index: HashMap<Vec<u32>, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut products = Vec::new();
        for (p, mp) in monomials.iter().enumerate() {
            for (q, mq) in monomials.iter().enumerate() {
                if degree[p] + degree[q] <= TRUNCATION_DEGREE {
                    let prod: Vec<u32> = mp.iter().zip(mq).map(|(a, b)| a + b).collect();
                    products.push((p, q, index[&prod]));
                }
            }
        }
        let var_index = (0..rank)
            .map(|i| {
                let mut m = vec![0u32; rank];
                m[i] = 1;
                index[&m]
            })
            .collect();
        let mut nq = NilQuotient {
            rank,
            monomials,
            degree,
            index,
            products,
            var_index,
            basis: BasicCommutatorBasis::new(rank),
            solvers: BTreeMap::new(),
        };
        for w in 2..=4 {
            let columns: Vec<Vec<i64>> =
                nq.basis.weight(w).iter().map(|t| nq.graded_vector(&nq.basic_commutator(t), w - 1)).collect();
            let rows = columns.first().map_or(0, Vec::len);
            let data: Vec<Vec<BigInt>> =
                (0..rows).map(|i| columns.iter().map(|c| BigInt::from(c[i])).collect()).collect();
            if !columns.is_empty() {
                nq.solvers.insert(w, LinearSolver::new(&IntMatrix::from_rows(data)));
            }
        }
        nq
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis(&self) -> &BasicCommutatorBasis {
        &self.basis
    }

    /// Exponent vectors of the truncated monomials, in storage order.
    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    fn zero_poly(&self) -> Vec<i64> {
        vec![0; self.monomials.len()]
    }

    fn one_poly(&self) -> Vec<i64> {
        let mut p = self.zero_poly();
        p[0] = 1;
        p
    }

    fn poly_mul(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut out = self.zero_poly();
        for &(p, q, r) in &self.products {
            if x[p] != 0 && y[q] != 0 {
                out[r] = add(out[r], mul(x[p], y[q]));
            }
        }
        out
    }

    fn poly_add(x: &[i64], y: &[i64]) -> Vec<i64> {
        x.iter().zip(y).map(|(a, b)| add(*a, *b)).collect()
    }

    fn poly_neg(x: &[i64]) -> Vec<i64> {
        x.iter().map(|a| a.checked_neg().expect("nilq5 coefficient overflow")).collect()
    }

    /// `(1 + y_axis)^n` truncated, with generalized binomial coefficients.
    fn binomial_power(&self, axis: usize, n: i64) -> Vec<i64> {
        let mut p = self.zero_poly();
        let mut c: i64 = 1;
        let mut mono = vec![0u32; self.rank];
        for k in 0..=TRUNCATION_DEGREE as i64 {
            if c == 0 {
                break;
            }
            mono[axis] = k as u32;
            p[self.index[&mono]] = c;
            c = mul(c, n - k) / (k + 1);
        }
        p
    }

    /// `∏ (1 + y_i)^{e_i}`, the image of the monomial `a^e`.
    pub fn unit(&self, e: &[i64]) -> Vec<i64> {
        let mut acc = self.one_poly();
        for (axis, &n) in e.iter().enumerate() {
            if n != 0 {
                acc = self.poly_mul(&acc, &self.binomial_power(axis, n));
            }
        }
        acc
    }

    pub fn identity(&self) -> NilElement {
        NilElement { exps: vec![0; self.rank], coords: vec![self.zero_poly(); self.rank] }
    }

    /// `z_i`, 1-based.
    pub fn generator(&self, i: usize) -> Result<NilElement, NilError> {
        if i == 0 || i > self.rank {
            return Err(NilError::GeneratorOutOfRange(i));
        }
        let mut g = self.identity();
        g.exps[i - 1] = 1;
        g.coords[i - 1] = self.one_poly();
        Ok(g)
    }

    pub fn mul(&self, a: &NilElement, b: &NilElement) -> NilElement {
        let t = self.unit(&a.exps);
        NilElement {
            exps: a.exps.iter().zip(&b.exps).map(|(x, y)| add(*x, *y)).collect(),
            coords: a.coords.iter().zip(&b.coords).map(|(u, v)| Self::poly_add(u, &self.poly_mul(&t, v))).collect(),
        }
    }

    pub fn inv(&self, a: &NilElement) -> NilElement {
        let exps: Vec<i64> = a.exps.iter().map(|x| -x).collect();
        let t = self.unit(&exps);
        NilElement { coords: a.coords.iter().map(|u| Self::poly_neg(&self.poly_mul(&t, u))).collect(), exps }
    }

    pub fn pow(&self, a: &NilElement, n: i64) -> NilElement {
        let base = if n < 0 { self.inv(a) } else { a.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            k >>= 1;
            if k > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// `[a, b] = a b a^-1 b^-1`
    pub fn commutator(&self, a: &NilElement, b: &NilElement) -> NilElement {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(&ab, &self.inv(&ba))
    }

    pub fn left_normed(&self, parts: &[NilElement]) -> NilElement {
        let mut it = parts.iter();
        let first = it.next().cloned().unwrap_or_else(|| self.identity());
        it.fold(first, |acc, x| self.commutator(&acc, x))
    }

    /// Left-normed commutator of generators, indices 1-based.
    pub fn basic_commutator(&self, idx: &[usize]) -> NilElement {
        let gens: Vec<NilElement> = idx.iter().map(|&i| self.generator(i).expect("index in range")).collect();
        self.left_normed(&gens)
    }

    pub fn is_identity(&self, a: &NilElement) -> bool {
        a.exps.iter().all(|&e| e == 0) && a.coords.iter().all(|p| p.iter().all(|&c| c == 0))
    }

    /// `sum_j u_j y_j = Y(e) - 1` through degree 3.
    pub fn fundamental_identity_holds(&self, a: &NilElement) -> bool {
        let mut lhs = self.zero_poly();
        for (j, u) in a.coords.iter().enumerate() {
            let mut y = self.zero_poly();
            y[self.var_index[j]] = 1;
            lhs = Self::poly_add(&lhs, &self.poly_mul(u, &y));
        }
        let mut rhs = self.unit(&a.exps);
        rhs[0] -= 1;
        lhs == rhs
    }

    /// Membership in `γ_c` modulo `γ₅`, for `1 <= c <= 5`.
    pub fn in_gamma(&self, a: &NilElement, c: usize) -> bool {
        if c <= 1 {
            return true;
        }
        a.exps.iter().all(|&e| e == 0)
            && a.coords.iter().all(|p| p.iter().zip(&self.degree).all(|(&x, &d)| x == 0 || d + 1 >= c))
    }

    /// Homogeneous degree-`deg` part of all coordinates, flattened axis-major.
    fn graded_vector(&self, a: &NilElement, deg: usize) -> Vec<i64> {
        let mut out = Vec::new();
        for p in &a.coords {
            out.extend(p.iter().zip(&self.degree).filter(|(_, &d)| d == deg).map(|(x, _)| *x));
        }
        out
    }

    /// Exponents of `a ∈ γ_w` on the weight-`w` basic commutators modulo `γ_{w+1}`.
    pub fn leading_coordinates(&self, a: &NilElement, w: usize) -> Result<Vec<i64>, NilError> {
        if !(2..=4).contains(&w) {
            return Err(NilError::UnsupportedWeight(w));
        }
        if !self.in_gamma(a, w) {
            return Err(NilError::NotInGamma(w));
        }
        match self.solvers.get(&w) {
            None => Ok(Vec::new()),
            Some(s) => s.solve(&self.graded_vector(a, w - 1)).ok_or(NilError::Inconsistent),
        }
    }

    /// Unique `(n_κ)` with `a ≡ ∏ κ^{n_κ}` over weight-4 basic commutators.
    pub fn bc_coordinates(&self, a: &NilElement) -> Result<BTreeMap<Vec<usize>, i64>, NilError> {
        let n = self.leading_coordinates(a, 4)?;
        Ok(self.basis.weight(4).iter().cloned().zip(n).collect())
    }

    /// Image of an element of `M_r` under `a_i -> 1 + y_i`.
    pub fn project(&self, a: &SolvableElement) -> Result<NilElement, NilError> {
        let ctx = a.context();
        if ctx.class() != 2 {
            return Err(NilError::WrongClass(ctx.class()));
        }
        if ctx.rank() != self.rank {
            return Err(NilError::RankMismatch { expected: self.rank, found: ctx.rank() });
        }
        let coords = laurent_coords(a)
            .iter()
            .map(|l| {
                let mut acc = self.zero_poly();
                for (m, c) in l.terms() {
                    let c = c.to_i64().ok_or(NilError::ExponentTooLarge)?;
                    let u: Vec<i64> = self.unit(&m.0).iter().map(|x| mul(*x, c)).collect();
                    acc = Self::poly_add(&acc, &u);
                }
                Ok(acc)
            })
            .collect::<Result<_, NilError>>()?;
        Ok(NilElement { exps: a.abelianization(), coords })
    }

    /// Evaluates a word, sending `z_i` to the generators and `x_i` to `values[i-1]`.
    pub fn evaluate(&self, w: &Word, values: &[NilElement]) -> Result<NilElement, NilError> {
        let mut acc = self.identity();
        for (s, e) in w.letters() {
            let base = match s.kind {
                SymbolKind::Generator => self.generator(s.index)?,
                SymbolKind::Variable => values.get(s.index - 1).cloned().ok_or(NilError::UnboundVariable(s.index))?,
            };
            let e = e.to_i64().ok_or(NilError::ExponentTooLarge)?;
            acc = self.mul(&acc, &self.pow(&base, e));
        }
        Ok(acc)
    }

    pub fn embed(&self, w: &Word) -> Result<NilElement, NilError> {
        self.evaluate(w, &[])
    }

    /// `∏_j z_j^{e_j}`
    pub fn power_product(&self, e: &[i64]) -> NilElement {
        e.iter().enumerate().fold(self.identity(), |acc, (j, &n)| {
            self.mul(&acc, &self.pow(&self.generator(j + 1).expect("in range"), n))
        })
    }
}

fn exponent_vectors(axis: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if axis + 1 == cur.len() {
        cur[axis] = left;
        out.push(cur.clone());
        cur[axis] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[axis] = k;
        exponent_vectors(axis + 1, left - k, cur, out);
    }
    cur[axis] = 0;
}

pub fn nil_project(q: &NilQuotient, a: &SolvableElement) -> Result<NilElement, NilError> {
    q.project(a)
}

pub fn bc_coordinates(q: &NilQuotient, a: &NilElement) -> Result<BTreeMap<Vec<usize>, i64>, NilError> {
    q.bc_coordinates(a)
}

/// `[z_{i1}^{k1}, …, z_{i4}^{k4}] = [z_{i1}, …, z_{i4}]^{k1 k2 k3 k4}` modulo `γ₅`.
pub fn power_identity_check(k: [i64; 4], idx: [usize; 4]) -> bool {
    let rank = idx.iter().copied().max().unwrap_or(1).max(1);
    let q = NilQuotient::new(rank);
    let powered: Vec<NilElement> =
        idx.iter().zip(k).map(|(&i, n)| q.pow(&q.generator(i).expect("in range"), n)).collect();
    let lhs = q.left_normed(&powered);
    let rhs = q.pow(&q.basic_commutator(&idx), k.iter().product());
    lhs == rhs
}

/// `(α1, α2, α3)` with `δ = k1 m_i − k_i m1`; `i` is 1-based and greater than 1.
pub fn eq19_coefficients(k: &[i64], m: &[i64], i: usize) -> (i64, i64, i64) {
    assert!(i > 1 && k.len() == m.len() && k.len() >= i, "need equal lengths >= i > 1");
    let (k1, ki, m1, mi) = (k[0], k[i - 1], m[0], m[i - 1]);
    let delta = k1 * mi - ki * m1;
    (delta * (k1 * mi + ki * m1), delta * k1 * m1, delta * ki * mi)
}

/// Coefficients of `[z_i,z_1,z_1,z_i]`, `[z_i,z_1,z_1,z_1]`, `[z_i,z_1,z_i,z_i]` in
/// `[g, f, f, g]` where `g = ∏ z_j^{m_j}`, `f = ∏ z_j^{k_j}`.
pub fn eq19_extract(q: &NilQuotient, k: &[i64], m: &[i64], i: usize) -> (i64, i64, i64) {
    let g = q.power_product(m);
    let f = q.power_product(k);
    let c = q.left_normed(&[g.clone(), f.clone(), f, g]);
    let coords = q.bc_coordinates(&c).expect("weight-4 commutator lies in γ4");
    let get = |t: [usize; 4]| coords.get(t.as_slice()).copied().unwrap_or(0);
    (get([i, 1, 1, i]), get([i, 1, 1, 1]), get([i, 1, i, i]))
}

pub fn eq19_oracle_check(q: &NilQuotient, k: &[i64], m: &[i64], i: usize) -> bool {
    eq19_extract(q, k, m, i) == eq19_coefficients(k, m, i)
}

/// The sign pattern forced by `(α1, α2, α3) = (1, 0, 0)`.
pub fn eq19_distinguished_pattern(k: &[i64], m: &[i64], i: usize) -> bool {
    k[0].abs() == 1 && m[0] == 0 && k[i - 1] == 0 && m[i - 1].abs() == 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eq19ScanReport {
    pub rank: usize,
    pub bound: i64,
    pub index: usize,
    pub points: usize,
    pub mismatches: Vec<(Vec<i64>, Vec<i64>)>,
    pub distinguished: usize,
    pub pattern_violations: Vec<(Vec<i64>, Vec<i64>)>,
}

impl Eq19ScanReport {
    pub fn confirmed(&self) -> bool {
        self.mismatches.is_empty() && self.pattern_violations.is_empty()
    }
}

impl fmt::Display for Eq19ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, m) in &self.mismatches {
            writeln!(f, "mismatch k={k:?} m={m:?}")?;
        }
        for (k, m) in &self.pattern_violations {
            writeln!(f, "pattern k={k:?} m={m:?}")?;
        }
        writeln!(f, "points={} mismatches={} distinguished={}", self.points, self.mismatches.len(), self.distinguished)?;
        let verdict = if self.confirmed() { "CONFIRMED" } else { "VIOLATED" };
        writeln!(f, "EQ19-ORACLE: {verdict} bound={} r={} i={}", self.bound, self.rank, self.index)
    }
}

fn grid_point(mut n: usize, len: usize, bound: i64) -> Vec<i64> {
    let side = (2 * bound + 1) as usize;
    (0..len)
        .map(|_| {
            let d = n % side;
            n /= side;
            d as i64 - bound
        })
        .rev()
        .collect()
}

/// Full grid `|k_j|, |m_j| <= bound` in rank `r`.
pub fn eq19_scan(rank: usize, bound: i64, i: usize) -> Eq19ScanReport {
    assert!(bound >= 0 && rank >= i && i > 1);
    let q = NilQuotient::new(rank);
    let side = (2 * bound + 1) as usize;
    let points = side.pow(2 * rank as u32);
    let results: Vec<(usize, bool, bool, bool)> = (0..points)
        .into_par_iter()
        .map(|n| {
            let p = grid_point(n, 2 * rank, bound);
            let (k, m) = p.split_at(rank);
            let got = eq19_extract(&q, k, m, i);
            let is_one = got == (1, 0, 0);
            (n, got == eq19_coefficients(k, m, i), is_one, is_one == eq19_distinguished_pattern(k, m, i))
        })
        .collect();
    let split = |n: usize| {
        let p = grid_point(n, 2 * rank, bound);
        (p[..rank].to_vec(), p[rank..].to_vec())
    };
    Eq19ScanReport {
        rank,
        bound,
        index: i,
        points,
        mismatches: results.iter().filter(|r| !r.1).map(|r| split(r.0)).collect(),
        distinguished: results.iter().filter(|r| r.2).count(),
        pattern_violations: results.iter().filter(|r| !r.3).map(|r| split(r.0)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma7Report {
    pub bound: i64,
    pub solutions: Vec<[i64; 4]>,
}

impl Lemma7Report {
    pub fn confirmed(&self) -> bool {
        !self.solutions.is_empty()
            && self.solutions.iter().all(|&[a, b, c, d]| b == 0 && c == 0 && a.abs() == 1 && d.abs() == 1)
    }
}

impl fmt::Display for Lemma7Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for [a, b, c, d] in &self.solutions {
            writeln!(f, "({a},{b},{c},{d})")?;
        }
        let verdict = if self.confirmed() { "CONFIRMED" } else { "VIOLATED" };
        writeln!(f, "LEMMA7-QUOTIENT: {verdict} bound={}", self.bound)
    }
}

/// All `(a,b,c,d)` in `[-B,B]^4` with `[g1,g2,g2,g1] ≡ [z1,z2,z2,z1]` mod `γ₅M₂`,
/// where `g1 = z1^a z2^b` and `g2 = z1^c z2^d`.
pub fn lemma7_scan(bound: i64) -> Lemma7Report {
    assert!(bound >= 1);
    let q = NilQuotient::new(2);
    let target = q.basic_commutator(&[1, 2, 2, 1]);
    let side = (2 * bound + 1) as usize;
    let mut solutions: Vec<[i64; 4]> = (0..side.pow(4))
        .into_par_iter()
        .filter_map(|n| {
            let p = grid_point(n, 4, bound);
            let g1 = q.power_product(&p[..2]);
            let g2 = q.power_product(&p[2..]);
            let c = q.left_normed(&[g1.clone(), g2.clone(), g2, g1]);
            (c == target).then(|| [p[0], p[1], p[2], p[3]])
        })
        .collect();
    solutions.sort();
    Lemma7Report { bound, solutions }
}
