//! Closure analysis for finitely generated subgroups of `S_{r,d}`.
//!
//! Verdicts are constructive or rule-based and never claim that verbal
//! closedness was decided: a retraction is reported only after it has been
//! verified, a negative verdict only when a rule's contrapositive applies.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::groupring::Laurent;
use crate::lattice::{bezout_vector, is_direct_factor, rab, smith_normal_form, IntMatrix};
use crate::magnus::{
    apply_endomorphism, embed, evaluate_in, from_laurent, module_power, ring_constant, ring_element, to_laurent,
    GroupContext, MagnusError, SolvableElement,
};
use crate::words::{abelianize, parse_word, substitute, Symbol, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error(transparent)]
    Magnus(#[from] MagnusError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("element is trivial")]
    IdentityInput,
    #[error("abelian image is not primitive (gcd {0})")]
    NotPrimitive(BigInt),
    #[error("objects live in different groups")]
    ContextMismatch,
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("constructed retraction failed verification")]
    VerificationFailed,
}

/// Limits for [`bounded_search`]: word length counts letters `x_k^{±1}`, and
/// no letter may repeat more than `exponent_cap` times in a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_length: usize,
    pub exponent_cap: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_length: 4, exponent_cap: 3 }
    }
}

impl fmt::Display for SearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={} cap={}", self.max_length, self.exponent_cap)
    }
}

/// `H = <h_1, …, h_m>`; H-words are words in unknowns where `x_k` stands for `h_k`.
#[derive(Debug, Clone)]
pub struct Subgroup {
    ctx: GroupContext,
    generators: Vec<Word>,
    matrix: IntMatrix,
    normal_forms: Vec<SolvableElement>,
}

impl Subgroup {
    pub fn new(ctx: GroupContext, generators: Vec<Word>) -> Result<Self, ClosureError> {
        let normal_forms = generators.iter().map(|g| embed(g, ctx)).collect::<Result<Vec<_>, _>>()?;
        let rows: Vec<Vec<BigInt>> = generators.iter().map(|g| abelianize(g, ctx.rank())).collect();
        let matrix = if rows.is_empty() { IntMatrix::zeros(0, ctx.rank()) } else { IntMatrix::from_rows(rows) };
        Ok(Subgroup { ctx, generators, matrix, normal_forms })
    }

    /// One generator word per line; `#` starts a comment.
    pub fn parse(text: &str, ctx: GroupContext) -> Result<Self, ClosureError> {
        let mut gens = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let w = parse_word(body, Some(ctx.rank())).map_err(|e| ClosureError::Parse { line: n + 1, msg: e.to_string() })?;
            if w.has_variables() {
                return Err(ClosureError::Parse { line: n + 1, msg: "subgroup generators use z_i only".into() });
            }
            gens.push(w);
        }
        Self::new(ctx, gens)
    }

    pub fn context(&self) -> GroupContext {
        self.ctx
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn normal_forms(&self) -> &[SolvableElement] {
        &self.normal_forms
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn rab(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            rab(&self.matrix)
        }
    }

    /// Value of an H-word.
    pub fn element(&self, hw: &Word) -> Result<SolvableElement, ClosureError> {
        if hw.has_generators() {
            return Err(ClosureError::Precondition(format!("H-word {hw} contains generators")));
        }
        Ok(evaluate_in(hw, self.ctx, &self.normal_forms)?)
    }

    /// An H-word rewritten over the generators `z_i`.
    pub fn expand(&self, hw: &Word) -> Result<Word, ClosureError> {
        let map: BTreeMap<usize, Word> = self.generators.iter().cloned().enumerate().map(|(i, g)| (i + 1, g)).collect();
        Ok(substitute(hw, &map)?)
    }
}

/// Split system `w_i(x) = h_i`, unknowns on the left, constants on the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    equations: Vec<(Word, Word)>,
    unknowns: usize,
}

impl EquationSystem {
    pub fn new(equations: Vec<(Word, Word)>) -> Result<Self, ClosureError> {
        for (lhs, rhs) in &equations {
            if lhs.has_generators() {
                return Err(ClosureError::InvalidEquation(format!("left side {lhs} contains constants")));
            }
            if rhs.has_variables() {
                return Err(ClosureError::InvalidEquation(format!("right side {rhs} contains unknowns")));
            }
        }
        let unknowns = equations.iter().map(|(l, _)| l.max_variable()).max().unwrap_or(0);
        Ok(EquationSystem { equations, unknowns })
    }

    /// `lhs = rhs` per line; `#` starts a comment.
    pub fn parse(text: &str, rank: usize) -> Result<Self, ClosureError> {
        let mut eqs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let perr = |msg: String| ClosureError::Parse { line: n + 1, msg };
            let (l, r) = body.split_once('=').ok_or_else(|| perr("expected `lhs = rhs`".into()))?;
            let lhs = parse_word(l.trim(), None).map_err(|e| perr(format!("left side: {e}")))?;
            let rhs = parse_word(r.trim(), Some(rank)).map_err(|e| perr(format!("right side: {e}")))?;
            if let Err(ClosureError::InvalidEquation(msg)) = Self::new(vec![(lhs.clone(), rhs.clone())]) {
                return Err(perr(msg));
            }
            eqs.push((lhs, rhs));
        }
        Self::new(eqs)
    }

    pub fn equations(&self) -> &[(Word, Word)] {
        &self.equations
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }
}

/// Endomorphism `z_i -> images[i]`, with the image words and optional H-word witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Retraction {
    ctx: GroupContext,
    images: Vec<SolvableElement>,
    words: Vec<Word>,
    witnesses: Vec<Option<Word>>,
}

impl Retraction {
    pub fn from_words(ctx: GroupContext, words: Vec<Word>, witnesses: Vec<Option<Word>>) -> Result<Self, ClosureError> {
        if words.len() != ctx.rank() || witnesses.len() != ctx.rank() {
            return Err(ClosureError::Precondition(format!("need {} images", ctx.rank())));
        }
        let images = words.iter().map(|w| embed(w, ctx)).collect::<Result<Vec<_>, _>>()?;
        Ok(Retraction { ctx, images, words, witnesses })
    }

    pub fn context(&self) -> GroupContext {
        self.ctx
    }

    pub fn images(&self) -> &[SolvableElement] {
        &self.images
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn witnesses(&self) -> &[Option<Word>] {
        &self.witnesses
    }

    pub fn apply(&self, w: &Word) -> Result<SolvableElement, ClosureError> {
        Ok(apply_endomorphism(w, &self.images)?)
    }

    /// `ρ(ρ(z_i)) = ρ(z_i)` for every generator.
    pub fn is_idempotent(&self) -> Result<bool, ClosureError> {
        for (w, img) in self.words.iter().zip(&self.images) {
            if &self.apply(w)? != img {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Checks that every image lies in `H` (by witness, or by search when
/// `bounds` is given) and that `ρ` fixes every generator of `H`.
pub fn verify_retraction(rho: &Retraction, h: &Subgroup, bounds: Option<SearchBounds>) -> Result<bool, ClosureError> {
    if rho.ctx != h.ctx {
        return Err(ClosureError::ContextMismatch);
    }
    for (i, img) in rho.images.iter().enumerate() {
        let witnessed = match &rho.witnesses[i] {
            Some(w) => &h.element(w)? == img,
            None => false,
        };
        if !witnessed {
            let Some(b) = bounds else { return Ok(false) };
            let sys = EquationSystem::new(vec![(Word::var(1), rho.words[i].clone())])?;
            if bounded_search(&sys, h, b)? == SearchOutcome::NoneFound {
                return Ok(false);
            }
        }
    }
    for (g, nf) in h.generators.iter().zip(&h.normal_forms) {
        if &rho.apply(g)? != nf {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `z_i -> h^{m_i}` with `<m, e> = 1`, where `e` is the abelian image of `h`.
pub fn cyclic_retract(h: &Word, ctx: GroupContext) -> Result<Retraction, ClosureError> {
    let nf = embed(h, ctx)?;
    if nf.is_identity() {
        return Err(ClosureError::IdentityInput);
    }
    let e = abelianize(h, ctx.rank());
    let (g, m) = bezout_vector(&e);
    if !g.is_one() {
        return Err(ClosureError::NotPrimitive(g));
    }
    let words = m.iter().map(|mi| h.pow(mi)).collect();
    let witnesses = m.iter().map(|mi| Some(Word::var(1).pow(mi))).collect();
    let rho = Retraction::from_words(ctx, words, witnesses)?;
    let sub = Subgroup::new(ctx, vec![h.clone()])?;
    if !verify_retraction(&rho, &sub, None)? {
        return Err(ClosureError::VerificationFailed);
    }
    Ok(rho)
}

/// `ψ(z_i) = a^-1 φ(z_i) a`, valid when `φ(h_k) = a h_k a^-1` for every generator of `H`.
pub fn conjugation_fixup(
    phi: &Retraction,
    a: &Word,
    a_witness: Option<&Word>,
    h: &Subgroup,
    bounds: Option<SearchBounds>,
) -> Result<Retraction, ClosureError> {
    if phi.ctx != h.ctx {
        return Err(ClosureError::ContextMismatch);
    }
    let ae = embed(a, h.ctx)?;
    if let Some(w) = a_witness {
        if h.element(w)? != ae {
            return Err(ClosureError::Precondition("witness for a does not evaluate to a".into()));
        }
    }
    for (k, (g, nf)) in h.generators.iter().zip(&h.normal_forms).enumerate() {
        if phi.apply(g)? != nf.conjugate_by(&ae)? {
            return Err(ClosureError::Precondition(format!("φ(h{}) is not a h{} a^-1", k + 1, k + 1)));
        }
    }
    let ai = a.inverse();
    let words = phi.words.iter().map(|w| ai.mul(w).mul(a)).collect();
    let witnesses = phi
        .witnesses
        .iter()
        .map(|w| match (w, a_witness) {
            (Some(w), Some(aw)) => Some(aw.inverse().mul(w).mul(aw)),
            _ => None,
        })
        .collect();
    let psi = Retraction::from_words(h.ctx, words, witnesses)?;
    if !verify_retraction(&psi, h, bounds)? {
        return Err(ClosureError::VerificationFailed);
    }
    Ok(psi)
}

/// Finds `d ∈ M_r'` with `c_i = d^{1 - a_i}` for `i = 1..r'`.
pub fn d_extraction(cs: &[SolvableElement]) -> Result<SolvableElement, ClosureError> {
    let Some(first) = cs.first() else {
        return Err(ClosureError::Precondition("no elements given".into()));
    };
    let ctx = first.context();
    if ctx.class() != 2 {
        return Err(MagnusError::WrongClass { expected: 2, found: ctx.class() }.into());
    }
    if cs.len() > ctx.rank() {
        return Err(ClosureError::Precondition(format!("at most {} elements", ctx.rank())));
    }
    if cs.iter().any(|c| c.context() != ctx) {
        return Err(ClosureError::ContextMismatch);
    }
    if let Some(i) = cs.iter().position(|c| !c.in_last_derived_term()) {
        return Err(ClosureError::Precondition(format!("c{} is not in the derived subgroup", i + 1)));
    }
    let lower = ctx.lower().expect("class 2");
    let one_minus = |i: usize| {
        let ai = ring_element(&lower.generator(i).expect("in range"));
        &ring_constant(lower, 1) - &ai
    };
    for (i, ci) in cs.iter().enumerate().skip(1) {
        if module_power(first, &one_minus(i + 1))? != module_power(ci, &one_minus(1))? {
            return Err(ClosureError::Inconsistent(format!("c1^(1-a{}) != c{}^(1-a1)", i + 1, i + 1)));
        }
    }
    let divisor = Laurent::one_minus(ctx.rank(), 0, 1);
    let mut coords = Vec::with_capacity(ctx.rank());
    for u in first.coords() {
        let q = to_laurent(u)
            .exact_div(&divisor)
            .map_err(|e| ClosureError::Inconsistent(e.to_string()))?
            .ok_or_else(|| ClosureError::Inconsistent("c1 coordinate not divisible by 1-a1".into()))?;
        coords.push(from_laurent(&q));
    }
    let d = SolvableElement::from_coords(ctx, coords)
        .map_err(|_| ClosureError::Inconsistent("quotient violates the fundamental identity".into()))?;
    for (i, ci) in cs.iter().enumerate() {
        if &module_power(&d, &one_minus(i + 1))? != ci {
            return Err(ClosureError::Inconsistent(format!("c{} != d^(1-a{})", i + 1, i + 1)));
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// One H-word per unknown.
    Found(Vec<Word>),
    NoneFound,
}

/// Freely reduced H-words in length-lex order (alphabet `x1, x1^-1, x2, …`),
/// first occurrence of each value only.
pub fn candidate_words(h: &Subgroup, bounds: SearchBounds) -> Vec<(Word, SolvableElement)> {
    let letters: Vec<(usize, i64)> = (1..=h.len()).flat_map(|k| [(k, 1), (k, -1)]).collect();
    let letter_values: Vec<SolvableElement> =
        letters.iter().map(|&(k, s)| h.normal_forms[k - 1].pow(s)).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let identity = h.ctx.identity();
    seen.insert(identity.clone());
    out.push((Word::identity(), identity.clone()));
    // (letters, last letter, run length, value)
    let mut layer: Vec<(Vec<usize>, usize, SolvableElement)> = vec![(Vec::new(), 0, identity)];
    for _ in 0..bounds.max_length {
        let mut next = Vec::new();
        for (seq, run, value) in &layer {
            for (li, &(k, s)) in letters.iter().enumerate() {
                let mut run_len = 1;
                if let Some(&last) = seq.last() {
                    let (lk, ls) = letters[last];
                    if lk == k && ls == -s {
                        continue;
                    }
                    if last == li {
                        run_len = run + 1;
                    }
                }
                if run_len > bounds.exponent_cap {
                    continue;
                }
                let mut s2 = seq.clone();
                s2.push(li);
                let v = value.mul(&letter_values[li]).expect("same group");
                if seen.insert(v.clone()) {
                    let w = s2.iter().fold(Word::identity(), |acc, &i| acc.mul(&Word::letter(Symbol::var(letters[i].0), letters[i].1)));
                    out.push((w, v.clone()));
                }
                next.push((s2, run_len, v));
            }
        }
        layer = next;
    }
    out
}

/// First tuple of H-words solving every equation, tuples ordered by largest
/// candidate index and then lexicographically.
pub fn bounded_search(sys: &EquationSystem, h: &Subgroup, bounds: SearchBounds) -> Result<SearchOutcome, ClosureError> {
    let ctx = h.ctx;
    let rhs: Vec<SolvableElement> = sys.equations.iter().map(|(_, r)| embed(r, ctx)).collect::<Result<_, _>>()?;
    let n = sys.unknowns;
    let solves = |values: &[SolvableElement]| -> bool {
        sys.equations
            .iter()
            .zip(&rhs)
            .all(|((l, _), r)| evaluate_in(l, ctx, values).map(|v| &v == r).unwrap_or(false))
    };
    if n == 0 {
        return Ok(if solves(&[]) { SearchOutcome::Found(Vec::new()) } else { SearchOutcome::NoneFound });
    }
    let cands = candidate_words(h, bounds);
    for b in 0..cands.len() {
        let layer = tuples_with_max(b, n);
        let hit = layer.par_iter().find_first(|t| {
            let values: Vec<SolvableElement> = t.iter().map(|&i| cands[i].1.clone()).collect();
            solves(&values)
        });
        if let Some(t) = hit {
            return Ok(SearchOutcome::Found(t.iter().map(|&i| cands[i].0.clone()).collect()));
        }
    }
    Ok(SearchOutcome::NoneFound)
}

/// All `n`-tuples over `0..=b` containing `b`, in lexicographic order.
fn tuples_with_max(b: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut t = vec![0usize; n];
    loop {
        if t.contains(&b) {
            out.push(t.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if t[i] < b {
                t[i] += 1;
                for x in t.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Proposition1,
    Lemma3,
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    None,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Proposition1 => "proposition1",
            Rule::Lemma3 => "lemma3",
            Rule::Theorem1 => "theorem1",
            Rule::Theorem2 => "theorem2",
            Rule::Theorem3 => "theorem3",
            Rule::Theorem4 => "theorem4",
            Rule::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    RetractConstructed,
    NotVerballyClosed,
    Conditional,
    EqualsFullGroup,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::RetractConstructed => "retract-constructed",
            Verdict::NotVerballyClosed => "not-verbally-closed",
            Verdict::Conditional => "conditional",
            Verdict::EqualsFullGroup => "equals-full-group (certified)",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Linear system attached to `H = <z_k c_1, c_2, …, c_m>` with `c_j ∈ G^{(d-1)}`.
///
/// For a tuple `h` of H-words, `c_i(h) = ∏_j c_j^{β_ij}` with `β_ij ∈ Z[a_k^{±1}]`,
/// and `δ_ij = -β_ij`. The matrix `I + δ` has determinant `1` modulo `a_k - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoxSystem {
    pub axis: usize,
    pub tuple: Vec<Word>,
    pub tuple_source: &'static str,
    pub delta: Vec<Vec<Laurent>>,
    pub determinant: Laurent,
    pub residue: BigInt,
    pub checked: bool,
}

/// `(k, [c_1, …, c_m])` if `H` has the supported shape.
pub fn theorem1_shape(h: &Subgroup) -> Option<(usize, Vec<Word>)> {
    let ctx = h.ctx;
    if ctx.class() < 2 || h.is_empty() {
        return None;
    }
    let e = h.matrix.row(0);
    let k = e.iter().position(|x| !x.is_zero())?;
    if !e[k].is_one() || e.iter().filter(|x| !x.is_zero()).count() != 1 {
        return None;
    }
    let c1 = Word::gen(k + 1).inverse().mul(&h.generators[0]);
    let mut cs = vec![c1];
    cs.extend(h.generators[1..].iter().cloned());
    for c in &cs {
        if !embed(c, ctx).ok()?.in_last_derived_term() {
            return None;
        }
    }
    Some((k + 1, cs))
}

#[derive(Debug, Clone)]
struct Formal {
    n: i64,
    beta: Vec<Laurent>,
}

fn formal_mul(x: &Formal, y: &Formal, t: &dyn Fn(i64) -> Laurent) -> Formal {
    let s = t(x.n);
    Formal { n: x.n + y.n, beta: x.beta.iter().zip(&y.beta).map(|(a, b)| a + &(&s * b)).collect() }
}

fn formal_inv(x: &Formal, t: &dyn Fn(i64) -> Laurent) -> Formal {
    let s = t(-x.n);
    Formal { n: -x.n, beta: x.beta.iter().map(|b| -&(&s * b)).collect() }
}

fn formal_eval(w: &Word, values: &[Formal], unit: &Formal, t: &dyn Fn(i64) -> Laurent) -> Formal {
    let mut acc = unit.clone();
    for (s, e) in w.letters() {
        let v = &values[s.index - 1];
        let e = e.to_i64().expect("small exponent");
        let step = if e < 0 { formal_inv(v, t) } else { v.clone() };
        for _ in 0..e.unsigned_abs() {
            acc = formal_mul(&acc, &step, t);
        }
    }
    acc
}

fn laurent_det(m: &[Vec<Laurent>], rank: usize) -> Laurent {
    match m.len() {
        0 => Laurent::one(rank),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Laurent::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Laurent>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
                let term = &m[0][j] * &laurent_det(&minor, rank);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Builds the δ-system for the H-word tuple `tuple` (one entry per `z_q`).
pub fn fox_system(h: &Subgroup, axis: usize, cs: &[Word], tuple: &[Word], source: &'static str) -> Result<FoxSystem, ClosureError> {
    let ctx = h.ctx;
    let r = ctx.rank();
    if tuple.len() != r {
        return Err(ClosureError::Precondition(format!("need {r} H-words")));
    }
    let m = cs.len();
    let t = move |n: i64| Laurent::monomial(r, axis - 1, n);
    let unit = Formal { n: 0, beta: vec![Laurent::zero(); m] };
    let gens: Vec<Formal> = (0..m)
        .map(|j| {
            let mut beta = vec![Laurent::zero(); m];
            beta[j] = if j == 0 { t(1) } else { Laurent::one(r) };
            Formal { n: i64::from(j == 0), beta }
        })
        .collect();
    let hv: Vec<Formal> = tuple.iter().map(|w| formal_eval(w, &gens, &unit, &t)).collect();
    let lower = ctx.lower().ok_or(MagnusError::NoFoxTarget)?;
    let g_values = tuple.iter().map(|w| h.element(w)).collect::<Result<Vec<_>, _>>()?;
    let c_nfs = cs.iter().map(|c| embed(c, ctx)).collect::<Result<Vec<_>, _>>()?;
    let mut delta = Vec::with_capacity(m);
    let mut checked = true;
    for c in cs {
        let f = formal_eval(c, &hv, &unit, &t);
        // c_i(h) in G, rebuilt from the formal coefficients
        let mut rebuilt = ctx.identity();
        for (cj, b) in c_nfs.iter().zip(&f.beta) {
            let alpha = b.map_keys(|mono| lower.generator(axis).expect("in range").pow(mono.0[axis - 1]).into_normal_form());
            rebuilt = rebuilt.mul(&module_power(cj, &alpha)?)?;
        }
        checked &= f.n == 0 && apply_endomorphism(c, &g_values)? == rebuilt;
        delta.push(f.beta.iter().map(|b| -b).collect::<Vec<Laurent>>());
    }
    let mut nmat = delta.clone();
    for (i, row) in nmat.iter_mut().enumerate() {
        row[i] = &row[i] + &Laurent::one(r);
    }
    let determinant = laurent_det(&nmat, r);
    let residue = determinant.evaluate_at(&vec![1; r]);
    Ok(FoxSystem { axis, tuple: tuple.to_vec(), tuple_source: source, delta, determinant, residue, checked })
}

#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub rab: usize,
    pub rule: Rule,
    pub verdict: Verdict,
    pub retraction: Option<Retraction>,
    pub justification: Vec<String>,
    pub details: Vec<(String, String)>,
}

impl ClosureReport {
    fn new(rab: usize, rule: Rule, verdict: Verdict, why: impl Into<String>) -> Self {
        ClosureReport { rab, rule, verdict, retraction: None, justification: vec![why.into()], details: Vec::new() }
    }

    fn detail(&mut self, key: impl Into<String>, value: impl ToString) {
        self.details.push((key.into(), value.to_string()));
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("rab={}\nrule={}\nverdict={}\n", self.rab, self.rule, self.verdict);
        if let Some(rho) = &self.retraction {
            for (i, w) in rho.words.iter().enumerate() {
                s += &format!("retraction: z{} -> {}\n", i + 1, w);
            }
        }
        for j in &self.justification {
            s += &format!("justification: {j}\n");
        }
        for (k, v) in &self.details {
            s += &format!("{k}: {v}\n");
        }
        s
    }

    pub fn to_machine(&self) -> String {
        let mut s = format!("rab={}\nrule={}\nverdict={}\n", self.rab, self.rule, self.verdict);
        if let Some(rho) = &self.retraction {
            for (i, w) in rho.words.iter().enumerate() {
                s += &format!("retraction.z{}={}\n", i + 1, w);
            }
        }
        for j in &self.justification {
            s += &format!("justification={j}\n");
        }
        for (k, v) in &self.details {
            s += &format!("{k}={v}\n");
        }
        s
    }
}

impl fmt::Display for ClosureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Rank-zero rule; `None` when `rab(H) > 0`.
pub fn proposition1_verdict(h: &Subgroup) -> Option<ClosureReport> {
    if h.rab() != 0 {
        return None;
    }
    if let Some(k) = h.normal_forms.iter().position(|g| !g.is_identity()) {
        return Some(ClosureReport::new(
            0,
            Rule::Proposition1,
            Verdict::NotVerballyClosed,
            format!("h{} is nontrivial while rab(H)=0; verbally closed subgroups with trivial abelian image are trivial (Proposition 1)", k + 1),
        ));
    }
    let ctx = h.ctx;
    let rho = Retraction::from_words(ctx, vec![Word::identity(); ctx.rank()], vec![Some(Word::identity()); ctx.rank()])
        .expect("identity images");
    let mut rep = ClosureReport::new(0, Rule::Proposition1, Verdict::RetractConstructed, "H is trivial; z_i -> 1 is a retraction onto H");
    rep.retraction = Some(rho);
    Some(rep)
}

fn attach_verified(rep: &mut ClosureReport, rho: Retraction, h: &Subgroup) -> Result<(), ClosureError> {
    if !verify_retraction(&rho, h, None)? || !rho.is_idempotent()? {
        return Err(ClosureError::VerificationFailed);
    }
    rep.retraction = Some(rho);
    Ok(())
}

/// Looks for `x_1..x_r` in `H` with `h_k(x) = h_k` for all `k`, which is a retraction `z_i -> x_i`.
pub fn search_retraction(h: &Subgroup, bounds: SearchBounds) -> Result<Option<Retraction>, ClosureError> {
    let eqs = h.generators.iter().map(|g| (g.generators_to_variables(), g.clone())).collect();
    let mut sys = EquationSystem::new(eqs)?;
    sys.unknowns = h.ctx.rank();
    match bounded_search(&sys, h, bounds)? {
        SearchOutcome::NoneFound => Ok(None),
        SearchOutcome::Found(xs) => {
            let words = xs.iter().map(|x| h.expand(x)).collect::<Result<Vec<_>, _>>()?;
            let rho = Retraction::from_words(h.ctx, words, xs.into_iter().map(Some).collect())?;
            Ok(Some(rho))
        }
    }
}

/// Row reduction of the generators: `(H-words, values)` with the first row carrying
/// the whole abelian image and the rest in `G'`.
fn reduced_generators(h: &Subgroup) -> Result<Vec<(Word, SolvableElement)>, ClosureError> {
    let snf = smith_normal_form(&h.matrix);
    let mut out = Vec::with_capacity(h.len());
    for i in 0..h.len() {
        let mut w = Word::identity();
        for (j, c) in snf.u.row(i).iter().enumerate() {
            if !c.is_zero() {
                w = w.mul(&Word::letter(Symbol::var(j + 1), c.clone()));
            }
        }
        let v = h.element(&w)?;
        out.push((w, v));
    }
    Ok(out)
}

/// Applies the decision rules in order and, with `search`, tries to certify
/// conditional verdicts by bounded search.
pub fn analyze(h: &Subgroup, search: Option<SearchBounds>) -> Result<ClosureReport, ClosureError> {
    if let Some(rep) = proposition1_verdict(h) {
        return Ok(rep);
    }
    let ctx = h.ctx;
    let r = ctx.rank();
    let rab = h.rab();
    if !is_direct_factor(&h.matrix) {
        let snf = smith_normal_form(&h.matrix);
        let factors: Vec<String> = snf.invariant_factors().iter().map(|x| x.abs().to_string()).collect();
        let mut rep = ClosureReport::new(
            rab,
            Rule::Lemma3,
            Verdict::NotVerballyClosed,
            "abelian image is not a direct factor of Z^r; verbally closed subgroups have direct-factor images (Lemma 3)",
        );
        rep.detail("invariant-factors", factors.join(","));
        return Ok(rep);
    }
    let mut rep = if rab == 1 {
        let reduced = reduced_generators(h)?;
        if reduced[1..].iter().all(|(_, v)| v.is_identity()) {
            let (hw, _) = &reduced[0];
            let g = h.expand(hw)?;
            let rho = cyclic_retract(&g, ctx)?;
            let witnesses = rho.witnesses.iter().map(|w| w.as_ref().map(|w| substitute(w, &BTreeMap::from([(1, hw.clone())])).expect("bound"))).collect();
            let rho = Retraction { witnesses, ..rho };
            if verify_retraction(&rho, h, None)? && rho.is_idempotent()? {
                let mut rep = ClosureReport::new(
                    1,
                    Rule::Theorem1,
                    Verdict::RetractConstructed,
                    "H is generated by one element with primitive abelian image; z_i -> g^{m_i} with <m,e>=1 (Theorem 1, Lemma 5)",
                );
                rep.detail("cyclic-generator", hw);
                rep.retraction = Some(rho);
                return Ok(rep);
            }
        }
        let mut rep = ClosureReport::new(
            1,
            Rule::Theorem1,
            Verdict::Conditional,
            "rab(H)=1: H is a retract provided it is verbally closed (Theorem 1); verbal closedness is assumed, not decided",
        );
        match theorem1_shape(h) {
            Some((k, cs)) => {
                let mut tuple = vec![Word::identity(); r];
                tuple[k - 1] = Word::var(1);
                let mut source = "projection";
                if let Some(b) = search {
                    if let Some(rho) = search_retraction(h, b)? {
                        tuple = rho.witnesses.iter().map(|w| w.clone().expect("witnessed")).collect();
                        source = "search";
                    }
                }
                let sys = fox_system(h, k, &cs, &tuple, source)?;
                rep.detail("fox.shape", format!("<z{k}*c1, c2..c{}>", cs.len()));
                rep.detail("fox.tuple", format!("{} ({})", join_words(&sys.tuple), sys.tuple_source));
                for (i, row) in sys.delta.iter().enumerate() {
                    for (j, x) in row.iter().enumerate() {
                        rep.detail(format!("fox.delta.{}.{}", i + 1, j + 1), x);
                    }
                }
                rep.detail("fox.det", &sys.determinant);
                rep.detail(format!("fox.det-mod-(a{k}-1)"), &sys.residue);
                rep.detail("fox.check", if sys.checked { "ok" } else { "failed" });
            }
            None => rep.detail("fox.shape", "unsupported (supply generators as z_k*c1, c2, ... with c_j in the last derived term)"),
        }
        rep
    } else if rab == r {
        let mut rep = ClosureReport::new(
            rab,
            Rule::Theorem2,
            Verdict::Conditional,
            format!("rab(H)=r={r}: H equals S_{{{r},{}}} provided it is verbally closed (Theorem 2)", ctx.class()),
        );
        if let Some(b) = search {
            let mut witnesses = Vec::with_capacity(r);
            for i in 1..=r {
                let sys = EquationSystem::new(vec![(Word::var(1), Word::gen(i))])?;
                match bounded_search(&sys, h, b)? {
                    SearchOutcome::Found(xs) => witnesses.push(Some(xs[0].clone())),
                    SearchOutcome::NoneFound => break,
                }
            }
            if witnesses.len() == r {
                rep.verdict = Verdict::EqualsFullGroup;
                rep.justification.push(format!("every z_i is an H-word found by bounded search ({b})"));
                let rho = Retraction::from_words(ctx, (1..=r).map(Word::gen).collect(), witnesses)?;
                attach_verified(&mut rep, rho, h)?;
                return Ok(rep);
            }
            rep.detail("search", format!("some z_i not found as an H-word ({b})"));
        }
        return Ok(rep);
    } else if h.len() == 2 && rab == 2 {
        ClosureReport::new(
            2,
            Rule::Theorem3,
            Verdict::Conditional,
            "2-generated with abelian image a rank-2 direct factor (Lemma 6 precondition holds): H is a retract provided it is verbally closed (Theorem 3)",
        )
    } else if ctx.class() == 2 {
        ClosureReport::new(
            rab,
            Rule::Theorem4,
            Verdict::Conditional,
            format!("metabelian with rab(H)={rab}: H is a retract provided it is {}-verbally closed (Theorem 4)", rab - 1),
        )
    } else {
        ClosureReport::new(rab, Rule::None, Verdict::Unknown, "no decision rule applies")
    };
    if let Some(b) = search {
        match search_retraction(h, b)? {
            Some(rho) => {
                rep.verdict = Verdict::RetractConstructed;
                rep.justification.push(format!("retraction z_i -> x_i found by bounded search ({b})"));
                attach_verified(&mut rep, rho, h)?;
            }
            None => rep.detail("search", format!("no retraction found ({b})")),
        }
    }
    Ok(rep)
}

fn join_words(ws: &[Word]) -> String {
    ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")
}
