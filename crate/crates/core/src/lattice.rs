//! Integer lattices: Smith normal form and the abelianization tests built on it.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("the zero vector has no primitivity")]
    ZeroVector,
    #[error("vector is not primitive (gcd {0})")]
    NotPrimitive(BigInt),
    #[error("matrix parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("matrix must have at least one row and one column")]
    Empty,
}

pub type IntVector = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Panics if the rows are ragged or empty.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        assert!(n > 0, "matrix needs a row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IntVector {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += factor * row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(source, j)] * factor;
            self[(target, j)] += v;
        }
    }

    /// col[target] += factor * col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, source)] * factor;
            self[(i, target)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * prev
    }

    pub fn parse(text: &str) -> Result<IntMatrix, LatticeError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|t| {
                    t.trim().parse::<BigInt>().map_err(|_| LatticeError::Parse {
                        line: lineno + 1,
                        msg: format!("bad integer '{}'", t.trim()),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(first) = rows.first() {
                let first: &Vec<BigInt> = first;
                if first.len() != row.len() {
                    return Err(LatticeError::Parse { line: lineno + 1, msg: "ragged row".into() });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LatticeError::Empty);
        }
        Ok(IntMatrix::from_rows(rows))
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// One row per line, entries separated by commas.
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `u * a * v == d`, with `u`, `v` unimodular and `d` diagonal with
/// nonnegative entries `d_1 | d_2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, tracked alongside it.
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            // Pivot: smallest nonzero |entry| in the trailing block, ties to lowest (row, col).
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d[(i, j)];
                    if x.is_zero() {
                        continue;
                    }
                    if pivot.is_none_or(|(pi, pj)| x.abs() < d[(pi, pj)].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return SmithDecomposition { u, d, v, v_inv };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&p);
                let neg = -&q;
                d.add_row(i, t, &neg);
                u.add_row(i, t, &neg);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&p);
                let neg = -&q;
                d.add_col(j, t, &neg);
                v.add_col(j, t, &neg);
                // V^-1 picks up the inverse column operation as a row operation.
                v_inv.add_row(t, j, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&p)));
            if let Some(i) = offender {
                d.add_row(t, i, &BigInt::one());
                u.add_row(t, i, &BigInt::one());
                continue;
            }
            if p.is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            break;
        }
    }
    SmithDecomposition { u, d, v, v_inv }
}

/// Rank of the subgroup of `Z^r` spanned by the rows.
pub fn rab(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

pub fn is_primitive(v: &[BigInt]) -> Result<bool, LatticeError> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(g.is_one())
}

/// True iff the row span is a direct summand of `Z^r`.
pub fn is_direct_factor(a: &IntMatrix) -> bool {
    smith_normal_form(a).invariant_factors().iter().all(|x| x.is_one())
}

/// A unimodular `r x r` matrix whose first row is `v`.
pub fn unimodular_complete(v: &[BigInt]) -> Result<IntMatrix, LatticeError> {
    if !is_primitive(v)? {
        let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        return Err(LatticeError::NotPrimitive(g));
    }
    // u * v * V = e_1 with u = +-1, so v = u * (first row of V^-1).
    let snf = smith_normal_form(&IntMatrix::from_rows(vec![v.to_vec()]));
    let mut out = snf.v_inv.clone();
    if snf.u[(0, 0)].is_negative() {
        out.negate_row(0);
    }
    debug_assert_eq!(out.row(0), v);
    Ok(out)
}

/// Extended gcd over a vector: returns `(g, m)` with `<m, v> = g >= 0`.
pub fn bezout_vector(v: &[BigInt]) -> (BigInt, IntVector) {
    let mut g = BigInt::zero();
    let mut m: IntVector = vec![BigInt::zero(); v.len()];
    for (i, x) in v.iter().enumerate() {
        let e = g.extended_gcd(x);
        for c in m.iter_mut().take(i) {
            *c *= &e.x;
        }
        m[i] = e.y.clone();
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        for c in &mut m {
            *c = -&*c;
        }
    }
    reduce_against_kernel(&mut m, v);
    (g, m)
}

/// Shrinks `m` by adding multiples of the pairwise kernel vectors
/// `(v_j e_i - v_i e_j) / gcd(v_i, v_j)`, which leaves `<m, v>` unchanged.
fn reduce_against_kernel(m: &mut [BigInt], v: &[BigInt]) {
    let norm = |m: &[BigInt]| m.iter().map(|x| x * x).sum::<BigInt>();
    loop {
        let mut improved = false;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i == j || v[i].is_zero() || v[j].is_zero() {
                    continue;
                }
                let g = v[i].gcd(&v[j]);
                let (ki, kj) = (&v[j] / &g, -(&v[i] / &g));
                let kk = &ki * &ki + &kj * &kj;
                let dot = &m[i] * &ki + &m[j] * &kj;
                // Nearest integer to dot / kk.
                let t: BigInt = (&dot * BigInt::from(2) + &kk).div_floor(&(&kk * BigInt::from(2)));
                if t.is_zero() {
                    continue;
                }
                let before = norm(m);
                let (mi, mj) = (&m[i] - &t * &ki, &m[j] - &t * &kj);
                let (oi, oj) = (std::mem::replace(&mut m[i], mi), std::mem::replace(&mut m[j], mj));
                if norm(m) < before {
                    improved = true;
                } else {
                    m[i] = oi;
                    m[j] = oj;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_decomposition(a: &IntMatrix, s: &SmithDecomposition) {
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(a.ncols()));
        for i in 0..s.d.nrows() {
            for j in 0..s.d.ncols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let diag = s.diagonal();
        assert!(diag.iter().all(|x| !x.is_negative()));
        let nonzero = s.invariant_factors();
        assert_eq!(&diag[..nonzero.len()], &nonzero[..], "zeros trail");
        for w in nonzero.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
    }

    /// Invariant factors of a 2x2 matrix from its gcd and determinant.
    fn oracle_2x2(a: &[[i64; 2]; 2]) -> (i64, i64) {
        use num_integer::gcd;
        let g = a.iter().flatten().fold(0i64, |acc, &x| gcd(acc, x));
        let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
        if g == 0 {
            (0, 0)
        } else {
            (g, det / g)
        }
    }

    #[test]
    fn snf_examples() {
        let id = IntMatrix::from_i64(&[&[1, 0], &[0, 1]]);
        let s = smith_normal_form(&id);
        check_decomposition(&id, &s);
        assert_eq!(s.diagonal(), bi(&[1, 1]));

        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&a);
        check_decomposition(&a, &s);
        assert_eq!(oracle_2x2(&[[2, 0], [0, 3]]), (1, 6));
        assert_eq!(s.diagonal(), bi(&[1, 6]));

        let a = IntMatrix::from_i64(&[&[2, 4]]);
        let s = smith_normal_form(&a);
        check_decomposition(&a, &s);
        assert_eq!(s.d.row(0), &bi(&[2, 0])[..]);
    }

    #[test]
    fn rab_examples() {
        assert_eq!(rab(&IntMatrix::from_i64(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rab(&IntMatrix::from_i64(&[&[2, 4], &[1, 2]])), 1);
        assert_eq!(rab(&IntMatrix::from_i64(&[&[0, 0]])), 0);
    }

    #[test]
    fn primitivity_and_direct_factors() {
        assert!(is_primitive(&bi(&[2, 3])).unwrap());
        assert!(!is_primitive(&bi(&[2, 4])).unwrap());
        assert!(is_primitive(&bi(&[1, 0, 0, 0])).unwrap());
        assert_eq!(is_primitive(&bi(&[0, 0])), Err(LatticeError::ZeroVector));

        assert!(is_direct_factor(&IntMatrix::from_i64(&[&[1, 0]])));
        assert!(!is_direct_factor(&IntMatrix::from_i64(&[&[2, 0]])));
        assert!(!is_direct_factor(&IntMatrix::from_i64(&[&[1, 1], &[0, 2]])));
        assert!(is_direct_factor(&IntMatrix::from_i64(&[&[0, 0]])));
    }

    #[test]
    fn completion_examples() {
        assert_eq!(
            unimodular_complete(&bi(&[1, 0])).unwrap(),
            IntMatrix::from_i64(&[&[1, 0], &[0, 1]])
        );
        let m = unimodular_complete(&bi(&[2, 3])).unwrap();
        assert_eq!(m.row(0), &bi(&[2, 3])[..]);
        assert!(m.determinant().abs().is_one());
        let m = unimodular_complete(&bi(&[0, 1, 0])).unwrap();
        assert_eq!(m.row(0), &bi(&[0, 1, 0])[..]);
        assert!(m.determinant().abs().is_one());
        assert!(m.to_rows().iter().flatten().all(|x| x.is_zero() || x.abs().is_one()));
        assert!(matches!(unimodular_complete(&bi(&[2, 4])), Err(LatticeError::NotPrimitive(_))));
    }

    #[test]
    fn serialization_round_trip() {
        let a = IntMatrix::from_i64(&[&[1, -2, 3], &[0, 4, 5]]);
        assert_eq!(a.to_string(), "1,-2,3\n0,4,5\n");
        assert_eq!(IntMatrix::parse(&a.to_string()).unwrap(), a);
        assert!(matches!(IntMatrix::parse("1,2\n3"), Err(LatticeError::Parse { line: 2, .. })));
    }

    #[test]
    fn bezout_examples() {
        let (g, m) = bezout_vector(&bi(&[6, 10, 15]));
        assert!(g.is_one());
        let dot: BigInt = m.iter().zip(bi(&[6, 10, 15])).map(|(a, b)| a * b).sum();
        assert!(dot.is_one());
        assert!(m.iter().all(|c| c.abs() <= BigInt::one()));
        assert_eq!(bezout_vector(&bi(&[1, 0])).1, bi(&[1, 0]));
    }

    fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(m, n)| {
            prop::collection::vec(-6i64..7, m * n).prop_map(move |v| {
                IntMatrix::from_rows(v.chunks(n).map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn snf_invariants(a in arb_matrix()) {
            let s = smith_normal_form(&a);
            check_decomposition(&a, &s);
            prop_assert!(s.rank() <= a.nrows().min(a.ncols()));
            prop_assert_eq!(smith_normal_form(&a), s, "deterministic");
        }

        #[test]
        fn snf_2x2_matches_gcd_det_oracle(e in prop::array::uniform4(-9i64..10)) {
            let arr = [[e[0], e[1]], [e[2], e[3]]];
            let s = smith_normal_form(&IntMatrix::from_i64(&[&arr[0], &arr[1]]));
            let (d1, d2) = oracle_2x2(&arr);
            prop_assert_eq!(s.diagonal(), bi(&[d1, d2]));
        }

        #[test]
        fn rab_invariant_under_unimodular_rows(a in arb_matrix(), seed in any::<u64>()) {
            let m = a.nrows();
            let mut u = IntMatrix::identity(m);
            let mut x = seed;
            for _ in 0..4 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let (i, j) = ((x >> 33) as usize % m, (x >> 13) as usize % m);
                if i != j {
                    u.add_row(i, j, &BigInt::from(((x >> 7) % 5) as i64 - 2));
                }
            }
            prop_assert_eq!(rab(&u.mul(&a)), rab(&a));
        }

        #[test]
        fn primitive_iff_single_row_direct_factor(v in prop::collection::vec(-8i64..9, 1..5)) {
            let v = bi(&v);
            prop_assume!(v.iter().any(|x| !x.is_zero()));
            let single = IntMatrix::from_rows(vec![v.clone()]);
            prop_assert_eq!(is_primitive(&v).unwrap(), is_direct_factor(&single));
            if is_primitive(&v).unwrap() {
                let c = unimodular_complete(&v).unwrap();
                prop_assert_eq!(c.row(0), &v[..]);
                prop_assert!(c.determinant().abs().is_one());
            }
        }
    }
}
