use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("ragged integer matrix"));
        }
        Ok(IntegerMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
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
        Ok(out)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
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

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * f;
            self[(dst, j)] += v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * f;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant of a square integer matrix (fraction-free Bareiss elimination).
pub fn determinant(a: &IntegerMatrix) -> Result<BigInt> {
    if a.rows != a.cols {
        return Err(Error::dim("determinant of a non-square matrix"));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                m[(i, j)] = v;
            }
        }
        prev = m[(k, k)].clone();
    }
    Ok(sign * &m[(n - 1, n - 1)])
}

/// `U·A·V = S` with `U`, `V` unimodular and `S` diagonal, `s_i | s_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub s: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            // Smallest nonzero entry of the trailing block goes to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !s[(i, j)].is_zero()
                        && best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, s, v, a);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -s[(i, t)].div_floor(&s[(t, t)]);
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= s[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -s[(t, j)].div_floor(&s[(t, t)]);
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                clean &= s[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // Divisibility: pull in any row whose entry the pivot does not divide.
            let offending = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !s[(i, j)].is_multiple_of(&s[(t, t)])));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, s, v, a)
}

fn finish(u: IntegerMatrix, s: IntegerMatrix, v: IntegerMatrix, a: &IntegerMatrix) -> SmithForm {
    let check = u.mul(a).and_then(|ua| ua.mul(&v)).expect("conforming");
    assert_eq!(check, s, "Smith form failed re-multiplication");
    debug_assert!(s.is_diagonal());
    SmithForm { u, s, v }
}

/// Row-style Hermite normal form `H = U·A` (upper echelon, positive pivots,
/// entries above each pivot reduced into `[0, pivot)`).
pub fn hermite_normal_form(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let (m, n) = (a.rows, a.cols);
    let mut h = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let pivot = (r..m)
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&x, &y| h[(x, c)].abs().cmp(&h[(y, c)].abs()));
            let Some(p) = pivot else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = -h[(i, c)].div_floor(&h[(r, c)]);
                h.add_row(i, r, &q);
                u.add_row(i, r, &q);
                done &= h[(i, c)].is_zero();
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                h.add_row(i, r, &q);
                u.add_row(i, r, &q);
            }
        }
        r += 1;
    }
    (u, h)
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitivize(v: &[i64]) -> Result<Vec<i64>> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return Err(Error::domain("cannot primitivize the zero vector"));
    }
    Ok(v.iter().map(|&x| x / g).collect())
}

/// The primitive integer vector on the ray spanned by a nonzero rational vector.
pub fn primitive_integer_direction(v: &[Rational]) -> Result<Vec<i64>> {
    let l = super::lcm_of_denominators(v);
    let scaled: Vec<BigInt> = v.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let g = scaled.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::domain("cannot primitivize the zero vector"));
    }
    scaled
        .iter()
        .map(|x| {
            (x / &g)
                .to_i64()
                .ok_or_else(|| Error::domain("primitive vector exceeds 64-bit range"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn assert_unimodular(m: &IntegerMatrix) {
        assert_eq!(determinant(m).unwrap().abs(), BigInt::one());
    }

    fn diag(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn primitivize_examples() {
        assert_eq!(primitivize(&[2, 4, 6]).unwrap(), vec![1, 2, 3]);
        assert_eq!(primitivize(&[5, 0, 2]).unwrap(), vec![5, 0, 2]);
        assert_eq!(primitivize(&[-4, -6]).unwrap(), vec![-2, -3]);
        assert!(matches!(primitivize(&[0, 0]), Err(Error::Domain(_))));
    }

    #[test]
    fn snf_examples() {
        let f = smith_normal_form(&im(&[&[1, 0], &[0, 1]]));
        assert_eq!(f.diagonal(), diag(&[1, 1]));
        let f = smith_normal_form(&im(&[&[2, 0], &[0, 4]]));
        assert_eq!(f.diagonal(), diag(&[2, 4]));
        // gcd of entries is 1, |det| = 6.
        let f = smith_normal_form(&im(&[&[0, 3], &[2, 0]]));
        assert_eq!(f.diagonal(), diag(&[1, 6]));
        assert_unimodular(&f.u);
        assert_unimodular(&f.v);
    }

    #[test]
    fn snf_rectangular() {
        let a = im(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let f = smith_normal_form(&a);
        assert_eq!(f.diagonal(), diag(&[2, 6, 12]));
        let b = im(&[&[1, 2], &[3, 4], &[5, 6]]);
        let f = smith_normal_form(&b);
        assert_eq!(f.diagonal(), diag(&[1, 2]));
    }

    #[test]
    fn hnf_is_upper_triangular() {
        let a = im(&[&[2, 3, 6], &[4, 1, 3], &[1, 1, 1]]);
        let (u, h) = hermite_normal_form(&a);
        assert_eq!(u.mul(&a).unwrap(), h);
        assert_unimodular(&u);
        for i in 0..3 {
            for j in 0..i {
                assert!(h[(i, j)].is_zero());
            }
            assert!(h[(i, i)].is_positive());
        }
        assert_eq!(
            determinant(&h).unwrap().abs(),
            determinant(&a).unwrap().abs()
        );
    }

    #[test]
    fn bareiss_determinant() {
        assert_eq!(
            determinant(&im(&[&[2, -1, 0], &[2, 0, 1], &[1, 1, 1]])).unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            determinant(&im(&[&[0, 1], &[1, 0]])).unwrap(),
            BigInt::from(-1)
        );
    }

    proptest::proptest! {
        #[test]
        fn snf_properties(entries in proptest::collection::vec(-9i64..10, 9)) {
            let a = im(&[&entries[0..3], &entries[3..6], &entries[6..9]]);
            let f = smith_normal_form(&a);
            let d = f.diagonal();
            for w in d.windows(2) {
                proptest::prop_assert!(w[0].is_zero() && w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
            }
            proptest::prop_assert_eq!(determinant(&f.u).unwrap().abs(), BigInt::one());
            proptest::prop_assert_eq!(determinant(&f.v).unwrap().abs(), BigInt::one());
            let prod: BigInt = d.iter().product();
            proptest::prop_assert_eq!(prod.abs(), determinant(&a).unwrap().abs());
        }
    }
}
