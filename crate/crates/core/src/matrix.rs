//! Dense integer matrices and the Smith normal form.
//!
//! Everything here is exact: entries are arbitrary-precision integers and
//! the Smith reduction tracks the unimodular transforms (and their inverses)
//! so that cokernels come with explicit projection and section maps.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A dense `rows x cols` matrix with `BigInt` entries, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows of machine integers (test convenience).
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> IntMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * &other[(k, j)];
                    out[(i, j)] += term;
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hconcat");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            let tmp = a[(k, j)].clone();
                            a[(k, j)] = a[(i, j)].clone();
                            a[(i, j)] = tmp;
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = { let (q, r) = num.div_rem(&prev); debug_assert!(r.is_zero(), "Bareiss division is exact"); q };
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
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

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Smith normal form `U * M * V = D` with `U`, `V` unimodular and
/// `D` diagonal, nonnegative, with `d_1 | d_2 | ...`.
///
/// The inverses are carried along so that callers can lift cokernel
/// generators back to the ambient basis without re-inverting.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

struct SnfState {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.a.cols {
            self.a.data.swap(i * self.a.cols + c, j * self.a.cols + c);
        }
        for c in 0..self.u.cols {
            self.u.data.swap(i * self.u.cols + c, j * self.u.cols + c);
        }
        // u_inv picks up the inverse swap on columns
        for r in 0..self.u_inv.rows {
            self.u_inv.data.swap(r * self.u_inv.cols + i, r * self.u_inv.cols + j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.a.rows {
            self.a.data.swap(r * self.a.cols + i, r * self.a.cols + j);
        }
        for r in 0..self.v.rows {
            self.v.data.swap(r * self.v.cols + i, r * self.v.cols + j);
        }
        for c in 0..self.v_inv.cols {
            self.v_inv.data.swap(i * self.v_inv.cols + c, j * self.v_inv.cols + c);
        }
    }

    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.a.cols {
            let t = q * &self.a[(j, c)];
            self.a[(i, c)] += t;
        }
        for c in 0..self.u.cols {
            let t = q * &self.u[(j, c)];
            self.u[(i, c)] += t;
        }
        // inverse op on u_inv columns: col_j -= q * col_i
        for r in 0..self.u_inv.rows {
            let t = q * &self.u_inv[(r, i)];
            self.u_inv[(r, j)] -= t;
        }
    }

    /// col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.a.rows {
            let t = q * &self.a[(r, j)];
            self.a[(r, i)] += t;
        }
        for r in 0..self.v.rows {
            let t = q * &self.v[(r, j)];
            self.v[(r, i)] += t;
        }
        for c in 0..self.v_inv.cols {
            let t = q * &self.v_inv[(i, c)];
            self.v_inv[(j, c)] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.a.cols {
            let t = -self.a[(i, c)].clone();
            self.a[(i, c)] = t;
        }
        for c in 0..self.u.cols {
            let t = -self.u[(i, c)].clone();
            self.u[(i, c)] = t;
        }
        for r in 0..self.u_inv.rows {
            let t = -self.u_inv[(r, i)].clone();
            self.u_inv[(r, i)] = t;
        }
    }
}

/// Pivot rule: smallest nonzero absolute value in the trailing submatrix,
/// ties broken by lowest (row, col). This makes the transforms reproducible
/// across runs.
fn find_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_abs = BigInt::zero();
    for i in t..a.rows {
        for j in t..a.cols {
            let e = &a[(i, j)];
            if e.is_zero() {
                continue;
            }
            let abs = e.abs();
            if best.is_none() || abs < best_abs {
                best = Some((i, j));
                best_abs = abs;
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let rows = m.rows;
    let cols = m.cols;
    let mut st = SnfState {
        a: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let limit = rows.min(cols);
    let mut t = 0;
    while t < limit {
        let Some((pi, pj)) = find_pivot(&st.a, t) else {
            break;
        };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);

        // Clear row and column t; remainders can reappear, so loop.
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !st.a[(i, t)].is_zero() {
                    let q = -st.a[(i, t)].div_floor(&st.a[(t, t)]);
                    st.add_row(i, t, &q);
                    if !st.a[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !st.a[(t, j)].is_zero() {
                    let q = -st.a[(t, j)].div_floor(&st.a[(t, t)]);
                    st.add_col(j, t, &q);
                    if !st.a[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // A nonzero remainder is strictly smaller than the pivot;
                // promote the smallest entry and go again.
                let (pi, pj) = find_pivot(&st.a, t).expect("remainder left a nonzero entry");
                st.swap_rows(t, pi);
                st.swap_cols(t, pj);
                continue;
            }
            // Pivot must divide the rest of the submatrix before moving on.
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !st.a[(i, j)].is_multiple_of(&st.a[(t, t)]) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    st.add_row(t, i, &BigInt::one());
                    continue;
                }
                None => break,
            }
        }
        t += 1;
    }
    let rank = t;
    for i in 0..rank {
        if st.a[(i, i)].is_negative() {
            st.negate_row(i);
        }
    }
    SmithForm {
        u: st.u,
        u_inv: st.u_inv,
        d: st.a,
        v: st.v,
        v_inv: st.v_inv,
        rank,
    }
}

impl SmithForm {
    /// Diagonal entries, including trailing zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// A basis (as columns) of the integer kernel `{ x : M x = 0 }`.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    (snf.rank..m.cols()).map(|j| snf.v.column(j)).collect()
}

/// Solves `M x = b` over the integers, if possible.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(m.rows(), b.len());
    let snf = smith_normal_form(m);
    let ub = snf.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); m.cols()];
    for (i, ub_i) in ub.iter().enumerate() {
        if i < snf.rank {
            let d = &snf.d[(i, i)];
            if !ub_i.is_multiple_of(d) {
                return None;
            }
            y[i] = ub_i / d;
        } else if !ub_i.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}
