//! Direct solver for banded systems with a dense border.
//!
//! The finite element systems couple each node only to its neighbours, so with
//! the unknowns interleaved node by node the matrix is banded. Periodic curves
//! add coupling between the first and last node; those unknowns are moved to a
//! small dense border and removed by block elimination (a Schur complement on
//! top of a banded LU factorisation with partial pivoting).

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BorderedBandMatrix {
    n: usize,
    n_band: usize,
    kl: usize,
    ku: usize,
    /// Row `i` holds columns `i - kl ..= i + ku`.
    band: Vec<f64>,
    /// Rows `0..n_band`, border columns; row-major `n_band x nb`.
    border_cols: Vec<f64>,
    /// Border rows over all columns; row-major `nb x n`.
    border_rows: Vec<f64>,
    rhs: Vec<f64>,
}

/// Solution vector with its relative residual `|Ax - b|_inf / max(1, |b|_inf)`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<f64>,
    pub residual: f64,
}

impl BorderedBandMatrix {
    /// `n` unknowns, the last `border` of which are stored densely.
    pub fn new(n: usize, kl: usize, ku: usize, border: usize) -> Self {
        assert!(n >= 1, "empty system");
        assert!(border <= n, "border larger than system");
        let n_band = n - border;
        Self {
            n,
            n_band,
            kl,
            ku,
            band: vec![0.0; n_band * (kl + ku + 1)],
            border_cols: vec![0.0; n_band * border],
            border_rows: vec![0.0; border * n],
            rhs: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn nb(&self) -> usize {
        self.n - self.n_band
    }

    /// Adds `v` to entry `(i, j)`.
    ///
    /// # Panics
    /// If the entry lies in the leading block but outside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let nb = self.nb();
        if i < self.n_band {
            if j < self.n_band {
                assert!(
                    j + self.kl >= i && j <= i + self.ku,
                    "entry ({i}, {j}) outside band (kl = {}, ku = {})",
                    self.kl,
                    self.ku
                );
                let w = self.kl + self.ku + 1;
                self.band[i * w + j + self.kl - i] += v;
            } else {
                self.border_cols[i * nb + j - self.n_band] += v;
            }
        } else {
            self.border_rows[(i - self.n_band) * self.n + j] += v;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let nb = self.nb();
        if i < self.n_band {
            if j < self.n_band {
                if j + self.kl >= i && j <= i + self.ku {
                    self.band[i * (self.kl + self.ku + 1) + j + self.kl - i]
                } else {
                    0.0
                }
            } else {
                self.border_cols[i * nb + j - self.n_band]
            }
        } else {
            self.border_rows[(i - self.n_band) * self.n + j]
        }
    }

    /// Replaces row `i` by the identity row and clears column `i`, fixing unknown
    /// `i` to `value`. The cleared column entries are moved to the right-hand side.
    pub fn fix_unknown(&mut self, i: usize, value: f64) {
        for row in 0..self.n {
            if row == i {
                continue;
            }
            let a = self.get(row, i);
            if a != 0.0 {
                self.rhs[row] -= a * value;
                self.add(row, i, -a);
            }
        }
        for col in 0..self.n {
            let a = self.get(i, col);
            if a != 0.0 {
                self.add(i, col, -a);
            }
        }
        self.add(i, i, 1.0);
        self.rhs[i] = value;
    }

    pub fn add_rhs(&mut self, i: usize, v: f64) {
        self.rhs[i] += v;
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                d[i * self.n + j] = self.get(i, j);
            }
        }
        d
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        let nb = self.nb();
        let w = self.kl + self.ku + 1;
        for i in 0..self.n_band {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n_band - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.band[i * w + j + self.kl - i] * x[j];
            }
            for k in 0..nb {
                acc += self.border_cols[i * nb + k] * x[self.n_band + k];
            }
            y[i] = acc;
        }
        for k in 0..nb {
            let row = &self.border_rows[k * self.n..(k + 1) * self.n];
            y[self.n_band + k] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let ax = self.mul_vec(x);
        let r = ax
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let bnorm = self.rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
        r / bnorm.max(1.0)
    }

    /// Solves `A x = rhs`.
    pub fn solve(&self) -> Result<Solution> {
        let nb = self.nb();
        let n1 = self.n_band;
        let amax = self
            .band
            .iter()
            .chain(&self.border_cols)
            .chain(&self.border_rows)
            .map(|a| a.abs())
            .fold(0.0, f64::max);
        let tol = self.n as f64 * f64::EPSILON * amax;

        let x = if n1 == 0 {
            let mut a = self.border_rows.clone();
            let mut b = self.rhs.clone();
            dense_solve(&mut a, nb, &mut b, tol, 0)?;
            b
        } else {
            let lu = BandLu::factor(n1, self.kl, self.ku, &self.band, tol)?;
            // z = A11^{-1} b1, Y = A11^{-1} A12
            let mut z = self.rhs[..n1].to_vec();
            lu.solve_in_place(&mut z);
            let mut y_cols: Vec<Vec<f64>> = (0..nb)
                .map(|k| (0..n1).map(|i| self.border_cols[i * nb + k]).collect())
                .collect();
            for col in &mut y_cols {
                lu.solve_in_place(col);
            }
            // Schur complement S = A22 - A21 Y, g = b2 - A21 z
            let mut s = vec![0.0; nb * nb];
            let mut g = vec![0.0; nb];
            for r in 0..nb {
                let row = &self.border_rows[r * self.n..(r + 1) * self.n];
                let a21 = &row[..n1];
                g[r] = self.rhs[n1 + r] - dot(a21, &z);
                for c in 0..nb {
                    s[r * nb + c] = row[n1 + c] - dot(a21, &y_cols[c]);
                }
            }
            dense_solve(&mut s, nb, &mut g, tol, n1)?;
            let mut x = z;
            for (k, col) in y_cols.iter().enumerate() {
                for i in 0..n1 {
                    x[i] -= col[i] * g[k];
                }
            }
            x.extend_from_slice(&g);
            x
        };
        let residual = self.relative_residual(&x);
        Ok(Solution { x, residual })
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Banded LU with partial pivoting. Row `i` stores columns `i - kl ..= i + kl + ku`
/// to leave room for the fill-in caused by row interchanges.
struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    w: usize,
    data: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn factor(n: usize, kl: usize, ku: usize, band: &[f64], tol: f64) -> Result<Self> {
        let w = 2 * kl + ku + 1;
        let src_w = kl + ku + 1;
        let mut data = vec![0.0; n * w];
        for i in 0..n {
            data[i * w..i * w + src_w].copy_from_slice(&band[i * src_w..(i + 1) * src_w]);
        }
        let mut lu = Self {
            n,
            kl,
            ku,
            w,
            data,
            piv: vec![0; n],
        };
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.at(k, k).abs();
            for i in k + 1..=last_row {
                let v = lu.at(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tol) {
                return Err(Error::Singular { row: k, pivot: best });
            }
            lu.piv[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for c in k..=last_col {
                    let a = lu.at(k, c);
                    let b = lu.at(p, c);
                    *lu.at_mut(k, c) = b;
                    *lu.at_mut(p, c) = a;
                }
            }
            let pivot = lu.at(k, k);
            for i in k + 1..=last_row {
                let l = lu.at(i, k) / pivot;
                *lu.at_mut(i, k) = l;
                if l != 0.0 {
                    for c in k + 1..=last_col {
                        let u = lu.at(k, c);
                        *lu.at_mut(i, c) -= l * u;
                    }
                }
            }
        }
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, c: usize) -> f64 {
        self.data[i * self.w + c + self.kl - i]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, c: usize) -> &mut f64 {
        &mut self.data[i * self.w + c + self.kl - i]
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + self.kl).min(n - 1) {
                    b[i] -= self.at(i, k) * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for c in k + 1..=(k + self.kl + self.ku).min(n - 1) {
                acc -= self.at(k, c) * b[c];
            }
            b[k] = acc / self.at(k, k);
        }
    }
}

/// Gaussian elimination with partial pivoting on a small row-major block.
fn dense_solve(a: &mut [f64], n: usize, b: &mut [f64], tol: f64, row_offset: usize) -> Result<()> {
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if !(best > tol) {
            return Err(Error::Singular {
                row: row_offset + k,
                pivot: best.max(0.0),
            });
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            b.swap(k, p);
        }
        for i in k + 1..n {
            let l = a[i * n + k] / a[k * n + k];
            for c in k..n {
                a[i * n + c] -= l * a[k * n + c];
            }
            b[i] -= l * b[k];
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= a[k * n + c] * b[c];
        }
        b[k] = acc / a[k * n + k];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    fn dense_oracle(m: &BorderedBandMatrix) -> Vec<f64> {
        let n = m.dim();
        let a = DMatrix::from_row_slice(n, n, &m.to_dense());
        let b = DVector::from_column_slice(m.rhs());
        a.lu().solve(&b).expect("oracle singular").iter().cloned().collect()
    }

    #[test]
    fn identity_system() {
        let mut m = BorderedBandMatrix::new(6, 1, 1, 0);
        for i in 0..6 {
            m.add(i, i, 1.0);
            m.add_rhs(i, i as f64 - 2.5);
        }
        let s = m.solve().unwrap();
        assert_eq!(s.x, vec![-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]);
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn poisson_tridiagonal_closed_form() {
        let n = 5;
        let mut m = BorderedBandMatrix::new(n, 1, 1, 0);
        for i in 0..n {
            m.add(i, i, 2.0);
            if i > 0 {
                m.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                m.add(i, i + 1, -1.0);
            }
            m.add_rhs(i, 1.0);
        }
        let s = m.solve().unwrap();
        for (i, x) in s.x.iter().enumerate() {
            let k = (i + 1) as f64;
            assert!((x - k * (n as f64 + 1.0 - k) / 2.0).abs() < 1e-14);
        }
        assert!(s.residual <= 1e-14);
    }

    #[test]
    fn cyclic_border_matches_dense() {
        // periodic second difference plus a shift, border = last 2 unknowns
        let n = 12;
        let mut m = BorderedBandMatrix::new(n, 2, 2, 2);
        for i in 0..n {
            m.add(i, i, 3.0);
            m.add(i, (i + 1) % n, -1.0);
            m.add(i, (i + n - 1) % n, -1.0);
            m.add_rhs(i, (i as f64).sin());
        }
        let s = m.solve().unwrap();
        let oracle = dense_oracle(&m);
        for (a, b) in s.x.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn zero_pivot_is_reported() {
        let mut m = BorderedBandMatrix::new(4, 1, 1, 0);
        m.add(0, 0, 1.0);
        m.add(1, 1, 1.0);
        m.add(2, 3, 1.0);
        m.add(3, 2, 0.0);
        assert!(matches!(m.solve(), Err(Error::Singular { .. })));
    }

    #[test]
    fn fixed_unknown_is_exact() {
        let mut m = BorderedBandMatrix::new(4, 1, 1, 0);
        for i in 0..4 {
            m.add(i, i, 4.0);
            if i > 0 {
                m.add(i, i - 1, 1.0);
            }
            if i < 3 {
                m.add(i, i + 1, 1.0);
            }
            m.add_rhs(i, 1.0);
        }
        m.fix_unknown(0, 0.0);
        let s = m.solve().unwrap();
        assert_eq!(s.x[0], 0.0);
        assert!(s.residual < 1e-15);
    }

    #[test]
    #[should_panic(expected = "outside band")]
    fn out_of_band_entry_panics() {
        let mut m = BorderedBandMatrix::new(8, 1, 1, 0);
        m.add(0, 5, 1.0);
    }

    fn random_banded(n: usize, kl: usize, ku: usize, border: usize, seed: u64) -> BorderedBandMatrix {
        // Deterministic LCG; entries in [-1, 1] plus a dominant diagonal.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = BorderedBandMatrix::new(n, kl, ku, border);
        let n1 = n - border;
        for i in 0..n {
            for j in 0..n {
                let in_band = j + kl >= i && j <= i + ku;
                let corner = (i >= n1 && j < 2) || (j >= n1 && i < 2);
                if in_band || corner || (i >= n1 && j >= n1) {
                    m.add(i, j, next());
                }
            }
            m.add(i, i, 8.0 + (kl + ku) as f64);
            m.add_rhs(i, next());
        }
        m
    }

    #[test]
    fn large_random_band_system() {
        let m = random_banded(300, 4, 5, 0, 7);
        let s = m.solve().unwrap();
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn reversed_ordering_gives_same_solution() {
        let m = random_banded(40, 2, 3, 0, 11);
        let n = 40;
        let mut r = BorderedBandMatrix::new(n, 3, 2, 0);
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                if v != 0.0 {
                    r.add(n - 1 - i, n - 1 - j, v);
                }
            }
            r.add_rhs(n - 1 - i, m.rhs()[i]);
        }
        let a = m.solve().unwrap().x;
        let b = r.solve().unwrap().x;
        for i in 0..n {
            assert!((a[i] - b[n - 1 - i]).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn matches_dense_oracle(n in 4usize..60, kl in 0usize..4, ku in 0usize..4, border in 0usize..4, seed in any::<u64>()) {
            prop_assume!(border < n);
            let m = random_banded(n, kl, ku, border, seed);
            let s = m.solve().unwrap();
            let oracle = dense_oracle(&m);
            let scale = oracle.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for (a, b) in s.x.iter().zip(&oracle) {
                prop_assert!((a - b).abs() <= 1e-10 * scale);
            }
            prop_assert!(s.residual <= 1e-12);
        }
    }
}
