//! Dense real matrices and an eigenvalues-only real Schur solver:
//! Householder reduction to Hessenberg form followed by the Francis
//! double-shift QR iteration with deflation, patterned on the classic
//! EISPACK `hqr` routine.
//!
//! Whether an eigenvalue is real is decided by the block structure that
//! deflation produces (1x1 block, or 2x2 block with non-negative
//! discriminant), never by thresholding imaginary parts afterwards.

use crate::error::{Error, Result};

/// Dense row-major matrix of f64.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let lhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(lhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// max |A - I| entrywise; orthogonality residual helper.
    pub fn max_abs_minus_identity(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self[(i, j)] - want).abs());
            }
        }
        worst
    }

    /// Determinant by LU with partial pivoting (test/diagnostic helper).
    pub fn det_lu(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }

    /// Largest singular value by power iteration on A^T A.
    pub fn spectral_norm(&self) -> f64 {
        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut s = 0.0;
        for _ in 0..200 {
            // w = A^T (A v)
            let mut av = vec![0.0; self.rows];
            for i in 0..self.rows {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                av[i] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            }
            let mut w = vec![0.0; self.cols];
            for i in 0..self.rows {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                for (wj, &a) in w.iter_mut().zip(row) {
                    *wj += a * av[i];
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let new_s = norm.sqrt();
            for (vj, wj) in v.iter_mut().zip(&w) {
                *vj = wj / norm;
            }
            if (new_s - s).abs() <= 1e-13 * new_s {
                return new_s;
            }
            s = new_s;
        }
        s
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues of a real square matrix, grouped by the Schur block structure.
#[derive(Clone, Debug, Default)]
pub struct Spectrum {
    pub reals: Vec<f64>,
    /// Upper-half-plane representatives (re, im) with im > 0.
    pub complex_pairs: Vec<(f64, f64)>,
}

/// Reduce to upper Hessenberg form in place by Householder reflections.
fn hessenberg(h: &mut Mat) {
    let n = h.n_rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            v[i] = h[(i, k)];
            norm2 += v[i] * v[i];
        }
        let alpha = norm2.sqrt();
        if alpha == 0.0 {
            continue;
        }
        let a0 = v[k + 1];
        let sign = if a0 >= 0.0 { 1.0 } else { -1.0 };
        v[k + 1] += sign * alpha;
        let beta = 1.0 / (sign * alpha * v[k + 1]);
        // A <- (I - beta v v^T) A, rows k+1..n
        for j in k..n {
            let mut dot = 0.0;
            for i in k + 1..n {
                dot += v[i] * h[(i, j)];
            }
            let f = beta * dot;
            for i in k + 1..n {
                h[(i, j)] -= f * v[i];
            }
        }
        // A <- A (I - beta v v^T), columns k+1..n
        for i in 0..n {
            let mut dot = 0.0;
            for j in k + 1..n {
                dot += h[(i, j)] * v[j];
            }
            let f = beta * dot;
            for j in k + 1..n {
                h[(i, j)] -= f * v[j];
            }
        }
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
}

const MAX_ITERS_PER_BLOCK: usize = 50;

/// Eigenvalues of a real matrix via Hessenberg reduction and Francis
/// double-shift QR with deflation.
pub fn real_schur_spectrum(a: &Mat) -> Result<Spectrum> {
    assert_eq!(a.n_rows(), a.n_cols(), "square matrix required");
    if a.data().iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("matrix entries must be finite".into()));
    }
    let n = a.n_rows();
    let mut spectrum = Spectrum::default();
    if n == 0 {
        return Ok(spectrum);
    }
    let mut h = a.clone();
    hessenberg(&mut h);

    let eps = f64::EPSILON;
    let anorm: f64 = {
        let mut s = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                s += h[(i, j)].abs();
            }
        }
        s
    };

    let mut exshift = 0.0;
    let mut hi = n as isize - 1; // active block end (0-indexed)
    let mut iters = 0usize;
    let (mut p, mut q, mut r);
    while hi >= 0 {
        let nn = hi as usize;
        // find the largest lo such that the subdiagonal entry below it is
        // negligible; deflation test per scale of the neighbouring diagonal
        let mut lo = nn;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].abs() + h[(lo, lo)].abs();
            if s == 0.0 {
                s = anorm;
            }
            if h[(lo, lo - 1)].abs() <= eps * s {
                h[(lo, lo - 1)] = 0.0;
                break;
            }
            lo -= 1;
        }

        let x = h[(nn, nn)];
        if lo == nn {
            // 1x1 block: one real eigenvalue
            spectrum.reals.push(x + exshift);
            hi -= 1;
            iters = 0;
            continue;
        }
        let y = h[(nn - 1, nn - 1)];
        let w = h[(nn, nn - 1)] * h[(nn - 1, nn)];
        if lo == nn - 1 {
            // 2x2 block: the discriminant decides real pair vs conjugate pair
            let pp = 0.5 * (y - x);
            let qq = pp * pp + w;
            let zz = qq.abs().sqrt();
            let xx = x + exshift;
            if qq >= 0.0 {
                let zz = pp + if pp >= 0.0 { zz } else { -zz };
                spectrum.reals.push(xx + zz);
                if zz != 0.0 {
                    spectrum.reals.push(xx - w / zz);
                } else {
                    spectrum.reals.push(xx);
                }
            } else {
                spectrum.complex_pairs.push((xx + pp, zz));
            }
            hi -= 2;
            iters = 0;
            continue;
        }

        if iters >= MAX_ITERS_PER_BLOCK {
            return Err(Error::NonConvergence);
        }
        let (mut x, mut y, mut w) = (x, y, w);
        if iters == 10 || iters == 20 {
            // exceptional shift
            exshift += x;
            for i in lo..=nn {
                h[(i, i)] -= x;
            }
            let s = h[(nn, nn - 1)].abs() + h[(nn - 1, nn - 2)].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        iters += 1;

        // look for two consecutive small subdiagonal elements
        let mut m = nn - 2;
        loop {
            let z = h[(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / h[(m + 1, m)] + h[(m, m + 1)];
            q = h[(m + 1, m + 1)] - z - rr - ss;
            r = h[(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == lo {
                break;
            }
            let u = h[(m, m - 1)].abs() * (q.abs() + r.abs());
            let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
            if u <= eps * v {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=nn {
            h[(i, i - 2)] = 0.0;
            if i > m + 2 {
                h[(i, i - 3)] = 0.0;
            }
        }

        // double QR sweep on rows lo..=nn, bulge chased from column m
        for k in m..nn {
            let notlast = k != nn - 1;
            if k != m {
                p = h[(k, k - 1)];
                q = h[(k + 1, k - 1)];
                r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                x = p.abs() + q.abs() + r.abs();
                if x == 0.0 {
                    continue;
                }
                p /= x;
                q /= x;
                r /= x;
            }
            let s = {
                let v = (p * p + q * q + r * r).sqrt();
                if p >= 0.0 {
                    v
                } else {
                    -v
                }
            };
            if s == 0.0 {
                continue;
            }
            if k != m {
                h[(k, k - 1)] = -s * x;
            } else if lo != m {
                h[(k, k - 1)] = -h[(k, k - 1)];
            }
            p += s;
            x = p / s;
            y = q / s;
            let z = r / s;
            q /= p;
            r /= p;

            // row modification
            for j in k..=nn {
                let mut f = h[(k, j)] + q * h[(k + 1, j)];
                if notlast {
                    f += r * h[(k + 2, j)];
                }
                h[(k, j)] -= f * x;
                h[(k + 1, j)] -= f * y;
                if notlast {
                    h[(k + 2, j)] -= f * z;
                }
            }
            // column modification
            let upper = nn.min(k + 3);
            for i in lo..=upper {
                let mut f = x * h[(i, k)] + y * h[(i, k + 1)];
                if notlast {
                    f += z * h[(i, k + 2)];
                }
                h[(i, k)] -= f;
                h[(i, k + 1)] -= f * q;
                if notlast {
                    h[(i, k + 2)] -= f * r;
                }
            }
        }
    }
    Ok(spectrum)
}
