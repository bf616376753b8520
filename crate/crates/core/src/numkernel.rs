//! Small dense linear-algebra kernels: linear solves, pseudoinverse,
//! eigenvalues (general and symmetric), singular values, Lyapunov equations
//! and Krylov rank tests.
//!
//! Everything here targets matrices of dimension ≤ ~32. General eigenvalues
//! use balancing, Hessenberg reduction and Francis double-shift QR; the
//! symmetric problem uses cyclic Jacobi rotations; singular values come from
//! one-sided Jacobi; the Lyapunov equation is vectorized into a d²×d² system.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

/// Relative singular-value threshold below which a direction counts as null.
pub const RANK_TOL: f64 = 1e-9;

/// Default stability margin for [`is_hurwitz`].
pub const HURWITZ_TOL: f64 = 1e-9;

const MAX_QR_ITERATIONS: usize = 60;
const MAX_JACOBI_SWEEPS: usize = 100;

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve(a: &RealMatrix, b: &RealMatrix) -> Result<RealMatrix> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(Error::Dimension(format!(
            "solve needs square A and matching B, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let m = b.cols();
    let mut lu = a.to_rows();
    let mut rhs = b.to_rows();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[i][col].abs().total_cmp(&lu[j][col].abs()))
            .unwrap();
        if lu[pivot][col].abs() <= scale * 1e-14 {
            return Err(Error::SingularSystem);
        }
        lu.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = lu[row][col] / lu[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                lu[row][k] -= f * lu[col][k];
            }
            for k in 0..m {
                rhs[row][k] -= f * rhs[col][k];
            }
        }
    }

    let mut x = RealMatrix::zeros(n, m);
    for k in 0..m {
        for row in (0..n).rev() {
            let mut acc = rhs[row][k];
            for j in row + 1..n {
                acc -= lu[row][j] * x[(j, k)];
            }
            x[(row, k)] = acc / lu[row][row];
        }
    }
    Ok(x)
}

pub fn inverse(a: &RealMatrix) -> Result<RealMatrix> {
    solve(a, &RealMatrix::identity(a.rows()))
}

/// Left pseudoinverse `(BᵀB)⁻¹Bᵀ` of a tall matrix with full column rank.
pub fn pinv_tall(b: &RealMatrix) -> Result<RealMatrix> {
    let (n, m) = b.shape();
    if n < m {
        return Err(Error::Dimension(format!("pinv_tall needs rows >= cols, got {n}x{m}")));
    }
    let (smin, smax) = sigma_extrema(b)?;
    if smax == 0.0 || smin <= RANK_TOL * smax {
        return Err(Error::SingularNormalEquations);
    }
    let bt = b.transpose();
    let normal = &bt * b;
    solve(&normal, &bt).map_err(|_| Error::SingularNormalEquations)
}

/// Eigenvalues of a general real square matrix.
pub fn eigenvalues(x: &RealMatrix) -> Result<Vec<Complex64>> {
    if !x.is_square() {
        return Err(Error::Dimension(format!("eigenvalues of non-square {:?}", x.shape())));
    }
    if !x.is_finite() {
        return Err(Error::SpectrumFailure);
    }
    let mut a = x.to_rows();
    balance(&mut a);
    reduce_to_hessenberg(&mut a);
    hessenberg_qr(&mut a)
}

/// `true` iff every eigenvalue of `x` has real part below `-tol`.
pub fn is_hurwitz(x: &RealMatrix, tol: f64) -> Result<bool> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "hurwitz tolerance must be positive, got {tol}"
        )));
    }
    Ok(eigenvalues(x)?.iter().all(|ev| ev.re < -tol))
}

/// Ascending eigenvalues and matching column eigenvectors of `(S + Sᵀ)/2`.
pub fn sym_eigen(s: &RealMatrix) -> Result<(Vec<f64>, RealMatrix)> {
    if !s.is_square() {
        return Err(Error::Dimension(format!("symmetric eigenproblem on {:?}", s.shape())));
    }
    if !s.is_finite() {
        return Err(Error::SpectrumFailure);
    }
    let n = s.rows();
    let mut a = s.symmetrized().to_rows();
    let mut v = RealMatrix::identity(n).to_rows();

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|v| v * v).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - sn * vq;
                    row[q] = sn * vp + c * vq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::SpectrumFailure);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let mut vecs = RealMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, dst)] = v[r][src];
        }
    }
    Ok((values, vecs))
}

/// Smallest eigenvalue of the symmetrized matrix.
pub fn sym_min_eig(s: &RealMatrix) -> Result<f64> {
    Ok(sym_eigen(s)?.0[0])
}

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values(x: &RealMatrix) -> Result<Vec<f64>> {
    if !x.is_finite() {
        return Err(Error::SpectrumFailure);
    }
    // Work on the orientation with at least as many rows as columns.
    let work = if x.rows() >= x.cols() { x.clone() } else { x.transpose() };
    let (m, n) = work.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|c| (0..m).map(|r| work[(r, c)]).collect()).collect();

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|v| v * v).sum();
                let beta: f64 = cols[q].iter().map(|v| v * v).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a * b).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..m {
                    let a = cols[p][r];
                    let b = cols[q][r];
                    cols[p][r] = c * a - s * b;
                    cols[q][r] = s * a + c * b;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SpectrumFailure);
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `(σmin, σmax)` over the `min(rows, cols)` singular values.
pub fn sigma_extrema(x: &RealMatrix) -> Result<(f64, f64)> {
    let sv = singular_values(x)?;
    Ok((*sv.last().unwrap(), sv[0]))
}

/// Spectral (2-)norm.
pub fn norm2(x: &RealMatrix) -> f64 {
    sigma_extrema(x).map(|(_, s)| s).expect("finite matrix")
}

pub fn rank(x: &RealMatrix) -> Result<usize> {
    let sv = singular_values(x)?;
    let top = sv[0];
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s >= RANK_TOL * top).count())
}

/// Solves `HᵀN + NH = −2M` for symmetric positive-definite `N`.
pub fn solve_lyapunov(h: &RealMatrix, m: &RealMatrix) -> Result<RealMatrix> {
    let d = h.rows();
    if !h.is_square() || m.shape() != (d, d) {
        return Err(Error::Dimension(format!(
            "lyapunov needs square H and matching M, got {:?} and {:?}",
            h.shape(),
            m.shape()
        )));
    }
    if !is_hurwitz(h, HURWITZ_TOL)? {
        return Err(Error::NoPositiveDefiniteSolution("H is not Hurwitz".into()));
    }
    if m.max_asymmetry() > 1e-9 * m.max_abs().max(1.0) || sym_min_eig(m)? <= 0.0 {
        return Err(Error::InvalidParameter("M must be symmetric positive definite".into()));
    }

    // Row (i, j) of the vectorized equation: Σ_p H[p,i] N[p,j] + Σ_p N[i,p] H[p,j] = −2 M[i,j].
    let dd = d * d;
    let mut op = RealMatrix::zeros(dd, dd);
    let mut rhs = RealMatrix::zeros(dd, 1);
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            for p in 0..d {
                op[(row, p * d + j)] += h[(p, i)];
                op[(row, i * d + p)] += h[(p, j)];
            }
            rhs[(row, 0)] = -2.0 * m[(i, j)];
        }
    }
    let vec_n = solve(&op, &rhs).map_err(|_| Error::NoPositiveDefiniteSolution("singular Lyapunov operator".into()))?;
    let n = RealMatrix::new(d, d, vec_n.as_slice().to_vec())?.symmetrized();
    if sym_min_eig(&n)? <= 0.0 {
        return Err(Error::NoPositiveDefiniteSolution(
            "solution is not positive definite".into(),
        ));
    }
    Ok(n)
}

/// `‖HᵀN + NH + 2M‖_F`
pub fn lyapunov_residual(h: &RealMatrix, n: &RealMatrix, m: &RealMatrix) -> f64 {
    let ht = h.transpose();
    let r = &(&(&ht * n) + &(n * h)) + &m.scale(2.0);
    r.frobenius_norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    /// Rank of `[G, AG, …, Aⁿ⁻¹G]` for an `n×q` input matrix `G`.
    Reachability,
    /// Rank of `[G; GA; …; GAⁿ⁻¹]` for an `l×n` output matrix `G`.
    Observability,
}

pub fn pair_rank(a: &RealMatrix, g: &RealMatrix, mode: PairMode) -> Result<usize> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::Dimension("pair_rank needs square A".into()));
    }
    let krylov = match mode {
        PairMode::Reachability => {
            if g.rows() != n {
                return Err(Error::Dimension(format!("G has {} rows, A is {n}x{n}", g.rows())));
            }
            let mut blocks = vec![g.clone()];
            for _ in 1..n {
                let next = a * blocks.last().unwrap();
                blocks.push(next);
            }
            RealMatrix::hstack(&blocks.iter().collect::<Vec<_>>())?
        }
        PairMode::Observability => {
            if g.cols() != n {
                return Err(Error::Dimension(format!("G has {} cols, A is {n}x{n}", g.cols())));
            }
            let mut blocks = vec![g.clone()];
            for _ in 1..n {
                let next = blocks.last().unwrap() * a;
                blocks.push(next);
            }
            RealMatrix::vstack(&blocks.iter().collect::<Vec<_>>())?
        }
    };
    rank(&krylov)
}

fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Similarity reduction to upper Hessenberg form by stabilized elimination.
fn reduce_to_hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x: f64 = 0.0;
        let mut piv = m;
        for j in m..n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut() {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    for (r, row) in a.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            if r > c + 1 {
                *v = 0.0;
            }
        }
    }
}

fn hessenberg_qr(a: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(out);
    }
    let mut anorm = 0.0;
    for (i, row) in a.iter().enumerate() {
        for v in &row[i.saturating_sub(1)..] {
            anorm += v.abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut shift = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // Find a negligible subdiagonal element.
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                out[nu] = Complex64::new(x + shift, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let hi = x + z;
                    let lo = if z != 0.0 { x - w / z } else { hi };
                    out[nu - 1] = Complex64::new(hi, 0.0);
                    out[nu] = Complex64::new(lo, 0.0);
                } else {
                    out[nu - 1] = Complex64::new(x + p, -z);
                    out[nu] = Complex64::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            if its == MAX_QR_ITERATIONS {
                return Err(Error::SpectrumFailure);
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                shift += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r);
            let mut m = nu - 2;
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }

            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            pp += z * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}
