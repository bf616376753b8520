//! Closed-loop stability certificates: the extended error matrix `H`, the
//! worst-case perturbation `Δ`, the β constants, the Lyapunov-based
//! definiteness test, and the observer and ultimate bounds.

use std::fmt::Write as _;

use crate::control::ErrorLaw;
use crate::error::{Error, Result};
use crate::estimation::{example1_gain, ObserverGain};
use crate::matrix::RealMatrix;
use crate::model::{build_extended, NominalLinearModel};
use crate::numkernel::{is_hurwitz, norm2, pinv_tall, sigma_extrema, solve_lyapunov, sym_min_eig, HURWITZ_TOL};

/// Growth and derivative bounds of the model mismatch, reference and
/// exogenous signal bounds, and the Lipschitz constant of `h`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LipschitzBounds {
    pub l_w: f64,
    pub l_w_x: f64,
    pub l_w_u: f64,
    pub l_w_w0: f64,
    pub l_dw: f64,
    pub l_dw_x: f64,
    pub l_dw_u: f64,
    pub l_dw_w0: f64,
    pub l_v: f64,
    pub l_v_x: f64,
    pub l_v_u: f64,
    pub l_v_v0: f64,
    pub c_xr: f64,
    pub c_xr_dot: f64,
    pub c_w0: f64,
    pub c_w0_dot: f64,
    pub c_v0: f64,
    pub c_u: f64,
    pub l_h: f64,
}

impl LipschitzBounds {
    pub fn named_values(&self) -> [(&'static str, f64); 19] {
        [
            ("l_w", self.l_w),
            ("l_w_x", self.l_w_x),
            ("l_w_u", self.l_w_u),
            ("l_w_w0", self.l_w_w0),
            ("l_dw", self.l_dw),
            ("l_dw_x", self.l_dw_x),
            ("l_dw_u", self.l_dw_u),
            ("l_dw_w0", self.l_dw_w0),
            ("l_v", self.l_v),
            ("l_v_x", self.l_v_x),
            ("l_v_u", self.l_v_u),
            ("l_v_v0", self.l_v_v0),
            ("c_xr", self.c_xr),
            ("c_xr_dot", self.c_xr_dot),
            ("c_w0", self.c_w0),
            ("c_w0_dot", self.c_w0_dot),
            ("c_v0", self.c_v0),
            ("c_u", self.c_u),
            ("l_h", self.l_h),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named_values() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Constants of the first-order example with tracking gain `k`.
    ///
    /// The reference starts at 0 and steps toward 1, so `|xr| ≤ 1` and
    /// `|ẋr| ≤ k`.
    pub fn first_order_example(k: f64) -> Self {
        Self {
            l_w_x: 0.2,
            l_w_u: 0.3,
            l_w_w0: 1.0,
            l_dw_x: 0.2,
            l_dw_u: 0.3,
            l_dw_w0: 1.0,
            l_v_v0: 1.0,
            c_xr: 1.0,
            c_xr_dot: k,
            c_w0: 0.1,
            c_w0_dot: 0.1,
            c_v0: 0.1,
            c_u: 5.0,
            ..Self::default()
        }
    }
}

/// How the perturbation matrix `Δ` enters the definiteness test.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum DeltaMode {
    /// Partial-derivative bounds enter with their nominal signs.
    #[default]
    Signed,
    /// Entrywise magnitudes of the signed matrix.
    Rectified,
    Override(RealMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCertificate {
    pub atilde_hurwitz: bool,
    pub acl_hurwitz: bool,
    /// Lyapunov solution; absent when `H` is not Hurwitz.
    pub n: Option<RealMatrix>,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Smallest eigenvalue of the test matrix; absent when `N` does not exist.
    pub condition_min_eig: Option<f64>,
    pub satisfied: bool,
    pub ultimate_radius: Option<f64>,
}

impl StabilityCertificate {
    /// Flat `key=value` report.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "atilde_hurwitz={}", self.atilde_hurwitz);
        let _ = writeln!(out, "acl_hurwitz={}", self.acl_hurwitz);
        let _ = writeln!(out, "beta0={}", self.beta0);
        let _ = writeln!(out, "beta1={}", self.beta1);
        let _ = writeln!(out, "beta2={}", self.beta2);
        match self.condition_min_eig {
            Some(v) => {
                let _ = writeln!(out, "min_eig={v:.2}");
            }
            None => out.push_str("min_eig=none\n"),
        }
        let _ = writeln!(out, "satisfied={}", self.satisfied);
        match self.ultimate_radius {
            Some(r) => {
                let _ = writeln!(out, "ultimate_radius={r}");
            }
            None => out.push_str("ultimate_radius=none\n"),
        }
        out
    }
}

fn check_dims(m: &NominalLinearModel, law: &ErrorLaw, gain: &ObserverGain) -> Result<()> {
    let n = m.n();
    if law.matrix().rows() != n {
        return Err(Error::Dimension("K must be n x n".into()));
    }
    if gain.matrix().shape() != (n + m.k(), m.l()) {
        return Err(Error::Dimension("L must be (n+k) x l".into()));
    }
    Ok(())
}

/// `[[Ã, 0], [−BB†[A−K, Γ], A + BB†(K−A)]]`
pub fn build_h(m: &NominalLinearModel, law: &ErrorLaw, gain: &ObserverGain) -> Result<RealMatrix> {
    check_dims(m, law, gain)?;
    let (n, k) = (m.n(), m.k());
    let ext = build_extended(m)?;
    let atilde = gain.atilde(&ext);
    let proj = &m.b * &pinv_tall(&m.b)?;
    let a_minus_k = &m.a - law.matrix();
    let lower_left = -&(&proj * &RealMatrix::hstack(&[&a_minus_k, &m.gamma])?);
    let lower_right = &m.a - &(&proj * &a_minus_k);

    let d = 2 * n + k;
    let mut h = RealMatrix::zeros(d, d);
    h.set_block(0, 0, &atilde);
    h.set_block(n + k, 0, &lower_left);
    h.set_block(n + k, n + k, &lower_right);
    Ok(h)
}

/// Constant worst-case `Δ`: only the `k` disturbance rows are nonzero, holding
/// `[l_dw_u·B†[A−K, Γ], l_dw_u·B†(A−K) − l_dw_x·A]` mapped onto the
/// disturbance channels by rectangular identities.
pub fn build_delta_bound(
    m: &NominalLinearModel,
    law: &ErrorLaw,
    b: &LipschitzBounds,
    mode: &DeltaMode,
) -> Result<RealMatrix> {
    let (n, k, inputs) = (m.n(), m.k(), m.m());
    let d = 2 * n + k;
    if let DeltaMode::Override(delta) = mode {
        if delta.shape() != (d, d) {
            return Err(Error::Dimension(format!("delta override must be {d}x{d}")));
        }
        return Ok(delta.clone());
    }
    b.validate()?;
    let bp = pinv_tall(&m.b)?;
    let su = RealMatrix::rect_identity(k, inputs);
    let sx = RealMatrix::rect_identity(k, n);
    let a_minus_k = &m.a - law.matrix();
    let left = (&(&su * &bp) * &RealMatrix::hstack(&[&a_minus_k, &m.gamma])?).scale(b.l_dw_u);
    let right = &(&(&su * &bp) * &a_minus_k).scale(b.l_dw_u) - &(&sx * &m.a).scale(b.l_dw_x);

    let mut delta = RealMatrix::zeros(d, d);
    delta.set_block(n, 0, &left);
    delta.set_block(n, n + k, &right);
    Ok(match mode {
        DeltaMode::Rectified => delta.abs(),
        _ => delta,
    })
}

/// `(β₀, β₁, β₂)`
pub fn betas(m: &NominalLinearModel, gain: &ObserverGain, b: &LipschitzBounds) -> Result<(f64, f64, f64)> {
    b.validate()?;
    let bp = pinv_tall(&m.b)?;
    let btilde = &RealMatrix::identity(m.n()) - &(&m.b * &bp);
    let l_pi = norm2(&(gain.matrix() * &m.pi));
    let beta0 = b.l_dw_x * norm2(&m.gamma) + b.l_dw_u * norm2(&(&bp * &m.gamma)) + norm2(&(&btilde * &m.gamma));
    let beta1 = b.l_v_x * l_pi + b.l_w_x * beta0;
    let beta2 = b.l_v_u * l_pi + b.l_dw_x * norm2(&m.b) + b.l_w_u * beta0;
    Ok((beta0, beta1, beta2))
}

/// Everything a certificate check needs for one design point.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateInputs {
    pub model: NominalLinearModel,
    pub law: ErrorLaw,
    pub gain: ObserverGain,
    pub bounds: LipschitzBounds,
    pub delta: DeltaMode,
}

impl CertificateInputs {
    /// The first-order example at tracking gain `k` with observer poles at `−3k`.
    pub fn first_order_example(k: f64) -> Result<Self> {
        Ok(Self {
            model: NominalLinearModel::first_order_example(),
            law: ErrorLaw::new(RealMatrix::scalar(-k))?,
            gain: example1_gain(k)?,
            bounds: LipschitzBounds::first_order_example(k),
            delta: DeltaMode::Signed,
        })
    }
}

/// The test matrix `2M − ΔᵀN − NΔ − 2β₁σmax(N)I`.
pub fn condition_matrix(m_mat: &RealMatrix, delta: &RealMatrix, n: &RealMatrix, beta1: f64) -> RealMatrix {
    let d = n.rows();
    let sigma = norm2(n);
    let s = &(&(&m_mat.scale(2.0) - &(&delta.transpose() * n)) - &(n * delta))
        - &RealMatrix::identity(d).scale(2.0 * beta1 * sigma);
    s.symmetrized()
}

/// Hurwitz checks, Lyapunov solve and definiteness test; `m_mat` defaults
/// to the identity. A satisfied certificate also carries its ultimate radius.
pub fn check_theorem2(inputs: &CertificateInputs, m_mat: Option<&RealMatrix>) -> Result<StabilityCertificate> {
    let CertificateInputs {
        model,
        law,
        gain,
        bounds,
        delta,
    } = inputs;
    check_dims(model, law, gain)?;
    let ext = build_extended(model)?;
    let atilde_hurwitz = is_hurwitz(&gain.atilde(&ext), HURWITZ_TOL)?;
    let proj = &model.b * &pinv_tall(&model.b)?;
    let acl = &model.a + &(&proj * &(law.matrix() - &model.a));
    let acl_hurwitz = is_hurwitz(&acl, HURWITZ_TOL)?;
    let (beta0, beta1, beta2) = betas(model, gain, bounds)?;
    let h = build_h(model, law, gain)?;
    let d = h.rows();
    let identity = RealMatrix::identity(d);
    let m_mat = m_mat.unwrap_or(&identity);
    if m_mat.shape() != (d, d) {
        return Err(Error::Dimension(format!("M must be {d}x{d}")));
    }

    let mut cert = StabilityCertificate {
        atilde_hurwitz,
        acl_hurwitz,
        n: None,
        beta0,
        beta1,
        beta2,
        condition_min_eig: None,
        satisfied: false,
        ultimate_radius: None,
    };
    if !(atilde_hurwitz && acl_hurwitz) {
        return Ok(cert);
    }
    let n = match solve_lyapunov(&h, m_mat) {
        Ok(n) => n,
        Err(Error::NoPositiveDefiniteSolution(_)) => return Ok(cert),
        Err(e) => return Err(e),
    };
    let delta = build_delta_bound(model, law, bounds, delta)?;
    let min_eig = sym_min_eig(&condition_matrix(m_mat, &delta, &n, beta1))?;
    cert.n = Some(n);
    cert.condition_min_eig = Some(min_eig);
    cert.satisfied = min_eig > 0.0;
    if cert.satisfied {
        cert.ultimate_radius = Some(ultimate_bound(&cert, model, gain, bounds)?);
    }
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateSweep {
    pub points: Vec<(f64, StabilityCertificate)>,
    /// Endpoints of the longest run of consecutive satisfied grid points.
    pub satisfied_interval: Option<(f64, f64)>,
}

/// Evaluates `family(k)` at every grid point, concurrently.
pub fn sweep_certificates<F>(family: F, grid: &[f64], m_mat: Option<&RealMatrix>) -> Result<CertificateSweep>
where
    F: Fn(f64) -> Result<CertificateInputs> + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidParameter("certificate grid is empty".into()));
    }
    let results: Vec<Result<StabilityCertificate>> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .iter()
            .map(|&k| {
                let family = &family;
                scope.spawn(move || check_theorem2(&family(k)?, m_mat))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("certificate worker panicked"))
            .collect()
    });
    let points: Vec<(f64, StabilityCertificate)> = grid
        .iter()
        .copied()
        .zip(results)
        .map(|(k, r)| r.map(|c| (k, c)))
        .collect::<Result<_>>()?;

    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, (_, c)) in points.iter().enumerate() {
        if c.satisfied {
            let s = *start.get_or_insert(i);
            if best.is_none_or(|(bs, be)| i - s > be - bs) {
                best = Some((s, i));
            }
        } else {
            start = None;
        }
    }
    Ok(CertificateSweep {
        satisfied_interval: best.map(|(s, e)| (points[s].0, points[e].0)),
        points,
    })
}

/// `σmax(P)/σmin(Q)·(c_ẇ + c_v‖LΠ‖)` with `ÃᵀP + PÃ = −2Q`.
pub fn lemma1_bound(
    atilde: &RealMatrix,
    q: &RealMatrix,
    l: &RealMatrix,
    pi: &RealMatrix,
    c_wdot: f64,
    c_v: f64,
) -> Result<f64> {
    let p = solve_lyapunov(atilde, q)?;
    let (q_min, _) = sigma_extrema(q)?;
    Ok(norm2(&p) / q_min * (c_wdot + c_v * norm2(&(l * pi))))
}

/// Tracking-error bound divided by its ISS constant:
/// `σmax(P)/σmin(Q)·(c_ẇ + c_v‖LΠ‖)·(l_h + ‖[A Γ]‖)`.
#[allow(clippy::too_many_arguments)]
pub fn theorem1_xi_factor(
    m: &NominalLinearModel,
    l_h: f64,
    l: &RealMatrix,
    pi: &RealMatrix,
    p: &RealMatrix,
    q: &RealMatrix,
    c_wdot: f64,
    c_v: f64,
) -> Result<f64> {
    let (q_min, _) = sigma_extrema(q)?;
    let observer = norm2(p) / q_min * (c_wdot + c_v * norm2(&(l * pi)));
    Ok(observer * (l_h + norm2(&RealMatrix::hstack(&[&m.a, &m.gamma])?)))
}

/// Affine constant of the Lyapunov-derivative bound.
pub fn exogenous_constant(
    m: &NominalLinearModel,
    gain: &ObserverGain,
    b: &LipschitzBounds,
    beta: (f64, f64, f64),
) -> Result<f64> {
    let (beta0, beta1, beta2) = beta;
    let bp = pinv_tall(&m.b)?;
    let btilde = &RealMatrix::identity(m.n()) - &(&m.b * &bp);
    let l_pi = norm2(&(gain.matrix() * &m.pi));
    Ok(
        b.c_xr * (beta1 + b.l_dw_x * norm2(&m.a) + b.l_dw_u * norm2(&(&bp * &m.a)) + norm2(&(&btilde * &m.a)))
            + b.c_xr_dot * (b.l_dw_u * norm2(&bp) + norm2(&btilde))
            + b.c_u * beta2
            + b.c_w0 * b.l_w_w0 * beta0
            + b.c_w0_dot * b.l_dw_w0
            + (b.l_v + b.c_v0 * b.l_v_v0) * l_pi
            + b.l_w * beta0
            + b.l_dw,
    )
}

/// Radius `2σmax(N)·Kc / λmin(S)` beyond which the Lyapunov function decreases.
pub fn ultimate_bound(
    cert: &StabilityCertificate,
    m: &NominalLinearModel,
    gain: &ObserverGain,
    b: &LipschitzBounds,
) -> Result<f64> {
    let (Some(n), Some(min_eig), true) = (&cert.n, cert.condition_min_eig, cert.satisfied) else {
        return Err(Error::NoUltimateBound);
    };
    let kc = exogenous_constant(m, gain, b, (cert.beta0, cert.beta1, cert.beta2))?;
    Ok(2.0 * norm2(n) * kc / min_eig)
}
