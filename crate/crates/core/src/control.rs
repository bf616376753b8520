//! Least-squares control, its bias, reference generation and the concrete
//! pendulum controllers.

use crate::error::{Error, Result};
use crate::estimation::PendulumGains;
use crate::matrix::RealMatrix;
use crate::model::NominalLinearModel;
use crate::numkernel::{is_hurwitz, pinv_tall, HURWITZ_TOL};
use crate::sim::rk4_step;

/// Exogenous input `u_r(t)` of the reference model.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceInput {
    Zero,
    /// `amplitude` for `t ≥ at`, zero before.
    Step {
        amplitude: Vec<f64>,
        at: f64,
    },
}

impl ReferenceInput {
    pub fn value(&self, t: f64, dim: usize) -> Vec<f64> {
        match self {
            Self::Zero => vec![0.0; dim],
            Self::Step { amplitude, at } if t >= *at => amplitude.clone(),
            Self::Step { .. } => vec![0.0; dim],
        }
    }
}

/// `ẋr = Ar·xr + Br·ur(t)`
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceModel {
    pub ar: RealMatrix,
    pub br: RealMatrix,
    pub input: ReferenceInput,
    pub xr: Vec<f64>,
}

impl ReferenceModel {
    pub fn new(ar: RealMatrix, br: RealMatrix, input: ReferenceInput, xr0: Vec<f64>) -> Result<Self> {
        let n = ar.rows();
        if !ar.is_square() || br.rows() != n || xr0.len() != n {
            return Err(Error::Dimension("reference model shapes are inconsistent".into()));
        }
        if let ReferenceInput::Step { amplitude, .. } = &input {
            if amplitude.len() != br.cols() {
                return Err(Error::Dimension("reference step amplitude has the wrong length".into()));
            }
        }
        Ok(Self { ar, br, input, xr: xr0 })
    }

    /// `ẋr = −k xr + k ur` with a unit step `ur` at `t = 0`.
    pub fn first_order_step(k: f64, xr0: f64) -> Self {
        Self {
            ar: RealMatrix::scalar(-k),
            br: RealMatrix::scalar(k),
            input: ReferenceInput::Step {
                amplitude: vec![1.0],
                at: 0.0,
            },
            xr: vec![xr0],
        }
    }

    /// `ẋr1 = xr2`, `ẋr2 = −k1·xr1 − k2·xr2`, unforced.
    pub fn pendulum(k1: f64, k2: f64, xr0: [f64; 2]) -> Self {
        Self {
            ar: RealMatrix::from_rows(&[vec![0.0, 1.0], vec![-k1, -k2]]).expect("finite gains"),
            br: RealMatrix::column(&[0.0, 0.0]),
            input: ReferenceInput::Zero,
            xr: xr0.to_vec(),
        }
    }

    pub fn derivative(&self, t: f64, xr: &[f64]) -> Vec<f64> {
        let ur = self.input.value(t, self.br.cols());
        let a = self.ar.matvec(xr);
        let b = self.br.matvec(&ur);
        a.iter().zip(&b).map(|(a, b)| a + b).collect()
    }

    /// `f_r = Ar·xr + Br·ur(t)` at the current reference state.
    pub fn fr_value(&self, t: f64) -> Vec<f64> {
        self.derivative(t, &self.xr)
    }
}

/// RK4 advance of the reference state.
pub fn reference_step(r: &ReferenceModel, t: f64, dt: f64) -> Result<ReferenceModel> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {dt}")));
    }
    let xr = rk4_step(|s, x| Ok(r.derivative(s, x)), t, &r.xr, dt)?;
    Ok(ReferenceModel { xr, ..r.clone() })
}

/// Desired error dynamics `ė = Ke` with `K` Hurwitz.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorLaw {
    k: RealMatrix,
}

impl ErrorLaw {
    pub fn new(k: RealMatrix) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::Dimension("error-law gain must be square".into()));
        }
        if !is_hurwitz(&k, HURWITZ_TOL)? {
            return Err(Error::InvalidParameter("error-law gain K is not Hurwitz".into()));
        }
        Ok(Self { k })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.k
    }
}

/// Symmetric per-channel bounds `|u_i| ≤ umax_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationLimits {
    umax: Vec<f64>,
}

impl SaturationLimits {
    pub fn new(umax: Vec<f64>) -> Result<Self> {
        if umax.is_empty() || umax.iter().any(|u| !(*u > 0.0)) {
            return Err(Error::InvalidParameter("saturation limits must be positive".into()));
        }
        Ok(Self { umax })
    }

    pub fn uniform(umax: f64, channels: usize) -> Result<Self> {
        Self::new(vec![umax; channels])
    }

    pub fn limits(&self) -> &[f64] {
        &self.umax
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.umax).map(|(v, m)| v.clamp(-m, *m)).collect()
    }
}

/// `fr − Γŵ − Ax̂ − K(xr − x̂)`
fn desired_residual(
    m: &NominalLinearModel,
    law: &ErrorLaw,
    fr: &[f64],
    xhat: &[f64],
    what: &[f64],
    xr: &[f64],
) -> Result<Vec<f64>> {
    let n = m.n();
    if fr.len() != n || xhat.len() != n || xr.len() != n || what.len() != m.k() || law.k.rows() != n {
        return Err(Error::Dimension("control arguments do not match the model".into()));
    }
    let gw = m.gamma.matvec(what);
    let ax = m.a.matvec(xhat);
    let ehat: Vec<f64> = xr.iter().zip(xhat).map(|(r, x)| r - x).collect();
    let ke = law.k.matvec(&ehat);
    Ok((0..n).map(|i| fr[i] - gw[i] - ax[i] - ke[i]).collect())
}

/// Least-squares control `B†(fr − Γŵ − Ax̂ − K(xr − x̂))`.
pub fn ls_control(
    m: &NominalLinearModel,
    law: &ErrorLaw,
    fr: &[f64],
    xhat: &[f64],
    what: &[f64],
    xr: &[f64],
) -> Result<Vec<f64>> {
    let r = desired_residual(m, law, fr, xhat, what, xr)?;
    Ok(pinv_tall(&m.b)?.matvec(&r))
}

/// The part of the desired derivative the input cannot reach: `(I − BB†)(…)`.
pub fn control_bias(
    m: &NominalLinearModel,
    law: &ErrorLaw,
    fr: &[f64],
    xhat: &[f64],
    what: &[f64],
    xr: &[f64],
) -> Result<Vec<f64>> {
    let r = desired_residual(m, law, fr, xhat, what, xr)?;
    let proj = &m.b * &pinv_tall(&m.b)?;
    let pr = proj.matvec(&r);
    Ok(r.iter().zip(&pr).map(|(a, b)| a - b).collect())
}

/// Feedback-linearizing pendulum control `(k1x1 + k2x2 + sin x1)/cos x1`, saturated.
///
/// Where `cos x1` vanishes to working precision the output is `±umax` in the
/// direction of the limit, or 0 when the numerator vanishes too.
pub fn controller_a(x1: f64, x2: f64, k1: f64, k2: f64, umax: f64) -> f64 {
    let num = k1 * x1 + k2 * x2 + x1.sin();
    let c = x1.cos();
    if c.abs() <= 1e-15 {
        if num == 0.0 {
            return 0.0;
        }
        return umax * num.signum() * c.signum();
    }
    (num / c).clamp(-umax, umax)
}

/// `(k1x1 + k2x2 + ŵ)/α`, saturated.
pub fn controller_b2(x1: f64, x2: f64, what: f64, g: &PendulumGains) -> f64 {
    ((g.k1 * x1 + g.k2 * x2 + what) / g.alpha).clamp(-g.umax, g.umax)
}
