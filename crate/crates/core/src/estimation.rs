//! Extended state observer and filter-based (Type-I) estimation.

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::model::{build_extended, ExtendedModel, NominalLinearModel};
use crate::numkernel::{eigenvalues, is_hurwitz, HURWITZ_TOL};

/// Observer gain `L` with `Ā − LC̄` verified Hurwitz.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverGain {
    l: RealMatrix,
}

impl ObserverGain {
    pub fn new(ext: &ExtendedModel, l: RealMatrix) -> Result<Self> {
        if l.shape() != (ext.dim(), ext.cbar.rows()) {
            return Err(Error::Dimension(format!(
                "observer gain must be {}x{}, got {:?}",
                ext.dim(),
                ext.cbar.rows(),
                l.shape()
            )));
        }
        let atilde = &ext.abar - &(&l * &ext.cbar);
        if !is_hurwitz(&atilde, HURWITZ_TOL)? {
            return Err(Error::InvalidParameter("observer error matrix is not Hurwitz".into()));
        }
        Ok(Self { l })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.l
    }

    /// `Ã = Ā − LC̄`
    pub fn atilde(&self, ext: &ExtendedModel) -> RealMatrix {
        &ext.abar - &(&self.l * &ext.cbar)
    }
}

/// `Āx̂̄ + B̄u + L(y − C̄x̂̄ − Du)`
pub fn eso_derivative(ext: &ExtendedModel, gain: &ObserverGain, xhat_bar: &[f64], u: &[f64], y: &[f64]) -> Vec<f64> {
    let cx = ext.cbar.matvec(xhat_bar);
    let du = ext.d.matvec(u);
    let innovation: Vec<f64> = y.iter().zip(cx.iter().zip(&du)).map(|(y, (c, d))| y - c - d).collect();
    let ax = ext.abar.matvec(xhat_bar);
    let bu = ext.bbar.matvec(u);
    let li = gain.l.matvec(&innovation);
    (0..ax.len()).map(|i| ax[i] + bu[i] + li[i]).collect()
}

/// Gain `(6k+2, 9k²)` for the first-order example, putting both observer
/// poles at `−3k`.
pub fn example1_gain(k: f64) -> Result<ObserverGain> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let ext = build_extended(&NominalLinearModel::first_order_example())?;
    ObserverGain::new(&ext, RealMatrix::column(&[6.0 * k + 2.0, 9.0 * k * k]))
}

/// Structured pendulum gain `[[l1,0],[0,l2],[0,l3]]`.
///
/// `l1 = −p_x1` and `λ² + l2λ + l3 = (λ − p₁)(λ − p₂)`. The extended matrix of
/// the fictitious pendulum model does not depend on α, so neither does the gain.
pub fn pendulum_eso_gain(p_x1: f64, p_pair: [f64; 2]) -> Result<ObserverGain> {
    for p in [p_x1, p_pair[0], p_pair[1]] {
        if !(p < 0.0) {
            return Err(Error::UnstablePole(p));
        }
    }
    let l1 = -p_x1;
    let l2 = -(p_pair[0] + p_pair[1]);
    let l3 = p_pair[0] * p_pair[1];
    let l = RealMatrix::from_rows(&[vec![l1, 0.0], vec![0.0, l2], vec![0.0, l3]])?;
    let ext = build_extended(&NominalLinearModel::pendulum_fictitious(1.0)?)?;
    ObserverGain::new(&ext, l)
}

/// Spectrum of `Ā − LC̄`, sorted by real part.
pub fn observer_poles(ext: &ExtendedModel, gain: &ObserverGain) -> Result<Vec<num_complex::Complex64>> {
    let mut ev = eigenvalues(&gain.atilde(ext))?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// First-order low-pass `1/(τs + 1)` discretized by exact zero-order hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowPass {
    pub tau: f64,
    pub z: f64,
}

impl LowPass {
    pub fn new(tau: f64, z0: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "filter time constant must be positive, got {tau}"
            )));
        }
        Ok(Self { tau, z: z0 })
    }

    /// Rejects steps coarser than `τ/5`.
    pub fn check_step(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0) || dt > self.tau / 5.0 {
            return Err(Error::InvalidParameter(format!(
                "filter step {dt} must lie in (0, tau/5] for tau = {}",
                self.tau
            )));
        }
        Ok(())
    }

    /// Filtered derivative `(input − z)/τ`, realizing `s/(τs + 1)`.
    pub fn derivative(&self, input: f64) -> f64 {
        (input - self.z) / self.tau
    }

    /// Advances one step with `input` held; returns the new state and its output.
    pub fn step(self, input: f64, dt: f64) -> (Self, f64) {
        let decay = (-dt / self.tau).exp();
        let z = decay * self.z + (1.0 - decay) * input;
        (Self { tau: self.tau, z }, z)
    }
}

/// Per-channel filter bank of the Type-I estimator
/// `Γŵ = F ⋆ (ẋ̂ − Ax̂ − Bû)` with `F = 1/(τs + 1)` on every channel.
///
/// `F ⋆ ẋ̂` is realized as the filtered derivative of `x̂`, so no raw
/// differentiation takes place.
#[derive(Debug, Clone, PartialEq)]
pub struct Type1Estimator {
    xhat_filters: Vec<LowPass>,
    model_filters: Vec<LowPass>,
}

impl Type1Estimator {
    /// Derivative filters start at `xhat0` so the initial estimate has no spike.
    pub fn new(tau: f64, xhat0: &[f64]) -> Result<Self> {
        Ok(Self {
            xhat_filters: xhat0.iter().map(|&x| LowPass::new(tau, x)).collect::<Result<_>>()?,
            model_filters: xhat0.iter().map(|_| LowPass::new(tau, 0.0)).collect::<Result<_>>()?,
        })
    }

    pub fn tau(&self) -> f64 {
        self.xhat_filters[0].tau
    }

    /// Current `Γŵ` estimate from the filter memory and the present `x̂`.
    pub fn estimate(&self, xhat: &[f64]) -> Vec<f64> {
        self.xhat_filters
            .iter()
            .zip(&self.model_filters)
            .zip(xhat)
            .map(|((fx, fm), &x)| fx.derivative(x) - fm.z)
            .collect()
    }

    /// Advances the bank with `x̂` and `Ax̂ + Bû` held over the step.
    pub fn step(self, model: &NominalLinearModel, xhat: &[f64], uhat: &[f64], dt: f64) -> Self {
        let ax = model.a.matvec(xhat);
        let bu = model.b.matvec(uhat);
        Self {
            xhat_filters: self
                .xhat_filters
                .iter()
                .zip(xhat)
                .map(|(f, &x)| f.step(x, dt).0)
                .collect(),
            model_filters: self
                .model_filters
                .iter()
                .enumerate()
                .map(|(i, f)| f.step(ax[i] + bu[i], dt).0)
                .collect(),
        }
    }
}

/// One evaluation of the Type-I disturbance estimate followed by a filter update.
pub fn type1_disturbance_estimate(
    bank: Type1Estimator,
    model: &NominalLinearModel,
    xhat: &[f64],
    uhat: &[f64],
    dt: f64,
) -> (Type1Estimator, Vec<f64>) {
    let est = bank.estimate(xhat);
    (bank.step(model, xhat, uhat, dt), est)
}

/// Gains of the filter-based pendulum controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumGains {
    pub k1: f64,
    pub k2: f64,
    pub alpha: f64,
    pub umax: f64,
}

/// Memory of the filter-based pendulum controller: the low-pass on `x₂` used
/// for its filtered derivative and the integrator realizing `1/(1 − F_u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B1State {
    pub filter: LowPass,
    pub q: f64,
}

impl B1State {
    pub fn new(tau: f64, x2_0: f64) -> Result<Self> {
        Ok(Self {
            filter: LowPass::new(tau, x2_0)?,
            q: 0.0,
        })
    }

    /// `v = k1x1 + k2x2 + d` and the unsaturated control `(v + q)/α`.
    pub fn raw_control(&self, x1: f64, x2: f64, g: &PendulumGains) -> (f64, f64) {
        let v = g.k1 * x1 + g.k2 * x2 + self.filter.derivative(x2);
        (v, (v + self.q) / g.alpha)
    }
}

/// Evaluates the controller at the step start and advances its memory.
pub fn controller_b1_step(state: B1State, x1: f64, x2: f64, g: &PendulumGains, dt: f64) -> (B1State, f64) {
    let (v, raw) = state.raw_control(x1, x2, g);
    let u = raw.clamp(-g.umax, g.umax);
    let (filter, _) = state.filter.step(x2, dt);
    let next = B1State {
        filter,
        q: state.q + v * dt / state.filter.tau,
    };
    (next, u)
}
