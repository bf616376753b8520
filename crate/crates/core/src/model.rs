//! Nominal linear models, their disturbance-augmented extension, and the
//! true plants used by the benchmark scenarios.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::numkernel::{pair_rank, pinv_tall, rank, PairMode};

/// Whether [`NominalLinearModel::new`] enforces rank conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelChecks {
    #[default]
    Strict,
    /// Only shapes are validated. For deliberately degenerate test models.
    ShapesOnly,
}

/// `ẋ = Ax + Bu + Γw`, `y = Cx + Du + Πv`.
#[derive(Debug, Clone, PartialEq)]
pub struct NominalLinearModel {
    pub a: RealMatrix,
    pub b: RealMatrix,
    pub c: RealMatrix,
    pub d: RealMatrix,
    pub gamma: RealMatrix,
    pub pi: RealMatrix,
}

impl NominalLinearModel {
    /// Validates shapes and, under [`ModelChecks::Strict`], that `B` and `Γ`
    /// have full column rank, `(A, B)` is controllable and `(A, C)` observable.
    ///
    /// `D` defaults to zero and `Π` to the identity when omitted.
    pub fn new(
        a: RealMatrix,
        b: RealMatrix,
        c: RealMatrix,
        d: Option<RealMatrix>,
        gamma: RealMatrix,
        pi: Option<RealMatrix>,
        checks: ModelChecks,
    ) -> Result<Self> {
        let n = a.rows();
        let m = b.cols();
        let l = c.rows();
        let d = d.unwrap_or_else(|| RealMatrix::zeros(l, m));
        let pi = pi.unwrap_or_else(|| RealMatrix::identity(l));
        let k = gamma.cols();

        let shape_err = |what: &str| Err(Error::InvalidModel(what.to_string()));
        if !a.is_square() {
            return shape_err("A must be square");
        }
        if b.rows() != n {
            return shape_err("B must have as many rows as A");
        }
        if c.cols() != n {
            return shape_err("C must have as many columns as A");
        }
        if d.shape() != (l, m) {
            return shape_err("D must be l x m");
        }
        if gamma.rows() != n {
            return shape_err("Gamma must have n rows");
        }
        if pi.rows() != l {
            return shape_err("Pi must have l rows");
        }
        if m > n || k > n || pi.cols() > l {
            return shape_err("dimensions must satisfy m <= n, k <= n, p <= l");
        }

        let model = Self { a, b, c, d, gamma, pi };
        if checks == ModelChecks::Strict {
            model.check_ranks()?;
        }
        Ok(model)
    }

    fn check_ranks(&self) -> Result<()> {
        let n = self.n();
        if pinv_tall(&self.b).is_err() {
            return Err(Error::InvalidModel("B must have full column rank".into()));
        }
        if rank(&self.gamma)? < self.k() {
            return Err(Error::InvalidModel("Gamma must have full column rank".into()));
        }
        if pair_rank(&self.a, &self.b, PairMode::Reachability)? < n {
            return Err(Error::InvalidModel("(A, B) is not controllable".into()));
        }
        if pair_rank(&self.a, &self.c, PairMode::Observability)? < n {
            return Err(Error::InvalidModel("(A, C) is not observable".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn l(&self) -> usize {
        self.c.rows()
    }

    pub fn k(&self) -> usize {
        self.gamma.cols()
    }

    pub fn p(&self) -> usize {
        self.pi.cols()
    }

    /// Model of the first-order example: `ẋ = 2x + 3u + w`, `y = x + v`.
    pub fn first_order_example() -> Self {
        let s = RealMatrix::scalar;
        Self::new(s(2.0), s(3.0), s(1.0), None, s(1.0), None, ModelChecks::Strict)
            .expect("first-order example model is valid")
    }

    /// Fictitious pendulum model `ẋ₁ = x₂`, `ẋ₂ = −αu + w` with both states measured.
    ///
    /// Built with [`ModelChecks::ShapesOnly`] relaxed only in that it has more
    /// outputs than inputs; rank conditions are still checked.
    pub fn pendulum_fictitious(alpha: f64) -> Result<Self> {
        if !(0.05..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0.05, 1.0], got {alpha}"
            )));
        }
        Self::new(
            RealMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]])?,
            RealMatrix::column(&[0.0, -alpha]),
            RealMatrix::identity(2),
            None,
            RealMatrix::column(&[0.0, 1.0]),
            None,
            ModelChecks::Strict,
        )
    }
}

/// `x̄ = [x; w]` augmentation used by the extended state observer.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedModel {
    pub abar: RealMatrix,
    pub bbar: RealMatrix,
    pub cbar: RealMatrix,
    pub e: RealMatrix,
    pub d: RealMatrix,
    pub pi: RealMatrix,
    /// Rank of the observability matrix of `(Ā, C̄)`; full when equal to `n + k`.
    pub observability_rank: usize,
    n: usize,
}

impl ExtendedModel {
    pub fn dim(&self) -> usize {
        self.abar.rows()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.dim() - self.n
    }

    pub fn is_observable(&self) -> bool {
        self.observability_rank == self.dim()
    }

    /// Strips the augmentation again.
    pub fn nominal(&self) -> NominalLinearModel {
        let (n, k) = (self.n, self.k());
        NominalLinearModel {
            a: self.abar.block(0, 0, n, n),
            b: self.bbar.block(0, 0, n, self.bbar.cols()),
            c: self.cbar.block(0, 0, self.cbar.rows(), n),
            d: self.d.clone(),
            gamma: self.abar.block(0, n, n, k),
            pi: self.pi.clone(),
        }
    }
}

pub fn build_extended(model: &NominalLinearModel) -> Result<ExtendedModel> {
    let (n, k, m, l) = (model.n(), model.k(), model.m(), model.l());
    let mut abar = RealMatrix::zeros(n + k, n + k);
    abar.set_block(0, 0, &model.a);
    abar.set_block(0, n, &model.gamma);
    let mut bbar = RealMatrix::zeros(n + k, m);
    bbar.set_block(0, 0, &model.b);
    let mut cbar = RealMatrix::zeros(l, n + k);
    cbar.set_block(0, 0, &model.c);
    let mut e = RealMatrix::zeros(n + k, k);
    e.set_block(n, 0, &RealMatrix::identity(k));
    let observability_rank = pair_rank(&abar, &cbar, PairMode::Observability)?;
    Ok(ExtendedModel {
        abar,
        bbar,
        cbar,
        e,
        d: model.d.clone(),
        pi: model.pi.clone(),
        observability_rank,
        n,
    })
}

/// True dynamics `ẋ = f₀(t, x, u, w₀)`, `y = g₀(t, x, u, v₀)`.
pub trait Plant {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;

    /// Derivative including the true exogenous disturbance at time `t`.
    fn derivative(&self, t: f64, x: &[f64], u: &[f64]) -> Vec<f64>;

    fn output(&self, t: f64, x: &[f64], u: &[f64], v0: &[f64]) -> Vec<f64>;

    /// The exogenous disturbance `w₀(t)`.
    fn exogenous(&self, t: f64) -> Vec<f64>;
}

/// [`Plant::derivative`] with a finiteness check.
pub fn plant_derivative(plant: &dyn Plant, t: f64, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    let dx = plant.derivative(t, x, u);
    if dx.iter().all(|v| v.is_finite()) {
        Ok(dx)
    } else {
        Err(Error::PlantBlowUp { t })
    }
}

pub fn measure(plant: &dyn Plant, t: f64, x: &[f64], u: &[f64], v0: &[f64]) -> Vec<f64> {
    plant.output(t, x, u, v0)
}

/// Lumped disturbance of `plant` relative to `model`: the `w` solving
/// `f₀(t, x, u) = Ax + Bu + Γw` in the least-squares sense.
pub fn lumped_disturbance(
    plant: &dyn Plant,
    model: &NominalLinearModel,
    t: f64,
    x: &[f64],
    u: &[f64],
) -> Result<Vec<f64>> {
    let f0 = plant.derivative(t, x, u);
    let ax = model.a.matvec(x);
    let bu = model.b.matvec(u);
    let resid: Vec<f64> = f0.iter().zip(ax.iter().zip(&bu)).map(|(f, (a, b))| f - a - b).collect();
    Ok(pinv_tall(&model.gamma)?.matvec(&resid))
}

/// `ẋ = 2x + 3u + w` with `w = 0.2x + 0.3u + 0.1 sin t`, `y = x + v₀`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstOrderPlant;

impl FirstOrderPlant {
    pub const NOISE_BOUND: f64 = 0.1;

    pub fn mismatch(t: f64, x: f64, u: f64) -> f64 {
        0.2 * x + 0.3 * u + 0.1 * t.sin()
    }
}

impl Plant for FirstOrderPlant {
    fn state_dim(&self) -> usize {
        1
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn output_dim(&self) -> usize {
        1
    }

    fn derivative(&self, t: f64, x: &[f64], u: &[f64]) -> Vec<f64> {
        vec![2.0 * x[0] + 3.0 * u[0] + Self::mismatch(t, x[0], u[0])]
    }

    fn output(&self, _t: f64, x: &[f64], _u: &[f64], v0: &[f64]) -> Vec<f64> {
        vec![x[0] + v0[0]]
    }

    fn exogenous(&self, t: f64) -> Vec<f64> {
        vec![0.1 * t.sin()]
    }
}

/// Inverted pendulum driven by pivot acceleration:
/// `ẋ₁ = x₂`, `ẋ₂ = sin x₁ − u cos x₁ + w₀(t)`, both states measured.
#[derive(Debug, Clone, Copy)]
pub struct PendulumPlant {
    /// Time after which `w₀(t) = sin t`; zero before.
    pub disturbance_onset: f64,
}

impl Default for PendulumPlant {
    fn default() -> Self {
        Self {
            disturbance_onset: 10.0,
        }
    }
}

impl PendulumPlant {
    pub fn w0(&self, t: f64) -> f64 {
        if t <= self.disturbance_onset {
            0.0
        } else {
            t.sin()
        }
    }

    /// Mismatch against the fictitious model `ẋ₂ = −αu + w`.
    pub fn fictitious_mismatch(&self, alpha: f64, t: f64, x1: f64, u: f64) -> f64 {
        x1.sin() + u * (alpha - x1.cos()) + self.w0(t)
    }

    pub fn initial_state() -> [f64; 2] {
        [-PI / 3.0, 0.0]
    }
}

impl Plant for PendulumPlant {
    fn state_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn output_dim(&self) -> usize {
        2
    }

    fn derivative(&self, t: f64, x: &[f64], u: &[f64]) -> Vec<f64> {
        vec![x[1], x[0].sin() - u[0] * x[0].cos() + self.w0(t)]
    }

    fn output(&self, _t: f64, x: &[f64], _u: &[f64], v0: &[f64]) -> Vec<f64> {
        vec![x[0] + v0[0], x[1] + v0[1]]
    }

    fn exogenous(&self, t: f64) -> Vec<f64> {
        vec![self.w0(t)]
    }
}
