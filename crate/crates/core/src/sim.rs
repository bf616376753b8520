//! Fixed-step closed-loop simulation, reproducible measurement noise, traces
//! and the IAE/IV performance metrics.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use crate::control::{controller_a, controller_b2, ls_control, ErrorLaw, ReferenceModel, SaturationLimits};
use crate::error::{Error, Result};
use crate::estimation::{
    eso_derivative, example1_gain, pendulum_eso_gain, B1State, LowPass, ObserverGain, PendulumGains, Type1Estimator,
};
use crate::matrix::RealMatrix;
use crate::model::{
    build_extended, lumped_disturbance, plant_derivative, ExtendedModel, FirstOrderPlant, NominalLinearModel,
    PendulumPlant, Plant,
};
use crate::numkernel::{inverse, pinv_tall};

/// Classical fourth-order Runge–Kutta step. A non-finite stage derivative
/// is reported as a blow-up at `t`.
pub fn rk4_step<F>(f: F, t: f64, x: &[f64], dt: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let finite = |v: Vec<f64>| {
        if v.iter().all(|x| x.is_finite()) {
            Ok(v)
        } else {
            Err(Error::PlantBlowUp { t })
        }
    };
    let shifted = |k: &[f64], h: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    let k1 = finite(f(t, x)?)?;
    let k2 = finite(f(t + 0.5 * dt, &shifted(&k1, 0.5 * dt))?)?;
    let k3 = finite(f(t + 0.5 * dt, &shifted(&k2, 0.5 * dt))?)?;
    let k4 = finite(f(t + dt, &shifted(&k3, dt))?)?;
    let next: Vec<f64> = (0..x.len())
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    finite(next)
}

const LCG_MUL: u64 = 6364136223846793005;
const LCG_INC: u64 = 1442695040888963407;

/// 64-bit linear congruential generator with Box–Muller normals.
///
/// Uniforms take the top 53 bits of the state; every normal draw consumes
/// two uniforms and uses the cosine branch only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseStream {
    state: u64,
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MUL).wrapping_add(LCG_INC);
        self.state
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn gaussian_truncated(&mut self, variance: f64, bound: f64) -> f64 {
        (variance.sqrt() * self.standard_normal()).clamp(-bound, bound)
    }
}

/// Value-style wrapper around [`NoiseStream::gaussian_truncated`].
pub fn gaussian_truncated(mut stream: NoiseStream, variance: f64, bound: f64) -> (NoiseStream, f64) {
    let v = stream.gaussian_truncated(variance, bound);
    (stream, v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    Off,
    GaussianTruncated { variance: f64, bound: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlantSpec {
    FirstOrder,
    Pendulum { disturbance_onset: f64 },
}

impl PlantSpec {
    pub fn build(&self) -> Box<dyn Plant + Send + Sync> {
        match *self {
            Self::FirstOrder => Box::new(FirstOrderPlant),
            Self::Pendulum { disturbance_onset } => Box::new(PendulumPlant { disturbance_onset }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec {
    None,
    /// Extended state observer with gain `L` and initial estimate `x̂̄(0)`.
    Eso {
        gain: RealMatrix,
        xhat0: Vec<f64>,
    },
    /// Filter bank with time constant `tau`; `output_tau` adds a low-pass on
    /// the measurement before it is used as the state estimate.
    Type1 {
        tau: f64,
        output_tau: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerSpec {
    A {
        k1: f64,
        k2: f64,
        umax: f64,
    },
    B1 {
        gains: PendulumGains,
        tau: f64,
    },
    B2 {
        gains: PendulumGains,
    },
    /// Least-squares law with error gain `K` and optional symmetric saturation.
    Ls {
        k: RealMatrix,
        umax: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub plant: PlantSpec,
    pub model: Option<NominalLinearModel>,
    pub estimator: EstimatorSpec,
    pub controller: ControllerSpec,
    pub reference: Option<ReferenceModel>,
    pub x0: Vec<f64>,
    pub t0: f64,
    pub tf: f64,
    pub dt: f64,
    pub noise: NoiseSpec,
}

impl Scenario {
    /// Number of integration steps; the trace holds one more record.
    pub fn steps(&self) -> usize {
        ((self.tf - self.t0) / self.dt + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.tf > self.t0) {
            return bad(format!("tf must exceed t0, got t0={} tf={}", self.t0, self.tf));
        }
        if let NoiseSpec::GaussianTruncated { variance, bound, .. } = self.noise {
            if !(variance > 0.0 && bound > 0.0) {
                return bad("noise variance and bound must be positive".into());
            }
        }
        let plant = self.plant.build();
        if self.x0.len() != plant.state_dim() {
            return bad(format!("x0 must have {} entries", plant.state_dim()));
        }
        if let Some(m) = &self.model {
            if m.n() != plant.state_dim() || m.m() != plant.input_dim() || m.l() != plant.output_dim() {
                return Err(Error::Dimension("nominal model does not match the plant".into()));
            }
        }
        let pendulum = matches!(self.plant, PlantSpec::Pendulum { .. });
        match &self.estimator {
            EstimatorSpec::None => {}
            EstimatorSpec::Eso { gain, xhat0 } => {
                let ext = self.extended()?.expect("checked");
                ObserverGain::new(&ext, gain.clone())?;
                if xhat0.len() != ext.dim() {
                    return bad(format!("xhat0 must have {} entries", ext.dim()));
                }
            }
            EstimatorSpec::Type1 { tau, output_tau } => {
                let m = self.require_model()?;
                if !m.c.is_square() {
                    return bad("type1 estimation needs an invertible C".into());
                }
                inverse(&m.c)?;
                LowPass::new(*tau, 0.0)?.check_step(self.dt)?;
                if let Some(ty) = output_tau {
                    LowPass::new(*ty, 0.0)?.check_step(self.dt)?;
                }
            }
        }
        match &self.controller {
            ControllerSpec::A { umax, .. } => {
                if !pendulum {
                    return bad("controller a drives the pendulum only".into());
                }
                SaturationLimits::uniform(*umax, 1)?;
            }
            ControllerSpec::B1 { gains, tau } => {
                if !pendulum {
                    return bad("controller b1 drives the pendulum only".into());
                }
                check_pendulum_gains(gains)?;
                LowPass::new(*tau, 0.0)?.check_step(self.dt)?;
            }
            ControllerSpec::B2 { gains } => {
                if !pendulum {
                    return bad("controller b2 drives the pendulum only".into());
                }
                check_pendulum_gains(gains)?;
                if self.estimator == EstimatorSpec::None {
                    return bad("controller b2 needs a disturbance estimator".into());
                }
            }
            ControllerSpec::Ls { k, umax } => {
                let m = self.require_model()?;
                let law = ErrorLaw::new(k.clone())?;
                if law.matrix().rows() != m.n() {
                    return Err(Error::Dimension("K must be n x n".into()));
                }
                pinv_tall(&m.b)?;
                if let Some(u) = umax {
                    SaturationLimits::uniform(*u, m.m())?;
                }
                if let Some(r) = &self.reference {
                    if r.xr.len() != m.n() {
                        return Err(Error::Dimension("reference state must have n entries".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn require_model(&self) -> Result<&NominalLinearModel> {
        self.model
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("this estimator or controller needs a nominal model".into()))
    }

    fn extended(&self) -> Result<Option<ExtendedModel>> {
        match self.estimator {
            EstimatorSpec::Eso { .. } => Ok(Some(build_extended(self.require_model()?)?)),
            _ => Ok(None),
        }
    }

    pub fn trace_layout(&self) -> TraceLayout {
        let plant = self.plant.build();
        let k = self.model.as_ref().map_or(0, NominalLinearModel::k);
        let estimates = self.estimator != EstimatorSpec::None;
        TraceLayout {
            n: plant.state_dim(),
            k: if estimates { k } else { 0 },
            m: plant.input_dim(),
            l: plant.output_dim(),
            estimates,
            w_true: if self.model.is_some() { k } else { 0 },
        }
    }
}

fn check_pendulum_gains(g: &PendulumGains) -> Result<()> {
    if !(g.alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {}",
            g.alpha
        )));
    }
    SaturationLimits::uniform(g.umax, 1).map(|_| ())
}

/// Column counts of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceLayout {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub l: usize,
    /// Whether `xhat`/`what` columns are present.
    pub estimates: bool,
    pub w_true: usize,
}

impl TraceLayout {
    pub fn header(&self) -> String {
        let mut cols = vec!["t".to_string()];
        let mut push = |prefix: &str, count: usize| cols.extend((1..=count).map(|i| format!("{prefix}{i}")));
        push("x", self.n);
        if self.estimates {
            push("xhat", self.n);
            push("what", self.k);
        }
        push("u", self.m);
        push("y", self.l);
        push("w_true", self.w_true);
        cols.join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub x: Vec<f64>,
    pub xhat: Vec<f64>,
    pub what: Vec<f64>,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub w_true: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub layout: TraceLayout,
    pub dt: f64,
    pub rows: Vec<TraceRow>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn state(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.x[i]).collect()
    }

    pub fn final_state(&self) -> &[f64] {
        &self.rows.last().expect("non-empty trace").x
    }

    /// Comma-separated export with 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = self.layout.header();
        out.push('\n');
        for r in &self.rows {
            let values = std::iter::once(&r.t)
                .chain(&r.x)
                .chain(&r.xhat)
                .chain(&r.what)
                .chain(&r.u)
                .chain(&r.y)
                .chain(&r.w_true);
            let cells: Vec<String> = values.map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Invalid(Error),
    /// The plant or observer left the finite range; `partial` holds every
    /// record produced before the failure.
    BlowUp {
        error: Error,
        partial: SimulationTrace,
    },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Invalid(e) => write!(f, "{e}"),
            Self::BlowUp { error, partial } => write!(f, "{error} after {} records", partial.len()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        Self::Invalid(e)
    }
}

enum Memory {
    None,
    Type1 {
        bank: Type1Estimator,
        output: Option<Vec<LowPass>>,
    },
}

/// Co-integrates plant, observer and reference with RK4; control and the
/// measurement noise sample are held over each step.
pub fn run_closed_loop(s: &Scenario) -> std::result::Result<SimulationTrace, RunError> {
    s.validate()?;
    let plant = s.plant.build();
    let plant: &dyn Plant = plant.as_ref();
    let layout = s.trace_layout();
    let (n, m, l) = (layout.n, layout.m, layout.l);
    let ext = s.extended()?;
    let eso_gain = match (&s.estimator, &ext) {
        (EstimatorSpec::Eso { gain, .. }, Some(e)) => Some(ObserverGain::new(e, gain.clone())?),
        _ => None,
    };
    let dim_eso = ext.as_ref().map_or(0, ExtendedModel::dim);
    let dim_ref = s.reference.as_ref().map_or(0, |r| r.xr.len());
    let law = match &s.controller {
        ControllerSpec::Ls { k, .. } => Some(ErrorLaw::new(k.clone())?),
        _ => None,
    };
    let gamma_pinv = match &s.model {
        Some(model) => Some(pinv_tall(&model.gamma)?),
        None => None,
    };
    let c_inv = match (&s.estimator, &s.model) {
        (EstimatorSpec::Type1 { .. }, Some(model)) => Some(inverse(&model.c)?),
        _ => None,
    };

    let mut noise = match s.noise {
        NoiseSpec::Off => None,
        NoiseSpec::GaussianTruncated { variance, bound, seed } => Some((NoiseStream::new(seed), variance, bound)),
    };

    // Joint ODE state [x; x̂̄; xr].
    let mut z: Vec<f64> = s.x0.clone();
    if let EstimatorSpec::Eso { xhat0, .. } = &s.estimator {
        z.extend_from_slice(xhat0);
    }
    if let Some(r) = &s.reference {
        z.extend_from_slice(&r.xr);
    }
    let mut memory = match &s.estimator {
        EstimatorSpec::Type1 { tau, .. } => Memory::Type1 {
            bank: Type1Estimator::new(*tau, &vec![0.0; n])?,
            output: None,
        },
        _ => Memory::None,
    };
    let mut b1 = match &s.controller {
        ControllerSpec::B1 { tau, .. } => Some(B1State::new(*tau, s.x0[1])?),
        _ => None,
    };

    let steps = s.steps();
    let mut rows = Vec::with_capacity(steps + 1);
    let mut u_prev = vec![0.0; m];

    for step in 0..=steps {
        let t = s.t0 + step as f64 * s.dt;
        let x = z[..n].to_vec();
        let v0: Vec<f64> = match &mut noise {
            Some((stream, variance, bound)) => (0..l).map(|_| stream.gaussian_truncated(*variance, *bound)).collect(),
            None => vec![0.0; l],
        };
        let y = plant.output(t, &x, &u_prev, &v0);

        // Estimates at the step start.
        let (xhat, what) = match (&s.estimator, &mut memory) {
            (EstimatorSpec::Eso { .. }, _) => (z[n..2 * n].to_vec(), z[2 * n..n + dim_eso].to_vec()),
            (EstimatorSpec::Type1 { tau, output_tau }, Memory::Type1 { bank, output }) => {
                let model = s.model.as_ref().expect("validated");
                let corrected: Vec<f64> = y.iter().zip(model.d.matvec(&u_prev)).map(|(a, b)| a - b).collect();
                let filtered = match output_tau {
                    Some(ty) => {
                        let filters = output
                            .get_or_insert_with(|| corrected.iter().map(|&c| LowPass { tau: *ty, z: c }).collect());
                        filters.iter().map(|f| f.z).collect()
                    }
                    None => corrected,
                };
                let xhat = c_inv.as_ref().expect("validated").matvec(&filtered);
                if step == 0 {
                    *bank = Type1Estimator::new(*tau, &xhat)?;
                }
                let gw = bank.estimate(&xhat);
                (xhat, gamma_pinv.as_ref().expect("validated").matvec(&gw))
            }
            _ => (Vec::new(), Vec::new()),
        };

        let u: Vec<f64> = match &s.controller {
            ControllerSpec::A { k1, k2, umax } => vec![controller_a(y[0], y[1], *k1, *k2, *umax)],
            ControllerSpec::B1 { gains, .. } => {
                let state = b1.as_ref().expect("initialized");
                let (_, raw) = state.raw_control(y[0], y[1], gains);
                vec![raw.clamp(-gains.umax, gains.umax)]
            }
            ControllerSpec::B2 { gains } => vec![controller_b2(y[0], y[1], what[0], gains)],
            ControllerSpec::Ls { umax, .. } => {
                let model = s.model.as_ref().expect("validated");
                let (fr, xr) = match &s.reference {
                    Some(r) => {
                        let xr = z[n + dim_eso..].to_vec();
                        (r.derivative(t, &xr), xr)
                    }
                    None => (vec![0.0; n], vec![0.0; n]),
                };
                let xh = if xhat.is_empty() { y.clone() } else { xhat.clone() };
                let wh = if what.is_empty() {
                    vec![0.0; model.k()]
                } else {
                    what.clone()
                };
                let raw = ls_control(model, law.as_ref().expect("validated"), &fr, &xh, &wh, &xr)?;
                match umax {
                    Some(lim) => raw.iter().map(|v| v.clamp(-lim, *lim)).collect(),
                    None => raw,
                }
            }
        };

        let w_true = match &s.model {
            Some(model) => lumped_disturbance(plant, model, t, &x, &u)?,
            None => Vec::new(),
        };
        rows.push(TraceRow {
            t,
            x: x.clone(),
            xhat: if layout.estimates { xhat.clone() } else { Vec::new() },
            what: if layout.estimates { what.clone() } else { Vec::new() },
            u: u.clone(),
            y: y.clone(),
            w_true,
        });
        if step == steps {
            break;
        }

        let rhs = |tau: f64, state: &[f64]| -> Result<Vec<f64>> {
            let xs = &state[..n];
            let mut d = plant_derivative(plant, tau, xs, &u)?;
            if let (Some(e), Some(g)) = (&ext, &eso_gain) {
                let ys = plant.output(tau, xs, &u, &v0);
                d.extend(eso_derivative(e, g, &state[n..n + dim_eso], &u, &ys));
            }
            if let Some(r) = &s.reference {
                d.extend(r.derivative(tau, &state[n + dim_eso..n + dim_eso + dim_ref]));
            }
            Ok(d)
        };
        z = match rk4_step(rhs, t, &z, s.dt) {
            Ok(next) => next,
            Err(error) => {
                return Err(RunError::BlowUp {
                    error,
                    partial: SimulationTrace { layout, dt: s.dt, rows },
                })
            }
        };

        if let Memory::Type1 { bank, output } = &mut memory {
            let model = s.model.as_ref().expect("validated");
            *bank = bank.clone().step(model, &xhat, &u, s.dt);
            if let Some(filters) = output {
                let corrected: Vec<f64> = y.iter().zip(model.d.matvec(&u_prev)).map(|(a, b)| a - b).collect();
                for (f, c) in filters.iter_mut().zip(corrected) {
                    *f = f.step(c, s.dt).0;
                }
            }
        }
        if let (Some(state), ControllerSpec::B1 { gains, .. }) = (&mut b1, &s.controller) {
            *state = crate::estimation::controller_b1_step(*state, y[0], y[1], gains, s.dt).0;
        }
        u_prev = u;
    }
    Ok(SimulationTrace { layout, dt: s.dt, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub iae: f64,
    pub iv: f64,
}

impl Metrics {
    /// `iae=` and `iv=` lines.
    pub fn report(&self) -> String {
        format!("iae={}\niv={}\n", self.iae, self.iv)
    }
}

/// IAE of state `state_index` against `reference` (left rectangle rule)
/// and IV of the control summed over channels, over the whole trace.
pub fn metrics(trace: &SimulationTrace, state_index: usize, reference: f64) -> Metrics {
    metrics_window(trace, state_index, reference, f64::NEG_INFINITY, f64::INFINITY)
}

/// As [`metrics`], restricted to records with `from ≤ t ≤ to`.
pub fn metrics_window(trace: &SimulationTrace, state_index: usize, reference: f64, from: f64, to: f64) -> Metrics {
    let rows: Vec<&TraceRow> = trace.rows.iter().filter(|r| r.t >= from && r.t <= to).collect();
    let iae = rows
        .iter()
        .take(rows.len().saturating_sub(1))
        .fold(0.0, |acc, r| acc + (r.x[state_index] - reference).abs() * trace.dt);
    let iv = rows.windows(2).fold(0.0, |acc, w| {
        acc + w[0].u.iter().zip(&w[1].u).fold(0.0, |s, (a, b)| s + (b - a).abs())
    });
    Metrics { iae, iv }
}

/// Parameters shared by the pendulum scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumSetup {
    pub k1: f64,
    pub k2: f64,
    pub umax: f64,
    pub tau: f64,
    pub eso_poles: [f64; 3],
    pub x0: [f64; 2],
    pub t0: f64,
    pub tf: f64,
    pub dt: f64,
    pub disturbance_onset: f64,
}

impl Default for PendulumSetup {
    fn default() -> Self {
        Self {
            k1: 2.0,
            k2: 2.0,
            umax: 5.0,
            tau: 0.05,
            eso_poles: [-20.0, -20.0, -40.0],
            x0: PendulumPlant::initial_state(),
            t0: 0.0,
            tf: 20.0,
            dt: 1e-3,
            disturbance_onset: 10.0,
        }
    }
}

impl PendulumSetup {
    fn base(
        &self,
        model: Option<NominalLinearModel>,
        estimator: EstimatorSpec,
        controller: ControllerSpec,
    ) -> Scenario {
        Scenario {
            plant: PlantSpec::Pendulum {
                disturbance_onset: self.disturbance_onset,
            },
            model,
            estimator,
            controller,
            reference: None,
            x0: self.x0.to_vec(),
            t0: self.t0,
            tf: self.tf,
            dt: self.dt,
            noise: NoiseSpec::Off,
        }
    }

    fn gains(&self, alpha: f64) -> PendulumGains {
        PendulumGains {
            k1: self.k1,
            k2: self.k2,
            alpha,
            umax: self.umax,
        }
    }

    pub fn controller_a(&self) -> Scenario {
        self.base(
            None,
            EstimatorSpec::None,
            ControllerSpec::A {
                k1: self.k1,
                k2: self.k2,
                umax: self.umax,
            },
        )
    }

    pub fn controller_b1(&self, alpha: f64) -> Result<Scenario> {
        Ok(self.base(
            Some(NominalLinearModel::pendulum_fictitious(alpha)?),
            EstimatorSpec::Type1 {
                tau: self.tau,
                output_tau: None,
            },
            ControllerSpec::B1 {
                gains: self.gains(alpha),
                tau: self.tau,
            },
        ))
    }

    pub fn controller_b2(&self, alpha: f64) -> Result<Scenario> {
        let model = NominalLinearModel::pendulum_fictitious(alpha)?;
        let [p1, p2, p3] = self.eso_poles;
        let gain = pendulum_eso_gain(p1, [p2, p3])?;
        Ok(self.base(
            Some(model),
            EstimatorSpec::Eso {
                gain: gain.matrix().clone(),
                xhat0: vec![0.0; 3],
            },
            ControllerSpec::B2 {
                gains: self.gains(alpha),
            },
        ))
    }
}

/// Parameters of the first-order tracking example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderSetup {
    pub k: f64,
    pub umax: f64,
    pub x0: f64,
    pub xhat0: [f64; 2],
    pub xr0: f64,
    pub t0: f64,
    pub tf: f64,
    pub dt: f64,
    pub noise: NoiseSpec,
}

impl Default for FirstOrderSetup {
    fn default() -> Self {
        Self {
            k: 1.5,
            umax: 5.0,
            x0: 0.0,
            xhat0: [0.0, 0.0],
            xr0: 0.0,
            t0: 0.0,
            tf: 15.0,
            dt: 1e-3,
            noise: NoiseSpec::Off,
        }
    }
}

impl FirstOrderSetup {
    /// Noise matching the example: variance 0.01 truncated to ±0.1.
    pub fn benchmark_noise(seed: u64) -> NoiseSpec {
        NoiseSpec::GaussianTruncated {
            variance: 0.01,
            bound: FirstOrderPlant::NOISE_BOUND,
            seed,
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let gain = example1_gain(self.k)?;
        Ok(Scenario {
            plant: PlantSpec::FirstOrder,
            model: Some(NominalLinearModel::first_order_example()),
            estimator: EstimatorSpec::Eso {
                gain: gain.matrix().clone(),
                xhat0: self.xhat0.to_vec(),
            },
            controller: ControllerSpec::Ls {
                k: RealMatrix::scalar(-self.k),
                umax: Some(self.umax),
            },
            reference: Some(ReferenceModel::first_order_step(self.k, self.xr0)),
            x0: vec![self.x0],
            t0: self.t0,
            tf: self.tf,
            dt: self.dt,
            noise: self.noise,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub b1: Metrics,
    pub b2: Metrics,
}

/// Metrics of `x₂` (reference 0) for both filter-based and observer-based
/// pendulum controllers at every α, evaluated concurrently.
pub fn alpha_sweep(setup: &PendulumSetup, alphas: &[f64]) -> std::result::Result<Vec<AlphaPoint>, RunError> {
    for &a in alphas {
        if !(a > 0.0 && a <= 1.0) {
            return Err(RunError::Invalid(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1], got {a}"
            ))));
        }
    }
    let point = |alpha: f64| -> std::result::Result<AlphaPoint, RunError> {
        let b1 = run_closed_loop(&setup.controller_b1(alpha)?)?;
        let b2 = run_closed_loop(&setup.controller_b2(alpha)?)?;
        Ok(AlphaPoint {
            alpha,
            b1: metrics(&b1, 1, 0.0),
            b2: metrics(&b2, 1, 0.0),
        })
    };
    std::thread::scope(|scope| {
        let handles: Vec<_> = alphas.iter().map(|&a| scope.spawn(move || point(a))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    })
}

/// `alpha,iae_b1,iv_b1,iae_b2,iv_b2` table.
pub fn alpha_table(points: &[AlphaPoint]) -> String {
    let mut out = String::from("alpha,iae_b1,iv_b1,iae_b2,iv_b2\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{}", p.alpha, p.b1.iae, p.b1.iv, p.b2.iae, p.b2.iv);
    }
    out
}
