//! Scenario configuration files and the built-in benchmark scenarios.
//!
//! A configuration is a TOML document with the flat sections `plant`,
//! `model`, `estimator`, `controller`, `reference`, `sim`, `noise` and
//! `bounds`. Unknown keys are rejected. Matrices are written as arrays of
//! rows.

use serde::{Deserialize, Serialize};

use crate::control::{ErrorLaw, ReferenceInput, ReferenceModel};
use crate::error::{Error, Result};
use crate::estimation::{example1_gain, pendulum_eso_gain, ObserverGain, PendulumGains};
use crate::matrix::RealMatrix;
use crate::model::{build_extended, FirstOrderPlant, ModelChecks, NominalLinearModel, PendulumPlant};
use crate::sim::{ControllerSpec, EstimatorSpec, FirstOrderSetup, NoiseSpec, PendulumSetup, PlantSpec, Scenario};
use crate::stability::{CertificateInputs, DeltaMode, LipschitzBounds};

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub plant: PlantSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default)]
    pub estimator: EstimatorSection,
    pub controller: ControllerSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSection>,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
}

/// `kind = "first-order" | "pendulum"`; `disturbance_onset` defaults to 10 s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance_onset: Option<f64>,
}

/// Either a `preset` (`first-order`, or `pendulum` with `alpha`) or explicit
/// matrices `a`, `b`, `c`, `gamma` with optional `d` and `pi`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Rows>,
}

/// `kind = "none" | "eso" | "type1"`.
///
/// The observer gain is given as `gain`, or derived from `poles`
/// (pendulum, three poles) or from `k` (first-order example). `xhat0`
/// defaults to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xhat0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_tau: Option<f64>,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        Self {
            kind: "none".into(),
            gain: None,
            poles: None,
            k: None,
            xhat0: None,
            tau: None,
            output_tau: None,
        }
    }
}

/// `kind = "a" | "b1" | "b2" | "ls"`. Pendulum controllers default to
/// `k1 = k2 = 2`, `umax = 5`, `tau = 0.05`; `ls` takes the error gain as
/// `gain` and an optional `umax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub umax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<Rows>,
}

/// `ẋr = ar·xr + br·ur` with `ur` a step of `step` at `step_at` (zero when
/// `step` is omitted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    pub ar: Rows,
    pub br: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_at: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xr0: Option<Vec<f64>>,
}

/// Horizon defaults: `t0 = 0`, `dt = 1e-3`, `tf` 15 s for the first-order
/// plant and 20 s for the pendulum; `x0` defaults to the plant's benchmark
/// initial state.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

/// `kind = "off" | "gaussian-truncated"` with `variance`, `bound`, `seed`
/// (defaults 0.01, 0.1, 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            kind: "off".into(),
            variance: None,
            bound: None,
            seed: None,
        }
    }
}

/// Certificate constants; every omitted constant is zero. `delta` is
/// `signed` (default) or `rectified`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
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
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
}

impl BoundsSection {
    pub fn lipschitz(&self) -> LipschitzBounds {
        LipschitzBounds {
            l_w: self.l_w,
            l_w_x: self.l_w_x,
            l_w_u: self.l_w_u,
            l_w_w0: self.l_w_w0,
            l_dw: self.l_dw,
            l_dw_x: self.l_dw_x,
            l_dw_u: self.l_dw_u,
            l_dw_w0: self.l_dw_w0,
            l_v: self.l_v,
            l_v_x: self.l_v_x,
            l_v_u: self.l_v_u,
            l_v_v0: self.l_v_v0,
            c_xr: self.c_xr,
            c_xr_dot: self.c_xr_dot,
            c_w0: self.c_w0,
            c_w0_dot: self.c_w0_dot,
            c_v0: self.c_v0,
            c_u: self.c_u,
            l_h: self.l_h,
        }
    }
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn matrix(rows: &Rows, what: &str) -> Result<RealMatrix> {
    RealMatrix::from_rows(rows).map_err(|e| cfg(format!("{what}: {e}")))
}

fn required<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| cfg(format!("missing key {what}")))
}

/// Parses configuration text; syntax errors carry line and column.
pub fn parse(text: &str) -> Result<ScenarioConfig> {
    toml::from_str(text).map_err(|e| cfg(e.to_string()))
}

impl ScenarioConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn plant_spec(&self) -> Result<PlantSpec> {
        match self.plant.kind.as_str() {
            "first-order" => {
                if self.plant.disturbance_onset.is_some() {
                    return Err(cfg("[plant] disturbance_onset applies to the pendulum only"));
                }
                Ok(PlantSpec::FirstOrder)
            }
            "pendulum" => Ok(PlantSpec::Pendulum {
                disturbance_onset: self.plant.disturbance_onset.unwrap_or(10.0),
            }),
            other => Err(cfg(format!("[plant] unknown kind '{other}'"))),
        }
    }

    fn nominal(&self) -> Result<Option<NominalLinearModel>> {
        let Some(m) = &self.model else { return Ok(None) };
        let explicit = [&m.a, &m.b, &m.c, &m.d, &m.gamma, &m.pi].iter().any(|x| x.is_some());
        match m.preset.as_deref() {
            Some(_) if explicit => Err(cfg("[model] use either preset or explicit matrices")),
            Some("first-order") => Ok(Some(NominalLinearModel::first_order_example())),
            Some("pendulum") => Ok(Some(NominalLinearModel::pendulum_fictitious(*required(
                &m.alpha,
                "[model] alpha",
            )?)?)),
            Some(other) => Err(cfg(format!("[model] unknown preset '{other}'"))),
            None => {
                if m.alpha.is_some() {
                    return Err(cfg("[model] alpha needs preset = \"pendulum\""));
                }
                let opt = |x: &Option<Rows>, what: &str| x.as_ref().map(|r| matrix(r, what)).transpose();
                Ok(Some(NominalLinearModel::new(
                    matrix(required(&m.a, "[model] a")?, "[model] a")?,
                    matrix(required(&m.b, "[model] b")?, "[model] b")?,
                    matrix(required(&m.c, "[model] c")?, "[model] c")?,
                    opt(&m.d, "[model] d")?,
                    matrix(required(&m.gamma, "[model] gamma")?, "[model] gamma")?,
                    opt(&m.pi, "[model] pi")?,
                    ModelChecks::Strict,
                )?))
            }
        }
    }

    fn estimator_spec(&self, model: Option<&NominalLinearModel>) -> Result<EstimatorSpec> {
        let e = &self.estimator;
        match e.kind.as_str() {
            "none" => Ok(EstimatorSpec::None),
            "eso" => {
                let model = model.ok_or_else(|| cfg("[estimator] eso needs a [model] section"))?;
                let sources = [e.gain.is_some(), e.poles.is_some(), e.k.is_some()];
                if sources.iter().filter(|s| **s).count() != 1 {
                    return Err(cfg("[estimator] give exactly one of gain, poles, k"));
                }
                let gain = if let Some(g) = &e.gain {
                    matrix(g, "[estimator] gain")?
                } else if let Some(p) = &e.poles {
                    let [p1, p2, p3] = p[..] else {
                        return Err(cfg("[estimator] poles needs three entries"));
                    };
                    pendulum_eso_gain(p1, [p2, p3])?.matrix().clone()
                } else {
                    example1_gain(e.k.expect("checked"))?.matrix().clone()
                };
                let dim = model.n() + model.k();
                Ok(EstimatorSpec::Eso {
                    gain,
                    xhat0: e.xhat0.clone().unwrap_or_else(|| vec![0.0; dim]),
                })
            }
            "type1" => Ok(EstimatorSpec::Type1 {
                tau: *required(&e.tau, "[estimator] tau")?,
                output_tau: e.output_tau,
            }),
            other => Err(cfg(format!("[estimator] unknown kind '{other}'"))),
        }
    }

    fn controller_spec(&self) -> Result<ControllerSpec> {
        let c = &self.controller;
        let gains = || PendulumGains {
            k1: c.k1.unwrap_or(2.0),
            k2: c.k2.unwrap_or(2.0),
            alpha: c.alpha.unwrap_or(0.1),
            umax: c.umax.unwrap_or(5.0),
        };
        match c.kind.as_str() {
            "a" => Ok(ControllerSpec::A {
                k1: c.k1.unwrap_or(2.0),
                k2: c.k2.unwrap_or(2.0),
                umax: c.umax.unwrap_or(5.0),
            }),
            "b1" => Ok(ControllerSpec::B1 {
                gains: gains(),
                tau: c.tau.unwrap_or(0.05),
            }),
            "b2" => Ok(ControllerSpec::B2 { gains: gains() }),
            "ls" => Ok(ControllerSpec::Ls {
                k: matrix(required(&c.gain, "[controller] gain")?, "[controller] gain")?,
                umax: c.umax,
            }),
            other => Err(cfg(format!("[controller] unknown kind '{other}'"))),
        }
    }

    fn reference_model(&self) -> Result<Option<ReferenceModel>> {
        let Some(r) = &self.reference else { return Ok(None) };
        let ar = matrix(&r.ar, "[reference] ar")?;
        let br = matrix(&r.br, "[reference] br")?;
        let input = match &r.step {
            Some(amplitude) => ReferenceInput::Step {
                amplitude: amplitude.clone(),
                at: r.step_at.unwrap_or(0.0),
            },
            None => ReferenceInput::Zero,
        };
        let n = ar.rows();
        Ok(Some(ReferenceModel::new(
            ar,
            br,
            input,
            r.xr0.clone().unwrap_or_else(|| vec![0.0; n]),
        )?))
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let plant = self.plant_spec()?;
        let model = self.nominal()?;
        let (default_tf, default_x0) = match plant {
            PlantSpec::FirstOrder => (15.0, vec![0.0]),
            PlantSpec::Pendulum { .. } => (20.0, PendulumPlant::initial_state().to_vec()),
        };
        let noise = match self.noise.kind.as_str() {
            "off" => NoiseSpec::Off,
            "gaussian-truncated" => NoiseSpec::GaussianTruncated {
                variance: self.noise.variance.unwrap_or(0.01),
                bound: self.noise.bound.unwrap_or(FirstOrderPlant::NOISE_BOUND),
                seed: self.noise.seed.unwrap_or(0),
            },
            other => return Err(cfg(format!("[noise] unknown kind '{other}'"))),
        };
        let scenario = Scenario {
            plant,
            estimator: self.estimator_spec(model.as_ref())?,
            controller: self.controller_spec()?,
            reference: self.reference_model()?,
            model,
            x0: self.sim.x0.clone().unwrap_or(default_x0),
            t0: self.sim.t0.unwrap_or(0.0),
            tf: self.sim.tf.unwrap_or(default_tf),
            dt: self.sim.dt.unwrap_or(1e-3),
            noise,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Explicit configuration reproducing `s` exactly.
    pub fn from_scenario(s: &Scenario) -> Self {
        let rows = |m: &RealMatrix| m.to_rows();
        let plant = match s.plant {
            PlantSpec::FirstOrder => PlantSection {
                kind: "first-order".into(),
                disturbance_onset: None,
            },
            PlantSpec::Pendulum { disturbance_onset } => PlantSection {
                kind: "pendulum".into(),
                disturbance_onset: Some(disturbance_onset),
            },
        };
        let model = s.model.as_ref().map(|m| ModelSection {
            a: Some(rows(&m.a)),
            b: Some(rows(&m.b)),
            c: Some(rows(&m.c)),
            d: Some(rows(&m.d)),
            gamma: Some(rows(&m.gamma)),
            pi: Some(rows(&m.pi)),
            ..Default::default()
        });
        let estimator = match &s.estimator {
            EstimatorSpec::None => EstimatorSection::default(),
            EstimatorSpec::Eso { gain, xhat0 } => EstimatorSection {
                kind: "eso".into(),
                gain: Some(rows(gain)),
                xhat0: Some(xhat0.clone()),
                ..Default::default()
            },
            EstimatorSpec::Type1 { tau, output_tau } => EstimatorSection {
                kind: "type1".into(),
                tau: Some(*tau),
                output_tau: *output_tau,
                ..Default::default()
            },
        };
        let blank = ControllerSection {
            kind: String::new(),
            k1: None,
            k2: None,
            alpha: None,
            umax: None,
            tau: None,
            gain: None,
        };
        let controller = match &s.controller {
            ControllerSpec::A { k1, k2, umax } => ControllerSection {
                kind: "a".into(),
                k1: Some(*k1),
                k2: Some(*k2),
                umax: Some(*umax),
                ..blank
            },
            ControllerSpec::B1 { gains, tau } => ControllerSection {
                kind: "b1".into(),
                k1: Some(gains.k1),
                k2: Some(gains.k2),
                alpha: Some(gains.alpha),
                umax: Some(gains.umax),
                tau: Some(*tau),
                ..blank
            },
            ControllerSpec::B2 { gains } => ControllerSection {
                kind: "b2".into(),
                k1: Some(gains.k1),
                k2: Some(gains.k2),
                alpha: Some(gains.alpha),
                umax: Some(gains.umax),
                ..blank
            },
            ControllerSpec::Ls { k, umax } => ControllerSection {
                kind: "ls".into(),
                gain: Some(rows(k)),
                umax: *umax,
                ..blank
            },
        };
        let reference = s.reference.as_ref().map(|r| {
            let (step, step_at) = match &r.input {
                ReferenceInput::Zero => (None, None),
                ReferenceInput::Step { amplitude, at } => (Some(amplitude.clone()), Some(*at)),
            };
            ReferenceSection {
                ar: rows(&r.ar),
                br: rows(&r.br),
                step,
                step_at,
                xr0: Some(r.xr.clone()),
            }
        });
        let noise = match s.noise {
            NoiseSpec::Off => NoiseSection::default(),
            NoiseSpec::GaussianTruncated { variance, bound, seed } => NoiseSection {
                kind: "gaussian-truncated".into(),
                variance: Some(variance),
                bound: Some(bound),
                seed: Some(seed),
            },
        };
        Self {
            plant,
            model,
            estimator,
            controller,
            reference,
            sim: SimSection {
                t0: Some(s.t0),
                tf: Some(s.tf),
                dt: Some(s.dt),
                x0: Some(s.x0.clone()),
            },
            noise,
            bounds: None,
        }
    }

    /// Certificate inputs of an LS + ESO scenario carrying a `[bounds]` section.
    pub fn certificate_inputs(&self) -> Result<CertificateInputs> {
        let scenario = self.to_scenario()?;
        let bounds = self
            .bounds
            .as_ref()
            .ok_or_else(|| cfg("certification needs a [bounds] section"))?;
        let model = scenario
            .model
            .clone()
            .ok_or_else(|| cfg("certification needs a [model] section"))?;
        let ControllerSpec::Ls { k, .. } = &scenario.controller else {
            return Err(cfg("certification needs controller kind = \"ls\""));
        };
        let EstimatorSpec::Eso { gain, .. } = &scenario.estimator else {
            return Err(cfg("certification needs estimator kind = \"eso\""));
        };
        let delta = match bounds.delta.as_deref() {
            None | Some("signed") => DeltaMode::Signed,
            Some("rectified") => DeltaMode::Rectified,
            Some(other) => return Err(cfg(format!("[bounds] unknown delta mode '{other}'"))),
        };
        let ext = build_extended(&model)?;
        Ok(CertificateInputs {
            gain: ObserverGain::new(&ext, gain.clone())?,
            law: ErrorLaw::new(k.clone())?,
            model,
            bounds: bounds.lipschitz(),
            delta,
        })
    }
}

pub const BUILTIN_NAMES: [&str; 5] = ["example1", "example1-noisy", "pendulum-a", "pendulum-b1", "pendulum-b2"];

/// Built-in benchmark scenarios with their fixed parameters.
pub fn builtin(name: &str) -> Result<Scenario> {
    let pendulum = PendulumSetup::default();
    match name {
        "example1" => FirstOrderSetup::default().scenario(),
        "example1-noisy" => FirstOrderSetup {
            noise: FirstOrderSetup::benchmark_noise(1),
            ..Default::default()
        }
        .scenario(),
        "pendulum-a" => Ok(pendulum.controller_a()),
        "pendulum-b1" => pendulum.controller_b1(0.1),
        "pendulum-b2" => pendulum.controller_b2(0.1),
        other => Err(cfg(format!(
            "unknown builtin '{other}' (known: {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::run_closed_loop;

    #[test]
    fn builtins_round_trip_through_text() {
        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap();
            let text = ScenarioConfig::from_scenario(&s).to_toml();
            let back = parse(&text).unwrap().to_scenario().unwrap();
            assert_eq!(back, s, "{name}\n{text}");
        }
    }

    #[test]
    fn round_trip_trace_is_bit_identical() {
        let mut s = builtin("pendulum-b2").unwrap();
        s.tf = 0.5;
        let back = parse(&ScenarioConfig::from_scenario(&s).to_toml())
            .unwrap()
            .to_scenario()
            .unwrap();
        let a = run_closed_loop(&s).unwrap();
        let b = run_closed_loop(&back).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn shortcuts_and_defaults() {
        let text = r#"
            # filter-free observer-based pendulum control
            [plant]
            kind = "pendulum"

            [model]
            preset = "pendulum"
            alpha = 0.1

            [estimator]
            kind = "eso"
            poles = [-20.0, -20.0, -40.0]

            [controller]
            kind = "b2"
            alpha = 0.1
        "#;
        assert_eq!(
            parse(text).unwrap().to_scenario().unwrap(),
            builtin("pendulum-b2").unwrap()
        );

        let text = r#"
            [plant]
            kind = "first-order"
            [model]
            preset = "first-order"
            [estimator]
            kind = "eso"
            k = 1.5
            [controller]
            kind = "ls"
            gain = [[-1.5]]
            umax = 5.0
            [reference]
            ar = [[-1.5]]
            br = [[1.5]]
            step = [1.0]
        "#;
        assert_eq!(
            parse(text).unwrap().to_scenario().unwrap(),
            builtin("example1").unwrap()
        );
    }

    #[test]
    fn errors_carry_context() {
        let err = parse("[plant]\nkind = \"pendulum\"\nbogus = 1\n[controller]\nkind = \"a\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");

        let err = parse("[plant]\nkind = \"pendulum\"\n[controller]\nkind = \"zz\"\n")
            .unwrap()
            .to_scenario()
            .unwrap_err();
        assert!(err.to_string().contains("[controller]"));

        assert!(builtin("no-such-scenario").is_err());
        let bad_alpha =
            "[plant]\nkind = \"pendulum\"\n[model]\npreset = \"pendulum\"\nalpha = 2.0\n[controller]\nkind = \"a\"\n";
        assert!(parse(bad_alpha).unwrap().to_scenario().is_err());
    }

    #[test]
    fn certificate_inputs_from_config() {
        let mut c = ScenarioConfig::from_scenario(&builtin("example1").unwrap());
        assert!(c.certificate_inputs().is_err());
        let b = LipschitzBounds::first_order_example(1.5);
        c.bounds = Some(BoundsSection {
            l_w_x: b.l_w_x,
            l_w_u: b.l_w_u,
            l_w_w0: b.l_w_w0,
            l_dw_x: b.l_dw_x,
            l_dw_u: b.l_dw_u,
            l_dw_w0: b.l_dw_w0,
            l_v_v0: b.l_v_v0,
            c_xr: b.c_xr,
            c_xr_dot: b.c_xr_dot,
            c_w0: b.c_w0,
            c_w0_dot: b.c_w0_dot,
            c_v0: b.c_v0,
            c_u: b.c_u,
            ..Default::default()
        });
        let parsed = parse(&c.to_toml()).unwrap();
        assert_eq!(
            parsed.certificate_inputs().unwrap(),
            CertificateInputs::first_order_example(1.5).unwrap()
        );
    }
}
