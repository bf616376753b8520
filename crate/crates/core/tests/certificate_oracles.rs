use nalgebra::{DMatrix, DVector};
use ofb_core::estimation::{example1_gain, ObserverGain};
use ofb_core::model::{build_extended, ModelChecks, NominalLinearModel};
use ofb_core::sim::{run_closed_loop, FirstOrderSetup};
use ofb_core::stability::{
    betas, check_theorem2, lemma1_bound, theorem1_xi_factor, ultimate_bound, CertificateInputs, LipschitzBounds,
};
use ofb_core::RealMatrix;
use proptest::prelude::*;

fn to_na(x: &RealMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(x.rows(), x.cols(), x.as_slice())
}

fn spectral(x: &DMatrix<f64>) -> f64 {
    x.clone().svd(false, false).singular_values.max()
}

/// `AᵀP + PA = −2Q` through the column-major Kronecker form.
fn kron_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let at = a.transpose();
    let id = DMatrix::<f64>::identity(d, d);
    let op = id.kronecker(&at) + at.kronecker(&id);
    let rhs = DVector::from_column_slice((q * -2.0).as_slice());
    DMatrix::from_column_slice(d, d, op.lu().solve(&rhs).unwrap().as_slice())
}

/// Two-state model with an unmatched disturbance channel and an observer
/// gain that is Hurwitz by construction.
fn unmatched_case(a: [f64; 4], b2: f64, g1: f64, decay: f64, coupling: f64) -> (NominalLinearModel, ObserverGain) {
    let am = RealMatrix::new(2, 2, a.to_vec()).unwrap();
    let m = NominalLinearModel::new(
        am.clone(),
        RealMatrix::column(&[1.0, b2]),
        RealMatrix::identity(2),
        None,
        RealMatrix::column(&[g1, 1.0]),
        None,
        ModelChecks::ShapesOnly,
    )
    .unwrap();
    let ext = build_extended(&m).unwrap();
    let l = RealMatrix::from_rows(&[vec![a[0] + decay, a[1]], vec![a[2], a[3] + decay], vec![0.0, coupling]]).unwrap();
    (m, ObserverGain::new(&ext, l).unwrap())
}

fn bounds_from(v: &[f64]) -> LipschitzBounds {
    LipschitzBounds {
        l_w_x: v[0],
        l_w_u: v[1],
        l_dw_x: v[2],
        l_dw_u: v[3],
        l_v_x: v[4],
        l_v_u: v[5],
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn betas_match_independent_recomputation(
        a in proptest::array::uniform4(-2.0..2.0f64),
        b2 in -2.0..2.0f64,
        g1 in -2.0..2.0f64,
        decay in 0.5..3.0f64,
        coupling in 0.5..5.0f64,
        consts in proptest::collection::vec(0.0..1.0f64, 6),
    ) {
        let (m, gain) = unmatched_case(a, b2, g1, decay, coupling);
        let bounds = bounds_from(&consts);
        let (b0, b1, b2v) = betas(&m, &gain, &bounds).unwrap();

        let b = to_na(&m.b);
        let g = to_na(&m.gamma);
        let bp = b.clone().pseudo_inverse(1e-14).unwrap();
        let btilde = DMatrix::<f64>::identity(2, 2) - &b * &bp;
        let l_pi = spectral(&(to_na(gain.matrix()) * to_na(&m.pi)));
        let o0 = bounds.l_dw_x * spectral(&g) + bounds.l_dw_u * spectral(&(&bp * &g)) + spectral(&(&btilde * &g));
        let o1 = bounds.l_v_x * l_pi + bounds.l_w_x * o0;
        let o2 = bounds.l_v_u * l_pi + bounds.l_dw_x * spectral(&b) + bounds.l_w_u * o0;
        for (x, y) in [(b0, o0), (b1, o1), (b2v, o2)] {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()), "{x} vs {y}");
        }
        // The unmatched part of Γ is what keeps β₀ away from the matched value.
        prop_assert!(o0 >= spectral(&(&btilde * &g)));
    }
}

fn first_order_c_wdot(b: &LipschitzBounds) -> f64 {
    b.l_dw + b.l_dw_w0 * b.c_w0_dot + b.l_dw_x * b.c_xr_dot
}

#[test]
fn observer_bound_matches_kronecker_oracle() {
    let k = 1.5;
    let ext = build_extended(&NominalLinearModel::first_order_example()).unwrap();
    let gain = example1_gain(k).unwrap();
    let atilde = gain.atilde(&ext);
    let q = RealMatrix::identity(2);
    let b = LipschitzBounds::first_order_example(k);
    let c_wdot = first_order_c_wdot(&b);
    let c_v = 0.1;
    let got = lemma1_bound(&atilde, &q, gain.matrix(), &ext.pi, c_wdot, c_v).unwrap();

    let p = kron_lyapunov(&to_na(&atilde), &to_na(&q));
    let q_min = to_na(&q).svd(false, false).singular_values.min();
    let l_pi = spectral(&(to_na(gain.matrix()) * to_na(&ext.pi)));
    let oracle = spectral(&p) / q_min * (c_wdot + c_v * l_pi);
    assert!((got - oracle).abs() <= 1e-10 * oracle, "{got} vs {oracle}");

    let q2 = RealMatrix::diag(&[2.0, 0.5]);
    let got = lemma1_bound(&atilde, &q2, gain.matrix(), &ext.pi, c_wdot, 0.0).unwrap();
    let p2 = kron_lyapunov(&to_na(&atilde), &to_na(&q2));
    assert!((got - spectral(&p2) / 0.5 * c_wdot).abs() <= 1e-10 * got);
}

#[test]
fn tracking_factor_is_observer_bound_times_output_gain() {
    let k = 1.5;
    let m = NominalLinearModel::first_order_example();
    let ext = build_extended(&m).unwrap();
    let gain = example1_gain(k).unwrap();
    let atilde = gain.atilde(&ext);
    let q = RealMatrix::identity(2);
    let p_na = kron_lyapunov(&to_na(&atilde), &to_na(&q));
    let p = RealMatrix::new(2, 2, p_na.transpose().as_slice().to_vec()).unwrap();
    let (c_wdot, c_v, l_h) = (0.4, 0.1, 0.7);

    let got = theorem1_xi_factor(&m, l_h, gain.matrix(), &ext.pi, &p, &q, c_wdot, c_v).unwrap();
    let a_gamma = DMatrix::from_row_slice(1, 2, &[m.a[(0, 0)], m.gamma[(0, 0)]]);
    let observer = lemma1_bound(&atilde, &q, gain.matrix(), &ext.pi, c_wdot, c_v).unwrap();
    let oracle = observer * (l_h + spectral(&a_gamma));
    assert!((got - oracle).abs() <= 1e-10 * oracle, "{got} vs {oracle}");
}

#[test]
fn verdict_is_invariant_under_scaling_m() {
    for k in [1.0, 1.5, 3.0] {
        let inputs = CertificateInputs::first_order_example(k).unwrap();
        let base = check_theorem2(&inputs, None).unwrap();
        let doubled = check_theorem2(&inputs, Some(&RealMatrix::identity(3).scale(2.0))).unwrap();
        assert_eq!(base.satisfied, doubled.satisfied, "k = {k}");
        let (e1, e2) = (base.condition_min_eig.unwrap(), doubled.condition_min_eig.unwrap());
        assert!((e2 - 2.0 * e1).abs() <= 1e-9 * e1.abs().max(1.0), "k = {k}: {e1} {e2}");
        let (r1, r2) = (base.ultimate_radius.unwrap(), doubled.ultimate_radius.unwrap());
        assert!((r1 - r2).abs() <= 1e-9 * r1);
    }
}

#[test]
fn certified_first_order_loop_enters_its_radius() {
    let k = 1.5;
    let inputs = CertificateInputs::first_order_example(k).unwrap();
    let cert = check_theorem2(&inputs, None).unwrap();
    assert!(cert.satisfied);
    let radius = ultimate_bound(&cert, &inputs.model, &inputs.gain, &inputs.bounds).unwrap();
    assert_eq!(Some(radius), cert.ultimate_radius);

    let s = FirstOrderSetup {
        noise: FirstOrderSetup::benchmark_noise(5),
        ..Default::default()
    }
    .scenario()
    .unwrap();
    let trace = run_closed_loop(&s).unwrap();
    let reference = s.reference.clone().unwrap();
    let mut xr = reference.clone();
    let mut worst: f64 = 0.0;
    for (i, row) in trace.rows.iter().enumerate() {
        if i > 0 {
            xr = ofb_core::control::reference_step(&xr, row.t - trace.dt, trace.dt).unwrap();
        }
        let e = [xr.xr[0] - row.x[0], row.x[0] - row.xhat[0], row.w_true[0] - row.what[0]];
        let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm.is_finite());
        if row.t >= 5.0 {
            worst = worst.max(norm);
        }
    }
    assert!(worst <= radius, "{worst} vs {radius}");
}
