use nalgebra::{DMatrix, DVector};
use ofb_core::numkernel::{
    eigenvalues, is_hurwitz, lyapunov_residual, pinv_tall, sigma_extrema, singular_values, solve_lyapunov, sym_min_eig,
    HURWITZ_TOL,
};
use ofb_core::RealMatrix;
use proptest::prelude::*;

fn to_na(x: &RealMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(x.rows(), x.cols(), x.as_slice())
}

fn square(d: usize) -> impl Strategy<Value = RealMatrix> {
    proptest::collection::vec(-2.0..2.0f64, d * d).prop_map(move |v| RealMatrix::new(d, d, v).unwrap())
}

/// Random Hurwitz matrix: shift a random matrix left past its Frobenius norm,
/// then mix in a random skew part so the spectrum is not just a cluster.
fn hurwitz(max_dim: usize) -> impl Strategy<Value = RealMatrix> {
    (1..=max_dim)
        .prop_flat_map(|d| (square(d), square(d), 0.05..1.0f64))
        .prop_map(|(r, s, margin)| {
            let d = r.rows();
            let skew = &s - &s.transpose();
            let shift = r.frobenius_norm() + margin;
            &(&r - &RealMatrix::identity(d).scale(shift)) + &skew.scale(0.5 * shift / (1.0 + skew.frobenius_norm()))
        })
        .prop_filter("hurwitz", |h| is_hurwitz(h, HURWITZ_TOL).unwrap())
}

fn spd(d: usize) -> impl Strategy<Value = RealMatrix> {
    (square(d), 0.1..2.0f64).prop_map(move |(r, eps)| &(&r * &r.transpose()) + &RealMatrix::identity(d).scale(eps))
}

/// Column-major Kronecker form of `HᵀN + NH = −2M`, solved with nalgebra.
fn kronecker_lyapunov(h: &RealMatrix, m: &RealMatrix) -> DMatrix<f64> {
    let d = h.rows();
    let ht = to_na(h).transpose();
    let id = DMatrix::<f64>::identity(d, d);
    let op = id.kronecker(&ht) + ht.kronecker(&id);
    let rhs = DVector::from_column_slice(to_na(m).scale(-2.0).as_slice());
    let sol = op.lu().solve(&rhs).expect("oracle solve");
    DMatrix::from_column_slice(d, d, sol.as_slice())
}

fn permutation(d: usize, shift: usize) -> RealMatrix {
    let mut p = RealMatrix::zeros(d, d);
    for i in 0..d {
        p[(i, (i + shift) % d)] = 1.0;
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lyapunov_residual_and_definiteness(
        (h, m) in hurwitz(8).prop_flat_map(|h| { let d = h.rows(); (Just(h), spd(d)) })
    ) {
        let n = solve_lyapunov(&h, &m).unwrap();
        prop_assert!(lyapunov_residual(&h, &n, &m) <= 1e-9 * m.frobenius_norm());
        prop_assert!(n.max_asymmetry() == 0.0);
        prop_assert!(sym_min_eig(&n).unwrap() > 0.0);

        let oracle = kronecker_lyapunov(&h, &m);
        let scale = oracle.abs().max().max(1.0);
        prop_assert!((to_na(&n) - oracle).abs().max() <= 1e-10 * scale);
    }

    #[test]
    fn pinv_is_left_inverse_and_projector_idempotent(
        rows in 1usize..=8, cols in 1usize..=4, seed in proptest::collection::vec(-3.0..3.0f64, 32)
    ) {
        prop_assume!(cols <= rows);
        let mut data: Vec<f64> = seed.into_iter().take(rows * cols).collect();
        // Guarantee full column rank by boosting a diagonal.
        for c in 0..cols {
            data[c * cols + c] += 4.0;
        }
        let b = RealMatrix::new(rows, cols, data).unwrap();
        let bp = pinv_tall(&b).unwrap();
        let eye = &bp * &b;
        prop_assert!((&eye - &RealMatrix::identity(cols)).max_abs() <= 1e-10);
        let proj = &b * &bp;
        prop_assert!((&(&proj * &proj) - &proj).max_abs() <= 1e-10);
    }

    #[test]
    fn rayleigh_bound(s in (1usize..=6).prop_flat_map(square), v in proptest::collection::vec(-1.0..1.0f64, 6)) {
        let sym = s.symmetrized();
        let v = &v[..sym.rows()];
        let vv: f64 = v.iter().map(|x| x * x).sum();
        prop_assume!(vv > 1e-6);
        let sv = sym.matvec(v);
        let q: f64 = v.iter().zip(&sv).map(|(a, b)| a * b).sum::<f64>() / vv;
        prop_assert!(sym_min_eig(&sym).unwrap() <= q + 1e-12);
    }

    #[test]
    fn sigma_invariant_under_permutations(
        x in (1usize..=6).prop_flat_map(square), l in 0usize..6, r in 0usize..6
    ) {
        let d = x.rows();
        let pl = permutation(d, l % d);
        let pr = permutation(d, r % d);
        let (a0, b0) = sigma_extrema(&x).unwrap();
        let (a1, b1) = sigma_extrema(&(&(&pl * &x) * &pr)).unwrap();
        prop_assert!((a0 - a1).abs() <= 1e-12 * b0.max(1.0));
        prop_assert!((b0 - b1).abs() <= 1e-12 * b0.max(1.0));
        prop_assert!(0.0 <= a0 && a0 <= b0);
    }

    #[test]
    fn singular_values_match_gram_eigen_oracle(data in proptest::collection::vec(-5.0..5.0f64, 6)) {
        let x = RealMatrix::new(3, 2, data).unwrap();
        let gram = to_na(&x).transpose() * to_na(&x);
        let mut oracle: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().map(|e| e.max(0.0).sqrt()).collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let sv = singular_values(&x).unwrap();
        for (a, b) in sv.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-10 * oracle[0].max(1.0), "{sv:?} vs {oracle:?}");
        }
    }

    #[test]
    fn hurwitz_similarity_invariant(
        x in (1usize..=6).prop_flat_map(square), t in (1usize..=6).prop_flat_map(square)
    ) {
        prop_assume!(x.rows() == t.rows());
        let d = x.rows();
        let t = &t.scale(0.2) + &RealMatrix::identity(d);
        let tinv = ofb_core::numkernel::inverse(&t).unwrap();
        let y = &(&t * &x) * &tinv;
        // Skip matrices with eigenvalues near the boundary, where round-off decides.
        let margin = eigenvalues(&x).unwrap().iter().map(|e| (e.re + HURWITZ_TOL).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(margin > 1e-6);
        prop_assert_eq!(is_hurwitz(&x, HURWITZ_TOL).unwrap(), is_hurwitz(&y, HURWITZ_TOL).unwrap());
    }

    #[test]
    fn eigenvalues_match_nalgebra_oracle(x in (1usize..=8).prop_flat_map(square)) {
        let mut ours: Vec<(f64, f64)> = eigenvalues(&x).unwrap().iter().map(|c| (c.re, c.im)).collect();
        let mut theirs: Vec<(f64, f64)> =
            to_na(&x).complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
        let key = |a: &(f64, f64), b: &(f64, f64)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1));
        ours.sort_by(key);
        theirs.sort_by(key);
        prop_assert_eq!(ours.len(), theirs.len());
        // Sum and product of the spectrum are the robust comparisons.
        let tr: f64 = ours.iter().map(|e| e.0).sum();
        prop_assert!((tr - x.trace()).abs() <= 1e-9 * (1.0 + x.frobenius_norm()));
        let sum_theirs: f64 = theirs.iter().map(|e| e.0).sum();
        prop_assert!((tr - sum_theirs).abs() <= 1e-9 * (1.0 + x.frobenius_norm()));
    }
}

#[test]
fn lyapunov_companion_matches_oracle() {
    let h = RealMatrix::from_rows(&[vec![0.0, 1.0], vec![-2.0, -3.0]]).unwrap();
    let m = RealMatrix::identity(2);
    let n = solve_lyapunov(&h, &m).unwrap();
    assert!(lyapunov_residual(&h, &n, &m) < 1e-10);
    assert!((to_na(&n) - kronecker_lyapunov(&h, &m)).abs().max() < 1e-10);
}
