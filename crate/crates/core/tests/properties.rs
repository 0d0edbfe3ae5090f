mod common;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptmono::linalg::{
    hermitian_eigenvalues, partial_transpose, schmidt_coefficients, HermitianMatrix, Subsystem,
};
use ptmono::majorization::{
    apply, is_doubly_stochastic, majorizes, majorizes_with_tol, positive_part, pth_power,
    weakly_submajorizes, weakly_submajorizes_with_tol,
};
use ptmono::monotones::{
    concurrence_lower_bound, m_p, monotone_report, n_p, pure_concurrence, pure_tangle,
    tangle_lower_bound, MonotoneOrder,
};
use ptmono::states::{isotropic_m2pt, isotropic_pt_spectrum, isotropic_state, IsotropicParams};

use common::{random_density, random_hermitian, random_pure, real_vec};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn order() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), 1.0f64..6.0]
}

/// Product of random T-transforms `t·I + (1−t)·P_{ij}`.
fn random_doubly_stochastic(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..3 * n {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let t: f64 = rng.random();
        let (ri, rj) = (a[i].clone(), a[j].clone());
        for k in 0..n {
            a[i][k] = t * ri[k] + (1.0 - t) * rj[k];
            a[j][k] = t * rj[k] + (1.0 - t) * ri[k];
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>(), n in 1usize..=16) {
        let a = random_hermitian(&mut rng(seed), n);
        let spectrum = hermitian_eigenvalues(&a).unwrap();
        prop_assert!((spectrum.sum() - a.trace()).abs() <= 1e-10 * (1.0 + a.norm_max() * n as f64));
        prop_assert!(spectrum.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn three_by_three_matches_cubic_roots(seed in any::<u64>()) {
        // trigonometric roots of the characteristic polynomial of a Hermitian 3x3
        let a = random_hermitian(&mut rng(seed), 3);
        let m = a.as_matrix();
        let q = a.trace() / 3.0;
        let shifted = m - nalgebra::DMatrix::from_diagonal_element(3, 3, num_complex::Complex64::new(q, 0.0));
        let p2 = (&shifted * &shifted).trace().re / 6.0;
        let p = p2.sqrt();
        let b = &shifted / num_complex::Complex64::new(p, 0.0);
        let r = (b.determinant().re / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        let roots = [q + 2.0 * p * phi.cos(), q + 2.0 * p * (phi + 2.0 * tau).cos(), q + 2.0 * p * (phi + tau).cos()];
        let spectrum = hermitian_eigenvalues(&a).unwrap();
        for (x, y) in spectrum.values().iter().zip(roots) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + p), "{x} vs {y}");
        }
    }

    #[test]
    fn hermitian_majorization(seed in any::<u64>(), n in 2usize..=20) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, n);
        let b = random_hermitian(&mut r, n);
        let la = hermitian_eigenvalues(&a).unwrap();
        let lb = hermitian_eigenvalues(&b).unwrap();
        let lab = hermitian_eigenvalues(&a.add(&b).unwrap()).unwrap();
        let y: Vec<f64> = la.values().iter().zip(lb.values()).map(|(x, y)| x + y).collect();
        prop_assert!(majorizes_with_tol(&y, lab.values(), 1e-9).unwrap());
        let na = hermitian_eigenvalues(&a.neg()).unwrap();
        let nb = hermitian_eigenvalues(&b.neg()).unwrap();
        let nab = hermitian_eigenvalues(&a.add(&b).unwrap().neg()).unwrap();
        let y: Vec<f64> = na.values().iter().zip(nb.values()).map(|(x, y)| x + y).collect();
        prop_assert!(majorizes_with_tol(&y, nab.values(), 1e-9).unwrap());
    }

    #[test]
    fn doubly_stochastic_images_are_majorized(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let a = random_doubly_stochastic(&mut r, n);
        prop_assert!(is_doubly_stochastic(&a).unwrap());
        let y = real_vec(&mut r, n);
        let x = apply(&a, &y).unwrap();
        prop_assert!(majorizes(&y, &x).unwrap());
    }

    #[test]
    fn positive_part_and_powers_keep_weak_order(seed in any::<u64>(), n in 1usize..=10, p in order()) {
        let mut r = rng(seed);
        let y = real_vec(&mut r, n);
        let x = apply(&random_doubly_stochastic(&mut r, n), &y).unwrap();
        let (xp, yp) = (positive_part(&x), positive_part(&y));
        prop_assert!(weakly_submajorizes(&yp, &xp).unwrap());
        let (xq, yq) = (pth_power(&xp, p).unwrap(), pth_power(&yp, p).unwrap());
        let tol = 1e-9 * (1.0 + yq.iter().sum::<f64>());
        prop_assert!(weakly_submajorizes_with_tol(&yq, &xq, tol).unwrap());
    }

    #[test]
    fn triangle_and_convexity(seed in any::<u64>(), n in 2usize..=10, p in order(), alpha in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, n);
        let b = random_hermitian(&mut r, n);
        let order = MonotoneOrder::new(p).unwrap();
        let (ma, mb) = (m_p(&a, order).unwrap(), m_p(&b, order).unwrap());
        prop_assert!(m_p(&a.add(&b).unwrap(), order).unwrap() <= ma + mb + 1e-9);
        let mix = a.scale(alpha).add(&b.scale(1.0 - alpha)).unwrap();
        prop_assert!(m_p(&mix, order).unwrap() <= alpha * ma + (1.0 - alpha) * mb + 1e-9);
    }

    #[test]
    fn monotone_basics(seed in any::<u64>(), n in 1usize..=8, p in order(), c in 0.0f64..5.0) {
        let a = random_hermitian(&mut rng(seed), n);
        let order = MonotoneOrder::new(p).unwrap();
        let m = m_p(&a, order).unwrap();
        prop_assert!(m >= 0.0);
        prop_assert!((n_p(&a, order).unwrap() - m.powf(p)).abs() <= 1e-12 * (1.0 + m.powf(p)));
        prop_assert!((m_p(&a.scale(c), order).unwrap() - c * m).abs() <= 1e-9 * (1.0 + c * m));
        let report = monotone_report(&a, order).unwrap();
        prop_assert_eq!(report.neg_count, report.negative_eigenvalues.len());
        prop_assert!(report.negative_eigenvalues.iter().all(|&v| v < 0.0));
    }

    #[test]
    fn psd_matrices_have_zero_monotone(seed in any::<u64>(), n in 1usize..=6, p in order()) {
        let a = random_hermitian(&mut rng(seed), n);
        let sq = HermitianMatrix::new(a.as_matrix() * a.as_matrix()).unwrap();
        prop_assert_eq!(m_p(&sq, MonotoneOrder::new(p).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn partial_transpose_sides_share_spectrum(seed in any::<u64>(), d_a in 1usize..=4, d_b in 1usize..=4) {
        let rho = random_density(&mut rng(seed), d_a, d_b, 1 + (seed % 3) as usize);
        let sa = hermitian_eigenvalues(&partial_transpose(&rho, Subsystem::A)).unwrap();
        let sb = hermitian_eigenvalues(&partial_transpose(&rho, Subsystem::B)).unwrap();
        for (x, y) in sa.values().iter().zip(sb.values()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        prop_assert!((rho.partial_transpose(Subsystem::B).trace() - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pure_state_bound_is_exact(seed in any::<u64>(), d_a in 1usize..=4, d_b in 1usize..=5) {
        let psi = random_pure(&mut rng(seed), d_a, d_b);
        let rho = psi.to_density();
        let c = pure_concurrence(&psi).unwrap();
        prop_assert!((concurrence_lower_bound(&rho).unwrap() - c).abs() <= 1e-8);
        prop_assert!((tangle_lower_bound(&rho).unwrap() - pure_tangle(&psi).unwrap()).abs() <= 1e-8);
        // Schmidt weights are the reduced-state spectrum
        let coeffs = schmidt_coefficients(&psi).unwrap();
        let reduced = hermitian_eigenvalues(&psi.reduced(if d_a <= d_b { Subsystem::A } else { Subsystem::B })).unwrap();
        for (c, l) in coeffs.iter().zip(reduced.values()) {
            prop_assert!((c * c - l).abs() <= 1e-12);
        }
        prop_assert!((coeffs.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn two_qubit_single_negative_eigenvalue(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_density(&mut rng(seed), 2, 2, rank);
        let pt = rho.partial_transpose(Subsystem::B);
        let r1 = monotone_report(&pt, MonotoneOrder::ONE).unwrap();
        let m2 = m_p(&pt, MonotoneOrder::TWO).unwrap();
        prop_assert!(r1.neg_count <= 1);
        prop_assert!((r1.m_value - m2).abs() <= 1e-10);
    }
}

#[test]
fn isotropic_closed_forms_match_numerics() {
    for d in 2..=10 {
        for k in 0..=20 {
            let p = IsotropicParams::new(d, k as f64 / 20.0).unwrap();
            let rho = isotropic_state(&p).unwrap();
            let spectrum = hermitian_eigenvalues(&rho.partial_transpose(Subsystem::B)).unwrap();
            let [(hi, m_hi), (lo, m_lo)] = isotropic_pt_spectrum(&p);
            let (top, bottom) = spectrum
                .values()
                .split_at(if hi >= lo { m_hi } else { m_lo });
            let (first, second) = if hi >= lo { (hi, lo) } else { (lo, hi) };
            top.iter()
                .for_each(|v| assert_abs_diff_eq!(*v, first, epsilon = 1e-12));
            bottom
                .iter()
                .for_each(|v| assert_abs_diff_eq!(*v, second, epsilon = 1e-12));
            assert_abs_diff_eq!(
                concurrence_lower_bound(&rho).unwrap(),
                isotropic_m2pt(&p),
                epsilon = 1e-9
            );
        }
    }
}
