//! One test per acceptance criterion. Monte Carlo estimates that feed more than one
//! criterion are computed once and shared.

use std::sync::OnceLock;

use gcalc::faceoperad::{check_d_squared, leibniz_quotient_check};
use gcalc::graphs::{enumerate_classes, enumerate_graphs, subsets, DecoratedGraph, Direction};
use gcalc::integrator::{
    analytic_weight_appendix4, appendix4_graphs, mc_weight_cn, mc_weight_cn0, parse_circle_form,
    stokes_identity_residual, wheel_weight_closed_form, zeta_box_integral, ClosedForm, McOptions, WeightEstimate,
    WheelVariant,
};
use gcalc::numbers::{zeta, zeta_partial_sum};
use gcalc::polyfields::random::{random_homogeneous, random_with_psi, RandomShape};
use gcalc::polyfields::{composition_identity_check, schouten, signed_schouten, Grading, PolyField};
use gcalc::propagators::{MapMode, Propagator};
use gcalc::theory::{
    build_mu, duflo_exponent_coefficient, duflo_transform, duflo_wheel_route, omega0_table, so3_bivector,
    so3_casimir, tetrahedron_terms, DufloVariant, WeightKind,
};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: u64 = 10_000_000;
const SHAPE: RandomShape = RandomShape { max_terms: 3, max_x_power: 2, max_coeff: 4 };

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Outer-form weights of the six tabulated four-vertex graphs at full sample size.
fn appendix4_estimates() -> &'static Vec<(DecoratedGraph, BigRational, WeightEstimate)> {
    static CELL: OnceLock<Vec<(DecoratedGraph, BigRational, WeightEstimate)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let form = parse_circle_form("kontsevich-outer").unwrap();
        appendix4_graphs()
            .into_iter()
            .enumerate()
            .map(|(i, (g, exact))| {
                let e = mc_weight_cn(&g, &form, &McOptions::new(SAMPLES, 100 + i as u64)).unwrap();
                (g, exact, e)
            })
            .collect()
    })
}

#[test]
fn c01_schouten_reproduction() {
    let mu = build_mu(&omega0_table(), WeightKind::Out, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = Vec::new();
    for case in 0..50 {
        let g = Grading::even(1 + case % 3);
        let a = random_homogeneous(&g, rng.gen_range(-1..=3), &mut rng, &SHAPE);
        let b = random_homogeneous(&g, rng.gen_range(-1..=3), &mut rng, &SHAPE);
        if mu.apply(&[a.clone(), b.clone()]).unwrap() != signed_schouten(&a, &b) {
            mismatches.push(format!("|a| = {:?}: {} , {}", a.degree(), a, b));
        }
        let three: Vec<PolyField> = (0..3).map(|_| random_with_psi(&g, rng.gen_range(0..=2), &mut rng, &SHAPE)).collect();
        assert!(mu.apply(&three).unwrap().is_zero());
        let four: Vec<PolyField> = (0..4).map(|_| random_with_psi(&g, rng.gen_range(0..=2), &mut rng, &SHAPE)).collect();
        assert!(mu.apply(&four).unwrap().is_zero());
    }
    assert!(mismatches.is_empty(), "{} of 50 pairs differ from (-1)^|a| [a . b]:\n{}", mismatches.len(), mismatches.join("\n"));
}

#[test]
fn c02_operadic_differentials() {
    let report = check_d_squared(5).unwrap();
    assert!(report.passed(), "{:?}", report);
    let quotient = leibniz_quotient_check();
    assert!(quotient.passed(), "{:?}", quotient);
}

#[test]
fn c03_appendix4_weights() {
    for (g, exact, e) in appendix4_estimates() {
        assert_eq!(&analytic_weight_appendix4(g).unwrap(), exact, "{}", g);
        let target = exact.to_f64().unwrap();
        let slack = if exact.is_zero() { 3.0 * e.std_error } else { (0.02 * target).max(3.0 * e.std_error) };
        assert!(
            (e.value - target).norm() <= slack + 1e-12,
            "{}: {} vs {} (std error {})",
            g,
            e.value,
            target,
            e.std_error
        );
    }
    let twelfth: Vec<_> = appendix4_estimates().iter().filter(|(_, x, _)| *x == r(1, 12)).collect();
    assert_eq!(twelfth.len(), 3);
}

#[test]
fn c04_weight_relations() {
    let est = appendix4_estimates();
    let (c1, c2, c3) = (&est[0].2, &est[1].2, &est[2].2);
    let kontsevich = |g: &DecoratedGraph, seed| {
        mc_weight_cn0(g, &Propagator::Kontsevich, MapMode::Renormalized, &McOptions::new(SAMPLES, seed)).unwrap()
    };
    // the Stokes identity of each graph pairs its outer weight with two collapses of one edge
    let g1 = &est[0].0;
    let g3 = &est[2].0;
    let a1 = [1, 3];
    let a3 = [1, 4];
    let c_prime = kontsevich(&g1.quotient(&a1).unwrap(), 201);
    let c_second = kontsevich(&g3.quotient(&a3).unwrap(), 202);
    let s1 = f64::from(g1.koszul_sign(&a1).unwrap());
    let s3 = f64::from(g3.koszul_sign(&a3).unwrap());

    let lhs = c2.value - (c1.value + c3.value) * 0.5;
    let sigma = (c2.std_error.powi(2) + 0.25 * (c1.std_error.powi(2) + c3.std_error.powi(2))).sqrt();
    assert!(lhs.norm() <= 3.0 * sigma, "c2 - (c1 + c3)/2 = {} (sigma {})", lhs, sigma);

    let d1 = c1.value - c_prime.value * (2.0 * s1);
    let sigma1 = c1.std_error.hypot(2.0 * c_prime.std_error);
    assert!(d1.norm() <= 3.0 * sigma1, "c1 - 2C' = {} (sigma {})", d1, sigma1);

    let d3 = c3.value - c_second.value * (2.0 * s3);
    let sigma3 = c3.std_error.hypot(2.0 * c_second.std_error);
    assert!(d3.norm() <= 3.0 * sigma3, "c3 - 2C'' = {} (sigma {})", d3, sigma3);
}

#[test]
fn c05_zeta_box_integral() {
    for (n, printed) in [(2usize, 1.64493), (3, 1.20206)] {
        let oracle = zeta(n as u32).unwrap();
        assert!((oracle - printed).abs() < 1e-5);
        assert!((zeta_partial_sum(n as u32, 1_000_000) - oracle).abs() < 1e-5);
        let e = zeta_box_integral(n, &McOptions::new(SAMPLES, 300 + n as u64)).unwrap();
        assert!((e.value.re - oracle).abs() / oracle < 0.01, "n = {}: {}", n, e.value);
        assert!(e.within_sigmas(Complex64::new(oracle, 0.0), 3.0), "n = {}: {} +- {}", n, e.value, e.std_error);
    }
}

#[test]
fn c06_wheel_closed_forms() {
    let two = wheel_weight_closed_form(2, WheelVariant::BernoulliEven).unwrap();
    assert_eq!(two, ClosedForm::Exact(r(1, 24)));
    for n in [2usize, 4, 6] {
        let z = wheel_weight_closed_form(n, WheelVariant::HalfK).unwrap().to_complex();
        let b = wheel_weight_closed_form(n, WheelVariant::BernoulliEven).unwrap().to_complex();
        assert!((z - b).norm() <= 1e-12, "n = {}: {} vs {}", n, z, b);
    }
}

#[test]
fn c07_symmetrized_weights_vanish() {
    let classes = enumerate_classes(3, 4, Direction::Directed);
    let mut checked = 0;
    for (i, c) in classes.iter().enumerate() {
        if c.is_odd() {
            continue;
        }
        let o = McOptions::new(1_000_000, 400 + i as u64);
        let e = mc_weight_cn0(&c.representative, &Propagator::Symmetrized, MapMode::Renormalized, &o).unwrap();
        assert!(e.within_sigmas(Complex64::new(0.0, 0.0), 3.0), "{}: {} +- {}", c.representative, e.value, e.std_error);
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn c08_stokes_and_composition_identities() {
    let table = omega0_table();
    for n in 2..=4 {
        for c in enumerate_classes(n, 2 * n - 4, Direction::Directed) {
            let res = stokes_identity_residual(&c.representative, &table).unwrap();
            assert!(res.is_zero(), "{}: residual {}", c.representative, res);
        }
    }
    let g = Grading::even(2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut gluings = 0;
    for n1 in 2..=3 {
        for n2 in 2..=3 {
            let n = n1 + n2 - 1;
            for l1 in 0..=3 {
                for l2 in 0..=3 - l1 {
                    for g1 in enumerate_graphs(n1, l1, Direction::Directed) {
                        for g2 in enumerate_graphs(n2, l2, Direction::Directed) {
                            for a in subsets(n, n2).into_iter().filter(|a| a.len() == n2) {
                                let gammas: Vec<PolyField> =
                                    (0..n).map(|_| random_with_psi(&g, rng.gen_range(0..=2), &mut rng, &SHAPE)).collect();
                                let defect =
                                    composition_identity_check(&g1.representative, &g2.representative, &a, &gammas)
                                        .unwrap();
                                assert!(defect.is_zero(), "{} in {} at {:?}: {}", g2.representative, g1.representative, a, defect);
                                gluings += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(gluings > 100);
}

#[test]
fn c09_duflo_consistency() {
    let alpha = so3_bivector();
    let casimir = so3_casimir(1);
    let trace = duflo_transform(&alpha, &casimir, DufloVariant::Bernoulli, 4).unwrap();
    let wheels = duflo_wheel_route(&alpha, &casimir, DufloVariant::Bernoulli, 4).unwrap();
    assert_eq!(trace, wheels);
    assert_eq!(duflo_exponent_coefficient(2, DufloVariant::Bernoulli), Some(r(1, 48)));
}

#[test]
fn c10_tetrahedron_flow() {
    let alpha = so3_bivector();
    let (first, second) = tetrahedron_terms(&alpha).unwrap();
    assert!(second.is_zero(), "second term {}", second);
    let flow = &first + &second;
    assert!(schouten(&alpha, &flow).is_zero());
}
