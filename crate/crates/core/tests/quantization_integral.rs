use std::f64::consts::PI;

use dirac_atm::linear::linear_potential;
use dirac_atm::quantization::{
    endpoint_cauchy_check, evaluate_physical, evaluate_quantization, jackiw_rebbi_form,
    negative_energy_check, ratio_integrand, solve_levels, subwave_integrand, trial_total,
    ENDPOINT_EXCLUSION,
};
use dirac_atm::shooting::find_eigenvalues;
use dirac_atm::{Potential, Units};

const ATM_ALPHA1: [f64; 5] = [
    1.39627444809303,
    3.05676024192944,
    4.30627665789798,
    5.61521084997803,
    6.80477123537566,
];
const ATM_ALPHA2: [f64; 5] = [
    3.33859536647797,
    5.45216075601056,
    7.00608729608357,
    8.56894588172436,
    9.97860836439766,
];

/// Square well of half width `a` and height `v0`: matching the interior
/// `cos` solution to the decaying tails gives
/// `2 kappa a - 2 atan(gamma (1 + eps) / (kappa (1 + v0 + eps))) = n pi`.
fn square_well_oracle(a: f64, v0: f64, n: usize) -> f64 {
    let f = |e: f64| {
        let kappa = (e * e - 1.0).sqrt();
        let gamma = ((1.0 + v0).powi(2) - e * e).sqrt();
        2.0 * kappa * a
            - 2.0 * (gamma * (1.0 + e) / (kappa * (1.0 + v0 + e))).atan()
            - n as f64 * PI
    };
    let (mut lo, mut hi) = (1.0 + 1e-12, 1.0 + v0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn square_well_levels_and_residuals() {
    let pot = Potential::square_well(2.0, 6.0).unwrap();
    let states = find_eigenvalues(&pot, (1.0 + 1e-9, 6.9), 6).unwrap();
    assert!(states.len() >= 5);
    for (n, s) in states.iter().enumerate() {
        assert!(
            (s.epsilon - square_well_oracle(2.0, 6.0, n)).abs() < 1e-9,
            "n = {n}"
        );
        let r = evaluate_quantization(&pot, s).unwrap();
        assert_eq!(r.subwave_integral, 0.0);
        assert_eq!(r.nearest_level, n);
        assert!(r.residual.abs() < 1e-8, "n = {n}: {r:?}");
    }
}

#[test]
fn linear_ground_state_total() {
    let pot = Potential::linear(1.0).unwrap();
    let r = trial_total(&pot, (2.0 * 1.39627444057259f64).sqrt()).unwrap();
    assert!((r.total_over_pi - 1.0).abs() < 1e-6, "{r:?}");
}

#[test]
fn quadratic_states_quantize() {
    let pot = Potential::quadratic(0.5).unwrap();
    for (n, s) in find_eigenvalues(&pot, (1.0 + 1e-9, 3.0), 3)
        .unwrap()
        .iter()
        .enumerate()
    {
        let r = evaluate_quantization(&pot, s).unwrap();
        assert_eq!(r.nearest_level, n);
        assert!(r.residual.abs() < 1e-6);
        assert!((r.total_over_pi - (r.wkb_integral + r.subwave_integral) / PI).abs() < 1e-15);
    }
}

#[test]
fn solve_levels_matches_shooting() {
    let pot = Potential::quadratic(0.5).unwrap();
    let levels: Vec<usize> = (0..6).collect();
    let shot = find_eigenvalues(&pot, (1.0 + 1e-9, 4.5), 6).unwrap();
    let solved = solve_levels(&pot, &levels, (1.0 + 1e-9, 4.5)).unwrap();
    assert_eq!(shot.len(), 6);
    for (a, b) in shot.iter().zip(&solved) {
        assert!((a.epsilon - b.epsilon).abs() < 1e-8, "n = {}", b.n);
        assert!(b.report.residual_for(b.n).abs() < 1e-8);
    }
}

#[test]
fn linear_levels_match_atm_columns() {
    let levels: Vec<usize> = (0..5).collect();
    for (alpha, column, top) in [(1.0, ATM_ALPHA1, 4.0), (2.0, ATM_ALPHA2, 2.4)] {
        let pot = linear_potential(alpha).unwrap();
        let solved = solve_levels(&pot, &levels, (1.0 + 1e-9, top)).unwrap();
        for (s, nu) in solved.iter().zip(column) {
            let got = s.epsilon * s.epsilon * alpha * alpha / 2.0;
            assert!(
                (got - nu).abs() < 1e-6,
                "alpha = {alpha}, n = {}: {got} vs {nu}",
                s.n
            );
        }
    }
}

#[test]
fn missing_bracket_names_level() {
    let pot = Potential::quadratic(0.5).unwrap();
    let err = solve_levels(&pot, &[7], (1.0 + 1e-9, 1.5)).unwrap_err();
    assert!(err.to_string().contains('7'), "{err}");
}

#[test]
fn jackiw_rebbi_form_agrees() {
    let pot = Potential::linear(1.0).unwrap();
    let s = find_eigenvalues(&pot, (1.0 + 1e-9, 2.0), 1)
        .unwrap()
        .remove(0);
    let a = evaluate_quantization(&pot, &s).unwrap();
    let b = jackiw_rebbi_form(&pot, &s).unwrap();
    assert!((a.total() - b.total()).abs() < 1e-8);

    let pot = Potential::quadratic(0.5).unwrap();
    let s = find_eigenvalues(&pot, (1.0 + 1e-9, 3.0), 2)
        .unwrap()
        .remove(1);
    assert!(
        evaluate_quantization(&pot, &s)
            .unwrap()
            .residual_for(1)
            .abs()
            < 1e-6
    );
    assert!(jackiw_rebbi_form(&pot, &s).unwrap().residual_for(1).abs() < 1e-6);
}

#[test]
fn negative_energy_partner() {
    let linear = Potential::linear(1.0).unwrap();
    let s = find_eigenvalues(&linear, (1.0 + 1e-9, 2.0), 1)
        .unwrap()
        .remove(0);
    assert!(negative_energy_check(&linear, &s).unwrap().agrees(1e-8));

    let square = Potential::square_well(2.0, 6.0).unwrap();
    for s in find_eigenvalues(&square, (1.0 + 1e-9, 4.0), 3).unwrap() {
        assert!(negative_energy_check(&square, &s).unwrap().agrees(1e-8));
    }

    let quadratic = Potential::quadratic(0.5).unwrap();
    let s = find_eigenvalues(&quadratic, (1.0 + 1e-9, 3.0), 3)
        .unwrap()
        .remove(2);
    let r = negative_energy_check(&quadratic, &s).unwrap();
    assert!(r.agrees(1e-8), "{r:?}");
    assert_eq!(r.epsilon, s.epsilon);
}

#[test]
fn physical_units_match_dimensionless() {
    let units = Units::new(2.0, 3.0, 0.5).unwrap();
    for pot in [
        Potential::quadratic(0.5).unwrap(),
        Potential::linear(1.0).unwrap(),
    ] {
        for s in find_eigenvalues(&pot, (1.0 + 1e-9, 2.5), 2).unwrap() {
            let a = evaluate_quantization(&pot, &s).unwrap();
            let b = evaluate_physical(&units, &pot, &s).unwrap();
            assert!(
                (a.total() - b.total()).abs() < 1e-12,
                "{} vs {}",
                a.total(),
                b.total()
            );
        }
    }
    assert!(evaluate_physical(
        &Units {
            mass: -1.0,
            ..Units::natural()
        },
        &Potential::linear(1.0).unwrap(),
        &{
            find_eigenvalues(&Potential::linear(1.0).unwrap(), (1.0 + 1e-9, 2.0), 1)
                .unwrap()
                .remove(0)
        }
    )
    .is_err());
}

#[test]
fn endpoint_exclusion_converges() {
    for pot in [
        Potential::quadratic(0.5).unwrap(),
        Potential::linear(1.0).unwrap(),
    ] {
        for s in find_eigenvalues(&pot, (1.0 + 1e-9, 3.0), 3).unwrap() {
            let c = endpoint_cauchy_check(&pot, &s, ENDPOINT_EXCLUSION).unwrap();
            assert!(c.change < 1e-10, "{c:?}");
        }
    }
}

#[test]
fn one_integer_between_levels() {
    let pot = Potential::quadratic(0.5).unwrap();
    let states = find_eigenvalues(&pot, (1.0 + 1e-9, 3.5), 4).unwrap();
    let energies: Vec<f64> = states.iter().map(|s| s.epsilon).collect();
    for w in energies.windows(2) {
        let grid: Vec<f64> = (0..=24)
            .map(|i| w[0] + 1e-6 + (w[1] - w[0] - 2e-6) * i as f64 / 24.0)
            .collect();
        let floors: Vec<f64> = grid
            .iter()
            .map(|&e| trial_total(&pot, e).unwrap().total_over_pi.floor())
            .collect();
        // strictly inside the gap the total stays between consecutive integers
        assert!(floors.iter().all(|&f| f == floors[0]), "{floors:?}");
    }
    let below = trial_total(&pot, energies[0] - 1e-3).unwrap().total_over_pi;
    let above = trial_total(&pot, energies[3] + 1e-3).unwrap().total_over_pi;
    assert_eq!((above.floor() - below.floor()) as usize, 4);
}

#[test]
fn integrand_forms_agree_on_states() {
    let pot = Potential::quadratic(0.5).unwrap();
    for s in find_eigenvalues(&pot, (1.0 + 1e-9, 3.0), 3).unwrap() {
        let tp = s.turning_points;
        let nodes = s.nodes(0);
        for i in 1..200 {
            let x = tp.left + tp.width() * i as f64 / 200.0;
            if nodes.iter().any(|z| (z - x).abs() < 1e-2) {
                continue;
            }
            let psi = s.spinor(x);
            let Some(a) = subwave_integrand(&pot, s.epsilon, x, psi) else {
                continue;
            };
            let b = ratio_integrand(&pot, s.epsilon, x, -psi[1] / psi[0]);
            assert!((a - b).abs() < 1e-8 * a.abs().max(1.0), "x = {x}");
        }
        for z in nodes {
            for x in [z - 1e-3, z + 1e-3] {
                let psi = s.spinor(x);
                let a = subwave_integrand(&pot, s.epsilon, x, psi).unwrap();
                let b = ratio_integrand(&pot, s.epsilon, x, -psi[1] / psi[0]);
                assert!((a - b).abs() < 1e-6, "near node {z}");
            }
            // the spinor form stays finite through the pole of P
            assert!(subwave_integrand(&pot, s.epsilon, z, s.spinor(z))
                .unwrap()
                .is_finite());
        }
    }
}

#[test]
fn subwave_integrand_is_even_for_parity_states() {
    // theta' is odd and psi1 psi2 is odd for a definite-parity state, so the
    // two halves of the well contribute equally
    let pot = Potential::quadratic(0.5).unwrap();
    for s in find_eigenvalues(&pot, (1.0 + 1e-9, 3.0), 3).unwrap() {
        let half = 0.5 * s.turning_points.width();
        let f = |x: f64| subwave_integrand(&pot, s.epsilon, x, s.spinor(x)).unwrap();
        let (mut left, mut right) = (0.0, 0.0);
        for i in 1..100 {
            let x = 0.95 * half * i as f64 / 100.0;
            assert!((f(x) - f(-x)).abs() < 1e-8 * f(x).abs().max(1.0), "x = {x}");
            right += f(x);
            left += f(-x);
        }
        assert!((left - right).abs() < 1e-7);
    }
}
