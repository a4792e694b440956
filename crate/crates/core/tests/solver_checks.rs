//! Cross-cutting solver invariants on small instances.

use cdo_rd::distortion::DistortionMeasure;
use cdo_rd::model::{CdoSource, Mode};
use cdo_rd::prob::mutual_information;
use cdo_rd::solver::{
    grid_oracle, induced_joints, lagrangian_minimize, solve_curve, solve_point,
    zero_rate_distortion, SolverOptions,
};

fn measures() -> [DistortionMeasure; 2] {
    [
        DistortionMeasure::BhattacharyyaWootters,
        DistortionMeasure::InformationalDivergence,
    ]
}

/// Along the multiplier grid, distortion falls and rate grows.
#[test]
fn lagrangian_sweep_is_monotone() {
    let opts = SolverOptions::default();
    for mode in [Mode::Visible, Mode::Hidden] {
        let s = CdoSource::coin_ensemble(0.4, 0.15, 0.8, mode).unwrap();
        for m in measures() {
            let mut prev_d = f64::INFINITY;
            let mut prev_r = -f64::INFINITY;
            for &lambda in &opts.lambda_grid {
                let sol = lagrangian_minimize(&s, &m, lambda, &opts).unwrap();
                assert!(
                    sol.distortion <= prev_d + 1e-7,
                    "distortion rose at lambda {lambda}: {} after {prev_d}",
                    sol.distortion
                );
                assert!(
                    sol.rate >= prev_r - 1e-7,
                    "rate fell at lambda {lambda}: {} after {prev_r}",
                    sol.rate
                );
                prev_d = sol.distortion;
                prev_r = sol.rate;
            }
        }
    }
}

/// Hidden-mode reconstructions form a Markov chain X - Z - Y, so the
/// returned channel can never carry more information about the state than
/// about the outcome.
#[test]
fn data_processing_holds_for_hidden_channels() {
    let opts = SolverOptions::default();
    let s = CdoSource::coin_ensemble(0.5, 0.2, 0.75, Mode::Hidden).unwrap();
    for m in measures() {
        for delta in [0.001, 0.01, 0.05, 0.2] {
            let point = solve_point(&s, &m, delta, &opts).unwrap();
            let (pvy, pxy) = induced_joints(&s, &point.channel).unwrap();
            assert!(
                mutual_information(&pxy) <= mutual_information(&pvy) + 1e-9,
                "I(X;Y) exceeded I(Z;Y) at delta {delta}"
            );
        }
    }
}

/// Endpoints of a curve: R(0) at one end, zero rate past the zero-rate
/// distortion at the other.
#[test]
fn curve_endpoints() {
    let opts = SolverOptions::default();
    let s = CdoSource::coin_ensemble(0.5, 0.1, 0.9, Mode::Visible).unwrap();
    let m = DistortionMeasure::BhattacharyyaWootters;
    let (d_max, _) = zero_rate_distortion(&s, &m);
    let curve = solve_curve(&s, &m, &[0.0, d_max * 1.5], &opts).unwrap();
    let points = curve.points();
    assert!((points[0].rate - 0.531_004_406_410_718_9).abs() < 1e-3);
    assert_eq!(points[1].rate, 0.0);
    assert!(points[0].converged && points[1].converged);
}

/// No oracle value may undercut a solved rate by more than the tolerance:
/// the solver would otherwise be claiming an unachievable rate.
#[test]
fn oracle_never_beats_the_solver_by_much() {
    let opts = SolverOptions::default();
    let step = 1e-3;
    for mode in [Mode::Visible, Mode::Hidden] {
        let s = CdoSource::coin_ensemble(0.35, 0.2, 0.65, mode).unwrap();
        for m in measures() {
            let (d_max, _) = zero_rate_distortion(&s, &m);
            for frac in [0.2, 0.5, 0.8] {
                let delta = frac * d_max;
                let solver = solve_point(&s, &m, delta + step, &opts).unwrap().rate;
                let oracle = grid_oracle(&s, &m, delta, step).unwrap();
                assert!(
                    oracle >= solver - 1e-3,
                    "oracle {oracle} undercuts solver {solver} at delta {delta}"
                );
            }
        }
    }
}

/// The solver handles ensembles with more states than outcomes and vice
/// versa.
#[test]
fn rectangular_ensembles_solve() {
    use cdo_rd::prob::{Channel, Pmf};
    let opts = SolverOptions::default();
    // Three states, two outcomes.
    let s = CdoSource::new(
        Pmf::new(vec![0.5, 0.3, 0.2]).unwrap(),
        Channel::from_rows(&[vec![0.1, 0.9], vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap(),
        Mode::Hidden,
    )
    .unwrap();
    for m in measures() {
        let p = solve_point(&s, &m, 0.01, &opts).unwrap();
        assert!(p.rate >= 0.0 && p.converged);
    }
    // Two states, three outcomes.
    let s = CdoSource::new(
        Pmf::new(vec![0.6, 0.4]).unwrap(),
        Channel::from_rows(&[vec![0.1, 0.3, 0.6], vec![0.5, 0.25, 0.25]]).unwrap(),
        Mode::Visible,
    )
    .unwrap();
    for m in measures() {
        let p = solve_point(&s, &m, 0.01, &opts).unwrap();
        assert!(p.rate >= 0.0 && p.converged);
    }
}
