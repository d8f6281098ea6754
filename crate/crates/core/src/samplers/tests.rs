use super::*;
use crate::geometry::{Metric, ModelParams};
use crate::rgg::is_empty_graph;

fn circle(n: usize, p: f64) -> ModelParams {
    ModelParams::from_collision(n, 1, Metric::L2, p).unwrap()
}

#[test]
fn estimate_invariants() {
    let e = Estimate::exact(0.3, 1);
    assert_eq!(e.stderr, 0.0);
    let p = circle(3, 0.2);
    let mc =
        estimate_prob_empty(&p, 1000, 1, EstimateMethod::NaiveMc, &Default::default()).unwrap();
    assert!(mc.stderr > 0.0);
    assert!(mc.samples >= 1);
    let err = estimate_prob_empty(&p, 99, 1, EstimateMethod::NaiveMc, &Default::default());
    assert!(err.is_err());
}

#[test]
fn degenerate_sizes() {
    let p = circle(1, 0.2);
    let e =
        estimate_prob_empty(&p, 100, 1, EstimateMethod::Telescoping, &Default::default()).unwrap();
    assert_eq!((e.mean, e.method), (1.0, EstimateMethod::Exact));
    let c = conditional_coverage(0, &p, 100, 1, &Default::default()).unwrap();
    assert_eq!(c.mean, 0.0);
}

#[test]
fn single_pair_is_one_minus_p() {
    let opts = SamplerOptions::default();
    for (d, m) in [(1, Metric::L2), (2, Metric::L2), (2, Metric::Linf)] {
        let p = ModelParams::from_collision(2, d, m, 0.15).unwrap();
        for method in [EstimateMethod::NaiveMc, EstimateMethod::Telescoping] {
            let e = estimate_prob_empty(&p, 20_000, 8, method, &opts).unwrap();
            assert!(e.agrees_with(0.85), "d={d} {m} {method}: {e:?}");
        }
    }
}

#[test]
fn circle_closed_form() {
    let p = circle(4, 0.1);
    assert!((exact_prob_empty(&p).unwrap() - 0.512).abs() < 1e-12);
    let opts = SamplerOptions::default();
    for method in [EstimateMethod::NaiveMc, EstimateMethod::Telescoping] {
        let e = estimate_prob_empty(&p, 50_000, 3, method, &opts).unwrap();
        assert!(e.agrees_with(0.512), "{method}: {e:?}");
    }
    assert_eq!(exact_prob_empty(&circle(30, 0.1)), Some(0.0));
}

#[test]
fn naive_and_telescoping_agree_in_plane() {
    let p = ModelParams::from_collision(3, 2, Metric::L2, 0.05).unwrap();
    let opts = SamplerOptions::default();
    let a = estimate_prob_empty(&p, 40_000, 5, EstimateMethod::NaiveMc, &opts).unwrap();
    let b = estimate_prob_empty(&p, 40_000, 6, EstimateMethod::Telescoping, &opts).unwrap();
    assert!(a.agrees_with_estimate(&b), "{a:?} vs {b:?}");
}

#[test]
fn estimates_are_reproducible() {
    let p = ModelParams::from_collision(4, 2, Metric::L2, 0.05).unwrap();
    let opts = SamplerOptions::default();
    let a = estimate_prob_empty(&p, 500, 99, EstimateMethod::Telescoping, &opts).unwrap();
    let b = estimate_prob_empty(&p, 500, 99, EstimateMethod::Telescoping, &opts).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let c = pool.install(|| estimate_prob_empty(&p, 500, 99, EstimateMethod::Telescoping, &opts));
    assert_eq!(a, c.unwrap());
}

#[test]
fn chain_keeps_constraint() {
    let p = ModelParams::from_collision(8, 2, Metric::L2, 0.04).unwrap();
    let mut rng = rng::stream(4, Purpose::Chain, 0);
    let mut state = ChainState::sequential_init(&p, 8, &mut rng, 1000).unwrap();
    for _ in 0..200 {
        state.run(25, &mut rng);
        assert!(is_empty_graph(state.config()));
    }
    assert_eq!(state.steps_taken, 5000);
    assert!(state.accepts > 0 && state.accepts < 5000);
}

#[test]
fn chain_rejects_invalid_start() {
    let p = circle(2, 0.5);
    let c = TorusConfiguration::from_points(p, &[vec![0.1], vec![0.2]]).unwrap();
    assert!(ChainState::new(c).is_err());
}

#[test]
fn chain_trivial_cases_always_accept() {
    let p = ModelParams::from_collision(1, 2, Metric::L2, 0.3).unwrap();
    let c = TorusConfiguration::from_points(p, &[vec![0.5, 0.5]]).unwrap();
    let s = mcmc_run(ChainState::new(c).unwrap(), 1000, 1);
    assert_eq!(s.accepts, 1000);

    let p0 = ModelParams::from_radius(5, 2, Metric::L2, 0.0).unwrap();
    let mut rng = rng::stream(2, Purpose::Chain, 0);
    let s = ChainState::sequential_init(&p0, 5, &mut rng, 1).unwrap();
    let s = mcmc_run(s, 1000, 2);
    assert_eq!(s.acceptance_rate(), 1.0);
}

/// After one move from a uniform start, a lone particle is uniform.
#[test]
fn lone_particle_is_uniform() {
    let p = circle(1, 0.3);
    let mut below = 0usize;
    const RUNS: usize = 20_000;
    for i in 0..RUNS {
        let c = TorusConfiguration::from_points(p, &[vec![0.9]]).unwrap();
        let s = mcmc_run(ChainState::new(c).unwrap(), 3, i as u64);
        if s.config().point(0)[0] < 0.5 {
            below += 1;
        }
    }
    let frac = below as f64 / RUNS as f64;
    assert!((frac - 0.5).abs() <= 4.0 * (0.25 / RUNS as f64).sqrt());
}

/// Flows between coarse occupancy patterns are symmetric at stationarity.
#[test]
fn detailed_balance_smoke() {
    const CELLS: usize = 3;
    const RUNS: usize = 200_000;
    let p = circle(2, 0.3);
    let pattern = |c: &TorusConfiguration| {
        let a = (c.point(0)[0] * CELLS as f64) as usize;
        let b = (c.point(1)[0] * CELLS as f64) as usize;
        a * CELLS + b
    };
    let mut flow = vec![0u64; CELLS.pow(4)];
    let mut rng = rng::stream(12, Purpose::Points, 0);
    for _ in 0..RUNS {
        let s = rejection_sample_with(&p, 2, &mut rng, u64::MAX).unwrap();
        let mut state = ChainState::new(s.config).unwrap();
        let from = pattern(state.config());
        state.step(&mut rng);
        let to = pattern(state.config());
        flow[from * CELLS * CELLS + to] += 1;
    }
    let states = CELLS * CELLS;
    for a in 0..states {
        for b in (a + 1)..states {
            let (ab, ba) = (flow[a * states + b] as f64, flow[b * states + a] as f64);
            assert!(
                (ab - ba).abs() <= 4.0 * (ab + ba).sqrt().max(1.0),
                "{a}->{b}: {ab} vs {ba}"
            );
        }
    }
}

/// Chain and rejection estimates of `E[V_3 | E_3]` on the circle agree.
#[test]
fn chain_matches_rejection() {
    let p = circle(3, 0.2);
    let opts = SamplerOptions::default();
    let rej =
        conditional_coverage(3, &p, 20_000, 1, &opts.with_backend(Backend::Rejection)).unwrap();
    let mc = conditional_coverage(3, &p, 20_000, 2, &opts.with_backend(Backend::Mcmc)).unwrap();
    assert_eq!(rej.backend, Some(Backend::Rejection));
    assert_eq!(mc.backend, Some(Backend::Mcmc));
    assert!(rej.agrees_with_estimate(&mc), "{rej:?} vs {mc:?}");
}

#[test]
fn chain_matches_rejection_in_plane() {
    let p = ModelParams::from_collision(4, 2, Metric::L2, 0.08).unwrap();
    let opts = SamplerOptions {
        samples_per_chain: 4,
        ..Default::default()
    };
    let rej =
        conditional_coverage(4, &p, 5_000, 1, &opts.with_backend(Backend::Rejection)).unwrap();
    let mc = conditional_coverage(4, &p, 5_000, 2, &opts.with_backend(Backend::Mcmc)).unwrap();
    assert!(rej.agrees_with_estimate(&mc), "{rej:?} vs {mc:?}");
}

#[test]
fn auto_backend_switches_at_high_density() {
    let opts = SamplerOptions::default();
    let low = ModelParams::from_collision(6, 2, Metric::L2, 0.01).unwrap();
    assert_eq!(resolve_backend(&low, 6, 1, &opts), Backend::Rejection);
    // 14 points at p = 0.1 on the circle: (1 - 0.7)^13 is far below 1e-3
    let high = circle(14, 0.1);
    assert_eq!(resolve_backend(&high, 14, 1, &opts), Backend::Mcmc);
    let e = conditional_coverage(14, &high, 200, 1, &opts).unwrap();
    assert_eq!(e.backend, Some(Backend::Mcmc));
    // 14 separated centers cover at least 14 * r
    assert!(e.mean >= 0.7 && e.mean <= 1.0);
}

#[test]
fn repulsion_gap_single_center() {
    let p = ModelParams::from_collision(5, 3, Metric::L2, 0.1).unwrap();
    let g = repulsion_gap(1, &p, 100, 1, &Default::default()).unwrap();
    assert_eq!(g.conditional.mean, 0.1);
    assert_eq!(g.conditional.method, EstimateMethod::Exact);
    assert_eq!(g.gap.mean, 0.0);
    assert!(repulsion_gap(0, &p, 100, 1, &Default::default()).is_err());
}

#[test]
fn repulsion_gap_pair_on_circle() {
    // r = 0.1; given E_2 the gap D is uniform on (r, 1/2] and the arcs
    // overlap by (2r - D)^+, so E[V_2 | E_2] = 4r - (r^2/2)/(1/2 - r) = 0.3875
    let p = circle(2, 0.2);
    let g = repulsion_gap(2, &p, 20_000, 3, &Default::default()).unwrap();
    assert!(g.conditional.agrees_with(0.3875), "{g:?}");
    assert!(g.conditional.mean >= 0.36);
    assert!((g.unconditional - 0.36).abs() < 1e-12);
    assert!(g.holds());
}

#[test]
fn repulsion_in_plane_at_low_density() {
    let p = ModelParams::from_density(3, 2, Metric::L2, 2f64.powi(-8)).unwrap();
    let g = repulsion_gap(3, &p, 20_000, 5, &Default::default()).unwrap();
    assert!(g.holds(), "{g:?}");
    assert!(g.sphere_est_rhs.is_some());
}

#[test]
fn sphere_est_bound_cases() {
    assert_eq!(sphere_est_bound(1, 0.2, 3), Some(0.2));
    assert_eq!(sphere_est_bound(5, 0.2, 3), None);
    let v = sphere_est_bound(3, 0.1, 1).unwrap();
    let expect = 0.3 - 3.0 * 0.01 * 0.75 / 0.49;
    assert!((v - expect).abs() < 1e-15);
}

/// Low-density birthday inequality and the `sphereEst` lower bound.
#[test]
fn birthday_and_sphere_est_at_low_density() {
    let opts = SamplerOptions::default();
    for d in [1usize, 2] {
        let alpha = 2f64.powi(-2 - 3 * d as i32);
        for n in 2..=6 {
            let p = ModelParams::from_density(n, d, Metric::L2, alpha).unwrap();
            let pairs = (n * (n - 1) / 2) as i32;
            let seed = (d * 100 + n) as u64;
            let e =
                estimate_prob_empty(&p, 20_000, seed, EstimateMethod::Telescoping, &opts).unwrap();
            let rhs = (1.0 - p.p).powi(pairs);
            assert!(
                e.mean - rhs <= 4.0 * e.stderr + 1e-12,
                "d={d} n={n}: {e:?} vs {rhs}"
            );

            for k in 2..n {
                let c = conditional_coverage(k, &p, 5_000, seed + k as u64, &opts).unwrap();
                let bound = sphere_est_bound(k, p.p, d).unwrap();
                assert!(
                    c.mean >= bound - 4.0 * c.stderr - 1e-12,
                    "d={d} n={n} k={k}"
                );
            }
        }
    }
}
