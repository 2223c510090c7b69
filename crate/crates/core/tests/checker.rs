mod common;

use common::{load_measures, load_model, propagate, sir, valuation};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use uctmc_core::checker::{
    bound_all, bound_measures, extinction_family, instant_reward, interval_reach,
    reach_probability, refine_solution, region_to_curve, solve_all, solve_measures,
    transient_distribution, ApproxOptions, Measure, MeasureKind, MeasureSet,
};
use uctmc_core::model::ConcreteCtmc;
use uctmc_core::sampling::sample_valuations;

const EPS: f64 = 1e-6;

fn generator(c: &ConcreteCtmc) -> Vec<Vec<f64>> {
    let n = c.num_states();
    let mut q = vec![vec![0.0; n]; n];
    for s in 0..n {
        for (t, r) in c.row(s) {
            if t != s {
                q[s][t] += r;
                q[s][s] -= r;
            }
        }
    }
    q
}

fn start(c: &ConcreteCtmc) -> Vec<f64> {
    let mut pi = vec![0.0; c.num_states()];
    for &(s, p) in &c.initial {
        pi[s] += p;
    }
    pi
}

fn unif(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

#[test]
fn two_state_chain_closed_form() {
    for (lambda, tau) in [(1.0, 2.0), (1.0, 1.0), (0.3, 4.0), (7.5, 0.2)] {
        let c = ConcreteCtmc::from_rates(2, vec![(0, 1.0)], &[(0, 1, lambda)])
            .with_label("goal", vec![false, true]);
        let p = reach_probability(&c, "goal", tau, EPS).unwrap();
        assert!(
            (p - (1.0 - (-lambda * tau).exp())).abs() <= EPS,
            "{lambda} {tau}"
        );
    }
    let c = ConcreteCtmc::from_rates(2, vec![(0, 1.0)], &[(0, 1, 1.0)])
        .with_reward("r", vec![0.0, 1.0])
        .with_reward("one", vec![1.0, 1.0]);
    let r = instant_reward(&c, "r", 1.0, EPS).unwrap();
    assert!((r - (1.0 - (-1.0f64).exp())).abs() <= EPS);
    for t in [0.0, 0.5, 3.0] {
        assert!((instant_reward(&c, "one", t, EPS).unwrap() - 1.0).abs() <= EPS);
    }
    assert_eq!(instant_reward(&c, "r", 0.0, EPS).unwrap(), 0.0);
}

#[test]
fn uniformization_matches_matrix_exponential() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
    for case in 0..100 {
        let n = 1 + (rng.next_u64() % 8) as usize;
        let mut edges = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if unif(&mut rng) < 0.45 {
                    edges.push((s, t, 5.0 * unif(&mut rng)));
                }
            }
        }
        let mut init: Vec<f64> = (0..n).map(|_| unif(&mut rng)).collect();
        let total: f64 = init.iter().sum();
        init.iter_mut().for_each(|x| *x /= total);
        let initial: Vec<(usize, f64)> = init.iter().copied().enumerate().collect();
        let c = ConcreteCtmc::from_rates(n, initial, &edges);
        let t = 3.0 * unif(&mut rng);
        let got = transient_distribution(&c, t, EPS).unwrap();
        let want = propagate(&generator(&c), &vec![false; n], &start(&c), t);
        let l1: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).sum();
        assert!(l1 <= 2.0 * EPS, "case {case}: n={n} t={t} l1={l1}");
    }
}

#[test]
fn birth_chain_against_oracle() {
    let c = ConcreteCtmc::from_rates(3, vec![(0, 1.0)], &[(0, 1, 2.0), (1, 2, 3.0)])
        .with_label("end", vec![false, false, true]);
    let got = reach_probability(&c, "end", 0.7, EPS).unwrap();
    // Hypoexponential(2, 3) distribution function.
    let want = 1.0 - 3.0 * (-2.0f64 * 0.7).exp() + 2.0 * (-3.0f64 * 0.7).exp();
    assert!((got - want).abs() <= EPS);
}

#[test]
fn sir2_topology_and_window() {
    let m = load_model("sir2.json");
    let u = valuation(&[0.05, 0.04]);
    let c = m.structure().unwrap().instantiate::<f64>(&u).unwrap();
    assert_eq!(c.num_states(), 5);
    let target = c.label("extinct").unwrap().to_vec();
    let left: Vec<bool> = target.iter().map(|t| !t).collect();
    let q = generator(&c);
    // Phase one: leaving the left operand before t1 fails.
    let not_left: Vec<bool> = left.iter().map(|l| !l).collect();
    let mid = propagate(&q, &not_left, &start(&c), 1.0);
    let mid: Vec<f64> = mid
        .iter()
        .zip(&left)
        .map(|(p, &l)| if l { *p } else { 0.0 })
        .collect();
    let absorbing: Vec<bool> = target.iter().zip(&left).map(|(&t, &l)| t || !l).collect();
    let end = propagate(&q, &absorbing, &mid, 1.0);
    let want: f64 = end
        .iter()
        .zip(&target)
        .filter(|(_, &t)| t)
        .map(|(p, _)| p)
        .sum();
    let got = interval_reach(&c, "extinct", None, 1.0, 2.0, EPS).unwrap();
    assert!((got - want).abs() <= 1e-6, "{got} vs {want}");
    assert!(got > 0.0);
}

#[test]
fn zero_start_window_equals_reach() {
    let m = sir(15, 5);
    let u = valuation(&[0.05, 0.04]);
    let c = m.structure().unwrap().instantiate::<f64>(&u).unwrap();
    for tau in [5.0, 40.0, 120.0] {
        let a = interval_reach(&c, "extinct", None, 0.0, tau, EPS).unwrap();
        let b = reach_probability(&c, "extinct", tau, EPS).unwrap();
        assert!((a - b).abs() <= 2.0 * EPS);
    }
}

#[test]
fn sir20_horizons_are_monotone() {
    let m = load_model("sir20.json");
    let phi = load_measures("sir_extinction26.json");
    assert_eq!(phi.len(), 26);
    let samples = sample_valuations(&m, 5, 11).unwrap();
    for u in &samples.valuations {
        let v = solve_measures(&m, u, &phi, EPS).unwrap();
        assert!(v.windows(2).all(|w| w[0] <= w[1] + 2.0 * EPS), "{v:?}");
        assert!(v[25] > v[0]);
    }
    assert!(
        solve_measures(&m, &samples.valuations[0], &MeasureSet::default(), EPS)
            .unwrap()
            .is_empty()
    );
}

fn mixed_measures() -> MeasureSet {
    let mut ms = extinction_family("extinct", 100.0, 100.0, 26).measures;
    ms.push(Measure {
        id: "ext_60".into(),
        kind: MeasureKind::Reach {
            target: "extinct".into(),
            tau: 60.0,
        },
    });
    ms.push(Measure {
        id: "inf_10".into(),
        kind: MeasureKind::InstantReward {
            reward: "infected".into(),
            t: 10.0,
        },
    });
    MeasureSet::new(ms).unwrap()
}

#[test]
fn bounds_sandwich_exact_solution() {
    let m = sir(15, 5);
    let phi = mixed_measures();
    let samples = sample_valuations(&m, 4, 3).unwrap();
    for u in &samples.valuations {
        let exact = solve_measures(&m, u, &phi, EPS).unwrap();
        for delta in [1e-1, 1e-2, 1e-3] {
            let opts = ApproxOptions {
                delta,
                eps: EPS,
                rel_gap: 1.0,
            };
            let b = bound_measures(&m, u, &phi, opts, None).unwrap();
            for k in 0..phi.len() {
                assert!(b.lower[k] <= exact[k] + 2.0 * EPS, "{delta} {k}");
                assert!(exact[k] <= b.upper[k] + 2.0 * EPS, "{delta} {k}");
            }
        }
    }
}

#[test]
fn sir20_rel_gap_contains_exact() {
    let m = load_model("sir20.json");
    let phi = load_measures("sir_extinction26.json");
    let samples = sample_valuations(&m, 3, 5).unwrap();
    for u in &samples.valuations {
        let exact = solve_measures(&m, u, &phi, EPS).unwrap();
        let b = bound_measures(&m, u, &phi, ApproxOptions::default(), None).unwrap();
        assert!(b.converged);
        for k in 0..26 {
            assert!(b.lower[k] <= exact[k] + 2.0 * EPS && exact[k] <= b.upper[k] + 2.0 * EPS);
            assert!(b.upper[k] - b.lower[k] <= 1e-2 * b.upper[k].max(1e-12));
        }
    }
}

#[test]
fn sir100_meets_relative_gap() {
    let m = sir(95, 5);
    let phi = extinction_family("extinct", 100.0, 100.0, 26);
    let u = valuation(&[0.05, 0.04]);
    let b = bound_measures(&m, &u, &phi, ApproxOptions::default(), None).unwrap();
    assert!(b.converged);
    for k in 0..26 {
        assert!(
            (b.upper[k] - b.lower[k]) / b.upper[k].max(1e-12) <= 0.01,
            "{k}: {b:?}"
        );
    }
}

#[test]
fn threshold_one_gives_trivial_bounds() {
    let m = sir(15, 5);
    let phi = MeasureSet::new(vec![Measure {
        id: "r".into(),
        kind: MeasureKind::Reach {
            target: "extinct".into(),
            tau: 50.0,
        },
    }])
    .unwrap();
    let u = valuation(&[0.05, 0.04]);
    let opts = ApproxOptions {
        delta: 1.0,
        eps: EPS,
        rel_gap: 1.0,
    };
    let b = bound_measures(&m, &u, &phi, opts, None).unwrap();
    assert_eq!((b.lower[0], b.upper[0]), (0.0, 1.0));
    let bad = ApproxOptions { delta: 0.0, ..opts };
    assert!(bound_measures(&m, &u, &phi, bad, None).is_err());
}

#[test]
fn refinement_nests_and_shrinks() {
    let m = sir(15, 5);
    let phi = mixed_measures();
    let u = valuation(&[0.051, 0.039]);
    let exact = solve_measures(&m, &u, &phi, EPS).unwrap();
    let opts = ApproxOptions {
        delta: 0.2,
        eps: EPS,
        rel_gap: 1.0,
    };
    let mut prev = bound_measures(&m, &u, &phi, opts, None).unwrap();
    let mut width = prev.width();
    for _ in 0..14 {
        let next = refine_solution(&prev, &m, &u, &phi, EPS).unwrap();
        for k in 0..phi.len() {
            assert!(prev.lower[k] <= next.lower[k] && next.upper[k] <= prev.upper[k]);
            assert!(next.lower[k] <= exact[k] + 2.0 * EPS && exact[k] <= next.upper[k] + 2.0 * EPS);
        }
        assert!(next.width() <= width);
        width = next.width();
        prev = next;
    }
    assert!(width < 1e-4, "{width}");
    let exact_interval = uctmc_core::checker::IntervalSolution {
        valuation_index: 0,
        lower: exact.clone(),
        upper: exact.clone(),
        delta: 1e-3,
        converged: true,
    };
    assert_eq!(
        refine_solution(&exact_interval, &m, &u, &phi, EPS).unwrap(),
        exact_interval
    );
}

#[test]
fn results_independent_of_thread_count() {
    let m = sir(15, 5);
    let phi = load_measures("sir_extinction26.json");
    let us = sample_valuations(&m, 12, 21).unwrap().valuations;
    let a = solve_all(&m, &us, &phi, EPS, 1).unwrap();
    let b = solve_all(&m, &us, &phi, EPS, 4).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().enumerate().all(|(i, s)| s.valuation_index == i));
    let opts = ApproxOptions::default();
    let x = bound_all(&m, &us, &phi, opts, Some(0.5), 1).unwrap();
    let y = bound_all(&m, &us, &phi, opts, Some(0.5), 3).unwrap();
    assert_eq!(x, y);
    for (s, b) in a.iter().zip(&x) {
        for k in 0..phi.len() {
            assert!(b.lower[k] <= s.values[k] + 2.0 * EPS && s.values[k] <= b.upper[k] + 2.0 * EPS);
        }
    }
}

#[test]
fn band_contains_box_and_curves() {
    let m = load_model("sir20.json");
    let phi = load_measures("sir_extinction26.json");
    let horizons = phi.horizon_family().unwrap();
    let us = sample_valuations(&m, 20, 2).unwrap().valuations;
    let sols = solve_all(&m, &us, &phi, EPS, 2).unwrap();
    let lower: Vec<f64> = (0..26)
        .map(|k| {
            sols.iter()
                .map(|s| s.values[k])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let upper: Vec<f64> = (0..26)
        .map(|k| {
            sols.iter()
                .map(|s| s.values[k])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let band = region_to_curve(&lower, &upper, &horizons).unwrap();
    for k in 0..26 {
        assert!(band.lower[k] <= band.upper[k]);
        for s in &sols {
            assert!(band.lower[k] <= s.values[k] && s.values[k] <= band.upper[k]);
        }
    }
    assert!(band.lower.windows(2).all(|w| w[0] <= w[1]));
    assert!(band.upper.windows(2).all(|w| w[0] <= w[1]));
}
