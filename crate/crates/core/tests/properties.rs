//! Randomized invariants across pressure, Bowen roots and suspensions.

use std::sync::Arc;

use proptest::prelude::*;

use thermoflow::pressure::{entropy, equilibrium, integrate, pressure, pressure_oracle_orbits};
use thermoflow::suspension::{abramov_entropy, flow_entropy, flow_mme, flow_pressure, FiberPotential};
use thermoflow::{BowenProblem, LcPotential, Roof, Sft};

fn shift(i: usize) -> Arc<Sft> {
    match i {
        0 => Arc::new(Sft::full(2).unwrap()),
        1 => Arc::new(Sft::golden_mean()),
        _ => Arc::new(Sft::validate(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap()),
    }
}

fn potential(sft_index: usize, depth: usize, raw: &[f64]) -> LcPotential {
    let sft = shift(sft_index);
    let len = sft.words(depth).len();
    LcPotential::from_values(sft, depth, raw[..len].to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn equilibrium_attains_pressure(s in 0usize..3, d in 1usize..4, raw in prop::collection::vec(-3.0f64..3.0, 27)) {
        let p = potential(s, d, &raw);
        let mu = equilibrium(&p).unwrap();
        let gap = entropy(&mu) + integrate(&p, &mu).unwrap() - pressure(&p).unwrap().value;
        prop_assert!(gap.abs() < 1e-10);
    }

    #[test]
    fn pressure_is_between_bounds(s in 0usize..3, raw in prop::collection::vec(-3.0f64..3.0, 27)) {
        // h + min <= P <= h + max
        let p = potential(s, 2, &raw);
        let h = pressure(&LcPotential::zero(Arc::clone(p.sft()))).unwrap().value;
        let v = pressure(&p).unwrap().value;
        prop_assert!(v >= h + p.min() - 1e-12 && v <= h + p.max() + 1e-12);
    }

    #[test]
    fn orbit_sums_approach_pressure(s in 0usize..2, raw in prop::collection::vec(-1.0f64..1.0, 4)) {
        let p = potential(s, 1, &raw);
        let z = pressure_oracle_orbits(&p, 14).unwrap();
        let err = (z[13].1 - pressure(&p).unwrap().value).abs();
        prop_assert!(err < 1.0 / 14.0, "{}", err);
    }

    #[test]
    fn bowen_root_is_a_root(s in 0usize..3, d in 1usize..3, raw in prop::collection::vec(0.2f64..3.0, 9), shift_by in -2.0f64..2.0) {
        let roof = Roof::new(potential(s, d, &raw)).unwrap();
        let delta = LcPotential::constant(Arc::clone(roof.sft()), shift_by).unwrap();
        let problem = BowenProblem::new(&delta, &roof).unwrap();
        let sol = problem.solve().unwrap();
        prop_assert!(problem.pressure_at(sol.t_star).unwrap().abs() <= 1e-10);
        prop_assert!(sol.bracket.0 <= sol.t_star && sol.t_star <= sol.bracket.1);
    }

    #[test]
    fn roof_scaling_divides_entropy(s in 0usize..3, raw in prop::collection::vec(0.2f64..3.0, 9), c in 0.25f64..4.0) {
        let roof = Roof::new(potential(s, 2, &raw)).unwrap();
        let scaled = Roof::new(roof.scale(c).unwrap()).unwrap();
        let (h, hc) = (flow_entropy(&roof).unwrap().t_star, flow_entropy(&scaled).unwrap().t_star);
        prop_assert!((hc * c - h).abs() < 1e-9);
    }

    #[test]
    fn mme_realizes_flow_entropy(s in 0usize..3, raw in prop::collection::vec(0.2f64..3.0, 9)) {
        let roof = Roof::new(potential(s, 2, &raw)).unwrap();
        let nu = flow_mme(&roof).unwrap();
        prop_assert!((abramov_entropy(&nu) - flow_entropy(&roof).unwrap().t_star).abs() < 1e-9);
    }

    #[test]
    fn constant_observable_shifts_flow_pressure(s in 0usize..3, raw in prop::collection::vec(0.2f64..3.0, 9), c in -3.0f64..3.0) {
        let roof = Roof::new(potential(s, 2, &raw)).unwrap();
        let g = FiberPotential::constant(Arc::clone(roof.sft()), c).unwrap();
        let h = flow_entropy(&roof).unwrap().t_star;
        prop_assert!((flow_pressure(&g, &roof).unwrap().t_star - h - c).abs() < 1e-10);
    }
}
