use mksys_core::gen::Gen;
use mksys_core::knight::{knight_behavior, knight_system, uniformize, uniformize_morphism, Refinement};
use mksys_core::rational::{q, Q};
use mksys_core::time::clock_system;
use mksys_core::{DetKernel, FiniteObject, Kernel, Morphism};
use proptest::prelude::*;

fn row_kernel(row: Vec<Q>) -> Kernel<Q> {
    let n = row.len();
    Kernel::from_dense(FiniteObject::unit(), FiniteObject::range(n), vec![row]).unwrap()
}

/// Prefix sums written out directly.
fn cumulative_oracle(row: &[Q]) -> Vec<Q> {
    (0..=row.len()).map(|k| row[..k].iter().fold(q(0, 1), |a, b| a + b)).collect()
}

#[test]
fn third_and_two_thirds() {
    let row = vec![q(1, 3), q(2, 3)];
    let p = uniformize(&row_kernel(row.clone()));
    assert_eq!(p.cells[0].breakpoints, cumulative_oracle(&row));
    assert_eq!(p.cells[0].breakpoints, vec![q(0, 1), q(1, 3), q(1, 1)]);
    assert_eq!(p.apply(0, &q(1, 3)), Some(0));
    assert_eq!(p.apply(0, &q(1, 2)), Some(1));
}

#[test]
fn dirac_row_is_one_full_interval() {
    let p = uniformize(&row_kernel(vec![q(0, 1), q(1, 1), q(0, 1)]));
    assert_eq!(p.lengths(0), vec![q(0, 1), q(1, 1), q(0, 1)]);
    let (r, g) = p.refinement().unwrap();
    assert_eq!(r.weights, vec![q(1, 1)]);
    assert_eq!(g.map(), &[1]);
}

#[test]
fn uniform_row_gives_quarters() {
    let p = uniformize(&row_kernel(vec![q(1, 4); 4]));
    assert_eq!(p.cells[0].breakpoints, (0..=4).map(|k| q(k, 4)).collect::<Vec<_>>());
}

#[test]
fn zero_targets_keep_empty_intervals() {
    let p = uniformize(&row_kernel(vec![q(1, 2), q(0, 1), q(1, 2)]));
    assert_eq!(p.cells[0].breakpoints, vec![q(0, 1), q(1, 2), q(1, 2), q(1, 1)]);
    assert_eq!(p.cells[0].len(), 3);
}

#[test]
fn partitions_encode_breakpoints_as_strings() {
    let p = uniformize(&row_kernel(vec![q(1, 3), q(2, 3)]));
    let v = p.to_json();
    assert_eq!(v["cells"][0]["breakpoints"], serde_json::json!(["0/1", "1/3", "1/1"]));
    assert_eq!(v["cells"][0]["targets"], serde_json::json!(["0", "1"]));
}

#[test]
fn possibilistic_kernels_are_rejected() {
    let mut g = Gen::new(5);
    let x = FiniteObject::range(2);
    assert!(uniformize_morphism(&g.poss(&x, &x)).is_err());
}

fn random_kernel(seed: u64) -> Morphism {
    let mut g = Gen::new(seed);
    let dom = g.object(3);
    let cod = g.object(4);
    g.stoch(&dom, &cod)
}

/// Every breakpoint, every midpoint between neighbours, and 1.
fn probes(bs: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = bs.iter().filter(|b| **b > q(0, 1)).cloned().collect();
    out.extend(bs.windows(2).map(|w| (w[0].clone() + &w[1]) / q(2, 1)).filter(|m| *m > q(0, 1)));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_lengths_reproduce_the_kernel(seed in any::<u64>()) {
        let f = random_kernel(seed);
        let p = uniformize_morphism(&f).unwrap();
        prop_assert_eq!(Morphism::Stoch(p.to_kernel().unwrap()), f.clone());
        for cell in &p.cells {
            prop_assert!(cell.breakpoints.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(cell.breakpoints.first().unwrap(), &q(0, 1));
            prop_assert_eq!(cell.breakpoints.last().unwrap(), &q(1, 1));
        }
    }

    #[test]
    fn thresholds_cut_initial_intervals(seed in any::<u64>()) {
        let p = uniformize_morphism(&random_kernel(seed)).unwrap();
        for cell in &p.cells {
            for t in 0..cell.len() {
                for x in probes(&cell.breakpoints) {
                    prop_assert_eq!(cell.apply(&x).unwrap() <= t, x <= cell.cumulative(t));
                }
            }
        }
    }

    #[test]
    fn refinement_pushes_forward_to_the_kernel(seed in any::<u64>()) {
        let f = random_kernel(seed);
        let (r, g) = uniformize_morphism(&f).unwrap().refinement().unwrap();
        prop_assert!(r.weights.iter().all(|w| *w > q(0, 1)));
        let composite = r.law().unwrap().tensor_id(f.dom()).unwrap().then(&Morphism::Det(g)).unwrap();
        prop_assert_eq!(composite, f);
    }

    #[test]
    fn deterministic_kernels_round_trip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (dom, cod) = (g.object(3), g.object(3));
        let d = g.det(&dom, &cod);
        let p = uniformize_morphism(&Morphism::Det(d.clone())).unwrap();
        prop_assert_eq!(p.as_function(), Some(d));
    }
}

#[test]
fn a_coarse_refinement_is_rejected() {
    let p = uniformize(&row_kernel(vec![q(1, 3), q(2, 3)]));
    let coarse = Refinement::common(&[&uniformize(&row_kernel(vec![q(1, 1)]))]).unwrap();
    assert!(p.quantile_map(&coarse).is_err());
}

#[test]
fn knight_over_the_unit_is_the_clock() {
    let k = knight_system(&FiniteObject::unit(), 3).unwrap();
    assert_eq!(k.system, clock_system(3).unwrap());
    assert!((0..=3).all(|n| k.params.at(n).is_unit()));
}

#[test]
fn binary_knight_has_only_choices() {
    let bit = FiniteObject::range(2);
    let k = knight_system(&bit, 3).unwrap();
    k.system.validate().unwrap();
    for n in 0..=3 {
        assert_eq!(k.params.at(n).size(), 1 << n);
        assert!(k.system.state.at(n).is_unit() && k.system.output.at(n).is_unit() && k.system.input.at(n).is_unit());
    }
    for (n, u) in k.update.iter().enumerate() {
        assert_eq!(*u, Morphism::discard(&bit.pow(n + 1)));
    }
}

#[test]
fn knight_behavior_with_iid_choices_is_the_chain() {
    let mut g = Gen::new(41);
    for _ in 0..10 {
        let s = g.atom(3);
        let init = g.distribution(&s);
        let update = g.stoch(&s, &s);
        for horizon in 0..=2 {
            let b = knight_behavior(&init, &update, horizon).unwrap();
            assert!(b.matches_unroll(&init, &update).unwrap().iter().all(|&ok| ok));
            assert!(b.paths.iter().all(|p| p.dom().size() == b.refinement.omega.size().pow(p.cod().n_atoms() as u32)));
        }
    }
}

#[test]
fn knight_behavior_of_the_absorbing_chain() {
    let s = FiniteObject::range(2);
    let init = Morphism::Det(DetKernel::new(FiniteObject::unit(), s.clone(), vec![0]).unwrap());
    let update = Morphism::Stoch(Kernel::from_dense(s.clone(), s.clone(), vec![vec![q(1, 2), q(1, 2)], vec![q(0, 1), q(1, 1)]]).unwrap());
    let b = knight_behavior(&init, &update, 2).unwrap();
    assert_eq!(b.refinement.weights, vec![q(1, 2), q(1, 2)]);
    // Low choices stay, high ones move to the absorbing state.
    let path = |ws: &[usize]| s.pow(3).decode(b.paths[2].apply(b.refinement.omega.pow(3).encode(ws)));
    assert_eq!(path(&[0, 0, 0]), vec![0, 0, 0]);
    assert_eq!(path(&[1, 0, 1]), vec![0, 0, 1]);
    assert_eq!(path(&[0, 1, 0]), vec![0, 1, 1]);
}
