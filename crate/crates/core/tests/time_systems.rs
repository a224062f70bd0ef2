use std::collections::BTreeMap;

use mksys_core::arena::{DetLens, Interface};
use mksys_core::gen::Gen;
use mksys_core::markov::{displays_cond_indep, distribution, marginal};
use mksys_core::morphism::atoms_in;
use mksys_core::rational::{q, Q};
use mksys_core::time::{
    chart_cell, check_time_coherence, clock_lens, clock_system, compose_system_with_lens, factorization_check,
    inner_laws, lift_trajectory, nabla_trajectory, open_markov, search_coherence_counterexample, unroll_trajectory,
    GSystem, GTrajectory, InputPolicy, StepSystem, Wiring,
};
use mksys_core::{DetKernel, Error, FiniteObject, Instance, Kernel, Morphism};

fn bit() -> FiniteObject {
    FiniteObject::range(2)
}

fn absorbing_chain(horizon: usize) -> GSystem {
    let s = bit();
    let update = Morphism::Stoch(
        Kernel::from_dense(s.clone(), s.clone(), vec![vec![q(1, 2), q(1, 2)], vec![q(0, 1), q(1, 1)]]).unwrap(),
    );
    open_markov(&s, &FiniteObject::unit(), &s, &DetKernel::identity(&s), &update, horizon).unwrap()
}

fn dirac0() -> Morphism {
    distribution(&bit(), vec![q(1, 1), q(0, 1)]).unwrap()
}

/// Nonzero cells of a distribution, keyed by path tuple.
fn table(p: &Morphism) -> BTreeMap<Vec<usize>, Q> {
    let cod = p.cod().clone();
    (0..cod.size())
        .filter_map(|j| p.prob(0, j).filter(|w| *w != q(0, 1)).map(|w| (cod.decode(j), w)))
        .collect()
}

#[test]
fn absorbing_chain_two_steps() {
    let sys = absorbing_chain(2);
    let traj = unroll_trajectory(&sys, &dirac0(), &InputPolicy::Closed).unwrap();
    let expected: BTreeMap<Vec<usize>, Q> =
        [(vec![0, 0, 0], q(1, 4)), (vec![0, 0, 1], q(1, 4)), (vec![0, 1, 1], q(1, 2))].into_iter().collect();
    assert_eq!(table(&traj.phi[2]), expected);
}

#[test]
fn update_one_draws_from_the_last_state() {
    let sys = absorbing_chain(2);
    let s = bit();
    for s0 in 0..2 {
        for s1 in 0..2 {
            let row = sys.state.at(1).encode(&[s0, s1]);
            for s2 in 0..2 {
                let col = sys.state.at(2).encode(&[s0, s1, s2]);
                let want = if s1 == 0 { q(1, 2) } else if s2 == 1 { q(1, 1) } else { q(0, 1) };
                assert_eq!(sys.update[1].prob(row, col).unwrap(), want);
            }
        }
    }
    assert_eq!(sys.state.at(2), &s.pow(3));
}

#[test]
fn identity_update_duplicates_the_last_state() {
    let s = FiniteObject::range(3);
    let sys = open_markov(&s, &FiniteObject::unit(), &s, &DetKernel::identity(&s), &Morphism::identity(&s), 2).unwrap();
    let d = sys.update[1].as_det().unwrap();
    for a in 0..3 {
        for b in 0..3 {
            let out = sys.state.at(2).decode(d.apply(sys.state.at(1).encode(&[a, b])));
            assert_eq!(out, vec![a, b, b]);
        }
    }
    for n in 0..=2 {
        assert_eq!(sys.expose[n], DetKernel::identity(sys.state.at(n)));
    }
}

#[test]
fn uniform_start_with_identity_update_gives_the_diagonal() {
    let s = bit();
    let sys = open_markov(&s, &FiniteObject::unit(), &s, &DetKernel::identity(&s), &Morphism::identity(&s), 1).unwrap();
    let init = distribution(&s, vec![q(1, 2), q(1, 2)]).unwrap();
    let traj = unroll_trajectory(&sys, &init, &InputPolicy::Closed).unwrap();
    let expected: BTreeMap<Vec<usize>, Q> = [(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))].into_iter().collect();
    assert_eq!(table(&traj.phi[1]), expected);
}

#[test]
fn deterministic_updates_give_dirac_paths() {
    let s = FiniteObject::range(3);
    let step = DetKernel::new(s.clone(), s.clone(), vec![1, 2, 0]).unwrap();
    let sys = open_markov(&s, &FiniteObject::unit(), &s, &DetKernel::identity(&s), &Morphism::Det(step), 3).unwrap();
    let init = Morphism::Det(DetKernel::new(FiniteObject::unit(), s.clone(), vec![2]).unwrap());
    let traj = unroll_trajectory(&sys, &init, &InputPolicy::Closed).unwrap();
    let expected: BTreeMap<Vec<usize>, Q> = [(vec![2, 0, 1, 2], q(1, 1))].into_iter().collect();
    assert_eq!(table(&traj.phi[3]), expected);
}

/// Sums, over every state and input path, the product of the initial,
/// policy and update weights.
fn enumerate_paths(step: &StepSystem, init: &Morphism, policy: &Morphism, n: usize) -> BTreeMap<Vec<usize>, Q> {
    let (ns, ni) = (step.state.size(), step.input.size());
    let mut out: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
    let mut stack: Vec<(Vec<usize>, Q)> =
        (0..ns).map(|s0| (vec![s0], init.prob(0, s0).unwrap())).filter(|(_, w)| *w != q(0, 1)).collect();
    while let Some((path, w)) = stack.pop() {
        if path.len() == n + 1 {
            *out.entry(path).or_insert_with(|| q(0, 1)) += w;
            continue;
        }
        let last = *path.last().unwrap();
        let o = step.expose.apply(last);
        for i in 0..ni {
            let wi = policy.prob(o, i).unwrap();
            for next in 0..ns {
                let wu = step.update.prob(last * ni + i, next).unwrap();
                let total = w.clone() * wi.clone() * wu;
                if total != q(0, 1) {
                    let mut p = path.clone();
                    p.push(next);
                    stack.push((p, total));
                }
            }
        }
    }
    out
}

#[test]
fn unrolling_matches_path_enumeration() {
    let mut g = Gen::new(31);
    for case in 0..20 {
        let step = g.step_system(3, Instance::Stoch, case % 4 == 0);
        let horizon = 1 + case % 4;
        let sys = step.unroll(horizon).unwrap();
        let init = g.distribution(&step.state);
        let pol = g.stoch(&step.output, &step.input);
        let policy = if step.input.is_unit() { InputPolicy::Closed } else { InputPolicy::from_step(&sys, &pol).unwrap() };
        let traj = unroll_trajectory(&sys, &init, &policy).unwrap();
        for n in 0..=horizon {
            assert_eq!(table(&traj.phi[n]), enumerate_paths(&step, &init, &pol, n), "case {case}, node {n}");
        }
        assert!(check_time_coherence(&traj, &sys).unwrap().iter().all(|&b| b));
        for n in 0..horizon {
            let pushed = traj.s[n].then(&Morphism::Det(sys.expose[n].clone()).tensor_id(sys.input.at(n + 1)).unwrap()).unwrap();
            assert_eq!(pushed, traj.p[n]);
        }
    }
}

#[test]
fn possibilistic_systems_unroll_too() {
    let mut g = Gen::new(32);
    for _ in 0..10 {
        let step = g.step_system(3, Instance::Poss, false);
        let sys = step.unroll(3).unwrap();
        let init = g.kernel(&FiniteObject::unit(), &step.state, Instance::Poss);
        let pol = g.kernel(&step.output, &step.input, Instance::Poss);
        let traj = unroll_trajectory(&sys, &init, &InputPolicy::from_step(&sys, &pol).unwrap()).unwrap();
        assert!(check_time_coherence(&traj, &sys).unwrap().iter().all(|&b| b));
    }
}

#[test]
fn the_clock_is_trivial() {
    let clock = clock_system(3).unwrap();
    clock.validate().unwrap();
    for n in 0..=3 {
        assert!(clock.state.at(n).is_unit() && clock.input.at(n).is_unit() && clock.output.at(n).is_unit());
    }
    for n in 0..3 {
        assert_eq!(*clock.state.restriction(n), DetKernel::identity(&FiniteObject::unit()));
    }
    let u = Morphism::identity(&FiniteObject::unit());
    let traj = unroll_trajectory(&clock, &u, &InputPolicy::Closed).unwrap();
    assert!(check_time_coherence(&traj, &clock).unwrap().iter().all(|&b| b));
    assert!(traj.phi.iter().all(|p| *p == u));
}

#[test]
fn clock_on_the_left_leaves_trajectories_unchanged() {
    let sys = absorbing_chain(2);
    let traj = unroll_trajectory(&sys, &dirac0(), &InputPolicy::Closed).unwrap();
    let clock = clock_system(2).unwrap();
    let tick = unroll_trajectory(&clock, &Morphism::identity(&FiniteObject::unit()), &InputPolicy::Closed).unwrap();
    for n in 0..2 {
        let sq = traj.square(&sys, n).unwrap();
        let clock_sq = tick.square(&clock, n).unwrap();
        assert_eq!(clock_sq.right, clock_lens());
        // The clock's square is the unit for x-composition on the left.
        let moved = mksys_core::SysXMor::new(
            mksys_core::SystemObject::unit(),
            mksys_core::SystemObject::unit(),
            Morphism::identity(&FiniteObject::unit()),
            Morphism::identity(&FiniteObject::unit()),
        )
        .unwrap()
        .compose(&sq.top)
        .unwrap();
        assert_eq!(moved, sq.top);
    }
}

#[test]
fn identity_wiring_changes_nothing() {
    let mut g = Gen::new(33);
    for _ in 0..5 {
        let step = g.step_system(2, Instance::Stoch, false);
        let sys = step.unroll(2).unwrap();
        let id = Wiring::identity(&sys);
        assert_eq!(compose_system_with_lens(&sys, &id).unwrap(), sys);
        let init = g.distribution(&step.state);
        let pol = g.stoch(&step.output, &step.input);
        let traj = unroll_trajectory(&sys, &init, &InputPolicy::from_step(&sys, &pol).unwrap()).unwrap();
        let cells: Vec<_> = (0..2)
            .map(|n| {
                let sq = traj.square(&sys, n).unwrap();
                chart_cell(&sq.bottom, &id.lens(n), &traj.p[n]).unwrap()
            })
            .collect();
        assert_eq!(lift_trajectory(&traj, &sys, &id, &cells).unwrap(), traj);
    }
}

#[test]
fn closing_wiring_matches_the_direct_closed_system() {
    let mut g = Gen::new(34);
    for _ in 0..10 {
        let step = g.step_system(3, Instance::Stoch, false);
        // Discard outputs; feed a constant input.
        let constant = g.below(step.input.size());
        let u = FiniteObject::unit();
        let feed = DetKernel::new(step.output.clone(), step.input.clone(), vec![constant; step.output.size()]).unwrap();
        let lens = DetLens::new(step.interface(), Interface::unit(), DetKernel::structural(&[&step.output], &[]), feed).unwrap();
        let wired = compose_system_with_lens(&step.unroll(2).unwrap(), &Wiring::from_step(&lens, 2).unwrap()).unwrap();
        let pin = Morphism::Det(DetKernel::new(step.state.clone(), step.state.tensor(&step.input), (0..step.state.size()).map(|s| s * step.input.size() + constant).collect()).unwrap());
        let closed_update = pin.then(&step.update).unwrap();
        let direct = open_markov(&step.state, &u, &u, &DetKernel::structural(&[&step.state], &[]), &closed_update, 2).unwrap();
        assert_eq!(wired, direct);
    }
}

#[test]
fn wiring_composition_is_associative_and_lifts_lens_composition() {
    let mut g = Gen::new(35);
    for _ in 0..10 {
        let step = g.step_system(2, Instance::Stoch, false);
        let sys = step.unroll(2).unwrap();
        let l1 = g.step_lens(&step.interface(), 2);
        let l2 = g.step_lens(&l1.dst, 2);
        let l3 = g.step_lens(&l2.dst, 2);
        let (w1, w2, w3) = (
            Wiring::from_step(&l1, 2).unwrap(),
            Wiring::from_step(&l2, 2).unwrap(),
            Wiring::from_step(&l3, 2).unwrap(),
        );
        let w12 = w1.compose(&w2).unwrap();
        assert_eq!(w12, Wiring::from_step(&l1.compose(&l2).unwrap(), 2).unwrap());
        assert_eq!(w12.compose(&w3).unwrap(), w1.compose(&w2.compose(&w3).unwrap()).unwrap());
        let stepwise = compose_system_with_lens(&compose_system_with_lens(&sys, &w1).unwrap(), &w2).unwrap();
        assert_eq!(stepwise, compose_system_with_lens(&sys, &w12).unwrap());
        assert_eq!(stepwise, step.wire(&l1).unwrap().wire(&l2).unwrap().unroll(2).unwrap());
    }
}

#[test]
fn non_natural_wiring_is_rejected() {
    let sys = absorbing_chain(2);
    let mut w = Wiring::identity(&sys);
    // Relabel outputs at node 1 only.
    let o1 = sys.output.at(1).clone();
    w.expose[1] = DetKernel::from_fn(o1.clone(), o1.clone(), |x| x ^ 1).unwrap();
    assert!(matches!(w.validate(), Err(Error::NaturalityViolation(_))));
}

#[test]
fn relabelled_outputs_push_forward() {
    let sys = absorbing_chain(2);
    let traj = unroll_trajectory(&sys, &dirac0(), &InputPolicy::Closed).unwrap();
    let s = bit();
    let flip = DetKernel::new(s.clone(), s.clone(), vec![1, 0]).unwrap();
    let lens = DetLens::new(
        Interface::new(FiniteObject::unit(), s.clone()),
        Interface::new(FiniteObject::unit(), s.clone()),
        flip.clone(),
        DetKernel::structural(&[&s], &[]),
    )
    .unwrap();
    let w = Wiring::from_step(&lens, 2).unwrap();
    let cells: Vec<_> = (0..2)
        .map(|n| chart_cell(&traj.square(&sys, n).unwrap().bottom, &w.lens(n), &traj.p[n]).unwrap())
        .collect();
    let lifted = lift_trajectory(&traj, &sys, &w, &cells).unwrap();
    for n in 0..2 {
        let relabel = Morphism::Det(w.expose[n].clone());
        assert_eq!(lifted.p[n], traj.p[n].then(&relabel).unwrap());
        assert_eq!(lifted.s[n], traj.s[n]);
    }
}

/// A composite with exogenous i.i.d. outer inputs, unrolled directly.
fn random_composite(g: &mut Gen, horizon: usize, closed: bool) -> (GSystem, Wiring, GTrajectory) {
    let step = g.step_system(2, Instance::Stoch, false);
    let lens = if closed {
        let back = g.det(&step.output, &step.input);
        DetLens::new(step.interface(), Interface::new(FiniteObject::unit(), step.output.clone()), DetKernel::identity(&step.output), back)
            .unwrap()
    } else {
        g.step_lens(&step.interface(), 2)
    };
    let sys = step.unroll(horizon).unwrap();
    let wiring = Wiring::from_step(&lens, horizon).unwrap();
    let composed = compose_system_with_lens(&sys, &wiring).unwrap();
    let init = g.distribution(&step.state);
    let policy = if lens.dst.a.is_unit() {
        InputPolicy::Closed
    } else {
        let law = g.distribution(&lens.dst.a);
        let iid = Morphism::discard(&lens.dst.c).then(&law).unwrap();
        InputPolicy::from_step(&composed, &iid).unwrap()
    };
    let tprime = unroll_trajectory(&composed, &init, &policy).unwrap();
    (sys, wiring, tprime)
}

#[test]
fn composites_factorize_when_both_hypotheses_hold() {
    let mut g = Gen::new(36);
    let mut seen = 0;
    let mut case = 0;
    while seen < 20 {
        case += 1;
        assert!(case < 400, "too few composites satisfy both hypotheses");
        let (sys, wiring, tprime) = random_composite(&mut g, 2, case % 2 == 0);
        let report = factorization_check(&tprime, &sys, &wiring).unwrap();
        assert!(report.consistent(), "case {case}: {:?}", report.factorizes);
        if report.all_hypotheses_hold() {
            assert!(report.factorizes.iter().all(|&b| b));
            seen += 1;
        }
    }
}

#[test]
fn lifted_trajectories_display_the_conditional_independence() {
    let mut g = Gen::new(37);
    for case in 0..10 {
        let (sys, wiring, tprime) = random_composite(&mut g, 2, case % 2 == 0);
        let report = factorization_check(&tprime, &sys, &wiring).unwrap();
        let lifted = lift_trajectory(&report.inner, &sys, &wiring, &report.cells).unwrap();
        let mu = inner_laws(&lifted, &sys, &wiring).unwrap();
        for (n, m) in mu.iter().enumerate() {
            let b = [
                sys.state.at(n),
                wiring.outer_input.at(n + 1),
                wiring.inner_input.at(n + 1),
                wiring.inner_output.at(n),
                wiring.outer_output.at(n),
            ];
            assert!(displays_cond_indep(m, &atoms_in(&b, &[0]), &atoms_in(&b, &[3, 2]), &atoms_in(&b, &[1])).unwrap());
        }
    }
}

#[test]
fn correlated_exogenous_input_breaks_the_independence_hypothesis() {
    // The outer input copies the initial state into every step: i2(n+1)
    // is then tied to s(0) beyond what o1(n) reveals.
    let s = bit();
    let step = StepSystem::new(
        DetKernel::structural(&[&s], &[]),
        Morphism::Stoch(Kernel::from_dense(s.tensor(&s), s.clone(), vec![vec![q(1, 2), q(1, 2)]; 4]).unwrap()),
    )
    .unwrap();
    let lens = DetLens::identity(&step.interface());
    let sys = step.unroll(2).unwrap();
    let wiring = Wiring::from_step(&lens, 2).unwrap();
    let composed = compose_system_with_lens(&sys, &wiring).unwrap();
    let init = distribution(&s, vec![q(1, 2), q(1, 2)]).unwrap();
    let mut s_traj = Vec::new();
    // s^n: state history uniform except the first entry is copied into
    // every input.
    for n in 0..2 {
        let (st, inp) = (composed.state.at(n), composed.input.at(n + 1));
        let law = Morphism::from_block_fn(&[st], &[st, inp], |v| {
            let coords = st.decode(v[0]);
            vec![v[0], inp.encode(&vec![coords[0]; n + 1])]
        })
        .unwrap();
        let states = (0..n).fold(init.clone(), |acc, _| {
            acc.tensor(&distribution(&s, vec![q(1, 2), q(1, 2)]).unwrap()).unwrap()
        });
        s_traj.push(states.then(&law).unwrap());
    }
    let tprime = GTrajectory::from_edges(&composed, s_traj).unwrap();
    tprime.validate(&composed).unwrap();
    let report = factorization_check(&tprime, &sys, &wiring).unwrap();
    assert!(!report.independent.iter().all(|&b| b));
}

#[test]
fn counterexample_search_finds_an_incoherent_lift() {
    let (found, stats) = search_coherence_counterexample().unwrap();
    let found = found.expect("a counterexample exists in the family");
    assert!(found.coherence.iter().any(|&b| !b));
    assert!(stats.valid_instances >= 1);
    // The inner trajectory itself is coherent; only the lift is not.
    assert!(check_time_coherence(&found.inner, &found.system).unwrap().iter().all(|&b| b));
}

/// Atom positions that turn `(A B)^len`, starting at `offset`, into
/// `A^len B^len`.
fn unzip(na: usize, nb: usize, len: usize, offset: usize) -> Vec<usize> {
    let at = |t: usize, k: usize| offset + t * (na + nb) + k;
    let a = (0..len).flat_map(|t| (0..na).map(move |k| at(t, k)));
    let b = (0..len).flat_map(|t| (na..na + nb).map(move |k| at(t, k)));
    a.chain(b).collect()
}

#[test]
fn nabla_with_the_clock_unrolls_the_tensor_system() {
    let mut g = Gen::new(38);
    for _ in 0..5 {
        let a = g.step_system(2, Instance::Stoch, false);
        let b = g.step_system(2, Instance::Stoch, false);
        let (sa, sb) = (a.unroll(2).unwrap(), b.unroll(2).unwrap());
        let (ia, ib) = (g.distribution(&a.state), g.distribution(&b.state));
        let (pa, pb) = (g.stoch(&a.output, &a.input), g.stoch(&b.output, &b.input));
        let ta = unroll_trajectory(&sa, &ia, &InputPolicy::from_step(&sa, &pa).unwrap()).unwrap();
        let tb = unroll_trajectory(&sb, &ib, &InputPolicy::from_step(&sb, &pb).unwrap()).unwrap();
        let joint = nabla_trajectory(&sa, &ta, &sb, &tb, None).unwrap();
        let ab = a.tensor(&b).unwrap();
        let sab = ab.unroll(2).unwrap();
        let pol = pa.tensor(&pb).unwrap();
        let direct = unroll_trajectory(&sab, &ia.tensor(&ib).unwrap(), &InputPolicy::from_step(&sab, &pol).unwrap()).unwrap();
        let (nsa, nsb) = (a.state.n_atoms(), b.state.n_atoms());
        let (nia, nib) = (a.input.n_atoms(), b.input.n_atoms());
        for n in 0..=2 {
            let keep = unzip(nsa, nsb, n + 1, 0);
            assert_eq!(joint.phi[n], marginal(&direct.phi[n], &keep).unwrap(), "phi^{n}");
        }
        for n in 0..2 {
            let mut keep = unzip(nsa, nsb, n + 1, 0);
            keep.extend(unzip(nia, nib, n + 1, (nsa + nsb) * (n + 1)));
            assert_eq!(joint.s[n], marginal(&direct.s[n], &keep).unwrap(), "s^{n}");
        }
        // Marginals recover each factor.
        for n in 0..2 {
            let blocks = [sa.state.at(n), sb.state.at(n), sa.input.at(n + 1), sb.input.at(n + 1)];
            assert_eq!(marginal(&joint.s[n], &atoms_in(&blocks, &[0, 2])).unwrap(), ta.s[n]);
            assert_eq!(marginal(&joint.s[n], &atoms_in(&blocks, &[1, 3])).unwrap(), tb.s[n]);
        }
    }
}

#[test]
fn nabla_rejects_a_driver_with_inputs() {
    let sys = absorbing_chain(1);
    let traj = unroll_trajectory(&sys, &dirac0(), &InputPolicy::Closed).unwrap();
    let mut driver = clock_lens();
    driver.dst.a = bit();
    match nabla_trajectory(&sys, &traj, &sys, &traj, Some(&driver)) {
        Err(Error::PreconditionViolation(msg)) => assert_eq!(msg, "I0 must be unit"),
        other => panic!("expected a precondition violation, got {other:?}"),
    }
}
