use mksys_core::arena::{Chart, Interface, XYSquare};
use mksys_core::arenasys::nabla;
use mksys_core::gen::Gen;
use mksys_core::{Error, FiniteObject, Instance, Morphism, SysXYSquare, SystemObject};

#[test]
fn system_transport_squares_validate() {
    let mut g = Gen::new(11);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..10 {
            let ([s, u], [t, v]) = g.sys_grid(2, inst).unwrap();
            s.validate().unwrap();
            u.validate().unwrap();
            t.validate().unwrap();
            v.validate().unwrap();
        }
    }
}

#[test]
fn interchange_on_mixed_grids() {
    let mut g = Gen::new(12);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..5 {
            let ([s, u], [t, v]) = g.sys_grid(2, inst).unwrap();
            let lhs = s.compose_x(&u).unwrap().compose_y(&t.compose_x(&v).unwrap()).unwrap();
            let rhs = s.compose_y(&t).unwrap().compose_x(&u.compose_y(&v).unwrap()).unwrap();
            lhs.validate().unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn y_composition_regenerates_and_associates() {
    let mut g = Gen::new(13);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..5 {
            let (s, t, w) = g.sys_column(2, inst).unwrap();
            assert!(s.y_regenerates(&t).unwrap());
            let lhs = s.compose_y(&t).unwrap().compose_y(&w).unwrap();
            let rhs = s.compose_y(&t.compose_y(&w).unwrap()).unwrap();
            lhs.validate().unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn arena_identity_below_is_a_unit() {
    let mut g = Gen::new(14);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..5 {
            let (s, _, _) = g.sys_column(2, inst).unwrap();
            assert_eq!(s.compose_y(&XYSquare::y_identity(&s.bottom)).unwrap(), s);
        }
    }
}

#[test]
fn x_composition_is_associative() {
    let mut g = Gen::new(15);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..5 {
            let ([s, u], _) = g.sys_grid(2, inst).unwrap();
            let o4 = g.system_object(2);
            let x34 = g.sys_x(&u.top.dst, &o4, inst);
            let l = g.sys_transport_lens(&o4);
            let res = g.interface_small(2);
            let w = g.sys_transport_square(&x34, &u.right, &l, &res, inst).unwrap();
            let lhs = s.compose_x(&u).unwrap().compose_x(&w).unwrap();
            let rhs = s.compose_x(&u.compose_x(&w).unwrap()).unwrap();
            lhs.validate().unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn system_lens_laws_reject_bad_updates() {
    let st = SystemObject::new(mksys_core::DetKernel::new(FiniteObject::range(3), FiniteObject::range(2), vec![0, 1, 1]).unwrap());
    let dst = Interface::new(FiniteObject::unit(), FiniteObject::range(2));
    let f = mksys_core::DetKernel::identity(&st.s);
    // s = 0 updated to s̃ = 1, which lies over 1.
    let bad = mksys_core::DetKernel::new(st.s.clone(), st.stilde.clone(), vec![1, 2]).unwrap();
    let err = mksys_core::SysYMor::new(st.clone(), dst.clone(), f.clone(), Morphism::Det(bad)).unwrap_err();
    assert!(matches!(err, Error::Validation { .. }), "{err}");
    let good = mksys_core::DetKernel::new(st.s.clone(), st.stilde.clone(), vec![0, 2]).unwrap();
    mksys_core::SysYMor::new(st, dst, f, Morphism::Det(good)).unwrap();
}

#[test]
fn projection_squares_validate() {
    let mut g = Gen::new(16);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..10 {
            let a = g.system_object(2);
            let b = g.system_object(2);
            let ia = g.interface(2);
            let ib = g.interface(2);
            let la = g.sys_lens(&a, &ia, inst);
            let lb = g.sys_lens(&b, &ib, inst);
            let (p1, p2) = SysXYSquare::projections(&la, &lb).unwrap();
            p1.validate().unwrap();
            p2.validate().unwrap();
        }
    }
}

#[test]
fn behavior_squares_validate() {
    let mut g = Gen::new(17);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..10 {
            let (s1, s2, g012) = g.nabla_inputs(2, inst).unwrap();
            s1.validate().unwrap();
            s2.validate().unwrap();
            g012.validate().unwrap();
        }
    }
}

#[test]
fn nabla_is_valid_and_projects_back() {
    let mut g = Gen::new(18);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..10 {
            let (s1, s2, g012) = g.nabla_inputs(2, inst).unwrap();
            let joint = nabla(&s1, &s2, &g012).unwrap();
            joint.validate().unwrap();
            let (p1, p2) = SysXYSquare::projections(&s1.right, &s2.right).unwrap();
            assert_eq!(joint.compose_x(&p1).unwrap().forget_residual().unwrap(), s1);
            assert_eq!(joint.compose_x(&p2).unwrap().forget_residual().unwrap(), s2);
        }
    }
}

/// `copy_{O0} ; g01♭ ⊗ g02♭`, reordered to `O1 O2 I1 I2`.
fn product_chart(g01: &Chart, g02: &Chart) -> Chart {
    let o0 = &g01.src.c;
    let (o1, o2, i1, i2) = (&g01.dst.c, &g02.dst.c, &g01.dst.a, &g02.dst.a);
    let g = Morphism::structural(&[o0], &[0, 0]).then(&g01.g.tensor(&g02.g).unwrap()).unwrap();
    let gflat = Morphism::chain([
        &Morphism::structural(&[o0], &[0, 0]),
        &g01.gflat.tensor(&g02.gflat).unwrap(),
        &Morphism::structural(&[o1, i1, o2, i2], &[0, 2, 1, 3]),
    ])
    .unwrap();
    Chart::unit_residual(g01.src.clone(), g01.dst.tensor(&g02.dst), g, gflat).unwrap()
}

#[test]
fn nabla_over_a_product_chart_is_conditionally_independent() {
    let mut g = Gen::new(19);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..10 {
            let (s1, s2, _) = g.nabla_inputs(2, inst).unwrap();
            let g012 = product_chart(&s1.bottom, &s2.bottom);
            let joint = nabla(&s1, &s2, &g012).unwrap();
            let t = &s1.left.src.s;
            let (st1, st2, i1, i2) = (&s1.right.src.s, &s2.right.src.s, &s1.right.dst.a, &s2.right.dst.a);
            let independent = Morphism::chain([
                &Morphism::structural(&[t], &[0, 0]),
                &s1.s.tensor(&s2.s).unwrap(),
                &Morphism::structural(&[st1, i1, st2, i2], &[0, 2, 1, 3]),
            ])
            .unwrap();
            assert_eq!(joint.s, independent);
        }
    }
}

#[test]
fn nabla_requires_a_unit_left_input() {
    let mut g = Gen::new(20);
    let (s1, s2, g012) = g.nabla_inputs(2, Instance::Stoch).unwrap();
    let mut bad1 = s1.clone();
    let mut bad2 = s2.clone();
    bad1.left.dst.a = FiniteObject::range(2);
    bad2.left.dst.a = FiniteObject::range(2);
    match nabla(&bad1, &bad2, &g012) {
        Err(Error::PreconditionViolation(msg)) => assert_eq!(msg, "I0 must be unit"),
        other => panic!("expected a precondition violation, got {other:?}"),
    }
    let mut other_left = s2.clone();
    other_left.left = g.behavior_source(2);
    assert!(matches!(nabla(&s1, &other_left, &g012), Err(Error::PreconditionViolation(_))));
}

#[test]
fn relaxed_lenses_break_associativity() {
    use mksys_core::arenasys::relaxed::{identity, search_associativity_counterexample};
    let found = search_associativity_counterexample(0, 200, 2).unwrap().expect("a counterexample among 2-element atoms");
    assert_ne!(found.left, found.right);
    // The identity is still a two-sided unit.
    let l = &found.lenses[0];
    assert_eq!(identity(&l.src).compose(l).unwrap(), *l);
    assert_eq!(l.compose(&identity(&l.dst)).unwrap(), *l);
}

#[test]
fn relaxed_composition_agrees_with_deterministic_lenses() {
    use mksys_core::arenasys::relaxed::RelaxedLens;
    let mut g = mksys_core::gen::Gen::new(9);
    for _ in 0..20 {
        let a = mksys_core::Interface::new(g.atom(2), g.atom(2));
        let b = mksys_core::Interface::new(g.atom(2), g.atom(2));
        let c = mksys_core::Interface::new(g.atom(2), g.atom(2));
        let (l, m) = (g.lens(&a, &b), g.lens(&b, &c));
        let relax = |d: &mksys_core::DetLens| {
            RelaxedLens::new(d.src.clone(), d.dst.clone(), d.f_m(), d.fsharp_m()).unwrap()
        };
        let lm = l.compose(&m).unwrap();
        assert_eq!(relax(&l).compose(&relax(&m)).unwrap(), relax(&lm));
    }
}
