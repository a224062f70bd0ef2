use mksys_core::arena::{Chart, DetLens, Interface, XYSquare, XZSquare, YZSquare, ZPair};
use mksys_core::gen::Gen;
use mksys_core::markov::marginal;
use mksys_core::{DetKernel, Error, FiniteObject, Instance, Morphism};

fn bit() -> FiniteObject {
    FiniteObject::range(2)
}

#[test]
fn transport_squares_validate() {
    let mut g = Gen::new(1);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..20 {
            let top = g.random_chart(2, inst);
            let (sq, _, _) = g.square_below(&top, inst).unwrap();
            sq.validate().unwrap();
        }
    }
}

#[test]
fn y_identity_is_a_two_sided_unit() {
    let mut g = Gen::new(2);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..10 {
            let top = g.random_chart(2, inst);
            let (sq, _, _) = g.square_below(&top, inst).unwrap();
            XYSquare::y_identity(&top).validate().unwrap();
            assert_eq!(XYSquare::y_identity(&sq.top).compose_y(&sq).unwrap(), sq);
            assert_eq!(sq.compose_y(&XYSquare::y_identity(&sq.bottom)).unwrap(), sq);
        }
    }
}

#[test]
fn interchange_on_grids() {
    let mut g = Gen::new(3);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..5 {
            let [[s, u], [t, v]] = g.grid(2, inst).unwrap();
            let lhs = s.compose_x(&u).unwrap().compose_y(&t.compose_x(&v).unwrap()).unwrap();
            let rhs = s.compose_y(&t).unwrap().compose_x(&u.compose_y(&v).unwrap()).unwrap();
            lhs.validate().unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn y_composition_is_associative() {
    let mut g = Gen::new(4);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..5 {
            let [s, t, w] = g.column(2, inst).unwrap();
            assert!(s.y_regenerates(&t).unwrap());
            let lhs = s.compose_y(&t).unwrap().compose_y(&w).unwrap();
            let rhs = s.compose_y(&t.compose_y(&w).unwrap()).unwrap();
            lhs.validate().unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn x_composition_is_associative_and_valid() {
    let mut g = Gen::new(5);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..5 {
            let [[s, u], _] = g.grid(2, inst).unwrap();
            let r6 = g.interface(2);
            let r = g.interface_small(2);
            let x = g.chart(&u.top.dst, &r6, &r, inst);
            let to = g.widen(&r6);
            let right = g.transport_lens(&r6, &to);
            let mid_to = g.widen(&x.residual);
            let mid = g.transport_lens(&x.residual, &mid_to);
            let w = g.transport_square(&x, &u.right, &mid, &right, inst).unwrap();
            let su = s.compose_x(&u).unwrap();
            su.validate().unwrap();
            let lhs = su.compose_x(&w).unwrap();
            let rhs = s.compose_x(&u.compose_x(&w).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn y_composite_marginals_match_the_two_diagram_composites() {
    let mut g = Gen::new(6);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..10 {
            let [s, t, _] = g.column(2, inst).unwrap();
            let (phi, psi) = s.y_composites(&t).unwrap();
            let alpha = s.y_alpha(&t).unwrap();
            let n_phi = phi.cod().n_atoms();
            let n = alpha.cod().n_atoms();
            let shared = n_phi + psi.cod().n_atoms() - n;
            let front: Vec<usize> = (0..n_phi).collect();
            let back: Vec<usize> = (n_phi - shared..n).collect();
            assert_eq!(marginal(&alpha, &front).unwrap(), phi);
            assert_eq!(marginal(&alpha, &back).unwrap(), psi);
            let st = s.compose_y(&t).unwrap();
            st.validate().unwrap();
        }
    }
}

#[test]
fn replacing_s_breaks_equation_b() {
    let mut g = Gen::new(7);
    let mut seen = 0;
    for _ in 0..40 {
        let top = g.random_chart(2, Instance::Stoch);
        let (sq, _, _) = g.square_below(&top, Instance::Stoch).unwrap();
        let other = g.stoch(sq.s.dom(), sq.s.cod());
        if other == sq.s {
            continue;
        }
        let mut bad = sq.clone();
        bad.s = other;
        match bad.validate() {
            Err(Error::Validation { law, .. }) => {
                if law == "(b)" {
                    seen += 1;
                } else {
                    // An unrelated kernel can happen to satisfy (b) when the
                    // bottom chart forgets most of it; (c) then fails.
                    assert_eq!(law, "(c)");
                }
            }
            other => panic!("expected a validation failure, got {other:?}"),
        }
    }
    assert!(seen > 0);
}

#[test]
fn lens_composition_is_associative_exhaustively_on_bits() {
    let i = Interface::new(bit(), bit());
    let mut lenses = Vec::new();
    for f in 0..4usize {
        for b in 0..16usize {
            let fk = DetKernel::new(bit(), bit(), vec![f & 1, (f >> 1) & 1]).unwrap();
            let bk = DetKernel::new(bit().tensor(&bit()), bit(), (0..4).map(|k| (b >> k) & 1).collect()).unwrap();
            lenses.push(DetLens::new(i.clone(), i.clone(), fk, bk).unwrap());
        }
    }
    assert_eq!(lenses.len(), 64);
    // 64^3 triples; check every left-nested pair once and reuse composites.
    let pairs: Vec<Vec<DetLens>> = lenses
        .iter()
        .map(|a| lenses.iter().map(|b| a.compose(b).unwrap()).collect())
        .collect();
    for (ia, a) in lenses.iter().enumerate() {
        for (ib, _) in lenses.iter().enumerate() {
            for (ic, c) in lenses.iter().enumerate() {
                let lhs = pairs[ia][ib].compose(c).unwrap();
                let rhs = a.compose(&pairs[ib][ic]).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn chart_composition_is_associative_and_has_no_identity_on_a_probe() {
    let mut g = Gen::new(8);
    for inst in [Instance::Stoch, Instance::Poss] {
        for _ in 0..20 {
            let i: Vec<Interface> = (0..4).map(|_| g.interface(2)).collect();
            let x1 = {
                let r = g.interface_small(2);
                g.chart(&i[0], &i[1], &r, inst)
            };
            let x2 = {
                let r = g.interface_small(2);
                g.chart(&i[1], &i[2], &r, inst)
            };
            let x3 = {
                let r = g.interface_small(2);
                g.chart(&i[2], &i[3], &r, inst)
            };
            let lhs = x1.compose(&x2).unwrap().compose(&x3).unwrap();
            let rhs = x1.compose(&x2.compose(&x3).unwrap()).unwrap();
            lhs.validate().unwrap();
            assert_eq!(lhs, rhs);
        }
    }
    // A chart on a nontrivial interface never composes back to its partner,
    // because the composite's residual strictly grows.
    let i = Interface::new(bit(), bit());
    let probe = g.chart(&i, &i, &Interface::unit(), Instance::Stoch);
    for _ in 0..20 {
        let e = g.chart(&i, &i, &Interface::unit(), Instance::Stoch);
        assert_ne!(e.compose(&probe).unwrap(), probe);
        assert_ne!(probe.compose(&e).unwrap(), probe);
    }
}

#[test]
fn deterministic_copy_composition_of_unit_residual_charts() {
    let i = Interface::new(FiniteObject::unit(), bit());
    let not = Morphism::Det(DetKernel::new(bit(), bit(), vec![1, 0]).unwrap());
    let x = Chart::unit_residual(i.clone(), i.clone(), not.clone(), not.clone()).unwrap();
    let xx = x.compose(&x).unwrap();
    // c ↦ (not c, not not c)
    assert_eq!(xx.g.as_det().unwrap().map(), &[2, 1]);
    xx.validate().unwrap();
}

#[test]
fn thin_squares_validate_and_compose() {
    let mut g = Gen::new(9);
    let i = Interface::new(bit(), bit());
    for _ in 0..20 {
        let l = g.lens(&i, &i);
        let id = ZPair::identity(&i);
        let sq = YZSquare::new(id.clone(), id.clone(), l.clone(), l.clone()).unwrap();
        sq.compose_y(&sq).unwrap();
        sq.compose_z(&YZSquare::new(id.clone(), id.clone(), l.clone(), l.clone()).unwrap()).unwrap();
    }
    let x = g.chart(&i, &i, &Interface::unit(), Instance::Stoch);
    let id = ZPair::identity(&i);
    let unit = DetKernel::identity(&FiniteObject::unit());
    let xz = XZSquare::new(x.clone(), x.clone(), id.clone(), id.clone(), unit.clone(), unit.clone()).unwrap();
    let both = xz.compose_x(&xz).unwrap();
    assert_eq!(both.f1234, DetKernel::identity(&bit()));
    xz.compose_z(&xz).unwrap();
    let not = DetKernel::new(bit(), bit(), vec![1, 0]).unwrap();
    let flip = ZPair::new(i.clone(), i.clone(), not.clone(), DetKernel::identity(&bit())).unwrap();
    let bad = YZSquare::new(flip, ZPair::identity(&i), DetLens::identity(&i), DetLens::identity(&i));
    assert!(matches!(bad, Err(Error::Validation { .. })));
}

#[test]
fn tensor_of_squares_validates() {
    let mut g = Gen::new(10);
    for _ in 0..10 {
        let a = g.random_chart(2, Instance::Stoch);
        let b = g.random_chart(2, Instance::Stoch);
        let (sa, _, _) = g.square_below(&a, Instance::Stoch).unwrap();
        let (sb, _, _) = g.square_below(&b, Instance::Stoch).unwrap();
        sa.tensor(&sb).unwrap().validate().unwrap();
    }
}
