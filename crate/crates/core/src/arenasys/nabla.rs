//! The joint behavior of two systems driven by the same left side: given
//! squares `s1`, `s2` sharing their left lens and a chart `g012` whose two
//! projections are their bottom charts, build a square into the tensor of
//! the two systems.

use crate::arena::{Chart, Interface};
use crate::arenasys::{SysXMor, SysXYSquare, SysYMor};
use crate::error::{Error, Result};
use crate::markov::{conditional_product, marginal};
use crate::morphism::{atoms_in, check_equal, Morphism};

fn precondition(msg: impl Into<String>) -> Error {
    Error::PreconditionViolation(msg.into())
}

/// Checks that `chart`, followed by the projection onto factor `which` of
/// its target, is `part`. Both must have unit residuals.
fn check_projection(chart: &Chart, part: &Chart, which: usize, other: &Interface) -> Result<()> {
    let (o1, o2, i1, i2) = if which == 0 {
        (&part.dst.c, &other.c, &part.dst.a, &other.a)
    } else {
        (&other.c, &part.dst.c, &other.a, &part.dst.a)
    };
    let g = marginal(&chart.g, &atoms_in(&[o1, o2], &[which]))?;
    let gflat = marginal(&chart.gflat, &atoms_in(&[o1, o2, i1, i2], &[which, 2 + which]))?;
    let name = if which == 0 { "first" } else { "second" };
    check_equal("g012", &format!("{name} projection of g012 is the bottom chart of s{}", which + 1), &g, &part.g)?;
    check_equal("g012", &format!("{name} projection of g012♭ is the bottom chart of s{}", which + 1), &gflat, &part.gflat)
}

fn check_hypotheses(s1: &SysXYSquare, s2: &SysXYSquare, g012: &Chart) -> Result<()> {
    if s1.left != s2.left {
        return Err(precondition("s1 and s2 must share their left lens (f0, f0♯)"));
    }
    let left = &s1.left;
    if !left.dst.a.is_unit() {
        return Err(precondition("I0 must be unit"));
    }
    if !left.fsharp.as_det().is_some_and(|d| d.is_bijective()) {
        return Err(precondition("f0♯ : T ⊗ I0 → T̃ must be an isomorphism"));
    }
    for (i, s) in [s1, s2].into_iter().enumerate() {
        if s.bottom.residual != Interface::unit() {
            return Err(precondition(format!("the bottom chart of s{} must have a unit residual", i + 1)));
        }
    }
    if g012.residual != Interface::unit() {
        return Err(precondition("g012 must have a unit residual"));
    }
    if g012.src != left.dst {
        return Err(precondition("g012 must start at the target of the shared left lens"));
    }
    if g012.dst != s1.bottom.dst.tensor(&s2.bottom.dst) {
        return Err(precondition("g012 must end at the tensor of the two bottom targets"));
    }
    check_projection(g012, &s1.bottom, 0, &s2.bottom.dst).map_err(|e| precondition(e.to_string()))?;
    check_projection(g012, &s2.bottom, 1, &s1.bottom.dst).map_err(|e| precondition(e.to_string()))?;
    Ok(())
}

/// `s1 ∇ s2` over `g012`.
pub fn nabla(s1: &SysXYSquare, s2: &SysXYSquare, g012: &Chart) -> Result<SysXYSquare> {
    check_hypotheses(s1, s2, g012)?;
    let left = &s1.left;
    let t_obj = &left.src;
    let (sys1, sys2) = (&s1.right, &s2.right);
    let (st1, st2) = (&sys1.src.s, &sys2.src.s);
    let (o1, o2, i1, i2) = (&sys1.dst.c, &sys2.dst.c, &sys1.dst.a, &sys2.dst.a);

    // w : T → O1 O2 I1 I2 is f0 followed by g012♭ (I0 is the unit).
    let w = left.f_m().then(&g012.gflat)?;

    // u_i : T → S_i ⊗ O_i I_i, the square followed by copy_{S_i} ; f_i.
    let u = |s: &SysXYSquare, sys: &SysYMor| -> Result<Morphism> {
        let (st, i) = (&sys.src.s, &sys.dst.a);
        Morphism::chain([
            &s.s,
            &Morphism::structural(&[st, i], &[0, 0, 1]),
            &sys.f_m().tensor_id(i)?.id_tensor(st)?,
        ])
    };
    let blocks_w = [o1, o2, i1, i2];
    let y_all = atoms_in(&blocks_w, &[0, 1, 2, 3]).len();

    // t1 : T → S1 ⊗ O1 O2 I1 I2
    let w1 = marginal(&w, &atoms_in(&blocks_w, &[0, 2, 1, 3]))?;
    let t1 = conditional_product(&u(s1, sys1)?, &w1, atoms_in(&[o1, i1], &[0, 1]).len())?;
    let t1 = t1.then(&Morphism::structural(&[st1, o1, i1, o2, i2], &[0, 1, 3, 2, 4]))?;

    // t2 : T → O1 O2 I1 I2 ⊗ S2
    let w2 = marginal(&w, &atoms_in(&blocks_w, &[1, 3, 0, 2]))?;
    let t2 = conditional_product(&u(s2, sys2)?, &w2, atoms_in(&[o2, i2], &[0, 1]).len())?;
    let t2 = t2.then(&Morphism::structural(&[st2, o2, i2, o1, i1], &[3, 1, 4, 2, 0]))?;

    // t : T → S1 ⊗ O1 O2 I1 I2 ⊗ S2, then keep S1 S2 I1 I2.
    let t = conditional_product(&t1, &t2, y_all)?;
    let s = marginal(&t, &atoms_in(&[st1, o1, o2, i1, i2, st2], &[0, 5, 3, 4]))?;

    let right = sys1.tensor(sys2)?;
    let phi = marginal(&s, &atoms_in(&[st1, st2, i1, i2], &[0, 1]))?;
    let phi_flat = Morphism::chain([&t_obj.r_m(), &s, &right.fsharp])?;
    let top = SysXMor::new_unchecked(t_obj.clone(), sys1.src.tensor(&sys2.src), phi_flat, phi);
    Ok(SysXYSquare::new_unchecked(top, g012.clone(), left.clone(), right, s))
}
