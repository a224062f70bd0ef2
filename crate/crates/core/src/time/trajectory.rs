use crate::arena::{Chart, DetLens, Interface, XYSquare};
use crate::arenasys::{SysXMor, SysXYSquare, SysYMor, SystemObject};
use crate::error::{Error, Result};
use crate::kernel::DetKernel;
use crate::markov::marginal;
use crate::morphism::{atoms_in, check_equal, Morphism};
use crate::object::FiniteObject;
use crate::time::system::{GSystem, InputPolicy, Wiring};

/// A trajectory of a system: joint laws `φ^n` on state histories at every
/// node, and `s^n` on `S(n)⊗I(n+1)` and `p^n` on `O(n)⊗I(n+1)` along
/// every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GTrajectory {
    pub phi: Vec<Morphism>,
    pub s: Vec<Morphism>,
    pub p: Vec<Morphism>,
}

/// The clock seen as a system lens: everything is the unit.
pub fn clock_lens() -> SysYMor {
    let u = FiniteObject::unit();
    SysYMor::new_unchecked(SystemObject::unit(), Interface::unit(), DetKernel::identity(&u), Morphism::identity(&u))
}

impl GTrajectory {
    pub fn horizon(&self) -> usize {
        self.s.len()
    }

    /// Rebuilds `φ` and `p` from the edge laws `s^n` and the system:
    /// `φ^n` is the state marginal of `s^n`, `φ^T = s^(T-1) ; update`, and
    /// `p^n = s^n ; expose^n ⊗ I(n+1)`.
    pub fn from_edges(sys: &GSystem, s: Vec<Morphism>) -> Result<GTrajectory> {
        let t = sys.horizon();
        if s.len() != t {
            return Err(Error::ShapeMismatch(format!("horizon {t} needs {t} edge laws, found {}", s.len())));
        }
        let mut phi = Vec::with_capacity(t + 1);
        let mut p = Vec::with_capacity(t);
        for (n, sn) in s.iter().enumerate() {
            let (st, inp) = (sys.state.at(n), sys.input.at(n + 1));
            let want = st.tensor(inp);
            if !sn.dom().is_unit() || *sn.cod() != want {
                return Err(Error::mismatch(format!("s^{n}"), format!("* -> {want}"), format!("{} -> {}", sn.dom(), sn.cod())));
            }
            phi.push(marginal(sn, &atoms_in(&[st, inp], &[0]))?);
            p.push(sn.then(&Morphism::Det(sys.expose[n].clone()).tensor_id(inp)?)?);
        }
        phi.push(s[t - 1].then(&sys.update[t - 1])?);
        Ok(GTrajectory { phi, s, p })
    }

    /// The square of edge `n`, with the clock on the left.
    pub fn square(&self, sys: &GSystem, n: usize) -> Result<SysXYSquare> {
        let right = sys.lens(n);
        let top = SysXMor::new_unchecked(SystemObject::unit(), right.src.clone(), self.phi[n + 1].clone(), self.phi[n].clone());
        let (o, i) = (sys.output.at(n), sys.input.at(n + 1));
        let g = marginal(&self.p[n], &atoms_in(&[o, i], &[0]))?;
        let bottom = Chart::unit_residual(Interface::unit(), sys.interface(n), g, self.p[n].clone())?;
        Ok(SysXYSquare::new_unchecked(top, bottom, clock_lens(), right, self.s[n].clone()))
    }

    /// Every edge square satisfies its equations and `p`, `φ` commute with
    /// restrictions.
    pub fn validate(&self, sys: &GSystem) -> Result<()> {
        let t = sys.horizon();
        if self.phi.len() != t + 1 || self.s.len() != t || self.p.len() != t {
            return Err(Error::ShapeMismatch(format!("trajectory lengths do not fit horizon {t}")));
        }
        for n in 0..t {
            let sq = self.square(sys, n)?;
            sq.check_boundary()?;
            sq.validate().map_err(|e| match e {
                Error::Validation { law, detail, .. } => Error::validation(format!("trajectory edge {n}"), law, detail),
                other => other,
            })?;
            sq.top.validate().map_err(|e| Error::NaturalityViolation(format!("φ at {} -> {n}: {e}", n + 1)))?;
        }
        for n in 1..t {
            let r = sys.output.restriction_m(n - 1).tensor(&sys.input.restriction_m(n))?;
            check_equal("trajectory", &format!("p naturality at {n} -> {}", n - 1), &self.p[n].then(&r)?, &self.p[n - 1])
                .map_err(|e| Error::NaturalityViolation(e.to_string()))?;
        }
        Ok(())
    }
}

/// Unrolls a trajectory forward from `initial : * → S(0)⊗I(0)`.
///
/// The joint `j^n` of state and input histories is carried along:
/// `s^n = j^n ; S(n) ⊗ (copy ; expose ⊗ I(n) ; policy^n)` and
/// `j^(n+1) = s^n ; copy_{I(n+1)} ; update^n ⊗ I(n+1)`.
pub fn unroll_trajectory(sys: &GSystem, initial: &Morphism, policy: &InputPolicy) -> Result<GTrajectory> {
    let (s0, i0) = (sys.state.at(0), sys.input.at(0));
    let want = s0.tensor(i0);
    if !initial.dom().is_unit() || *initial.cod() != want {
        return Err(Error::ShapeMismatch(format!(
            "the initial law must be * -> {want}, found {} -> {}",
            initial.dom(),
            initial.cod()
        )));
    }
    let t = sys.horizon();
    let mut joint = initial.clone();
    let mut s = Vec::with_capacity(t);
    for n in 0..t {
        let (st, inp, next_in) = (sys.state.at(n), sys.input.at(n), sys.input.at(n + 1));
        let pol = policy.at(sys, n)?;
        let feed = Morphism::Det(sys.expose[n].clone()).tensor_id(inp)?.then(&pol)?;
        let sn = Morphism::chain([
            &joint,
            &Morphism::structural(&[st, inp], &[0, 0, 1]),
            &feed.id_tensor(st)?,
        ])?;
        joint = Morphism::chain([
            &sn,
            &Morphism::structural(&[st, next_in], &[0, 1, 1]),
            &sys.update[n].tensor_id(next_in)?,
        ])?;
        s.push(sn);
    }
    let traj = GTrajectory::from_edges(sys, s)?;
    traj.validate(sys)?;
    Ok(traj)
}

/// The Arena cell below a trajectory square that wires `p` through a lens:
/// its `s` is `t12 : * → O1(n)⊗I2(n+1)` and its bottom chart is
/// `t12 ; f ⊗ I2`.
pub fn chart_cell(top: &Chart, lens: &DetLens, t12: &Morphism) -> Result<XYSquare> {
    let (o2, i2) = (&lens.dst.c, &lens.dst.a);
    let gflat = t12.then(&lens.f_m().tensor_id(i2)?)?;
    let g = marginal(&gflat, &atoms_in(&[o2, i2], &[0]))?;
    let bottom = Chart::unit_residual(Interface::unit(), lens.dst.clone(), g, gflat)?;
    let unit = DetLens::identity(&Interface::unit());
    XYSquare::new(top.clone(), bottom, unit.clone(), lens.clone(), unit, t12.clone())
}

/// The trajectory of the wired system obtained by stacking, edge by edge,
/// the trajectory square over the given cells.
pub fn lift_trajectory(traj: &GTrajectory, sys: &GSystem, wiring: &Wiring, cells: &[XYSquare]) -> Result<GTrajectory> {
    let t = sys.horizon();
    if cells.len() != t {
        return Err(Error::BoundaryMismatch(format!("{t} edges need {t} cells, found {}", cells.len())));
    }
    let composed = crate::time::system::compose_system_with_lens(sys, wiring)?;
    let mut s = Vec::with_capacity(t);
    for (n, cell) in cells.iter().enumerate() {
        let sq = traj.square(sys, n)?;
        if cell.top != sq.bottom || cell.right != wiring.lens(n) || cell.left != DetLens::identity(&Interface::unit()) {
            return Err(Error::BoundaryMismatch(format!("cell {n} does not sit below the trajectory square")));
        }
        cell.validate()?;
        let stacked = sq.compose_y(cell)?;
        let stacked = if cell.bottom.residual == Interface::unit() { stacked } else { stacked.forget_residual()? };
        s.push(stacked.s);
    }
    let lifted = GTrajectory::from_edges(&composed, s)?;
    lifted.validate(&composed)?;
    Ok(lifted)
}

/// For every pair of consecutive edges, whether `s^(n+1)` restricts to `s^n`.
pub fn check_time_coherence(traj: &GTrajectory, sys: &GSystem) -> Result<Vec<bool>> {
    (1..traj.horizon())
        .map(|n| {
            let r = sys.state.restriction_m(n - 1).tensor(&sys.input.restriction_m(n))?;
            Ok(traj.s[n].then(&r)? == traj.s[n - 1])
        })
        .collect()
}

/// The joint trajectory of two systems driven by the same left side, edge
/// by edge through `∇`, over the chart whose flat part is the product of
/// the two interface laws. The left side defaults to the clock.
pub fn nabla_trajectory(
    sys1: &GSystem,
    traj1: &GTrajectory,
    sys2: &GSystem,
    traj2: &GTrajectory,
    driver: Option<&SysYMor>,
) -> Result<GTrajectory> {
    let joint = crate::time::system::tensor_systems(sys1, sys2)?;
    let left = driver.cloned().unwrap_or_else(clock_lens);
    let mut s = Vec::with_capacity(sys1.horizon());
    for n in 0..sys1.horizon() {
        let mut sq1 = traj1.square(sys1, n)?;
        let mut sq2 = traj2.square(sys2, n)?;
        sq1.left = left.clone();
        sq2.left = left.clone();
        let (o1, i1, o2, i2) = (sys1.output.at(n), sys1.input.at(n + 1), sys2.output.at(n), sys2.input.at(n + 1));
        let gflat = traj1.p[n]
            .tensor(&traj2.p[n])?
            .then(&Morphism::structural(&[o1, i1, o2, i2], &[0, 2, 1, 3]))?;
        let g = marginal(&gflat, &atoms_in(&[o1, o2, i1, i2], &[0, 1]))?;
        let g012 = Chart::unit_residual(Interface::unit(), sys1.interface(n).tensor(&sys2.interface(n)), g, gflat)?;
        s.push(crate::arenasys::nabla(&sq1, &sq2, &g012)?.s);
    }
    let out = GTrajectory::from_edges(&joint, s)?;
    out.validate(&joint)?;
    Ok(out)
}
