use std::fmt;

use crate::arena::{Chart, XYSquare};
use crate::arenasys::{SysXMor, SysYMor};
use crate::error::{Error, Result};
use crate::markov::{conditional_product, marginal};
use crate::morphism::{atoms_in, check_equal, Morphism};
use crate::object::FiniteObject;

/// An xy-square whose top is a state x-morphism `1 → 2`, whose sides are
/// system lenses `1 ⇆ 3`, `2 ⇆ 4` and whose bottom is a chart `3 ⇉ 4`.
/// The data is `s : S1⊗a3 → S2⊗c34⊗a34⊗a4`.
#[derive(Clone, PartialEq, Eq)]
pub struct SysXYSquare {
    pub top: SysXMor,
    pub bottom: Chart,
    pub left: SysYMor,
    pub right: SysYMor,
    pub s: Morphism,
}

impl fmt::Debug for SysXYSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SysXYSquare")
            .field("top", &self.top)
            .field("bottom", &self.bottom)
            .field("left", &self.left)
            .field("right", &self.right)
            .field("s", &self.s)
            .finish()
    }
}

impl SysXYSquare {
    pub fn new(top: SysXMor, bottom: Chart, left: SysYMor, right: SysYMor, s: Morphism) -> Result<Self> {
        let sq = SysXYSquare { top, bottom, left, right, s };
        sq.validate()?;
        Ok(sq)
    }

    pub(crate) fn new_unchecked(top: SysXMor, bottom: Chart, left: SysYMor, right: SysYMor, s: Morphism) -> Self {
        SysXYSquare { top, bottom, left, right, s }
    }

    pub fn check_boundary(&self) -> Result<()> {
        let fail = |what: &str, want: &dyn fmt::Display, got: &dyn fmt::Display| {
            Err(Error::BoundaryMismatch(format!("{what}: expected {want}, found {got}")))
        };
        if self.left.src != self.top.src {
            return fail("left source", &self.top.src, &self.left.src);
        }
        if self.right.src != self.top.dst {
            return fail("right source", &self.top.dst, &self.right.src);
        }
        if self.left.dst != self.bottom.src {
            return fail("left target", &self.bottom.src, &self.left.dst);
        }
        if self.right.dst != self.bottom.dst {
            return fail("right target", &self.bottom.dst, &self.right.dst);
        }
        let dom = self.top.src.s.tensor(&self.bottom.src.a);
        let cod = self.s_cod();
        if *self.s.dom() != dom || *self.s.cod() != cod {
            return Err(Error::BoundaryMismatch(format!(
                "s should be {dom} -> {cod}, found {} -> {}",
                self.s.dom(),
                self.s.cod()
            )));
        }
        Ok(())
    }

    fn s_cod(&self) -> FiniteObject {
        FiniteObject::tensor_all([&self.top.dst.s, &self.bottom.residual.c, &self.bottom.residual.a, &self.bottom.dst.a])
    }

    /// Checks the boundary and the three square equations in order.
    pub fn validate(&self) -> Result<()> {
        self.check_boundary()?;
        self.top.validate()?;
        self.left.validate()?;
        self.right.validate()?;
        let (s2, a3) = (&self.top.dst.s, &self.bottom.src.a);
        let (c34, a34, a4) = (&self.bottom.residual.c, &self.bottom.residual.a, &self.bottom.dst.a);

        // (a) f12 ; f24 = f13 ; f34 ; del_{c34}
        let lhs = self.top.f.then(&self.right.f_m())?;
        let keep_c4 = atoms_in(&[c34, &self.bottom.dst.c], &[1]);
        let rhs = marginal(&self.left.f_m().then(&self.bottom.g)?, &keep_c4)?;
        check_equal("system xy-square", "(a)", &lhs, &rhs)?;

        // (b) s ; (σ ; c34⊗f24) ⊗ a34 a4 = (f13 ⊗ a3) ; f34♭
        let lhs = Morphism::chain([
            &self.s,
            &Morphism::structural(&[s2, c34], &[1, 0]).tensor_id(&a34.tensor(a4))?,
            &self.right.f_m().id_tensor(c34)?.tensor_id(&a34.tensor(a4))?,
        ])?;
        let rhs = self.left.f_m().tensor_id(a3)?.then(&self.bottom.gflat)?;
        check_equal("system xy-square", "(b)", &lhs, &rhs)?;

        // (c) s ; del_{c34 a34} ; f24♯ = f13♯ ; f12♭
        let keep = atoms_in(&[s2, c34, a34, a4], &[0, 3]);
        let lhs = marginal(&self.s, &keep)?.then(&self.right.fsharp)?;
        let rhs = self.left.fsharp.then(&self.top.fflat)?;
        check_equal("system xy-square", "(c)", &lhs, &rhs)
    }

    /// Horizontal composite, ordinary on the state side and copy-composition
    /// on the chart side.
    pub fn compose_x(&self, next: &SysXYSquare) -> Result<SysXYSquare> {
        if self.right != next.left {
            return Err(Error::BoundaryMismatch("right lens of the first square is not the left lens of the second".into()));
        }
        let s2 = &self.top.dst.s;
        let (c45, a45, a5, c5) = (&self.bottom.residual.c, &self.bottom.residual.a, &self.bottom.dst.a, &self.bottom.dst.c);
        let (s3, c56, a56, a6) = (&next.top.dst.s, &next.bottom.residual.c, &next.bottom.residual.a, &next.bottom.dst.a);
        // S1 a4 → s → S2 c45 a45 a5 → copy_{S2} → S2 S2 c45 a45 a5
        //   → σ ; f25 → S2 c45 a45 c5 a5 → copy_{a5} ; σ → c45 c5 a45 a5 S2 a5
        //   → c45 c5 a45 a5 ⊗ t → c45 c5 a45 a5 S3 c56 a56 a6
        //   → σ → S3 c45 c5 c56 a45 a5 a56 a6
        let s = Morphism::chain([
            &self.s,
            &Morphism::structural(&[s2, c45, a45, a5], &[0, 1, 2, 0, 3]),
            &self.right.f_m().tensor_id(a5)?.id_tensor(&FiniteObject::tensor_all([s2, c45, a45]))?,
            &Morphism::structural(&[s2, c45, a45, c5, a5], &[1, 3, 2, 4, 0, 4]),
            &next.s.id_tensor(&FiniteObject::tensor_all([c45, c5, a45, a5]))?,
            &Morphism::structural(&[c45, c5, a45, a5, s3, c56, a56, a6], &[4, 0, 1, 5, 2, 3, 6, 7]),
        ])?;
        Ok(SysXYSquare::new_unchecked(
            self.top.compose(&next.top)?,
            self.bottom.compose(&next.bottom)?,
            self.left.clone(),
            next.right.clone(),
            s,
        ))
    }

    /// The composites `φ : S1 a5 → S2 ⊗ c34 c4 a34 a4` and
    /// `ψ : S1 a5 → c34 c4 a34 a4 ⊗ c56 a56 a6` whose conditional product
    /// defines the vertical composite with an Arena square below.
    pub fn y_composites(&self, below: &XYSquare) -> Result<(Morphism, Morphism)> {
        if self.bottom != below.top {
            return Err(Error::BoundaryMismatch("bottom chart of the upper square is not the top chart of the lower one".into()));
        }
        let (s1, s2) = (&self.top.src.s, &self.top.dst.s);
        let (c34, c4, a34, a4) = (&self.bottom.residual.c, &self.bottom.dst.c, &self.bottom.residual.a, &self.bottom.dst.a);
        let (c56, a56, a6) = (&below.bottom.residual.c, &below.bottom.residual.a, &below.bottom.dst.a);
        let a5 = &below.left.dst.a;
        let f13 = self.left.f_m();

        // S1 a5 → copy_{S1} ; S1⊗f13⊗a5 → S1 c3 a5 → S1⊗f35♯ → S1 a3 → s
        //   → S2 c34 a34 a4 → copy_{S2} ; σ ; S2 c34 ⊗ f24 ⊗ a34 a4
        //   → S2 ⊗ c34 c4 a34 a4
        let phi = Morphism::chain([
            &Morphism::structural(&[s1, a5], &[0, 0, 1]),
            &f13.tensor_id(a5)?.id_tensor(s1)?,
            &below.left.fsharp_m().id_tensor(s1)?,
            &self.s,
            &Morphism::structural(&[s2, c34, a34, a4], &[0, 1, 0, 2, 3]),
            &self.right.f_m().tensor_id(&a34.tensor(a4))?.id_tensor(&s2.tensor(c34))?,
        ])?;

        // S1 a5 → f13 ⊗ a5 → c3 a5 → t → c34 c4 a56 a6
        //   → c34 c4 a56 a6 ⊗ (c56, a34, a4) recomputed from the lenses below
        //   → c34 c4 a34 a4 c56 a56 a6
        let (mid, right) = (&below.lens, &below.right);
        let (n56, n6) = (a56.size(), a6.size());
        let extend = Morphism::from_block_fn(&[c34, c4, a56, a6], &[c34, c4, a34, a4, c56, a56, a6], |v| {
            let (x34, x4, y56, y6) = (v[0], v[1], v[2], v[3]);
            let x56 = mid.f.apply(x34);
            let y34 = mid.fsharp.apply(x34 * n56 + y56);
            let y4 = right.fsharp.apply(x4 * n6 + y6);
            vec![x34, x4, y34, y4, x56, y56, y6]
        })?;
        let psi = Morphism::chain([&f13.tensor_id(a5)?, &below.s, &extend])?;
        Ok((phi, psi))
    }

    fn alpha_blocks<'a>(&'a self, below: &'a XYSquare) -> [&'a FiniteObject; 8] {
        [
            &self.top.dst.s,
            &self.bottom.residual.c,
            &self.bottom.dst.c,
            &self.bottom.residual.a,
            &self.bottom.dst.a,
            &below.bottom.residual.c,
            &below.bottom.residual.a,
            &below.bottom.dst.a,
        ]
    }

    /// The conditional product `α : S1 a5 → S2 ⊗ c34 c4 a34 a4 ⊗ c56 a56 a6`.
    pub fn y_alpha(&self, below: &XYSquare) -> Result<Morphism> {
        let (phi, psi) = self.y_composites(below)?;
        let shared = atoms_in(&self.alpha_blocks(below), &[1, 2, 3, 4]).len();
        conditional_product(&phi, &psi, shared)
    }

    /// Vertical composite with an Arena square below.
    pub fn compose_y(&self, below: &XYSquare) -> Result<SysXYSquare> {
        let alpha = self.y_alpha(below)?;
        let s = marginal(&alpha, &atoms_in(&self.alpha_blocks(below), &[0, 5, 6, 7]))?;
        Ok(SysXYSquare::new_unchecked(
            self.top.clone(),
            below.bottom.clone(),
            self.left.then_lens(&below.left)?,
            self.right.then_lens(&below.right)?,
            s,
        ))
    }

    /// The weak regeneration property: `α` is unchanged by deleting
    /// `c4 a4` and recomputing `c4 = f24(S2)` and `a4 = f46♯(f24(S2), a6)`.
    pub fn y_regenerates(&self, below: &XYSquare) -> Result<bool> {
        let alpha = self.y_alpha(below)?;
        let blocks = self.alpha_blocks(below);
        let [s2, c34, _, a34, _, c56, a56, a6] = blocks;
        let dropped = marginal(&alpha, &atoms_in(&blocks, &[0, 1, 3, 5, 6, 7]))?;
        let (f24, f46) = (&self.right.f, &below.right.fsharp);
        let n6 = a6.size();
        let rebuild = Morphism::from_block_fn(&[s2, c34, a34, c56, a56, a6], &blocks, |v| {
            let (x2, x34, y34, x56, y56, y6) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            let x4 = f24.apply(x2);
            let y4 = f46.apply(x4 * n6 + y6);
            vec![x2, x34, x4, y34, y4, x56, y56, y6]
        })?;
        Ok(dropped.then(&rebuild)? == alpha)
    }

    /// Marginalizes the residual of the bottom chart away.
    pub fn forget_residual(&self) -> Result<SysXYSquare> {
        let blocks = [&self.top.dst.s, &self.bottom.residual.c, &self.bottom.residual.a, &self.bottom.dst.a];
        Ok(SysXYSquare::new_unchecked(
            self.top.clone(),
            self.bottom.forget_residual()?,
            self.left.clone(),
            self.right.clone(),
            marginal(&self.s, &atoms_in(&blocks, &[0, 3]))?,
        ))
    }

    /// The canonical projection squares out of the tensor of two system
    /// lenses, in that order.
    pub fn projections(sys1: &SysYMor, sys2: &SysYMor) -> Result<(SysXYSquare, SysXYSquare)> {
        let left = sys1.tensor(sys2)?;
        let build = |which: usize| -> Result<SysXYSquare> {
            let sys = if which == 0 { sys1 } else { sys2 };
            let (o1, o2, i1, i2) = (&sys1.dst.c, &sys2.dst.c, &sys1.dst.a, &sys2.dst.a);
            let g = Morphism::structural(&[o1, o2], &[which]);
            let gflat = Morphism::structural(&[o1, o2, i1, i2], &[which, 2 + which]);
            let bottom = Chart::unit_residual(left.dst.clone(), sys.dst.clone(), g, gflat)?;
            let (s1, s2) = (&sys1.src.s, &sys2.src.s);
            let s = Morphism::structural(&[s1, s2, i1, i2], &[which, 2 + which]);
            let top = SysXMor::projection(&sys1.src, &sys2.src, which);
            Ok(SysXYSquare::new_unchecked(top, bottom, left.clone(), sys.clone(), s))
        };
        Ok((build(0)?, build(1)?))
    }
}
