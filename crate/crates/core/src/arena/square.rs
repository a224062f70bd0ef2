use std::fmt;

use crate::arena::{Chart, DetLens, Interface};
use crate::error::{Error, Result};
use crate::markov::{conditional_product, marginal};
use crate::morphism::{atoms_in, check_equal, Morphism};
use crate::object::FiniteObject;

/// An xy-square between charts `top : 1 ⇉ 2` and `bottom : 3 ⇉ 4`, with
/// lenses `left : 1 ⇆ 3` and `right : 2 ⇆ 4`. The data is a residual lens
/// `(a12 // c12) ⇆ (a34 // c34)` and `s : c1⊗a3 → c12⊗c2⊗a34⊗a4`.
#[derive(Clone, PartialEq, Eq)]
pub struct XYSquare {
    pub top: Chart,
    pub bottom: Chart,
    pub left: DetLens,
    pub right: DetLens,
    pub lens: DetLens,
    pub s: Morphism,
}

impl fmt::Debug for XYSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("XYSquare")
            .field("top", &self.top)
            .field("bottom", &self.bottom)
            .field("left", &self.left)
            .field("right", &self.right)
            .field("lens", &self.lens)
            .field("s", &self.s)
            .finish()
    }
}

impl XYSquare {
    /// Builds a square after checking its boundary and its three equations.
    pub fn new(top: Chart, bottom: Chart, left: DetLens, right: DetLens, lens: DetLens, s: Morphism) -> Result<Self> {
        let sq = XYSquare { top, bottom, left, right, lens, s };
        sq.validate()?;
        Ok(sq)
    }

    pub(crate) fn new_unchecked(
        top: Chart,
        bottom: Chart,
        left: DetLens,
        right: DetLens,
        lens: DetLens,
        s: Morphism,
    ) -> Self {
        XYSquare { top, bottom, left, right, lens, s }
    }

    pub fn check_boundary(&self) -> Result<()> {
        let pairs: [(&str, &Interface, &Interface); 6] = [
            ("left source", &self.left.src, &self.top.src),
            ("left target", &self.left.dst, &self.bottom.src),
            ("right source", &self.right.src, &self.top.dst),
            ("right target", &self.right.dst, &self.bottom.dst),
            ("residual lens source", &self.lens.src, &self.top.residual),
            ("residual lens target", &self.lens.dst, &self.bottom.residual),
        ];
        for (what, got, want) in pairs {
            if got != want {
                return Err(Error::BoundaryMismatch(format!("{what}: expected {want}, found {got}")));
            }
        }
        let dom = self.top.src.c.tensor(&self.bottom.src.a);
        let cod = FiniteObject::tensor_all([&self.top.residual.c, &self.top.dst.c, &self.bottom.residual.a, &self.bottom.dst.a]);
        if *self.s.dom() != dom || *self.s.cod() != cod {
            return Err(Error::BoundaryMismatch(format!(
                "s should be {dom} -> {cod}, found {} -> {}",
                self.s.dom(),
                self.s.cod()
            )));
        }
        Ok(())
    }

    /// Checks the boundary and equations (a), (b), (c) in that order,
    /// reporting the first that fails.
    pub fn validate(&self) -> Result<()> {
        self.check_boundary()?;
        let (c1, a3) = (&self.top.src.c, &self.bottom.src.a);
        let (c12, c2) = (&self.top.residual.c, &self.top.dst.c);
        let (a34, a4) = (&self.bottom.residual.a, &self.bottom.dst.a);
        let f1234 = self.lens.f_m();
        let f24 = self.right.f_m();

        // (a) f12 ; (f1234 ⊗ f24) = f13 ; f34
        let lhs = self.top.g.then(&f1234.tensor(&f24)?)?;
        let rhs = self.left.f_m().then(&self.bottom.g)?;
        check_equal("xy-square", "(a)", &lhs, &rhs)?;

        // (b) s ; (f1234 ⊗ f24 ⊗ a34 ⊗ a4) = (f13 ⊗ a3) ; f34♭
        let lhs = self.s.then(&f1234.tensor(&f24)?.tensor_id(&a34.tensor(a4))?)?;
        let rhs = self.left.f_m().tensor_id(a3)?.then(&self.bottom.gflat)?;
        check_equal("xy-square", "(b)", &lhs, &rhs)?;

        // (c) copy_{c1} ; c1⊗f13♯ ; f12♭ = s ; copy_{c12 c2} ; σ ; f1234♯ ⊗ f24♯
        let lhs = Morphism::chain([
            &Morphism::structural(&[c1, a3], &[0, 0, 1]),
            &self.left.fsharp_m().id_tensor(c1)?,
            &self.top.gflat,
        ])?;
        let rhs = Morphism::chain([
            &self.s,
            &Morphism::structural(&[c12, c2, a34, a4], &[0, 1, 0, 2, 1, 3]),
            &self.lens.fsharp_m().tensor(&self.right.fsharp_m())?.id_tensor(&c12.tensor(c2))?,
        ])?;
        check_equal("xy-square", "(c)", &lhs, &rhs)
    }

    /// The identity square of a chart for y-composition: identity lenses on
    /// all sides and `s = g♭`.
    pub fn y_identity(chart: &Chart) -> XYSquare {
        XYSquare::new_unchecked(
            chart.clone(),
            chart.clone(),
            DetLens::identity(&chart.src),
            DetLens::identity(&chart.dst),
            DetLens::identity(&chart.residual),
            chart.gflat.clone(),
        )
    }

    /// Horizontal composite `self | next` by copy-composition.
    pub fn compose_x(&self, next: &XYSquare) -> Result<XYSquare> {
        if self.right != next.left {
            return Err(Error::BoundaryMismatch("right lens of the first square is not the left lens of the second".into()));
        }
        let top = self.top.compose(&next.top)?;
        let bottom = self.bottom.compose(&next.bottom)?;
        let lens = DetLens::tensor_all([&self.lens, &self.right, &next.lens]);
        let (c12, c2, a45, a5) = (&self.top.residual.c, &self.top.dst.c, &self.bottom.residual.a, &self.bottom.dst.a);
        let (c23, c3, a56, a6) = (&next.top.residual.c, &next.top.dst.c, &next.bottom.residual.a, &next.bottom.dst.a);
        // c1 a4 → s → c12 c2 a45 a5 → σ; copy_{c2 a5}; σ → c12 c2 a45 a5 c2 a5
        //   → c12 c2 a45 a5 ⊗ t → c12 c2 a45 a5 c23 c3 a56 a6
        //   → σ → c12 c2 c23 c3 a45 a5 a56 a6
        let s = Morphism::chain([
            &self.s,
            &Morphism::structural(&[c12, c2, a45, a5], &[0, 1, 2, 3, 1, 3]),
            &next.s.id_tensor(&FiniteObject::tensor_all([c12, c2, a45, a5]))?,
            &Morphism::structural(&[c12, c2, a45, a5, c23, c3, a56, a6], &[0, 1, 4, 5, 2, 3, 6, 7]),
        ])?;
        Ok(XYSquare::new_unchecked(top, bottom, self.left.clone(), next.right.clone(), lens, s))
    }

    /// The two composites whose conditional product defines the vertical
    /// composite: `φ : c1 a5 → c12 c2 ⊗ c34 c4 a34 a4` and
    /// `ψ : c1 a5 → c34 c4 a34 a4 ⊗ a56 a6`.
    pub fn y_composites(&self, below: &XYSquare) -> Result<(Morphism, Morphism)> {
        if self.bottom != below.top {
            return Err(Error::BoundaryMismatch("bottom chart of the upper square is not the top chart of the lower one".into()));
        }
        let c1 = &self.top.src.c;
        let (c12, c2) = (&self.top.residual.c, &self.top.dst.c);
        let (c34, c4, a34, a4) = (&self.bottom.residual.c, &self.bottom.dst.c, &self.bottom.residual.a, &self.bottom.dst.a);
        let (a56, a6) = (&below.bottom.residual.a, &below.bottom.dst.a);
        let a5 = &below.bottom.src.a;
        let f13 = self.left.f_m();

        // c1 a5 → (copy_{c1} ; c1⊗f13) ⊗ a5 → c1 c3 a5 → c1 ⊗ f35♯ → c1 a3 → s
        //   → c12 c2 a34 a4 → (copy_{c12 c2} ; c12 c2 ⊗ f1234 ⊗ f24) ⊗ a34 a4
        //   → c12 c2 c34 c4 a34 a4
        let phi = Morphism::chain([
            &Morphism::structural(&[c1, a5], &[0, 0, 1]),
            &f13.tensor_id(a5)?.id_tensor(c1)?,
            &below.left.fsharp_m().id_tensor(c1)?,
            &self.s,
            &Morphism::structural(&[c12, c2, a34, a4], &[0, 1, 0, 1, 2, 3]),
            &self
                .lens
                .f_m()
                .tensor(&self.right.f_m())?
                .id_tensor(&c12.tensor(c2))?
                .tensor_id(&a34.tensor(a4))?,
        ])?;

        // c1 a5 → f13 ⊗ a5 → c3 a5 → t → c34 c4 a56 a6 → copy
        //   → c34 c4 a56 a6 ⊗ (σ ; f3456♯ ⊗ f46♯) → c34 c4 a56 a6 a34 a4
        //   → σ → c34 c4 a34 a4 a56 a6
        let regen_a = Morphism::chain([
            &Morphism::structural(&[c34, c4, a56, a6], &[0, 1, 2, 3, 0, 2, 1, 3]),
            &below
                .lens
                .fsharp_m()
                .tensor(&below.right.fsharp_m())?
                .id_tensor(&FiniteObject::tensor_all([c34, c4, a56, a6]))?,
            &Morphism::structural(&[c34, c4, a56, a6, a34, a4], &[0, 1, 4, 5, 2, 3]),
        ])?;
        let psi = Morphism::chain([&f13.tensor_id(a5)?, &below.s, &regen_a])?;
        Ok((phi, psi))
    }

    /// The conditional product `α : c1 a5 → c12 c2 ⊗ c34 c4 a34 a4 ⊗ a56 a6`.
    pub fn y_alpha(&self, below: &XYSquare) -> Result<Morphism> {
        let (phi, psi) = self.y_composites(below)?;
        let shared = FiniteObject::tensor_all([
            &self.bottom.residual.c,
            &self.bottom.dst.c,
            &self.bottom.residual.a,
            &self.bottom.dst.a,
        ]);
        conditional_product(&phi, &psi, shared.n_atoms())
    }

    /// Vertical composite `self / below`.
    pub fn compose_y(&self, below: &XYSquare) -> Result<XYSquare> {
        let alpha = self.y_alpha(below)?;
        let s = marginal(&alpha, &self.alpha_outer_atoms(below))?;
        Ok(XYSquare::new_unchecked(
            self.top.clone(),
            below.bottom.clone(),
            self.left.compose(&below.left)?,
            self.right.compose(&below.right)?,
            self.lens.compose(&below.lens)?,
            s,
        ))
    }

    fn alpha_blocks<'a>(&'a self, below: &'a XYSquare) -> [&'a FiniteObject; 8] {
        [
            &self.top.residual.c,
            &self.top.dst.c,
            &self.bottom.residual.c,
            &self.bottom.dst.c,
            &self.bottom.residual.a,
            &self.bottom.dst.a,
            &below.bottom.residual.a,
            &below.bottom.dst.a,
        ]
    }

    fn alpha_outer_atoms(&self, below: &XYSquare) -> Vec<usize> {
        atoms_in(&self.alpha_blocks(below), &[0, 1, 6, 7])
    }

    /// Whether `α` is recovered from `self / below` by recomputing
    /// `c34 = f1234(c12)`, `c4 = f24(c2)`, `a34 = f3456♯(c34, a56)` and
    /// `a4 = f46♯(c4, a6)`.
    pub fn y_regenerates(&self, below: &XYSquare) -> Result<bool> {
        let alpha = self.y_alpha(below)?;
        let st = marginal(&alpha, &self.alpha_outer_atoms(below))?;
        let [c12, c2, c34, c4, a34, a4, a56, a6] = self.alpha_blocks(below);
        let (l1, r1, l2, r2) = (&self.lens, &self.right, &below.lens, &below.right);
        let regen = Morphism::from_block_fn(&[c12, c2, a56, a6], &[c12, c2, c34, c4, a34, a4, a56, a6], |v| {
            let (x12, x2, y56, y6) = (v[0], v[1], v[2], v[3]);
            let x34 = l1.f.apply(x12);
            let x4 = r1.f.apply(x2);
            let y34 = l2.fsharp.apply(x34 * a56.size() + y56);
            let y4 = r2.fsharp.apply(x4 * a6.size() + y6);
            vec![x12, x2, x34, x4, y34, y4, y56, y6]
        })?;
        Ok(st.then(&regen)? == alpha)
    }

    /// Tensor of two squares on tensored interfaces.
    pub fn tensor(&self, other: &XYSquare) -> Result<XYSquare> {
        let (c1, a3) = (&self.top.src.c, &self.bottom.src.a);
        let (d1, b3) = (&other.top.src.c, &other.bottom.src.a);
        let blocks = [
            &self.top.residual.c,
            &self.top.dst.c,
            &self.bottom.residual.a,
            &self.bottom.dst.a,
            &other.top.residual.c,
            &other.top.dst.c,
            &other.bottom.residual.a,
            &other.bottom.dst.a,
        ];
        let s = Morphism::chain([
            &Morphism::structural(&[c1, d1, a3, b3], &[0, 2, 1, 3]),
            &self.s.tensor(&other.s)?,
            &Morphism::structural(&blocks, &[0, 4, 1, 5, 2, 6, 3, 7]),
        ])?;
        Ok(XYSquare::new_unchecked(
            self.top.tensor(&other.top)?,
            self.bottom.tensor(&other.bottom)?,
            self.left.tensor(&other.left),
            self.right.tensor(&other.right),
            self.lens.tensor(&other.lens),
            s,
        ))
    }
}
