use std::fmt;

use crate::arena::Interface;
use crate::error::{Error, Result};
use crate::markov::marginal;
use crate::morphism::{atoms_in, check_equal, select_atoms, Morphism};
use crate::object::FiniteObject;

/// A copy-composition chart `(a1 // c1) ⇉ (a2 // c2)` with residual
/// `(a12 // c12)`: `g : c1 → c12⊗c2` and `g♭ : c1⊗a1 → c12⊗c2⊗a12⊗a2` whose
/// `c12⊗c2` marginal is `π_{c1} ; g`.
#[derive(Clone, PartialEq, Eq)]
pub struct Chart {
    pub src: Interface,
    pub dst: Interface,
    pub residual: Interface,
    pub g: Morphism,
    pub gflat: Morphism,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("src", &self.src)
            .field("dst", &self.dst)
            .field("residual", &self.residual)
            .field("g", &self.g)
            .field("gflat", &self.gflat)
            .finish()
    }
}

impl Chart {
    /// Builds a chart and checks its marginal condition.
    pub fn new(src: Interface, dst: Interface, residual: Interface, g: Morphism, gflat: Morphism) -> Result<Self> {
        let chart = Chart { src, dst, residual, g, gflat };
        chart.validate()?;
        Ok(chart)
    }

    pub(crate) fn new_unchecked(
        src: Interface,
        dst: Interface,
        residual: Interface,
        g: Morphism,
        gflat: Morphism,
    ) -> Self {
        Chart { src, dst, residual, g, gflat }
    }

    /// `c12 ⊗ c2`.
    pub fn c_out(&self) -> FiniteObject {
        self.residual.c.tensor(&self.dst.c)
    }

    /// `c12 ⊗ c2 ⊗ a12 ⊗ a2`.
    pub fn flat_out(&self) -> FiniteObject {
        FiniteObject::tensor_all([&self.residual.c, &self.dst.c, &self.residual.a, &self.dst.a])
    }

    pub fn validate(&self) -> Result<()> {
        let c1 = &self.src.c;
        let a1 = &self.src.a;
        if self.g.dom() != c1 || *self.g.cod() != self.c_out() {
            return Err(Error::mismatch("chart g", format!("{} -> {}", c1, self.c_out()), format!("{} -> {}", self.g.dom(), self.g.cod())));
        }
        let flat_dom = c1.tensor(a1);
        if *self.gflat.dom() != flat_dom || *self.gflat.cod() != self.flat_out() {
            return Err(Error::mismatch(
                "chart g♭",
                format!("{} -> {}", flat_dom, self.flat_out()),
                format!("{} -> {}", self.gflat.dom(), self.gflat.cod()),
            ));
        }
        let keep = atoms_in(&[&self.residual.c, &self.dst.c, &self.residual.a, &self.dst.a], &[0, 1]);
        let lhs = marginal(&self.gflat, &keep)?;
        let rhs = select_atoms(&flat_dom, &(0..c1.n_atoms()).collect::<Vec<_>>())?.then(&self.g)?;
        check_equal("chart", "g♭ ; π = π ; g", &lhs, &rhs)
    }

    /// Copy-composition `self ; next`. The residual becomes
    /// `(a12 a2 a23 // c12 c2 c23)`.
    pub fn compose(&self, next: &Chart) -> Result<Chart> {
        if self.dst != next.src {
            return Err(Error::mismatch("chart composition", &self.dst, &next.src));
        }
        let (c12, c2, a12, a2) = (&self.residual.c, &self.dst.c, &self.residual.a, &self.dst.a);
        let (c23, c3, a23, a3) = (&next.residual.c, &next.dst.c, &next.residual.a, &next.dst.a);
        // c1 → f12 → c12 c2 → copy_{c2} → c12 c2 c2 → c12 c2 ⊗ f23 → c12 c2 c23 c3
        let g = Morphism::chain([
            &self.g,
            &Morphism::structural(&[c12, c2], &[0, 1, 1]),
            &next.g.id_tensor(&c12.tensor(c2))?,
        ])?;
        // c1 a1 → f12♭ → c12 c2 a12 a2 → σ; copy_{c2 a2}; σ → c12 c2 a12 a2 c2 a2
        //   → (c12 c2 a12 a2 ⊗ f23♭) → c12 c2 a12 a2 c23 c3 a23 a3
        //   → σ → c12 c2 c23 c3 a12 a2 a23 a3
        let gflat = Morphism::chain([
            &self.gflat,
            &Morphism::structural(&[c12, c2, a12, a2], &[0, 1, 2, 3, 1, 3]),
            &next.gflat.id_tensor(&FiniteObject::tensor_all([c12, c2, a12, a2]))?,
            &Morphism::structural(&[c12, c2, a12, a2, c23, c3, a23, a3], &[0, 1, 4, 5, 2, 3, 6, 7]),
        ])?;
        let residual = Interface::new(
            FiniteObject::tensor_all([a12, a2, a23]),
            FiniteObject::tensor_all([c12, c2, c23]),
        );
        Ok(Chart::new_unchecked(self.src.clone(), next.dst.clone(), residual, g, gflat))
    }

    /// Parallel chart on tensored interfaces, with outputs regrouped as
    /// `c12 c12' c2 c2' a12 a12' a2 a2'`.
    pub fn tensor(&self, other: &Chart) -> Result<Chart> {
        let (c12, c2, a12, a2) = (&self.residual.c, &self.dst.c, &self.residual.a, &self.dst.a);
        let (d12, d2, b12, b2) = (&other.residual.c, &other.dst.c, &other.residual.a, &other.dst.a);
        let g = self
            .g
            .tensor(&other.g)?
            .then(&Morphism::structural(&[c12, c2, d12, d2], &[0, 2, 1, 3]))?;
        let (c1, a1, d1, b1) = (&self.src.c, &self.src.a, &other.src.c, &other.src.a);
        let gflat = Morphism::chain([
            &Morphism::structural(&[c1, d1, a1, b1], &[0, 2, 1, 3]),
            &self.gflat.tensor(&other.gflat)?,
            &Morphism::structural(&[c12, c2, a12, a2, d12, d2, b12, b2], &[0, 4, 1, 5, 2, 6, 3, 7]),
        ])?;
        Ok(Chart::new_unchecked(
            self.src.tensor(&other.src),
            self.dst.tensor(&other.dst),
            self.residual.tensor(&other.residual),
            g,
            gflat,
        ))
    }

    /// The chart with unit residual whose maps are `f` and `f⊗a`-shaped
    /// `f♭`. Any kernel pair with matching marginals is accepted.
    pub fn unit_residual(src: Interface, dst: Interface, g: Morphism, gflat: Morphism) -> Result<Chart> {
        Chart::new(src, dst, Interface::unit(), g, gflat)
    }

    /// Marginalizes the residual away, leaving a unit-residual chart.
    pub fn forget_residual(&self) -> Result<Chart> {
        let blocks = [&self.residual.c, &self.dst.c, &self.residual.a, &self.dst.a];
        let g = marginal(&self.g, &atoms_in(&[&self.residual.c, &self.dst.c], &[1]))?;
        let gflat = marginal(&self.gflat, &atoms_in(&blocks, &[1, 3]))?;
        Ok(Chart::new_unchecked(self.src.clone(), self.dst.clone(), Interface::unit(), g, gflat))
    }
}
