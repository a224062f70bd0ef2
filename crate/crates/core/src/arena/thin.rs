//! The thin square species: a yz- or xz-square exists exactly when its
//! boundary satisfies the stated equations, so both are boundary records
//! with a validator.

use crate::arena::{Chart, DetLens, ZPair};
use crate::error::{Error, Result};
use crate::kernel::DetKernel;
use crate::morphism::{check_equal, Morphism};

/// Boundary of a yz-square: z-morphisms on top and bottom, lenses on the
/// sides. Valid when `f13 ; f34 = f12 ; f24` on the exposed parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YZSquare {
    pub top: ZPair,
    pub bottom: ZPair,
    pub left: DetLens,
    pub right: DetLens,
}

impl YZSquare {
    pub fn new(top: ZPair, bottom: ZPair, left: DetLens, right: DetLens) -> Result<Self> {
        let sq = YZSquare { top, bottom, left, right };
        sq.validate()?;
        Ok(sq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.left.src != self.top.src
            || self.right.src != self.top.dst
            || self.left.dst != self.bottom.src
            || self.right.dst != self.bottom.dst
        {
            return Err(Error::BoundaryMismatch("yz-square sides do not meet".into()));
        }
        let lhs = Morphism::Det(self.left.f.compose(&self.bottom.fc)?);
        let rhs = Morphism::Det(self.top.fc.compose(&self.right.f)?);
        check_equal("yz-square", "f13 ; f34 = f12 ; f24", &lhs, &rhs)
    }

    /// Stacking along the lens direction.
    pub fn compose_y(&self, below: &YZSquare) -> Result<YZSquare> {
        if self.bottom != below.top {
            return Err(Error::BoundaryMismatch("yz-squares do not share a z-morphism".into()));
        }
        YZSquare::new(
            self.top.clone(),
            below.bottom.clone(),
            self.left.compose(&below.left)?,
            self.right.compose(&below.right)?,
        )
    }

    /// Stacking along the z direction.
    pub fn compose_z(&self, next: &YZSquare) -> Result<YZSquare> {
        if self.right != next.left {
            return Err(Error::BoundaryMismatch("yz-squares do not share a lens".into()));
        }
        YZSquare::new(
            self.top.compose(&next.top)?,
            self.bottom.compose(&next.bottom)?,
            self.left.clone(),
            next.right.clone(),
        )
    }
}

/// An xz-square: charts on top and bottom, z-morphisms on the sides, and
/// functions `f1234 : c12 → c34`, `g1234 : a12 → a34` between residuals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XZSquare {
    pub top: Chart,
    pub bottom: Chart,
    pub left: ZPair,
    pub right: ZPair,
    pub f1234: DetKernel,
    pub g1234: DetKernel,
}

impl XZSquare {
    pub fn new(top: Chart, bottom: Chart, left: ZPair, right: ZPair, f1234: DetKernel, g1234: DetKernel) -> Result<Self> {
        let sq = XZSquare { top, bottom, left, right, f1234, g1234 };
        sq.validate()?;
        Ok(sq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.left.src != self.top.src
            || self.right.src != self.top.dst
            || self.left.dst != self.bottom.src
            || self.right.dst != self.bottom.dst
        {
            return Err(Error::BoundaryMismatch("xz-square sides do not meet".into()));
        }
        let f = Morphism::Det(self.f1234.clone());
        let g = Morphism::Det(self.g1234.clone());
        let f24 = Morphism::Det(self.right.fc.clone());
        let g24 = Morphism::Det(self.right.fa.clone());
        let lhs = self.top.g.then(&f.tensor(&f24)?)?;
        let rhs = Morphism::Det(self.left.fc.clone()).then(&self.bottom.g)?;
        check_equal("xz-square", "f12 ; f1234⊗f24 = f13 ; f34", &lhs, &rhs)?;
        let lhs = self.top.gflat.then(&Morphism::tensor_all([&f, &f24, &g, &g24])?)?;
        let rhs = Morphism::Det(self.left.fc.tensor(&self.left.fa)).then(&self.bottom.gflat)?;
        check_equal("xz-square", "f12♭ ; f1234⊗f24⊗g1234⊗g24 = (f13⊗g13) ; f34♭", &lhs, &rhs)
    }

    /// Horizontal composite: charts copy-compose and the residual maps are
    /// `f1245 ⊗ f25 ⊗ f2356` and `g1245 ⊗ g25 ⊗ g2356`.
    pub fn compose_x(&self, next: &XZSquare) -> Result<XZSquare> {
        if self.right != next.left {
            return Err(Error::BoundaryMismatch("xz-squares do not share a z-morphism".into()));
        }
        XZSquare::new(
            self.top.compose(&next.top)?,
            self.bottom.compose(&next.bottom)?,
            self.left.clone(),
            next.right.clone(),
            self.f1234.tensor(&self.right.fc).tensor(&next.f1234),
            self.g1234.tensor(&self.right.fa).tensor(&next.g1234),
        )
    }

    /// Stacking along the z direction.
    pub fn compose_z(&self, below: &XZSquare) -> Result<XZSquare> {
        if self.bottom != below.top {
            return Err(Error::BoundaryMismatch("xz-squares do not share a chart".into()));
        }
        XZSquare::new(
            self.top.clone(),
            below.bottom.clone(),
            self.left.compose(&below.left)?,
            self.right.compose(&below.right)?,
            self.f1234.compose(&below.f1234)?,
            self.g1234.compose(&below.g1234)?,
        )
    }
}
