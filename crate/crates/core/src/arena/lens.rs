use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::DetKernel;
use crate::morphism::Morphism;
use crate::object::FiniteObject;

/// A pair `(a // c)`: `c` is what is exposed, `a` is what is received.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interface {
    pub a: FiniteObject,
    pub c: FiniteObject,
}

impl fmt::Debug for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} // {})", self.a, self.c)
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Interface {
    pub fn new(a: FiniteObject, c: FiniteObject) -> Self {
        Interface { a, c }
    }

    pub fn unit() -> Self {
        Interface::new(FiniteObject::unit(), FiniteObject::unit())
    }

    pub fn tensor(&self, other: &Interface) -> Interface {
        Interface::new(self.a.tensor(&other.a), self.c.tensor(&other.c))
    }

    pub fn tensor_all<'a>(items: impl IntoIterator<Item = &'a Interface>) -> Interface {
        items.into_iter().fold(Interface::unit(), |acc, i| acc.tensor(i))
    }
}

/// A deterministic lens `(a1 // c1) ⇆ (a2 // c2)`: `f : c1 → c2` forward and
/// `f♯ : c1⊗a2 → a1` backward.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DetLens {
    pub src: Interface,
    pub dst: Interface,
    pub f: DetKernel,
    pub fsharp: DetKernel,
}

impl fmt::Debug for DetLens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DetLens")
            .field("src", &self.src)
            .field("dst", &self.dst)
            .field("f", &self.f)
            .field("fsharp", &self.fsharp)
            .finish()
    }
}

impl DetLens {
    pub fn new(src: Interface, dst: Interface, f: DetKernel, fsharp: DetKernel) -> Result<Self> {
        if *f.dom() != src.c || *f.cod() != dst.c {
            return Err(Error::mismatch(
                "lens forward map",
                format!("{} -> {}", src.c, dst.c),
                format!("{} -> {}", f.dom(), f.cod()),
            ));
        }
        let back_dom = src.c.tensor(&dst.a);
        if *fsharp.dom() != back_dom || *fsharp.cod() != src.a {
            return Err(Error::mismatch(
                "lens backward map",
                format!("{} -> {}", back_dom, src.a),
                format!("{} -> {}", fsharp.dom(), fsharp.cod()),
            ));
        }
        Ok(DetLens { src, dst, f, fsharp })
    }

    /// Builds a lens from two morphisms, which must be functions.
    pub fn from_morphisms(src: Interface, dst: Interface, f: &Morphism, fsharp: &Morphism) -> Result<Self> {
        let f = f
            .as_det()
            .ok_or_else(|| Error::PreconditionViolation("lens forward map must be deterministic".into()))?;
        let fsharp = fsharp
            .as_det()
            .ok_or_else(|| Error::PreconditionViolation("lens backward map must be deterministic".into()))?;
        Self::new(src, dst, f, fsharp)
    }

    pub fn identity(i: &Interface) -> Self {
        DetLens {
            src: i.clone(),
            dst: i.clone(),
            f: DetKernel::identity(&i.c),
            fsharp: DetKernel::structural(&[&i.c, &i.a], &[1]),
        }
    }

    pub fn f_m(&self) -> Morphism {
        Morphism::Det(self.f.clone())
    }

    pub fn fsharp_m(&self) -> Morphism {
        Morphism::Det(self.fsharp.clone())
    }

    /// `self ; next`: forward maps compose, and the backward map is
    /// `c1⊗a3 → (copy;c1⊗f)⊗a3 → c1⊗c2⊗a3 → c1⊗g♯ → c1⊗a2 → f♯ → a1`.
    pub fn compose(&self, next: &DetLens) -> Result<DetLens> {
        if self.dst != next.src {
            return Err(Error::mismatch("lens composition", &self.dst, &next.src));
        }
        let c1 = &self.src.c;
        let c2 = &self.dst.c;
        let a3 = &next.dst.a;
        let h = self.f.compose(&next.f)?;
        let copy_f = DetKernel::structural(&[c1], &[0, 0]).compose(&DetKernel::identity(c1).tensor(&self.f))?;
        let step1 = copy_f.tensor(&DetKernel::identity(a3));
        let step2 = step1.compose(&DetKernel::identity(c1).tensor(&next.fsharp))?;
        let hsharp = step2.compose(&self.fsharp)?;
        debug_assert_eq!(step1.cod(), &c1.tensor(c2).tensor(a3));
        DetLens::new(self.src.clone(), next.dst.clone(), h, hsharp)
    }

    /// Parallel lens: `f⊗f'` forward, `c1 c1' a2 a2' → σ → c1 a2 c1' a2' → f♯⊗f'♯`
    /// backward.
    pub fn tensor(&self, other: &DetLens) -> DetLens {
        let (c1, c1p) = (&self.src.c, &other.src.c);
        let (a2, a2p) = (&self.dst.a, &other.dst.a);
        let sigma = DetKernel::structural(&[c1, c1p, a2, a2p], &[0, 2, 1, 3]);
        let fsharp = sigma
            .compose(&self.fsharp.tensor(&other.fsharp))
            .expect("blocks line up by construction");
        DetLens {
            src: self.src.tensor(&other.src),
            dst: self.dst.tensor(&other.dst),
            f: self.f.tensor(&other.f),
            fsharp,
        }
    }

    pub fn tensor_all<'a>(lenses: impl IntoIterator<Item = &'a DetLens>) -> DetLens {
        lenses
            .into_iter()
            .fold(DetLens::identity(&Interface::unit()), |acc, l| acc.tensor(l))
    }
}

/// A pair of functions `(c1 → c2, a1 → a2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZPair {
    pub src: Interface,
    pub dst: Interface,
    pub fc: DetKernel,
    pub fa: DetKernel,
}

impl ZPair {
    pub fn new(src: Interface, dst: Interface, fc: DetKernel, fa: DetKernel) -> Result<Self> {
        if *fc.dom() != src.c || *fc.cod() != dst.c || *fa.dom() != src.a || *fa.cod() != dst.a {
            return Err(Error::mismatch(
                "z-morphism",
                format!("{src} -> {dst}"),
                format!("({} -> {}, {} -> {})", fc.dom(), fc.cod(), fa.dom(), fa.cod()),
            ));
        }
        Ok(ZPair { src, dst, fc, fa })
    }

    pub fn identity(i: &Interface) -> Self {
        ZPair { src: i.clone(), dst: i.clone(), fc: DetKernel::identity(&i.c), fa: DetKernel::identity(&i.a) }
    }

    pub fn compose(&self, next: &ZPair) -> Result<ZPair> {
        if self.dst != next.src {
            return Err(Error::mismatch("z composition", &self.dst, &next.src));
        }
        ZPair::new(self.src.clone(), next.dst.clone(), self.fc.compose(&next.fc)?, self.fa.compose(&next.fa)?)
    }

    pub fn tensor(&self, other: &ZPair) -> ZPair {
        ZPair {
            src: self.src.tensor(&other.src),
            dst: self.dst.tensor(&other.dst),
            fc: self.fc.tensor(&other.fc),
            fa: self.fa.tensor(&other.fa),
        }
    }
}
