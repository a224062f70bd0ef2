use std::fmt;

use crate::arena::{DetLens, Interface};
use crate::error::{Error, Result};
use crate::kernel::DetKernel;
use crate::morphism::{check_equal, select_atoms, Morphism};
use crate::object::FiniteObject;

/// A state object `r : S̃ → S`: full states `S̃` and their deterministic
/// projection onto the part `S` that lenses read.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SystemObject {
    pub stilde: FiniteObject,
    pub s: FiniteObject,
    pub r: DetKernel,
}

impl fmt::Debug for SystemObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} -> {})", self.stilde, self.s)
    }
}

impl fmt::Display for SystemObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl SystemObject {
    pub fn new(r: DetKernel) -> Self {
        SystemObject { stilde: r.dom().clone(), s: r.cod().clone(), r }
    }

    /// `S̃ = S` with the identity structure map.
    pub fn plain(s: &FiniteObject) -> Self {
        SystemObject::new(DetKernel::identity(s))
    }

    pub fn unit() -> Self {
        SystemObject::plain(&FiniteObject::unit())
    }

    pub fn r_m(&self) -> Morphism {
        Morphism::Det(self.r.clone())
    }

    pub fn tensor(&self, other: &SystemObject) -> SystemObject {
        SystemObject::new(self.r.tensor(&other.r))
    }
}

/// An x-morphism between state objects: `f♭ : S̃1 → S̃2` and `f : S1 → S2`
/// with `f♭ ; r2 = r1 ; f`. These compose in the ordinary way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SysXMor {
    pub src: SystemObject,
    pub dst: SystemObject,
    pub fflat: Morphism,
    pub f: Morphism,
}

impl SysXMor {
    pub fn new(src: SystemObject, dst: SystemObject, fflat: Morphism, f: Morphism) -> Result<Self> {
        let x = SysXMor { src, dst, fflat, f };
        x.validate()?;
        Ok(x)
    }

    pub(crate) fn new_unchecked(src: SystemObject, dst: SystemObject, fflat: Morphism, f: Morphism) -> Self {
        SysXMor { src, dst, fflat, f }
    }

    pub fn validate(&self) -> Result<()> {
        if *self.fflat.dom() != self.src.stilde || *self.fflat.cod() != self.dst.stilde {
            return Err(Error::mismatch(
                "state x-morphism f♭",
                format!("{} -> {}", self.src.stilde, self.dst.stilde),
                format!("{} -> {}", self.fflat.dom(), self.fflat.cod()),
            ));
        }
        if *self.f.dom() != self.src.s || *self.f.cod() != self.dst.s {
            return Err(Error::mismatch(
                "state x-morphism f",
                format!("{} -> {}", self.src.s, self.dst.s),
                format!("{} -> {}", self.f.dom(), self.f.cod()),
            ));
        }
        let lhs = self.fflat.then(&self.dst.r_m())?;
        let rhs = self.src.r_m().then(&self.f)?;
        check_equal("state x-morphism", "f♭ ; r2 = r1 ; f", &lhs, &rhs)
    }

    pub fn compose(&self, next: &SysXMor) -> Result<SysXMor> {
        if self.dst != next.src {
            return Err(Error::mismatch("state x-morphism composition", &self.dst, &next.src));
        }
        Ok(SysXMor::new_unchecked(
            self.src.clone(),
            next.dst.clone(),
            self.fflat.then(&next.fflat)?,
            self.f.then(&next.f)?,
        ))
    }

    pub fn tensor(&self, other: &SysXMor) -> Result<SysXMor> {
        Ok(SysXMor::new_unchecked(
            self.src.tensor(&other.src),
            self.dst.tensor(&other.dst),
            self.fflat.tensor(&other.fflat)?,
            self.f.tensor(&other.f)?,
        ))
    }

    /// The pair of projections `S̃1 S̃2 → S̃i`, `S1 S2 → Si`.
    pub fn projection(a: &SystemObject, b: &SystemObject, which: usize) -> SysXMor {
        let pick = |x: &FiniteObject, y: &FiniteObject| Morphism::structural(&[x, y], &[which]);
        SysXMor::new_unchecked(
            a.tensor(b),
            if which == 0 { a.clone() } else { b.clone() },
            pick(&a.stilde, &b.stilde),
            pick(&a.s, &b.s),
        )
    }
}

/// A system lens `(S̃ // S) ⇆ (a // c)`: a deterministic output map
/// `f : S → c` and a possibly nondeterministic update `f♯ : S⊗a → S̃` with
/// `f♯ ; r = π_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SysYMor {
    pub src: SystemObject,
    pub dst: Interface,
    pub f: DetKernel,
    pub fsharp: Morphism,
}

impl SysYMor {
    pub fn new(src: SystemObject, dst: Interface, f: DetKernel, fsharp: Morphism) -> Result<Self> {
        let y = SysYMor { src, dst, f, fsharp };
        y.validate()?;
        Ok(y)
    }

    pub(crate) fn new_unchecked(src: SystemObject, dst: Interface, f: DetKernel, fsharp: Morphism) -> Self {
        SysYMor { src, dst, f, fsharp }
    }

    pub fn f_m(&self) -> Morphism {
        Morphism::Det(self.f.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if *self.f.dom() != self.src.s || *self.f.cod() != self.dst.c {
            return Err(Error::mismatch(
                "system lens output map",
                format!("{} -> {}", self.src.s, self.dst.c),
                format!("{} -> {}", self.f.dom(), self.f.cod()),
            ));
        }
        let dom = self.src.s.tensor(&self.dst.a);
        if *self.fsharp.dom() != dom || *self.fsharp.cod() != self.src.stilde {
            return Err(Error::mismatch(
                "system lens update map",
                format!("{} -> {}", dom, self.src.stilde),
                format!("{} -> {}", self.fsharp.dom(), self.fsharp.cod()),
            ));
        }
        let lhs = self.fsharp.then(&self.src.r_m())?;
        let rhs = select_atoms(&dom, &(0..self.src.s.n_atoms()).collect::<Vec<_>>())?;
        check_equal("system lens", "f♯ ; r = π_S", &lhs, &rhs)
    }

    /// Follows the system lens by a deterministic lens:
    /// `S a2 → copy_S ; S⊗f⊗a2 → S c1 a2 → S⊗g♯ → S a1 → f♯ → S̃`.
    pub fn then_lens(&self, lens: &DetLens) -> Result<SysYMor> {
        if self.dst != lens.src {
            return Err(Error::mismatch("system lens composition", &self.dst, &lens.src));
        }
        let s = &self.src.s;
        let a2 = &lens.dst.a;
        let f = self.f.compose(&lens.f)?;
        let fsharp = Morphism::chain([
            &Morphism::structural(&[s, a2], &[0, 0, 1]),
            &self.f_m().tensor_id(a2)?.id_tensor(s)?,
            &lens.fsharp_m().id_tensor(s)?,
            &self.fsharp,
        ])?;
        Ok(SysYMor::new_unchecked(self.src.clone(), lens.dst.clone(), f, fsharp))
    }

    /// Parallel system lens; the update map reads `S1 S2 a1 a2` as
    /// `S1 a1 S2 a2`.
    pub fn tensor(&self, other: &SysYMor) -> Result<SysYMor> {
        let (s1, s2, a1, a2) = (&self.src.s, &other.src.s, &self.dst.a, &other.dst.a);
        let fsharp = Morphism::structural(&[s1, s2, a1, a2], &[0, 2, 1, 3]).then(&self.fsharp.tensor(&other.fsharp)?)?;
        Ok(SysYMor::new_unchecked(
            self.src.tensor(&other.src),
            self.dst.tensor(&other.dst),
            self.f.tensor(&other.f),
            fsharp,
        ))
    }
}
