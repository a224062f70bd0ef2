//! A debug mode for lenses whose forward map may be stochastic. The
//! composition formula is the deterministic one read in the Markov
//! category, which no longer copies a single sample of the forward map, so
//! composition can fail to be associative. [`search_associativity_counterexample`]
//! looks for such failures.

use crate::arena::Interface;
use crate::error::{Error, Result};
use crate::gen::Gen;
use crate::morphism::Morphism;

/// `f : c1 → c2` and `f♯ : c1⊗a2 → a1`, both arbitrary kernels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxedLens {
    pub src: Interface,
    pub dst: Interface,
    pub f: Morphism,
    pub fsharp: Morphism,
}

impl RelaxedLens {
    pub fn new(src: Interface, dst: Interface, f: Morphism, fsharp: Morphism) -> Result<Self> {
        if *f.dom() != src.c || *f.cod() != dst.c {
            return Err(Error::mismatch("relaxed forward map", format!("{} -> {}", src.c, dst.c), format!("{} -> {}", f.dom(), f.cod())));
        }
        let back = src.c.tensor(&dst.a);
        if *fsharp.dom() != back || *fsharp.cod() != src.a {
            return Err(Error::mismatch(
                "relaxed backward map",
                format!("{back} -> {}", src.a),
                format!("{} -> {}", fsharp.dom(), fsharp.cod()),
            ));
        }
        Ok(RelaxedLens { src, dst, f, fsharp })
    }

    /// `f ; g` forward and `copy_c1 ; c1 ⊗ f ⊗ a3 ; c1 ⊗ g♯ ; f♯` backward.
    pub fn compose(&self, next: &RelaxedLens) -> Result<RelaxedLens> {
        if self.dst != next.src {
            return Err(Error::mismatch("relaxed lens composition", &self.dst, &next.src));
        }
        let (c1, a3) = (&self.src.c, &next.dst.a);
        let back = Morphism::chain([
            &Morphism::structural(&[c1, a3], &[0, 0, 1]),
            &self.f.tensor_id(a3)?.id_tensor(c1)?,
            &next.fsharp.id_tensor(c1)?,
            &self.fsharp,
        ])?;
        RelaxedLens::new(self.src.clone(), next.dst.clone(), self.f.then(&next.f)?, back)
    }
}

/// Three composable relaxed lenses whose two bracketings differ.
#[derive(Clone, Debug)]
pub struct AssociativityCounterexample {
    pub lenses: [RelaxedLens; 3],
    pub left: RelaxedLens,
    pub right: RelaxedLens,
}

/// Draws up to `tries` triples of relaxed lenses between interfaces of
/// atoms with at most `max` elements, with stochastic forward and backward
/// maps, and returns the first whose bracketings disagree.
pub fn search_associativity_counterexample(seed: u64, tries: usize, max: usize) -> Result<Option<AssociativityCounterexample>> {
    let mut g = Gen::new(seed);
    for _ in 0..tries {
        let faces: Vec<Interface> = (0..4).map(|_| Interface::new(g.atom(max), g.atom(max))).collect();
        let lens = |g: &mut Gen, s: &Interface, d: &Interface| {
            let f = g.stoch(&s.c, &d.c);
            let fsharp = g.stoch(&s.c.tensor(&d.a), &s.a);
            RelaxedLens::new(s.clone(), d.clone(), f, fsharp)
        };
        let l1 = lens(&mut g, &faces[0], &faces[1])?;
        let l2 = lens(&mut g, &faces[1], &faces[2])?;
        let l3 = lens(&mut g, &faces[2], &faces[3])?;
        let left = l1.compose(&l2)?.compose(&l3)?;
        let right = l1.compose(&l2.compose(&l3)?)?;
        if left != right {
            return Ok(Some(AssociativityCounterexample { lenses: [l1, l2, l3], left, right }));
        }
    }
    Ok(None)
}

/// The identity lens, which is deterministic and so stays a unit.
pub fn identity(i: &Interface) -> RelaxedLens {
    let back = Morphism::structural(&[&i.c, &i.a], &[1]);
    RelaxedLens { src: i.clone(), dst: i.clone(), f: Morphism::identity(&i.c), fsharp: back }
}
