//! Chain-indexed Mealy machines and their parametric variant: per-edge maps
//! `Ω(n+1) ⊗ A(n+1) ⊗ S(n) → B(n+1) ⊗ S(n+1)` whose new state restricts to
//! the old one.

use crate::error::{Error, Result};
use crate::kernel::DetKernel;
use crate::morphism::{check_equal, Morphism};
use crate::object::FiniteObject;
use crate::time::{GSystem, IndexedObject, Wiring};

fn check_horizons(objects: &[&IndexedObject], maps: usize) -> Result<()> {
    let t = objects[0].horizon();
    if objects.iter().any(|o| o.horizon() != t) || maps != t {
        return Err(Error::ShapeMismatch(format!("expected {t} edge maps over matching horizons, found {maps}")));
    }
    Ok(())
}

/// A parametric Mealy machine `A →[S, Ω] B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GParaMealy {
    pub src: IndexedObject,
    pub dst: IndexedObject,
    pub state: IndexedObject,
    pub param: IndexedObject,
    pub maps: Vec<Morphism>,
}

impl GParaMealy {
    pub fn new(
        src: IndexedObject,
        dst: IndexedObject,
        state: IndexedObject,
        param: IndexedObject,
        maps: Vec<Morphism>,
    ) -> Result<Self> {
        let m = GParaMealy { src, dst, state, param, maps };
        m.validate()?;
        Ok(m)
    }

    pub fn horizon(&self) -> usize {
        self.maps.len()
    }

    fn edge_dom(&self, n: usize) -> FiniteObject {
        FiniteObject::tensor_all([self.param.at(n + 1), self.src.at(n + 1), self.state.at(n)])
    }

    fn edge_cod(&self, n: usize) -> FiniteObject {
        self.dst.at(n + 1).tensor(self.state.at(n + 1))
    }

    /// Shapes, and the projection condition for every parameter value: the
    /// new state restricted to node `n` is the old state.
    pub fn validate(&self) -> Result<()> {
        check_horizons(&[&self.src, &self.dst, &self.state, &self.param], self.maps.len())?;
        for (n, f) in self.maps.iter().enumerate() {
            let (dom, cod) = (self.edge_dom(n), self.edge_cod(n));
            if *f.dom() != dom || *f.cod() != cod {
                return Err(Error::mismatch(
                    format!("Mealy map {n}"),
                    format!("{dom} -> {cod}"),
                    format!("{} -> {}", f.dom(), f.cod()),
                ));
            }
            let (p, a, s, b, s1) = (self.param.at(n + 1), self.src.at(n + 1), self.state.at(n), self.dst.at(n + 1), self.state.at(n + 1));
            let lhs = f.then(&Morphism::structural(&[b, s1], &[1]).then(&self.state.restriction_m(n))?)?;
            let rhs = Morphism::structural(&[p, a, s], &[2]);
            check_equal(&format!("Mealy map {n}"), "new state restricts to the old state", &lhs, &rhs)?;
        }
        Ok(())
    }

    /// Sequential composite `A →[S⊗T, Ω⊗Ω'] C`: `f` reads `Ω`, then `g`
    /// reads `Ω'` and the output of `f`.
    pub fn compose(&self, g: &GParaMealy) -> Result<GParaMealy> {
        if self.dst != g.src {
            return Err(Error::mismatch("Mealy composition", format!("{:?}", self.dst.objects()), format!("{:?}", g.src.objects())));
        }
        let maps = (0..self.horizon())
            .map(|n| {
                let (p, q) = (self.param.at(n + 1), g.param.at(n + 1));
                let (a, b, c) = (self.src.at(n + 1), self.dst.at(n + 1), g.dst.at(n + 1));
                let (s, s1, t, t1) = (self.state.at(n), self.state.at(n + 1), g.state.at(n), g.state.at(n + 1));
                Morphism::chain([
                    // P Q A S T → Q T P A S
                    &Morphism::structural(&[p, q, a, s, t], &[1, 4, 0, 2, 3]),
                    &self.maps[n].id_tensor(&q.tensor(t))?,
                    // Q T B S1 → Q B T S1
                    &Morphism::structural(&[q, t, b, s1], &[0, 2, 1, 3]),
                    &g.maps[n].tensor_id(s1)?,
                    // C T1 S1 → C S1 T1
                    &Morphism::structural(&[c, t1, s1], &[0, 2, 1]),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GParaMealy {
            src: self.src.clone(),
            dst: g.dst.clone(),
            state: self.state.tensor(&g.state)?,
            param: self.param.tensor(&g.param)?,
            maps,
        })
    }

    /// Parallel composite `A A' →[S T, Ω Ω'] B B'`.
    pub fn tensor(&self, g: &GParaMealy) -> Result<GParaMealy> {
        let maps = (0..self.horizon())
            .map(|n| {
                let (p, q) = (self.param.at(n + 1), g.param.at(n + 1));
                let (a, a2, b, b2) = (self.src.at(n + 1), g.src.at(n + 1), self.dst.at(n + 1), g.dst.at(n + 1));
                let (s, t, s1, t1) = (self.state.at(n), g.state.at(n), self.state.at(n + 1), g.state.at(n + 1));
                Morphism::chain([
                    // P Q A A' S T → P A S Q A' T
                    &Morphism::structural(&[p, q, a, a2, s, t], &[0, 2, 4, 1, 3, 5]),
                    &self.maps[n].tensor(&g.maps[n])?,
                    // B S1 B' T1 → B B' S1 T1
                    &Morphism::structural(&[b, s1, b2, t1], &[0, 2, 1, 3]),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GParaMealy {
            src: self.src.tensor(&g.src)?,
            dst: self.dst.tensor(&g.dst)?,
            state: self.state.tensor(&g.state)?,
            param: self.param.tensor(&g.param)?,
            maps,
        })
    }

    /// Fixes the parameters with a law `* → Ω(n+1)` per edge.
    pub fn with_params(&self, laws: &[Morphism]) -> Result<GMealy> {
        if laws.len() != self.horizon() {
            return Err(Error::ShapeMismatch(format!("{} parameter laws for {} edges", laws.len(), self.horizon())));
        }
        let maps = laws
            .iter()
            .enumerate()
            .map(|(n, law)| {
                let rest = self.src.at(n + 1).tensor(self.state.at(n));
                law.tensor_id(&rest)?.then(&self.maps[n])
            })
            .collect::<Result<Vec<_>>>()?;
        GMealy::new(self.src.clone(), self.dst.clone(), self.state.clone(), maps)
    }
}

/// A Mealy machine `A →[S] B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMealy {
    pub src: IndexedObject,
    pub dst: IndexedObject,
    pub state: IndexedObject,
    pub maps: Vec<Morphism>,
}

impl GMealy {
    pub fn new(src: IndexedObject, dst: IndexedObject, state: IndexedObject, maps: Vec<Morphism>) -> Result<Self> {
        let m = GMealy { src, dst, state, maps };
        m.validate()?;
        Ok(m)
    }

    pub fn horizon(&self) -> usize {
        self.maps.len()
    }

    /// The parametric machine with unit parameters.
    pub fn as_para(&self) -> GParaMealy {
        GParaMealy {
            src: self.src.clone(),
            dst: self.dst.clone(),
            state: self.state.clone(),
            param: IndexedObject::unit(self.src.graph()),
            maps: self.maps.clone(),
        }
    }

    fn from_para(p: GParaMealy) -> GMealy {
        debug_assert!(p.param.is_unit());
        GMealy { src: p.src, dst: p.dst, state: p.state, maps: p.maps }
    }

    pub fn validate(&self) -> Result<()> {
        self.as_para().validate()
    }

    pub fn compose(&self, g: &GMealy) -> Result<GMealy> {
        Ok(GMealy::from_para(self.as_para().compose(&g.as_para())?))
    }

    pub fn tensor(&self, g: &GMealy) -> Result<GMealy> {
        Ok(GMealy::from_para(self.as_para().tensor(&g.as_para())?))
    }

    /// A machine with unit state running `kernels[n] : A(n+1) → B(n+1)`.
    pub fn stateless(src: &IndexedObject, dst: &IndexedObject, kernels: Vec<Morphism>) -> Result<GMealy> {
        GMealy::new(src.clone(), dst.clone(), IndexedObject::unit(src.graph()), kernels)
    }

    pub fn identity(a: &IndexedObject) -> GMealy {
        let maps = (1..=a.horizon()).map(|n| Morphism::identity(a.at(n))).collect();
        GMealy { src: a.clone(), dst: a.clone(), state: IndexedObject::unit(a.graph()), maps }
    }

    /// The stateless symmetry `A B → B A`.
    pub fn swap(a: &IndexedObject, b: &IndexedObject) -> Result<GMealy> {
        let maps = (1..=a.horizon()).map(|n| Morphism::swap(a.at(n), b.at(n))).collect();
        GMealy::stateless(&a.tensor(b)?, &b.tensor(a)?, maps)
    }

    /// Conjugates the state by natural isomorphisms `iso[n] : S(n) → S'(n)`.
    pub fn relabel_state(&self, state: &IndexedObject, iso: &[DetKernel]) -> Result<GMealy> {
        if iso.len() != self.horizon() + 1 {
            return Err(Error::ShapeMismatch(format!("{} state isomorphisms for {} nodes", iso.len(), self.horizon() + 1)));
        }
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(n, f)| {
                let back = iso[n]
                    .inverse()
                    .ok_or_else(|| Error::PreconditionViolation(format!("state map {n} is not an isomorphism")))?;
                Morphism::chain([
                    &Morphism::Det(back).id_tensor(self.src.at(n + 1))?,
                    f,
                    &Morphism::Det(iso[n + 1].clone()).id_tensor(self.dst.at(n + 1))?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        GMealy::new(self.src.clone(), self.dst.clone(), state.clone(), maps)
    }

    /// The Moore system as a Mealy machine: update, copy the new state and
    /// expose one copy.
    pub fn from_moore(sys: &GSystem) -> Result<GMealy> {
        let maps = (0..sys.horizon())
            .map(|n| {
                let (i, s, s1) = (sys.input.at(n + 1), sys.state.at(n), sys.state.at(n + 1));
                Morphism::chain([
                    &Morphism::swap(i, s),
                    &sys.update[n],
                    &Morphism::copy(s1),
                    &Morphism::Det(sys.expose[n + 1].clone()).tensor_id(s1)?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        GMealy::new(sys.input.clone(), sys.output.clone(), sys.state.clone(), maps)
    }

    /// The two stateless machines around a wiring whose update ignores the
    /// inner output: `I2 → I1` before the system and `O1 → O2` after it.
    pub fn from_feedback_free_wiring(w: &Wiring) -> Result<(GMealy, GMealy)> {
        let t = w.horizon();
        let pre = (0..t)
            .map(|n| {
                let (o1, i2) = (w.inner_output.at(n), w.outer_input.at(n + 1));
                let f = Morphism::Det(w.update[n].clone());
                // Reading the update at every inner output value must agree.
                let first = Morphism::Det(DetKernel::new(FiniteObject::unit(), o1.clone(), vec![0])?)
                    .tensor_id(i2)?
                    .then(&f)?;
                let ignoring = Morphism::structural(&[o1, i2], &[1]).then(&first)?;
                check_equal("wiring update", "ignores the inner output", &f, &ignoring)
                    .map_err(|e| Error::PreconditionViolation(e.to_string()))?;
                Ok(first)
            })
            .collect::<Result<Vec<_>>>()?;
        let post = (1..=t).map(|n| Morphism::Det(w.expose[n].clone())).collect();
        Ok((
            GMealy::stateless(&w.outer_input, &w.inner_input, pre)?,
            GMealy::stateless(&w.inner_output, &w.outer_output, post)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::clock_system;

    #[test]
    fn the_clock_embeds_as_the_identity_on_the_unit() {
        let clock = clock_system(2).unwrap();
        let m = GMealy::from_moore(&clock).unwrap();
        assert_eq!(m, GMealy::identity(&clock.input));
    }
}
