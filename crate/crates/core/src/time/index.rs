use crate::error::{Error, Result};
use crate::kernel::DetKernel;
use crate::morphism::{check_equal, Morphism};
use crate::object::FiniteObject;

/// The chain `0 → 1 → ... → T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChainGraph {
    horizon: usize,
}

impl ChainGraph {
    pub fn new(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::ShapeMismatch("a chain graph needs at least one edge".into()));
        }
        Ok(ChainGraph { horizon })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn nodes(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.horizon
    }

    /// Edge `n` goes from node `n` to node `n + 1`.
    pub fn edges(&self) -> std::ops::Range<usize> {
        0..self.horizon
    }
}

/// An object per node with deterministic restrictions `A(n+1) → A(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexedObject {
    objects: Vec<FiniteObject>,
    restrictions: Vec<DetKernel>,
}

impl IndexedObject {
    pub fn new(objects: Vec<FiniteObject>, restrictions: Vec<DetKernel>) -> Result<Self> {
        if objects.len() < 2 || restrictions.len() + 1 != objects.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} objects need {} restrictions, found {}",
                objects.len(),
                objects.len().saturating_sub(1),
                restrictions.len()
            )));
        }
        for (n, r) in restrictions.iter().enumerate() {
            if *r.dom() != objects[n + 1] || *r.cod() != objects[n] {
                return Err(Error::mismatch(
                    format!("restriction {} -> {n}", n + 1),
                    format!("{} -> {}", objects[n + 1], objects[n]),
                    format!("{} -> {}", r.dom(), r.cod()),
                ));
            }
        }
        Ok(IndexedObject { objects, restrictions })
    }

    /// The same object at every node, restricted by identities.
    pub fn constant(x: &FiniteObject, graph: ChainGraph) -> Self {
        IndexedObject {
            objects: vec![x.clone(); graph.horizon() + 1],
            restrictions: vec![DetKernel::identity(x); graph.horizon()],
        }
    }

    pub fn unit(graph: ChainGraph) -> Self {
        Self::constant(&FiniteObject::unit(), graph)
    }

    /// Histories `A(n) = x^(n + offset)`; restrictions forget the last entry.
    pub fn history(x: &FiniteObject, graph: ChainGraph, offset: usize) -> Self {
        let objects: Vec<FiniteObject> = graph.nodes().map(|n| x.pow(n + offset)).collect();
        let width = x.n_atoms();
        let restrictions = graph
            .edges()
            .map(|n| {
                let keep: Vec<usize> = (0..(n + offset) * width).collect();
                DetKernel::select_atoms(&objects[n + 1], &keep).expect("prefix of atoms")
            })
            .collect();
        IndexedObject { objects, restrictions }
    }

    pub fn graph(&self) -> ChainGraph {
        ChainGraph { horizon: self.objects.len() - 1 }
    }

    pub fn horizon(&self) -> usize {
        self.objects.len() - 1
    }

    pub fn at(&self, n: usize) -> &FiniteObject {
        &self.objects[n]
    }

    pub fn objects(&self) -> &[FiniteObject] {
        &self.objects
    }

    /// `A(n+1) → A(n)`.
    pub fn restriction(&self, n: usize) -> &DetKernel {
        &self.restrictions[n]
    }

    pub fn restriction_m(&self, n: usize) -> Morphism {
        Morphism::Det(self.restrictions[n].clone())
    }

    /// The composite restriction `A(to) → A(from)` for `from <= to`.
    pub fn restrict_between(&self, from: usize, to: usize) -> DetKernel {
        (from..to)
            .rev()
            .fold(DetKernel::identity(&self.objects[to]), |acc, k| {
                acc.compose(&self.restrictions[k]).expect("restrictions chain")
            })
    }

    pub fn is_unit(&self) -> bool {
        self.objects.iter().all(FiniteObject::is_unit)
    }

    pub fn tensor(&self, other: &IndexedObject) -> Result<IndexedObject> {
        if self.horizon() != other.horizon() {
            return Err(Error::ShapeMismatch(format!(
                "horizons {} and {} differ",
                self.horizon(),
                other.horizon()
            )));
        }
        Ok(IndexedObject {
            objects: self.objects.iter().zip(&other.objects).map(|(a, b)| a.tensor(b)).collect(),
            restrictions: self.restrictions.iter().zip(&other.restrictions).map(|(a, b)| a.tensor(b)).collect(),
        })
    }
}

/// Checks that per-node maps `f^n : A(n) → B(n)` commute with restrictions.
pub(crate) fn check_natural(entity: &str, src: &IndexedObject, dst: &IndexedObject, maps: &[DetKernel]) -> Result<()> {
    for (n, _) in maps.iter().enumerate().skip(1) {
        let lhs = src.restriction(n - 1).compose(&maps[n - 1])?;
        let rhs = maps[n].compose(dst.restriction(n - 1))?;
        check_equal(entity, &format!("naturality at {} -> {}", n, n - 1), &lhs.into(), &rhs.into())
            .map_err(|e| Error::NaturalityViolation(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histories_forget_the_last_entry() {
        let g = ChainGraph::new(2).unwrap();
        let h = IndexedObject::history(&FiniteObject::range(2), g, 1);
        assert_eq!(h.at(2).shape(), vec![2, 2, 2]);
        let r = h.restriction(1);
        let idx = h.at(2).encode(&[1, 0, 1]);
        assert_eq!(h.at(1).decode(r.apply(idx)), vec![1, 0]);
        assert_eq!(h.restrict_between(0, 2).cod(), h.at(0));
    }

    #[test]
    fn offset_zero_history_starts_at_the_unit() {
        let g = ChainGraph::new(2).unwrap();
        let h = IndexedObject::history(&FiniteObject::range(3), g, 0);
        assert!(h.at(0).is_unit());
        assert_eq!(h.at(2).size(), 9);
    }

    #[test]
    fn zero_horizon_is_rejected() {
        assert!(matches!(ChainGraph::new(0), Err(Error::ShapeMismatch(_))));
    }
}
