//! Morphisms of the three finite instances behind one type.
//!
//! A [`Morphism`] is a stochastic kernel, a nonempty relation or a function.
//! Functions promote into either of the other two when combined with them;
//! stochastic kernels and relations never mix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{DetKernel, Kernel, PossKernel, StochKernel, Weight};
use crate::object::{Blocks, FiniteObject};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Instance {
    Stoch,
    Poss,
    Det,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Instance::Stoch => "stoch",
            Instance::Poss => "poss",
            Instance::Det => "det",
        })
    }
}

impl Instance {
    /// The instance two operands meet in, if any.
    pub fn join(self, other: Instance) -> Result<Instance> {
        match (self, other) {
            (Instance::Det, x) | (x, Instance::Det) => Ok(x),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(Error::InstanceMismatch { left: a.to_string(), right: b.to_string() }),
        }
    }

    pub fn join_all<'a>(ms: impl IntoIterator<Item = &'a Morphism>) -> Result<Instance> {
        ms.into_iter().try_fold(Instance::Det, |acc, m| acc.join(m.instance()))
    }
}

#[derive(Clone)]
pub enum Morphism {
    Stoch(StochKernel),
    Poss(PossKernel),
    Det(DetKernel),
}

/// Weights that correspond to one nondeterministic instance.
pub trait InstanceWeight: Weight {
    const INSTANCE: Instance;
    fn wrap(k: Kernel<Self>) -> Morphism;
    fn view(m: &Morphism) -> Option<&Kernel<Self>>;
}

impl InstanceWeight for Q {
    const INSTANCE: Instance = Instance::Stoch;
    fn wrap(k: Kernel<Self>) -> Morphism {
        Morphism::Stoch(k)
    }
    fn view(m: &Morphism) -> Option<&Kernel<Self>> {
        match m {
            Morphism::Stoch(k) => Some(k),
            _ => None,
        }
    }
}

impl InstanceWeight for bool {
    const INSTANCE: Instance = Instance::Poss;
    fn wrap(k: Kernel<Self>) -> Morphism {
        Morphism::Poss(k)
    }
    fn view(m: &Morphism) -> Option<&Kernel<Self>> {
        match m {
            Morphism::Poss(k) => Some(k),
            _ => None,
        }
    }
}

impl From<DetKernel> for Morphism {
    fn from(d: DetKernel) -> Self {
        Morphism::Det(d)
    }
}

impl From<StochKernel> for Morphism {
    fn from(k: StochKernel) -> Self {
        Morphism::Stoch(k)
    }
}

impl From<PossKernel> for Morphism {
    fn from(k: PossKernel) -> Self {
        Morphism::Poss(k)
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Morphism::Stoch(k) => write!(f, "Stoch {k:?}"),
            Morphism::Poss(k) => write!(f, "Poss {k:?}"),
            Morphism::Det(d) => write!(f, "{d:?}"),
        }
    }
}

impl Morphism {
    pub fn dom(&self) -> &FiniteObject {
        match self {
            Morphism::Stoch(k) => k.dom(),
            Morphism::Poss(k) => k.dom(),
            Morphism::Det(d) => d.dom(),
        }
    }

    pub fn cod(&self) -> &FiniteObject {
        match self {
            Morphism::Stoch(k) => k.cod(),
            Morphism::Poss(k) => k.cod(),
            Morphism::Det(d) => d.cod(),
        }
    }

    pub fn instance(&self) -> Instance {
        match self {
            Morphism::Stoch(_) => Instance::Stoch,
            Morphism::Poss(_) => Instance::Poss,
            Morphism::Det(_) => Instance::Det,
        }
    }

    pub fn identity(x: &FiniteObject) -> Morphism {
        Morphism::Det(DetKernel::identity(x))
    }

    pub fn copy(x: &FiniteObject) -> Morphism {
        Morphism::Det(DetKernel::structural(&[x], &[0, 0]))
    }

    pub fn discard(x: &FiniteObject) -> Morphism {
        Morphism::Det(DetKernel::structural(&[x], &[]))
    }

    pub fn swap(x: &FiniteObject, y: &FiniteObject) -> Morphism {
        Morphism::Det(DetKernel::structural(&[x, y], &[1, 0]))
    }

    pub fn structural(blocks: &[&FiniteObject], out: &[usize]) -> Morphism {
        Morphism::Det(DetKernel::structural(blocks, out))
    }

    /// The function underlying a morphism, when it is one. Kernels whose rows
    /// are all point masses count as functions.
    pub fn as_det(&self) -> Option<DetKernel> {
        match self {
            Morphism::Det(d) => Some(d.clone()),
            Morphism::Stoch(k) => k.to_det(),
            Morphism::Poss(k) => k.to_det(),
        }
    }

    /// The kernel of this morphism in the instance of `W`, promoting functions.
    pub fn kernel<W: InstanceWeight>(&self) -> Result<Kernel<W>> {
        match self {
            Morphism::Det(d) => Ok(Kernel::from_det(d)),
            m => W::view(m).cloned().ok_or_else(|| Error::InstanceMismatch {
                left: m.instance().to_string(),
                right: W::INSTANCE.to_string(),
            }),
        }
    }

    /// Converts into `target`, which must be reachable by promotion.
    pub fn promote(&self, target: Instance) -> Result<Morphism> {
        if self.instance() == target {
            return Ok(self.clone());
        }
        match target {
            Instance::Stoch => Ok(Morphism::Stoch(self.kernel::<Q>()?)),
            Instance::Poss => Ok(Morphism::Poss(self.kernel::<bool>()?)),
            Instance::Det => self.as_det().map(Morphism::Det).ok_or_else(|| {
                Error::InstanceMismatch { left: self.instance().to_string(), right: "det".into() }
            }),
        }
    }

    /// Diagrammatic composition `self ; g`.
    pub fn then(&self, g: &Morphism) -> Result<Morphism> {
        if self.cod() != g.dom() {
            return Err(Error::mismatch("compose", self.cod(), g.dom()));
        }
        Ok(match (self, g) {
            (Morphism::Det(a), Morphism::Det(b)) => Morphism::Det(a.compose(b)?),
            (Morphism::Stoch(a), Morphism::Stoch(b)) => Morphism::Stoch(a.compose(b)?),
            (Morphism::Poss(a), Morphism::Poss(b)) => Morphism::Poss(a.compose(b)?),
            (Morphism::Stoch(a), Morphism::Det(d)) => Morphism::Stoch(a.then_det(d)?),
            (Morphism::Poss(a), Morphism::Det(d)) => Morphism::Poss(a.then_det(d)?),
            (Morphism::Det(d), Morphism::Stoch(b)) => Morphism::Stoch(b.after_det(d)?),
            (Morphism::Det(d), Morphism::Poss(b)) => Morphism::Poss(b.after_det(d)?),
            (a, b) => {
                return Err(Error::InstanceMismatch {
                    left: a.instance().to_string(),
                    right: b.instance().to_string(),
                })
            }
        })
    }

    /// Composes a nonempty chain left to right.
    pub fn chain<'a>(ms: impl IntoIterator<Item = &'a Morphism>) -> Result<Morphism> {
        let mut it = ms.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::ShapeMismatch("empty composition chain".into()))?
            .clone();
        it.try_fold(first, |acc, m| acc.then(m))
    }

    pub fn tensor(&self, g: &Morphism) -> Result<Morphism> {
        Ok(match (self, g) {
            (Morphism::Det(a), Morphism::Det(b)) => Morphism::Det(a.tensor(b)),
            _ => match self.instance().join(g.instance())? {
                Instance::Stoch => Morphism::Stoch(self.kernel::<Q>()?.tensor(&g.kernel::<Q>()?)),
                Instance::Poss => {
                    Morphism::Poss(self.kernel::<bool>()?.tensor(&g.kernel::<bool>()?))
                }
                Instance::Det => unreachable!("two functions are handled above"),
            },
        })
    }

    pub fn tensor_all<'a>(ms: impl IntoIterator<Item = &'a Morphism>) -> Result<Morphism> {
        ms.into_iter()
            .try_fold(Morphism::identity(&FiniteObject::unit()), |acc, m| acc.tensor(m))
    }

    /// `self ⊗ id_x`.
    pub fn tensor_id(&self, x: &FiniteObject) -> Result<Morphism> {
        self.tensor(&Morphism::identity(x))
    }

    /// `id_x ⊗ self`.
    pub fn id_tensor(&self, x: &FiniteObject) -> Result<Morphism> {
        Morphism::identity(x).tensor(self)
    }

    /// `f ; copy == copy ; f⊗f`, evaluated exactly.
    pub fn is_deterministic(&self) -> bool {
        let lhs = self.then(&Morphism::copy(self.cod()));
        let rhs = Morphism::copy(self.dom()).then(&self.tensor(self).expect("same instance"));
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => l == r,
            _ => false,
        }
    }

    /// Reinterprets domain and codomain as other objects of the same sizes.
    pub fn relabel(&self, dom: FiniteObject, cod: FiniteObject) -> Result<Morphism> {
        Ok(match self {
            Morphism::Stoch(k) => Morphism::Stoch(k.relabel(dom, cod)?),
            Morphism::Poss(k) => Morphism::Poss(k.relabel(dom, cod)?),
            Morphism::Det(d) => Morphism::Det(d.relabel(dom, cod)?),
        })
    }

    /// A function described blockwise, see [`DetKernel::from_block_fn`].
    pub fn from_block_fn(
        dom: &[&FiniteObject],
        cod: &[&FiniteObject],
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Morphism> {
        Ok(Morphism::Det(DetKernel::from_block_fn(dom, cod, f)?))
    }

    /// Row `i` as `(column, weight)` pairs in the instance `W`.
    pub fn row_in<W: InstanceWeight>(&self, i: usize) -> Result<Vec<(usize, W)>> {
        match self {
            Morphism::Det(d) => Ok(vec![(d.apply(i), W::one())]),
            m => W::view(m)
                .map(|k| k.row(i).to_vec())
                .ok_or_else(|| Error::InstanceMismatch {
                    left: m.instance().to_string(),
                    right: W::INSTANCE.to_string(),
                }),
        }
    }

    /// Support of row `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        match self {
            Morphism::Det(d) => vec![d.apply(i)],
            Morphism::Stoch(k) => k.row(i).iter().map(|(j, _)| *j).collect(),
            Morphism::Poss(k) => k.row(i).iter().map(|(j, _)| *j).collect(),
        }
    }

    /// Stochastic weight of cell `(i, j)`, if this is a stochastic kernel or
    /// a function.
    pub fn prob(&self, i: usize, j: usize) -> Option<Q> {
        match self {
            Morphism::Stoch(k) => Some(k.get(i, j)),
            Morphism::Det(d) => Some(if d.apply(i) == j { Q::from_integer(1.into()) } else { Q::from_integer(0.into()) }),
            Morphism::Poss(_) => None,
        }
    }

    /// The first cell where two morphisms with the same boundary differ, as
    /// human-readable labels, or `None` when they are equal.
    pub fn first_difference(&self, other: &Morphism) -> Option<String> {
        if self.dom() != other.dom() || self.cod() != other.cod() {
            return Some(format!(
                "boundaries differ: {} -> {} vs {} -> {}",
                self.dom(),
                self.cod(),
                other.dom(),
                other.cod()
            ));
        }
        let inst = match self.instance().join(other.instance()) {
            Ok(i) => i,
            Err(e) => return Some(e.to_string()),
        };
        for i in 0..self.dom().size() {
            let differs = match inst {
                Instance::Det => self.support(i) != other.support(i),
                Instance::Stoch => self.row_in::<Q>(i).ok() != other.row_in::<Q>(i).ok(),
                Instance::Poss => self.row_in::<bool>(i).ok() != other.row_in::<bool>(i).ok(),
            };
            if differs {
                return Some(format!("row {} differs", self.dom().label(i)));
            }
        }
        None
    }
}

/// Semantic equality: functions compare equal to their promoted kernels.
impl PartialEq for Morphism {
    fn eq(&self, other: &Self) -> bool {
        if self.dom() != other.dom() || self.cod() != other.cod() {
            return false;
        }
        match (self, other) {
            (Morphism::Det(a), Morphism::Det(b)) => a.map() == b.map(),
            (Morphism::Stoch(a), Morphism::Stoch(b)) => a.rows() == b.rows(),
            (Morphism::Poss(a), Morphism::Poss(b)) => a.rows() == b.rows(),
            (Morphism::Det(d), m) | (m, Morphism::Det(d)) => match m.as_det() {
                Some(e) => e.map() == d.map(),
                None => false,
            },
            _ => false,
        }
    }
}

impl Eq for Morphism {}

/// Projection of `x` onto the listed atoms, in the listed order.
pub fn select_atoms(x: &FiniteObject, picks: &[usize]) -> Result<Morphism> {
    Ok(Morphism::Det(DetKernel::select_atoms(x, picks)?))
}

/// Blockwise structural map, with the blocks given as objects and the output
/// as block indices. Shorthand used by the diagram transcriptions.
pub fn perm(blocks: &[&FiniteObject], out: &[usize]) -> Morphism {
    Morphism::structural(blocks, out)
}

/// Tensor of identities and one morphism placed at block `at`.
pub fn whisker(blocks: &[&FiniteObject], at: usize, f: &Morphism) -> Result<Morphism> {
    if blocks[at] != f.dom() {
        return Err(Error::mismatch("whisker", blocks[at], f.dom()));
    }
    let left = FiniteObject::tensor_all(blocks[..at].iter().copied());
    let right = FiniteObject::tensor_all(blocks[at + 1..].iter().copied());
    f.id_tensor(&left)?.tensor_id(&right)
}

/// Atom positions covered by the picked blocks of a product of `objects`.
pub fn atoms_in(objects: &[&FiniteObject], picks: &[usize]) -> Vec<usize> {
    Blocks::new(objects).atoms_of(picks)
}

/// `Ok` when `lhs == rhs`, otherwise a validation error naming the entity,
/// the law, and the first differing row.
pub fn check_equal(entity: &str, law: &str, lhs: &Morphism, rhs: &Morphism) -> Result<()> {
    match lhs.first_difference(rhs) {
        None => Ok(()),
        Some(detail) => Err(Error::validation(entity, law, detail)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn two() -> FiniteObject {
        FiniteObject::range(2)
    }

    fn stoch(dom: FiniteObject, cod: FiniteObject, rows: Vec<Vec<Q>>) -> Morphism {
        Morphism::Stoch(StochKernel::from_dense(dom, cod, rows).unwrap())
    }

    #[test]
    fn composition_examples() {
        let p = stoch(FiniteObject::unit(), two(), vec![vec![q(1, 2), q(1, 2)]]);
        let k = stoch(two(), two(), vec![vec![q(1, 3), q(2, 3)], vec![q(0, 1), q(1, 1)]]);
        let out = p.then(&k).unwrap();
        // The middle sum: 1/2*1/3 + 1/2*0 and 1/2*2/3 + 1/2*1.
        let expect = stoch(FiniteObject::unit(), two(), vec![vec![q(1, 6), q(5, 6)]]);
        assert_eq!(out, expect);
        assert_eq!(p.then(&Morphism::identity(&two())).unwrap(), p);

        let dirac0 = Morphism::Det(DetKernel::new(FiniteObject::unit(), two(), vec![0]).unwrap());
        let flip = Morphism::Det(DetKernel::new(two(), two(), vec![1, 0]).unwrap());
        assert_eq!(dirac0.then(&flip).unwrap().as_det().unwrap().map(), &[1]);
    }

    #[test]
    fn tensor_is_kronecker() {
        let a = stoch(FiniteObject::unit(), two(), vec![vec![q(1, 2), q(1, 2)]]);
        let b = stoch(FiniteObject::unit(), two(), vec![vec![q(1, 3), q(2, 3)]]);
        let t = a.tensor(&b).unwrap();
        let expect: Vec<Q> = [(1, 2), (1, 2)]
            .iter()
            .flat_map(|x| [(1, 3), (2, 3)].iter().map(move |y| q(x.0, x.1) * q(y.0, y.1)))
            .collect();
        assert_eq!(expect, vec![q(1, 6), q(1, 3), q(1, 6), q(1, 3)]);
        assert_eq!(t.kernel::<Q>().unwrap().dense_row(0), expect);
    }

    #[test]
    fn stoch_and_poss_do_not_mix() {
        let a = stoch(two(), two(), vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        let b = Morphism::Poss(PossKernel::from_dense(two(), two(), vec![vec![true, true], vec![false, true]]).unwrap());
        assert!(matches!(a.then(&b), Err(Error::InstanceMismatch { .. })));
        assert!(a.tensor(&b).is_err());
        assert_eq!(a, Morphism::identity(&two()));
        assert_ne!(a, b);
    }

    #[test]
    fn determinism_by_copy_equation() {
        let u = stoch(FiniteObject::unit(), two(), vec![vec![q(1, 2), q(1, 2)]]);
        assert!(!u.is_deterministic());
        let r = Morphism::Poss(PossKernel::from_dense(FiniteObject::unit(), two(), vec![vec![true, true]]).unwrap());
        assert!(!r.is_deterministic());
        assert!(Morphism::swap(&two(), &FiniteObject::range(3)).is_deterministic());
    }
}
