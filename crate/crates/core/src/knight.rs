//! Uniformization of finite stochastic kernels by inverse-CDF interval
//! partitions, and systems whose only nondeterminism is an explicit choice
//! parameter.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::{DetKernel, Kernel, StochKernel};
use crate::markov::distribution;
use crate::morphism::Morphism;
use crate::object::FiniteObject;
use crate::rational::{format_q, one, zero, Q};
use crate::time::{clock_system, unroll_trajectory, ChainGraph, GSystem, IndexedObject, InputPolicy};

/// The partition of `(0, 1]` for one domain element: interval `j` is
/// `(breakpoints[j], breakpoints[j + 1]]` and maps to codomain element `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellPartition {
    pub breakpoints: Vec<Q>,
}

impl CellPartition {
    fn from_row(row: &[Q]) -> Self {
        let mut breakpoints = Vec::with_capacity(row.len() + 1);
        let mut acc = zero();
        breakpoints.push(acc.clone());
        for w in row {
            acc += w;
            breakpoints.push(acc.clone());
        }
        CellPartition { breakpoints }
    }

    /// Number of intervals, one per codomain element, empty ones included.
    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn length(&self, j: usize) -> Q {
        self.breakpoints[j + 1].clone() - &self.breakpoints[j]
    }

    /// The cumulative mass `F(t)` of targets `0..=t`.
    pub fn cumulative(&self, t: usize) -> Q {
        self.breakpoints[t + 1].clone()
    }

    /// `G(p)`: the target whose interval contains `p`. Defined on `(0, 1]`.
    pub fn apply(&self, p: &Q) -> Option<usize> {
        if *p <= zero() || *p > one() {
            return None;
        }
        // The first breakpoint at or above p closes the interval holding it.
        let k = self.breakpoints.partition_point(|b| b < p);
        Some(k - 1)
    }
}

/// An interval partition for every element of the domain of a stochastic
/// kernel. Targets within a cell follow codomain label order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalPartition {
    pub dom: FiniteObject,
    pub cod: FiniteObject,
    pub cells: Vec<CellPartition>,
}

/// Running sums of each row of `f`.
pub fn uniformize(f: &StochKernel) -> IntervalPartition {
    let cells = (0..f.dom().size()).map(|i| CellPartition::from_row(&f.dense_row(i))).collect();
    IntervalPartition { dom: f.dom().clone(), cod: f.cod().clone(), cells }
}

/// [`uniformize`] for a morphism; only stochastic and deterministic ones
/// qualify.
pub fn uniformize_morphism(f: &Morphism) -> Result<IntervalPartition> {
    match f {
        Morphism::Poss(_) => Err(Error::PreconditionViolation("uniformization needs a stochastic kernel".into())),
        _ => Ok(uniformize(&f.kernel::<Q>()?)),
    }
}

impl IntervalPartition {
    /// `G(p, x)` for domain element `x`.
    pub fn apply(&self, x: usize, p: &Q) -> Option<usize> {
        self.cells.get(x)?.apply(p)
    }

    /// Interval lengths of cell `x`, indexed by target.
    pub fn lengths(&self, x: usize) -> Vec<Q> {
        let cell = &self.cells[x];
        (0..cell.len()).map(|j| cell.length(j)).collect()
    }

    /// The kernel whose rows are the interval lengths.
    pub fn to_kernel(&self) -> Result<StochKernel> {
        Kernel::from_dense(self.dom.clone(), self.cod.clone(), (0..self.cells.len()).map(|x| self.lengths(x)).collect())
    }

    /// The function read off a partition in which every cell is one full
    /// interval, if it is one.
    pub fn as_function(&self) -> Option<DetKernel> {
        let map = (0..self.cells.len())
            .map(|x| self.lengths(x).iter().position(|w| *w == one()))
            .collect::<Option<Vec<_>>>()?;
        DetKernel::new(self.dom.clone(), self.cod.clone(), map).ok()
    }

    /// The quantile map `Ω⊗dom → cod` on the atoms of a refinement fine
    /// enough for this partition.
    pub fn quantile_map(&self, r: &Refinement) -> Result<DetKernel> {
        let dom = r.omega.tensor(&self.dom);
        let n = self.dom.size();
        let map = (0..dom.size())
            .map(|k| {
                let (w, x) = (k / n, k % n);
                let p = &r.points[w];
                let t = self.apply(x, p).expect("points lie in (0, 1]");
                // The whole atom must fall inside one interval.
                if self.cells[x].breakpoints[t] > r.points_below(w) {
                    return Err(Error::PreconditionViolation("refinement is coarser than the partition".into()));
                }
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()?;
        DetKernel::new(dom, self.cod.clone(), map)
    }

    /// The coarsest refinement of this partition together with its quantile
    /// map: `weights ⊗ id ; G` is the original kernel.
    pub fn refinement(&self) -> Result<(Refinement, DetKernel)> {
        let r = Refinement::common(&[self])?;
        let g = self.quantile_map(&r)?;
        Ok((r, g))
    }

    /// Rational-string encoding.
    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .enumerate()
            .map(|(x, c)| {
                json!({
                    "source": self.dom.label(x),
                    "breakpoints": c.breakpoints.iter().map(format_q).collect::<Vec<_>>(),
                    "targets": (0..c.len()).map(|j| self.cod.label(j)).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "dom": self.dom.to_string(), "cod": self.cod.to_string(), "cells": cells })
    }
}

/// A finite probability space `Ω` of subintervals of `(0, 1]` cut at every
/// breakpoint of some partitions, with positive lengths as weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub omega: FiniteObject,
    /// Right endpoint of each atom.
    pub points: Vec<Q>,
    pub weights: Vec<Q>,
}

impl Refinement {
    pub fn common(parts: &[&IntervalPartition]) -> Result<Self> {
        let mut cuts: Vec<Q> = parts.iter().flat_map(|p| p.cells.iter()).flat_map(|c| c.breakpoints.iter().cloned()).collect();
        cuts.push(zero());
        cuts.push(one());
        cuts.sort();
        cuts.dedup();
        if cuts.first() != Some(&zero()) || cuts.last() != Some(&one()) {
            return Err(Error::InvalidKernel("breakpoints must lie in [0, 1]".into()));
        }
        let points: Vec<Q> = cuts[1..].to_vec();
        let weights: Vec<Q> = cuts.windows(2).map(|w| w[1].clone() - &w[0]).collect();
        Ok(Refinement { omega: FiniteObject::range(points.len()), points, weights })
    }

    fn points_below(&self, w: usize) -> Q {
        if w == 0 {
            zero()
        } else {
            self.points[w - 1].clone()
        }
    }

    /// The law `* → Ω`.
    pub fn law(&self) -> Result<Morphism> {
        distribution(&self.omega, self.weights.clone())
    }
}

/// `Knight_Ω0`: unit state and interface at every node, with the choice
/// parameter `Ω(n) = Ω0^n` consumed one entry per step by the unique update
/// maps `Ω(n+1) ⊗ S(n) ⊗ I(n+1) → S(n+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnightSystem {
    pub omega: FiniteObject,
    pub params: IndexedObject,
    pub system: GSystem,
    pub update: Vec<Morphism>,
}

pub fn knight_system(omega0: &FiniteObject, horizon: usize) -> Result<KnightSystem> {
    let system = clock_system(horizon)?;
    let params = IndexedObject::history(omega0, ChainGraph::new(horizon)?, 0);
    let update = (0..horizon).map(|n| Morphism::discard(params.at(n + 1))).collect();
    Ok(KnightSystem { omega: omega0.clone(), params, system, update })
}

impl KnightSystem {
    pub fn horizon(&self) -> usize {
        self.system.horizon()
    }
}

/// A closed Markov chain made deterministic by uniformization: one choice
/// picks the start and one more picks every step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnightBehavior {
    pub refinement: Refinement,
    pub start: DetKernel,
    pub step: DetKernel,
    /// `b^n : Ω^(n+1) → S^(n+1)`.
    pub paths: Vec<DetKernel>,
}

pub fn knight_behavior(initial: &Morphism, update: &Morphism, horizon: usize) -> Result<KnightBehavior> {
    let s = update.cod().clone();
    if *update.dom() != s || *initial.cod() != s || !initial.dom().is_unit() {
        return Err(Error::mismatch(
            "knight behavior",
            format!("* -> {s} and {s} -> {s}"),
            format!("{} -> {} and {} -> {}", initial.dom(), initial.cod(), update.dom(), update.cod()),
        ));
    }
    let (p0, pu) = (uniformize_morphism(initial)?, uniformize_morphism(update)?);
    let refinement = Refinement::common(&[&p0, &pu])?;
    let start = p0.quantile_map(&refinement)?.relabel(refinement.omega.clone(), s.clone())?;
    let step = pu.quantile_map(&refinement)?;
    let omega = &refinement.omega;
    let paths = (0..=horizon)
        .map(|n| {
            let dom = omega.pow(n + 1);
            let cod = s.pow(n + 1);
            DetKernel::from_block_fn(&[&dom], &[&cod], |v| {
                let ws = dom.decode(v[0]);
                let mut states = vec![start.apply(ws[0])];
                for w in &ws[1..] {
                    let last = *states.last().expect("nonempty");
                    states.push(step.apply(w * s.size() + last));
                }
                vec![cod.encode(&states)]
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KnightBehavior { refinement, start, step, paths })
}

impl KnightBehavior {
    /// The i.i.d. choice law on `Ω^(n+1)` followed by `b^n`.
    pub fn with_iid_choices(&self, n: usize) -> Result<Morphism> {
        let law = self.refinement.law()?;
        let iid = (0..=n).try_fold(Morphism::identity(&FiniteObject::unit()), |acc, _| acc.tensor(&law))?;
        iid.then(&Morphism::Det(self.paths[n].clone()))
    }

    /// Whether the laws agree with the unrolled chain at every node.
    pub fn matches_unroll(&self, initial: &Morphism, update: &Morphism) -> Result<Vec<bool>> {
        let horizon = self.paths.len() - 1;
        if horizon == 0 {
            return Ok(vec![self.with_iid_choices(0)? == *initial]);
        }
        let s = update.cod();
        let sys = crate::time::open_markov(
            s,
            &FiniteObject::unit(),
            &FiniteObject::unit(),
            &DetKernel::structural(&[s], &[]),
            update,
            horizon,
        )?;
        let traj = unroll_trajectory(&sys, initial, &InputPolicy::Closed)?;
        (0..=horizon).map(|n| Ok(self.with_iid_choices(n)? == traj.phi[n])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn apply_is_right_closed() {
        let c = CellPartition::from_row(&[q(1, 3), q(0, 1), q(2, 3)]);
        assert_eq!(c.apply(&q(1, 3)), Some(0));
        assert_eq!(c.apply(&q(1, 2)), Some(2));
        assert_eq!(c.apply(&q(0, 1)), None);
        assert_eq!(c.apply(&q(1, 1)), Some(2));
    }
}
