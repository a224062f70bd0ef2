use crate::arena::XYSquare;
use crate::error::Result;
use crate::kernel::DetKernel;
use crate::markov::{displays_cond_indep, distribution, marginal};
use crate::morphism::{atoms_in, Morphism};
use crate::object::FiniteObject;
use crate::rational::q;
use crate::time::index::{ChainGraph, IndexedObject};
use crate::time::system::{compose_system_with_lens, GSystem, Wiring};
use crate::time::trajectory::{chart_cell, check_time_coherence, lift_trajectory, GTrajectory};

/// The laws `μ^n : * → S(n) I2(n+1) I1(n+1) O1(n) O2(n)` obtained from a
/// trajectory of the wired system by recomputing the inner wires.
pub fn inner_laws(tprime: &GTrajectory, sys: &GSystem, wiring: &Wiring) -> Result<Vec<Morphism>> {
    (0..tprime.horizon())
        .map(|n| {
            let (st, i2, i1, o1, o2) = (
                sys.state.at(n),
                wiring.outer_input.at(n + 1),
                wiring.inner_input.at(n + 1),
                wiring.inner_output.at(n),
                wiring.outer_output.at(n),
            );
            let (expose, lens) = (&sys.expose[n], wiring.lens(n));
            let n_i2 = i2.size();
            let spread = Morphism::from_block_fn(&[st, i2], &[st, i2, i1, o1, o2], |v| {
                let o = expose.apply(v[0]);
                vec![v[0], v[1], lens.fsharp.apply(o * n_i2 + v[1]), o, lens.f.apply(o)]
            })?;
            tprime.s[n].then(&spread)
        })
        .collect()
}

/// The outcome of [`factorization_check`].
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    /// The inner trajectory `t`, marginal of `μ` on `S(n) I1(n+1)`.
    pub inner: GTrajectory,
    /// The cells with `s = t12^n`, marginal of `μ` on `O1(n) I2(n+1)`.
    pub cells: Vec<XYSquare>,
    /// Whether `t'^n` is generated from its restriction to `S(0)` by updates.
    pub generated: Vec<bool>,
    /// Whether `i2(n+1) ⊥ s(0)` given `o1(n)` under `μ^n`.
    pub independent: Vec<bool>,
    /// Whether `t'^n` equals the edge law of `t / t12`.
    pub factorizes: Vec<bool>,
}

impl FactorizationReport {
    /// Both hypotheses hold at edge `n`.
    pub fn hypotheses_hold(&self, n: usize) -> bool {
        self.generated[n] && self.independent[n]
    }

    /// Every edge satisfying both hypotheses factorizes.
    pub fn consistent(&self) -> bool {
        (0..self.factorizes.len()).all(|n| !self.hypotheses_hold(n) || self.factorizes[n])
    }

    pub fn all_hypotheses_hold(&self) -> bool {
        (0..self.factorizes.len()).all(|n| self.hypotheses_hold(n))
    }
}

/// Splits a trajectory `t'` of the wired system into the inner trajectory
/// `t` and the chart cells `t12`, checks both are valid, tests the two
/// hypotheses under which `t' = t / t12`, and compares.
pub fn factorization_check(tprime: &GTrajectory, sys: &GSystem, wiring: &Wiring) -> Result<FactorizationReport> {
    let composed = compose_system_with_lens(sys, wiring)?;
    tprime.validate(&composed)?;
    let mu = inner_laws(tprime, sys, wiring)?;
    let t = tprime.horizon();
    let mut inner_s = Vec::with_capacity(t);
    let mut t12 = Vec::with_capacity(t);
    for (n, m) in mu.iter().enumerate() {
        let blocks = [
            sys.state.at(n),
            wiring.outer_input.at(n + 1),
            wiring.inner_input.at(n + 1),
            wiring.inner_output.at(n),
            wiring.outer_output.at(n),
        ];
        inner_s.push(marginal(m, &atoms_in(&blocks, &[0, 2]))?);
        t12.push(marginal(m, &atoms_in(&blocks, &[3, 1]))?);
    }
    let inner = GTrajectory::from_edges(sys, inner_s)?;
    inner.validate(sys)?;
    let cells = (0..t)
        .map(|n| chart_cell(&inner.square(sys, n)?.bottom, &wiring.lens(n), &t12[n]))
        .collect::<Result<Vec<_>>>()?;
    let lifted = lift_trajectory(&inner, sys, wiring, &cells)?;
    let factorizes = (0..t).map(|n| lifted.s[n] == tprime.s[n]).collect();
    let generated = (0..t).map(|n| generated_from_start(tprime, &composed, n)).collect::<Result<Vec<_>>>()?;
    let independent = (0..t)
        .map(|n| {
            let (st, i2, o1) = (sys.state.at(n), wiring.outer_input.at(n + 1), wiring.inner_output.at(n));
            let s0 = sys.state.at(0);
            let to_start = sys.state.restrict_between(0, n);
            let expose = &sys.expose[n];
            let view = Morphism::from_block_fn(&[st, i2], &[i2, o1, s0], |v| {
                vec![v[1], expose.apply(v[0]), to_start.apply(v[0])]
            })?;
            let law = tprime.s[n].then(&view)?;
            let b = [i2, o1, s0];
            displays_cond_indep(&law, &atoms_in(&b, &[0]), &atoms_in(&b, &[1]), &atoms_in(&b, &[2]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FactorizationReport { inner, cells, generated, independent, factorizes })
}

/// `q_0 = t'^n ; res ⊗ I2(n+1)` and `q_(k+1) = q_k ; S(k) ⊗ (copy ; res ⊗ I2(n+1)) ; update'^k ⊗ I2(n+1)`;
/// the hypothesis is `q_n = t'^n`.
fn generated_from_start(tprime: &GTrajectory, composed: &GSystem, n: usize) -> Result<bool> {
    let i2 = composed.input.at(n + 1);
    let mut q_k = tprime.s[n].then(&Morphism::Det(composed.state.restrict_between(0, n)).tensor_id(i2)?)?;
    for k in 0..n {
        let sk = composed.state.at(k);
        let res = Morphism::Det(composed.input.restrict_between(k + 1, n + 1));
        q_k = Morphism::chain([
            &q_k,
            &Morphism::structural(&[sk, i2], &[0, 1, 1]),
            &res.tensor_id(i2)?.id_tensor(sk)?,
            &composed.update[k].tensor_id(i2)?,
        ])?;
    }
    Ok(q_k == tprime.s[n])
}

/// A lifted composite whose edge laws are not time-coherent.
#[derive(Clone, Debug)]
pub struct CoherenceCounterexample {
    pub description: String,
    pub system: GSystem,
    pub wiring: Wiring,
    pub inner: GTrajectory,
    pub cells: Vec<XYSquare>,
    pub lifted: GTrajectory,
    pub coherence: Vec<bool>,
}

/// How many instances [`search_coherence_counterexample`] looked at.
#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub patterns: usize,
    pub valid_instances: usize,
    pub coherent: usize,
}

/// Searches the family where the state `S` and outer input `I2` are the
/// constant two-element object, the inner interface objects `O1(n)` and
/// `I1(n+1)` are each either the unit or a copy of it (some but not all of
/// them units), the system exposes its state when `O1(n)` is nontrivial,
/// and the wiring feeds `I2` through when `I1(n+1)` is nontrivial. Each
/// instance is built from one joint law `ρ` of `(s, i2)`: the inner
/// trajectory and the cells are the marginals of the wires it induces, and
/// the lift `t / t12` is tested for time coherence.
pub fn search_coherence_counterexample() -> Result<(Option<CoherenceCounterexample>, SearchStats)> {
    let graph = ChainGraph::new(2)?;
    let bit = FiniteObject::range(2);
    let unit = FiniteObject::unit();
    let mut stats = SearchStats::default();
    let joints = small_joints(&bit);
    // bit k of `mask` decides O1(0), O1(1), I1(1), I1(2).
    for mask in 1u32..15 {
        stats.patterns += 1;
        let pick = |k: u32| if mask >> k & 1 == 1 { bit.clone() } else { unit.clone() };
        let o1_objs = vec![pick(0), pick(1), pick(1)];
        let i1_objs = vec![unit.clone(), pick(2), pick(3)];
        let Some((sys, wiring)) = family_instance(graph, &bit, &o1_objs, &i1_objs) else { continue };
        for (label, rho) in &joints {
            let Ok((inner, cells)) = family_laws(&sys, &wiring, rho) else { continue };
            let Ok(lifted) = lift_trajectory(&inner, &sys, &wiring, &cells) else { continue };
            stats.valid_instances += 1;
            let composed = compose_system_with_lens(&sys, &wiring)?;
            let coherence = check_time_coherence(&lifted, &composed)?;
            if coherence.iter().all(|&b| b) {
                stats.coherent += 1;
                continue;
            }
            let shape = |objs: &[FiniteObject]| {
                objs.iter().map(|o| if o.is_unit() { "*" } else { "2" }).collect::<Vec<_>>().join(",")
            };
            let description = format!(
                "O1 = [{}], I1 = [{}], joint law of (s, i2) = {label}",
                shape(&o1_objs),
                shape(&i1_objs)
            );
            return Ok((
                Some(CoherenceCounterexample { description, system: sys, wiring, inner, cells, lifted, coherence }),
                stats,
            ));
        }
    }
    Ok((None, stats))
}

/// Joint laws on two bits with weights in `{0, 1, 2}`, in a fixed order.
fn small_joints(bit: &FiniteObject) -> Vec<(String, Morphism)> {
    let pair = bit.tensor(bit);
    let mut out = Vec::new();
    for code in 1..81u32 {
        let w: Vec<i64> = (0..4).map(|k| (code / 3u32.pow(k) % 3) as i64).collect();
        let total: i64 = w.iter().sum();
        let weights = w.iter().map(|&x| q(x, total)).collect();
        let label = format!("[{}]", w.iter().map(|x| format!("{x}/{total}")).collect::<Vec<_>>().join(", "));
        out.push((label, distribution(&pair, weights).expect("normalized")));
    }
    out
}

/// The restriction between two objects of the family: identity between
/// equal objects, discard onto the unit, the constant `0` out of the unit.
fn family_restriction(from: &FiniteObject, to: &FiniteObject) -> DetKernel {
    if from == to {
        DetKernel::identity(from)
    } else {
        DetKernel::new(from.clone(), to.clone(), vec![0; from.size()]).expect("constant map")
    }
}

fn family_indexed(objs: &[FiniteObject]) -> Option<IndexedObject> {
    let rs = objs.windows(2).map(|w| family_restriction(&w[1], &w[0])).collect();
    IndexedObject::new(objs.to_vec(), rs).ok()
}

fn family_instance(
    graph: ChainGraph,
    bit: &FiniteObject,
    o1_objs: &[FiniteObject],
    i1_objs: &[FiniteObject],
) -> Option<(GSystem, Wiring)> {
    let state = IndexedObject::constant(bit, graph);
    let i2 = IndexedObject::constant(bit, graph);
    let o1 = family_indexed(o1_objs)?;
    let i1 = family_indexed(i1_objs)?;
    let expose = o1_objs.iter().map(|o| family_restriction(bit, o)).collect();
    let update = (0..2)
        .map(|n| Morphism::structural(&[bit, i1.at(n + 1)], &[0]))
        .collect();
    let sys = GSystem::new(state, i1.clone(), o1.clone(), expose, update).ok()?;
    let wexpose = o1_objs.iter().map(DetKernel::identity).collect();
    let wupdate = (0..2)
        .map(|n| {
            let target = i1.at(n + 1);
            let src = [o1.at(n), bit];
            if target.is_unit() {
                DetKernel::structural(&src, &[])
            } else {
                DetKernel::structural(&src, &[1])
            }
        })
        .collect();
    let wiring = Wiring::new(i1, o1.clone(), i2, o1, wexpose, wupdate).ok()?;
    Some((sys, wiring))
}

/// The inner trajectory and cells induced by a joint law of `(s, i2)` that
/// does not change over time.
fn family_laws(sys: &GSystem, wiring: &Wiring, rho: &Morphism) -> Result<(GTrajectory, Vec<XYSquare>)> {
    let t = sys.horizon();
    let constant = GTrajectory::from_edges(&compose_system_with_lens(sys, wiring)?, vec![rho.clone(); t])?;
    let mu = inner_laws(&constant, sys, wiring)?;
    let mut inner_s = Vec::with_capacity(t);
    let mut t12 = Vec::with_capacity(t);
    for (n, m) in mu.iter().enumerate() {
        let blocks = [
            sys.state.at(n),
            wiring.outer_input.at(n + 1),
            wiring.inner_input.at(n + 1),
            wiring.inner_output.at(n),
            wiring.outer_output.at(n),
        ];
        inner_s.push(marginal(m, &atoms_in(&blocks, &[0, 2]))?);
        t12.push(marginal(m, &atoms_in(&blocks, &[3, 1]))?);
    }
    let inner = GTrajectory::from_edges(sys, inner_s)?;
    inner.validate(sys)?;
    let cells = (0..t)
        .map(|n| chart_cell(&inner.square(sys, n)?.bottom, &wiring.lens(n), &t12[n]))
        .collect::<Result<Vec<_>>>()?;
    Ok((inner, cells))
}
