use crate::arena::{DetLens, Interface};
use crate::arenasys::{SysYMor, SystemObject};
use crate::error::{Error, Result};
use crate::kernel::DetKernel;
use crate::morphism::{check_equal, select_atoms, Morphism};
use crate::object::FiniteObject;
use crate::time::index::{check_natural, ChainGraph, IndexedObject};

/// A Moore machine indexed by a chain graph: `expose^n : S(n) → O(n)` at
/// each node and `update^n : S(n)⊗I(n+1) → S(n+1)` along each edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSystem {
    pub state: IndexedObject,
    pub input: IndexedObject,
    pub output: IndexedObject,
    pub expose: Vec<DetKernel>,
    pub update: Vec<Morphism>,
}

impl GSystem {
    pub fn new(
        state: IndexedObject,
        input: IndexedObject,
        output: IndexedObject,
        expose: Vec<DetKernel>,
        update: Vec<Morphism>,
    ) -> Result<Self> {
        let sys = GSystem { state, input, output, expose, update };
        sys.validate()?;
        Ok(sys)
    }

    pub fn graph(&self) -> ChainGraph {
        self.state.graph()
    }

    pub fn horizon(&self) -> usize {
        self.state.horizon()
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.horizon();
        if self.input.horizon() != t || self.output.horizon() != t {
            return Err(Error::ShapeMismatch("state, input and output must share a horizon".into()));
        }
        if self.expose.len() != t + 1 || self.update.len() != t {
            return Err(Error::ShapeMismatch(format!(
                "horizon {t} needs {} expose maps and {t} update maps, found {} and {}",
                t + 1,
                self.expose.len(),
                self.update.len()
            )));
        }
        for (n, e) in self.expose.iter().enumerate() {
            if e.dom() != self.state.at(n) || e.cod() != self.output.at(n) {
                return Err(Error::mismatch(
                    format!("expose^{n}"),
                    format!("{} -> {}", self.state.at(n), self.output.at(n)),
                    format!("{} -> {}", e.dom(), e.cod()),
                ));
            }
        }
        check_natural("expose", &self.state, &self.output, &self.expose)?;
        for n in 0..t {
            self.lens(n).validate().map_err(|e| match e {
                Error::Validation { law, detail, .. } => Error::validation(format!("update^{n}"), law, detail),
                other => other,
            })?;
        }
        Ok(())
    }

    /// The system lens of edge `n`: `(S(n+1) → S(n)) ⇆ (I(n+1) // O(n))`.
    pub fn lens(&self, n: usize) -> SysYMor {
        SysYMor::new_unchecked(
            SystemObject::new(self.state.restriction(n).clone()),
            self.interface(n),
            self.expose[n].clone(),
            self.update[n].clone(),
        )
    }

    /// `(I(n+1) // O(n))`.
    pub fn interface(&self, n: usize) -> Interface {
        Interface::new(self.input.at(n + 1).clone(), self.output.at(n).clone())
    }

    pub fn is_closed(&self) -> bool {
        self.input.is_unit()
    }
}

/// The open Markov process of a one-step pair `expose : S → O`,
/// `update : S⊗I → S`: `S(n) = S^(n+1)`, `O(n) = O^(n+1)`, `I(n) = I^n`,
/// `expose^n` is the power of `expose` and `update^n` appends one step.
pub fn open_markov(
    s: &FiniteObject,
    i: &FiniteObject,
    o: &FiniteObject,
    expose: &DetKernel,
    update: &Morphism,
    horizon: usize,
) -> Result<GSystem> {
    if expose.dom() != s || expose.cod() != o {
        return Err(Error::mismatch("one-step expose", format!("{s} -> {o}"), format!("{} -> {}", expose.dom(), expose.cod())));
    }
    let si = s.tensor(i);
    if *update.dom() != si || update.cod() != s {
        return Err(Error::mismatch("one-step update", format!("{si} -> {s}"), format!("{} -> {}", update.dom(), update.cod())));
    }
    let graph = ChainGraph::new(horizon)?;
    let state = IndexedObject::history(s, graph, 1);
    let input = IndexedObject::history(i, graph, 0);
    let output = IndexedObject::history(o, graph, 1);
    let expose_n = graph
        .nodes()
        .map(|n| (0..=n).fold(DetKernel::identity(&FiniteObject::unit()), |acc, _| acc.tensor(expose)))
        .collect();
    let update_n = graph
        .edges()
        .map(|n| {
            // S^(n+1) I^(n+1) → S^(n+1) ⊗ (s_n, i_n) → S^(n+1) ⊗ update
            let mut blocks: Vec<&FiniteObject> = vec![s; n + 1];
            blocks.extend(std::iter::repeat(i).take(n + 1));
            let mut out: Vec<usize> = (0..=n).collect();
            out.extend([n, 2 * n + 1]);
            Morphism::structural(&blocks, &out).then(&update.id_tensor(state.at(n))?)
        })
        .collect::<Result<Vec<_>>>()?;
    GSystem::new(state, input, output, expose_n, update_n)
}

/// The clock: unit objects everywhere and identity maps.
pub fn clock_system(horizon: usize) -> Result<GSystem> {
    let graph = ChainGraph::new(horizon)?;
    let u = FiniteObject::unit();
    Ok(GSystem {
        state: IndexedObject::unit(graph),
        input: IndexedObject::unit(graph),
        output: IndexedObject::unit(graph),
        expose: vec![DetKernel::identity(&u); horizon + 1],
        update: vec![Morphism::identity(&u); horizon],
    })
}

/// A family of deterministic lenses `(I1(n+1) // O1(n)) ⇆ (I2(n+1) // O2(n))`,
/// with output maps at every node and update maps along edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wiring {
    pub inner_input: IndexedObject,
    pub inner_output: IndexedObject,
    pub outer_input: IndexedObject,
    pub outer_output: IndexedObject,
    pub expose: Vec<DetKernel>,
    pub update: Vec<DetKernel>,
}

impl Wiring {
    pub fn new(
        inner_input: IndexedObject,
        inner_output: IndexedObject,
        outer_input: IndexedObject,
        outer_output: IndexedObject,
        expose: Vec<DetKernel>,
        update: Vec<DetKernel>,
    ) -> Result<Self> {
        let w = Wiring { inner_input, inner_output, outer_input, outer_output, expose, update };
        w.validate()?;
        Ok(w)
    }

    pub fn horizon(&self) -> usize {
        self.inner_output.horizon()
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.horizon();
        if self.expose.len() != t + 1 || self.update.len() != t {
            return Err(Error::ShapeMismatch(format!(
                "horizon {t} needs {} output maps and {t} update maps",
                t + 1
            )));
        }
        for n in 0..t {
            DetLens::new(self.inner(n), self.outer(n), self.expose[n].clone(), self.update[n].clone())?;
        }
        check_natural("wiring output", &self.inner_output, &self.outer_output, &self.expose)?;
        for n in 1..t {
            // (r_O1 ⊗ r_I2) ; f♯^(n-1) = f♯^n ; r_I1
            let r = self.inner_output.restriction(n - 1).tensor(self.outer_input.restriction(n));
            let lhs = r.compose(&self.update[n - 1])?;
            let rhs = self.update[n].compose(self.inner_input.restriction(n))?;
            check_equal("wiring update", &format!("naturality at {} -> {}", n, n - 1), &lhs.into(), &rhs.into())
                .map_err(|e| Error::NaturalityViolation(e.to_string()))?;
        }
        Ok(())
    }

    pub fn inner(&self, n: usize) -> Interface {
        Interface::new(self.inner_input.at(n + 1).clone(), self.inner_output.at(n).clone())
    }

    pub fn outer(&self, n: usize) -> Interface {
        Interface::new(self.outer_input.at(n + 1).clone(), self.outer_output.at(n).clone())
    }

    pub fn lens(&self, n: usize) -> DetLens {
        DetLens::new(self.inner(n), self.outer(n), self.expose[n].clone(), self.update[n].clone())
            .expect("validated on construction")
    }

    /// Identity wiring on the interface of `sys`.
    pub fn identity(sys: &GSystem) -> Wiring {
        let t = sys.horizon();
        Wiring {
            inner_input: sys.input.clone(),
            inner_output: sys.output.clone(),
            outer_input: sys.input.clone(),
            outer_output: sys.output.clone(),
            expose: (0..=t).map(|n| DetKernel::identity(sys.output.at(n))).collect(),
            update: (0..t)
                .map(|n| DetKernel::structural(&[sys.output.at(n), sys.input.at(n + 1)], &[1]))
                .collect(),
        }
    }

    /// The history lift of a one-step lens `(I1 // O1) ⇆ (I2 // O2)`,
    /// applied entry by entry, for open Markov interfaces.
    pub fn from_step(lens: &DetLens, horizon: usize) -> Result<Wiring> {
        let graph = ChainGraph::new(horizon)?;
        let (i1, o1, i2, o2) = (&lens.src.a, &lens.src.c, &lens.dst.a, &lens.dst.c);
        let expose = graph
            .nodes()
            .map(|n| (0..=n).fold(DetKernel::identity(&FiniteObject::unit()), |acc, _| acc.tensor(&lens.f)))
            .collect();
        let update = graph
            .edges()
            .map(|n| {
                // O1^(n+1) I2^(n+1) → (o_0, i_0, ..., o_n, i_n) → f♯^(n+1)
                let mut blocks: Vec<&FiniteObject> = vec![o1; n + 1];
                blocks.extend(std::iter::repeat(i2).take(n + 1));
                let out: Vec<usize> = (0..=n).flat_map(|k| [k, n + 1 + k]).collect();
                let back = (0..=n).fold(DetKernel::identity(&FiniteObject::unit()), |acc, _| acc.tensor(&lens.fsharp));
                DetKernel::structural(&blocks, &out).compose(&back)
            })
            .collect::<Result<Vec<_>>>()?;
        Wiring::new(
            IndexedObject::history(i1, graph, 0),
            IndexedObject::history(o1, graph, 1),
            IndexedObject::history(i2, graph, 0),
            IndexedObject::history(o2, graph, 1),
            expose,
            update,
        )
    }

    /// `self ; next`, lens by lens.
    pub fn compose(&self, next: &Wiring) -> Result<Wiring> {
        if self.outer_input != next.inner_input || self.outer_output != next.inner_output {
            return Err(Error::BoundaryMismatch("wirings do not meet".into()));
        }
        let t = self.horizon();
        let lenses = (0..t).map(|n| self.lens(n).compose(&next.lens(n))).collect::<Result<Vec<_>>>()?;
        let mut expose: Vec<DetKernel> = lenses.iter().map(|l| l.f.clone()).collect();
        expose.push(self.expose[t].compose(&next.expose[t])?);
        Wiring::new(
            self.inner_input.clone(),
            self.inner_output.clone(),
            next.outer_input.clone(),
            next.outer_output.clone(),
            expose,
            lenses.into_iter().map(|l| l.fsharp).collect(),
        )
    }
}

/// The system seen through a wiring: each edge lens is followed by the
/// wiring lens of that edge.
pub fn compose_system_with_lens(sys: &GSystem, wiring: &Wiring) -> Result<GSystem> {
    wiring.validate()?;
    if wiring.inner_input != sys.input || wiring.inner_output != sys.output {
        return Err(Error::BoundaryMismatch("the wiring does not start at the interface of the system".into()));
    }
    let t = sys.horizon();
    let mut expose = Vec::with_capacity(t + 1);
    let mut update = Vec::with_capacity(t);
    for n in 0..t {
        let y = sys.lens(n).then_lens(&wiring.lens(n))?;
        expose.push(y.f);
        update.push(y.fsharp);
    }
    expose.push(sys.expose[t].compose(&wiring.expose[t])?);
    GSystem::new(sys.state.clone(), wiring.outer_input.clone(), wiring.outer_output.clone(), expose, update)
}

/// Where the inputs of an unrolled trajectory come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputPolicy {
    /// All inputs are the unit.
    Closed,
    /// `policy^n : O(n)⊗I(n) → I(n+1)`, extending the input history.
    PerEdge(Vec<Morphism>),
}

impl InputPolicy {
    /// The history lift of a one-step kernel `O → I`: the next input is
    /// drawn from the current output.
    pub fn from_step(sys: &GSystem, step: &Morphism) -> Result<InputPolicy> {
        let t = sys.horizon();
        let (o, i) = (step.dom(), step.cod());
        let maps = (0..t)
            .map(|n| {
                if *sys.output.at(n) != o.pow(n + 1) || *sys.input.at(n + 1) != i.pow(n + 1) {
                    return Err(Error::mismatch(
                        "one-step policy",
                        format!("{} ⊗ {} -> {}", sys.output.at(n), sys.input.at(n), sys.input.at(n + 1)),
                        format!("{o} -> {i}"),
                    ));
                }
                // O^(n+1) I^n → I^n ⊗ o_n → I^n ⊗ step
                let mut blocks: Vec<&FiniteObject> = vec![o; n + 1];
                blocks.extend(std::iter::repeat(i).take(n));
                let mut out: Vec<usize> = (n + 1..2 * n + 1).collect();
                out.push(n);
                Morphism::structural(&blocks, &out).then(&step.id_tensor(sys.input.at(n))?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InputPolicy::PerEdge(maps))
    }

    /// The map used on edge `n`.
    pub fn at(&self, sys: &GSystem, n: usize) -> Result<Morphism> {
        match self {
            InputPolicy::Closed => {
                if !sys.input.at(n + 1).is_unit() {
                    return Err(Error::ShapeMismatch(format!(
                        "a closed policy needs unit inputs, but I({}) = {}",
                        n + 1,
                        sys.input.at(n + 1)
                    )));
                }
                Ok(Morphism::discard(&sys.output.at(n).tensor(sys.input.at(n))))
            }
            InputPolicy::PerEdge(maps) => {
                let m = maps
                    .get(n)
                    .ok_or_else(|| Error::ShapeMismatch(format!("no policy for edge {n}")))?;
                let dom = sys.output.at(n).tensor(sys.input.at(n));
                if *m.dom() != dom || m.cod() != sys.input.at(n + 1) {
                    return Err(Error::mismatch(
                        format!("policy^{n}"),
                        format!("{dom} -> {}", sys.input.at(n + 1)),
                        format!("{} -> {}", m.dom(), m.cod()),
                    ));
                }
                // The new history must extend the old one.
                let keep: Vec<usize> = (sys.output.at(n).n_atoms()..dom.n_atoms()).collect();
                check_equal(
                    &format!("policy^{n}"),
                    "extends the input history",
                    &m.then(&sys.input.restriction_m(n))?,
                    &select_atoms(&dom, &keep)?,
                )?;
                Ok(m.clone())
            }
        }
    }
}

/// Two systems side by side: objects are tensored node by node and the
/// update reads `S1 S2 I1 I2` as `S1 I1 S2 I2`.
pub fn tensor_systems(a: &GSystem, b: &GSystem) -> Result<GSystem> {
    let t = a.horizon();
    if b.horizon() != t {
        return Err(Error::ShapeMismatch(format!("horizons {t} and {} differ", b.horizon())));
    }
    let expose = a.expose.iter().zip(&b.expose).map(|(x, y)| x.tensor(y)).collect();
    let update = (0..t)
        .map(|n| {
            let (s1, s2, i1, i2) = (a.state.at(n), b.state.at(n), a.input.at(n + 1), b.input.at(n + 1));
            Morphism::structural(&[s1, s2, i1, i2], &[0, 2, 1, 3]).then(&a.update[n].tensor(&b.update[n])?)
        })
        .collect::<Result<Vec<_>>>()?;
    GSystem::new(
        a.state.tensor(&b.state)?,
        a.input.tensor(&b.input)?,
        a.output.tensor(&b.output)?,
        expose,
        update,
    )
}

/// One-step data of an open Markov process: `expose : S → O` and
/// `update : S⊗I → S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSystem {
    pub state: FiniteObject,
    pub input: FiniteObject,
    pub output: FiniteObject,
    pub expose: DetKernel,
    pub update: Morphism,
}

impl StepSystem {
    pub fn new(expose: DetKernel, update: Morphism) -> Result<Self> {
        let (state, output) = (expose.dom().clone(), expose.cod().clone());
        let n = state.n_atoms();
        if update.cod() != &state || update.dom().n_atoms() < n || update.dom().slice(0..n) != state {
            return Err(Error::mismatch(
                "one-step update",
                format!("{state} ⊗ I -> {state}"),
                format!("{} -> {}", update.dom(), update.cod()),
            ));
        }
        let input = update.dom().slice(n..update.dom().n_atoms());
        Ok(StepSystem { state, input, output, expose, update })
    }

    pub fn interface(&self) -> Interface {
        Interface::new(self.input.clone(), self.output.clone())
    }

    /// The indexed system over `0 → ... → horizon`.
    pub fn unroll(&self, horizon: usize) -> Result<GSystem> {
        open_markov(&self.state, &self.input, &self.output, &self.expose, &self.update, horizon)
    }

    /// The one-step system seen through a one-step lens.
    pub fn wire(&self, lens: &DetLens) -> Result<StepSystem> {
        if lens.src != self.interface() {
            return Err(Error::mismatch("one-step wiring", self.interface(), &lens.src));
        }
        let (s, a2) = (&self.state, &lens.dst.a);
        let update = Morphism::chain([
            &Morphism::structural(&[s, a2], &[0, 0, 1]),
            &Morphism::Det(self.expose.clone()).tensor_id(a2)?.id_tensor(s)?,
            &lens.fsharp_m().id_tensor(s)?,
            &self.update,
        ])?;
        StepSystem::new(self.expose.compose(&lens.f)?, update)
    }

    pub fn tensor(&self, other: &StepSystem) -> Result<StepSystem> {
        let (s1, s2, i1, i2) = (&self.state, &other.state, &self.input, &other.input);
        let update = Morphism::structural(&[s1, s2, i1, i2], &[0, 2, 1, 3]).then(&self.update.tensor(&other.update)?)?;
        StepSystem::new(self.expose.tensor(&other.expose), update)
    }
}
