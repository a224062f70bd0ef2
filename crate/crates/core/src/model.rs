//! The JSON model file: named objects, kernels, one-step systems and
//! one-step wirings, plus an optional run (system, initial law, input
//! policy, horizon). Rationals are `"p/q"` strings and keys are written in
//! sorted order, so saving a canonically formatted file reproduces it byte
//! for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arena::{DetLens, Interface};
use crate::error::{Error, Result};
use crate::kernel::{DetKernel, Kernel};
use crate::morphism::Morphism;
use crate::object::{Atom, FiniteObject};
use crate::rational::{format_q, parse_q, to_f64};
use crate::time::{unroll_trajectory, InputPolicy, StepSystem};

pub const VERSION: u32 = 1;

/// Kernel data without its boundary, which the context supplies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelData {
    /// Dense rows of `"p/q"` probabilities.
    Stoch { rows: Vec<Vec<String>> },
    /// Dense rows of possibility flags.
    Poss { rows: Vec<Vec<bool>> },
    /// The image of every domain element.
    Det { map: Vec<usize> },
}

/// A kernel declared once under a name, with its boundary spelled out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedKernel {
    pub dom: Vec<String>,
    pub cod: Vec<String>,
    #[serde(flatten)]
    pub data: KernelData,
}

/// Either the name of a declared kernel or inline data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelRef {
    Named(String),
    Inline(KernelData),
}

/// `expose : state → output` and `update : state ⊗ input → state`, with
/// objects given as lists of object names (the empty list is the unit).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub state: Vec<String>,
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub expose: KernelRef,
    pub update: KernelRef,
    /// Initial law `* → state`, used when this system is run on its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<KernelRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceSpec {
    pub input: Vec<String>,
    pub output: Vec<String>,
}

/// A one-step deterministic lens: `forward : inner output → outer output`
/// and `backward : inner output ⊗ outer input → inner input`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiringSpec {
    pub inner: InterfaceSpec,
    pub outer: InterfaceSpec,
    pub forward: KernelRef,
    pub backward: KernelRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    /// Each object is a list of atoms, each atom a list of labels.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub objects: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub kernels: BTreeMap<String, NamedKernel>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub systems: BTreeMap<String, SystemSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub wirings: BTreeMap<String, WiringSpec>,
    /// The system that `unroll` runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    /// Overrides the initial law of the run system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<KernelRef>,
    /// `"closed"` or a kernel `output → input` of the run system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<KernelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

/// One failed check: where it failed and why.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub entity: String,
    pub error: Error,
}

impl Issue {
    /// Unresolvable input is a parse problem; everything else is a failed
    /// validation.
    pub fn is_parse(&self) -> bool {
        matches!(self.error, Error::Parse(_))
    }
}

/// A joint law printed as a table of nonzero cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// `phi`, `s` or `p`.
    pub name: &'static str,
    pub n: usize,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub path: Vec<String>,
    /// `"p/q"`, or `"true"` for a possibilistic law.
    pub value: String,
    pub decimal: Option<f64>,
}

impl Table {
    pub fn title(&self) -> String {
        format!("{}^{}", self.name, self.n)
    }

    /// The row whose path is `labels`, if it carries mass.
    pub fn row(&self, labels: &[&str]) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.path.iter().map(String::as_str).eq(labels.iter().copied()))
    }
}

impl ModelFile {
    pub fn empty() -> Self {
        ModelFile {
            version: VERSION,
            objects: BTreeMap::new(),
            kernels: BTreeMap::new(),
            systems: BTreeMap::new(),
            wirings: BTreeMap::new(),
            system: None,
            initial: None,
            policy: None,
            horizon: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if m.version != VERSION {
            return Err(Error::Parse(format!("unsupported model version {}", m.version)));
        }
        Ok(m)
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let value = serde_json::to_value(self).expect("model data serializes");
        canonical_json(&value)
    }

    /// The tensor of the named objects.
    pub fn object(&self, names: &[String]) -> Result<FiniteObject> {
        let mut atoms = Vec::new();
        for name in names {
            let spec = self.objects.get(name).ok_or_else(|| Error::Parse(format!("unknown object {name:?}")))?;
            for labels in spec {
                atoms.push(Atom::new(labels.iter().cloned())?);
            }
        }
        Ok(FiniteObject::from_atoms(atoms))
    }

    /// Resolves a kernel against the boundary its context requires.
    pub fn kernel(&self, r: &KernelRef, dom: &FiniteObject, cod: &FiniteObject) -> Result<Morphism> {
        let data = match r {
            KernelRef::Inline(data) => data,
            KernelRef::Named(name) => {
                let k = self.kernels.get(name).ok_or_else(|| Error::Parse(format!("unknown kernel {name:?}")))?;
                let (kd, kc) = (self.object(&k.dom)?, self.object(&k.cod)?);
                if kd != *dom || kc != *cod {
                    return Err(Error::mismatch(format!("kernel {name}"), format!("{dom} -> {cod}"), format!("{kd} -> {kc}")));
                }
                &k.data
            }
        };
        build_kernel(data, dom, cod)
    }

    fn system_spec(&self, name: &str) -> Result<&SystemSpec> {
        self.systems.get(name).ok_or_else(|| Error::Parse(format!("unknown system {name:?}")))
    }

    pub fn step_system(&self, name: &str) -> Result<StepSystem> {
        let spec = self.system_spec(name)?;
        let (s, i, o) = (self.object(&spec.state)?, self.object(&spec.input)?, self.object(&spec.output)?);
        let entity = |part: &str| format!("systems.{name}.{part}");
        let expose = self
            .kernel(&spec.expose, &s, &o)
            .map_err(|e| at(&entity("expose"), e))?
            .as_det()
            .ok_or_else(|| Error::validation(entity("expose"), "is deterministic", "expose must be a function"))?;
        let update = self.kernel(&spec.update, &s.tensor(&i), &s).map_err(|e| at(&entity("update"), e))?;
        StepSystem::new(expose, update)
    }

    pub fn lens(&self, name: &str) -> Result<DetLens> {
        let spec = self.wirings.get(name).ok_or_else(|| Error::Parse(format!("unknown wiring {name:?}")))?;
        let inner = Interface::new(self.object(&spec.inner.input)?, self.object(&spec.inner.output)?);
        let outer = Interface::new(self.object(&spec.outer.input)?, self.object(&spec.outer.output)?);
        let f = self.kernel(&spec.forward, &inner.c, &outer.c)?;
        let fsharp = self.kernel(&spec.backward, &inner.c.tensor(&outer.a), &inner.a)?;
        DetLens::from_morphisms(inner, outer, &f, &fsharp)
    }

    /// The initial law of a system: the top-level one for the run system,
    /// otherwise the system's own.
    pub fn initial_law(&self, name: &str) -> Result<Morphism> {
        let spec = self.system_spec(name)?;
        let r = match (&self.initial, self.system.as_deref() == Some(name)) {
            (Some(r), true) => r,
            _ => spec
                .initial
                .as_ref()
                .ok_or_else(|| Error::PreconditionViolation(format!("system {name} has no initial law")))?,
        };
        self.kernel(r, &FiniteObject::unit(), &self.object(&spec.state)?)
    }

    /// The one-step policy of the run, `None` when it is closed.
    pub fn policy_step(&self, step: &StepSystem) -> Result<Option<Morphism>> {
        match &self.policy {
            None => Ok(None),
            Some(KernelRef::Named(n)) if n == "closed" => Ok(None),
            Some(r) => Ok(Some(self.kernel(r, &step.output, &step.input)?)),
        }
    }

    pub fn run_system(&self) -> Result<&str> {
        self.system.as_deref().ok_or_else(|| Error::PreconditionViolation("the model names no system to run".into()))
    }

    /// Runs every validator and collects the failures, one per entity.
    pub fn check(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        let mut note = |entity: String, r: Result<()>| {
            if let Err(error) = r {
                issues.push(Issue { error: at(&entity, error), entity });
            }
        };
        for name in self.objects.keys() {
            note(format!("objects.{name}"), self.object(std::slice::from_ref(name)).map(drop));
        }
        for (name, k) in &self.kernels {
            note(
                format!("kernels.{name}"),
                (|| {
                    let (d, c) = (self.object(&k.dom)?, self.object(&k.cod)?);
                    build_kernel(&k.data, &d, &c).map(drop)
                })(),
            );
        }
        for name in self.systems.keys() {
            let spec = &self.systems[name];
            let entity = format!("systems.{name}");
            note(entity.clone(), self.step_system(name).map(drop));
            if spec.initial.is_some() {
                note(format!("{entity}.initial"), self.initial_law(name).map(drop));
            }
        }
        for name in self.wirings.keys() {
            note(format!("wirings.{name}"), self.lens(name).map(drop));
        }
        let run_system_ok = self.system.as_ref().is_some_and(|n| !self.systems.contains_key(n) || self.step_system(n).is_ok());
        if let Some(name) = self.system.as_ref().filter(|_| run_system_ok) {
            note(
                "run".into(),
                (|| {
                    let step = self.step_system(name)?;
                    self.initial_law(name)?;
                    if self.policy_step(&step)?.is_none() && !step.input.is_unit() {
                        return Err(Error::PreconditionViolation(format!("a closed run needs unit input, but {name} reads {}", step.input)));
                    }
                    Ok(())
                })(),
            );
        }
        issues
    }

    /// Stores a one-step system under `name`, writing its kernels inline.
    pub fn put_system(&mut self, name: &str, state: Vec<String>, input: Vec<String>, output: Vec<String>, step: &StepSystem) {
        let spec = SystemSpec {
            state,
            input,
            output,
            expose: KernelRef::Inline(kernel_data(&Morphism::Det(step.expose.clone()))),
            update: KernelRef::Inline(kernel_data(&step.update)),
            initial: None,
        };
        self.systems.insert(name.to_string(), spec);
    }

    pub fn system_objects(&self, name: &str) -> Result<(Vec<String>, Vec<String>, Vec<String>)> {
        let s = self.system_spec(name)?;
        Ok((s.state.clone(), s.input.clone(), s.output.clone()))
    }

    pub fn wiring_outer(&self, name: &str) -> Result<InterfaceSpec> {
        let w = self.wirings.get(name).ok_or_else(|| Error::Parse(format!("unknown wiring {name:?}")))?;
        Ok(w.outer.clone())
    }

    /// Unrolls the run system. Horizon `0` gives only `phi^0`; otherwise
    /// `phi^n` for every node and `s^n`, `p^n` for every edge.
    pub fn unroll_tables(&self, horizon: Option<usize>) -> Result<Vec<Table>> {
        let name = self.run_system()?;
        let step = self.step_system(name)?;
        let init = self.initial_law(name)?;
        let horizon = horizon.or(self.horizon).unwrap_or(1);
        let cols = Columns::new(&step);
        if horizon == 0 {
            return Ok(vec![table("phi", 0, &init, cols.phi(0))]);
        }
        let sys = step.unroll(horizon)?;
        let policy = match self.policy_step(&step)? {
            None => InputPolicy::Closed,
            Some(k) => InputPolicy::from_step(&sys, &k)?,
        };
        let traj = unroll_trajectory(&sys, &init, &policy)?;
        let mut out: Vec<Table> = traj.phi.iter().enumerate().map(|(n, m)| table("phi", n, m, cols.phi(n))).collect();
        out.extend(traj.s.iter().enumerate().map(|(n, m)| table("s", n, m, cols.edge("s", n))));
        out.extend(traj.p.iter().enumerate().map(|(n, m)| table("p", n, m, cols.edge("o", n))));
        Ok(out)
    }
}

/// Names the entity in kernel-level failures.
fn at(entity: &str, e: Error) -> Error {
    match e {
        Error::InvalidKernel(detail) => Error::validation(entity, "rows form a kernel", detail),
        other => other,
    }
}

fn build_kernel(data: &KernelData, dom: &FiniteObject, cod: &FiniteObject) -> Result<Morphism> {
    Ok(match data {
        KernelData::Stoch { rows } => {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|x| parse_q(x)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Morphism::Stoch(Kernel::from_dense(dom.clone(), cod.clone(), rows)?)
        }
        KernelData::Poss { rows } => Morphism::Poss(Kernel::from_dense(dom.clone(), cod.clone(), rows.clone())?),
        KernelData::Det { map } => Morphism::Det(DetKernel::new(dom.clone(), cod.clone(), map.clone())?),
    })
}

/// The file form of a morphism, keeping its instance.
pub fn kernel_data(m: &Morphism) -> KernelData {
    match m {
        Morphism::Det(d) => KernelData::Det { map: d.map().to_vec() },
        Morphism::Stoch(k) => KernelData::Stoch {
            rows: (0..k.dom().size()).map(|i| k.dense_row(i).iter().map(format_q).collect()).collect(),
        },
        Morphism::Poss(k) => KernelData::Poss { rows: (0..k.dom().size()).map(|i| k.dense_row(i)).collect() },
    }
}

/// Sorted keys, two-space indent, trailing newline.
pub fn canonical_json(value: &Value) -> String {
    // serde_json maps are ordered by key unless `preserve_order` is enabled.
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

/// Column names for the tables of one system: `s0.1` is atom 1 of the
/// state at step 0, and the index is dropped for single-atom objects.
struct Columns {
    s: usize,
    i: usize,
    o: usize,
}

impl Columns {
    fn new(step: &StepSystem) -> Self {
        Columns { s: step.state.n_atoms(), i: step.input.n_atoms(), o: step.output.n_atoms() }
    }

    fn block(prefix: &str, atoms: usize, steps: std::ops::RangeInclusive<usize>) -> Vec<String> {
        steps
            .flat_map(|t| (0..atoms).map(move |j| if atoms == 1 { format!("{prefix}{t}") } else { format!("{prefix}{t}.{j}") }))
            .collect()
    }

    fn phi(&self, n: usize) -> Vec<String> {
        Self::block("s", self.s, 0..=n)
    }

    fn edge(&self, lead: &str, n: usize) -> Vec<String> {
        let lead_atoms = if lead == "s" { self.s } else { self.o };
        let mut c = Self::block(lead, lead_atoms, 0..=n);
        c.extend(Self::block("i", self.i, 1..=n + 1));
        c
    }
}

fn table(name: &'static str, n: usize, law: &Morphism, columns: Vec<String>) -> Table {
    let cod = law.cod();
    let rows = (0..cod.size())
        .filter_map(|j| {
            let path: Vec<String> =
                cod.decode(j).iter().zip(cod.atoms()).map(|(&c, a)| a.labels()[c].clone()).collect();
            match law {
                Morphism::Poss(k) => k.get(0, j).then(|| TableRow { path, value: "true".into(), decimal: None }),
                _ => law
                    .prob(0, j)
                    .filter(|w| *w != crate::rational::zero())
                    .map(|w| TableRow { path, value: format_q(&w), decimal: Some(to_f64(&w)) }),
            }
        })
        .collect();
    Table { name, n, columns, rows }
}

/// The tables as one JSON document.
pub fn tables_json(system: &str, horizon: usize, tables: &[Table]) -> Value {
    let tables: Vec<Value> = tables
        .iter()
        .map(|t| {
            let rows: Vec<Value> =
                t.rows.iter().map(|r| json!({ "path": r.path, "value": r.value, "decimal": r.decimal })).collect();
            json!({ "table": t.name, "n": t.n, "columns": t.columns, "rows": rows })
        })
        .collect();
    json!({ "system": system, "horizon": horizon, "tables": tables })
}
