//! Seeded law suites. Every case draws from its own generator, seeded from
//! the suite seed and the case index, so a run is reproducible bit for bit
//! whatever order the cases execute in.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::arena::{DetLens, Interface};
use crate::arenasys::{nabla, SysXYSquare};
use crate::error::{Error, Result};
use crate::gen::Gen;
use crate::kernel::{DetKernel, Kernel};
use crate::knight::uniformize_morphism;
use crate::markov::{
    almost_surely_equal, conditional, conditional_product_with, displays_cond_indep, distribution, marginal,
    reconstruct, FillRule,
};
use crate::mealy::GMealy;
use crate::morphism::{atoms_in, check_equal, Instance, Morphism};
use crate::object::FiniteObject;
use crate::rational::{q, Q};
use crate::time::{
    check_time_coherence, compose_system_with_lens, factorization_check, search_coherence_counterexample,
    unroll_trajectory, ChainGraph, IndexedObject, InputPolicy, StepSystem, Wiring,
};

/// The outcome of one suite run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    /// FNV-1a over the per-case witnesses, in case order.
    pub digest: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type CaseFn = fn(&mut Gen, usize) -> Result<String>;

struct Suite {
    name: &'static str,
    about: &'static str,
    cases: usize,
    run: CaseFn,
}

const SUITES: &[Suite] = &[
    Suite { name: "conditional-reconstruction", about: "conditionals rebuild their joint (300 stochastic, 100 possibilistic)", cases: 400, run: conditional_reconstruction },
    Suite { name: "conditional-product", about: "marginals, independence and fill-rule invariance of conditional products", cases: 300, run: conditional_product_case },
    Suite { name: "semigraphoid", about: "symmetry, decomposition, weak union and contraction", cases: 200, run: semigraphoid },
    Suite { name: "as-trivial-products", about: "almost surely trivial maps leave conditional products unchanged", cases: 200, run: as_trivial_products },
    Suite { name: "as-copy-function", about: "copy-then-function composites agree with the identity almost surely", cases: 200, run: as_copy_function },
    Suite { name: "lens-associativity", about: "all deterministic lenses on bits, one left factor per case", cases: 64, run: lens_associativity },
    Suite { name: "chart-associativity", about: "copy-composition of charts", cases: 100, run: chart_associativity },
    Suite { name: "arena-interchange", about: "xy-interchange on 2x2 grids of squares", cases: 50, run: arena_interchange },
    Suite { name: "arenasys-interchange", about: "xy-interchange on mixed system grids", cases: 50, run: arenasys_interchange },
    Suite { name: "y-associativity", about: "vertical composition of squares", cases: 50, run: y_associativity },
    Suite { name: "trajectory-oracle", about: "unrolled joints against path enumeration, plus the absorbing chain", cases: 21, run: trajectory_oracle },
    Suite { name: "time-coherence", about: "unrolled trajectories are coherent; one lifted composite is not", cases: 21, run: time_coherence },
    Suite { name: "factorization", about: "composites satisfying both hypotheses factorize", cases: 20, run: factorization },
    Suite { name: "nabla-recovery", about: "projections of a joint behavior recover both squares", cases: 20, run: nabla_recovery },
    Suite { name: "uniformization", about: "interval lengths reproduce kernels; functions round-trip", cases: 100, run: uniformization },
    Suite { name: "mealy", about: "associativity and interchange, exhaustive on stateless bit machines at T = 2", cases: 18, run: mealy },
];

/// Suite names with one-line descriptions.
pub fn suites() -> Vec<(&'static str, &'static str)> {
    SUITES.iter().map(|s| (s.name, s.about)).collect()
}

fn case_seed(seed: u64, case: usize) -> u64 {
    // splitmix64 of the pair.
    let mut z = seed ^ (case as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(acc: u64, bytes: &[u8]) -> u64 {
    bytes.iter().fold(acc, |h, b| (h ^ u64::from(*b)).wrapping_mul(0x0100_0000_01b3))
}

fn find(name: &str) -> Result<&'static Suite> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::PreconditionViolation(format!("unknown suite {name}")))
}

/// The number of cases a suite runs by default.
pub fn default_cases(name: &str) -> Result<usize> {
    Ok(find(name)?.cases)
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    run_suite_cases(name, seed, default_cases(name)?)
}

/// Runs `cases` cases of a suite. Case `k` draws from the seed of `k` and
/// plays the role of default case `k mod default`, so exhaustive suites
/// wrap around their enumeration.
pub fn run_suite_cases(name: &str, seed: u64, cases: usize) -> Result<SuiteReport> {
    let suite = find(name)?;
    let outcomes: Vec<Result<String>> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut g = Gen::new(case_seed(seed, case));
            (suite.run)(&mut g, case % suite.cases)
        })
        .collect();
    let mut digest = 0xcbf2_9ce4_8422_2325;
    let mut failures = 0;
    let mut first_failure = None;
    for (case, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Ok(w) => digest = fnv1a(digest, w.as_bytes()),
            Err(e) => {
                failures += 1;
                digest = fnv1a(digest, b"!");
                first_failure.get_or_insert_with(|| format!("case {case}: {e}"));
            }
        }
    }
    Ok(SuiteReport { name: suite.name, seed, cases, failures, first_failure, digest })
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s.name, seed)).collect()
}

fn holds(ok: bool, entity: &str, law: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::validation(entity, law, "does not hold"))
    }
}

/// A short fingerprint of a morphism: its shape and first row.
fn witness(m: &Morphism) -> String {
    let mut s = format!("{}->{}:", m.dom(), m.cod());
    for j in 0..m.cod().size().min(16) {
        if let Some(w) = m.prob(0, j) {
            let _ = write!(s, "{w},");
        }
    }
    s
}

fn inst_for(case: usize, stoch_cases: usize) -> Instance {
    if case < stoch_cases {
        Instance::Stoch
    } else {
        Instance::Poss
    }
}

fn alternate(case: usize) -> Instance {
    if case % 2 == 0 {
        Instance::Stoch
    } else {
        Instance::Poss
    }
}

fn conditional_reconstruction(g: &mut Gen, case: usize) -> Result<String> {
    let inst = inst_for(case, 300);
    let (a, x, y) = (g.object(4), g.object(4), g.object(4));
    let phi = g.kernel(&a, &x.tensor(&y), inst);
    let x_atoms: Vec<usize> = (0..x.n_atoms()).collect();
    let cond = conditional(&phi, &x_atoms, FillRule::Uniform)?;
    check_equal("conditional", "reconstruction", &reconstruct(&phi, &x_atoms, &cond)?, &phi)?;
    Ok(witness(&phi))
}

/// `A → Y⊗Z` whose `Y`-marginal is `fy`.
fn with_marginal(g: &mut Gen, fy: &Morphism, z: &FiniteObject, inst: Instance) -> Result<Morphism> {
    let (a, y) = (fy.dom(), fy.cod());
    let k = g.kernel(&y.tensor(a), z, inst);
    Morphism::chain([
        &Morphism::copy(a),
        &fy.tensor_id(a)?,
        &Morphism::structural(&[y, a], &[0, 0, 1]),
        &k.id_tensor(y)?,
    ])
}

fn conditional_product_case(g: &mut Gen, case: usize) -> Result<String> {
    let inst = alternate(case);
    let (a, x, y, z) = (g.object(3), g.object(3), g.atom(3), g.object(3));
    let f = g.kernel(&a, &x.tensor(&y), inst);
    let fy = marginal(&f, &atoms_in(&[&x, &y], &[1]))?;
    let h = with_marginal(g, &fy, &z, inst)?;
    let p = conditional_product_with(&f, &h, y.n_atoms(), FillRule::Uniform)?;
    let other = conditional_product_with(&f, &h, y.n_atoms(), FillRule::First)?;
    check_equal("conditional product", "independent of the zero-mass fill", &p, &other)?;
    let blocks = [&x, &y, &z];
    check_equal("conditional product", "X⊗Y marginal", &marginal(&p, &atoms_in(&blocks, &[0, 1]))?, &f)?;
    check_equal("conditional product", "Y⊗Z marginal", &marginal(&p, &atoms_in(&blocks, &[1, 2]))?, &h)?;
    let ci = displays_cond_indep(&p, &atoms_in(&blocks, &[0]), &atoms_in(&blocks, &[1]), &atoms_in(&blocks, &[2]))?;
    holds(ci, "conditional product", "displays X ⊥ Z | Y")?;
    Ok(witness(&p))
}

fn semigraphoid(g: &mut Gen, case: usize) -> Result<String> {
    let inst = alternate(case / 3);
    let (x, y, z, w) = (g.atom(3), g.atom(3), g.atom(3), g.atom(3));
    let u = FiniteObject::unit();
    let p = match case % 3 {
        // X ⊥ ZW | Y by construction.
        0 => {
            let m = g.kernel(&u, &y, inst);
            let k1 = g.kernel(&y, &x, inst);
            let k2 = g.kernel(&y, &z.tensor(&w), inst);
            Morphism::chain([&m, &Morphism::structural(&[&y], &[0, 0, 0]), &k1.tensor(&Morphism::identity(&y))?.tensor(&k2)?])?
        }
        // X ⊥ Z | Y and X ⊥ W | YZ by construction.
        1 => {
            let m = g.kernel(&u, &y.tensor(&z), inst);
            let k1 = g.kernel(&y, &x, inst);
            let k2 = g.kernel(&y.tensor(&z), &w, inst);
            Morphism::chain([
                &m,
                &Morphism::structural(&[&y, &z], &[0, 0, 1, 0, 1]),
                &k1.tensor(&Morphism::identity(&y.tensor(&z)))?.tensor(&k2)?,
            ])?
        }
        _ => g.kernel(&u, &FiniteObject::tensor_all([&x, &y, &z, &w]), inst),
    };
    let ci = |a: &[usize], b: &[usize], c: &[usize]| displays_cond_indep(&p, a, b, c);
    let (xa, ya, za, wa) = ([0], [1], [2], [3]);
    if ci(&xa, &ya, &za)? {
        holds(ci(&za, &ya, &xa)?, "semigraphoid", "symmetry")?;
    }
    if ci(&xa, &ya, &[2, 3])? {
        holds(ci(&xa, &ya, &za)? && ci(&xa, &ya, &wa)?, "semigraphoid", "decomposition")?;
        holds(ci(&xa, &[1, 3], &za)?, "semigraphoid", "weak union")?;
    }
    if ci(&xa, &ya, &za)? && ci(&xa, &[1, 2], &wa)? {
        holds(ci(&xa, &ya, &[2, 3])?, "semigraphoid", "contraction")?;
    }
    if case % 3 < 2 {
        // The constructed hypotheses must actually hold.
        let built = if case % 3 == 0 { ci(&xa, &ya, &[2, 3])? } else { ci(&xa, &ya, &za)? && ci(&xa, &[1, 2], &wa)? };
        holds(built, "semigraphoid", "constructed hypothesis")?;
    }
    Ok(witness(&p))
}

/// A random endomorphism of `x` that is the identity on `support`.
fn identity_on(g: &mut Gen, x: &FiniteObject, support: &[usize], inst: Instance) -> Morphism {
    let n = x.size();
    g.kernel_on(x, x, inst, |j| if support.contains(&j) { vec![j] } else { (0..n).collect() })
}

fn union_support(m: &Morphism) -> Vec<usize> {
    let mut s: Vec<usize> = (0..m.dom().size()).flat_map(|i| m.support(i)).collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn as_trivial_products(g: &mut Gen, case: usize) -> Result<String> {
    let inst = alternate(case);
    let (d, a, b, c) = (g.object(2), g.atom(3), g.atom(3), g.atom(3));
    let phi = g.kernel(&d, &a.tensor(&b), inst);
    let phi_b = marginal(&phi, &atoms_in(&[&a, &b], &[1]))?;
    let psi = with_marginal(g, &phi_b, &c, inst)?;
    let p = conditional_product_with(&phi, &psi, b.n_atoms(), FillRule::Uniform)?;
    let ab = a.tensor(&b);
    let f = identity_on(g, &ab, &union_support(&phi), inst);
    holds(almost_surely_equal(&phi, &f, &Morphism::identity(&ab))?, "almost-sure product", "f = id almost surely")?;
    check_equal("almost-sure product", "(φ ⊗_B ψ ; f ⊗ C) = φ ⊗_B ψ", &p.then(&f.tensor_id(&c)?)?, &p)?;
    let bc = b.tensor(&c);
    let h = identity_on(g, &bc, &union_support(&psi), inst);
    holds(almost_surely_equal(&psi, &h, &Morphism::identity(&bc))?, "almost-sure product", "h = id almost surely")?;
    check_equal("almost-sure product", "(φ ⊗_B ψ ; A ⊗ h) = φ ⊗_B ψ", &p.then(&h.id_tensor(&a)?)?, &p)?;
    Ok(witness(&p))
}

fn as_copy_function(g: &mut Gen, case: usize) -> Result<String> {
    let inst = alternate(case);
    let (d, x, y, z) = (g.object(2), g.atom(3), g.atom(3), g.atom(3));
    let chi = g.kernel(&d, &x.tensor(&y), inst);
    let dk = Morphism::Det(g.det(&y, &z));
    let phi = Morphism::chain([&chi, &Morphism::structural(&[&x, &y], &[0, 1, 1]), &dk.id_tensor(&x.tensor(&y))?])?;
    let yz = y.tensor(&z);
    let f = Morphism::chain([
        &Morphism::structural(&[&y, &z], &[0, 0]),
        &dk.id_tensor(&y)?,
    ])?;
    let phi_yz = marginal(&phi, &atoms_in(&[&x, &y, &z], &[1, 2]))?;
    holds(almost_surely_equal(&phi_yz, &f, &Morphism::identity(&yz))?, "almost-sure copy", "f = id almost surely")?;
    Ok(witness(&phi))
}

fn bit_lenses() -> Vec<DetLens> {
    let bit = FiniteObject::range(2);
    let i = Interface::new(bit.clone(), bit.clone());
    let mut out = Vec::with_capacity(64);
    for f in 0..4usize {
        for b in 0..16usize {
            let fk = DetKernel::new(bit.clone(), bit.clone(), vec![f & 1, (f >> 1) & 1]).expect("bits");
            let bk = DetKernel::new(bit.tensor(&bit), bit.clone(), (0..4).map(|k| (b >> k) & 1).collect()).expect("bits");
            out.push(DetLens::new(i.clone(), i.clone(), fk, bk).expect("bit lens"));
        }
    }
    out
}

fn lens_associativity(_: &mut Gen, case: usize) -> Result<String> {
    let lenses = bit_lenses();
    let a = &lenses[case];
    for b in &lenses {
        let ab = a.compose(b)?;
        for c in &lenses {
            if ab.compose(c)? != a.compose(&b.compose(c)?)? {
                return Err(Error::validation("lens", "associativity", format!("left factor {case}")));
            }
        }
    }
    Ok(format!("{case}:{}", lenses.len()))
}

fn chart_associativity(g: &mut Gen, case: usize) -> Result<String> {
    let inst = alternate(case);
    let i: Vec<Interface> = (0..4).map(|_| g.interface(2)).collect();
    let mut charts = Vec::with_capacity(3);
    for k in 0..3 {
        let r = g.interface_small(2);
        charts.push(g.chart(&i[k], &i[k + 1], &r, inst));
    }
    let lhs = charts[0].compose(&charts[1])?.compose(&charts[2])?;
    let rhs = charts[0].compose(&charts[1].compose(&charts[2])?)?;
    holds(lhs == rhs, "chart", "copy-composition associativity")?;
    lhs.validate()?;
    Ok(witness(&lhs.gflat))
}

fn arena_interchange(g: &mut Gen, case: usize) -> Result<String> {
    let [[s, u], [t, v]] = g.grid(2, alternate(case))?;
    let lhs = s.compose_x(&u)?.compose_y(&t.compose_x(&v)?)?;
    let rhs = s.compose_y(&t)?.compose_x(&u.compose_y(&v)?)?;
    lhs.validate()?;
    holds(lhs == rhs, "xy-square grid", "interchange")?;
    Ok(witness(&lhs.s))
}

fn arenasys_interchange(g: &mut Gen, case: usize) -> Result<String> {
    let ([s, u], [t, v]) = g.sys_grid(2, alternate(case))?;
    let lhs = s.compose_x(&u)?.compose_y(&t.compose_x(&v)?)?;
    let rhs = s.compose_y(&t)?.compose_x(&u.compose_y(&v)?)?;
    lhs.validate()?;
    holds(lhs == rhs, "system square grid", "interchange")?;
    Ok(witness(&lhs.s))
}

fn y_associativity(g: &mut Gen, case: usize) -> Result<String> {
    let [s, t, w] = g.column(2, alternate(case))?;
    let lhs = s.compose_y(&t)?.compose_y(&w)?;
    let rhs = s.compose_y(&t.compose_y(&w)?)?;
    lhs.validate()?;
    holds(lhs == rhs, "xy-square column", "y-associativity")?;
    Ok(witness(&lhs.s))
}

/// The law of every state path of length `n + 1`, summed directly over
/// start states, inputs and successors.
pub fn enumerate_paths(step: &StepSystem, init: &Morphism, policy: &Morphism, n: usize) -> BTreeMap<Vec<usize>, Q> {
    let (ns, ni) = (step.state.size(), step.input.size());
    let zero = q(0, 1);
    let mut out: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
    let mut stack: Vec<(Vec<usize>, Q)> = (0..ns)
        .filter_map(|s0| init.prob(0, s0).filter(|w| *w != zero).map(|w| (vec![s0], w)))
        .collect();
    while let Some((path, w)) = stack.pop() {
        if path.len() == n + 1 {
            *out.entry(path).or_insert_with(|| q(0, 1)) += w;
            continue;
        }
        let last = *path.last().expect("nonempty");
        let o = step.expose.apply(last);
        for i in 0..ni {
            let wi = policy.prob(o, i).expect("stochastic policy");
            for next in 0..ns {
                let total = w.clone() * &wi * step.update.prob(last * ni + i, next).expect("stochastic update");
                if total != zero {
                    let mut p = path.clone();
                    p.push(next);
                    stack.push((p, total));
                }
            }
        }
    }
    out
}

/// Nonzero cells of a distribution keyed by decoded tuple.
pub fn joint_table(p: &Morphism) -> BTreeMap<Vec<usize>, Q> {
    let cod = p.cod();
    (0..cod.size())
        .filter_map(|j| p.prob(0, j).filter(|w| *w != q(0, 1)).map(|w| (cod.decode(j), w)))
        .collect()
}

/// The chain on `{0, 1}` that stays or moves to the absorbing state `1`
/// with equal odds, started at `0`.
pub fn absorbing_chain() -> Result<(StepSystem, Morphism)> {
    let s = FiniteObject::range(2);
    let update = Morphism::Stoch(Kernel::from_dense(s.clone(), s.clone(), vec![vec![q(1, 2), q(1, 2)], vec![q(0, 1), q(1, 1)]])?);
    let step = StepSystem::new(DetKernel::identity(&s), update)?;
    Ok((step, distribution(&s, vec![q(1, 1), q(0, 1)])?))
}

fn trajectory_oracle(g: &mut Gen, case: usize) -> Result<String> {
    let (step, init, pol, horizon) = if case == 20 {
        let (step, init) = absorbing_chain()?;
        let pol = Morphism::discard(&step.output);
        (step, init, pol, 2)
    } else {
        let step = g.step_system(3, Instance::Stoch, case % 4 == 0);
        let init = g.distribution(&step.state);
        let pol = g.stoch(&step.output, &step.input);
        (step, init, pol, 1 + case % 4)
    };
    let sys = step.unroll(horizon)?;
    let policy = if step.input.is_unit() { InputPolicy::Closed } else { InputPolicy::from_step(&sys, &pol)? };
    let traj = unroll_trajectory(&sys, &init, &policy)?;
    for n in 0..=horizon {
        holds(joint_table(&traj.phi[n]) == enumerate_paths(&step, &init, &pol, n), "unrolled joint", &format!("phi^{n} matches path enumeration"))?;
    }
    if case == 20 {
        let expected: BTreeMap<Vec<usize>, Q> =
            [(vec![0, 0, 0], q(1, 4)), (vec![0, 0, 1], q(1, 4)), (vec![0, 1, 1], q(1, 2))].into_iter().collect();
        holds(joint_table(&traj.phi[2]) == expected, "absorbing chain", "phi^2")?;
    }
    Ok(witness(&traj.phi[horizon]))
}

fn time_coherence(g: &mut Gen, case: usize) -> Result<String> {
    if case == 20 {
        let (found, stats) = search_coherence_counterexample()?;
        let c = found.ok_or_else(|| Error::validation("coherence search", "finds a counterexample", "none found"))?;
        holds(c.coherence.iter().any(|b| !b), "coherence counterexample", "fails naturality")?;
        return Ok(format!("{}:{}:{}", stats.patterns, stats.valid_instances, stats.coherent));
    }
    let inst = alternate(case);
    let step = g.step_system(3, inst, false);
    let sys = step.unroll(1 + case % 3)?;
    let init = g.kernel(&FiniteObject::unit(), &step.state, inst);
    let pol = g.kernel(&step.output, &step.input, inst);
    let traj = unroll_trajectory(&sys, &init, &InputPolicy::from_step(&sys, &pol)?)?;
    holds(check_time_coherence(&traj, &sys)?.iter().all(|&b| b), "unrolled trajectory", "time coherence")?;
    Ok(witness(traj.phi.last().expect("nonempty")))
}

fn factorization(g: &mut Gen, case: usize) -> Result<String> {
    for _ in 0..200 {
        let step = g.step_system(2, Instance::Stoch, false);
        let lens = if case % 2 == 0 {
            let back = g.det(&step.output, &step.input);
            DetLens::new(step.interface(), Interface::new(FiniteObject::unit(), step.output.clone()), DetKernel::identity(&step.output), back)?
        } else {
            g.step_lens(&step.interface(), 2)
        };
        let sys = step.unroll(2)?;
        let wiring = Wiring::from_step(&lens, 2)?;
        let composed = compose_system_with_lens(&sys, &wiring)?;
        let init = g.distribution(&step.state);
        let policy = if lens.dst.a.is_unit() {
            InputPolicy::Closed
        } else {
            let law = g.distribution(&lens.dst.a);
            InputPolicy::from_step(&composed, &Morphism::discard(&lens.dst.c).then(&law)?)?
        };
        let tprime = unroll_trajectory(&composed, &init, &policy)?;
        let report = factorization_check(&tprime, &sys, &wiring)?;
        if report.all_hypotheses_hold() {
            holds(report.factorizes.iter().all(|&b| b), "composite trajectory", "t' = t / t12")?;
            return Ok(witness(&tprime.phi[2]));
        }
    }
    Err(Error::validation("factorization suite", "draws a composite satisfying both hypotheses", "200 draws failed"))
}

fn nabla_recovery(g: &mut Gen, case: usize) -> Result<String> {
    let (s1, s2, g012) = g.nabla_inputs(2, alternate(case))?;
    let joint = nabla(&s1, &s2, &g012)?;
    joint.validate()?;
    let (p1, p2) = SysXYSquare::projections(&s1.right, &s2.right)?;
    holds(joint.compose_x(&p1)?.forget_residual()? == s1, "∇", "first projection")?;
    holds(joint.compose_x(&p2)?.forget_residual()? == s2, "∇", "second projection")?;
    Ok(witness(&joint.s))
}

fn uniformization(g: &mut Gen, _: usize) -> Result<String> {
    let (dom, cod) = (g.object(3), g.object(4));
    let f = g.stoch(&dom, &cod);
    let p = uniformize_morphism(&f)?;
    check_equal("uniformization", "interval lengths", &Morphism::Stoch(p.to_kernel()?), &f)?;
    let d = g.det(&dom, &cod);
    holds(uniformize_morphism(&Morphism::Det(d.clone()))?.as_function() == Some(d), "uniformization", "functions round-trip")?;
    Ok(witness(&f))
}

/// Every stateless deterministic machine `bit → bit` at horizon 2.
fn stateless_bit_machines() -> Result<Vec<GMealy>> {
    let bit = FiniteObject::range(2);
    let a = IndexedObject::constant(&bit, ChainGraph::new(2)?);
    let fns: Vec<Morphism> = (0..4)
        .map(|c| DetKernel::new(bit.clone(), bit.clone(), vec![c & 1, c >> 1]).map(Morphism::Det))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(16);
    for f0 in &fns {
        for f1 in &fns {
            out.push(GMealy::stateless(&a, &a, vec![f0.clone(), f1.clone()])?);
        }
    }
    Ok(out)
}

fn middle_swap(m: &GMealy, states: [&IndexedObject; 4]) -> Result<GMealy> {
    let [s1, s2, s3, s4] = states;
    let target = s1.tensor(s3)?.tensor(s2)?.tensor(s4)?;
    let iso: Vec<DetKernel> = (0..=s1.horizon())
        .map(|n| DetKernel::structural(&[s1.at(n), s2.at(n), s3.at(n), s4.at(n)], &[0, 2, 1, 3]))
        .collect();
    m.relabel_state(&target, &iso)
}

fn mealy(g: &mut Gen, case: usize) -> Result<String> {
    if case < 16 {
        // Exhaustive: the case fixes the first machine.
        let all = stateless_bit_machines()?;
        let f = &all[case];
        for h in &all {
            let fh = f.compose(h)?;
            for k in &all {
                holds(fh.compose(k)? == f.compose(&h.compose(k)?)?, "Mealy machines", "associativity")?;
            }
        }
        for h in &all {
            let fh = f.tensor(h)?;
            for k in &all {
                for l in &all {
                    let lhs = f.compose(k)?.tensor(&h.compose(l)?)?;
                    let rhs = fh.compose(&k.tensor(l)?)?;
                    holds(lhs == rhs, "Mealy machines", "interchange")?;
                }
            }
        }
        return Ok(format!("stateless:{case}"));
    }
    // Stateful machines on bits with a growing bit history.
    let bit = FiniteObject::range(2);
    let a = IndexedObject::constant(&bit, ChainGraph::new(2)?);
    let inst = alternate(case);
    let [f, h, k, l] = std::array::from_fn(|_| g.mealy(&a, &a, &bit, inst));
    holds(f.compose(&h)?.compose(&k)? == f.compose(&h.compose(&k)?)?, "Mealy machines", "associativity")?;
    let lhs = f.compose(&k)?.tensor(&h.compose(&l)?)?;
    let rhs = f.tensor(&h)?.compose(&k.tensor(&l)?)?;
    holds(middle_swap(&lhs, [&f.state, &k.state, &h.state, &l.state])? == rhs, "Mealy machines", "interchange")?;
    Ok(witness(&rhs.maps[1]))
}
