//! Marginals, conditionals, conditional products and conditional
//! independence, uniformly over the finite instances.
//!
//! Factors of a codomain are addressed by atom position. A "split" such as
//! `x_atoms` lists the atoms that form `X`; the remaining atoms, in order,
//! form the other factor.

use crate::error::{Error, Result};
use crate::kernel::{DetKernel, Kernel, Row};
use crate::morphism::{select_atoms, Instance, InstanceWeight, Morphism};
use crate::object::{Blocks, FiniteObject};
use crate::rational::Q;

/// How to fill a conditional at points of zero mass (or empty fibers).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FillRule {
    /// Uniform distribution, or the full set for relations.
    #[default]
    Uniform,
    /// Point mass on the first element.
    First,
}

/// Runs a generic kernel routine in whichever nondeterministic instance `$inst`
/// names. The `Det` case must be handled by the caller beforehand.
macro_rules! dispatch {
    ($inst:expr, $f:ident ( $($arg:expr),* )) => {
        match $inst {
            Instance::Stoch => $f::<Q>($($arg),*),
            Instance::Poss => $f::<bool>($($arg),*),
            Instance::Det => $f::<Q>($($arg),*),
        }
    };
}

fn check_distinct(picks: &[usize], n_atoms: usize, what: &str) -> Result<()> {
    for (i, a) in picks.iter().enumerate() {
        if *a >= n_atoms {
            return Err(Error::BadFactorSelection(format!(
                "{what}: atom {a} out of range ({n_atoms} atoms)"
            )));
        }
        if picks[..i].contains(a) {
            return Err(Error::BadFactorSelection(format!("{what}: atom {a} selected twice")));
        }
    }
    Ok(())
}

/// Atoms of `0..n` not listed in `picks`, in order.
pub fn complement(picks: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !picks.contains(i)).collect()
}

/// `p` followed by the projection onto the listed codomain atoms.
pub fn marginal(p: &Morphism, keep: &[usize]) -> Result<Morphism> {
    check_distinct(keep, p.cod().n_atoms(), "marginal")?;
    p.then(&select_atoms(p.cod(), keep)?)
}

/// Conditional `φ|X : A⊗X → Y` of `φ : A → cod` where `X` is made of the
/// atoms `x_atoms` and `Y` of the remaining atoms.
pub fn conditional(phi: &Morphism, x_atoms: &[usize], fill: FillRule) -> Result<Morphism> {
    let n = phi.cod().n_atoms();
    check_distinct(x_atoms, n, "conditional")?;
    let y_atoms = complement(x_atoms, n);
    let x = phi.cod().select(x_atoms)?;
    let y = phi.cod().select(&y_atoms)?;
    let dom = phi.dom().tensor(&x);
    let proj_x = DetKernel::select_atoms(phi.cod(), x_atoms)?;
    let proj_y = DetKernel::select_atoms(phi.cod(), &y_atoms)?;
    if let Morphism::Det(d) = phi {
        // (a, x) ↦ y(a): the fiber over x(a) is the point y(a); elsewhere the
        // value is irrelevant, and y(a) is a valid choice.
        let nx = x.size();
        let map = (0..dom.size()).map(|i| proj_y.apply(d.apply(i / nx))).collect();
        return Ok(Morphism::Det(DetKernel::new(dom, y, map)?));
    }
    fn go<W: InstanceWeight>(
        phi: &Morphism,
        dom: FiniteObject,
        y: FiniteObject,
        px: &DetKernel,
        py: &DetKernel,
        fill: FillRule,
    ) -> Result<Morphism> {
        let k = phi.kernel::<W>()?;
        let nx = px.cod().size();
        let ny = y.size();
        let mut rows: Vec<Row<W>> = Vec::with_capacity(dom.size());
        let mut fibers: Vec<Row<W>> = vec![Vec::new(); nx];
        let mut mass: Vec<W> = vec![W::zero(); nx];
        for a in 0..k.dom().size() {
            for f in fibers.iter_mut() {
                f.clear();
            }
            for m in mass.iter_mut() {
                *m = W::zero();
            }
            for (j, w) in k.row(a) {
                let xi = px.apply(*j);
                fibers[xi].push((py.apply(*j), w.clone()));
                mass[xi].add_assign(w);
            }
            for xi in 0..nx {
                if mass[xi].is_zero() {
                    rows.push(match fill {
                        FillRule::Uniform => (0..ny).map(|j| (j, W::spread(ny))).collect(),
                        FillRule::First => vec![(0, W::one())],
                    });
                } else {
                    let mut row: Row<W> =
                        fibers[xi].iter().map(|(j, w)| (*j, w.div(&mass[xi]))).collect();
                    row.sort_by_key(|(j, _)| *j);
                    rows.push(row);
                }
            }
        }
        Ok(W::wrap(Kernel::from_sparse(dom, y, rows)?))
    }
    dispatch!(phi.instance(), go(phi, dom, y, &proj_x, &proj_y, fill))
}

/// The composite that rebuilds `φ` from its `X`-marginal and a conditional:
/// `copy_A ; A⊗φ_X ; A⊗copy_X ; φ|X ⊗ X`, with outputs put back in the
/// original atom order.
pub fn reconstruct(phi: &Morphism, x_atoms: &[usize], cond: &Morphism) -> Result<Morphism> {
    let a = phi.dom();
    let n = phi.cod().n_atoms();
    let y_atoms = complement(x_atoms, n);
    let x = phi.cod().select(x_atoms)?;
    let y = phi.cod().select(&y_atoms)?;
    let phi_x = marginal(phi, x_atoms)?;
    let step1 = Morphism::copy(a).then(&phi_x.id_tensor(a)?)?;
    let step2 = step1.then(&Morphism::structural(&[a, &x], &[0, 1, 1]))?;
    // A⊗X⊗X → Y⊗X, so the codomain atoms are y_atoms followed by x_atoms.
    let step3 = step2.then(&cond.tensor_id(&x)?)?;
    let mut order = vec![0; n];
    for (pos, atom) in y_atoms.iter().chain(x_atoms.iter()).enumerate() {
        order[*atom] = pos;
    }
    let yx = y.tensor(&x);
    step3.then(&select_atoms(&yx, &order)?.relabel(yx.clone(), phi.cod().clone())?)
}

/// Conditional product `f ⊗_Y g : A → X⊗Y⊗Z` of `f : A → X⊗Y` and
/// `g : A → Y⊗Z`, where `Y` is the last `y_len` atoms of `cod(f)` and the
/// first `y_len` atoms of `cod(g)`.
pub fn conditional_product(f: &Morphism, g: &Morphism, y_len: usize) -> Result<Morphism> {
    conditional_product_with(f, g, y_len, FillRule::Uniform)
}

pub fn conditional_product_with(
    f: &Morphism,
    g: &Morphism,
    y_len: usize,
    fill: FillRule,
) -> Result<Morphism> {
    if f.dom() != g.dom() {
        return Err(Error::mismatch("conditional product domain", f.dom(), g.dom()));
    }
    let nf = f.cod().n_atoms();
    let ng = g.cod().n_atoms();
    if y_len > nf || y_len > ng {
        return Err(Error::BadFactorSelection(format!(
            "shared factor of {y_len} atoms does not fit {} and {}",
            f.cod(),
            g.cod()
        )));
    }
    let a = f.dom();
    let x = f.cod().slice(0..nf - y_len);
    let y = f.cod().slice(nf - y_len..nf);
    let y_g = g.cod().slice(0..y_len);
    if y != y_g {
        return Err(Error::mismatch("conditional product shared factor", &y, &y_g));
    }
    let fy = marginal(f, &((nf - y_len)..nf).collect::<Vec<_>>())?;
    let gy = marginal(g, &(0..y_len).collect::<Vec<_>>())?;
    if let Some(diff) = fy.first_difference(&gy) {
        return Err(Error::MarginalMismatch(format!("marginals on {y} differ: {diff}")));
    }
    let g_y = conditional(g, &(0..y_len).collect::<Vec<_>>(), fill)?;
    // copy_A ; f⊗A ; X⊗copy_Y⊗A ; X⊗Y⊗(σ_{Y,A} ; g|Y)
    let s1 = Morphism::copy(a).then(&f.tensor_id(a)?)?;
    let s2 = s1.then(&Morphism::structural(&[&x, &y, a], &[0, 1, 1, 2]))?;
    let tail = Morphism::swap(&y, a).then(&g_y)?;
    s2.then(&tail.id_tensor(&x.tensor(&y))?)
}

/// Whether `p` displays conditional independence of the `x` and `z` atoms
/// over the `y` atoms, row by row. Atoms outside `x`, `y`, `z` are
/// marginalized away first.
pub fn displays_cond_indep(p: &Morphism, x: &[usize], y: &[usize], z: &[usize]) -> Result<bool> {
    let all: Vec<usize> = x.iter().chain(y).chain(z).copied().collect();
    check_distinct(&all, p.cod().n_atoms(), "conditional independence")?;
    let q = marginal(p, &all)?;
    let cod = q.cod().clone();
    let (nx, ny) = (x.len(), y.len());
    let xo = cod.slice(0..nx);
    let yo = cod.slice(nx..nx + ny);
    let zo = cod.slice(nx + ny..all.len());
    let b = Blocks::new(&[&xo, &yo, &zo]);
    fn go<W: InstanceWeight>(q: &Morphism, b: &Blocks) -> Result<bool> {
        let k = q.kernel::<W>()?;
        let (sx, sy, sz) = (b.block(0).size(), b.block(1).size(), b.block(2).size());
        for i in 0..k.dom().size() {
            let joint = k.dense_row(i);
            let mut pxy = vec![W::zero(); sx * sy];
            let mut pyz = vec![W::zero(); sy * sz];
            let mut py = vec![W::zero(); sy];
            for (j, w) in joint.iter().enumerate() {
                let parts = b.split(j);
                let (xi, yi, zi) = (parts[0], parts[1], parts[2]);
                pxy[xi * sy + yi].add_assign(w);
                pyz[yi * sz + zi].add_assign(w);
                py[yi].add_assign(w);
            }
            for (j, w) in joint.iter().enumerate() {
                let parts = b.split(j);
                let (xi, yi, zi) = (parts[0], parts[1], parts[2]);
                if w.mul(&py[yi]) != pxy[xi * sy + yi].mul(&pyz[yi * sz + zi]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
    match q.instance() {
        Instance::Det => Ok(true),
        inst => dispatch!(inst, go(&q, &b)),
    }
}

/// `f` and `g` agree `φ`-almost surely: `φ;copy;f⊗id == φ;copy;g⊗id`.
pub fn almost_surely_equal(phi: &Morphism, f: &Morphism, g: &Morphism) -> Result<bool> {
    if phi.cod() != f.dom() {
        return Err(Error::mismatch("almost sure equality", phi.cod(), f.dom()));
    }
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(Error::mismatch(
            "almost sure equality",
            format!("{} -> {}", f.dom(), f.cod()),
            format!("{} -> {}", g.dom(), g.cod()),
        ));
    }
    let x = phi.cod();
    let base = phi.then(&Morphism::copy(x))?;
    let lhs = base.then(&f.tensor_id(x)?)?;
    let rhs = base.then(&g.tensor_id(x)?)?;
    Ok(lhs == rhs)
}

/// Builds a stochastic distribution on `x` from `p/q` weights.
pub fn distribution(x: &FiniteObject, weights: Vec<Q>) -> Result<Morphism> {
    Ok(Morphism::Stoch(Kernel::from_dense(FiniteObject::unit(), x.clone(), vec![weights])?))
}

/// The uniform distribution (or full relation) `unit → x` in `inst`.
pub fn uniform(x: &FiniteObject, inst: Instance) -> Morphism {
    fn go<W: InstanceWeight>(x: &FiniteObject) -> Morphism {
        let n = x.size();
        let row = (0..n).map(|j| (j, W::spread(n))).collect();
        W::wrap(Kernel::from_rows_unchecked(FiniteObject::unit(), x.clone(), vec![row]))
    }
    match inst {
        Instance::Poss => go::<bool>(x),
        _ => go::<Q>(x),
    }
}
