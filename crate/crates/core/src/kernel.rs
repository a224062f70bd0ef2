//! Sparse kernels over a weight semiring, and total functions.
//!
//! `Kernel<Q>` is a stochastic matrix with exact rational entries and
//! `Kernel<bool>` is a nonempty-valued relation. Rows are stored sparsely as
//! sorted `(column, weight)` pairs with no zero weights, so structural equality
//! of the row vectors is equality of kernels.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::object::{Blocks, FiniteObject};
use crate::rational::{format_q, Q};

/// The semiring operations a kernel instance needs, plus the division used by
/// conditionals and the weight of a default-filled cell.
pub trait Weight: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    /// `self / den` for a nonzero `den`.
    fn div(&self, den: &Self) -> Self;
    /// Weight of each of `n` cells in the default (uniform or full) fill.
    fn spread(n: usize) -> Self;
    fn render(&self) -> String;
}

impl Weight for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, den: &Self) -> Self {
        self / den
    }
    fn spread(n: usize) -> Self {
        Q::new(1.into(), n.into())
    }
    fn render(&self) -> String {
        format_q(self)
    }
}

impl Weight for bool {
    fn zero() -> Self {
        false
    }
    fn one() -> Self {
        true
    }
    fn is_zero(&self) -> bool {
        !*self
    }
    fn add_assign(&mut self, other: &Self) {
        *self |= *other;
    }
    fn mul(&self, other: &Self) -> Self {
        *self && *other
    }
    fn div(&self, _den: &Self) -> Self {
        *self
    }
    fn spread(_n: usize) -> Self {
        true
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

pub type Row<W> = Vec<(usize, W)>;

#[derive(Clone, PartialEq, Eq)]
pub struct Kernel<W: Weight> {
    dom: FiniteObject,
    cod: FiniteObject,
    rows: Arc<Vec<Row<W>>>,
}

pub type StochKernel = Kernel<Q>;
pub type PossKernel = Kernel<bool>;

impl<W: Weight> fmt::Debug for Kernel<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Kernel {} -> {}", self.dom, self.cod)?;
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|(j, w)| format!("{}:{}", self.cod.label(*j), w.render()))
                .collect();
            writeln!(f, "  {} ↦ [{}]", self.dom.label(i), cells.join(", "))?;
        }
        Ok(())
    }
}

/// Sorts by column, merges duplicates and drops zeros.
fn normalize_row<W: Weight>(mut row: Row<W>) -> Row<W> {
    row.sort_by_key(|(j, _)| *j);
    let mut out: Row<W> = Vec::with_capacity(row.len());
    for (j, w) in row {
        match out.last_mut() {
            Some((k, acc)) if *k == j => acc.add_assign(&w),
            _ => out.push((j, w)),
        }
    }
    out.retain(|(_, w)| !w.is_zero());
    out
}

/// Dense accumulator reused across the rows of one operation.
struct Scratch<W: Weight> {
    acc: Vec<W>,
    touched: Vec<usize>,
    seen: Vec<bool>,
}

impl<W: Weight> Scratch<W> {
    fn new(n: usize) -> Self {
        Scratch { acc: vec![W::zero(); n], touched: Vec::new(), seen: vec![false; n] }
    }

    fn add(&mut self, j: usize, w: &W) {
        if !self.seen[j] {
            self.seen[j] = true;
            self.touched.push(j);
        }
        self.acc[j].add_assign(w);
    }

    fn drain(&mut self) -> Row<W> {
        self.touched.sort_unstable();
        let mut row = Vec::with_capacity(self.touched.len());
        for &j in &self.touched {
            let w = std::mem::replace(&mut self.acc[j], W::zero());
            self.seen[j] = false;
            if !w.is_zero() {
                row.push((j, w));
            }
        }
        self.touched.clear();
        row
    }
}

impl<W: Weight> Kernel<W> {
    /// Builds a kernel from sparse rows, normalizing them and checking the
    /// instance invariant (rows sum to one, or rows are nonempty).
    pub fn from_sparse(dom: FiniteObject, cod: FiniteObject, rows: Vec<Row<W>>) -> Result<Self> {
        if rows.len() != dom.size() {
            return Err(Error::InvalidKernel(format!(
                "{} rows for a domain of size {}",
                rows.len(),
                dom.size()
            )));
        }
        let n = cod.size();
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if let Some((j, _)) = row.iter().find(|(j, _)| *j >= n) {
                return Err(Error::InvalidKernel(format!(
                    "row {i}: column {j} out of range for {cod}"
                )));
            }
            out.push(normalize_row(row));
        }
        let k = Kernel { dom, cod, rows: Arc::new(out) };
        k.check_rows()?;
        Ok(k)
    }

    pub fn from_dense(dom: FiniteObject, cod: FiniteObject, rows: Vec<Vec<W>>) -> Result<Self> {
        let n = cod.size();
        let mut sparse = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidKernel(format!(
                    "row {i} has {} entries, codomain {cod} has {n}",
                    row.len()
                )));
            }
            sparse.push(row.into_iter().enumerate().collect());
        }
        Self::from_sparse(dom, cod, sparse)
    }

    pub(crate) fn from_rows_unchecked(dom: FiniteObject, cod: FiniteObject, rows: Vec<Row<W>>) -> Self {
        debug_assert_eq!(rows.len(), dom.size());
        Kernel { dom, cod, rows: Arc::new(rows) }
    }

    /// The point-mass kernel of a function.
    pub fn from_det(d: &DetKernel) -> Self {
        let rows = d.map().iter().map(|&j| vec![(j, W::one())]).collect();
        Self::from_rows_unchecked(d.dom().clone(), d.cod().clone(), rows)
    }

    pub fn dom(&self) -> &FiniteObject {
        &self.dom
    }

    pub fn cod(&self) -> &FiniteObject {
        &self.cod
    }

    pub fn rows(&self) -> &[Row<W>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[(usize, W)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> W {
        match self.rows[i].binary_search_by_key(&j, |(k, _)| *k) {
            Ok(p) => self.rows[i][p].1.clone(),
            Err(_) => W::zero(),
        }
    }

    pub fn dense_row(&self, i: usize) -> Vec<W> {
        let mut out = vec![W::zero(); self.cod.size()];
        for (j, w) in &self.rows[i] {
            out[*j] = w.clone();
        }
        out
    }

    fn check_rows(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            let mut total = W::zero();
            for (_, w) in row {
                total.add_assign(w);
            }
            if total != W::one() {
                return Err(Error::InvalidKernel(format!(
                    "row {} ({}) has total mass {} instead of {}",
                    i,
                    self.dom.label(i),
                    total.render(),
                    W::one().render()
                )));
            }
        }
        Ok(())
    }

    /// `Some` when every row is a single point.
    pub fn to_det(&self) -> Option<DetKernel> {
        let map = self
            .rows
            .iter()
            .map(|r| if r.len() == 1 { Some(r[0].0) } else { None })
            .collect::<Option<Vec<usize>>>()?;
        Some(DetKernel::from_map_unchecked(self.dom.clone(), self.cod.clone(), map))
    }

    pub fn compose(&self, g: &Kernel<W>) -> Result<Kernel<W>> {
        if self.cod != g.dom {
            return Err(Error::mismatch("compose", &self.cod, &g.dom));
        }
        let mut scratch = Scratch::new(g.cod.size());
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in self.rows.iter() {
            for (j, w) in row {
                for (k, v) in g.row(*j) {
                    scratch.add(*k, &w.mul(v));
                }
            }
            rows.push(scratch.drain());
        }
        Ok(Self::from_rows_unchecked(self.dom.clone(), g.cod.clone(), rows))
    }

    /// `self ; d` for a function `d`.
    pub fn then_det(&self, d: &DetKernel) -> Result<Kernel<W>> {
        if self.cod != *d.dom() {
            return Err(Error::mismatch("compose", &self.cod, d.dom()));
        }
        let mut scratch = Scratch::new(d.cod().size());
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in self.rows.iter() {
            for (j, w) in row {
                scratch.add(d.apply(*j), w);
            }
            rows.push(scratch.drain());
        }
        Ok(Self::from_rows_unchecked(self.dom.clone(), d.cod().clone(), rows))
    }

    /// `d ; self` for a function `d`.
    pub fn after_det(&self, d: &DetKernel) -> Result<Kernel<W>> {
        if *d.cod() != self.dom {
            return Err(Error::mismatch("compose", d.cod(), &self.dom));
        }
        let rows = d.map().iter().map(|&j| self.rows[j].clone()).collect();
        Ok(Self::from_rows_unchecked(d.dom().clone(), self.cod.clone(), rows))
    }

    pub fn tensor(&self, g: &Kernel<W>) -> Kernel<W> {
        let m = g.cod.size();
        let mut rows = Vec::with_capacity(self.rows.len() * g.rows.len());
        for r1 in self.rows.iter() {
            for r2 in g.rows.iter() {
                let mut row = Vec::with_capacity(r1.len() * r2.len());
                for (j1, w1) in r1 {
                    for (j2, w2) in r2 {
                        row.push((j1 * m + j2, w1.mul(w2)));
                    }
                }
                rows.push(row);
            }
        }
        Self::from_rows_unchecked(self.dom.tensor(&g.dom), self.cod.tensor(&g.cod), rows)
    }

    /// Reinterprets domain and codomain as other objects of the same sizes.
    pub fn relabel(&self, dom: FiniteObject, cod: FiniteObject) -> Result<Kernel<W>> {
        if dom.size() != self.dom.size() || cod.size() != self.cod.size() {
            return Err(Error::ShapeMismatch("relabel changes a size".into()));
        }
        Ok(Kernel { dom, cod, rows: self.rows.clone() })
    }
}

/// A total function between finite objects.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DetKernel {
    dom: FiniteObject,
    cod: FiniteObject,
    map: Arc<Vec<usize>>,
}

impl fmt::Debug for DetKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .map(|(i, j)| format!("{}↦{}", self.dom.label(i), self.cod.label(*j)))
            .collect();
        write!(f, "Det {} -> {} [{}]", self.dom, self.cod, cells.join(", "))
    }
}

impl DetKernel {
    pub fn new(dom: FiniteObject, cod: FiniteObject, map: Vec<usize>) -> Result<Self> {
        if map.len() != dom.size() {
            return Err(Error::InvalidKernel(format!(
                "function table has {} entries for a domain of size {}",
                map.len(),
                dom.size()
            )));
        }
        let n = cod.size();
        if let Some((i, j)) = map.iter().enumerate().find(|(_, j)| **j >= n) {
            return Err(Error::InvalidKernel(format!(
                "value {j} at {i} out of range for {cod}"
            )));
        }
        Ok(Self::from_map_unchecked(dom, cod, map))
    }

    pub(crate) fn from_map_unchecked(dom: FiniteObject, cod: FiniteObject, map: Vec<usize>) -> Self {
        DetKernel { dom, cod, map: Arc::new(map) }
    }

    pub fn from_fn(dom: FiniteObject, cod: FiniteObject, f: impl Fn(usize) -> usize) -> Result<Self> {
        let map = (0..dom.size()).map(f).collect();
        Self::new(dom, cod, map)
    }

    /// A function described blockwise: `f` receives the per-block indices of
    /// the domain and returns the per-block indices of the codomain.
    pub fn from_block_fn(
        dom: &[&FiniteObject],
        cod: &[&FiniteObject],
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        let d = Blocks::new(dom);
        let c = Blocks::new(cod);
        let mut map = Vec::with_capacity(d.whole().size());
        for i in 0..d.whole().size() {
            let out = f(&d.split(i));
            if out.len() != c.len() || out.iter().enumerate().any(|(b, v)| *v >= c.block(b).size()) {
                return Err(Error::InvalidKernel(format!(
                    "block function produced {out:?} outside {}",
                    c.whole()
                )));
            }
            map.push(c.join(&out));
        }
        Ok(Self::from_map_unchecked(d.whole().clone(), c.whole().clone(), map))
    }

    pub fn identity(x: &FiniteObject) -> Self {
        Self::from_map_unchecked(x.clone(), x.clone(), (0..x.size()).collect())
    }

    /// The structural map that sends a tuple of blocks to the listed blocks.
    /// Repeats copy, omissions discard, reorderings swap.
    pub fn structural(blocks: &[&FiniteObject], out: &[usize]) -> Self {
        let b = Blocks::new(blocks);
        let cod_objs: Vec<&FiniteObject> = out.iter().map(|&i| blocks[i]).collect();
        let c = Blocks::new(&cod_objs);
        let mut map = Vec::with_capacity(b.whole().size());
        let mut parts = vec![0; out.len()];
        for i in 0..b.whole().size() {
            let split = b.split(i);
            for (slot, &src) in parts.iter_mut().zip(out) {
                *slot = split[src];
            }
            map.push(c.join(&parts));
        }
        Self::from_map_unchecked(b.whole().clone(), c.whole().clone(), map)
    }

    /// Projection of an object onto a list of its atoms.
    pub fn select_atoms(x: &FiniteObject, picks: &[usize]) -> Result<Self> {
        let cod = x.select(picks)?;
        let atoms: Vec<FiniteObject> = (0..x.n_atoms()).map(|i| x.atom(i)).collect();
        let refs: Vec<&FiniteObject> = atoms.iter().collect();
        let s = Self::structural(&refs, picks);
        Ok(Self::from_map_unchecked(x.clone(), cod, s.map.to_vec()))
    }

    pub fn dom(&self) -> &FiniteObject {
        &self.dom
    }

    pub fn cod(&self) -> &FiniteObject {
        &self.cod
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn compose(&self, g: &DetKernel) -> Result<DetKernel> {
        if self.cod != g.dom {
            return Err(Error::mismatch("compose", &self.cod, &g.dom));
        }
        let map = self.map.iter().map(|&j| g.map[j]).collect();
        Ok(Self::from_map_unchecked(self.dom.clone(), g.cod.clone(), map))
    }

    pub fn tensor(&self, g: &DetKernel) -> DetKernel {
        let m = g.cod.size();
        let mut map = Vec::with_capacity(self.map.len() * g.map.len());
        for &a in self.map.iter() {
            for &b in g.map.iter() {
                map.push(a * m + b);
            }
        }
        Self::from_map_unchecked(self.dom.tensor(&g.dom), self.cod.tensor(&g.cod), map)
    }

    pub fn is_bijective(&self) -> bool {
        if self.dom.size() != self.cod.size() {
            return false;
        }
        let mut hit = vec![false; self.cod.size()];
        for &j in self.map.iter() {
            if hit[j] {
                return false;
            }
            hit[j] = true;
        }
        true
    }

    pub fn inverse(&self) -> Option<DetKernel> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Some(Self::from_map_unchecked(self.cod.clone(), self.dom.clone(), inv))
    }

    pub fn relabel(&self, dom: FiniteObject, cod: FiniteObject) -> Result<DetKernel> {
        if dom.size() != self.dom.size() || cod.size() != self.cod.size() {
            return Err(Error::ShapeMismatch("relabel changes a size".into()));
        }
        Ok(DetKernel { dom, cod, map: self.map.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn two() -> FiniteObject {
        FiniteObject::range(2)
    }

    #[test]
    fn rejects_bad_rows() {
        let e = StochKernel::from_dense(FiniteObject::unit(), two(), vec![vec![q(1, 2), q(2, 5)]]);
        assert!(matches!(e, Err(Error::InvalidKernel(_))));
        let e = PossKernel::from_dense(FiniteObject::unit(), two(), vec![vec![false, false]]);
        assert!(e.is_err());
        assert!(DetKernel::new(two(), two(), vec![0, 2]).is_err());
    }

    #[test]
    fn sparse_rows_are_normalized() {
        let k = StochKernel::from_sparse(
            FiniteObject::unit(),
            FiniteObject::range(3),
            vec![vec![(2, q(1, 4)), (0, q(1, 2)), (2, q(1, 4)), (1, q(0, 1))]],
        )
        .unwrap();
        assert_eq!(k.row(0), &[(0, q(1, 2)), (2, q(1, 2))]);
    }

    #[test]
    fn structural_swap_matches_index_arithmetic() {
        let x = FiniteObject::new(["0", "1"]).unwrap();
        let y = FiniteObject::new(["a", "b", "c"]).unwrap();
        let s = DetKernel::structural(&[&x, &y], &[1, 0]);
        // (0,b) has index 1 in X⊗Y and (b,0) has index 1*2 + 0 in Y⊗X.
        assert_eq!(s.apply(1), 2);
        for i in 0..x.size() {
            for j in 0..y.size() {
                assert_eq!(s.apply(i * 3 + j), j * 2 + i);
            }
        }
    }

    #[test]
    fn inverse_of_bijection() {
        let p = DetKernel::new(FiniteObject::range(3), FiniteObject::range(3), vec![2, 0, 1]).unwrap();
        let inv = p.inverse().unwrap();
        assert_eq!(p.compose(&inv).unwrap(), DetKernel::identity(&FiniteObject::range(3)));
        let c = DetKernel::new(two(), two(), vec![0, 0]).unwrap();
        assert!(c.inverse().is_none());
    }
}
