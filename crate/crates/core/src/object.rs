//! Finite objects with a strict tensor product.
//!
//! An object is a list of atoms (finite labeled sets). Tensoring concatenates
//! the lists, so the product is strictly associative and the empty list is a
//! strict unit. Elements are addressed by a single flat index in row-major
//! order: the first atom is the most significant digit.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A nonempty finite set of labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    labels: Arc<[String]>,
}

impl Atom {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidKernel("an atom needs at least one label".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidKernel(format!("duplicate label {l:?}")));
            }
        }
        Ok(Atom { labels: labels.into() })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(","))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteObject {
    atoms: Arc<[Atom]>,
}

impl FiniteObject {
    pub fn unit() -> Self {
        FiniteObject { atoms: Arc::from(Vec::new()) }
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        FiniteObject { atoms: atoms.into() }
    }

    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(Self::from_atoms(vec![Atom::new(labels)?]))
    }

    /// The atom `{0, 1, ..., n-1}`. Panics when `n == 0`.
    pub fn range(n: usize) -> Self {
        assert!(n > 0, "objects are nonempty");
        Self::new((0..n).map(|i| i.to_string())).expect("distinct labels")
    }

    pub fn tensor(&self, other: &FiniteObject) -> FiniteObject {
        if self.is_unit() {
            return other.clone();
        }
        if other.is_unit() {
            return self.clone();
        }
        let mut atoms = self.atoms.to_vec();
        atoms.extend(other.atoms.iter().cloned());
        Self::from_atoms(atoms)
    }

    pub fn tensor_all<'a, I>(objects: I) -> FiniteObject
    where
        I: IntoIterator<Item = &'a FiniteObject>,
    {
        let atoms: Vec<Atom> = objects
            .into_iter()
            .flat_map(|o| o.atoms.iter().cloned())
            .collect();
        Self::from_atoms(atoms)
    }

    pub fn pow(&self, k: usize) -> FiniteObject {
        Self::tensor_all(std::iter::repeat(self).take(k))
    }

    pub fn is_unit(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn size(&self) -> usize {
        self.atoms.iter().map(Atom::size).product()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.atoms.iter().map(Atom::size).collect()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, i: usize) -> FiniteObject {
        Self::from_atoms(vec![self.atoms[i].clone()])
    }

    /// Sub-object made of the atoms in `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> FiniteObject {
        Self::from_atoms(self.atoms[range].to_vec())
    }

    /// Sub-object made of the listed atoms, in the listed order.
    pub fn select(&self, picks: &[usize]) -> Result<FiniteObject> {
        let mut atoms = Vec::with_capacity(picks.len());
        for &i in picks {
            let a = self.atoms.get(i).ok_or_else(|| {
                Error::BadFactorSelection(format!("atom {i} out of range for {self}"))
            })?;
            atoms.push(a.clone());
        }
        Ok(Self::from_atoms(atoms))
    }

    /// Row-major strides, one per atom.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.atoms.len()];
        for i in (0..self.atoms.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.atoms[i + 1].size();
        }
        strides
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.atoms.len());
        let mut idx = 0;
        for (c, a) in coords.iter().zip(self.atoms.iter()) {
            debug_assert!(*c < a.size());
            idx = idx * a.size() + c;
        }
        idx
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut coords = vec![0; self.atoms.len()];
        for (slot, a) in coords.iter_mut().zip(self.atoms.iter()).rev() {
            *slot = idx % a.size();
            idx /= a.size();
        }
        coords
    }

    /// Human-readable label of an element: `*` for the unit, the bare label for
    /// a single atom, and a parenthesized tuple otherwise.
    pub fn label(&self, idx: usize) -> String {
        match self.atoms.len() {
            0 => "*".to_string(),
            1 => self.atoms[0].labels[idx].clone(),
            _ => {
                let parts: Vec<&str> = self
                    .decode(idx)
                    .iter()
                    .zip(self.atoms.iter())
                    .map(|(c, a)| a.labels[*c].as_str())
                    .collect();
                format!("({})", parts.join(","))
            }
        }
    }

    /// Inverse of [`FiniteObject::label`] on tuples of atom labels.
    pub fn index_of_labels(&self, labels: &[&str]) -> Option<usize> {
        if labels.len() != self.atoms.len() {
            return None;
        }
        let mut coords = Vec::with_capacity(labels.len());
        for (l, a) in labels.iter().zip(self.atoms.iter()) {
            coords.push(a.labels.iter().position(|x| x == l)?);
        }
        Some(self.encode(&coords))
    }
}

impl fmt::Display for FiniteObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| format!("{a:?}")).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

impl fmt::Debug for FiniteObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A list of objects read as one tensor product, with helpers to move between
/// flat indices of the product and per-block indices.
#[derive(Clone, Debug)]
pub struct Blocks {
    objects: Vec<FiniteObject>,
    atom_start: Vec<usize>,
    whole: FiniteObject,
}

impl Blocks {
    pub fn new(objects: &[&FiniteObject]) -> Self {
        let mut atom_start = Vec::with_capacity(objects.len() + 1);
        let mut n = 0;
        for o in objects {
            atom_start.push(n);
            n += o.n_atoms();
        }
        atom_start.push(n);
        let objects: Vec<FiniteObject> = objects.iter().map(|o| (*o).clone()).collect();
        let whole = FiniteObject::tensor_all(objects.iter());
        Blocks { objects, atom_start, whole }
    }

    pub fn whole(&self) -> &FiniteObject {
        &self.whole
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn block(&self, i: usize) -> &FiniteObject {
        &self.objects[i]
    }

    /// Atom positions (within the whole product) covered by block `i`.
    pub fn atom_range(&self, i: usize) -> std::ops::Range<usize> {
        self.atom_start[i]..self.atom_start[i + 1]
    }

    pub fn atoms_of(&self, picks: &[usize]) -> Vec<usize> {
        picks.iter().flat_map(|&b| self.atom_range(b)).collect()
    }

    /// Flat index of the whole product to one flat index per block.
    pub fn split(&self, idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.objects.len()];
        let mut rest = idx;
        for (slot, o) in out.iter_mut().zip(self.objects.iter()).rev() {
            let n = o.size();
            *slot = rest % n;
            rest /= n;
        }
        out
    }

    pub fn join(&self, parts: &[usize]) -> usize {
        debug_assert_eq!(parts.len(), self.objects.len());
        let mut idx = 0;
        for (p, o) in parts.iter().zip(self.objects.iter()) {
            idx = idx * o.size() + p;
        }
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_is_strict() {
        let x = FiniteObject::range(3);
        assert_eq!(FiniteObject::unit().tensor(&x), x);
        assert_eq!(x.tensor(&FiniteObject::unit()), x);
        assert_eq!(FiniteObject::unit().size(), 1);
        assert_eq!(x.pow(0), FiniteObject::unit());
    }

    #[test]
    fn encode_decode_round_trip() {
        let x = FiniteObject::range(2)
            .tensor(&FiniteObject::range(3))
            .tensor(&FiniteObject::range(4));
        assert_eq!(x.size(), 24);
        for i in 0..x.size() {
            assert_eq!(x.encode(&x.decode(i)), i);
        }
        assert_eq!(x.decode(5), vec![0, 1, 1]);
        assert_eq!(x.strides(), vec![12, 4, 1]);
    }

    #[test]
    fn labels_and_lookup() {
        let x = FiniteObject::new(["0", "1"]).unwrap();
        let y = FiniteObject::new(["a", "b", "c"]).unwrap();
        let xy = x.tensor(&y);
        assert_eq!(xy.label(1), "(0,b)");
        assert_eq!(xy.index_of_labels(&["1", "c"]), Some(5));
        assert_eq!(FiniteObject::unit().label(0), "*");
        assert!(FiniteObject::new(Vec::<String>::new()).is_err());
        assert!(FiniteObject::new(["a", "a"]).is_err());
    }

    #[test]
    fn blocks_split_join() {
        let a = FiniteObject::range(2);
        let b = FiniteObject::range(3).tensor(&FiniteObject::range(2));
        let blocks = Blocks::new(&[&a, &FiniteObject::unit(), &b]);
        assert_eq!(blocks.whole().size(), 12);
        for i in 0..12 {
            assert_eq!(blocks.join(&blocks.split(i)), i);
        }
        assert_eq!(blocks.atoms_of(&[2]), vec![1, 2]);
        assert_eq!(blocks.atom_range(1), 1..1);
    }
}
