//! Seeded random generators for kernels, lenses, charts and squares.
//!
//! Squares are never sampled by rejection. [`Gen::transport_square`] builds
//! a valid xy-square below any chart from lenses whose forward maps are
//! bijections and whose backward maps are onto in each fiber; the bottom
//! chart is then determined by the data.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{Chart, DetLens, Interface, XYSquare};
use crate::arenasys::{SysXMor, SysXYSquare, SysYMor, SystemObject};
use crate::error::Result;
use crate::kernel::{DetKernel, Kernel, Row};
use crate::mealy::{GMealy, GParaMealy};
use crate::morphism::{Instance, Morphism};
use crate::object::FiniteObject;
use crate::rational::Q;
use crate::time::{IndexedObject, StepSystem};

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self, p_num: u32, p_den: u32) -> bool {
        self.rng.gen_ratio(p_num, p_den)
    }

    /// A single atom with between 1 and `max` elements.
    pub fn atom(&mut self, max: usize) -> FiniteObject {
        FiniteObject::range(self.rng.gen_range(1..=max.max(1)))
    }

    /// The unit object with probability 1/4, otherwise an atom of size at
    /// most `max`.
    pub fn object(&mut self, max: usize) -> FiniteObject {
        if self.coin(1, 4) {
            FiniteObject::unit()
        } else {
            self.atom(max)
        }
    }

    fn weights(&mut self, n: usize) -> Vec<Q> {
        loop {
            let w: Vec<u32> = (0..n).map(|_| self.rng.gen_range(0..=3)).collect();
            let total: u32 = w.iter().sum();
            if total > 0 {
                return w
                    .into_iter()
                    .map(|x| Q::new(BigInt::from(x), BigInt::from(total)))
                    .collect();
            }
        }
    }

    fn subset(&mut self, n: usize) -> Vec<bool> {
        loop {
            let s: Vec<bool> = (0..n).map(|_| self.rng.gen_bool(0.5)).collect();
            if s.iter().any(|b| *b) {
                return s;
            }
        }
    }

    /// A random distribution on `x`, with some zero entries.
    pub fn distribution(&mut self, x: &FiniteObject) -> Morphism {
        self.stoch(&FiniteObject::unit(), x)
    }

    pub fn stoch(&mut self, dom: &FiniteObject, cod: &FiniteObject) -> Morphism {
        self.stoch_on(dom, cod, |_| (0..cod.size()).collect())
    }

    /// A stochastic kernel whose row `i` is supported on `support(i)`, which
    /// must be nonempty and sorted.
    pub fn stoch_on(&mut self, dom: &FiniteObject, cod: &FiniteObject, support: impl Fn(usize) -> Vec<usize>) -> Morphism {
        let rows: Vec<Row<Q>> = (0..dom.size())
            .map(|i| {
                let sup = support(i);
                let w = self.weights(sup.len());
                sup.into_iter().zip(w).collect()
            })
            .collect();
        Morphism::Stoch(Kernel::from_sparse(dom.clone(), cod.clone(), rows).expect("rows are normalized"))
    }

    pub fn poss(&mut self, dom: &FiniteObject, cod: &FiniteObject) -> Morphism {
        self.poss_on(dom, cod, |_| (0..cod.size()).collect())
    }

    pub fn poss_on(&mut self, dom: &FiniteObject, cod: &FiniteObject, support: impl Fn(usize) -> Vec<usize>) -> Morphism {
        let rows: Vec<Row<bool>> = (0..dom.size())
            .map(|i| {
                let sup = support(i);
                let keep = self.subset(sup.len());
                sup.into_iter().zip(keep).filter(|(_, k)| *k).map(|(j, _)| (j, true)).collect()
            })
            .collect();
        Morphism::Poss(Kernel::from_sparse(dom.clone(), cod.clone(), rows).expect("rows are nonempty"))
    }

    pub fn det(&mut self, dom: &FiniteObject, cod: &FiniteObject) -> DetKernel {
        let n = cod.size();
        let map = (0..dom.size()).map(|_| self.rng.gen_range(0..n)).collect();
        DetKernel::new(dom.clone(), cod.clone(), map).expect("map is in range")
    }

    /// A random morphism in the given instance.
    pub fn kernel(&mut self, dom: &FiniteObject, cod: &FiniteObject, inst: Instance) -> Morphism {
        match inst {
            Instance::Stoch => self.stoch(dom, cod),
            Instance::Poss => self.poss(dom, cod),
            Instance::Det => Morphism::Det(self.det(dom, cod)),
        }
    }

    pub fn kernel_on(
        &mut self,
        dom: &FiniteObject,
        cod: &FiniteObject,
        inst: Instance,
        support: impl Fn(usize) -> Vec<usize>,
    ) -> Morphism {
        match inst {
            Instance::Poss => self.poss_on(dom, cod, support),
            Instance::Det => {
                let map = (0..dom.size())
                    .map(|i| {
                        let sup = support(i);
                        sup[self.rng.gen_range(0..sup.len())]
                    })
                    .collect();
                Morphism::Det(DetKernel::new(dom.clone(), cod.clone(), map).expect("support is in range"))
            }
            Instance::Stoch => self.stoch_on(dom, cod, support),
        }
    }

    /// A random permutation of `x`.
    pub fn bijection(&mut self, x: &FiniteObject, y: &FiniteObject) -> DetKernel {
        assert_eq!(x.size(), y.size(), "a bijection needs equal sizes");
        let mut map: Vec<usize> = (0..x.size()).collect();
        map.shuffle(&mut self.rng);
        DetKernel::new(x.clone(), y.clone(), map).expect("permutation")
    }

    /// A random function `a2 → a1` that is onto; needs `|a2| ≥ |a1|`.
    fn onto(&mut self, n_from: usize, n_to: usize) -> Vec<usize> {
        assert!(n_from >= n_to, "no onto map from {n_from} to {n_to} elements");
        let mut order: Vec<usize> = (0..n_from).collect();
        order.shuffle(&mut self.rng);
        let mut map = vec![0; n_from];
        for (k, &src) in order.iter().enumerate() {
            map[src] = if k < n_to { k } else { self.rng.gen_range(0..n_to) };
        }
        map
    }

    pub fn lens(&mut self, src: &Interface, dst: &Interface) -> DetLens {
        let f = self.det(&src.c, &dst.c);
        let fsharp = self.det(&src.c.tensor(&dst.a), &src.a);
        DetLens::new(src.clone(), dst.clone(), f, fsharp).expect("shapes match")
    }

    /// A lens whose forward map is a bijection and whose backward map is
    /// onto `a1` for every fixed `c1`. Needs `|c1| = |c2|` and `|a2| ≥ |a1|`.
    pub fn transport_lens(&mut self, src: &Interface, dst: &Interface) -> DetLens {
        let f = self.bijection(&src.c, &dst.c);
        let (na1, na2) = (src.a.size(), dst.a.size());
        let mut map = Vec::with_capacity(src.c.size() * na2);
        for _ in 0..src.c.size() {
            map.extend(self.onto(na2, na1));
        }
        let fsharp = DetKernel::new(src.c.tensor(&dst.a), src.a.clone(), map).expect("in range");
        DetLens::new(src.clone(), dst.clone(), f, fsharp).expect("shapes match")
    }

    /// An interface with the same exposed part as `i` and a received part
    /// at least as large.
    pub fn widen(&mut self, i: &Interface) -> Interface {
        let extra = usize::from(self.coin(1, 3));
        let a = if i.a.is_unit() && extra == 0 {
            FiniteObject::unit()
        } else {
            FiniteObject::range(i.a.size() + extra)
        };
        let c = if i.c.is_unit() { FiniteObject::unit() } else { FiniteObject::range(i.c.size()) };
        Interface::new(a, c)
    }

    pub fn interface(&mut self, max: usize) -> Interface {
        Interface::new(self.object(max), self.object(max))
    }

    /// A random chart with `g♭(c1, a1) = g(c1)(c12, c2) · h(c1, a1, c12, c2)(a12, a2)`.
    pub fn chart(&mut self, src: &Interface, dst: &Interface, residual: &Interface, inst: Instance) -> Chart {
        let (c1, a1) = (&src.c, &src.a);
        let (c12, c2) = (&residual.c, &dst.c);
        let g = self.kernel(c1, &c12.tensor(c2), inst);
        let h = self.kernel(&FiniteObject::tensor_all([c12, c2, c1, a1]), &residual.a.tensor(&dst.a), inst);
        let gflat = Morphism::chain([
            &Morphism::structural(&[c1, a1], &[0, 0, 1]),
            &g.tensor_id(&c1.tensor(a1)).expect("shapes match"),
            &Morphism::structural(&[c12, c2, c1, a1], &[0, 1, 0, 1, 2, 3]),
            &h.id_tensor(&c12.tensor(c2)).expect("shapes match"),
        ])
        .expect("shapes match");
        Chart::new(src.clone(), dst.clone(), residual.clone(), g, gflat).expect("generated charts are valid")
    }

    pub fn random_chart(&mut self, max: usize, inst: Instance) -> Chart {
        let src = self.interface(max);
        let dst = self.interface(max);
        let res = self.interface(max);
        self.chart(&src, &dst, &res, inst)
    }

    /// A kernel `c ⊗ a → a'` whose row at `(c, a)` is supported on the
    /// `a'` with `back(c, a') = a`.
    fn preimage_kernel(&mut self, lens: &DetLens, inst: Instance) -> Morphism {
        let (c, a_src, a_dst) = (&lens.src.c, &lens.src.a, &lens.dst.a);
        let na_src = a_src.size();
        let na_dst = a_dst.size();
        let back = lens.fsharp.clone();
        self.kernel_on(&c.tensor(a_src), a_dst, inst, move |row| {
            let (ci, ai) = (row / na_src, row % na_src);
            (0..na_dst).filter(|&y| back.apply(ci * na_dst + y) == ai).collect()
        })
    }

    /// The square below `top` carried by three transport lenses: `left` from
    /// the source, `mid` between residuals and `right` from the target.
    pub fn transport_square(
        &mut self,
        top: &Chart,
        left: &DetLens,
        mid: &DetLens,
        right: &DetLens,
        inst: Instance,
    ) -> Result<XYSquare> {
        let (c1, a3) = (&top.src.c, &left.dst.a);
        let (c12, c2) = (&top.residual.c, &top.dst.c);
        let k_mid = self.preimage_kernel(mid, inst);
        let k_right = self.preimage_kernel(right, inst);
        // c1 a3 → copy_{c1} → c1 c1 a3 → c1 ⊗ left♯ → c1 a1 → g♭ → c12 c2 a12 a2
        //   → copy_{c12 c2} → c12 c2 (c12 a12) (c2 a2) → c12 c2 ⊗ κ_mid ⊗ κ_right
        let s = Morphism::chain([
            &Morphism::structural(&[c1, a3], &[0, 0, 1]),
            &left.fsharp_m().id_tensor(c1)?,
            &top.gflat,
            &Morphism::structural(&[c12, c2, &top.residual.a, &top.dst.a], &[0, 1, 0, 2, 1, 3]),
            &k_mid.tensor(&k_right)?.id_tensor(&c12.tensor(c2))?,
        ])?;
        let inv = Morphism::Det(left.f.inverse().expect("transport lenses have bijective forward maps"));
        let push = mid.f_m().tensor(&right.f_m())?;
        let g = Morphism::chain([&inv, &top.g, &push])?;
        let gflat = Morphism::chain([
            &inv.tensor_id(a3)?,
            &s,
            &push.tensor_id(&mid.dst.a.tensor(&right.dst.a))?,
        ])?;
        let bottom = Chart::new(left.dst.clone(), right.dst.clone(), mid.dst.clone(), g, gflat)?;
        XYSquare::new(top.clone(), bottom, left.clone(), right.clone(), mid.clone(), s)
    }

    /// A transport square below `top` with freshly drawn lenses.
    pub fn square_below(&mut self, top: &Chart, inst: Instance) -> Result<(XYSquare, Interface, Interface)> {
        let src = self.widen(&top.src);
        let dst = self.widen(&top.dst);
        let res = self.widen(&top.residual);
        let left = self.transport_lens(&top.src, &src);
        let right = self.transport_lens(&top.dst, &dst);
        let mid = self.transport_lens(&top.residual, &res);
        let sq = self.transport_square(top, &left, &mid, &right, inst)?;
        Ok((sq, src, dst))
    }

    /// A 2×2 grid `[[s, u], [t, v]]` of transport squares, composable in
    /// both directions.
    pub fn grid(&mut self, max: usize, inst: Instance) -> Result<[[XYSquare; 2]; 2]> {
        let i1 = self.interface(max);
        let i2 = self.interface(max);
        let i5 = self.interface(max);
        let r12 = self.interface_small(max);
        let x12 = self.chart(&i1, &i2, &r12, inst);
        let r25 = self.interface_small(max);
        let x25 = self.chart(&i2, &i5, &r25, inst);
        let (i3, i4, i6) = (self.widen(&i1), self.widen(&i2), self.widen(&i5));
        let l13 = self.transport_lens(&i1, &i3);
        let l24 = self.transport_lens(&i2, &i4);
        let l56 = self.transport_lens(&i5, &i6);
        let m_s = {
            let to = self.widen(&x12.residual);
            self.transport_lens(&x12.residual, &to)
        };
        let m_u = {
            let to = self.widen(&x25.residual);
            self.transport_lens(&x25.residual, &to)
        };
        let s = self.transport_square(&x12, &l13, &m_s, &l24, inst)?;
        let u = self.transport_square(&x25, &l24, &m_u, &l56, inst)?;
        let (i7, i8, i9) = (self.widen(&i3), self.widen(&i4), self.widen(&i6));
        let l37 = self.transport_lens(&i3, &i7);
        let l48 = self.transport_lens(&i4, &i8);
        let l69 = self.transport_lens(&i6, &i9);
        let m_t = {
            let to = self.widen(&s.bottom.residual);
            self.transport_lens(&s.bottom.residual, &to)
        };
        let m_v = {
            let to = self.widen(&u.bottom.residual);
            self.transport_lens(&u.bottom.residual, &to)
        };
        let t = self.transport_square(&s.bottom, &l37, &m_t, &l48, inst)?;
        let v = self.transport_square(&u.bottom, &l48, &m_v, &l69, inst)?;
        Ok([[s, u], [t, v]])
    }

    /// Three vertically composable transport squares.
    pub fn column(&mut self, max: usize, inst: Instance) -> Result<[XYSquare; 3]> {
        let src = self.interface(max);
        let dst = self.interface(max);
        let res = self.interface_small(max);
        let top = self.chart(&src, &dst, &res, inst);
        let (s, _, _) = self.square_below(&top, inst)?;
        let (t, _, _) = self.square_below(&s.bottom, inst)?;
        let (w, _, _) = self.square_below(&t.bottom, inst)?;
        Ok([s, t, w])
    }

    /// An interface with at most one nontrivial part, used for residuals so
    /// composites stay small.
    pub fn interface_small(&mut self, max: usize) -> Interface {
        if self.coin(1, 2) {
            Interface::new(self.object(max), FiniteObject::unit())
        } else {
            Interface::new(FiniteObject::unit(), self.object(max))
        }
    }
}

/// Generators for the system layer.
impl Gen {
    /// A state object whose full states `S̃` project onto `S`.
    pub fn system_object(&mut self, max: usize) -> SystemObject {
        let s = self.atom(max);
        if self.coin(1, 2) {
            return SystemObject::plain(&s);
        }
        let extra = self.rng.gen_range(1..=2);
        let st = FiniteObject::range(s.size() + extra);
        let map = self.onto(st.size(), s.size());
        SystemObject::new(DetKernel::new(st, s, map).expect("in range"))
    }

    fn fiber(r: &DetKernel, s: usize) -> Vec<usize> {
        (0..r.dom().size()).filter(|&x| r.apply(x) == s).collect()
    }

    /// A random state x-morphism: `f` is arbitrary and `f♭` lifts it
    /// through the structure maps.
    pub fn sys_x(&mut self, src: &SystemObject, dst: &SystemObject, inst: Instance) -> SysXMor {
        let f = self.kernel(&src.s, &dst.s, inst);
        let r2 = dst.r.clone();
        let n2 = dst.s.size();
        let lift = self.kernel_on(&src.stilde.tensor(&dst.s), &dst.stilde, inst, move |row| Self::fiber(&r2, row % n2));
        let st1 = &src.stilde;
        let fflat = Morphism::chain([
            &Morphism::structural(&[st1], &[0, 0]),
            &src.r_m().then(&f).expect("shapes match").id_tensor(st1).expect("shapes match"),
            &lift,
        ])
        .expect("shapes match");
        SysXMor::new(src.clone(), dst.clone(), fflat, f).expect("lifted x-morphisms are valid")
    }

    /// A random system lens; the update lands in the fiber of the current
    /// state.
    pub fn sys_lens(&mut self, src: &SystemObject, dst: &Interface, inst: Instance) -> SysYMor {
        let f = self.det(&src.s, &dst.c);
        let r = src.r.clone();
        let na = dst.a.size();
        let fsharp = self.kernel_on(&src.s.tensor(&dst.a), &src.stilde, inst, move |row| Self::fiber(&r, row / na));
        SysYMor::new(src.clone(), dst.clone(), f, fsharp).expect("generated system lenses are valid")
    }

    /// A system lens onto an interface whose exposed part has the size of
    /// `S`: the output map is a bijection and the update is a function onto
    /// each fiber of `r`.
    pub fn sys_transport_lens(&mut self, src: &SystemObject) -> SysYMor {
        let n = src.s.size();
        let widest = (0..n).map(|s| Self::fiber(&src.r, s).len()).max().unwrap_or(1);
        let na = widest + usize::from(self.coin(1, 3));
        let a = if na == 1 && self.coin(1, 2) { FiniteObject::unit() } else { FiniteObject::range(na) };
        let c = FiniteObject::range(n);
        let f = self.bijection(&src.s, &c);
        let mut map = Vec::with_capacity(n * a.size());
        for s in 0..n {
            let fib = Self::fiber(&src.r, s);
            map.extend(self.onto(a.size(), fib.len()).into_iter().map(|k| fib[k]));
        }
        let fsharp = DetKernel::new(src.s.tensor(&a), src.stilde.clone(), map).expect("in range");
        SysYMor::new(src.clone(), Interface::new(a, c), f, Morphism::Det(fsharp)).expect("valid")
    }

    /// The system square below `top` determined by a left lens with a
    /// bijective output map, a right lens whose update is onto each fiber,
    /// and random kernels `ρ : S1 S2 → c34`, `κ : S2 c34 → a34` and
    /// `κ' : S2 S̃2 → a4` supported on the right lens' preimages.
    pub fn sys_transport_square(
        &mut self,
        top: &SysXMor,
        left: &SysYMor,
        right: &SysYMor,
        residual: &Interface,
        inst: Instance,
    ) -> Result<SysXYSquare> {
        let (s1, s2, st2) = (&top.src.s, &top.dst.s, &top.dst.stilde);
        let (c34, a34) = (&residual.c, &residual.a);
        let (a3, a4) = (&left.dst.a, &right.dst.a);
        let rho = self.kernel(&s1.tensor(s2), c34, inst);
        let kappa_m = self.kernel(&s2.tensor(c34), a34, inst);
        let back = right.fsharp.as_det().expect("transport lenses update deterministically");
        let (n_st2, n_a4) = (st2.size(), a4.size());
        let kappa_r = self.kernel_on(&s2.tensor(st2), a4, inst, move |row| {
            let (x2, y2) = (row / n_st2, row % n_st2);
            let pre: Vec<usize> = (0..n_a4).filter(|&y| back.apply(x2 * n_a4 + y) == y2).collect();
            if pre.is_empty() {
                (0..n_a4).collect()
            } else {
                pre
            }
        });
        // S1 a3 → copy_{S1} ; S1 ⊗ f13♯ ; S1 ⊗ f12♭ → S1 S̃2 → S1 ⊗ (copy ; r2 ⊗ S̃2)
        //   → S1 S2 S̃2 → S2 ⊗ ρ ⊗ S2 S̃2 → S2 c34 S2 S̃2
        //   → copy_{S2 c34} → S2 c34 ⊗ κ ⊗ κ' → S2 c34 a34 a4
        let s = Morphism::chain([
            &Morphism::structural(&[s1, a3], &[0, 0, 1]),
            &left.fsharp.id_tensor(s1)?,
            &top.fflat.id_tensor(s1)?,
            &Morphism::structural(&[s1, st2], &[0, 1, 1]),
            &top.dst.r_m().tensor_id(st2)?.id_tensor(s1)?,
            &Morphism::structural(&[s1, s2, st2], &[1, 0, 1, 1, 2]),
            &rho.tensor_id(&s2.tensor(st2))?.id_tensor(s2)?,
            &Morphism::structural(&[s2, c34, s2, st2], &[0, 1, 0, 1, 2, 3]),
            &kappa_m.tensor(&kappa_r)?.id_tensor(&s2.tensor(c34))?,
        ])?;
        let inv = Morphism::Det(left.f.inverse().expect("transport lenses have bijective output maps"));
        let g = Morphism::chain([
            &inv,
            &Morphism::structural(&[s1], &[0, 0]),
            &top.f.id_tensor(s1)?,
            &Morphism::structural(&[s1, s2], &[0, 1, 1]),
            &rho.tensor(&right.f_m())?,
        ])?;
        let gflat = Morphism::chain([
            &inv.tensor_id(a3)?,
            &s,
            &Morphism::structural(&[s2, c34], &[1, 0]).tensor_id(&a34.tensor(a4))?,
            &right.f_m().id_tensor(c34)?.tensor_id(&a34.tensor(a4))?,
        ])?;
        let bottom = Chart::new(left.dst.clone(), right.dst.clone(), residual.clone(), g, gflat)?;
        SysXYSquare::new(top.clone(), bottom, left.clone(), right.clone(), s)
    }

    /// A system square `[[s, u], [t, v]]` grid: the top row is made of
    /// system squares, the bottom row of Arena squares.
    pub fn sys_grid(&mut self, max: usize, inst: Instance) -> Result<([SysXYSquare; 2], [XYSquare; 2])> {
        let o1 = self.system_object(max);
        let o2 = self.system_object(max);
        let o3 = self.system_object(max);
        let x12 = self.sys_x(&o1, &o2, inst);
        let x23 = self.sys_x(&o2, &o3, inst);
        let l14 = self.sys_transport_lens(&o1);
        let l25 = self.sys_transport_lens(&o2);
        let l36 = self.sys_transport_lens(&o3);
        let r45 = self.interface_small(max);
        let r56 = self.interface_small(max);
        let s = self.sys_transport_square(&x12, &l14, &l25, &r45, inst)?;
        let u = self.sys_transport_square(&x23, &l25, &l36, &r56, inst)?;
        let (i7, i8, i9) = (self.widen(&l14.dst), self.widen(&l25.dst), self.widen(&l36.dst));
        let l47 = self.transport_lens(&l14.dst, &i7);
        let l58 = self.transport_lens(&l25.dst, &i8);
        let l69 = self.transport_lens(&l36.dst, &i9);
        let m_t = {
            let to = self.widen(&r45);
            self.transport_lens(&r45, &to)
        };
        let m_v = {
            let to = self.widen(&r56);
            self.transport_lens(&r56, &to)
        };
        let t = self.transport_square(&s.bottom, &l47, &m_t, &l58, inst)?;
        let v = self.transport_square(&u.bottom, &l58, &m_v, &l69, inst)?;
        Ok(([s, u], [t, v]))
    }

    /// A system square with two Arena squares stacked below it.
    pub fn sys_column(&mut self, max: usize, inst: Instance) -> Result<(SysXYSquare, XYSquare, XYSquare)> {
        let o1 = self.system_object(max);
        let o2 = self.system_object(max);
        let x = self.sys_x(&o1, &o2, inst);
        let left = self.sys_transport_lens(&o1);
        let right = self.sys_transport_lens(&o2);
        let res = self.interface_small(max);
        let s = self.sys_transport_square(&x, &left, &right, &res, inst)?;
        let (t, _, _) = self.square_below(&s.bottom, inst)?;
        let (w, _, _) = self.square_below(&t.bottom, inst)?;
        Ok((s, t, w))
    }

    /// A left side suitable for joint behaviors: `I0` is the unit and the
    /// update `T → T̃` is a bijection.
    pub fn behavior_source(&mut self, max: usize) -> SysYMor {
        let t = self.atom(max);
        let tt = FiniteObject::range(t.size());
        let f0s = self.bijection(&t, &tt);
        let r0 = f0s.inverse().expect("bijection");
        let o0 = self.object(max);
        let f0 = self.det(&t, &o0);
        SysYMor::new(SystemObject::new(r0), Interface::new(FiniteObject::unit(), o0), f0, Morphism::Det(f0s))
            .expect("valid")
    }

    /// A system lens whose output map is onto `O`.
    pub fn onto_sys_lens(&mut self, max: usize, inst: Instance) -> SysYMor {
        let st = self.system_object(max);
        let o = FiniteObject::range(self.rng.gen_range(1..=st.s.size()));
        let i = self.object(max);
        let f = DetKernel::new(st.s.clone(), o.clone(), self.onto(st.s.size(), o.size())).expect("in range");
        let r = st.r.clone();
        let na = i.size();
        let fsharp = self.kernel_on(&st.s.tensor(&i), &st.stilde, inst, move |row| Self::fiber(&r, row / na));
        SysYMor::new(st, Interface::new(i, o), f, fsharp).expect("valid")
    }

    /// The behavior square of `right` over the chart `g` (unit residual):
    /// `s` follows `f0 ; g♭` and draws a state in the fiber of the output.
    pub fn behavior_square(&mut self, left: &SysYMor, right: &SysYMor, g: &Chart, inst: Instance) -> Result<SysXYSquare> {
        let (t, st) = (&left.src.s, &right.src.s);
        let (o, i) = (&right.dst.c, &right.dst.a);
        let f = right.f.clone();
        let (n_o, n_i) = (o.size(), i.size());
        let lift = self.kernel_on(&FiniteObject::tensor_all([t, o, i]), st, inst, move |row| {
            let oi = (row / n_i) % n_o;
            (0..f.dom().size()).filter(|&x| f.apply(x) == oi).collect()
        });
        let s = Morphism::chain([
            &Morphism::structural(&[t], &[0, 0]),
            &left.f_m().then(&g.gflat)?.id_tensor(t)?,
            &Morphism::structural(&[t, o, i], &[0, 1, 2, 2]),
            &lift.tensor_id(i)?,
        ])?;
        let phi = s.then(&Morphism::structural(&[st, i], &[0]))?;
        let phi_flat = Morphism::chain([&left.src.r_m(), &s, &right.fsharp])?;
        let top = SysXMor::new(left.src.clone(), right.src.clone(), phi_flat, phi)?;
        SysXYSquare::new(top, g.clone(), left.clone(), right.clone(), s)
    }

    /// Inputs for a joint behavior: two behavior squares over the
    /// projections of one chart `g012`.
    pub fn nabla_inputs(&mut self, max: usize, inst: Instance) -> Result<(SysXYSquare, SysXYSquare, Chart)> {
        let left = self.behavior_source(max);
        let sys1 = self.onto_sys_lens(max, inst);
        let sys2 = self.onto_sys_lens(max, inst);
        let g012 = self.chart(&left.dst, &sys1.dst.tensor(&sys2.dst), &Interface::unit(), inst);
        let (o1, o2, i1, i2) = (&sys1.dst.c, &sys2.dst.c, &sys1.dst.a, &sys2.dst.a);
        let project = |which: usize, sys: &SysYMor| -> Result<Chart> {
            let g = g012.g.then(&Morphism::structural(&[o1, o2], &[which]))?;
            let gflat = g012.gflat.then(&Morphism::structural(&[o1, o2, i1, i2], &[which, 2 + which]))?;
            Chart::unit_residual(left.dst.clone(), sys.dst.clone(), g, gflat)
        };
        let g01 = project(0, &sys1)?;
        let g02 = project(1, &sys2)?;
        let s1 = self.behavior_square(&left, &sys1, &g01, inst)?;
        let s2 = self.behavior_square(&left, &sys2, &g02, inst)?;
        Ok((s1, s2, g012))
    }
}

/// Generators for indexed systems.
impl Gen {
    /// A random one-step open Markov process; `closed` forces a unit input.
    pub fn step_system(&mut self, max: usize, inst: Instance, closed: bool) -> StepSystem {
        let s = self.atom(max);
        let i = if closed { FiniteObject::unit() } else { self.object(max) };
        let o = self.object(max);
        let expose = self.det(&s, &o);
        let update = self.kernel(&s.tensor(&i), &s, inst);
        StepSystem::new(expose, update).expect("shapes fit")
    }

    /// A random one-step lens out of `src`.
    pub fn step_lens(&mut self, src: &Interface, max: usize) -> DetLens {
        let dst = Interface::new(self.object(max), self.object(max));
        self.lens(src, &dst)
    }
}

/// Generators for Mealy machines.
impl Gen {
    /// A random parametric machine whose state `x^(n+1)` gains one `x` per
    /// step, drawn together with the output.
    pub fn para_mealy(
        &mut self,
        src: &IndexedObject,
        dst: &IndexedObject,
        x: &FiniteObject,
        param: &IndexedObject,
        inst: Instance,
    ) -> GParaMealy {
        let state = IndexedObject::history(x, src.graph(), 1);
        let maps = (0..src.horizon())
            .map(|n| {
                let (p, a, s, b) = (param.at(n + 1), src.at(n + 1), state.at(n), dst.at(n + 1));
                let k = self.kernel(&FiniteObject::tensor_all([p, a, s]), &b.tensor(x), inst);
                Morphism::chain([
                    &Morphism::structural(&[p, a, s], &[0, 1, 2, 2]),
                    &k.tensor_id(s)?,
                    &Morphism::structural(&[b, x, s], &[0, 2, 1]),
                ])
            })
            .collect::<Result<Vec<_>>>()
            .expect("shapes fit");
        GParaMealy::new(src.clone(), dst.clone(), state, param.clone(), maps).expect("the old state is carried over")
    }

    pub fn mealy(&mut self, src: &IndexedObject, dst: &IndexedObject, x: &FiniteObject, inst: Instance) -> GMealy {
        let unit = IndexedObject::unit(src.graph());
        let p = self.para_mealy(src, dst, x, &unit, inst);
        GMealy::new(p.src, p.dst, p.state, p.maps).expect("valid")
    }
}
