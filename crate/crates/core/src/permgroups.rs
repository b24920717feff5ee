//! Permutation groups: stabilizer chains, guarded element sets, series,
//! Engel conditions and homomorphisms.
//!
//! Permutations act on the right: `i^(p*q) = (i^p)^q`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GUARD: usize = 100_000;

/// Largest element set for which a Cayley table is built.
const CAYLEY_LIMIT: usize = 3000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Arc<[u32]>);

impl Serialize for Perm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        Perm::from_images(v).map_err(serde::de::Error::custom)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i as usize >= n || std::mem::replace(&mut seen[i as usize], true) {
                return Err(Error::Argument(format!("not a permutation: {images:?}")));
            }
        }
        Ok(Perm(images.into()))
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        Perm(images.into())
    }

    /// From disjoint cycles on `0..n`.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut img: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for (k, &p) in c.iter().enumerate() {
                if p as usize >= n {
                    return Err(Error::Argument(format!("point {p} out of range {n}")));
                }
                img[p as usize] = c[(k + 1) % c.len()];
            }
        }
        Perm::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn image(&self, i: u32) -> u32 {
        self.0[i as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv.into())
    }

    pub fn pow(&self, e: i64) -> Perm {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Perm::identity(self.degree());
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&sq);
            }
            sq = sq.mul(&sq);
            k >>= 1;
        }
        out
    }

    /// `self⁻¹ * other⁻¹ * self * other`.
    pub fn commutator(&self, other: &Perm) -> Perm {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// `g⁻¹ * self * g`.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().mul(self).mul(g)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut l: u64 = 1;
        for s in 0..self.degree() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            l = num_integer::lcm(l, len);
        }
        l
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32)
    }

    /// Restriction to a block of points `[start, start+len)` that the permutation preserves.
    pub fn restrict(&self, start: usize, len: usize) -> Perm {
        Perm(self.0[start..start + len].iter().map(|&x| x - start as u32).collect())
    }

    /// Disjoint action on `0..n ⊔ n..n+m`.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let n = self.degree() as u32;
        Perm(self.0.iter().copied().chain(other.0.iter().map(|&x| x + n)).collect())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut any = false;
        for s in 0..self.degree() {
            if seen[s] || self.0[s] as usize == s {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut i = s;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{i}")?;
                first = false;
                i = self.0[i] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    /// `transversal[p]` maps the base point to `p`.
    transversal: Vec<Option<Perm>>,
}

/// Stabilizer chain built by deterministic Schreier–Sims.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    prefix: Vec<u32>,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Perm], prefix: &[u32]) -> Self {
        let mut chain = StabChain { degree, prefix: prefix.to_vec(), levels: Vec::new() };
        for g in gens {
            chain.extend(0, g.clone());
        }
        chain
    }

    fn new_level(&self, base: u32) -> Level {
        let mut transversal = vec![None; self.degree];
        transversal[base as usize] = Some(Perm::identity(self.degree));
        Level { base, gens: Vec::new(), orbit: vec![base], transversal }
    }

    /// Residue of `g` after sifting from level `k`, and the level where it stopped.
    fn sift(&self, k: usize, g: &Perm) -> (usize, Perm) {
        let mut g = g.clone();
        for (j, lv) in self.levels.iter().enumerate().skip(k) {
            let p = g.image(lv.base);
            match &lv.transversal[p as usize] {
                Some(u) => g = g.mul(&u.inverse()),
                None => return (j, g),
            }
        }
        (self.levels.len(), g)
    }

    fn extend(&mut self, k: usize, g: Perm) {
        let (stop, residue) = self.sift(k, &g);
        if stop == self.levels.len() && residue.is_identity() {
            return;
        }
        if k == self.levels.len() {
            let base = self.prefix.get(k).copied().or_else(|| g.first_moved()).expect("nonidentity");
            let lv = self.new_level(base);
            self.levels.push(lv);
        }
        let old_len = self.levels[k].orbit.len();
        self.levels[k].gens.push(g.clone());
        // grow the orbit: existing points under the new generator, new points under all
        let mut schreier = Vec::new();
        let mut idx = 0;
        while idx < self.levels[k].orbit.len() {
            let p = self.levels[k].orbit[idx];
            let gens: Vec<Perm> = if idx < old_len {
                vec![g.clone()]
            } else {
                self.levels[k].gens.clone()
            };
            for s in gens {
                let lv = &mut self.levels[k];
                let q = s.image(p);
                let up = lv.transversal[p as usize].clone().expect("orbit point");
                match &lv.transversal[q as usize] {
                    Some(uq) => {
                        let sg = up.mul(&s).mul(&uq.inverse());
                        if !sg.is_identity() {
                            schreier.push(sg);
                        }
                    }
                    None => {
                        lv.transversal[q as usize] = Some(up.mul(&s));
                        lv.orbit.push(q);
                    }
                }
            }
            idx += 1;
        }
        for sg in schreier {
            self.extend(k + 1, sg);
        }
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (stop, r) = self.sift(0, g);
        stop == self.levels.len() && r.is_identity()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().fold(1u128, |acc, lv| acc.checked_mul(lv.orbit.len() as u128).expect("group order exceeds u128"))
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Generators of the pointwise stabilizer of the first `k` base points.
    pub fn stabilizer_gens(&self, k: usize) -> Vec<Perm> {
        self.levels.get(k).map(|l| l.gens.clone()).unwrap_or_default()
    }

    /// Order of the pointwise stabilizer of the first `k` base points.
    pub fn stabilizer_order(&self, k: usize) -> u128 {
        self.levels.iter().skip(k).fold(1u128, |acc, lv| acc * lv.orbit.len() as u128)
    }

    fn sift_levels(&self, g: &Perm, upto: usize) -> Perm {
        let mut g = g.clone();
        for lv in self.levels.iter().take(upto) {
            let p = g.image(lv.base);
            if let Some(u) = &lv.transversal[p as usize] {
                g = g.mul(&u.inverse());
            }
        }
        g
    }
}

struct Elements {
    list: Vec<Perm>,
    index: HashMap<Perm, u32>,
    cayley: Option<Cayley>,
}

struct Cayley {
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl Elements {
    fn build(list: Vec<Perm>) -> Self {
        let index: HashMap<Perm, u32> = list.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        let n = list.len();
        let cayley = (n <= CAYLEY_LIMIT).then(|| {
            let mut mul = Vec::with_capacity(n * n);
            for a in &list {
                for b in &list {
                    mul.push(index[&a.mul(b)]);
                }
            }
            let inv = list.iter().map(|a| index[&a.inverse()]).collect();
            Cayley { mul, inv }
        });
        Elements { list, index, cayley }
    }
}

struct Inner {
    degree: usize,
    gens: Vec<Perm>,
    guard: usize,
    chain: OnceLock<StabChain>,
    elements: OnceLock<std::result::Result<Arc<Elements>, Error>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Nilpotency {
    Class(usize),
    NotNilpotent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngelClass {
    Class(usize),
    /// Some pair's Engel sequence has not reached 1 within the cap; `periodic`
    /// is set when the sequence was seen to cycle away from 1.
    ExceedsCap { witness: (Perm, Perm), periodic: bool },
}

/// A permutation group given by generators. Cheap to clone.
#[derive(Clone)]
pub struct PermGroup(Arc<Inner>);

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup").field("degree", &self.0.degree).field("gens", &self.0.gens).finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<Self> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::Argument(format!("generator of degree {} in a group of degree {degree}", g.degree())));
            }
        }
        Ok(PermGroup(Arc::new(Inner {
            degree,
            gens,
            guard: DEFAULT_GUARD,
            chain: OnceLock::new(),
            elements: OnceLock::new(),
        })))
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, vec![]).expect("no generators")
    }

    pub fn with_guard(self, guard: usize) -> Self {
        PermGroup(Arc::new(Inner {
            degree: self.0.degree,
            gens: self.0.gens.clone(),
            guard,
            chain: OnceLock::new(),
            elements: OnceLock::new(),
        }))
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.0.gens
    }

    pub fn guard(&self) -> usize {
        self.0.guard
    }

    pub fn identity(&self) -> Perm {
        Perm::identity(self.degree())
    }

    pub fn chain(&self) -> &StabChain {
        self.0.chain.get_or_init(|| StabChain::new(self.degree(), &self.0.gens, &[]))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn stabilizer_order(&self, point: u32) -> u128 {
        StabChain::new(self.degree(), self.generators(), &[point]).stabilizer_order(1)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain().contains(g)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators().iter().all(Perm::is_identity)
    }

    fn guard_error(&self) -> Error {
        Error::Guard { guard: self.guard() }
    }

    fn element_data(&self) -> Result<Arc<Elements>> {
        self.0
            .elements
            .get_or_init(|| {
                if self.order() > self.guard() as u128 {
                    return Err(self.guard_error());
                }
                let id = self.identity();
                let mut list = vec![id.clone()];
                let mut seen: std::collections::HashSet<Perm> = [id].into_iter().collect();
                let mut i = 0;
                while i < list.len() {
                    for g in self.generators() {
                        let h = list[i].mul(g);
                        if seen.insert(h.clone()) {
                            list.push(h);
                        }
                    }
                    i += 1;
                }
                Ok(Arc::new(Elements::build(list)))
            })
            .clone()
    }

    /// All elements in breadth-first order from the identity; refused above the guard.
    pub fn elements(&self) -> Result<Vec<Perm>> {
        Ok(self.element_data()?.list.clone())
    }

    pub fn subgroup(&self, gens: Vec<Perm>) -> Result<PermGroup> {
        Ok(PermGroup::new(self.degree(), gens)?.with_guard(self.guard()))
    }

    /// Smallest normal subgroup of `self` containing `gens`.
    pub fn normal_closure(&self, gens: &[Perm]) -> Result<PermGroup> {
        let mut ngens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut chain = StabChain::new(self.degree(), &ngens, &[]);
        let mut i = 0;
        while i < ngens.len() {
            for g in self.generators() {
                let c = ngens[i].conjugate_by(g);
                if !chain.contains(&c) {
                    chain.extend(0, c.clone());
                    ngens.push(c);
                }
            }
            i += 1;
        }
        let n = self.subgroup(ngens)?;
        let _ = n.0.chain.set(chain);
        Ok(n)
    }

    /// Subgroup generated greedily from a membership-closed element list.
    fn subgroup_of_elements(&self, elems: impl IntoIterator<Item = Perm>) -> Result<PermGroup> {
        let mut gens = Vec::new();
        let mut chain = StabChain::new(self.degree(), &[], &[]);
        for e in elems {
            if !chain.contains(&e) {
                chain.extend(0, e.clone());
                gens.push(e);
            }
        }
        let h = self.subgroup(gens)?;
        let _ = h.0.chain.set(chain);
        Ok(h)
    }

    pub fn intersection(&self, other: &PermGroup) -> Result<PermGroup> {
        if self.degree() != other.degree() {
            return Err(Error::Argument("intersection of groups of different degree".into()));
        }
        let (small, big) = if self.order() <= other.order() { (self, other) } else { (other, self) };
        let elems = small.elements()?;
        small.subgroup_of_elements(elems.into_iter().filter(|e| big.contains(e)))
    }

    pub fn center(&self) -> Result<PermGroup> {
        let elems = self.elements()?;
        let gens = self.generators();
        self.subgroup_of_elements(elems.into_iter().filter(|e| gens.iter().all(|g| e.mul(g) == g.mul(e))))
    }

    /// Centralizer of a subgroup, by element filtering.
    pub fn centralizer(&self, h: &PermGroup) -> Result<PermGroup> {
        let elems = self.elements()?;
        let hg = h.generators();
        self.subgroup_of_elements(elems.into_iter().filter(|e| hg.iter().all(|g| e.mul(g) == g.mul(e))))
    }

    /// `[H, K]` for subgroups normal in `self`.
    pub fn commutator_subgroup(&self, h: &PermGroup, k: &PermGroup) -> Result<PermGroup> {
        let mut comms = Vec::new();
        for a in h.generators() {
            for b in k.generators() {
                comms.push(a.commutator(b));
            }
        }
        self.normal_closure(&comms)
    }

    pub fn derived_subgroup(&self) -> Result<PermGroup> {
        self.commutator_subgroup(self, self)
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.generators();
        g.iter().enumerate().all(|(i, a)| g[i + 1..].iter().all(|b| a.mul(b) == b.mul(a)))
    }

    pub fn is_perfect(&self) -> Result<bool> {
        Ok(self.derived_subgroup()?.order() == self.order())
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.generators().iter().all(|g| other.contains(g))
    }

    pub fn is_normal_in(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other)
            && other.generators().iter().all(|g| self.generators().iter().all(|h| self.contains(&h.conjugate_by(g))))
    }

    /// `γ₁ = G, γᵢ₊₁ = [γᵢ, G]`, stopping when the order stabilizes.
    pub fn lower_central_series(&self) -> Result<Vec<PermGroup>> {
        let mut series = vec![self.clone()];
        loop {
            let last = series.last().expect("nonempty");
            if last.order() == 1 {
                return Ok(series);
            }
            let next = self.commutator_subgroup(last, self)?;
            if next.order() == last.order() {
                return Ok(series);
            }
            series.push(next);
        }
    }

    pub fn derived_series(&self) -> Result<Vec<PermGroup>> {
        let mut series = vec![self.clone()];
        loop {
            let last = series.last().expect("nonempty");
            let next = last.derived_subgroup()?;
            if next.order() == last.order() {
                return Ok(series);
            }
            series.push(next);
        }
    }

    /// Length of the lower central series down to 1 (0 for the trivial group).
    pub fn nilpotency_class(&self) -> Result<Nilpotency> {
        let s = self.lower_central_series()?;
        if s.last().expect("nonempty").order() == 1 {
            Ok(Nilpotency::Class(s.len() - 1))
        } else {
            Ok(Nilpotency::NotNilpotent)
        }
    }

    /// Permutation action on the right cosets of a normal subgroup: the regular
    /// representation of `self / n`. Element-set based.
    pub fn quotient(&self, n: &PermGroup) -> Result<PermGroup> {
        let data = self.element_data()?;
        let mut coset = vec![u32::MAX; data.list.len()];
        let mut reps: Vec<usize> = Vec::new();
        let nel = n.elements()?;
        for i in 0..data.list.len() {
            if coset[i] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(i);
            for x in &nel {
                let j = data.index[&x.mul(&data.list[i])];
                coset[j as usize] = id;
            }
        }
        let gens = self
            .generators()
            .iter()
            .map(|g| {
                Perm::from_images_unchecked(
                    reps.iter().map(|&r| coset[data.index[&data.list[r].mul(g)] as usize]).collect(),
                )
            })
            .collect();
        PermGroup::new(reps.len(), gens).map(|q| q.with_guard(self.guard()))
    }

    fn engel_sequence_hits(&self, data: &Elements, x: u32, y: u32, cap: usize) -> (Option<usize>, bool) {
        let c = data.cayley.as_ref().expect("cayley table");
        let n = data.list.len();
        let mul = |a: u32, b: u32| c.mul[a as usize * n + b as usize];
        let comm = |a: u32, b: u32| mul(mul(c.inv[a as usize], c.inv[b as usize]), mul(a, b));
        let id = data.index[&self.identity()];
        let mut g = comm(x, y);
        let mut seen = std::collections::HashSet::new();
        for k in 1..=cap {
            if g == id {
                return (Some(k), false);
            }
            if !seen.insert(g) {
                return (None, true);
            }
            g = comm(g, y);
        }
        (None, false)
    }

    fn engel_sequence_hits_slow(&self, x: &Perm, y: &Perm, cap: usize) -> (Option<usize>, bool) {
        let mut g = x.commutator(y);
        let mut seen = std::collections::HashSet::new();
        for k in 1..=cap {
            if g.is_identity() {
                return (Some(k), false);
            }
            if !seen.insert(g.clone()) {
                return (None, true);
            }
            g = g.commutator(y);
        }
        (None, false)
    }

    /// `[x, y, …, y]` with `n` copies of `y` is trivial for every pair.
    pub fn is_n_engel(&self, n: usize) -> Result<bool> {
        if n == 0 {
            return Ok(self.order() == 1);
        }
        Ok(match self.minimal_engel_class(n)? {
            EngelClass::Class(k) => k <= n,
            EngelClass::ExceedsCap { .. } => false,
        })
    }

    /// Least `n ≤ cap` for which the group is `n`-Engel. Exhaustive over ordered pairs.
    pub fn minimal_engel_class(&self, cap: usize) -> Result<EngelClass> {
        let data = self.element_data()?;
        let n = data.list.len();
        let mut worst = 1usize;
        for x in 0..n {
            for y in 0..n {
                let (hit, periodic) = if data.cayley.is_some() {
                    self.engel_sequence_hits(&data, x as u32, y as u32, cap)
                } else {
                    self.engel_sequence_hits_slow(&data.list[x], &data.list[y], cap)
                };
                match hit {
                    Some(k) => worst = worst.max(k),
                    None => {
                        return Ok(EngelClass::ExceedsCap {
                            witness: (data.list[x].clone(), data.list[y].clone()),
                            periodic,
                        })
                    }
                }
            }
        }
        Ok(EngelClass::Class(worst))
    }
}

/// Homomorphism given by images of the source generators. Well-definedness is
/// checked at construction: the graph subgroup `⟨(g, φ(g))⟩` must have the
/// order of the source.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: PermGroup,
    target: PermGroup,
    images: Vec<Perm>,
    graph_by_source: StabChain,
    graph_by_target: StabChain,
    source_moved: usize,
}

impl GroupHom {
    pub fn new(source: PermGroup, target: PermGroup, images: Vec<Perm>) -> Result<Self> {
        if images.len() != source.generators().len() {
            return Err(Error::NotHomomorphism(format!(
                "{} images for {} generators",
                images.len(),
                source.generators().len()
            )));
        }
        for im in &images {
            if im.degree() != target.degree() {
                return Err(Error::NotHomomorphism("image of the wrong degree".into()));
            }
        }
        let (ds, dt) = (source.degree(), target.degree());
        let graph: Vec<Perm> = source.generators().iter().zip(&images).map(|(g, h)| g.direct_sum(h)).collect();
        let src_pts: Vec<u32> = (0..ds as u32).filter(|&p| source.generators().iter().any(|g| g.image(p) != p)).collect();
        let tgt_pts: Vec<u32> =
            (0..dt as u32).filter(|&p| images.iter().any(|g| g.image(p) != p)).map(|p| p + ds as u32).collect();
        let graph_by_source = StabChain::new(ds + dt, &graph, &src_pts);
        if graph_by_source.order() != source.order() {
            return Err(Error::NotHomomorphism("generator images do not extend to a homomorphism".into()));
        }
        let graph_by_target = StabChain::new(ds + dt, &graph, &tgt_pts);
        Ok(GroupHom { source, target, images, graph_by_source, graph_by_target, source_moved: src_pts.len() })
    }

    pub fn source(&self) -> &PermGroup {
        &self.source
    }

    pub fn target(&self) -> &PermGroup {
        &self.target
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn apply(&self, x: &Perm) -> Result<Perm> {
        if !self.source.contains(x) {
            return Err(Error::Argument("element outside the source group".into()));
        }
        let ds = self.source.degree();
        let lifted = x.direct_sum(&Perm::identity(self.target.degree()));
        let r = self.graph_by_source.sift_levels(&lifted, self.source_moved);
        Ok(r.restrict(ds, self.target.degree()).inverse())
    }

    pub fn kernel(&self) -> Result<PermGroup> {
        let k = self.graph_by_target.base().len().min(
            self.graph_by_target.levels.iter().take_while(|l| l.base as usize >= self.source.degree()).count(),
        );
        let gens =
            self.graph_by_target.stabilizer_gens(k).iter().map(|g| g.restrict(0, self.source.degree())).collect();
        self.source.subgroup(gens)
    }

    pub fn image(&self) -> Result<PermGroup> {
        self.target.subgroup(self.images.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize, cycles: &[&[u32]]) -> Perm {
        Perm::from_cycles(n, cycles).unwrap()
    }

    fn sym(n: usize) -> PermGroup {
        let cyc: Vec<u32> = (0..n as u32).collect();
        PermGroup::new(n, vec![p(n, &[&[0, 1]]), p(n, &[&cyc])]).unwrap()
    }

    // Q8 as a regular permutation group on 8 points
    pub(crate) fn q8() -> PermGroup {
        let i = p(8, &[&[0, 1, 2, 3], &[4, 5, 6, 7]]);
        let j = p(8, &[&[0, 4, 2, 6], &[1, 7, 3, 5]]);
        PermGroup::new(8, vec![i, j]).unwrap()
    }

    fn brute_closure(g: &PermGroup) -> usize {
        let mut set = std::collections::BTreeSet::from([g.identity()]);
        loop {
            let mut grew = false;
            for a in set.clone() {
                for b in g.generators() {
                    grew |= set.insert(a.mul(b));
                }
            }
            if !grew {
                return set.len();
            }
        }
    }

    #[test]
    fn perm_basics() {
        let a = p(3, &[&[0, 1]]);
        let b = p(3, &[&[1, 2]]);
        assert_eq!(a.mul(&b).images(), &[2, 0, 1]);
        assert_eq!(a.mul(&b).order(), 3);
        assert!(a.pow(2).is_identity());
        assert_eq!(a.mul(&b).pow(-1), a.mul(&b).inverse());
        assert_eq!(a.mul(&b).to_string(), "(0,2,1)");
        assert!(Perm::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(PermGroup::trivial(5).order(), 1);
        for n in 2..8 {
            assert_eq!(sym(n).order(), (1..=n as u128).product::<u128>());
        }
        assert_eq!(q8().order(), 8);
        assert_eq!(brute_closure(&q8()), 8);
        assert_eq!(sym(12).order(), 479001600);
    }

    #[test]
    fn guard_is_enforced() {
        let g = sym(9).with_guard(1000);
        assert_eq!(g.elements().err(), Some(Error::Guard { guard: 1000 }));
        assert_eq!(sym(4).elements().unwrap().len(), 24);
    }

    #[test]
    fn subgroup_operations() {
        let q = q8();
        assert_eq!(q.center().unwrap().order(), 2);
        assert_eq!(q.derived_subgroup().unwrap().order(), 2);
        assert_eq!(q.intersection(&q).unwrap().order(), 8);
        let c4 = PermGroup::new(4, vec![p(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert_eq!(c4.derived_subgroup().unwrap().order(), 1);
        let s4 = sym(4);
        let a = s4.subgroup(vec![p(4, &[&[0, 1]])]).unwrap();
        assert_eq!(s4.normal_closure(a.generators()).unwrap().order(), 24);
        let v4 = s4.subgroup(vec![p(4, &[&[0, 1], &[2, 3]]), p(4, &[&[0, 2], &[1, 3]])]).unwrap();
        assert!(v4.is_normal_in(&s4));
        assert_eq!(s4.normal_closure(&[p(4, &[&[0, 1], &[2, 3]])]).unwrap().order(), 4);
        let s3 = s4.subgroup(vec![p(4, &[&[0, 1]]), p(4, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(s3.intersection(&v4).unwrap().order(), 1);
        assert_eq!(s4.quotient(&v4).unwrap().order(), 6);
    }

    #[test]
    fn series_and_nilpotency() {
        let c4 = PermGroup::new(4, vec![p(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert_eq!(c4.nilpotency_class().unwrap(), Nilpotency::Class(1));
        assert_eq!(q8().nilpotency_class().unwrap(), Nilpotency::Class(2));
        assert_eq!(sym(3).nilpotency_class().unwrap(), Nilpotency::NotNilpotent);
        let lcs = sym(3).lower_central_series().unwrap();
        assert_eq!(lcs.last().unwrap().order(), 3);
        assert_eq!(PermGroup::trivial(2).nilpotency_class().unwrap(), Nilpotency::Class(0));
        assert!(!sym(4).is_perfect().unwrap());
        let a5 = PermGroup::new(5, vec![p(5, &[&[0, 1, 2]]), p(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert!(a5.is_perfect().unwrap());
        assert_eq!(sym(4).derived_series().unwrap().len(), 4);
    }

    #[test]
    fn engel() {
        let c4 = PermGroup::new(4, vec![p(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert!(c4.is_n_engel(1).unwrap());
        assert_eq!(q8().minimal_engel_class(10).unwrap(), EngelClass::Class(2));
        assert!(q8().is_n_engel(2).unwrap());
        assert!(!q8().is_n_engel(1).unwrap());
        for cap in [1, 5, 50] {
            match sym(3).minimal_engel_class(cap).unwrap() {
                EngelClass::ExceedsCap { witness: (x, y), .. } => {
                    assert!(!x.commutator(&y).is_identity());
                }
                other => panic!("{other:?}"),
            }
        }
        // D8 has class 2 and is 2-Engel but not 1-Engel
        let d8 = PermGroup::new(4, vec![p(4, &[&[0, 1, 2, 3]]), p(4, &[&[1, 3]])]).unwrap();
        assert_eq!(d8.minimal_engel_class(10).unwrap(), EngelClass::Class(2));
    }

    #[test]
    fn engel_sequence_for_s3_is_periodic() {
        // a transposition and a 3-cycle
        let x = p(3, &[&[0, 1, 2]]);
        let y = p(3, &[&[0, 1]]);
        let mut g = x.commutator(&y);
        let mut seen = vec![];
        for _ in 0..10 {
            assert!(!g.is_identity());
            seen.push(g.clone());
            g = g.commutator(&y);
        }
        assert!(seen[2..].contains(&seen[1]) || seen[1..].contains(&seen[0]));
    }

    #[test]
    fn homomorphisms() {
        let s4 = sym(4);
        // sign map onto C2
        let c2 = PermGroup::new(2, vec![p(2, &[&[0, 1]])]).unwrap();
        let sign = GroupHom::new(s4.clone(), c2.clone(), vec![p(2, &[&[0, 1]]), p(2, &[&[0, 1]])]).unwrap();
        assert_eq!(sign.kernel().unwrap().order(), 12);
        assert_eq!(sign.image().unwrap().order(), 2);
        assert_eq!(sign.apply(&p(4, &[&[0, 1, 2]])).unwrap(), Perm::identity(2));
        assert_eq!(sign.apply(&p(4, &[&[0, 1, 2, 3]])).unwrap(), p(2, &[&[0, 1]]));
        // the 4-cycle cannot go to the identity while the transposition goes to the swap
        assert!(GroupHom::new(s4.clone(), c2, vec![p(2, &[&[0, 1]]), Perm::identity(2)]).is_err());
        let triv = GroupHom::new(s4.clone(), PermGroup::trivial(1), vec![Perm::identity(1); 2]).unwrap();
        assert_eq!(triv.kernel().unwrap().order(), 24);
        let id = GroupHom::new(s4.clone(), s4.clone(), s4.generators().to_vec()).unwrap();
        assert_eq!(id.kernel().unwrap().order(), 1);
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Perm> {
        Just((0..n as u32).collect::<Vec<u32>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn chain_order_matches_closure(gens in prop::collection::vec(perm_strategy(6), 1..3)) {
            let g = PermGroup::new(6, gens).unwrap();
            prop_assert_eq!(g.order(), brute_closure(&g) as u128);
            for e in g.elements().unwrap() {
                prop_assert!(g.contains(&e));
            }
        }

        #[test]
        fn kernel_times_image(gens in prop::collection::vec(perm_strategy(5), 1..3)) {
            // the action on unordered pairs is a homomorphism S5 -> S10
            let pairs: Vec<(u32, u32)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
            let on_pairs = |g: &Perm| {
                let imgs = pairs.iter().map(|&(a, b)| {
                    let (x, y) = (g.image(a), g.image(b));
                    pairs.iter().position(|&q| q == (x.min(y), x.max(y))).unwrap() as u32
                }).collect();
                Perm::from_images(imgs).unwrap()
            };
            let src = PermGroup::new(5, gens.clone()).unwrap();
            let images: Vec<Perm> = gens.iter().map(on_pairs).collect();
            let tgt = PermGroup::new(10, images.clone()).unwrap();
            let h = GroupHom::new(src.clone(), tgt, images).unwrap();
            prop_assert_eq!(src.order(), h.kernel().unwrap().order() * h.image().unwrap().order());
            for e in src.elements().unwrap().iter().take(20) {
                prop_assert_eq!(h.apply(e).unwrap(), on_pairs(e));
            }
        }

        #[test]
        fn normal_closure_is_normal(gens in prop::collection::vec(perm_strategy(5), 1..3), h in perm_strategy(5), c in perm_strategy(5)) {
            let g = PermGroup::new(5, gens.iter().cloned().chain([h.clone()]).collect()).unwrap();
            let n = g.normal_closure(std::slice::from_ref(&h)).unwrap();
            prop_assert!(n.contains(&h));
            if g.contains(&c) {
                for x in n.generators() {
                    prop_assert!(n.contains(&x.conjugate_by(&c)));
                }
            }
            prop_assert!(n.is_normal_in(&g));
        }
    }
}
