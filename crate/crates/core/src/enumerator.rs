//! Todd–Coxeter coset enumeration.
//!
//! Columns are letter codes: generator `i` is column `2i`, its inverse `2i+1`.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permgroups::{Perm, PermGroup, DEFAULT_GUARD};
use crate::presentations::Presentation;
use crate::words::{Alphabet, Word};

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Hlt,
    Felsch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationConfig {
    pub max_cosets: usize,
    pub strategy: Strategy,
    /// Scan without defining and compact before giving up on the budget.
    pub lookahead: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { max_cosets: DEFAULT_MAX_COSETS, strategy: Strategy::Hlt, lookahead: true }
    }
}

impl EnumerationConfig {
    pub fn with_max_cosets(max_cosets: usize) -> Self {
        EnumerationConfig { max_cosets, ..Default::default() }
    }
}

struct Enumeration {
    ncols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    queue: Vec<u32>,
    deductions: Vec<(u32, usize)>,
    track_deductions: bool,
}

impl Enumeration {
    fn new(ncols: usize) -> Self {
        let mut e = Enumeration {
            ncols,
            table: Vec::new(),
            parent: Vec::new(),
            live: 0,
            queue: Vec::new(),
            deductions: Vec::new(),
            track_deductions: false,
        };
        e.new_coset();
        e
    }

    fn total(&self) -> usize {
        self.parent.len()
    }

    fn new_coset(&mut self) -> u32 {
        let c = self.parent.len() as u32;
        self.parent.push(c);
        self.table.extend(std::iter::repeat_n(NONE, self.ncols));
        self.live += 1;
        c
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.ncols + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, v: u32) {
        self.table[c as usize * self.ncols + x] = v;
    }

    #[inline]
    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn find(&mut self, mut c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[c as usize] != root {
            let next = self.parent[c as usize];
            self.parent[c as usize] = root;
            c = next;
        }
        root
    }

    fn deduce(&mut self, c: u32, x: usize, d: u32) {
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        if self.track_deductions {
            self.deductions.push((c, x));
        }
    }

    fn define(&mut self, c: u32, x: usize) -> u32 {
        let d = self.new_coset();
        self.deduce(c, x, d);
        d
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi as usize] = lo;
        self.live -= 1;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        let mut qi = 0;
        while qi < self.queue.len() {
            let e = self.queue[qi];
            qi += 1;
            for x in 0..self.ncols {
                let f = self.get(e, x);
                if f == NONE {
                    continue;
                }
                if self.get(f, x ^ 1) == e {
                    self.set(f, x ^ 1, NONE);
                }
                let mu = self.find(e);
                let nu = self.find(f);
                let mx = self.get(mu, x);
                if mx != NONE {
                    self.merge(nu, mx);
                } else {
                    let nx = self.get(nu, x ^ 1);
                    if nx != NONE {
                        self.merge(mu, nx);
                    } else {
                        self.deduce(mu, x, nu);
                    }
                }
            }
        }
        self.queue.clear();
    }

    /// Trace `word` from `c` forwards and backwards; with `fill` undefined
    /// gaps are closed by new cosets, otherwise only deductions and
    /// coincidences are recorded.
    fn scan(&mut self, c: u32, word: &[usize], fill: bool) {
        if word.is_empty() {
            return;
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, word.len() - 1);
        loop {
            while i <= j {
                let n = self.get(f, word[i]);
                if n == NONE {
                    break;
                }
                f = n;
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            while j >= i {
                let n = self.get(b, word[j] ^ 1);
                if n == NONE {
                    break;
                }
                b = n;
                if j == 0 {
                    // whole word traced backwards
                    if f != b {
                        self.coincidence(f, b);
                    }
                    return;
                }
                j -= 1;
            }
            if j < i {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            if i == j {
                self.deduce(f, word[i], b);
                return;
            }
            if !fill {
                return;
            }
            self.define(f, word[i]);
        }
    }

    fn lookahead(&mut self, relators: &[Vec<usize>]) {
        let saved = self.track_deductions;
        self.track_deductions = false;
        for c in 0..self.total() as u32 {
            for r in relators {
                if !self.alive(c) {
                    break;
                }
                self.scan(c, r, false);
            }
        }
        self.track_deductions = saved;
    }

    /// Renumber live cosets `0..live` in discovery order; returns the old→new map.
    fn compact(&mut self) -> Vec<u32> {
        let mut map = vec![NONE; self.total()];
        let mut next = 0u32;
        for c in 0..self.total() {
            if self.parent[c] == c as u32 {
                map[c] = next;
                next += 1;
            }
        }
        let mut table = Vec::with_capacity(next as usize * self.ncols);
        for c in 0..self.total() {
            if map[c] == NONE {
                continue;
            }
            for x in 0..self.ncols {
                let v = self.table[c * self.ncols + x];
                table.push(if v == NONE { NONE } else { map[v as usize] });
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        self.live = next as usize;
        self.deductions = self
            .deductions
            .iter()
            .filter(|(c, _)| map[*c as usize] != NONE)
            .map(|&(c, x)| (map[c as usize], x))
            .collect();
        map
    }

    /// Called between coset scans. Returns the remapped scan position.
    fn safe_point(&mut self, pos: u32, relators: &[Vec<usize>], cfg: &EnumerationConfig) -> Result<u32> {
        let dead = self.total() - self.live;
        let over = self.live > cfg.max_cosets;
        if over && cfg.lookahead {
            self.lookahead(relators);
        }
        if over || dead > self.live.max(1024) {
            let map = self.compact();
            if self.live > cfg.max_cosets {
                return Err(Error::Overflow { budget: cfg.max_cosets });
            }
            // first live coset at or after the old position
            let p = (pos as usize..map.len()).map(|c| map[c]).find(|&m| m != NONE).unwrap_or(self.live as u32);
            return Ok(p);
        }
        Ok(pos)
    }
}

fn codes(alpha: &Alphabet, w: &Word) -> Result<Vec<usize>> {
    alpha.encode(w)
}

fn cyclic_conjugates_by_first(relators: &[Vec<usize>], ncols: usize) -> Vec<Vec<Vec<usize>>> {
    let mut by_first: Vec<Vec<Vec<usize>>> = vec![Vec::new(); ncols];
    for r in relators {
        let inv: Vec<usize> = r.iter().rev().map(|x| x ^ 1).collect();
        for w in [r, &inv] {
            for k in 0..w.len() {
                let rot: Vec<usize> = w[k..].iter().chain(&w[..k]).copied().collect();
                let bucket = &mut by_first[rot[0]];
                if !bucket.contains(&rot) {
                    bucket.push(rot);
                }
            }
        }
    }
    by_first
}

/// Enumerate the cosets of `⟨subgens⟩` in the group presented by `p`.
pub fn enumerate(p: &Presentation, subgens: &[Word], cfg: &EnumerationConfig) -> Result<CosetTable> {
    let alpha = p.alphabet().clone();
    let ncols = 2 * alpha.len();
    let relators: Vec<Vec<usize>> = p.relators().iter().map(|r| codes(&alpha, r)).collect::<Result<_>>()?;
    let subs: Vec<Vec<usize>> = subgens.iter().map(|w| codes(&alpha, w)).collect::<Result<_>>()?;

    let mut e = Enumeration::new(ncols);
    if ncols == 0 {
        return Ok(CosetTable::from_enumeration(alpha, subgens.to_vec(), e));
    }
    for s in &subs {
        e.scan(0, s, true);
    }
    match cfg.strategy {
        Strategy::Hlt => hlt(&mut e, &relators, cfg)?,
        Strategy::Felsch => felsch(&mut e, &relators, &subs, cfg)?,
    }
    e.compact();
    if e.live > cfg.max_cosets {
        return Err(Error::Overflow { budget: cfg.max_cosets });
    }
    let t = CosetTable::from_enumeration(alpha, subgens.to_vec(), e);
    debug_assert!(t.is_consistent(&relators));
    Ok(t)
}

fn hlt(e: &mut Enumeration, relators: &[Vec<usize>], cfg: &EnumerationConfig) -> Result<()> {
    let mut c = 0u32;
    while (c as usize) < e.total() {
        c = e.safe_point(c, relators, cfg)?;
        if c as usize >= e.total() {
            break;
        }
        if e.alive(c) {
            for r in relators {
                e.scan(c, r, true);
                if !e.alive(c) {
                    break;
                }
            }
            if e.alive(c) {
                for x in 0..e.ncols {
                    if e.get(c, x) == NONE {
                        e.define(c, x);
                    }
                }
            }
        }
        c += 1;
    }
    Ok(())
}

fn felsch(e: &mut Enumeration, relators: &[Vec<usize>], subs: &[Vec<usize>], cfg: &EnumerationConfig) -> Result<()> {
    let conj = cyclic_conjugates_by_first(relators, e.ncols);
    e.track_deductions = true;
    // the subgroup scans at coset 0 may already have produced entries
    e.deductions = (0..e.total() as u32)
        .flat_map(|c| (0..e.ncols).map(move |x| (c, x)))
        .filter(|&(c, x)| e.get(c, x) != NONE)
        .collect();
    let mut c = 0u32;
    loop {
        while let Some((d, x)) = e.deductions.pop() {
            let d = e.find(d);
            for r in &conj[x] {
                e.scan(d, r, false);
            }
            let d = e.find(d);
            let t = e.get(d, x);
            if t != NONE {
                for r in &conj[x ^ 1] {
                    e.scan(t, r, false);
                }
            }
        }
        // subgroup words stay closed at coset 0 through coincidences
        for s in subs {
            e.scan(0, s, false);
        }
        if !e.deductions.is_empty() {
            continue;
        }
        c = e.safe_point(c, relators, cfg)?;
        while (c as usize) < e.total() && (!e.alive(c) || (0..e.ncols).all(|x| e.get(c, x) != NONE)) {
            c += 1;
        }
        if c as usize >= e.total() {
            break;
        }
        let x = (0..e.ncols).find(|&x| e.get(c, x) == NONE).expect("open entry");
        e.define(c, x);
    }
    // deductions can be lost when an entry is overwritten in a coincidence;
    // finish with a full relator pass
    e.track_deductions = false;
    hlt(e, relators, cfg)
}

/// A closed coset table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    alphabet: Alphabet,
    n_cosets: usize,
    table: Vec<u32>,
    subgroup_words: Vec<Word>,
}

impl CosetTable {
    fn from_enumeration(alphabet: Alphabet, subgroup_words: Vec<Word>, e: Enumeration) -> Self {
        CosetTable { alphabet, n_cosets: e.live, table: e.table, subgroup_words }
    }

    pub fn n_cosets(&self) -> usize {
        self.n_cosets
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn subgroup_words(&self) -> &[Word] {
        &self.subgroup_words
    }

    fn ncols(&self) -> usize {
        2 * self.alphabet.len()
    }

    /// Image of coset `c` under column `x`.
    pub fn action(&self, c: usize, x: usize) -> usize {
        self.table[c * self.ncols() + x] as usize
    }

    pub fn trace(&self, c: usize, w: &Word) -> Result<usize> {
        let mut c = c;
        for x in self.alphabet.encode(w)? {
            c = self.action(c, x);
        }
        Ok(c)
    }

    fn trace_codes(&self, c: usize, w: &[usize]) -> usize {
        w.iter().fold(c, |c, &x| self.action(c, x))
    }

    fn is_consistent(&self, relators: &[Vec<usize>]) -> bool {
        (0..self.n_cosets).all(|c| {
            (0..self.ncols()).all(|x| {
                let d = self.action(c, x);
                d < self.n_cosets && self.action(d, x ^ 1) == c
            }) && relators.iter().all(|r| self.trace_codes(c, r) == c)
        })
    }

    /// Every relator fixes every coset and coset 0 is fixed by the subgroup words.
    pub fn verify(&self, p: &Presentation) -> bool {
        let Ok(rels) = p.relators().iter().map(|r| self.alphabet.encode(r)).collect::<Result<Vec<_>>>() else {
            return false;
        };
        self.is_consistent(&rels) && self.subgroup_words.iter().all(|w| self.trace(0, w) == Ok(0))
    }

    /// Shortest-first representative for each coset (breadth-first, column order).
    pub fn coset_representatives(&self) -> Vec<Word> {
        let mut reps: Vec<Option<Word>> = vec![None; self.n_cosets];
        reps[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for x in 0..self.ncols() {
                let d = self.action(c, x);
                if reps[d].is_none() {
                    let w = reps[c].as_ref().expect("visited").mul(&Word::symbol(self.alphabet.symbol_of_code(x)));
                    reps[d] = Some(w);
                    queue.push_back(d);
                }
            }
        }
        reps.into_iter().map(|w| w.expect("coset table is connected")).collect()
    }

    /// Permutation of cosets induced by generator `i`.
    pub fn generator_perm(&self, i: usize) -> Perm {
        Perm::from_images_unchecked((0..self.n_cosets).map(|c| self.action(c, 2 * i) as u32).collect())
    }

    pub fn perm_realization(&self) -> PermGroup {
        self.perm_realization_with_guard(DEFAULT_GUARD)
    }

    pub fn perm_realization_with_guard(&self, guard: usize) -> PermGroup {
        let gens = (0..self.alphabet.len()).map(|i| self.generator_perm(i)).collect();
        PermGroup::new(self.n_cosets, gens).expect("coset permutations are valid").with_guard(guard)
    }

    /// Induced action of a word (right action: letters applied left to right).
    pub fn word_image(&self, w: &Word) -> Result<Perm> {
        let code = self.alphabet.encode(w)?;
        Ok(Perm::from_images_unchecked((0..self.n_cosets).map(|c| self.trace_codes(c, &code) as u32).collect()))
    }

    /// `{n_cosets, action: {generator: one-line 0-based image array}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut action = BTreeMap::new();
        for (i, g) in self.alphabet.generators().iter().enumerate() {
            let imgs: Vec<usize> = (0..self.n_cosets).map(|c| self.action(c, 2 * i)).collect();
            action.insert(g.to_string(), imgs);
        }
        serde_json::json!({ "n_cosets": self.n_cosets, "action": action })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{sidki_double, WitnessPolicy};
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, Just, ProptestConfig, Strategy as _};

    fn pres(s: &str) -> Presentation {
        Presentation::parse(s).unwrap()
    }

    fn order(s: &str, strategy: Strategy) -> usize {
        let cfg = EnumerationConfig { strategy, ..Default::default() };
        let p = pres(s);
        let t = enumerate(&p, &[], &cfg).unwrap();
        assert!(t.verify(&p), "{s}");
        t.n_cosets()
    }

    const S3: &str = "<a,b | a^2, b^2, (a*b)^3>";

    // multiplication-table oracle: closure of S3 as permutations of {0,1,2}
    fn s3_oracle() -> usize {
        let a = [1usize, 0, 2];
        let b = [0usize, 2, 1];
        let mut set = std::collections::BTreeSet::from([[0usize, 1, 2]]);
        let mut frontier = vec![[0usize, 1, 2]];
        while let Some(p) = frontier.pop() {
            for g in [a, b] {
                let q = [g[p[0]], g[p[1]], g[p[2]]];
                if set.insert(q) {
                    frontier.push(q);
                }
            }
        }
        set.len()
    }

    #[test]
    fn small_orders() {
        for s in [Strategy::Hlt, Strategy::Felsch] {
            assert_eq!(order("<a|a^3>", s), 3);
            assert_eq!(order(S3, s), s3_oracle());
            assert_eq!(order("<a,b|a^4, a^2 b^-2, b^-1 a b a>", s), 8);
            assert_eq!(order("<a,b|a^2,b^2,(a b)^4>", s), 8);
            assert_eq!(order("<a,b|a^2,b^3,(a b)^5>", s), 60);
            assert_eq!(order("<|>", s), 1);
            assert_eq!(order("<a,b|a,b>", s), 1);
        }
    }

    #[test]
    fn subgroup_index() {
        let p = pres(S3);
        let t = enumerate(&p, &[p.parse_word("a").unwrap()], &EnumerationConfig::default()).unwrap();
        assert_eq!(t.n_cosets(), 3);
        assert!(t.verify(&p));
        let t = enumerate(&p, &[p.parse_word("a*b").unwrap()], &EnumerationConfig::default()).unwrap();
        assert_eq!(t.n_cosets(), 2);
    }

    #[test]
    fn overflow_on_infinite_group() {
        let cfg = EnumerationConfig::with_max_cosets(200);
        for strategy in [Strategy::Hlt, Strategy::Felsch] {
            let cfg = EnumerationConfig { strategy, ..cfg.clone() };
            assert_eq!(enumerate(&pres("<a,b|[a,b]>"), &[], &cfg), Err(Error::Overflow { budget: 200 }));
        }
    }

    #[test]
    fn budget_exactly_fits() {
        let cfg = EnumerationConfig::with_max_cosets(6);
        assert_eq!(enumerate(&pres(S3), &[], &cfg).unwrap().n_cosets(), 6);
        let cfg = EnumerationConfig::with_max_cosets(5);
        assert!(enumerate(&pres(S3), &[], &cfg).is_err());
    }

    #[test]
    fn double_of_c2() {
        let cfg = EnumerationConfig::default();
        let d = sidki_double(&pres("<a|a^2>"), WitnessPolicy::AllElements, &cfg).unwrap();
        let t = enumerate(&d, &[], &cfg).unwrap();
        assert_eq!(t.n_cosets(), 4);
        let id = Perm::identity(4);
        assert_eq!(t.word_image(&d.parse_word("[a, a~]").unwrap()).unwrap(), id);
        let x = t.word_image(&d.parse_word("a a~").unwrap()).unwrap();
        assert_ne!(x, id);
        assert_eq!(x.pow(2), id);
    }

    #[test]
    fn word_image_of_relator() {
        let p = pres("<a|a^3>");
        let t = enumerate(&p, &[], &EnumerationConfig::default()).unwrap();
        assert!(t.word_image(&p.parse_word("a^3").unwrap()).unwrap().is_identity());
        assert_eq!(t.perm_realization().order(), 3);
    }

    #[test]
    fn representatives_trace_to_their_cosets() {
        let p = pres(S3);
        let t = enumerate(&p, &[], &EnumerationConfig::default()).unwrap();
        for (c, w) in t.coset_representatives().iter().enumerate() {
            assert_eq!(t.trace(0, w).unwrap(), c);
        }
        assert_eq!(t.coset_representatives()[0], Word::identity());
    }

    #[test]
    fn realization_is_regular() {
        let p = pres("<a,b|a^2,b^2,(a b)^4>");
        let t = enumerate(&p, &[], &EnumerationConfig::default()).unwrap();
        let g = t.perm_realization();
        assert_eq!(g.order(), t.n_cosets() as u128);
        // free on the orbit of coset 0: only the identity fixes it
        assert_eq!(g.stabilizer_order(0), 1);
    }

    #[test]
    fn json_export() {
        let t = enumerate(&pres("<a|a^3>"), &[], &EnumerationConfig::default()).unwrap();
        assert_eq!(t.to_json().to_string(), r#"{"n_cosets":3,"action":{"a":[1,2,0]}}"#);
    }

    #[test]
    fn deterministic_tables() {
        let p = pres("<a,b|a^2,b^3,(a b)^5>");
        let cfg = EnumerationConfig::default();
        assert_eq!(enumerate(&p, &[], &cfg).unwrap(), enumerate(&p, &[], &cfg).unwrap());
    }

    #[test]
    fn triple_product_of_s3() {
        let s3 = pres(S3);
        let p = Presentation::direct_product(&Presentation::direct_product(&s3, &s3).unwrap(), &s3).unwrap();
        assert_eq!(enumerate(&p, &[], &EnumerationConfig::default()).unwrap().n_cosets(), 216);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn relator_order_does_not_matter(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(), felsch in any::<bool>()) {
            let base = pres("<a,b|a^4, b^2, (a b)^2, [a^2, b]>");
            let rels: Vec<Word> = perm.iter().map(|&i| base.relators()[i].clone()).collect();
            let p = Presentation::new(base.generators().to_vec(), rels).unwrap();
            let strategy = if felsch { Strategy::Felsch } else { Strategy::Hlt };
            let t = enumerate(&p, &[], &EnumerationConfig { strategy, ..Default::default() }).unwrap();
            prop_assert_eq!(t.n_cosets(), 8);
            prop_assert!(t.verify(&p));
        }
    }
}
