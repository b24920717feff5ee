//! Word problem for `𝔛(G)` from a word-problem oracle for `G`, and growth
//! data from equality oracles.
//!
//! A word first goes through `ρ`: a nontrivial coordinate settles it.
//! Otherwise it lies in `W = ker ρ`, and two searches run lap by lap, one
//! for a product-of-conjugates certificate and one for a finite quotient of
//! `𝔛(G)` in which the word survives.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enumerator::{enumerate, CosetTable, EnumerationConfig};
use crate::error::{Error, Result};
use crate::isoperimetry::{minimal_area_search_capped, reduced_words_up_to, AreaCertificate, AreaSearch};
use crate::permgroups::{Perm, PermGroup};
use crate::presentations::{sidki_double, Presentation, WitnessPolicy};
use crate::words::{Alphabet, Word};

/// A total, sound decision procedure for triviality over a fixed alphabet.
pub trait WPOracle: Send + Sync {
    fn alphabet(&self) -> &Alphabet;
    fn is_trivial(&self, w: &Word) -> Result<bool>;

    fn equal(&self, u: &Word, v: &Word) -> Result<bool> {
        self.is_trivial(&u.mul(&v.inverse()))
    }
}

/// Finite group given by a completed coset table over the trivial subgroup.
pub struct FiniteOracle {
    table: CosetTable,
}

impl FiniteOracle {
    pub fn new(p: &Presentation, cfg: &EnumerationConfig) -> Result<Self> {
        Ok(FiniteOracle { table: enumerate(p, &[], cfg)? })
    }

    pub fn from_table(table: CosetTable) -> Self {
        FiniteOracle { table }
    }

    pub fn order(&self) -> usize {
        self.table.n_cosets()
    }
}

impl WPOracle for FiniteOracle {
    fn alphabet(&self) -> &Alphabet {
        self.table.alphabet()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.table.word_image(w)?.is_identity())
    }
}

/// Free group: free reduction is the normal form.
pub struct FreeOracle {
    alphabet: Alphabet,
}

impl FreeOracle {
    pub fn new(alphabet: Alphabet) -> Self {
        FreeOracle { alphabet }
    }
}

impl WPOracle for FreeOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        self.alphabet.check(w)?;
        Ok(w.is_identity())
    }
}

/// Free abelian group on the alphabet: exponent sums are the normal form.
pub struct FreeAbelianOracle {
    alphabet: Alphabet,
}

impl FreeAbelianOracle {
    pub fn new(alphabet: Alphabet) -> Self {
        FreeAbelianOracle { alphabet }
    }
}

impl WPOracle for FreeAbelianOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(w.exponent_sums(&self.alphabet)?.iter().all(|&e| e == 0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TrivialWitness {
    /// Image in a faithful permutation realization is the identity.
    Realization { degree: usize },
    Certificate(AreaCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NontrivialWitness {
    /// Coordinate `0`, `1` or `2` of `ρ(w)` is nontrivial in `G`.
    RhoCoordinate { coordinate: usize, image: Word },
    Realization { degree: usize },
    /// A finite quotient of `𝔛(G)` in which `w` survives.
    Quotient { source: String, images: Vec<Perm> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BudgetRecord {
    pub laps: usize,
    pub max_area: usize,
    pub max_radius: usize,
    pub max_degree: usize,
    pub quotients_tried: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Trivial(TrivialWitness),
    Nontrivial(NontrivialWitness),
    Unknown(BudgetRecord),
}

impl Verdict {
    pub fn is_trivial(&self) -> Option<bool> {
        match self {
            Verdict::Trivial(_) => Some(true),
            Verdict::Nontrivial(_) => Some(false),
            Verdict::Unknown(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WpBudget {
    /// Lap `k` searches certificates of area `≤ k+1`, radius `≤ k`, and
    /// quotients of degree `≤ 2^{k+1}`.
    pub laps: usize,
    /// Largest set of partial products the certificate search may hold.
    pub layer_cap: usize,
}

impl Default for WpBudget {
    fn default() -> Self {
        WpBudget { laps: 6, layer_cap: 200_000 }
    }
}

impl WpBudget {
    pub fn laps(laps: usize) -> Self {
        WpBudget { laps, ..Default::default() }
    }
}

/// A permutation image of the double's generators satisfying its relators
/// and `[u, ū] = 1` for every `u`.
#[derive(Clone, Debug)]
struct Quotient {
    source: String,
    images: Vec<Perm>,
    /// The enumeration was over the trivial subgroup, so the image is faithful.
    exact: bool,
}

fn eval_perms(alphabet: &Alphabet, images: &[Perm], w: &Word) -> Result<Perm> {
    let degree = images.first().map_or(1, Perm::degree);
    let mut p = Perm::identity(degree);
    for s in w.letters() {
        let i = alphabet.index_of(s.generator()).ok_or_else(|| Error::Alphabet(s.generator().to_string()))?;
        p = if s.sign() > 0 { p.mul(&images[i]) } else { p.mul(&images[i].inverse()) };
    }
    Ok(p)
}

const QUOTIENT_GUARD: usize = 20_000;

pub struct XgSolver {
    base: Presentation,
    oracle: Arc<dyn WPOracle>,
    double: Presentation,
    realization: Option<CosetTable>,
    /// `(barred index, unbarred index)` in the double for each base generator.
    pairs: Vec<(usize, usize)>,
    quotients: Mutex<Vec<Arc<Vec<Quotient>>>>,
    seed: u64,
}

impl XgSolver {
    pub fn new(base: Presentation, oracle: Arc<dyn WPOracle>, double: Presentation) -> Result<Self> {
        if oracle.alphabet() != base.alphabet() {
            return Err(Error::Argument("oracle alphabet differs from the base presentation".into()));
        }
        let mut pairs = Vec::new();
        for g in base.generators() {
            let i = double.alphabet().index_of(g).ok_or_else(|| Error::Alphabet(g.to_string()))?;
            let j = double.alphabet().index_of(&g.bar()).ok_or_else(|| Error::Alphabet(g.bar().to_string()))?;
            pairs.push((i, j));
        }
        if double.generators().len() != 2 * pairs.len() {
            return Err(Error::Argument("double must be generated by X ∪ X̄".into()));
        }
        Ok(XgSolver { base, oracle, double, realization: None, pairs, quotients: Mutex::new(Vec::new()), seed: 0x5eed })
    }

    /// Finite `G`: table oracle, full double, and its realization when the
    /// enumeration fits in `cfg`.
    pub fn finite(base: &Presentation, cfg: &EnumerationConfig) -> Result<Self> {
        let oracle = Arc::new(FiniteOracle::new(base, cfg)?);
        let double = sidki_double(base, WitnessPolicy::AllElements, cfg)?;
        let realization = match enumerate(&double, &[], cfg) {
            Ok(t) => Some(t),
            Err(Error::Overflow { .. }) => None,
            Err(e) => return Err(e),
        };
        let mut s = XgSolver::new(base.clone(), oracle, double)?;
        s.realization = realization;
        Ok(s)
    }

    pub fn without_realization(mut self) -> Self {
        self.realization = None;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn base(&self) -> &Presentation {
        &self.base
    }

    pub fn double(&self) -> &Presentation {
        &self.double
    }

    pub fn has_realization(&self) -> bool {
        self.realization.is_some()
    }

    pub fn decide(&self, w: &Word, budget: WpBudget) -> Result<Verdict> {
        self.double.alphabet().check(w)?;
        for (i, image) in w.rho().into_iter().enumerate() {
            if !self.oracle.is_trivial(&image)? {
                return Ok(Verdict::Nontrivial(NontrivialWitness::RhoCoordinate { coordinate: i, image }));
            }
        }
        if let Some(t) = &self.realization {
            let degree = t.n_cosets();
            return Ok(if t.word_image(w)?.is_identity() {
                Verdict::Trivial(TrivialWitness::Realization { degree })
            } else {
                Verdict::Nontrivial(NontrivialWitness::Realization { degree })
            });
        }
        let mut tried = 0;
        for k in 0..budget.laps {
            let (cert, quot) = rayon::join(
                || minimal_area_search_capped(&self.double, w, k + 1, k, budget.layer_cap),
                || -> Result<(Option<Verdict>, usize)> {
                    let qs = self.lap_quotients(k)?;
                    for q in qs.iter() {
                        let img = eval_perms(self.double.alphabet(), &q.images, w)?;
                        if !img.is_identity() {
                            let wit = NontrivialWitness::Quotient { source: q.source.clone(), images: q.images.clone() };
                            return Ok((Some(Verdict::Nontrivial(wit)), qs.len()));
                        }
                        if q.exact {
                            let degree = img.degree();
                            return Ok((Some(Verdict::Trivial(TrivialWitness::Realization { degree })), qs.len()));
                        }
                    }
                    Ok((None, qs.len()))
                },
            );
            if let AreaSearch::Minimum { certificate, .. } = cert? {
                return Ok(Verdict::Trivial(TrivialWitness::Certificate(certificate)));
            }
            let (v, n) = quot?;
            tried += n;
            if let Some(v) = v {
                return Ok(v);
            }
        }
        let laps = budget.laps;
        Ok(Verdict::Unknown(BudgetRecord {
            laps,
            max_area: laps,
            max_radius: laps.saturating_sub(1),
            max_degree: if laps == 0 { 0 } else { 1 << laps },
            quotients_tried: tried,
        }))
    }

    fn lap_quotients(&self, k: usize) -> Result<Arc<Vec<Quotient>>> {
        let mut cache = self.quotients.lock().expect("quotient cache poisoned");
        while cache.len() <= k {
            let lap = cache.len();
            let mut seen: HashSet<Vec<Perm>> =
                cache.iter().flat_map(|qs| qs.iter().map(|q| q.images.clone())).collect();
            let found = self.find_quotients(lap, &mut seen)?;
            cache.push(Arc::new(found));
        }
        // later laps also retry everything found before
        let all: Vec<Quotient> = cache[..=k].iter().flat_map(|qs| qs.iter().cloned()).collect();
        Ok(Arc::new(all))
    }

    fn find_quotients(&self, lap: usize, seen: &mut HashSet<Vec<Perm>>) -> Result<Vec<Quotient>> {
        let degree = 1usize << (lap + 1);
        let alpha = self.double.alphabet();
        let mut out = Vec::new();
        let cfg = EnumerationConfig::with_max_cosets(4 * degree);
        let words = reduced_words_up_to(alpha, lap.min(2));
        for u in words.iter().take(8 * (lap + 1)) {
            let sub: Vec<Word> = if u.is_identity() { vec![] } else { vec![u.clone()] };
            match enumerate(&self.double, &sub, &cfg) {
                Ok(t) if t.n_cosets() <= degree => {
                    let images: Vec<Perm> = (0..alpha.len()).map(|i| t.generator_perm(i)).collect();
                    if seen.insert(images.clone()) && self.weakly_commutative(&images)? {
                        out.push(Quotient { source: format!("cosets of <{u}>"), images, exact: u.is_identity() });
                    }
                }
                Ok(_) | Err(Error::Overflow { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (lap as u64).wrapping_mul(0x9e37_79b9));
        for d in 2..=degree.min(7) {
            for _ in 0..32 {
                let images: Vec<Perm> = (0..alpha.len())
                    .map(|_| {
                        let mut v: Vec<u32> = (0..d as u32).collect();
                        v.shuffle(&mut rng);
                        Perm::from_images(v).expect("shuffled identity is a permutation")
                    })
                    .collect();
                let ok = self
                    .double
                    .relators()
                    .iter()
                    .map(|r| eval_perms(alpha, &images, r).map(|p| p.is_identity()))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .all(|b| b);
                if ok && seen.insert(images.clone()) && self.weakly_commutative(&images)? {
                    out.push(Quotient { source: format!("random degree {d}"), images, exact: false });
                }
            }
        }
        Ok(out)
    }

    /// `[u, ū] = 1` for every `u ∈ F(X)`: check it on the finite image of
    /// `u ↦ (u, ū)`. Quotients too large to check are dropped.
    fn weakly_commutative(&self, images: &[Perm]) -> Result<bool> {
        let d = images[0].degree();
        let gens: Vec<Perm> = self.pairs.iter().map(|&(i, j)| images[i].direct_sum(&images[j])).collect();
        let h = PermGroup::new(2 * d, gens)?.with_guard(QUOTIENT_GUARD);
        let elems = match h.elements() {
            Ok(e) => e,
            Err(Error::Guard { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        Ok(elems.iter().all(|e| {
            let (p, q) = (e.restrict(0, d), e.restrict(d, d));
            p.mul(&q) == q.mul(&p)
        }))
    }
}

/// One-shot wrapper around [`XgSolver::decide`].
pub fn xg_word_problem(solver: &XgSolver, w: &Word, budget: WpBudget) -> Result<Verdict> {
    solver.decide(w, budget)
}

/// `|B(n)|` for `n = 0..=radius`, deduplicating each new word against every
/// element found so far with the equality oracle. `Ok(None)` from the oracle
/// aborts with the sizes computed so far.
pub fn ball_sizes(
    gens: &[Word],
    equal: impl Fn(&Word, &Word) -> Result<Option<bool>>,
    radius: usize,
) -> Result<Vec<usize>> {
    let mut elements = vec![Word::identity()];
    let mut sphere = vec![Word::identity()];
    let mut sizes = vec![1];
    for _ in 0..radius {
        let mut next = Vec::new();
        for u in &sphere {
            for g in gens {
                let v = u.mul(g);
                let mut new = true;
                for e in elements.iter().chain(&next) {
                    match equal(&v, e)? {
                        Some(true) => {
                            new = false;
                            break;
                        }
                        Some(false) => {}
                        None => return Err(Error::PartialResult(sizes)),
                    }
                }
                if new {
                    next.push(v);
                }
            }
        }
        elements.extend(next.iter().cloned());
        sizes.push(elements.len());
        sphere = next;
    }
    Ok(sizes)
}

/// Ball sizes computed directly on permutation images of the generators.
pub fn ball_sizes_realized(gens: &[Perm], radius: usize) -> Vec<usize> {
    let Some(first) = gens.first() else {
        return vec![1; radius + 1];
    };
    let id = Perm::identity(first.degree());
    let mut seen: HashMap<Perm, ()> = HashMap::from([(id.clone(), ())]);
    let mut sphere = vec![id];
    let mut sizes = vec![1];
    for _ in 0..radius {
        let mut next = Vec::new();
        for u in &sphere {
            for g in gens {
                let v = u.mul(g);
                if seen.insert(v.clone(), ()).is_none() {
                    next.push(v);
                }
            }
        }
        sizes.push(seen.len());
        sphere = next;
    }
    sizes
}

/// The given generators together with their formal inverses, deduplicated.
pub fn symmetrize(gens: &[Word]) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    for g in gens {
        for w in [g.clone(), g.inverse()] {
            if !w.is_identity() && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Growth {
    PolynomialDegree(u32),
    ExponentialRate(f64),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthClassification {
    pub growth: Growth,
    /// Always set: a finite ball sequence cannot decide a growth type.
    pub heuristic: bool,
    pub slope: Option<f64>,
}

/// Classify from ball sizes `|B(0)|, …, |B(R)|`.
///
/// Constant upper half gives degree 0. Successive ratios on the upper half
/// that are all at least 1.5 and within 0.2 of each other give exponential
/// growth at their geometric mean. Otherwise a least-squares slope of
/// `log |B(n)|` against `log n` on the upper half is rounded when it is
/// within 0.3 of an integer.
pub fn growth_classifier(sizes: &[usize]) -> Result<GrowthClassification> {
    if sizes.len() < 4 {
        return Err(Error::Argument(format!("need at least 4 ball sizes, got {}", sizes.len())));
    }
    let r = sizes.len() - 1;
    let lo = (r / 2).max(1);
    let upper: Vec<(f64, f64)> = (lo..=r).map(|n| (n as f64, sizes[n] as f64)).collect();
    let h = |growth, slope| Ok(GrowthClassification { growth, heuristic: true, slope });
    if upper.iter().all(|&(_, s)| s == upper[0].1) {
        return h(Growth::PolynomialDegree(0), Some(0.0));
    }
    let ratios: Vec<f64> = (lo + 1..=r).map(|n| sizes[n] as f64 / sizes[n - 1] as f64).collect();
    let (min, max) = ratios.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    if min >= 1.5 && max - min <= 0.2 {
        let mean = (ratios.iter().map(|x| x.ln()).sum::<f64>() / ratios.len() as f64).exp();
        return h(Growth::ExponentialRate(mean), None);
    }
    let pts: Vec<(f64, f64)> = upper.iter().map(|&(n, s)| (n.ln(), s.ln())).collect();
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return h(Growth::Inconclusive, None);
    }
    let slope = sxy / sxx;
    let d = slope.round();
    if d >= 0.0 && (slope - d).abs() < 0.3 {
        h(Growth::PolynomialDegree(d as u32), Some(slope))
    } else {
        h(Growth::Inconclusive, Some(slope))
    }
}

/// `{generators, radii, sizes, classification, heuristic_flag}`.
pub fn growth_report(gens: &[Word], sizes: &[usize]) -> Result<serde_json::Value> {
    let c = growth_classifier(sizes)?;
    let classification = match c.growth {
        Growth::PolynomialDegree(d) => serde_json::json!({ "type": "polynomial", "degree": d }),
        Growth::ExponentialRate(x) => serde_json::json!({ "type": "exponential", "rate": (x * 1e6).round() / 1e6 }),
        Growth::Inconclusive => serde_json::json!({ "type": "inconclusive" }),
    };
    Ok(serde_json::json!({
        "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "radii": (0..sizes.len()).collect::<Vec<_>>(),
        "sizes": sizes,
        "classification": classification,
        "heuristic_flag": c.heuristic,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_word;
    use crate::words::Generator;

    fn solver(p: &str) -> XgSolver {
        XgSolver::finite(&Presentation::parse(p).unwrap(), &EnumerationConfig::default()).unwrap()
    }

    #[test]
    fn c2_examples() {
        let s = solver("<a | a^2>");
        let alpha = s.double().alphabet().clone();
        let w = parse_word("[a, a~]", &alpha).unwrap();
        assert_eq!(s.decide(&w, WpBudget::default()).unwrap().is_trivial(), Some(true));
        let w = parse_word("a a~", &alpha).unwrap();
        match s.decide(&w, WpBudget::default()).unwrap() {
            Verdict::Nontrivial(NontrivialWitness::RhoCoordinate { coordinate: 0, image }) => {
                assert_eq!(image.to_string(), "a")
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn c2_without_realization_uses_certificates() {
        let s = solver("<a | a^2>").without_realization();
        let alpha = s.double().alphabet().clone();
        let w = parse_word("[a, a~]", &alpha).unwrap();
        match s.decide(&w, WpBudget::default()).unwrap() {
            Verdict::Trivial(TrivialWitness::Certificate(c)) => assert_eq!(c.area(), 1),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn s3_d_commutes_with_l() {
        let s = solver("<a, b | a^2, b^2, (a b)^3>");
        let alpha = s.double().alphabet().clone();
        for (g, h, k) in [("a", "a", "b"), ("b", "a", "a"), ("a", "b", "b")] {
            let w = parse_word(&format!("[{g}^-1 {g}~, [{h}, {k}~]]"), &alpha).unwrap();
            assert_eq!(s.decide(&w, WpBudget::default()).unwrap().is_trivial(), Some(true));
        }
    }

    #[test]
    fn s3_quotient_branch_is_exact_at_full_degree() {
        // W is trivial for S3, so anything past ρ is trivial; the enumeration
        // over the trivial subgroup settles it once the degree reaches 108.
        let s = solver("<a, b | a^2, b^2, (a b)^3>").without_realization();
        let alpha = s.double().alphabet().clone();
        let w = parse_word("[a^-1 a~, [a, b~]]", &alpha).unwrap();
        let v = s.decide(&w, WpBudget { laps: 7, layer_cap: 20_000 }).unwrap();
        assert_eq!(v.is_trivial(), Some(true));
    }

    #[test]
    fn free_oracles() {
        let a = Generator::new("a").unwrap();
        let b = Generator::new("b").unwrap();
        let alpha = Alphabet::new([a.clone(), b.clone()]).unwrap();
        let comm = Word::commutator(&Word::gen(&a), &Word::gen(&b));
        assert!(!FreeOracle::new(alpha.clone()).is_trivial(&comm).unwrap());
        assert!(FreeAbelianOracle::new(alpha).is_trivial(&comm).unwrap());
    }

    #[test]
    fn z2_balls() {
        let a = Generator::new("a").unwrap();
        let alpha = Alphabet::new([a.clone(), a.bar()]).unwrap();
        let o = FreeAbelianOracle::new(alpha);
        let gens = symmetrize(&[Word::gen(&a), Word::gen(&a.bar())]);
        let sizes = ball_sizes(&gens, |u, v| o.equal(u, v).map(Some), 8).unwrap();
        let expected: Vec<usize> = (0..=8).map(|n| 2 * n * n + 2 * n + 1).collect();
        assert_eq!(sizes, expected);
        assert_eq!(growth_classifier(&sizes).unwrap().growth, Growth::PolynomialDegree(2));
    }

    #[test]
    fn classifier_examples() {
        let z: Vec<usize> = (0..=8).map(|n| 2 * n + 1).collect();
        assert_eq!(growth_classifier(&z).unwrap().growth, Growth::PolynomialDegree(1));
        match growth_classifier(&[1, 3, 7, 15, 31, 63]).unwrap().growth {
            Growth::ExponentialRate(x) => assert!((x - 2.0).abs() < 0.15, "{x}"),
            g => panic!("{g:?}"),
        }
        assert_eq!(growth_classifier(&[1, 3, 6, 6, 6, 6]).unwrap().growth, Growth::PolynomialDegree(0));
        assert!(growth_classifier(&[1, 2, 3]).is_err());
    }

    #[test]
    fn undecided_oracle_aborts() {
        let a = Word::gen(&Generator::new("a").unwrap());
        let r = ball_sizes(&[a], |_, _| Ok(None), 3);
        assert_eq!(r, Err(Error::PartialResult(vec![1])));
    }
}
