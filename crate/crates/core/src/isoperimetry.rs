//! Van Kampen area certificates.
//!
//! A certificate for `w` over `⟨X | R⟩` is a list of factors `(θ, i, ε)` such
//! that `∏ θ⁻¹ rᵢ^ε θ` freely reduces to `w`. Area is the number of factors,
//! radius the largest `|θ|`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlinalg::{big_vec, Lattice};
use crate::presentations::{LiftingData, Presentation};
use crate::words::{Alphabet, GenSymbol, Generator, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub theta: Word,
    pub relator: usize,
    pub sign: i8,
}

impl Factor {
    pub fn new(theta: Word, relator: usize, sign: i8) -> Self {
        Factor { theta, relator, sign }
    }

    /// `θ⁻¹ r^ε θ` as a reduced word.
    pub fn value(&self, p: &Presentation) -> Result<Word> {
        let r = relator(p, self.relator)?;
        Ok(r.pow(self.sign as i64).conjugate_by(&self.theta))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaCertificate {
    pub word: Word,
    pub factors: Vec<Factor>,
}

fn relator(p: &Presentation, index: usize) -> Result<&Word> {
    p.relators().get(index).ok_or(Error::IndexOutOfRange { index, count: p.relators().len() })
}

impl AreaCertificate {
    pub fn new(word: Word, factors: Vec<Factor>) -> Self {
        AreaCertificate { word, factors }
    }

    pub fn area(&self) -> usize {
        self.factors.len()
    }

    pub fn radius(&self) -> usize {
        self.factors.iter().map(|f| f.theta.len()).max().unwrap_or(0)
    }

    /// The free product of the factors, without comparing it to `word`.
    pub fn product(&self, p: &Presentation) -> Result<Word> {
        let mut letters = Vec::new();
        for f in &self.factors {
            let r = relator(p, f.relator)?;
            letters.extend(f.theta.inverse().into_letters());
            letters.extend(r.pow(f.sign as i64).into_letters());
            letters.extend(f.theta.letters().iter().cloned());
        }
        Ok(Word::reduce(letters))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "word": self.word,
            "factors": self.factors,
            "area": self.area(),
            "radius": self.radius(),
        })
    }
}

/// True iff the factors multiply out to the certified word in the free group.
pub fn check_certificate(p: &Presentation, c: &AreaCertificate) -> Result<bool> {
    for f in &c.factors {
        relator(p, f.relator)?;
        if f.sign != 1 && f.sign != -1 {
            return Err(Error::Argument(format!("factor sign must be ±1, got {}", f.sign)));
        }
    }
    Ok(c.product(p)? == c.word)
}

/// `⟨a, b | [a, b]⟩`.
pub fn free_abelian_rank_two() -> Presentation {
    Presentation::parse("< a, b | [a, b] >").expect("static presentation")
}

fn letter(name: &str) -> Word {
    Word::gen(&Generator::new(name).expect("valid name"))
}

/// Certificate for `[aⁿ, bⁿ]` over `⟨a, b | [a, b]⟩` with `n²` factors.
///
/// Uses `[a, bⁿ] = ∏_{t<n} [a,b]^{bᵗ}` and `[aⁱ, bⁿ] = [a, bⁿ]^{aⁱ⁻¹}[aⁱ⁻¹, bⁿ]`,
/// so the conjugators are `bᵗaⁱ` with `i` running down from `n-1`.
pub fn grid_certificate(n: usize) -> Result<AreaCertificate> {
    if n == 0 {
        return Err(Error::Argument("grid certificate needs n ≥ 1".into()));
    }
    let (a, b) = (letter("a"), letter("b"));
    let k = n as i64;
    let mut factors = Vec::with_capacity(n * n);
    for i in (0..k).rev() {
        for t in 0..k {
            factors.push(Factor::new(b.pow(t).mul(&a.pow(i)), 0, 1));
        }
    }
    Ok(AreaCertificate::new(Word::commutator(&a.pow(k), &b.pow(k)), factors))
}

/// All reduced words of length at most `max_len`, in length-lexicographic
/// order (letters ordered as the alphabet, positive before inverse).
pub fn reduced_words_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    reduced_words_up_to_capped(alphabet, max_len, usize::MAX).expect("uncapped")
}

/// [`reduced_words_up_to`], or `None` once more than `cap` words would be produced.
pub fn reduced_words_up_to_capped(alphabet: &Alphabet, max_len: usize, cap: usize) -> Option<Vec<Word>> {
    let letters: Vec<GenSymbol> = alphabet
        .generators()
        .iter()
        .flat_map(|g| [GenSymbol::new(g.clone(), 1), GenSymbol::new(g.clone(), -1)])
        .collect();
    let mut out = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in &letters {
                if w.letters().last().is_some_and(|t| *t == s.inverse()) {
                    continue;
                }
                let mut v = w.letters().to_vec();
                v.push(s.clone());
                next.push(Word::reduce(v));
            }
        }
        out.extend(next.iter().cloned());
        if out.len() > cap {
            return None;
        }
        layer = next;
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AreaSearch {
    Minimum { area: usize, certificate: AreaCertificate },
    Unknown { reason: String },
}

impl AreaSearch {
    pub fn area(&self) -> Option<usize> {
        match self {
            AreaSearch::Minimum { area, .. } => Some(*area),
            AreaSearch::Unknown { .. } => None,
        }
    }
}

/// Products of exactly `k` conjugates, deduplicated by reduced value; the
/// first factor list reaching a value is kept.
struct Layer {
    words: Vec<Word>,
    factors: Vec<Vec<usize>>,
    index: HashMap<Word, usize>,
}

impl Layer {
    fn identity() -> Layer {
        let mut index = HashMap::new();
        index.insert(Word::identity(), 0);
        Layer { words: vec![Word::identity()], factors: vec![Vec::new()], index }
    }

    fn extend(&self, conj: &[(Word, Factor)], cap: usize) -> Option<Layer> {
        let mut out = Layer { words: Vec::new(), factors: Vec::new(), index: HashMap::new() };
        for (w, fs) in self.words.iter().zip(&self.factors) {
            for (ci, (c, _)) in conj.iter().enumerate() {
                let v = w.mul(c);
                if out.index.contains_key(&v) {
                    continue;
                }
                if out.words.len() >= cap {
                    return None;
                }
                let mut f = fs.clone();
                f.push(ci);
                out.index.insert(v.clone(), out.words.len());
                out.words.push(v);
                out.factors.push(f);
            }
        }
        Some(out)
    }
}

/// Largest intermediate layer the search is willing to hold.
pub const AREA_SEARCH_CAP: usize = 4_000_000;

/// Least area of a certificate for `w` with every conjugator of length at
/// most `max_radius`, searched exhaustively up to `max_area`.
///
/// Meet in the middle: `w = P·Q` with `P` a product of `⌈k/2⌉` conjugates
/// and `Q` of `⌊k/2⌋`.
pub fn minimal_area_search(p: &Presentation, w: &Word, max_area: usize, max_radius: usize) -> Result<AreaSearch> {
    minimal_area_search_capped(p, w, max_area, max_radius, AREA_SEARCH_CAP)
}

/// [`minimal_area_search`] giving up once a layer would exceed `cap` words.
pub fn minimal_area_search_capped(
    p: &Presentation,
    w: &Word,
    max_area: usize,
    max_radius: usize,
    cap: usize,
) -> Result<AreaSearch> {
    p.alphabet().check(w)?;
    if w.is_identity() {
        return Ok(AreaSearch::Minimum { area: 0, certificate: AreaCertificate::new(w.clone(), Vec::new()) });
    }
    // w must lie in the image of the relators in the abelianization.
    let rows: Vec<Vec<i64>> = p.relators().iter().map(|r| r.exponent_sums(p.alphabet())).collect::<Result<_>>()?;
    let lattice = Lattice::new(p.generators().len(), rows.iter().map(|r| big_vec(r)).collect());
    if !lattice.contains(&big_vec(&w.exponent_sums(p.alphabet())?)) {
        return Ok(AreaSearch::Unknown { reason: "exponent sums of w are not a combination of relator exponent sums".into() });
    }

    let thetas = reduced_words_up_to_capped(p.alphabet(), max_radius, cap)
        .filter(|t| t.len().saturating_mul(2 * p.relators().len()) <= cap);
    let Some(thetas) = thetas else {
        return Ok(AreaSearch::Unknown { reason: format!("more than {cap} conjugates of radius ≤ {max_radius}") });
    };
    let mut conj: Vec<(Word, Factor)> = Vec::new();
    let mut seen = HashMap::new();
    for theta in thetas {
        for (j, r) in p.relators().iter().enumerate() {
            for sign in [1i8, -1] {
                let v = r.pow(sign as i64).conjugate_by(&theta);
                if seen.insert(v.clone(), ()).is_none() {
                    conj.push((v, Factor::new(theta.clone(), j, sign)));
                }
            }
        }
    }

    let mut layers = vec![Layer::identity()];
    for k in 1..=max_area {
        let (k1, k2) = (k.div_ceil(2), k / 2);
        while layers.len() <= k1 {
            let Some(next) = layers.last().expect("nonempty").extend(&conj, cap) else {
                return Ok(AreaSearch::Unknown { reason: format!("layer of {} conjugates exceeds {cap} words", layers.len()) });
            };
            layers.push(next);
        }
        let (left, right) = (&layers[k1], &layers[k2]);
        let hit = left.words.par_iter().enumerate().find_first(|(_, pw)| right.index.contains_key(&pw.inverse().mul(w)));
        if let Some((i, pw)) = hit {
            let j = right.index[&pw.inverse().mul(w)];
            let factors = left.factors[i].iter().chain(&right.factors[j]).map(|&ci| conj[ci].1.clone()).collect();
            let certificate = AreaCertificate::new(w.clone(), factors);
            debug_assert!(check_certificate(p, &certificate).unwrap_or(false));
            return Ok(AreaSearch::Minimum { area: k, certificate });
        }
    }
    Ok(AreaSearch::Unknown { reason: format!("no certificate of area ≤ {max_area} with radius ≤ {max_radius}") })
}

/// Where a required relation sits in a presentation: `target = shift⁻¹ r^sign shift`.
fn locate(p: &Presentation, target: &Word) -> Option<Factor> {
    let core = target.cyclically_reduced();
    let strip = (target.len() - core.len()) / 2;
    // target = u⁻¹ core u with u the inverse of the stripped prefix
    let u = Word::reduce(target.letters()[..strip].iter().cloned()).inverse();
    for (j, r) in p.relators().iter().enumerate() {
        if r.len() != core.len() {
            continue;
        }
        for sign in [1i8, -1] {
            let rs = r.pow(sign as i64);
            let l = rs.letters();
            for i in 0..l.len() {
                // rs = x y with |x| = i; y x = x⁻¹ rs x
                let x = Word::reduce(l[..i].iter().cloned());
                if Word::reduce(l[i..].iter().chain(&l[..i]).cloned()) == core {
                    return Some(Factor::new(x.mul(&u), j, sign));
                }
            }
        }
    }
    None
}

/// Records relator applications on an unreduced word; `word_0 = F₁⋯F_k · current`
/// holds in the free group throughout.
struct Rewriter<'a> {
    p: &'a Presentation,
    current: Vec<GenSymbol>,
    factors: Vec<Factor>,
}

impl<'a> Rewriter<'a> {
    /// Replace `current[at..at+len]` (= x) by `y`, paying one factor for `x y⁻¹`.
    fn replace(&mut self, at: usize, len: usize, y: &[GenSymbol]) -> Result<()> {
        let x = &self.current[at..at + len];
        let rel = Word::reduce(x.iter().cloned().chain(y.iter().rev().map(GenSymbol::inverse)));
        if !rel.is_identity() {
            let f = locate(self.p, &rel)
                .ok_or_else(|| Error::InvalidLifting(format!("relation {rel} is not a conjugate of a relator")))?;
            let prefix = Word::reduce(self.current[..at].iter().cloned());
            self.factors.push(Factor::new(f.theta.mul(&prefix.inverse()), f.relator, f.sign));
        }
        self.current.splice(at..at + len, y.iter().cloned());
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    /// Relations `rᵢσᵢ` applied.
    pub relator_steps: usize,
    /// Central letters commuted past conjugator letters.
    pub commutation_steps: usize,
    pub total: usize,
    /// `n² + μδ² + δ + (n + μδ)²` with `δ = max(area, radius)`.
    pub bound: u128,
    pub n: usize,
    pub mu: usize,
    pub delta: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralTransform {
    pub certificate: AreaCertificate,
    /// The correction `w₃⁻¹` appended to the lifted word.
    pub central_part: Word,
    pub cost: CostReport,
}

/// Validate lifting data against both presentations; returns the central generators.
pub fn validate_lifting(
    quotient: &Presentation,
    total: &Presentation,
    lifting: &LiftingData,
    oracle: Option<&dyn Fn(&Word) -> bool>,
) -> Result<Vec<Generator>> {
    let central: Vec<Generator> =
        lifting.central_gens.iter().map(|n| Generator::new(n)).collect::<Result<_>>()?;
    for c in &central {
        if !total.alphabet().contains(c) {
            return Err(Error::InvalidLifting(format!("central generator {c} is not a generator of the extension")));
        }
        if quotient.alphabet().contains(c) {
            return Err(Error::InvalidLifting(format!("central generator {c} also generates the quotient")));
        }
    }
    for g in quotient.generators() {
        if !total.alphabet().contains(g) {
            return Err(Error::InvalidLifting(format!("quotient generator {g} is missing from the extension")));
        }
    }
    if total.generators().len() != quotient.generators().len() + central.len() {
        return Err(Error::InvalidLifting("extension has generators beyond quotient and central ones".into()));
    }
    if lifting.sigma.len() != quotient.relators().len() {
        return Err(Error::InvalidLifting(format!(
            "{} correction words for {} relators",
            lifting.sigma.len(),
            quotient.relators().len()
        )));
    }
    for (r, s) in quotient.relators().iter().zip(&lifting.sigma) {
        if s.letters().iter().any(|l| !central.contains(l.generator())) {
            return Err(Error::InvalidLifting(format!("σ = {s} uses non-central letters")));
        }
        let rs = r.mul(s);
        if let Some(ok) = oracle {
            if !ok(&rs) {
                return Err(Error::InvalidLifting(format!("{rs} is not trivial in the extension")));
            }
        }
        if !rs.is_identity() && locate(total, &rs).is_none() {
            return Err(Error::InvalidLifting(format!("{rs} is not a relator of the extension")));
        }
    }
    for c in &central {
        for g in total.generators() {
            if g != c && locate(total, &Word::commutator(&Word::gen(g), &Word::gen(c))).is_none() {
                return Err(Error::InvalidLifting(format!("[{g}, {c}] is not a relator of the extension")));
            }
        }
    }
    Ok(central)
}

/// Lift a certificate over `G/C` to one over `G` for `w·w₃⁻¹`, where
/// `w₃ = ∏ σ_{j(i)}^{-εᵢ}` collects the central corrections.
///
/// Each `r^ε` is traded for `σ^{-ε}` (one relator each), then the central
/// letters are commuted to the right past `θᵢ` (one commutator each), after
/// which everything cancels freely.
pub fn central_transform(
    quotient: &Presentation,
    total: &Presentation,
    lifting: &LiftingData,
    c: &AreaCertificate,
    oracle: Option<&dyn Fn(&Word) -> bool>,
) -> Result<CentralTransform> {
    if !check_certificate(quotient, c)? {
        return Err(Error::Argument("input certificate does not check".into()));
    }
    let central = validate_lifting(quotient, total, lifting, oracle)?;
    let is_central = |s: &GenSymbol| central.contains(s.generator());

    // w₃ = ∏ σ^{-ε}
    let w3 = Word::product(
        c.factors.iter().map(|f| lifting.sigma[f.relator].pow(-(f.sign as i64))).collect::<Vec<_>>().iter(),
    );
    let correction = w3.inverse();

    let mut current = Vec::new();
    let mut spans = Vec::new();
    for f in &c.factors {
        current.extend(f.theta.inverse().into_letters());
        let r = quotient.relators()[f.relator].pow(f.sign as i64);
        spans.push((current.len(), r.len()));
        current.extend(r.into_letters());
        current.extend(f.theta.letters().iter().cloned());
    }
    current.extend(correction.letters().iter().cloned());
    let word = Word::reduce(current.clone());
    let mut rw = Rewriter { p: total, current, factors: Vec::new() };

    let mut relator_steps = 0;
    let mut commutation_steps = 0;
    let mut shift = 0isize;
    for (f, &(start, len)) in c.factors.iter().zip(&spans) {
        let s = lifting.sigma[f.relator].pow(-(f.sign as i64));
        let start = (start as isize + shift) as usize;
        shift += s.len() as isize - len as isize;
        rw.replace(start, len, s.letters())?;
        relator_steps += 1;
        // bubble each central letter of s to the end of θ, rightmost first
        let tlen = f.theta.len();
        for k in (0..s.len()).rev() {
            for pos in start + k..start + k + tlen {
                let x = [rw.current[pos].clone(), rw.current[pos + 1].clone()];
                debug_assert!(is_central(&x[0]) && !is_central(&x[1]));
                rw.replace(pos, 2, &[x[1].clone(), x[0].clone()])?;
                commutation_steps += 1;
            }
        }
    }
    if !Word::reduce(rw.current.clone()).is_identity() {
        return Err(Error::CheckFailed {
            check: "central_transform".into(),
            witness: format!("residual {}", Word::reduce(rw.current)),
        });
    }
    let certificate = AreaCertificate::new(word, rw.factors);
    if !check_certificate(total, &certificate)? {
        return Err(Error::CheckFailed { check: "central_transform".into(), witness: "output certificate invalid".into() });
    }
    let n = c.word.len();
    let mu = lifting.sigma.iter().map(Word::len).max().unwrap_or(0);
    let delta = c.area().max(c.radius());
    let cost = CostReport {
        relator_steps,
        commutation_steps,
        total: relator_steps + commutation_steps,
        bound: lemma_bound(n, mu, delta),
        n,
        mu,
        delta,
    };
    Ok(CentralTransform { certificate, central_part: correction, cost })
}

/// `n² + μδ² + δ + (n + μδ)²`.
pub fn lemma_bound(n: usize, mu: usize, delta: usize) -> u128 {
    let (n, mu, d) = (n as u128, mu as u128, delta as u128);
    n * n + mu * d * d + d + (n + mu * d) * (n + mu * d)
}

/// `⟨a, b, c | [a,b]c⁻¹, [a,c], [b,c]⟩` with lifting `σ = c⁻¹` over `⟨a, b | [a,b]⟩`.
pub fn heisenberg() -> (Presentation, LiftingData) {
    let mut p = Presentation::parse("< a, b, c | [a,b] c^-1, [a,c], [b,c] >").expect("static presentation");
    let lifting = LiftingData { central_gens: vec!["c".into()], sigma: vec![letter("c").inverse()] };
    p.meta.lifting = Some(lifting.clone());
    (p, lifting)
}

// ---------------------------------------------------------------------------
// c_n and the free-area reduction

/// Generators `a, b, l_a, l_b` of the ambient group.
pub fn cn_alphabet() -> Alphabet {
    Alphabet::new(["a", "b", "l_a", "l_b"].map(|n| Generator::new(n).expect("valid"))).expect("distinct")
}

/// Generators `l_a, l_b, lambda` of `L`.
pub fn l_alphabet() -> Alphabet {
    Alphabet::new(["l_a", "l_b", "lambda"].map(|n| Generator::new(n).expect("valid"))).expect("distinct")
}

/// `c_n = ℓ_aⁿ ℓ_bⁿ (b⁻ⁿ ℓ_aⁿ bⁿ ℓ_bⁿ)⁻¹`, kept unreduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnWord {
    pub n: usize,
    letters: Vec<GenSymbol>,
}

impl CnWord {
    /// Letters as written, before free reduction.
    pub fn letters(&self) -> &[GenSymbol] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Freely reduced over `{a, b, l_a, l_b}`; this is `[ℓ_a⁻ⁿ, bⁿ]`, of length `4n`.
    pub fn reduced(&self) -> Word {
        Word::reduce(self.letters.iter().cloned())
    }

    /// Substitute `ℓ_x = x⁻¹x̄` to get a word over `{a, b, a~, b~}`.
    pub fn expand(&self) -> Word {
        Word::reduce(self.letters.iter().flat_map(|s| {
            let w = match s.base_name() {
                "l_a" => Word::ell(&letter("a")),
                "l_b" => Word::ell(&letter("b")),
                _ => Word::symbol(GenSymbol::new(s.generator().clone(), 1)),
            };
            w.pow(s.sign() as i64).into_letters()
        }))
    }
}

pub fn c_n_word(n: usize) -> Result<CnWord> {
    if n == 0 {
        return Err(Error::Argument("c_n needs n ≥ 1".into()));
    }
    let g = |name: &str, sign: i8| GenSymbol::new(Generator::new(name).expect("valid"), sign);
    let run = |name: &str, sign: i8| std::iter::repeat_n(g(name, sign), n);
    let letters = run("l_a", 1)
        .chain(run("l_b", 1))
        .chain(run("l_b", -1))
        .chain(run("b", -1))
        .chain(run("l_a", -1))
        .chain(run("b", 1))
        .collect();
    Ok(CnWord { n, letters })
}

/// `λ = ℓ_a ℓ_b ℓ_{ab}⁻¹` over `X ∪ X̄`.
pub fn lambda_word() -> Word {
    let (a, b) = (letter("a"), letter("b"));
    Word::product([&Word::ell(&a), &Word::ell(&b), &Word::ell(&a.mul(&b)).inverse()])
}

/// `w = V · ∏ λ^{εᵢθᵢ}` in the free group on `{ℓ_a, ℓ_b, λ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAreaReduction {
    pub word: Word,
    pub v: Word,
    pub factors: Vec<(Word, i8)>,
}

impl FreeAreaReduction {
    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn product(&self) -> Word {
        let lam = letter("lambda");
        let parts: Vec<Word> =
            self.factors.iter().map(|(t, e)| lam.pow(*e as i64).conjugate_by(t)).collect();
        Word::product(std::iter::once(&self.v).chain(&parts))
    }

    pub fn verify(&self) -> bool {
        self.product() == self.word && self.n() <= self.word.len()
    }

    /// `p̄(w)` is `V(ā, b̄)`, so it is trivial exactly when `V` is empty.
    pub fn v_forced_empty(&self) -> bool {
        project_pbar(&self.word).is_identity()
    }

    /// Certificate over `⟨a, b | [a,b]⟩` for `p(V)⁻¹ p(w)` with conjugators `θᵢ(a⁻¹, b⁻¹)`.
    pub fn projected_certificate(&self) -> AreaCertificate {
        let word = project_p(&self.v).inverse().mul(&project_p(&self.word));
        let factors = self.factors.iter().map(|(t, e)| Factor::new(project_p(t), 0, *e)).collect();
        AreaCertificate::new(word, factors)
    }
}

fn substitute(w: &Word, f: impl Fn(&str) -> Word) -> Word {
    Word::reduce(w.letters().iter().flat_map(|s| f(s.base_name()).pow(s.sign() as i64).into_letters()))
}

/// `p`: `ℓ_a ↦ a⁻¹`, `ℓ_b ↦ b⁻¹`, `λ ↦ [a, b]`.
pub fn project_p(w: &Word) -> Word {
    substitute(w, |n| match n {
        "l_a" => letter("a").inverse(),
        "l_b" => letter("b").inverse(),
        _ => Word::commutator(&letter("a"), &letter("b")),
    })
}

/// `p̄`: `ℓ_a ↦ ā`, `ℓ_b ↦ b̄`, `λ ↦ 1`.
pub fn project_pbar(w: &Word) -> Word {
    substitute(w, |n| match n {
        "l_a" => letter("a").bar(),
        "l_b" => letter("b").bar(),
        _ => Word::identity(),
    })
}

/// Push every `λ` to the right using `v u^v = u v`.
pub fn reduce_to_free_area(w: &Word) -> Result<FreeAreaReduction> {
    l_alphabet().check(w)?;
    // split w = V₀ λ^{ε₁} V₁ ⋯ λ^{ε_N} V_N
    let mut segments = vec![Vec::new()];
    let mut signs = Vec::new();
    for s in w.letters() {
        if s.base_name() == "lambda" {
            signs.push(s.sign());
            segments.push(Vec::new());
        } else {
            segments.last_mut().expect("nonempty").push(s.clone());
        }
    }
    let segs: Vec<Word> = segments.into_iter().map(Word::reduce).collect();
    let v = Word::product(&segs);
    // θᵢ = Vᵢ Vᵢ₊₁ ⋯ V_N
    let mut suffix = Word::identity();
    let mut factors = vec![(Word::identity(), 1i8); signs.len()];
    for i in (1..segs.len()).rev() {
        suffix = segs[i].mul(&suffix);
        factors[i - 1] = (suffix.clone(), signs[i - 1]);
    }
    let red = FreeAreaReduction { word: w.clone(), v, factors };
    debug_assert!(red.verify());
    Ok(red)
}

/// Bracketed estimate of `d_L(1, c_n)`: the free-area argument gives `n²`
/// from below; no verified upper bound is produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionBracket {
    pub n: usize,
    /// Length of `c_n` in `{a, b, ℓ_a, ℓ_b}` as written.
    pub ambient_length: usize,
    pub lower: u64,
    pub upper: Option<u64>,
}

pub fn distortion_bracket(n: usize) -> Result<DistortionBracket> {
    let c = c_n_word(n)?;
    Ok(DistortionBracket { n, ambient_length: c.len(), lower: (n * n) as u64, upper: None })
}
