//! Finite presentations `⟨X | R⟩`, products, abelianization and the
//! weak-commutativity double `⟨X ∪ X̄ | R, R̄, [w, w̄] (w ∈ witnesses)⟩`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::enumerator::{self, EnumerationConfig};
use crate::error::{Error, Result};
use crate::intlinalg::{FinAbGroup, IntMatrix};
use crate::parse;
use crate::words::{Alphabet, Generator, Word};

pub const PRESENTATION_SCHEMA_VERSION: u32 = 1;

/// Which words `w` receive a witness relator `[w, w̄]` in the double.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessPolicy {
    /// One word per nontrivial element; needs a finite enumeration of `G`.
    AllElements,
    /// Every reduced word of length `1..=k` in the generators and their inverses.
    LengthBound(usize),
}

impl fmt::Display for WitnessPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessPolicy::AllElements => write!(f, "all"),
            WitnessPolicy::LengthBound(k) => write!(f, "len:{k}"),
        }
    }
}

impl FromStr for WitnessPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(WitnessPolicy::AllElements);
        }
        if let Some(k) = s.strip_prefix("len:") {
            return k
                .parse()
                .map(WitnessPolicy::LengthBound)
                .map_err(|_| Error::Argument(format!("bad witness length `{k}`")));
        }
        Err(Error::Argument(format!("unknown witness policy `{s}` (expected `all` or `len:k`)")))
    }
}

impl Serialize for WitnessPolicy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WitnessPolicy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Lifting data for a central extension: designated central generators and
/// one correction word `σᵢ` (in the central letters) per quotient relator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftingData {
    pub central_gens: Vec<String>,
    pub sigma: Vec<Word>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_policy: Option<WitnessPolicy>,
    /// Set when the double was built from a finite witness set that may not
    /// cover every element: the group presented may be a proper pre-image of `𝔛(G)`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub proper_preimage_possible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifting: Option<LiftingData>,
}

/// A finite presentation. Relators are freely and cyclically reduced and
/// nonempty; generator names are unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
    pub meta: PresentationMeta,
}

impl Presentation {
    pub fn new(generators: Vec<Generator>, relators: Vec<Word>) -> Result<Self> {
        let alphabet = Alphabet::new(generators)?;
        let mut rels = Vec::with_capacity(relators.len());
        for r in relators {
            for s in r.letters() {
                if !alphabet.contains(s.generator()) {
                    return Err(Error::UndeclaredGenerator(s.generator().to_string()));
                }
            }
            let r = r.cyclically_reduced();
            if !r.is_identity() {
                rels.push(r);
            }
        }
        Ok(Presentation { alphabet, relators: rels, meta: PresentationMeta::default() })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (gens, rels) = parse::parse_presentation_parts(text)?;
        Presentation::new(gens, rels)
    }

    pub fn generators(&self) -> &[Generator] {
        self.alphabet.generators()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse::parse_word(text, &self.alphabet)
    }

    pub fn generator_words(&self) -> Vec<Word> {
        self.generators().iter().map(Word::gen).collect()
    }

    /// Every generator is unbarred.
    pub fn is_single_copy(&self) -> bool {
        self.generators().iter().all(|g| !g.is_barred())
    }

    /// Relator exponent-sum matrix: one row per relator, one column per generator.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| r.exponent_sums(&self.alphabet).expect("relators use declared generators"))
            .collect();
        IntMatrix::from_rows_i64(rows.len(), self.alphabet.len(), &rows)
    }

    /// `G/G'` as the cokernel of the exponent-sum matrix.
    pub fn abelianization(&self) -> FinAbGroup {
        self.exponent_matrix().cokernel()
    }

    fn rename_clashes(&self, clash: &BTreeSet<String>, suffix: &str) -> Result<Presentation> {
        if clash.is_empty() {
            return Ok(self.clone());
        }
        let map = |g: &Generator| -> Result<Generator> {
            if clash.contains(g.name()) {
                g.renamed(&format!("{}{}", g.name(), suffix))
            } else {
                Ok(g.clone())
            }
        };
        let gens = self.generators().iter().map(map).collect::<Result<Vec<_>>>()?;
        let mut rels = Vec::new();
        for r in &self.relators {
            let letters = r
                .letters()
                .iter()
                .map(|s| Ok(crate::words::GenSymbol::new(map(s.generator())?, s.sign())))
                .collect::<Result<Vec<_>>>()?;
            rels.push(Word::reduce(letters));
        }
        Presentation::new(gens, rels)
    }

    /// Base names used on both sides get suffixes `_1` / `_2`.
    fn disjoint_pair(p1: &Presentation, p2: &Presentation) -> Result<(Presentation, Presentation)> {
        let n1: BTreeSet<String> = p1.generators().iter().map(|g| g.name().to_string()).collect();
        let n2: BTreeSet<String> = p2.generators().iter().map(|g| g.name().to_string()).collect();
        let mut clash: BTreeSet<String> = n1.intersection(&n2).cloned().collect();
        // a renamed generator must not collide with an untouched one
        loop {
            let r1: BTreeSet<String> =
                n1.iter().map(|n| if clash.contains(n) { format!("{n}_1") } else { n.clone() }).collect();
            let r2: BTreeSet<String> =
                n2.iter().map(|n| if clash.contains(n) { format!("{n}_2") } else { n.clone() }).collect();
            let again: BTreeSet<String> = r1
                .intersection(&r2)
                .map(|n| {
                    n1.iter()
                        .chain(n2.iter())
                        .find(|m| *m == n || format!("{m}_1") == *n || format!("{m}_2") == *n)
                        .cloned()
                        .unwrap_or_else(|| n.clone())
                })
                .collect();
            if again.is_empty() || again.is_subset(&clash) {
                break;
            }
            clash.extend(again);
        }
        Ok((p1.rename_clashes(&clash, "_1")?, p2.rename_clashes(&clash, "_2")?))
    }

    pub fn free_product(p1: &Presentation, p2: &Presentation) -> Result<Presentation> {
        let (a, b) = Presentation::disjoint_pair(p1, p2)?;
        let gens = a.generators().iter().chain(b.generators()).cloned().collect();
        let rels = a.relators.iter().chain(&b.relators).cloned().collect();
        Presentation::new(gens, rels)
    }

    pub fn direct_product(p1: &Presentation, p2: &Presentation) -> Result<Presentation> {
        let (a, b) = Presentation::disjoint_pair(p1, p2)?;
        let gens: Vec<Generator> = a.generators().iter().chain(b.generators()).cloned().collect();
        let mut rels: Vec<Word> = a.relators.iter().chain(&b.relators).cloned().collect();
        for x in a.generators() {
            for y in b.generators() {
                rels.push(Word::commutator(&Word::gen(x), &Word::gen(y)));
            }
        }
        Presentation::new(gens, rels)
    }

    /// JSON document `{version, generators, relators, meta}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PresentationDoc::from(self)).expect("presentation documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Presentation> {
        let doc: PresentationDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        if rels.is_empty() {
            write!(f, "< {} | >", gens.join(", "))
        } else {
            write!(f, "< {} | {} >", gens.join(", "), rels.join(", "))
        }
    }
}

impl FromStr for Presentation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Presentation::parse(s)
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationDoc {
    version: u32,
    generators: Vec<String>,
    relators: Vec<String>,
    #[serde(default)]
    meta: PresentationMeta,
}

impl From<&Presentation> for PresentationDoc {
    fn from(p: &Presentation) -> Self {
        PresentationDoc {
            version: PRESENTATION_SCHEMA_VERSION,
            generators: p.generators().iter().map(|g| g.to_string()).collect(),
            relators: p.relators.iter().map(|r| r.to_string()).collect(),
            meta: p.meta.clone(),
        }
    }
}

impl TryFrom<PresentationDoc> for Presentation {
    type Error = Error;

    fn try_from(doc: PresentationDoc) -> Result<Self> {
        if doc.version != PRESENTATION_SCHEMA_VERSION {
            return Err(Error::Json(format!("unsupported presentation version {}", doc.version)));
        }
        let text = format!("< {} | {} >", doc.generators.join(", "), doc.relators.join(", "));
        let mut p = Presentation::parse(&text)?;
        if let Some(lift) = &doc.meta.lifting {
            for name in &lift.central_gens {
                let g = Generator::new(name)?;
                if !p.alphabet.contains(&g) {
                    return Err(Error::UndeclaredGenerator(name.clone()));
                }
            }
            for s in &lift.sigma {
                p.alphabet.check(s)?;
            }
        }
        p.meta = doc.meta;
        Ok(p)
    }
}

/// The witness words for a policy, with the identity skipped and inverse
/// pairs deduplicated (`[w, w̄]` and `[w⁻¹, w̄⁻¹]` are conjugate).
pub fn witness_words(p: &Presentation, policy: WitnessPolicy, cfg: &EnumerationConfig) -> Result<Vec<Word>> {
    if !p.is_single_copy() {
        return Err(Error::Argument("the double is defined for presentations without barred generators".into()));
    }
    match policy {
        WitnessPolicy::AllElements => {
            let table = enumerator::enumerate(p, &[], cfg)?;
            let reps = table.coset_representatives();
            let mut seen = vec![false; table.n_cosets()];
            let mut out = Vec::new();
            for (c, w) in reps.iter().enumerate() {
                if c == 0 || seen[c] {
                    continue;
                }
                seen[c] = true;
                let inv = table.trace(0, &w.inverse())?;
                seen[inv] = true;
                out.push(w.clone());
            }
            Ok(out)
        }
        WitnessPolicy::LengthBound(k) => {
            let alpha = p.alphabet();
            let mut out: Vec<Word> = Vec::new();
            let mut seen = BTreeSet::<Word>::new();
            let mut layer = vec![Word::identity()];
            for _ in 0..k {
                let mut next = Vec::new();
                for w in &layer {
                    for code in 0..2 * alpha.len() {
                        let s = alpha.symbol_of_code(code);
                        if w.letters().last().is_some_and(|t| *t == s.inverse()) {
                            continue;
                        }
                        let u = w.mul(&Word::symbol(s));
                        if !seen.contains(&u.inverse()) {
                            out.push(u.clone());
                        }
                        seen.insert(u.clone());
                        next.push(u);
                    }
                }
                layer = next;
            }
            Ok(out)
        }
    }
}

/// The Sidki double of `p` under a witness policy.
pub fn sidki_double(p: &Presentation, policy: WitnessPolicy, cfg: &EnumerationConfig) -> Result<Presentation> {
    let witnesses = witness_words(p, policy, cfg)?;
    let gens: Vec<Generator> =
        p.generators().iter().cloned().chain(p.generators().iter().map(Generator::bar)).collect();
    let mut rels: Vec<Word> = p.relators().to_vec();
    rels.extend(p.relators().iter().map(Word::bar));
    rels.extend(witnesses.iter().map(|w| Word::commutator(w, &w.bar())));
    let mut d = Presentation::new(gens, rels)?;
    d.meta.witness_policy = Some(policy);
    d.meta.proper_preimage_possible = matches!(policy, WitnessPolicy::LengthBound(_));
    Ok(d)
}

/// Default policy: all elements when `p` enumerates within budget, otherwise
/// `LengthBound(2)` with the pre-image flag raised.
pub fn sidki_double_default(p: &Presentation, cfg: &EnumerationConfig) -> Result<Presentation> {
    match sidki_double(p, WitnessPolicy::AllElements, cfg) {
        Err(Error::Overflow { .. }) => sidki_double(p, WitnessPolicy::LengthBound(2), cfg),
        other => other,
    }
}
