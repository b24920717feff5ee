//! Free-group words over a two-sorted alphabet `X ∪ X̄`.
//!
//! A [`Word`] is always freely reduced. Barred generators render with a
//! trailing `~`, inverses as `^-1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator of a free group: a base name plus the "second copy" flag.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    name: Arc<str>,
    barred: bool,
}

impl Generator {
    /// Names must be nonempty, start with a letter and otherwise contain
    /// ASCII alphanumerics or `_`.
    pub fn new(name: &str) -> Result<Self> {
        if !is_valid_name(name) {
            return Err(Error::Argument(format!("invalid generator name `{name}`")));
        }
        Ok(Generator { name: Arc::from(name), barred: false })
    }

    pub fn with_bar(name: &str, barred: bool) -> Result<Self> {
        let mut g = Generator::new(name)?;
        g.barred = barred;
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_barred(&self) -> bool {
        self.barred
    }

    /// The same base name in the other copy.
    pub fn bar(&self) -> Generator {
        Generator { name: self.name.clone(), barred: !self.barred }
    }

    pub fn unbarred(&self) -> Generator {
        Generator { name: self.name.clone(), barred: false }
    }

    pub fn renamed(&self, name: &str) -> Result<Generator> {
        Generator::with_bar(name, self.barred)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "{}~", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A signed generator. Symbols are equal as generators when base name and
/// bar flag agree; inversion only flips the sign.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenSymbol {
    generator: Generator,
    inverse: bool,
}

impl GenSymbol {
    pub fn new(generator: Generator, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        GenSymbol { generator, inverse: sign < 0 }
    }

    pub fn pos(generator: Generator) -> Self {
        GenSymbol { generator, inverse: false }
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn base_name(&self) -> &str {
        self.generator.name()
    }

    pub fn is_barred(&self) -> bool {
        self.generator.barred
    }

    pub fn sign(&self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn inverse(&self) -> GenSymbol {
        GenSymbol { generator: self.generator.clone(), inverse: !self.inverse }
    }

    pub fn bar(&self) -> GenSymbol {
        GenSymbol { generator: self.generator.bar(), inverse: self.inverse }
    }

    fn cancels(&self, other: &GenSymbol) -> bool {
        self.inverse != other.inverse && self.generator == other.generator
    }
}

impl fmt::Display for GenSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.generator)
        } else {
            write!(f, "{}", self.generator)
        }
    }
}

impl fmt::Debug for GenSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A declared, ordered set of generators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    generators: Vec<Generator>,
    index: HashMap<Generator, usize>,
}

impl Alphabet {
    pub fn new(generators: impl IntoIterator<Item = Generator>) -> Result<Self> {
        let mut a = Alphabet::default();
        for g in generators {
            if a.index.contains_key(&g) {
                return Err(Error::DuplicateGenerator(g.to_string()));
            }
            a.index.insert(g.clone(), a.generators.len());
            a.generators.push(g);
        }
        Ok(a)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.index.contains_key(g)
    }

    pub fn index_of(&self, g: &Generator) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Letter index used by integer-coded algorithms: generator `i` is
    /// `2i`, its inverse `2i + 1`.
    pub fn letter_code(&self, s: &GenSymbol) -> Option<usize> {
        self.index_of(&s.generator).map(|i| 2 * i + s.inverse as usize)
    }

    pub fn symbol_of_code(&self, code: usize) -> GenSymbol {
        GenSymbol { generator: self.generators[code / 2].clone(), inverse: code % 2 == 1 }
    }

    pub fn encode(&self, w: &Word) -> Result<Vec<usize>> {
        w.letters()
            .iter()
            .map(|s| self.letter_code(s).ok_or_else(|| Error::Alphabet(s.generator.to_string())))
            .collect()
    }

    pub fn decode(&self, codes: &[usize]) -> Word {
        Word::reduce(codes.iter().map(|&c| self.symbol_of_code(c)))
    }

    /// Reduce a raw symbol sequence, rejecting symbols outside the alphabet.
    pub fn free_reduce(&self, letters: impl IntoIterator<Item = GenSymbol>) -> Result<Word> {
        let mut raw = Vec::new();
        for s in letters {
            if !self.contains(&s.generator) {
                return Err(Error::Alphabet(s.generator.to_string()));
            }
            raw.push(s);
        }
        Ok(Word::reduce(raw))
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|s| !self.contains(&s.generator)) {
            Some(s) => Err(Error::Alphabet(s.generator.to_string())),
            None => Ok(()),
        }
    }

    /// Every generator in both copies, unbarred copy first.
    pub fn doubled(&self) -> Alphabet {
        let gens = self
            .generators
            .iter()
            .filter(|g| !g.barred)
            .cloned()
            .chain(self.generators.iter().filter(|g| !g.barred).map(Generator::bar));
        Alphabet::new(gens).expect("doubling an alphabet of unbarred generators is injective")
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<GenSymbol>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: &Generator) -> Self {
        Word(vec![GenSymbol::pos(g.clone())])
    }

    pub fn symbol(s: GenSymbol) -> Self {
        Word(vec![s])
    }

    /// Free reduction with a stack; no alphabet check.
    pub fn reduce(letters: impl IntoIterator<Item = GenSymbol>) -> Self {
        let mut out: Vec<GenSymbol> = Vec::new();
        for s in letters {
            if out.last().is_some_and(|t| t.cancels(&s)) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[GenSymbol] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<GenSymbol> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn product<'a>(words: impl IntoIterator<Item = &'a Word>) -> Word {
        Word::reduce(words.into_iter().flat_map(|w| w.0.iter().cloned()))
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(GenSymbol::inverse).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let n = k.unsigned_abs() as usize;
        Word::reduce(std::iter::repeat_n(base.0.iter(), n).flatten().cloned())
    }

    /// `u⁻¹ w u`, written `w^u`.
    pub fn conjugate_by(&self, u: &Word) -> Word {
        Word::product([&u.inverse(), self, u])
    }

    /// `[u, v] = u⁻¹ v⁻¹ u v`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        Word::product([&u.inverse(), &v.inverse(), u, v])
    }

    /// Left-normed commutator `[a₁, …, aₙ] = [[a₁, …, aₙ₋₁], aₙ]`; a single
    /// entry is returned unchanged.
    pub fn left_normed(ws: &[Word]) -> Result<Word> {
        let (first, rest) = ws
            .split_first()
            .ok_or_else(|| Error::Argument("left-normed commutator of no words".into()))?;
        Ok(rest.iter().fold(first.clone(), |acc, w| Word::commutator(&acc, w)))
    }

    /// Engel word: `γ₁(x,y) = [x,y]`, `γₙ₊₁(x,y) = [γₙ(x,y), y]`.
    pub fn engel(x: &Word, y: &Word, n: usize) -> Result<Word> {
        if n == 0 {
            return Err(Error::Argument("Engel word index must be at least 1".into()));
        }
        let mut g = Word::commutator(x, y);
        for _ in 1..n {
            g = Word::commutator(&g, y);
        }
        Ok(g)
    }

    /// Cyclic reduction: strip matching inverse letters from both ends.
    pub fn cyclically_reduced(&self) -> Word {
        let mut lo = 0;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo].cancels(&self.0[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        Word(self.0[lo..hi].to_vec())
    }

    /// Swap the two copies letter by letter.
    pub fn bar(&self) -> Word {
        Word(self.0.iter().map(GenSymbol::bar).collect())
    }

    /// `π`: send both `g` and `ḡ` to `g`.
    pub fn pi(&self) -> Word {
        Word::reduce(self.0.iter().map(|s| GenSymbol::new(s.generator.unbarred(), s.sign())))
    }

    /// `π̄`: kill unbarred letters; barred letters are returned unbarred, as
    /// a word over `X` naming elements of `Ḡ ≅ G`.
    pub fn pibar(&self) -> Word {
        Word::reduce(
            self.0
                .iter()
                .filter(|s| s.is_barred())
                .map(|s| GenSymbol::new(s.generator.unbarred(), s.sign())),
        )
    }

    /// Kill barred letters: the projection `G ∗ Ḡ → G`.
    pub fn kill_barred(&self) -> Word {
        Word::reduce(self.0.iter().filter(|s| !s.is_barred()).cloned())
    }

    /// `ρ(g) = (g, g, 1)`, `ρ(ḡ) = (1, g, g)`, extended letter by letter.
    pub fn rho(&self) -> [Word; 3] {
        [self.kill_barred(), self.pi(), self.pibar()]
    }

    /// `ℓ_u = u⁻¹ ū`.
    pub fn ell(u: &Word) -> Word {
        u.inverse().mul(&u.bar())
    }

    /// Sum of exponents per generator of `alphabet`.
    pub fn exponent_sums(&self, alphabet: &Alphabet) -> Result<Vec<i64>> {
        let mut v = vec![0i64; alphabet.len()];
        for s in &self.0 {
            let i = alphabet.index_of(&s.generator).ok_or_else(|| Error::Alphabet(s.generator.to_string()))?;
            v[i] += s.sign() as i64;
        }
        Ok(v)
    }

    /// Generators occurring in the word, in order of first appearance.
    pub fn support(&self) -> Vec<Generator> {
        let mut seen = Vec::<Generator>::new();
        for s in &self.0 {
            if !seen.contains(&s.generator) {
                seen.push(s.generator.clone());
            }
        }
        seen
    }
}

impl fmt::Display for Word {
    /// Runs of a repeated symbol print as powers, factors are joined by `*`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let s = &self.0[i];
            let mut j = i + 1;
            while j < self.0.len() && self.0[j] == *s {
                j += 1;
            }
            let run = (j - i) as i64;
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let exp = if s.inverse { -run } else { run };
            if exp == 1 {
                write!(f, "{}", s.generator)?;
            } else {
                write!(f, "{}^{}", s.generator, exp)?;
            }
            i = j;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    /// Deserializes without an alphabet: every identifier becomes a generator.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        crate::parse::parse_word_free(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: &str) -> Generator {
        Generator::new(n).unwrap()
    }
    fn w(n: &str) -> Word {
        Word::gen(&g(n))
    }

    #[test]
    fn reduce_cancels_inverse_pairs() {
        let a = GenSymbol::pos(g("a"));
        let b = GenSymbol::pos(g("b"));
        let alpha = Alphabet::new([g("a"), g("b")]).unwrap();
        assert!(alpha.free_reduce([a.clone(), a.inverse()]).unwrap().is_identity());
        let r = alpha.free_reduce([a.clone(), b.clone(), b.inverse(), a.clone()]).unwrap();
        assert_eq!(r, w("a").pow(2));
        let c = alpha.free_reduce([a.inverse(), b.inverse(), a.clone(), b.clone()]).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn unknown_symbol_is_alphabet_error() {
        let alpha = Alphabet::new([g("a")]).unwrap();
        let err = alpha.free_reduce([GenSymbol::pos(g("z"))]).unwrap_err();
        assert_eq!(err, Error::Alphabet("z".into()));
        // the barred copy is a different generator
        assert!(alpha.free_reduce([GenSymbol::pos(g("a").bar())]).is_err());
    }

    #[test]
    fn commutator_convention() {
        let (a, b) = (w("a"), w("b"));
        assert!(Word::commutator(&a, &a).is_identity());
        assert_eq!(Word::commutator(&a, &b).to_string(), "a^-1*b^-1*a*b");
        let c = w("c");
        assert_eq!(
            Word::left_normed(&[a.clone(), b.clone(), c.clone()]).unwrap(),
            Word::commutator(&Word::commutator(&a, &b), &c)
        );
    }

    #[test]
    fn engel_words() {
        let (x, y) = (w("x"), w("y"));
        assert_eq!(Word::engel(&x, &y, 1).unwrap(), Word::commutator(&x, &y));
        assert_eq!(
            Word::engel(&x, &y, 2).unwrap(),
            Word::commutator(&Word::commutator(&x, &y), &y)
        );
        for n in 1..6 {
            assert!(Word::engel(&x, &x, n).unwrap().is_identity());
        }
        assert!(Word::engel(&x, &y, 0).is_err());
    }

    #[test]
    fn rho_of_ell_and_defining_relator() {
        let a = w("a");
        let l = Word::ell(&a);
        assert_eq!(l.to_string(), "a^-1*a~");
        let [r1, r2, r3] = l.rho();
        assert_eq!(r1, a.inverse());
        assert!(r2.is_identity());
        assert_eq!(r3, a);
        let rel = Word::commutator(&a, &a.bar());
        assert!(rel.rho().iter().all(Word::is_identity));
    }

    #[test]
    fn cyclic_reduction() {
        let (a, b) = (w("a"), w("b"));
        let u = Word::product([&b, &a, &b.inverse()]);
        assert_eq!(u.cyclically_reduced(), a);
        assert_eq!(Word::commutator(&a, &b).cyclically_reduced().len(), 4);
    }

    #[test]
    fn display_compresses_runs() {
        let a = w("a");
        let u = Word::product([&a.pow(3), &w("b").inverse().pow(2), &a.bar()]);
        assert_eq!(u.to_string(), "a^3*b^-2*a~");
        assert_eq!(Word::identity().to_string(), "1");
    }
}
