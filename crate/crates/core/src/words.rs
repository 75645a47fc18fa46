//! Reduced words in a free group and their evaluation as PL circle maps.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::pl::{CirclePL, LiftPL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator {0:?}")]
    UnknownGeneratorName(String),
    #[error("generator index {0} has no assigned map")]
    UnknownGenerator(usize),
    #[error("malformed word token {0:?}")]
    BadToken(String),
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    /// Position in the letter order `a < a⁻¹ < b < b⁻¹ < ...`.
    pub fn rank(self) -> usize {
        2 * self.generator + usize::from(self.inverse)
    }

    pub fn from_rank(rank: usize) -> Self {
        Letter { generator: rank / 2, inverse: rank % 2 == 1 }
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter::new(index, false)])
    }

    pub fn letter(letter: Letter) -> Self {
        Word(vec![letter])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// `by⁻¹ · self · by`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.inverse().multiply(self).multiply(by)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(Word::empty(), |acc, _| acc.multiply(&base))
    }

    /// Net exponent of `generator`.
    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.0.iter().filter(|l| l.generator == generator).map(|l| if l.inverse { -1 } else { 1 }).sum()
    }

    /// Replaces each generator by a word; inverse letters by the inverse word.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut letters = Vec::new();
        for l in &self.0 {
            let w = &images[l.generator];
            if l.inverse {
                letters.extend(w.0.iter().rev().map(|x| x.inv()));
            } else {
                letters.extend(w.0.iter().copied());
            }
        }
        Word::from_letters(letters)
    }

    /// Shortlex comparison under the letter order `a < a⁻¹ < b < b⁻¹ < ...`.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.iter().map(|l| l.rank()).cmp(other.0.iter().map(|l| l.rank())))
    }

    /// Parses `"a b^-1 a^2"`; `""`, `"1"` and `"ε"` denote the empty word.
    pub fn parse(text: &str, names: &[String]) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        for token in text.split(|c: char| c.is_whitespace() || c == '*' || c == '·').filter(|t| !t.is_empty()) {
            if token == "1" || token == "ε" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| WordError::BadToken(token.to_string()))?),
                None => (token, 1),
            };
            let g = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| WordError::UnknownGeneratorName(name.to_string()))?;
            let l = Letter::new(g, exp < 0);
            letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        Ok(Word::from_letters(letters))
    }

    /// Formats with powers grouped, e.g. `"a b^-1 a^2"`; the empty word is `"1"`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = &self.word.0;
        if letters.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < letters.len() {
            let l = letters[i];
            let run = letters[i..].iter().take_while(|&&x| x == l).count();
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let name = self.names.get(l.generator).map(String::as_str).unwrap_or("?");
            let exp = if l.inverse { -(run as i64) } else { run as i64 };
            if exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Default names `x1, x2, ...` for generators of a subgroup.
pub fn numbered_names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

/// Composes lifts along a word: `w = l1 l2 ... ln ↦ L(l1) ∘ ... ∘ L(ln)`.
pub fn lift_word(lifts: &[LiftPL], inverses: &[LiftPL], w: &Word) -> Result<LiftPL, WordError> {
    let mut acc = LiftPL::identity();
    for l in w.letters() {
        let table = if l.inverse { inverses } else { lifts };
        let f = table.get(l.generator).ok_or(WordError::UnknownGenerator(l.generator))?;
        acc = acc.compose(f);
    }
    Ok(acc)
}

/// An assignment of a PL circle map to each generator of a free group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleAction {
    maps: Vec<CirclePL>,
    // exact inverses of the normalized lifts, so that `global_lift` is a homomorphism
    lift_inverses: Vec<LiftPL>,
}

impl CircleAction {
    pub fn new(maps: Vec<CirclePL>) -> Self {
        let lift_inverses = maps.iter().map(|m| m.lift().inverse()).collect();
        CircleAction { maps, lift_inverses }
    }

    pub fn from_lifts(lifts: &[LiftPL]) -> Self {
        Self::new(lifts.iter().map(CirclePL::from_lift).collect())
    }

    pub fn num_generators(&self) -> usize {
        self.maps.len()
    }

    pub fn map(&self, generator: usize) -> &CirclePL {
        &self.maps[generator]
    }

    /// `ρ(w)`; a homomorphism from the free group.
    pub fn evaluate(&self, w: &Word) -> Result<CirclePL, WordError> {
        Ok(CirclePL::from_lift(&self.global_lift(w)?))
    }

    /// The image of `w` under the homomorphism into the lift group sending each
    /// generator to its normalized lift; a lift of `ρ(w)`.
    pub fn global_lift(&self, w: &Word) -> Result<LiftPL, WordError> {
        let mut acc = LiftPL::identity();
        for l in w.letters() {
            let f = if l.inverse {
                self.lift_inverses.get(l.generator)
            } else {
                self.maps.get(l.generator).map(CirclePL::lift)
            };
            acc = acc.compose(f.ok_or(WordError::UnknownGenerator(l.generator))?);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn names() -> Vec<String> {
        vec!["a".to_string(), "b".to_string()]
    }

    fn w(s: &str) -> Word {
        Word::parse(s, &names()).unwrap()
    }

    #[test]
    fn word_op_examples() {
        assert_eq!(w("a b").multiply(&w("b^-1")), w("a"));
        assert_eq!(w("a b").inverse(), w("b^-1 a^-1"));
        assert_eq!(w("b").conjugate(&w("a")), w("a^-1 b a"));
    }

    #[test]
    fn parse_and_display() {
        let x = w("a b^-1 a^2");
        assert_eq!(x.len(), 4);
        assert_eq!(x.display(&names()).to_string(), "a b^-1 a^2");
        assert_eq!(w("a a^-1").display(&names()).to_string(), "1");
        assert_eq!(w("1"), Word::empty());
        assert_eq!(w("b^-3").exponent_sum(1), -3);
        assert!(matches!(Word::parse("c", &names()), Err(WordError::UnknownGeneratorName(_))));
        assert!(matches!(Word::parse("a^x", &names()), Err(WordError::BadToken(_))));
    }

    #[test]
    fn shortlex_order() {
        let order = [w("1"), w("a"), w("a^-1"), w("b"), w("b^-1"), w("a a"), w("a b")];
        for pair in order.windows(2) {
            assert_eq!(pair[0].shortlex_cmp(&pair[1]), Ordering::Less);
        }
    }

    #[test]
    fn substitute_expands() {
        let images = vec![w("a a"), w("a b a^-1")];
        let x = Word::parse("a^-1 b a", &names()).unwrap();
        assert_eq!(x.substitute(&images), w("a^-1 b a"));
    }

    #[test]
    fn evaluate_examples() {
        let half = CirclePL::from_lift(&LiftPL::rotation(ratio(1, 2)));
        let action = CircleAction::new(vec![half.clone()]);
        let names = vec!["a".to_string()];
        assert!(action.evaluate(&Word::empty()).unwrap().is_identity());
        assert_eq!(action.evaluate(&Word::parse("a", &names).unwrap()).unwrap(), half);
        assert!(action.evaluate(&Word::parse("a a", &names).unwrap()).unwrap().is_identity());
        assert_eq!(action.global_lift(&Word::parse("a a", &names).unwrap()).unwrap(), LiftPL::translation(1));
        assert_eq!(action.evaluate(&Word::generator(3)), Err(WordError::UnknownGenerator(3)));
        let two_piece = LiftPL::new(vec![(ratio(0, 1), ratio(1, 4)), (ratio(1, 2), ratio(1, 1))]).unwrap();
        let action = CircleAction::from_lifts(&[two_piece]);
        let back = action.global_lift(&Word::from_letters([Letter::new(0, false), Letter::new(0, true)])).unwrap();
        assert!(back.is_identity());
        let inv = action.global_lift(&Word::letter(Letter::new(0, true))).unwrap();
        assert!(inv.compose(action.map(0).lift()).is_identity());
    }
}
