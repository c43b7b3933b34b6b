//! Finitely presented groups at desk scale: inverse-closed alphabets, words,
//! presentations, shortlex rewriting systems and multi-metric group fixtures.

mod fixture;
mod presentation;
mod rewriting;

use std::fmt;
use std::ops::Deref;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use fixture::{GroupFixture, Metric};
pub use presentation::{parse_presentation, Presentation};
pub use rewriting::{ConfluenceReport, ConfluenceWitness, RewritingSystem, Rule};

/// Hard limit on alphabet size; letters are stored as `u8` and the rewriting
/// matcher keeps a dense transition table.
pub const MAX_LETTERS: usize = 64;

/// Index of a symbol in an [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u8);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite word over an alphabet. Empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(SmallVec<[Letter; 16]>);

impl Word {
    pub fn new() -> Self {
        Word(SmallVec::new())
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        Word(SmallVec::from_slice(letters))
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn pop(&mut self) -> Option<Letter> {
        self.0.pop()
    }

    pub fn extend_from_slice(&mut self, letters: &[Letter]) {
        self.0.extend_from_slice(letters);
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut w = self.clone();
        w.extend_from_slice(other);
        w
    }

    /// `self` repeated `n` times.
    pub fn power(&self, n: usize) -> Word {
        let mut w = Word(SmallVec::with_capacity(self.len() * n));
        for _ in 0..n {
            w.extend_from_slice(self);
        }
        w
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<u8> = self.0.iter().map(|l| l.0).collect();
        write!(f, "Word{idx:?}")
    }
}

/// Ordered symbols with an involutive inverse map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    inverse: Vec<Letter>,
}

impl Alphabet {
    /// Builds an alphabet, checking that `inverse` is an involution.
    pub fn new(symbols: Vec<char>, inverse: Vec<Letter>) -> Result<Self> {
        if symbols.len() != inverse.len() {
            return Err(Error::Presentation(
                "inverse map must cover every letter".into(),
            ));
        }
        if symbols.len() > MAX_LETTERS {
            return Err(Error::Presentation(format!(
                "alphabet has {} letters, at most {MAX_LETTERS} supported",
                symbols.len()
            )));
        }
        for (i, &s) in symbols.iter().enumerate() {
            if symbols[..i].contains(&s) {
                return Err(Error::Presentation(format!("duplicate letter `{s}`")));
            }
        }
        for (i, inv) in inverse.iter().enumerate() {
            if inv.index() >= symbols.len() || inverse[inv.index()].index() != i {
                return Err(Error::Presentation(format!(
                    "inverse not involutive at letter `{}`",
                    symbols[i]
                )));
            }
        }
        Ok(Alphabet { symbols, inverse })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.symbols.len()).map(|i| Letter(i as u8))
    }

    pub fn symbol(&self, letter: Letter) -> char {
        self.symbols[letter.index()]
    }

    pub fn letter(&self, symbol: char) -> Option<Letter> {
        self.symbols
            .iter()
            .position(|&s| s == symbol)
            .map(|i| Letter(i as u8))
    }

    pub fn inverse(&self, letter: Letter) -> Letter {
        self.inverse[letter.index()]
    }

    /// Formal inverse: reversed word with every letter inverted.
    pub fn invert(&self, word: &[Letter]) -> Word {
        word.iter().rev().map(|&l| self.inverse(l)).collect()
    }

    /// Parses a word such as `a3bC`; a digit run after a letter is an
    /// exponent. `-`, `ε` and the empty string denote the identity.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if matches!(text, "" | "-" | "ε") {
            return Ok(Word::new());
        }
        let chars: Vec<char> = text.chars().collect();
        let mut word = Word::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let letter = self
                .letter(c)
                .ok_or_else(|| Error::Presentation(format!("unknown letter `{c}` in `{text}`")))?;
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let exp = if start == i {
                1
            } else {
                chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse::<usize>()
                    .map_err(|e| Error::Presentation(format!("bad exponent in `{text}`: {e}")))?
            };
            for _ in 0..exp {
                word.push(letter);
            }
        }
        Ok(word)
    }

    pub fn render(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter().map(|&l| self.symbol(l)).collect()
    }
}
