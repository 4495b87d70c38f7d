use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A vertex of the Ulam–Harris tree: a finite sequence of positive letters.
///
/// The derived order is lexicographic with a prefix before its extensions,
/// which is the canonical vertex order everywhere in the crate.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u32>) -> Result<Self> {
        if let Some(pos) = letters.iter().position(|&l| l == 0) {
            return Err(Error::Parse {
                token: format!("{letters:?}"),
                reason: format!("letter {pos} is zero"),
            });
        }
        Ok(Word(letters))
    }

    /// Panics on a zero letter; meant for literals in code and tests.
    pub fn of(letters: &[u32]) -> Self {
        Word::new(letters.to_vec()).expect("letters are positive")
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn height(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parent(&self) -> Option<Word> {
        self.0.split_last().map(|(_, init)| Word(init.to_vec()))
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn child(&self, i: u32) -> Word {
        assert!(i >= 1, "child positions start at 1");
        let mut letters = self.0.clone();
        letters.push(i);
        Word(letters)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// `j · self`
    pub fn prepend(&self, j: u32) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + 1);
        letters.push(j);
        letters.extend_from_slice(&self.0);
        Word(letters)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The suffix after `prefix`, if `prefix` is a prefix.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|s| Word(s.to_vec()))
    }

    /// Ancestral line `u_0 = ∅, u_1, …, u_h = self`.
    pub fn ancestors(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.0.len()).map(move |k| Word(self.0[..k].to_vec()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s == "0" {
            return Ok(Word::root());
        }
        let bad = |reason: &str| Error::Parse {
            token: s.to_string(),
            reason: reason.to_string(),
        };
        let letters = s
            .split('.')
            .map(|t| t.parse::<u32>().map_err(|_| bad("letters must be positive integers")))
            .collect::<Result<Vec<_>>>()?;
        if letters.contains(&0) {
            return Err(bad("letters must be positive integers"));
        }
        Ok(Word(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
