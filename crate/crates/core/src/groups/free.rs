use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{paired_names, Group, GroupError};

/// A freely reduced word. Letter `2i` is the `i`-th free generator and
/// `2i + 1` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord(pub Vec<u8>);

impl FreeWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn letter_char(l: u8) -> char {
        let c = (b'a' + l / 2) as char;
        if l % 2 == 0 {
            c
        } else {
            c.to_ascii_uppercase()
        }
    }

    fn parse(text: &str) -> Result<Self, GroupError> {
        if text == "1" {
            return Ok(FreeWord::default());
        }
        let mut out: Vec<u8> = Vec::with_capacity(text.len());
        for c in text.chars() {
            let l = match c {
                'a'..='z' => 2 * (c as u8 - b'a'),
                'A'..='Z' => 2 * (c as u8 - b'A') + 1,
                _ => {
                    return Err(GroupError::Parse {
                        text: text.to_string(),
                        reason: format!("'{c}' is not a generator letter"),
                    })
                }
            };
            if out.last() == Some(&(l ^ 1)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(FreeWord(out))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        self.0
            .iter()
            .try_for_each(|&l| write!(f, "{}", Self::letter_char(l)))
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        FreeWord::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// The free group of rank `k` with generators `a, A, b, B, ...`.
#[derive(Clone, Debug)]
pub struct FreeGroup {
    rank: usize,
    gens: Vec<FreeWord>,
    names: Vec<String>,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<Self, GroupError> {
        if !(1..=26).contains(&rank) {
            return Err(GroupError::InvalidGroup(format!(
                "free group rank must be in 1..=26, got {rank}"
            )));
        }
        Ok(FreeGroup {
            rank,
            gens: (0..2 * rank as u8).map(|l| FreeWord(vec![l])).collect(),
            names: paired_names(rank),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl Group for FreeGroup {
    type Elem = FreeWord;

    fn identity(&self) -> FreeWord {
        FreeWord::default()
    }

    fn mul(&self, a: &FreeWord, b: &FreeWord) -> FreeWord {
        let mut out = a.0.clone();
        for &l in &b.0 {
            if out.last() == Some(&(l ^ 1)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    fn inv(&self, a: &FreeWord) -> FreeWord {
        FreeWord(a.0.iter().rev().map(|l| l ^ 1).collect())
    }

    fn generators(&self) -> &[FreeWord] {
        &self.gens
    }

    fn inverse_generator(&self, s: usize) -> usize {
        s ^ 1
    }

    fn generator_names(&self) -> &[String] {
        &self.names
    }

    fn sort_key(&self, e: &FreeWord) -> Vec<i64> {
        e.0.iter().map(|&l| l as i64).collect()
    }

    fn word(&self, e: &FreeWord) -> Vec<usize> {
        e.0.iter().map(|&l| l as usize).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_inverse() {
        let f = FreeGroup::new(2).unwrap();
        let w = f.parse_word("abAb").unwrap();
        assert_eq!(w.to_string(), "abAb");
        assert_eq!(f.mul(&w, &f.inv(&w)), f.identity());
        assert_eq!(f.parse_word("aA").unwrap(), f.identity());
        assert_eq!(f.parse_word("abBa").unwrap().to_string(), "aa");
    }

    #[test]
    fn serde_uses_word_text() {
        let w = FreeWord(vec![0, 3]);
        assert_eq!(serde_json::to_string(&w).unwrap(), "\"aB\"");
        assert_eq!(serde_json::from_str::<FreeWord>("\"1\"").unwrap(), FreeWord::default());
        assert!(serde_json::from_str::<FreeWord>("\"a-b\"").is_err());
    }

    #[test]
    fn rejects_bad_rank() {
        assert!(FreeGroup::new(0).is_err());
        assert!(FreeGroup::new(27).is_err());
    }
}
