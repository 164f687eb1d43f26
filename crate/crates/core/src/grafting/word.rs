use crate::{Error, Result};

/// A generator or its inverse, indexed into a presentation's name list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

/// A word in the free group on the generators, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn letter(generator: usize, inverse: bool) -> Self {
        Word { letters: vec![Letter { generator, inverse }] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Parses whitespace- or `*`-separated tokens `name`, `name^-1` or `name^k`.
    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            let (name, power) = match token.split_once('^') {
                Some((n, p)) => {
                    let p: i64 = p.parse().map_err(|_| Error::InvalidWord(format!("bad exponent in {token:?}")))?;
                    (n, p)
                }
                None => (token, 1),
            };
            let generator = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::InvalidWord(format!("unknown generator {name:?}")))?;
            if power.unsigned_abs() > 1_000 {
                return Err(Error::InvalidWord(format!("exponent too large in {token:?}")));
            }
            for _ in 0..power.unsigned_abs() {
                letters.push(Letter { generator, inverse: power < 0 });
            }
        }
        Ok(Word { letters })
    }

    pub fn display(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| if l.inverse { format!("{}^-1", names[l.generator]) } else { names[l.generator].clone() })
            .collect();
        parts.join(" ")
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Free reduction: cancels adjacent inverse pairs.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// Free and cyclic reduction.
    pub fn cyclically_reduced(&self) -> Word {
        let mut w = self.reduced().letters;
        while w.len() >= 2 && w[0] == w[w.len() - 1].inv() {
            w.pop();
            w.remove(0);
        }
        Word { letters: w }
    }

    /// Whether the two words agree up to free reduction and cyclic rotation.
    pub fn cyclically_equal(&self, other: &Word) -> bool {
        let a = self.cyclically_reduced().letters;
        let b = other.cyclically_reduced().letters;
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        (0..a.len()).any(|shift| (0..a.len()).all(|i| a[(i + shift) % a.len()] == b[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["a", "b", "c"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_and_display_round_trip() {
        let n = names();
        let w = Word::parse("a b a^-1 b^-1 c", &n).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w.display(&n), "a b a^-1 b^-1 c");
        assert_eq!(Word::parse("a^2*b^-2", &n).unwrap().display(&n), "a a b^-1 b^-1");
        assert!(Word::parse("a d", &n).is_err());
        assert!(Word::parse("a^x", &n).is_err());
        assert!(Word::parse("", &n).unwrap().is_empty());
    }

    #[test]
    fn reductions() {
        let n = names();
        let w = Word::parse("a b b^-1 c c^-1 a^-1", &n).unwrap();
        assert!(w.reduced().is_empty());
        let w = Word::parse("b a c a^-1 b^-1", &n).unwrap();
        assert_eq!(w.cyclically_reduced().display(&n), "c");
        let w = Word::parse("a b", &n).unwrap();
        assert!(w.concat(&w.inverse()).reduced().is_empty());
    }

    #[test]
    fn cyclic_equality() {
        let n = names();
        let r = Word::parse("a b a^-1 b^-1 c", &n).unwrap();
        let s = Word::parse("c a b a^-1 b^-1", &n).unwrap();
        let t = Word::parse("b c a b a^-1 b^-1 b^-1", &n).unwrap();
        assert!(r.cyclically_equal(&s));
        assert!(r.cyclically_equal(&t));
        assert!(!r.cyclically_equal(&Word::parse("a b c", &n).unwrap()));
    }
}
