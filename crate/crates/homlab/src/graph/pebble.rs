use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pebble (or variable) name: reusable `x_i` or non-reusable `y_i`, 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Pebble {
    X(usize),
    Y(usize),
}

impl Pebble {
    pub fn is_x(self) -> bool {
        matches!(self, Pebble::X(_))
    }

    pub fn is_y(self) -> bool {
        matches!(self, Pebble::Y(_))
    }

    pub fn index(self) -> usize {
        match self {
            Pebble::X(i) | Pebble::Y(i) => i,
        }
    }
}

impl fmt::Display for Pebble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pebble::X(i) => write!(f, "x{i}"),
            Pebble::Y(i) => write!(f, "y{i}"),
        }
    }
}

impl FromStr for Pebble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Pebble> {
        let bad = || Error::UnknownPebble(s.to_string());
        let (head, tail) = s.split_at(s.len().min(1));
        let idx: usize = tail.parse().map_err(|_| bad())?;
        if idx == 0 {
            return Err(bad());
        }
        match head {
            "x" => Ok(Pebble::X(idx)),
            "y" => Ok(Pebble::Y(idx)),
            _ => Err(bad()),
        }
    }
}

impl From<Pebble> for String {
    fn from(p: Pebble) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Pebble {
    type Error = Error;

    fn try_from(s: String) -> Result<Pebble> {
        s.parse()
    }
}

/// The pebble alphabet `[x_{k1}, y_{k2}]`. Slots are numbered x-block first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Alphabet {
    pub k1: usize,
    pub k2: usize,
}

impl Alphabet {
    /// Requires `k1 + k2 >= 1`.
    pub fn new(k1: usize, k2: usize) -> Result<Alphabet> {
        if k1 + k2 == 0 {
            return Err(Error::EmptyAlphabet { k1, k2 });
        }
        Ok(Alphabet { k1, k2 })
    }

    /// Alphabet without the non-emptiness check; used for label bookkeeping.
    pub const fn raw(k1: usize, k2: usize) -> Alphabet {
        Alphabet { k1, k2 }
    }

    /// Smallest alphabet containing every given pebble.
    pub fn covering(pebbles: impl IntoIterator<Item = Pebble>) -> Alphabet {
        pebbles.into_iter().fold(Alphabet::raw(0, 0), |a, p| match p {
            Pebble::X(i) => Alphabet::raw(a.k1.max(i), a.k2),
            Pebble::Y(i) => Alphabet::raw(a.k1, a.k2.max(i)),
        })
    }

    pub fn size(self) -> usize {
        self.k1 + self.k2
    }

    pub fn contains(self, p: Pebble) -> bool {
        match p {
            Pebble::X(i) => i >= 1 && i <= self.k1,
            Pebble::Y(i) => i >= 1 && i <= self.k2,
        }
    }

    pub fn slot(self, p: Pebble) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        Some(match p {
            Pebble::X(i) => i - 1,
            Pebble::Y(i) => self.k1 + i - 1,
        })
    }

    pub fn pebble(self, slot: usize) -> Pebble {
        if slot < self.k1 {
            Pebble::X(slot + 1)
        } else {
            Pebble::Y(slot - self.k1 + 1)
        }
    }

    pub fn pebbles(self) -> impl Iterator<Item = Pebble> {
        (0..self.size()).map(move |s| self.pebble(s))
    }

    pub fn xs(self) -> impl Iterator<Item = Pebble> {
        (1..=self.k1).map(Pebble::X)
    }

    pub fn ys(self) -> impl Iterator<Item = Pebble> {
        (1..=self.k2).map(Pebble::Y)
    }

    /// Smallest alphabet containing both.
    pub fn join(self, other: Alphabet) -> Alphabet {
        Alphabet { k1: self.k1.max(other.k1), k2: self.k2.max(other.k2) }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_roundtrip() {
        let a = Alphabet::new(2, 3).unwrap();
        let all: Vec<Pebble> = a.pebbles().collect();
        assert_eq!(all.len(), 5);
        for (s, p) in all.iter().enumerate() {
            assert_eq!(a.slot(*p), Some(s));
        }
        assert_eq!(a.slot(Pebble::X(3)), None);
        assert!(Alphabet::new(0, 0).is_err());
    }

    #[test]
    fn parse_and_order() {
        assert_eq!("y2".parse::<Pebble>().unwrap(), Pebble::Y(2));
        assert!("x0".parse::<Pebble>().is_err());
        assert!("z1".parse::<Pebble>().is_err());
        assert!(Pebble::X(3) < Pebble::Y(1));
    }
}
