use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grade-level readability label. Ordinal: `L1 < L2 < L3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Level {
    L1,
    L2,
    L3,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::L1, Level::L2, Level::L3];

    /// Zero-based class index used by the classifiers.
    pub fn index(self) -> usize {
        match self {
            Level::L1 => 0,
            Level::L2 => 1,
            Level::L3 => 2,
        }
    }

    pub fn from_index(index: usize) -> Result<Self> {
        Level::ALL
            .get(index)
            .copied()
            .ok_or_else(|| Error::Validation(format!("class index {index} out of range")))
    }

    /// The grade number 1, 2 or 3.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    /// Ordinal value used when correlating features with grade.
    pub fn ordinal(self) -> f64 {
        f64::from(self.number())
    }
}

impl TryFrom<u8> for Level {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Level::L1),
            2 => Ok(Level::L2),
            3 => Ok(Level::L3),
            other => Err(Error::Validation(format!(
                "grade level must be 1, 2 or 3, got {other}"
            ))),
        }
    }
}

impl From<Level> for u8 {
    fn from(level: Level) -> u8 {
        level.number()
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let trimmed = trimmed
            .strip_prefix('L')
            .or_else(|| trimmed.strip_prefix('l'))
            .unwrap_or(trimmed);
        let n: u8 = trimmed
            .parse()
            .map_err(|_| Error::Validation(format!("invalid grade level `{s}`")))?;
        Level::try_from(n)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.number())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_tagged() {
        assert_eq!("2".parse::<Level>().unwrap(), Level::L2);
        assert_eq!("L3".parse::<Level>().unwrap(), Level::L3);
        assert!("5".parse::<Level>().is_err());
        assert!("x".parse::<Level>().is_err());
    }

    #[test]
    fn index_round_trip() {
        for level in Level::ALL {
            assert_eq!(Level::from_index(level.index()).unwrap(), level);
        }
        assert!(Level::from_index(3).is_err());
    }
}
