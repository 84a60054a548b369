use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

/// Largest input width accepted; tables have `2^n` entries.
pub const MAX_INPUT_BITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TruthTableError {
    #[error("truth table file needs two lines: n, then the table")]
    MissingLine,
    #[error("invalid input width {0:?}")]
    BadWidth(String),
    #[error("n = {0} exceeds the maximum of {MAX_INPUT_BITS}")]
    TooWide(usize),
    #[error("expected {expected} table bits, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("invalid table character {0:?}")]
    BadCharacter(char),
}

/// `f: {0,1}^n -> {0,1}` as an explicit table. Entry `x` is the value on
/// the input whose bits, most significant first, are `x_1 ... x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BooleanFunction {
    n: usize,
    #[serde(serialize_with = "as_bitstring")]
    table: Vec<bool>,
    ones: usize,
}

fn as_bitstring<S: serde::Serializer>(table: &[bool], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&table.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self, TruthTableError> {
        if n > MAX_INPUT_BITS {
            return Err(TruthTableError::TooWide(n));
        }
        if table.len() != 1 << n {
            return Err(TruthTableError::WrongLength {
                expected: 1 << n,
                found: table.len(),
            });
        }
        let ones = table.iter().filter(|&&b| b).count();
        Ok(Self { n, table, ones })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self, TruthTableError> {
        if n > MAX_INPUT_BITS {
            return Err(TruthTableError::TooWide(n));
        }
        Self::new(n, (0..1usize << n).map(f).collect())
    }

    /// The function that is 1 on the first `ones` inputs.
    pub fn with_count(n: usize, ones: usize) -> Result<Self, TruthTableError> {
        Self::from_fn(n, |x| x < ones)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Self, TruthTableError> {
        if n > MAX_INPUT_BITS {
            return Err(TruthTableError::TooWide(n));
        }
        Self::new(n, (0..1usize << n).map(|_| rng.random_bool(0.5)).collect())
    }

    /// A table of `2^n` characters from `{0,1}`, or hex digits after `0x`
    /// (each digit four entries, most significant bit first).
    pub fn from_table_str(n: usize, text: &str) -> Result<Self, TruthTableError> {
        if n > MAX_INPUT_BITS {
            return Err(TruthTableError::TooWide(n));
        }
        let text = text.trim();
        let len = 1usize << n;
        let bits: Vec<bool> = if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
            let digits = len.div_ceil(4);
            if hex.len() != digits {
                return Err(TruthTableError::WrongLength {
                    expected: len,
                    found: 4 * hex.len(),
                });
            }
            let mut bits = Vec::with_capacity(4 * digits);
            for c in hex.chars() {
                let v = c.to_digit(16).ok_or(TruthTableError::BadCharacter(c))?;
                bits.extend((0..4).rev().map(|k| (v >> k) & 1 == 1));
            }
            if bits[len..].iter().any(|&b| b) {
                return Err(TruthTableError::WrongLength {
                    expected: len,
                    found: bits.len(),
                });
            }
            bits.truncate(len);
            bits
        } else {
            text.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(TruthTableError::BadCharacter(other)),
                })
                .collect::<Result<_, _>>()?
        };
        Self::new(n, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    /// Number of inputs mapped to 1.
    pub fn ones(&self) -> usize {
        self.ones
    }
}

/// Two-line file format: `n`, then the table.
impl FromStr for BooleanFunction {
    type Err = TruthTableError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let width = lines.next().ok_or(TruthTableError::MissingLine)?;
        let n: usize = width.parse().map_err(|_| TruthTableError::BadWidth(width.to_string()))?;
        let table = lines.next().ok_or(TruthTableError::MissingLine)?;
        Self::from_table_str(n, table)
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        let bits: String = self.table.iter().map(|&b| if b { '1' } else { '0' }).collect();
        writeln!(f, "{bits}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bits_and_hex() {
        let f: BooleanFunction = "3\n01100001\n".parse().unwrap();
        assert_eq!(f.ones(), 3);
        assert!(f.eval(1) && f.eval(2) && f.eval(7) && !f.eval(0));
        let g: BooleanFunction = "3\n0x61".parse().unwrap();
        assert_eq!(f, g);
        let round: BooleanFunction = f.to_string().parse().unwrap();
        assert_eq!(round, f);
    }

    #[test]
    fn small_hex_tables_use_leading_bits() {
        let f = BooleanFunction::from_table_str(1, "0x8").unwrap();
        assert_eq!(f.table(), &[true, false]);
        assert!(BooleanFunction::from_table_str(1, "0x1").is_err());
    }

    #[test]
    fn rejects_malformed_tables() {
        assert_eq!(
            "2\n011".parse::<BooleanFunction>(),
            Err(TruthTableError::WrongLength { expected: 4, found: 3 })
        );
        assert_eq!("2\n0121".parse::<BooleanFunction>(), Err(TruthTableError::BadCharacter('2')));
        assert_eq!("2".parse::<BooleanFunction>(), Err(TruthTableError::MissingLine));
        assert!(matches!("x\n01".parse::<BooleanFunction>(), Err(TruthTableError::BadWidth(_))));
        assert!(matches!("2\n0xZZ".parse::<BooleanFunction>(), Err(TruthTableError::WrongLength { .. })));
        assert!(matches!("2\n0xG".parse::<BooleanFunction>(), Err(TruthTableError::BadCharacter('G'))));
    }

    #[test]
    fn with_count_sets_ones() {
        let f = BooleanFunction::with_count(4, 5).unwrap();
        assert_eq!(f.ones(), 5);
    }
}
