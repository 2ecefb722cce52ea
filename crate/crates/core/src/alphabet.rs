//! Base and k-mer-extended alphabets, the token index map, and the exact
//! corner-point table.
//!
//! The scale-k alphabet is the full set of m^k k-mers in lexicographic order
//! over the base ordering, so the token index is a bijection and corner
//! assignment stays sequence-independent. Corner i sits at the grid-rounded
//! position of (cos 2*pi*i/M, sin 2*pi*i/M).

use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{grid_modulus, snap_round_q, Point2, Rational};

/// Default cap on the extended alphabet size (covers DNA k<=8, protein k<=3).
/// Protein k=4 (M = 160,000) needs the explicit override.
pub const DEFAULT_ALPHABET_LIMIT: usize = 65_536;

/// DNA base order, fixed as A, T, G, C.
pub const DNA_SYMBOLS: &[u8] = b"ATGC";
/// The 20 standard residues in one-letter alphabetical order.
pub const PROTEIN_SYMBOLS: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseAlphabet {
    Dna,
    Protein,
}

impl BaseAlphabet {
    pub fn symbols(self) -> &'static [u8] {
        match self {
            BaseAlphabet::Dna => DNA_SYMBOLS,
            BaseAlphabet::Protein => PROTEIN_SYMBOLS,
        }
    }

    pub fn size(self) -> usize {
        self.symbols().len()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaseAlphabet::Dna => "DNA",
            BaseAlphabet::Protein => "PROTEIN",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DNA" => Ok(BaseAlphabet::Dna),
            "PROTEIN" => Ok(BaseAlphabet::Protein),
            other => Err(Error::InvalidArgument(format!(
                "unknown sequence kind {other:?}"
            ))),
        }
    }

    /// Rank of a single base symbol, case-insensitive.
    fn symbol_rank(self, c: u8) -> Option<usize> {
        let up = c.to_ascii_uppercase();
        self.symbols().iter().position(|&s| s == up)
    }
}

/// A base alphabet extended to tokens of length k; size M = m^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    base: BaseAlphabet,
    k: usize,
    size: usize,
}

impl Alphabet {
    /// Build the full lexicographic k-mer alphabet, capped at
    /// [`DEFAULT_ALPHABET_LIMIT`] tokens.
    pub fn new(base: BaseAlphabet, k: usize) -> Result<Self> {
        Self::with_limit(base, k, DEFAULT_ALPHABET_LIMIT)
    }

    /// Same as [`Alphabet::new`] but with a caller-chosen size cap
    /// (`usize::MAX` to lift it entirely).
    pub fn with_limit(base: BaseAlphabet, k: usize, limit: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        let m = base.size();
        let mut size: usize = 1;
        for _ in 0..k {
            size = size
                .checked_mul(m)
                .ok_or(Error::AlphabetTooLarge { size: usize::MAX, limit })?;
            if size > limit {
                return Err(Error::AlphabetTooLarge { size, limit });
            }
        }
        Ok(Alphabet { base, k, size })
    }

    pub fn base(&self) -> BaseAlphabet {
        self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// M = m^k.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Lexicographic rank of a token under the base order. Input is
    /// upper-cased before validation; errors name the offending position
    /// within the token.
    pub fn token_index(&self, token: &str) -> Result<usize> {
        let bytes = token.as_bytes();
        if bytes.len() != self.k {
            return Err(Error::InvalidToken {
                token: token.to_string(),
                position: bytes.len().min(self.k),
                reason: format!("expected length {}, got {}", self.k, bytes.len()),
            });
        }
        let m = self.base.size();
        let mut index = 0usize;
        for (pos, &c) in bytes.iter().enumerate() {
            let rank = self.base.symbol_rank(c).ok_or_else(|| Error::InvalidToken {
                token: token.to_string(),
                position: pos,
                reason: format!("symbol {:?} is not in the {} alphabet", c as char, self.base.as_str()),
            })?;
            index = index * m + rank;
        }
        Ok(index)
    }

    /// Token with the given lexicographic rank; inverse of `token_index`.
    pub fn token(&self, mut index: usize) -> String {
        assert!(index < self.size, "token index out of range");
        let symbols = self.base.symbols();
        let m = symbols.len();
        let mut out = vec![0u8; self.k];
        for slot in out.iter_mut().rev() {
            *slot = symbols[index % m];
            index /= m;
        }
        String::from_utf8(out).unwrap()
    }

    /// All tokens in order. O(M k) memory; prefer `token(i)` for large M.
    pub fn tokens(&self) -> Vec<String> {
        (0..self.size).map(|i| self.token(i)).collect()
    }
}

/// Exact corner points for an alphabet, plus the reverse map used by the
/// decoder. Immutable after construction; share freely across threads.
#[derive(Clone, Debug)]
pub struct CornerTable {
    alphabet: Alphabet,
    q: u64,
    corners: Vec<Point2<Rational>>,
    index_of: HashMap<Point2<Rational>, usize>,
}

impl CornerTable {
    /// corners[i] = (round_q(cos 2*pi*i/M), round_q(sin 2*pi*i/M)) with
    /// q the grid modulus for M.
    pub fn build(alphabet: Alphabet) -> Result<Self> {
        let m = alphabet.size();
        let q = grid_modulus(m)?;
        let mut corners = Vec::with_capacity(m);
        let mut index_of = HashMap::with_capacity(m);
        for i in 0..m {
            let angle = TAU * i as f64 / m as f64;
            let p = Point2::new(snap_round_q(angle.cos(), q)?, snap_round_q(angle.sin(), q)?);
            index_of.insert(p.clone(), i);
            corners.push(p);
        }
        debug_assert_eq!(index_of.len(), m, "corner points must be distinct");
        Ok(CornerTable {
            alphabet,
            q,
            corners,
            index_of,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn corners(&self) -> &[Point2<Rational>] {
        &self.corners
    }

    pub fn corner(&self, i: usize) -> &Point2<Rational> {
        &self.corners[i]
    }

    /// Exact reverse lookup; `None` when the point is not a corner.
    pub fn corner_index(&self, p: &Point2<Rational>) -> Option<usize> {
        self.index_of.get(p).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn dna_k1_tokens_and_size() {
        let a = Alphabet::new(BaseAlphabet::Dna, 1).unwrap();
        assert_eq!(a.tokens(), vec!["A", "T", "G", "C"]);
        assert_eq!(a.size(), 4);
    }

    #[test]
    fn dna_k2_lexicographic_product() {
        let a = Alphabet::new(BaseAlphabet::Dna, 2).unwrap();
        assert_eq!(a.size(), 16);
        assert_eq!(a.token_index("AA").unwrap(), 0);
        assert_eq!(a.token_index("AT").unwrap(), 1);
        assert_eq!(a.token(0), "AA");
        assert_eq!(a.token(1), "AT");
    }

    #[test]
    fn protein_k1_size() {
        let a = Alphabet::new(BaseAlphabet::Protein, 1).unwrap();
        assert_eq!(a.size(), 20);
    }

    #[test]
    fn token_index_examples() {
        let dna = Alphabet::new(BaseAlphabet::Dna, 1).unwrap();
        assert_eq!(dna.token_index("G").unwrap(), 2);
        assert_eq!(dna.token_index("g").unwrap(), 2); // lowercase accepted
        match dna.token_index("N") {
            Err(Error::InvalidToken { position, .. }) => assert_eq!(position, 0),
            other => panic!("expected invalid-token error, got {other:?}"),
        }
    }

    #[test]
    fn token_index_is_inverse_of_token() {
        let a = Alphabet::new(BaseAlphabet::Dna, 3).unwrap();
        for i in 0..a.size() {
            assert_eq!(a.token_index(&a.token(i)).unwrap(), i);
        }
    }

    #[test]
    fn protein_k4_needs_override() {
        assert!(matches!(
            Alphabet::new(BaseAlphabet::Protein, 4),
            Err(Error::AlphabetTooLarge { size: 160_000, .. })
        ));
        let a = Alphabet::with_limit(BaseAlphabet::Protein, 4, usize::MAX).unwrap();
        assert_eq!(a.size(), 160_000);
    }

    #[test]
    fn dna_k1_corners_are_axis_points() {
        let t = CornerTable::build(Alphabet::new(BaseAlphabet::Dna, 1).unwrap()).unwrap();
        assert_eq!(t.q(), 16);
        let expect = [
            Point2::new(rat(1, 1), rat(0, 1)),
            Point2::new(rat(0, 1), rat(1, 1)),
            Point2::new(rat(-1, 1), rat(0, 1)),
            Point2::new(rat(0, 1), rat(-1, 1)),
        ];
        assert_eq!(t.corners(), &expect);
        // corner multiset is invariant under 90-degree rotation
        for p in t.corners() {
            let rotated = Point2::new(-p.y.clone(), p.x.clone());
            assert!(t.corner_index(&rotated).is_some());
        }
    }

    #[test]
    fn protein_corner_at_quarter_turn() {
        let t = CornerTable::build(Alphabet::new(BaseAlphabet::Protein, 1).unwrap()).unwrap();
        assert_eq!(t.q(), 128);
        // 2*pi*5/20 = pi/2
        assert_eq!(t.corner(5), &Point2::new(rat(0, 1), rat(1, 1)));
    }

    #[test]
    fn corners_distinct_and_on_grid() {
        for (base, kmax) in [(BaseAlphabet::Dna, 4usize), (BaseAlphabet::Protein, 2)] {
            for k in 1..=kmax {
                let t = CornerTable::build(Alphabet::new(base, k).unwrap()).unwrap();
                let mut sorted: Vec<_> = t.corners().to_vec();
                sorted.sort_by(|a, b| (a.x.cmp(&b.x)).then(a.y.cmp(&b.y)));
                sorted.dedup();
                assert_eq!(sorted.len(), t.alphabet().size());
                let q = BigInt::from(t.q());
                for p in t.corners() {
                    assert!((&q % p.x.denom()) == BigInt::from(0));
                    assert!((&q % p.y.denom()) == BigInt::from(0));
                }
            }
        }
    }
}
