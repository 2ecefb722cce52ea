//! Forward multi-scale CGR encoding and exact inverse decoding.
//!
//! A sequence is tokenised into overlapping k-mers, each token pulls the
//! current point halfway toward its corner, starting from the origin. With
//! exact rational points the step inverts as c = 2*p_t - p_{t-1}, which
//! identifies the token uniquely because corners are pairwise distinct, so
//! the whole sequence is recovered in linear time.

use std::collections::BTreeMap;

use num::{BigInt, BigUint};
use serde::Serialize;

use crate::alphabet::{Alphabet, BaseAlphabet, CornerTable};
use crate::error::{Error, Result};
use crate::rational::{Point2, Rational};
use crate::scalar::CgrScalar;

/// One scale's trajectory: p_0 = origin plus one point per k-mer token.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    scale: usize,
    source_len: usize,
    points: Vec<Point2<S>>,
}

impl<S: CgrScalar> Trajectory<S> {
    pub fn scale(&self) -> usize {
        self.scale
    }

    /// Length n of the encoded sequence.
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// Number of steps n_k = n - k + 1.
    pub fn step_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn points(&self) -> &[Point2<S>] {
        &self.points
    }

    pub fn last_point(&self) -> &Point2<S> {
        self.points.last().unwrap()
    }
}

/// Corner table converted once into scalar type `S`, so repeated encodes do
/// not re-convert per step.
#[derive(Clone, Debug)]
pub struct ScalarCorners<S> {
    alphabet: Alphabet,
    q: u64,
    corners: Vec<Point2<S>>,
}

impl<S: CgrScalar> ScalarCorners<S> {
    pub fn from_table(table: &CornerTable) -> Self {
        ScalarCorners {
            alphabet: table.alphabet().clone(),
            q: table.q(),
            corners: table
                .corners()
                .iter()
                .map(|p| Point2::new(S::from_rational(&p.x), S::from_rational(&p.y)))
                .collect(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

fn check_length(seq: &str, k: usize) -> Result<()> {
    if !seq.is_ascii() {
        return Err(Error::InvalidToken {
            token: seq.chars().find(|c| !c.is_ascii()).unwrap().to_string(),
            position: 0,
            reason: "sequence contains non-ASCII characters".into(),
        });
    }
    if seq.len() < k {
        return Err(Error::SequenceTooShort {
            length: seq.len(),
            scale: k,
        });
    }
    Ok(())
}

/// Sliding window of n-k+1 overlapping k-mer tokens.
pub fn kmer_stream(seq: &str, k: usize) -> Result<Vec<String>> {
    check_length(seq, k)?;
    Ok(seq
        .as_bytes()
        .windows(k)
        .map(|w| String::from_utf8(w.to_vec()).unwrap())
        .collect())
}

fn encode_internal<S: CgrScalar>(
    seq: &str,
    alphabet: &Alphabet,
    corners: &[Point2<S>],
) -> Result<Trajectory<S>> {
    let k = alphabet.k();
    check_length(seq, k)?;
    let bytes = seq.as_bytes();
    let steps = bytes.len() - k + 1;
    let mut points = Vec::with_capacity(steps + 1);
    points.push(Point2::origin());
    for t in 0..steps {
        let window = std::str::from_utf8(&bytes[t..t + k]).unwrap();
        let idx = alphabet.token_index(window).map_err(|e| match e {
            // report the offending position in sequence coordinates
            Error::InvalidToken {
                token,
                position,
                reason,
            } => Error::InvalidToken {
                token,
                position: t + position,
                reason,
            },
            other => other,
        })?;
        let prev = points.last().unwrap();
        points.push(Point2::midpoint(prev, &corners[idx]));
    }
    Ok(Trajectory {
        scale: k,
        source_len: bytes.len(),
        points,
    })
}

/// Exact encode of one scale against a corner table.
pub fn encode_scale(seq: &str, table: &CornerTable) -> Result<Trajectory<Rational>> {
    encode_internal(seq, table.alphabet(), table.corners())
}

/// Generic encode against pre-converted corners; with `S = f64` this is the
/// fixed-precision fast path used for feature extraction only.
pub fn encode_scale_with<S: CgrScalar>(seq: &str, corners: &ScalarCorners<S>) -> Result<Trajectory<S>> {
    encode_internal(seq, &corners.alphabet, &corners.corners)
}

/// Exact trajectories at every requested scale. Scales default to {1,2,3,4}
/// at the call sites that take no explicit set.
pub fn encode_multiscale(
    seq: &str,
    base: BaseAlphabet,
    scales: &[usize],
    alphabet_limit: usize,
) -> Result<BTreeMap<usize, Trajectory<Rational>>> {
    let mut out = BTreeMap::new();
    for &k in scales {
        if seq.len() < k {
            return Err(Error::SequenceTooShort {
                length: seq.len(),
                scale: k,
            });
        }
        let table = CornerTable::build(Alphabet::with_limit(base, k, alphabet_limit)?)?;
        out.insert(k, encode_scale(seq, &table)?);
    }
    Ok(out)
}

/// Exact inverse of [`encode_scale`]: recover the token at each step from
/// c = 2*p_t - p_{t-1}, then reassemble the sequence from the overlapping
/// tokens (append the last symbol of each successive token, failing on any
/// k-1 overlap mismatch).
pub fn decode(trajectory: &Trajectory<Rational>, table: &CornerTable) -> Result<String> {
    let k = table.alphabet().k();
    let two = Rational::from_integer(BigInt::from(2));
    let mut seq = String::new();
    let mut prev_token: Option<String> = None;
    for t in 1..trajectory.points.len() {
        let p = &trajectory.points[t];
        let q = &trajectory.points[t - 1];
        let corner = Point2::new(&two * &p.x - &q.x, &two * &p.y - &q.y);
        let idx = table
            .corner_index(&corner)
            .ok_or(Error::CorruptedTrajectory { step: t })?;
        let token = table.alphabet().token(idx);
        match &prev_token {
            None => seq.push_str(&token),
            Some(prev) => {
                if prev[1..] != token[..k - 1] {
                    return Err(Error::InconsistentStream { step: t });
                }
                seq.push_str(&token[k - 1..]);
            }
        }
        prev_token = Some(token);
    }
    Ok(seq)
}

/// Denominator audit for a trajectory against the q * 2^t growth law.
#[derive(Clone, Debug)]
pub struct PrecisionReport {
    /// Largest coordinate denominator anywhere in the trajectory.
    pub max_denominator: BigUint,
    /// q * 2^{n_k}, the bound every denominator must divide.
    pub bound: BigUint,
    /// True when the denominator of every p_t divides q * 2^t.
    pub satisfied: bool,
}

pub fn check_precision_bound(trajectory: &Trajectory<Rational>, q: u64) -> PrecisionReport {
    let mut max_denominator = BigUint::from(1u32);
    let mut satisfied = true;
    let q_big = BigUint::from(q);
    let mut step_bound = q_big.clone();
    for (t, p) in trajectory.points.iter().enumerate() {
        if t > 0 {
            step_bound <<= 1; // q * 2^t
        }
        for den in [p.x.denom().magnitude(), p.y.denom().magnitude()] {
            if den > &max_denominator {
                max_denominator = den.clone();
            }
            if !(&step_bound % den).is_zero() {
                satisfied = false;
            }
        }
    }
    let bound = q_big << trajectory.step_count();
    PrecisionReport {
        max_denominator,
        bound,
        satisfied,
    }
}

use num::traits::Zero;

/// Lossless JSON rendition of a trajectory; points as "num/den" strings.
#[derive(Debug, Serialize)]
pub struct TrajectoryJson {
    pub scale: usize,
    pub n: usize,
    pub points: Vec<[String; 2]>,
    pub tokens: Vec<String>,
}

impl TrajectoryJson {
    pub fn new(trajectory: &Trajectory<Rational>, tokens: Vec<String>) -> Self {
        TrajectoryJson {
            scale: trajectory.scale(),
            n: trajectory.source_len(),
            points: trajectory
                .points()
                .iter()
                .map(|p| p.to_fraction_strings())
                .collect(),
            tokens,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{BaseAlphabet, DEFAULT_ALPHABET_LIMIT};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dna_table(k: usize) -> CornerTable {
        CornerTable::build(Alphabet::new(BaseAlphabet::Dna, k).unwrap()).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn random_dna(rng: &mut StdRng, len: usize) -> String {
        (0..len)
            .map(|_| b"ATGC"[rng.random_range(0..4)] as char)
            .collect()
    }

    #[test]
    fn kmer_stream_examples() {
        assert_eq!(kmer_stream("ATCG", 2).unwrap(), vec!["AT", "TC", "CG"]);
        assert_eq!(kmer_stream("ATCGATCGTAGC", 4).unwrap().len(), 9);
        assert!(matches!(
            kmer_stream("A", 2),
            Err(Error::SequenceTooShort { length: 1, scale: 2 })
        ));
    }

    #[test]
    fn encode_single_symbol() {
        let t = encode_scale("A", &dna_table(1)).unwrap();
        assert_eq!(t.points().len(), 2);
        assert_eq!(t.points()[1], Point2::new(rat(1, 2), rat(0, 1)));
    }

    #[test]
    fn encode_two_symbols() {
        let t = encode_scale("AT", &dna_table(1)).unwrap();
        assert_eq!(
            t.points(),
            &[
                Point2::new(rat(0, 1), rat(0, 1)),
                Point2::new(rat(1, 2), rat(0, 1)),
                Point2::new(rat(1, 4), rat(1, 2)),
            ]
        );
    }

    #[test]
    fn encode_twelve_mer_has_thirteen_points() {
        let t = encode_scale("ATCGATCGTAGC", &dna_table(1)).unwrap();
        assert_eq!(t.points().len(), 13);
    }

    #[test]
    fn multiscale_point_counts() {
        let m = encode_multiscale("ATCGATCGTAGC", BaseAlphabet::Dna, &[1, 2, 3, 4], DEFAULT_ALPHABET_LIMIT)
            .unwrap();
        let counts: Vec<usize> = m.values().map(|t| t.points().len()).collect();
        assert_eq!(counts, vec![13, 12, 11, 10]);
    }

    #[test]
    fn homopolymer_converges_along_x() {
        // closed form p_t = (1 - 2^-t, 0) toward corner (1, 0)
        let t = encode_scale("AAAA", &dna_table(1)).unwrap();
        assert_eq!(t.points().len(), 5);
        for (i, p) in t.points().iter().enumerate() {
            let expect = rat(1, 1) - rat(1, 1) / Rational::from_integer(BigInt::from(1i64 << i));
            assert_eq!(p.x, expect);
            assert_eq!(p.y, rat(0, 1));
        }
    }

    #[test]
    fn multiscale_too_short() {
        assert!(matches!(
            encode_multiscale("AT", BaseAlphabet::Dna, &[3], DEFAULT_ALPHABET_LIMIT),
            Err(Error::SequenceTooShort { length: 2, scale: 3 })
        ));
    }

    #[test]
    fn invalid_symbol_reports_sequence_position() {
        match encode_scale("ATNG", &dna_table(1)) {
            Err(Error::InvalidToken { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn roundtrip_twelve_mer() {
        let table = dna_table(1);
        let t = encode_scale("ATCGATCGTAGC", &table).unwrap();
        assert_eq!(decode(&t, &table).unwrap(), "ATCGATCGTAGC");
    }

    #[test]
    fn roundtrip_scale_three_random() {
        let table = dna_table(3);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let s = random_dna(&mut rng, 50);
            let t = encode_scale(&s, &table).unwrap();
            assert_eq!(decode(&t, &table).unwrap(), s);
        }
    }

    #[test]
    fn perturbed_trajectory_is_detected() {
        let table = dna_table(1);
        let mut t = encode_scale("ATCG", &table).unwrap();
        let delta = rat(1, 4 * table.q() as i64);
        t.points[2].x = &t.points[2].x + &delta;
        match decode(&t, &table) {
            Err(Error::CorruptedTrajectory { step }) => assert_eq!(step, 2),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn closed_form_matches_iterative_encoder() {
        // p_t = sum_j 2^{-(t-j+1)} c_j, exactly
        let table = dna_table(1);
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..10 {
            let s = random_dna(&mut rng, 40);
            let t = encode_scale(&s, &table).unwrap();
            let tokens = kmer_stream(&s, 1).unwrap();
            for (step, p) in t.points().iter().enumerate().skip(1) {
                let mut x = rat(0, 1);
                let mut y = rat(0, 1);
                for (j, tok) in tokens.iter().take(step).enumerate() {
                    let c = table.corner(table.alphabet().token_index(tok).unwrap());
                    let w = rat(1, 1i64 << (step - j));
                    x = x + &w * &c.x;
                    y = y + &w * &c.y;
                }
                assert_eq!((&p.x, &p.y), (&x, &y));
            }
        }
    }

    #[test]
    fn precision_bound_for_short_sequence() {
        let table = dna_table(1);
        let t = encode_scale("AT", &table).unwrap();
        let report = check_precision_bound(&t, table.q());
        assert!(report.satisfied);
        assert!(report.max_denominator <= BigUint::from(64u32));
        assert_eq!(report.bound, BigUint::from(64u32));
    }

    #[test]
    fn precision_bound_origin_only() {
        let t = Trajectory {
            scale: 1,
            source_len: 1,
            points: vec![Point2::<Rational>::origin()],
        };
        let report = check_precision_bound(&t, 16);
        assert_eq!(report.max_denominator, BigUint::from(1u32));
        assert!(report.satisfied);
    }

    #[test]
    fn points_stay_in_unit_square() {
        let table = dna_table(2);
        let mut rng = StdRng::seed_from_u64(21);
        let s = random_dna(&mut rng, 120);
        let one = rat(1, 1);
        for p in encode_scale(&s, &table).unwrap().points() {
            assert!(p.x >= -one.clone() && p.x <= one);
            assert!(p.y >= -one.clone() && p.y <= one);
        }
    }

    #[test]
    fn trajectory_json_field_order() {
        let table = dna_table(1);
        let t = encode_scale("AT", &table).unwrap();
        let j = TrajectoryJson::new(&t, kmer_stream("AT", 1).unwrap());
        let s = serde_json::to_string(&j).unwrap();
        assert!(s.starts_with(r#"{"scale":1,"n":2,"points":[["0/1","0/1"],["1/2","0/1"],["1/4","1/2"]],"tokens":["A","T"]}"#));
    }

    #[test]
    fn float_path_tracks_exact_path() {
        let table = dna_table(1);
        let fast = ScalarCorners::<f64>::from_table(&table);
        let mut rng = StdRng::seed_from_u64(33);
        let s = random_dna(&mut rng, 200);
        let exact = encode_scale(&s, &table).unwrap();
        let float = encode_scale_with(&s, &fast).unwrap();
        for (a, b) in exact.points().iter().zip(float.points()) {
            assert!((a.x.to_f64() - b.x).abs() < 1e-12);
            assert!((a.y.to_f64() - b.y).abs() < 1e-12);
        }
    }
}
