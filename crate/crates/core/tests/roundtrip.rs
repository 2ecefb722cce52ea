//! Property tests: encode/decode is the identity at every scale, and
//! trajectory denominators obey the q * 2^t growth law.

use mscgr::alphabet::{Alphabet, BaseAlphabet, CornerTable};
use mscgr::cgr::{check_precision_bound, decode, encode_scale};
use proptest::prelude::*;

fn dna_seq() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['A', 'T', 'G', 'C']), 4..=120)
        .prop_map(|v| v.into_iter().collect())
}

fn protein_seq() -> impl Strategy<Value = String> {
    let residues: Vec<char> = "ACDEFGHIKLMNPQRSTVWY".chars().collect();
    proptest::collection::vec(prop::sample::select(residues), 4..=80)
        .prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dna_roundtrip_all_scales(seq in dna_seq(), k in 1usize..=4) {
        let table = CornerTable::build(Alphabet::new(BaseAlphabet::Dna, k).unwrap()).unwrap();
        let trajectory = encode_scale(&seq, &table).unwrap();
        prop_assert_eq!(decode(&trajectory, &table).unwrap(), seq);
    }

    #[test]
    fn protein_roundtrip_default_scales(seq in protein_seq(), k in 1usize..=3) {
        let table = CornerTable::build(Alphabet::new(BaseAlphabet::Protein, k).unwrap()).unwrap();
        let trajectory = encode_scale(&seq, &table).unwrap();
        prop_assert_eq!(decode(&trajectory, &table).unwrap(), seq);
    }

    #[test]
    fn denominators_divide_grid_bound(seq in dna_seq(), k in 1usize..=4) {
        let table = CornerTable::build(Alphabet::new(BaseAlphabet::Dna, k).unwrap()).unwrap();
        let trajectory = encode_scale(&seq, &table).unwrap();
        let report = check_precision_bound(&trajectory, table.q());
        prop_assert!(report.satisfied);
        prop_assert!(report.max_denominator <= report.bound);
    }
}
