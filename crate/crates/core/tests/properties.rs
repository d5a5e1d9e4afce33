mod common;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vpc::checker::normalize;
use vpc::godel::{
    decode_program, decode_term, encode_program, encode_term, encode_vterm, pair, pair2,
    seq_code, seq_decode, subst_code, unpair, unpair2,
};
use vpc::presburger::{brute_decide, decide};
use vpc::syntax::{
    desugar, desugar_term, parse_source, parse_term, print_program, subst_value, Dialect, Program, TypeSig,
    ValueTerm, VarId,
};

fn dialect(bang: bool) -> Dialect {
    if bang {
        Dialect::Bang
    } else {
        Dialect::P
    }
}

proptest! {
    #[test]
    fn pairing_round_trips(x: u64, y: u64) {
        let (x, y) = (BigUint::from(x), BigUint::from(y));
        prop_assert_eq!(unpair2(&pair2(&x, &y)), (x, y));
    }

    #[test]
    fn tuples_round_trip(xs in prop::collection::vec(any::<u32>(), 1..6)) {
        let xs: Vec<BigUint> = xs.into_iter().map(BigUint::from).collect();
        prop_assert_eq!(unpair(&pair(&xs), xs.len()), xs);
    }

    #[test]
    fn sequences_round_trip(xs in prop::collection::vec(any::<u32>(), 0..6)) {
        let xs: Vec<BigUint> = xs.into_iter().map(BigUint::from).collect();
        prop_assert_eq!(seq_decode(&seq_code(&xs)).unwrap(), xs);
    }

    #[test]
    fn sequence_codes_are_onto(z in 0u64..1 << 30) {
        let z = BigUint::from(z);
        prop_assert_eq!(seq_code(&seq_decode(&z).unwrap()), z);
    }

    #[test]
    fn every_code_decodes_and_reencodes(n: u64, bang: bool) {
        let d = dialect(bang);
        let n = BigUint::from(n);
        let t = decode_term(&n, d).unwrap();
        prop_assert_eq!(encode_term(&t, d).unwrap(), n);
    }

    #[test]
    fn terms_survive_encoding(seed: u64, bang: bool) {
        let d = dialect(bang);
        let t = common::gen_term(&mut ChaCha8Rng::seed_from_u64(seed), 5, d, 4, 3, false);
        prop_assert_eq!(decode_term(&encode_term(&t, d).unwrap(), d).unwrap(), t);
    }

    #[test]
    fn printed_terms_parse_back(seed: u64) {
        let t = common::gen_term(&mut ChaCha8Rng::seed_from_u64(seed), 4, Dialect::Bang, 4, 3, false);
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn normalization_is_idempotent(seed: u64) {
        let t = common::gen_term(&mut ChaCha8Rng::seed_from_u64(seed), 5, Dialect::P, 4, 3, true);
        let z = encode_term(&t, Dialect::P).unwrap();
        let sig: TypeSig = "i=4;g=n2,n4,n1,n3".parse().unwrap();
        let once = normalize(&z, &sig, Dialect::P).unwrap();
        prop_assert_eq!(normalize(&once, &TypeSig::canonical(4, 4), Dialect::P).unwrap(), once);
    }

    #[test]
    fn subst_code_commutes_with_decoding(seed: u64, v in 0u64..3, value in 0u32..500, bang: bool) {
        let d = dialect(bang);
        let t = common::gen_term(&mut ChaCha8Rng::seed_from_u64(seed), 5, d, 4, 3, false);
        let num = ValueTerm::Num(BigUint::from(value));
        let z = subst_code(&encode_term(&t, d).unwrap(), v, &encode_vterm(&num), d).unwrap();
        prop_assert_eq!(decode_term(&z, d).unwrap(), subst_value(&t, VarId(v), &num));
    }

    #[test]
    fn desugaring_is_idempotent(seed: u64) {
        let t = common::gen_term(&mut ChaCha8Rng::seed_from_u64(seed), 5, Dialect::P, 3, 3, false);
        let once = desugar_term(&t);
        prop_assert_eq!(desugar_term(&once), once);
    }

    #[test]
    fn decision_agrees_with_bounded_search(seed: u64) {
        let phi = common::gen_sentence(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(decide(&phi).unwrap(), brute_decide(&phi, 64).unwrap());
    }
}

#[test]
fn printed_programs_parse_back() {
    for e in common::PROGRAMS {
        let p = parse_source(e.source).unwrap();
        let back = parse_source(&print_program(&p)).unwrap();
        assert_eq!(encode_program(&back).unwrap(), encode_program(&p).unwrap(), "{}", e.label);
        let decoded = decode_program(&encode_program(&p).unwrap()).unwrap();
        let expected = desugar(&back);
        assert_eq!(decoded.main, expected.main, "{}", e.label);
        let shape = |p: &Program| p.defs.iter().map(|d| (d.params.clone(), d.body.clone())).collect::<Vec<_>>();
        assert_eq!(shape(&decoded), shape(&expected), "{}", e.label);
    }
}

#[test]
fn empty_program_is_code_zero() {
    let p = Program::from_term(vpc::syntax::ProcTerm::Nil);
    assert_eq!(encode_program(&p).unwrap(), BigUint::from(0u32));
}
