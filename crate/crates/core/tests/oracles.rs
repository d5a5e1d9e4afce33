//! The equivalence checks used by the acceptance corpus must be able to fail:
//! each comparison here pairs a construction with a slightly wrong partner.

mod common;

use num_bigint::BigUint;

use vpc::godel::{encode_program, encode_term};
use vpc::hovpc::{parse_ho, translate, HoEnv};
use vpc::lts::DirectState;
use vpc::smn::{encode_def, smn, universal_def};
use vpc::syntax::{parse_source, parse_term, Dialect};
use vpc::universal::{boot_interpreter, boot_universal};

fn engine_of(source: &str, sig: &str) -> DirectState {
    let p = parse_source(source).unwrap();
    DirectState::engine(boot_universal(&encode_program(&p).unwrap(), &common::sig(sig)))
}

fn direct_of(source: &str) -> DirectState {
    DirectState::of_program(&parse_source(source).unwrap())
}

#[test]
fn universal_process_is_told_apart_from_a_mutant() {
    let cases = [
        ("main = 'n1(3).0", "main = 'n1(4).0", "i=0;g=n1"),
        ("main = n1(x0).'n2(x0).0", "main = n1(x0).'n2(x0 + 1).0", "i=0;g=n1,n2"),
        (
            "main = (n3)('n3(0).0 | n3(x0).'n1(0).0 | n3(x1).'n2(0).0)",
            "main = 'n1(0).0 | 'n2(0).0",
            "i=1;g=n1,n2",
        ),
        (
            "def W() = (n3)('n3(0).0 | n3(x0).W())\nmain = W()",
            "main = 0",
            "i=1;g=",
        ),
        (
            "def C(x0) = if x0 < 3 then 'n1(x0).C(x0 + 1)\nmain = C(0)",
            "def C(x0) = if x0 < 2 then 'n1(x0).C(x0 + 1)\nmain = C(0)",
            "i=0;g=n1",
        ),
    ];
    for (source, mutant, sig) in cases {
        let engine = engine_of(source, sig);
        assert!(common::bisimilar(&engine, &direct_of(source), 2, 2000, 8).unwrap(), "{source}");
        assert!(!common::bisimilar(&engine, &direct_of(mutant), 2, 2000, 8).unwrap(), "{mutant}");
    }
}

#[test]
fn dynamic_capture_example_is_told_apart_from_a_mutant() {
    let source = "def D(x) = 'n1(0).0 | (n1)('n1(x).0 | 'n1(x).0 | n1(z).D(z + 1))\nmain = D(0)";
    let mutant = "def D(x) = 'n1(1).0 | (n1)('n1(x).0 | 'n1(x).0 | n1(z).D(z + 1))\nmain = D(0)";
    let engine = engine_of(source, "i=1;g=n1");
    assert!(common::bisimilar(&engine, &direct_of(source), 2, 200, 6).unwrap());
    assert!(!common::bisimilar(&engine, &direct_of(mutant), 2, 200, 6).unwrap());
}

#[test]
fn interpreter_is_told_apart_from_a_mutant() {
    let t = parse_term("!n1(x0).'n2(x0).0").unwrap();
    let z = encode_term(&t, Dialect::Bang).unwrap();
    let engine = DirectState::engine(boot_interpreter(&z, &common::sig("i=0;g=n1,n2")));
    let once = DirectState::of_term(parse_term("n1(x0).'n2(x0).0").unwrap());
    assert!(!vpc::equiv::stratified_equiv(&engine, &once, 6, 1).unwrap());
    let direct = DirectState::of_term(t);
    assert!(vpc::equiv::stratified_equiv(&engine, &direct, 6, 1).unwrap());
}

#[test]
fn partial_application_with_other_values_differs() {
    let p = parse_source("def D(x0, x1) = 'n1(x0 + x1).0\nmain = 0").unwrap();
    let sig = common::sig("i=0;g=n1");
    let j = p.def_id("D").unwrap();
    let z = encode_def(&p.defs, j, &sig).unwrap();
    let n = |k: u32| BigUint::from(k);
    let applied = smn(&z, 1, 1, &[n(1)]).unwrap();
    let part = DirectState::engine(universal_def(&applied, &[n(2)], &sig));
    let right = DirectState::engine(universal_def(&z, &[n(1), n(2)], &sig));
    let wrong = DirectState::engine(universal_def(&z, &[n(2), n(2)], &sig));
    assert!(common::bisimilar(&part, &right, 2, 2000, 8).unwrap());
    assert!(!common::bisimilar(&part, &wrong, 2, 2000, 8).unwrap());
}

#[test]
fn higher_order_translation_is_told_apart_from_a_mutant() {
    let src = parse_ho("(n1)('n1(\\g. 'g(7).0).0 | n1(X:<0,1>).X(n2))").unwrap();
    let t = DirectState::of_term(translate(&src.term, &HoEnv::new()).unwrap());
    let right = DirectState::of_term(parse_term("'n2(7).0").unwrap());
    let wrong = DirectState::of_term(parse_term("'n2(8).0").unwrap());
    assert!(common::bisimilar(&t, &right, 1, 2000, 8).unwrap());
    assert!(!common::bisimilar(&t, &wrong, 1, 2000, 8).unwrap());
}

#[test]
fn ill_typed_programs_run_as_nil() {
    let p = parse_source("main = 'n2(0).0").unwrap();
    let z = encode_program(&p).unwrap();
    assert!(boot_universal(&z, &common::sig("i=0;g=n1")).is_nil());
    assert!(!boot_universal(&z, &common::sig("i=0;g=n1,n2")).is_nil());
}
