//! Interpret replicated terms inside the definition calculus, and replace
//! replication by recursive definitions.

use vpc::equiv::stratified_equiv;
use vpc::godel::encode_term;
use vpc::lts::DirectState;
use vpc::syntax::{derive_replication, parse_term, print_program, Dialect, Program, TypeSig};
use vpc::universal::boot_interpreter;

fn main() {
    let t = parse_term("(n3)(!n3(x0).'n1(x0).0 | 'n3(0).'n3(1).0) | !n2(x1).'n1(x1).0")
        .expect("term parses");
    let sig: TypeSig = "i=1;g=n1,n2".parse().expect("signature parses");
    let z = encode_term(&t, Dialect::Bang).expect("encodable");
    let interpreted = DirectState::engine(boot_interpreter(&z, &sig));
    let direct = DirectState::of_term(t.clone());
    println!(
        "interpreter agrees to depth 6: {}",
        stratified_equiv(&interpreted, &direct, 6, 1).expect("explores")
    );

    let derived = derive_replication(&Program::from_term(t));
    print!("{}", print_program(&derived));
    println!(
        "derived definitions agree to depth 6: {}",
        stratified_equiv(&DirectState::of_program(&derived), &direct, 6, 1).expect("explores")
    );
}
