//! Gödel codes of terms and programs, and decoding arbitrary numbers.

use num_bigint::BigUint;
use vpc::godel::{decode_program, decode_term, encode_program, encode_term, pair_u64, unpair};
use vpc::syntax::{parse_source, parse_term, print_program, Dialect};

fn main() {
    let z = pair_u64(&[3, 5]);
    println!("<3,5> = {z}, unpaired {:?}", unpair(&z, 2));

    let t = parse_term("n1(x0).'n2(x0 + 1).0").expect("term parses");
    for d in [Dialect::Bang, Dialect::P] {
        println!("{t} in {d:?}: {}", encode_term(&t, d).expect("encodable"));
    }

    for n in [0u32, 8, 36, 1000, 123456] {
        let decoded = decode_term(&BigUint::from(n), Dialect::P).expect("every number decodes");
        println!("{n} decodes to {decoded}");
    }

    let p = parse_source("def C(x0) = 'n1(x0).C(x0 + 1)\nmain = C(0)").expect("program parses");
    let code = encode_program(&p).expect("encodable");
    println!("program code has {} digits", code.to_string().len());
    print!("{}", print_program(&decode_program(&code).expect("decodes")));
}
