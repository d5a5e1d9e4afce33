//! Check a code against a type signature and compute its normal index.

use vpc::checker::{normalize, parse_index};
use vpc::godel::{decode_term, encode_term};
use vpc::syntax::{parse_term, Dialect, TypeSig};

fn main() {
    let sig: TypeSig = "i=1;g=n5,n7".parse().expect("signature parses");
    let good = parse_term("n7(x0).(n9)('n9(x0).0 | n9(x1).'n5(x1).0)").expect("term parses");
    let z = encode_term(&good, Dialect::Bang).expect("encodable");
    let normal = normalize(&z, &sig, Dialect::Bang).expect("well typed");
    println!("{good}\n  normal index {normal}\n  reads {}", decode_term(&normal, Dialect::Bang).expect("decodes"));

    for bad in ["'n6(0).0", "'n5(x3).0", "(n8)(n9)'n5(0).0"] {
        let t = parse_term(bad).expect("term parses");
        let z = encode_term(&t, Dialect::Bang).expect("encodable");
        match normalize(&z, &sig, Dialect::Bang) {
            Ok(_) => println!("{bad}: accepted"),
            Err(v) => println!("{bad}: {v}; parser index {}", parse_index(&z, &sig, Dialect::Bang)),
        }
    }
}
