//! Fix the leading arguments of an indexed definition and check that the
//! residual definition behaves like the original.

use num_bigint::BigUint;
use vpc::equiv::{bb_div_equiv, explore};
use vpc::lts::DirectState;
use vpc::smn::{decode_def, encode_def, smn, universal_def};
use vpc::syntax::{parse_source, TypeSig};

fn main() {
    let p = parse_source("def D(x0, x1, x2) = if x0 < x1 then 'n1(x2).0 else 'n2(x2).0\nmain = 0")
        .expect("program parses");
    let sig: TypeSig = "i=0;g=n1,n2".parse().expect("signature parses");
    let j = p.def_id("D").expect("D is defined");
    let z = encode_def(&p.defs, j, &sig).expect("indexable");
    let n = |k: u32| BigUint::from(k);
    let fixed = smn(&z, 2, 1, &[n(0), n(1)]).expect("arity matches");
    let (defs, target) = decode_def(&fixed).expect("decodes");
    let d = &defs[target.0 as usize - 1];
    let params: Vec<String> = d.params.iter().map(|x| x.to_string()).collect();
    println!("{}({}) = {}", d.name, params.join(", "), d.body);

    for y in 0..3u32 {
        let whole = DirectState::engine(universal_def(&z, &[n(0), n(1), n(y)], &sig));
        let part = DirectState::engine(universal_def(&fixed, &[n(y)], &sig));
        let g1 = explore(&whole, 1, 2000, usize::MAX).expect("explores");
        let g2 = explore(&part, 1, 2000, usize::MAX).expect("explores");
        let same = bb_div_equiv(&g1, &g2).expect("complete graphs").equivalent;
        println!("y = {y}: equivalent {same}");
    }
}
