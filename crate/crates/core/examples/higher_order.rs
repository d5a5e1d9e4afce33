//! Send an abstraction over a channel, then translate the same system into
//! first-order terms that ship codes to universal processes.

use vpc::equiv::{bb_div_equiv, explore};
use vpc::hovpc::{encode_abstraction, ho_transitions, parse_ho, translate, HoEnv};
use vpc::lts::DirectState;
use vpc::syntax::parse_term;

fn main() {
    let src = parse_ho("(n1)('n1(\\a, b. (c)('c(2).0 | c(y).'a(y).'b(y + 1).0) : <1,2>).0 | n1(X:<1,2>).X(n2, n3))")
        .expect("term parses");
    println!("source: {}", src.term);
    for (action, residual) in ho_transitions(&src.term, 1, &[]).expect("closed term") {
        println!("  {action} -> {residual}");
    }
    if let vpc::hovpc::HoTerm::Res(_, body) = &src.term {
        if let vpc::hovpc::HoTerm::Par(sender, _) = &**body {
            if let vpc::hovpc::HoTerm::HoOut(_, abs, _) = &**sender {
                let code = encode_abstraction(abs).expect("encodable").to_string();
                println!("abstraction code: {} digits", code.len());
            }
        }
    }

    let first_order = translate(&src.term, &HoEnv::new()).expect("translates");
    let text = first_order.to_string();
    println!("translation: {}", text.split(' ').filter(|w| w.len() < 40).collect::<Vec<_>>().join(" "));
    let g1 = explore(&DirectState::of_term(first_order), 1, 2000, usize::MAX).expect("explores");
    let expected = parse_term("'n2(2).'n3(3).0").expect("term parses");
    let g2 = explore(&DirectState::of_term(expected), 1, 2000, usize::MAX).expect("explores");
    println!("behaves like 'n2(2).'n3(3).0: {}", bb_div_equiv(&g1, &g2).expect("complete").equivalent);
}
