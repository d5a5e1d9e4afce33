//! Decide Presburger sentences and compare with a bounded search.

use vpc::presburger::{brute_decide, decide};
use vpc::syntax::parse_formula;

fn main() {
    let sentences = [
        "forall x0. exists x1. x1 + x1 = x0 \\/ x1 + x1 + 1 = x0",
        "exists x0. x0 + x0 + x0 = 10",
        "forall x0. exists x1. x0 < x1",
        "exists x0. forall x1. x1 < x0",
    ];
    for text in sentences {
        let phi = parse_formula(text).expect("sentence parses");
        let exact = decide(&phi).expect("closed sentence");
        let bounded = brute_decide(&phi, 20).expect("closed sentence");
        println!("{exact:<5} (search up to 20: {bounded:<5})  {text}");
    }
}
