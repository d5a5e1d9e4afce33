//! Divergence-preserving branching bisimilarity on a few small processes.

use vpc::equiv::{bb_div_equiv, explore};
use vpc::lts::DirectState;
use vpc::syntax::parse_source;

fn graph(source: &str) -> vpc::equiv::LtsGraph {
    let p = parse_source(source).expect("program parses");
    explore(&DirectState::of_program(&p), 1, 2000, usize::MAX).expect("explores")
}

fn main() {
    let pairs = [
        ("main = 0", "main = (c)('c(0).0 | c(x).0)"),
        ("main = 0", "def W() = (c)('c(0).0 | c(x).W())\nmain = W()"),
        ("main = 'a(0).0", "main = 'a(0).(c)('c(0).0 | c(x).0)"),
        (
            "main = a(x).(c)('c(0).0 | c(y).'b(0).0 | c(z).'d(0).0)",
            "main = (c)('c(0).0 | c(y).a(x).'b(0).0 | c(z).a(x).'d(0).0)",
        ),
    ];
    for (left, right) in pairs {
        let verdict = bb_div_equiv(&graph(left), &graph(right)).expect("complete graphs");
        match verdict.witness {
            None => println!("equivalent:\n  {left}\n  {right}"),
            Some(w) => println!("different ({w}):\n  {left}\n  {right}"),
        }
    }
    print!("{}", graph("main = a(x).if x = 1 then 'b(x).0").dump());
}
