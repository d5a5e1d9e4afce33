//! Parse a program with surface sugar, print it back, and show its core form.

use vpc::syntax::{desugar, parse_source, print_program};

fn main() {
    let source = "\
def Sign(x0) = case x0 of _ = 0 => 'zero(0).0; 0 < _ => 'pos(x0).0; end
def Twice(x0) = let y = x0 + x0 in 'out(y).0
main = req(x0).(Sign(x0) | Twice(x0)) | if 1 < 2 then 'out(5).0 else 0
";
    let program = parse_source(source).expect("example parses");
    println!("parsed:\n{}", print_program(&program));
    println!("desugared:\n{}", print_program(&desugar(&program)));
    for (name, k) in &program.symtab.names {
        println!("channel {name} is {k}");
    }
}
