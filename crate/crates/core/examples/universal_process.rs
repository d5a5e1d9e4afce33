//! Feed a program code to the universal process and compare it with the
//! program's own transition system.

use vpc::equiv::{bb_div_equiv, explore};
use vpc::godel::encode_program;
use vpc::lts::DirectState;
use vpc::syntax::{parse_source, TypeSig};
use vpc::universal::{boot_universal, config_steps, StepKind};

fn main() {
    let p = parse_source(
        "def A(x0) = 'n1(x0).B(x0)\ndef B(x0) = n2(x1).if x0 + x1 < 3 then A(x0 + x1)\nmain = A(0)",
    )
    .expect("program parses");
    let sig: TypeSig = "i=0;g=n1,n2".parse().expect("signature parses");
    let cfg = boot_universal(&encode_program(&p).expect("encodable"), &sig);

    let mut state = cfg.clone();
    for step in 1..=6 {
        let Some((action, kind, next)) = config_steps(&state, 1).into_iter().last() else {
            break;
        };
        let note = if kind == StepKind::DefCall { " (call)" } else { "" };
        println!("step {step}: {action}{note}");
        state = next;
    }

    let engine = explore(&DirectState::engine(cfg), 1, 2000, usize::MAX).expect("explores");
    let direct = explore(&DirectState::of_program(&p), 1, 2000, usize::MAX).expect("explores");
    let verdict = bb_div_equiv(&engine, &direct).expect("complete graphs");
    println!(
        "engine {} states, direct {} states, equivalent: {}",
        engine.state_count(),
        direct.state_count(),
        verdict.equivalent
    );
}
