//! Canonical, re-parseable text for terms and programs.

use std::fmt::{self, Display, Formatter, Write};

use super::{Formula, ProcTerm, Program, ValueTerm};

impl Display for ValueTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ValueTerm::Num(k) => write!(f, "{k}"),
            ValueTerm::Var(v) => write!(f, "{v}"),
            ValueTerm::Add(l, r) => {
                if matches!(**r, ValueTerm::Add(..)) {
                    write!(f, "{l} + ({r})")
                } else {
                    write!(f, "{l} + {r}")
                }
            }
        }
    }
}

// Precedence levels: 1 `=>`, 2 `\/`, 3 `/\`, 4 unary and atoms.
fn formula_level(phi: &Formula) -> u8 {
    match phi {
        Formula::Implies(_, b) if **b == Formula::False => 4,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Exists(..) | Formula::Forall(..) => 0,
        _ => 4,
    }
}

fn write_formula(f: &mut Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    let level = formula_level(phi);
    if level < min {
        f.write_str("(")?;
        write_formula(f, phi, 0)?;
        return f.write_str(")");
    }
    match phi {
        Formula::False => f.write_str("ff"),
        Formula::True => f.write_str("tt"),
        Formula::Implies(a, b) if **b == Formula::False => {
            f.write_str("~")?;
            write_formula(f, a, 4)
        }
        Formula::Implies(a, b) => {
            write_formula(f, a, 2)?;
            f.write_str(" => ")?;
            write_formula(f, b, 1)
        }
        Formula::Or(a, b) => {
            write_formula(f, a, 2)?;
            f.write_str(" \\/ ")?;
            write_formula(f, b, 3)
        }
        Formula::And(a, b) => {
            write_formula(f, a, 3)?;
            f.write_str(" /\\ ")?;
            write_formula(f, b, 4)
        }
        Formula::Exists(v, body) => {
            write!(f, "exists {v}. ")?;
            write_formula(f, body, 0)
        }
        Formula::Forall(v, body) => {
            write!(f, "forall {v}. ")?;
            write_formula(f, body, 0)
        }
        Formula::Lt(s, t) => write!(f, "{s} < {t}"),
        Formula::Eq(s, t) => write!(f, "{s} = {t}"),
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

pub(crate) struct TermPrinter<'a> {
    pub def_names: &'a [String],
}

impl TermPrinter<'_> {
    fn def_name(&self, j: u64) -> String {
        usize::try_from(j)
            .ok()
            .and_then(|j| j.checked_sub(1))
            .and_then(|i| self.def_names.get(i))
            .cloned()
            .unwrap_or_else(|| format!("D{j}"))
    }

    pub fn write(&self, out: &mut String, t: &ProcTerm) {
        self.term(out, t, false)
    }

    // `prefix` is true when `t` sits where only a prefix-level term parses
    // (bodies of prefixes and the right operand of `|`).
    fn term(&self, out: &mut String, t: &ProcTerm, prefix: bool) {
        match t {
            ProcTerm::Nil => out.push('0'),
            ProcTerm::In(a, x, b) => {
                let _ = write!(out, "{a}({x}).");
                self.term(out, b, true);
            }
            ProcTerm::Out(a, v, b) => {
                let _ = write!(out, "'{a}({v}).");
                self.term(out, b, true);
            }
            ProcTerm::RepIn(a, x, b) => {
                let _ = write!(out, "!{a}({x}).");
                self.term(out, b, true);
            }
            ProcTerm::RepOut(a, v, b) => {
                let _ = write!(out, "!'{a}({v}).");
                self.term(out, b, true);
            }
            ProcTerm::Par(l, r) => {
                if prefix {
                    out.push('(');
                }
                self.term(out, l, false);
                out.push_str(" | ");
                self.term(out, r, true);
                if prefix {
                    out.push(')');
                }
            }
            ProcTerm::Res(c, b) => {
                let _ = write!(out, "({c})");
                self.term(out, b, true);
            }
            ProcTerm::Cond(phi, b) => {
                let _ = write!(out, "if {phi} then ");
                self.term(out, b, true);
            }
            ProcTerm::IfElse(phi, s, e) => {
                let _ = write!(out, "if {phi} then ");
                if matches!(**s, ProcTerm::Cond(..)) {
                    out.push('(');
                    self.term(out, s, false);
                    out.push(')');
                } else {
                    self.term(out, s, true);
                }
                out.push_str(" else ");
                self.term(out, e, true);
            }
            ProcTerm::Case {
                placeholder,
                scrutinee,
                arms,
            } => {
                let _ = write!(out, "case {scrutinee} of");
                let hole = placeholder.to_string();
                for (phi, arm) in arms {
                    let mut body = String::new();
                    self.term(&mut body, arm, false);
                    let _ = write!(
                        out,
                        " {} => {};",
                        underscore(&phi.to_string(), &hole),
                        underscore(&body, &hole)
                    );
                }
                out.push_str(" end");
            }
            ProcTerm::Let(x, v, b) => {
                let _ = write!(out, "let {x} = {v} in ");
                self.term(out, b, true);
            }
            ProcTerm::Call(j, args) => {
                out.push_str(&self.def_name(j.0));
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{a}");
                }
                out.push(')');
            }
            ProcTerm::Universal(seed) => {
                let _ = write!(out, "<universal {} [{}]", seed.chan, seed.sig);
                for n in &seed.retarget {
                    let _ = write!(out, " {n}");
                }
                out.push('>');
            }
            ProcTerm::Running(cfg) => {
                let _ = write!(out, "<engine {cfg}>");
            }
        }
    }
}

impl Display for ProcTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        TermPrinter { def_names: &[] }.write(&mut s, self);
        f.write_str(&s)
    }
}

/// Renders a program as `def` lines followed by `main = …`; parsing the
/// result gives back the same definitions and main term.
pub fn print_program(p: &Program) -> String {
    let names: Vec<String> = p.defs.iter().map(|d| d.name.clone()).collect();
    let printer = TermPrinter { def_names: &names };
    let mut out = String::new();
    for d in &p.defs {
        let _ = write!(out, "def {}(", d.name);
        for (i, x) in d.params.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{x}");
        }
        out.push_str(") = ");
        printer.write(&mut out, &d.body);
        out.push('\n');
    }
    out.push_str("main = ");
    printer.write(&mut out, &p.main);
    out.push('\n');
    out
}


// Writes the case placeholder back as `_`.
fn underscore(text: &str, hole: &str) -> String {
    let word = |c: char| c.is_ascii_alphanumeric() || c == '_';
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(i) = rest.find(hole) {
        let before = rest[..i].chars().next_back().or(out.chars().next_back());
        let after = rest[i + hole.len()..].chars().next();
        out.push_str(&rest[..i]);
        if before.is_some_and(word) || after.is_some_and(word) {
            out.push_str(hole);
        } else {
            out.push('_');
        }
        rest = &rest[i + hole.len()..];
    }
    out.push_str(rest);
    out
}
