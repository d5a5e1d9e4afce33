//! A value-passing process calculus with Presburger guards: syntax, operational
//! semantics, Gödel indexing of terms and programs, a universal process run by
//! an interpreting engine, behavioural equivalence checking, partial
//! application of indexed definitions and a higher-order extension.

pub mod checker;
pub mod cli;
pub mod equiv;
pub mod godel;
pub mod hovpc;
pub mod lts;
pub mod presburger;
pub mod smn;
pub mod syntax;
pub mod universal;
