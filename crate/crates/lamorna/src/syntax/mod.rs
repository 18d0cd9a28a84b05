//! Concrete surface syntax: lexer, parser, and printer. The grammar is
//! documented in `docs/grammar.md`; `parse ∘ render` is the identity on the
//! renderer's output, up to alpha-equivalence.

pub mod lexer;
pub mod parser;
pub mod printer;

pub use parser::{parse_program, Decl, ParseError, SourceProgram};
