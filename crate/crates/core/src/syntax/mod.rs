//! Java snippet syntax: lossless lexing, parsing, and canonical rendering.
//!
//! `lex` produces a token stream whose concatenated text reproduces the
//! input byte for byte. `parse` builds a tree in which spans never affect
//! equality, so two parses compare structurally. `render` emits canonical
//! source; parsing rendered output always yields an equal tree.

mod ast;
mod lexer;
mod parser;
mod printer;
mod token;

pub use ast::*;
pub use lexer::{lex, LexError};
pub use parser::{parse, ParseError};
pub use printer::{render, render_expr, render_stmt, render_type};
pub use token::{is_keyword, LitKind, Token, TokenKind, KEYWORDS};
