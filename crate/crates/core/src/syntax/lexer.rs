//! Lossless lexer: every byte of the input, trivia included, lands in some
//! token, so concatenating token texts reproduces the input exactly.

use thiserror::Error;

use super::token::{is_keyword, LitKind, Token, TokenKind};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("lex error at {line}:{col}: {message}")]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    while let Some(token) = lexer.next_token()? {
        tokens.push(token);
    }
    Ok(tokens)
}

// Multi-character operators, longest first so maximal munch falls out of
// the scan order.
const MULTI_OPS: [&str; 13] = [
    "->", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=",
];

const SINGLE_OPS: [char; 11] = ['+', '-', '*', '/', '%', '!', '=', '<', '>', '&', '|'];
const PUNCT: [char; 13] = ['.', ',', ';', '(', ')', '{', '}', '[', ']', '@', '?', ':', '~'];

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut chars = self.src[self.pos..].chars();
        chars.next();
        chars.next()
    }

    fn error(&self, message: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn advance(&mut self, ch: char) {
        self.pos += ch.len_utf8();
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, LexError> {
        let start = self.pos;
        let (line, col) = (self.line, self.col);
        let offset = start as u32;
        let Some(first) = self.peek() else {
            return Ok(None);
        };

        let kind = if first.is_whitespace() {
            while let Some(c) = self.peek() {
                if !c.is_whitespace() {
                    break;
                }
                self.advance(c);
            }
            TokenKind::Whitespace
        } else if first == '/' && self.peek2() == Some('/') {
            while let Some(c) = self.peek() {
                if c == '\n' {
                    break;
                }
                self.advance(c);
            }
            TokenKind::Comment
        } else if first == '/' && self.peek2() == Some('*') {
            self.advance('/');
            self.advance('*');
            let mut closed = false;
            while let Some(c) = self.peek() {
                if c == '*' && self.peek2() == Some('/') {
                    self.advance('*');
                    self.advance('/');
                    closed = true;
                    break;
                }
                self.advance(c);
            }
            if !closed {
                return Err(LexError {
                    line,
                    col,
                    message: "unterminated block comment".to_string(),
                });
            }
            TokenKind::Comment
        } else if first.is_alphabetic() || first == '_' || first == '$' {
            while let Some(c) = self.peek() {
                if !(c.is_alphanumeric() || c == '_' || c == '$') {
                    break;
                }
                self.advance(c);
            }
            let text = &self.src[start..self.pos];
            match text {
                "true" | "false" => TokenKind::Literal(LitKind::Bool),
                "null" => TokenKind::Literal(LitKind::Null),
                _ if is_keyword(text) => TokenKind::Keyword,
                _ => TokenKind::Ident,
            }
        } else if first.is_ascii_digit() {
            self.lex_number()?
        } else if first == '"' {
            self.lex_quoted('"', "unterminated string literal")?;
            TokenKind::Literal(LitKind::Str)
        } else if first == '\'' {
            self.lex_quoted('\'', "unterminated char literal")?;
            TokenKind::Literal(LitKind::Char)
        } else if let Some(op) = MULTI_OPS
            .iter()
            .find(|op| self.src[self.pos..].starts_with(**op))
        {
            for c in op.chars() {
                self.advance(c);
            }
            TokenKind::Op
        } else if SINGLE_OPS.contains(&first) {
            self.advance(first);
            TokenKind::Op
        } else if PUNCT.contains(&first) {
            self.advance(first);
            TokenKind::Punct
        } else {
            return Err(self.error(format!("unexpected character {first:?}")));
        };

        Ok(Some(Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            line,
            col,
            offset,
        }))
    }

    fn lex_number(&mut self) -> Result<TokenKind, LexError> {
        let start = self.pos;
        let mut kind = LitKind::Int;
        if self.src[self.pos..].starts_with("0x") || self.src[self.pos..].starts_with("0X") {
            self.advance('0');
            self.advance(self.peek().unwrap());
            let mut digits = 0;
            while let Some(c) = self.peek() {
                if c.is_ascii_hexdigit() || c == '_' {
                    self.advance(c);
                    digits += 1;
                } else {
                    break;
                }
            }
            if digits == 0 {
                return Err(self.error("hex literal without digits"));
            }
        } else {
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() || c == '_' {
                    self.advance(c);
                } else {
                    break;
                }
            }
            // Fractional part only when a digit follows the dot, so that
            // ranges like `1.toString()` stay out of scope.
            if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
                kind = LitKind::Float;
                self.advance('.');
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() || c == '_' {
                        self.advance(c);
                    } else {
                        break;
                    }
                }
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                let save = (self.pos, self.line, self.col);
                let e = self.peek().unwrap();
                self.advance(e);
                if matches!(self.peek(), Some('+' | '-')) {
                    let sign = self.peek().unwrap();
                    self.advance(sign);
                }
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    kind = LitKind::Float;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() {
                            self.advance(c);
                        } else {
                            break;
                        }
                    }
                } else {
                    (self.pos, self.line, self.col) = save;
                }
            }
        }
        match self.peek() {
            Some(c @ ('f' | 'F' | 'd' | 'D')) if !self.src[start..self.pos].starts_with("0x") => {
                self.advance(c);
                kind = LitKind::Float;
            }
            Some(c @ ('l' | 'L')) => {
                self.advance(c);
            }
            _ => {}
        }
        Ok(TokenKind::Literal(kind))
    }

    fn lex_quoted(&mut self, quote: char, unterminated: &str) -> Result<(), LexError> {
        let (line, col) = (self.line, self.col);
        self.advance(quote);
        loop {
            match self.peek() {
                None | Some('\n') => {
                    return Err(LexError {
                        line,
                        col,
                        message: unterminated.to_string(),
                    })
                }
                Some('\\') => {
                    self.advance('\\');
                    match self.peek() {
                        Some(c) if c != '\n' => self.advance(c),
                        _ => {
                            return Err(LexError {
                                line,
                                col,
                                message: unterminated.to_string(),
                            })
                        }
                    }
                }
                Some(c) if c == quote => {
                    self.advance(c);
                    return Ok(());
                }
                Some(c) => self.advance(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn join(tokens: &[Token]) -> String {
        tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn concatenation_is_lossless() {
        let src = "class C { // note\n  int x = 0x1F; /* block */ String s = \"a\\\"b\"; }\n";
        let tokens = lex(src).unwrap();
        assert_eq!(join(&tokens), src);
    }

    #[test]
    fn classifies_kinds() {
        let tokens = lex("class var true null foo 1 2.5 'c' \"s\" == . //x").unwrap();
        let kinds: Vec<TokenKind> = tokens
            .iter()
            .filter(|t| !t.kind.is_trivia() || t.kind == TokenKind::Comment)
            .map(|t| t.kind)
            .collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Keyword,
                TokenKind::Ident,
                TokenKind::Literal(LitKind::Bool),
                TokenKind::Literal(LitKind::Null),
                TokenKind::Ident,
                TokenKind::Literal(LitKind::Int),
                TokenKind::Literal(LitKind::Float),
                TokenKind::Literal(LitKind::Char),
                TokenKind::Literal(LitKind::Str),
                TokenKind::Op,
                TokenKind::Punct,
                TokenKind::Comment,
            ]
        );
    }

    #[test]
    fn tracks_line_and_column() {
        let tokens = lex("a\n  bb").unwrap();
        let bb = tokens.last().unwrap();
        assert_eq!((bb.line, bb.col), (2, 3));
        assert_eq!(bb.offset, 4);
    }

    #[test]
    fn maximal_munch_operators() {
        let tokens = lex("a->b <= >= == != && || ++ -- +=").unwrap();
        let ops: Vec<&str> = tokens
            .iter()
            .filter(|t| t.kind == TokenKind::Op)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(ops, ["->", "<=", ">=", "==", "!=", "&&", "||", "++", "--", "+="]);
    }

    #[test]
    fn unterminated_string_reports_position() {
        let err = lex("int x;\n\"abc").unwrap_err();
        assert_eq!((err.line, err.col), (2, 1));
        assert!(err.message.contains("unterminated string"));
    }

    #[test]
    fn unterminated_block_comment_is_an_error() {
        let err = lex("/* never closed").unwrap_err();
        assert!(err.message.contains("block comment"));
    }

    #[test]
    fn numeric_suffixes_and_trailing_dot_calls() {
        let tokens = lex("1L 2.5f 3d 10e3 7e 1.x").unwrap();
        let lits: Vec<(&str, TokenKind)> = tokens
            .iter()
            .filter(|t| !t.kind.is_trivia())
            .map(|t| (t.text.as_str(), t.kind))
            .collect();
        assert_eq!(lits[0], ("1L", TokenKind::Literal(LitKind::Int)));
        assert_eq!(lits[1], ("2.5f", TokenKind::Literal(LitKind::Float)));
        assert_eq!(lits[2], ("3d", TokenKind::Literal(LitKind::Float)));
        assert_eq!(lits[3], ("10e3", TokenKind::Literal(LitKind::Float)));
        // `7e` is an int followed by an identifier, not a malformed float.
        assert_eq!(lits[4], ("7", TokenKind::Literal(LitKind::Int)));
        assert_eq!(lits[5], ("e", TokenKind::Ident));
        // `1.x` keeps the dot as punctuation.
        assert_eq!(lits[6], ("1", TokenKind::Literal(LitKind::Int)));
        assert_eq!(lits[7], (".", TokenKind::Punct));
    }
}
