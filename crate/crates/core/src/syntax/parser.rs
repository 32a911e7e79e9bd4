//! Recursive-descent parser for the simplified Java grammar.
//!
//! The grammar covers classes and interfaces with fields, methods,
//! constructors, and initializer blocks; the statement forms block, local
//! declaration, assignment, expression, return, if/else, while, both for
//! forms, try/catch/finally, throw, break, and continue; and expressions
//! with names, literals, this/super, calls, field access, new (objects and
//! arrays), casts, instanceof, lambdas, and the operator set below. Anything
//! else is a parse error naming the offending token.
//!
//! Ambiguities (declaration vs. expression statement, generic arguments vs.
//! comparison chains, cast vs. parenthesized expression) are resolved by
//! bounded backtracking over the token stream.

use thiserror::Error;

use super::ast::*;
use super::lexer::{lex, LexError};
use super::token::{LitKind, Token, TokenKind};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
    pub expected: Vec<String>,
    pub found: String,
}

impl From<LexError> for ParseError {
    fn from(err: LexError) -> ParseError {
        ParseError {
            line: err.line,
            col: err.col,
            message: err.message,
            expected: Vec::new(),
            found: String::new(),
        }
    }
}

type PResult<T> = Result<T, ParseError>;

/// Parses a complete compilation unit.
pub fn parse(src: &str) -> PResult<CompilationUnit> {
    let tokens = lex(src)?;
    Parser::new(tokens).parse_unit()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    pending: Vec<Comment>,
    /// Byte offset one past the last consumed significant token.
    last_end: u32,
    end_line: u32,
    end_col: u32,
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    pending: usize,
    last_end: u32,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Parser {
        let (end_line, end_col) = tokens
            .last()
            .map(|t| (t.line, t.col + t.text.chars().count() as u32))
            .unwrap_or((1, 1));
        Parser {
            tokens,
            pos: 0,
            pending: Vec::new(),
            last_end: 0,
            end_line,
            end_col,
        }
    }

    // ----- cursor -------------------------------------------------------

    fn mark(&self) -> Mark {
        Mark {
            pos: self.pos,
            pending: self.pending.len(),
            last_end: self.last_end,
        }
    }

    fn rewind(&mut self, mark: Mark) {
        self.pos = mark.pos;
        self.pending.truncate(mark.pending);
        self.last_end = mark.last_end;
    }

    /// Moves past trivia, saving comments for the next `take_leading`.
    fn collect_trivia(&mut self) {
        while let Some(tok) = self.tokens.get(self.pos) {
            match tok.kind {
                TokenKind::Whitespace => self.pos += 1,
                TokenKind::Comment => {
                    self.pending.push(Comment::new(tok.text.clone()));
                    self.pos += 1;
                }
                _ => break,
            }
        }
    }

    /// The next significant token, without consuming anything.
    fn peek(&self) -> Option<&Token> {
        self.tokens[self.pos..].iter().find(|t| !t.kind.is_trivia())
    }

    /// The `k`-th significant token ahead (0 = same as `peek`).
    fn peek_nth(&self, k: usize) -> Option<&Token> {
        self.tokens[self.pos..]
            .iter()
            .filter(|t| !t.kind.is_trivia())
            .nth(k)
    }

    fn bump(&mut self) -> PResult<Token> {
        self.collect_trivia();
        match self.tokens.get(self.pos) {
            Some(tok) => {
                let tok = tok.clone();
                self.pos += 1;
                self.last_end = tok.offset + tok.text.len() as u32;
                Ok(tok)
            }
            None => Err(self.eof_error()),
        }
    }

    fn eof_error(&self) -> ParseError {
        ParseError {
            line: self.end_line,
            col: self.end_col,
            message: "unexpected end of input".to_string(),
            expected: Vec::new(),
            found: "end of input".to_string(),
        }
    }

    fn error_at(&self, tok: &Token, message: String, expected: Vec<String>) -> ParseError {
        ParseError {
            line: tok.line,
            col: tok.col,
            message,
            expected,
            found: tok.text.clone(),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(tok) => self.error_at(
                tok,
                format!("expected {wanted}, found {:?}", tok.text),
                vec![wanted.to_string()],
            ),
            None => self.eof_error(),
        }
    }

    fn at_text(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at_text(text) {
            self.bump().unwrap();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<Token> {
        if self.at_text(text) {
            self.bump()
        } else {
            Err(self.unexpected(&format!("{text:?}")))
        }
    }

    fn expect_ident(&mut self) -> PResult<Token> {
        match self.peek() {
            Some(tok) if tok.kind == TokenKind::Ident => self.bump(),
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn take_leading(&mut self) -> Vec<Comment> {
        std::mem::take(&mut self.pending)
    }

    /// A comment on the same line after the just-parsed node, if any.
    fn take_trailing(&mut self) -> Option<Comment> {
        let mut probe = self.pos;
        while let Some(tok) = self.tokens.get(probe) {
            match tok.kind {
                TokenKind::Whitespace if !tok.text.contains('\n') => probe += 1,
                TokenKind::Comment => {
                    let comment = Comment::new(tok.text.clone());
                    self.pos = probe + 1;
                    return Some(comment);
                }
                _ => return None,
            }
        }
        None
    }

    fn next_offset(&self) -> u32 {
        self.peek().map(|t| t.offset).unwrap_or(self.last_end)
    }

    // ----- compilation unit --------------------------------------------

    fn parse_unit(&mut self) -> PResult<CompilationUnit> {
        let lo = 0;
        let package = if self.at_text("package") {
            self.collect_trivia();
            let leading = self.take_leading();
            let start = self.next_offset();
            self.expect("package")?;
            let name = self.parse_qual_name()?;
            self.expect(";")?;
            let span = Span::new(start, self.last_end);
            let trailing = self.take_trailing();
            Some(PackageDecl {
                leading,
                trailing,
                name,
                span,
            })
        } else {
            None
        };

        let mut imports = Vec::new();
        while self.at_text("import") {
            self.collect_trivia();
            let leading = self.take_leading();
            let start = self.next_offset();
            self.expect("import")?;
            let is_static = self.eat("static");
            let mut segments = vec![self.expect_ident()?.text];
            let mut is_wildcard = false;
            while self.eat(".") {
                if self.eat("*") {
                    is_wildcard = true;
                    break;
                }
                segments.push(self.expect_ident()?.text);
            }
            self.expect(";")?;
            let span = Span::new(start, self.last_end);
            let trailing = self.take_trailing();
            imports.push(ImportDecl {
                leading,
                trailing,
                is_static,
                name: QualName { segments },
                is_wildcard,
                span,
            });
        }

        let mut types = Vec::new();
        while self.peek().is_some() {
            types.push(self.parse_type_decl()?);
        }
        self.collect_trivia();
        let trailing_comments = self.take_leading();
        Ok(CompilationUnit {
            package,
            imports,
            types,
            trailing_comments,
            span: Span::new(lo, self.last_end),
        })
    }

    // ----- declarations -------------------------------------------------

    fn parse_qual_name(&mut self) -> PResult<QualName> {
        let mut segments = vec![self.expect_ident()?.text];
        while self.at_text(".") && self.peek_nth(1).is_some_and(|t| t.kind == TokenKind::Ident) {
            self.expect(".")?;
            segments.push(self.expect_ident()?.text);
        }
        Ok(QualName { segments })
    }

    fn parse_modifiers(&mut self) -> PResult<Vec<Modifier>> {
        let mut modifiers = Vec::new();
        loop {
            let Some(tok) = self.peek() else { break };
            let modifier = match tok.text.as_str() {
                "@" => {
                    self.expect("@")?;
                    Modifier::Annotation(self.parse_qual_name()?)
                }
                "public" => {
                    self.bump()?;
                    Modifier::Public
                }
                "protected" => {
                    self.bump()?;
                    Modifier::Protected
                }
                "private" => {
                    self.bump()?;
                    Modifier::Private
                }
                "static" => {
                    self.bump()?;
                    Modifier::Static
                }
                "abstract" => {
                    self.bump()?;
                    Modifier::Abstract
                }
                "final" => {
                    self.bump()?;
                    Modifier::Final
                }
                _ => break,
            };
            modifiers.push(modifier);
        }
        Ok(modifiers)
    }

    fn parse_type_decl(&mut self) -> PResult<TypeDecl> {
        self.collect_trivia();
        let leading = self.take_leading();
        let start = self.next_offset();
        let modifiers = self.parse_modifiers()?;
        let kind = if self.eat("class") {
            TypeKind::Class
        } else if self.eat("interface") {
            TypeKind::Interface
        } else {
            return Err(self.unexpected("`class` or `interface`"));
        };
        let name = self.expect_ident()?.text;
        let type_params = if self.at_text("<") {
            self.parse_type_params()?
        } else {
            Vec::new()
        };
        let mut extends = Vec::new();
        if self.eat("extends") {
            extends.push(self.parse_type_ref(false)?);
            while self.eat(",") {
                extends.push(self.parse_type_ref(false)?);
            }
        }
        let mut implements = Vec::new();
        if self.eat("implements") {
            implements.push(self.parse_type_ref(false)?);
            while self.eat(",") {
                implements.push(self.parse_type_ref(false)?);
            }
        }
        self.expect("{")?;
        let mut members = Vec::new();
        while !self.at_text("}") {
            if self.peek().is_none() {
                return Err(self.eof_error());
            }
            members.push(self.parse_member()?);
        }
        self.collect_trivia();
        let body_trailing_comments = self.take_leading();
        self.expect("}")?;
        let span = Span::new(start, self.last_end);
        let trailing = self.take_trailing();
        Ok(TypeDecl {
            leading,
            trailing,
            modifiers,
            kind,
            name,
            type_params,
            extends,
            implements,
            members,
            body_trailing_comments,
            span,
        })
    }

    fn parse_type_params(&mut self) -> PResult<Vec<TypeParam>> {
        self.expect("<")?;
        let mut params = Vec::new();
        loop {
            let name = self.expect_ident()?.text;
            let bound = if self.eat("extends") {
                Some(self.parse_type_ref(false)?)
            } else {
                None
            };
            params.push(TypeParam { name, bound });
            if !self.eat(",") {
                break;
            }
        }
        self.expect(">")?;
        Ok(params)
    }

    fn parse_member(&mut self) -> PResult<Member> {
        self.collect_trivia();
        let leading = self.take_leading();
        let start = self.next_offset();
        let modifiers = self.parse_modifiers()?;

        if self.at_text("{") {
            let is_static = modifiers.iter().any(|m| matches!(m, Modifier::Static));
            let body = self.parse_block()?;
            let span = Span::new(start, self.last_end);
            let trailing = self.take_trailing();
            return Ok(Member::Initializer(Initializer {
                leading,
                trailing,
                is_static,
                body,
                span,
            }));
        }

        let type_params = if self.at_text("<") {
            self.parse_type_params()?
        } else {
            Vec::new()
        };

        let ty = self.parse_type_ref(false)?;

        // `Name(` right after the type position is a constructor.
        if self.at_text("(") {
            if let TypeRefKind::Named { name, type_args: None } = &ty.kind {
                if name.is_simple() {
                    let ctor_name = name.segments[0].clone();
                    return self.finish_method(
                        leading,
                        start,
                        modifiers,
                        type_params,
                        None,
                        ctor_name,
                    );
                }
            }
            return Err(self.unexpected("a member name"));
        }

        let name = self.expect_ident()?.text;
        if self.at_text("(") {
            return self.finish_method(leading, start, modifiers, type_params, Some(ty), name);
        }

        let init = if self.eat("=") {
            Some(self.parse_init_expr()?)
        } else {
            None
        };
        self.expect(";")?;
        let span = Span::new(start, self.last_end);
        let trailing = self.take_trailing();
        Ok(Member::Field(Field {
            leading,
            trailing,
            modifiers,
            ty,
            name,
            init,
            span,
        }))
    }

    fn finish_method(
        &mut self,
        leading: Vec<Comment>,
        start: u32,
        modifiers: Vec<Modifier>,
        type_params: Vec<TypeParam>,
        return_type: Option<TypeRef>,
        name: String,
    ) -> PResult<Member> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.at_text(")") {
            loop {
                let param_mods = self.parse_modifiers()?;
                let ty = self.parse_type_ref(false)?;
                let name = self.expect_ident()?.text;
                params.push(Param {
                    modifiers: param_mods,
                    ty,
                    name,
                });
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        let mut throws = Vec::new();
        if self.eat("throws") {
            throws.push(self.parse_type_ref(false)?);
            while self.eat(",") {
                throws.push(self.parse_type_ref(false)?);
            }
        }
        let body = if self.at_text("{") {
            Some(self.parse_block()?)
        } else {
            self.expect(";")?;
            None
        };
        let span = Span::new(start, self.last_end);
        let trailing = self.take_trailing();
        Ok(Member::Method(Method {
            leading,
            trailing,
            modifiers,
            type_params,
            return_type,
            name,
            params,
            throws,
            body,
            span,
        }))
    }

    // ----- types ---------------------------------------------------------

    fn parse_type_ref(&mut self, allow_var: bool) -> PResult<TypeRef> {
        let mut ty = self.parse_type_base(allow_var)?;
        while self.at_text("[") && self.peek_nth(1).is_some_and(|t| t.text == "]") {
            self.expect("[")?;
            self.expect("]")?;
            let span = Span::new(ty.span.lo, self.last_end);
            ty = TypeRef {
                kind: TypeRefKind::Array(Box::new(ty)),
                span,
            };
        }
        Ok(ty)
    }

    fn parse_type_base(&mut self, allow_var: bool) -> PResult<TypeRef> {
        let start = self.next_offset();
        let Some(tok) = self.peek() else {
            return Err(self.eof_error());
        };
        if let Some(prim) = Primitive::from_keyword(&tok.text) {
            self.bump()?;
            return Ok(TypeRef {
                kind: TypeRefKind::Primitive(prim),
                span: Span::new(start, self.last_end),
            });
        }
        if tok.text == "void" {
            self.bump()?;
            return Ok(TypeRef {
                kind: TypeRefKind::Void,
                span: Span::new(start, self.last_end),
            });
        }
        if tok.kind != TokenKind::Ident {
            return Err(self.unexpected("a type name"));
        }
        if allow_var
            && tok.text == "var"
            && self.peek_nth(1).is_some_and(|t| t.kind == TokenKind::Ident)
        {
            self.bump()?;
            return Ok(TypeRef {
                kind: TypeRefKind::Var,
                span: Span::new(start, self.last_end),
            });
        }
        let name = self.parse_qual_name()?;
        let mut type_args = None;
        if self.at_text("<") {
            let mark = self.mark();
            match self.parse_type_args() {
                Ok(args) => type_args = Some(args),
                Err(_) => self.rewind(mark),
            }
        }
        Ok(TypeRef {
            kind: TypeRefKind::Named { name, type_args },
            span: Span::new(start, self.last_end),
        })
    }

    fn parse_type_args(&mut self) -> PResult<Vec<TypeArg>> {
        self.expect("<")?;
        let mut args = Vec::new();
        if self.eat(">") {
            return Ok(args);
        }
        loop {
            if self.eat("?") {
                let bound = if self.eat("extends") {
                    Some(Box::new(self.parse_type_ref(false)?))
                } else {
                    None
                };
                args.push(TypeArg::Wildcard(bound));
            } else {
                args.push(TypeArg::Type(self.parse_type_ref(false)?));
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(">")?;
        Ok(args)
    }

    // ----- statements ----------------------------------------------------

    fn parse_block(&mut self) -> PResult<Block> {
        let start = self.next_offset();
        self.expect("{")?;
        let mut statements = Vec::new();
        while !self.at_text("}") {
            if self.peek().is_none() {
                return Err(self.eof_error());
            }
            statements.push(self.parse_stmt()?);
        }
        self.collect_trivia();
        let trailing_comments = self.take_leading();
        self.expect("}")?;
        Ok(Block {
            statements,
            trailing_comments,
            span: Span::new(start, self.last_end),
        })
    }

    fn parse_stmt(&mut self) -> PResult<Stmt> {
        self.collect_trivia();
        let leading = self.take_leading();
        let start = self.next_offset();
        let Some(tok) = self.peek() else {
            return Err(self.eof_error());
        };
        let kind = match tok.text.as_str() {
            "{" => StmtKind::Block(self.parse_block()?),
            ";" => {
                self.bump()?;
                StmtKind::Empty
            }
            "return" => {
                self.bump()?;
                let value = if self.at_text(";") {
                    None
                } else {
                    Some(self.parse_expr()?)
                };
                self.expect(";")?;
                StmtKind::Return(value)
            }
            "if" => {
                self.bump()?;
                self.expect("(")?;
                let cond = self.parse_expr()?;
                self.expect(")")?;
                let then_branch = Box::new(self.parse_stmt()?);
                let else_branch = if self.eat("else") {
                    Some(Box::new(self.parse_stmt()?))
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                }
            }
            "while" => {
                self.bump()?;
                self.expect("(")?;
                let cond = self.parse_expr()?;
                self.expect(")")?;
                let body = Box::new(self.parse_stmt()?);
                StmtKind::While { cond, body }
            }
            "for" => self.parse_for()?,
            "try" => self.parse_try()?,
            "throw" => {
                self.bump()?;
                let value = self.parse_expr()?;
                self.expect(";")?;
                StmtKind::Throw(value)
            }
            "break" => {
                self.bump()?;
                self.expect(";")?;
                StmtKind::Break
            }
            "continue" => {
                self.bump()?;
                self.expect(";")?;
                StmtKind::Continue
            }
            _ => {
                if let Some(local) = self.try_local_var()? {
                    self.expect(";")?;
                    StmtKind::LocalVar(local)
                } else {
                    let expr = self.parse_expr()?;
                    if let Some(op) = self.peek_assign_op() {
                        self.bump()?;
                        let value = self.parse_init_expr()?;
                        self.expect(";")?;
                        StmtKind::Assign {
                            target: expr,
                            op,
                            value,
                        }
                    } else {
                        self.expect(";")?;
                        StmtKind::Expr(expr)
                    }
                }
            }
        };
        let span = Span::new(start, self.last_end);
        let trailing = self.take_trailing();
        Ok(Stmt {
            leading,
            trailing,
            kind,
            span,
        })
    }

    fn peek_assign_op(&self) -> Option<AssignOp> {
        let tok = self.peek()?;
        if tok.kind != TokenKind::Op {
            return None;
        }
        match tok.text.as_str() {
            "=" => Some(AssignOp::Assign),
            "+=" => Some(AssignOp::Add),
            "-=" => Some(AssignOp::Sub),
            "*=" => Some(AssignOp::Mul),
            "/=" => Some(AssignOp::Div),
            _ => None,
        }
    }

    /// Attempts `[final] Type name` at the cursor, committing only when a
    /// declaration-shaped continuation (`=` or `;`) follows.
    fn try_local_var(&mut self) -> PResult<Option<LocalVar>> {
        let mark = self.mark();
        let mut modifiers = Vec::new();
        while self.at_text("final") {
            self.bump()?;
            modifiers.push(Modifier::Final);
        }
        let ty = match self.parse_type_ref(true) {
            Ok(ty) => ty,
            Err(_) => {
                self.rewind(mark);
                return Ok(None);
            }
        };
        let name = match self.peek() {
            Some(tok) if tok.kind == TokenKind::Ident => self.bump()?.text,
            _ => {
                self.rewind(mark);
                return Ok(None);
            }
        };
        match self.peek().map(|t| t.text.as_str()) {
            Some("=") => {
                self.bump()?;
                let init = Some(self.parse_init_expr()?);
                Ok(Some(LocalVar {
                    modifiers,
                    ty,
                    name,
                    init,
                }))
            }
            Some(";") => Ok(Some(LocalVar {
                modifiers,
                ty,
                name,
                init: None,
            })),
            _ => {
                self.rewind(mark);
                Ok(None)
            }
        }
    }

    fn parse_for(&mut self) -> PResult<StmtKind> {
        self.expect("for")?;
        self.expect("(")?;

        // Enhanced for: `[final] Type name : iterable`.
        let mark = self.mark();
        let mut foreach_mods = Vec::new();
        while self.at_text("final") {
            self.bump()?;
            foreach_mods.push(Modifier::Final);
        }
        if let Ok(ty) = self.parse_type_ref(true) {
            if self.peek().is_some_and(|t| t.kind == TokenKind::Ident)
                && self.peek_nth(1).is_some_and(|t| t.text == ":")
            {
                let name = self.bump()?.text;
                self.expect(":")?;
                let iterable = self.parse_expr()?;
                self.expect(")")?;
                let body = Box::new(self.parse_stmt()?);
                return Ok(StmtKind::ForEach {
                    modifiers: foreach_mods,
                    ty,
                    name,
                    iterable,
                    body,
                });
            }
        }
        self.rewind(mark);

        let init = if self.at_text(";") {
            self.bump()?;
            None
        } else if let Some(local) = self.try_local_var()? {
            self.expect(";")?;
            Some(ForInit::Decl(local))
        } else {
            let step = self.parse_expr_or_assign()?;
            self.expect(";")?;
            Some(ForInit::Step(step))
        };
        let cond = if self.at_text(";") {
            None
        } else {
            Some(self.parse_expr()?)
        };
        self.expect(";")?;
        let update = if self.at_text(")") {
            None
        } else {
            Some(self.parse_expr_or_assign()?)
        };
        self.expect(")")?;
        let body = Box::new(self.parse_stmt()?);
        Ok(StmtKind::For {
            init,
            cond,
            update,
            body,
        })
    }

    fn parse_expr_or_assign(&mut self) -> PResult<ExprOrAssign> {
        let expr = self.parse_expr()?;
        if let Some(op) = self.peek_assign_op() {
            self.bump()?;
            let value = self.parse_expr()?;
            Ok(ExprOrAssign::Assign {
                target: expr,
                op,
                value,
            })
        } else {
            Ok(ExprOrAssign::Expr(expr))
        }
    }

    fn parse_try(&mut self) -> PResult<StmtKind> {
        self.expect("try")?;
        let body = self.parse_block()?;
        let mut catches = Vec::new();
        while self.at_text("catch") {
            self.bump()?;
            self.expect("(")?;
            while self.at_text("final") {
                self.bump()?;
            }
            let ty = self.parse_type_ref(false)?;
            let name = self.expect_ident()?.text;
            self.expect(")")?;
            let catch_body = self.parse_block()?;
            catches.push(CatchClause {
                ty,
                name,
                body: catch_body,
            });
        }
        let finally_block = if self.eat("finally") {
            Some(self.parse_block()?)
        } else {
            None
        };
        if catches.is_empty() && finally_block.is_none() {
            return Err(self.unexpected("`catch` or `finally`"));
        }
        Ok(StmtKind::Try {
            body,
            catches,
            finally_block,
        })
    }

    // ----- expressions ----------------------------------------------------

    fn parse_expr(&mut self) -> PResult<Expr> {
        if let Some(lambda) = self.try_lambda()? {
            return Ok(lambda);
        }
        self.parse_binary(0)
    }

    /// Initializer position: array literals `{a, b}` are allowed here.
    fn parse_init_expr(&mut self) -> PResult<Expr> {
        if self.at_text("{") {
            let start = self.next_offset();
            let elems = self.parse_array_lit()?;
            return Ok(Expr {
                kind: ExprKind::ArrayLit(elems),
                span: Span::new(start, self.last_end),
            });
        }
        self.parse_expr()
    }

    fn parse_array_lit(&mut self) -> PResult<Vec<Expr>> {
        self.expect("{")?;
        let mut elems = Vec::new();
        if !self.at_text("}") {
            loop {
                elems.push(self.parse_expr()?);
                if !self.eat(",") {
                    break;
                }
                if self.at_text("}") {
                    break;
                }
            }
        }
        self.expect("}")?;
        Ok(elems)
    }

    fn try_lambda(&mut self) -> PResult<Option<Expr>> {
        let start = self.next_offset();
        // `x -> ...`
        if self.peek().is_some_and(|t| t.kind == TokenKind::Ident)
            && self.peek_nth(1).is_some_and(|t| t.text == "->")
        {
            let name = self.bump()?.text;
            self.expect("->")?;
            let body = self.parse_lambda_body()?;
            return Ok(Some(Expr {
                kind: ExprKind::Lambda {
                    params: vec![LambdaParam { ty: None, name }],
                    body,
                },
                span: Span::new(start, self.last_end),
            }));
        }
        // `(params) -> ...`
        if !self.at_text("(") {
            return Ok(None);
        }
        let mark = self.mark();
        self.expect("(")?;
        let mut params = Vec::new();
        let mut ok = true;
        if !self.at_text(")") {
            loop {
                let param_mark = self.mark();
                // typed `T name` first, bare `name` otherwise
                let typed = match self.parse_type_ref(false) {
                    Ok(ty) if self.peek().is_some_and(|t| t.kind == TokenKind::Ident) => {
                        let name = self.bump()?.text;
                        Some(LambdaParam { ty: Some(ty), name })
                    }
                    _ => {
                        self.rewind(param_mark);
                        None
                    }
                };
                let param = match typed {
                    Some(param) => param,
                    None => match self.peek() {
                        Some(tok) if tok.kind == TokenKind::Ident => LambdaParam {
                            ty: None,
                            name: self.bump()?.text,
                        },
                        _ => {
                            ok = false;
                            break;
                        }
                    },
                };
                params.push(param);
                if !self.eat(",") {
                    break;
                }
            }
        }
        if ok && self.eat(")") && self.eat("->") {
            let body = self.parse_lambda_body()?;
            return Ok(Some(Expr {
                kind: ExprKind::Lambda { params, body },
                span: Span::new(start, self.last_end),
            }));
        }
        self.rewind(mark);
        Ok(None)
    }

    fn parse_lambda_body(&mut self) -> PResult<LambdaBody> {
        if self.at_text("{") {
            Ok(LambdaBody::Block(self.parse_block()?))
        } else {
            Ok(LambdaBody::Expr(Box::new(self.parse_expr()?)))
        }
    }

    fn parse_binary(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: [&[(&str, BinaryOp)]; 6] = [
            &[("||", BinaryOp::Or)],
            &[("&&", BinaryOp::And)],
            &[("==", BinaryOp::Eq), ("!=", BinaryOp::Ne)],
            &[
                ("<=", BinaryOp::Le),
                (">=", BinaryOp::Ge),
                ("<", BinaryOp::Lt),
                (">", BinaryOp::Gt),
            ],
            &[("+", BinaryOp::Add), ("-", BinaryOp::Sub)],
            &[
                ("*", BinaryOp::Mul),
                ("/", BinaryOp::Div),
                ("%", BinaryOp::Rem),
            ],
        ];
        if level == LEVELS.len() {
            return self.parse_unary();
        }
        let start = self.next_offset();
        let mut lhs = self.parse_binary(level + 1)?;
        loop {
            // instanceof sits at relational precedence.
            if level == 3 && self.at_text("instanceof") {
                self.bump()?;
                let ty = self.parse_type_ref(false)?;
                lhs = Expr {
                    kind: ExprKind::InstanceOf {
                        expr: Box::new(lhs),
                        ty,
                    },
                    span: Span::new(start, self.last_end),
                };
                continue;
            }
            let Some(tok) = self.peek() else { break };
            if tok.kind != TokenKind::Op {
                break;
            }
            let Some(&(_, op)) = LEVELS[level].iter().find(|(sym, _)| *sym == tok.text) else {
                break;
            };
            self.bump()?;
            let rhs = self.parse_binary(level + 1)?;
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span: Span::new(start, self.last_end),
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let start = self.next_offset();
        let Some(tok) = self.peek() else {
            return Err(self.eof_error());
        };
        let op = match tok.text.as_str() {
            "!" => Some(UnaryOp::Not),
            "-" => Some(UnaryOp::Neg),
            "++" => Some(UnaryOp::PreInc),
            "--" => Some(UnaryOp::PreDec),
            _ => None,
        };
        if let Some(op) = op {
            self.bump()?;
            let expr = self.parse_unary()?;
            return Ok(Expr {
                kind: ExprKind::Unary {
                    op,
                    expr: Box::new(expr),
                },
                span: Span::new(start, self.last_end),
            });
        }
        if let Some(cast) = self.try_cast()? {
            return Ok(cast);
        }
        self.parse_postfix()
    }

    /// `(Type) operand`, distinguished from a parenthesized expression by
    /// the shape of the type and the first token of the operand.
    fn try_cast(&mut self) -> PResult<Option<Expr>> {
        if !self.at_text("(") {
            return Ok(None);
        }
        let start = self.next_offset();
        let mark = self.mark();
        self.expect("(")?;
        let ty = match self.parse_type_ref(false) {
            Ok(ty) => ty,
            Err(_) => {
                self.rewind(mark);
                return Ok(None);
            }
        };
        if !self.eat(")") {
            self.rewind(mark);
            return Ok(None);
        }
        let numeric = matches!(ty.kind, TypeRefKind::Primitive(_) | TypeRefKind::Array(_));
        // A bare `(name)` could equally be a parenthesized expression, so a
        // cast is committed only when the next token can start an operand.
        let operand_ahead = match self.peek() {
            Some(tok) => match tok.kind {
                TokenKind::Ident | TokenKind::Literal(_) => true,
                TokenKind::Keyword => matches!(tok.text.as_str(), "this" | "super" | "new"),
                TokenKind::Punct => tok.text == "(",
                TokenKind::Op => tok.text == "!" || (numeric && tok.text == "-"),
                _ => false,
            },
            None => false,
        };
        if !operand_ahead {
            self.rewind(mark);
            return Ok(None);
        }
        let expr = match self.try_lambda()? {
            Some(lambda) => lambda,
            None => self.parse_unary()?,
        };
        Ok(Some(Expr {
            kind: ExprKind::Cast {
                ty,
                expr: Box::new(expr),
            },
            span: Span::new(start, self.last_end),
        }))
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let start = self.next_offset();
        let mut expr = self.parse_primary()?;
        loop {
            let Some(tok) = self.peek() else { break };
            match tok.text.as_str() {
                "." => {
                    self.bump()?;
                    let name = match self.peek() {
                        Some(tok) if tok.kind == TokenKind::Ident => self.bump()?.text,
                        // `.class` literals keep the keyword as a member name.
                        Some(tok) if tok.text == "class" => self.bump()?.text,
                        _ => return Err(self.unexpected("a member name")),
                    };
                    if self.at_text("(") {
                        let args = self.parse_args()?;
                        expr = Expr {
                            kind: ExprKind::MethodCall {
                                recv: Some(Box::new(expr)),
                                name,
                                args,
                            },
                            span: Span::new(start, self.last_end),
                        };
                    } else {
                        expr = Expr {
                            kind: ExprKind::FieldAccess {
                                recv: Box::new(expr),
                                name,
                            },
                            span: Span::new(start, self.last_end),
                        };
                    }
                }
                "[" => {
                    self.bump()?;
                    let index = self.parse_expr()?;
                    self.expect("]")?;
                    expr = Expr {
                        kind: ExprKind::Index {
                            array: Box::new(expr),
                            index: Box::new(index),
                        },
                        span: Span::new(start, self.last_end),
                    };
                }
                "++" | "--" => {
                    let op = if tok.text == "++" {
                        PostfixOp::Inc
                    } else {
                        PostfixOp::Dec
                    };
                    self.bump()?;
                    expr = Expr {
                        kind: ExprKind::Postfix {
                            op,
                            expr: Box::new(expr),
                        },
                        span: Span::new(start, self.last_end),
                    };
                }
                _ => break,
            }
        }
        Ok(expr)
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.at_text(")") {
            loop {
                args.push(self.parse_expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let start = self.next_offset();
        let Some(tok) = self.peek() else {
            return Err(self.eof_error());
        };
        let kind = match tok.kind {
            TokenKind::Literal(lit_kind) => {
                let text = self.bump()?.text;
                ExprKind::Literal(match lit_kind {
                    LitKind::Null => Literal::Null,
                    LitKind::Bool => Literal::Bool(text == "true"),
                    LitKind::Int => Literal::Int(text),
                    LitKind::Float => Literal::Float(text),
                    LitKind::Str => Literal::Str(text),
                    LitKind::Char => Literal::Char(text),
                })
            }
            TokenKind::Ident => {
                let name = self.bump()?.text;
                if self.at_text("(") {
                    let args = self.parse_args()?;
                    ExprKind::MethodCall {
                        recv: None,
                        name,
                        args,
                    }
                } else {
                    ExprKind::Name(name)
                }
            }
            TokenKind::Keyword => match tok.text.as_str() {
                "this" => {
                    let name = self.bump()?.text;
                    if self.at_text("(") {
                        let args = self.parse_args()?;
                        ExprKind::MethodCall {
                            recv: None,
                            name,
                            args,
                        }
                    } else {
                        ExprKind::This
                    }
                }
                "super" => {
                    let name = self.bump()?.text;
                    if self.at_text("(") {
                        let args = self.parse_args()?;
                        ExprKind::MethodCall {
                            recv: None,
                            name,
                            args,
                        }
                    } else {
                        ExprKind::Super
                    }
                }
                "new" => return self.parse_new(start),
                _ => {
                    return Err(self.error_at(
                        tok,
                        format!("unexpected keyword {:?} in expression", tok.text),
                        vec!["an expression".to_string()],
                    ))
                }
            },
            _ if tok.text == "(" => {
                self.bump()?;
                let inner = self.parse_expr()?;
                self.expect(")")?;
                ExprKind::Paren(Box::new(inner))
            }
            _ => return Err(self.unexpected("an expression")),
        };
        Ok(Expr {
            kind,
            span: Span::new(start, self.last_end),
        })
    }

    fn parse_new(&mut self, start: u32) -> PResult<Expr> {
        self.expect("new")?;
        let base = self.parse_type_base(false)?;
        if self.at_text("[") {
            let mut dims = Vec::new();
            while self.at_text("[") {
                self.expect("[")?;
                if self.eat("]") {
                    dims.push(None);
                } else {
                    dims.push(Some(self.parse_expr()?));
                    self.expect("]")?;
                }
            }
            let init = if self.at_text("{") {
                Some(self.parse_array_lit()?)
            } else {
                None
            };
            return Ok(Expr {
                kind: ExprKind::NewArray {
                    elem: base,
                    dims,
                    init,
                },
                span: Span::new(start, self.last_end),
            });
        }
        if !matches!(base.kind, TypeRefKind::Named { .. }) {
            return Err(self.unexpected("a class type after `new`"));
        }
        let args = self.parse_args()?;
        Ok(Expr {
            kind: ExprKind::New { ty: base, args },
            span: Span::new(start, self.last_end),
        })
    }
}
