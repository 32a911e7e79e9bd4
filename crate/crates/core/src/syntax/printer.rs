//! Canonical renderer for the syntax tree.
//!
//! Output is deterministic: four-space indentation, one statement per line,
//! single blank lines after the package line and the import block and
//! between type declarations. Re-parsing rendered output yields a tree
//! structurally equal to the one rendered.

use super::ast::*;

/// Renders a compilation unit to canonical source text.
pub fn render(unit: &CompilationUnit) -> String {
    let mut p = Printer::new();
    p.unit(unit);
    p.out
}

/// Renders a single expression, mainly for diagnostics and reports.
pub fn render_expr(expr: &Expr) -> String {
    let mut p = Printer::new();
    p.expr(expr);
    p.out
}

/// Renders a type reference.
pub fn render_type(ty: &TypeRef) -> String {
    let mut p = Printer::new();
    p.type_ref(ty);
    p.out
}

/// Renders a single statement at column zero.
pub fn render_stmt(stmt: &Stmt) -> String {
    let mut p = Printer::new();
    p.stmt(stmt);
    p.out
}

struct Printer {
    out: String,
    indent: usize,
    at_line_start: bool,
}

impl Printer {
    fn new() -> Printer {
        Printer {
            out: String::new(),
            indent: 0,
            at_line_start: true,
        }
    }

    fn pad(&mut self) {
        if self.at_line_start {
            for _ in 0..self.indent {
                self.out.push_str("    ");
            }
            self.at_line_start = false;
        }
    }

    fn nl(&mut self) {
        self.out.push('\n');
        self.at_line_start = true;
    }

    fn word(&mut self, text: &str) {
        self.out.push_str(text);
        self.at_line_start = false;
    }

    fn comments(&mut self, comments: &[Comment]) {
        for c in comments {
            self.pad();
            self.word(&c.text);
            self.nl();
        }
    }

    fn trailing(&mut self, comment: &Option<Comment>) {
        if let Some(c) = comment {
            self.word(" ");
            self.word(&c.text);
        }
    }

    // ----- unit and declarations -----------------------------------------

    fn unit(&mut self, unit: &CompilationUnit) {
        if let Some(pkg) = &unit.package {
            self.comments(&pkg.leading);
            self.word("package ");
            self.word(&pkg.name.dotted());
            self.word(";");
            self.trailing(&pkg.trailing);
            self.nl();
            self.nl();
        }
        for import in &unit.imports {
            self.comments(&import.leading);
            self.word("import ");
            if import.is_static {
                self.word("static ");
            }
            self.word(&import.name.dotted());
            if import.is_wildcard {
                self.word(".*");
            }
            self.word(";");
            self.trailing(&import.trailing);
            self.nl();
        }
        if !unit.imports.is_empty() {
            self.nl();
        }
        for (i, decl) in unit.types.iter().enumerate() {
            if i > 0 {
                self.nl();
            }
            self.type_decl(decl);
        }
        self.comments(&unit.trailing_comments);
    }

    fn modifiers(&mut self, modifiers: &[Modifier]) {
        for m in modifiers {
            match m {
                Modifier::Annotation(name) => {
                    self.word("@");
                    self.word(&name.dotted());
                }
                Modifier::Public => self.word("public"),
                Modifier::Protected => self.word("protected"),
                Modifier::Private => self.word("private"),
                Modifier::Static => self.word("static"),
                Modifier::Abstract => self.word("abstract"),
                Modifier::Final => self.word("final"),
            }
            self.word(" ");
        }
    }

    fn type_decl(&mut self, decl: &TypeDecl) {
        self.comments(&decl.leading);
        self.pad();
        self.modifiers(&decl.modifiers);
        self.word(match decl.kind {
            TypeKind::Class => "class ",
            TypeKind::Interface => "interface ",
        });
        self.word(&decl.name);
        if !decl.type_params.is_empty() {
            self.word("<");
            for (i, tp) in decl.type_params.iter().enumerate() {
                if i > 0 {
                    self.word(", ");
                }
                self.word(&tp.name);
                if let Some(bound) = &tp.bound {
                    self.word(" extends ");
                    self.type_ref(bound);
                }
            }
            self.word(">");
        }
        if !decl.extends.is_empty() {
            self.word(" extends ");
            self.type_list(&decl.extends);
        }
        if !decl.implements.is_empty() {
            self.word(" implements ");
            self.type_list(&decl.implements);
        }
        self.word(" {");
        self.nl();
        self.indent += 1;
        for member in &decl.members {
            self.member(member);
        }
        self.comments(&decl.body_trailing_comments);
        self.indent -= 1;
        self.pad();
        self.word("}");
        self.trailing(&decl.trailing);
        self.nl();
    }

    fn type_list(&mut self, types: &[TypeRef]) {
        for (i, ty) in types.iter().enumerate() {
            if i > 0 {
                self.word(", ");
            }
            self.type_ref(ty);
        }
    }

    fn member(&mut self, member: &Member) {
        match member {
            Member::Field(f) => {
                self.comments(&f.leading);
                self.pad();
                self.modifiers(&f.modifiers);
                self.type_ref(&f.ty);
                self.word(" ");
                self.word(&f.name);
                if let Some(init) = &f.init {
                    self.word(" = ");
                    self.expr(init);
                }
                self.word(";");
                self.trailing(&f.trailing);
                self.nl();
            }
            Member::Method(m) => {
                self.comments(&m.leading);
                self.pad();
                self.modifiers(&m.modifiers);
                if !m.type_params.is_empty() {
                    self.word("<");
                    for (i, tp) in m.type_params.iter().enumerate() {
                        if i > 0 {
                            self.word(", ");
                        }
                        self.word(&tp.name);
                        if let Some(bound) = &tp.bound {
                            self.word(" extends ");
                            self.type_ref(bound);
                        }
                    }
                    self.word("> ");
                }
                if let Some(ret) = &m.return_type {
                    self.type_ref(ret);
                    self.word(" ");
                }
                self.word(&m.name);
                self.word("(");
                for (i, param) in m.params.iter().enumerate() {
                    if i > 0 {
                        self.word(", ");
                    }
                    self.modifiers(&param.modifiers);
                    self.type_ref(&param.ty);
                    self.word(" ");
                    self.word(&param.name);
                }
                self.word(")");
                if !m.throws.is_empty() {
                    self.word(" throws ");
                    self.type_list(&m.throws);
                }
                match &m.body {
                    Some(body) => {
                        self.word(" ");
                        self.block(body);
                    }
                    None => self.word(";"),
                }
                self.trailing(&m.trailing);
                self.nl();
            }
            Member::Initializer(init) => {
                self.comments(&init.leading);
                self.pad();
                if init.is_static {
                    self.word("static ");
                }
                self.block(&init.body);
                self.trailing(&init.trailing);
                self.nl();
            }
        }
    }

    // ----- statements -----------------------------------------------------

    /// Renders `{ ... }` starting at the cursor; no trailing newline.
    fn block(&mut self, block: &Block) {
        if block.statements.is_empty() && block.trailing_comments.is_empty() {
            self.word("{}");
            return;
        }
        self.word("{");
        self.nl();
        self.indent += 1;
        for stmt in &block.statements {
            self.stmt(stmt);
        }
        self.comments(&block.trailing_comments);
        self.indent -= 1;
        self.pad();
        self.word("}");
    }

    fn stmt(&mut self, stmt: &Stmt) {
        self.comments(&stmt.leading);
        self.pad();
        self.stmt_kind(&stmt.kind);
        if self.at_line_start {
            // A non-block branch body already closed this line.
            if let Some(c) = &stmt.trailing {
                self.pad();
                self.word(&c.text);
                self.nl();
            }
        } else {
            self.trailing(&stmt.trailing);
            self.nl();
        }
    }

    /// Renders a branch body: blocks stay on the header line, other
    /// statements go on their own indented line. Returns whether the body
    /// was a block (so the caller knows if `}` precedes any `else`).
    fn branch(&mut self, body: &Stmt) -> bool {
        if let StmtKind::Block(block) = &body.kind {
            if body.leading.is_empty() {
                self.word(" ");
                self.block(block);
                self.trailing(&body.trailing);
                return true;
            }
        }
        self.nl();
        self.indent += 1;
        self.stmt(body);
        self.indent -= 1;
        false
    }

    fn stmt_kind(&mut self, kind: &StmtKind) {
        match kind {
            StmtKind::Expr(expr) => {
                self.expr(expr);
                self.word(";");
            }
            StmtKind::Assign { target, op, value } => {
                self.expr(target);
                self.word(" ");
                self.word(op.symbol());
                self.word(" ");
                self.expr(value);
                self.word(";");
            }
            StmtKind::LocalVar(local) => {
                self.local_var(local);
                self.word(";");
            }
            StmtKind::Return(value) => {
                self.word("return");
                if let Some(v) = value {
                    self.word(" ");
                    self.expr(v);
                }
                self.word(";");
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => self.if_stmt(cond, then_branch, else_branch.as_deref()),
            StmtKind::While { cond, body } => {
                self.word("while (");
                self.expr(cond);
                self.word(")");
                self.branch(body);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.word("for (");
                match init {
                    Some(ForInit::Decl(local)) => self.local_var(local),
                    Some(ForInit::Step(step)) => self.expr_or_assign(step),
                    None => {}
                }
                self.word(";");
                if let Some(c) = cond {
                    self.word(" ");
                    self.expr(c);
                }
                self.word(";");
                if let Some(u) = update {
                    self.word(" ");
                    self.expr_or_assign(u);
                }
                self.word(")");
                self.branch(body);
            }
            StmtKind::ForEach {
                modifiers,
                ty,
                name,
                iterable,
                body,
            } => {
                self.word("for (");
                self.modifiers(modifiers);
                self.type_ref(ty);
                self.word(" ");
                self.word(name);
                self.word(" : ");
                self.expr(iterable);
                self.word(")");
                self.branch(body);
            }
            StmtKind::Block(block) => self.block(block),
            StmtKind::Try {
                body,
                catches,
                finally_block,
            } => {
                self.word("try ");
                self.block(body);
                for catch in catches {
                    self.word(" catch (");
                    self.type_ref(&catch.ty);
                    self.word(" ");
                    self.word(&catch.name);
                    self.word(") ");
                    self.block(&catch.body);
                }
                if let Some(fin) = finally_block {
                    self.word(" finally ");
                    self.block(fin);
                }
            }
            StmtKind::Throw(expr) => {
                self.word("throw ");
                self.expr(expr);
                self.word(";");
            }
            StmtKind::Break => self.word("break;"),
            StmtKind::Continue => self.word("continue;"),
            StmtKind::Empty => self.word(";"),
        }
    }

    fn if_stmt(&mut self, cond: &Expr, then_branch: &Stmt, else_branch: Option<&Stmt>) {
        self.word("if (");
        self.expr(cond);
        self.word(")");
        let then_block = self.branch(then_branch);
        let Some(els) = else_branch else { return };
        // A trailing line comment would swallow an `else` on the same line.
        let comment_blocks_line = then_branch
            .trailing
            .as_ref()
            .is_some_and(|c| c.text.starts_with("//"));
        if then_block && !comment_blocks_line {
            self.word(" else");
        } else {
            if !self.at_line_start {
                self.nl();
            }
            self.pad();
            self.word("else");
        }
        if let StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } = &els.kind
        {
            if els.leading.is_empty() {
                self.word(" ");
                self.if_stmt(cond, then_branch, else_branch.as_deref());
                return;
            }
        }
        self.branch(els);
    }

    fn local_var(&mut self, local: &LocalVar) {
        self.modifiers(&local.modifiers);
        self.type_ref(&local.ty);
        self.word(" ");
        self.word(&local.name);
        if let Some(init) = &local.init {
            self.word(" = ");
            self.expr(init);
        }
    }

    fn expr_or_assign(&mut self, step: &ExprOrAssign) {
        match step {
            ExprOrAssign::Expr(expr) => self.expr(expr),
            ExprOrAssign::Assign { target, op, value } => {
                self.expr(target);
                self.word(" ");
                self.word(op.symbol());
                self.word(" ");
                self.expr(value);
            }
        }
    }

    // ----- types ------------------------------------------------------------

    fn type_ref(&mut self, ty: &TypeRef) {
        match &ty.kind {
            TypeRefKind::Primitive(p) => self.word(p.keyword()),
            TypeRefKind::Void => self.word("void"),
            TypeRefKind::Var => self.word("var"),
            TypeRefKind::Named { name, type_args } => {
                self.word(&name.dotted());
                if let Some(args) = type_args {
                    self.word("<");
                    for (i, arg) in args.iter().enumerate() {
                        if i > 0 {
                            self.word(", ");
                        }
                        match arg {
                            TypeArg::Type(t) => self.type_ref(t),
                            TypeArg::Wildcard(bound) => {
                                self.word("?");
                                if let Some(b) = bound {
                                    self.word(" extends ");
                                    self.type_ref(b);
                                }
                            }
                        }
                    }
                    self.word(">");
                }
            }
            TypeRefKind::Array(elem) => {
                self.type_ref(elem);
                self.word("[]");
            }
        }
    }

    // ----- expressions --------------------------------------------------------

    fn expr(&mut self, expr: &Expr) {
        match &expr.kind {
            ExprKind::Name(name) => self.word(name),
            ExprKind::Literal(lit) => match lit {
                Literal::Null => self.word("null"),
                Literal::Bool(b) => self.word(if *b { "true" } else { "false" }),
                Literal::Int(raw)
                | Literal::Float(raw)
                | Literal::Str(raw)
                | Literal::Char(raw) => self.word(raw),
            },
            ExprKind::This => self.word("this"),
            ExprKind::Super => self.word("super"),
            ExprKind::Unary { op, expr } => {
                self.word(op.symbol());
                let at = self.out.len();
                self.expr(expr);
                // keep `-` before a negative operand from fusing into `--`
                if matches!(op, UnaryOp::Neg) && self.out[at..].starts_with('-') {
                    self.out.insert(at, ' ');
                }
            }
            ExprKind::Postfix { op, expr } => {
                self.expr(expr);
                self.word(op.symbol());
            }
            ExprKind::Binary { op, lhs, rhs } => {
                self.expr(lhs);
                self.word(" ");
                self.word(op.symbol());
                self.word(" ");
                self.expr(rhs);
            }
            ExprKind::Cast { ty, expr } => {
                self.word("(");
                self.type_ref(ty);
                self.word(") ");
                self.expr(expr);
            }
            ExprKind::InstanceOf { expr, ty } => {
                self.expr(expr);
                self.word(" instanceof ");
                self.type_ref(ty);
            }
            ExprKind::FieldAccess { recv, name } => {
                self.expr(recv);
                self.word(".");
                self.word(name);
            }
            ExprKind::MethodCall { recv, name, args } => {
                if let Some(r) = recv {
                    self.expr(r);
                    self.word(".");
                }
                self.word(name);
                self.args(args);
            }
            ExprKind::New { ty, args } => {
                self.word("new ");
                self.type_ref(ty);
                self.args(args);
            }
            ExprKind::NewArray { elem, dims, init } => {
                self.word("new ");
                self.type_ref(elem);
                for dim in dims {
                    self.word("[");
                    if let Some(d) = dim {
                        self.expr(d);
                    }
                    self.word("]");
                }
                if let Some(elems) = init {
                    self.word(" ");
                    self.array_lit(elems);
                }
            }
            ExprKind::ArrayLit(elems) => self.array_lit(elems),
            ExprKind::Index { array, index } => {
                self.expr(array);
                self.word("[");
                self.expr(index);
                self.word("]");
            }
            ExprKind::Lambda { params, body } => {
                match params.as_slice() {
                    [LambdaParam { ty: None, name }] => self.word(name),
                    _ => {
                        self.word("(");
                        for (i, param) in params.iter().enumerate() {
                            if i > 0 {
                                self.word(", ");
                            }
                            if let Some(ty) = &param.ty {
                                self.type_ref(ty);
                                self.word(" ");
                            }
                            self.word(&param.name);
                        }
                        self.word(")");
                    }
                }
                self.word(" -> ");
                match body {
                    LambdaBody::Expr(expr) => self.expr(expr),
                    LambdaBody::Block(block) => self.block(block),
                }
            }
            ExprKind::Paren(inner) => {
                self.word("(");
                self.expr(inner);
                self.word(")");
            }
        }
    }

    fn args(&mut self, args: &[Expr]) {
        self.word("(");
        for (i, arg) in args.iter().enumerate() {
            if i > 0 {
                self.word(", ");
            }
            self.expr(arg);
        }
        self.word(")");
    }

    fn array_lit(&mut self, elems: &[Expr]) {
        self.word("{");
        for (i, elem) in elems.iter().enumerate() {
            if i > 0 {
                self.word(", ");
            }
            self.expr(elem);
        }
        self.word("}");
    }
}
