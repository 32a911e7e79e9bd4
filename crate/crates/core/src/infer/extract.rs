//! Walks a parsed snippet and collects typing constraints over type
//! variables: one variable per distinct simple type name, one per
//! intermediate expression.
//!
//! Type names declared inside the snippet itself (its own classes and type
//! parameters) resolve locally, so they get unconstrained variables rather
//! than knowledge-base lookups. Constructs outside the constraint
//! vocabulary, such as receiverless calls or arithmetic, produce
//! unconstrained variables too: missing knowledge never prunes.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{
    Block, CatchClause, CompilationUnit, Expr, ExprKind, ExprOrAssign, ForInit, LambdaBody,
    Literal, LocalVar, Member, Primitive, Stmt, StmtKind, TypeArg, TypeDecl, TypeRef, TypeRefKind,
    UnaryOp,
};

use super::{Constraint, Extraction, LitClass, TypeVar};

/// Collects type variables and constraints from a compilation unit whose
/// imports have been stripped.
pub fn extract_constraints(unit: &CompilationUnit) -> Extraction {
    let mut ex = Extractor::new(unit);
    for decl in &unit.types {
        ex.type_decl(decl);
    }
    Extraction {
        tvs: ex.tvs,
        constraints: ex.constraints,
        named: ex.named,
        package: unit.package.as_ref().map(|p| p.name.dotted()),
    }
}

struct Extractor {
    tvs: Vec<TypeVar>,
    constraints: Vec<Constraint>,
    /// Simple type name → its variable, for names resolved against the KB.
    named: BTreeMap<String, usize>,
    /// Type names the snippet declares itself, plus in-scope type parameters.
    local_types: BTreeSet<String>,
    /// Variables for locally-resolved or qualified type names: no constraints.
    local_named: BTreeMap<String, usize>,
    /// One shared variable per primitive keyword.
    primitives: BTreeMap<Primitive, usize>,
    /// Variable scopes, innermost last; each maps a value name to the
    /// variable of its declared type.
    scopes: Vec<BTreeMap<String, usize>>,
    /// Return-type variable of the enclosing method, if it has one.
    returns: Vec<Option<usize>>,
}

impl Extractor {
    fn new(unit: &CompilationUnit) -> Extractor {
        let mut local_types = BTreeSet::new();
        for decl in &unit.types {
            local_types.insert(decl.name.clone());
        }
        Extractor {
            tvs: Vec::new(),
            constraints: Vec::new(),
            named: BTreeMap::new(),
            local_types,
            local_named: BTreeMap::new(),
            primitives: BTreeMap::new(),
            scopes: vec![BTreeMap::new()],
            returns: Vec::new(),
        }
    }

    fn fresh(&mut self, origin: impl Into<String>) -> usize {
        let id = self.tvs.len();
        self.tvs.push(TypeVar {
            id,
            origin: origin.into(),
        });
        id
    }

    fn named_tv(&mut self, name: &str) -> usize {
        if self.local_types.contains(name) || name.contains('.') {
            if let Some(&tv) = self.local_named.get(name) {
                return tv;
            }
            let tv = self.fresh(name);
            self.local_named.insert(name.to_string(), tv);
            return tv;
        }
        if let Some(&tv) = self.named.get(name) {
            return tv;
        }
        let tv = self.fresh(name);
        self.named.insert(name.to_string(), tv);
        self.constraints.push(Constraint::SimpleName {
            tv,
            name: name.to_string(),
        });
        tv
    }

    fn primitive_tv(&mut self, prim: Primitive) -> usize {
        if let Some(&tv) = self.primitives.get(&prim) {
            return tv;
        }
        let tv = self.fresh(prim.keyword());
        self.primitives.insert(prim, tv);
        self.constraints.push(Constraint::IsLiteral {
            tv,
            lit: LitClass::Prim(prim),
        });
        tv
    }

    /// The variable for a type reference; `None` for `var` and `void`,
    /// which denote no type of their own.
    fn type_use(&mut self, ty: &TypeRef) -> Option<usize> {
        match &ty.kind {
            TypeRefKind::Primitive(p) => Some(self.primitive_tv(*p)),
            TypeRefKind::Named { name, type_args } => {
                if let Some(args) = type_args {
                    for arg in args {
                        let bound = match arg {
                            TypeArg::Type(t) => Some(t),
                            TypeArg::Wildcard(b) => b.as_deref(),
                        };
                        if let Some(t) = bound {
                            self.type_use(t);
                        }
                    }
                }
                Some(self.named_tv(&name.dotted()))
            }
            TypeRefKind::Array(elem) => {
                self.type_use(elem);
                Some(self.fresh("array"))
            }
            TypeRefKind::Var | TypeRefKind::Void => None,
        }
    }

    fn bind(&mut self, name: &str, tv: usize) {
        self.scopes
            .last_mut()
            .expect("scope stack never empty")
            .insert(name.to_string(), tv);
    }

    fn lookup(&self, name: &str) -> Option<usize> {
        self.scopes
            .iter()
            .rev()
            .find_map(|scope| scope.get(name).copied())
    }

    fn scoped<T>(&mut self, f: impl FnOnce(&mut Extractor) -> T) -> T {
        self.scopes.push(BTreeMap::new());
        let out = f(self);
        self.scopes.pop();
        out
    }

    fn type_decl(&mut self, decl: &TypeDecl) {
        let added: Vec<String> = decl
            .type_params
            .iter()
            .filter(|p| self.local_types.insert(p.name.clone()))
            .map(|p| p.name.clone())
            .collect();
        for bound in decl.type_params.iter().filter_map(|p| p.bound.as_ref()) {
            self.type_use(bound);
        }
        for ty in decl.extends.iter().chain(&decl.implements) {
            self.type_use(ty);
        }
        self.scoped(|ex| {
            // Fields come into scope before any method body runs.
            for member in &decl.members {
                if let Member::Field(field) = member {
                    let tv = ex
                        .type_use(&field.ty)
                        .unwrap_or_else(|| ex.fresh(format!("field {}", field.name)));
                    ex.bind(&field.name, tv);
                }
            }
            for member in &decl.members {
                ex.member(member);
            }
        });
        for name in added {
            self.local_types.remove(&name);
        }
    }

    fn member(&mut self, member: &Member) {
        match member {
            Member::Field(field) => {
                if let Some(init) = &field.init {
                    let declared = self.lookup(&field.name);
                    let value = self.expr(init);
                    if let Some(declared) = declared {
                        self.constraints.push(Constraint::AssignableTo {
                            sub: value,
                            sup: declared,
                        });
                    }
                }
            }
            Member::Method(method) => {
                let added: Vec<String> = method
                    .type_params
                    .iter()
                    .filter(|p| self.local_types.insert(p.name.clone()))
                    .map(|p| p.name.clone())
                    .collect();
                let return_tv = method.return_type.as_ref().and_then(|ty| self.type_use(ty));
                for ty in &method.throws {
                    self.type_use(ty);
                }
                self.scoped(|ex| {
                    for param in &method.params {
                        let tv = ex
                            .type_use(&param.ty)
                            .unwrap_or_else(|| ex.fresh(format!("param {}", param.name)));
                        ex.bind(&param.name, tv);
                    }
                    ex.returns.push(return_tv);
                    if let Some(body) = &method.body {
                        ex.block(body);
                    }
                    ex.returns.pop();
                });
                for name in added {
                    self.local_types.remove(&name);
                }
            }
            Member::Initializer(init) => {
                self.scoped(|ex| {
                    ex.returns.push(None);
                    ex.block(&init.body);
                    ex.returns.pop();
                });
            }
        }
    }

    fn block(&mut self, block: &Block) {
        self.scoped(|ex| {
            for stmt in &block.statements {
                ex.stmt(stmt);
            }
        });
    }

    fn local_var(&mut self, local: &LocalVar) {
        if matches!(local.ty.kind, TypeRefKind::Var) {
            // `var` takes the type of its initializer, so the variable
            // aliases the initializer's type variable.
            let tv = match &local.init {
                Some(init) => self.expr(init),
                None => self.fresh(format!("var {}", local.name)),
            };
            self.bind(&local.name, tv);
            return;
        }
        let declared = self
            .type_use(&local.ty)
            .unwrap_or_else(|| self.fresh(format!("local {}", local.name)));
        if let Some(init) = &local.init {
            let value = self.expr(init);
            self.constraints.push(Constraint::AssignableTo {
                sub: value,
                sup: declared,
            });
        }
        self.bind(&local.name, declared);
    }

    fn assign(&mut self, target: &Expr, value: &Expr) {
        let target_tv = self.expr(target);
        let value_tv = self.expr(value);
        self.constraints.push(Constraint::AssignableTo {
            sub: value_tv,
            sup: target_tv,
        });
    }

    fn expr_or_assign(&mut self, step: &ExprOrAssign) {
        match step {
            ExprOrAssign::Expr(expr) => {
                self.expr(expr);
            }
            ExprOrAssign::Assign { target, value, .. } => self.assign(target, value),
        }
    }

    fn condition(&mut self, cond: &Expr) {
        let tv = self.expr(cond);
        let boolean = self.primitive_tv(Primitive::Boolean);
        self.constraints.push(Constraint::AssignableTo {
            sub: tv,
            sup: boolean,
        });
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match &stmt.kind {
            StmtKind::Expr(expr) => {
                self.expr(expr);
            }
            StmtKind::Assign { target, value, .. } => self.assign(target, value),
            StmtKind::LocalVar(local) => self.local_var(local),
            StmtKind::Return(value) => {
                if let Some(value) = value {
                    let tv = self.expr(value);
                    if let Some(Some(ret)) = self.returns.last().copied() {
                        self.constraints.push(Constraint::AssignableTo {
                            sub: tv,
                            sup: ret,
                        });
                    }
                }
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.condition(cond);
                self.scoped(|ex| ex.stmt(then_branch));
                if let Some(els) = else_branch {
                    self.scoped(|ex| ex.stmt(els));
                }
            }
            StmtKind::While { cond, body } => {
                self.condition(cond);
                self.scoped(|ex| ex.stmt(body));
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.scoped(|ex| {
                    match init {
                        Some(ForInit::Decl(local)) => ex.local_var(local),
                        Some(ForInit::Step(step)) => ex.expr_or_assign(step),
                        None => {}
                    }
                    if let Some(cond) = cond {
                        ex.condition(cond);
                    }
                    if let Some(update) = update {
                        ex.expr_or_assign(update);
                    }
                    ex.stmt(body);
                });
            }
            StmtKind::ForEach {
                ty,
                name,
                iterable,
                body,
                ..
            } => {
                self.expr(iterable);
                self.scoped(|ex| {
                    let tv = ex
                        .type_use(ty)
                        .unwrap_or_else(|| ex.fresh(format!("each {name}")));
                    ex.bind(name, tv);
                    ex.stmt(body);
                });
            }
            StmtKind::Block(block) => self.block(block),
            StmtKind::Try {
                body,
                catches,
                finally_block,
            } => {
                self.block(body);
                for CatchClause { ty, name, body } in catches {
                    self.scoped(|ex| {
                        let tv = ex
                            .type_use(ty)
                            .unwrap_or_else(|| ex.fresh(format!("catch {name}")));
                        ex.bind(name, tv);
                        ex.block(body);
                    });
                }
                if let Some(finally_block) = finally_block {
                    self.block(finally_block);
                }
            }
            StmtKind::Throw(expr) => {
                self.expr(expr);
            }
            StmtKind::Break | StmtKind::Continue | StmtKind::Empty => {}
        }
    }

    fn literal(&mut self, lit: &Literal) -> usize {
        let class = match lit {
            Literal::Null => return self.fresh("null"),
            Literal::Bool(_) => LitClass::Prim(Primitive::Boolean),
            Literal::Int(text) => {
                if text.ends_with(['l', 'L']) {
                    LitClass::Prim(Primitive::Long)
                } else {
                    LitClass::Prim(Primitive::Int)
                }
            }
            Literal::Float(text) => {
                if text.ends_with(['f', 'F']) {
                    LitClass::Prim(Primitive::Float)
                } else {
                    LitClass::Prim(Primitive::Double)
                }
            }
            Literal::Str(_) => LitClass::Str,
            Literal::Char(_) => LitClass::Prim(Primitive::Char),
        };
        if let LitClass::Prim(prim) = class {
            return self.primitive_tv(prim);
        }
        let tv = self.fresh("literal String");
        self.constraints.push(Constraint::IsLiteral {
            tv,
            lit: LitClass::Str,
        });
        tv
    }

    fn expr(&mut self, expr: &Expr) -> usize {
        match &expr.kind {
            ExprKind::Name(name) => match self.lookup(name) {
                Some(tv) => tv,
                None => self.fresh(format!("name {name}")),
            },
            ExprKind::Literal(lit) => self.literal(lit),
            ExprKind::This => self.fresh("this"),
            ExprKind::Super => self.fresh("super"),
            ExprKind::Unary { op, expr: inner } => {
                let tv = self.expr(inner);
                match op {
                    UnaryOp::Not => self.primitive_tv(Primitive::Boolean),
                    UnaryOp::Neg | UnaryOp::PreInc | UnaryOp::PreDec => tv,
                }
            }
            ExprKind::Postfix { expr: inner, .. } => self.expr(inner),
            ExprKind::Binary { op, lhs, rhs } => {
                self.expr(lhs);
                self.expr(rhs);
                if op.is_comparison() {
                    self.primitive_tv(Primitive::Boolean)
                } else {
                    self.fresh(format!("binary {}", op.symbol()))
                }
            }
            ExprKind::Cast { ty, expr: inner } => {
                self.expr(inner);
                self.type_use(ty)
                    .unwrap_or_else(|| self.fresh("cast"))
            }
            ExprKind::InstanceOf { expr: inner, ty } => {
                self.expr(inner);
                self.type_use(ty);
                self.primitive_tv(Primitive::Boolean)
            }
            ExprKind::FieldAccess { recv, name } => {
                if name == "class" {
                    self.receiver(recv);
                    return self.fresh("class literal");
                }
                let recv_tv = self.receiver(recv);
                let result = self.fresh(format!("field {name}"));
                self.constraints.push(Constraint::HasField {
                    recv: recv_tv,
                    name: name.clone(),
                    result,
                });
                result
            }
            ExprKind::MethodCall { recv, name, args } => {
                let arg_tvs: Vec<usize> = args.iter().map(|a| self.expr(a)).collect();
                let Some(recv) = recv else {
                    // Receiverless: the callee lives on the enclosing
                    // class, which the KB does not know.
                    return self.fresh(format!("call {name}"));
                };
                let result = self.fresh(format!("call {name}"));
                if let Some(type_name) = self.static_receiver(recv) {
                    let recv_tv = self.named_tv(&type_name);
                    self.constraints.push(Constraint::HasStaticMethod {
                        recv: recv_tv,
                        name: name.clone(),
                        args: arg_tvs,
                        result,
                    });
                } else {
                    let recv_tv = self.expr(recv);
                    self.constraints.push(Constraint::HasMethod {
                        recv: recv_tv,
                        name: name.clone(),
                        args: arg_tvs,
                        result,
                    });
                }
                result
            }
            ExprKind::New { ty, args } => {
                let arg_tvs: Vec<usize> = args.iter().map(|a| self.expr(a)).collect();
                let tv = self
                    .type_use(ty)
                    .unwrap_or_else(|| self.fresh("new"));
                self.constraints.push(Constraint::HasConstructor { tv, args: arg_tvs });
                tv
            }
            ExprKind::NewArray { elem, dims, init } => {
                self.type_use(elem);
                for dim in dims.iter().flatten() {
                    self.expr(dim);
                }
                for item in init.iter().flatten() {
                    self.expr(item);
                }
                self.fresh("new array")
            }
            ExprKind::ArrayLit(items) => {
                for item in items {
                    self.expr(item);
                }
                self.fresh("array literal")
            }
            ExprKind::Index { array, index } => {
                self.expr(array);
                self.expr(index);
                self.fresh("index")
            }
            ExprKind::Lambda { params, body } => {
                self.scoped(|ex| {
                    for param in params {
                        let tv = match &param.ty {
                            Some(ty) => ex
                                .type_use(ty)
                                .unwrap_or_else(|| ex.fresh(format!("param {}", param.name))),
                            None => ex.fresh(format!("param {}", param.name)),
                        };
                        ex.bind(&param.name, tv);
                    }
                    ex.returns.push(None);
                    match body {
                        LambdaBody::Expr(expr) => {
                            ex.expr(expr);
                        }
                        LambdaBody::Block(block) => ex.block(block),
                    }
                    ex.returns.pop();
                });
                self.fresh("lambda")
            }
            ExprKind::Paren(inner) => self.expr(inner),
        }
    }

    /// A call or field receiver that names a type rather than a value:
    /// a simple or qualified name with no matching variable in scope.
    fn static_receiver(&self, recv: &Expr) -> Option<String> {
        match &recv.kind {
            ExprKind::Name(name) if self.lookup(name).is_none() => Some(name.clone()),
            _ => None,
        }
    }

    fn receiver(&mut self, recv: &Expr) -> usize {
        if let Some(type_name) = self.static_receiver(recv) {
            self.named_tv(&type_name)
        } else {
            self.expr(recv)
        }
    }
}
