//! Identifier renaming that preserves snippet semantics.
//!
//! Declared variables (fields, locals, parameters), methods, classes, type
//! parameters, and package segments each receive a fresh three-word name.
//! Four namespaces are renamed independently, so a method `n` and a variable
//! `n` end up with different names. Anything that might resolve outside the
//! snippet is left alone: imported and otherwise external type names, every
//! method invoked through a receiver expression, and methods annotated
//! `@Override`.

use std::collections::{BTreeMap, BTreeSet};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seed::rng_for;
use crate::syntax::*;
use crate::words::FreshNames;

/// Applied renames, one pair per declaration, plus the method names that
/// were deliberately left alone.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RenameMap {
    pub variables: Vec<(String, String)>,
    pub methods: Vec<(String, String)>,
    pub classes: Vec<(String, String)>,
    pub packages: Vec<(String, String)>,
    pub skip_list: BTreeSet<String>,
}

impl RenameMap {
    /// Fresh-name → original-name tables, one per namespace. Fresh names
    /// are globally unique, so the inversion is total.
    pub fn inverse(&self) -> RenameTables {
        let flip = |pairs: &[(String, String)]| {
            pairs
                .iter()
                .map(|(from, to)| (to.clone(), from.clone()))
                .collect()
        };
        RenameTables {
            variables: flip(&self.variables),
            methods: flip(&self.methods),
            classes: flip(&self.classes),
            packages: flip(&self.packages),
        }
    }
}

/// Plain per-namespace substitution tables.
#[derive(Debug, Clone, Default)]
pub struct RenameTables {
    pub variables: BTreeMap<String, String>,
    pub methods: BTreeMap<String, String>,
    pub classes: BTreeMap<String, String>,
    pub packages: BTreeMap<String, String>,
}

/// Renames every snippet-declared identifier to a fresh three-word name.
pub fn rename_identifiers(unit: &CompilationUnit, seed: u64) -> (CompilationUnit, RenameMap) {
    let mut renamer = Renamer::new(unit, seed);
    let mut renamed = unit.clone();
    renamer.unit(&mut renamed);
    (renamed, renamer.map)
}

/// Applies substitution tables without scope analysis. Meant for undoing a
/// rename: fresh names never collide, so plain substitution is exact.
pub fn apply_tables(unit: &CompilationUnit, tables: &RenameTables) -> CompilationUnit {
    let mut out = unit.clone();
    let mut sub = Substituter { tables };
    sub.unit(&mut out);
    out
}

pub(crate) fn collect_identifiers(unit: &CompilationUnit) -> BTreeSet<String> {
    // Over-approximates: every identifier-shaped string anywhere in the
    // tree, so fresh names can never collide with anything kept.
    let mut found = BTreeSet::new();
    let grab_qual = |name: &QualName, found: &mut BTreeSet<String>| {
        for seg in &name.segments {
            found.insert(seg.clone());
        }
    };
    fn grab_type(ty: &TypeRef, found: &mut BTreeSet<String>) {
        match &ty.kind {
            TypeRefKind::Named { name, type_args } => {
                for seg in &name.segments {
                    found.insert(seg.clone());
                }
                for arg in type_args.iter().flatten() {
                    match arg {
                        TypeArg::Type(t) => grab_type(t, found),
                        TypeArg::Wildcard(Some(b)) => grab_type(b, found),
                        TypeArg::Wildcard(None) => {}
                    }
                }
            }
            TypeRefKind::Array(elem) => grab_type(elem, found),
            _ => {}
        }
    }
    fn grab_expr(expr: &Expr, found: &mut BTreeSet<String>) {
        match &expr.kind {
            ExprKind::Name(n) => {
                found.insert(n.clone());
            }
            ExprKind::Unary { expr, .. } | ExprKind::Postfix { expr, .. } => {
                grab_expr(expr, found)
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                grab_expr(lhs, found);
                grab_expr(rhs, found);
            }
            ExprKind::Cast { ty, expr } => {
                grab_type(ty, found);
                grab_expr(expr, found);
            }
            ExprKind::InstanceOf { expr, ty } => {
                grab_expr(expr, found);
                grab_type(ty, found);
            }
            ExprKind::FieldAccess { recv, name } => {
                grab_expr(recv, found);
                found.insert(name.clone());
            }
            ExprKind::MethodCall { recv, name, args } => {
                if let Some(r) = recv {
                    grab_expr(r, found);
                }
                found.insert(name.clone());
                for a in args {
                    grab_expr(a, found);
                }
            }
            ExprKind::New { ty, args } => {
                grab_type(ty, found);
                for a in args {
                    grab_expr(a, found);
                }
            }
            ExprKind::NewArray { elem, dims, init } => {
                grab_type(elem, found);
                for d in dims.iter().flatten() {
                    grab_expr(d, found);
                }
                for e in init.iter().flatten() {
                    grab_expr(e, found);
                }
            }
            ExprKind::ArrayLit(elems) => {
                for e in elems {
                    grab_expr(e, found);
                }
            }
            ExprKind::Index { array, index } => {
                grab_expr(array, found);
                grab_expr(index, found);
            }
            ExprKind::Lambda { params, body } => {
                for p in params {
                    if let Some(ty) = &p.ty {
                        grab_type(ty, found);
                    }
                    found.insert(p.name.clone());
                }
                match body {
                    LambdaBody::Expr(e) => grab_expr(e, found),
                    LambdaBody::Block(b) => grab_block(b, found),
                }
            }
            ExprKind::Paren(inner) => grab_expr(inner, found),
            ExprKind::Literal(_) | ExprKind::This | ExprKind::Super => {}
        }
    }
    fn grab_stmt(stmt: &Stmt, found: &mut BTreeSet<String>) {
        match &stmt.kind {
            StmtKind::Expr(e) | StmtKind::Throw(e) => grab_expr(e, found),
            StmtKind::Assign { target, value, .. } => {
                grab_expr(target, found);
                grab_expr(value, found);
            }
            StmtKind::LocalVar(local) => {
                grab_type(&local.ty, found);
                found.insert(local.name.clone());
                if let Some(init) = &local.init {
                    grab_expr(init, found);
                }
            }
            StmtKind::Return(value) => {
                if let Some(v) = value {
                    grab_expr(v, found);
                }
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                grab_expr(cond, found);
                grab_stmt(then_branch, found);
                if let Some(e) = else_branch {
                    grab_stmt(e, found);
                }
            }
            StmtKind::While { cond, body } => {
                grab_expr(cond, found);
                grab_stmt(body, found);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                match init {
                    Some(ForInit::Decl(local)) => {
                        grab_type(&local.ty, found);
                        found.insert(local.name.clone());
                        if let Some(i) = &local.init {
                            grab_expr(i, found);
                        }
                    }
                    Some(ForInit::Step(step)) => grab_step(step, found),
                    None => {}
                }
                if let Some(c) = cond {
                    grab_expr(c, found);
                }
                if let Some(u) = update {
                    grab_step(u, found);
                }
                grab_stmt(body, found);
            }
            StmtKind::ForEach {
                ty,
                name,
                iterable,
                body,
                ..
            } => {
                grab_type(ty, found);
                found.insert(name.clone());
                grab_expr(iterable, found);
                grab_stmt(body, found);
            }
            StmtKind::Block(block) => grab_block(block, found),
            StmtKind::Try {
                body,
                catches,
                finally_block,
            } => {
                grab_block(body, found);
                for c in catches {
                    grab_type(&c.ty, found);
                    found.insert(c.name.clone());
                    grab_block(&c.body, found);
                }
                if let Some(f) = finally_block {
                    grab_block(f, found);
                }
            }
            StmtKind::Break | StmtKind::Continue | StmtKind::Empty => {}
        }
    }
    fn grab_step(step: &ExprOrAssign, found: &mut BTreeSet<String>) {
        match step {
            ExprOrAssign::Expr(e) => grab_expr(e, found),
            ExprOrAssign::Assign { target, value, .. } => {
                grab_expr(target, found);
                grab_expr(value, found);
            }
        }
    }
    fn grab_block(block: &Block, found: &mut BTreeSet<String>) {
        for stmt in &block.statements {
            grab_stmt(stmt, found);
        }
    }

    if let Some(pkg) = &unit.package {
        grab_qual(&pkg.name, &mut found);
    }
    for import in &unit.imports {
        grab_qual(&import.name, &mut found);
    }
    for decl in &unit.types {
        found.insert(decl.name.clone());
        for m in &decl.modifiers {
            if let Modifier::Annotation(name) = m {
                grab_qual(name, &mut found);
            }
        }
        for tp in &decl.type_params {
            found.insert(tp.name.clone());
            if let Some(b) = &tp.bound {
                grab_type(b, &mut found);
            }
        }
        for ty in decl.extends.iter().chain(&decl.implements) {
            grab_type(ty, &mut found);
        }
        for member in &decl.members {
            let member_mods: &[Modifier] = match member {
                Member::Field(f) => &f.modifiers,
                Member::Method(m) => &m.modifiers,
                Member::Initializer(_) => &[],
            };
            for m in member_mods {
                if let Modifier::Annotation(name) = m {
                    grab_qual(name, &mut found);
                }
            }
            match member {
                Member::Field(f) => {
                    grab_type(&f.ty, &mut found);
                    found.insert(f.name.clone());
                    if let Some(init) = &f.init {
                        grab_expr(init, &mut found);
                    }
                }
                Member::Method(m) => {
                    found.insert(m.name.clone());
                    for tp in &m.type_params {
                        found.insert(tp.name.clone());
                        if let Some(b) = &tp.bound {
                            grab_type(b, &mut found);
                        }
                    }
                    if let Some(ret) = &m.return_type {
                        grab_type(ret, &mut found);
                    }
                    for p in &m.params {
                        grab_type(&p.ty, &mut found);
                        found.insert(p.name.clone());
                    }
                    for t in &m.throws {
                        grab_type(t, &mut found);
                    }
                    if let Some(body) = &m.body {
                        grab_block(body, &mut found);
                    }
                }
                Member::Initializer(init) => grab_block(&init.body, &mut found),
            }
        }
    }
    found
}

/// Method names that must keep their spelling: anything called through a
/// receiver (potentially an external API) and anything overriding a parent.
fn collect_skip_list(unit: &CompilationUnit) -> BTreeSet<String> {
    let mut skip = BTreeSet::new();
    fn scan_expr(expr: &Expr, skip: &mut BTreeSet<String>) {
        match &expr.kind {
            ExprKind::MethodCall { recv, name, args } => {
                if let Some(r) = recv {
                    skip.insert(name.clone());
                    scan_expr(r, skip);
                }
                for a in args {
                    scan_expr(a, skip);
                }
            }
            ExprKind::Unary { expr, .. } | ExprKind::Postfix { expr, .. } => scan_expr(expr, skip),
            ExprKind::Binary { lhs, rhs, .. } => {
                scan_expr(lhs, skip);
                scan_expr(rhs, skip);
            }
            ExprKind::Cast { expr, .. } => scan_expr(expr, skip),
            ExprKind::InstanceOf { expr, .. } => scan_expr(expr, skip),
            ExprKind::FieldAccess { recv, .. } => scan_expr(recv, skip),
            ExprKind::New { args, .. } => {
                for a in args {
                    scan_expr(a, skip);
                }
            }
            ExprKind::NewArray { dims, init, .. } => {
                for d in dims.iter().flatten() {
                    scan_expr(d, skip);
                }
                for e in init.iter().flatten() {
                    scan_expr(e, skip);
                }
            }
            ExprKind::ArrayLit(elems) => {
                for e in elems {
                    scan_expr(e, skip);
                }
            }
            ExprKind::Index { array, index } => {
                scan_expr(array, skip);
                scan_expr(index, skip);
            }
            ExprKind::Lambda { body, .. } => match body {
                LambdaBody::Expr(e) => scan_expr(e, skip),
                LambdaBody::Block(b) => scan_block(b, skip),
            },
            ExprKind::Paren(inner) => scan_expr(inner, skip),
            _ => {}
        }
    }
    fn scan_stmt(stmt: &Stmt, skip: &mut BTreeSet<String>) {
        match &stmt.kind {
            StmtKind::Expr(e) | StmtKind::Throw(e) => scan_expr(e, skip),
            StmtKind::Assign { target, value, .. } => {
                scan_expr(target, skip);
                scan_expr(value, skip);
            }
            StmtKind::LocalVar(local) => {
                if let Some(init) = &local.init {
                    scan_expr(init, skip);
                }
            }
            StmtKind::Return(Some(v)) => scan_expr(v, skip),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                scan_expr(cond, skip);
                scan_stmt(then_branch, skip);
                if let Some(e) = else_branch {
                    scan_stmt(e, skip);
                }
            }
            StmtKind::While { cond, body } => {
                scan_expr(cond, skip);
                scan_stmt(body, skip);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                match init {
                    Some(ForInit::Decl(local)) => {
                        if let Some(i) = &local.init {
                            scan_expr(i, skip);
                        }
                    }
                    Some(ForInit::Step(ExprOrAssign::Expr(e))) => scan_expr(e, skip),
                    Some(ForInit::Step(ExprOrAssign::Assign { target, value, .. })) => {
                        scan_expr(target, skip);
                        scan_expr(value, skip);
                    }
                    None => {}
                }
                if let Some(c) = cond {
                    scan_expr(c, skip);
                }
                match update {
                    Some(ExprOrAssign::Expr(e)) => scan_expr(e, skip),
                    Some(ExprOrAssign::Assign { target, value, .. }) => {
                        scan_expr(target, skip);
                        scan_expr(value, skip);
                    }
                    None => {}
                }
                scan_stmt(body, skip);
            }
            StmtKind::ForEach { iterable, body, .. } => {
                scan_expr(iterable, skip);
                scan_stmt(body, skip);
            }
            StmtKind::Block(block) => scan_block(block, skip),
            StmtKind::Try {
                body,
                catches,
                finally_block,
            } => {
                scan_block(body, skip);
                for c in catches {
                    scan_block(&c.body, skip);
                }
                if let Some(f) = finally_block {
                    scan_block(f, skip);
                }
            }
            _ => {}
        }
    }
    fn scan_block(block: &Block, skip: &mut BTreeSet<String>) {
        for stmt in &block.statements {
            scan_stmt(stmt, skip);
        }
    }
    for decl in &unit.types {
        for member in &decl.members {
            match member {
                Member::Field(f) => {
                    if let Some(init) = &f.init {
                        scan_expr(init, &mut skip);
                    }
                }
                Member::Method(m) => {
                    if m.has_override() {
                        skip.insert(m.name.clone());
                    }
                    if let Some(body) = &m.body {
                        scan_block(body, &mut skip);
                    }
                }
                Member::Initializer(init) => scan_block(&init.body, &mut skip),
            }
        }
    }
    skip
}

struct Renamer {
    fresh: FreshNames,
    rng: ChaCha8Rng,
    map: RenameMap,
    /// Declared type name → fresh name.
    classes: BTreeMap<String, String>,
    /// (declared type, method name) → fresh name; overloads share one entry.
    methods: BTreeMap<(String, String), String>,
    /// (declared type, field name) → fresh name.
    fields: BTreeMap<(String, String), String>,
    /// Declared type → direct superclass name, when that class is also
    /// declared in the snippet.
    supers: BTreeMap<String, String>,
    /// Innermost-last scopes for locals and parameters.
    locals: Vec<BTreeMap<String, String>>,
    /// Scoped type-parameter renames, shadowing `classes`.
    type_params: Vec<BTreeMap<String, String>>,
    /// Original name of the enclosing type while walking members.
    current_class: String,
}

impl Renamer {
    fn new(unit: &CompilationUnit, seed: u64) -> Renamer {
        let reserved = collect_identifiers(unit);
        let mut renamer = Renamer {
            fresh: FreshNames::new(reserved),
            rng: rng_for(seed, "rename", ""),
            map: RenameMap {
                skip_list: collect_skip_list(unit),
                ..RenameMap::default()
            },
            classes: BTreeMap::new(),
            methods: BTreeMap::new(),
            fields: BTreeMap::new(),
            supers: BTreeMap::new(),
            locals: Vec::new(),
            type_params: Vec::new(),
            current_class: String::new(),
        };
        renamer.plan(unit);
        renamer
    }

    /// Assigns fresh names to every renameable declaration up front, so
    /// uses anywhere in the snippet can be rewritten in one walk.
    fn plan(&mut self, unit: &CompilationUnit) {
        for decl in &unit.types {
            let fresh = self.fresh.three_word(&mut self.rng);
            self.map.classes.push((decl.name.clone(), fresh.clone()));
            self.classes.insert(decl.name.clone(), fresh);
            if let Some(first) = decl.extends.first() {
                if let Some(simple) = first.base_simple_name() {
                    self.supers.insert(decl.name.clone(), simple.to_string());
                }
            }
        }
        for decl in &unit.types {
            for member in &decl.members {
                match member {
                    Member::Field(f) => {
                        let fresh = self.fresh.three_word(&mut self.rng);
                        self.map.variables.push((f.name.clone(), fresh.clone()));
                        self.fields
                            .insert((decl.name.clone(), f.name.clone()), fresh);
                    }
                    Member::Method(m) => {
                        if m.is_constructor() || self.map.skip_list.contains(&m.name) {
                            continue;
                        }
                        let key = (decl.name.clone(), m.name.clone());
                        if self.methods.contains_key(&key) {
                            continue;
                        }
                        let fresh = self.fresh.three_word(&mut self.rng);
                        self.map.methods.push((m.name.clone(), fresh.clone()));
                        self.methods.insert(key, fresh);
                    }
                    Member::Initializer(_) => {}
                }
            }
        }
    }

    fn fresh_variable(&mut self, original: &str) -> String {
        let fresh = self.fresh.three_word(&mut self.rng);
        self.map
            .variables
            .push((original.to_string(), fresh.clone()));
        fresh
    }

    /// Walks `name`'s class chain within the snippet.
    fn chain_of(&self, start: &str) -> Vec<String> {
        let mut chain = vec![start.to_string()];
        let mut cur = start;
        while let Some(next) = self.supers.get(cur) {
            if chain.contains(next) || !self.classes.contains_key(next) {
                break;
            }
            chain.push(next.clone());
            cur = chain.last().unwrap();
        }
        chain
    }

    fn lookup_method(&self, class: &str, name: &str) -> Option<&String> {
        self.chain_of(class)
            .iter()
            .find_map(|c| self.methods.get(&(c.clone(), name.to_string())))
    }

    fn lookup_field(&self, class: &str, name: &str) -> Option<&String> {
        self.chain_of(class)
            .iter()
            .find_map(|c| self.fields.get(&(c.clone(), name.to_string())))
    }

    fn lookup_local(&self, name: &str) -> Option<&String> {
        self.locals.iter().rev().find_map(|scope| scope.get(name))
    }

    fn lookup_type(&self, name: &str) -> Option<&String> {
        self.type_params
            .iter()
            .rev()
            .find_map(|scope| scope.get(name))
            .or_else(|| self.classes.get(name))
    }

    fn bind_local(&mut self, original: &str) -> String {
        let fresh = self.fresh_variable(original);
        self.locals
            .last_mut()
            .expect("local scope")
            .insert(original.to_string(), fresh.clone());
        fresh
    }

    // ----- rewriting ------------------------------------------------------

    fn unit(&mut self, unit: &mut CompilationUnit) {
        if let Some(pkg) = &mut unit.package {
            for seg in &mut pkg.name.segments {
                let fresh = self.fresh.three_word(&mut self.rng);
                self.map.packages.push((seg.clone(), fresh.clone()));
                *seg = fresh;
            }
        }
        for decl in &mut unit.types {
            self.type_decl(decl);
        }
    }

    fn type_params_scope(&mut self, params: &mut [TypeParam]) {
        let mut scope = BTreeMap::new();
        for tp in params.iter_mut() {
            let fresh = self.fresh.three_word(&mut self.rng);
            self.map.classes.push((tp.name.clone(), fresh.clone()));
            scope.insert(tp.name.clone(), fresh.clone());
            tp.name = fresh;
        }
        self.type_params.push(scope);
        // Bounds may refer to sibling parameters, so rewrite after binding.
        for tp in params.iter_mut() {
            if let Some(bound) = &mut tp.bound {
                self.type_ref(bound);
            }
        }
    }

    fn type_decl(&mut self, decl: &mut TypeDecl) {
        self.current_class = decl.name.clone();
        self.type_params_scope(&mut decl.type_params);
        for ty in decl.extends.iter_mut().chain(&mut decl.implements) {
            self.type_ref(ty);
        }
        let original_class = self.current_class.clone();
        if let Some(fresh) = self.classes.get(&decl.name) {
            decl.name = fresh.clone();
        }
        for member in &mut decl.members {
            self.current_class = original_class.clone();
            match member {
                Member::Field(f) => {
                    self.type_ref(&mut f.ty);
                    if let Some(init) = &mut f.init {
                        self.expr(init);
                    }
                    if let Some(fresh) = self.lookup_field(&original_class, &f.name) {
                        f.name = fresh.clone();
                    }
                }
                Member::Method(m) => self.method(m, &original_class),
                Member::Initializer(init) => {
                    self.locals.push(BTreeMap::new());
                    self.block(&mut init.body);
                    self.locals.pop();
                }
            }
        }
        self.type_params.pop();
    }

    fn method(&mut self, m: &mut Method, class: &str) {
        self.type_params_scope(&mut m.type_params);
        if let Some(ret) = &mut m.return_type {
            self.type_ref(ret);
        }
        if m.is_constructor() {
            if let Some(fresh) = self.classes.get(&m.name) {
                m.name = fresh.clone();
            }
        } else if let Some(fresh) = self.lookup_method(class, &m.name) {
            m.name = fresh.clone();
        }
        self.locals.push(BTreeMap::new());
        for p in &mut m.params {
            self.type_ref(&mut p.ty);
            p.name = self.bind_local(&p.name);
        }
        for t in &mut m.throws {
            self.type_ref(t);
        }
        if let Some(body) = &mut m.body {
            self.block(body);
        }
        self.locals.pop();
        self.type_params.pop();
    }

    fn type_ref(&mut self, ty: &mut TypeRef) {
        match &mut ty.kind {
            TypeRefKind::Named { name, type_args } => {
                if name.is_simple() {
                    if let Some(fresh) = self.lookup_type(&name.segments[0]) {
                        name.segments[0] = fresh.clone();
                    }
                }
                for arg in type_args.iter_mut().flatten() {
                    match arg {
                        TypeArg::Type(t) => self.type_ref(t),
                        TypeArg::Wildcard(Some(b)) => self.type_ref(b),
                        TypeArg::Wildcard(None) => {}
                    }
                }
            }
            TypeRefKind::Array(elem) => self.type_ref(elem),
            _ => {}
        }
    }

    fn block(&mut self, block: &mut Block) {
        self.locals.push(BTreeMap::new());
        for stmt in &mut block.statements {
            self.stmt(stmt);
        }
        self.locals.pop();
    }

    fn stmt(&mut self, stmt: &mut Stmt) {
        match &mut stmt.kind {
            StmtKind::Expr(e) | StmtKind::Throw(e) => self.expr(e),
            StmtKind::Assign { target, value, .. } => {
                self.expr(target);
                self.expr(value);
            }
            StmtKind::LocalVar(local) => {
                self.type_ref(&mut local.ty);
                if let Some(init) = &mut local.init {
                    self.expr(init);
                }
                local.name = self.bind_local(&local.name);
            }
            StmtKind::Return(value) => {
                if let Some(v) = value {
                    self.expr(v);
                }
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expr(cond);
                self.stmt(then_branch);
                if let Some(e) = else_branch {
                    self.stmt(e);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.stmt(body);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.locals.push(BTreeMap::new());
                match init {
                    Some(ForInit::Decl(local)) => {
                        self.type_ref(&mut local.ty);
                        if let Some(i) = &mut local.init {
                            self.expr(i);
                        }
                        local.name = self.bind_local(&local.name);
                    }
                    Some(ForInit::Step(step)) => self.step(step),
                    None => {}
                }
                if let Some(c) = cond {
                    self.expr(c);
                }
                if let Some(u) = update {
                    self.step(u);
                }
                self.stmt(body);
                self.locals.pop();
            }
            StmtKind::ForEach {
                ty,
                name,
                iterable,
                body,
                ..
            } => {
                self.expr(iterable);
                self.type_ref(ty);
                self.locals.push(BTreeMap::new());
                *name = self.bind_local(name);
                self.stmt(body);
                self.locals.pop();
            }
            StmtKind::Block(block) => self.block(block),
            StmtKind::Try {
                body,
                catches,
                finally_block,
            } => {
                self.block(body);
                for c in catches {
                    self.type_ref(&mut c.ty);
                    self.locals.push(BTreeMap::new());
                    c.name = self.bind_local(&c.name);
                    self.block(&mut c.body);
                    self.locals.pop();
                }
                if let Some(f) = finally_block {
                    self.block(f);
                }
            }
            StmtKind::Break | StmtKind::Continue | StmtKind::Empty => {}
        }
    }

    fn step(&mut self, step: &mut ExprOrAssign) {
        match step {
            ExprOrAssign::Expr(e) => self.expr(e),
            ExprOrAssign::Assign { target, value, .. } => {
                self.expr(target);
                self.expr(value);
            }
        }
    }

    fn expr(&mut self, expr: &mut Expr) {
        match &mut expr.kind {
            ExprKind::Name(name) => {
                if let Some(fresh) = self.lookup_local(name) {
                    *name = fresh.clone();
                } else if let Some(fresh) = self.lookup_field(&self.current_class.clone(), name) {
                    *name = fresh.clone();
                } else if let Some(fresh) = self.lookup_type(name) {
                    *name = fresh.clone();
                }
            }
            ExprKind::Unary { expr, .. } | ExprKind::Postfix { expr, .. } => self.expr(expr),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs);
                self.expr(rhs);
            }
            ExprKind::Cast { ty, expr } => {
                self.type_ref(ty);
                self.expr(expr);
            }
            ExprKind::InstanceOf { expr, ty } => {
                self.expr(expr);
                self.type_ref(ty);
            }
            ExprKind::FieldAccess { recv, name } => {
                let owner = self.field_owner(recv);
                if let Some(owner) = owner {
                    if let Some(fresh) = self.lookup_field(&owner, name) {
                        *name = fresh.clone();
                    }
                }
                self.expr(recv);
            }
            ExprKind::MethodCall { recv, name, args } => {
                match recv {
                    Some(r) => self.expr(r),
                    None => {
                        if let Some(fresh) =
                            self.lookup_method(&self.current_class.clone(), name)
                        {
                            *name = fresh.clone();
                        }
                    }
                }
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::New { ty, args } => {
                self.type_ref(ty);
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::NewArray { elem, dims, init } => {
                self.type_ref(elem);
                for d in dims.iter_mut().flatten() {
                    self.expr(d);
                }
                for e in init.iter_mut().flatten() {
                    self.expr(e);
                }
            }
            ExprKind::ArrayLit(elems) => {
                for e in elems {
                    self.expr(e);
                }
            }
            ExprKind::Index { array, index } => {
                self.expr(array);
                self.expr(index);
            }
            ExprKind::Lambda { params, body } => {
                self.locals.push(BTreeMap::new());
                for p in params.iter_mut() {
                    if let Some(ty) = &mut p.ty {
                        self.type_ref(ty);
                    }
                    p.name = self.bind_local(&p.name);
                }
                match body {
                    LambdaBody::Expr(e) => self.expr(e),
                    LambdaBody::Block(b) => self.block(b),
                }
                self.locals.pop();
            }
            ExprKind::Paren(inner) => self.expr(inner),
            ExprKind::Literal(_) | ExprKind::This | ExprKind::Super => {}
        }
    }

    /// The declared class whose fields a field access resolves against:
    /// `this.f` uses the enclosing class, `DeclaredType.f` a static read.
    fn field_owner(&self, recv: &Expr) -> Option<String> {
        match &recv.kind {
            ExprKind::This => Some(self.current_class.clone()),
            ExprKind::Name(n)
                if self.lookup_local(n).is_none()
                    && self.lookup_field(&self.current_class, n).is_none()
                    && self.classes.contains_key(n) =>
            {
                Some(n.clone())
            }
            _ => None,
        }
    }
}

struct Substituter<'a> {
    tables: &'a RenameTables,
}

impl Substituter<'_> {
    fn unit(&mut self, unit: &mut CompilationUnit) {
        if let Some(pkg) = &mut unit.package {
            for seg in &mut pkg.name.segments {
                if let Some(to) = self.tables.packages.get(seg) {
                    *seg = to.clone();
                }
            }
        }
        for decl in &mut unit.types {
            self.type_decl(decl);
        }
    }

    fn class(&self, name: &mut String) {
        if let Some(to) = self.tables.classes.get(name) {
            *name = to.clone();
        }
    }

    fn variable(&self, name: &mut String) {
        if let Some(to) = self.tables.variables.get(name) {
            *name = to.clone();
        }
    }

    fn type_decl(&mut self, decl: &mut TypeDecl) {
        self.class(&mut decl.name);
        for tp in &mut decl.type_params {
            self.class(&mut tp.name);
            if let Some(b) = &mut tp.bound {
                self.type_ref(b);
            }
        }
        for ty in decl.extends.iter_mut().chain(&mut decl.implements) {
            self.type_ref(ty);
        }
        for member in &mut decl.members {
            match member {
                Member::Field(f) => {
                    self.type_ref(&mut f.ty);
                    self.variable(&mut f.name);
                    if let Some(init) = &mut f.init {
                        self.expr(init);
                    }
                }
                Member::Method(m) => {
                    for tp in &mut m.type_params {
                        self.class(&mut tp.name);
                        if let Some(b) = &mut tp.bound {
                            self.type_ref(b);
                        }
                    }
                    if let Some(ret) = &mut m.return_type {
                        self.type_ref(ret);
                    }
                    if m.is_constructor() {
                        self.class(&mut m.name);
                    } else if let Some(to) = self.tables.methods.get(&m.name) {
                        m.name = to.clone();
                    }
                    for p in &mut m.params {
                        self.type_ref(&mut p.ty);
                        self.variable(&mut p.name);
                    }
                    for t in &mut m.throws {
                        self.type_ref(t);
                    }
                    if let Some(body) = &mut m.body {
                        self.block(body);
                    }
                }
                Member::Initializer(init) => self.block(&mut init.body),
            }
        }
    }

    fn type_ref(&mut self, ty: &mut TypeRef) {
        match &mut ty.kind {
            TypeRefKind::Named { name, type_args } => {
                if name.is_simple() {
                    self.class(&mut name.segments[0]);
                }
                for arg in type_args.iter_mut().flatten() {
                    match arg {
                        TypeArg::Type(t) => self.type_ref(t),
                        TypeArg::Wildcard(Some(b)) => self.type_ref(b),
                        TypeArg::Wildcard(None) => {}
                    }
                }
            }
            TypeRefKind::Array(elem) => self.type_ref(elem),
            _ => {}
        }
    }

    fn block(&mut self, block: &mut Block) {
        for stmt in &mut block.statements {
            self.stmt(stmt);
        }
    }

    fn stmt(&mut self, stmt: &mut Stmt) {
        match &mut stmt.kind {
            StmtKind::Expr(e) | StmtKind::Throw(e) => self.expr(e),
            StmtKind::Assign { target, value, .. } => {
                self.expr(target);
                self.expr(value);
            }
            StmtKind::LocalVar(local) => {
                self.type_ref(&mut local.ty);
                self.variable(&mut local.name);
                if let Some(init) = &mut local.init {
                    self.expr(init);
                }
            }
            StmtKind::Return(value) => {
                if let Some(v) = value {
                    self.expr(v);
                }
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expr(cond);
                self.stmt(then_branch);
                if let Some(e) = else_branch {
                    self.stmt(e);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.stmt(body);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                match init {
                    Some(ForInit::Decl(local)) => {
                        self.type_ref(&mut local.ty);
                        self.variable(&mut local.name);
                        if let Some(i) = &mut local.init {
                            self.expr(i);
                        }
                    }
                    Some(ForInit::Step(step)) => self.step(step),
                    None => {}
                }
                if let Some(c) = cond {
                    self.expr(c);
                }
                if let Some(u) = update {
                    self.step(u);
                }
                self.stmt(body);
            }
            StmtKind::ForEach {
                ty,
                name,
                iterable,
                body,
                ..
            } => {
                self.type_ref(ty);
                self.variable(name);
                self.expr(iterable);
                self.stmt(body);
            }
            StmtKind::Block(block) => self.block(block),
            StmtKind::Try {
                body,
                catches,
                finally_block,
            } => {
                self.block(body);
                for c in catches {
                    self.type_ref(&mut c.ty);
                    self.variable(&mut c.name);
                    self.block(&mut c.body);
                }
                if let Some(f) = finally_block {
                    self.block(f);
                }
            }
            StmtKind::Break | StmtKind::Continue | StmtKind::Empty => {}
        }
    }

    fn step(&mut self, step: &mut ExprOrAssign) {
        match step {
            ExprOrAssign::Expr(e) => self.expr(e),
            ExprOrAssign::Assign { target, value, .. } => {
                self.expr(target);
                self.expr(value);
            }
        }
    }

    fn expr(&mut self, expr: &mut Expr) {
        match &mut expr.kind {
            ExprKind::Name(name) => {
                if let Some(to) = self.tables.variables.get(name) {
                    *name = to.clone();
                } else if let Some(to) = self.tables.classes.get(name) {
                    *name = to.clone();
                }
            }
            ExprKind::Unary { expr, .. } | ExprKind::Postfix { expr, .. } => self.expr(expr),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs);
                self.expr(rhs);
            }
            ExprKind::Cast { ty, expr } => {
                self.type_ref(ty);
                self.expr(expr);
            }
            ExprKind::InstanceOf { expr, ty } => {
                self.expr(expr);
                self.type_ref(ty);
            }
            ExprKind::FieldAccess { recv, name } => {
                self.variable(name);
                self.expr(recv);
            }
            ExprKind::MethodCall { recv, name, args } => {
                match recv {
                    Some(r) => self.expr(r),
                    None => {
                        if let Some(to) = self.tables.methods.get(name) {
                            *name = to.clone();
                        }
                    }
                }
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::New { ty, args } => {
                self.type_ref(ty);
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::NewArray { elem, dims, init } => {
                self.type_ref(elem);
                for d in dims.iter_mut().flatten() {
                    self.expr(d);
                }
                for e in init.iter_mut().flatten() {
                    self.expr(e);
                }
            }
            ExprKind::ArrayLit(elems) => {
                for e in elems {
                    self.expr(e);
                }
            }
            ExprKind::Index { array, index } => {
                self.expr(array);
                self.expr(index);
            }
            ExprKind::Lambda { params, body } => {
                for p in params.iter_mut() {
                    if let Some(ty) = &mut p.ty {
                        self.type_ref(ty);
                    }
                    self.variable(&mut p.name);
                }
                match body {
                    LambdaBody::Expr(e) => self.expr(e),
                    LambdaBody::Block(b) => self.block(b),
                }
            }
            ExprKind::Paren(inner) => self.expr(inner),
            ExprKind::Literal(_) | ExprKind::This | ExprKind::Super => {}
        }
    }
}
