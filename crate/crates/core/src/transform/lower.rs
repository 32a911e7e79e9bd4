//! Code lowering: flattens expression structure without changing what the
//! code does.
//!
//! Composite sub-expressions are hoisted into `var Name = expr;` bindings
//! inserted right before the statement that used them, outermost first, one
//! nesting level per pass, until nothing is left to hoist. Fields with
//! initializers are split into a bare declaration plus an initializer block
//! (a `static` block for static fields) placed just before the declaration.
//!
//! Positions where hoisting would change behavior are left alone: the top
//! expression of an expression statement (it may be a void call), while/for
//! headers (re-evaluated each iteration), anything inside a lambda body
//! (captured, not executed here), assignment targets, and the arguments of
//! `this(...)`/`super(...)` delegations (nothing may precede them).

use rand_chacha::ChaCha8Rng;

use crate::seed::rng_for;
use crate::syntax::*;
use crate::words::FreshNames;

/// Applies the full lowering to a compilation unit.
pub fn lower_code(unit: &CompilationUnit, seed: u64) -> CompilationUnit {
    let mut out = unit.clone();
    let mut lowerer = Lowerer {
        fresh: FreshNames::new(super::rename::collect_identifiers(unit)),
        rng: rng_for(seed, "lower", ""),
    };
    for decl in &mut out.types {
        lowerer.split_fields(decl);
    }
    loop {
        let mut changed = false;
        for decl in &mut out.types {
            for member in &mut decl.members {
                match member {
                    Member::Method(m) => {
                        if let Some(body) = &mut m.body {
                            changed |= lowerer.pass_block(body);
                        }
                    }
                    Member::Initializer(init) => {
                        changed |= lowerer.pass_block(&mut init.body);
                    }
                    Member::Field(_) => {}
                }
            }
        }
        if !changed {
            break;
        }
    }
    out
}

struct Lowerer {
    fresh: FreshNames,
    rng: ChaCha8Rng,
}

impl Lowerer {
    /// Splits every initialized field into `{ name = init; }` + `Type name;`,
    /// with the block placed immediately before the declaration.
    fn split_fields(&mut self, decl: &mut TypeDecl) {
        let mut members = Vec::with_capacity(decl.members.len());
        for member in decl.members.drain(..) {
            match member {
                Member::Field(mut field) if field.init.is_some() => {
                    let init = field.init.take().unwrap();
                    let is_static = field
                        .modifiers
                        .iter()
                        .any(|m| matches!(m, Modifier::Static));
                    let assign = Stmt::bare(StmtKind::Assign {
                        target: Expr::name(&field.name),
                        op: AssignOp::Assign,
                        value: init,
                    });
                    members.push(Member::Initializer(Initializer {
                        leading: Vec::new(),
                        trailing: None,
                        is_static,
                        body: Block {
                            statements: vec![assign],
                            ..Block::default()
                        },
                        span: Span::default(),
                    }));
                    members.push(Member::Field(field));
                }
                other => members.push(other),
            }
        }
        decl.members = members;
    }

    fn hoist_name(&mut self) -> String {
        self.fresh.three_word(&mut self.rng)
    }

    /// One hoisting pass over a block. Returns whether anything moved.
    fn pass_block(&mut self, block: &mut Block) -> bool {
        let mut changed = false;
        let mut out = Vec::with_capacity(block.statements.len());
        for mut stmt in block.statements.drain(..) {
            let mut hoisted = Vec::new();
            changed |= self.pass_stmt(&mut stmt, &mut hoisted);
            out.extend(hoisted);
            out.push(stmt);
        }
        block.statements = out;
        changed
    }

    /// Collects this statement's hoists into `hoisted` and recurses into
    /// nested bodies, wrapping non-block branch bodies in blocks on demand.
    fn pass_stmt(&mut self, stmt: &mut Stmt, hoisted: &mut Vec<Stmt>) -> bool {
        let mut changed = false;
        match &mut stmt.kind {
            StmtKind::Expr(top) => {
                if !is_ctor_delegation(top) {
                    changed |= self.hoist_children(top, hoisted);
                }
            }
            StmtKind::Assign { target, value, .. } => {
                // Targets are places, not values; only the value side moves.
                changed |= self.hoist_children(target, hoisted);
                changed |= self.hoist(value, hoisted);
            }
            StmtKind::LocalVar(local) => {
                // The initializer itself is already in lowered form.
                if let Some(init) = &mut local.init {
                    changed |= self.hoist_children(init, hoisted);
                }
            }
            StmtKind::Return(Some(value)) => changed |= self.hoist(value, hoisted),
            StmtKind::Return(None) => {}
            StmtKind::Throw(value) => changed |= self.hoist(value, hoisted),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                changed |= self.hoist(cond, hoisted);
                changed |= self.pass_branch(then_branch);
                if let Some(els) = else_branch {
                    changed |= self.pass_branch(els);
                }
            }
            StmtKind::While { body, .. } => {
                // Condition untouched: it runs once per iteration.
                changed |= self.pass_branch(body);
            }
            StmtKind::For { body, .. } => {
                // The whole header is skipped; the update clause re-runs
                // every iteration and the rest reads most naturally intact.
                changed |= self.pass_branch(body);
            }
            StmtKind::ForEach { body, .. } => {
                changed |= self.pass_branch(body);
            }
            StmtKind::Block(block) => changed |= self.pass_block(block),
            StmtKind::Try {
                body,
                catches,
                finally_block,
            } => {
                changed |= self.pass_block(body);
                for c in catches {
                    changed |= self.pass_block(&mut c.body);
                }
                if let Some(f) = finally_block {
                    changed |= self.pass_block(f);
                }
            }
            StmtKind::Break | StmtKind::Continue | StmtKind::Empty => {}
        }
        changed
    }

    /// Recurses into a branch body, wrapping it in a block first when it is
    /// a bare statement so hoisted bindings have somewhere legal to live.
    fn pass_branch(&mut self, body: &mut Stmt) -> bool {
        if !matches!(body.kind, StmtKind::Block(_)) {
            if !needs_hoisting_anywhere(body) {
                return false;
            }
            let inner = std::mem::replace(body, Stmt::bare(StmtKind::Empty));
            *body = Stmt {
                leading: Vec::new(),
                trailing: None,
                kind: StmtKind::Block(Block {
                    statements: vec![inner],
                    ..Block::default()
                }),
                span: Span::default(),
            };
        }
        match &mut body.kind {
            StmtKind::Block(block) => self.pass_block(block),
            _ => unreachable!("branch was just wrapped"),
        }
    }

    /// Hoists `expr` itself when eligible; otherwise descends one level.
    fn hoist(&mut self, expr: &mut Expr, hoisted: &mut Vec<Stmt>) -> bool {
        if !is_eligible(expr) {
            return self.hoist_children(expr, hoisted);
        }
        let name = self.hoist_name();
        let value = std::mem::replace(expr, Expr::name(&name));
        hoisted.push(Stmt::bare(StmtKind::LocalVar(LocalVar {
            modifiers: Vec::new(),
            ty: TypeRef::var(),
            name,
            init: Some(value),
        })));
        true
    }

    /// Applies `hoist` to each direct child expression in evaluation order.
    fn hoist_children(&mut self, expr: &mut Expr, hoisted: &mut Vec<Stmt>) -> bool {
        let mut changed = false;
        match &mut expr.kind {
            ExprKind::Unary { expr, .. } | ExprKind::Postfix { expr, .. } => {
                changed |= self.hoist(expr, hoisted);
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                changed |= self.hoist(lhs, hoisted);
                changed |= self.hoist(rhs, hoisted);
            }
            ExprKind::Cast { expr, .. } => changed |= self.hoist(expr, hoisted),
            ExprKind::InstanceOf { expr, .. } => changed |= self.hoist(expr, hoisted),
            ExprKind::FieldAccess { recv, .. } => changed |= self.hoist(recv, hoisted),
            ExprKind::MethodCall { recv, args, .. } => {
                if let Some(r) = recv {
                    changed |= self.hoist(r, hoisted);
                }
                for a in args {
                    changed |= self.hoist(a, hoisted);
                }
            }
            ExprKind::New { args, .. } => {
                for a in args {
                    changed |= self.hoist(a, hoisted);
                }
            }
            ExprKind::NewArray { dims, init, .. } => {
                for d in dims.iter_mut().flatten() {
                    changed |= self.hoist(d, hoisted);
                }
                for e in init.iter_mut().flatten() {
                    changed |= self.hoist(e, hoisted);
                }
            }
            ExprKind::ArrayLit(elems) => {
                for e in elems {
                    changed |= self.hoist(e, hoisted);
                }
            }
            ExprKind::Index { array, index } => {
                changed |= self.hoist(array, hoisted);
                changed |= self.hoist(index, hoisted);
            }
            ExprKind::Paren(inner) => changed |= self.hoist(inner, hoisted),
            // Lambda bodies run later, elsewhere: off limits.
            ExprKind::Lambda { .. } => {}
            ExprKind::Name(_) | ExprKind::Literal(_) | ExprKind::This | ExprKind::Super => {}
        }
        changed
    }
}

/// Composite expressions are hoistable; atoms and lambdas are not.
fn is_eligible(expr: &Expr) -> bool {
    match &expr.kind {
        ExprKind::Name(_) | ExprKind::Literal(_) | ExprKind::This | ExprKind::Super => false,
        // A signed literal reads as one token; moving it adds nothing.
        ExprKind::Unary { expr, .. } => !matches!(expr.kind, ExprKind::Literal(_)),
        ExprKind::Paren(inner) => is_eligible(inner),
        ExprKind::Lambda { .. } => false,
        // `x++` both reads and writes x; binding the result is fine but
        // leaving it in place is required when it is the whole statement,
        // which `hoist` callers already guarantee. As an operand it moves.
        _ => true,
    }
}

fn is_ctor_delegation(expr: &Expr) -> bool {
    matches!(
        &expr.kind,
        ExprKind::MethodCall { recv: None, name, .. } if name == "this" || name == "super"
    )
}

/// Whether any statement in this subtree would produce a hoist, used to
/// avoid wrapping branch bodies in blocks for nothing.
fn needs_hoisting_anywhere(stmt: &Stmt) -> bool {
    fn expr_needs(expr: &Expr) -> bool {
        if is_eligible(expr) {
            return true;
        }
        child_needs(expr)
    }
    fn child_needs(expr: &Expr) -> bool {
        match &expr.kind {
            ExprKind::Unary { expr, .. } | ExprKind::Postfix { expr, .. } => expr_needs(expr),
            ExprKind::Binary { lhs, rhs, .. } => expr_needs(lhs) || expr_needs(rhs),
            ExprKind::Cast { expr, .. } | ExprKind::InstanceOf { expr, .. } => expr_needs(expr),
            ExprKind::FieldAccess { recv, .. } => expr_needs(recv),
            ExprKind::MethodCall { recv, args, .. } => {
                recv.as_deref().is_some_and(expr_needs) || args.iter().any(expr_needs)
            }
            ExprKind::New { args, .. } => args.iter().any(expr_needs),
            ExprKind::NewArray { dims, init, .. } => {
                dims.iter().flatten().any(expr_needs) || init.iter().flatten().any(expr_needs)
            }
            ExprKind::ArrayLit(elems) => elems.iter().any(expr_needs),
            ExprKind::Index { array, index } => expr_needs(array) || expr_needs(index),
            ExprKind::Paren(inner) => child_needs(inner),
            _ => false,
        }
    }
    match &stmt.kind {
        StmtKind::Expr(top) => !is_ctor_delegation(top) && child_needs(top),
        StmtKind::Assign { target, value, .. } => child_needs(target) || expr_needs(value),
        StmtKind::LocalVar(local) => local.init.as_ref().is_some_and(child_needs),
        StmtKind::Return(value) => value.as_ref().is_some_and(expr_needs),
        StmtKind::Throw(value) => expr_needs(value),
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            expr_needs(cond)
                || needs_hoisting_anywhere(then_branch)
                || else_branch
                    .as_deref()
                    .is_some_and(needs_hoisting_anywhere)
        }
        StmtKind::While { body, .. }
        | StmtKind::For { body, .. }
        | StmtKind::ForEach { body, .. } => needs_hoisting_anywhere(body),
        StmtKind::Block(block) => block.statements.iter().any(needs_hoisting_anywhere),
        StmtKind::Try {
            body,
            catches,
            finally_block,
        } => {
            body.statements.iter().any(needs_hoisting_anywhere)
                || catches
                    .iter()
                    .any(|c| c.body.statements.iter().any(needs_hoisting_anywhere))
                || finally_block
                    .iter()
                    .any(|f| f.statements.iter().any(needs_hoisting_anywhere))
        }
        StmtKind::Break | StmtKind::Continue | StmtKind::Empty => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, render};

    #[test]
    fn field_split_and_if_condition_hoist() {
        let src = "class C {\n    C c = null;\n    void m() {\n        int a = 0;\n        if (a == 0) {\n            return;\n        }\n    }\n}\n";
        let unit = parse(src).unwrap();
        let lowered = lower_code(&unit, 1);
        let rendered = render(&lowered);
        let decl = &lowered.types[0];
        assert!(
            matches!(&decl.members[0], Member::Initializer(i) if !i.is_static),
            "initializer block comes first:\n{rendered}"
        );
        assert!(
            matches!(&decl.members[1], Member::Field(f) if f.init.is_none()),
            "bare field follows:\n{rendered}"
        );
        assert!(rendered.contains("c = null;"), "{rendered}");
        assert!(rendered.contains(" = a == 0;"), "{rendered}");
        let hoist_at = rendered.find("var ").unwrap();
        let if_at = rendered.find("if (").unwrap();
        assert!(hoist_at < if_at, "{rendered}");
        let cond = rendered[if_at..].split(')').next().unwrap();
        assert!(!cond.contains("=="), "condition became a name: {rendered}");
    }

    #[test]
    fn static_field_gets_static_block() {
        let unit = parse("class C {\n    static int n = 5;\n}\n").unwrap();
        let lowered = lower_code(&unit, 1);
        assert!(matches!(
            &lowered.types[0].members[0],
            Member::Initializer(i) if i.is_static
        ));
    }

    #[test]
    fn lone_expression_statement_unchanged() {
        let src = "class C {\n    void m() {\n        foo();\n    }\n}\n";
        let unit = parse(src).unwrap();
        let lowered = lower_code(&unit, 1);
        assert_eq!(lowered, unit);
    }

    #[test]
    fn while_condition_stays_but_body_lowers() {
        let src = "class C {\n    void m() {\n        while (it.hasNext()) {\n            x = it.next();\n        }\n    }\n}\n";
        let unit = parse(src).unwrap();
        let lowered = lower_code(&unit, 1);
        let rendered = render(&lowered);
        assert!(rendered.contains("while (it.hasNext())"), "{rendered}");
        assert!(rendered.contains(" = it.next();"), "{rendered}");
        let assign_line = rendered
            .lines()
            .find(|l| l.trim_start().starts_with("x = "))
            .unwrap();
        assert!(
            !assign_line.contains("it.next()"),
            "assignment value should be a variable: {rendered}"
        );
    }

    #[test]
    fn nested_call_lowers_to_fixpoint() {
        let src = "class C {\n    void m() {\n        foo(bar(baz()));\n    }\n}\n";
        let unit = parse(src).unwrap();
        let lowered = lower_code(&unit, 1);
        let rendered = render(&lowered);
        let body: Vec<&str> = rendered
            .lines()
            .map(str::trim)
            .filter(|l| l.starts_with("var ") || l.starts_with("foo"))
            .collect();
        assert_eq!(body.len(), 3, "{rendered}");
        assert!(body[0].contains("= baz()"), "{rendered}");
        assert!(body[1].contains("= bar("), "{rendered}");
        assert!(body[2].starts_with("foo("), "{rendered}");
        assert!(!body[2].contains("bar"), "{rendered}");
    }

    #[test]
    fn call_counts_preserved() {
        let src = "class C {\n    void m() {\n        int r = f(g(), h(k())) + w();\n    }\n}\n";
        let unit = parse(src).unwrap();
        let lowered = lower_code(&unit, 1);
        let before = render(&unit).matches('(').count();
        let after = render(&lowered).matches('(').count();
        assert_eq!(
            before, after,
            "lowering must not add or drop call expressions"
        );
    }

    #[test]
    fn non_block_branch_gets_wrapped_only_when_needed() {
        let src = "class C {\n    void m() {\n        if (ok) x = f(g());\n        if (ok) return;\n    }\n}\n";
        let unit = parse(src).unwrap();
        let lowered = lower_code(&unit, 1);
        let rendered = render(&lowered);
        assert_eq!(rendered.matches("if (ok) {").count(), 1, "{rendered}");
        assert!(rendered.contains("if (ok)\n            return;"), "{rendered}");
    }

    #[test]
    fn lambda_bodies_untouched() {
        let src = "class C {\n    void m() {\n        r = () -> f(g());\n    }\n}\n";
        let unit = parse(src).unwrap();
        let lowered = lower_code(&unit, 1);
        let rendered = render(&lowered);
        assert!(rendered.contains("() -> f(g())"), "{rendered}");
    }

    #[test]
    fn deterministic_for_same_seed() {
        let src = "class C {\n    void m() {\n        if (a.b() == c.d()) {\n            return;\n        }\n    }\n}\n";
        let unit = parse(src).unwrap();
        assert_eq!(
            render(&lower_code(&unit, 9)),
            render(&lower_code(&unit, 9))
        );
    }
}
