//! AST for the simplified Java grammar.
//!
//! Every node carries a byte [`Span`] and comment trivia. Spans compare
//! equal by definition, so the derived `PartialEq` throughout this tree is
//! structural equality: two parses of differently formatted but identical
//! code compare equal, as do an AST and its re-parse after printing.

/// Byte range in the original source. Positional metadata only: all spans
/// compare equal so that structural comparisons ignore them.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    pub lo: u32,
    pub hi: u32,
}

impl Span {
    pub fn new(lo: u32, hi: u32) -> Span {
        Span { lo, hi }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Span) -> bool {
        true
    }
}

/// A comment with its verbatim text, `//` or `/* */` markers included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub text: String,
}

impl Comment {
    pub fn new(text: impl Into<String>) -> Comment {
        Comment { text: text.into() }
    }
}

/// A dotted name: one segment for simple names, several for qualified ones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QualName {
    pub segments: Vec<String>,
}

impl QualName {
    pub fn simple(name: impl Into<String>) -> QualName {
        QualName {
            segments: vec![name.into()],
        }
    }

    pub fn dotted(&self) -> String {
        self.segments.join(".")
    }

    pub fn is_simple(&self) -> bool {
        self.segments.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompilationUnit {
    pub package: Option<PackageDecl>,
    pub imports: Vec<ImportDecl>,
    pub types: Vec<TypeDecl>,
    /// Comments at end of file that attach to no declaration.
    pub trailing_comments: Vec<Comment>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackageDecl {
    pub leading: Vec<Comment>,
    pub trailing: Option<Comment>,
    pub name: QualName,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportDecl {
    pub leading: Vec<Comment>,
    pub trailing: Option<Comment>,
    pub is_static: bool,
    pub name: QualName,
    pub is_wildcard: bool,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeKind {
    Class,
    Interface,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub leading: Vec<Comment>,
    pub trailing: Option<Comment>,
    pub modifiers: Vec<Modifier>,
    pub kind: TypeKind,
    pub name: String,
    pub type_params: Vec<TypeParam>,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    pub members: Vec<Member>,
    /// Comments before the closing brace that attach to no member.
    pub body_trailing_comments: Vec<Comment>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Modifier {
    Annotation(QualName),
    Public,
    Protected,
    Private,
    Static,
    Abstract,
    Final,
}

impl Modifier {
    pub fn keyword(&self) -> Option<&'static str> {
        match self {
            Modifier::Annotation(_) => None,
            Modifier::Public => Some("public"),
            Modifier::Protected => Some("protected"),
            Modifier::Private => Some("private"),
            Modifier::Static => Some("static"),
            Modifier::Abstract => Some("abstract"),
            Modifier::Final => Some("final"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeParam {
    pub name: String,
    pub bound: Option<TypeRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Member {
    Field(Field),
    Method(Method),
    Initializer(Initializer),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub leading: Vec<Comment>,
    pub trailing: Option<Comment>,
    pub modifiers: Vec<Modifier>,
    pub ty: TypeRef,
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Method {
    pub leading: Vec<Comment>,
    pub trailing: Option<Comment>,
    pub modifiers: Vec<Modifier>,
    pub type_params: Vec<TypeParam>,
    /// `None` marks a constructor.
    pub return_type: Option<TypeRef>,
    pub name: String,
    pub params: Vec<Param>,
    pub throws: Vec<TypeRef>,
    /// `None` for abstract and interface methods ending in `;`.
    pub body: Option<Block>,
    pub span: Span,
}

impl Method {
    pub fn is_constructor(&self) -> bool {
        self.return_type.is_none()
    }

    pub fn has_override(&self) -> bool {
        self.modifiers.iter().any(|m| {
            matches!(m, Modifier::Annotation(name) if name.segments.last().is_some_and(|s| s == "Override"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub modifiers: Vec<Modifier>,
    pub ty: TypeRef,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Initializer {
    pub leading: Vec<Comment>,
    pub trailing: Option<Comment>,
    pub is_static: bool,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Block {
    pub statements: Vec<Stmt>,
    /// Comments before the closing brace that attach to no statement.
    pub trailing_comments: Vec<Comment>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub leading: Vec<Comment>,
    pub trailing: Option<Comment>,
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    pub fn bare(kind: StmtKind) -> Stmt {
        Stmt {
            leading: Vec::new(),
            trailing: None,
            kind,
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Expr(Expr),
    Assign {
        target: Expr,
        op: AssignOp,
        value: Expr,
    },
    LocalVar(LocalVar),
    Return(Option<Expr>),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    For {
        init: Option<ForInit>,
        cond: Option<Expr>,
        update: Option<ExprOrAssign>,
        body: Box<Stmt>,
    },
    ForEach {
        modifiers: Vec<Modifier>,
        ty: TypeRef,
        name: String,
        iterable: Expr,
        body: Box<Stmt>,
    },
    Block(Block),
    Try {
        body: Block,
        catches: Vec<CatchClause>,
        finally_block: Option<Block>,
    },
    Throw(Expr),
    Break,
    Continue,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalVar {
    pub modifiers: Vec<Modifier>,
    pub ty: TypeRef,
    pub name: String,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForInit {
    Decl(LocalVar),
    Step(ExprOrAssign),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprOrAssign {
    Expr(Expr),
    Assign {
        target: Expr,
        op: AssignOp,
        value: Expr,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatchClause {
    pub ty: TypeRef,
    pub name: String,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    pub kind: TypeRefKind,
    pub span: Span,
}

impl TypeRef {
    pub fn named(name: QualName) -> TypeRef {
        TypeRef {
            kind: TypeRefKind::Named {
                name,
                type_args: None,
            },
            span: Span::default(),
        }
    }

    pub fn simple(name: impl Into<String>) -> TypeRef {
        TypeRef::named(QualName::simple(name))
    }

    pub fn var() -> TypeRef {
        TypeRef {
            kind: TypeRefKind::Var,
            span: Span::default(),
        }
    }

    /// The base simple name for a named type (`List` for `List<String>[]`),
    /// if this is a named type at all.
    pub fn base_simple_name(&self) -> Option<&str> {
        match &self.kind {
            TypeRefKind::Named { name, .. } => {
                if name.is_simple() {
                    Some(&name.segments[0])
                } else {
                    None
                }
            }
            TypeRefKind::Array(elem) => elem.base_simple_name(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeRefKind {
    Primitive(Primitive),
    /// `type_args: None` means no angle brackets; `Some(vec![])` is the
    /// diamond form `<>`.
    Named {
        name: QualName,
        type_args: Option<Vec<TypeArg>>,
    },
    Var,
    Void,
    Array(Box<TypeRef>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeArg {
    Type(TypeRef),
    Wildcard(Option<Box<TypeRef>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Primitive {
    Byte,
    Short,
    Int,
    Long,
    Float,
    Double,
    Boolean,
    Char,
}

impl Primitive {
    pub fn keyword(self) -> &'static str {
        match self {
            Primitive::Byte => "byte",
            Primitive::Short => "short",
            Primitive::Int => "int",
            Primitive::Long => "long",
            Primitive::Float => "float",
            Primitive::Double => "double",
            Primitive::Boolean => "boolean",
            Primitive::Char => "char",
        }
    }

    pub fn from_keyword(text: &str) -> Option<Primitive> {
        Some(match text {
            "byte" => Primitive::Byte,
            "short" => Primitive::Short,
            "int" => Primitive::Int,
            "long" => Primitive::Long,
            "float" => Primitive::Float,
            "double" => Primitive::Double,
            "boolean" => Primitive::Boolean,
            "char" => Primitive::Char,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn bare(kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn name(text: impl Into<String>) -> Expr {
        Expr::bare(ExprKind::Name(text.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// A single identifier; dotted chains appear as [`ExprKind::FieldAccess`].
    Name(String),
    Literal(Literal),
    This,
    Super,
    Unary {
        op: UnaryOp,
        expr: Box<Expr>,
    },
    Postfix {
        op: PostfixOp,
        expr: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        ty: TypeRef,
    },
    FieldAccess {
        recv: Box<Expr>,
        name: String,
    },
    MethodCall {
        recv: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
    },
    NewArray {
        elem: TypeRef,
        dims: Vec<Option<Expr>>,
        init: Option<Vec<Expr>>,
    },
    /// `{a, b}` array initializer, valid as a declaration initializer.
    ArrayLit(Vec<Expr>),
    Index {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    Lambda {
        params: Vec<LambdaParam>,
        body: LambdaBody,
    },
    Paren(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Null,
    Bool(bool),
    /// Raw text, suffix included, e.g. `42L` or `0x1F`.
    Int(String),
    /// Raw text, e.g. `2.5f`.
    Float(String),
    /// Raw text with quotes, e.g. `"a\"b"`.
    Str(String),
    /// Raw text with quotes, e.g. `'x'`.
    Char(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
    PreInc,
    PreDec,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Neg => "-",
            UnaryOp::PreInc => "++",
            UnaryOp::PreDec => "--",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostfixOp {
    Inc,
    Dec,
}

impl PostfixOp {
    pub fn symbol(self) -> &'static str {
        match self {
            PostfixOp::Inc => "++",
            PostfixOp::Dec => "--",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    /// Operators whose result is `boolean` rather than an operand type.
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Gt
                | BinaryOp::Lt
                | BinaryOp::Ge
                | BinaryOp::Le
                | BinaryOp::Eq
                | BinaryOp::Ne
                | BinaryOp::And
                | BinaryOp::Or
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Gt => ">",
            BinaryOp::Lt => "<",
            BinaryOp::Ge => ">=",
            BinaryOp::Le => "<=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaParam {
    pub ty: Option<TypeRef>,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaBody {
    Expr(Box<Expr>),
    Block(Block),
}
