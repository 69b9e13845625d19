//! Simple types, contexts, de Bruijn terms and βη-long normal forms.
//!
//! Terms are built raw and become [`Checked`] only by passing through
//! [`infer_type`], which records the context and synthesized type.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::stack;

/// Simple types over the single base type `*`.
#[derive(Clone)]
pub enum Ty {
    Star,
    Arrow(Arc<Ty>, Arc<Ty>),
}

impl PartialEq for Ty {
    fn eq(&self, other: &Ty) -> bool {
        stack::guard(|| match (self, other) {
            (Ty::Star, Ty::Star) => true,
            (Ty::Arrow(a, b), Ty::Arrow(c, d)) => a == c && b == d,
            _ => false,
        })
    }
}

impl Eq for Ty {}

impl Ty {
    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Arc::new(dom), Arc::new(cod))
    }

    /// `a1 -> a2 -> ... -> cod`
    pub fn arrows(doms: impl IntoIterator<Item = Ty>, cod: Ty) -> Ty {
        let doms: Vec<Ty> = doms.into_iter().collect();
        doms.into_iter()
            .rev()
            .fold(cod, |acc, dom| Ty::arrow(dom, acc))
    }

    pub fn as_arrow(&self) -> Option<(&Ty, &Ty)> {
        match self {
            Ty::Star => None,
            Ty::Arrow(dom, cod) => Some((dom, cod)),
        }
    }

    /// Nesting depth of arrows; `*` has depth 0.
    pub fn depth(&self) -> usize {
        stack::guard(|| match self {
            Ty::Star => 0,
            Ty::Arrow(dom, cod) => 1 + dom.depth().max(cod.depth()),
        })
    }
}

impl fmt::Debug for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        stack::guard(|| match self {
            Ty::Star => f.write_str("*"),
            Ty::Arrow(dom, cod) => {
                if dom.as_arrow().is_some() {
                    write!(f, "({dom})->{cod}")
                } else {
                    write!(f, "{dom}->{cod}")
                }
            }
        })
    }
}

/// A de Bruijn index; `0` is the innermost binder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub usize);

impl Var {
    pub const ZERO: Var = Var(0);

    pub fn index(self) -> usize {
        self.0
    }

    pub fn succ(self) -> Var {
        Var(self.0 + 1)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A typing context, outermost binding first and innermost binding last.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cxt(Vec<Ty>);

impl Cxt {
    pub fn empty() -> Cxt {
        Cxt(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The context `(self, ty)`.
    pub fn extend(&self, ty: Ty) -> Cxt {
        let mut types = self.0.clone();
        types.push(ty);
        Cxt(types)
    }

    pub fn push(&mut self, ty: Ty) {
        self.0.push(ty);
    }

    pub fn pop(&mut self) -> Option<Ty> {
        self.0.pop()
    }

    pub fn lookup(&self, x: Var) -> Option<&Ty> {
        self.0.len().checked_sub(x.0 + 1).map(|i| &self.0[i])
    }

    /// Types from outermost to innermost.
    pub fn types(&self) -> &[Ty] {
        &self.0
    }
}

impl From<Vec<Ty>> for Cxt {
    fn from(types: Vec<Ty>) -> Cxt {
        Cxt(types)
    }
}

impl FromIterator<Ty> for Cxt {
    fn from_iter<I: IntoIterator<Item = Ty>>(iter: I) -> Cxt {
        Cxt(iter.into_iter().collect())
    }
}

/// Lambda terms in de Bruijn form. Binders carry their domain type.
#[derive(Debug, Clone)]
pub enum Tm {
    Var(Var),
    Abs(Ty, Arc<Tm>),
    App(Arc<Tm>, Arc<Tm>),
}

impl PartialEq for Tm {
    fn eq(&self, other: &Tm) -> bool {
        stack::guard(|| match (self, other) {
            (Tm::Var(x), Tm::Var(y)) => x == y,
            (Tm::Abs(a, s), Tm::Abs(b, t)) => a == b && s == t,
            (Tm::App(f, s), Tm::App(g, t)) => f == g && s == t,
            _ => false,
        })
    }
}

impl Eq for Tm {}

impl Tm {
    pub fn var(index: usize) -> Tm {
        Tm::Var(Var(index))
    }

    pub fn abs(dom: Ty, body: Tm) -> Tm {
        Tm::Abs(dom, Arc::new(body))
    }

    pub fn app(fun: Tm, arg: Tm) -> Tm {
        Tm::App(Arc::new(fun), Arc::new(arg))
    }

    /// `head a1 ... an`
    pub fn apps(head: Tm, args: impl IntoIterator<Item = Tm>) -> Tm {
        args.into_iter().fold(head, Tm::app)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut size = 0;
        let mut pending = vec![self];
        while let Some(t) = pending.pop() {
            size += 1;
            match t {
                Tm::Var(_) => {}
                Tm::Abs(_, body) => pending.push(body),
                Tm::App(fun, arg) => {
                    pending.push(fun);
                    pending.push(arg);
                }
            }
        }
        size
    }
}

/// A variable applied to a spine of arguments, outermost application last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ne<X> {
    pub head: Var,
    pub spine: Vec<X>,
}

impl<X> Ne<X> {
    pub fn var(head: Var) -> Ne<X> {
        Ne {
            head,
            spine: Vec::new(),
        }
    }

    pub fn new(head: Var, spine: Vec<X>) -> Ne<X> {
        Ne { head, spine }
    }

    /// The neutral `self arg`.
    pub fn app(mut self, arg: X) -> Ne<X> {
        self.spine.push(arg);
        self
    }
}

/// βη-long normal forms: lambdas at arrow type, neutrals at base type.
#[derive(Debug, Clone)]
pub enum Nf {
    Lam(Box<Nf>),
    Ne(Ne<Nf>),
}

impl PartialEq for Nf {
    fn eq(&self, other: &Nf) -> bool {
        stack::guard(|| match (self, other) {
            (Nf::Lam(s), Nf::Lam(t)) => s == t,
            (Nf::Ne(m), Nf::Ne(n)) => m == n,
            _ => false,
        })
    }
}

impl Eq for Nf {}

impl Nf {
    pub fn lam(body: Nf) -> Nf {
        Nf::Lam(Box::new(body))
    }

    pub fn var(index: usize) -> Nf {
        Nf::Ne(Ne::var(Var(index)))
    }

    pub fn neutral(head: usize, spine: Vec<Nf>) -> Nf {
        Nf::Ne(Ne::new(Var(head), spine))
    }

    /// Whether `self` is a well-scoped η-long normal form of type `ty` in `ctx`:
    /// every arrow-typed position is a lambda and every base-typed one neutral.
    pub fn is_eta_long(&self, ctx: &Cxt, ty: &Ty) -> bool {
        let mut ctx = ctx.clone();
        eta_long_nf(&mut ctx, ty, self)
    }
}

fn eta_long_nf(ctx: &mut Cxt, ty: &Ty, nf: &Nf) -> bool {
    stack::guard(|| match (nf, ty) {
        (Nf::Lam(body), Ty::Arrow(dom, cod)) => {
            ctx.push((**dom).clone());
            let ok = eta_long_nf(ctx, cod, body);
            ctx.pop();
            ok
        }
        (Nf::Ne(ne), Ty::Star) => {
            let Some(mut head_ty) = ctx.lookup(ne.head).cloned() else {
                return false;
            };
            for arg in &ne.spine {
                let Ty::Arrow(dom, cod) = head_ty else {
                    return false;
                };
                if !eta_long_nf(ctx, &dom, arg) {
                    return false;
                }
                head_ty = (*cod).clone();
            }
            head_ty == Ty::Star
        }
        _ => false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable #{0}")]
    UnboundVariable(usize),
    #[error("expected a function, found a term of type {0}")]
    ExpectedFunction(Ty),
    #[error("argument has type {actual}, expected {expected}")]
    ArgumentMismatch { expected: Ty, actual: Ty },
    #[error("term has type {actual}, expected {expected}")]
    TypeMismatch { expected: Ty, actual: Ty },
}

/// One step from a term into one of its immediate subterms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    Body,
    Fun,
    Arg,
}

/// A [`TypeError`] together with the path from the root to the offending subterm.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{error}")]
pub struct LocatedTypeError {
    pub error: TypeError,
    pub path: Vec<PathStep>,
}

/// A term that has passed the type checker, with its context and type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checked {
    ctx: Cxt,
    ty: Ty,
    term: Arc<Tm>,
}

impl Checked {
    pub fn ctx(&self) -> &Cxt {
        &self.ctx
    }

    pub fn ty(&self) -> &Ty {
        &self.ty
    }

    pub fn term(&self) -> &Arc<Tm> {
        &self.term
    }
}

/// Synthesize the type of `term` in `ctx`.
pub fn infer_type(ctx: &Cxt, term: &Tm) -> Result<Checked, TypeError> {
    infer_type_located(ctx, term).map_err(|located| located.error)
}

/// Like [`infer_type`], but failures report where in the term they occurred.
pub fn infer_type_located(ctx: &Cxt, term: &Tm) -> Result<Checked, LocatedTypeError> {
    let mut scope = ctx.clone();
    match synth(&mut scope, term) {
        Ok(ty) => Ok(Checked {
            ctx: ctx.clone(),
            ty,
            term: Arc::new(term.clone()),
        }),
        Err((error, mut path)) => {
            path.reverse();
            Err(LocatedTypeError { error, path })
        }
    }
}

type SynthResult = Result<Ty, (TypeError, Vec<PathStep>)>;

fn synth(ctx: &mut Cxt, term: &Tm) -> SynthResult {
    stack::guard(|| match term {
        Tm::Var(x) => ctx
            .lookup(*x)
            .cloned()
            .ok_or((TypeError::UnboundVariable(x.0), Vec::new())),
        Tm::Abs(dom, body) => {
            ctx.push(dom.clone());
            let cod = synth(ctx, body);
            ctx.pop();
            let cod = cod.map_err(|(e, mut path)| {
                path.push(PathStep::Body);
                (e, path)
            })?;
            Ok(Ty::arrow(dom.clone(), cod))
        }
        Tm::App(fun, arg) => {
            let fun_ty = synth(ctx, fun).map_err(|(e, mut path)| {
                path.push(PathStep::Fun);
                (e, path)
            })?;
            let arg_ty = synth(ctx, arg).map_err(|(e, mut path)| {
                path.push(PathStep::Arg);
                (e, path)
            })?;
            match fun_ty {
                Ty::Arrow(dom, cod) if *dom == arg_ty => Ok((*cod).clone()),
                Ty::Arrow(dom, _) => Err((
                    TypeError::ArgumentMismatch {
                        expected: (*dom).clone(),
                        actual: arg_ty,
                    },
                    Vec::new(),
                )),
                Ty::Star => Err((TypeError::ExpectedFunction(Ty::Star), Vec::new())),
            }
        }
    })
}

/// The term denoted by a normal form of type `ty` in `ctx`.
///
/// Binder annotations are recovered from `ty`, spine argument types from the
/// head variable's type in the context.
pub fn embed_nf(ctx: &Cxt, ty: &Ty, nf: &Nf) -> Result<Tm, TypeError> {
    let mut ctx = ctx.clone();
    embed(&mut ctx, ty, nf)
}

fn embed(ctx: &mut Cxt, ty: &Ty, nf: &Nf) -> Result<Tm, TypeError> {
    stack::guard(|| match nf {
        Nf::Lam(body) => {
            let (dom, cod) = ty
                .as_arrow()
                .ok_or_else(|| TypeError::ExpectedFunction(ty.clone()))?;
            ctx.push(dom.clone());
            let body = embed(ctx, cod, body);
            ctx.pop();
            Ok(Tm::abs(dom.clone(), body?))
        }
        Nf::Ne(ne) => {
            let mut head_ty = ctx
                .lookup(ne.head)
                .cloned()
                .ok_or(TypeError::UnboundVariable(ne.head.0))?;
            let mut term = Tm::Var(ne.head);
            for arg in &ne.spine {
                let Ty::Arrow(dom, cod) = head_ty else {
                    return Err(TypeError::ExpectedFunction(head_ty));
                };
                term = Tm::app(term, embed(ctx, &dom, arg)?);
                head_ty = (*cod).clone();
            }
            if head_ty != *ty {
                return Err(TypeError::TypeMismatch {
                    expected: ty.clone(),
                    actual: head_ty,
                });
            }
            Ok(term)
        }
    })
}
