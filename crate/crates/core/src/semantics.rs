//! Weak-head values, environments and weakening along order-preserving embeddings.

use std::sync::Arc;

use crate::syntax::{Cxt, Ne, Nf, Tm, Var};

/// Weak-head normal values: stuck neutrals or closures.
#[derive(Debug, Clone)]
pub enum Val {
    Ne(Arc<Ne<Val>>),
    Closure(Closure),
}

/// The body of a lambda (scoped over one more variable than `env` provides)
/// paired with the environment it was evaluated in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub body: Arc<Tm>,
    pub env: Env,
}

impl PartialEq for Val {
    fn eq(&self, other: &Val) -> bool {
        crate::stack::guard(|| match (self, other) {
            (Val::Ne(m), Val::Ne(n)) => m == n,
            (Val::Closure(c), Val::Closure(d)) => c == d,
            _ => false,
        })
    }
}

impl Eq for Val {}

impl Val {
    pub fn var(index: usize) -> Val {
        Val::Ne(Arc::new(Ne::var(Var(index))))
    }

    pub fn neutral(ne: Ne<Val>) -> Val {
        Val::Ne(Arc::new(ne))
    }

    pub fn closure(body: Arc<Tm>, env: Env) -> Val {
        Val::Closure(Closure { body, env })
    }
}

/// A list of values, one per entry of the context it interprets.
/// Stored outermost first; index 0 of a lookup is the last entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env(Arc<Vec<Val>>);

impl Env {
    pub fn empty() -> Env {
        Env::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The environment `(self, value)`.
    pub fn push(&self, value: Val) -> Env {
        let mut values = Vec::with_capacity(self.0.len() + 1);
        values.extend(self.0.iter().cloned());
        values.push(value);
        Env(Arc::new(values))
    }

    pub fn get(&self, x: Var) -> Option<&Val> {
        self.0.len().checked_sub(x.0 + 1).map(|i| &self.0[i])
    }

    /// The value bound to `x`.
    ///
    /// # Panics
    ///
    /// If `x` is out of range, which the type checker rules out.
    pub fn lookup(&self, x: Var) -> &Val {
        match self.get(x) {
            Some(v) => v,
            None => panic!(
                "variable #{} looked up in an environment of length {}",
                x.0,
                self.len()
            ),
        }
    }

    /// Values from outermost to innermost.
    pub fn values(&self) -> &[Val] {
        &self.0
    }
}

impl From<Vec<Val>> for Env {
    fn from(values: Vec<Val>) -> Env {
        Env(Arc::new(values))
    }
}

impl FromIterator<Val> for Env {
    fn from_iter<I: IntoIterator<Item = Val>>(iter: I) -> Env {
        Env(Arc::new(iter.into_iter().collect()))
    }
}

/// An order-preserving embedding witnessing that one context extends another.
///
/// `Weak` skips a new entry of the larger context; `Lift` keeps an entry
/// shared by both.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ope {
    Id,
    Weak(Box<Ope>),
    Lift(Box<Ope>),
}

impl Ope {
    /// Introduces one fresh innermost variable.
    pub fn wk() -> Ope {
        Ope::Weak(Box::new(Ope::Id))
    }

    pub fn weak(self) -> Ope {
        Ope::Weak(Box::new(self))
    }

    pub fn lift(self) -> Ope {
        Ope::Lift(Box::new(self))
    }

    /// `self • other`: first embed along `other`, then along `self`.
    pub fn compose(&self, other: &Ope) -> Ope {
        match (self, other) {
            (Ope::Id, other) => other.clone(),
            (Ope::Weak(rest), other) => rest.compose(other).weak(),
            (Ope::Lift(rest), Ope::Id) => rest.as_ref().clone().lift(),
            (Ope::Lift(rest), Ope::Weak(other)) => rest.compose(other).weak(),
            (Ope::Lift(rest), Ope::Lift(other)) => rest.compose(other).lift(),
        }
    }

    /// Image of a variable under the embedding.
    pub fn weaken_var(&self, x: Var) -> Var {
        let mut ope = self;
        let mut index = x.0;
        let mut shift = 0;
        loop {
            match ope {
                Ope::Id => return Var(index + shift),
                Ope::Weak(rest) => {
                    shift += 1;
                    ope = rest;
                }
                Ope::Lift(rest) => {
                    if index == 0 {
                        return Var(shift);
                    }
                    index -= 1;
                    shift += 1;
                    ope = rest;
                }
            }
        }
    }

    /// The larger context obtained by embedding `ctx` along `self`,
    /// with `inserted` supplying the types of skipped entries (innermost first).
    ///
    /// Returns `None` when `self` does not fit `ctx` or `inserted` runs short.
    pub fn extend_cxt(
        &self,
        ctx: &Cxt,
        inserted: &mut impl Iterator<Item = crate::syntax::Ty>,
    ) -> Option<Cxt> {
        match self {
            Ope::Id => Some(ctx.clone()),
            Ope::Weak(rest) => {
                let ty = inserted.next()?;
                let mut outer = rest.extend_cxt(ctx, inserted)?;
                outer.push(ty);
                Some(outer)
            }
            Ope::Lift(rest) => {
                let mut inner = ctx.clone();
                let ty = inner.pop()?;
                let mut outer = rest.extend_cxt(&inner, inserted)?;
                outer.push(ty);
                Some(outer)
            }
        }
    }
}

/// Reindexing of every variable occurrence along an [`Ope`].
pub trait Weaken {
    fn weaken(&self, ope: &Ope) -> Self;
}

impl Weaken for Var {
    fn weaken(&self, ope: &Ope) -> Var {
        ope.weaken_var(*self)
    }
}

impl<X: Weaken> Weaken for Ne<X> {
    fn weaken(&self, ope: &Ope) -> Ne<X> {
        Ne {
            head: ope.weaken_var(self.head),
            spine: self.spine.iter().map(|arg| arg.weaken(ope)).collect(),
        }
    }
}

impl Weaken for Val {
    fn weaken(&self, ope: &Ope) -> Val {
        if *ope == Ope::Id {
            return self.clone();
        }
        crate::stack::guard(|| match self {
            Val::Ne(ne) => Val::Ne(Arc::new(ne.weaken(ope))),
            // closure bodies live in the closure's own scope; only the env moves
            Val::Closure(Closure { body, env }) => Val::Closure(Closure {
                body: Arc::clone(body),
                env: env.weaken(ope),
            }),
        })
    }
}

impl Weaken for Env {
    fn weaken(&self, ope: &Ope) -> Env {
        if *ope == Ope::Id {
            return self.clone();
        }
        self.0.iter().map(|v| v.weaken(ope)).collect()
    }
}

impl Weaken for Nf {
    fn weaken(&self, ope: &Ope) -> Nf {
        weaken_nf(self, ope)
    }
}

// Lambdas lift the embedding over their bound variable.
fn weaken_nf(nf: &Nf, ope: &Ope) -> Nf {
    crate::stack::guard(|| match nf {
        Nf::Lam(body) => Nf::lam(weaken_nf(body, &ope.clone().lift())),
        Nf::Ne(ne) => Nf::Ne(Ne {
            head: ope.weaken_var(ne.head),
            spine: ne.spine.iter().map(|arg| weaken_nf(arg, ope)).collect(),
        }),
    })
}

/// `weakVal`: weaken a value by one fresh innermost variable.
pub fn weak_val(v: &Val) -> Val {
    v.weaken(&Ope::wk())
}

/// The identity environment: each variable of `ctx` mapped to itself as a neutral.
pub fn ide(ctx: &Cxt) -> Env {
    let wk = Ope::wk();
    ctx.types()
        .iter()
        .fold(Env::empty(), |env, _| env.weaken(&wk).push(Val::var(0)))
}
