//! Normalization by evaluation into the delay monad.
//!
//! [`eval`] turns a term and an environment into a delayed weak-head value,
//! [`readback`] turns a value into a delayed η-long normal form, and [`nf`]
//! composes the two starting from the identity environment. Exactly one
//! `Later` layer is produced per closure application and one per
//! η-expansion at arrow type, so delay steps count β-redexes fired plus
//! η-expansions performed.

use std::sync::Arc;

use thiserror::Error;

use crate::delay::{Convergence, Delay, Thunk};
use crate::semantics::{ide, weak_val, Closure, Env, Val};
use crate::stack;
use crate::syntax::{Checked, Cxt, Ne, Nf, Tm, Ty};

/// Evaluate `term` in `env`.
///
/// Building the result recurses only on the term's structure; closure
/// bodies are entered under a `Later`, so this always returns promptly.
pub fn eval(term: &Arc<Tm>, env: &Env) -> Delay<Val> {
    stack::guard(|| match term.as_ref() {
        Tm::Var(x) => Delay::now(env.lookup(*x).clone()),
        Tm::Abs(_, body) => Delay::now(Val::closure(Arc::clone(body), env.clone())),
        Tm::App(fun, arg) => {
            let arg = Arc::clone(arg);
            let env = env.clone();
            eval(fun, &env.clone())
                .bind(move |f| eval(&arg, &env).bind(move |v| apply(f.clone(), v)))
        }
    })
}

/// Apply a function value to an argument. Neutrals grow their spine at once;
/// closures take one delay step before their body is evaluated.
pub fn apply(fun: Val, arg: Val) -> Delay<Val> {
    match fun {
        Val::Ne(ne) => Delay::now(Val::neutral(Ne::clone(&ne).app(arg))),
        Val::Closure(Closure { body, env }) => Delay::later(beta(body, env, arg)),
    }
}

/// The suspended β-reduct of a closure body applied to `arg`.
pub fn beta(body: Arc<Tm>, env: Env, arg: Val) -> Thunk<Val> {
    Thunk::new(move || eval(&body, &env.push(arg.clone())))
}

/// Read a value of type `ty` in `ctx` back into a delayed normal form.
///
/// # Panics
///
/// If `value` is a closure at base type, which well-typed input rules out.
pub fn readback(ctx: &Cxt, ty: &Ty, value: Val) -> Delay<Nf> {
    match ty {
        Ty::Star => match value {
            Val::Ne(ne) => nereadback(ctx, &ne).map(Nf::Ne),
            Val::Closure(_) => panic!("readback: closure at base type"),
        },
        Ty::Arrow(dom, cod) => Delay::later(eta(ctx, dom, cod, value)).map(Nf::lam),
    }
}

/// The suspended η-expansion of a function value: weaken it, apply it to the
/// fresh variable and read the result back in the extended context.
pub fn eta(ctx: &Cxt, dom: &Ty, cod: &Ty, value: Val) -> Thunk<Nf> {
    let inner = ctx.extend(dom.clone());
    let cod = cod.clone();
    Thunk::new(move || {
        let inner = inner.clone();
        let cod = cod.clone();
        apply(weak_val(&value), Val::var(0)).bind(move |result| readback(&inner, &cod, result))
    })
}

/// Read back a neutral value, reading each spine argument at the type its
/// position demands from the head variable's type.
///
/// # Panics
///
/// If the head is out of scope or the spine is longer than its type allows.
pub fn nereadback(ctx: &Cxt, ne: &Ne<Val>) -> Delay<Ne<Nf>> {
    let mut head_ty = match ctx.lookup(ne.head) {
        Some(ty) => ty.clone(),
        None => panic!("nereadback: head #{} out of scope", ne.head.0),
    };
    let mut result = Delay::now(Ne::var(ne.head));
    for arg in &ne.spine {
        let Ty::Arrow(dom, cod) = head_ty else {
            panic!("nereadback: spine applies a base-typed head");
        };
        let ctx = ctx.clone();
        let arg = arg.clone();
        result = result.bind(move |m: Ne<Nf>| {
            readback(&ctx, &dom, arg.clone()).map(move |n| m.clone().app(n))
        });
        head_ty = (*cod).clone();
    }
    result
}

/// `eval t (ide Γ) >>= readback`.
pub fn nf(term: &Checked) -> Delay<Nf> {
    let ctx = term.ctx().clone();
    let ty = term.ty().clone();
    eval(term.term(), &ide(&ctx)).bind(move |v| readback(&ctx, &ty, v))
}

/// A normal form together with the delay steps spent on each phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizeReport {
    pub normal: Nf,
    pub eval_steps: u64,
    pub readback_steps: u64,
    pub total_steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("fuel exhausted after {fuel_spent} delay steps")]
pub struct FuelExhausted {
    pub fuel_spent: u64,
}

/// Normalize with at most `fuel` delay steps across both phases.
///
/// The evaluation phase runs first; whatever fuel it leaves is available to
/// readback. Running out of fuel is an ordinary result.
pub fn normalize(term: &Checked, fuel: u64) -> Result<NormalizeReport, FuelExhausted> {
    let value = match eval(term.term(), &ide(term.ctx())).converge(fuel) {
        Convergence::Converged { value, steps } => (value, steps),
        Convergence::Diverged { .. } => return Err(FuelExhausted { fuel_spent: fuel }),
    };
    let (value, eval_steps) = value;
    match readback(term.ctx(), term.ty(), value).converge(fuel - eval_steps) {
        Convergence::Converged {
            value: normal,
            steps: readback_steps,
        } => Ok(NormalizeReport {
            normal,
            eval_steps,
            readback_steps,
            total_steps: eval_steps + readback_steps,
        }),
        Convergence::Diverged { .. } => Err(FuelExhausted { fuel_spent: fuel }),
    }
}
