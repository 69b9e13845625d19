//! Reference normalizer by substitution: leftmost-outermost β-reduction to
//! β-normal form, followed by type-directed η-expansion.
//!
//! Shares no code path with [`crate::nbe`]; the two are compared in tests.

use std::sync::Arc;

use thiserror::Error;

use crate::stack;
use crate::syntax::{Checked, Cxt, Ne, Nf, Tm, Ty, Var};

pub const DEFAULT_MAX_REDUCTIONS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("shifting variable #{index} by {by} makes it negative")]
    NegativeIndex { index: usize, by: isize },
    #[error("no normal form within {limit} β-reductions")]
    LimitExceeded { limit: u64 },
    #[error("cannot η-expand: {0}")]
    IllFormed(&'static str),
}

/// Add `by` to every variable at or above `cutoff`.
pub fn shift(by: isize, cutoff: usize, term: &Tm) -> Result<Tm, OracleError> {
    stack::guard(|| shift_in(by, cutoff, term))
}

fn shift_in(by: isize, cutoff: usize, term: &Tm) -> Result<Tm, OracleError> {
    Ok(match term {
        Tm::Var(Var(k)) if *k >= cutoff => {
            let shifted = k
                .checked_add_signed(by)
                .ok_or(OracleError::NegativeIndex { index: *k, by })?;
            Tm::var(shifted)
        }
        Tm::Var(_) => term.clone(),
        Tm::Abs(dom, body) => Tm::abs(dom.clone(), shift(by, cutoff + 1, body)?),
        Tm::App(fun, arg) => Tm::app(shift(by, cutoff, fun)?, shift(by, cutoff, arg)?),
    })
}

/// Replace index `j` with `s` in `term`, removing that binder: indices above
/// `j` move down by one and `s` is shifted as it passes under binders.
pub fn subst(term: &Tm, j: usize, s: &Tm) -> Tm {
    stack::guard(|| match term {
        Tm::Var(Var(k)) if *k == j => s.clone(),
        Tm::Var(Var(k)) if *k > j => Tm::var(k - 1),
        Tm::Var(_) => term.clone(),
        Tm::Abs(dom, body) => {
            let s = shift(1, 0, s).expect("upward shifts never go negative");
            Tm::abs(dom.clone(), subst(body, j + 1, &s))
        }
        Tm::App(fun, arg) => Tm::app(subst(fun, j, s), subst(arg, j, s)),
    })
}

/// One leftmost-outermost β-step, or `None` when `term` is β-normal.
pub fn beta_step(term: &Tm) -> Option<Tm> {
    stack::guard(|| match term {
        Tm::Var(_) => None,
        Tm::Abs(dom, body) => beta_step(body).map(|body| Tm::abs(dom.clone(), body)),
        Tm::App(fun, arg) => {
            if let Tm::Abs(_, body) = fun.as_ref() {
                return Some(subst(body, 0, arg));
            }
            if let Some(fun) = beta_step(fun) {
                return Some(Tm::App(Arc::new(fun), Arc::clone(arg)));
            }
            beta_step(arg).map(|arg| Tm::App(Arc::clone(fun), Arc::new(arg)))
        }
    })
}

/// Reduce to β-normal form using at most `max_reductions` steps.
pub fn beta_normalize(term: &Tm, max_reductions: u64) -> Result<Tm, OracleError> {
    let mut current = term.clone();
    for _ in 0..max_reductions {
        match beta_step(&current) {
            Some(next) => current = next,
            None => return Ok(current),
        }
    }
    match beta_step(&current) {
        None => Ok(current),
        Some(_) => Err(OracleError::LimitExceeded {
            limit: max_reductions,
        }),
    }
}

/// η-expand a β-normal term of type `ty` in `ctx` into its η-long form.
pub fn eta_expand(ctx: &Cxt, ty: &Ty, term: &Tm) -> Result<Nf, OracleError> {
    eta_expand_in(&mut ctx.clone(), ty, term)
}

fn eta_expand_in(ctx: &mut Cxt, ty: &Ty, term: &Tm) -> Result<Nf, OracleError> {
    stack::guard(|| match ty {
        Ty::Arrow(dom, cod) => {
            let body = match term {
                Tm::Abs(_, body) => body.as_ref().clone(),
                _ => Tm::app(shift(1, 0, term)?, Tm::var(0)),
            };
            ctx.push((**dom).clone());
            let body = eta_expand_in(ctx, cod, &body);
            ctx.pop();
            Ok(Nf::lam(body?))
        }
        Ty::Star => {
            let mut args = Vec::new();
            let mut head = term;
            while let Tm::App(fun, arg) = head {
                args.push(arg.as_ref());
                head = fun;
            }
            let Tm::Var(x) = head else {
                return Err(OracleError::IllFormed("base-typed term is not neutral"));
            };
            let mut head_ty = ctx
                .lookup(*x)
                .ok_or(OracleError::IllFormed("variable out of scope"))?
                .clone();
            let mut spine = Vec::with_capacity(args.len());
            for arg in args.into_iter().rev() {
                let Ty::Arrow(dom, cod) = head_ty else {
                    return Err(OracleError::IllFormed("too many arguments"));
                };
                spine.push(eta_expand_in(ctx, &dom, arg)?);
                head_ty = (*cod).clone();
            }
            if head_ty != Ty::Star {
                return Err(OracleError::IllFormed("neutral does not reach base type"));
            }
            Ok(Nf::Ne(Ne::new(*x, spine)))
        }
    })
}

/// The βη-long normal form of a checked term.
pub fn oracle_nf(term: &Checked, max_reductions: u64) -> Result<Nf, OracleError> {
    let normal = beta_normalize(term.term(), max_reductions)?;
    eta_expand(term.ctx(), term.ty(), &normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::infer_type;

    fn star() -> Ty {
        Ty::Star
    }

    fn id_ty() -> Ty {
        Ty::arrow(star(), star())
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(1, 0, &Tm::var(0)).unwrap(), Tm::var(1));
        let bound = Tm::abs(star(), Tm::var(0));
        assert_eq!(shift(1, 0, &bound).unwrap(), bound);
        assert_eq!(
            shift(1, 0, &Tm::abs(star(), Tm::var(1))).unwrap(),
            Tm::abs(star(), Tm::var(2))
        );
        assert_eq!(
            shift(-1, 0, &Tm::var(0)),
            Err(OracleError::NegativeIndex { index: 0, by: -1 })
        );
    }

    #[test]
    fn subst_examples() {
        let s = Tm::app(Tm::var(3), Tm::var(4));
        assert_eq!(subst(&Tm::var(0), 0, &s), s);
        assert_eq!(
            subst(&Tm::abs(star(), Tm::var(1)), 0, &Tm::var(5)),
            Tm::abs(star(), Tm::var(6))
        );
        assert_eq!(subst(&Tm::var(1), 0, &s), Tm::var(0));
    }

    #[test]
    fn beta_normalize_examples() {
        let redex = Tm::app(Tm::abs(star(), Tm::var(0)), Tm::var(0));
        assert_eq!(beta_normalize(&redex, 10).unwrap(), Tm::var(0));
        let id = Tm::abs(star(), Tm::var(0));
        assert_eq!(beta_normalize(&id, 10).unwrap(), id);
    }

    #[test]
    fn skk_is_identity() {
        // S : (*->(*->*)->*) -> (*->*->*) -> *->*
        let a = star();
        let b = id_ty();
        let c = star();
        let s = Tm::abs(
            Ty::arrows([a.clone(), b.clone()], c.clone()),
            Tm::abs(
                Ty::arrow(a.clone(), b.clone()),
                Tm::abs(
                    a.clone(),
                    Tm::app(
                        Tm::app(Tm::var(2), Tm::var(0)),
                        Tm::app(Tm::var(1), Tm::var(0)),
                    ),
                ),
            ),
        );
        let k1 = Tm::abs(a.clone(), Tm::abs(b.clone(), Tm::var(1)));
        let k2 = Tm::abs(a.clone(), Tm::abs(star(), Tm::var(1)));
        let skk = Tm::apps(s, [k1, k2]);
        let checked = infer_type(&Cxt::empty(), &skk).unwrap();
        assert_eq!(checked.ty(), &id_ty());
        assert_eq!(
            beta_normalize(&skk, 100).unwrap(),
            Tm::abs(star(), Tm::var(0))
        );
    }

    #[test]
    fn limit_is_reported() {
        let redex = Tm::app(Tm::abs(star(), Tm::var(0)), Tm::var(0));
        assert_eq!(
            beta_normalize(&redex, 0),
            Err(OracleError::LimitExceeded { limit: 0 })
        );
        assert_eq!(beta_normalize(&Tm::var(0), 0), Ok(Tm::var(0)));
    }

    #[test]
    fn eta_expand_examples() {
        let ctx = Cxt::from(vec![star()]);
        assert_eq!(eta_expand(&ctx, &star(), &Tm::var(0)).unwrap(), Nf::var(0));
        let ctx = Cxt::from(vec![id_ty()]);
        assert_eq!(
            eta_expand(&ctx, &id_ty(), &Tm::var(0)).unwrap(),
            Nf::lam(Nf::neutral(1, vec![Nf::var(0)]))
        );
        assert_eq!(
            eta_expand(&Cxt::empty(), &id_ty(), &Tm::abs(star(), Tm::var(0))).unwrap(),
            Nf::lam(Nf::var(0))
        );
    }

    #[test]
    fn oracle_nf_examples() {
        let id = infer_type(&Cxt::empty(), &Tm::abs(star(), Tm::var(0))).unwrap();
        assert_eq!(oracle_nf(&id, 10).unwrap(), Nf::lam(Nf::var(0)));
        let f = infer_type(&Cxt::from(vec![id_ty()]), &Tm::var(0)).unwrap();
        assert_eq!(
            oracle_nf(&f, 10).unwrap(),
            Nf::lam(Nf::neutral(1, vec![Nf::var(0)]))
        );
    }
}
