//! Random well-typed terms, values and embeddings shared by the integration tests.

#![allow(dead_code)]

use delay_nbe::delay::Convergence;
use delay_nbe::nbe::eval;
use delay_nbe::semantics::{ide, Env, Ope, Val};
use delay_nbe::syntax::{infer_type, Checked, Cxt, Tm, Ty, Var};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub const MAX_SIZE: usize = 60;
pub const MAX_TY_DEPTH: usize = 4;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn star() -> Ty {
    Ty::Star
}

pub fn arr(a: Ty, b: Ty) -> Ty {
    Ty::arrow(a, b)
}

pub fn random_ty<R: Rng>(rng: &mut R, depth: usize) -> Ty {
    if depth == 0 || rng.random_bool(0.5) {
        Ty::Star
    } else {
        Ty::arrow(random_ty(rng, depth - 1), random_ty(rng, depth - 1))
    }
}

/// Split `ty` into its argument types and final result.
fn unroll(ty: &Ty) -> (Vec<Ty>, Ty) {
    let mut args = Vec::new();
    let mut ty = ty.clone();
    while let Ty::Arrow(dom, cod) = ty {
        args.push((*dom).clone());
        ty = (*cod).clone();
    }
    (args, ty)
}

/// Type-directed generator. Every context it works in either contains a
/// variable of base type or is only ever asked for arrow types whose
/// domains eventually introduce one, so base type is always inhabited.
struct Gen<'r, R> {
    rng: &'r mut R,
    budget: i64,
}

impl<R: Rng> Gen<'_, R> {
    fn term(&mut self, ctx: &mut Vec<Ty>, ty: &Ty) -> Tm {
        self.budget -= 1;
        let has_star = ctx.contains(&Ty::Star);
        if let Ty::Arrow(dom, cod) = ty {
            if !has_star || self.budget <= 0 || self.rng.random_bool(0.45) {
                return self.abs(ctx, dom, cod);
            }
        }
        debug_assert!(has_star);
        if self.budget > 0 {
            match self.rng.random_range(0..10) {
                0..=2 => {
                    // explicit β-redex
                    let s = random_ty(self.rng, 1);
                    ctx.push(s.clone());
                    let body = self.term(ctx, ty);
                    ctx.pop();
                    let arg = self.term(ctx, &s);
                    return Tm::app(Tm::abs(s, body), arg);
                }
                3..=4 => {
                    let s = random_ty(self.rng, 1);
                    let fun_ty = Ty::arrow(s.clone(), ty.clone());
                    if fun_ty.depth() <= MAX_TY_DEPTH {
                        let fun = self.term(ctx, &fun_ty);
                        let arg = self.term(ctx, &s);
                        return Tm::app(fun, arg);
                    }
                }
                _ => {}
            }
        }
        self.head(ctx, ty)
    }

    fn abs(&mut self, ctx: &mut Vec<Ty>, dom: &Ty, cod: &Ty) -> Tm {
        ctx.push(dom.clone());
        let body = self.term(ctx, cod);
        ctx.pop();
        Tm::abs(dom.clone(), body)
    }

    /// A variable applied to enough arguments to reach `ty`.
    fn head(&mut self, ctx: &mut Vec<Ty>, ty: &Ty) -> Tm {
        let mut candidates = Vec::new();
        for (pos, var_ty) in ctx.iter().enumerate() {
            let index = ctx.len() - 1 - pos;
            let (args, _) = unroll(var_ty);
            let mut rest = var_ty.clone();
            for n in 0..=args.len() {
                if rest == *ty {
                    candidates.push((index, args[..n].to_vec()));
                }
                if let Ty::Arrow(_, cod) = rest {
                    rest = (*cod).clone();
                }
            }
        }
        if self.budget <= 0 {
            // prefer the cheapest way out
            if let Some(min) = candidates.iter().map(|(_, a)| a.len()).min() {
                candidates.retain(|(_, a)| a.len() == min);
            }
        }
        match candidates.len() {
            0 => match ty {
                Ty::Arrow(dom, cod) => self.abs(ctx, dom, cod),
                Ty::Star => unreachable!("base type is always inhabited here"),
            },
            n => {
                let (index, args) = candidates.swap_remove(self.rng.random_range(0..n));
                let args: Vec<Tm> = args.iter().map(|a| self.term(ctx, a)).collect();
                Tm::apps(Tm::var(index), args)
            }
        }
    }
}

/// A random term of type `ty` in `ctx`, of roughly `budget` nodes.
pub fn random_term_of<R: Rng>(rng: &mut R, ctx: &Cxt, ty: &Ty, budget: i64) -> Tm {
    let mut scope = ctx.types().to_vec();
    Gen { rng, budget }.term(&mut scope, ty)
}

/// A random free-variable context that always contains a base-typed variable.
pub fn random_ctx<R: Rng>(rng: &mut R) -> Cxt {
    let mut types: Vec<Ty> = (0..rng.random_range(0..4))
        .map(|_| random_ty(rng, 2))
        .collect();
    let at = rng.random_range(0..=types.len());
    types.insert(at, Ty::Star);
    Cxt::from(types)
}

/// A random well-typed term of size at most [`MAX_SIZE`] whose type has depth
/// at most [`MAX_TY_DEPTH`]. About a third are closed.
pub fn random_checked<R: Rng>(rng: &mut R) -> Checked {
    loop {
        let (ctx, ty) = if rng.random_bool(0.35) {
            let mut doms: Vec<Ty> = (0..rng.random_range(0..3))
                .map(|_| random_ty(rng, 2))
                .collect();
            let at = rng.random_range(0..=doms.len());
            doms.insert(at, Ty::Star);
            (Cxt::empty(), Ty::arrows(doms, random_ty(rng, 1)))
        } else {
            (random_ctx(rng), random_ty(rng, 3))
        };
        if ty.depth() > MAX_TY_DEPTH {
            continue;
        }
        let budget = rng.random_range(3..=MAX_SIZE as i64);
        let term = random_term_of(rng, &ctx, &ty, budget);
        if term.size() > MAX_SIZE {
            continue;
        }
        let checked = infer_type(&ctx, &term).expect("generator produces well-typed terms");
        assert_eq!(checked.ty(), &ty);
        return checked;
    }
}

/// A value of type `ty` living in `ctx`, obtained by evaluating a random term.
pub fn random_val<R: Rng>(rng: &mut R, ctx: &Cxt, ty: &Ty) -> Val {
    assert!(ctx.types().contains(&Ty::Star));
    let budget = rng.random_range(1..25);
    let term = random_term_of(rng, ctx, ty, budget);
    match eval(&Arc::new(term), &ide(ctx)).converge(1_000_000) {
        Convergence::Converged { value, .. } => value,
        Convergence::Diverged { .. } => panic!("evaluation of a generated term diverged"),
    }
}

/// An environment for `gamma` whose values live in `delta`.
pub fn random_env<R: Rng>(rng: &mut R, delta: &Cxt, gamma: &Cxt) -> Env {
    gamma
        .types()
        .iter()
        .map(|ty| random_val(rng, delta, ty))
        .collect()
}

/// A random embedding of `ctx` into a larger context, returned with that context.
pub fn random_ope<R: Rng>(rng: &mut R, ctx: &Cxt) -> (Ope, Cxt) {
    fn build<R: Rng>(rng: &mut R, remaining: usize, inserts: &mut usize) -> Ope {
        if *inserts < 3 && rng.random_bool(0.3) {
            *inserts += 1;
            return build(rng, remaining, inserts).weak();
        }
        if remaining == 0 || rng.random_bool(0.15) {
            return Ope::Id;
        }
        build(rng, remaining - 1, inserts).lift()
    }
    let mut inserts = 0;
    let ope = build(rng, ctx.len(), &mut inserts);
    let inserted: Vec<Ty> = (0..inserts).map(|_| random_ty(rng, 2)).collect();
    let bigger = ope
        .extend_cxt(ctx, &mut inserted.into_iter())
        .expect("embedding fits the context");
    (ope, bigger)
}

/// The OPE typing judgement `bigger ≤ smaller`, checked independently of
/// `extend_cxt` by looking at where every variable lands.
pub fn ope_fits(ope: &Ope, bigger: &Cxt, smaller: &Cxt) -> bool {
    (0..smaller.len()).all(|i| {
        let image = ope.weaken_var(Var(i));
        bigger.lookup(image) == smaller.lookup(Var(i))
    })
}

/// `λf:(*->*). λx:*. f (f ... (f x))`
pub fn church(n: usize) -> Tm {
    let body = (0..n).fold(Tm::var(0), |acc, _| Tm::app(Tm::var(1), acc));
    Tm::abs(arr(star(), star()), Tm::abs(star(), body))
}

pub fn nat_ty() -> Ty {
    Ty::arrows([arr(star(), star()), star()], star())
}

/// `λm. λn. λf. λx. m f (n f x)` at Church numeral type.
pub fn church_add() -> Tm {
    let (m, n, f, x) = (3, 2, 1, 0);
    Tm::abs(
        nat_ty(),
        Tm::abs(
            nat_ty(),
            Tm::abs(
                arr(star(), star()),
                Tm::abs(
                    star(),
                    Tm::apps(
                        Tm::var(m),
                        [Tm::var(f), Tm::apps(Tm::var(n), [Tm::var(f), Tm::var(x)])],
                    ),
                ),
            ),
        ),
    )
}

/// `λm. λn. λf. m (n f)`
pub fn church_mul() -> Tm {
    let (m, n, f) = (2, 1, 0);
    Tm::abs(
        nat_ty(),
        Tm::abs(
            nat_ty(),
            Tm::abs(
                arr(star(), star()),
                Tm::app(Tm::var(m), Tm::app(Tm::var(n), Tm::var(f))),
            ),
        ),
    )
}

/// `S K K` instantiated at `* -> *`.
pub fn skk() -> Tm {
    let (a, b, c) = (star(), arr(star(), star()), star());
    let s = Tm::abs(
        Ty::arrows([a.clone(), b.clone()], c),
        Tm::abs(
            arr(a.clone(), b.clone()),
            Tm::abs(
                a.clone(),
                Tm::app(
                    Tm::app(Tm::var(2), Tm::var(0)),
                    Tm::app(Tm::var(1), Tm::var(0)),
                ),
            ),
        ),
    );
    let k1 = Tm::abs(a.clone(), Tm::abs(b, Tm::var(1)));
    let k2 = Tm::abs(a, Tm::abs(star(), Tm::var(1)));
    Tm::apps(s, [k1, k2])
}
