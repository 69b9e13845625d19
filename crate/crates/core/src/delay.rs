//! The delay (partiality) monad.
//!
//! A `Delay<A>` is either a value available `Now`, or a `Later` layer holding
//! a suspended computation that yields another `Delay<A>` when forced. Building
//! a `Delay` never runs unbounded work: only [`Delay::converge`] and
//! [`Delay::bisim`] unfold `Later` layers, and both take an explicit bound.

use std::any::Any;
use std::fmt;
use std::sync::Arc;

/// Fuel used by convenience entry points when the caller does not pick one.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// A pure suspended computation producing the next layer of a [`Delay`].
///
/// Forcing is not memoized, so every force re-runs the suspension. Suspensions
/// must be pure for step counts to be deterministic.
pub struct Thunk<A>(Option<Repr<A>>);

type Suspension<A> = dyn Fn() -> Delay<A> + Send + Sync;

enum Repr<A> {
    Suspended(Arc<Suspension<A>>),
    /// A bind whose continuations have been flattened into a queue; `finish`
    /// recovers the typed result once the last continuation has run.
    Bound(Arc<Chain>, fn(Erased) -> A),
}

impl<A> Thunk<A> {
    pub fn new(suspended: impl Fn() -> Delay<A> + Send + Sync + 'static) -> Thunk<A> {
        Thunk(Some(Repr::Suspended(Arc::new(suspended))))
    }

    /// Run the suspension and expose the next layer.
    pub fn force(&self) -> Delay<A> {
        match self.0.as_ref().expect("thunk is only emptied by drop") {
            Repr::Suspended(suspended) => crate::stack::guard(|| suspended()),
            Repr::Bound(chain, finish) => crate::stack::guard(|| unerase(chain.step(), *finish)),
        }
    }
}

impl<A> Clone for Thunk<A> {
    fn clone(&self) -> Self {
        Thunk(self.0.as_ref().map(|repr| match repr {
            Repr::Suspended(suspended) => Repr::Suspended(Arc::clone(suspended)),
            Repr::Bound(chain, finish) => Repr::Bound(Arc::clone(chain), *finish),
        }))
    }
}

// Suspensions can capture other delays; releasing the last reference would
// otherwise recurse once per captured layer on the native stack.
impl<A> Drop for Thunk<A> {
    fn drop(&mut self) {
        if let Some(repr) = self.0.take() {
            crate::stack::guard(move || drop(repr));
        }
    }
}

// Type-erased machinery behind `bind`. A left-nested chain of binds
// `((m >>= k1) >>= k2) >>= ...` is kept as one suspended source plus a queue
// of continuations, so forcing a layer costs the same however deep the chain
// was built. Layers are consumed only from the source, which keeps step
// counts identical to the nested form.

type Erased = Box<dyn Any>;
type ErasedCont = Arc<dyn Fn(Erased) -> Step + Send + Sync>;

enum Step {
    Now(Erased),
    Later(Node),
}

#[derive(Clone)]
enum Node {
    Suspended(Arc<dyn Fn() -> Step + Send + Sync>),
    Bound(Arc<Chain>),
}

/// Invariant: `source` is never itself `Node::Bound`.
struct Chain {
    source: Node,
    conts: Conts,
}

impl Chain {
    fn step(&self) -> Step {
        let first = match &self.source {
            Node::Suspended(suspended) => suspended(),
            Node::Bound(chain) => chain.step(),
        };
        match first {
            Step::Later(next) => Step::Later(chain(next, self.conts.clone())),
            Step::Now(value) => run(value, self.conts.clone()),
        }
    }
}

/// Feed `value` through `conts` until one of them delays.
fn run(mut value: Erased, mut conts: Conts) -> Step {
    while let Some((cont, rest)) = conts.pop_front() {
        match cont(value) {
            Step::Now(next) => {
                value = next;
                conts = rest;
            }
            Step::Later(node) => return Step::Later(chain(node, rest)),
        }
    }
    Step::Now(value)
}

fn chain(node: Node, conts: Conts) -> Node {
    if conts.is_empty() {
        return node;
    }
    match node {
        Node::Suspended(_) => Node::Bound(Arc::new(Chain {
            source: node,
            conts,
        })),
        Node::Bound(inner) => Node::Bound(Arc::new(Chain {
            source: inner.source.clone(),
            conts: Conts::cat(inner.conts.clone(), conts),
        })),
    }
}

fn downcast<A: 'static>(value: Erased) -> A {
    match value.downcast::<A>() {
        Ok(value) => *value,
        Err(_) => unreachable!("continuation received a value of the wrong type"),
    }
}

fn erase<A: 'static>(computation: Delay<A>) -> Step {
    match computation {
        Delay::Now(value) => Step::Now(Box::new(value)),
        Delay::Later(pending) => Step::Later(erase_thunk(&pending)),
    }
}

fn erase_thunk<A: 'static>(pending: &Thunk<A>) -> Node {
    match pending.0.as_ref().expect("thunk is only emptied by drop") {
        Repr::Suspended(suspended) => {
            let suspended = Arc::clone(suspended);
            Node::Suspended(Arc::new(move || erase(suspended())))
        }
        Repr::Bound(chain, _) => Node::Bound(Arc::clone(chain)),
    }
}

fn unerase<A>(step: Step, finish: fn(Erased) -> A) -> Delay<A> {
    match step {
        Step::Now(value) => Delay::Now(finish(value)),
        Step::Later(node) => {
            let chain = match node {
                Node::Bound(chain) => chain,
                source @ Node::Suspended(_) => Arc::new(Chain {
                    source,
                    conts: Conts::empty(),
                }),
            };
            Delay::Later(Thunk(Some(Repr::Bound(chain, finish))))
        }
    }
}

/// A persistent catenable queue of continuations. Popping rotates the left
/// spine into the remainder, so draining a queue built by repeated
/// appending costs linear time overall.
#[derive(Clone, Default)]
struct Conts(Option<Arc<ContsNode>>);

enum ContsNode {
    Leaf(ErasedCont),
    Cat(Conts, Conts),
}

impl Conts {
    fn empty() -> Conts {
        Conts(None)
    }

    fn one(cont: ErasedCont) -> Conts {
        Conts(Some(Arc::new(ContsNode::Leaf(cont))))
    }

    fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    fn cat(front: Conts, back: Conts) -> Conts {
        match (front.is_empty(), back.is_empty()) {
            (true, _) => back,
            (_, true) => front,
            _ => Conts(Some(Arc::new(ContsNode::Cat(front, back)))),
        }
    }

    fn pop_front(&self) -> Option<(ErasedCont, Conts)> {
        let mut node = Arc::clone(self.0.as_ref()?);
        let mut rest = Conts::empty();
        loop {
            let next = match node.as_ref() {
                ContsNode::Leaf(cont) => return Some((Arc::clone(cont), rest)),
                ContsNode::Cat(front, back) => {
                    rest = Conts::cat(back.clone(), rest);
                    Arc::clone(front.0.as_ref().expect("concatenation sides are non-empty"))
                }
            };
            node = next;
        }
    }
}

// Queues can be tens of thousands of nodes deep.
impl Drop for Conts {
    fn drop(&mut self) {
        let mut pending: Vec<Arc<ContsNode>> = self.0.take().into_iter().collect();
        while let Some(node) = pending.pop() {
            if let Ok(ContsNode::Cat(mut front, mut back)) = Arc::try_unwrap(node) {
                pending.extend(front.0.take());
                pending.extend(back.0.take());
            }
        }
    }
}

impl<A> fmt::Debug for Thunk<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<suspended>")
    }
}

/// A computation that yields an `A` after zero or more delay steps, or never.
pub enum Delay<A> {
    Now(A),
    Later(Thunk<A>),
}

impl<A: Clone> Clone for Delay<A> {
    fn clone(&self) -> Self {
        match self {
            Delay::Now(value) => Delay::Now(value.clone()),
            Delay::Later(thunk) => Delay::Later(thunk.clone()),
        }
    }
}

impl<A: fmt::Debug> fmt::Debug for Delay<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delay::Now(value) => f.debug_tuple("Now").field(value).finish(),
            Delay::Later(thunk) => f.debug_tuple("Later").field(thunk).finish(),
        }
    }
}

/// Result of observing a [`Delay`] with a bounded amount of fuel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Convergence<A> {
    /// The computation reached `Now(value)` after unwrapping `steps` layers.
    Converged { value: A, steps: u64 },
    /// Every unit of fuel was spent on `Later` layers without reaching a value.
    Diverged { fuel_spent: u64 },
}

impl<A> Convergence<A> {
    pub fn is_converged(&self) -> bool {
        matches!(self, Convergence::Converged { .. })
    }

    pub fn value(self) -> Option<A> {
        match self {
            Convergence::Converged { value, .. } => Some(value),
            Convergence::Diverged { .. } => None,
        }
    }

    pub fn steps(&self) -> Option<u64> {
        match self {
            Convergence::Converged { steps, .. } => Some(*steps),
            Convergence::Diverged { .. } => None,
        }
    }

    pub fn map<B>(self, f: impl FnOnce(A) -> B) -> Convergence<B> {
        match self {
            Convergence::Converged { value, steps } => Convergence::Converged {
                value: f(value),
                steps,
            },
            Convergence::Diverged { fuel_spent } => Convergence::Diverged { fuel_spent },
        }
    }
}

fn bind_cont<A: 'static, B: 'static>(
    computation: Delay<A>,
    cont: Arc<dyn Fn(A) -> Delay<B> + Send + Sync>,
) -> Delay<B> {
    match computation {
        Delay::Now(value) => cont(value),
        Delay::Later(pending) => {
            let erased: ErasedCont = Arc::new(move |value| erase(cont(downcast::<A>(value))));
            let node = chain(erase_thunk(&pending), Conts::one(erased));
            unerase(Step::Later(node), downcast::<B>)
        }
    }
}

impl<A: 'static> Delay<A> {
    pub fn now(value: A) -> Delay<A> {
        Delay::Now(value)
    }

    pub fn later(pending: Thunk<A>) -> Delay<A> {
        Delay::Later(pending)
    }

    /// One `Later` layer around a suspension given as a closure.
    pub fn suspend(pending: impl Fn() -> Delay<A> + Send + Sync + 'static) -> Delay<A> {
        Delay::Later(Thunk::new(pending))
    }

    /// The computation that never yields: forcing it returns itself again.
    pub fn never() -> Delay<A> {
        Delay::suspend(Delay::never)
    }

    /// Monadic bind. `Now` feeds the continuation immediately; `Later` defers
    /// the bind under the suspension, so delay steps of both sides add up.
    pub fn bind<B: 'static>(
        self,
        cont: impl Fn(A) -> Delay<B> + Send + Sync + 'static,
    ) -> Delay<B> {
        bind_cont(self, Arc::new(cont))
    }

    /// Functorial map; adds no delay.
    pub fn map<B: 'static>(self, f: impl Fn(A) -> B + Send + Sync + 'static) -> Delay<B> {
        self.bind(move |value| Delay::Now(f(value)))
    }

    /// Unwrap at most `fuel` `Later` layers looking for a value.
    pub fn converge(self, fuel: u64) -> Convergence<A> {
        let mut current = self;
        let mut steps = 0;
        loop {
            match current {
                Delay::Now(value) => return Convergence::Converged { value, steps },
                Delay::Later(pending) => {
                    if steps == fuel {
                        return Convergence::Diverged { fuel_spent: fuel };
                    }
                    steps += 1;
                    current = pending.force();
                }
            }
        }
    }

    /// Strong bisimilarity observed at most `depth` `Later` layers deep.
    ///
    /// `Now` values must agree under `eq` at the same depth. Two computations
    /// that are both still `Later` when the depth bound is reached compare equal.
    pub fn bisim_by(&self, other: &Delay<A>, depth: u64, eq: impl Fn(&A, &A) -> bool) -> bool {
        let (mut left, mut right) = match (self, other) {
            (Delay::Now(a), Delay::Now(b)) => return eq(a, b),
            (Delay::Later(a), Delay::Later(b)) => (a.clone(), b.clone()),
            _ => return false,
        };
        for _ in 0..depth {
            match (left.force(), right.force()) {
                (Delay::Now(a), Delay::Now(b)) => return eq(&a, &b),
                (Delay::Later(a), Delay::Later(b)) => {
                    left = a;
                    right = b;
                }
                _ => return false,
            }
        }
        true
    }
}

impl<A: PartialEq + 'static> Delay<A> {
    /// [`Delay::bisim_by`] with `==` on values.
    pub fn bisim(&self, other: &Delay<A>, depth: u64) -> bool {
        self.bisim_by(other, depth, |a, b| a == b)
    }
}

pub fn now<A: 'static>(value: A) -> Delay<A> {
    Delay::now(value)
}

pub fn later<A: 'static>(pending: Thunk<A>) -> Delay<A> {
    Delay::later(pending)
}

pub fn never<A: 'static>() -> Delay<A> {
    Delay::never()
}
