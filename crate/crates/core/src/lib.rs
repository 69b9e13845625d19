//! Normalization by evaluation for the simply-typed lambda calculus, with
//! evaluation and readback returning values in the delay monad.
//!
//! Termination is never assumed: [`nbe::nf`] builds a delayed normal form
//! without running it, and [`nbe::normalize`] observes it with explicit fuel.
//!
//! ```
//! use delay_nbe::frontend::{elaborate, print_nf};
//! use delay_nbe::nbe::normalize;
//!
//! let term = elaborate(&[], "(\\f:*->*. f) (\\x:*. x)").unwrap();
//! let report = normalize(&term, 100).unwrap();
//! assert_eq!(print_nf(&[], term.ty(), &report.normal).unwrap(), "\\x0:*. x0");
//! assert_eq!(report.total_steps, 3);
//! ```

pub mod cli;
pub mod delay;
pub mod frontend;
pub mod nbe;
pub mod oracle;
pub mod semantics;
mod stack;
pub mod syntax;

pub use delay::{Convergence, Delay, Thunk, DEFAULT_FUEL};
pub use nbe::{nf, normalize, FuelExhausted, NormalizeReport};
pub use semantics::{Env, Ope, Val, Weaken};
pub use syntax::{infer_type, Checked, Cxt, Ne, Nf, Tm, Ty, TypeError, Var};
