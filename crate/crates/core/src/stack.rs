//! Stack growth for the recursive parts of evaluation, readback and forcing.

const RED_ZONE: usize = 128 * 1024;
const SEGMENT: usize = 8 * 1024 * 1024;

/// Run `f`, first moving to a fresh stack segment if less than the red zone remains.
#[inline]
pub(crate) fn guard<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(RED_ZONE, SEGMENT, f)
}
