//! Expression-size guard.
//!
//! Polynomial products abort once a result would exceed the term limit. The
//! abort unwinds with a private payload that [`guarded`] turns back into
//! [`Error::ExpressionTooLarge`], so arithmetic operators can stay infallible.

use std::cell::Cell;
use std::panic::{self, AssertUnwindSafe};
use std::sync::Once;

use crate::error::{Error, Result};

pub const DEFAULT_TERM_LIMIT: usize = 1_000_000;

thread_local! {
    static TERM_LIMIT: Cell<usize> = const { Cell::new(DEFAULT_TERM_LIMIT) };
}

struct SizeLimitExceeded {
    terms: usize,
    limit: usize,
}

pub fn term_limit() -> usize {
    TERM_LIMIT.with(|c| c.get())
}

/// Runs `f` with a temporary term limit on the current thread.
pub fn with_term_limit<T>(limit: usize, f: impl FnOnce() -> T) -> T {
    let previous = TERM_LIMIT.with(|c| c.replace(limit));
    let out = panic::catch_unwind(AssertUnwindSafe(f));
    TERM_LIMIT.with(|c| c.set(previous));
    match out {
        Ok(v) => v,
        Err(payload) => panic::resume_unwind(payload),
    }
}

pub(crate) fn check_terms(terms: usize) {
    let limit = term_limit();
    if terms > limit {
        install_quiet_hook();
        panic::panic_any(SizeLimitExceeded { terms, limit });
    }
}

/// Evaluates `f`, converting a size-guard abort into an error.
pub fn guarded<T>(f: impl FnOnce() -> Result<T>) -> Result<T> {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(payload) => match payload.downcast::<SizeLimitExceeded>() {
            Ok(s) => Err(Error::ExpressionTooLarge {
                terms: s.terms,
                limit: s.limit,
            }),
            Err(other) => panic::resume_unwind(other),
        },
    }
}

// The default hook would print a backtrace banner for an abort that is
// reported as an ordinary error.
fn install_quiet_hook() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        let default = panic::take_hook();
        panic::set_hook(Box::new(move |info| {
            if info.payload().downcast_ref::<SizeLimitExceeded>().is_none() {
                default(info);
            }
        }));
    });
}
