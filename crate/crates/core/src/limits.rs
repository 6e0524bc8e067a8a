//! Resource limits for runaway symbolic expansions.
//!
//! A thread-local budget is installed by the session runner (and by anything
//! else that wants a bound). Operator multiplication and Ore division consult
//! it; a breach unwinds with a `LimitBreach` payload that `guarded` converts
//! back into a value. Outside a `guarded` scope no limit applies.

use std::cell::Cell;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Cap on operator order.
    pub max_order: u32,
    /// Cap on the number of stored operator terms.
    pub max_terms: usize,
}

pub const DEFAULT_MAX_ORDER: u32 = 16;
pub const DEFAULT_MAX_TERMS: usize = 200_000;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: DEFAULT_MAX_ORDER,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitBreach {
    pub what: String,
    pub value: u64,
    pub limit: u64,
}

impl fmt::Display for LimitBreach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "resource limit exceeded: {} reached {} (limit {})",
            self.what, self.value, self.limit
        )
    }
}

thread_local! {
    static ACTIVE: Cell<Option<Limits>> = const { Cell::new(None) };
}

/// Run `f` with `limits` installed on this thread. Returns `Err(LimitBreach)`
/// if the computation blew the budget.
pub fn guarded<T>(limits: Limits, f: impl FnOnce() -> T + std::panic::UnwindSafe) -> Result<T, LimitBreach> {
    struct Restore(Option<Limits>);
    impl Drop for Restore {
        fn drop(&mut self) {
            ACTIVE.with(|c| c.set(self.0));
        }
    }
    let prev = ACTIVE.with(|c| c.replace(Some(limits)));
    let _restore = Restore(prev);
    match std::panic::catch_unwind(f) {
        Ok(v) => Ok(v),
        Err(payload) => match payload.downcast::<LimitBreach>() {
            Ok(breach) => Err(*breach),
            Err(other) => std::panic::resume_unwind(other),
        },
    }
}

/// Check a freshly built operator against the active budget.
pub(crate) fn check(order: u32, terms: usize) {
    let Some(limits) = ACTIVE.with(|c| c.get()) else {
        return;
    };
    if order > limits.max_order {
        std::panic::panic_any(LimitBreach {
            what: "operator order".to_string(),
            value: order as u64,
            limit: limits.max_order as u64,
        });
    }
    if terms > limits.max_terms {
        std::panic::panic_any(LimitBreach {
            what: "operator term count".to_string(),
            value: terms as u64,
            limit: limits.max_terms as u64,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breach_is_reported_and_budget_restored() {
        let r = guarded(
            Limits {
                max_order: 2,
                max_terms: 10,
            },
            || check(5, 1),
        );
        assert!(matches!(r, Err(LimitBreach { .. })));
        // No budget outside the scope.
        check(100, 1_000_000_000);
    }
}
