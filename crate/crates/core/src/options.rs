use core::fmt;

/// Default relative singular-value cutoff used by every rank decision.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Default bound on exhaustive searches, expressed as a landmark count.
/// Searches are allowed roughly `2^(cap-1)` candidate evaluations.
pub const DEFAULT_SEARCH_CAP: usize = 24;

/// Per-call knobs shared by the combinatorial routines.
#[derive(Clone, Copy)]
pub struct Options<'a> {
    pub rank_tol: f64,
    pub search_cap: usize,
    pub cancel: Option<&'a dyn Fn() -> bool>,
}

impl Default for Options<'_> {
    fn default() -> Self {
        Options {
            rank_tol: DEFAULT_RANK_TOL,
            search_cap: DEFAULT_SEARCH_CAP,
            cancel: None,
        }
    }
}

impl<'a> Options<'a> {
    pub fn with_rank_tol(mut self, tol: f64) -> Self {
        self.rank_tol = tol;
        self
    }

    pub fn with_search_cap(mut self, cap: usize) -> Self {
        self.search_cap = cap;
        self
    }

    pub fn with_cancel(mut self, cancel: &'a dyn Fn() -> bool) -> Self {
        self.cancel = Some(cancel);
        self
    }

    pub(crate) fn check_cancel(&self) -> crate::Result<()> {
        match self.cancel {
            Some(f) if f() => Err(crate::Error::Cancelled),
            _ => Ok(()),
        }
    }

    /// Work budget for exhaustive searches.
    pub(crate) fn search_budget(&self) -> u128 {
        1u128 << self.search_cap.saturating_sub(1).min(120)
    }
}

impl fmt::Debug for Options<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Options")
            .field("rank_tol", &self.rank_tol)
            .field("search_cap", &self.search_cap)
            .field("cancel", &self.cancel.is_some())
            .finish()
    }
}
