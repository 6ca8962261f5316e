//! Deterministic enumeration driver with an optional data-parallel backend.
//!
//! Entailment checking walks a large indexed space of classical states. The
//! scan below evaluates indices either sequentially or, with the `parallel`
//! feature (on by default), partitioned across rayon workers in fixed-size
//! blocks. Either way the outcome is deterministic: the terminal event with
//! the lowest enumeration index wins, exactly as in a sequential
//! left-to-right scan.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution backend selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        ExecMode::Parallel
    }

    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        ExecMode::Sequential
    }
}

/// Per-index result of the scanned evaluation.
pub enum Step<T> {
    /// Stop the scan: a witness or an error at this index.
    Terminal(T),
    /// Index evaluated and passed; `exact` records whether the evaluation
    /// was free of sampling.
    Pass { exact: bool },
    /// Index filtered out (did not satisfy the hypotheses).
    Skip,
}

/// Outcome of a full scan.
#[derive(Debug, PartialEq)]
pub enum ScanOutcome<T> {
    /// The lowest-index terminal event.
    Terminal { index: u64, value: T },
    Completed { passed: u64, skipped: u64, exact: bool },
}

#[cfg(feature = "parallel")]
const BLOCK: u64 = 1 << 14;

/// Evaluates `f` on every index in `0..total` honouring sequential
/// first-terminal semantics.
pub fn scan<T: Send>(
    total: u64,
    mode: ExecMode,
    f: impl Fn(u64) -> Step<T> + Sync,
) -> ScanOutcome<T> {
    match mode {
        ExecMode::Sequential => scan_sequential(total, f),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => scan_parallel(total, f),
    }
}

pub fn scan_sequential<T>(total: u64, f: impl Fn(u64) -> Step<T>) -> ScanOutcome<T> {
    let mut passed = 0u64;
    let mut skipped = 0u64;
    let mut exact = true;
    for index in 0..total {
        match f(index) {
            Step::Terminal(value) => return ScanOutcome::Terminal { index, value },
            Step::Pass { exact: e } => {
                passed += 1;
                exact &= e;
            }
            Step::Skip => skipped += 1,
        }
    }
    ScanOutcome::Completed { passed, skipped, exact }
}

#[cfg(feature = "parallel")]
pub fn scan_parallel<T: Send>(total: u64, f: impl Fn(u64) -> Step<T> + Sync) -> ScanOutcome<T> {
    struct Acc<T> {
        terminal: Option<(u64, T)>,
        passed: u64,
        skipped: u64,
        exact: bool,
    }
    impl<T> Acc<T> {
        fn empty() -> Self {
            Acc { terminal: None, passed: 0, skipped: 0, exact: true }
        }
        fn merge(mut self, other: Self) -> Self {
            self.terminal = match (self.terminal, other.terminal) {
                (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
                (a, b) => a.or(b),
            };
            self.passed += other.passed;
            self.skipped += other.skipped;
            self.exact &= other.exact;
            self
        }
    }

    let mut passed = 0u64;
    let mut skipped = 0u64;
    let mut exact = true;
    let mut start = 0u64;
    while start < total {
        let end = (start + BLOCK).min(total);
        let acc = (start..end)
            .into_par_iter()
            .fold(Acc::empty, |mut acc, index| {
                // Work to the right of a terminal in this block is wasted but
                // harmless; the merge keeps the lowest index.
                match f(index) {
                    Step::Terminal(value) => {
                        let better = match &acc.terminal {
                            Some((i, _)) => index < *i,
                            None => true,
                        };
                        if better {
                            acc.terminal = Some((index, value));
                        }
                    }
                    Step::Pass { exact } => {
                        acc.passed += 1;
                        acc.exact &= exact;
                    }
                    Step::Skip => acc.skipped += 1,
                }
                acc
            })
            .reduce(Acc::empty, Acc::merge);
        if let Some((index, value)) = acc.terminal {
            return ScanOutcome::Terminal { index, value };
        }
        passed += acc.passed;
        skipped += acc.skipped;
        exact &= acc.exact;
        start = end;
    }
    ScanOutcome::Completed { passed, skipped, exact }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modes() -> Vec<ExecMode> {
        #[cfg(feature = "parallel")]
        {
            vec![ExecMode::Sequential, ExecMode::Parallel]
        }
        #[cfg(not(feature = "parallel"))]
        {
            vec![ExecMode::Sequential]
        }
    }

    #[test]
    fn first_terminal_wins_deterministically() {
        for mode in modes() {
            let out = scan(1_000_000, mode, |i| {
                if i % 37 == 36 {
                    Step::Terminal(i)
                } else {
                    Step::Pass { exact: true }
                }
            });
            assert_eq!(out, ScanOutcome::Terminal { index: 36, value: 36 });
        }
    }

    #[test]
    fn completed_aggregates_match() {
        for mode in modes() {
            let out: ScanOutcome<u8> = scan(100_000, mode, |i| {
                if i % 2 == 0 {
                    Step::Skip
                } else {
                    Step::Pass { exact: i % 1000 != 999 }
                }
            });
            assert_eq!(
                out,
                ScanOutcome::Completed { passed: 50_000, skipped: 50_000, exact: false }
            );
        }
    }

    #[test]
    fn empty_scan_is_exact() {
        for mode in modes() {
            let out: ScanOutcome<u8> = scan(0, mode, |_: u64| Step::Skip);
            assert_eq!(out, ScanOutcome::Completed { passed: 0, skipped: 0, exact: true });
        }
    }
}
