use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A single broken rule, with a human-readable detail string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation<R> {
    pub rule: R,
    pub detail: String,
}

/// Outcome of a structural validation. Problems are collected, never raised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport<R> {
    pub violations: Vec<Violation<R>>,
}

impl<R> Default for ValidationReport<R> {
    fn default() -> Self {
        Self { violations: Vec::new() }
    }
}

impl<R: Copy + PartialEq> ValidationReport<R> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, rule: R, detail: impl Into<String>) {
        self.violations.push(Violation { rule, detail: detail.into() });
    }

    pub fn has(&self, rule: R) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl<R: fmt::Display> fmt::Display for ValidationReport<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.rule, v.detail)?;
        }
        Ok(())
    }
}
