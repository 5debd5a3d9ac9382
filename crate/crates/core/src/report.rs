//! Line-oriented PASS/FAIL reports shared by the verification harnesses.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub title: String,
    /// Informational lines (orders, generators) printed before assertions.
    pub facts: Vec<String>,
    pub assertions: Vec<Assertion>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn fact(&mut self, line: impl Into<String>) {
        self.facts.push(line.into());
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    /// Appends another report's facts and assertions, prefixing names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        self.facts
            .extend(other.facts.into_iter().map(|f| format!("{prefix}: {f}")));
        self.assertions
            .extend(other.assertions.into_iter().map(|a| Assertion {
                name: format!("{prefix}/{}", a.name),
                ..a
            }));
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.title)?;
        for line in &self.facts {
            writeln!(f, "{line}")?;
        }
        for a in &self.assertions {
            let tag = if a.passed { "PASS" } else { "FAIL" };
            if a.detail.is_empty() {
                writeln!(f, "{tag} {}", a.name)?;
            } else {
                writeln!(f, "{tag} {}: {}", a.name, a.detail)?;
            }
        }
        Ok(())
    }
}
