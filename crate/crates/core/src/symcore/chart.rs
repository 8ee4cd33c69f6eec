use serde::{Deserialize, Serialize};

use super::parse::is_identifier;
use crate::error::{Error, Result};

/// Ordered coordinate names of a box chart in ℝⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    /// Names must be distinct identifiers; primes are reserved for
    /// internally generated coordinate copies.
    pub fn new<I, S>(names: I) -> Result<Chart>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) || n.contains('\'') {
                return Err(Error::InvalidChart(format!("`{n}` is not a valid coordinate name")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Chart { names })
    }

    /// The chart of a point.
    pub fn point() -> Chart {
        Chart { names: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// The same coordinates with `suffix` appended to every name.
    pub fn primed(&self, primes: usize) -> Vec<String> {
        let suffix = "'".repeat(primes);
        self.names.iter().map(|n| format!("{n}{suffix}")).collect()
    }
}

impl TryFrom<Vec<String>> for Chart {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Chart> {
        Chart::new(v)
    }
}

impl From<Chart> for Vec<String> {
    fn from(c: Chart) -> Self {
        c.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(Chart::new(["x", "x"]).is_err());
        assert!(Chart::new(["x'"]).is_err());
        assert!(Chart::new(["1x"]).is_err());
        assert_eq!(Chart::new(["x", "y"]).unwrap().dim(), 2);
        assert_eq!(Chart::point().dim(), 0);
    }
}
