//! Named identifiers with uniqueness tags and a deterministic fresh-name
//! supply. Two identifiers are equal iff both name and tag are equal; the
//! printed form `name#tag` round-trips through the parser's renderer.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Ident {
    pub name: String,
    pub tag: u32,
}

impl Ident {
    pub fn new(name: impl Into<String>, tag: u32) -> Self {
        Ident { name: name.into(), tag }
    }

    /// Source-level identifier (tag 0), as produced by the parser before
    /// scope resolution.
    pub fn source(name: impl Into<String>) -> Self {
        Ident::new(name, 0)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tag == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}#{}", self.name, self.tag)
        }
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Smallest tag for `base` that does not collide with `avoid`.
/// Deterministic given `base` and `avoid`; repeated calls with growing
/// avoid sets never collide.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Ident>) -> Ident {
    let mut tag = 0u32;
    loop {
        let candidate = Ident::new(base, tag);
        if !avoid.contains(&candidate) {
            return candidate;
        }
        tag += 1;
    }
}

/// Monotone fresh-name supply for one checking session. The counter is the
/// only mutable state in the whole pipeline; a session owns exactly one.
#[derive(Debug, Default, Clone)]
pub struct Supply {
    next: u32,
}

impl Supply {
    pub fn new() -> Self {
        Supply { next: 1 }
    }

    /// Fresh identifier from a reserved tag space (tags grow monotonically,
    /// never 0, so supply names cannot collide with source names of a
    /// different tag and never repeat within a session).
    pub fn fresh(&mut self, base: &str) -> Ident {
        let tag = self.next;
        self.next += 1;
        Ident::new(base, tag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_is_name_and_tag() {
        assert_eq!(Ident::new("z", 0), Ident::new("z", 0));
        assert_ne!(Ident::new("z", 0), Ident::new("z", 1));
        assert_ne!(Ident::new("z", 0), Ident::new("y", 0));
    }

    #[test]
    fn fresh_name_picks_smallest_unused() {
        let mut avoid = BTreeSet::new();
        assert_eq!(fresh_name("z", &avoid), Ident::new("z", 0));
        avoid.insert(Ident::new("z", 0));
        assert_eq!(fresh_name("z", &avoid), Ident::new("z", 1));
    }

    #[test]
    fn fresh_name_never_collides_over_many_calls() {
        let mut avoid = BTreeSet::new();
        for _ in 0..1000 {
            let id = fresh_name("z", &avoid);
            assert!(!avoid.contains(&id));
            avoid.insert(id);
        }
        assert_eq!(avoid.len(), 1000);
    }

    #[test]
    fn supply_is_monotone() {
        let mut s = Supply::new();
        let a = s.fresh("x");
        let b = s.fresh("x");
        assert_ne!(a, b);
        assert!(a.tag < b.tag);
    }
}
