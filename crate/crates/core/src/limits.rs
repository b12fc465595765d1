/// Default cap on the number of formulas or candidates any one enumeration may
/// produce before aborting.
pub const DEFAULT_CEILING: usize = 250_000;

/// Default number of children of a generated `And`/`Or` node.
pub const DEFAULT_WIDTH_CAP: usize = 2;

/// Default cap on the number of disjuncts a normal form may have.
pub const DEFAULT_DISJUNCT_CEILING: usize = 4096;

/// Resource bounds shared by all enumerating operations.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Limits {
    pub width_cap: usize,
    pub ceiling: usize,
    pub disjunct_ceiling: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            width_cap: DEFAULT_WIDTH_CAP,
            ceiling: DEFAULT_CEILING,
            disjunct_ceiling: DEFAULT_DISJUNCT_CEILING,
        }
    }
}

impl Limits {
    /// Defaults, with `POSLOG_CEILING` overriding the count ceiling.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        if let Some(c) = std::env::var("POSLOG_CEILING")
            .ok()
            .and_then(|s| s.trim().parse().ok())
        {
            l.ceiling = c;
        }
        l
    }

    pub fn with_width_cap(mut self, w: usize) -> Self {
        self.width_cap = w;
        self
    }

    pub fn with_ceiling(mut self, c: usize) -> Self {
        self.ceiling = c;
        self
    }
}
