/// Enumeration caps shared by the classifiers, the solver and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest `|D|^n` enumerated for solution sets and the BFS oracle.
    pub max_enum: u128,
    /// Largest arity for identification enumeration (Bell numbers grow fast).
    pub scb_arity: usize,
    /// Largest arity for the forbidden-pattern and orientation searches.
    pub pattern_arity: usize,
    /// Largest arity accepted by the expressibility check.
    pub express_arity: usize,
    /// Largest number of candidate atoms in the expressibility check.
    pub express_atoms: u128,
    /// Largest domain for the exhaustive order search (`|D|!` orders).
    pub order_domain: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enum: 1 << 22,
            scb_arity: 10,
            pattern_arity: 12,
            express_arity: 8,
            express_atoms: 1 << 20,
            order_domain: 8,
        }
    }
}

impl Limits {
    /// Sets every arity guard to `arity`.
    pub fn with_max_arity(mut self, arity: usize) -> Self {
        self.scb_arity = arity;
        self.pattern_arity = arity;
        self.express_arity = arity;
        self
    }

    pub fn with_max_enum(mut self, max_enum: u128) -> Self {
        self.max_enum = max_enum;
        self
    }
}
