/// Resource caps shared by the enumeration-based operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on models (or marking/structure pairs) a search may examine.
    pub max_evaluations: u64,
    /// Upper bound on the number of keys (`k^|S|`) of a neighborhood or
    /// selection table.
    pub max_table_keys: u64,
    /// Denominator used when enumerating probability distributions.
    pub granularity: u32,
}

impl Limits {
    pub const DEFAULT_MAX_EVALUATIONS: u64 = 50_000_000;
    pub const DEFAULT_MAX_TABLE_KEYS: u64 = 10_000;
    pub const DEFAULT_GRANULARITY: u32 = 2;
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_evaluations: Self::DEFAULT_MAX_EVALUATIONS,
            max_table_keys: Self::DEFAULT_MAX_TABLE_KEYS,
            granularity: Self::DEFAULT_GRANULARITY,
        }
    }
}
