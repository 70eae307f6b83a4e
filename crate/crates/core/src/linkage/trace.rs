use serde::{Deserialize, Serialize};

/// One applied rewrite with the potential before and after, compared
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub stage: String,
    pub rule: String,
    pub before: Vec<i64>,
    pub after: Vec<i64>,
}

impl TraceRecord {
    pub fn improved(&self) -> bool {
        self.after < self.before
    }
}
