//! Elimination records and replay reports.
//!
//! Reports are plain data with a stable wire format: big integers serialize
//! as decimal strings (lossless for any consumer), maps are ordered, and the
//! record list is sorted by (k, r), so two runs of the same pipeline produce
//! byte-identical serializations once the timestamp is stripped.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Which test disposed of a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    TailBound,
    HeightBoundExceeded,
    QuotientTooSmall,
    DivisibilityFailed,
    NotACandidate,
    /// A candidate no test disposed of. Must never appear in a closed
    /// report; it marks an implementation bug or a genuine gap.
    Survived,
}

impl Verdict {
    pub fn is_eliminating(self) -> bool {
        !matches!(self, Verdict::Survived)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::TailBound => "tail_bound",
            Verdict::HeightBoundExceeded => "height_bound_exceeded",
            Verdict::QuotientTooSmall => "quotient_too_small",
            Verdict::DivisibilityFailed => "divisibility_failed",
            Verdict::NotACandidate => "not_a_candidate",
            Verdict::Survived => "survived",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-candidate verdict with the witnessing quantities.
///
/// `a`/`b` carry the decomposition `a^k b = r^k - 1` when one exists (the
/// maximal admissible `a`). Evidence values are decimal strings; signed
/// quantities are permitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationRecord {
    pub k: u32,
    #[serde(with = "biguint_decimal")]
    pub r: BigUint,
    #[serde(with = "biguint_decimal_opt")]
    pub a: Option<BigUint>,
    #[serde(with = "biguint_decimal_opt")]
    pub b: Option<BigUint>,
    pub verdict: Verdict,
    pub evidence: BTreeMap<String, String>,
}

impl EliminationRecord {
    pub fn new(k: u32, r: u64, verdict: Verdict) -> Self {
        EliminationRecord {
            k,
            r: BigUint::from(r),
            a: None,
            b: None,
            verdict,
            evidence: BTreeMap::new(),
        }
    }

    pub fn with_decomposition(mut self, a: BigUint, b: BigUint) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.evidence.insert(key.to_string(), value.to_string());
    }
}

/// Aggregate of one case pipeline: records, census counters, and whether
/// every candidate was disposed of.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub case: String,
    pub closed: bool,
    pub census: BTreeMap<String, u64>,
    pub records: Vec<EliminationRecord>,
    pub tool_version: String,
    pub timestamp: String,
}

impl ReplayReport {
    pub fn new(case: &str) -> Self {
        ReplayReport {
            case: case.to_string(),
            closed: false,
            census: BTreeMap::new(),
            records: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: now_epoch_seconds(),
        }
    }

    /// Sort records by (k, r) and recompute the closed flag from the
    /// verdicts and the supplied pipeline-level checks.
    pub fn finalize(&mut self, pipeline_checks_passed: bool) {
        self.records.sort_by(|a, b| (a.k, &a.r).cmp(&(b.k, &b.r)));
        self.closed =
            pipeline_checks_passed && self.records.iter().all(|rec| rec.verdict.is_eliminating());
    }

    pub fn survivors(&self) -> impl Iterator<Item = &EliminationRecord> {
        self.records
            .iter()
            .filter(|r| r.verdict == Verdict::Survived)
    }

    pub fn census_count(&self, key: &str) -> u64 {
        self.census.get(key).copied().unwrap_or(0)
    }

    /// Copy of the report with the timestamp cleared, for byte-exact
    /// comparison across runs.
    pub fn without_timestamp(&self) -> Self {
        let mut copy = self.clone();
        copy.timestamp = String::new();
        copy
    }
}

fn now_epoch_seconds() -> String {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default()
}

mod biguint_decimal {
    use num_bigint::BigUint;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse()
            .map_err(|_| de::Error::custom(format!("invalid decimal integer: {raw}")))
    }
}

mod biguint_decimal_opt {
    use num_bigint::BigUint;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|raw| {
            raw.parse()
                .map_err(|_| de::Error::custom(format!("invalid decimal integer: {raw}")))
        })
        .transpose()
    }
}
