use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tourlink::constructions::{
    directed_cycle_blowup, popielarz, transitive, triangle_blowup, Construction, Internal,
};
use tourlink::linkage::TraceRecord;
use tourlink::Tournament;

/// Everything besides the seed that determines a run. Absent fields are
/// left out of the JSON.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// `random`, `popielarz`, `triangle-blowup`, `cycle-blowup`,
    /// `transitive` or `stdin`.
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_least: Option<usize>,
    /// `seeded` (default) or `transitive` orientation of free pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub internal: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sinks: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub from: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub to: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub avoid: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub exclude: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pool: Vec<usize>,
    /// TRN1 file the tournament was written to, for stdin-fed replays.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trn_path: Option<String>,
}

impl Params {
    pub fn need_n(&self) -> anyhow::Result<usize> {
        self.n.ok_or_else(|| anyhow::anyhow!("--n is required"))
    }

    pub fn need_k(&self) -> anyhow::Result<usize> {
        self.k.ok_or_else(|| anyhow::anyhow!("--k is required"))
    }

    fn internal(&self, seed: u64) -> anyhow::Result<Internal> {
        match self.internal.as_deref() {
            None | Some("seeded") => Ok(Internal::Seeded(seed)),
            Some("transitive") => Ok(Internal::Transitive),
            Some(other) => anyhow::bail!("unknown --internal {other:?}"),
        }
    }

    /// The named construction behind `source`, if it is one.
    pub fn construction(&self, seed: u64) -> anyhow::Result<Option<Construction>> {
        let c = match self.source.as_str() {
            "popielarz" => popielarz(self.need_k()?, self.need_n()?, self.internal(seed)?)?,
            "triangle-blowup" => {
                let k = self.need_k()?;
                let m = self.m.unwrap_or(2 * k);
                triangle_blowup(k, m, m, self.internal(seed)?)?
            }
            "cycle-blowup" => directed_cycle_blowup(&self.parts, self.internal(seed)?)?,
            _ => return Ok(None),
        };
        Ok(Some(c))
    }

    /// Rebuilds the tournament from the parameters and seed; `stdin` sources
    /// use `input`.
    pub fn tournament(&self, seed: u64, input: Option<&Tournament>) -> anyhow::Result<Tournament> {
        match self.source.as_str() {
            "random" => Ok(Tournament::random(self.need_n()?, seed)),
            "transitive" => Ok(transitive(self.need_n()?)),
            "stdin" => input
                .cloned()
                .ok_or_else(|| anyhow::anyhow!("this run needs a TRN1 tournament as input")),
            other => self
                .construction(seed)?
                .map(|c| c.tournament)
                .ok_or_else(|| anyhow::anyhow!("unknown --source {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    HypothesisExhausted,
    Counterexample,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success | Outcome::Counterexample => 0,
            Outcome::HypothesisExhausted => 2,
            Outcome::Error => 1,
        }
    }
}

/// Exit code for a batch: any error wins, then any exhaustion.
pub fn combined_exit(outcomes: impl IntoIterator<Item = Outcome>) -> i32 {
    outcomes
        .into_iter()
        .map(Outcome::exit_code)
        .fold(0, |acc, c| match (acc, c) {
            (1, _) | (_, 1) => 1,
            (2, _) | (_, 2) => 2,
            _ => 0,
        })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub params: Params,
    pub seed: u64,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_trace: Option<Vec<TraceRecord>>,
}

impl ExperimentRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Writes records as JSON lines.
pub fn write_records<'a>(
    out: &mut dyn Write,
    records: impl IntoIterator<Item = &'a ExperimentRecord>,
) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    out.flush()
}

pub fn read_records(text: &str) -> anyhow::Result<Vec<ExperimentRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| anyhow::anyhow!("record {}: {e}", i + 1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_combine() {
        use Outcome::*;
        assert_eq!(combined_exit([]), 0);
        assert_eq!(combined_exit([Success, Counterexample]), 0);
        assert_eq!(combined_exit([Success, HypothesisExhausted]), 2);
        assert_eq!(combined_exit([HypothesisExhausted, Error, Success]), 1);
    }

    #[test]
    fn record_round_trip() {
        let r = ExperimentRecord {
            command: "gen".into(),
            params: Params {
                source: "random".into(),
                n: Some(5),
                ..Params::default()
            },
            seed: 3,
            outcome: Outcome::HypothesisExhausted,
            certificate: None,
            detail: Some("why".into()),
            wall_time_ms: 1.5,
            potential_trace: None,
        };
        let line = r.to_line();
        assert!(line.contains("\"hypothesis_exhausted\""));
        assert!(!line.contains("certificate"));
        assert_eq!(read_records(&line).unwrap(), vec![r]);
    }

    #[test]
    fn sources_regenerate() {
        let p = Params {
            source: "popielarz".into(),
            n: Some(20),
            k: Some(2),
            ..Params::default()
        };
        assert_eq!(p.tournament(4, None).unwrap(), p.tournament(4, None).unwrap());
        let s = Params {
            source: "stdin".into(),
            ..Params::default()
        };
        assert!(s.tournament(0, None).is_err());
        let bad = Params {
            source: "nope".into(),
            ..Params::default()
        };
        assert!(bad.tournament(0, None).is_err());
    }
}
