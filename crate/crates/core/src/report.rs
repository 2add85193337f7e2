use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::model::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Rtwpa,
    Asap,
    Random,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Exact,
        Method::Rtwpa,
        Method::Asap,
        Method::Random,
        Method::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Rtwpa => "rtwpa",
            Method::Asap => "asap",
            Method::Random => "random",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected exact, rtwpa, asap, random or oracle)"))
    }
}

/// Outcome of any solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub schedule: Schedule,
    pub peak: f64,
    pub method: Method,
    pub proved_optimal: bool,
    pub runtime: Duration,
    pub nodes_explored: u64,
    pub seed: Option<u64>,
    pub iterations: Option<u64>,
}

impl SolveReport {
    /// `key=value` summary used by the command line.
    pub fn summary_line(&self) -> String {
        let mut line = format!(
            "method={} peak={} proved_optimal={} runtime_ms={:.3} nodes={}",
            self.method,
            self.peak,
            self.proved_optimal,
            self.runtime.as_secs_f64() * 1e3,
            self.nodes_explored
        );
        if let Some(seed) = self.seed {
            line.push_str(&format!(" seed={seed}"));
        }
        if let Some(n) = self.iterations {
            line.push_str(&format!(" iterations={n}"));
        }
        line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("ilp".parse::<Method>().is_err());
    }
}
