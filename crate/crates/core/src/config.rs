//! TOML run configuration.
//!
//! ```toml
//! k_t = 4
//! k_r = 4
//! n = 4
//! m_t = 2
//! m_r = 2
//! seed = 7
//! demand = [0, 1, 2, 3]
//!
//! [d2d]
//! k = 9
//! n = 9
//! m = 3
//!
//! [sweep]
//! mode = "vary-t"
//! delta = 1
//! fixed = 2
//! from = 2
//! to = 8
//! ```
//!
//! Every key is optional; commands ask for what they need.

use std::path::Path;

use serde::Deserialize;

use crate::analytics::{SweepMode, SweepSpec};
use crate::model::NetworkConfig;
use crate::Error;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub k_t: Option<usize>,
    pub k_r: Option<usize>,
    pub n: Option<usize>,
    pub m_t: Option<usize>,
    pub m_r: Option<usize>,
    pub seed: Option<u64>,
    pub demand: Option<Vec<usize>>,
    pub noise: Option<f64>,
    pub trials: Option<usize>,
    /// Per-transmitter power budget.
    pub power: Option<f64>,
    pub d2d: Option<D2dSection>,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct D2dSection {
    pub k: usize,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub mode: String,
    pub delta: usize,
    pub fixed: usize,
    pub from: usize,
    pub to: usize,
}

pub fn parse_sweep_mode(s: &str) -> Result<SweepMode, Error> {
    match s {
        "vary-t" => Ok(SweepMode::VaryT),
        "vary-d" => Ok(SweepMode::VaryD),
        other => Err(Error::Usage(format!(
            "sweep mode must be vary-t or vary-d, got {other:?}"
        ))),
    }
}

impl SweepSection {
    pub fn spec(&self) -> Result<SweepSpec, Error> {
        Ok(SweepSpec {
            mode: parse_sweep_mode(&self.mode)?,
            delta: self.delta,
            fixed: self.fixed,
            from: self.from,
            to: self.to,
        })
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::ConfigFile(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The network, in placement-only mode; scheduling checks the block
    /// condition itself.
    pub fn network(&self) -> Result<NetworkConfig, Error> {
        let need = |v: Option<usize>, key| v.ok_or(Error::MissingKey(key));
        Ok(NetworkConfig::placement_only(
            need(self.k_t, "k_t")?,
            need(self.k_r, "k_r")?,
            need(self.n, "n")?,
            need(self.m_t, "m_t")?,
            need(self.m_r, "m_r")?,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConfigError;

    #[test]
    fn parses_all_sections() {
        let cfg = RunConfig::parse(
            "k_t = 4\nk_r = 4\nn = 4\nm_t = 2\nm_r = 2\nseed = 3\ndemand = [3, 2, 1, 0]\n\
             [d2d]\nk = 9\nn = 9\nm = 3\n\
             [sweep]\nmode = \"vary-d\"\ndelta = 1\nfixed = 2\nfrom = 2\nto = 64\n",
        )
        .unwrap();
        assert_eq!(cfg.network().unwrap().delta(), 1);
        assert_eq!(cfg.demand, Some(vec![3, 2, 1, 0]));
        assert_eq!(cfg.d2d, Some(D2dSection { k: 9, n: 9, m: 3 }));
        assert_eq!(cfg.sweep.unwrap().spec().unwrap().mode, SweepMode::VaryD);
    }

    #[test]
    fn reports_problems() {
        assert!(matches!(
            RunConfig::parse("k_t = 4\nbogus = 1\n"),
            Err(Error::ConfigFile(_))
        ));
        assert!(matches!(
            RunConfig::parse("k_t = 4\n").unwrap().network(),
            Err(Error::MissingKey("k_r"))
        ));
        let bad = RunConfig::parse("k_t = 4\nk_r = 4\nn = 4\nm_t = 3\nm_r = 2\n").unwrap();
        assert!(matches!(
            bad.network(),
            Err(Error::Config(ConfigError::NonDivisible { .. }))
        ));
    }
}
