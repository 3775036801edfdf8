//! Subpacketization counts, sum-DoF and the hypercube/NMA gap `G`.
//!
//! Counts are exact big integers. `G` is kept as an exact rational and
//! converted to floating point only for display and sweeps.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::counting::{binomial, factorial, hypercube_split, pow};
use crate::model::{ConfigError, NetworkConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("hypercube delivery needs D_R >= delta+1, got D_R = {d_r}, delta = {delta}")]
    HypercubeNotApplicable { d_r: usize, delta: usize },
    #[error("baseline split needs K_R - t_R - 1 >= t_T - 1, got K_R = {k_r}, t_R = {t_r}, t_T = {t_t}")]
    BaselineNotApplicable { k_r: usize, t_r: usize, t_t: usize },
    #[error("no config for d={d}, t={t}, delta={delta}: {source}")]
    GridPoint {
        d: usize,
        t: usize,
        delta: usize,
        source: ConfigError,
    },
}

/// `t_R! * C(K_R - t_R - 1, t_T - 1) * (t_T - 1)!`.
pub fn delta_nma(cfg: &NetworkConfig) -> Result<BigUint, AnalyticsError> {
    let (k_r, t_t, t_r) = (cfg.k_r(), cfg.t_t(), cfg.t_r());
    if k_r < t_r + t_t {
        return Err(AnalyticsError::BaselineNotApplicable { k_r, t_r, t_t });
    }
    Ok(factorial(t_r) * binomial(k_r - t_r - 1, t_t - 1) * factorial(t_t - 1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubpacketizationReport {
    /// Packets per file over the whole placement.
    pub f_total_hcb: BigUint,
    /// Packets a receiver needs of its requested file, hypercube scheme.
    pub f_hcb: BigUint,
    /// Same for the baseline.
    pub f_nma: BigUint,
    pub delta_hcb: BigUint,
    pub delta_nma: BigUint,
    /// `f_hcb / f_nma`.
    pub g: BigRational,
}

fn log10_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).log10();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::INFINITY).log10() + shift as f64 * 2f64.log10()
}

impl SubpacketizationReport {
    pub fn g_f64(&self) -> f64 {
        self.g.to_f64().unwrap_or(f64::NAN)
    }

    pub fn log10_g(&self) -> f64 {
        log10_big(&self.f_hcb) - log10_big(&self.f_nma)
    }
}

impl fmt::Display for SubpacketizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "delta_hcb = {}", self.delta_hcb)?;
        writeln!(f, "delta_nma = {}", self.delta_nma)?;
        writeln!(f, "F_total_hcb = {}", self.f_total_hcb)?;
        writeln!(f, "F_hcb = {}", self.f_hcb)?;
        writeln!(f, "F_nma = {}", self.f_nma)?;
        writeln!(f, "G = {} = {:.10e}", self.g, self.g_f64())?;
        write!(f, "log10 G = {:.10}", self.log10_g())
    }
}

pub fn subpacketization_report(cfg: &NetworkConfig) -> Result<SubpacketizationReport, AnalyticsError> {
    let (d_t, d_r, t_t, t_r) = (cfg.d_t(), cfg.d_r(), cfg.t_t(), cfg.t_r());
    let delta_hcb = hypercube_split(d_r, cfg.delta(), t_r).ok_or(AnalyticsError::HypercubeNotApplicable {
        d_r,
        delta: cfg.delta(),
    })?;
    let delta_nma = delta_nma(cfg)?;
    let f_total_hcb = pow(d_t, t_t) * pow(d_r, t_r) * &delta_hcb;
    let f_hcb = pow(d_t, t_t) * pow(d_r, t_r - 1) * BigUint::from(d_r - 1) * &delta_hcb;
    let f_nma = binomial(cfg.k_t(), t_t) * binomial(cfg.k_r() - 1, t_r) * &delta_nma;
    let g = BigRational::new(BigInt::from(f_hcb.clone()), BigInt::from(f_nma.clone()));
    Ok(SubpacketizationReport {
        f_total_hcb,
        f_hcb,
        f_nma,
        delta_hcb,
        delta_nma,
        g,
    })
}

/// `min{(M_T K_T + K_R M_R) / N, K_R}`.
pub fn sum_dof(cfg: &NetworkConfig) -> Ratio<usize> {
    let linear = Ratio::new(cfg.m_t() * cfg.k_t() + cfg.k_r() * cfg.m_r(), cfg.n());
    linear.min(Ratio::from_integer(cfg.k_r()))
}

/// Sweep geometry: `D_T = D_R = d`, `t_T = delta * t`, `t_R = t`, one file
/// per dimension member.
pub fn gap_config(d: usize, t: usize, delta: usize) -> Result<NetworkConfig, AnalyticsError> {
    NetworkConfig::placement_only(d * delta * t, d * t, d, 1, 1).map_err(|source| AnalyticsError::GridPoint {
        d,
        t,
        delta,
        source,
    })
}

pub fn gap(d: usize, t: usize, delta: usize) -> Result<SubpacketizationReport, AnalyticsError> {
    subpacketization_report(&gap_config(d, t, delta)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapAsymptotics {
    pub d: usize,
    pub t: usize,
    pub delta: usize,
    /// `lim_{d -> inf} G(d, t, delta)`.
    pub limit_d: f64,
    /// `2 pi / d * sqrt(delta (d - delta - 1) / (d - 1))`, for `delta >= 2`.
    pub k0: Option<f64>,
    /// `k0 / t^((delta - 1) t - 1)`, for `delta >= 2`.
    pub bound: Option<f64>,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub fn gap_asymptotics(d: usize, t: usize, delta: usize) -> GapAsymptotics {
    assert!(t >= 1 && delta >= 1, "t and delta start at 1");
    let (tf, df) = (t as f64, delta as f64);
    let ln_limit = ln_factorial(t - 1) + ln_factorial(delta * t)
        - (delta * t) as f64 * df.ln()
        - ((2 * delta + 1) * t - 1) as f64 * tf.ln();
    let k0 = (delta >= 2 && d > delta).then(|| {
        let (d, spare) = (d as f64, (d - delta - 1) as f64);
        2.0 * PI / d * (df * spare / (d - 1.0)).sqrt()
    });
    let bound = k0.map(|k| {
        let exponent = ((delta - 1) * t) as f64 - 1.0;
        if k == 0.0 {
            0.0
        } else {
            (k.ln() - exponent * tf.ln()).exp()
        }
    });
    GapAsymptotics {
        d,
        t,
        delta,
        limit_d: ln_limit.exp(),
        k0,
        bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Fixed `d`, varying `t`.
    VaryT,
    /// Fixed `t`, varying `d`.
    VaryD,
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepMode::VaryT => "vary-t",
            SweepMode::VaryD => "vary-d",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub delta: usize,
    /// `d` for [`SweepMode::VaryT`], `t` for [`SweepMode::VaryD`].
    pub fixed: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d: usize,
    pub t: usize,
    pub g: Option<f64>,
    pub log10_g: Option<f64>,
    pub asymptotics: GapAsymptotics,
    /// `G <= bound`, when both exist.
    pub bound_holds: Option<bool>,
    /// Why the point was skipped.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

pub fn sweep_gap(spec: &SweepSpec) -> SweepTable {
    let points: Vec<(usize, usize)> = (spec.from..=spec.to)
        .map(|v| match spec.mode {
            SweepMode::VaryT => (spec.fixed, v),
            SweepMode::VaryD => (v, spec.fixed),
        })
        .collect();
    let rows = points
        .par_iter()
        .map(|&(d, t)| {
            let asymptotics = gap_asymptotics(d, t.max(1), spec.delta);
            let point = if t == 0 || spec.delta == 0 {
                Err("t and delta must be positive".to_string())
            } else {
                gap(d, t, spec.delta).map_err(|e| e.to_string())
            };
            match point {
                Ok(report) => {
                    let g = report.g_f64();
                    SweepRow {
                        d,
                        t,
                        g: Some(g),
                        log10_g: Some(report.log10_g()),
                        asymptotics,
                        bound_holds: asymptotics.bound.map(|b| g <= b),
                        note: None,
                    }
                }
                Err(note) => SweepRow {
                    d,
                    t,
                    g: None,
                    log10_g: None,
                    asymptotics,
                    bound_holds: None,
                    note: Some(note),
                },
            }
        })
        .collect();
    SweepTable {
        spec: spec.clone(),
        rows,
    }
}

impl SweepTable {
    /// `G` strictly decreases across the evaluated rows.
    pub fn strictly_decreasing(&self) -> bool {
        let gs: Vec<f64> = self.rows.iter().filter_map(|r| r.g).collect();
        gs.windows(2).all(|w| w[1] < w[0])
    }

    /// First row, in sweep order, at which the bound holds.
    pub fn bound_threshold(&self) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.bound_holds == Some(true))
            .map(|r| match self.spec.mode {
                SweepMode::VaryT => r.t,
                SweepMode::VaryD => r.d,
            })
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        fn opt(v: Option<f64>) -> String {
            v.map_or(String::new(), |v| format!("{v:.12e}"))
        }
        writeln!(out, "mode,delta,d,t,G,log10_G,limit_d,bound,bound_holds,note")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{:.12e},{},{},{}",
                self.spec.mode,
                self.spec.delta,
                r.d,
                r.t,
                opt(r.g),
                r.log10_g.map_or(String::new(), |v| format!("{v:.12}")),
                r.asymptotics.limit_d,
                opt(r.asymptotics.bound),
                r.bound_holds.map_or(String::new(), |b| b.to_string()),
                r.note.as_deref().unwrap_or("").replace(',', ";")
            )?;
        }
        Ok(())
    }
}

/// `log10` of an exact positive rational.
pub fn log10_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    log10_big(n) - log10_big(d)
}
