//! `hcache` command line.
//!
//! Each subcommand prints a short summary to the given writer and, with
//! `--out-dir`, writes its artifacts there. Every artifact starts with the
//! run manifest as `#` comment lines. [`run`] returns the verdict; [`main`]
//! maps it to the exit code (0 pass, 1 fail, 2 error).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::analytics::{subpacketization_report, sum_dof, sweep_gap, SweepMode, SweepSpec};
use crate::combinatorics::{circular_count, enumerate_circular_hcb, enumerate_hypercube_permutations, linear_count};
use crate::config::{parse_sweep_mode, RunConfig};
use crate::model::{partition_dimensions, validate_demand, DemandVector, NetworkConfig};
use crate::phy::{sample_channel, simulate_schedule, SimOptions};
use crate::placement::{place_d2d, place_hypercube, verify_memory, PlacementMap};
use crate::scheduler::{
    build_schedule, build_schedule_oracle, schedule_stats, validate_schedule, write_schedule, Schedule, ScheduleError,
    ScheduleValidator,
};
use crate::{seeds, Error};

#[derive(Debug, Parser)]
#[command(
    name = "hcache",
    version,
    about = "Hypercube cache placement, delivery scheduling and zero-forcing checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Requested file per receiver, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub demand: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Receiver noise power.
    #[arg(long, global = true)]
    pub noise: Option<f64>,
    /// Symbol draws per block.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Directory for artifacts; nothing is written without it.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Use the `[d2d]` section instead of the interference network.
    #[arg(long, global = true)]
    pub d2d: bool,
    /// Cross-check the schedule length by exact-cover search.
    #[arg(long, global = true)]
    pub oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cache placement and memory check.
    Place,
    /// Delivery schedule for one demand.
    Schedule,
    /// Zero-forcing simulation of the schedule.
    Simulate,
    /// Subpacketization counts, sum-DoF and gap.
    Analyze,
    /// Gap sweep as CSV.
    Sweep {
        /// vary-t or vary-d
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        delta: Option<usize>,
        /// d when varying t, t when varying d.
        #[arg(long)]
        fixed: Option<usize>,
        #[arg(long)]
        from: Option<usize>,
        #[arg(long)]
        to: Option<usize>,
    },
    /// Hypercube permutation counts and listings.
    Perms {
        /// Points per dimension.
        #[arg(long)]
        d: usize,
        /// Dimensions.
        #[arg(long)]
        t: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub config: String,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
    pub passed: bool,
}

impl RunManifest {
    /// `#`-prefixed lines, newline terminated.
    pub fn header(&self) -> String {
        format!(
            "# command={}\n# config={}\n# seed={}\n# version={}\n# outputs={}\n# verdict={}\n",
            self.command,
            self.config,
            self.seed,
            self.version,
            self.outputs.join(","),
            if self.passed { "pass" } else { "fail" }
        )
    }
}

struct Artifact {
    name: &'static str,
    body: Vec<u8>,
}

struct Ctx<'a> {
    cli: &'a Cli,
    file: RunConfig,
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.cli.seed.or(self.file.seed).unwrap_or(0)
    }

    fn network(&self) -> Result<NetworkConfig, Error> {
        if self.cli.config.is_none() {
            return Err(Error::Usage("this command needs --config".into()));
        }
        self.file.network()
    }

    /// `--demand`, then the config file, then a random demand from the seed.
    fn demand(&self, cfg: &NetworkConfig) -> Result<DemandVector, Error> {
        match self.cli.demand.as_ref().or(self.file.demand.as_ref()) {
            Some(files) => Ok(validate_demand(cfg, files)?),
            None => Ok(DemandVector::random(
                cfg,
                &mut seeds::rng(self.seed(), &[seeds::TAG_DEMAND]),
            )),
        }
    }
}

/// Runs the process arguments and maps the verdict to an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs one subcommand. `Ok(false)` means it ran but a check failed.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool, Error> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx { cli, file };
    let (command, config, passed, artifacts) = match &cli.command {
        Command::Place if cli.d2d => place_d2d_cmd(&ctx, out)?,
        Command::Place => place_cmd(&ctx, out)?,
        Command::Schedule => schedule_cmd(&ctx, out)?,
        Command::Simulate => simulate_cmd(&ctx, out)?,
        Command::Analyze => analyze_cmd(&ctx, out)?,
        Command::Sweep {
            mode,
            delta,
            fixed,
            from,
            to,
        } => sweep_cmd(&ctx, out, mode.as_deref(), [*delta, *fixed, *from, *to])?,
        Command::Perms { d, t } => perms_cmd(out, *d, *t)?,
    };
    let manifest = RunManifest {
        command: command.to_string(),
        config,
        seed: ctx.seed(),
        version: format!("hypercube-ia {}", env!("CARGO_PKG_VERSION")),
        outputs: artifacts.iter().map(|a| a.name.to_string()).collect(),
        passed,
    };
    if let Some(dir) = &cli.out_dir {
        write_artifacts(dir, &manifest, &artifacts)?;
    }
    writeln!(out, "verdict={}", if passed { "pass" } else { "fail" })?;
    Ok(passed)
}

fn write_artifacts(dir: &Path, manifest: &RunManifest, artifacts: &[Artifact]) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let header = manifest.header();
    for a in artifacts {
        let mut bytes = header.clone().into_bytes();
        bytes.extend_from_slice(&a.body);
        fs::write(dir.join(a.name), bytes)?;
    }
    Ok(())
}

type Outcome = (&'static str, String, bool, Vec<Artifact>);

fn place_cmd(ctx: &Ctx, out: &mut dyn Write) -> Result<Outcome, Error> {
    let cfg = ctx.network()?;
    let pm = place_hypercube(&cfg, &partition_dimensions(&cfg));
    let report = verify_memory(&cfg, &pm)?;
    writeln!(out, "{cfg}")?;
    writeln!(
        out,
        "D_T={} t_T={} D_R={} t_R={} delta={}",
        cfg.d_t(),
        cfg.t_t(),
        cfg.d_r(),
        cfg.t_r(),
        cfg.delta()
    )?;
    writeln!(out, "subfiles_per_file={}", pm.subfiles_per_file())?;
    writeln!(
        out,
        "needed_subfiles_per_receiver={}",
        cfg.needed_subfiles_per_receiver()
    )?;
    let loads = |v: &[num_rational::Ratio<u64>]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
    writeln!(out, "tx_loads={}", loads(&report.tx_loads))?;
    writeln!(out, "rx_loads={}", loads(&report.rx_loads))?;
    writeln!(out, "memory=pass")?;
    let mut body = Vec::new();
    pm.write_table(&mut body)?;
    Ok((
        "place",
        cfg.to_string(),
        true,
        vec![Artifact {
            name: "placement.tsv",
            body,
        }],
    ))
}

fn place_d2d_cmd(ctx: &Ctx, out: &mut dyn Write) -> Result<Outcome, Error> {
    let section = ctx.file.d2d.ok_or(Error::MissingKey("d2d"))?;
    let p = place_d2d(section.k, section.n, section.m)?;
    let per_user: Vec<usize> = (0..p.users).map(|u| p.user_cache(u).count()).collect();
    let expected = section.m * p.packets_per_file();
    let passed = per_user.iter().all(|&c| c == expected);
    writeln!(out, "users={} files={} q={} t={}", p.users, p.files, p.q, p.t)?;
    writeln!(out, "packets_per_file={}", p.packets_per_file())?;
    writeln!(out, "packets_per_user={}", per_user.first().copied().unwrap_or(0))?;
    writeln!(out, "memory={}", if passed { "pass" } else { "fail" })?;
    let mut body = Vec::new();
    p.write_table(&mut body)?;
    Ok((
        "place",
        format!("d2d k={} n={} m={}", section.k, section.n, section.m),
        passed,
        vec![Artifact {
            name: "d2d_placement.tsv",
            body,
        }],
    ))
}

/// Structured schedule; when receivers cache the whole library nothing
/// needs sending and the schedule is empty.
fn make_schedule(cfg: &NetworkConfig, pm: &PlacementMap, demand: &DemandVector) -> Result<Schedule, Error> {
    if cfg.m_r() == cfg.n() {
        return Ok(Schedule::empty(*cfg, demand.clone(), 0));
    }
    Ok(build_schedule(cfg, &partition_dimensions(cfg), pm, demand)?)
}

struct Scheduled {
    cfg: NetworkConfig,
    demand: DemandVector,
    schedule: Schedule,
    passed: bool,
}

fn schedule_and_check(ctx: &Ctx, out: &mut dyn Write) -> Result<Scheduled, Error> {
    let cfg = ctx.network()?;
    let demand = ctx.demand(&cfg)?;
    let pm = place_hypercube(&cfg, &partition_dimensions(&cfg));
    let schedule = make_schedule(&cfg, &pm, &demand)?;
    let report = validate_schedule(&cfg, &pm, &demand, &schedule);
    let stats = schedule_stats(&schedule);
    writeln!(out, "{cfg}")?;
    writeln!(out, "demand={demand}")?;
    writeln!(out, "delta_hcb={}", schedule.delta_hcb)?;
    writeln!(out, "H={}", stats.h)?;
    writeln!(out, "packets={}", stats.total_packets)?;
    writeln!(out, "dof={}", stats.dof.map_or("-".into(), |d| d.to_string()))?;
    let mut passed = report.is_pass();
    match &report.violation {
        None => writeln!(out, "validation=pass")?,
        Some(v) => writeln!(out, "validation=fail {v}")?,
    }
    if ctx.cli.oracle {
        match build_schedule_oracle(&cfg, &pm, &demand) {
            Ok(o) => {
                let valid = ScheduleValidator::new(&cfg, &pm, &demand)
                    .require_arrangement(false)
                    .validate(&o)
                    .is_pass();
                let agree = valid && o.h() == schedule.h();
                passed &= agree;
                writeln!(out, "oracle H={} agree={agree}", o.h())?;
            }
            Err(ScheduleError::TooLarge { packets, cap }) => {
                writeln!(out, "oracle skipped: {packets} packets above cap {cap}")?
            }
            Err(e) => {
                passed = false;
                writeln!(out, "oracle failed: {e}")?;
            }
        }
    }
    Ok(Scheduled {
        cfg,
        demand,
        schedule,
        passed,
    })
}

fn schedule_cmd(ctx: &Ctx, out: &mut dyn Write) -> Result<Outcome, Error> {
    let s = schedule_and_check(ctx, out)?;
    let mut body = Vec::new();
    write_schedule(&s.schedule, &mut body)?;
    Ok((
        "schedule",
        format!("{} demand={}", s.cfg, s.demand),
        s.passed,
        vec![Artifact {
            name: "schedule.txt",
            body,
        }],
    ))
}

fn simulate_cmd(ctx: &Ctx, out: &mut dyn Write) -> Result<Outcome, Error> {
    let s = schedule_and_check(ctx, out)?;
    let seed = ctx.seed();
    let opts = SimOptions {
        noise_power: ctx.cli.noise.or(ctx.file.noise).unwrap_or(0.0),
        power: ctx.file.power.unwrap_or(1.0),
        trials: ctx.cli.trials.or(ctx.file.trials).unwrap_or(1),
        seed,
        strict: false,
        ..SimOptions::default()
    };
    if !(opts.noise_power >= 0.0 && opts.power > 0.0) {
        return Err(Error::Usage("noise must be >= 0 and power > 0".into()));
    }
    let h = sample_channel(&s.cfg, seed);
    let report = simulate_schedule(&s.cfg, &s.schedule, &h, &opts)?;
    writeln!(out, "{}", report.verdict_line())?;
    for f in report.failures.iter().take(10) {
        writeln!(out, "failure {f}")?;
    }
    let passed = s.passed && report.passed();
    let mut schedule_body = Vec::new();
    write_schedule(&s.schedule, &mut schedule_body)?;
    let mut report_body = Vec::new();
    report.write(&mut report_body)?;
    Ok((
        "simulate",
        format!(
            "{} demand={} noise={:e} trials={} power={:e}",
            s.cfg, s.demand, opts.noise_power, opts.trials, opts.power
        ),
        passed,
        vec![
            Artifact {
                name: "schedule.txt",
                body: schedule_body,
            },
            Artifact {
                name: "report.tsv",
                body: report_body,
            },
        ],
    ))
}

fn analyze_cmd(ctx: &Ctx, out: &mut dyn Write) -> Result<Outcome, Error> {
    let cfg = ctx.network()?;
    let mut body = Vec::new();
    writeln!(body, "{cfg}")?;
    writeln!(body, "sum_dof={}", sum_dof(&cfg))?;
    let passed = match subpacketization_report(&cfg) {
        Ok(r) => {
            writeln!(body, "{r}")?;
            true
        }
        Err(e) => {
            writeln!(body, "not applicable: {e}")?;
            false
        }
    };
    out.write_all(&body)?;
    Ok((
        "analyze",
        cfg.to_string(),
        passed,
        vec![Artifact {
            name: "analysis.txt",
            body,
        }],
    ))
}

fn sweep_cmd(ctx: &Ctx, out: &mut dyn Write, mode: Option<&str>, nums: [Option<usize>; 4]) -> Result<Outcome, Error> {
    let from_file = ctx.file.sweep.as_ref().map(|s| s.spec()).transpose()?;
    let pick =
        |flag: Option<usize>, file: Option<usize>, key: &'static str| flag.or(file).ok_or(Error::MissingKey(key));
    let [delta, fixed, from, to] = nums;
    let spec = SweepSpec {
        mode: match mode {
            Some(m) => parse_sweep_mode(m)?,
            None => from_file
                .as_ref()
                .map(|s| s.mode)
                .ok_or(Error::MissingKey("sweep.mode"))?,
        },
        delta: pick(delta, from_file.as_ref().map(|s| s.delta), "sweep.delta")?,
        fixed: pick(fixed, from_file.as_ref().map(|s| s.fixed), "sweep.fixed")?,
        from: pick(from, from_file.as_ref().map(|s| s.from), "sweep.from")?,
        to: pick(to, from_file.as_ref().map(|s| s.to), "sweep.to")?,
    };
    if spec.delta == 0 || spec.from == 0 || spec.fixed == 0 || spec.from > spec.to {
        return Err(Error::Usage(
            "sweep needs delta, fixed, from >= 1 and from <= to".into(),
        ));
    }
    let table = sweep_gap(&spec);
    let mut body = Vec::new();
    table.write_csv(&mut body)?;
    out.write_all(&body)?;

    let evaluated: Vec<f64> = table.rows.iter().filter_map(|r| r.g).collect();
    let below_one = evaluated.iter().all(|&g| g < 1.0);
    let decreasing = spec.mode != SweepMode::VaryT || table.strictly_decreasing();
    writeln!(
        out,
        "evaluated={}/{} all_below_one={below_one}",
        evaluated.len(),
        table.rows.len()
    )?;
    if spec.mode == SweepMode::VaryT {
        writeln!(out, "strictly_decreasing={decreasing}")?;
        if spec.delta >= 2 {
            let threshold = table.bound_threshold();
            writeln!(
                out,
                "bound_threshold_t={}",
                threshold.map_or("none".into(), |t| t.to_string())
            )?;
        }
    }
    Ok((
        "sweep",
        format!(
            "{} delta={} fixed={} range={}..={}",
            spec.mode, spec.delta, spec.fixed, spec.from, spec.to
        ),
        !evaluated.is_empty() && below_one && decreasing,
        vec![Artifact { name: "gap.csv", body }],
    ))
}

fn perms_cmd(out: &mut dyn Write, d: usize, t: usize) -> Result<Outcome, Error> {
    let linear = enumerate_hypercube_permutations(d, t)?;
    let circular = enumerate_circular_hcb(d, t)?;
    let (want_linear, want_circular) = (linear_count(d, t), circular_count(d, t));
    let passed = linear.len() as u128 == want_linear && circular.len() as u128 == want_circular;
    writeln!(out, "d={d} t={t}")?;
    writeln!(out, "linear={} formula={want_linear}", linear.len())?;
    writeln!(out, "circular={} formula={want_circular}", circular.len())?;
    let join = |s: &[usize]| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    let mut body = Vec::new();
    for p in &linear {
        writeln!(body, "linear {}", join(&p.seq))?;
    }
    for c in &circular {
        writeln!(body, "circular {}", join(&c.seq))?;
    }
    if circular.len() <= 20 {
        for c in &circular {
            writeln!(out, "({})", join(&c.seq))?;
        }
    }
    Ok((
        "perms",
        format!("d={d} t={t}"),
        passed,
        vec![Artifact {
            name: "perms.txt",
            body,
        }],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<bool, Error>, String) {
        let cli = Cli::try_parse_from(std::iter::once("hcache").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let r = run(&cli, &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn perms_example() {
        let (r, text) = run_args(&["perms", "--d", "2", "--t", "2"]);
        assert!(r.unwrap());
        assert!(text.contains("linear=8 formula=8"));
        assert!(text.contains("circular=2 formula=2"));
    }

    #[test]
    fn sweep_from_flags() {
        let (r, text) = run_args(&[
            "sweep", "--mode", "vary-t", "--delta", "1", "--fixed", "2", "--from", "2", "--to", "6",
        ]);
        assert!(r.unwrap(), "{text}");
        assert!(text.starts_with("mode,delta,d,t,G"));
        assert!(text.contains("strictly_decreasing=true"));
    }

    #[test]
    fn network_commands_need_config() {
        let (r, _) = run_args(&["place"]);
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn manifest_header() {
        let m = RunManifest {
            command: "schedule".into(),
            config: "k_t=4".into(),
            seed: 1,
            version: "v".into(),
            outputs: vec!["a".into(), "b".into()],
            passed: true,
        };
        assert_eq!(
            m.header(),
            "# command=schedule\n# config=k_t=4\n# seed=1\n# version=v\n# outputs=a,b\n# verdict=pass\n"
        );
    }
}
