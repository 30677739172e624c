use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ret_core::sweep::{
    config_pairs, parse_config, run_bath_probe, run_efficiency, run_lifetime, run_population, run_sweep,
    workers_from_env, RunConfig, RunReport,
};
use ret_core::Error;

/// Resonance energy transfer dynamics and distance sweeps.
///
/// Settings come from an optional flat `key = value` file, then the flags
/// below, then `--set key=value` pairs; later sources win. Worker threads for
/// sweeps are taken from RETSIM_WORKERS.
#[derive(Parser)]
#[command(name = "retsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Population trajectories for every (method, ΔE, R/R₀).
    Populate(Common),
    /// Effective rates over the distance grid.
    Sweep(Common),
    /// Donor lifetime deduced from the effective rate at R/R₀ = 1/2.
    Lifetime(Common),
    /// Transfer efficiencies over the distance grid.
    Efficiency(Common),
    /// Lineshape functions g(t) and the donor/acceptor spectra.
    BathProbe(Common),
}

#[derive(Args)]
struct Common {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// case1 (η=2, ħω_c=1000 cm⁻¹) or case2 (η=5, ħω_c=400 cm⁻¹).
    #[arg(long)]
    preset: Option<String>,
    /// Energy gaps E_D − E_A in cm⁻¹, comma separated.
    #[arg(long = "dE")]
    delta_e: Option<String>,
    /// η for both sites.
    #[arg(long)]
    eta: Option<String>,
    #[arg(long = "eta-d")]
    eta_d: Option<String>,
    #[arg(long = "eta-a")]
    eta_a: Option<String>,
    /// ħω_c in cm⁻¹.
    #[arg(long = "omega-c")]
    omega_c: Option<String>,
    /// Temperature in K.
    #[arg(long)]
    temperature: Option<String>,
    /// Coupling at R = R₀ in cm⁻¹.
    #[arg(long)]
    j0: Option<String>,
    /// Explicit R/R₀ list, comma separated.
    #[arg(long)]
    r: Option<String>,
    #[arg(long = "r-min")]
    r_min: Option<String>,
    #[arg(long = "r-max")]
    r_max: Option<String>,
    #[arg(long = "r-count")]
    r_count: Option<String>,
    /// cret, fret or both (comma separated).
    #[arg(long)]
    methods: Option<String>,
    /// Propagation horizon in fs (initial horizon for sweeps).
    #[arg(long = "t-max")]
    t_max: Option<String>,
    /// Largest horizon a sweep may extend to, fs.
    #[arg(long = "t-cap")]
    t_cap: Option<String>,
    /// Output spacing in fs.
    #[arg(long = "report-dt")]
    report_dt: Option<String>,
    /// Donor lifetime in ns for efficiency curves.
    #[arg(long = "tau-d")]
    tau_d: Option<String>,
    /// Coherence frame for population files: polaron or original.
    #[arg(long)]
    frame: Option<String>,
    /// Add exponential comparison columns to population files.
    #[arg(long)]
    fig3: bool,
    /// Exit with status 3 if any result is unconverged.
    #[arg(long)]
    strict: bool,
    #[arg(long = "out-dir")]
    out_dir: Option<String>,
    /// Extra `key=value` settings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::parse("config", format!("{}: {e}", path.display())))?;
            pairs.extend(config_pairs(&text)?);
        }
        let flags = [
            ("preset", &self.preset),
            ("dE", &self.delta_e),
            ("eta", &self.eta),
            ("eta_d", &self.eta_d),
            ("eta_a", &self.eta_a),
            ("omega_c", &self.omega_c),
            ("temperature", &self.temperature),
            ("j0", &self.j0),
            ("r", &self.r),
            ("r_min", &self.r_min),
            ("r_max", &self.r_max),
            ("r_count", &self.r_count),
            ("methods", &self.methods),
            ("t_max", &self.t_max),
            ("t_cap", &self.t_cap),
            ("report_dt", &self.report_dt),
            ("tau_d", &self.tau_d),
            ("frame", &self.frame),
            ("out_dir", &self.out_dir),
        ];
        pairs.extend(flags.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))));
        if self.fig3 {
            pairs.push(("fig3".into(), "true".into()));
        }
        if self.strict {
            pairs.push(("strict".into(), "true".into()));
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::parse("set", format!("expected KEY=VALUE, got `{kv}`")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut cfg = parse_config(&pairs)?;
        cfg.workers = workers_from_env()?;
        Ok(cfg)
    }
}

fn execute(cmd: &Command) -> Result<(RunConfig, RunReport), Error> {
    let common = match cmd {
        Command::Populate(c) | Command::Sweep(c) | Command::Lifetime(c) | Command::Efficiency(c) | Command::BathProbe(c) => c,
    };
    let cfg = common.resolve()?;
    let report = match cmd {
        Command::Populate(_) => run_population(&cfg)?,
        Command::Sweep(_) => run_sweep(&cfg)?.1,
        Command::Lifetime(_) => {
            let (taus, report) = run_lifetime(&cfg)?;
            for (de, m, tau) in taus {
                println!("dE={de} {}: tau_D = {tau} ns", m.tag());
            }
            report
        }
        Command::Efficiency(_) => run_efficiency(&cfg, None)?,
        Command::BathProbe(_) => run_bath_probe(&cfg)?,
    };
    Ok((cfg, report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok((cfg, report)) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            for u in &report.unconverged {
                eprintln!("warning: {u}");
            }
            if cfg.strict && !report.all_converged() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ Error::Parse { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
