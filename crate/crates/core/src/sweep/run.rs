use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{DistanceGrid, RunConfig};
use crate::bath::{spectra_from_tables, BathTable, SpectrumOptions};
use crate::dynamics::{
    cret_propagate, neq_fret_rate, propagate_fret, DynamicsOptions, Method, PairKernel, PopulationTrajectory,
    RateTrajectory,
};
use crate::error::{Error, Result};
use crate::golden_rule::{efficiency_distance, efficiency_forward};
use crate::kinetics::{effective_rate, EffectiveRate};
use crate::model::constants::FS_PER_NS;
use crate::model::{DimerSpec, Site};

/// Distance at which lifetimes are deduced.
pub const R_STAR: f64 = 0.5;

/// Files written by a command and the points whose results could not be
/// trusted (plateau not converged, or no 1/e crossing within the cap).
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub unconverged: Vec<String>,
}

impl RunReport {
    pub fn all_converged(&self) -> bool {
        self.unconverged.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r_over_r0: f64,
    /// Effective rates in fs⁻¹; `None` when the method was not requested or
    /// no rate could be extracted.
    pub k_eff_cret: Option<f64>,
    pub k_eff_fret: Option<f64>,
}

impl SweepRow {
    pub fn k_eff(&self, method: Method) -> Option<f64> {
        match method {
            Method::Cret => self.k_eff_cret,
            Method::Fret => self.k_eff_fret,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub delta_e: f64,
    pub rows: Vec<SweepRow>,
}

/// Shared per-case inputs: the bath kernel tables and the FRET kernels at
/// R = R₀ for each energy gap (rescaled by (R₀/R)⁶ per point).
pub struct CaseContext {
    pub config: RunConfig,
    pub opts: DynamicsOptions,
    pub kernel: PairKernel,
}

impl CaseContext {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let opts = config.dynamics_options();
        let kernel = PairKernel::build(&config.bath()?, &opts)?;
        Ok(Self { config: config.clone(), opts, kernel })
    }

    /// FRET rate kernels at R = R₀.
    pub fn fret_base(&self, delta_e: f64) -> Result<RateTrajectory> {
        let d = DimerSpec::from_gap(delta_e, self.config.j0, 1.0)?;
        neq_fret_rate(&d, &self.kernel, self.kernel.horizon())
    }

    pub fn cret(&self, delta_e: f64, r: f64, t_max: f64) -> Result<PopulationTrajectory> {
        let d = DimerSpec::from_gap(delta_e, self.config.j0, r)?;
        cret_propagate(&d, &self.kernel, t_max, &self.opts)
    }

    pub fn fret(&self, base: &RateTrajectory, r: f64, t_max: f64) -> Result<PopulationTrajectory> {
        propagate_fret(&base.scaled(r.powi(-3)), t_max, &self.opts)
    }

    /// Effective rate with the horizon doubled from `t_max` until the 1/e
    /// criterion is crossed, up to `t_cap`.
    pub fn effective_rate<F>(&self, propagate: F) -> Result<(EffectiveRate, PopulationTrajectory)>
    where
        F: Fn(f64) -> Result<PopulationTrajectory>,
    {
        let mut t = self.config.t_max;
        loop {
            let traj = propagate(t)?;
            match effective_rate(&traj) {
                Ok(e) => return Ok((e, traj)),
                Err(Error::NoCrossing { .. }) if t < self.config.t_cap => t = (2.0 * t).min(self.config.t_cap),
                Err(e) => return Err(e),
            }
        }
    }

    fn point(&self, method: Method, delta_e: f64, base: &RateTrajectory, r: f64) -> Result<Option<f64>> {
        if self.config.j0 == 0.0 {
            return Ok(Some(0.0));
        }
        let res = match method {
            Method::Cret => self.effective_rate(|t| self.cret(delta_e, r, t)),
            Method::Fret => self.effective_rate(|t| self.fret(base, r, t)),
        };
        match res {
            Ok((e, _)) => Ok(Some(e.k_eff)),
            Err(Error::NoCrossing { .. } | Error::PlateauNotConverged) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Effective rates on `grid` for one energy gap. Rows come back in grid
    /// order whatever the thread count.
    pub fn sweep(&self, delta_e: f64, grid: &DistanceGrid) -> Result<SweepResult> {
        let base = self.fret_base(delta_e)?;
        let methods = &self.config.methods;
        let rows = grid
            .points()
            .into_par_iter()
            .map(|r| -> Result<SweepRow> {
                let k = |m: Method| -> Result<Option<f64>> {
                    if methods.contains(&m) {
                        self.point(m, delta_e, &base, r)
                    } else {
                        Ok(None)
                    }
                };
                Ok(SweepRow { r_over_r0: r, k_eff_cret: k(Method::Cret)?, k_eff_fret: k(Method::Fret)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SweepResult { delta_e, rows })
    }
}

fn with_pool<T: Send>(config: &RunConfig, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::domain(format!("cannot start {n} workers: {e}")))?
            .install(f),
        None => f(),
    }
}

fn create(config: &RunConfig, name: &str, report: &mut RunReport) -> Result<BufWriter<File>> {
    fs::create_dir_all(&config.out_dir)?;
    let path = config.out_dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "# {}", config.describe())?;
    report.files.push(path);
    Ok(w)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NaN".to_string(), |v| v.to_string())
}

fn tag(m: Method) -> &'static str {
    m.tag()
}

/// Effective rates over the configured distance grid, one file
/// `sweep_dE<ΔE>.csv` per energy gap.
pub fn run_sweep(config: &RunConfig) -> Result<(Vec<SweepResult>, RunReport)> {
    with_pool(config, || {
        let ctx = CaseContext::new(config)?;
        let mut report = RunReport::default();
        let mut results = Vec::new();
        for &de in &config.delta_e {
            let res = ctx.sweep(de, &config.grid)?;
            write_sweep(config, &res, &mut report)?;
            results.push(res);
        }
        Ok((results, report))
    })
}

fn write_sweep(config: &RunConfig, res: &SweepResult, report: &mut RunReport) -> Result<()> {
    let mut w = create(config, &format!("sweep_dE{}.csv", res.delta_e), report)?;
    let methods = &config.methods;
    let mut header = vec!["R_over_R0".to_string()];
    header.extend(methods.iter().map(|&m| format!("k_eff_{}", tag(m))));
    header.extend(methods.iter().map(|&m| format!("k_eff_{}_r6", tag(m))));
    writeln!(w, "{}", header.join(","))?;
    for row in &res.rows {
        let mut cols = vec![row.r_over_r0.to_string()];
        cols.extend(methods.iter().map(|&m| opt(row.k_eff(m))));
        cols.extend(methods.iter().map(|&m| opt(row.k_eff(m).map(|k| k * row.r_over_r0.powi(6)))));
        writeln!(w, "{}", cols.join(","))?;
        for &m in methods {
            if row.k_eff(m).is_none() {
                report
                    .unconverged
                    .push(format!("{} dE={} r={}: no effective rate", tag(m), res.delta_e, row.r_over_r0));
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// τ_D = 2⁶/k_eff* in ns, with k_eff* the effective rate at R/R₀ = 1/2.
pub fn deduce_lifetime(sweep: &SweepResult, method: Method) -> Result<f64> {
    let row = sweep
        .rows
        .iter()
        .find(|r| (r.r_over_r0 - R_STAR).abs() < 1e-12)
        .ok_or_else(|| Error::domain("sweep does not contain R/R0 = 1/2"))?;
    let k = row
        .k_eff(method)
        .ok_or_else(|| Error::domain(format!("no {} effective rate at R/R0 = 1/2", tag(method))))?;
    if !(k > 0.0) {
        return Err(Error::domain("effective rate at R/R0 = 1/2 must be positive"));
    }
    Ok(R_STAR.powi(-6) / k / FS_PER_NS)
}

/// Lifetime deduced by each method and energy gap; `lifetime.csv`.
pub fn run_lifetime(config: &RunConfig) -> Result<(Vec<(f64, Method, f64)>, RunReport)> {
    with_pool(config, || {
        let ctx = CaseContext::new(config)?;
        let mut report = RunReport::default();
        let mut w = create(config, "lifetime.csv", &mut report)?;
        writeln!(w, "dE_cm1,method,k_eff_star_per_fs,tau_D_ns")?;
        let grid = DistanceGrid::List(vec![R_STAR]);
        let mut out = Vec::new();
        for &de in &config.delta_e {
            let res = ctx.sweep(de, &grid)?;
            for &m in &config.methods {
                let k = res.rows[0].k_eff(m);
                let tau = deduce_lifetime(&res, m).ok();
                if tau.is_none() {
                    report.unconverged.push(format!("{} dE={de}: no lifetime", tag(m)));
                }
                writeln!(w, "{},{},{},{}", de, tag(m), opt(k), opt(tau))?;
                if let Some(t) = tau {
                    out.push((de, m, t));
                }
            }
        }
        w.flush()?;
        Ok((out, report))
    })
}

/// Efficiencies k_eff/(k_eff + 1/τ_D) for each method next to the ideal
/// 1/(1 + r⁶), one file `efficiency_dE<ΔE>.csv` per energy gap. τ_D is
/// `tau_d_ns`, else the configured value, else deduced at R/R₀ = 1/2 (from
/// CRET when requested, otherwise FRET).
pub fn run_efficiency(config: &RunConfig, tau_d_ns: Option<f64>) -> Result<RunReport> {
    with_pool(config, || {
        let ctx = CaseContext::new(config)?;
        let mut report = RunReport::default();
        let lead = config.methods[0];
        for &de in &config.delta_e {
            let tau = match tau_d_ns.or(config.tau_d_ns) {
                Some(t) => t,
                None => deduce_lifetime(&ctx.sweep(de, &DistanceGrid::List(vec![R_STAR]))?, lead)?,
            };
            let res = ctx.sweep(de, &config.grid)?;
            let mut w = create(config, &format!("efficiency_dE{de}.csv"), &mut report)?;
            writeln!(w, "# tau_D_ns={tau}")?;
            let mut header = vec!["R_over_R0".to_string()];
            header.extend(config.methods.iter().map(|&m| format!("E_{}", tag(m))));
            header.push("E_ideal".into());
            writeln!(w, "{}", header.join(","))?;
            for row in &res.rows {
                let mut cols = vec![row.r_over_r0.to_string()];
                for &m in &config.methods {
                    let e = row.k_eff(m).map(|k| efficiency_forward(k, tau));
                    if e.is_none() {
                        report.unconverged.push(format!("{} dE={de} r={}: no efficiency", tag(m), row.r_over_r0));
                    }
                    cols.push(opt(e));
                }
                cols.push(efficiency_distance(row.r_over_r0).to_string());
                writeln!(w, "{}", cols.join(","))?;
            }
            w.flush()?;
        }
        Ok(report)
    })
}

/// Population trajectories to `t_max` for every (method, ΔE, R/R₀), one
/// file `pop_<METHOD>_dE<ΔE>_r<R/R₀>.csv` each.
pub fn run_population(config: &RunConfig) -> Result<RunReport> {
    with_pool(config, || {
        let ctx = CaseContext::new(config)?;
        let mut report = RunReport::default();
        for &m in &config.methods {
            for &de in &config.delta_e {
                for r in config.grid.points() {
                    let (traj, rates_ok) = match m {
                        Method::Cret => (ctx.cret(de, r, config.t_max)?, true),
                        Method::Fret => {
                            let d = DimerSpec::from_gap(de, config.j0, r)?;
                            let rates = neq_fret_rate(&d, &ctx.kernel, ctx.kernel.horizon())?;
                            (propagate_fret(&rates, config.t_max, &ctx.opts)?, rates.converged)
                        }
                    };
                    let converged = traj.plateau.converged && rates_ok;
                    if !converged {
                        report.unconverged.push(format!("{} dE={de} r={r}: plateau not converged", tag(m)));
                    }
                    let name = format!("pop_{}_dE{}_r{}.csv", tag(m), de, r);
                    let mut w = create(config, &name, &mut report)?;
                    write_population(&mut w, config, &traj, converged)?;
                    w.flush()?;
                }
            }
        }
        Ok(report)
    })
}

fn write_population<W: Write>(w: &mut W, config: &RunConfig, traj: &PopulationTrajectory, converged: bool) -> Result<()> {
    let p = traj.plateau;
    writeln!(
        w,
        "# method={} P_D_inf={} P_A_inf={} settled={} positivity_violated={}",
        tag(traj.method),
        p.p_d,
        p.p_a,
        p.settled,
        traj.positivity_violated
    )?;
    // exponential populations P_D∞ + P_A∞·e^{−t/τ_RET}, i.e. forward rate k_eff
    let expo = if config.fig3 { effective_rate(traj).ok() } else { None };
    if let Some(e) = expo {
        writeln!(w, "# k_eff_per_fs={} tau_RET_fs={}", e.k_eff, e.tau_ret)?;
    }
    let mut header = "t_fs,P_D,P_A,coh_re,coh_im,converged".to_string();
    if config.fig3 {
        header.push_str(",P_D_exp,P_A_exp");
    }
    writeln!(w, "{header}")?;
    let coh = match config.frame {
        crate::dynamics::Frame::Polaron => traj.coherence.as_ref(),
        crate::dynamics::Frame::Original => traj.coherence_original.as_ref(),
    };
    for i in 0..traj.t_grid.len() {
        let t = traj.t_grid[i];
        write!(w, "{},{},{},", t, traj.p_d[i], traj.p_a[i])?;
        match coh {
            Some(c) => write!(w, "{},{}", c[i].re, c[i].im)?,
            None => write!(w, ",")?,
        }
        write!(w, ",{converged}")?;
        if config.fig3 {
            match expo {
                Some(e) => {
                    let pd = p.p_d + p.p_a * (-t / e.tau_ret).exp();
                    write!(w, ",{},{}", pd, 1.0 - pd)?;
                }
                None => write!(w, ",,")?,
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Lineshape functions g(t) of both sites and the donor-emission /
/// acceptor-absorption spectra (E_A = 0, E_D = ΔE).
pub fn run_bath_probe(config: &RunConfig) -> Result<RunReport> {
    with_pool(config, || {
        let bath = config.bath()?;
        let mut report = RunReport::default();
        let donor = BathTable::build(bath.donor(), config.dt, config.memory)?;
        let acceptor = BathTable::build(bath.acceptor(), config.dt, config.memory)?;
        for (site, table) in [(Site::Donor, &donor), (Site::Acceptor, &acceptor)] {
            let mut w = create(config, &format!("g_{}.csv", site.tag()), &mut report)?;
            table.lineshape_table(site).write_csv(&mut w)?;
            w.flush()?;
        }
        let sopts = SpectrumOptions { dt: config.dt, horizon: config.memory, ..Default::default() };
        for (k, &de) in config.delta_e.iter().enumerate() {
            let (l, i) = spectra_from_tables(&donor, de, &acceptor, 0.0, &sopts)?;
            let mut w = create(config, &format!("emission_dE{de}.csv"), &mut report)?;
            l.write_csv(&mut w)?;
            w.flush()?;
            if k == 0 {
                let mut w = create(config, "absorption.csv", &mut report)?;
                i.write_csv(&mut w)?;
                w.flush()?;
            }
        }
        Ok(report)
    })
}

/// Reads a sweep file back (comment lines skipped).
pub fn read_sweep_csv(path: &Path, delta_e: f64) -> Result<SweepResult> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::parse(path.display().to_string(), "empty file"))?
        .split(',')
        .collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (c_cret, c_fret) = (col("k_eff_CRET"), col("k_eff_FRET"));
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        let get = |c: Option<usize>| -> Result<Option<f64>> {
            match c {
                None => Ok(None),
                Some(c) => {
                    let s = f.get(c).ok_or_else(|| Error::parse(header[c], "missing column"))?;
                    let v: f64 = s.parse().map_err(|_| Error::parse(header[c], format!("`{s}` is not a number")))?;
                    Ok(v.is_finite().then_some(v))
                }
            }
        };
        let r: f64 = f[0].parse().map_err(|_| Error::parse("R_over_R0", format!("`{}` is not a number", f[0])))?;
        rows.push(SweepRow { r_over_r0: r, k_eff_cret: get(c_cret)?, k_eff_fret: get(c_fret)? });
    }
    Ok(SweepResult { delta_e, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifetime_from_exact_power_law() {
        // k_eff = (1/τ_D)(R₀/R)⁶ recovers τ_D
        let tau_ns = 0.25;
        let rows = [0.2, 0.35, 0.5]
            .iter()
            .map(|&r| {
                let k = 1.0 / (tau_ns * FS_PER_NS) * r_pow(r);
                SweepRow { r_over_r0: r, k_eff_cret: Some(k), k_eff_fret: Some(k) }
            })
            .collect();
        let s = SweepResult { delta_e: 800.0, rows };
        assert!((deduce_lifetime(&s, Method::Cret).unwrap() - tau_ns).abs() < 1e-15);
        assert!(deduce_lifetime(&SweepResult { delta_e: 800.0, rows: vec![] }, Method::Fret).is_err());
    }

    fn r_pow(r: f64) -> f64 {
        r.powi(-6)
    }
}
