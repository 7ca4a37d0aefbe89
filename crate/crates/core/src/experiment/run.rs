//! Row evaluation and CSV output.

use std::fmt::Write as _;

use crate::analysis::{analyze, AnalysisError, AnalysisFlag, PicardOptions};
use crate::config::ValidatedConfig;
use crate::experiment::spec::{ExperimentSpec, Mode};
use crate::meanfield::{solve_fixed_point, SolveOptions};
use crate::par;
use crate::rng::RunStreams;
use crate::sim::run_simulation;
use crate::topology::sample_topology;

pub const HEADER: &str = "swept_value,sim_aoi,sim_stderr,analytic_aoi,meanfield_aoi,flags,seed,git_describe";

/// Version string baked in at build time.
pub const GIT_DESCRIBE: &str = env!("AOI_GIT_DESCRIBE");

/// Diagnostics a row can carry.
pub mod flag {
    pub const DIVERGENCE: &str = "divergence_suspected";
    pub const MASS_BELOW_GRID: &str = "mass_below_grid";
    pub const NONCONVERGENCE_ANALYTIC: &str = "nonconvergence:analytic";
    pub const NONCONVERGENCE_MEANFIELD: &str = "nonconvergence:meanfield";
    pub const ANALYSIS_ERROR: &str = "analysis_error";
    pub const EMPTY_TOPOLOGIES: &str = "empty_topologies";
    pub const SIM_ERROR: &str = "sim_error";
    pub const NO_LINKS: &str = "no_links";
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub swept_value: Option<f64>,
    pub sim_aoi: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub analytic_aoi: Option<f64>,
    pub meanfield_aoi: Option<f64>,
    pub flags: Vec<String>,
}

impl SweepRow {
    fn has(&self, f: &str) -> bool {
        self.flags.iter().any(|x| x == f)
    }

    pub fn is_divergent(&self) -> bool {
        self.has(flag::DIVERGENCE)
    }

    fn push(&mut self, f: &str) {
        if !self.has(f) {
            self.flags.push(f.to_string());
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<SweepRow>,
    pub csv: String,
    pub mode: Mode,
}

impl RunOutput {
    /// True when no row produced any of the columns its mode asked for.
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| !row_has_result(r, self.mode))
    }
}

fn row_has_result(r: &SweepRow, mode: Mode) -> bool {
    (mode.wants_sim() && r.sim_aoi.is_some())
        || (mode.wants_meanfield() && r.meanfield_aoi.is_some())
        || (mode.wants_analysis() && r.analytic_aoi.is_some())
}

/// Evaluates the columns `mode` asks for at one configuration.
pub fn run_row(cfg: &ValidatedConfig, mode: Mode, topology_count: usize, swept_value: Option<f64>) -> SweepRow {
    let mut row = SweepRow {
        swept_value,
        sim_aoi: None,
        sim_stderr: None,
        analytic_aoi: None,
        meanfield_aoi: None,
        flags: Vec::new(),
    };
    if mode.wants_sim() {
        match run_simulation(cfg, topology_count) {
            Ok(rep) => {
                if rep.empty_topologies > 0 {
                    row.push(flag::EMPTY_TOPOLOGIES);
                }
                if rep.network_avg_aoi.is_finite() {
                    row.sim_aoi = Some(rep.network_avg_aoi);
                    row.sim_stderr = rep.network_avg_aoi_stderr.is_finite().then_some(rep.network_avg_aoi_stderr);
                } else {
                    row.push(flag::NO_LINKS);
                }
            }
            Err(_) => row.push(flag::SIM_ERROR),
        }
    }
    if mode.wants_meanfield() {
        let solved = par::map_range(topology_count, |i| {
            let mut streams = RunStreams::new(cfg.cfg().seed, i as u64);
            let topo = sample_topology(cfg, &mut streams.topology);
            solve_fixed_point(&topo, cfg, SolveOptions::default())
        });
        let (mut sum, mut n, mut failed) = (0.0, 0usize, false);
        for s in &solved {
            match s {
                Ok(sol) => {
                    sum += sol.cond_aoi.iter().sum::<f64>();
                    n += sol.cond_aoi.len();
                }
                Err(_) => failed = true,
            }
        }
        if failed {
            row.push(flag::NONCONVERGENCE_MEANFIELD);
        } else if n > 0 {
            row.meanfield_aoi = Some(sum / n as f64);
        } else {
            row.push(flag::NO_LINKS);
        }
    }
    if mode.wants_analysis() {
        match analyze(cfg, &PicardOptions::default()) {
            Ok(a) => match a.aoi {
                Ok(est) => {
                    row.analytic_aoi = Some(est.value);
                    for f in est.flags {
                        match f {
                            AnalysisFlag::MassBelowGrid => row.push(flag::MASS_BELOW_GRID),
                            AnalysisFlag::DivergenceSuspected => row.push(flag::DIVERGENCE),
                        }
                    }
                }
                Err(AnalysisError::DivergenceSuspected { .. }) => row.push(flag::DIVERGENCE),
                Err(_) => row.push(flag::ANALYSIS_ERROR),
            },
            Err(AnalysisError::NotConverged { .. }) => row.push(flag::NONCONVERGENCE_ANALYTIC),
            Err(_) => row.push(flag::ANALYSIS_ERROR),
        }
    }
    row
}

/// Runs every row of `spec` and renders the CSV.
pub fn run(spec: &ExperimentSpec) -> RunOutput {
    let rows: Vec<SweepRow> = spec
        .rows()
        .into_iter()
        .map(|(v, cfg)| run_row(&cfg, spec.mode, spec.topology_count, v))
        .collect();
    let csv = render_csv(spec, &rows);
    RunOutput { rows, csv, mode: spec.mode }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn render_csv(spec: &ExperimentSpec, rows: &[SweepRow]) -> String {
    let c = spec.base.cfg();
    let mut out = String::new();
    let _ = writeln!(out, "# aoi-mesh {} ({})", spec.mode, GIT_DESCRIBE);
    for line in c.to_string().lines() {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "# mode = {}", spec.mode);
    if let Some(s) = &spec.sweep {
        let _ = writeln!(out, "# sweep_axis = {}", s.axis.name());
        let vals: Vec<String> = s.values.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "# sweep_values = {}", vals.join(","));
    }
    let _ = writeln!(out, "# topology_count = {}", spec.topology_count);
    let _ = writeln!(
        out,
        "# scale: {w} m x {w} m torus, {n} topologies, {m} measured slots after {u} warm-up slots; \
         a 1 km^2 region averaged over 10000 topologies is the full-size setting",
        w = c.window,
        n = spec.topology_count,
        m = c.measure_slots,
        u = c.warmup_slots,
    );
    let _ = writeln!(out, "{HEADER}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            cell(r.swept_value),
            cell(r.sim_aoi),
            cell(r.sim_stderr),
            cell(r.analytic_aoi),
            cell(r.meanfield_aoi),
            r.flags.join(";"),
            c.seed,
            GIT_DESCRIBE
        );
    }
    out
}
