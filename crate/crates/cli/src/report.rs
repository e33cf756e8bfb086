//! The self-contained run report and its three output encodings.
//!
//! A report embeds the verbatim config text it was produced from, so any
//! report can be re-run or re-encoded later. Numeric results carry their
//! uncertainties (eigenvalue error bars, inequality uncertainty windows,
//! identity-check tolerances). The `work` block records deterministic effort
//! counters rather than wall-clock times so that reruns of the same
//! `(config, seed)` produce byte-identical files.

use anyhow::{bail, Context, Result};
use curvspec_core::bounds::Verdict;
use curvspec_core::eigen::SurfaceSpectra;
use curvspec_core::{BifurcationResult64, InequalityReport64};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

impl Format {
    pub fn parse(raw: &str) -> Option<Format> {
        match raw {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            "plotdata" => Some(Format::Plotdata),
            _ => None,
        }
    }

    fn file_name(self) -> &'static str {
        match self {
            Format::Json => "report.json",
            Format::Csv => "report.csv",
            Format::Plotdata => "report.dat",
        }
    }
}

/// Deterministic effort counters standing in for timing metadata.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Work {
    /// Eigenproblem solves recorded in the report.
    pub eigensolves: usize,
    /// Total solver iterations across those solves.
    pub solver_iterations: usize,
    /// Largest matrix dimension solved.
    pub max_dimension: usize,
}

/// Integral-identity residuals for one surface.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityChecks {
    pub surface: String,
    /// Largest curvature-identity residual over the sampled points.
    pub gauss_residual_max: f64,
    pub gauss_points: usize,
    pub gauss_tolerance: f64,
    /// Total-curvature integral and its combinatorial target.
    pub gauss_bonnet_integral: f64,
    pub gauss_bonnet_target: f64,
    pub gauss_bonnet_rel_err: f64,
    pub gauss_bonnet_tolerance: f64,
    /// Bending-energy lower bound; absent for metric-only surfaces.
    pub willmore: Option<InequalityReport64>,
}

/// A refinement-ladder spectrum labeled with the surface it belongs to.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectraSection {
    pub surface: String,
    #[serde(flatten)]
    pub spectra: SurfaceSpectra<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub seed: u64,
    /// Resolved canonical surface names the job ran on.
    pub surfaces: Vec<String>,
    /// Verbatim config text; parsing it reproduces this report.
    pub config_echo: String,
    pub spectra: Vec<SpectraSection>,
    pub inequalities: Vec<InequalityReport64>,
    pub bifurcations: Vec<BifurcationResult64>,
    pub identities: Vec<IdentityChecks>,
    pub work: Work,
}

impl Report {
    pub fn new(kind: &str, seed: u64, config_echo: String) -> Report {
        Report {
            tool: "curvspec".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            kind: kind.into(),
            seed,
            surfaces: Vec::new(),
            config_echo,
            spectra: Vec::new(),
            inequalities: Vec::new(),
            bifurcations: Vec::new(),
            identities: Vec::new(),
            work: Work::default(),
        }
    }

    /// Fold a spectra section into the effort counters.
    pub fn count_spectra(&mut self, spectra: &SurfaceSpectra<f64>) {
        for level in &spectra.per_level {
            self.work.eigensolves += 1;
            self.work.solver_iterations += level.spectrum.iterations;
            self.work.max_dimension = self.work.max_dimension.max(level.n_vertices);
        }
    }

    /// Worst verdict across every inequality in the report (identity blocks
    /// included): `None` when the report contains no verdicts at all.
    pub fn worst_verdict(&self) -> Option<Verdict> {
        let all = self
            .inequalities
            .iter()
            .chain(self.identities.iter().filter_map(|i| i.willmore.as_ref()));
        let mut worst = None;
        for r in all {
            let rank = |v: Verdict| match v {
                Verdict::Holds => 0,
                Verdict::HoldsWithinUncertainty => 1,
                Verdict::Violation => 2,
            };
            worst = Some(match worst {
                None => r.verdict,
                Some(w) => {
                    if rank(r.verdict) > rank(w) {
                        r.verdict
                    } else {
                        w
                    }
                }
            });
        }
        worst
    }

    pub fn load(path: &Path) -> Result<Report> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading report {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("{} is not a curvspec JSON report", path.display()))
    }
}

/// Write `content` to `dir/name` atomically (temp file + rename).
fn write_atomic(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, content)
        .with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, &target)
        .with_context(|| format!("renaming into {}", target.display()))?;
    Ok(target)
}

/// Emit the report into `dir`. The JSON document is always written (it is
/// the re-runnable artifact); `csv` and `plotdata` write their projection
/// alongside it. Returns the paths written.
pub fn emit(report: &Report, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let json = serde_json::to_string_pretty(report).context("encoding report as JSON")?;
    written.push(write_atomic(dir, Format::Json.file_name(), &(json + "\n"))?);
    match format {
        Format::Json => {}
        Format::Csv => {
            written.push(write_atomic(dir, Format::Csv.file_name(), &to_csv(report))?);
        }
        Format::Plotdata => {
            written.push(write_atomic(
                dir,
                Format::Plotdata.file_name(),
                &to_plotdata(report)?,
            )?);
        }
    }
    Ok(written)
}

/// One row per (surface, level, alpha, beta, eigenvalue index).
pub fn to_csv(report: &Report) -> String {
    let mut out = String::from("surface,level,alpha,beta,index,eigenvalue\n");
    for section in &report.spectra {
        let spectra = &section.spectra;
        for level in &spectra.per_level {
            for (index, value) in level.spectrum.eigenvalues.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{index},{}",
                    section.surface, level.level, spectra.alpha, spectra.beta, fmt_float(*value)
                );
            }
        }
    }
    out
}

/// First-occurrence-preserving deduplication (the sweep interleaves values,
/// so consecutive-only dedup would keep repeats).
fn unique<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut seen: Vec<T> = Vec::new();
    for item in items {
        if !seen.contains(&item) {
            seen.push(item);
        }
    }
    seen
}

/// Whitespace-separated `alpha f(alpha)` columns, one commented block per
/// curve, ready for generic plotting tools.
pub fn to_plotdata(report: &Report) -> Result<String> {
    let mut out = format!("# curvspec {} plotdata\n", report.kind);
    let mut blocks = 0usize;
    for b in &report.bifurcations {
        let _ = writeln!(
            out,
            "# surface: {}  f(alpha) = lambda2(alpha)*area - 4*pi*(2 - 2*alpha)  alpha_x = {}",
            b.surface,
            fmt_float(b.alpha_x)
        );
        for (a, f) in &b.samples {
            let _ = writeln!(out, "{} {}", fmt_float(*a), fmt_float(*f));
        }
        out.push('\n');
        blocks += 1;
    }
    // Spectrum sweeps: one block per surface and beta, listing the highest
    // requested eigenvalue band against alpha.
    if !report.spectra.is_empty() {
        let keys = unique(
            report
                .spectra
                .iter()
                .map(|s| (s.surface.clone(), s.spectra.beta)),
        );
        for (surface, beta) in keys {
            let rows: Vec<(f64, f64)> = report
                .spectra
                .iter()
                .filter(|s| s.surface == surface && s.spectra.beta == beta)
                .filter_map(|s| {
                    s.spectra
                        .extrapolated
                        .last()
                        .map(|e| (s.spectra.alpha, e.value))
                })
                .collect();
            if rows.is_empty() {
                continue;
            }
            let _ = writeln!(
                out,
                "# surface: {surface}  f(alpha) = extrapolated eigenvalue {}  (beta = {})",
                report.spectra[0]
                    .spectra
                    .extrapolated
                    .len()
                    .saturating_sub(1),
                fmt_float(beta)
            );
            for (a, v) in rows {
                let _ = writeln!(out, "{} {}", fmt_float(a), fmt_float(v));
            }
            out.push('\n');
            blocks += 1;
        }
    }
    // Verification sweeps: margin against alpha, per predicate and beta.
    if !report.inequalities.is_empty() {
        let keys = unique(
            report
                .inequalities
                .iter()
                .map(|r| (r.surface.clone(), r.predicate.clone(), r.beta)),
        );
        for (surface, predicate, beta) in keys {
            let rows: Vec<(f64, f64)> = report
                .inequalities
                .iter()
                .filter(|r| r.surface == surface && r.predicate == predicate && r.beta == beta)
                .map(|r| (r.alpha, r.margin))
                .collect();
            if rows.len() < 2 {
                continue;
            }
            let _ = writeln!(
                out,
                "# surface: {surface}  f(alpha) = margin of {predicate}  (beta = {})",
                fmt_float(beta)
            );
            for (a, m) in rows {
                let _ = writeln!(out, "{} {}", fmt_float(a), fmt_float(m));
            }
            out.push('\n');
            blocks += 1;
        }
    }
    if blocks == 0 && report.kind != "identities" {
        bail!("report contains no sweep to plot; use --format json or csv");
    }
    if blocks == 0 {
        out.push_str("# identity reports carry no plottable sweep\n");
    }
    Ok(out)
}

/// Shortest decimal that round-trips the value exactly (Rust's default f64
/// Display), keeping emitted files stable across runs.
fn fmt_float(v: f64) -> String {
    format!("{v}")
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::HoldsWithinUncertainty => "holds-within-uncertainty",
        Verdict::Violation => "VIOLATION",
    }
}

/// Human-oriented one-line-per-result summary for stdout. Deterministic for
/// a given report.
pub fn summarize(report: &Report) -> String {
    let mut out = String::new();
    for section in &report.spectra {
        let s = &section.spectra;
        let values: Vec<String> = s
            .extrapolated
            .iter()
            .map(|e| format!("{} +- {}", fmt_float(e.value), fmt_float(e.uncertainty)))
            .collect();
        let _ = writeln!(
            out,
            "spectrum {} alpha={} beta={}: [{}]",
            section.surface,
            fmt_float(s.alpha),
            fmt_float(s.beta),
            values.join(", ")
        );
    }
    for r in &report.inequalities {
        let _ = writeln!(
            out,
            "verify {} {} alpha={} beta={}: lhs={} rhs={} margin={} uncertainty={} -> {}",
            r.surface,
            r.predicate,
            fmt_float(r.alpha),
            fmt_float(r.beta),
            fmt_float(r.lhs),
            fmt_float(r.rhs),
            fmt_float(r.margin),
            fmt_float(r.uncertainty),
            verdict_str(r.verdict)
        );
    }
    for b in &report.bifurcations {
        let _ = writeln!(
            out,
            "bifurcation {}: alpha_x={} method={} window=[{}, {}] crossing_found={}",
            b.surface,
            fmt_float(b.alpha_x),
            match b.method {
                curvspec_core::bounds::BifurcationMethod::ClosedForm => "closed_form",
                curvspec_core::bounds::BifurcationMethod::Numeric => "numeric",
            },
            fmt_float(b.window.0),
            fmt_float(b.window.1),
            b.crossing_found
        );
    }
    for i in &report.identities {
        let willmore = match &i.willmore {
            Some(w) => format!("margin={} -> {}", fmt_float(w.margin), verdict_str(w.verdict)),
            None => "n/a (metric-only surface)".into(),
        };
        let _ = writeln!(
            out,
            "identities {}: gauss_max={} (tol {}), total_curvature={} target={} rel_err={} (tol {}), bending {}",
            i.surface,
            fmt_float(i.gauss_residual_max),
            fmt_float(i.gauss_tolerance),
            fmt_float(i.gauss_bonnet_integral),
            fmt_float(i.gauss_bonnet_target),
            fmt_float(i.gauss_bonnet_rel_err),
            fmt_float(i.gauss_bonnet_tolerance),
            willmore
        );
    }
    let all: Vec<Verdict> = report
        .inequalities
        .iter()
        .map(|r| r.verdict)
        .chain(
            report
                .identities
                .iter()
                .filter_map(|i| i.willmore.as_ref().map(|w| w.verdict)),
        )
        .collect();
    if !all.is_empty() {
        let holds = all.iter().filter(|v| **v == Verdict::Holds).count();
        let close = all
            .iter()
            .filter(|v| **v == Verdict::HoldsWithinUncertainty)
            .count();
        let bad = all.iter().filter(|v| **v == Verdict::Violation).count();
        let _ = writeln!(
            out,
            "verdicts: {holds} hold, {close} within uncertainty, {bad} violations"
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sweep_yields_header_only_csv() {
        let report = Report::new("spectrum", 1, String::new());
        assert_eq!(to_csv(&report), "surface,level,alpha,beta,index,eigenvalue\n");
    }

    #[test]
    fn json_round_trip_is_the_identity() {
        let mut report = Report::new("verify", 7, "[job]\nkind = verify\n".into());
        report.surfaces.push("round_sphere(r=1)".into());
        report.inequalities.push(InequalityReport64::new(
            "lambda2_upper_bound",
            "round_sphere(r=1)".into(),
            0.25,
            0.0,
            1.5,
            1.5,
            1e-9,
        ));
        let encoded = serde_json::to_string_pretty(&report).unwrap();
        let decoded: Report = serde_json::from_str(&encoded).unwrap();
        let re_encoded = serde_json::to_string_pretty(&decoded).unwrap();
        assert_eq!(encoded, re_encoded);
    }
}
