//! Flat `key = value` job configuration with `[section]` headers.
//!
//! The format is line-oriented: blank lines and `#` comments are skipped,
//! section headers are bracketed names, and every other line must read
//! `key = value`. Parse and validation errors carry the line number and the
//! field they refer to.

use anyhow::{anyhow, bail, Result};
use curvspec_core::bounds::VerifyPath;
use curvspec_core::geometry::CatalogSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JobKind {
    Spectrum,
    Verify,
    Bifurcation,
    Identities,
}

impl JobKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JobKind::Spectrum => "spectrum",
            JobKind::Verify => "verify",
            JobKind::Bifurcation => "bifurcation",
            JobKind::Identities => "identities",
        }
    }

    fn parse(raw: &str) -> Option<Self> {
        match raw {
            "spectrum" => Some(JobKind::Spectrum),
            "verify" => Some(JobKind::Verify),
            "bifurcation" => Some(JobKind::Bifurcation),
            "identities" => Some(JobKind::Identities),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    Lambda1,
    Lambda2,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingMethod {
    Auto,
    ClosedForm,
    Numeric,
}

/// A fully validated job description.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub kind: JobKind,
    /// Resolved surface spec; `None` only for `identities`, which then runs
    /// the whole standard catalog.
    pub surface: Option<CatalogSpec<f64>>,
    /// Refinement ladder; empty means "pick a default for the domain type".
    pub levels: Vec<usize>,
    pub k: usize,
    pub seed: u64,
    /// Cartesian sweep `alphas x betas`.
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub predicate: Predicate,
    pub path: VerifyPath,
    pub grid: usize,
    pub method: CrossingMethod,
    /// Output directory from the config file (flag overrides).
    pub out: Option<String>,
    /// Output format from the config file (flag overrides).
    pub format: Option<String>,
    /// The verbatim config text, echoed into every report.
    pub echo: String,
}

/// One `key = value` occurrence, with its source line for diagnostics.
struct Entry {
    section: String,
    key: String,
    value: String,
    line: usize,
    used: bool,
}

struct RawConfig {
    entries: Vec<Entry>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut section = String::from("");
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("config line {line}: unterminated section header"))?
                    .trim();
                if !matches!(name, "job" | "surface" | "operator" | "bifurcation") {
                    bail!("config line {line}: unknown section [{name}] (expected [job], [surface], [operator], or [bifurcation])");
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| {
                anyhow!("config line {line}: expected `key = value`, got `{trimmed}`")
            })?;
            let key = key.trim();
            if key.is_empty() {
                bail!("config line {line}: empty key");
            }
            if section.is_empty() {
                bail!("config line {line}: key `{key}` appears before any [section] header");
            }
            entries.push(Entry {
                section: section.clone(),
                key: key.to_string(),
                value: value.trim().to_string(),
                line,
                used: false,
            });
        }
        Ok(RawConfig { entries })
    }

    /// Take the unique value of `section.key`; duplicate keys are an error.
    fn take(&mut self, section: &str, key: &str) -> Result<Option<(String, usize)>> {
        let mut found: Option<(String, usize)> = None;
        for e in &mut self.entries {
            if e.section == section && e.key == key {
                if let Some((_, first)) = &found {
                    bail!(
                        "config line {}: duplicate key `{key}` in [{section}] (first at line {first})",
                        e.line
                    );
                }
                e.used = true;
                found = Some((e.value.clone(), e.line));
            }
        }
        Ok(found)
    }

    fn finish(self) -> Result<()> {
        if let Some(e) = self.entries.iter().find(|e| !e.used) {
            bail!(
                "config line {}: unknown key `{}` in [{}]",
                e.line,
                e.key,
                e.section
            );
        }
        Ok(())
    }
}

fn parse_scalar<T: std::str::FromStr>(raw: &str, line: usize, field: &str) -> Result<T> {
    raw.parse::<T>()
        .map_err(|_| anyhow!("config line {line}: field `{field}`: cannot parse `{raw}`"))
}

fn parse_list<T: std::str::FromStr>(raw: &str, line: usize, field: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = raw
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        bail!("config line {line}: field `{field}` is empty");
    }
    items
        .into_iter()
        .map(|s| parse_scalar::<T>(s, line, field))
        .collect()
}

/// `start stop count` -> inclusive linear grid.
fn parse_range(raw: &str, line: usize, field: &str) -> Result<Vec<f64>> {
    let parts = parse_list::<f64>(raw, line, field)?;
    if parts.len() != 3 {
        bail!("config line {line}: field `{field}` wants `start stop count`, got {} values", parts.len());
    }
    let (start, stop) = (parts[0], parts[1]);
    let count = parts[2];
    if count.fract() != 0.0 || count < 1.0 {
        bail!("config line {line}: field `{field}`: count must be a positive integer");
    }
    let count = count as usize;
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Values for one sweep axis: an explicit list, a `start stop count` range,
/// or the default `[fallback]`.
fn sweep_axis(
    raw: &mut RawConfig,
    list_key: &str,
    range_key: &str,
    fallback: f64,
) -> Result<Vec<f64>> {
    let list = raw.take("operator", list_key)?;
    let range = raw.take("operator", range_key)?;
    match (list, range) {
        (Some((_, l1)), Some((_, l2))) => bail!(
            "config line {}: `{range_key}` conflicts with `{list_key}` at line {l1}",
            l2
        ),
        (Some((v, line)), None) => parse_list::<f64>(&v, line, list_key),
        (None, Some((v, line))) => parse_range(&v, line, range_key),
        (None, None) => Ok(vec![fallback]),
    }
}

impl JobConfig {
    /// Parse and validate a config for the given subcommand kind. A seed
    /// given on the command line overrides the config seed (and therefore
    /// also names the default bumpy sphere).
    pub fn from_text(text: &str, kind: JobKind, seed_override: Option<u64>) -> Result<JobConfig> {
        let mut raw = RawConfig::parse(text)?;

        if let Some((v, line)) = raw.take("job", "kind")? {
            let stated = JobKind::parse(&v)
                .ok_or_else(|| anyhow!("config line {line}: field `kind`: unknown job kind `{v}`"))?;
            if stated != kind {
                bail!(
                    "config line {line}: field `kind`: config says `{}` but the subcommand is `{}`",
                    stated.as_str(),
                    kind.as_str()
                );
            }
        }

        let k = match raw.take("job", "k")? {
            Some((v, line)) => {
                let k: usize = parse_scalar(&v, line, "k")?;
                let floor = if kind == JobKind::Spectrum { 1 } else { 2 };
                if k < floor {
                    bail!("config line {line}: field `k`: {} jobs need k >= {floor}", kind.as_str());
                }
                k
            }
            None => match kind {
                JobKind::Spectrum => 5,
                _ => 2,
            },
        };
        let config_seed = match raw.take("job", "seed")? {
            Some((v, line)) => Some(parse_scalar(&v, line, "seed")?),
            None => None,
        };
        let seed = seed_override.or(config_seed).unwrap_or(1);
        let out = raw.take("job", "out")?.map(|(v, _)| v);
        let format = match raw.take("job", "format")? {
            Some((v, line)) => {
                if !matches!(v.as_str(), "json" | "csv" | "plotdata") {
                    bail!("config line {line}: field `format`: expected json, csv, or plotdata");
                }
                Some(v)
            }
            None => None,
        };

        let surface = match raw.take("surface", "name")? {
            Some((v, line)) => {
                let mut spec = CatalogSpec::<f64>::parse(&v).map_err(|e| {
                    anyhow!("config line {line}: field `name`: {e}")
                })?;
                // The job seed names the default bumpy sphere; an explicit
                // seed in the surface string wins.
                if let CatalogSpec::BumpySphere { seed: s, .. } = &mut spec {
                    if !v.contains("seed") {
                        *s = seed;
                    }
                }
                Some(spec)
            }
            None => {
                if kind != JobKind::Identities {
                    bail!("config: [surface] name is required for {} jobs", kind.as_str());
                }
                None
            }
        };
        if let Some((v, line)) = raw.take("surface", "curvature")? {
            let c: i8 = parse_scalar(&v, line, "curvature")?;
            let spec = surface.as_ref().ok_or_else(|| {
                anyhow!("config line {line}: field `curvature` given without a surface name")
            })?;
            let actual = spec
                .build()
                .map_err(|e| anyhow!("config line {line}: {e}"))?
                .immersion
                .ambient()
                .curvature::<f64>();
            if f64::from(c) != actual {
                bail!(
                    "config line {line}: field `curvature`: surface lives in curvature {actual}, not {c}"
                );
            }
        }
        let levels = match raw.take("surface", "levels")? {
            Some((v, line)) => {
                let levels = parse_list::<usize>(&v, line, "levels")?;
                if !levels.windows(2).all(|w| w[0] < w[1]) {
                    bail!("config line {line}: field `levels`: must be strictly ascending");
                }
                levels
            }
            None => Vec::new(),
        };

        let alphas = sweep_axis(&mut raw, "alpha", "alpha_range", 0.0)?;
        let betas = sweep_axis(&mut raw, "beta", "beta_range", 0.0)?;
        if kind == JobKind::Verify {
            for &a in &alphas {
                for &b in &betas {
                    if 4.0 * a + b < 0.0 {
                        bail!(
                            "config: verify sweep contains inadmissible weights alpha={a}, beta={b} (need 4*alpha + beta >= 0)"
                        );
                    }
                }
            }
        }
        let predicate = match raw.take("operator", "predicate")? {
            Some((v, line)) => match v.as_str() {
                "lambda1" => Predicate::Lambda1,
                "lambda2" => Predicate::Lambda2,
                "both" => Predicate::Both,
                _ => bail!("config line {line}: field `predicate`: expected lambda1, lambda2, or both"),
            },
            None => Predicate::Both,
        };
        let path = match raw.take("operator", "path")? {
            Some((v, line)) => match v.as_str() {
                "auto" => VerifyPath::Auto,
                "closed_form" => VerifyPath::ClosedForm,
                "fem" => VerifyPath::Fem,
                _ => bail!("config line {line}: field `path`: expected auto, closed_form, or fem"),
            },
            None => VerifyPath::Auto,
        };

        let grid = match raw.take("bifurcation", "grid")? {
            Some((v, line)) => {
                let g: usize = parse_scalar(&v, line, "grid")?;
                if g < 2 {
                    bail!("config line {line}: field `grid`: need at least 2 points");
                }
                g
            }
            None => 0, // keep the library default
        };
        let method = match raw.take("bifurcation", "method")? {
            Some((v, line)) => match v.as_str() {
                "auto" => CrossingMethod::Auto,
                "closed_form" => CrossingMethod::ClosedForm,
                "numeric" => CrossingMethod::Numeric,
                _ => bail!("config line {line}: field `method`: expected auto, closed_form, or numeric"),
            },
            None => CrossingMethod::Auto,
        };

        raw.finish()?;
        Ok(JobConfig {
            kind,
            surface,
            levels,
            k,
            seed,
            alphas,
            betas,
            predicate,
            path,
            grid,
            method,
            out,
            format,
            echo: text.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_spectrum_config() {
        let text = "\
# demo
[job]
kind = spectrum
k = 5
seed = 3

[surface]
name = clifford_torus
levels = 4 5 6

[operator]
alpha = 0, 0.25, 0.5
beta = 0
";
        let cfg = JobConfig::from_text(text, JobKind::Spectrum, None).unwrap();
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.levels, vec![4, 5, 6]);
        assert_eq!(cfg.alphas, vec![0.0, 0.25, 0.5]);
        assert_eq!(cfg.betas, vec![0.0]);
        assert_eq!(cfg.echo, text);
    }

    #[test]
    fn reports_the_offending_line() {
        let text = "[job]\nkind = spectrum\n\n[surface]\nname = round_sphere\nlevels = 3 2\n";
        let err = JobConfig::from_text(text, JobKind::Spectrum, None).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 6"), "got: {msg}");
        assert!(msg.contains("levels"), "got: {msg}");
    }

    #[test]
    fn rejects_unknown_keys_with_location() {
        let text = "[surface]\nname = round_sphere\nchart = polar\n";
        let err = JobConfig::from_text(text, JobKind::Spectrum, None).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 3") && msg.contains("chart"), "got: {msg}");
    }

    #[test]
    fn rejects_kind_subcommand_conflicts() {
        let text = "[job]\nkind = verify\n[surface]\nname = round_sphere\n";
        let err = JobConfig::from_text(text, JobKind::Spectrum, None).unwrap_err();
        assert!(format!("{err}").contains("subcommand"));
    }

    #[test]
    fn verify_sweeps_must_stay_admissible() {
        let text = "[surface]\nname = round_sphere\n[operator]\nalpha = 0.1\nbeta = -1\n";
        let err = JobConfig::from_text(text, JobKind::Verify, None).unwrap_err();
        assert!(format!("{err}").contains("4*alpha + beta"));
    }

    #[test]
    fn range_axis_expands_inclusively() {
        let text = "[surface]\nname = round_sphere\n[operator]\nalpha_range = 0 1 5\n";
        let cfg = JobConfig::from_text(text, JobKind::Spectrum, None).unwrap();
        assert_eq!(cfg.alphas, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn job_seed_names_the_default_bumpy_sphere() {
        let text = "[job]\nseed = 9\n[surface]\nname = bumpy_sphere(amplitude=0.15)\n";
        let cfg = JobConfig::from_text(text, JobKind::Spectrum, None).unwrap();
        match cfg.surface.unwrap() {
            CatalogSpec::BumpySphere { seed, .. } => assert_eq!(seed, 9),
            other => panic!("unexpected spec {other:?}"),
        }
        let explicit = "[job]\nseed = 9\n[surface]\nname = bumpy_sphere(seed=2, amplitude=0.15)\n";
        let cfg = JobConfig::from_text(explicit, JobKind::Spectrum, None).unwrap();
        match cfg.surface.unwrap() {
            CatalogSpec::BumpySphere { seed, .. } => assert_eq!(seed, 2),
            other => panic!("unexpected spec {other:?}"),
        }
    }
}
