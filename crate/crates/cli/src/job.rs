//! JSON job files: a command line stored as data.
//!
//! ```json
//! {"command": ["decide"], "r": "3/4,1", "cap_steps": 100000}
//! ```
//!
//! `command` holds the subcommand tokens (including subcommand-specific
//! flags); the remaining fields mirror the global flags. Flags given on the
//! command line or through `SRS_*` variables take precedence.

use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Cmd, Common, Format};
use crate::{usage, CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobConfig {
    pub command: Vec<String>,
    pub r: Option<String>,
    pub poly: Option<String>,
    pub minpoly: Option<String>,
    pub z: Option<String>,
    pub level: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub precision: Option<u32>,
    pub cap_points: Option<usize>,
    pub cap_steps: Option<u64>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl JobConfig {
    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--job {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--job {}: {e}", path.display())))
    }

    fn common(&self) -> Common {
        Common {
            r: self.r.clone(),
            poly: self.poly.clone(),
            minpoly: self.minpoly.clone(),
            z: self.z.clone(),
            level: self.level,
            format: self.format,
            out: self.out.clone(),
            precision: self.precision,
            cap_points: self.cap_points,
            cap_steps: self.cap_steps,
            threads: self.threads,
            seed: self.seed,
            job: None,
        }
    }
}

fn overlay(base: Common, top: Common) -> Common {
    Common {
        r: top.r.or(base.r),
        poly: top.poly.or(base.poly),
        minpoly: top.minpoly.or(base.minpoly),
        z: top.z.or(base.z),
        level: top.level.or(base.level),
        format: top.format.or(base.format),
        out: top.out.or(base.out),
        precision: top.precision.or(base.precision),
        cap_points: top.cap_points.or(base.cap_points),
        cap_steps: top.cap_steps.or(base.cap_steps),
        threads: top.threads.or(base.threads),
        seed: top.seed.or(base.seed),
        job: None,
    }
}

/// Merges a `--job` file into the parsed command line.
pub fn resolve(cli: Cli) -> CliResult<(Common, Cmd)> {
    let Some(path) = cli.common.job.clone() else {
        return match cli.cmd {
            Some(c) => Ok((cli.common, c)),
            None => usage("no subcommand given (see --help)"),
        };
    };
    if cli.cmd.is_some() {
        return usage("--job cannot be combined with a subcommand on the command line");
    }
    let job = JobConfig::load(&path)?;
    if job.command.is_empty() {
        return usage(format!("--job {}: empty \"command\"", path.display()));
    }
    let argv = std::iter::once("srs".to_string()).chain(job.command.iter().cloned());
    let inner = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(format!("--job {}: {}", path.display(), e.render())))?;
    if inner.common.job.is_some() {
        return usage("job files cannot nest --job");
    }
    let common = overlay(overlay(job.common(), inner.common), cli.common);
    match inner.cmd {
        Some(c) => Ok((common, c)),
        None => usage(format!("--job {}: no subcommand in \"command\"", path.display())),
    }
}
