use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "srs", version, about = "Shift radix systems: orbits, tiles, number systems")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub cmd: Option<Cmd>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// How points are drawn: discs of the certified approximation radius, or
/// single-pixel dots.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Discs {
    Certified,
    Points,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    A,
    B,
    Both,
}

/// Options shared by every subcommand. Each has an `SRS_`-prefixed
/// environment override.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Parameter: `p/q,...`, `pisot:c0,...,cn` or `real:x0,...`.
    #[arg(long, global = true, env = "SRS_R", allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Expanding polynomial, constant term first: `a0,a1,...,ad`.
    #[arg(long, global = true, env = "SRS_POLY", allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// Monic minimal polynomial of a Pisot number, constant term first.
    #[arg(long, global = true, env = "SRS_MINPOLY", allow_hyphen_values = true)]
    pub minpoly: Option<String>,
    /// Integer vector `z_0,...,z_{d-1}`.
    #[arg(long, global = true, env = "SRS_Z", allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long, global = true, env = "SRS_LEVEL")]
    pub level: Option<usize>,
    #[arg(long, global = true, env = "SRS_FORMAT", value_enum)]
    pub format: Option<Format>,
    /// Output file; without it results go to stdout.
    #[arg(long, global = true, env = "SRS_OUT")]
    pub out: Option<PathBuf>,
    /// Precision cap in bits for the interval backend.
    #[arg(long, global = true, env = "SRS_PRECISION")]
    pub precision: Option<u32>,
    #[arg(long, global = true, env = "SRS_CAP_POINTS")]
    pub cap_points: Option<usize>,
    #[arg(long, global = true, env = "SRS_CAP_STEPS")]
    pub cap_steps: Option<u64>,
    #[arg(long, global = true, env = "SRS_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, env = "SRS_SEED")]
    pub seed: Option<u64>,
    /// JSON job file; see `JobConfig`.
    #[arg(long, global = true, env = "SRS_JOB")]
    pub job: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Orbit of z until it becomes periodic.
    Orbit,
    /// SRS digits v_k = {r·τ^{k-1}(z)}, k = 1..=level.
    Digits,
    /// All purely periodic points.
    Periodic,
    /// Decide the finiteness property.
    Decide,
    /// Points of the level-n tile approximation M^n τ^{-n}(z).
    Tile,
    /// Render tiles to PNG or SVG (chosen by the --out extension).
    Render(RenderArgs),
    /// Search for an exclusivity certificate at levels 0..=level.
    Exclusive,
    /// Recompute and compare a certificate written by `exclusive`.
    VerifyCertificate {
        #[arg(long)]
        cert: PathBuf,
    },
    /// One-dimensional tiles T(N) = [a, b] with endpoint brackets.
    Interval {
        #[arg(long, allow_hyphen_values = true, default_value_t = -5)]
        from: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 5)]
        to: i64,
    },
    /// Tile-length census for r = -2/3.
    ShapeCensus {
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        #[arg(long, default_value_t = 8)]
        extra: usize,
        #[arg(long, default_value_t = 100_000)]
        search: u64,
    },
    /// Classify a rational grid in the (r_0, r_1) plane.
    ScanD2(ScanArgs),
    /// Canonical number systems.
    #[command(subcommand)]
    Cns(CnsCmd),
    /// Rational-base number systems.
    #[command(subcommand)]
    Ratbase(RatbaseCmd),
    /// Beta-expansions for Pisot numbers.
    #[command(subcommand)]
    Beta(BetaCmd),
}

#[derive(Args, Debug, Clone)]
pub struct RenderArgs {
    /// A named figure instead of --r/--radius.
    #[arg(long)]
    pub figure: Option<String>,
    /// Render every T(x) with ‖x‖∞ <= radius.
    #[arg(long, default_value_t = 0)]
    pub radius: i64,
    #[arg(long, default_value_t = 512)]
    pub width: u32,
    #[arg(long, default_value_t = 512)]
    pub height: u32,
    /// Default: `certified` for ad hoc tiles, `points` for named figures.
    #[arg(long, value_enum)]
    pub discs: Option<Discs>,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    /// Grid size `NXxNY`.
    #[arg(long, default_value = "21x41")]
    pub grid: String,
    /// Box `x0,x1,y0,y1` (rationals).
    #[arg(long, default_value = "0,1,-1,1", allow_hyphen_values = true)]
    pub r#box: String,
    /// Pixels per grid cell in the PNG.
    #[arg(long, default_value_t = 8)]
    pub cell: u32,
}

#[derive(Subcommand, Debug)]
pub enum CnsCmd {
    /// Digits of the element with Brunotte coordinates --z (or monomial --p).
    Digits {
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
    },
    /// Is (A, {0,...,a_0-1}) a canonical number system?
    Decide,
    /// The self-affine tile F_A at --level.
    Tile,
    /// The Brunotte tile approximation V M^n τ^{-n}(z).
    BrunotteTile,
    /// Random conjugacy checks between D_A and τ_r.
    Conjugacy {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        bound: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum RatbaseCmd {
    /// Digits of N in base p/q.
    Digits {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum BetaCmd {
    /// The parameter r and the conjugates of β.
    Param,
    /// Greedy digits of x (power-basis coefficients) or of {r·z}.
    Digits {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Property (F).
    DecideF,
    /// Integral β-tile approximation.
    Tile {
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
    },
    /// Render β-tiles S_β({r·x}) for ‖x‖∞ <= radius.
    Render(RenderArgs),
    /// Random conjugacy checks between T_β and τ_r.
    Conjugacy {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        bound: i64,
    },
}
