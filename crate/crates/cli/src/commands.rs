use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use srs_core::beta::{self, PisotSpec, Route};
use srs_core::cns::{self, IntPolynomial};
use srs_core::dynamics::{self, Caps};
use srs_core::interval::{fmt_rat, parse_rat, RatInterval};
use srs_core::linalg::IntVec;
use srs_core::params::{contraction_data, parse_int_list, parse_int_vec, ContractionData, ContractionOptions, SrsParameter};
use srs_core::render::{self, Layer, RenderOptions};
use srs_core::scalar::Scalar;
use srs_core::tiles;
use srs_core::tiling;

use crate::args::{BetaCmd, Cmd, CnsCmd, Common, Discs, Format, RatbaseCmd, RenderArgs, RouteArg};
use crate::{figures, scan, usage, CliError, CliResult};

/// Resolved global options.
pub struct Ctx<'a> {
    pub c: &'a Common,
    pub caps: Caps,
}

impl<'a> Ctx<'a> {
    pub fn new(c: &'a Common) -> Self {
        let d = Caps::default();
        Ctx { c, caps: Caps { steps: c.cap_steps.unwrap_or(d.steps), points: c.cap_points.unwrap_or(d.points) } }
    }

    pub fn param(&self) -> CliResult<SrsParameter> {
        let Some(s) = &self.c.r else { return usage("missing required flag --r") };
        let r = SrsParameter::parse(s, self.c.precision).map_err(|e| bad_flag("--r", e))?;
        Ok(match self.c.precision {
            Some(p) => r.with_precision_cap(p),
            None => r,
        })
    }

    pub fn z(&self, d: usize) -> CliResult<IntVec> {
        match &self.c.z {
            None => Ok(vec![BigInt::zero(); d]),
            Some(s) => {
                let z = parse_int_vec(s).map_err(|e| bad_flag("--z", e))?;
                if z.len() != d {
                    return usage(format!("--z has {} entries, expected {d}", z.len()));
                }
                Ok(z)
            }
        }
    }

    pub fn level(&self, default: usize) -> usize {
        self.c.level.unwrap_or(default)
    }

    pub fn poly(&self) -> CliResult<IntPolynomial> {
        let Some(s) = &self.c.poly else { return usage("missing required flag --poly") };
        IntPolynomial::parse(s).map_err(|e| bad_flag("--poly", e))
    }

    pub fn spec(&self) -> CliResult<PisotSpec> {
        let Some(s) = &self.c.minpoly else { return usage("missing required flag --minpoly") };
        let c = parse_int_list(s).map_err(|e| bad_flag("--minpoly", e))?;
        PisotSpec::new(&c).map_err(|e| bad_flag("--minpoly", e))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.c.seed.unwrap_or(0))
    }
}

/// Input errors become usage errors naming the flag; cap errors pass through.
fn bad_flag(flag: &str, e: srs_core::error::SrsError) -> CliError {
    if e.is_inconclusive() {
        CliError::Core(e)
    } else {
        CliError::Usage(format!("{flag}: {e}"))
    }
}

/// A command result: JSON always, CSV when the command has a tabular form.
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
}

impl Output {
    fn json(json: Value) -> Self {
        Output { json, csv: None }
    }
}

pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

pub fn ivec(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn ivecs(v: &[IntVec]) -> Value {
    Value::Array(v.iter().map(|x| ivec(x)).collect())
}

fn svec(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|s| Value::String(s.exact_string())).collect())
}

fn interval(i: &RatInterval) -> Value {
    json!([fmt_rat(&i.lo), fmt_rat(&i.hi)])
}

fn csv_rows<T: AsRef<str>>(header: &str, rows: impl Iterator<Item = Vec<T>>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<&str> = row.iter().map(|c| c.as_ref()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn coord_header(prefix: &str, d: usize) -> String {
    (0..d).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(",")
}

fn write_text(c: &Common, out: &mut dyn Write, o: Output) -> CliResult<()> {
    let text = match c.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&o.json).expect("serializable") + "\n",
        Format::Csv => match o.csv {
            Some(s) => s,
            None => return usage("--format csv is not available for this command"),
        },
    };
    match &c.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("--out {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Core(e.into())),
    }
}

/// For commands whose `--out` is an image: the summary always goes to stdout.
fn write_summary(out: &mut dyn Write, v: Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&v).expect("serializable") + "\n";
    out.write_all(text.as_bytes()).map_err(|e| CliError::Core(e.into()))
}

pub fn execute(c: &Common, cmd: &Cmd, out: &mut dyn Write) -> CliResult<()> {
    match c.threads {
        Some(0) => usage("--threads must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
            let mut buf: Vec<u8> = Vec::new();
            let res = pool.install(|| dispatch(c, cmd, &mut buf));
            out.write_all(&buf).map_err(|e| CliError::Core(e.into()))?;
            res
        }
        None => dispatch(c, cmd, out),
    }
}

fn dispatch(c: &Common, cmd: &Cmd, out: &mut dyn Write) -> CliResult<()> {
    let ctx = Ctx::new(c);
    let o = match cmd {
        Cmd::Orbit => orbit(&ctx)?,
        Cmd::Digits => digits(&ctx)?,
        Cmd::Periodic => periodic(&ctx)?,
        Cmd::Decide => decide(&ctx)?,
        Cmd::Tile => tile(&ctx)?,
        Cmd::Render(a) => return render_cmd(&ctx, a, out),
        Cmd::Exclusive => exclusive(&ctx)?,
        Cmd::VerifyCertificate { cert } => verify_certificate(&ctx, cert)?,
        Cmd::Interval { from, to } => interval_cmd(&ctx, *from, *to)?,
        Cmd::ShapeCensus { kmax, extra, search } => shape_census(&ctx, *kmax, *extra, *search)?,
        Cmd::ScanD2(a) => return write_summary(out, scan::run(&ctx, a)?),
        Cmd::Cns(sub) => cns_cmd(&ctx, sub)?,
        Cmd::Ratbase(RatbaseCmd::Digits { p, q, n }) => ratbase(&ctx, *p, *q, *n)?,
        Cmd::Beta(BetaCmd::Render(a)) => return beta_render(&ctx, a, out),
        Cmd::Beta(sub) => beta_cmd(&ctx, sub)?,
    };
    write_text(c, out, o)
}

fn contraction(r: &SrsParameter) -> CliResult<ContractionData> {
    if !r.is_interior()? {
        return Err(CliError::Core(srs_core::error::SrsError::NotContractive));
    }
    Ok(contraction_data(r, &ContractionOptions::default())?)
}

fn orbit(ctx: &Ctx) -> CliResult<Output> {
    let r = ctx.param()?;
    let z = ctx.z(r.dim())?;
    let o = dynamics::orbit(&r, &z, ctx.caps.steps)?;
    let pre: Vec<Value> = o
        .cycle
        .iter()
        .map(|x| Ok(ivecs(&dynamics::tau_preimages(&r, x)?)))
        .collect::<CliResult<_>>()?;
    let csv = csv_rows(
        &format!("step,kind,{}", coord_header("z", r.dim())),
        o.preperiod
            .iter()
            .map(|x| ("pre", x))
            .chain(o.cycle.iter().map(|x| ("cycle", x)))
            .enumerate()
            .map(|(i, (k, x))| {
                let mut row = vec![i.to_string(), k.to_string()];
                row.extend(x.iter().map(|v| v.to_string()));
                row
            }),
    );
    Ok(Output {
        json: json!({
            "r": r.coord_strings(),
            "z": ivec(&z),
            "preperiod": ivecs(&o.preperiod),
            "cycle": ivecs(&o.cycle),
            "period": o.cycle.len(),
            "purely_periodic": o.is_purely_periodic(),
            "ends_at_zero": o.ends_at_zero(),
            "cycle_preimages": pre,
        }),
        csv: Some(csv),
    })
}

fn digits(ctx: &Ctx) -> CliResult<Output> {
    let r = ctx.param()?;
    let z = ctx.z(r.dim())?;
    let n = ctx.level(10);
    let v = dynamics::srs_digits(&r, &z, n)?;
    let identity = dynamics::digit_identity_holds(&r, &z, n)?;
    let csv = csv_rows("k,digit", v.iter().enumerate().map(|(k, s)| vec![(k + 1).to_string(), s.exact_string()]));
    Ok(Output {
        json: json!({"r": r.coord_strings(), "z": ivec(&z), "digits": svec(&v), "identity_holds": identity}),
        csv: Some(csv),
    })
}

fn periodic(ctx: &Ctx) -> CliResult<Output> {
    let r = ctx.param()?;
    let cd = contraction(&r)?;
    let p = dynamics::purely_periodic_points(&r, &cd, &ctx.caps)?;
    let csv = csv_rows(
        &format!("cycle,{}", coord_header("z", r.dim())),
        p.cycles.iter().enumerate().flat_map(|(i, c)| {
            c.iter().map(move |x| {
                let mut row = vec![i.to_string()];
                row.extend(x.iter().map(|v| v.to_string()));
                row
            })
        }),
    );
    Ok(Output {
        json: json!({
            "r": r.coord_strings(),
            "points": ivecs(&p.points),
            "cycles": p.cycles.iter().map(|c| ivecs(c)).collect::<Vec<_>>(),
            "ball_size": p.ball_size,
            "r_bar": fmt_rat(&cd.r_bar),
        }),
        csv: Some(csv),
    })
}

fn verdict_json(key: &str, v: &dynamics::FinitenessVerdict) -> Value {
    let mut m = Map::new();
    m.insert(key.into(), Value::Bool(v.holds));
    if let Some(w) = v.witness() {
        m.insert("witness_cycle".into(), ivecs(w));
    }
    m.insert("ball_size".into(), Value::from(v.census.ball_size));
    m.insert("r_bar".into(), Value::String(fmt_rat(&v.r_bar)));
    Value::Object(m)
}

fn decide(ctx: &Ctx) -> CliResult<Output> {
    let r = ctx.param()?;
    let v = dynamics::decide_finiteness(&r, &ctx.caps)?;
    Ok(Output::json(verdict_json("finiteness", &v)))
}

fn tile(ctx: &Ctx) -> CliResult<Output> {
    let r = ctx.param()?;
    let cd = contraction(&r)?;
    let z = ctx.z(r.dim())?;
    let n = ctx.level(8);
    let t = tiles::tile_approx(&r, &cd, &z, n, &ctx.caps)?;
    let pts = t.points();
    let csv = csv_rows(&coord_header("x", r.dim()), pts.iter().map(|p| p.iter().map(|s| s.exact_string()).collect()));
    Ok(Output {
        json: json!({
            "r": r.coord_strings(),
            "z": ivec(&z),
            "level": n,
            "count": t.len(),
            "error_bound": fmt_rat(&t.error_bound),
            "preimages": ivecs(&t.preimages),
            "points": pts.iter().map(|p| svec(p)).collect::<Vec<_>>(),
        }),
        csv: Some(csv),
    })
}

/// Writes layers to `--out` (PNG, SVG or CSV by extension).
pub fn save_layers(path: &Path, layers: &[Layer], o: &RenderOptions) -> CliResult<&'static str> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let io = |e: std::io::Error| CliError::Usage(format!("--out {}: {e}", path.display()));
    match ext.as_str() {
        "png" => {
            render::save_png(&render::render_png(layers, o), path)
                .map_err(|e| CliError::Usage(format!("--out {}: {e}", path.display())))?;
            Ok("png")
        }
        "svg" => std::fs::write(path, render::render_svg(layers, o)).map(|_| "svg").map_err(io),
        "csv" => std::fs::write(path, render::points_csv(layers)).map(|_| "csv").map_err(io),
        _ => usage(format!("--out {}: extension must be .png, .svg or .csv", path.display())),
    }
}

fn render_options(a: &RenderArgs) -> CliResult<RenderOptions> {
    if a.width == 0 || a.height == 0 {
        return usage("--width and --height must be positive");
    }
    Ok(RenderOptions { width: a.width, height: a.height, ..RenderOptions::default() })
}

fn finish_render(ctx: &Ctx, a: &RenderArgs, mut layers: Vec<Layer>, what: Value, out: &mut dyn Write) -> CliResult<()> {
    let Some(path) = &ctx.c.out else { return usage("render needs --out (.png, .svg or .csv)") };
    let default = if a.figure.is_some() { Discs::Points } else { Discs::Certified };
    if a.discs.unwrap_or(default) == Discs::Points {
        for l in &mut layers {
            l.radius = 0.0;
        }
    }
    let kind = save_layers(path, &layers, &render_options(a)?)?;
    let points: usize = layers.iter().map(|l| l.points.len()).sum();
    write_summary(
        out,
        json!({"figure": what, "format": kind, "layers": layers.len(), "points": points, "out": path.display().to_string()}),
    )
}

fn render_cmd(ctx: &Ctx, a: &RenderArgs, out: &mut dyn Write) -> CliResult<()> {
    if let Some(name) = &a.figure {
        let layers = figures::layers(name, ctx.c.level, &ctx.caps)?;
        return finish_render(ctx, a, layers, Value::String(name.clone()), out);
    }
    let r = ctx.param()?;
    let cd = contraction(&r)?;
    let layers = figures::srs_tiles(&r, &cd, a.radius, ctx.level(10), &ctx.caps)?;
    finish_render(ctx, a, layers, json!({"r": r.coord_strings(), "radius": a.radius}), out)
}

fn cert_json(r: &SrsParameter, c: &tiling::ExclusivityCertificate) -> Value {
    json!({
        "r": r.coord_strings().join(","),
        "z": ivec(&c.z),
        "level": c.n,
        "witness_set": ivecs(&c.witness_set),
        "multiplicity": c.multiplicity(),
        "ball_size": c.ball_size,
        "r_bar": fmt_rat(&c.r_bar),
        "certified_point": svec(&c.certified_point),
    })
}

fn exclusive(ctx: &Ctx) -> CliResult<Output> {
    let r = ctx.param()?;
    let cd = contraction(&r)?;
    let z = ctx.z(r.dim())?;
    let c = tiling::search_exclusive(&r, &cd, &z, ctx.level(20), &ctx.caps)?;
    let mut v = cert_json(&r, &c);
    v["exclusive"] = Value::Bool(c.multiplicity() == 1);
    Ok(Output::json(v))
}

fn json_ints(v: &Value, key: &str) -> CliResult<IntVec> {
    let bad = || CliError::Usage(format!("--cert: field \"{key}\" must be an integer array"));
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|x| match x {
            Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(bad),
            Value::String(s) => s.parse::<BigInt>().map_err(|_| bad()),
            _ => Err(bad()),
        })
        .collect()
}

fn verify_certificate(ctx: &Ctx, path: &Path) -> CliResult<Output> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--cert {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--cert {}: {e}", path.display())))?;
    let field = |k: &str| v.get(k).ok_or_else(|| CliError::Usage(format!("--cert: missing field \"{k}\"")));
    let r_text = match &ctx.c.r {
        Some(s) => s.clone(),
        None => field("r")?.as_str().ok_or_else(|| CliError::Usage("--cert: \"r\" must be a string".into()))?.to_string(),
    };
    let r = SrsParameter::parse(&r_text, ctx.c.precision).map_err(|e| bad_flag("--cert", e))?;
    let z = json_ints(field("z")?, "z")?;
    if z.len() != r.dim() {
        return usage("--cert: \"z\" has the wrong dimension");
    }
    let n = field("level")?.as_u64().ok_or_else(|| CliError::Usage("--cert: \"level\" must be a non-negative integer".into()))? as usize;
    let witnesses = field("witness_set")?
        .as_array()
        .ok_or_else(|| CliError::Usage("--cert: \"witness_set\" must be an array".into()))?
        .iter()
        .map(|w| json_ints(w, "witness_set"))
        .collect::<CliResult<Vec<_>>>()?;
    let r_bar = field("r_bar")?
        .as_str()
        .and_then(parse_rat)
        .ok_or_else(|| CliError::Usage("--cert: \"r_bar\" must be a rational string".into()))?;
    let point: Vec<String> = field("certified_point")?
        .as_array()
        .ok_or_else(|| CliError::Usage("--cert: \"certified_point\" must be an array".into()))?
        .iter()
        .map(|s| s.as_str().unwrap_or_default().to_string())
        .collect();

    let cd = contraction(&r)?;
    let fresh = tiling::exclusivity_certificate(&r, &cd, &z, n, &ctx.caps)?;
    let fresh_point: Vec<String> = fresh.certified_point.iter().map(|s| s.exact_string()).collect();
    let radius_ok = cd.r_bar <= r_bar;
    let witnesses_ok = fresh.witness_set == witnesses;
    let point_ok = fresh_point == point;
    let valid = radius_ok && witnesses_ok && point_ok;
    Ok(Output::json(json!({
        "valid": valid,
        "radius_ok": radius_ok,
        "witness_set_ok": witnesses_ok,
        "point_ok": point_ok,
        "multiplicity": fresh.multiplicity(),
        "exclusive": valid && fresh.multiplicity() == 1,
    })))
}

fn interval_cmd(ctx: &Ctx, from: i64, to: i64) -> CliResult<Output> {
    if from > to {
        return usage("--from must not exceed --to");
    }
    let r = ctx.param()?;
    let cd = contraction(&r)?;
    let n = ctx.level(10);
    let t = tiling::interval_tiling(&r, &cd, from, to, n, &ctx.caps)?;
    let rows: Vec<Value> = t
        .tiles
        .iter()
        .map(|x| {
            json!({
                "center": int(&x.center),
                "left": interval(&x.left),
                "right": interval(&x.right),
                "count": x.count,
                "length_estimate": fmt_rat(&x.length_estimate),
            })
        })
        .collect();
    let csv = csv_rows(
        "center,left_lo,left_hi,right_lo,right_hi,count",
        t.tiles.iter().map(|x| {
            vec![
                x.center.to_string(),
                fmt_rat(&x.left.lo),
                fmt_rat(&x.left.hi),
                fmt_rat(&x.right.lo),
                fmt_rat(&x.right.hi),
                x.count.to_string(),
            ]
        }),
    );
    Ok(Output { json: json!({"r": r.coord_strings(), "level": n, "tiles": rows, "ordered": t.ordered}), csv: Some(csv) })
}

fn shape_census(ctx: &Ctx, kmax: usize, extra: usize, search: u64) -> CliResult<Output> {
    let s = tiling::shape_census(kmax, extra, search, &ctx.caps)?;
    let rows: Vec<Value> = s
        .rows
        .iter()
        .map(|x| {
            json!({
                "k": x.k,
                "n_k": int(&x.n_k),
                "level": x.level,
                "count": x.count,
                "length": interval(&x.length),
                "bound": interval(&x.bound),
                "within_bound": x.length.lo >= x.bound.lo && x.length.hi <= x.bound.hi,
            })
        })
        .collect();
    let csv = csv_rows(
        "k,n_k,level,count,length_lo,length_hi,bound_lo,bound_hi",
        s.rows.iter().map(|x| {
            vec![
                x.k.to_string(),
                x.n_k.to_string(),
                x.level.to_string(),
                x.count.to_string(),
                fmt_rat(&x.length.lo),
                fmt_rat(&x.length.hi),
                fmt_rat(&x.bound.lo),
                fmt_rat(&x.bound.hi),
            ]
        }),
    );
    let classes: Vec<usize> = s.disjoint_classes.iter().map(|&i| s.rows[i].k).collect();
    Ok(Output { json: json!({"rows": rows, "disjoint_classes_k": classes, "class_count": classes.len()}), csv: Some(csv) })
}

fn rat_points(v: &[Vec<num_rational::BigRational>]) -> (Value, String) {
    let d = v.first().map_or(0, |p| p.len());
    let j = Value::Array(v.iter().map(|p| Value::Array(p.iter().map(|x| Value::String(fmt_rat(x))).collect())).collect());
    let csv = csv_rows(&coord_header("x", d), v.iter().map(|p| p.iter().map(fmt_rat).collect()));
    (j, csv)
}

fn random_z(rng: &mut ChaCha8Rng, d: usize, bound: i64) -> IntVec {
    (0..d).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()
}

fn cns_cmd(ctx: &Ctx, sub: &CnsCmd) -> CliResult<Output> {
    let a = ctx.poly()?;
    let coeffs: Vec<Value> = a.coeffs().iter().map(int).collect();
    match sub {
        CnsCmd::Digits { p } => {
            let n = ctx.level(10);
            let (z, p) = match p {
                Some(s) => {
                    let p = parse_int_vec(s).map_err(|e| bad_flag("--p", e))?;
                    if p.len() != a.degree() {
                        return usage(format!("--p has {} entries, expected {}", p.len(), a.degree()));
                    }
                    (a.brunotte_coords(&p), p)
                }
                None => {
                    let z = ctx.z(a.degree())?;
                    let p = a.monomial(&z);
                    (Some(z), p)
                }
            };
            let mut q = p.clone();
            let mut division = Vec::with_capacity(n);
            for _ in 0..n {
                let (b, next) = cns::backward_divide_monomial(&a, &q);
                division.push(b);
                q = next;
            }
            let reconstruction = cns::reconstruction_holds(&a, &p, &division, &q);
            let mut m = Map::new();
            m.insert("poly".into(), Value::Array(coeffs));
            m.insert("p".into(), ivec(&p));
            m.insert("digits".into(), ivec(&division));
            m.insert("remainder".into(), ivec(&q));
            m.insert("reconstruction_holds".into(), Value::Bool(reconstruction));
            if let Some(z) = &z {
                let both = cns::cns_digits(&a, z, n)?;
                m.insert("z".into(), ivec(z));
                m.insert("formula_digits".into(), ivec(&both.formula));
                m.insert("routes_agree".into(), Value::Bool(both.agree() && both.division == division));
            }
            let csv = csv_rows("k,digit", division.iter().enumerate().map(|(k, b)| vec![k.to_string(), b.to_string()]));
            Ok(Output { json: Value::Object(m), csv: Some(csv) })
        }
        CnsCmd::Decide => {
            let v = cns::is_cns(&a, &ctx.caps)?;
            let mut j = verdict_json("cns", &v);
            j["poly"] = Value::Array(coeffs);
            Ok(Output::json(j))
        }
        CnsCmd::Tile => {
            let n = ctx.level(8);
            let pts = cns::self_affine_tile_approx(&a, n, &ctx.caps)?;
            let (p, csv) = rat_points(&pts);
            Ok(Output { json: json!({"poly": coeffs, "level": n, "count": pts.len(), "points": p}), csv: Some(csv) })
        }
        CnsCmd::BrunotteTile => {
            let n = ctx.level(8);
            let z = ctx.z(a.degree())?;
            let pts = cns::brunotte_tile_approx(&a, &z, n, &ctx.caps)?;
            let monic = if a.is_monic() { Some(cns::monic_identity_holds(&a, &z, n, &ctx.caps)?) } else { None };
            let (p, csv) = rat_points(&pts);
            Ok(Output {
                json: json!({"poly": coeffs, "z": ivec(&z), "level": n, "count": pts.len(), "points": p, "monic_identity_holds": monic}),
                csv: Some(csv),
            })
        }
        CnsCmd::Conjugacy { samples, bound } => {
            let n = ctx.level(30);
            let mut rng = ctx.rng();
            let mut failures = Vec::new();
            for _ in 0..*samples {
                let z = random_z(&mut rng, a.degree(), *bound);
                if !cns::conjugacy_check(&a, &z, n)? {
                    failures.push(ivec(&z));
                }
            }
            Ok(Output::json(json!({
                "poly": coeffs, "level": n, "samples": samples, "seed": ctx.c.seed.unwrap_or(0),
                "holds": failures.is_empty(), "failures": failures,
            })))
        }
    }
}

fn ratbase(ctx: &Ctx, p: i64, q: i64, n: i64) -> CliResult<Output> {
    let big_n = BigInt::from(n);
    let m = ctx.level(20);
    let d = cns::rational_base_digits(p, q, &big_n, m).map_err(|e| bad_flag("--p/--q", e))?;
    let ok = cns::rational_base_reconstruction(p, q, &big_n, &d)?;
    let csv = csv_rows("k,digit", d.iter().enumerate().map(|(k, b)| vec![k.to_string(), b.to_string()]));
    Ok(Output {
        json: json!({"base": format!("{p}/{q}"), "n": n, "digits": ivec(&d), "reconstruction_holds": ok}),
        csv: Some(csv),
    })
}

fn embedded_json(e: &beta::EmbeddedPoints) -> Value {
    json!({"count": e.points.len(), "radius": e.radius, "points": e.points})
}

fn beta_cmd(ctx: &Ctx, sub: &BetaCmd) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let d = spec.dim();
    match sub {
        BetaCmd::Param => {
            let (real, pairs) = spec.signature();
            let conj: Vec<Value> = beta::conjugate_values(&spec).iter().map(|c| json!([c.re, c.im])).collect();
            Ok(Output::json(json!({
                "beta": spec.field().beta_f64(),
                "r": beta::param_strings(&spec),
                "r_f64": spec.param().coords_scalar().iter().map(|s| s.to_f64()).collect::<Vec<_>>(),
                "conjugates": conj,
                "signature": [real, pairs],
                "unit": spec.is_unit(),
                "u_invertible": beta::u_transform_invertible(&spec),
            })))
        }
        BetaCmd::Digits { x } => {
            let n = ctx.level(20);
            let (elem, z) = match x {
                Some(s) => {
                    let c = s
                        .split(',')
                        .map(|t| parse_rat(t).ok_or_else(|| CliError::Usage(format!("--x: bad rational '{}'", t.trim()))))
                        .collect::<CliResult<Vec<_>>>()?;
                    let e = spec.elem(&c);
                    let z = spec.z_for(&e).map_err(|e| bad_flag("--x", e))?;
                    (e, z)
                }
                None => {
                    let z = ctx.z(d)?;
                    (spec.frac_rz(&z)?, z)
                }
            };
            let both = beta::beta_digits_both(&spec, &elem, n)?;
            let csv = csv_rows("k,digit", both.direct.iter().enumerate().map(|(k, b)| vec![(k + 1).to_string(), b.to_string()]));
            Ok(Output {
                json: json!({
                    "x": elem.to_string(),
                    "z": ivec(&z),
                    "digits": ivec(&both.direct),
                    "srs_digits": ivec(&both.via_srs),
                    "routes_agree": both.agree(),
                }),
                csv: Some(csv),
            })
        }
        BetaCmd::DecideF => {
            let v = beta::satisfies_f(&spec, &ctx.caps)?;
            Ok(Output::json(verdict_json("property_f", &v)))
        }
        BetaCmd::Tile { route } => {
            let n = ctx.level(6);
            let z = ctx.z(d)?;
            let route = match route {
                RouteArg::A => Route::A,
                RouteArg::B => Route::B,
                RouteArg::Both => Route::Both,
            };
            let t = beta::integral_beta_tile_approx(&spec, &z, n, route, &ctx.caps)?;
            let main = t.route_a.as_ref().or(t.route_b.as_ref().map(|b| &b.corrected)).expect("a route ran");
            let csv = csv_rows(
                &coord_header("x", d),
                main.points.iter().map(|p| p.iter().map(|v| format!("{v:.17e}")).collect()),
            );
            Ok(Output {
                json: json!({
                    "z": ivec(&z),
                    "level": n,
                    "route_a": t.route_a.as_ref().map(embedded_json),
                    "route_b": t.route_b.as_ref().map(|b| embedded_json(&b.corrected)),
                    "route_b_linear": t.route_b.as_ref().map(|b| embedded_json(&b.linear)),
                    "hausdorff_a_b": t.deviation,
                    "hausdorff_a_linear": t.linear_deviation,
                }),
                csv: Some(csv),
            })
        }
        BetaCmd::Conjugacy { samples, bound } => {
            let n = ctx.level(30);
            let mut rng = ctx.rng();
            let mut failures = Vec::new();
            for _ in 0..*samples {
                let z = random_z(&mut rng, d, *bound);
                if !beta::conjugacy_check_beta(&spec, &z, n)? {
                    failures.push(ivec(&z));
                }
            }
            Ok(Output::json(json!({
                "level": n, "samples": samples, "seed": ctx.c.seed.unwrap_or(0),
                "holds": failures.is_empty(), "failures": failures,
            })))
        }
        BetaCmd::Render(_) => unreachable!("handled by beta_render"),
    }
}

fn beta_render(ctx: &Ctx, a: &RenderArgs, out: &mut dyn Write) -> CliResult<()> {
    if let Some(name) = &a.figure {
        let layers = figures::layers(name, ctx.c.level, &ctx.caps)?;
        return finish_render(ctx, a, layers, Value::String(name.clone()), out);
    }
    let spec = ctx.spec()?;
    let layers = figures::beta_tiles(&spec, a.radius, ctx.level(6), &ctx.caps)?;
    finish_render(ctx, a, layers, json!({"minpoly": ctx.c.minpoly, "radius": a.radius}), out)
}
