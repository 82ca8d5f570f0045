//! End-to-end acceptance run: one line per criterion, nonzero exit on any
//! failure. Set `SRS_BLESS=1` to (re)write the golden figure images.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use srs_cli::commands::save_layers;
use srs_cli::figures::{self, FIGURES};
use srs_core::beta::{self, PisotSpec};
use srs_core::cns::{self, IntPolynomial};
use srs_core::dynamics::{self, Caps};
use srs_core::interval::{rat, rat_pow, rat_to_f64, round_down, round_up, RatInterval};
use srs_core::linalg::{int_vec, IntVec};
use srs_core::params::{contraction_data, ContractionOptions, SrsParameter};
use srs_core::render::{hamming, phash, RenderOptions};
use srs_core::tiles;
use srs_core::tiling;

type Check = std::result::Result<String, String>;

const PHASH_TOLERANCE: u32 = 10;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("srs").chain(args.iter().copied());
    let code = srs_cli::run_to(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cli_json(args: &[&str]) -> std::result::Result<Value, String> {
    let (code, out, err) = cli(args);
    ensure(code == 0, format!("`srs {}` exited {code}: {err}", args.join(" ")))?;
    serde_json::from_str(&out).map_err(e)
}

fn frac(p: i64, q: i64) -> SrsParameter {
    SrsParameter::from_fractions(&[(p, q)])
}

fn pair(a: (i64, i64), b: (i64, i64)) -> SrsParameter {
    SrsParameter::from_fractions(&[a, b])
}

fn scratch() -> PathBuf {
    let d = std::env::temp_dir().join(format!("srs-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn c1_cycle() -> Check {
    let r = pair((9, 10), (-11, 20));
    let z: Vec<IntVec> = [[-1, -1], [-1, 1], [1, 2], [2, 1], [1, -1]].iter().map(|p| int_vec(p)).collect();
    let o = dynamics::orbit(&r, &z[0], 1000).map_err(e)?;
    ensure(o.preperiod.is_empty() && o.cycle == z, format!("orbit {:?}", o))?;
    for i in 0..5 {
        let pre = dynamics::tau_preimages(&r, &z[i]).map_err(e)?;
        ensure(pre == vec![z[(i + 4) % 5].clone()], format!("τ^-1(z_{}) = {:?}", i + 1, pre))?;
    }
    let j = cli_json(&["orbit", "--r", "9/10,-11/20", "--z", "-1,-1"])?;
    let want: Value = serde_json::to_value(vec![vec![-1, -1], vec![-1, 1], vec![1, 2], vec![2, 1], vec![1, -1]]).unwrap();
    ensure(j["period"] == 5 && j["cycle"] == want, format!("cli orbit {j}"))?;
    Ok("5-cycle and singleton preimages".into())
}

fn c2_finiteness() -> Check {
    let caps = Caps::default();
    let cases: Vec<(&str, SrsParameter, bool)> = vec![
        ("3/4,1", pair((3, 4), (1, 1)), true),
        ("9/10,-11/20", pair((9, 10), (-11, 20)), false),
        ("1/2,-1/2", pair((1, 2), (-1, 2)), true),
        ("0.5", SrsParameter::parse("0.5", None).map_err(e)?, true),
        ("-0.5", SrsParameter::parse("-0.5", None).map_err(e)?, false),
    ];
    for (name, r, want) in &cases {
        let t = Instant::now();
        let v = dynamics::decide_finiteness(r, &caps).map_err(e)?;
        ensure(v.holds == *want, format!("{name}: got {}", v.holds))?;
        ensure(t.elapsed() < Duration::from_secs(10), format!("{name}: {:?}", t.elapsed()))?;
        ensure(v.holds == v.witness().is_none(), format!("{name}: witness inconsistent"))?;
        let j = cli_json(&["decide", "--r", name])?;
        ensure(j["finiteness"] == *want, format!("cli decide {name}: {j}"))?;
        ensure(j.get("witness_cycle").is_some() != *want, format!("cli witness {name}: {j}"))?;
    }
    Ok("5 verdicts, library and CLI".into())
}

fn c3_singletons() -> Check {
    let r = pair((9, 10), (-11, 20));
    let cd = contraction_data(&r, &ContractionOptions::default()).map_err(e)?;
    let z = int_vec(&[-1, -1]);
    // Points sit on the cycle: M^n y with y = z_{1-n}; ‖M^n y‖ <= ρ̃^n ‖y‖.
    let cycle = dynamics::orbit(&r, &z, 100).map_err(e)?.cycle;
    let k = cycle.iter().map(|y| cd.norm.eval_exact(&y.iter().map(|v| BigRational::from_integer(v.clone())).collect::<Vec<_>>()).unwrap()).max().unwrap();
    let to_euclid = rat_to_f64(&cd.c_low).recip() * 2f64.sqrt();
    let mut n_star = 0;
    let mut bound = k.clone();
    while rat_to_f64(&bound) * to_euclid >= 1e-3 {
        n_star += 1;
        bound = &bound * &cd.rho_tilde;
    }
    let levels = tiles::tile_approx_levels(&r, &cd, &z, n_star, &Caps::default()).map_err(e)?;
    let rho = 0.9f64.sqrt();
    let mut c_emp = 0.0f64;
    let mut bound = k.clone();
    for t in &levels {
        ensure(t.len() == 1, format!("level {} has {} points", t.level, t.len()))?;
        ensure(tiles::diameter(t, &cd).hi.is_zero(), format!("level {} diameter", t.level))?;
        let p = t.points_rational().unwrap().remove(0);
        // c_low ‖p‖∞ <= ‖p‖; exact comparison at every level.
        ensure(p.iter().all(|x| &x.abs() * &cd.c_low <= bound), format!("level {}: sup-norm bound", t.level))?;
        // The adapted norm itself is costly at high levels; sample it.
        if t.level % 64 == 0 || t.level == n_star {
            let enc: Vec<RatInterval> = p.iter().map(|x| RatInterval::new(round_down(x, 160), round_up(x, 160))).collect();
            ensure(cd.norm.eval_enclosure(&enc).hi <= bound, format!("level {}: norm bound", t.level))?;
        }
        bound = &bound * &cd.rho_tilde;
        let eu = p.iter().map(|x| rat_to_f64(x).powi(2)).sum::<f64>().sqrt();
        c_emp = c_emp.max(eu / (rho.powi(t.level as i32) * 2f64.sqrt()));
    }
    let last = levels.last().unwrap().points_f64().remove(0);
    let eu = last.iter().map(|x| x * x).sum::<f64>().sqrt();
    ensure(eu < 1e-3, format!("|p_{n_star}| = {eu}"))?;
    Ok(format!("one point for n <= {n_star}, |p_n| = {eu:.2e}, c ≈ {c_emp:.3}"))
}

fn c4_cauchy() -> Check {
    let mut worst = 0.0f64;
    for r in [pair((1, 2), (-1, 2)), pair((3, 4), (1, 1))] {
        let cd = contraction_data(&r, &ContractionOptions::default()).map_err(e)?;
        let z = vec![BigInt::zero(); 2];
        let lv = tiles::tile_approx_levels(&r, &cd, &z, 13, &Caps::default()).map_err(e)?;
        for n in 0..=12 {
            let rep = tiles::cauchy_check(&lv[n], &lv[n + 1], &cd);
            ensure(rep.exact, format!("level {n}: not exact"))?;
            ensure(rep.holds, format!("level {n}: δ = {} > {}", rep.delta.hi, rep.bound))?;
            worst = worst.max(rat_to_f64(&rep.delta.hi) / rat_to_f64(&rep.bound));
        }
    }
    Ok(format!("n <= 12, max δ/bound = {worst:.3}"))
}

fn c5_set_equation() -> Check {
    let params = [pair((1, 2), (-1, 2)), pair((3, 4), (1, 1)), pair((9, 10), (-11, 20))];
    for r in &params {
        let cd = contraction_data(r, &ContractionOptions::default()).map_err(e)?;
        for x in [int_vec(&[0, 0]), int_vec(&[1, -1])] {
            for n in 1..=8 {
                let rep = tiles::set_equation_check(r, &cd, &x, n, &Caps::default()).map_err(e)?;
                ensure(rep.equal, format!("{:?} x={x:?} n={n}: {rep:?}", r.coord_strings()))?;
            }
        }
    }
    Ok("3 parameters, 2 centres, levels 1-8".into())
}

fn c6_counts() -> Check {
    let r = frac(-2, 3);
    let i = [BigInt::zero()];
    for n in 0..=20 {
        let c = tiling::preimage_count(&r, &i, n, &Caps::default()).map_err(e)?;
        let c = BigRational::from_integer(BigInt::from(c));
        // Independent oracle for the bounds.
        let g = rat_pow(&rat(3, 2), n);
        let (lo, hi) = (BigRational::one(), rat(2, 1) * &g - BigRational::one());
        ensure((lo.clone(), hi.clone()) == tiling::count_bounds_minus_two_thirds(1, n), "bound formula")?;
        ensure(lo <= c && c <= hi, format!("n={n}: {c} not in [{lo}, {hi}]"))?;
    }
    Ok("n <= 20".into())
}

fn c7_census() -> Check {
    let s = tiling::shape_census(6, 8, 100_000, &Caps::default()).map_err(e)?;
    for row in &s.rows {
        let gk = rat_pow(&rat(2, 3), row.k);
        ensure(row.bound.lo == gk && row.bound.hi == &gk * rat(3, 1), "bound")?;
        ensure(row.length.lo >= row.bound.lo && row.length.hi <= row.bound.hi, format!("k={}: {:?}", row.k, row.length))?;
    }
    // Pairwise disjointness, checked directly.
    let c = &s.disjoint_classes;
    for a in 0..c.len() {
        for b in a + 1..c.len() {
            let (x, y) = (&s.rows[c[a]].length, &s.rows[c[b]].length);
            ensure(x.hi < y.lo || y.hi < x.lo, "classes overlap")?;
        }
    }
    ensure(c.len() >= 3, format!("{} classes", c.len()))?;
    let ns: Vec<String> = s.rows.iter().map(|r| r.n_k.to_string()).collect();
    Ok(format!("N_k = [{}], {} disjoint classes", ns.join(", "), c.len()))
}

fn c8_cns_conjugacy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for a in [[2, -1, 1], [2, 2, 1], [4, 4, 3], [20, -11, 18]] {
        let p = IntPolynomial::from_i64(&a).map_err(e)?;
        for _ in 0..200 {
            let z: IntVec = (0..2).map(|_| BigInt::from(rng.gen_range(-1000..=1000))).collect();
            ensure(cns::conjugacy_check(&p, &z, 30).map_err(e)?, format!("A={a:?} z={z:?}"))?;
        }
    }
    Ok("4 polynomials x 200 samples, n <= 30".into())
}

fn c9_twin_dragon() -> Check {
    let a = IntPolynomial::from_i64(&[2, 2, 1]).map_err(e)?;
    let mut p = int_vec(&[-1, 0]);
    let mut digits = Vec::new();
    for _ in 0..5 {
        let (b, next) = cns::backward_divide_monomial(&a, &p);
        digits.push(b);
        p = next;
    }
    ensure(digits == int_vec(&[1, 0, 1, 1, 1]), format!("digits {digits:?}"))?;
    ensure(p.iter().all(|x| x.is_zero()), "nonzero remainder")?;
    // Gaussian integers (re, im), base -1 + i.
    let mul = |x: (i64, i64), y: (i64, i64)| (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
    let mut pw = (1i64, 0i64);
    let mut sum = (0i64, 0i64);
    for b in &digits {
        let b: i64 = b.try_into().unwrap();
        sum = (sum.0 + b * pw.0, sum.1 + b * pw.1);
        pw = mul(pw, (-1, 1));
    }
    ensure(sum == (-1, 0), format!("sum {sum:?}"))?;
    let j = cli_json(&["cns", "digits", "--poly", "2,2,1", "--p", "-1,0", "--level", "5"])?;
    ensure(j["digits"] == serde_json::json!([1, 0, 1, 1, 1]), format!("cli {j}"))?;
    Ok("digits (1,0,1,1,1), sum = -1".into())
}

fn c10_beta_conjugacy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for m in [vec![-1, -1, 1], vec![-1, -1, -1, 1], vec![1, 0, -3, 1]] {
        let spec = PisotSpec::new(&int_vec(&m)).map_err(e)?;
        for _ in 0..100 {
            let z: IntVec = (0..spec.dim()).map(|_| BigInt::from(rng.gen_range(-50..=50))).collect();
            ensure(beta::conjugacy_check_beta(&spec, &z, 30).map_err(e)?, format!("{m:?} z={z:?}"))?;
        }
    }
    Ok("3 specs x 100 samples, n <= 30".into())
}

fn c11_routes() -> Check {
    let mut worst = 0.0f64;
    for m in [vec![1, 0, -3, 1], vec![-1, -1, -1, 1]] {
        let spec = PisotSpec::new(&int_vec(&m)).map_err(e)?;
        let z = vec![BigInt::zero(); spec.dim()];
        for t in beta::integral_beta_tile_levels(&spec, &z, 10, &Caps::default()).map_err(e)? {
            let d = t.deviation.unwrap();
            ensure(d < 1e-9, format!("{m:?} level {}: {d}", t.level))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("n <= 10, max Hausdorff distance {worst:.1e}"))
}

fn c12_property_f() -> Check {
    for (m, want) in [(vec![1, 0, -3, 1], false), (vec![-1, -1, 1], true), (vec![-1, -1, -1, 1], true)] {
        let spec = PisotSpec::new(&int_vec(&m)).map_err(e)?;
        let v = beta::satisfies_f(&spec, &Caps::default()).map_err(e)?;
        ensure(v.holds == want, format!("{m:?}: {}", v.holds))?;
    }
    Ok("x^3-3x^2+1 false; golden, Tribonacci true".into())
}

fn c13_exclusive() -> Check {
    let mut levels = Vec::new();
    for r in [pair((3, 4), (1, 1)), pair((1, 2), (-1, 2))] {
        let cd = contraction_data(&r, &ContractionOptions::default()).map_err(e)?;
        let z = vec![BigInt::zero(); 2];
        let c = tiling::search_exclusive(&r, &cd, &z, 40, &Caps::default()).map_err(e)?;
        ensure(c.witness_set == vec![z.clone()], format!("{:?}: witnesses {:?}", r.coord_strings(), c.witness_set))?;
        ensure(tiling::verify_certificate(&r, &cd, &c, &Caps::default()).map_err(e)?, "certificate does not re-verify")?;
        levels.push(c.n);
    }
    Ok(format!("witness set {{0}} at levels {levels:?}"))
}

fn c14_figures() -> Check {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("SRS_BLESS").is_some();
    let dir = scratch();
    let mut dists = Vec::new();
    for f in FIGURES {
        let layers = figures::layers(f.name, None, &Caps::default()).map_err(e)?;
        let mut layers = layers;
        for l in &mut layers {
            l.radius = 0.0;
        }
        let want = golden.join(format!("{}.png", f.name));
        if bless {
            std::fs::create_dir_all(&golden).map_err(e)?;
            save_layers(&want, &layers, &RenderOptions::default()).map_err(e)?;
        }
        let got = dir.join(format!("{}.png", f.name));
        save_layers(&got, &layers, &RenderOptions::default()).map_err(e)?;
        let a = image::open(&want).map_err(|x| format!("{}: {x}", want.display()))?.to_rgb8();
        let b = image::open(&got).map_err(e)?.to_rgb8();
        let d = hamming(phash(&a), phash(&b));
        ensure(d <= PHASH_TOLERANCE, format!("{}: phash distance {d}", f.name))?;
        dists.push(format!("{}={d}", f.name));
    }
    Ok(dists.join(" "))
}

fn c15_scan() -> Check {
    let dir = scratch();
    let png = dir.join("scan.png");
    let png_s = png.to_str().unwrap();
    let j = cli_json(&["scan-d2", "--grid", "21x41", "--box", "0,1,-1,1", "--out", png_s])?;
    let csv = std::fs::read_to_string(png.with_extension("csv")).map_err(e)?;
    let class = |key: &str| csv.lines().find(|l| l.starts_with(&format!("{key},"))).map(|l| l.rsplit(',').next().unwrap().to_string());
    for (cell, want) in [("1/2,-1/2", "finite"), ("9/10,-11/20", "not-finite"), ("3/4,1", "finite")] {
        let got = class(cell).ok_or(format!("cell {cell} missing"))?;
        ensure(got == want, format!("cell {cell}: {got}"))?;
    }
    Ok(format!("counts {}", j["counts"]))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Check, u64)> = vec![
        ("cycle reproduction", c1_cycle, 1),
        ("finiteness decisions", c2_finiteness, 50),
        ("singleton tiles", c3_singletons, 1),
        ("Cauchy bound", c4_cauchy, 60),
        ("set equation", c5_set_equation, 60),
        ("count inequalities r=-2/3", c6_counts, 10),
        ("shape census", c7_census, 300),
        ("CNS conjugacy", c8_cns_conjugacy, 60),
        ("twin-dragon digits", c9_twin_dragon, 1),
        ("beta conjugacy", c10_beta_conjugacy, 120),
        ("route equivalence", c11_routes, 120),
        ("property (F)", c12_property_f, 30),
        ("exclusivity certificate", c13_exclusive, 120),
        ("figure regressions", c14_figures, 600),
        ("scan-d2 spot checks", c15_scan, 300),
    ];
    let only: Option<usize> = std::env::var("SRS_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let mut res = f();
        let dt = t.elapsed();
        if res.is_ok() && dt > Duration::from_secs(*budget) {
            res = Err(format!("over time budget of {budget}s"));
        }
        match res {
            Ok(info) => println!("[PASS] {:>2} {name} ({:.2}s): {info}", i + 1, dt.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {:>2} {name} ({:.2}s): {msg}", i + 1, dt.as_secs_f64());
            }
        }
    }
    let _ = std::fs::remove_dir_all(scratch());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
