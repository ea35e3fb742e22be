//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//!     cargo test -p squarepack-conformance --test acceptance

use squarepack::plan::WasteReport;
use squarepack::tilt::TiltKind;
use squarepack::{
    account, cover_partition, cover_square, enumerate_placements, fit_slope, max_slant, pack_square, pack_type2,
    pack_type3, run_series, solve_cover_tilt, solve_pack_tilt, to_csv, type3_partition, verify_covering,
    verify_packing, Mode, PackConfig, Plan, Region, Type2Spec, Type3Spec,
};
use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

const SQUARE_CONST: f64 = 60.627;
const T2_CONST: f64 = 14.4497;
const T3_CONST: f64 = 7.2249;
const PACK_XS: [f64; 5] = [50.0, 120.5, 400.5, 1000.5, 2000.25];
const COVER_XS: [f64; 3] = [50.5, 400.5, 1000.5];
const SERIES_XS: [f64; 3] = [1e4 + 0.5, 1e5 + 0.5, 1e6 + 0.5];
const RS: [f64; 5] = [0.0, 0.1, 0.5, 0.9, 0.99];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// 2000 log-spaced bases in [4, 1e8], each with the five fractional parts.
fn width_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(10_000);
    for i in 0..2000 {
        let g = (4f64.ln() + (1e8f64.ln() - 4f64.ln()) * i as f64 / 1999.0).exp();
        for r in RS {
            let base = g.floor();
            let m = if base + r > 1e8 { base - 1.0 + r } else { base + r };
            out.push((m, r));
        }
    }
    out
}

/// `n·cosθ ± sinθ − m` without the cancellation of the direct form.
fn residual(kind: TiltKind, m: f64, theta: f64) -> f64 {
    let n = m.ceil();
    let s = (0.5 * theta).sin();
    let base = (n - m) - 2.0 * n * s * s;
    match kind {
        TiltKind::Pack => base + theta.sin(),
        TiltKind::Cover => base - theta.sin(),
    }
}

/// Smallest non-negative root by bisection on a bracket where the residual
/// is monotone.
fn bisect(kind: TiltKind, m: f64) -> f64 {
    let n = m.ceil();
    if n == m {
        return 0.0;
    }
    let (mut lo, mut hi) = match kind {
        TiltKind::Pack => ((1.0 / n).atan(), std::f64::consts::FRAC_PI_2),
        TiltKind::Cover => (0.0, std::f64::consts::FRAC_PI_2),
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(kind, m, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c1_tilt_residuals() -> Outcome {
    let start = Instant::now();
    let (mut worst_res, mut bound_fail, mut first_fail) = (0f64, 0usize, None);
    let mut bound_max_m = 0f64;
    for (m, _) in width_grid() {
        for (kind, t) in [
            (TiltKind::Pack, solve_pack_tilt(m)),
            (TiltKind::Cover, solve_cover_tilt(m)),
        ] {
            let Ok(t) = t else {
                return outcome(false, format!("solver error at m={m}"));
            };
            worst_res = worst_res.max(residual(kind, m, t.theta).abs());
            if !(t.theta >= 0.0 && t.theta < SQRT_2 / m.sqrt()) {
                bound_fail += 1;
                bound_max_m = bound_max_m.max(m);
                first_fail.get_or_insert((m, kind, t.theta));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst_res <= 1e-12 && bound_fail == 0 && secs < 5.0;
    let mut detail = format!("max |residual| {worst_res:.2e}, angle bound violated {bound_fail}x, {secs:.2}s");
    if let Some((m, kind, th)) = first_fail {
        detail += &format!(
            " (e.g. {kind:?} m={m}: theta={th:.6} vs {:.6}; largest failing m={bound_max_m})",
            SQRT_2 / m.sqrt()
        );
    }
    outcome(ok, detail)
}

fn c2_bisection_oracle() -> Outcome {
    let mut worst = 0f64;
    let mut at = 0.0;
    for (m, _) in width_grid() {
        for (kind, t) in [
            (TiltKind::Pack, solve_pack_tilt(m)),
            (TiltKind::Cover, solve_cover_tilt(m)),
        ] {
            let d = (t.unwrap().theta - bisect(kind, m)).abs();
            if d > worst {
                worst = d;
                at = m;
            }
        }
    }
    outcome(
        worst <= 1e-11,
        format!("max |closed form - bisection| {worst:.2e} (m={at})"),
    )
}

struct Built {
    plan: Plan,
    report: WasteReport,
}

fn build(mode: Mode, x: f64, cfg: &PackConfig) -> Built {
    let plan = match mode {
        Mode::Pack => pack_square(x, cfg),
        Mode::Cover => cover_square(x, cfg),
    }
    .unwrap_or_else(|e| panic!("{mode} {x}: {e}"));
    let report = account(&plan).unwrap_or_else(|e| panic!("{mode} {x}: {e}"));
    Built { plan, report }
}

/// Plan, accounting and verification JSON, for the determinism check.
fn artifacts(b: &Built, v: &impl serde::Serialize) -> Vec<u8> {
    let mut out = b.plan.to_json().unwrap().into_bytes();
    out.extend(serde_json::to_vec(&b.report).unwrap());
    out.extend(serde_json::to_vec(v).unwrap());
    out
}

struct Enumerable {
    /// (x, violations, analytic count, enumerated count, artifacts)
    rows: Vec<(f64, u64, u64, u64, Vec<u8>)>,
    reports: Vec<WasteReport>,
    secs: f64,
}

fn run_enumerable(mode: Mode, xs: &[f64]) -> Enumerable {
    let cfg = PackConfig::default();
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &x in xs {
        let b = build(mode, x, &cfg);
        let region = Region::square(x);
        let v = match mode {
            Mode::Pack => verify_packing(&b.plan, &region, &cfg),
            Mode::Cover => verify_covering(&b.plan, &region, &cfg),
        }
        .unwrap();
        let enumerated = enumerate_placements(&b.plan, cfg.limit).unwrap().len() as u64;
        let bad = v.violation_count + u64::from(v.partial);
        rows.push((x, bad, b.plan.square_count(), enumerated, artifacts(&b, &v)));
        reports.push(b.report);
    }
    Enumerable {
        rows,
        reports,
        secs: start.elapsed().as_secs_f64(),
    }
}

fn c3_packing_valid(e: &Enumerable) -> Outcome {
    let bad: Vec<String> = e
        .rows
        .iter()
        .filter(|r| r.1 > 0)
        .map(|r| format!("x={} ({})", r.0, r.1))
        .collect();
    let total: u64 = e.rows.iter().map(|r| r.2).sum();
    outcome(
        bad.is_empty() && e.secs < 120.0,
        format!(
            "{total} squares over {} plans, violations: {bad:?}, {:.1}s",
            e.rows.len(),
            e.secs
        ),
    )
}

fn c4_square_bound(e: &Enumerable) -> Outcome {
    let c = 16.0 * SQRT_2 + 38.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &e.reports {
        let bound = c * r.x.powf(0.625);
        ok &= r.waste_or_excess <= bound;
        parts.push(format!("x={}: {} <= {:.1}", r.x, r.waste_or_excess, bound));
    }
    outcome(ok, parts.join("; "))
}

fn ledger(r: &WasteReport) -> String {
    let mut e = r.per_region.clone();
    e.sort_by(|a, b| b.own.abs().total_cmp(&a.own.abs()));
    e.iter()
        .take(8)
        .map(|l| format!("{}={:.2}", l.label, l.own))
        .collect::<Vec<_>>()
        .join(" ")
}

fn c5_type_bounds() -> Outcome {
    let cfg = PackConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for f in [0.3, 1.0] {
        for x in [1e4, 1e5] {
            let spec = Type2Spec {
                x,
                top: 2.0 * x.sqrt(),
                theta: f * max_slant(x),
            };
            let r = account(&pack_type2(&spec, &cfg).unwrap()).unwrap();
            let bound = T2_CONST * x.powf(5.0 / 6.0);
            let pass = r.waste_or_excess <= bound;
            ok &= pass;
            parts.push(format!("T2 x={x:e} f={f}: {:.1} <= {bound:.1}", r.waste_or_excess));
            if !pass {
                parts.push(format!("ledger: {}", ledger(&r)));
            }
        }
        for x in [1e4, 1e6] {
            let spec = Type3Spec::new(x, 0.5 * x.sqrt(), f * max_slant(x), Mode::Pack);
            let r = account(&pack_type3(&spec, &cfg).unwrap()).unwrap();
            let bound = T3_CONST * x.cbrt();
            let pass = r.waste_or_excess <= bound;
            ok &= pass;
            parts.push(format!("T3 x={x:e} f={f}: {:.1} <= {bound:.1}", r.waste_or_excess));
            if !pass {
                parts.push(format!("ledger: {}", ledger(&r)));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn c6_covering_valid(e: &Enumerable) -> Outcome {
    let mut ok = e.rows.iter().all(|r| r.1 == 0);
    let mut parts = Vec::new();
    for (r, rep) in e.rows.iter().zip(&e.reports) {
        let bound = SQUARE_CONST * r.0.powf(0.625);
        ok &= rep.waste_or_excess <= bound;
        parts.push(format!(
            "x={}: violations {}, excess {} <= {bound:.1}",
            r.0, r.1, rep.waste_or_excess
        ));
    }
    outcome(ok, format!("{} ({:.1}s)", parts.join("; "), e.secs))
}

fn c7_integer_exact() -> Outcome {
    let cfg = PackConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for x in [50.0, 400.0, 1000.0] {
        for mode in [Mode::Pack, Mode::Cover] {
            let w = build(mode, x, &cfg).report.waste_or_excess;
            ok &= w == 0.0;
            parts.push(format!("{mode} {x}: {w}"));
        }
    }
    outcome(ok, parts.join(", "))
}

fn c8_alpha_increment() -> Outcome {
    let mut worst = 0f64;
    let mut checked = 0;
    let mut ok = true;
    for x in [1e4f64, 1e5, 1e6] {
        let limit = 3.0 * (1.0 + SQRT_2) / x.sqrt();
        for f in [0.3, 1.0] {
            let theta = f * max_slant(x);
            let pack = type3_partition(&Type3Spec::new(x, 0.5 * x.sqrt(), theta, Mode::Pack)).unwrap();
            let cover = cover_partition(&Type3Spec::new(x, 0.5 * x.sqrt(), theta, Mode::Cover)).unwrap();
            for bands in [&pack.bands, &cover.bands] {
                for w in bands.windows(2) {
                    let d = (w[1].alpha - w[0].alpha).abs();
                    checked += 1;
                    ok &= d <= limit;
                    worst = worst.max(d * x.sqrt());
                }
            }
        }
    }
    outcome(
        ok && checked > 0,
        format!(
            "{checked} consecutive pairs, max |dalpha|*sqrt(x) = {worst:.3} (limit {:.3})",
            3.0 * (1.0 + SQRT_2)
        ),
    )
}

fn c9_leading_order() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut at = 0.0;
    for (m, r) in width_grid() {
        // r = 0 is the integer case with theta = 0; the law is for fixed r > 0.
        if m < 100.0 || r == 0.0 {
            continue;
        }
        let t = solve_pack_tilt(m).unwrap();
        let gap = (t.theta * m.sqrt() - (2.0 * (1.0 - r)).sqrt()).abs() - 3.0 / m.sqrt();
        if gap > worst {
            worst = gap;
            at = m;
        }
    }
    outcome(
        worst <= 0.0,
        format!("max(|theta*sqrt(m) - sqrt(2(1-r))| - 3/sqrt(m)) = {worst:.3e} at m={at}"),
    )
}

fn c10_series() -> (Outcome, Vec<u8>) {
    let start = Instant::now();
    let rows = run_series(&SERIES_XS, Mode::Pack, &PackConfig::default(), false).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let fit = fit_slope(&rows);
    let slope = fit.map_or(f64::NAN, |f| f.slope);
    let ratios: Vec<String> = rows.iter().map(|r| format!("{:.2}", r.ratio)).collect();
    let ok = slope <= 0.75 && rows.iter().all(|r| r.ratio <= SQUARE_CONST) && secs < 300.0;
    let csv = to_csv(&rows).unwrap().into_bytes();
    (
        outcome(
            ok,
            format!("slope {slope:.4} (limit 0.75), ratios {ratios:?} (limit 60.627), {secs:.1}s"),
        ),
        csv,
    )
}

fn c11_counts(p: &Enumerable, c: &Enumerable) -> Outcome {
    let bad: Vec<String> = p
        .rows
        .iter()
        .chain(&c.rows)
        .filter(|r| r.2 != r.3)
        .map(|r| format!("x={}: {} vs {}", r.0, r.2, r.3))
        .collect();
    outcome(
        bad.is_empty(),
        format!("{} plans compared, mismatches: {bad:?}", p.rows.len() + c.rows.len()),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        println!(
            "{} criterion {n:>2} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((n, name, o));
    };
    report(1, "tilt residuals and angle bound", c1_tilt_residuals());
    report(2, "closed form matches bisection", c2_bisection_oracle());
    let pack = run_enumerable(Mode::Pack, &PACK_XS);
    report(3, "packing validity", c3_packing_valid(&pack));
    report(4, "square waste bound", c4_square_bound(&pack));
    report(5, "trapezoid waste bounds", c5_type_bounds());
    let cover = run_enumerable(Mode::Cover, &COVER_XS);
    report(6, "covering validity", c6_covering_valid(&cover));
    report(7, "integer sides are exact", c7_integer_exact());
    report(8, "alpha increments", c8_alpha_increment());
    report(9, "leading-order tilt law", c9_leading_order());
    let (series, csv) = c10_series();
    report(10, "waste exponent trend", series);
    report(11, "analytic count equals enumeration", c11_counts(&pack, &cover));

    let pack2 = run_enumerable(Mode::Pack, &PACK_XS);
    let cover2 = run_enumerable(Mode::Cover, &COVER_XS);
    let (_, csv2) = c10_series();
    let same = |a: &Enumerable, b: &Enumerable| a.rows.iter().zip(&b.rows).all(|(x, y)| x.4 == y.4);
    let det = same(&pack, &pack2) && same(&cover, &cover2) && csv == csv2;
    report(
        12,
        "determinism",
        outcome(det, format!("plans, reports and CSV identical across two runs: {det}")),
    );

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failed: {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
