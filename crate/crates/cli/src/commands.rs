use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use transhyp::families::admissible_domain;
use transhyp::odesolve::{
    arctan_first_integral_check, convergence_study, integrate, sup_error, ConvergenceReport, FirstIntegralReport, OdeRun,
};
use transhyp::sympoly::{maclaurin_check, newton_check, zero_propagation_check, MaclaurinReport, NewtonReport, ZeroPropagationReport};
use transhyp::verify::{
    evaluate_grid, random, report_from_samples, summarize, theorem2_witness_scan, w_derivative_identity_check_with_step,
    gr_derivative_identity_check, DerivativeRoute, IdentityReport, RStats, Theorem2Verdict, VerificationReport,
    GR_IDENTITY_STEP, W_IDENTITY_STEP,
};
use transhyp::{Interval, SymInput};

use crate::config::{GraphSpec, LoadedConfig, RouteName};
use crate::error::CliResult;
use crate::output::{points_csv, to_json, write_file};

/// Where artifacts go and which seed applies.
#[derive(Debug, Clone)]
pub struct RunContext<'a> {
    pub out_dir: &'a Path,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub passed: bool,
}

impl AssertionOutcome {
    fn new(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
        }
    }
}

fn all_passed(a: &[AssertionOutcome]) -> bool {
    a.iter().all(|x| x.passed)
}

fn print_assertions(a: &[AssertionOutcome]) {
    for x in a {
        println!("{} {}", if x.passed { "PASS" } else { "FAIL" }, x.name);
    }
}

fn report_name(cfg: &LoadedConfig) -> &str {
    cfg.config.output.report.as_deref().unwrap_or("report.json")
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    run_seed: u64,
    assertions: Vec<AssertionOutcome>,
    passed: bool,
}

fn check_r(r: usize, n: usize) -> transhyp::Result<()> {
    if r < 1 || r > n {
        return Err(transhyp::Error::Range {
            what: "r",
            value: r as i64,
            lo: 1,
            hi: n as i64,
        });
    }
    Ok(())
}

pub fn scan(cfg: &LoadedConfig, ctx: &RunContext) -> CliResult<bool> {
    let spec = cfg.graph_spec()?;
    let grid_cfg = cfg.section("grid", &cfg.config.grid)?;
    let tols = cfg.tolerances()?;
    let g = spec.build()?;
    let n = g.dim();
    let r_set = cfg.config.r_set.clone().unwrap_or_else(|| (1..=n).collect());
    if r_set.is_empty() {
        return Err(cfg.config_error("`r_set` is empty"));
    }
    for &r in r_set.iter().chain(&cfg.config.assertions.zero).chain(&cfg.config.assertions.constant) {
        check_r(r, n)?;
    }
    let grid = grid_cfg.build(&g.domains(), ctx.seed)?;
    let samples = evaluate_grid(&g, &grid)?;
    let report = report_from_samples(&g, &grid, &samples, &r_set, &tols);

    let stats_for = |r: usize| -> RStats {
        report.stats(r).cloned().unwrap_or_else(|| summarize(&samples, r, &tols))
    };
    let mut assertions = Vec::new();
    if cfg.config.assertions.oracle {
        for s in &report.per_r {
            assertions.push(AssertionOutcome::new(
                format!("oracle agreement r={} (max scaled discrepancy {:e})", s.r, s.oracle_max_disc),
                s.oracle_agrees,
            ));
        }
    }
    for &r in &cfg.config.assertions.zero {
        let s = stats_for(r);
        assertions.push(AssertionOutcome::new(format!("S_{r} vanishes (max |S_{r}| = {:e})", s.max_abs), s.is_zero(&tols)));
    }
    for &r in &cfg.config.assertions.constant {
        let s = stats_for(r);
        assertions.push(AssertionOutcome::new(format!("S_{r} constant (spread {:e})", s.max - s.min), s.constant));
    }
    let passed = all_passed(&assertions);

    let csv_name = cfg.config.output.csv.as_deref().unwrap_or("points.csv");
    let csv_path = write_file(ctx.out_dir, csv_name, &points_csv(&samples, n))?;
    let out = ScanOutput {
        report: &report,
        run_seed: ctx.seed,
        assertions,
        passed,
    };
    let json_path = write_file(ctx.out_dir, report_name(cfg), &to_json(&out))?;

    println!("graph: {}", report.graph);
    println!("points: {}", report.points);
    for s in &report.per_r {
        println!(
            "r={} max|S_r|={:e} mean={:e} std={:e} constant={} oracle_max_disc={:e}",
            s.r, s.max_abs, s.mean, s.std, s.constant, s.oracle_max_disc
        );
    }
    print_assertions(&out.assertions);
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(passed)
}

#[derive(Serialize)]
struct FamilyOutput {
    family: &'static str,
    n: usize,
    r: usize,
    beta: Option<f64>,
    effective_last_slope: Option<f64>,
    intervals: Vec<Interval>,
    verdict: Option<Theorem2Verdict>,
    passed: bool,
}

pub fn family(cfg: &LoadedConfig, ctx: &RunContext) -> CliResult<bool> {
    let spec = cfg.graph_spec()?;
    let g = spec.build()?;
    let (name, n, r, beta, slope, intervals) = match &spec {
        GraphSpec::Profiles(_) => return Err(cfg.config_error("`family` needs a family graph, not a profile list")),
        GraphSpec::Cylinder(p) => ("cylinder", p.n, p.r, None, None, g.domains()),
        GraphSpec::Enneper(p) => (
            "enneper",
            p.n,
            p.r,
            Some(p.beta()),
            Some(p.effective_last_slope()?),
            admissible_domain(p)?,
        ),
    };
    println!("family: {name} (n={n}, r={r})");
    if let Some(a) = slope {
        println!("a_{n}^eff = {a}");
    }
    if let Some(b) = beta {
        println!("beta = {b}");
    }
    let shown: Vec<String> = intervals.iter().map(|d| d.to_string()).collect();
    println!("intervals: {}", shown.join(" x "));

    let verdict = match &cfg.config.grid {
        Some(grid_cfg) => {
            let tols = cfg.tolerances()?;
            let grid = grid_cfg.build(&g.domains(), ctx.seed)?;
            let v = theorem2_witness_scan(&g, &grid, r, &tols)?;
            println!("verdict for S_{r}: {}", verdict_label(&v));
            if let Theorem2Verdict::ConstantNonzero { witness } = &v {
                println!("witness: {}", serde_json::to_string(witness).expect("witness serializes"));
            }
            Some(v)
        }
        None => None,
    };
    let passed = verdict.as_ref().is_none_or(|v| matches!(v, Theorem2Verdict::ConstantZero));
    let out = FamilyOutput {
        family: name,
        n,
        r,
        beta,
        effective_last_slope: slope,
        intervals,
        verdict,
        passed,
    };
    write_file(ctx.out_dir, report_name(cfg), &to_json(&out))?;
    Ok(passed)
}

fn verdict_label(v: &Theorem2Verdict) -> &'static str {
    match v {
        Theorem2Verdict::ConstantZero => "constant-zero",
        Theorem2Verdict::ConstantNonzero { .. } => "constant-nonzero",
        Theorem2Verdict::Nonconstant => "nonconstant",
    }
}

#[derive(Serialize)]
struct OdeOutput {
    run: OdeRun,
    sup_error_f: f64,
    sup_error_v: f64,
    first_integral: FirstIntegralReport,
    convergence: Option<ConvergenceReport>,
    assertions: Vec<AssertionOutcome>,
    passed: bool,
}

pub fn ode(cfg: &LoadedConfig, ctx: &RunContext) -> CliResult<bool> {
    let o = cfg.config.ode.clone().unwrap_or_default();
    let (lo, hi) = match o.span {
        Some([lo, hi]) => (lo, hi),
        None => OdeRun::inset_span(o.slope, o.beta, o.phase, o.x_inset),
    };
    let run = OdeRun::new(o.slope, o.beta, o.phase, lo, hi, o.step)?;
    let traj = integrate(&run)?;
    let (ef, ev) = sup_error(&run, &traj);
    let first_integral = arctan_first_integral_check(&run, &traj, o.tol);

    let mut assertions = vec![
        AssertionOutcome::new(format!("sup error {:e} <= {:e}", ef.max(ev), o.tol), ef.max(ev) <= o.tol),
        AssertionOutcome::new(
            format!("first integral deviation {:e} <= {:e}", first_integral.max_deviation, o.tol),
            first_integral.passed,
        ),
    ];
    let convergence = if o.halvings > 0 {
        let coarse = OdeRun {
            step: o.convergence_step,
            ..run
        };
        let rep = convergence_study(&coarse, o.halvings)?;
        let [lo_f, hi_f] = o.factor_band;
        for (k, f) in rep.factors.iter().enumerate() {
            assertions.push(AssertionOutcome::new(
                format!("convergence factor {f:.3} at h={:e} in [{lo_f}, {hi_f}]", rep.steps[k + 1]),
                (lo_f..=hi_f).contains(f),
            ));
        }
        Some(rep)
    } else {
        None
    };
    let passed = all_passed(&assertions);
    println!(
        "slope={} beta={} phase={} span=[{lo}, {hi}] h={} steps={}",
        run.slope,
        run.beta,
        run.phase,
        run.step,
        run.steps()
    );
    println!("sup error: f {ef:e}, v {ev:e}");
    print_assertions(&assertions);
    let out = OdeOutput {
        run,
        sup_error_f: ef,
        sup_error_v: ev,
        first_integral,
        convergence,
        assertions,
        passed,
    };
    write_file(ctx.out_dir, report_name(cfg), &to_json(&out))?;
    Ok(passed)
}

#[derive(Serialize)]
struct IdentityEntry {
    identity: &'static str,
    point: Vec<f64>,
    indices: Vec<usize>,
    #[serde(flatten)]
    report: IdentityReport,
}

#[derive(Serialize)]
struct IdentitiesOutput {
    r: usize,
    route: DerivativeRoute,
    entries: Vec<IdentityEntry>,
    passed: bool,
}

/// 1-based index lists to 0-based, rejecting index 0.
fn zero_based(cfg: &LoadedConfig, lists: &[Vec<usize>]) -> CliResult<Vec<Vec<usize>>> {
    lists
        .iter()
        .map(|l| {
            l.iter()
                .map(|&i| i.checked_sub(1).ok_or_else(|| cfg.config_error("identity indices are 1-based")))
                .collect()
        })
        .collect()
}

pub fn identities(cfg: &LoadedConfig, ctx: &RunContext) -> CliResult<bool> {
    let ic = cfg.section("identities", &cfg.config.identities)?;
    let g = cfg.graph_spec()?.build()?;
    let n = g.dim();
    let points = match &ic.points {
        Some(p) => p.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let unbounded = Interval::new(ic.unbounded[0], ic.unbounded[1])?;
            (0..ic.samples).map(|_| random::point_in(&mut rng, &g.domains(), ic.inset, unbounded)).collect()
        }
    };
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(cfg.config_error(format!("identity point {p:?} does not have {n} coordinates")));
    }
    let route = match ic.route {
        RouteName::FiniteDifference => DerivativeRoute::FiniteDifference {
            step: ic.gr_step.unwrap_or(GR_IDENTITY_STEP),
        },
        RouteName::Analytic => DerivativeRoute::Analytic,
    };
    let w_lists = zero_based(cfg, &ic.w)?;
    let gr_lists = zero_based(cfg, &ic.gr)?;
    let mut entries = Vec::new();
    for x in &points {
        for idx in &w_lists {
            let report = w_derivative_identity_check_with_step(&g, x, ic.r, idx, ic.w_tol, ic.w_step.unwrap_or(W_IDENTITY_STEP))?;
            entries.push(IdentityEntry {
                identity: "w",
                point: x.clone(),
                indices: idx.iter().map(|i| i + 1).collect(),
                report,
            });
        }
        for idx in &gr_lists {
            let report = gr_derivative_identity_check(&g, x, ic.r, idx, ic.gr_tol, route)?;
            entries.push(IdentityEntry {
                identity: "gr",
                point: x.clone(),
                indices: idx.iter().map(|i| i + 1).collect(),
                report,
            });
        }
    }
    let passed = entries.iter().all(|e| e.report.passed);
    for name in ["w", "gr"] {
        let sel: Vec<&IdentityEntry> = entries.iter().filter(|e| e.identity == name).collect();
        if sel.is_empty() {
            continue;
        }
        let worst = sel.iter().map(|e| e.report.rel_error).fold(0.0, f64::max);
        let ok = sel.iter().all(|e| e.report.passed);
        println!(
            "{} {name} identity: {} checks, worst relative error {worst:e}",
            if ok { "PASS" } else { "FAIL" },
            sel.len()
        );
    }
    let out = IdentitiesOutput {
        r: ic.r,
        route,
        entries,
        passed,
    };
    write_file(ctx.out_dir, report_name(cfg), &to_json(&out))?;
    Ok(passed)
}

#[derive(Serialize)]
struct SymOutput {
    values: Vec<f64>,
    sigma: Vec<f64>,
    means: Vec<f64>,
    newton: NewtonReport,
    maclaurin: MaclaurinReport,
    zero_propagation: Vec<(usize, ZeroPropagationReport)>,
    passed: bool,
}

pub fn sym(cfg: &LoadedConfig, ctx: &RunContext) -> CliResult<bool> {
    let sc = cfg.section("sym", &cfg.config.sym)?;
    let input = SymInput::new(sc.values.clone())?;
    let n = input.len();
    let newton = newton_check(&input, sc.tol)?;
    let maclaurin = maclaurin_check(&input, n, sc.tol)?;
    let zero_propagation = (1..n)
        .map(|r| zero_propagation_check(&input, r, sc.tol).map(|z| (r, z)))
        .collect::<transhyp::Result<Vec<_>>>()?;

    let gaps: Vec<String> = newton.gaps.iter().map(|g| format!("{g:e}")).collect();
    println!("H: {:?}", input.means());
    println!("Newton gaps: [{}]", gaps.join(", "));
    println!(
        "Newton {}; equality case {}; values all equal: {}",
        if newton.holds { "holds" } else { "violated" },
        if newton.equality_detected { "detected" } else { "not detected" },
        newton.values_all_equal
    );
    match &maclaurin {
        MaclaurinReport::NotApplicable { first_nonpositive } => {
            println!("Maclaurin not applicable (H_{first_nonpositive} <= 0)")
        }
        MaclaurinReport::Checked { holds, .. } => println!("Maclaurin {}", if *holds { "holds" } else { "violated" }),
    }
    let zp_ok = zero_propagation.iter().all(|(_, z)| z.holds);
    println!("zero propagation {}", if zp_ok { "holds" } else { "violated" });

    let passed = newton.holds && newton.consistent() && maclaurin.holds() && zp_ok;
    let out = SymOutput {
        values: sc.values.clone(),
        sigma: input.all(),
        means: input.means(),
        newton,
        maclaurin,
        zero_propagation,
        passed,
    };
    write_file(ctx.out_dir, report_name(cfg), &to_json(&out))?;
    Ok(passed)
}
