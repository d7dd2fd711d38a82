use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use super::args::*;
use super::output::{num, Sink, Summary, Table};
use crate::counterexample::{
    blowup_ratio, build_item, certification_threshold, certified_constant, divergence_probe, CounterexampleItem,
    DivergenceVariant, SigmaWindow,
};
use crate::error::{Error, Result};
use crate::estimates::{
    constant_sweep, counterexample_sweep, embedding_probe, estimate_terms, fit_c0, predicted_theta,
    resolvent_estimate_report, EstimateReport, SweepRow, TermSet,
};
use crate::numerics::quad::QuadOptions;
use crate::params::Params;
use crate::resonance::{
    check_smallness, min_positive_element, Condition, EstimateConfig, Lattice, Ratio, RatioClass, SmallnessMode,
};
use crate::solver::{assemble_tp, required_time_nodes, solve_resolvent_rotating, split_modes, TPSeries, TpOptions};
use crate::spectral::dump::{payload_path, read_dump, write_dump};
use crate::spectral::{lq_norm, PhysicalBox, Profile, SpectralField, SpectralGrid};

const DEFAULT_GRID_N: usize = 25;
const DEFAULT_GRID_L: f64 = 6.0;

impl Common {
    fn ratio_value(&self) -> Result<Option<Ratio>> {
        self.ratio.as_deref().map(str::parse).transpose()
    }

    fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(1.0)
    }

    fn omega(&self) -> f64 {
        self.omega.unwrap_or(1.0)
    }

    /// `--period`, else `2π/(ratio·ω)`, else one rotation.
    fn period(&self) -> Result<f64> {
        if let Some(t) = self.period {
            return Ok(t);
        }
        Ok(match self.ratio_value()? {
            Some(r) => TAU / (r.to_f64() * self.omega()),
            None => TAU / self.omega(),
        })
    }

    fn params(&self, q_default: f64) -> Result<Params> {
        Params::new(
            self.lambda(),
            self.omega(),
            self.s.unwrap_or(0.5 * self.omega()),
            self.period()?,
            self.q.unwrap_or(q_default),
        )
    }

    fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(
            self.grid_l.unwrap_or(DEFAULT_GRID_L),
            self.grid_n.unwrap_or(DEFAULT_GRID_N),
        )
    }

    fn physical_box(&self, grid: &SpectralGrid) -> Result<PhysicalBox> {
        let Some(spec) = self.physical_box.as_deref() else {
            return Ok(PhysicalBox::reciprocal(grid));
        };
        let bad = || Error::invalid("box", format!("expected `half_width,points`, got `{spec}`"));
        let (l, n) = spec.split_once(',').ok_or_else(bad)?;
        let l: f64 = l.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        PhysicalBox::new(l, n)
    }

    fn estimate_config(&self) -> EstimateConfig {
        EstimateConfig {
            theta: self.theta.unwrap_or(1.0),
            ..EstimateConfig::default()
        }
    }

    fn time_nodes(&self, g: &SpectralField) -> usize {
        self.time_nodes
            .unwrap_or_else(|| g.angular_bandwidth().map_or(16, required_time_nodes))
    }
}

pub fn load_config(common: Common) -> Result<Common> {
    match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let file: Common = serde_json::from_str(&text)?;
            Ok(common.or(file))
        }
        None => Ok(common),
    }
}

pub fn output_dir(common: &Common) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| std::env::var_os("ROTOSEEN_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn rhs_profile(kind: RhsKind, width: f64) -> Result<Profile> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::invalid("width", "must be finite and > 0"));
    }
    Ok(match kind {
        RhsKind::Axial => Profile::axial_gaussian(width),
        RhsKind::Swirl => Profile::swirl_gaussian(width),
        RhsKind::Gradient => Profile::gradient_gaussian(width),
    })
}

fn closed_rhs(r: &RhsArgs) -> Result<Profile> {
    rhs_profile(r.rhs.unwrap_or(RhsKind::Swirl), r.width.unwrap_or(1.0))
}

fn push_conditions(out: &mut Vec<Condition>, params: &Params, config: &EstimateConfig, ratio: Option<Ratio>) -> Result<()> {
    out.extend(check_smallness(params, config, SmallnessMode::Resolvent, None)?.conditions);
    match check_smallness(params, config, SmallnessMode::Tp, ratio) {
        Ok(r) => out.extend(r.conditions),
        Err(Error::InfimumZero) => out.push(Condition {
            name: "lambda^2 <= theta*min{a > 0 : a in (2pi/T)Z + omega*Z}".into(),
            lhs: params.lambda * params.lambda,
            rhs: 0.0,
            pass: false,
        }),
        Err(e) => return Err(e),
    }
    Ok(())
}

pub fn resonance(args: ResonanceArgs, sink: &Sink) -> Result<Summary> {
    let c = &args.common;
    let omega = c.omega();
    let ratio = match (c.ratio_value()?, args.alpha, c.period) {
        (Some(r), _, _) => r,
        (None, Some(alpha), _) => Ratio::from_float(alpha / omega)?,
        (None, None, Some(t)) => Ratio::from_float(TAU / t / omega)?,
        (None, None, None) => return Err(Error::invalid("ratio", "give --ratio, --alpha or --period")),
    };
    let mut summary = Summary::new("resonance", json!({"common": c, "alpha": args.alpha}))?;
    let lattice = Lattice::new(omega, ratio)?;
    let class = lattice.classify();
    summary.put("ratio", &class, "resonance.classify")?;
    match &class {
        RatioClass::Rational { c: num_c, d, .. } => {
            summary.put("rational", json!({"c": num_c, "d": d}), "resonance.classify")?;
            summary.put("min_positive", min_positive_element(&class, omega)?, "resonance.min_positive_element")?;
        }
        RatioClass::IrrationalWitness { convergents, .. } => {
            summary.put("witnesses", convergents, "resonance.witnesses")?;
        }
    }
    let params = Params::new(
        c.lambda(),
        omega,
        c.s.unwrap_or(0.0),
        TAU / lattice.alpha(),
        c.q.unwrap_or(2.0),
    )?;
    let mut conditions = Vec::new();
    push_conditions(&mut conditions, &params, &c.estimate_config(), Some(ratio))?;
    summary.put("conditions", &conditions, "resonance.check_smallness")?;
    sink.summary(&summary)?;
    Ok(summary)
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ProblemParams {
    lambda: Option<f64>,
    omega: Option<f64>,
    s: Option<f64>,
    period: Option<f64>,
    q: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ProblemRhs {
    Named { name: RhsKind, width: Option<f64> },
    File { file: PathBuf },
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Problem {
    params: ProblemParams,
    rhs: Option<ProblemRhs>,
    grid: Option<crate::spectral::dump::DumpGrid>,
    n_time_nodes: Option<usize>,
}

fn load_problem(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn estimate_for(
    v: &SpectralField,
    p: &SpectralField,
    g: &SpectralField,
    params: &Params,
    grid: &SpectralGrid,
    bx: &PhysicalBox,
    c0: f64,
) -> Result<(EstimateReport, &'static str)> {
    if params.q == 2.0 {
        let terms = estimate_terms(v, p, params, grid, None, TermSet::L2, true)?;
        let rhs = lq_norm(g, 2.0, grid, None)?.value;
        Ok((
            EstimateReport::new(terms, rhs, c0, predicted_theta(params), None),
            "estimates.estimate_terms",
        ))
    } else {
        Ok((
            resolvent_estimate_report(v, p, g, params, grid, bx, c0)?,
            "estimates.resolvent_estimate_report",
        ))
    }
}

pub fn solve(args: SolveArgs, sink: &Sink) -> Result<Summary> {
    let problem = match &args.problem {
        Some(p) => load_problem(p)?,
        None => Problem::default(),
    };
    let from_problem = Common {
        lambda: problem.params.lambda,
        omega: problem.params.omega,
        s: problem.params.s,
        period: problem.params.period,
        q: problem.params.q,
        grid_n: problem.grid.map(|g| g.points_per_axis),
        grid_l: problem.grid.map(|g| g.half_width),
        time_nodes: problem.n_time_nodes,
        ..Common::default()
    };
    let c = args.common.clone().or(from_problem);
    let g: SpectralField = match (&args.rhs.rhs, &problem.rhs) {
        (Some(_), _) | (None, None) => closed_rhs(&args.rhs)?.into(),
        (None, Some(ProblemRhs::Named { name, width })) => {
            rhs_profile(*name, args.rhs.width.or(*width).unwrap_or(1.0))?.into()
        }
        (None, Some(ProblemRhs::File { file })) => {
            let base = args.problem.as_deref().and_then(Path::parent).unwrap_or(Path::new("."));
            read_dump(&base.join(file))?.into()
        }
    };
    let grid = match &g {
        SpectralField::Grid(f) => f.grid,
        SpectralField::ClosedForm(_) => c.grid()?,
    };
    let params = c.params(2.0)?;
    let nt = c.time_nodes(&g);
    let mut summary = Summary::new(
        "solve",
        json!({"common": c, "rhs": args.rhs.rhs, "width": args.rhs.width, "problem": args.problem, "n_time_nodes": nt, "grid": grid}),
    )?;
    let rep = solve_resolvent_rotating(&g, &params, nt, &grid)?;
    summary.put(
        "solve",
        json!({
            "flags": rep.flags,
            "residual_interior": rep.residual_interior,
            "max_mode": rep.max_mode,
            "quadrature_error_estimate": rep.quadrature_error_estimate,
        }),
        "spectral_solver.solve_resolvent_rotating",
    )?;
    let small = check_smallness(&params, &c.estimate_config(), SmallnessMode::Resolvent, None)?;
    summary.put("smallness", &small, "resonance.check_smallness")?;
    let bx = c.physical_box(&grid)?;
    let (est, prov) = estimate_for(&rep.velocity, &rep.pressure, &g, &params, &grid, &bx, 1.0)?;
    summary.put("estimate", &est, prov)?;
    if args.dump {
        for (name, field) in [("velocity", &rep.velocity), ("pressure", &rep.pressure)] {
            let header = sink.path(&format!("{name}.json"));
            write_dump(&header, &field.sample(&grid)?)?;
            summary.artifacts.push(format!("{name}.json"));
            summary
                .artifacts
                .push(payload_path(&header).file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    sink.summary(&summary)?;
    Ok(summary)
}

pub fn tp_assemble(args: TpArgs, sink: &Sink) -> Result<Summary> {
    let c = &args.common;
    let ratio = c.ratio_value()?;
    let params = c.params(2.0)?.with_s(0.0);
    let grid = c.grid()?;
    let g = closed_rhs(&args.rhs)?;
    let nt = c.time_nodes(&g.clone().into());
    let mut summary = Summary::new(
        "tp-assemble",
        json!({"common": c, "rhs": args.rhs.rhs, "width": args.rhs.width, "modes": args.modes, "n_time_nodes": nt}),
    )?;
    let f = args
        .modes
        .iter()
        .fold(TPSeries::new(params.period), |s, &k| s.with_mode(k, g.clone()));
    let bx = c.physical_box(&grid)?;
    let opts = TpOptions {
        n_time_nodes: nt,
        ratio,
        config: c.estimate_config(),
        c0: 1.0,
        physical_box: (params.q != 2.0).then_some(&bx),
    };
    let out = assemble_tp(&f, &params, &grid, &opts)?;
    let (a1, a2) = split_modes(&out.u, params.omega, ratio)?;
    let mut table = Table::new([
        "k",
        "s",
        "residual_interior",
        "kernel_mode_dropped",
        "resolvent_smallness",
        "part",
    ]);
    for m in &out.modes {
        table.push(vec![
            m.k.to_string(),
            num(m.s),
            num(m.residual_interior),
            m.kernel_mode_dropped.to_string(),
            m.resolvent_smallness.to_string(),
            if a1.modes.contains_key(&m.k) { "1" } else { "2" }.to_string(),
        ]);
    }
    sink.csv(&mut summary, "tp_modes.csv", &table)?;
    summary.put("min_positive", out.min_positive, "resonance.min_positive_element")?;
    summary.put("modes", &out.modes, "spectral_solver.assemble_tp")?;
    summary.put("estimate", &out.report, "spectral_solver.assemble_tp")?;
    summary.put(
        "split",
        json!({
            "u1": a1.modes.keys().collect::<Vec<_>>(),
            "u2": a2.modes.keys().collect::<Vec<_>>(),
        }),
        "spectral_solver.split_modes",
    )?;
    let tp = check_smallness(&params, &c.estimate_config(), SmallnessMode::Tp, ratio)?;
    summary.put("smallness", &tp, "resonance.check_smallness")?;
    sink.summary(&summary)?;
    Ok(summary)
}

fn window(w: Window) -> SigmaWindow {
    match w {
        Window::Resonant => SigmaWindow::Resonant,
        Window::Literal => SigmaWindow::Literal,
    }
}

/// Items `ns` in order; those with `|sₙ| < 1/n` are returned separately.
fn build_items(ns: &[u64], lattice: &Lattice, lambda: f64, w: SigmaWindow) -> Result<(Vec<CounterexampleItem>, Vec<u64>)> {
    let built: Vec<Result<CounterexampleItem>> = ns.par_iter().map(|&n| build_item(n, lattice, lambda, w)).collect();
    let mut items = Vec::new();
    let mut skipped = Vec::new();
    for b in built {
        match b {
            Ok(it) => items.push(it),
            Err(Error::SmallS { n, .. }) => skipped.push(n),
            Err(e) => return Err(e),
        }
    }
    Ok((items, skipped))
}

fn family_lattice(c: &Common) -> Result<Lattice> {
    Lattice::new(c.omega(), c.ratio_value()?.unwrap_or(Ratio::Sqrt2))
}

pub fn counterexample(args: CounterexampleArgs, sink: &Sink) -> Result<Summary> {
    let c = &args.common;
    let lattice = family_lattice(c)?;
    let lambda = c.lambda();
    let n_max = c.n_max.unwrap_or(64);
    let ns: Vec<u64> = match c.n {
        Some(n) => vec![n],
        None => (1..=n_max).collect(),
    };
    let mut summary = Summary::new(
        "counterexample",
        json!({"common": c, "variant": args.variant, "window": args.window, "ratio": lattice.ratio}),
    )?;
    let (items, skipped) = build_items(&ns, &lattice, lambda, window(args.window))?;
    let reports: Vec<_> = items.par_iter().map(|it| blowup_ratio(it, QuadOptions::rel(1e-10))).collect();
    let mut table = Table::new([
        "n",
        "k_n",
        "ell_n",
        "sigma_n",
        "s_n",
        "lhs",
        "rhs",
        "ratio",
        "certified_lower",
        "pass",
    ]);
    for (it, r) in items.iter().zip(&reports) {
        table.push(vec![
            it.n.to_string(),
            it.k_n.to_string(),
            it.ell_n.to_string(),
            num(it.sigma_n),
            num(it.s_n),
            num(r.lhs_norm),
            num(r.rhs_norm),
            num(r.ratio),
            r.certified_lower.map(num).unwrap_or_default(),
            r.certified_lower.map(|l| (r.ratio >= l).to_string()).unwrap_or_default(),
        ]);
    }
    sink.csv(&mut summary, "counterexample.csv", &table)?;
    let certified_pass = reports
        .iter()
        .all(|r| r.certified_lower.is_none_or(|l| r.ratio >= l));
    let nondecreasing = reports.windows(2).all(|w| w[1].ratio >= w[0].ratio);
    summary.put("items", &items, "counterexample.build_item")?;
    summary.put("skipped_small_s", &skipped, "counterexample.build_item")?;
    summary.put("blowup", &reports, "counterexample.blowup_ratio")?;
    summary.put("constant", certified_constant(lambda), "counterexample.certified_constant")?;
    summary.put("threshold", certification_threshold(lambda), "counterexample.certification_threshold")?;
    summary.put("all_certified_pass", certified_pass, "counterexample.blowup_ratio")?;
    summary.put("ratio_nondecreasing", nondecreasing, "counterexample.blowup_ratio")?;
    if let Some(v) = args.variant {
        let variant = match v {
            Variant::ANorm => DivergenceVariant::ANorm,
            Variant::L2Norm => DivergenceVariant::L2Norm,
        };
        let t = divergence_probe(&lattice, lambda, n_max, variant, window(args.window))?;
        let mut dt = Table::new([
            "n",
            "k_n",
            "ell_n",
            "ratio",
            "certified_term",
            "direct_term",
            "certified_partial",
            "direct_partial",
        ]);
        for r in &t.rows {
            dt.push(vec![
                r.n.to_string(),
                r.k_n.to_string(),
                r.ell_n.to_string(),
                num(r.ratio),
                num(r.certified_term),
                num(r.direct_term),
                num(r.certified_partial),
                num(r.direct_partial),
            ]);
        }
        sink.csv(&mut summary, "divergence.csv", &dt)?;
        summary.put(
            "divergence",
            json!({
                "variant": t.variant,
                "constant": t.constant,
                "certified_sum": t.certified_sum(),
                "direct_sum": t.direct_sum(),
                "skipped": t.skipped,
            }),
            "counterexample.divergence_probe",
        )?;
    }
    sink.summary(&summary)?;
    Ok(summary)
}

fn sweep_table(rows: &[SweepRow]) -> Table {
    let labels: Vec<String> = rows
        .first()
        .map(|r| r.terms.entries.iter().map(|e| e.label.clone()).collect())
        .unwrap_or_default();
    let mut header: Vec<String> = ["s", "dist", "observed_ratio", "predicted_ceiling", "rhs_norm"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(labels.iter().cloned());
    let mut t = Table::new(header);
    for r in rows {
        let mut row = vec![
            num(r.s),
            num(r.dist),
            num(r.observed_ratio),
            num(r.predicted_ceiling),
            num(r.rhs_norm),
        ];
        row.extend(labels.iter().map(|l| r.terms.get(l).map(num).unwrap_or_default()));
        t.push(row);
    }
    t
}

pub fn sweep(args: SweepArgs, sink: &Sink) -> Result<Summary> {
    let c = &args.common;
    let mut summary = Summary::new(
        "sweep",
        json!({"common": c, "rhs": args.rhs.rhs, "width": args.rhs.width, "s_list": args.s_list, "c0": args.c0, "counterexample": args.counterexample}),
    )?;
    let (rows, prov) = if args.counterexample {
        let lattice = family_lattice(c)?;
        let ns: Vec<u64> = (1..=c.n_max.unwrap_or(32)).collect();
        let (items, skipped) = build_items(&ns, &lattice, c.lambda(), SigmaWindow::Resonant)?;
        summary.put("skipped_small_s", &skipped, "counterexample.build_item")?;
        (counterexample_sweep(&items, args.c0), "estimates.counterexample_sweep")
    } else {
        let params = c.params(2.0)?;
        let grid = c.grid()?;
        let bx = c.physical_box(&grid)?;
        let g: SpectralField = closed_rhs(&args.rhs)?.into();
        let s_list: Vec<f64> = if args.s_list.is_empty() {
            (1..=6).map(|j| params.omega * (1.0 - 0.5f64.powi(j))).collect()
        } else {
            args.s_list.clone()
        };
        let nt = c.time_nodes(&g);
        summary.put("grid", grid, "spectral.grid")?;
        if params.q != 2.0 {
            summary.put("physical_box", bx, "spectral.physical_box")?;
        }
        (
            constant_sweep(&g, &params, &s_list, &grid, nt, Some(&bx), args.c0)?,
            "estimates.constant_sweep",
        )
    };
    summary.put("rows", &rows, prov)?;
    sink.csv(&mut summary, "sweep.csv", &sweep_table(&rows))?;
    let within = rows.iter().all(|r| r.observed_ratio <= r.predicted_ceiling);
    summary.put("within_ceiling", within, prov)?;
    sink.summary(&summary)?;
    Ok(summary)
}

pub fn embedding(args: EmbeddingArgs, sink: &Sink) -> Result<Summary> {
    let c = &args.common;
    let q = c.q.unwrap_or(1.2);
    let grid = c.grid()?;
    let bx = c.physical_box(&grid)?;
    let mut summary = Summary::new(
        "embedding",
        json!({"common": c, "q": q, "lambdas": args.lambdas, "width": args.width}),
    )?;
    let v: SpectralField = rhs_profile(RhsKind::Swirl, args.width)?.into();
    let table = embedding_probe(&v, &args.lambdas, q, &grid, &bx)?;
    let mut t = Table::new([
        "lambda",
        "grad_lhs",
        "fct_lhs",
        "rhs",
        "ratio_grad",
        "ratio_fct",
    ]);
    for r in &table.rows {
        t.push(vec![
            num(r.lambda),
            num(r.grad_lhs),
            num(r.fct_lhs),
            num(r.rhs),
            num(r.ratio_grad),
            num(r.ratio_fct),
        ]);
    }
    sink.csv(&mut summary, "embedding.csv", &t)?;
    let (sg, sf) = table.spread();
    summary.put("table", &table, "estimates.embedding_probe")?;
    summary.put("spread", json!({"grad": sg, "fct": sf}), "estimates.embedding_probe")?;
    sink.summary(&summary)?;
    Ok(summary)
}

pub fn report(args: ReportArgs, sink: &Sink) -> Result<Summary> {
    let c = &args.common;
    let params = c.params(1.5)?;
    let grid = c.grid()?;
    let bx = c.physical_box(&grid)?;
    let seed = c.seed.unwrap_or(0);
    let mut summary = Summary::new(
        "report",
        json!({"common": c, "rhs": args.rhs.rhs, "width": args.rhs.width, "calibration": args.calibration, "seed": seed}),
    )?;
    let fit = fit_c0(seed, args.calibration, params.q, &grid, &bx)?;
    let g: SpectralField = closed_rhs(&args.rhs)?.into();
    let rep = solve_resolvent_rotating(&g, &params, c.time_nodes(&g), &grid)?;
    let est = resolvent_estimate_report(&rep.velocity, &rep.pressure, &g, &params, &grid, &bx, fit.c0)?;
    let mut t = Table::new(["label", "q", "value"]);
    for e in &est.terms.entries {
        t.push(vec![e.label.clone(), num(e.q), num(e.value)]);
    }
    t.push(vec!["rhs".into(), num(params.q), num(est.rhs_norm)]);
    sink.csv(&mut summary, "report.csv", &t)?;
    let mut cal = Table::new(["instance", "ratio", "p_theta"]);
    for (i, (r, p)) in fit.instances.iter().enumerate() {
        cal.push(vec![i.to_string(), num(*r), num(*p)]);
    }
    sink.csv(&mut summary, "calibration.csv", &cal)?;
    summary.put(
        "c0_fit",
        json!({"c0": fit.c0, "seed": fit.seed, "q": fit.q, "instances": fit.instances.len()}),
        "estimates.fit_c0",
    )?;
    summary.put("residual_interior", rep.residual_interior, "spectral_solver.solve_resolvent_rotating")?;
    summary.put("estimate", &est, "estimates.resolvent_estimate_report")?;
    summary.put(
        "within_prediction",
        est.ratio <= est.predicted_constant,
        "estimates.resolvent_estimate_report",
    )?;
    sink.summary(&summary)?;
    Ok(summary)
}
