//! A priori estimates measured on concrete fields: anisotropic Sobolev
//! exponents, embedding ratios, the full list of resolvent-estimate terms
//! and the constant they are predicted to obey.

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counterexample::{closed_form_norms, vn_weighted_l2_sq, CounterexampleItem};
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;
use crate::numerics::quad::QuadOptions;
use crate::params::Params;
use crate::resonance::dist_to_lattice;
use crate::solver::solve_resolvent_rotating;
use crate::spectral::ops::{leray_at, multiply_symbol};
use crate::spectral::{
    apply_resolvent_operator, inverse_transform, lq_norm, GridField, LqNorm, NormMethod, NormReport,
    PhysicalBox, Profile, SpectralField, SpectralGrid, C64,
};

/// `s₁ = (n+1)q/(n+1−q)`, `s₂ = (n+1)q/(n+1−2q)`; `None` outside the
/// admissible ranges `q < n+1` and `q < (n+1)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub n: u32,
    pub q: Rational64,
    pub s1: Option<Rational64>,
    pub s2: Option<Rational64>,
}

pub fn sobolev_exponents(n: u32, q: Rational64) -> Result<ExponentPair> {
    if n < 2 {
        return Err(Error::invalid("n", "dimension must be >= 2"));
    }
    if q <= Rational64::from_integer(1) {
        return Err(Error::ExponentOutOfRange {
            q: *q.numer() as f64 / *q.denom() as f64,
            range: "(1, ∞)",
        });
    }
    let m = Rational64::from_integer(n as i64 + 1);
    let two = Rational64::from_integer(2);
    Ok(ExponentPair {
        n,
        q,
        s1: (q < m).then(|| m * q / (m - q)),
        s2: (two * q < m).then(|| m * q / (m - two * q)),
    })
}

/// Which terms of the estimate to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermSet {
    /// All eight terms at exponent `params.q ∈ (1, 2)`.
    Full,
    /// The terms that live in L² (q = 2).
    L2,
}

pub const TERM_DIST: &str = "dist(s,ωℤ)‖v‖_q";
pub const TERM_ROTATION: &str = "‖isv+ω(e₁∧x·∇v−e₁∧v)‖_q";
pub const TERM_HESSIAN: &str = "‖∇²v‖_q";
pub const TERM_TRANSPORT: &str = "λ‖∂₁v‖_q";
pub const TERM_PRESSURE_GRAD: &str = "‖∇p‖_q";
pub const TERM_GRAD_SOBOLEV: &str = "λ^{1/4}‖∇v‖_{4q/(4−q)}";
pub const TERM_FCT_SOBOLEV: &str = "λ^{1/2}‖v‖_{2q/(2−q)}";
pub const TERM_PRESSURE: &str = "‖p‖_{3q/(3−q)}";

/// `‖(Σ_f |f|²)^{1/2}‖_q` for several grid fields sharing one grid.
pub fn lq_norm_multi(fields: &[GridField], q: f64, bx: Option<&PhysicalBox>) -> Result<LqNorm> {
    let Some(first) = fields.first() else {
        return Err(Error::invalid("fields", "need at least one field"));
    };
    if fields.iter().any(|f| f.grid != first.grid) {
        return Err(Error::GridMismatch("fields live on different grids".into()));
    }
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::ExponentOutOfRange { q, range: "(1, ∞)" });
    }
    if q == 2.0 {
        let sq: Vec<f64> = fields
            .iter()
            .flat_map(|f| f.values.iter().map(|v| v.norm_sqr()))
            .collect();
        return Ok(LqNorm {
            q,
            value: (pairwise_sum(&sq) * first.grid.cell_volume()).sqrt(),
            method: NormMethod::FourierRiemann,
            truncated: false,
            tail_fraction: 0.0,
            physical_box: None,
        });
    }
    let bx = bx.ok_or_else(|| Error::invalid("physical_box", format!("required for q = {q} ≠ 2")))?;
    let mut mag = vec![0.0; bx.len()];
    let mut shell = vec![false; bx.len()];
    for f in fields {
        let pf = inverse_transform(f, bx);
        for (idx, m) in mag.iter_mut().enumerate() {
            *m += pf.magnitude_sq(idx);
        }
        if shell.iter().all(|s| !s) {
            for (idx, s) in shell.iter_mut().enumerate() {
                *s = pf.is_shell(idx);
            }
        }
    }
    let all: Vec<f64> = mag.iter().map(|m| m.powf(q / 2.0)).collect();
    let tail: Vec<f64> = all
        .iter()
        .zip(&shell)
        .map(|(v, s)| if *s { *v } else { 0.0 })
        .collect();
    let total = pairwise_sum(&all);
    let tail = pairwise_sum(&tail);
    Ok(LqNorm {
        q,
        value: (total * bx.cell_volume()).powf(1.0 / q),
        method: NormMethod::PhysicalRiemann,
        truncated: true,
        tail_fraction: if total > 0.0 { tail / total } else { 0.0 },
        physical_box: Some(*bx),
    })
}

fn partials(v: &GridField) -> Vec<GridField> {
    (0..3)
        .map(|j| multiply_symbol(v, move |xi| C64::new(0.0, xi[j])))
        .collect()
}

fn hessian(v: &GridField) -> Vec<GridField> {
    let mut out = Vec::with_capacity(9);
    for j in 0..3 {
        for k in 0..3 {
            out.push(multiply_symbol(v, move |xi| C64::new(-xi[j] * xi[k], 0.0)));
        }
    }
    out
}

/// Left-hand terms of the resolvent estimate for `(v, p)`, derivatives by
/// multiplication with `iξ`. `include_dist` adds `dist(s,ωℤ)‖v‖_q`.
pub fn estimate_terms(
    v: &SpectralField,
    p: &SpectralField,
    params: &Params,
    grid: &SpectralGrid,
    bx: Option<&PhysicalBox>,
    set: TermSet,
    include_dist: bool,
) -> Result<NormReport> {
    v.require_components(3)?;
    p.require_components(1)?;
    let q = match set {
        TermSet::Full => {
            params.require_q_below(2.0, "(1, 2)")?;
            params.q
        }
        TermSet::L2 => 2.0,
    };
    let vg = v.sample(grid)?;
    let pg = p.sample(grid)?;
    let zero_p: SpectralField = Profile::Zero { components: 1 }.into();
    let applied = apply_resolvent_operator(v, &zero_p, params, grid)?;
    let lam = params.lambda;
    let diffusion = multiply_symbol(&vg, move |xi| {
        C64::new(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2], -lam * xi[0])
    });
    let mut rotation = applied.field;
    for (r, d) in rotation.values.iter_mut().zip(&diffusion.values) {
        *r -= d;
    }
    let one = |f: GridField| lq_norm_multi(&[f], q, bx).map(|n| n.value);

    let mut rep = NormReport::default();
    if include_dist {
        let d = dist_to_lattice(params.s, params.omega);
        rep.push(TERM_DIST, q, d * one(vg.clone())?);
    }
    rep.push(TERM_ROTATION, q, one(rotation)?);
    rep.push(TERM_HESSIAN, q, lq_norm_multi(&hessian(&vg), q, bx)?.value);
    let d1 = multiply_symbol(&vg, |xi| C64::new(0.0, xi[0]));
    rep.push(TERM_TRANSPORT, q, lam * one(d1)?);
    let grad_p = crate::spectral::ops::gradient_scalar(&pg);
    rep.push(TERM_PRESSURE_GRAD, q, one(grad_p)?);
    if set == TermSet::Full {
        let s_grad = 4.0 * q / (4.0 - q);
        let s_fct = 2.0 * q / (2.0 - q);
        let s_p = 3.0 * q / (3.0 - q);
        rep.push(TERM_GRAD_SOBOLEV, s_grad, lam.powf(0.25) * lq_norm_multi(&partials(&vg), s_grad, bx)?.value);
        rep.push(TERM_FCT_SOBOLEV, s_fct, lam.sqrt() * one(vg)?);
        rep.push(TERM_PRESSURE, s_p, one(pg)?);
    }
    Ok(rep)
}

/// Terms of an estimate against its right-hand side and the predicted
/// constant `C₀(1+θ)³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub terms: NormReport,
    pub rhs_norm: f64,
    /// `Σ terms / rhs_norm`; 0 when both vanish.
    pub ratio: f64,
    /// Both sides vanish.
    pub degenerate: bool,
    pub predicted_constant: f64,
    pub c0: f64,
    /// The argument of `P(θ) = (1+θ)³`.
    pub theta: f64,
    pub physical_box: Option<PhysicalBox>,
}

impl EstimateReport {
    pub fn new(terms: NormReport, rhs_norm: f64, c0: f64, theta: f64, physical_box: Option<PhysicalBox>) -> Self {
        let total = terms.total();
        let degenerate = total == 0.0 && rhs_norm == 0.0;
        let ratio = if degenerate { 0.0 } else { total / rhs_norm };
        EstimateReport {
            terms,
            rhs_norm,
            ratio,
            degenerate,
            predicted_constant: c0 * (1.0 + theta).powi(3),
            c0,
            theta,
            physical_box,
        }
    }
}

/// `λ²/ω` when `s ∈ ωℤ`, else `λ²/dist(s, ωℤ)`.
pub fn predicted_theta(params: &Params) -> f64 {
    let d = dist_to_lattice(params.s, params.omega);
    let lam2 = params.lambda * params.lambda;
    if d == 0.0 {
        lam2 / params.omega
    } else {
        lam2 / d
    }
}

/// The full resolvent estimate for a solution `(v, p)` of data `g`.
pub fn resolvent_estimate_report(
    v: &SpectralField,
    p: &SpectralField,
    g: &SpectralField,
    params: &Params,
    grid: &SpectralGrid,
    bx: &PhysicalBox,
    c0: f64,
) -> Result<EstimateReport> {
    params.require_q_below(2.0, "(1, 2)")?;
    g.require_components(3)?;
    let terms = estimate_terms(v, p, params, grid, Some(bx), TermSet::Full, true)?;
    let rhs = lq_norm(g, params.q, grid, Some(bx))?.value;
    Ok(EstimateReport::new(terms, rhs, c0, predicted_theta(params), Some(*bx)))
}

/// The L² terms for the counterexample pair `(vₙ, 0)` with data `gₙ`,
/// integrated exactly over the slab rather than sampled on a grid.
pub fn counterexample_l2_report(item: &CounterexampleItem, c0: f64) -> EstimateReport {
    let f = item.family();
    let opts = QuadOptions::rel(1e-10);
    let v2 = vn_weighted_l2_sq(&f, |_, _| 1.0, opts);
    let hess = vn_weighted_l2_sq(&f, |x1, r2| (x1 * x1 + r2).powi(2), opts);
    let d1 = vn_weighted_l2_sq(&f, |x1, _| x1 * x1, opts);
    let dist = dist_to_lattice(item.s_n, item.omega);
    let mut terms = NormReport::default();
    terms.push(TERM_DIST, 2.0, dist * v2.sqrt());
    terms.push(TERM_ROTATION, 2.0, item.sigma_n * v2.sqrt());
    terms.push(TERM_HESSIAN, 2.0, hess.sqrt());
    terms.push(TERM_TRANSPORT, 2.0, item.lambda * d1.sqrt());
    terms.push(TERM_PRESSURE_GRAD, 2.0, 0.0);
    let rhs = closed_form_norms(item).norm_g_sq.sqrt();
    let lam2 = item.lambda * item.lambda;
    let theta = if dist == 0.0 { lam2 / item.omega } else { lam2 / dist };
    EstimateReport::new(terms, rhs, c0, theta, None)
}

/// Fitted `C₀`: the largest `ratio / P(θ)` over a seeded suite of
/// manufactured single-node solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C0Fit {
    pub c0: f64,
    pub seed: u64,
    pub q: f64,
    /// `(observed ratio, P(θ))` per instance.
    pub instances: Vec<(f64, f64)>,
}

/// One manufactured solution: solenoidal `v̂` and scalar `p̂` supported on
/// a single interior node, and `ĝ` from the forward operator.
pub fn manufactured_single_node(
    rng: &mut ChaCha8Rng,
    grid: &SpectralGrid,
    params: &Params,
) -> Result<(GridField, GridField, GridField)> {
    let n = grid.points_per_axis;
    let idx = loop {
        let (i, j, k) = (rng.gen_range(1..n - 1), rng.gen_range(1..n - 1), rng.gen_range(1..n - 1));
        let idx = grid.flat(i, j, k);
        if idx != grid.origin_index() {
            break idx;
        }
    };
    let xi = grid.node(idx);
    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let raw = [c(), c(), c()];
    let u = leray_at(xi, raw);
    let p0 = c();
    let mut v = GridField::zeros(*grid, 3);
    let mut p = GridField::zeros(*grid, 1);
    for a in 0..3 {
        v.values[a * grid.len() + idx] = u[a];
    }
    p.values[idx] = p0;
    let vf: SpectralField = v.clone().into();
    let pf: SpectralField = p.clone().into();
    let g = apply_resolvent_operator(&vf, &pf, params, grid)?.field;
    Ok((v, p, g))
}

/// Random parameters with `dist(s, ωℤ) >= 0.1·ω`.
pub fn random_params(rng: &mut ChaCha8Rng, q: f64) -> Result<Params> {
    let lambda = rng.gen_range(0.1..2.0);
    let omega = rng.gen_range(0.5..2.0);
    let k = rng.gen_range(-3i64..=3) as f64;
    let frac = rng.gen_range(0.1..0.9);
    Params::new(lambda, omega, omega * (k + frac), std::f64::consts::TAU / omega, q)
}

pub fn fit_c0(seed: u64, instances: usize, q: f64, grid: &SpectralGrid, bx: &PhysicalBox) -> Result<C0Fit> {
    if instances == 0 {
        return Err(Error::invalid("instances", "must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(instances);
    for _ in 0..instances {
        let params = random_params(&mut rng, q)?;
        let (v, p, g) = manufactured_single_node(&mut rng, grid, &params)?;
        cases.push((params, v, p, g));
    }
    let out: Vec<Result<(f64, f64)>> = cases
        .into_par_iter()
        .map(|(params, v, p, g)| {
            let rep = resolvent_estimate_report(&v.into(), &p.into(), &g.into(), &params, grid, bx, 1.0)?;
            Ok((rep.ratio, rep.predicted_constant))
        })
        .collect();
    let instances: Vec<(f64, f64)> = out.into_iter().collect::<Result<_>>()?;
    let c0 = instances.iter().map(|(r, p)| r / p).fold(0.0, f64::max);
    Ok(C0Fit { c0, seed, q, instances })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: f64,
    pub dist: f64,
    pub observed_ratio: f64,
    pub predicted_ceiling: f64,
    pub terms: NormReport,
    pub rhs_norm: f64,
}

/// Solve for each `s` and compare the observed ratio with
/// `C₀(1+λ²/dist(s,ωℤ))³`.
#[allow(clippy::too_many_arguments)]
pub fn constant_sweep(
    g: &SpectralField,
    base: &Params,
    s_list: &[f64],
    grid: &SpectralGrid,
    n_time_nodes: usize,
    bx: Option<&PhysicalBox>,
    c0: f64,
) -> Result<Vec<SweepRow>> {
    if let Some(s) = s_list.iter().find(|&&s| dist_to_lattice(s, base.omega) == 0.0) {
        return Err(Error::Precondition(format!(
            "s = {s} lies on ωℤ; the sweep needs dist(s, ωℤ) > 0"
        )));
    }
    let rows: Vec<Result<SweepRow>> = s_list
        .par_iter()
        .map(|&s| {
            let params = base.with_s(s);
            let rep = solve_resolvent_rotating(g, &params, n_time_nodes, grid)?;
            let est = if params.q == 2.0 {
                let terms = estimate_terms(&rep.velocity, &rep.pressure, &params, grid, None, TermSet::L2, true)?;
                let rhs = lq_norm(g, 2.0, grid, None)?.value;
                EstimateReport::new(terms, rhs, c0, predicted_theta(&params), None)
            } else {
                let bx = bx.ok_or_else(|| Error::invalid("physical_box", "required for q ≠ 2"))?;
                resolvent_estimate_report(&rep.velocity, &rep.pressure, g, &params, grid, bx, c0)?
            };
            Ok(SweepRow {
                s,
                dist: dist_to_lattice(s, base.omega),
                observed_ratio: est.ratio,
                predicted_ceiling: est.predicted_constant,
                terms: est.terms,
                rhs_norm: est.rhs_norm,
            })
        })
        .collect();
    rows.into_iter().collect()
}

/// Sweep along the counterexample family: `s = sₙ`, `dist = σₙ`.
pub fn counterexample_sweep(items: &[CounterexampleItem], c0: f64) -> Vec<SweepRow> {
    items
        .iter()
        .map(|it| {
            let rep = counterexample_l2_report(it, c0);
            SweepRow {
                s: it.s_n,
                dist: dist_to_lattice(it.s_n, it.omega),
                observed_ratio: rep.ratio,
                predicted_ceiling: rep.predicted_constant,
                terms: rep.terms,
                rhs_norm: rep.rhs_norm,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRow {
    pub lambda: f64,
    /// `λ^{1/4}‖∇v‖_{s₁}`.
    pub grad_lhs: f64,
    /// `λ^{1/2}‖v‖_{s₂}`.
    pub fct_lhs: f64,
    /// `‖Δv + λ∂₁v‖_q`.
    pub rhs: f64,
    pub ratio_grad: f64,
    pub ratio_fct: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    pub q: f64,
    pub s1: f64,
    pub s2: f64,
    pub rows: Vec<EmbeddingRow>,
    /// Fitted constants: the largest ratio over the sweep.
    pub c_grad: f64,
    pub c_fct: f64,
    pub physical_box: PhysicalBox,
}

impl EmbeddingTable {
    /// Largest over smallest ratio across the sweep, for each inequality.
    pub fn spread(&self) -> (f64, f64) {
        let spread = |f: fn(&EmbeddingRow) -> f64| {
            let vals: Vec<f64> = self.rows.iter().filter(|r| !r.degenerate).map(f).collect();
            let hi = vals.iter().copied().fold(0.0, f64::max);
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            if vals.is_empty() {
                1.0
            } else {
                hi / lo
            }
        };
        (spread(|r| r.ratio_grad), spread(|r| r.ratio_fct))
    }
}

/// Both anisotropic embeddings in three dimensions, for each λ.
pub fn embedding_probe(
    v: &SpectralField,
    lambdas: &[f64],
    q: f64,
    grid: &SpectralGrid,
    bx: &PhysicalBox,
) -> Result<EmbeddingTable> {
    v.require_components(3)?;
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::ExponentOutOfRange { q, range: "(1, 2)" });
    }
    let s1 = 4.0 * q / (4.0 - q);
    let s2 = 4.0 * q / (4.0 - 2.0 * q);
    let vg = v.sample(grid)?;
    let grad = lq_norm_multi(&partials(&vg), s1, Some(bx))?.value;
    let fct = lq_norm_multi(std::slice::from_ref(&vg), s2, Some(bx))?.value;
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        if !(lam.is_finite() && lam > 0.0) {
            return Err(Error::invalid("lambda", "must be finite and > 0"));
        }
        let op = multiply_symbol(&vg, move |xi| {
            C64::new(-(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]), lam * xi[0])
        });
        let rhs = lq_norm_multi(&[op], q, Some(bx))?.value;
        let grad_lhs = lam.powf(0.25) * grad;
        let fct_lhs = lam.sqrt() * fct;
        let degenerate = rhs == 0.0;
        let r = |lhs: f64| if degenerate { 0.0 } else { lhs / rhs };
        rows.push(EmbeddingRow {
            lambda: lam,
            grad_lhs,
            fct_lhs,
            rhs,
            ratio_grad: r(grad_lhs),
            ratio_fct: r(fct_lhs),
            degenerate,
        });
    }
    let c_grad = rows.iter().map(|r| r.ratio_grad).fold(0.0, f64::max);
    let c_fct = rows.iter().map(|r| r.ratio_fct).fold(0.0, f64::max);
    Ok(EmbeddingTable {
        q,
        s1,
        s2,
        rows,
        c_grad,
        c_fct,
        physical_box: *bx,
    })
}
