//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so every line is printed whatever the outcome; the process
//! exits non-zero if any criterion fails.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotoseen::counterexample::{
    blowup_ratio, build_item, certified_constant, closed_form_norms, divergence_probe, gn_profile,
    quadrature_norms, time_mean_identity_check, vn_profile, CounterexampleItem, DivergenceVariant, SigmaWindow,
};
use rotoseen::estimates::{embedding_probe, sobolev_exponents};
use rotoseen::numerics::quad::QuadOptions;
use rotoseen::resonance::{
    approx_below, min_positive_element, odd_combination_in, Lattice, Ratio,
};
use rotoseen::solver::{
    assemble_tp, denominator, marcinkiewicz_probe, required_time_nodes, solve_aux_mode,
    solve_resolvent_rotating, split_modes, ProbeBox, TPSeries, TpOptions,
};
use rotoseen::resonance::EstimateConfig;
use rotoseen::spectral::ops::leray_at;
use rotoseen::spectral::{GridField, PhysicalBox, Profile, SpectralField, SpectralGrid, C64, V3};
use rotoseen::{Error, Params};

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sqrt2_lattice() -> Lattice {
    Lattice::new(1.0, Ratio::Sqrt2).unwrap()
}

fn item(n: u64, lambda: f64) -> CounterexampleItem {
    build_item(n, &sqrt2_lattice(), lambda, SigmaWindow::Resonant).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn max_diff(a: V3, b: V3) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn norm3(a: V3) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn harmonic(n: u64) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

fn closed_form_norms_check() -> Outcome {
    let mut worst_big = 0.0f64;
    let mut worst_small = 0.0f64;
    let mut exact = true;
    for lambda in [0.5, 1.0, 2.0] {
        for n in [8, 16, 32] {
            let it = item(n, lambda);
            let cf = closed_form_norms(&it);
            // n³|Iₙ| with |Iₙ| = π/(4λn³)
            exact &= cf.norm_big_g_sq == (n as f64).powi(3) * it.region().volume
                || rel(cf.norm_big_g_sq, (n as f64).powi(3) * it.region().volume) < 1e-15;
            exact &= cf.norm_big_g_sq == PI / (4.0 * lambda);
            let ell = it.ell_n as f64;
            exact &= cf.norm_g_sq == 1.0 / (2.0 * lambda * PI * ell * ell);
            let q = quadrature_norms(&it, 1e-8);
            worst_big = worst_big.max(rel(q.norm_big_g_sq, cf.norm_big_g_sq));
            worst_small = worst_small.max(rel(q.norm_g_sq, cf.norm_g_sq));
        }
    }
    outcome(
        exact && worst_big < 1e-6 && worst_small < 1e-6,
        format!("formula exact: {exact}; quadrature rel err ‖G‖² {worst_big:.2e}, ‖g‖² {worst_small:.2e} (< 1e-6)"),
    )
}

fn time_mean_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_trap, mut worst_arc) = (0.0f64, 0.0f64);
    let mut inside_nonzero = 0;
    for n in [8, 16, 32] {
        let it = item(n, 1.0);
        let reg = it.region();
        for j in 0..20 {
            let phi = rng.gen_range(0.0..TAU);
            let xi = if j < 10 {
                let x1 = reg.xi1_lo + rng.gen_range(0.05..0.95) * (reg.xi1_hi - reg.xi1_lo);
                let r = rng.gen_range(0.05..0.95) * reg.radial_hi;
                [x1, r * phi.cos(), r * phi.sin()]
            } else if j < 15 {
                // beyond the slab in ξ₁
                let x1 = reg.xi1_hi * rng.gen_range(1.05..2.0);
                let r = rng.gen_range(0.05..0.95) * reg.radial_hi;
                [x1, r * phi.cos(), r * phi.sin()]
            } else {
                // inside the slab, outside the disc
                let x1 = reg.xi1_lo + rng.gen_range(0.05..0.95) * (reg.xi1_hi - reg.xi1_lo);
                let r = reg.radial_hi * rng.gen_range(1.05..2.0);
                [x1, r * phi.cos(), r * phi.sin()]
            };
            let c = time_mean_identity_check(&it, xi, 4096).unwrap();
            if j < 10 && c.predicted > 0.0 {
                inside_nonzero += 1;
            }
            worst_trap = worst_trap.max((c.trapezoid - c.predicted).abs());
            worst_arc = worst_arc.max((c.arc_split - c.predicted).abs());
        }
    }
    outcome(
        worst_trap < 1e-4 && worst_arc < 1e-8 && inside_nonzero == 30,
        format!(
            "60 points, 30 in the support; max |err| trapezoid {worst_trap:.2e} (< 1e-4), arc split {worst_arc:.2e} (< 1e-8)"
        ),
    )
}

fn blowup_check() -> Outcome {
    let c = certified_constant(1.0);
    let mut ratios = Vec::new();
    let mut all = true;
    for n in [8, 16, 32, 64] {
        let r = blowup_ratio(&item(n, 1.0), QuadOptions::rel(1e-10));
        all &= r.ratio >= c * (n as f64).sqrt();
        ratios.push(r.ratio);
    }
    let mono = ratios.windows(2).all(|w| w[1] >= w[0]);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    outcome(
        all && mono && (c - 1.0 / SQRT_2).abs() < 1e-15,
        format!("ratios n=8,16,32,64: [{}] vs 2^(-1/2)√n; nondecreasing: {mono}", shown.join(", ")),
    )
}

fn divergence_check() -> Outcome {
    let lat = sqrt2_lattice();
    let h = harmonic(1000);
    let a = divergence_probe(&lat, 1.0, 1000, DivergenceVariant::ANorm, SigmaWindow::Resonant).unwrap();
    let l2 = divergence_probe(&lat, 1.0, 1000, DivergenceVariant::L2Norm, SigmaWindow::Resonant).unwrap();
    let a_sum = a.certified_sum();
    let l2_sum = l2.certified_sum();
    let a_ok = a_sum >= 1000f64.ln() / SQRT_2 && rel(a_sum, h / SQRT_2) <= 0.02;
    let l2_ok = l2_sum >= 0.5 * h * 0.98 && rel(l2_sum, 0.5 * h) <= 0.02;
    outcome(
        a_ok && l2_ok,
        format!(
            "A-norm certified sum {a_sum:.4} (>= {:.4}, target {:.4}); L² squared sum {l2_sum:.4} (target {:.4}); skipped {}",
            1000f64.ln() / SQRT_2,
            h / SQRT_2,
            0.5 * h,
            a.skipped.len()
        ),
    )
}

fn round_trip_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = SpectralGrid::new(3.0, 9).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let omega = rng.gen_range(0.5..2.0);
        let lambda = rng.gen_range(0.1..2.0);
        let s = omega * (rng.gen_range(-3i64..=3) as f64 + rng.gen_range(0.1..0.9));
        let params = Params::resolvent(lambda, omega, s).unwrap();
        let k = rng.gen_range(-4i64..=4);
        let n = grid.points_per_axis;
        let idx = loop {
            let i = grid.flat(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if i != grid.origin_index() {
                break i;
            }
        };
        let xi = grid.node(idx);
        let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let u = leray_at(xi, [c(), c(), c()]);
        let p = c();
        // forward: D(k, ξ)û + iξp̂
        let d = denominator(&params, k as f64, xi);
        let mut g = GridField::zeros(grid, 3);
        for a in 0..3 {
            g.values[a * grid.len() + idx] = d * u[a] + C64::new(0.0, xi[a]) * p;
        }
        let sol = solve_aux_mode(&g.into(), k, &params, &grid).unwrap();
        let err_u = max_diff(sol.velocity.at(idx), u) / norm3(u);
        let err_p = (sol.pressure.at(idx)[0] - p).norm() / p.norm();
        let rest: f64 = sol
            .velocity
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| i % grid.len() != idx)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        worst = worst.max(err_u).max(err_p).max(rest);
    }

    let profiles = [
        Profile::swirl_gaussian(1.0),
        Profile::axial_gaussian(1.0),
        Profile::gradient_gaussian(1.0),
        Profile::swirl_gaussian(0.7),
        Profile::axial_gaussian(1.4),
    ];
    let grid = SpectralGrid::new(2.5, 9).unwrap();
    let mut worst_res = 0.0f64;
    for (i, prof) in profiles.iter().cycle().take(10).enumerate() {
        let params = Params::resolvent(0.3 + 0.15 * i as f64, 0.8 + 0.1 * i as f64, 0.25 + 0.05 * i as f64).unwrap();
        let g: SpectralField = prof.clone().into();
        let nt = required_time_nodes(g.angular_bandwidth().unwrap());
        let rep = solve_resolvent_rotating(&g, &params, nt, &grid).unwrap();
        worst_res = worst_res.max(rep.residual_interior);
    }
    outcome(
        worst < 1e-10 && worst_res <= 1e-6,
        format!("100 single-node round trips: max rel err {worst:.2e} (< 1e-10); 10 rotating solves: max residual {worst_res:.2e} (<= 1e-6)"),
    )
}

fn loop_closure_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid = SpectralGrid::new(1.0, 3).unwrap();
    let mut worst = 0.0f64;
    for n in [8, 16] {
        let it = item(n, 1.0);
        let reg = it.region();
        let g = gn_profile(&it);
        let want = vn_profile(&it);
        let params = Params::resolvent(it.lambda, it.omega, it.s_n).unwrap();
        let nt = required_time_nodes(g.angular_bandwidth().unwrap());
        let rep = solve_resolvent_rotating(&g, &params, nt, &grid).unwrap();
        for j in 0..20 {
            let phi = rng.gen_range(0.0..TAU);
            let (x1, r) = if j < 14 {
                (
                    reg.xi1_lo + rng.gen_range(0.02..0.98) * (reg.xi1_hi - reg.xi1_lo),
                    rng.gen_range(0.02..0.98) * reg.radial_hi,
                )
            } else {
                (reg.xi1_hi * rng.gen_range(0.2..2.0), reg.radial_hi * rng.gen_range(0.1..2.0))
            };
            let xi = [x1, r * phi.cos(), r * phi.sin()];
            worst = worst.max(max_diff(rep.velocity.eval(xi), want.eval(xi)));
        }
    }
    outcome(worst < 1e-8, format!("n = 8, 16, 20 points each: max |v̂ − v̂ₙ| {worst:.2e} (< 1e-8)"))
}

fn resonance_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut exact = true;
    let mut pairs = 0;
    while pairs < 50 {
        let (c, d) = (rng.gen_range(1u64..=30), rng.gen_range(1u64..=30));
        if c.gcd(&d) != 1 {
            continue;
        }
        pairs += 1;
        let omega = 1.0;
        let lat = Lattice::new(omega, Ratio::rational(c, d).unwrap()).unwrap();
        let m = min_positive_element(&lat.classify(), omega).unwrap();
        // exact brute force in units of ω/d: kα + ℓω = (kc + ℓd)ω/d
        let b = 10 * (c + d) as i64;
        let mut best = i64::MAX;
        for k in -b..=b {
            for l in -b..=b {
                let v = k * c as i64 + l * d as i64;
                if v > 0 && v < best {
                    best = v;
                }
            }
        }
        exact &= m == best as f64 * omega / d as f64;
    }
    let ab = approx_below(&sqrt2_lattice(), 1e-6, 1_000_000);
    let ab_ok = matches!(ab, Ok(c) if c.value > 0.0 && c.value < 1e-6 && c.k.abs() <= 1_000_000);
    let mut odd_ok = true;
    for _ in 0..20 {
        let lo = rng.gen_range(0.05..3.0);
        let hi = lo + rng.gen_range(0.01..0.2);
        match odd_combination_in(&sqrt2_lattice(), lo, hi, 10_000) {
            Ok(c) => odd_ok &= c.ell % 2 != 0 && c.value >= lo && c.value <= hi,
            Err(_) => odd_ok = false,
        }
    }
    let ab_text = match ab {
        Ok(c) => format!("{:.3e} at k = {}", c.value, c.k),
        Err(e) => e.to_string(),
    };
    outcome(
        exact && ab_ok && odd_ok,
        format!("50 coprime pairs exact: {exact}; approx_below(√2, 1e-6): {ab_text}; 20 odd searches ok: {odd_ok}"),
    )
}

fn probe_check() -> Outcome {
    let mut sups = Vec::new();
    let mut ok = true;
    let mut parts = Vec::new();
    for s in [0.5, 0.05, 0.005] {
        let p = Params::resolvent(1.0, 1.0, s).unwrap();
        let r = marcinkiewicz_probe(&p, &ProbeBox::default()).unwrap();
        // the edge point is in the region; the sampled sup includes it
        let sup = r.sup_ratio.value.max(r.witness_ratio.value);
        let bound = 4.0 * (1.0 + 1.0 / s);
        ok &= sup <= bound;
        parts.push(format!("s̃={s}: sup {sup:.4} vs {bound:.1} (sampled {:.4})", r.sup_ratio.value));
        sups.push(sup);
    }
    let mono = sups.windows(2).all(|w| w[1] >= w[0]);
    outcome(ok && mono, format!("{}; monotone: {mono}", parts.join("; ")))
}

fn sobolev_check() -> Outcome {
    let r = |a, b| Rational64::new(a, b);
    let t1 = sobolev_exponents(3, r(6, 5)).unwrap();
    let t2 = sobolev_exponents(3, r(2, 1)).unwrap();
    let t3 = sobolev_exponents(2, r(3, 2)).unwrap();
    let table = t1.s1 == Some(r(12, 7))
        && t1.s2 == Some(r(3, 1))
        && t2.s1 == Some(r(4, 1))
        && t2.s2.is_none()
        && t3.s1 == Some(r(3, 1))
        && t3.s2.is_none();
    let grid = SpectralGrid::new(6.0, 25).unwrap();
    let bx = PhysicalBox::reciprocal(&grid);
    let v: SpectralField = Profile::swirl_gaussian(1.0).into();
    let t = embedding_probe(&v, &[0.1, 1.0, 10.0], 1.2, &grid, &bx).unwrap();
    let (sg, sf) = t.spread();
    let holds = t
        .rows
        .iter()
        .all(|row| row.grad_lhs <= t.c_grad * row.rhs && row.fct_lhs <= t.c_fct * row.rhs);
    outcome(
        table && sg < 10.0 && sf < 10.0 && holds,
        format!("exponent table exact: {table}; spread grad {sg:.3}, fct {sf:.3} (< 10); fitted constants hold: {holds}"),
    )
}

fn tp_check() -> Outcome {
    // (2π/T)/ω = 2: ω = 1, T = π
    let params = Params::new(0.5, 1.0, 0.0, PI, 2.0).unwrap();
    let grid = SpectralGrid::new(2.5, 9).unwrap();
    let g = Profile::swirl_gaussian(1.0);
    let f = [-2, -1, 0, 1, 2]
        .iter()
        .fold(TPSeries::new(PI), |s, &k| s.with_mode(k, g.clone()));
    let opts = TpOptions {
        n_time_nodes: required_time_nodes(1),
        ratio: Some(Ratio::rational(2, 1).unwrap()),
        config: EstimateConfig::default(),
        c0: 1.0,
        physical_box: None,
    };
    let out = assemble_tp(&f, &params, &grid, &opts).unwrap();
    let worst = out.modes.iter().map(|m| m.residual_interior).fold(0.0, f64::max);
    let (a1, a2) = split_modes(&out.u, 1.0, opts.ratio).unwrap();
    let disjoint = a1.modes.keys().all(|k| !a2.modes.contains_key(k));
    let covers = a1.modes.len() + a2.modes.len() == out.u.modes.len()
        && out.u.modes.keys().all(|k| a1.modes.contains_key(k) || a2.modes.contains_key(k));
    let same = out
        .u
        .modes
        .iter()
        .all(|(k, v)| a1.modes.get(k).or(a2.modes.get(k)) == Some(v));
    // every mode of ratio 2/1 has 2k ∈ ℤ, so u⁽²⁾ is empty
    let partition = disjoint && covers && same && a2.modes.is_empty();

    let p_irr = Params::new(0.5, 1.0, 0.0, TAU / SQRT_2, 2.0).unwrap();
    let f_irr = TPSeries::new(TAU / SQRT_2).with_mode(1, g);
    let irr = assemble_tp(&f_irr, &p_irr, &grid, &TpOptions { ratio: Some(Ratio::Sqrt2), ..opts });
    let refused = matches!(irr, Err(Error::IrrationalRatio));
    outcome(
        worst <= 1e-6 && partition && refused,
        format!("5 modes, max residual {worst:.2e} (<= 1e-6); split exact: {partition}; √2 refused with IrrationalRatio: {refused}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "closed-form norms", Duration::from_secs(5), closed_form_norms_check),
        (2, "time-mean identity", Duration::from_secs(10), time_mean_check),
        (3, "blow-up certification", Duration::from_secs(30), blowup_check),
        (4, "divergence probes", Duration::from_secs(60), divergence_check),
        (5, "solver round trip", Duration::from_secs(60), round_trip_check),
        (6, "loop closure", Duration::from_secs(30), loop_closure_check),
        (7, "resonance arithmetic", Duration::from_secs(10), resonance_check),
        (8, "multiplier bound probe", Duration::from_secs(30), probe_check),
        (9, "Sobolev exponents and embeddings", Duration::from_secs(60), sobolev_check),
        (10, "time-periodic assembly gate", Duration::from_secs(60), tp_check),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(check));
        let dt = start.elapsed();
        let (pass, detail) = match res {
            Ok(o) => (o.pass && dt < budget, o.detail),
            Err(p) => (
                false,
                format!(
                    "panicked: {}",
                    p.downcast_ref::<String>()
                        .cloned()
                        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default()
                ),
            ),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} [PRIMARY] {}: {name}: {detail} [{:.2} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
