//! The resonant counterexample family: right-hand sides with spectrum on
//! thin slabs whose solutions violate any uniform resolvent bound at rate
//! √n when α/ω is irrational.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad::{gk15, integrate, integrate_2d, QuadOptions};
use crate::numerics::{atan_over, pairwise_sum};
use crate::resonance::{odd_combination_growing, Lattice, RatioClass};
use crate::spectral::ops::rotation_matrix_angle;
use crate::spectral::{Profile, SlabFamily, SpectralField, C64};

/// Where σₙ = αkₙ + ωℓₙ is searched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaWindow {
    /// `[1/n, 1/n + 1/n²]`: σₙ close to the slab's own scale.
    #[default]
    Resonant,
    /// `[1/n, 2/n]`.
    Literal,
}

impl SigmaWindow {
    pub fn bounds(self, n: u64) -> (f64, f64) {
        let nf = n as f64;
        match self {
            SigmaWindow::Resonant => (1.0 / nf, 1.0 / nf + 1.0 / (nf * nf)),
            SigmaWindow::Literal => (1.0 / nf, 2.0 / nf),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleItem {
    pub n: u64,
    pub alpha: f64,
    pub omega: f64,
    pub lambda: f64,
    pub k_n: i64,
    pub ell_n: i64,
    pub sigma_n: f64,
    pub s_n: f64,
    pub window: SigmaWindow,
}

/// `(1/(2λn), 1/(λn)) × {|ξ'| < 1/n, ξ₃ > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRegion {
    pub xi1_lo: f64,
    pub xi1_hi: f64,
    pub radial_hi: f64,
    pub volume: f64,
}

impl CounterexampleItem {
    pub fn family(&self) -> SlabFamily {
        SlabFamily {
            n: self.n,
            lambda: self.lambda,
            sigma: self.sigma_n,
            ell: self.ell_n,
        }
    }

    pub fn region(&self) -> IndicatorRegion {
        let f = self.family();
        IndicatorRegion {
            xi1_lo: f.xi1_lo(),
            xi1_hi: f.xi1_hi(),
            radial_hi: f.radial_hi(),
            volume: PI / (4.0 * self.lambda * (self.n as f64).powi(3)),
        }
    }
}

/// Resonant item n: odd ℓₙ and k ≠ 0 with σₙ in the window, `sₙ = αkₙ`.
pub fn build_item(n: u64, lattice: &Lattice, lambda: f64, window: SigmaWindow) -> Result<CounterexampleItem> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("lambda", "must be finite and > 0"));
    }
    if let RatioClass::Rational { c, d, .. } = lattice.classify() {
        return Err(Error::Precondition(format!(
            "the resonant sequence needs an irrational α/ω; got {c}/{d}"
        )));
    }
    let (lo, hi) = window.bounds(n);
    let c = odd_combination_growing(lattice, lo, hi, 64)?;
    let alpha = lattice.alpha();
    let s_n = alpha * c.k as f64;
    if s_n.abs() < 1.0 / n as f64 {
        return Err(Error::SmallS { n, s_abs: s_n.abs() });
    }
    Ok(CounterexampleItem {
        n,
        alpha,
        omega: lattice.omega,
        lambda,
        k_n: c.k,
        ell_n: c.ell,
        sigma_n: c.value,
        s_n,
        window,
    })
}

/// `Ĝₙ`: the slab-indicator swirl before the time mean.
pub fn big_g_profile(item: &CounterexampleItem) -> SpectralField {
    Profile::SwirlSlab(item.family()).into()
}

/// `V̂ₙ = Ĝₙ/(iσₙ + |ξ|² − iλξ₁)`.
pub fn big_v_profile(item: &CounterexampleItem) -> SpectralField {
    Profile::SwirlSlabSolution(item.family()).into()
}

/// `ĝₙ`, the time mean of `Q(t)ᵀĜₙ(Q(t)ξ)e^{iωℓₙt}`.
pub fn gn_profile(item: &CounterexampleItem) -> SpectralField {
    Profile::SwirlSlabMean(item.family()).into()
}

pub fn vn_profile(item: &CounterexampleItem) -> SpectralField {
    Profile::SwirlSlabMeanSolution(item.family()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormNorms {
    /// `‖Gₙ‖₂² = n³|Iₙ| = π/(4λ)`.
    pub norm_big_g_sq: f64,
    /// `‖gₙ‖₂² = 1/(2λπℓₙ²)`.
    pub norm_g_sq: f64,
}

pub fn closed_form_norms(item: &CounterexampleItem) -> ClosedFormNorms {
    let ell = item.ell_n as f64;
    ClosedFormNorms {
        norm_big_g_sq: PI / (4.0 * item.lambda),
        norm_g_sq: 1.0 / (2.0 * item.lambda * PI * ell * ell),
    }
}

/// Iterated 3-D quadrature of `|f|²` over `slab × {|ξ'| < 1/n}` (upper
/// half only when `half`), evaluating the profiles pointwise.
fn slab_quadrature(item: &CounterexampleItem, f: &SpectralField, half: bool, rel_tol: f64) -> f64 {
    let reg = item.region();
    let opts = QuadOptions::rel(rel_tol);
    let inner = QuadOptions::rel(rel_tol * 0.1);
    let rho = reg.radial_hi;
    integrate(
        |x1| {
            integrate(
                |x2| {
                    let h = (rho * rho - x2 * x2).max(0.0).sqrt();
                    let lo = if half { 0.0 } else { -h };
                    integrate(
                        |x3| f.eval([x1, x2, x3]).iter().map(|c| c.norm_sqr()).sum(),
                        lo,
                        h,
                        inner,
                    )
                    .value
                },
                -rho,
                rho,
                inner,
            )
            .value
        },
        reg.xi1_lo,
        reg.xi1_hi,
        opts,
    )
    .value
}

/// Both norms by direct quadrature of the profiles.
pub fn quadrature_norms(item: &CounterexampleItem, rel_tol: f64) -> ClosedFormNorms {
    ClosedFormNorms {
        norm_big_g_sq: slab_quadrature(item, &big_g_profile(item), true, rel_tol),
        norm_g_sq: slab_quadrature(item, &gn_profile(item), false, rel_tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMeanCheck {
    /// Uniform trapezoid over one rotation.
    pub trapezoid: f64,
    /// Gauss-Kronrod on the arc `{t : Q(t)ξ ∈ Iₙ}` with exact endpoints.
    pub arc_split: f64,
    pub predicted: f64,
}

/// `|(ω/2π)∮ 1_{Iₙ}(Q(t)ξ) e^{iωℓₙt} dt|²` two ways, against
/// `1/(π²ℓₙ²)` on the slab × disc and 0 elsewhere.
pub fn time_mean_identity_check(item: &CounterexampleItem, xi: [f64; 3], n_time_nodes: usize) -> Result<TimeMeanCheck> {
    if n_time_nodes < 1024 {
        return Err(Error::invalid("n_time_nodes", "needs at least 1024 nodes"));
    }
    let f = item.family();
    let ell = item.ell_n as f64;
    let r = xi[1].hypot(xi[2]);
    let inside = f.in_slab(xi[0]) && r > 0.0 && r < f.radial_hi();
    let predicted = if inside { 1.0 / (PI * PI * ell * ell) } else { 0.0 };

    let mut terms_re = Vec::with_capacity(n_time_nodes);
    let mut terms_im = Vec::with_capacity(n_time_nodes);
    for c in 0..n_time_nodes {
        let theta = 2.0 * PI * c as f64 / n_time_nodes as f64;
        if f.in_region(rotation_matrix_angle(theta).apply(xi)) {
            let w = C64::from_polar(1.0, ell * theta);
            terms_re.push(w.re);
            terms_im.push(w.im);
        }
    }
    let trap = C64::new(pairwise_sum(&terms_re), pairwise_sum(&terms_im)) / n_time_nodes as f64;

    let arc = if inside {
        // rotated angle φ + θ must lie in (0, π)
        let phi = xi[2].atan2(xi[1]);
        let (a, b) = (-phi, PI - phi);
        let panels = (2 * item.ell_n.unsigned_abs() as usize).max(8);
        let h = (b - a) / panels as f64;
        let (mut re, mut im) = (Vec::with_capacity(panels), Vec::with_capacity(panels));
        for j in 0..panels {
            let (lo, hi) = (a + j as f64 * h, a + (j + 1) as f64 * h);
            re.push(gk15(&|t: f64| (ell * t).cos(), lo, hi).0);
            im.push(gk15(&|t: f64| (ell * t).sin(), lo, hi).0);
        }
        C64::new(pairwise_sum(&re), pairwise_sum(&im)) / (2.0 * PI)
    } else {
        C64::default()
    };
    Ok(TimeMeanCheck {
        trapezoid: trap.norm_sqr(),
        arc_split: arc.norm_sqr(),
        predicted,
    })
}

/// `(2 + 2λ⁻⁴)^{−1/4}`.
pub fn certified_constant(lambda: f64) -> f64 {
    (2.0 + 2.0 / lambda.powi(4)).powf(-0.25)
}

/// Smallest n for which the lower bound is proven: `4√(2 + 2/λ⁴)`.
pub fn certification_threshold(lambda: f64) -> f64 {
    4.0 * (2.0 + 2.0 / lambda.powi(4)).sqrt()
}

/// `‖vₙ‖₂²` from the reduced integral: the radial integral is done in
/// closed form, leaving `π|ĝ|² ∫ U/(A² + B(B+U)) · atan(t)/t dξ₁` with
/// `A = σ − λξ₁`, `B = ξ₁²`, `U = 1/n²`, `t = |A|U/(A² + B(B+U))`.
pub fn vn_l2_sq(f: &SlabFamily, opts: QuadOptions) -> (f64, f64) {
    let nf = f.n as f64;
    let ell = f.ell as f64;
    let u = 1.0 / (nf * nf);
    let g2 = nf.powi(3) / (PI * PI * ell * ell);
    let integrand = |x1: f64| {
        let a = f.sigma - f.lambda * x1;
        let b = x1 * x1;
        let den = a * a + b * (b + u);
        u / den * atan_over(a.abs() * u / den)
    };
    let r = integrate(integrand, f.xi1_lo(), f.xi1_hi(), opts);
    (g2 * PI * r.value, g2 * PI * r.error)
}

/// `∫ w(ξ₁, |ξ'|²)|v̂ₙ|² dξ` over the slab × disc, radial variable `u = |ξ'|²`.
pub fn vn_weighted_l2_sq<W: Fn(f64, f64) -> f64>(f: &SlabFamily, w: W, opts: QuadOptions) -> f64 {
    let nf = f.n as f64;
    let ell = f.ell as f64;
    let g2 = nf.powi(3) / (PI * PI * ell * ell);
    let u_hi = 1.0 / (nf * nf);
    let r = integrate_2d(
        |x1, u| {
            let a = f.sigma - f.lambda * x1;
            let b = x1 * x1 + u;
            w(x1, u) / (b * b + a * a)
        },
        f.xi1_lo(),
        f.xi1_hi(),
        |_| 0.0,
        |_| u_hi,
        opts,
    );
    g2 * PI * r.value
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub n: u64,
    /// `‖iαkₙvₙ + ω(e₁∧x·∇vₙ − e₁∧vₙ)‖₂ = σₙ‖vₙ‖₂`.
    pub lhs_norm: f64,
    /// `|sₙ|·‖vₙ‖₂`, the factor as usually written.
    pub lhs_with_s_factor: f64,
    pub rhs_norm: f64,
    pub ratio: f64,
    pub constant: f64,
    pub threshold: f64,
    pub threshold_met: bool,
    /// `C√n` when n clears the threshold.
    pub certified_lower: Option<f64>,
    pub quadrature_error: f64,
}

pub fn blowup_ratio(item: &CounterexampleItem, opts: QuadOptions) -> BlowupReport {
    let (v2, err) = vn_l2_sq(&item.family(), opts);
    let v = v2.sqrt();
    let rhs = closed_form_norms(item).norm_g_sq.sqrt();
    let lhs = item.sigma_n * v;
    let constant = certified_constant(item.lambda);
    let threshold = certification_threshold(item.lambda);
    let met = item.n as f64 >= threshold;
    BlowupReport {
        n: item.n,
        lhs_norm: lhs,
        lhs_with_s_factor: item.s_n.abs() * v,
        rhs_norm: rhs,
        ratio: lhs / rhs,
        constant,
        threshold,
        threshold_met: met,
        certified_lower: met.then(|| constant * (item.n as f64).sqrt()),
        quadrature_error: item.sigma_n * err / (2.0 * v.max(f64::MIN_POSITIVE)) / rhs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceVariant {
    /// `‖gₙ‖₂ = n^{−3/2}`: terms `C/n`.
    ANorm,
    /// `‖gₙ‖₂ = n^{−1}`, squared terms: `C²/n`.
    L2Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub n: u64,
    pub k_n: i64,
    pub ell_n: i64,
    pub ratio: f64,
    /// The term certified by the bound `ratio >= C√n`, 0 if the computed
    /// ratio falls short of it.
    pub certified_term: f64,
    /// The same term built from the computed ratio.
    pub direct_term: f64,
    pub certified_partial: f64,
    pub direct_partial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTable {
    pub variant: DivergenceVariant,
    pub constant: f64,
    pub rows: Vec<DivergenceRow>,
    /// Indices skipped because `|sₙ| < 1/n`.
    pub skipped: Vec<u64>,
}

impl DivergenceTable {
    pub fn certified_sum(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.certified_partial)
    }

    pub fn direct_sum(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.direct_partial)
    }

    /// Certified partial sum over `n <= n_cut`.
    pub fn certified_sum_upto(&self, n_cut: u64) -> f64 {
        self.rows
            .iter()
            .take_while(|r| r.n <= n_cut)
            .last()
            .map_or(0.0, |r| r.certified_partial)
    }
}

/// Partial sums of the renormalized blow-up terms for n = 1..=n_max.
pub fn divergence_probe(
    lattice: &Lattice,
    lambda: f64,
    n_max: u64,
    variant: DivergenceVariant,
    window: SigmaWindow,
) -> Result<DivergenceTable> {
    if n_max == 0 {
        return Err(Error::invalid("n_max", "must be >= 1"));
    }
    let built: Vec<Result<CounterexampleItem>> = (1..=n_max)
        .into_par_iter()
        .map(|n| build_item(n, lattice, lambda, window))
        .collect();
    let constant = certified_constant(lambda);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let (mut cert, mut direct) = (0.0, 0.0);
    for item in built {
        let item = match item {
            Ok(it) => it,
            Err(Error::SmallS { n, .. }) => {
                skipped.push(n);
                continue;
            }
            Err(e) => return Err(e),
        };
        let rep = blowup_ratio(&item, QuadOptions::rel(1e-10));
        let nf = item.n as f64;
        let holds = rep.ratio >= constant * nf.sqrt();
        let (c_term, d_term) = match variant {
            DivergenceVariant::ANorm => (constant / nf, rep.ratio * nf.powf(-1.5)),
            DivergenceVariant::L2Norm => (constant * constant / nf, (rep.ratio / nf).powi(2)),
        };
        let c_term = if holds { c_term } else { 0.0 };
        cert += c_term;
        direct += d_term;
        rows.push(DivergenceRow {
            n: item.n,
            k_n: item.k_n,
            ell_n: item.ell_n,
            ratio: rep.ratio,
            certified_term: c_term,
            direct_term: d_term,
            certified_partial: cert,
            direct_partial: direct,
        });
    }
    Ok(DivergenceTable {
        variant,
        constant,
        rows,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::Ratio;

    fn sqrt2() -> Lattice {
        Lattice::new(1.0, Ratio::Sqrt2).unwrap()
    }

    #[test]
    fn literal_window_items() {
        let it = build_item(10, &sqrt2(), 1.0, SigmaWindow::Literal).unwrap();
        assert_eq!((it.k_n, it.ell_n), (-2, 3));
        assert!((it.sigma_n - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((it.s_n + 2.0 * 2f64.sqrt()).abs() < 1e-15);
        let it = build_item(5, &sqrt2(), 1.0, SigmaWindow::Literal).unwrap();
        assert_eq!((it.k_n, it.ell_n), (8, -11));
    }

    #[test]
    fn resonant_window_items() {
        for (n, k, l) in [(8, -19, 27), (16, -94, 133), (32, 1142, -1615), (1, -1, 3), (2, 4, -5)] {
            let it = build_item(n, &sqrt2(), 1.0, SigmaWindow::Resonant).unwrap();
            assert_eq!((it.k_n, it.ell_n), (k, l), "n = {n}");
            let (lo, hi) = SigmaWindow::Resonant.bounds(n);
            assert!(it.sigma_n >= lo && it.sigma_n <= hi);
        }
    }

    #[test]
    fn rational_ratio_rejected() {
        let l = Lattice::new(1.0, Ratio::rational(3, 2).unwrap()).unwrap();
        assert!(matches!(build_item(4, &l, 1.0, SigmaWindow::Literal), Err(Error::Precondition(_))));
    }

    #[test]
    fn small_s_rejected() {
        // α = 0.05·√2 makes |αk| < 1/n for the first hits
        let l = Lattice::new(0.05, Ratio::Sqrt2).unwrap();
        let r = build_item(1, &l, 1.0, SigmaWindow::Literal);
        assert!(matches!(r, Err(Error::SmallS { n: 1, .. })), "{r:?}");
    }

    #[test]
    fn closed_form_examples() {
        let it = build_item(10, &sqrt2(), 1.0, SigmaWindow::Literal).unwrap();
        let c = closed_form_norms(&it);
        assert!((c.norm_big_g_sq - PI / 4.0).abs() < 1e-15);
        assert!((c.norm_g_sq - 1.0 / (18.0 * PI)).abs() < 1e-17);
        assert!((it.region().volume - PI / 4000.0).abs() < 1e-18);
        let it2 = CounterexampleItem { lambda: 2.0, ..it };
        assert!((closed_form_norms(&it2).norm_big_g_sq - PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn blowup_oracle_values() {
        for (n, want) in [(8, 3.7372), (16, 5.3146), (1, 1.1792), (2, 1.6709), (3, 2.0376)] {
            let it = build_item(n, &sqrt2(), 1.0, SigmaWindow::Resonant).unwrap();
            let r = blowup_ratio(&it, QuadOptions::rel(1e-10));
            assert!((r.ratio - want).abs() < 6e-5, "n = {n}: {}", r.ratio);
        }
        let it = build_item(4, &sqrt2(), 1.0, SigmaWindow::Resonant).unwrap();
        let r = blowup_ratio(&it, QuadOptions::default());
        assert!(!r.threshold_met && r.certified_lower.is_none());
    }

    #[test]
    fn vn_norm_matches_brute_force() {
        let it = build_item(3, &sqrt2(), 1.0, SigmaWindow::Resonant).unwrap();
        let (v2, _) = vn_l2_sq(&it.family(), QuadOptions::rel(1e-12));
        let brute = slab_quadrature(&it, &vn_profile(&it), false, 1e-9);
        assert!((v2 - brute).abs() < 1e-7 * v2, "{v2} {brute}");
        let two_d = vn_weighted_l2_sq(&it.family(), |_, _| 1.0, QuadOptions::rel(1e-11));
        assert!((v2 - two_d).abs() < 1e-9 * v2, "{v2} {two_d}");
    }

    #[test]
    fn time_mean_support_cases() {
        let it = build_item(8, &sqrt2(), 1.0, SigmaWindow::Resonant).unwrap();
        let nf = 8.0;
        let out = time_mean_identity_check(&it, [2.0 / nf, 0.05, 0.0], 4096).unwrap();
        assert_eq!((out.trapezoid, out.arc_split, out.predicted), (0.0, 0.0, 0.0));
        let axis = time_mean_identity_check(&it, [0.75 / nf, 0.0, 0.0], 4096).unwrap();
        assert_eq!((axis.trapezoid, axis.predicted), (0.0, 0.0));
        let inside = time_mean_identity_check(&it, [0.75 / nf, 0.06, 0.0], 4096).unwrap();
        assert!((inside.arc_split - inside.predicted).abs() < 1e-12);
        assert!((inside.trapezoid - inside.predicted).abs() < 1e-4);
        assert!(time_mean_identity_check(&it, [0.1; 3], 100).is_err());
    }

    #[test]
    fn short_divergence_probe() {
        let t = divergence_probe(&sqrt2(), 1.0, 1, DivergenceVariant::ANorm, SigmaWindow::Resonant).unwrap();
        assert!((t.certified_sum() - t.constant).abs() < 1e-15);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]
        #[test]
        fn items_sit_in_their_window(n in 1u64..400, lambda in 0.25f64..4.0) {
            for w in [SigmaWindow::Resonant, SigmaWindow::Literal] {
                let it = build_item(n, &sqrt2(), lambda, w).unwrap();
                let (lo, hi) = w.bounds(n);
                proptest::prop_assert!(it.ell_n % 2 != 0 && it.k_n != 0);
                let sigma = it.k_n as f64 * std::f64::consts::SQRT_2 + it.ell_n as f64;
                proptest::prop_assert!(sigma >= lo - 1e-12 && sigma <= hi + 1e-12);
            }
        }
    }
}
