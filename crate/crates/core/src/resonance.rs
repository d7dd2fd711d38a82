//! Arithmetic of the lattice `αℤ + ωℤ`: classification of α/ω, the minimum
//! positive element, density witnesses, odd-combination search and the
//! smallness conditions on λ.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Dd;
use crate::params::Params;

const SQRT2: Dd = Dd::new(std::f64::consts::SQRT_2, -9.667_293_313_452_913e-17);
const GOLDEN: Dd = Dd::new(1.618_033_988_749_895, -5.432_115_203_682_506e-17);

/// Default denominator cap when classifying a floating-point ratio.
pub const FLOAT_DENOMINATOR_CAP: i64 = 1_000_000;

/// The ratio α/ω, exact where possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Ratio {
    Rational { c: u64, d: u64 },
    Sqrt2,
    Golden,
    /// Plain float; classification is heuristic.
    Float { value: f64 },
}

impl Ratio {
    pub fn rational(c: u64, d: u64) -> Result<Self> {
        if c == 0 || d == 0 {
            return Err(Error::invalid("ratio", "c and d must be positive"));
        }
        let g = c.gcd(&d);
        Ok(Ratio::Rational { c: c / g, d: d / g })
    }

    pub fn from_float(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::invalid("ratio", format!("must be finite and > 0, got {value}")));
        }
        Ok(Ratio::Float { value })
    }

    pub fn to_dd(self) -> Dd {
        match self {
            Ratio::Rational { c, d } => Dd::ratio(c as i64, d as i64),
            Ratio::Sqrt2 => SQRT2,
            Ratio::Golden => GOLDEN,
            Ratio::Float { value } => Dd::from_f64(value),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.to_dd().to_f64()
    }

    pub fn is_heuristic(self) -> bool {
        matches!(self, Ratio::Float { .. })
    }

    /// `(c, d)` if the ratio is rational (floats: within the denominator cap).
    pub fn as_rational(self) -> Option<(u64, u64)> {
        match self {
            Ratio::Rational { c, d } => Some((c, d)),
            Ratio::Sqrt2 | Ratio::Golden => None,
            Ratio::Float { value } => {
                let tol = 4.0 * f64::EPSILON * value.max(1.0);
                convergents(self, FLOAT_DENOMINATOR_CAP)
                    .into_iter()
                    .find(|&(p, q)| (p as f64 / q as f64 - value).abs() <= tol)
                    .map(|(p, q)| (p as u64, q as u64))
            }
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Rational { c, d } => write!(f, "{c}/{d}"),
            Ratio::Sqrt2 => write!(f, "sqrt2"),
            Ratio::Golden => write!(f, "golden"),
            Ratio::Float { value } => write!(f, "{value}"),
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "sqrt2" => return Ok(Ratio::Sqrt2),
            "golden" => return Ok(Ratio::Golden),
            _ => {}
        }
        if let Some((c, d)) = t.split_once('/') {
            let parse = |x: &str| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::invalid("ratio", format!("expected c/d with positive integers, got `{t}`")))
            };
            return Ratio::rational(parse(c)?, parse(d)?);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::invalid("ratio", format!("expected c/d, sqrt2, golden or a number, got `{t}`")))?;
        Ratio::from_float(v)
    }
}

/// Partial quotients of the continued fraction, then convergents `p/q`
/// with `q <= cap`. Stops on overflow or termination.
fn convergents(ratio: Ratio, cap: i64) -> Vec<(i64, i64)> {
    let mut quotients = PartialQuotients::new(ratio);
    let (mut p0, mut q0) = (1i64, 0i64);
    let Some(a0) = quotients.next() else {
        return Vec::new();
    };
    let (mut p1, mut q1) = (a0, 1i64);
    let mut out = vec![(p1, q1)];
    for a in quotients {
        let p = a.checked_mul(p1).and_then(|x| x.checked_add(p0));
        let q = a.checked_mul(q1).and_then(|x| x.checked_add(q0));
        match (p, q) {
            (Some(p), Some(q)) if q <= cap => {
                out.push((p, q));
                (p0, q0, p1, q1) = (p1, q1, p, q);
            }
            _ => break,
        }
    }
    out
}

enum PartialQuotients {
    Euclid { num: u64, den: u64 },
    Periodic { first: i64, rest: i64, started: bool },
    Float { x: f64, steps: usize },
}

impl PartialQuotients {
    fn new(r: Ratio) -> Self {
        match r {
            Ratio::Rational { c, d } => PartialQuotients::Euclid { num: c, den: d },
            Ratio::Sqrt2 => PartialQuotients::Periodic {
                first: 1,
                rest: 2,
                started: false,
            },
            Ratio::Golden => PartialQuotients::Periodic {
                first: 1,
                rest: 1,
                started: false,
            },
            Ratio::Float { value } => PartialQuotients::Float { x: value, steps: 0 },
        }
    }
}

impl Iterator for PartialQuotients {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        match self {
            PartialQuotients::Euclid { num, den } => {
                if *den == 0 {
                    return None;
                }
                let a = *num / *den;
                (*num, *den) = (*den, *num % *den);
                i64::try_from(a).ok()
            }
            PartialQuotients::Periodic {
                first,
                rest,
                started,
            } => {
                if *started {
                    Some(*rest)
                } else {
                    *started = true;
                    Some(*first)
                }
            }
            PartialQuotients::Float { x, steps } => {
                if !x.is_finite() || *steps > 64 {
                    return None;
                }
                let a = x.floor();
                let frac = *x - a;
                *steps += 1;
                *x = if frac < 1e-15 { f64::INFINITY } else { 1.0 / frac };
                if a > i64::MAX as f64 {
                    None
                } else {
                    Some(a as i64)
                }
            }
        }
    }
}

/// The lattice `αℤ + ωℤ` with `α = ratio·ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub omega: f64,
    pub ratio: Ratio,
}

/// One lattice element `kα + ℓω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub k: i64,
    pub ell: i64,
    pub value: f64,
}

impl Lattice {
    pub fn new(omega: f64, ratio: Ratio) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid("omega", "must be finite and > 0"));
        }
        Ok(Lattice { omega, ratio })
    }

    /// Lattice from plain floats, classified heuristically.
    pub fn from_floats(alpha: f64, omega: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid("alpha", "must be finite and > 0"));
        }
        Lattice::new(omega, Ratio::from_float(alpha / omega)?)
    }

    pub fn alpha(&self) -> f64 {
        self.ratio.to_f64() * self.omega
    }

    /// `kα + ℓω`, with the cancellation in `k·r + ℓ` done in double-double.
    pub fn value(&self, k: i64, ell: i64) -> f64 {
        let y = self.ratio.to_dd().mul_i64(k) + Dd::from_i64(ell);
        y.hi * self.omega + y.lo * self.omega
    }

    pub fn classify(&self) -> RatioClass {
        match self.ratio.as_rational() {
            Some((c, d)) => RatioClass::Rational {
                c,
                d,
                heuristic: self.ratio.is_heuristic(),
            },
            None => RatioClass::IrrationalWitness {
                convergents: self.witnesses(FLOAT_DENOMINATOR_CAP),
                heuristic: self.ratio.is_heuristic(),
            },
        }
    }

    /// Positive lattice values from convergents (integer part skipped), in
    /// order of strictly decreasing size.
    pub fn witnesses(&self, k_bound: i64) -> Vec<Combination> {
        let mut out: Vec<Combination> = Vec::new();
        for (p, q) in convergents(self.ratio, k_bound).into_iter().skip(1) {
            let v = self.value(-q, p);
            let c = if v > 0.0 {
                Combination { k: -q, ell: p, value: v }
            } else {
                Combination { k: q, ell: -p, value: -v }
            };
            if c.value <= 0.0 {
                break;
            }
            if out.last().is_some_and(|l| c.value >= l.value) {
                break;
            }
            out.push(c);
        }
        out
    }
}

/// Classification of the ratio α/ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioClass {
    Rational { c: u64, d: u64, heuristic: bool },
    IrrationalWitness { convergents: Vec<Combination>, heuristic: bool },
}

/// `min_k |s − ωk|`.
pub fn dist_to_lattice(s: f64, omega: f64) -> f64 {
    (s - omega * (s / omega).round()).abs()
}

/// `ω/d`, the smallest positive element of `αℤ + ωℤ` for `α/ω = c/d`.
pub fn min_positive_element(class: &RatioClass, omega: f64) -> Result<f64> {
    match class {
        RatioClass::Rational { d, .. } => Ok(omega / *d as f64),
        RatioClass::IrrationalWitness { .. } => Err(Error::InfimumZero),
    }
}

/// A lattice element in `(0, ε)` from continued-fraction convergents with
/// `|k| <= k_bound`.
pub fn approx_below(lattice: &Lattice, epsilon: f64, k_bound: i64) -> Result<Combination> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon", "must be > 0"));
    }
    lattice
        .witnesses(k_bound)
        .into_iter()
        .find(|c| c.value > 0.0 && c.value < epsilon)
        .ok_or(Error::NotFound {
            bound: k_bound.max(0) as u64,
        })
}

/// Cap on |k| for the growing odd-combination search.
pub const SEARCH_CAP: u64 = 100_000_000;

/// Lattice element `kα + ℓω` with `ℓ` odd inside `[lo, hi]`, by exhaustive
/// search over `|k|, |ℓ| <= bound`. Smallest `|k|` wins, then smallest
/// `|ℓ|`, then positive `k`.
pub fn odd_combination_in(lattice: &Lattice, lo: f64, hi: f64, bound: u64) -> Result<Combination> {
    check_window(lo, hi)?;
    scan_odd(lattice, lo, hi, 0, bound, bound).ok_or(Error::NotFound { bound })
}

/// As [`odd_combination_in`] with `k ≠ 0`, doubling the bound from `start`
/// until a hit or [`SEARCH_CAP`].
pub fn odd_combination_growing(lattice: &Lattice, lo: f64, hi: f64, start: u64) -> Result<Combination> {
    check_window(lo, hi)?;
    let mut from = 1;
    let mut bound = start.max(1);
    loop {
        let bound_now = bound.min(SEARCH_CAP);
        // |ℓ| is limited by |k|·r + hi/ω, so it never binds before |k| does
        if let Some(c) = scan_odd(lattice, lo, hi, from, bound_now, u64::MAX) {
            return Ok(c);
        }
        if bound_now >= SEARCH_CAP {
            return Err(Error::NotFound { bound: SEARCH_CAP });
        }
        from = bound_now + 1;
        bound = bound_now.saturating_mul(2);
    }
}

fn check_window(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::invalid("interval", format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

fn scan_odd(lattice: &Lattice, lo: f64, hi: f64, k_from: u64, k_to: u64, ell_bound: u64) -> Option<Combination> {
    let r = lattice.ratio.to_f64();
    let (a0, b0) = (lo / lattice.omega, hi / lattice.omega);
    let exact_hit = |k: i64, ell: i64| {
        let v = lattice.value(k, ell);
        (v >= lo && v <= hi).then_some(Combination { k, ell, value: v })
    };
    // best odd ℓ for one k: verified in double-double, smallest |ℓ|
    let best_for = |k: i64| -> Option<Combination> {
        let kr = k as f64 * r;
        let margin = 1e-14 * (1.0 + kr.abs()) + 1e-14;
        let lo_l = (a0 - kr - margin).ceil() as i64;
        let hi_l = (b0 - kr + margin).floor() as i64;
        let mut best: Option<Combination> = None;
        let mut ell = if lo_l.rem_euclid(2) == 1 { lo_l } else { lo_l + 1 };
        while ell <= hi_l {
            if ell.unsigned_abs() <= ell_bound {
                if let Some(c) = exact_hit(k, ell) {
                    if best.is_none_or(|b| c.ell.abs() < b.ell.abs()) {
                        best = Some(c);
                    }
                }
            }
            ell += 2;
        }
        best
    };
    for kk in k_from..=k_to {
        let kk = kk as i64;
        let cands = if kk == 0 {
            [best_for(0), None]
        } else {
            [best_for(kk), best_for(-kk)]
        };
        let pick = match cands {
            [Some(p), Some(m)] => Some(if m.ell.abs() < p.ell.abs() { m } else { p }),
            [p, m] => p.or(m),
        };
        if pick.is_some() {
            return pick;
        }
    }
    None
}

/// Tunable constants of the smallness conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub theta: f64,
    pub omega_max: f64,
    pub kappa: f64,
    pub rho: f64,
    pub lambda_max: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            theta: 1.0,
            omega_max: 1.0,
            kappa: 1.0,
            rho: 1.0,
            lambda_max: 1.0,
        }
    }
}

impl EstimateConfig {
    pub fn validate(&self, q: f64) -> Result<()> {
        for (name, v) in [
            ("theta", self.theta),
            ("omega_max", self.omega_max),
            ("kappa", self.kappa),
            ("lambda_max", self.lambda_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, "must be finite and > 0"));
            }
        }
        let rho_lo = (3.0 * q - 3.0) / q;
        if !(self.rho > rho_lo && self.rho <= 1.0) {
            return Err(Error::invalid(
                "rho",
                format!("must lie in ({rho_lo}, 1] for q = {q}, got {}", self.rho),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallnessMode {
    Resolvent,
    Tp,
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Condition {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        Condition {
            name: name.into(),
            lhs,
            rhs,
            pass: lhs <= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub mode: SmallnessMode,
    pub conditions: Vec<Condition>,
    pub pass: bool,
}

/// Check the smallness of λ for the resolvent, time-periodic or nonlinear
/// problem. `ratio` is (2π/T)/ω; when absent it is classified from the
/// floats in `params`.
pub fn check_smallness(
    params: &Params,
    config: &EstimateConfig,
    mode: SmallnessMode,
    ratio: Option<Ratio>,
) -> Result<SmallnessReport> {
    let lam2 = params.lambda * params.lambda;
    let mut conditions = Vec::new();
    match mode {
        SmallnessMode::Resolvent => {
            let d = dist_to_lattice(params.s, params.omega);
            let gap = if d == 0.0 { params.omega } else { d };
            conditions.push(Condition::le(
                "lambda^2 <= theta*min|s - omega*k| (s != omega*k)",
                lam2,
                config.theta * gap,
            ));
        }
        SmallnessMode::Tp | SmallnessMode::Nonlinear => {
            let ratio = match ratio {
                Some(r) => r,
                None => Ratio::from_float(params.alpha() / params.omega)?,
            };
            let lattice = Lattice::new(params.omega, ratio)?;
            let min_pos = min_positive_element(&lattice.classify(), params.omega)?;
            if mode == SmallnessMode::Nonlinear {
                conditions.push(Condition::le("lambda <= lambda_max", params.lambda, config.lambda_max));
                conditions.push(Condition::le(
                    "omega <= kappa*lambda^rho",
                    params.omega,
                    config.kappa * params.lambda.powf(config.rho),
                ));
            }
            conditions.push(Condition::le(
                "lambda^2 <= theta*min{a > 0 : a in (2pi/T)Z + omega*Z}",
                lam2,
                config.theta * min_pos,
            ));
        }
    }
    let pass = conditions.iter().all(|c| c.pass);
    Ok(SmallnessReport {
        mode,
        conditions,
        pass,
    })
}

/// Choice of `ω = (2π/T)·d/c` meeting all three nonlinear smallness clauses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearChoice {
    pub c: u64,
    pub omega: f64,
}

/// Smallest `c` coprime to `d` with `λ²/θ <= (2π/T)/c` and
/// `(2π/T)·d/c <= κλ^ρ`.
pub fn select_nonlinear_params(
    period: f64,
    config: &EstimateConfig,
    d: u64,
    lambda: f64,
) -> Result<NonlinearChoice> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::invalid("period", "must be finite and > 0"));
    }
    if d == 0 {
        return Err(Error::invalid("d", "must be a positive integer"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("lambda", "must be finite and > 0"));
    }
    if lambda > config.lambda_max {
        return Err(Error::Infeasible {
            clause: "lambda <= lambda_max",
        });
    }
    let alpha = std::f64::consts::TAU / period;
    let tol = 1e-12;
    // ω = αd/c <= κλ^ρ  ⇔  c >= αd/(κλ^ρ)
    let c_min = (alpha * d as f64 / (config.kappa * lambda.powf(config.rho)) * (1.0 - tol)).ceil();
    // λ²/θ <= α/c  ⇔  c <= αθ/λ²
    let c_max = (alpha * config.theta / (lambda * lambda) * (1.0 + tol)).floor();
    let c_min = c_min.max(1.0);
    if c_max < c_min {
        return Err(Error::Infeasible {
            clause: "lambda^2/theta <= (2pi/T)/c together with omega <= kappa*lambda^rho",
        });
    }
    if c_max > u64::MAX as f64 / 2.0 {
        return Err(Error::invalid("lambda", "too small: admissible c overflows"));
    }
    let (lo, hi) = (c_min as u64, c_max as u64);
    (lo..=hi)
        .find(|c| c.gcd(&d) == 1)
        .map(|c| NonlinearChoice {
            c,
            omega: alpha * d as f64 / c as f64,
        })
        .ok_or(Error::Infeasible {
            clause: "c coprime to d",
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Lattice {
        Lattice::new(1.0, Ratio::Sqrt2).unwrap()
    }

    #[test]
    fn dist_examples() {
        assert!((dist_to_lattice(0.7, 1.0) - 0.3).abs() < 1e-15);
        assert_eq!(dist_to_lattice(2.0, 0.5), 0.0);
        assert!((dist_to_lattice(-0.3, 1.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn min_positive_examples() {
        let two = Lattice::from_floats(1.0, 0.5).unwrap().classify();
        assert_eq!(min_positive_element(&two, 0.5).unwrap(), 0.5);
        let three_halves = Lattice::from_floats(3.0, 2.0).unwrap().classify();
        assert!(matches!(three_halves, RatioClass::Rational { c: 3, d: 2, .. }));
        assert_eq!(min_positive_element(&three_halves, 2.0).unwrap(), 1.0);
        let one = Lattice::new(0.7, Ratio::rational(1, 1).unwrap()).unwrap().classify();
        assert_eq!(min_positive_element(&one, 0.7).unwrap(), 0.7);
        assert!(matches!(
            min_positive_element(&sqrt2().classify(), 1.0),
            Err(Error::InfimumZero)
        ));
    }

    #[test]
    fn float_sqrt2_is_irrational() {
        let l = Lattice::from_floats(std::f64::consts::SQRT_2, 1.0).unwrap();
        assert!(matches!(l.classify(), RatioClass::IrrationalWitness { heuristic: true, .. }));
    }

    #[test]
    fn approx_below_examples() {
        let c = approx_below(&sqrt2(), 0.01, 1_000_000).unwrap();
        assert_eq!((c.k, c.ell), (-70, 99));
        assert!((c.value - 0.005_050_633_883_346_584).abs() < 1e-15);
        let c = approx_below(&sqrt2(), 0.5, 1_000_000).unwrap();
        assert_eq!((c.k, c.ell), (-2, 3));
        assert!((c.value - 0.171_572_875_253_809_9).abs() < 1e-15);
        let rational = Lattice::from_floats(3.0, 2.0).unwrap();
        assert!(matches!(
            approx_below(&rational, 0.5, 1 << 40),
            Err(Error::NotFound { .. })
        ));
    }

    #[test]
    fn odd_combination_examples() {
        let c = odd_combination_in(&sqrt2(), 0.1, 0.2, 10).unwrap();
        assert_eq!((c.k, c.ell), (-2, 3));
        let c = odd_combination_in(&sqrt2(), 0.2, 0.3, 20).unwrap();
        assert_eq!((c.k, c.ell), (-9, 13));
        assert!((c.value - 0.272_077_938_642_144_5).abs() < 1e-14);
        let c = odd_combination_in(&sqrt2(), 0.2, 0.4, 20).unwrap();
        assert_eq!((c.k, c.ell), (8, -11));
        // √2 − 1 is already in [0.4, 0.5]
        let c = odd_combination_in(&sqrt2(), 0.4, 0.5, 5).unwrap();
        assert_eq!((c.k, c.ell), (1, -1));
        assert!(odd_combination_in(&sqrt2(), 0.45, 0.46, 5).is_err());
        let c = odd_combination_in(&sqrt2(), 0.45, 0.46, 50).unwrap();
        assert!(c.ell.rem_euclid(2) == 1 && (0.45..=0.46).contains(&c.value));
    }

    #[test]
    fn growing_search_skips_k_zero() {
        let c = odd_combination_growing(&sqrt2(), 1.0, 2.0, 4).unwrap();
        assert_ne!(c.k, 0);
        assert!((1.0..=2.0).contains(&c.value));
    }

    #[test]
    fn smallness_examples() {
        let cfg = EstimateConfig::default();
        let p = Params::new(0.5, 1.0, 0.3, 1.0, 1.5).unwrap();
        let r = check_smallness(&p, &cfg, SmallnessMode::Resolvent, None).unwrap();
        assert!(r.pass);
        assert!((r.conditions[0].rhs - 0.3).abs() < 1e-15);

        let p = Params::new(0.8, 0.5, 0.0, std::f64::consts::TAU, 1.5).unwrap();
        let r = check_smallness(&p, &cfg, SmallnessMode::Tp, None).unwrap();
        assert!(!r.pass);
        assert_eq!(r.conditions[0].rhs, 0.5);

        let e = check_smallness(&p, &cfg, SmallnessMode::Tp, Some(Ratio::Sqrt2)).unwrap_err();
        assert!(matches!(e, Error::InfimumZero));
    }

    #[test]
    fn nonlinear_selection_examples() {
        let tau = std::f64::consts::TAU;
        let cfg = EstimateConfig::default();
        let a = select_nonlinear_params(tau, &cfg, 1, 0.1).unwrap();
        assert_eq!(a.c, 10);
        assert!((a.omega - 0.1).abs() < 1e-15);
        assert!(matches!(
            select_nonlinear_params(tau, &EstimateConfig { lambda_max: 10.0, ..cfg }, 1, 2.0),
            Err(Error::Infeasible { .. })
        ));
        let b = select_nonlinear_params(tau, &cfg, 2, 0.1).unwrap();
        assert_eq!(b.c, 21);
        assert!((b.omega - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!("6/4".parse::<Ratio>().unwrap(), Ratio::Rational { c: 3, d: 2 });
        assert_eq!("sqrt2".parse::<Ratio>().unwrap(), Ratio::Sqrt2);
        assert!("0/3".parse::<Ratio>().is_err());
        assert!("abc".parse::<Ratio>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn dist_is_periodic_and_bounded(s in -50.0f64..50.0, omega in 0.1f64..5.0, k in -20i64..20) {
            let d = dist_to_lattice(s, omega);
            proptest::prop_assert!(d >= 0.0 && d <= omega / 2.0 + 1e-12);
            proptest::prop_assert!((dist_to_lattice(s + k as f64 * omega, omega) - d).abs() < 1e-9);
            proptest::prop_assert!((dist_to_lattice(-s, omega) - d).abs() < 1e-12);
        }

        #[test]
        fn odd_combination_lands_in_window(lo in 0.01f64..0.9, width in 0.02f64..0.5) {
            let c = odd_combination_in(&sqrt2(), lo, lo + width, 400).unwrap();
            proptest::prop_assert!(c.ell % 2 != 0);
            proptest::prop_assert!(c.value >= lo && c.value <= lo + width);
        }

        #[test]
        fn approx_below_is_below(eps in 1e-4f64..0.9) {
            let c = approx_below(&sqrt2(), eps, 1_000_000).unwrap();
            proptest::prop_assert!(c.value > 0.0 && c.value < eps);
        }
    }
}
