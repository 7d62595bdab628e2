use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpacetimeDim {
    #[serde(rename = "2+1")]
    D2,
    #[serde(rename = "3+1")]
    D3,
}

/// Critical exponent and coupling with their one-sigma uncertainties.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalData {
    pub dim: SpacetimeDim,
    pub nu: f64,
    pub nu_err: f64,
    pub jr_c: f64,
    pub jr_c_err: f64,
}

impl CriticalData {
    pub fn d2() -> Self {
        Self {
            dim: SpacetimeDim::D2,
            nu: 0.693,
            nu_err: 0.015,
            jr_c: 4.81695,
            jr_c_err: 0.00037,
        }
    }

    pub fn d3() -> Self {
        Self {
            dim: SpacetimeDim::D3,
            nu: 0.5050,
            nu_err: 0.0096,
            jr_c: 10.09817,
            jr_c_err: 0.00055,
        }
    }

    pub fn for_spatial_dim(d: usize) -> Option<Self> {
        match d {
            2 => Some(Self::d2()),
            3 => Some(Self::d3()),
            _ => None,
        }
    }
}

/// Prefactors of the order-of-magnitude bounds. All default to 1.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundConstants {
    pub adiabatic: f64,
    pub trotter: f64,
    pub gates_per_link: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            adiabatic: 1.0,
            trotter: 1.0,
            gates_per_link: 1.0,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Weak,
    Critical,
}

/// Order-of-magnitude cost of adiabatic preparation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub regime: Regime,
    /// Non-adiabatic part of the simulated time.
    pub leading_time: f64,
    /// Trotter part `√(ε/V)`.
    pub trotter_time: f64,
    /// `leading_time + trotter_time`.
    pub t: f64,
    /// Step count; `T = Σ Δt_i = O(N)`.
    pub n: f64,
    /// Total gate count: `N` times gates per step, which scale with `V`.
    pub gate_total: f64,
    pub jr: f64,
    pub volume: f64,
    pub epsilon: f64,
    pub critical: Option<CriticalData>,
    pub constants: BoundConstants,
    pub label: String,
}

fn check_common(v: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidInput(format!("volume must be positive, got {v}")));
    }
    Ok(())
}

fn estimate(regime: Regime, leading: f64, jr: f64, v: f64, epsilon: f64, crit: Option<CriticalData>, k: BoundConstants) -> ResourceEstimate {
    let trotter = k.trotter * (epsilon / v).sqrt();
    let t = leading + trotter;
    ResourceEstimate {
        regime,
        leading_time: leading,
        trotter_time: trotter,
        t,
        n: t,
        gate_total: k.gates_per_link * v * t,
        jr,
        volume: v,
        epsilon,
        critical: crit,
        constants: k,
        label: "order-of-magnitude".into(),
    }
}

/// `T = J²V²/ε + √(ε/V)` and gate total `J²V³/ε + √(εV)`.
pub fn weak_coupling_budget(jr_max: f64, v: f64, epsilon: f64, k: BoundConstants) -> Result<ResourceEstimate> {
    check_common(v, epsilon)?;
    let leading = k.adiabatic * (jr_max * v).powi(2) / epsilon;
    Ok(estimate(Regime::Weak, leading, jr_max, v, epsilon, None, k))
}

/// `T = |J_r V|²/(ε |J_r − J_{r,c}|^{3ν}) + √(ε/V)`.
pub fn critical_budget(jr: f64, crit: CriticalData, v: f64, epsilon: f64, k: BoundConstants) -> Result<ResourceEstimate> {
    check_common(v, epsilon)?;
    let dist = (jr - crit.jr_c).abs();
    if dist == 0.0 {
        return Err(Error::InvalidInput(format!(
            "critical bound diverges at J_r = J_r,c = {}",
            crit.jr_c
        )));
    }
    let leading = k.adiabatic * (jr * v).powi(2) / (epsilon * dist.powf(3.0 * crit.nu));
    Ok(estimate(Regime::Critical, leading, jr, v, epsilon, Some(crit), k))
}

/// Adaptive Simpson quadrature on `[a, b]`.
fn adaptive_simpson(f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec(
        f: &mut dyn FnMut(f64) -> Result<f64>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm)?, f(rm)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            return Ok(left + right + err / 15.0);
        }
        Ok(rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)? + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
    let (fa, fb) = (f(a)?, f(b)?);
    let fm = f(0.5 * (a + b))?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Right side of the adiabatic theorem bound on `T` for a schedule with gap
/// `Δ(τ)` and `‖Ḣ(τ)‖`, `τ ∈ [0, 1]`, and `Ḧ = 0`:
///
/// `(4/ε)[‖Ḣ(0)‖/Δ(0)² + ‖Ḣ(1)‖/Δ(1)² + ∫ 10‖Ḣ‖²/Δ³ dτ]`.
pub fn teufel_bound(gap: &dyn Fn(f64) -> f64, hdot: &dyn Fn(f64) -> f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let g = |tau: f64| -> Result<f64> {
        let d = gap(tau);
        if !(d > 0.0) {
            return Err(Error::InvalidInput(format!("gap {d} is not positive at tau = {tau}")));
        }
        Ok(d)
    };
    let (g0, g1) = (g(0.0)?, g(1.0)?);
    let boundary = hdot(0.0) / (g0 * g0) + hdot(1.0) / (g1 * g1);
    let mut integrand = |tau: f64| -> Result<f64> {
        let h = hdot(tau);
        Ok(10.0 * h * h / g(tau)?.powi(3))
    };
    let integral = adaptive_simpson(&mut integrand, 0.0, 1.0, 1e-12)?;
    Ok(4.0 / epsilon * (boundary + integral))
}

/// Error from ramping along a staircase instead of the line:
/// `10 Δt_max |‖Ḣ(0)‖²/Δ(0)³ − ‖Ḣ(1)‖²/Δ(1)³|`.
pub fn staircase_correction(gap: &dyn Fn(f64) -> f64, hdot: &dyn Fn(f64) -> f64, dt_max: f64) -> f64 {
    let term = |tau: f64| hdot(tau).powi(2) / gap(tau).powi(3);
    10.0 * dt_max * (term(0.0) - term(1.0)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::perturbative_gap;

    #[test]
    fn constant_gap_closed_form() {
        let (delta, h, eps) = (0.7, 3.0, 0.01);
        let t = teufel_bound(&|_| delta, &|_| h, eps).unwrap();
        let expect = 4.0 / eps * (2.0 * h / (delta * delta) + 10.0 * h * h / delta.powi(3));
        assert!((t / expect - 1.0).abs() < 1e-12);
        let t2 = teufel_bound(&|_| delta, &|_| h, eps / 2.0).unwrap();
        assert!((t2 / t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn varying_gap_matches_antiderivative() {
        // Δ = 1 − τ/2 gives ∫ Δ^{−3} dτ = 3
        let t = teufel_bound(&|tau| 1.0 - 0.5 * tau, &|_| 1.0, 1.0).unwrap();
        let expect = 4.0 * (1.0 + 4.0 + 10.0 * 3.0);
        assert!((t - expect).abs() < 1e-8, "{t}");
    }

    #[test]
    fn closing_gap_is_rejected() {
        assert!(teufel_bound(&|tau| 0.5 - tau, &|_| 1.0, 0.1).is_err());
    }

    #[test]
    fn weak_scalings() {
        let k = BoundConstants::default();
        let a = weak_coupling_budget(0.3, 10.0, 0.01, k).unwrap();
        let b = weak_coupling_budget(0.3, 20.0, 0.01, k).unwrap();
        let c = weak_coupling_budget(0.3, 10.0, 0.005, k).unwrap();
        assert!((b.leading_time / a.leading_time - 4.0).abs() < 1e-12);
        assert!((c.leading_time / a.leading_time - 2.0).abs() < 1e-12);
        let z = weak_coupling_budget(0.0, 10.0, 0.01, k).unwrap();
        assert_eq!(z.leading_time, 0.0);
        assert!((z.t - (0.001f64).sqrt()).abs() < 1e-15);
        assert!((z.gate_total - (0.1f64).sqrt()).abs() < 1e-12);
        assert!(weak_coupling_budget(0.1, 4.0, 0.0, k).is_err());
    }

    #[test]
    fn critical_slowdown() {
        let k = BoundConstants::default();
        let crit = CriticalData::d2();
        let a = critical_budget(crit.jr_c - 0.2, crit, 18.0, 0.01, k).unwrap();
        let b = critical_budget(crit.jr_c - 0.1, crit, 18.0, 0.01, k).unwrap();
        let ratio = b.leading_time / a.leading_time * ((crit.jr_c - 0.2) / (crit.jr_c - 0.1)).powi(2);
        assert!((ratio - 2f64.powf(3.0 * 0.693)).abs() < 1e-12);
        assert!((2f64.powf(3.0 * 0.693) - 4.23).abs() < 5e-3);
        assert!(critical_budget(crit.jr_c, crit, 18.0, 0.01, k).is_err());
        let flat = CriticalData { nu: 0.0, ..crit };
        let c = critical_budget(2.0, flat, 18.0, 0.01, k).unwrap();
        let w = weak_coupling_budget(2.0, 18.0, 0.01, k).unwrap();
        assert!((c.leading_time - w.leading_time).abs() < 1e-9);
    }

    #[test]
    fn shipped_constants() {
        let a = CriticalData::d2();
        assert_eq!((a.nu, a.jr_c), (0.693, 4.81695));
        let b = CriticalData::d3();
        assert_eq!((b.nu, b.jr_c), (0.5050, 10.09817));
    }

    #[test]
    fn staircase_term_scaling() {
        let corr = |v: f64, j: f64, dt: f64| {
            let gap = move |tau: f64| perturbative_gap(tau * j, 1);
            let hdot = move |_| v * j;
            staircase_correction(&gap, &hdot, dt)
        };
        let base = corr(8.0, 0.01, 1.0);
        assert!((corr(16.0, 0.01, 1.0) / base - 4.0).abs() < 1e-9);
        assert!((corr(8.0, 0.01, 2.0) / base - 2.0).abs() < 1e-9);
        // J³ at small J
        let r = corr(8.0, 0.002, 1.0) / corr(8.0, 0.001, 1.0);
        assert!((r - 8.0).abs() < 0.05, "{r}");
    }
}
