//! The bump `phi` on `[1, 2]`, the cutoff `chi`, its dyadic rescalings and
//! the oscillatory profile `V(X) = ∫ e(tX) phi(t) dt`.

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, ComplexKahan, KahanSum};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::OnceLock;

/// Nodes per Gauss–Legendre panel.
pub const PANEL_ORDER: usize = 16;
/// Largest `|2^k alpha|` accepted by [`v_k`].
pub const MAX_PHASE: f64 = (1u64 << 40) as f64;

/// Quadrature configuration for `phi` and `V`.
#[derive(Debug, Clone)]
pub struct BumpSpec {
    pub support_lo: f64,
    pub support_hi: f64,
    /// `c` in `phi(t) = c exp(-1/(1 - (2t-3)^2))`.
    pub normalization: f64,
    /// Panels used at `X = 0`; one more panel is added per unit of `|X|`.
    pub base_panels: usize,
    /// Upper bound on quadrature nodes for a single evaluation of `V`.
    pub node_budget: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for BumpSpec {
    fn default() -> Self {
        BumpSpec::new(32, 1 << 27)
    }
}

impl BumpSpec {
    pub fn new(base_panels: usize, node_budget: usize) -> Self {
        assert!(base_panels >= 1);
        let (nodes, weights) = gauss_legendre(PANEL_ORDER);
        let mut spec = BumpSpec {
            support_lo: 1.0,
            support_hi: 2.0,
            normalization: 1.0,
            base_panels,
            node_budget,
            nodes,
            weights,
        };
        let mass = spec.integrate(256, raw_phi);
        spec.normalization = 1.0 / mass;
        spec
    }

    /// Total number of quadrature nodes at `X = 0`.
    pub fn quadrature_points(&self) -> usize {
        self.base_panels * PANEL_ORDER
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.normalization * raw_phi(t)
    }

    /// `phi'(t)`.
    pub fn phi_prime(&self, t: f64) -> f64 {
        if t <= 1.0 || t >= 2.0 {
            return 0.0;
        }
        let u = 2.0 * t - 3.0;
        let d = 1.0 - u * u;
        // d/dt exp(-1/d) = exp(-1/d) * (-2u * 2) / d^2
        self.phi(t) * (-4.0 * u) / (d * d)
    }

    /// `∫ phi` under this spec's rule at `X = 0`.
    pub fn mass(&self) -> f64 {
        self.integrate(self.base_panels, |t| self.phi(t))
    }

    fn integrate(&self, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = (self.support_hi - self.support_lo) / panels as f64;
        let mut acc = KahanSum::default();
        for j in 0..panels {
            let mid = self.support_lo + (j as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc.add(w * 0.5 * h * f(mid + 0.5 * h * x));
            }
        }
        acc.value()
    }

    /// `V(X) = ∫ e(tX) phi(t) dt` to absolute accuracy `1e-10`.
    pub fn profile(&self, x: f64) -> Result<Complex64> {
        if !x.is_finite() || x.abs() > MAX_PHASE {
            return Err(Error::Precision(format!(
                "|X| = {x:e} exceeds the phase cap 2^40"
            )));
        }
        if x == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let panels = self.base_panels + x.abs().ceil() as usize;
        let nodes = panels.saturating_mul(PANEL_ORDER);
        if nodes > self.node_budget {
            return Err(Error::Precision(format!(
                "V({x:e}) needs {nodes} nodes, budget is {}",
                self.node_budget
            )));
        }
        let h = 1.0 / panels as f64;
        let mut acc = ComplexKahan::default();
        for j in 0..panels {
            let mid = 1.0 + (j as f64 + 0.5) * h;
            for (u, w) in self.nodes.iter().zip(&self.weights) {
                let t = mid + 0.5 * h * u;
                let ph = self.phi(t);
                if ph == 0.0 {
                    continue;
                }
                // Reduce t*X mod 1 before taking the angle.
                let (s, c) = (TAU * crate::numeric::frac_mul(t, x)).sin_cos();
                acc.add(Complex64::new(c, s) * (w * 0.5 * h * ph));
            }
        }
        Ok(acc.value())
    }
}

fn raw_phi(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        return 0.0;
    }
    let u = 2.0 * t - 3.0;
    (-1.0 / (1.0 - u * u)).exp()
}

fn default_spec() -> &'static BumpSpec {
    static SPEC: OnceLock<BumpSpec> = OnceLock::new();
    SPEC.get_or_init(BumpSpec::default)
}

/// The shared default [`BumpSpec`].
pub fn bump_spec() -> &'static BumpSpec {
    default_spec()
}

/// `phi(t)`, supported on `[1, 2]` with unit mass.
pub fn eval_phi(t: f64) -> f64 {
    default_spec().phi(t)
}

fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `chi(x)`: exactly `1` on `|x| <= 1/4`, exactly `0` on `|x| >= 1/2`.
pub fn eval_chi(x: f64) -> f64 {
    let a = x.abs();
    if a <= 0.25 {
        return 1.0;
    }
    if a >= 0.5 {
        return 0.0;
    }
    let p = h(2.0 - 4.0 * a);
    let q = h(4.0 * a - 1.0);
    p / (p + q)
}

/// `chi(2^e x)`, deciding the plateau and the vanishing region from `|x|`
/// alone so large `e` never overflows.
pub fn chi_scaled(e: i32, x: f64) -> f64 {
    let a = x.abs();
    if a >= two_pow(-e - 1) {
        return 0.0;
    }
    if a <= two_pow(-e - 2) {
        return 1.0;
    }
    eval_chi(a * two_pow(e))
}

/// `chi_s(alpha) = chi(2^(10(s+4)) alpha)`.
pub fn chi_s(s: u32, alpha: f64) -> f64 {
    chi_scaled(chi_exponent(s), alpha)
}

/// Exponent `10(s + 4)` of the level-`s` cutoff.
pub fn chi_exponent(s: u32) -> i32 {
    10 * (s as i32 + 4)
}

fn two_pow(e: i32) -> f64 {
    f64::powi(2.0, e)
}

/// `V_k(alpha) = ∫ e(2^k t alpha) phi(t) dt`.
pub fn v_k(k: u32, alpha: f64) -> Result<Complex64> {
    default_spec().profile(alpha * two_pow(k as i32))
}

/// `sup |phi'| / (2 pi)`, the constant in `|V(X)| <= C / |X|`.
pub fn decay_constant() -> f64 {
    let spec = default_spec();
    let n = 20_000;
    let sup = (1..n)
        .map(|i| spec.phi_prime(1.0 + i as f64 / n as f64).abs())
        .fold(0.0, f64::max);
    sup / TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid_phi_mass(n: usize) -> f64 {
        // The integrand is flat to all orders at both ends, so the plain
        // trapezoid rule converges spectrally.
        (1..n).map(|i| eval_phi(1.0 + i as f64 / n as f64)).sum::<f64>() / n as f64
    }

    #[test]
    fn phi_examples() {
        let c = bump_spec().normalization;
        assert_eq!(eval_phi(0.5), 0.0);
        assert_eq!(eval_phi(1.0), 0.0);
        assert_eq!(eval_phi(2.0), 0.0);
        assert!((eval_phi(1.5) - c * (-1.0f64).exp()).abs() < 1e-15);
        assert!((eval_phi(1.25) - c * (-4.0f64 / 3.0).exp()).abs() < 1e-15);
        // ∫_{-1}^{1} exp(-1/(1-u^2)) du = 0.443993816168...
        assert!((c - 2.0 / 0.443_993_816_168_079_4).abs() < 1e-10);
    }

    #[test]
    fn phi_has_unit_mass() {
        assert!((bump_spec().mass() - 1.0).abs() < 1e-12);
        assert!((trapezoid_phi_mass(4000) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(eval_chi(0.0), 1.0);
        assert_eq!(eval_chi(0.25), 1.0);
        assert_eq!(eval_chi(0.6), 0.0);
        assert_eq!(eval_chi(-0.5), 0.0);
        assert!((eval_chi(0.375) - 0.5).abs() < 1e-15);
        assert_eq!(eval_chi(0.3), eval_chi(-0.3));
    }

    #[test]
    fn chi_s_examples() {
        assert_eq!(chi_s(0, 0.0), 1.0);
        assert_eq!(chi_s(0, two_pow(-42)), 1.0);
        assert_eq!(chi_s(0, two_pow(-41)), 0.0);
        assert_eq!(chi_s(2, 1.0), 0.0);
        assert!((chi_s(0, 0.375 * two_pow(-40)) - 0.5).abs() < 1e-15);
        // Large levels: no overflow, exact plateau.
        assert_eq!(chi_s(60, 0.0), 1.0);
        assert_eq!(chi_s(60, 1e-300), 1.0);
        assert_eq!(chi_s(60, 1e-100), 0.0);
    }

    #[test]
    fn chi_s_nesting() {
        for s in 1..12u32 {
            for i in 0..200 {
                let a = i as f64 * two_pow(-chi_exponent(s) - 1) / 150.0;
                assert_eq!(chi_s(s, a) * chi_s(s - 1, a), chi_s(s, a));
            }
        }
    }

    fn trapezoid_v(x: f64, n: usize) -> Complex64 {
        let mut acc = ComplexKahan::default();
        for i in 1..n {
            let t = 1.0 + i as f64 / n as f64;
            let (s, c) = (TAU * crate::numeric::frac_mul(t, x)).sin_cos();
            acc.add(Complex64::new(c, s) * eval_phi(t));
        }
        acc.value() / n as f64
    }

    #[test]
    fn v_at_zero_and_scaling() {
        assert_eq!(v_k(7, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let a = v_k(10, two_pow(-5)).unwrap();
        let b = v_k(5, 1.0).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn v_matches_oracle() {
        let spec = bump_spec();
        for &x in &[0.3f64, 1.0, 7.5, 32.0, -13.25, 200.0] {
            let panels = spec.base_panels + x.abs().ceil() as usize;
            let oracle = trapezoid_v(x, 10 * panels * PANEL_ORDER);
            let got = spec.profile(x).unwrap();
            assert!((got - oracle).norm() < 1e-10, "X={x}: {got} vs {oracle}");
        }
    }

    #[test]
    fn v_conjugate_symmetry() {
        for &x in &[0.1, 2.5, 40.0] {
            let p = bump_spec().profile(x).unwrap();
            let m = bump_spec().profile(-x).unwrap();
            assert!((p - m.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn v_decay_bound() {
        let c = decay_constant() * 1.01;
        let mut x = 1.0f64;
        while x <= 1e6 {
            let v = bump_spec().profile(x).unwrap().norm();
            assert!(v <= c / x, "X={x}: |V|={v}, bound {}", c / x);
            x *= 3.7;
        }
    }

    #[test]
    fn v_rejects_oversized_phase() {
        assert!(matches!(v_k(41, 1.0), Err(Error::Precision(_))));
        let tight = BumpSpec::new(32, 1000);
        assert!(matches!(tight.profile(1e4), Err(Error::Precision(_))));
    }
}
