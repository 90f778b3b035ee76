//! Concentrated (Dirac) distributions on the plane and pass/fail reports for
//! pairings against test functions.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math::Vec2;
use crate::quad::TestFunction2D;

/// One concentrated term at `point`: w0 * delta + (w1)_a * d_a(delta).
///
/// Sign convention: a term with w1 = a represents a_alpha d_alpha(delta),
/// whose action on phi is -a . grad(phi) (distributional derivative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentratedTerm {
    pub point: Vec2,
    pub w0: f64,
    pub w1: Vec2,
}

/// Finite sum of Dirac masses and Dirac-gradient terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConcentratedDistribution2D {
    terms: Vec<ConcentratedTerm>,
}

impl ConcentratedDistribution2D {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[ConcentratedTerm] {
        &self.terms
    }

    pub fn push_mass(&mut self, point: Vec2, w0: f64) {
        self.terms.push(ConcentratedTerm {
            point,
            w0,
            w1: Vec2::ZERO,
        });
    }

    pub fn push_dipole(&mut self, point: Vec2, w1: Vec2) {
        self.terms.push(ConcentratedTerm {
            point,
            w0: 0.0,
            w1,
        });
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ConcentratedDistribution2D { terms }
    }

    pub fn scaled(&self, s: f64) -> Self {
        ConcentratedDistribution2D {
            terms: self
                .terms
                .iter()
                .map(|t| ConcentratedTerm {
                    point: t.point,
                    w0: t.w0 * s,
                    w1: t.w1 * s,
                })
                .collect(),
        }
    }

    /// Merges terms at bitwise-identical points and drops zero terms,
    /// keeping first-occurrence order.
    pub fn compacted(&self) -> Self {
        let mut terms: Vec<ConcentratedTerm> = Vec::new();
        for t in &self.terms {
            if let Some(existing) = terms.iter_mut().find(|e| e.point == t.point) {
                existing.w0 += t.w0;
                existing.w1 += t.w1;
            } else {
                terms.push(*t);
            }
        }
        terms.retain(|t| t.w0 != 0.0 || t.w1 != Vec2::ZERO);
        ConcentratedDistribution2D { terms }
    }

    pub fn is_mass_only(&self) -> bool {
        self.terms.iter().all(|t| t.w1 == Vec2::ZERO)
    }

    /// Action on a test function: sum of w0 phi(p) - w1 . grad(phi)(p).
    pub fn action(&self, phi: &dyn TestFunction2D) -> f64 {
        let mut parts: Vec<f64> = self
            .terms
            .iter()
            .map(|t| t.w0 * phi.value(t.point) - t.w1.dot(phi.grad(t.point)))
            .collect();
        crate::math::pairwise_sum(&mut parts)
    }

    /// Largest coefficient discrepancy against `other`, matching terms by
    /// exact point equality after compaction.
    pub fn max_coefficient_difference(&self, other: &Self) -> f64 {
        let a = self.compacted();
        let b = other.compacted();
        let mut points: Vec<Vec2> = a.terms.iter().map(|t| t.point).collect();
        for t in &b.terms {
            if !points.contains(&t.point) {
                points.push(t.point);
            }
        }
        let get = |d: &ConcentratedDistribution2D, p: Vec2| -> (f64, Vec2) {
            d.terms
                .iter()
                .find(|t| t.point == p)
                .map_or((0.0, Vec2::ZERO), |t| (t.w0, t.w1))
        };
        let mut worst = 0.0f64;
        for p in points {
            let (w0a, w1a) = get(&a, p);
            let (w0b, w1b) = get(&b, p);
            worst = worst
                .max(libm::fabs(w0a - w0b))
                .max(libm::fabs(w1a.x - w1b.x))
                .max(libm::fabs(w1a.y - w1b.y));
        }
        worst
    }
}

/// Symbolic planar curl eps_ab d_a(D_b) = d_x(D_y) - d_y(D_x) of a pair of
/// mass-only distributions; differentiating a mass yields a dipole.
///
/// Panics on dipole input: a second distributional derivative is not
/// representable in this first-order term list.
pub fn planar_curl(
    d_x: &ConcentratedDistribution2D,
    d_y: &ConcentratedDistribution2D,
) -> ConcentratedDistribution2D {
    assert!(
        d_x.is_mass_only() && d_y.is_mass_only(),
        "planar_curl requires mass-only distributions"
    );
    let mut out = ConcentratedDistribution2D::zero();
    for t in d_y.terms() {
        out.push_dipole(t.point, Vec2::new(t.w0, 0.0));
    }
    for t in d_x.terms() {
        out.push_dipole(t.point, Vec2::new(0.0, -t.w0));
    }
    out.compacted()
}

/// Outcome of one quadrature-vs-prediction comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingReport {
    pub label: String,
    pub quadrature_value: f64,
    pub predicted_value: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub tol_abs: f64,
    pub pass: bool,
}

impl PairingReport {
    pub fn new(
        label: String,
        quadrature_value: f64,
        predicted_value: f64,
        tolerance: f64,
        tol_abs: f64,
    ) -> Self {
        let abs_error = libm::fabs(quadrature_value - predicted_value);
        let scale = libm::fabs(predicted_value);
        let rel_error = if scale > 0.0 {
            abs_error / scale
        } else {
            abs_error
        };
        let pass = abs_error <= (tolerance * scale).max(tol_abs);
        PairingReport {
            label,
            quadrature_value,
            predicted_value,
            abs_error,
            rel_error,
            tolerance,
            tol_abs,
            pass,
        }
    }

    /// A failed report carrying no numeric comparison (quadrature error).
    pub fn inconclusive(label: String) -> Self {
        PairingReport {
            label,
            quadrature_value: f64::NAN,
            predicted_value: f64::NAN,
            abs_error: f64::NAN,
            rel_error: f64::NAN,
            tolerance: 0.0,
            tol_abs: 0.0,
            pass: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::BumpTestFunction;
    use alloc::string::ToString;

    #[test]
    fn action_mass_and_dipole() {
        let phi = BumpTestFunction::new(Vec2::ZERO, 1.0, 2.0);
        let mut d = ConcentratedDistribution2D::zero();
        d.push_mass(Vec2::ZERO, 3.0);
        assert_eq!(d.action(&phi), 6.0); // 3 * phi(0) = 3 * 2
        let mut g = ConcentratedDistribution2D::zero();
        let p = Vec2::new(0.3, 0.1);
        g.push_dipole(p, Vec2::new(1.0, -2.0));
        let grad = phi.grad(p);
        assert!((g.action(&phi) - (-(grad.x) + 2.0 * grad.y)).abs() < 1e-15);
    }

    #[test]
    fn action_vanishes_off_support() {
        let phi = BumpTestFunction::new(Vec2::ZERO, 1.0, 1.0);
        let mut d = ConcentratedDistribution2D::zero();
        d.push_mass(Vec2::new(5.0, 5.0), 7.0);
        d.push_dipole(Vec2::new(-4.0, 0.0), Vec2::new(1.0, 1.0));
        assert_eq!(d.action(&phi), 0.0);
    }

    #[test]
    fn compaction_merges_and_drops() {
        let p = Vec2::new(1.0, 2.0);
        let mut d = ConcentratedDistribution2D::zero();
        d.push_mass(p, 1.5);
        d.push_mass(p, -1.5);
        d.push_dipole(p, Vec2::new(1.0, 0.0));
        d.push_mass(Vec2::ZERO, 0.0);
        let c = d.compacted();
        assert_eq!(c.terms().len(), 1);
        assert_eq!(c.terms()[0].w0, 0.0);
        assert_eq!(c.terms()[0].w1, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn curl_of_masses() {
        // D = (0, w delta_p): curl = w d_x delta -> action -w d_x phi
        let p = Vec2::new(0.2, -0.1);
        let mut dy = ConcentratedDistribution2D::zero();
        dy.push_mass(p, 2.0);
        let curl = planar_curl(&ConcentratedDistribution2D::zero(), &dy);
        let phi = BumpTestFunction::new(Vec2::ZERO, 1.0, 1.0);
        let expected = -2.0 * phi.grad(p).x;
        assert!((curl.action(&phi) - expected).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn curl_rejects_dipoles() {
        let mut dx = ConcentratedDistribution2D::zero();
        dx.push_dipole(Vec2::ZERO, Vec2::new(1.0, 0.0));
        let _ = planar_curl(&dx, &ConcentratedDistribution2D::zero());
    }

    #[test]
    fn coefficient_difference() {
        let p = Vec2::new(1.0, 1.0);
        let mut a = ConcentratedDistribution2D::zero();
        a.push_mass(p, 1.0);
        let mut b = ConcentratedDistribution2D::zero();
        b.push_mass(p, 1.0 + 1e-15);
        assert!(a.max_coefficient_difference(&b) <= 1e-14);
        let mut c = ConcentratedDistribution2D::zero();
        c.push_mass(Vec2::ZERO, 0.5);
        assert_eq!(a.max_coefficient_difference(&c), 1.0);
    }

    #[test]
    fn report_pass_logic() {
        let r = PairingReport::new("x".to_string(), 1.00005, 1.0, 1e-4, 1e-12);
        assert!(r.pass);
        let r2 = PairingReport::new("x".to_string(), 1.1, 1.0, 1e-4, 1e-12);
        assert!(!r2.pass);
        // absolute floor for tiny predicted values
        let r3 = PairingReport::new("x".to_string(), 5e-13, 0.0, 1e-4, 1e-12);
        assert!(r3.pass);
    }
}
