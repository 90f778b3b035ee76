//! Distributional pairings: Frank tensor and incompatibility evaluated
//! against test functions by singular quadrature, finite parts, and the
//! concentrated predictions they must match.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dist::{planar_curl, ConcentratedDistribution2D, PairingReport};
use crate::fields::{ensemble_strain, frank_tensor_field};
use crate::math::{eps2, eps3, pairwise_sum, Vec2, X, Y, Z};
use crate::model::{CompatibilityConstants, DefectDensities, DefectEnsemble, Window};
use crate::quad::{
    integrate_rect, BumpTestFunction, QuadError, QuadOptions, SingularSpec, TestFunction2D,
};

/// Quadrature options tuned for pairings: the integrand vanishes outside the
/// test-function support, and singular boxes scale with the support radius.
fn pairing_opts(phi: &dyn TestFunction2D) -> QuadOptions {
    let (_, radius) = phi.support();
    QuadOptions {
        split_scale: radius,
        zero_outside: true,
        // pairings frequently evaluate to exactly zero; chasing the default
        // 1e-12 absolute target there would exhaust the cell budget while
        // the pass thresholds sit at 1e-6. Both targets keep >= 30x margin
        // below the tightest threshold (1e-6 abs, 1e-4 rel)
        tol_rel: 3e-7,
        tol_abs: 3e-8,
        ..QuadOptions::default()
    }
}

fn support_window(phi: &dyn TestFunction2D) -> Window {
    let (c, r) = phi.support();
    Window::new(Vec2::new(c.x - r, c.y - r), Vec2::new(c.x + r, c.y + r))
}

fn line_singularities(e: &DefectEnsemble) -> Vec<SingularSpec> {
    e.lines
        .iter()
        .map(|l| SingularSpec::integrable(l.position))
        .collect()
}

/// <d_m omega_k, phi> := -int eps_kpq E_qm d_p(phi) dA (2D slice).
///
/// The integrand has integrable (1/r, log r) singularities at the line feet;
/// evaluation points landing inside the rejection radius of a foot are
/// treated as zero — their cells contribute O(1e-12) for integrable kernels.
pub fn pair_frank_tensor(
    e: &DefectEnsemble,
    phi: &dyn TestFunction2D,
    m: usize,
    k: usize,
) -> Result<f64, QuadError> {
    let integrand = |x: Vec2| -> f64 {
        let Ok(strain) = ensemble_strain(e, x) else {
            return 0.0;
        };
        let g = phi.grad(x);
        let mut v = 0.0;
        for p in 0..2 {
            for q in 0..3 {
                let c = eps3(k, p, q);
                if c != 0.0 {
                    v -= c * strain.get(q, m) * g.get(p);
                }
            }
        }
        v
    };
    let q = integrate_rect(
        integrand,
        support_window(phi),
        &line_singularities(e),
        &pairing_opts(phi),
    )?;
    Ok(q.value)
}

/// Finite-part evaluation of the same pairing at each epsilon:
/// int_{outside eps-discs} eps_kpq d_p(E_qm) phi dA
/// + sum over feet of the circle integral of eps_kpq E_qm phi nu_p eps dtheta
/// with nu the outward radial from the foot. Converges to pair_frank_tensor.
pub fn pair_frank_tensor_fp(
    e: &DefectEnsemble,
    phi: &dyn TestFunction2D,
    m: usize,
    k: usize,
    eps_sequence: &[f64],
) -> Result<Vec<f64>, QuadError> {
    let mut out = Vec::with_capacity(eps_sequence.len());
    for &eps in eps_sequence {
        if !(eps > 0.0) {
            return Err(QuadError::Geometry(String::from(
                "finite-part epsilon must be positive",
            )));
        }
        let singular: Vec<SingularSpec> = e
            .lines
            .iter()
            .map(|l| SingularSpec {
                point: l.position,
                exclusion: eps,
            })
            .collect();
        let region = integrate_rect(
            |x| {
                let Ok(frank) = frank_tensor_field(e, x) else {
                    return 0.0;
                };
                frank.get(m, k) * phi.value(x)
            },
            support_window(phi),
            &singular,
            &pairing_opts(phi),
        )?
        .value;

        let mut boundary = 0.0;
        for l in &e.lines {
            boundary += tube_boundary_term(e, l.position, eps, phi, m, k)?;
        }
        out.push(region + boundary);
    }
    Ok(out)
}

/// Circle integral around one foot by trapezoid doubling (periodic, hence
/// spectrally accurate).
fn tube_boundary_term(
    e: &DefectEnsemble,
    foot: Vec2,
    eps: f64,
    phi: &dyn TestFunction2D,
    m: usize,
    k: usize,
) -> Result<f64, QuadError> {
    let sample = |theta: f64| -> f64 {
        let nu = Vec2::new(libm::cos(theta), libm::sin(theta));
        let x = foot + nu * eps;
        let strain = match ensemble_strain(e, x) {
            Ok(s) => s,
            Err(_) => return 0.0,
        };
        let mut v = 0.0;
        for p in 0..2 {
            for q in 0..3 {
                let c = eps3(k, p, q);
                if c != 0.0 {
                    v += c * strain.get(q, m) * nu.get(p);
                }
            }
        }
        v * phi.value(x) * eps
    };
    let two_pi = 2.0 * core::f64::consts::PI;
    let eval = |n: usize| -> f64 {
        let mut terms: Vec<f64> = (0..n).map(|i| sample(two_pi * i as f64 / n as f64)).collect();
        pairwise_sum(&mut terms) * two_pi / n as f64
    };
    let mut n = 64;
    let mut prev = eval(n);
    for _ in 0..12 {
        n *= 2;
        let cur = eval(n);
        if libm::fabs(cur - prev) <= 1e-10 * libm::fabs(cur).max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(QuadError::Geometry(format!(
        "tube boundary integral did not converge at eps = {eps}"
    )))
}

/// <eta_k, phi> = int eps_kpn eps_ab E_bn d_p d_a(phi) dA (2D slice).
pub fn pair_incompatibility(
    e: &DefectEnsemble,
    phi: &dyn TestFunction2D,
    k: usize,
) -> Result<f64, QuadError> {
    let feet = e.line_feet();
    pair_incompatibility_of(|x| ensemble_strain(e, x).ok(), &feet, phi, k)
}

/// Incompatibility pairing of an arbitrary symmetric field with integrable
/// singularities at the given feet.
pub fn pair_incompatibility_of<F>(
    field: F,
    feet: &[Vec2],
    phi: &dyn TestFunction2D,
    k: usize,
) -> Result<f64, QuadError>
where
    F: Fn(Vec2) -> Option<crate::math::SymTensor3>,
{
    let integrand = |x: Vec2| -> f64 {
        let Some(strain) = field(x) else {
            return 0.0;
        };
        let h = phi.hessian(x);
        let mut v = 0.0;
        for p in 0..2 {
            for n in 0..3 {
                let c1 = eps3(k, p, n);
                if c1 == 0.0 {
                    continue;
                }
                for a in 0..2 {
                    for b in 0..2 {
                        let c2 = eps2(a, b);
                        if c2 != 0.0 {
                            v += c1 * c2 * strain.get(b, n) * h[p][a];
                        }
                    }
                }
            }
        }
        v
    };
    let singular: Vec<SingularSpec> = feet
        .iter()
        .map(|&p| SingularSpec::integrable(p))
        .collect();
    let q = integrate_rect(integrand, support_window(phi), &singular, &pairing_opts(phi))?;
    Ok(q.value)
}

/// Closed-form concentrated incompatibility, one distribution per component:
/// eta_z = sum over lines of Omega_z delta
///         + eps_ac (B_c + eps_bc (x_b - x0_b) Omega_z) d_a(delta),
/// eta_kappa = (1/2) eps_ka B_z d_a(delta) for planar kappa.
pub fn predicted_incompatibility(e: &DefectEnsemble) -> [ConcentratedDistribution2D; 3] {
    let mut eta: [ConcentratedDistribution2D; 3] = Default::default();
    for l in &e.lines {
        let p = l.position;
        // planar components
        for kappa in 0..2 {
            if l.burgers.z != 0.0 {
                let mut w1 = Vec2::ZERO;
                for a in 0..2 {
                    let c = 0.5 * eps2(kappa, a) * l.burgers.z;
                    if a == X {
                        w1.x = c;
                    } else {
                        w1.y = c;
                    }
                }
                eta[kappa].push_dipole(p, w1);
            }
        }
        // axial component
        if l.frank_z != 0.0 {
            eta[Z].push_mass(p, l.frank_z);
        }
        let mut w1 = Vec2::ZERO;
        for a in 0..2 {
            let mut c = 0.0;
            for g in 0..2 {
                let mut bg = l.burgers.get(g);
                for b in 0..2 {
                    bg += eps2(b, g) * (p.get(b) - e.x0.get(b)) * l.frank_z;
                }
                c += eps2(a, g) * bg;
            }
            if a == X {
                w1.x = c;
            } else {
                w1.y = c;
            }
        }
        if w1 != Vec2::ZERO {
            eta[Z].push_dipole(p, w1);
        }
    }
    [
        eta[0].compacted(),
        eta[1].compacted(),
        eta[2].compacted(),
    ]
}

/// The same incompatibility assembled through the contortion identity
/// eta_k = delta_zk Theta_z + eps_ab d_a(kappa_kb), symbolically.
pub fn incompatibility_via_contortion(d: &DefectDensities) -> [ConcentratedDistribution2D; 3] {
    let mut out: [ConcentratedDistribution2D; 3] = Default::default();
    for k in 0..3 {
        let mut acc = planar_curl(&d.kappa[k][X], &d.kappa[k][Y]);
        if k == Z {
            acc = acc.add(&d.theta_z);
        }
        out[k] = acc.compacted();
    }
    out
}

/// Quadrature-vs-prediction comparison of the incompatibility for each test
/// function and component. Quadrature failures yield inconclusive entries.
pub fn verify_main_theorem(
    e: &DefectEnsemble,
    suite: &[BumpTestFunction],
    tol: f64,
) -> Vec<PairingReport> {
    let tol_abs = 1e-6;
    let predicted = predicted_incompatibility(e);
    let mut reports = Vec::with_capacity(suite.len() * 3);
    for (i, phi) in suite.iter().enumerate() {
        for k in 0..3 {
            let label = format!("incompatibility[bump {i}][k={k}]");
            let rhs = predicted[k].action(phi);
            match pair_incompatibility(e, phi, k) {
                Ok(lhs) => reports.push(PairingReport::new(label, lhs, rhs, tol, tol_abs)),
                Err(_) => reports.push(PairingReport::inconclusive(label)),
            }
        }
    }
    reports
}

/// Distributional divergence action: -int field_mn d_n(phi) dA with the
/// z-derivative dropped (fields are z-independent).
pub fn pair_divergence<F>(
    field: F,
    feet: &[Vec2],
    phi: &dyn TestFunction2D,
    m: usize,
) -> Result<f64, QuadError>
where
    F: Fn(Vec2) -> Option<crate::math::SymTensor3>,
{
    let integrand = |x: Vec2| -> f64 {
        let Some(t) = field(x) else { return 0.0 };
        let g = phi.grad(x);
        -(t.get(m, X) * g.x + t.get(m, Y) * g.y)
    };
    let singular: Vec<SingularSpec> = feet
        .iter()
        .map(|&p| SingularSpec::integrable(p))
        .collect();
    let q = integrate_rect(integrand, support_window(phi), &singular, &pairing_opts(phi))?;
    Ok(q.value)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompatibilityError {
    /// Sampled curl values disagree: the field is not 2D-compatible.
    Inconsistent { max_spread: f64 },
    /// Fewer than three samples, or a sample on a line.
    BadSamples(String),
}

impl core::fmt::Display for CompatibilityError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CompatibilityError::Inconsistent { max_spread } => {
                write!(f, "curl samples disagree (spread {max_spread})")
            }
            CompatibilityError::BadSamples(m) => write!(f, "bad samples: {m}"),
        }
    }
}

/// Generic fit of the 2D compatibility constants from pointwise samples of
/// eps_ab d_a(E_bz) (must be constant) and E_zz (must be affine).
pub fn compatibility_constants_of<KF, ZF>(
    curl_shear: KF,
    e_zz: ZF,
    samples: &[Vec2],
) -> Result<CompatibilityConstants, CompatibilityError>
where
    KF: Fn(Vec2) -> f64,
    ZF: Fn(Vec2) -> f64,
{
    if samples.len() < 3 {
        return Err(CompatibilityError::BadSamples(String::from(
            "need at least three samples",
        )));
    }
    let ks: Vec<f64> = samples.iter().map(|&p| curl_shear(p)).collect();
    let k_mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let spread = ks
        .iter()
        .map(|v| libm::fabs(v - k_mean))
        .fold(0.0f64, f64::max);
    let scale = ks.iter().map(|v| libm::fabs(*v)).fold(1.0f64, f64::max);
    if spread > 1e-8 * scale {
        return Err(CompatibilityError::Inconsistent { max_spread: spread });
    }

    // least squares for E_zz = a.x + b: normal equations in (a_x, a_y, b)
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &p in samples {
        let basis = [p.x, p.y, 1.0];
        let z = e_zz(p);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * z;
        }
    }
    let sol = solve3(m, rhs).ok_or_else(|| {
        CompatibilityError::BadSamples(String::from("degenerate sample geometry"))
    })?;
    // fit must be exact (affine data): check residuals
    let zscale = samples
        .iter()
        .map(|&p| libm::fabs(e_zz(p)))
        .fold(1.0f64, f64::max);
    for &p in samples {
        let r = e_zz(p) - (sol[0] * p.x + sol[1] * p.y + sol[2]);
        if libm::fabs(r) > 1e-8 * zscale {
            return Err(CompatibilityError::Inconsistent {
                max_spread: libm::fabs(r),
            });
        }
    }
    Ok(CompatibilityConstants {
        k: k_mean,
        a: Vec2::new(sol[0], sol[1]),
        b: sol[2],
    })
}

/// Compatibility constants of an ensemble's canonical field: the analytic
/// curl of the shear column is the (z,z) Frank component, and E_zz = 0.
pub fn compatibility_constants(
    e: &DefectEnsemble,
    samples: &[Vec2],
) -> Result<CompatibilityConstants, CompatibilityError> {
    for &p in samples {
        if e.distance_to_lines(p) <= crate::fields::SINGULAR_RADIUS {
            return Err(CompatibilityError::BadSamples(String::from(
                "sample on a defect line",
            )));
        }
    }
    compatibility_constants_of(
        |p| frank_tensor_field(e, p).map(|f| f.get(Z, Z)).unwrap_or(f64::NAN),
        |_| 0.0,
        samples,
    )
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if libm::fabs(m[r][col]) > libm::fabs(m[piv][col]) {
                piv = r;
            }
        }
        if libm::fabs(m[piv][col]) < 1e-14 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut s = b[i];
        for j in i + 1..3 {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        canonical_edge, canonical_screw, canonical_wedge, densities_from_ensemble,
        transform_reference_point, DefectEnsemble, DefectLine2D,
    };
    use alloc::vec;

    fn bump(cx: f64, cy: f64, r: f64) -> BumpTestFunction {
        BumpTestFunction::new(Vec2::new(cx, cy), r, 1.0)
    }

    #[test]
    fn frank_pairing_screw_zz() {
        // <d_z omega_z, phi> = (B_z/2) phi(0)
        let b_z = 1.3;
        let e = canonical_screw(b_z);
        let phi = bump(0.1, -0.2, 1.0);
        let v = pair_frank_tensor(&e, &phi, Z, Z).unwrap();
        let expected = 0.5 * b_z * phi.value(Vec2::ZERO);
        assert!(
            (v - expected).abs() <= 1e-6 * expected.abs(),
            "{v} vs {expected}"
        );
    }

    #[test]
    fn frank_pairing_away_from_lines_matches_regular_part() {
        // phi supported off the line: the pairing equals the smooth-field
        // integral int (d_m omega_k) phi dA (integration by parts is exact)
        let e = canonical_screw(0.8);
        let phi = bump(3.0, 0.0, 0.7);
        for (m, k) in [(X, X), (Y, Y), (X, Y), (Z, Z)] {
            let v = pair_frank_tensor(&e, &phi, m, k).unwrap();
            let direct = integrate_rect(
                |x| frank_tensor_field(&e, x).unwrap().get(m, k) * phi.value(x),
                support_window(&phi),
                &[],
                &pairing_opts(&phi),
            )
            .unwrap()
            .value;
            assert!((v - direct).abs() < 1e-8, "({m},{k}): {v} vs {direct}");
        }
    }

    #[test]
    fn frank_pairing_edge_away_is_zero() {
        let e = canonical_edge(1.0);
        let phi = bump(3.0, 3.0, 0.5);
        let v = pair_frank_tensor(&e, &phi, X, Z).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn finite_part_converges_to_pairing() {
        let e = canonical_screw(1.0);
        let phi = bump(0.0, 0.0, 1.2);
        let exact = pair_frank_tensor(&e, &phi, X, X).unwrap();
        let fps = pair_frank_tensor_fp(&e, &phi, X, X, &[0.1, 0.05, 0.025]).unwrap();
        let errs: Vec<f64> = fps.iter().map(|v| (v - exact).abs()).collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        assert!(errs[2] < 1e-3, "{errs:?}");
    }

    #[test]
    fn finite_part_wedge_xz() {
        let e = canonical_wedge(0.9);
        let phi = bump(0.2, 0.1, 1.0);
        let exact = pair_frank_tensor(&e, &phi, X, Z).unwrap();
        let fps = pair_frank_tensor_fp(&e, &phi, X, Z, &[1e-1, 1e-2, 1e-3]).unwrap();
        let errs: Vec<f64> = fps.iter().map(|v| (v - exact).abs()).collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        assert!(errs[2] <= 1e-6, "{errs:?}");
    }

    #[test]
    fn incompatibility_wedge_mass() {
        // a line whose declared Burgers vector compensates the moment arm
        // (effective edge charge zero) carries the bare wedge field, so
        // <eta_z, phi> = Omega_z phi(foot) with no dipole term
        let omega = 2.0;
        let x0 = Vec2::new(1.0, 0.0);
        let line = crate::model::DefectLine2D {
            position: Vec2::ZERO,
            burgers: crate::math::Vec3::new(0.0, omega, 0.0),
            frank_z: omega,
        };
        assert_eq!(line.effective_edge_charge(x0), Vec2::ZERO);
        let e = DefectEnsemble::new(alloc::vec![line], x0);
        let phi = bump(0.3, 0.0, 1.1);
        let v = pair_incompatibility(&e, &phi, Z).unwrap();
        let expected = omega * phi.value(Vec2::ZERO);
        assert!((v - expected).abs() <= 1e-4 * expected.abs(), "{v} vs {expected}");
    }

    #[test]
    fn incompatibility_wedge_with_offset_reference() {
        // wedge with declared B = 0 and x0 off the foot: quadrature of the
        // superposed field matches the predicted mass + dipole
        let omega = 1.5;
        let e = canonical_wedge(omega);
        let phi = bump(0.3, 0.0, 1.1);
        let predicted = predicted_incompatibility(&e);
        let expected = predicted[Z].action(&phi);
        let v = pair_incompatibility(&e, &phi, Z).unwrap();
        assert!(
            (v - expected).abs() <= 1e-4 * expected.abs().max(1e-2),
            "{v} vs {expected}"
        );
    }

    #[test]
    fn incompatibility_edge_dipole() {
        // <eta_z, phi> = -B_y d_x(phi)(foot)
        let b_y = 0.7;
        let e = canonical_edge(b_y);
        let phi = bump(0.25, -0.15, 1.0);
        let v = pair_incompatibility(&e, &phi, Z).unwrap();
        let expected = -b_y * phi.grad(Vec2::ZERO).x;
        assert!(
            (v - expected).abs() <= 1e-4 * expected.abs().max(1e-2),
            "{v} vs {expected}"
        );
    }

    #[test]
    fn incompatibility_away_from_lines_vanishes() {
        let e = canonical_screw(1.0);
        let phi = bump(4.0, 4.0, 1.0);
        for k in 0..3 {
            let v = pair_incompatibility(&e, &phi, k).unwrap();
            assert!(v.abs() < 1e-10, "k={k}: {v}");
        }
    }

    #[test]
    fn predicted_screw_matches_hand_form() {
        // eta_x = (B_z/2) d_y delta, eta_y = -(B_z/2) d_x delta, eta_z = 0
        let e = canonical_screw(2.0);
        let eta = predicted_incompatibility(&e);
        assert_eq!(eta[X].terms().len(), 1);
        assert_eq!(eta[X].terms()[0].w1, Vec2::new(0.0, 1.0));
        assert_eq!(eta[Y].terms()[0].w1, Vec2::new(-1.0, 0.0));
        assert!(eta[Z].terms().is_empty());
    }

    #[test]
    fn predicted_wedge_with_foot_reference() {
        // x0 at the foot: eta_z = Omega delta only
        let e = DefectEnsemble::new(
            vec![DefectLine2D::wedge(Vec2::new(1.0, 1.0), 3.0)],
            Vec2::new(1.0, 1.0 + 1e-3),
        );
        // reference point just off the foot: dipole weight is eps*Omega
        let eta = predicted_incompatibility(&e);
        assert_eq!(eta[Z].terms()[0].w0, 3.0);
        assert!(eta[Z].terms()[0].w1.norm() < 1e-2);
        assert!(eta[X].terms().is_empty() && eta[Y].terms().is_empty());
    }

    #[test]
    fn contortion_identity_coefficients() {
        let e = DefectEnsemble::new(
            vec![
                DefectLine2D {
                    position: Vec2::new(0.4, -0.3),
                    burgers: crate::math::Vec3::new(0.2, -0.5, 0.9),
                    frank_z: 0.7,
                },
                DefectLine2D::wedge(Vec2::new(-1.0, 0.8), -1.2),
                DefectLine2D::edge(Vec2::new(1.5, 1.5), 0.3, -0.4),
            ],
            Vec2::new(2.0, -2.0),
        );
        let predicted = predicted_incompatibility(&e);
        let via = incompatibility_via_contortion(&densities_from_ensemble(&e).unwrap());
        for k in 0..3 {
            let d = predicted[k].max_coefficient_difference(&via[k]);
            assert!(d <= 1e-14, "k={k}: diff {d}");
        }
    }

    #[test]
    fn main_theorem_canonical_screw() {
        let e = canonical_screw(1.0);
        let suite = vec![bump(0.0, 0.0, 1.0), bump(0.3, -0.2, 0.8)];
        let reports = verify_main_theorem(&e, &suite, 1e-4);
        for r in &reports {
            assert!(r.pass, "{}: {} vs {}", r.label, r.quadrature_value, r.predicted_value);
        }
    }

    #[test]
    fn main_theorem_detects_corruption() {
        let e = canonical_wedge(1.0);
        let phi = bump(0.0, 0.1, 1.0);
        let lhs = pair_incompatibility(&e, &phi, Z).unwrap();
        let rhs = predicted_incompatibility(&e)[Z].action(&phi) * 2.0; // corrupted
        let r = PairingReport::new(String::from("corrupt"), lhs, rhs, 1e-4, 1e-6);
        assert!(!r.pass);
    }

    #[test]
    fn pure_dislocation_prediction_is_x0_invariant() {
        let e = DefectEnsemble::new(
            vec![
                DefectLine2D::screw(Vec2::new(0.3, 0.4), 0.8),
                DefectLine2D::edge(Vec2::new(-0.5, 0.2), 0.4, -0.6),
            ],
            Vec2::new(2.0, 2.0),
        );
        let e2 = transform_reference_point(&e, Vec2::new(-3.0, 1.0)).unwrap();
        let a = predicted_incompatibility(&e);
        let b = predicted_incompatibility(&e2);
        for k in 0..3 {
            assert!(a[k].max_coefficient_difference(&b[k]) <= 1e-14);
        }
    }

    #[test]
    fn divergence_of_solenoidal_screw_shear() {
        let e = canonical_screw(1.0);
        let phi = bump(0.1, 0.2, 1.0);
        let feet = e.line_feet();
        for m in 0..3 {
            let v = pair_divergence(
                |x| ensemble_strain(&e, x).ok(),
                &feet,
                &phi,
                m,
            )
            .unwrap();
            assert!(v.abs() <= 1e-6, "m={m}: {v}");
        }
    }

    #[test]
    fn divergence_detects_non_solenoidal_field() {
        // field_xx = x: -int x d_x(phi) = +int phi > 0
        let phi = bump(0.0, 0.0, 1.0);
        let v = pair_divergence(
            |x| {
                let mut t = crate::math::SymTensor3::ZERO;
                t.xx = x.x;
                Some(t)
            },
            &[],
            &phi,
            X,
        )
        .unwrap();
        let mass = integrate_rect(
            |x| phi.value(x),
            support_window(&phi),
            &[],
            &QuadOptions::default(),
        )
        .unwrap()
        .value;
        assert!((v - mass).abs() < 1e-8, "{v} vs {mass}");
    }

    #[test]
    fn compatibility_constants_canonical() {
        let e = DefectEnsemble::new(
            vec![
                DefectLine2D::screw(Vec2::new(0.0, 0.0), 1.0),
                DefectLine2D::wedge(Vec2::new(1.0, 0.5), 0.5),
            ],
            Vec2::new(-1.0, -1.0),
        );
        let samples: Vec<Vec2> = (0..20)
            .map(|i| {
                let t = i as f64 * 0.43;
                Vec2::new(2.0 * libm::cos(t) + 0.1, 2.0 * libm::sin(t) + 0.2)
            })
            .collect();
        let c = compatibility_constants(&e, &samples).unwrap();
        assert!(c.k.abs() < 1e-10);
        assert_eq!(c.a, Vec2::ZERO);
        assert_eq!(c.b, 0.0);
    }

    #[test]
    fn compatibility_constants_affine_ezz() {
        let samples: Vec<Vec2> = (0..10)
            .map(|i| Vec2::new((i % 4) as f64 * 0.7 - 1.0, (i / 4) as f64 * 0.9 - 1.0))
            .collect();
        let c = compatibility_constants_of(|_| 0.0, |p| 2.0 * p.x + 1.0, &samples).unwrap();
        assert!((c.a.x - 2.0).abs() < 1e-10);
        assert!(c.a.y.abs() < 1e-10);
        assert!((c.b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn compatibility_constants_detects_varying_curl() {
        let samples: Vec<Vec2> = (0..10)
            .map(|i| Vec2::new(i as f64 * 0.3, 0.5))
            .collect();
        let r = compatibility_constants_of(|p| p.x, |_| 0.0, &samples);
        assert!(matches!(r, Err(CompatibilityError::Inconsistent { .. })));
    }
}
