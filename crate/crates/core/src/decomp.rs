//! Compatible/solenoidal strain decomposition: per-line weights, the
//! closed-form solenoidal kernels, and the compatible remainders tying them
//! back to the canonical singular fields.
//!
//! The solenoidal planar blocks are Hessian combinations of the potentials
//! F1 (edge) and F2 (wedge); the potentials themselves are kept as private
//! test oracles and only their hand-differentiated Hessians are exported.

use alloc::vec::Vec;

use crate::fields::{wedge_strain, SingularPoint, SINGULAR_RADIUS};
use crate::math::{SymTensor3, Vec2};
use crate::model::{DefectEnsemble, WedgeParams, Window};

/// Screw weight convention: the concentrated part of d_z(omega_z) carries
/// half the screw Burgers modulus. Fixed by matching contour jumps of the
/// reconstructed fields; recorded here because the weight enters every
/// shear-block formula.
pub const SCREW_WEIGHT_CONVENTION: &str = "c = B_z / 2 (contour-jump matching)";

/// Weights of one line in the decomposition kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineWeights {
    pub foot: Vec2,
    /// Screw weight c (shear block).
    pub c: f64,
    /// Edge weights (c_x, c_y) (first planar block). These are the
    /// effective edge charges relative to the reference point, so that the
    /// kernel sums reproduce the ensemble field exactly.
    pub c_planar: Vec2,
    /// Wedge weight C (second planar block).
    pub big_c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionWeights {
    pub lines: Vec<LineWeights>,
    /// How the screw weight was fixed; carried so reports can state it.
    pub convention: &'static str,
}

/// Windowed absolute sums of the weight families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSums {
    pub sum_c: f64,
    pub sum_c_planar: f64,
    pub sum_big_c: f64,
}

impl DecompositionWeights {
    pub fn feet(&self) -> Vec<Vec2> {
        self.lines.iter().map(|l| l.foot).collect()
    }

    /// Absolute weight sums over feet inside the window (all families are
    /// finite for finite ensembles; reported for diagnostics).
    pub fn summability(&self, window: &Window) -> WeightSums {
        let mut s = WeightSums {
            sum_c: 0.0,
            sum_c_planar: 0.0,
            sum_big_c: 0.0,
        };
        for l in &self.lines {
            if window.contains(l.foot) {
                s.sum_c += libm::fabs(l.c);
                s.sum_c_planar += l.c_planar.norm();
                s.sum_big_c += libm::fabs(l.big_c);
            }
        }
        s
    }
}

pub fn weights_from_ensemble(e: &DefectEnsemble) -> DecompositionWeights {
    DecompositionWeights {
        lines: e
            .lines
            .iter()
            .map(|l| LineWeights {
                foot: l.position,
                c: 0.5 * l.burgers.z,
                c_planar: l.effective_edge_charge(e.x0),
                big_c: l.frank_z,
            })
            .collect(),
        convention: SCREW_WEIGHT_CONVENTION,
    }
}

#[inline]
fn offset(foot: Vec2, x: Vec2) -> Result<(Vec2, f64), SingularPoint> {
    let d = x - foot;
    let r2 = d.norm_sq();
    if r2 <= SINGULAR_RADIUS * SINGULAR_RADIUS {
        return Err(SingularPoint {
            at: foot,
            distance: libm::sqrt(r2),
        });
    }
    Ok((d, r2))
}

const PI: f64 = core::f64::consts::PI;

/// First solenoidal planar block (edge weights): the Hessian combination of
/// the potential F1,
///   c_y/(4 pi r^2) [[dx(1-2dy^2/r^2), -dy(1-2dx^2/r^2)],
///                   [-dy(1-2dx^2/r^2), dx(1+2dy^2/r^2)]]
/// - c_x/(4 pi r^2) [[dy(1+2dx^2/r^2), -dx(1-2dy^2/r^2)],
///                   [-dx(1-2dy^2/r^2), dy(1-2dx^2/r^2)]].
fn solenoidal_edge_block(l: &LineWeights, x: Vec2) -> Result<SymTensor3, SingularPoint> {
    let (d, r2) = offset(l.foot, x)?;
    let mut e = SymTensor3::ZERO;
    let (dx2, dy2) = (d.x * d.x, d.y * d.y);
    if l.c_planar.y != 0.0 {
        let s = l.c_planar.y / (4.0 * PI * r2);
        e.xx += s * d.x * (1.0 - 2.0 * dy2 / r2);
        e.xy += -s * d.y * (1.0 - 2.0 * dx2 / r2);
        e.yy += s * d.x * (1.0 + 2.0 * dy2 / r2);
    }
    if l.c_planar.x != 0.0 {
        let s = -l.c_planar.x / (4.0 * PI * r2);
        e.xx += s * d.y * (1.0 + 2.0 * dx2 / r2);
        e.xy += -s * d.x * (1.0 - 2.0 * dy2 / r2);
        e.yy += s * d.y * (1.0 - 2.0 * dx2 / r2);
    }
    Ok(e)
}

/// Second solenoidal planar block (wedge weight):
///   C/(4 pi) [[log r + dy^2/r^2, -dx dy/r^2], [-dx dy/r^2, log r + dx^2/r^2]].
fn solenoidal_wedge_block(l: &LineWeights, x: Vec2) -> Result<SymTensor3, SingularPoint> {
    let (d, r2) = offset(l.foot, x)?;
    let mut e = SymTensor3::ZERO;
    if l.big_c != 0.0 {
        let s = l.big_c / (4.0 * PI);
        let log_r = 0.5 * libm::log(r2);
        e.xx = s * (log_r + d.y * d.y / r2);
        e.yy = s * (log_r + d.x * d.x / r2);
        e.xy = -s * d.x * d.y / r2;
    }
    Ok(e)
}

/// Solenoidal part of the strain: zero zz block, shear block from the
/// logarithmic potential (E_xz = -d_y F, E_yz = d_x F with
/// F = sum c log r / (2 pi)), and the two planar Hessian blocks.
pub fn solenoidal_closed_form(
    w: &DecompositionWeights,
    x: Vec2,
) -> Result<SymTensor3, SingularPoint> {
    let mut total = SymTensor3::ZERO;
    for l in &w.lines {
        let (d, r2) = offset(l.foot, x)?;
        if l.c != 0.0 {
            let s = l.c / (2.0 * PI * r2);
            total.xz += -s * d.y;
            total.yz += s * d.x;
        }
        total += solenoidal_edge_block(l, x)?;
        total += solenoidal_wedge_block(l, x)?;
    }
    Ok(total)
}

/// Compatible correction separating the first solenoidal planar block from
/// the canonical edge kernels:
///   c_y/(4 pi r^4) [[dx(dy^2+3dx^2), dy(dy^2+3dx^2)],
///                   [dy(dy^2+3dx^2), dx(-dx^2+dy^2)]]
/// - c_x/(4 pi r^4) [[dy(dx^2-dy^2), dx(dx^2+3dy^2)],
///                   [dx(dx^2+3dy^2), dy(dx^2+3dy^2)]],
/// so that edge block = canonical edge + this correction.
pub fn compatible_correction(
    w: &DecompositionWeights,
    x: Vec2,
) -> Result<SymTensor3, SingularPoint> {
    let mut total = SymTensor3::ZERO;
    for l in &w.lines {
        let (d, r2) = offset(l.foot, x)?;
        let r4 = r2 * r2;
        let (dx2, dy2) = (d.x * d.x, d.y * d.y);
        if l.c_planar.y != 0.0 {
            let s = l.c_planar.y / (4.0 * PI * r4);
            total.xx += s * d.x * (dy2 + 3.0 * dx2);
            total.xy += s * d.y * (dy2 + 3.0 * dx2);
            total.yy += s * d.x * (dy2 - dx2);
        }
        if l.c_planar.x != 0.0 {
            let s = -l.c_planar.x / (4.0 * PI * r4);
            total.xx += s * d.y * (dx2 - dy2);
            total.xy += s * d.x * (dx2 + 3.0 * dy2);
            total.yy += s * d.y * (dx2 + 3.0 * dy2);
        }
    }
    Ok(total)
}

/// Compatible part of the wedge kernel: canonical wedge strain minus the
/// second solenoidal block. Depends on the elastic constants, which the
/// solenoidal block does not.
pub fn wedge_compatible_part(
    w: &DecompositionWeights,
    params: WedgeParams,
    x: Vec2,
) -> Result<SymTensor3, SingularPoint> {
    let mut total = SymTensor3::ZERO;
    for l in &w.lines {
        if l.big_c != 0.0 {
            total += wedge_strain(l.big_c, l.foot, params, x)?;
            total += solenoidal_wedge_block(l, x)? * -1.0;
        }
    }
    Ok(total)
}

/// Full compatible remainder of the ensemble field:
/// ensemble strain = solenoidal closed form + this remainder.
/// It collects minus the edge correction and the wedge compatible part.
pub fn compatible_remainder(
    w: &DecompositionWeights,
    params: WedgeParams,
    x: Vec2,
) -> Result<SymTensor3, SingularPoint> {
    Ok(compatible_correction(w, x)? * -1.0 + wedge_compatible_part(w, params, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{edge_strain, ensemble_strain, screw_strain};
    use crate::math::Vec3;
    use crate::model::DefectLine2D;
    use crate::pairing::{pair_divergence, pair_incompatibility_of};
    use crate::quad::BumpTestFunction;
    use alloc::vec;

    fn probe_points(n: usize, seed: u64) -> Vec<Vec2> {
        // small multiplicative-congruential stream, good enough for probes
        let mut s = seed.max(1);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        (0..n).map(|_| Vec2::new(next(), next())).collect()
    }

    fn mixed_weights() -> DecompositionWeights {
        DecompositionWeights {
            lines: vec![
                LineWeights {
                    foot: Vec2::new(0.3, -0.2),
                    c: 0.4,
                    c_planar: Vec2::new(0.7, -0.3),
                    big_c: 0.9,
                },
                LineWeights {
                    foot: Vec2::new(-0.5, 0.6),
                    c: -0.2,
                    c_planar: Vec2::new(-0.1, 0.5),
                    big_c: -0.6,
                },
            ],
            convention: SCREW_WEIGHT_CONVENTION,
        }
    }

    // F1 = sum (2 log r - 1)/(8 pi) (c_y dx - c_x dy)
    fn f1_potential(w: &DecompositionWeights, x: Vec2) -> f64 {
        let mut v = 0.0;
        for l in &w.lines {
            let d = x - l.foot;
            let r = d.norm();
            v += (2.0 * libm::log(r) - 1.0) / (8.0 * PI)
                * (l.c_planar.y * d.x - l.c_planar.x * d.y);
        }
        v
    }

    // F2 = sum C r^2 (2 log r - 1) / (16 pi)
    fn f2_potential(w: &DecompositionWeights, x: Vec2) -> f64 {
        let mut v = 0.0;
        for l in &w.lines {
            let d = x - l.foot;
            let r2 = d.norm_sq();
            v += l.big_c * r2 * (2.0 * 0.5 * libm::log(r2) - 1.0) / (16.0 * PI);
        }
        v
    }

    // planar block from a potential: [[dyy F, -dxy F], [-dxy F, dxx F]]
    fn fd_hessian_block(f: impl Fn(Vec2) -> f64, x: Vec2) -> [[f64; 2]; 2] {
        let h = 1e-5;
        let dxx = (f(Vec2::new(x.x + h, x.y)) - 2.0 * f(x) + f(Vec2::new(x.x - h, x.y)))
            / (h * h);
        let dyy = (f(Vec2::new(x.x, x.y + h)) - 2.0 * f(x) + f(Vec2::new(x.x, x.y - h)))
            / (h * h);
        let dxy = (f(Vec2::new(x.x + h, x.y + h)) - f(Vec2::new(x.x + h, x.y - h))
            - f(Vec2::new(x.x - h, x.y + h))
            + f(Vec2::new(x.x - h, x.y - h)))
            / (4.0 * h * h);
        [[dyy, -dxy], [-dxy, dxx]]
    }

    #[test]
    fn edge_block_matches_f1_hessian() {
        let w = mixed_weights();
        for x in probe_points(15, 7) {
            if w.lines.iter().any(|l| (x - l.foot).norm() < 0.3) {
                continue;
            }
            let only_edges = DecompositionWeights {
                lines: w
                    .lines
                    .iter()
                    .map(|l| LineWeights { c: 0.0, big_c: 0.0, ..*l })
                    .collect(),
                convention: w.convention,
            };
            let e = solenoidal_closed_form(&only_edges, x).unwrap();
            let h = fd_hessian_block(|p| f1_potential(&w, p), x);
            let scale = e.max_abs().max(1.0);
            assert!((e.xx - h[0][0]).abs() < 1e-5 * scale, "{} vs {}", e.xx, h[0][0]);
            assert!((e.xy - h[0][1]).abs() < 1e-5 * scale);
            assert!((e.yy - h[1][1]).abs() < 1e-5 * scale);
        }
    }

    #[test]
    fn wedge_block_matches_f2_hessian() {
        let w = mixed_weights();
        for x in probe_points(15, 11) {
            if w.lines.iter().any(|l| (x - l.foot).norm() < 0.3) {
                continue;
            }
            let only_wedges = DecompositionWeights {
                lines: w
                    .lines
                    .iter()
                    .map(|l| LineWeights { c: 0.0, c_planar: Vec2::ZERO, ..*l })
                    .collect(),
                convention: w.convention,
            };
            let e = solenoidal_closed_form(&only_wedges, x).unwrap();
            let h = fd_hessian_block(|p| f2_potential(&w, p), x);
            let scale = e.max_abs().max(1.0);
            assert!((e.xx - h[0][0]).abs() < 1e-5 * scale, "{} vs {}", e.xx, h[0][0]);
            assert!((e.xy - h[0][1]).abs() < 1e-5 * scale);
            assert!((e.yy - h[1][1]).abs() < 1e-5 * scale);
        }
    }

    #[test]
    fn wedge_block_derived_value() {
        // C = 4 pi at foot (1,0), probe (2,0): r = 1, theta = 0
        // -> diag(log 1 + 0, log 1 + 1) = diag(0, 1)
        let w = DecompositionWeights {
            lines: vec![LineWeights {
                foot: Vec2::new(1.0, 0.0),
                c: 0.0,
                c_planar: Vec2::ZERO,
                big_c: 4.0 * PI,
            }],
            convention: SCREW_WEIGHT_CONVENTION,
        };
        let e = solenoidal_closed_form(&w, Vec2::new(2.0, 0.0)).unwrap();
        assert!((e.xx - 0.0).abs() < 1e-14);
        assert!((e.yy - 1.0).abs() < 1e-14);
        assert!(e.xy.abs() < 1e-14);
    }

    #[test]
    fn edge_block_equals_canonical_plus_correction() {
        let w = mixed_weights();
        let only_edges = DecompositionWeights {
            lines: w
                .lines
                .iter()
                .map(|l| LineWeights { c: 0.0, big_c: 0.0, ..*l })
                .collect(),
            convention: w.convention,
        };
        for x in probe_points(20, 3) {
            if w.lines.iter().any(|l| (x - l.foot).norm() < 1e-3) {
                continue;
            }
            let block = solenoidal_closed_form(&only_edges, x).unwrap();
            let mut canonical = SymTensor3::ZERO;
            for l in &w.lines {
                canonical += edge_strain(l.c_planar, l.foot, x).unwrap();
            }
            let sum = canonical + compatible_correction(&w, x).unwrap();
            let d = block - sum;
            assert!(d.max_abs() <= 1e-12 * block.max_abs().max(1.0), "{:?}", d);
        }
    }

    #[test]
    fn shear_block_is_screw_with_half_weight() {
        let foot = Vec2::new(0.2, 0.1);
        let b_z = 1.7;
        let w = DecompositionWeights {
            lines: vec![LineWeights {
                foot,
                c: 0.5 * b_z,
                c_planar: Vec2::ZERO,
                big_c: 0.0,
            }],
            convention: SCREW_WEIGHT_CONVENTION,
        };
        for x in probe_points(10, 5) {
            if (x - foot).norm() < 1e-3 {
                continue;
            }
            let s = solenoidal_closed_form(&w, x).unwrap();
            let canonical = screw_strain(b_z, foot, x).unwrap();
            assert!((s - canonical).max_abs() < 1e-15);
        }
    }

    fn mixed_ensemble() -> DefectEnsemble {
        DefectEnsemble::new(
            vec![
                DefectLine2D {
                    position: Vec2::new(0.3, -0.2),
                    burgers: Vec3::new(0.7, -0.3, 0.8),
                    frank_z: 0.9,
                },
                DefectLine2D::wedge(Vec2::new(-0.5, 0.6), -0.6),
                DefectLine2D::edge(Vec2::new(0.8, 0.9), -0.1, 0.5),
            ],
            Vec2::new(1.5, -1.2),
        )
    }

    #[test]
    fn reassembly_identity() {
        let e = mixed_ensemble();
        let w = weights_from_ensemble(&e);
        for x in probe_points(50, 17) {
            if e.distance_to_lines(x) < 1e-3 {
                continue;
            }
            let full = ensemble_strain(&e, x).unwrap();
            let rebuilt = solenoidal_closed_form(&w, x).unwrap()
                + compatible_remainder(&w, e.wedge_params, x).unwrap();
            let d = full - rebuilt;
            assert!(
                d.max_abs() <= 1e-10 * full.max_abs().max(1.0),
                "at {:?}: {:?}",
                x,
                d
            );
        }
    }

    #[test]
    fn solenoidal_part_is_divergence_free() {
        let e = mixed_ensemble();
        let w = weights_from_ensemble(&e);
        let feet = w.feet();
        let phi = BumpTestFunction::new(Vec2::new(0.1, 0.1), 1.4, 1.0);
        for m in 0..3 {
            let v = pair_divergence(
                |x| solenoidal_closed_form(&w, x).ok(),
                &feet,
                &phi,
                m,
            )
            .unwrap();
            assert!(v.abs() <= 1e-4, "m={m}: {v}");
        }
    }

    #[test]
    fn compatible_parts_have_zero_incompatibility() {
        let e = mixed_ensemble();
        let w = weights_from_ensemble(&e);
        let feet = w.feet();
        // bump straddling the first two lines
        let phi = BumpTestFunction::new(Vec2::new(-0.1, 0.2), 1.2, 1.0);
        for k in 0..3 {
            let corr = pair_incompatibility_of(
                |x| compatible_correction(&w, x).ok(),
                &feet,
                &phi,
                k,
            )
            .unwrap();
            assert!(corr.abs() <= 1e-4, "correction k={k}: {corr}");
            let rem = pair_incompatibility_of(
                |x| compatible_remainder(&w, e.wedge_params, x).ok(),
                &feet,
                &phi,
                k,
            )
            .unwrap();
            assert!(rem.abs() <= 1e-4, "remainder k={k}: {rem}");
        }
    }

    #[test]
    fn solenoidal_part_carries_all_incompatibility() {
        // incompatibility of the solenoidal part equals that of the full field
        let e = mixed_ensemble();
        let w = weights_from_ensemble(&e);
        let feet = w.feet();
        let phi = BumpTestFunction::new(Vec2::new(0.25, -0.1), 1.0, 0.8);
        for k in 0..3 {
            let sol = pair_incompatibility_of(
                |x| solenoidal_closed_form(&w, x).ok(),
                &feet,
                &phi,
                k,
            )
            .unwrap();
            let full = crate::pairing::pair_incompatibility(&e, &phi, k).unwrap();
            assert!((sol - full).abs() <= 1e-4 * full.abs().max(1.0), "k={k}: {sol} vs {full}");
        }
    }

    #[test]
    fn weights_and_summability() {
        let e = mixed_ensemble();
        let w = weights_from_ensemble(&e);
        assert_eq!(w.lines.len(), 3);
        assert_eq!(w.lines[0].c, 0.4);
        assert_eq!(w.lines[0].big_c, 0.9);
        assert_eq!(
            w.lines[0].c_planar,
            e.lines[0].effective_edge_charge(e.x0)
        );
        assert_eq!(w.convention, SCREW_WEIGHT_CONVENTION);
        // pure edge line: planar weights are the declared Burgers components
        assert_eq!(w.lines[2].c_planar, Vec2::new(-0.1, 0.5));
        let all = w.summability(&Window::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0)));
        assert!(all.sum_c > 0.0 && all.sum_big_c == 0.9 + 0.6);
        let none = w.summability(&Window::new(Vec2::new(5.0, 5.0), Vec2::new(6.0, 6.0)));
        assert_eq!(none.sum_c, 0.0);
    }

    #[test]
    fn singular_point_rejection() {
        let w = mixed_weights();
        assert!(solenoidal_closed_form(&w, w.lines[0].foot).is_err());
        assert!(compatible_correction(&w, w.lines[1].foot).is_err());
    }
}
