//! Field sampling over rectangular windows, serialized as CSV
//! (comma-separated, '.' decimal, header row, LF endings, 17 significant
//! digits so values round-trip exactly).

use mesodefect_core::decomp::{compatible_remainder, solenoidal_closed_form, weights_from_ensemble};
use mesodefect_core::fields::{ensemble_strain, frank_tensor_field};
use mesodefect_core::math::{SymTensor3, Vec2};
use mesodefect_core::model::{DefectEnsemble, Window};

/// Grid nodes closer than this to a line foot are emitted as empty cells.
pub const BLANK_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleWhat {
    Strain,
    Frank,
    Solenoidal,
    Remainder,
}

impl SampleWhat {
    pub fn parse(s: &str) -> Option<SampleWhat> {
        match s {
            "strain" => Some(SampleWhat::Strain),
            "frank" => Some(SampleWhat::Frank),
            "solenoidal" => Some(SampleWhat::Solenoidal),
            "remainder" => Some(SampleWhat::Remainder),
            _ => None,
        }
    }

    fn header(self) -> &'static str {
        match self {
            SampleWhat::Strain => "E_xx,E_yy,E_zz,E_yz,E_xz,E_xy",
            SampleWhat::Frank => {
                "dx_wx,dx_wy,dx_wz,dy_wx,dy_wy,dy_wz,dz_wx,dz_wy,dz_wz"
            }
            SampleWhat::Solenoidal => "Es_xx,Es_yy,Es_zz,Es_yz,Es_xz,Es_xy",
            SampleWhat::Remainder => "Ec_xx,Ec_yy,Ec_zz,Ec_yz,Ec_xz,Ec_xy",
        }
    }
}

#[derive(Debug)]
pub enum SampleError {
    ZeroAreaWindow,
    ZeroResolution,
}

impl std::fmt::Display for SampleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleError::ZeroAreaWindow => write!(f, "sample window has zero area"),
            SampleError::ZeroResolution => write!(f, "resolution must be at least 1"),
        }
    }
}

impl std::error::Error for SampleError {}

/// 17 significant digits; round-trip exact for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn tensor_cells(t: SymTensor3) -> String {
    [t.xx, t.yy, t.zz, t.yz, t.xz, t.xy]
        .map(fmt_f64)
        .join(",")
}

fn empty_cells(n: usize) -> String {
    vec![""; n].join(",")
}

/// Samples the requested field on an inclusive res x res grid over the
/// window and returns the CSV text.
pub fn sample_csv(
    e: &DefectEnsemble,
    window: Window,
    res: usize,
    what: SampleWhat,
) -> Result<String, SampleError> {
    if res == 0 {
        return Err(SampleError::ZeroResolution);
    }
    let span = window.max - window.min;
    if span.x <= 0.0 || span.y <= 0.0 {
        return Err(SampleError::ZeroAreaWindow);
    }
    let weights = weights_from_ensemble(e);
    let ncols = match what {
        SampleWhat::Frank => 9,
        _ => 6,
    };
    let mut out = String::new();
    out.push_str("x,y,");
    out.push_str(what.header());
    out.push('\n');
    let step = |lo: f64, hi: f64, i: usize| {
        if res == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (res - 1) as f64
        }
    };
    for iy in 0..res {
        let y = step(window.min.y, window.max.y, iy);
        for ix in 0..res {
            let x = step(window.min.x, window.max.x, ix);
            let p = Vec2::new(x, y);
            out.push_str(&fmt_f64(x));
            out.push(',');
            out.push_str(&fmt_f64(y));
            out.push(',');
            let cells = if e.distance_to_lines(p) < BLANK_RADIUS {
                empty_cells(ncols)
            } else {
                match what {
                    SampleWhat::Strain => ensemble_strain(e, p)
                        .map(tensor_cells)
                        .unwrap_or_else(|_| empty_cells(ncols)),
                    SampleWhat::Frank => frank_tensor_field(e, p)
                        .map(|f| {
                            let mut cells = Vec::with_capacity(9);
                            for m in 0..3 {
                                for k in 0..3 {
                                    cells.push(fmt_f64(f.get(m, k)));
                                }
                            }
                            cells.join(",")
                        })
                        .unwrap_or_else(|_| empty_cells(ncols)),
                    SampleWhat::Solenoidal => solenoidal_closed_form(&weights, p)
                        .map(tensor_cells)
                        .unwrap_or_else(|_| empty_cells(ncols)),
                    SampleWhat::Remainder => {
                        compatible_remainder(&weights, e.wedge_params, p)
                            .map(tensor_cells)
                            .unwrap_or_else(|_| empty_cells(ncols))
                    }
                }
            };
            out.push_str(&cells);
            out.push('\n');
        }
    }
    Ok(out)
}
