//! Periodic grid fields and the spectral biharmonic decomposition
//! Delta Delta F = curl curl E, E_s = curl curl F, E_c = E - E_s, with the
//! gauge div F = 0 holding identically mode by mode.

use mesodefect_core::math::{eps3, SymTensor3};
use num_complex::Complex;
use rustfft::FftPlanner;

use crate::sample::fmt_f64;

/// n x n uniform periodic grid over a square cell, one symmetric tensor per
/// node, row-major (index iy * n + ix).
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub n: usize,
    /// Physical side length of the periodic cell.
    pub cell: f64,
    pub data: Vec<SymTensor3>,
}

#[derive(Debug)]
pub enum GridError {
    NotPowerOfTwo(usize),
    WrongLength { expected: usize, got: usize },
    NonFinite,
    BadCell(f64),
}

impl std::fmt::Display for GridError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridError::NotPowerOfTwo(n) => write!(f, "grid size {n} is not a power of two"),
            GridError::WrongLength { expected, got } => {
                write!(f, "grid data length {got}, expected {expected}")
            }
            GridError::NonFinite => write!(f, "grid contains non-finite values"),
            GridError::BadCell(c) => write!(f, "cell size {c} must be positive"),
        }
    }
}

impl std::error::Error for GridError {}

impl GridField {
    pub fn zeros(n: usize, cell: f64) -> GridField {
        GridField {
            n,
            cell,
            data: vec![SymTensor3::ZERO; n * n],
        }
    }

    pub fn from_fn(n: usize, cell: f64, f: impl Fn(f64, f64) -> SymTensor3) -> GridField {
        let h = cell / n as f64;
        let mut data = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                data.push(f(ix as f64 * h, iy as f64 * h));
            }
        }
        GridField { n, cell, data }
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.n == 0 || !self.n.is_power_of_two() {
            return Err(GridError::NotPowerOfTwo(self.n));
        }
        if self.data.len() != self.n * self.n {
            return Err(GridError::WrongLength {
                expected: self.n * self.n,
                got: self.data.len(),
            });
        }
        if !(self.cell > 0.0 && self.cell.is_finite()) {
            return Err(GridError::BadCell(self.cell));
        }
        if !self.data.iter().all(|t| t.is_finite()) {
            return Err(GridError::NonFinite);
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|t| t.max_abs()).fold(0.0, f64::max)
    }

    /// CSV dump: two header lines (n,cell then the values), a column header,
    /// then one row per node in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("n,cell\n");
        out.push_str(&format!("{},{}\n", self.n, fmt_f64(self.cell)));
        out.push_str("ix,iy,E_xx,E_yy,E_zz,E_yz,E_xz,E_xy\n");
        for iy in 0..self.n {
            for ix in 0..self.n {
                let t = self.data[iy * self.n + ix];
                out.push_str(&format!(
                    "{ix},{iy},{},{},{},{},{},{}\n",
                    fmt_f64(t.xx),
                    fmt_f64(t.yy),
                    fmt_f64(t.zz),
                    fmt_f64(t.yz),
                    fmt_f64(t.xz),
                    fmt_f64(t.xy)
                ));
            }
        }
        out
    }
}

pub struct Decomposition {
    /// Biharmonic potential (symmetric tensor field).
    pub f: GridField,
    /// Solenoidal part curl curl F.
    pub e_s: GridField,
    /// Compatible part E - E_s.
    pub e_c: GridField,
    /// Max-norm of the spectral divergence of F, relative to the largest
    /// mode amplitude times the largest wavenumber.
    pub gauge_residual: f64,
}

fn transpose(data: &mut [Complex<f64>], n: usize) {
    for iy in 0..n {
        for ix in (iy + 1)..n {
            data.swap(iy * n + ix, ix * n + iy);
        }
    }
}

fn fft2(data: &mut [Complex<f64>], n: usize, planner: &mut FftPlanner<f64>, inverse: bool) {
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose(data, n);
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose(data, n);
    if inverse {
        let s = 1.0 / (n * n) as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }
}

/// Signed frequency of DFT index m on an n-grid.
fn freq(m: usize, n: usize) -> f64 {
    if m <= n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

/// out_ij = -eps_ikl eps_jmn k_k k_m t_ln with k = (k_x, k_y, 0); this is
/// the Fourier symbol of curl curl applied to a symmetric tensor.
fn curl_curl_hat(k: [f64; 3], t: &[[Complex<f64>; 3]; 3]) -> [[Complex<f64>; 3]; 3] {
    let mut out = [[Complex::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Complex::new(0.0, 0.0);
            for kk in 0..2 {
                for l in 0..3 {
                    let c1 = eps3(i, kk, l);
                    if c1 == 0.0 {
                        continue;
                    }
                    for m in 0..2 {
                        for nn in 0..3 {
                            let c2 = eps3(j, m, nn);
                            if c2 != 0.0 {
                                acc += t[l][nn] * (c1 * c2 * k[kk] * k[m]);
                            }
                        }
                    }
                }
            }
            out[i][j] = -acc;
        }
    }
    out
}

/// Solves Delta Delta F = curl curl E in Fourier space (zero mode dropped),
/// forms E_s = curl curl F and E_c = E - E_s, and reports the gauge residual.
pub fn decompose_grid(e: &GridField) -> Result<Decomposition, GridError> {
    e.validate()?;
    let n = e.n;
    let mut planner = FftPlanner::new();

    // forward transforms of the six independent components
    let mut hat: Vec<[[Complex<f64>; 3]; 3]> =
        vec![[[Complex::new(0.0, 0.0); 3]; 3]; n * n];
    {
        let mut buf = vec![Complex::new(0.0, 0.0); n * n];
        for (a, b) in [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)] {
            for (dst, t) in buf.iter_mut().zip(&e.data) {
                *dst = Complex::new(t.get(a, b), 0.0);
            }
            fft2(&mut buf, n, &mut planner, false);
            for (h, v) in hat.iter_mut().zip(&buf) {
                h[a][b] = *v;
                h[b][a] = *v;
            }
        }
    }

    let two_pi_over_l = 2.0 * std::f64::consts::PI / e.cell;
    let mut f_hat: Vec<[[Complex<f64>; 3]; 3]> =
        vec![[[Complex::new(0.0, 0.0); 3]; 3]; n * n];
    let mut es_hat = f_hat.clone();
    let mut div_max = 0.0f64;
    let mut scale_max = 0.0f64;
    for iy in 0..n {
        for ix in 0..n {
            if ix == 0 && iy == 0 {
                continue; // zero mode dropped
            }
            let k = [
                two_pi_over_l * freq(ix, n),
                two_pi_over_l * freq(iy, n),
                0.0,
            ];
            let k2 = k[0] * k[0] + k[1] * k[1];
            let idx = iy * n + ix;
            let rhs = curl_curl_hat(k, &hat[idx]);
            let mut fh = [[Complex::new(0.0, 0.0); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    fh[i][j] = rhs[i][j] / (k2 * k2);
                }
            }
            es_hat[idx] = curl_curl_hat(k, &fh);
            // spectral divergence of F: sum_j k_j F_ij
            let mut f_amp = 0.0f64;
            for i in 0..3 {
                let mut div = Complex::new(0.0, 0.0);
                for j in 0..2 {
                    div += fh[i][j] * k[j];
                    f_amp = f_amp.max(fh[i][j].norm());
                }
                f_amp = f_amp.max(fh[i][2].norm());
                div_max = div_max.max(div.norm());
            }
            scale_max = scale_max.max(f_amp * k2.sqrt());
            f_hat[idx] = fh;
        }
    }
    let gauge_residual = if scale_max > 0.0 {
        div_max / scale_max
    } else {
        0.0
    };

    // inverse transforms
    let mut f = GridField::zeros(n, e.cell);
    let mut e_s = GridField::zeros(n, e.cell);
    {
        let mut buf = vec![Complex::new(0.0, 0.0); n * n];
        for (a, b) in [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)] {
            for (dst, h) in buf.iter_mut().zip(&f_hat) {
                *dst = h[a][b];
            }
            fft2(&mut buf, n, &mut planner, true);
            for (t, v) in f.data.iter_mut().zip(&buf) {
                t.set(a, b, v.re);
            }
            for (dst, h) in buf.iter_mut().zip(&es_hat) {
                *dst = h[a][b];
            }
            fft2(&mut buf, n, &mut planner, true);
            for (t, v) in e_s.data.iter_mut().zip(&buf) {
                t.set(a, b, v.re);
            }
        }
    }
    let mut e_c = GridField::zeros(n, e.cell);
    for ((c, full), s) in e_c.data.iter_mut().zip(&e.data).zip(&e_s.data) {
        *c = *full - *s;
    }
    Ok(Decomposition {
        f,
        e_s,
        e_c,
        gauge_residual,
    })
}
