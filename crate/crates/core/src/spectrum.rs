//! Dispersion relations of the walks and the momentum-space unitaries that
//! back them.
//!
//! Conventions: `psi(k) = sum_x e^{ikx} a_x`, so a shift by `+1` is
//! multiplication by `e^{ik}` and the position phase `e^{i phi x}` maps
//! `psi(k)` to `psi(k + phi)`. An eigenvalue `lambda` of a one-step unitary
//! is reported as the eigenphase `omega = -arg(lambda)` folded into
//! `[0, 2pi)` (time dependence `e^{-i omega t}`). Closed forms return the
//! principal `arccos` branch and its mirror `-omega`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use crate::coin::{self, CoinOperator, Ordering};
use crate::error::{Result, WalkError};
use crate::evolve::Walk;
use crate::field::FieldPhase;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Folds an angle into `[0, 2pi)`.
pub fn fold(omega: f64) -> f64 {
    let w = omega.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Distance between two angles on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Largest circular distance between paired elements of two phase sets,
/// minimised over all pairings (sets of equal, small size).
pub fn phase_set_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "phase sets differ in size");
    let mut idx: Vec<usize> = (0..b.len()).collect();
    let mut best = f64::INFINITY;
    permute(&mut idx, 0, &mut |perm| {
        let worst = a
            .iter()
            .zip(perm)
            .map(|(&x, &j)| circular_distance(x, b[j]))
            .fold(0.0, f64::max);
        best = best.min(worst);
    });
    best
}

fn permute(idx: &mut [usize], at: usize, f: &mut impl FnMut(&[usize])) {
    if at == idx.len() {
        f(idx);
        return;
    }
    for i in at..idx.len() {
        idx.swap(at, i);
        permute(idx, at + 1, f);
        idx.swap(at, i);
    }
}

/// `-arg(lambda)` in `[0, 2pi)` for every eigenvalue, sorted ascending.
pub fn eigenphases(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(WalkError::Eigen);
    }
    let lambdas = eigenvalues(m)?;
    let mut w: Vec<f64> = lambdas.iter().map(|l| fold(-l.arg())).collect();
    w.sort_by(f64::total_cmp);
    Ok(w)
}

// `((a - d)/2)^2 + bc` rather than `tr^2/4 - det`: no cancellation near a
// degeneracy, where a normal matrix is close to scalar.
fn eig2(a: C64, b: C64, c: C64, d: C64) -> [C64; 2] {
    let half_tr = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    [half_tr + disc, half_tr - disc]
}

fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    if n == 2 {
        return Ok(eig2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]).to_vec());
    }
    let schur = m.clone().try_schur(1e-15, 10_000).ok_or(WalkError::Eigen)?;
    let (_, t) = schur.unpack();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].norm() > 1e-14 * scale {
            out.extend(eig2(
                t[(i, i)],
                t[(i, i + 1)],
                t[(i + 1, i)],
                t[(i + 1, i + 1)],
            ));
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    Ok(out)
}

fn diag(entries: &[C64]) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// The zero-field one-step unitary at quasimomentum `(kx, ky)`: `S(k) C`
/// for single-coin walks, `S_y(ky) C_y S_x(kx) C_x` for the alternate walk.
/// `ky` is ignored in 1D.
pub fn momentum_unitary(walk: &Walk, kx: f64, ky: f64) -> Result<DMatrix<C64>> {
    let shift_xy = |kx: f64, ky: f64| diag(&[cis(kx), cis(-ky), cis(ky), cis(-kx)]);
    let four = |c: CoinOperator| shift_xy(kx, ky) * c.matrix();
    Ok(match walk {
        Walk::OneD { theta, alpha, beta } => {
            diag(&[cis(kx), cis(-kx)]) * coin::make_rotation_coin(*alpha, *beta, *theta).matrix()
        }
        Walk::Alternate2d {
            theta_x,
            theta_y,
            alpha,
            beta,
        } => {
            let cx = coin::make_rotation_coin(*alpha, *beta, *theta_x);
            let cy = coin::make_rotation_coin(*alpha, *beta, *theta_y);
            diag(&[cis(ky), cis(-ky)]) * cy.matrix() * diag(&[cis(kx), cis(-kx)]) * cx.matrix()
        }
        Walk::Grover2d => four(coin::grover_coin()),
        Walk::Dft2d => four(coin::dft_coin()),
        Walk::Hadamard2d => four(coin::hadamard2_coin()),
        Walk::Custom4 { coin: name } => four(coin::reorder_coin(
            &coin::coin_by_name(name, 0.0, 0.0, 0.0)?,
            Ordering::XyCross,
        )?),
    })
}

/// `U_0(k + phi) U_0(k + 2 phi) ... U_0(k + p phi)`: the `p`-step evolution
/// in momentum space under the field `(phi_x, phi_y)`. When `p phi` is a
/// multiple of `2pi` it is the stroboscopic (translation invariant) unitary.
pub fn product_unitary(
    walk: &Walk,
    phi_x: &FieldPhase,
    phi_y: &FieldPhase,
    p: u64,
    kx: f64,
    ky: f64,
) -> Result<DMatrix<C64>> {
    let (fx, fy) = (phi_x.radians(), phi_y.radians());
    let mut acc = momentum_unitary(walk, kx + fx, ky + fy)?;
    for j in 2..=p {
        let j = j as f64;
        acc *= momentum_unitary(walk, kx + j * fx, ky + j * fy)?;
    }
    Ok(acc)
}

fn branches(cos_omega: f64) -> (f64, f64) {
    let w = cos_omega.clamp(-1.0, 1.0).acos();
    (w, -w)
}

/// `+-omega` from `1 - cos omega` and `1 + cos omega`, each computed without
/// cancellation; `acos` loses half the digits near a band touching.
fn branches_half(one_minus: f64, one_plus: f64) -> (f64, f64) {
    let w = 2.0 * one_minus.max(0.0).sqrt().atan2(one_plus.max(0.0).sqrt());
    (w, -w)
}

/// `1 - m` for `m = |c|^p`, accurate when `|c|` is close to one.
fn one_minus_power(c: f64, p: u32) -> f64 {
    let gap = 1.0 - c.abs();
    -(p as f64 * (-gap).ln_1p()).exp_m1()
}

/// Plane-wave dispersion of the 1D walk (`alpha = beta = 0`):
/// `cos omega = cos(theta) cos(k)`.
pub fn dispersion_1d(theta: f64, k: f64) -> (f64, f64) {
    branches(theta.cos() * k.cos())
}

/// Eigenphases `+-omega` of the `p`-step product with
/// `cos omega = c_p cos(x)` (odd `p`) or `+-(1 - c_p) - c_p cos(x)` (even
/// `p`, `+` for `p = 4n + 2`), where `c_p = c^p`. Touchings are at
/// `cos omega = +-1`, so `1 -+ cos omega` are built from sums of
/// non-negative terms.
fn effective_branches(c: f64, p: u32, x: f64) -> (f64, f64) {
    let m = c.abs().powi(p as i32);
    let gap = one_minus_power(c, p);
    let (sin2, cos2) = ((x / 2.0).sin().powi(2), (x / 2.0).cos().powi(2));
    if p % 2 == 1 {
        // cos omega = s m cos x, s the sign of c_p
        let (minus, plus) = if c < 0.0 { (cos2, sin2) } else { (sin2, cos2) };
        branches_half(gap + 2.0 * m * minus, gap + 2.0 * m * plus)
    } else if (p / 2).is_multiple_of(2) {
        branches_half(2.0 * gap + 2.0 * m * cos2, 2.0 * m * sin2)
    } else {
        branches_half(2.0 * m * cos2, 2.0 * gap + 2.0 * m * sin2)
    }
}

/// Effective dispersion of the 1D walk under `phi = 2pi q/p`: the
/// eigenphases of the `p`-step momentum unitary.
pub fn effective_dispersion_1d(theta: f64, p: u32, k: f64) -> (f64, f64) {
    assert!(p >= 1);
    effective_branches(theta.cos(), p, p as f64 * k)
}

/// `(|v_max|, k)` of the effective group velocity `(1/p) d omega/dk`:
/// `c^p` at `pi/2p` for odd `p`; `sqrt(c^p)` at `0` (`p = 4n`) or `pi/p`
/// (`p = 4n + 2`) for even `p`, approached at a cusp of `omega`.
pub fn max_group_velocity_1d(theta: f64, p: u32) -> (f64, f64) {
    assert!(p >= 1);
    let c_p = theta.cos().powi(p as i32).abs();
    let p_f = p as f64;
    match p % 4 {
        1 | 3 => (c_p, PI / (2.0 * p_f)),
        0 => (c_p.sqrt(), 0.0),
        _ => (c_p.sqrt(), PI / p_f),
    }
}

/// Step used by the central differences of the group velocities.
pub const GROUP_VELOCITY_STEP: f64 = 1e-5;

/// `(1/p) d omega_+/dk` of the effective dispersion, by central differences.
pub fn group_velocity_1d(theta: f64, p: u32, k: f64) -> f64 {
    let h = GROUP_VELOCITY_STEP;
    let w = |k| effective_dispersion_1d(theta, p, k).0;
    (w(k + h) - w(k - h)) / (2.0 * h * p as f64)
}

/// Alternate-walk dispersion:
/// `cos omega = cos(kx+ky) c_x c_y - cos(kx-ky) s_x s_y`.
pub fn dispersion_alternate(theta_x: f64, theta_y: f64, kx: f64, ky: f64) -> (f64, f64) {
    let cc = theta_x.cos() * theta_y.cos();
    let ss = theta_x.sin() * theta_y.sin();
    branches((kx + ky).cos() * cc - (kx - ky).cos() * ss)
}

/// Lattice axis carrying the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// `|r|` below which the stroboscopic formulas are replaced by the product
/// unitary at the same `k`.
pub const DEGENERATE_R: f64 = 1e-12;

/// The `r` of the stroboscopic formulas for a field along `axis`:
/// `e^{ik_f}(c_x c_y e^{ik_o} - s_x s_y e^{-ik_o})`, with `k_f` the field
/// component of the momentum and `k_o` the other one.
pub fn stroboscopic_r(theta_x: f64, theta_y: f64, kx: f64, ky: f64, axis: Axis) -> C64 {
    let (kf, ko) = match axis {
        Axis::X => (kx, ky),
        Axis::Y => (ky, kx),
    };
    let cc = theta_x.cos() * theta_y.cos();
    let ss = theta_x.sin() * theta_y.sin();
    cis(kf) * (cis(ko) * cc - cis(-ko) * ss)
}

/// Stroboscopic dispersion of the alternate walk under a field `2pi q/p`
/// along `axis`, i.e. the eigenphases of the `p`-step product unitary.
pub fn stroboscopic_dispersion_alternate(
    theta_x: f64,
    theta_y: f64,
    p: u32,
    kx: f64,
    ky: f64,
    axis: Axis,
) -> Result<(f64, f64)> {
    assert!(p >= 1);
    let r = stroboscopic_r(theta_x, theta_y, kx, ky, axis);
    let m = r.norm();
    if m < DEGENERATE_R {
        let walk = Walk::Alternate2d {
            theta_x,
            theta_y,
            alpha: 0.0,
            beta: 0.0,
        };
        let phi = FieldPhase::rational(1, p as u64)?;
        let (fx, fy) = match axis {
            Axis::X => (phi, FieldPhase::ZERO),
            Axis::Y => (FieldPhase::ZERO, phi),
        };
        let u = product_unitary(&walk, &fx, &fy, p as u64, kx, ky)?;
        let w = eigenphases(&u)?;
        let lo = w[0].min(TAU - w[0]);
        return Ok((lo, -lo));
    }
    let beta = p as f64 * r.im.atan2(r.re);
    Ok(effective_branches(m, p, beta))
}

/// Grover-walk sheets: flat bands at `0` and `pi` and the pair
/// `cos omega = -(cos kx + cos ky)/2`.
pub fn dispersion_grover(kx: f64, ky: f64) -> [f64; 4] {
    let (w, m) = branches(-(kx.cos() + ky.cos()) / 2.0);
    [0.0, PI, w, m]
}

/// Momentum of the alternate walk whose sheets coincide with the moving
/// Grover sheets at `(kx, ky)`: a 45 degree rotation and a shift by `pi`.
pub fn grover_to_alternate_momentum(kx: f64, ky: f64) -> (f64, f64) {
    ((kx + ky + PI) / 2.0, (kx - ky + PI) / 2.0)
}

/// The two independent Hadamard-walk sheets `(omega_1, omega_2)` in
/// `[0, pi]`; the other two are their mirrors.
pub fn dispersion_hadamard2(kx: f64, ky: f64) -> (f64, f64) {
    let (cx, cy) = (kx.cos(), ky.cos());
    let s = hadamard2_s(kx, ky);
    let root = (s + 8.0).max(0.0).sqrt();
    // cos w = (cx - cy -+ root)/4; the differences that vanish at the
    // touchings are rationalised, e.g. 4 - (cx - cy) - root
    // = 8 (1 - cx)(1 + cy) / (4 - cx + cy + root)
    let (sx, cxh) = ((kx / 2.0).sin().powi(2), (kx / 2.0).cos().powi(2));
    let (sy, cyh) = ((ky / 2.0).sin().powi(2), (ky / 2.0).cos().powi(2));
    let (a, b) = (4.0 - cx + cy, 4.0 + cx - cy);
    let w1 = branches_half((a + root) / 4.0, 8.0 * cxh * sy / (b + root)).0;
    let w2 = branches_half(8.0 * sx * cyh / (a + root), (b + root) / 4.0).0;
    (w1, w2)
}

/// `cos^2 kx + cos^2 ky + 6 cos kx cos ky`, never below `-4`.
pub fn hadamard2_s(kx: f64, ky: f64) -> f64 {
    let (cx, cy) = (kx.cos(), ky.cos());
    cx * cx + cy * cy + 6.0 * cx * cy
}

/// Residual of the implicit DFT-walk dispersion
/// `cos 2w + 2 sin 2w - cos(kx-ky) - 2(sin w + sin kx + sin ky + cos kx + cos ky) sin w`.
pub fn dft_residual(omega: f64, kx: f64, ky: f64) -> f64 {
    let k_sum = kx.sin() + ky.sin() + kx.cos() + ky.cos();
    dft_residual_with(omega, (kx - ky).cos(), k_sum)
}

fn dft_residual_with(omega: f64, cos_diff: f64, k_sum: f64) -> f64 {
    let (s, c) = omega.sin_cos();
    let (s2, c2) = (2.0 * s * c, c * c - s * s);
    c2 + 2.0 * s2 - cos_diff - 2.0 * (s + k_sum) * s
}

/// Samples of `[0, 2pi)` scanned for sign changes of the DFT residual.
pub const DFT_SCAN_SAMPLES: usize = 4096;

/// Roots of the DFT dispersion at one `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DftRoots {
    /// The four eigenphases in `[0, 2pi)`, ascending.
    pub omega: Vec<f64>,
    /// Set when bracketing did not isolate four roots (tangential roots at
    /// band touchings) and the eigenphases of the momentum unitary were used.
    pub fallback: bool,
}

/// Bracketed roots of the DFT residual, refined by bisection to `1e-12`.
pub fn dft_bracketed_roots(kx: f64, ky: f64) -> Vec<f64> {
    let cos_diff = (kx - ky).cos();
    let k_sum = kx.sin() + ky.sin() + kx.cos() + ky.cos();
    let f = |w: f64| dft_residual_with(w, cos_diff, k_sum);
    let n = DFT_SCAN_SAMPLES;
    let step = TAU / n as f64;
    let mut roots: Vec<f64> = Vec::new();
    let push = |w: f64, roots: &mut Vec<f64>| {
        let w = fold(w);
        if roots.iter().all(|&r| circular_distance(r, w) > 1e-9) {
            roots.push(w);
        }
    };
    let mut w0 = 0.0;
    let mut f0 = f(w0);
    for i in 1..=n {
        let w1 = i as f64 * step;
        let f1 = f(w1);
        if f0 == 0.0 {
            push(w0, &mut roots);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            let (mut lo, mut hi, mut flo) = (w0, w1, f0);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            push(0.5 * (lo + hi), &mut roots);
        }
        w0 = w1;
        f0 = f1;
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Residual accepted for every returned DFT root.
pub const DFT_RESIDUAL_TOL: f64 = 1e-9;

/// All four DFT-walk eigenphases at `(kx, ky)`.
pub fn dispersion_dft(kx: f64, ky: f64) -> Result<DftRoots> {
    let roots = dft_bracketed_roots(kx, ky);
    let (omega, fallback) = if roots.len() == 4 {
        (roots, false)
    } else {
        (eigenphases(&momentum_unitary(&Walk::Dft2d, kx, ky)?)?, true)
    };
    if omega
        .iter()
        .any(|&w| dft_residual(w, kx, ky).abs() >= DFT_RESIDUAL_TOL)
    {
        return Err(WalkError::RootCount {
            kx,
            ky,
            found: omega.len(),
        });
    }
    Ok(DftRoots { omega, fallback })
}

/// `A`, `m` and `eta` of the trace lemma, with `eta` a primitive `m`-th
/// root of unity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaInput {
    a: Matrix2<C64>,
    m: u32,
    eta: C64,
}

const ROOT_TOL: f64 = 1e-10;

impl LemmaInput {
    pub fn new(a: Matrix2<C64>, m: u32, eta: C64) -> Result<Self> {
        if m == 0 {
            return Err(WalkError::InvalidLemma("m must be positive".into()));
        }
        if (eta.powu(m) - 1.0).norm() > ROOT_TOL {
            return Err(WalkError::InvalidLemma(format!("eta^{m} != 1")));
        }
        if let Some(j) = (1..m).find(|&j| (eta.powu(j) - 1.0).norm() <= ROOT_TOL) {
            return Err(WalkError::InvalidLemma(format!(
                "eta is not primitive: eta^{j} = 1"
            )));
        }
        Ok(LemmaInput { a, m, eta })
    }

    /// `eta = e^{2 pi i q/m}`.
    pub fn with_root(a: Matrix2<C64>, m: u32, q: u32) -> Result<Self> {
        Self::new(a, m, cis(TAU * q as f64 / m as f64))
    }

    pub fn a(&self) -> &Matrix2<C64> {
        &self.a
    }

    pub fn m(&self) -> u32 {
        self.m
    }
}

/// `tau_m` from the closed forms: `a^m + d^m` for odd `m`;
/// `-(a^m + d^m) + 2(-1)^{m/2}[(ad)^{m/2} - det(A)^{m/2}]` for even `m`.
pub fn lemma_trace_closed(input: &LemmaInput) -> C64 {
    let (a, d) = (input.a[(0, 0)], input.a[(1, 1)]);
    let m = input.m;
    let sum = a.powu(m) + d.powu(m);
    if m % 2 == 1 {
        sum
    } else {
        let h = m / 2;
        let sign = if h.is_multiple_of(2) { 1.0 } else { -1.0 };
        -sum + 2.0 * sign * ((a * d).powu(h) - input.a.determinant().powu(h))
    }
}

/// `tau_m = Tr[A R^0 A R^1 ... A R^{m-1}]` with `R = diag(eta, 1/eta)`.
pub fn lemma_trace_direct(input: &LemmaInput) -> C64 {
    let mut acc = Matrix2::identity();
    for j in 0..input.m {
        let ej = input.eta.powu(j);
        let r = Matrix2::new(ej, ZERO, ZERO, ej.inv());
        acc = acc * input.a * r;
    }
    acc.trace()
}

/// Dispersion sheets sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandGrid {
    /// One grid per momentum axis (one axis in 1D).
    pub axes: Vec<Vec<f64>>,
    pub branches: usize,
    /// Row-major over the grid (last axis fastest), `branches` values per
    /// point, each in `[0, 2pi)` and ascending.
    pub omega: Vec<f64>,
}

/// `n` equally spaced points covering `[lo, hi]` inclusive.
pub fn uniform_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn normalise(mut w: Vec<f64>) -> Vec<f64> {
    for x in &mut w {
        *x = fold(*x);
    }
    w.sort_by(f64::total_cmp);
    w
}

impl BandGrid {
    pub fn sample_1d(
        ks: Vec<f64>,
        branches: usize,
        f: impl Fn(f64) -> Result<Vec<f64>> + Sync,
    ) -> Result<Self> {
        let rows: Vec<Vec<f64>> = ks
            .par_iter()
            .map(|&k| f(k).map(normalise))
            .collect::<Result<_>>()?;
        Self::assemble(vec![ks], branches, rows)
    }

    pub fn sample_2d(
        kxs: Vec<f64>,
        kys: Vec<f64>,
        branches: usize,
        f: impl Fn(f64, f64) -> Result<Vec<f64>> + Sync,
    ) -> Result<Self> {
        let rows: Vec<Vec<f64>> = kxs
            .par_iter()
            .flat_map_iter(|&kx| kys.iter().map(move |&ky| (kx, ky)))
            .map(|(kx, ky)| f(kx, ky).map(normalise))
            .collect::<Result<_>>()?;
        Self::assemble(vec![kxs, kys], branches, rows)
    }

    fn assemble(axes: Vec<Vec<f64>>, branches: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != branches) {
            return Err(WalkError::InvalidSpec(format!(
                "expected {branches} branches, got {}",
                bad.len()
            )));
        }
        Ok(BandGrid {
            axes,
            branches,
            omega: rows.concat(),
        })
    }

    pub fn points(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    /// Momentum coordinates of grid point `i`.
    pub fn k(&self, i: usize) -> Vec<f64> {
        let mut rest = i;
        let mut out = vec![0.0; self.axes.len()];
        for (d, axis) in self.axes.iter().enumerate().rev() {
            out[d] = axis[rest % axis.len()];
            rest /= axis.len();
        }
        out
    }

    pub fn omegas(&self, i: usize) -> &[f64] {
        &self.omega[i * self.branches..(i + 1) * self.branches]
    }

    /// Rows `kx[,ky],branch,omega`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header = if self.axes.len() == 1 { "kx" } else { "kx,ky" };
        writeln!(out, "{header},branch,omega")?;
        for i in 0..self.points() {
            let k: Vec<String> = self.k(i).iter().map(|v| format!("{v:.16e}")).collect();
            let k = k.join(",");
            for (b, w) in self.omegas(i).iter().enumerate() {
                writeln!(out, "{k},{b},{w:.16e}")?;
            }
        }
        Ok(())
    }
}
