//! One-step evolution of the electric walks and multi-step runs.
//!
//! Every stepper applies, in this order: the coin at each site, the
//! coin-conditioned shift, and the position phase `e^{i(phi_x x + phi_y y)}`.
//! Stepping reads one buffer and writes the other; the light cone of the
//! shifts bounds the region that has to be touched.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::coin::{self, CoinOperator, Ordering};
use crate::error::{Result, WalkError};
pub use crate::field::FieldPhase;
use crate::observe::PositionSums;
use crate::state::{WalkState, WalkState1D, WalkState2D};

const ZERO: C64 = C64::new(0.0, 0.0);

/// One step of the 1D electric walk, `e^{i phi x} S C`.
pub fn step_1d(state: &mut WalkState1D, coin: &CoinOperator, phi: &FieldPhase) -> Result<()> {
    if coin.dim() != 2 {
        return Err(WalkError::CoinDimension {
            expected: 2,
            got: coin.dim(),
        });
    }
    state.ensure_room()?;
    let c = coin.rows2();
    let lo = state.support.lo - 1;
    let hi = state.support.hi + 1;
    let phases = phi.phases(lo, hi);
    let x_min = state.x_min;
    let old = &state.amps;
    let new = &mut state.scratch;
    for (x, ph) in (lo..=hi).zip(&phases) {
        let i = 2 * (x - x_min) as usize;
        // s = +1 arrives from x - 1, s = -1 from x + 1
        let left = &old[i - 2..i];
        let right = &old[i + 2..i + 4];
        new[i] = ph * (c[0][0] * left[0] + c[0][1] * left[1]);
        new[i + 1] = ph * (c[1][0] * right[0] + c[1][1] * right[1]);
    }
    state.advance();
    Ok(())
}

type Site4 = [C64; 4];
type Site2 = [C64; 2];

/// Sitewise action of a four-component coin. The Grover, Hadamard and DFT
/// coins have all entries in `{+-1, +-i}/2` and are applied as butterflies.
#[derive(Debug, Clone, Copy)]
#[allow(clippy::large_enum_variant)] // built once per run, copied into the kernels
enum Coin4 {
    Grover,
    Hadamard2,
    Dft,
    General([[C64; 4]; 4]),
}

impl Coin4 {
    fn of(coin: &CoinOperator) -> Coin4 {
        let close = |other: CoinOperator| {
            (coin.matrix() - other.matrix())
                .iter()
                .all(|z| z.norm() < 1e-15)
        };
        if close(coin::grover_coin()) {
            Coin4::Grover
        } else if close(coin::hadamard2_coin()) {
            Coin4::Hadamard2
        } else if close(coin::dft_coin()) {
            Coin4::Dft
        } else {
            Coin4::General(coin.rows4())
        }
    }
}

#[inline(always)]
fn grover(v: &Site4) -> Site4 {
    let h = (v[0] + v[1] + v[2] + v[3]) * 0.5;
    [h - v[0], h - v[1], h - v[2], h - v[3]]
}

#[inline(always)]
fn hadamard2(v: &Site4) -> Site4 {
    let (a, b) = (v[0] + v[1], v[0] - v[1]);
    let (c, d) = (v[2] + v[3], v[2] - v[3]);
    [(a + c) * 0.5, (b + d) * 0.5, (a - c) * 0.5, (b - d) * 0.5]
}

#[inline(always)]
fn dft(v: &Site4) -> Site4 {
    let (a, b) = (v[0] + v[2], v[0] - v[2]);
    let (c, d) = (v[1] + v[3], v[1] - v[3]);
    let id = C64::new(-d.im, d.re);
    [(a + c) * 0.5, (b + id) * 0.5, (a - c) * 0.5, (b - id) * 0.5]
}

#[inline(always)]
fn general4(c: &[[C64; 4]; 4], v: &Site4) -> Site4 {
    std::array::from_fn(|r| c[r][0] * v[0] + c[r][1] * v[1] + c[r][2] * v[2] + c[r][3] * v[3])
}

#[inline(always)]
fn general2(c: &[[C64; 2]; 2], v: &Site2) -> Site2 {
    [
        c[0][0] * v[0] + c[0][1] * v[1],
        c[1][0] * v[0] + c[1][1] * v[1],
    ]
}

fn check_grover_like(state: &WalkState2D, coin: &CoinOperator) -> Result<()> {
    if coin.dim() != 4 || state.coin_dim != 4 {
        return Err(WalkError::CoinDimension {
            expected: 4,
            got: coin.dim().min(state.coin_dim),
        });
    }
    if coin.ordering() != Ordering::XyCross {
        return Err(WalkError::OrderingMismatch {
            expected: Ordering::XyCross,
            got: coin.ordering(),
        });
    }
    Ok(())
}

/// Output rows handled by one task; each task re-coins its two halo rows.
const ROW_BLOCK: usize = 64;

/// Geometry of one step on a 2D window: the old support and the window.
#[derive(Clone, Copy)]
struct Frame {
    /// Sites per row of the window.
    nx: usize,
    /// Window column of the old support's first site.
    sx0: usize,
    /// Old support width.
    sw: usize,
    /// Window rows spanned by the old support.
    sy0: usize,
    sy1: usize,
    /// Coordinates of window column and row 0.
    x_min: i64,
    y_min: i64,
}

impl Frame {
    fn new(state: &WalkState2D) -> Frame {
        Frame {
            nx: state.nx(),
            sx0: (state.support_x.lo - state.x_min) as usize,
            sw: (state.support_x.hi - state.support_x.lo + 1) as usize,
            sy0: (state.support_y.lo - state.y_min) as usize,
            sy1: (state.support_y.hi - state.y_min) as usize,
            x_min: state.x_min,
            y_min: state.y_min,
        }
    }
}

/// Coins window row `iy` of `old` into `buf`, whose entry `j` is column
/// `sx0 - 2 + j`; columns outside the old support stay zero.
#[inline(always)]
fn coin_row<const D: usize>(
    old: &[[C64; D]],
    f: &Frame,
    iy: usize,
    buf: &mut [[C64; D]],
    apply: impl Fn(&[C64; D]) -> [C64; D],
) {
    let out = &mut buf[2..2 + f.sw];
    if iy < f.sy0 || iy > f.sy1 {
        out.fill([ZERO; D]);
        return;
    }
    let row = &old[iy * f.nx + f.sx0..iy * f.nx + f.sx0 + f.sw];
    for (o, v) in out.iter_mut().zip(row) {
        *o = apply(v);
    }
}

/// Probabilities of a row of sites.
fn probs<const D: usize>(row: &[[C64; D]]) -> impl Iterator<Item = f64> + '_ {
    row.iter().map(|a| a.iter().map(|z| z.norm_sqr()).sum())
}

/// Coin, cross shift and phase for the output rows `[sy0 - 1, sy1 + 1]`;
/// returns the position moments of the output.
fn grover_like_kernel(
    old: &[Site4],
    new: &mut [Site4],
    f: Frame,
    px: &[C64],
    py: &[C64],
    apply: impl Fn(&Site4) -> Site4 + Sync,
) -> PositionSums {
    let (r0, r1) = (f.sy0 - 1, f.sy1 + 1);
    let width = f.sw + 2;
    let x0 = f.x_min + f.sx0 as i64 - 1;
    new[r0 * f.nx..(r1 + 1) * f.nx]
        .par_chunks_mut(ROW_BLOCK * f.nx)
        .enumerate()
        .map(|(b, block)| {
            let mut sums = PositionSums::default();
            let first = r0 + b * ROW_BLOCK;
            let mut below = vec![[ZERO; 4]; width + 2];
            let mut here = vec![[ZERO; 4]; width + 2];
            let mut above = vec![[ZERO; 4]; width + 2];
            coin_row(old, &f, first - 1, &mut below, &apply);
            coin_row(old, &f, first, &mut here, &apply);
            for (r, out_row) in block.chunks_exact_mut(f.nx).enumerate() {
                let iy = first + r;
                coin_row(old, &f, iy + 1, &mut above, &apply);
                let phy = py[iy - r0];
                let out = &mut out_row[f.sx0 - 1..f.sx0 + f.sw + 1];
                // output column j sits at buffer entry j + 1
                let sources = here.windows(3).zip(&above[1..]).zip(&below[1..]);
                for ((o, phx), ((h, a), b)) in out.iter_mut().zip(px).zip(sources) {
                    let ph = phx * phy;
                    *o = [ph * h[0][0], ph * a[1], ph * b[2], ph * h[2][3]];
                }
                sums = sums.merge(PositionSums::row(f.y_min + iy as i64, x0, probs(out)));
                std::mem::swap(&mut below, &mut here);
                std::mem::swap(&mut here, &mut above);
            }
            sums
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(PositionSums::default(), PositionSums::merge)
}

/// One step of a four-component walk, `e^{i phi_x x} e^{i phi_y y} S_2 C`,
/// with components `(X+, Y-, Y+, X-)` moving `+x, -y, +y, -x`.
pub fn step_grover_like_2d(
    state: &mut WalkState2D,
    coin: &CoinOperator,
    phi_x: &FieldPhase,
    phi_y: &FieldPhase,
) -> Result<()> {
    check_grover_like(state, coin)?;
    state.ensure_room()?;
    let f = Frame::new(state);
    let px = phi_x.phases(state.support_x.lo - 1, state.support_x.hi + 1);
    let py = phi_y.phases(state.support_y.lo - 1, state.support_y.hi + 1);
    let (old, _) = state.amps.as_chunks::<4>();
    let (new, _) = state.scratch.as_chunks_mut::<4>();
    let sums = match Coin4::of(coin) {
        Coin4::Grover => grover_like_kernel(old, new, f, &px, &py, grover),
        Coin4::Hadamard2 => grover_like_kernel(old, new, f, &px, &py, hadamard2),
        Coin4::Dft => grover_like_kernel(old, new, f, &px, &py, dft),
        Coin4::General(c) => grover_like_kernel(old, new, f, &px, &py, |v| general4(&c, v)),
    };
    state.advance();
    state.sums = Some(sums);
    Ok(())
}

/// One step of the alternate walk, `e^{i(phi_x x + phi_y y)} S_y C_y S_x C_x`.
pub fn step_alternate_2d(
    state: &mut WalkState2D,
    coin_x: &CoinOperator,
    coin_y: &CoinOperator,
    phi_x: &FieldPhase,
    phi_y: &FieldPhase,
) -> Result<()> {
    if state.coin_dim != 2 || coin_x.dim() != 2 || coin_y.dim() != 2 {
        return Err(WalkError::CoinDimension {
            expected: 2,
            got: state.coin_dim.max(coin_x.dim()).max(coin_y.dim()),
        });
    }
    state.ensure_room()?;
    let cx = coin_x.rows2();
    let cy = coin_y.rows2();
    let f = Frame::new(state);
    let nx = f.nx;
    let width = f.sw + 2;

    // coin and shift along x: amps -> scratch, rows of the old support
    {
        let (old, _) = state.amps.as_chunks::<2>();
        let (mid, _) = state.scratch.as_chunks_mut::<2>();
        mid[f.sy0 * nx..(f.sy1 + 1) * nx]
            .par_chunks_mut(ROW_BLOCK * nx)
            .enumerate()
            .for_each(|(b, block)| {
                let mut buf = vec![[ZERO; 2]; width + 2];
                for (r, out_row) in block.chunks_exact_mut(nx).enumerate() {
                    coin_row(old, &f, f.sy0 + b * ROW_BLOCK + r, &mut buf, |v| {
                        general2(&cx, v)
                    });
                    let out = &mut out_row[f.sx0 - 1..f.sx0 + f.sw + 1];
                    for (j, o) in out.iter_mut().enumerate() {
                        *o = [buf[j][0], buf[j + 2][1]];
                    }
                }
            });
    }

    // coin and shift along y, then phase: scratch -> amps
    let mid_frame = Frame {
        sx0: f.sx0 - 1,
        sw: f.sw + 2,
        ..f
    };
    let px = phi_x.phases(state.support_x.lo - 1, state.support_x.hi + 1);
    let py = phi_y.phases(state.support_y.lo - 1, state.support_y.hi + 1);
    let sums = {
        let (mid, _) = state.scratch.as_chunks::<2>();
        let (new, _) = state.amps.as_chunks_mut::<2>();
        let (r0, r1) = (f.sy0 - 1, f.sy1 + 1);
        let g = mid_frame;
        let x0 = f.x_min + g.sx0 as i64;
        new[r0 * nx..(r1 + 1) * nx]
            .par_chunks_mut(ROW_BLOCK * nx)
            .enumerate()
            .map(|(b, block)| {
                let mut sums = PositionSums::default();
                let first = r0 + b * ROW_BLOCK;
                let mut below = vec![[ZERO; 2]; g.sw + 4];
                let mut here = vec![[ZERO; 2]; g.sw + 4];
                let mut above = vec![[ZERO; 2]; g.sw + 4];
                let apply = |v: &Site2| general2(&cy, v);
                coin_row(mid, &g, first - 1, &mut below, apply);
                coin_row(mid, &g, first, &mut here, apply);
                for (r, out_row) in block.chunks_exact_mut(nx).enumerate() {
                    let iy = first + r;
                    coin_row(mid, &g, iy + 1, &mut above, apply);
                    let phy = py[iy - r0];
                    let out = &mut out_row[g.sx0..g.sx0 + g.sw];
                    for (j, (o, phx)) in out.iter_mut().zip(px.iter()).enumerate() {
                        let ph = phx * phy;
                        *o = [ph * below[j + 2][0], ph * above[j + 2][1]];
                    }
                    sums = sums.merge(PositionSums::row(f.y_min + iy as i64, x0, probs(out)));
                    std::mem::swap(&mut below, &mut here);
                    std::mem::swap(&mut here, &mut above);
                }
                sums
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(PositionSums::default(), PositionSums::merge)
    };
    // amps already holds the new state; `advance` swaps the buffers back
    std::mem::swap(&mut state.amps, &mut state.scratch);
    state.advance();
    state.sums = Some(sums);
    Ok(())
}

/// Which walk to run and its coin parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Walk {
    OneD {
        theta: f64,
        #[serde(default)]
        alpha: f64,
        #[serde(default)]
        beta: f64,
    },
    Grover2d,
    Alternate2d {
        theta_x: f64,
        theta_y: f64,
        #[serde(default)]
        alpha: f64,
        #[serde(default)]
        beta: f64,
    },
    Dft2d,
    Hadamard2d,
    /// A named four-component coin (any slot ordering); it is re-expressed
    /// in `XyCross` order before stepping.
    Custom4 {
        coin: String,
    },
}

impl Walk {
    /// Alternate walk with `theta_{x,y} = pi/4 +- delta_theta`.
    pub fn alternate_detuned(delta_theta: f64) -> Walk {
        Walk::Alternate2d {
            theta_x: FRAC_PI_4 + delta_theta,
            theta_y: FRAC_PI_4 - delta_theta,
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub fn is_2d(&self) -> bool {
        !matches!(self, Walk::OneD { .. })
    }

    pub fn coin_dim(&self) -> usize {
        match self {
            Walk::OneD { .. } | Walk::Alternate2d { .. } => 2,
            _ => 4,
        }
    }

    /// Initial coin state used when none is given: the symmetric states of
    /// the Grover and alternate walks, `(1, i, i, -1)/2` for DFT/Hadamard.
    pub fn default_initial(&self) -> Vec<C64> {
        let h = 0.5;
        match self {
            Walk::OneD { .. } | Walk::Alternate2d { .. } => {
                vec![C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)]
            }
            Walk::Grover2d => vec![
                C64::new(h, 0.0),
                C64::new(-h, 0.0),
                C64::new(-h, 0.0),
                C64::new(h, 0.0),
            ],
            Walk::Dft2d | Walk::Hadamard2d | Walk::Custom4 { .. } => vec![
                C64::new(h, 0.0),
                C64::new(0.0, h),
                C64::new(0.0, h),
                C64::new(-h, 0.0),
            ],
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub walk: Walk,
    pub field_x: FieldPhase,
    #[serde(default)]
    pub field_y: FieldPhase,
    pub steps: u64,
    /// Initial coin vector at the origin.
    pub initial: Vec<[f64; 2]>,
}

impl WalkSpec {
    pub fn new(walk: Walk, field_x: FieldPhase, field_y: FieldPhase, steps: u64) -> Self {
        let initial = walk
            .default_initial()
            .iter()
            .map(|c| [c.re, c.im])
            .collect();
        WalkSpec {
            walk,
            field_x,
            field_y,
            steps,
            initial,
        }
    }

    pub fn with_initial(mut self, coin: &[C64]) -> Self {
        self.initial = coin.iter().map(|c| [c.re, c.im]).collect();
        self
    }

    pub fn initial_coin(&self) -> Vec<C64> {
        self.initial
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.walk.coin_dim();
        if self.initial.len() != dim {
            return Err(WalkError::CoinDimension {
                expected: dim,
                got: self.initial.len(),
            });
        }
        if !self.walk.is_2d() && !self.field_y.is_zero() {
            return Err(WalkError::InvalidSpec("1D walk with a y field".into()));
        }
        let finite = |v: f64| {
            v.is_finite()
                .then_some(())
                .ok_or_else(|| WalkError::InvalidSpec(format!("non-finite coin angle {v}")))
        };
        match &self.walk {
            Walk::OneD { theta, alpha, beta } => {
                finite(*theta)?;
                finite(*alpha)?;
                finite(*beta)?;
            }
            Walk::Alternate2d {
                theta_x,
                theta_y,
                alpha,
                beta,
            } => {
                finite(*theta_x)?;
                finite(*theta_y)?;
                finite(*alpha)?;
                finite(*beta)?;
            }
            Walk::Custom4 { coin } => {
                let c = coin::coin_by_name(coin, 0.0, 0.0, 0.0)?;
                if c.dim() != 4 {
                    return Err(WalkError::InvalidSpec(format!("coin '{coin}' is not 4x4")));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

enum Coins {
    Single(CoinOperator),
    Pair(CoinOperator, CoinOperator),
}

/// A walk in progress: the state plus the coins that drive it.
pub struct Walker {
    spec: WalkSpec,
    coins: Coins,
    state: WalkState,
}

impl Walker {
    /// Prepares a walker whose window holds `spec.steps` steps.
    pub fn new(spec: &WalkSpec) -> Result<Self> {
        Self::with_capacity(spec, spec.steps)
    }

    pub fn with_capacity(spec: &WalkSpec, capacity_steps: u64) -> Result<Self> {
        spec.validate()?;
        let init = spec.initial_coin();
        let (coins, state) = match &spec.walk {
            Walk::OneD { theta, alpha, beta } => (
                Coins::Single(coin::make_rotation_coin(*alpha, *beta, *theta)),
                WalkState::OneD(WalkState1D::new_localized(&init, capacity_steps)?),
            ),
            Walk::Alternate2d {
                theta_x,
                theta_y,
                alpha,
                beta,
            } => (
                Coins::Pair(
                    coin::make_rotation_coin(*alpha, *beta, *theta_x),
                    coin::make_rotation_coin(*alpha, *beta, *theta_y),
                ),
                WalkState::TwoD(WalkState2D::new_localized(&init, capacity_steps)?),
            ),
            four => {
                let c = match four {
                    Walk::Grover2d => coin::grover_coin(),
                    Walk::Dft2d => coin::dft_coin(),
                    Walk::Hadamard2d => coin::hadamard2_coin(),
                    Walk::Custom4 { coin: name } => coin::reorder_coin(
                        &coin::coin_by_name(name, 0.0, 0.0, 0.0)?,
                        Ordering::XyCross,
                    )?,
                    _ => unreachable!(),
                };
                (
                    Coins::Single(c),
                    WalkState::TwoD(WalkState2D::new_localized(&init, capacity_steps)?),
                )
            }
        };
        Ok(Walker {
            spec: spec.clone(),
            coins,
            state,
        })
    }

    pub fn state(&self) -> &WalkState {
        &self.state
    }

    pub fn into_state(self) -> WalkState {
        self.state
    }

    pub fn step(&mut self) -> Result<()> {
        let (fx, fy) = (&self.spec.field_x, &self.spec.field_y);
        match (&mut self.state, &self.coins) {
            (WalkState::OneD(s), Coins::Single(c)) => step_1d(s, c, fx),
            (WalkState::TwoD(s), Coins::Single(c)) => step_grover_like_2d(s, c, fx, fy),
            (WalkState::TwoD(s), Coins::Pair(cx, cy)) => step_alternate_2d(s, cx, cy, fx, fy),
            _ => unreachable!("walker built with matching state and coins"),
        }
    }
}

/// Receives the state after every step of a run.
pub trait Observer {
    fn observe(&mut self, state: &WalkState);
}

impl<F: FnMut(&WalkState)> Observer for F {
    fn observe(&mut self, state: &WalkState) {
        self(state)
    }
}

/// Executes `spec.steps` steps, calling every observer after each one.
pub fn run(spec: &WalkSpec, observers: &mut [&mut dyn Observer]) -> Result<WalkState> {
    let mut walker = Walker::new(spec)?;
    for _ in 0..spec.steps {
        walker.step()?;
        for obs in observers.iter_mut() {
            obs.observe(walker.state());
        }
    }
    Ok(walker.into_state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observe::{position_marginal, Marginal};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hadamard_one_step_by_hand() {
        let mut s = WalkState1D::new_localized(&[c(1.0, 0.0), c(0.0, 0.0)], 3).unwrap();
        let coin = coin::make_rotation_coin(0.0, 0.0, PI / 4.0);
        step_1d(&mut s, &coin, &FieldPhase::ZERO).unwrap();
        assert!((s.amplitude(1, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(-1, 1) - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert_eq!(s.amplitude(0, 0), ZERO);
        assert_eq!(s.time(), 1);
    }

    #[test]
    fn identity_coin_is_ballistic() {
        let mut s = WalkState1D::new_localized(&[c(1.0, 0.0), c(0.0, 0.0)], 25).unwrap();
        let coin = coin::make_rotation_coin(0.0, 0.0, 0.0);
        for _ in 0..25 {
            step_1d(&mut s, &coin, &FieldPhase::ZERO).unwrap();
        }
        assert!((s.amplitude(25, 0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_contact_is_an_error() {
        let mut s = WalkState1D::new_localized(&[c(1.0, 0.0), c(0.0, 0.0)], 2).unwrap();
        let coin = coin::make_rotation_coin(0.0, 0.0, 0.3);
        for _ in 0..2 {
            step_1d(&mut s, &coin, &FieldPhase::ZERO).unwrap();
        }
        assert_eq!(
            step_1d(&mut s, &coin, &FieldPhase::ZERO),
            Err(WalkError::BoundaryContact { step: 3 })
        );

        let mut s = WalkState2D::new_localized(&Walk::Grover2d.default_initial(), 1).unwrap();
        let g = coin::grover_coin();
        step_grover_like_2d(&mut s, &g, &FieldPhase::ZERO, &FieldPhase::ZERO).unwrap();
        assert!(matches!(
            step_grover_like_2d(&mut s, &g, &FieldPhase::ZERO, &FieldPhase::ZERO),
            Err(WalkError::BoundaryContact { step: 2 })
        ));
    }

    #[test]
    fn ordering_mismatch_is_an_error() {
        let mut s = WalkState2D::new_localized(&Walk::Hadamard2d.default_initial(), 3).unwrap();
        let permuted = coin::coin_by_name("hadamard2-permuted", 0.0, 0.0, 0.0).unwrap();
        let err = step_grover_like_2d(&mut s, &permuted, &FieldPhase::ZERO, &FieldPhase::ZERO);
        assert!(matches!(err, Err(WalkError::OrderingMismatch { .. })));
    }

    #[test]
    fn grover_first_step_spreads_to_four_neighbours() {
        let mut s = WalkState2D::new_localized(&Walk::Grover2d.default_initial(), 2).unwrap();
        step_grover_like_2d(
            &mut s,
            &coin::grover_coin(),
            &FieldPhase::ZERO,
            &FieldPhase::ZERO,
        )
        .unwrap();
        let Marginal::TwoD(m) = position_marginal(&WalkState::TwoD(s)) else {
            unreachable!()
        };
        for (x, y, p) in m.iter() {
            let on_cross = matches!((x, y), (1, 0) | (-1, 0) | (0, 1) | (0, -1));
            let want = if on_cross { 0.25 } else { 0.0 };
            assert!((p - want).abs() < 1e-15, "P({x},{y}) = {p}");
        }
    }

    #[test]
    fn alternate_first_step_lands_on_corners() {
        let mut s = WalkState2D::new_localized(&[c(1.0, 0.0), c(0.0, 0.0)], 2).unwrap();
        let h = coin::make_rotation_coin(0.0, 0.0, PI / 4.0);
        step_alternate_2d(&mut s, &h, &h, &FieldPhase::ZERO, &FieldPhase::ZERO).unwrap();
        let Marginal::TwoD(m) = position_marginal(&WalkState::TwoD(s)) else {
            unreachable!()
        };
        let corner_mass: f64 = m
            .iter()
            .filter(|&(x, y, _)| x.abs() == 1 && y.abs() == 1)
            .map(|(_, _, p)| p)
            .sum();
        assert!((corner_mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alternate_identity_coins_move_along_diagonal() {
        let mut s = WalkState2D::new_localized(&[c(1.0, 0.0), c(0.0, 0.0)], 7).unwrap();
        let id = coin::make_rotation_coin(0.0, 0.0, 0.0);
        for _ in 0..7 {
            step_alternate_2d(&mut s, &id, &id, &FieldPhase::ZERO, &FieldPhase::ZERO).unwrap();
        }
        assert!((s.amplitude(7, 7, 0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stepper_moments_match_recomputed_widths() {
        use crate::observe::{marginal_widths, widths};
        let fx = FieldPhase::rational(1, 7).unwrap();
        let fy = FieldPhase::real(-0.3).unwrap();
        for walk in [Walk::Grover2d, Walk::Dft2d, Walk::alternate_detuned(0.1)] {
            let spec = WalkSpec::new(walk, fx, fy, 150);
            let state = run(&spec, &mut []).unwrap();
            let fused = widths(&state);
            let direct = marginal_widths(&position_marginal(&state));
            for (a, b) in [
                (fused.sigma_x, direct.sigma_x),
                (fused.sigma_y, direct.sigma_y),
                (fused.sigma_d, direct.sigma_d),
                (fused.sigma_a, direct.sigma_a),
            ] {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let spec = WalkSpec::new(Walk::Grover2d, FieldPhase::ZERO, FieldPhase::ZERO, 0);
        let out = run(&spec, &mut []).unwrap();
        let fresh = Walker::new(&spec).unwrap().into_state();
        assert_eq!(out, fresh);
    }

    #[test]
    fn observers_called_every_step() {
        let spec = WalkSpec::new(
            Walk::OneD {
                theta: PI / 4.0,
                alpha: 0.0,
                beta: 0.0,
            },
            FieldPhase::rational(1, 5).unwrap(),
            FieldPhase::ZERO,
            13,
        );
        let mut times = Vec::new();
        let mut obs = |s: &WalkState| times.push(s.time());
        run(&spec, &mut [&mut obs]).unwrap();
        assert_eq!(times, (1..=13).collect::<Vec<_>>());
    }

    #[test]
    fn custom_permuted_hadamard_matches_hadamard_walk() {
        let phi = FieldPhase::rational(1, 17).unwrap();
        let a = WalkSpec::new(Walk::Hadamard2d, phi, FieldPhase::ZERO, 12);
        let b = WalkSpec {
            walk: Walk::Custom4 {
                coin: "hadamard2-permuted".into(),
            },
            ..a.clone()
        };
        assert_eq!(run(&a, &mut []).unwrap(), run(&b, &mut []).unwrap());
    }

    #[test]
    fn validate_rejects_bad_specs() {
        let mut spec = WalkSpec::new(Walk::Grover2d, FieldPhase::ZERO, FieldPhase::ZERO, 3);
        spec.initial.pop();
        assert!(spec.validate().is_err());
        let spec = WalkSpec::new(
            Walk::OneD {
                theta: 0.1,
                alpha: 0.0,
                beta: 0.0,
            },
            FieldPhase::ZERO,
            FieldPhase::rational(1, 3).unwrap(),
            3,
        );
        assert!(spec.validate().is_err());
        let spec = WalkSpec::new(
            Walk::Custom4 {
                coin: "rotation".into(),
            },
            FieldPhase::ZERO,
            FieldPhase::ZERO,
            3,
        );
        assert!(spec.validate().is_err());
    }
}
