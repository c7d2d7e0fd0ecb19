//! Walker wavefunctions on finite windows of the integer lattice.
//!
//! Amplitudes are stored with the coin components of one site adjacent
//! (`[site][s]`), rows of constant `y` contiguous in 2D. The window is fixed
//! at construction; a `T`-step run needs `capacity_steps >= T`.

use num_complex::Complex64 as C64;
use std::io::{self, Write};

use crate::coin::Ordering;
use crate::error::{Result, WalkError};
use crate::observe::PositionSums;

/// Tolerance on `|c|^2 = 1` for initial coin vectors.
pub const COIN_NORM_TOL: f64 = 1e-12;

/// Inclusive bounding box `[lo, hi]` of the lattice sites that may carry
/// amplitude. Everything outside is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub lo: i64,
    pub hi: i64,
}

impl Span {
    fn grow(self) -> Span {
        Span {
            lo: self.lo - 1,
            hi: self.hi + 1,
        }
    }

    /// Room for one more step: the pull stencil reads two sites beyond
    /// the current support.
    fn inside(self, min: i64, max: i64) -> bool {
        self.lo - 2 >= min && self.hi + 2 <= max
    }
}

fn check_coin(coin: &[C64]) -> Result<()> {
    let norm_sq: f64 = coin.iter().map(|c| c.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > COIN_NORM_TOL {
        return Err(WalkError::NotNormalized { norm_sq });
    }
    Ok(())
}

/// `a_{x,s}(t)` for `x` in `[x_min, x_max]`, `s` in `{+1, -1}` (index 0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState1D {
    pub(crate) x_min: i64,
    pub(crate) x_max: i64,
    pub(crate) amps: Vec<C64>,
    pub(crate) scratch: Vec<C64>,
    pub(crate) support: Span,
    pub(crate) time: u64,
}

impl WalkState1D {
    /// Walker at `x = 0` with the given coin amplitudes, in a window of
    /// `[-capacity_steps - 1, capacity_steps + 1]`.
    pub fn new_localized(coin: &[C64], capacity_steps: u64) -> Result<Self> {
        if coin.len() != 2 {
            return Err(WalkError::CoinDimension {
                expected: 2,
                got: coin.len(),
            });
        }
        check_coin(coin)?;
        let half = capacity_steps as i64 + 1;
        let n = (2 * half + 1) as usize;
        let mut amps = vec![C64::new(0.0, 0.0); 2 * n];
        let origin = half as usize;
        amps[2 * origin] = coin[0];
        amps[2 * origin + 1] = coin[1];
        Ok(WalkState1D {
            x_min: -half,
            x_max: half,
            scratch: vec![C64::new(0.0, 0.0); amps.len()],
            amps,
            support: Span { lo: 0, hi: 0 },
            time: 0,
        })
    }

    /// Arbitrary state on `[x_min, x_max]`; `f(x, s)` gives the amplitude.
    /// Only checks normalization, to the same tolerance as coin vectors.
    pub fn from_fn(x_min: i64, x_max: i64, f: impl Fn(i64, usize) -> C64) -> Result<Self> {
        assert!(x_max >= x_min);
        let n = (x_max - x_min + 1) as usize;
        let mut amps = Vec::with_capacity(2 * n);
        let mut support: Option<Span> = None;
        for x in x_min..=x_max {
            for s in 0..2 {
                let a = f(x, s);
                if a != C64::new(0.0, 0.0) {
                    support = Some(match support {
                        None => Span { lo: x, hi: x },
                        Some(sp) => Span {
                            lo: sp.lo.min(x),
                            hi: sp.hi.max(x),
                        },
                    });
                }
                amps.push(a);
            }
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(WalkError::NotNormalized { norm_sq });
        }
        Ok(WalkState1D {
            x_min,
            x_max,
            scratch: vec![C64::new(0.0, 0.0); amps.len()],
            amps,
            support: support.unwrap_or(Span { lo: 0, hi: 0 }),
            time: 0,
        })
    }

    pub fn x_range(&self) -> (i64, i64) {
        (self.x_min, self.x_max)
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Bounding span of sites that may carry amplitude.
    pub fn support(&self) -> Span {
        self.support
    }

    pub fn amplitude(&self, x: i64, s: usize) -> C64 {
        if x < self.x_min || x > self.x_max {
            return C64::new(0.0, 0.0);
        }
        self.amps[2 * (x - self.x_min) as usize + s]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn ensure_room(&self) -> Result<()> {
        if self.support.inside(self.x_min, self.x_max) {
            Ok(())
        } else {
            Err(WalkError::BoundaryContact {
                step: self.time + 1,
            })
        }
    }

    pub(crate) fn advance(&mut self) {
        std::mem::swap(&mut self.amps, &mut self.scratch);
        self.support = self.support.grow();
        self.time += 1;
    }

    /// Rows `x,s,re,im` for every site inside the support.
    pub fn write_amplitudes_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,s,re,im")?;
        for x in self.support.lo..=self.support.hi {
            for (s, label) in [(0, 1), (1, -1)] {
                let a = self.amplitude(x, s);
                writeln!(out, "{x},{label},{:.16e},{:.16e}", a.re, a.im)?;
            }
        }
        Ok(())
    }
}

/// `a_{x,y,s}(t)` on a rectangular window, `coin_dim` components per site.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState2D {
    pub(crate) x_min: i64,
    pub(crate) x_max: i64,
    pub(crate) y_min: i64,
    pub(crate) y_max: i64,
    pub(crate) coin_dim: usize,
    pub(crate) ordering: Ordering,
    pub(crate) amps: Vec<C64>,
    pub(crate) scratch: Vec<C64>,
    pub(crate) support_x: Span,
    pub(crate) support_y: Span,
    pub(crate) time: u64,
    /// Position moments of `amps`, when the last step produced them.
    pub(crate) sums: Option<PositionSums>,
}

impl WalkState2D {
    /// Walker at the origin with `coin.len()` components (2 for the
    /// alternate walk, 4 for Grover-type walks, tagged `XyCross`).
    pub fn new_localized(coin: &[C64], capacity_steps: u64) -> Result<Self> {
        let ordering = match coin.len() {
            2 => Ordering::Qubit,
            4 => Ordering::XyCross,
            got => return Err(WalkError::CoinDimension { expected: 4, got }),
        };
        check_coin(coin)?;
        let half = capacity_steps as i64 + 1;
        let n = (2 * half + 1) as usize;
        let dim = coin.len();
        let mut amps = vec![C64::new(0.0, 0.0); n * n * dim];
        let origin = (half as usize * n + half as usize) * dim;
        amps[origin..origin + dim].copy_from_slice(coin);
        Ok(WalkState2D {
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
            coin_dim: dim,
            ordering,
            scratch: vec![C64::new(0.0, 0.0); amps.len()],
            amps,
            support_x: Span { lo: 0, hi: 0 },
            support_y: Span { lo: 0, hi: 0 },
            time: 0,
            sums: None,
        })
    }

    /// Arbitrary state on the given window; `f(x, y, s)` gives the amplitude.
    pub fn from_fn(
        (x_min, x_max): (i64, i64),
        (y_min, y_max): (i64, i64),
        coin_dim: usize,
        f: impl Fn(i64, i64, usize) -> C64,
    ) -> Result<Self> {
        let ordering = match coin_dim {
            2 => Ordering::Qubit,
            4 => Ordering::XyCross,
            got => return Err(WalkError::CoinDimension { expected: 4, got }),
        };
        let nx = (x_max - x_min + 1) as usize;
        let ny = (y_max - y_min + 1) as usize;
        let mut amps = Vec::with_capacity(nx * ny * coin_dim);
        let (mut sx, mut sy): (Option<Span>, Option<Span>) = (None, None);
        let widen = |sp: Option<Span>, v: i64| match sp {
            None => Some(Span { lo: v, hi: v }),
            Some(s) => Some(Span {
                lo: s.lo.min(v),
                hi: s.hi.max(v),
            }),
        };
        for y in y_min..=y_max {
            for x in x_min..=x_max {
                for s in 0..coin_dim {
                    let a = f(x, y, s);
                    if a != C64::new(0.0, 0.0) {
                        sx = widen(sx, x);
                        sy = widen(sy, y);
                    }
                    amps.push(a);
                }
            }
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(WalkError::NotNormalized { norm_sq });
        }
        Ok(WalkState2D {
            x_min,
            x_max,
            y_min,
            y_max,
            coin_dim,
            ordering,
            scratch: vec![C64::new(0.0, 0.0); amps.len()],
            amps,
            support_x: sx.unwrap_or(Span { lo: 0, hi: 0 }),
            support_y: sy.unwrap_or(Span { lo: 0, hi: 0 }),
            time: 0,
            sums: None,
        })
    }

    pub fn x_range(&self) -> (i64, i64) {
        (self.x_min, self.x_max)
    }

    pub fn y_range(&self) -> (i64, i64) {
        (self.y_min, self.y_max)
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn support(&self) -> (Span, Span) {
        (self.support_x, self.support_y)
    }

    pub(crate) fn nx(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub(crate) fn index(&self, x: i64, y: i64) -> usize {
        ((y - self.y_min) as usize * self.nx() + (x - self.x_min) as usize) * self.coin_dim
    }

    pub fn amplitude(&self, x: i64, y: i64, s: usize) -> C64 {
        if x < self.x_min || x > self.x_max || y < self.y_min || y > self.y_max {
            return C64::new(0.0, 0.0);
        }
        self.amps[self.index(x, y) + s]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn ensure_room(&self) -> Result<()> {
        if self.support_x.inside(self.x_min, self.x_max)
            && self.support_y.inside(self.y_min, self.y_max)
        {
            Ok(())
        } else {
            Err(WalkError::BoundaryContact {
                step: self.time + 1,
            })
        }
    }

    pub(crate) fn advance(&mut self) {
        std::mem::swap(&mut self.amps, &mut self.scratch);
        self.support_x = self.support_x.grow();
        self.support_y = self.support_y.grow();
        self.time += 1;
        self.sums = None;
    }

    /// Rows `x,y,s,re,im` for every site inside the support box.
    pub fn write_amplitudes_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,s,re,im")?;
        for y in self.support_y.lo..=self.support_y.hi {
            for x in self.support_x.lo..=self.support_x.hi {
                for s in 0..self.coin_dim {
                    let a = self.amplitude(x, y, s);
                    writeln!(out, "{x},{y},{s},{:.16e},{:.16e}", a.re, a.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Either lattice dimension; what runners and observers operate on.
#[derive(Debug, Clone, PartialEq)]
pub enum WalkState {
    OneD(WalkState1D),
    TwoD(WalkState2D),
}

impl WalkState {
    pub fn time(&self) -> u64 {
        match self {
            WalkState::OneD(s) => s.time(),
            WalkState::TwoD(s) => s.time(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            WalkState::OneD(s) => s.norm_sqr(),
            WalkState::TwoD(s) => s.norm_sqr(),
        }
    }

    /// Position marginal as CSV: `x,p` in 1D, `x,y,p` in 2D. Sites with
    /// exactly zero probability are omitted.
    pub fn write_marginal_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        match crate::observe::position_marginal(self) {
            crate::observe::Marginal::OneD(m) => {
                writeln!(out, "x,p")?;
                for (x, p) in m.iter() {
                    if p != 0.0 {
                        writeln!(out, "{x},{p:.16e}")?;
                    }
                }
            }
            crate::observe::Marginal::TwoD(m) => {
                writeln!(out, "x,y,p")?;
                for (x, y, p) in m.iter() {
                    if p != 0.0 {
                        writeln!(out, "{x},{y},{p:.16e}")?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_amplitudes_csv<W: Write>(&self, out: W) -> io::Result<()> {
        match self {
            WalkState::OneD(s) => s.write_amplitudes_csv(out),
            WalkState::TwoD(s) => s.write_amplitudes_csv(out),
        }
    }
}
