//! Observables: position marginals, distribution widths, the 45 degree
//! lattice map and period detection in width series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{self, Write};

use crate::error::{Result, WalkError};
use crate::evolve::Observer;
use crate::state::{WalkState, WalkState2D};

/// `P(x) = sum_s |a_{x,s}|^2` over a contiguous range of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal1D {
    pub x_min: i64,
    pub p: Vec<f64>,
}

impl Marginal1D {
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.p
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.x_min + i as i64, p))
    }

    pub fn get(&self, x: i64) -> f64 {
        usize::try_from(x - self.x_min)
            .ok()
            .and_then(|i| self.p.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// `P(x, y)` over a rectangle, rows of constant `y` contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal2D {
    pub x_min: i64,
    pub y_min: i64,
    pub nx: usize,
    pub ny: usize,
    pub p: Vec<f64>,
}

impl Marginal2D {
    pub fn zeros(x_range: (i64, i64), y_range: (i64, i64)) -> Self {
        let nx = (x_range.1 - x_range.0 + 1) as usize;
        let ny = (y_range.1 - y_range.0 + 1) as usize;
        Marginal2D {
            x_min: x_range.0,
            y_min: y_range.0,
            nx,
            ny,
            p: vec![0.0; nx * ny],
        }
    }

    /// Sites and probabilities, `x` fastest.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        self.p.iter().enumerate().map(|(i, &p)| {
            (
                self.x_min + (i % self.nx) as i64,
                self.y_min + (i / self.nx) as i64,
                p,
            )
        })
    }

    fn slot(&self, x: i64, y: i64) -> Option<usize> {
        let ix = usize::try_from(x - self.x_min)
            .ok()
            .filter(|&i| i < self.nx)?;
        let iy = usize::try_from(y - self.y_min)
            .ok()
            .filter(|&i| i < self.ny)?;
        Some(iy * self.nx + ix)
    }

    pub fn get(&self, x: i64, y: i64) -> f64 {
        self.slot(x, y).map_or(0.0, |i| self.p[i])
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Largest `|P - Q|` over the union of both supports.
    pub fn max_abs_diff(&self, other: &Marginal2D) -> f64 {
        let a = self.iter().map(|(x, y, p)| (p - other.get(x, y)).abs());
        let b = other.iter().map(|(x, y, q)| (q - self.get(x, y)).abs());
        a.chain(b).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    OneD(Marginal1D),
    TwoD(Marginal2D),
}

/// Position marginal over the support of the state.
pub fn position_marginal(state: &WalkState) -> Marginal {
    match state {
        WalkState::OneD(s) => {
            let span = s.support();
            let p = (span.lo..=span.hi)
                .map(|x| (0..2).map(|c| s.amplitude(x, c).norm_sqr()).sum())
                .collect();
            Marginal::OneD(Marginal1D { x_min: span.lo, p })
        }
        WalkState::TwoD(s) => {
            let (sx, sy) = s.support();
            let mut m = Marginal2D::zeros((sx.lo, sx.hi), (sy.lo, sy.hi));
            let dim = s.coin_dim();
            let amps = s.amplitudes();
            for y in sy.lo..=sy.hi {
                for x in sx.lo..=sx.hi {
                    let base = s.index(x, y);
                    let p = amps[base..base + dim].iter().map(|a| a.norm_sqr()).sum();
                    let i = m.slot(x, y).expect("inside support");
                    m.p[i] = p;
                }
            }
            Marginal::TwoD(m)
        }
    }
}

/// Standard deviations along `x`, `y` and the orthonormal diagonals
/// `u = (x+y)/sqrt 2`, `v = (x-y)/sqrt 2`. In 1D only `sigma_x` is set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Widths {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub sigma_d: f64,
    pub sigma_a: f64,
}

#[derive(Default)]
struct Moments {
    w: f64,
    s: f64,
    s2: f64,
}

impl Moments {
    fn add(&mut self, v: f64, p: f64) {
        self.w += p;
        self.s += p * v;
        self.s2 += p * v * v;
    }

    fn sigma(&self) -> f64 {
        if self.w == 0.0 {
            return 0.0;
        }
        let mean = self.s / self.w;
        (self.s2 / self.w - mean * mean).max(0.0).sqrt()
    }
}

pub fn marginal_widths(m: &Marginal) -> Widths {
    match m {
        Marginal::OneD(m) => {
            let mut mx = Moments::default();
            for (x, p) in m.iter() {
                mx.add(x as f64, p);
            }
            Widths {
                sigma_x: mx.sigma(),
                ..Widths::default()
            }
        }
        Marginal::TwoD(m) => {
            let mut acc: [Moments; 4] = Default::default();
            for (x, y, p) in m.iter() {
                if p == 0.0 {
                    continue;
                }
                let (x, y) = (x as f64, y as f64);
                acc[0].add(x, p);
                acc[1].add(y, p);
                acc[2].add((x + y) * FRAC_1_SQRT_2, p);
                acc[3].add((x - y) * FRAC_1_SQRT_2, p);
            }
            let [mx, my, md, ma] = acc;
            Widths {
                sigma_x: mx.sigma(),
                sigma_y: my.sigma(),
                sigma_d: md.sigma(),
                sigma_a: ma.sigma(),
            }
        }
    }
}

pub fn widths(state: &WalkState) -> Widths {
    match state {
        WalkState::OneD(_) => marginal_widths(&position_marginal(state)),
        WalkState::TwoD(s) => widths_2d(s),
    }
}

/// Raw position moments of a 2D distribution; the diagonal widths follow
/// from the covariance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct PositionSums {
    w: f64,
    x: f64,
    x2: f64,
    y: f64,
    y2: f64,
    xy: f64,
}

impl PositionSums {
    /// Moments of one row at height `y`, sites `x0, x0 + 1, ...` with
    /// probabilities `probs`.
    #[inline]
    pub(crate) fn row(y: i64, x0: i64, probs: impl Iterator<Item = f64>) -> PositionSums {
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (x, p) in (x0..).zip(probs) {
            let x = x as f64;
            w += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        let y = y as f64;
        PositionSums {
            w,
            x: m1,
            x2: m2,
            y: w * y,
            y2: w * y * y,
            xy: m1 * y,
        }
    }

    /// Callers fold rows in a fixed order, so results do not depend on how
    /// the work was split across threads.
    pub(crate) fn merge(self, o: PositionSums) -> PositionSums {
        PositionSums {
            w: self.w + o.w,
            x: self.x + o.x,
            x2: self.x2 + o.x2,
            y: self.y + o.y,
            y2: self.y2 + o.y2,
            xy: self.xy + o.xy,
        }
    }

    fn widths(&self) -> Widths {
        if self.w == 0.0 {
            return Widths::default();
        }
        let (mx, my) = (self.x / self.w, self.y / self.w);
        let vx = (self.x2 / self.w - mx * mx).max(0.0);
        let vy = (self.y2 / self.w - my * my).max(0.0);
        let cov = self.xy / self.w - mx * my;
        Widths {
            sigma_x: vx.sqrt(),
            sigma_y: vy.sqrt(),
            sigma_d: ((vx + vy + 2.0 * cov) / 2.0).max(0.0).sqrt(),
            sigma_a: ((vx + vy - 2.0 * cov) / 2.0).max(0.0).sqrt(),
        }
    }
}

/// Widths straight from the amplitudes, or from the moments the stepper
/// accumulated while writing them.
fn widths_2d(s: &WalkState2D) -> Widths {
    if let Some(sums) = s.sums {
        return sums.widths();
    }
    let (sx, sy) = (s.support_x, s.support_y);
    let dim = s.coin_dim;
    let n = (sx.hi - sx.lo + 1) as usize * dim;
    (sy.lo..=sy.hi)
        .into_par_iter()
        .map(|y| {
            let start = s.index(sx.lo, y);
            let sites = s.amps[start..start + n].chunks_exact(dim);
            PositionSums::row(
                y,
                sx.lo,
                sites.map(|a| a.iter().map(|z| z.norm_sqr()).sum()),
            )
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(PositionSums::default(), PositionSums::merge)
        .widths()
}

/// Widths recorded after successive steps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WidthSeries {
    pub t: Vec<u64>,
    pub widths: Vec<Widths>,
}

impl WidthSeries {
    pub fn push(&mut self, t: u64, w: Widths) {
        self.t.push(t);
        self.widths.push(w);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn sigma_x(&self) -> Vec<f64> {
        self.widths.iter().map(|w| w.sigma_x).collect()
    }

    pub fn sigma_y(&self) -> Vec<f64> {
        self.widths.iter().map(|w| w.sigma_y).collect()
    }

    pub fn sigma_d(&self) -> Vec<f64> {
        self.widths.iter().map(|w| w.sigma_d).collect()
    }

    pub fn sigma_a(&self) -> Vec<f64> {
        self.widths.iter().map(|w| w.sigma_a).collect()
    }

    /// Rows `t,sigma_x,sigma_y,sigma_d,sigma_a`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,sigma_x,sigma_y,sigma_d,sigma_a")?;
        for (t, w) in self.t.iter().zip(&self.widths) {
            writeln!(
                out,
                "{t},{:.16e},{:.16e},{:.16e},{:.16e}",
                w.sigma_x, w.sigma_y, w.sigma_d, w.sigma_a
            )?;
        }
        Ok(())
    }
}

impl Observer for WidthSeries {
    fn observe(&mut self, state: &WalkState) {
        self.push(state.time(), widths(state));
    }
}

/// Re-indexes a distribution living on one sublattice of the checkerboard
/// (`x + y` of fixed parity) onto the rotated lattice
/// `(u, v) = (floor((x+y)/2), floor((x-y)/2))`. Mass is moved, never split.
pub fn rotate_frame_45(dist: &Marginal2D) -> Result<Marginal2D> {
    let mut parity = None;
    let mut bounds: Option<(i64, i64, i64, i64)> = None;
    for (x, y, p) in dist.iter() {
        if p == 0.0 {
            continue;
        }
        let par = (x + y).rem_euclid(2);
        if *parity.get_or_insert(par) != par {
            return Err(WalkError::Checkerboard);
        }
        let (u, v) = ((x + y).div_euclid(2), (x - y).div_euclid(2));
        bounds = Some(match bounds {
            None => (u, u, v, v),
            Some((a, b, c, d)) => (a.min(u), b.max(u), c.min(v), d.max(v)),
        });
    }
    let (u0, u1, v0, v1) = bounds.unwrap_or((0, 0, 0, 0));
    let mut out = Marginal2D::zeros((u0, u1), (v0, v1));
    for (x, y, p) in dist.iter() {
        if p != 0.0 {
            let i = out
                .slot((x + y).div_euclid(2), (x - y).div_euclid(2))
                .expect("inside bounds");
            out.p[i] += p;
        }
    }
    Ok(out)
}

/// Autocorrelation score above which a lag counts as a period.
pub const PERIOD_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub period: usize,
    pub score: f64,
}

/// Periods of a series from its detrended autocorrelation: the Pearson
/// correlation between the series and itself shifted by each lag in
/// `1..=max_period`, keeping local maxima above [`PERIOD_THRESHOLD`].
/// Sorted by score, best first.
pub fn detect_periods(series: &[f64], max_period: usize) -> Result<Vec<Period>> {
    let needed = 3 * max_period;
    if max_period == 0 || series.len() < needed {
        return Err(WalkError::SeriesTooShort {
            len: series.len(),
            max_period,
            needed,
        });
    }
    let r = detrend(series);
    let scores: Vec<f64> = (0..=max_period + 1)
        .map(|lag| {
            if lag == 0 {
                1.0
            } else if lag >= r.len() - 1 {
                f64::NEG_INFINITY
            } else {
                pearson(&r[..r.len() - lag], &r[lag..])
            }
        })
        .collect();
    let mut out: Vec<Period> = (1..=max_period)
        .filter(|&l| {
            let s = scores[l];
            s > PERIOD_THRESHOLD && s > scores[l - 1] && s >= scores[l + 1]
        })
        .map(|l| Period {
            period: l,
            score: scores[l],
        })
        .collect();
    // scores equal to rounding (multiples of an exact period) rank by period
    let key = |p: &Period| (-(p.score * 1e9).round() as i64, p.period);
    out.sort_by_key(key);
    Ok(out)
}

fn detrend(y: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let mt = (n - 1.0) / 2.0;
    let my = y.iter().sum::<f64>() / n;
    let (mut sty, mut stt) = (0.0, 0.0);
    for (i, &v) in y.iter().enumerate() {
        let dt = i as f64 - mt;
        sty += dt * (v - my);
        stt += dt * dt;
    }
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    y.iter()
        .enumerate()
        .map(|(i, &v)| v - my - slope * (i as f64 - mt))
        .collect()
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    let scale = (saa * sbb).sqrt();
    // constant windows carry no periodicity
    if scale <= 1e-300 || saa <= 1e-24 * n || sbb <= 1e-24 * n {
        return 0.0;
    }
    sab / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{WalkState1D, WalkState2D};
    use num_complex::Complex64 as C64;
    use std::f64::consts::PI;

    fn from_points(points: &[(i64, i64, f64)]) -> Marginal2D {
        let xs = points.iter().map(|p| p.0);
        let ys = points.iter().map(|p| p.1);
        let mut m = Marginal2D::zeros(
            (xs.clone().min().unwrap(), xs.max().unwrap()),
            (ys.clone().min().unwrap(), ys.max().unwrap()),
        );
        for &(x, y, p) in points {
            let i = m.slot(x, y).unwrap();
            m.p[i] += p;
        }
        m
    }

    #[test]
    fn delta_marginals() {
        let s = WalkState1D::new_localized(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 4).unwrap();
        let Marginal::OneD(m) = position_marginal(&WalkState::OneD(s)) else {
            unreachable!()
        };
        assert_eq!(m.get(0), 1.0);
        assert_eq!(m.total(), 1.0);
        let c = 0.5;
        let s = WalkState2D::new_localized(&[C64::new(c, 0.0); 4], 4).unwrap();
        let state = WalkState::TwoD(s);
        let w = widths(&state);
        assert_eq!(w, Widths::default());
    }

    #[test]
    fn cross_widths() {
        let m = from_points(&[(1, 0, 0.25), (-1, 0, 0.25), (0, 1, 0.25), (0, -1, 0.25)]);
        let w = marginal_widths(&Marginal::TwoD(m));
        for s in [w.sigma_x, w.sigma_y, w.sigma_d, w.sigma_a] {
            assert!((s - FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn direct_widths_match_marginal_widths() {
        let amp = |x: i64, y: i64, c: usize| {
            let t = (x * 7 + y * 3 + c as i64) as f64;
            C64::new(t.sin(), (1.3 * t).cos()) * ((x * x + 2 * y * y) as f64 / -9.0).exp()
        };
        let norm = (-6..=6)
            .flat_map(|x| (-5..=7).flat_map(move |y| (0..4).map(move |c| amp(x, y, c))))
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let s = WalkState2D::from_fn((-6, 6), (-5, 7), 4, |x, y, c| amp(x, y, c) / norm).unwrap();
        let state = WalkState::TwoD(s);
        let fast = widths(&state);
        let slow = marginal_widths(&position_marginal(&state));
        for (a, b) in [
            (fast.sigma_x, slow.sigma_x),
            (fast.sigma_y, slow.sigma_y),
            (fast.sigma_d, slow.sigma_d),
            (fast.sigma_a, slow.sigma_a),
        ] {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn rotate_delta_and_corners() {
        let m = from_points(&[(0, 0, 1.0)]);
        let r = rotate_frame_45(&m).unwrap();
        assert_eq!(r.get(0, 0), 1.0);
        let m = from_points(&[(1, 1, 0.25), (1, -1, 0.25), (-1, 1, 0.25), (-1, -1, 0.25)]);
        let r = rotate_frame_45(&m).unwrap();
        for (u, v) in [(1, 0), (0, 1), (0, -1), (-1, 0)] {
            assert_eq!(r.get(u, v), 0.25);
        }
        assert_eq!(r.total(), 1.0);
    }

    #[test]
    fn rotate_rejects_mixed_parity() {
        let m = from_points(&[(0, 0, 0.5), (1, 0, 0.5)]);
        assert_eq!(rotate_frame_45(&m), Err(WalkError::Checkerboard));
    }

    #[test]
    fn rotate_odd_sublattice() {
        let m = from_points(&[(1, 0, 0.5), (0, 1, 0.5)]);
        let r = rotate_frame_45(&m).unwrap();
        assert_eq!(r.get(0, 0), 0.5);
        assert_eq!(r.get(0, -1), 0.5);
    }

    #[test]
    fn sinusoid_period_8() {
        let s: Vec<f64> = (0..200)
            .map(|t| (2.0 * PI * t as f64 / 8.0).sin())
            .collect();
        let p = detect_periods(&s, 20).unwrap();
        assert_eq!(p[0].period, 8);
        assert!(p[0].score > 0.95);
    }

    #[test]
    fn exact_periodic_sequence_scores_one() {
        let base = [0.3, -1.0, 2.0, 0.7, 0.1];
        let s: Vec<f64> = (0..100).map(|t| base[t % 5] + 0.01 * t as f64).collect();
        let p = detect_periods(&s, 12).unwrap();
        assert_eq!(p[0].period, 5);
        assert!((p[0].score - 1.0).abs() < 1e-3);
        assert!(p.iter().any(|q| q.period == 10));
    }

    #[test]
    fn constant_and_short_series() {
        assert!(detect_periods(&[2.0; 60], 10).unwrap().is_empty());
        assert!(matches!(
            detect_periods(&[1.0; 10], 4),
            Err(WalkError::SeriesTooShort { needed: 12, .. })
        ));
    }

    #[test]
    fn width_csv() {
        let mut ws = WidthSeries::default();
        ws.push(1, Widths::default());
        let mut out = Vec::new();
        ws.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "t,sigma_x,sigma_y,sigma_d,sigma_a\n1,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0\n"
        );
    }
}
