//! Brute-force evolution: the coin, shift and phase operators of a walk as
//! explicit dense matrices on a small window, applied one factor at a time.

use eqwalk::coin::{self, CoinOperator};
use eqwalk::evolve::{Walk, WalkSpec, Walker};
use eqwalk::{Ordering, Result, WalkState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Component moves of the four-component walks, `(X+, Y-, Y+, X-)`.
const CROSS: [(i64, i64); 4] = [(1, 0), (0, -1), (0, 1), (-1, 0)];
const ALONG_X: [(i64, i64); 2] = [(1, 0), (-1, 0)];
const ALONG_Y: [(i64, i64); 2] = [(0, 1), (0, -1)];

/// Basis `(x, y, s)` on `[-half, half]` per axis, `s` fastest, then `x`, then `y`.
#[derive(Debug, Clone, Copy)]
pub struct Lattice {
    pub half: i64,
    pub two_d: bool,
    pub dim: usize,
}

impl Lattice {
    fn n(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    pub fn size(&self) -> usize {
        let sites = if self.two_d {
            self.n() * self.n()
        } else {
            self.n()
        };
        sites * self.dim
    }

    pub fn index(&self, x: i64, y: i64, s: usize) -> Option<usize> {
        let l = self.half;
        if x.abs() > l || y.abs() > l || (!self.two_d && y != 0) {
            return None;
        }
        let row = if self.two_d { (y + l) as usize } else { 0 };
        Some((row * self.n() + (x + l) as usize) * self.dim + s)
    }

    pub fn sites(&self) -> Vec<(i64, i64)> {
        let l = self.half;
        let ys = if self.two_d { -l..=l } else { 0..=0 };
        ys.flat_map(|y| (-l..=l).map(move |x| (x, y))).collect()
    }

    /// `1 (x) C` on every site.
    pub fn coin(&self, c: &CoinOperator) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(self.size(), self.size(), ZERO);
        for (x, y) in self.sites() {
            for r in 0..self.dim {
                for col in 0..self.dim {
                    m[(self.index(x, y, r).unwrap(), self.index(x, y, col).unwrap())] =
                        c.entry(r, col);
                }
            }
        }
        m
    }

    /// Component `s` moves by `moves[s]`; amplitude leaving the window is dropped.
    pub fn shift(&self, moves: &[(i64, i64)]) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(self.size(), self.size(), ZERO);
        for (x, y) in self.sites() {
            for (s, &(dx, dy)) in moves.iter().enumerate() {
                if let Some(to) = self.index(x + dx, y + dy, s) {
                    m[(to, self.index(x, y, s).unwrap())] = C64::new(1.0, 0.0);
                }
            }
        }
        m
    }

    /// `e^{i(phi_x x + phi_y y)}` on every site.
    pub fn phase(&self, phi_x: f64, phi_y: f64) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(self.size(), self.size(), ZERO);
        for (x, y) in self.sites() {
            let ph = C64::from_polar(1.0, phi_x * x as f64 + phi_y * y as f64);
            for s in 0..self.dim {
                let i = self.index(x, y, s).unwrap();
                m[(i, i)] = ph;
            }
        }
        m
    }

    pub fn localized(&self, coin: &[C64]) -> DVector<C64> {
        let mut v = DVector::from_element(self.size(), ZERO);
        for (s, c) in coin.iter().enumerate() {
            v[self.index(0, 0, s).unwrap()] = *c;
        }
        v
    }

    /// Largest amplitude difference between `v` and a stepper state.
    pub fn max_diff(&self, v: &DVector<C64>, state: &WalkState) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, y) in self.sites() {
            for s in 0..self.dim {
                let a = match state {
                    WalkState::OneD(st) => st.amplitude(x, s),
                    WalkState::TwoD(st) => st.amplitude(x, y, s),
                };
                worst = worst.max((a - v[self.index(x, y, s).unwrap()]).norm());
            }
        }
        worst
    }
}

/// Window that holds `steps` steps without losing amplitude.
pub fn lattice_for(walk: &Walk, steps: u64) -> Lattice {
    Lattice {
        half: steps as i64 + 1,
        two_d: walk.is_2d(),
        dim: walk.coin_dim(),
    }
}

/// One step of `spec` as dense factors, leftmost applied last.
pub fn step_factors(spec: &WalkSpec, lat: &Lattice) -> Result<Vec<DMatrix<C64>>> {
    let phase = lat.phase(spec.field_x.radians(), spec.field_y.radians());
    let four = |c: CoinOperator| vec![phase.clone(), lat.shift(&CROSS), lat.coin(&c)];
    Ok(match &spec.walk {
        Walk::OneD { theta, alpha, beta } => vec![
            phase.clone(),
            lat.shift(&ALONG_X),
            lat.coin(&coin::make_rotation_coin(*alpha, *beta, *theta)),
        ],
        Walk::Alternate2d {
            theta_x,
            theta_y,
            alpha,
            beta,
        } => vec![
            phase.clone(),
            lat.shift(&ALONG_Y),
            lat.coin(&coin::make_rotation_coin(*alpha, *beta, *theta_y)),
            lat.shift(&ALONG_X),
            lat.coin(&coin::make_rotation_coin(*alpha, *beta, *theta_x)),
        ],
        Walk::Grover2d => four(coin::grover_coin()),
        Walk::Dft2d => four(coin::dft_coin()),
        Walk::Hadamard2d => four(coin::hadamard2_coin()),
        Walk::Custom4 { coin: name } => four(coin::reorder_coin(
            &coin::coin_by_name(name, 0.0, 0.0, 0.0)?,
            Ordering::XyCross,
        )?),
    })
}

/// Runs the stepper and the dense factors side by side for `spec.steps`
/// steps; entry `t - 1` is the largest amplitude difference after step `t`.
pub fn stepper_deviation(spec: &WalkSpec) -> Result<Vec<f64>> {
    let lat = lattice_for(&spec.walk, spec.steps);
    let factors = step_factors(spec, &lat)?;
    let mut walker = Walker::with_capacity(spec, spec.steps)?;
    let mut v = lat.localized(&spec.initial_coin());
    let mut out = Vec::with_capacity(spec.steps as usize);
    for _ in 0..spec.steps {
        walker.step()?;
        for f in factors.iter().rev() {
            v = f * v;
        }
        out.push(lat.max_diff(&v, walker.state()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use eqwalk::FieldPhase;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_4, PI};

    const T_MAX: u64 = 10;
    const TOL: f64 = 1e-12;

    fn random_coin(rng: &mut StdRng, dim: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|c| c / n).collect()
    }

    fn check(spec: &WalkSpec) {
        let dev = stepper_deviation(spec).unwrap();
        for (t, d) in dev.iter().enumerate() {
            assert!(*d < TOL, "{:?} t={}: max |diff| = {d:e}", spec.walk, t + 1);
        }
    }

    #[test]
    fn shift_moves_a_delta() {
        let lat = Lattice {
            half: 2,
            two_d: true,
            dim: 4,
        };
        let v = lat.shift(&CROSS) * lat.localized(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(v[lat.index(0, -1, 1).unwrap()], C64::new(1.0, 0.0));
        assert_eq!(v.iter().map(|z| z.norm_sqr()).sum::<f64>(), 1.0);
    }

    #[test]
    fn one_d_hadamard_zero_field() {
        let walk = Walk::OneD {
            theta: FRAC_PI_4,
            alpha: 0.0,
            beta: 0.0,
        };
        check(&WalkSpec::new(
            walk,
            FieldPhase::ZERO,
            FieldPhase::ZERO,
            T_MAX,
        ));
    }

    #[test]
    fn one_d_general_coins_and_fields() {
        let mut rng = StdRng::seed_from_u64(11);
        let fields = [
            FieldPhase::rational(1, 7).unwrap(),
            FieldPhase::rational(-3, 8).unwrap(),
            FieldPhase::real(0.917).unwrap(),
        ];
        for phi in fields {
            let walk = Walk::OneD {
                theta: rng.gen_range(0.0..PI),
                alpha: rng.gen_range(-PI..PI),
                beta: rng.gen_range(-PI..PI),
            };
            let spec = WalkSpec::new(walk, phi, FieldPhase::ZERO, T_MAX)
                .with_initial(&random_coin(&mut rng, 2));
            check(&spec);
        }
    }

    #[test]
    fn four_component_walks() {
        let mut rng = StdRng::seed_from_u64(12);
        let phi_x = FieldPhase::rational(1, 7).unwrap();
        let phi_y = FieldPhase::real(-0.4).unwrap();
        let walks = [
            Walk::Grover2d,
            Walk::Dft2d,
            Walk::Hadamard2d,
            Walk::Custom4 {
                coin: "hadamard2-permuted".into(),
            },
        ];
        for walk in walks {
            let spec =
                WalkSpec::new(walk, phi_x, phi_y, T_MAX).with_initial(&random_coin(&mut rng, 4));
            check(&spec);
        }
    }

    #[test]
    fn custom_coin_matches_its_own_dense_factors() {
        // the permuted coin, brought back to XyCross, is the plain H (x) H coin
        let lat = lattice_for(&Walk::Hadamard2d, 1);
        let spec = WalkSpec::new(
            Walk::Custom4 {
                coin: "hadamard2-permuted".into(),
            },
            FieldPhase::ZERO,
            FieldPhase::ZERO,
            1,
        );
        let got = step_factors(&spec, &lat).unwrap();
        let want = lat.coin(&coin::hadamard2_coin());
        assert!((&got[2] - want).norm() < 1e-15);
    }

    #[test]
    fn alternate_walk() {
        let mut rng = StdRng::seed_from_u64(13);
        let walk = Walk::Alternate2d {
            theta_x: 0.9,
            theta_y: 0.35,
            alpha: 0.2,
            beta: 0.2,
        };
        let spec = WalkSpec::new(
            walk,
            FieldPhase::rational(2, 9).unwrap(),
            FieldPhase::rational(1, 5).unwrap(),
            T_MAX,
        )
        .with_initial(&random_coin(&mut rng, 2));
        check(&spec);
    }
}
