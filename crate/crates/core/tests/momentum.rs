//! One step of each stepper against the momentum-space unitary at the
//! field-shifted quasimomentum, via Fourier transforms of the states.

use eqwalk::coin;
use eqwalk::evolve::{step_1d, step_alternate_2d, step_grover_like_2d, Walk};
use eqwalk::spectrum::momentum_unitary;
use eqwalk::{FieldPhase, WalkState1D, WalkState2D};
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn ft_1d(s: &WalkState1D, k: f64) -> [C64; 2] {
    let (lo, hi) = s.x_range();
    let mut out = [zero(); 2];
    for x in lo..=hi {
        let e = C64::from_polar(1.0, k * x as f64);
        for (c, o) in out.iter_mut().enumerate() {
            *o += e * s.amplitude(x, c);
        }
    }
    out
}

fn ft_2d(s: &WalkState2D, kx: f64, ky: f64) -> Vec<C64> {
    let (x0, x1) = s.x_range();
    let (y0, y1) = s.y_range();
    let mut out = vec![zero(); s.coin_dim()];
    for y in y0..=y1 {
        for x in x0..=x1 {
            let e = C64::from_polar(1.0, kx * x as f64 + ky * y as f64);
            for (c, o) in out.iter_mut().enumerate() {
                *o += e * s.amplitude(x, y, c);
            }
        }
    }
    out
}

fn random_state_2d(rng: &mut StdRng, dim: usize) -> WalkState2D {
    let raw: Vec<C64> = (0..25 * dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    WalkState2D::from_fn((-5, 5), (-5, 5), dim, |x, y, s| {
        if x.abs() <= 2 && y.abs() <= 2 {
            raw[(((y + 2) * 5 + x + 2) as usize) * dim + s] / n
        } else {
            zero()
        }
    })
    .unwrap()
}

#[test]
fn one_step_is_momentum_unitary_at_shifted_k() {
    let mut rng = StdRng::seed_from_u64(14);
    let phi = FieldPhase::real(0.37).unwrap();

    let raw: Vec<C64> = (0..10)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut s = WalkState1D::from_fn(-6, 6, |x, c| {
        if x.abs() <= 2 {
            raw[((x + 2) as usize) * 2 + c] / n
        } else {
            zero()
        }
    })
    .unwrap();
    let walk = Walk::OneD {
        theta: 0.7,
        alpha: 0.3,
        beta: -0.2,
    };
    let before = s.clone();
    step_1d(&mut s, &coin::make_rotation_coin(0.3, -0.2, 0.7), &phi).unwrap();
    for k in [-2.0, 0.0, 0.4, 3.0] {
        let u = momentum_unitary(&walk, k + phi.radians(), 0.0).unwrap();
        let psi = ft_1d(&before, k + phi.radians());
        let want = u * DVector::from_column_slice(&psi);
        let got = ft_1d(&s, k);
        for c in 0..2 {
            assert!((want[c] - got[c]).norm() < 1e-12);
        }
    }

    let (fx, fy) = (
        FieldPhase::rational(1, 6).unwrap(),
        FieldPhase::real(-0.8).unwrap(),
    );
    for (walk, c) in [
        (Walk::Grover2d, coin::grover_coin()),
        (Walk::Dft2d, coin::dft_coin()),
        (Walk::Hadamard2d, coin::hadamard2_coin()),
    ] {
        let mut s = random_state_2d(&mut rng, 4);
        let before = s.clone();
        step_grover_like_2d(&mut s, &c, &fx, &fy).unwrap();
        for (kx, ky) in [(0.3, -1.1), (2.5, 0.0), (-PI, 1.7)] {
            let (qx, qy) = (kx + fx.radians(), ky + fy.radians());
            let want = momentum_unitary(&walk, qx, qy).unwrap()
                * DVector::from_column_slice(&ft_2d(&before, qx, qy));
            let got = ft_2d(&s, kx, ky);
            for j in 0..4 {
                assert!((want[j] - got[j]).norm() < 1e-12, "{walk:?}");
            }
        }
    }

    let walk = Walk::Alternate2d {
        theta_x: 0.5,
        theta_y: 1.2,
        alpha: 0.0,
        beta: 0.0,
    };
    let mut s = random_state_2d(&mut rng, 2);
    let before = s.clone();
    step_alternate_2d(
        &mut s,
        &coin::make_rotation_coin(0.0, 0.0, 0.5),
        &coin::make_rotation_coin(0.0, 0.0, 1.2),
        &fx,
        &fy,
    )
    .unwrap();
    for (kx, ky) in [(0.3, -1.1), (2.5, 0.0)] {
        let (qx, qy) = (kx + fx.radians(), ky + fy.radians());
        let want = momentum_unitary(&walk, qx, qy).unwrap()
            * DVector::from_column_slice(&ft_2d(&before, qx, qy));
        let got = ft_2d(&s, kx, ky);
        for j in 0..2 {
            assert!((want[j] - got[j]).norm() < 1e-12);
        }
    }
}
