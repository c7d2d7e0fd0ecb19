//! Coin unitaries.
//!
//! Two-component coins act on the qubit `(s = +1, s = -1)`. Four-component
//! coins carry an explicit [`Ordering`] tag describing which displacement
//! direction each component stands for; the 2D steppers expect
//! [`Ordering::XyCross`].

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Result, WalkError};

/// Entrywise tolerance of `C C^dagger = I`.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Component convention of a coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ordering {
    /// Two-component coin, `col(+1, -1)`.
    Qubit,
    /// `col(X+, Y-, Y+, X-)`.
    XyCross,
    /// `col(d+, a-, a+, d-)`, the tensor-product convention; slot-for-slot
    /// it is `XyCross` rotated by 45 degrees.
    DiagAnti,
    /// `col(x+, x-, y+, y-)`.
    XxYy,
}

/// Displacement direction carried by a four-component coin slot, expressed
/// in the frame where `DiagAnti` has been rotated onto the axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
}

impl Ordering {
    pub fn dim(self) -> usize {
        match self {
            Ordering::Qubit => 2,
            _ => 4,
        }
    }

    fn slots(self) -> Option<[Direction; 4]> {
        use Direction::*;
        match self {
            Ordering::Qubit => None,
            Ordering::XyCross | Ordering::DiagAnti => Some([XPlus, YMinus, YPlus, XMinus]),
            Ordering::XxYy => Some([XPlus, XMinus, YPlus, YMinus]),
        }
    }
}

/// A small unitary acting on the internal degree of freedom of the walker.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator {
    entries: DMatrix<C64>,
    ordering: Ordering,
}

impl CoinOperator {
    /// Wraps a matrix, checking dimension and unitarity.
    pub fn new(entries: DMatrix<C64>, ordering: Ordering) -> Result<Self> {
        if entries.nrows() != ordering.dim() || entries.ncols() != ordering.dim() {
            return Err(WalkError::CoinDimension {
                expected: ordering.dim(),
                got: entries.nrows(),
            });
        }
        let coin = CoinOperator { entries, ordering };
        let dev = coin.unitarity_defect();
        if dev > UNITARITY_TOL {
            return Err(WalkError::InvalidSpec(format!(
                "coin is not unitary (max |C C^+ - I| = {dev:e})"
            )));
        }
        Ok(coin)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// Largest entrywise deviation of `C C^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let prod = &self.entries * self.entries.adjoint();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Row-major copy used by the stepping kernels.
    pub(crate) fn rows2(&self) -> [[C64; 2]; 2] {
        let m = &self.entries;
        [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
    }

    pub(crate) fn rows4(&self) -> [[C64; 4]; 4] {
        let m = &self.entries;
        let mut out = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = m[(i, j)];
            }
        }
        out
    }
}

/// General SU(2) coin
/// `[[e^{i(a+b)} cos t, e^{i(a-b)} sin t], [-e^{-i(a-b)} sin t, e^{-i(a+b)} cos t]]`.
///
/// With `alpha = beta = 0` this is `exp(i theta sigma_y)`; `theta = pi/4` gives
/// the Hadamard-like coin `[[1, 1], [-1, 1]] / sqrt(2)`.
pub fn make_rotation_coin(alpha: f64, beta: f64, theta: f64) -> CoinOperator {
    let (s, c) = theta.sin_cos();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from_polar(c, alpha + beta),
            C64::from_polar(s, alpha - beta),
            -C64::from_polar(s, -(alpha - beta)),
            C64::from_polar(c, -(alpha + beta)),
        ],
    );
    CoinOperator {
        entries: m,
        ordering: Ordering::Qubit,
    }
}

/// Grover coin, `1/2 - delta_jk`. Invariant under any relabelling of the slots.
pub fn grover_coin() -> CoinOperator {
    let m = DMatrix::from_fn(4, 4, |i, j| C64::new(if i == j { -0.5 } else { 0.5 }, 0.0));
    CoinOperator {
        entries: m,
        ordering: Ordering::XyCross,
    }
}

/// Four-point discrete Fourier coin, entries `i^{jk} / 2`.
pub fn dft_coin() -> CoinOperator {
    const POWERS: [C64; 4] = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    let m = DMatrix::from_fn(4, 4, |j, k| POWERS[(j * k) % 4] * 0.5);
    CoinOperator {
        entries: m,
        ordering: Ordering::XyCross,
    }
}

/// Separable Hadamard coin `H (x) H` with `H = [[1, 1], [1, -1]] / sqrt(2)`,
/// written for the `XyCross` slot order.
pub fn hadamard2_coin() -> CoinOperator {
    let h = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(-FRAC_1_SQRT_2, 0.0),
        ],
    );
    CoinOperator {
        entries: h.kronecker(&h),
        ordering: Ordering::XyCross,
    }
}

/// Re-expresses a four-component coin in another slot convention:
/// returns `P C P^dagger` where `P` maps source slots onto target slots.
pub fn reorder_coin(coin: &CoinOperator, target: Ordering) -> Result<CoinOperator> {
    let (src, dst) = match (coin.ordering.slots(), target.slots()) {
        (Some(s), Some(d)) => (s, d),
        _ => return Err(WalkError::OrderingOnQubit),
    };
    // perm[i] = source slot holding the direction of target slot i
    let mut perm = [0usize; 4];
    for (i, dir) in dst.iter().enumerate() {
        perm[i] = src
            .iter()
            .position(|d| d == dir)
            .expect("every ordering lists all four directions");
    }
    let m = DMatrix::from_fn(4, 4, |i, j| coin.entries[(perm[i], perm[j])]);
    Ok(CoinOperator {
        entries: m,
        ordering: target,
    })
}

/// Coins selectable by name from configuration files.
pub fn coin_by_name(name: &str, alpha: f64, beta: f64, theta: f64) -> Result<CoinOperator> {
    match name {
        "rotation" => Ok(make_rotation_coin(alpha, beta, theta)),
        "grover" => Ok(grover_coin()),
        "dft" => Ok(dft_coin()),
        "hadamard2" => Ok(hadamard2_coin()),
        "hadamard2-permuted" => reorder_coin(&hadamard2_coin(), Ordering::XxYy),
        other => Err(WalkError::InvalidSpec(format!("unknown coin '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn real_matrix(n: usize, scale: f64, rows: &[f64]) -> DMatrix<C64> {
        DMatrix::from_row_slice(
            n,
            n,
            &rows.iter().map(|&v| c(v * scale, 0.0)).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rotation_at_quarter_pi_is_hadamard_like() {
        let coin = make_rotation_coin(0.0, 0.0, PI / 4.0);
        let expected = real_matrix(2, FRAC_1_SQRT_2, &[1.0, 1.0, -1.0, 1.0]);
        assert!(max_diff(coin.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn rotation_at_zero_is_identity() {
        let coin = make_rotation_coin(0.0, 0.0, 0.0);
        assert!(max_diff(coin.matrix(), &DMatrix::identity(2, 2)) < 1e-15);
    }

    #[test]
    fn rotation_generic_angles_unitary() {
        let coin = make_rotation_coin(0.3, 0.7, 1.1);
        assert!(coin.unitarity_defect() < 1e-14);
        assert_eq!(coin.ordering(), Ordering::Qubit);
    }

    #[test]
    fn rotation_determinant_is_one() {
        for i in 0..50 {
            let theta = -3.0 + 0.13 * i as f64;
            let det = make_rotation_coin(0.0, 0.0, theta).matrix().determinant();
            assert_abs_diff_eq!(det.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(det.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn grover_entries_and_involution() {
        let g = grover_coin();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { -0.5 } else { 0.5 };
                assert_eq!(g.entry(i, j), c(want, 0.0));
            }
        }
        let sq = g.matrix() * g.matrix();
        assert!(max_diff(&sq, &DMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn grover_invariant_under_relabelling() {
        let g = grover_coin();
        for target in [Ordering::XxYy, Ordering::DiagAnti, Ordering::XyCross] {
            let r = reorder_coin(&g, target).unwrap();
            assert_eq!(r.matrix(), g.matrix());
            assert_eq!(r.ordering(), target);
        }
        // and under every simultaneous row/column permutation
        let perms = permutations4();
        for p in perms {
            let m = DMatrix::from_fn(4, 4, |i, j| g.entry(p[i], p[j]));
            assert_eq!(&m, g.matrix());
        }
    }

    fn permutations4() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        let mut seen = [false; 4];
                        p.iter().for_each(|&i| seen[i] = true);
                        if seen.iter().all(|&s| s) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn dft_rows_and_order_four() {
        let d = dft_coin();
        let row1: Vec<C64> = (0..4).map(|k| d.entry(1, k)).collect();
        assert_eq!(
            row1,
            vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)]
        );
        assert!(d.unitarity_defect() < 1e-14);
        let m = d.matrix();
        let fourth = m * m * m * m;
        assert!(max_diff(&fourth, &DMatrix::identity(4, 4)) < 1e-14);
    }

    #[test]
    fn hadamard2_matches_printed_signs() {
        let h = hadamard2_coin();
        let expected = real_matrix(
            4,
            0.5,
            &[
                1.0, 1.0, 1.0, 1.0, //
                1.0, -1.0, 1.0, -1.0, //
                1.0, 1.0, -1.0, -1.0, //
                1.0, -1.0, -1.0, 1.0,
            ],
        );
        assert!(max_diff(h.matrix(), &expected) < 1e-15);
        let sq = h.matrix() * h.matrix();
        assert!(max_diff(&sq, &DMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn hadamard2_permuted_is_printed_matrix() {
        let hp = reorder_coin(&hadamard2_coin(), Ordering::XxYy).unwrap();
        let expected = real_matrix(
            4,
            0.5,
            &[
                1.0, 1.0, 1.0, 1.0, //
                1.0, 1.0, -1.0, -1.0, //
                1.0, -1.0, -1.0, 1.0, //
                1.0, -1.0, 1.0, -1.0,
            ],
        );
        assert!(max_diff(hp.matrix(), &expected) < 1e-15);
        assert_eq!(hp.ordering(), Ordering::XxYy);
        let by_name = coin_by_name("hadamard2-permuted", 0.0, 0.0, 0.0).unwrap();
        assert_eq!(by_name, hp);
    }

    #[test]
    fn reorder_round_trip() {
        for coin in [dft_coin(), hadamard2_coin()] {
            for target in [Ordering::XxYy, Ordering::DiagAnti] {
                let there = reorder_coin(&coin, target).unwrap();
                let back = reorder_coin(&there, Ordering::XyCross).unwrap();
                assert_eq!(back, coin);
            }
        }
    }

    #[test]
    fn reorder_preserves_spectrum() {
        let d = dft_coin();
        let r = reorder_coin(&d, Ordering::XxYy).unwrap();
        let mut a = crate::spectrum::eigenphases(d.matrix()).unwrap();
        let mut b = crate::spectrum::eigenphases(r.matrix()).unwrap();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn reorder_rejects_qubit() {
        let q = make_rotation_coin(0.0, 0.0, 0.4);
        assert_eq!(
            reorder_coin(&q, Ordering::XxYy),
            Err(WalkError::OrderingOnQubit)
        );
    }

    #[test]
    fn constructors_are_unitary() {
        for coin in [grover_coin(), dft_coin(), hadamard2_coin()] {
            assert!(coin.unitarity_defect() < UNITARITY_TOL);
        }
    }

    #[test]
    fn new_rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(CoinOperator::new(m, Ordering::Qubit).is_err());
        let wrong_dim = DMatrix::identity(2, 2);
        assert!(CoinOperator::new(wrong_dim, Ordering::XyCross).is_err());
    }
}
