//! Smith normal form over the integers.
//!
//! Pivoting is deterministic: the pivot is the entry of smallest nonzero
//! absolute value in the active submatrix, ties broken by lowest row-major
//! index. Equal inputs therefore always produce equal transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d₁ | d₂ | …` (zeros last).
#[derive(Clone, Debug)]
pub struct SmithNormalForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithNormalForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithNormalForm {
    let mut e = Elimination::new(m, Tracking::LEFT_AND_RIGHT);
    e.run();
    SmithNormalForm {
        u: e.left.expect("tracked"),
        d: e.a,
        v: e.right.expect("tracked"),
    }
}

/// Nonzero diagonal entries of the Smith form, without transforms.
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let mut e = Elimination::new(m, Tracking::NONE);
    e.run();
    e.diagonal_nonzero()
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tracking {
    pub left: bool,
    pub left_inverse: bool,
    pub right: bool,
}

impl Tracking {
    pub const NONE: Self = Self {
        left: false,
        left_inverse: false,
        right: false,
    };
    pub const LEFT_AND_RIGHT: Self = Self {
        left: true,
        left_inverse: false,
        right: true,
    };
}

/// Working state of a Smith reduction with optional transform bookkeeping.
pub(crate) struct Elimination {
    pub a: IntMatrix,
    pub left: Option<IntMatrix>,
    pub left_inverse: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
}

impl Elimination {
    pub fn new(m: &IntMatrix, track: Tracking) -> Self {
        let (r, c) = (m.rows(), m.cols());
        Self {
            a: m.clone(),
            left: track.left.then(|| IntMatrix::identity(r)),
            left_inverse: track.left_inverse.then(|| IntMatrix::identity(r)),
            right: track.right.then(|| IntMatrix::identity(c)),
        }
    }

    pub fn diagonal_nonzero(&self) -> Vec<BigInt> {
        (0..self.a.rows().min(self.a.cols()))
            .map(|i| self.a[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap_rows(i, j);
        if let Some(u) = &mut self.left {
            u.swap_rows(i, j);
        }
        if let Some(ui) = &mut self.left_inverse {
            ui.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap_cols(i, j);
        if let Some(v) = &mut self.right {
            v.swap_cols(i, j);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_row_multiple(dst, src, q);
        if let Some(u) = &mut self.left {
            u.add_row_multiple(dst, src, q);
        }
        if let Some(ui) = &mut self.left_inverse {
            ui.add_col_multiple(src, dst, &-q);
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_col_multiple(dst, src, q);
        if let Some(v) = &mut self.right {
            v.add_col_multiple(dst, src, q);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some(u) = &mut self.left {
            u.negate_row(i);
        }
        if let Some(ui) = &mut self.left_inverse {
            ui.negate_col(i);
        }
    }

    fn smallest_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some(b) if self.a[b].magnitude() <= x.magnitude() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn smallest_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        for j in t..self.a.cols() {
            let x = &self.a[(t, j)];
            if !x.is_zero()
                && (self.a[best].is_zero() || x.magnitude() < self.a[best].magnitude())
            {
                best = (t, j);
            }
        }
        for i in t + 1..self.a.rows() {
            let x = &self.a[(i, t)];
            if !x.is_zero()
                && (self.a[best].is_zero() || x.magnitude() < self.a[best].magnitude())
            {
                best = (i, t);
            }
        }
        best
    }

    fn first_indivisible_row(&self, t: usize) -> Option<usize> {
        let p = &self.a[(t, t)];
        if p.abs().is_one() {
            return None;
        }
        (t + 1..self.a.rows())
            .find(|&i| (t + 1..self.a.cols()).any(|j| !self.a[(i, j)].is_multiple_of(p)))
    }

    pub fn run(&mut self) {
        let limit = self.a.rows().min(self.a.cols());
        let mut t = 0;
        while t < limit {
            let Some((pi, pj)) = self.smallest_in_block(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut remainder = false;
                for i in t + 1..self.a.rows() {
                    if self.a[(i, t)].is_zero() {
                        continue;
                    }
                    let q = &self.a[(i, t)] / &self.a[(t, t)];
                    self.add_row(i, t, &-q);
                    remainder |= !self.a[(i, t)].is_zero();
                }
                for j in t + 1..self.a.cols() {
                    if self.a[(t, j)].is_zero() {
                        continue;
                    }
                    let q = &self.a[(t, j)] / &self.a[(t, t)];
                    self.add_col(j, t, &-q);
                    remainder |= !self.a[(t, j)].is_zero();
                }
                if remainder {
                    let (i, j) = self.smallest_in_cross(t);
                    self.swap_rows(t, i);
                    self.swap_cols(t, j);
                    continue;
                }
                if let Some(i) = self.first_indivisible_row(t) {
                    self.add_row(t, i, &BigInt::one());
                    continue;
                }
                break;
            }
            if self.a[(t, t)].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithNormalForm {
        let s = smith_normal_form(m);
        assert_eq!(&(&s.u * m) * &s.v, s.d);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&IntMatrix::identity(2));
        assert!(s.d.is_identity());
    }

    #[test]
    fn two_by_two_example() {
        // gcd of entries 2, |det| 8 -> diag(2, 4)
        let s = check(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.d, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
    }

    #[test]
    fn xi_minus_identity() {
        // entries have gcd 1, |det| = 3 -> diag(1, 3)
        let m = IntMatrix::from_i64(&[&[-1, -1], &[1, -2]]);
        let s = check(&m);
        assert_eq!(s.d, IntMatrix::from_i64(&[&[1, 0], &[0, 3]]));
    }

    #[test]
    fn empty_and_zero_shapes() {
        let s = check(&IntMatrix::zeros(0, 3));
        assert_eq!((s.u.rows(), s.v.rows()), (0, 3));
        let s = check(&IntMatrix::zeros(2, 0));
        assert_eq!(s.rank(), 0);
        let s = check(&IntMatrix::zeros(2, 2));
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn deterministic() {
        let m = IntMatrix::from_i64(&[&[3, 5, 7], &[2, -4, 6], &[9, 1, 0]]);
        let a = smith_normal_form(&m);
        let b = smith_normal_form(&m);
        assert_eq!((a.u, a.d, a.v), (b.u, b.d, b.v));
    }

    #[test]
    fn left_inverse_tracking() {
        let m = IntMatrix::from_i64(&[&[4, 6, 2], &[2, 8, -2], &[0, 0, 10]]);
        let mut e = Elimination::new(
            &m,
            Tracking {
                left: true,
                left_inverse: true,
                right: false,
            },
        );
        e.run();
        let prod = e.left.as_ref().unwrap() * e.left_inverse.as_ref().unwrap();
        assert!(prod.is_identity());
        assert_eq!(elementary_divisors(&m), e.diagonal_nonzero());
    }
}
