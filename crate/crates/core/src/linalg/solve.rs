use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::snf::{Elimination, Tracking};
use super::{IntMatrix, LinalgError};

/// Vector of exact rationals (always in lowest terms with positive denominators).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatVector(pub Vec<BigRational>);

impl RatVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![BigRational::zero(); n])
    }

    pub fn from_integers<T: Into<BigInt> + Clone>(v: &[T]) -> Self {
        Self(
            v.iter()
                .map(|x| BigRational::from_integer(x.clone().into()))
                .collect(),
        )
    }

    /// Entries `numerators[i] / denominator`.
    pub fn from_fraction(numerators: &[BigInt], denominator: &BigInt) -> Self {
        Self(
            numerators
                .iter()
                .map(|n| BigRational::new(n.clone(), denominator.clone()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(BigRational::is_integer)
    }

    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.is_integral()
            .then(|| self.0.iter().map(BigRational::to_integer).collect())
    }
}

/// Solution set of `A·x = b` over `ℤ` (modulus 0) or `ℤ/m`.
///
/// Every solution is `particular + Σ cⱼ·kernel[j]`; for a positive modulus
/// the coefficient `cⱼ` ranges over `[0, kernel_orders[j])` and distinct
/// coefficient tuples give distinct solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub modulus: BigInt,
    pub particular: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
    pub kernel_orders: Vec<BigInt>,
}

impl SolutionSet {
    /// Number of solutions; `None` over the integers with a nontrivial kernel.
    pub fn count(&self) -> Option<BigInt> {
        if self.modulus.is_zero() {
            return self.kernel.is_empty().then(BigInt::one);
        }
        Some(self.kernel_orders.iter().product())
    }

    /// All solutions modulo `m`, sorted lexicographically. `None` over `ℤ`.
    pub fn enumerate(&self) -> Option<Vec<Vec<BigInt>>> {
        if self.modulus.is_zero() {
            return None;
        }
        let m = &self.modulus;
        let mut out = vec![self.particular.iter().map(|x| x.mod_floor(m)).collect::<Vec<_>>()];
        for (gen, order) in self.kernel.iter().zip(&self.kernel_orders) {
            let mut next = Vec::new();
            for base in &out {
                let mut cur = base.clone();
                let mut k = BigInt::zero();
                while &k < order {
                    next.push(cur.clone());
                    for (c, g) in cur.iter_mut().zip(gen) {
                        *c = (&*c + g).mod_floor(m);
                    }
                    k += 1;
                }
            }
            out = next;
        }
        out.sort();
        Some(out)
    }
}

pub fn solve_linear(
    a: &IntMatrix,
    b: &RatVector,
    modulus: &BigInt,
) -> Result<Option<SolutionSet>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            left: (a.rows(), a.cols()),
            right: (b.len(), 1),
        });
    }
    if modulus.is_negative() {
        return Err(LinalgError::NegativeModulus);
    }
    let Some(rhs) = b.to_integers() else {
        if modulus.is_zero() {
            // A·x is integral for integral x.
            return Ok(None);
        }
        return Err(LinalgError::NonIntegralRhs);
    };
    let homogeneous = rhs.iter().all(Zero::is_zero);
    let mut e = Elimination::new(
        a,
        Tracking {
            left: !homogeneous,
            left_inverse: false,
            right: true,
        },
    );
    e.run();
    let c = match &e.left {
        Some(u) => u.mul_vec(&rhs),
        None => rhs.clone(),
    };
    let v = e.right.as_ref().expect("tracked");
    let diag = e.diagonal_nonzero();
    let rank = diag.len();
    let (rows, cols) = (a.rows(), a.cols());

    let mut y = vec![BigInt::zero(); cols];
    let mut kernel_y: Vec<(usize, BigInt, BigInt)> = Vec::new(); // (coordinate, scale, order)
    if modulus.is_zero() {
        for i in 0..rank {
            if !c[i].is_multiple_of(&diag[i]) {
                return Ok(None);
            }
            y[i] = &c[i] / &diag[i];
        }
        if c[rank..rows].iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        for i in rank..cols {
            kernel_y.push((i, BigInt::one(), BigInt::zero()));
        }
    } else {
        let m = modulus;
        for i in 0..rank {
            let g = diag[i].gcd(m);
            if !c[i].is_multiple_of(&g) {
                return Ok(None);
            }
            let reduced_mod = m / &g;
            let unit = (&diag[i] / &g).mod_floor(&reduced_mod);
            let inv = mod_inverse(&unit, &reduced_mod);
            y[i] = ((&c[i] / &g) * inv).mod_floor(&reduced_mod);
            if !g.is_one() {
                kernel_y.push((i, reduced_mod, g));
            }
        }
        if c[rank..rows].iter().any(|x| !x.is_multiple_of(m)) {
            return Ok(None);
        }
        for i in rank..cols {
            kernel_y.push((i, BigInt::one(), m.clone()));
        }
    }

    let reduce = |x: Vec<BigInt>| -> Vec<BigInt> {
        if modulus.is_zero() {
            x
        } else {
            x.into_iter().map(|t| t.mod_floor(modulus)).collect()
        }
    };
    let particular = reduce(v.mul_vec(&y));
    let mut kernel = Vec::new();
    let mut kernel_orders = Vec::new();
    for (i, scale, order) in kernel_y {
        kernel.push(reduce(v.column(i).into_iter().map(|t| t * &scale).collect()));
        kernel_orders.push(order);
    }
    Ok(Some(SolutionSet {
        modulus: modulus.clone(),
        particular,
        kernel,
        kernel_orders,
    }))
}

/// Inverse of a unit modulo `m` (`m = 1` yields 0).
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let eg = a.extended_gcd(m);
    debug_assert!(eg.gcd.is_one(), "{a} is not a unit mod {m}");
    eg.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi_minus_i() -> IntMatrix {
        IntMatrix::from_i64(&[&[-1, -1], &[1, -2]])
    }

    #[test]
    fn identity_over_integers() {
        let s = solve_linear(
            &IntMatrix::identity(2),
            &RatVector::from_integers(&[5, 7]),
            &BigInt::zero(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(s.particular, vec![BigInt::from(5), BigInt::from(7)]);
        assert!(s.kernel.is_empty());
        assert_eq!(s.count(), Some(BigInt::one()));
    }

    #[test]
    fn three_fixed_three_torsion_points() {
        let s = solve_linear(&xi_minus_i(), &RatVector::zeros(2), &BigInt::from(3))
            .unwrap()
            .unwrap();
        let all = s.enumerate().unwrap();
        let expect: Vec<Vec<BigInt>> = [[0, 0], [1, 2], [2, 1]]
            .iter()
            .map(|p| p.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        assert_eq!(all, expect);
    }

    #[test]
    fn inconsistent_mod_three() {
        // both columns are (2,1) mod 3; (1,0) is outside their span
        let s = solve_linear(&xi_minus_i(), &RatVector::from_integers(&[1, 0]), &BigInt::from(3))
            .unwrap();
        assert!(s.is_none());
    }

    #[test]
    fn rational_rhs_over_integers_has_no_solution() {
        let b = RatVector::from_fraction(&[BigInt::one(), BigInt::zero()], &BigInt::from(2));
        assert!(solve_linear(&IntMatrix::identity(2), &b, &BigInt::zero())
            .unwrap()
            .is_none());
    }

    #[test]
    fn dimension_mismatch() {
        let r = solve_linear(&IntMatrix::identity(2), &RatVector::zeros(3), &BigInt::zero());
        assert!(matches!(r, Err(LinalgError::DimensionMismatch { .. })));
    }

    #[test]
    fn kernel_over_integers() {
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        let s = solve_linear(&a, &RatVector::from_integers(&[3]), &BigInt::zero())
            .unwrap()
            .unwrap();
        assert_eq!(s.kernel.len(), 1);
        assert_eq!(s.count(), None);
        assert_eq!(a.mul_vec(&s.particular), vec![BigInt::from(3)]);
        assert!(a.mul_vec(&s.kernel[0]).iter().all(Zero::is_zero));
    }
}
