use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{elementary_divisors, IntMatrix};

/// Isomorphism type `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `d₁ | … | d_k`, each `dᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianStructure {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianStructure {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Builds a structure from a divisibility chain, discarding unit factors.
    pub fn from_divisors<'a>(divisors: impl IntoIterator<Item = &'a BigInt>, free_rank: usize) -> Self {
        let invariant_factors: Vec<BigInt> = divisors
            .into_iter()
            .filter(|d| !d.is_one() && !d.is_zero())
            .cloned()
            .collect();
        debug_assert!(invariant_factors
            .windows(2)
            .all(|w| (&w[1] % &w[0]).is_zero()));
        Self {
            invariant_factors,
            free_rank,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    /// Largest invariant factor (the exponent of the torsion part).
    pub fn torsion_exponent(&self) -> BigInt {
        self.invariant_factors
            .last()
            .cloned()
            .unwrap_or_else(BigInt::one)
    }
}

impl fmt::Display for AbelianStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        let mut i = 0;
        while i < self.invariant_factors.len() {
            let d = &self.invariant_factors[i];
            let run = self.invariant_factors[i..]
                .iter()
                .take_while(|x| *x == d)
                .count();
            parts.push(if run == 1 {
                format!("Z/{d}")
            } else {
                format!("(Z/{d})^{run}")
            });
            i += run;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Structure of `ℤ^rows / im(M)`.
pub fn cokernel_structure(m: &IntMatrix) -> AbelianStructure {
    let divisors = elementary_divisors(m);
    AbelianStructure::from_divisors(&divisors, m.rows() - divisors.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_is_free() {
        let s = cokernel_structure(&IntMatrix::zeros(2, 2));
        assert_eq!(s.free_rank, 2);
        assert!(s.invariant_factors.is_empty());
        assert_eq!(s.order(), None);
    }

    #[test]
    fn diagonal_is_read_off() {
        let s = cokernel_structure(&IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        assert_eq!(s.invariant_factors, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(s.order(), Some(BigInt::from(8)));
    }

    #[test]
    fn xi_minus_identity_has_order_three() {
        let s = cokernel_structure(&IntMatrix::from_i64(&[&[-1, -1], &[1, -2]]));
        assert_eq!(s.invariant_factors, vec![BigInt::from(3)]);
        assert_eq!(s.free_rank, 0);
        assert_eq!(s.to_string(), "Z/3");
    }

    #[test]
    fn display_groups_runs() {
        let s = AbelianStructure::from_divisors(&[2, 2, 6].map(BigInt::from), 1);
        assert_eq!(s.to_string(), "Z + (Z/2)^2 + Z/6");
    }
}
