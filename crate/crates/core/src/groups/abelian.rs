use std::fmt;

use num_bigint::BigInt;

use super::{FiniteGroup, GroupError};
use crate::linalg::IntMatrix;

/// `ℤ/m₁ × … × ℤ/m_r`, elements are exponent tuples listed in lexicographic
/// order (so index 0 is the identity).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbstractAbelianGroup {
    moduli: Vec<u64>,
}

impl AbstractAbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self, GroupError> {
        if moduli.contains(&0) {
            return Err(GroupError::InvalidModulus);
        }
        Ok(Self { moduli })
    }

    pub fn trivial() -> Self {
        Self { moduli: Vec::new() }
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    /// Least common multiple of the cyclic orders.
    pub fn exponent(&self) -> u64 {
        use num_integer::Integer;
        self.moduli.iter().fold(1, |acc, &m| acc.lcm(&m))
    }

    pub fn exponents(&self, mut index: usize) -> Vec<u64> {
        let mut out = vec![0; self.moduli.len()];
        for (slot, &m) in out.iter_mut().zip(&self.moduli).rev() {
            *slot = (index as u64) % m;
            index /= m as usize;
        }
        out
    }

    pub fn index_of(&self, exponents: &[u64]) -> usize {
        exponents
            .iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&e, &m)| acc * m as usize + (e % m) as usize)
    }

    /// Index of the j-th cyclic generator.
    pub fn generator(&self, j: usize) -> usize {
        let mut e = vec![0; self.moduli.len()];
        e[j] = 1;
        self.index_of(&e)
    }

    /// Human-readable name like `g1^2*g2`, `1` for the identity.
    pub fn label(&self, index: usize) -> String {
        let parts: Vec<String> = self
            .exponents(index)
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(j, &e)| {
                if e == 1 {
                    format!("g{}", j + 1)
                } else {
                    format!("g{}^{}", j + 1, e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl FiniteGroup for AbstractAbelianGroup {
    fn order(&self) -> usize {
        self.moduli.iter().map(|&m| m as usize).product()
    }

    fn product(&self, a: usize, b: usize) -> usize {
        let (ea, eb) = (self.exponents(a), self.exponents(b));
        let sum: Vec<u64> = ea
            .iter()
            .zip(&eb)
            .zip(&self.moduli)
            .map(|((x, y), m)| (x + y) % m)
            .collect();
        self.index_of(&sum)
    }

    fn inverse(&self, a: usize) -> usize {
        let neg: Vec<u64> = self
            .exponents(a)
            .iter()
            .zip(&self.moduli)
            .map(|(x, m)| (m - x) % m)
            .collect();
        self.index_of(&neg)
    }
}

impl fmt::Display for AbstractAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z/{m}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Automorphism of an abstract abelian group. Column `j` of `matrix` holds the
/// exponent tuple of the image of the j-th generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianAutomorphism {
    pub matrix: IntMatrix,
    /// `permutation[g]` is the index of the image of element `g`.
    pub permutation: Vec<usize>,
}

impl AbelianAutomorphism {
    pub fn apply(&self, g: usize) -> usize {
        self.permutation[g]
    }
}

/// All automorphisms of `group`, in lexicographic order of generator images.
pub fn automorphism_group(
    group: &AbstractAbelianGroup,
    bound: usize,
) -> Result<Vec<AbelianAutomorphism>, GroupError> {
    let order = group.order();
    if order > bound {
        return Err(GroupError::ClosureExceedsBound { bound });
    }
    let r = group.rank();
    // Admissible images of generator j: elements killed by m_j.
    let candidates: Vec<Vec<usize>> = group
        .moduli()
        .iter()
        .map(|&m| {
            (0..order)
                .filter(|&x| {
                    let e = group.exponents(x);
                    e.iter()
                        .zip(group.moduli())
                        .all(|(&a, &mm)| (a * m) % mm == 0)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; r];
    loop {
        let images: Vec<Vec<u64>> = (0..r)
            .map(|j| group.exponents(candidates[j][choice[j]]))
            .collect();
        let permutation: Vec<usize> = (0..order)
            .map(|g| {
                let e = group.exponents(g);
                let img: Vec<u64> = (0..r)
                    .map(|k| {
                        let m = group.moduli()[k];
                        e.iter()
                            .zip(&images)
                            .map(|(&c, im)| (c % m) * im[k] % m)
                            .sum::<u64>()
                            % m
                    })
                    .collect();
                group.index_of(&img)
            })
            .collect();
        let mut seen = vec![false; order];
        let bijective = permutation.iter().all(|&p| !std::mem::replace(&mut seen[p], true));
        if bijective {
            let matrix = IntMatrix::from_fn(r, r, |row, col| BigInt::from(images[col][row]));
            out.push(AbelianAutomorphism {
                matrix,
                permutation,
            });
        }
        // advance the mixed-radix counter
        let mut k = r;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let g = AbstractAbelianGroup::new(vec![3, 3]).unwrap();
        assert_eq!(g.order(), 9);
        for i in 0..9 {
            assert_eq!(g.index_of(&g.exponents(i)), i);
        }
        assert_eq!(g.exponents(0), vec![0, 0]);
        assert_eq!(g.label(g.index_of(&[2, 1])), "g1^2*g2");
        assert_eq!(g.label(0), "1");
        assert_eq!(g.exponent(), 3);
    }

    #[test]
    fn automorphism_counts() {
        let z2 = AbstractAbelianGroup::new(vec![2]).unwrap();
        assert_eq!(automorphism_group(&z2, 100).unwrap().len(), 1);
        let z22 = AbstractAbelianGroup::new(vec![2, 2]).unwrap();
        assert_eq!(automorphism_group(&z22, 100).unwrap().len(), 6);
        let z33 = AbstractAbelianGroup::new(vec![3, 3]).unwrap();
        assert_eq!(automorphism_group(&z33, 100).unwrap().len(), 48);
        let z4 = AbstractAbelianGroup::new(vec![2, 4]).unwrap();
        // |Aut(Z/2 x Z/4)| = 8
        assert_eq!(automorphism_group(&z4, 100).unwrap().len(), 8);
    }

    #[test]
    fn automorphisms_are_homomorphic_bijections() {
        let g = AbstractAbelianGroup::new(vec![3, 3]).unwrap();
        let auts = automorphism_group(&g, 100).unwrap();
        for a in &auts {
            for x in 0..9 {
                for y in 0..9 {
                    assert_eq!(a.apply(g.product(x, y)), g.product(a.apply(x), a.apply(y)));
                }
            }
        }
        // composition closed
        for a in &auts {
            for b in &auts {
                let comp: Vec<usize> = (0..9).map(|x| a.apply(b.apply(x))).collect();
                assert!(auts.iter().any(|c| c.permutation == comp));
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        let g = AbstractAbelianGroup::new(vec![5, 5]).unwrap();
        assert!(matches!(
            automorphism_group(&g, 10),
            Err(GroupError::ClosureExceedsBound { .. })
        ));
    }
}
