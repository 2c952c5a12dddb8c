use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{FiniteGroup, GroupError};
use crate::linalg::IntMatrix;

/// Multiplication tables are only materialized up to this order.
const TABLE_LIMIT: usize = 512;

/// Finite group of invertible matrices over `ℤ` or over `ℤ/m`.
///
/// Elements are listed identity first, then lexicographically by flattened
/// entries (entries in `[0, m)` for the modular case).
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    degree: usize,
    modulus: Option<u64>,
    elements: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    generators: Vec<usize>,
    inverses: Vec<usize>,
    mult_table: Option<Vec<Vec<u32>>>,
}

fn flatten(m: &IntMatrix, modulus: Option<u64>) -> Result<Vec<i64>, GroupError> {
    m.entries()
        .iter()
        .map(|x| {
            let x = match modulus {
                Some(q) => x.mod_floor(&BigInt::from(q)),
                None => x.clone(),
            };
            x.to_i64().ok_or(GroupError::EntryOverflow)
        })
        .collect()
}

fn multiply(a: &[i64], b: &[i64], n: usize, modulus: Option<u64>) -> Result<Vec<i64>, GroupError> {
    let mut out = vec![0i64; n * n];
    for r in 0..n {
        for k in 0..n {
            let x = a[r * n + k];
            if x == 0 {
                continue;
            }
            for c in 0..n {
                let y = b[k * n + c];
                if y == 0 {
                    continue;
                }
                let slot = &mut out[r * n + c];
                match modulus {
                    Some(q) => {
                        let q = q as i128;
                        *slot = ((*slot as i128 + x as i128 * y as i128) % q) as i64;
                    }
                    None => {
                        *slot = x
                            .checked_mul(y)
                            .and_then(|p| slot.checked_add(p))
                            .ok_or(GroupError::EntryOverflow)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn identity_flat(n: usize) -> Vec<i64> {
    let mut v = vec![0; n * n];
    for i in 0..n {
        v[i * n + i] = 1;
    }
    v
}

/// Closure of integer matrices under multiplication over `ℤ`.
pub fn generate_closure(generators: &[IntMatrix], bound: usize) -> Result<FiniteMatrixGroup, GroupError> {
    FiniteMatrixGroup::closure(generators, None, bound)
}

/// Closure of the reductions of `generators` modulo `modulus`.
pub fn generate_closure_mod(
    generators: &[IntMatrix],
    modulus: u64,
    bound: usize,
) -> Result<FiniteMatrixGroup, GroupError> {
    if modulus == 0 {
        return Err(GroupError::InvalidModulus);
    }
    FiniteMatrixGroup::closure(generators, Some(modulus), bound)
}

/// Outcome of conjugating a group by a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjugation {
    /// `permutation[g]` is the index of `n·g·n⁻¹`.
    Automorphism(Vec<usize>),
    NotNormalizing,
}

impl FiniteMatrixGroup {
    fn closure(
        generators: &[IntMatrix],
        modulus: Option<u64>,
        bound: usize,
    ) -> Result<Self, GroupError> {
        let degree = match generators.first() {
            Some(g) => g.rows(),
            None => 0,
        };
        for g in generators {
            if !g.is_square() || g.rows() != degree {
                return Err(GroupError::DimensionMismatch);
            }
            let det = g.determinant().expect("square");
            let invertible = match modulus {
                Some(q) => det.gcd(&BigInt::from(q)) == BigInt::from(1),
                None => det == BigInt::from(1) || det == BigInt::from(-1),
            };
            if !invertible {
                return Err(GroupError::NotInvertible);
            }
        }
        let n = degree;
        let mut id = identity_flat(n);
        if modulus == Some(1) {
            id.iter_mut().for_each(|x| *x = 0);
        }
        let gens: Vec<Vec<i64>> = generators
            .iter()
            .map(|g| flatten(g, modulus))
            .collect::<Result<_, _>>()?;

        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut list = vec![id.clone()];
        seen.insert(id.clone(), ());
        let mut queue = VecDeque::from([id.clone()]);
        while let Some(x) = queue.pop_front() {
            for s in &gens {
                let y = multiply(&x, s, n, modulus)?;
                if !seen.contains_key(&y) {
                    if list.len() >= bound {
                        return Err(GroupError::ClosureExceedsBound { bound });
                    }
                    seen.insert(y.clone(), ());
                    list.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        list[1..].sort();
        let index: HashMap<Vec<i64>, usize> =
            list.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let generator_idx = gens.iter().map(|g| index[g]).collect();

        let mut group = Self {
            degree,
            modulus,
            elements: list,
            index,
            generators: generator_idx,
            inverses: Vec::new(),
            mult_table: None,
        };
        if group.elements.len() <= TABLE_LIMIT {
            let order = group.elements.len();
            let mut table = vec![vec![0u32; order]; order];
            for a in 0..order {
                for b in 0..order {
                    table[a][b] = group.lookup_product(a, b) as u32;
                }
            }
            group.mult_table = Some(table);
        }
        group.inverses = (0..group.elements.len()).map(|a| group.find_inverse(a)).collect();
        Ok(group)
    }

    fn lookup_product(&self, a: usize, b: usize) -> usize {
        let p = multiply(&self.elements[a], &self.elements[b], self.degree, self.modulus)
            .expect("closure products stay in range");
        self.index[&p]
    }

    fn find_inverse(&self, a: usize) -> usize {
        let mut prev = 0;
        let mut cur = a;
        while cur != 0 {
            prev = cur;
            cur = self.product(cur, a);
        }
        // a^k = 1 with prev = a^(k-1); for a = 1 the loop never runs.
        if a == 0 {
            0
        } else {
            prev
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn element(&self, i: usize) -> IntMatrix {
        let n = self.degree;
        IntMatrix::from_fn(n, n, |r, c| BigInt::from(self.elements[i][r * n + c]))
    }

    pub fn elements(&self) -> Vec<IntMatrix> {
        (0..self.elements.len()).map(|i| self.element(i)).collect()
    }

    pub fn mult_table(&self) -> Option<&[Vec<u32>]> {
        self.mult_table.as_deref()
    }

    /// Index of `m` (reduced modulo the group modulus) if it belongs to the group.
    pub fn position(&self, m: &IntMatrix) -> Option<usize> {
        if m.rows() != self.degree || m.cols() != self.degree {
            return None;
        }
        let key = flatten(m, self.modulus).ok()?;
        self.index.get(&key).copied()
    }

    pub fn contains(&self, m: &IntMatrix) -> bool {
        self.position(m).is_some()
    }

    /// `g ↦ n·g·n⁻¹` as a permutation of element indices.
    ///
    /// `n` must be invertible over `ℤ`; it is reduced modulo the group modulus.
    pub fn conjugation_map(&self, n: &IntMatrix) -> Result<Conjugation, GroupError> {
        if n.rows() != self.degree || n.cols() != self.degree {
            return Err(GroupError::DimensionMismatch);
        }
        let n_inv = n.inverse().ok_or(GroupError::NotInvertible)?;
        let a = flatten(n, self.modulus)?;
        let b = flatten(&n_inv, self.modulus)?;
        let mut perm = Vec::with_capacity(self.elements.len());
        for g in &self.elements {
            let c = multiply(&multiply(&a, g, self.degree, self.modulus)?, &b, self.degree, self.modulus)?;
            match self.index.get(&c) {
                Some(&i) => perm.push(i),
                None => return Ok(Conjugation::NotNormalizing),
            }
        }
        Ok(Conjugation::Automorphism(perm))
    }
}

impl FiniteGroup for FiniteMatrixGroup {
    fn order(&self) -> usize {
        self.elements.len()
    }

    fn product(&self, a: usize, b: usize) -> usize {
        match &self.mult_table {
            Some(t) => t[a][b] as usize,
            None => self.lookup_product(a, b),
        }
    }

    fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }
}

/// Convenience wrapper: `g ↦ n·g·n⁻¹` on `group`.
pub fn conjugation_map(group: &FiniteMatrixGroup, n: &IntMatrix) -> Result<Conjugation, GroupError> {
    group.conjugation_map(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi() -> IntMatrix {
        IntMatrix::from_i64(&[&[0, -1], &[1, -1]])
    }

    #[test]
    fn trivial_and_cyclic_orders() {
        let g = generate_closure(&[IntMatrix::identity(2)], 100).unwrap();
        assert_eq!(g.order(), 1);
        // Xi^3 = I
        assert!(xi().pow(3).is_identity());
        assert_eq!(generate_closure(&[xi()], 100).unwrap().order(), 3);
        assert_eq!(generate_closure(&[xi().neg()], 100).unwrap().order(), 6);
    }

    #[test]
    fn identity_first_and_sorted() {
        let g = generate_closure(&[xi().neg()], 100).unwrap();
        assert!(g.element(0).is_identity());
        let flat: Vec<Vec<i64>> = g.elements[1..].to_vec();
        let mut sorted = flat.clone();
        sorted.sort();
        assert_eq!(flat, sorted);
    }

    #[test]
    fn unipotent_exceeds_bound() {
        let u = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert!(matches!(
            generate_closure(&[u], 50),
            Err(GroupError::ClosureExceedsBound { bound: 50 })
        ));
    }

    #[test]
    fn modular_closure() {
        // -I is trivial mod 2
        let g = generate_closure_mod(&[IntMatrix::scalar(2, -1)], 2, 10).unwrap();
        assert_eq!(g.order(), 1);
        let u = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(generate_closure_mod(&[u], 3, 10).unwrap().order(), 3);
    }

    #[test]
    fn latin_square_and_inverses() {
        let g = generate_closure(&[xi().neg(), IntMatrix::from_i64(&[&[0, 1], &[1, 0]])], 100).unwrap();
        let n = g.order();
        for a in 0..n {
            let mut row: Vec<usize> = (0..n).map(|b| g.product(a, b)).collect();
            row.sort();
            assert_eq!(row, (0..n).collect::<Vec<_>>());
            assert_eq!(g.product(a, g.inverse(a)), 0);
            assert_eq!(g.inverse(g.inverse(a)), a);
        }
    }

    #[test]
    fn conjugation_by_identity() {
        let g = generate_closure(&[xi()], 100).unwrap();
        match g.conjugation_map(&IntMatrix::identity(2)).unwrap() {
            Conjugation::Automorphism(p) => assert_eq!(p, vec![0, 1, 2]),
            Conjugation::NotNormalizing => panic!(),
        }
        assert_eq!(
            g.conjugation_map(&IntMatrix::identity(3)),
            Err(GroupError::DimensionMismatch)
        );
    }
}
