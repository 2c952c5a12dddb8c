//! Full-rank lattices `L` with `m·ℤ^d ⊆ L ⊆ ℤ^d`, kept in Hermite normal form,
//! and finite subquotients `L_outer / L_inner` of such lattices.
//!
//! These realize finite groups like `Z¹(G, T[m]) / B¹` concretely: a coset is
//! named by its unique reduced representative modulo the inner lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::snf::{Elimination, Tracking};
use super::{AbelianStructure, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularLattice {
    dim: usize,
    modulus: BigInt,
    /// Upper-triangular basis: `rows[j][j] > 0`, `rows[j][k] = 0` for `k < j`,
    /// entries right of each pivot reduced modulo the pivot below them.
    rows: Vec<Vec<BigInt>>,
}

impl ModularLattice {
    /// The lattice spanned by `generators` together with `modulus·ℤ^dim`.
    pub fn new<I>(dim: usize, modulus: &BigInt, generators: I) -> Self
    where
        I: IntoIterator<Item = Vec<BigInt>>,
    {
        assert!(modulus > &BigInt::zero(), "lattice modulus must be positive");
        let mut rows: Vec<Vec<BigInt>> = (0..dim)
            .map(|j| {
                let mut r = vec![BigInt::zero(); dim];
                r[j] = modulus.clone();
                r
            })
            .collect();
        for g in generators {
            assert_eq!(g.len(), dim);
            let mut v: Vec<BigInt> = g.iter().map(|x| x.mod_floor(modulus)).collect();
            for j in 0..dim {
                if v[j].is_zero() {
                    continue;
                }
                let b = &rows[j];
                let eg = b[j].extended_gcd(&v[j]);
                let (bj, vj) = (&b[j] / &eg.gcd, &v[j] / &eg.gcd);
                let new_b: Vec<BigInt> = b
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (&eg.x * x + &eg.y * y).mod_floor(modulus))
                    .collect();
                let new_v: Vec<BigInt> = b
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (&bj * y - &vj * x).mod_floor(modulus))
                    .collect();
                // A pivot can only reduce to 0 when it equals the modulus.
                rows[j] = if new_b[j].is_zero() {
                    let mut r = new_b;
                    r[j] = modulus.clone();
                    r
                } else {
                    new_b
                };
                v = new_v;
            }
        }
        let mut lattice = Self {
            dim,
            modulus: modulus.clone(),
            rows,
        };
        lattice.back_reduce();
        lattice
    }

    fn back_reduce(&mut self) {
        for j in 0..self.dim {
            let pivot_row = self.rows[j].clone();
            let p = &pivot_row[j];
            for i in 0..j {
                let q = self.rows[i][j].div_floor(p);
                if !q.is_zero() {
                    for (x, y) in self.rows[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<BigInt> {
        (0..self.dim).map(|j| self.rows[j][j].clone()).collect()
    }

    /// `[ℤ^d : L]`.
    pub fn index(&self) -> BigInt {
        self.pivots().iter().product()
    }

    /// Unique representative of `v + L` with `0 ≤ vⱼ < pivotⱼ`.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut x = v.to_vec();
        for j in 0..self.dim {
            let q = x[j].div_floor(&self.rows[j][j]);
            if !q.is_zero() {
                for (a, b) in x.iter_mut().zip(&self.rows[j]).skip(j) {
                    *a -= &q * b;
                }
            }
        }
        x
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Coefficients `c` with `v = Σ cⱼ·basisⱼ`, if `v ∈ L`.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut x = v.to_vec();
        let mut c = vec![BigInt::zero(); self.dim];
        for j in 0..self.dim {
            let (q, r) = x[j].div_rem(&self.rows[j][j]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (a, b) in x.iter_mut().zip(&self.rows[j]).skip(j) {
                    *a -= &q * b;
                }
            }
            c[j] = q;
        }
        Some(c)
    }

    pub fn contains_lattice(&self, other: &ModularLattice) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }
}

/// Finite quotient `outer / inner` of two nested modular lattices.
#[derive(Clone, Debug)]
pub struct Subquotient {
    outer: ModularLattice,
    inner: ModularLattice,
    structure: AbelianStructure,
    /// Rows of the left Smith transform acting on outer coordinates, one per
    /// nontrivial invariant factor.
    coordinate_rows: Vec<Vec<BigInt>>,
    generators: Vec<Vec<BigInt>>,
}

impl Subquotient {
    pub fn new(outer: ModularLattice, inner: ModularLattice) -> Self {
        assert_eq!(outer.dim, inner.dim);
        let d = outer.dim;
        let coords: Vec<Vec<BigInt>> = inner
            .rows
            .iter()
            .map(|r| {
                outer
                    .coordinates(r)
                    .expect("inner lattice must lie inside the outer lattice")
            })
            .collect();
        // Column j of the transpose = coordinates of inner basis row j.
        let ct = IntMatrix::from_fn(d, d, |r, c| coords[c][r].clone());
        let mut e = Elimination::new(
            &ct,
            Tracking {
                left: true,
                left_inverse: true,
                right: false,
            },
        );
        e.run();
        let diag = e.diagonal_nonzero();
        assert_eq!(diag.len(), d, "subquotient of full-rank lattices is finite");
        let u = e.left.expect("tracked");
        let u_inv = e.left_inverse.expect("tracked");
        let mut coordinate_rows = Vec::new();
        let mut generators = Vec::new();
        for (i, di) in diag.iter().enumerate() {
            if di.is_one() {
                continue;
            }
            coordinate_rows.push(u.row(i).to_vec());
            let mut g = vec![BigInt::zero(); d];
            for (j, row) in outer.rows.iter().enumerate() {
                let coef = &u_inv[(j, i)];
                if coef.is_zero() {
                    continue;
                }
                for (a, b) in g.iter_mut().zip(row) {
                    *a += coef * b;
                }
            }
            generators.push(inner.reduce(&g));
        }
        let structure = AbelianStructure::from_divisors(&diag, 0);
        Self {
            outer,
            inner,
            structure,
            coordinate_rows,
            generators,
        }
    }

    pub fn structure(&self) -> &AbelianStructure {
        &self.structure
    }

    pub fn order(&self) -> BigInt {
        self.structure.order().expect("finite")
    }

    pub fn outer(&self) -> &ModularLattice {
        &self.outer
    }

    pub fn inner(&self) -> &ModularLattice {
        &self.inner
    }

    /// Reduced representatives of the cyclic generators, aligned with the invariant factors.
    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn canonical(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.inner.reduce(v)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.outer.contains(v)
    }

    /// Coordinates of `v` with respect to the cyclic generators, reduced
    /// modulo the invariant factors. `None` if `v` lies outside the outer lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.outer.coordinates(v)?;
        Some(
            self.coordinate_rows
                .iter()
                .zip(&self.structure.invariant_factors)
                .map(|(row, d)| {
                    row.iter()
                        .zip(&c)
                        .map(|(a, b)| a * b)
                        .sum::<BigInt>()
                        .mod_floor(d)
                })
                .collect(),
        )
    }

    /// Canonical element with the given generator coordinates.
    pub fn element(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.outer.dim];
        for (c, g) in coords.iter().zip(&self.generators) {
            if c.is_zero() {
                continue;
            }
            for (a, b) in v.iter_mut().zip(g) {
                *a += c * b;
            }
        }
        self.inner.reduce(&v)
    }

    /// Every element as a canonical representative, in coordinate order.
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        let factors = &self.structure.invariant_factors;
        let mut coords = vec![BigInt::zero(); factors.len()];
        let mut out = Vec::new();
        loop {
            out.push(self.element(&coords));
            let mut i = factors.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < factors[i] {
                    break;
                }
                coords[i] = BigInt::zero();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn hnf_of_modular_lattice() {
        let m = BigInt::from(6);
        let l = ModularLattice::new(2, &m, vec![v(&[2, 3]), v(&[4, 0])]);
        // (2,0) = (6,0) - (4,0) and (0,3) = (2,3) - (2,0) span the lattice
        assert_eq!(l.index(), BigInt::from(6));
        assert!(l.contains(&v(&[2, 3])));
        assert!(l.contains(&v(&[6, 0])));
        assert!(!l.contains(&v(&[1, 0])));
        let r = l.reduce(&v(&[7, 11]));
        assert_eq!(l.reduce(&r), r);
        assert!(l.contains(&r.iter().zip(v(&[7, 11])).map(|(a, b)| b - a).collect::<Vec<_>>()));
    }

    #[test]
    fn empty_generators_give_scaled_lattice() {
        let l = ModularLattice::new(3, &BigInt::from(5), Vec::new());
        assert_eq!(l.index(), BigInt::from(125));
    }

    #[test]
    fn subquotient_of_cyclic() {
        let m = BigInt::from(12);
        let outer = ModularLattice::new(1, &m, vec![v(&[2])]);
        let inner = ModularLattice::new(1, &m, vec![v(&[6])]);
        let q = Subquotient::new(outer, inner);
        assert_eq!(q.structure().invariant_factors, v(&[3]));
        let elems = q.elements();
        assert_eq!(elems.len(), 3);
        for (k, e) in elems.iter().enumerate() {
            assert_eq!(q.coordinates(e).unwrap(), v(&[k as i64]));
        }
    }

    #[test]
    fn subquotient_two_dimensional() {
        let m = BigInt::from(4);
        let outer = ModularLattice::new(2, &m, vec![v(&[1, 0]), v(&[0, 1])]);
        let inner = ModularLattice::new(2, &m, vec![v(&[2, 0]), v(&[0, 2])]);
        let q = Subquotient::new(outer, inner);
        assert_eq!(q.structure().invariant_factors, v(&[2, 2]));
        assert_eq!(q.elements().len(), 4);
    }
}
