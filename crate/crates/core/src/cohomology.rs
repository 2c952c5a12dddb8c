//! Group cohomology in degrees 1 and 2 from the normalized bar resolution.
//!
//! A k-cochain is a function on `(G∖{1})^k`; its coordinates are laid out
//! tuple by tuple in lexicographic order of element indices, each tuple
//! contributing `rank` consecutive entries. Cochains on the torus are stored as
//! integer vectors over a common denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::crystal::DiagonalAction;
use crate::groups::{FiniteGroup, FiniteMatrixGroup};
use crate::linalg::{
    elementary_divisors, solve_linear, AbelianStructure, Elimination, IntMatrix, ModularLattice,
    RatVector, Subquotient, Tracking,
};
use crate::torus::TorsionPoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("group of order {order} exceeds the bound of {bound}")]
    BoundExceeded { order: usize, bound: usize },
    #[error("action table has {found} entries for a group of order {order}")]
    ActionSize { found: usize, order: usize },
    #[error("action matrix of element {element} is not {rank}x{rank}")]
    ActionShape { element: usize, rank: usize },
    #[error("identity element does not act trivially")]
    IdentityNotTrivial,
    #[error("action is not a homomorphism: rho({a}*{b}) != rho({a})*rho({b})")]
    NotHomomorphism { a: usize, b: usize },
    #[error("action matrix entries do not fit in 64 bits")]
    EntryOverflow,
    #[error("only degrees 1 and 2 are supported, got {0}")]
    UnsupportedDegree(usize),
    #[error("torsion-point cohomology {torus} disagrees with lattice cohomology {lattice}")]
    CrossCheckFailed { torus: String, lattice: String },
}

/// `ℤⁿ` or `(ℤ/m)ⁿ` with `G` acting through a table of matrices indexed by
/// group element.
#[derive(Clone, Debug)]
pub struct GModule {
    rank: usize,
    modulus: Option<u64>,
    action: Vec<IntMatrix>,
    flat: Vec<Vec<i64>>,
}

impl GModule {
    pub fn lattice<G: FiniteGroup + ?Sized>(group: &G, action: Vec<IntMatrix>) -> Result<Self, CohomologyError> {
        Self::build(group, action, None)
    }

    pub fn torsion<G: FiniteGroup + ?Sized>(
        group: &G,
        action: Vec<IntMatrix>,
        modulus: u64,
    ) -> Result<Self, CohomologyError> {
        assert!(modulus > 0, "torsion module needs a positive modulus");
        Self::build(group, action, Some(modulus))
    }

    /// `ℤⁿ` with every element acting as the identity.
    pub fn trivial_lattice<G: FiniteGroup + ?Sized>(group: &G, rank: usize) -> Self {
        Self::build(group, vec![IntMatrix::identity(rank); group.order()], None).expect("trivial action is valid")
    }

    /// The defining lattice of an integral matrix group.
    pub fn natural(group: &FiniteMatrixGroup) -> Self {
        assert!(group.modulus().is_none(), "natural lattice needs an integral group");
        Self::build(group, group.elements(), None).expect("a matrix group acts on its lattice")
    }

    fn build<G: FiniteGroup + ?Sized>(
        group: &G,
        action: Vec<IntMatrix>,
        modulus: Option<u64>,
    ) -> Result<Self, CohomologyError> {
        let order = group.order();
        if action.len() != order {
            return Err(CohomologyError::ActionSize {
                found: action.len(),
                order,
            });
        }
        let rank = action.first().map_or(0, IntMatrix::rows);
        let m = modulus.map(BigInt::from);
        let mut flat = Vec::with_capacity(order);
        for (g, a) in action.iter().enumerate() {
            if a.rows() != rank || a.cols() != rank {
                return Err(CohomologyError::ActionShape { element: g, rank });
            }
            let entries: Option<Vec<i64>> = a
                .entries()
                .iter()
                .map(|x| match &m {
                    Some(m) => x.mod_floor(m).to_i64(),
                    None => x.to_i64(),
                })
                .collect();
            flat.push(entries.ok_or(CohomologyError::EntryOverflow)?);
        }
        let module = Self {
            rank,
            modulus,
            action,
            flat,
        };
        if order > 0 && module.flat[0] != module.identity_flat() {
            return Err(CohomologyError::IdentityNotTrivial);
        }
        for a in 0..order {
            for b in 0..order {
                if module.flat[group.product(a, b)] != module.multiply(&module.flat[a], &module.flat[b]) {
                    return Err(CohomologyError::NotHomomorphism { a, b });
                }
            }
        }
        Ok(module)
    }

    fn identity_flat(&self) -> Vec<i64> {
        let n = self.rank;
        let one = if self.modulus == Some(1) { 0 } else { 1 };
        (0..n * n).map(|i| if i % (n + 1) == 0 { one } else { 0 }).collect()
    }

    fn multiply(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let n = self.rank;
        let mut out = vec![0i64; n * n];
        for r in 0..n {
            for c in 0..n {
                let s: i128 = (0..n).map(|k| a[r * n + k] as i128 * b[k * n + c] as i128).sum();
                out[r * n + c] = match self.modulus {
                    Some(m) => s.rem_euclid(m as i128) as i64,
                    None => s as i64,
                };
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }
}

/// `rank·(order−1)^k`.
pub fn cochain_dimension(rank: usize, order: usize, k: usize) -> usize {
    rank * order.saturating_sub(1).pow(k as u32)
}

/// Position of the tuple `(g₁,…,g_k)` (all non-identity) among normalized k-tuples.
pub fn tuple_index(tuple: &[usize], order: usize) -> usize {
    tuple.iter().fold(0, |acc, &g| acc * (order - 1) + (g - 1))
}

fn tuple_at(mut index: usize, order: usize, k: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    for slot in t.iter_mut().rev() {
        *slot = index % (order - 1) + 1;
        index /= order - 1;
    }
    t
}

/// The differential `C^j → C^{j+1}` for `j ≤ 2`.
pub fn coboundary_matrix<G: FiniteGroup + ?Sized>(group: &G, module: &GModule, j: usize) -> IntMatrix {
    let order = group.order();
    let n = module.rank;
    let rows = cochain_dimension(n, order, j + 1);
    let cols = cochain_dimension(n, order, j);
    let mut data = vec![0i64; rows * cols];
    let tuples = if order > 1 { (order - 1).pow(j as u32 + 1) } else { 0 };
    let mut add_block = |row_t: usize, col_t: usize, block: Option<&[i64]>, sign: i64| {
        for a in 0..n {
            for b in 0..n {
                let v = match block {
                    Some(m) => m[a * n + b],
                    None => i64::from(a == b),
                };
                data[(row_t * n + a) * cols + col_t * n + b] += sign * v;
            }
        }
    };
    for r in 0..tuples {
        let g = tuple_at(r, order, j + 1);
        add_block(r, tuple_index(&g[1..], order), Some(&module.flat[g[0]]), 1);
        for i in 0..j {
            let h = group.product(g[i], g[i + 1]);
            if h == 0 {
                continue;
            }
            let mut merged = g[..i].to_vec();
            merged.push(h);
            merged.extend_from_slice(&g[i + 2..]);
            let sign = if i % 2 == 0 { -1 } else { 1 };
            add_block(r, tuple_index(&merged, order), None, sign);
        }
        let sign = if j % 2 == 0 { -1 } else { 1 };
        add_block(r, tuple_index(&g[..j], order), None, sign);
    }
    let m = module.modulus.map(|m| m as i64);
    IntMatrix::from_fn(rows, cols, |r, c| {
        let v = data[r * cols + c];
        BigInt::from(match m {
            Some(m) => v.rem_euclid(m),
            None => v,
        })
    })
}

fn check_bound<G: FiniteGroup + ?Sized>(group: &G, bound: usize) -> Result<(), CohomologyError> {
    if group.order() > bound {
        return Err(CohomologyError::BoundExceeded {
            order: group.order(),
            bound,
        });
    }
    Ok(())
}

/// The differentials `(C^{k−1} → C^k, C^k → C^{k+1})` around degree `k ∈ {1, 2}`.
pub fn boundary_matrices<G: FiniteGroup + ?Sized>(
    group: &G,
    module: &GModule,
    k: usize,
    bound: usize,
) -> Result<(IntMatrix, IntMatrix), CohomologyError> {
    if !(1..=2).contains(&k) {
        return Err(CohomologyError::UnsupportedDegree(k));
    }
    check_bound(group, bound)?;
    Ok((
        coboundary_matrix(group, module, k - 1),
        coboundary_matrix(group, module, k),
    ))
}

#[derive(Clone, Debug)]
enum Realization {
    /// Torsion of `C^k / im d` for lattice coefficients, read off a Smith form.
    Lattice {
        divisors: Vec<BigInt>,
        coordinate_rows: Vec<Vec<BigInt>>,
        /// Rows that vanish exactly on cocycles.
        cocycle_rows: Vec<Vec<BigInt>>,
        generators: Vec<Vec<BigInt>>,
    },
    Quotient(Subquotient),
}

/// `H^k` together with a way to name classes: every cocycle reduces to a
/// canonical representative determined by its coordinates.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    degree: usize,
    rank: usize,
    group_order: usize,
    structure: AbelianStructure,
    /// For torus coefficients: cochain entries are numerators over this denominator.
    denominator: Option<u64>,
    realization: Realization,
}

fn dot(row: &[BigInt], x: &[BigInt]) -> BigInt {
    row.iter()
        .zip(x)
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, b)| a * b)
        .sum()
}

impl CohomologyGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn structure(&self) -> &AbelianStructure {
        &self.structure
    }

    pub fn order(&self) -> BigInt {
        self.structure.order().expect("cohomology of a finite group is finite")
    }

    pub fn denominator(&self) -> Option<u64> {
        self.denominator
    }

    pub fn cochain_dimension(&self) -> usize {
        cochain_dimension(self.rank, self.group_order, self.degree)
    }

    /// Cocycles generating the cyclic summands, aligned with the invariant factors.
    pub fn representatives(&self) -> Vec<Vec<BigInt>> {
        match &self.realization {
            Realization::Lattice { generators, .. } => generators.clone(),
            Realization::Quotient(q) => q.generators().to_vec(),
        }
    }

    pub fn is_cocycle(&self, x: &[BigInt]) -> bool {
        match &self.realization {
            Realization::Lattice { cocycle_rows, .. } => cocycle_rows.iter().all(|r| dot(r, x).is_zero()),
            Realization::Quotient(q) => q.contains(x),
        }
    }

    /// Coordinates of the class of `x`, or `None` if `x` is not a cocycle.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        if x.len() != self.cochain_dimension() {
            return None;
        }
        match &self.realization {
            Realization::Lattice {
                divisors,
                coordinate_rows,
                ..
            } => self.is_cocycle(x).then(|| {
                coordinate_rows
                    .iter()
                    .zip(divisors)
                    .map(|(r, d)| dot(r, x).mod_floor(d))
                    .collect()
            }),
            Realization::Quotient(q) => q.coordinates(x),
        }
    }

    /// Canonical cocycle with the given coordinates.
    pub fn element(&self, coords: &[BigInt]) -> Vec<BigInt> {
        match &self.realization {
            Realization::Lattice { generators, .. } => {
                let mut v = vec![BigInt::zero(); self.cochain_dimension()];
                for (c, g) in coords.iter().zip(generators) {
                    for (a, b) in v.iter_mut().zip(g) {
                        *a += c * b;
                    }
                }
                v
            }
            Realization::Quotient(q) => q.element(coords),
        }
    }

    /// Canonical representative of the class of `x`.
    pub fn canonical(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        match &self.realization {
            Realization::Quotient(q) => q.contains(x).then(|| q.canonical(x)),
            Realization::Lattice { .. } => self.coordinates(x).map(|c| self.element(&c)),
        }
    }

    /// Canonical representatives of all classes, in coordinate order.
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        match &self.realization {
            Realization::Quotient(q) => q.elements(),
            Realization::Lattice { divisors, .. } => {
                let mut out = Vec::new();
                let mut coords = vec![BigInt::zero(); divisors.len()];
                loop {
                    out.push(self.element(&coords));
                    let mut i = divisors.len();
                    loop {
                        if i == 0 {
                            return out;
                        }
                        i -= 1;
                        coords[i] += 1;
                        if coords[i] < divisors[i] {
                            break;
                        }
                        coords[i] = BigInt::zero();
                    }
                }
            }
        }
    }

    /// Full table `g ↦ z(g)` of a 1-cochain on the torus (identity maps to 0).
    pub fn table(&self, x: &[BigInt]) -> Vec<TorsionPoint> {
        let d = self.denominator.expect("torus cochains carry a denominator");
        assert_eq!(self.degree, 1);
        let n = self.rank;
        let mut out = vec![TorsionPoint::zero(n, d)];
        out.extend(x.chunks(n.max(1)).take(self.group_order - 1).map(|c| TorsionPoint::from_bigints(d, c)));
        if n == 0 {
            out.truncate(1);
            out.resize(self.group_order, TorsionPoint::zero(0, d));
        }
        out
    }

    /// Inverse of [`CohomologyGroup::table`]; `None` if some value is not a
    /// point of order dividing the denominator.
    pub fn vector(&self, table: &[TorsionPoint]) -> Option<Vec<BigInt>> {
        let d = self.denominator?;
        if table.len() != self.group_order {
            return None;
        }
        let mut out = Vec::with_capacity(self.cochain_dimension());
        for p in &table[1..] {
            let p = p.lowest_terms();
            if d % p.modulus() != 0 || p.dim() != self.rank {
                return None;
            }
            out.extend(p.with_modulus(d).numerators_big());
        }
        Some(out)
    }
}

/// `H^k(G, A)` for `k ∈ {1, 2}`.
pub fn cohomology<G: FiniteGroup + ?Sized>(
    group: &G,
    module: &GModule,
    k: usize,
    bound: usize,
) -> Result<CohomologyGroup, CohomologyError> {
    if !(1..=2).contains(&k) {
        return Err(CohomologyError::UnsupportedDegree(k));
    }
    check_bound(group, bound)?;
    let incoming = coboundary_matrix(group, module, k - 1);
    let dim = incoming.rows();
    let realization = match module.modulus {
        None => lattice_realization(&incoming),
        Some(m) => {
            let outgoing = coboundary_matrix(group, module, k);
            let m = BigInt::from(m);
            let cocycles = solve_linear(&outgoing, &RatVector::zeros(outgoing.rows()), &m)
                .expect("dimensions agree")
                .expect("homogeneous system");
            let z = ModularLattice::new(dim, &m, cocycles.kernel);
            let b = ModularLattice::new(dim, &m, (0..incoming.cols()).map(|c| incoming.column(c)));
            Realization::Quotient(Subquotient::new(z, b))
        }
    };
    Ok(assemble(k, module.rank, group.order(), None, realization))
}

fn assemble(
    degree: usize,
    rank: usize,
    group_order: usize,
    denominator: Option<u64>,
    realization: Realization,
) -> CohomologyGroup {
    let structure = match &realization {
        Realization::Lattice { divisors, .. } => AbelianStructure::from_divisors(divisors, 0),
        Realization::Quotient(q) => q.structure().clone(),
    };
    CohomologyGroup {
        degree,
        rank,
        group_order,
        structure,
        denominator,
        realization,
    }
}

fn lattice_realization(incoming: &IntMatrix) -> Realization {
    let mut e = Elimination::new(
        incoming,
        Tracking {
            left: true,
            left_inverse: true,
            right: false,
        },
    );
    e.run();
    let diag = e.diagonal_nonzero();
    let u = e.left.expect("tracked");
    let u_inv = e.left_inverse.expect("tracked");
    let mut divisors = Vec::new();
    let mut coordinate_rows = Vec::new();
    let mut generators = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        divisors.push(d.clone());
        coordinate_rows.push(u.row(i).to_vec());
        generators.push(u_inv.column(i));
    }
    let cocycle_rows = (diag.len()..u.rows()).map(|i| u.row(i).to_vec()).collect();
    Realization::Lattice {
        divisors,
        coordinate_rows,
        cocycle_rows,
        generators,
    }
}

/// `H¹(G, T)` for a diagonal action on a torus, realized by cocycles with
/// values in `T[|G|]` modulo coboundaries of points of order dividing
/// `|G|·e`, where `e` is the exponent of the finite part of `T^G`.
///
/// The result is checked against `H²(G, L)`.
pub fn torus_h1(action: &DiagonalAction, bound: usize) -> Result<CohomologyGroup, CohomologyError> {
    let group = action.group();
    check_bound(group, bound)?;
    let module = GModule::lattice(group, action.matrices().to_vec())?;
    let order = group.order();
    let n = module.rank;
    let dim = cochain_dimension(n, order, 1);

    let d0 = coboundary_matrix(group, &module, 0);
    let d1 = coboundary_matrix(group, &module, 1);
    let fixed_exponent = elementary_divisors(&d0).iter().fold(BigInt::one(), |acc, d| acc.lcm(d));
    let value_modulus = BigInt::from(order as u64);
    let denominator = &value_modulus * &fixed_exponent;

    // Cocycles with values in T[|G|], written over the denominator.
    let kernel = solve_linear(&d1, &RatVector::zeros(d1.rows()), &value_modulus)
        .expect("dimensions agree")
        .expect("homogeneous system")
        .kernel;
    let scale = &fixed_exponent;
    let cocycles = ModularLattice::new(
        dim,
        &denominator,
        kernel.into_iter().map(|v| v.into_iter().map(|x| x * scale).collect()),
    );

    // Points u/denominator whose coboundary takes values in T[|G|].
    let mut lambda: Vec<Vec<BigInt>> = solve_linear(&d0, &RatVector::zeros(d0.rows()), scale)
        .expect("dimensions agree")
        .expect("homogeneous system")
        .kernel;
    lambda.extend((0..n).map(|i| {
        let mut v = vec![BigInt::zero(); n];
        v[i] = scale.clone();
        v
    }));
    let coboundaries = ModularLattice::new(dim, &denominator, lambda.iter().map(|u| d0.mul_vec(u)));
    debug_assert!(cocycles.contains_lattice(&coboundaries));

    let quotient = Subquotient::new(cocycles, coboundaries);
    let h1 = assemble(
        1,
        n,
        order,
        Some(denominator.to_u64().expect("denominator fits in 64 bits")),
        Realization::Quotient(quotient),
    );
    let h2 = cohomology(group, &module, 2, bound)?;
    if h1.structure() != h2.structure() {
        return Err(CohomologyError::CrossCheckFailed {
            torus: h1.structure().to_string(),
            lattice: h2.structure().to_string(),
        });
    }
    Ok(h1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{generate_closure, AbstractAbelianGroup, DEFAULT_BOUND};
    use crate::linalg::cokernel_structure;

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn cyclic_scalar(m: u64, rank: usize, sign: i64) -> (AbstractAbelianGroup, GModule) {
        let g = AbstractAbelianGroup::new(vec![m]).unwrap();
        let action = (0..m)
            .map(|k| IntMatrix::scalar(rank, if k % 2 == 0 { 1 } else { sign }))
            .collect();
        let module = GModule::lattice(&g, action).unwrap();
        (g, module)
    }

    #[test]
    fn z2_trivial_differential() {
        let (g, a) = cyclic_scalar(2, 1, 1);
        let (d0, d1) = boundary_matrices(&g, &a, 1, DEFAULT_BOUND).unwrap();
        assert!(d0.is_zero());
        assert_eq!(d1, IntMatrix::from_i64(&[&[2]]));
    }

    #[test]
    fn cochain_dimensions() {
        let (g, a) = cyclic_scalar(2, 3, -1);
        let (d0, d1) = boundary_matrices(&g, &a, 1, DEFAULT_BOUND).unwrap();
        assert_eq!((d0.rows(), d0.cols()), (3, 3));
        assert_eq!((d1.rows(), d1.cols()), (3, 3));
    }

    #[test]
    fn differentials_compose_to_zero() {
        let xi = crate::torus::xi_matrix();
        let g = generate_closure(&[xi.neg()], DEFAULT_BOUND).unwrap();
        let a = GModule::natural(&g);
        for k in 1..=2 {
            let (d_in, d_out) = boundary_matrices(&g, &a, k, DEFAULT_BOUND).unwrap();
            assert!((&d_out * &d_in).is_zero());
        }
    }

    #[test]
    fn trivial_group_has_no_cohomology() {
        let g = AbstractAbelianGroup::trivial();
        let a = GModule::trivial_lattice(&g, 4);
        for k in 1..=2 {
            assert!(cohomology(&g, &a, k, DEFAULT_BOUND).unwrap().structure().is_trivial());
        }
    }

    #[test]
    fn sign_action_on_plane() {
        // Norm is zero, so H¹ = ker N / im(σ−1) = A/2A and H² = A^G / N A = 0.
        let (g, a) = cyclic_scalar(2, 2, -1);
        let h1 = cohomology(&g, &a, 1, DEFAULT_BOUND).unwrap();
        assert_eq!(h1.structure().invariant_factors, big(&[2, 2]));
        assert!(cohomology(&g, &a, 2, DEFAULT_BOUND).unwrap().structure().is_trivial());
    }

    #[test]
    fn trivial_action_h2_is_cyclic() {
        for m in 2..6u64 {
            let g = AbstractAbelianGroup::new(vec![m]).unwrap();
            let a = GModule::trivial_lattice(&g, 1);
            let h2 = cohomology(&g, &a, 2, DEFAULT_BOUND).unwrap();
            assert_eq!(h2.structure().invariant_factors, big(&[m as i64]));
            assert!(cohomology(&g, &a, 1, DEFAULT_BOUND).unwrap().structure().is_trivial());
        }
    }

    #[test]
    fn modular_coefficients() {
        // H¹(ℤ/2, ℤ/2 trivial) = Hom = ℤ/2 and H² = ℤ/2.
        let g = AbstractAbelianGroup::new(vec![2]).unwrap();
        let a = GModule::torsion(&g, vec![IntMatrix::identity(1); 2], 2).unwrap();
        for k in 1..=2 {
            let h = cohomology(&g, &a, k, DEFAULT_BOUND).unwrap();
            assert_eq!(h.structure().invariant_factors, big(&[2]));
        }
    }

    #[test]
    fn rejects_non_homomorphism() {
        let g = AbstractAbelianGroup::new(vec![3]).unwrap();
        let action = vec![IntMatrix::identity(1), IntMatrix::scalar(1, -1), IntMatrix::identity(1)];
        assert!(matches!(
            GModule::lattice(&g, action),
            Err(CohomologyError::NotHomomorphism { .. })
        ));
    }

    #[test]
    fn bound_is_enforced() {
        let (g, a) = cyclic_scalar(4, 1, -1);
        assert_eq!(
            cohomology(&g, &a, 2, 3).unwrap_err(),
            CohomologyError::BoundExceeded { order: 4, bound: 3 }
        );
    }

    /// ker(d_out)/im(d_in) computed the long way round.
    fn full_route(g: &AbstractAbelianGroup, a: &GModule, k: usize) -> AbelianStructure {
        let (d_in, d_out) = boundary_matrices(g, a, k, DEFAULT_BOUND).unwrap();
        let kernel = solve_linear(&d_out, &RatVector::zeros(d_out.rows()), &BigInt::zero())
            .unwrap()
            .unwrap()
            .kernel;
        // Express im(d_in) in kernel coordinates and take the cokernel.
        let kmat = IntMatrix::from_fn(d_out.cols(), kernel.len(), |r, c| kernel[c][r].clone());
        let coords: Vec<Vec<BigInt>> = (0..d_in.cols())
            .map(|c| {
                let col = RatVector::from_integers(&d_in.column(c));
                solve_linear(&kmat, &col, &BigInt::zero()).unwrap().unwrap().particular
            })
            .collect();
        let m = IntMatrix::from_fn(kernel.len(), coords.len(), |r, c| coords[c][r].clone());
        cokernel_structure(&m)
    }

    #[test]
    fn shortcut_matches_kernel_over_image() {
        let (g, a) = cyclic_scalar(4, 2, -1);
        for k in 1..=2 {
            let fast = cohomology(&g, &a, k, DEFAULT_BOUND).unwrap();
            assert_eq!(fast.structure(), &full_route(&g, &a, k));
        }
    }

    #[test]
    fn representatives_are_cocycles_with_unit_coordinates() {
        let g = AbstractAbelianGroup::new(vec![3]).unwrap();
        let a = GModule::trivial_lattice(&g, 2);
        let h2 = cohomology(&g, &a, 2, DEFAULT_BOUND).unwrap();
        let d2 = coboundary_matrix(&g, &a, 2);
        for (i, r) in h2.representatives().iter().enumerate() {
            assert!(d2.mul_vec(r).iter().all(Zero::is_zero));
            let mut expect = vec![BigInt::zero(); h2.representatives().len()];
            expect[i] = BigInt::one();
            assert_eq!(h2.coordinates(r).unwrap(), expect);
        }
        assert_eq!(h2.elements().len(), 9);
    }

    fn diagonal(presets: &[crate::torus::Preset], moduli: Vec<u64>, exps: &[&[u64]]) -> DiagonalAction {
        use crate::torus::{make_torus, FactorDescription};
        let d: Vec<FactorDescription> = presets
            .iter()
            .map(|&p| FactorDescription::Preset { preset: p, iso_tag: None })
            .collect();
        let t = make_torus(&d, false).unwrap();
        let g = AbstractAbelianGroup::new(moduli).unwrap();
        let e: Vec<Vec<Vec<u64>>> = exps.iter().map(|row| row.iter().map(|&x| vec![x]).collect()).collect();
        DiagonalAction::from_exponents(&t, g, &e).unwrap()
    }

    #[test]
    fn torus_h1_small_cases() {
        use crate::torus::Preset::*;
        let a = diagonal(&[Generic], vec![], &[]);
        assert!(torus_h1(&a, DEFAULT_BOUND).unwrap().structure().is_trivial());
        let a = diagonal(&[Generic], vec![2], &[&[1]]);
        assert!(torus_h1(&a, DEFAULT_BOUND).unwrap().structure().is_trivial());
        // Translations of the trivially acted factor by its 2-torsion.
        let a = diagonal(&[Generic, Gauss], vec![2], &[&[1, 0]]);
        let h = torus_h1(&a, DEFAULT_BOUND).unwrap();
        assert_eq!(h.structure().invariant_factors, big(&[2, 2]));
        for z in h.elements() {
            let t = h.table(&z);
            assert_eq!(h.vector(&t).unwrap(), z);
        }
    }

    #[test]
    fn torus_h1_reduction_ignores_coboundaries() {
        use crate::torus::Preset::*;
        let a = diagonal(&[Eisenstein; 4], vec![3, 3], &[&[0, 4, 4, 4], &[4, 0, 4, 2]]);
        let h = torus_h1(&a, DEFAULT_BOUND).unwrap();
        let d = h.denominator().unwrap();
        let order = a.order();
        let n = a.torus().rank();
        // A point of order dividing d/|G|, whose coboundary stays in T[|G|] here.
        let t: Vec<i64> = (0..n as i64).map(|i| (i + 1) * (order as i64)).collect();
        let t = TorsionPoint::new(d, &t);
        for z in h.elements() {
            let table = h.table(&z);
            let shifted: Vec<TorsionPoint> = (0..order)
                .map(|g| table[g].add(&t.apply(a.matrix(g))).sub(&t))
                .collect();
            let v = h.vector(&shifted).unwrap();
            assert_eq!(h.canonical(&v).unwrap(), z);
        }
    }
}
