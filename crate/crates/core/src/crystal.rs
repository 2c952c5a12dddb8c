//! Diagonal holonomy actions on a torus, translation cocycles, and the
//! fixed-point tests deciding whether the resulting affine action is free.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::groups::{AbstractAbelianGroup, FiniteGroup};
use crate::linalg::{AbelianStructure, Elimination, IntMatrix, Tracking};
use crate::torus::{TorsionPoint, TorusSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrystalError {
    #[error("expected unit data for {expected} group generators, found {found}")]
    GeneratorCount { expected: usize, found: usize },
    #[error("generator g{generator}: expected {expected} factors, found {found}")]
    FactorCount {
        generator: usize,
        expected: usize,
        found: usize,
    },
    #[error("generator g{generator}, factor {factor}: expected {expected} unit exponents, found {found}")]
    ExponentCount {
        generator: usize,
        factor: usize,
        expected: usize,
        found: usize,
    },
    #[error("generator g{generator}, factor {factor}: exponent {exponent} out of range for a unit of order {order}")]
    ExponentOutOfRange {
        generator: usize,
        factor: usize,
        exponent: u64,
        order: u64,
    },
    #[error("generator g{generator}, factor {factor}: matrix is not a unit of that factor")]
    NotAUnit { generator: usize, factor: usize },
    #[error("generator g{generator} has order {order} in the group but its action does not satisfy u^{order} = 1")]
    RelationViolated { generator: usize, order: u64 },
    #[error("action is not faithful: {element} acts trivially")]
    NotFaithful { element: String },
    #[error("cocycle has {found} values, expected {expected}")]
    CocycleSize { expected: usize, found: usize },
    #[error("cocycle value has dimension {found}, expected {expected}")]
    CocycleDimension { expected: usize, found: usize },
    #[error("cocycle identity z(gh) = z(g) + g*z(h) fails for g = {g}, h = {h}")]
    CocycleIdentity { g: String, h: String },
}

/// Action of `ℤ/m₁ × … × ℤ/m_r` on a product torus where every element acts
/// factorwise by a unit.
#[derive(Clone, Debug)]
pub struct DiagonalAction {
    torus: TorusSpec,
    group: AbstractAbelianGroup,
    /// `units[g][k]`: index in factor `k`'s unit group of the unit by which `g` acts.
    units: Vec<Vec<usize>>,
    matrices: Vec<IntMatrix>,
    /// Per element: rows of the left Smith transform of `ρ(g) − I` beyond its rank.
    obstructions: Vec<Vec<Vec<BigInt>>>,
}

impl DiagonalAction {
    /// `exponents[j][k]` lists, for generator `j` and factor `k`, the powers of
    /// the factor's declared unit generators whose product is the acting unit.
    pub fn from_exponents(
        torus: &TorusSpec,
        group: AbstractAbelianGroup,
        exponents: &[Vec<Vec<u64>>],
    ) -> Result<Self, CrystalError> {
        check_count(group.rank(), exponents.len(), torus.len(), exponents.iter().map(Vec::len))?;
        let mut gens = Vec::with_capacity(exponents.len());
        for (j, per_factor) in exponents.iter().enumerate() {
            let mut row = Vec::with_capacity(per_factor.len());
            for (k, (exps, factor)) in per_factor.iter().zip(&torus.factors).enumerate() {
                if exps.len() != factor.unit_generators.len() {
                    return Err(CrystalError::ExponentCount {
                        generator: j + 1,
                        factor: k + 1,
                        expected: factor.unit_generators.len(),
                        found: exps.len(),
                    });
                }
                let mut idx = 0;
                for (i, &e) in exps.iter().enumerate() {
                    let order = factor.generator_order(i);
                    if e >= order {
                        return Err(CrystalError::ExponentOutOfRange {
                            generator: j + 1,
                            factor: k + 1,
                            exponent: e,
                            order,
                        });
                    }
                    let u = factor.units.position(&factor.unit_generators[i]).expect("generator lies in its group");
                    for _ in 0..e {
                        idx = factor.units.product(idx, u);
                    }
                }
                row.push(idx);
            }
            gens.push(row);
        }
        Self::from_unit_indices(torus, group, gens)
    }

    /// Generator actions given directly as per-factor unit matrices.
    pub fn from_units(
        torus: &TorusSpec,
        group: AbstractAbelianGroup,
        units: &[Vec<IntMatrix>],
    ) -> Result<Self, CrystalError> {
        check_count(group.rank(), units.len(), torus.len(), units.iter().map(Vec::len))?;
        let mut gens = Vec::with_capacity(units.len());
        for (j, per_factor) in units.iter().enumerate() {
            let row = per_factor
                .iter()
                .zip(&torus.factors)
                .enumerate()
                .map(|(k, (u, f))| {
                    f.units.position(u).ok_or(CrystalError::NotAUnit {
                        generator: j + 1,
                        factor: k + 1,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            gens.push(row);
        }
        Self::from_unit_indices(torus, group, gens)
    }

    fn from_unit_indices(
        torus: &TorusSpec,
        group: AbstractAbelianGroup,
        gens: Vec<Vec<usize>>,
    ) -> Result<Self, CrystalError> {
        let power = |k: usize, u: usize, e: u64| {
            let ug = &torus.factors[k].units;
            (0..e).fold(0, |acc, _| ug.product(acc, u))
        };
        for (j, row) in gens.iter().enumerate() {
            let m = group.moduli()[j];
            if row.iter().enumerate().any(|(k, &u)| power(k, u, m) != 0) {
                return Err(CrystalError::RelationViolated { generator: j + 1, order: m });
            }
        }
        let order = group.order();
        let units: Vec<Vec<usize>> = (0..order)
            .map(|g| {
                let e = group.exponents(g);
                (0..torus.len())
                    .map(|k| {
                        let ug = &torus.factors[k].units;
                        e.iter()
                            .zip(&gens)
                            .fold(0, |acc, (&ej, row)| ug.product(acc, power(k, row[k], ej)))
                    })
                    .collect()
            })
            .collect();
        if let Some(g) = (1..order).find(|&g| units[g].iter().all(|&u| u == 0)) {
            return Err(CrystalError::NotFaithful {
                element: group.label(g),
            });
        }
        let matrices: Vec<IntMatrix> = units
            .iter()
            .map(|row| {
                let blocks: Vec<IntMatrix> = row
                    .iter()
                    .zip(&torus.factors)
                    .map(|(&u, f)| f.units.element(u))
                    .collect();
                IntMatrix::block_diagonal(&blocks)
            })
            .collect();
        let obstructions = matrices.iter().map(|m| obstruction_rows(&m.minus_identity())).collect();
        Ok(Self {
            torus: torus.clone(),
            group,
            units,
            matrices,
            obstructions,
        })
    }

    pub fn torus(&self) -> &TorusSpec {
        &self.torus
    }

    pub fn group(&self) -> &AbstractAbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// `ρ(g)` for every element, indexed like the group.
    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &IntMatrix {
        &self.matrices[g]
    }

    /// Index of the unit by which `g` acts on factor `k`.
    pub fn unit_index(&self, g: usize, k: usize) -> usize {
        self.units[g][k]
    }

    /// The character of factor `k`: the unit matrix acting there, per element.
    pub fn character(&self, k: usize) -> Vec<IntMatrix> {
        let ug = &self.torus.factors[k].units;
        (0..self.order()).map(|g| ug.element(self.units[g][k])).collect()
    }

    /// Whether `x ↦ ρ(g)x + v` has a fixed point on the torus.
    pub fn has_fixed_point(&self, g: usize, v: &TorsionPoint) -> bool {
        satisfies_obstructions(&self.obstructions[g], v)
    }

    /// The torus, group and unit choices with factors listed in a new order:
    /// new factor `i` is old factor `order[i]`.
    pub fn reorder_factors(&self, order: &[usize]) -> Self {
        let torus = TorusSpec {
            factors: order.iter().map(|&k| self.torus.factors[k].clone()).collect(),
            non_isogenous: self.torus.non_isogenous,
        };
        let gens = (0..self.group.rank())
            .map(|j| {
                let g = self.group.generator(j);
                order.iter().map(|&k| self.units[g][k]).collect()
            })
            .collect();
        Self::from_unit_indices(&torus, self.group.clone(), gens).expect("reordering preserves validity")
    }
}

fn check_count(
    rank: usize,
    found: usize,
    factors: usize,
    per_gen: impl Iterator<Item = usize>,
) -> Result<(), CrystalError> {
    if found != rank {
        return Err(CrystalError::GeneratorCount { expected: rank, found });
    }
    for (j, n) in per_gen.enumerate() {
        if n != factors {
            return Err(CrystalError::FactorCount {
                generator: j + 1,
                expected: factors,
                found: n,
            });
        }
    }
    Ok(())
}

fn obstruction_rows(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let mut e = Elimination::new(
        a,
        Tracking {
            left: true,
            left_inverse: false,
            right: false,
        },
    );
    e.run();
    let rank = e.diagonal_nonzero().len();
    let u = e.left.expect("tracked");
    (rank..u.rows()).map(|i| u.row(i).to_vec()).collect()
}

fn satisfies_obstructions(rows: &[Vec<BigInt>], v: &TorsionPoint) -> bool {
    let m = BigInt::from(v.modulus());
    let nums = v.numerators_big();
    rows.iter().all(|r| {
        r.iter()
            .zip(&nums)
            .map(|(a, b)| a * b)
            .sum::<BigInt>()
            .is_multiple_of(&m)
    })
}

/// Whether `x ↦ ρg·x + v` has a fixed point on `ℝⁿ/ℤⁿ`: with `U(ρg − I)V = D`,
/// this holds iff `(U·v)ᵢ` is integral for every zero row `i` of `D`.
pub fn element_has_fixed_point(rho_g: &IntMatrix, v: &TorsionPoint) -> bool {
    assert_eq!(rho_g.rows(), v.dim(), "translation dimension must match the matrix");
    satisfies_obstructions(&obstruction_rows(&rho_g.minus_identity()), v)
}

/// A 1-cocycle `G → T`, stored as a full table over a common modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TranslationCocycle {
    table: Vec<TorsionPoint>,
}

impl TranslationCocycle {
    /// Extends values on the group generators by `z(gs) = z(g) + ρ(g)z(s)` and
    /// validates the cocycle identity on all pairs.
    pub fn from_generators(action: &DiagonalAction, values: &[TorsionPoint]) -> Result<Self, CrystalError> {
        let group = action.group();
        if values.len() != group.rank() {
            return Err(CrystalError::CocycleSize {
                expected: group.rank(),
                found: values.len(),
            });
        }
        let n = action.torus().rank();
        if let Some(v) = values.iter().find(|v| v.dim() != n) {
            return Err(CrystalError::CocycleDimension {
                expected: n,
                found: v.dim(),
            });
        }
        let modulus = values.iter().fold(1u64, |acc, v| acc.lcm(&v.modulus()));
        let values: Vec<TorsionPoint> = values.iter().map(|v| v.with_modulus(modulus)).collect();
        let order = group.order();
        let mut table: Vec<Option<TorsionPoint>> = vec![None; order];
        table[0] = Some(TorsionPoint::zero(n, modulus));
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            let zg = table[g].clone().expect("visited");
            for (j, v) in values.iter().enumerate() {
                let h = group.product(g, group.generator(j));
                if table[h].is_none() {
                    table[h] = Some(zg.add(&v.apply(action.matrix(g))));
                    queue.push_back(h);
                }
            }
        }
        let table = table.into_iter().map(|z| z.expect("generators reach every element")).collect();
        Self::from_table(action, table)
    }

    /// A full table `g ↦ z(g)`, validated against the cocycle identity.
    pub fn from_table(action: &DiagonalAction, table: Vec<TorsionPoint>) -> Result<Self, CrystalError> {
        let group = action.group();
        if table.len() != group.order() {
            return Err(CrystalError::CocycleSize {
                expected: group.order(),
                found: table.len(),
            });
        }
        let n = action.torus().rank();
        if let Some(v) = table.iter().find(|v| v.dim() != n) {
            return Err(CrystalError::CocycleDimension {
                expected: n,
                found: v.dim(),
            });
        }
        let modulus = table.iter().fold(1u64, |acc, v| acc.lcm(&v.modulus()));
        let table: Vec<TorsionPoint> = table.iter().map(|v| v.with_modulus(modulus)).collect();
        for g in 0..group.order() {
            for h in 0..group.order() {
                let rhs = table[g].add(&table[h].apply(action.matrix(g)));
                if table[group.product(g, h)] != rhs {
                    return Err(CrystalError::CocycleIdentity {
                        g: group.label(g),
                        h: group.label(h),
                    });
                }
            }
        }
        Ok(Self { table })
    }

    /// A cohomologous cocycle whose values have order dividing `|G|`.
    ///
    /// With `s = Σ_h z(h)` one has `|G|·z(g) = s − ρ(g)s`, so adding the
    /// coboundary of `s/|G|` kills every value by `|G|`.
    pub fn normalized(&self, action: &DiagonalAction) -> Self {
        let order = action.order() as u64;
        let n = action.torus().rank();
        let s = self
            .table
            .iter()
            .fold(TorsionPoint::zero(n, self.modulus()), |acc, z| acc.add(z));
        let t = TorsionPoint::from_bigints(s.modulus() * order, &s.numerators_big());
        let table = self
            .table
            .iter()
            .enumerate()
            .map(|(g, z)| z.add(&t.apply(action.matrix(g))).sub(&t).lowest_terms())
            .collect();
        Self::from_table(action, table).expect("adding a coboundary keeps the cocycle identity")
    }

    pub fn zero(action: &DiagonalAction) -> Self {
        Self {
            table: vec![TorsionPoint::zero(action.torus().rank(), 1); action.order()],
        }
    }

    pub fn table(&self) -> &[TorsionPoint] {
        &self.table
    }

    pub fn value(&self, g: usize) -> &TorsionPoint {
        &self.table[g]
    }

    pub fn modulus(&self) -> u64 {
        self.table.first().map_or(1, TorsionPoint::modulus)
    }
}

impl fmt::Display for TranslationCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.table.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The data determining `Γ`: lattice, holonomy and translation parts.
#[derive(Clone, Debug)]
pub struct CrystalGroup {
    pub action: DiagonalAction,
    pub cocycle: TranslationCocycle,
}

impl CrystalGroup {
    pub fn torus(&self) -> &TorusSpec {
        self.action.torus()
    }
}

/// Smallest non-identity element whose affine map has a fixed point.
pub fn first_fixed_element(action: &DiagonalAction, table: &[TorsionPoint]) -> Option<usize> {
    (1..action.order()).find(|&g| action.has_fixed_point(g, &table[g]))
}

pub fn is_free_table(action: &DiagonalAction, table: &[TorsionPoint]) -> bool {
    first_fixed_element(action, table).is_none()
}

pub fn is_free_action(crystal: &CrystalGroup) -> bool {
    is_free_table(&crystal.action, crystal.cocycle.table())
}

/// `T^G`: its finite part and the rank of `L^G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointGroup {
    pub torsion: AbelianStructure,
    pub betti1: usize,
}

impl FixedPointGroup {
    /// `|T^G|` when it is finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.betti1 == 0).then(|| self.torsion.order().expect("torsion part is finite"))
    }
}

pub fn fixed_point_group(action: &DiagonalAction) -> FixedPointGroup {
    let n = action.torus().rank();
    let parts: Vec<IntMatrix> = (0..action.group().rank())
        .map(|j| action.matrix(action.group().generator(j)).minus_identity())
        .collect();
    let stacked = IntMatrix::vstack(&parts, n);
    let mut e = Elimination::new(&stacked, Tracking::NONE);
    e.run();
    let diag = e.diagonal_nonzero();
    FixedPointGroup {
        betti1: n - diag.len(),
        torsion: AbelianStructure::from_divisors(diag.iter().filter(|d| !d.is_zero()), 0),
    }
}
