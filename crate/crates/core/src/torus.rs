//! Complex tori presented as products of declared factors, and torsion points.
//!
//! A factor is a lattice `ℤ^{2d}` together with a finite group of integral
//! matrices (its holomorphic automorphisms fixing the origin). The presets
//! are elliptic curves: a generic curve with units `±1`, the square lattice
//! `ℤ + iℤ` with units `⟨i⟩`, and the hexagonal lattice `ℤ + ξℤ` with units
//! `⟨−ξ⟩`. Lattice bases are `(1, τ)`, so multiplication by `τ` is a 2×2
//! integer matrix.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::groups::{generate_closure, FiniteGroup, FiniteMatrixGroup, GroupError, DEFAULT_BOUND};
use crate::linalg::{solve_linear, IntMatrix, RatVector};

/// Multiplication by `ξ = e^{2πi/3}` on the basis `(1, ξ)`.
pub fn xi_matrix() -> IntMatrix {
    IntMatrix::from_i64(&[&[0, -1], &[1, -1]])
}

/// Multiplication by `i` on the basis `(1, i)`.
pub fn gauss_matrix() -> IntMatrix {
    IntMatrix::from_i64(&[&[0, -1], &[1, 0]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Generic,
    Gauss,
    Eisenstein,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Generic => "generic",
            Preset::Gauss => "gauss",
            Preset::Eisenstein => "eisenstein",
        }
    }

    fn unit_generator(self) -> IntMatrix {
        match self {
            Preset::Generic => IntMatrix::scalar(2, -1),
            Preset::Gauss => gauss_matrix(),
            Preset::Eisenstein => xi_matrix().neg(),
        }
    }

    fn endomorphism_basis(self) -> Vec<IntMatrix> {
        match self {
            Preset::Generic => vec![IntMatrix::identity(2)],
            Preset::Gauss => vec![IntMatrix::identity(2), gauss_matrix()],
            Preset::Eisenstein => vec![IntMatrix::identity(2), xi_matrix()],
        }
    }
}

impl FromStr for Preset {
    type Err = TorusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(Preset::Generic),
            "gauss" => Ok(Preset::Gauss),
            "eisenstein" => Ok(Preset::Eisenstein),
            other => Err(TorusError::UnknownPreset(other.to_string())),
        }
    }
}

/// Input description of one torus factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorDescription {
    Preset {
        preset: Preset,
        iso_tag: Option<String>,
    },
    Custom {
        rank: usize,
        unit_generators: Vec<IntMatrix>,
        iso_tag: Option<String>,
        aut0_infinite: bool,
    },
}

#[derive(Clone, Debug)]
pub struct TorusFactor {
    pub preset: Option<Preset>,
    pub lattice_rank: usize,
    /// Declared generators of the unit group; exponents in a diagonal action
    /// refer to these.
    pub unit_generators: Vec<IntMatrix>,
    /// The declared finite group of automorphisms fixing the origin.
    pub units: FiniteMatrixGroup,
    /// Factors with equal tags are declared biholomorphic.
    pub iso_tag: String,
    /// Set when the factor's full automorphism group is infinite and `units`
    /// is only a chosen finite subgroup.
    pub aut0_infinite: bool,
    /// ℤ-basis of an order of endomorphisms used to generate `GL_r` of blocks.
    pub endomorphism_basis: Vec<IntMatrix>,
}

impl TorusFactor {
    pub fn preset(preset: Preset, iso_tag: Option<String>) -> Self {
        let gen = preset.unit_generator();
        let units = generate_closure(std::slice::from_ref(&gen), DEFAULT_BOUND).expect("preset units are finite");
        Self {
            preset: Some(preset),
            lattice_rank: 2,
            unit_generators: vec![gen],
            units,
            iso_tag: iso_tag.unwrap_or_else(|| preset.name().to_string()),
            aut0_infinite: false,
            endomorphism_basis: preset.endomorphism_basis(),
        }
    }

    /// Order of the j-th declared unit generator.
    pub fn generator_order(&self, j: usize) -> u64 {
        element_order(&self.units, &self.unit_generators[j])
    }

    pub fn kind_name(&self) -> &str {
        self.preset.map_or("custom", Preset::name)
    }
}

fn element_order(group: &FiniteMatrixGroup, m: &IntMatrix) -> u64 {
    let idx = group.position(m).expect("generator lies in its group");
    let mut k = 1;
    let mut cur = idx;
    while cur != 0 {
        cur = group.product(cur, idx);
        k += 1;
    }
    k
}

#[derive(Clone, Debug)]
pub struct TorusSpec {
    pub factors: Vec<TorusFactor>,
    /// Factors carrying distinct iso tags are declared non-isogenous.
    pub non_isogenous: bool,
}

impl TorusSpec {
    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.lattice_rank).sum()
    }

    /// First lattice coordinate of each factor.
    pub fn offsets(&self) -> Vec<usize> {
        self.factors
            .iter()
            .scan(0, |acc, f| {
                let o = *acc;
                *acc += f.lattice_rank;
                Some(o)
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error("unknown factor preset `{0}` (expected generic, gauss or eisenstein)")]
    UnknownPreset(String),
    #[error("factor {factor}: lattice rank {rank} must be even and positive")]
    OddRank { factor: usize, rank: usize },
    #[error("factor {factor}: unit generator {generator} has infinite order")]
    InfiniteOrderUnit { factor: usize, generator: usize },
    #[error("factor {factor}: unit generator {generator} is not a {rank}x{rank} integral unimodular matrix")]
    BadUnit {
        factor: usize,
        generator: usize,
        rank: usize,
    },
    #[error("factor {factor}: declared units generate an infinite or oversized group")]
    UnitGroupTooLarge { factor: usize },
    #[error("factor {factor}: unit group must be abelian")]
    NonAbelianUnits { factor: usize },
    #[error("factors {first} and {second} share iso tag `{tag}` but have different lattices or units")]
    InconsistentIsoTag {
        tag: String,
        first: usize,
        second: usize,
    },
}

/// Validates factor descriptions and assembles the torus.
pub fn make_torus(descriptions: &[FactorDescription], non_isogenous: bool) -> Result<TorusSpec, TorusError> {
    let mut factors = Vec::with_capacity(descriptions.len());
    for (k, d) in descriptions.iter().enumerate() {
        factors.push(match d {
            FactorDescription::Preset { preset, iso_tag } => {
                let tag = iso_tag.clone().or_else(|| {
                    // Generic curves are pairwise non-biholomorphic unless tagged.
                    (*preset == Preset::Generic).then(|| format!("generic-{}", k + 1))
                });
                TorusFactor::preset(*preset, tag)
            }
            FactorDescription::Custom {
                rank,
                unit_generators,
                iso_tag,
                aut0_infinite,
            } => custom_factor(k, *rank, unit_generators, iso_tag.clone(), *aut0_infinite)?,
        });
    }
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            let (a, b) = (&factors[i], &factors[j]);
            if a.iso_tag != b.iso_tag {
                continue;
            }
            let same = a.lattice_rank == b.lattice_rank
                && a.units.order() == b.units.order()
                && a.units.elements().iter().all(|u| b.units.contains(u));
            if !same {
                return Err(TorusError::InconsistentIsoTag {
                    tag: a.iso_tag.clone(),
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(TorusSpec {
        factors,
        non_isogenous,
    })
}

fn custom_factor(
    k: usize,
    rank: usize,
    unit_generators: &[IntMatrix],
    iso_tag: Option<String>,
    aut0_infinite: bool,
) -> Result<TorusFactor, TorusError> {
    if rank == 0 || rank % 2 == 1 {
        return Err(TorusError::OddRank { factor: k, rank });
    }
    for (j, u) in unit_generators.iter().enumerate() {
        if u.rows() != rank || u.cols() != rank || !u.is_unimodular() {
            return Err(TorusError::BadUnit {
                factor: k,
                generator: j,
                rank,
            });
        }
        // Finite-order integral matrices of this size have small order.
        let mut p = u.clone();
        let mut finite = false;
        for _ in 0..DEFAULT_BOUND {
            if p.is_identity() {
                finite = true;
                break;
            }
            p = &p * u;
        }
        if !finite {
            return Err(TorusError::InfiniteOrderUnit {
                factor: k,
                generator: j,
            });
        }
    }
    let mut all = unit_generators.to_vec();
    all.push(IntMatrix::scalar(rank, -1));
    let units = generate_closure(&all, DEFAULT_BOUND).map_err(|e| match e {
        GroupError::ClosureExceedsBound { .. } => TorusError::UnitGroupTooLarge { factor: k },
        _ => TorusError::BadUnit {
            factor: k,
            generator: 0,
            rank,
        },
    })?;
    for a in &all {
        for b in &all {
            if a * b != b * a {
                return Err(TorusError::NonAbelianUnits { factor: k });
            }
        }
    }
    let mut endomorphism_basis = vec![IntMatrix::identity(rank)];
    endomorphism_basis.extend(units.elements().into_iter().filter(|u| !u.is_identity()));
    Ok(TorusFactor {
        preset: None,
        lattice_rank: rank,
        unit_generators: unit_generators.to_vec(),
        units,
        iso_tag: iso_tag.unwrap_or_else(|| format!("custom-{}", k + 1)),
        aut0_infinite,
        endomorphism_basis,
    })
}

/// The point `numerators / modulus` of `ℝⁿ/ℤⁿ`, numerators reduced into `[0, modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    modulus: u64,
    numerators: Vec<u64>,
}

impl TorsionPoint {
    pub fn new(modulus: u64, numerators: &[i64]) -> Self {
        assert!(modulus > 0);
        let m = modulus as i64;
        Self {
            modulus,
            numerators: numerators.iter().map(|x| x.rem_euclid(m) as u64).collect(),
        }
    }

    pub fn from_bigints(modulus: u64, numerators: &[BigInt]) -> Self {
        let m = BigInt::from(modulus);
        Self {
            modulus,
            numerators: numerators
                .iter()
                .map(|x| x.mod_floor(&m).to_u64().expect("reduced residue"))
                .collect(),
        }
    }

    pub fn zero(dim: usize, modulus: u64) -> Self {
        Self {
            modulus,
            numerators: vec![0; dim],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_zero(&self) -> bool {
        self.numerators.iter().all(|&x| x == 0)
    }

    pub fn numerators_big(&self) -> Vec<BigInt> {
        self.numerators.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Same point written over `modulus·factor`.
    pub fn rescaled(&self, factor: u64) -> Self {
        Self {
            modulus: self.modulus * factor,
            numerators: self.numerators.iter().map(|x| x * factor).collect(),
        }
    }

    /// Same point written over the given multiple of the current modulus.
    pub fn with_modulus(&self, modulus: u64) -> Self {
        assert!(modulus % self.modulus == 0, "{modulus} is not a multiple of {}", self.modulus);
        self.rescaled(modulus / self.modulus)
    }

    /// Same point over the smallest possible modulus.
    pub fn lowest_terms(&self) -> Self {
        let g = self
            .numerators
            .iter()
            .fold(self.modulus, |acc, &x| acc.gcd(&x));
        Self {
            modulus: self.modulus / g,
            numerators: self.numerators.iter().map(|x| x / g).collect(),
        }
    }

    /// Equality as points of the torus, independent of the chosen modulus.
    pub fn same_point(&self, other: &Self) -> bool {
        self.lowest_terms() == other.lowest_terms()
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.modulus.lcm(&other.modulus);
        let (a, b) = (self.with_modulus(m), other.with_modulus(m));
        Self {
            modulus: m,
            numerators: a
                .numerators
                .iter()
                .zip(&b.numerators)
                .map(|(x, y)| (x + y) % m)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus;
        Self {
            modulus: m,
            numerators: self.numerators.iter().map(|x| (m - x) % m).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Image under an integral linear map of the torus.
    pub fn apply(&self, m: &IntMatrix) -> Self {
        Self::from_bigints(self.modulus, &m.mul_vec(&self.numerators_big()))
    }

    pub fn to_rational(&self) -> RatVector {
        RatVector::from_fraction(&self.numerators_big(), &BigInt::from(self.modulus))
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.lowest_terms();
        let nums: Vec<String> = p.numerators.iter().map(u64::to_string).collect();
        if p.modulus == 1 {
            write!(f, "({})", nums.join(","))
        } else {
            write!(f, "1/{}*({})", p.modulus, nums.join(","))
        }
    }
}

/// All points of `T[m]` in lexicographic numerator order.
pub fn torsion_points(torus: &TorusSpec, m: u64) -> impl Iterator<Item = TorsionPoint> {
    let n = torus.rank();
    let total = (m as u128).pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut nums = vec![0u64; n];
        for slot in nums.iter_mut().rev() {
            *slot = (idx % m as u128) as u64;
            idx /= m as u128;
        }
        TorsionPoint { modulus: m, numerators: nums }
    })
}

/// Points `x ∈ T[m]` (of the lattice acted on by `u`) with `u·x = x`.
pub fn fixed_torsion_under_unit(u: &IntMatrix, m: u64) -> Vec<TorsionPoint> {
    let a = u.minus_identity();
    let sols = solve_linear(&a, &RatVector::zeros(a.rows()), &BigInt::from(m))
        .expect("square system")
        .expect("zero is always a solution");
    sols.enumerate()
        .expect("finite modulus")
        .iter()
        .map(|x| TorsionPoint::from_bigints(m, x))
        .collect()
}

/// Convenience: `(u − I)·x ≡ 0` check used by tests and oracles.
pub fn is_fixed(u: &IntMatrix, p: &TorsionPoint) -> bool {
    let m = BigInt::from(p.modulus());
    u.minus_identity()
        .mul_vec(&p.numerators_big())
        .iter()
        .all(|x| x.mod_floor(&m).is_zero())
}
