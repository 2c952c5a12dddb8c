//! Normalizers of diagonal holonomy groups, the action of the normalizer on
//! cohomology classes, biholomorphism classes as orbits of free classes, and
//! automorphism group orders.
//!
//! An element `n` of the normalizer acts on cocycles by
//! `(n * z)(a) = n·z(n⁻¹ a n)`. On classes with values in `T[|G|]` only `n`
//! modulo `|G|` together with its conjugation action on `G` matters, so the
//! normalizer is handled through generators and, when small enough, through
//! the finite group of such pairs.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::cohomology::{torus_h1, CohomologyError, CohomologyGroup};
use crate::crystal::{
    first_fixed_element, fixed_point_group, is_free_table, CrystalError, CrystalGroup, DiagonalAction,
    FixedPointGroup, TranslationCocycle,
};
use crate::exec::Execution;
use crate::groups::{generate_closure, Conjugation, FiniteGroup, FiniteMatrixGroup, GroupError, DEFAULT_BOUND};
use crate::linalg::{AbelianStructure, IntMatrix};
use crate::torus::TorusSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    /// Cap on enumerated group orders (closures, normalizer images).
    pub bound: usize,
    pub execution: Execution,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            bound: DEFAULT_BOUND,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(
        "factors {first} and {second} carry the same character but different iso tags `{first_tag}` and `{second_tag}`; \
         declare the torus non-isogenous if they are not isogenous"
    )]
    IsogenousBlock {
        first: usize,
        second: usize,
        first_tag: String,
        second_tag: String,
    },
    #[error("the normalizer acts on classes through a group with more than {bound} elements")]
    ImageExceedsBound { bound: usize },
    #[error("the action is not free: {element} has a fixed point")]
    NotFree { element: String },
    #[error("star action produced a non-free class from a free one")]
    FreenessNotPreserved,
    #[error("orbit-stabilizer identity fails: orbit {orbit} x stabilizer {stabilizer} != {group}")]
    OrbitStabilizer {
        orbit: usize,
        stabilizer: BigInt,
        group: BigInt,
    },
}

/// Factors grouped by the character through which `G` acts on them and by iso tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotypicBlocks {
    /// Zero-based factor indices; blocks ordered by their first factor.
    pub blocks: Vec<Vec<usize>>,
}

impl IsotypicBlocks {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn block_of(&self, factor: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&factor))
            .expect("every factor lies in a block")
    }
}

pub fn isotypic_blocks(action: &DiagonalAction) -> Result<IsotypicBlocks, ClassifyError> {
    let torus = action.torus();
    let characters: Vec<Vec<IntMatrix>> = (0..torus.len()).map(|k| action.character(k)).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for k in 0..torus.len() {
        let fk = &torus.factors[k];
        let mut placed = false;
        for block in blocks.iter_mut() {
            let first = block[0];
            let f0 = &torus.factors[first];
            if f0.lattice_rank != fk.lattice_rank || characters[first] != characters[k] {
                continue;
            }
            if f0.iso_tag == fk.iso_tag {
                block.push(k);
                placed = true;
                break;
            }
            // Curves of different preset kinds have different endomorphism rings.
            let distinct_kinds = matches!((f0.preset, fk.preset), (Some(a), Some(b)) if a != b);
            if !torus.non_isogenous && !distinct_kinds {
                return Err(ClassifyError::IsogenousBlock {
                    first: first + 1,
                    second: k + 1,
                    first_tag: f0.iso_tag.clone(),
                    second_tag: fk.iso_tag.clone(),
                });
            }
        }
        if !placed {
            blocks.push(vec![k]);
        }
    }
    Ok(IsotypicBlocks { blocks })
}

/// Why a normalizer or automorphism group is infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InfiniteReason {
    /// `T^G` has positive dimension.
    PositiveBetti { betti1: usize },
    /// Equal factors with equal characters; zero-based indices.
    Block { factors: Vec<usize> },
    /// A factor with infinite automorphism group on which `G` acts by `±1`.
    CentralInfiniteFactor { factor: usize },
}

impl InfiniteReason {
    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            InfiniteReason::PositiveBetti { .. } => "betti1",
            InfiniteReason::Block { .. } => "infinite_flag",
            InfiniteReason::CentralInfiniteFactor { .. } => "infinite_factor",
        }
    }
}

impl fmt::Display for InfiniteReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfiniteReason::PositiveBetti { betti1 } => {
                write!(f, "first Betti number is {betti1}: the fixed torus T^G has positive dimension")
            }
            InfiniteReason::Block { factors } => {
                let names: Vec<String> = factors.iter().map(|k| (k + 1).to_string()).collect();
                write!(
                    f,
                    "factors {{{}}} form a block of {} equal factors with equal characters; its automorphisms contain GL({}) over the endomorphism ring",
                    names.join(","),
                    factors.len(),
                    factors.len()
                )
            }
            InfiniteReason::CentralInfiniteFactor { factor } => write!(
                f,
                "factor {} has an infinite automorphism group and G acts on it by +-1, so all of it normalizes G",
                factor + 1
            ),
        }
    }
}

/// A normalizer element together with the automorphism of `G` it induces.
#[derive(Clone, Debug)]
pub struct NormalizerElement {
    pub label: String,
    pub matrix: IntMatrix,
    /// `conjugation[g]` is the element `n g n⁻¹`.
    pub conjugation: Vec<usize>,
}

/// A permutation of torus factors normalizing `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorPermutation {
    /// Factor `k` is moved to position `images[k]`.
    pub images: Vec<usize>,
    /// Induced automorphism of `G` as an element permutation.
    pub induced: Vec<usize>,
}

impl FactorPermutation {
    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &i)| k == i)
    }

    /// Cycle notation on one-based factor indices, `()` for the identity.
    pub fn cycles(&self) -> String {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push((k + 1).to_string());
                k = self.images[k];
            }
            out.push_str(&format!("({})", cycle.join(" ")));
        }
        if out.is_empty() {
            "()".to_string()
        } else {
            out
        }
    }
}

/// The normalizer of `G` in the automorphisms of `T` fixing the origin, as
/// far as the torus data determines it: diagonal units, factor permutations
/// and, for blocks of equal factors, elementary matrices over the
/// endomorphism ring.
#[derive(Clone, Debug)]
pub struct NormalizerModel {
    pub blocks: IsotypicBlocks,
    pub unit_orders: Vec<usize>,
    /// Valid factor permutations, identity first.
    pub permutations: Vec<FactorPermutation>,
    /// Number of iso-tag-compatible permutations tested.
    pub permutations_examined: usize,
    /// Why the normalizer is infinite; empty when it is finite.
    pub infinite_reasons: Vec<InfiniteReason>,
    /// Caveats about parts of the normalizer that are not modeled exactly.
    pub warnings: Vec<String>,
    /// `|G|`; classes are acted on through matrices modulo this number.
    pub modulus: u64,
    pub generators: Vec<NormalizerElement>,
    group_order: usize,
    /// Diagonal units acting trivially modulo `modulus`.
    kernel_order: BigInt,
}

impl NormalizerModel {
    pub fn is_finite(&self) -> bool {
        self.infinite_reasons.is_empty()
    }

    /// `|N|` when finite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| {
            let units: BigInt = self.unit_orders.iter().map(|&u| BigInt::from(u)).product();
            units * self.permutations.len()
        })
    }

    pub fn permutation_order(&self) -> usize {
        self.permutations.len()
    }

    /// Order of the group through which a finite normalizer acts on classes.
    pub fn image_order(&self) -> Option<BigInt> {
        if self.modulus == 1 {
            return Some(BigInt::one());
        }
        self.order().map(|n| n / &self.kernel_order)
    }

    /// Short description such as `units Z/6 x Z/6, permutations of order 2`.
    pub fn summary(&self) -> String {
        let units: Vec<String> = self.unit_orders.iter().map(|u| format!("Z/{u}")).collect();
        let mut s = format!(
            "diagonal units {} (order {}), factor permutations of order {}",
            units.join(" x "),
            self.unit_orders.iter().map(|&u| BigInt::from(u)).product::<BigInt>(),
            self.permutations.len()
        );
        if !self.is_finite() {
            s.push_str(", infinite");
        }
        s
    }

    /// Elements `(n mod |G|, conjugation)` generated by the model, if there are
    /// at most `bound` of them.
    pub fn torsion_image(&self, bound: usize) -> Result<TorsionImage, ClassifyError> {
        TorsionImage::generate(self, bound)
    }
}

fn permutation_matrix(torus: &TorusSpec, images: &[usize]) -> IntMatrix {
    let offsets = torus.offsets();
    let target_offsets = {
        let mut ranks = vec![0; images.len()];
        for (k, &i) in images.iter().enumerate() {
            ranks[i] = torus.factors[k].lattice_rank;
        }
        ranks
            .iter()
            .scan(0, |acc, r| {
                let o = *acc;
                *acc += r;
                Some(o)
            })
            .collect::<Vec<_>>()
    };
    let n = torus.rank();
    let mut m = IntMatrix::zeros(n, n);
    for (k, &i) in images.iter().enumerate() {
        for d in 0..torus.factors[k].lattice_rank {
            m[(target_offsets[i] + d, offsets[k] + d)] = BigInt::one();
        }
    }
    m
}

/// Conjugation by `n` as a permutation of abstract group elements, if `n` normalizes `ρ(G)`.
fn induced_automorphism(
    action: &DiagonalAction,
    image: &FiniteMatrixGroup,
    abstract_of: &[usize],
    n: &IntMatrix,
) -> Result<Option<Vec<usize>>, ClassifyError> {
    match image.conjugation_map(n)? {
        Conjugation::NotNormalizing => Ok(None),
        Conjugation::Automorphism(p) => {
            let mut out = vec![0; action.order()];
            for g in 0..action.order() {
                let i = image.position(action.matrix(g)).expect("rho(g) lies in the image");
                out[g] = abstract_of[p[i]];
            }
            Ok(Some(out))
        }
    }
}

fn embed_block(torus: &TorusSpec, k: usize, block: &IntMatrix) -> IntMatrix {
    let blocks: Vec<IntMatrix> = torus
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if i == k {
                block.clone()
            } else {
                IntMatrix::identity(f.lattice_rank)
            }
        })
        .collect();
    IntMatrix::block_diagonal(&blocks)
}

fn is_scalar_sign(m: &IntMatrix) -> bool {
    m.is_identity() || m.neg().is_identity()
}

pub fn normalizer_model(action: &DiagonalAction, settings: &Settings) -> Result<NormalizerModel, ClassifyError> {
    let torus = action.torus();
    let blocks = isotypic_blocks(action)?;
    let order = action.order();
    let modulus = order as u64;

    let gens: Vec<IntMatrix> = (0..action.group().rank())
        .map(|j| action.matrix(action.group().generator(j)).clone())
        .collect();
    let image = if gens.is_empty() {
        generate_closure(&[IntMatrix::identity(torus.rank())], settings.bound)?
    } else {
        generate_closure(&gens, settings.bound)?
    };
    let mut abstract_of = vec![0; image.order()];
    for g in 0..order {
        abstract_of[image.position(action.matrix(g)).expect("closure contains rho(g)")] = g;
    }

    // Candidates permute factors only among equal iso tags.
    let mut tag_classes: Vec<Vec<usize>> = Vec::new();
    for (k, f) in torus.factors.iter().enumerate() {
        match tag_classes.iter_mut().find(|c| torus.factors[c[0]].iso_tag == f.iso_tag) {
            Some(c) => c.push(k),
            None => tag_classes.push(vec![k]),
        }
    }
    let candidates: Vec<Vec<usize>> = tag_classes
        .iter()
        .map(|c| c.iter().copied().permutations(c.len()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|choice| {
            let mut images = vec![0; torus.len()];
            for (class, targets) in tag_classes.iter().zip(&choice) {
                for (&k, &t) in class.iter().zip(targets) {
                    images[k] = t;
                }
            }
            images
        })
        .collect();
    let candidates = if candidates.is_empty() { vec![Vec::new()] } else { candidates };
    let tested = settings.execution.map(&candidates, |images| {
        let p = permutation_matrix(torus, images);
        induced_automorphism(action, &image, &abstract_of, &p).map(|induced| {
            induced.map(|induced| FactorPermutation {
                images: images.clone(),
                induced,
            })
        })
    });
    let mut permutations = Vec::new();
    for t in tested {
        if let Some(p) = t? {
            permutations.push(p);
        }
    }
    permutations.sort_by_key(|p| !p.is_identity());

    let identity_conj: Vec<usize> = (0..order).collect();
    let mut generators = Vec::new();
    for (k, f) in torus.factors.iter().enumerate() {
        for (i, u) in f.unit_generators.iter().enumerate() {
            generators.push(NormalizerElement {
                label: format!("unit {} on factor {}", i + 1, k + 1),
                matrix: embed_block(torus, k, u),
                conjugation: identity_conj.clone(),
            });
        }
    }
    for p in permutations.iter().filter(|p| !p.is_identity()) {
        generators.push(NormalizerElement {
            label: format!("permutation {}", p.cycles()),
            matrix: permutation_matrix(torus, &p.images),
            conjugation: p.induced.clone(),
        });
    }

    let mut infinite_reasons = Vec::new();
    let mut warnings = Vec::new();
    let offsets = torus.offsets();
    for block in blocks.blocks.iter().filter(|b| b.len() >= 2) {
        infinite_reasons.push(InfiniteReason::Block { factors: block.clone() });
        for &k in block {
            for &l in block {
                if k == l {
                    continue;
                }
                for (b, lambda) in torus.factors[k].endomorphism_basis.iter().enumerate() {
                    let mut m = IntMatrix::identity(torus.rank());
                    for r in 0..lambda.rows() {
                        for c in 0..lambda.cols() {
                            m[(offsets[l] + r, offsets[k] + c)] = lambda[(r, c)].clone();
                        }
                    }
                    match induced_automorphism(action, &image, &abstract_of, &m)? {
                        Some(conj) => generators.push(NormalizerElement {
                            label: format!("elementary {}->{} by basis element {}", k + 1, l + 1, b + 1),
                            matrix: m,
                            conjugation: conj,
                        }),
                        None => warnings.push(format!(
                            "elementary matrix {}->{} with basis element {} does not normalize the group; omitted",
                            k + 1,
                            l + 1,
                            b + 1
                        )),
                    }
                }
            }
        }
    }
    for (k, f) in torus.factors.iter().enumerate().filter(|(_, f)| f.aut0_infinite) {
        let central = action.character(k).iter().all(is_scalar_sign);
        if central {
            infinite_reasons.push(InfiniteReason::CentralInfiniteFactor { factor: k });
        } else {
            warnings.push(format!(
                "factor {} declares an infinite automorphism group; only its declared units are used",
                k + 1
            ));
        }
        if f.unit_generators.is_empty() || central {
            warnings.push(format!(
                "orbits use only the declared units of factor {}; the true orbits may be coarser",
                k + 1
            ));
        }
    }

    let m = BigInt::from(modulus);
    let kernel_order: BigInt = torus
        .factors
        .iter()
        .map(|f| {
            let n = f
                .units
                .elements()
                .iter()
                .filter(|u| u.minus_identity().reduce_mod(&m).is_zero())
                .count();
            BigInt::from(n)
        })
        .product();

    Ok(NormalizerModel {
        blocks,
        unit_orders: torus.factors.iter().map(|f| f.units.order()).collect(),
        permutations,
        permutations_examined: candidates.len(),
        infinite_reasons,
        warnings,
        modulus,
        generators,
        group_order: order,
        kernel_order,
    })
}

/// The finite group of pairs `(n mod |G|, conjugation by n)`.
#[derive(Clone, Debug)]
pub struct TorsionImage {
    modulus: u64,
    degree: usize,
    elements: Vec<(Vec<i64>, Vec<usize>)>,
}

impl TorsionImage {
    fn generate(model: &NormalizerModel, bound: usize) -> Result<Self, ClassifyError> {
        let q = model.modulus.max(1) as i64;
        let degree = model.generators.first().map_or(0, |g| g.matrix.rows());
        let flat = |m: &IntMatrix| -> Vec<i64> {
            m.entries()
                .iter()
                .map(|x| x.mod_floor(&BigInt::from(q)).to_i64().expect("reduced"))
                .collect()
        };
        let mut id = flat(&IntMatrix::identity(degree));
        if q == 1 {
            id.iter_mut().for_each(|x| *x = 0);
        }
        let identity = (id, (0..model.group_order).collect::<Vec<_>>());
        let gens: Vec<(Vec<i64>, Vec<usize>)> =
            model.generators.iter().map(|g| (flat(&g.matrix), g.conjugation.clone())).collect();
        let mut seen: HashSet<(Vec<i64>, Vec<usize>)> = HashSet::from([identity.clone()]);
        let mut elements = vec![identity.clone()];
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for s in &gens {
                let y = compose(&x, s, degree, q);
                if seen.insert(y.clone()) {
                    if elements.len() >= bound {
                        return Err(ClassifyError::ImageExceedsBound { bound });
                    }
                    elements.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(Self {
            modulus: q as u64,
            degree,
            elements,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Matrices are reduced modulo this number.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

fn compose(a: &(Vec<i64>, Vec<usize>), b: &(Vec<i64>, Vec<usize>), n: usize, q: i64) -> (Vec<i64>, Vec<usize>) {
    let mut m = vec![0i64; n * n];
    for r in 0..n {
        for k in 0..n {
            let x = a.0[r * n + k];
            if x == 0 {
                continue;
            }
            for c in 0..n {
                m[r * n + c] = (m[r * n + c] + x * b.0[k * n + c]) % q;
            }
        }
    }
    let conj = b.1.iter().map(|&g| a.1[g]).collect();
    (m, conj)
}

/// Applies `(n, conjugation)` to a cocycle vector: `(n * z)(c(g)) = n·z(g)`.
fn star(
    h1: &CohomologyGroup,
    rank: usize,
    matrix: &[i64],
    conjugation: &[usize],
    z: &[BigInt],
) -> Vec<BigInt> {
    let d = h1.denominator().expect("torus cohomology") as i128;
    let order = conjugation.len();
    let mut out = vec![BigInt::zero(); z.len()];
    let vals: Vec<i128> = z.iter().map(|x| x.to_i128().expect("reduced entry")).collect();
    for g in 1..order {
        let target = conjugation[g];
        let src = &vals[(g - 1) * rank..g * rank];
        for r in 0..rank {
            let s: i128 = (0..rank).map(|c| matrix[r * rank + c] as i128 * src[c]).sum();
            out[(target - 1) * rank + r] = BigInt::from(s.rem_euclid(d));
        }
    }
    h1.canonical(&out).expect("star action preserves cocycles")
}

fn integral_flat(m: &IntMatrix) -> Vec<i64> {
    m.entries().iter().map(|x| x.to_i64().expect("small entries")).collect()
}

/// Cohomology classes whose affine action is free.
#[derive(Clone, Debug)]
pub struct SpecialClasses {
    pub h1: CohomologyGroup,
    /// Canonical cocycle vectors, in coordinate order.
    pub classes: Vec<Vec<BigInt>>,
}

impl SpecialClasses {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn cocycle(&self, action: &DiagonalAction, v: &[BigInt]) -> TranslationCocycle {
        let table = self.h1.table(v).iter().map(|p| p.lowest_terms()).collect();
        TranslationCocycle::from_table(action, table).expect("classes are cocycles")
    }
}

pub fn special_classes(action: &DiagonalAction, settings: &Settings) -> Result<SpecialClasses, ClassifyError> {
    let h1 = torus_h1(action, settings.bound)?;
    let all = h1.elements();
    let free = settings
        .execution
        .map(&all, |z| is_free_table(action, &h1.table(z)));
    let classes = all.into_iter().zip(free).filter(|(_, f)| *f).map(|(z, _)| z).collect();
    Ok(SpecialClasses { h1, classes })
}

/// Stabilizer order of a class; `None` means infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub representative: TranslationCocycle,
    pub representative_vector: Vec<BigInt>,
    pub size: usize,
    /// `|N_α|` for the classes in this orbit, `None` when infinite.
    pub stabilizer_order: Option<BigInt>,
    /// Stabilizer inside the finite image acting on classes, when enumerated.
    pub image_stabilizer_order: Option<BigInt>,
    /// Indices into the special class list.
    pub members: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizerMethod {
    /// Stabilizers counted element by element in the enumerated image.
    Enumerated,
    /// Image too large to enumerate; `|N_α| = |N| / |orbit|` for finite `N`.
    OrbitFormula,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub h1: AbelianStructure,
    pub special_class_count: usize,
    pub orbits: Vec<Orbit>,
    pub normalizer_finite: bool,
    pub normalizer_order: Option<BigInt>,
    pub image_order: Option<BigInt>,
    pub stabilizer_method: StabilizerMethod,
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    /// Number of biholomorphism classes.
    pub fn m(&self) -> usize {
        self.orbits.len()
    }
}

/// Orbits of the normalizer on special classes.
pub fn classify_orbits(
    action: &DiagonalAction,
    special: &SpecialClasses,
    model: &NormalizerModel,
    settings: &Settings,
) -> Result<ClassificationReport, ClassifyError> {
    let h1 = &special.h1;
    let rank = action.torus().rank();
    let index: HashMap<&[BigInt], usize> = special
        .classes
        .iter()
        .enumerate()
        .map(|(i, z)| (z.as_slice(), i))
        .collect();
    let gens: Vec<(Vec<i64>, &[usize])> = model
        .generators
        .iter()
        .map(|g| (integral_flat(&g.matrix), g.conjugation.as_slice()))
        .collect();

    // Images of every class under every generator.
    let moves = settings.execution.map(&special.classes, |z| {
        gens.iter()
            .map(|(m, c)| index.get(star(h1, rank, m, c, z).as_slice()).copied())
            .collect::<Vec<_>>()
    });
    let mut parent: Vec<usize> = (0..special.count()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let next = p[x];
            p[x] = r;
            x = next;
        }
        r
    }
    for (i, targets) in moves.iter().enumerate() {
        for t in targets {
            let j = t.ok_or(ClassifyError::FreenessNotPreserved)?;
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..special.count() {
        let r = find(&mut parent, i);
        let s = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[s].push(i);
    }

    let image = match model.torsion_image(settings.bound) {
        Ok(img) => Some(img),
        Err(ClassifyError::ImageExceedsBound { .. }) if model.is_finite() => None,
        Err(e) => return Err(e),
    };
    let mut warnings = model.warnings.clone();
    let image_order = match &image {
        Some(img) => {
            let o = BigInt::from(img.order());
            if let Some(expected) = model.image_order() {
                assert_eq!(o, expected, "image order disagrees with |N| / |kernel|");
            }
            Some(o)
        }
        None => {
            warnings.push(format!(
                "normalizer image has more than {} elements; stabilizers follow from |N| / |orbit|",
                settings.bound
            ));
            model.image_order()
        }
    };

    let mut orbits = Vec::with_capacity(groups.len());
    for members in groups {
        let rep_index = *members
            .iter()
            .min_by(|&&a, &&b| special.classes[a].cmp(&special.classes[b]))
            .expect("orbits are nonempty");
        let rep = &special.classes[rep_index];
        let image_stabilizer_order = image.as_ref().map(|img| {
            BigInt::from(settings.execution.count(&img.elements, |(m, c)| {
                star(h1, rank, m, c, rep) == *rep
            }))
        });
        if let (Some(stab), Some(total)) = (&image_stabilizer_order, &image_order) {
            if stab * members.len() != *total {
                return Err(ClassifyError::OrbitStabilizer {
                    orbit: members.len(),
                    stabilizer: stab.clone(),
                    group: total.clone(),
                });
            }
        }
        let stabilizer_order = model.order().map(|n| {
            debug_assert!(n.is_multiple_of(&BigInt::from(members.len())));
            n / members.len()
        });
        orbits.push(Orbit {
            representative: special.cocycle(action, rep),
            representative_vector: rep.clone(),
            size: members.len(),
            stabilizer_order,
            image_stabilizer_order,
            members,
        });
    }
    orbits.sort_by(|a, b| a.representative_vector.cmp(&b.representative_vector));

    Ok(ClassificationReport {
        h1: h1.structure().clone(),
        special_class_count: special.count(),
        orbits,
        normalizer_finite: model.is_finite(),
        normalizer_order: model.order(),
        image_order,
        stabilizer_method: if image.is_some() {
            StabilizerMethod::Enumerated
        } else {
            StabilizerMethod::OrbitFormula
        },
        warnings,
    })
}

/// Special classes, normalizer and orbits in one call.
pub fn classify(action: &DiagonalAction, settings: &Settings) -> Result<(NormalizerModel, ClassificationReport), ClassifyError> {
    let model = normalizer_model(action, settings)?;
    let special = special_classes(action, settings)?;
    let report = classify_orbits(action, &special, &model, settings)?;
    Ok((model, report))
}

#[derive(Clone, Debug)]
pub struct AutomorphismReport {
    pub fixed_points: FixedPointGroup,
    pub group_order: usize,
    pub normalizer_order: Option<BigInt>,
    /// Size of the class's orbit under the normalizer.
    pub orbit_size: usize,
    /// `|N_α|`.
    pub stabilizer_order: Option<BigInt>,
    /// `|N_α / G|`.
    pub quotient_order: Option<BigInt>,
    /// `|Aut(M)| = |T^G|·|N_α/G|`.
    pub aut_order: Option<BigInt>,
    pub infinite_reasons: Vec<InfiniteReason>,
    pub warnings: Vec<String>,
}

/// Orbit of one class under the model's generators, by breadth-first search.
fn class_orbit(
    h1: &CohomologyGroup,
    rank: usize,
    model: &NormalizerModel,
    start: &[BigInt],
    bound: usize,
    action: &DiagonalAction,
) -> Result<usize, ClassifyError> {
    let gens: Vec<(Vec<i64>, &[usize])> = model
        .generators
        .iter()
        .map(|g| (integral_flat(&g.matrix), g.conjugation.as_slice()))
        .collect();
    let mut seen: HashSet<Vec<BigInt>> = HashSet::from([start.to_vec()]);
    let mut queue = VecDeque::from([start.to_vec()]);
    while let Some(z) = queue.pop_front() {
        for (m, c) in &gens {
            let y = star(h1, rank, m, c, &z);
            if !seen.contains(&y) {
                if !is_free_table(action, &h1.table(&y)) {
                    return Err(ClassifyError::FreenessNotPreserved);
                }
                if seen.len() >= bound {
                    return Err(ClassifyError::ImageExceedsBound { bound });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen.len())
}

pub fn automorphism_report(
    crystal: &CrystalGroup,
    model: &NormalizerModel,
    settings: &Settings,
) -> Result<AutomorphismReport, ClassifyError> {
    let action = &crystal.action;
    if let Some(g) = first_fixed_element(action, crystal.cocycle.table()) {
        return Err(ClassifyError::NotFree {
            element: action.group().label(g),
        });
    }
    let fixed_points = fixed_point_group(action);
    let h1 = torus_h1(action, settings.bound)?;
    let z = crystal.cocycle.normalized(action);
    let v = h1.vector(z.table()).expect("normalized values have order dividing |G|");
    let class = h1.canonical(&v).expect("a cocycle reduces to its class");
    let orbit_size = class_orbit(&h1, action.torus().rank(), model, &class, settings.bound, action)?;

    let mut infinite_reasons = Vec::new();
    if fixed_points.betti1 > 0 {
        infinite_reasons.push(InfiniteReason::PositiveBetti {
            betti1: fixed_points.betti1,
        });
    }
    infinite_reasons.extend(model.infinite_reasons.iter().cloned());
    let group_order = action.order();
    let stabilizer_order = model.order().map(|n| n / orbit_size);
    let quotient_order = stabilizer_order.as_ref().map(|s| {
        debug_assert!(s.is_multiple_of(&BigInt::from(group_order)));
        s / group_order
    });
    let aut_order = match (fixed_points.order(), &quotient_order) {
        (Some(t), Some(q)) => Some(t * q),
        _ => None,
    };
    Ok(AutomorphismReport {
        fixed_points,
        group_order,
        normalizer_order: model.order(),
        orbit_size,
        stabilizer_order,
        quotient_order,
        aut_order,
        infinite_reasons,
        warnings: model.warnings.clone(),
    })
}
