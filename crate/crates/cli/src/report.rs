//! The JSON document written by every command.
//!
//! Group orders are decimal strings so they stay exact at any size; an
//! infinite order is the string `"infinite"`.

use flatkahler::classifier::{
    AutomorphismReport, ClassificationReport, InfiniteReason, NormalizerModel, Orbit, StabilizerMethod,
};
use flatkahler::crystal::{DiagonalAction, FixedPointGroup, TranslationCocycle};
use flatkahler::linalg::AbelianStructure;
use flatkahler::torus::{Preset, TorsionPoint, TorusSpec};
use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const INFINITE: &str = "infinite";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    /// `sha256:` followed by the hex digest of the spec file bytes.
    pub input_digest: String,
    pub torus: Vec<FactorSummary>,
    pub group_orders: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphisms: Option<AutomorphismSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freeness: Option<FreenessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<NormalizerSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expectations: Vec<ExpectationCheck>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSummary {
    pub kind: String,
    pub lattice_rank: usize,
    pub iso_tag: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStructure {
    pub display: String,
    pub invariant_factors: Vec<String>,
    pub free_rank: usize,
    pub order: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologySection {
    /// First cohomology with coefficients in the torus.
    pub h1_torus: GroupStructure,
    pub h1_lattice: GroupStructure,
    pub h2_lattice: GroupStructure,
    pub fixed_points: FixedPointSection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointSection {
    pub betti1: usize,
    /// Component group of the fixed torus.
    pub torsion: GroupStructure,
    /// `"positive-dimensional"` when `betti1 > 0`.
    pub order: String,
}

/// Translation part of one group generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorValue {
    pub generator: String,
    /// One entry per factor, e.g. `1/2+1/2*i` on a gauss curve.
    pub point: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub representative: Vec<GeneratorValue>,
    pub size: usize,
    pub stabilizer_order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Vec<GeneratorValue>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationSection {
    pub h1: GroupStructure,
    pub special_class_count: usize,
    pub m: usize,
    /// `enumerated` or `orbit-formula`.
    pub stabilizer_method: String,
    pub image_order: String,
    pub orbits: Vec<OrbitEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasonEntry {
    /// `betti1`, `infinite_flag` or `infinite_factor`.
    pub code: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismSection {
    pub cocycle: Vec<GeneratorValue>,
    pub betti1: usize,
    pub fixed_point_order: String,
    pub group_order: usize,
    pub normalizer_order: String,
    pub orbit_size: usize,
    pub stabilizer_order: String,
    pub quotient_order: String,
    pub aut_order: String,
    pub infinite_reasons: Vec<ReasonEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessSection {
    pub free: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_with_fixed_point: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizerSection {
    pub finite: bool,
    pub order: String,
    pub summary: String,
    /// One-based factor indices.
    pub blocks: Vec<Vec<usize>>,
    pub unit_orders: Vec<usize>,
    pub permutations_examined: usize,
    pub permutation_order: usize,
    pub permutations: Vec<String>,
    pub infinite_reasons: Vec<ReasonEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationCheck {
    pub field: String,
    pub expected: String,
    pub computed: String,
    pub agrees: bool,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn order_text(order: Option<&BigInt>) -> String {
    order.map_or_else(|| INFINITE.to_string(), BigInt::to_string)
}

pub fn structure(s: &AbelianStructure) -> GroupStructure {
    GroupStructure {
        display: s.to_string(),
        invariant_factors: s.invariant_factors.iter().map(BigInt::to_string).collect(),
        free_rank: s.free_rank,
        order: order_text(s.order().as_ref()),
    }
}

pub fn torus_summary(torus: &TorusSpec) -> Vec<FactorSummary> {
    torus
        .factors
        .iter()
        .map(|f| FactorSummary {
            kind: f.kind_name().to_string(),
            lattice_rank: f.lattice_rank,
            iso_tag: f.iso_tag.clone(),
        })
        .collect()
}

pub fn fixed_points(f: &FixedPointGroup) -> FixedPointSection {
    FixedPointSection {
        betti1: f.betti1,
        torsion: structure(&f.torsion),
        order: f
            .order()
            .map_or_else(|| "positive-dimensional".to_string(), |o| o.to_string()),
    }
}

fn fraction(n: i64, m: i64) -> String {
    let g = n.gcd(&m);
    let (n, m) = (n / g, m / g);
    if m == 1 {
        n.to_string()
    } else {
        format!("{n}/{m}")
    }
}

/// A point on one factor: `a+b·τ` for curves, a coordinate tuple otherwise.
fn render_factor(p: &TorsionPoint, offset: usize, rank: usize, preset: Option<Preset>) -> String {
    let m = p.modulus() as i64;
    let nums: Vec<i64> = p.numerators()[offset..offset + rank].iter().map(|&x| x as i64).collect();
    let Some(preset) = preset else {
        let parts: Vec<String> = nums.iter().map(|&n| fraction(n, m)).collect();
        return format!("({})", parts.join(", "));
    };
    let tau = match preset {
        Preset::Generic => "tau",
        Preset::Gauss => "i",
        Preset::Eisenstein => "xi",
    };
    match (nums[0], nums[1]) {
        (0, 0) => "0".to_string(),
        (a, 0) => fraction(a, m),
        (0, b) => format!("{}*{tau}", fraction(b, m)),
        (a, b) => format!("{}+{}*{tau}", fraction(a, m), fraction(b, m)),
    }
}

pub fn render_point(torus: &TorusSpec, p: &TorsionPoint) -> Vec<String> {
    torus
        .offsets()
        .iter()
        .zip(&torus.factors)
        .map(|(&o, f)| render_factor(p, o, f.lattice_rank, f.preset))
        .collect()
}

pub fn generator_values(action: &DiagonalAction, z: &TranslationCocycle) -> Vec<GeneratorValue> {
    let group = action.group();
    (0..group.rank())
        .map(|j| {
            let g = group.generator(j);
            GeneratorValue {
                generator: group.label(g),
                point: render_point(action.torus(), &z.value(g).lowest_terms()),
            }
        })
        .collect()
}

pub fn reasons(r: &[InfiniteReason]) -> Vec<ReasonEntry> {
    r.iter()
        .map(|x| ReasonEntry {
            code: x.code().to_string(),
            detail: x.to_string(),
        })
        .collect()
}

pub fn normalizer(model: &NormalizerModel) -> NormalizerSection {
    NormalizerSection {
        finite: model.is_finite(),
        order: order_text(model.order().as_ref()),
        summary: model.summary(),
        blocks: model
            .blocks
            .blocks
            .iter()
            .map(|b| b.iter().map(|k| k + 1).collect())
            .collect(),
        unit_orders: model.unit_orders.clone(),
        permutations_examined: model.permutations_examined,
        permutation_order: model.permutation_order(),
        permutations: model.permutations.iter().map(|p| p.cycles()).collect(),
        infinite_reasons: reasons(&model.infinite_reasons),
    }
}

pub fn classification(
    action: &DiagonalAction,
    report: &ClassificationReport,
    special: &flatkahler::classifier::SpecialClasses,
    orbit_details: bool,
) -> ClassificationSection {
    let orbit = |o: &Orbit| OrbitEntry {
        representative: generator_values(action, &o.representative),
        size: o.size,
        stabilizer_order: order_text(o.stabilizer_order.as_ref()),
        members: orbit_details.then(|| {
            o.members
                .iter()
                .map(|&i| generator_values(action, &special.cocycle(action, &special.classes[i])))
                .collect()
        }),
    };
    ClassificationSection {
        h1: structure(&report.h1),
        special_class_count: report.special_class_count,
        m: report.m(),
        stabilizer_method: match report.stabilizer_method {
            StabilizerMethod::Enumerated => "enumerated",
            StabilizerMethod::OrbitFormula => "orbit-formula",
        }
        .to_string(),
        image_order: order_text(report.image_order.as_ref()),
        orbits: report.orbits.iter().map(orbit).collect(),
    }
}

pub fn automorphisms(action: &DiagonalAction, z: &TranslationCocycle, r: &AutomorphismReport) -> AutomorphismSection {
    AutomorphismSection {
        cocycle: generator_values(action, z),
        betti1: r.fixed_points.betti1,
        fixed_point_order: fixed_points(&r.fixed_points).order,
        group_order: r.group_order,
        normalizer_order: order_text(r.normalizer_order.as_ref()),
        orbit_size: r.orbit_size,
        stabilizer_order: order_text(r.stabilizer_order.as_ref()),
        quotient_order: order_text(r.quotient_order.as_ref()),
        aut_order: order_text(r.aut_order.as_ref()),
        infinite_reasons: reasons(&r.infinite_reasons),
    }
}

impl ReportDocument {
    pub fn new(command: &str, input: &[u8], action: &DiagonalAction) -> Self {
        Self {
            command: command.to_string(),
            input_digest: digest(input),
            torus: torus_summary(action.torus()),
            group_orders: action.group().moduli().to_vec(),
            cohomology: None,
            classification: None,
            automorphisms: None,
            freeness: None,
            normalizer: None,
            expectations: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Plain-text rendering for the terminal.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        let kinds: Vec<&str> = self.torus.iter().map(|f| f.kind.as_str()).collect();
        line(format!("torus: {}", kinds.join(" x ")));
        line(format!(
            "group: {}",
            self.group_orders.iter().map(|m| format!("Z/{m}")).collect::<Vec<_>>().join(" x ")
        ));
        if let Some(c) = &self.cohomology {
            line(format!("H^1(G, T) = {}", c.h1_torus.display));
            line(format!("H^1(G, L) = {}", c.h1_lattice.display));
            line(format!("H^2(G, L) = {}", c.h2_lattice.display));
            line(format!(
                "T^G: betti1 = {}, component group {} (order {})",
                c.fixed_points.betti1, c.fixed_points.torsion.display, c.fixed_points.order
            ));
        }
        if let Some(n) = &self.normalizer {
            line(format!("normalizer: {} (order {})", n.summary, n.order));
            line(format!(
                "permutations: {} of {} examined valid: {}",
                n.permutation_order,
                n.permutations_examined,
                n.permutations.join(" ")
            ));
        }
        if let Some(c) = &self.classification {
            line(format!("H^1(G, T) = {}", c.h1.display));
            line(format!("special classes: {}", c.special_class_count));
            line(format!("m = {}", c.m));
            for (i, o) in c.orbits.iter().enumerate() {
                let rep: Vec<String> = o
                    .representative
                    .iter()
                    .map(|g| format!("{} -> ({})", g.generator, g.point.join(", ")))
                    .collect();
                line(format!(
                    "  orbit {}: size {}, stabilizer {}, representative {}",
                    i + 1,
                    o.size,
                    o.stabilizer_order,
                    rep.join("; ")
                ));
            }
        }
        if let Some(f) = &self.freeness {
            match &f.element_with_fixed_point {
                None => line("free: yes".to_string()),
                Some(g) => line(format!("free: no, {g} has a fixed point")),
            }
        }
        if let Some(a) = &self.automorphisms {
            line(format!("betti1 = {}, |T^G| = {}", a.betti1, a.fixed_point_order));
            line(format!(
                "orbit {} in N of order {}; |N_alpha| = {}, |N_alpha/G| = {}",
                a.orbit_size, a.normalizer_order, a.stabilizer_order, a.quotient_order
            ));
            line(format!("|Aut(M)| = {}", a.aut_order));
            for r in &a.infinite_reasons {
                line(format!("  infinite ({}): {}", r.code, r.detail));
            }
        }
        for e in &self.expectations {
            line(format!(
                "expected {} = {}: computed {} ({})",
                e.field,
                e.expected,
                e.computed,
                if e.agrees { "agrees" } else { "DISAGREES" }
            ));
        }
        for w in &self.warnings {
            line(format!("warning: {w}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_render_in_lowest_terms() {
        assert_eq!(fraction(2, 4), "1/2");
        assert_eq!(fraction(0, 3), "0");
        assert_eq!(fraction(6, 3), "2");
    }

    #[test]
    fn curve_points() {
        let p = TorsionPoint::new(2, &[1, 1, 1, 0]);
        assert_eq!(render_factor(&p, 0, 2, Some(Preset::Gauss)), "1/2+1/2*i");
        assert_eq!(render_factor(&p, 2, 2, Some(Preset::Eisenstein)), "1/2");
        assert_eq!(render_factor(&p, 0, 4, None), "(1/2, 1/2, 1/2, 0)");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
