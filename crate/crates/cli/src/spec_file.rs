//! The TOML manifold description read by every command.
//!
//! ```toml
//! [[torus.factor]]
//! preset = "eisenstein"
//!
//! [group]
//! orders = [2, 2]
//! generators = [["1", "-1", "-1"], ["-1", "1", "-1"]]
//!
//! [cocycle]
//! modulus = 2
//! values = [[1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 1, 0]]
//! ```

use flatkahler::crystal::{CrystalError, DiagonalAction, TranslationCocycle};
use flatkahler::groups::AbstractAbelianGroup;
use flatkahler::linalg::IntMatrix;
use flatkahler::torus::{gauss_matrix, make_torus, xi_matrix, FactorDescription, Preset, TorsionPoint, TorusFactor, TorusSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("syntax error: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("line {line}, field `{field}`: {message}")]
    Semantic { line: usize, field: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpecFile {
    pub torus: TorusSection,
    pub group: GroupSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleSection>,
    /// Values the computation is compared against; disagreements become warnings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSection {
    /// Factors with equal characters but different tags are then kept apart
    /// instead of being rejected.
    #[serde(default, skip_serializing_if = "is_false")]
    pub non_isogenous: bool,
    pub factor: Vec<Spanned<FactorEntry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Unit generators of a custom factor, as integer matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso_tag: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub aut0_infinite: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub orders: Vec<u64>,
    /// `generators[j][k]`: the unit by which generator `j` acts on factor `k`.
    pub generators: Vec<Vec<Spanned<UnitChoice>>>,
}

/// A unit given by its exponent, by exponents of several unit generators, or
/// by name (`1`, `-1`, `i`, `-i`, `xi`, `xi^2`, `-xi`, `-xi^2`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitChoice {
    Exponent(u64),
    Exponents(Vec<u64>),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSection {
    pub modulus: u64,
    /// Translation part of each group generator, as numerators over `modulus`.
    pub values: Spanned<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_class_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer_order: Option<OrderValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point_order: Option<OrderValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<OrderValue>,
}

/// A group order: an integer, or text such as `"infinite"` or a decimal too
/// large for 64 bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderValue {
    Number(u64),
    Text(String),
}

impl OrderValue {
    pub fn as_text(&self) -> String {
        match self {
            OrderValue::Number(n) => n.to_string(),
            OrderValue::Text(s) => s.clone(),
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// A parsed file together with the objects it describes.
#[derive(Clone, Debug)]
pub struct ValidatedSpec {
    pub file: ManifoldSpecFile,
    pub torus: TorusSpec,
    pub action: DiagonalAction,
    pub cocycle: Option<TranslationCocycle>,
}

pub fn parse_manifold_spec(text: &str) -> Result<ManifoldSpecFile, SpecError> {
    Ok(toml::from_str(text)?)
}

pub fn to_toml(file: &ManifoldSpecFile) -> String {
    toml::to_string(file).expect("spec files always serialize")
}

/// Parses and checks a spec, building the torus, action and cocycle.
pub fn load_manifold_spec(text: &str) -> Result<ValidatedSpec, SpecError> {
    let file = parse_manifold_spec(text)?;
    validate(text, file)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn semantic(text: &str, offset: usize, field: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Semantic {
        line: line_of(text, offset),
        field: field.into(),
        message: message.into(),
    }
}

fn validate(text: &str, file: ManifoldSpecFile) -> Result<ValidatedSpec, SpecError> {
    let mut descriptions = Vec::with_capacity(file.torus.factor.len());
    for (k, entry) in file.torus.factor.iter().enumerate() {
        descriptions.push(describe_factor(text, k, entry)?);
    }
    if descriptions.is_empty() {
        return Err(semantic(text, 0, "torus.factor", "at least one factor is required"));
    }
    let torus = make_torus(&descriptions, file.torus.non_isogenous).map_err(|e| {
        let at = file.torus.factor.first().map_or(0, |f| f.span().start);
        semantic(text, at, "torus.factor", e.to_string())
    })?;

    let group_at = text.find("[group]").unwrap_or(0);
    let group = AbstractAbelianGroup::new(file.group.orders.clone())
        .map_err(|e| semantic(text, group_at, "group.orders", e.to_string()))?;
    if file.group.generators.len() != file.group.orders.len() {
        return Err(semantic(
            text,
            group_at,
            "group.generators",
            format!(
                "{} generator rows for {} cyclic factors",
                file.group.generators.len(),
                file.group.orders.len()
            ),
        ));
    }
    let mut exponents = Vec::with_capacity(file.group.generators.len());
    for (j, row) in file.group.generators.iter().enumerate() {
        if row.len() != torus.len() {
            let at = row.first().map_or(group_at, |c| c.span().start);
            return Err(semantic(
                text,
                at,
                format!("group.generators[{j}]"),
                format!("{} entries for {} torus factors", row.len(), torus.len()),
            ));
        }
        let mut per_factor = Vec::with_capacity(row.len());
        for (k, choice) in row.iter().enumerate() {
            let field = format!("group.generators[{j}][{k}]");
            let exps = resolve_unit(&torus.factors[k], choice.get_ref())
                .map_err(|m| semantic(text, choice.span().start, &field, format!("factor {}: {m}", k + 1)))?;
            per_factor.push(exps);
        }
        exponents.push(per_factor);
    }
    let action = DiagonalAction::from_exponents(&torus, group, &exponents)
        .map_err(|e| semantic(text, group_at, "group.generators", e.to_string()))?;

    let cocycle = match &file.cocycle {
        None => None,
        Some(c) => Some(build_cocycle(text, &action, c)?),
    };
    Ok(ValidatedSpec {
        file,
        torus,
        action,
        cocycle,
    })
}

fn describe_factor(text: &str, k: usize, entry: &Spanned<FactorEntry>) -> Result<FactorDescription, SpecError> {
    let at = entry.span().start;
    let f = entry.get_ref();
    let field = format!("torus.factor[{k}]");
    match (&f.preset, f.rank, &f.units) {
        (Some(name), None, None) => {
            if f.aut0_infinite {
                return Err(semantic(text, at, field, "aut0_infinite applies to custom factors only"));
            }
            let preset: Preset = name.parse().map_err(|e: flatkahler::torus::TorusError| semantic(text, at, &field, e.to_string()))?;
            Ok(FactorDescription::Preset {
                preset,
                iso_tag: f.iso_tag.clone(),
            })
        }
        (None, Some(rank), units) => {
            let mut unit_generators = Vec::new();
            for (i, m) in units.iter().flatten().enumerate() {
                let m = IntMatrix::from_rows(m)
                    .map_err(|e| semantic(text, at, format!("{field}.units[{i}]"), e.to_string()))?;
                unit_generators.push(m);
            }
            Ok(FactorDescription::Custom {
                rank,
                unit_generators,
                iso_tag: f.iso_tag.clone(),
                aut0_infinite: f.aut0_infinite,
            })
        }
        (Some(_), _, _) => Err(semantic(text, at, field, "a preset factor takes no rank or units")),
        (None, None, _) => Err(semantic(text, at, field, "give either `preset` or `rank` with `units`")),
    }
}

fn named_unit(factor: &TorusFactor, name: &str) -> Option<IntMatrix> {
    let n = factor.lattice_rank;
    let (sign, base) = match name.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, name),
    };
    let m = match (base, factor.preset) {
        ("1", _) => IntMatrix::identity(n),
        ("i", Some(Preset::Gauss)) => gauss_matrix(),
        ("xi", Some(Preset::Eisenstein)) => xi_matrix(),
        ("xi^2", Some(Preset::Eisenstein)) => xi_matrix().pow(2),
        _ => return None,
    };
    Some(if sign < 0 { m.neg() } else { m })
}

/// Exponents of the factor's unit generators selecting the given unit.
fn resolve_unit(factor: &TorusFactor, choice: &UnitChoice) -> Result<Vec<u64>, String> {
    let orders: Vec<u64> = (0..factor.unit_generators.len()).map(|i| factor.generator_order(i)).collect();
    let check = |exps: Vec<u64>| -> Result<Vec<u64>, String> {
        if exps.len() != orders.len() {
            return Err(format!(
                "expected {} exponents (one per unit generator), found {}",
                orders.len(),
                exps.len()
            ));
        }
        for (e, o) in exps.iter().zip(&orders) {
            if e >= o {
                return Err(format!("exponent {e} is out of range for a unit generator of order {o}"));
            }
        }
        Ok(exps)
    };
    match choice {
        UnitChoice::Exponent(e) => check(vec![*e]),
        UnitChoice::Exponents(v) => check(v.clone()),
        UnitChoice::Name(name) => {
            let target = named_unit(factor, name)
                .ok_or_else(|| format!("`{name}` is not a unit name for a {} factor", factor.kind_name()))?;
            find_exponents(factor, &orders, &target)
                .ok_or_else(|| format!("`{name}` is not in the declared unit group"))
        }
    }
}

fn find_exponents(factor: &TorusFactor, orders: &[u64], target: &IntMatrix) -> Option<Vec<u64>> {
    let total: u64 = orders.iter().product();
    (0..total).find_map(|mut idx| {
        let mut exps = Vec::with_capacity(orders.len());
        let mut m = IntMatrix::identity(factor.lattice_rank);
        for (g, &o) in factor.unit_generators.iter().zip(orders) {
            let e = idx % o;
            idx /= o;
            m = m.checked_mul(&g.pow(e)).expect("square units");
            exps.push(e);
        }
        (&m == target).then_some(exps)
    })
}

fn build_cocycle(text: &str, action: &DiagonalAction, c: &CocycleSection) -> Result<TranslationCocycle, SpecError> {
    let at = c.values.span().start;
    let values = c.values.get_ref();
    let rank = action.torus().rank();
    let gens = action.group().rank();
    if c.modulus == 0 {
        return Err(semantic(text, at, "cocycle.modulus", "modulus must be positive"));
    }
    if values.len() != gens {
        return Err(semantic(
            text,
            at,
            "cocycle.values",
            format!("{} values for {gens} group generators", values.len()),
        ));
    }
    let mut points = Vec::with_capacity(gens);
    for (j, v) in values.iter().enumerate() {
        if v.len() != rank {
            return Err(semantic(
                text,
                at,
                format!("cocycle.values[{j}]"),
                format!("{} numerators for a torus of real dimension {rank}", v.len()),
            ));
        }
        points.push(TorsionPoint::new(c.modulus, v));
    }
    TranslationCocycle::from_generators(action, &points).map_err(|e| {
        let message = match &e {
            CrystalError::CocycleIdentity { g, h } => {
                format!("not a cocycle: z(gh) = z(g) + g*z(h) fails for the pair ({g}, {h})")
            }
            other => other.to_string(),
        };
        semantic(text, at, "cocycle.values", message)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHW: &str = r#"
[[torus.factor]]
preset = "eisenstein"

[[torus.factor]]
preset = "eisenstein"

[[torus.factor]]
preset = "gauss"

[group]
orders = [2, 2]
generators = [["1", "-1", "-1"], ["-1", "1", "-1"]]
"#;

    #[test]
    fn names_and_exponents_agree() {
        let a = load_manifold_spec(CHW).unwrap();
        let b = load_manifold_spec(&CHW.replace(r#"[["1", "-1", "-1"], ["-1", "1", "-1"]]"#, "[[0, 3, 2], [3, 0, 2]]")).unwrap();
        assert_eq!(a.action.matrices(), b.action.matrices());
        assert_eq!(a.torus.len(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_manifold_spec(&CHW.replace("orders", "order")).unwrap_err();
        assert!(err.to_string().contains("order"), "{err}");
    }

    #[test]
    fn exponent_out_of_range_names_line_and_field() {
        let text = CHW.replace(r#"["-1", "1", "-1"]"#, "[3, 0, 7]");
        match load_manifold_spec(&text).unwrap_err() {
            SpecError::Semantic { line, field, message } => {
                assert_eq!(line, 13);
                assert_eq!(field, "group.generators[1][2]");
                assert!(message.contains("order 4"), "{message}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn wrong_unit_name() {
        let text = CHW.replace(r#"["1", "-1", "-1"]"#, r#"["1", "i", "-1"]"#);
        let err = load_manifold_spec(&text).unwrap_err().to_string();
        assert!(err.contains("eisenstein"), "{err}");
    }

    #[test]
    fn bad_cocycle_names_the_pair() {
        // z(g1) = (1/3, 0, 0) with g2 acting by -1 on the first curve breaks g1*g2 = g2*g1.
        let text = format!("{CHW}\n[cocycle]\nmodulus = 3\nvalues = [[1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]]\n");
        match load_manifold_spec(&text).unwrap_err() {
            SpecError::Semantic { line, field, message } => {
                assert_eq!(field, "cocycle.values");
                assert_eq!(line, 17);
                assert!(message.contains("fails for the pair (g2, g1)"), "{message}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn custom_factor_with_units() {
        let text = r#"
[[torus.factor]]
rank = 4
units = [[[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]]
aut0_infinite = true

[group]
orders = [2]
generators = [[1]]
"#;
        let s = load_manifold_spec(text).unwrap();
        assert_eq!(s.torus.rank(), 4);
        assert!(s.torus.factors[0].aut0_infinite);
    }

    #[test]
    fn round_trip() {
        let file = parse_manifold_spec(CHW).unwrap();
        assert_eq!(parse_manifold_spec(&to_toml(&file)).unwrap(), file);
    }
}
