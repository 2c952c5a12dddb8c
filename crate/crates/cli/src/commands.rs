//! Command implementations shared by the binary and the tests.

use std::fs;
use std::path::{Path, PathBuf};

use flatkahler::classifier::{
    automorphism_report, classify_orbits, normalizer_model, special_classes, ClassifyError, NormalizerModel, Settings,
};
use flatkahler::cohomology::{cohomology, torus_h1, CohomologyError, GModule};
use flatkahler::crystal::{first_fixed_element, fixed_point_group, CrystalGroup};
use flatkahler::groups::GroupError;
use flatkahler::Execution;
use thiserror::Error;

use crate::report::{self, ExpectationCheck, ReportDocument};
use crate::spec_file::{load_manifold_spec, Expected, SpecError, ValidatedSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 1;
pub const EXIT_BOUND: u8 = 2;
pub const EXIT_NOT_FREE: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Spec { path: PathBuf, source: SpecError },
    #[error("the `{0}` command needs a [cocycle] section")]
    MissingCocycle(&'static str),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } | CliError::Spec { .. } | CliError::MissingCocycle(_) => {
                EXIT_PARSE
            }
            CliError::Classify(e) => match e {
                ClassifyError::NotFree { .. } => EXIT_NOT_FREE,
                ClassifyError::ImageExceedsBound { .. }
                | ClassifyError::FreenessNotPreserved
                | ClassifyError::OrbitStabilizer { .. }
                | ClassifyError::Group(GroupError::ClosureExceedsBound { .. })
                | ClassifyError::Cohomology(
                    CohomologyError::BoundExceeded { .. } | CohomologyError::CrossCheckFailed { .. },
                ) => EXIT_BOUND,
                _ => EXIT_PARSE,
            },
        }
    }
}

impl From<CohomologyError> for CliError {
    fn from(e: CohomologyError) -> Self {
        CliError::Classify(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Aut,
    Cohomology,
    FreeCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Aut => "aut",
            Command::Cohomology => "cohomology",
            Command::FreeCheck => "free-check",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub bound: usize,
    pub orbit_details: bool,
    pub execution: Execution,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            bound: Settings::default().bound,
            orbit_details: false,
            execution: Execution::default(),
        }
    }
}

impl Options {
    fn settings(&self) -> Settings {
        Settings {
            bound: self.bound,
            execution: self.execution,
        }
    }
}

/// A finished run: the document and the process exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub document: ReportDocument,
    pub exit_code: u8,
}

pub fn run_file(command: Command, path: &Path, options: &Options) -> Result<Outcome, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8_lossy(&bytes);
    let spec = load_manifold_spec(&text).map_err(|source| CliError::Spec {
        path: path.to_path_buf(),
        source,
    })?;
    run(command, &bytes, &spec, options)
}

pub fn run(command: Command, input: &[u8], spec: &ValidatedSpec, options: &Options) -> Result<Outcome, CliError> {
    let mut doc = ReportDocument::new(command.name(), input, &spec.action);
    let mut exit_code = EXIT_OK;
    let expected = spec.file.expected.clone().unwrap_or_default();
    let settings = options.settings();
    let action = &spec.action;
    match command {
        Command::Cohomology => {
            let h1 = torus_h1(action, options.bound)?;
            let lattice = GModule::lattice(action.group(), action.matrices().to_vec())?;
            let h1l = cohomology(action.group(), &lattice, 1, options.bound)?;
            let h2l = cohomology(action.group(), &lattice, 2, options.bound)?;
            let fixed = fixed_point_group(action);
            compare(&mut doc, "fixed_point_order", expected.fixed_point_order.as_ref().map(|o| o.as_text()), || {
                report::fixed_points(&fixed).order
            });
            doc.cohomology = Some(report::CohomologySection {
                h1_torus: report::structure(h1.structure()),
                h1_lattice: report::structure(h1l.structure()),
                h2_lattice: report::structure(h2l.structure()),
                fixed_points: report::fixed_points(&fixed),
            });
        }
        Command::Classify => {
            let model = normalizer_model(action, &settings)?;
            let special = special_classes(action, &settings)?;
            let result = classify_orbits(action, &special, &model, &settings)?;
            compare_model(&mut doc, &expected, &model);
            compare(&mut doc, "special_class_count", expected.special_class_count.map(|v| v.to_string()), || {
                result.special_class_count.to_string()
            });
            compare(&mut doc, "m", expected.m.map(|v| v.to_string()), || result.m().to_string());
            compare(&mut doc, "fixed_point_order", expected.fixed_point_order.as_ref().map(|o| o.as_text()), || {
                report::fixed_points(&fixed_point_group(action)).order
            });
            doc.warnings.extend(result.warnings.iter().cloned());
            doc.classification = Some(report::classification(action, &result, &special, options.orbit_details));
            doc.normalizer = Some(report::normalizer(&model));
        }
        Command::Aut => {
            let cocycle = spec.cocycle.clone().ok_or(CliError::MissingCocycle("aut"))?;
            let model = normalizer_model(action, &settings)?;
            let crystal = CrystalGroup {
                action: action.clone(),
                cocycle: cocycle.clone(),
            };
            let r = automorphism_report(&crystal, &model, &settings)?;
            compare_model(&mut doc, &expected, &model);
            let section = report::automorphisms(action, &cocycle, &r);
            compare(&mut doc, "fixed_point_order", expected.fixed_point_order.as_ref().map(|o| o.as_text()), || {
                section.fixed_point_order.clone()
            });
            compare(&mut doc, "aut_order", expected.aut_order.as_ref().map(|o| o.as_text()), || {
                section.aut_order.clone()
            });
            doc.warnings.extend(r.warnings.iter().cloned());
            doc.automorphisms = Some(section);
            doc.normalizer = Some(report::normalizer(&model));
        }
        Command::FreeCheck => {
            let cocycle = spec.cocycle.as_ref().ok_or(CliError::MissingCocycle("free-check"))?;
            let fixed = first_fixed_element(action, cocycle.table());
            let element = fixed.map(|g| action.group().label(g));
            if element.is_some() {
                exit_code = EXIT_NOT_FREE;
            }
            doc.freeness = Some(report::FreenessSection {
                free: element.is_none(),
                element_with_fixed_point: element,
            });
        }
    }
    dedup(&mut doc.warnings);
    Ok(Outcome {
        document: doc,
        exit_code,
    })
}

fn compare_model(doc: &mut ReportDocument, expected: &Expected, model: &NormalizerModel) {
    compare(doc, "permutation_order", expected.permutation_order.map(|v| v.to_string()), || {
        model.permutation_order().to_string()
    });
    compare(doc, "normalizer_order", expected.normalizer_order.as_ref().map(|o| o.as_text()), || {
        report::order_text(model.order().as_ref())
    });
}

/// Records an `[expected]` comparison; a disagreement also becomes a warning.
fn compare(doc: &mut ReportDocument, field: &str, expected: Option<String>, computed: impl FnOnce() -> String) {
    let Some(expected) = expected else { return };
    let computed = computed();
    let agrees = expected == computed;
    if !agrees {
        doc.warnings.push(format!(
            "{field}: the spec expects {expected} but the computation gives {computed}"
        ));
    }
    doc.expectations.push(ExpectationCheck {
        field: field.to_string(),
        expected,
        computed,
        agrees,
    });
}

fn dedup(v: &mut Vec<String>) {
    let mut seen = std::collections::HashSet::new();
    v.retain(|w| seen.insert(w.clone()));
}
