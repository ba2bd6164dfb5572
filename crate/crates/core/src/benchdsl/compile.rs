use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BenchAst, Keyword, Side, Stage};
use crate::elements::{qplate_op, smf_filter, waveplate_op, Element, QPlateSpec, WaveplateKind};
use crate::experiment::{
    apply_bob, herald, interferometer_detect, joint_probabilities, qplate_on_bob, spdc_source, AnalyzerScheme,
    AnalyzerSettings, ExperimentError, HeraldOutcome, JointProbabilities,
};
use crate::qstate::{photon_basis, BipartiteState, PhotonState, Spin, SpinState};

/// Largest accepted `m_max` on a source stage.
const MAX_TRUNCATION: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("line {line}: {message}")]
pub struct SemanticError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

/// A compiled stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum PipelineStep {
    Source { m_max: u32 },
    Element { side: Side, element: Element, line: usize },
    Herald { basis: String, line: usize },
    Analyzer { scheme: AnalyzerScheme, line: usize },
}

/// A bench whose preparation has been run; analyzer settings remain free.
#[derive(Debug, Clone, PartialEq)]
pub struct Bench {
    steps: Vec<PipelineStep>,
    m_max: u32,
    hybrid: BipartiteState,
    heralded: HeraldOutcome,
    order: i32,
    scheme: AnalyzerScheme,
    warnings: Vec<Warning>,
}

impl Bench {
    pub fn steps(&self) -> &[PipelineStep] {
        &self.steps
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    /// Two-photon state just before the herald.
    pub fn hybrid(&self) -> &BipartiteState {
        &self.hybrid
    }

    /// Bob's photon after the herald and any Bob-side optics that follow it.
    pub fn heralded(&self) -> &HeraldOutcome {
        &self.heralded
    }

    /// OAM mode of the analyzer's `|R⟩`-paired branch.
    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn scheme(&self) -> AnalyzerScheme {
        self.scheme
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn settings(&self, chi_a: f64, chi_b: f64) -> AnalyzerSettings {
        AnalyzerSettings::with_order(chi_a, chi_b, self.order).expect("order checked nonzero")
    }

    pub fn probabilities(&self, chi_a: f64, chi_b: f64) -> Result<JointProbabilities, ExperimentError> {
        self.probabilities_with(chi_a, chi_b, self.scheme)
    }

    pub fn probabilities_with(
        &self,
        chi_a: f64,
        chi_b: f64,
        scheme: AnalyzerScheme,
    ) -> Result<JointProbabilities, ExperimentError> {
        let s = self.settings(chi_a, chi_b);
        match scheme {
            AnalyzerScheme::Projector => joint_probabilities(&self.heralded.state, &s),
            AnalyzerScheme::Interferometer => interferometer_detect(&self.heralded.state, s.alpha(), s.beta()),
        }
    }
}

fn fail(line: usize, message: impl Into<String>) -> SemanticError {
    SemanticError {
        line,
        message: message.into(),
    }
}

fn at<E: std::fmt::Display>(line: usize) -> impl Fn(E) -> SemanticError {
    move |e| fail(line, e.to_string())
}

fn herald_basis(name: &str) -> Option<SpinState> {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Some(match name {
        "H" => SpinState::h(),
        "V" => SpinState::v(),
        "L" => SpinState::spin(Spin::L),
        "R" => SpinState::spin(Spin::R),
        "D" => SpinState::h().scaled(s).add(&SpinState::v().scaled(s)).ok()?,
        "A" => SpinState::h().scaled(s).add(&SpinState::v().scaled(-s)).ok()?,
        _ => return None,
    })
}

fn plate(stage: &Stage) -> Result<QPlateSpec, SemanticError> {
    let q = stage.number("q").expect("required by the parser");
    QPlateSpec::new(q, stage.number("alpha0").unwrap_or(0.0)).map_err(at(stage.line))
}

/// Truncation large enough for every plate acting in sequence or alone.
fn default_m_max(ast: &BenchAst) -> Result<u32, SemanticError> {
    let mut widest = 0u32;
    let mut total = 0u32;
    for st in ast.stages.iter().filter(|s| s.keyword == Keyword::QPlate) {
        let shift = plate(st)?.two_q().unsigned_abs();
        widest = widest.max(shift);
        total = total.saturating_add(shift);
    }
    Ok((2 * widest).max(total))
}

fn source_m_max(stage: &Stage, ast: &BenchAst) -> Result<u32, SemanticError> {
    match stage.number("m_max") {
        None => default_m_max(ast),
        Some(m) if m >= 0.0 && m.fract() == 0.0 && m <= f64::from(MAX_TRUNCATION) => Ok(m as u32),
        Some(m) => Err(fail(
            stage.line,
            format!("m_max must be an integer in 0..={MAX_TRUNCATION}, got {m}"),
        )),
    }
}

enum Photons {
    Pair(BipartiteState),
    Bob(PhotonState),
}

/// Analyzer mode `k` if Bob's photon lives on `{−|k|, +|k|}` with `|k| > 0`;
/// the sign of `k` is the mode that carries `|R⟩`.
fn analyzer_order(bob: &PhotonState) -> Option<i32> {
    let support: Vec<(Spin, i32, f64)> = bob
        .support()
        .map(|((s, m), a)| (s, m, a.norm_sqr()))
        .filter(|(_, _, w)| *w > 1e-12)
        .collect();
    let k = support.iter().map(|(_, m, _)| m.abs()).max()?;
    if k == 0 || support.iter().any(|(_, m, _)| m.abs() != k) {
        return None;
    }
    let aligned: f64 = support
        .iter()
        .filter(|(s, m, _)| (*s == Spin::R) == (*m == k))
        .map(|(_, _, w)| w)
        .sum();
    Some(if aligned * 2.0 >= 1.0 { k } else { -k })
}

/// Runs the preparation described by `ast` and fixes the analyzer.
///
/// A herald stage is required. Alice-side optics must precede it, and an
/// analyzer stage, if present, must be last.
pub fn compile(ast: &BenchAst) -> Result<Bench, SemanticError> {
    let (source, rest) = ast
        .stages
        .split_first()
        .filter(|(s, _)| s.keyword == Keyword::Source)
        .ok_or_else(|| fail(1, "bench must start with a source stage"))?;
    if source.side != Side::Both {
        return Err(fail(source.line, "the source emits to both sides; use side=both"));
    }
    let m_max = source_m_max(source, ast)?;

    let mut steps = vec![PipelineStep::Source { m_max }];
    let mut warnings = Vec::new();
    let mut photons = Photons::Pair(spdc_source(m_max));
    let mut hybrid = None;
    let mut heralded = None;
    let mut scheme = None;
    let mut filtered = false;
    let mut plated = false;

    for (i, st) in rest.iter().enumerate() {
        let line = st.line;
        if scheme.is_some() {
            return Err(fail(line, "no stage may follow the analyzer"));
        }
        match st.keyword {
            Keyword::Source => return Err(fail(line, "second source stage")),
            Keyword::Herald => {
                if st.side != Side::Alice {
                    return Err(fail(line, "the herald detects Alice's photon; use side=alice"));
                }
                let name = st.ident("basis").unwrap_or("H");
                let basis = herald_basis(name)
                    .ok_or_else(|| fail(line, format!("unknown herald basis {name:?} (H|V|L|R|D|A)")))?;
                let Photons::Pair(pair) = &photons else {
                    return Err(fail(line, "second herald stage"));
                };
                let out = herald(pair, &basis).map_err(at(line))?;
                hybrid = Some(pair.clone());
                photons = Photons::Bob(out.state.clone());
                heralded = Some((out, line));
                steps.push(PipelineStep::Herald {
                    basis: name.to_string(),
                    line,
                });
            }
            Keyword::Analyzer => {
                if st.side != Side::Bob {
                    return Err(fail(line, "the analyzer measures Bob's photon; use side=bob"));
                }
                if i + 1 != rest.len() {
                    return Err(fail(line, "the analyzer must be the last stage"));
                }
                let s = match st.ident("scheme").unwrap_or("projector") {
                    "projector" => AnalyzerScheme::Projector,
                    "interferometer" => AnalyzerScheme::Interferometer,
                    other => {
                        return Err(fail(
                            line,
                            format!("unknown analyzer scheme {other:?} (projector|interferometer)"),
                        ))
                    }
                };
                scheme = Some(s);
                steps.push(PipelineStep::Analyzer { scheme: s, line });
            }
            Keyword::Filter | Keyword::QPlate | Keyword::Qwp | Keyword::Hwp => {
                let element = match st.keyword {
                    Keyword::Filter => Element::SmfFilter,
                    Keyword::QPlate => Element::QPlate(plate(st)?),
                    Keyword::Qwp => Element::qwp(st.number("angle").expect("required")).map_err(at(line))?,
                    _ => Element::hwp(st.number("angle").expect("required")).map_err(at(line))?,
                };
                photons = apply_element(photons, &element, st.side, m_max, line, &mut warnings)?;
                match element {
                    Element::SmfFilter => filtered = true,
                    Element::QPlate(_) if !filtered && !plated => {
                        warnings.push(Warning {
                            line,
                            message:
                                "no single-mode filter before the first q-plate; the source is taken to carry no OAM"
                                    .into(),
                        });
                        plated = true;
                    }
                    Element::QPlate(_) => plated = true,
                    _ => {}
                }
                steps.push(PipelineStep::Element {
                    side: st.side,
                    element,
                    line,
                });
            }
        }
    }

    let (mut heralded, herald_line) = heralded.ok_or_else(|| {
        fail(
            source.line,
            "bench has no herald stage; Bob's photon alone is not in a pure state",
        )
    })?;
    if let Photons::Bob(state) = photons {
        heralded.state = state;
    }
    let order = analyzer_order(&heralded.state).ok_or_else(|| {
        fail(
            herald_line,
            "the analyzer needs Bob's photon in two opposite nonzero OAM modes",
        )
    })?;
    Ok(Bench {
        steps,
        m_max,
        hybrid: hybrid.expect("set with heralded"),
        heralded,
        order,
        scheme: scheme.unwrap_or_default(),
        warnings,
    })
}

fn apply_element(
    photons: Photons,
    element: &Element,
    side: Side,
    m_max: u32,
    line: usize,
    warnings: &mut Vec<Warning>,
) -> Result<Photons, SemanticError> {
    let is_waveplate = matches!(element, Element::Qwp { .. } | Element::Hwp { .. });
    if side != Side::Bob && !is_waveplate {
        return Err(fail(
            line,
            format!(
                "{} acts on OAM, which only Bob's photon carries; use side=bob",
                element.name()
            ),
        ));
    }
    let alice = matches!(side, Side::Alice | Side::Both);
    let bob = matches!(side, Side::Bob | Side::Both);
    match photons {
        Photons::Pair(mut pair) => {
            if alice {
                let (kind, angle) = match *element {
                    Element::Qwp { angle } => (WaveplateKind::Quarter, angle),
                    Element::Hwp { angle } => (WaveplateKind::Half, angle),
                    _ => unreachable!("only wave plates reach Alice"),
                };
                pair = waveplate_op(kind, angle)
                    .on_first(&photon_basis(m_max))
                    .apply(&pair)
                    .map_err(at(line))?;
            }
            if bob {
                pair = match element {
                    Element::QPlate(spec) => qplate_on_bob(&pair, spec).map_err(at(line))?,
                    Element::SmfFilter => {
                        let kept = apply_bob(&pair, &element.photon_op(m_max).map_err(at(line))?).map_err(at(line))?;
                        renormalize(kept, line, warnings)?
                    }
                    _ => apply_bob(&pair, &element.photon_op(m_max).map_err(at(line))?).map_err(at(line))?,
                };
            }
            Ok(Photons::Pair(pair))
        }
        Photons::Bob(state) => {
            if alice {
                return Err(fail(
                    line,
                    "Alice-side optics after the herald have no effect; move them before it",
                ));
            }
            let out = match element {
                Element::QPlate(spec) => qplate_op(spec, m_max).apply(&state).map_err(at(line))?,
                Element::SmfFilter => {
                    let (out, w) = smf_filter(&state).map_err(at(line))?;
                    if w < 1e-24 {
                        return Err(fail(line, "the single-mode filter blocks Bob's photon entirely"));
                    }
                    warn_loss(w, line, warnings);
                    out
                }
                _ => element
                    .photon_op(m_max)
                    .map_err(at(line))?
                    .apply(&state)
                    .map_err(at(line))?,
            };
            Ok(Photons::Bob(out))
        }
    }
}

fn warn_loss(kept: f64, line: usize, warnings: &mut Vec<Warning>) {
    if kept < 1.0 - 1e-12 {
        warnings.push(Warning {
            line,
            message: format!("filter transmits {kept:.6}; the state is renormalized"),
        });
    }
}

fn renormalize(
    state: BipartiteState,
    line: usize,
    warnings: &mut Vec<Warning>,
) -> Result<BipartiteState, SemanticError> {
    let w = state.norm_sqr();
    if w < 1e-24 {
        return Err(fail(line, "the single-mode filter blocks Bob's photon entirely"));
    }
    warn_loss(w, line, warnings);
    state.normalized().map_err(at(line))
}
