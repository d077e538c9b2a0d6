//! `verify`: parameter files and dispatch to the checks.

use anyhow::{bail, Context, Result};
use riesz_core::report::params;
use riesz_core::unfolded::{check_uf_in_hull, UnfoldedConfig};
use riesz_core::verify::{
    change_of_variables_check, core_sample_points, default_threshold_cases,
    default_transformed_cases, verify_cor34, verify_hessian_signs, verify_keylemma2,
    verify_lemma32, verify_lemma33, PlanarGrid, ThresholdCase, TransformedCase,
};
use riesz_core::{BodyF64, LemmaId, LemmaReport, ParamsF64, ReportF64, SpecF64};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use std::path::Path;

use crate::output::{float, rows_to_csv};

/// Accepts the numeric aliases used in the command line as well as report ids.
pub fn parse_lemma(s: &str) -> std::result::Result<LemmaId, String> {
    Ok(match s {
        "3.2" | "planar_segment" => LemmaId::PlanarSegment,
        "3.3" | "transformed_integral" => LemmaId::TransformedIntegral,
        "3.4" | "segment_threshold" => LemmaId::SegmentThreshold,
        "change_of_variables" => LemmaId::ChangeOfVariables,
        "3.5" | "section_curve" => LemmaId::SectionCurve,
        "main" | "hessian_signs" => LemmaId::HessianSigns,
        "unfolded_in_hull" => LemmaId::UnfoldedInHull,
        _ => {
            return Err(format!(
                "unknown lemma `{s}`; expected 3.2, 3.3, 3.4, 3.5, main, change_of_variables or unfolded_in_hull"
            ))
        }
    })
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct PlanarParams {
    alphas: Option<Vec<f64>>,
    a_values: Option<Vec<f64>>,
    xi_fractions: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformedIn {
    n: usize,
    alpha: f64,
    c: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdIn {
    n: usize,
    alpha: f64,
    xi0: f64,
    xi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChangeIn {
    n: usize,
    alpha: f64,
    a: f64,
    xi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound = "C: DeserializeOwned")]
struct Cases<C> {
    #[serde(default)]
    cases: Option<Vec<C>>,
}

impl<C> Default for Cases<C> {
    fn default() -> Self {
        Self { cases: None }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct SectionParams {
    body: Option<SpecF64>,
    m: Option<usize>,
    alphas: Option<Vec<f64>>,
    points: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct MainParams {
    body: Option<SpecF64>,
    alpha: Option<f64>,
    log: bool,
    points: Option<Vec<Vec<f64>>>,
    point_count: Option<usize>,
    sphere_res: Option<usize>,
    quad_tol: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct HullParams {
    core: Option<SpecF64>,
    delta: Option<f64>,
    dirs: Option<usize>,
    samples: Option<usize>,
}

fn read_params<P: DeserializeOwned + Default>(path: Option<&Path>) -> Result<P> {
    match path {
        None => Ok(P::default()),
        Some(p) => crate::read_json(p),
    }
}

fn stadium() -> SpecF64 {
    SpecF64::new(vec![vec![-0.5, 0.0], vec![0.5, 0.0]], 2.0)
}

pub fn run_lemma(id: LemmaId, path: Option<&Path>) -> Result<ReportF64> {
    Ok(match id {
        LemmaId::PlanarSegment => {
            let p: PlanarParams = read_params(path)?;
            let d = PlanarGrid::<f64>::default();
            verify_lemma32(&PlanarGrid {
                alphas: p.alphas.unwrap_or(d.alphas),
                a_values: p.a_values.unwrap_or(d.a_values),
                xi_fractions: p.xi_fractions.unwrap_or(d.xi_fractions),
            })?
        }
        LemmaId::TransformedIntegral => {
            let p: Cases<TransformedIn> = read_params(path)?;
            let cases = match p.cases {
                Some(c) => c
                    .into_iter()
                    .map(|c| TransformedCase { n: c.n, alpha: c.alpha, c: c.c })
                    .collect(),
                None => default_transformed_cases(),
            };
            verify_lemma33(&cases)?
        }
        LemmaId::SegmentThreshold => {
            let p: Cases<ThresholdIn> = read_params(path)?;
            let cases = match p.cases {
                Some(c) => c
                    .into_iter()
                    .map(|c| ThresholdCase { n: c.n, alpha: c.alpha, xi0: c.xi0, xi: c.xi })
                    .collect(),
                None => default_threshold_cases(),
            };
            verify_cor34(&cases)?
        }
        LemmaId::ChangeOfVariables => {
            let p: Cases<ChangeIn> = read_params(path)?;
            let cases = p.cases.unwrap_or_else(|| {
                [(3, 2.0, 2.0, 0.5), (3, 3.5, 4.0, 1.0), (4, 2.5, 3.0, 0.0), (5, 5.5, 6.0, 2.0)]
                    .map(|(n, alpha, a, xi)| ChangeIn { n, alpha, a, xi })
                    .into()
            });
            let mut all = Vec::new();
            for c in &cases {
                all.extend(change_of_variables_check(c.n, c.alpha, c.a, c.xi)?.cases);
            }
            LemmaReport::from_cases(LemmaId::ChangeOfVariables, params::<f64>(&[]), all)
        }
        LemmaId::SectionCurve => {
            let p: SectionParams = read_params(path)?;
            let spec = p.body.unwrap_or_else(stadium);
            let m = p.m.unwrap_or(2);
            let alphas = p.alphas.unwrap_or_else(|| vec![1.5, 2.0, 2.5]);
            let points = p.points.unwrap_or_else(|| {
                [-0.5, 0.0, 0.25, 0.5].iter().map(|&t| vec![t, 0.0]).collect()
            });
            let mut all = Vec::new();
            for &alpha in &alphas {
                for x in &points {
                    all.extend(verify_keylemma2(&spec, m, alpha, x)?.cases);
                }
            }
            LemmaReport::from_cases(LemmaId::SectionCurve, params(&[("m", m as f64)]), all)
        }
        LemmaId::HessianSigns => {
            let p: MainParams = read_params(path)?;
            let spec = p.body.unwrap_or_else(stadium);
            let mut kernel = match (p.log, p.alpha) {
                (true, None) => ParamsF64::log(),
                (true, Some(_)) => bail!("give either `alpha` or `log`, not both"),
                (false, a) => ParamsF64::riesz(a.unwrap_or(1.5)),
            };
            if let Some(r) = p.sphere_res {
                kernel = kernel.with_sphere_res(r);
            }
            if let Some(t) = p.quad_tol {
                kernel = kernel.with_quad_tol(t);
            }
            let points = p
                .points
                .unwrap_or_else(|| core_sample_points(&spec.core_vertices, p.point_count.unwrap_or(25)));
            let body = BodyF64::new(spec)?;
            verify_hessian_signs(&body, &kernel, &points)?
        }
        LemmaId::UnfoldedInHull => {
            let p: HullParams = read_params(path)?;
            let core = p.core.unwrap_or_else(|| {
                SpecF64::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.2, 0.7]], 0.0)
            });
            let cfg = UnfoldedConfig {
                samples: p.samples,
                ..UnfoldedConfig::default()
            };
            check_uf_in_hull(&core, p.delta.unwrap_or(1.0), p.dirs.unwrap_or(360), &cfg)
                .context("unfolded-region check")?
        }
    })
}

/// One CSV row per case: lemma id, the case parameters, value, error, verdict.
pub fn report_csv(report: &ReportF64) -> Result<String> {
    let id = report.lemma_id.as_str();
    let mut keys: Vec<&String> = report.cases.iter().flat_map(|c| c.params.keys()).collect();
    keys.sort();
    keys.dedup();
    let rows: Vec<Vec<(String, String)>> = report
        .cases
        .iter()
        .map(|c| {
            let mut r = vec![("lemma_id".to_string(), id.to_string())];
            for k in &keys {
                r.push(((*k).clone(), c.params.get(*k).map_or(String::new(), |v| float(*v))));
            }
            r.push(("value".into(), float(c.value)));
            r.push(("error".into(), float(c.error)));
            r.push(("verdict".into(), c.verdict.as_str().into()));
            r.push(("margin".into(), float(c.margin)));
            r.push(("in_hypothesis".into(), c.in_hypothesis.to_string()));
            r
        })
        .collect();
    rows_to_csv(&rows)
}
