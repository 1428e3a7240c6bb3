use serde_json::{json, Value};
use strata_core::appendix::{self, RawDeformation};
use strata_core::bundles;
use strata_core::darboux::{self, DEJet, RawProblem};
use strata_core::gap::{self, MatrixFamily, Path, ProbeConfig, Subspace};
use strata_core::gauge::{self, RawConnection, RawFrame, RawGaugeSeries, SimplifyMode};
use strata_core::linalg;
use strata_core::partitions::{self, Partition, SegreSymbol};
use strata_core::scalar::{QComplex, RawComplex, Scalar, C64};
use strata_core::series::{RawSeriesMatrix, SeriesMatrix};

use crate::io::{invalid, parse_literal, read_json, CliResult, Output};
use crate::{AppendixCmd, BundlesCmd, DeCmd, Format, GapCmd, GaugeCmd, Global, Mode, PartitionsCmd, SimplifyModeArg};

/// Tolerance for matrix classification and kernels when none is given.
const MATRIX_TOL: f64 = 1e-8;

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize")
}

/// Whether to run in exact arithmetic given what the input supports.
fn use_exact(g: &Global, input_exact: bool) -> bool {
    match g.mode {
        Mode::Auto => input_exact,
        Mode::Exact => true,
        Mode::Float => false,
    }
}

fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| invalid(format!("input needs \"{key}\"")))
}

fn raw_matrix(v: &Value) -> CliResult<Vec<Vec<RawComplex>>> {
    let rows = v.as_array().ok_or_else(|| invalid("matrix must be a list of rows"))?;
    let n = rows.len();
    let mut out = Vec::with_capacity(n);
    for r in rows {
        let r = r
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| invalid(format!("matrix rows must have {n} entries")))?;
        out.push(r.iter().map(RawComplex::parse).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(out)
}

fn scalar_matrix<T: Scalar>(m: &[Vec<RawComplex>]) -> CliResult<Vec<Vec<T>>> {
    Ok(m.iter()
        .map(|r| r.iter().map(|c| c.to_scalar()).collect::<Result<Vec<T>, _>>())
        .collect::<Result<Vec<_>, _>>()?)
}

fn c64_list(v: &Value) -> CliResult<Vec<C64>> {
    Ok(v.as_array()
        .ok_or_else(|| invalid("expected a list of complex numbers"))?
        .iter()
        .map(|c| RawComplex::parse(c).map(|z| z.to_c64()))
        .collect::<Result<Vec<_>, _>>()?)
}

fn symbol(text: &str) -> CliResult<SegreSymbol> {
    let lists: Vec<Vec<u32>> =
        serde_json::from_value(parse_literal(text)?).map_err(|e| invalid(format!("symbol {text}: {e}")))?;
    Ok(SegreSymbol::from_lists(&lists)?)
}

fn symbol_json(s: &SegreSymbol) -> Value {
    json!({"symbol": s.to_lists(), "letters": bundles::letter_string(s)})
}

pub fn partitions(cmd: PartitionsCmd, g: &Global) -> CliResult<Output> {
    match cmd {
        PartitionsCmd::List { n, r } => {
            let lists: Vec<Value> = match r {
                1 => partitions::enumerate_partitions(n).iter().map(|p| json!(p.parts())).collect(),
                2 => partitions::enumerate_double_partitions(n)?.iter().map(|s| json!(s.to_lists())).collect(),
                _ => return Err(invalid("list supports r = 1 and r = 2")),
            };
            Ok(Output::Json(json!({"r": r, "n": n, "count": lists.len(), "items": lists})))
        }
        PartitionsCmd::Count { r, n } => {
            let count = partitions::count_fold_partitions(r, n)?.to_string();
            Ok(match g.format {
                Some(Format::Json) => Output::Json(json!({"r": r, "n": n, "count": count})),
                _ => Output::Text(count),
            })
        }
        PartitionsCmd::Conjugate { symbol: text } => {
            let v = parse_literal(&text)?;
            if v.as_array().is_some_and(|a| a.iter().all(Value::is_array)) {
                let s = symbol(&text)?;
                let c = partitions::conjugate_symbol(&s);
                Ok(Output::Json(json!({"input": s.to_lists(), "conjugate": c.to_lists()})))
            } else {
                let parts: Vec<u32> = serde_json::from_value(v).map_err(|e| invalid(format!("partition: {e}")))?;
                let p = Partition::new(parts)?;
                Ok(Output::Json(json!({"input": p.parts(), "conjugate": p.conjugate().parts()})))
            }
        }
    }
}

pub fn bundles(cmd: BundlesCmd, g: &Global) -> CliResult<Output> {
    match cmd {
        BundlesCmd::Describe { symbol: text } => {
            let s = symbol(&text)?;
            let mut v = to_json(&bundles::describe(&s));
            v["letters"] = json!(bundles::letter_string(&s));
            Ok(Output::Json(v))
        }
        BundlesCmd::Moves { symbol: text } => {
            let m = bundles::elementary_moves(&symbol(&text)?);
            Ok(Output::Json(json!({
                "type_one": m.type_one.iter().map(symbol_json).collect::<Vec<_>>(),
                "type_two": m.type_two.iter().map(symbol_json).collect::<Vec<_>>(),
            })))
        }
        BundlesCmd::Closure { a, b } => {
            let (a, b) = (symbol(&a)?, symbol(&b)?);
            Ok(Output::Json(json!({"a": a.to_lists(), "b": b.to_lists(), "in_closure": bundles::closure_leq(&a, &b)?})))
        }
        BundlesCmd::Hasse { n, reduced } => {
            let mut h = bundles::hasse_diagram(n)?;
            if reduced {
                h = h.transitive_reduction();
            }
            Ok(match g.format {
                Some(Format::Dot) => Output::Text(h.to_dot()),
                _ => Output::Json(json!({
                    "n": h.n,
                    "vertices": h.vertices.iter().map(|s| {
                        let mut v = symbol_json(s);
                        v["dim"] = json!(bundles::dimension(s));
                        v
                    }).collect::<Vec<_>>(),
                    "edges": h.edges.iter().map(|(lo, hi)| json!([lo.to_lists(), hi.to_lists()])).collect::<Vec<_>>(),
                })),
            })
        }
        BundlesCmd::Classify { input } => {
            let v = read_json(&input)?;
            let m = raw_matrix(v.get("matrix").unwrap_or(&v))?;
            let a = linalg::to_dmatrix(&scalar_matrix::<C64>(&m)?);
            let c = bundles::classify_matrix(&a, g.tol.unwrap_or(MATRIX_TOL))?;
            let mut out = to_json(&c);
            out["letters"] = json!(bundles::letter_string(&c.symbol));
            Ok(Output::Json(out))
        }
    }
}

pub fn gap(cmd: GapCmd, g: &Global) -> CliResult<Output> {
    match cmd {
        GapCmd::Distance { input } => {
            let v = read_json(&input)?;
            let a = Subspace::from_json(field(&v, "a")?)?;
            let b = Subspace::from_json(field(&v, "b")?)?;
            Ok(Output::Json(json!({"distance": gap::gap_distance(&a, &b)?})))
        }
        GapCmd::Kernel { input } => {
            let v = read_json(&input)?;
            if let Some(fam) = v.get("family") {
                let family = MatrixFamily::from_json(fam)?;
                let x0 = RawComplex::parse(field(&v, "x0")?)?.to_exact()?;
                let s = gap::kernel_sheaf_value_1d(&family, &x0)?;
                Ok(Output::Json(json!({"kernel_sheaf_value": s.to_json()})))
            } else {
                let m = raw_matrix(field(&v, "matrix")?)?;
                let a = linalg::to_dmatrix(&scalar_matrix::<C64>(&m)?);
                let s = gap::kernel_subspace(&a, g.tol.unwrap_or(MATRIX_TOL));
                Ok(Output::Json(json!({"kernel": s.to_json()})))
            }
        }
        GapCmd::Report { input, limit_tol } => {
            let v = read_json(&input)?;
            let family = MatrixFamily::from_json(field(&v, "family")?)?;
            let x0 = c64_list(field(&v, "x0")?)?;
            let mut config = ProbeConfig::default();
            if let Some(paths) = v.get("paths").and_then(Value::as_array) {
                config.paths = Some(paths.iter().map(Path::from_json).collect::<Result<Vec<_>, _>>()?);
            }
            if let Some(t) = g.tol {
                config.tol = t;
            }
            if let Some(t) = limit_tol {
                config.limit_tol = t;
            }
            let r = gap::jordanizability_report(&family, &x0, &config)?;
            Ok(Output::Json(r.to_json()))
        }
    }
}

fn de_run<T: Scalar>(cmd: &DeCmd, raw: &RawProblem, v: &Value, tol: f64) -> CliResult<Value> {
    let (p, f0) = darboux::problem_from_json::<T>(raw, tol)?;
    Ok(match cmd {
        DeCmd::Residual { order, .. } => {
            let f = RawSeriesMatrix::parse(field(v, "jet")?)?.to_matrix::<T>()?;
            let r = darboux::de_residual(&p, &DEJet { f }, *order)?;
            darboux::residual_to_json(&r)
        }
        DeCmd::Solve { order, .. } => {
            let s = darboux::de_solve_jet(&p, &f0, *order)?;
            json!({
                "jet": darboux::jet_to_json(&s.jet),
                "feasible": s.feasible,
                "residual": darboux::residual_to_json(&s.residual),
                "warnings": s.warnings,
            })
        }
        DeCmd::Oracle { order, .. } => {
            let jet = darboux::de_oracle_solve(&p, &f0, *order)?;
            json!({"jet": darboux::jet_to_json(&jet)})
        }
    })
}

pub fn de(cmd: DeCmd, g: &Global) -> CliResult<Output> {
    let input = match &cmd {
        DeCmd::Residual { input, .. } | DeCmd::Solve { input, .. } | DeCmd::Oracle { input, .. } => input,
    };
    let v = read_json(input)?;
    let raw = RawProblem::parse(&v)?;
    let jet_exact = v.get("jet").map_or(Ok(true), |j| RawSeriesMatrix::parse(j).map(|m| m.is_exact()))?;
    let tol = g.tol.unwrap_or(darboux::DEFAULT_TOL);
    let out = if use_exact(g, raw.is_exact() && jet_exact) {
        de_run::<QComplex>(&cmd, &raw, &v, tol)?
    } else {
        de_run::<C64>(&cmd, &raw, &v, tol)?
    };
    Ok(Output::Json(out))
}

fn gauge_run<T: Scalar>(cmd: &GaugeCmd, v: &Value, tol: f64) -> CliResult<Value> {
    if let GaugeCmd::Witness { .. } = cmd {
        let frame = RawFrame::parse(v)?;
        let f = frame.to_frame::<T>()?;
        let delta0 = SeriesMatrix::diagonal(f.delta0.clone());
        let integ = gauge::integrability_residual(&delta0, &f.b, &f.varpi, frame.order(), tol)?;
        let w = gauge::dv_witness(&f.delta0, &f.b, &f.varpi, tol)?;
        return Ok(json!({
            "integrability": gauge::integrability_to_json(&integ),
            "witness": gauge::witness_to_json(&w),
        }));
    }
    let conn = RawConnection::parse(v)?.to_connection::<T>(tol)?;
    Ok(match cmd {
        GaugeCmd::Build { .. } => conn.to_json(),
        GaugeCmd::Simplify { order, recursion, .. } => {
            let mode = match recursion {
                SimplifyModeArg::Regular => SimplifyMode::Regular,
                SimplifyModeArg::Coalescent => SimplifyMode::Coalescent,
            };
            gauge::formal_simplify(&conn, *order, mode)?.to_json()
        }
        GaugeCmd::Residual { .. } => {
            let phi = RawGaugeSeries::parse(field(v, "Phi")?)?.to_series::<T>()?;
            gauge::gauge_residual_to_json(&gauge::gauge_residual(&conn, &phi)?)
        }
        GaugeCmd::Holcon { .. } => {
            let pair = field(v, "pair")?
                .as_array()
                .filter(|a| a.len() == 2)
                .and_then(|a| Some((a[0].as_u64()? as usize, a[1].as_u64()? as usize)))
                .ok_or_else(|| invalid("pair must be [i, j]"))?;
            let path = Path::from_json(field(v, "path")?)?;
            let samples = match v.get("samples") {
                Some(s) => {
                    serde_json::from_value::<Vec<f64>>(s.clone()).map_err(|e| invalid(format!("samples: {e}")))?
                }
                None => gap::dyadic_samples(1, 12),
            };
            gauge::holcon_to_json(&gauge::holcon_check(&conn, pair.0, pair.1, &path, &samples)?)
        }
        GaugeCmd::Witness { .. } => unreachable!("handled above"),
    })
}

pub fn gauge(cmd: GaugeCmd, g: &Global) -> CliResult<Output> {
    let input = match &cmd {
        GaugeCmd::Build { input }
        | GaugeCmd::Residual { input }
        | GaugeCmd::Simplify { input, .. }
        | GaugeCmd::Witness { input }
        | GaugeCmd::Holcon { input } => input,
    };
    let v = read_json(input)?;
    let exact = match &cmd {
        GaugeCmd::Witness { .. } => RawFrame::parse(&v)?.is_exact(),
        GaugeCmd::Residual { .. } => {
            RawConnection::parse(&v)?.is_exact() && RawGaugeSeries::parse(field(&v, "Phi")?)?.is_exact()
        }
        _ => RawConnection::parse(&v)?.is_exact(),
    };
    let tol = g.tol.unwrap_or(gauge::DEFAULT_TOL);
    let out =
        if use_exact(g, exact) { gauge_run::<QComplex>(&cmd, &v, tol)? } else { gauge_run::<C64>(&cmd, &v, tol)? };
    Ok(Output::Json(out))
}

fn pfaffian_run<T: Scalar>(v: &Value, order: u32, tol: f64) -> CliResult<Value> {
    let a0 = scalar_matrix::<T>(&raw_matrix(field(v, "A0")?)?)?;
    let b0 = scalar_matrix::<T>(&raw_matrix(field(v, "B0")?)?)?;
    let k = RawSeriesMatrix::parse(field(v, "K")?)?.to_matrix::<T>()?;
    let r = appendix::malgrange_pfaffian_residual(&a0, &b0, &k, order, tol)?;
    Ok(appendix::pfaffian_to_json(&r))
}

fn classify_run<T: Scalar>(raw: &RawDeformation, tol: f64) -> CliResult<Value> {
    let dep = raw.to_deformation::<T>()?;
    Ok(appendix::classification_to_json(&appendix::classify_2x2(&dep, tol)?))
}

pub fn appendix(cmd: AppendixCmd, g: &Global) -> CliResult<Output> {
    let tol = g.tol.unwrap_or(appendix::KAPPA_TOL);
    let out = match cmd {
        AppendixCmd::Pfaffian { input, order } => {
            let v = read_json(&input)?;
            let exact = raw_matrix(field(&v, "A0")?)?.iter().flatten().all(RawComplex::is_exact)
                && raw_matrix(field(&v, "B0")?)?.iter().flatten().all(RawComplex::is_exact)
                && RawSeriesMatrix::parse(field(&v, "K")?)?.is_exact();
            if use_exact(g, exact) {
                pfaffian_run::<QComplex>(&v, order, tol)?
            } else {
                pfaffian_run::<C64>(&v, order, tol)?
            }
        }
        AppendixCmd::Curve { alpha0, beta0, gamma0, c, t_max, steps } => {
            if steps == 0 {
                return Err(invalid("steps must be positive"));
            }
            let grid: Vec<f64> = (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect();
            let initial = [alpha0, beta0, gamma0].map(|x| C64::new(x, 0.0));
            appendix::curve_to_json(&appendix::nonversal_curve(initial, C64::new(c, 0.0), &grid))
        }
        AppendixCmd::Families { p, q } => {
            let fams = appendix::rational_c_families(p, q)?;
            json!({"p": p, "q": q, "families": fams.iter().map(|f| f.to_json()).collect::<Vec<_>>()})
        }
        AppendixCmd::Classify2x2 { input } => {
            let raw = RawDeformation::parse(&read_json(&input)?)?;
            if use_exact(g, raw.is_exact()) {
                classify_run::<QComplex>(&raw, tol)?
            } else {
                classify_run::<C64>(&raw, tol)?
            }
        }
    };
    Ok(Output::Json(out))
}
