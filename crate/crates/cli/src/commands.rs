use std::fmt::Write as _;
use std::sync::Arc;

use preproj::algebra::{hilbert_matrix, FrobeniusStructure, PreprojectiveAlgebra};
use preproj::hochschild::{ChainComplexPair, Kind};
use preproj::quiver::{coxeter, DoubleQuiver, QuiverType};
use preproj::structure::{DualityMap, LabelAssignment};
use preproj::tables::{parse_element, parse_symbol, Tables, TypeMetadata, Variant};
use preproj::verify::{verify_all, Fault, VerifyOptions};
use preproj::Error;
use serde_json::json;

use crate::config::{Config, Format, MetaSource};

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit code 2.
    Usage(String),
    /// The computation could not be completed; exit code 1.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidType(_)
            | Error::UnsupportedRank { .. }
            | Error::TruncationTooShallow { .. }
            | Error::UnknownSymbol(_)
            | Error::IndexOutOfRange(_)
            | Error::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

pub type CmdResult = Result<Output, CliError>;

/// Rendered output plus the verdict for the exit code.
pub struct Output {
    pub text: String,
    pub json: serde_json::Value,
    pub ok: bool,
}

impl Output {
    fn new(text: String, json: serde_json::Value) -> Self {
        Self { text, json, ok: true }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json") + "\n",
        }
    }
}

fn quiver(ty: QuiverType) -> Result<DoubleQuiver, CliError> {
    ty.ensure_supported()?;
    Ok(DoubleQuiver::build(ty, None)?)
}

fn build_pair(ty: QuiverType, max_degree: usize) -> Result<ChainComplexPair, CliError> {
    let alg = Arc::new(PreprojectiveAlgebra::build(&quiver(ty)?)?);
    Ok(ChainComplexPair::build(alg, max_degree)?)
}

fn matrix_rows(m: &[Vec<i64>]) -> String {
    m.iter().map(|r| r.iter().map(|x| format!("{x:>2}")).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("\n    ")
}

pub fn quiver_info(cfg: &Config) -> CmdResult {
    let ty = cfg.require_type().map_err(CliError::Usage)?;
    let q = quiver(ty)?;
    let cox = coxeter(ty);
    let mut text = String::new();
    writeln!(text, "type {ty}: {} vertices, {} arrows in the double quiver", q.vertex_count(), q.arrows.len()).unwrap();
    writeln!(text, "h = {}", cox.h).unwrap();
    writeln!(text, "exponents = {:?}", cox.exponents).unwrap();
    writeln!(text, "nu = {:?}", cox.nu).unwrap();
    writeln!(text, "r+ = {}, r- = {}", cox.r_plus, cox.r_minus).unwrap();
    writeln!(text, "P =\n    {}", matrix_rows(&cox.p)).unwrap();
    writeln!(text, "C =\n    {}", matrix_rows(&cox.adjacency)).unwrap();
    let json = json!({ "type": ty.to_string(), "coxeter": cox });
    Ok(Output::new(text, json))
}

pub fn algebra(cfg: &Config) -> CmdResult {
    let ty = cfg.require_type().map_err(CliError::Usage)?;
    let q = quiver(ty)?;
    let alg = PreprojectiveAlgebra::build(&q)?;
    let hilbert = hilbert_matrix(&q);
    let r = alg.vertex_count();
    for d in 0..=hilbert.degree().max(alg.top_degree() + 1) {
        for i in 0..r {
            for j in 0..r {
                let found = alg.piece(d, i, j).len();
                let expected = hilbert.coefficient(d, i, j) as usize;
                if found != expected {
                    return Err(Error::HilbertMismatch { degree: d, i, j, expected, found }.into());
                }
            }
        }
    }
    let frob = FrobeniusStructure::new(&alg)?;
    let mut text = String::new();
    writeln!(text, "type {ty}: dim A = {}, h = {}, top degree {}", alg.dim(), alg.h(), alg.top_degree()).unwrap();
    for d in 0..=alg.top_degree() {
        let m: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| alg.piece(d, i, j).len() as i64).collect()).collect();
        writeln!(text, "degree {d} (dim {}): dim e_i A e_j =\n    {}", alg.degree_range(d).len(), matrix_rows(&m)).unwrap();
    }
    writeln!(text, "Hilbert series matches (1 + P t^h)(1 - C t + t^2)^-1").unwrap();
    writeln!(text, "Nakayama: {}", (0..r).map(|i| format!("e{i} -> e{}", alg.nu()[i])).collect::<Vec<_>>().join(", ")).unwrap();
    let json = serde_json::to_value(alg.to_document(&frob)).expect("json");
    Ok(Output::new(text, json))
}

pub fn hh(cfg: &Config) -> CmdResult {
    let ty = cfg.require_type().map_err(CliError::Usage)?;
    let pair = build_pair(ty, cfg.max_degree)?;
    let mut text = String::new();
    let mut json = json!({ "type": ty.to_string(), "max_degree": cfg.max_degree, "h": pair.h() });
    for (kind, key, label) in [(Kind::Cohomology, "cohomology", "HH^"), (Kind::Homology, "homology", "HH_")] {
        writeln!(text, "{} (internal degree: dimension)", if kind == Kind::Cohomology { "cohomology" } else { "homology" }).unwrap();
        let mut rows = Vec::new();
        for n in 0..cfg.max_degree {
            let dims: Vec<(i64, usize)> = pair.hh_dims(kind, n)?.into_iter().filter(|x| x.1 > 0).collect();
            let total: usize = dims.iter().map(|x| x.1).sum();
            let cells: Vec<String> = dims.iter().map(|(d, k)| format!("{d}:{k}")).collect();
            writeln!(text, "  {label}{n:<2} dim {total:<3} {}", cells.join(" ")).unwrap();
            rows.push(json!({ "n": n, "dim": total, "dims": dims.iter().map(|(d, k)| json!([d, k])).collect::<Vec<_>>() }));
        }
        json[key] = serde_json::Value::Array(rows);
    }
    Ok(Output::new(text, json))
}

fn metadata(cfg: &Config) -> Result<TypeMetadata, CliError> {
    match cfg.meta {
        MetaSource::Synthetic => {
            let h = match (cfg.coxeter, cfg.quiver_type) {
                (Some(h), _) => h,
                (None, Some(ty)) => coxeter(ty).h as i64,
                (None, None) => return Err(CliError::Usage("eval needs --coxeter or --type".into())),
            };
            Ok(TypeMetadata::synthetic(h, cfg.index_bound))
        }
        MetaSource::Engine => {
            let ty = cfg.require_type().map_err(CliError::Usage)?;
            let pair = build_pair(ty, cfg.max_degree)?;
            let dm = DualityMap::build(&pair, cfg.period)?;
            Ok(LabelAssignment::assign(&pair, &dm)?.metadata()?)
        }
    }
}

pub fn eval(cfg: &Config, op: &str, a: &str, b: Option<&str>) -> CmdResult {
    let meta = metadata(cfg)?;
    let tables = Tables { meta: &meta, reading: cfg.reading };
    let need_b = || b.ok_or_else(|| CliError::Usage(format!("{op} takes two arguments")));
    let result = match op {
        "connes" => {
            if b.is_some() {
                return Err(CliError::Usage("connes takes one argument".into()));
            }
            tables.connes(&parse_element(a, Variant::Cycle)?)?
        }
        "iota" | "contract" => tables.iota(&parse_symbol(a, Variant::Cocycle)?, &parse_symbol(need_b()?, Variant::Cycle)?)?,
        "lie" => tables.lie(&parse_symbol(a, Variant::Cocycle)?, &parse_symbol(need_b()?, Variant::Cycle)?)?,
        "bracket" => tables.bracket(&parse_symbol(a, Variant::Cocycle)?, &parse_symbol(need_b()?, Variant::Cocycle)?)?,
        _ => return Err(CliError::Usage(format!("unknown operation `{op}`; expected iota, bracket, lie or connes"))),
    };
    let text = format!("{result}\n");
    let json = json!({ "operation": op, "a": a, "b": b, "h": meta.h, "result": result.to_string() });
    Ok(Output::new(text, json))
}

pub fn verify(cfg: &Config, fault: Option<Fault>) -> CmdResult {
    let ty = cfg.require_type().map_err(CliError::Usage)?;
    let pair = build_pair(ty, cfg.max_degree)?;
    let mut periods: Vec<usize> = vec![0, 1, cfg.period];
    periods.sort_unstable();
    periods.dedup();
    let opts = VerifyOptions { m: cfg.period, periods, threads: cfg.threads, fault };
    let report = verify_all(&pair, &ty.to_string(), &opts);
    Ok(Output { text: report.to_text(), json: report.to_json(), ok: report.passed() })
}
