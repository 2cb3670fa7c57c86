//! `qcg`: basis generation/validation, Choi construction, CP certification,
//! extremal/simplex analysis, region sampling and figure-data emission.
//!
//! Exit codes: 0 success (a not-cp verdict is still a success), 1 domain
//! error, 2 usage or file error.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qcg_core::{
    basis_from_json, basis_to_json, certify_cp, certify_cp_cross_validated,
    certify_cp_translation, channel_from_json, choi_of_depolarizing,
    choi_of_translation_channel, conjugate_pair_structure, extremal_vertices, gellmann_basis,
    hermitian_eigensystem, hw_basis, pauli_basis, sample_region, simplex_condition,
    validate_basis, BasisRef, ChoiMatrix, CompressionVector, Error as CoreError,
    TranslationVector, C64, DEFAULT_TOL,
};

#[derive(Parser)]
#[command(name = "qcg", version, about = "Geometry of generalized depolarizing channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or validate operator bases
    Basis {
        #[command(subcommand)]
        action: BasisAction,
    },
    /// Choi matrix of a channel read from JSON
    Choi {
        /// Path to a channel JSON file
        #[arg(long)]
        channel: String,
        /// Also include the Choi spectrum in the output
        #[arg(long)]
        emit_spectrum: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Certify complete positivity of a depolarizing channel
    Certify {
        #[command(flatten)]
        basis: BasisArgs,
        /// Compression vector: N^2 comma-separated "re" or "re+imj" tokens
        /// (leading v_0 = 1 included), or a path to a JSON array
        #[arg(long)]
        v: Option<String>,
        /// Channel JSON file (alternative to --basis/--v)
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        /// Cross-check analytic eigenvalues against the numeric eigensolver
        #[arg(long)]
        cross_validate: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Certify a compress-and-translate channel (numeric eigensolver)
    CertifyT {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        v: Option<String>,
        /// Translation vector: N^2 tokens with t_0 = 0
        #[arg(long)]
        t: Option<String>,
        /// Channel JSON file carrying both v and t
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Extremal channels (vertices of the CP simplex)
    Extremals {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Test whether the CP region of a basis is a simplex
    SimplexCheck {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Monte Carlo estimate of the CP fraction of the sampling box
    Sample {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional translation vector (N^2 tokens, t_0 = 0)
        #[arg(long)]
        t: Option<String>,
        /// CSV file for the labeled sample points; the JSON summary always
        /// goes to stdout
        #[arg(long)]
        out: Option<String>,
    },
    /// Plot-ready simplex geometry: vertices, edges, facet normals
    FigureData {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum BasisAction {
    /// Emit a basis as JSON
    Gen {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Validate a basis JSON file (trace-free / trace-orthogonal structure)
    Validate {
        /// Path to a basis JSON file
        #[arg(long)]
        input: String,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args)]
struct BasisArgs {
    /// Basis kind (pauli | gellmann | heisenberg-weyl) or path to basis JSON
    #[arg(long)]
    basis: Option<String>,
    /// Hilbert-space dimension (gellmann, heisenberg-weyl)
    #[arg(long)]
    n: Option<usize>,
    /// Number of qubits (pauli)
    #[arg(long)]
    d: Option<usize>,
}

enum CliError {
    /// Valid request, impossible answer (exit 1)
    Domain(String),
    /// Malformed input, unusable file or bad flags (exit 2)
    Usage(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(msg) => CliError::Usage(msg),
            other => CliError::Domain(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl BasisArgs {
    fn resolve(&self) -> CliResult<BasisRef> {
        let selector = self
            .basis
            .as_deref()
            .ok_or_else(|| CliError::Usage("--basis is required".into()))?;
        let b = match selector {
            "pauli" => {
                let d = self
                    .d
                    .ok_or_else(|| CliError::Usage("pauli basis requires --d".into()))?;
                pauli_basis(d)?
            }
            "gellmann" => {
                let n = self
                    .n
                    .ok_or_else(|| CliError::Usage("gellmann basis requires --n".into()))?;
                gellmann_basis(n)?
            }
            "heisenberg-weyl" | "hw" => {
                let n = self.n.ok_or_else(|| {
                    CliError::Usage("heisenberg-weyl basis requires --n".into())
                })?;
                hw_basis(n)?
            }
            path => {
                let value = read_json(path)?;
                basis_from_json(&value)?
            }
        };
        Ok(Arc::new(b))
    }
}

fn read_json(path: &str) -> CliResult<serde_json::Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad JSON in {path}: {e}")))
}

/// Parses "re" or "re+imj" (also "re-imj", "imj"); exponents are allowed.
fn parse_ctoken(token: &str) -> CliResult<C64> {
    let s = token.trim();
    if s.is_empty() {
        return Err(CliError::Usage("empty component token".into()));
    }
    if let Some(body) = s.strip_suffix(['j', 'J']) {
        let mut split = None;
        for (i, c) in body.char_indices().skip(1) {
            if (c == '+' || c == '-')
                && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
            {
                split = Some(i);
            }
        }
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let re: f64 = re
            .parse()
            .map_err(|_| CliError::Usage(format!("bad token {s:?}")))?;
        let im: f64 = match im {
            "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse()
                .map_err(|_| CliError::Usage(format!("bad token {s:?}")))?,
        };
        Ok(C64::new(re, im))
    } else {
        s.parse::<f64>()
            .map(|re| C64::new(re, 0.0))
            .map_err(|_| CliError::Usage(format!("bad token {s:?}")))
    }
}

/// A component list: comma-separated tokens, or a JSON file holding an array
/// of numbers or [re, im] pairs.
fn parse_components(input: &str, expected: usize) -> CliResult<Vec<C64>> {
    let components: Vec<C64> = if Path::new(input).is_file() {
        let value = read_json(input)?;
        let array = value
            .as_array()
            .ok_or_else(|| CliError::Usage(format!("{input}: expected a JSON array")))?;
        array
            .iter()
            .map(|entry| match entry {
                serde_json::Value::Number(x) => Ok(C64::new(
                    x.as_f64().ok_or_else(|| CliError::Usage("bad number".into()))?,
                    0.0,
                )),
                serde_json::Value::Array(pair) if pair.len() == 2 => {
                    let part = |v: &serde_json::Value| {
                        v.as_f64()
                            .ok_or_else(|| CliError::Usage("bad [re, im] pair".into()))
                    };
                    Ok(C64::new(part(&pair[0])?, part(&pair[1])?))
                }
                _ => Err(CliError::Usage(
                    "components must be numbers or [re, im] pairs".into(),
                )),
            })
            .collect::<CliResult<_>>()?
    } else {
        input.split(',').map(parse_ctoken).collect::<CliResult<_>>()?
    };
    if components.len() != expected {
        return Err(CliError::Usage(format!(
            "expected {expected} components including the leading entry, got {}",
            components.len()
        )));
    }
    Ok(components)
}

fn resolve_tol(flag: Option<f64>) -> CliResult<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("QCG_TOL") {
            Ok(text) => text
                .parse()
                .map_err(|_| CliError::Usage(format!("bad QCG_TOL value {text:?}")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol > 0.0) {
        return Err(CliError::Usage("tolerance must be positive".into()));
    }
    Ok(tol)
}

fn emit(out: Option<&str>, value: &serde_json::Value) -> CliResult<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(value).expect("serializable"));
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn choi_json(j: &ChoiMatrix, spectrum: Option<&[f64]>) -> serde_json::Value {
    let entries: Vec<Vec<[f64; 2]>> = (0..j.dim())
        .map(|r| (0..j.dim()).map(|c| {
            let z = j.matrix.get(r, c);
            [z.re, z.im]
        }).collect())
        .collect();
    let mut value = json!({ "dim": j.dim(), "entries": entries });
    if let Some(s) = spectrum {
        value["spectrum"] = json!(s);
    }
    value
}

/// Reads (v, optional t) either from --channel JSON or from --basis/--v/--t.
fn load_channel(
    basis: &BasisArgs,
    v: Option<&str>,
    t: Option<&str>,
    channel: Option<&str>,
) -> CliResult<(CompressionVector, Option<TranslationVector>)> {
    match (channel, v) {
        (Some(path), None) => {
            if t.is_some() {
                return Err(CliError::Usage("--t conflicts with --channel".into()));
            }
            let value = read_json(path)?;
            Ok(channel_from_json(&value)?)
        }
        (None, Some(vtext)) => {
            let b = basis.resolve()?;
            let v = CompressionVector::new(b.clone(), parse_components(vtext, b.len())?)?;
            let t = t
                .map(|ttext| {
                    TranslationVector::new(b.clone(), parse_components(ttext, b.len())?)
                        .map_err(CliError::from)
                })
                .transpose()?;
            Ok((v, t))
        }
        _ => Err(CliError::Usage(
            "provide either --channel FILE or --basis ... --v ...".into(),
        )),
    }
}

/// Column names mirroring PairStructure::real_coordinates ordering.
fn coordinate_names(b: &BasisRef) -> Vec<String> {
    let ps = conjugate_pair_structure(b);
    let mut names = Vec::new();
    for r in &ps.records {
        if r.alpha == 0 {
            continue;
        }
        if r.beta == r.alpha {
            names.push(format!("v_{}", b.label(r.alpha)));
        } else if r.alpha < r.beta {
            names.push(format!("re_v_{}", b.label(r.alpha)));
            names.push(format!("im_v_{}", b.label(r.alpha)));
        }
    }
    names
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Basis { action } => match action {
            BasisAction::Gen { basis, out } => {
                let b = basis.resolve()?;
                emit(out.as_deref(), &basis_to_json(&b))
            }
            BasisAction::Validate { input, out } => {
                let value = read_json(&input)?;
                let b = basis_from_json(&value)?;
                let report = validate_basis(&b);
                emit(
                    out.as_deref(),
                    &json!({
                        "passed": report.passed(),
                        "identityDeviation": report.identity_deviation,
                        "worstTrace": report.worst_trace,
                        "worstOrthogonality": report.worst_orthogonality,
                        "minNorm": report.min_norm,
                        "tolerance": report.tolerance,
                    }),
                )
            }
        },
        Command::Choi {
            channel,
            emit_spectrum,
            out,
        } => {
            let value = read_json(&channel)?;
            let (v, t) = channel_from_json(&value)?;
            let j = match &t {
                Some(t) => choi_of_translation_channel(&v, t)?,
                None => choi_of_depolarizing(&v),
            };
            let spectrum = if emit_spectrum {
                Some(hermitian_eigensystem(&j.matrix)?.values)
            } else {
                None
            };
            emit(out.as_deref(), &choi_json(&j, spectrum.as_deref()))
        }
        Command::Certify {
            basis,
            v,
            channel,
            tol,
            cross_validate,
            out,
        } => {
            let tol = resolve_tol(tol)?;
            let (v, t) = load_channel(&basis, v.as_deref(), None, channel.as_deref())?;
            if t.is_some() {
                return Err(CliError::Usage(
                    "channel has a translation component; use certify-t".into(),
                ));
            }
            let report = if cross_validate {
                certify_cp_cross_validated(&v, tol)?
            } else {
                certify_cp(&v, tol)?
            };
            emit(out.as_deref(), &serde_json::to_value(&report).expect("serializable"))
        }
        Command::CertifyT {
            basis,
            v,
            t,
            channel,
            tol,
            out,
        } => {
            let tol = resolve_tol(tol)?;
            let (v, t) = load_channel(&basis, v.as_deref(), t.as_deref(), channel.as_deref())?;
            let t = t.unwrap_or_else(|| TranslationVector::zero(v.basis().clone()));
            let report = certify_cp_translation(&v, &t, tol)?;
            emit(out.as_deref(), &serde_json::to_value(&report).expect("serializable"))
        }
        Command::Extremals { basis, out } => {
            let b = basis.resolve()?;
            let set = extremal_vertices(&b)?;
            let ps = conjugate_pair_structure(&b);
            let vertices: Vec<Vec<[f64; 2]>> = set
                .vertices
                .iter()
                .map(|v| v.components().iter().map(|z| [z.re, z.im]).collect())
                .collect();
            let coords: Vec<Vec<f64>> = set
                .vertices
                .iter()
                .map(|v| ps.real_coordinates(v.components()))
                .collect();
            emit(
                out.as_deref(),
                &json!({
                    "basis": { "kind": b.kind().as_str(), "n": b.n() },
                    "channels": set.channel_indices,
                    "vertices": vertices,
                    "coordinateNames": coordinate_names(&b),
                    "realCoordinates": coords,
                }),
            )
        }
        Command::SimplexCheck { basis, out } => {
            let b = basis.resolve()?;
            let report = simplex_condition(&b);
            let failing = report.failing_pair.map(|(a, bi)| {
                json!({ "pair": [a, bi], "labels": [b.label(a), b.label(bi)] })
            });
            emit(
                out.as_deref(),
                &json!({
                    "isSimplex": report.is_simplex,
                    "failingPair": failing,
                    "maxCommutator": report.max_commutator,
                    "phaseTable": report.phase_table,
                }),
            )
        }
        Command::Sample {
            basis,
            samples,
            seed,
            t,
            out,
        } => {
            let b = basis.resolve()?;
            let t = t
                .map(|ttext| {
                    TranslationVector::new(b.clone(), parse_components(&ttext, b.len())?)
                        .map_err(CliError::from)
                })
                .transpose()?;
            let outcome = sample_region(&b, t.as_ref(), samples, seed, out.is_some())?;
            if let Some(path) = &out {
                let ps = conjugate_pair_structure(&b);
                let mut csv = String::from("index");
                for name in coordinate_names(&b) {
                    csv.push(',');
                    csv.push_str(&name);
                }
                csv.push_str(",cp\n");
                for (index, (components, cp)) in outcome.points.iter().enumerate() {
                    csv.push_str(&index.to_string());
                    for x in ps.real_coordinates(components) {
                        csv.push(',');
                        csv.push_str(&format!("{x:.17}"));
                    }
                    csv.push_str(if *cp { ",1\n" } else { ",0\n" });
                }
                fs::write(path, csv)
                    .map_err(|e| CliError::Usage(format!("cannot write {path}: {e}")))?;
            }
            emit(None, &serde_json::to_value(&outcome.summary).expect("serializable"))
        }
        Command::FigureData { basis, out } => {
            let b = basis.resolve()?;
            let report = simplex_condition(&b);
            if !report.is_simplex {
                return Err(CliError::Domain(
                    "basis is not a simplex; use `sample` to explore the CP region".into(),
                ));
            }
            let set = extremal_vertices(&b)?;
            let ps = conjugate_pair_structure(&b);
            let coords: Vec<Vec<f64>> = set
                .vertices
                .iter()
                .map(|v| ps.real_coordinates(v.components()))
                .collect();
            let count = coords.len();
            let edges: Vec<[usize; 2]> = (0..count)
                .flat_map(|i| (i + 1..count).map(move |j| [i, j]))
                .collect();
            let mut value = json!({
                "basis": { "kind": b.kind().as_str(), "n": b.n() },
                "coordinateNames": coordinate_names(&b),
                "vertices": coords,
                "edges": edges,
            });
            if b.n() == 2 && b.len() == 4 {
                // lambda_nm >= 0 <=> 1 + normal . (v_x, v_y, v_z) >= 0
                let normals = [
                    [1.0, 1.0, 1.0],
                    [-1.0, -1.0, 1.0],
                    [1.0, -1.0, -1.0],
                    [-1.0, 1.0, -1.0],
                ];
                value["facetNormals"] = json!(normals);
                value["facetOffset"] = json!(1.0);
            }
            emit(out.as_deref(), &value)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
