//! Command-line front end: parse matrices and operators from JSON files, run
//! the factorization pipelines, and emit certificates and reports.
//!
//! Exit codes: 0 — the requested property was established or a certificate
//! emitted; 1 — the computation ran but the property fails; 2 — input error.
//! Stdout carries pure JSON; diagnostics go to stderr.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use idemfactor::atlas::{build_atlas, OpIndex, PrimeField};
use idemfactor::decomp::{local_block_rep, local_block_rep_in};
use idemfactor::factorize::{
    auto_factor, check_consistency, consistency_certificate, factor_embed, factor_range_swallow,
    factor_range_swallow_mirror, factor_thm411, factor_thm411_family, factor_thm413,
    factor_thm413_family, factor_thm48, factor_thm48_family, verify_certificate, AutoFactorError,
    Certificate, RecipeError, Thm411Variant, DEFAULT_TOL,
};
use idemfactor::field::{FieldTag, Scalar};
use idemfactor::idempotent::classify_idempotent;
use idemfactor::json::{
    annihilator_report_to_value, block_rep_to_value, certificate_from_value, certificate_to_value,
    consistency_report_to_value, idempotent_class_to_value, membership_report_to_value,
    structured_operator_from_value, structured_operator_to_value, verification_report_to_value,
    AnyMatrix,
};
use idemfactor::matrix::Matrix;
use idemfactor::opcheck::StructuredOperator;

/// Construct, verify, and certify factorizations of linear operators into
/// products of idempotents.
#[derive(Parser)]
#[command(name = "idemfactor", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the local block representation of an operator and classify it.
    Blockrep(BlockrepArgs),
    /// Factor an operator into idempotents and emit a certificate.
    Factor(FactorArgs),
    /// Re-verify a certificate file.
    Verify(VerifyArgs),
    /// Evaluate the consistency-condition systems for a (T1,T2,B,C,D) tuple.
    Consistency(ConsistencyArgs),
    /// Solve U = V·W0 with the minimal-kernel normalization.
    Douglas(DouglasArgs),
    /// Idempotent-index atlas over a small finite field.
    Index(IndexArgs),
    /// Symbolic verdicts for weighted shift and diagonal operators on l2.
    Opcheck(OpcheckArgs),
}

#[derive(Args)]
struct BlockrepArgs {
    /// Operator matrix (JSON file).
    #[arg(long)]
    input: String,
    /// Optional basis of a subspace K containing the range (JSON file).
    #[arg(long)]
    basis: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    RangeSwallow,
    RangeSwallowMirror,
    Embed,
    Thm48,
    Thm411,
    Thm411Prime,
    Thm413,
}

#[derive(Args)]
struct FactorArgs {
    /// Target operator matrix (JSON file).
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    /// Number of certificates to draw from a parameterized family.
    #[arg(long, default_value_t = 1)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Embedding map J for --method embed (JSON file).
    #[arg(long = "J")]
    j: Option<String>,
    /// Kernel-valued V for --method thm48 (JSON file).
    #[arg(long = "V")]
    v: Option<String>,
    /// Idempotent D for --method thm411 / invertible D for thm413 (JSON file).
    #[arg(long = "D")]
    d: Option<String>,
    /// Invertible C for --method thm413 (JSON file).
    #[arg(long = "C")]
    c: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate file, or a {"certificates": [...]} bundle.
    #[arg(long)]
    cert: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ConsistencyArgs {
    #[arg(long = "T1")]
    t1: String,
    #[arg(long = "T2")]
    t2: String,
    #[arg(long = "B")]
    b: String,
    #[arg(long = "C")]
    c: String,
    #[arg(long = "D")]
    d: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct DouglasArgs {
    #[arg(long = "U")]
    u: String,
    #[arg(long = "V")]
    v: String,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GfField {
    Gf2,
    Gf3,
    Gf5,
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long, value_enum)]
    field: GfField,
    #[arg(long)]
    n: usize,
    /// Matrix to look up (JSON file); mutually exclusive with --all.
    #[arg(long)]
    matrix: Option<String>,
    /// Emit the full S_t histogram.
    #[arg(long)]
    all: bool,
    /// Audit every minimal witness against the structure theory.
    #[arg(long)]
    verify_structure: bool,
    #[arg(long, default_value_t = 8)]
    tmax: usize,
    /// Worker threads for layer expansion (falls back to IDEMFACTOR_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct OpcheckArgs {
    /// right-shift | left-shift | diag-harmonic | path to a custom JSON rule.
    #[arg(long)]
    op: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((value, code)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("serializable output")
            );
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(Value, u8), String> {
    match cli.command {
        Command::Blockrep(args) => cmd_blockrep(args),
        Command::Factor(args) => cmd_factor(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Consistency(args) => cmd_consistency(args),
        Command::Douglas(args) => cmd_douglas(args),
        Command::Index(args) => cmd_index(args),
        Command::Opcheck(args) => cmd_opcheck(args),
    }
}

fn read_json(path: &str) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))
}

fn read_any_matrix(path: &str) -> Result<AnyMatrix, String> {
    AnyMatrix::from_json_value(&read_json(path)?).map_err(|e| format!("{path}: {e}"))
}

fn read_matrix_as<F: Scalar>(path: &str) -> Result<Matrix<F>, String> {
    Matrix::from_json_value(&read_json(path)?).map_err(|e| format!("{path}: {e}"))
}

macro_rules! with_any_matrix {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            AnyMatrix::Q($m) => $body,
            AnyMatrix::F64($m) => $body,
            AnyMatrix::Gf2($m) => $body,
            AnyMatrix::Gf3($m) => $body,
            AnyMatrix::Gf5($m) => $body,
        }
    };
}

fn cmd_blockrep(args: BlockrepArgs) -> Result<(Value, u8), String> {
    let any = read_any_matrix(&args.input)?;
    with_any_matrix!(any, m => blockrep_typed(m, args))
}

fn blockrep_typed<F: Scalar>(m: Matrix<F>, args: BlockrepArgs) -> Result<(Value, u8), String> {
    let rep = match &args.basis {
        Some(path) => local_block_rep_in(&m, read_matrix_as::<F>(path)?),
        None => local_block_rep(&m),
    };
    match rep {
        Ok(rep) => {
            let class = classify_idempotent(&rep, args.tol).map_err(|e| e.to_string())?;
            Ok((
                json!({
                    "block_rep": block_rep_to_value(&rep),
                    "classification": idempotent_class_to_value(&class),
                }),
                0,
            ))
        }
        Err(e) => Ok((json!({ "not_applicable": e.to_string() }), 1)),
    }
}

fn cmd_factor(args: FactorArgs) -> Result<(Value, u8), String> {
    let any = read_any_matrix(&args.input)?;
    with_any_matrix!(any, m => factor_typed(m, args))
}

fn factor_typed<F: Scalar>(m: Matrix<F>, args: FactorArgs) -> Result<(Value, u8), String> {
    if args.samples == 0 {
        return Err("--samples must be at least 1".into());
    }
    let tol = args.tol;

    if args.method == Method::Auto {
        if args.samples != 1 {
            return Err("--samples applies to parameterized methods, not auto".into());
        }
        return match auto_factor(&m, args.seed, tol) {
            Ok(cert) => Ok((certificate_to_value(&cert), 0)),
            Err(AutoFactorError::InvalidTarget(why)) => Err(why),
            Err(AutoFactorError::NoRecipeApplies(no)) => {
                let attempts: Vec<Value> = no
                    .attempts
                    .iter()
                    .map(|(r, why)| json!({ "recipe": r.as_str(), "reason": why }))
                    .collect();
                Ok((
                    json!({
                        "no_recipe_applies": true,
                        "annihilators": no.annihilators.as_ref().map(annihilator_report_to_value),
                        "attempts": attempts,
                    }),
                    1,
                ))
            }
        };
    }

    let param = |path: &Option<String>| -> Result<Option<Matrix<F>>, RecipeError> {
        path.as_ref()
            .map(|p| read_matrix_as::<F>(p))
            .transpose()
            .map_err(RecipeError::BadParameter)
    };
    let outcome: Result<Vec<Certificate<F>>, RecipeError> = (|| {
        if args.method == Method::RangeSwallowMirror {
            let rep = idemfactor::decomp::colocal_block_rep(&m).map_err(RecipeError::from)?;
            return Ok(vec![factor_range_swallow_mirror(&rep, tol)?]);
        }
        let rep = local_block_rep(&m).map_err(RecipeError::from)?;
        match args.method {
            Method::RangeSwallow => Ok(vec![factor_range_swallow(&rep, tol)?]),
            Method::Embed => Ok(vec![factor_embed(&rep, param(&args.j)?, tol)?]),
            Method::Thm48 => match args.samples {
                1 => Ok(vec![factor_thm48(&rep, param(&args.v)?, args.seed, tol)?]),
                n => factor_thm48_family(&rep, n, args.seed, tol),
            },
            Method::Thm411 | Method::Thm411Prime => {
                let variant = if args.method == Method::Thm411 {
                    Thm411Variant::E1
                } else {
                    Thm411Variant::E1Prime
                };
                match args.samples {
                    1 => Ok(vec![factor_thm411(
                        &rep,
                        param(&args.d)?,
                        variant,
                        args.seed,
                        tol,
                    )?]),
                    n => factor_thm411_family(&rep, n, args.seed, tol),
                }
            }
            Method::Thm413 => {
                let (Some(c), Some(d)) = (param(&args.c)?, param(&args.d)?) else {
                    return Err(RecipeError::BadParameter(
                        "--method thm413 requires --C and --D".into(),
                    ));
                };
                match args.samples {
                    1 => Ok(vec![factor_thm413(&rep, &c, &d, tol)?]),
                    n => factor_thm413_family(&rep, &c, &d, n, args.seed, tol),
                }
            }
            Method::Auto | Method::RangeSwallowMirror => unreachable!("handled above"),
        }
    })();

    match outcome {
        Ok(mut certs) if certs.len() == 1 => Ok((certificate_to_value(&certs.remove(0)), 0)),
        Ok(certs) => Ok((
            json!({
                "certificates": certs.iter().map(certificate_to_value).collect::<Vec<_>>(),
            }),
            0,
        )),
        Err(
            e @ (RecipeError::NotApplicable(_)
            | RecipeError::Douglas(_)
            | RecipeError::Decomp(_)
            | RecipeError::VerificationFailed(_)),
        ) => Ok((json!({ "not_applicable": e.to_string() }), 1)),
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(Value, u8), String> {
    let doc = read_json(&args.cert)?;
    let certs: Vec<Value> = match doc.get("certificates") {
        Some(Value::Array(list)) => list.clone(),
        _ => vec![doc],
    };
    let mut reports = Vec::with_capacity(certs.len());
    let mut all_pass = true;
    for cert_value in &certs {
        let field = cert_value
            .get("target")
            .and_then(|t| t.get("field"))
            .and_then(Value::as_str)
            .and_then(FieldTag::from_name)
            .ok_or("certificate target needs a field tag")?;
        let report = verify_any_certificate(field, cert_value, args.tol)?;
        all_pass &= report["pass"].as_bool().unwrap_or(false);
        reports.push(report);
    }
    let value = if reports.len() == 1 {
        reports.remove(0)
    } else {
        json!({ "pass": all_pass, "reports": reports })
    };
    Ok((value, if all_pass { 0 } else { 1 }))
}

fn verify_any_certificate(field: FieldTag, v: &Value, tol: f64) -> Result<Value, String> {
    fn go<F: Scalar>(v: &Value, tol: f64) -> Result<Value, String> {
        let cert: Certificate<F> = certificate_from_value(v)?;
        Ok(verification_report_to_value(&verify_certificate(
            &cert, tol,
        )))
    }
    match field {
        FieldTag::Q => go::<idemfactor::field::Rat>(v, tol),
        FieldTag::F64 => go::<f64>(v, tol),
        FieldTag::Gf2 => go::<idemfactor::field::Gf2>(v, tol),
        FieldTag::Gf3 => go::<idemfactor::field::Gf3>(v, tol),
        FieldTag::Gf5 => go::<idemfactor::field::Gf5>(v, tol),
    }
}

fn cmd_consistency(args: ConsistencyArgs) -> Result<(Value, u8), String> {
    let any = read_any_matrix(&args.t1)?;
    with_any_matrix!(any, t1 => consistency_typed(t1, args))
}

fn consistency_typed<F: Scalar>(
    t1: Matrix<F>,
    args: ConsistencyArgs,
) -> Result<(Value, u8), String> {
    let t2 = read_matrix_as::<F>(&args.t2)?;
    let b = read_matrix_as::<F>(&args.b)?;
    let c = read_matrix_as::<F>(&args.c)?;
    let d = read_matrix_as::<F>(&args.d)?;
    let report = check_consistency(&t1, &t2, &b, &c, &d, args.tol).map_err(|e| e.to_string())?;
    let cert =
        consistency_certificate(&t1, &t2, &b, &c, &d, args.tol).map_err(|e| e.to_string())?;
    let ok = report.set_c1;
    Ok((
        json!({
            "report": consistency_report_to_value(&report),
            "certificate": cert.as_ref().map(certificate_to_value),
        }),
        if ok { 0 } else { 1 },
    ))
}

fn cmd_douglas(args: DouglasArgs) -> Result<(Value, u8), String> {
    let any = read_any_matrix(&args.u)?;
    with_any_matrix!(any, u => douglas_typed(u, &args.v))
}

fn douglas_typed<F: Scalar>(u: Matrix<F>, v_path: &str) -> Result<(Value, u8), String> {
    use idemfactor::douglas::{douglas_solve, DouglasError};
    let v = read_matrix_as::<F>(v_path)?;
    match douglas_solve(&u, &v) {
        Ok(w0) => {
            let product_residual = v.mul(&w0).sub(&u).residual_norm();
            let kernel_residual = w0.mul(&u.nullspace_basis()).residual_norm();
            Ok((
                json!({
                    "W0": w0.to_json_value(),
                    "product_residual": product_residual,
                    "kernel": {
                        "nullity_U": u.nullity(),
                        "nullity_W0": w0.nullity(),
                        "kernel_basis_residual": kernel_residual,
                    },
                }),
                0,
            ))
        }
        Err(e @ DouglasError::RangeNotContained) => {
            Ok((json!({ "range_not_contained": e.to_string() }), 1))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_index(args: IndexArgs) -> Result<(Value, u8), String> {
    let threads = args
        .threads
        .or_else(|| {
            std::env::var("IDEMFACTOR_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    match args.field {
        GfField::Gf2 => index_typed::<idemfactor::field::Gf2>(args, threads),
        GfField::Gf3 => index_typed::<idemfactor::field::Gf3>(args, threads),
        GfField::Gf5 => index_typed::<idemfactor::field::Gf5>(args, threads),
    }
}

fn index_typed<F: PrimeField>(args: IndexArgs, threads: usize) -> Result<(Value, u8), String> {
    let atlas = build_atlas::<F>(args.n, args.tmax, threads).map_err(|e| e.to_string())?;
    let mut out = json!({
        "field": format!("GF{}", F::P),
        "n": args.n,
        "idempotents": atlas.idempotent_count(),
        "closed": atlas.is_closed(),
    });
    let mut code = 0u8;

    if args.all || (args.matrix.is_none() && !args.verify_structure) {
        let histogram: BTreeMap<String, usize> = atlas
            .histogram()
            .into_iter()
            .map(|(t, c)| (t.to_string(), c))
            .collect();
        out["histogram"] = json!(histogram);
        out["reachable"] = json!(atlas.reachable_count());
        out["space"] = json!((F::P).pow((args.n * args.n) as u32));
    }
    if let Some(path) = &args.matrix {
        let m = read_matrix_as::<F>(path)?;
        if m.rows() != args.n || m.cols() != args.n {
            return Err(format!("matrix must be {0}x{0}", args.n));
        }
        match atlas.index_of(&m) {
            OpIndex::Finite(t) => {
                let witness = atlas
                    .witness_of(&m)
                    .expect("finite index has a witness")
                    .iter()
                    .map(Matrix::to_json_value)
                    .collect::<Vec<_>>();
                out["index"] = json!(t);
                out["witness"] = json!(witness);
                out["trivial"] = json!(atlas.is_trivial(&m));
            }
            OpIndex::Infinite => {
                out["index"] = json!("infinity");
                code = 1;
            }
        }
    }
    if args.verify_structure {
        let report = atlas.verify_minimal_structure();
        out["structure"] = json!({
            "witnesses_checked": report.witnesses_checked,
            "violations": report.violations,
        });
        if !report.violations.is_empty() {
            code = 1;
        }
    }
    Ok((out, code))
}

fn cmd_opcheck(args: OpcheckArgs) -> Result<(Value, u8), String> {
    let op = match args.op.as_str() {
        "right-shift" => StructuredOperator::right_shift(),
        "left-shift" => StructuredOperator::left_shift(),
        "diag-harmonic" => StructuredOperator::diagonal_harmonic(),
        path => structured_operator_from_value(&read_json(path)?)?,
    };
    let range = op.range_classification();
    Ok((
        json!({
            "operator": structured_operator_to_value(&op),
            "kernel_trivial": op.kernel_trivial(),
            "range": {
                "dense": range.dense,
                "closed": range.closed,
                "equals_X": range.equals_x,
            },
            "membership": membership_report_to_value(&op.membership_report()),
        }),
        0,
    ))
}
