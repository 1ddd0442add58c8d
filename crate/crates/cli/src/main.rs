//! `ainfty` — exact A∞ homotopy transfer on finite differential graded
//! algebras.
//!
//! Subcommands: `validate` (DGA axioms), `hodge` (Betti numbers and the
//! Hodge operator identities), `transfer` (build and verify the
//! transferred structure, write the μ-table), `verify` (re-check a
//! stored μ-table), `mu3` (evaluate the first higher product on a
//! triple).
//!
//! Exit codes: 0 success, 1 mathematical failure (axiom, assumption, or
//! identity), 2 input error. Reports are JSON on stdout (or `--out`);
//! the human-readable summary goes to stderr. All randomness is seeded
//! and the seed is echoed in the output, so identical invocations
//! produce byte-identical reports.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ainfty_core::dga::{build_simplicial_cochain_dga, builtin_dga, Dga};
use ainfty_core::hodge::{build_hodge, identity_gram, HodgePackage};
use ainfty_core::ingest;
use ainfty_core::transfer::{
    check_assumption, AInftyStructure, MuTable, Subcomplex, TransferDatum, VerifyConfig,
    VerifyMode, WElement,
};
use ainfty_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "ainfty", version, about = "Exact A∞ homotopy transfer on finite DGAs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the DGA axioms (d² = 0, Leibniz, associativity) exactly
    Validate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hodge report: Betti numbers and exact operator identities
    Hodge {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the transferred A∞ structure, verify the associativity
    /// tower, and write the μ-table
    Transfer {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        datum: DatumArgs,
        /// Largest arity to tabulate and verify
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        /// Random tuples per level when sampling
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exhaustive levels switch to sampling above this tuple count
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a stored μ-table against its verification schedule
    Verify {
        /// μ-table JSON written by `transfer`
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate μ₃ on three subcomplex elements and test μ₁-exactness
    Mu3 {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        datum: DatumArgs,
        /// Three element specs `DEG:IDX` (basis) or `DEG:c0,c1,…` (coords)
        #[arg(long, num_args = 3, required = true)]
        elements: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Built-in algebra: point, interval, sphere2, torus, exterior2,
    /// dual_numbers, massey_witness
    #[arg(long, conflicts_with_all = ["dga", "complex"])]
    builtin: Option<String>,
    /// DGA JSON file
    #[arg(long, conflicts_with = "complex")]
    dga: Option<PathBuf>,
    /// Simplicial complex text file (cochain algebra is built from it)
    #[arg(long)]
    complex: Option<PathBuf>,
}

#[derive(Args)]
struct DatumArgs {
    /// Subcomplex: harm | kerd | full | custom:FILE
    #[arg(long, default_value = "harm")]
    subcomplex: String,
    /// Homotopy: auto (d*G from the identity gram) | zero | file:PATH
    #[arg(long = "Q", default_value = "auto")]
    q: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

enum CliError {
    Input(String),
    Math(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(_)
            | CoreError::UnknownBuiltin(_)
            | CoreError::Simplicial(_)
            | CoreError::Table(_)
            | CoreError::ShiftMismatch { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::SpaceMismatch { .. }
            | CoreError::InvalidGradedData(_) => CliError::Input(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("malformed JSON: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            2
        }
        Err(CliError::Math(msg)) => {
            eprintln!("failure: {msg}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate { input, out } => cmd_validate(&input, out.as_deref()),
        Command::Hodge { input, out } => cmd_hodge(&input, out.as_deref()),
        Command::Transfer {
            input,
            datum,
            max_order,
            mode,
            trials,
            seed,
            budget,
            out,
        } => {
            if max_order < 1 {
                return Err(CliError::Input("--max-order must be at least 1".into()));
            }
            if trials < 1 {
                return Err(CliError::Input("--trials must be at least 1".into()));
            }
            if budget < 1 {
                return Err(CliError::Input("--budget must be at least 1".into()));
            }
            let config = VerifyConfig {
                mode: match mode {
                    ModeArg::Exhaustive => VerifyMode::Exhaustive,
                    ModeArg::Random => VerifyMode::Random,
                },
                trials,
                seed,
                budget,
            };
            cmd_transfer(&input, &datum, max_order, &config, out.as_deref())
        }
        Command::Verify { table, input, out } => cmd_verify(&table, &input, out.as_deref()),
        Command::Mu3 {
            input,
            datum,
            elements,
            out,
        } => cmd_mu3(&input, &datum, &elements, out.as_deref()),
    }
}

fn load_dga(input: &InputArgs) -> Result<(Dga, Value), CliError> {
    if let Some(name) = &input.builtin {
        let dga = builtin_dga(name)?;
        return Ok((dga, json!({ "kind": "builtin", "name": name })));
    }
    if let Some(path) = &input.dga {
        let text = fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        let dga = ingest::parse_dga(&value)?;
        return Ok((dga, json!({ "kind": "dga", "path": path.display().to_string() })));
    }
    if let Some(path) = &input.complex {
        let text = fs::read_to_string(path)?;
        let complex = ingest::parse_complex(&text)?;
        let dga = build_simplicial_cochain_dga(&complex)?;
        return Ok((dga, json!({ "kind": "complex", "path": path.display().to_string() })));
    }
    Err(CliError::Input(
        "no input: pass --builtin NAME, --dga FILE, or --complex FILE".into(),
    ))
}

fn emit(report: &Value, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = format!("{}\n", serde_json::to_string_pretty(report)?);
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_validate(input: &InputArgs, out: Option<&std::path::Path>) -> Result<i32, CliError> {
    let (dga, input_echo) = load_dga(input)?;
    let report = dga.validate();
    let ok = report.is_valid();
    let value = json!({
        "command": "validate",
        "input": input_echo,
        "algebra_hash": ingest::dga_hash(&dga),
        "report": ingest::validation_report_to_json(&report),
        "ok": ok,
    });
    emit(&value, out)?;
    eprintln!(
        "validate {}: d²=0 {}, Leibniz {}, associativity {}",
        dga.name(),
        report.d_squared_ok,
        report.leibniz_ok,
        report.assoc_ok
    );
    Ok(if ok { 0 } else { 1 })
}

fn cmd_hodge(input: &InputArgs, out: Option<&std::path::Path>) -> Result<i32, CliError> {
    let (dga, input_echo) = load_dga(input)?;
    let dga = Arc::new(dga);
    let pkg = build_hodge(dga.clone(), identity_gram(dga.space()))?;
    let mut value = ingest::hodge_report_to_json(&pkg, "identity");
    value["command"] = json!("hodge");
    value["input"] = input_echo;
    value["algebra_hash"] = json!(ingest::dga_hash(&dga));
    emit(&value, out)?;
    let betti: Vec<usize> = pkg.betti().values().copied().collect();
    eprintln!("hodge {}: betti {:?}", dga.name(), betti);
    Ok(0)
}

fn resolve_datum(
    dga: &Arc<Dga>,
    datum: &DatumArgs,
) -> Result<(TransferDatum, HodgePackage), CliError> {
    let pkg = build_hodge(dga.clone(), identity_gram(dga.space()))?;
    let q = match datum.q.as_str() {
        "auto" => pkg.homotopy(),
        "zero" => ainfty_core::graded::GradedMap::zero(
            dga.space().clone(),
            dga.space().clone(),
            -1,
        ),
        other => match other.strip_prefix("file:") {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let value: Value = serde_json::from_str(&text)?;
                ingest::parse_graded_map(&value, dga.space())?
            }
            None => {
                return Err(CliError::Input(format!(
                    "unknown homotopy source `{other}` (use auto, zero, or file:PATH)"
                )))
            }
        },
    };
    let result = match datum.subcomplex.as_str() {
        "harm" => {
            let inclusion = dga
                .space()
                .degrees()
                .filter(|&g| pkg.harmonic_dim(g) > 0)
                .map(|g| {
                    (
                        g,
                        ainfty_core::linalg::Matrix::from_cols(
                            dga.space().dim(g),
                            pkg.harmonic_basis(g).to_vec(),
                        ),
                    )
                })
                .collect();
            let w = Subcomplex::new(dga.space().clone(), inclusion)?;
            check_assumption(dga.clone(), w, q)
        }
        "kerd" => {
            let d = dga.differential();
            let inclusion = dga
                .space()
                .degrees()
                .filter(|&g| dga.space().dim(g) > 0)
                .filter_map(|g| {
                    let kernel = d.block(g).kernel_basis();
                    if kernel.is_empty() {
                        None
                    } else {
                        Some((
                            g,
                            ainfty_core::linalg::Matrix::from_cols(dga.space().dim(g), kernel),
                        ))
                    }
                })
                .collect();
            let w = Subcomplex::new(dga.space().clone(), inclusion)?;
            check_assumption(dga.clone(), w, q)
        }
        "full" => check_assumption(dga.clone(), Subcomplex::full(dga.space().clone()), q),
        other => match other.strip_prefix("custom:") {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let value: Value = serde_json::from_str(&text)?;
                let w = ingest::parse_subcomplex(&value, dga.space())?;
                check_assumption(dga.clone(), w, q)
            }
            None => {
                return Err(CliError::Input(format!(
                    "unknown subcomplex `{other}` (use harm, kerd, full, or custom:FILE)"
                )))
            }
        },
    };
    Ok((result?, pkg))
}

fn cmd_transfer(
    input: &InputArgs,
    datum_args: &DatumArgs,
    max_order: usize,
    config: &VerifyConfig,
    out: Option<&std::path::Path>,
) -> Result<i32, CliError> {
    let (dga, input_echo) = load_dga(input)?;
    let validation = dga.validate();
    if !validation.is_valid() {
        let value = json!({
            "command": "transfer",
            "input": input_echo,
            "error": "algebra fails the DGA axioms",
            "report": ingest::validation_report_to_json(&validation),
        });
        emit(&value, out)?;
        eprintln!("transfer: {} is not a valid DGA", dga.name());
        return Ok(1);
    }
    let dga = Arc::new(dga);
    let algebra_hash = ingest::dga_hash(&dga);
    let (datum, _pkg) = resolve_datum(&dga, datum_args)?;
    let q_hash = ingest::graded_map_hash(datum.homotopy());
    let structure = AInftyStructure::new(datum, max_order);
    let report = structure.verify(max_order, config)?;
    let all_zero = report.all_zero();
    let table = MuTable::from_structure(
        &structure,
        &report,
        config.clone(),
        algebra_hash,
        q_hash,
    );
    let mut value = ingest::serialize_mu_table(&table);
    value["input"] = input_echo;
    emit(&value, out)?;
    for level in &report.levels {
        eprintln!(
            "transfer {} n={}: {} over {} tuples, {} failures",
            dga.name(),
            level.n,
            level.mode,
            level.tuples,
            level.failures
        );
    }
    Ok(if all_zero { 0 } else { 1 })
}

fn cmd_verify(
    table_path: &std::path::Path,
    input: &InputArgs,
    out: Option<&std::path::Path>,
) -> Result<i32, CliError> {
    let text = fs::read_to_string(table_path)?;
    let value: Value = serde_json::from_str(&text)?;
    let table = ingest::parse_mu_table(&value)?;
    let (dga, input_echo) = load_dga(input)?;
    let algebra_hash = ingest::dga_hash(&dga);
    if algebra_hash != table.algebra_hash {
        return Err(CliError::Input(format!(
            "algebra hash mismatch: table was built for {}, input hashes to {}",
            table.algebra_hash, algebra_hash
        )));
    }
    let report = table.verify_stored()?;
    let ok = report.all_zero();
    let result = json!({
        "command": "verify",
        "input": input_echo,
        "table": table_path.display().to_string(),
        "algebra_hash": algebra_hash,
        "config": { "seed": table.config.seed, "trials": table.config.trials, "budget": table.config.budget },
        "report": ingest::verification_report_to_json(&report),
        "ok": ok,
    });
    emit(&result, out)?;
    eprintln!(
        "verify {}: {} levels re-checked, {}",
        dga.name(),
        report.levels.len(),
        if ok { "all residuals zero" } else { "FAILURES found" }
    );
    Ok(if ok { 0 } else { 1 })
}

fn parse_element(spec: &str, structure: &AInftyStructure) -> Result<WElement, CliError> {
    let (deg, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Input(format!("element spec `{spec}` is not DEG:IDX or DEG:c0,c1,…")))?;
    let degree: i64 = deg
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("bad degree in `{spec}`")))?;
    let dim = structure.shape().dim(degree);
    if dim == 0 {
        return Err(CliError::Input(format!(
            "the subcomplex has no basis in degree {degree}"
        )));
    }
    if !rest.contains(',') {
        if let Ok(index) = rest.trim().parse::<usize>() {
            if index >= dim {
                return Err(CliError::Input(format!(
                    "basis index {index} out of range (dimension {dim} in degree {degree})"
                )));
            }
            let mut coords = vec![ainfty_core::linalg::scalar_int(0); dim];
            coords[index] = ainfty_core::linalg::scalar_int(1);
            return Ok(WElement::new(degree, coords));
        }
    }
    let coords = rest
        .split(',')
        .map(|c| ingest::parse_scalar(c.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != dim {
        return Err(CliError::Input(format!(
            "{} coordinates for dimension {dim} in degree {degree}",
            coords.len()
        )));
    }
    Ok(WElement::new(degree, coords))
}

fn cmd_mu3(
    input: &InputArgs,
    datum_args: &DatumArgs,
    elements: &[String],
    out: Option<&std::path::Path>,
) -> Result<i32, CliError> {
    let (dga, input_echo) = load_dga(input)?;
    let dga = Arc::new(dga);
    let (datum, _pkg) = resolve_datum(&dga, datum_args)?;
    let structure = AInftyStructure::new(datum, 3);
    let args = elements
        .iter()
        .map(|spec| parse_element(spec, &structure))
        .collect::<Result<Vec<_>, _>>()?;
    let mu3 = structure.mu(&args)?;
    let ambient = structure.datum().subcomplex().to_ambient(&mu3);

    // μ₁-exactness within the subcomplex: solvability of d|_W x = μ₃
    let d_w = structure.datum().d_in_w(mu3.degree - 1);
    let exact = if d_w.cols() == 0 {
        mu3.is_zero()
    } else {
        d_w.solve_linear(&mu3.coords)
            .map_err(|e| CliError::Input(e.to_string()))?
            .is_some()
    };

    let coords: Vec<String> = mu3.coords.iter().map(ingest::format_scalar).collect();
    let ambient_coords: Vec<String> = ambient.coords.iter().map(ingest::format_scalar).collect();
    let value = json!({
        "command": "mu3",
        "input": input_echo,
        "algebra_hash": ingest::dga_hash(&dga),
        "elements": elements,
        "mu3": { "degree": mu3.degree, "coords": coords },
        "mu3_ambient": ambient_coords,
        "nonzero": !mu3.is_zero(),
        "mu1_exact": exact,
    });
    emit(&value, out)?;
    eprintln!(
        "mu3 {}: degree {}, {}, {}",
        dga.name(),
        mu3.degree,
        if mu3.is_zero() { "zero" } else { "nonzero" },
        if exact { "μ₁-exact" } else { "not μ₁-exact" }
    );
    Ok(0)
}
