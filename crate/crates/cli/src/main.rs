//! `rumple`: verify, enumerate and construct finite rumples.
//!
//! Exit codes: 0 when the answer is affirmative, 1 when the input is valid but
//! the answer is negative, 2 when the input or the invocation is invalid.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use rumple::affine::{self, AbelianGroup, AffineDatum, Endomorphism};
use rumple::extensions::{self, ExtensionDatum};
use rumple::io::{format_mag, parse_magma_any, write_atomic};
use rumple::permgroup::{dis, dis_minus, dis_plus, lmlt};
use rumple::search::{self, SearchConfig};
use rumple::yangbaxter::{rumple_to_solution, solution_to_rumple};
use rumple::{Error, Magma, SetSolution};

#[derive(Parser)]
#[command(name = "rumple", version, about = "Finite rumples: verification, enumeration, constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every predicate on a table and report.
    Verify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate rumples of one order up to isomorphism.
    Enumerate(EnumerateArgs),
    #[command(subcommand)]
    Affine(AffineCommand),
    /// Recover an affine datum from an affine latin rumple.
    Affinize {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Extend(ExtendCommand),
    /// The dual rumple `x∗y = (x\y²)^{1/2}`.
    Dual {
        file: PathBuf,
        #[command(flatten)]
        output: TableOutput,
    },
    /// The table with its factors swapped.
    Opposite {
        file: PathBuf,
        #[command(flatten)]
        output: TableOutput,
    },
    #[command(subcommand)]
    Yb(YbCommand),
    /// The principal loop isotope `x∘y = (x/e)(f\y)`.
    Isotope {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        e: usize,
        #[arg(long, default_value_t = 0)]
        f: usize,
        #[command(flatten)]
        output: TableOutput,
    },
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    order: usize,
    #[arg(long)]
    latin: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    count_only: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Args)]
struct TableOutput {
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit `{"order", "table"}` instead of `.mag` text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum AffineCommand {
    /// All affine latin rumples over a group, up to isomorphism.
    Enumerate {
        /// Cyclic factors, e.g. `2,2`.
        #[arg(long)]
        group: String,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = affine::DEFAULT_GROUP_BOUND)]
        bound: usize,
    },
    /// Build the table of a datum and test the latin rumple axioms.
    Check {
        datum: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Search for a conjugating automorphism between two data.
    Isomorphic { first: PathBuf, second: PathBuf },
}

#[derive(Subcommand)]
enum ExtendCommand {
    /// The Klein-group extension of an affine latin rumple.
    Klein {
        base: PathBuf,
        /// Write the extension table here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A basis of the cocycle space over an elementary abelian group.
    Solve(CocycleArgs),
    /// Scan the cocycle space for extensions with notable displacement groups.
    SearchWitness {
        #[command(flatten)]
        args: CocycleArgs,
        #[arg(long, default_value_t = 1 << 16)]
        cap: usize,
    },
}

#[derive(Args)]
struct CocycleArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    base: PathBuf,
    /// Rows separated by `;`, entries by `,`.
    #[arg(long)]
    phi: String,
    #[arg(long)]
    psi: String,
}

#[derive(Subcommand)]
enum YbCommand {
    /// Test a solution `{"n","r1","r2"}` for (YB), involutivity and nondegeneracy.
    Check { solution: PathBuf },
    /// The solution associated with a rumple.
    From {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The rumple associated with a left nondegenerate solution.
    To {
        solution: PathBuf,
        #[command(flatten)]
        output: TableOutput,
    },
}

enum Outcome {
    Yes,
    No,
}

enum Failure {
    Usage(String),
    Negative(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Io(_)
            | Error::DimensionMismatch { .. }
            | Error::EntryOutOfRange { .. }
            | Error::IncompatibleMatrix(_)
            | Error::InvalidExtension(_)
            | Error::CharMismatch { .. }
            | Error::BoundExceeded(_)
            | Error::DegreeMismatch(..)
            | Error::NotAPermutation(_) => Failure::Usage(e.to_string()),
            _ => Failure::Negative(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(Failure::Negative(msg)) => {
            eprintln!("rumple: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("rumple: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Verify { file, json } => verify(&read_magma(&file)?, json),
        Command::Enumerate(args) => enumerate(args),
        Command::Affine(c) => affine_cmd(c),
        Command::Affinize { file, out } => {
            let x = read_magma(&file)?;
            if !x.is_latin_rumple() {
                return Err(Failure::Negative(Error::NotLatinRumple.to_string()));
            }
            match affine::affinize(&x)? {
                Some(d) => {
                    emit(out.as_deref(), &(to_json(&d) + "\n"))?;
                    Ok(Outcome::Yes)
                }
                None => {
                    eprintln!("not affine");
                    Ok(Outcome::No)
                }
            }
        }
        Command::Extend(c) => extend_cmd(c),
        Command::Dual { file, output } => {
            let d = read_magma(&file)?.dual_rumple()?;
            write_table(&d, &output)
        }
        Command::Opposite { file, output } => write_table(&read_magma(&file)?.opposite(), &output),
        Command::Yb(c) => yb_cmd(c),
        Command::Isotope { file, e, f, output } => {
            let x = read_magma(&file)?;
            if e >= x.order() || f >= x.order() {
                return Err(Failure::Usage(format!("e and f must lie in 0..{}", x.order())));
            }
            write_table(&x.principal_loop_isotope(e, f)?, &output)
        }
    }
}

#[derive(Serialize)]
struct Report {
    order: usize,
    left_quasigroup: bool,
    quasigroup: bool,
    left_rump: bool,
    right_rump: bool,
    uniquely_2_divisible: bool,
    rack: bool,
    quandle: bool,
    two_reductive: bool,
    delta_bijective: bool,
    rumple: bool,
    latin: bool,
    both_sided: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    yb_round_trip: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    biquandle: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lmlt: Option<rumple::permgroup::GroupSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dis: Option<rumple::permgroup::GroupSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dis_sides_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    affine: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group_isotopic: Option<bool>,
}

fn verify(x: &Magma, json: bool) -> CmdResult {
    let lq = x.is_left_quasigroup();
    let rumple = x.is_rumple();
    let latin = x.is_latin_rumple();
    let mut report = Report {
        order: x.order(),
        left_quasigroup: lq,
        quasigroup: x.is_quasigroup(),
        left_rump: x.satisfies_left_rump(),
        right_rump: x.satisfies_right_rump(),
        uniquely_2_divisible: x.is_uniquely_2_divisible(),
        rack: x.is_rack(),
        quandle: x.is_quandle(),
        two_reductive: x.is_2_reductive(),
        delta_bijective: lq && x.is_delta_bijective(),
        rumple,
        latin,
        both_sided: x.is_both_sided_rumple(),
        yb_round_trip: None,
        biquandle: None,
        lmlt: None,
        dis: None,
        dis_sides_agree: None,
        affine: None,
        group_isotopic: None,
    };
    if rumple {
        let s = rumple_to_solution(x)?;
        report.yb_round_trip = Some(solution_to_rumple(&s)? == *x);
        report.biquandle = Some(s.biquandle_witness()?.is_some());
    }
    if lq {
        report.lmlt = Some(lmlt(x)?.summary());
        let d = dis(x)?;
        report.dis_sides_agree = Some(dis_plus(x)?.same_elements(&d) && dis_minus(x)?.same_elements(&d));
        report.dis = Some(d.summary());
    }
    if latin {
        report.affine = Some(affine::is_affine(x)?);
        report.group_isotopic = Some(affine::is_group_isotopic(x)?);
    }
    if json {
        println!("{}", to_json(&report));
    } else {
        let v = serde_json::to_value(&report).expect("report serializes");
        for (k, v) in v.as_object().expect("report is an object") {
            println!("{k}: {v}");
        }
    }
    Ok(if rumple { Outcome::Yes } else { Outcome::No })
}

#[derive(Serialize)]
struct ClassRecord {
    order: usize,
    table: Vec<Vec<usize>>,
    latin: bool,
    affine: bool,
}

fn enumerate(args: EnumerateArgs) -> CmdResult {
    let mut cfg = SearchConfig::new(args.order)
        .latin(args.latin)
        .workers(args.workers)
        .with_env_cap()?;
    cfg.count_only = args.count_only;
    cfg.checkpoint = args.checkpoint;
    let outcome = search::enumerate_rumples(&cfg)?;
    if args.count_only {
        let line = if args.json {
            to_json(&json!({
                "order": args.order,
                "latin": args.latin,
                "count": outcome.count,
                "nodes": outcome.nodes,
            }))
        } else {
            outcome.count.to_string()
        };
        emit(args.out.as_deref(), &(line + "\n"))?;
        return Ok(Outcome::Yes);
    }
    let mut text = String::new();
    for m in &outcome.classes {
        let latin = m.is_latin_rumple();
        let affine = latin && affine::is_affine(m)?;
        text.push_str(&to_json(&ClassRecord {
            order: m.order(),
            table: m.rows(),
            latin,
            affine,
        }));
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)?;
    Ok(Outcome::Yes)
}

fn affine_cmd(c: AffineCommand) -> CmdResult {
    match c {
        AffineCommand::Enumerate {
            group,
            count_only,
            json,
            out,
            bound,
        } => {
            let g = AbelianGroup::new(parse_factors(&group)?)?;
            let data = affine::enumerate_affine_latin(&g, bound)?;
            let text = if count_only && json {
                to_json(&json!({"factors": g.factors(), "count": data.len()})) + "\n"
            } else if count_only {
                format!("{}\n", data.len())
            } else {
                data.iter().map(|d| to_json(d) + "\n").collect()
            };
            emit(out.as_deref(), &text)?;
            Ok(Outcome::Yes)
        }
        AffineCommand::Check { datum, json } => {
            let d: AffineDatum = read_json(&datum)?;
            let d = AffineDatum::new(d.group, d.phi, d.psi, d.c)?;
            let m = affine::aff_to_magma(&d);
            let flags = d.flags();
            let rump = affine::rump_condition(&d.group, &d.phi, &d.psi)?;
            let latin = m.is_latin_rumple();
            let report = json!({
                "rump_condition": rump,
                "phi_automorphism": flags.phi_automorphism,
                "psi_automorphism": flags.psi_automorphism,
                "rumple": m.is_rumple(),
                "latin": latin,
            });
            if json {
                println!("{}", to_json(&json!({"report": report, "order": m.order(), "table": m.rows()})));
            } else {
                println!("{}", to_json(&report));
                print!("{}", format_mag(&m));
            }
            Ok(if latin { Outcome::Yes } else { Outcome::No })
        }
        AffineCommand::Isomorphic { first, second } => {
            let d1: AffineDatum = read_json(&first)?;
            let d2: AffineDatum = read_json(&second)?;
            match affine::drapal_isomorphic(&d1, &d2)? {
                Some(w) => {
                    println!("{}", to_json(&w));
                    Ok(Outcome::Yes)
                }
                None => {
                    println!("null");
                    Ok(Outcome::No)
                }
            }
        }
    }
}

fn extend_cmd(c: ExtendCommand) -> CmdResult {
    match c {
        ExtendCommand::Klein { base, out } => {
            let f = read_magma(&base)?;
            let e = extensions::klein_extension(&f)?;
            let m = extensions::ext_to_magma(&e)?;
            println!("{}", to_json(&e));
            if let Some(path) = out {
                write_atomic(&path, format_mag(&m).as_bytes())?;
            }
            Ok(Outcome::Yes)
        }
        ExtendCommand::Solve(args) => {
            let (g, base, phi, psi) = cocycle_inputs(&args)?;
            let basis = extensions::solve_cocycles(&g, &base, &phi, &psi)?;
            println!("{}", to_json(&json!({"dimension": basis.len(), "basis": basis})));
            Ok(Outcome::Yes)
        }
        ExtendCommand::SearchWitness { args, cap } => {
            let (g, base, phi, psi) = cocycle_inputs(&args)?;
            let report = extensions::search_witness(&g, &base, &phi, &psi, cap)?;
            println!("{}", to_json(&report));
            let found = report.nonabelian_dis.is_some()
                || report.abelian_dis_not_normal.is_some()
                || report.right_rump_not_group_isotopic.is_some()
                || report.dis_not_nilpotent.is_some();
            Ok(if found { Outcome::Yes } else { Outcome::No })
        }
    }
}

fn cocycle_inputs(args: &CocycleArgs) -> Result<(AbelianGroup, Magma, Endomorphism, Endomorphism), Failure> {
    let g = AbelianGroup::new(parse_factors(&args.group)?)?;
    let base = read_magma(&args.base)?;
    let phi = Endomorphism::new(&g, &parse_matrix(&args.phi)?)?;
    let psi = Endomorphism::new(&g, &parse_matrix(&args.psi)?)?;
    // validates the base and the pair before any solving
    ExtensionDatum {
        group: g.clone(),
        base: base.clone(),
        phi: phi.clone(),
        psi: psi.clone(),
        theta: extensions::Cocycle::zero(&g, base.order()),
    }
    .validate()?;
    Ok((g, base, phi, psi))
}

fn yb_cmd(c: YbCommand) -> CmdResult {
    match c {
        YbCommand::Check { solution } => {
            let s: SetSolution = read_json(&solution)?;
            let s = SetSolution::new(s.n, s.r1, s.r2)?;
            let yb = s.satisfies_yb();
            let involutive = s.is_involutive();
            let nondegenerate = s.is_nondegenerate();
            println!(
                "{}",
                to_json(&json!({"yb": yb, "involutive": involutive, "nondegenerate": nondegenerate}))
            );
            Ok(if yb && involutive && nondegenerate {
                Outcome::Yes
            } else {
                Outcome::No
            })
        }
        YbCommand::From { file, out } => {
            let s = rumple_to_solution(&read_magma(&file)?)?;
            emit(out.as_deref(), &(to_json(&s) + "\n"))?;
            Ok(Outcome::Yes)
        }
        YbCommand::To { solution, output } => {
            let s: SetSolution = read_json(&solution)?;
            let s = SetSolution::new(s.n, s.r1, s.r2)?;
            write_table(&solution_to_rumple(&s)?, &output)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_magma(path: &Path) -> Result<Magma, Failure> {
    parse_magma_any(&read_text(path)?).map_err(|e| usage(path.display(), e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_text(path)?).map_err(|e| usage(path.display(), e))
}

fn usage(ctx: impl Display, e: impl Display) -> Failure {
    Failure::Usage(format!("{ctx}: {e}"))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("values serialize")
}

/// Prints to stdout, or writes atomically when a path is given.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => Ok(write_atomic(path, text.as_bytes())?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_table(m: &Magma, output: &TableOutput) -> CmdResult {
    let text = if output.json {
        to_json(m) + "\n"
    } else {
        format_mag(m)
    };
    emit(output.out.as_deref(), &text)?;
    Ok(Outcome::Yes)
}

fn parse_factors(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|w| w.trim().parse::<usize>().map_err(|e| usage(format!("--group {w:?}"), e)))
        .collect()
}

/// Rows separated by `;`, entries by `,`.
fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>, Failure> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|w| w.trim().parse::<i64>().map_err(|e| usage(format!("matrix entry {w:?}"), e)))
                .collect()
        })
        .collect()
}
