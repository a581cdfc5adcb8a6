use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fmtk_core::counterexample::{
    build_a, build_b, phi, phi_prenex, tau, verify_counterexample, xi, CounterexampleError, VerifyMode,
};
use fmtk_core::games::{
    check_family_certificate, separating_sentence, solve_family_game, transfer_separation_report, Certificate,
    GameConfig, GameError, GameOutcome, Winner,
};
use fmtk_core::logic::{evaluate_sentence, parse, parse_inferring_vocab};
use fmtk_core::preservation::{
    check_duality, dominating_set_sentence, find_k_cruxes, is_hereditary_over, is_k_ary_cover,
    is_k_extension_closed_over, is_k_hereditary_over, Family,
};
use fmtk_core::random::graph_vocab;
use fmtk_core::report::{join_elements, split_elements, Report};
use fmtk_core::structure::parse_structure;
use fmtk_core::{Element, Formula, Structure, Vocabulary, DEFAULT_BUDGET};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "fmtk", version, about = "Finite model theory workbench")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Limit on explored positions or checked pairs.
    #[arg(long, env = "FMT_WORKBENCH_BUDGET", default_value_t = DEFAULT_BUDGET, global = true)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sentence on a structure file.
    Eval {
        structure: PathBuf,
        /// Formula text or a built-in name (phi, phi-prenex, domset<k>, xi<1..5>).
        formula: String,
        /// Instantiates built-in formulas.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Verify the hereditary counterexample and its Duplicator strategy.
    Counterexample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Check every position (the default).
        #[arg(long, conflicts_with = "sample")]
        exhaustive: bool,
        /// Check this many seeded random positions instead.
        #[arg(long, requires = "seed")]
        sample: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write A and every B in the structure text format.
        #[arg(long, value_name = "DIR")]
        export_structures: Option<PathBuf>,
    },
    /// Solve the exists^k forall^n game of A against one or more targets.
    Game {
        a: PathBuf,
        /// With several targets the Duplicator picks one after the opening.
        #[arg(required = true)]
        b: Vec<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Write the full outcome, certificate included, as a machine report.
        #[arg(long, value_name = "FILE")]
        certificate_out: Option<PathBuf>,
    },
    /// Re-check a game certificate written by `game --certificate-out`.
    CheckCertificate {
        report: PathBuf,
        a: PathBuf,
        #[arg(required = true)]
        b: Vec<PathBuf>,
    },
    /// Separation evidence for phi(k) at (n, k).
    Transfer {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Print the model A or a non-model B in the structure text format.
    Build {
        #[arg(value_enum)]
        which: Which,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Block whose mark is removed (B only).
        #[arg(long, default_value_t = 0)]
        istar: usize,
    },
    /// Preservation checks.
    #[command(subcommand)]
    Preserve(Preserve),
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    A,
    B,
}

#[derive(Args)]
struct FormulaArg {
    /// Formula text or a built-in name (phi, phi-prenex, domset<k>, xi<1..5>).
    #[arg(long)]
    formula: String,
    /// Instantiates built-in formulas; also the crux / cover size.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct FamilyArg {
    /// `all` (with --max-size), `A<n><k>-lattice` or `B<n><k><i>-lattice`.
    #[arg(long, required_unless_present = "structures")]
    family: Option<String>,
    #[arg(long)]
    max_size: Option<usize>,
    /// An explicit list of structure files instead of a named family.
    #[arg(long, num_args = 1.., conflicts_with = "family")]
    structures: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Preserve {
    /// Is the formula preserved under induced substructures of the family?
    Hereditary {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        family: FamilyArg,
    },
    /// Does every model in the family have a crux of size at most k?
    KHereditary {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        family: FamilyArg,
    },
    /// Is every structure with a k-ary cover of models a model?
    ExtensionClosed {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        family: FamilyArg,
    },
    /// List the cruxes of size at most k of a structure.
    Crux {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Do the given element sets form a k-ary cover of the host?
    Cover {
        #[arg(long)]
        host: PathBuf,
        /// Comma-separated elements of one member; repeat per member.
        #[arg(long = "member", required = true)]
        members: Vec<String>,
        #[arg(long)]
        k: usize,
    },
    /// k-hereditary formula versus k-extension-closed negation.
    Duality {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        family: FamilyArg,
    },
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Exit(u8, anyhow::Error);

fn input<E: Into<anyhow::Error>>(e: E) -> Exit {
    Exit(EXIT_INPUT, e.into())
}

fn classify(e: anyhow::Error) -> Exit {
    let budget = e.chain().any(|c| {
        matches!(c.downcast_ref::<GameError>(), Some(GameError::BudgetExceeded { .. }))
            || matches!(
                c.downcast_ref::<CounterexampleError>(),
                Some(CounterexampleError::BudgetExceeded { .. })
            )
    });
    Exit(if budget { EXIT_BUDGET } else { EXIT_INPUT }, e)
}

struct Output {
    format: Format,
}

impl Output {
    fn emit(&self, r: &Report) {
        match self.format {
            Format::Text => print!("{}", r.to_text()),
            Format::Machine => print!("{}", r.to_machine()),
        }
    }
}

fn read_structure(path: &Path) -> Result<Structure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_structure(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Built-in formulas come with their vocabulary.
fn builtin(name: &str, k: usize) -> Result<Option<(Formula, Arc<Vocabulary>)>> {
    if name == "phi" {
        return Ok(Some((phi(k), tau())));
    }
    if name == "phi-prenex" {
        return Ok(Some((phi_prenex(k), tau())));
    }
    if let Some(rest) = name.strip_prefix("domset") {
        if let Ok(size) = rest.parse() {
            return Ok(Some((dominating_set_sentence(size), graph_vocab())));
        }
    }
    if let Some(rest) = name.strip_prefix("xi") {
        if let Ok(index) = rest.parse() {
            return Ok(Some((xi(index, k)?, tau())));
        }
    }
    Ok(None)
}

fn resolve_formula(text: &str, k: usize, vocab: Option<&Vocabulary>) -> Result<(Formula, Arc<Vocabulary>)> {
    if let Some(found) = builtin(text, k)? {
        return Ok(found);
    }
    match vocab {
        Some(v) => Ok((parse(text, v)?, Arc::new(v.clone()))),
        None => {
            let (f, v) = parse_inferring_vocab(text)?;
            Ok((f, Arc::new(v)))
        }
    }
}

fn digits(s: &str, count: usize) -> Option<Vec<usize>> {
    let ds: Vec<usize> = s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>()?;
    (ds.len() == count).then_some(ds)
}

fn resolve_family(arg: &FamilyArg, formula: &FormulaArg) -> Result<(Family, Formula)> {
    if !arg.structures.is_empty() {
        let hosts: Vec<Structure> = arg.structures.iter().map(|p| read_structure(p)).collect::<Result<_>>()?;
        let (f, _) = resolve_formula(&formula.formula, formula.k, Some(hosts[0].vocab()))?;
        return Ok((Family::explicit("files", hosts), f));
    }
    let name = arg.family.as_deref().expect("clap requires a family");
    if name == "all" {
        let size = arg.max_size.ok_or_else(|| anyhow!("--family all needs --max-size"))?;
        let (f, vocab) = resolve_formula(&formula.formula, formula.k, None)?;
        return Ok((Family::all_structures(&vocab, size)?, f));
    }
    let lattice = name
        .strip_suffix("-lattice")
        .ok_or_else(|| anyhow!("unknown family `{name}`"))?;
    let ambient = if let Some(ds) = lattice.strip_prefix('A').and_then(|r| digits(r, 2)) {
        build_a(ds[0], ds[1])?
    } else if let Some(ds) = lattice.strip_prefix('B').and_then(|r| digits(r, 3)) {
        build_b(ds[0], ds[1], ds[2])?
    } else {
        bail!("unknown family `{name}`");
    };
    let (f, _) = resolve_formula(&formula.formula, formula.k, Some(ambient.vocab()))?;
    Ok((Family::substructure_lattice(name, ambient), f))
}

fn export(dir: &Path, n: usize, k: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let a_path = dir.join(format!("A{n}{k}.struct"));
    fs::write(&a_path, build_a(n, k)?.to_text()?)?;
    written.push(a_path);
    for i in 0..=k {
        let path = dir.join(format!("B{n}{k}_{i}.struct"));
        fs::write(&path, build_b(n, k, i)?.to_text()?)?;
        written.push(path);
    }
    Ok(written)
}

fn game_summary(r: &mut Report, a: &Structure, cfg: &GameConfig, out: &GameOutcome) -> Result<()> {
    match &out.certificate {
        Some(Certificate::Spoiler { a: opening, refutations }) => {
            r.push("opening", join_elements(opening));
            r.push("refutations", refutations.len());
            r.push("separating_sentence", separating_sentence(a, cfg, out)?);
        }
        Some(Certificate::Duplicator { rows }) => {
            r.push("strategy_rows", rows.len());
            r.push("answers_elided", rows.iter().any(|row| row.answers.is_none()));
        }
        None => {}
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Exit> {
    let out = Output { format: cli.format };
    let budget = cli.budget;
    let verdict = |pass: bool| if pass { 0 } else { EXIT_FAIL };
    match cli.command {
        Command::Eval { structure, formula, k } => {
            let s = read_structure(&structure).map_err(input)?;
            let (f, _) = resolve_formula(&formula, k, Some(s.vocab())).map_err(input)?;
            let value = evaluate_sentence(&s, &f).map_err(input)?;
            match out.format {
                Format::Text => println!("{value}"),
                Format::Machine => {
                    let mut r = Report::new("eval");
                    r.push("formula", &f).push("value", value);
                    out.emit(&r);
                }
            }
            Ok(0)
        }
        Command::Counterexample {
            n,
            k,
            exhaustive: _,
            sample,
            seed,
            export_structures,
        } => {
            let mode = match (sample, seed) {
                (Some(count), Some(seed)) => VerifyMode::Sample { count, seed },
                _ => VerifyMode::Exhaustive,
            };
            let mut r = verify_counterexample(n, k, mode, budget)
                .map_err(|e| classify(e.into()))?
                .to_report();
            if let Some(dir) = export_structures {
                for path in export(&dir, n, k).map_err(input)? {
                    r.push("exported", path.display());
                }
            }
            out.emit(&r);
            Ok(verdict(r.get("verdict") == Some("pass")))
        }
        Command::Game {
            a,
            b,
            k,
            n,
            certificate_out,
        } => {
            let a_s = read_structure(&a).map_err(input)?;
            let targets: Vec<Structure> = b.iter().map(|p| read_structure(p)).collect::<Result<_>>().map_err(input)?;
            let cfg = GameConfig::new(k, n).with_budget(budget);
            let outcome = solve_family_game(&a_s, &targets, cfg).map_err(|e| classify(e.into()))?;
            let checked = check_family_certificate(&a_s, &targets, &cfg, &outcome).map_err(|e| classify(e.into()))?;
            let mut r = Report::new("game-summary");
            r.push("k", k).push("n", n).push("targets", targets.len());
            r.push("winner", outcome.winner.as_str());
            r.push("positions", outcome.positions);
            r.push("certificate_checked", checked);
            game_summary(&mut r, &a_s, &cfg, &outcome).map_err(input)?;
            if let Some(path) = certificate_out {
                fs::write(&path, outcome.to_report(&cfg).to_machine())
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(input)?;
                r.push("certificate_file", path.display());
            }
            out.emit(&r);
            if !checked {
                return Ok(EXIT_FAIL);
            }
            Ok(verdict(outcome.winner == Winner::Duplicator))
        }
        Command::CheckCertificate { report, a, b } => {
            let text = fs::read_to_string(&report)
                .with_context(|| format!("reading {}", report.display()))
                .map_err(input)?;
            let parsed = Report::parse(&text).map_err(input)?;
            let (cfg, outcome) = GameOutcome::from_report(&parsed).map_err(input)?;
            let a_s = read_structure(&a).map_err(input)?;
            let targets: Vec<Structure> = b.iter().map(|p| read_structure(p)).collect::<Result<_>>().map_err(input)?;
            let valid = check_family_certificate(&a_s, &targets, &cfg, &outcome).map_err(input)?;
            let mut r = Report::new("certificate-check");
            r.push("winner", outcome.winner.as_str()).push("valid", valid);
            out.emit(&r);
            Ok(verdict(valid))
        }
        Command::Transfer { n, k } => {
            let t = transfer_separation_report(n, k, budget).map_err(|e| classify(e.into()))?;
            out.emit(&t.to_report());
            Ok(verdict(t.holds()))
        }
        Command::Build { which, n, k, istar } => {
            let s = match which {
                Which::A => build_a(n, k),
                Which::B => build_b(n, k, istar),
            }
            .map_err(input)?;
            print!("{}", s.to_text().map_err(input)?);
            Ok(0)
        }
        Command::Preserve(p) => preserve(p, &out),
    }
}

fn preserve(p: Preserve, out: &Output) -> Result<u8, Exit> {
    let verdict = |pass: bool| if pass { 0 } else { EXIT_FAIL };
    let labelled = |mut r: Report, f: &Formula, family: &Family, k: Option<usize>| {
        let mut head = Report::new(r.kind.clone());
        head.push("formula", f).push("family", family.label());
        if let Some(k) = k {
            head.push("k", k);
        }
        head.entries.append(&mut r.entries);
        head
    };
    match p {
        Preserve::Hereditary { formula, family } => {
            let (fam, f) = resolve_family(&family, &formula).map_err(classify)?;
            let v = is_hereditary_over(&f, &fam).map_err(input)?;
            out.emit(&labelled(v.to_report(), &f, &fam, None));
            Ok(verdict(v.holds))
        }
        Preserve::KHereditary { formula, family } => {
            let (fam, f) = resolve_family(&family, &formula).map_err(classify)?;
            let v = is_k_hereditary_over(&f, &fam, formula.k).map_err(input)?;
            out.emit(&labelled(v.to_report(), &f, &fam, Some(formula.k)));
            Ok(verdict(v.holds))
        }
        Preserve::ExtensionClosed { formula, family } => {
            let (fam, f) = resolve_family(&family, &formula).map_err(classify)?;
            let v = is_k_extension_closed_over(&f, &fam, formula.k).map_err(input)?;
            out.emit(&labelled(v.to_report(), &f, &fam, Some(formula.k)));
            Ok(verdict(v.holds))
        }
        Preserve::Duality { formula, family } => {
            let (fam, f) = resolve_family(&family, &formula).map_err(classify)?;
            let v = check_duality(&f, &fam, formula.k).map_err(input)?;
            out.emit(&labelled(v.to_report(), &f, &fam, Some(formula.k)));
            Ok(verdict(v.holds))
        }
        Preserve::Crux { structure, formula } => {
            let s = read_structure(&structure).map_err(input)?;
            let (f, _) = resolve_formula(&formula.formula, formula.k, Some(s.vocab())).map_err(input)?;
            let c = find_k_cruxes(&s, &f, formula.k, None).map_err(input)?;
            let mut r = c.to_report();
            r.push("formula", &f);
            out.emit(&r);
            Ok(verdict(!c.cruxes.is_empty()))
        }
        Preserve::Cover { host, members, k } => {
            let h = read_structure(&host).map_err(input)?;
            let subs: Vec<Structure> = members
                .iter()
                .map(|m| {
                    let elems: Vec<Element> =
                        split_elements(m).ok_or_else(|| anyhow!("bad element list `{m}`"))?;
                    Ok(h.induced_substructure(&elems)?)
                })
                .collect::<Result<_>>()
                .map_err(input)?;
            let cover = is_k_ary_cover(&h, &subs, k).map_err(input)?;
            let mut r = Report::new("cover");
            r.push("k", k).push("members", subs.len()).push("cover", cover);
            out.emit(&r);
            Ok(verdict(cover))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("fmtk: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("fmtk: {e:#}");
            ExitCode::from(code)
        }
    }
}
