use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcmapf::*;

/// Exact swap-forbidden multiagent path finding.
#[derive(Parser)]
#[command(name = "dcmapf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the schedule.
    Solve(SolveArgs),
    /// Check a schedule against an instance (plain or colored).
    Validate { instance: PathBuf, schedule: PathBuf },
    /// Emit an instance from a reduction or the random generator.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        #[command(flatten)]
        out: GenerateOutput,
    },
    /// Run the oracle and the fpt solver on every `.mapf` file of a directory.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STATE_GUARD)]
        guard: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Oracle,
    Clique,
    Fpt,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    algo: Algo,
    /// Stored-state limit for the searches.
    #[arg(long, default_value_t = DEFAULT_STATE_GUARD)]
    guard: usize,
    /// Schedule destination, `-` for standard output.
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// 3-Partition reduction; `--partition` takes index triples, flattened.
    ThreePartition {
        #[arg(long, num_args = 1.., required = true)]
        betas: Vec<usize>,
        #[arg(long, num_args = 1..)]
        partition: Option<Vec<usize>>,
    },
    /// Pancake flipping reduction on a one-based permutation.
    Pancake {
        #[arg(long, num_args = 1.., required = true)]
        perm: Vec<usize>,
        #[arg(long)]
        flips: usize,
        #[arg(long, num_args = 1..)]
        flip_seq: Option<Vec<usize>>,
    },
    /// Colored pancake reduction on two binary strings.
    Colored {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        flips: usize,
        #[arg(long, num_args = 1..)]
        flip_seq: Option<Vec<usize>>,
    },
    /// Connected graph with a prescribed distance to clique.
    Random {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        dc: usize,
        #[arg(long)]
        agents: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct GenerateOutput {
    /// Instance destination, `-` for standard output.
    #[arg(short, long, default_value = "-", global = true)]
    output: String,
    /// Registry sidecar; defaults to `<output>.registry` for file outputs.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Witness schedule; defaults to `<output>.schedule` for file outputs.
    #[arg(long, global = true)]
    schedule: Option<PathBuf>,
}

/// Process outcome with its exit code.
#[derive(Debug)]
enum Failure {
    Negative(String),
    Usage(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Negative(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Negative(m) | Failure::Usage(m) | Failure::Resource(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(format!("error: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(dest: &str, text: &str) -> Outcome {
    if dest == "-" {
        std::io::stdout().write_all(text.as_bytes()).map_err(usage)
    } else {
        fs::write(dest, text).map_err(|e| usage(format!("{dest}: {e}")))
    }
}

struct RunReport {
    algo: String,
    makespan: Option<usize>,
    states: usize,
    ms: u128,
    guard_hit: bool,
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let feasible = if self.guard_hit {
            "unknown"
        } else if self.makespan.is_some() {
            "yes"
        } else {
            "no"
        };
        let makespan = self.makespan.map_or("-".to_string(), |m| m.to_string());
        write!(
            f,
            "algo={} feasible={feasible} makespan={makespan} states={} ms={} guard={}",
            self.algo, self.states, self.ms, self.guard_hit
        )
    }
}

/// Runs one solver; `Err` carries a failure that is not a verdict.
fn run(inst: &Instance, algo: Algo, guard: usize) -> Result<(RunReport, Option<Schedule>), Failure> {
    let algo = match algo {
        Algo::Auto if inst.graph.is_complete() && inst.graph.n() >= 4 => Algo::Clique,
        Algo::Auto => Algo::Fpt,
        other => other,
    };
    let t = Instant::now();
    let limits = SearchLimits { cap: inst.limit.unwrap_or(usize::MAX), guard };
    let result: Result<(Option<Schedule>, usize), Failure> = match algo {
        Algo::Oracle => match optimal_schedule_with(inst, limits) {
            Ok(out) => Ok((out.schedule, out.states)),
            Err(SearchError::StateGuard(n)) => Err(Failure::Resource(format!("state guard hit after {n} states"))),
        },
        Algo::Clique => match solve_clique(inst) {
            Ok(found) => Ok((found.filter(|(m, _)| *m <= limits.cap).map(|(_, s)| s), 0)),
            Err(e) => Err(usage(e)),
        },
        Algo::Fpt | Algo::Auto => match solve_fpt_with(inst, guard) {
            Ok(out) => Ok((out.schedule, out.stats.states)),
            Err(FptError::Search(SearchError::StateGuard(n))) => {
                Err(Failure::Resource(format!("state guard hit after {n} states")))
            }
            Err(e @ FptError::Kernel(KernelError::Overflow(_))) => Err(Failure::Resource(format!("error: {e}"))),
            Err(e) => Err(Failure::Negative(format!("error: {e}"))),
        },
    };
    let ms = t.elapsed().as_millis();
    let mut report = RunReport { algo: algo.to_string(), makespan: None, states: 0, ms, guard_hit: false };
    match result {
        Ok((sched, states)) => {
            report.states = states;
            report.makespan = sched.as_ref().map(Schedule::makespan);
            Ok((report, sched))
        }
        Err(Failure::Resource(m)) => {
            report.guard_hit = true;
            eprintln!("{report}");
            Err(Failure::Resource(m))
        }
        Err(other) => Err(other),
    }
}

fn solve(args: &SolveArgs) -> Outcome {
    let inst = parse_instance(&read(&args.instance)?).map_err(usage)?;
    let (report, sched) = run(&inst, args.algo, args.guard)?;
    eprintln!("{report}");
    match sched {
        Some(s) => {
            validate_schedule(&inst, &s).map_err(|v| Failure::Negative(format!("internal error: {v}")))?;
            write(&args.output, &serialize_schedule(&s))
        }
        None => Err(Failure::Negative("infeasible".into())),
    }
}

fn validate(instance: &Path, schedule: &Path) -> Outcome {
    let text = read(instance)?;
    let sched_text = read(schedule)?;
    let colored = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')) == Some("cmapf 1");
    let verdict = if colored {
        let inst = parse_colored_instance(&text).map_err(usage)?;
        let sched = parse_schedule(&sched_text, inst.start().len(), inst.graph.n()).map_err(usage)?;
        validate_colored_schedule(&inst, &sched)
    } else {
        let inst = parse_instance(&text).map_err(usage)?;
        let sched = parse_schedule(&sched_text, inst.agents(), inst.graph.n()).map_err(usage)?;
        validate_schedule(&inst, &sched)
    };
    match verdict {
        Ok(()) => {
            eprintln!("valid");
            Ok(())
        }
        Err(v) => Err(Failure::Negative(format!("invalid: {v}"))),
    }
}

fn hardness(e: HardnessError) -> Failure {
    match e {
        HardnessError::Witness(_) => Failure::Negative(format!("error: {e}")),
        other => usage(other),
    }
}

fn sidecar(out: &GenerateOutput, explicit: &Option<PathBuf>, ext: &str) -> Option<String> {
    match explicit {
        Some(p) => Some(p.display().to_string()),
        None if out.output != "-" => Some(format!("{}.{ext}", out.output)),
        None => None,
    }
}

fn generate(kind: &GenerateKind, out: &GenerateOutput) -> Outcome {
    let (instance_text, registry, witness) = match kind {
        GenerateKind::ThreePartition { betas, partition } => {
            let tp = preprocess_three_partition(betas).map_err(hardness)?;
            let (inst, reg) = build_three_partition_instance(&tp).map_err(hardness)?;
            let witness = match partition {
                Some(flat) => {
                    if flat.len() % 3 != 0 {
                        return Err(usage("--partition needs a multiple of three indices"));
                    }
                    let triples: Vec<[usize; 3]> = flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
                    Some(three_partition_forward_schedule(&inst, &reg, &triples).map_err(hardness)?)
                }
                None => None,
            };
            (serialize_instance(&inst), Some(reg), witness)
        }
        GenerateKind::Pancake { perm, flips, flip_seq } => {
            let p = PancakeInstance { perm: perm.clone(), k: *flips };
            let (inst, reg) = build_pancake_instance(&p).map_err(hardness)?;
            let witness = match flip_seq {
                Some(seq) => Some(pancake_forward_schedule(&inst, &reg, seq).map_err(hardness)?),
                None => None,
            };
            (serialize_instance(&inst), Some(reg), witness)
        }
        GenerateKind::Colored { alpha, beta, flips, flip_seq } => {
            let (inst, reg) = build_colored_pancake_instance(alpha, beta, *flips).map_err(hardness)?;
            let witness = match flip_seq {
                Some(seq) => Some(colored_pancake_forward_schedule(&inst, &reg, seq).map_err(hardness)?),
                None => None,
            };
            (serialize_colored_instance(&inst), Some(reg), witness)
        }
        GenerateKind::Random { vertices, dc, agents, seed } => {
            let inst = random_instance(*vertices, *dc, *agents, *seed).map_err(usage)?;
            (serialize_instance(&inst), None, None)
        }
    };
    write(&out.output, &instance_text)?;
    if let (Some(reg), Some(path)) = (registry, sidecar(out, &out.registry, "registry")) {
        for flag in &reg.flags {
            eprintln!("flag {flag}");
        }
        write(&path, &reg.serialize())?;
    }
    if let (Some(s), Some(path)) = (witness, sidecar(out, &out.schedule, "schedule")) {
        eprintln!("witness makespan {}", s.makespan());
        write(&path, &serialize_schedule(&s))?;
    }
    Ok(())
}

fn bench(dir: &Path, guard: usize) -> Outcome {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| usage(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mapf"))
        .collect();
    files.sort();
    println!("instance\talgo\tfeasible\tmakespan\tstates\tms");
    let mut mismatches = 0;
    let mut guard_hits = 0;
    for path in &files {
        let inst = parse_instance(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let name = path.file_name().expect("listed file").to_string_lossy();
        let mut verdicts = Vec::new();
        for algo in [Algo::Oracle, Algo::Fpt] {
            let (feasible, makespan, states, ms) = match run(&inst, algo, guard) {
                Ok((r, _)) => {
                    verdicts.push(r.makespan);
                    let f = if r.makespan.is_some() { "yes" } else { "no" };
                    (f.to_string(), r.makespan.map_or("-".into(), |m| m.to_string()), r.states, r.ms)
                }
                Err(Failure::Resource(_)) => {
                    guard_hits += 1;
                    ("guard".into(), "-".into(), guard, 0)
                }
                Err(f) => {
                    mismatches += 1;
                    (format!("error: {}", f.message()), "-".into(), 0, 0)
                }
            };
            println!("{name}\t{algo}\t{feasible}\t{makespan}\t{states}\t{ms}");
        }
        if verdicts.len() == 2 && verdicts[0] != verdicts[1] {
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        Err(Failure::Negative(format!("{mismatches} mismatches")))
    } else if guard_hits > 0 {
        Err(Failure::Resource(format!("{guard_hits} runs hit the state guard")))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Validate { instance, schedule } => validate(instance, schedule),
        Command::Generate { kind, out } => generate(kind, out),
        Command::Bench { dir, guard } => bench(dir, *guard),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
