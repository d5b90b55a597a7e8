mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mdms_core::construction::{
    self, build_initial, default_schedule, full_inductive_plan, full_inductive_step,
    ConstructionState, EpsilonSchedule, SizeOverride,
};
use mdms_core::rational::{self, Rational};
use mdms_core::search::{exhaustive_search, randomized_search};
use mdms_core::setops::intset::{mstd_classify, IntSet};
use mdms_core::setops::SetJson;
use mdms_core::verify::{run_checks, CheckKind};
use mdms_core::{h_fold_sumset, linear_form_image, GroupSet, Limits, LinearForm, ModuleSpec};

use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "mdms", version, about = "Subtractive bases with small sumsets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest group order that may be materialized.
    #[arg(long, global = true, default_value_t = mdms_core::MAX_GROUP_CAP)]
    cap: u64,
    /// Largest number of admissible pairs that may be enumerated.
    #[arg(long, global = true, default_value_t = mdms_core::DEFAULT_PAIR_BUDGET)]
    pair_budget: u64,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    pretty: bool,
    /// Write a run manifest (arguments, input hashes, output hash, timing).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build stage 1, or extend a saved state by one stage.
    Construct(ConstructArgs),
    /// Run checks against a saved state and print certificates.
    Verify {
        #[arg(long)]
        state: PathBuf,
        /// all, subtractive-basis, level-bound, coordinate-hits, structural, pi-j-zero, projection, final
        #[arg(long, default_value = "all")]
        check: String,
    },
    /// h-fold sumset (or a linear-form image) of a set file.
    Sumset {
        #[arg(long)]
        h: Option<u32>,
        /// Coefficients of a linear form, e.g. 2,1,1 or 1,-1.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            conflicts_with = "h"
        )]
        form: Option<Vec<i64>>,
        #[arg(long)]
        set: PathBuf,
        /// Emit the result as a hex bitset instead of an element list.
        #[arg(long)]
        bitset: bool,
    },
    /// Sum and difference sets of a finite set of integers.
    Mstd {
        /// JSON array, e.g. '[0,2,3,4,7,11,12,14]'.
        #[arg(long)]
        set: String,
    },
    /// Count (or list) admissible pairs.
    Pairs {
        #[arg(long, conflicts_with_all = ["group_size", "h"])]
        state: Option<PathBuf>,
        #[arg(long, requires = "h")]
        group_size: Option<u64>,
        #[arg(long)]
        h: Option<u32>,
        /// Exact level; all levels when omitted.
        #[arg(long)]
        level: Option<usize>,
        /// Print the count (default).
        #[arg(long, conflicts_with = "list")]
        count: bool,
        /// Enumerate the pairs of --level instead of counting them.
        #[arg(long, requires = "level")]
        list: bool,
    },
    /// Search Z/pZ for subtractive bases with small h-fold sumsets.
    Search {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: u32,
        #[arg(long, conflicts_with = "random")]
        exhaustive: bool,
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        iters: u64,
        /// Report whether the best density is below this value (p/q).
        #[arg(long)]
        epsilon: Option<String>,
    },
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// Extend this state by one stage instead of building stage 1.
    #[arg(long, conflicts_with_all = ["h", "epsilon", "levels", "modules", "force_size"])]
    state: Option<PathBuf>,
    #[arg(long, required_unless_present = "state")]
    h: Option<u32>,
    /// Target density, as p/q.
    #[arg(long, required_unless_present = "state")]
    epsilon: Option<String>,
    /// Explicit ε_1, ..., ε_h (comma separated, p/q); default k·ε/(h+1).
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<String>>,
    /// Stage-1 modules, each `m` (Z/m) or `p^d` (F_p^d); must clear the size bound.
    #[arg(long, value_delimiter = ',', conflicts_with = "force_size")]
    modules: Option<Vec<String>>,
    /// Stage-1 modules accepted below the size bound (the state is tainted).
    #[arg(long, value_delimiter = ',')]
    force_size: Option<Vec<String>>,
    /// Extend by every admissible pair (refused when the group exceeds --cap).
    #[arg(long, conflicts_with = "pairs")]
    full_inductive: bool,
    /// Extend by this many seeded-random pairs (restricted stage).
    #[arg(long)]
    pairs: Option<usize>,
    /// Module for each new pair in a restricted stage (default: bound-clearing prime).
    #[arg(long, requires = "pairs")]
    module_size: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let g = &cli.global;
    if let Some(t) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let limits = Limits::new(g.cap, g.pair_budget)?;
    let start = Instant::now();
    let mut inputs: Vec<PathBuf> = Vec::new();
    let (output, code) = dispatch(&cli.command, &limits, g.pretty, &mut inputs)?;
    let mut text = output;
    text.push('\n');
    match &g.output {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    if let Some(path) = &g.manifest {
        let m = RunManifest::new(
            &inputs,
            text.as_bytes(),
            start.elapsed(),
            rayon::current_num_threads(),
        )?;
        fs::write(path, serde_json::to_string_pretty(&m)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(code)
}

fn to_json<T: Serialize>(value: &T, pretty: bool) -> anyhow::Result<String> {
    Ok(if pretty {
        serde_json::to_string_pretty(value)?
    } else {
        serde_json::to_string(value)?
    })
}

fn read_input(path: &Path, inputs: &mut Vec<PathBuf>) -> anyhow::Result<String> {
    inputs.push(path.to_path_buf());
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_state(path: &Path, inputs: &mut Vec<PathBuf>) -> anyhow::Result<ConstructionState> {
    let text = read_input(path, inputs)?;
    serde_json::from_str(&text).with_context(|| format!("parsing state {}", path.display()))
}

fn parse_rational(s: &str) -> anyhow::Result<Rational> {
    Ok(rational::parse(s.trim())?)
}

fn parse_module(s: &str) -> anyhow::Result<ModuleSpec> {
    let s = s.trim();
    let parsed = match s.split_once('^') {
        Some((p, d)) => ModuleSpec::VectorSpace {
            p: p.parse()?,
            dim: d.parse()?,
        },
        None => ModuleSpec::Cyclic(s.parse()?),
    };
    Ok(parsed)
}

fn parse_modules(list: &[String]) -> anyhow::Result<Vec<ModuleSpec>> {
    list.iter()
        .map(|s| parse_module(s).with_context(|| format!("bad module {s:?}")))
        .collect()
}

fn dispatch(
    command: &Command,
    limits: &Limits,
    pretty: bool,
    inputs: &mut Vec<PathBuf>,
) -> anyhow::Result<(String, u8)> {
    match command {
        Command::Construct(args) => {
            let state = construct(args, limits, inputs)?;
            for w in state.warnings() {
                eprintln!("warning: {w}");
            }
            Ok((to_json(&state, pretty)?, 0))
        }
        Command::Verify { state, check } => {
            let kind: CheckKind = check.parse()?;
            let state = load_state(state, inputs)?;
            let (certs, skipped) = run_checks(&state, kind, limits)?;
            for s in &skipped {
                eprintln!("skipped {}: {}", s.check, s.reason);
            }
            for c in &certs {
                eprintln!("{:?}: {:?}", c.claim, c.status());
            }
            let code = if certs.iter().any(|c| c.is_untainted_fail()) {
                1
            } else {
                0
            };
            Ok((to_json(&certs, pretty)?, code))
        }
        Command::Sumset {
            h,
            form,
            set,
            bitset,
        } => {
            let text = read_input(set, inputs)?;
            let json: SetJson = serde_json::from_str(&text).context("parsing set file")?;
            let a = GroupSet::from_json(json, limits)?;
            let result = match (h, form) {
                (Some(h), None) => h_fold_sumset(&a, *h)?,
                (None, Some(coeffs)) => linear_form_image(&LinearForm::new(coeffs.clone())?, &a)?,
                _ => bail!("give exactly one of --h or --form"),
            };
            Ok((to_json(&result.to_json(!bitset), pretty)?, 0))
        }
        Command::Mstd { set } => {
            let values: Vec<i64> =
                serde_json::from_str(set).context("--set must be a JSON array of integers")?;
            let report = mstd_classify(&IntSet::new(values))?;
            Ok((to_json(&report, pretty)?, 0))
        }
        Command::Pairs {
            state,
            group_size,
            h,
            level,
            list,
            ..
        } => {
            let (n, h) = match (state, group_size, h) {
                (Some(path), _, _) => {
                    let s = load_state(path, inputs)?;
                    (s.spec().total_size(), s.h())
                }
                (None, Some(n), Some(h)) => (*n, *h),
                _ => bail!("give --state or both --group-size and --h"),
            };
            if *list {
                let level = level.expect("clap requires --level");
                let pairs: Vec<_> =
                    construction::enumerate_admissible_pairs(n, h, level, limits)?.collect();
                return Ok((to_json(&pairs, pretty)?, 0));
            }
            let count = construction::count_admissible_pairs(n, h, *level);
            let out = serde_json::json!({
                "group_size": n,
                "h": h,
                "level": level,
                "count": count.to_string(),
            });
            Ok((to_json(&out, pretty)?, 0))
        }
        Command::Search {
            p,
            h,
            exhaustive,
            random,
            seed,
            iters,
            epsilon,
        } => {
            let eps = epsilon.as_deref().map(parse_rational).transpose()?;
            let mut report = match (exhaustive, random) {
                (_, true) => randomized_search(*p, *h, eps.as_ref(), *seed, *iters)?,
                _ => exhaustive_search(*p, *h)?,
            };
            if report.meets_epsilon.is_none() {
                report.meets_epsilon = eps.map(|e| report.best_density < e);
            }
            eprintln!("search took {:.3}s", report.wall_time.as_secs_f64());
            Ok((to_json(&report, pretty)?, 0))
        }
    }
}

fn construct(
    args: &ConstructArgs,
    limits: &Limits,
    inputs: &mut Vec<PathBuf>,
) -> anyhow::Result<ConstructionState> {
    let state = match &args.state {
        Some(path) => load_state(path, inputs)?,
        None => {
            let h = args.h.ok_or_else(|| anyhow!("--h is required"))?;
            let eps = parse_rational(
                args.epsilon
                    .as_deref()
                    .ok_or_else(|| anyhow!("--epsilon is required"))?,
            )?;
            let schedule = match &args.levels {
                Some(levels) => EpsilonSchedule::new(
                    eps,
                    levels
                        .iter()
                        .map(|s| parse_rational(s))
                        .collect::<anyhow::Result<_>>()?,
                )?,
                None => default_schedule(h, &eps)?,
            };
            let size_override = match (&args.modules, &args.force_size) {
                (Some(m), _) => Some(SizeOverride {
                    modules: parse_modules(m)?,
                    force: false,
                }),
                (None, Some(m)) => Some(SizeOverride {
                    modules: parse_modules(m)?,
                    force: true,
                }),
                (None, None) => None,
            };
            build_initial(h, &schedule, size_override)?
        }
    };
    if args.full_inductive {
        let plan = full_inductive_plan(&state, limits)?;
        eprintln!(
            "plan: n = {} pairs of level {}, module size {} (bound {}), |W_{}| = {}",
            plan.pair_count,
            plan.from_stage + 1,
            plan.module_size,
            rational::format(&plan.required_bound),
            plan.from_stage + 1,
            plan.next_size
        );
        return Ok(full_inductive_step(&state, limits)?);
    }
    if let Some(count) = args.pairs {
        let module = args.module_size.as_deref().map(parse_module).transpose()?;
        return Ok(construction::sampled_inductive_step(
            &state, count, module, args.seed, limits,
        )?);
    }
    Ok(state)
}
