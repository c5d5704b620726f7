use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hsp_core::acceptance::{self, ACCEPTANCE_SEED};
use hsp_core::bruteforce;
use hsp_core::experiment::{self, format_g6};
use hsp_core::learner::{self, LearnerPlan};
use hsp_core::oracle::{random_instance, HspInstance, RahspParams};
use hsp_core::subgroup;
use hsp_core::text::{format_instance, format_subgroup, parse_instance};
use hsp_core::{bounds, rng, HspError};

/// Classical sample learner for the hidden subgroup problem.
#[derive(Parser)]
#[command(name = "hsp", version, about)]
struct Cli {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = ACCEPTANCE_SEED)]
    seed: u64,

    /// Allowed failure probability, in (0, 1/2).
    #[arg(long, global = true, default_value_t = 1.0 / 3.0)]
    delta: f64,

    /// Number of independent trials.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Output file (defaults to stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct InstanceArgs {
    /// Instance file (group, hidden subgroup and salt).
    #[arg(long, conflicts_with_all = ["gsp", "rahsp"])]
    instance: Option<PathBuf>,

    /// Generalized Simon instance `p,n,k`. Repeatable where a list is accepted.
    #[arg(long)]
    gsp: Vec<String>,

    /// rAHSP instance `p1^n1:k1,p2^n2:k2,...`. Repeatable where a list is accepted.
    #[arg(long)]
    rahsp: Vec<String>,
}

impl InstanceArgs {
    fn params(&self) -> Result<Vec<RahspParams>, HspError> {
        self.gsp
            .iter()
            .chain(&self.rahsp)
            .map(|s| s.parse())
            .collect()
    }

    fn single(&self) -> Result<RahspParams, HspError> {
        match self.params()?.as_slice() {
            [one] => Ok(one.clone()),
            [] => Err(HspError::Domain(
                "an instance is required (--gsp, --rahsp or --instance)".into(),
            )),
            _ => Err(HspError::Domain("exactly one instance is expected".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print lower/upper/theta sample-complexity bounds.
    Bounds(InstanceArgs),
    /// Run the learner on generated or file-based instances.
    Learn {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Stop once the learned subgroup reaches the promised order.
        #[arg(long)]
        early_stop: bool,
    },
    /// Run a grid of GSP instances and write one CSV row per point.
    ///
    /// Grid points are `p,n,k`; `n` may be an inclusive range `a..b`.
    Sweep(InstanceArgs),
    /// Count and list rank-k subgroups; optionally probe the exhaustive sample complexity.
    Enumerate {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Print every subgroup.
        #[arg(long)]
        list: bool,
        /// Find the fewest examples a consistent-candidate learner needs for this success rate.
        #[arg(long)]
        probe_target: Option<f64>,
        /// Largest sample size tried by the probe.
        #[arg(long, default_value_t = 256)]
        max_samples: usize,
    },
    /// Run the acceptance checks and print one PASS/FAIL line per criterion.
    Selftest {
        /// Run only these criteria (1-10).
        #[arg(long)]
        criterion: Vec<u8>,
    },
}

enum Failure {
    Error(HspError),
    ChecksFailed,
}

impl From<HspError> for Failure {
    fn from(e: HspError) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(HspError::Io(e))
    }
}

fn exit_code(e: &HspError) -> u8 {
    match e {
        HspError::Domain(_) | HspError::Structural(_) | HspError::Parse { .. } => 2,
        HspError::Capacity(_) => 3,
        HspError::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Bounds(args) => bounds_cmd(cli, args),
        Command::Learn {
            instance,
            early_stop,
        } => learn_cmd(cli, instance, *early_stop),
        Command::Sweep(args) => sweep_cmd(cli, args),
        Command::Enumerate {
            instance,
            list,
            probe_target,
            max_samples,
        } => enumerate_cmd(cli, instance, *list, *probe_target, *max_samples),
        Command::Selftest { criterion } => selftest_cmd(cli, criterion),
    }
}

fn bounds_cmd(cli: &Cli, args: &InstanceArgs) -> Result<(), Failure> {
    let params = args.params()?;
    if params.is_empty() {
        return Err(HspError::Domain("give at least one --gsp or --rahsp".into()).into());
    }
    let mut text = experiment::bounds_table(&params)?;
    text.push('\n');
    for p in &params {
        let family = p.family()?;
        let lower = bounds::lower_bound(&family)?;
        let upper = bounds::upper_bound(&family)?;
        let plan = LearnerPlan::for_family(&family, cli.delta)?;
        text.push_str(&format!(
            "{p}: general lower {} upper {}; learner plan A={} B={} iterations={} samples={}\n",
            format_g6(lower),
            format_g6(upper),
            plan.probe_size,
            plan.batch_size,
            plan.iterations,
            plan.total_samples()
        ));
    }
    emit(cli, &text)
}

fn learn_cmd(cli: &Cli, args: &InstanceArgs, early_stop: bool) -> Result<(), Failure> {
    let trials = cli.trials.unwrap_or(1);
    let file_instance = match &args.instance {
        Some(path) => Some(parse_instance(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let params = match &file_instance {
        Some(_) => None,
        None => Some(args.single()?),
    };
    let mut text = String::from("trial,success,contained,samples,learned_order,hidden_order\n");
    let mut successes = 0;
    let mut last: Option<(HspInstance, hsp_core::Subgroup)> = None;
    for t in 0..trials {
        let inst = match (&file_instance, &params) {
            (Some(inst), _) => inst.clone(),
            (None, Some(p)) => random_instance(p, &mut rng::stream(cli.seed, "inst", t))?,
            _ => unreachable!(),
        };
        let plan = LearnerPlan::for_family(inst.family(), cli.delta)?;
        let mut sampler = inst.sampler(rng::stream(cli.seed, "sample", t));
        let target = inst.hidden().order().clone();
        let outcome = learner::learn_detailed(
            &mut sampler,
            &plan,
            &mut rng::stream(cli.seed, "learn", t),
            early_stop.then_some(&target),
        )?;
        let success = &outcome.subgroup == inst.hidden();
        successes += u64::from(success);
        text.push_str(&format!(
            "{t},{success},{},{},{},{}\n",
            outcome.subgroup.is_subgroup_of(inst.hidden()),
            sampler.drawn(),
            outcome.subgroup.order(),
            inst.hidden().order()
        ));
        last = Some((inst, outcome.subgroup));
    }
    let mut summary = format!(
        "# {successes}/{trials} successes (rate {}), delta {}, seed {}\n",
        format_g6(successes as f64 / trials.max(1) as f64),
        format_g6(cli.delta),
        cli.seed
    );
    if trials == 1 {
        if let Some((inst, learned)) = last {
            summary.push_str("# instance:\n");
            for line in format_instance(&inst).lines() {
                summary.push_str(&format!("#   {line}\n"));
            }
            summary.push_str("# learned:\n");
            for line in format_subgroup(&learned).lines() {
                summary.push_str(&format!("#   {line}\n"));
            }
        }
    }
    text.push_str(&summary);
    emit(cli, &text)
}

fn expand_grid(spec: &str) -> Result<Vec<RahspParams>, HspError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if let [p, n, k] = parts.as_slice() {
        if let Some((lo, hi)) = n.split_once("..") {
            let bad = || HspError::Domain(format!("cannot parse range `{n}`"));
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            return (lo..=hi).map(|n| format!("{p},{n},{k}").parse()).collect();
        }
    }
    Ok(vec![spec.parse()?])
}

fn sweep_cmd(cli: &Cli, args: &InstanceArgs) -> Result<(), Failure> {
    if !args.rahsp.is_empty() || args.instance.is_some() {
        return Err(HspError::Domain("sweep takes --gsp grid points only".into()).into());
    }
    let mut grid = Vec::new();
    for spec in &args.gsp {
        grid.extend(expand_grid(spec).map_err(|e| match e {
            HspError::Domain(msg) => HspError::Domain(format!("grid point `{spec}`: {msg}")),
            other => other,
        })?);
    }
    let trials = cli.trials.unwrap_or(100);
    let rows = experiment::sweep(&grid, cli.delta, trials, cli.seed)?;
    let mut buf = Vec::new();
    experiment::write_csv(&rows, &mut buf)?;
    emit(cli, &String::from_utf8(buf).expect("ascii csv"))
}

fn enumerate_cmd(
    cli: &Cli,
    args: &InstanceArgs,
    list: bool,
    probe_target: Option<f64>,
    max_samples: usize,
) -> Result<(), Failure> {
    let params = args.single()?;
    let family = params.family()?;
    let mut text = String::new();
    if let Some((p, n, k)) = params.as_gsp() {
        text.push_str(&format!(
            "gaussian binomial ({p},{n},{k}) = {}\n",
            subgroup::subgroup_count(p, n, k)?
        ));
    }
    let members = family.members()?;
    text.push_str(&format!(
        "family {params}: {} members enumerated, {} by formula\n",
        members.len(),
        family.size()
    ));
    if list {
        for h in &members {
            text.push_str(&format_subgroup(h));
        }
    }
    if let Some(target) = probe_target {
        let inst = random_instance(&params, &mut rng::stream(cli.seed, "inst", 0))?;
        let trials = cli.trials.unwrap_or(200) as usize;
        let t = bruteforce::min_samples_exhaustive(
            &inst,
            &mut rng::stream(cli.seed, "probe", 0),
            target,
            trials,
            max_samples,
        )?;
        text.push_str(&format!(
            "min samples for success {} over {trials} trials: {t}\n",
            format_g6(target)
        ));
    }
    emit(cli, &text)
}

fn selftest_cmd(cli: &Cli, criteria: &[u8]) -> Result<(), Failure> {
    let ids: Vec<u8> = if criteria.is_empty() {
        acceptance::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        criteria.to_vec()
    };
    let mut all_passed = true;
    let mut text = String::new();
    for id in ids {
        let report = acceptance::run_criterion(id, cli.seed)?;
        all_passed &= report.passed;
        println!("{report}");
        text.push_str(&format!("{report}\n"));
    }
    if let Some(path) = &cli.out {
        std::fs::write(path, text)?;
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}
