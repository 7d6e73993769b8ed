//! Command-line driver for the tabular coupled-attack experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use coupled_games::experiments::{
    run_attack, run_bound_certification, run_budget_grid, run_rps_benchmark, run_timescale_study, Check,
    ExperimentConfig, ExperimentKind, SEED_ENV,
};
use coupled_games::game::{validate_game, MarkovGame, Policy};

#[derive(Parser)]
#[command(name = "coupled-games", version, about = "Exact tabular experiments for budget-constrained adversarial policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment config; `-` or omitted for all defaults.
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set schedule.iterations=500`. Repeatable.
    #[arg(long = "set", value_name = "KEY.PATH=VALUE")]
    overrides: Vec<String>,
    /// Shorthand for `--set output_dir=...`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file against the model invariants.
    Validate { game: PathBuf },
    /// All baselines and two-timescale runs on one game.
    RpsBenchmark(ConfigArgs),
    /// Paired κ comparisons over a seed list.
    TimescaleStudy(ConfigArgs),
    /// Defense-budget by attack-budget score grid.
    BudgetGrid(ConfigArgs),
    /// Certify the discrepancy bounds and gradient probes on random games.
    CertifyBounds(ConfigArgs),
    /// Optimal budgeted attack on a fixed victim policy.
    Attack {
        #[command(flatten)]
        args: ConfigArgs,
        /// Victim policy file; overrides `victim_policy` in the config.
        #[arg(long)]
        victim: Option<PathBuf>,
    },
}

fn load_config(args: &ConfigArgs, kind: ExperimentKind) -> Result<ExperimentConfig> {
    let text = match &args.config {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?
        }
        _ => String::new(),
    };
    let mut overrides = Vec::new();
    for o in &args.overrides {
        let Some((k, v)) = o.split_once('=') else { bail!("override `{o}` is not KEY.PATH=VALUE") };
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(dir) = &args.output_dir {
        overrides.push(("output_dir".into(), serde_json::Value::String(dir.display().to_string()).to_string()));
    }
    let mut cfg = ExperimentConfig::from_json_with_overrides(&text, &overrides)?;
    cfg.experiment = kind;
    cfg.apply_seed_env()?;
    Ok(cfg)
}

fn save_config(cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    std::fs::write(cfg.output_dir.join("config.json"), cfg.to_json())?;
    Ok(())
}

fn report(checks: &[Check]) -> bool {
    for c in checks {
        let status = match (c.pass, c.required) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "NOTE",
        };
        println!("{status} {} {}", c.name, c.detail);
    }
    Check::all_required_pass(checks)
}

fn validate(path: &Path) -> Result<bool> {
    let g = MarkovGame::load(path)?;
    let violations = validate_game(&g);
    println!(
        "{}: {} states, {} victim actions, {} attacker actions, gamma {}",
        path.display(),
        g.n_states(),
        g.n_actions_victim(),
        g.n_actions_attacker(),
        g.gamma()
    );
    for v in &violations {
        println!("FAIL {v}");
    }
    if violations.is_empty() {
        println!("PASS valid game");
    }
    Ok(violations.is_empty())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { game } => validate(&game),
        Command::RpsBenchmark(args) => {
            let cfg = load_config(&args, ExperimentKind::RpsBenchmark)?;
            save_config(&cfg)?;
            let b = run_rps_benchmark(&cfg)?;
            b.write(&cfg.output_dir)?;
            for s in &b.summaries {
                println!(
                    "{:<18} final {:.6} average {:.6} best {:.6} tail_mean {:.6} (raw)",
                    s.label, s.final_expl_raw, s.average_expl_raw, s.best_expl_raw, s.tail_mean_expl_raw
                );
            }
            Ok(report(&b.checks(cfg.delta)))
        }
        Command::TimescaleStudy(args) => {
            let cfg = load_config(&args, ExperimentKind::TimescaleStudy)?;
            save_config(&cfg)?;
            let s = run_timescale_study(&cfg)?;
            s.write(&cfg.output_dir)?;
            Ok(report(&s.checks()))
        }
        Command::BudgetGrid(args) => {
            let cfg = load_config(&args, ExperimentKind::BudgetGrid)?;
            save_config(&cfg)?;
            let g = run_budget_grid(&cfg)?;
            g.write(&cfg.output_dir)?;
            let failed: Vec<Check> = g.checks.iter().filter(|c| !c.pass).cloned().collect();
            println!("{} checks, {} not passing", g.checks.len(), failed.len());
            report(&failed);
            Ok(g.all_required_pass())
        }
        Command::CertifyBounds(args) => {
            let cfg = load_config(&args, ExperimentKind::CertifyBounds)?;
            save_config(&cfg)?;
            let c = run_bound_certification(&cfg)?;
            c.write(&cfg.output_dir)?;
            for (bound, n, failed) in c.tally() {
                let status = if failed == 0 { "PASS" } else { "FAIL" };
                println!("{status} {bound} {n} checked, {failed} failed");
            }
            for f in c.failures().iter().take(20) {
                println!("  {} seed={:?} eps={} lhs={} rhs={} {}", f.bound, f.instance.game_seed, f.instance.eps, f.lhs, f.rhs, f.instance.detail);
            }
            Ok(c.all_pass())
        }
        Command::Attack { args, victim } => {
            let mut cfg = load_config(&args, ExperimentKind::Attack)?;
            if victim.is_some() {
                cfg.victim_policy = victim;
            }
            let Some(path) = cfg.victim_policy.clone() else { bail!("attack needs --victim or victim_policy") };
            save_config(&cfg)?;
            let pol = Policy::load(&path).with_context(|| format!("reading victim policy {}", path.display()))?;
            let r = run_attack(&cfg, &pol)?;
            r.write(&cfg.output_dir)?;
            for row in &r.rows {
                println!(
                    "eps {} attacked value {} (raw {}) benign value {} tv_max {} visitation shift {}",
                    row.eps, row.attacked_value, row.attacked_value_raw, row.benign_value, row.tv_max, row.visitation_l1_shift
                );
                for c in row.checks.iter().filter(|c| !c.pass) {
                    println!("FAIL {} lhs={} rhs={}", c.bound, c.lhs, c.rhs);
                }
            }
            Ok(r.all_pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if std::env::var(SEED_ENV).is_ok() {
                eprintln!("({SEED_ENV} is set)");
            }
            ExitCode::from(2)
        }
    }
}
