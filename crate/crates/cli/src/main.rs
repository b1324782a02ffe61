use std::path::PathBuf;

use clap::{Parser, Subcommand};
use lumos_baas::BaasServer;
use lumos_cli::{cmd_bench, cmd_build, cmd_report, BaasSection, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lumos", about = "Serverless runtime benchmarking harness")]
struct Cli {
    /// Experiment configuration file (JSON). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config and LUMOS_OUT.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the plan without building or running anything.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Rebuild artifacts even when cached outputs exist.
    #[arg(long, global = true)]
    force: bool,
    /// BaaS endpoint as host:port; overrides the config.
    #[arg(long, global = true)]
    baas: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the workload x mode artifact matrix and write the manifest.
    Build,
    /// Run the storage stub in the foreground until interrupted.
    ServeBaas,
    /// Execute the configured benchmark matrix.
    Bench,
    /// Render figure data files and findings.md from bench results.
    Report,
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Ok(out) = std::env::var("LUMOS_OUT") {
        config.output_dir = PathBuf::from(out);
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(baas) = &cli.baas {
        let (host, port) = baas
            .rsplit_once(':')
            .ok_or_else(|| CliError::Config(format!("--baas expects host:port, got {baas}")))?;
        let port: u16 = port
            .parse()
            .map_err(|_| CliError::Config(format!("--baas port: {port}")))?;
        let settings = config
            .baas
            .take()
            .map(|s| s.settings)
            .unwrap_or_default();
        config.baas = Some(BaasSection {
            host: host.to_string(),
            port,
            settings,
        });
    }
    config.validate()?;
    Ok(config)
}

fn serve_baas(config: &ExperimentConfig, dry_run: bool) -> Result<(), CliError> {
    let section = config
        .baas
        .as_ref()
        .ok_or_else(|| CliError::Config("serve-baas needs a baas section or --baas".into()))?;
    let settings = section
        .settings
        .validate()
        .map_err(|e| CliError::Config(format!("baas: {e}")))?;
    if dry_run {
        println!("plan: serve baas on {}:{}", section.host, section.port);
        return Ok(());
    }
    let server = BaasServer::start(section.port, settings)
        .map_err(|e| CliError::Fatal(format!("baas start: {e}")))?;
    println!("baas listening on {}", server.addr());
    loop {
        std::thread::sleep(std::time::Duration::from_secs(3600));
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = effective_config(cli)?;
    match cli.command {
        Command::Build => {
            cmd_build(&config, cli.force, cli.dry_run)?;
            Ok(())
        }
        Command::ServeBaas => serve_baas(&config, cli.dry_run),
        Command::Bench => {
            let summary = cmd_bench(&config, cli.force, cli.dry_run)?;
            if summary.failures > 0 {
                return Err(CliError::Partial(format!(
                    "{} of the attempted invocations failed",
                    summary.failures
                )));
            }
            Ok(())
        }
        Command::Report => {
            cmd_report(&config)?;
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("lumos: {e}");
        std::process::exit(e.exit_code());
    }
}
