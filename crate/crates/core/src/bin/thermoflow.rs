use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use log::{debug, info, LevelFilter};

use thermoflow::model::{print_fiber, print_potential, ModelFile};
use thermoflow::perturbation::{
    almost_equilibria, perturb_fiber, perturb_roof, zero_pressure_normalize, Perturbed,
};
use thermoflow::pressure::{entropy, equilibrium, integrate, pressure, topological_entropy};
use thermoflow::report::{sha256_hex, Report};
use thermoflow::suspension::{abramov_entropy, flow_entropy, flow_mme, flow_pressure, FiberPotential};
use thermoflow::verify::{run_suite, LIMITATION};
use thermoflow::{bowen, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Entropy,
    Pressure,
    Equilibrium,
    FlowEntropy,
    FlowPressure,
    Mme,
    PerturbRoof,
    PerturbFiber,
    AlmostEq,
    Verify,
}

/// Thermodynamic quantities of shifts of finite type and their suspension flows.
#[derive(Debug, Parser)]
#[command(name = "thermoflow", version)]
struct Cli {
    command: Command,
    /// Model file; required by every command except `verify`.
    model: Option<PathBuf>,
    /// Potential block name (default: first potential in the file).
    #[arg(long)]
    potential: Option<String>,
    /// Roof block name (default: first roof).
    #[arg(long)]
    roof: Option<String>,
    /// Fiber block name (default: first fiber; zero if none).
    #[arg(long)]
    fiber: Option<String>,
    /// Potential block used as the perturbation target.
    #[arg(long)]
    phi: Option<String>,
    /// Replace phi by its zero-pressure normalization P(phi) - phi first.
    #[arg(long)]
    normalize: bool,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the named results as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Entropy => "entropy",
            Command::Pressure => "pressure",
            Command::Equilibrium => "equilibrium",
            Command::FlowEntropy => "flow-entropy",
            Command::FlowPressure => "flow-pressure",
            Command::Mme => "mme",
            Command::PerturbRoof => "perturb-roof",
            Command::PerturbFiber => "perturb-fiber",
            Command::AlmostEq => "almost-eq",
            Command::Verify => "verify",
        }
    }
}

fn init_logging() {
    let level = match std::env::var("THERMOFLOW_LOG").as_deref() {
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Off,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn load(cli: &Cli) -> Result<Option<(ModelFile, String)>> {
    let Some(path) = &cli.model else {
        return Ok(None);
    };
    let bytes = std::fs::read(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Parse {
        line: 0,
        reason: "model file is not UTF-8".into(),
    })?;
    let model = ModelFile::parse(&text)?;
    info!(
        "parsed {}: {} potentials, {} roofs, {} fibers",
        path.display(),
        model.potentials.len(),
        model.roofs.len(),
        model.fibers.len()
    );
    Ok(Some((model, sha256_hex(&bytes))))
}

fn bowen_rows(report: &mut Report, prefix: &str, s: &bowen::BowenSolution) {
    report.result(prefix, s.t_star);
    report.result(format!("{prefix}_bracket_lo"), s.bracket.0);
    report.result(format!("{prefix}_bracket_hi"), s.bracket.1);
    report.residual("bowen_residual", s.residual, bowen::RESIDUAL_TOL);
}

fn run(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let digest = loaded.as_ref().map(|(_, d)| d.clone());
    let mut report = Report::new(cli.command.name(), digest, cli.seed);

    if cli.command == Command::Verify {
        let checks = run_suite(cli.seed);
        for c in &checks {
            debug!("{}::{} worst {:e}", c.module, c.name, c.worst);
            report.residual(format!("{}::{}", c.module, c.name), c.worst, c.tolerance);
        }
        report.note(LIMITATION);
        return Ok(report);
    }

    let Some((model, _)) = loaded else {
        return Err(Error::InvalidArgument(format!(
            "command '{}' needs a model file",
            cli.command.name()
        )));
    };
    let fiber = |name: Option<&str>| -> Result<FiberPotential> {
        if name.is_none() && model.fibers.is_empty() {
            return Ok(FiberPotential::zero(Arc::clone(&model.sft)));
        }
        model.fiber(name).cloned()
    };
    let phi = || -> Result<_> {
        let p = model.potential(cli.phi.as_deref())?;
        if cli.normalize {
            zero_pressure_normalize(p)
        } else {
            Ok(p.clone())
        }
    };

    match cli.command {
        Command::Entropy => {
            report.result("h_sigma", topological_entropy(&model.sft)?);
        }
        Command::Pressure => {
            let r = pressure(model.potential(cli.potential.as_deref())?)?;
            report.result("pressure", r.value);
            report.result("lambda", r.lambda);
            report.result("iterations", r.iterations as f64);
            report.residual("perron_residual", r.residual, 1e-12);
        }
        Command::Equilibrium => {
            let p = model.potential(cli.potential.as_deref())?;
            let top = pressure(p)?.value;
            let mu = equilibrium(p)?;
            let (h, integral) = (entropy(&mu), integrate(p, &mu)?);
            report.result("pressure", top);
            report.result("entropy", h);
            report.result("integral", integral);
            for (s, m) in mu.symbol_marginal().iter().enumerate() {
                report.result(format!("marginal_{}", s + 1), *m);
            }
            report.residual("variational_identity", (h + integral - top).abs(), 1e-10);
            report.residual("stationarity", mu.stationarity_defect(), 1e-9);
        }
        Command::FlowEntropy => {
            let s = flow_entropy(model.roof(cli.roof.as_deref())?)?;
            bowen_rows(&mut report, "h_flow", &s);
        }
        Command::FlowPressure => {
            let g = fiber(cli.fiber.as_deref())?;
            let s = flow_pressure(&g, model.roof(cli.roof.as_deref())?)?;
            bowen_rows(&mut report, "flow_pressure", &s);
        }
        Command::Mme => {
            let roof = model.roof(cli.roof.as_deref())?;
            let h = flow_entropy(roof)?.t_star;
            let nu = flow_mme(roof)?;
            let abramov = abramov_entropy(&nu);
            report.result("h_flow", h);
            report.result("abramov_entropy", abramov);
            report.result("mean_roof", nu.normalizer);
            for (s, m) in nu.base.symbol_marginal().iter().enumerate() {
                report.result(format!("base_marginal_{}", s + 1), *m);
            }
            report.residual("abramov_vs_bowen", (abramov - h).abs(), 1e-8);
        }
        Command::PerturbRoof => {
            let out = perturb_roof(model.roof(cli.roof.as_deref())?, &phi()?)?;
            describe(&mut report, &out);
        }
        Command::PerturbFiber => {
            let g = fiber(cli.fiber.as_deref())?;
            let out = perturb_fiber(&g, model.roof(cli.roof.as_deref())?, &phi()?, cli.epsilon)?;
            describe(&mut report, &out);
        }
        Command::AlmostEq => {
            let p = model.potential(cli.potential.as_deref())?;
            let witnesses = almost_equilibria(p, cli.epsilon, cli.count, cli.seed)?;
            report.result("pressure", pressure(p)?.value);
            for (i, w) in witnesses.iter().enumerate() {
                report.result(format!("witness_{}_entropy", i + 1), entropy(&w.measure));
                report.result(format!("witness_{}_margin", i + 1), w.margin);
                report.residual(format!("witness_{}_margin_positive", i + 1), -w.margin, 0.0);
            }
            let mut closest = f64::INFINITY;
            for (i, a) in witnesses.iter().enumerate() {
                for b in &witnesses[..i] {
                    closest = closest.min(a.measure.transition_distance(&b.measure)?);
                }
            }
            if witnesses.len() > 1 {
                report.result("min_separation", closest);
            }
        }
        Command::Verify => unreachable!("handled above"),
    }
    Ok(report)
}

fn describe(report: &mut Report, out: &thermoflow::perturbation::PerturbationReport) {
    report.result(format!("{}_before", out.preserved.name), out.preserved.before);
    report.result(format!("{}_after", out.preserved.name), out.preserved.after);
    report.result("distance", out.distance);
    for (name, v) in &out.details {
        report.result(*name, *v);
    }
    for r in &out.residuals {
        report.residual(r.name, r.achieved, r.tolerance);
    }
    let block = match &out.output {
        Perturbed::Roof(r) => print_potential("roof", "perturbed", r.as_potential()),
        Perturbed::Fiber(g) => print_fiber("perturbed", g),
    };
    for line in block.lines() {
        report.note(line);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render());
            if let Some(path) = &cli.csv {
                if let Err(e) = report.write_csv(path) {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code() as u8);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
