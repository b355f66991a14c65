use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use koopman_lin::experiments::{
    lookup, plot_svg, run_comparison, run_order_sweep, run_radius_sweep, write_csv,
    ExperimentConfig, Method, RadiusSweepConfig, SweepResult, DEFAULT_SAMPLES, DEFAULT_TAYLOR_ORDER,
};
use koopman_lin::{models, Error};

#[derive(Parser)]
#[command(name = "koopman-lin", version, about = "Koopman and Carleman linearization of nonlinear ODEs")]
struct Cli {
    /// Reserved; all runs are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Also write a log-scale SVG plot of error against the swept parameter.
    #[arg(long, global = true, value_name = "PATH")]
    plot: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    model: String,

    #[arg(long, value_name = "PATH")]
    out: PathBuf,

    /// Final time; model default when omitted.
    #[arg(long)]
    horizon: Option<f64>,

    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the available models and their defaults.
    ListModels,

    /// One run of one method.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        radius: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_TAYLOR_ORDER)]
        taylor_order: usize,
    },

    /// Error against truncation order.
    SweepOrder {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        method: Method,
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        radius: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_TAYLOR_ORDER)]
        taylor_order: usize,
    },

    /// Koopman error against the grid radius along one axis (1-based).
    SweepRadius {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        axis: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
    },

    /// Koopman and Carleman side by side at one order.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_TAYLOR_ORDER)]
        taylor_order: usize,
    },
}

fn list_models() {
    println!("name\tdim\tx0\thorizon\tradius\torder\tclosed_form\tpolynomial");
    for m in models::catalog() {
        let d = m.defaults();
        println!(
            "{}\t{}\t{:?}\t{}\t{:?}\t{}\t{}\t{}",
            m.name(),
            m.dim(),
            d.x0,
            d.horizon,
            d.radius,
            d.order,
            m.has_closed_form(),
            m.is_polynomial()
        );
    }
}

fn run(cli: &Cli) -> Result<Option<(SweepResult, PathBuf)>, Error> {
    let result = match &cli.command {
        Command::ListModels => {
            list_models();
            return Ok(None);
        }
        Command::Solve { common, method, order, radius, taylor_order } => {
            let model = lookup(&common.model)?;
            let order = order.unwrap_or(model.defaults().order);
            let mut config = ExperimentConfig::new(&common.model, *method, vec![order]);
            config.radius = radius.clone();
            config.taylor_order = *taylor_order;
            config.horizon = common.horizon;
            config.samples = common.samples;
            (run_order_sweep(&config)?, common.out.clone())
        }
        Command::SweepOrder { common, method, orders, radius, taylor_order } => {
            let mut config = ExperimentConfig::new(&common.model, *method, orders.clone());
            config.radius = radius.clone();
            config.taylor_order = *taylor_order;
            config.horizon = common.horizon;
            config.samples = common.samples;
            (run_order_sweep(&config)?, common.out.clone())
        }
        Command::SweepRadius { common, order, axis, radii } => {
            if *axis == 0 {
                return Err(Error::InvalidArgument("--axis is 1-based".into()));
            }
            let mut config = RadiusSweepConfig::new(&common.model, *order, axis - 1, radii.clone());
            config.horizon = common.horizon;
            config.samples = common.samples;
            (run_radius_sweep(&config)?, common.out.clone())
        }
        Command::Compare { common, order, taylor_order } => {
            let cmp = run_comparison(&common.model, *order, *taylor_order, common.horizon, common.samples)?;
            (cmp.into_result(), common.out.clone())
        }
    };
    Ok(Some(result))
}

fn report(result: &SweepResult) {
    eprintln!("model {} | metric {} | swept {}", result.model, result.metric, result.parameter);
    for row in &result.rows {
        match &row.failure {
            Some(msg) => eprintln!("  {} = {}: failed: {}", result.parameter, row.param, msg),
            None => eprintln!(
                "  {} = {}: error {:.3e}, side {}, {:.3}s{}",
                result.parameter,
                row.param,
                row.error,
                row.matrix_side,
                row.wall_time_seconds,
                if row.diverged { " (diverged)" } else { "" }
            ),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let (result, out) = match run(&cli) {
        Ok(Some(r)) => r,
        Ok(None) => return ExitCode::SUCCESS,
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    report(&result);
    if let Err(e) = write_csv(&result, &out) {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    if let Some(plot) = &cli.plot {
        if let Err(e) = plot_svg(&result, plot) {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    if result.all_failed() {
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
