//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use trotter_core::dense::DENSE_QUBIT_THRESHOLD;
use trotter_core::error_op::{build_error_operator, NormKind};
use trotter_core::graph::{build_graph, coloring_stats, coloring_violations, greedy_color};
use trotter_core::hamiltonian::{
    builtin_fixture, ApproximantOrder, QubitHamiltonian, TrotterConfig, FIXTURE_NAMES,
};
use trotter_core::ordering::{order, OrderingStrategy, StrategyOptions};
use trotter_core::sim::{ground_state, measure_trotter_error_with, EigenPair};

use crate::args::{Cli, Command, GlobalOpts};
use crate::campaign::{
    joint_histogram, run_enumeration, sample_orderings, summarize, CheckpointOptions, Evaluator,
};
use crate::error::{CliError, Result};
use crate::input::{load_hamiltonian, resolve_time, TimeArg};
use crate::output::{csv_writer, timestamp, write_json, Format, TOOL, VERSION};
use crate::records::{compare, CompareOptions};

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    let mut file = match &g.output {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    };
    let out: &mut dyn Write = match file.as_mut() {
        Some(f) => f,
        None => stdout,
    };
    match &cli.command {
        Command::Order {
            input,
            strategy,
            sidecar,
        } => cmd_order(g, input, *strategy, sidecar.as_deref(), out)?,
        Command::Enumerate {
            input,
            cap,
            bins,
            thresholds,
            summary,
            checkpoint,
            checkpoint_interval,
        } => {
            let ck = checkpoint.as_ref().map(|p| CheckpointOptions {
                path: p.clone(),
                interval: *checkpoint_interval,
            });
            let side = side_path(summary.as_deref(), g.output.as_deref(), "summary.json");
            cmd_enumerate(
                g,
                input,
                *cap,
                *bins,
                thresholds,
                side.as_deref(),
                ck.as_ref(),
                out,
            )?
        }
        Command::Compare {
            input,
            strategies,
            with_norms,
        } => cmd_compare(g, input, strategies, *with_norms, out)?,
        Command::Sample {
            input,
            count,
            bins,
            histogram,
        } => {
            let side = side_path(histogram.as_deref(), g.output.as_deref(), "hist.json");
            cmd_sample(g, input, *count as usize, *bins, side.as_deref(), out)?
        }
        Command::ColorStats { inputs } => cmd_color_stats(g, inputs, out)?,
        Command::ErrorOp {
            input,
            strategy,
            dt,
        } => cmd_error_op(g, input, *strategy, *dt, out)?,
        Command::Simulate {
            input,
            strategy,
            sweep,
        } => cmd_simulate(g, input, *strategy, sweep, out)?,
        Command::Fixtures { write } => cmd_fixtures(g, write.as_deref(), out)?,
    }
    out.flush()?;
    Ok(())
}

/// Explicit path, else `<output>.<suffix>`, else `None` for stderr.
fn side_path(explicit: Option<&Path>, output: Option<&Path>, suffix: &str) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        output.map(|o| {
            let mut s = o.as_os_str().to_owned();
            s.push(".");
            s.push(suffix);
            PathBuf::from(s)
        })
    })
}

fn write_side_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json(BufWriter::new(File::create(p)?), value),
        None => write_json(std::io::stderr().lock(), value),
    }
}

fn trotter_order(g: &GlobalOpts) -> ApproximantOrder {
    ApproximantOrder::from_number(g.trotter_order).expect("clap restricts the order to 1 or 2")
}

fn config(g: &GlobalOpts, time: f64) -> Result<TrotterConfig> {
    Ok(TrotterConfig::new(
        time,
        g.steps as usize,
        trotter_order(g),
    )?)
}

fn config_for(g: &GlobalOpts, h: &QubitHamiltonian, ground: &EigenPair) -> Result<TrotterConfig> {
    let t = resolve_time(g.time, h, Some(g.reference_energy.unwrap_or(ground.energy)))?;
    config(g, t)
}

/// Options for strategies. The greedy error-operator ordering is invariant
/// under a global rescaling of `Δt`, so a unit step stands in when the time
/// is left to `auto` and no ground state has been computed.
fn strategy_options(g: &GlobalOpts, dt: Option<f64>) -> StrategyOptions {
    let fixed = match g.time {
        TimeArg::Fixed(t) => Some(t / g.steps as f64),
        TimeArg::Auto => None,
    };
    StrategyOptions {
        coloring: g.coloring,
        step_size: dt.or(fixed).unwrap_or(1.0),
        norm: g.norm,
    }
}

#[derive(Serialize)]
struct OrderSidecar<'a> {
    tool: &'a str,
    version: &'a str,
    label: &'a str,
    strategy: OrderingStrategy,
    /// `permutation[k]` is the input index of output term `k`.
    permutation: &'a [usize],
    timestamp: u64,
}

fn cmd_order(
    g: &GlobalOpts,
    input: &str,
    strategy: OrderingStrategy,
    sidecar: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let h = load_hamiltonian(input)?;
    let r = order(&h, strategy, &strategy_options(g, None))?;
    let meta = OrderSidecar {
        tool: TOOL,
        version: VERSION,
        label: h.label(),
        strategy,
        permutation: &r.permutation,
        timestamp: timestamp(),
    };
    out.write_all(r.ordered.serialize().as_bytes())?;
    let side = side_path(sidecar, g.output.as_deref(), "json");
    if let Some(p) = side {
        write_json(BufWriter::new(File::create(p)?), &meta)?;
    } else {
        write_json(std::io::stderr().lock(), &meta)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_enumerate(
    g: &GlobalOpts,
    input: &str,
    cap: usize,
    bins: usize,
    thresholds: &[f64],
    summary_path: Option<&Path>,
    checkpoint: Option<&CheckpointOptions>,
    out: &mut dyn Write,
) -> Result<()> {
    let h = load_hamiltonian(input)?;
    let ground = ground_state(&h)?;
    let cfg = config_for(g, &h, &ground)?;
    let eval = Evaluator::with_ground(&h, ground, cfg);
    let outcome = run_enumeration(&eval, cap, checkpoint)?;
    let summary = summarize(&eval, &outcome, thresholds, bins);
    match g.format {
        Format::Csv => {
            let mut w = csv_writer(out, "enumerate")?;
            w.write_record(["perm_id", "error"])?;
            for (k, e) in outcome.errors.iter().enumerate() {
                w.serialize((k, e))?;
            }
            w.flush()?;
            write_side_json(summary_path, &summary)?;
        }
        Format::Json => write_json(out, &summary)?,
    }
    Ok(())
}

fn cmd_compare(
    g: &GlobalOpts,
    input: &str,
    strategies: &[OrderingStrategy],
    with_norms: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let h = load_hamiltonian(input)?;
    let ground = ground_state(&h)?;
    let cfg = config_for(g, &h, &ground)?;
    let norms = with_norms.then(|| match g.norm {
        NormKind::Spectral if h.qubit_count() > DENSE_QUBIT_THRESHOLD => NormKind::CoeffOneNorm,
        k => k,
    });
    let opts = CompareOptions {
        strategy: strategy_options(g, Some(cfg.step_size())),
        config: cfg,
        norms,
    };
    let (records, ranking) = compare(&h, &ground, strategies, &opts)?;
    match g.format {
        Format::Csv => {
            let mut w = csv_writer(out, "compare")?;
            for r in &records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Both<'a> {
                records: &'a [crate::records::AnalysisRecord],
                ranking: &'a crate::records::StrategyRanking,
            }
            write_json(
                out,
                &Both {
                    records: &records,
                    ranking: &ranking,
                },
            )?
        }
    }
    Ok(())
}

fn cmd_sample(
    g: &GlobalOpts,
    input: &str,
    count: usize,
    bins: usize,
    hist_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let h = load_hamiltonian(input)?;
    let ground = ground_state(&h)?;
    let cfg = config_for(g, &h, &ground)?;
    let eval = Evaluator::with_ground(&h, ground, cfg);
    let spectral = g.norm == NormKind::Spectral;
    let rows = sample_orderings(&eval, count, g.seed, spectral)?;
    let hist = joint_histogram(&rows, g.norm, bins);
    match g.format {
        Format::Csv => {
            let mut w = csv_writer(out, "sample")?;
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
            write_side_json(hist_path, &hist)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Both<'a> {
                samples: &'a [crate::campaign::SampleRow],
                histogram: &'a crate::campaign::Histogram2d,
            }
            write_json(
                out,
                &Both {
                    samples: &rows,
                    histogram: &hist,
                },
            )?
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ColorStatsRow {
    pub label: String,
    pub terms: usize,
    pub qubits: usize,
    pub set_count: usize,
    /// Sets per term.
    pub ratio: f64,
    pub mean_size: f64,
    pub stddev_size: f64,
    pub terms_per_set: f64,
}

pub fn color_stats_row(
    h: &QubitHamiltonian,
    strategy: trotter_core::graph::ColoringStrategy,
) -> Result<ColorStatsRow> {
    let c = greedy_color(&build_graph(h), strategy);
    let bad = coloring_violations(h, &c);
    if !bad.is_empty() {
        return Err(CliError::Input(format!(
            "{}: coloring places non-commuting terms together: {bad:?}",
            h.label()
        )));
    }
    let s = coloring_stats(&c);
    Ok(ColorStatsRow {
        label: h.label().to_string(),
        terms: h.len(),
        qubits: h.qubit_count(),
        set_count: s.set_count,
        ratio: s.sets_per_term_ratio,
        mean_size: s.mean_size,
        stddev_size: s.stddev_size,
        terms_per_set: s.terms_per_set_ratio(),
    })
}

fn cmd_color_stats(g: &GlobalOpts, inputs: &[String], out: &mut dyn Write) -> Result<()> {
    let rows = inputs
        .iter()
        .map(|i| color_stats_row(&load_hamiltonian(i)?, g.coloring))
        .collect::<Result<Vec<_>>>()?;
    match g.format {
        Format::Csv => {
            let mut w = csv_writer(out, "color-stats")?;
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(out, &rows)?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ErrorOpSummary {
    pub label: String,
    pub order_strategy: OrderingStrategy,
    pub dt: f64,
    pub coeff_one_norm: f64,
    pub spectral_norm: Option<f64>,
    pub term_count: usize,
}

fn cmd_error_op(
    g: &GlobalOpts,
    input: &str,
    strategy: OrderingStrategy,
    dt: Option<f64>,
    out: &mut dyn Write,
) -> Result<()> {
    let h = load_hamiltonian(input)?;
    let dt = match dt {
        Some(d) => d,
        None => resolve_time(g.time, &h, g.reference_energy)? / g.steps as f64,
    };
    let r = order(&h, strategy, &strategy_options(g, Some(dt)))?;
    let v = build_error_operator(&r.ordered, dt);
    let summary = ErrorOpSummary {
        label: h.label().to_string(),
        order_strategy: strategy,
        dt,
        coeff_one_norm: v.coeff_one_norm(),
        spectral_norm: if h.qubit_count() <= DENSE_QUBIT_THRESHOLD {
            Some(v.norm(NormKind::Spectral)?)
        } else {
            None
        },
        term_count: v.terms.len(),
    };
    match g.format {
        Format::Json => write_json(out, &summary)?,
        Format::Csv => {
            let mut w = csv_writer(out, "error-op")?;
            w.serialize(&summary)?;
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SimulateRow {
    pub label: String,
    pub strategy: OrderingStrategy,
    pub trotter_order: u8,
    pub steps: usize,
    pub time: f64,
    pub exact_energy: f64,
    pub estimated_energy: f64,
    pub measured_error: f64,
    pub signed_error: f64,
    pub overlap: f64,
    pub degenerate_ground: bool,
}

fn cmd_simulate(
    g: &GlobalOpts,
    input: &str,
    strategy: OrderingStrategy,
    sweep: &[usize],
    out: &mut dyn Write,
) -> Result<()> {
    let h = load_hamiltonian(input)?;
    let ground = ground_state(&h)?;
    let base = config_for(g, &h, &ground)?;
    let r = order(&h, strategy, &strategy_options(g, Some(base.step_size())))?;
    let steps: Vec<usize> = if sweep.is_empty() {
        vec![base.trotter_number]
    } else {
        sweep.to_vec()
    };
    let rows = steps
        .iter()
        .map(|&n| {
            let cfg = TrotterConfig::new(base.total_time, n, base.order)?;
            let rep = measure_trotter_error_with(&r.ordered, &ground, &cfg)?;
            Ok(SimulateRow {
                label: h.label().to_string(),
                strategy,
                trotter_order: cfg.order.number(),
                steps: n,
                time: cfg.total_time,
                exact_energy: rep.exact_energy,
                estimated_energy: rep.estimated_energy,
                measured_error: rep.measured_error,
                signed_error: rep.signed_error,
                overlap: rep.overlap,
                degenerate_ground: rep.degenerate_ground,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    match g.format {
        Format::Csv => {
            let mut w = csv_writer(out, "simulate")?;
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(out, &rows)?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct FixtureRow {
    name: &'static str,
    qubits: usize,
    terms: usize,
}

fn cmd_fixtures(g: &GlobalOpts, dir: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let mut rows = Vec::new();
    for name in FIXTURE_NAMES {
        let h = builtin_fixture(name)?;
        if let Some(d) = dir {
            std::fs::create_dir_all(d)?;
            std::fs::write(d.join(format!("{name}.ham")), h.serialize())?;
        }
        rows.push(FixtureRow {
            name,
            qubits: h.qubit_count(),
            terms: h.len(),
        });
    }
    match g.format {
        Format::Csv => {
            let mut w = csv_writer(out, "fixtures")?;
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(out, &rows)?,
    }
    Ok(())
}
