//! Implementations of the subcommands.

use std::fmt::Write as _;
use std::path::Path;

use graphmask_core::fixtures;
use graphmask_core::graph::{GlobalGraph, MultiLayerGraph, EDGE_EPS};
use graphmask_core::infer::{
    self, solve_gl_conv, solve_gl_informed, solve_gl_sigrep, solve_ml_full, solve_ml_reduced,
    Method, MlConfig,
};
use graphmask_core::ingest::{
    self, layers_from_features, load_instance, load_relation_table, load_result,
    load_station_table, save_instance, save_result, LearnDocument,
};
use graphmask_core::inpaint::{inpaint_experiment, InpaintExperimentConfig};
use graphmask_core::metrics::{edge_report, format_table, jaccard, mask_report, weight_report};
use graphmask_core::qp::SolveSettings;
use graphmask_core::spectral::{add_noise, SignalMatrix};
use graphmask_core::synth::{generate_instance, SynthConfig};

use crate::config::Config;
use crate::pool;
use crate::svg;
use crate::{
    CliError, EvalArgs, FixturesArgs, InpaintArgs, LearnArgs, PlotArgs, SweepArgs, SynthArgs,
};

/// Default gamma schedule over coverability intervals: trust the layers
/// more as they cover more of the global graph.
pub fn gamma_schedule(coverability: f64) -> f64 {
    if coverability <= 0.75 {
        100.0
    } else if coverability <= 0.8 {
        1e4
    } else if coverability <= 0.9 {
        1e5
    } else {
        1e6
    }
}

const DEFAULT_SIGREP_GAMMA: f64 = 10.0;
const DEFAULT_INFORMED_GAMMA: f64 = 20.0;

fn parse_methods(spec: &str) -> Result<Vec<Method>, CliError> {
    spec.split(',')
        .map(|m| m.trim().parse::<Method>().map_err(CliError::Usage))
        .collect()
}

fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

pub fn synth(args: SynthArgs, config: &Config) -> Result<(), CliError> {
    let defaults = SynthConfig::default();
    let cfg = SynthConfig {
        n: args.n.or(config.usize("n")).unwrap_or(defaults.n),
        k_signals: args.k.or(config.usize("k")).unwrap_or(defaults.k_signals),
        coverability: args
            .coverability
            .or(config.f64("coverability"))
            .unwrap_or(defaults.coverability),
        seed: args.seed.or(config.u64("seed")).unwrap_or(defaults.seed),
        sigma: args.sigma.or(config.f64("sigma")).unwrap_or(defaults.sigma),
        tau: args.tau.or(config.f64("tau")).unwrap_or(defaults.tau),
        edge_quantile: args
            .edge_quantile
            .or(config.f64("edge-quantile"))
            .unwrap_or(defaults.edge_quantile),
    };
    let instance = generate_instance(&cfg)?;
    save_instance(&args.out, &instance)?;
    println!(
        "instance: n={} t={} k={} seed={} coverability={:.4} -> {}",
        cfg.n,
        instance.layers.t(),
        cfg.k_signals,
        cfg.seed,
        instance.coverability_actual,
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// learn
// ---------------------------------------------------------------------------

struct LearnInputs {
    layers: MultiLayerGraph,
    signals: SignalMatrix,
}

fn resolve_learn_inputs(args: &LearnArgs, config: &Config) -> Result<LearnInputs, CliError> {
    let sparsity = args.sparsity.or(config.f64("sparsity")).unwrap_or(0.15);
    let sources = [
        args.instance.is_some(),
        args.layers.is_some(),
        args.weather.is_some(),
        args.office.is_some(),
    ];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(CliError::Usage(
            "exactly one input source is required: --instance, --layers + --signals, \
             --weather + --measurement, or --office"
                .into(),
        ));
    }
    if let Some(dir) = &args.instance {
        let loaded = load_instance(dir)?;
        return Ok(LearnInputs {
            layers: loaded.layers,
            signals: loaded.signals,
        });
    }
    if let Some(list) = &args.layers {
        let signals_path = args
            .signals
            .as_ref()
            .ok_or_else(|| CliError::Usage("--layers requires --signals".into()))?;
        let signals = ingest::load_signals(signals_path)?;
        let n = signals.n();
        let mut layers = Vec::new();
        for file in list.split(',') {
            let weights = ingest::load_weights(Path::new(file.trim()), n)?;
            layers.push(
                graphmask_core::graph::GraphLayer::new(weights)
                    .map_err(|e| CliError::Usage(e.to_string()))?,
            );
        }
        let layers = MultiLayerGraph::new(layers).map_err(|e| CliError::Usage(e.to_string()))?;
        return Ok(LearnInputs { layers, signals });
    }
    if let Some(dir) = &args.weather {
        let measurement = args
            .measurement
            .clone()
            .or(config.string("measurement"))
            .ok_or_else(|| CliError::Usage("--weather requires --measurement".into()))?;
        let (_, table) = load_station_table(dir)?;
        let (signals, kept, dropped) = table.measurement_signals(&measurement)?;
        if !dropped.is_empty() {
            eprintln!(
                "note: dropped {} stations missing {measurement}: {}",
                dropped.len(),
                dropped.join(", ")
            );
        }
        let layers = layers_from_features(&table.feature_blocks(&kept), sparsity)?;
        return Ok(LearnInputs { layers, signals });
    }
    let dir = args.office.as_ref().expect("office source checked above");
    let (_, table) = load_relation_table(dir)?;
    let (layers, signals, _) = fixtures::office_inputs(&table)?;
    Ok(LearnInputs { layers, signals })
}

pub fn learn(args: LearnArgs, config: &Config) -> Result<(), CliError> {
    let method: Method = args.method.parse().map_err(CliError::Usage)?;
    let inputs = resolve_learn_inputs(&args, config)?;
    let settings = SolveSettings::default();
    let n = inputs.layers.n() as f64;
    let trace = args.trace.or(config.f64("trace")).unwrap_or(n);
    let gamma_flag = args.gamma.or(config.f64("gamma"));
    let gamma = |default: f64| {
        let raw = gamma_flag.unwrap_or(default);
        if args.gamma_auto {
            infer::auto_gamma(raw, &inputs.signals)
        } else {
            raw
        }
    };

    let doc = match method {
        Method::Ml => {
            let g = gamma(100.0);
            let result = solve_ml_full(
                &inputs.layers,
                &inputs.signals,
                &MlConfig::full(g, trace),
                &settings,
            )?;
            LearnDocument::from_ml(method, &result, g, trace)
        }
        Method::MlReduced => {
            let result = solve_ml_reduced(
                &inputs.layers,
                &inputs.signals,
                &MlConfig::reduced(trace),
                &settings,
            )?;
            LearnDocument::from_ml(method, &result, 0.0, trace)
        }
        Method::GlSigrep => {
            let g = gamma(DEFAULT_SIGREP_GAMMA);
            let result = solve_gl_sigrep(&inputs.signals, g, trace, &settings)?;
            LearnDocument::from_gl(method, &result, g, trace, inputs.layers.t())
        }
        Method::GlInformed => {
            let g = gamma(DEFAULT_INFORMED_GAMMA);
            let result = solve_gl_informed(&inputs.layers, &inputs.signals, g, trace, &settings)?;
            LearnDocument::from_gl(method, &result, g, trace, inputs.layers.t())
        }
        Method::GlConv => {
            let beta = args
                .beta
                .or(config.f64("beta"))
                .unwrap_or_else(|| inputs.signals.energy());
            let result = solve_gl_conv(
                &inputs.layers,
                &inputs.signals,
                beta,
                Some(trace),
                &settings,
            )?;
            LearnDocument::from_conv(&result, beta, Some(trace))
        }
    };

    println!("method: {}", doc.method);
    println!("status: {}", doc.status);
    println!("objective: {}", doc.objective);
    for warning in &doc.warnings {
        println!("warning: {warning}");
    }
    if let Some(alphas) = &doc.alphas {
        let rendered: Vec<String> = alphas.iter().map(|a| format!("{a:.6}")).collect();
        println!("alphas: [{}]", rendered.join(", "));
    }
    if let Some(contributions) = &doc.layer_contributions {
        let rows: Vec<Vec<String>> = contributions
            .iter()
            .enumerate()
            .map(|(t, pct)| vec![format!("{}", t + 1), format!("{pct:.1}%")])
            .collect();
        println!("layer contributions:");
        print!("{}", format_table(&["layer", "share"], &rows));
    }
    if let Some(out) = &args.out {
        save_result(out, &doc)?;
        println!("result: {}", out.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

pub fn eval(args: EvalArgs, _config: &Config) -> Result<(), CliError> {
    let doc = load_result(&args.result)?;
    let learned = doc.global_graph()?;
    let truth = load_instance(&args.truth)?;

    let edges = edge_report(&learned, &truth.true_global, EDGE_EPS)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let weights =
        weight_report(&learned, &truth.true_global).map_err(|e| CliError::Usage(e.to_string()))?;
    let jac = jaccard(
        &learned.edge_set(EDGE_EPS),
        &truth.true_global.edge_set(EDGE_EPS),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut rows = vec![
        vec!["precision".to_string(), format!("{:.6}", edges.precision)],
        vec!["recall".to_string(), format!("{:.6}", edges.recall)],
        vec!["f-score".to_string(), format!("{:.6}", edges.f_score)],
        vec!["jaccard".to_string(), format!("{jac:.6}")],
        vec!["mse".to_string(), format!("{:.6e}", weights.mse)],
        vec!["rse".to_string(), format!("{:.6e}", weights.rse)],
    ];

    let mut mask_f = None;
    if let Some(mask_triplets) = &doc.masks {
        let support = truth.true_masks.support().to_vec();
        let mut values = vec![vec![0.0; support.len()]; mask_triplets.len()];
        for layer in mask_triplets {
            for &(i, j, v) in &layer.entries {
                if let Ok(e) = support.binary_search(&(i, j)) {
                    values[layer.layer][e] = v;
                }
            }
        }
        if let Ok(inferred) =
            graphmask_core::graph::MaskSet::new(truth.true_masks.n(), support, values)
        {
            if let Ok(report) = mask_report(&inferred, &truth.true_masks, 0.5) {
                rows.push(vec![
                    "mask-f-score".to_string(),
                    format!("{:.6}", report.f_score),
                ]);
                mask_f = Some(report.f_score);
            }
        }
    }

    print!("{}", format_table(&["metric", "value"], &rows));
    if let Some(out) = &args.out {
        let report = serde_json::json!({
            "format": ingest::FORMAT_VERSION,
            "method": doc.method,
            "precision": edges.precision,
            "recall": edges.recall,
            "f_score": edges.f_score,
            "jaccard": jac,
            "mse": weights.mse,
            "rse": weights.rse,
            "mask_f_score": mask_f,
        });
        write_text(
            out,
            &format!("{}\n", serde_json::to_string_pretty(&report).expect("json")),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct TrialMetrics {
    precision: f64,
    recall: f64,
    f_score: f64,
    mse: f64,
    rse: f64,
}

fn run_trial(
    axis: &str,
    value: f64,
    method: Method,
    base: &SynthConfig,
    trial_seed: u64,
    gammas: &SweepGammas,
) -> Result<TrialMetrics, CliError> {
    let mut cfg = *base;
    cfg.seed = trial_seed;
    match axis {
        "coverability" => cfg.coverability = value,
        "k" => cfg.k_signals = value as usize,
        "snr" => {}
        other => return Err(CliError::Usage(format!("unknown sweep axis {other:?}"))),
    }
    let instance = generate_instance(&cfg)?;
    let signals = if axis == "snr" {
        add_noise(
            &instance.signals,
            value,
            trial_seed.wrapping_add(0x6e6f_6973),
        )
    } else {
        instance.signals.clone()
    };

    let settings = SolveSettings::default();
    let trace = cfg.n as f64;
    let learned: GlobalGraph = match method {
        Method::Ml => {
            let gamma = gammas
                .ml
                .unwrap_or_else(|| gamma_schedule(instance.coverability_actual));
            solve_ml_full(
                &instance.layers,
                &signals,
                &MlConfig::full(gamma, trace),
                &settings,
            )?
            .global
        }
        Method::MlReduced => {
            solve_ml_reduced(
                &instance.layers,
                &signals,
                &MlConfig::reduced(trace),
                &settings,
            )?
            .global
        }
        Method::GlSigrep => solve_gl_sigrep(&signals, gammas.sigrep, trace, &settings)?.global,
        Method::GlInformed => {
            solve_gl_informed(
                &instance.layers,
                &signals,
                gammas.informed,
                trace,
                &settings,
            )?
            .global
        }
        Method::GlConv => {
            let beta = gammas.conv_beta.unwrap_or_else(|| signals.energy());
            solve_gl_conv(&instance.layers, &signals, beta, Some(trace), &settings)?.global
        }
    };

    let edges = edge_report(&learned, &instance.true_global, EDGE_EPS)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let weights = weight_report(&learned, &instance.true_global)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(TrialMetrics {
        precision: edges.precision,
        recall: edges.recall,
        f_score: edges.f_score,
        mse: weights.mse,
        rse: weights.rse,
    })
}

struct SweepGammas {
    ml: Option<f64>,
    sigrep: f64,
    informed: f64,
    conv_beta: Option<f64>,
}

pub fn sweep(args: SweepArgs, config: &Config) -> Result<(), CliError> {
    let axis = args
        .axis
        .or(config.string("axis"))
        .unwrap_or_else(|| "coverability".into());
    let values_spec = args
        .values
        .or(config.string("values"))
        .unwrap_or_else(|| "0.4,0.55,0.7,0.85,1.0".into());
    let values: Vec<f64> = values_spec
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad axis value {v:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError::Usage("no axis values given".into()));
    }
    let methods = parse_methods(
        &args
            .methods
            .or(config.string("methods"))
            .unwrap_or_else(|| "ml,gl-sigrep,gl-informed,gl-conv".into()),
    )?;
    let reps = args.reps.or(config.usize("reps")).unwrap_or(20);
    let seed = args.seed.or(config.u64("seed")).unwrap_or(0);
    let defaults = SynthConfig::default();
    let base = SynthConfig {
        n: args.n.or(config.usize("n")).unwrap_or(defaults.n),
        k_signals: args.k.or(config.usize("k")).unwrap_or(defaults.k_signals),
        coverability: args
            .coverability
            .or(config.f64("coverability"))
            .unwrap_or(0.7),
        seed,
        ..defaults
    };
    let gammas = SweepGammas {
        ml: args.gamma.or(config.f64("gamma")),
        sigrep: args
            .sigrep_gamma
            .or(config.f64("sigrep-gamma"))
            .unwrap_or(DEFAULT_SIGREP_GAMMA),
        informed: args
            .informed_gamma
            .or(config.f64("informed-gamma"))
            .unwrap_or(DEFAULT_INFORMED_GAMMA),
        conv_beta: args.conv_beta.or(config.f64("conv-beta")),
    };

    // One task per (value, method, rep); aggregation is order-independent.
    let mut tasks = Vec::new();
    for (vi, &value) in values.iter().enumerate() {
        for (mi, &method) in methods.iter().enumerate() {
            for rep in 0..reps {
                tasks.push((vi, mi, value, method, seed.wrapping_add(rep as u64)));
            }
        }
    }
    let results = pool::run(tasks.len(), |t| {
        let (_, _, value, method, trial_seed) = tasks[t];
        run_trial(&axis, value, method, &base, trial_seed, &gammas)
    });

    let mut sums =
        vec![vec![(0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64); methods.len()]; values.len()];
    for (t, result) in results.into_iter().enumerate() {
        let (vi, mi, ..) = tasks[t];
        let m = result?;
        let cell = &mut sums[vi][mi];
        cell.0 += m.precision;
        cell.1 += m.recall;
        cell.2 += m.f_score;
        cell.3 += m.mse;
        cell.4 += m.rse;
    }

    let mut table = String::from("axis\tvalue\tmethod\tprecision\trecall\tf_score\tmse\trse\n");
    for (vi, &value) in values.iter().enumerate() {
        for (mi, &method) in methods.iter().enumerate() {
            let (p, r, f, mse, rse) = sums[vi][mi];
            let d = reps as f64;
            writeln!(
                table,
                "{axis}\t{value}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6e}\t{:.6e}",
                method.name(),
                p / d,
                r / d,
                f / d,
                mse / d,
                rse / d
            )
            .expect("string write");
        }
    }
    std::fs::create_dir_all(&args.out)?;
    write_text(&args.out.join("sweep.tsv"), &table)?;
    let manifest = serde_json::json!({
        "format": ingest::FORMAT_VERSION,
        "axis": axis,
        "values": values,
        "methods": methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "n": base.n,
        "k": base.k_signals,
        "base_coverability": base.coverability,
        "reps": reps,
        "seed": seed,
    });
    write_text(
        &args.out.join("sweep.json"),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&manifest).expect("json")
        ),
    )?;
    print!("{table}");
    Ok(())
}

// ---------------------------------------------------------------------------
// inpaint
// ---------------------------------------------------------------------------

pub fn inpaint(args: InpaintArgs, config: &Config) -> Result<(), CliError> {
    let measurement = args
        .measurement
        .or(config.string("measurement"))
        .unwrap_or_else(|| "temperature".into());
    let sparsity = args.sparsity.or(config.f64("sparsity")).unwrap_or(0.15);
    let (_, table) = load_station_table(&args.weather)?;
    let (signals, kept, dropped) = table.measurement_signals(&measurement)?;
    if !dropped.is_empty() {
        eprintln!(
            "note: dropped {} stations missing {measurement}: {}",
            dropped.len(),
            dropped.join(", ")
        );
    }
    let layers = layers_from_features(&table.feature_blocks(&kept), sparsity)?;

    let mut cfg = InpaintExperimentConfig::new(signals.n() as f64);
    if let Some(methods) = args.methods.or(config.string("methods")) {
        cfg.methods = parse_methods(&methods)?;
    } else {
        cfg.methods = vec![
            Method::Ml,
            Method::GlSigrep,
            Method::GlInformed,
            Method::GlConv,
        ];
    }
    cfg.ml_gamma = args.ml_gamma.or(config.f64("ml-gamma")).unwrap_or(1000.0);
    cfg.sigrep_gamma = args
        .sigrep_gamma
        .or(config.f64("sigrep-gamma"))
        .unwrap_or(30.0);
    cfg.informed_gamma = args
        .informed_gamma
        .or(config.f64("informed-gamma"))
        .unwrap_or(30.0);
    cfg.conv_beta = args.conv_beta.or(config.f64("conv-beta"));
    cfg.inpaint_gamma = args
        .inpaint_gamma
        .or(config.f64("inpaint-gamma"))
        .unwrap_or(1000.0);
    cfg.holdout_fraction = args.holdout.or(config.f64("holdout")).unwrap_or(0.5);
    cfg.seed = args.seed.or(config.u64("seed")).unwrap_or(0);

    let scores = inpaint_experiment(&layers, &signals, &cfg)?;
    let rows: Vec<Vec<String>> = scores
        .iter()
        .map(|s| {
            vec![
                s.method.name().to_string(),
                format!("{:.6}", s.mse),
                format!("{:.4}", s.mape),
            ]
        })
        .collect();
    let rendered = format_table(&["method", "mse", "mape%"], &rows);
    print!("{rendered}");
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        let mut tsv = String::from("method\tmse\tmape\n");
        for s in &scores {
            writeln!(tsv, "{}\t{:.6}\t{:.6}", s.method.name(), s.mse, s.mape)
                .expect("string write");
        }
        write_text(&out.join("inpaint.tsv"), &tsv)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

pub fn plot(args: PlotArgs, _config: &Config) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.table)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.table.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::Usage("empty sweep table".into()))?
        .split('\t')
        .collect();
    let expected = [
        "axis",
        "value",
        "method",
        "precision",
        "recall",
        "f_score",
        "mse",
        "rse",
    ];
    if header != expected {
        return Err(CliError::Usage(format!(
            "unexpected table header {header:?}"
        )));
    }

    let mut axis_name = String::from("value");
    let mut methods: Vec<String> = Vec::new();
    let mut rows: Vec<(f64, String, Vec<f64>)> = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 8 {
            return Err(CliError::Usage(format!(
                "{}:{}: expected 8 columns, found {}",
                args.table.display(),
                idx + 2,
                fields.len()
            )));
        }
        axis_name = fields[0].to_string();
        let value: f64 = fields[1]
            .parse()
            .map_err(|e| CliError::Usage(format!("bad value {:?}: {e}", fields[1])))?;
        let method = fields[2].to_string();
        if !methods.contains(&method) {
            methods.push(method.clone());
        }
        let metrics: Vec<f64> = fields[3..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("bad metric {f:?}: {e}")))
            })
            .collect::<Result<_, _>>()?;
        rows.push((value, method, metrics));
    }

    std::fs::create_dir_all(&args.out)?;
    for (metric_idx, metric) in ["precision", "recall", "f_score", "mse", "rse"]
        .iter()
        .enumerate()
    {
        let series: Vec<svg::Series> = methods
            .iter()
            .map(|m| svg::Series {
                label: m.clone(),
                points: rows
                    .iter()
                    .filter(|(_, method, _)| method == m)
                    .map(|(v, _, metrics)| (*v, metrics[metric_idx]))
                    .collect(),
            })
            .collect();
        let chart = svg::line_chart(
            &format!("{metric} vs {axis_name}"),
            &axis_name,
            metric,
            &series,
        );
        write_text(&args.out.join(format!("{metric}.svg")), &chart)?;

        let mut dat = axis_name.clone();
        for m in &methods {
            dat.push(' ');
            dat.push_str(m);
        }
        dat.push('\n');
        let mut values: Vec<f64> = rows.iter().map(|(v, _, _)| *v).collect();
        values.dedup();
        for v in values {
            dat.push_str(&format!("{v}"));
            for m in &methods {
                let point = rows
                    .iter()
                    .find(|(rv, rm, _)| rv == &v && rm == m)
                    .map(|(_, _, metrics)| metrics[metric_idx]);
                match point {
                    Some(y) => dat.push_str(&format!(" {y}")),
                    None => dat.push_str(" nan"),
                }
            }
            dat.push('\n');
        }
        write_text(&args.out.join(format!("{metric}.dat")), &dat)?;
    }
    println!("charts: {}", args.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

pub fn fixtures(args: FixturesArgs, _config: &Config) -> Result<(), CliError> {
    fixtures::write_weather_fixture(&args.out.join("synthetic_weather"))?;
    fixtures::write_office_fixture(&args.out.join("synthetic_office"))?;
    println!("fixtures: {}", args.out.display());
    Ok(())
}
