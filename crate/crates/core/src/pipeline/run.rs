use std::time::Instant;

use ndarray::{Array2, Axis};

use super::synthetic::add_measurement_noise;
use super::{
    bridge_analog, emit_plot_series, preprocess, simulate_modal_mixture, thread_count_from_env, ArtifactPaths,
    InputSource, PipelineError, Preprocessed, RunConfig, RunReport, Scenario, TableRow,
};
use crate::analysis::{
    analyze_response, match_modes, select_modes, spectral_purity, AnalysisParams, Confidence, ModeAnalysis, ModePair,
};
use crate::dynamics::{benchmark_4dof, eigen_modes, newmark_integrate, ExcitationSpec, InitialState, ModalTruth, NewmarkOptions};
use crate::linalg::center_columns;
use crate::network::{extract_modal_responses, extract_mode_shapes, normalize_shape_rows, refit_shapes, train_samples};
use crate::record::{atomic_write, ResponseRecord};
use crate::{LossBreakdown64, NetworkParams64};

/// A raw record plus the modes it should reproduce, when known.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub record: ResponseRecord<f64>,
    pub reference: Option<ModalTruth<f64>>,
}

/// Reads or simulates the input record and resolves the reference modes.
pub fn load_input(config: &RunConfig) -> Result<LoadedInput, PipelineError> {
    let sim = &config.simulation;
    let options = NewmarkOptions {
        output: sim.output,
        substeps: sim.substeps.unwrap_or(1),
    };
    let default_len = |fallback: usize| sim
        .samples
        .or(config.training_samples.map(|_| {
            let last = config.window(config.restarts - 1);
            last.training_start + last.training_samples.unwrap_or(0)
        }))
        .unwrap_or(fallback);
    let mut loaded = match config.source()? {
        InputSource::File(path) => LoadedInput {
            record: super::ingest_csv(&path, config.sample_rate)?,
            reference: None,
        },
        InputSource::Simulate(Scenario::Benchmark4Dof) => {
            let model = benchmark_4dof::<f64>();
            let fs = sim.sample_rate.unwrap_or(100.0);
            let samples = default_len(1000);
            let std = sim.excitation_std.unwrap_or(1.0);
            let excitation = ExcitationSpec::white_noise(vec![std; model.dofs()], sim.seed);
            let mut record = newmark_integrate(
                &model,
                &excitation,
                samples as f64 / fs,
                fs,
                &InitialState::at_rest(model.dofs()),
                options,
            )?;
            add_measurement_noise(&mut record.samples, sim.noise_fraction.unwrap_or(0.0), sim.seed.wrapping_add(1));
            LoadedInput {
                record,
                reference: Some(eigen_modes(&model)?),
            }
        }
        InputSource::Simulate(Scenario::BridgeAnalog) => {
            let mixture = bridge_analog();
            let record = simulate_modal_mixture(
                &mixture,
                default_len(10_000),
                sim.sample_rate.unwrap_or(10.0),
                sim.excitation_std.unwrap_or(1.0),
                sim.noise_fraction.unwrap_or(0.05),
                sim.seed,
                options,
            )?;
            LoadedInput {
                record,
                reference: Some(mixture.truth()),
            }
        }
    };
    if let Some(path) = &config.reference {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("cannot read reference {}: {e}", path.display())))?;
        let truth: ModalTruth<f64> = serde_json::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("bad reference {}: {e}", path.display())))?;
        if truth.shapes.nrows() != loaded.record.channels() {
            return Err(PipelineError::Config(format!(
                "reference shapes have {} components for {} channels",
                truth.shapes.nrows(),
                loaded.record.channels()
            )));
        }
        loaded.reference = Some(truth);
    }
    Ok(loaded)
}

fn training_rows(config: &RunConfig, available: usize) -> Result<std::ops::Range<usize>, PipelineError> {
    let start = config.training_start;
    let rows = config
        .training_samples
        .unwrap_or_else(|| available.saturating_sub(start));
    if start + rows > available {
        return Err(PipelineError::Config(format!(
            "training rows {start}..{} exceed the {available} samples after preprocessing",
            start + rows
        )));
    }
    if rows < config.network.batch_size.max(2) {
        return Err(PipelineError::Config(format!(
            "{rows} training samples is fewer than batch_size {}",
            config.network.batch_size
        )));
    }
    Ok(start..start + rows)
}

/// Weights trained on one window of the record.
#[derive(Debug, Clone)]
pub struct Trained {
    pub params: NetworkParams64,
    pub trace: Vec<LossBreakdown64>,
    /// The config pinned to the winning window.
    pub window: RunConfig,
    /// Summed spectral purity of the selected responses.
    pub purity: f64,
}

/// Trains on each configured window and keeps the one whose selected
/// responses are spectrally purest (first window on ties).
pub fn train_stage(data: &Preprocessed, config: &RunConfig) -> Result<Trained, PipelineError> {
    let x = &data.record.samples;
    if x.ncols() != config.network.input_dim {
        return Err(PipelineError::Config(format!(
            "record has {} channels but network.input_dim is {}",
            x.ncols(),
            config.network.input_dim
        )));
    }
    let mut best: Option<Trained> = None;
    for k in 0..config.restarts {
        let window = config.window(k);
        let rows = training_rows(&window, x.nrows())?;
        let (params, trace) = train_samples(x.slice(ndarray::s![rows, ..]), &window.network)?;
        let purity = if config.restarts > 1 {
            window_purity(data, &params, &window)?
        } else {
            0.0
        };
        log::info!("window {} starting at row {}: purity {purity:.4}", k, window.training_start);
        if best.as_ref().is_none_or(|b| purity > b.purity) {
            best = Some(Trained {
                params,
                trace,
                window,
                purity,
            });
        }
    }
    Ok(best.expect("restarts is at least 1"))
}

fn centered_responses(
    data: &Preprocessed,
    params: &NetworkParams64,
    config: &RunConfig,
) -> Result<(Array2<f64>, Array2<f64>), PipelineError> {
    let x = &data.record.samples;
    let rows = training_rows(config, x.nrows())?;
    let means = x
        .slice(ndarray::s![rows, ..])
        .mean_axis(Axis(0))
        .expect("non-empty training rows");
    let centered = x - &means;
    let responses = extract_modal_responses(params, centered.view())?;
    Ok((centered, responses))
}

fn window_purity(data: &Preprocessed, params: &NetworkParams64, config: &RunConfig) -> Result<f64, PipelineError> {
    let fs = data.record.sample_rate;
    let (_, responses) = centered_responses(data, params, config)?;
    let selection = &config.analysis.selection;
    Ok(select_modes(responses.view(), fs, selection)
        .into_iter()
        .filter_map(|c| spectral_purity(&responses.column(c).to_vec(), fs, &selection.welch, PURITY_BAND))
        .sum())
}

const PURITY_BAND: f64 = 0.1;

/// What [`identify`] found in one record.
#[derive(Debug, Clone)]
pub struct Identification {
    /// All separation-layer outputs over the whole record (`N×n`).
    pub responses: Array2<f64>,
    pub selected: Vec<usize>,
    /// One per selected column, ordered by frequency.
    pub modes: Vec<ModeAnalysis<f64>>,
    pub pairs: Vec<ModePair<f64>>,
}

/// Separates, selects and analyses modes with trained weights.
///
/// The record is centered with the column means of its training rows before
/// it is fed through the network. When fewer columns are selected than the
/// network has separation neurons, shapes are refitted from the selected
/// responses; otherwise they come from the output weights. Shapes are
/// returned in input units (standardization undone). An untrained network
/// (`trained == false`) flags every mode low-confidence.
pub fn identify(
    data: &Preprocessed,
    params: &NetworkParams64,
    config: &RunConfig,
    reference: Option<&ModalTruth<f64>>,
    trained: bool,
) -> Result<Identification, PipelineError> {
    let x = &data.record.samples;
    let fs = data.record.sample_rate;
    let (centered, responses) = centered_responses(data, params, config)?;
    let selected = select_modes(responses.view(), fs, &config.analysis.selection);

    let raw_shapes = if selected.is_empty() {
        Array2::zeros((0, x.ncols()))
    } else if params.separation_dim() > selected.len() {
        let picked = responses.select(Axis(1), &selected);
        refit_shapes(picked.view(), center_columns(&centered.view()).view())?
    } else {
        extract_mode_shapes(params).select(Axis(0), &selected)
    };
    let mut shapes = raw_shapes;
    for mut row in shapes.rows_mut() {
        for (v, s) in row.iter_mut().zip(&data.channel_scales) {
            *v *= s;
        }
    }
    let shapes = normalize_shape_rows(&shapes);

    let params_a = AnalysisParams {
        welch: config.analysis.welch,
        rdt: config.analysis.rdt,
    };
    let mut modes = Vec::with_capacity(selected.len());
    for (k, &col) in selected.iter().enumerate() {
        let trace = responses.column(col).to_vec();
        let mut m = analyze_response(&trace, shapes.row(k).to_vec(), fs, &params_a)?;
        if !trained {
            m.estimate.confidence = Confidence::Low;
        }
        modes.push(m);
    }
    let pairs = match reference {
        Some(truth) => {
            let estimates: Vec<_> = modes.iter().map(|m| m.estimate.clone()).collect();
            match_modes(&estimates, truth)
        }
        None => Vec::new(),
    };
    Ok(Identification {
        responses,
        selected,
        modes,
        pairs,
    })
}

fn build_table(found: &Identification, reference: Option<&ModalTruth<f64>>) -> Vec<TableRow> {
    let row = |i: usize, mode: usize| {
        let e = &found.modes[i].estimate;
        TableRow {
            mode,
            estimate: i + 1,
            reference_frequency_hz: None,
            frequency_hz: e.frequency,
            reference_damping_percent: None,
            damping_percent: e.damping_ratio * 100.0,
            mac: None,
            confidence: e.confidence,
        }
    };
    match reference {
        Some(truth) => {
            let mut rows: Vec<TableRow> = found
                .pairs
                .iter()
                .map(|p| TableRow {
                    reference_frequency_hz: Some(truth.frequencies[p.reference]),
                    reference_damping_percent: Some(truth.damping_ratios[p.reference] * 100.0),
                    mac: Some(p.mac),
                    ..row(p.estimate, p.reference + 1)
                })
                .collect();
            let unmatched = (0..found.modes.len()).filter(|i| !found.pairs.iter().any(|p| p.estimate == *i));
            rows.extend(unmatched.map(|i| row(i, 0)));
            rows
        }
        None => (0..found.modes.len()).map(|i| row(i, i + 1)).collect(),
    }
}

/// The full pipeline: load, preprocess, train, identify, write artifacts.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport, PipelineError> {
    config.validate()?;
    let start = Instant::now();
    let threads = thread_count_from_env()?;
    let input = load_input(config)?;
    let data = preprocess(&input.record, &config.preprocessing);
    let trained = train_stage(&data, config)?;
    let run = FinishedTraining {
        window: &trained.window,
        trained: !trained.trace.is_empty(),
        purity: (config.restarts > 1).then_some(trained.purity),
    };
    finish(config, &input, &data, &trained.params, trained.trace, run, threads, start)
}

/// Like [`run_pipeline`] but with weights trained elsewhere; `trace` may be
/// empty.
pub fn run_pipeline_with_params(
    config: &RunConfig,
    params: &NetworkParams64,
    trace: Vec<LossBreakdown64>,
) -> Result<RunReport, PipelineError> {
    config.validate()?;
    let start = Instant::now();
    let threads = thread_count_from_env()?;
    if params.input_dim() != config.network.input_dim || params.separation_dim() != config.network.separation_dim {
        return Err(PipelineError::Config(format!(
            "weights are {}×{} but the config expects {}×{}",
            params.input_dim(),
            params.separation_dim(),
            config.network.input_dim,
            config.network.separation_dim
        )));
    }
    let input = load_input(config)?;
    let data = preprocess(&input.record, &config.preprocessing);
    let run = FinishedTraining {
        window: config,
        trained: true,
        purity: None,
    };
    finish(config, &input, &data, params, trace, run, threads, start)
}

struct FinishedTraining<'a> {
    window: &'a RunConfig,
    trained: bool,
    purity: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn finish(
    config: &RunConfig,
    input: &LoadedInput,
    data: &Preprocessed,
    params: &NetworkParams64,
    trace: Vec<LossBreakdown64>,
    run: FinishedTraining,
    threads: usize,
    start: Instant,
) -> Result<RunReport, PipelineError> {
    let found = identify(data, params, run.window, input.reference.as_ref(), run.trained)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::output(dir, e))?;
    let rdt_modes: Vec<usize> = found
        .modes
        .iter()
        .enumerate()
        .filter(|(_, m)| m.signature.is_some())
        .map(|(i, _)| i)
        .collect();
    let artifacts = ArtifactPaths::new(dir, found.modes.len(), &rdt_modes);

    atomic_write(&artifacts.params, params.to_json().as_bytes())
        .map_err(|e| PipelineError::output(&artifacts.params, e))?;
    for (&i, path) in rdt_modes.iter().zip(&artifacts.rdt) {
        if let Some(sig) = &found.modes[i].signature {
            sig.write_csv(path).map_err(|e| PipelineError::output(path, e))?;
        }
    }
    let mut report = RunReport {
        modes: found.modes.iter().map(|m| m.estimate.clone()).collect(),
        mac_table: found.pairs.clone(),
        table: build_table(&found, input.reference.as_ref()),
        selected_columns: found.selected.clone(),
        channel_labels: data.record.channel_labels.clone(),
        channel_scales: data.channel_scales.clone(),
        sample_rate: data.record.sample_rate,
        training_window: {
            let rows = training_rows(run.window, data.record.len())?;
            (rows.start, rows.end)
        },
        window_purity: run.purity,
        analysis_samples: data.record.len(),
        final_loss: trace.last().copied(),
        loss_trace_path: artifacts.loss_trace.clone(),
        responses_path: artifacts.responses.clone(),
        shapes_path: artifacts.shapes.clone(),
        artifacts: artifacts.clone(),
        config_echo: config.clone(),
        seed: config.network.seed,
        thread_count: threads,
        wall_time_s: 0.0,
        loss_trace: trace,
    };
    emit_plot_series(&report)?;
    report.wall_time_s = start.elapsed().as_secs_f64();
    atomic_write(&artifacts.report, report.to_json().as_bytes())
        .map_err(|e| PipelineError::output(&artifacts.report, e))?;
    Ok(report)
}
