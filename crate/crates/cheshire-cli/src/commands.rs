//! The four subcommands. Each writes machine-readable files into the output
//! directory and prints a short human summary to stdout.

use std::path::Path;

use cheshire_core::{
    aggregate, cheshire_weak_values, extract_population, extract_spin, fit_interferogram,
    identity2, path_projector_observable, postselected_state, predicted_table, preselected_state,
    product_rule_gap, run_cheshire_experiment, scan, sigma_z, tensor, truncation_residue,
    CheshireRun, Measured, Method, Path as BeamPath, Port, RunParams, ScanMode, Scenario,
    ScenarioLabel, WeakValueEstimate,
};
use num_complex::Complex64;

use crate::config::{ConfigMode, RunConfig};
use crate::csvio::{parse_scan_csv, write_scan_csv};
use crate::error::CliError;
use crate::output::{
    measured_row, write_atomic, write_json, AnalysisDoc, EstimateRow, FitDoc, ParamsEcho,
    PredictedRow, ProductRuleGap, ScanFitDoc, Table1Doc, WeakValueRecord, WeakValuesDoc,
    SCHEMA_VERSION,
};

fn fmt_complex(z: Complex64) -> String {
    format!("{:+.6} {:+.6}i", z.re, z.im)
}

const ESTIMATE_OBSERVABLES: [&str; 4] = [
    "<Pi_I>_w",
    "<Pi_II>_w",
    "|<sigma_z Pi_I>_w|^2",
    "|<sigma_z Pi_II>_w|^2",
];

/// Print and save the four theoretical weak values and the product-rule gap
/// for the postselection at `post_chi` radians.
pub fn cmd_weak_values(config: &RunConfig, out_dir: &Path, post_chi: f64) -> Result<(), CliError> {
    config.validate()?;
    if !post_chi.is_finite() {
        return Err(CliError::Config(format!(
            "post-chi must be finite, got {post_chi}"
        )));
    }

    let records = cheshire_weak_values(post_chi);
    let gap = product_rule_gap(
        &preselected_state(),
        &postselected_state(post_chi),
        &tensor(sigma_z(), identity2()),
        &path_projector_observable(BeamPath::II),
    )
    .map_err(|e| CliError::Pipeline(e.to_string()))?;

    println!("Weak values for postselection at chi = {post_chi} rad");
    println!("  {:<24} value", "observable");
    for r in &records {
        println!("  {:<24} {}", r.observable_label, fmt_complex(r.value));
    }
    println!();
    println!("  {:<24} value", "predicted (reporting form)");
    for (label, value) in predicted_table() {
        println!("  {label:<24} {value}");
    }
    println!();
    println!(
        "  product-rule gap <sigma_z . Pi_II>_w - <sigma_z>_w <Pi_II>_w = {}",
        fmt_complex(gap)
    );

    let doc = WeakValuesDoc {
        schema_version: SCHEMA_VERSION,
        post_chi_rad: post_chi,
        weak_values: records
            .iter()
            .map(|r| WeakValueRecord {
                observable: r.observable_label.clone(),
                pre: r.pre_label.clone(),
                post: r.post_label.clone(),
                value: r.value.into(),
            })
            .collect(),
        predicted_table: predicted_table()
            .into_iter()
            .map(|(observable, value)| PredictedRow { observable, value })
            .collect(),
        product_rule_gap: ProductRuleGap {
            observable_a: "sigma_z x id".to_string(),
            observable_b: "id x Pi_II".to_string(),
            value: gap.into(),
        },
    };
    write_json(&out_dir.join("weak_values.json"), &doc)?;
    Ok(())
}

fn scenario_from_label(label: ScenarioLabel, config: &RunConfig) -> Result<Scenario, CliError> {
    Ok(match label {
        ScenarioLabel::Ref => Scenario::reference(),
        ScenarioLabel::AbsI => Scenario::with_absorber(BeamPath::I, config.transmissivity)?,
        ScenarioLabel::AbsII => Scenario::with_absorber(BeamPath::II, config.transmissivity)?,
        ScenarioLabel::MagI => Scenario::with_larmor_probe(BeamPath::I, config.alpha_rad())?,
        ScenarioLabel::MagII => Scenario::with_larmor_probe(BeamPath::II, config.alpha_rad())?,
    })
}

/// Simulate one scenario scan: `scan_<label>.csv` plus `fit_<label>.json`.
pub fn cmd_scan(
    config: &RunConfig,
    out_dir: &Path,
    label: ScenarioLabel,
    seed_override: Option<u64>,
) -> Result<(), CliError> {
    config.validate()?;
    let scenario = scenario_from_label(label, config)?;
    let interferogram = scan(
        &scenario,
        &config.chi_grid(),
        config.flux,
        config.dwell,
        config.scan_mode(seed_override),
    )?;

    let csv_path = out_dir.join(format!("scan_{label}.csv"));
    write_atomic(&csv_path, write_scan_csv(&interferogram).as_bytes())?;

    let o_fit = fit_interferogram(&interferogram, Port::O)
        .map_err(|e| CliError::DegenerateFit(format!("{label} O port: {e}")))?;
    let h_fit = fit_interferogram(&interferogram, Port::H)
        .map_err(|e| CliError::DegenerateFit(format!("{label} H port: {e}")))?;
    let fit_path = out_dir.join(format!("fit_{label}.json"));
    write_json(
        &fit_path,
        &ScanFitDoc {
            schema_version: SCHEMA_VERSION,
            scenario: label,
            o: FitDoc::from(&o_fit),
            h: FitDoc::from(&h_fit),
        },
    )?;

    println!(
        "{label}: O chi=0 rate {:.4} +- {:.4} counts/s, contrast {:.4}; wrote {} and {}",
        o_fit.intensity_at_zero,
        o_fit.sigma_intensity_at_zero,
        o_fit.contrast,
        csv_path.display(),
        fit_path.display()
    );
    Ok(())
}

/// Inverse-variance weighted mean over repetitions of one intensity.
fn pool_intensities(values: &[Measured]) -> Measured {
    if values.len() == 1 {
        return values[0];
    }
    let mut wsum = 0.0;
    let mut vsum = 0.0;
    for m in values {
        let w = 1.0 / (m.sigma * m.sigma);
        wsum += w;
        vsum += w * m.value;
    }
    Measured::new(vsum / wsum, (1.0 / wsum).sqrt())
}

/// Run the full five-scenario pipeline with repetitions and aggregate.
pub fn cmd_table1(
    config: &RunConfig,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<(), CliError> {
    config.validate()?;
    let seed = seed_override.unwrap_or(config.seed);
    let reps = config.repetitions;

    let mut runs: Vec<CheshireRun> = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let mode = match config.mode {
            ConfigMode::Analytic => ScanMode::Analytic,
            // One independent stream family per repetition.
            ConfigMode::Stochastic => ScanMode::Stochastic {
                seed: seed.wrapping_add(rep as u64),
            },
        };
        let params = RunParams {
            transmissivity: config.transmissivity_measured(),
            alpha: config.alpha_rad(),
            flux: config.flux,
            dwell: config.dwell,
            chi_grid: config.chi_grid(),
            mode,
        };
        runs.push(run_cheshire_experiment(&params)?);
    }

    let estimates: Vec<WeakValueEstimate> = (0..4)
        .map(|i| {
            let series: Vec<WeakValueEstimate> = runs.iter().map(|r| r.estimates[i]).collect();
            aggregate(&series).map_err(|e| CliError::Pipeline(e.to_string()))
        })
        .collect::<Result<_, _>>()?;

    let intensities: Vec<_> = ScenarioLabel::ALL
        .iter()
        .map(|&label| {
            let series: Vec<Measured> = runs
                .iter()
                .map(|r| {
                    let sc = r
                        .scenarios
                        .iter()
                        .find(|s| s.label == label)
                        .expect("all labels present");
                    Measured::new(sc.o_fit.intensity_at_zero, sc.o_fit.sigma_intensity_at_zero)
                })
                .collect();
            measured_row(label, pool_intensities(&series))
        })
        .collect();

    let theory = runs[0].theory;
    let residues = runs[0].truncation_residues;
    let doc = Table1Doc {
        schema_version: SCHEMA_VERSION,
        parameters: ParamsEcho::new(config, seed),
        intensities_at_zero: intensities,
        estimates: estimates
            .iter()
            .zip(ESTIMATE_OBSERVABLES)
            .enumerate()
            .map(|(i, (est, observable))| EstimateRow {
                observable: observable.to_string(),
                method: est.method,
                path: est.path,
                value: est.value,
                sigma: est.sigma,
                theory: theory[i],
                truncation_residue: residues[i],
            })
            .collect(),
    };
    let path = out_dir.join("table1.json");
    write_json(&path, &doc)?;

    let mode_name = match config.mode {
        ConfigMode::Analytic => "analytic",
        ConfigMode::Stochastic => "stochastic",
    };
    println!("Weak-value summary ({mode_name} mode, {reps} repetition(s), seed {seed})");
    println!();
    println!(
        "  {:<22} {:>20} {:>20} {:>14}",
        "observable", "path I", "path II", "theory (I, II)"
    );
    println!(
        "  {:<22} {:>13.3} +- {:<5.3} {:>13.3} +- {:<5.3} {:>13}",
        "<Pi_j>_w",
        estimates[0].value,
        estimates[0].sigma,
        estimates[1].value,
        estimates[1].sigma,
        "0, 1"
    );
    println!(
        "  {:<22} {:>13.3} +- {:<5.3} {:>13.3} +- {:<5.3} {:>13}",
        "|<sigma_z Pi_j>_w|^2",
        estimates[2].value,
        estimates[2].sigma,
        estimates[3].value,
        estimates[3].sigma,
        "1, 0"
    );
    println!();
    println!("  truncation residue of the linearized extraction on exact data:");
    for (i, observable) in ESTIMATE_OBSERVABLES.iter().enumerate() {
        println!("    {observable:<22} {:+.6}", residues[i]);
    }
    println!();
    println!("  wrote {}", path.display());
    Ok(())
}

/// Re-analyze externally supplied interferogram CSVs: fit the target and the
/// reference, then extract the weak value the scenario probes.
pub fn cmd_analyze(
    config: &RunConfig,
    out_dir: &Path,
    file: &Path,
    ref_file: &Path,
    label: ScenarioLabel,
) -> Result<(), CliError> {
    config.validate()?;
    let (method, beam_path) = match (label.method(), label.path()) {
        (Some(m), Some(p)) => (m, p),
        _ => {
            return Err(CliError::UnknownScenario(format!(
                "scenario {label} has nothing to extract; use ABS_I, ABS_II, MAG_I or MAG_II"
            )))
        }
    };

    let read = |p: &Path| -> Result<String, CliError> {
        std::fs::read_to_string(p).map_err(|e| CliError::InputParse {
            path: p.display().to_string(),
            line: 0,
            message: e.to_string(),
        })
    };
    let target = parse_scan_csv(&read(file)?, &file.display().to_string())?;
    let reference = parse_scan_csv(&read(ref_file)?, &ref_file.display().to_string())?;

    let fit_port = |g, label: &str| {
        fit_interferogram(g, Port::O).map_err(|e| CliError::DegenerateFit(format!("{label}: {e}")))
    };
    let target_fit = fit_port(&target, "target")?;
    let reference_fit = fit_port(&reference, "reference")?;

    let i_ref = Measured::new(
        reference_fit.intensity_at_zero,
        reference_fit.sigma_intensity_at_zero,
    );
    let i_probe = Measured::new(
        target_fit.intensity_at_zero,
        target_fit.sigma_intensity_at_zero,
    );
    let estimate = match method {
        Method::Abs => {
            extract_population(i_ref, i_probe, config.transmissivity_measured(), beam_path)?
        }
        Method::Mag => extract_spin(i_ref, i_probe, config.alpha_rad(), beam_path)?,
    };

    let theory = match (method, beam_path) {
        (Method::Abs, BeamPath::I) => 0.0,
        (Method::Abs, BeamPath::II) => 1.0,
        (Method::Mag, BeamPath::I) => 1.0,
        (Method::Mag, BeamPath::II) => 0.0,
    };
    let residue = truncation_residue(method, beam_path, config.transmissivity, config.alpha_rad());

    let doc = AnalysisDoc {
        schema_version: SCHEMA_VERSION,
        scenario: label,
        method,
        path: beam_path,
        reference_fit: FitDoc::from(&reference_fit),
        target_fit: FitDoc::from(&target_fit),
        value: estimate.value,
        sigma: estimate.sigma,
        theory,
        truncation_residue: residue,
    };
    let path = out_dir.join("analysis.json");
    write_json(&path, &doc)?;

    let observable = match method {
        Method::Abs => format!("<Pi_{beam_path}>_w"),
        Method::Mag => format!("|<sigma_z Pi_{beam_path}>_w|^2"),
    };
    println!(
        "{label}: {observable} = {:.4} +- {:.4} (theory {theory}, linearization residue {residue:+.4}); wrote {}",
        estimate.value,
        estimate.sigma,
        path.display()
    );
    Ok(())
}
