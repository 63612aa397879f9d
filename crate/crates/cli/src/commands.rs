use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use sweepwidth::{
    analytic_w, calculate_w, compare_tables, lrc_of, read_results, run_experiment, sweep_all,
    write_results, Catalog, ExperimentConfig, Format, HumanEye, HumanEyeConfig, Mode,
    ModelConstants, ReferenceTable, ResultRecord, RunMetadata, Scenario,
};

use crate::{Cli, Command, FormatArg, ModeArg, ModelArgs, RunArgs, ScenarioArgs};

struct Model {
    constants: ModelConstants,
    eye: HumanEyeConfig,
    catalog: Catalog,
    objects_source: String,
}

impl Model {
    fn from_args(args: &ModelArgs) -> Result<Self> {
        let constants = ModelConstants {
            sea_length_m: args.sea_length_m,
            ..ModelConstants::default()
        };
        constants.validate()?;
        let eye = HumanEyeConfig::from_nm_mm(args.lambda_nm, args.pupil_mm)?;
        let (catalog, objects_source) = match &args.objects {
            Some(path) => {
                let file = File::open(path)
                    .with_context(|| format!("cannot open objects file {}", path.display()))?;
                let parsed = Catalog::load(file)
                    .with_context(|| format!("objects file {}", path.display()))?;
                (parsed.value, path.display().to_string())
            }
            None => (Catalog::default_catalog(), "builtin".to_string()),
        };
        Ok(Model {
            constants,
            eye,
            catalog,
            objects_source,
        })
    }

    fn metadata(&self) -> RunMetadata {
        let mut m = RunMetadata::new();
        m.push("lambda_nm", self.eye.wavelength_m * 1e9)
            .push("pupil_mm", self.eye.pupil_diameter_m * 1e3)
            .push("sea_length_m", self.constants.sea_length_m)
            .push(
                "unlimited_visibility_km",
                self.constants.unlimited_visibility_km,
            )
            .push("objects", &self.objects_source);
        m
    }

    fn experiment(&self, run: &RunArgs) -> ExperimentConfig {
        ExperimentConfig {
            rows: run.rows,
            columns: self.constants.sea_length_m,
            seed: run.seed,
            stream: 0,
            mode: match run.mode {
                ModeArg::Mc => Mode::MonteCarlo,
                ModeArg::Exhaustive => Mode::Exhaustive,
            },
        }
    }

    fn scenario(&self, args: &ScenarioArgs) -> Result<Scenario> {
        let object = self
            .catalog
            .get(&args.object)
            .ok_or_else(|| anyhow!("unknown object {:?}", args.object))?
            .clone();
        Ok(Scenario::with_constants(
            object,
            args.alt,
            args.vis,
            &self.constants,
        )?)
    }
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_in(path: &PathBuf) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

pub fn run(cli: Cli) -> Result<()> {
    let model = Model::from_args(&cli.model)?;
    match cli.command {
        Command::Sweep { run, out, format } => {
            let cfg = model.experiment(&run);
            let results = sweep_all(&model.catalog, &model.constants, &model.eye, &cfg)?;
            let records: Vec<ResultRecord> = results.iter().map(ResultRecord::from).collect();
            let mut meta = model.metadata();
            meta.push("mode", cfg.mode)
                .push("seed", cfg.seed)
                .push("rows", cfg.opportunities());
            let mut sink = open_out(out.as_deref())?;
            write_results(&mut sink, &records, &meta, format_of(format))?;
            sink.flush()?;
            log::info!("wrote {} results", records.len());
        }
        Command::Lrc { scenario, run, out } => {
            let scenario = model.scenario(&scenario)?;
            let cfg = model.experiment(&run);
            let eye = HumanEye::new(model.eye)?;
            let data = run_experiment(&eye, &scenario, &cfg)?;
            let lrc = lrc_of(&data, cfg.columns);
            let w = calculate_w(&data);
            let mut meta = model.metadata();
            meta.push("object", format!("{:?}", scenario.object.name))
                .push("altitude_m", scenario.altitude_m)
                .push("visibility_km", scenario.visibility_km)
                .push("mode", cfg.mode)
                .push("seed", cfg.seed)
                .push("rows", cfg.opportunities())
                .push("w_km", w)
                .push("unobserved", lrc.unobserved());
            let mut sink = open_out(out.as_deref())?;
            writeln!(sink, "{meta}")?;
            lrc.write_csv(&mut sink)?;
            sink.flush()?;
        }
        Command::Oracle { scenario } => {
            let scenario = model.scenario(&scenario)?;
            let w = analytic_w(&model.eye, &scenario, &model.constants)?;
            println!("{w}");
        }
        Command::Compare {
            model: model_path,
            reference,
            out,
            format,
        } => {
            let records = read_results(open_in(&model_path)?)
                .with_context(|| format!("results file {}", model_path.display()))?;
            let table = ReferenceTable::load(open_in(&reference)?, Some(&model.catalog))
                .with_context(|| format!("reference table {}", reference.display()))?
                .value;
            let report = compare_tables(&records, &table);
            let s = &report.summary;
            let to_stdout = out.is_none();
            let mut sink = open_out(out.as_deref())?;
            report.write(&mut sink, format_of(format))?;
            sink.flush()?;
            if !to_stdout {
                println!(
                    "cells compared: {}, MAPE: {}, missing in model: {}, missing in reference: {}",
                    s.cells_compared,
                    s.mape_percent
                        .map_or_else(|| "n/a".to_string(), |m| format!("{m}%")),
                    s.missing_in_model,
                    s.missing_in_reference
                );
            }
        }
    }
    Ok(())
}
