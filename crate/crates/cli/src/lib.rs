//! `hcontour` command-line front end.
//!
//! Exit codes: 0 success, 1 no contour found, 2 usage or I/O error.

pub mod args;
pub mod output;

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use hcontour_core::synthbench::{
    validate_polygon, DEFAULT_BACKGROUND_LUMINANCE, DEFAULT_WALL_LUMINANCE,
};
use hcontour_core::{
    assemble_contour, binarize, compare, detect_sliding, direct_scan, generate, iou,
    otsu_threshold, rasterize_contour, read_pgm, write_pgm, Contour, GrayImage, ScanParams,
    ShapePreset, ShapeSpec, SlideError, SlidingParams,
};
use thiserror::Error;

use args::{Algorithm, BenchArgs, BinThreshold, Cli, Command, DetectArgs, EvalArgs, SynthArgs};
use output::{contour_json, parse_points, svg_overlay, ContourParams};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    NoContour(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NoContour(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Runs a parsed command. Regular output goes to `out`, warnings to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Detect(a) => cmd_detect(&a, out, err),
        Command::Synth(a) => cmd_synth(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn load_pgm(path: &Path) -> Result<GrayImage> {
    read_pgm(&read_file(path)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write output: {e}")))
}

fn warn(err: &mut dyn Write, msg: &str) {
    let _ = writeln!(err, "warning: {msg}");
}

fn resolve_threshold(image: &GrayImage, t: BinThreshold) -> (u8, &'static str) {
    match t {
        BinThreshold::Fixed(v) => (v, "fixed"),
        BinThreshold::Otsu => (otsu_threshold(image), "otsu"),
    }
}

pub fn cmd_detect(a: &DetectArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let image = load_pgm(&a.input)?;
    let (threshold, mode) = resolve_threshold(&image, a.bin_threshold);
    let bin = binarize(&image, threshold);

    let ignored: Vec<&str> = match a.algo {
        Algorithm::Direct => [
            ("--core", a.core.is_some()),
            ("--step", a.step.is_some()),
            ("--fill-threshold", a.fill_threshold.is_some()),
        ]
        .iter()
        .filter(|(_, set)| *set)
        .map(|(f, _)| *f)
        .collect(),
        Algorithm::Sliding => [
            ("--run-limit", a.run_limit.is_some()),
            ("--min-width", a.min_width.is_some()),
            ("--pitch", a.pitch.is_some()),
        ]
        .iter()
        .filter(|(_, set)| *set)
        .map(|(f, _)| *f)
        .collect(),
    };
    for flag in ignored {
        warn(
            err,
            &format!(
                "{flag} does not apply to --algo {} and is ignored",
                a.algo.name()
            ),
        );
    }

    let mut params = ContourParams {
        bin_threshold: Some(threshold),
        threshold_mode: Some(mode),
        ..Default::default()
    };
    let contour = match a.algo {
        Algorithm::Direct => {
            let defaults = ScanParams::default_for_pitch(a.pitch.map(|p| p as usize));
            let scan = ScanParams::new(
                a.run_limit.map_or(defaults.run_limit(), |v| v as usize),
                a.min_width.map_or(defaults.min_width(), |v| v as usize),
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            params.run_limit = Some(scan.run_limit());
            params.min_width = Some(scan.min_width());
            assemble_contour(&direct_scan(&bin, &scan))
                .map_err(|e| CliError::NoContour(e.to_string()))?
        }
        Algorithm::Sliding => {
            let defaults = SlidingParams::default();
            let slide = SlidingParams::new(
                a.core.map_or(defaults.core(), |v| v as usize),
                a.step.map_or(defaults.step(), |v| v as usize),
                a.fill_threshold.unwrap_or(defaults.fill_threshold()),
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            if slide.step_exceeds_advice() {
                warn(
                    err,
                    &format!(
                        "step exceeds 2*core (step {}, core {}); bands between windows stay unfilled",
                        slide.step(),
                        slide.core()
                    ),
                );
            }
            params.core = Some(slide.core());
            params.step = Some(slide.step());
            params.fill_threshold = Some(slide.fill_threshold());
            detect_sliding(&bin, &slide).map_err(|e| match e {
                SlideError::NoContours => CliError::NoContour(e.to_string()),
                other => CliError::Usage(other.to_string()),
            })?
        }
    };

    let json = contour_json(a.algo.name(), &contour, &params);
    match &a.json {
        Some(path) => write_file(path, json.as_bytes())?,
        None => emit(out, &json)?,
    }
    if let Some(path) = &a.overlay {
        let svg = svg_overlay(&image, &contour, a.overlay_href.as_deref());
        write_file(path, svg.as_bytes())?;
    }
    Ok(())
}

fn load_polygon(shape: &str, size: (usize, usize)) -> Result<Vec<hcontour_core::Point>> {
    if let Some(preset) = ShapePreset::from_name(shape) {
        return Ok(preset.polygon(size.0, size.1));
    }
    let path = Path::new(shape);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "--shape '{shape}' is neither a preset (rect, c-shape) nor an existing polygon file"
        )));
    }
    let text = String::from_utf8(read_file(path)?)
        .map_err(|_| CliError::Usage(format!("{}: polygon file is not UTF-8", path.display())))?;
    parse_points(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let size = (a.lattice.size.width, a.lattice.size.height);
    let polygon = load_polygon(&a.shape, size)?;
    validate_polygon(&polygon, size)
        .map_err(|e| CliError::Usage(format!("invalid polygon: {e}")))?;
    let spec = ShapeSpec {
        polygon: polygon.clone(),
        cell_pitch: f64::from(a.lattice.pitch),
        wall_thickness: f64::from(a.lattice.wall),
        image_size: size,
        speck_count: a.specks,
        speck_seed: a.lattice.seed,
        wall_luminance: DEFAULT_WALL_LUMINANCE,
        background_luminance: DEFAULT_BACKGROUND_LUMINANCE,
    };
    let (image, truth) = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&a.output, &write_pgm(&image))?;
    write_file(&a.mask, &write_pgm(&truth.mask))?;
    if let Some(path) = &a.json {
        let json = contour_json("truth", &Contour::new(polygon), &ContourParams::default());
        write_file(path, json.as_bytes())?;
    }
    emit(
        out,
        &format!("wrote {} and {}\n", a.output.display(), a.mask.display()),
    )
}

/// IoU between a contour file and a mask file.
pub fn eval_iou(contour_path: &Path, mask_path: &Path) -> Result<f64> {
    let text = String::from_utf8(read_file(contour_path)?)
        .map_err(|_| CliError::Io(format!("{}: not UTF-8", contour_path.display())))?;
    let points = parse_points(&text)
        .map_err(|e| CliError::Io(format!("{}: {e}", contour_path.display())))?;
    let truth = binarize(&load_pgm(mask_path)?, 127);
    let raster = rasterize_contour(&Contour::new(points), (truth.width(), truth.height()));
    iou(&raster, &truth).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let score = eval_iou(&a.json, &a.input)?;
    emit(out, &format!("{score:.4}\n"))
}

/// One entry of the bench grid.
#[derive(Debug, Clone)]
pub struct BenchCase {
    pub name: String,
    pub preset: ShapePreset,
    pub specks: usize,
    pub core: usize,
}

/// Presets x {clean, noisy} x core {8, 16}, with step equal to core.
pub fn bench_grid(presets: &[ShapePreset], noisy_specks: usize) -> Vec<BenchCase> {
    let mut cases = Vec::new();
    for &preset in presets {
        let mut speck_levels = vec![0];
        if noisy_specks > 0 {
            speck_levels.push(noisy_specks);
        }
        for &specks in &speck_levels {
            for core in [8, 16] {
                cases.push(BenchCase {
                    name: format!("{}-s{}-k{}", preset.name(), specks, core),
                    preset,
                    specks,
                    core,
                });
            }
        }
    }
    cases
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let mut presets = Vec::new();
    for name in &a.cases {
        let preset = ShapePreset::from_name(name.trim()).ok_or_else(|| {
            CliError::Usage(format!(
                "--cases: unknown case '{name}' (expected rect, c-shape)"
            ))
        })?;
        if !presets.contains(&preset) {
            presets.push(preset);
        }
    }
    let size = (a.lattice.size.width, a.lattice.size.height);
    let pitch = a.lattice.pitch as usize;
    let scan = ScanParams::default_for_pitch(Some(pitch));

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{:<20} {:>10} {:>10} {:>12} {:>11} {:>9}",
        "case", "direct_iou", "direct_ms", "sliding_iou", "sliding_ms", "contours"
    );
    for case in bench_grid(&presets, a.specks) {
        let spec = ShapeSpec::preset(
            case.preset,
            size,
            f64::from(a.lattice.pitch),
            f64::from(a.lattice.wall),
            case.specks,
            a.lattice.seed,
        );
        let (image, truth) =
            generate(&spec).map_err(|e| CliError::Usage(format!("{}: {e}", case.name)))?;
        let (threshold, mode) = resolve_threshold(&image, a.bin_threshold);
        let slide = SlidingParams::new(
            case.core,
            case.core,
            hcontour_core::slidefill::DEFAULT_FILL_THRESHOLD,
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        let report = compare(&image, &truth, &scan, &slide, threshold);

        let dir = &a.out_dir;
        write_file(
            &dir.join(format!("{}.json", case.name)),
            (report.to_json() + "\n").as_bytes(),
        )?;
        write_file(
            &dir.join(format!("{}_mask.pgm", case.name)),
            &write_pgm(&truth.mask),
        )?;
        let base = ContourParams {
            bin_threshold: Some(threshold),
            threshold_mode: Some(mode),
            ..Default::default()
        };
        if let Some(c) = &report.direct.contour {
            let params = ContourParams {
                run_limit: Some(scan.run_limit()),
                min_width: Some(scan.min_width()),
                ..base.clone()
            };
            write_file(
                &dir.join(format!("{}_direct.json", case.name)),
                contour_json("direct", c, &params).as_bytes(),
            )?;
        }
        if let Some(c) = &report.sliding.contour {
            let params = ContourParams {
                core: Some(slide.core()),
                step: Some(slide.step()),
                fill_threshold: Some(slide.fill_threshold()),
                ..base
            };
            write_file(
                &dir.join(format!("{}_sliding.json", case.name)),
                contour_json("sliding", c, &params).as_bytes(),
            )?;
        }
        let _ = writeln!(
            summary,
            "{:<20} {:>10.4} {:>10.3} {:>12.4} {:>11.3} {:>9}",
            case.name,
            report.direct.iou,
            report.direct.ms,
            report.sliding.iou,
            report.sliding.ms,
            report.sliding.contours_found
        );
    }
    write_file(&a.out_dir.join("summary.txt"), summary.as_bytes())?;
    emit(out, &summary)
}
