use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hcontour",
    version,
    about = "Outer contour of honeycomb-block blanks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect the outer contour of a PGM image.
    Detect(DetectArgs),
    /// Generate a synthetic honeycomb blank and its ground-truth mask.
    Synth(SynthArgs),
    /// Score a contour JSON against a ground-truth mask (prints IoU).
    Eval(EvalArgs),
    /// Run both detectors over the built-in shapes and parameter grid.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Direct,
    Sliding,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Direct => "direct",
            Algorithm::Sliding => "sliding",
        }
    }
}

/// Fixed threshold or Otsu's automatic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinThreshold {
    Fixed(u8),
    Otsu,
}

impl FromStr for BinThreshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("otsu") {
            return Ok(BinThreshold::Otsu);
        }
        match s.parse::<i64>() {
            Ok(v) if (0..=255).contains(&v) => Ok(BinThreshold::Fixed(v as u8)),
            Ok(v) => Err(format!("{v} is not in 0..=255")),
            Err(_) => Err(format!(
                "'{s}' is neither an integer in 0..=255 nor \"otsu\""
            )),
        }
    }
}

/// Image size written as `WxH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Size {
    pub width: usize,
    pub height: usize,
}

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("'{s}' is not of the form WxH"))?;
        let parse = |v: &str| -> Result<usize, String> {
            match v.trim().parse::<usize>() {
                Ok(0) => Err("width and height must be at least 1".to_string()),
                Ok(n) => Ok(n),
                Err(_) => Err(format!("'{v}' is not a positive integer")),
            }
        };
        Ok(Size {
            width: parse(w)?,
            height: parse(h)?,
        })
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Detector to run.
    #[arg(long = "algo", value_enum, default_value = "sliding")]
    pub algo: Algorithm,
    /// Input PGM (P5 or P2).
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the contour JSON [default: standard output].
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Where to write an SVG overlay of the contour on the input image.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    /// Reference the raster in the overlay by this href instead of embedding it.
    #[arg(long)]
    pub overlay_href: Option<String>,
    /// Binarization threshold (0..=255) or "otsu".
    #[arg(long, default_value = "otsu")]
    pub bin_threshold: BinThreshold,
    /// Direct scan: longest black run inside the block [default: 2*pitch, or 20].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub run_limit: Option<u32>,
    /// Direct scan: narrowest accepted row span [default: 10].
    #[arg(long, value_parser = clap::value_parser!(u32))]
    pub min_width: Option<u32>,
    /// Direct scan: expected cell pitch in pixels, sets the run-limit default.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub pitch: Option<u32>,
    /// Sliding matrix: window side length [default: 8].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub core: Option<u32>,
    /// Sliding matrix: window stride [default: 8].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub step: Option<u32>,
    /// Sliding matrix: fill when the window mean exceeds this [default: 40].
    #[arg(long, value_parser = clap::value_parser!(u8))]
    pub fill_threshold: Option<u8>,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Cell pitch (centre-to-centre spacing) in pixels.
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u32).range(1..))]
    pub pitch: u32,
    /// Wall band width in pixels.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub wall: u32,
    /// Image size.
    #[arg(long, default_value = "400x300")]
    pub size: Size,
    /// Seed for speck placement.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// "rect", "c-shape", or a JSON polygon file ([[x,y],...] or {"points": [...]}).
    #[arg(long, default_value = "rect")]
    pub shape: String,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Isolated noise pixels outside the blank.
    #[arg(long, default_value_t = 0)]
    pub specks: usize,
    /// Output image PGM.
    #[arg(long, default_value = "synth.pgm")]
    pub output: PathBuf,
    /// Output ground-truth mask PGM.
    #[arg(long, default_value = "synth_mask.pgm")]
    pub mask: PathBuf,
    /// Also write the blank outline as contour JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Contour JSON produced by `detect` (or any {"points": [[x,y],...]}).
    #[arg(long)]
    pub json: PathBuf,
    /// Ground-truth mask PGM; pixels above 127 count as inside.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated shape presets to run.
    #[arg(long, value_delimiter = ',', default_value = "rect,c-shape")]
    pub cases: Vec<String>,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Speck count for the noisy variant of every case.
    #[arg(long, default_value_t = 50)]
    pub specks: usize,
    /// Binarization threshold (0..=255) or "otsu".
    #[arg(long, default_value = "otsu")]
    pub bin_threshold: BinThreshold,
    /// Directory receiving reports, contours, masks and the summary.
    #[arg(long, default_value = "bench_out")]
    pub out_dir: PathBuf,
}
