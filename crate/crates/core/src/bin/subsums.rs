use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use subsums::classify::{cardinality_class, kakeya_classify, sum_range, steinitz::DEFAULT_SUM_DEPTH};
use subsums::construct::{
    density_witness, liouville_bound_check, open_set_witness, pi03::DEFAULT_PI03_INDEX, pi03_blocks,
    riemann_rearrange, section_witness, LiouvilleFamily, OpenSetFamily, DEFAULT_WITNESS_STEPS,
};
use subsums::engine::{box_cover, enumerate_exact};
use subsums::gap::GapFn;
use subsums::io::config::{parse_floats, parse_window};
use subsums::io::{cover_csv, cover_pgm, cover_svg, enumeration_csv, Frame, OutputFormat, RunConfig};
use subsums::series::catalog::{NAMES, PARAMETERIZED};
use subsums::series::TailPattern;
use subsums::{catalog_get, Error, Result, Selection, SeriesSpec};

#[derive(Parser)]
#[command(name = "subsums", version, about = "Achievement sets and sum ranges of convergent series")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format where a command supports several.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SeriesArg {
    /// Catalog name, `liouville(EXPR)`, `example-3.3(D)`, or a JSON spec file.
    #[arg(long)]
    series: String,
}

impl SeriesArg {
    fn load(&self) -> Result<SeriesSpec> {
        if self.series.ends_with(".json") && Path::new(&self.series).exists() {
            let spec = SeriesSpec::from_json(&std::fs::read_to_string(&self.series)?)?;
            spec.validate()?;
            return Ok(spec);
        }
        Ok(catalog_get(&self.series)?.spec)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// List catalog entries or show one.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    Classify {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long, conflicts_with = "cardinality")]
        kakeya: bool,
        #[arg(long)]
        cardinality: bool,
    },
    /// Distinct subsums of the first N terms, exactly.
    Enumerate {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long)]
        depth: u64,
    },
    Cover {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long)]
        depth: u64,
        /// `lo0,hi0[,lo1,hi1]`
        #[arg(long)]
        window: Option<String>,
    },
    /// Draw a cover as PGM or SVG.
    Render {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long)]
        depth: u64,
        /// `WxH`
        #[arg(long, default_value = "512x512")]
        resolution: String,
        #[arg(long)]
        window: Option<String>,
    },
    /// Reorder a conditionally convergent series toward a target sum.
    Rearrange {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long, allow_hyphen_values = true)]
        target: f64,
        #[arg(long)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_WITNESS_STEPS)]
        max_steps: u64,
    },
    Sumrange {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long, default_value_t = DEFAULT_SUM_DEPTH)]
        depth: u64,
    },
    Witness {
        kind: WitnessKind,
        #[command(flatten)]
        series: SeriesArg,
        /// `x,y`
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_WITNESS_STEPS)]
        max_steps: u64,
    },
    /// Blocks steering the host's partial sums between 0 and 2^-v(n).
    Pi03 {
        /// Comma-separated prefix of v.
        #[arg(long)]
        v: String,
        #[arg(long, default_value = "alternating-harmonic")]
        host: String,
        #[arg(long, default_value_t = DEFAULT_PI03_INDEX)]
        max_index: u64,
    },
    /// Dyadic approximation certificate for a Liouville-type subsum.
    LiouvilleCheck {
        #[arg(long)]
        gap: String,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        k0: u64,
        /// `all`, `empty`, `odd`, `even` or comma-separated indices.
        #[arg(long, default_value = "all")]
        selection: String,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessKind {
    Density,
    Openset,
    Section,
}

fn parse_selection(s: &str) -> Result<Selection> {
    let pattern = |modulus, residue| Selection::new([], vec![TailPattern { start: 1, modulus, residue }]);
    match s.trim() {
        "all" => Ok(Selection::all()),
        "empty" | "" => Ok(Selection::empty()),
        "odd" => pattern(2, 1),
        "even" => pattern(2, 0),
        list => {
            let idx: std::result::Result<Vec<u64>, _> = list.split(',').map(|t| t.trim().parse::<u64>()).collect();
            let idx = idx.map_err(|_| Error::Parse(format!("bad selection {s:?}")))?;
            Selection::new(idx, vec![])
        }
    }
}

fn pair(s: &str) -> Result<[f64; 2]> {
    match parse_floats(s)?.as_slice() {
        &[x, y] => Ok([x, y]),
        _ => Err(Error::Parse(format!("expected \"x,y\", got {s:?}"))),
    }
}

enum Artifact {
    Text(String),
    Bytes(Vec<u8>),
}

fn json<T: Serialize>(v: &T) -> Result<Artifact> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(Artifact::Text(s))
}

fn resolution(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("resolution must look like 640x480, got {s:?}"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 || w * h > 1 << 26 {
        return Err(bad());
    }
    Ok((w, h))
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    let out_format = cli.out.as_deref().and_then(OutputFormat::from_path);
    if let Some(f) = cli.format.or(out_format) {
        cfg.format = f;
    }
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let window = |flag: &Option<String>| -> Result<_> {
        Ok(match flag {
            Some(w) => Some(parse_window(w)?),
            None => cfg.window.clone(),
        })
    };

    let artifact = match &cli.cmd {
        Cmd::Catalog { action: CatalogCmd::List } => json(&json!({ "names": NAMES, "parameterized": PARAMETERIZED }))?,
        Cmd::Catalog { action: CatalogCmd::Show { name } } => json(&catalog_get(name)?)?,
        Cmd::Classify { series, kakeya, cardinality } => {
            let spec = series.load()?;
            if *kakeya {
                json(&kakeya_classify(&spec)?)?
            } else if *cardinality {
                json(&json!({ "cardinality": cardinality_class(&spec)? }))?
            } else {
                let k = kakeya_classify(&spec).map_err(|e| e.to_string());
                let c = cardinality_class(&spec).map_err(|e| e.to_string());
                json(&json!({ "kakeya": k, "cardinality": c }))?
            }
        }
        Cmd::Enumerate { series, depth } => {
            let spec = series.load()?;
            let vals = enumerate_exact(&spec, *depth, &cfg.limits)?;
            match cfg.format {
                OutputFormat::Csv => Artifact::Text(enumeration_csv(&vals, spec.dimension)?),
                OutputFormat::Json => json(&vals)?,
                f => return Err(Error::Parse(format!("enumerate cannot write {f:?}"))),
            }
        }
        Cmd::Cover { series, depth, window: w } => {
            let spec = series.load()?;
            let cover = box_cover(&spec, *depth, window(w)?.as_ref(), &cfg.limits)?;
            match cfg.format {
                OutputFormat::Csv => Artifact::Text(cover_csv(&cover)?),
                OutputFormat::Json => json(&cover)?,
                f => return Err(Error::Parse(format!("use `render` for {f:?} output"))),
            }
        }
        Cmd::Render { series, depth, resolution: res, window: w } => {
            let spec = series.load()?;
            let w = window(w)?;
            let cover = box_cover(&spec, *depth, w.as_ref(), &cfg.limits)?;
            let frame = Frame::for_cover(&cover, w.as_ref())?;
            match cfg.format {
                OutputFormat::Svg => Artifact::Text(cover_svg(&cover, &frame)),
                OutputFormat::Pgm => {
                    let (wd, ht) = resolution(res)?;
                    Artifact::Bytes(cover_pgm(&cover, &frame, wd, ht)?)
                }
                f => return Err(Error::Parse(format!("render writes pgm or svg, not {f:?}"))),
            }
        }
        Cmd::Rearrange { series, target, tol, max_steps } => {
            json(&riemann_rearrange(&series.load()?, *target, *tol, *max_steps)?)?
        }
        Cmd::Sumrange { series, depth } => json(&sum_range(&series.load()?, *depth)?)?,
        Cmd::Witness { kind, series, target, eps, max_steps } => {
            let t = pair(target)?;
            let eps = eps.unwrap_or(cfg.eps);
            match kind {
                WitnessKind::Density => json(&density_witness(&series.load()?, &t, eps, *max_steps)?)?,
                WitnessKind::Section => json(&section_witness(&series.load()?, t, eps, *max_steps)?)?,
                WitnessKind::Openset => {
                    let family = match series.series.as_str() {
                        "example-4.3" => OpenSetFamily::example_43(),
                        "example-4.4" => OpenSetFamily::example_44(),
                        other => {
                            return Err(Error::InvalidSpec(format!(
                                "open-set witnesses need example-4.3 or example-4.4, not {other}"
                            )))
                        }
                    };
                    json(&open_set_witness(&family, t, eps, *max_steps)?)?
                }
            }
        }
        Cmd::Pi03 { v, host, max_index } => {
            let v: std::result::Result<Vec<u32>, _> = v.split(',').map(|t| t.trim().parse::<u32>()).collect();
            let v = v.map_err(|_| Error::Parse("v must be comma-separated nonnegative integers".into()))?;
            json(&pi03_blocks(&catalog_get(host)?.spec, &v, *max_index)?)?
        }
        Cmd::LiouvilleCheck { gap, r, k0, selection } => {
            let family = LiouvilleFamily::new(gap.parse::<GapFn>()?)?;
            json(&liouville_bound_check(&family, &parse_selection(selection)?, *k0, *r)?)?
        }
    };

    let bytes = match artifact {
        Artifact::Text(s) => s.into_bytes(),
        Artifact::Bytes(b) => b,
    };
    match &cli.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
