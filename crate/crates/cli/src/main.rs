//! `natdensity` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, input or evaluation error, 2 a checked
//! property failed.

mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use natdensity::adversary::{
    build_adversarial_set, shinv_nonpreservation_demo, AdversaryParams, FileWitnessSource, ShInvWitnessSource,
    WitnessSource,
};
use natdensity::covering::{
    construct_covering_sh, evaluate_covering, search_violation, witness_shinv, CoveringInstance,
};
use natdensity::density::{check_thm1, estimate_limits, sample_points, prefix_density, ScanMode, Thm1Params};
use natdensity::setspec::{parse_set, SetOptions, SharedSet};
use natdensity::{fndsl, maps, Interval, Rat};
use serde::Serialize;
use serde_json::json;

use output::Format;

mod selftest;

#[derive(Parser, Debug)]
#[command(name = "natdensity", version, about = "Natural density experiments on sets of positive integers")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for scan-heavy commands.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Seed for the random instance generators of `selftest`.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prefix densities and the interval criterion.
    #[command(subcommand)]
    Density(DensityCmd),
    /// Evaluate and check maps.
    #[command(subcommand)]
    Map(MapCmd),
    /// Check maps written in the piecewise DSL.
    #[command(subcommand)]
    Dsl(DslCmd),
    /// The covering condition.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Constructed sets.
    #[command(subcommand)]
    Adversary(AdversaryCmd),
    /// Random cross-checks of the covering evaluator.
    #[command(hide = true)]
    Selftest {
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct SetArgs {
    /// Set specification, e.g. evens, multiples:3, nodensity, bits:FILE.
    #[arg(long)]
    set: String,
    /// Window end for image sets (defaults to the largest n queried).
    #[arg(long)]
    window_end: Option<u64>,
    /// Domain scan bound for DSL maps in image sets.
    #[arg(long)]
    scan_bound: Option<u64>,
}

impl SetArgs {
    fn load(&self, needed: u64) -> anyhow::Result<SharedSet> {
        let opts = SetOptions {
            window_end: self.window_end.unwrap_or(needed),
            scan_bound: self.scan_bound,
        };
        parse_set(&self.set, &opts).with_context(|| format!("loading set {}", self.set))
    }
}

#[derive(Subcommand, Debug)]
enum DensityCmd {
    /// Prefix densities at the sample grid (CSV by default).
    Profile {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = 64)]
        grid: u32,
    },
    /// limsup / liminf estimates from the tail of the sample grid.
    Limits {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value = "1/4")]
        tail: Rat,
        #[arg(long, default_value_t = 64)]
        grid: u32,
    },
    /// Interval densities on +m-intervals past N.
    CheckThm1 {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long = "d")]
        d: Rat,
        #[arg(long)]
        m: Rat,
        #[arg(long)]
        epsilon: Rat,
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        scan_limit: u64,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Subcommand, Debug)]
enum MapCmd {
    /// f(k) for one k.
    Eval {
        #[arg(long)]
        map: String,
        #[arg(long)]
        k: u64,
    },
    /// k,f(k) rows (CSV by default).
    Table {
        #[arg(long)]
        map: String,
        #[arg(long, value_parser = parse_interval)]
        window: Interval,
    },
    /// Injectivity on a window; exit 2 on a collision.
    Verify {
        #[arg(long)]
        map: String,
        #[arg(long, value_parser = parse_interval)]
        window: Interval,
    },
}

#[derive(Subcommand, Debug)]
enum DslCmd {
    /// Totality and injectivity on a window; exit 2 if either fails.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_parser = parse_interval, default_value = "1:65536")]
        window: Interval,
        /// Print the parsed spec in canonical form instead.
        #[arg(long)]
        print: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CoverCmd {
    /// Evaluate an instance file.
    Eval {
        #[arg(long)]
        file: PathBuf,
        /// Exit 2 when the condition fails.
        #[arg(long)]
        verify: bool,
    },
    /// Build the covering of sh⁻¹(I) for the shuffle.
    Construct {
        #[arg(long, default_value = "sh")]
        map: String,
        #[arg(long = "I", value_parser = parse_interval)]
        i: Interval,
        #[arg(long)]
        p: Rat,
        #[arg(long)]
        r: Rat,
    },
    /// Bounded search for an instance where the condition fails.
    Search {
        #[arg(long)]
        map: String,
        #[arg(long)]
        p: Rat,
        #[arg(long)]
        q: Rat,
        #[arg(long)]
        r: Rat,
        #[arg(long)]
        m: Rat,
        #[arg(long = "n")]
        n: u64,
        #[arg(long, default_value_t = 50)]
        budget: usize,
        /// Write the witness as an instance file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The failing instance for sh⁻¹ in block i.
    Witness {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        m: Rat,
        #[arg(long)]
        q: Rat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum AdversaryCmd {
    /// Stage-wise construction; exit 2 if a stage bound fails.
    Build {
        #[arg(long, default_value = "sh-inv")]
        map: String,
        #[arg(long)]
        q: Rat,
        #[arg(long)]
        r: Rat,
        #[arg(long, default_value_t = 8)]
        stages: u32,
        #[arg(long, default_value_t = 1 << 24)]
        window_cap: u64,
        /// Instance file (one object or a list) supplying the witnesses.
        #[arg(long)]
        witnesses: Option<PathBuf>,
        /// Write the set, one member per line.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Density of sh⁻¹(evens) against the evens.
    Demo {
        #[arg(long, default_value_t = 1 << 24)]
        n_max: u64,
    },
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a = a.trim().parse::<u64>().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse::<u64>().map_err(|e| format!("{b:?}: {e}"))?;
    Interval::new(a, b).map_err(|e| e.to_string())
}

/// What a command produced: text for stdout and whether a checked property
/// failed.
struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failed: false }
    }
}

fn open_out(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_json_file(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut w = open_out(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn density(cmd: DensityCmd, format: Option<Format>) -> anyhow::Result<Outcome> {
    match cmd {
        DensityCmd::Profile { set, n_max, grid } => {
            let s = set.load(n_max)?;
            if grid < 8 || n_max == 0 {
                bail!("need n_max >= 1 and grid >= 8");
            }
            let rows: Vec<(u64, Rat)> = sample_points(n_max, grid)
                .into_iter()
                .map(|n| Ok((n, prefix_density(s.as_ref(), n)?)))
                .collect::<natdensity::Result<_>>()?;
            if format == Some(Format::Json) {
                let samples: Vec<_> = rows.iter().map(|(n, d)| json!({"n": n, "density": d})).collect();
                return Ok(Outcome::ok(output::render(
                    Format::Json,
                    "density profile",
                    &json!({"set": s.describe(), "n_max": n_max, "samples": samples}),
                )?));
            }
            let mut out = String::from("n,density_num,density_den,density_float\n");
            for (n, d) in rows {
                out.push_str(&format!("{n},{},{},{}\n", d.numer(), d.denom(), d.decimal12()));
            }
            Ok(Outcome::ok(out))
        }
        DensityCmd::Limits { set, n_max, tail, grid } => {
            let s = set.load(n_max)?;
            let profile = estimate_limits(s.as_ref(), n_max, tail, grid)?;
            let body = json!({
                "set": s.describe(),
                "n_max": n_max,
                "tail_start": profile.tail_start,
                "samples": profile.samples.len(),
                "limsup_est": profile.limsup_est,
                "liminf_est": profile.liminf_est,
            });
            Ok(Outcome::ok(output::render(format.unwrap_or(Format::Json), "density limits", &body)?))
        }
        DensityCmd::CheckThm1 { set, d, m, epsilon, n, scan_limit, mode } => {
            let s = set.load(scan_limit)?;
            let mode = match mode {
                Mode::Auto => ScanMode::Auto,
                Mode::Exhaustive => ScanMode::Exhaustive,
                Mode::Sampled => ScanMode::Sampled,
            };
            let report = check_thm1(s.as_ref(), &Thm1Params { d, m, epsilon, n, scan_limit, mode })?;
            Ok(Outcome::ok(output::render(
                format.unwrap_or(Format::Json),
                "density check-thm1",
                &report,
            )?))
        }
    }
}

fn map_cmd(cmd: MapCmd, format: Option<Format>) -> anyhow::Result<Outcome> {
    match cmd {
        MapCmd::Eval { map, k } => {
            let f = maps::resolve(&map)?;
            let v = f.apply(k)?;
            Ok(Outcome::ok(match format {
                None => format!("{v}\n"),
                Some(fmt) => output::render(fmt, "map eval", &json!({"map": f.name(), "k": k, "value": v}))?,
            }))
        }
        MapCmd::Table { map, window } => {
            let f = maps::resolve(&map)?;
            let rows: Vec<(u64, u64)> = window
                .iter()
                .map(|k| Ok((k, f.apply(k)?)))
                .collect::<natdensity::Result<_>>()?;
            if format == Some(Format::Json) {
                let table: Vec<_> = rows.iter().map(|(k, v)| json!({"k": k, "value": v})).collect();
                return Ok(Outcome::ok(output::render(
                    Format::Json,
                    "map table",
                    &json!({"map": f.name(), "rows": table}),
                )?));
            }
            let mut out = String::from("k,f(k)\n");
            for (k, v) in rows {
                out.push_str(&format!("{k},{v}\n"));
            }
            Ok(Outcome::ok(out))
        }
        MapCmd::Verify { map, window } => {
            let f = maps::resolve(&map)?;
            let report = maps::verify_injective(f.as_ref(), &window)?;
            Ok(Outcome {
                failed: !report.ok,
                text: output::render(
                    format.unwrap_or(Format::Json),
                    "map verify",
                    &json!({"map": f.name(), "report": report}),
                )?,
            })
        }
    }
}

fn dsl_cmd(cmd: DslCmd, format: Option<Format>) -> anyhow::Result<Outcome> {
    let DslCmd::Check { file, window, print } = cmd;
    let spec = fndsl::parse_file(&file)?;
    if print {
        return Ok(Outcome::ok(spec.to_string()));
    }
    let report = fndsl::check(&spec, &window)?;
    Ok(Outcome {
        failed: !report.ok(),
        text: output::render(
            format.unwrap_or(Format::Json),
            "dsl check",
            &json!({"file": file.display().to_string(), "ok": report.ok(), "report": report}),
        )?,
    })
}

fn cover_cmd(cmd: CoverCmd, format: Option<Format>) -> anyhow::Result<Outcome> {
    let fmt = format.unwrap_or(Format::Json);
    match cmd {
        CoverCmd::Eval { file, verify } => {
            let inst = CoveringInstance::load(&file)?;
            let report = evaluate_covering(&inst)?;
            Ok(Outcome {
                failed: verify && !report.condition_holds,
                text: output::render(
                    fmt,
                    "cover eval",
                    &json!({"instance": inst.to_file(), "report": report}),
                )?,
            })
        }
        CoverCmd::Construct { map, i, p, r } => {
            if maps::resolve(&map)?.name() != "sh" {
                bail!("the covering construction is only available for sh");
            }
            let cov = construct_covering_sh(&i, p, r)?;
            Ok(Outcome::ok(output::render(fmt, "cover construct", &cov)?))
        }
        CoverCmd::Search { map, p, q, r, m, n, budget, out } => {
            let f = maps::resolve(&map)?;
            let found = search_violation(&f, p, q, r, m, n, budget)?;
            let body = match &found.witness {
                Some((inst, rep)) => {
                    if let Some(path) = &out {
                        write_json_file(path, &inst.to_file())?;
                    }
                    json!({"map": f.name(), "examined": found.examined, "found": true,
                           "instance": inst.to_file(), "report": rep})
                }
                None => json!({"map": f.name(), "examined": found.examined, "found": false,
                               "note": "no violation found within budget"}),
            };
            Ok(Outcome::ok(output::render(fmt, "cover search", &body)?))
        }
        CoverCmd::Witness { i, m, q, out } => {
            let w = witness_shinv(i, m, q)?;
            if let Some(path) = &out {
                write_json_file(path, &w.instance.to_file())?;
            }
            let mut body = json!({"is_witness": w.is_witness, "instance": w.instance.to_file(), "report": w.report});
            if !w.is_witness {
                body["note"] = json!("q <= 1/2: every interval lands in C, so this is not a violation");
            }
            Ok(Outcome::ok(output::render(fmt, "cover witness", &body)?))
        }
    }
}

fn adversary_cmd(cmd: AdversaryCmd, format: Option<Format>) -> anyhow::Result<Outcome> {
    let fmt = format.unwrap_or(Format::Json);
    match cmd {
        AdversaryCmd::Build { map, q, r, stages, window_cap, witnesses, out, report } => {
            let f = maps::resolve(&map)?;
            let source: Box<dyn WitnessSource> = match &witnesses {
                Some(path) => Box::new(FileWitnessSource::load(path)?),
                None => Box::new(ShInvWitnessSource),
            };
            let params = AdversaryParams { q, r, stages, window_cap };
            let (set, rep) = build_adversarial_set(&f, &params, source.as_ref())?;
            if let Some(path) = &out {
                let mut w = open_out(path)?;
                set.write_to(&mut w)?;
                w.flush()?;
            }
            if let Some(t) = &rep.truncated {
                eprintln!("note: {t}");
            }
            let text = output::render(fmt, "adversary build", &rep)?;
            let failed = !rep.ok;
            match &report {
                Some(path) => {
                    std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
                    Ok(Outcome { text: String::new(), failed })
                }
                None => Ok(Outcome { text, failed }),
            }
        }
        AdversaryCmd::Demo { n_max } => {
            let rep = shinv_nonpreservation_demo(n_max)?;
            let body = json!({
                "n_max": rep.n_max,
                "evens_density": rep.evens_density,
                "image_set": "sh-inv(evens)",
                "limsup_est": rep.profile.limsup_est,
                "liminf_est": rep.profile.liminf_est,
                "tail_start": rep.profile.tail_start,
                "brute_force_window": rep.brute_force_window,
                "brute_force_agrees": rep.brute_force_agrees,
            });
            Ok(Outcome {
                failed: !rep.brute_force_agrees,
                text: output::render(fmt, "adversary demo", &body)?,
            })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
        .context("starting worker threads")?;
    let format = cli.format;
    match cli.command {
        Command::Density(c) => density(c, format),
        Command::Map(c) => map_cmd(c, format),
        Command::Dsl(c) => dsl_cmd(c, format),
        Command::Cover(c) => cover_cmd(c, format),
        Command::Adversary(c) => adversary_cmd(c, format),
        Command::Selftest { cases } => selftest::run(cli.seed, cases, format.unwrap_or(Format::Json)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
            if out.failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("error: {}", chain.join(": "));
            ExitCode::from(1)
        }
    }
}
