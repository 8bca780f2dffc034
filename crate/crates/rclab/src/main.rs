//! Command-line front end: generate family members, embed them into
//! lattices, run the scaling-law checker, simulate boundary flux, play
//! Turing machines against the one-dimensional automaton, evaluate
//! capacity bounds, and sweep families across dimensions.
//!
//! Exit codes: 0 on success/pass, 1 when a checked constraint fails,
//! 2 on usage errors.  All artifacts are written atomically and are
//! byte-identical across reruns with the same configuration and seed.

use std::collections::VecDeque;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rclab::attention::{
    head_scaling_csv, head_scaling_curve, joint_min_time, min_time_landauer, min_time_throughput,
    AttentionParams,
};
use rclab::checker::{check_rc, RealizabilityReport};
use rclab::circuit::Circuit;
use rclab::embed::{
    embed_greedy, embed_layered_shells, embedding_stats, verify_embedding, Placer,
};
use rclab::flux::{
    annulus_achievability, fit_crossing_exponent, run as run_flux, FluxConfig, FluxRule,
    FluxTrace, InitPattern,
};
use rclab::recurrent::{run_lockstep, TuringMachine};
use rclab::report::{fmt_num, svg_line_chart, write_atomic, Scale, Series, Table};
use rclab::uniform::{parity_member, FamilyId};

#[derive(Parser)]
#[command(
    name = "rclab",
    version,
    about = "Lattice-embedded circuit laboratory: scaling laws, flux bounds, machine equivalence"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a circuit family member and emit its text encoding.
    Gen(GenArgs),
    /// Embed one circuit into a lattice and report its measurements.
    Embed(EmbedArgs),
    /// Run the realizability law checker over a family sweep.
    Check(CheckArgs),
    /// Simulate token flux against a causal sphere.
    Flux(FluxArgs),
    /// Run a Turing machine in lockstep with the 1-D lattice automaton.
    Tm(TmArgs),
    /// Evaluate attention capacity and minimum-time bounds.
    Bounds(BoundsArgs),
    /// Sweep a family over several dimensions and assemble a report.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliFamily {
    Parity,
}

impl CliFamily {
    fn id(self) -> FamilyId {
        match self {
            CliFamily::Parity => FamilyId::Parity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliPlacer {
    Shell,
    Greedy,
}

impl CliPlacer {
    fn placer(self) -> Placer {
        match self {
            CliPlacer::Shell => Placer::Shell,
            CliPlacer::Greedy => Placer::Greedy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct GenArgs {
    /// Circuit family.
    #[arg(long, value_enum, default_value_t = CliFamily::Parity)]
    family: CliFamily,
    /// Member size (number of inputs).
    #[arg(long)]
    n: u32,
    /// Destination file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Circuit family (ignored when --circuit is given).
    #[arg(long, value_enum, default_value_t = CliFamily::Parity)]
    family: CliFamily,
    /// Member size; mutually exclusive with --circuit.
    #[arg(long)]
    n: Option<u32>,
    /// Path to an encoded circuit file; mutually exclusive with --n.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Lattice dimension.
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, value_enum, default_value_t = CliPlacer::Shell)]
    placer: CliPlacer,
    /// Directory for the measurement artifact; stdout summary only when omitted.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value_t = CliFamily::Parity)]
    family: CliFamily,
    /// Lattice dimension.
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Comma-separated member sizes.
    #[arg(long, default_value = "8,12,16,24,32,48,64")]
    sizes: String,
    #[arg(long, value_enum, default_value_t = CliPlacer::Shell)]
    placer: CliPlacer,
    /// Directory the report file is written to.
    #[arg(long, default_value = "rclab-out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct FluxArgs {
    /// Lattice dimension.
    #[arg(long)]
    d: u32,
    /// Movement rule.
    #[arg(long, value_enum, default_value_t = CliRule::Radial)]
    rule: CliRule,
    /// Initial occupancy: empty, origin, ball:R, or annulus:IN,OUT.
    #[arg(long, default_value = "origin")]
    init: String,
    /// Sphere radius at tick 0.
    #[arg(long, default_value_t = 0)]
    r0: i64,
    /// Sphere growth per tick.
    #[arg(long, default_value_t = 1)]
    c_ball: i64,
    #[arg(long, default_value_t = 50)]
    ticks: u32,
    /// RNG seed; mandatory for the random-walk rule.
    #[arg(long)]
    seed: Option<u64>,
    /// Run the thin-annulus achievability construction at this relative
    /// width instead of a plain simulation.
    #[arg(long)]
    eps: Option<f64>,
    /// Directory for the trace artifact; stdout summary only when omitted.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliRule {
    Outflow,
    Inflow,
    Radial,
    Tangential,
    RandomWalk,
    Zero,
}

#[derive(Args)]
struct TmArgs {
    /// Bundled machine name (unary-increment, immediate-halt,
    /// busy-beaver, flipper) or a path to a machine description file.
    #[arg(long)]
    machine: String,
    /// Initial tape as a symbol string.
    #[arg(long, default_value = "")]
    tape: String,
    /// Maximum machine steps to verify.
    #[arg(long, default_value_t = 10_000)]
    ticks: u32,
    /// Spare lattice cells on each side of the tape.
    #[arg(long, default_value_t = 16)]
    margin: usize,
}

#[derive(Args)]
struct BoundsArgs {
    /// Lattice dimension (or supply --params).
    #[arg(long)]
    d: Option<u32>,
    /// Parameter file in the `attn v1` format.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Information demand in bits; prints the throughput time bound.
    #[arg(long = "I", value_name = "BITS")]
    i_star: Option<f64>,
    /// Erasure demand in bits; prints the dissipation time bound.
    #[arg(long = "E", value_name = "BITS")]
    e_req: Option<f64>,
    #[arg(long)]
    heads: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    c_head: Option<f64>,
    #[arg(long)]
    k_d: Option<f64>,
    #[arg(long)]
    eta_d: Option<f64>,
    #[arg(long)]
    t_env: Option<f64>,
    /// Comma-separated head counts: emit the head-scaling curve.
    #[arg(long)]
    curve: Option<String>,
    /// Directory for curve artifacts; stdout only when omitted.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = CliFamily::Parity)]
    family: CliFamily,
    /// Comma-separated dimensions to sweep.
    #[arg(long, default_value = "2,3")]
    d_list: String,
    /// Comma-separated member sizes.
    #[arg(long, default_value = "8,12,16,24,32,48,64")]
    sizes: String,
    #[arg(long, value_enum, default_value_t = CliPlacer::Shell)]
    placer: CliPlacer,
    #[arg(long, default_value = "rclab-out")]
    out_dir: PathBuf,
    /// csv or json for the summary; svg additionally draws the
    /// makespan chart.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// A command that could not complete: either the invocation was wrong
/// (exit 2) or a checked constraint genuinely failed (exit 1).
enum Failure {
    Usage(String),
    Constraint(String),
}

type CmdResult = Result<(), Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Embed(a) => cmd_embed(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Flux(a) => cmd_flux(a),
        Cmd::Tm(a) => cmd_tm(a),
        Cmd::Bounds(a) => cmd_bounds(a),
        Cmd::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Constraint(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

/// `100` for near-integers, six decimals otherwise.
fn fmt_compact(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 && x.abs() < 1e15 {
        format!("{}", x.round() as i64)
    } else {
        fmt_num(x)
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    let items: Result<Vec<T>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(Failure::Usage(format!(
            "{what} must be a comma-separated list, got `{text}`"
        ))),
    }
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    write_atomic(&path, contents.as_bytes())
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn table_artifact(
    dir: &Path,
    stem: &str,
    kind: &str,
    table: &Table,
    format: Format,
) -> Result<PathBuf, Failure> {
    let (name, contents) = match format {
        Format::Csv => (format!("{stem}.csv"), table.to_csv(kind)),
        Format::Json => (format!("{stem}.json"), table.to_json(kind)),
        Format::Svg => {
            return Err(Failure::Usage(
                "svg is only available for commands that draw curves".into(),
            ))
        }
    };
    write_artifact(dir, &name, &contents)
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let circuit = build_member(a.family, a.n)?;
    let text = circuit.encode();
    match a.out {
        Some(path) => {
            write_atomic(&path, text.as_bytes())
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            println!(
                "wrote {} ({} gates, {} nands)",
                path.display(),
                circuit.gates.len(),
                circuit.nand_count()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn build_member(family: CliFamily, n: u32) -> Result<Circuit, Failure> {
    match family.id() {
        FamilyId::Parity => parity_member(n).map_err(usage),
    }
}

fn cmd_embed(a: EmbedArgs) -> CmdResult {
    let (label, circuit) = match (&a.circuit, a.n) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let circuit = Circuit::decode(&text).map_err(usage)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "circuit".into());
            (stem, circuit)
        }
        (None, Some(n)) => (format!("parity-n{n}"), build_member(a.family, n)?),
        _ => {
            return Err(Failure::Usage(
                "give exactly one of --n or --circuit".into(),
            ))
        }
    };

    // The shell placer levels the circuit first and places that; verify
    // against whichever circuit was actually embedded.
    let (embedding, placed) = match a.placer.placer() {
        Placer::Shell => {
            let (e, leveled) = embed_layered_shells(&circuit, a.d).map_err(usage)?;
            (e, leveled.circuit)
        }
        Placer::Greedy => (embed_greedy(&circuit, a.d).map_err(usage)?, circuit),
    };
    let violations = verify_embedding(&embedding, &placed);
    if !violations.is_empty() {
        let mut msg = format!("embedding violates {} constraint(s):", violations.len());
        for v in violations.iter().take(5) {
            msg.push_str(&format!("\n  {v}"));
        }
        return Err(Failure::Constraint(msg));
    }
    let stats = embedding_stats(&embedding);
    println!(
        "{} in d={} ({:?}): makespan={} radius={} size={} maxcut={}",
        label, a.d, a.placer.placer(), stats.makespan, stats.radius, stats.size, stats.maxcut
    );

    if let Some(dir) = a.out_dir {
        let mut table = Table::new(&["circuit", "d", "placer", "makespan", "radius", "size", "maxcut"]);
        table
            .push(vec![
                label.clone(),
                a.d.to_string(),
                format!("{:?}", a.placer.placer()).to_lowercase(),
                stats.makespan.to_string(),
                stats.radius.to_string(),
                stats.size.to_string(),
                stats.maxcut.to_string(),
            ])
            .map_err(usage)?;
        let path = table_artifact(&dir, &format!("embed-{label}-d{}", a.d), "embed", &table, a.format)?;
        println!("report: {}", path.display());
    }
    Ok(())
}

fn report_lines(report: &RealizabilityReport) -> String {
    let mut out = String::new();
    let verdict = |pass: bool| if pass { "pass" } else { "FAIL" };
    out.push_str(&format!(
        "size law:  slope {} <= {}  {}\n",
        fmt_num(report.size_law.slope),
        fmt_num(report.size_law.limit),
        verdict(report.size_law.pass)
    ));
    out.push_str(&format!(
        "width law: slope {} <= {}  {}\n",
        fmt_num(report.width_law.slope),
        fmt_num(report.width_law.limit),
        verdict(report.width_law.pass)
    ));
    out.push_str(&format!(
        "gate law:  fan-in {} <= 2, fan-out {} <= {}  {}\n",
        report.gate_law.max_fan_in,
        report.gate_law.max_fan_out,
        report.gate_law.fanout_bound,
        verdict(report.gate_law.pass)
    ));
    out.push_str(&format!(
        "min-time:  K_fit {}, worst margin {}  {}\n",
        fmt_num(report.min_time.k_fit),
        report.min_time.worst_margin,
        verdict(report.min_time.pass)
    ));
    for (n, err) in &report.gaps {
        out.push_str(&format!("gap: n={n} ({err})\n"));
    }
    out
}

fn points_table(report: &RealizabilityReport) -> Table {
    let mut table = Table::new(&["n", "makespan", "size", "maxcut"]);
    for p in &report.points {
        table
            .push(vec![
                p.n.to_string(),
                p.makespan.to_string(),
                p.size.to_string(),
                p.maxcut.to_string(),
            ])
            .expect("fixed shape");
    }
    table
}

fn cmd_check(a: CheckArgs) -> CmdResult {
    let sizes: Vec<u32> = parse_list(&a.sizes, "--sizes")?;
    let report = check_rc(a.family.id(), &sizes, a.d, a.placer.placer()).map_err(usage)?;
    println!(
        "family = {:?}, d = {}, placer = {:?}, sizes = {}",
        report.family, report.d, report.placer, a.sizes
    );
    print!("{}", report_lines(&report));

    let path = table_artifact(
        &a.out_dir,
        &format!("check-parity-d{}", a.d),
        "check",
        &points_table(&report),
        a.format,
    )?;
    println!("report: {}", path.display());
    if report.pass {
        println!("PASS");
        Ok(())
    } else {
        Err(Failure::Constraint("realizability laws FAILED".into()))
    }
}

fn parse_init(text: &str) -> Result<InitPattern, Failure> {
    let lower = text.trim().to_lowercase();
    if lower == "empty" {
        return Ok(InitPattern::Empty);
    }
    if lower == "origin" {
        return Ok(InitPattern::Origin);
    }
    if let Some(r) = lower.strip_prefix("ball:") {
        let r = r
            .parse()
            .map_err(|_| usage(format!("bad ball radius `{r}`")))?;
        return Ok(InitPattern::Ball { r });
    }
    if let Some(rest) = lower.strip_prefix("annulus:") {
        let parts: Vec<i64> = parse_list(rest, "annulus bounds")?;
        if parts.len() == 2 {
            return Ok(InitPattern::Annulus {
                inner: parts[0],
                outer: parts[1],
            });
        }
    }
    Err(Failure::Usage(format!(
        "bad --init `{text}`; expected empty, origin, ball:R, or annulus:IN,OUT"
    )))
}

fn flux_table(trace: &FluxTrace) -> Table {
    let mut table = Table::new(&[
        "tick",
        "radius",
        "radius_crossed",
        "crossings_in",
        "crossings_out",
        "bound",
        "blocked",
    ]);
    for row in &trace.rows {
        table
            .push(vec![
                row.tick.to_string(),
                row.radius.to_string(),
                row.radius_crossed.to_string(),
                row.crossings_in.to_string(),
                row.crossings_out.to_string(),
                row.bound.to_string(),
                row.blocked.to_string(),
            ])
            .expect("fixed shape");
    }
    table
}

fn cmd_flux(a: FluxArgs) -> CmdResult {
    if let Some(eps) = a.eps {
        let report = annulus_achievability(a.d, eps, a.ticks).map_err(usage)?;
        println!(
            "achievability d={} eps={} r0={} width={} ticks={}",
            report.d,
            fmt_compact(report.eps),
            report.r0,
            report.width,
            a.ticks
        );
        println!(
            "min fraction of bound over [T/2, T]: {}",
            fmt_num(report.min_fraction_tail)
        );
        if let Some(dir) = a.out_dir {
            let mut table = Table::new(&["tick", "crossings", "bound", "fraction"]);
            for (row, frac) in report.rows.iter().zip(&report.fractions) {
                table
                    .push(vec![
                        row.tick.to_string(),
                        row.gross().to_string(),
                        row.bound.to_string(),
                        fmt_num(*frac),
                    ])
                    .expect("fixed shape");
            }
            let stem = format!("flux-achievability-d{}", a.d);
            let path = table_artifact(&dir, &stem, "flux", &table, a.format)?;
            println!("report: {}", path.display());
        }
        return Ok(());
    }

    let rule = match a.rule {
        CliRule::Outflow => FluxRule::Outflow,
        CliRule::Inflow => FluxRule::Inflow,
        CliRule::Radial => FluxRule::Radial,
        CliRule::Tangential => FluxRule::Tangential,
        CliRule::RandomWalk => match a.seed {
            Some(seed) => FluxRule::RandomWalk { seed },
            None => {
                return Err(Failure::Usage(
                    "--seed is mandatory for the random-walk rule".into(),
                ))
            }
        },
        CliRule::Zero => FluxRule::ZeroVelocity,
    };
    let init = parse_init(&a.init)?;
    let config = FluxConfig::standard(a.d, rule, init, a.r0, a.c_ball, a.ticks);
    let trace = run_flux(&config).map_err(usage)?;

    println!(
        "d={} rule={:?} tokens={} ticks={}",
        trace.d,
        a.rule,
        trace.token_count,
        trace.rows.len()
    );
    println!(
        "crossings: in={} out={} blocked={}",
        trace.cumulative_in, trace.cumulative_out, trace.total_blocked
    );
    match fit_crossing_exponent(&trace) {
        Ok(fit) => println!("crossing exponent: {}", fmt_num(fit.slope)),
        Err(_) => println!("crossing exponent: n/a"),
    }
    if let Some(dir) = a.out_dir {
        let stem = format!("flux-d{}-{:?}", a.d, a.rule).to_lowercase();
        let path = table_artifact(&dir, &stem, "flux", &flux_table(&trace), a.format)?;
        println!("report: {}", path.display());
    }
    if let Some(row) = trace.rows.iter().find(|r| !r.net_within_bound()) {
        return Err(Failure::Constraint(format!(
            "net crossings exceed the bound at tick {}: |{} - {}| > {}",
            row.tick, row.crossings_in, row.crossings_out, row.bound
        )));
    }
    Ok(())
}

fn load_machine(name: &str) -> Result<TuringMachine, Failure> {
    match name {
        "unary-increment" => Ok(TuringMachine::unary_increment()),
        "immediate-halt" => Ok(TuringMachine::immediate_halt()),
        "busy-beaver" => Ok(TuringMachine::busy_beaver_3_2()),
        "flipper" => Ok(TuringMachine::two_cell_flipper()),
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("no bundled machine or readable file `{path}`: {e}")))?;
            TuringMachine::parse(&text).map_err(usage)
        }
    }
}

fn cmd_tm(a: TmArgs) -> CmdResult {
    let tm = load_machine(&a.machine)?;
    let tape = tm.tape_from_str(&a.tape).map_err(usage)?;
    let report = run_lockstep(&tm, &tape, a.ticks, a.margin).map_err(|e| {
        Failure::Constraint(format!("lockstep could not complete: {e}"))
    })?;
    println!(
        "machine={} steps={} halted={} stable_after_halt={}",
        a.machine, report.ticks, report.halted, report.stable_after_halt
    );
    println!("final tape: {:?}", report.final_tape);
    match report.divergence {
        None => {
            println!("lockstep: machine and lattice agree on every tick");
            Ok(())
        }
        Some(div) => Err(Failure::Constraint(format!(
            "DIVERGENCE at tick {} position {}: expected {:?}, found {:?}",
            div.tick, div.position, div.expected, div.found
        ))),
    }
}

fn cmd_bounds(a: BoundsArgs) -> CmdResult {
    let mut params = match (&a.params, a.d) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            AttentionParams::parse(&text).map_err(usage)?
        }
        (None, Some(d)) => AttentionParams::normalized(d),
        (None, None) => {
            return Err(Failure::Usage("give --d or --params".into()));
        }
    };
    if let (Some(d), Some(_)) = (a.d, &a.params) {
        params.d = d;
    }
    for (slot, value) in [
        (&mut params.heads, a.heads),
        (&mut params.kappa, a.kappa),
        (&mut params.c_head, a.c_head),
        (&mut params.k_d, a.k_d),
        (&mut params.eta_d, a.eta_d),
        (&mut params.t_env, a.t_env),
    ] {
        if let Some(v) = value {
            *slot = v;
        }
    }
    params.validate().map_err(usage)?;

    let mut did_something = false;
    match (a.i_star, a.e_req) {
        (Some(i_star), Some(e_req)) => {
            let r = joint_min_time(i_star, e_req, &params).map_err(usage)?;
            println!("T_throughput = {}", fmt_compact(r.t_throughput));
            println!("T_landauer = {}", fmt_compact(r.t_landauer));
            println!("T = {} (binding: {})", fmt_compact(r.t_joint), r.binding.as_str());
            did_something = true;
        }
        (Some(i_star), None) => {
            let t = min_time_throughput(i_star, &params).map_err(usage)?;
            println!("T = {}", fmt_compact(t));
            did_something = true;
        }
        (None, Some(e_req)) => {
            let t = min_time_landauer(e_req, &params).map_err(usage)?;
            println!("T = {}", fmt_compact(t));
            did_something = true;
        }
        (None, None) => {}
    }

    if let Some(curve) = &a.curve {
        let h_values: Vec<f64> = parse_list(curve, "--curve")?;
        let i_star = a.i_star.unwrap_or(1.0);
        let points = head_scaling_curve(&h_values, i_star, &params).map_err(usage)?;
        for p in &points {
            println!(
                "H = {}: T = {} (x{})",
                fmt_compact(p.heads),
                fmt_num(p.t),
                fmt_num(p.ratio)
            );
        }
        if let Some(dir) = &a.out_dir {
            let csv = format!("# rclab head-curve v1\n{}", head_scaling_csv(&points));
            let path = write_artifact(dir, "head-curve.csv", &csv)?;
            println!("report: {}", path.display());
            if a.format == Format::Svg {
                let series = Series::new(
                    &format!("d={}", params.d),
                    points.iter().map(|p| (p.heads, p.ratio)).collect(),
                );
                let svg = svg_line_chart(
                    "head scaling",
                    "heads",
                    "T(H)/T(1)",
                    &[series],
                    Scale::LogLog,
                )
                .map_err(usage)?;
                let path = write_artifact(dir, "head-curve.svg", &svg)?;
                println!("chart: {}", path.display());
            }
        }
        did_something = true;
    }

    if did_something {
        Ok(())
    } else {
        Err(Failure::Usage(
            "nothing to compute: give --I, --E, or --curve".into(),
        ))
    }
}

/// Worker-pool size: RC_LAB_THREADS when set, else available
/// parallelism, never more than the task count.
fn thread_budget(tasks: usize) -> usize {
    let configured = std::env::var("RC_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1);
    let fallback = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    configured.unwrap_or(fallback).min(tasks.max(1))
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let d_list: Vec<u32> = parse_list(&a.d_list, "--d-list")?;
    let sizes: Vec<u32> = parse_list(&a.sizes, "--sizes")?;
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| usage(format!("cannot create {}: {e}", a.out_dir.display())))?;

    // Concurrent phase: one task per dimension, each writing its own
    // per-point artifacts atomically.
    let queue: Mutex<VecDeque<u32>> = Mutex::new(d_list.iter().copied().collect());
    let results: Mutex<Vec<(u32, Result<RealizabilityReport, String>)>> = Mutex::new(Vec::new());
    let workers = thread_budget(d_list.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let Some(d) = queue.lock().unwrap().pop_front() else {
                    return;
                };
                let outcome = check_rc(a.family.id(), &sizes, d, a.placer.placer())
                    .map_err(|e| e.to_string());
                if let Ok(report) = &outcome {
                    for p in &report.points {
                        let mut table = Table::new(&["n", "makespan", "size", "maxcut"]);
                        table
                            .push(vec![
                                p.n.to_string(),
                                p.makespan.to_string(),
                                p.size.to_string(),
                                p.maxcut.to_string(),
                            ])
                            .expect("fixed shape");
                        let name = format!("point-d{}-n{}.csv", d, p.n);
                        let _ = write_atomic(
                            &a.out_dir.join(name),
                            table.to_csv("sweep-point").as_bytes(),
                        );
                    }
                }
                results.lock().unwrap().push((d, outcome));
            });
        }
    });

    // Single-threaded assembly of the final report.
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(d, _)| *d);
    let mut summary = Table::new(&[
        "d",
        "points",
        "size_slope",
        "size_limit",
        "width_slope",
        "width_limit",
        "k_fit",
        "worst_margin",
        "pass",
    ]);
    let mut chart: Vec<Series> = Vec::new();
    let mut all_pass = true;
    for (d, outcome) in &results {
        match outcome {
            Err(e) => {
                all_pass = false;
                println!("d = {d}: sweep failed ({e})");
            }
            Ok(report) => {
                println!("d = {d}:");
                print!("{}", report_lines(report));
                all_pass &= report.pass;
                summary
                    .push(vec![
                        d.to_string(),
                        report.points.len().to_string(),
                        fmt_num(report.size_law.slope),
                        fmt_num(report.size_law.limit),
                        fmt_num(report.width_law.slope),
                        fmt_num(report.width_law.limit),
                        fmt_num(report.min_time.k_fit),
                        report.min_time.worst_margin.to_string(),
                        report.pass.to_string(),
                    ])
                    .expect("fixed shape");
                chart.push(Series::new(
                    &format!("d={d}"),
                    report
                        .points
                        .iter()
                        .map(|p| (p.n as f64, p.makespan as f64))
                        .collect(),
                ));
            }
        }
    }
    let summary_format = if a.format == Format::Svg {
        Format::Csv
    } else {
        a.format
    };
    let path = table_artifact(&a.out_dir, "sweep-summary", "sweep", &summary, summary_format)?;
    println!("report: {}", path.display());
    if a.format == Format::Svg && !chart.is_empty() {
        let svg = svg_line_chart("makespan scaling", "n", "makespan", &chart, Scale::LogLog)
            .map_err(usage)?;
        let path = write_artifact(&a.out_dir, "sweep-makespan.svg", &svg)?;
        println!("chart: {}", path.display());
    }
    if all_pass {
        println!("PASS");
        Ok(())
    } else {
        Err(Failure::Constraint("sweep FAILED".into()))
    }
}
