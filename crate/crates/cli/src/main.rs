use std::io::{IsTerminal, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dualgraph::cycles::{self, CycleDivisor};
use dualgraph::invariants::{self, Function, FunctionData};
use dualgraph::linalg::{self, format_rational, Rational};
use dualgraph::{blow_up, explore, generate_famille, ArrowKind, BlowupSite, BlowupState, Error, ResolutionGraph};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dualgraph", version, about = "Exact invariants of dual resolution graphs")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress warnings and notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the graph file and report every problem found.
    Validate { file: String },
    /// Multiplicities of f or g on every curve.
    Mult {
        file: String,
        #[arg(long = "fn", value_parser = parse_function)]
        function: Function,
    },
    /// Inner rates from the polar arrows in the file.
    Rates { file: String },
    /// Hironaka quotients m(g)/m(f).
    Hironaka { file: String },
    /// The subgraph A, its zones and singletons, and edge lengths.
    Skeleton { file: String },
    /// Laplacian of a vertex function given as a JSON array of rationals.
    Laplacian {
        file: String,
        #[arg(long)]
        values: String,
    },
    /// Euler characteristic of a cycle given as a JSON array of integers.
    Chi {
        file: String,
        #[arg(long)]
        cycle: String,
    },
    /// Laufer's minimal cycle.
    Mincycle { file: String },
    /// Whether the minimal cycle has Euler characteristic 1.
    Rational { file: String },
    /// Blow up a point: free:V, f:V#K, g:V#K, polar:V#K or edge:V-W#K.
    Blowup {
        file: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the admissible polar vectors.
    Explore { file: String },
    /// Write the family graph for parameter n.
    Famille {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graphviz rendering of the graph.
    Dot { file: String },
}

fn parse_function(s: &str) -> Result<Function, String> {
    s.parse().map_err(|_| format!("expected `f` or `g`, got `{s}`"))
}

enum Failure {
    Input(String),
    Empty(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Empty(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Empty(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) | Error::NonIntegralMultiplicities(_) => Failure::Empty(e.to_string()),
            Error::InconsistentState(_) | Error::Overflow(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

struct Ctx {
    json: bool,
    quiet: bool,
}

impl Ctx {
    fn emit(&self, value: Value, table: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&value).expect("plain JSON value"));
        } else {
            print!("{}", table());
        }
    }

    fn warn(&self, msg: &str) {
        if !self.quiet {
            eprintln!("warning: {msg}");
        }
    }
}

fn read_input(file: &str) -> Result<String, Failure> {
    if file == "-" {
        let mut text = String::new();
        if std::io::stdin().is_terminal() {
            return Err(Failure::Input("`-` given but stdin is a terminal".into()));
        }
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(file).map_err(|e| Failure::Input(format!("{file}: {e}")))
    }
}

fn parse_graph(file: &str) -> Result<ResolutionGraph, Failure> {
    Ok(ResolutionGraph::from_json(&read_input(file)?)?)
}

/// Loads a graph and rejects it unless `validate` finds no errors.
fn load(file: &str, ctx: &Ctx) -> Result<ResolutionGraph, Failure> {
    let graph = parse_graph(file)?;
    let report = graph.validate();
    for issue in report.issues.iter().filter(|i| i.is_warning()) {
        ctx.warn(&issue.to_string());
    }
    if let Some(issue) = report.issues.iter().find(|i| !i.is_warning()) {
        return Err(Failure::Input(format!("invalid graph: {issue}")));
    }
    Ok(graph)
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn ids(graph: &ResolutionGraph, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| graph.id(v).to_string()).collect()
}

/// Aligned columns; the first is left-aligned, the rest right-aligned.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn both(graph: &ResolutionGraph) -> Result<(FunctionData, FunctionData), Failure> {
    Ok((invariants::multiplicities(graph, Function::F)?, invariants::multiplicities(graph, Function::G)?))
}

fn validate(file: &str, ctx: &Ctx) -> Outcome {
    let graph = parse_graph(file)?;
    let report = graph.validate();
    let mut issues: Vec<Value> = report.issues.iter().map(|i| serde_json::to_value(i).expect("plain data")).collect();
    let mut lines: Vec<String> = report.issues.iter().map(ToString::to_string).collect();
    let mut valid = report.is_valid();
    if valid {
        for kind in [Function::F, Function::G] {
            if !graph.has_arrows(kind.arrow_kind()) {
                continue;
            }
            let data = invariants::multiplicities(&graph, kind)?;
            if !data.is_valid() {
                valid = false;
                issues.push(json!({ "issue": "non_integral_multiplicities", "function": kind.to_string() }));
                lines.push(Error::NonIntegralMultiplicities(kind.to_string()).to_string());
            }
        }
    }
    ctx.emit(json!({ "valid": valid, "issues": issues }), || {
        let mut out = String::new();
        for l in &lines {
            out += &format!("{l}\n");
        }
        out += if valid { "valid\n" } else { "invalid\n" };
        out
    });
    Ok(if valid { 0 } else { 1 })
}

fn mult(file: &str, function: Function, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let data = invariants::multiplicities(&graph, function)?;
    if !data.is_valid() {
        ctx.warn(&Error::NonIntegralMultiplicities(function.to_string()).to_string());
    }
    let m = strings(&data.m);
    ctx.emit(
        json!({ "function": function.to_string(), "m": m, "integral": data.integral, "positive": data.positive }),
        || {
            let rows: Vec<Vec<String>> =
                (0..graph.vertex_count()).map(|v| vec![graph.id(v).to_string(), m[v].clone()]).collect();
            table(&["vertex", &format!("m({function})")], &rows)
        },
    );
    Ok(0)
}

fn rates(file: &str, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    if !graph.has_arrows(ArrowKind::Polar) {
        ctx.warn("no polar arrows in the file; computing with P = 0");
    }
    let f = invariants::multiplicities(&graph, Function::F)?;
    let p = graph.arrow_weights(ArrowKind::Polar);
    let rates = invariants::inner_rates(&graph, &f, &p)?;
    let h = if graph.has_arrows(ArrowKind::G) {
        let g = invariants::multiplicities(&graph, Function::G)?;
        Some(strings(&invariants::hironaka(&f, &g)))
    } else {
        None
    };
    let (q, a, m) = (strings(&rates.q), strings(&rates.a), strings(&f.m));
    ctx.emit(
        json!({ "q": q, "a": a, "a_integral": rates.a_integral, "a_positive": rates.a_positive }),
        || {
            let rows: Vec<Vec<String>> = (0..graph.vertex_count())
                .map(|v| {
                    let mut row = vec![graph.id(v).to_string(), m[v].clone()];
                    row.extend(h.as_ref().map(|h| h[v].clone()));
                    row.extend([q[v].clone(), a[v].clone()]);
                    row
                })
                .collect();
            let headers: &[&str] = if h.is_some() { &["vertex", "m(f)", "h", "q", "a"] } else { &["vertex", "m(f)", "q", "a"] };
            table(headers, &rows)
        },
    );
    Ok(0)
}

fn hironaka(file: &str, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let (f, g) = both(&graph)?;
    let h = strings(&invariants::hironaka(&f, &g));
    let (mf, mg) = (strings(&f.m), strings(&g.m));
    ctx.emit(json!({ "h": h }), || {
        let rows: Vec<Vec<String>> = (0..graph.vertex_count())
            .map(|v| vec![graph.id(v).to_string(), mf[v].clone(), mg[v].clone(), h[v].clone()])
            .collect();
        table(&["vertex", "m(f)", "m(g)", "h"], &rows)
    });
    Ok(0)
}

fn skeleton(file: &str, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let (f, g) = both(&graph)?;
    let s = invariants::a_subgraph(&graph, &f, &g)?;
    let lengths = strings(&invariants::edge_lengths(&graph, &f));
    let edge_ids = |e: usize| {
        let (a, b) = graph.edges()[e];
        [graph.id(a).to_string(), graph.id(b).to_string()]
    };
    let zones: Vec<Vec<String>> = s.zones.iter().map(|z| ids(&graph, z)).collect();
    ctx.emit(
        json!({
            "a_vertices": ids(&graph, &s.a_vertices),
            "a_edges": s.a_edges.iter().map(|&e| edge_ids(e)).collect::<Vec<_>>(),
            "zones": zones,
            "singletons": ids(&graph, &s.singletons),
            "edge_lengths": (0..lengths.len())
                .map(|e| json!({ "edge": edge_ids(e), "length": lengths[e] }))
                .collect::<Vec<_>>(),
        }),
        || {
            let mut out = format!("A: {}\n", ids(&graph, &s.a_vertices).join(" "));
            for z in &zones {
                out += &format!("zone: {}\n", z.join(" "));
            }
            out += &format!("singletons: {}\n", ids(&graph, &s.singletons).join(" "));
            let rows: Vec<Vec<String>> = (0..lengths.len())
                .map(|e| {
                    let [a, b] = edge_ids(e);
                    let in_a = if s.a_edges.contains(&e) { "A" } else { "" };
                    vec![format!("{a}-{b}"), lengths[e].clone(), in_a.to_string()]
                })
                .collect();
            out + &table(&["edge", "length", ""], &rows)
        },
    );
    for z in s.non_constant_zones() {
        ctx.warn(&format!("m(g)/m(f) is not constant on zone {{{}}}", zones[z].join(", ")));
    }
    Ok(0)
}

fn laplacian(file: &str, values: &str, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let f = invariants::multiplicities(&graph, Function::F)?;
    let values = linalg::parse_rational_vector(values)?;
    let lap = strings(&invariants::laplacian(&graph, &f, &values)?);
    ctx.emit(json!({ "laplacian": lap }), || {
        let rows: Vec<Vec<String>> = (0..graph.vertex_count())
            .map(|v| vec![graph.id(v).to_string(), format_rational(&values[v]), lap[v].clone()])
            .collect();
        table(&["vertex", "value", "laplacian"], &rows)
    });
    Ok(0)
}

fn chi(file: &str, cycle: &str, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let d = CycleDivisor::from_json(cycle)?;
    let chi = format_rational(&cycles::chi_cycle(&graph, &d)?);
    ctx.emit(json!({ "chi": chi }), || format!("chi = {chi}\n"));
    Ok(0)
}

fn mincycle(file: &str, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let z = cycles::laufer_min_cycle(&graph)?;
    let chi = format_rational(&cycles::chi_cycle(&graph, &z)?);
    ctx.emit(json!({ "cycle": z.0, "chi": chi }), || {
        let rows: Vec<Vec<String>> =
            (0..graph.vertex_count()).map(|v| vec![graph.id(v).to_string(), z.0[v].to_string()]).collect();
        table(&["vertex", "Z"], &rows) + &format!("chi = {chi}\n")
    });
    Ok(0)
}

fn rational(file: &str, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let rational = cycles::is_rational(&graph)?;
    ctx.emit(json!({ "rational": rational }), || format!("{}\n", if rational { "rational" } else { "not rational" }));
    Ok(0)
}

fn blowup(file: &str, at: &str, out: Option<&Path>, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let site = BlowupSite::parse(&graph, at)?;
    let shown = site.display(&graph).to_string();
    let state = BlowupState::from_graph(graph)?;
    let next = blow_up(&state, site).map_err(|e| match e {
        // the state was just computed, so this is the site precondition
        Error::InconsistentState(m) => Failure::Input(format!("cannot blow up {shown}: {m}")),
        e => e.into(),
    })?;
    let w = next.graph.vertex_count() - 1;
    let summary = json!({
        "site": shown,
        "new_vertex": next.graph.id(w),
        "m_f": format_rational(&next.m_f[w]),
        "m_g": format_rational(&next.m_g[w]),
        "q": format_rational(&next.q[w]),
    });
    let summary_table = || {
        let row = vec![
            next.graph.id(w).to_string(),
            format_rational(&next.m_f[w]),
            format_rational(&next.m_g[w]),
            format_rational(&next.q[w]),
        ];
        format!("blew up {shown}\n") + &table(&["vertex", "m(f)", "m(g)", "q"], &[row])
    };
    match out {
        Some(path) => {
            write_output(path, &next.graph.to_json())?;
            ctx.emit(summary, summary_table);
        }
        None => {
            println!("{}", next.graph.to_json());
            if !ctx.quiet {
                eprint!("{}", summary_table());
            }
        }
    }
    Ok(0)
}

fn run_explore(file: &str, ctx: &Ctx) -> Outcome {
    let graph = load(file, ctx)?;
    let result = explore(&graph)?;
    for w in &result.warnings {
        ctx.warn(w);
    }
    if ctx.json {
        let value = serde_json::to_value(&result).expect("plain data");
        println!("{}", serde_json::to_string_pretty(&value).expect("plain JSON value"));
    } else {
        let r = &result.rejected;
        print!(
            "Michel candidates: {}\nrejected: non-integral a {}, non-positive q {}, hironaka mismatch {}, not monotone {}\nadmissible: {}\n",
            result.michel_count,
            r.non_integral_a,
            r.non_positive_q,
            r.hironaka_mismatch,
            r.monotone_fail,
            result.admissible.len()
        );
        for x in &result.admissible {
            let entries: Vec<String> = x
                .p
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(v, p)| format!("{}:{p}", graph.id(v)))
                .collect();
            println!("  P = {}", if entries.is_empty() { "0".to_string() } else { entries.join(" ") });
        }
    }
    if result.admissible.is_empty() {
        return Err(Failure::Empty("no admissible polar vector".into()));
    }
    Ok(0)
}

fn famille(n: usize, out: Option<&Path>) -> Outcome {
    let graph = generate_famille(n)?;
    match out {
        Some(path) => write_output(path, &graph.to_json())?,
        None => println!("{}", graph.to_json()),
    }
    Ok(0)
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn dot(file: &str) -> Outcome {
    let graph = parse_graph(file)?;
    let mut out = String::from("digraph resolution {\n  node [shape=circle];\n");
    for v in graph.vertices() {
        let label = format!("{} ({}, {})", v.id, v.self_int, v.genus);
        out += &format!("  {} [label={}];\n", quoted(&v.id), quoted(&label));
    }
    for &(a, b) in graph.edges() {
        out += &format!("  {} -> {} [dir=none];\n", quoted(graph.id(a)), quoted(graph.id(b)));
    }
    for (i, arrow) in graph.arrows().iter().enumerate() {
        let tip = quoted(&format!("{}{i}", arrow.kind));
        let v = quoted(graph.id(arrow.vertex));
        let label = if arrow.weight > 1 { format!(", label=\"{}\"", arrow.weight) } else { String::new() };
        out += &format!("  {tip} [shape=point, label=\"\"];\n");
        out += &match arrow.kind {
            ArrowKind::F => format!("  {tip} -> {v} [arrowhead=normal{label}];\n"),
            ArrowKind::G => format!("  {v} -> {tip} [arrowhead=normal{label}];\n"),
            ArrowKind::Polar => format!("  {v} -> {tip} [style=dashed, color=red, arrowhead=normal{label}];\n"),
        };
    }
    out += "}\n";
    print!("{out}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("usage error"));
            return ExitCode::from(1);
        }
    };
    let ctx = Ctx { json: cli.json, quiet: cli.quiet };
    let outcome = match &cli.command {
        Command::Validate { file } => validate(file, &ctx),
        Command::Mult { file, function } => mult(file, *function, &ctx),
        Command::Rates { file } => rates(file, &ctx),
        Command::Hironaka { file } => hironaka(file, &ctx),
        Command::Skeleton { file } => skeleton(file, &ctx),
        Command::Laplacian { file, values } => laplacian(file, values, &ctx),
        Command::Chi { file, cycle } => chi(file, cycle, &ctx),
        Command::Mincycle { file } => mincycle(file, &ctx),
        Command::Rational { file } => rational(file, &ctx),
        Command::Blowup { file, at, out } => blowup(file, at, out.as_deref(), &ctx),
        Command::Explore { file } => run_explore(file, &ctx),
        Command::Famille { n, out } => famille(*n, out.as_deref()),
        Command::Dot { file } => dot(file),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
