//! Command-line interface. Flags take precedence over `COALSPEC_*`
//! environment variables, which take precedence over defaults.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! input errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use coalspec_core::dynamics::{
    bs_block_green, bs_green, bs_hitting, bs_transition, bs_transition_exact, kingman_hitting,
    transition_exact_via_triple, transition_via_triple, GreenEntry,
};
use coalspec_core::oracle::fundamental_matrix;
use coalspec_core::partition::DEFAULT_LATTICE_CAP;
use coalspec_core::spectral::{block_triple, triple, verify_triple};
use coalspec_core::{BigRat, Model, PartitionLattice, RatMatrix, SetPartition, SpectralTriple, TripleReport};
use serde_json::{json, Map, Value};

use crate::format::{self, rational, real};
use crate::{parallel, verify};

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Pretty-printed JSON.
    Json,
    /// Flat CSV table with a header row.
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "coalspec", version, about = "Exact spectral tools for the Bolthausen-Sznitman and Kingman coalescents")]
struct Cli {
    /// Largest n whose partition lattice may be enumerated.
    #[arg(long, global = true, env = "COALSPEC_N_CAP", default_value_t = DEFAULT_LATTICE_CAP)]
    n_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Output encoding.
    #[arg(long, value_enum, env = "COALSPEC_FORMAT", default_value = "json")]
    format: Format,
    /// Output file; `-` or absent writes to stdout.
    #[arg(long, env = "COALSPEC_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Common {
    /// Coalescent: bs or kingman.
    #[arg(long, env = "COALSPEC_MODEL", default_value = "bs", value_parser = parse_model)]
    model: Model,
    /// Sample size.
    #[arg(long, env = "COALSPEC_N")]
    n: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate the partitions of {1..n} in lattice order.
    Lattice {
        /// Sample size.
        #[arg(long, env = "COALSPEC_N")]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// The generator matrix.
    Qmatrix {
        #[command(flatten)]
        common: Common,
        /// Block-counting generator instead of the partition-level one.
        #[arg(long)]
        block: bool,
        #[command(flatten)]
        output: Output,
    },
    /// The triple R, D, L with an exact verification report.
    Spectral {
        #[command(flatten)]
        common: Common,
        /// Block-counting triple instead of the partition-level one.
        #[arg(long)]
        block: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Transition probabilities from one partition, at time t or exactly at x = e^-t.
    #[command(group(ArgGroup::new("when").required(true).args(["t", "x"])))]
    Transition {
        #[command(flatten)]
        common: Common,
        /// Time.
        #[arg(long, env = "COALSPEC_T")]
        t: Option<f64>,
        /// Exact rational x = e^-t, e.g. 1/2.
        #[arg(long, value_parser = parse_rational)]
        x: Option<BigRat>,
        /// Starting partition, e.g. "1,2|3"; defaults to singletons.
        #[arg(long)]
        from: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Expected occupation times from one partition.
    Green {
        #[command(flatten)]
        common: Common,
        /// Starting partition; defaults to singletons.
        #[arg(long)]
        from: Option<String>,
        /// Block-counting Green's matrix (bs only).
        #[arg(long, conflicts_with = "from")]
        block: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Probabilities of ever visiting each partition.
    Hitting {
        #[command(flatten)]
        common: Common,
        /// Starting partition; defaults to singletons.
        #[arg(long)]
        from: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo law at time t against the exact law.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Time.
        #[arg(long, env = "COALSPEC_T")]
        t: f64,
        /// Replicates.
        #[arg(long, env = "COALSPEC_REPS", default_value_t = 10_000)]
        reps: u64,
        /// Seed; replicate i uses stream i.
        #[arg(long, env = "COALSPEC_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Check every closed form against the brute-force oracles for n = 2..=n-max.
    Verify {
        /// Largest sample size.
        #[arg(long, env = "COALSPEC_N_MAX", default_value_t = 5)]
        n_max: usize,
        /// Tolerance for floating-point comparisons.
        #[arg(long, env = "COALSPEC_TOL", default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: coalspec_core::Error| e.to_string())
}

fn parse_rational(s: &str) -> Result<BigRat, String> {
    s.trim().parse().map_err(|e| format!("not a rational number: {e}"))
}

/// A finished command: its document and whether verification passed.
struct Rendered {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    ok: bool,
}

impl Rendered {
    fn new(json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Rendered { json, header, rows, ok: true }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    let cap = cli.n_cap;
    let (rendered, output) = match cli.command {
        Command::Lattice { n, output } => (lattice(n, cap)?, output),
        Command::Qmatrix { common, block, output } => (qmatrix(&common, block, cap)?, output),
        Command::Spectral { common, block, output } => (spectral(&common, block, cap)?, output),
        Command::Transition { common, t, x, from, output } => {
            (transition(&common, t, x, from.as_deref(), cap)?, output)
        }
        Command::Green { common, from, block, output } => (green(&common, from.as_deref(), block, cap)?, output),
        Command::Hitting { common, from, output } => (hitting(&common, from.as_deref(), cap)?, output),
        Command::Simulate { common, t, reps, seed, output } => (simulate(&common, t, reps, seed, cap)?, output),
        Command::Verify { n_max, tol, output } => (verification(n_max, tol)?, output),
    };
    emit(&rendered, &output)?;
    Ok(rendered.ok)
}

fn emit(rendered: &Rendered, output: &Output) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    match output.format {
        Format::Json => format::write_json(&mut buf, &rendered.json)?,
        Format::Csv => format::write_csv(&mut buf, &rendered.header, &rendered.rows)?,
    }
    match &output.out {
        Some(path) if path.as_os_str() != "-" => {
            let mut f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            f.write_all(&buf)?;
        }
        _ => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

fn enumerate(n: usize, cap: usize) -> anyhow::Result<Arc<PartitionLattice>> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    Ok(Arc::new(PartitionLattice::enumerate_with_cap(n, cap)?))
}

fn start(from: Option<&str>, n: usize) -> anyhow::Result<SetPartition> {
    let Some(s) = from else {
        return Ok(SetPartition::singletons(n));
    };
    let p: SetPartition = s.parse()?;
    if p.ground() != SetPartition::singletons(n).ground() {
        bail!("--from must be a partition of 1..{n}");
    }
    Ok(p)
}

fn base(command: &str, common: &Common) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("model".into(), json!(common.model.name()));
    m.insert("n".into(), json!(common.n));
    m
}

fn lattice(n: usize, cap: usize) -> anyhow::Result<Rendered> {
    let l = enumerate(n, cap)?;
    let rows: Vec<Vec<String>> = l
        .elements()
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), p.to_string(), p.num_blocks().to_string()])
        .collect();
    let json = json!({
        "command": "lattice",
        "n": n,
        "count": l.len(),
        "partitions": format::lattice_order(&l),
    });
    Ok(Rendered::new(json, vec!["index", "partition", "blocks"], rows))
}

fn block_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn matrix_rows(name: &str, m: &RatMatrix, labels: &[String]) -> Vec<Vec<String>> {
    m.iter()
        .map(|(i, j, v)| vec![name.to_string(), labels[i].clone(), labels[j].clone(), rational(v)])
        .collect()
}

fn qmatrix(common: &Common, block: bool, cap: usize) -> anyhow::Result<Rendered> {
    let (matrix, labels) = if block {
        if common.n == 0 {
            bail!("--n must be at least 1");
        }
        (common.model.block_generator(common.n), block_labels(common.n))
    } else {
        let l = enumerate(common.n, cap)?;
        (common.model.generator(&l)?.into_matrix(), l.labels())
    };
    let mut json = base("qmatrix", common);
    json.insert("block".into(), json!(block));
    json.insert("order".into(), json!(labels));
    json.insert("entries".into(), format::matrix_entries(&matrix));
    Ok(Rendered::new(Value::Object(json), vec!["matrix", "row", "col", "value"], matrix_rows("Q", &matrix, &labels)))
}

fn report_json(report: &TripleReport) -> Value {
    let mut m = Map::new();
    for (name, pass) in report.checks() {
        m.insert(name.into(), json!(pass));
    }
    m.insert("all_pass".into(), json!(report.all_pass()));
    Value::Object(m)
}

fn spectral(common: &Common, block: bool, cap: usize) -> anyhow::Result<Rendered> {
    let (q, t, labels): (RatMatrix, SpectralTriple, Vec<String>) = if block {
        if common.n == 0 {
            bail!("--n must be at least 1");
        }
        (common.model.block_generator(common.n), block_triple(common.model, common.n), block_labels(common.n))
    } else {
        let l = enumerate(common.n, cap)?;
        (common.model.generator(&l)?.into_matrix(), triple(common.model, &l), l.labels())
    };
    let report = verify_triple(&q, &t);
    let mut json = base("spectral", common);
    json.insert("block".into(), json!(block));
    json.insert("order".into(), json!(labels));
    json.insert("R".into(), format::matrix_entries(&t.r));
    json.insert("D".into(), json!(t.d.iter().map(rational).collect::<Vec<_>>()));
    json.insert("L".into(), format::matrix_entries(&t.l));
    json.insert("report".into(), report_json(&report));
    let mut rows = matrix_rows("R", &t.r, &labels);
    rows.extend(matrix_rows("D", &t.d_matrix(), &labels));
    rows.extend(matrix_rows("L", &t.l, &labels));
    let mut rendered = Rendered::new(Value::Object(json), vec!["matrix", "row", "col", "value"], rows);
    rendered.ok = report.all_pass();
    Ok(rendered)
}

fn transition(
    common: &Common,
    t: Option<f64>,
    x: Option<BigRat>,
    from: Option<&str>,
    cap: usize,
) -> anyhow::Result<Rendered> {
    let l = enumerate(common.n, cap)?;
    let pi = start(from, common.n)?;
    let i = l.require_index(&pi)?;
    let mut json = base("transition", common);
    json.insert("from".into(), json!(pi.to_string()));
    let values: Vec<String> = match (t, x) {
        (Some(t), _) => {
            if !t.is_finite() || t < 0.0 {
                bail!("--t must be a finite nonnegative number");
            }
            json.insert("t".into(), json!(real(t)));
            match common.model {
                Model::BolthausenSznitman => {
                    json.insert("method".into(), json!("closed-form"));
                    l.elements().iter().map(|r| bs_transition(&pi, r, t).map(real)).collect::<Result<_, _>>()?
                }
                Model::Kingman => {
                    json.insert("method".into(), json!("spectral"));
                    let p = transition_via_triple(&triple(Model::Kingman, &l), t);
                    (0..l.len()).map(|j| real(p[(i, j)])).collect()
                }
            }
        }
        (None, Some(x)) => {
            json.insert("x".into(), json!(rational(&x)));
            match common.model {
                Model::BolthausenSznitman => {
                    json.insert("method".into(), json!("closed-form"));
                    l.elements()
                        .iter()
                        .map(|r| bs_transition_exact(&pi, r, &x).map(|v| rational(&v)))
                        .collect::<Result<_, _>>()?
                }
                Model::Kingman => {
                    json.insert("method".into(), json!("spectral"));
                    let p = transition_exact_via_triple(&triple(Model::Kingman, &l), &x)?;
                    (0..l.len()).map(|j| rational(&p.entry(i, j))).collect()
                }
            }
        }
        (None, None) => bail!("one of --t or --x is required"),
    };
    row_output(json, &l, values)
}

fn row_output(mut json: Map<String, Value>, l: &PartitionLattice, values: Vec<String>) -> anyhow::Result<Rendered> {
    let rows: Vec<Vec<String>> =
        l.elements().iter().zip(&values).map(|(p, v)| vec![p.to_string(), v.clone()]).collect();
    json.insert(
        "values".into(),
        Value::Array(rows.iter().map(|r| json!({"partition": r[0], "value": r[1]})).collect()),
    );
    Ok(Rendered::new(Value::Object(json), vec!["partition", "value"], rows))
}

fn green(common: &Common, from: Option<&str>, block: bool, cap: usize) -> anyhow::Result<Rendered> {
    if block {
        if common.model != Model::BolthausenSznitman {
            bail!("--block is available for --model bs only");
        }
        let n = common.n;
        if n == 0 {
            bail!("--n must be at least 1");
        }
        let mut entries = Vec::new();
        for i in 1..=n {
            for j in 1..=i {
                let v = if j == 1 { "inf".to_string() } else { rational(&bs_block_green(i, j, n)?) };
                entries.push((i, j, v));
            }
        }
        let rows = entries.iter().map(|(i, j, v)| vec![i.to_string(), j.to_string(), v.clone()]).collect();
        let mut json = base("green", common);
        json.insert("block".into(), json!(true));
        json.insert("entries".into(), Value::Array(entries.iter().map(|(i, j, v)| json!([i, j, v])).collect()));
        return Ok(Rendered::new(Value::Object(json), vec!["from_blocks", "to_blocks", "value"], rows));
    }
    let l = enumerate(common.n, cap)?;
    let pi = start(from, common.n)?;
    let i = l.require_index(&pi)?;
    let mut json = base("green", common);
    json.insert("from".into(), json!(pi.to_string()));
    let values: Vec<String> = match common.model {
        Model::BolthausenSznitman => {
            json.insert("method".into(), json!("closed-form"));
            l.elements().iter().map(|r| bs_green(&pi, r).map(|g| format::green(&g))).collect::<Result<_, _>>()?
        }
        Model::Kingman => {
            json.insert("method".into(), json!("fundamental-matrix"));
            let top = l.len() - 1;
            let n = fundamental_matrix(&Model::Kingman.generator(&l)?)?;
            (0..l.len())
                .map(|j| {
                    if j == top {
                        format::green(&GreenEntry::Infinite)
                    } else if i == top {
                        rational(&BigRat::default())
                    } else {
                        rational(&n.entry(i, j))
                    }
                })
                .collect()
        }
    };
    row_output(json, &l, values)
}

fn hitting(common: &Common, from: Option<&str>, cap: usize) -> anyhow::Result<Rendered> {
    let l = enumerate(common.n, cap)?;
    let pi = start(from, common.n)?;
    let top = l.top().clone();
    let mut json = base("hitting", common);
    json.insert("from".into(), json!(pi.to_string()));
    let values: Vec<String> = l
        .elements()
        .iter()
        .map(|r| {
            let h = match common.model {
                Model::BolthausenSznitman if *r == top => BigRat::from_integer(1.into()),
                Model::BolthausenSznitman => bs_hitting(&pi, r)?,
                Model::Kingman => kingman_hitting(&pi, r)?,
            };
            Ok(rational(&h))
        })
        .collect::<coalspec_core::Result<_>>()?;
    row_output(json, &l, values)
}

fn simulate(common: &Common, t: f64, reps: u64, seed: u64, cap: usize) -> anyhow::Result<Rendered> {
    if !t.is_finite() || t < 0.0 {
        bail!("--t must be a finite nonnegative number");
    }
    if common.n == 0 {
        bail!("--n must be at least 1");
    }
    let law = parallel::estimate_transition(common.model, common.n, t, reps, seed)?;
    // exact values need the lattice; beyond the cap only observed states are listed
    let (states, exact): (Vec<SetPartition>, Option<Vec<f64>>) = match PartitionLattice::enumerate_with_cap(common.n, cap) {
        Ok(l) => {
            let start = l.bottom().clone();
            let exact = match common.model {
                Model::BolthausenSznitman => {
                    l.elements().iter().map(|r| bs_transition(&start, r, t)).collect::<Result<Vec<_>, _>>()?
                }
                Model::Kingman => {
                    let p = transition_via_triple(&triple(Model::Kingman, &l), t);
                    (0..l.len()).map(|j| p[(0, j)]).collect()
                }
            };
            (l.elements().to_vec(), Some(exact))
        }
        Err(_) => (law.counts().keys().cloned().collect(), None),
    };
    let mut rows = Vec::with_capacity(states.len());
    let mut items = Vec::with_capacity(states.len());
    for (k, rho) in states.iter().enumerate() {
        let prop = law.proportion(rho);
        let exact_k = exact.as_ref().map(|e| e[k]);
        let z = exact_k.map(|e| prop.z_score(e));
        rows.push(vec![
            rho.to_string(),
            prop.count.to_string(),
            real(prop.estimate()),
            real(prop.std_error()),
            exact_k.map(real).unwrap_or_default(),
            z.map(real).unwrap_or_default(),
        ]);
        items.push(json!({
            "partition": rho.to_string(),
            "count": prop.count,
            "estimate": real(prop.estimate()),
            "std_error": real(prop.std_error()),
            "exact": exact_k.map(real),
            "z": z.map(real),
        }));
    }
    let mut json = base("simulate", common);
    json.insert("t".into(), json!(real(t)));
    json.insert("reps".into(), json!(reps));
    json.insert("seed".into(), json!(seed));
    json.insert("states".into(), Value::Array(items));
    Ok(Rendered::new(
        Value::Object(json),
        vec!["partition", "count", "estimate", "std_error", "exact", "z"],
        rows,
    ))
}

fn verification(n_max: usize, tol: f64) -> anyhow::Result<Rendered> {
    let checks = verify::suite(n_max, tol)?;
    let json = verify::report(&checks, n_max, tol);
    let rows = checks
        .iter()
        .map(|c| vec![c.name.to_string(), c.n.to_string(), c.outcome.pass.to_string(), c.outcome.detail.clone()])
        .collect();
    let mut rendered = Rendered::new(json, vec!["check", "n", "pass", "detail"], rows);
    rendered.ok = checks.iter().all(|c| c.outcome.pass);
    Ok(rendered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn rational_flag_parses() {
        assert_eq!(parse_rational("1/2").unwrap(), coalspec_core::combinatorics::rat(1, 2));
        assert_eq!(parse_rational("-2").unwrap(), coalspec_core::combinatorics::rat(-2, 1));
        assert!(parse_rational("half").is_err());
        assert!(parse_model("nope").is_err());
    }
}
