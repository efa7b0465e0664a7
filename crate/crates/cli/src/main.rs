use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qdesign_moments::criteria::{self, CriterionVerdict};
use qdesign_moments::designs::{resolve_design, Design};
use qdesign_moments::figures::{self, BoundaryFamily, ScanSource, TwoQubitState};
use qdesign_moments::moments::{self, MomentOptions, MomentRecord};
use qdesign_moments::qubit::{set_max_qubits, DensityMatrix, PureState};
use qdesign_moments::sampling::StateClass;
use qdesign_moments::{states, Error};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CERTIFICATION: u8 = 3;

#[derive(Parser)]
#[command(name = "qdesign", version, about = "Moments of randomly measured correlations via spherical designs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Raise the qubit limit for state construction.
    #[arg(long, global = true)]
    max_qubits: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Certify designs: monomial residuals or frame potentials for t = 1..t-max.
    DesignsVerify {
        /// Builtin name, `clifford`, `sl2f5`, `regular-snub-cube` or a design file.
        #[arg(long = "design", default_values_t = ["octahedron".to_string(), "icosahedron".into(), "icosidodecahedron".into(), "snub7".into()])]
        designs: Vec<String>,
        #[arg(long, default_value_t = 7)]
        t_max: usize,
    },
    /// Random correlation values for a two-qubit state with empirical R2 and R4.
    Histogram {
        /// product, w-marginal, werner[:q], bell or mixed.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Moments of randomly drawn states from a class, plus labelled landmarks.
    Scan {
        /// separable, bisep, bisep:<qubits>, w, generic or all.
        #[arg(long)]
        class: String,
        /// Draw class mixtures instead of pure states.
        #[arg(long)]
        mixed: bool,
        /// Mixture size (default 2^N).
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Noise thresholds of the GHZ state for N = 3..n-max.
    Thresholds {
        #[arg(long, default_value_t = 12)]
        n_max: usize,
    },
    /// Boundary curves of the separable regions in the moment plane.
    Boundary {
        /// bell_diagonal or three_qubit_bisep.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// A single moment by design sum or Monte Carlo.
    Moment {
        /// ghz, w, product, mixed, bell, w-marginal, werner:q, noisy-ghz:p or bell-diagonal:cx,cy,cz.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Design for the exact sum; defaults to the smallest builtin of sufficient strength.
        #[arg(long)]
        design: Option<String>,
        /// Estimate by Monte Carlo with this many samples instead.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Lift the default qubit ceiling for orders ≥ 6.
        #[arg(long)]
        allow_large: bool,
    },
    /// Evaluate a moment criterion on given moment values.
    Verdict {
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        #[arg(long)]
        r2: f64,
        #[arg(long, default_value_t = 0.0)]
        r4: f64,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Maximize the W standard-form R2 over the simplex with k weights pinned to zero.
    Simplex {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    BellDiagonal,
    Conjecture,
    WR2,
    WLinear,
    PureBisep,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

struct Output {
    format: Format,
    sink: Box<dyn Write>,
}

impl Output {
    fn csv(&mut self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<()> {
        writeln!(self.sink, "{}", header.join(","))?;
        for row in rows {
            writeln!(self.sink, "{}", row.join(","))?;
        }
        Ok(())
    }

    fn json<T: serde::Serialize>(&mut self, value: &T) -> anyhow::Result<()> {
        serde_json::to_writer_pretty(&mut self.sink, value)?;
        writeln!(self.sink)?;
        Ok(())
    }
}

fn parse_state(spec: &str, n: usize) -> anyhow::Result<DensityMatrix> {
    let (name, arg) = spec.split_once(':').map_or((spec, None), |(a, b)| (a, Some(b)));
    let param = || -> anyhow::Result<f64> {
        arg.context("missing parameter after `:`")?
            .parse::<f64>()
            .with_context(|| format!("bad parameter in `{spec}`"))
    };
    Ok(match name {
        "ghz" => DensityMatrix::from_pure(&states::ghz(n)?),
        "w" => DensityMatrix::from_pure(&states::w(n)?),
        "product" => DensityMatrix::from_pure(&PureState::basis(n, 0)?),
        "mixed" => DensityMatrix::maximally_mixed(n)?,
        "bell" => DensityMatrix::from_pure(&states::bell()),
        "w-marginal" => states::w_marginal(),
        "werner" => states::werner(param()?)?,
        "noisy-ghz" => states::noisy_ghz(param()?, n)?,
        "bell-diagonal" => {
            let c: Vec<f64> = arg
                .context("bell-diagonal needs cx,cy,cz")?
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .context("bad bell-diagonal parameters")?;
            if c.len() != 3 {
                bail!("bell-diagonal needs exactly three correlations");
            }
            states::bell_diagonal(c[0], c[1], c[2])?
        }
        _ => bail!("unknown state `{spec}`"),
    })
}

fn default_design(t: usize) -> &'static str {
    match t {
        0..=3 => "octahedron",
        4 | 5 => "icosahedron",
        _ => "snub7",
    }
}

fn verdict(criterion: CriterionArg, r2: f64, r4: f64, n: usize) -> anyhow::Result<CriterionVerdict> {
    Ok(match criterion {
        CriterionArg::BellDiagonal => criteria::bell_diagonal_separability(r2, r4),
        CriterionArg::Conjecture => criteria::three_qubit_bisep_conjecture(r2, r4),
        CriterionArg::WR2 => criteria::w_class_r2_bound(r2, n)?,
        CriterionArg::WLinear => criteria::w_class_linear(r2, r4, n)?,
        CriterionArg::PureBisep => criteria::pure_bisep_fourth_moment_bound(r2, r4),
    })
}

fn moment_row(r: &MomentRecord) -> Vec<String> {
    let se = r.standard_error().map(num).unwrap_or_default();
    vec![r.order.to_string(), num(r.value), r.method.to_string(), se]
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(limit) = cli.common.max_qubits {
        set_max_qubits(limit);
    }
    let sink: Box<dyn Write> = match &cli.common.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    let mut out = Output {
        format: cli.common.format,
        sink,
    };

    match cli.command {
        Command::DesignsVerify { designs, t_max } => {
            let rows = figures::designs_report(&designs, t_max)?;
            if out.format == Format::Json {
                out.json(&rows)?;
            } else {
                out.csv(
                    &["design", "kind", "declared_strength", "t", "metric", "target", "points", "pass"],
                    rows.iter().map(|r| {
                        vec![
                            r.design.clone(),
                            r.kind.clone(),
                            r.declared_strength.to_string(),
                            r.t.to_string(),
                            num(r.metric),
                            num(r.target),
                            r.points.to_string(),
                            r.pass.to_string(),
                        ]
                    }),
                )?;
            }
            if let Some(bad) = rows.iter().find(|r| r.t <= r.declared_strength && !r.pass) {
                return Err(Error::Certification {
                    name: bad.design.clone(),
                    t: bad.t,
                    detail: format!("metric {} misses target {}", bad.metric, bad.target),
                }
                .into());
            }
        }
        Command::Histogram { state, samples, seed } => {
            let h = figures::histogram(state.parse::<TwoQubitState>()?, samples, seed)?;
            if out.format == Format::Json {
                out.json(&h)?;
            } else {
                let values = h
                    .values
                    .iter()
                    .enumerate()
                    .map(|(i, e)| vec!["E".into(), i.to_string(), num(*e), String::new()]);
                let summary = [("R2", h.r2), ("R4", h.r4)]
                    .into_iter()
                    .map(|(k, est)| vec![k.into(), String::new(), num(est.mean), num(est.standard_error)]);
                out.csv(&["kind", "index", "value", "standard_error"], values.chain(summary))?;
            }
        }
        Command::Scan {
            class,
            mixed,
            terms,
            n,
            samples,
            seed,
        } => {
            let source = if class == "all" {
                ScanSource::AllStates
            } else {
                let class = class.parse::<StateClass>()?;
                if mixed {
                    ScanSource::Mixed { class, terms }
                } else {
                    ScanSource::Pure(class)
                }
            };
            let rows = figures::scan(&source, n, samples, seed)?;
            let marks = figures::landmarks(n).unwrap_or_default();
            if out.format == Format::Json {
                out.json(&serde_json::json!({ "landmarks": marks, "samples": rows }))?;
            } else {
                let lm = marks.iter().map(|l| {
                    vec!["landmark".into(), l.label.to_string(), String::new(), n.to_string(), num(l.r2), num(l.r4), String::new()]
                });
                let sm = rows.iter().map(|r| {
                    vec![
                        "sample".into(),
                        r.index.to_string(),
                        r.class.clone(),
                        r.n.to_string(),
                        num(r.r2),
                        num(r.r4),
                        r.seed.to_string(),
                    ]
                });
                out.csv(&["kind", "label", "class", "N", "R2", "R4", "seed"], lm.chain(sm))?;
            }
        }
        Command::Thresholds { n_max } => {
            let table = figures::thresholds_table(n_max)?;
            if out.format == Format::Json {
                out.json(&table)?;
            } else {
                out.csv(
                    &["N", "p_star", "p_star_linear", "p_tilde_star"],
                    table.iter().map(|t| {
                        vec![t.n.to_string(), num(t.p_star), num(t.p_star_linear), num(t.p_tilde_star)]
                    }),
                )?;
            }
        }
        Command::Boundary { family, points } => {
            let pts = figures::boundary(family.parse::<BoundaryFamily>()?, points)?;
            if out.format == Format::Json {
                out.json(&pts)?;
            } else {
                out.csv(&["curve", "R2", "R4"], pts.iter().map(|p| vec![p.curve.clone(), num(p.r2), num(p.r4)]))?;
            }
        }
        Command::Moment {
            state,
            n,
            t,
            design,
            samples,
            seed,
            allow_large,
        } => {
            let rho = parse_state(&state, n)?;
            let record = match samples {
                Some(samples) => {
                    let seed = seed.context("--seed is required with --samples")?;
                    moments::moment_monte_carlo(&rho, t, samples, seed)?
                }
                None => {
                    let name = design.as_deref().unwrap_or(default_design(t));
                    let options = MomentOptions {
                        high_order_max_qubits: if allow_large { None } else { MomentOptions::default().high_order_max_qubits },
                        ..Default::default()
                    };
                    match resolve_design(name)? {
                        Design::Spherical(d) => moments::moment_design_with(&rho, t, &d, &options)?,
                        Design::Unitary(u) => moments::moment_unitary_design(&rho, t, &u, &options)?,
                    }
                }
            };
            if out.format == Format::Json {
                out.json(&record)?;
            } else {
                out.csv(&["order", "value", "method", "standard_error"], [moment_row(&record)])?;
            }
        }
        Command::Verdict { criterion, r2, r4, n } => {
            let v = verdict(criterion, r2, r4, n)?;
            if out.format == Format::Json {
                out.json(&v)?;
            } else {
                let id = serde_json::to_value(v.criterion)?;
                out.csv(
                    &["criterion", "margin", "verdict", "flags"],
                    [vec![
                        id.as_str().unwrap_or_default().to_string(),
                        num(v.margin),
                        v.verdict.to_string(),
                        v.flags.join(";"),
                    ]],
                )?;
            }
        }
        Command::Simplex { n, k } => {
            let (x, value) = criteria::simplex_max_r2(n, k)?;
            if out.format == Format::Json {
                out.json(&serde_json::json!({ "n": n, "k": k, "x": x, "value": value }))?;
            } else {
                let xs: Vec<String> = x.iter().map(|v| num(*v)).collect();
                out.csv(&["N", "k", "value", "x"], [vec![n.to_string(), k.to_string(), num(value), xs.join(";")]])?;
            }
        }
    }
    out.sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::Certification { .. } | Error::ClosureFailed { .. }) => EXIT_CERTIFICATION,
                _ => EXIT_VALIDATION,
            };
            ExitCode::from(code)
        }
    }
}
