//! `bicolor`: command-line driver for the bicolor loop toolkit.
//!
//! Every subcommand writes one artifact (JSON by default, CSV for counting
//! and Schmidt tables) that echoes the full run configuration.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use bicolor_loops::counting::{
    count_blc, count_fpl_boundary, count_intersecting_boundary, count_transfer_boundary, counts_to_csv,
    entropy_bound, transfer_count, BoundModel, ColorWeight, CountResult,
};
use bicolor_loops::dynamics::{krylov_components, MoveSet};
use bicolor_loops::entanglement::{admissible_boundary_strings, column_bipartition, fit_area_law, schmidt_spectrum_by_counting};
use bicolor_loops::lattice::{build_hex_torus, build_square_torus, collect_closed_loop_configs, EdgeState, LatticeGeometry};
use bicolor_loops::operators::{appendix_b_relations, assemble_hamiltonian, Basis, Model, ModelSpec};
use bicolor_loops::spectra::{defect_tower_states, ground_space, tower_scan, DefectSpec, SolverChoice, SolverOptions};
use bicolor_loops::verify::{verify_all, Scale};
use bicolor_loops::LoopError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser, Debug, Serialize)]
#[command(name = "bicolor", version, about = "Exact experiments on bicolor loop models")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format. Defaults to csv for `count`, json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized steps (Lanczos start vectors).
    #[arg(long, global = true, default_value_t = 24_061)]
    seed: u64,
    /// Largest basis or sector the run may materialise.
    #[arg(long, global = true, default_value_t = 1 << 22)]
    max_basis: u64,
    /// Record wall time as null so reruns are byte-identical.
    #[arg(long, global = true)]
    omit_timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Lattice {
    #[arg(long, value_enum, default_value = "square-total")]
    model: ModelArg,
    /// Linear size (square L×L, or hex L×L unit cells).
    #[arg(long = "L", default_value_t = 2)]
    l: usize,
    /// Hex unit cells along x (overrides --L).
    #[arg(long)]
    lx: Option<usize>,
    /// Hex unit cells along y (overrides --L).
    #[arg(long)]
    ly: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModelArg {
    SquareInter,
    SquareTotal,
    Hex,
}

impl ModelArg {
    fn model(self) -> Model {
        match self {
            ModelArg::SquareInter => Model::SquareInter,
            ModelArg::SquareTotal => Model::SquareTotal,
            ModelArg::Hex => Model::Hex,
        }
    }
}

impl Lattice {
    fn build(&self) -> Result<LatticeGeometry, LoopError> {
        match self.model {
            ModelArg::Hex => build_hex_torus(self.lx.unwrap_or(self.l), self.ly.unwrap_or(self.l)),
            _ => {
                if self.lx.is_some() || self.ly.is_some() {
                    return Err(LoopError::InvalidArgument("--lx/--ly apply to the hex model only".into()));
                }
                build_square_torus(self.l)
            }
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Edge, vertex and face tables of a torus.
    Geometry {
        #[command(flatten)]
        lattice: Lattice,
    },
    /// Krylov components of the closed-loop space under a move set.
    Sectors {
        #[command(flatten)]
        lattice: Lattice,
        /// B, C, B,C or B' (hex plaquettes).
        #[arg(long, default_value = "B,C")]
        moves: String,
    },
    /// Low-lying spectrum of the model Hamiltonian.
    Spectrum {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, default_value_t = 20)]
        k: usize,
        #[arg(long, value_enum, default_value = "full")]
        basis: BasisArg,
        #[arg(long, value_enum, default_value = "auto")]
        solver: SolverArg,
    },
    /// Vertex/face tower structure and defect-pair uniform states.
    Towers {
        #[command(flatten)]
        lattice: Lattice,
        /// Two defect vertices, e.g. `0,1`. Omit for the closed sector.
        #[arg(long)]
        defects: Option<String>,
        #[arg(long, value_enum, default_value = "red")]
        color: ColorArg,
        /// Skip the full-space multiset comparison.
        #[arg(long)]
        no_scan: bool,
    },
    /// Exact evaluation of the Wilson loop relations.
    Wilson {
        #[arg(long = "L", default_value_t = 2)]
        l: usize,
    },
    /// Schmidt spectra of uniform component states across a column cut.
    Entropy {
        #[command(flatten)]
        lattice: Lattice,
        /// Vertex columns in region A.
        #[arg(long, default_value_t = 1)]
        width: usize,
        /// Component index under B,C (B' on hex). Omit for all components.
        #[arg(long)]
        component: Option<usize>,
    },
    /// Exact boundary counts with closed forms and asymptotics.
    Count {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Inclusive range `a..b` or a single value.
        #[arg(long, default_value = "1..6")]
        l: String,
        /// Color weight for BLC, integer or `p/q`.
        #[arg(long, default_value = "1")]
        s: String,
    },
    /// Least-squares fit of S = α·2l − β·ln(2l) − γ.
    Fit {
        #[arg(long, value_enum)]
        family: BoundArg,
        #[arg(long, default_value = "50..500")]
        l: String,
        #[arg(long, default_value_t = 10)]
        step: u64,
        #[arg(long, default_value = "1")]
        s: String,
        #[arg(long, value_enum, default_value = "closed-form")]
        source: SourceArg,
    },
    /// Runs every acceptance criterion and prints a pass/fail table.
    VerifyAll {
        #[arg(long, value_enum, default_value = "desk")]
        scale: ScaleArg,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BasisArg {
    Full,
    Closed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SolverArg {
    Auto,
    BlockDense,
    Lanczos,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ColorArg {
    Red,
    Blue,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum FamilyArg {
    #[value(name = "Ni", alias = "ni")]
    Ni,
    #[value(name = "Nn", alias = "nn")]
    Nn,
    #[value(name = "FPL", alias = "fpl")]
    Fpl,
    #[value(name = "BLC", alias = "blc")]
    Blc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum BoundArg {
    #[value(name = "Si", alias = "si")]
    Si,
    #[value(name = "Sn", alias = "sn")]
    Sn,
    #[value(name = "SFPL", alias = "sfpl")]
    Sfpl,
    #[value(name = "SBLC", alias = "sblc")]
    Sblc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SourceArg {
    ClosedForm,
    Exact,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ScaleArg {
    Smoke,
    Desk,
    Extended,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Loop(LoopError),
    Io(std::io::Error),
}

impl From<LoopError> for Failure {
    fn from(e: LoopError) -> Self {
        match e {
            LoopError::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Loop(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// What a subcommand produced: a JSON result, optionally a CSV rendering,
/// and whether a verification step failed.
struct Outcome {
    geometry_hash: Option<String>,
    result: Value,
    csv: Option<String>,
    verified: bool,
}

impl Outcome {
    fn json(geometry_hash: Option<String>, result: Value) -> Self {
        Self { geometry_hash, result, csv: None, verified: true }
    }
}

fn parse_range(text: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Usage(format!("cannot parse range {text:?}"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse::<u64>().map_err(|_| bad())?, b.trim_start_matches('=').trim().parse::<u64>().map_err(|_| bad())?),
        None => {
            let v = text.trim().parse::<u64>().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn check_budget(dim: u64, budget: u64) -> Result<(), Failure> {
    if dim > budget {
        return Err(Failure::Loop(LoopError::BudgetExceeded { estimated: dim, budget }));
    }
    Ok(())
}

fn full_dim(geom: &LatticeGeometry) -> u64 {
    3u64.checked_pow(geom.num_edges() as u32).unwrap_or(u64::MAX)
}

fn default_moves(model: Model) -> MoveSet {
    match model {
        Model::Hex => MoveSet::HexB,
        _ => MoveSet::BC,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let budget = cli.common.max_basis;
    if budget == 0 {
        return Err(Failure::Usage("--max-basis must be positive".into()));
    }
    match &cli.command {
        Command::Geometry { lattice } => {
            let g = lattice.build()?;
            let edges: Vec<Value> = g
                .edges()
                .iter()
                .enumerate()
                .map(|(k, e)| json!({ "id": k, "vertices": e.endpoints, "faces": e.faces }))
                .collect();
            let faces = (0..g.num_faces()).map(|f| g.face_edges(f).map(|s| s.to_vec())).collect::<Result<Vec<_>, _>>()?;
            let pairs: Vec<Value> = g.face_pairs().iter().map(|p| json!({ "faces": p.faces, "direction": p.direction, "support": p.support })).collect();
            Ok(Outcome::json(
                Some(g.hash_hex()),
                json!({
                    "kind": g.kind().name(),
                    "dims": g.dims(),
                    "num_edges": g.num_edges(),
                    "num_vertices": g.num_vertices(),
                    "num_faces": g.num_faces(),
                    "edges": edges,
                    "faces": faces,
                    "face_pairs": pairs,
                    "shared_edge_degeneracy": g.has_shared_edge_degeneracy(),
                    "export_text": g.export_text(),
                }),
            ))
        }
        Command::Sectors { lattice, moves } => {
            let g = lattice.build()?;
            let set = MoveSet::parse(moves)?;
            let part = krylov_components(&g, set, budget)?;
            let summary = part.summary(&g, set);
            let labels = summary.distinct_labels();
            Ok(Outcome::json(
                Some(g.hash_hex()),
                json!({
                    "num_components": part.num_components(),
                    "distinct_labels": labels.len(),
                    "summary": summary,
                }),
            ))
        }
        Command::Spectrum { lattice, k, basis, solver } => {
            let g = lattice.build()?;
            let model = lattice.model.model();
            let spec = ModelSpec::new(model, &g)?;
            let b = match basis {
                BasisArg::Full => {
                    check_budget(full_dim(&g), budget)?;
                    Basis::full(g.num_edges())
                }
                BasisArg::Closed => Basis::explicit("closed", g.num_edges(), collect_closed_loop_configs(&g, budget)?),
            };
            let h = assemble_hamiltonian(&spec, Arc::clone(&b))?;
            let opts = SolverOptions {
                choice: match solver {
                    SolverArg::Auto => SolverChoice::Auto,
                    SolverArg::BlockDense => SolverChoice::BlockDense,
                    SolverArg::Lanczos => SolverChoice::Lanczos,
                },
                seed: cli.common.seed,
                ..SolverOptions::default()
            };
            let report = ground_space(&h, *k, &opts)?.with_context(model.name(), g.dims());
            Ok(Outcome::json(
                Some(g.hash_hex()),
                json!({
                    "dim": h.dim(),
                    "nnz": h.nnz(),
                    "ground_energy": report.ground_energy(),
                    "ground_degeneracy": report.ground_degeneracy(),
                    "max_residual": report.max_residual(),
                    "report": report,
                }),
            ))
        }
        Command::Towers { lattice, defects, color, no_scan } => {
            let g = lattice.build()?;
            let model = lattice.model.model();
            let spec = match defects {
                None => None,
                Some(text) => {
                    let ids: Vec<usize> = text
                        .split(',')
                        .map(|t| t.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| Failure::Usage(format!("cannot parse defects {text:?}")))?;
                    if ids.len() != 2 {
                        return Err(Failure::Usage("--defects takes exactly two vertices".into()));
                    }
                    let color = match color {
                        ColorArg::Red => EdgeState::Red,
                        ColorArg::Blue => EdgeState::Blue,
                    };
                    Some(DefectSpec { vertices: (ids[0], ids[1]), color })
                }
            };
            let scan = if *no_scan {
                None
            } else {
                check_budget(full_dim(&g), budget.min(1 << 14))?;
                Some(tower_scan(&g, model)?)
            };
            let states = defect_tower_states(&g, model, spec, budget)?;
            let exact = states.states.iter().filter(|s| s.exact_eigenstate).count();
            Ok(Outcome::json(
                Some(g.hash_hex()),
                json!({
                    "scan": scan,
                    "defect_states": states,
                    "exact_eigenstates": exact,
                    "non_eigenstates": states.states.len() - exact,
                }),
            ))
        }
        Command::Wilson { l } => {
            let g = build_square_torus(*l)?;
            check_budget(full_dim(&g), budget)?;
            let rel = appendix_b_relations(&g)?;
            let violated = rel.iter().filter(|r| !r.holds).count();
            Ok(Outcome::json(
                Some(g.hash_hex()),
                json!({ "relations": rel, "holding": rel.len() - violated, "violated": violated }),
            ))
        }
        Command::Entropy { lattice, width, component } => {
            let g = lattice.build()?;
            let part = column_bipartition(&g, *width)?;
            let set = default_moves(lattice.model.model());
            let comps = krylov_components(&g, set, budget)?;
            let chosen: Vec<usize> = match component {
                Some(c) if *c >= comps.num_components() => {
                    return Err(Failure::Usage(format!("component {c} out of range (0..{})", comps.num_components())))
                }
                Some(c) => vec![*c],
                None => (0..comps.num_components()).collect(),
            };
            let strings = admissible_boundary_strings(&g, &part, budget)?;
            let bound = (strings.len() as f64).ln();
            let mut spectra = Vec::new();
            let mut csv = String::new();
            for &c in &chosen {
                let s = schmidt_spectrum_by_counting(&comps.members(c), &part)?;
                if chosen.len() > 1 {
                    csv.push_str(&format!("# component {c}\n"));
                }
                csv.push_str(&s.to_csv());
                spectra.push(json!({
                    "component": c,
                    "size": s.total,
                    "product_sum": s.product_sum(),
                    "within_bound": s.entropy <= bound + 1e-12,
                    "spectrum": s,
                }));
            }
            let mut out = Outcome::json(
                Some(g.hash_hex()),
                json!({
                    "cut": part.description,
                    "cut_edges": part.cut_len(),
                    "admissible_strings": strings.len(),
                    "entropy_bound": bound,
                    "components": spectra,
                }),
            );
            out.csv = Some(csv);
            Ok(out)
        }
        Command::Count { family, l, s } => {
            let ls = parse_range(l)?;
            let weight = ColorWeight::parse(s)?;
            let rows = ls
                .iter()
                .map(|&l| match family {
                    FamilyArg::Ni => count_intersecting_boundary(l),
                    FamilyArg::Nn => count_transfer_boundary(l),
                    FamilyArg::Fpl => count_fpl_boundary(l),
                    FamilyArg::Blc => Ok(count_blc(l, &weight)),
                })
                .collect::<Result<Vec<CountResult>, _>>()?;
            let transfer = match family {
                FamilyArg::Nn => Some(ls.iter().map(|&l| transfer_count(l)).collect::<Result<Vec<_>, _>>()?),
                _ => None,
            };
            let mut out = Outcome::json(None, json!({ "rows": rows, "transfer_discrepancy": transfer }));
            out.csv = Some(counts_to_csv(&rows));
            Ok(out)
        }
        Command::Fit { family, l, step, s, source } => {
            if *step == 0 {
                return Err(Failure::Usage("--step must be positive".into()));
            }
            let ls = parse_range(l)?;
            let weight = ColorWeight::parse(s)?;
            let model = match family {
                BoundArg::Si => BoundModel::Si,
                BoundArg::Sn => BoundModel::Sn,
                BoundArg::Sfpl => BoundModel::SFPL,
                BoundArg::Sblc => BoundModel::SBLC,
            };
            let mut points = Vec::new();
            for &l in ls.iter().step_by(*step as usize) {
                let b = entropy_bound(model, l, Some(&weight))?;
                points.push((l as f64, if *source == SourceArg::Exact { b.ln_exact_count } else { b.closed_form }));
            }
            let fit = fit_area_law(&points)?;
            Ok(Outcome::json(None, json!({ "fit": fit, "points": points })))
        }
        Command::VerifyAll { scale } => {
            let scale = match scale {
                ScaleArg::Smoke => Scale::Smoke,
                ScaleArg::Desk => Scale::Desk,
                ScaleArg::Extended => Scale::Extended,
            };
            let mut reports = verify_all(scale);
            if cli.common.omit_timing {
                for r in &mut reports {
                    r.seconds = 0.0;
                }
            }
            let mut table = String::from("criterion,title,status,checks_passed,checks_total\n");
            for r in &reports {
                eprintln!("{}", r.summary_line());
                let ok = r.checks.iter().filter(|c| c.passed).count();
                table.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.id,
                    r.title,
                    if r.passed() { "PASS" } else { "FAIL" },
                    ok,
                    r.checks.len()
                ));
            }
            let verified = reports.iter().all(|r| r.passed());
            let table_json: Vec<Value> =
                reports.iter().map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed() })).collect();
            Ok(Outcome {
                geometry_hash: None,
                result: json!({ "scale": scale.name(), "table": table_json, "reports": reports }),
                csv: Some(table),
                verified,
            })
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(text) = std::env::var("BICOLOR_THREADS") {
        let n: usize = text.trim().parse().map_err(|_| Failure::Usage(format!("BICOLOR_THREADS={text:?} is not a number")))?;
        if n == 0 {
            return Err(Failure::Usage("BICOLOR_THREADS must be positive".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Loop(e @ LoopError::BudgetExceeded { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Loop(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    configure_threads()?;
    let start = Instant::now();
    let outcome = run(cli)?;
    let wall = (!cli.common.omit_timing).then(|| start.elapsed().as_secs_f64());
    let format = cli.common.format.unwrap_or(match cli.command {
        Command::Count { .. } => Format::Csv,
        _ => Format::Json,
    });
    let text = match format {
        Format::Csv => {
            let body = outcome
                .csv
                .ok_or_else(|| Failure::Usage("csv output is available for count, entropy and verify-all only".into()))?;
            let mut head = format!(
                "# toolkit bicolor-loops {}\n# config {}\n# seed {}\n",
                env!("CARGO_PKG_VERSION"),
                serde_json::to_string(cli).expect("config serialises"),
                cli.common.seed
            );
            if let Some(h) = &outcome.geometry_hash {
                head.push_str(&format!("# geometry_hash {h}\n"));
            }
            if let Some(w) = wall {
                head.push_str(&format!("# wall_time_s {w:.6}\n"));
            }
            head + &body
        }
        Format::Json => {
            let doc = json!({
                "toolkit": "bicolor-loops",
                "version": env!("CARGO_PKG_VERSION"),
                "config": cli,
                "seed": cli.common.seed,
                "geometry_hash": outcome.geometry_hash,
                "wall_time_s": wall,
                "result": outcome.result,
            });
            serde_json::to_string_pretty(&doc).expect("artifact serialises") + "\n"
        }
    };
    match &cli.common.output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(outcome.verified)
}
