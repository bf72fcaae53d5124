use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use cubemix::coord::{build_move_tables, build_quotient_tables};
use cubemix::exact::{self, ChainMode};
use cubemix::oracle::{build_pdb, default_cache_dir, layer_counts, PatternKind};
use cubemix::pipeline::{
    emit_decay_from_dataset, emit_histograms, load_distance_table, parse_steps, Dataset, DatasetManifest, Evaluator,
    Functional, Mode, RunOptions, SolveBudget, BOOTSTRAP_STREAM, INF_STEP,
};
use cubemix::stats::{bootstrap_tv, threshold_csv, threshold_report, DecayCurve};
use cubemix::tablefile::read_header;
use cubemix::walk::random_moves;
use cubemix::{format_moves, named_state, parse_moves, parse_state, solve_optimal, CubeState, Error, PdbSet, RngStream};

use crate::{BudgetArgs, PdbArgs, SampleArgs};

/// Solves deeper than this need `--allow-deep`.
pub const DEFAULT_MAX_DEPTH: u8 = 14;

/// The first-crossing value at ε = 1/4 that the exact chain is compared with.
const REFERENCE_MIXING_TIME: i64 = 19;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    MissingPdb(PathBuf),
    Io(PathBuf, std::io::Error),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::MissingPdb(_) => 6,
            CliError::Io(..) => 1,
            CliError::Core(e) => match e {
                Error::Invalid(_) | Error::DepthGuard(_) => 2,
                Error::BudgetExhausted { .. } => 3,
                Error::MemoryGuard(_) => 4,
                Error::CorruptManifest(_) => 5,
                _ => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::MissingPdb(dir) => write!(
                f,
                "pattern databases not found in {}; run `cubemix pdb build` first",
                dir.display()
            ),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn parse_mode(s: &str) -> Result<Mode> {
    Ok(s.parse::<Mode>()?)
}

fn parse_chain(s: &str) -> Result<ChainMode> {
    Ok(s.parse::<ChainMode>()?)
}

fn parse_functionals(s: &str) -> Result<Vec<Functional>> {
    let mut out = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<Functional>().map_err(CliError::from))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(usage("no functional given"));
    }
    Ok(out)
}

fn parse_one_functional(s: &str) -> Result<Functional> {
    Ok(s.parse::<Functional>()?)
}

fn solve_budget(b: &BudgetArgs) -> SolveBudget {
    SolveBudget {
        max_nodes: b.budget_nodes,
        max_seconds: b.budget_seconds,
        max_depth: (!b.allow_deep).then_some(DEFAULT_MAX_DEPTH),
    }
}

fn pdb_dir(p: &PdbArgs) -> PathBuf {
    p.pdb_dir.clone().unwrap_or_else(default_cache_dir)
}

fn load_pdbs(dir: &Path) -> Result<PdbSet> {
    PdbSet::load(dir)?.ok_or_else(|| CliError::MissingPdb(dir.to_path_buf()))
}

fn evaluator(mode: Mode, functionals: &[Functional], budget: SolveBudget, dir: &Path) -> Result<Evaluator> {
    match mode.chain() {
        None => Ok(Evaluator::full(Arc::new(load_pdbs(dir)?), budget, functionals)),
        Some(chain) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
            Ok(Evaluator::chain(&load_distance_table(chain, dir)?, functionals))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
            }
            fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

fn resolve_state(text: &str) -> Result<CubeState> {
    if let Ok(s) = named_state(text) {
        return Ok(s);
    }
    parse_state(text).map_err(|e| usage(format!("cannot read state {text:?}: {e}")))
}

pub fn scramble(n: usize, seed: u64, stream: u64) -> Result<()> {
    let mut rng = RngStream::new(seed, stream);
    let moves = random_moves(n, &mut rng);
    let state = CubeState::SOLVED.apply_sequence(&moves);
    emit(None, &format!("{}\n{}\n", format_moves(&moves), state))
}

pub fn solve(state: Option<&str>, moves: Option<&str>, target: &str, budget: &BudgetArgs, pdb: &PdbArgs) -> Result<()> {
    let x = match (state, moves) {
        (_, Some(m)) => CubeState::SOLVED.apply_sequence(&parse_moves(m).map_err(|e| usage(format!("bad moves: {e}")))?),
        (Some(s), None) => resolve_state(s)?,
        (None, None) => return Err(usage("give a state or --moves")),
    };
    let t = resolve_state(target)?;
    let pdbs = load_pdbs(&pdb_dir(pdb))?;
    let r = solve_optimal(&x.relative_to(&t), &pdbs, solve_budget(budget).into())?;
    log::info!("{} nodes in {:.3}s", r.nodes_expanded, r.elapsed);
    emit(None, &format!("{}\n{}\n", r.distance, format_moves(&r.solution)))
}

pub fn sample_rows(n: i64, args: &SampleArgs) -> Result<()> {
    if n < INF_STEP {
        return Err(usage("--n must be non-negative"));
    }
    let mode = parse_mode(&args.mode)?;
    let functionals = parse_functionals(&args.functional)?;
    let eval = evaluator(mode, &functionals, solve_budget(&args.budget), &pdb_dir(&args.pdb))?;
    let lines: Vec<String> = (0..args.samples)
        .into_par_iter()
        .map(|i| eval.row(args.seed, n, i).csv_line(&functionals))
        .collect();
    let mut text = String::from("n,sample_index");
    for f in &functionals {
        text.push(',');
        text.push_str(f.column());
    }
    text.push('\n');
    for l in lines {
        text.push_str(&l);
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)
}

/// Values of column `f` in a row CSV, skipping sentinels.
fn read_column(path: &Path, f: Functional) -> Result<Vec<u8>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| usage(format!("{} is empty", path.display())))?;
    let col = header
        .split(',')
        .position(|h| h.trim() == f.column())
        .ok_or_else(|| usage(format!("{} has no {f} column", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let v: i64 = line
            .split(',')
            .nth(col)
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| usage(format!("{}:{}: bad {f} value", path.display(), i + 2)))?;
        if v >= 0 {
            out.push(u8::try_from(v).map_err(|_| usage(format!("{}:{}: {v} out of range", path.display(), i + 2)))?);
        }
    }
    Ok(out)
}

pub fn tv(a: &Path, b: &Path, functional: &str, resamples: usize, seed: u64) -> Result<()> {
    let f = parse_one_functional(functional)?;
    let (xa, xb) = (read_column(a, f)?, read_column(b, f)?);
    let est = bootstrap_tv(&xa, &xb, resamples, &RngStream::new(seed, BOOTSTRAP_STREAM)).map_err(Error::from)?;
    emit(
        None,
        &format!(
            "point,stderr,ci_low,ci_high,resamples\n{},{},{},{},{}\n",
            cubemix::stats::format_sig9(est.point),
            cubemix::stats::format_sig9(est.stderr),
            cubemix::stats::format_sig9(est.ci_low),
            cubemix::stats::format_sig9(est.ci_high),
            est.resamples
        ),
    )
}

pub fn decay(dataset: &Path, functional: &str, resamples: usize, seed: u64, out: Option<&Path>) -> Result<()> {
    let f = parse_one_functional(functional)?;
    let ds = Dataset::open(dataset)?;
    let rows = ds.rows()?;
    if ds.manifest.sentinel_rows > 0 {
        log::warn!("{} rows hit the solver budget and are excluded", ds.manifest.sentinel_rows);
    }
    let curve = emit_decay_from_dataset(&rows, f, resamples, seed)?;
    emit(out, &curve.to_csv())
}

fn step_label(n: i64) -> String {
    if n == INF_STEP {
        "inf".into()
    } else {
        n.to_string()
    }
}

pub fn hist(dataset: &Path, functional: &str, steps: Option<&str>, out: Option<&Path>) -> Result<()> {
    let f = parse_one_functional(functional)?;
    let rows = Dataset::open(dataset)?.rows()?;
    let steps = steps.map(parse_steps).transpose()?.unwrap_or_default();
    let hists = emit_histograms(&rows, f, &steps)?;
    match out {
        Some(dir) => {
            for h in &hists {
                emit(Some(&dir.join(format!("hist_{f}_n{}.csv", step_label(h.n)))), &h.to_csv())?;
            }
            Ok(())
        }
        None => {
            let mut text = String::new();
            for h in &hists {
                text.push_str(&format!("# n={}\n{}", step_label(h.n), h.to_csv()));
            }
            emit(None, &text)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn dataset_init(
    out: &Path,
    mode: &str,
    seed: u64,
    steps: &str,
    samples: Option<u64>,
    functional: &str,
    shard_size: u64,
    budget: &BudgetArgs,
) -> Result<()> {
    let mode = parse_mode(mode)?;
    let samples = samples.unwrap_or(if mode == Mode::Full { 1_000 } else { 100_000 });
    let m = DatasetManifest::new(
        mode,
        seed,
        parse_steps(steps)?,
        samples,
        parse_functionals(functional)?,
        shard_size,
        solve_budget(budget),
    )?;
    fs::create_dir_all(out).map_err(|e| CliError::Io(out.to_path_buf(), e))?;
    let ds = Dataset::init(out, m)?;
    eprintln!(
        "initialized {}: {} rows in {} shards",
        out.display(),
        ds.manifest.total_rows(),
        ds.manifest.shards.len()
    );
    Ok(())
}

fn print_status(ds: &Dataset) {
    let st = ds.status();
    println!("mode {}", ds.manifest.mode);
    println!("shards {}/{} done", st.shards_done, st.shards_done + st.shards_pending);
    println!("rows {}/{}", st.rows_done, st.rows_total);
    println!("sentinel rows {}", st.sentinel_rows);
}

pub fn dataset_run(out: &Path, pdb: &PdbArgs, max_shards: Option<usize>) -> Result<()> {
    let mut ds = Dataset::open(out)?;
    ds.verify()?;
    let m = &ds.manifest;
    let eval = evaluator(m.mode, &m.functionals, m.budget, &pdb_dir(pdb))?;
    ds.run(&eval, RunOptions { max_shards })?;
    print_status(&ds);
    Ok(())
}

pub fn dataset_status(out: &Path) -> Result<()> {
    let ds = Dataset::open(out)?;
    ds.verify()?;
    print_status(&ds);
    println!("digests ok");
    Ok(())
}

pub fn pdb_build(pdb: &PdbArgs) -> Result<()> {
    let dir = pdb_dir(pdb);
    for kind in PatternKind::ALL {
        let path = dir.join(kind.file_name());
        if path.exists() {
            eprintln!("{} exists", path.display());
            continue;
        }
        let t = Instant::now();
        build_pdb(kind).save(&path)?;
        eprintln!("built {} in {:.1}s", path.display(), t.elapsed().as_secs_f64());
    }
    Ok(())
}

pub fn pdb_info(pdb: &PdbArgs) -> Result<()> {
    let dir = pdb_dir(pdb);
    let mut text = String::new();
    for kind in PatternKind::ALL {
        let path = dir.join(kind.file_name());
        if !path.exists() {
            text.push_str(&format!("{}: missing\n", path.display()));
            continue;
        }
        let h = read_header(&path)?;
        let table = cubemix::oracle::PatternDatabase::load(&path, kind)?;
        let counts = layer_counts(&table.table);
        text.push_str(&format!(
            "{}: {:?}, {} entries, max {}, format v{}\n  layers {:?}\n",
            path.display(),
            h.kind,
            h.entries,
            counts.len() - 1,
            h.version,
            counts
        ));
    }
    emit(None, &text)
}

pub fn exact_tables(mode: &str) -> Result<()> {
    let t = Instant::now();
    let msg = match parse_chain(mode)? {
        ChainMode::Corner => {
            let tables = build_move_tables().map_err(Error::from)?;
            format!(
                "corner tables: permutation {}x18, orientation {}x18",
                tables.perm_table.len(),
                tables.ori_table.len()
            )
        }
        ChainMode::Quotient => {
            let tables = build_quotient_tables().map_err(Error::from)?;
            format!(
                "quotient tables: permutation {}x18, orientation {}x18",
                tables.perm_table.len(),
                tables.ori_table.len()
            )
        }
    };
    emit(None, &format!("{msg}; factorization verified in {:.2}s\n", t.elapsed().as_secs_f64()))
}

pub fn exact_bfs(mode: &str, out: Option<&Path>) -> Result<()> {
    let table = exact::distance_table(parse_chain(mode)?);
    if let Some(path) = out {
        table.save(path)?;
    }
    let mut text = String::from("distance,count\n");
    for (d, c) in table.layer_counts().iter().enumerate() {
        text.push_str(&format!("{d},{c}\n"));
    }
    eprintln!("diameter {}", table.diameter);
    emit(None, &text)
}

pub fn exact_decay(max_n: usize, mode: &str, functional: Option<&str>, pdb: &PdbArgs, out: Option<&Path>) -> Result<()> {
    let chain = parse_chain(mode)?;
    let functionals = functional.map(parse_functionals).transpose()?.unwrap_or_default();
    let labels: Vec<(Functional, Vec<u8>)> = if functionals.is_empty() {
        Vec::new()
    } else {
        let dir = pdb_dir(pdb);
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.clone(), e))?;
        let table = load_distance_table(chain, &dir)?;
        functionals
            .iter()
            .map(|&f| (f, table.rebased(&named_state(f.target_name()).expect("built-in").corners())))
            .collect()
    };
    let named: Vec<(&str, &[u8])> = labels.iter().map(|(f, l)| (f.column(), l.as_slice())).collect();
    let t = Instant::now();
    let decay = exact::exact_decay_with(chain, max_n, &named, |n, tv| {
        log::info!("n={n} tv={tv:.9} ({:.1}s)", t.elapsed().as_secs_f64());
    })?;
    let report = threshold_report(&decay.full);
    let crossing = report.iter().find(|(e, _)| *e == 0.25).and_then(|(_, n)| *n);
    eprintln!(
        "{chain} chain: first n with TV <= 0.25 is {}; reference value {REFERENCE_MIXING_TIME} ({})",
        crossing.map(|n| n.to_string()).unwrap_or_else(|| "not reached".into()),
        if crossing == Some(REFERENCE_MIXING_TIME) { "agrees" } else { "differs" }
    );
    match out {
        Some(dir) => {
            emit(Some(&dir.join("decay_full.csv")), &decay.full.to_csv())?;
            emit(Some(&dir.join("thresholds_full.csv")), &threshold_csv(&report))?;
            for p in &decay.projections {
                emit(Some(&dir.join(format!("decay_{}.csv", p.name))), &p.curve.to_csv())?;
                emit(
                    Some(&dir.join(format!("thresholds_{}.csv", p.name))),
                    &threshold_csv(&threshold_report(&p.curve)),
                )?;
            }
            Ok(())
        }
        None => emit(None, &decay.full.to_csv()),
    }
}

pub fn thresholds(curve: &Path, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(curve).map_err(|e| CliError::Io(curve.to_path_buf(), e))?;
    let c = DecayCurve::from_csv(&text).map_err(Error::from)?;
    emit(out, &threshold_csv(&threshold_report(&c)))
}
