use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use std::fmt::Write as _;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use weavecalc::chromatic::{brute_force_colorings, chromatic_poly, ChromaticSolver};
use weavecalc::cobordism::{attach_handle, can_extend_mode, LoopMode};
use weavecalc::coloring::{count_colorings, count_table, ColoringProblem};
use weavecalc::formats::{
    complex_to_text, datum_to_text, homotopy_to_text, parse_gluing, parse_homalg, parse_patch,
};
use weavecalc::homalg::{cone, is_quasi_iso, solve_homotopy, check_homotopy};
use weavecalc::obstruct::{
    check_cobordism, check_filling, les_chi, les_chi_mv, CobordismHypothesis, Verdict,
};
use weavecalc::randgen::{
    random_graph, random_planar_map, random_sheaf_datum, rng_from_seed,
};
use weavecalc::surface_map::CombMap;
use weavecalc::weave_moves::{apply_patch, build_lambda, insert_bigon, insert_triangle, predict,
    WeaveMove};

const RECORDS_HEADER: &str = "#weavecalc records 1";
const Q_ENV: &str = "WEAVECALC_Q";

#[derive(Parser)]
#[command(
    name = "weavecalc",
    version,
    about = "Counting calculator for trivalent surface graphs: colorings over \
             projective lines, chromatic oracles, local surgeries, and \
             chain-level handle attachments over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count proper colorings of the faces by points of P^1(F_q)
    Count(CountArgs),
    /// Chromatic polynomial of the face-adjacency graph
    Chromatic(ChromaticArgs),
    /// Apply a local surgery and print the resulting graph
    Move(MoveArgs),
    /// Build the standard genus-g graph with k triangle summands
    BuildLambda(BuildLambdaArgs),
    /// Check and perform a handle attachment on a sheaf datum
    CobordismAct(CobordismActArgs),
    /// Chain-complex calculations over prime fields
    Homalg(HomalgArgs),
    /// Count-based obstruction checks
    Obstruct(ObstructArgs),
    /// Seeded randomized cross-checks of the counting engines
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct CountArgs {
    /// Builtin name (theta, tetra, bigon, loop), file path, or `-` for stdin
    #[arg(long)]
    graph: String,
    /// Comma-separated field sizes; default from WEAVECALC_Q or 2,3,4,5
    #[arg(long)]
    q: Option<String>,
    /// Pin the first pairwise-adjacent face triple to (0, 1, inf)
    #[arg(long)]
    framed: bool,
    /// Also list up to N solutions (per the smallest q)
    #[arg(long, value_name = "N")]
    enumerate: Option<usize>,
    /// Line-delimited key=value output
    #[arg(long)]
    records: bool,
}

#[derive(Args)]
struct ChromaticArgs {
    #[arg(long)]
    graph: String,
    /// Evaluate at t = q+1 for these q
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    records: bool,
}

#[derive(Args)]
struct MoveArgs {
    #[arg(long)]
    graph: String,
    /// Insert a triangle at the vertex containing this dart
    #[arg(long, value_name = "DART", conflicts_with_all = ["bigon", "patch"])]
    triangle: Option<u32>,
    /// Insert a bigon on the edge containing this dart
    #[arg(long, value_name = "DART", conflicts_with = "patch")]
    bigon: Option<u32>,
    /// Apply a disk patch from a file
    #[arg(long, value_name = "FILE")]
    patch: Option<PathBuf>,
}

#[derive(Args)]
struct BuildLambdaArgs {
    #[arg(long)]
    g: i64,
    #[arg(long)]
    k: i64,
}

#[derive(Args)]
struct CobordismActArgs {
    /// Datum file (complexes, maps, and a datum section)
    #[arg(long)]
    datum: PathBuf,
    /// Gluing file: a map (1-handle) or homotopy (2-handle)
    #[arg(long)]
    gluing: Option<PathBuf>,
    /// For 2-handles, compare monodromy on homology only
    #[arg(long)]
    weak: bool,
    #[arg(long)]
    records: bool,
}

#[derive(Args)]
struct HomalgArgs {
    #[command(subcommand)]
    cmd: HomalgCmd,
}

#[derive(Subcommand)]
enum HomalgCmd {
    /// Homology ranks of a complex
    Ranks {
        #[arg(long)]
        file: PathBuf,
        /// Complex name; defaults to the first one in the file
        #[arg(long)]
        name: Option<String>,
    },
    /// Mapping cone of a chain map
    Cone {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        map: String,
    },
    /// Is the map a quasi-isomorphism?
    QuasiIso {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        map: String,
    },
    /// Check or solve the homotopy equation H d - d H = f02 - f12 f01
    Homotopy {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        f01: String,
        #[arg(long)]
        f12: String,
        #[arg(long)]
        f02: String,
        /// Verify this named homotopy instead of solving
        #[arg(long)]
        witness: Option<String>,
    },
}

#[derive(Args)]
struct ObstructArgs {
    #[command(subcommand)]
    cmd: ObstructCmd,
}

#[derive(Subcommand)]
enum ObstructCmd {
    /// A vanishing framed count at any q rules out a filling
    Filling {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        fail_on_obstructed: bool,
        #[arg(long)]
        records: bool,
    },
    /// A framed-count drop rules out a cobordism under the stated hypotheses
    Cobordism {
        #[arg(long)]
        minus: String,
        #[arg(long)]
        plus: String,
        #[arg(long)]
        q: Option<String>,
        /// Assert that a hypothetical cobordism restricts surjectively on H^1
        #[arg(long)]
        h1_surjective: bool,
        /// Drop the Maslov-0 hypothesis (makes the check inconclusive)
        #[arg(long)]
        no_maslov_zero: bool,
        #[arg(long)]
        fail_on_obstructed: bool,
        #[arg(long)]
        records: bool,
    },
    /// Euler characteristic of the convex end from the long exact sequence
    Les {
        #[arg(long, allow_negative_numbers = true)]
        chi_l: i64,
        #[arg(long, allow_negative_numbers = true)]
        chi_lminus: i64,
        #[arg(long)]
        rf: i64,
        #[arg(long)]
        rg: i64,
        #[arg(long, allow_negative_numbers = true)]
        chi_minus: i64,
        /// Use the Mayer-Vietoris form of the identity (same value)
        #[arg(long)]
        mv: bool,
    },
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 25)]
    cases: usize,
}

#[derive(Debug)]
struct CliError(String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CliError {}

type AnyError = Box<dyn std::error::Error>;

fn err(msg: impl Into<String>) -> AnyError {
    Box::new(CliError(msg.into()))
}

fn read_graph(spec: &str) -> Result<CombMap, AnyError> {
    if spec == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        return Ok(CombMap::parse(&buf)?);
    }
    if let Ok(m) = CombMap::builtin(spec) {
        return Ok(m);
    }
    let path = std::path::Path::new(spec);
    if !path.exists() {
        return Err(err(format!(
            "`{spec}` is neither a builtin graph nor an existing file"
        )));
    }
    let text = std::fs::read_to_string(path)?;
    Ok(CombMap::parse(&text)?)
}

fn parse_q_list(arg: &Option<String>) -> Result<Vec<u64>, AnyError> {
    let raw = match arg {
        Some(s) => s.clone(),
        None => std::env::var(Q_ENV).unwrap_or_else(|_| "2,3,4,5".to_string()),
    };
    let mut out = Vec::new();
    for tok in raw.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let q: u64 = tok
            .parse()
            .map_err(|_| err(format!("bad q value `{tok}`")))?;
        if q < 2 {
            return Err(err(format!("q must be at least 2, got {q}")));
        }
        out.push(q);
    }
    if out.is_empty() {
        return Err(err("empty q list"));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<ExitCode, AnyError> {
    match cli.cmd {
        Cmd::Count(a) => cmd_count(a),
        Cmd::Chromatic(a) => cmd_chromatic(a),
        Cmd::Move(a) => cmd_move(a),
        Cmd::BuildLambda(a) => {
            let map = build_lambda(a.g, a.k)?;
            print!("{}", map.to_text());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CobordismAct(a) => cmd_cobordism_act(a),
        Cmd::Homalg(a) => cmd_homalg(a),
        Cmd::Obstruct(a) => cmd_obstruct(a),
        Cmd::Selftest(a) => cmd_selftest(a),
    }
}

fn cmd_count(a: CountArgs) -> Result<ExitCode, AnyError> {
    let map = read_graph(&a.graph)?;
    let qs = parse_q_list(&a.q)?;
    let table = count_table(&map, &qs, a.framed)?;
    if a.records {
        println!("{RECORDS_HEADER}");
        println!("command=count graph={} framed={}", a.graph, a.framed);
        for (q, v) in &table.rows {
            println!("q={q} count={v}");
        }
    } else {
        print!("{table}");
    }
    if let Some(limit) = a.enumerate {
        let q = *qs.iter().min().expect("nonempty q list");
        let mut prob = ColoringProblem::new(&map, q)?;
        if a.framed {
            prob.frame_canonical()?;
        }
        let enumeration = prob.enumerate(limit);
        let space = prob.space().clone();
        if a.records {
            for sol in &enumeration.solutions {
                let row: Vec<String> = sol.iter().map(|&c| space.display(c)).collect();
                println!("solution q={q} colors={}", row.join(","));
            }
        } else {
            println!("solutions at q = {q} (first {limit}):");
            for sol in &enumeration.solutions {
                let row: Vec<String> = sol.iter().map(|&c| space.display(c)).collect();
                println!("  [{}]", row.join(", "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_chromatic(a: ChromaticArgs) -> Result<ExitCode, AnyError> {
    let map = read_graph(&a.graph)?;
    let fg = map.face_adjacency();
    let p = chromatic_poly(&fg);
    if a.records {
        println!("{RECORDS_HEADER}");
        println!("command=chromatic graph={}", a.graph);
        println!("polynomial={p}");
    } else {
        println!("P(t) = {p}");
    }
    if let Some(qarg) = &a.q {
        let qs = parse_q_list(&Some(qarg.clone()))?;
        for q in qs {
            let v = p.eval(&BigInt::from(q + 1));
            if a.records {
                println!("q={q} t={} value={v}", q + 1);
            } else {
                println!("P({}) = {v}   # q = {q}", q + 1);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_move(a: MoveArgs) -> Result<ExitCode, AnyError> {
    let map = read_graph(&a.graph)?;
    let (result, mv) = if let Some(d) = a.triangle {
        (insert_triangle(&map, d)?, Some(WeaveMove::TriangleInsertion(d)))
    } else if let Some(d) = a.bigon {
        (insert_bigon(&map, d)?, Some(WeaveMove::BigonInsertion(d)))
    } else if let Some(path) = &a.patch {
        let text = std::fs::read_to_string(path)?;
        let patch = parse_patch(&text)?;
        (apply_patch(&map, &patch)?, None)
    } else {
        return Err(err("move needs one of --triangle, --bigon, --patch"));
    };
    if let Some(mv) = mv {
        if let Some(p) = predict(&mv) {
            println!("# {}", p.description);
            println!("# count factor: {}", p.factor.to_string().replace('t', "q"));
            println!("# genus change: {:+}", p.genus_delta);
        }
    } else {
        println!("# patch applied; no generic count prediction");
    }
    print!("{}", result.to_text());
    Ok(ExitCode::SUCCESS)
}

fn cmd_cobordism_act(a: CobordismActArgs) -> Result<ExitCode, AnyError> {
    let text = std::fs::read_to_string(&a.datum)?;
    let file = parse_homalg(&text)?;
    let datum = file
        .datum
        .ok_or_else(|| err("datum file has no datum section"))?;
    datum.check_split_ranks()?;
    let mode = if a.weak {
        LoopMode::HomologyOnly
    } else {
        LoopMode::Strict
    };
    let report = can_extend_mode(&datum, mode)?;
    let stalk = datum.microstalk();
    let ranks = stalk.homology_ranks();
    let mut rank_str = String::new();
    for (n, r) in &ranks {
        let _ = write!(rank_str, "H^{n}={r} ");
    }
    if a.records {
        println!("{RECORDS_HEADER}");
        println!("command=cobordism-act k={}", datum.attach_k);
        println!("microstalk_ranks={}", rank_str.trim_end());
        println!("extends={}", report.extends);
        println!("reason={}", report.reason);
    } else {
        println!("handle index k = {}", datum.attach_k);
        println!("microstalk homology ranks: {}", rank_str.trim_end());
        println!(
            "{}: {}",
            if report.extends { "extends" } else { "does not extend" },
            report.reason
        );
    }
    if let Some(gpath) = &a.gluing {
        let gtext = std::fs::read_to_string(gpath)?;
        let gluing = parse_gluing(&gtext)?;
        let result = attach_handle(&datum, gluing)?;
        if a.records {
            println!("attached=true");
        } else {
            println!("attached; transition across the handle (A block first):");
            for &n in result.transition.source().dims().keys() {
                let m = result.transition.component(n);
                println!("degree {n}:");
                for r in 0..m.rows {
                    let row: Vec<String> =
                        (0..m.cols).map(|c| m.get(r, c).to_string()).collect();
                    println!("  {}", row.join(" "));
                }
            }
            print!("{}", datum_to_text(&result.datum_plus));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_homalg(a: HomalgArgs) -> Result<ExitCode, AnyError> {
    match a.cmd {
        HomalgCmd::Ranks { file, name } => {
            let parsed = parse_homalg(&std::fs::read_to_string(&file)?)?;
            let (cname, c) = match &name {
                Some(n) => (
                    n.clone(),
                    parsed
                        .complexes
                        .get(n)
                        .ok_or_else(|| err(format!("no complex named `{n}`")))?,
                ),
                None => {
                    let (n, c) = parsed
                        .complexes
                        .iter()
                        .next()
                        .ok_or_else(|| err("file contains no complexes"))?;
                    (n.clone(), c)
                }
            };
            println!("complex {cname} over F_{}", c.p());
            let ranks = c.homology_ranks();
            if ranks.is_empty() {
                println!("acyclic");
            } else {
                for (n, r) in ranks {
                    println!("H^{n} rank {r}");
                }
            }
        }
        HomalgCmd::Cone { file, map } => {
            let parsed = parse_homalg(&std::fs::read_to_string(&file)?)?;
            let f = parsed
                .maps
                .get(&map)
                .ok_or_else(|| err(format!("no map named `{map}`")))?;
            let c = cone(f);
            print!("{}", complex_to_text("cone", &c));
            let ranks = c.homology_ranks();
            if ranks.is_empty() {
                println!("# acyclic");
            } else {
                for (n, r) in ranks {
                    println!("# H^{n} rank {r}");
                }
            }
        }
        HomalgCmd::QuasiIso { file, map } => {
            let parsed = parse_homalg(&std::fs::read_to_string(&file)?)?;
            let f = parsed
                .maps
                .get(&map)
                .ok_or_else(|| err(format!("no map named `{map}`")))?;
            println!("{}", if is_quasi_iso(f) { "quasi-iso" } else { "not quasi-iso" });
        }
        HomalgCmd::Homotopy {
            file,
            f01,
            f12,
            f02,
            witness,
        } => {
            let parsed = parse_homalg(&std::fs::read_to_string(&file)?)?;
            let get = |n: &str| {
                parsed
                    .maps
                    .get(n)
                    .ok_or_else(|| err(format!("no map named `{n}`")))
            };
            let (f01, f12, f02) = (get(&f01)?, get(&f12)?, get(&f02)?);
            match witness {
                Some(hname) => {
                    let h = parsed
                        .homotopies
                        .get(&hname)
                        .ok_or_else(|| err(format!("no homotopy named `{hname}`")))?;
                    let ok = check_homotopy(h, f02, f12, f01)?;
                    println!("{}", if ok { "homotopy verified" } else { "homotopy fails" });
                }
                None => {
                    let rhs = f02.sub(&f12.compose(f01)?);
                    match solve_homotopy(f02.source(), &rhs) {
                        Some(h) => {
                            println!("# solvable");
                            print!("{}", homotopy_to_text("H", &h));
                        }
                        None => println!("no homotopy exists"),
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verdict_exit(v: &Verdict, fail_on_obstructed: bool) -> ExitCode {
    if fail_on_obstructed && v.is_obstructed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn print_verdict(v: &Verdict, records: bool, command: &str) {
    if records {
        println!("{RECORDS_HEADER}");
        println!("command={command}");
        match v {
            Verdict::Obstructed {
                q,
                count_minus,
                count_plus,
                ..
            } => {
                println!("status=obstructed");
                println!("q={q} count_minus={count_minus} count_plus={count_plus}");
            }
            Verdict::Consistent { .. } => println!("status=consistent"),
            Verdict::Inconclusive { .. } => println!("status=inconclusive"),
        }
        println!("rule={}", v.rule());
    } else {
        println!("{v}");
    }
}

fn cmd_obstruct(a: ObstructArgs) -> Result<ExitCode, AnyError> {
    match a.cmd {
        ObstructCmd::Filling {
            graph,
            q,
            fail_on_obstructed,
            records,
        } => {
            let map = read_graph(&graph)?;
            let qs = parse_q_list(&q)?;
            let v = check_filling(&map, &qs)?;
            print_verdict(&v, records, "obstruct-filling");
            Ok(verdict_exit(&v, fail_on_obstructed))
        }
        ObstructCmd::Cobordism {
            minus,
            plus,
            q,
            h1_surjective,
            no_maslov_zero,
            fail_on_obstructed,
            records,
        } => {
            let m = read_graph(&minus)?;
            let p = read_graph(&plus)?;
            let qs = parse_q_list(&q)?;
            let hyp = CobordismHypothesis {
                maslov_zero: !no_maslov_zero,
                h1_surjective,
                filling: false,
            };
            let v = check_cobordism(&m, &p, &hyp, &qs)?;
            print_verdict(&v, records, "obstruct-cobordism");
            Ok(verdict_exit(&v, fail_on_obstructed))
        }
        ObstructCmd::Les {
            chi_l,
            chi_lminus,
            rf,
            rg,
            chi_minus,
            mv,
        } => {
            let v = if mv {
                les_chi_mv(chi_l, chi_lminus, rf, rg, chi_minus)
            } else {
                les_chi(chi_l, chi_lminus, rf, rg, chi_minus)
            };
            println!("chi_plus = {v}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_selftest(a: SelftestArgs) -> Result<ExitCode, AnyError> {
    use num_bigint::BigUint;
    use rand::Rng;

    let mut rng = rng_from_seed(a.seed);
    let n = a.cases;

    // coloring counts against the chromatic polynomial on random planar maps
    for _ in 0..n {
        let map = random_planar_map(&mut rng, 9);
        let p = chromatic_poly(&map.face_adjacency());
        for q in [2u64, 3, 5] {
            let direct = count_colorings(&map, q)?.count;
            let via_poly = p.eval(&BigInt::from(q + 1));
            if BigInt::from(direct.clone()) != via_poly {
                return Err(err(format!(
                    "count mismatch at q={q}: {direct} vs {via_poly}"
                )));
            }
        }
    }
    println!("ok coloring-vs-chromatic ({n} maps)");

    // chromatic polynomial against exhaustive counting on random graphs
    let mut solver = ChromaticSolver::new();
    for _ in 0..n {
        let verts = rng.gen_range(1..=6);
        let edges = random_graph(&mut rng, verts, 0.5);
        let p = solver.chromatic_poly_edges(verts, &edges);
        for t in 0..=4u64 {
            let brute = brute_force_colorings(verts, &edges, t);
            if p.eval(&BigInt::from(t)) != BigInt::from(brute) {
                return Err(err("chromatic polynomial disagrees with brute force"));
            }
        }
    }
    println!("ok chromatic-vs-brute-force ({n} graphs)");

    // triangle insertion multiplies framed counts by q-2
    for _ in 0..n {
        let map = random_planar_map(&mut rng, 7);
        let verts = map.vertices();
        let site = verts[rng.gen_range(0..verts.len())][0];
        let bigger = insert_triangle(&map, site)?;
        for q in [3u64, 5] {
            let before = weavecalc::coloring::framed_count(&map, q)?;
            let after = weavecalc::coloring::framed_count(&bigger, q)?;
            if after != before.clone() * BigUint::from(q - 2) {
                return Err(err("triangle insertion factor failed"));
            }
        }
    }
    println!("ok triangle-factor ({n} hosts)");

    // split sheaf data satisfy the rank identity
    for _ in 0..n {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let datum = random_sheaf_datum(&mut rng, p);
        datum.check_split_ranks()?;
    }
    println!("ok stalk-splitting-ranks ({n} data)");

    println!("selftest passed (seed {})", a.seed);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
