use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tropical_quartics::bitangents::{algorithm1_collect, shape_c_lifts, verify_theorem_a, ExternalClassData};
use tropical_quartics::curvegeom::{find_motif_c, is_nongeneric_triangulation, nongeneric_locus, MotifC};
use tropical_quartics::datastore::{self, Database, Predicate};
use tropical_quartics::heights::{induced_subdivision, is_regular, Convention, HeightVector};
use tropical_quartics::lattice::{num_points, S3Element};
use tropical_quartics::patchwork::{
    count_ovals, lifting_class_count, real_bitangent_count, render_svg, topology, RealTopology,
};
use tropical_quartics::survey::{census_of, sweep, table1, table3, with_jobs, TopologyClass, TABLE3_SETS};
use tropical_quartics::triangulation::{enumerate_all, Triangulation};
use tropical_quartics::twist::{is_admissible, is_dividing, twisted_edges, SignDistribution};

#[derive(Parser)]
#[command(name = "tquart", version, about = "Real tropical plane quartics: triangulations, patchworking and bitangents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate regular unimodular triangulations of dΔ₂ up to symmetry.
    Enumerate {
        #[arg(long, default_value_t = 4)]
        degree: u32,
        /// Only list triangulations none of whose dual curves is generic.
        #[arg(long)]
        nongeneric: bool,
        /// Write one line per triangulation: id, orbit size, cells.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Real part, twisted edges and bitangent count of one real tropical curve.
    Analyze {
        #[command(flatten)]
        input: CurveInput,
        #[command(flatten)]
        signs: SignArgs,
        /// Override the motif indices as `i,j,k`.
        #[arg(long)]
        motif: Option<String>,
        /// Motif orientation (S3 element code 0, 4 or 5) used with --motif.
        #[arg(long, default_value_t = 0)]
        orientation: usize,
        /// Also write the patchwork picture to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Classify all 2^14 sign classes of one quartic triangulation.
    Sweep {
        #[command(flatten)]
        input: CurveInput,
    },
    /// Sweep every quartic triangulation and print the census tables.
    Census {
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the record archive (JSON) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the patchworked real part as SVG.
    Render {
        #[command(flatten)]
        input: CurveInput,
        #[command(flatten)]
        signs: SignArgs,
        #[arg(long, alias = "svg")]
        out: PathBuf,
    },
    /// Build and query the record archive.
    Db {
        #[command(subcommand)]
        command: DbCommand,
    },
    /// Compare the subtraction algorithm against the closed sign formula,
    /// using externally supplied lifting conditions.
    VerifyTheoremA {
        #[arg(long)]
        class_data: PathBuf,
        /// Restrict to one triangulation (default: every non-generic one).
        #[arg(long)]
        cells: Option<String>,
        #[arg(long)]
        motif: Option<String>,
        #[arg(long, default_value_t = 0)]
        orientation: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Subcommand)]
enum DbCommand {
    /// Run the census and write the archive.
    Build {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the record of a triangulation.
    Find {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        input: CurveInput,
    },
    /// Count records satisfying all predicates (`PATH=VALUE`, `PATH~VALUE`).
    Count {
        #[arg(long)]
        db: PathBuf,
        #[arg(required = true)]
        predicates: Vec<String>,
    },
}

#[derive(Args)]
struct CurveInput {
    /// Maximal cells as a JSON list of index triples.
    #[arg(long, conflicts_with = "weights", required_unless_present = "weights")]
    cells: Option<String>,
    /// Height per lattice point, comma separated (rationals allowed).
    #[arg(long)]
    weights: Option<String>,
    /// Degree; inferred from the input when omitted.
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long, default_value = "min")]
    convention: Convention,
}

#[derive(Args)]
struct SignArgs {
    /// Sign per lattice point (default: all +1).
    #[arg(long, allow_hyphen_values = true)]
    signs: Option<String>,
}

/// Failure with its exit status: 1 for bad input, 2 for a broken invariant.
struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl ToString) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

fn violated(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

type Outcome = Result<(), Failure>;

fn degree_for_len(n: usize) -> Option<u32> {
    (1..64).find(|&d| num_points(d) == n)
}

struct Curve {
    t: Triangulation,
    heights: Option<HeightVector>,
    convention: Convention,
}

impl CurveInput {
    fn load(&self) -> Result<Curve, Failure> {
        if let Some(text) = &self.weights {
            let h = HeightVector::parse(text).map_err(invalid)?;
            let degree = match self.degree {
                Some(d) => d,
                None => degree_for_len(h.len()).ok_or_else(|| invalid(format!("{} weights fit no degree", h.len())))?,
            };
            let t = induced_subdivision(degree, &h, self.convention).map_err(invalid)?;
            return Ok(Curve { t, heights: Some(h), convention: self.convention });
        }
        let text = self.cells.as_deref().expect("clap requires cells or weights");
        let degree = match self.degree {
            Some(d) => d,
            None => {
                let raw: Vec<Vec<usize>> = serde_json::from_str(text.trim()).map_err(invalid)?;
                let max = raw.iter().flatten().copied().max().ok_or_else(|| invalid("empty cell list"))?;
                (1..64)
                    .find(|&d| num_points(d) > max)
                    .ok_or_else(|| invalid("cell indices too large"))?
            }
        };
        let t = Triangulation::parse_cell_list(degree, text).map_err(invalid)?;
        Ok(Curve { t, heights: None, convention: self.convention })
    }
}

impl SignArgs {
    fn load(&self, degree: u32) -> Result<SignDistribution, Failure> {
        match &self.signs {
            None => Ok(SignDistribution::all_positive(num_points(degree))),
            Some(text) => SignDistribution::parse(text).and_then(|d| d.expect_len(degree)).map_err(invalid),
        }
    }
}

fn parse_motif(text: &str, orientation: usize) -> Result<(S3Element, [u32; 3]), Failure> {
    let parts: Vec<u32> = text
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid(format!("--motif expects i,j,k, got `{text}`")))?;
    let [i, j, k] = <[u32; 3]>::try_from(parts).map_err(|_| invalid("--motif expects three indices"))?;
    if [i, j, k].iter().any(|&v| v > 4) {
        return Err(invalid("motif indices must lie in 0..=4"));
    }
    let g = S3Element::from_code(orientation)
        .filter(|g| S3Element::rotations().contains(g))
        .ok_or_else(|| invalid("--orientation must be 0, 4 or 5"))?;
    Ok((g, [i, j, k]))
}

/// Motifs of `t`, with the explicit override applied to the chosen orientation.
fn motifs_with_override(t: &Triangulation, motif: Option<&str>, orientation: usize) -> Result<Vec<MotifC>, Failure> {
    let found = find_motif_c(t);
    let Some(text) = motif else { return Ok(found) };
    let (g, [i, j, k]) = parse_motif(text, orientation)?;
    let m = found
        .into_iter()
        .find(|m| m.orientation == g)
        .ok_or_else(|| invalid("the triangulation does not contain the shape-(C) motif"))?;
    Ok(vec![m.with_indices(i, j, k)])
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

fn enumerate(degree: u32, nongeneric: bool, out: Option<PathBuf>, jobs: Option<usize>) -> Outcome {
    if !(1..=4).contains(&degree) {
        return Err(invalid("enumeration is supported for degrees 1 to 4"));
    }
    let mut classes = with_jobs(jobs, || enumerate_all(degree));
    if nongeneric {
        classes.retain(|c| is_nongeneric_triangulation(&c.triangulation));
    }
    let orbit: usize = classes.iter().map(|c| c.orbit_size).sum();
    println!("triangulations: {}", classes.len());
    println!("with symmetric images: {orbit}");
    if let Some(path) = out {
        let mut text = String::new();
        for (id, c) in classes.iter().enumerate() {
            text.push_str(&format!("{id} {} {}\n", c.orbit_size, c.triangulation));
        }
        write_file(&path, &text)?;
    }
    Ok(())
}

fn topology_label(rt: RealTopology) -> &'static str {
    match (rt.ovals, rt.nested) {
        (2, true) => "nested",
        (2, false) => "not nested",
        _ => "n/a",
    }
}

fn analyze(input: CurveInput, signs: SignArgs, motif: Option<String>, orientation: usize, svg: Option<PathBuf>) -> Outcome {
    let curve = input.load()?;
    let t = &curve.t;
    let delta = signs.load(t.degree())?;
    let twisted = twisted_edges(t, &delta);
    if !is_admissible(t, &twisted) {
        return Err(violated("twisted edge set is not admissible"));
    }
    let dividing = is_dividing(t, &delta);
    let ovals = count_ovals(t, &delta);
    println!("degree: {}", t.degree());
    println!("cells: {t}");
    match &curve.heights {
        Some(_) => println!("regular: yes (induced by the given weights)"),
        None => println!("regular: {}", if is_regular(t).is_some() { "yes" } else { "no" }),
    }
    println!("signs: {delta}");
    println!("ovals: {ovals}");
    println!("dividing: {dividing}");
    println!("twisted edges: {twisted}");
    if t.degree() == 4 {
        let rt = topology(t, &delta);
        if ovals % 2 == 1 && dividing || ovals == 4 && !dividing {
            return Err(violated(format!("{ovals} ovals with dividing = {dividing}")));
        }
        let bitangents = real_bitangent_count(rt).ok_or_else(|| violated(format!("{ovals} ovals in a quartic")))?;
        println!("nesting: {}", topology_label(rt));
        println!("real bitangents: {bitangents}");
        println!("lifting classes: {}", lifting_class_count(rt).expect("valid topology"));
        let motifs = motifs_with_override(t, motif.as_deref(), orientation)?;
        if motifs.is_empty() {
            println!("shape (C) motif: absent");
        } else {
            println!("nongeneric triangulation: {}", is_nongeneric_triangulation(t));
            for m in &motifs {
                let lifts = if shape_c_lifts(&delta, m) { "lifts" } else { "does not lift" };
                println!("shape (C) motif: {m}: {lifts}");
            }
            if let Some(h) = &curve.heights {
                let locus = nongeneric_locus(t, &motifs[0], h, curve.convention).map_err(violated)?;
                println!("genericity at motif: {locus}");
            }
        }
    }
    if let Some(path) = svg {
        let heights = curve.heights.as_ref().map(|h| (h, curve.convention));
        write_file(&path, &render_svg(t, &delta, heights).map_err(violated)?)?;
    }
    Ok(())
}

fn sweep_command(input: CurveInput) -> Outcome {
    let curve = input.load()?;
    if curve.t.degree() != 4 {
        return Err(invalid("sweeps are defined for quartics"));
    }
    let r = sweep(&curve.t).map_err(violated)?;
    println!("canonical cells: {}", curve.t.canonical_form().triangulation);
    println!("orbit size: {}", r.orbit_size);
    for class in TopologyClass::ALL {
        let rep = r.representatives[class.index()].map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        println!("{:<16} {:>6}  {}", class.to_string(), r.count(class), rep);
    }
    let numbers: Vec<String> = r.bitangent_numbers().iter().map(u32::to_string).collect();
    println!("real bitangent numbers: {}", numbers.join(" "));
    if r.total() != 1 << 14 || !r.bitangent_numbers().contains(&28) {
        return Err(violated("sweep totals are inconsistent"));
    }
    Ok(())
}

fn run_census(jobs: Option<usize>) -> Result<Vec<datastore::QuarticRecord>, Failure> {
    let classes = with_jobs(jobs, || enumerate_all(4));
    eprintln!("enumerated {} triangulations", classes.len());
    let progress = |done: usize, total: usize| {
        if done.is_multiple_of(100) || done == total {
            eprintln!("swept {done}/{total}");
        }
    };
    let sweeps = census_of(&classes, jobs, Some(&progress)).map_err(violated)?;
    let t1 = table1(&sweeps);
    let t3 = table3(&sweeps);
    let n = sweeps.len() as u64;
    if t1.mod_s3_sum() != n << 14 || t1.total_sum() != (classes.iter().map(|c| c.orbit_size as u64).sum::<u64>() << 14) {
        return Err(violated("census checksums do not add up"));
    }
    let names = TopologyClass::ALL.map(|c| c.to_string());
    println!("Real topology       {}", names.map(|s| format!("{s:>16}")).join(""));
    println!("up to symmetry      {}", t1.mod_s3.map(|c| format!("{c:>16}")).join(""));
    println!("all triangulations  {}", t1.total.map(|c| format!("{c:>16}")).join(""));
    println!("share (%)           {}", t1.percentages().map(|p| format!("{p:>16.1}")).join(""));
    println!("sums: {} up to symmetry, {} in total", t1.mod_s3_sum(), t1.total_sum());
    println!();
    println!("Real bitangent numbers achieved   triangulations");
    for (set, count) in TABLE3_SETS.iter().zip(t3.counts) {
        let s: Vec<String> = set.iter().map(u32::to_string).collect();
        println!("{:<33} {count}", format!("{{{}}}", s.join(",")));
    }
    for (set, count) in &t3.other {
        println!("{set:?} {count} (unexpected)");
    }
    if !t3.other.is_empty() {
        return Err(violated("a triangulation misses 28 real bitangents"));
    }
    eprintln!("checking genericity");
    Ok(datastore::build_records(&sweeps, jobs))
}

fn census_command(jobs: Option<usize>, out: Option<PathBuf>) -> Outcome {
    let records = run_census(jobs)?;
    if let Some(path) = out {
        write_file(&path, &datastore::export(&records))?;
        eprintln!("wrote {} records to {}", records.len(), path.display());
    }
    Ok(())
}

fn render(input: CurveInput, signs: SignArgs, out: PathBuf) -> Outcome {
    let curve = input.load()?;
    let delta = signs.load(curve.t.degree())?;
    let heights = curve.heights.as_ref().map(|h| (h, curve.convention));
    write_file(&out, &render_svg(&curve.t, &delta, heights).map_err(violated)?)
}

fn load_db(path: &Path) -> Result<Database, Failure> {
    Ok(Database::new(datastore::load(path).map_err(invalid)?))
}

fn db(command: DbCommand) -> Outcome {
    match command {
        DbCommand::Build { out, jobs } => {
            let records = run_census(jobs)?;
            write_file(&out, &datastore::export(&records))
        }
        DbCommand::Find { db, input } => {
            let db = load_db(&db)?;
            let curve = input.load()?;
            let record = db.find(&curve.t).map_err(invalid)?;
            println!("id: {}", record.id);
            println!("{}", serde_json::to_string_pretty(record).expect("serializable"));
            Ok(())
        }
        DbCommand::Count { db, predicates } => {
            let db = load_db(&db)?;
            let preds: Vec<Predicate> =
                predicates.iter().map(|p| p.parse()).collect::<Result<_, _>>().map_err(invalid)?;
            println!("{}", db.count_all(&preds));
            Ok(())
        }
    }
}

fn verify(class_data: PathBuf, cells: Option<String>, motif: Option<String>, orientation: usize, jobs: Option<usize>) -> Outcome {
    let data = ExternalClassData::load(&class_data).map_err(invalid)?;
    let targets: Vec<Triangulation> = match &cells {
        Some(text) => vec![Triangulation::parse_cell_list(4, text).map_err(invalid)?],
        None => with_jobs(jobs, || {
            enumerate_all(4)
                .into_iter()
                .map(|c| c.triangulation)
                .filter(is_nongeneric_triangulation)
                .collect()
        }),
    };
    let mut failed = false;
    for t in &targets {
        println!("triangulation {t}");
        let out = match algorithm1_collect(t, &data) {
            Ok(out) => out,
            Err(e) => {
                println!("  skipped: {e}");
                failed |= cells.is_some();
                continue;
            }
        };
        if !out.anomalies.is_empty() {
            println!("  data error at {} sign vectors, first: {}", out.anomalies.len(), out.anomalies[0]);
            failed = true;
            continue;
        }
        println!("  shape (C) lifts for {} of 16384 sign classes", out.collected.len());
        let motifs = motifs_with_override(t, motif.as_deref(), orientation)?;
        for check in verify_theorem_a(t, &data, &motifs).map_err(invalid)? {
            let verdict = if check.agrees() { "agrees" } else { "differs" };
            println!(
                "  {}: formula predicts {}, {verdict} ({} mismatches)",
                check.motif,
                check.predicted,
                check.mismatches.len()
            );
        }
    }
    if failed {
        Err(invalid("class data failed the integrity check"))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate { degree, nongeneric, out, jobs } => enumerate(degree, nongeneric, out, jobs),
        Command::Analyze { input, signs, motif, orientation, svg } => analyze(input, signs, motif, orientation, svg),
        Command::Sweep { input } => sweep_command(input),
        Command::Census { jobs, out } => census_command(jobs, out),
        Command::Render { input, signs, out } => render(input, signs, out),
        Command::Db { command } => db(command),
        Command::VerifyTheoremA { class_data, cells, motif, orientation, jobs } => {
            verify(class_data, cells, motif, orientation, jobs)
        }
    };
    let _ = std::io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
