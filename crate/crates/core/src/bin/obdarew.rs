use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use obdarew::datalog::{program_for, CQne, FactSet, Program, TranslateOptions};
use obdarew::dl::{Signature, TBox};
use obdarew::expansion::{
    canonical, BoundednessOracle, DefaultOracle, Expander, UnknownOracle, DEFAULT_CAP, DEFAULT_K,
};
use obdarew::io::{self, RunManifest};
use obdarew::mapping::Mapping;
use obdarew::rewriter::{
    approximate_gsa, approximate_lsa, compose_lowlevel, normalize_for_rewriting, rew_obda,
    ObdaSpec, RewriteOptions,
};
use obdarew::verify::{atomic_queries, certain_answers_spec, check_inseparable, DEFAULT_DEPTH};
use obdarew::{Error, Name, Result};

#[derive(Parser)]
#[command(
    name = "obdarew",
    version,
    about = "Rewrite OBDA specifications into DL-Lite_R"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lsa,
    Gsa,
}

#[derive(clap::Args)]
struct SpecArgs {
    #[arg(long)]
    tbox: PathBuf,
    #[arg(long)]
    mapping: PathBuf,
    #[arg(long)]
    schema: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rewrite a specification into a DL-Lite_R TBox and an extended mapping.
    Rewrite {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        lowlevel: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        max_lhs: usize,
        /// Chase depth for entailment checks (chosen from the TBox when absent).
        #[arg(long)]
        depth: Option<usize>,
        /// `default`, `unknown` or `file:PATH`.
        #[arg(long, default_value = "default")]
        oracle: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Approximate a TBox in DL-Lite_R without touching the mapping.
    Approx {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        tbox: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the cut expansions of one predicate.
    Expand {
        /// A Datalog program; alternatively give --tbox, --mapping and --schema.
        #[arg(long, conflicts_with_all = ["tbox", "mapping", "schema"])]
        program: Option<PathBuf>,
        #[arg(long)]
        tbox: Option<PathBuf>,
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        predicate: String,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        max_lhs: usize,
        #[arg(long, default_value = "default")]
        oracle: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Certain answers of the queries in a file over a specification.
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the certain answers of two specifications on sample instances.
    CheckInsep {
        #[arg(long)]
        tbox1: PathBuf,
        #[arg(long)]
        mapping1: PathBuf,
        /// A TBox or a DL-Lite_R TBox as written by `rewrite`.
        #[arg(long)]
        tbox2: PathBuf,
        #[arg(long)]
        mapping2: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long, required = true)]
        facts: Vec<PathBuf>,
        /// Extra queries; atomic queries over the first TBox are always asked.
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Inputs {
    manifest: RunManifest,
}

impl Inputs {
    fn new(cmd: &str) -> Self {
        Inputs {
            manifest: RunManifest::new(cmd),
        }
    }

    fn read(&mut self, role: &str, p: &Path) -> Result<String> {
        let s = fs::read_to_string(p)
            .map_err(|e| Error::validation(format!("cannot read {}: {e}", p.display())))?;
        self.manifest.add_input(role, s.as_bytes());
        Ok(s)
    }

    fn spec(&mut self, a: &SpecArgs) -> Result<ObdaSpec> {
        let tbox = parse_any_tbox(&self.read("tbox", &a.tbox)?)?;
        let mapping = io::parse_generated_mapping(&self.read("mapping", &a.mapping)?)?;
        let schema = io::parse_schema(&self.read("schema", &a.schema)?)?;
        let spec = ObdaSpec::new(tbox, mapping, schema);
        spec.validate()?;
        Ok(spec)
    }

    fn oracle(&mut self, s: &str) -> Result<Box<dyn BoundednessOracle>> {
        Ok(match s {
            "default" => Box::new(DefaultOracle),
            "unknown" => Box::new(UnknownOracle),
            _ => match s.strip_prefix("file:") {
                Some(p) => {
                    let text = self.read("oracle", Path::new(p))?;
                    Box::new(io::parse_oracle(p, &text)?) as Box<dyn BoundednessOracle>
                }
                None => return Err(Error::validation(format!("unknown oracle `{s}`"))),
            },
        })
    }
}

fn write(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)
        .map_err(|e| Error::validation(format!("cannot write {}: {e}", path.display())))
}

fn out_dir(p: &Path) -> Result<()> {
    fs::create_dir_all(p)
        .map_err(|e| Error::validation(format!("cannot create {}: {e}", p.display())))
}

/// A rewritten TBox file is DL-Lite; anything else is read as a TBox.
fn parse_any_tbox(text: &str) -> Result<TBox> {
    match io::parse_dllite(text) {
        Ok(t) => Ok(t.to_tbox()),
        Err(_) => io::parse_tbox_with(text, io::NameRule::ANY),
    }
}

fn format_answers(q: &CQne, tuples: impl IntoIterator<Item = Vec<Name>>, complete: bool) -> String {
    let mut s = format!("{}\t# complete: {complete}\n", io::write_query(q));
    for t in tuples {
        let row: Vec<&str> = t.iter().map(Name::as_str).collect();
        s.push_str(&format!("  ({})\n", row.join(", ")));
    }
    s
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Rewrite {
            spec,
            lowlevel,
            k,
            max_lhs,
            depth,
            oracle,
            cap,
            out,
        } => {
            let mut inp = Inputs::new("rewrite");
            let mut s = inp.spec(&spec)?;
            if let Some(p) = &lowlevel {
                s.lowlevel = Some(io::parse_lowlevel(&inp.read("lowlevel", p)?)?);
            }
            let omega = inp.oracle(&oracle)?;
            let opts = RewriteOptions {
                k,
                max_lhs,
                depth,
                cap,
            };
            let r = rew_obda(&s, &opts, omega.as_ref())?;
            out_dir(&out)?;
            write(&out.join("tbox.dllite"), &io::write_dllite(&r.tbox_r))?;
            write(&out.join("mapping.hl"), &io::write_mapping(&r.mapping_c))?;
            if let Some(defs) = &s.lowlevel {
                let composed = compose_lowlevel(&r.mapping_c, defs)?;
                let text: Vec<String> = composed.iter().map(|c| c.to_string()).collect();
                write(&out.join("mapping.sql.txt"), &text.join("\n"))?;
            }
            let mut m = inp.manifest;
            m.k = Some(r.k);
            m.max_lhs = Some(r.max_lhs);
            m.depth = depth;
            m.oracle = Some(omega.describe());
            m.exhaustive = Some(r.exhaustive);
            m.verdicts = r
                .verdicts
                .iter()
                .map(|(n, v)| (n.to_string(), v.to_string()))
                .collect();
            m.label = Some(r.label.to_string());
            m.warnings = r.warnings.clone();
            write(&out.join("manifest.json"), &m.to_json())?;
            println!(
                "{}: {} axioms, {} assertions",
                r.label,
                r.tbox_r.len(),
                r.mapping_c.len()
            );
        }
        Cmd::Approx { mode, tbox, out } => {
            let mut inp = Inputs::new("approx");
            let t = io::parse_tbox(&inp.read("tbox", &tbox)?)?;
            let (tr, report) = match mode {
                Mode::Lsa => approximate_lsa(&t),
                Mode::Gsa => approximate_gsa(&t),
            };
            write(&out, &io::write_dllite(&tr))?;
            let mut m = inp.manifest;
            m.oracle = None;
            m.label = Some(match mode {
                Mode::Lsa => "lsa".into(),
                Mode::Gsa => "gsa".into(),
            });
            m.warnings = report.warnings;
            let mpath = PathBuf::from(format!("{}.manifest.json", out.display()));
            write(&mpath, &m.to_json())?;
        }
        Cmd::Expand {
            program,
            tbox,
            mapping,
            schema,
            predicate,
            k,
            max_lhs,
            oracle,
            cap,
            out,
        } => {
            let mut inp = Inputs::new("expand");
            let p: Program = match program {
                Some(p) => io::parse_program(&inp.read("program", &p)?)?,
                None => {
                    let (Some(tbox), Some(mapping), Some(schema)) = (tbox, mapping, schema) else {
                        return Err(Error::validation(
                            "give --program or all of --tbox, --mapping, --schema",
                        ));
                    };
                    let s = inp.spec(&SpecArgs {
                        tbox,
                        mapping,
                        schema,
                    })?;
                    let (t3, _) = normalize_for_rewriting(&s.tbox, max_lhs, None);
                    let topts = TranslateOptions {
                        closure_lhs: max_lhs,
                        depth: None,
                    };
                    program_for(&t3, &s.mapping, &topts)?
                }
            };
            let omega = inp.oracle(&oracle)?;
            let n = Name::from(predicate.as_str());
            let mut ex = Expander::with_cap(&p, cap);
            let verdict = ex.oracle_answer(&n, omega.as_ref())?.verdict();
            let mut lines: Vec<String> = ex
                .cut(&n, k, omega.as_ref())?
                .iter()
                .map(|q| io::write_query(&canonical(q)))
                .collect();
            lines.sort();
            out_dir(&out)?;
            write(&out.join("expansions.txt"), &(lines.join("\n") + "\n"))?;
            let mut m = inp.manifest;
            m.k = Some(k);
            m.oracle = Some(omega.describe());
            m.verdicts.insert(predicate, verdict.to_string());
            write(&out.join("manifest.json"), &m.to_json())?;
        }
        Cmd::Eval {
            spec,
            facts,
            queries,
            depth,
            out,
        } => {
            let mut inp = Inputs::new("eval");
            let s = inp.spec(&spec)?;
            let d: FactSet = io::parse_facts(&inp.read("facts", &facts)?)?;
            let qs = io::parse_queries(&inp.read("queries", &queries)?)?;
            let mut text = String::new();
            let mut warnings = Vec::new();
            for q in &qs {
                let a = certain_answers_spec(&s, &d, q, depth)?;
                if !a.complete {
                    warnings.push(format!(
                        "answers to `{}` may be incomplete at depth {depth}",
                        io::write_query(q)
                    ));
                }
                text.push_str(&format_answers(q, a.tuples, a.complete));
            }
            out_dir(&out)?;
            write(&out.join("answers.txt"), &text)?;
            let mut m = inp.manifest;
            m.depth = Some(depth);
            m.warnings = warnings;
            write(&out.join("manifest.json"), &m.to_json())?;
        }
        Cmd::CheckInsep {
            tbox1,
            mapping1,
            tbox2,
            mapping2,
            schema,
            facts,
            queries,
            depth,
            out,
        } => {
            let mut inp = Inputs::new("check-insep");
            let schema: Signature = io::parse_schema(&inp.read("schema", &schema)?)?;
            let t1 = io::parse_tbox(&inp.read("tbox1", &tbox1)?)?;
            let m1: Mapping = io::parse_mapping(&inp.read("mapping1", &mapping1)?)?;
            let t2 = parse_any_tbox(&inp.read("tbox2", &tbox2)?)?;
            let m2 = io::parse_generated_mapping(&inp.read("mapping2", &mapping2)?)?;
            let s1 = ObdaSpec::new(t1, m1, schema.clone());
            let s2 = ObdaSpec::new(t2, m2, schema);
            s1.validate()?;
            s2.validate()?;
            let sigma = Signature {
                concepts: s1
                    .tbox
                    .sig
                    .concepts
                    .iter()
                    .filter(|n| !n.is_reserved())
                    .cloned()
                    .collect(),
                roles: s1
                    .tbox
                    .sig
                    .roles
                    .iter()
                    .filter(|n| !n.is_reserved())
                    .cloned()
                    .collect(),
                views: BTreeMap::new(),
            };
            let mut qs = atomic_queries(&sigma);
            if let Some(p) = &queries {
                qs.extend(io::parse_queries(&inp.read("queries", p)?)?);
            }
            let mut ds = Vec::new();
            for (i, f) in facts.iter().enumerate() {
                ds.push(io::parse_facts(&inp.read(&format!("facts{i}"), f)?)?);
            }
            let report = check_inseparable(&s1, &s2, &sigma, &ds, &qs, depth)?;
            out_dir(&out)?;
            write(&out.join("report.txt"), &report.to_string())?;
            let json = serde_json::json!({
                "verdict": report.verdict().to_string(),
                "comparisons": report.comparisons.iter().map(|c| serde_json::json!({
                    "instance": c.instance,
                    "query": c.query,
                    "relation": c.relation().to_string(),
                    "first": c.first,
                    "second": c.second,
                    "first_complete": c.first_complete,
                    "second_complete": c.second_complete,
                })).collect::<Vec<_>>(),
                "instances": report.instances,
            });
            write(
                &out.join("report.json"),
                &(serde_json::to_string_pretty(&json).expect("json") + "\n"),
            )?;
            let mut m = inp.manifest;
            m.depth = Some(depth);
            m.label = Some(report.verdict().to_string());
            if report.incomplete_pairs() > 0 {
                m.warnings.push(format!(
                    "{} comparisons were cut by the chase depth",
                    report.incomplete_pairs()
                ));
            }
            write(&out.join("manifest.json"), &m.to_json())?;
            print!("{report}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::CapExceeded { .. } => 3,
                Error::Invariant(_) => 4,
                _ => 2,
            })
        }
    }
}
