use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use toridiv::divisor::{
    cartier_status, global_sections, is_globally_generated, section_hilbert_function, CartierStatus,
    DivisorFile, GlobalGeneration, ToricDivisor,
};
use toridiv::exact_linear::{decimal_string, IntVec, Rational};
use toridiv::fan::Fan;
use toridiv::mld::{acc_family, acc_limits, accumulation, dfh_pullback, mld_search, Which};
use toridiv::polyhedra::hilbert_basis;
use toridiv::qnef::{check_gg_conjecture, enforce_vertex_claims, is_qnef, qcartierize, qnt, QnefVerdict};
use toridiv::{Error, Result};

mod table;

use table::Table;

#[derive(Parser)]
#[command(name = "toridiv", version, about = "Torus-invariant Weil divisors on toric varieties")]
struct Cli {
    /// Output format; `acc-family` defaults to csv, everything else to text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Plus,
    Minus,
}

#[derive(Subcommand)]
enum Command {
    /// Fan validity and the Cartier status of a divisor.
    Check { fan: PathBuf, divisor: PathBuf },
    /// Lattice points of P_D, or h⁰(mD) for m up to --m-max.
    Sections {
        fan: PathBuf,
        divisor: PathBuf,
        #[arg(long)]
        m_max: Option<u32>,
    },
    /// Hilbert bases of the maximal cones (or their duals).
    Hilbert {
        fan: PathBuf,
        #[arg(long)]
        dual: bool,
    },
    /// Global generation of O(D).
    Gg { fan: PathBuf, divisor: PathBuf },
    /// Quasi-nefness via the vertices of the local polyhedra.
    Qnef { fan: PathBuf, divisor: PathBuf },
    /// Small Q-Cartierizing refinement and its wall crossings.
    Qcartierize { fan: PathBuf, divisor: PathBuf },
    /// Quasi-nef threshold of D with respect to an ample divisor.
    Qnt {
        fan: PathBuf,
        divisor: PathBuf,
        #[arg(long)]
        ample: PathBuf,
    },
    /// Asymptotic pullback coefficients along query vectors.
    Pullback {
        fan: PathBuf,
        divisor: PathBuf,
        #[arg(long)]
        queries: PathBuf,
    },
    /// Box search for minimal discrepancies of K⁺ or K⁻.
    Mld {
        fan: PathBuf,
        #[arg(long)]
        bound: u32,
        #[arg(long, value_enum)]
        which: WhichArg,
        /// Comma-separated vector to flag in the report, e.g. `5,0,2`.
        #[arg(long)]
        distinguished: Option<String>,
    },
    /// LP and closed-form columns for the threefold family.
    AccFamily {
        /// `lo..hi` (inclusive), a single value, or a comma list.
        #[arg(long, default_value = "1..30")]
        a: String,
    },
    /// Global generation of m(D + A) for m = 1..=m-max.
    GgConjecture {
        fan: PathBuf,
        divisor: PathBuf,
        #[arg(long)]
        ample: PathBuf,
        #[arg(long, default_value_t = 6)]
        m_max: u32,
    },
}

/// One report in all three renderings; `csv` is absent where no table fits.
struct Report {
    text: String,
    json: Value,
    csv: Option<Table>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_fan(path: &Path) -> Result<Arc<Fan>> {
    let fan: Fan = read_json(path)?;
    fan.ensure_valid()?;
    Ok(Arc::new(fan))
}

fn load_divisor(fan: &Arc<Fan>, path: &Path) -> Result<ToricDivisor> {
    let file: DivisorFile = read_json(path)?;
    ToricDivisor::from_file(fan.clone(), file)
        .map_err(|e| Error::Dimension(format!("{}: {e}", path.display())))
}

fn parse_inputs(fan: &Path, divisors: &[&Path]) -> Result<(Arc<Fan>, Vec<ToricDivisor>)> {
    let f = load_fan(fan)?;
    let ds = divisors.iter().map(|p| load_divisor(&f, p)).collect::<Result<_>>()?;
    Ok((f, ds))
}

fn one_divisor(fan: &Path, divisor: &Path) -> Result<ToricDivisor> {
    let (_, mut ds) = parse_inputs(fan, &[divisor])?;
    Ok(ds.remove(0))
}

fn two_divisors(fan: &Path, d: &Path, a: &Path) -> Result<(ToricDivisor, ToricDivisor)> {
    let (_, ds) = parse_inputs(fan, &[d, a])?;
    let mut it = ds.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

fn vec_text<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn dec(q: &Rational) -> String {
    decimal_string(q, 20)
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn status_line(s: &CartierStatus) -> String {
    match s {
        CartierStatus::Cartier { .. } => "Cartier".to_string(),
        CartierStatus::QCartier { index, .. } => format!("QCartier (index {index})"),
        CartierStatus::NotQCartier { cone, .. } => format!("NotQCartier (witness cone {cone})"),
    }
}

fn check(fan: &Path, divisor: &Path) -> Result<Report> {
    let d = one_divisor(fan, divisor)?;
    let status = cartier_status(&d)?;
    let mut text = status_line(&status) + "\n";
    match &status {
        CartierStatus::Cartier { data } | CartierStatus::QCartier { data, .. } => {
            for (c, m) in data.iter().enumerate() {
                text += &format!("  cone {c}: {}\n", vec_text(m));
            }
        }
        CartierStatus::NotQCartier { certificate, .. } => {
            text += &format!("  certificate: {}\n", vec_text(certificate));
        }
    }
    Ok(Report {
        text,
        json: json!({ "complete": d.fan.is_complete(), "cartier": to_json(&status) }),
        csv: None,
    })
}

fn sections(fan: &Path, divisor: &Path, m_max: Option<u32>) -> Result<Report> {
    let d = one_divisor(fan, divisor)?;
    if let Some(m_max) = m_max {
        let counts = section_hilbert_function(&d, m_max)?;
        let mut t = Table::new(&["m", "h0"]);
        let mut text = String::new();
        for (m, c) in counts.iter().enumerate() {
            text += &format!("h0({m}D) = {c}\n");
            t.row(vec![m.to_string(), c.to_string()]);
        }
        return Ok(Report {
            text,
            json: json!({ "hilbert_function": counts }),
            csv: Some(t),
        });
    }
    let pts = global_sections(&d)?;
    let mut text = format!("h0 = {}\n", pts.len());
    let mut t = Table::new(&["m"]);
    for p in &pts {
        text += &format!("  {}\n", vec_text(p));
        t.row(vec![vec_text(p)]);
    }
    Ok(Report {
        text,
        json: json!({ "count": pts.len(), "points": pts }),
        csv: Some(t),
    })
}

fn hilbert(fan: &Path, dual: bool) -> Result<Report> {
    let f = load_fan(fan)?;
    let mut text = String::new();
    let mut t = Table::new(&["cone", "element"]);
    let mut out = Vec::new();
    for c in 0..f.cones.len() {
        let gens: Vec<IntVec> = if dual {
            if f.cones[c].dim != f.dim {
                return Err(Error::Precondition(format!(
                    "cone {c} is not full-dimensional, so its dual is not pointed"
                )));
            }
            f.cones[c].facets.clone()
        } else {
            f.cone_vectors(c)
        };
        let basis = hilbert_basis(&gens)?;
        text += &format!("cone {c}: {} elements\n", basis.len());
        for h in &basis {
            text += &format!("  {}\n", vec_text(h));
            t.row(vec![c.to_string(), vec_text(h)]);
        }
        out.push(json!({ "cone": c, "basis": basis }));
    }
    Ok(Report {
        text,
        json: json!({ "dual": dual, "cones": out }),
        csv: Some(t),
    })
}

fn gg_text(g: &GlobalGeneration) -> String {
    match g {
        GlobalGeneration::Yes => "Yes".to_string(),
        GlobalGeneration::No { cone, generator } => {
            format!("No (cone {cone}, generator {} outside P_D)", vec_text(generator))
        }
    }
}

fn gg(fan: &Path, divisor: &Path) -> Result<Report> {
    let d = one_divisor(fan, divisor)?;
    let g = is_globally_generated(&d)?;
    Ok(Report {
        text: gg_text(&g) + "\n",
        json: to_json(&g),
        csv: None,
    })
}

fn qnef(fan: &Path, divisor: &Path) -> Result<Report> {
    let d = one_divisor(fan, divisor)?;
    let v = is_qnef(&d)?;
    let text = match &v {
        QnefVerdict::Yes => "Yes".to_string(),
        QnefVerdict::No { cone, vertex } => {
            format!("No (cone {cone}, vertex {} outside P_D)", vec_text(vertex))
        }
    };
    Ok(Report {
        text: text + "\n",
        json: to_json(&v),
        csv: None,
    })
}

fn qcartierize_cmd(fan: &Path, divisor: &Path) -> Result<Report> {
    let d = one_divisor(fan, divisor)?;
    let qc = qcartierize(&d)?;
    // Globally generated divisors carry extra structural claims; a violation
    // is an internal inconsistency (exit 3).
    let claims = if is_globally_generated(&d)?.is_yes() {
        Some(enforce_vertex_claims(&d)?)
    } else {
        None
    };
    let fp = &qc.fan_prime;
    let mut text = format!(
        "fan_prime: {} rays, {} maximal cones, small: {}\n",
        fp.rays.len(),
        fp.cones.len(),
        qc.small
    );
    text += &format!("dbar: {}\n", status_line(&qc.dbar_status));
    text += &format!("relatively ample: {}\n", qc.relatively_ample);
    text += &format!("maximal cones: {:?}\n", fp.max_cones());
    let mut t = Table::new(&["cone_a", "cone_b", "wall_rays", "value", "value_decimal", "extracted"]);
    text += "walls:\n";
    for w in &qc.walls {
        text += &format!(
            "  {:?} on rays {:?}: {}{}\n",
            w.cones,
            w.wall_rays,
            w.value,
            if w.extracted { " (extracted)" } else { "" }
        );
        t.row(vec![
            w.cones.0.to_string(),
            w.cones.1.to_string(),
            format!("{:?}", w.wall_rays),
            w.value.to_string(),
            dec(&w.value),
            w.extracted.to_string(),
        ]);
    }
    if claims.is_some() {
        text += "vertex claims: hold\n";
    }
    Ok(Report {
        text,
        json: json!({
            "fan_prime": to_json(&**fp),
            "dbar": to_json(&qc.dbar.to_file()),
            "dbar_status": to_json(&qc.dbar_status),
            "small": qc.small,
            "relatively_ample": qc.relatively_ample,
            "polytope_route": to_json(&qc.polytope_route),
            "walls": to_json(&qc.walls),
            "vertex_claims": claims.as_ref().map(to_json),
        }),
        csv: Some(t),
    })
}

fn qnt_cmd(fan: &Path, divisor: &Path, ample: &Path) -> Result<Report> {
    let (d, a) = two_divisors(fan, divisor, ample)?;
    let r = qnt(&d, &a)?;
    let mut text = format!("qnt = {}\n", r.value);
    let mut t = Table::new(&["cone", "ray", "vertex", "t", "t_decimal"]);
    for b in &r.breakpoints {
        text += &format!("  cone {} ray {} vertex {}: {}\n", b.cone, b.ray, vec_text(&b.vertex), b.t);
        t.row(vec![b.cone.to_string(), b.ray.to_string(), vec_text(&b.vertex), b.t.to_string(), dec(&b.t)]);
    }
    Ok(Report {
        text,
        json: to_json(&r),
        csv: Some(t),
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QueryFile {
    Wrapped { queries: Vec<IntVec> },
    Bare(Vec<IntVec>),
}

fn pullback(fan: &Path, divisor: &Path, queries: &Path) -> Result<Report> {
    let d = one_divisor(fan, divisor)?;
    let qs = match read_json::<QueryFile>(queries)? {
        QueryFile::Wrapped { queries } | QueryFile::Bare(queries) => queries,
    };
    let r = dfh_pullback(&d, &qs)?;
    let mut text = String::new();
    let mut t = Table::new(&["u", "coefficient", "coefficient_decimal", "cone"]);
    for e in &r.entries {
        text += &format!("{} -> {} (cone {})\n", vec_text(&e.query), e.coefficient, e.cone);
        t.row(vec![vec_text(&e.query), e.coefficient.to_string(), dec(&e.coefficient), e.cone.to_string()]);
    }
    Ok(Report {
        text,
        json: to_json(&r),
        csv: Some(t),
    })
}

fn parse_vector(s: &str) -> Result<IntVec> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad vector entry {x:?} in {s:?}")))
        })
        .collect()
}

fn mld(fan: &Path, bound: u32, which: WhichArg, distinguished: Option<&str>) -> Result<Report> {
    let f = load_fan(fan)?;
    let which = match which {
        WhichArg::Plus => Which::Plus,
        WhichArg::Minus => Which::Minus,
    };
    let dist = distinguished.map(parse_vector).transpose()?;
    let r = mld_search(&f, bound, which, dist.as_deref())?;
    let mut text = format!("box bound {bound}, {} primitive vectors\n", r.entries.len());
    for (name, m) in [("exceptional", &r.exceptional_minimum), ("overall", &r.overall_minimum)] {
        match m {
            Some(m) => text += &format!("{name} minimum: {} at {}\n", m.value, vec_text(&m.argmin)),
            None => text += &format!("{name} minimum: none in box\n"),
        }
    }
    if let (Some(u), Some(hit)) = (&r.distinguished, r.distinguished_is_argmin) {
        match r.entries.iter().find(|e| &e.u == u) {
            Some(e) => {
                text += &format!(
                    "distinguished {} has value {}; attains the exceptional minimum: {hit}\n",
                    vec_text(u),
                    e.value
                )
            }
            None => text += &format!("distinguished {} lies outside the search box\n", vec_text(u)),
        }
    }
    let mut t = Table::new(&["u", "value", "value_decimal", "exceptional"]);
    for e in &r.entries {
        t.row(vec![vec_text(&e.u), e.value.to_string(), dec(&e.value), e.exceptional.to_string()]);
    }
    Ok(Report {
        text,
        json: to_json(&r),
        csv: Some(t),
    })
}

fn parse_a_values(s: &str) -> Result<Vec<i64>> {
    let bad = || Error::Usage(format!("cannot read {s:?} as a range lo..hi or a list"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn acc_family_cmd(a: &str) -> Result<Report> {
    let values = parse_a_values(a)?;
    let rows = acc_family(&values)?;
    let limits = acc_limits()?;
    let mut t = Table::new(&[
        "a",
        "boundary_lp",
        "boundary_lp_decimal",
        "boundary_lp_pairing",
        "boundary_lp_pairing_decimal",
        "defn_lp",
        "defn_lp_decimal",
        "closed_form",
        "closed_form_decimal",
        "agree_flags",
    ]);
    let mut text = format!(
        "{:>4}  {:>12}  {:>12}  {:>8}  {:>12}  agree\n",
        "a", "boundary", "pairing", "defn", "closed"
    );
    for r in &rows {
        let agree = r.agreeing_columns();
        let flags = if agree.is_empty() { "none".to_string() } else { agree.join(";") };
        text += &format!(
            "{:>4}  {:>12}  {:>12}  {:>8}  {:>12}  {flags}\n",
            r.a,
            r.boundary_literal.to_string(),
            r.boundary_pairing.to_string(),
            r.defn_lp.to_string(),
            r.closed_form.to_string()
        );
        t.row(vec![
            r.a.to_string(),
            r.boundary_literal.to_string(),
            dec(&r.boundary_literal),
            r.boundary_pairing.to_string(),
            dec(&r.boundary_pairing),
            r.defn_lp.to_string(),
            dec(&r.defn_lp),
            r.closed_form.to_string(),
            dec(&r.closed_form),
            flags,
        ]);
    }
    let column = |f: fn(&toridiv::mld::AccFamilyRow) -> &Rational| -> Vec<Rational> {
        rows.iter().map(|r| f(r).clone()).collect()
    };
    let acc = json!({
        "boundary_lp": to_json(&accumulation(&column(|r| &r.boundary_literal), &limits.boundary_literal)),
        "boundary_lp_pairing": to_json(&accumulation(&column(|r| &r.boundary_pairing), &limits.boundary_pairing)),
        "defn_lp": to_json(&accumulation(&column(|r| &r.defn_lp), &limits.defn_lp)),
        "closed_form": to_json(&accumulation(&column(|r| &r.closed_form), &toridiv::exact_linear::int(4))),
    });
    text += &format!(
        "limits: boundary {}, pairing {}, defn {}, closed form 4\n",
        limits.boundary_literal, limits.boundary_pairing, limits.defn_lp
    );
    Ok(Report {
        text,
        json: json!({ "rows": to_json(&rows), "limits": to_json(&limits), "accumulation": acc }),
        csv: Some(t),
    })
}

fn gg_conjecture(fan: &Path, divisor: &Path, ample: &Path, m_max: u32) -> Result<Report> {
    let (d, a) = two_divisors(fan, divisor, ample)?;
    let rows = check_gg_conjecture(&d, &a, m_max)?;
    let mut text = String::new();
    let mut t = Table::new(&["m", "globally_generated"]);
    let mut out = Vec::new();
    for (m, g) in &rows {
        text += &format!("m = {m}: {}\n", gg_text(g));
        t.row(vec![m.to_string(), g.is_yes().to_string()]);
        out.push(json!({ "m": m, "gg": to_json(g) }));
    }
    Ok(Report {
        text,
        json: Value::Array(out),
        csv: Some(t),
    })
}

fn run(cli: &Cli) -> Result<String> {
    let report = match &cli.command {
        Command::Check { fan, divisor } => check(fan, divisor),
        Command::Sections { fan, divisor, m_max } => sections(fan, divisor, *m_max),
        Command::Hilbert { fan, dual } => hilbert(fan, *dual),
        Command::Gg { fan, divisor } => gg(fan, divisor),
        Command::Qnef { fan, divisor } => qnef(fan, divisor),
        Command::Qcartierize { fan, divisor } => qcartierize_cmd(fan, divisor),
        Command::Qnt { fan, divisor, ample } => qnt_cmd(fan, divisor, ample),
        Command::Pullback { fan, divisor, queries } => pullback(fan, divisor, queries),
        Command::Mld { fan, bound, which, distinguished } => {
            mld(fan, *bound, *which, distinguished.as_deref())
        }
        Command::AccFamily { a } => acc_family_cmd(a),
        Command::GgConjecture { fan, divisor, ample, m_max } => gg_conjecture(fan, divisor, ample, *m_max),
    }?;
    let default = match cli.command {
        Command::AccFamily { .. } => Format::Csv,
        _ => Format::Text,
    };
    match cli.format.unwrap_or(default) {
        Format::Text => Ok(report.text),
        Format::Json => Ok(serde_json::to_string_pretty(&report.json).expect("json values print") + "\n"),
        Format::Csv => report
            .csv
            .map(|t| t.render())
            .ok_or_else(|| Error::Usage("this command has no csv output".into())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| match &cli.out {
        Some(p) => std::fs::write(p, out)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{out}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("toridiv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
