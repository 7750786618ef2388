//! `sattile`: command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 for a mathematical failure or
//! a FAIL verdict, 2 for unreadable or invalid input.

mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sattile::addressmap::{expansion_on_j, stabilized_address_map, verify_m_properties, DEFAULT_K_MAX};
use sattile::boundary::{abelianize, boundary_curve, compatibility_failures};
use sattile::expansion::{
    build_companion_witness, check_growth_condition, check_theorem_condition, classify_perron, eigen_data,
};
use sattile::files::{parse_boundary, parse_expansion, parse_rule};
use sattile::numbers::{rational_to_string, MAX_PRECISION_BITS};
use sattile::substitution::{
    control_points, expand_patch, is_primitive, patch_polygons, perron_frobenius, subdivision_matrix,
    volume_consistency, Patch, SubstitutionRule,
};
use sattile::svg::{self, Path as SvgPath};
use sattile::Error;

use report::{elem, enclosure, fmt_f64s, fmt_spectrum, fmt_vector, vector};

#[derive(Parser)]
#[command(name = "sattile", version, about = "Exact checks for self-affine tilings and their expansion maps")]
struct Cli {
    /// Bits of the certified enclosures printed in reports.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing on success or failure; only the exit code and errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an expansion map can expand a self-affine tiling.
    CheckExpansion { file: PathBuf },
    /// Build the integer companion witness and compare invariant growths.
    Witness { file: PathBuf },
    /// Work with a substitution rule.
    Tiling {
        #[command(subcommand)]
        command: TilingCommand,
    },
    /// Trace a boundary curve of a free-group endomorphism.
    Boundary {
        file: PathBuf,
        /// Word to iterate, e.g. "acAC" or "[a,c]". Defaults to every word in the file.
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 6)]
        iters: u32,
        /// Write the curves to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TilingCommand {
    /// Subdivision matrix, primitivity, volume consistency and the verdict on the expansion.
    Check(RuleArgs),
    /// Expand a seed tile.
    Expand(RuleArgs),
    /// Exact and numeric control points of each tile type.
    Controlpoints(RuleArgs),
    /// Generators of the control-point module and the integer matrix of the expansion on it.
    Addressmap(RuleArgs),
}

#[derive(Args)]
struct RuleArgs {
    file: PathBuf,
    /// Expansion depth (expand) or largest level tried (addressmap).
    #[arg(long)]
    levels: Option<u32>,
    /// Seed tile name for expand (default: the first tile).
    #[arg(long)]
    seed: Option<String>,
    /// Write the expanded patch to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
}

/// Result of a command: the report and whether every check passed.
struct Outcome {
    pass: bool,
    text: String,
    json: Value,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) | Error::Shape(_) | Error::Precondition(_) => 2,
        Error::Domain(_) | Error::Precision(_) | Error::NotStabilized(_) | Error::NotInvariant(_) | Error::Internal(_) => 1,
    }
}

fn read(path: &Path) -> sattile::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> sattile::Result<()> {
    fs::write(path, contents).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = if cli.precision < 8 || cli.precision > MAX_PRECISION_BITS {
        Err(Error::Input(format!("--precision must be between 8 and {MAX_PRECISION_BITS}")))
    } else {
        run(&cli)
    };
    match result {
        Ok(out) => {
            if !cli.quiet {
                let body = if cli.json {
                    serde_json::to_string_pretty(&out.json).expect("JSON values always serialize") + "\n"
                } else {
                    out.text
                };
                // a closed pipe is not an error worth reporting
                let _ = std::io::stdout().write_all(body.as_bytes());
            }
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> sattile::Result<Outcome> {
    match &cli.command {
        Command::CheckExpansion { file } => check_expansion(file, cli.precision),
        Command::Witness { file } => witness(file, cli.precision),
        Command::Tiling { command } => match command {
            TilingCommand::Check(a) => tiling_check(a),
            TilingCommand::Expand(a) => tiling_expand(a),
            TilingCommand::Controlpoints(a) => tiling_controlpoints(a),
            TilingCommand::Addressmap(a) => tiling_addressmap(a),
        },
        Command::Boundary { file, word, iters, svg } => boundary(file, word.as_deref(), *iters, svg.as_deref(), cli.json),
    }
}

fn check_expansion(file: &Path, bits: u32) -> sattile::Result<Outcome> {
    let map = parse_expansion(&read(file)?)?;
    let spec = eigen_data(&map)?;
    let v = check_theorem_condition(&spec)?;
    let mut text = String::new();
    let mut eigen = Vec::new();
    for r in &v.reports {
        text += &format!(
            "eigenvalue {} (multiplicity {}): {}\n",
            r.eigenvalue,
            r.multiplicity,
            if r.algebraic_integer { "algebraic integer" } else { "not an algebraic integer" }
        );
        for c in &r.conjugates {
            let rel = match c.modulus {
                std::cmp::Ordering::Less => "smaller modulus",
                std::cmp::Ordering::Equal => "equal modulus",
                std::cmp::Ordering::Greater => "larger modulus",
            };
            text += &format!(
                "  conjugate {}: {rel}, multiplicity {} in spectrum: {}\n",
                c.conjugate,
                c.multiplicity,
                if c.ok { "ok" } else { "violates" }
            );
        }
        eigen.push(json!({
            "eigenvalue": r.eigenvalue,
            "enclosure": enclosure(&r.eigenvalue, bits)?,
            "perron_class": classify_perron(&r.eigenvalue).ok(),
        }));
    }
    for f in &v.failures {
        text += &format!("failure: {f}\n");
    }
    text += &format!("verdict: {}\n", verdict_word(v.pass));
    Ok(Outcome {
        pass: v.pass,
        text,
        json: json!({ "verdict": verdict_word(v.pass), "spectrum": spec, "report": v, "eigenvalues": eigen }),
    })
}

fn witness(file: &Path, bits: u32) -> sattile::Result<Outcome> {
    let spec = eigen_data(&parse_expansion(&read(file)?)?)?;
    let m = build_companion_witness(&spec)?;
    let w = check_growth_condition(&m, &spec)?;
    let mut text = format!("witness matrix M ({}x{}):\n{m}\n", m.nrows(), m.ncols());
    text += &format!("target {} with growth {:.10}\n", fmt_spectrum(&w.target), w.growth);
    for c in &w.competitors {
        let rel = match c.versus_target {
            std::cmp::Ordering::Less => "smaller",
            std::cmp::Ordering::Equal => "equal",
            std::cmp::Ordering::Greater => "larger",
        };
        text += &format!("  competitor {} growth {:.10} ({rel})\n", fmt_spectrum(&c.multiset), c.growth);
    }
    for t in &w.ties {
        text += &format!("tie: {}\n", fmt_spectrum(t));
    }
    text += &format!("strict maximum: {}\n", w.strict_max);
    let enc = spec.items().iter().map(|(a, _)| enclosure(a, bits)).collect::<sattile::Result<Vec<_>>>()?;
    Ok(Outcome { pass: w.strict_max, text, json: json!({ "report": w, "target_enclosures": enc }) })
}

fn load_rule(a: &RuleArgs) -> sattile::Result<SubstitutionRule> {
    parse_rule(&read(&a.file)?)
}

fn tiling_check(a: &RuleArgs) -> sattile::Result<Outcome> {
    let rule = load_rule(a)?;
    let m = subdivision_matrix(&rule);
    let primitive = is_primitive(&m);
    let mut text = format!("subdivision matrix:\n{m}\nprimitive: {primitive}\n");
    let (pf, volume) = if primitive {
        let pf = perron_frobenius(&m)?;
        let vol = volume_consistency(&rule)?;
        text += &format!(
            "Perron-Frobenius eigenvalue {:.12}, |det| {:.12}, difference {:.3e}: {}\n",
            vol.pf_eigenvalue,
            vol.abs_det,
            vol.difference,
            if vol.consistent { "consistent" } else { "inconsistent" }
        );
        (Some(pf), Some(vol))
    } else {
        (None, None)
    };
    let v = check_theorem_condition(&rule.spectrum()?)?;
    text += &format!("expansion verdict: {}\n", verdict_word(v.pass));
    for f in &v.failures {
        text += &format!("failure: {f}\n");
    }
    let pass = primitive && volume.as_ref().is_some_and(|x| x.consistent) && v.pass;
    text += &format!("overall: {}\n", verdict_word(pass));
    Ok(Outcome {
        pass,
        text,
        json: json!({
            "subdivision_matrix": m,
            "primitive": primitive,
            "perron_frobenius": pf,
            "volume": volume,
            "expansion": v,
            "pass": pass,
        }),
    })
}

fn seed_index(rule: &SubstitutionRule, seed: Option<&str>) -> sattile::Result<usize> {
    match seed {
        None => Ok(0),
        Some(s) => rule.tile_index(s).ok_or_else(|| Error::Input(format!("--seed: unknown tile {s:?}"))),
    }
}

const PALETTE: [&str; 8] = ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5"];

fn tiling_expand(a: &RuleArgs) -> sattile::Result<Outcome> {
    let rule = load_rule(a)?;
    let s = seed_index(&rule, a.seed.as_deref())?;
    let levels = a.levels.unwrap_or(1);
    let patch = expand_patch(&rule, &Patch::seed(&rule, s), levels)?;
    let counts = patch.counts(rule.tiles().len());
    let mut text = format!("seed {} expanded {levels} times: {} tiles\n", rule.tiles()[s].name, patch.tiles.len());
    for (t, c) in rule.tiles().iter().zip(&counts) {
        text += &format!("  {}: {c}\n", t.name);
    }
    let mut tiles = Vec::new();
    for (t, v) in &patch.tiles {
        tiles.push(json!({
            "type": rule.tiles()[*t].name,
            "translation_exact": vector(v),
            "translation_numeric": rule.embed_vector(v)?,
            "level": patch.level,
        }));
    }
    if let Some(out) = &a.svg {
        let paths: Vec<SvgPath> = patch_polygons(&rule, &patch)?
            .into_iter()
            .map(|(t, pts)| SvgPath { points: pts, closed: true, fill: Some(PALETTE[t % PALETTE.len()].into()) })
            .collect();
        write(out, &svg::render(&paths))?;
        text += &format!("wrote {}\n", out.display());
    }
    let names: serde_json::Map<String, Value> =
        rule.tiles().iter().zip(&counts).map(|(t, c)| (t.name.clone(), json!(c))).collect();
    Ok(Outcome {
        pass: true,
        text,
        json: json!({ "seed": rule.tiles()[s].name, "level": patch.level, "counts": names, "tiles": tiles }),
    })
}

fn tiling_controlpoints(a: &RuleArgs) -> sattile::Result<Outcome> {
    let rule = load_rule(a)?;
    let cps = control_points(&rule)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for (t, c) in rule.tiles().iter().zip(&cps) {
        let num = rule.embed_vector(c)?;
        text += &format!("{}: {} ~ {}\n", t.name, fmt_vector(c), fmt_f64s(&num));
        rows.push(json!({ "type": t.name, "exact": vector(c), "numeric": num }));
    }
    Ok(Outcome { pass: true, text, json: json!({ "control_points": rows }) })
}

fn tiling_addressmap(a: &RuleArgs) -> sattile::Result<Outcome> {
    let rule = load_rule(a)?;
    let map = stabilized_address_map(&rule, a.levels.unwrap_or(DEFAULT_K_MAX))?;
    let e = expansion_on_j(&map, rule.expansion())?;
    let rep = verify_m_properties(&rule, &map, &e, &rule.spectrum()?)?;
    let gens = map.basis.generators();
    let mut text = format!("module stabilized at level {} with rank {}\n", map.level, gens.len());
    for (i, g) in gens.iter().enumerate() {
        text += &format!("  v{} = {}\n", i + 1, fmt_vector(g));
    }
    text += &format!("M =\n{}\n", e.m);
    text += &format!("phi V = V M: {}\n", e.phi_v_equals_v_m);
    text += &format!("a(phi x) = M a(x) on {} points: {}\n", e.checked_points, e.address_equivariant);
    text += &format!("characteristic polynomial of M: {}\n", rep.char_poly);
    text += &format!("minimal polynomials of phi divide it: {}\n", rep.divisibility);
    text += &format!("M diagonalizable: {}\n", rep.diagonalizable);
    for l in &rep.lipschitz {
        text += &format!("Lipschitz ratio at level {} over {} points: {:.6}\n", l.level, l.points, l.max_ratio);
    }
    let pass = e.phi_v_equals_v_m && e.address_equivariant && rep.divisibility && rep.diagonalizable;
    text += &format!("overall: {}\n", verdict_word(pass));
    let normal_form: Vec<Vec<String>> =
        map.basis.normal_form().iter().map(|r| r.iter().map(rational_to_string).collect()).collect();
    Ok(Outcome {
        pass,
        text,
        json: json!({
            "level": map.level,
            "generators": gens.iter().map(|g| vector(g)).collect::<Vec<_>>(),
            "normal_form": normal_form,
            "expansion_on_module": e,
            "m_properties": rep,
            "pass": pass,
        }),
    })
}

fn boundary(file: &Path, word: Option<&str>, iters: u32, svg_out: Option<&Path>, with_points: bool) -> sattile::Result<Outcome> {
    let b = parse_boundary(&read(file)?)?;
    let bad = compatibility_failures(&b.assignment, &b.endomorphism);
    if !bad.is_empty() {
        let names: Vec<String> = bad.iter().map(|&i| b.alphabet.names()[i].to_string()).collect();
        return Err(Error::Domain(format!(
            "the endomorphism is not compatible with the expansion at letters {}",
            names.join(", ")
        )));
    }
    let words = match word {
        Some(w) => vec![(w.to_string(), b.alphabet.parse(w)?)],
        None if b.words.is_empty() => return Err(Error::Input("no --word given and the file lists no words".into())),
        None => b.words.clone(),
    };
    if b.assignment.field.real_dim() != 2 && svg_out.is_some() {
        return Err(Error::Input("SVG output needs a planar embedding".into()));
    }
    let mut text = String::new();
    let mut curves = Vec::new();
    let mut paths = Vec::new();
    let mut pass = true;
    for (name, w) in &words {
        if b.assignment.endpoint(w).iter().any(|x| !x.is_zero()) {
            let ab = abelianize(w, b.alphabet.len());
            return Err(Error::Domain(format!("word {name:?} is not closed (letter counts {ab:?})")));
        }
        let c = boundary_curve(&b.assignment, &b.endomorphism, w, iters)?;
        pass &= c.closed;
        text += &format!(
            "{name}: {} letters after {iters} iterations, {} vertices, {}\n",
            c.letters,
            c.points.len(),
            if c.closed { "closed exactly" } else { "NOT closed" }
        );
        let mut entry = json!({ "word": name, "iterations": iters, "letters": c.letters, "closed": c.closed });
        if with_points {
            entry["points"] = json!(c.points);
        }
        curves.push(entry);
        if svg_out.is_some() {
            paths.push(SvgPath { points: c.points.iter().map(|p| [p[0], p[1]]).collect(), closed: true, fill: None });
        }
    }
    if let Some(out) = svg_out {
        write(out, &svg::render(&paths))?;
        text += &format!("wrote {}\n", out.display());
    }
    let letters: serde_json::Map<String, Value> = b
        .alphabet
        .names()
        .iter()
        .zip(&b.assignment.vectors)
        .map(|(c, v)| (c.to_string(), Value::Array(v.iter().map(elem).collect())))
        .collect();
    Ok(Outcome { pass, text, json: json!({ "letters": letters, "curves": curves }) })
}
