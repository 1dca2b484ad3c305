use std::fs;
use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};
use duval::grpscheme::{self, ADEType, SubgroupScheme};
use duval::intlat::{self, IntMat};
use duval::mat2;
use duval::polyinv;
use duval::singclass::{self, ClassError};
use duval::text;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entry::CatalogEntry;
use crate::{Format, Target, EXIT_INVALID};

fn read_file(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn parse_type(ty: &str, n: Option<u32>) -> Result<ADEType> {
    match n {
        Some(n) => {
            let mut chars = ty.trim().chars();
            match (chars.next(), chars.next()) {
                (Some(letter), None) => Ok(ADEType::new(letter, n)?),
                _ => bail!("--n needs --type given as a single letter, got `{ty}`"),
            }
        }
        None => Ok(ty.parse()?),
    }
}

#[derive(Serialize)]
struct CatalogDoc {
    p: u64,
    max_order: u64,
    entries: Vec<CatalogEntry>,
    skipped: Vec<String>,
}

pub fn catalog(p: u64, max_order: u64, fmt: Format) -> Result<u8> {
    if !duval::gf::is_prime(p) {
        bail!("{p} is not prime");
    }
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for t in grpscheme::catalog_types(p, max_order) {
        let g = match grpscheme::make_catalog(t, p) {
            Ok(g) => g,
            Err(e) if e.is_cap() => {
                eprintln!("note: skipping {t}: {e}");
                skipped.push(format!("{t}: {e}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        entries.push(CatalogEntry::build(t, &g).with_context(|| format!("{t} at p = {p}"))?);
    }
    match fmt {
        Format::Json => print_json(&CatalogDoc {
            p,
            max_order,
            entries,
            skipped,
        })?,
        Format::Text => {
            let blocks: Vec<String> = entries.iter().map(|e| e.to_text()).collect();
            print!("{}", blocks.join("---\n"));
            for s in &skipped {
                println!("# skipped {s}");
            }
        }
    }
    Ok(0)
}

fn load_target(t: &Target) -> Result<(SubgroupScheme, Option<ADEType>)> {
    if let Some(path) = &t.input {
        let g = SubgroupScheme::from_text(&read_file(path)?)?;
        return Ok((g, None));
    }
    let ty = t.ty.as_deref().ok_or_else(|| anyhow!("give --input or --type with --p"))?;
    let p = t.p.ok_or_else(|| anyhow!("--type needs --p"))?;
    let ty = parse_type(ty, t.n)?;
    Ok((grpscheme::make_catalog(ty, p)?, Some(ty)))
}

#[derive(Serialize)]
struct Generator {
    degree: u32,
    poly: String,
}

#[derive(Serialize)]
struct InvariantsDoc {
    #[serde(rename = "type")]
    ade: String,
    p: u64,
    r: u64,
    field: String,
    order: u64,
    generators: Vec<Generator>,
    relation_degree: u32,
    relation: String,
    normal_form: String,
    hilbert: Vec<usize>,
}

pub fn invariants(target: &Target, dmax: u32, fmt: Format) -> Result<u8> {
    let (g, _) = load_target(target)?;
    let gens = polyinv::minimal_generators(&g, dmax)?;
    let (e, rel) = singclass::discover_relation(&gens)?;
    let norm = singclass::normalize_ade(&rel)?;
    let hilbert = polyinv::hilbert(&g, dmax)?;
    let doc = InvariantsDoc {
        ade: norm.ade.to_string(),
        p: g.p(),
        r: g.r(),
        field: g.ctx().to_string(),
        order: g.order(),
        generators: gens
            .iter()
            .map(|(d, f)| Generator {
                degree: *d,
                poly: f.to_string(),
            })
            .collect(),
        relation_degree: e,
        relation: rel.to_string(),
        normal_form: norm.normal_form.to_string(),
        hilbert,
    };
    match fmt {
        Format::Json => print_json(&doc)?,
        Format::Text => {
            println!("type: {}", doc.ade);
            println!("p: {}  r: {}  field: {}", doc.p, doc.r, doc.field);
            println!("order: {}", doc.order);
            for (name, gen) in ["x", "y", "z"].iter().zip(&doc.generators) {
                println!("{name} (degree {}): {}", gen.degree, gen.poly);
            }
            println!("relation (degree {}): {}", doc.relation_degree, doc.relation);
            println!("normal form: {}", doc.normal_form);
            let h: Vec<String> = doc.hilbert.iter().map(|c| c.to_string()).collect();
            println!("hilbert: {}", h.join(" "));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct ClassifyDoc {
    index: usize,
    #[serde(rename = "type")]
    ade: Option<String>,
    order: Option<u64>,
    reduced: Option<bool>,
    conjugator: Option<String>,
    entry_reproduced: Option<bool>,
    errors: Vec<String>,
}

fn classify_block(index: usize, block: &text::SchemeText) -> ClassifyDoc {
    let mut doc = ClassifyDoc {
        index,
        ade: None,
        order: None,
        reduced: None,
        conjugator: None,
        entry_reproduced: None,
        errors: Vec::new(),
    };
    let g = match SubgroupScheme::from_parsed(block) {
        Ok(g) => g,
        Err(e) => {
            doc.errors.push(e.to_string());
            return doc;
        }
    };
    doc.order = Some(g.order());
    doc.reduced = Some(g.is_reduced());
    let violations = g.validate();
    if !violations.is_empty() {
        doc.errors.extend(violations.iter().map(|v| v.to_string()));
        return doc;
    }
    let t = match singclass::classify(&g) {
        Ok(t) => t,
        Err(e) => {
            doc.errors.push(e.to_string());
            return doc;
        }
    };
    doc.ade = Some(t.to_string());
    match singclass::normalize_conjugator(&g) {
        Ok((m, _)) => doc.conjugator = Some(m.to_string()),
        Err(ClassError::Unsupported(_)) => {}
        Err(e) => doc.errors.push(format!("normalizing conjugator: {e}")),
    }
    let has_metadata = block.type_tag.is_some()
        || block.order.is_some()
        || block.degrees.is_some()
        || block.relation.is_some();
    if has_metadata {
        match CatalogEntry::reproduce(block) {
            Ok(_) => doc.entry_reproduced = Some(true),
            Err(e) => {
                doc.entry_reproduced = Some(false);
                doc.errors.push(format!("{e:#}"));
            }
        }
    }
    doc
}

pub fn classify(input: &str, fmt: Format) -> Result<u8> {
    let blocks = text::parse_document(&read_file(input)?)?;
    let docs: Vec<ClassifyDoc> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| classify_block(i, b))
        .collect();
    match fmt {
        Format::Json => print_json(&docs)?,
        Format::Text => {
            for (i, d) in docs.iter().enumerate() {
                if i > 0 {
                    println!("---");
                }
                if let Some(t) = &d.ade {
                    println!("type: {t}");
                }
                if let Some(o) = d.order {
                    println!("order: {o}");
                }
                if let Some(r) = d.reduced {
                    println!("reduced: {r}");
                }
                if let Some(c) = &d.conjugator {
                    println!("conjugator: {c}");
                }
                if let Some(ok) = d.entry_reproduced {
                    println!("entry reproduced: {}", if ok { "yes" } else { "no" });
                }
                for e in &d.errors {
                    println!("error: {e}");
                }
            }
        }
    }
    let failed = docs.iter().any(|d| !d.errors.is_empty());
    Ok(if failed { EXIT_INVALID } else { 0 })
}

#[derive(Serialize)]
struct Check {
    label: String,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyDoc {
    #[serde(rename = "type")]
    ade: String,
    p: u64,
    generators: [String; 3],
    checks: Vec<Check>,
    constant: Option<String>,
}

/// The two sign candidates for D are informational: exactly one holds.
fn is_sign_candidate(label: &str) -> bool {
    label.starts_with("X^2+YZ^2+") || label.starts_with("X^2+YZ^2-")
}

pub fn verify(ty: &str, n: Option<u32>, p: u64, fmt: Format) -> Result<u8> {
    let t = parse_type(ty, n)?;
    let report = singclass::verify_explicit(t, p)?;
    let doc = VerifyDoc {
        ade: t.to_string(),
        p,
        generators: report.generators.clone().map(|g| g.to_string()),
        checks: report
            .checks
            .iter()
            .map(|(label, pass)| Check {
                label: label.clone(),
                pass: *pass,
            })
            .collect(),
        constant: report.constant.map(|c| c.to_string()),
    };
    match fmt {
        Format::Json => print_json(&doc)?,
        Format::Text => {
            println!("{} at p = {}", doc.ade, doc.p);
            for (name, g) in ["x", "y", "z"].iter().zip(&doc.generators) {
                println!("{name} = {g}");
            }
            for c in &doc.checks {
                println!("{}: {}", c.label, if c.pass { "PASS" } else { "FAIL" });
            }
            if let Some(c) = &doc.constant {
                println!("constant: {c}");
            }
        }
    }
    let essential = doc
        .checks
        .iter()
        .filter(|c| !is_sign_candidate(&c.label))
        .all(|c| c.pass);
    Ok(if essential { 0 } else { EXIT_INVALID })
}

#[derive(Serialize)]
struct SnfDoc {
    u: Vec<Vec<i128>>,
    d: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    invariant_factors: Vec<i128>,
    cokernel: String,
}

fn rows(m: &IntMat) -> Vec<Vec<i128>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn snf(input: Option<&str>, fmt: Format) -> Result<u8> {
    let src = match input {
        Some(path) => read_file(path)?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let a: IntMat = src.parse()?;
    let s = intlat::smith_normal_form(&a)?;
    let coker = intlat::cokernel(&a)?;
    match fmt {
        Format::Json => print_json(&SnfDoc {
            u: rows(&s.u),
            d: rows(&s.d),
            v: rows(&s.v),
            invariant_factors: s.invariant_factors(),
            cokernel: coker.to_string(),
        })?,
        Format::Text => {
            print!("U:\n{}D:\n{}V:\n{}", s.u, s.d, s.v);
            let f: Vec<String> = s.invariant_factors().iter().map(|x| x.to_string()).collect();
            println!("invariant factors: {}", f.join(" "));
            println!("cokernel: {coker}");
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct SelftestDoc {
    seed: u64,
    instances: usize,
    conjugates: usize,
    failures: Vec<String>,
}

pub fn selftest(seed: u64, p: Option<u64>, max_order: u64, rounds: usize, fmt: Format) -> Result<u8> {
    let primes = match p {
        Some(p) => vec![p],
        None => vec![2, 3, 5, 7, 11],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = SelftestDoc {
        seed,
        instances: 0,
        conjugates: 0,
        failures: Vec::new(),
    };
    for p in primes {
        for t in grpscheme::catalog_types(p, max_order) {
            let g = match grpscheme::make_catalog(t, p) {
                Ok(g) => g,
                Err(e) if e.is_cap() => continue,
                Err(e) => return Err(e.into()),
            };
            doc.instances += 1;
            // Off the torus normalizer the infinitesimal part would move.
            let general = g.is_reduced() || g.r() <= 2;
            for _ in 0..rounds {
                let m = if general {
                    mat2::random_sl2(g.ctx(), &mut rng)
                } else {
                    mat2::random_torus_normalizer(g.ctx(), &mut rng)
                };
                doc.conjugates += 1;
                let got = g
                    .conjugate(&m)
                    .map_err(anyhow::Error::from)
                    .and_then(|h| Ok(singclass::classify(&h)?));
                match got {
                    Ok(got) if got == t => {}
                    Ok(got) => doc.failures.push(format!("{t} p={p} by {m}: got {got}")),
                    Err(e) => doc.failures.push(format!("{t} p={p} by {m}: {e}")),
                }
            }
        }
    }
    match fmt {
        Format::Json => print_json(&doc)?,
        Format::Text => {
            for f in &doc.failures {
                println!("FAIL {f}");
            }
            println!(
                "selftest seed {}: {} instances, {} conjugates, {} failures",
                doc.seed,
                doc.instances,
                doc.conjugates,
                doc.failures.len()
            );
        }
    }
    Ok(if doc.failures.is_empty() { 0 } else { EXIT_INVALID })
}
