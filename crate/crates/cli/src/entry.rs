use anyhow::{bail, Result};
use duval::grpscheme::{ADEType, SubgroupScheme};
use duval::polyinv;
use duval::singclass;
use duval::text::SchemeText;
use serde::Serialize;

/// One catalog scheme with its invariant-ring metadata. Text form: the
/// metadata lines, then the scheme block exactly as `SubgroupScheme::to_text`
/// writes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    #[serde(rename = "type")]
    pub type_tag: String,
    pub p: u64,
    pub k: u32,
    pub r: u64,
    pub modulus: Vec<u64>,
    pub generators: Vec<String>,
    pub order: u64,
    pub degrees: [u32; 3],
    pub relation: String,
    pub field: String,
}

impl CatalogEntry {
    pub fn build(t: ADEType, g: &SubgroupScheme) -> Result<Self> {
        let e = t.relation_degree();
        let gens = polyinv::minimal_generators(g, e)?;
        let rel = singclass::find_relation(&gens, e)?;
        let found = singclass::normalize_ade(&rel)?.ade;
        if found != t {
            bail!("relation {rel} normalizes to {found}, expected {t}");
        }
        let ctx = g.ctx();
        Ok(CatalogEntry {
            type_tag: t.to_string(),
            p: g.p(),
            k: ctx.k(),
            r: g.r(),
            modulus: ctx.modulus(),
            generators: g.extra_gens().iter().map(|m| m.to_string()).collect(),
            order: g.order(),
            degrees: [gens[0].0, gens[1].0, gens[2].0],
            relation: rel.to_string(),
            field: ctx.to_string(),
        })
    }

    /// Rebuilds the entry from a parsed block, checking the stored metadata.
    pub fn reproduce(block: &SchemeText) -> Result<Self> {
        let g = SubgroupScheme::from_parsed(block)?;
        let t = singclass::classify(&g)?;
        let entry = Self::build(t, &g)?;
        if let Some(tag) = &block.type_tag {
            if tag.parse::<ADEType>()? != t {
                bail!("stored type {tag} but the scheme classifies as {t}");
            }
        }
        if block.order.is_some_and(|o| o != entry.order) {
            bail!("stored order {:?} but |G| = {}", block.order, entry.order);
        }
        if let Some(ds) = &block.degrees {
            let want: Vec<u64> = entry.degrees.iter().map(|&d| d as u64).collect();
            if *ds != want {
                bail!("stored degrees {ds:?} but found {want:?}");
            }
        }
        if block.relation.as_ref().is_some_and(|r| *r != entry.relation) {
            bail!("stored relation differs from {}", entry.relation);
        }
        Ok(entry)
    }

    pub fn to_text(&self) -> String {
        let modulus: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        let mut out = format!(
            "type: {}\norder: {}\ndegrees: {} {} {}\nrelation: {}\n{} {} {}\nmodulus: [{}]\n",
            self.type_tag,
            self.order,
            self.degrees[0],
            self.degrees[1],
            self.degrees[2],
            self.relation,
            self.p,
            self.k,
            self.r,
            modulus.join(",")
        );
        for g in &self.generators {
            out.push_str(&format!("gen: {g}\n"));
        }
        out
    }
}
