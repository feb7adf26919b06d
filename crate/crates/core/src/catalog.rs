//! The shipped catalog of small test groups and the full verification run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_group::{EnumeratedGroup, GroupTable};
use crate::kazhdan::{
    kazhdan_interval, kazhdan_upper_opt, verify_almost_invariance, verify_basics,
    verify_displacement_lower_bound, verify_inequality_chain, Check, SemidirectSplit,
    VerificationReport,
};
use crate::perm::{parse_cycles, Permutation};
use crate::semidirect::{build_y, GroupElement};

pub const SHIPPED_CATALOG: &str = include_str!("../data/catalog.toml");

#[derive(Debug, Deserialize)]
struct CatalogFile {
    group: Vec<EntrySpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntrySpec {
    name: String,
    degree: Option<usize>,
    #[serde(default)]
    generators: Vec<(String, String)>,
    split: Option<SplitSpec>,
    semidirect: Option<SemidirectSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitSpec {
    normal: Vec<String>,
    complement: Vec<String>,
    s: Vec<String>,
    t: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemidirectSpec {
    n: usize,
    p: u64,
}

/// G = N ⋊ H with the sets S ⊆ N and T ⊆ H used by the chain check.
#[derive(Debug, Clone)]
pub struct CatalogSplit {
    pub split: SemidirectSplit,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CatalogGroup {
    pub name: String,
    pub table: GroupTable,
    /// Printable form of every element, indexed like `table`.
    pub element_names: Vec<String>,
    pub generators: Vec<(String, usize)>,
    pub split: Option<CatalogSplit>,
}

impl CatalogGroup {
    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn generator_indices(&self) -> Vec<usize> {
        self.generators.iter().map(|(_, g)| *g).collect()
    }

    /// Generators selected by label; an empty selection means all of them.
    pub fn select(&self, labels: &[String]) -> Result<Vec<usize>> {
        if labels.is_empty() {
            return Ok(self.generator_indices());
        }
        labels
            .iter()
            .map(|l| {
                self.generators
                    .iter()
                    .find(|(name, _)| name == l)
                    .map(|(_, g)| *g)
                    .ok_or_else(|| {
                        Error::Catalog(format!("group {} has no generator {l:?}", self.name))
                    })
            })
            .collect()
    }
}

pub fn load_catalog(text: &str) -> Result<Vec<CatalogGroup>> {
    let file: CatalogFile =
        toml::from_str(text).map_err(|e| Error::Catalog(e.message().to_owned()))?;
    let mut seen = std::collections::HashSet::new();
    file.group
        .into_iter()
        .map(|spec| {
            if !seen.insert(spec.name.clone()) {
                return Err(Error::Catalog(format!("duplicate group {}", spec.name)));
            }
            build_entry(spec)
        })
        .collect()
}

pub fn shipped_catalog() -> Result<Vec<CatalogGroup>> {
    load_catalog(SHIPPED_CATALOG)
}

pub fn find_group(catalog: &[CatalogGroup], name: &str) -> Result<CatalogGroup> {
    catalog
        .iter()
        .find(|g| g.name == name)
        .cloned()
        .ok_or_else(|| Error::Catalog(format!("unknown group {name:?}")))
}

fn build_entry(spec: EntrySpec) -> Result<CatalogGroup> {
    let context = |e: Error| Error::Catalog(format!("{}: {e}", spec.name));
    match (&spec.semidirect, spec.degree) {
        (Some(sd), None) if spec.generators.is_empty() && spec.split.is_none() => {
            semidirect_entry(&spec.name, sd.n, sd.p).map_err(context)
        }
        (None, Some(degree)) => permutation_entry(&spec, degree).map_err(context),
        _ => Err(Error::Catalog(format!(
            "{}: give either `degree` with `generators` or `semidirect` alone",
            spec.name
        ))),
    }
}

fn permutation_entry(spec: &EntrySpec, degree: usize) -> Result<CatalogGroup> {
    if spec.generators.is_empty() {
        return Err(Error::Catalog("no generators".into()));
    }
    let parse = |s: &String| Permutation::from_cycles(degree, &parse_cycles(s)?);
    let gens = spec
        .generators
        .iter()
        .map(|(_, c)| parse(c))
        .collect::<Result<Vec<_>>>()?;
    let group = EnumeratedGroup::generated_by(&gens, Permutation::identity(degree))?;
    let indices = |xs: &[String]| -> Result<Vec<usize>> {
        xs.iter().map(|c| group.index_of(&parse(c)?)).collect()
    };
    let split = spec
        .split
        .as_ref()
        .map(|sp| -> Result<CatalogSplit> {
            let normal = group.table.closure(&indices(&sp.normal)?)?;
            let complement = group.table.closure(&indices(&sp.complement)?)?;
            Ok(CatalogSplit {
                split: SemidirectSplit::new(group.table.clone(), normal, complement)?,
                s: indices(&sp.s)?,
                t: indices(&sp.t)?,
            })
        })
        .transpose()?;
    Ok(CatalogGroup {
        name: spec.name.clone(),
        element_names: group.elements.iter().map(|e| e.to_string()).collect(),
        generators: spec
            .generators
            .iter()
            .map(|(l, _)| l.clone())
            .zip(group.indices_of(&gens)?)
            .collect(),
        table: group.table,
        split,
    })
}

fn semidirect_entry(name: &str, n: usize, p: u64) -> Result<CatalogGroup> {
    let y = build_y(n, p)?;
    let order = y.group_order().unwrap_or(u128::MAX);
    if order > crate::finite_group::MAX_TABLE_ORDER as u128 {
        return Err(Error::TooLarge {
            what: "catalog group order",
            value: order,
            limit: crate::finite_group::MAX_TABLE_ORDER as u128,
        });
    }
    let gens = y.elements();
    let group = EnumeratedGroup::generated_by(&gens, GroupElement::identity(n, p))?;
    let gen_idx = group.indices_of(&gens)?;
    let translations: Vec<usize> = (0..group.elements.len())
        .filter(|&i| group.elements[i].perm.is_identity())
        .collect();
    let permutations: Vec<usize> = (0..group.elements.len())
        .filter(|&i| group.elements[i].vec.is_zero())
        .collect();
    let split = SemidirectSplit::new(group.table.clone(), translations, permutations)?;
    let labels = ["v", "t", "c"].map(String::from);
    Ok(CatalogGroup {
        name: name.to_owned(),
        element_names: group.elements.iter().map(|e| e.to_string()).collect(),
        generators: labels.into_iter().zip(gen_idx.iter().copied()).collect(),
        split: Some(CatalogSplit {
            split,
            s: vec![gen_idx[0]],
            t: gen_idx[1..].to_vec(),
        }),
        table: group.table,
    })
}

/// Settings of a catalog verification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifySettings {
    pub trials: u64,
    pub restarts: u64,
    pub n_power: usize,
    pub seed: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            trials: 1000,
            restarts: 20,
            n_power: 2,
            seed: 0,
        }
    }
}

/// Every non-falsification check for one catalog group under its generators.
pub fn verify_group(group: &CatalogGroup, settings: &VerifySettings) -> Result<VerificationReport> {
    let gens = group.generator_indices();
    let table = &group.table;
    let mut report = VerificationReport::new(group.name.clone());
    report.extend(verify_basics(table, &gens, settings.n_power)?);
    report.extend(verify_almost_invariance(
        table,
        &gens,
        settings.trials,
        settings.seed,
    )?);
    report.extend(verify_displacement_lower_bound(
        table,
        &gens,
        settings.trials,
        settings.seed,
    )?);
    let interval = kazhdan_interval(table, &gens)?;
    let opt = kazhdan_upper_opt(table, &gens, settings.restarts, settings.seed)?;
    report.checks.push(Check {
        name: "optimizer".into(),
        statement: "explicit-vector upper bound ≥ √(2·gap)".into(),
        lhs: opt.value,
        rhs: interval.lower,
        holds: opt.value >= interval.lower - crate::kazhdan::CHECK_TOL,
    });
    if let Some(split) = &group.split {
        report.extend(verify_inequality_chain(&split.split, &split.s, &split.t)?);
    }
    report.subject = group.name.clone();
    Ok(report)
}

/// Verifies all groups in parallel; reports come back in catalog order.
pub fn verify_catalog(
    catalog: &[CatalogGroup],
    settings: &VerifySettings,
) -> Result<Vec<VerificationReport>> {
    catalog
        .par_iter()
        .map(|g| verify_group(g, settings))
        .collect()
}
