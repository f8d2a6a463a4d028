//! Synthetic dataset builders and their on-disk format: one JSON-lines
//! file per split plus a manifest. Generation is parallel over items with
//! per-item RNG streams, so thread count never changes the output.

use crate::combin::binomial;
use crate::error::{Error, Result};
use crate::generators::{
    csl_graph, cycle_with_chords, er_graph, has_cycle_of_length, label_oracles, random_tree,
};
use crate::graph::Graph;
use crate::recon::deck_wl_distinguishes_with_budget;
use crate::rng::item_stream;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

/// Attempts per item before generation gives up.
pub const GENERATION_RETRY_BUDGET: usize = 2000;

/// Skip values used by the default 41-vertex circular-skip-link dataset;
/// they fall in 10 pairwise non-isomorphic classes (certified at build
/// time).
pub const CSL_SKIPS: [usize; 10] = [2, 3, 4, 5, 6, 9, 11, 12, 13, 16];

/// Ground-truth target attached to one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Class(usize),
    Values(Vec<f64>),
}

/// One dataset entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub graph: Graph,
    pub target: Target,
}

/// What the targets mean and how models should read them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum TaskKind {
    Classification { classes: usize },
    Regression { arity: usize },
    MultitaskRegression { arity: usize },
}

/// Index lists into the item array; together they cover every index once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Splits {
    pub fn get(&self, name: &str) -> Result<&[usize]> {
        match name {
            "train" => Ok(&self.train),
            "val" => Ok(&self.val),
            "test" => Ok(&self.test),
            other => Err(Error::InvalidArgument(format!("unknown split {other:?}"))),
        }
    }
}

/// Per-target standardization constants (train-split mean and standard
/// deviation) for regression datasets whose stored targets are
/// standardized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// A generated dataset: items, split assignment, and task metadata.
#[derive(Debug, Clone)]
pub struct Dataset {
    name: String,
    task_kind: TaskKind,
    seed: u64,
    items: Vec<Item>,
    splits: Splits,
    target_stats: Option<TargetStats>,
}

impl Dataset {
    pub fn new(
        name: String,
        task_kind: TaskKind,
        seed: u64,
        items: Vec<Item>,
        splits: Splits,
        target_stats: Option<TargetStats>,
    ) -> Result<Self> {
        let mut covered: Vec<usize> = splits
            .train
            .iter()
            .chain(&splits.val)
            .chain(&splits.test)
            .copied()
            .collect();
        covered.sort_unstable();
        if covered != (0..items.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidDataset(
                "splits must partition the item index range".into(),
            ));
        }
        for item in &items {
            match (&task_kind, &item.target) {
                (TaskKind::Classification { classes }, Target::Class(c)) => {
                    if c >= classes {
                        return Err(Error::InvalidDataset(format!(
                            "class index {c} out of range for {classes} classes"
                        )));
                    }
                }
                (TaskKind::Regression { arity }, Target::Values(v))
                | (TaskKind::MultitaskRegression { arity }, Target::Values(v)) => {
                    if v.len() != *arity {
                        return Err(Error::InvalidDataset(format!(
                            "target vector has arity {}, task expects {arity}",
                            v.len()
                        )));
                    }
                }
                _ => {
                    return Err(Error::InvalidDataset(
                        "target variant does not match the task kind".into(),
                    ))
                }
            }
        }
        Ok(Dataset {
            name,
            task_kind,
            seed,
            items,
            splits,
            target_stats,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn task_kind(&self) -> TaskKind {
        self.task_kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn splits(&self) -> &Splits {
        &self.splits
    }

    pub fn target_stats(&self) -> Option<&TargetStats> {
        self.target_stats.as_ref()
    }

    pub fn class_count(&self) -> Option<usize> {
        match self.task_kind {
            TaskKind::Classification { classes } => Some(classes),
            _ => None,
        }
    }

    /// Cross-validation splits: items are grouped by class (one group for
    /// regression), dealt round-robin into `folds` piles; fold `f` uses
    /// pile f as test, pile f+1 as val, and the rest as train.
    pub fn stratified_folds(&self, folds: usize) -> Result<Vec<Splits>> {
        if folds < 3 {
            return Err(Error::InvalidArgument(format!(
                "cross-validation needs at least 3 folds, got {folds}"
            )));
        }
        let mut piles: Vec<Vec<usize>> = vec![Vec::new(); folds];
        let mut per_class: std::collections::BTreeMap<usize, usize> = Default::default();
        for (i, item) in self.items.iter().enumerate() {
            let class = match &item.target {
                Target::Class(c) => *c,
                Target::Values(_) => 0,
            };
            let counter = per_class.entry(class).or_insert(0);
            piles[*counter % folds].push(i);
            *counter += 1;
        }
        Ok((0..folds)
            .map(|f| {
                let test = piles[f].clone();
                let val = piles[(f + 1) % folds].clone();
                let mut train = Vec::new();
                for (p, pile) in piles.iter().enumerate() {
                    if p != f && p != (f + 1) % folds {
                        train.extend_from_slice(pile);
                    }
                }
                train.sort_unstable();
                Splits { train, val, test }
            })
            .collect())
    }

    /// Writes `manifest.json` plus one `{split}.jsonl` per split into
    /// `dir`. Each JSONL line is one serialized item.
    pub fn save(&self, dir: &Path, config_sha256: Option<&str>) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let manifest = Manifest {
            schema_version: 1,
            name: self.name.clone(),
            task_kind: self.task_kind,
            seed: self.seed,
            counts: [
                self.splits.train.len(),
                self.splits.val.len(),
                self.splits.test.len(),
            ],
            target_stats: self.target_stats.clone(),
            config_sha256: config_sha256.map(str::to_string),
        };
        let mut file = std::fs::File::create(dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(&mut file, &manifest)?;
        file.write_all(b"\n")?;
        for (split, indices) in [
            ("train", &self.splits.train),
            ("val", &self.splits.val),
            ("test", &self.splits.test),
        ] {
            let mut out = std::io::BufWriter::new(
                std::fs::File::create(dir.join(format!("{split}.jsonl")))?,
            );
            for &i in indices {
                serde_json::to_writer(&mut out, &self.items[i])?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    /// Reads a dataset saved by [`Dataset::save`]; items are re-indexed in
    /// train/val/test file order.
    pub fn load(dir: &Path) -> Result<Dataset> {
        let manifest: Manifest =
            serde_json::from_reader(std::fs::File::open(dir.join("manifest.json"))?)?;
        let mut items = Vec::new();
        let mut splits = Splits {
            train: Vec::new(),
            val: Vec::new(),
            test: Vec::new(),
        };
        for (split, expected) in ["train", "val", "test"].iter().zip(manifest.counts) {
            let file = std::fs::File::open(dir.join(format!("{split}.jsonl")))?;
            let mut count = 0usize;
            for line in std::io::BufReader::new(file).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let item: Item = serde_json::from_str(&line)?;
                let idx = items.len();
                items.push(item);
                match *split {
                    "train" => splits.train.push(idx),
                    "val" => splits.val.push(idx),
                    _ => splits.test.push(idx),
                }
                count += 1;
            }
            if count != expected {
                return Err(Error::InvalidDataset(format!(
                    "{split} split holds {count} items, manifest says {expected}"
                )));
            }
        }
        Dataset::new(
            manifest.name,
            manifest.task_kind,
            manifest.seed,
            items,
            splits,
            manifest.target_stats,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Manifest {
    schema_version: u32,
    name: String,
    task_kind: TaskKind,
    seed: u64,
    counts: [usize; 3],
    target_stats: Option<TargetStats>,
    config_sha256: Option<String>,
}

/// Which dataset family to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatasetKind {
    /// 41-vertex circular-skip-link graphs, 10 classes x 15 permuted
    /// copies.
    Csl,
    /// Balanced detection of a cycle of length exactly `l`; a configurable
    /// fraction of items are paired 2-regular confusers that single-graph
    /// message passing cannot separate.
    Cycles { l: usize },
    /// Mixed random family with standardized (connectivity, diameter,
    /// spectral radius) regression targets.
    Multitask,
    /// Balanced connectivity classification where every label survives
    /// single-vertex deletion (positives are 2-connected, negatives are
    /// two 2-connected components).
    Connectivity,
}

/// Fully-resolved generation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub seed: u64,
    /// Item count; families have their own defaults, and csl is fixed by
    /// its class structure.
    pub count: Option<usize>,
    /// Cycle tasks: number of vertices per graph (desk defaults 12/16/20
    /// for l = 4/6/8; paper-scale 36/49/62).
    pub graph_size: Option<usize>,
    /// Cycle tasks: fraction of items generated as paired 2-regular
    /// confusers. Default 0.3.
    pub confuser_fraction: Option<f64>,
    /// Cycle tasks: use the published mean graph sizes instead of the desk
    /// defaults.
    pub paper_scale: bool,
    /// Multitask/connectivity: inclusive vertex-count range.
    pub size_range: Option<(usize, usize)>,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, seed: u64) -> Self {
        DatasetSpec {
            kind,
            seed,
            count: None,
            graph_size: None,
            confuser_fraction: None,
            paper_scale: false,
            size_range: None,
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            DatasetKind::Csl => "csl".into(),
            DatasetKind::Cycles { l } => format!("cycles-{l}"),
            DatasetKind::Multitask => "multitask".into(),
            DatasetKind::Connectivity => "connectivity".into(),
        }
    }

    /// Parses names like `csl`, `cycles-6`, `multitask`, `connectivity`.
    pub fn parse_kind(name: &str) -> Result<DatasetKind> {
        match name {
            "csl" => Ok(DatasetKind::Csl),
            "multitask" => Ok(DatasetKind::Multitask),
            "connectivity" => Ok(DatasetKind::Connectivity),
            other => match other.strip_prefix("cycles-") {
                Some(l) => {
                    let l: usize = l.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad cycle length in {other:?}"))
                    })?;
                    Ok(DatasetKind::Cycles { l })
                }
                None => Err(Error::InvalidArgument(format!(
                    "unknown dataset kind {other:?} (expected csl | cycles-L | multitask | connectivity)"
                ))),
            },
        }
    }
}

/// Builds the dataset described by `spec`.
pub fn build_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    match spec.kind {
        DatasetKind::Csl => build_csl(spec),
        DatasetKind::Cycles { l } => build_cycles(spec, l),
        DatasetKind::Multitask => build_multitask(spec),
        DatasetKind::Connectivity => build_connectivity(spec),
    }
}

fn build_csl(spec: &DatasetSpec) -> Result<Dataset> {
    let m = spec.graph_size.unwrap_or(41);
    let copies = spec.count.map(|c| c / CSL_SKIPS.len()).unwrap_or(15);
    if copies == 0 {
        return Err(Error::InvalidArgument(
            "csl needs at least one copy per class".into(),
        ));
    }
    let bases: Vec<Graph> = CSL_SKIPS
        .iter()
        .map(|&r| csl_graph(m, r))
        .collect::<Result<_>>()?;
    for i in 0..bases.len() {
        for j in i + 1..bases.len() {
            let distinguished = deck_wl_distinguishes_with_budget(
                &bases[i],
                &bases[j],
                m - 1,
                binomial(m, m - 1),
            )?;
            if !distinguished {
                return Err(Error::Generation(format!(
                    "skip classes {} and {} were not certified non-isomorphic",
                    CSL_SKIPS[i], CSL_SKIPS[j]
                )));
            }
        }
    }
    let items: Vec<Item> = (0..bases.len() * copies)
        .into_par_iter()
        .map(|idx| -> Result<Item> {
            let class = idx / copies;
            let mut rng = item_stream(spec.seed, "csl-perm", idx as u64);
            let mut perm: Vec<usize> = (0..m).collect();
            perm.shuffle(&mut rng);
            Ok(Item {
                graph: bases[class].permuted(&perm)?,
                target: Target::Class(class),
            })
        })
        .collect::<Result<_>>()?;
    let splits = round_robin_split(&items, 5)?;
    Dataset::new(
        "csl".into(),
        TaskKind::Classification {
            classes: CSL_SKIPS.len(),
        },
        spec.seed,
        items,
        splits,
        None,
    )
}

fn build_cycles(spec: &DatasetSpec, l: usize) -> Result<Dataset> {
    if !matches!(l, 4 | 6 | 8) {
        return Err(Error::InvalidArgument(format!(
            "cycle detection supports lengths 4, 6, and 8, got {l}"
        )));
    }
    let n = spec.graph_size.unwrap_or(match (l, spec.paper_scale) {
        (4, false) => 12,
        (6, false) => 16,
        (8, false) => 20,
        (4, true) => 36,
        (6, true) => 49,
        _ => 62,
    });
    if n < l + 3 {
        return Err(Error::InvalidArgument(format!(
            "cycle task needs graphs with at least {} vertices, got {n}",
            l + 3
        )));
    }
    let count = spec.count.unwrap_or(2000);
    if count == 0 || count % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "balanced cycle dataset needs a positive even count, got {count}"
        )));
    }
    let fraction = spec.confuser_fraction.unwrap_or(0.3);
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "confuser fraction must lie in [0, 1], got {fraction}"
        )));
    }
    let pair_count = count / 2;
    let confuser_pairs = ((pair_count as f64) * fraction).floor() as usize;
    let p = er_cycle_threshold(n, l);
    let pairs: Vec<[Item; 2]> = (0..pair_count)
        .into_par_iter()
        .map(|pair| -> Result<[Item; 2]> {
            if pair < confuser_pairs {
                confuser_pair(spec.seed, pair as u64, n, l)
            } else {
                er_pair(spec.seed, pair as u64, n, l, p)
            }
        })
        .collect::<Result<_>>()?;
    let items: Vec<Item> = pairs.into_iter().flatten().collect();
    let splits = round_robin_split(&items, 5)?;
    Dataset::new(
        format!("cycles-{l}"),
        TaskKind::Classification { classes: 2 },
        spec.seed,
        items,
        splits,
        None,
    )
}

/// Edge probability at which a G(n, p) graph contains an l-cycle roughly
/// half the time (expected l-cycle count 0.7).
fn er_cycle_threshold(n: usize, l: usize) -> f64 {
    let placements = binomial(n, l) as f64 * factorial(l - 1) / 2.0;
    (0.7 / placements).powf(1.0 / l as f64)
}

fn factorial(x: usize) -> f64 {
    (1..=x).map(|i| i as f64).product()
}

/// A positive/negative pair of disjoint cycle unions on the same vertex
/// count: the positive partition contains a part of length exactly `l`,
/// the negative avoids it. Both are 2-regular, so their vertex-level
/// refinements agree and only subgraph structure tells them apart.
fn confuser_pair(seed: u64, pair: u64, n: usize, l: usize) -> Result<[Item; 2]> {
    let mut rng = item_stream(seed, "cycles-confuser", pair);
    let mut pos_parts = vec![l];
    pos_parts.extend(random_cycle_partition(n - l, None, &mut rng)?);
    let neg_parts = random_cycle_partition(n, Some(l), &mut rng)?;
    Ok([
        Item {
            graph: cycle_union(&pos_parts)?,
            target: Target::Class(1),
        },
        Item {
            graph: cycle_union(&neg_parts)?,
            target: Target::Class(0),
        },
    ])
}

/// Random partition of `total` into cycle lengths (parts >= 3), optionally
/// avoiding one forbidden length.
fn random_cycle_partition<R: Rng>(
    total: usize,
    forbidden: Option<usize>,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let allowed = |p: usize| p >= 3 && Some(p) != forbidden;
    let mut representable = vec![false; total + 1];
    representable[0] = true;
    for m in 3..=total {
        representable[m] = (3..=m).any(|p| allowed(p) && representable[m - p]);
    }
    if !representable[total] {
        return Err(Error::Generation(format!(
            "{total} vertices cannot be partitioned into cycles avoiding {forbidden:?}"
        )));
    }
    let mut parts = Vec::new();
    let mut rem = total;
    while rem > 0 {
        let choices: Vec<usize> = (3..=rem)
            .filter(|&p| allowed(p) && representable[rem - p])
            .collect();
        let p = choices[rng.gen_range(0..choices.len())];
        parts.push(p);
        rem -= p;
    }
    parts.sort_unstable();
    Ok(parts)
}

fn cycle_union(parts: &[usize]) -> Result<Graph> {
    let n: usize = parts.iter().sum();
    let mut edges = Vec::with_capacity(n);
    let mut offset = 0usize;
    for &p in parts {
        for i in 0..p {
            edges.push((offset + i, offset + (i + 1) % p));
        }
        offset += p;
    }
    let mut normalized: Vec<(usize, usize)> = edges
        .into_iter()
        .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
        .collect();
    normalized.sort_unstable();
    Graph::new(n, normalized)
}

/// A positive/negative Erdős–Rényi pair with matched edge budgets: the
/// negative is resampled until it avoids the target cycle and its edge
/// count stays within half-the-vertex-count of the positive's (average
/// degree within 1).
fn er_pair(seed: u64, pair: u64, n: usize, l: usize, p: f64) -> Result<[Item; 2]> {
    let mut rng = item_stream(seed, "cycles-er", pair);
    let mut positive = None;
    for _ in 0..GENERATION_RETRY_BUDGET {
        let g = er_graph(n, p, &mut rng);
        if has_cycle_of_length(&g, l) {
            positive = Some(g);
            break;
        }
    }
    let positive = positive.ok_or_else(|| {
        Error::Generation(format!(
            "no {l}-cycle positive found in {GENERATION_RETRY_BUDGET} draws (n = {n}, p = {p:.4})"
        ))
    })?;
    let mut negative = None;
    for _ in 0..GENERATION_RETRY_BUDGET {
        let g = er_graph(n, p, &mut rng);
        let degree_gap = g.m().abs_diff(positive.m());
        if !has_cycle_of_length(&g, l) && 2 * degree_gap <= n {
            negative = Some(g);
            break;
        }
    }
    let negative = negative.ok_or_else(|| {
        Error::Generation(format!(
            "no degree-matched {l}-cycle-free negative found in {GENERATION_RETRY_BUDGET} draws"
        ))
    })?;
    Ok([
        Item {
            graph: positive,
            target: Target::Class(1),
        },
        Item {
            graph: negative,
            target: Target::Class(0),
        },
    ])
}

fn build_multitask(spec: &DatasetSpec) -> Result<Dataset> {
    let count = spec.count.unwrap_or(600);
    if count == 0 {
        return Err(Error::InvalidArgument("multitask needs a positive count".into()));
    }
    let (lo, hi) = spec.size_range.unwrap_or((8, 16));
    if lo < 5 || hi < lo {
        return Err(Error::InvalidArgument(format!(
            "multitask size range must satisfy 5 <= lo <= hi, got ({lo}, {hi})"
        )));
    }
    let mut items: Vec<Item> = (0..count)
        .into_par_iter()
        .map(|idx| -> Result<Item> {
            let mut rng = item_stream(spec.seed, "multitask", idx as u64);
            let n = rng.gen_range(lo..=hi);
            let graph = match rng.gen_range(0..3u8) {
                0 => er_graph(n, rng.gen_range(0.2..=0.8), &mut rng),
                1 => random_tree(n, &mut rng),
                _ => cycle_with_chords(n, rng.gen_range(1..=3), &mut rng)?,
            };
            let target = Target::Values(label_oracles(&graph).to_vec());
            Ok(Item { graph, target })
        })
        .collect::<Result<_>>()?;
    let splits = round_robin_split(&items, 5)?;
    let stats = standardize_targets(&mut items, &splits.train)?;
    Dataset::new(
        "multitask".into(),
        TaskKind::MultitaskRegression { arity: 3 },
        spec.seed,
        items,
        splits,
        Some(stats),
    )
}

/// Rewrites every target as (value - train_mean) / train_std per
/// coordinate and returns the constants.
fn standardize_targets(items: &mut [Item], train: &[usize]) -> Result<TargetStats> {
    let arity = match &items[0].target {
        Target::Values(v) => v.len(),
        Target::Class(_) => {
            return Err(Error::InvalidDataset(
                "standardization applies to regression targets".into(),
            ))
        }
    };
    let mut mean = vec![0.0f64; arity];
    let mut sq = vec![0.0f64; arity];
    for &i in train {
        if let Target::Values(v) = &items[i].target {
            for (j, &x) in v.iter().enumerate() {
                mean[j] += x;
                sq[j] += x * x;
            }
        }
    }
    let count = train.len().max(1) as f64;
    let mut std = vec![0.0f64; arity];
    for j in 0..arity {
        mean[j] /= count;
        let var = (sq[j] / count - mean[j] * mean[j]).max(0.0);
        std[j] = var.sqrt();
        if std[j] < 1e-9 {
            std[j] = 1.0;
        }
    }
    for item in items.iter_mut() {
        if let Target::Values(v) = &mut item.target {
            for (j, x) in v.iter_mut().enumerate() {
                *x = (*x - mean[j]) / std[j];
            }
        }
    }
    Ok(TargetStats { mean, std })
}

fn build_connectivity(spec: &DatasetSpec) -> Result<Dataset> {
    let count = spec.count.unwrap_or(500);
    if count == 0 || count % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "balanced connectivity dataset needs a positive even count, got {count}"
        )));
    }
    let (lo, hi) = spec.size_range.unwrap_or((11, 14));
    if lo < 10 || hi < lo {
        return Err(Error::InvalidArgument(format!(
            "connectivity size range must satisfy 10 <= lo <= hi, got ({lo}, {hi})"
        )));
    }
    let items: Vec<Item> = (0..count)
        .into_par_iter()
        .map(|idx| -> Result<Item> {
            let mut rng = item_stream(spec.seed, "connectivity", idx as u64);
            let n = rng.gen_range(lo..=hi);
            if idx % 2 == 0 {
                let g = sample_biconnected(n, 0.45, &mut rng)?;
                Ok(Item {
                    graph: g,
                    target: Target::Class(1),
                })
            } else {
                let half = n / 2;
                let a = sample_biconnected(half, 0.7, &mut rng)?;
                let b = sample_biconnected(n - half, 0.7, &mut rng)?;
                Ok(Item {
                    graph: a.disjoint_union(&b),
                    target: Target::Class(0),
                })
            }
        })
        .collect::<Result<_>>()?;
    let splits = round_robin_split(&items, 5)?;
    Dataset::new(
        "connectivity".into(),
        TaskKind::Classification { classes: 2 },
        spec.seed,
        items,
        splits,
        None,
    )
}

fn sample_biconnected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    for _ in 0..GENERATION_RETRY_BUDGET {
        let g = er_graph(n, p, rng);
        if is_biconnected(&g) {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no 2-connected graph found in {GENERATION_RETRY_BUDGET} draws (n = {n}, p = {p})"
    )))
}

/// Connected with no cut vertex, checked by deleting each vertex in turn.
pub fn is_biconnected(g: &Graph) -> bool {
    let n = g.n();
    if n < 3 || !g.is_connected() {
        return false;
    }
    let mut keep: Vec<usize> = Vec::with_capacity(n - 1);
    (0..n).all(|v| {
        keep.clear();
        keep.extend((0..n).filter(|&u| u != v));
        g.induced_subgraph(&keep)
            .map(|h| h.is_connected())
            .unwrap_or(false)
    })
}

/// Deterministic stratified split: per class, items are dealt into
/// `groups` piles round-robin; pile order [train, train, train, val, test]
/// yields 60/20/20.
fn round_robin_split(items: &[Item], groups: usize) -> Result<Splits> {
    debug_assert_eq!(groups, 5);
    let mut splits = Splits {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    let mut per_class: std::collections::BTreeMap<usize, usize> = Default::default();
    for (i, item) in items.iter().enumerate() {
        let class = match &item.target {
            Target::Class(c) => *c,
            Target::Values(_) => 0,
        };
        let counter = per_class.entry(class).or_insert(0);
        match *counter % groups {
            0 | 1 | 2 => splits.train.push(i),
            3 => splits.val.push(i),
            _ => splits.test.push(i),
        }
        *counter += 1;
    }
    if splits.train.is_empty() || splits.val.is_empty() || splits.test.is_empty() {
        return Err(Error::InvalidDataset(
            "dataset too small to populate train, val, and test splits".into(),
        ));
    }
    Ok(splits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::label_oracles;

    #[test]
    fn csl_dataset_has_ten_classes_of_fifteen_copies() {
        let spec = DatasetSpec::new(DatasetKind::Csl, 7);
        let ds = build_dataset(&spec).unwrap();
        assert_eq!(ds.len(), 150);
        assert_eq!(ds.class_count(), Some(10));
        let mut per_class = vec![0usize; 10];
        for item in ds.items() {
            assert_eq!(item.graph.n(), 41);
            assert_eq!(item.graph.m(), 82);
            match item.target {
                Target::Class(c) => per_class[c] += 1,
                _ => panic!("csl targets are classes"),
            }
        }
        assert!(per_class.iter().all(|&c| c == 15));
        let folds = ds.stratified_folds(5).unwrap();
        assert_eq!(folds.len(), 5);
        for fold in &folds {
            assert_eq!(fold.test.len(), 30);
            assert_eq!(fold.val.len(), 30);
            assert_eq!(fold.train.len(), 90);
        }
    }

    #[test]
    fn cycles_dataset_is_balanced_with_correct_labels() {
        let mut spec = DatasetSpec::new(DatasetKind::Cycles { l: 4 }, 3);
        spec.count = Some(120);
        let ds = build_dataset(&spec).unwrap();
        assert_eq!(ds.len(), 120);
        let positives = ds
            .items()
            .iter()
            .filter(|it| it.target == Target::Class(1))
            .count();
        assert_eq!(positives, 60);
        for item in ds.items() {
            let has = has_cycle_of_length(&item.graph, 4);
            assert_eq!(item.target == Target::Class(1), has);
        }
        let confusers = ds
            .items()
            .iter()
            .filter(|it| (0..it.graph.n()).all(|v| it.graph.degree(v) == 2))
            .count();
        assert_eq!(confusers, 36);
    }

    #[test]
    fn multitask_targets_destandardize_to_oracle_values() {
        let mut spec = DatasetSpec::new(DatasetKind::Multitask, 11);
        spec.count = Some(60);
        let ds = build_dataset(&spec).unwrap();
        let stats = ds.target_stats().unwrap();
        for item in ds.items() {
            let raw = label_oracles(&item.graph).to_vec();
            match &item.target {
                Target::Values(v) => {
                    for j in 0..3 {
                        let restored = v[j] * stats.std[j] + stats.mean[j];
                        assert!((restored - raw[j]).abs() < 1e-9);
                    }
                }
                _ => panic!("multitask targets are vectors"),
            }
        }
    }

    #[test]
    fn connectivity_labels_survive_any_single_deletion() {
        let mut spec = DatasetSpec::new(DatasetKind::Connectivity, 5);
        spec.count = Some(20);
        let ds = build_dataset(&spec).unwrap();
        for item in ds.items() {
            let n = item.graph.n();
            let connected = item.target == Target::Class(1);
            assert_eq!(item.graph.is_connected(), connected);
            for v in 0..n {
                let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
                let card = item.graph.induced_subgraph(&keep).unwrap();
                assert_eq!(card.is_connected(), connected);
            }
        }
    }

    #[test]
    fn same_seed_rebuilds_byte_identical_items() {
        let mut spec = DatasetSpec::new(DatasetKind::Cycles { l: 4 }, 9);
        spec.count = Some(40);
        let a = build_dataset(&spec).unwrap();
        let b = build_dataset(&spec).unwrap();
        let dump = |d: &Dataset| serde_json::to_string(d.items()).unwrap();
        assert_eq!(dump(&a), dump(&b));
        let dir = tempfile::tempdir().unwrap();
        a.save(dir.path(), Some("deadbeef")).unwrap();
        let reloaded = Dataset::load(dir.path()).unwrap();
        assert_eq!(reloaded.len(), a.len());
        assert_eq!(reloaded.splits().train.len(), a.splits().train.len());
        let first = &reloaded.items()[0];
        assert_eq!(first, &a.items()[a.splits().train[0]]);
    }
}
