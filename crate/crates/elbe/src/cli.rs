//! Command implementations behind the `elbe` binary: training runs,
//! evaluation reports, the 2-D family demo, and synthetic corpus generation.
//! Every command writes a run manifest next to its outputs.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluation::{evaluate_equivalence, rank_query, RankingReport, SubsumptionQuery};
use crate::geometry::{intersect, symmetric_difference_ratio, ConceptBox, Margin};
use crate::ontology::{
    generate_equivalence_corpus, generate_family_domain, parse_axiom_file,
    parse_axioms_with_vocab, AxiomSet, ConceptId, NormalizedAxiom,
};
use crate::trainer::{
    load_checkpoint, positive_nf3_index, save_checkpoint, train, Checkpoint, TrainConfig,
};

/// Reproducibility record written before a command starts and finalized when
/// it exits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub started_at_unix: u64,
    pub finished_at_unix: Option<u64>,
    pub status: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path)?;
    let hash = Sha256::digest(&bytes);
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: format!("{hash:x}"),
    })
}

impl RunManifest {
    fn start(
        command: &str,
        config: serde_json::Value,
        seed: Option<u64>,
        inputs: &[&Path],
        out_dir: &Path,
    ) -> Result<Self> {
        let manifest = Self {
            command: command.to_string(),
            config,
            seed,
            inputs: inputs
                .iter()
                .map(|p| digest_file(p))
                .collect::<Result<_>>()?,
            outputs: Vec::new(),
            started_at_unix: unix_now(),
            finished_at_unix: None,
            status: "running".to_string(),
        };
        manifest.write(out_dir)?;
        Ok(manifest)
    }

    fn finish(mut self, outputs: Vec<PathBuf>, out_dir: &Path) -> Result<()> {
        self.outputs = outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        self.finished_at_unix = Some(unix_now());
        self.status = "completed".to_string();
        self.write(out_dir)
    }

    fn write(&self, out_dir: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
        std::fs::write(out_dir.join("manifest.json"), json + "\n")?;
        Ok(())
    }
}

/// Arguments for `elbe train`.
#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub axioms: PathBuf,
    pub valid: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub config: TrainConfig,
    pub threads: usize,
}

fn config_json(config: &TrainConfig, threads: usize) -> serde_json::Value {
    serde_json::json!({
        "dim": config.dim,
        "margin": config.margin,
        "learning_rate": config.learning_rate,
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "negatives_per_positive": config.negatives_per_positive,
        "seed": config.seed,
        "init_scale": config.init_scale,
        "threads": threads,
    })
}

fn write_history(history: &[crate::trainer::EpochStats], path: &Path) -> Result<()> {
    let mut out = String::from("# epoch mean_loss valid_mean_rank\n");
    for h in history {
        match h.valid_mean_rank {
            Some(mr) => writeln!(out, "{} {} {}", h.epoch, h.mean_loss, mr),
            None => writeln!(out, "{} {}", h.epoch, h.mean_loss),
        }
        .expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Trains on an axiom file and writes checkpoint, loss history, and manifest.
pub fn cmd_train(args: &TrainArgs) -> Result<PathBuf> {
    std::fs::create_dir_all(&args.out_dir)?;
    let train_set = parse_axiom_file(&args.axioms)?;
    let valid_set = match &args.valid {
        Some(path) => {
            let content = std::fs::read_to_string(path)?;
            let axioms = parse_axioms_with_vocab(
                &content,
                &path.display().to_string(),
                &train_set.vocabulary,
            )?;
            AxiomSet {
                axioms,
                vocabulary: train_set.vocabulary.clone(),
            }
        }
        None => AxiomSet {
            axioms: vec![],
            vocabulary: train_set.vocabulary.clone(),
        },
    };
    let mut inputs = vec![args.axioms.as_path()];
    if let Some(v) = &args.valid {
        inputs.push(v.as_path());
    }
    let manifest = RunManifest::start(
        "train",
        config_json(&args.config, args.threads),
        Some(args.config.seed),
        &inputs,
        &args.out_dir,
    )?;

    let (params, history) = train(&train_set, &valid_set, &args.config)?;

    let ckpt_path = args.out_dir.join("checkpoint.txt");
    save_checkpoint(&params, &train_set.vocabulary, &args.config.echo(), &ckpt_path)?;
    let history_path = args.out_dir.join("loss_history.txt");
    write_history(&history, &history_path)?;
    manifest.finish(vec![ckpt_path.clone(), history_path], &args.out_dir)?;
    Ok(ckpt_path)
}

fn nf3_triples(axioms: &[NormalizedAxiom]) -> Vec<SubsumptionQuery> {
    axioms
        .iter()
        .filter_map(|a| match *a {
            NormalizedAxiom::Nf3 { c, r, d } => Some(SubsumptionQuery {
                head: c,
                relation: r,
                tail: d,
            }),
            _ => None,
        })
        .collect()
}

fn format_metric_row(report: &RankingReport) -> (String, String) {
    let mut header = String::new();
    let mut row = String::new();
    for (i, (k, raw)) in report.raw.hits_at.iter().enumerate() {
        let filt = report.filtered.hits_at[i].1;
        write!(header, "H@{k}(R)\tH@{k}(F)\t").expect("string write");
        write!(row, "{raw:.4}\t{filt:.4}\t").expect("string write");
    }
    write!(header, "MR(R)\tMR(F)\tAUC(R)\tAUC(F)").expect("string write");
    write!(
        row,
        "{:.2}\t{:.2}\t{:.4}\t{:.4}",
        report.raw.mean_rank, report.filtered.mean_rank, report.raw.auc, report.filtered.auc
    )
    .expect("string write");
    (header, row)
}

/// Writes the human table and the machine-readable record file
/// (`task metric raw|filtered value`, tab-separated).
fn write_report(report: &RankingReport, task: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let (header, row) = format_metric_row(report);
    let table_path = out_dir.join(format!("{task}_report.txt"));
    std::fs::write(&table_path, format!("{header}\n{row}\n"))?;

    let mut records = String::new();
    for (side, summary) in [("raw", &report.raw), ("filtered", &report.filtered)] {
        for (k, h) in &summary.hits_at {
            writeln!(records, "{task}\thits@{k}\t{side}\t{h}").expect("string write");
        }
        writeln!(records, "{task}\tmean_rank\t{side}\t{}", summary.mean_rank)
            .expect("string write");
        writeln!(records, "{task}\tauc\t{side}\t{}", summary.auc).expect("string write");
    }
    let record_path = out_dir.join(format!("{task}_report.tsv"));
    std::fs::write(&record_path, records)?;
    Ok(vec![table_path, record_path])
}

/// Arguments for `elbe eval-ppi`.
#[derive(Debug, Clone)]
pub struct EvalPpiArgs {
    pub checkpoint: PathBuf,
    pub test: PathBuf,
    pub filter: Option<PathBuf>,
    pub ks: Vec<usize>,
    pub out_dir: PathBuf,
}

fn load_axioms_against(ckpt: &Checkpoint, path: &Path) -> Result<Vec<NormalizedAxiom>> {
    let content = std::fs::read_to_string(path)?;
    parse_axioms_with_vocab(&content, &path.display().to_string(), &ckpt.vocabulary)
}

/// Link-prediction evaluation over the NF3 axioms of a test file.
///
/// The candidate pool is every concept that occurs as head or tail of an NF3
/// axiom in the filter or test file. The filtered rank removes candidates
/// forming known-true triples from either file (other than the query's own
/// head).
pub fn cmd_eval_ppi(args: &EvalPpiArgs) -> Result<RankingReport> {
    std::fs::create_dir_all(&args.out_dir)?;
    let ckpt = load_checkpoint(&args.checkpoint)?;
    let test_axioms = load_axioms_against(&ckpt, &args.test)?;
    let filter_axioms = match &args.filter {
        Some(f) => load_axioms_against(&ckpt, f)?,
        None => vec![],
    };
    let queries = nf3_triples(&test_axioms);
    if queries.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no NF3 axioms to evaluate in {}",
            args.test.display()
        )));
    }
    let mut inputs = vec![args.checkpoint.as_path(), args.test.as_path()];
    if let Some(f) = &args.filter {
        inputs.push(f.as_path());
    }
    let manifest = RunManifest::start(
        "eval-ppi",
        serde_json::json!({ "ks": args.ks }),
        None,
        &inputs,
        &args.out_dir,
    )?;

    let mut pool: Vec<ConceptId> = Vec::new();
    let mut seen = HashSet::new();
    for q in nf3_triples(&filter_axioms).iter().chain(&queries) {
        for c in [q.head, q.tail] {
            if seen.insert(c) {
                pool.push(c);
            }
        }
    }
    pool.sort();
    let mut filter_set = positive_nf3_index(&filter_axioms);
    filter_set.extend(positive_nf3_index(&test_axioms));

    let mut raw_ranks = Vec::with_capacity(queries.len());
    let mut filtered_ranks = Vec::with_capacity(queries.len());
    for q in &queries {
        let (raw, filtered) = rank_query(q, &pool, &ckpt.params, &filter_set)?;
        raw_ranks.push(raw);
        filtered_ranks.push(filtered);
    }
    let report = RankingReport::from_ranks(raw_ranks, filtered_ranks, pool.len(), &args.ks);
    let outputs = write_report(&report, "ppi", &args.out_dir)?;
    manifest.finish(outputs, &args.out_dir)?;
    Ok(report)
}

/// Arguments for `elbe eval-equiv`.
#[derive(Debug, Clone)]
pub struct EvalEquivArgs {
    pub checkpoint: PathBuf,
    pub triples: PathBuf,
    pub ks: Vec<usize>,
    pub out_dir: PathBuf,
}

/// Equivalence-entailment evaluation: ranks the E of each heldout `nf2 C D E`
/// line among all concepts of the checkpoint vocabulary.
pub fn cmd_eval_equiv(args: &EvalEquivArgs) -> Result<RankingReport> {
    std::fs::create_dir_all(&args.out_dir)?;
    let ckpt = load_checkpoint(&args.checkpoint)?;
    let axioms = load_axioms_against(&ckpt, &args.triples)?;
    let heldout: Vec<_> = axioms
        .iter()
        .filter_map(|a| match *a {
            NormalizedAxiom::Nf2 { c, d, e } => Some((c, d, e)),
            _ => None,
        })
        .collect();
    if heldout.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no NF2 triples to evaluate in {}",
            args.triples.display()
        )));
    }
    let manifest = RunManifest::start(
        "eval-equiv",
        serde_json::json!({ "ks": args.ks }),
        None,
        &[args.checkpoint.as_path(), args.triples.as_path()],
        &args.out_dir,
    )?;
    let candidates: Vec<ConceptId> = ckpt.vocabulary.concept_ids().collect();
    let report = evaluate_equivalence(&heldout, &ckpt.params, &candidates, &args.ks)?;
    let outputs = write_report(&report, "equiv", &args.out_dir)?;
    manifest.finish(outputs, &args.out_dir)?;
    Ok(report)
}

/// Arguments for `elbe gen-synthetic`.
#[derive(Debug, Clone)]
pub struct GenSyntheticArgs {
    pub base: PathBuf,
    pub n_triples: usize,
    pub n_heldout: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// Builds the equivalence-entailment corpus from a base ontology: writes
/// `train.txt` and `heldout.txt` (held-out triples as `nf2` lines).
pub fn cmd_gen_synthetic(args: &GenSyntheticArgs) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(&args.out_dir)?;
    let base = parse_axiom_file(&args.base)?;
    let manifest = RunManifest::start(
        "gen-synthetic",
        serde_json::json!({ "n_triples": args.n_triples, "n_heldout": args.n_heldout }),
        Some(args.seed),
        &[args.base.as_path()],
        &args.out_dir,
    )?;
    let (train_set, heldout) =
        generate_equivalence_corpus(&base, args.n_triples, args.n_heldout, args.seed)?;
    let train_path = args.out_dir.join("train.txt");
    std::fs::write(&train_path, train_set.serialize()?)?;
    let mut heldout_text = String::new();
    for &(c, d, e) in &heldout {
        let line = train_set.format_axiom(&NormalizedAxiom::Nf2 { c, d, e })?;
        heldout_text.push_str(&line);
        heldout_text.push('\n');
    }
    let heldout_path = args.out_dir.join("heldout.txt");
    std::fs::write(&heldout_path, heldout_text)?;
    manifest.finish(vec![train_path.clone(), heldout_path.clone()], &args.out_dir)?;
    Ok((train_path, heldout_path))
}

/// Arguments for `elbe family-demo`.
#[derive(Debug, Clone)]
pub struct FamilyDemoArgs {
    pub out_dir: PathBuf,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for FamilyDemoArgs {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("elbe_out"),
            epochs: 10_000,
            learning_rate: 1e-3,
            seed: 1,
        }
    }
}

/// Outcome of the family-domain demo, kept for assertions and printing.
#[derive(Debug, Clone)]
pub struct FamilyDemoResult {
    pub checkpoint: PathBuf,
    pub verdicts: Vec<String>,
    pub mother_symdiff_ratio: Option<f64>,
    pub father_symdiff_ratio: Option<f64>,
}

fn family_config(args: &FamilyDemoArgs) -> TrainConfig {
    TrainConfig {
        dim: 2,
        margin: 0.0,
        learning_rate: args.learning_rate,
        epochs: args.epochs,
        batch_size: 12,
        negatives_per_positive: 0,
        seed: args.seed,
        init_scale: 0.5,
    }
}

/// Trains the 12-axiom family domain at dimension 2 with margin 0, then
/// emits the axiom file, checkpoint, an SVG of the learned boxes, a CSV of
/// centers/offsets, and containment/disjointness verdicts for every concept
/// pair.
pub fn cmd_family_demo(args: &FamilyDemoArgs) -> Result<FamilyDemoResult> {
    std::fs::create_dir_all(&args.out_dir)?;
    let fam = generate_family_domain();
    let axiom_path = args.out_dir.join("family_axioms.txt");
    std::fs::write(&axiom_path, fam.serialize()?)?;
    let config = family_config(args);
    let manifest = RunManifest::start(
        "family-demo",
        config_json(&config, 1),
        Some(args.seed),
        &[axiom_path.as_path()],
        &args.out_dir,
    )?;
    let empty = AxiomSet {
        axioms: vec![],
        vocabulary: fam.vocabulary.clone(),
    };
    let (params, history) = train(&fam, &empty, &config)?;
    let ckpt_path = args.out_dir.join("checkpoint.txt");
    save_checkpoint(&params, &fam.vocabulary, &config.echo(), &ckpt_path)?;
    write_history(&history, &args.out_dir.join("loss_history.txt"))?;

    let boxes: Vec<(String, ConceptBox)> = fam
        .vocabulary
        .concept_names()
        .iter()
        .enumerate()
        .map(|(i, name)| Ok((name.clone(), params.concept_box(ConceptId(i))?)))
        .collect::<Result<_>>()?;

    // coordinates
    let mut csv = String::from("concept,center_x,center_y,offset_x,offset_y\n");
    for (name, b) in &boxes {
        writeln!(
            csv,
            "{name},{},{},{},{}",
            b.center()[0],
            b.center()[1],
            b.offset()[0],
            b.offset()[1]
        )
        .expect("string write");
    }
    let csv_path = args.out_dir.join("boxes.csv");
    std::fs::write(&csv_path, csv)?;

    let svg_path = args.out_dir.join("family.svg");
    std::fs::write(&svg_path, render_boxes_svg(&boxes))?;

    // pairwise verdicts: containment with a small slack and emptiness of the
    // pairwise intersection
    let tol = 1e-3;
    let mut verdicts = Vec::new();
    for (name_a, a) in &boxes {
        for (name_b, b) in &boxes {
            if name_a == name_b {
                continue;
            }
            let contained = crate::geometry::containment_residual(a, b, Margin(0.0))?
                .iter()
                .all(|&r| r <= tol);
            verdicts.push(format!("{name_a} ⊆ {name_b}: {contained}"));
        }
    }
    for (name_a, a) in &boxes {
        for (name_b, b) in &boxes {
            if name_a == name_b {
                continue;
            }
            let empty = intersect(a, b)?.is_none();
            verdicts.push(format!("{name_a} ∩ {name_b} = ∅: {empty}"));
        }
    }

    let find = |name: &str| -> Result<&ConceptBox> {
        boxes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b)
            .ok_or_else(|| Error::Config(format!("missing concept {name}")))
    };
    let equiv_ratio = |target: &str, c1: &str, c2: &str| -> Result<Option<f64>> {
        let inter = match intersect(find(c1)?, find(c2)?)? {
            Some(i) => i,
            None => return Ok(None),
        };
        symmetric_difference_ratio(find(target)?, &inter)
    };
    let mother_symdiff_ratio = equiv_ratio("Mother", "Female", "Parent")?;
    let father_symdiff_ratio = equiv_ratio("Father", "Male", "Parent")?;
    if let Some(r) = mother_symdiff_ratio {
        verdicts.push(format!("Mother ≡ Female∩Parent symdiff ratio: {r:.4}"));
    }
    if let Some(r) = father_symdiff_ratio {
        verdicts.push(format!("Father ≡ Male∩Parent symdiff ratio: {r:.4}"));
    }

    let verdict_path = args.out_dir.join("verdicts.txt");
    std::fs::write(&verdict_path, verdicts.join("\n") + "\n")?;
    for v in &verdicts {
        println!("{v}");
    }
    manifest.finish(
        vec![ckpt_path.clone(), csv_path, svg_path, verdict_path],
        &args.out_dir,
    )?;
    Ok(FamilyDemoResult {
        checkpoint: ckpt_path,
        verdicts,
        mother_symdiff_ratio,
        father_symdiff_ratio,
    })
}

/// Renders labeled 2-D boxes into an SVG viewport with 10% padding. One
/// `<rect>` per concept.
pub fn render_boxes_svg(boxes: &[(String, ConceptBox)]) -> String {
    const SIZE: f64 = 600.0;
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for (_, b) in boxes {
        min_x = min_x.min(b.lower()[0]);
        min_y = min_y.min(b.lower()[1]);
        max_x = max_x.max(b.upper()[0]);
        max_y = max_y.max(b.upper()[1]);
    }
    if boxes.is_empty() || !(min_x.is_finite() && max_x > min_x && max_y > min_y) {
        min_x = -1.0;
        min_y = -1.0;
        max_x = 1.0;
        max_y = 1.0;
    }
    let span = (max_x - min_x).max(max_y - min_y);
    let pad = span * 0.1;
    let scale = SIZE / (span + 2.0 * pad);
    let to_x = |x: f64| (x - min_x + pad) * scale;
    // SVG y grows downward
    let to_y = |y: f64| SIZE - (y - min_y + pad) * scale;

    let palette = [
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    ];
    let mut svg = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" \
         width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    );
    for (i, (name, b)) in boxes.iter().enumerate() {
        let color = palette[i % palette.len()];
        let x = to_x(b.lower()[0]);
        let y = to_y(b.upper()[1]);
        let w = (b.upper()[0] - b.lower()[0]) * scale;
        let h = (b.upper()[1] - b.lower()[1]) * scale;
        let label = name
            .replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;");
        writeln!(
            svg,
            "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
             fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
        )
        .expect("string write");
        writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" fill=\"{color}\" \
             text-anchor=\"middle\">{label}</text>",
            to_x(b.center()[0]),
            to_y(b.center()[1]),
        )
        .expect("string write");
    }
    svg.push_str("</svg>\n");
    svg
}

/// Picks the default output directory from `ELBE_OUT_DIR`, falling back to
/// `elbe_out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os("ELBE_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("elbe_out"))
}
