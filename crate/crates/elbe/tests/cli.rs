//! Integration tests for the command pipelines: manifests, report files,
//! SVG output, and corpus generation.

use std::path::Path;

use elbe::cli::{
    cmd_eval_equiv, cmd_eval_ppi, cmd_family_demo, cmd_gen_synthetic, cmd_train, EvalEquivArgs,
    EvalPpiArgs, FamilyDemoArgs, GenSyntheticArgs, TrainArgs,
};
use elbe::TrainConfig;

fn manifest(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn write_tiny_ontology(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("tiny.txt");
    std::fs::write(
        &path,
        "nf1 A B\nnf3 A r C\nnf3 B r C\nnf5 A C\n# comment\nnf2 A B D\n",
    )
    .unwrap();
    path
}

fn tiny_config() -> TrainConfig {
    TrainConfig {
        dim: 3,
        epochs: 20,
        ..TrainConfig::default()
    }
}

#[test]
fn train_writes_manifest_checkpoint_and_history() {
    let dir = tempfile::tempdir().unwrap();
    let axioms = write_tiny_ontology(dir.path());
    let out = dir.path().join("out");
    let ckpt = cmd_train(&TrainArgs {
        axioms,
        valid: None,
        out_dir: out.clone(),
        config: tiny_config(),
        threads: 1,
    })
    .unwrap();
    assert!(ckpt.exists());

    let m = manifest(&out);
    assert_eq!(m["command"], "train");
    assert_eq!(m["status"], "completed");
    assert_eq!(m["seed"], 42);
    assert_eq!(m["inputs"].as_array().unwrap().len(), 1);
    let digest = m["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|o| o.as_str().unwrap().ends_with("checkpoint.txt")));

    let history = std::fs::read_to_string(out.join("loss_history.txt")).unwrap();
    // header plus one line per epoch
    assert_eq!(history.lines().count(), 21);
}

#[test]
fn eval_ppi_writes_table_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let axioms = write_tiny_ontology(dir.path());
    let out = dir.path().join("out");
    let ckpt = cmd_train(&TrainArgs {
        axioms: axioms.clone(),
        valid: None,
        out_dir: out.clone(),
        config: tiny_config(),
        threads: 1,
    })
    .unwrap();
    let eval_out = dir.path().join("eval");
    let report = cmd_eval_ppi(&EvalPpiArgs {
        checkpoint: ckpt,
        test: axioms.clone(),
        filter: None,
        ks: vec![10, 100],
        out_dir: eval_out.clone(),
    })
    .unwrap();
    assert_eq!(report.raw_ranks.len(), 2); // two nf3 axioms

    let table = std::fs::read_to_string(eval_out.join("ppi_report.txt")).unwrap();
    assert!(table.lines().next().unwrap().contains("AUC(F)"));
    let records = std::fs::read_to_string(eval_out.join("ppi_report.tsv")).unwrap();
    // 4 metrics x 2 sides
    assert_eq!(records.lines().count(), 8);
    for line in records.lines() {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 4);
        assert_eq!(fields[0], "ppi");
        assert!(fields[3].parse::<f64>().is_ok());
    }
    assert_eq!(manifest(&eval_out)["command"], "eval-ppi");
}

#[test]
fn eval_ppi_rejects_unknown_names_and_empty_tests() {
    let dir = tempfile::tempdir().unwrap();
    let axioms = write_tiny_ontology(dir.path());
    let ckpt = cmd_train(&TrainArgs {
        axioms,
        valid: None,
        out_dir: dir.path().join("out"),
        config: tiny_config(),
        threads: 1,
    })
    .unwrap();

    let stranger = dir.path().join("stranger.txt");
    std::fs::write(&stranger, "nf3 Zebra r C\n").unwrap();
    let err = cmd_eval_ppi(&EvalPpiArgs {
        checkpoint: ckpt.clone(),
        test: stranger,
        filter: None,
        ks: vec![10],
        out_dir: dir.path().join("e1"),
    })
    .unwrap_err();
    assert_eq!(err.exit_code(), 4);

    let no_links = dir.path().join("no_links.txt");
    std::fs::write(&no_links, "nf1 A B\n").unwrap();
    let err = cmd_eval_ppi(&EvalPpiArgs {
        checkpoint: ckpt,
        test: no_links,
        filter: None,
        ks: vec![10],
        out_dir: dir.path().join("e2"),
    })
    .unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn gen_synthetic_is_deterministic_and_respects_heldout() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.txt");
    let text: String = (0..30).map(|i| format!("nf2 A{i} B{i} E{i}\n")).collect();
    std::fs::write(&base, text).unwrap();

    let mut snapshots = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("gen{run}"));
        let (train, heldout) = cmd_gen_synthetic(&GenSyntheticArgs {
            base: base.clone(),
            n_triples: 20,
            n_heldout: 5,
            seed: 7,
            out_dir: out,
        })
        .unwrap();
        snapshots.push((
            std::fs::read(&train).unwrap(),
            std::fs::read(&heldout).unwrap(),
        ));
    }
    assert_eq!(snapshots[0], snapshots[1]);

    let train_text = String::from_utf8(snapshots[0].0.clone()).unwrap();
    let heldout_text = String::from_utf8(snapshots[0].1.clone()).unwrap();
    assert_eq!(heldout_text.lines().count(), 5);
    for line in heldout_text.lines() {
        assert!(line.starts_with("nf2 "));
        // held-out triple removed from train, its nf1 axioms retained
        assert!(!train_text.lines().any(|l| l == line));
        let fields: Vec<&str> = line.split_whitespace().collect();
        let nf1_c = format!("nf1 {} {}", fields[1], fields[3]);
        let nf1_d = format!("nf1 {} {}", fields[2], fields[3]);
        assert!(train_text.lines().any(|l| l == nf1_c));
        assert!(train_text.lines().any(|l| l == nf1_d));
    }
}

#[test]
fn eval_equiv_pipeline_runs_on_generated_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.txt");
    let text: String = (0..30).map(|i| format!("nf2 A{i} B{i} E{i}\n")).collect();
    std::fs::write(&base, text).unwrap();
    let (train, heldout) = cmd_gen_synthetic(&GenSyntheticArgs {
        base,
        n_triples: 20,
        n_heldout: 5,
        seed: 7,
        out_dir: dir.path().join("gen"),
    })
    .unwrap();
    let ckpt = cmd_train(&TrainArgs {
        axioms: train,
        valid: None,
        out_dir: dir.path().join("run"),
        config: TrainConfig {
            dim: 4,
            epochs: 30,
            ..TrainConfig::default()
        },
        threads: 1,
    })
    .unwrap();
    let out = dir.path().join("eval");
    let report = cmd_eval_equiv(&EvalEquivArgs {
        checkpoint: ckpt,
        triples: heldout,
        ks: vec![1, 3, 10],
        out_dir: out.clone(),
    })
    .unwrap();
    assert_eq!(report.raw_ranks.len(), 5);
    assert!(report.raw.mean_rank >= 1.0);
    assert!(out.join("equiv_report.txt").exists());
    assert!(out.join("equiv_report.tsv").exists());
}

#[test]
fn family_demo_emits_valid_svg_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    // a short run: this test checks artifacts, not convergence
    let result = cmd_family_demo(&FamilyDemoArgs {
        out_dir: dir.path().to_path_buf(),
        epochs: 30,
        learning_rate: 1e-3,
        seed: 1,
    })
    .unwrap();
    assert!(result.checkpoint.exists());

    let svg = std::fs::read_to_string(dir.path().join("family.svg")).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<rect ").count(), 7); // one box per concept
    assert_eq!(svg.matches("</svg>").count(), 1);
    for name in ["Person", "Male", "Female", "Father", "Mother", "Parent", "Top"] {
        assert!(svg.contains(name), "missing label {name}");
    }

    let csv = std::fs::read_to_string(dir.path().join("boxes.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8); // header + 7 concepts
    assert!(csv.starts_with("concept,center_x,center_y,offset_x,offset_y"));

    assert_eq!(manifest(dir.path())["command"], "family-demo");
}
