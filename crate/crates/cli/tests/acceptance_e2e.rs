//! End-to-end acceptance for the binary: full-report determinism, published
//! row counts, and the documented exit codes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn fiqs() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fiqs"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = fiqs().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "fiqs {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

const STATE_NAMES: [&str; 50] = [
    "Alabama",
    "Alaska",
    "Arizona",
    "Arkansas",
    "California",
    "Colorado",
    "Connecticut",
    "Delaware",
    "Florida",
    "Georgia",
    "Hawaii",
    "Idaho",
    "Illinois",
    "Indiana",
    "Iowa",
    "Kansas",
    "Kentucky",
    "Louisiana",
    "Maine",
    "Maryland",
    "Massachusetts",
    "Michigan",
    "Minnesota",
    "Mississippi",
    "Missouri",
    "Montana",
    "Nebraska",
    "Nevada",
    "New Hampshire",
    "New Jersey",
    "New Mexico",
    "New York",
    "North Carolina",
    "North Dakota",
    "Ohio",
    "Oklahoma",
    "Oregon",
    "Pennsylvania",
    "Rhode Island",
    "South Carolina",
    "South Dakota",
    "Tennessee",
    "Texas",
    "Utah",
    "Vermont",
    "Virginia",
    "Washington",
    "West Virginia",
    "Wisconsin",
    "Wyoming",
];

/// Deterministic 500-entry corpus: ten entries for each of the 50 states,
/// themed word pools per planted topic, answer lengths straddling the
/// summarization window, and a few shared questions across states.
fn write_synthetic_corpus(path: &Path) {
    let pools: [&[&str]; 4] = [
        &[
            "register",
            "registration",
            "deadline",
            "form",
            "county",
            "clerk",
            "application",
            "address",
        ],
        &[
            "absentee",
            "ballot",
            "mail",
            "return",
            "envelope",
            "signature",
            "request",
            "postmark",
        ],
        &[
            "polling", "place", "location", "hours", "precinct", "machine", "line", "curbside",
        ],
        &[
            "identification",
            "photo",
            "license",
            "document",
            "proof",
            "residency",
            "card",
            "passport",
        ],
    ];
    let fill = [
        "voters",
        "official",
        "provide",
        "submit",
        "information",
        "process",
        "complete",
        "available",
        "online",
        "website",
        "local",
        "days",
        "election",
        "state",
        "review",
    ];
    let mut rng = StdRng::seed_from_u64(2024);
    let mut records = Vec::new();
    for (si, state) in STATE_NAMES.iter().enumerate() {
        for i in 0..10 {
            let pool = pools[(si + i) % 4];
            let question = if i == 0 {
                // shared phrasing across states, with a local token keeping
                // the vectors just shy of identical
                format!("Who can register to vote in {state}?")
            } else {
                format!(
                    "How does the {} {} rule work in area {i}?",
                    pool[i % pool.len()],
                    pool[(i + 1) % pool.len()]
                )
            };
            let sentence_count = 3 + (i % 5) * 2;
            let mut sentences = Vec::new();
            for s in 0..sentence_count {
                let mut words = Vec::new();
                for w in 0..9 {
                    let from_pool = (s + w) % 3 != 0;
                    let word = if from_pool {
                        pool[rng.gen_range(0..pool.len())]
                    } else {
                        fill[rng.gen_range(0..fill.len())]
                    };
                    words.push(word);
                }
                sentences.push(format!("{}.", words.join(" ")));
            }
            let answer = sentences.join(" ");
            records.push(format!(
                r#"{{"state": "{state}", "contributor": "{}", "timestamp": "2024-11-0{} 12:00:00", "question": "{question}", "answer": "{answer}"}}"#,
                if i % 3 == 0 { "non_profit" } else { "official" },
                (i % 9) + 1,
            ));
        }
    }
    // one verbatim duplicate so the removal log has content
    let copy = records[0].clone();
    records.insert(1, copy);
    fs::write(path, format!("[\n{}\n]\n", records.join(",\n"))).unwrap();
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for item in fs::read_dir(dir).unwrap() {
        let path = item.unwrap().path();
        files.insert(
            path.file_name().unwrap().to_string_lossy().into_owned(),
            fs::read(&path).unwrap(),
        );
    }
    files
}

fn data_rows(dir: &Path, name: &str) -> usize {
    let text = fs::read_to_string(dir.join(name)).unwrap();
    text.lines().count().saturating_sub(1)
}

#[test]
fn c09_report_runs_are_byte_identical_and_fast() {
    let workdir = tempfile::tempdir().unwrap();
    let corpus = workdir.path().join("corpus.json");
    write_synthetic_corpus(&corpus);
    let out: PathBuf = workdir.path().join("out");

    let started = Instant::now();
    run_ok(&[
        "report",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let first_run = started.elapsed();
    assert!(first_run.as_secs() < 120, "report took {first_run:?}");
    let first = snapshot(&out);
    assert!(
        first.len() >= 20,
        "expected a full report, got {:?}",
        first.keys()
    );

    // second run into the same directory, capped to two worker threads to
    // show the reduction order is thread-count independent
    let started = Instant::now();
    let output = fiqs()
        .env("FIQS_THREADS", "2")
        .args([
            "report",
            "--input",
            corpus.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let second_run = started.elapsed();
    assert!(
        second_run.as_secs() < 120,
        "second report took {second_run:?}"
    );
    let second = snapshot(&out);

    assert_eq!(first.len(), second.len());
    for (name, bytes) in &first {
        assert_eq!(bytes, &second[name], "{name} differs between runs");
    }

    // the planted duplicate lands in the removal log with its state
    let removals = fs::read_to_string(out.join("removals.csv")).unwrap();
    let removal_lines: Vec<&str> = removals.lines().collect();
    assert_eq!(removal_lines.len(), 2, "one removal expected: {removals}");
    assert_eq!(removal_lines[1], "AL,0,1,1.000");

    // every per-state table carries all 50 states
    for name in [
        "stats.csv",
        "readability_q.csv",
        "readability_a.csv",
        "readability_qa.csv",
        "summary_answer.csv",
        "summary_question.csv",
        "sentiment_q.csv",
        "sentiment_a.csv",
        "sentiment_qa.csv",
        "specificity.csv",
        "state_topics.csv",
        "topic_heatmap.csv",
        "state_topic_scores.csv",
        "components.csv",
        "scorecard.csv",
    ] {
        assert_eq!(data_rows(&out, name), 50, "{name} row count");
    }
    assert_eq!(data_rows(&out, "topic_summary.csv"), 8);

    println!(
        "PASS c09 end-to-end determinism: {} files byte-identical across runs ({first_run:?} + {second_run:?})",
        first.len()
    );
}

#[test]
fn score_without_predictions_leaves_developer_blank() {
    let workdir = tempfile::tempdir().unwrap();
    let corpus = workdir.path().join("corpus.json");
    write_synthetic_corpus(&corpus);
    let out = workdir.path().join("out");
    let output = run_ok(&[
        "score",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("developer columns are empty"),
        "note missing: {stderr}"
    );

    let scorecard = fs::read_to_string(out.join("scorecard.csv")).unwrap();
    for line in scorecard.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 5);
        assert!(!cells[1].is_empty(), "voter index present");
        assert!(cells[2].is_empty(), "developer index blank");
        assert!(cells[4].is_empty(), "developer label blank");
    }
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fiqs_stats.json")).unwrap()).unwrap();
    assert!(stats.get("developer").is_none());
    assert!(stats["note"].as_str().unwrap().contains("predictions"));
}

#[test]
fn predictions_fill_developer_columns() {
    let workdir = tempfile::tempdir().unwrap();
    let corpus = workdir.path().join("corpus.json");
    write_synthetic_corpus(&corpus);
    let out = workdir.path().join("out");
    run_ok(&[
        "ingest",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    // echo each canonical answer back as its own prediction
    let canonical: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("corpus.json")).unwrap()).unwrap();
    let predictions: Vec<serde_json::Value> = canonical
        .as_array()
        .unwrap()
        .iter()
        .enumerate()
        .map(|(id, entry)| serde_json::json!({"id": id, "prediction": entry["answer"]}))
        .collect();
    let predictions_path = workdir.path().join("predictions.json");
    fs::write(
        &predictions_path,
        serde_json::to_string(&predictions).unwrap(),
    )
    .unwrap();

    run_ok(&[
        "score",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--predictions",
        predictions_path.to_str().unwrap(),
    ]);
    let scorecard = fs::read_to_string(out.join("scorecard.csv")).unwrap();
    for line in scorecard.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert!(!cells[2].is_empty(), "developer index filled: {line}");
        assert!(!cells[4].is_empty(), "developer label filled: {line}");
    }
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fiqs_stats.json")).unwrap()).unwrap();
    assert!(stats["developer"]["std_dev"].as_f64().unwrap() >= 0.0);
}

#[test]
fn stats_on_single_entry_corpus_is_one_row() {
    let workdir = tempfile::tempdir().unwrap();
    let corpus = workdir.path().join("one.json");
    fs::write(
        &corpus,
        r#"[{"state": "Ohio", "question": "Where do I vote on election day?", "answer": "At the precinct on your registration card."}]"#,
    )
    .unwrap();
    let out = workdir.path().join("out");
    run_ok(&[
        "stats",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let stats = fs::read_to_string(out.join("stats.csv")).unwrap();
    let lines: Vec<&str> = stats.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("Ohio,0,1,"));
}

#[test]
fn exit_codes_follow_the_contract() {
    let workdir = tempfile::tempdir().unwrap();

    // unknown subcommand: usage text, exit 1
    let output = fiqs().arg("frobnicate").output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    // missing input: validation, exit 1
    let output = fiqs()
        .args(["stats", "--input", "/nonexistent.json", "--out", "o"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    // malformed JSON: data error, exit 2, message carries the byte offset
    let bad = workdir.path().join("bad.json");
    fs::write(&bad, "[{\"state\": }]").unwrap();
    let out = workdir.path().join("out");
    let output = fiqs()
        .args([
            "stats",
            "--input",
            bad.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("byte"));

    // invalid config value: exit 1
    let config = workdir.path().join("config.json");
    fs::write(&config, r#"{"dedup_threshold": 2.0}"#).unwrap();
    let output = fiqs()
        .args(["stats", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    // --help exits 0
    let output = fiqs().arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn manifest_records_config_checksums_and_outputs() {
    let workdir = tempfile::tempdir().unwrap();
    let corpus = workdir.path().join("corpus.json");
    fs::write(
        &corpus,
        r#"[{"state": "Ohio", "question": "Where do I vote?", "answer": "At your precinct."},
            {"state": "Michigan", "question": "When are polls open?", "answer": "From seven to eight."}]"#,
    )
    .unwrap();
    let out = workdir.path().join("out");
    run_ok(&[
        "stats",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["tool"], "fiqs");
    assert_eq!(manifest["subcommand"], "stats");
    assert_eq!(manifest["config"]["dedup_threshold"], 0.85);
    assert_eq!(manifest["config"]["topics"]["seed"], 42);
    let checksum = manifest["inputs"][corpus.to_str().unwrap()]
        .as_str()
        .unwrap();
    assert!(checksum.starts_with("sha256:"));
    assert_eq!(manifest["outputs"], serde_json::json!(["stats.csv"]));

    // the checksum tracks the input bytes
    fs::write(
        &corpus,
        r#"[{"state": "Ohio", "question": "Changed?", "answer": "Yes changed."}]"#,
    )
    .unwrap();
    run_ok(&[
        "stats",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let manifest2: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_ne!(manifest2["inputs"][corpus.to_str().unwrap()], checksum);
}

#[test]
fn embeddings_sidecar_drives_specificity() {
    let workdir = tempfile::tempdir().unwrap();
    let corpus = workdir.path().join("corpus.json");
    fs::write(
        &corpus,
        r#"[{"state": "Ohio", "question": "Alpha question?", "answer": "First answer."},
            {"state": "Michigan", "question": "Beta question?", "answer": "Second answer."},
            {"state": "Texas", "question": "Gamma question?", "answer": "Third answer."}]"#,
    )
    .unwrap();
    // canonical order is MI, OH, TX; give MI/OH near-identical vectors (generic
    // pair) and TX an orthogonal one (specific)
    let embeddings = workdir.path().join("vectors.json");
    fs::write(
        &embeddings,
        r#"[{"id": 0, "vector": [1.0, 0.05]}, {"id": 1, "vector": [1.0, 0.0]}, {"id": 2, "vector": [0.0, 1.0]}]"#,
    )
    .unwrap();
    let out = workdir.path().join("out");
    run_ok(&[
        "specificity",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--embeddings",
        embeddings.to_str().unwrap(),
    ]);
    let report = fs::read_to_string(out.join("specificity.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[1], "MI,1,0");
    assert_eq!(lines[2], "OH,1,0");
    assert_eq!(lines[3], "TX,0,1");
}
