//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for each,
//! and exits non-zero if any failed.

use std::collections::{BTreeSet, HashSet};
use std::fs::{self, File};
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tct_cli::config::{Overrides, RunConfig};
use tct_cli::demo::{write_dataset_jsonl, write_demo, DemoKind, GENDEREDNESS_KEY, PLANTED};
use tct_cli::{run_analyze, run_compute};
use tct_core::analysis::{fit_logistic, score_buckets, LogisticParams, MissingPolicy};
use tct_core::corpus::{attach_outcomes, load_outcomes, AnalysisFrame, OutcomeKind, OutcomeSeries};
use tct_core::lexicons::Lexicons;
use tct_core::metrics::diversity::{hdd_of, mtld_of};
use tct_core::metrics::{CharacteristicsTable, MetricRegistry, Selection};
use tct_core::synth;
use tempfile::TempDir;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("throughput: 20,000 paragraphs in under 60 s", throughput),
        ("lexical diversity matches brute-force oracles", diversity_oracles),
        ("readability of \"The cat sat.\"", readability),
        ("planted length/concreteness outcome is recovered", planted_logistic),
        ("genderedness difference degrades the bucket curve", genderedness),
        ("compute + analyze are byte-deterministic", determinism),
        ("logistic fit is a stationary point", logistic_optimality),
        ("default registry exposes exactly the 61 table keys", metric_keys),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------- helpers ----------

fn load(config: &Path, overrides: Overrides) -> RunConfig {
    RunConfig::load(config, &overrides).expect("config loads")
}

fn demo_dir(kind: DemoKind, dir: &Path, seed: u64, records: usize) -> PathBuf {
    write_demo(kind, dir, seed, records).expect("demo written");
    dir.join("tct.toml")
}

fn frame_from(csv: &Path, outcomes: &Path) -> AnalysisFrame {
    let table = CharacteristicsTable::read_csv(BufReader::new(File::open(csv).unwrap()), "characteristics").unwrap();
    attach_outcomes(&table, &load_outcomes(outcomes).unwrap(), &[]).unwrap()
}

// ---------- 1. throughput ----------

fn throughput() -> Outcome {
    let dir = TempDir::new().unwrap();
    let gen_start = Instant::now();
    let corpus = synth::paragraph_corpus(2024, 20_000, 100);
    write_dataset_jsonl(&corpus, &dir.path().join("paragraphs.jsonl")).unwrap();
    let generation = gen_start.elapsed().as_secs_f64();
    let words: usize = corpus
        .records
        .iter()
        .map(|r| r.fragments["text"].split_whitespace().count())
        .sum();
    fs::write(
        dir.path().join("tct.toml"),
        "[dataset]\npath = \"paragraphs.jsonl\"\nid_field = \"id\"\n\n[[fragment]]\nname = \"text\"\nfields = [\"text\"]\n",
    )
    .unwrap();
    let config = load(&dir.path().join("tct.toml"), Overrides::default());
    let start = Instant::now();
    let summary = run_compute(&config).map_err(|e| e.to_string())?;
    let seconds = start.elapsed().as_secs_f64();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    ensure!(summary.records == 20_000, "{} records computed", summary.records);
    ensure!(summary.skipped.is_empty(), "{} records skipped", summary.skipped.len());
    ensure!(
        seconds < 60.0,
        "{seconds:.1} s for 20,000 paragraphs on {cores} core(s)"
    );
    Ok(format!(
        "{seconds:.1} s ({:.0} fragments/s, {:.0} words/paragraph, {cores} core(s), generation {generation:.1} s)",
        20_000.0 / seconds,
        words as f64 / 20_000.0
    ))
}

// ---------- 2. lexical diversity ----------

/// MTLD by rescanning each factor from scratch at every token.
fn mtld_naive(tokens: &[u32], threshold: f64) -> Option<f64> {
    fn pass(tokens: &[u32], threshold: f64) -> f64 {
        let mut factors = 0.0;
        let mut start = 0;
        let mut end = 0;
        while end < tokens.len() {
            end += 1;
            let segment = &tokens[start..end];
            let distinct = segment.iter().collect::<HashSet<_>>().len();
            if (distinct as f64 / segment.len() as f64) < threshold {
                factors += 1.0;
                start = end;
            }
        }
        if start < tokens.len() {
            let segment = &tokens[start..];
            let distinct = segment.iter().collect::<HashSet<_>>().len();
            factors += (1.0 - distinct as f64 / segment.len() as f64) / (1.0 - threshold);
        }
        factors
    }
    if tokens.is_empty() {
        return None;
    }
    let reversed: Vec<u32> = tokens.iter().rev().copied().collect();
    let (f, b) = (pass(tokens, threshold), pass(&reversed, threshold));
    if f == 0.0 || b == 0.0 {
        return None;
    }
    let n = tokens.len() as f64;
    Some((n / f + n / b) / 2.0)
}

/// HD-D by enumerating every size-`s` subset of token positions and
/// counting, per type, the subsets that contain it.
fn hdd_exhaustive(tokens: &[u32], s: usize) -> Option<f64> {
    let n = tokens.len();
    if n < s {
        return None;
    }
    let types: BTreeSet<u32> = tokens.iter().copied().collect();
    let mut total = 0u64;
    let mut hits = vec![0u64; types.len()];
    let index: Vec<usize> = tokens
        .iter()
        .map(|t| types.iter().position(|u| u == t).unwrap())
        .collect();
    let mut pick: Vec<usize> = (0..s).collect();
    loop {
        total += 1;
        let mut seen = vec![false; types.len()];
        for &p in &pick {
            seen[index[p]] = true;
        }
        for (h, s) in hits.iter_mut().zip(seen) {
            *h += u64::from(s);
        }
        // Next combination in lexicographic order.
        let mut i = s;
        loop {
            if i == 0 {
                let sum: f64 = hits.iter().map(|&h| h as f64 / total as f64).sum();
                return Some(sum / s as f64);
            }
            i -= 1;
            if pick[i] != i + n - s {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..s {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

fn diversity_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);
    let mut worst_mtld = 0.0f64;
    let mut worst_hdd = 0.0f64;
    let mut defined = 0;
    for case in 0..200 {
        let alphabet = rng.gen_range(1..=12u32);
        let len = rng.gen_range(1..=160usize);
        let tokens: Vec<u32> = (0..len).map(|_| rng.gen_range(0..alphabet)).collect();
        let (got, want) = (mtld_of(&tokens, 0.72), mtld_naive(&tokens, 0.72));
        match (got, want) {
            (Some(a), Some(b)) => {
                worst_mtld = worst_mtld.max((a - b).abs());
                defined += 1;
            }
            (None, None) => {}
            _ => return Err(format!("MTLD case {case}: {got:?} vs oracle {want:?}")),
        }

        let short = rng.gen_range(5..=16usize);
        let tokens: Vec<u32> = (0..short).map(|_| rng.gen_range(0..alphabet.max(2))).collect();
        let (got, want) = (hdd_of(&tokens, 5), hdd_exhaustive(&tokens, 5));
        match (got, want) {
            (Some(a), Some(b)) => worst_hdd = worst_hdd.max((a - b).abs()),
            _ => return Err(format!("HD-D case {case}: {got:?} vs oracle {want:?}")),
        }
    }
    ensure!(worst_mtld < 1e-9, "MTLD max deviation {worst_mtld:e}");
    ensure!(worst_hdd < 1e-9, "HD-D max deviation {worst_hdd:e}");

    // Closed forms, through the full metric suite.
    let set = MetricRegistry::with_defaults()
        .initialize(&Lexicons::bundled().unwrap(), &Selection::Keys(vec!["LDMTLD".into(), "LDHDD".into()]))
        .unwrap();
    let eight = vec!["cat"; 8].join(" ");
    let mtld = set.compute_text(&eight)[set.keys().iter().position(|k| k == "LDMTLD").unwrap()].value;
    ensure!(mtld == Some(2.0), "MTLD(8 identical) = {mtld:?}");
    let forty_two = vec!["cat"; 42].join(" ");
    let hdd = set.compute_text(&forty_two)[set.keys().iter().position(|k| k == "LDHDD").unwrap()].value;
    ensure!(
        hdd.is_some_and(|h| (h - 1.0 / 42.0).abs() < 1e-12),
        "HDD(42 identical) = {hdd:?}"
    );
    Ok(format!(
        "200 sequences, max |Δ| MTLD {worst_mtld:.1e} ({defined} defined), HD-D {worst_hdd:.1e}; MTLD(8×) = 2, HDD(42×) = 1/42"
    ))
}

// ---------- 3. readability ----------

fn readability() -> Outcome {
    let set = MetricRegistry::with_defaults()
        .initialize(&Lexicons::bundled().unwrap(), &Selection::Keys(vec!["RDFRE".into(), "READFKGL".into()]))
        .unwrap();
    let cells = set.compute_text("The cat sat.");
    let value = |key: &str| cells[set.keys().iter().position(|k| k == key).unwrap()].value;
    let (fre, fkgl) = (value("RDFRE").ok_or("RDFRE missing")?, value("READFKGL").ok_or("READFKGL missing")?);
    let (fre, fkgl) = (format!("{fre:.2}"), format!("{fkgl:.2}"));
    ensure!(fre == "119.19" && fkgl == "-2.62", "RDFRE {fre}, READFKGL {fkgl}");
    Ok(format!("RDFRE {fre}, READFKGL {fkgl}"))
}

// ---------- 4. planted logistic ----------

fn planted_logistic() -> Outcome {
    let dir = TempDir::new().unwrap();
    let config = load(&demo_dir(DemoKind::LengthConcreteness, dir.path(), 11, 5000), Overrides::default());
    let summary = run_compute(&config).map_err(|e| e.to_string())?;
    let frame = frame_from(&summary.output, &dir.path().join("outcomes.csv"));
    ensure!(frame.len() == 5000, "{} rows joined", frame.len());
    let features: Vec<String> = PLANTED.iter().map(|(k, _)| format!("text.{k}")).collect();
    let model = fit_logistic(&frame, "correct", &features, &LogisticParams::default()).map_err(|e| e.to_string())?;
    let (len_w, conc_w) = (model.coefficient(&features[0]).unwrap(), model.coefficient(&features[1]).unwrap());
    ensure!(len_w > 0.0 && conc_w < 0.0, "signs wrong: {len_w:.3}, {conc_w:.3}");
    let ratio = len_w.abs() / conc_w.abs();
    let planted = PLANTED[0].1.abs() / PLANTED[1].1.abs();
    ensure!(
        (ratio / planted - 1.0).abs() <= 0.2,
        "ratio {ratio:.3} vs planted {planted:.3}"
    );
    let curve = score_buckets(&model, &frame, 100).map_err(|e| e.to_string())?;
    let spread = curve.spread().ok_or("no score buckets")?;
    ensure!(spread >= 0.3, "held-out score spread {spread:.3}");
    Ok(format!(
        "coefficients {len_w:.3} / {conc_w:.3}, ratio {ratio:.3} (planted {planted:.3}), held-out spread {spread:.2} over {} buckets",
        curve.points.len()
    ))
}

// ---------- 5. genderedness ----------

fn genderedness() -> Outcome {
    let dir = TempDir::new().unwrap();
    let config = load(&demo_dir(DemoKind::Coref, dir.path(), 5, 4000), Overrides::default());
    run_compute(&config).map_err(|e| e.to_string())?;
    let result = run_analyze(&config).map_err(|e| e.to_string())?;
    let metric = format!("|occupation-pronoun|.{GENDEREDNESS_KEY}");
    let curve = result
        .report
        .bucket_curves
        .iter()
        .find(|c| c.metric == metric)
        .ok_or_else(|| format!("no bucket curve for {metric}"))?;
    let slope = curve.slope().ok_or("slope undefined")?;
    let first = curve.points.first().unwrap();
    let last = curve.points.last().unwrap();
    let drop = first.outcome_mean - last.outcome_mean;
    ensure!(slope < 0.0, "slope {slope}");
    ensure!(drop >= 0.1, "accuracy drop {drop:.3}");
    Ok(format!(
        "slope {slope:.5} per unit, accuracy {:.2} → {:.2} (drop {drop:.2}) across {} buckets",
        first.outcome_mean,
        last.outcome_mean,
        curve.points.len()
    ))
}

// ---------- 6. determinism ----------

fn artifacts(out_dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = vec![(
        "characteristics.csv".to_string(),
        fs::read(out_dir.join("characteristics.csv")).unwrap(),
    )];
    let report = out_dir.join("report");
    let mut names: Vec<String> = fs::read_dir(&report)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".svg") || n == "report.json")
        .collect();
    names.sort();
    for n in names {
        let bytes = fs::read(report.join(&n)).unwrap();
        files.push((n, bytes));
    }
    files
}

fn full_run(dir: &Path, workers: usize) -> Vec<(String, Vec<u8>)> {
    let config = load(
        &dir.join("tct.toml"),
        Overrides {
            workers: Some(workers),
            ..Overrides::default()
        },
    );
    run_compute(&config).unwrap();
    run_analyze(&config).unwrap();
    artifacts(&config.out_dir)
}

fn determinism() -> Outcome {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    demo_dir(DemoKind::LengthConcreteness, a.path(), 21, 1500);
    demo_dir(DemoKind::LengthConcreteness, b.path(), 21, 1500);
    let first = full_run(a.path(), 1);
    let second = full_run(b.path(), 8);
    ensure!(first.len() >= 3, "only {} artifacts", first.len());
    let names = |v: &[(String, Vec<u8>)]| v.iter().map(|f| f.0.clone()).collect::<Vec<_>>();
    ensure!(names(&first) == names(&second), "file sets differ");
    for ((name, x), (_, y)) in first.iter().zip(&second) {
        ensure!(x == y, "{name} differs between runs (workers 1 vs 8)");
    }
    let third = full_run(a.path(), 8);
    ensure!(first == third, "rerun in place differs");
    Ok(format!(
        "{} files byte-identical across two directories and worker counts 1 and 8",
        first.len()
    ))
}

// ---------- 7. logistic optimality ----------

/// Penalised log-likelihood written out directly: Σ log p(yᵢ) − λ/2·‖w₁..‖².
fn objective(x: &[Vec<f64>], y: &[f64], w: &[f64], lambda: f64) -> f64 {
    let mut ll = 0.0;
    for (row, &t) in x.iter().zip(y) {
        let z = w[0] + row.iter().zip(&w[1..]).map(|(a, b)| a * b).sum::<f64>();
        // log σ(z) = −log(1 + e^{−z}), evaluated without overflow.
        let log_p = -(if z > 0.0 { (-z).exp().ln_1p() } else { -z + z.exp().ln_1p() });
        let log_q = -(if z < 0.0 { z.exp().ln_1p() } else { z + (-z).exp().ln_1p() });
        ll += t * log_p + (1.0 - t) * log_q;
    }
    ll - 0.5 * lambda * w[1..].iter().map(|v| v * v).sum::<f64>()
}

fn logistic_optimality() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.gen_range(150..400);
        let d = rng.gen_range(1..=5);
        let truth: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let scales: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..50.0)).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| scales.iter().map(|s| rng.gen_range(-1.0..1.0) * s).collect())
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| {
                let z: f64 = r.iter().zip(&truth).zip(&scales).map(|((v, w), s)| v / s * w).sum();
                f64::from(rng.gen_bool(1.0 / (1.0 + (-z).exp())))
            })
            .collect();
        let names: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
        let mut outcomes = std::collections::BTreeMap::new();
        outcomes.insert("y".to_string(), OutcomeSeries { kind: OutcomeKind::Binary, values: y.clone() });
        let frame = AnalysisFrame {
            row_ids: (0..n).map(|i| format!("r{i:04}")).collect(),
            features: names
                .iter()
                .enumerate()
                .map(|(j, k)| (k.clone(), rows.iter().map(|r| Some(r[j])).collect()))
                .collect(),
            outcomes,
            dropped: 0,
            warnings: Vec::new(),
        };
        let lambda = [0.0, 0.1, 1.0, 10.0][(seed % 4) as usize];
        let params = LogisticParams {
            l2: lambda,
            seed,
            missing: MissingPolicy::Listwise,
            ..LogisticParams::default()
        };
        let model = fit_logistic(&frame, "y", &names, &params).map_err(|e| format!("seed {seed}: {e}"))?;
        let scaler = model.scaler.as_ref().ok_or("no scaler")?;
        let test: HashSet<&str> = model.test_ids.iter().map(String::as_str).collect();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (i, id) in frame.row_ids.iter().enumerate() {
            if !test.contains(id.as_str()) {
                xs.push(scaler.transform(&rows[i]));
                ys.push(y[i]);
            }
        }
        let mut w = vec![model.intercept.unwrap()];
        w.extend(&model.coefficients);
        let h = 1e-5;
        for j in 0..w.len() {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[j] += h;
            down[j] -= h;
            let g = (objective(&xs, &ys, &up, lambda) - objective(&xs, &ys, &down, lambda)) / (2.0 * h);
            worst = worst.max(g.abs());
        }
    }
    ensure!(worst < 1e-6, "max finite-difference gradient {worst:e}");
    Ok(format!("20 datasets, max |∂/∂w| by central differences {worst:.1e}"))
}

// ---------- 8. metric keys ----------

const TABLE_KEYS: [&str; 61] = [
    "DESPC", "DESSC", "DESWC", "DESPL", "DESPLd", "DESPLw", "DESSL", "DESSLd", "DESWLsy", "DESWLsyd",
    "DESWLlt", "DESWLltd", "LDTTRc", "LDTTRa", "LDMTLD", "LDHDD", "SYNLE", "SYNNP", "SYNMEDpos",
    "SYNMEDwrd", "SYNMEDlem", "SYNSTRUTa", "SYNSTRUTt", "RDFRE", "READFKGL",
    "TOKEN_ATTRIBUTE_RATIO_ALHPA", "TOKEN_ATTRIBUTE_RATIO_DIGIT", "TOKEN_ATTRIBUTE_RATIO_PUNCT",
    "TOKEN_ATTRIBUTE_RATIO_URL", "TOKEN_ATTRIBUTE_RATIO_EMAIL", "WORD_SET_INCIDENCE_WRDPRP1s",
    "WORD_SET_INCIDENCE_WRDPRP1p", "WORD_SET_INCIDENCE_WRDPRP2", "WORD_SET_INCIDENCE_WRDPRP3s",
    "WORD_SET_INCIDENCE_WRDPRP3p", "WORD_SET_INCIDENCE_CNCCaus", "WORD_SET_INCIDENCE_CNCLogic",
    "WORD_SET_INCIDENCE_CNCTemp", "WORD_SET_INCIDENCE_CNCAdd", "WORD_SET_INCIDENCE_CNCPos",
    "WORD_SET_INCIDENCE_CNCNeg", "WORD_PROPERTY_WRDNOUN", "WORD_PROPERTY_WRDVERB", "WORD_PROPERTY_WRDADJ",
    "WORD_PROPERTY_WRDADV", "WORD_PROPERTY_WRDFRQc", "WORD_PROPERTY_WRDFRQa", "WORD_PROPERTY_WRDFRQmc",
    "WORD_PROPERTY_WRDFAMc", "WORD_PROPERTY_WRDCNCc", "WORD_PROPERTY_WRDIMGc", "WORD_PROPERTY_WRDMEAc",
    "WORD_PROPERTY_WRDPOLc", "WORD_PROPERTY_WRDHYPn", "WORD_PROPERTY_WRDHYPv", "WORD_PROPERTY_WRDHYPnv",
    "WORD_PROPERTY_AOA", "WORD_PROPERTY_AOA_MAX", "WORD_PROPERTY_CONCRETENESS", "WORD_PROPERTY_PREVALENCE",
    "WORD_PROPERTY_PREVALENCE_MIN",
];

fn metric_keys() -> Outcome {
    let registry = MetricRegistry::with_defaults();
    let got: BTreeSet<&str> = registry.keys().collect();
    let want: BTreeSet<&str> = TABLE_KEYS.into_iter().collect();
    let extra: Vec<&&str> = got.difference(&want).collect();
    let missing: Vec<&&str> = want.difference(&got).collect();
    ensure!(
        extra.is_empty() && missing.is_empty() && registry.len() == 61,
        "extra {extra:?}, missing {missing:?}"
    );
    let set = registry.initialize(&Lexicons::bundled().unwrap(), &Selection::All).unwrap();
    ensure!(set.keys().len() == 61, "{} initialised", set.keys().len());
    Ok("61 keys, all initialise against the bundled lexicons".into())
}
