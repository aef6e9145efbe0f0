//! Synthetic demo datasets with planted outcomes, plus ready-to-run configs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use tct_core::corpus::{FragmentSet, OutcomeColumn, OutcomeKind};
use tct_core::lexicons::Lexicons;
use tct_core::metrics::{Aggregate, MetricRegistry, MetricSpec, Selection, WordPropertyDef, WordSelection};
use tct_core::synth::{self, PlantedDemo};

use crate::CliError;

/// Weights planted on z-scored characteristics in the length/concreteness demo.
pub const PLANTED: [(&str, f64); 2] = [("DESWC", 2.0), ("WORD_PROPERTY_CONCRETENESS", -1.5)];

pub const GENDEREDNESS_KEY: &str = "GENDEREDNESS";

/// Accuracy of the coreference demo when the occupation and pronoun agree
/// perfectly, and its decline per unit of |genderedness difference|.
pub const COREF_BASE_ACCURACY: f64 = 0.9;
pub const COREF_ACCURACY_DROP: f64 = 0.5;

pub fn genderedness_property() -> WordPropertyDef {
    WordPropertyDef::new(GENDEREDNESS_KEY, "genderedness", Aggregate::Mean, WordSelection::All)
}

/// Records whose binary `correct` outcome follows
/// `sigmoid(2·z(DESWC) − 1.5·z(WORD_PROPERTY_CONCRETENESS))`.
pub fn length_concreteness_demo(seed: u64, n: usize, lexicons: &Lexicons) -> Result<PlantedDemo, CliError> {
    Ok(synth::planted_logistic_demo(seed, n, lexicons, &PLANTED, "correct")?)
}

/// Coreference-style records (occupation span, pronoun span, sentence) whose
/// `correct` outcome becomes less likely as the two spans' genderedness diverges.
pub fn coref_demo(seed: u64, n: usize, lexicons: &Lexicons) -> Result<PlantedDemo, CliError> {
    let db = lexicons
        .database("genderedness")
        .ok_or_else(|| CliError::Validation("no `genderedness` database is loaded".into()))?;
    let occupations: Vec<String> = db.words().into_iter().map(str::to_string).collect();
    let examples = synth::coref_examples(seed, n, &occupations);
    let fragments = synth::coref_fragments(&examples);

    let mut registry = MetricRegistry::empty();
    registry.register(MetricSpec::word_property(genderedness_property()))?;
    let set = registry.initialize(lexicons, &Selection::All)?;
    let score = |text: &str| set.compute_text(text)[0].value;
    let probs: Vec<f64> = examples
        .iter()
        .map(|e| {
            let diff = match (score(&e.occupation), score(&e.pronoun)) {
                (Some(a), Some(b)) => (a - b).abs(),
                _ => 0.0,
            };
            COREF_BASE_ACCURACY - COREF_ACCURACY_DROP * diff / 100.0
        })
        .collect();
    let y = synth::bernoulli(&probs, seed ^ 0xC0EF);
    let outcome = OutcomeColumn::new("correct", OutcomeKind::Binary, examples.iter().map(|e| e.id.clone()).zip(y))?;
    Ok(PlantedDemo {
        fragments,
        outcome,
        planted: vec![(format!("|occupation-pronoun|.{GENDEREDNESS_KEY}"), -COREF_ACCURACY_DROP)],
    })
}

/// Writes one JSON object per record: `id` plus one field per fragment.
pub fn write_dataset_jsonl(fragments: &FragmentSet, path: &Path) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Row<'a> {
        id: &'a str,
        #[serde(flatten)]
        fields: &'a BTreeMap<String, String>,
    }
    let file = File::create(path).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    for r in &fragments.records {
        let line = serde_json::to_string(&Row { id: &r.id, fields: &r.fragments })
            .map_err(|e| CliError::Internal(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| CliError::Internal(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Internal(e.to_string()))
}

pub fn write_outcomes_csv(outcome: &OutcomeColumn, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["id", outcome.name.as_str()])?;
    for (id, v) in &outcome.values {
        w.write_record([id.as_str(), &v.to_string()])?;
    }
    w.flush().map_err(|e| CliError::Internal(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DemoKind {
    /// Outcome planted on text length and concreteness.
    LengthConcreteness,
    /// Outcome degrading with occupation/pronoun genderedness difference.
    Coref,
}

fn config_text(kind: DemoKind, seed: u64) -> String {
    match kind {
        DemoKind::LengthConcreteness => format!(
            r#"# Synthetic demo: the outcome depends on length (+) and concreteness (-).
seed = {seed}
out_dir = "out"
bucket_size = 100

[dataset]
path = "dataset.jsonl"
id_field = "id"

[[fragment]]
name = "text"
fields = ["text"]

[analyze]
outcomes = "outcomes.csv"
outcome = "correct"
features = ["text.DESWC", "text.WORD_PROPERTY_CONCRETENESS", "text.DESSL", "text.LDTTRc"]
bucket_metrics = ["text.DESWC", "text.WORD_PROPERTY_CONCRETENESS"]

[analyze.forest]
n_trees = 50
"#
        ),
        DemoKind::Coref => format!(
            r#"# Synthetic demo: accuracy drops as occupation and pronoun genderedness diverge.
seed = {seed}
out_dir = "out"
bucket_size = 100

[dataset]
path = "dataset.jsonl"
id_field = "id"

[[fragment]]
name = "occupation"
fields = ["occupation"]

[[fragment]]
name = "pronoun"
fields = ["pronoun"]

[[word_property]]
key = "{GENDEREDNESS_KEY}"
database = "genderedness"

[metrics]
select = ["{GENDEREDNESS_KEY}", "DESWC"]

[analyze]
outcomes = "outcomes.csv"
outcome = "correct"
analyses = ["distributions", "buckets", "logistic"]
features = ["|occupation-pronoun|.{GENDEREDNESS_KEY}"]

[[analyze.derived]]
kind = "abs_difference"
metric = "{GENDEREDNESS_KEY}"
a = "occupation"
b = "pronoun"
"#
        ),
    }
}

/// Writes `dataset.jsonl`, `outcomes.csv` and `tct.toml` into `dir`.
pub fn write_demo(kind: DemoKind, dir: &Path, seed: u64, records: usize) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
    let lexicons = Lexicons::from_env()?;
    let demo = match kind {
        DemoKind::LengthConcreteness => length_concreteness_demo(seed, records, &lexicons)?,
        DemoKind::Coref => coref_demo(seed, records, &lexicons)?,
    };
    write_dataset_jsonl(&demo.fragments, &dir.join("dataset.jsonl"))?;
    write_outcomes_csv(&demo.outcome, &dir.join("outcomes.csv"))?;
    std::fs::write(dir.join("tct.toml"), config_text(kind, seed))
        .map_err(|e| CliError::Internal(format!("cannot write config: {e}")))?;
    log::info!("wrote demo ({} records) to {}", records, dir.display());
    Ok(())
}
