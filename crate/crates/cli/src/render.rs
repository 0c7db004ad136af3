//! JSON, CSV and plain-table rendering of run results.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use interferometry::circuits::context_detectors;
use interferometry::contextuality::{A1Consistency, KcbsReport, NcBound};
use interferometry::outcome::SamplingInfo;
use interferometry::{OutcomeDistribution, Probability};
use serde_json::{json, Map, Value};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Everything one command produced, ready to render.
pub struct Report {
    experiment: String,
    backend: String,
    engine: String,
    params: Map<String, Value>,
    outcomes: BTreeMap<String, Probability>,
    sampling: Option<SamplingInfo>,
    kcbs: Option<KcbsReport>,
    segments: Option<(Vec<[Probability; 3]>, A1Consistency)>,
    oracle: Option<NcBound>,
}

/// Exact values as `"p/q"` strings, floats as JSON numbers.
fn prob_json(p: &Probability) -> Value {
    match p {
        Probability::Exact(r) => json!(format!("{}/{}", r.numer(), r.denom())),
        Probability::Float(x) => json!(x),
    }
}

fn prob_text(p: &Probability) -> String {
    match prob_json(p) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

impl Report {
    fn new(experiment: &str, backend: &str, engine: &str, params: Map<String, Value>) -> Self {
        Self {
            experiment: experiment.into(),
            backend: backend.into(),
            engine: engine.into(),
            params,
            outcomes: BTreeMap::new(),
            sampling: None,
            kcbs: None,
            segments: None,
            oracle: None,
        }
    }

    pub fn outcomes(
        experiment: &str,
        backend: &str,
        engine: &str,
        params: Map<String, Value>,
        dist: OutcomeDistribution,
    ) -> Self {
        let mut r = Self::new(experiment, backend, engine, params);
        r.sampling = dist.sampling();
        r.outcomes = dist.entries().clone();
        r
    }

    pub fn kcbs(
        backend: &str,
        engine: &str,
        params: Map<String, Value>,
        sampling: Option<SamplingInfo>,
        report: KcbsReport,
        segments: Option<(Vec<[Probability; 3]>, A1Consistency)>,
    ) -> Self {
        let mut r = Self::new("kcbs", backend, engine, params);
        for c in &report.contexts {
            let (first, second) = context_detectors(c.context).expect("five contexts");
            r.outcomes
                .insert(format!("c{}.{first}", c.context), c.p_first.clone());
            r.outcomes
                .insert(format!("c{}.{second}", c.context), c.p_second.clone());
            r.outcomes
                .insert(format!("c{}.no-click", c.context), c.p_neither.clone());
        }
        r.sampling = sampling;
        r.kcbs = Some(report);
        r.segments = segments;
        r
    }

    pub fn oracle(bound: NcBound) -> Self {
        let mut r = Self::new("oracle-kcbs-bound", "none", "exhaustive", Map::new());
        r.oracle = Some(bound);
        r
    }

    pub fn render(&self, format: Format) -> Result<String, std::fmt::Error> {
        match format {
            Format::Json => Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&self.to_json()).expect("json value")
            )),
            Format::Csv => self.to_csv(),
            Format::Table => self.to_table(),
        }
    }

    fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("experiment".into(), json!(self.experiment));
        root.insert("backend".into(), json!(self.backend));
        root.insert("engine".into(), json!(self.engine));
        root.insert("params".into(), Value::Object(self.params.clone()));
        root.insert(
            "outcomes".into(),
            self.outcomes
                .iter()
                .map(|(l, p)| (l.clone(), prob_json(p)))
                .collect::<Map<_, _>>()
                .into(),
        );
        if let Some(s) = self.sampling {
            root.insert("samples".into(), json!(s.samples));
            root.insert("seed".into(), json!(s.seed));
        }
        if let Some(k) = &self.kcbs {
            root.insert("kcbs".into(), self.kcbs_json(k));
        }
        if let Some(b) = &self.oracle {
            root.insert(
                "kcbs".into(),
                json!({
                    "minimum": b.minimum,
                    "maximum": b.maximum,
                    "minimizer": b.minimizer,
                    "minimizer_count": b.minimizer_count,
                }),
            );
        }
        Value::Object(root)
    }

    fn kcbs_json(&self, k: &KcbsReport) -> Value {
        let contexts: Vec<Value> = k
            .contexts
            .iter()
            .zip(&k.correlators)
            .map(|(c, e)| {
                let (first, second) = context_detectors(c.context).expect("five contexts");
                json!({
                    "context": c.context,
                    "detectors": [first, second],
                    "p_first": prob_json(&c.p_first),
                    "p_second": prob_json(&c.p_second),
                    "p_neither": prob_json(&c.p_neither),
                    "correlator": prob_json(e),
                })
            })
            .collect();
        let mut v = json!({
            "contexts": contexts,
            "sum": prob_json(&k.sum),
            "sum_decimal": k.sum.to_f64(),
            "noncontextual_bound": k.noncontextual_bound,
            "quantum_max": k.quantum_max,
            "classification": k.classification.to_string(),
            "a1_marginal": prob_json(&k.a1_marginal),
            "a1_prime_marginal": prob_json(&k.a1_prime_marginal),
        });
        if let Some((equal, top)) = &self.segments {
            let rows = |rows: &[[Probability; 3]]| -> Value {
                rows.iter()
                    .map(|r| r.iter().map(prob_json).collect::<Vec<_>>())
                    .collect()
            };
            v["segments"] =
                json!({ "equal_superposition": rows(equal), "top_photon": rows(&top.segments) });
            v["top_photon_bottom_exit"] = prob_json(&top.bottom_exit);
        }
        v
    }

    fn to_csv(&self) -> Result<String, std::fmt::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |fields: &[String]| w.write_record(fields).expect("in-memory csv");
        if let Some(b) = &self.oracle {
            row(&["quantity".into(), "value".into()]);
            row(&["minimum".into(), b.minimum.to_string()]);
            row(&["maximum".into(), b.maximum.to_string()]);
            row(&["minimizer_count".into(), b.minimizer_count.to_string()]);
            row(&[
                "minimizer".into(),
                b.minimizer
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            ]);
        } else if let Some(k) = &self.kcbs {
            row(&[
                "context",
                "first",
                "second",
                "p_first",
                "p_second",
                "p_neither",
                "correlator",
            ]
            .map(String::from));
            for (c, e) in k.contexts.iter().zip(&k.correlators) {
                let (first, second) = context_detectors(c.context).expect("five contexts");
                row(&[
                    c.context.to_string(),
                    first.into(),
                    second.into(),
                    prob_text(&c.p_first),
                    prob_text(&c.p_second),
                    prob_text(&c.p_neither),
                    prob_text(e),
                ]);
            }
            row(&[
                "sum".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                prob_text(&k.sum),
            ]);
        } else {
            row(&["outcome".into(), "probability".into()]);
            for (label, p) in &self.outcomes {
                row(&[label.clone(), prob_text(p)]);
            }
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv"))
    }

    fn to_table(&self) -> Result<String, std::fmt::Error> {
        let mut out = String::new();
        writeln!(
            out,
            "{} ({} backend, {} engine)",
            self.experiment, self.backend, self.engine
        )?;
        for (key, value) in &self.params {
            writeln!(
                out,
                "  {key}: {}",
                value
                    .as_str()
                    .map(String::from)
                    .unwrap_or_else(|| value.to_string())
            )?;
        }
        if let Some(s) = self.sampling {
            writeln!(out, "  samples: {}  seed: {}", s.samples, s.seed)?;
        }
        if let Some(b) = &self.oracle {
            writeln!(
                out,
                "\nminimum {}  maximum {}  minimizers {}",
                b.minimum, b.maximum, b.minimizer_count
            )?;
            writeln!(out, "first minimizer A1..A5 = {:?}", b.minimizer)?;
            return Ok(out);
        }
        if let Some(k) = &self.kcbs {
            self.kcbs_table(&mut out, k)?;
            return Ok(out);
        }
        writeln!(out)?;
        writeln!(
            out,
            "{:<20} {:>14} {:>12}",
            "outcome", "probability", "decimal"
        )?;
        for (label, p) in &self.outcomes {
            writeln!(out, "{label:<20} {:>14} {:>12.6}", prob_text(p), p.to_f64())?;
        }
        Ok(out)
    }

    fn kcbs_table(&self, out: &mut String, k: &KcbsReport) -> std::fmt::Result {
        if let Some((equal, top)) = &self.segments {
            segment_table(
                out,
                "equal superposition input, path probabilities after each splitter",
                equal,
            )?;
            segment_table(
                out,
                "top-port photon, path probabilities after each splitter",
                &top.segments,
            )?;
        }
        writeln!(
            out,
            "\n{:<8} {:<10} {:>10} {:>10} {:>10} {:>10}",
            "context", "detectors", "first", "second", "neither", "E"
        )?;
        for (c, e) in k.contexts.iter().zip(&k.correlators) {
            let (first, second) = context_detectors(c.context).expect("five contexts");
            writeln!(
                out,
                "{:<8} {:<10} {:>10} {:>10} {:>10} {:>10}",
                c.context,
                format!("{first},{second}"),
                prob_text(&c.p_first),
                prob_text(&c.p_second),
                prob_text(&c.p_neither),
                prob_text(e)
            )?;
        }
        writeln!(out, "\nsum {} ({:.6})", prob_text(&k.sum), k.sum.to_f64())?;
        writeln!(
            out,
            "noncontextual bound {}  quantum maximum {:.6}",
            k.noncontextual_bound, k.quantum_max
        )?;
        writeln!(out, "classification: {}", k.classification)
    }
}

fn segment_table(out: &mut String, title: &str, rows: &[[Probability; 3]]) -> std::fmt::Result {
    writeln!(out, "\n{title}")?;
    writeln!(
        out,
        "{:<8} {:>8} {:>8} {:>8}",
        "segment", "top", "middle", "bottom"
    )?;
    for (i, row) in rows.iter().enumerate() {
        let name = if i == 0 {
            "in".to_string()
        } else {
            format!("BS{i}")
        };
        writeln!(
            out,
            "{name:<8} {:>8} {:>8} {:>8}",
            prob_text(&row[0]),
            prob_text(&row[1]),
            prob_text(&row[2])
        )?;
    }
    Ok(())
}
