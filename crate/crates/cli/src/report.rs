use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use crate::verify::VerdictDoc;

#[derive(Args)]
pub struct ReportArgs {
    /// Verdict documents written by `verify`.
    pub verdicts: Vec<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Default)]
struct Row {
    frames: usize,
    first_ms: Vec<f64>,
    subsequent_ms: f64,
    subsequent: usize,
    cache_hits: usize,
    tp: usize,
    tn: usize,
    fp: usize,
    fn_: usize,
}

impl Row {
    fn add(&mut self, d: &VerdictDoc) {
        let frames = &d.report.frames;
        self.frames += frames.len();
        if let Some(f) = frames.first() {
            self.first_ms.push(f.latency_ms);
        }
        for f in frames.iter().skip(1) {
            self.subsequent_ms += f.latency_ms;
            self.subsequent += 1;
        }
        self.cache_hits += frames.iter().filter(|f| f.frame_cache_hit).count();
        // An attack is the positive class; refusing to sign is a positive call.
        match (d.expected_intended, d.signed) {
            (Some(false), false) => self.tp += 1,
            (Some(true), true) => self.tn += 1,
            (Some(true), false) => self.fp += 1,
            (Some(false), true) => self.fn_ += 1,
            (None, _) => {}
        }
    }
}

fn mean(sum: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn write_csv(docs: &[VerdictDoc], out: impl Write) -> Result<()> {
    let mut rows: BTreeMap<&str, Row> = BTreeMap::new();
    for d in docs {
        rows.entry(d.corpus.as_str()).or_default().add(d);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["corpus", "frames", "first_frame_ms", "mean_subsequent_ms", "cache_hit_rate", "tp", "tn", "fp", "fn"])?;
    for (corpus, r) in rows {
        w.write_record([
            corpus.to_string(),
            r.frames.to_string(),
            format!("{:.3}", mean(r.first_ms.iter().sum(), r.first_ms.len())),
            format!("{:.3}", mean(r.subsequent_ms, r.subsequent)),
            format!("{:.3}", mean(r.cache_hits as f64, r.frames)),
            r.tp.to_string(),
            r.tn.to_string(),
            r.fp.to_string(),
            r.fn_.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: ReportArgs) -> Result<()> {
    let docs = args
        .verdicts
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect::<Result<Vec<VerdictDoc>>>()?;
    match &args.out {
        Some(p) => write_csv(&docs, fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => write_csv(&docs, std::io::stdout().lock()),
    }
}
