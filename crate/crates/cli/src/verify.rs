use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use trustview_core::context::HsvThresholds;
use trustview_core::engine::{run_session, EngineConfig, SessionReport};
use trustview_core::gate::{sign_request, KeyPair};
use trustview_core::manifest::{parse_request, SessionManifest};
use trustview_core::output::{OcrEngine, TemplateOcr};
use trustview_core::sampler::SamplerConfig;
use trustview_fixtures::session::GroundTruthDoc;

pub const EXIT_REJECTED: u8 = 2;

#[derive(Args)]
pub struct VerifyArgs {
    /// Session manifest (`session.json`).
    #[arg(long)]
    pub session: PathBuf,
    /// Outgoing request, one `label=value` per line.
    #[arg(long)]
    pub request: PathBuf,
    /// Private key file written by `keygen`.
    #[arg(long)]
    pub key: PathBuf,
    /// Verdict document; defaults to `verdict.json` beside the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Signed request; defaults to `signature.txt` beside the manifest.
    #[arg(long)]
    pub signature: Option<PathBuf>,
    /// Seed of the capture schedule.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_cache: bool,
    /// Validate every region of every frame instead of only changed areas.
    #[arg(long)]
    pub full_revalidate: bool,
    /// Per-channel colour tolerance, in percent of each channel's range.
    #[arg(long, default_value_t = 15.0)]
    pub hsv_threshold: f64,
    /// OCR confidence below which text is treated as unreadable.
    #[arg(long, default_value_t = 70.0)]
    pub min_confidence: f64,
    #[arg(long, default_value = "template")]
    pub ocr_engine: String,
    /// Worker threads for region validation.
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Machine-readable result of one `verify` run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub session: String,
    /// Group name used by `report`.
    pub corpus: String,
    /// From `ground_truth.json` when the session has one.
    pub expected_intended: Option<bool>,
    pub signed: bool,
    pub refusal: Option<String>,
    #[serde(flatten)]
    pub report: SessionReport,
}

fn ocr_engine(name: &str) -> Result<Arc<dyn OcrEngine>> {
    match name {
        "template" => Ok(Arc::new(TemplateOcr::new())),
        other => bail!("unknown OCR engine {other:?} (available: template)"),
    }
}

fn config(args: &VerifyArgs) -> Result<EngineConfig> {
    if !(args.hsv_threshold > 0.0 && args.hsv_threshold < 100.0) {
        bail!("--hsv-threshold must be in (0, 100), got {}", args.hsv_threshold);
    }
    if !(0.0..=100.0).contains(&args.min_confidence) {
        bail!("--min-confidence must be in [0, 100], got {}", args.min_confidence);
    }
    let mut cfg = EngineConfig {
        sampler: SamplerConfig::with_seed(args.seed),
        use_cache: !args.no_cache,
        full_revalidate: args.full_revalidate,
        jobs: args.jobs,
        ocr: ocr_engine(&args.ocr_engine)?,
        ..EngineConfig::default()
    };
    cfg.output.hsv = HsvThresholds::from_percent(args.hsv_threshold);
    cfg.output.min_confidence = args.min_confidence;
    Ok(cfg)
}

fn session_dir(manifest: &Path) -> PathBuf {
    manifest.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn run(args: VerifyArgs) -> Result<ExitCode> {
    let cfg = config(&args)?;
    let manifest = SessionManifest::load(&args.session)?;
    let request_bytes = fs::read(&args.request).with_context(|| format!("reading {}", args.request.display()))?;
    let request = parse_request(&request_bytes).with_context(|| format!("parsing {}", args.request.display()))?;
    let key = KeyPair::read_private(&args.key)?;
    let report = run_session(&manifest, &cfg)?;

    let dir = session_dir(&args.session);
    let truth = dir.join("ground_truth.json");
    let truth = truth.exists().then(|| GroundTruthDoc::load(&truth)).transpose()?;
    let corpus = match &truth {
        Some(t) => t.scenario.clone(),
        None => dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "session".into()),
    };

    let outcome = sign_request(&request, &report.verdict, &key);
    let sig_path = args.signature.clone().unwrap_or_else(|| dir.join("signature.txt"));
    if let Ok(signed) = &outcome {
        signed.write(&sig_path)?;
    }
    let doc = VerdictDoc {
        session: args.session.display().to_string(),
        corpus,
        expected_intended: truth.map(|t| t.truth.intended),
        signed: outcome.is_ok(),
        refusal: outcome.as_ref().err().map(|r| r.to_string()),
        report,
    };
    let out = args.out.clone().unwrap_or_else(|| dir.join("verdict.json"));
    fs::write(&out, serde_json::to_string_pretty(&doc)?).with_context(|| format!("writing {}", out.display()))?;

    match outcome {
        Ok(_) => {
            println!("intended: signed request written to {}", sig_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Err(refusal) => {
            println!("rejected: {refusal}");
            for f in &doc.report.verdict.failures {
                let region = if f.region_id.is_empty() { "-" } else { &f.region_id };
                println!("  t={} region={} {}: {}", f.t_ms, region, f.rule.as_str(), f.detail);
            }
            Ok(ExitCode::from(EXIT_REJECTED))
        }
    }
}
