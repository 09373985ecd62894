use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trustview_core::context::{Frame, HsvThresholds, Rect, Shift};
use trustview_core::engine::{run_loaded, EndCheck, EngineConfig, Rule, SessionReport, SessionVerdict};
use trustview_core::gate::{canonical_serialize, sign_request, verify_canonical, KeyPair};
use trustview_core::input::{classify_edit, Caret, EditKind, InputHistory, InputRecord, PofState};
use trustview_core::manifest::{Region, RegionKind, Request};
use trustview_core::output::{flagged_pixels, validate_graphic_region, OutputConfig, RegionStatus};
use trustview_core::sampler::{IntervalSampler, SamplerConfig};
use trustview_fixtures::scenario::{
    benign_session, idle_session, prefilled_session, probe_session, rich_session, scenario_session, Probe, Scenario,
};
use trustview_fixtures::script::oracle_extract;
use trustview_fixtures::session::SyntheticSession;

type Outcome = Result<String, String>;

fn report(s: &SyntheticSession, cfg: &EngineConfig) -> Result<SessionReport, String> {
    let loaded = s.to_loaded().map_err(|e| format!("{} seed {}: {e}", s.scenario, s.seed))?;
    run_loaded(&loaded, cfg).map_err(|e| format!("{} seed {}: {e}", s.scenario, s.seed))
}

fn verdict(s: &SyntheticSession) -> Result<SessionVerdict, String> {
    Ok(report(s, &EngineConfig::default())?.verdict)
}

fn session<E: std::fmt::Display>(r: Result<SyntheticSession, E>) -> Result<SyntheticSession, String> {
    r.map_err(|e| e.to_string())
}

fn attack_recall() -> Outcome {
    const PER_VARIANT: u64 = 60;
    let key = KeyPair::from_u64(11);
    let mut rows = Vec::new();
    for sc in Scenario::ATTACKS {
        let mut rejected = 0;
        for seed in 0..PER_VARIANT {
            let s = session(scenario_session(sc, seed))?;
            if sc == Scenario::Temporal {
                let shortest = s.popups.iter().map(|p| p.t1_ms - p.t0_ms).min().unwrap_or(0);
                if shortest < 600 {
                    return Err(format!("temporal seed {seed}: overlay lasts only {shortest} ms"));
                }
            }
            let v = verdict(&s)?;
            match sign_request(&s.request, &v, &key) {
                Ok(_) => return Err(format!("{sc} seed {seed} was signed")),
                Err(_) => rejected += 1,
            }
        }
        rows.push(format!("{sc} {rejected}/{PER_VARIANT}"));
    }
    Ok(rows.join(", "))
}

fn benign_tolerance() -> Outcome {
    const N: u64 = 200;
    let key = KeyPair::from_u64(12);
    let mut perturbed = 0;
    for seed in 0..N {
        let s = session(benign_session(seed))?;
        for p in &s.perturbations {
            p.check_benign().map_err(|e| format!("seed {seed}: {e}"))?;
        }
        if !s.perturbations.is_empty() || s.local_spec != s.spec {
            perturbed += 1;
        }
        let v = verdict(&s)?;
        if let Err(r) = sign_request(&s.request, &v, &key) {
            return Err(format!("seed {seed} refused: {r}; {:?}", v.failures));
        }
        if v.input_history.without_times() != s.truth.history {
            return Err(format!("seed {seed}: extracted history differs from ground truth"));
        }
    }
    Ok(format!("{N}/{N} signed, {perturbed} perturbed"))
}

fn threshold_sharpness() -> Outcome {
    let mut rows = Vec::new();
    for p in Probe::ALL {
        for seed in 0..8 {
            let v = verdict(&session(probe_session(p, seed))?)?;
            if v.intended() || !v.rules().contains(&p.expected_rule()) {
                return Err(format!("{p:?} seed {seed}: rules {:?}", v.rules()));
            }
        }
        rows.push(p.expected_rule().as_str());
    }
    Ok(rows.join(", "))
}

fn sampler_distribution() -> Outcome {
    const N: usize = 10_000;
    let start = Instant::now();
    let mut s = IntervalSampler::new(SamplerConfig::with_seed(2024));
    let draws: Vec<f64> = (0..N).map(|_| s.next_interval() as f64).collect();
    let elapsed = start.elapsed().as_secs_f64();
    let mean = draws.iter().sum::<f64>() / N as f64;
    let std = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (N - 1) as f64).sqrt();
    let tail = draws.iter().filter(|&&d| d > 500.0).count() as f64 / N as f64;
    let msg = format!("mean {mean:.1} ms, std {std:.1} ms, P(>500) {:.3}%, {elapsed:.4} s", tail * 100.0);
    let ok = (245.0..=255.0).contains(&mean) && (78.0..=88.0).contains(&std) && tail <= 0.005 && elapsed < 1.0;
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn extraction_oracle() -> Outcome {
    const N: u64 = 1000;
    for seed in 0..N {
        let s = session(rich_session(seed))?;
        let truth = oracle_extract(&s.spec, &s.script).map_err(|e| format!("seed {seed}: {e}"))?;
        let v = verdict(&s)?;
        if !v.intended() {
            return Err(format!("seed {seed} rejected: {:?}", v.failures));
        }
        let got = serde_json::to_vec(&v.input_history.without_times()).expect("history serializes");
        let want = serde_json::to_vec(&truth).expect("history serializes");
        if got != want {
            return Err(format!("seed {seed}: {} vs {}", String::from_utf8_lossy(&got), String::from_utf8_lossy(&want)));
        }
    }
    Ok(format!("{N}/{N} histories byte-equal"))
}

fn ab_strings(max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|s| ["a", "b"].map(|c| format!("{s}{c}"))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Strings one legal edit away from `old`, each tagged with the first edit
/// shape producing it.
fn legal_edits(old: &str, caret: usize, sel: Option<(usize, usize)>, max_len: usize) -> BTreeMap<String, EditKind> {
    let o: Vec<char> = old.chars().collect();
    let mut out = BTreeMap::new();
    out.insert(old.to_string(), EditKind::None);
    for ins in ab_strings(max_len).into_iter().filter(|s| !s.is_empty() && s.len() + o.len() <= max_len) {
        for p in 0..=o.len() {
            let end = p + ins.len();
            if end == caret || end == caret + 1 {
                let s = format!("{}{ins}{}", o[..p].iter().collect::<String>(), o[p..].iter().collect::<String>());
                out.entry(s).or_insert(EditKind::LeftInsert);
            }
        }
    }
    if let Some((s, e)) = sel {
        if e > s && e <= o.len() {
            out.entry(o[..s].iter().chain(&o[e..]).collect()).or_insert(EditKind::SelectionDelete);
        }
    }
    if caret < o.len() {
        for e in caret + 1..=o.len() {
            out.entry(o[..caret].iter().chain(&o[e..]).collect()).or_insert(EditKind::AdjacentDelete);
        }
    }
    out
}

fn edit_exhaustive() -> Outcome {
    const MAX: usize = 4;
    let all = ab_strings(MAX);
    let (mut checked, mut wrong) = (0u64, Vec::new());
    for old in &all {
        let n = old.len();
        let mut sels = vec![None];
        for s in 0..n {
            sels.extend((s + 1..=n).map(|e| Some((s, e))));
        }
        for sel in sels {
            let mut history = InputHistory::default();
            history.fields.insert("in".into(), InputRecord { label: "L".into(), value: old.clone(), last_selection: sel, last_edit_t_ms: None });
            for new in &all {
                for caret in 0..=new.len() {
                    let pof = PofState { focus_box: Some("in".into()), caret: Some(Caret { region_id: "in".into(), column: caret, x: 0 }), selection: None };
                    let want = legal_edits(old, caret, sel, MAX).get(new).copied().unwrap_or(EditKind::Violation);
                    let got = classify_edit("in", old, new, &pof, &history).kind;
                    checked += 1;
                    if got != want && wrong.len() < 3 {
                        wrong.push(format!("{old:?}->{new:?} caret {caret} sel {sel:?}: {got:?} vs {want:?}"));
                    }
                }
            }
        }
    }
    if wrong.is_empty() {
        Ok(format!("{checked} tuples, 0 disagreements"))
    } else {
        Err(wrong.join("; "))
    }
}

fn cache_transparency() -> Outcome {
    let modes = [
        EngineConfig::default(),
        EngineConfig { use_cache: false, ..EngineConfig::default() },
        EngineConfig { full_revalidate: true, ..EngineConfig::default() },
    ];
    let mut corpus = Vec::new();
    for sc in Scenario::ALL {
        for seed in 0..12 {
            corpus.push(session(scenario_session(sc, seed))?);
        }
    }
    for p in Probe::ALL {
        corpus.push(session(probe_session(p, 0))?);
    }
    corpus.push(session(prefilled_session(0))?);
    for s in &corpus {
        let base = report(s, &modes[0])?.verdict.to_json();
        for m in &modes[1..] {
            if report(s, m)?.verdict.to_json() != base {
                return Err(format!("{} seed {}: verdict depends on cache mode", s.scenario, s.seed));
            }
        }
    }
    let mut ratios = Vec::new();
    for seed in 0..3 {
        let r = report(&session(idle_session(seed, 15))?, &EngineConfig::default())?;
        let (Some(first), Some(rest)) = (r.first_frame_ms(), r.mean_subsequent_ms()) else {
            return Err("idle session produced fewer than two frames".into());
        };
        if r.frames.len() < 55 {
            return Err(format!("idle session has only {} frames", r.frames.len()));
        }
        ratios.push((first / rest, r.frames.len()));
    }
    let worst = ratios.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let msg = format!("{} sessions identical in 3 modes; first/subsequent ratio >= {worst:.1}x over {} frames", corpus.len(), ratios[0].1);
    if worst >= 5.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_request(rng: &mut ChaCha8Rng) -> (InputHistory, Request) {
    const LABELS: [&str; 5] = ["Amount", "To", "Email", "Memo", "Code"];
    let n = rng.random_range(1..=3);
    let mut labels: Vec<&str> = LABELS.to_vec();
    let mut h = InputHistory::default();
    for i in 0..n {
        let l = labels.swap_remove(rng.random_range(0..labels.len()));
        let len = rng.random_range(0..5);
        let value: String = (0..len).map(|_| *b"ab1@".get(rng.random_range(0..4)).unwrap() as char).collect();
        h.fields.insert(format!("in{i}"), InputRecord { label: l.into(), value, ..Default::default() });
    }
    let mut pairs: Vec<(String, String)> = h.labelled_values();
    match rng.random_range(0..5) {
        0 | 1 => {}
        2 => {
            let i = rng.random_range(0..pairs.len());
            pairs[i].1.push('x');
        }
        3 => {
            pairs.remove(rng.random_range(0..pairs.len()));
        }
        _ => pairs.push((labels[0].to_string(), "1".into())),
    }
    if rng.random_bool(0.5) {
        pairs.reverse();
    }
    (h, Request::new(pairs).expect("encodable pairs"))
}

fn request_gate() -> Outcome {
    const N: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let key = KeyPair::from_u64(8);
    let public = key.public();
    let (mut signed, mut mutations) = (0, 0u64);
    for i in 0..N {
        let (history, request) = random_request(&mut rng);
        let intended = rng.random_bool(0.7);
        let v = SessionVerdict::assemble(Vec::new(), history.clone(), EndCheck { passed: intended, detail: String::new() }, 1);
        let collected: BTreeMap<String, String> = history.labelled_values().into_iter().collect();
        let sent: BTreeMap<String, String> = request.pairs.iter().cloned().collect();
        let expect = intended && collected == sent && sent.len() == request.pairs.len();
        let outcome = sign_request(&request, &v, &key);
        if outcome.is_ok() != expect {
            return Err(format!("pair {i}: signed={} expected={expect}", outcome.is_ok()));
        }
        let Ok(s) = outcome else { continue };
        signed += 1;
        let canonical = canonical_serialize(&request);
        if !verify_canonical(&public, &canonical, &s.signature) {
            return Err(format!("pair {i}: emitted signature does not verify"));
        }
        let exhaustive = signed <= 3;
        for pos in 0..canonical.len() + s.signature.len() {
            let deltas: Vec<u8> = if exhaustive { (1..=255).collect() } else { vec![rng.random_range(1..=255)] };
            for d in deltas {
                let (mut c, mut sig) = (canonical.clone(), s.signature);
                if pos < c.len() {
                    c[pos] ^= d;
                } else {
                    sig[pos - c.len()] ^= d;
                }
                mutations += 1;
                if verify_canonical(&public, &c, &sig) {
                    return Err(format!("pair {i}: mutation at byte {pos} still verifies"));
                }
            }
        }
    }
    Ok(format!("{N} pairs, {signed} signed, {mutations} mutations rejected"))
}

/// Exact HSV of an 8-bit pixel as integer fractions: hue `60 * hn / hd`
/// degrees, saturation `sn / sd`, value `max / 255`.
fn exact_hsv(p: [u8; 3]) -> (i64, i64, i64, i64, i64) {
    let [r, g, b] = p.map(i64::from);
    let (max, min) = (r.max(g).max(b), r.min(g).min(b));
    let d = max - min;
    if d == 0 {
        return (0, 1, 0, 1, max);
    }
    let hn = if max == r {
        (g - b).rem_euclid(6 * d)
    } else if max == g {
        b - r + 2 * d
    } else {
        r - g + 4 * d
    };
    (hn, d, d, max, max)
}

/// Per-channel comparison at 15% (54 degrees, 0.15, 0.15) in exact arithmetic.
fn naive_flag(a: [u8; 3], b: [u8; 3]) -> bool {
    let (hn1, hd1, sn1, sd1, v1) = exact_hsv(a);
    let (hn2, hd2, sn2, sd2, v2) = exact_hsv(b);
    let dh = (60 * hn1 * hd2 - 60 * hn2 * hd1).abs();
    let dh = dh.min(360 * hd1 * hd2 - dh);
    dh > 54 * hd1 * hd2 || 100 * (sn1 * sd2 - sn2 * sd1).abs() > 15 * sd1 * sd2 || 100 * (v1 - v2).abs() > 15 * 255
}

fn pixel_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let thr = HsvThresholds::from_percent(15.0);
    let cfg = OutputConfig::default();
    let (mut flagged_total, mut wrap_cases) = (0usize, 0usize);
    for case in 0..100 {
        let (w, h) = (rng.random_range(1..=64u32), rng.random_range(1..=64u32));
        let mut trusted = Vec::with_capacity((w * h * 3) as usize);
        let mut local = Vec::with_capacity((w * h * 3) as usize);
        for _ in 0..w * h {
            let t: [u8; 3] = if case % 4 == 0 { [255, 0, 0] } else { rng.random() };
            let l = match rng.random_range(0..4) {
                0 => t,
                1 => t.map(|c| c.saturating_add(rng.random_range(0..60)).saturating_sub(rng.random_range(0..60))),
                2 if t == [255, 0, 0] => [255, 0, rng.random_range(1..=6)],
                _ => rng.random(),
            };
            if t == [255, 0, 0] && l[0] == 255 && l[1] == 0 && l[2] > 0 {
                wrap_cases += 1;
            }
            trusted.extend(t);
            local.extend(l);
        }
        let tf = Frame::new(w, h, trusted, 0).map_err(|e| e.to_string())?;
        let lf = Frame::new(w, h, local, 0).map_err(|e| e.to_string())?;
        let rect = Rect { x: 0, y: 0, w, h };
        let got = flagged_pixels(&lf, &tf, &rect, Shift::new(0, 0), &thr);
        let want: Vec<bool> = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).map(|(x, y)| naive_flag(tf.pixel(x, y), lf.pixel(x, y))).collect();
        if got != want {
            let i = got.iter().zip(&want).position(|(a, b)| a != b).unwrap();
            let (x, y) = (i as u32 % w, i as u32 / w);
            return Err(format!("case {case} ({w}x{h}): flagged sets differ at ({x}, {y}): trusted {:?} local {:?} core {}", tf.pixel(x, y), lf.pixel(x, y), got[i]));
        }
        flagged_total += want.iter().filter(|&&f| f).count();
        let region = Region { id: "r".into(), kind: RegionKind::Graphical, rect, label_hint: None };
        let v = validate_graphic_region(&lf, &tf, &region, &cfg);
        if !want.iter().any(|&f| f) && v.status != RegionStatus::Pass {
            return Err(format!("case {case}: no pixel flagged but verdict {:?}", v.status));
        }
    }
    let red = Frame::new(1, 1, vec![255, 0, 0], 0).map_err(|e| e.to_string())?;
    let hue_359 = Frame::new(1, 1, vec![255, 0, 4], 0).map_err(|e| e.to_string())?;
    if naive_flag([255, 0, 0], [255, 0, 4]) || flagged_pixels(&hue_359, &red, &red.bounds(), Shift::new(0, 0), &thr)[0] {
        return Err("hue 0 vs 359 flagged".into());
    }
    let tie_t = Frame::new(1, 1, vec![140, 21, 107], 0).map_err(|e| e.to_string())?;
    let tie_l = Frame::new(1, 1, vec![129, 0, 70], 0).map_err(|e| e.to_string())?;
    if naive_flag([140, 21, 107], [129, 0, 70]) || flagged_pixels(&tie_l, &tie_t, &tie_t.bounds(), Shift::new(0, 0), &thr)[0] {
        return Err("saturation difference of exactly 0.15 flagged".into());
    }
    Ok(format!("100 regions, {flagged_total} flagged pixels, {wrap_cases} hue-wrap pixels"))
}

fn prefilled_rejected() -> Outcome {
    let key = KeyPair::from_u64(10);
    for seed in 0..20 {
        let s = session(prefilled_session(seed))?;
        let v = verdict(&s)?;
        if !v.rules().contains(&Rule::PrefilledInput) || sign_request(&s.request, &v, &key).is_ok() {
            return Err(format!("seed {seed}: rules {:?}", v.rules()));
        }
    }
    Ok("20/20 prefilled sessions rejected".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("attack recall", attack_recall),
        ("benign tolerance", benign_tolerance),
        ("threshold sharpness", threshold_sharpness),
        ("sampler distribution", sampler_distribution),
        ("input extraction oracle", extraction_oracle),
        ("edit rule exhaustiveness", edit_exhaustive),
        ("cache and diff transparency", cache_transparency),
        ("request gate", request_gate),
        ("pixel equivalence", pixel_equivalence),
        ("prefilled form rejected", prefilled_rejected),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({secs:.1} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
