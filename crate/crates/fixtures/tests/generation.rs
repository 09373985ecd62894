use std::sync::Arc;

use proptest::prelude::*;
use trustview_core::context::{hue_distance, rgb_to_hsv, Frame, Rect};
use trustview_core::font::{GLYPH_H, GLYPH_W};
use trustview_core::sampler::{schedule, FrameSource, ReplaySource, SamplerConfig};
use trustview_fixtures::attack::{inject_attack, AttackSpec, HostTamper};
use trustview_fixtures::page::{render_page, ElementKind, TEXT_PAD};
use trustview_fixtures::perturb::{perturb_benign, ElementShift, Magnitude, PerturbError, Perturbation};
use trustview_fixtures::scenario::*;
use trustview_fixtures::script::{Action, SessionScript};
use trustview_fixtures::session::{script_to_session, SyntheticSession};

fn sampled(s: &SyntheticSession) -> Vec<u64> {
    schedule(&SamplerConfig::default(), s.start_t_ms, s.end_t_ms)
}

fn differing_pixels(a: &Frame, b: &Frame) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for y in 0..a.height() {
        for x in 0..a.width() {
            if a.pixel(x, y) != b.pixel(x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

#[test]
fn same_seed_same_session() {
    for sc in Scenario::ALL {
        let a = scenario_session(sc, 11).unwrap();
        let b = scenario_session(sc, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.frames(), b.frames());
    }
    let spec = example_spec();
    assert_eq!(render_page(&spec).unwrap().trusted, render_page(&spec).unwrap().trusted);
}

#[test]
fn example_page_maps_onto_breakdown() {
    let spec = example_spec();
    let page = render_page(&spec).unwrap();
    assert_eq!(page.breakdown.regions.len(), spec.elements.len() - 1);
    assert_eq!(page.breakdown.inputs().count(), 2);
    assert_eq!(page.breakdown.submit_button, spec.button().unwrap().rect);
    assert_eq!(page.strings["account"], "Acct 4521-88");
}

#[test]
fn typing_three_chars() {
    let spec = example_spec();
    let mut script = SessionScript::default();
    script.then(500, Action::Focus { input: "in_amount".into() }).then(700, Action::Type { text: "100".into() });
    let s = script_to_session(&spec, &script, 0).unwrap();
    assert_eq!(s.hid.iter().filter(|e| !e.is_click() && e.pos.is_none()).count(), 3);
    assert!(s.frames().len() >= 3);
    assert_eq!(s.truth.history.value("in_amount"), "100");
}

#[test]
fn idle_stretch_replays_one_frame() {
    let spec = example_spec();
    let mut script = SessionScript::default();
    script
        .then(500, Action::Focus { input: "in_to".into() })
        .then(700, Action::Type { text: "Bob".into() })
        .then(2000, Action::Idle { ms: 2000 });
    let s = script_to_session(&spec, &script, 0).unwrap();
    let last_key = s.hid.last().unwrap().t_ms;
    let src = ReplaySource::from_frames(s.frames());
    let idle: Vec<_> = sampled(&s).into_iter().filter(|&t| t > last_key).map(|t| src.frame_at(t).unwrap().unwrap()).collect();
    assert!(idle.len() >= 4);
    assert!(idle.windows(2).all(|w| Arc::ptr_eq(&w[0], &w[1])));
}

#[test]
fn attacks_are_never_vacuous() {
    for sc in Scenario::ATTACKS {
        for seed in 0..12 {
            let base = base_session(seed).unwrap();
            let s = scenario_session(sc, seed).unwrap();
            let frame_differs = sampled(&s).into_iter().any(|t| s.render_at(t) != base.render_at(t));
            assert!(frame_differs || s.hid != base.hid || s.request != base.request, "{sc} seed {seed}");
        }
    }
}

#[test]
fn min_tamper_touches_exactly_one_glyph() {
    for seed in 0..10 {
        let base = base_session(seed).unwrap();
        let s = scenario_session(Scenario::MinTamper, seed).unwrap();
        let Some(AttackSpec::MinTamper { region, index, .. }) = &s.attack else { panic!("wrong attack") };
        let r = s.spec.element(region).unwrap().rect;
        let cell = Rect { x: r.x + TEXT_PAD + *index as u32 * GLYPH_W, y: r.y + TEXT_PAD, w: GLYPH_W, h: GLYPH_H };
        for t in s.frame_times() {
            let d = differing_pixels(&base.render_at(t), &s.render_at(t));
            assert!(!d.is_empty(), "seed {seed} t {t}");
            assert!(d.iter().all(|&(x, y)| cell.contains_point(x as i64, y as i64)), "seed {seed} t {t}");
        }
    }
}

#[test]
fn temporal_popup_is_sampled() {
    for seed in 0..30 {
        let s = scenario_session(Scenario::Temporal, seed).unwrap();
        let Some(AttackSpec::Temporal { t0_ms, t1_ms, .. }) = s.attack else { panic!("wrong attack") };
        assert!(t1_ms - t0_ms >= 600);
        assert!(sampled(&s).iter().any(|t| (t0_ms..t1_ms).contains(t)), "seed {seed}");
    }
}

#[test]
fn no_hid_injection_has_no_events_nearby() {
    let base = base_session(4).unwrap();
    let at = base.hid.iter().filter(|e| e.t_ms < base.end_t_ms).map(|e| e.t_ms).max().unwrap() + 1300;
    let input = base.state_at(at).focus.clone().unwrap();
    let a = AttackSpec::HostTamper { tamper: HostTamper::NoHid { input: input.clone(), t_ms: at, ch: '7' } };
    let s = inject_attack(&base, &a).unwrap();
    assert_eq!(s.hid, base.hid);
    assert!(!s.hid.iter().any(|e| e.t_ms > at - 1000 && e.t_ms <= at));
    assert_ne!(s.render_at(at), base.render_at(at));
    assert!(s.state_at(at).values[&input].ends_with('7'));
    let early = AttackSpec::HostTamper { tamper: HostTamper::NoHid { input, t_ms: base.hid[1].t_ms, ch: '7' } };
    assert!(inject_attack(&base, &early).is_err());
}

fn strictly_inside(a: [u8; 3], b: [u8; 3]) -> bool {
    let (p, q) = (rgb_to_hsv(a[0], a[1], a[2]), rgb_to_hsv(b[0], b[1], b[2]));
    hue_distance(p.h, q.h) < 54.0 && (p.s - q.s).abs() < 0.15 && (p.v - q.v).abs() < 0.15
}

#[test]
fn benign_pixels_stay_inside_the_envelope() {
    for seed in 0..40 {
        let base = base_session(seed).unwrap();
        let m = Magnitude {
            pixel: vec![if seed % 2 == 0 {
                Perturbation::Jitter { dh: 10.0 - seed as f64 / 2.0, ds: 0.08, dv: -0.08 }
            } else {
                Perturbation::Jitter { dh: 0.0, ds: 0.0, dv: -0.10 }
            }],
            shift: None,
        };
        let p = perturb_benign(&base, &m).unwrap();
        for t in p.frame_times().into_iter().step_by(3) {
            let (a, b) = (base.render_at(t), p.render_at(t));
            for y in 0..a.height() {
                for x in 0..a.width() {
                    assert!(strictly_inside(a.pixel(x, y), b.pixel(x, y)), "seed {seed} ({x},{y})");
                }
            }
        }
    }
}

#[test]
fn antialias_only_softens_glyph_edges() {
    let base = base_session(2).unwrap();
    let m = Magnitude { pixel: vec![Perturbation::Antialias { seed: 9, max_blend: 0.45, fraction: 0.5 }], shift: None };
    let p = perturb_benign(&base, &m).unwrap();
    let (a, b) = (base.render_at(base.end_t_ms), p.render_at(base.end_t_ms));
    let d = differing_pixels(&a, &b);
    assert!(!d.is_empty());
    for (x, y) in d {
        assert_eq!(a.pixel(x, y), [255, 255, 255]);
        let v = b.pixel(x, y)[0] as f64 / 255.0;
        assert!(v >= 1.0 - 0.45 - 0.01, "({x},{y}) blended too far");
    }
}

#[test]
fn benign_shift_limits() {
    let base = base_session(1).unwrap();
    let logo = base.spec.element("logo").unwrap().rect;
    let ok = ElementShift { element: "logo".into(), dx: (logo.w as i32 - 1) / 10, dy: 0 };
    assert!(perturb_benign(&base, &Magnitude { pixel: vec![], shift: Some(ok) }).is_ok());
    let too_far = ElementShift { element: "logo".into(), dx: logo.w.div_ceil(10) as i32, dy: 0 };
    assert!(matches!(perturb_benign(&base, &Magnitude { pixel: vec![], shift: Some(too_far) }), Err(PerturbError::OutOfEnvelope(_))));
    let zero = perturb_benign(&base, &Magnitude::default()).unwrap();
    assert_eq!(zero.frames(), base.frames());
}

#[test]
fn context_hide_keeps_only_one_region() {
    let s = scenario_session(Scenario::ContextHide, 3).unwrap();
    let Some(AttackSpec::ContextHide { keep }) = &s.attack else { panic!("wrong attack") };
    for (e, l) in s.spec.elements.iter().zip(&s.local_spec.elements) {
        let content = matches!(e.kind, ElementKind::Text { .. } | ElementKind::Image { .. });
        assert_eq!(e == l, !content || e.id == *keep, "{}", e.id);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_scripts_are_valid(seed in any::<u64>()) {
        let s = rich_session(seed).unwrap();
        for (id, rec) in &s.truth.history.fields {
            prop_assert!(rec.value.chars().count() <= s.spec.capacity(id));
        }
        prop_assert!(s.states.windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(s.hid.windows(2).all(|w| w[0].t_ms <= w[1].t_ms));
        let click = s.hid.iter().rev().find(|e| e.is_click()).unwrap();
        prop_assert_eq!(click.t_ms, s.end_t_ms);
    }
}
