use crate::manifest::HidEvent;

/// On-screen activity at `t` must follow some hardware event in `(t - W, t]`.
pub const HID_WINDOW_MS: u64 = 1000;

/// Whether any event falls in `(t_ms - window_ms, t_ms]`. `events` must be
/// sorted by time.
pub fn has_event_in_window(events: &[HidEvent], t_ms: u64, window_ms: u64) -> bool {
    let first = match t_ms.checked_sub(window_ms) {
        Some(lo) => events.partition_point(|e| e.t_ms <= lo),
        None => 0,
    };
    events.get(first).is_some_and(|e| e.t_ms <= t_ms)
}

/// Checks that `activity` seen at `t_ms` is backed by a keyboard or mouse
/// event within the default window.
pub fn correlate_hid(events: &[HidEvent], t_ms: u64, activity: &str) -> Result<(), String> {
    if has_event_in_window(events, t_ms, HID_WINDOW_MS) {
        Ok(())
    } else {
        Err(format!("{activity} at {t_ms} ms with no keyboard or mouse event in the preceding {HID_WINDOW_MS} ms"))
    }
}
