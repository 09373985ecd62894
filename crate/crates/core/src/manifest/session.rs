use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_file, utf8, ManifestError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRef {
    pub t_ms: u64,
    pub path: String,
}

/// Recorded session: frame files, time window and the paths of the
/// companion artifacts. Relative paths resolve against the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionManifest {
    pub start_t_ms: u64,
    pub end_t_ms: u64,
    pub frames: Vec<FrameRef>,
    pub hid: String,
    pub trusted: String,
    pub breakdown: String,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl SessionManifest {
    pub fn parse(bytes: &[u8]) -> Result<SessionManifest, ManifestError> {
        let text = utf8(bytes)?;
        let m: SessionManifest = serde_json::from_str(text).map_err(|e| ManifestError::Malformed(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<SessionManifest, ManifestError> {
        let mut m = SessionManifest::parse(&read_file(path)?)?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ManifestError> {
        let (first, last) = match (self.frames.first(), self.frames.last()) {
            (Some(f), Some(l)) => (f.t_ms, l.t_ms),
            _ => return Err(ManifestError::NoFrames),
        };
        for (i, pair) in self.frames.windows(2).enumerate() {
            if pair[1].t_ms <= pair[0].t_ms {
                return Err(ManifestError::FrameOrder { index: i + 1 });
            }
        }
        if self.start_t_ms > first || self.end_t_ms < last || self.start_t_ms > self.end_t_ms {
            return Err(ManifestError::SessionWindow { start: self.start_t_ms, end: self.end_t_ms });
        }
        Ok(())
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(frames: &str, start: u64, end: u64) -> String {
        format!(r#"{{"start_t_ms":{start},"end_t_ms":{end},"frames":[{frames}],"hid":"hid.log","trusted":"trusted.png","breakdown":"b.json"}}"#)
    }

    #[test]
    fn accepts_ordered_frames_inside_window() {
        let m = SessionManifest::parse(doc(r#"{"t_ms":0,"path":"f0.png"},{"t_ms":40,"path":"f1.png"}"#, 0, 100).as_bytes()).unwrap();
        assert_eq!(m.frames.len(), 2);
        assert_eq!(SessionManifest::parse(m.to_json().as_bytes()).unwrap(), m);
    }

    #[test]
    fn rejects_bad_order_and_window() {
        let repeated = doc(r#"{"t_ms":10,"path":"a"},{"t_ms":10,"path":"b"}"#, 0, 100);
        assert!(matches!(SessionManifest::parse(repeated.as_bytes()), Err(ManifestError::FrameOrder { .. })));
        let late_start = doc(r#"{"t_ms":10,"path":"a"}"#, 20, 100);
        assert!(matches!(SessionManifest::parse(late_start.as_bytes()), Err(ManifestError::SessionWindow { .. })));
        assert!(matches!(SessionManifest::parse(doc("", 0, 1).as_bytes()), Err(ManifestError::NoFrames)));
        assert!(matches!(SessionManifest::parse(b"{"), Err(ManifestError::Malformed(_))));
    }

    #[test]
    fn relative_paths_resolve_against_manifest_dir() {
        let mut m = SessionManifest::parse(doc(r#"{"t_ms":0,"path":"a"}"#, 0, 0).as_bytes()).unwrap();
        m.base_dir = PathBuf::from("/data/s1");
        assert_eq!(m.resolve("hid.log"), PathBuf::from("/data/s1/hid.log"));
        assert_eq!(m.resolve("/abs/x"), PathBuf::from("/abs/x"));
    }
}
