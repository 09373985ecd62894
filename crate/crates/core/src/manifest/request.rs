use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{utf8, ManifestError};

/// Outgoing request: labelled values in submission order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub pairs: Vec<(String, String)>,
}

impl Request {
    /// Builds a request, rejecting duplicate labels and pairs that do not
    /// fit on one `label=value` line.
    pub fn new(pairs: Vec<(String, String)>) -> Result<Request, ManifestError> {
        let mut seen = HashSet::new();
        for (label, value) in &pairs {
            if label.is_empty() || label.contains(['=', '\n', '\r']) || value.contains(['\n', '\r']) {
                return Err(ManifestError::UnencodablePair(label.clone()));
            }
            if !seen.insert(label.as_str()) {
                return Err(ManifestError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Request { pairs })
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.pairs.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_str())
    }

    /// `label=value` lines in stored order, each LF-terminated.
    pub fn to_text(&self) -> String {
        self.pairs.iter().map(|(l, v)| format!("{l}={v}\n")).collect()
    }
}

/// Parses `label=value` lines. The first `=` splits; blank lines are skipped.
pub fn parse_request(bytes: &[u8]) -> Result<Request, ManifestError> {
    let text = utf8(bytes)?;
    let mut pairs = Vec::new();
    for (idx, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let (label, value) = line.split_once('=').ok_or(ManifestError::MissingEquals { line: idx + 1 })?;
        if label.is_empty() {
            return Err(ManifestError::EmptyLabel { line: idx + 1 });
        }
        pairs.push((label.to_string(), value.to_string()));
    }
    Request::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let r = parse_request(b"Amount=100\nTo=Bob").unwrap();
        assert_eq!(r.pairs, vec![("Amount".into(), "100".into()), ("To".into(), "Bob".into())]);
        assert!(matches!(parse_request(b"Amount=100\nAmount=200"), Err(ManifestError::DuplicateLabel(_))));
        assert_eq!(parse_request(b"Note=a=b").unwrap().pairs, vec![("Note".into(), "a=b".into())]);
        assert!(matches!(parse_request(b"Amount"), Err(ManifestError::MissingEquals { line: 1 })));
        assert!(parse_request(b"").unwrap().pairs.is_empty());
    }

    proptest! {
        #[test]
        fn round_trips(map in proptest::collection::btree_map("[A-Za-z_][A-Za-z0-9 _.-]{0,8}", "[^\n\r]{0,12}", 0..8)) {
            let req = Request::new(map.into_iter().collect()).unwrap();
            prop_assert_eq!(parse_request(req.to_text().as_bytes()).unwrap(), req);
        }

        #[test]
        fn never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
            let _ = parse_request(&bytes);
        }
    }
}
