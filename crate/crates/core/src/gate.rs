//! Request matching and signing.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::engine::{Rule, SessionVerdict};
use crate::input::InputHistory;
use crate::manifest::{parse_request, ManifestError, Request};

#[derive(Debug, Error)]
pub enum GateError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {reason}")]
    BadKey { path: String, reason: String },
    #[error("signature file: {0}")]
    BadSignatureFile(String),
    #[error(transparent)]
    Request(#[from] ManifestError),
}

/// Label-sorted `label=value\n` lines.
pub fn canonical_serialize(request: &Request) -> Vec<u8> {
    let mut pairs: Vec<&(String, String)> = request.pairs.iter().collect();
    pairs.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
    let mut out = Vec::new();
    for (l, v) in pairs {
        out.extend_from_slice(l.as_bytes());
        out.push(b'=');
        out.extend_from_slice(v.as_bytes());
        out.push(b'\n');
    }
    out
}

/// The 32 bytes that get signed: SHA-256 of the canonical form.
pub fn signing_input(canonical: &[u8]) -> [u8; 32] {
    Sha256::digest(canonical).into()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequestMismatch {
    #[error("label {0:?} was collected but is missing from the request")]
    MissingLabel(String),
    #[error("request carries label {0:?}, which was never collected")]
    UnexpectedLabel(String),
    #[error("value of {label:?} is {got:?}, the user entered {expected:?}")]
    ValueDiffers { label: String, expected: String, got: String },
    #[error("label {0:?} names more than one input")]
    AmbiguousLabel(String),
}

/// Passes when the request carries exactly the collected labels with
/// byte-identical values.
pub fn match_request(request: &Request, history: &InputHistory) -> Result<(), RequestMismatch> {
    let mut collected: BTreeMap<&str, &str> = BTreeMap::new();
    for rec in history.fields.values() {
        if collected.insert(rec.label.as_str(), rec.value.as_str()).is_some() {
            return Err(RequestMismatch::AmbiguousLabel(rec.label.clone()));
        }
    }
    for (label, expected) in &collected {
        match request.get(label) {
            None => return Err(RequestMismatch::MissingLabel(label.to_string())),
            Some(got) if got != *expected => {
                return Err(RequestMismatch::ValueDiffers { label: label.to_string(), expected: expected.to_string(), got: got.to_string() })
            }
            Some(_) => {}
        }
    }
    if let Some((l, _)) = request.pairs.iter().find(|(l, _)| !collected.contains_key(l.as_str())) {
        return Err(RequestMismatch::UnexpectedLabel(l.clone()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Refusal {
    #[error("session was rejected ({})", rules.iter().map(Rule::as_str).collect::<Vec<_>>().join(", "))]
    SessionRejected { rules: Vec<Rule> },
    #[error("request does not match the user's input: {0}")]
    Mismatch(#[from] RequestMismatch),
}

/// Ed25519 key pair; the secret half is wiped on drop.
pub struct KeyPair {
    signing: SigningKey,
}

impl KeyPair {
    pub fn from_seed(seed: [u8; 32]) -> KeyPair {
        KeyPair { signing: SigningKey::from_bytes(&seed) }
    }

    /// Fresh key from the operating system's entropy.
    pub fn generate() -> KeyPair {
        let mut seed = [0u8; 32];
        rand::rng().fill_bytes(&mut seed);
        KeyPair::from_seed(seed)
    }

    /// Reproducible key for tests and fixtures.
    pub fn from_u64(seed: u64) -> KeyPair {
        let mut bytes = [0u8; 32];
        ChaCha20Rng::seed_from_u64(seed).fill_bytes(&mut bytes);
        KeyPair::from_seed(bytes)
    }

    pub fn public(&self) -> VerifyingKey {
        self.signing.verifying_key()
    }

    pub fn seed_bytes(&self) -> [u8; 32] {
        self.signing.to_bytes()
    }

    pub fn sign_canonical(&self, canonical: &[u8]) -> [u8; 64] {
        self.signing.sign(&signing_input(canonical)).to_bytes()
    }

    /// Writes `<prefix>.key` and `<prefix>.pub`, each one line of hex.
    pub fn write_files(&self, prefix: &Path) -> Result<(PathBuf, PathBuf), GateError> {
        let key = with_suffix(prefix, "key");
        let public = with_suffix(prefix, "pub");
        write(&key, &format!("{}\n", hex::encode(self.seed_bytes())))?;
        write(&public, &format!("{}\n", hex::encode(self.public().to_bytes())))?;
        Ok((key, public))
    }

    pub fn read_private(path: &Path) -> Result<KeyPair, GateError> {
        Ok(KeyPair::from_seed(read_hex32(path)?))
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write(path: &Path, text: &str) -> Result<(), GateError> {
    fs::write(path, text).map_err(|source| GateError::Io { path: path.display().to_string(), source })
}

fn read_text(path: &Path) -> Result<String, GateError> {
    fs::read_to_string(path).map_err(|source| GateError::Io { path: path.display().to_string(), source })
}

fn read_hex32(path: &Path) -> Result<[u8; 32], GateError> {
    let bad = |reason: String| GateError::BadKey { path: path.display().to_string(), reason };
    let bytes = hex::decode(read_text(path)?.trim()).map_err(|e| bad(e.to_string()))?;
    bytes.try_into().map_err(|b: Vec<u8>| bad(format!("expected 32 bytes, found {}", b.len())))
}

pub fn read_public(path: &Path) -> Result<VerifyingKey, GateError> {
    let bytes = read_hex32(path)?;
    VerifyingKey::from_bytes(&bytes).map_err(|e| GateError::BadKey { path: path.display().to_string(), reason: e.to_string() })
}

/// `public` accepts `signature` over the canonical bytes.
pub fn verify_canonical(public: &VerifyingKey, canonical: &[u8], signature: &[u8]) -> bool {
    let Ok(sig) = <[u8; 64]>::try_from(signature) else { return false };
    public.verify(&signing_input(canonical), &Signature::from_bytes(&sig)).is_ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedRequest {
    pub request: Request,
    pub signature: [u8; 64],
}

impl SignedRequest {
    pub fn canonical(&self) -> Vec<u8> {
        canonical_serialize(&self.request)
    }

    pub fn verify(&self, public: &VerifyingKey) -> bool {
        verify_canonical(public, &self.canonical(), &self.signature)
    }

    /// Hex signature, a blank line, then the canonical request.
    pub fn to_text(&self) -> String {
        format!("{}\n\n{}", hex::encode(self.signature), String::from_utf8(self.canonical()).expect("requests are UTF-8"))
    }

    pub fn parse_text(text: &str) -> Result<SignedRequest, GateError> {
        let (sig, body) = text.split_once("\n\n").ok_or_else(|| GateError::BadSignatureFile("missing blank separator line".into()))?;
        let bytes = hex::decode(sig.trim()).map_err(|e| GateError::BadSignatureFile(e.to_string()))?;
        let signature: [u8; 64] =
            bytes.try_into().map_err(|b: Vec<u8>| GateError::BadSignatureFile(format!("signature is {} bytes, expected 64", b.len())))?;
        Ok(SignedRequest { request: parse_request(body.as_bytes())?, signature })
    }

    pub fn write(&self, path: &Path) -> Result<(), GateError> {
        write(path, &self.to_text())
    }

    pub fn read(path: &Path) -> Result<SignedRequest, GateError> {
        SignedRequest::parse_text(&read_text(path)?)
    }
}

/// Signs only when the session was intended and the request matches the
/// collected input.
pub fn sign_request(request: &Request, verdict: &SessionVerdict, key: &KeyPair) -> Result<SignedRequest, Refusal> {
    if !verdict.intended() {
        return Err(Refusal::SessionRejected { rules: verdict.rules() });
    }
    match_request(request, &verdict.input_history)?;
    let signature = key.sign_canonical(&canonical_serialize(request));
    Ok(SignedRequest { request: request.clone(), signature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EndCheck;
    use crate::input::InputRecord;

    fn req(pairs: &[(&str, &str)]) -> Request {
        Request::new(pairs.iter().map(|(l, v)| (l.to_string(), v.to_string())).collect()).unwrap()
    }

    fn history(pairs: &[(&str, &str)]) -> InputHistory {
        let mut h = InputHistory::default();
        for (i, (l, v)) in pairs.iter().enumerate() {
            h.fields.insert(format!("in{i}"), InputRecord { label: l.to_string(), value: v.to_string(), ..Default::default() });
        }
        h
    }

    fn verdict(h: InputHistory, ok: bool) -> SessionVerdict {
        SessionVerdict::assemble(Vec::new(), h, EndCheck { passed: ok, detail: String::new() }, 1)
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_serialize(&req(&[("To", "Bob"), ("Amount", "100")])), b"Amount=100\nTo=Bob\n");
        let empty = canonical_serialize(&Request::default());
        assert!(empty.is_empty());
        assert_eq!(hex::encode(signing_input(&empty)), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        let raw = Request { pairs: vec![("Note".into(), "a\nb".into())] };
        assert_eq!(canonical_serialize(&raw), b"Note=a\nb\n");
    }

    #[test]
    fn matching() {
        let h = history(&[("Amount", "100"), ("To", "Bob")]);
        assert!(match_request(&req(&[("To", "Bob"), ("Amount", "100")]), &h).is_ok());
        assert!(matches!(match_request(&req(&[("Amount", "1000"), ("To", "Bob")]), &h), Err(RequestMismatch::ValueDiffers { .. })));
        assert_eq!(match_request(&req(&[("Amount", "100")]), &h), Err(RequestMismatch::MissingLabel("To".into())));
        assert!(matches!(match_request(&req(&[("Amount", "100"), ("To", "Bob"), ("X", "")]), &h), Err(RequestMismatch::UnexpectedLabel(_))));
    }

    #[test]
    fn signing_gate() {
        let key = KeyPair::from_u64(7);
        let h = history(&[("Amount", "100"), ("To", "Bob")]);
        let r = req(&[("Amount", "100"), ("To", "Bob")]);
        let signed = sign_request(&r, &verdict(h.clone(), true), &key).unwrap();
        assert!(signed.verify(&key.public()));
        assert!(matches!(sign_request(&r, &verdict(h, false), &key), Err(Refusal::SessionRejected { .. })));
        let back = SignedRequest::parse_text(&signed.to_text()).unwrap();
        assert_eq!(back, signed);
        let mut sig = signed.signature;
        sig[10] ^= 1;
        assert!(!verify_canonical(&key.public(), &signed.canonical(), &sig));
    }

    #[test]
    fn seeded_keys_are_reproducible() {
        assert_eq!(KeyPair::from_u64(3).public(), KeyPair::from_u64(3).public());
        assert_ne!(KeyPair::from_u64(3).public(), KeyPair::from_u64(4).public());
        assert_ne!(KeyPair::generate().public(), KeyPair::generate().public());
    }
}
