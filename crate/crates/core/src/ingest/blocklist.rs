//! Hosts-format blocklist, in the style of a DNS sinkhole: every invasive
//! destination is mapped to a sink address.

use std::collections::BTreeSet;
use std::fmt;
use std::net::Ipv4Addr;

use super::dataset::LabeledRecord;
use super::IngestError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocklist {
    domains: BTreeSet<String>,
    sink: Ipv4Addr,
}

impl Default for Blocklist {
    fn default() -> Self {
        Blocklist::new(Ipv4Addr::UNSPECIFIED)
    }
}

impl Blocklist {
    pub fn new(sink: Ipv4Addr) -> Self {
        Blocklist {
            domains: BTreeSet::new(),
            sink,
        }
    }

    /// Adds a host after lowercasing it. Hosts that would not be valid in a
    /// hosts file are refused.
    pub fn insert(&mut self, host: &str) -> bool {
        let host = host.trim().trim_end_matches('.').to_ascii_lowercase();
        if !is_hosts_name(&host) {
            return false;
        }
        self.domains.insert(host);
        true
    }

    pub fn domains(&self) -> impl Iterator<Item = &str> {
        self.domains.iter().map(String::as_str)
    }

    pub fn sink(&self) -> Ipv4Addr {
        self.sink
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }
}

impl fmt::Display for Blocklist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.domains {
            writeln!(f, "{} {}", self.sink, d)?;
        }
        Ok(())
    }
}

fn is_hosts_name(host: &str) -> bool {
    !host.is_empty()
        && host
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'.' || b == b'-')
}

pub fn emit_blocklist(records: &[LabeledRecord], sink: &str) -> Result<String, IngestError> {
    let sink: Ipv4Addr = sink
        .trim()
        .parse()
        .map_err(|_| IngestError::InvalidSink(sink.to_string()))?;
    let mut list = Blocklist::new(sink);
    for r in records.iter().filter(|r| r.invasive == 1) {
        list.insert(&r.url);
    }
    Ok(list.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(invasive: u8, url: &str) -> LabeledRecord {
        LabeledRecord {
            invasive,
            url: url.into(),
            req_type: "POST".into(),
            is_json: true,
            payload_keys: BTreeSet::new(),
        }
    }

    #[test]
    fn sorted_lines() {
        let out = emit_blocklist(&[rec(1, "b.example"), rec(1, "a.example")], "0.0.0.0").unwrap();
        assert_eq!(out, "0.0.0.0 a.example\n0.0.0.0 b.example\n");
    }

    #[test]
    fn no_invasive_records() {
        assert_eq!(
            emit_blocklist(&[rec(0, "a.example")], "0.0.0.0").unwrap(),
            ""
        );
    }

    #[test]
    fn duplicates_collapse() {
        let out = emit_blocklist(
            &[
                rec(1, "ads.example"),
                rec(1, "ADS.example"),
                rec(0, "ok.example"),
            ],
            "127.0.0.1",
        )
        .unwrap();
        assert_eq!(out, "127.0.0.1 ads.example\n");
    }

    #[test]
    fn invalid_sink() {
        for sink in ["", "localhost", "256.0.0.1", "::1"] {
            assert!(matches!(
                emit_blocklist(&[rec(1, "a.example")], sink),
                Err(IngestError::InvalidSink(_))
            ));
        }
    }

    #[test]
    fn refuses_names_outside_hosts_grammar() {
        let mut b = Blocklist::default();
        assert!(!b.insert("under_score.example"));
        assert!(!b.insert("https://a.example/x"));
        assert!(b.insert("Trk-1.Example."));
        assert_eq!(b.to_string(), "0.0.0.0 trk-1.example\n");
    }
}
