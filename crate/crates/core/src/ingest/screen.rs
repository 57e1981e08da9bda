//! Two-stage screening: a request is flagged invasive only when its payload
//! looks like tracking data *and* it goes to a domain unrelated to the site
//! being visited. Mixed cases are left for a human.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::payload::PayloadProfile;
use super::request::RawRequest;
use super::IngestError;

/// Payload keys treated as suspicious when no configuration is given.
pub const DEFAULT_SUSPECT_KEYS: &[&str] = &["isprebid", "appid", "domain", "imp"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Invasive,
    Benign,
    NeedsReview,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Invasive => "invasive",
            Label::Benign => "benign",
            Label::NeedsReview => "needs-review",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScreenVerdict {
    pub suspicious_payload: bool,
    pub unrelated_domain: bool,
    pub recommended_label: Label,
}

impl ScreenVerdict {
    pub fn from_flags(suspicious_payload: bool, unrelated_domain: bool) -> Self {
        let recommended_label = match (suspicious_payload, unrelated_domain) {
            (true, true) => Label::Invasive,
            (false, false) => Label::Benign,
            _ => Label::NeedsReview,
        };
        ScreenVerdict {
            suspicious_payload,
            unrelated_domain,
            recommended_label,
        }
    }
}

/// Operator-supplied screening configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreenConfig {
    pub site_domain: String,
    pub suspect_keys: BTreeSet<String>,
    pub related_domains: BTreeSet<String>,
}

impl ScreenConfig {
    pub fn new(site_domain: &str) -> Result<Self, IngestError> {
        let site_domain = normalize_domain(site_domain);
        if site_domain.is_empty() {
            return Err(IngestError::EmptySiteDomain);
        }
        Ok(ScreenConfig {
            site_domain,
            suspect_keys: DEFAULT_SUSPECT_KEYS.iter().map(|k| k.to_string()).collect(),
            related_domains: BTreeSet::new(),
        })
    }

    pub fn with_suspect_keys<I, S>(mut self, keys: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.suspect_keys = keys.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_related<I, S>(mut self, domains: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.related_domains = domains
            .into_iter()
            .map(|d| normalize_domain(d.as_ref()))
            .filter(|d| !d.is_empty())
            .collect();
        self
    }

    pub fn screen(&self, req: &RawRequest, profile: &PayloadProfile) -> ScreenVerdict {
        screen_request(
            req,
            profile,
            &self.site_domain,
            &self.suspect_keys,
            &self.related_domains,
        )
    }
}

impl FromStr for ScreenConfig {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScreenConfig::new(s)
    }
}

pub fn screen_request(
    req: &RawRequest,
    profile: &PayloadProfile,
    site_domain: &str,
    suspect_keys: &BTreeSet<String>,
    related_domains: &BTreeSet<String>,
) -> ScreenVerdict {
    let suspicious = profile
        .top_level_keys
        .iter()
        .any(|k| suspect_keys.contains(k));
    let host = normalize_domain(&req.host);
    let site = normalize_domain(site_domain);
    let related = is_same_or_subdomain(&host, &site) || related_domains.contains(&host);
    ScreenVerdict::from_flags(suspicious, !related)
}

/// `host` equals `domain` or sits below it on a label boundary.
pub fn is_same_or_subdomain(host: &str, domain: &str) -> bool {
    host == domain
        || host
            .strip_suffix(domain)
            .is_some_and(|prefix| prefix.ends_with('.'))
}

fn normalize_domain(d: &str) -> String {
    d.trim().trim_end_matches('.').to_ascii_lowercase()
}
