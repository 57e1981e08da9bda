//! Shared helpers for the CLI test targets.
#![allow(dead_code)]

use std::path::Path;

use serde_json::{json, Value};
use trackwall_cli::{run_command, CommandOutcome};

pub const SITE: &str = "cooking.example";
const FIRST_PARTY: &[&str] = &[
    "cooking.example",
    "cdn.cooking.example",
    "api.cooking.example",
];
const THIRD_PARTY: &[&str] = &[
    "ads.example",
    "bidder.test",
    "metrics.example",
    "pixel.test",
];
const NOISE_KEYS: &[&str] = &["appid", "imp", "page", "uid", "q", "ts"];

/// Result of a command run with captured streams.
pub struct Run {
    pub outcome: CommandOutcome,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str], stdin: &str) -> Run {
    let mut argv = vec!["trackwall"];
    argv.extend_from_slice(args);
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let outcome = run_command(&argv, &mut input, &mut out, &mut err);
    Run {
        outcome,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Deterministic xorshift stream.
pub struct Rng(pub u64);

impl Rng {
    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn coin(&mut self) -> bool {
        self.next() & 1 == 1
    }

    pub fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs[(self.next() % xs.len() as u64) as usize]
    }
}

/// A HAR capture in which a request is invasive exactly when its JSON body
/// carries `isprebid` and it goes to a third-party host. First-party
/// requests always carry `csrf_token`, which makes the host visible to the
/// feature set. Returns the HAR text and the planted label per request.
pub fn planted_har(n: usize, seed: u64) -> (String, Vec<u8>) {
    let mut rng = Rng(seed | 1);
    let mut entries = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let third = rng.coin();
        let host = rng.pick(if third { THIRD_PARTY } else { FIRST_PARTY });
        let url = format!("https://{host}/r/{i}?v={}", rng.next() % 97);
        let mut body = serde_json::Map::new();
        if !third {
            body.insert("csrf_token".into(), json!("t"));
        }
        let prebid = rng.coin();
        if prebid {
            body.insert("isprebid".into(), json!(true));
        }
        for k in NOISE_KEYS {
            if rng.next().is_multiple_of(3) {
                body.insert((*k).into(), json!(1));
            }
        }
        let request = if body.is_empty() {
            json!({"method": "GET", "url": url, "headers": []})
        } else {
            json!({
                "method": "POST",
                "url": url,
                "headers": [{"name": "Content-Type", "value": "application/json"}],
                "postData": {"mimeType": "application/json", "text": Value::Object(body).to_string()}
            })
        };
        entries.push(json!({"request": request, "response": {"status": 200}}));
        labels.push(u8::from(prebid && third));
    }
    let har = json!({"log": {"version": "1.2", "creator": {"name": "gen"}, "entries": entries}});
    (har.to_string(), labels)
}

/// Ingests a planted capture, answers "n" for every pending row and
/// returns the path of the labeled CSV.
pub fn planted_dataset(dir: &Path, n: usize, seed: u64) -> std::path::PathBuf {
    let (har, _) = planted_har(n, seed);
    let har_path = dir.join("capture.har");
    std::fs::write(&har_path, har).unwrap();
    let csv = dir.join("review.csv");
    let r = run(
        &[
            "ingest",
            "har",
            p(&har_path),
            "--out",
            p(&csv),
            "--site",
            SITE,
            "--suspect-keys",
            "isprebid",
        ],
        "",
    );
    assert_eq!(r.outcome.exit_code, 0, "{}", r.stderr);
    let r = run(&["label", p(&csv)], &"n\n".repeat(n));
    assert_eq!(r.outcome.exit_code, 0, "{}", r.stderr);
    csv
}
