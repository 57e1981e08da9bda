//! Reader for saved `curl` commands, as produced by a browser's
//! "Copy as cURL" action and pasted into a backup file.
//!
//! Commands are separated either by newlines (each line starting with
//! `curl`) or by blank lines. A trailing backslash continues a command on
//! the next line. Lines starting with `#` are comments.

use super::request::{RawRequest, Source};
use super::IngestError;

const DATA_FLAGS: &[&str] = &[
    "-d",
    "--data",
    "--data-raw",
    "--data-binary",
    "--data-ascii",
    "--data-urlencode",
    "-F",
    "--form",
];

/// Flags that consume a value we do not otherwise use.
const SKIPPED_VALUE_FLAGS: &[&str] = &[
    "-b",
    "--cookie",
    "-A",
    "--user-agent",
    "-e",
    "--referer",
    "-u",
    "--user",
    "-o",
    "--output",
    "-x",
    "--proxy",
    "-m",
    "--max-time",
    "--connect-timeout",
    "--cacert",
    "--cert",
    "--key",
    "-c",
    "--cookie-jar",
];

pub fn parse_curl_file(text: &str) -> Result<Vec<RawRequest>, IngestError> {
    split_commands(text)
        .into_iter()
        .map(|(line, cmd)| parse_command(&cmd, line))
        .collect()
}

/// Groups physical lines into logical commands, keeping each command's
/// starting line number (1-based).
fn split_commands(text: &str) -> Vec<(usize, String)> {
    let mut commands = Vec::new();
    let mut current: Option<(usize, String)> = None;
    let mut continued = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() && !continued {
            commands.extend(current.take());
            continue;
        }
        if line.starts_with('#') && !continued {
            continue;
        }
        let (body, continues) = match line.strip_suffix('\\') {
            Some(rest) => (rest.trim_end(), true),
            None => (line, false),
        };
        let starts_new = !continued && body.starts_with("curl");
        match current.as_mut() {
            Some((_, cmd)) if !starts_new => {
                cmd.push(' ');
                cmd.push_str(body);
            }
            _ => {
                commands.extend(current.take());
                current = Some((idx + 1, body.to_string()));
            }
        }
        continued = continues;
    }
    commands.extend(current);
    commands
}

fn parse_command(cmd: &str, line: usize) -> Result<RawRequest, IngestError> {
    let err = |message: String| IngestError::Curl { line, message };
    let tokens = shell_words::split(cmd).map_err(|e| err(e.to_string()))?;
    let mut it = tokens.into_iter();
    match it.next().as_deref() {
        Some("curl") => {}
        _ => return Err(err("expected a command starting with `curl`".into())),
    }

    let mut method: Option<String> = None;
    let mut url: Option<String> = None;
    let mut data: Vec<String> = Vec::new();
    let mut content_type: Option<String> = None;
    let mut force_get = false;
    let mut head = false;

    while let Some(tok) = it.next() {
        let (flag, inline) = split_inline(&tok);
        let mut value = |name: &str| -> Result<String, IngestError> {
            match inline.clone() {
                Some(v) => Ok(v),
                None => it
                    .next()
                    .ok_or_else(|| err(format!("flag {name} expects a value"))),
            }
        };
        match flag {
            "-X" | "--request" => method = Some(value(flag)?),
            "-H" | "--header" => {
                let h = value(flag)?;
                if let Some((name, v)) = h.split_once(':') {
                    if name.trim().eq_ignore_ascii_case("content-type") {
                        content_type = Some(v.trim().to_string());
                    }
                }
            }
            "--url" => url = Some(value(flag)?),
            "-G" | "--get" => force_get = true,
            "-I" | "--head" => head = true,
            f if DATA_FLAGS.contains(&f) => data.push(value(f)?),
            f if SKIPPED_VALUE_FLAGS.contains(&f) => {
                value(f)?;
            }
            f if f.starts_with('-') && f.len() > 1 => {}
            _ => {
                if url.is_none() {
                    url = Some(tok);
                }
            }
        }
    }

    let mut url = url.ok_or_else(|| err("no URL in curl command".into()))?;
    let mut body = (!data.is_empty()).then(|| data.join("&"));
    if force_get {
        if let Some(query) = body.take() {
            url.push(if url.contains('?') { '&' } else { '?' });
            url.push_str(&query);
        }
    }
    let method = match method {
        Some(m) => m,
        None if head => "HEAD".into(),
        None if body.is_some() => "POST".into(),
        None => "GET".into(),
    };
    if body.is_some() && content_type.is_none() {
        content_type = Some("application/x-www-form-urlencoded".into());
    }

    RawRequest::new(
        &method,
        &url,
        content_type,
        body.map(String::into_bytes),
        Source::CurlFile,
    )
    .map_err(|e| err(e.to_string()))
}

/// Splits `--flag=value` and `-Xvalue` forms.
fn split_inline(tok: &str) -> (&str, Option<String>) {
    if let Some(rest) = tok.strip_prefix("--") {
        if let Some((name, v)) = rest.split_once('=') {
            return (&tok[..name.len() + 2], Some(v.to_string()));
        }
        return (tok, None);
    }
    if tok.len() > 2 && tok.starts_with('-') && tok.is_char_boundary(2) {
        let short = &tok[..2];
        if matches!(short, "-X" | "-H" | "-d") {
            return (short, Some(tok[2..].to_string()));
        }
    }
    (tok, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_url_defaults_to_get() {
        let reqs = parse_curl_file("curl 'https://a.example/x'").unwrap();
        assert_eq!(reqs.len(), 1);
        assert_eq!(reqs[0].method, "GET");
        assert_eq!(reqs[0].host, "a.example");
        assert!(reqs[0].body.is_none());
        assert_eq!(reqs[0].source, Source::CurlFile);
    }

    #[test]
    fn explicit_post_with_json() {
        let reqs = parse_curl_file(
            r#"curl -X POST -H 'Content-Type: application/json' --data '{"appid":"1"}' https://ads.example/b"#,
        )
        .unwrap();
        let r = &reqs[0];
        assert_eq!(r.method, "POST");
        assert_eq!(r.host, "ads.example");
        assert_eq!(r.content_type.as_deref(), Some("application/json"));
        assert_eq!(r.body.as_deref(), Some(&br#"{"appid":"1"}"#[..]));
    }

    // curl --trace shows "POST /c HTTP/1.1" for a bare --data invocation.
    #[test]
    fn data_flag_implies_post() {
        let reqs = parse_curl_file("curl --data 'k=v' https://t.example/c").unwrap();
        assert_eq!(reqs[0].method, "POST");
        assert_eq!(reqs[0].body.as_deref(), Some(&b"k=v"[..]));
        assert_eq!(
            reqs[0].content_type.as_deref(),
            Some("application/x-www-form-urlencoded")
        );
    }

    #[test]
    fn multiple_data_flags_join_with_ampersand() {
        let reqs = parse_curl_file("curl -d a=1 -d b=2 https://t.example/").unwrap();
        assert_eq!(reqs[0].body.as_deref(), Some(&b"a=1&b=2"[..]));
    }

    #[test]
    fn get_flag_moves_data_to_query() {
        let reqs = parse_curl_file("curl -G -d q=1 'https://t.example/s?x=2'").unwrap();
        assert_eq!(reqs[0].method, "GET");
        assert!(reqs[0].body.is_none());
        assert_eq!(reqs[0].url, "https://t.example/s?x=2&q=1");
    }

    #[test]
    fn one_command_per_line() {
        let text = "curl https://a.example/\ncurl -XPOST https://b.example/\n";
        let reqs = parse_curl_file(text).unwrap();
        assert_eq!(reqs.len(), 2);
        assert_eq!(reqs[1].method, "POST");
    }

    #[test]
    fn continuation_and_blank_line_blocks() {
        let text = "# saved from devtools\n\
                    curl 'https://ads.example/bid' \\\n  \
                    -H 'content-type: application/json' \\\n  \
                    --data-raw '{\"imp\":[1]}' \\\n  \
                    --compressed\n\
                    \n\
                    curl 'https://cooking.example/'\n\
                      -H 'accept: */*'\n";
        let reqs = parse_curl_file(text).unwrap();
        assert_eq!(reqs.len(), 2);
        assert_eq!(reqs[0].method, "POST");
        assert_eq!(reqs[0].content_type.as_deref(), Some("application/json"));
        assert_eq!(reqs[1].host, "cooking.example");
        assert_eq!(reqs[1].method, "GET");
    }

    #[test]
    fn skipped_value_flags_do_not_steal_the_url() {
        let reqs =
            parse_curl_file("curl -b 'sid=1' -A 'Mozilla/5.0' --url https://x.example/p").unwrap();
        assert_eq!(reqs[0].host, "x.example");
    }

    #[test]
    fn missing_url_reports_line_number() {
        let text = "curl https://a.example/\n\ncurl -X POST -H 'A: b'\n";
        match parse_curl_file(text).unwrap_err() {
            IngestError::Curl { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("no URL"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbalanced_quote_is_an_error() {
        assert!(matches!(
            parse_curl_file("curl 'https://a.example/"),
            Err(IngestError::Curl { line: 1, .. })
        ));
    }
}
