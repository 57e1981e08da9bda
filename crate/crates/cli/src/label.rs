//! Terminal labeling of a review CSV.

use std::path::Path;

use trackwall::ingest::{export_review_csv, parse_review_csv, ReviewRow};

use super::{data, read_text, runtime, with_path, write_file, CliError, Done, Io};

enum Answer {
    Set(u8),
    Keep,
    Quit,
}

fn parse_answer(line: &str) -> Option<Answer> {
    match line.trim().to_ascii_lowercase().as_str() {
        "y" | "yes" | "1" => Some(Answer::Set(1)),
        "n" | "no" | "0" => Some(Answer::Set(0)),
        "" | "s" | "skip" => Some(Answer::Keep),
        "q" | "quit" => Some(Answer::Quit),
        _ => None,
    }
}

fn describe(row: &ReviewRow) -> String {
    let r = &row.record;
    let keys: Vec<&str> = r.payload_keys.iter().map(String::as_str).collect();
    let current = match row.label {
        Some(1) => "invasive",
        Some(_) => "benign",
        None => "pending",
    };
    format!(
        "{} {} json={} keys=[{}] ({current})",
        r.req_type,
        r.url,
        u8::from(r.is_json),
        keys.join(",")
    )
}

/// Prompts for each pending row (every row with `all`). Blank input keeps
/// the current value, `q` or end of input stops and saves what was done.
pub(crate) fn run(csv: &Path, out: &Path, all: bool, io: &mut Io<'_>) -> Result<Done, CliError> {
    let mut rows = parse_review_csv(&read_text(csv)?).map_err(|e| with_path(csv)(&e))?;
    let targets: Vec<usize> = (0..rows.len())
        .filter(|&i| all || rows[i].label.is_none())
        .collect();

    let mut changed = 0;
    'rows: for (n, &i) in targets.iter().enumerate() {
        loop {
            write!(
                io.stdout,
                "[{}/{}] {}\ninvasive? [y/n, enter to skip, q to quit] ",
                n + 1,
                targets.len(),
                describe(&rows[i])
            )
            .map_err(runtime)?;
            io.stdout.flush().map_err(runtime)?;
            let mut line = String::new();
            if io.stdin.read_line(&mut line).map_err(runtime)? == 0 {
                writeln!(io.stdout).map_err(runtime)?;
                break 'rows;
            }
            match parse_answer(&line) {
                Some(Answer::Set(v)) => {
                    if rows[i].label != Some(v) {
                        changed += 1;
                    }
                    rows[i].label = Some(v);
                    rows[i].record.invasive = v;
                    break;
                }
                Some(Answer::Keep) => break,
                Some(Answer::Quit) => break 'rows,
                None => writeln!(io.stdout, "please answer y, n, enter or q").map_err(runtime)?,
            }
        }
    }

    let text = export_review_csv(&rows).map_err(data)?;
    write_file(out, text.as_bytes())?;
    let pending = rows.iter().filter(|r| r.label.is_none()).count();
    let summary = format!("labeled={changed} pending={pending}");
    writeln!(io.stdout, "{summary}").map_err(runtime)?;
    Ok(Done::new(summary))
}
