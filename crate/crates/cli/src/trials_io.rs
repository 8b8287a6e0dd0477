//! Trial data CSV: header `trial,choice1,state2,choice2,reward`, 0-indexed
//! categorical columns, 1-based trial numbers.

use anyhow::{bail, Context};
use cvar_core::twostep::TrialRecord;

pub const TRIALS_HEADER: &str = "trial,choice1,state2,choice2,reward";

pub fn trials_to_csv(trials: &[TrialRecord]) -> String {
    let mut out = String::from(TRIALS_HEADER);
    out.push('\n');
    for (i, t) in trials.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            t.choice1,
            t.state2,
            t.choice2,
            t.reward
        ));
    }
    out
}

pub fn trials_from_csv(text: &str) -> anyhow::Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.trim() != TRIALS_HEADER {
        bail!("malformed trials file: header must be `{TRIALS_HEADER}`, got `{header}`");
    }
    let mut trials = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let row = lineno + 2; // 1-based, after the header
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            bail!("malformed trials file: row {row} has {} fields, expected 5", fields.len());
        }
        let parse = |name: &str, raw: &str| -> anyhow::Result<u8> {
            let v: i64 = raw
                .trim()
                .parse()
                .with_context(|| format!("row {row}: field `{name}` is not an integer (got `{raw}`)"))?;
            if !(0..=1).contains(&v) {
                bail!("row {row}: field `{name}` out of range (got {v})");
            }
            Ok(v as u8)
        };
        trials.push(TrialRecord {
            choice1: parse("choice1", fields[1])?,
            state2: parse("state2", fields[2])?,
            choice2: parse("choice2", fields[3])?,
            reward: parse("reward", fields[4])?,
        });
    }
    if trials.is_empty() {
        bail!("malformed trials file: no data rows");
    }
    Ok(trials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let trials = vec![
            TrialRecord { choice1: 0, state2: 0, choice2: 1, reward: 1 },
            TrialRecord { choice1: 1, state2: 0, choice2: 0, reward: 0 },
        ];
        let csv = trials_to_csv(&trials);
        let back = trials_from_csv(&csv).unwrap();
        assert_eq!(back, trials);
    }

    #[test]
    fn errors_name_the_offending_field() {
        let text = "trial,choice1,state2,choice2,reward\n1,0,2,0,1\n";
        let err = trials_from_csv(text).unwrap_err().to_string();
        assert!(err.contains("state2"), "{err}");
        let text = "trial,choice1,state2,choice2,reward\n1,0,x,0,1\n";
        let err = format!("{:#}", trials_from_csv(text).unwrap_err());
        assert!(err.contains("state2"), "{err}");
    }

    #[test]
    fn header_is_checked() {
        assert!(trials_from_csv("a,b,c\n").is_err());
    }
}
