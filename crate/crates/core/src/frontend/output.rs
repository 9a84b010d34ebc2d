use alloc::format;
use alloc::string::ToString;

use crate::verdict::Answer;

const MAX_DIAGNOSTIC: usize = 200;

/// Reads a solver's answer from its standard output. Only the first line
/// that is neither blank nor a `;` comment counts.
pub fn parse_backend_output(text: &str) -> Answer {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with(';'));
    match line {
        Some("sat") => Answer::Sat,
        Some("unsat") => Answer::Unsat,
        Some("unknown") => Answer::Unknown("unknown".to_string()),
        Some(other) => {
            let mut end = other.len().min(MAX_DIAGNOSTIC);
            while !other.is_char_boundary(end) {
                end -= 1;
            }
            Answer::Unknown(format!("unexpected output: {}", &other[..end]))
        }
        None => Answer::Unknown("no output".to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answers() {
        assert_eq!(parse_backend_output("sat\n"), Answer::Sat);
        assert_eq!(parse_backend_output("unsat\n"), Answer::Unsat);
        assert_eq!(parse_backend_output("; banner\n\nunsat\nsat\n"), Answer::Unsat);
        let Answer::Unknown(msg) = parse_backend_output("(error \"line 3: bad\")\n") else {
            panic!("expected unknown");
        };
        assert!(msg.contains("(error \"line 3: bad\")"), "{msg}");
        assert_eq!(parse_backend_output(""), Answer::Unknown("no output".into()));
        assert_eq!(parse_backend_output("unknown\n"), Answer::Unknown("unknown".into()));
    }
}
