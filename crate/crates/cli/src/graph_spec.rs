//! `complete:<N>` | `hypercube:<n>` | `lattice:<d>:<L>`.

use thiserror::Error;
use walksearch::GraphFamily;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    /// `position` is the 0-based byte offset of the offending character.
    #[error("syntax error at position {position} in {text:?}: {message}")]
    Syntax {
        text: String,
        position: usize,
        message: String,
    },
    #[error("range error in {text:?}: {message}")]
    Range { text: String, message: String },
}

fn syntax(text: &str, position: usize, message: impl Into<String>) -> SpecError {
    SpecError::Syntax {
        text: text.to_string(),
        position,
        message: message.into(),
    }
}

fn range(text: &str, message: impl Into<String>) -> SpecError {
    SpecError::Range {
        text: text.to_string(),
        message: message.into(),
    }
}

/// Splits on ':' keeping the byte offset of each field.
fn fields(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c == ':' {
            out.push((start, &text[start..i]));
            start = i + 1;
        }
    }
    out.push((start, &text[start..]));
    out
}

fn number(text: &str, (pos, field): (usize, &str), what: &str) -> Result<u64, SpecError> {
    if field.is_empty() {
        return Err(syntax(text, pos, format!("expected {what}")));
    }
    if let Some((i, c)) = field.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
        return Err(syntax(
            text,
            pos + i,
            format!("unexpected {c:?} in {what}, expected a digit"),
        ));
    }
    field
        .parse()
        .map_err(|_| range(text, format!("{what} {field} is too large")))
}

pub fn parse_graph_spec(text: &str) -> Result<GraphFamily, SpecError> {
    let parts = fields(text);
    let (_, name) = parts[0];
    let expected = match name {
        "complete" | "hypercube" => 2,
        "lattice" => 3,
        _ => {
            return Err(syntax(
                text,
                0,
                "expected one of complete, hypercube, lattice",
            ))
        }
    };
    if parts.len() < expected {
        return Err(syntax(text, text.len(), "expected ':'"));
    }
    if parts.len() > expected {
        let (pos, _) = parts[expected];
        return Err(syntax(text, pos - 1, "unexpected trailing ':'"));
    }
    let family = match name {
        "complete" => {
            let n = number(text, parts[1], "vertex count")?;
            if n < 2 {
                return Err(range(text, format!("complete graph needs N >= 2, got {n}")));
            }
            GraphFamily::Complete {
                num_vertices: n as usize,
            }
        }
        "hypercube" => {
            let n = number(text, parts[1], "bit count")?;
            if !(1..=40).contains(&n) {
                return Err(range(
                    text,
                    format!("hypercube needs 1 <= n <= 40, got {n}"),
                ));
            }
            GraphFamily::Hypercube { num_bits: n as u32 }
        }
        _ => {
            let d = number(text, parts[1], "dimension")?;
            let side = number(text, parts[2], "side")?;
            if !(1..=64).contains(&d) {
                return Err(range(text, format!("lattice needs 1 <= d <= 64, got {d}")));
            }
            if side < 2 {
                return Err(range(
                    text,
                    format!("lattice side must be at least 2, got {side}"),
                ));
            }
            GraphFamily::Lattice {
                dim: d as u32,
                side: side as usize,
            }
        }
    };
    family.validate().map_err(|e| range(text, e.to_string()))?;
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_point_at_the_fault() {
        match parse_graph_spec("lattice:4x:6") {
            Err(SpecError::Syntax { position, .. }) => assert_eq!(position, 9),
            other => panic!("{other:?}"),
        }
        match parse_graph_spec("complete") {
            Err(SpecError::Syntax { position, .. }) => assert_eq!(position, 8),
            other => panic!("{other:?}"),
        }
        match parse_graph_spec("hypercube:3:1") {
            Err(SpecError::Syntax { position, .. }) => assert_eq!(position, 11),
            other => panic!("{other:?}"),
        }
        match parse_graph_spec("torus:3") {
            Err(SpecError::Syntax { position, .. }) => assert_eq!(position, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trips_labels() {
        for s in ["complete:1024", "hypercube:10", "lattice:2:32"] {
            assert_eq!(parse_graph_spec(s).unwrap().label(), s);
        }
    }
}
