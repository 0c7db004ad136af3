//! Line-oriented circuit files.
//!
//! ```text
//! circuit   := header element*
//! header    := "paths" INT NL ["modulus" INT NL] source NL
//! source    := "source" INT | "source-superposition" REAL+
//! element   := ("bs" INT INT RATIO | "bomb" INT ("live"|"dud") | "dephase" INT | "detect" INT LABEL) NL
//! RATIO     := INT "/" INT
//! REAL      := decimal | ["-"] "sqrt(" INT "/" INT ")"
//! ```
//!
//! `#` starts a comment that runs to the end of the line; blank lines are ignored.

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{AmplitudeSpec, Circuit, CircuitError, Element, Source};
use crate::ratio::BeamsplitterRatio;

/// One problem at a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseError {
    fn single(line: usize, message: impl Into<String>) -> Self {
        Self {
            diagnostics: vec![Diagnostic {
                line,
                message: message.into(),
            }],
        }
    }

    pub fn first_line(&self) -> usize {
        self.diagnostics.first().map_or(0, |d| d.line)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parses and validates a circuit file.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let (circuit, lines) = parse_with_lines(text)?;
    circuit.validate().map_err(|issues| ParseError {
        diagnostics: issues
            .into_iter()
            .map(|i| Diagnostic {
                line: lines[i.element],
                message: i.message,
            })
            .collect(),
    })?;
    Ok(circuit)
}

/// Syntax-level parse without the semantic checks of [`Circuit::validate`].
pub fn parse_unchecked(text: &str) -> Result<Circuit, ParseError> {
    parse_with_lines(text).map(|(c, _)| c)
}

fn parse_with_lines(text: &str) -> Result<(Circuit, Vec<usize>), ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            (
                i + 1,
                l.split('#')
                    .next()
                    .unwrap_or("")
                    .split_whitespace()
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|(_, tokens)| !tokens.is_empty());
    let eof = text.lines().count() + 1;

    let (line, tokens) = lines
        .next()
        .ok_or_else(|| ParseError::single(eof, "missing `paths` header"))?;
    let paths = match tokens.as_slice() {
        ["paths", n] => parse_int::<usize>(n).map_err(|m| ParseError::single(line, m))?,
        [head, ..] => {
            return Err(ParseError::single(
                line,
                format!("expected `paths <count>`, found `{head}`"),
            ))
        }
        [] => unreachable!(),
    };

    let (mut line, mut tokens) = lines
        .next()
        .ok_or_else(|| ParseError::single(eof, "missing `source` line"))?;
    let mut modulus = None;
    if tokens[0] == "modulus" {
        let m = match tokens.as_slice() {
            [_, m] => parse_int::<u64>(m).map_err(|e| ParseError::single(line, e))?,
            _ => return Err(ParseError::single(line, "expected `modulus <n>`")),
        };
        if m < 2 {
            return Err(ParseError::single(
                line,
                format!("modulus must be at least 2, got {m}"),
            ));
        }
        modulus = Some(m);
        (line, tokens) = lines
            .next()
            .ok_or_else(|| ParseError::single(eof, "missing `source` line"))?;
    }

    let source = match tokens.as_slice() {
        ["source", p] => Source::Path(parse_int(p).map_err(|m| ParseError::single(line, m))?),
        ["source-superposition", reals @ ..] if !reals.is_empty() => Source::Superposition(
            reals
                .iter()
                .map(|r| parse_amplitude(r))
                .collect::<Result<_, _>>()
                .map_err(|m| ParseError::single(line, m))?,
        ),
        [head, ..] => {
            return Err(ParseError::single(
                line,
                format!("expected a source declaration, found `{head}`"),
            ))
        }
        [] => unreachable!(),
    };
    let mut circuit = Circuit::new(paths, source)
        .map_err(|e| ParseError::single(line, e.to_string()))?
        .with_modulus(modulus);

    let mut diagnostics = Vec::new();
    let mut element_lines = Vec::new();
    for (line, tokens) in lines {
        let result = parse_element(&tokens).and_then(|e| {
            circuit
                .push(e)
                .map(|_| ())
                .map_err(|e: CircuitError| e.to_string())
        });
        match result {
            Ok(()) => element_lines.push(line),
            Err(message) => diagnostics.push(Diagnostic { line, message }),
        }
    }
    if diagnostics.is_empty() {
        Ok((circuit, element_lines))
    } else {
        Err(ParseError { diagnostics })
    }
}

fn parse_element(tokens: &[&str]) -> Result<Element, String> {
    match tokens {
        ["bs", upper, lower, ratio] => Ok(Element::Beamsplitter {
            upper: parse_int(upper)?,
            lower: parse_int(lower)?,
            ratio: ratio
                .parse::<BeamsplitterRatio>()
                .map_err(|e| format!("malformed ratio: {e}"))?,
        }),
        ["bomb", path, "live"] => Ok(Element::Bomb {
            path: parse_int(path)?,
            live: true,
        }),
        ["bomb", path, "dud"] => Ok(Element::Bomb {
            path: parse_int(path)?,
            live: false,
        }),
        ["bomb", _, mode] => Err(format!("bomb mode must be `live` or `dud`, found `{mode}`")),
        ["dephase", path] => Ok(Element::Dephaser {
            path: parse_int(path)?,
        }),
        ["detect", path, label] => Ok(Element::Detector {
            path: parse_int(path)?,
            label: label.to_string(),
        }),
        ["paths" | "modulus" | "source" | "source-superposition", ..] => {
            Err(format!("header directive `{}` after the header", tokens[0]))
        }
        [op @ ("bs" | "bomb" | "dephase" | "detect"), ..] => {
            Err(format!("wrong number of arguments for `{op}`"))
        }
        [head, ..] => Err(format!("unknown directive `{head}`")),
        [] => Err("empty element".to_string()),
    }
}

fn parse_int<T: std::str::FromStr>(token: &str) -> Result<T, String> {
    if !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a non-negative integer, found `{token}`"));
    }
    token
        .parse()
        .map_err(|_| format!("integer `{token}` out of range"))
}

fn parse_amplitude(token: &str) -> Result<AmplitudeSpec, String> {
    let (negative, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    if let Some(inner) = body.strip_prefix("sqrt(").and_then(|b| b.strip_suffix(')')) {
        let (p, q) = inner
            .split_once('/')
            .ok_or_else(|| format!("expected sqrt(p/q), found `{token}`"))?;
        let p: u64 = parse_int(p)?;
        let q: u64 = parse_int(q)?;
        if q == 0 {
            return Err(format!("zero denominator in `{token}`"));
        }
        return Ok(AmplitudeSpec::sqrt(negative, p, q));
    }
    match token.parse::<f64>() {
        Ok(x)
            if x.is_finite()
                && !body.starts_with(['+', '-'])
                && !body.contains(char::is_alphabetic) =>
        {
            Ok(AmplitudeSpec::Decimal(x))
        }
        _ => Err(format!("malformed amplitude `{token}`")),
    }
}

/// Canonical text form: header lines, then one element per line.
pub fn serialize(circuit: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "paths {}", circuit.paths()).unwrap();
    if let Some(m) = circuit.modulus() {
        writeln!(out, "modulus {m}").unwrap();
    }
    match circuit.source() {
        Source::Path(p) => writeln!(out, "source {p}").unwrap(),
        Source::Superposition(amps) => {
            out.push_str("source-superposition");
            for a in amps {
                write!(out, " {a}").unwrap();
            }
            out.push('\n');
        }
    }
    for element in circuit.elements() {
        match element {
            Element::Beamsplitter {
                upper,
                lower,
                ratio,
            } => writeln!(out, "bs {upper} {lower} {ratio}"),
            Element::Bomb { path, live } => {
                writeln!(out, "bomb {path} {}", if *live { "live" } else { "dud" })
            }
            Element::Dephaser { path } => writeln!(out, "dephase {path}"),
            Element::Detector { path, label } => writeln!(out, "detect {path} {label}"),
        }
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EV_LIVE: &str =
        "paths 2\nsource 0\nbs 0 1 1/2\nbomb 0 live\nbs 0 1 1/2\ndetect 0 upper\ndetect 1 lower";

    fn lines_of(err: ParseError) -> Vec<usize> {
        err.diagnostics.iter().map(|d| d.line).collect()
    }

    #[test]
    fn parses_balanced_ev() {
        let c = parse(EV_LIVE).unwrap();
        assert_eq!(c.paths(), 2);
        assert_eq!(c.source(), &Source::Path(0));
        assert_eq!(c.elements().len(), 5);
        assert_eq!(
            c.elements()[1],
            Element::Bomb {
                path: 0,
                live: true
            }
        );
        assert_eq!(serialize(&c), format!("{EV_LIVE}\n"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# bomb tester\n\npaths 2   # two arms\nmodulus 4\nsource 1\n\nbs 1 0 2/4\ndetect 0 a # top\n";
        let c = parse(text).unwrap();
        assert_eq!(c.modulus(), Some(4));
        assert_eq!(
            c.elements()[0],
            Element::Beamsplitter {
                upper: 1,
                lower: 0,
                ratio: BeamsplitterRatio::new(1, 2).unwrap()
            }
        );
        assert_eq!(
            serialize(&c),
            "paths 2\nmodulus 4\nsource 1\nbs 1 0 1/2\ndetect 0 a\n"
        );
    }

    #[test]
    fn superposition_source() {
        let c = parse("paths 3\nsource-superposition sqrt(1/3) -sqrt(2/6) 0.5773502691896258\n")
            .unwrap();
        let Source::Superposition(a) = c.source() else {
            panic!()
        };
        assert_eq!(
            a[1],
            AmplitudeSpec::Sqrt {
                negative: true,
                num: 1,
                den: 3
            }
        );
        assert_eq!(a[2], AmplitudeSpec::Decimal(0.5773502691896258));
        assert_eq!(parse(&serialize(&c)).unwrap(), c);
    }

    #[test]
    fn malformed_ratio() {
        let err = parse("paths 2\nsource 0\nbs 0 1 3/2\n").unwrap_err();
        assert_eq!(lines_of(err.clone()), vec![3]);
        assert!(err.to_string().contains("malformed ratio"), "{err}");
        assert!(parse("paths 2\nsource 0\nbs 0 1 1/0\n")
            .unwrap_err()
            .to_string()
            .contains("line 3"));
    }

    #[test]
    fn header_errors() {
        assert_eq!(lines_of(parse("").unwrap_err()), vec![1]);
        assert_eq!(lines_of(parse("source 0\n").unwrap_err()), vec![1]);
        assert_eq!(lines_of(parse("paths 2\n").unwrap_err()), vec![2]);
        assert_eq!(
            lines_of(parse("paths 2\nmodulus 1\nsource 0").unwrap_err()),
            vec![2]
        );
        assert_eq!(lines_of(parse("paths 2\nsource 5").unwrap_err()), vec![2]);
        assert_eq!(lines_of(parse("paths x\nsource 0").unwrap_err()), vec![1]);
        assert_eq!(
            lines_of(parse("paths 3\nsource-superposition 1 0").unwrap_err()),
            vec![2]
        );
        assert_eq!(
            lines_of(parse("paths 2\nsource-superposition 1 nan").unwrap_err()),
            vec![2]
        );
    }

    #[test]
    fn element_errors_collect_all_lines() {
        let text =
            "paths 2\nsource 0\nfoo 1\nbs 0 3 1/2\nbomb 0 maybe\ndetect 0\nsource 1\nbs 0 1 1/2\n";
        assert_eq!(lines_of(parse(text).unwrap_err()), vec![3, 4, 5, 6, 7]);
    }

    #[test]
    fn semantic_errors_carry_lines() {
        let dup = "paths 2\nsource 0\ndetect 0 a\ndetect 1 a\n";
        let err = parse(dup).unwrap_err();
        assert_eq!(lines_of(err.clone()), vec![4]);
        assert!(err.to_string().contains("duplicate"));

        let after = "paths 2\nsource 0\n# read the top arm\ndetect 0 a\nbs 0 1 1/2\n";
        let err = parse(after).unwrap_err();
        assert_eq!(lines_of(err.clone()), vec![5]);
        assert!(err.to_string().contains("consumed"));
        assert!(parse_unchecked(after).is_ok());
    }

    #[test]
    fn header_only_round_trip() {
        let c = parse("paths 2\nsource 0\n").unwrap();
        assert!(c.elements().is_empty());
        assert_eq!(serialize(&c), "paths 2\nsource 0\n");
    }
}
