//! Parser and serializer for the line-oriented `.qc` circuit format.
//!
//! Grammar (one directive per line, `#` starts a comment, keywords are
//! case-insensitive, LF or CRLF accepted):
//!
//! ```text
//! qubits N                        # required first directive
//! h Q | x Q | z Q | s Q | t Q
//! cnot C T
//! cz C T
//! u Q re00 im00 re01 im01 re10 im10 re11 im11
//! measure Q1 [Q2 ...]
//! dephase LAMBDA Q
//! stage [LABEL]
//! ```
//!
//! Parsing never aborts on the first problem: every offending line yields
//! its own diagnostic with a 1-based source position.

use num_complex::Complex64;

use crate::circuit::{Circuit, CircuitElement, GateKind, UNITARY_TOL};
use crate::linalg::ComplexMatrix;

/// Largest accepted `qubits` declaration; statevectors beyond this are not
/// simulable in reasonable memory anyway.
const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub severity: Severity,
    pub message: String,
}

impl std::fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "line {}, col {}: {kind}: {}",
            self.span.line, self.span.column, self.message
        )
    }
}

/// Result of a parse: the circuit is present iff no `Error` diagnostic was
/// produced; warnings may accompany a successful parse.
#[derive(Debug)]
pub struct ParseOutcome {
    pub circuit: Option<Circuit>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseOutcome {
    pub fn has_errors(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
    }

    pub fn into_circuit(self) -> Result<Circuit, Vec<ParseDiagnostic>> {
        match self.circuit {
            Some(circuit) => Ok(circuit),
            None => Err(self.diagnostics),
        }
    }
}

/// Parse `.qc` source text into a validated [`Circuit`].
pub fn parse_circuit(source: &str) -> ParseOutcome {
    let mut parser = Parser::default();
    for (line_no, raw_line) in source.lines().enumerate() {
        parser.parse_line(line_no + 1, raw_line);
    }
    parser.finish()
}

#[derive(Default)]
struct Parser {
    qubit_count: Option<usize>,
    elements: Vec<CircuitElement>,
    diagnostics: Vec<ParseDiagnostic>,
    saw_any_directive: bool,
    last_line: usize,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

impl Parser {
    fn error(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.diagnostics.push(ParseDiagnostic {
            span: SourceSpan { line, column },
            severity: Severity::Error,
            message: message.into(),
        });
    }

    fn warning(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.diagnostics.push(ParseDiagnostic {
            span: SourceSpan { line, column },
            severity: Severity::Warning,
            message: message.into(),
        });
    }

    fn parse_line(&mut self, line_no: usize, raw_line: &str) {
        self.last_line = line_no;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let tokens = tokenize(line);
        let Some(head) = tokens.first() else { return };

        let keyword = head.text.to_ascii_lowercase();
        if keyword == "qubits" {
            self.saw_any_directive = true;
            if self.qubit_count.is_some() {
                self.error(line_no, head.column, "duplicate qubits directive");
                return;
            }
            match tokens.get(1) {
                Some(tok) => match tok.text.parse::<usize>() {
                    Ok(n) if (1..=MAX_QUBITS).contains(&n) => {
                        if tokens.len() > 2 {
                            self.error(
                                line_no,
                                tokens[2].column,
                                "unexpected token after qubit count",
                            );
                            return;
                        }
                        self.qubit_count = Some(n);
                    }
                    Ok(n) => self.error(
                        line_no,
                        tok.column,
                        format!("qubit count {n} outside 1..={MAX_QUBITS}"),
                    ),
                    Err(_) => self.error(
                        line_no,
                        tok.column,
                        format!("expected qubit count, found '{}'", tok.text),
                    ),
                },
                None => self.error(line_no, head.column, "qubits directive needs a count"),
            }
            return;
        }

        self.saw_any_directive = true;
        let Some(qubit_count) = self.qubit_count else {
            self.error(
                line_no,
                head.column,
                "directive appears before the qubits declaration",
            );
            return;
        };

        match keyword.as_str() {
            "h" | "x" | "z" | "s" | "t" => {
                let kind = match keyword.as_str() {
                    "h" => GateKind::H,
                    "x" => GateKind::X,
                    "z" => GateKind::Z,
                    "s" => GateKind::S,
                    _ => GateKind::T,
                };
                if let Some(q) = self.indices(line_no, &tokens, 1, qubit_count) {
                    self.elements
                        .push(CircuitElement::Gate { kind, targets: q });
                }
            }
            "cnot" | "cz" => {
                let kind = if keyword == "cnot" {
                    GateKind::Cnot
                } else {
                    GateKind::Cz
                };
                if let Some(q) = self.indices(line_no, &tokens, 2, qubit_count) {
                    if q[0] == q[1] {
                        self.error(line_no, tokens[2].column, "control and target must differ");
                    } else {
                        self.elements
                            .push(CircuitElement::Gate { kind, targets: q });
                    }
                }
            }
            "u" => self.parse_u(line_no, &tokens, qubit_count),
            "measure" => {
                if tokens.len() < 2 {
                    self.error(line_no, head.column, "measure needs at least one target");
                    return;
                }
                let mut targets = Vec::new();
                let mut ok = true;
                for tok in &tokens[1..] {
                    match self.index(line_no, tok, qubit_count) {
                        Some(q) if targets.contains(&q) => {
                            self.error(
                                line_no,
                                tok.column,
                                format!("duplicate measure target {q}"),
                            );
                            ok = false;
                        }
                        Some(q) => targets.push(q),
                        None => ok = false,
                    }
                }
                if ok {
                    self.elements.push(CircuitElement::measure(&targets));
                }
            }
            "dephase" => {
                if tokens.len() != 3 {
                    self.error(line_no, head.column, "dephase expects: dephase LAMBDA Q");
                    return;
                }
                let lambda = match tokens[1].text.parse::<f64>() {
                    Ok(l) if (0.0..=1.0).contains(&l) => l,
                    Ok(l) => {
                        self.error(
                            line_no,
                            tokens[1].column,
                            format!("lambda {l} outside [0, 1]"),
                        );
                        return;
                    }
                    Err(_) => {
                        self.error(
                            line_no,
                            tokens[1].column,
                            format!("expected lambda in [0, 1], found '{}'", tokens[1].text),
                        );
                        return;
                    }
                };
                if let Some(target) = self.index(line_no, &tokens[2], qubit_count) {
                    self.elements
                        .push(CircuitElement::Dephase { lambda, target });
                }
            }
            "stage" => {
                let label = tokens[1..]
                    .iter()
                    .map(|t| t.text)
                    .collect::<Vec<_>>()
                    .join(" ");
                self.elements.push(CircuitElement::StageCut { label });
            }
            other => {
                self.error(line_no, head.column, format!("unknown directive '{other}'"));
            }
        }
    }

    /// Parse exactly `count` qubit indices from tokens[1..].
    fn indices(
        &mut self,
        line: usize,
        tokens: &[Token],
        count: usize,
        qubit_count: usize,
    ) -> Option<Vec<usize>> {
        if tokens.len() != count + 1 {
            self.error(
                line,
                tokens[0].column,
                format!("'{}' expects {count} qubit index(es)", tokens[0].text),
            );
            return None;
        }
        let mut out = Vec::with_capacity(count);
        for tok in &tokens[1..] {
            out.push(self.index(line, tok, qubit_count)?);
        }
        Some(out)
    }

    fn index(&mut self, line: usize, tok: &Token, qubit_count: usize) -> Option<usize> {
        match tok.text.parse::<usize>() {
            Ok(q) if q < qubit_count => Some(q),
            Ok(q) => {
                self.error(
                    line,
                    tok.column,
                    format!("index {q} out of range for {qubit_count} qubit(s)"),
                );
                None
            }
            Err(_) => {
                self.error(
                    line,
                    tok.column,
                    format!("expected qubit index, found '{}'", tok.text),
                );
                None
            }
        }
    }

    fn parse_u(&mut self, line: usize, tokens: &[Token], qubit_count: usize) {
        if tokens.len() != 10 {
            self.error(
                line,
                tokens[0].column,
                "u expects: u Q re00 im00 re01 im01 re10 im10 re11 im11",
            );
            return;
        }
        let Some(target) = self.index(line, &tokens[1], qubit_count) else {
            return;
        };
        let mut reals = [0.0_f64; 8];
        let mut ok = true;
        for (slot, tok) in reals.iter_mut().zip(&tokens[2..]) {
            match tok.text.parse::<f64>() {
                Ok(v) if v.is_finite() => *slot = v,
                _ => {
                    self.error(
                        line,
                        tok.column,
                        format!("expected real literal, found '{}'", tok.text),
                    );
                    ok = false;
                }
            }
        }
        if !ok {
            return;
        }
        let matrix = ComplexMatrix::from_rows(vec![
            vec![
                Complex64::new(reals[0], reals[1]),
                Complex64::new(reals[2], reals[3]),
            ],
            vec![
                Complex64::new(reals[4], reals[5]),
                Complex64::new(reals[6], reals[7]),
            ],
        ])
        .expect("2x2 shape");
        let deviation = matrix.unitarity_deviation();
        if deviation > UNITARY_TOL {
            self.error(
                line,
                tokens[2].column,
                format!("matrix is not unitary (deviation {deviation:.3e})"),
            );
            return;
        }
        self.elements.push(CircuitElement::Gate {
            kind: GateKind::Custom(matrix),
            targets: vec![target],
        });
    }

    fn finish(mut self) -> ParseOutcome {
        let Some(qubit_count) = self.qubit_count else {
            self.error(1, 1, "missing qubits directive");
            let diagnostics = self.diagnostics;
            return ParseOutcome {
                circuit: None,
                diagnostics,
            };
        };
        if !self.elements.is_empty()
            && !self
                .elements
                .iter()
                .any(|e| matches!(e, CircuitElement::StageCut { .. }))
        {
            self.warning(
                self.last_line,
                1,
                "circuit has no stage directive; only the initial state will be profiled",
            );
        }
        if self
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
        {
            return ParseOutcome {
                circuit: None,
                diagnostics: self.diagnostics,
            };
        }
        match Circuit::new(qubit_count, std::mem::take(&mut self.elements)) {
            Ok(circuit) => ParseOutcome {
                circuit: Some(circuit),
                diagnostics: self.diagnostics,
            },
            Err(err) => {
                // Circuit::new re-validates; reaching this would mean a rule
                // the line parser does not know about.
                self.error(1, 1, err.to_string());
                ParseOutcome {
                    circuit: None,
                    diagnostics: self.diagnostics,
                }
            }
        }
    }
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut column = 0usize;
    for (byte, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some((s, col)) = start.take() {
                tokens.push(Token {
                    text: &line[s..byte],
                    column: col,
                });
            }
        } else if start.is_none() {
            start = Some((byte, column));
        }
    }
    if let Some((s, col)) = start {
        tokens.push(Token {
            text: &line[s..],
            column: col,
        });
    }
    tokens
}

/// Serialize a circuit to `.qc` text (LF line endings, lowercase keywords).
/// `parse_circuit(serialize_circuit(c))` reproduces the element list exactly:
/// `u` literals carry 17 significant digits, which round-trips `f64`.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {}\n", circuit.qubit_count));
    for element in &circuit.elements {
        match element {
            CircuitElement::Gate { kind, targets } => match kind {
                GateKind::Custom(m) => {
                    out.push_str(&format!(
                        "u {} {} {} {} {} {} {} {} {}\n",
                        targets[0],
                        sig17(m.get(0, 0).re),
                        sig17(m.get(0, 0).im),
                        sig17(m.get(0, 1).re),
                        sig17(m.get(0, 1).im),
                        sig17(m.get(1, 0).re),
                        sig17(m.get(1, 0).im),
                        sig17(m.get(1, 1).re),
                        sig17(m.get(1, 1).im),
                    ));
                }
                kind => {
                    out.push_str(kind.name());
                    for q in targets {
                        out.push_str(&format!(" {q}"));
                    }
                    out.push('\n');
                }
            },
            CircuitElement::Measure { targets } => {
                out.push_str("measure");
                for q in targets {
                    out.push_str(&format!(" {q}"));
                }
                out.push('\n');
            }
            CircuitElement::Dephase { lambda, target } => {
                out.push_str(&format!("dephase {lambda} {target}\n"));
            }
            CircuitElement::StageCut { label } => {
                if label.is_empty() {
                    out.push_str("stage\n");
                } else {
                    out.push_str(&format!("stage {label}\n"));
                }
            }
        }
    }
    out
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_circuit() {
        let outcome = parse_circuit("qubits 2\nh 0\ncnot 0 1\nstage bell");
        let circuit = outcome.into_circuit().unwrap();
        assert_eq!(circuit.qubit_count, 2);
        assert_eq!(
            circuit.elements,
            vec![
                CircuitElement::Gate {
                    kind: GateKind::H,
                    targets: vec![0]
                },
                CircuitElement::Gate {
                    kind: GateKind::Cnot,
                    targets: vec![0, 1]
                },
                CircuitElement::StageCut {
                    label: "bell".into()
                },
            ]
        );
    }

    #[test]
    fn reports_out_of_range_index() {
        let outcome = parse_circuit("qubits 1\nh 3");
        assert!(outcome.has_errors());
        let errors: Vec<_> = outcome
            .diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        assert_eq!(errors[0].span.line, 2);
        assert!(errors[0].message.contains("index 3 out of range"));
    }

    #[test]
    fn measure_two_targets_is_one_layer_of_four() {
        let circuit = parse_circuit("qubits 3\nmeasure 0 1\nstage m")
            .into_circuit()
            .unwrap();
        assert_eq!(
            circuit.elements[0],
            CircuitElement::Measure {
                targets: vec![0, 1]
            }
        );
        assert_eq!(circuit.measurement_layers(), vec![4]);
    }

    #[test]
    fn keywords_are_case_insensitive_and_crlf_accepted() {
        let circuit = parse_circuit("QUBITS 2\r\nH 0\r\nCnot 0 1\r\nSTAGE Bell\r\n")
            .into_circuit()
            .unwrap();
        assert_eq!(circuit.elements.len(), 3);
        assert_eq!(
            circuit.elements[2],
            CircuitElement::StageCut {
                label: "Bell".into()
            }
        );
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let src = "# build a bell pair\nqubits 2\n\nh 0   # hadamard\ncnot 0 1\nstage\n";
        let circuit = parse_circuit(src).into_circuit().unwrap();
        assert_eq!(circuit.elements.len(), 3);
    }

    #[test]
    fn each_invalid_line_gets_a_diagnostic() {
        let src = "qubits 2\nh 9\nfrobnicate 1\ncnot 0 0\ndephase 1.5 0\nu 0 1 2\n";
        let outcome = parse_circuit(src);
        let error_lines: Vec<usize> = outcome
            .diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| d.span.line)
            .collect();
        assert_eq!(error_lines, vec![2, 3, 4, 5, 6]);
    }

    #[test]
    fn missing_qubits_is_an_error() {
        let outcome = parse_circuit("h 0\n");
        assert!(outcome.has_errors());
        assert!(parse_circuit("").has_errors());
    }

    #[test]
    fn rejects_non_unitary_u() {
        let outcome = parse_circuit("qubits 1\nu 0 1 0 0 0 0 0 0.5 0\n");
        assert!(outcome.has_errors());
        assert!(outcome.diagnostics[0].message.contains("not unitary"));
    }

    #[test]
    fn warns_when_no_stage_directive() {
        let outcome = parse_circuit("qubits 1\nh 0\n");
        assert!(!outcome.has_errors());
        assert!(outcome
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Warning && d.message.contains("no stage directive")));
        assert!(outcome.circuit.is_some());
    }

    #[test]
    fn round_trips_custom_unitary_exactly() {
        // A fixed non-axis rotation: literals exercise the 17-digit format.
        let (c0, s0) = (0.6_f64.cos(), 0.6_f64.sin());
        let src = format!("qubits 1\nu 0 {c0} 0 {} 0 {s0} 0 {c0} 0\nstage\n", -s0);
        let circuit = parse_circuit(&src).into_circuit().unwrap();
        let text = serialize_circuit(&circuit);
        let reparsed = parse_circuit(&text).into_circuit().unwrap();
        assert_eq!(circuit.elements, reparsed.elements);
        // serialize is a fixpoint of parse-then-serialize.
        assert_eq!(text, serialize_circuit(&reparsed));
    }

    #[test]
    fn parser_survives_noise() {
        for src in [
            "\u{0}\u{1}\u{2}",
            "qubits\n",
            "qubits 0\n",
            "qubits 99\n",
            "qubits 2\nh\n",
            "qubits 2\nu 0 nan 0 0 0 0 0 0 0\n",
            "###",
            "stage only\n",
            "qubits 2 extra\n",
            "qubits 2\nqubits 3\n",
            "measure\n",
        ] {
            let outcome = parse_circuit(src);
            assert!(
                outcome.has_errors() || outcome.circuit.is_some(),
                "src: {src:?}"
            );
        }
    }
}
