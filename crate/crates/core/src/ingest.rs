//! Instance text format, coordinate-list ingestion and the seeded parameter
//! generator.
//!
//! Canonical instance text:
//!
//! ```text
//! INVLOC 1
//! <minisum|minimax> <n> <p>
//! <a> <b> <w> <uminus> <uplus> <cminus> <cplus>    (n lines)
//! ```
//!
//! Tokens are whitespace separated, `#` starts a comment that runs to the end
//! of the line, and blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{validate_instance, ClientSite, Instance, Norm, Objective, Point};

pub const MAGIC: &str = "INVLOC";
pub const VERSION: &str = "1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}, column {column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("{}{message}", location(*.line, *.site))]
    Semantic {
        line: Option<usize>,
        /// 1-based site index.
        site: Option<usize>,
        message: String,
    },
}

fn location(line: Option<usize>, site: Option<usize>) -> String {
    match (line, site) {
        (Some(l), Some(s)) => format!("line {l}, site {s}: "),
        (Some(l), None) => format!("line {l}: "),
        (None, Some(s)) => format!("site {s}: "),
        (None, None) => String::new(),
    }
}

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

/// Non-empty lines with comments stripped, each split into located tokens.
fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain([(body.len(), ' ')]) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &body[s..pos],
                        column: body[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push(Line {
                number: idx + 1,
                tokens,
            });
        }
    }
    out
}

fn syntax(line: usize, column: usize, expected: &str, found: &str) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn eol_column(line: &Line<'_>) -> usize {
    let last = line.tokens.last().expect("lines carry tokens");
    last.column + last.text.chars().count()
}

fn expect_count(line: &Line<'_>, n: usize, what: &str) -> Result<(), ParseError> {
    if line.tokens.len() < n {
        return Err(syntax(line.number, eol_column(line), what, "end of line"));
    }
    if line.tokens.len() > n {
        let t = line.tokens[n];
        return Err(syntax(line.number, t.column, "end of line", t.text));
    }
    Ok(())
}

fn number(line: usize, tok: Token<'_>) -> Result<f64, ParseError> {
    tok.text
        .parse::<f64>()
        .ok()
        .filter(|v| !v.is_nan())
        .ok_or_else(|| syntax(line, tok.column, "a number", tok.text))
}

/// Parses canonical instance text and validates the result.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let lines = tokenize(text);
    let mut it = lines.iter();
    let Some(magic) = it.next() else {
        return Err(syntax(1, 1, "header `INVLOC 1`", "end of input"));
    };
    if magic.tokens[0].text != MAGIC {
        return Err(syntax(magic.number, magic.tokens[0].column, "`INVLOC`", magic.tokens[0].text));
    }
    expect_count(magic, 2, "format version")?;
    if magic.tokens[1].text != VERSION {
        let t = magic.tokens[1];
        return Err(syntax(magic.number, t.column, "format version 1", t.text));
    }

    let Some(head) = it.next() else {
        return Err(syntax(magic.number + 1, 1, "`<objective> <n> <p>`", "end of input"));
    };
    let objective: Objective = head.tokens[0].text.parse().map_err(|_| {
        syntax(head.number, head.tokens[0].column, "`minisum` or `minimax`", head.tokens[0].text)
    })?;
    expect_count(head, 3, "site count and norm")?;
    let n_tok = head.tokens[1];
    let n: usize = n_tok
        .text
        .parse()
        .map_err(|_| syntax(head.number, n_tok.column, "a site count", n_tok.text))?;
    let p_tok = head.tokens[2];
    let p = number(head.number, p_tok)?;
    let norm = Norm::new(p).map_err(|e| ParseError::Semantic {
        line: Some(head.number),
        site: None,
        message: e.to_string(),
    })?;

    let site_lines: Vec<&Line<'_>> = it.collect();
    if site_lines.len() != n {
        return Err(ParseError::Semantic {
            line: Some(head.number),
            site: None,
            message: format!("header declares n = {n} but found {} site lines", site_lines.len()),
        });
    }
    let mut sites = Vec::with_capacity(n);
    for line in &site_lines {
        expect_count(line, 7, "seven site fields")?;
        let v = line
            .tokens
            .iter()
            .map(|&t| number(line.number, t))
            .collect::<Result<Vec<f64>, _>>()?;
        sites.push(ClientSite {
            location: Point::new(v[0], v[1]),
            weight: v[2],
            u_minus: v[3],
            u_plus: v[4],
            c_minus: v[5],
            c_plus: v[6],
        });
    }
    let inst = Instance::new(sites, norm, objective);
    if let Some(v) = validate_instance(&inst).into_iter().next() {
        return Err(ParseError::Semantic {
            line: v.site.map(|s| site_lines[s - 1].number).or(Some(head.number)),
            site: v.site,
            message: format!("field {}: {}", v.field, v.message),
        });
    }
    Ok(inst)
}

/// Renders `inst` in canonical form. Numbers use the shortest text that
/// parses back to the same value, so the round trip is exact.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "{} {} {}", inst.objective, inst.len(), inst.norm.p());
    for s in &inst.sites {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {}",
            s.location.x, s.location.y, s.weight, s.u_minus, s.u_plus, s.c_minus, s.c_plus
        );
    }
    out
}

/// One SplitMix64 step: returns a uniform draw in `[0, 1)` and the new state.
pub fn next_uniform(state: u64) -> (f64, u64) {
    let state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ((z >> 11) as f64 / (1u64 << 53) as f64, state)
}

/// SplitMix64 stream of uniform draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_f64(&mut self) -> f64 {
        let (u, s) = next_uniform(self.state);
        self.state = s;
        u
    }

    /// Uniform draw in `[low, high)`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        let v = low + (high - low) * self.next_f64();
        // rounding can land exactly on `high`
        if v < high {
            v
        } else {
            low.max(high - (high - low) * f64::EPSILON)
        }
    }
}

/// Parameters of randomly generated site data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub low: f64,
    pub high: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            low: 1.0,
            high: 10.0,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(seed: u64) -> Self {
        GeneratorConfig {
            seed,
            ..Default::default()
        }
    }
}

/// Reads a coordinate list (`x y` or `index x y` per line) and draws every
/// site's `w, u-, u+, c-, c+` in that order from `[low, high)`. `u-` is then
/// clamped to `w` so a zero weight stays reachable only through the budget.
pub fn ingest_coordinates(
    text: &str,
    cfg: &GeneratorConfig,
    norm: Norm,
    objective: Objective,
) -> Result<Instance, ParseError> {
    if !(cfg.low.is_finite() && cfg.high.is_finite() && cfg.low < cfg.high) {
        return Err(ParseError::Semantic {
            line: None,
            site: None,
            message: format!("generator range [{}, {}) is empty", cfg.low, cfg.high),
        });
    }
    let mut rng = SplitMix64::new(cfg.seed);
    let mut sites = Vec::new();
    for line in tokenize(text) {
        let coords = match line.tokens.len() {
            2 => &line.tokens[..],
            3 => &line.tokens[1..],
            1 => return Err(syntax(line.number, eol_column(&line), "a coordinate pair", "end of line")),
            _ => {
                let t = line.tokens[3];
                return Err(syntax(line.number, t.column, "end of line", t.text));
            }
        };
        let x = number(line.number, coords[0])?;
        let y = number(line.number, coords[1])?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(ParseError::Semantic {
                line: Some(line.number),
                site: Some(sites.len() + 1),
                message: "coordinates must be finite".to_string(),
            });
        }
        let weight = rng.uniform(cfg.low, cfg.high);
        let u_minus = rng.uniform(cfg.low, cfg.high).min(weight);
        let u_plus = rng.uniform(cfg.low, cfg.high);
        let c_minus = rng.uniform(cfg.low, cfg.high);
        let c_plus = rng.uniform(cfg.low, cfg.high);
        sites.push(ClientSite {
            location: Point::new(x, y),
            weight,
            u_minus,
            u_plus,
            c_minus,
            c_plus,
        });
    }
    if sites.is_empty() {
        return Err(ParseError::Semantic {
            line: None,
            site: None,
            message: "no coordinates found; at least one site is required".to_string(),
        });
    }
    Ok(Instance::new(sites, norm, objective))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = include_str!("../data/example1.inst");
    const RUSPINI: &str = include_str!("../data/ruspini75.txt");

    #[test]
    fn example1_file_parses() {
        let inst = parse_instance(EXAMPLE1).unwrap();
        assert_eq!(inst.len(), 4);
        assert_eq!(inst.objective, Objective::Minisum);
        assert!(inst.norm.is_euclidean());
        assert_eq!(inst.sites[0].c_minus, std::f64::consts::SQRT_2);
        assert_eq!(inst.sites[3].weight, 10.0 * std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(inst.sites[1].u_plus, 5.0);
    }

    #[test]
    fn short_site_line_reads_seven_places() {
        let text = "INVLOC 1\nminisum 1 2\n1 0 0 0 5 1.4142135 1.4142135\n";
        let inst = parse_instance(text).unwrap();
        assert!((inst.sites[0].c_plus - std::f64::consts::SQRT_2).abs() < 1e-7);
        assert_eq!(inst.sites[0].location, Point::new(1.0, 0.0));
    }

    #[test]
    fn round_trip_is_exact() {
        let inst = parse_instance(EXAMPLE1).unwrap();
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
        let one = Instance::new(vec![inst.sites[0]], Norm::new(8.0).unwrap(), Objective::Minimax);
        let text = write_instance(&one);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().nth(1), Some("minimax 1 8"));
        let inf = one.with_norm(Norm::new(f64::INFINITY).unwrap());
        assert_eq!(parse_instance(&write_instance(&inf)).unwrap(), inf);
    }

    #[test]
    fn count_mismatch_names_the_count() {
        let text = "INVLOC 1\nminisum 3 2\n0 0 1 0 1 1 1\n1 0 1 0 1 1 1\n";
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, ParseError::Semantic { .. }));
        assert!(err.to_string().contains("n = 3"), "{err}");
        assert!(err.to_string().contains("2 site lines"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let text = "INVLOC 1\n# comment\nminisum 1 2\n0 0 x 0 1 1 1\n";
        assert_eq!(
            parse_instance(text).unwrap_err(),
            ParseError::Syntax {
                line: 4,
                column: 5,
                expected: "a number".into(),
                found: "x".into()
            }
        );
        let err = parse_instance("INVLOC 1\nminisum 1 2\n0 0 1 0 1 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, column: 12, .. }), "{err:?}");
        let err = parse_instance("INVLOC 2\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, column: 8, .. }));
        let err = parse_instance("").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
        let err = parse_instance("INVLOC 1\nmedian 1 2\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, column: 1, .. }));
    }

    #[test]
    fn semantic_errors_name_the_site() {
        let text = "INVLOC 1\nminisum 2 2\n0 0 1 0 1 1 1\n\n1 0 -1 0 1 1 1\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(
            err,
            ParseError::Semantic {
                line: Some(5),
                site: Some(2),
                message: "field w: must be a finite nonnegative number, got -1".into()
            }
        );
        let err = parse_instance("INVLOC 1\nminisum 1 0.5\n0 0 1 0 1 1 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Semantic { line: Some(2), .. }));
    }

    #[test]
    fn splitmix_golden_values() {
        let (u, s) = next_uniform(0);
        assert_eq!(u, 0.8833108082136426);
        let (u2, _) = next_uniform(s);
        assert_eq!(u2, 0.43152799704850997);
        assert_eq!(next_uniform(42).0, 0.7415648787718233);
    }

    #[test]
    fn neighbouring_seeds_differ() {
        for s in 0..100u64 {
            assert_ne!(next_uniform(s).0, next_uniform(s + 1).0);
        }
    }

    #[test]
    fn generated_fields_in_range_and_centred() {
        let mut rng = SplitMix64::new(7);
        let draws: Vec<f64> = (0..10_000).map(|_| rng.uniform(1.0, 10.0)).collect();
        assert!(draws.iter().all(|&v| (1.0..10.0).contains(&v)));
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 5.5).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn ruspini_ingestion() {
        let cfg = GeneratorConfig::with_seed(42);
        let inst = ingest_coordinates(RUSPINI, &cfg, Norm::EUCLIDEAN, Objective::Minisum).unwrap();
        assert_eq!(inst.len(), 75);
        for s in &inst.sites {
            for v in [s.weight, s.u_plus, s.c_minus, s.c_plus] {
                assert!((1.0..10.0).contains(&v));
            }
            assert!(s.u_minus >= 1.0 && s.u_minus <= s.weight);
            assert!((4.0..=117.0).contains(&s.location.x));
            assert!((4.0..=156.0).contains(&s.location.y));
        }
        let again = ingest_coordinates(RUSPINI, &cfg, Norm::EUCLIDEAN, Objective::Minisum).unwrap();
        assert_eq!(inst, again);
        let other = ingest_coordinates(
            RUSPINI,
            &GeneratorConfig::with_seed(43),
            Norm::EUCLIDEAN,
            Objective::Minisum,
        )
        .unwrap();
        assert_ne!(inst, other);
    }

    #[test]
    fn coordinate_errors() {
        let cfg = GeneratorConfig::default();
        let err = ingest_coordinates("1 2\n3 y\n", &cfg, Norm::EUCLIDEAN, Objective::Minisum)
            .unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, column: 3, .. }));
        let err = ingest_coordinates("# nothing\n\n", &cfg, Norm::EUCLIDEAN, Objective::Minisum)
            .unwrap_err();
        assert!(matches!(err, ParseError::Semantic { .. }));
        let bad = GeneratorConfig {
            low: 2.0,
            high: 2.0,
            ..cfg
        };
        assert!(ingest_coordinates("1 2\n", &bad, Norm::EUCLIDEAN, Objective::Minisum).is_err());
    }
}
