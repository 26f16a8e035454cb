use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::{Digraph, Edge, GraphError, VertexId};

/// Input grammars accepted by [`load_digraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// One `src dst` pair per line; a lone label declares a vertex.
    EdgeList,
    /// `digraph { a -> b; }` with attributes ignored.
    Dot,
    /// Array of `{name, imports}` records.
    FlareJson,
}

impl Format {
    /// Guesses from a file extension, defaulting to the edge list.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("dot") | Some("gv") => Format::Dot,
            Some("json") => Format::FlareJson,
            _ => Format::EdgeList,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge-list" | "edges" => Ok(Format::EdgeList),
            "dot" | "dot-subset" => Ok(Format::Dot),
            "flare-json" | "flare" | "json" => Ok(Format::FlareJson),
            other => Err(format!("unknown graph format {other:?}")),
        }
    }
}

/// A parsed graph plus the number of duplicate edges that were collapsed.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub graph: Digraph,
    pub duplicates: usize,
}

pub fn load_digraph(mut source: impl Read, format: Format) -> Result<Loaded, GraphError> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| GraphError::Io(e.to_string()))?;
    parse_digraph(&text, format)
}

pub fn parse_digraph(text: &str, format: Format) -> Result<Loaded, GraphError> {
    let (labels, edges) = match format {
        Format::EdgeList => parse_edge_list(text)?,
        Format::Dot => parse_dot(text)?,
        Format::FlareJson => parse_flare(text)?,
    };
    let (graph, duplicates) = Digraph::with_labels(labels, edges)?;
    Ok(Loaded { graph, duplicates })
}

/// Writes every vertex on its own line, then one `src dst` line per edge, so
/// reloading reproduces the vertex numbering exactly.
pub fn write_edge_list(d: &Digraph, mut out: impl Write) -> std::io::Result<()> {
    for l in d.labels() {
        writeln!(out, "{l}")?;
    }
    for (u, v) in d.edges() {
        writeln!(out, "{} {}", d.label(u), d.label(v))?;
    }
    Ok(())
}

#[derive(Default)]
struct Interner {
    labels: Vec<String>,
    ids: HashMap<String, VertexId>,
}

impl Interner {
    fn intern(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }
}

fn parse_edge_list(text: &str) -> Result<(Vec<String>, Vec<Edge>), GraphError> {
    let mut names = Interner::default();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [v] => {
                names.intern(v);
            }
            [a, b] => {
                let (a, b) = (names.intern(a), names.intern(b));
                edges.push((a, b));
            }
            _ => {
                return Err(GraphError::Parse {
                    line: i + 1,
                    message: format!("expected `<src> <dst>`, found {} fields", tokens.len()),
                })
            }
        }
    }
    Ok((names.labels, edges))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Arrow,
    UndirectedEdge,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
}

fn dot_tokens(text: &str) -> Result<Vec<(Tok, usize)>, GraphError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut line = 1;
    let mut i = 0;
    let err = |line: usize, message: String| GraphError::Parse { line, message };
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                let start = line;
                i += 2;
                loop {
                    match chars.get(i) {
                        None => return Err(err(start, "unterminated comment".into())),
                        Some('*') if chars.get(i + 1) == Some(&'/') => {
                            i += 2;
                            break;
                        }
                        Some('\n') => {
                            line += 1;
                            i += 1;
                        }
                        Some(_) => i += 1,
                    }
                }
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                toks.push((Tok::Arrow, line));
                i += 2;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                toks.push((Tok::UndirectedEdge, line));
                i += 2;
            }
            '{' | '}' | '[' | ']' | '=' | ';' | ',' => {
                let t = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '=' => Tok::Eq,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                toks.push((t, line));
                i += 1;
            }
            '"' => {
                let start = line;
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err(start, "unterminated string".into())),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') if chars.get(i + 1) == Some(&'"') => {
                            s.push('"');
                            i += 2;
                        }
                        Some(&ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                toks.push((Tok::Id(s), start));
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' => {
                let mut s = String::new();
                while let Some(&ch) = chars.get(i) {
                    if ch.is_alphanumeric() || ch == '_' || ch == '.' {
                        s.push(ch);
                        i += 1;
                    } else if ch == '-' && s.is_empty() {
                        // negative numeral
                        s.push(ch);
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Id(s), line));
            }
            other => return Err(err(line, format!("unexpected character {other:?}"))),
        }
    }
    Ok(toks)
}

fn parse_dot(text: &str) -> Result<(Vec<String>, Vec<Edge>), GraphError> {
    let toks = dot_tokens(text)?;
    let mut pos = 0;
    let last_line = toks.last().map_or(1, |t| t.1);
    let err = |line: usize, message: &str| GraphError::Parse {
        line,
        message: message.into(),
    };
    let peek = |pos: usize| toks.get(pos).map(|t| &t.0);
    let line_at = |pos: usize| toks.get(pos).map_or(last_line, |t| t.1);

    if let Some(Tok::Id(kw)) = peek(pos) {
        if kw.eq_ignore_ascii_case("strict") {
            pos += 1;
        }
    }
    match peek(pos) {
        Some(Tok::Id(kw)) if kw.eq_ignore_ascii_case("digraph") => pos += 1,
        Some(Tok::Id(kw)) if kw.eq_ignore_ascii_case("graph") => {
            return Err(err(line_at(pos), "undirected graphs are not supported"))
        }
        _ => return Err(err(line_at(pos), "expected `digraph`")),
    }
    if let Some(Tok::Id(_)) = peek(pos) {
        pos += 1;
    }
    if peek(pos) != Some(&Tok::LBrace) {
        return Err(err(line_at(pos), "expected `{`"));
    }
    pos += 1;

    let mut names = Interner::default();
    let mut edges = Vec::new();
    loop {
        match peek(pos) {
            None => return Err(err(last_line, "missing closing `}`")),
            Some(Tok::RBrace) => {
                pos += 1;
                break;
            }
            Some(Tok::Semi) | Some(Tok::Comma) => pos += 1,
            Some(Tok::Id(first)) => {
                let line = line_at(pos);
                let first = first.clone();
                pos += 1;
                let is_attr_stmt = matches!(first.as_str(), "graph" | "node" | "edge")
                    && peek(pos) == Some(&Tok::LBracket);
                if peek(pos) == Some(&Tok::Eq) {
                    // graph-level `key = value`
                    pos += 1;
                    match peek(pos) {
                        Some(Tok::Id(_)) => pos += 1,
                        _ => return Err(err(line, "expected value after `=`")),
                    }
                    continue;
                }
                let mut chain = Vec::new();
                if !is_attr_stmt {
                    chain.push(names.intern(&first));
                }
                while !is_attr_stmt && peek(pos) == Some(&Tok::Arrow) {
                    pos += 1;
                    match peek(pos) {
                        Some(Tok::Id(next)) => {
                            chain.push(names.intern(next));
                            pos += 1;
                        }
                        Some(Tok::LBrace) => {
                            return Err(err(line_at(pos), "subgraphs are not supported"))
                        }
                        _ => return Err(err(line_at(pos), "expected node after `->`")),
                    }
                }
                if peek(pos) == Some(&Tok::UndirectedEdge) {
                    return Err(err(line_at(pos), "`--` edges are not allowed in a digraph"));
                }
                edges.extend(chain.windows(2).map(|w| (w[0], w[1])));
                if peek(pos) == Some(&Tok::LBracket) {
                    pos =
                        skip_attributes(&toks, pos).ok_or_else(|| err(line, "unterminated `[`"))?;
                }
            }
            Some(Tok::LBrace) => return Err(err(line_at(pos), "subgraphs are not supported")),
            Some(_) => return Err(err(line_at(pos), "unexpected token")),
        }
    }
    if pos != toks.len() {
        return Err(err(line_at(pos), "trailing input after graph"));
    }
    Ok((names.labels, edges))
}

fn skip_attributes(toks: &[(Tok, usize)], mut pos: usize) -> Option<usize> {
    while toks.get(pos).map(|t| &t.0) == Some(&Tok::LBracket) {
        pos += 1;
        loop {
            match toks.get(pos).map(|t| &t.0) {
                None => return None,
                Some(Tok::RBracket) => {
                    pos += 1;
                    break;
                }
                Some(_) => pos += 1,
            }
        }
    }
    Some(pos)
}

#[derive(Deserialize)]
struct FlareRecord {
    name: String,
    #[serde(default)]
    imports: Vec<String>,
}

fn parse_flare(text: &str) -> Result<(Vec<String>, Vec<Edge>), GraphError> {
    let records: Vec<FlareRecord> = serde_json::from_str(text).map_err(|e| GraphError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut ids = HashMap::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if ids.insert(r.name.as_str(), i).is_some() {
            return Err(GraphError::Schema(format!(
                "name {:?} declared twice",
                r.name
            )));
        }
    }
    let mut edges = Vec::new();
    for (i, r) in records.iter().enumerate() {
        for target in &r.imports {
            let j = *ids.get(target.as_str()).ok_or_else(|| {
                GraphError::Schema(format!("{:?} imports undeclared {:?}", r.name, target))
            })?;
            edges.push((i, j));
        }
    }
    Ok((records.into_iter().map(|r| r.name).collect(), edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(d: &Digraph) -> Vec<Edge> {
        d.edges().collect()
    }

    #[test]
    fn edge_list_basics() {
        let l = parse_digraph("a b\nb a\n", Format::EdgeList).unwrap();
        assert_eq!(l.graph.vertex_count(), 2);
        assert_eq!(edges(&l.graph), vec![(0, 1), (1, 0)]);
        assert_eq!(l.duplicates, 0);

        let l = parse_digraph("a b\na b\n", Format::EdgeList).unwrap();
        assert_eq!(edges(&l.graph), vec![(0, 1)]);
        assert_eq!(l.duplicates, 1);
    }

    #[test]
    fn edge_list_comments_and_isolated_vertices() {
        let l = parse_digraph("# header\nz\n\nx y # trailing\n", Format::EdgeList).unwrap();
        assert_eq!(l.graph.labels(), &["z", "x", "y"]);
        assert_eq!(edges(&l.graph), vec![(1, 2)]);
    }

    #[test]
    fn edge_list_reports_line() {
        let e = parse_digraph("a b\na b c\n", Format::EdgeList).unwrap_err();
        assert!(matches!(e, GraphError::Parse { line: 2, .. }));
    }

    #[test]
    fn flare_three_nodes() {
        let json = r#"[
            {"name": "flare.A", "size": 10, "imports": ["flare.B"]},
            {"name": "flare.B", "imports": ["flare.C"]},
            {"name": "flare.C", "imports": []}
        ]"#;
        let l = parse_digraph(json, Format::FlareJson).unwrap();
        assert_eq!(l.graph.vertex_count(), 3);
        assert_eq!(edges(&l.graph), vec![(0, 1), (1, 2)]);
        assert_eq!(l.graph.label(2), "flare.C");
    }

    #[test]
    fn flare_schema_errors() {
        let dup = r#"[{"name":"a"},{"name":"a"}]"#;
        assert!(matches!(
            parse_digraph(dup, Format::FlareJson),
            Err(GraphError::Schema(_))
        ));
        let unknown = r#"[{"name":"a","imports":["b"]}]"#;
        assert!(matches!(
            parse_digraph(unknown, Format::FlareJson),
            Err(GraphError::Schema(_))
        ));
        let bad = "[{\"name\":\n 3}]";
        assert!(matches!(
            parse_digraph(bad, Format::FlareJson),
            Err(GraphError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn dot_subset() {
        let src = r#"
            // comment
            strict digraph G {
                rankdir = LR;
                node [shape=box];
                a;
                "b c" [label="x"];
                a -> "b c" -> d [color=red];
                d -> a
            }
        "#;
        let l = parse_digraph(src, Format::Dot).unwrap();
        assert_eq!(l.graph.labels(), &["a", "b c", "d"]);
        assert_eq!(edges(&l.graph), vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn dot_errors_carry_lines() {
        let e = parse_digraph("digraph {\n a -- b;\n}", Format::Dot).unwrap_err();
        assert!(matches!(e, GraphError::Parse { line: 2, .. }));
        let e = parse_digraph("graph { a -- b }", Format::Dot).unwrap_err();
        assert!(matches!(e, GraphError::Parse { line: 1, .. }));
        let e = parse_digraph("digraph {\n a -> b;\n", Format::Dot).unwrap_err();
        assert!(matches!(e, GraphError::Parse { .. }));
    }

    #[test]
    fn edge_list_writer_round_trips() {
        let l = parse_digraph("q\np q\nr p\n", Format::EdgeList).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&l.graph, &mut buf).unwrap();
        let back = parse_digraph(std::str::from_utf8(&buf).unwrap(), Format::EdgeList).unwrap();
        assert_eq!(back.graph, l.graph);
    }

    #[test]
    fn format_guess() {
        assert_eq!(Format::from_path(Path::new("x.dot")), Format::Dot);
        assert_eq!(
            Format::from_path(Path::new("flare.json")),
            Format::FlareJson
        );
        assert_eq!(Format::from_path(Path::new("g.edges")), Format::EdgeList);
        assert_eq!("dot".parse::<Format>(), Ok(Format::Dot));
    }
}
