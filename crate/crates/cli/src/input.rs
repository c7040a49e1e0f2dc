//! Line-oriented input files.
//!
//! ```text
//! # comments start with '#'
//! [field]
//! prime 5            # or: rationals
//! [algebra]
//! kind matrix        # ground | cyclic-group | group | matrix | upper-triangular
//! size 2             #   | truncated-polynomial | path | product
//! [module]
//! jordan 1 2         # or one `row` line per row of σ
//! ```
//!
//! Algebra parameters: `order n` (cyclic-group), `row …` lines (group table),
//! `size n` (matrix, upper-triangular), `degree n` (k[x]/xⁿ),
//! `vertices n` and `edge s t` lines (path), `component <kind> [n]` lines
//! (product).

use cyclic_hom::algebra::Algebra;
use cyclic_hom::exactlin::Matrix;
use cyclic_hom::tate::CpModule;
use cyclic_hom::FieldSpec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }

    fn int(&self) -> Result<i64, ParseError> {
        self.text.parse().map_err(|_| self.error(format!("expected an integer, found `{}`", self.text)))
    }

    fn count(&self) -> Result<usize, ParseError> {
        self.text.parse().map_err(|_| self.error(format!("expected a non-negative integer, found `{}`", self.text)))
    }
}

/// One `key value…` line.
#[derive(Clone, Debug)]
struct Entry<'a> {
    key: Token<'a>,
    args: Vec<Token<'a>>,
}

impl<'a> Entry<'a> {
    fn arg(&self, i: usize) -> Result<Token<'a>, ParseError> {
        self.args.get(i).copied().ok_or_else(|| {
            let col = self.args.last().map_or(self.key.column + self.key.text.len(), |t| t.column + t.text.len());
            ParseError { line: self.key.line, column: col, message: format!("`{}` needs an argument", self.key.text) }
        })
    }

    fn single(&self) -> Result<usize, ParseError> {
        if let Some(extra) = self.args.get(1) {
            return Err(extra.error("unexpected extra argument"));
        }
        self.arg(0)?.count()
    }
}

#[derive(Clone, Debug)]
struct Section<'a> {
    name: Token<'a>,
    entries: Vec<Entry<'a>>,
}

/// A parsed input file.
#[derive(Clone, Debug)]
pub struct Input<'a> {
    sections: Vec<Section<'a>>,
}

fn tokenize(line: &str, number: usize) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                let column = content[..s].chars().count() + 1;
                out.push(Token { text: &content[s..i], line: number, column });
                start = None;
            }
            _ => {}
        }
    }
    out
}

impl<'a> Input<'a> {
    pub fn parse(text: &'a str) -> Result<Self, ParseError> {
        let mut sections: Vec<Section<'a>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let tokens = tokenize(line, i + 1);
            let Some(first) = tokens.first().copied() else { continue };
            if first.text.starts_with('[') {
                let name = first.text.strip_prefix('[').and_then(|s| s.strip_suffix(']'));
                let Some(name) = name.filter(|n| ["field", "algebra", "module"].contains(n)) else {
                    return Err(first.error(format!("unknown section header `{}`", first.text)));
                };
                if let Some(extra) = tokens.get(1) {
                    return Err(extra.error("text after section header"));
                }
                if sections.iter().any(|s| s.name.text == name) {
                    return Err(first.error(format!("section [{name}] given twice")));
                }
                sections.push(Section { name: Token { text: name, ..first }, entries: Vec::new() });
                continue;
            }
            let Some(section) = sections.last_mut() else {
                return Err(first.error("entry before any section header"));
            };
            section.entries.push(Entry { key: first, args: tokens[1..].to_vec() });
        }
        Ok(Input { sections })
    }

    fn section(&self, name: &str) -> Option<&Section<'a>> {
        self.sections.iter().find(|s| s.name.text == name)
    }

    fn required(&self, name: &str) -> Result<&Section<'a>, ParseError> {
        self.section(name).ok_or_else(|| ParseError { line: 1, column: 1, message: format!("missing [{name}] section") })
    }

    pub fn field(&self) -> Result<FieldSpec, ParseError> {
        let section = self.required("field")?;
        let mut field = None;
        for e in &section.entries {
            let parsed = match e.key.text {
                "prime" => {
                    let t = e.arg(0)?;
                    let p = t.count()?;
                    u32::try_from(p)
                        .ok()
                        .and_then(|p| FieldSpec::prime(p).ok())
                        .ok_or_else(|| t.error(format!("{p} is not a prime below 2^31")))?
                }
                "rationals" => FieldSpec::rationals(),
                other => return Err(e.key.error(format!("unknown field entry `{other}`"))),
            };
            if field.replace(parsed).is_some() {
                return Err(e.key.error("field declared twice"));
            }
        }
        field.ok_or_else(|| section.name.error("[field] is empty"))
    }

    pub fn algebra(&self) -> Result<Algebra, ParseError> {
        let field = self.field()?;
        let section = self.required("algebra")?;
        let kind = section
            .entries
            .iter()
            .find(|e| e.key.text == "kind")
            .ok_or_else(|| section.name.error("[algebra] needs a `kind` line"))?;
        let kind_token = kind.arg(0)?;
        let lookup = |key: &str| -> Result<usize, ParseError> {
            section
                .entries
                .iter()
                .find(|e| e.key.text == key)
                .ok_or_else(|| kind_token.error(format!("`{}` needs a `{key}` line", kind_token.text)))?
                .single()
        };
        let build = |r: cyclic_hom::Result<Algebra>, at: Token| r.map_err(|e| at.error(e.to_string()));
        match kind_token.text {
            "group" => {
                let rows = section
                    .entries
                    .iter()
                    .filter(|e| e.key.text == "row")
                    .map(|e| e.args.iter().map(|t| t.count()).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                build(Algebra::group_algebra(field, rows), kind_token)
            }
            "path" => {
                let vertices = lookup("vertices")?;
                let edges = section
                    .entries
                    .iter()
                    .filter(|e| e.key.text == "edge")
                    .map(|e| Ok((e.arg(0)?.count()?, e.arg(1)?.count()?)))
                    .collect::<Result<Vec<_>, ParseError>>()?;
                build(Algebra::path_algebra(field, vertices, &edges), kind_token)
            }
            "product" => {
                let mut acc: Option<Algebra> = None;
                for e in section.entries.iter().filter(|e| e.key.text == "component") {
                    let k = e.arg(0)?;
                    let param = || e.arg(1).and_then(|t| t.count());
                    let part = simple_algebra(field, k, param)?;
                    acc = Some(match acc {
                        None => part,
                        Some(a) => build(Algebra::product(&a, &part), k)?,
                    });
                }
                acc.ok_or_else(|| kind_token.error("`product` needs `component` lines"))
            }
            _ => {
                let param = || match kind_token.text {
                    "cyclic-group" => lookup("order"),
                    "matrix" | "upper-triangular" => lookup("size"),
                    "truncated-polynomial" => lookup("degree"),
                    _ => Ok(0),
                };
                simple_algebra(field, kind_token, param)
            }
        }
    }

    pub fn module(&self) -> Result<CpModule, ParseError> {
        let field = self.field()?;
        let section = self.required("module")?;
        let mut rows: Vec<Vec<i64>> = Vec::new();
        let mut module: Option<CpModule> = None;
        let build = |r: cyclic_hom::Result<CpModule>, at: Token| r.map_err(|e| at.error(e.to_string()));
        for e in &section.entries {
            match e.key.text {
                "row" => rows.push(e.args.iter().map(|t| t.int()).collect::<Result<_, _>>()?),
                "jordan" => {
                    for t in &e.args {
                        let block = build(CpModule::jordan(field, t.count()?), *t)?;
                        module = Some(match module {
                            None => block,
                            Some(m) => build(m.direct_sum(&block), *t)?,
                        });
                    }
                }
                other => return Err(e.key.error(format!("unknown module entry `{other}`"))),
            }
        }
        match (module, rows.is_empty()) {
            (Some(m), true) => Ok(m),
            (None, false) => {
                let n = rows.len();
                if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                    let e = section.entries.iter().filter(|e| e.key.text == "row").nth(i).expect("row exists");
                    return Err(e.key.error(format!("σ must be square: row has {} entries, expected {n}", rows[i].len())));
                }
                build(CpModule::new(field, Matrix::from_i64_rows(field, &rows)), section.name)
            }
            (Some(_), false) => Err(section.name.error("give either `jordan` or `row` lines, not both")),
            (None, true) => Err(section.name.error("[module] is empty")),
        }
    }
}

fn simple_algebra(
    field: FieldSpec,
    kind: Token,
    param: impl Fn() -> Result<usize, ParseError>,
) -> Result<Algebra, ParseError> {
    let built = match kind.text {
        "ground" => Ok(Algebra::ground_field(field)),
        "cyclic-group" => Algebra::cyclic_group(field, param()?),
        "matrix" => Algebra::matrix_algebra(field, param()?),
        "upper-triangular" => Algebra::upper_triangular(field, param()?),
        "truncated-polynomial" => Algebra::truncated_polynomial(field, param()?),
        other => return Err(kind.error(format!("unknown algebra kind `{other}`"))),
    };
    built.map_err(|e| kind.error(e.to_string()))
}
