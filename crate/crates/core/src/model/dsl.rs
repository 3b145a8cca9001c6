//! Line-oriented model file format (`.ssm` spectral form, `.kssm` Kalman
//! form).
//!
//! ```text
//! # comment
//! model lapwing
//! form spectral            # or `kalman`; default spectral
//! params rho phi1 phia s2eta s2eps
//! known x01 x02            # optional, sampled but not differentiated
//! states 2
//! outputs 1
//! domain discrete          # or `continuous`
//! range rho 1/10 9/10      # optional sampling range override
//!
//! matrix A
//!   0    ; rho*phi1
//!   phia ; phia
//! end
//! diag Q                   # shorthand for a diagonal matrix
//!   s2eps ; s2eps ; s2eta
//! end
//! ```

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{
    default_init, validate_kalman_model, validate_model, KalmanModelSpec, Model, ModelSpec, ParamRange, Symbols,
    TimeDomain,
};
use crate::algebra::{MPoly, Matrix, Rational};
use crate::error::Error;
use crate::expr::Expr;

struct Cell {
    line: usize,
    col: usize,
    text: String,
}

struct Block {
    line: usize,
    diagonal: bool,
    rows: Vec<Vec<Cell>>,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Splits a row on `;`, remembering the 1-based column of each cell.
fn split_row(raw: &str, line: usize) -> Vec<Cell> {
    let mut cells = Vec::new();
    let mut start_col = 1;
    let mut current = String::new();
    for (i, ch) in raw.chars().enumerate() {
        if ch == ';' {
            cells.push(make_cell(&current, line, start_col));
            current.clear();
            start_col = i + 2;
        } else {
            current.push(ch);
        }
    }
    cells.push(make_cell(&current, line, start_col));
    cells
}

fn make_cell(text: &str, line: usize, start_col: usize) -> Cell {
    let lead = text.chars().take_while(|c| c.is_whitespace()).count();
    Cell {
        line,
        col: start_col + lead,
        text: text.trim().to_owned(),
    }
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    kalman: bool,
    params: Option<Vec<String>>,
    knowns: Vec<String>,
    states: Option<usize>,
    outputs: Option<usize>,
    domain: Option<TimeDomain>,
    ranges: Vec<(usize, String, ParamRange)>,
}

fn parse_count(word: Option<&str>, line: usize, what: &str) -> Result<usize, Error> {
    word.and_then(|w| w.parse().ok())
        .ok_or_else(|| syntax(line, 1, format!("`{what}` needs a non-negative integer")))
}

fn parse_constant(text: &str, line: usize, col: usize) -> Result<Rational, Error> {
    let e = Expr::parse_at(text, line, col)?;
    e.to_mpoly::<&str>(&[])
        .map_err(|err| match err {
            Error::UndeclaredIdentifier { .. } => syntax(line, col, "expected a constant"),
            other => other,
        })?
        .constant_value()
        .ok_or_else(|| syntax(line, col, "expected a constant"))
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<Model, Error> {
    let mut header = Header::default();
    let mut blocks: BTreeMap<String, Block> = BTreeMap::new();
    let mut open: Option<(String, Block)> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw_line);
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut words = trimmed.split_whitespace();
        let keyword = words.next().unwrap_or_default();

        if let Some((name, mut block)) = open.take() {
            if keyword == "end" {
                if block.rows.is_empty() {
                    return Err(syntax(line, 1, format!("block `{name}` is empty")));
                }
                if blocks.insert(name.clone(), block).is_some() {
                    return Err(syntax(line, 1, format!("block `{name}` defined twice")));
                }
            } else {
                block.rows.push(split_row(content, line));
                open = Some((name, block));
            }
            continue;
        }

        match keyword {
            "model" => header.name = words.next().map(str::to_owned),
            "form" => {
                header.kalman = match words.next() {
                    Some("kalman") => true,
                    Some("spectral") => false,
                    _ => return Err(syntax(line, 1, "`form` must be `spectral` or `kalman`")),
                }
            }
            "params" => header.params = Some(words.map(str::to_owned).collect()),
            "known" => header.knowns.extend(words.map(str::to_owned)),
            "states" => header.states = Some(parse_count(words.next(), line, "states")?),
            "outputs" => header.outputs = Some(parse_count(words.next(), line, "outputs")?),
            "domain" => {
                header.domain = Some(match words.next() {
                    Some("discrete") => TimeDomain::Discrete,
                    Some("continuous") => TimeDomain::Continuous,
                    _ => return Err(syntax(line, 1, "`domain` must be `discrete` or `continuous`")),
                })
            }
            "range" => {
                let rest: Vec<&str> = words.collect();
                if rest.len() != 3 {
                    return Err(syntax(line, 1, "expected `range <name> <lo> <hi>`"));
                }
                let lo = parse_constant(rest[1], line, 1)?;
                let hi = parse_constant(rest[2], line, 1)?;
                header.ranges.push((line, rest[0].to_owned(), ParamRange { lo, hi }));
            }
            "matrix" | "diag" => {
                let name = words
                    .next()
                    .ok_or_else(|| syntax(line, 1, "block needs a name"))?
                    .to_owned();
                open = Some((
                    name,
                    Block {
                        line,
                        diagonal: keyword == "diag",
                        rows: Vec::new(),
                    },
                ));
            }
            other => return Err(syntax(line, 1, format!("unknown keyword `{other}`"))),
        }
    }
    if let Some((name, block)) = open {
        return Err(syntax(
            block.line,
            1,
            format!("block `{name}` is not closed with `end`"),
        ));
    }

    let last_line = text.lines().count().max(1);
    let params = header
        .params
        .take()
        .ok_or_else(|| syntax(last_line, 1, "missing `params` declaration"))?;
    let n = header
        .states
        .ok_or_else(|| syntax(last_line, 1, "missing `states` declaration"))?;
    let m = header
        .outputs
        .ok_or_else(|| syntax(last_line, 1, "missing `outputs` declaration"))?;
    let mut symbols = Symbols::new(params, core::mem::take(&mut header.knowns));
    for (line, name, range) in &header.ranges {
        symbols
            .set_range(name, range.clone())
            .map_err(|e| syntax(*line, 1, e.to_string()))?;
    }

    let allowed: &[&str] = if header.kalman {
        &["A", "B", "C", "D", "Q", "R", "S", "input", "init_state", "init_cov"]
    } else {
        &["A", "B", "C", "D", "Q", "init"]
    };
    for (name, block) in &blocks {
        if !allowed.contains(&name.as_str()) {
            return Err(syntax(
                block.line,
                1,
                format!("unexpected block `{name}` for this model form"),
            ));
        }
    }

    let mut ctx = Ctx {
        blocks,
        symbols: &symbols,
        last_line,
    };
    if header.kalman {
        if header.domain == Some(TimeDomain::Continuous) {
            return Err(syntax(last_line, 1, "Kalman-form models are discrete-time"));
        }
        let a = ctx.required("A")?;
        let c = ctx.required("C")?;
        let q = ctx.required("Q")?;
        let r = ctx.required("R")?;
        let s = ctx.optional("S")?;
        let b = ctx.optional("B")?;
        let d = ctx.optional("D")?;
        let k = b
            .as_ref()
            .map(Matrix::cols)
            .or(d.as_ref().map(Matrix::cols))
            .unwrap_or(0);
        let nv = symbols.nvars();
        let b = b.unwrap_or_else(|| Matrix::from_fn(n, k, |_, _| MPoly::zero(nv)));
        let d = d.unwrap_or_else(|| Matrix::from_fn(m, k, |_, _| MPoly::zero(nv)));
        let (default_state, default_cov) = default_init(n);
        let input = ctx
            .constants("input")?
            .unwrap_or_else(|| alloc::vec![Rational::default(); k]);
        let init_state = ctx.constants("init_state")?.unwrap_or(default_state);
        let init_cov = ctx.constants("init_cov")?.unwrap_or(default_cov);
        let spec = KalmanModelSpec {
            name: header.name,
            symbols: symbols.clone(),
            n,
            m,
            a,
            b,
            c,
            d,
            q,
            r,
            s,
            input,
            init_state,
            init_cov,
        };
        let diags = validate_kalman_model(&spec);
        if !diags.is_empty() {
            return Err(Error::InvalidModel(diags));
        }
        Ok(Model::Kalman(spec))
    } else {
        let a = ctx.required("A")?;
        let b = ctx.required("B")?;
        let c = ctx.required("C")?;
        let d = ctx.required("D")?;
        let q = ctx.required("Q")?;
        let init = ctx.vector("init")?;
        let spec = ModelSpec {
            name: header.name,
            symbols: symbols.clone(),
            n,
            m,
            a,
            b,
            c,
            d,
            q,
            time_domain: header.domain.unwrap_or(TimeDomain::Discrete),
            init,
        };
        let diags = validate_model(&spec);
        if !diags.is_empty() {
            return Err(Error::InvalidModel(diags));
        }
        Ok(Model::Spectral(spec))
    }
}

struct Ctx<'a> {
    blocks: BTreeMap<String, Block>,
    symbols: &'a Symbols,
    last_line: usize,
}

impl Ctx<'_> {
    fn required(&mut self, name: &str) -> Result<Matrix<MPoly>, Error> {
        self.optional(name)?
            .ok_or_else(|| syntax(self.last_line, 1, format!("missing matrix `{name}`")))
    }

    fn optional(&mut self, name: &str) -> Result<Option<Matrix<MPoly>>, Error> {
        let Some(block) = self.blocks.remove(name) else {
            return Ok(None);
        };
        let names = &self.symbols.names;
        let mut rows = Vec::with_capacity(block.rows.len());
        for row in &block.rows {
            let mut out = Vec::with_capacity(row.len());
            for cell in row {
                if cell.text.is_empty() {
                    return Err(syntax(cell.line, cell.col, "empty matrix entry"));
                }
                out.push(Expr::parse_at(&cell.text, cell.line, cell.col)?.to_mpoly(names)?);
            }
            rows.push(out);
        }
        if block.diagonal {
            if rows.len() != 1 {
                return Err(syntax(
                    block.line,
                    1,
                    format!("diag block `{name}` must be a single row"),
                ));
            }
            let diag = rows.pop().unwrap_or_default();
            let nv = self.symbols.nvars();
            return Ok(Some(Matrix::from_fn(diag.len(), diag.len(), |i, j| {
                if i == j {
                    diag[i].clone()
                } else {
                    MPoly::zero(nv)
                }
            })));
        }
        let width = rows[0].len();
        for (row, cells) in rows.iter().zip(&block.rows) {
            if row.len() != width {
                return Err(syntax(
                    cells[0].line,
                    1,
                    format!("row of `{name}` has {} entries, expected {width}", row.len()),
                ));
            }
        }
        Ok(Matrix::from_rows(rows))
    }

    fn vector(&mut self, name: &str) -> Result<Option<Vec<MPoly>>, Error> {
        let line = self.blocks.get(name).map_or(0, |b| b.line);
        let diagonal = self.blocks.get(name).is_some_and(|b| b.diagonal);
        Ok(match self.optional(name)? {
            None => None,
            Some(m) if diagonal => Some((0..m.rows()).map(|i| m[(i, i)].clone()).collect()),
            Some(m) if m.rows() == 1 || m.cols() == 1 => Some(m.iter().cloned().collect()),
            Some(_) => return Err(syntax(line, 1, format!("`{name}` must be a single row or column"))),
        })
    }

    fn constants(&mut self, name: &str) -> Result<Option<Vec<Rational>>, Error> {
        let line = self.blocks.get(name).map_or(0, |b| b.line);
        match self.vector(name)? {
            None => Ok(None),
            Some(v) => v
                .iter()
                .map(|p| {
                    p.constant_value()
                        .ok_or_else(|| syntax(line, 1, format!("`{name}` entries must be constants")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }
}

fn write_matrix(out: &mut String, label: &str, m: &Matrix<MPoly>, names: &[String]) {
    if m.rows() == 0 || m.cols() == 0 {
        return;
    }
    let _ = writeln!(out, "\nmatrix {label}");
    for i in 0..m.rows() {
        let cells: Vec<String> = m.row(i).iter().map(|p| p.display(names).to_string()).collect();
        let _ = writeln!(out, "  {}", cells.join(" ; "));
    }
    out.push_str("end\n");
}

fn write_constants(out: &mut String, label: &str, v: &[Rational]) {
    if v.is_empty() {
        return;
    }
    let cells: Vec<String> = v.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "\nmatrix {label}\n  {}\nend", cells.join(" ; "));
}

fn write_header(out: &mut String, name: &Option<String>, symbols: &Symbols, n: usize, m: usize) {
    if let Some(name) = name {
        let _ = writeln!(out, "model {name}");
    }
    let _ = writeln!(out, "params {}", symbols.params().join(" "));
    if !symbols.knowns().is_empty() {
        let _ = writeln!(out, "known {}", symbols.knowns().join(" "));
    }
    let _ = writeln!(out, "states {n}");
    let _ = writeln!(out, "outputs {m}");
}

fn write_ranges(out: &mut String, symbols: &Symbols) {
    let default = ParamRange::default();
    for (name, r) in symbols.names.iter().zip(&symbols.ranges) {
        if *r != default {
            let _ = writeln!(out, "range {name} {} {}", r.lo, r.hi);
        }
    }
}

/// Prints a model in the file syntax accepted by [`parse_model`].
pub fn print_model(model: &Model) -> String {
    let mut out = String::new();
    match model {
        Model::Spectral(s) => {
            write_header(&mut out, &s.name, &s.symbols, s.n, s.m);
            out.push_str(match s.time_domain {
                TimeDomain::Discrete => "domain discrete\n",
                TimeDomain::Continuous => "domain continuous\n",
            });
            write_ranges(&mut out, &s.symbols);
            let names = &s.symbols.names;
            write_matrix(&mut out, "A", &s.a, names);
            write_matrix(&mut out, "B", &s.b, names);
            write_matrix(&mut out, "C", &s.c, names);
            write_matrix(&mut out, "D", &s.d, names);
            write_matrix(&mut out, "Q", &s.q, names);
            if let Some(init) = &s.init {
                let row = Matrix::from_fn(1, init.len(), |_, j| init[j].clone());
                write_matrix(&mut out, "init", &row, names);
            }
        }
        Model::Kalman(k) => {
            write_header(&mut out, &k.name, &k.symbols, k.n, k.m);
            out.push_str("form kalman\ndomain discrete\n");
            write_ranges(&mut out, &k.symbols);
            let names = &k.symbols.names;
            write_matrix(&mut out, "A", &k.a, names);
            write_matrix(&mut out, "B", &k.b, names);
            write_matrix(&mut out, "C", &k.c, names);
            write_matrix(&mut out, "D", &k.d, names);
            write_matrix(&mut out, "Q", &k.q, names);
            write_matrix(&mut out, "R", &k.r, names);
            if let Some(s) = &k.s {
                write_matrix(&mut out, "S", s, names);
            }
            write_constants(&mut out, "input", &k.input);
            write_constants(&mut out, "init_state", &k.init_state);
            write_constants(&mut out, "init_cov", &k.init_cov);
        }
    }
    out
}
