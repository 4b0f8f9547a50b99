use std::fmt::Write;

use super::{lines, missing, ParseError, Token};
use crate::stack::Symbol;
use crate::tiling::{Tile, TilingProblem, TilingSolution};

pub fn print_tiling(p: &TilingProblem) -> String {
    let mut out = String::from("tiles");
    for t in p.tiles() {
        let _ = write!(out, " {t}");
    }
    let _ = writeln!(out, "\ninit {}\nfinal {}", p.init(), p.fin());
    for (a, b) in p.horizontal() {
        let _ = writeln!(out, "h {a} {b}");
    }
    for (a, b) in p.vertical() {
        let _ = writeln!(out, "v {a} {b}");
    }
    out
}

fn tile(t: Token<'_>) -> Result<Tile, ParseError> {
    if Symbol::is_valid_name(t.text) {
        Ok(Tile::new(t.text))
    } else {
        Err(t.expected("a tile name"))
    }
}

/// Lines `tiles ...`, `init t`, `final t`, `h a b`, `v a b`.
pub fn parse_tiling(text: &str) -> Result<TilingProblem, ParseError> {
    let mut tiles = Vec::new();
    let (mut init, mut fin) = (None, None);
    let (mut h, mut v) = (Vec::new(), Vec::new());
    let mut mentions = Vec::new();
    for l in lines(text) {
        let mut c = l.cursor();
        let key = c.next("a keyword")?;
        match key.text {
            "tiles" => {
                for t in c.rest() {
                    tiles.push(tile(t)?);
                }
            }
            "init" | "final" => {
                let t = c.next("a tile")?;
                c.finish()?;
                mentions.push(t);
                let slot = if key.text == "init" { &mut init } else { &mut fin };
                if slot.replace(tile(t)?).is_some() {
                    return Err(key.invalid(format!("`{}` given twice", key.text)));
                }
            }
            "h" | "v" => {
                let a = c.next("a tile")?;
                let b = c.next("a tile")?;
                c.finish()?;
                mentions.extend([a, b]);
                let pair = (tile(a)?, tile(b)?);
                if key.text == "h" { &mut h } else { &mut v }.push(pair);
            }
            _ => return Err(key.expected("`tiles`, `init`, `final`, `h` or `v`")),
        }
    }
    for t in mentions {
        if !tiles.iter().any(|x| x.as_str() == t.text) {
            return Err(t.invalid(format!("tile {} is not declared", t.text)));
        }
    }
    let init = init.ok_or_else(|| missing(text, "`init t`"))?;
    let fin = fin.ok_or_else(|| missing(text, "`final t`"))?;
    Ok(TilingProblem::new(tiles, h, v, init, fin).expect("tiles checked above"))
}

/// One row per line, tiles separated by spaces.
pub fn print_solution(s: &TilingSolution) -> String {
    let mut out = String::new();
    for row in s.rows() {
        let names: Vec<&str> = row.iter().map(Symbol::as_str).collect();
        let _ = writeln!(out, "{}", names.join(" "));
    }
    out
}

/// Reads the cells in row-major order; the corridor exponent comes from the
/// cell count, which must be a power of four.
pub fn parse_solution(text: &str) -> Result<TilingSolution, ParseError> {
    let mut cells = Vec::new();
    for l in lines(text) {
        for t in &l.tokens {
            cells.push(tile(*t)?);
        }
    }
    let count = cells.len();
    let n = (0..16).find(|&n| 1usize << (2 * n) == count);
    match n {
        Some(n) => Ok(TilingSolution::new(n, cells).expect("size checked")),
        None => Err(ParseError::Invalid {
            line: 1,
            column: 1,
            message: format!("{count} cells do not form a 2^n x 2^n grid"),
        }),
    }
}
