//! Plain-text mesh files.
//!
//! ```text
//! # comment
//! nodes <n>
//! <index> <x> <y>          (n lines)
//! elements <m>
//! <index> <v1> <v2> <v3>   (m lines, counter-clockwise)
//! boundary <b>
//! <index> <v1> <v2>        (b lines)
//! ```
//!
//! All indices are 1-based and appear in increasing order. Blank lines and
//! text after `#` are ignored. The boundary block is optional.

use std::fmt::Write as _;
use std::path::Path;

use super::{build_mesh, Mesh};
use crate::error::{Error, Result};

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

pub fn write_mesh(path: impl AsRef<Path>, mesh: &Mesh) -> Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn format_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "nodes {}", mesh.n_vertices());
    for (i, v) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(s, "{} {:.17e} {:.17e}", i + 1, v[0], v[1]);
    }
    let _ = writeln!(s, "elements {}", mesh.n_triangles());
    for (i, t) in mesh.triangles().iter().enumerate() {
        let _ = writeln!(s, "{} {} {} {}", i + 1, t[0] + 1, t[1] + 1, t[2] + 1);
    }
    let boundary: Vec<_> = mesh.sides().iter().filter(|s| s.is_boundary()).collect();
    let _ = writeln!(s, "boundary {}", boundary.len());
    for (i, side) in boundary.iter().enumerate() {
        let _ = writeln!(s, "{} {} {}", i + 1, side.vertices[0] + 1, side.vertices[1] + 1);
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, with its 1-based number.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let body = line.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::MeshParse { line, msg: msg.into() }
}

fn header(lines: &mut Lines, name: &str) -> Result<Option<usize>> {
    let Some((line, tok)) = lines.next_tokens() else {
        return Ok(None);
    };
    if tok.len() != 2 || tok[0] != name {
        return Err(parse_err(line, format!("expected `{name} <count>`")));
    }
    let n = tok[1]
        .parse()
        .map_err(|_| parse_err(line, format!("invalid count `{}`", tok[1])))?;
    Ok(Some(n))
}

fn block<'a>(lines: &mut Lines<'a>, count: usize, width: usize) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut out = Vec::with_capacity(count);
    for expected in 1..=count {
        let (line, tok) = lines
            .next_tokens()
            .ok_or_else(|| parse_err(0, "unexpected end of file"))?;
        if tok.len() != width + 1 {
            return Err(parse_err(line, format!("expected {} columns", width + 1)));
        }
        if tok[0].parse::<usize>().ok() != Some(expected) {
            return Err(parse_err(line, format!("expected index {expected}")));
        }
        out.push((line, tok[1..].to_vec()));
    }
    Ok(out)
}

fn vertex_index(line: usize, tok: &str, n: usize) -> Result<usize> {
    match tok.parse::<usize>() {
        Ok(i) if i >= 1 && i <= n => Ok(i - 1),
        _ => Err(parse_err(line, format!("invalid vertex index `{tok}`"))),
    }
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let n = header(&mut lines, "nodes")?.ok_or_else(|| parse_err(0, "missing nodes block"))?;
    let mut vertices = Vec::with_capacity(n);
    for (line, tok) in block(&mut lines, n, 2)? {
        let x: f64 = tok[0].parse().map_err(|_| parse_err(line, "invalid coordinate"))?;
        let y: f64 = tok[1].parse().map_err(|_| parse_err(line, "invalid coordinate"))?;
        vertices.push([x, y]);
    }
    let m = header(&mut lines, "elements")?
        .ok_or_else(|| parse_err(0, "missing elements block"))?;
    let mut triangles = Vec::with_capacity(m);
    for (line, tok) in block(&mut lines, m, 3)? {
        let mut t = [0; 3];
        for (ti, s) in t.iter_mut().zip(&tok) {
            *ti = vertex_index(line, s, n)?;
        }
        triangles.push(t);
    }
    let boundary = match header(&mut lines, "boundary")? {
        None => None,
        Some(b) => {
            let mut sides = Vec::with_capacity(b);
            for (line, tok) in block(&mut lines, b, 2)? {
                sides.push([vertex_index(line, tok[0], n)?, vertex_index(line, tok[1], n)?]);
            }
            Some(sides)
        }
    };
    if let Some((line, _)) = lines.next_tokens() {
        return Err(parse_err(line, "trailing content"));
    }
    build_mesh(vertices, triangles, boundary.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::domains;

    #[test]
    fn round_trip() {
        let m = domains::lshape();
        let back = parse_mesh(&format_mesh(&m)).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
    }

    #[test]
    fn reports_line_numbers() {
        let text = "# square\nnodes 3\n1 0 0\n2 1 0\n3 0 1\nelements 1\n1 1 2 9\n";
        match parse_mesh(text) {
            Err(Error::MeshParse { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reads_file_without_boundary_block() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        std::fs::write(&p, "nodes 3\n1 0 0\n2 1 0 # x axis\n3 0 1\n\nelements 1\n1 1 2 3\n").unwrap();
        let m = read_mesh(&p).unwrap();
        assert_eq!(m.n_triangles(), 1);
    }
}
