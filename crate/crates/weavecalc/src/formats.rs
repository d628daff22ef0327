//! Line-oriented text formats for chain complexes, chain maps, homotopies,
//! sheaf data, and graph patches. One grammar shared by the CLI and the test
//! suite; everything round-trips.
//!
//! A homalg file is a sequence of sections:
//!
//! ```text
//! complex A
//! p 5
//! dim 0 2
//! dim 1 1
//! d 0
//! 1 0
//! end
//!
//! map r A B
//! f 0
//! 1
//! 0
//! end
//!
//! homotopy H
//! h 1 2 1
//! 0
//! 1
//! end
//!
//! datum
//! k 1
//! stalks A B
//! transition r
//! retraction s
//! wall F Fp
//! end
//! ```
//!
//! `d n` rows are dim(n+1) x dim(n); `f n` rows are target x source at n;
//! `h n R C` carries its shape explicitly. `#` starts a comment. The datum
//! monodromy line is `wall F F'` for a 1-handle, `loop f01 f12 f02 [H]` for
//! a 2-handle, `pure F` for higher handles.

use crate::cobordism::{CobordismError, Gluing, Monodromy, SheafDatum};
use crate::homalg::{ChainComplex, ChainMap, Degree, HomalgError, Homotopy, Matrix};
use crate::weave_moves::Patch;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("unknown name `{0}` referenced at line {1}")]
    UnknownName(String, usize),
    #[error(transparent)]
    Homalg(#[from] HomalgError),
    #[error(transparent)]
    Cobordism(#[from] CobordismError),
}

#[derive(Debug, Default)]
pub struct HomalgFile {
    pub complexes: BTreeMap<String, ChainComplex>,
    pub maps: BTreeMap<String, ChainMap>,
    pub homotopies: BTreeMap<String, Homotopy>,
    pub datum: Option<SheafDatum>,
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(s: &'a str) -> Lines<'a> {
        Lines {
            iter: s.lines().enumerate(),
        }
    }

    /// Next non-empty, non-comment line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.iter.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

fn perr<T>(no: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Parse(no, msg.into()))
}

fn parse_row(no: usize, line: &str, cols: usize) -> Result<Vec<u64>, FormatError> {
    let vals: Result<Vec<u64>, _> = line.split_whitespace().map(|t| t.parse()).collect();
    let vals = match vals {
        Ok(v) => v,
        Err(_) => return perr(no, format!("bad matrix row `{line}`")),
    };
    if vals.len() != cols {
        return perr(no, format!("expected {cols} entries, got {}", vals.len()));
    }
    Ok(vals)
}

fn read_matrix(
    lines: &mut Lines,
    p: u64,
    rows: usize,
    cols: usize,
) -> Result<Matrix, FormatError> {
    let mut data = Vec::with_capacity(rows);
    for _ in 0..rows {
        let Some((no, line)) = lines.next() else {
            return perr(0, "unexpected end of file inside a matrix");
        };
        data.push(parse_row(no, line, cols)?);
    }
    Ok(Matrix::from_rows(p, data)?)
}

pub fn parse_homalg(input: &str) -> Result<HomalgFile, FormatError> {
    let mut out = HomalgFile::default();
    let mut lines = Lines::new(input);
    while let Some((no, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("complex") => {
                let Some(name) = toks.next() else {
                    return perr(no, "complex needs a name");
                };
                let c = parse_complex_body(&mut lines)?;
                out.complexes.insert(name.to_string(), c);
            }
            Some("map") => {
                let (Some(name), Some(src), Some(dst)) = (toks.next(), toks.next(), toks.next())
                else {
                    return perr(no, "map needs `map NAME SOURCE TARGET`");
                };
                let source = out
                    .complexes
                    .get(src)
                    .ok_or_else(|| FormatError::UnknownName(src.into(), no))?
                    .clone();
                let target = out
                    .complexes
                    .get(dst)
                    .ok_or_else(|| FormatError::UnknownName(dst.into(), no))?
                    .clone();
                let m = parse_map_body(&mut lines, source, target)?;
                out.maps.insert(name.to_string(), m);
            }
            Some("homotopy") => {
                let Some(name) = toks.next() else {
                    return perr(no, "homotopy needs a name");
                };
                let h = parse_homotopy_body(&mut lines, &out)?;
                out.homotopies.insert(name.to_string(), h);
            }
            Some("datum") => {
                let d = parse_datum_body(&mut lines, &out)?;
                out.datum = Some(d);
            }
            Some(other) => return perr(no, format!("unknown section `{other}`")),
            None => {}
        }
    }
    Ok(out)
}

fn parse_complex_body(lines: &mut Lines) -> Result<ChainComplex, FormatError> {
    let mut p: Option<u64> = None;
    let mut dims: BTreeMap<Degree, usize> = BTreeMap::new();
    let mut diffs: BTreeMap<Degree, Matrix> = BTreeMap::new();
    while let Some((no, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                p = Some(
                    toks.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or(FormatError::Parse(no, "p needs a prime".into()))?,
                );
            }
            Some("dim") => {
                let (Some(n), Some(d)) = (
                    toks.next().and_then(|t| t.parse::<Degree>().ok()),
                    toks.next().and_then(|t| t.parse::<usize>().ok()),
                ) else {
                    return perr(no, "dim needs `dim DEGREE SIZE`");
                };
                dims.insert(n, d);
            }
            Some("d") => {
                let Some(n) = toks.next().and_then(|t| t.parse::<Degree>().ok()) else {
                    return perr(no, "d needs a degree");
                };
                let pp = p.ok_or(FormatError::Parse(no, "p must precede matrices".into()))?;
                let rows = dims.get(&(n + 1)).copied().unwrap_or(0);
                let cols = dims.get(&n).copied().unwrap_or(0);
                diffs.insert(n, read_matrix(lines, pp, rows, cols)?);
            }
            Some("end") => {
                let pp = p.ok_or(FormatError::Parse(no, "complex missing p".into()))?;
                return Ok(ChainComplex::new(pp, dims, diffs)?);
            }
            _ => return perr(no, format!("unexpected line in complex: `{line}`")),
        }
    }
    perr(0, "complex not terminated by `end`")
}

fn parse_map_body(
    lines: &mut Lines,
    source: ChainComplex,
    target: ChainComplex,
) -> Result<ChainMap, FormatError> {
    let mut components: BTreeMap<Degree, Matrix> = BTreeMap::new();
    while let Some((no, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("f") => {
                let Some(n) = toks.next().and_then(|t| t.parse::<Degree>().ok()) else {
                    return perr(no, "f needs a degree");
                };
                let m = read_matrix(lines, source.p(), target.dim(n), source.dim(n))?;
                components.insert(n, m);
            }
            Some("end") => return Ok(ChainMap::new(source, target, components)?),
            _ => return perr(no, format!("unexpected line in map: `{line}`")),
        }
    }
    perr(0, "map not terminated by `end`")
}

fn parse_homotopy_body(lines: &mut Lines, ctx: &HomalgFile) -> Result<Homotopy, FormatError> {
    let p = ctx
        .complexes
        .values()
        .next()
        .map(|c| c.p())
        .unwrap_or(2);
    let mut components: BTreeMap<Degree, Matrix> = BTreeMap::new();
    while let Some((no, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("h") => {
                let (Some(n), Some(r), Some(c)) = (
                    toks.next().and_then(|t| t.parse::<Degree>().ok()),
                    toks.next().and_then(|t| t.parse::<usize>().ok()),
                    toks.next().and_then(|t| t.parse::<usize>().ok()),
                ) else {
                    return perr(no, "h needs `h DEGREE ROWS COLS`");
                };
                components.insert(n, read_matrix(lines, p, r, c)?);
            }
            Some("end") => return Ok(Homotopy { components }),
            _ => return perr(no, format!("unexpected line in homotopy: `{line}`")),
        }
    }
    perr(0, "homotopy not terminated by `end`")
}

fn parse_datum_body(lines: &mut Lines, ctx: &HomalgFile) -> Result<SheafDatum, FormatError> {
    let mut k: Option<u32> = None;
    let mut stalks: Option<(String, String)> = None;
    let mut transition: Option<String> = None;
    let mut retraction: Option<String> = None;
    let mut monodromy: Option<Monodromy> = None;
    let lookup_c = |name: &str, no: usize| -> Result<ChainComplex, FormatError> {
        ctx.complexes
            .get(name)
            .cloned()
            .ok_or_else(|| FormatError::UnknownName(name.into(), no))
    };
    let lookup_m = |name: &str, no: usize| -> Result<ChainMap, FormatError> {
        ctx.maps
            .get(name)
            .cloned()
            .ok_or_else(|| FormatError::UnknownName(name.into(), no))
    };
    while let Some((no, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("k") => {
                k = Some(
                    toks.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or(FormatError::Parse(no, "k needs an integer".into()))?,
                );
            }
            Some("stalks") => {
                let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
                    return perr(no, "stalks needs two complex names");
                };
                stalks = Some((a.to_string(), b.to_string()));
            }
            Some("transition") => {
                transition = Some(
                    toks.next()
                        .ok_or(FormatError::Parse(no, "transition needs a map name".into()))?
                        .to_string(),
                );
            }
            Some("retraction") => {
                retraction = Some(
                    toks.next()
                        .ok_or(FormatError::Parse(no, "retraction needs a map name".into()))?
                        .to_string(),
                );
            }
            Some("wall") => {
                let (Some(f), Some(fp)) = (toks.next(), toks.next()) else {
                    return perr(no, "wall needs two complex names");
                };
                monodromy = Some(Monodromy::Spheres {
                    f: lookup_c(f, no)?,
                    f_prime: lookup_c(fp, no)?,
                });
            }
            Some("loop") => {
                let (Some(f01), Some(f12), Some(f02)) = (toks.next(), toks.next(), toks.next())
                else {
                    return perr(no, "loop needs three map names");
                };
                let h = match toks.next() {
                    Some(name) => Some(
                        ctx.homotopies
                            .get(name)
                            .cloned()
                            .ok_or_else(|| FormatError::UnknownName(name.into(), no))?,
                    ),
                    None => None,
                };
                monodromy = Some(Monodromy::Loop {
                    f01: lookup_m(f01, no)?,
                    f12: lookup_m(f12, no)?,
                    f02: lookup_m(f02, no)?,
                    h,
                });
            }
            Some("pure") => {
                let Some(f) = toks.next() else {
                    return perr(no, "pure needs a complex name");
                };
                monodromy = Some(Monodromy::Pure {
                    f: lookup_c(f, no)?,
                });
            }
            Some("end") => {
                let k = k.ok_or(FormatError::Parse(no, "datum missing k".into()))?;
                let (a, b) =
                    stalks.ok_or(FormatError::Parse(no, "datum missing stalks".into()))?;
                let r = transition
                    .ok_or(FormatError::Parse(no, "datum missing transition".into()))?;
                let s = retraction
                    .ok_or(FormatError::Parse(no, "datum missing retraction".into()))?;
                let monodromy =
                    monodromy.ok_or(FormatError::Parse(no, "datum missing monodromy".into()))?;
                return Ok(SheafDatum::new(
                    lookup_c(&a, no)?,
                    lookup_c(&b, no)?,
                    lookup_m(&r, no)?,
                    lookup_m(&s, no)?,
                    k,
                    monodromy,
                )?);
            }
            _ => return perr(no, format!("unexpected line in datum: `{line}`")),
        }
    }
    perr(0, "datum not terminated by `end`")
}

/// A gluing file is a homalg file holding either one map (the wall
/// automorphism for a 1-handle) or one homotopy (for a 2-handle).
pub fn parse_gluing(input: &str) -> Result<Gluing, FormatError> {
    let file = parse_homalg(input)?;
    if let Some(h) = file.homotopies.values().next() {
        return Ok(Gluing::TrivializingHomotopy(h.clone()));
    }
    if let Some(m) = file.maps.values().next() {
        return Ok(Gluing::WallAutomorphism(m.clone()));
    }
    Ok(Gluing::Unique)
}

fn write_matrix(out: &mut String, m: &Matrix) {
    for r in 0..m.rows {
        let row: Vec<String> = (0..m.cols).map(|c| m.get(r, c).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

pub fn complex_to_text(name: &str, c: &ChainComplex) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "complex {name}");
    let _ = writeln!(out, "p {}", c.p());
    for (&n, &d) in c.dims() {
        let _ = writeln!(out, "dim {n} {d}");
    }
    for &n in c.dims().keys() {
        let m = c.diff(n);
        if m.rows > 0 && m.cols > 0 && !m.is_zero() {
            let _ = writeln!(out, "d {n}");
            write_matrix(&mut out, &m);
        }
    }
    let _ = writeln!(out, "end");
    out
}

pub fn map_to_text(name: &str, src: &str, dst: &str, f: &ChainMap) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "map {name} {src} {dst}");
    let degrees: std::collections::BTreeSet<Degree> = f
        .source()
        .dims()
        .keys()
        .chain(f.target().dims().keys())
        .copied()
        .collect();
    for n in degrees {
        let m = f.component(n);
        if m.rows > 0 && m.cols > 0 {
            let _ = writeln!(out, "f {n}");
            write_matrix(&mut out, &m);
        }
    }
    let _ = writeln!(out, "end");
    out
}

pub fn homotopy_to_text(name: &str, h: &Homotopy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "homotopy {name}");
    for (&n, m) in &h.components {
        let _ = writeln!(out, "h {n} {} {}", m.rows, m.cols);
        write_matrix(&mut out, m);
    }
    let _ = writeln!(out, "end");
    out
}

/// Serialize a whole datum with canonical section names.
pub fn datum_to_text(d: &SheafDatum) -> String {
    let mut out = String::new();
    out += &complex_to_text("A", &d.a);
    out += &complex_to_text("B", &d.b);
    out += &map_to_text("r", "A", "B", &d.r);
    out += &map_to_text("s", "B", "A", &d.s);
    let mono_line;
    match &d.monodromy {
        Monodromy::Spheres { f, f_prime } => {
            out += &complex_to_text("F", f);
            out += &complex_to_text("Fp", f_prime);
            mono_line = "wall F Fp".to_string();
        }
        Monodromy::Loop { f01, f12, f02, h } => {
            out += &complex_to_text("F", f02.source());
            out += &map_to_text("f01", "F", "F", f01);
            out += &map_to_text("f12", "F", "F", f12);
            out += &map_to_text("f02", "F", "F", f02);
            if let Some(h) = h {
                out += &homotopy_to_text("H", h);
                mono_line = "loop f01 f12 f02 H".to_string();
            } else {
                mono_line = "loop f01 f12 f02".to_string();
            }
        }
        Monodromy::Pure { f } => {
            out += &complex_to_text("F", f);
            mono_line = "pure F".to_string();
        }
    }
    let _ = writeln!(out, "datum");
    let _ = writeln!(out, "k {}", d.attach_k);
    let _ = writeln!(out, "stalks A B");
    let _ = writeln!(out, "transition r");
    let _ = writeln!(out, "retraction s");
    let _ = writeln!(out, "{mono_line}");
    let _ = writeln!(out, "end");
    out
}

/// Patch files: dart lists and cycles in the same style as graph files.
///
/// ```text
/// patch
/// remove: 0 1 2
/// darts: 100 101 102
/// alpha: 100 101
/// sigma: 100 101 102
/// match: 3 100
/// end
/// ```
pub fn parse_patch(input: &str) -> Result<Patch, FormatError> {
    let mut lines = Lines::new(input);
    let Some((no, first)) = lines.next() else {
        return perr(0, "empty patch file");
    };
    if first != "patch" {
        return perr(no, "patch file must start with `patch`");
    }
    let mut patch = Patch {
        remove: Vec::new(),
        darts: Vec::new(),
        alpha: Vec::new(),
        sigma: Vec::new(),
        matching: Vec::new(),
    };
    let ints = |no: usize, rest: &str| -> Result<Vec<u32>, FormatError> {
        rest.split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| FormatError::Parse(no, format!("bad dart `{t}`")))
            })
            .collect()
    };
    while let Some((no, line)) = lines.next() {
        if line == "end" {
            return Ok(patch);
        }
        let Some((key, rest)) = line.split_once(':') else {
            return perr(no, format!("expected `key: values`, got `{line}`"));
        };
        let vals = ints(no, rest)?;
        match key.trim() {
            "remove" => patch.remove.extend(vals),
            "darts" => patch.darts.extend(vals),
            "alpha" => {
                if vals.len() != 2 {
                    return perr(no, "alpha line needs exactly two darts");
                }
                patch.alpha.push((vals[0], vals[1]));
            }
            "sigma" => patch.sigma.push(vals),
            "match" => {
                if vals.len() != 2 {
                    return perr(no, "match line needs `host patch` darts");
                }
                patch.matching.push((vals[0], vals[1]));
            }
            other => return perr(no, format!("unknown patch key `{other}`")),
        }
    }
    perr(0, "patch not terminated by `end`")
}

pub fn patch_to_text(p: &Patch) -> String {
    let mut out = String::from("patch\n");
    let join = |v: &[u32]| {
        v.iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    if !p.remove.is_empty() {
        let _ = writeln!(out, "remove: {}", join(&p.remove));
    }
    if !p.darts.is_empty() {
        let _ = writeln!(out, "darts: {}", join(&p.darts));
    }
    for &(a, b) in &p.alpha {
        let _ = writeln!(out, "alpha: {a} {b}");
    }
    for cyc in &p.sigma {
        let _ = writeln!(out, "sigma: {}", join(cyc));
    }
    for &(h, q) in &p.matching {
        let _ = writeln!(out, "match: {h} {q}");
    }
    out += "end\n";
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randgen::{random_sheaf_datum, rng_from_seed};
    use crate::surface_map::CombMap;
    use crate::weave_moves::{apply_patch, triangle_patch, insert_triangle};

    #[test]
    fn complex_round_trip() {
        let text = "\
complex C
p 3
dim 0 2
dim 1 1
d 0
1 2
end
";
        let file = parse_homalg(text).unwrap();
        let c = &file.complexes["C"];
        assert_eq!(c.p(), 3);
        assert_eq!(c.dim(0), 2);
        assert_eq!(c.dim(1), 1);
        let again = parse_homalg(&complex_to_text("C", c)).unwrap();
        assert_eq!(&again.complexes["C"], c);
    }

    #[test]
    fn map_round_trip_and_validation() {
        let text = "\
complex A
p 2
dim 0 1
end
complex B
p 2
dim 0 2
end
map r A B
f 0
1
0
end
";
        let file = parse_homalg(text).unwrap();
        let r = &file.maps["r"];
        assert_eq!(r.component(0).get(0, 0), 1);
        let again = parse_homalg(&format!(
            "{}{}{}",
            complex_to_text("A", r.source()),
            complex_to_text("B", r.target()),
            map_to_text("r", "A", "B", r)
        ))
        .unwrap();
        assert_eq!(&again.maps["r"], r);
    }

    #[test]
    fn bad_chain_map_rejected_at_parse() {
        let text = "\
complex A
p 2
dim 0 1
dim 1 1
d 0
1
end
complex B
p 2
dim 0 1
dim 1 1
end
map f A B
f 0
1
f 1
1
end
";
        // d_B f = 0 but f d_A = 1 in degree 0: not a chain map
        assert!(parse_homalg(text).is_err());
    }

    #[test]
    fn datum_round_trip_random() {
        let mut rng = rng_from_seed(55);
        for _ in 0..20 {
            let d = random_sheaf_datum(&mut rng, 3);
            let text = datum_to_text(&d);
            let file = parse_homalg(&text).unwrap();
            let d2 = file.datum.expect("datum parsed");
            assert_eq!(d2.attach_k, d.attach_k);
            assert_eq!(d2.a, d.a);
            assert_eq!(d2.b, d.b);
            assert_eq!(d2.r, d.r);
            assert_eq!(d2.s, d.s);
            assert_eq!(
                d2.microstalk().homology_ranks(),
                d.microstalk().homology_ranks()
            );
        }
    }

    #[test]
    fn patch_round_trip_and_application() {
        let theta = CombMap::builtin("theta").unwrap();
        let patch = triangle_patch(&theta, 0).unwrap();
        let text = patch_to_text(&patch);
        let parsed = parse_patch(&text).unwrap();
        let via_patch = apply_patch(&theta, &parsed).unwrap();
        let direct = insert_triangle(&theta, 0).unwrap();
        assert!(via_patch.is_isomorphic(&direct));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_homalg("complex\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse(1, _)));
        let err = parse_patch("patch\nbogus line\nend\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse(2, _)));
    }

    #[test]
    fn gluing_files() {
        let map_file = "\
complex F
p 5
dim 0 1
end
map g F F
f 0
2
end
";
        assert!(matches!(
            parse_gluing(map_file).unwrap(),
            Gluing::WallAutomorphism(_)
        ));
        let h_file = "\
homotopy H
h 1 1 1
0
end
";
        assert!(matches!(
            parse_gluing(h_file).unwrap(),
            Gluing::TrivializingHomotopy(_)
        ));
        assert!(matches!(parse_gluing("").unwrap(), Gluing::Unique));
    }
}
