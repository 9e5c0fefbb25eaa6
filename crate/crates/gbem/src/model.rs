//! The line-oriented `.gbem` scene format.
//!
//! ```text
//! # comment
//! domain lo(-20,-20,0) hi(20,20,10)
//! region 0 1.0 lo(-20,-20,0) hi(20,20,10)
//! net 1 cuboid lo(-2,-0.5,1) hi(2,0.5,2)
//! bc +z neumann
//! params 1.5 4 1 1 aspect_cap=4
//! ```
//!
//! `net` lines with the same id add cuboids to one conductor. Faces without a
//! `bc` line are Dirichlet. `params` is optional; its four positional values
//! are p1 p2 p3 p5 and the optional keys are `exp_dirichlet`,
//! `exp_interface_neumann` and `aspect_cap`. Lengths are micrometres.

use std::fmt::{self, Write as _};

use gbem_core::geometry::{build_scene, Axis, Conductor, Cuboid, DielectricRegion, OuterBc, OuterBoundary, Point, Scene};
use gbem_core::partition::PartitionParams;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] gbem_core::Error),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ModelError {
    ModelError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// A token with its 1-based column.
#[derive(Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Splits on whitespace, keeping `name(...)` groups whole even when they
/// contain spaces.
fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token<'_>>, ModelError> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let mut depth = 0usize;
        while i < bytes.len() && (depth > 0 || !bytes[i].is_ascii_whitespace()) {
            match bytes[i] {
                b'(' => depth += 1,
                b')' if depth == 0 => return Err(syntax(lineno, i + 1, "unbalanced ')'")),
                b')' => depth -= 1,
                _ => {}
            }
            i += 1;
        }
        if depth > 0 {
            return Err(syntax(lineno, start + 1, "missing ')'"));
        }
        out.push(Token {
            text: &line[start..i],
            column: start + 1,
        });
    }
    Ok(out)
}

fn number(tok: &Token, line: usize, what: &str) -> Result<f64, ModelError> {
    let v: f64 = tok
        .text
        .parse()
        .map_err(|_| syntax(line, tok.column, format!("expected {what}, found '{}'", tok.text)))?;
    if !v.is_finite() {
        return Err(syntax(line, tok.column, format!("{what} must be finite")));
    }
    Ok(v)
}

fn id(tok: &Token, line: usize, what: &str) -> Result<u32, ModelError> {
    tok.text
        .parse()
        .map_err(|_| syntax(line, tok.column, format!("expected {what} id (non-negative integer), found '{}'", tok.text)))
}

fn point(tok: &Token, line: usize, name: &str) -> Result<Point, ModelError> {
    let inner = tok
        .text
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| syntax(line, tok.column, format!("expected {name}(x,y,z), found '{}'", tok.text)))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(syntax(line, tok.column, format!("{name}(...) needs three coordinates")));
    }
    let mut p = [0.0; 3];
    for (k, s) in parts.iter().enumerate() {
        p[k] = s
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| syntax(line, tok.column, format!("bad coordinate '{s}' in {name}(...)")))?;
    }
    Ok(p)
}

fn corners(toks: &[Token], at: usize, line: usize, keyword: &str) -> Result<Cuboid, ModelError> {
    let end = toks.last().map_or(1, |t| t.column + t.text.len());
    let lo = toks
        .get(at)
        .ok_or_else(|| syntax(line, end, format!("{keyword}: missing lo(x,y,z)")))?;
    let hi = toks
        .get(at + 1)
        .ok_or_else(|| syntax(line, end, format!("{keyword}: missing hi(x,y,z)")))?;
    if let Some(extra) = toks.get(at + 2) {
        return Err(syntax(line, extra.column, format!("{keyword}: unexpected '{}'", extra.text)));
    }
    let (lo_p, hi_p) = (point(lo, line, "lo")?, point(hi, line, "hi")?);
    Cuboid::new(lo_p, hi_p).map_err(|e| syntax(line, lo.column, e.to_string()))
}

fn face(tok: &Token, line: usize) -> Result<(Axis, bool), ModelError> {
    let (sign, axis) = tok.text.split_at(tok.text.len().min(1));
    let positive = match sign {
        "+" => true,
        "-" => false,
        _ => return Err(syntax(line, tok.column, format!("expected a face like +x or -z, found '{}'", tok.text))),
    };
    let axis = match axis {
        "x" => Axis::X,
        "y" => Axis::Y,
        "z" => Axis::Z,
        _ => return Err(syntax(line, tok.column, format!("expected a face like +x or -z, found '{}'", tok.text))),
    };
    Ok((axis, positive))
}

/// Parses a scene file into a validated scene and its partition parameters.
pub fn parse_model(text: &str) -> Result<(Scene, PartitionParams), ModelError> {
    let mut domain: Option<Cuboid> = None;
    let mut regions: Vec<DielectricRegion> = Vec::new();
    let mut nets: Vec<Conductor> = Vec::new();
    let mut outer = OuterBoundary::all_dirichlet();
    let mut bc_seen = [false; 6];
    let mut params: Option<PartitionParams> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokenize(content, line)?;
        let Some(head) = toks.first() else { continue };
        let end = toks.last().map_or(1, |t| t.column + t.text.len());
        match head.text {
            "domain" => {
                if domain.is_some() {
                    return Err(syntax(line, head.column, "domain given twice"));
                }
                domain = Some(corners(&toks, 1, line, "domain")?);
            }
            "region" => {
                let id_tok = toks.get(1).ok_or_else(|| syntax(line, end, "region: missing id"))?;
                let rid = id(id_tok, line, "region")?;
                let eps_tok = toks
                    .get(2)
                    .filter(|t| !t.text.starts_with("lo(") && !t.text.starts_with("hi("))
                    .ok_or_else(|| {
                        syntax(line, toks.get(2).map_or(end, |t| t.column), format!("region {rid}: missing permittivity"))
                    })?;
                let eps = number(eps_tok, line, "relative permittivity")?;
                let bounds = corners(&toks, 3, line, "region")?;
                regions.push(DielectricRegion {
                    id: rid,
                    bounds,
                    rel_permittivity: eps,
                });
            }
            "net" => {
                let id_tok = toks.get(1).ok_or_else(|| syntax(line, end, "net: missing id"))?;
                let nid = id(id_tok, line, "net")?;
                match toks.get(2) {
                    Some(t) if t.text == "cuboid" => {}
                    Some(t) => return Err(syntax(line, t.column, format!("net: expected 'cuboid', found '{}'", t.text))),
                    None => return Err(syntax(line, end, "net: expected 'cuboid'")),
                }
                let c = corners(&toks, 3, line, "net")?;
                match nets.iter_mut().find(|n| n.net == nid) {
                    Some(n) => n.cuboids.push(c),
                    None => nets.push(Conductor::new(nid, vec![c])),
                }
            }
            "bc" => {
                let f_tok = toks.get(1).ok_or_else(|| syntax(line, end, "bc: missing face"))?;
                let (axis, positive) = face(f_tok, line)?;
                let kind_tok = toks.get(2).ok_or_else(|| syntax(line, end, "bc: missing dirichlet|neumann"))?;
                let bc = match kind_tok.text {
                    "dirichlet" => OuterBc::Dirichlet,
                    "neumann" => OuterBc::Neumann,
                    other => {
                        return Err(syntax(line, kind_tok.column, format!("bc: expected dirichlet or neumann, found '{other}'")))
                    }
                };
                if let Some(extra) = toks.get(3) {
                    return Err(syntax(line, extra.column, format!("bc: unexpected '{}'", extra.text)));
                }
                let k = OuterBoundary::face_index(axis, positive);
                if bc_seen[k] {
                    return Err(syntax(line, f_tok.column, format!("bc for {} given twice", f_tok.text)));
                }
                bc_seen[k] = true;
                outer.set(axis, positive, bc);
            }
            "params" => {
                if params.is_some() {
                    return Err(syntax(line, head.column, "params given twice"));
                }
                if toks.len() < 5 {
                    return Err(syntax(line, end, "params: expected p1 p2 p3 p5"));
                }
                let mut p = PartitionParams {
                    p1: number(&toks[1], line, "p1")?,
                    p2: number(&toks[2], line, "p2")?,
                    p3: number(&toks[3], line, "p3")?,
                    p5: number(&toks[4], line, "p5")?,
                    ..PartitionParams::default()
                };
                for t in &toks[5..] {
                    let (key, value) = t
                        .text
                        .split_once('=')
                        .ok_or_else(|| syntax(line, t.column, format!("params: expected key=value, found '{}'", t.text)))?;
                    let vtok = Token {
                        text: value,
                        column: t.column + key.len() + 1,
                    };
                    let v = number(&vtok, line, key)?;
                    match key {
                        "exp_dirichlet" => p.exp_dirichlet = v,
                        "exp_interface_neumann" => p.exp_interface_neumann = v,
                        "aspect_cap" => p.aspect_cap = v,
                        _ => return Err(syntax(line, t.column, format!("params: unknown key '{key}'"))),
                    }
                }
                p.validate().map_err(|e| syntax(line, head.column, e.to_string()))?;
                params = Some(p);
            }
            other => return Err(syntax(line, head.column, format!("unknown keyword '{other}'"))),
        }
    }

    let domain = domain.ok_or_else(|| syntax(last_line.max(1), 1, "missing domain line"))?;
    if regions.is_empty() {
        return Err(syntax(last_line.max(1), 1, "missing region line"));
    }
    let scene = build_scene(domain, regions, nets, outer)?;
    Ok((scene, params.unwrap_or_default()))
}

/// Canonical text form; `parse_model` reproduces the same scene and
/// parameters from it.
pub fn dump_model(scene: &Scene, params: &PartitionParams) -> String {
    struct P(Point);
    impl fmt::Display for P {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
        }
    }
    let mut s = String::new();
    let d = scene.domain();
    let _ = writeln!(s, "domain lo{} hi{}", P(d.lo), P(d.hi));
    let mut regions = scene.regions().to_vec();
    regions.sort_by_key(|r| r.id);
    for r in &regions {
        let _ = writeln!(s, "region {} {} lo{} hi{}", r.id, r.rel_permittivity, P(r.bounds.lo), P(r.bounds.hi));
    }
    let mut nets = scene.conductors().to_vec();
    nets.sort_by_key(|c| c.net);
    for c in &nets {
        for b in &c.cuboids {
            let _ = writeln!(s, "net {} cuboid lo{} hi{}", c.net, P(b.lo), P(b.hi));
        }
    }
    for (k, bc) in scene.outer().0.iter().enumerate() {
        let name = ["-x", "+x", "-y", "+y", "-z", "+z"][k];
        let kind = match bc {
            OuterBc::Dirichlet => "dirichlet",
            OuterBc::Neumann => "neumann",
        };
        let _ = writeln!(s, "bc {name} {kind}");
    }
    let _ = writeln!(
        s,
        "params {} {} {} {} exp_dirichlet={} exp_interface_neumann={} aspect_cap={}",
        params.p1, params.p2, params.p3, params.p5, params.exp_dirichlet, params.exp_interface_neumann, params.aspect_cap
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
domain lo(0,0,0) hi(10,10,10)
region 0 2.5 lo(0,0,0) hi(10,10,10)
net 1 cuboid lo(4,4,4) hi(6,6,6)
";

    #[test]
    fn minimal_scene() {
        let (s, p) = parse_model(MINIMAL).unwrap();
        assert_eq!(s.net_ids(), vec![1]);
        assert_eq!(s.regions()[0].rel_permittivity, 2.5);
        assert!(s.outer().is_all_dirichlet());
        assert_eq!(p, PartitionParams::default());
    }

    #[test]
    fn spaces_inside_points_and_comments() {
        let t = "domain lo(0, 0, 0) hi(10,10,10)  # box\n# only a comment\n\nregion 0 1 lo(0,0,0) hi( 10 ,10,10)\n";
        assert!(parse_model(t).is_ok());
    }

    #[test]
    fn missing_permittivity_names_region() {
        let t = "domain lo(0,0,0) hi(1,1,1)\nregion 7 lo(0,0,0) hi(1,1,1)\n";
        let e = parse_model(t).unwrap_err().to_string();
        assert!(e.contains("region 7") && e.contains("permittivity") && e.starts_with("line 2, column 10"), "{e}");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_model("domain lo(0,0,0) hi(1,1,1)\nwall 3\n").unwrap_err().to_string();
        assert!(e.starts_with("line 2, column 1") && e.contains("wall"), "{e}");
        let e = parse_model("domain lo(0,0) hi(1,1,1)\n").unwrap_err().to_string();
        assert!(e.starts_with("line 1, column 8"), "{e}");
        let e = parse_model(&format!("{MINIMAL}params 1 4 1 1 colour=3\n")).unwrap_err().to_string();
        assert!(e.contains("unknown key 'colour'"), "{e}");
        let e = parse_model(&format!("{MINIMAL}bc +w dirichlet\n")).unwrap_err().to_string();
        assert!(e.starts_with("line 4, column 4"), "{e}");
    }

    #[test]
    fn semantic_errors_come_from_geometry() {
        let t = format!("{MINIMAL}net 2 cuboid lo(5,5,5) hi(7,7,7)\n");
        assert!(matches!(parse_model(&t), Err(ModelError::Geometry(gbem_core::Error::Overlap(_)))));
    }

    #[test]
    fn round_trip() {
        let t = format!("{MINIMAL}net 1 cuboid lo(6,4,4) hi(7,5,5)\nbc +z neumann\nparams 0.75 3 2 1.25 aspect_cap=3\n");
        let (s, p) = parse_model(&t).unwrap();
        let dumped = dump_model(&s, &p);
        let (s2, p2) = parse_model(&dumped).unwrap();
        assert_eq!(dumped, dump_model(&s2, &p2));
        assert_eq!((s, p), (s2, p2));
    }
}
