//! TOML input files: complexes, representations, cocycles and bases.
//!
//! Rationals are written as integers or strings `"p"` / `"p/q"`. Vertices
//! are referred to by name; the vertex order of a complex is the order of
//! its `vertices` list, or of first appearance in `simplices`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use twisted_torsion::simplicial::{fundamental_group, Cochain, OrderedComplex, Pi1Presentation, Representation};
use twisted_torsion::{Matrix, Rational, Vector};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational, CliError> {
        match self {
            Number::Int(n) => Ok(Rational::from_integer((*n).into())),
            Number::Text(s) => {
                s.trim().parse::<Rational>().map_err(|_| CliError::Input(format!("not a rational number: {s:?}")))
            }
        }
    }
}

fn vector(v: &[Number]) -> Result<Vector, CliError> {
    v.iter().map(Number::to_rational).collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_toml<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexFile {
    vertices: Option<Vec<String>>,
    simplices: Vec<Vec<String>>,
}

/// `builtin:<name>` or a path. Builtins: `simplex:N`, `sphere:N` (the
/// boundary of the `(N+1)`-simplex), `s1xs2`.
pub fn load_complex(arg: &str) -> Result<OrderedComplex, CliError> {
    match arg.strip_prefix("builtin:") {
        Some(name) => builtin_complex(name),
        None => parse_complex(&read(Path::new(arg))?),
    }
}

pub fn builtin_complex(name: &str) -> Result<OrderedComplex, CliError> {
    let bad = || CliError::Input(format!("unknown builtin complex {name:?}"));
    if name == "s1xs2" {
        return Ok(OrderedComplex::simplex_boundary(2).product(&OrderedComplex::simplex_boundary(3)));
    }
    let (kind, n) = name.split_once(':').ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    match kind {
        "simplex" if n <= 6 => Ok(OrderedComplex::simplex(n)),
        "sphere" if (1..=6).contains(&n) => Ok(OrderedComplex::simplex_boundary(n + 1)),
        _ => Err(bad()),
    }
}

pub fn parse_complex(text: &str) -> Result<OrderedComplex, CliError> {
    let f: ComplexFile = parse_toml(text, "complex")?;
    let mut names: Vec<String> = f.vertices.clone().unwrap_or_default();
    if f.vertices.is_none() {
        for s in &f.simplices {
            for v in s {
                if !names.contains(v) {
                    names.push(v.clone());
                }
            }
        }
    }
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut maximal = Vec::with_capacity(f.simplices.len());
    for s in &f.simplices {
        let mut ids = Vec::with_capacity(s.len());
        for v in s {
            ids.push(*index.get(v.as_str()).ok_or_else(|| CliError::Input(format!("unknown vertex {v:?}")))?);
        }
        maximal.push(ids);
    }
    OrderedComplex::new(names, &maximal).map_err(|e| CliError::Input(format!("complex: {e}")))
}

pub fn vertex(k: &OrderedComplex, name: &str) -> Result<usize, CliError> {
    k.names().iter().position(|n| n == name).ok_or_else(|| CliError::Input(format!("unknown vertex {name:?}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    dim: usize,
    base: Option<String>,
    tree: Option<Vec<[String; 2]>>,
    #[serde(default)]
    generator: Vec<GeneratorEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorEntry {
    edge: [String; 2],
    matrix: Vec<Vec<Number>>,
}

/// Presentation and representation; without a file, the trivial rank-one
/// representation on the breadth-first tree at the first vertex.
pub fn load_rep(k: &OrderedComplex, path: Option<&Path>) -> Result<(Pi1Presentation, Representation), CliError> {
    match path {
        Some(p) => parse_rep(k, &read(p)?),
        None => {
            let p = fundamental_group(k, 0).map_err(|e| CliError::Input(format!("complex: {e}")))?;
            let r = Representation::trivial(&p, 1);
            Ok((p, r))
        }
    }
}

pub fn parse_rep(k: &OrderedComplex, text: &str) -> Result<(Pi1Presentation, Representation), CliError> {
    let f: RepFile = parse_toml(text, "representation")?;
    let err = |e: twisted_torsion::simplicial::SimplicialError| CliError::Input(format!("representation: {e}"));
    let base = match &f.base {
        Some(b) => vertex(k, b)?,
        None => 0,
    };
    let p = match &f.tree {
        Some(edges) => {
            let tree =
                edges.iter().map(|[a, b]| Ok((vertex(k, a)?, vertex(k, b)?))).collect::<Result<Vec<_>, CliError>>()?;
            Pi1Presentation::from_spanning_tree(k, base, &tree).map_err(err)?
        }
        None => fundamental_group(k, base).map_err(err)?,
    };
    if f.dim == 0 {
        return Err(CliError::Input("representation: dim must be positive".into()));
    }
    let mut matrices = vec![Matrix::identity(f.dim); p.generators().len()];
    for g in &f.generator {
        let (a, b) = (vertex(k, &g.edge[0])?, vertex(k, &g.edge[1])?);
        let idx = p.generator_of(a, b).ok_or_else(|| {
            CliError::Input(format!("edge {:?} is not a generator (tree edge or not an edge)", g.edge))
        })?;
        let rows = g.matrix.iter().map(|r| vector(r)).collect::<Result<Vec<_>, _>>()?;
        let mut m = Matrix::from_rows(rows).map_err(|e| CliError::Input(format!("generator {:?}: {e}", g.edge)))?;
        if a > b {
            m = m
                .inverse()
                .ok()
                .flatten()
                .ok_or_else(|| CliError::Input(format!("generator {:?}: matrix is not invertible", g.edge)))?;
        }
        matrices[idx] = m;
    }
    let r = Representation::new(&p, f.dim, matrices).map_err(err)?;
    Ok((p, r))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CocycleFile {
    #[serde(default)]
    component: Vec<ComponentEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentEntry {
    degree: Option<usize>,
    #[serde(default)]
    orientation: bool,
    scale: Option<Number>,
    values: Option<Vec<Number>>,
    entries: Option<Vec<Entry>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    simplex: Vec<String>,
    value: Number,
}

pub fn load_cocycle(k: &OrderedComplex, path: Option<&Path>) -> Result<Vec<Cochain>, CliError> {
    match path {
        Some(p) => parse_cocycle(k, &read(p)?),
        None => Ok(Vec::new()),
    }
}

/// Each component is the orientation cocycle (`orientation = true`), a
/// dense list of values in simplex order, or sparse `entries`.
pub fn parse_cocycle(k: &OrderedComplex, text: &str) -> Result<Vec<Cochain>, CliError> {
    let f: CocycleFile = parse_toml(text, "cocycle")?;
    let mut out = Vec::with_capacity(f.component.len());
    for (i, c) in f.component.iter().enumerate() {
        let bad = |m: &str| CliError::Input(format!("cocycle component {i}: {m}"));
        let mut cochain = if c.orientation {
            k.orientation_cocycle().ok_or_else(|| bad("complex has no orientation cocycle"))?
        } else {
            let degree = c.degree.ok_or_else(|| bad("missing degree"))?;
            match (&c.values, &c.entries) {
                (Some(v), None) => Cochain { degree, values: vector(v)? },
                (None, Some(es)) => {
                    let mut ch = Cochain::zero(k, degree);
                    for e in es {
                        let mut ids = e.simplex.iter().map(|v| vertex(k, v)).collect::<Result<Vec<_>, _>>()?;
                        ids.sort_unstable();
                        if ids.len() != degree + 1 {
                            return Err(bad("entry simplex has the wrong dimension"));
                        }
                        let at = k.index_of(&ids).ok_or_else(|| bad("entry is not a simplex"))?;
                        ch.values[at] = e.value.to_rational()?;
                    }
                    ch
                }
                _ => return Err(bad("give exactly one of values, entries")),
            }
        };
        if c.orientation && c.degree.is_some_and(|d| d != cochain.degree) {
            return Err(bad("degree does not match the orientation cocycle"));
        }
        if let Some(s) = &c.scale {
            let s = s.to_rational()?;
            cochain.values.iter_mut().for_each(|x| *x *= &s);
        }
        cochain.check(k).map_err(|e| bad(&e.to_string()))?;
        out.push(cochain);
    }
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasesFile {
    untwisted: Option<Vec<Vec<Vec<Number>>>>,
    even: Option<Vec<Vec<Number>>>,
    odd: Option<Vec<Vec<Number>>>,
}

/// Cohomology representatives: per-degree for `∂`, and even/odd for `∂_ϑ`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bases {
    pub untwisted: Option<Vec<Vec<Vector>>>,
    pub twisted: Option<(Vec<Vector>, Vec<Vector>)>,
}

pub fn load_bases(path: Option<&Path>) -> Result<Bases, CliError> {
    match path {
        Some(p) => parse_bases(&read(p)?),
        None => Ok(Bases::default()),
    }
}

pub fn parse_bases(text: &str) -> Result<Bases, CliError> {
    let f: BasesFile = parse_toml(text, "bases")?;
    let list = |vs: &[Vec<Number>]| vs.iter().map(|v| vector(v)).collect::<Result<Vec<_>, _>>();
    let untwisted = f.untwisted.as_ref().map(|per| per.iter().map(|vs| list(vs)).collect()).transpose()?;
    let twisted = match (&f.even, &f.odd) {
        (None, None) => None,
        (Some(e), Some(o)) => Some((list(e)?, list(o)?)),
        _ => return Err(CliError::Input("bases: give both even and odd".into())),
    };
    Ok(Bases { untwisted, twisted })
}
