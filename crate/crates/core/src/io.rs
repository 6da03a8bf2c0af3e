//! Text formats: TNS1 tensors, HG1 hypergraphs, vectors, trajectory CSV and
//! decomposition bundle directories.
//!
//! TNS1:
//! ```text
//! TNS1 dense|sparse
//! order k
//! dims n1 ... nk
//! <values, last index fastest>        (dense)
//! nnz m                               (sparse)
//! i1 ... ik value                     (sparse, m lines, 0-based)
//! ```
//! HG1: `HG1 k n` followed by one edge per line as `k` ascending 0-based ids.
//! Numbers are written with 17 significant digits so that every finite
//! double survives a roundtrip bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::decomp::{Flavor, OdecoDecomp, TTDecomp, TuckerDecomp};
use crate::dynamics::Trajectory;
use crate::error::{KronError, Result};
use crate::hypergraph::Hypergraph;
use crate::tensor::{next_index, DenseTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TnsLayout {
    Dense,
    Sparse,
}

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn perr(path: &str, line: usize, msg: impl Into<String>) -> KronError {
    KronError::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_f64(path: &str, line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(path, line, format!("not a number: {tok:?}")))?;
    if !v.is_finite() {
        return Err(perr(path, line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

fn parse_usize(path: &str, line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| perr(path, line, format!("not a nonnegative integer: {tok:?}")))
}

/// Renders a tensor in TNS1. Sparse output lists the nonzero entries.
pub fn format_tensor(t: &DenseTensor, layout: TnsLayout) -> Result<String> {
    if t.order() == 0 {
        return Err(KronError::InvalidArgument("TNS1 stores tensors of order >= 1".into()));
    }
    let mut s = String::new();
    let kind = match layout {
        TnsLayout::Dense => "dense",
        TnsLayout::Sparse => "sparse",
    };
    let dims: Vec<String> = t.dims().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "TNS1 {kind}\norder {}\ndims {}", t.order(), dims.join(" "));
    match layout {
        TnsLayout::Dense => {
            let last = *t.dims().last().expect("order >= 1");
            for row in t.data().chunks(last) {
                let vals: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
                let _ = writeln!(s, "{}", vals.join(" "));
            }
        }
        TnsLayout::Sparse => {
            let nnz = t.data().iter().filter(|&&v| v != 0.0).count();
            let _ = writeln!(s, "nnz {nnz}");
            let mut index = vec![0; t.order()];
            for &v in t.data() {
                if v != 0.0 {
                    let ix: Vec<String> = index.iter().map(|i| i.to_string()).collect();
                    let _ = writeln!(s, "{} {}", ix.join(" "), format_f64(v));
                }
                next_index(t.dims(), &mut index);
            }
        }
    }
    Ok(s)
}

/// Parses TNS1 text; `path` only labels error messages.
pub fn parse_tensor(text: &str, path: &str) -> Result<DenseTensor> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| lines.next().ok_or_else(|| perr(path, 0, format!("missing {what}")));

    let (ln, header) = next("header")?;
    let layout = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["TNS1", "dense"] => TnsLayout::Dense,
        ["TNS1", "sparse"] => TnsLayout::Sparse,
        _ => return Err(perr(path, ln, format!("bad header {header:?}"))),
    };
    let (ln, order_line) = next("order line")?;
    let order = match order_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["order", k] => parse_usize(path, ln, k)?,
        _ => return Err(perr(path, ln, "expected `order k`")),
    };
    if order == 0 {
        return Err(perr(path, ln, "order must be >= 1"));
    }
    let (ln, dims_line) = next("dims line")?;
    let mut toks = dims_line.split_whitespace();
    if toks.next() != Some("dims") {
        return Err(perr(path, ln, "expected `dims n1 ... nk`"));
    }
    let dims = toks.map(|t| parse_usize(path, ln, t)).collect::<Result<Vec<_>>>()?;
    if dims.len() != order {
        return Err(perr(path, ln, format!("{} dims for order {order}", dims.len())));
    }
    if dims.contains(&0) {
        return Err(perr(path, ln, "dims must be positive"));
    }
    let total = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).ok_or_else(|| perr(path, ln, "dims overflow"))?;
    crate::kron::check_budget(&dims)?;

    match layout {
        TnsLayout::Dense => {
            let mut data = Vec::with_capacity(total);
            let mut last_line = ln;
            for (ln, l) in lines {
                last_line = ln;
                for tok in l.split_whitespace() {
                    if data.len() == total {
                        return Err(perr(path, ln, format!("more than {total} values")));
                    }
                    data.push(parse_f64(path, ln, tok)?);
                }
            }
            if data.len() != total {
                return Err(perr(path, last_line, format!("expected {total} values, found {}", data.len())));
            }
            DenseTensor::new(dims, data)
        }
        TnsLayout::Sparse => {
            let (ln, nnz_line) = next("nnz line")?;
            let nnz = match nnz_line.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["nnz", m] => parse_usize(path, ln, m)?,
                _ => return Err(perr(path, ln, "expected `nnz m`")),
            };
            let mut t = DenseTensor::zeros(&dims);
            let mut seen = std::collections::HashSet::new();
            let mut count = 0;
            for (ln, l) in lines {
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != order + 1 {
                    return Err(perr(path, ln, format!("expected {order} indices and a value")));
                }
                let ix = toks[..order].iter().map(|t| parse_usize(path, ln, t)).collect::<Result<Vec<_>>>()?;
                if ix.iter().zip(&dims).any(|(i, d)| i >= d) {
                    return Err(perr(path, ln, format!("index {ix:?} out of range for dims {dims:?}")));
                }
                if !seen.insert(ix.clone()) {
                    return Err(perr(path, ln, format!("index {ix:?} repeated")));
                }
                t.set(&ix, parse_f64(path, ln, toks[order])?)?;
                count += 1;
            }
            if count != nnz {
                return Err(perr(path, ln, format!("nnz says {nnz} but {count} entries follow")));
            }
            Ok(t)
        }
    }
}

pub fn write_tensor(t: &DenseTensor, path: impl AsRef<Path>, layout: TnsLayout) -> Result<()> {
    fs::write(path, format_tensor(t, layout)?)?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    parse_tensor(&fs::read_to_string(path)?, &path.display().to_string())
}

pub fn format_hypergraph(h: &Hypergraph) -> String {
    let mut s = format!("HG1 {} {}\n", h.k(), h.n());
    for e in h.edges() {
        let ids: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", ids.join(" "));
    }
    s
}

pub fn parse_hypergraph(text: &str, path: &str) -> Result<Hypergraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| perr(path, 0, "empty file"))?;
    let (k, n) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["HG1", k, n] => (parse_usize(path, ln, k)?, parse_usize(path, ln, n)?),
        _ => return Err(perr(path, ln, "expected `HG1 k n`")),
    };
    if k == 0 {
        return Err(perr(path, ln, "k must be >= 1"));
    }
    let mut edges = std::collections::BTreeSet::new();
    for (ln, l) in lines {
        let mut e = l.split_whitespace().map(|t| parse_usize(path, ln, t)).collect::<Result<Vec<_>>>()?;
        if e.len() != k {
            return Err(perr(path, ln, format!("edge has {} vertices, expected {k}", e.len())));
        }
        if let Some(&v) = e.iter().find(|&&v| v >= n) {
            return Err(perr(path, ln, format!("vertex {v} >= n = {n}")));
        }
        e.sort_unstable();
        if e.windows(2).any(|w| w[0] == w[1]) {
            return Err(perr(path, ln, "repeated vertex in edge"));
        }
        if !edges.insert(e) {
            return Err(perr(path, ln, "duplicate edge"));
        }
    }
    Hypergraph::new(k, n, edges)
}

pub fn write_hypergraph(h: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_hypergraph(h))?;
    Ok(())
}

pub fn read_hypergraph(path: impl AsRef<Path>) -> Result<Hypergraph> {
    let path = path.as_ref();
    parse_hypergraph(&fs::read_to_string(path)?, &path.display().to_string())
}

/// A vector file is either an order-1 TNS1 tensor or plain whitespace
/// separated numbers.
pub fn parse_vector(text: &str, path: &str) -> Result<Vec<f64>> {
    if text.trim_start().starts_with("TNS1") {
        let t = parse_tensor(text, path)?;
        if t.order() != 1 {
            return Err(perr(path, 2, format!("expected an order-1 tensor, got order {}", t.order())));
        }
        return Ok(t.into_data());
    }
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        for tok in l.split_whitespace() {
            out.push(parse_f64(path, i + 1, tok)?);
        }
    }
    if out.is_empty() {
        return Err(perr(path, 0, "empty vector"));
    }
    Ok(out)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    parse_vector(&fs::read_to_string(path)?, &path.display().to_string())
}

/// CSV with header `t,x_0,...,x_{n-1}`.
pub fn format_trajectory(traj: &Trajectory) -> String {
    let n = traj.states.first().map_or(0, Vec::len);
    let mut s = String::from("t");
    for i in 0..n {
        let _ = write!(s, ",x_{i}");
    }
    s.push('\n');
    for (t, x) in traj.times.iter().zip(&traj.states) {
        s.push_str(&format_f64(*t));
        for v in x {
            s.push(',');
            s.push_str(&format_f64(*v));
        }
        s.push('\n');
    }
    s
}

pub fn write_trajectory(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_trajectory(traj))?;
    Ok(())
}

/// A decomposition as stored in a bundle directory.
#[derive(Clone, Debug, PartialEq)]
pub enum Bundle {
    Tucker(TuckerDecomp),
    Tt(TTDecomp),
    Odeco(OdecoDecomp),
}

fn matrix_tensor(m: &DMatrix<f64>) -> DenseTensor {
    DenseTensor::from_matrix(m)
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes `meta` plus one TNS1 file per core/factor. `extra` lines (e.g.
/// tolerances, fit) are appended to `meta` verbatim as `key value`.
pub fn write_bundle(b: &Bundle, dir: impl AsRef<Path>, extra: &[(String, String)]) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut meta = String::new();
    match b {
        Bundle::Tucker(d) => {
            let core_dims: Vec<usize> = d.core.dims().to_vec();
            let _ = writeln!(meta, "kind tucker\nflavor {}\norder {}\nranks {}", d.flavor, d.factors.len(), join(&core_dims));
            write_tensor(&d.core, dir.join("core.tns"), TnsLayout::Dense)?;
            for (p, f) in d.factors.iter().enumerate() {
                write_tensor(&matrix_tensor(f), dir.join(format!("factor_{p}.tns")), TnsLayout::Dense)?;
            }
            for (p, sv) in d.mode_singular_values.iter().enumerate() {
                write_tensor(&DenseTensor::from_vector(sv), dir.join(format!("sv_{p}.tns")), TnsLayout::Dense)?;
            }
        }
        Bundle::Tt(d) => {
            let _ = writeln!(meta, "kind tt\norder {}\nranks {}", d.cores.len(), join(&d.ranks));
            for (p, c) in d.cores.iter().enumerate() {
                write_tensor(c, dir.join(format!("core_{p}.tns")), TnsLayout::Dense)?;
            }
        }
        Bundle::Odeco(d) => {
            let _ = writeln!(
                meta,
                "kind odeco\norder {}\nranks {}\nresidual {}\nis_odeco {}",
                d.order,
                d.values.len(),
                format_f64(d.residual),
                d.is_odeco
            );
            if !d.values.is_empty() {
                write_tensor(&DenseTensor::from_vector(&d.values), dir.join("values.tns"), TnsLayout::Dense)?;
                write_tensor(&matrix_tensor(&d.vectors), dir.join("vectors.tns"), TnsLayout::Dense)?;
            }
        }
    }
    for (k, v) in extra {
        let _ = writeln!(meta, "{k} {v}");
    }
    fs::write(dir.join("meta"), meta)?;
    Ok(())
}

fn meta_value<'a>(meta: &'a [(usize, String, String)], key: &str, path: &str) -> Result<(usize, &'a str)> {
    meta.iter()
        .find(|(_, k, _)| k == key)
        .map(|(l, _, v)| (*l, v.as_str()))
        .ok_or_else(|| perr(path, 0, format!("meta lacks `{key}`")))
}

pub fn read_bundle(dir: impl AsRef<Path>) -> Result<Bundle> {
    let dir = dir.as_ref();
    let meta_path = dir.join("meta");
    let label = meta_path.display().to_string();
    let text = fs::read_to_string(&meta_path)?;
    let meta: Vec<(usize, String, String)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let (k, v) = l.trim().split_once(' ').unwrap_or((l.trim(), ""));
            (i + 1, k.to_string(), v.trim().to_string())
        })
        .collect();
    let (ln, order) = meta_value(&meta, "order", &label)?;
    let order = parse_usize(&label, ln, order)?;
    let to_matrix = |t: DenseTensor| t.to_matrix();
    match meta_value(&meta, "kind", &label)?.1 {
        "tucker" => {
            let (ln, flavor) = meta_value(&meta, "flavor", &label)?;
            let flavor: Flavor = flavor.parse().map_err(|_| perr(&label, ln, format!("unknown flavor {flavor:?}")))?;
            let core = read_tensor(dir.join("core.tns"))?;
            let factors = (0..order)
                .map(|p| to_matrix(read_tensor(dir.join(format!("factor_{p}.tns")))?))
                .collect::<Result<Vec<_>>>()?;
            let mut mode_singular_values = Vec::new();
            for p in 0..order {
                let f = dir.join(format!("sv_{p}.tns"));
                if f.exists() {
                    mode_singular_values.push(read_tensor(f)?.into_data());
                }
            }
            Ok(Bundle::Tucker(TuckerDecomp {
                core,
                factors,
                flavor,
                mode_singular_values,
            }))
        }
        "tt" => {
            let cores = (0..order)
                .map(|p| read_tensor(dir.join(format!("core_{p}.tns"))))
                .collect::<Result<Vec<_>>>()?;
            let mut ranks = vec![1];
            ranks.extend(cores.iter().map(|c| c.dims()[2]));
            Ok(Bundle::Tt(TTDecomp { cores, ranks }))
        }
        "odeco" => {
            let (ln, residual) = meta_value(&meta, "residual", &label)?;
            let residual = parse_f64(&label, ln, residual)?;
            let is_odeco = meta_value(&meta, "is_odeco", &label)?.1 == "true";
            let values_path = dir.join("values.tns");
            let (values, vectors) = if values_path.exists() {
                (read_tensor(values_path)?.into_data(), to_matrix(read_tensor(dir.join("vectors.tns"))?)?)
            } else {
                (Vec::new(), DMatrix::zeros(0, 0))
            };
            Ok(Bundle::Odeco(OdecoDecomp {
                order,
                values,
                vectors,
                residual,
                is_odeco,
            }))
        }
        other => Err(perr(&label, 0, format!("unknown bundle kind {other:?}"))),
    }
}
