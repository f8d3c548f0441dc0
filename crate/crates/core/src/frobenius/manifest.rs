use num_traits::Zero;

use super::{EulerData, FrobError, FrobeniusData};
use crate::symring::{parse, Expr, Q};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ManifestError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ManifestError {
    ManifestError {
        line,
        msg: msg.into(),
    }
}

/// Parses a manifold definition: `key = value` lines, `#` comments, and
/// continuation lines (no `=`) appended to the previous value.
pub fn parse_manifest(src: &str) -> Result<FrobeniusData, FrobError> {
    let mut entries: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        match text.split_once('=') {
            Some((k, v)) => {
                let key = k.trim().to_string();
                if key.is_empty() || key.contains(char::is_whitespace) {
                    return Err(err(line, format!("malformed key `{}`", k.trim())).into());
                }
                if entries.iter().any(|(k2, _, _)| *k2 == key) {
                    return Err(err(line, format!("duplicate key `{key}`")).into());
                }
                entries.push((key, v.trim().to_string(), line));
            }
            None => match entries.last_mut() {
                Some((_, v, _)) => {
                    v.push(' ');
                    v.push_str(text);
                }
                None => return Err(err(line, "expected `key = value`").into()),
            },
        }
    }
    let get = |k: &str| entries.iter().find(|(key, _, _)| key == k);
    for (k, _, line) in &entries {
        if !matches!(
            k.as_str(),
            "name" | "n" | "F" | "eta" | "d" | "mu" | "r" | "unity" | "G" | "Ghat"
        ) {
            return Err(err(*line, format!("unknown key `{k}`")).into());
        }
    }
    let required = |k: &str| {
        get(k).ok_or_else(|| {
            let last = entries.last().map_or(1, |e| e.2);
            FrobError::from(err(last, format!("missing key `{k}`")))
        })
    };

    let (_, n_src, n_line) = required("n")?;
    let n: usize = n_src.parse().map_err(|_| {
        err(
            *n_line,
            format!("n must be a positive integer, got `{n_src}`"),
        )
    })?;
    if n == 0 || n > crate::symring::MAX_COORDS {
        return Err(err(*n_line, "n must lie in 1..=9").into());
    }

    let (_, f_src, f_line) = required("F")?;
    let f = expr_at(f_src, *f_line)?;

    let (_, eta_src, eta_line) = required("eta")?;
    let eta_flat = rationals(eta_src, *eta_line)?;
    if eta_flat.len() != n * n {
        return Err(err(
            *eta_line,
            format!("eta needs {} entries, got {}", n * n, eta_flat.len()),
        )
        .into());
    }
    let eta: Vec<Vec<Q>> = eta_flat.chunks(n).map(<[Q]>::to_vec).collect();

    let (_, d_src, d_line) = required("d")?;
    let d = single(d_src, *d_line)?;

    let (_, mu_src, mu_line) = required("mu")?;
    let mu = rationals(mu_src, *mu_line)?;
    if mu.len() != n {
        return Err(err(*mu_line, format!("mu needs {n} entries")).into());
    }

    let r = match get("r") {
        Some((_, src, line)) => {
            let r = rationals(src, *line)?;
            if r.len() != n {
                return Err(err(*line, format!("r needs {n} entries")).into());
            }
            r
        }
        None => vec![Q::zero(); n],
    };

    let unity = match get("unity") {
        Some((_, src, line)) => {
            let u: usize = src
                .parse()
                .map_err(|_| err(*line, "unity must be a coordinate index"))?;
            if u == 0 || u > n {
                return Err(err(*line, format!("unity must lie in 1..={n}")).into());
            }
            u - 1
        }
        None => 0,
    };

    let name = get("name").map_or("unnamed".to_string(), |(_, v, _)| v.clone());
    let euler = EulerData::new(eta, d, mu, r, unity)?;
    let mut m = FrobeniusData::new(name, f, euler).map_err(|e| match e {
        FrobError::Shape(msg) => err(*f_line, msg).into(),
        other => other,
    })?;
    if let Some((_, src, line)) = get("G") {
        m.g = Some(expr_at(src, *line)?);
    }
    if let Some((_, src, line)) = get("Ghat") {
        m.ghat = Some(expr_at(src, *line)?);
    }
    Ok(m)
}

fn expr_at(src: &str, line: usize) -> Result<Expr, ManifestError> {
    parse(src).map_err(|e| err(line, e.to_string()))
}

fn single(src: &str, line: usize) -> Result<Q, ManifestError> {
    let v = rationals(src, line)?;
    if v.len() != 1 {
        return Err(err(line, "expected a single rational"));
    }
    Ok(v.into_iter().next().unwrap())
}

fn rationals(src: &str, line: usize) -> Result<Vec<Q>, ManifestError> {
    src.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|tok| {
            parse(tok)
                .ok()
                .and_then(|e| e.as_constant())
                .ok_or_else(|| err(line, format!("`{tok}` is not a rational number")))
        })
        .collect()
}
