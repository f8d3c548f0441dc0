use std::collections::BTreeMap;

use super::{time_label, TimeIndex, TimePoint};

/// A box of time points: `points` values per axis spread over
/// `center +- radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub center: BTreeMap<TimeIndex, f64>,
    pub axes: Vec<TimeIndex>,
    pub radius: f64,
    pub points: usize,
}

fn parse_index(s: &str) -> Result<TimeIndex, String> {
    let s = s.trim();
    if s == "x" {
        return Ok((0, 0));
    }
    let (a, p) = s
        .split_once('.')
        .ok_or_else(|| format!("time `{s}` is not `x` or `alpha.p`"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad index in `{s}`"))?;
    let p: usize = p
        .trim()
        .parse()
        .map_err(|_| format!("bad order in `{s}`"))?;
    if a == 0 {
        return Err(format!("time indices start at 1 in `{s}`"));
    }
    Ok((a - 1, p))
}

/// Parses `center=x:0.5,2.0:1.0;axes=x,2.0;radius=0.01;points=3`.
pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let mut g = GridSpec {
        center: BTreeMap::new(),
        axes: Vec::new(),
        radius: 0.01,
        points: 3,
    };
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
        match key.trim() {
            "center" => {
                for item in val.split(',').filter(|x| !x.trim().is_empty()) {
                    let (i, x) = item
                        .split_once(':')
                        .ok_or_else(|| format!("center entry `{item}` needs time:value"))?;
                    let x: f64 = x
                        .trim()
                        .parse()
                        .map_err(|_| format!("bad value in `{item}`"))?;
                    g.center.insert(parse_index(i)?, x);
                }
            }
            "axes" => {
                g.axes = val.split(',').map(parse_index).collect::<Result<_, _>>()?;
            }
            "radius" => {
                g.radius = val
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad radius `{val}`"))?;
                if !(g.radius.is_finite() && g.radius >= 0.0) {
                    return Err(format!("radius must be nonnegative, got `{val}`"));
                }
            }
            "points" => {
                g.points = val
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad point count `{val}`"))?;
                if g.points == 0 {
                    return Err("points must be positive".into());
                }
            }
            k => return Err(format!("unknown grid key `{k}`")),
        }
    }
    Ok(g)
}

impl GridSpec {
    pub fn new(
        center: &[(TimeIndex, f64)],
        axes: &[TimeIndex],
        radius: f64,
        points: usize,
    ) -> Self {
        GridSpec {
            center: center.iter().copied().collect(),
            axes: axes.to_vec(),
            radius,
            points,
        }
    }

    /// Points in lexicographic order over the axes, first axis slowest.
    pub fn points(&self) -> Vec<TimePoint> {
        let offsets: Vec<f64> = if self.points == 1 {
            vec![0.0]
        } else {
            let k = (self.points - 1) as f64;
            (0..self.points)
                .map(|i| -self.radius + 2.0 * self.radius * i as f64 / k)
                .collect()
        };
        let base = TimePoint {
            times: self.center.clone(),
        };
        let mut out = vec![base];
        for &ax in &self.axes {
            out = out
                .into_iter()
                .flat_map(|t| offsets.iter().map(move |&o| t.moved(&[(ax, 1.0)], o)))
                .collect();
        }
        out
    }

    pub fn describe(&self) -> String {
        let c: Vec<String> = self
            .center
            .iter()
            .map(|(&i, v)| format!("{}:{v}", label(i)))
            .collect();
        let a: Vec<String> = self.axes.iter().map(|&i| label(i)).collect();
        format!(
            "center={};axes={};radius={};points={}",
            c.join(","),
            a.join(","),
            self.radius,
            self.points
        )
    }
}

fn label(i: TimeIndex) -> String {
    time_label(i).trim_start_matches('t').to_string()
}
