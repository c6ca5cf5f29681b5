//! Parsers for `--group`, `--metric` and point arguments.

use carnot_iso::group::{heisenberg_as_htype, quaternionic_htype};
use carnot_iso::metrics::CcConfig;
use carnot_iso::{Distance, Point, Spec};

/// `h<N>`, `htype-h<N>`, `quaternionic`, a JSON group document, or `@path`
/// to a file holding one.
pub fn group(s: &str) -> Result<Spec, String> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        return group_json(&text);
    }
    if s.starts_with('{') {
        return group_json(s);
    }
    if s == "quaternionic" {
        return Ok(Spec::HType(quaternionic_htype()));
    }
    if let Some(n) = s.strip_prefix("htype-h") {
        let n = dimension(n)?;
        return heisenberg_as_htype(n).map(Spec::HType).map_err(|e| e.to_string());
    }
    if let Some(n) = s.strip_prefix('h') {
        return Spec::heisenberg(dimension(n)?).map_err(|e| e.to_string());
    }
    Err(format!("unknown group '{s}' (expected hN, htype-hN, quaternionic, JSON or @file)"))
}

fn group_json(text: &str) -> Result<Spec, String> {
    serde_json::from_str(text).map_err(|e| format!("invalid group JSON: {e}"))
}

fn dimension(s: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("invalid dimension '{s}'"))
}

/// `dinf`, `gauge`, `cc`, or a JSON metric document. `c1`, `c2` apply to
/// `dinf`, `cc_tol` to `cc`.
pub fn metric(s: &str, c1: f64, c2: f64, cc_tol: Option<f64>) -> Result<Distance, String> {
    let s = s.trim();
    let m = if s.starts_with('{') {
        serde_json::from_str::<Distance>(s).map_err(|e| format!("invalid metric JSON: {e}"))?
    } else {
        match s {
            "dinf" => Distance::dinf(c1, c2).map_err(|e| e.to_string())?,
            "gauge" => Distance::Gauge,
            "cc" => Distance::cc(),
            other => return Err(format!("unknown metric '{other}' (expected dinf, gauge, cc or JSON)")),
        }
    };
    Ok(match (m, cc_tol) {
        (Distance::Cc(config), Some(tol)) => {
            let config = CcConfig {
                root_tolerance: tol,
                ..config
            };
            config.validate().map_err(|e| e.to_string())?;
            Distance::Cc(config)
        }
        (m, _) => m,
    })
}

/// `[x1,...,x2n;t]` (Heisenberg) or `(X1,...,Xm|Z1,...,Zk)` (H-type).
pub fn point(s: &str) -> Result<Point, String> {
    let s = s.trim();
    let (inner, sep) = if let Some(b) = s.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
        (b, ';')
    } else if let Some(b) = s.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
        (b, '|')
    } else {
        return Err(format!("cannot parse point '{s}' (expected [x,...;t] or (X,...|Z,...))"));
    };
    let (h, v) = inner
        .split_once(sep)
        .ok_or_else(|| format!("point '{s}' is missing the '{sep}' separator"))?;
    Ok(Point::new(numbers(h)?, numbers(v)?))
}

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("invalid coordinate '{x}'"))
        })
        .collect()
}
