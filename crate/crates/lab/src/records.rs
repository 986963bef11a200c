//! Text records for cylinder specs and JSON-lines sample records.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use fppflow_core::rational::Q;
use fppflow_core::{CutResult, CylinderKind, CylinderSpec, Direction, Height, Hyperrect, Point};
use serde::{Deserialize, Serialize};

/// `origin=(0,0) basis=(1,0) scale=16 normal=(0,1) height=4 kind=symmetric`.
/// Several basis vectors are separated by `;`. The height is in units of the
/// normal coordinate `(x - origin) . w`.
pub fn format_spec(spec: &CylinderSpec) -> String {
    let r = &spec.rect;
    let basis: Vec<String> = r.basis().iter().map(|f| f.to_string()).collect();
    let h = spec.height.q().reduced();
    let height = if h.d == 1 { h.n.to_string() } else { format!("{}/{}", h.n, h.d) };
    let kind = match spec.kind {
        CylinderKind::Symmetric => "symmetric".to_string(),
        CylinderKind::Directed => "directed".to_string(),
        CylinderKind::Slab { margin } => format!("slab:{margin}"),
    };
    let normal = Point::new(r.normal().w()).expect("normal has a valid dimension");
    let mut s = String::new();
    write!(
        s,
        "origin={} basis={} scale={} normal={} height={} kind={}",
        r.origin(),
        basis.join(";"),
        r.scale(),
        normal,
        height,
        kind
    )
    .expect("writing to a String");
    s
}

pub fn parse_spec(text: &str) -> Result<CylinderSpec, String> {
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for tok in text.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| format!("expected key=value, got `{tok}`"))?;
        fields.insert(k, v);
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing `{k}`"));
    let origin = parse_point(get("origin")?)?;
    let basis = get("basis")?.split(';').map(parse_point).collect::<Result<Vec<_>, _>>()?;
    let scale: u64 = get("scale")?.parse().map_err(|e| format!("scale: {e}"))?;
    let normal = Direction::new(parse_point(get("normal")?)?.coords()).map_err(|e| e.to_string())?;
    let h = get("height")?;
    let height = match h.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.parse().map_err(|e| format!("height: {e}"))?;
            let d: i128 = d.parse().map_err(|e| format!("height: {e}"))?;
            Height::s_units(n, d).map_err(|e| e.to_string())?
        }
        None => Height::from_s(h.parse().map_err(|e| format!("height: {e}"))?),
    };
    let kind = match get("kind")? {
        "symmetric" => CylinderKind::Symmetric,
        "directed" => CylinderKind::Directed,
        k => match k.strip_prefix("slab:") {
            Some(m) => CylinderKind::Slab { margin: m.parse().map_err(|e| format!("margin: {e}"))? },
            None => return Err(format!("unknown kind `{k}`")),
        },
    };
    let rect = Hyperrect::new(origin, basis, scale, normal).map_err(|e| e.to_string())?;
    Ok(CylinderSpec::new(rect, height, kind))
}

pub fn parse_point(s: &str) -> Result<Point, String> {
    let body = s
        .trim()
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| format!("point `{s}` must look like (x,y,...)"))?;
    let coords = body
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("point `{s}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Point::new(&coords).map_err(|e| e.to_string())
}

/// Height in normal-coordinate units as an exact string.
pub fn format_height(h: Height) -> String {
    let q: Q = h.q().reduced();
    if q.d == 1 {
        q.n.to_string()
    } else {
        format!("{}/{}", q.n, q.d)
    }
}

/// One functional evaluation, as written to `samples.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub experiment: String,
    pub functional: String,
    /// Free-form label for the variant: a law, a level, a direction.
    pub variant: String,
    pub spec: String,
    pub scale: u64,
    pub seed: u64,
    /// Exact value as a reduced fraction, or `inf`.
    pub value: String,
    /// Value divided by the quantum and the normalizing area, if finite.
    pub rescaled: Option<f64>,
    pub cardinality: u64,
    pub flags: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl SampleRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("sample records always serialize")
    }
}

/// Human-readable dump of a solved problem, for debugging a sample.
pub fn dump_cut(spec: &str, result: &CutResult, quantum: u64) -> String {
    let mut s = String::new();
    writeln!(s, "spec {spec}").unwrap();
    writeln!(s, "value {}", result.value.format(quantum)).unwrap();
    writeln!(s, "cardinality {}", result.cardinality).unwrap();
    for e in &result.cutset {
        let (a, b) = e.endpoints();
        writeln!(s, "cut {a} {b}").unwrap();
    }
    s
}
