//! JSON function specs: parsing into [`GeomCvxFn`] and writing them back.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use polarcvx::geometry::{BodyRep, Halfspace};
use polarcvx::{ConvexBody, Family, GeomCvxFn, NamedShape};

/// Malformed input, anchored at a JSON position or a field path.
#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("{path}:{line}:{column}: {msg}")]
    Json { path: String, line: usize, column: usize, msg: String },
    #[error("{path}: field `{field}`: {msg}")]
    Field { path: String, field: String, msg: String },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub dim: usize,
    pub family: String,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    /// Second body: the domain of `restricted_gauge`, the zero set of
    /// `zero_set_gauge`, the target of `gauge_distance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<BodySpec>,
    /// Operands of `max_of`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nested: Vec<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<f64>>,
    /// `null` is `+inf`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub lower_bound_only: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    /// Rows `[a_1, ..., a_n, b]` for `<a, x> <= b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Vec<f64>>>,
}

pub fn parse(text: &str, path: &str) -> Result<GeomCvxFn, SpecError> {
    let spec: FunctionSpec = serde_json::from_str(text).map_err(|e| SpecError::Json {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    build(&spec, "").map_err(|(field, msg)| SpecError::Field { path: path.to_string(), field, msg })
}

type FieldResult<T> = Result<T, (String, String)>;

fn at(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn build(spec: &FunctionSpec, prefix: &str) -> FieldResult<GeomCvxFn> {
    let n = spec.dim;
    if n == 0 {
        return Err((at(prefix, "dim"), "dimension must be positive".into()));
    }
    let lib = |field: &str| {
        let f = at(prefix, field);
        move |e: polarcvx::Error| (f, e.to_string())
    };
    let body = |field: &str, b: &Option<BodySpec>| -> FieldResult<ConvexBody> {
        let f = at(prefix, field);
        match b {
            Some(b) => build_body(b, n, &f),
            None => Err((f, "missing".into())),
        }
    };
    let param = |name: &str, default: Option<f64>| -> FieldResult<f64> {
        let f = at(prefix, &format!("params.{name}"));
        match spec.params.get(name) {
            Some(v) => v.as_f64().ok_or((f, "expected a number".into())),
            None => default.ok_or((f, "missing".into())),
        }
    };
    let f = match spec.family.as_str() {
        "indicator" => GeomCvxFn::indicator(body("body", &spec.body)?),
        "gauge" => GeomCvxFn::gauge(body("body", &spec.body)?, param("t", Some(1.0))?).map_err(lib("params.t"))?,
        "restricted_gauge" => GeomCvxFn::restricted_gauge(body("body", &spec.body)?, body("second", &spec.second)?)
            .map_err(lib("second"))?,
        "zero_set_gauge" => GeomCvxFn::zero_set_gauge(body("body", &spec.body)?, body("second", &spec.second)?)
            .map_err(lib("second"))?,
        "hinged_gauge" => {
            GeomCvxFn::hinged_gauge(body("body", &spec.body)?, param("a", None)?).map_err(lib("params.a"))?
        }
        "power_gauge" => {
            GeomCvxFn::power_gauge(body("body", &spec.body)?, param("p", None)?, param("scale", Some(1.0))?)
                .map_err(lib("params"))?
        }
        "gauge_distance" => GeomCvxFn::gauge_distance(body("body", &spec.body)?, body("second", &spec.second)?)
            .map_err(lib("second"))?,
        "max_of" => {
            if spec.nested.len() < 2 {
                return Err((at(prefix, "nested"), "max_of needs at least two operands".into()));
            }
            let mut parts = Vec::new();
            for (k, s) in spec.nested.iter().enumerate() {
                let p = at(prefix, &format!("nested[{k}]"));
                let g = build(s, &p)?;
                if g.dim() != n {
                    return Err((at(&p, "dim"), format!("expected {n}, got {}", g.dim())));
                }
                parts.push(g);
            }
            let mut it = parts.into_iter();
            let first = it.next().unwrap();
            it.try_fold(first, |acc, g| GeomCvxFn::max_of(acc, g)).map_err(lib("nested"))?
        }
        "sampled" => {
            if let Some(k) = spec.points.iter().position(|p| p.len() != n) {
                return Err((at(prefix, &format!("points[{k}]")), format!("expected {n} coordinates")));
            }
            let values = spec.values.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
            GeomCvxFn::sampled(spec.points.clone(), values, spec.lower_bound_only).map_err(lib("values"))?
        }
        other => return Err((at(prefix, "family"), format!("unknown family `{other}`"))),
    };
    Ok(f)
}

fn build_body(b: &BodySpec, n: usize, field: &str) -> FieldResult<ConvexBody> {
    let err = |sub: &str, msg: String| (format!("{field}.{sub}"), msg);
    let given = [b.name.is_some(), b.vertices.is_some(), b.halfspaces.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err((field.to_string(), "give exactly one of `name`, `vertices`, `halfspaces`".into()));
    }
    let scale = b.scale.unwrap_or(1.0);
    let body = if let Some(name) = &b.name {
        let shape = NamedShape::parse(name).ok_or_else(|| err("name", format!("unknown body `{name}`")))?;
        ConvexBody::named(shape, n, scale).map_err(|e| err("scale", e.to_string()))?
    } else if let Some(vs) = &b.vertices {
        if let Some(k) = vs.iter().position(|v| v.len() != n) {
            return Err(err(&format!("vertices[{k}]"), format!("expected {n} coordinates")));
        }
        ConvexBody::from_vertices(vs.clone()).map_err(|e| err("vertices", e.to_string()))?.scaled(scale)
    } else {
        let rows = b.halfspaces.as_ref().unwrap();
        let mut hs = Vec::new();
        for (k, r) in rows.iter().enumerate() {
            if r.len() != n + 1 {
                return Err(err(&format!("halfspaces[{k}]"), format!("expected {} numbers", n + 1)));
            }
            hs.push(Halfspace { normal: r[..n].to_vec(), offset: r[n] });
        }
        ConvexBody::from_halfspaces(hs).map_err(|e| err("halfspaces", e.to_string()))?.scaled(scale)
    };
    Ok(body)
}

/// The spec describing `f`.
pub fn to_spec(f: &GeomCvxFn) -> FunctionSpec {
    let mut spec = FunctionSpec { dim: f.dim(), family: f.family_name().to_string(), ..Default::default() };
    let num = |v: f64| Value::from(v);
    match f.family() {
        Family::Indicator(k) => spec.body = Some(body_spec(k)),
        Family::Gauge { body, t } => {
            spec.body = Some(body_spec(body));
            spec.params.insert("t".into(), num(*t));
        }
        Family::RestrictedGauge { k, l } | Family::ZeroSetGauge { k, l } => {
            spec.body = Some(body_spec(k));
            spec.second = Some(body_spec(l));
        }
        Family::HingedGauge { body, a } => {
            spec.body = Some(body_spec(body));
            spec.params.insert("a".into(), num(*a));
        }
        Family::PowerGauge { body, p, scale } => {
            spec.body = Some(body_spec(body));
            spec.params.insert("p".into(), num(*p));
            spec.params.insert("scale".into(), num(*scale));
        }
        Family::GaugeDistance(gd) => {
            spec.body = Some(body_spec(&gd.m));
            spec.second = Some(body_spec(&gd.p));
        }
        Family::MaxOf(a, b) => spec.nested = vec![to_spec(a), to_spec(b)],
        Family::Sampled(s) => {
            spec.points = s.points.clone();
            spec.values = s.values.iter().map(|v| v.is_finite().then_some(*v)).collect();
            spec.lower_bound_only = s.lower_bound_only;
        }
    }
    spec
}

fn body_spec(b: &ConvexBody) -> BodySpec {
    match b.rep() {
        BodyRep::Named { shape, scale } => {
            BodySpec { name: Some(shape.as_str().to_string()), scale: Some(*scale), ..Default::default() }
        }
        BodyRep::Vertices(vs) => BodySpec { vertices: Some(vs.clone()), ..Default::default() },
        BodyRep::Halfspaces(hs) => BodySpec {
            halfspaces: Some(
                hs.iter().map(|h| h.normal.iter().copied().chain(std::iter::once(h.offset)).collect()).collect(),
            ),
            ..Default::default()
        },
    }
}
