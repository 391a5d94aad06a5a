//! JSON encodings of polytopes and cones.
//!
//! ```json
//! {"dim": 2, "name": "square", "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]}
//! {"dim": 3, "vertices": [...], "facets": [{"normal": [1, 0, 0], "offset": 0}], "incidence": [[0, 2]]}
//! {"dim": 3, "fan_rays": [[1, 0, 0], [1, 1, 0], [1, 0, 1]]}
//! ```
//!
//! Coordinates and offsets are integers, decimals or `"p/q"` strings and
//! are read exactly. Cones of dimension other than three also need
//! `"dual_rays"` and `"decomposition"` (index triples into the dual rays).

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::polytope::exact::{parse_rational, Rational};
use crate::polytope::{Facet, MomentCone, Polytope};

#[derive(Debug, Clone)]
pub enum Geometry {
    Polytope(Polytope),
    Cone(MomentCone),
}

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn rational(v: &Value, path: &str) -> Result<Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(err(path, "expected a number or a \"p/q\" string")),
    };
    parse_rational(&text).ok_or_else(|| err(path, format!("cannot read {text:?} as a rational")))
}

fn integer(v: &Value, path: &str) -> Result<i64> {
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(|| err(path, format!("expected an integer, got {n}"))),
        _ => Err(err(path, "expected an integer")),
    }
}

fn index(v: &Value, path: &str) -> Result<usize> {
    let i = integer(v, path)?;
    usize::try_from(i).map_err(|_| err(path, "expected a non-negative index"))
}

fn list<T>(v: &Value, path: &str, item: impl Fn(&Value, &str) -> Result<T>) -> Result<Vec<T>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| item(x, &format!("{path}[{i}]")))
        .collect()
}

fn dim_field(obj: &Map<String, Value>) -> Result<usize> {
    let d = obj.get("dim").ok_or_else(|| err("dim", "missing"))?;
    let d = index(d, "dim")?;
    if d == 0 {
        return Err(err("dim", "must be positive"));
    }
    Ok(d)
}

fn check_lengths<T>(rows: &[Vec<T>], dim: usize, path: &str) -> Result<()> {
    match rows.iter().position(|r| r.len() != dim) {
        Some(i) => Err(err(
            &format!("{path}[{i}]"),
            format!("has {} entries, expected {dim}", rows[i].len()),
        )),
        None => Ok(()),
    }
}

fn parse_polytope(obj: &Map<String, Value>) -> Result<Polytope> {
    let dim = dim_field(obj)?;
    let vertices = obj.get("vertices").ok_or_else(|| err("vertices", "missing"))?;
    let vertices = list(vertices, "vertices", |v, p| list(v, p, rational))?;
    check_lengths(&vertices, dim, "vertices")?;
    let facets = match obj.get("facets") {
        None | Some(Value::Null) => None,
        Some(f) => Some(list(f, "facets", |fv, p| {
            let fo = object(fv, p)?;
            let normal_path = format!("{p}.normal");
            let normal = fo.get("normal").ok_or_else(|| err(&normal_path, "missing"))?;
            let normal = list(normal, &normal_path, integer)?;
            if normal.len() != dim {
                return Err(err(&normal_path, format!("has {} entries, expected {dim}", normal.len())));
            }
            let offset_path = format!("{p}.offset");
            let offset = fo.get("offset").ok_or_else(|| err(&offset_path, "missing"))?;
            Ok(Facet::new(normal, rational(offset, &offset_path)?))
        })?),
    };
    let incidence = match obj.get("incidence") {
        None | Some(Value::Null) => None,
        Some(i) => Some(list(i, "incidence", |v, p| list(v, p, index))?),
    };
    let mut poly = Polytope::build(dim, vertices, facets, incidence)?;
    if let Some(name) = obj.get("name").and_then(Value::as_str) {
        poly = poly.with_name(name);
    }
    Ok(poly)
}

fn parse_cone(obj: &Map<String, Value>) -> Result<MomentCone> {
    let dim = dim_field(obj)?;
    let rays = list(&obj["fan_rays"], "fan_rays", |v, p| list(v, p, integer))?;
    check_lengths(&rays, dim, "fan_rays")?;
    match (obj.get("dual_rays"), obj.get("decomposition")) {
        (None, None) => MomentCone::new(rays),
        (Some(d), Some(c)) => {
            let dual = list(d, "dual_rays", |v, p| list(v, p, integer))?;
            check_lengths(&dual, dim, "dual_rays")?;
            let cells = list(c, "decomposition", |v, p| list(v, p, index))?;
            MomentCone::with_dual_data(rays, dual, cells)
        }
        _ => Err(err("dual_rays", "dual_rays and decomposition must be given together")),
    }
}

/// Parses a polytope or (when `"fan_rays"` is present) a cone.
pub fn parse_geometry(text: &str) -> Result<Geometry> {
    let value: Value = serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?;
    let obj = object(&value, "$")?;
    if obj.contains_key("fan_rays") {
        Ok(Geometry::Cone(parse_cone(obj)?))
    } else {
        Ok(Geometry::Polytope(parse_polytope(obj)?))
    }
}

pub fn parse_polytope_json(text: &str) -> Result<Polytope> {
    match parse_geometry(text)? {
        Geometry::Polytope(p) => Ok(p),
        Geometry::Cone(_) => Err(err("$", "expected a polytope, found a cone")),
    }
}

pub fn parse_cone_json(text: &str) -> Result<MomentCone> {
    match parse_geometry(text)? {
        Geometry::Cone(c) => Ok(c),
        Geometry::Polytope(_) => Err(err("$", "expected a cone (with \"fan_rays\"), found a polytope")),
    }
}

fn rational_value(q: &Rational) -> Value {
    if q.is_integer() {
        match q.to_integer().to_string().parse::<i64>() {
            Ok(i) => Value::from(i),
            Err(_) => Value::from(q.to_string()),
        }
    } else {
        Value::from(q.to_string())
    }
}

/// Canonical JSON form with computed facets and incidence.
pub fn polytope_to_json(p: &Polytope) -> Value {
    let mut obj = Map::new();
    obj.insert("dim".into(), Value::from(p.dim()));
    if let Some(name) = p.name() {
        obj.insert("name".into(), Value::from(name));
    }
    obj.insert(
        "vertices".into(),
        Value::Array(
            p.vertices()
                .iter()
                .map(|v| Value::Array(v.iter().map(rational_value).collect()))
                .collect(),
        ),
    );
    obj.insert(
        "facets".into(),
        Value::Array(
            p.facets()
                .iter()
                .map(|f| serde_json::json!({"normal": f.normal, "offset": rational_value(&f.offset)}))
                .collect(),
        ),
    );
    obj.insert("incidence".into(), serde_json::json!(p.incidence()));
    Value::Object(obj)
}

pub fn cone_to_json(c: &MomentCone) -> Value {
    let cells: Vec<&Vec<usize>> = c.decomposition().iter().map(|s| &s.rays).collect();
    serde_json::json!({
        "dim": c.dim(),
        "fan_rays": c.fan_rays(),
        "dual_rays": c.dual_rays(),
        "decomposition": cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::exact::ratio;

    #[test]
    fn decimals_and_fractions_are_exact() {
        let p = parse_polytope_json(r#"{"dim": 2, "vertices": [[0, 0], [0.95, 0], ["19/20", "1/20"], [0, 1]]}"#).unwrap();
        assert!(p.vertices().iter().any(|v| v[0] == ratio(19, 20) && v[1] == ratio(1, 20)));
    }

    #[test]
    fn errors_name_the_field() {
        let e = parse_polytope_json(r#"{"dim": 2, "vertices": [[0, 0], [1, "x"], [0, 1]]}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path == "vertices[1][1]"), "{e}");
        let e = parse_polytope_json(r#"{"dim": 2, "vertices": [[0, 0], [1, 0, 3], [0, 1]]}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path == "vertices[1]"), "{e}");
        let e = parse_polytope_json(r#"{"vertices": []}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path == "dim"), "{e}");
    }

    #[test]
    fn non_primitive_normal_names_the_facet() {
        let text = r#"{"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]],
            "facets": [{"normal": [0, 1], "offset": 0}, {"normal": [2, 0], "offset": 0},
                       {"normal": [-1, -1], "offset": 1}]}"#;
        let e = parse_polytope_json(text).unwrap_err();
        assert!(matches!(e, Error::NonPrimitiveNormal { facet: 1, .. }), "{e:?}");
    }

    #[test]
    fn round_trip() {
        let p = Polytope::from_int_vertices(2, &[vec![-1, 0], vec![0, -1], vec![2, -1], vec![-1, 2]]).unwrap();
        let text = polytope_to_json(&p).to_string();
        let q = parse_polytope_json(&text).unwrap();
        assert_eq!(q.vertices(), p.vertices());
        assert_eq!(q.facets(), p.facets());
        let c = MomentCone::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![1, 0, 1]]).unwrap();
        let d = parse_cone_json(&cone_to_json(&c).to_string()).unwrap();
        assert_eq!(d.dual_rays(), c.dual_rays());
    }
}
