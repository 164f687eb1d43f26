//! JSON interchange for atlases and fields, written with 17 significant digits.

use super::atlas::ChartAtlas;
use super::field::{ComplexField, Field, Tensorial};
use super::signature::ConeSignature;
use crate::{Error, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::sync::Arc;

/// Per-chart sample values; complex samples are `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub role: String,
    pub chart_id: String,
    pub layout: String,
    pub values: Values,
}

/// A document holding an atlas and any number of fields on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<Value>,
    pub atlas: ChartAtlas,
    pub fields: Vec<FieldRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<ConeSignature>,
    /// Declared pole order per cone point for quadratic differentials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles: Option<Vec<u32>>,
}

const LAYOUT: &str = "row-major";

impl FieldFile {
    pub fn new(atlas: &ChartAtlas) -> Self {
        FieldFile { header: None, atlas: atlas.clone(), fields: vec![], signature: None, poles: None }
    }

    pub fn push<T: Tensorial>(&mut self, f: &Field<T>) {
        for (k, chart) in f.atlas.charts.iter().enumerate() {
            let values = f.values[k].iter().flat_map(|v| v.components()).collect();
            self.fields.push(FieldRecord {
                role: f.role.clone(),
                chart_id: chart.id.clone(),
                layout: LAYOUT.into(),
                values: Values::Real(values),
            });
        }
    }

    pub fn push_complex(&mut self, f: &ComplexField) {
        for (k, chart) in f.atlas.charts.iter().enumerate() {
            let values = f.values[k].iter().map(|z| [z.re, z.im]).collect();
            self.fields.push(FieldRecord {
                role: f.role.clone(),
                chart_id: chart.id.clone(),
                layout: LAYOUT.into(),
                values: Values::Complex(values),
            });
        }
    }

    pub fn has_role(&self, role: &str) -> bool {
        self.fields.iter().any(|r| r.role == role)
    }

    fn record(&self, role: &str, chart: &str) -> Result<&FieldRecord> {
        let r = self
            .fields
            .iter()
            .find(|r| r.role == role && r.chart_id == chart)
            .ok_or_else(|| Error::Parse(format!("field {role} missing on chart {chart}")))?;
        if r.layout != LAYOUT {
            return Err(Error::Parse(format!("field {role}: unsupported layout {}", r.layout)));
        }
        Ok(r)
    }

    /// Reads a real tensor field of the given role.
    pub fn get<T: Tensorial>(&self, atlas: &Arc<ChartAtlas>, role: &str) -> Result<Field<T>> {
        let mut values = Vec::new();
        for chart in &atlas.charts {
            let r = self.record(role, &chart.id)?;
            let Values::Real(v) = &r.values else {
                return Err(Error::Parse(format!("field {role} on {}: expected real values", chart.id)));
            };
            let n = chart.grid.len();
            if v.len() != n * T::COMPONENTS {
                return Err(Error::Parse(format!(
                    "field {role} on {}: {} values, expected {} samples × {} components",
                    chart.id,
                    v.len(),
                    n,
                    T::COMPONENTS
                )));
            }
            values.push(v.chunks(T::COMPONENTS).map(T::from_components).collect());
        }
        Field::from_values(atlas, role, values)
    }

    pub fn get_complex(&self, atlas: &Arc<ChartAtlas>, role: &str) -> Result<ComplexField> {
        let mut values = Vec::new();
        for chart in &atlas.charts {
            let r = self.record(role, &chart.id)?;
            let v: Vec<C> = match &r.values {
                Values::Complex(v) => v.iter().map(|p| C::new(p[0], p[1])).collect(),
                // an empty list parses as Real
                Values::Real(v) if v.is_empty() => vec![],
                Values::Real(_) => {
                    return Err(Error::Parse(format!("field {role} on {}: expected [re, im] pairs", chart.id)))
                }
            };
            if v.len() != chart.grid.len() {
                return Err(Error::Parse(format!("field {role} on {}: wrong sample count", chart.id)));
            }
            values.push(v);
        }
        Field::from_values(atlas, role, values)
    }

    pub fn atlas_arc(&self) -> Result<Arc<ChartAtlas>> {
        self.atlas.validate()?;
        Ok(Arc::new(self.atlas.clone()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        from_json_str(s)
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

/// Parses JSON, reporting line and column on failure.
pub fn from_json_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| {
        let text = e.to_string();
        let message = text.rsplit_once(" at line ").map_or(text.as_str(), |(m, _)| m);
        Error::Parse(format!("line {} column {}: {message}", e.line(), e.column()))
    })
}

/// Serializes with sorted keys and every float in `{:.16e}` form.
pub fn to_json_string<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_number(n: &serde_json::Number, out: &mut String) {
    if n.is_f64() {
        let x = n.as_f64().unwrap_or(f64::NAN);
        out.push_str(&format!("{x:.16e}"));
    } else {
        out.push_str(&n.to_string());
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap_or_default()),
        Value::Array(a) => {
            // numeric vectors and [re, im] lists stay on one line
            let flat = a.iter().all(|x| is_scalar(x) || matches!(x, Value::Array(y) if y.iter().all(is_scalar)));
            if flat {
                out.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, x) in a.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    write_value(x, indent + 1, out);
                    if i + 1 < a.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            let n = m.len();
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).unwrap_or_default());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                if i + 1 < n {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Grid, MetricField};
    use crate::linalg::Sym2;

    #[test]
    fn roundtrip_is_exact() {
        let atlas = Arc::new(ChartAtlas::single("a", Grid::polar(1e-3, 1.0, 7, 8, 1.3)).unwrap());
        let g = MetricField::from_fn(&atlas, "I*", |_, _, p| Sym2::new(1.0 / 3.0, 0.1, p[0].sinh().powi(2)));
        let q = ComplexField::from_fn(&atlas, "q", |_, _, p| C::new(p[0], -p[1]));
        let mut f = FieldFile::new(&atlas);
        f.push(&g);
        f.push_complex(&q);
        f.poles = Some(vec![1]);
        let s = f.to_json().unwrap();
        assert!(s.contains("3.3333333333333331e-1"));
        assert!(s.contains("\"n_α\": 8"));
        let back = FieldFile::from_json(&s).unwrap();
        assert_eq!(back, f);
        let a2 = back.atlas_arc().unwrap();
        let g2: MetricField = back.get(&a2, "I*").unwrap();
        assert_eq!(g2.values, g.values);
        assert_eq!(back.get_complex(&a2, "q").unwrap().values, q.values);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = FieldFile::from_json("{\n  \"atlas\": [1,\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }
}
