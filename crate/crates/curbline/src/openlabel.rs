//! ASAM OpenLABEL-style serialization of curb polylines.
//!
//! Only the polyline-objects subset is implemented, nested as
//! `{"openlabel": {"metadata": {...}, "objects": {...}}}` with static
//! (frame-less) geometry under `objects.<key>.object_data.poly3d`. The
//! writer is canonical — objects ordered by numeric key, shortest
//! round-trip float formatting — so repeated exports are byte-identical.
//! The reader ignores unknown sibling fields.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyline::{CurbSet, Polyline3D};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// One annotated curb object.
#[derive(Debug, Clone, PartialEq)]
pub struct CurbObject {
    pub name: String,
    pub object_type: String,
    pub polylines: Vec<Poly3d>,
}

/// A 3D polyline entry: flat x,y,z value list.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly3d {
    pub name: String,
    pub closed: bool,
    pub values: Vec<f64>,
}

/// The in-memory document: object keys are the numeric curb ids.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenLabelDoc {
    pub schema_version: String,
    pub annotator: Option<String>,
    pub objects: BTreeMap<u64, CurbObject>,
}

/// Builds a document from a curb set: one object per curb, key = curb id,
/// name = `curb<id>`, geometry flattened as x0,y0,z0,x1,...
pub fn export_doc(curbs: &CurbSet, annotator: Option<&str>) -> OpenLabelDoc {
    let mut objects = BTreeMap::new();
    for (id, poly) in curbs.curbs() {
        let name = format!("curb{id}");
        let mut values = Vec::with_capacity(poly.vertices().len() * 3);
        for v in poly.vertices() {
            values.extend_from_slice(&[v.x, v.y, v.z]);
        }
        objects.insert(
            *id,
            CurbObject {
                name: name.clone(),
                object_type: "curb".to_string(),
                polylines: vec![Poly3d {
                    name,
                    closed: false,
                    values,
                }],
            },
        );
    }
    OpenLabelDoc {
        schema_version: SCHEMA_VERSION.to_string(),
        annotator: annotator.map(str::to_string),
        objects,
    }
}

/// Extracts the curb set. Each object must carry exactly one open poly3d
/// with a vertex count of at least two.
pub fn to_curb_set(doc: &OpenLabelDoc) -> Result<CurbSet> {
    let mut curbs = Vec::with_capacity(doc.objects.len());
    for (id, object) in &doc.objects {
        let at = format!("objects.{id}");
        if object.polylines.len() != 1 {
            return Err(Error::Schema {
                at,
                detail: format!(
                    "expected exactly one poly3d per curb object, found {}",
                    object.polylines.len()
                ),
            });
        }
        let poly = &object.polylines[0];
        if poly.closed {
            return Err(Error::Schema {
                at,
                detail: "curb polylines must be open (closed = false)".to_string(),
            });
        }
        let vertices: Vec<Vector3<f64>> = poly
            .values
            .chunks_exact(3)
            .map(|c| Vector3::new(c[0], c[1], c[2]))
            .collect();
        let polyline = Polyline3D::new(vertices).map_err(|e| Error::Schema {
            at,
            detail: e.to_string(),
        })?;
        curbs.push((*id, polyline));
    }
    CurbSet::new(curbs)
}

// --- canonical writer -------------------------------------------------------

#[derive(Serialize)]
struct WireDoc<'a> {
    openlabel: WireOpenLabel<'a>,
}

#[derive(Serialize)]
struct WireOpenLabel<'a> {
    metadata: WireMetadata<'a>,
    objects: WireObjects<'a>,
}

#[derive(Serialize)]
struct WireMetadata<'a> {
    schema_version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    annotator: Option<&'a str>,
}

struct WireObjects<'a>(&'a BTreeMap<u64, CurbObject>);

impl Serialize for WireObjects<'_> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (id, object) in self.0 {
            map.serialize_entry(&id.to_string(), &WireObject(object))?;
        }
        map.end()
    }
}

struct WireObject<'a>(&'a CurbObject);

impl Serialize for WireObject<'_> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            name: &'a str,
            #[serde(rename = "type")]
            object_type: &'a str,
            object_data: WireObjectData<'a>,
        }
        #[derive(Serialize)]
        struct WireObjectData<'a> {
            poly3d: Vec<WirePoly3d<'a>>,
        }
        #[derive(Serialize)]
        struct WirePoly3d<'a> {
            name: &'a str,
            closed: bool,
            val: &'a [f64],
        }
        Wire {
            name: &self.0.name,
            object_type: &self.0.object_type,
            object_data: WireObjectData {
                poly3d: self
                    .0
                    .polylines
                    .iter()
                    .map(|p| WirePoly3d {
                        name: &p.name,
                        closed: p.closed,
                        val: &p.values,
                    })
                    .collect(),
            },
        }
        .serialize(serializer)
    }
}

/// Canonical pretty-printed JSON text of the document.
pub fn to_json(doc: &OpenLabelDoc) -> String {
    serde_json::to_string_pretty(&WireDoc {
        openlabel: WireOpenLabel {
            metadata: WireMetadata {
                schema_version: &doc.schema_version,
                annotator: doc.annotator.as_deref(),
            },
            objects: WireObjects(&doc.objects),
        },
    })
    .expect("document serialization cannot fail")
}

pub fn write_file(path: &Path, doc: &OpenLabelDoc) -> Result<()> {
    let mut text = to_json(doc);
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Convenience: export a curb set straight to a file.
pub fn export_file(path: &Path, curbs: &CurbSet, annotator: Option<&str>) -> Result<()> {
    write_file(path, &export_doc(curbs, annotator))
}

// --- tolerant reader ---------------------------------------------------------

#[derive(Deserialize)]
struct RdDoc {
    openlabel: RdOpenLabel,
}

#[derive(Deserialize)]
struct RdOpenLabel {
    metadata: RdMetadata,
    #[serde(default)]
    objects: BTreeMap<String, RdObject>,
}

#[derive(Deserialize)]
struct RdMetadata {
    schema_version: String,
    #[serde(default)]
    annotator: Option<String>,
}

#[derive(Deserialize)]
struct RdObject {
    #[serde(default)]
    name: Option<String>,
    #[serde(rename = "type", default)]
    object_type: Option<String>,
    object_data: RdObjectData,
}

#[derive(Deserialize)]
struct RdObjectData {
    poly3d: Vec<RdPoly3d>,
}

#[derive(Deserialize)]
struct RdPoly3d {
    #[serde(default)]
    name: Option<String>,
    closed: bool,
    val: Vec<f64>,
}

/// Parses a document from JSON text; `origin` names the source in errors.
pub fn from_json(text: &str, origin: &Path) -> Result<OpenLabelDoc> {
    let parsed: RdDoc = serde_json::from_str(text).map_err(|e| {
        if e.classify() == serde_json::error::Category::Data {
            Error::Schema {
                at: "document".to_string(),
                detail: e.to_string(),
            }
        } else {
            Error::JsonParse {
                path: origin.to_path_buf(),
                offset: byte_offset(text, e.line(), e.column()),
                line: e.line(),
                column: e.column(),
                detail: e.to_string(),
            }
        }
    })?;

    let mut objects = BTreeMap::new();
    for (key, object) in parsed.openlabel.objects {
        let id: u64 = key.parse().map_err(|_| Error::Schema {
            at: format!("objects.{key}"),
            detail: "object keys must be decimal strings".to_string(),
        })?;
        let mut polylines = Vec::with_capacity(object.object_data.poly3d.len());
        for poly in object.object_data.poly3d {
            if poly.val.len() % 3 != 0 {
                return Err(Error::Schema {
                    at: format!("objects.{key}"),
                    detail: format!("val length {} is not a multiple of 3", poly.val.len()),
                });
            }
            if poly.val.len() < 6 {
                return Err(Error::Schema {
                    at: format!("objects.{key}"),
                    detail: format!("val holds {} numbers, need at least 6", poly.val.len()),
                });
            }
            polylines.push(Poly3d {
                name: poly.name.unwrap_or_else(|| format!("curb{id}")),
                closed: poly.closed,
                values: poly.val,
            });
        }
        if objects
            .insert(
                id,
                CurbObject {
                    name: object.name.unwrap_or_else(|| format!("curb{id}")),
                    object_type: object.object_type.unwrap_or_else(|| "curb".to_string()),
                    polylines,
                },
            )
            .is_some()
        {
            return Err(Error::Schema {
                at: format!("objects.{key}"),
                detail: "duplicate object key".to_string(),
            });
        }
    }
    Ok(OpenLabelDoc {
        schema_version: parsed.openlabel.metadata.schema_version,
        annotator: parsed.openlabel.metadata.annotator,
        objects,
    })
}

pub fn read_file(path: &Path) -> Result<OpenLabelDoc> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text, path)
}

/// Convenience: read a file and extract its curb set.
pub fn import_file(path: &Path) -> Result<CurbSet> {
    to_curb_set(&read_file(path)?)
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in text.split('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len() + 1;
    }
    text.len()
}

/// Subset schema validator over raw JSON: an independent check that an
/// exported document is well-formed.
pub fn validate_value(value: &serde_json::Value) -> Result<()> {
    let fail = |at: &str, detail: &str| -> Result<()> {
        Err(Error::Schema {
            at: at.to_string(),
            detail: detail.to_string(),
        })
    };
    let Some(root) = value.get("openlabel") else {
        return fail("document", "missing openlabel key");
    };
    let Some(version) = root.pointer("/metadata/schema_version").and_then(|v| v.as_str()) else {
        return fail("metadata", "missing schema_version string");
    };
    if version.is_empty() {
        return fail("metadata", "empty schema_version");
    }
    let Some(objects) = root.get("objects").and_then(|v| v.as_object()) else {
        return fail("document", "missing objects map");
    };
    for (key, object) in objects {
        let at = format!("objects.{key}");
        if key.parse::<u64>().is_err() {
            return fail(&at, "key is not a decimal string");
        }
        if object.get("name").and_then(|v| v.as_str()).is_none() {
            return fail(&at, "missing name");
        }
        let Some(polys) = object.pointer("/object_data/poly3d").and_then(|v| v.as_array()) else {
            return fail(&at, "missing object_data.poly3d list");
        };
        for poly in polys {
            if poly.get("closed").and_then(|v| v.as_bool()) != Some(false) {
                return fail(&at, "poly3d must carry closed = false");
            }
            let Some(val) = poly.get("val").and_then(|v| v.as_array()) else {
                return fail(&at, "missing val list");
            };
            if val.len() % 3 != 0 || val.len() < 6 {
                return fail(&at, "val length must be a multiple of 3 and at least 6");
            }
            if val.iter().any(|v| !v.is_number()) {
                return fail(&at, "val entries must be numbers");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyline::Polyline3D;

    fn sample_set() -> CurbSet {
        CurbSet::from_polylines(vec![
            Polyline3D::from_coords(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]).unwrap(),
            Polyline3D::from_coords(&[(0.5, -3.5, 0.1), (10.25, -3.5, 0.1), (20.0, -3.0, 0.05)])
                .unwrap(),
        ])
    }

    #[test]
    fn export_maps_ids_names_and_values() {
        let doc = export_doc(&sample_set(), Some("test"));
        assert_eq!(doc.schema_version, SCHEMA_VERSION);
        assert_eq!(doc.objects.len(), 2);
        let first = &doc.objects[&0];
        assert_eq!(first.name, "curb0");
        assert_eq!(first.object_type, "curb");
        assert_eq!(first.polylines[0].values, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(!first.polylines[0].closed);
    }

    #[test]
    fn empty_set_exports_empty_objects_map() {
        let doc = export_doc(&CurbSet::default(), None);
        assert!(doc.objects.is_empty());
        let text = to_json(&doc);
        assert!(text.contains("\"schema_version\": \"1.0.0\""));
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        validate_value(&value).unwrap();
    }

    #[test]
    fn keys_serialize_in_numeric_order() {
        let polys: Vec<Polyline3D> = (0..12)
            .map(|i| {
                Polyline3D::from_coords(&[(i as f64, 0.0, 0.0), (i as f64 + 1.0, 0.0, 0.0)])
                    .unwrap()
            })
            .collect();
        let set = CurbSet::from_polylines(polys);
        let text = to_json(&export_doc(&set, None));
        let pos_2 = text.find("\"2\"").unwrap();
        let pos_10 = text.find("\"10\"").unwrap();
        assert!(pos_2 < pos_10, "numeric order puts 2 before 10");
    }

    #[test]
    fn round_trip_is_vertex_exact_and_byte_stable() {
        let set = sample_set();
        let text = to_json(&export_doc(&set, Some("roundtrip")));
        let doc = from_json(&text, Path::new("mem")).unwrap();
        let back = to_curb_set(&doc).unwrap();
        assert_eq!(back, set);
        let second = to_json(&doc);
        assert_eq!(second, text);
    }

    #[test]
    fn values_arity_violation_names_the_object() {
        let text = r#"{"openlabel": {"metadata": {"schema_version": "1.0.0"},
            "objects": {"3": {"name": "curb3", "type": "curb",
                "object_data": {"poly3d": [{"name": "curb3", "closed": false,
                    "val": [0, 0, 0, 1, 0, 0, 2]}]}}}}}"#;
        match from_json(text, Path::new("mem")) {
            Err(Error::Schema { at, .. }) => assert_eq!(at, "objects.3"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_tolerated() {
        let text = r#"{"openlabel": {"metadata": {"schema_version": "1.0.0",
            "comment": "extra"}, "objects": {"0": {"name": "curb0", "type": "curb",
            "custom": {"nested": true},
            "object_data": {"poly3d": [{"name": "curb0", "closed": false,
                "val": [0, 0, 0, 1, 1, 1]}]}}}}, "sidecar": 42}"#;
        let doc = from_json(text, Path::new("mem")).unwrap();
        assert_eq!(doc.objects.len(), 1);
        let set = to_curb_set(&doc).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn malformed_json_reports_position() {
        let text = "{\"openlabel\": {\n  \"metadata\": oops";
        match from_json(text, Path::new("mem")) {
            Err(Error::JsonParse { line, offset, .. }) => {
                assert_eq!(line, 2);
                assert!(offset > 0 && offset <= text.len());
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_required_field_is_a_schema_error() {
        let text = r#"{"openlabel": {"metadata": {"schema_version": "1.0.0"},
            "objects": {"0": {"name": "curb0", "type": "curb",
                "object_data": {"poly3d": [{"name": "curb0", "val": [0,0,0,1,1,1]}]}}}}}"#;
        assert!(matches!(
            from_json(text, Path::new("mem")),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn exported_documents_revalidate() {
        let text = to_json(&export_doc(&sample_set(), Some("v")));
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        validate_value(&value).unwrap();
    }
}
