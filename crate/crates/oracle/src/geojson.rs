//! Structural validator for RFC 7946 FeatureCollections as produced by the
//! exporters (LineString and Point geometries only).

use serde_json::Value;

fn position(v: &Value) -> Result<(), String> {
    let arr = v.as_array().ok_or("position is not an array")?;
    if arr.len() < 2 || arr.len() > 3 {
        return Err(format!("position has {} elements", arr.len()));
    }
    let lon = arr[0].as_f64().ok_or("longitude not a number")?;
    let lat = arr[1].as_f64().ok_or("latitude not a number")?;
    if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
        return Err(format!("position out of range: [{lon}, {lat}]"));
    }
    Ok(())
}

fn geometry(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("geometry is not an object")?;
    match obj.get("type").and_then(Value::as_str) {
        Some("Point") => position(obj.get("coordinates").ok_or("missing coordinates")?),
        Some("LineString") => {
            let coords = obj.get("coordinates").and_then(Value::as_array).ok_or("missing coordinates")?;
            if coords.len() < 2 {
                return Err("LineString needs two or more positions".into());
            }
            coords.iter().try_for_each(position)
        }
        other => Err(format!("unexpected geometry type {other:?}")),
    }
}

pub fn validate_feature_collection(doc: &Value) -> Result<(), String> {
    let obj = doc.as_object().ok_or("document is not an object")?;
    if obj.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err("type must be FeatureCollection".into());
    }
    let features = obj.get("features").and_then(Value::as_array).ok_or("features must be an array")?;
    for (i, f) in features.iter().enumerate() {
        let fo = f.as_object().ok_or(format!("feature {i} not an object"))?;
        if fo.get("type").and_then(Value::as_str) != Some("Feature") {
            return Err(format!("feature {i}: type must be Feature"));
        }
        match fo.get("properties") {
            Some(Value::Object(_)) | Some(Value::Null) => {}
            _ => return Err(format!("feature {i}: properties must be object or null")),
        }
        match fo.get("geometry") {
            Some(Value::Null) => {}
            Some(g) => geometry(g).map_err(|e| format!("feature {i}: {e}"))?,
            None => return Err(format!("feature {i}: missing geometry")),
        }
    }
    Ok(())
}
