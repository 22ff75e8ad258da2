use super::{CompilerDiagnostic, ConflictDescription, ModelError, UpstreamChange};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::io::Read;

// On-disk keys follow the curated JSON layout: UpstreamChanges / Before / After /
// DownstreamConflict / DownstreamFix. `Id` and `Diagnostic` are optional extras.
#[derive(Serialize)]
struct DescriptionOut<'a> {
    #[serde(rename = "Id")]
    id: &'a str,
    #[serde(rename = "UpstreamChanges")]
    upstream_changes: &'a [UpstreamChange],
    #[serde(rename = "DownstreamConflict")]
    downstream_conflict: &'a str,
    #[serde(rename = "DownstreamFix", skip_serializing_if = "Option::is_none")]
    downstream_fix: Option<&'a str>,
    #[serde(rename = "Diagnostic", skip_serializing_if = "Option::is_none")]
    diagnostic: Option<&'a CompilerDiagnostic>,
}

#[derive(Deserialize)]
struct ChangeIn {
    #[serde(rename = "Before")]
    before: Option<String>,
    #[serde(rename = "After")]
    after: Option<String>,
}

#[derive(Deserialize)]
struct DescriptionIn {
    #[serde(rename = "Id")]
    id: Option<String>,
    #[serde(rename = "UpstreamChanges")]
    upstream_changes: Option<Vec<ChangeIn>>,
    #[serde(rename = "DownstreamConflict")]
    downstream_conflict: Option<String>,
    #[serde(rename = "DownstreamFix")]
    downstream_fix: Option<String>,
    #[serde(rename = "Diagnostic")]
    diagnostic: Option<CompilerDiagnostic>,
}

/// Reads conflict descriptions from a JSON array, JSON-lines, or a sequence of
/// concatenated objects. Descriptions without an `Id` are numbered by position.
pub fn load_conflict_descriptions<R: Read>(
    mut reader: R,
) -> Result<Vec<ConflictDescription>, ModelError> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| ModelError::Io {
        path: "<stream>".into(),
        source: e,
    })?;

    let mut values = Vec::new();
    let stream = serde_json::Deserializer::from_str(&text).into_iter::<Value>();
    for item in stream {
        let value = item.map_err(|e| ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        match value {
            Value::Array(items) => values.extend(items),
            other => values.push(other),
        }
    }

    values
        .into_iter()
        .enumerate()
        .map(|(index, value)| description_from_value(index, value))
        .collect()
}

fn description_from_value(index: usize, value: Value) -> Result<ConflictDescription, ModelError> {
    if !value.is_object() {
        return Err(ModelError::Invalid {
            index,
            reason: "expected a JSON object".into(),
        });
    }
    let raw: DescriptionIn = serde_json::from_value(value).map_err(|e| ModelError::Invalid {
        index,
        reason: e.to_string(),
    })?;

    let changes = raw.upstream_changes.ok_or(ModelError::MissingKey {
        index,
        key: "UpstreamChanges",
    })?;
    let downstream_conflict = raw.downstream_conflict.ok_or(ModelError::MissingKey {
        index,
        key: "DownstreamConflict",
    })?;

    let mut upstream_changes = Vec::with_capacity(changes.len());
    for change in changes {
        let before = change.before.ok_or(ModelError::MissingKey { index, key: "Before" })?;
        let after = change.after.ok_or(ModelError::MissingKey { index, key: "After" })?;
        upstream_changes.push(UpstreamChange { before, after });
    }

    let description = ConflictDescription {
        id: raw.id.unwrap_or_else(|| index.to_string()),
        upstream_changes,
        downstream_conflict,
        downstream_fix: raw.downstream_fix,
        diagnostic: raw.diagnostic,
    };
    description.validate().map_err(|e| ModelError::Invalid {
        index,
        reason: e.to_string(),
    })?;
    Ok(description)
}

/// Writes descriptions as a JSON array indented with four spaces.
pub fn save_conflict_descriptions(descriptions: &[ConflictDescription]) -> Vec<u8> {
    let out: Vec<DescriptionOut<'_>> = descriptions
        .iter()
        .map(|d| DescriptionOut {
            id: &d.id,
            upstream_changes: &d.upstream_changes,
            downstream_conflict: &d.downstream_conflict,
            downstream_fix: d.downstream_fix.as_deref(),
            diagnostic: d.diagnostic.as_ref(),
        })
        .collect();

    let mut buf = Vec::new();
    let formatter = serde_json::ser::PrettyFormatter::with_indent(b"    ");
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    out.serialize(&mut ser)
        .expect("serializing in-memory descriptions cannot fail");
    buf
}
