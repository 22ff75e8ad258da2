//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use mergeprompt_core::model::{ConflictDescription, TextualConflict, UpstreamChange};
use std::path::PathBuf;

pub fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn pair(before: &str, after: &str) -> UpstreamChange {
    UpstreamChange::new(before, after).unwrap()
}

/// The IsIncognito query with its two upstream renames.
pub fn incognito_query() -> ConflictDescription {
    ConflictDescription {
        id: "incognito".into(),
        upstream_changes: vec![
            pair(
                "if (browser_view_->IsIncognito()||!browser_view_->IsBrowserTypeNormal())",
                "if (browser_view_->GetIncognito()||!browser_view_->GetIsNormalType())",
            ),
            pair("bool IsIncognito() const;", "bool GetIncognito() const;"),
        ],
        downstream_conflict: " ...GetBrowserViewForBrowser(browser)->IsIncognito())".into(),
        downstream_fix: Some("...GetBrowserViewForBrowser(browser)->GetIncognito())".into()),
        diagnostic: None,
    }
}

pub fn build_config_conflict() -> TextualConflict {
    TextualConflict {
        id: "build_config".into(),
        base: vec![],
        variant_a: vec!["#include \"build/build_config.h\"".into()],
        variant_b: vec!["#include \"media/media_buildflags.h\"".into()],
        resolution: vec![
            "#include \"build/build_config.h\"".into(),
            "#include \"media/media_buildflags.h\"".into(),
        ],
    }
}

/// A three-way conflict with a non-empty base.
pub fn floor_conflict() -> TextualConflict {
    TextualConflict {
        id: "floor".into(),
        base: vec!["var b = 5.7;".into(), "var y = floor(b);".into()],
        variant_a: vec!["let b = x + 5.7;".into(), "var y = floor(b);".into(), "console.log(y);".into()],
        variant_b: vec!["var y = floor(x + 5.7);".into()],
        resolution: vec!["var y = floor(x + 5.7);".into(), "console.log(y);".into()],
    }
}

/// A rename whose fix needs `kCameraPanTiltZoom`, a token no pair shows.
pub fn camera_query() -> ConflictDescription {
    ConflictDescription {
        id: "camera".into(),
        upstream_changes: vec![
            pair(
                "\"request\", permissions::PermissionRequestType::PERMISSION_NOTIFICATIONS,",
                "\"request\", permissions::RequestType::kNotifications, requesting_origin);",
            ),
            pair("permissions::PermissionRequestType request_type,", "permissions::RequestType request_type,"),
            pair(
                "permissions::PermissionRequestType::PERMISSION_NOTIFICATIONS) {",
                "if (request_type == permissions::RequestType::kNotifications) {",
            ),
        ],
        downstream_conflict: " case permissions::PermissionRequestType::PERMISSION_CAMERA_PAN_TILT_ZOOM:".into(),
        downstream_fix: Some("case permissions::RequestType::kCameraPanTiltZoom:".into()),
        diagnostic: None,
    }
}
