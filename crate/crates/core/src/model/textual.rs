use super::{ModelError, TextualConflict};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

const OURS: &str = "<<<<<<<";
const BASE: &str = "|||||||";
const SEP: &str = "=======";
const THEIRS: &str = ">>>>>>>";

/// Where a textual dataset lives.
pub enum TextualSource<'a> {
    /// Concatenated marker records: conflict block, `Answer:`, resolution, blank line.
    MarkerFile(&'a mut dyn Read),
    /// `<root>/<id>/{a.txt,base.txt,b.txt,r.txt}`.
    TupleDir(&'a Path),
}

pub fn load_textual_conflicts(source: TextualSource<'_>) -> Result<Vec<TextualConflict>, ModelError> {
    match source {
        TextualSource::MarkerFile(reader) => load_marker_file(reader),
        TextualSource::TupleDir(root) => load_tuple_dir(root),
    }
}

fn is_marker(line: &str, marker: &str) -> bool {
    line.starts_with(marker)
}

fn any_marker(line: &str) -> bool {
    [OURS, BASE, SEP, THEIRS].iter().any(|m| is_marker(line, m))
}

#[derive(PartialEq)]
enum Region {
    Ours,
    Base,
    Theirs,
}

/// Parses a marker dataset. Records are numbered from zero in file order.
pub fn load_marker_file<R: Read + ?Sized>(reader: &mut R) -> Result<Vec<TextualConflict>, ModelError> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| ModelError::Io {
        path: "<marker file>".into(),
        source: e,
    })?;
    let text = text.replace("\r\n", "\n");
    let lines: Vec<&str> = text.lines().collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if line.trim().is_empty() || line == "Question:" || line == "Questions:" {
            i += 1;
            continue;
        }
        if !is_marker(line, OURS) {
            let reason = if any_marker(line) {
                "conflict marker outside of a conflict block".to_string()
            } else {
                format!("expected `{OURS}`, found {line:?}")
            };
            return Err(ModelError::Marker { line: i + 1, reason });
        }

        let open_line = i + 1;
        let mut conflict = TextualConflict {
            id: out.len().to_string(),
            ..Default::default()
        };
        let mut region = Region::Ours;
        i += 1;
        loop {
            let Some(&line) = lines.get(i) else {
                return Err(ModelError::Marker {
                    line: open_line,
                    reason: format!("unterminated conflict block (no `{THEIRS}`)"),
                });
            };
            i += 1;
            if is_marker(line, OURS) {
                return Err(ModelError::Marker {
                    line: i,
                    reason: "nested conflict block".into(),
                });
            } else if is_marker(line, BASE) {
                if region != Region::Ours {
                    return Err(ModelError::Marker {
                        line: i,
                        reason: format!("unexpected `{BASE}`"),
                    });
                }
                region = Region::Base;
            } else if is_marker(line, SEP) {
                if region == Region::Theirs {
                    return Err(ModelError::Marker {
                        line: i,
                        reason: format!("duplicate `{SEP}`"),
                    });
                }
                region = Region::Theirs;
            } else if is_marker(line, THEIRS) {
                if region != Region::Theirs {
                    return Err(ModelError::Marker {
                        line: i,
                        reason: format!("`{THEIRS}` before `{SEP}`"),
                    });
                }
                break;
            } else {
                let target = match region {
                    Region::Ours => &mut conflict.variant_a,
                    Region::Base => &mut conflict.base,
                    Region::Theirs => &mut conflict.variant_b,
                };
                target.push(line.to_string());
            }
        }

        while lines.get(i).is_some_and(|l| l.trim().is_empty()) {
            i += 1;
        }
        match lines.get(i) {
            Some(&"Answer:") | Some(&"Answers:") => i += 1,
            _ => {
                return Err(ModelError::Marker {
                    line: i + 1,
                    reason: "expected `Answer:` after conflict block".into(),
                })
            }
        }
        while let Some(&line) = lines.get(i) {
            if line.trim().is_empty() {
                break;
            }
            conflict.resolution.push(line.to_string());
            i += 1;
        }

        conflict.validate().map_err(|e| ModelError::Marker {
            line: open_line,
            reason: e.to_string(),
        })?;
        out.push(conflict);
    }
    Ok(out)
}

/// Inverse of [`load_marker_file`]. Resolutions containing blank lines cannot
/// be represented; the blank line terminates a record.
pub fn save_marker_file(conflicts: &[TextualConflict]) -> String {
    let mut out = String::new();
    for c in conflicts {
        out.push_str("<<<<<<< HEAD\n");
        push_lines(&mut out, &c.variant_a);
        if !c.base.is_empty() {
            out.push_str("|||||||\n");
            push_lines(&mut out, &c.base);
        }
        out.push_str("=======\n");
        push_lines(&mut out, &c.variant_b);
        out.push_str(">>>>>>>\nAnswer:\n");
        push_lines(&mut out, &c.resolution);
        out.push('\n');
    }
    out
}

fn push_lines(out: &mut String, lines: &[String]) {
    for line in lines {
        out.push_str(line);
        out.push('\n');
    }
}

fn io_err(path: &Path, source: std::io::Error) -> ModelError {
    ModelError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, ModelError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(text.replace("\r\n", "\n").lines().map(str::to_string).collect())
}

/// Loads a tuple dataset: one directory per example, sorted by name.
pub fn load_tuple_dir(root: &Path) -> Result<Vec<TextualConflict>, ModelError> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| io_err(root, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    dirs.iter()
        .map(|dir| {
            let id = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let base_path = dir.join("base.txt");
            let base = if base_path.exists() {
                read_lines(&base_path)?
            } else {
                Vec::new()
            };
            let conflict = TextualConflict {
                id,
                base,
                variant_a: read_lines(&dir.join("a.txt"))?,
                variant_b: read_lines(&dir.join("b.txt"))?,
                resolution: read_lines(&dir.join("r.txt"))?,
            };
            conflict.validate()?;
            Ok(conflict)
        })
        .collect()
}

/// Writes a tuple dataset; `base.txt` is omitted when the base is empty.
pub fn save_tuple_dir(root: &Path, conflicts: &[TextualConflict]) -> Result<(), ModelError> {
    for c in conflicts {
        let dir = root.join(&c.id);
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let mut files = vec![("a.txt", &c.variant_a), ("b.txt", &c.variant_b), ("r.txt", &c.resolution)];
        if !c.base.is_empty() {
            files.push(("base.txt", &c.base));
        }
        for (name, lines) in files {
            let path = dir.join(name);
            let mut body = String::new();
            push_lines(&mut body, lines);
            fs::write(&path, body).map_err(|e| io_err(&path, e))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG12_SHOT: &str = "Question:
<<<<<<< HEAD
#include \"chrome/browser/ui/views/accessibility/caption_bubble_controller_views.h\"
=======
#include \"chrome/browser/ui/views/accessibility/hc_with_theme_bubble_view.h\"
>>>>>>>

Answer:
#include \"chrome/browser/ui/views/accessibility/caption_bubble_controller_views.h\"
#include \"chrome/browser/ui/views/accessibility/hc_with_theme_bubble_view.h\"
";

    #[test]
    fn marker_shot_maps_regions() {
        let parsed = load_marker_file(&mut FIG12_SHOT.as_bytes()).unwrap();
        assert_eq!(parsed.len(), 1);
        let c = &parsed[0];
        assert!(c.base.is_empty());
        assert_eq!(
            c.variant_a,
            ["#include \"chrome/browser/ui/views/accessibility/caption_bubble_controller_views.h\""]
        );
        assert_eq!(
            c.variant_b,
            ["#include \"chrome/browser/ui/views/accessibility/hc_with_theme_bubble_view.h\""]
        );
        assert_eq!(c.resolution.len(), 2);
        assert_eq!(c.resolution[0], c.variant_a[0]);
        assert_eq!(c.resolution[1], c.variant_b[0]);
    }

    #[test]
    fn marker_with_base_section() {
        let text = "<<<<<<<\nlet b = x + 5.7;\nvar y = floor(b);\nconsole.log(y);\n|||||||\nvar b = 5.7;\nvar y = floor(b);\n=======\nvar y = floor(x + 5.7);\n>>>>>>>\nAnswer:\nvar y = floor(x + 5.7);\nconsole.log(y);\n\n";
        let c = &load_marker_file(&mut text.as_bytes()).unwrap()[0];
        assert_eq!(c.base, ["var b = 5.7;", "var y = floor(b);"]);
        assert_eq!(c.variant_a.len(), 3);
        assert_eq!(c.variant_b, ["var y = floor(x + 5.7);"]);
        assert_eq!(c.resolution.len(), 2);
    }

    #[test]
    fn unbalanced_markers_report_line() {
        let text = "\n<<<<<<< HEAD\na\n=======\nb\n";
        match load_marker_file(&mut text.as_bytes()) {
            Err(ModelError::Marker { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let text = "a\n=======\n";
        assert!(matches!(
            load_marker_file(&mut text.as_bytes()),
            Err(ModelError::Marker { line: 1, .. })
        ));
        let text = "<<<<<<<\na\n>>>>>>>\nAnswer:\na\n";
        assert!(matches!(
            load_marker_file(&mut text.as_bytes()),
            Err(ModelError::Marker { line: 3, .. })
        ));
    }

    #[test]
    fn tuple_dir_missing_file_names_it() {
        let tmp = tempfile::tempdir().unwrap();
        let ex = tmp.path().join("ex1");
        fs::create_dir(&ex).unwrap();
        fs::write(ex.join("a.txt"), "x\n").unwrap();
        fs::write(ex.join("b.txt"), "y\n").unwrap();
        let err = load_tuple_dir(tmp.path()).unwrap_err();
        assert!(err.to_string().contains("r.txt"), "{err}");
    }

    #[test]
    fn tuple_dir_without_base() {
        let tmp = tempfile::tempdir().unwrap();
        let c = TextualConflict {
            id: "ex".into(),
            base: vec![],
            variant_a: vec!["a".into()],
            variant_b: vec!["b".into()],
            resolution: vec!["a".into(), "b".into()],
        };
        save_tuple_dir(tmp.path(), std::slice::from_ref(&c)).unwrap();
        assert!(!tmp.path().join("ex/base.txt").exists());
        assert_eq!(load_tuple_dir(tmp.path()).unwrap(), vec![c]);
    }
}
