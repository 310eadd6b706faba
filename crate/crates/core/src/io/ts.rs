//! `.ts` (sktime/UEA) and single-table TSV readers, plus a `.ts` writer.
//!
//! The accepted `.ts` grammar is documented in `docs/ts-format.md`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};

#[derive(Default)]
struct Header {
    problem_name: Option<String>,
    univariate: Option<(bool, usize)>,
    dimensions: Option<(usize, usize)>,
    series_length: Option<(usize, usize)>,
    class_labels: Option<Vec<String>>,
}

fn parse_bool(value: &str, line: usize, column: usize) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::parse(line, column, format!("expected true/false, got {other:?}"))),
    }
}

fn parse_value(token: &str, line: usize, column: usize) -> Result<f64> {
    let t = token.trim();
    if t == "?" || t.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(line, column, format!("invalid value {t:?}"))),
    }
}

fn with_path(err: Error, path: &Path) -> Error {
    match err {
        Error::Parse {
            line,
            column,
            message,
            ..
        } => Error::Parse {
            path: Some(path.to_path_buf()),
            line,
            column,
            message,
        },
        other => other,
    }
}

/// Parses `.ts` text. `id` is used when the header has no `@problemName`.
pub fn parse_ts(text: &str, id: &str) -> Result<TimeSeriesDataset> {
    let mut header = Header::default();
    let mut in_data = false;
    let mut last_line = 0;

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut dims: Option<usize> = None;
    let mut length: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = line.len() - line.trim_start().len();

        if !in_data {
            let Some(rest) = trimmed.strip_prefix('@') else {
                return Err(Error::parse(line_no, indent + 1, "expected a header line before @data"));
            };
            let mut parts = rest.split_whitespace();
            let key = parts.next().unwrap_or("").to_ascii_lowercase();
            let args: Vec<&str> = parts.collect();
            let arg_col = line.find(args.first().copied().unwrap_or("")).unwrap_or(indent) + 1;
            let single = |what: &str| -> Result<&str> {
                match args.as_slice() {
                    [v] => Ok(*v),
                    _ => Err(Error::parse(line_no, arg_col, format!("@{what} takes exactly one value"))),
                }
            };
            match key.as_str() {
                "problemname" => header.problem_name = Some(single("problemName")?.to_string()),
                "timestamps" => {
                    if parse_bool(single("timeStamps")?, line_no, arg_col)? {
                        return Err(Error::parse(line_no, arg_col, "timestamped series are not supported"));
                    }
                }
                "missing" => {
                    parse_bool(single("missing")?, line_no, arg_col)?;
                }
                "univariate" => header.univariate = Some((parse_bool(single("univariate")?, line_no, arg_col)?, line_no)),
                "equallength" => {
                    if !parse_bool(single("equalLength")?, line_no, arg_col)? {
                        return Err(Error::parse(line_no, arg_col, "unequal-length datasets are not supported"));
                    }
                }
                "dimensions" | "dimension" => {
                    let v = single("dimensions")?;
                    let d = v
                        .parse()
                        .ok()
                        .filter(|&d: &usize| d > 0)
                        .ok_or_else(|| Error::parse(line_no, arg_col, format!("invalid dimension count {v:?}")))?;
                    header.dimensions = Some((d, line_no));
                }
                "serieslength" => {
                    let v = single("seriesLength")?;
                    let l = v
                        .parse()
                        .ok()
                        .filter(|&l: &usize| l > 0)
                        .ok_or_else(|| Error::parse(line_no, arg_col, format!("invalid series length {v:?}")))?;
                    header.series_length = Some((l, line_no));
                }
                "classlabel" => {
                    let Some((flag, names)) = args.split_first() else {
                        return Err(Error::parse(line_no, arg_col, "@classLabel needs true/false"));
                    };
                    if !parse_bool(flag, line_no, arg_col)? {
                        return Err(Error::parse(line_no, arg_col, "unlabelled datasets are not supported"));
                    }
                    if names.is_empty() {
                        return Err(Error::parse(line_no, arg_col, "@classLabel true lists no classes"));
                    }
                    header.class_labels = Some(names.iter().map(|s| s.to_string()).collect());
                }
                "targetlabel" => {
                    return Err(Error::parse(line_no, indent + 1, "regression targets are not supported"));
                }
                "data" => {
                    if header.class_labels.is_none() {
                        return Err(Error::parse(line_no, indent + 1, "@data before @classLabel"));
                    }
                    in_data = true;
                }
                other => {
                    return Err(Error::parse(line_no, indent + 1, format!("unknown header key @{other}")));
                }
            }
            continue;
        }

        let class_names = header.class_labels.as_ref().expect("checked at @data");
        // dimensions are ':'-separated; the final field is the class label
        let mut fields: Vec<(usize, &str)> = Vec::new();
        let mut start = 0;
        for (pos, ch) in line.char_indices() {
            if ch == ':' {
                fields.push((start, &line[start..pos]));
                start = pos + 1;
            }
        }
        fields.push((start, &line[start..]));
        if fields.len() < 2 {
            return Err(Error::parse(line_no, line.len() + 1, "missing ':' before class label"));
        }
        let (label_col, label_raw) = fields.pop().expect("at least two fields");
        let label = label_raw.trim();
        let Some(class) = class_names.iter().position(|c| c == label) else {
            if label.is_empty() {
                return Err(Error::parse(line_no, label_col + 1, "empty class label"));
            }
            return Err(Error::UnknownClassLabel {
                line: line_no,
                label: label.to_string(),
            });
        };

        let index = labels.len();
        match dims {
            None => dims = Some(fields.len()),
            Some(d) if d != fields.len() => {
                return Err(Error::parse(
                    line_no,
                    1,
                    format!("instance has {} dimensions, expected {d}", fields.len()),
                ));
            }
            _ => {}
        }
        for (field_start, field) in fields {
            let mut count = 0;
            let mut offset = field_start;
            for token in field.split(',') {
                let lead = token.len() - token.trim_start().len();
                values.push(parse_value(token, line_no, offset + lead + 1)?);
                offset += token.len() + 1;
                count += 1;
            }
            match length {
                None => length = Some(count),
                Some(l) if l != count => {
                    return Err(Error::UnequalLength {
                        index,
                        expected: l,
                        got: count,
                    });
                }
                _ => {}
            }
        }
        labels.push(class);
    }

    if !in_data {
        return Err(Error::parse(last_line + 1, 1, "missing @data section"));
    }
    let (Some(channels), Some(len)) = (dims, length) else {
        return Err(Error::parse(last_line + 1, 1, "no instances after @data"));
    };
    if let Some((true, line)) = header.univariate {
        if channels != 1 {
            return Err(Error::parse(line, 1, format!("@univariate true but instances have {channels} dimensions")));
        }
    }
    if let Some((d, line)) = header.dimensions {
        if d != channels {
            return Err(Error::parse(line, 1, format!("@dimensions {d} but instances have {channels}")));
        }
    }
    if let Some((l, _)) = header.series_length {
        if l != len {
            return Err(Error::UnequalLength {
                index: 0,
                expected: l,
                got: len,
            });
        }
    }
    let class_names = header.class_labels.unwrap_or_default();
    let id = header.problem_name.unwrap_or_else(|| id.to_string());
    TimeSeriesDataset::new(id, channels, len, values, labels, class_names)
}

/// Parses a single-table file: one instance per line, label first, values
/// separated by tabs (or commas when a line has no tab). Univariate only.
pub fn parse_tsv(text: &str, id: &str) -> Result<TimeSeriesDataset> {
    let mut raw_labels: Vec<String> = Vec::new();
    let mut values = Vec::new();
    let mut length: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let sep = if line.contains('\t') { '\t' } else { ',' };
        let mut offset = 0;
        let mut tokens = line.split(sep).map(|tok| {
            let col = offset + 1;
            offset += tok.len() + 1;
            (col, tok)
        });
        let (_, label) = tokens.next().expect("split yields at least one token");
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::parse(line_no, 1, "empty class label"));
        }
        let mut count = 0;
        for (col, tok) in tokens {
            values.push(parse_value(tok, line_no, col)?);
            count += 1;
        }
        if count == 0 {
            return Err(Error::parse(line_no, line.len() + 1, "instance has no values"));
        }
        match length {
            None => length = Some(count),
            Some(l) if l != count => {
                return Err(Error::UnequalLength {
                    index: raw_labels.len(),
                    expected: l,
                    got: count,
                });
            }
            _ => {}
        }
        raw_labels.push(label.to_string());
    }
    let Some(len) = length else {
        return Err(Error::parse(1, 1, "no instances"));
    };
    let mut class_names = raw_labels.clone();
    class_names.sort_by(|a, b| match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    });
    class_names.dedup();
    let labels = raw_labels
        .iter()
        .map(|l| class_names.iter().position(|c| c == l).expect("collected above"))
        .collect();
    TimeSeriesDataset::new(id, 1, len, values, labels, class_names)
}

fn file_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string())
}

pub fn load_ts(path: impl AsRef<Path>) -> Result<TimeSeriesDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut ds = parse_ts(&text, &file_id(path)).map_err(|e| with_path(e, path))?;
    ds.provenance.source = Some(path.display().to_string());
    Ok(ds)
}

pub fn load_tsv(path: impl AsRef<Path>) -> Result<TimeSeriesDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut ds = parse_tsv(&text, &file_id(path)).map_err(|e| with_path(e, path))?;
    ds.provenance.source = Some(path.display().to_string());
    Ok(ds)
}

/// Dispatches on extension: `.ts` is parsed as `.ts`, anything else as TSV.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<TimeSeriesDataset> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("ts") => load_ts(path),
        _ => load_tsv(path),
    }
}

/// Serializes a dataset as `.ts` text. Values use the shortest decimal form
/// that parses back to the same bits; NaNs are written as `?`.
pub fn write_ts(ds: &TimeSeriesDataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_ts_string(ds))?;
    Ok(())
}

pub(crate) fn to_ts_string(ds: &TimeSeriesDataset) -> String {
    let mut out = String::new();
    let id: String = ds.id.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
    let has_nan = ds.values().iter().any(|v| v.is_nan());
    let _ = writeln!(out, "@problemName {id}");
    let _ = writeln!(out, "@timeStamps false");
    let _ = writeln!(out, "@missing {has_nan}");
    let _ = writeln!(out, "@univariate {}", ds.channels() == 1);
    if ds.channels() > 1 {
        let _ = writeln!(out, "@dimensions {}", ds.channels());
    }
    let _ = writeln!(out, "@equalLength true");
    let _ = writeln!(out, "@seriesLength {}", ds.series_len());
    let _ = writeln!(out, "@classLabel true {}", ds.class_names().join(" "));
    let _ = writeln!(out, "@data");
    let len = ds.series_len();
    for i in 0..ds.n_instances() {
        for row in ds.instance(i).chunks_exact(len) {
            for (t, v) in row.iter().enumerate() {
                if t > 0 {
                    out.push(',');
                }
                if v.is_nan() {
                    out.push('?');
                } else {
                    let _ = write!(out, "{v}");
                }
            }
            out.push(':');
        }
        out.push_str(&ds.class_names()[ds.labels()[i]]);
        out.push('\n');
    }
    out
}
