//! File formats: point clouds (CSV/XYZ/PLY), hole lists (JSON), run
//! configuration (TOML), metric reports (JSON), and per-iteration logs (CSV).
//!
//! Round-trip guarantees: text formats print 17 significant digits, enough
//! to reconstruct every `f64` bit-exactly; the PLY writer emits binary
//! little-endian doubles, so a write/read cycle is bit-exact by
//! construction. The PLY reader accepts ASCII and binary little-endian
//! files, extracts the `x`/`y`/`z` vertex properties, and skips everything
//! else. Parse errors name the file plus the offending line (text) or byte
//! offset (binary) and map to process exit code 2; genuine I/O failures map
//! to exit code 4.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::holes::{validate_holes, HoleSpec};
use crate::metrics::MetricsReport;
use crate::mlop::{OptimizerConfig, RunLog, SketchMode};
use crate::rmlop::RepairConfig;
use crate::synth::{GeneratorSpec, SurfaceKind};

/// Environment variable that overrides the config-file seed (but not an
/// explicit `--seed` flag).
pub const SEED_ENV_VAR: &str = "MANIFOLD_REPAIR_SEED";

/// Supported point-cloud file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    /// One point per line, coordinates separated by commas and/or spaces.
    Csv,
    /// One point per line, coordinates separated by whitespace.
    Xyz,
    /// Polygon file format; ASCII or binary little-endian on read, binary
    /// little-endian doubles on write. Only the vertex positions are used.
    Ply,
}

impl CloudFormat {
    /// Parses a user-facing format name (`csv`, `xyz`, `ply`).
    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "csv" => Ok(CloudFormat::Csv),
            "xyz" => Ok(CloudFormat::Xyz),
            "ply" => Ok(CloudFormat::Ply),
            other => Err(Error::invalid(format!(
                "unknown cloud format '{other}' (expected csv, xyz, or ply)"
            ))),
        }
    }

    /// Infers the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .unwrap_or_default();
        match ext.as_str() {
            "csv" => Ok(CloudFormat::Csv),
            "xyz" | "txt" => Ok(CloudFormat::Xyz),
            "ply" => Ok(CloudFormat::Ply),
            _ => Err(Error::invalid(format!(
                "cannot infer cloud format from '{}'; pass --format",
                path.display()
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

/// Reads a point cloud, inferring the format from the extension when
/// `format` is `None`. The ambient dimension of text files is inferred from
/// the first data line and enforced on every following line.
pub fn read_cloud(path: &Path, format: Option<CloudFormat>) -> Result<PointCloud> {
    let format = match format {
        Some(f) => f,
        None => CloudFormat::from_path(path)?,
    };
    match format {
        CloudFormat::Csv | CloudFormat::Xyz => read_text_cloud(path),
        CloudFormat::Ply => read_ply_cloud(path),
    }
}

/// Writes a point cloud. PLY output requires ambient dimension 3 unless
/// `ply_project3` is set, in which case the first three coordinates are
/// written and the rest dropped.
pub fn write_cloud(
    cloud: &PointCloud,
    path: &Path,
    format: Option<CloudFormat>,
    ply_project3: bool,
) -> Result<()> {
    let format = match format {
        Some(f) => f,
        None => CloudFormat::from_path(path)?,
    };
    match format {
        CloudFormat::Csv => write_text_cloud(cloud, path, ","),
        CloudFormat::Xyz => write_text_cloud(cloud, path, " "),
        CloudFormat::Ply => write_ply_cloud(cloud, path, ply_project3),
    }
}

fn read_text_cloud(path: &Path) -> Result<PointCloud> {
    let text = fs::read_to_string(path)?;
    let name = path.display().to_string();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut dim: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for token in trimmed.split(',').flat_map(str::split_whitespace) {
            let value: f64 = token.parse().map_err(|_| {
                Error::parse(&name, format!("line {lineno}: invalid number '{token}'"))
            })?;
            row.push(value);
        }
        if row.is_empty() {
            return Err(Error::parse(&name, format!("line {lineno}: no coordinates")));
        }
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::parse(
                    &name,
                    format!("line {lineno}: expected {d} coordinates, got {}", row.len()),
                ))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(&name, "no points found".to_string()));
    }
    PointCloud::from_rows(&rows).map_err(|e| Error::parse(&name, e.to_string()))
}

fn write_text_cloud(cloud: &PointCloud, path: &Path, sep: &str) -> Result<()> {
    let mut out = String::with_capacity(cloud.count() * cloud.ambient_dim() * 24);
    for p in cloud.iter_points() {
        let fields: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&fields.join(sep));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlyEncoding {
    Ascii,
    BinaryLe,
}

#[derive(Debug, Clone)]
struct PlyProperty {
    name: String,
    /// Size in bytes of the scalar type; `None` for list properties.
    scalar_size: Option<usize>,
    is_float: bool,
    is_double: bool,
}

#[derive(Debug, Clone)]
struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<PlyProperty>,
}

fn ply_scalar_size(type_name: &str) -> Option<usize> {
    match type_name {
        "char" | "uchar" | "int8" | "uint8" => Some(1),
        "short" | "ushort" | "int16" | "uint16" => Some(2),
        "int" | "uint" | "int32" | "uint32" | "float" | "float32" => Some(4),
        "double" | "float64" => Some(8),
        _ => None,
    }
}

fn read_ply_cloud(path: &Path) -> Result<PointCloud> {
    let bytes = fs::read(path)?;
    let name = path.display().to_string();

    // The header is ASCII text terminated by an `end_header` line; find its
    // end without assuming the payload is valid UTF-8.
    let header_end = find_ply_header_end(&bytes)
        .ok_or_else(|| Error::parse(&name, "missing end_header".to_string()))?;
    let header_text = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| Error::parse(&name, "header is not valid ASCII".to_string()))?;

    let mut lines = header_text.lines();
    if lines.next().map(str::trim) != Some("ply") {
        return Err(Error::parse(&name, "missing 'ply' magic line".to_string()));
    }

    let mut encoding: Option<PlyEncoding> = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with("comment") || line.starts_with("obj_info") {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.first().copied() {
            Some("format") => {
                encoding = Some(match tokens.get(1).copied() {
                    Some("ascii") => PlyEncoding::Ascii,
                    Some("binary_little_endian") => PlyEncoding::BinaryLe,
                    Some(other) => {
                        return Err(Error::parse(
                            &name,
                            format!("unsupported ply format '{other}'"),
                        ))
                    }
                    None => return Err(Error::parse(&name, "malformed format line".to_string())),
                });
            }
            Some("element") => {
                let (el_name, count) = match (tokens.get(1), tokens.get(2)) {
                    (Some(n), Some(c)) => (n.to_string(), c),
                    _ => return Err(Error::parse(&name, "malformed element line".to_string())),
                };
                let count: usize = count.parse().map_err(|_| {
                    Error::parse(&name, format!("invalid element count '{count}'"))
                })?;
                elements.push(PlyElement {
                    name: el_name,
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements.last_mut().ok_or_else(|| {
                    Error::parse(&name, "property before any element".to_string())
                })?;
                if tokens.get(1) == Some(&"list") {
                    element.properties.push(PlyProperty {
                        name: tokens.last().unwrap_or(&"").to_string(),
                        scalar_size: None,
                        is_float: false,
                        is_double: false,
                    });
                } else {
                    let (type_name, prop_name) = match (tokens.get(1), tokens.get(2)) {
                        (Some(t), Some(p)) => (*t, *p),
                        _ => {
                            return Err(Error::parse(&name, "malformed property line".to_string()))
                        }
                    };
                    let size = ply_scalar_size(type_name).ok_or_else(|| {
                        Error::parse(&name, format!("unknown property type '{type_name}'"))
                    })?;
                    element.properties.push(PlyProperty {
                        name: prop_name.to_string(),
                        scalar_size: Some(size),
                        is_float: matches!(type_name, "float" | "float32"),
                        is_double: matches!(type_name, "double" | "float64"),
                    });
                }
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(Error::parse(&name, format!("unknown header keyword '{other}'")))
            }
            None => continue,
        }
    }
    let encoding =
        encoding.ok_or_else(|| Error::parse(&name, "missing format line".to_string()))?;
    let vertex_pos = elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| Error::parse(&name, "no vertex element".to_string()))?;

    // Locate x/y/z among the vertex properties; they must be float or double
    // scalars. List properties inside the vertex element make fixed-stride
    // decoding impossible, so reject them.
    let vertex = &elements[vertex_pos];
    let mut xyz = [usize::MAX; 3];
    for (idx, prop) in vertex.properties.iter().enumerate() {
        if prop.scalar_size.is_none() {
            return Err(Error::parse(
                &name,
                format!("list property '{}' in vertex element is unsupported", prop.name),
            ));
        }
        match prop.name.as_str() {
            "x" => xyz[0] = idx,
            "y" => xyz[1] = idx,
            "z" => xyz[2] = idx,
            _ => {}
        }
    }
    for (axis, pos) in ["x", "y", "z"].iter().zip(xyz) {
        if pos == usize::MAX {
            return Err(Error::parse(&name, format!("vertex element lacks property '{axis}'")));
        }
        let p = &vertex.properties[pos];
        if !(p.is_float || p.is_double) {
            return Err(Error::parse(
                &name,
                format!("vertex property '{axis}' must be float or double"),
            ));
        }
    }

    match encoding {
        PlyEncoding::Ascii => {
            let body = std::str::from_utf8(&bytes[header_end..])
                .map_err(|_| Error::parse(&name, "ascii body is not valid text".to_string()))?;
            read_ply_ascii(body, &elements, vertex_pos, xyz, &name)
        }
        PlyEncoding::BinaryLe => read_ply_binary(&bytes[header_end..], &elements, vertex_pos, xyz, &name),
    }
}

/// Byte offset one past the newline that terminates the `end_header` line.
fn find_ply_header_end(bytes: &[u8]) -> Option<usize> {
    let needle = b"end_header";
    let mut line_start = 0;
    while line_start < bytes.len() {
        let line_end = bytes[line_start..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|p| line_start + p)?;
        let line = &bytes[line_start..line_end];
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.trim_ascii() == needle {
            return Some(line_end + 1);
        }
        line_start = line_end + 1;
    }
    None
}

fn read_ply_ascii(
    body: &str,
    elements: &[PlyElement],
    vertex_pos: usize,
    xyz: [usize; 3],
    name: &str,
) -> Result<PointCloud> {
    let mut lines = body.lines().filter(|l| !l.trim().is_empty());
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for (pos, element) in elements.iter().enumerate() {
        if pos != vertex_pos {
            // Non-vertex elements are one line per row in ASCII; skip them.
            for _ in 0..element.count {
                lines.next().ok_or_else(|| {
                    Error::parse(name, format!("unexpected end of file in element '{}'", element.name))
                })?;
            }
            continue;
        }
        rows.reserve(element.count);
        for row_idx in 0..element.count {
            let line = lines.next().ok_or_else(|| {
                Error::parse(name, format!("expected {} vertices, file ends at {row_idx}", element.count))
            })?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < element.properties.len() {
                return Err(Error::parse(
                    name,
                    format!(
                        "vertex {row_idx}: expected {} fields, got {}",
                        element.properties.len(),
                        fields.len()
                    ),
                ));
            }
            let mut p = [0.0f64; 3];
            for (axis, field_idx) in xyz.iter().enumerate() {
                p[axis] = fields[*field_idx].parse().map_err(|_| {
                    Error::parse(
                        name,
                        format!("vertex {row_idx}: invalid number '{}'", fields[*field_idx]),
                    )
                })?;
            }
            rows.push(p);
        }
        // Elements after the vertex block are ignored.
        break;
    }
    finish_ply_rows(rows, name)
}

fn read_ply_binary(
    body: &[u8],
    elements: &[PlyElement],
    vertex_pos: usize,
    xyz: [usize; 3],
    name: &str,
) -> Result<PointCloud> {
    let mut offset = 0usize;
    for element in &elements[..vertex_pos] {
        // Binary pre-vertex elements can only be skipped when every property
        // has a fixed size; lists make the stride data-dependent.
        let mut stride = 0usize;
        for prop in &element.properties {
            stride += prop.scalar_size.ok_or_else(|| {
                Error::parse(
                    name,
                    format!(
                        "cannot skip binary element '{}' with list property '{}'",
                        element.name, prop.name
                    ),
                )
            })?;
        }
        offset = offset.saturating_add(stride.saturating_mul(element.count));
    }

    let vertex = &elements[vertex_pos];
    let sizes: Vec<usize> = vertex
        .properties
        .iter()
        .map(|p| p.scalar_size.expect("vertex list properties rejected earlier"))
        .collect();
    let stride: usize = sizes.iter().sum();
    let needed = stride
        .checked_mul(vertex.count)
        .and_then(|n| n.checked_add(offset))
        .ok_or_else(|| Error::parse(name, "vertex count overflows".to_string()))?;
    if body.len() < needed {
        return Err(Error::parse(
            name,
            format!(
                "truncated vertex data: need {needed} bytes after header, found {}",
                body.len()
            ),
        ));
    }

    // Byte offset of each coordinate within a vertex record.
    let mut field_offsets = vec![0usize; sizes.len()];
    for i in 1..sizes.len() {
        field_offsets[i] = field_offsets[i - 1] + sizes[i - 1];
    }

    let mut rows: Vec<[f64; 3]> = Vec::with_capacity(vertex.count);
    for row_idx in 0..vertex.count {
        let base = offset + row_idx * stride;
        let mut p = [0.0f64; 3];
        for (axis, &field_idx) in xyz.iter().enumerate() {
            let prop = &vertex.properties[field_idx];
            let at = base + field_offsets[field_idx];
            p[axis] = if prop.is_double {
                f64::from_le_bytes(body[at..at + 8].try_into().unwrap())
            } else {
                f64::from(f32::from_le_bytes(body[at..at + 4].try_into().unwrap()))
            };
        }
        rows.push(p);
    }
    finish_ply_rows(rows, name)
}

fn finish_ply_rows(rows: Vec<[f64; 3]>, name: &str) -> Result<PointCloud> {
    if rows.is_empty() {
        return Err(Error::parse(name, "no vertices found".to_string()));
    }
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.to_vec()).collect();
    PointCloud::from_rows(&rows).map_err(|e| Error::parse(name, e.to_string()))
}

fn write_ply_cloud(cloud: &PointCloud, path: &Path, project3: bool) -> Result<()> {
    let n = cloud.ambient_dim();
    if n < 3 {
        return Err(Error::invalid(format!(
            "ply output needs ambient dimension >= 3, cloud has {n}"
        )));
    }
    if n > 3 && !project3 {
        return Err(Error::invalid(format!(
            "ply output is 3-d but the cloud has ambient dimension {n}; \
             pass --ply-project3 to keep the first three coordinates"
        )));
    }
    let mut bytes = Vec::with_capacity(128 + cloud.count() * 24);
    bytes.extend_from_slice(
        format!(
            "ply\nformat binary_little_endian 1.0\ncomment manifold-repair {}\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nend_header\n",
            version_string(),
            cloud.count()
        )
        .as_bytes(),
    );
    for p in cloud.iter_points() {
        for &v in &p[..3] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Holes (JSON)
// ---------------------------------------------------------------------------

/// Reads a JSON array of `{"center": [...], "radius": r}` hole specs and
/// validates each entry.
pub fn read_holes(path: &Path) -> Result<Vec<HoleSpec>> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path)?;
    let holes: Vec<HoleSpec> = serde_json::from_str(&text)
        .map_err(|e| Error::parse(&name, e.to_string()))?;
    for (k, hole) in holes.iter().enumerate() {
        hole.validate(None)
            .map_err(|e| Error::parse(&name, format!("holes[{k}]: {e}")))?;
    }
    Ok(holes)
}

/// Writes hole specs as pretty-printed JSON.
pub fn write_holes(holes: &[HoleSpec], path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(holes)
        .map_err(|e| Error::invalid(format!("cannot serialize holes: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Run configuration (TOML)
// ---------------------------------------------------------------------------

/// Where the input cloud comes from when reading a file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    /// Path of the cloud file.
    pub path: String,
    /// Optional explicit format (`csv`, `xyz`, `ply`); inferred otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

/// Synthetic-surface source. `kind` picks the family; the optional geometry
/// fields default to the values used throughout the test suite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    /// Surface family: `cylinder2d`, `cylinder6d`, `cone`, `circle`,
    /// `disk`, `annulus`, or `plane`.
    pub kind: String,
    /// Number of sample points.
    pub count: usize,
    /// Uniform noise amplitude `a` (`U(−a, a)` per coordinate). Default 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    /// Radius for `cylinder2d`, `cylinder6d`, `circle`, `disk`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Inner radius for `annulus`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
    /// Outer radius for `annulus`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<f64>,
    /// Width for `plane`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    /// Height for `plane`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    /// Ambient dimension; defaults to 60 for the cylinder/cone families and
    /// 2 for the planar ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<usize>,
    /// Punch these holes out of the generated cloud (rejection sampling).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub punch: Vec<HoleSpec>,
}

/// Optimizer overrides; unset fields keep [`OptimizerConfig`] defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    /// Number of projected points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_count: Option<usize>,
    /// Iteration cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    /// Early-stop threshold on the median gradient norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    /// `"auto"`, `"off"`, or an explicit sketch dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sketch: Option<SketchSetting>,
    /// Step clip as a multiple of `h2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_clip: Option<f64>,
    /// Log every k-th iteration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_every: Option<usize>,
}

/// Repair overrides; unset fields keep [`RepairConfig`] defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepairSection {
    /// Run the pre-repair smoothing pass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prepass: Option<bool>,
    /// Iterations of the smoothing pass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prepass_iters: Option<usize>,
    /// Neighborhood fraction treated as fully inside a hole.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_nb: Option<f64>,
    /// Use the literal published balance constants instead of reciprocals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal_ck: Option<bool>,
    /// Combine multi-hole weights by the literal min/max rule everywhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal_multihole: Option<bool>,
    /// Grid density per hole axis for coverage tracking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage_grid_density: Option<usize>,
}

/// Metric-report options.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    /// Analytic surface to measure distance-to-truth against; one of the
    /// generator kind names. Defaults to the generator section's surface.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    /// Coverage grid density override for the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_density: Option<usize>,
}

/// Sketch option in config files: the strings `auto`/`off` or an explicit
/// dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SketchSetting {
    /// `"auto"` or `"off"`.
    Named(String),
    /// Explicit sketch dimension.
    Dim(usize),
}

impl SketchSetting {
    /// Converts to the optimizer's sketch mode.
    pub fn to_mode(&self) -> Result<SketchMode> {
        match self {
            SketchSetting::Named(s) => match s.to_ascii_lowercase().as_str() {
                "auto" => Ok(SketchMode::Auto),
                "off" | "none" | "disabled" => Ok(SketchMode::Disabled),
                other => Err(Error::invalid(format!(
                    "sketch must be 'auto', 'off', or a dimension, got '{other}'"
                ))),
            },
            SketchSetting::Dim(m) => Ok(SketchMode::Fixed(*m)),
        }
    }
}

/// A full run description: one input source, optional holes, optimizer and
/// repair settings, and report options.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Base RNG seed; overridden by `MANIFOLD_REPAIR_SEED` and `--seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory or file prefix (CLI-dependent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Read the input cloud from a file. Exactly one of `input`/`generator`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSection>,
    /// Generate the input cloud synthetically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSection>,
    /// Inline hole list; mutually exclusive with `holes_path`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holes: Option<Vec<HoleSpec>>,
    /// Read holes from this JSON file instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holes_path: Option<String>,
    /// Optimizer settings.
    #[serde(default)]
    pub optimizer: OptimizerSection,
    /// Repair settings.
    #[serde(default)]
    pub repair: RepairSection,
    /// Report settings.
    #[serde(default)]
    pub metrics: MetricsSection,
}

impl RunConfig {
    /// Structural checks beyond what serde enforces.
    pub fn validate(&self) -> Result<()> {
        match (&self.input, &self.generator) {
            (Some(_), Some(_)) => {
                return Err(Error::invalid(
                    "config sets both [input] and [generator]; pick one source",
                ))
            }
            (None, None) => {
                return Err(Error::invalid(
                    "config needs an input source: add [input] or [generator]",
                ))
            }
            _ => {}
        }
        if let Some(input) = &self.input {
            if input.path.is_empty() {
                return Err(Error::invalid("input.path must not be empty"));
            }
            if let Some(fmt) = &input.format {
                CloudFormat::from_name(fmt)?;
            }
        }
        if self.holes.is_some() && self.holes_path.is_some() {
            return Err(Error::invalid(
                "config sets both inline holes and holes_path; pick one",
            ));
        }
        if let Some(gen) = &self.generator {
            gen.surface_kind()?;
        }
        if let Some(sketch) = &self.optimizer.sketch {
            sketch.to_mode()?;
        }
        self.oracle_kind()?;
        Ok(())
    }

    /// Loads the cloud from the configured source.
    pub fn load_cloud(&self, base_seed: u64) -> Result<PointCloud> {
        if let Some(input) = &self.input {
            let format = input
                .format
                .as_deref()
                .map(CloudFormat::from_name)
                .transpose()?;
            return read_cloud(Path::new(&input.path), format);
        }
        let gen = self
            .generator
            .as_ref()
            .ok_or_else(|| Error::invalid("config has no input source"))?;
        crate::synth::generate(&gen.to_spec(base_seed)?)
    }

    /// Loads the hole list (inline, from file, or empty) and checks it
    /// against the cloud's ambient dimension.
    pub fn load_holes(&self, cloud: &PointCloud) -> Result<Vec<HoleSpec>> {
        let holes = if let Some(inline) = &self.holes {
            inline.clone()
        } else if let Some(path) = &self.holes_path {
            read_holes(Path::new(path))?
        } else {
            Vec::new()
        };
        validate_holes(&holes, cloud)?;
        Ok(holes)
    }

    /// Builds the optimizer configuration. `q_count` must come from the
    /// config or the caller's override.
    pub fn optimizer_config(&self, q_override: Option<usize>, seed: u64) -> Result<OptimizerConfig> {
        let q_count = q_override.or(self.optimizer.q_count).ok_or_else(|| {
            Error::invalid("q_count is required (set optimizer.q_count or pass --q-count)")
        })?;
        let mut config = OptimizerConfig::new(q_count);
        config.seed = seed;
        if let Some(v) = self.optimizer.max_iters {
            config.max_iters = v;
        }
        if let Some(v) = self.optimizer.grad_tol {
            config.grad_tol = v;
        }
        if let Some(s) = &self.optimizer.sketch {
            config.sketch = s.to_mode()?;
        }
        if let Some(v) = self.optimizer.step_clip {
            config.step_clip = v;
        }
        if let Some(v) = self.optimizer.log_every {
            config.log_every = v;
        }
        config.validate()?;
        Ok(config)
    }

    /// Builds the repair configuration on top of [`Self::optimizer_config`].
    pub fn repair_config(&self, q_override: Option<usize>, seed: u64) -> Result<RepairConfig> {
        let base = self.optimizer_config(q_override, seed)?;
        let mut config = RepairConfig::new(base);
        if let Some(v) = self.repair.prepass {
            config.prepass = v;
        }
        if let Some(v) = self.repair.prepass_iters {
            config.prepass_iters = v;
        }
        if let Some(v) = self.repair.eps_nb {
            config.eps_nb = v;
        }
        if let Some(v) = self.repair.literal_ck {
            config.literal_ck = v;
        }
        if let Some(v) = self.repair.literal_multihole {
            config.literal_multihole = v;
        }
        if let Some(v) = self.repair.coverage_grid_density {
            config.coverage_grid_density = v;
        }
        Ok(config)
    }

    /// Analytic oracle surface for distance-to-truth, if requested. With
    /// `metrics.oracle` unset, a generator-sourced run measures against its
    /// own surface; file-sourced runs have no oracle.
    pub fn oracle_kind(&self) -> Result<Option<SurfaceKind>> {
        match (&self.metrics.oracle, &self.generator) {
            (Some(name), Some(gen)) if *name == gen.kind => Ok(Some(gen.surface_kind()?)),
            (Some(name), _) => Ok(Some(surface_kind_from_name(name, &GeneratorSection {
                kind: name.clone(),
                count: 1,
                ..GeneratorSection::default()
            })?)),
            (None, Some(gen)) => Ok(Some(gen.surface_kind()?)),
            (None, None) => Ok(None),
        }
    }
}

impl GeneratorSection {
    /// Resolves the surface family with per-kind defaults.
    pub fn surface_kind(&self) -> Result<SurfaceKind> {
        surface_kind_from_name(&self.kind, self)
    }

    /// Builds the full generator spec (seed, noise, punched holes).
    pub fn to_spec(&self, seed: u64) -> Result<GeneratorSpec> {
        Ok(GeneratorSpec {
            kind: self.surface_kind()?,
            count: self.count,
            noise: self.noise.unwrap_or(0.0),
            seed,
            holes: self.punch.clone(),
        })
    }
}

fn surface_kind_from_name(name: &str, sec: &GeneratorSection) -> Result<SurfaceKind> {
    let high_dim = sec.ambient.unwrap_or(60);
    let planar = sec.ambient.unwrap_or(2);
    Ok(match name.to_ascii_lowercase().as_str() {
        "cylinder2d" => SurfaceKind::Cylinder2d {
            radius: sec.radius.unwrap_or(2f64.sqrt()),
            ambient: high_dim,
        },
        "cylinder6d" => SurfaceKind::Cylinder6d {
            radius: sec.radius.unwrap_or(1.5),
            ambient: high_dim,
        },
        "cone" => SurfaceKind::Cone { ambient: high_dim },
        "circle" => SurfaceKind::Circle {
            radius: sec.radius.unwrap_or(1.0),
            ambient: planar,
        },
        "disk" => SurfaceKind::Disk {
            radius: sec.radius.unwrap_or(1.0),
            ambient: planar,
        },
        "annulus" => SurfaceKind::Annulus {
            inner: sec.inner.unwrap_or(0.5),
            outer: sec.outer.unwrap_or(1.0),
            ambient: planar,
        },
        "plane" => SurfaceKind::PlanePatch {
            width: sec.width.unwrap_or(1.0),
            height: sec.height.unwrap_or(1.0),
            ambient: planar,
        },
        other => {
            return Err(Error::invalid(format!(
                "unknown surface kind '{other}' (expected cylinder2d, cylinder6d, \
                 cone, circle, disk, annulus, or plane)"
            )))
        }
    })
}

/// Reads and validates a TOML run configuration.
pub fn read_config(path: &Path) -> Result<RunConfig> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path)?;
    let config: RunConfig =
        toml::from_str(&text).map_err(|e| Error::parse(&name, e.to_string()))?;
    config
        .validate()
        .map_err(|e| Error::parse(&name, e.to_string()))?;
    Ok(config)
}

/// Resolves the effective seed: CLI flag, then `MANIFOLD_REPAIR_SEED`, then
/// the config value, then 0.
pub fn resolve_seed(cli: Option<u64>, config_seed: Option<u64>) -> Result<u64> {
    if let Some(s) = cli {
        return Ok(s);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::invalid(format!("{SEED_ENV_VAR} must be an unsigned integer, got '{text}'"))
        }),
        Err(_) => Ok(config_seed.unwrap_or(0)),
    }
}

// ---------------------------------------------------------------------------
// Reports and logs
// ---------------------------------------------------------------------------

/// On-disk report: the metrics plus an echo of the run configuration and
/// the build version.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    /// Build identifier (`git describe` when built from a checkout).
    pub version: String,
    /// Echo of the run configuration that produced the metrics.
    pub config: serde_json::Value,
    /// The measured metrics.
    pub metrics: MetricsReport,
}

/// Build identifier embedded at compile time.
pub fn version_string() -> &'static str {
    env!("MANIFOLD_REPAIR_GIT_VERSION")
}

/// Writes a metrics report as pretty JSON with a config echo and version.
pub fn write_report(metrics: &MetricsReport, config: &RunConfig, path: &Path) -> Result<()> {
    let doc = ReportDocument {
        version: version_string().to_string(),
        config: serde_json::to_value(config)
            .map_err(|e| Error::invalid(format!("cannot serialize config: {e}")))?,
        metrics: metrics.clone(),
    };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::invalid(format!("cannot serialize report: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Reads a report document back (round-trip check, tooling).
pub fn read_report(path: &Path) -> Result<ReportDocument> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::parse(&name, e.to_string()))
}

/// Writes the per-iteration log as CSV.
pub fn write_run_log_csv(log: &RunLog, path: &Path) -> Result<()> {
    fs::write(path, log.to_csv())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;
    use tempfile::tempdir;

    fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &[u8]) -> std::path::PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn csv_reads_commas_and_whitespace() {
        let dir = tempdir().unwrap();
        let path = write_temp(&dir, "c.csv", b"0,0\n1.5, 2.5\n# note\n\n3 4\n");
        let cloud = read_cloud(&path, None).unwrap();
        assert_eq!(cloud.count(), 3);
        assert_eq!(cloud.ambient_dim(), 2);
        assert_eq!(cloud.point(1), &[1.5, 2.5]);
        assert_eq!(cloud.point(2), &[3.0, 4.0]);
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let dir = tempdir().unwrap();
        let path = write_temp(&dir, "c.csv", b"0,0,0\n1,1\n");
        let err = read_cloud(&path, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn bad_numbers_name_the_line_and_token() {
        let dir = tempdir().unwrap();
        let path = write_temp(&dir, "c.xyz", b"0 0 0\n1 frog 1\n");
        let err = read_cloud(&path, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("frog"), "{msg}");
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        let dir = tempdir().unwrap();
        let path = write_temp(&dir, "c.csv", b"\n# only comments\n");
        let err = read_cloud(&path, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let dir = tempdir().unwrap();
        let mut rng = DeterministicRng::new(11, 4);
        let coords: Vec<f64> = (0..60).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
        let cloud = PointCloud::from_flat(coords, 5).unwrap();
        for (name, fmt) in [("r.csv", CloudFormat::Csv), ("r.xyz", CloudFormat::Xyz)] {
            let path = dir.path().join(name);
            write_cloud(&cloud, &path, Some(fmt), false).unwrap();
            let back = read_cloud(&path, Some(fmt)).unwrap();
            assert_eq!(back.as_flat(), cloud.as_flat(), "{name} round trip");
        }
    }

    #[test]
    fn ascii_ply_parses_and_skips_extra_properties() {
        let dir = tempdir().unwrap();
        let text = "ply\nformat ascii 1.0\ncomment test\nelement vertex 2\n\
                    property float x\nproperty float y\nproperty float z\n\
                    property uchar red\nend_header\n1 2 3 255\n4 5 6 0\n";
        let path = write_temp(&dir, "a.ply", text.as_bytes());
        let cloud = read_cloud(&path, None).unwrap();
        assert_eq!(cloud.count(), 2);
        assert_eq!(cloud.point(0), &[1.0, 2.0, 3.0]);
        assert_eq!(cloud.point(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn ascii_ply_skips_leading_elements_and_ignores_trailing_ones() {
        let dir = tempdir().unwrap();
        let text = "ply\nformat ascii 1.0\nelement info 1\nproperty int id\n\
                    element vertex 1\nproperty double x\nproperty double y\n\
                    property double z\nelement face 1\nproperty list uchar int vertex_indices\n\
                    end_header\n7\n0.5 -1.5 2.25\n3 0 0 0\n";
        let path = write_temp(&dir, "b.ply", text.as_bytes());
        let cloud = read_cloud(&path, None).unwrap();
        assert_eq!(cloud.count(), 1);
        assert_eq!(cloud.point(0), &[0.5, -1.5, 2.25]);
    }

    #[test]
    fn binary_ply_round_trip_is_bit_exact() {
        let dir = tempdir().unwrap();
        let mut rng = DeterministicRng::new(5, 4);
        let coords: Vec<f64> = (0..30).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let cloud = PointCloud::from_flat(coords, 3).unwrap();
        let path = dir.path().join("r.ply");
        write_cloud(&cloud, &path, Some(CloudFormat::Ply), false).unwrap();
        let back = read_cloud(&path, None).unwrap();
        assert_eq!(back.as_flat(), cloud.as_flat());
    }

    #[test]
    fn binary_ply_reads_float_vertices_and_skips_padding() {
        // Vertex layout: float x, float y, float z, uchar tag.
        let mut bytes = Vec::new();
        bytes.extend_from_slice(
            b"ply\nformat binary_little_endian 1.0\nelement vertex 2\n\
              property float x\nproperty float y\nproperty float z\n\
              property uchar tag\nend_header\n",
        );
        for (p, tag) in [([1.0f32, 2.0, 3.0], 7u8), ([-0.5, 0.25, 8.0], 9)] {
            for v in p {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            bytes.push(tag);
        }
        let dir = tempdir().unwrap();
        let path = write_temp(&dir, "f.ply", &bytes);
        let cloud = read_cloud(&path, None).unwrap();
        assert_eq!(cloud.point(0), &[1.0, 2.0, 3.0]);
        assert_eq!(cloud.point(1), &[-0.5, 0.25, 8.0]);
    }

    #[test]
    fn truncated_binary_ply_is_a_parse_error_not_a_panic() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(
            b"ply\nformat binary_little_endian 1.0\nelement vertex 3\n\
              property double x\nproperty double y\nproperty double z\nend_header\n",
        );
        bytes.extend_from_slice(&1.0f64.to_le_bytes()); // far too short
        let dir = tempdir().unwrap();
        let path = write_temp(&dir, "t.ply", &bytes);
        let err = read_cloud(&path, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn ply_rejects_list_property_in_vertex_element() {
        let dir = tempdir().unwrap();
        let text = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n\
                    property float y\nproperty float z\n\
                    property list uchar float extras\nend_header\n1 2 3 0\n";
        let path = write_temp(&dir, "l.ply", text.as_bytes());
        let err = read_cloud(&path, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("list property"), "{err}");
    }

    #[test]
    fn ply_write_requires_three_dims_unless_projected() {
        let dir = tempdir().unwrap();
        let cloud =
            PointCloud::from_flat((0..12).map(|i| i as f64).collect(), 6).unwrap();
        let path = dir.path().join("p.ply");
        let err = write_cloud(&cloud, &path, Some(CloudFormat::Ply), false).unwrap_err();
        assert_eq!(err.exit_code(), 2);

        write_cloud(&cloud, &path, Some(CloudFormat::Ply), true).unwrap();
        let back = read_cloud(&path, None).unwrap();
        assert_eq!(back.ambient_dim(), 3);
        assert_eq!(back.point(1), &cloud.point(1)[..3]);
    }

    #[test]
    fn holes_json_round_trips_and_validates() {
        let dir = tempdir().unwrap();
        let holes = vec![
            HoleSpec::new(vec![0.0, 1.0], 0.5).unwrap(),
            HoleSpec::new(vec![2.0, -1.0], 1.25).unwrap(),
        ];
        let path = dir.path().join("h.json");
        write_holes(&holes, &path).unwrap();
        let back = read_holes(&path).unwrap();
        assert_eq!(back, holes);

        let bad = write_temp(&dir, "bad.json", br#"[{"center": [0, 0], "radius": -1}]"#);
        let err = read_holes(&bad).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("holes[0]"), "{err}");

        let not_array = write_temp(&dir, "na.json", br#"{"center": [0,0], "radius": 1}"#);
        assert_eq!(read_holes(&not_array).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn config_parses_with_defaults_and_builds_configs() {
        let dir = tempdir().unwrap();
        let text = "seed = 9\n[generator]\nkind = \"annulus\"\ncount = 300\n\
                    inner = 1.4\nouter = 4.0\n[optimizer]\nq_count = 120\n\
                    max_iters = 5\nsketch = \"off\"\n[repair]\nprepass_iters = 3\n";
        let path = write_temp(&dir, "run.toml", text.as_bytes());
        let config = read_config(&path).unwrap();
        assert_eq!(config.seed, Some(9));
        let kind = config.generator.as_ref().unwrap().surface_kind().unwrap();
        assert_eq!(
            kind,
            SurfaceKind::Annulus { inner: 1.4, outer: 4.0, ambient: 2 }
        );
        let opt = config.optimizer_config(None, 9).unwrap();
        assert_eq!(opt.q_count, 120);
        assert_eq!(opt.max_iters, 5);
        assert_eq!(opt.sketch, SketchMode::Disabled);
        let rep = config.repair_config(None, 9).unwrap();
        assert_eq!(rep.prepass_iters, 3);
        assert!(rep.prepass);
        // Oracle defaults to the generator surface.
        assert_eq!(config.oracle_kind().unwrap(), Some(kind));
    }

    #[test]
    fn config_sketch_accepts_integer_dimension() {
        let config: RunConfig = toml::from_str(
            "[generator]\nkind = \"circle\"\ncount = 10\n[optimizer]\nq_count = 5\nsketch = 12\n",
        )
        .unwrap();
        let opt = config.optimizer_config(None, 0).unwrap();
        assert_eq!(opt.sketch, SketchMode::Fixed(12));
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_sources() {
        let dir = tempdir().unwrap();
        for (name, text) in [
            ("unknown.toml", "[generator]\nkind = \"disk\"\ncount = 5\nfrobnicate = 1\n"),
            (
                "both.toml",
                "[input]\npath = \"a.csv\"\n[generator]\nkind = \"disk\"\ncount = 5\n",
            ),
            ("neither.toml", "seed = 1\n"),
            ("badkind.toml", "[generator]\nkind = \"torus\"\ncount = 5\n"),
        ] {
            let path = write_temp(&dir, name, text.as_bytes());
            let err = read_config(&path).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{name} should be rejected");
        }
    }

    #[test]
    fn seed_resolution_prefers_cli_then_env_then_config() {
        // All env cases live in one test: Rust runs tests in parallel and
        // the variable is process-global.
        std::env::remove_var(SEED_ENV_VAR);
        assert_eq!(resolve_seed(Some(3), Some(7)).unwrap(), 3);
        assert_eq!(resolve_seed(None, Some(7)).unwrap(), 7);
        assert_eq!(resolve_seed(None, None).unwrap(), 0);
        std::env::set_var(SEED_ENV_VAR, "42");
        assert_eq!(resolve_seed(None, Some(7)).unwrap(), 42);
        assert_eq!(resolve_seed(Some(3), Some(7)).unwrap(), 3);
        std::env::set_var(SEED_ENV_VAR, "pony");
        assert!(resolve_seed(None, None).is_err());
        std::env::remove_var(SEED_ENV_VAR);
    }

    #[test]
    fn generated_cloud_comes_from_config() {
        let config: RunConfig = toml::from_str(
            "[generator]\nkind = \"circle\"\ncount = 40\nradius = 2.0\nambient = 3\n",
        )
        .unwrap();
        config.validate().unwrap();
        let cloud = config.load_cloud(5).unwrap();
        assert_eq!(cloud.count(), 40);
        assert_eq!(cloud.ambient_dim(), 3);
        for p in cloud.iter_points() {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 2.0).abs() < 1e-9);
            assert_eq!(p[2], 0.0);
        }
    }

    #[test]
    fn report_round_trips_with_version_and_config_echo() {
        let dir = tempdir().unwrap();
        let config: RunConfig =
            toml::from_str("[generator]\nkind = \"disk\"\ncount = 5\n").unwrap();
        let metrics = MetricsReport {
            fill_distance_q: 0.5,
            nn_ratio: 2.0,
            dist_to_truth: None,
            hole_coverage: vec![0.25],
            density_profile: vec![1.0, 0.9, 1.1, 1.0],
            grad_norm_history: vec![0.3, 0.2],
            starved_point_count: 0,
            warnings: vec![],
        };
        let path = dir.path().join("report.json");
        write_report(&metrics, &config, &path).unwrap();
        let doc = read_report(&path).unwrap();
        assert!(!doc.version.is_empty());
        assert_eq!(doc.version, version_string());
        assert_eq!(doc.config["generator"]["kind"], "disk");
        assert_eq!(doc.metrics.hole_coverage, vec![0.25]);
    }

    #[test]
    fn format_inference_follows_extensions() {
        assert_eq!(CloudFormat::from_path(Path::new("a.csv")).unwrap(), CloudFormat::Csv);
        assert_eq!(CloudFormat::from_path(Path::new("a.XYZ")).unwrap(), CloudFormat::Xyz);
        assert_eq!(CloudFormat::from_path(Path::new("a.ply")).unwrap(), CloudFormat::Ply);
        assert!(CloudFormat::from_path(Path::new("a.obj")).is_err());
        assert!(CloudFormat::from_name("las").is_err());
    }
}
