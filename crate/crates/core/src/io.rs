//! File formats: lattice/function/realization JSON and CSV export.
//!
//! Function files reference their lattice by a content hash so that values
//! are never silently re-attached to the wrong patch. JSON numbers are
//! written in shortest round-trip form, so save/load reproduces every
//! coordinate and value bit-exactly.

use std::path::Path as FsPath;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calculus::DaFunction;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, VertexId};
use crate::realization::Realization;
use crate::{CMatrix, C64};

#[derive(Serialize, Deserialize)]
struct VertexDto {
    id: u64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct LatticeDto {
    vertices: Vec<VertexDto>,
    edges: Vec<[u64; 2]>,
    faces: Vec<Vec<u64>>,
    origin_id: u64,
}

fn lattice_dto(lattice: &Lattice) -> LatticeDto {
    LatticeDto {
        vertices: lattice
            .vertices()
            .iter()
            .map(|&(id, pos)| VertexDto {
                id: id.0,
                re: pos.re,
                im: pos.im,
            })
            .collect(),
        edges: lattice.edges().iter().map(|&(a, b)| [a.0, b.0]).collect(),
        faces: lattice
            .faces()
            .iter()
            .map(|f| f.iter().map(|id| id.0).collect())
            .collect(),
        origin_id: lattice.origin().0,
    }
}

fn lattice_from_dto(dto: LatticeDto) -> Result<Lattice> {
    let vertices = dto
        .vertices
        .into_iter()
        .map(|v| (VertexId(v.id), C64::new(v.re, v.im)))
        .collect();
    let edges = dto
        .edges
        .into_iter()
        .map(|[a, b]| (VertexId(a), VertexId(b)))
        .collect();
    let mut faces = Vec::with_capacity(dto.faces.len());
    for (no, face) in dto.faces.into_iter().enumerate() {
        if face.len() != 4 {
            return Err(Error::ValidationError {
                invariant: "unit-rhombus faces".into(),
                detail: format!("face {no} has {} vertices, expected 4", face.len()),
            });
        }
        faces.push([
            VertexId(face[0]),
            VertexId(face[1]),
            VertexId(face[2]),
            VertexId(face[3]),
        ]);
    }
    Lattice::new(vertices, edges, faces, VertexId(dto.origin_id))
}

/// Canonical JSON form of a lattice.
pub fn lattice_to_json(lattice: &Lattice) -> String {
    serde_json::to_string_pretty(&lattice_dto(lattice)).expect("lattice serialization")
}

/// Parses and fully validates a lattice from JSON text.
pub fn lattice_from_json(text: &str) -> Result<Lattice> {
    let dto: LatticeDto =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    lattice_from_dto(dto)
}

/// Content hash identifying a lattice (over the compact canonical JSON).
pub fn lattice_hash(lattice: &Lattice) -> String {
    let compact = serde_json::to_string(&lattice_dto(lattice)).expect("lattice serialization");
    let digest = Sha256::digest(compact.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn save_lattice(lattice: &Lattice, path: &FsPath) -> Result<()> {
    std::fs::write(path, lattice_to_json(lattice) + "\n")?;
    Ok(())
}

pub fn load_lattice(path: &FsPath) -> Result<Lattice> {
    let text = std::fs::read_to_string(path)?;
    lattice_from_json(&text)
}

// ---------------------------------------------------------------------------
// DA function files
// ---------------------------------------------------------------------------

type EntryDto = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
struct FunctionDto {
    lattice_hash: String,
    shape: [usize; 2],
    // map keys are vertex ids, written in ascending numeric order
    values: serde_json::Map<String, serde_json::Value>,
}

fn matrix_to_entry(m: &CMatrix) -> EntryDto {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn entry_to_matrix(entry: &EntryDto, shape: (usize, usize)) -> Result<CMatrix> {
    if entry.len() != shape.0 || entry.iter().any(|row| row.len() != shape.1) {
        return Err(Error::ParseError(
            "function value does not match shape".into(),
        ));
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| {
        C64::new(entry[i][j][0], entry[i][j][1])
    }))
}

/// JSON form of a function; vertex entries appear in ascending id order.
pub fn function_to_json(f: &DaFunction) -> String {
    let mut ids: Vec<VertexId> = f.lattice().ids().collect();
    ids.sort();
    let mut values = serde_json::Map::new();
    for id in ids {
        let entry = matrix_to_entry(f.value(id).expect("value for every vertex"));
        values.insert(
            id.to_string(),
            serde_json::to_value(entry).expect("value serialization"),
        );
    }
    let dto = FunctionDto {
        lattice_hash: lattice_hash(f.lattice()),
        shape: [f.shape().0, f.shape().1],
        values,
    };
    serde_json::to_string_pretty(&dto).expect("function serialization")
}

/// Parses a function against the lattice it was exported from; the stored
/// lattice hash must match and every vertex must carry a value.
pub fn function_from_json(text: &str, lattice: &Arc<Lattice>) -> Result<DaFunction> {
    let dto: FunctionDto =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    let expected = lattice_hash(lattice);
    if dto.lattice_hash != expected {
        return Err(Error::ValidationError {
            invariant: "lattice hash".into(),
            detail: format!(
                "function was exported from lattice {}, not {}",
                dto.lattice_hash, expected
            ),
        });
    }
    let shape = (dto.shape[0], dto.shape[1]);
    let mut values = vec![None; lattice.vertex_count()];
    for (key, value) in &dto.values {
        let id: u64 = key
            .parse()
            .map_err(|_| Error::ParseError(format!("bad vertex id key '{key}'")))?;
        let idx = lattice.index_of(VertexId(id))?;
        let entry: EntryDto =
            serde_json::from_value(value.clone()).map_err(|e| Error::ParseError(e.to_string()))?;
        values[idx] = Some(entry_to_matrix(&entry, shape)?);
    }
    let values: Vec<CMatrix> = values
        .into_iter()
        .enumerate()
        .map(|(idx, v)| {
            v.ok_or_else(|| Error::ValidationError {
                invariant: "value defined for every vertex".into(),
                detail: format!("vertex {} has no value", lattice.id_at(idx)),
            })
        })
        .collect::<Result<_>>()?;
    Ok(DaFunction::from_values(Arc::clone(lattice), shape, values))
}

pub fn save_function(f: &DaFunction, path: &FsPath) -> Result<()> {
    std::fs::write(path, function_to_json(f) + "\n")?;
    Ok(())
}

pub fn load_function(path: &FsPath, lattice: &Arc<Lattice>) -> Result<DaFunction> {
    let text = std::fs::read_to_string(path)?;
    function_from_json(&text, lattice)
}

/// CSV form: header `id,re(z),im(z),re(f),im(f)`, one row per vertex per
/// matrix entry (row-major), vertices in ascending id order.
pub fn function_to_csv(f: &DaFunction) -> String {
    let mut ids: Vec<VertexId> = f.lattice().ids().collect();
    ids.sort();
    let mut out = String::from("id,re(z),im(z),re(f),im(f)\n");
    for id in ids {
        let z = f.lattice().coordinate(id).expect("known vertex");
        let v = f.value(id).expect("value for every vertex");
        for i in 0..v.nrows() {
            for j in 0..v.ncols() {
                let entry = v[(i, j)];
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    id, z.re, z.im, entry.re, entry.im
                ));
            }
        }
    }
    out
}

pub fn export_csv(f: &DaFunction, path: &FsPath) -> Result<()> {
    std::fs::write(path, function_to_csv(f))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// realization files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RealizationDto {
    shape: [usize; 2],
    state_dim: usize,
    #[serde(rename = "A")]
    a: EntryDto,
    #[serde(rename = "B")]
    b: EntryDto,
    #[serde(rename = "C")]
    c: EntryDto,
    #[serde(rename = "D")]
    d: EntryDto,
}

pub fn realization_to_json(r: &Realization) -> String {
    let dto = RealizationDto {
        shape: [r.shape().0, r.shape().1],
        state_dim: r.state_dim(),
        a: matrix_to_entry(r.a()),
        b: matrix_to_entry(r.b()),
        c: matrix_to_entry(r.c()),
        d: matrix_to_entry(r.d()),
    };
    serde_json::to_string_pretty(&dto).expect("realization serialization")
}

pub fn realization_from_json(text: &str) -> Result<Realization> {
    let dto: RealizationDto =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    let l = dto.state_dim;
    let (m, n) = (dto.shape[0], dto.shape[1]);
    Realization::new(
        entry_to_matrix(&dto.a, (l, l))?,
        entry_to_matrix(&dto.b, (l, n))?,
        entry_to_matrix(&dto.c, (m, l))?,
        entry_to_matrix(&dto.d, (m, n))?,
    )
}

pub fn save_realization(r: &Realization, path: &FsPath) -> Result<()> {
    std::fs::write(path, realization_to_json(r) + "\n")?;
    Ok(())
}

pub fn load_realization(path: &FsPath) -> Result<Realization> {
    let text = std::fs::read_to_string(path)?;
    realization_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeKind;
    use crate::numeric::Tolerance;

    fn square(radius: u32) -> Arc<Lattice> {
        Arc::new(Lattice::generate(LatticeKind::Square, radius).unwrap())
    }

    #[test]
    fn lattice_roundtrip_is_identity() {
        let lat = Lattice::generate(LatticeKind::Square, 2).unwrap();
        let json = lattice_to_json(&lat);
        let back = lattice_from_json(&json).unwrap();
        assert_eq!(lat, back);
        assert_eq!(lattice_hash(&lat), lattice_hash(&back));

        let rhombic = Lattice::generate(
            LatticeKind::Rhombic {
                alpha: std::f64::consts::PI / 3.0,
            },
            2,
        )
        .unwrap();
        let back = lattice_from_json(&lattice_to_json(&rhombic)).unwrap();
        assert_eq!(rhombic, back);
    }

    #[test]
    fn three_vertex_face_is_validation_error() {
        let lat = Lattice::generate(LatticeKind::Square, 1).unwrap();
        let mut json: serde_json::Value = serde_json::from_str(&lattice_to_json(&lat)).unwrap();
        json["faces"][0] = serde_json::json!([0, 1, 2]);
        let err = lattice_from_json(&json.to_string()).unwrap_err();
        assert!(matches!(err, Error::ValidationError { .. }));
    }

    #[test]
    fn missing_origin_is_validation_error() {
        let lat = Lattice::generate(LatticeKind::Square, 1).unwrap();
        let mut json: serde_json::Value = serde_json::from_str(&lattice_to_json(&lat)).unwrap();
        json["origin_id"] = serde_json::json!(10_000);
        let err = lattice_from_json(&json.to_string()).unwrap_err();
        assert!(matches!(err, Error::ValidationError { .. }));
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(
            lattice_from_json("{ not json"),
            Err(Error::ParseError(_))
        ));
    }

    #[test]
    fn function_roundtrip_bit_exact() {
        let lat = square(2);
        let f =
            crate::calculus::exp_basis(&lat, C64::new(0.37, -0.21), Tolerance::default()).unwrap();
        let json = function_to_json(&f);
        let back = function_from_json(&json, &lat).unwrap();
        for (id, v) in f.values() {
            let w = back.value(id).unwrap();
            assert_eq!(v[(0, 0)].re.to_bits(), w[(0, 0)].re.to_bits());
            assert_eq!(v[(0, 0)].im.to_bits(), w[(0, 0)].im.to_bits());
        }
        // reserialization is byte-identical
        assert_eq!(json, function_to_json(&back));
    }

    #[test]
    fn function_hash_mismatch_rejected() {
        let lat = square(2);
        let other = square(3);
        let f = crate::calculus::DaFunction::coordinate(&lat);
        let json = function_to_json(&f);
        let err = function_from_json(&json, &other).unwrap_err();
        assert!(matches!(err, Error::ValidationError { .. }));
    }

    #[test]
    fn csv_has_one_row_per_vertex() {
        let lat = square(1);
        let f = crate::calculus::DaFunction::coordinate(&lat);
        let csv = function_to_csv(&f);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + 9);
        assert_eq!(lines[0], "id,re(z),im(z),re(f),im(f)");
    }

    #[test]
    fn realization_roundtrip() {
        let r = Realization::from_scalars(
            C64::new(0.3, 0.1),
            C64::new(1.0, 0.0),
            C64::new(0.5, -0.2),
            C64::new(0.0, 0.7),
        );
        let back = realization_from_json(&realization_to_json(&r)).unwrap();
        assert_eq!(r, back);
    }
}
