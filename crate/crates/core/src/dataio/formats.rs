//! On-disk feature formats.
//!
//! Binary head file (`.fvec`), little-endian:
//!
//! ```text
//! magic   4 bytes  "MHFC"
//! version u32      1
//! n       u32      sample count
//! dim     u32      feature dimension
//! data    f32 × n·dim, sample-major
//! ```
//!
//! CSV head files hold one sample per line with `dim` comma-separated values
//! and no header. Labels are one integer per line. A JSON manifest ties the
//! pieces together with paths relative to itself.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::FeatureDataset;
use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub const FVEC_MAGIC: [u8; 4] = *b"MHFC";
pub const FVEC_VERSION: u32 = 1;
pub const MANIFEST_VERSION: u32 = 1;
const FVEC_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub labels: String,
    pub heads: Vec<ManifestHead>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestHead {
    pub name: String,
    pub path: String,
}

fn read_existing(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::HeadFileMissing(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

fn parse_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Writes sample-major `features` (`n × dim`) as float32.
pub fn write_fvec(path: &Path, features: &Matrix) -> Result<()> {
    let (n, dim) = features.shape();
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(&FVEC_MAGIC)?;
    for v in [FVEC_VERSION, n as u32, dim as u32] {
        out.write_all(&v.to_le_bytes())?;
    }
    for &v in features.as_slice() {
        out.write_all(&(v as f32).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a `.fvec` file into an `n × dim` matrix widened to f64.
pub fn read_fvec(path: &Path) -> Result<Matrix> {
    let bytes = read_existing(path)?;
    if bytes.len() < FVEC_HEADER_LEN || bytes[..4] != FVEC_MAGIC {
        return Err(Error::BadMagic(path.to_path_buf()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
    let version = word(1);
    if version != FVEC_VERSION {
        return Err(Error::BadVersion {
            path: path.to_path_buf(),
            version,
        });
    }
    let (n, dim) = (word(2) as usize, word(3) as usize);
    let expected = FVEC_HEADER_LEN + 4 * n * dim;
    if bytes.len() != expected {
        return Err(parse_err(
            path,
            format!("{} bytes, header implies {expected}", bytes.len()),
        ));
    }
    let data = bytes[FVEC_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Matrix::new(n, dim, data).map_err(|e| parse_err(path, e.to_string()))
}

pub fn write_csv_head(path: &Path, features: &Matrix) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for i in 0..features.rows() {
        let line: Vec<String> = features
            .row(i)
            .iter()
            .map(|v| (*v as f32).to_string())
            .collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv_head(path: &Path) -> Result<Matrix> {
    let text =
        String::from_utf8(read_existing(path)?).map_err(|e| parse_err(path, e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(path, format!("line {}: {e}", lineno + 1)))?;
        rows.push(row);
    }
    Matrix::from_rows(&rows).map_err(|e| parse_err(path, e.to_string()))
}

pub fn read_labels(path: &Path) -> Result<Vec<i64>> {
    let text =
        String::from_utf8(read_existing(path)?).map_err(|e| parse_err(path, e.to_string()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<i64>()
                .map_err(|e| parse_err(path, format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn write_labels(path: &Path, labels: &[i64]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for l in labels {
        writeln!(out, "{l}")?;
    }
    out.flush()?;
    Ok(())
}

/// Dispatches on extension: `.csv` is text, anything else binary.
pub fn read_head_file(path: &Path) -> Result<Matrix> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => read_csv_head(path),
        _ => read_fvec(path),
    }
}

pub fn load_manifest(path: &Path) -> Result<FeatureDataset> {
    let manifest_err = |reason: String| Error::ManifestParse {
        path: path.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(|e| manifest_err(e.to_string()))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| manifest_err(e.to_string()))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(manifest_err(format!(
            "unsupported version {}",
            manifest.version
        )));
    }
    if manifest.heads.is_empty() {
        return Err(manifest_err("no heads listed".into()));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let labels = read_labels(&base.join(&manifest.labels))?;
    let mut heads = Vec::with_capacity(manifest.heads.len());
    let mut names = Vec::with_capacity(manifest.heads.len());
    for head in &manifest.heads {
        heads.push(read_head_file(&base.join(&head.path))?);
        names.push(head.name.clone());
    }
    FeatureDataset::new(heads, labels, names)
}

/// Writes `labels.txt`, one `.fvec` per head and `manifest.json` into `dir`,
/// returning the manifest path.
pub fn save_dataset(dataset: &FeatureDataset, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    write_labels(&dir.join("labels.txt"), dataset.labels())?;
    let mut heads = Vec::with_capacity(dataset.n_heads());
    for h in 0..dataset.n_heads() {
        let file = format!("head{h}.fvec");
        write_fvec(&dir.join(&file), dataset.head(h))?;
        heads.push(ManifestHead {
            name: dataset.head_names()[h].clone(),
            path: file,
        });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        labels: "labels.txt".into(),
        heads,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fvec_header_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.fvec");
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.5], [-1.0, 0.0]]).unwrap();
        write_fvec(&path, &m).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], &[0x4D, 0x48, 0x46, 0x43]);
        assert_eq!(&bytes[4..16], &[1, 0, 0, 0, 3, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(bytes.len(), 16 + 4 * 6);
        assert_eq!(read_fvec(&path).unwrap(), m);
    }

    #[test]
    fn fvec_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.fvec");
        fs::write(&path, b"NOPE\x01\0\0\0\0\0\0\0\0\0\0\0").unwrap();
        assert!(matches!(read_fvec(&path), Err(Error::BadMagic(_))));
        fs::write(&path, b"MHFC\x02\0\0\0\0\0\0\0\0\0\0\0").unwrap();
        assert!(matches!(
            read_fvec(&path),
            Err(Error::BadVersion { version: 2, .. })
        ));
        fs::write(&path, b"MHFC\x01\0\0\0\x01\0\0\0\x01\0\0\0").unwrap();
        assert!(matches!(read_fvec(&path), Err(Error::Parse { .. })));
        assert!(matches!(
            read_fvec(&dir.path().join("absent.fvec")),
            Err(Error::HeadFileMissing(_))
        ));
    }

    #[test]
    fn labels_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let lp = dir.path().join("labels.txt");
        write_labels(&lp, &[3, -1, 0]).unwrap();
        assert_eq!(fs::read_to_string(&lp).unwrap(), "3\n-1\n0\n");
        assert_eq!(read_labels(&lp).unwrap(), vec![3, -1, 0]);

        let cp = dir.path().join("h.csv");
        fs::write(&cp, "1.5,2\n-3,4e-1\n").unwrap();
        let m = read_csv_head(&cp).unwrap();
        assert_eq!(m.as_slice(), &[1.5, 2.0, -3.0, 0.4]);
        fs::write(&cp, "1,2\n3\n").unwrap();
        assert!(read_csv_head(&cp).is_err());
    }

    #[test]
    fn manifest_errors() {
        let dir = tempfile::tempdir().unwrap();
        let mp = dir.path().join("manifest.json");
        fs::write(&mp, "{not json").unwrap();
        assert!(matches!(
            load_manifest(&mp),
            Err(Error::ManifestParse { .. })
        ));
        fs::write(
            &mp,
            r#"{"version":1,"labels":"labels.txt","heads":[{"name":"a","path":"missing.fvec"}]}"#,
        )
        .unwrap();
        write_labels(&dir.path().join("labels.txt"), &[0, 1]).unwrap();
        assert!(matches!(load_manifest(&mp), Err(Error::HeadFileMissing(_))));
        fs::write(&mp, r#"{"version":2,"labels":"labels.txt","heads":[]}"#).unwrap();
        assert!(matches!(
            load_manifest(&mp),
            Err(Error::ManifestParse { .. })
        ));
    }
}
