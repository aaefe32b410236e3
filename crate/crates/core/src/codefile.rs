//! JSON code files.
//!
//! ```json
//! {"name": "...", "T": 2, "Nt": 2, "L": 4, "energy_scale": 0.707,
//!  "dispersion": [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], ...]}
//! ```
//!
//! Each dispersion matrix is a flat row-major list of `[re, im]` pairs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::code::DispersionCode;
use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMatrix};

#[derive(Debug, Serialize, Deserialize)]
struct CodeFile {
    name: String,
    #[serde(rename = "T")]
    t: usize,
    #[serde(rename = "Nt")]
    nt: usize,
    #[serde(rename = "L")]
    l: usize,
    energy_scale: f64,
    dispersion: Vec<Vec<[f64; 2]>>,
}

/// Serializes a code to the JSON code-file format.
pub fn to_json(code: &DispersionCode) -> String {
    let file = CodeFile {
        name: code.name().to_string(),
        t: code.t(),
        nt: code.nt(),
        l: code.l(),
        energy_scale: code.energy_scale(),
        dispersion: code
            .dispersion()
            .iter()
            .map(|m| m.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("code file serializes")
}

/// Parses the JSON code-file format. `origin` labels errors.
pub fn from_json(text: &str, origin: &Path) -> Result<DispersionCode> {
    let malformed = |reason: String| Error::MalformedCodeFile {
        path: origin.to_path_buf(),
        reason,
    };
    let file: CodeFile = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    if file.t == 0 || file.nt == 0 || file.l == 0 {
        return Err(malformed(format!(
            "T={}, Nt={}, L={} must all be positive",
            file.t, file.nt, file.l
        )));
    }
    if file.dispersion.len() != file.l {
        return Err(malformed(format!(
            "declared L={} but found {} dispersion matrices",
            file.l,
            file.dispersion.len()
        )));
    }
    let mut dispersion = Vec::with_capacity(file.l);
    for (l, entries) in file.dispersion.iter().enumerate() {
        if entries.len() != file.t * file.nt {
            return Err(malformed(format!(
                "dispersion matrix {l} has {} entries, expected {}",
                entries.len(),
                file.t * file.nt
            )));
        }
        if entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(malformed(format!("dispersion matrix {l} has non-finite entries")));
        }
        let data = entries.iter().map(|&[re, im]| Complex::new(re, im)).collect();
        dispersion.push(ComplexMatrix::from_row_major(file.t, file.nt, data).expect("length checked"));
    }
    DispersionCode::new(file.name, file.t, file.nt, dispersion, file.energy_scale)
        .map_err(|e| malformed(e.to_string()))
}

pub fn save_code(code: &DispersionCode, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(code))?;
    Ok(())
}

pub fn load_code(path: impl AsRef<Path>) -> Result<DispersionCode> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    from_json(&text, path)
}
