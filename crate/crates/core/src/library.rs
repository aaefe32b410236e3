//! Built-in space-time codes and name lookup.
//!
//! Every code here is normalized so that `E||X||^2 = T` for real symbols of
//! energy 1/2. Dispersion matrices are listed in real-symbol order; complex
//! symbols contribute their real part first, then their imaginary part.

use crate::code::DispersionCode;
use crate::constructions;
use crate::error::{Error, Result};
use crate::linalg::{c, Complex, ComplexMatrix};

/// Builds a `t x nt` matrix from `(row, col, value)` triples, 0-based.
fn sparse(t: usize, nt: usize, entries: &[(usize, usize, Complex)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(t, nt);
    for &(r, col, v) in entries {
        m[(r, col)] = v;
    }
    m
}

fn alamouti_matrices() -> Vec<ComplexMatrix> {
    let one = c(1.0, 0.0);
    let j = c(0.0, 1.0);
    vec![
        sparse(2, 2, &[(0, 0, one), (1, 1, one)]),
        sparse(2, 2, &[(0, 0, j), (1, 1, -j)]),
        sparse(2, 2, &[(0, 1, one), (1, 0, -one)]),
        sparse(2, 2, &[(0, 1, j), (1, 0, j)]),
    ]
}

/// The 2x2 Alamouti code, `X = [[a+jb, c+jd], [-c+jd, a-jb]]`.
pub fn alamouti() -> DispersionCode {
    DispersionCode::normalized("alamouti", 2, 2, alamouti_matrices()).expect("static code")
}

/// Spatial multiplexing over `nt` antennas in one symbol duration.
pub fn blast(nt: usize) -> Result<DispersionCode> {
    if nt == 0 {
        return Err(Error::InvalidParameter("blast needs at least one antenna".into()));
    }
    let mut dispersion = Vec::with_capacity(2 * nt);
    for i in 0..nt {
        dispersion.push(sparse(1, nt, &[(0, i, c(1.0, 0.0))]));
        dispersion.push(sparse(1, nt, &[(0, i, c(0.0, 1.0))]));
    }
    DispersionCode::normalized(format!("blast({nt})"), 1, nt, dispersion)
}

/// Double space-time transmit diversity: two Alamouti codes on antenna pairs.
pub fn dsttd() -> DispersionCode {
    let mut dispersion = Vec::with_capacity(8);
    for offset in [0, 2] {
        for a in alamouti_matrices() {
            let mut m = ComplexMatrix::zeros(2, 4);
            m.set_block(0, offset, &a);
            dispersion.push(m);
        }
    }
    DispersionCode::normalized("dsttd", 2, 4, dispersion).expect("static code")
}

/// The 2x2 Golden code.
pub fn golden() -> DispersionCode {
    let sqrt5 = 5f64.sqrt();
    let theta = (1.0 + sqrt5) / 2.0;
    let theta_bar = (1.0 - sqrt5) / 2.0;
    let j = c(0.0, 1.0);
    let alpha = c(1.0, 1.0) - j * theta;
    let alpha_bar = c(1.0, 1.0) - j * theta_bar;
    let norm = 1.0 / sqrt5;

    // Coefficient pairs for the four complex symbols a, b, c, d.
    let diag = |x: Complex, y: Complex| sparse(2, 2, &[(0, 0, x * norm), (1, 1, y * norm)]);
    let anti = |x: Complex, y: Complex| sparse(2, 2, &[(0, 1, x * norm), (1, 0, y * norm)]);
    let bases = [
        diag(alpha, alpha_bar),
        diag(alpha * theta, alpha_bar * theta_bar),
        anti(alpha, j * alpha_bar),
        anti(alpha * theta, j * alpha_bar * theta_bar),
    ];
    let mut dispersion = Vec::with_capacity(8);
    for b in bases {
        dispersion.push(b.clone());
        dispersion.push(b.scale(j));
    }
    DispersionCode::normalized("golden", 2, 2, dispersion).expect("static code")
}

/// Rate-1 4x4 seed code carrying eight real symbols, one complex symbol per
/// space-time position.
pub fn jabba_seed() -> DispersionCode {
    let one = c(1.0, 0.0);
    let j = c(0.0, 1.0);
    let entries: [&[(usize, usize, Complex)]; 8] = [
        &[(0, 0, one), (1, 1, one), (2, 2, one), (3, 3, one)],
        &[(0, 0, j), (1, 1, -j), (2, 2, j), (3, 3, -j)],
        &[(0, 1, one), (1, 0, -one), (2, 3, one), (3, 2, -one)],
        &[(0, 1, j), (1, 0, j), (2, 3, j), (3, 2, j)],
        &[(0, 2, j), (1, 3, j), (2, 0, one), (3, 1, one)],
        &[(0, 2, -one), (1, 3, one), (2, 0, j), (3, 1, -j)],
        &[(0, 3, j), (1, 2, -j), (2, 1, one), (3, 0, -one)],
        &[(0, 3, -one), (1, 2, -one), (2, 1, j), (3, 0, j)],
    ];
    let dispersion = entries.iter().map(|e| sparse(4, 4, e)).collect();
    DispersionCode::normalized("jabba_seed", 4, 4, dispersion).expect("static code")
}

/// Rate-1/2 real orthogonal design for five antennas over eight durations.
pub fn ostbc_half_rate_5tx() -> DispersionCode {
    // Signed 1-based symbol index at each position.
    const LAYOUT: [[i8; 5]; 8] = [
        [1, 2, 3, 4, 5],
        [-2, 1, 4, -3, 6],
        [-3, -4, 1, 2, 7],
        [-4, 3, -2, 1, 8],
        [-5, -6, -7, -8, 1],
        [-6, 5, -8, 7, -2],
        [-7, 8, 5, -6, -3],
        [-8, -7, 6, 5, -4],
    ];
    let mut dispersion = vec![ComplexMatrix::zeros(8, 5); 8];
    for (r, row) in LAYOUT.iter().enumerate() {
        for (col, &v) in row.iter().enumerate() {
            let l = v.unsigned_abs() as usize - 1;
            dispersion[l][(r, col)] = c(f64::from(v.signum()), 0.0);
        }
    }
    DispersionCode::normalized("ostbc_half_rate_5tx", 8, 5, dispersion).expect("static code")
}

/// The 5x10 extension matrix paired with [`ostbc_half_rate_5tx`].
pub fn ostbc_5tx_extension() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(5, 10);
    for r in 0..5 {
        for col in 0..5 {
            m[(r, col)] = if r == col { c(-1.0, 0.0) } else { c(1.0, 0.0) };
            m[(r, col + 5)] = if r == col { c(0.0, 1.0) } else { c(1.0, 0.0) };
        }
    }
    m
}

/// Looks up a code by name.
///
/// Accepted names: `alamouti`, `blast(N)`, `dsttd`, `golden`, `jabba_seed`,
/// `ostbc_half_rate_5tx`, `x_i_4`, `x_i_2m(m,n)`,
/// `x_ii_5`, `rate2` and `rate2(theta)`.
pub fn by_name(name: &str) -> Result<DispersionCode> {
    let key = name.trim().to_ascii_lowercase().replace(' ', "");
    let (base, args) = match key.find('(') {
        Some(open) if key.ends_with(')') => (&key[..open], Some(&key[open + 1..key.len() - 1])),
        Some(_) => return Err(Error::UnknownCode(name.to_string())),
        None => (key.as_str(), None),
    };
    let numbers = |n: usize| -> Result<Vec<f64>> {
        let args = args.unwrap_or("");
        let parsed: Vec<f64> = args
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::UnknownCode(name.to_string()))?;
        if parsed.len() != n {
            return Err(Error::UnknownCode(name.to_string()));
        }
        Ok(parsed)
    };
    let integer = |x: f64| -> Result<usize> {
        if (0.0..=1024.0).contains(&x) && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(Error::UnknownCode(name.to_string()))
        }
    };
    let plain = |code: DispersionCode| -> Result<DispersionCode> {
        if args.is_some() {
            Err(Error::UnknownCode(name.to_string()))
        } else {
            Ok(code)
        }
    };
    match base {
        "alamouti" => plain(alamouti()),
        "dsttd" | "d-sttd" => plain(dsttd()),
        "golden" => plain(golden()),
        "jabba_seed" => plain(jabba_seed()),
        "ostbc_half_rate_5tx" => plain(ostbc_half_rate_5tx()),
        "x_i_4" => plain(constructions::type_i_4tx_code()),
        "x_ii_5" => plain(constructions::type_ii_5tx_code()),
        "blast" => blast(integer(numbers(1)?[0])?),
        "x_i_2m" => {
            let v = numbers(2)?;
            constructions::type_i_family_code(integer(v[0])? as u32, integer(v[1])? as u32)
        }
        "rate2" | "x_i_rate2" => match args {
            None => Ok(constructions::optimized_rate2_default()),
            Some(_) => constructions::optimized_rate2_theta(numbers(1)?[0]),
        },
        _ => Err(Error::UnknownCode(name.to_string())),
    }
}

/// Names of every built-in code with default parameters.
pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "alamouti",
        "blast(2)",
        "blast(4)",
        "dsttd",
        "golden",
        "jabba_seed",
        "ostbc_half_rate_5tx",
        "x_i_4",
        "x_i_2m(2,1)",
        "x_ii_5",
        "rate2",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_match_table() {
        let b = blast(4).unwrap();
        assert_eq!((b.t(), b.nt(), b.l()), (1, 4, 8));
        let d = dsttd();
        assert_eq!((d.t(), d.nt(), d.l()), (2, 4, 8));
        let g = golden();
        assert_eq!((g.t(), g.nt(), g.l()), (2, 2, 8));
        let s = jabba_seed();
        assert_eq!((s.t(), s.nt(), s.l()), (4, 4, 8));
        assert_eq!(s.rate(), 1.0);
        let o = ostbc_half_rate_5tx();
        assert_eq!((o.t(), o.nt(), o.l()), (8, 5, 8));
        assert_eq!(o.rate(), 0.5);
    }

    #[test]
    fn builtins_validate() {
        for name in builtin_names() {
            let code = by_name(name).unwrap();
            let nr = code.nt().max(code.min_receive_antennas());
            let report = code.validate(nr);
            assert!(report.passes(), "{name}: {:?}", report.failures());
        }
    }

    #[test]
    fn jabba_seed_has_one_symbol_per_position() {
        let code = jabba_seed();
        assert_eq!(crate::code::max_symbols_per_position(&code), 2);
    }

    #[test]
    fn golden_codeword_matches_closed_form() {
        let code = golden();
        let s = [0.3, -0.1, 0.7, 0.2, -0.5, 0.4, 0.9, -0.6];
        let x = code.assemble(&s).unwrap();
        let sqrt5 = 5f64.sqrt();
        let th = (1.0 + sqrt5) / 2.0;
        let thb = (1.0 - sqrt5) / 2.0;
        let j = c(0.0, 1.0);
        let al = c(1.0, 1.0) - j * th;
        let alb = c(1.0, 1.0) - j * thb;
        let (a, b, cc, d) = (c(s[0], s[1]), c(s[2], s[3]), c(s[4], s[5]), c(s[6], s[7]));
        let k = code.energy_scale() / sqrt5;
        let expected = ComplexMatrix::from_rows(&[
            vec![al * (a + b * th) * k, al * (cc + d * th) * k],
            vec![j * alb * (cc + d * thb) * k, alb * (a + b * thb) * k],
        ]);
        assert!(x.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn name_parsing() {
        assert_eq!(by_name("BLAST(3)").unwrap().nt(), 3);
        assert_eq!(by_name("x_i_2m(1,1)").unwrap().nt(), 2);
        assert!(matches!(by_name("nope"), Err(Error::UnknownCode(_))));
        assert!(by_name("blast(x)").is_err());
        assert!(by_name("golden(1)").is_err());
        assert!(by_name("blast(2.5)").is_err());
    }
}
