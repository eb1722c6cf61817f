//! JSON artifacts with hex-float matrix entries, so files round-trip bit for bit.

use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::connections::{CylinderConnection, LoopConnection};
use crate::cover::LiftedElement;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::paths::GroupPath;
use crate::sl2core::{GroupElement, LieElement};

/// C99-style hex float, e.g. `0x1.8p+1` for 3.0.
pub fn encode_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mut mant = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 { (0, -1022) } else { (1, exp_bits - 1023) };
    if mant == 0 {
        return format!("{sign}0x{lead}p{exp:+}");
    }
    let mut digits = 13;
    while mant & 0xf == 0 {
        mant >>= 4;
        digits -= 1;
    }
    format!("{sign}0x{lead}.{mant:0digits$x}p{exp:+}")
}

pub fn decode_f64(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "nan" | "inf" | "-inf" => return Err(Error::NonFinite),
        _ => {}
    }
    if t.contains("0x") || t.contains("0X") {
        hexf_parse::parse_hexf64(t, false).map_err(|e| Error::Parse(format!("{t}: {e}")))
    } else {
        t.parse::<f64>().map_err(|e| Error::Parse(format!("{t}: {e}")))
    }
}

/// An f64 written as a hex string; decimal strings and JSON numbers are accepted on input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexF64(pub f64);

impl Serialize for HexF64 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&encode_f64(self.0))
    }
}

impl<'de> Deserialize<'de> for HexF64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = HexF64;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or a hex-float string")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<HexF64, E> {
                Ok(HexF64(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<HexF64, E> {
                Ok(HexF64(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<HexF64, E> {
                Ok(HexF64(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<HexF64, E> {
                decode_f64(v).map(HexF64).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

pub type MatrixJson = [[HexF64; 2]; 2];

pub fn mat_to_json(m: &Mat2) -> MatrixJson {
    [[HexF64(m.a), HexF64(m.b)], [HexF64(m.c), HexF64(m.d)]]
}

pub fn mat_from_json(m: &MatrixJson) -> Mat2 {
    Mat2::new(m[0][0].0, m[0][1].0, m[1][0].0, m[1][1].0)
}

/// Parses `[[a,b],[c,d]]` with numeric or hex-string entries.
pub fn parse_matrix(s: &str) -> Result<Mat2> {
    let m: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let m = mat_from_json(&m);
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftJson {
    pub matrix: MatrixJson,
    pub anchor: HexF64,
}

impl LiftJson {
    pub fn from_lift(l: &LiftedElement) -> Self {
        LiftJson { matrix: mat_to_json(&l.base.matrix()), anchor: HexF64(l.anchor) }
    }

    pub fn to_lift(&self) -> Result<LiftedElement> {
        let g = GroupElement::from_stored(mat_from_json(&self.matrix))?;
        LiftedElement::new(g, self.anchor.0)
    }
}

/// Everything the CLI reads or writes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Artifact {
    Path {
        #[serde(rename = "N")]
        n: usize,
        description: String,
        samples: Vec<MatrixJson>,
    },
    Loop {
        #[serde(rename = "M")]
        m: usize,
        samples: Vec<MatrixJson>,
    },
    Connection {
        #[serde(rename = "Ns")]
        ns: usize,
        #[serde(rename = "Mt")]
        mt: usize,
        periodic: bool,
        grid: Vec<MatrixJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_transport: Option<LiftJson>,
    },
    Lift(LiftJson),
}

impl Artifact {
    pub fn from_path(p: &GroupPath) -> Self {
        Artifact::Path {
            n: p.n(),
            description: p.description().to_string(),
            samples: p.samples().iter().map(|g| mat_to_json(&g.matrix())).collect(),
        }
    }

    pub fn from_loop(a: &LoopConnection) -> Self {
        Artifact::Loop { m: a.m(), samples: a.samples().iter().map(|x| mat_to_json(&x.matrix())).collect() }
    }

    pub fn from_connection(c: &CylinderConnection) -> Self {
        Artifact::Connection {
            ns: c.ns(),
            mt: c.mt(),
            periodic: c.periodic(),
            grid: c.grid().iter().map(|x| mat_to_json(&x.matrix())).collect(),
            c_transport: Some(LiftJson::from_lift(&c.c_transport())),
        }
    }

    pub fn from_lift(l: &LiftedElement) -> Self {
        Artifact::Lift(LiftJson::from_lift(l))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Path { .. } => "path",
            Artifact::Loop { .. } => "loop",
            Artifact::Connection { .. } => "connection",
            Artifact::Lift(_) => "lift",
        }
    }

    pub fn to_path(&self) -> Result<GroupPath> {
        match self {
            Artifact::Path { n, description, samples } => {
                if samples.len() != n + 1 {
                    return Err(Error::Parse(format!("path has {} samples, expected N+1 = {}", samples.len(), n + 1)));
                }
                let gs = samples.iter().map(|m| GroupElement::from_stored(mat_from_json(m))).collect::<Result<Vec<_>>>()?;
                GroupPath::new(gs, description.clone())
            }
            _ => Err(Error::Parse(format!("expected a path, found {}", self.kind()))),
        }
    }

    pub fn to_loop(&self) -> Result<LoopConnection> {
        match self {
            Artifact::Loop { m, samples } => {
                if samples.len() != *m {
                    return Err(Error::Parse(format!("loop has {} samples, expected M = {m}", samples.len())));
                }
                LoopConnection::new(lie_samples(samples)?)
            }
            _ => Err(Error::Parse(format!("expected a loop, found {}", self.kind()))),
        }
    }

    pub fn to_connection(&self) -> Result<CylinderConnection> {
        match self {
            Artifact::Connection { ns, mt, periodic, grid, c_transport } => {
                let conn = CylinderConnection::from_grid(*ns, *mt, *periodic, lie_samples(grid)?)?;
                match c_transport {
                    Some(c) => Ok(conn.with_c_transport(c.to_lift()?)),
                    None => Ok(conn),
                }
            }
            _ => Err(Error::Parse(format!("expected a connection, found {}", self.kind()))),
        }
    }

    pub fn to_lift(&self) -> Result<LiftedElement> {
        match self {
            Artifact::Lift(l) => l.to_lift(),
            _ => Err(Error::Parse(format!("expected a lift, found {}", self.kind()))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifact serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

fn lie_samples(ms: &[MatrixJson]) -> Result<Vec<LieElement>> {
    ms.iter()
        .map(|m| {
            let x = mat_from_json(m);
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            if x.trace().abs() > 1e-12 {
                return Err(Error::Parse(format!("sample not traceless (trace {})", x.trace())));
            }
            Ok(LieElement::new(x))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::spiral_path;
    use proptest::prelude::*;

    #[test]
    fn hex_examples() {
        assert_eq!(encode_f64(3.0), "0x1.8p+1");
        assert_eq!(encode_f64(1.0), "0x1p+0");
        assert_eq!(encode_f64(-0.0), "-0x0p+0");
        assert_eq!(encode_f64(0.1), "0x1.999999999999ap-4");
        assert_eq!(decode_f64("0x1.999999999999ap-4").unwrap(), 0.1);
        assert_eq!(decode_f64("2.5").unwrap(), 2.5);
        assert!(decode_f64("nan").is_err());
        let tiny = f64::from_bits(1);
        assert_eq!(decode_f64(&encode_f64(tiny)).unwrap(), tiny);
    }

    proptest! {
        #[test]
        fn hex_round_trip(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            prop_assert_eq!(decode_f64(&encode_f64(x)).unwrap().to_bits(), bits);
        }
    }

    #[test]
    fn matrix_literals() {
        let m = parse_matrix("[[2,0],[0,0.5]]").unwrap();
        assert_eq!(m, Mat2::new(2.0, 0.0, 0.0, 0.5));
        let m = parse_matrix(r#"[["0x1p+1", 0], [0, "0x1p-1"]]"#).unwrap();
        assert_eq!(m, Mat2::new(2.0, 0.0, 0.0, 0.5));
        assert!(parse_matrix("[[1,2],[3]]").is_err());
        assert!(parse_matrix("[[1,\"x\"],[0,1]]").is_err());
    }

    #[test]
    fn path_round_trip_is_bit_exact() {
        let p = spiral_path(2, LieElement::from_coords(0.0, 0.05, 0.1), 200).unwrap();
        let back = Artifact::from_json(&Artifact::from_path(&p).to_json()).unwrap().to_path().unwrap();
        assert_eq!(back.samples(), p.samples());
        assert_eq!(back.description(), p.description());
    }

    #[test]
    fn connection_round_trip() {
        let a = LoopConnection::spiral(1, LieElement::from_coords(0.0, 0.1, 0.0), 32).unwrap();
        let c = CylinderConnection::linear(&a, LieElement::J.scale(0.01), 16)
            .unwrap()
            .with_c_transport(LiftedElement::rotation(0.3).deck(2));
        let art = Artifact::from_connection(&c);
        let back = Artifact::from_json(&art.to_json()).unwrap().to_connection().unwrap();
        assert_eq!(back.grid(), c.grid());
        assert_eq!(back.c_transport(), c.c_transport());
        assert!(Artifact::from_json(&art.to_json()).unwrap().to_path().is_err());
        let l = Artifact::from_loop(&a);
        assert_eq!(Artifact::from_json(&l.to_json()).unwrap().to_loop().unwrap().samples(), a.samples());
    }
}
