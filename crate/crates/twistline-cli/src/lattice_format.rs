//! The line-oriented lattice description format and the sampled-profile CSV.
//!
//! Lattice grammar (one statement per line, `#` starts a comment):
//!
//! ```text
//! beam particle=electron energy_total_mev=2.0 n=0 l=3 spin=up b0=2.0 db0=-1.0
//! reference bz_tesla=0.5               # optional
//! element kind=solenoid length_m=0.30 bz_tesla=0.5
//! element kind=cavity   length_m=0.215 ez_mv_per_m=-10
//! element kind=drift    length_m=0.10
//! ```
//!
//! Exactly one `beam` line is required; `element` lines are ordered; unknown
//! keys are rejected. A custom particle carries `mass_mev` and `charge_sign`
//! on the beam line. Profile CSVs have the fixed header
//! `z_m,bz_tesla,ez_mv_per_m` and a strictly increasing z column.

use std::collections::BTreeMap;

use thiserror::Error;
use twistline::{BeamSpec, Element, FieldLattice, FieldSample, Species, Spin};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Semantic { line: usize, msg: String },
    #[error("line {line}: z column must be strictly increasing")]
    NonMonotoneZ { line: usize },
}

impl ParseError {
    fn syntax(line: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            msg: msg.into(),
        }
    }

    fn semantic(line: usize, msg: impl Into<String>) -> Self {
        ParseError::Semantic {
            line,
            msg: msg.into(),
        }
    }
}

/// Parsed lattice file: beam, field lattice, optional reference-field
/// override for magnet-free lattices.
#[derive(Debug, Clone)]
pub struct LatticeFile {
    pub beam: BeamSpec,
    pub lattice: FieldLattice,
    pub bz_ref_override: Option<f64>,
}

struct KeyValues {
    line: usize,
    map: BTreeMap<String, String>,
}

impl KeyValues {
    fn parse(line_no: usize, tokens: &[&str]) -> Result<Self, ParseError> {
        let mut map = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok.split_once('=').ok_or_else(|| {
                ParseError::syntax(line_no, format!("expected key=value, got `{tok}`"))
            })?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ParseError::syntax(line_no, format!("duplicate key `{k}`")));
            }
        }
        Ok(KeyValues { line: line_no, map })
    }

    fn take(&mut self, key: &str) -> Result<String, ParseError> {
        self.map
            .remove(key)
            .ok_or_else(|| ParseError::syntax(self.line, format!("missing key `{key}`")))
    }

    fn take_f64(&mut self, key: &str) -> Result<f64, ParseError> {
        let raw = self.take(key)?;
        raw.parse().map_err(|_| {
            ParseError::syntax(self.line, format!("key `{key}`: `{raw}` is not a number"))
        })
    }


    fn finish(self) -> Result<(), ParseError> {
        if let Some(k) = self.map.keys().next() {
            return Err(ParseError::syntax(self.line, format!("unknown key `{k}`")));
        }
        Ok(())
    }
}

pub fn parse_lattice(text: &str) -> Result<LatticeFile, ParseError> {
    let mut beam: Option<BeamSpec> = None;
    let mut bz_ref: Option<f64> = None;
    let mut elements: Vec<Element> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "beam" => {
                if beam.is_some() {
                    return Err(ParseError::semantic(line_no, "duplicate beam line"));
                }
                beam = Some(parse_beam(line_no, &tokens[1..])?);
            }
            "reference" => {
                if bz_ref.is_some() {
                    return Err(ParseError::semantic(line_no, "duplicate reference line"));
                }
                let mut kv = KeyValues::parse(line_no, &tokens[1..])?;
                let b = kv.take_f64("bz_tesla")?;
                kv.finish()?;
                if !(b.abs() > 0.0) || !b.is_finite() {
                    return Err(ParseError::semantic(
                        line_no,
                        "reference field must be nonzero and finite",
                    ));
                }
                bz_ref = Some(b);
            }
            "element" => {
                elements.push(parse_element(line_no, &tokens[1..])?);
            }
            other => {
                return Err(ParseError::syntax(
                    line_no,
                    format!("unknown statement `{other}`"),
                ));
            }
        }
    }

    let beam = beam.ok_or_else(|| ParseError::semantic(text.lines().count().max(1), "missing beam line"))?;
    let lattice = FieldLattice::from_elements(elements)
        .map_err(|e| ParseError::semantic(0, e.to_string()))?;
    Ok(LatticeFile {
        beam,
        lattice,
        bz_ref_override: bz_ref,
    })
}

fn parse_beam(line_no: usize, tokens: &[&str]) -> Result<BeamSpec, ParseError> {
    let mut kv = KeyValues::parse(line_no, tokens)?;
    let particle = kv.take("particle")?;
    let species = match particle.as_str() {
        "electron" => Species::Electron,
        "proton" => Species::Proton,
        "custom" => {
            let mass = kv.take_f64("mass_mev")?;
            let sign = kv.take_f64("charge_sign")?;
            if sign != 1.0 && sign != -1.0 {
                return Err(ParseError::semantic(line_no, "charge_sign must be +1 or -1"));
            }
            Species::Custom {
                mass_mev: mass,
                charge_sign: sign as i8,
            }
        }
        other => {
            return Err(ParseError::semantic(
                line_no,
                format!("unknown particle `{other}` (electron | proton | custom)"),
            ))
        }
    };
    let energy = kv.take_f64("energy_total_mev")?;
    let n_raw = kv.take("n")?;
    let n: u32 = n_raw.parse().map_err(|_| {
        ParseError::syntax(line_no, format!("key `n`: `{n_raw}` is not a nonnegative integer"))
    })?;
    let l_raw = kv.take("l")?;
    let l: i32 = l_raw
        .parse()
        .map_err(|_| ParseError::syntax(line_no, format!("key `l`: `{l_raw}` is not an integer")))?;
    let spin = match kv.take("spin")?.as_str() {
        "up" => Spin::Up,
        "down" => Spin::Down,
        other => {
            return Err(ParseError::semantic(
                line_no,
                format!("spin must be up or down, got `{other}`"),
            ))
        }
    };
    let b0 = kv.take_f64("b0")?;
    let db0 = kv.take_f64("db0")?;
    kv.finish()?;
    BeamSpec::new(species, energy, n, l, spin, b0, db0)
        .map_err(|e| ParseError::semantic(line_no, e.to_string()))
}

fn parse_element(line_no: usize, tokens: &[&str]) -> Result<Element, ParseError> {
    let mut kv = KeyValues::parse(line_no, tokens)?;
    let kind = kv.take("kind")?;
    let length = kv.take_f64("length_m")?;
    if !(length > 0.0) || !length.is_finite() {
        return Err(ParseError::semantic(
            line_no,
            format!("element length must be positive, got {length}"),
        ));
    }
    let el = match kind.as_str() {
        "drift" => Element::Drift { length_m: length },
        "solenoid" => {
            let bz = kv.take_f64("bz_tesla")?;
            Element::Solenoid {
                length_m: length,
                bz_tesla: bz,
            }
        }
        "cavity" => {
            let ez = kv.take_f64("ez_mv_per_m")?;
            Element::Cavity {
                length_m: length,
                ez_mv_per_m: ez,
            }
        }
        other => {
            return Err(ParseError::semantic(
                line_no,
                format!("unknown element kind `{other}` (drift | solenoid | cavity)"),
            ))
        }
    };
    if let Some(extra) = [("bz_tesla", &el), ("ez_mv_per_m", &el)]
        .iter()
        .find_map(|(k, _)| kv.map.contains_key(*k).then_some(*k))
    {
        return Err(ParseError::syntax(
            line_no,
            format!("key `{extra}` does not apply to kind `{kind}`"),
        ));
    }
    kv.finish()?;
    Ok(el)
}

/// Serialize back to the line format with round-trip-exact numbers.
pub fn serialize_lattice(file: &LatticeFile) -> String {
    let mut out = String::new();
    let b = &file.beam;
    match b.species {
        Species::Electron => out.push_str("beam particle=electron"),
        Species::Proton => out.push_str("beam particle=proton"),
        Species::Custom {
            mass_mev,
            charge_sign,
        } => {
            out.push_str(&format!(
                "beam particle=custom mass_mev={mass_mev} charge_sign={charge_sign}"
            ));
        }
    }
    let spin = match b.spin {
        Spin::Up => "up",
        Spin::Down => "down",
    };
    out.push_str(&format!(
        " energy_total_mev={} n={} l={} spin={spin} b0={} db0={}\n",
        b.total_energy_mev, b.n, b.l, b.b0, b.db0
    ));
    if let Some(r) = file.bz_ref_override {
        out.push_str(&format!("reference bz_tesla={r}\n"));
    }
    for el in file.lattice.elements().unwrap_or(&[]) {
        match el {
            Element::Drift { length_m } => {
                out.push_str(&format!("element kind=drift length_m={length_m}\n"));
            }
            Element::Solenoid {
                length_m,
                bz_tesla,
            } => {
                out.push_str(&format!(
                    "element kind=solenoid length_m={length_m} bz_tesla={bz_tesla}\n"
                ));
            }
            Element::Cavity {
                length_m,
                ez_mv_per_m,
            } => {
                out.push_str(&format!(
                    "element kind=cavity length_m={length_m} ez_mv_per_m={ez_mv_per_m}\n"
                ));
            }
        }
    }
    out
}

pub const PROFILE_HEADER: &str = "z_m,bz_tesla,ez_mv_per_m";

/// Parse a sampled field profile CSV into a lattice with linear
/// interpolation semantics.
pub fn parse_profile_csv(text: &str) -> Result<FieldLattice, ParseError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::syntax(1, "empty profile"))?;
    if header.trim() != PROFILE_HEADER {
        return Err(ParseError::syntax(
            1,
            format!("header must be `{PROFILE_HEADER}`, got `{}`", header.trim()),
        ));
    }
    let mut samples: Vec<FieldSample> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        let cols: Vec<&str> = content.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(ParseError::syntax(
                line_no,
                format!("expected 3 columns, got {}", cols.len()),
            ));
        }
        let parse = |s: &str| -> Result<f64, ParseError> {
            s.parse()
                .map_err(|_| ParseError::syntax(line_no, format!("`{s}` is not a number")))
        };
        let row = FieldSample {
            z_m: parse(cols[0])?,
            bz_tesla: parse(cols[1])?,
            ez_mv_per_m: parse(cols[2])?,
        };
        if let Some(prev) = samples.last() {
            if row.z_m <= prev.z_m {
                return Err(ParseError::NonMonotoneZ { line: line_no });
            }
        }
        samples.push(row);
    }
    FieldLattice::from_samples(samples).map_err(|e| ParseError::semantic(0, e.to_string()))
}

/// Serialize a sampled lattice to the profile CSV format.
pub fn serialize_profile_csv(lattice: &FieldLattice) -> Option<String> {
    let samples = lattice.samples()?;
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!("{},{},{}\n", s.z_m, s.bz_tesla, s.ez_mv_per_m));
    }
    Some(out)
}
