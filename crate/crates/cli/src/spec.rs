//! Filter spec files: JSON with exact rational arcs and decimal trig
//! coefficients.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use superwav::rational::rat;
use superwav::{ArcSet, Filter, FilterKind, TrigPolynomial};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Trig,
    Char,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigSpec {
    pub k_min: i64,
    /// `[re, im]` per coefficient, starting at `k_min`.
    pub coeffs: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    /// `[numerator, denominator]` in fractions of a full turn.
    pub lo: [i64; 2],
    pub hi: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharSpec {
    pub arcs: Vec<ArcSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpecFile {
    pub scale: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trig: Option<TrigSpec>,
    #[serde(default, rename = "char", skip_serializing_if = "Option::is_none")]
    pub char_: Option<CharSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

const TOP_KEYS: &[&str] = &["scale", "kind", "trig", "char", "name", "provenance"];
const TRIG_KEYS: &[&str] = &["k_min", "coeffs"];
const CHAR_KEYS: &[&str] = &["arcs"];
const ARC_KEYS: &[&str] = &["lo", "hi"];

fn strip_unknown(obj: &mut Value, known: &[&str], path: &str, found: &mut Vec<String>) {
    if let Value::Object(map) = obj {
        let unknown: Vec<String> = map
            .keys()
            .filter(|k| !known.contains(&k.as_str()))
            .cloned()
            .collect();
        for k in unknown {
            map.remove(&k);
            found.push(format!("{path}.{k}"));
        }
    }
}

/// Remove fields outside the schema, returning their paths.
fn strip_all_unknown(doc: &mut Value) -> Vec<String> {
    let mut found = Vec::new();
    strip_unknown(doc, TOP_KEYS, "$", &mut found);
    if let Some(t) = doc.get_mut("trig") {
        strip_unknown(t, TRIG_KEYS, "$.trig", &mut found);
    }
    if let Some(c) = doc.get_mut("char") {
        strip_unknown(c, CHAR_KEYS, "$.char", &mut found);
        if let Some(Value::Array(arcs)) = c.get_mut("arcs") {
            for (i, a) in arcs.iter_mut().enumerate() {
                strip_unknown(a, ARC_KEYS, &format!("$.char.arcs[{i}]"), &mut found);
            }
        }
    }
    found
}

impl FilterSpecFile {
    /// Parse spec text. Unknown fields are an error unless `lenient`, in
    /// which case they are dropped and returned as warnings.
    pub fn parse(text: &str, lenient: bool) -> Result<(FilterSpecFile, Vec<String>), CliError> {
        let mut doc: Value =
            serde_json::from_str(text).map_err(|e| CliError::Schema(format!("{e}")))?;
        let unknown = strip_all_unknown(&mut doc);
        if !unknown.is_empty() && !lenient {
            return Err(CliError::Schema(format!("unknown field {}", unknown[0])));
        }
        let spec: FilterSpecFile =
            serde_json::from_value(doc).map_err(|e| CliError::Schema(format!("{e}")))?;
        let warnings = unknown
            .into_iter()
            .map(|p| format!("ignored unknown field {p}"))
            .collect();
        Ok((spec, warnings))
    }

    pub fn read(
        path: &Path,
        lenient: bool,
    ) -> Result<(FilterSpecFile, Vec<String>, Vec<u8>), CliError> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        let (spec, warnings) = Self::parse(text, lenient)?;
        Ok((spec, warnings, bytes))
    }

    pub fn to_filter(&self) -> Result<Filter, CliError> {
        match self.kind {
            Kind::Trig => {
                if self.char_.is_some() {
                    return Err(CliError::Schema("$.char given for a trig filter".into()));
                }
                let t = self
                    .trig
                    .as_ref()
                    .ok_or_else(|| CliError::Schema("missing field $.trig".into()))?;
                for (i, c) in t.coeffs.iter().enumerate() {
                    if !c[0].is_finite() || !c[1].is_finite() {
                        return Err(CliError::Schema(format!(
                            "$.trig.coeffs[{i}] is not finite"
                        )));
                    }
                }
                let coeffs = t
                    .coeffs
                    .iter()
                    .map(|c| Complex64::new(c[0], c[1]))
                    .collect();
                Ok(Filter::trig(
                    self.scale,
                    TrigPolynomial::new(t.k_min, coeffs),
                )?)
            }
            Kind::Char => {
                if self.trig.is_some() {
                    return Err(CliError::Schema(
                        "$.trig given for a characteristic filter".into(),
                    ));
                }
                let c = self
                    .char_
                    .as_ref()
                    .ok_or_else(|| CliError::Schema("missing field $.char".into()))?;
                let mut pieces = Vec::new();
                for (i, a) in c.arcs.iter().enumerate() {
                    if a.lo[1] <= 0 || a.hi[1] <= 0 {
                        return Err(CliError::Schema(format!(
                            "$.char.arcs[{i}]: denominators must be positive"
                        )));
                    }
                    let lo = rat(a.lo[0] as i128, a.lo[1] as i128);
                    let hi = rat(a.hi[0] as i128, a.hi[1] as i128);
                    if hi <= lo || hi - lo > rat(1, 1) {
                        return Err(CliError::Schema(format!(
                            "$.char.arcs[{i}]: need lo < hi <= lo + 1"
                        )));
                    }
                    pieces.push((lo, hi));
                }
                let arcs = ArcSet::from_disjoint_intervals(pieces)?;
                Ok(Filter::characteristic(self.scale, arcs)?)
            }
        }
    }

    pub fn from_filter(
        m: &Filter,
        name: Option<String>,
        provenance: Option<String>,
    ) -> FilterSpecFile {
        let (kind, trig, char_) = match m.kind() {
            FilterKind::Trig(p) => (
                Kind::Trig,
                Some(TrigSpec {
                    k_min: p.min_index(),
                    coeffs: p.coeffs().iter().map(|c| [c.re, c.im]).collect(),
                }),
                None,
            ),
            FilterKind::Characteristic(e) => {
                let arcs = e
                    .signed_arcs()
                    .iter()
                    .map(|a| ArcSpec {
                        lo: fraction_pair(&a.lo),
                        hi: fraction_pair(&a.hi),
                    })
                    .collect();
                (Kind::Char, None, Some(CharSpec { arcs }))
            }
        };
        FilterSpecFile {
            scale: m.scale(),
            kind,
            trig,
            char_,
            name,
            provenance,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }
}

fn fraction_pair(q: &superwav::Rational) -> [i64; 2] {
    [*q.numer() as i64, *q.denom() as i64]
}
