//! JSON descriptor format; rationals travel as `"p/q"` strings.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{BranchPoint, Component, Leg, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, Rational};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDoc {
    #[serde(default)]
    crosscap: bool,
    branch_points: Vec<BranchDoc>,
    #[serde(default)]
    f02: Vec<F02Doc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchDoc {
    id: u32,
    components: Vec<ComponentDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    id: u32,
    r: i64,
    #[serde(default)]
    f01: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    f_half1: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct F02Doc {
    a: [i64; 2],
    b: [i64; 2],
    value: String,
}

fn parse_index_map(m: &BTreeMap<String, String>, what: &str) -> Result<Vec<(u32, Rational)>> {
    m.iter()
        .map(|(k, v)| {
            let k: u32 = k
                .parse()
                .map_err(|_| Error::Parse(format!("{what} index {k:?} is not a positive integer")))?;
            Ok((k, parse_rational(v)?))
        })
        .collect()
}

fn leg(x: [i64; 2]) -> Result<Leg> {
    if x[0] < 0 || x[1] <= 0 || x[0] > u32::MAX as i64 || x[1] > u32::MAX as i64 {
        return Err(Error::Validation(format!("bad leg {:?}", x)));
    }
    Ok((x[0] as u32, x[1] as u32))
}

/// Parses and validates a curve descriptor.
pub fn load_curve(text: &str) -> Result<SpectralCurveLocal> {
    let doc: CurveDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut bps = Vec::new();
    for b in doc.branch_points {
        let mut comps = Vec::new();
        for c in b.components {
            if c.r <= 0 || c.r > u32::MAX as i64 {
                return Err(Error::Validation(format!("component {} has r = {}", c.id, c.r)));
            }
            let f01 = parse_index_map(&c.f01, "f01")?;
            let mut comp = Component::new(c.id, c.r as u32, &f01);
            if let Some(q) = &c.q {
                let q = parse_rational(q)?;
                if !doc.crosscap && !q.is_zero() {
                    return Err(Error::Validation(format!(
                        "component {} sets q but crosscap is disabled",
                        c.id
                    )));
                }
                comp.q = q;
            }
            comp.f_half1 = parse_index_map(&c.f_half1, "f_half1")?
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .collect();
            comps.push(comp);
        }
        bps.push(BranchPoint::new(b.id, comps));
    }
    let f02 = doc
        .f02
        .iter()
        .map(|e| Ok((leg(e.a)?, leg(e.b)?, parse_rational(&e.value)?)))
        .collect::<Result<Vec<_>>>()?;
    SpectralCurveLocal::new(bps, &f02, doc.crosscap)
}

pub fn load_curve_file(path: &Path) -> Result<SpectralCurveLocal> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_curve(&text)
}

/// Serializes a curve; `load_curve(to_json(c)) == c`.
pub fn to_json(curve: &SpectralCurveLocal) -> String {
    let fmt_map = |m: &BTreeMap<u32, Rational>| -> BTreeMap<String, String> {
        m.iter().map(|(k, v)| (k.to_string(), format_rational(v))).collect()
    };
    let doc = CurveDoc {
        crosscap: curve.crosscap,
        branch_points: curve
            .branch_points
            .iter()
            .map(|bp| BranchDoc {
                id: bp.id,
                components: bp
                    .components
                    .iter()
                    .map(|c| ComponentDoc {
                        id: c.id,
                        r: c.r as i64,
                        f01: fmt_map(&c.f01),
                        q: curve.crosscap.then(|| format_rational(&c.q)),
                        f_half1: fmt_map(&c.f_half1),
                    })
                    .collect(),
            })
            .collect(),
        f02: curve
            .f02
            .iter()
            .filter(|((a, b), _)| a <= b)
            .map(|((a, b), v)| F02Doc {
                a: [a.0 as i64, a.1 as i64],
                b: [b.0 as i64, b.1 as i64],
                value: format_rational(v),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("curve serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    const AIRY: &str = r#"{"branch_points":[{"id":0,"components":[{"id":1,"r":2,"f01":{"3":"-1"}}]}]}"#;

    #[test]
    fn loads_airy() {
        let c = load_curve(AIRY).unwrap();
        let comp = c.component(1).unwrap();
        assert_eq!(comp.s(), Some(3));
        assert_eq!(comp.t(), Some(rat(1, 2)));
    }

    #[test]
    fn exceptional_input() {
        let text = r#"{"crosscap":true,"branch_points":[{"id":0,"components":[
            {"id":1,"r":2,"f01":{"3":"-1"},"q":"1/3"},{"id":2,"r":1,"q":"-1/3"}]}]}"#;
        let c = load_curve(text).unwrap();
        assert_eq!(c.component(2).unwrap().s(), None);
        assert_eq!(c.component(1).unwrap().q, rat(1, 3));
    }

    #[test]
    fn rejects_bad_input() {
        let unbalanced = r#"{"crosscap":true,"branch_points":[{"id":0,"components":[
            {"id":1,"r":2,"f01":{"3":"-1"},"q":"1"}]}]}"#;
        assert!(matches!(load_curve(unbalanced), Err(Error::Validation(_))));
        let negative = r#"{"branch_points":[{"id":0,"components":[{"id":1,"r":-2}]}]}"#;
        assert!(matches!(load_curve(negative), Err(Error::Validation(_))));
        assert!(matches!(load_curve("{"), Err(Error::Parse(_))));
        let q_without_crosscap = r#"{"branch_points":[{"id":0,"components":[
            {"id":1,"r":2,"f01":{"3":"-1"},"q":"1"},{"id":2,"r":1,"q":"-1"}]}]}"#;
        assert!(matches!(load_curve(q_without_crosscap), Err(Error::Validation(_))));
    }

    #[test]
    fn round_trip() {
        let text = r#"{"crosscap":true,"branch_points":[{"id":0,"components":[
            {"id":1,"r":2,"f01":{"3":"-1","5":"2/7"},"q":"1/3","f_half1":{"2":"5"}},
            {"id":2,"r":1,"q":"-1/3"}]}],
            "f02":[{"a":[1,1],"b":[2,3],"value":"-4/9"}]}"#;
        let c = load_curve(text).unwrap();
        let again = load_curve(&to_json(&c)).unwrap();
        assert_eq!(c, again);
        assert_eq!(to_json(&c), to_json(&again));
        assert_eq!(c.f02_value((2, 3), (1, 1)), rat(-4, 9));
        assert_eq!(c.component(1).unwrap().f_half1[&2], int(5));
    }
}
