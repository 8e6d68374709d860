//! File formats: matrix JSON, vector JSON, flat parameter files, settings and
//! lattice strings, and the JSON reports.
//!
//! Complex scalars are written as `[re, im]` pairs. Matrices use
//! `{"dims":[dX,dY],"re":[[...]],"im":[[...]]}` in row-major order.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::certify::{SupportKernelOutcome, Verdict};
use crate::error::{Error, Result};
use crate::families::{
    embed_trusted, place_and_filter, CholeskyParams, FamilySpec, HBlockParams, Placement,
    PlacementParams, SpectralParams,
};
use crate::lhslab::ket_from_bloch;
use crate::matcore::{ComplexMatrix, DensityMatrix, Tolerances, C64};
use crate::nullspace::{find_boundary_contact, recognize_filtered_class, ProductNullDatum};
use crate::scaling::xi_t;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    dims: [usize; 2],
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
    /// Written by sampled generators; carried for provenance and ignored here.
    #[serde(default)]
    #[allow(dead_code)]
    seed: Option<u64>,
}

/// Reads a matrix document; the imaginary part may be omitted.
pub fn parse_matrix(text: &str) -> Result<(ComplexMatrix, (usize, usize))> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let (dx, dy) = (doc.dims[0], doc.dims[1]);
    let n = dx
        .checked_mul(dy)
        .filter(|&n| n > 0 && n <= 64)
        .ok_or_else(|| parse_err(format!("unsupported dims {dx}x{dy}")))?;
    let check = |rows: &Vec<Vec<f64>>, part: &str| -> Result<()> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(parse_err(format!("'{part}' must be a {n}x{n} array")));
        }
        Ok(())
    };
    check(&doc.re, "re")?;
    if let Some(im) = &doc.im {
        check(im, "im")?;
    }
    let data = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            C64::new(doc.re[i][j], doc.im.as_ref().map_or(0.0, |im| im[i][j]))
        })
        .collect();
    let m = ComplexMatrix::from_vec(n, n, data)?;
    Ok((m, (dx, dy)))
}

/// Reads a matrix document and validates it as a density matrix.
pub fn parse_state(text: &str, tol: &Tolerances) -> Result<DensityMatrix> {
    let (m, dims) = parse_matrix(text)?;
    DensityMatrix::new(m, dims, tol)
}

pub fn matrix_to_json(m: &ComplexMatrix, dims: (usize, usize)) -> Value {
    let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect()).collect()
    };
    json!({
        "dims": [dims.0, dims.1],
        "re": rows(|z| z.re),
        "im": rows(|z| z.im),
    })
}

pub fn state_to_json(rho: &DensityMatrix) -> Value {
    matrix_to_json(rho.matrix(), rho.dims())
}

pub fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_to_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| complex_to_json(*z)).collect())
}

fn complex_from_value(v: &Value) -> Result<C64> {
    let z = match v {
        Value::Number(x) => C64::new(x.as_f64().ok_or_else(|| parse_err("bad number"))?, 0.0),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| parse_err("complex entries are [re, im] numbers"))?;
            let im = pair[1].as_f64().ok_or_else(|| parse_err("complex entries are [re, im] numbers"))?;
            C64::new(re, im)
        }
        _ => return Err(parse_err("expected a number or an [re, im] pair")),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(z)
}

/// Reads a vector given as a JSON array of reals and/or `[re, im]` pairs.
pub fn parse_vector(text: &str) -> Result<Vec<C64>> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let Value::Array(items) = v else {
        return Err(parse_err("vector must be a JSON array"));
    };
    if items.is_empty() {
        return Err(parse_err("vector is empty"));
    }
    items.iter().map(complex_from_value).collect()
}

/// A generator request: family, optional local placement and optional trusted embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub family: FamilySpec,
    pub placement: Option<PlacementParams>,
    pub embed_dy: Option<usize>,
}

impl GenSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        let mut rho = self.family.build()?;
        if let Some(p) = self.placement {
            rho = place_and_filter(&rho, &Placement::Angles(p), None)?;
        }
        if let Some(dy) = self.embed_dy {
            rho = embed_trusted(&rho, dy)?;
        }
        Ok(rho)
    }
}

struct Params<'a> {
    map: &'a Map<String, Value>,
    used: Vec<&'static str>,
}

impl<'a> Params<'a> {
    fn real(&mut self, key: &'static str) -> Result<f64> {
        self.used.push(key);
        let v = self.map.get(key).ok_or_else(|| parse_err(format!("missing parameter '{key}'")))?;
        let x = v.as_f64().ok_or_else(|| parse_err(format!("parameter '{key}' must be a number")))?;
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(x)
    }

    fn real_or(&mut self, key: &'static str, default: f64) -> Result<f64> {
        if self.map.contains_key(key) {
            self.real(key)
        } else {
            self.used.push(key);
            Ok(default)
        }
    }

    fn complex_or_zero(&mut self, key: &'static str) -> Result<C64> {
        self.used.push(key);
        self.map.get(key).map_or(Ok(C64::new(0.0, 0.0)), complex_from_value)
    }

    fn finish(&self, extra: &[&str]) -> Result<()> {
        for k in self.map.keys() {
            if !self.used.contains(&k.as_str()) && !extra.contains(&k.as_str()) {
                return Err(parse_err(format!("unknown parameter '{k}'")));
            }
        }
        Ok(())
    }
}

/// Family from a flat key-value map; `family` selects the generator.
pub fn family_from_map(map: &Map<String, Value>, extra_keys: &[&str]) -> Result<FamilySpec> {
    let name = map
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("missing string parameter 'family'"))?;
    let mut p = Params { map, used: vec!["family"] };
    let spec = match name {
        "h_block" => FamilySpec::HBlock(HBlockParams {
            h00: p.real("h00")?,
            h11: p.real("h11")?,
            h22: p.real("h22")?,
            h01: p.complex_or_zero("h01")?,
            h02: p.complex_or_zero("h02")?,
            h12: p.complex_or_zero("h12")?,
        }),
        "cholesky" => FamilySpec::Cholesky(CholeskyParams {
            a: p.real("a")?,
            b: p.real("b")?,
            c: p.real("c")?,
            x: p.complex_or_zero("x")?,
            y: p.complex_or_zero("y")?,
            z: p.complex_or_zero("z")?,
        }),
        "spectral" => FamilySpec::Spectral(SpectralParams {
            nu: [p.real("nu1")?, p.real("nu2")?, p.real("nu3")?],
            theta: [p.real_or("theta12", 0.0)?, p.real_or("theta13", 0.0)?, p.real_or("theta23", 0.0)?],
            phi: [p.real_or("phi12", 0.0)?, p.real_or("phi13", 0.0)?, p.real_or("phi23", 0.0)?],
        }),
        "x" => FamilySpec::XFamily {
            a: p.real("a")?,
            b: p.real("b")?,
            c: p.real("c")?,
            z: p.complex_or_zero("z")?,
        },
        "bell_mix" => FamilySpec::BellMix {
            p: p.real("p")?,
            q: p.real("q")?,
            r: p.real("r")?,
        },
        "two_product_one_entangled" => FamilySpec::TwoProductOneEntangled {
            p: p.real("p")?,
            q: p.real("q")?,
            r: p.real("r")?,
            theta: p.real("theta")?,
            phi: p.real_or("phi", 0.0)?,
        },
        "werner" => FamilySpec::Werner { v: p.real("v")? },
        other => return Err(parse_err(format!("unknown family '{other}'"))),
    };
    p.finish(extra_keys)?;
    Ok(spec)
}

pub const FAMILY_NAMES: [&str; 7] = [
    "h_block",
    "cholesky",
    "spectral",
    "x",
    "bell_mix",
    "two_product_one_entangled",
    "werner",
];

const PLACEMENT_KEYS: [&str; 4] = ["theta_a", "phi_a", "theta_b", "phi_b"];

/// Reads a flat JSON parameter file.
///
/// Besides the family parameters it accepts the placement angles
/// `theta_a, phi_a, theta_b, phi_b` (all four or none) and `dy` for embedding
/// into a larger trusted space.
pub fn parse_gen_spec(text: &str) -> Result<GenSpec> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let Value::Object(map) = v else {
        return Err(parse_err("parameter file must be a JSON object"));
    };
    if let Some((k, _)) = map.iter().find(|(_, v)| v.is_object()) {
        return Err(parse_err(format!("parameter '{k}' is nested; parameter files are flat")));
    }
    let mut extra: Vec<&str> = PLACEMENT_KEYS.to_vec();
    extra.push("dy");
    let family = family_from_map(&map, &extra)?;
    let present = PLACEMENT_KEYS.iter().filter(|k| map.contains_key(**k)).count();
    let placement = match present {
        0 => None,
        4 => {
            let get = |k: &str| map[k].as_f64().ok_or_else(|| parse_err(format!("parameter '{k}' must be a number")));
            Some(PlacementParams {
                theta_a: get("theta_a")?,
                phi_a: get("phi_a")?,
                theta_b: get("theta_b")?,
                phi_b: get("phi_b")?,
            })
        }
        _ => return Err(parse_err("placement needs all of theta_a, phi_a, theta_b, phi_b")),
    };
    let embed_dy = match map.get("dy") {
        None => None,
        Some(v) => {
            let dy = v.as_u64().ok_or_else(|| parse_err("'dy' must be a positive integer"))?;
            if !(2..=8).contains(&dy) {
                return Err(parse_err("'dy' must lie in 2..=8"));
            }
            Some(dy as usize)
        }
    };
    Ok(GenSpec { family, placement, embed_dy })
}

/// Untrusted measurement settings for the LHS lab.
#[derive(Debug, Clone, PartialEq)]
pub enum SettingsSpec {
    /// `xi_t = (|0> + t|1>)/sqrt(1+t^2)` for each listed `t`.
    TValues(Vec<f64>),
    /// Explicit Bloch directions.
    Directions(Vec<[f64; 3]>),
}

impl SettingsSpec {
    pub fn kets(&self) -> Result<Vec<Vec<C64>>> {
        let e0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let e1 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        match self {
            SettingsSpec::TValues(ts) => Ok(ts.iter().map(|&t| xi_t(&e0, &e1, t)).collect()),
            SettingsSpec::Directions(ds) => ds.iter().map(|d| ket_from_bloch(*d)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SettingsSpec::TValues(v) => v.len(),
            SettingsSpec::Directions(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let x: f64 = s.trim().parse().map_err(|_| parse_err(format!("'{}' is not a number", s.trim())))?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(x)
}

/// `t:0.2,0.1,0.05` or `dirs:x,y,z;x,y,z`.
pub fn parse_settings(text: &str) -> Result<SettingsSpec> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("t:") {
        let ts = rest.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
        if ts.iter().any(|&t| t < 0.0) {
            return Err(parse_err("t values must be nonnegative"));
        }
        Ok(SettingsSpec::TValues(ts))
    } else if let Some(rest) = text.strip_prefix("dirs:") {
        let dirs = rest
            .split(';')
            .map(|d| {
                let c = d.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
                if c.len() != 3 {
                    return Err(parse_err("directions have three components"));
                }
                if c.iter().all(|&x| x == 0.0) {
                    return Err(Error::ZeroVector);
                }
                Ok([c[0], c[1], c[2]])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SettingsSpec::Directions(dirs))
    } else {
        Err(parse_err("settings must start with 't:' or 'dirs:'"))
    }
}

/// Cartesian lattice of named parameter axes; the first axis varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub axes: Vec<(String, Vec<f64>)>,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every lattice point as `(name, value)` pairs in axis order.
    pub fn points(&self) -> Vec<Vec<(String, f64)>> {
        let total = self.len();
        (0..total)
            .map(|mut k| {
                let mut idx = vec![0; self.axes.len()];
                for (a, (_, vals)) in self.axes.iter().enumerate().rev() {
                    idx[a] = k % vals.len();
                    k /= vals.len();
                }
                self.axes
                    .iter()
                    .zip(&idx)
                    .map(|((name, vals), &i)| (name.clone(), vals[i]))
                    .collect()
            })
            .collect()
    }
}

const MAX_LATTICE_POINTS: usize = 1_000_000;

/// `name=value` or `name=start:stop:count` items separated by `;`.
///
/// Complex parameters are split into `name.re` and `name.im` axes.
pub fn parse_lattice(text: &str) -> Result<Lattice> {
    let mut axes: Vec<(String, Vec<f64>)> = Vec::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, spec) = item
            .split_once('=')
            .ok_or_else(|| parse_err(format!("lattice item '{item}' needs '='")))?;
        let name = name.trim();
        if name.is_empty() || axes.iter().any(|(n, _)| n == name) {
            return Err(parse_err(format!("bad or repeated axis name '{name}'")));
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let values = match parts.as_slice() {
            [v] => vec![parse_f64(v)?],
            [a, b, n] => {
                let (a, b) = (parse_f64(a)?, parse_f64(b)?);
                let n: usize = n.trim().parse().map_err(|_| parse_err("lattice count must be an integer"))?;
                if n > MAX_LATTICE_POINTS {
                    return Err(parse_err("lattice axis too long"));
                }
                match n {
                    0 => vec![],
                    1 => vec![a],
                    _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
                }
            }
            _ => return Err(parse_err(format!("lattice item '{item}' must be value or start:stop:count"))),
        };
        axes.push((name.to_string(), values));
    }
    if axes.is_empty() {
        return Err(parse_err("lattice has no axes"));
    }
    let lat = Lattice { axes };
    if lat.axes.iter().try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len().max(1))).is_none_or(|n| n > MAX_LATTICE_POINTS) {
        return Err(parse_err("lattice too large"));
    }
    Ok(lat)
}

/// Turns a lattice point into a flat parameter map, merging `name.re`/`name.im` into `[re, im]`.
pub fn point_to_map(family: &str, point: &[(String, f64)]) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    map.insert("family".into(), Value::String(family.into()));
    for (name, value) in point {
        if let Some((base, part)) = name.rsplit_once('.') {
            let entry = map.entry(base.to_string()).or_insert_with(|| json!([0.0, 0.0]));
            let Value::Array(pair) = entry else {
                return Err(parse_err(format!("axis '{name}' clashes with a real parameter")));
            };
            match part {
                "re" => pair[0] = json!(value),
                "im" => pair[1] = json!(value),
                _ => return Err(parse_err(format!("complex axis '{name}' must end in .re or .im"))),
            }
        } else {
            if map.contains_key(name) {
                return Err(parse_err(format!("axis '{name}' clashes with a complex parameter")));
            }
            map.insert(name.clone(), json!(value));
        }
    }
    Ok(map)
}

/// Fills a missing `r` as `1 - p - q` for the three-weight families, so that
/// lattices can sweep `p` and `q` alone.
pub fn complete_weights(map: &mut Map<String, Value>) {
    let family = map.get("family").and_then(Value::as_str).unwrap_or_default();
    if !matches!(family, "bell_mix" | "two_product_one_entangled") || map.contains_key("r") {
        return;
    }
    if let (Some(p), Some(q)) = (map.get("p").and_then(Value::as_f64), map.get("q").and_then(Value::as_f64)) {
        // clamp rounding noise such as 1 - 0.7 - 0.3 < 0
        let r = 1.0 - p - q;
        map.insert("r".into(), json!(if r.abs() < 1e-12 { 0.0 } else { r }));
    }
}

pub fn datum_to_json(d: &ProductNullDatum) -> Value {
    json!({
        "alpha": vector_to_json(&d.alpha),
        "beta": vector_to_json(&d.beta),
        "residual": d.residual,
    })
}

fn support_kernel_to_json(s: &SupportKernelOutcome) -> Value {
    let d = &s.decomposition;
    json!({
        "fires": s.fires,
        "rank_a": d.rank_a,
        "coupling_norm": d.coupling.frobenius_norm(),
        "v": complex_to_json(d.v),
        "npt_minor": s.npt_minor,
        "phi": d.phi.as_deref().map(vector_to_json),
        "beta": d.beta.as_deref().map(vector_to_json),
    })
}

pub fn verdict_to_json(v: &Verdict) -> Value {
    json!({
        "npt": v.npt,
        "min_pt_eigenvalue": v.min_pt_eigenvalue,
        "steerable_AtoB": v.steerable_a_to_b.as_str(),
        "steerable_BtoA": v.steerable_b_to_a.as_str(),
        "mechanism": v.mechanism.as_str(),
        "coherence": complex_to_json(v.coherence),
        "w_bd": v.w_bd,
        "boundary_minor": v.boundary_minor,
        "contact": v.contact.as_ref().map(datum_to_json),
        "support_kernel": v.support_kernel.as_ref().map(support_kernel_to_json),
    })
}

/// `{found, alpha, beta, residual, filtered_class, coherence}` for a two-qubit state.
pub fn contact_report(rho: &DensityMatrix, tol: &Tolerances) -> Result<Value> {
    let Some(d) = find_boundary_contact(rho, tol)? else {
        return Ok(json!({
            "found": false,
            "alpha": null,
            "beta": null,
            "residual": null,
            "filtered_class": false,
            "coherence": null,
        }));
    };
    let witness = recognize_filtered_class(rho, &d, tol)?;
    Ok(json!({
        "found": true,
        "alpha": vector_to_json(&d.alpha),
        "beta": vector_to_json(&d.beta),
        "residual": d.residual,
        "filtered_class": witness.is_some(),
        "coherence": witness.map(|w| complex_to_json(w.coherence)),
    }))
}
