//! Parsing, canonical serialization, and hashing of every artifact:
//! simplicial complex text files, DGA JSON, graded-map and subcomplex
//! JSON, μ-table JSON, and the report shapes the CLI emits.
//!
//! Rationals serialize as strings `"p/q"` in lowest terms (`"p"` when
//! the denominator is 1). Canonical JSON is compact with sorted object
//! keys; [`content_hash`] is the SHA-256 of that form, so equal
//! artifacts hash equally across runs and platforms.

use std::collections::BTreeMap;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Zero};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::dga::{Dga, MultiplicationTable, ValidationReport};
use crate::graded::{Degree, GradedMap, GradedVectorSpace, HomogeneousVector};
use crate::hodge::HodgePackage;
use crate::linalg::{Matrix, Scalar};
use crate::simplicial::SimplicialComplex;
use crate::transfer::{
    LevelReport, MuTable, Subcomplex, VerificationReport, VerifyConfig, VerifyMode, WElement,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------
// scalars

pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("malformed rational `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
    let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{text}`")));
    }
    Ok(BigRational::new(num, den))
}

fn scalars_to_json(coords: &[Scalar]) -> Value {
    Value::Array(coords.iter().map(|c| Value::String(format_scalar(c))).collect())
}

fn json_to_scalars(value: &Value) -> Result<Vec<Scalar>> {
    value
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of rationals".into()))?
        .iter()
        .map(|v| {
            v.as_str()
                .ok_or_else(|| Error::Parse("rationals must be strings".into()))
                .and_then(parse_scalar)
        })
        .collect()
}

fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| scalars_to_json(m.row(r)))
            .collect(),
    )
}

fn json_to_matrix(value: &Value, rows: usize, cols: usize) -> Result<Matrix> {
    let data = value
        .as_array()
        .ok_or_else(|| Error::Parse("expected a matrix (array of rows)".into()))?;
    if data.len() != rows {
        return Err(Error::Parse(format!(
            "matrix has {} rows, expected {rows}",
            data.len()
        )));
    }
    let mut out = Vec::with_capacity(rows);
    for row in data {
        let row = json_to_scalars(row)?;
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "matrix row has {} entries, expected {cols}",
                row.len()
            )));
        }
        out.push(row);
    }
    Ok(if rows == 0 {
        Matrix::zeros(0, cols)
    } else {
        Matrix::from_rows(out)
    })
}

fn parse_degree(key: &str) -> Result<Degree> {
    key.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("malformed degree key `{key}`")))
}

// ---------------------------------------------------------------------
// simplicial complex text format

/// One maximal simplex per non-empty line, vertices separated by
/// whitespace; `#` starts a comment. A header line `vertices: a b c`
/// fixes the vertex order, which otherwise follows first appearance.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex> {
    let mut order: Vec<String> = Vec::new();
    let mut fixed_order = false;
    let mut facet_lines: Vec<Vec<String>> = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vertices:") {
            order = rest.split_whitespace().map(String::from).collect();
            fixed_order = true;
            continue;
        }
        facet_lines.push(line.split_whitespace().map(String::from).collect());
    }
    if facet_lines.is_empty() {
        return Err(Error::Parse("no simplices in input".into()));
    }
    if !fixed_order {
        for facet in &facet_lines {
            for v in facet {
                if !order.contains(v) {
                    order.push(v.clone());
                }
            }
        }
    }
    let index: BTreeMap<&str, usize> =
        order.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut facets = Vec::new();
    for facet in &facet_lines {
        let mut simplex = Vec::with_capacity(facet.len());
        for v in facet {
            let &i = index
                .get(v.as_str())
                .ok_or_else(|| Error::Parse(format!("vertex `{v}` not in the declared order")))?;
            if simplex.contains(&i) {
                return Err(Error::Parse(format!("repeated vertex `{v}` in a simplex")));
            }
            simplex.push(i);
        }
        facets.push(simplex);
    }
    SimplicialComplex::from_facets(order, facets).map_err(|e| Error::Parse(e.to_string()))
}

// ---------------------------------------------------------------------
// DGA JSON

pub fn serialize_dga(dga: &Dga) -> Value {
    let space = dga.space();
    let mut dims = Map::new();
    let mut labels = Map::new();
    for g in space.degrees() {
        dims.insert(g.to_string(), json!(space.dim(g)));
        labels.insert(g.to_string(), json!(space.labels(g)));
    }
    let mut d_blocks = Map::new();
    for g in space.degrees() {
        if space.dim(g) > 0 && space.dim(g + 1) > 0 {
            let block = dga.differential().block(g);
            if !block.is_zero() {
                d_blocks.insert(g.to_string(), matrix_to_json(&block));
            }
        }
    }
    let mut mult = Map::new();
    for (&(p, q), _) in dga.mult().blocks() {
        let (dp, dq) = (space.dim(p), space.dim(q));
        let tensor: Vec<Value> = (0..dp)
            .map(|i| {
                Value::Array(
                    (0..dq)
                        .map(|j| scalars_to_json(&dga.mult().product_basis(p, i, q, j).coords))
                        .collect(),
                )
            })
            .collect();
        mult.insert(format!("{p},{q}"), Value::Array(tensor));
    }
    let mut out = Map::new();
    out.insert("format".into(), json!("dga"));
    out.insert("name".into(), json!(dga.name()));
    out.insert(
        "degree_range".into(),
        json!([space.min_degree(), space.max_degree()]),
    );
    out.insert("dims".into(), Value::Object(dims));
    out.insert("basis_labels".into(), Value::Object(labels));
    out.insert("d".into(), Value::Object(d_blocks));
    out.insert("mult".into(), Value::Object(mult));
    if let Some(unit) = dga.unit() {
        out.insert("unit".into(), scalars_to_json(&unit.coords));
    }
    Value::Object(out)
}

pub fn parse_dga(value: &Value) -> Result<Dga> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("DGA file must be a JSON object".into()))?;
    if obj.get("format").and_then(Value::as_str) != Some("dga") {
        return Err(Error::Parse("missing or wrong `format` marker (expected \"dga\")".into()));
    }
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .unwrap_or("unnamed")
        .to_string();
    let range = obj
        .get("degree_range")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing degree_range".into()))?;
    let (d_min, d_max) = match (range[0].as_i64(), range[1].as_i64()) {
        (Some(a), Some(b)) if a <= b => (a, b),
        _ => return Err(Error::Parse("malformed degree_range".into())),
    };
    let dims_obj = obj
        .get("dims")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("missing dims".into()))?;
    let labels_obj = obj
        .get("basis_labels")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("missing basis_labels".into()))?;
    let mut dims = Vec::new();
    let mut labels = Vec::new();
    for g in d_min..=d_max {
        let dim = dims_obj
            .get(&g.to_string())
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse(format!("dims missing degree {g}")))? as usize;
        dims.push(dim);
        let lab: Vec<String> = match labels_obj.get(&g.to_string()) {
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| Error::Parse(format!("bad labels at degree {g}: {e}")))?,
            None if dim == 0 => Vec::new(),
            None => return Err(Error::Parse(format!("labels missing degree {g}"))),
        };
        labels.push(lab);
    }
    let space = GradedVectorSpace::new(d_min, dims, labels)
        .map_err(|e| Error::Parse(e.to_string()))?;

    let mut d_blocks = BTreeMap::new();
    if let Some(d_obj) = obj.get("d").and_then(Value::as_object) {
        for (key, block) in d_obj {
            let g = parse_degree(key)?;
            d_blocks.insert(g, json_to_matrix(block, space.dim(g + 1), space.dim(g))?);
        }
    }
    let d = GradedMap::new(space.clone(), space.clone(), 1, d_blocks)
        .map_err(|e| Error::Parse(e.to_string()))?;

    let mut pairs = BTreeMap::new();
    if let Some(mult_obj) = obj.get("mult").and_then(Value::as_object) {
        for (key, tensor) in mult_obj {
            let (p, q) = key
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("malformed degree pair `{key}`")))?;
            let (p, q) = (parse_degree(p)?, parse_degree(q)?);
            let (dp, dq, dpq) = (space.dim(p), space.dim(q), space.dim(p + q));
            let rows = tensor
                .as_array()
                .ok_or_else(|| Error::Parse("mult tensor must be an array".into()))?;
            if rows.len() != dp {
                return Err(Error::Parse(format!(
                    "mult tensor `{key}` has {} rows, expected {dp}",
                    rows.len()
                )));
            }
            let mut block = Matrix::zeros(dpq, dp * dq);
            for (i, row) in rows.iter().enumerate() {
                let cols = row
                    .as_array()
                    .ok_or_else(|| Error::Parse("mult tensor row must be an array".into()))?;
                if cols.len() != dq {
                    return Err(Error::Parse(format!(
                        "mult tensor `{key}` row has {} entries, expected {dq}",
                        cols.len()
                    )));
                }
                for (j, coords) in cols.iter().enumerate() {
                    let coords = json_to_scalars(coords)?;
                    if coords.len() != dpq {
                        return Err(Error::Parse(format!(
                            "product ({key})[{i}][{j}] has {} coordinates, expected {dpq}",
                            coords.len()
                        )));
                    }
                    for (r, c) in coords.into_iter().enumerate() {
                        block.set(r, i * dq + j, c);
                    }
                }
            }
            pairs.insert((p, q), block);
        }
    }
    let mult = MultiplicationTable::new(space.clone(), pairs)
        .map_err(|e| Error::Parse(e.to_string()))?;

    let unit = match obj.get("unit") {
        Some(v) => {
            let coords = json_to_scalars(v)?;
            if coords.len() != space.dim(0) {
                return Err(Error::Parse("unit has the wrong length".into()));
            }
            Some(HomogeneousVector::new(0, coords))
        }
        None => None,
    };

    Dga::new(name, space, d, mult, unit).map_err(|e| Error::Parse(e.to_string()))
}

// ---------------------------------------------------------------------
// graded maps and subcomplexes (used for custom Q and custom W files)

pub fn serialize_graded_map(map: &GradedMap) -> Value {
    let mut blocks = Map::new();
    for (g, block) in map.blocks() {
        if !block.is_zero() {
            blocks.insert(g.to_string(), matrix_to_json(block));
        }
    }
    json!({
        "format": "graded-map",
        "shift": map.shift(),
        "blocks": Value::Object(blocks),
    })
}

/// Parses an endomorphism of `space` with the given blocks; missing
/// blocks are zero.
pub fn parse_graded_map(value: &Value, space: &std::sync::Arc<GradedVectorSpace>) -> Result<GradedMap> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("graded map must be a JSON object".into()))?;
    if obj.get("format").and_then(Value::as_str) != Some("graded-map") {
        return Err(Error::Parse("missing `format: graded-map` marker".into()));
    }
    let shift = obj
        .get("shift")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Parse("missing shift".into()))?;
    let mut blocks = BTreeMap::new();
    if let Some(block_obj) = obj.get("blocks").and_then(Value::as_object) {
        for (key, block) in block_obj {
            let g = parse_degree(key)?;
            blocks.insert(g, json_to_matrix(block, space.dim(g + shift), space.dim(g))?);
        }
    }
    GradedMap::new(space.clone(), space.clone(), shift, blocks)
        .map_err(|e| Error::Parse(e.to_string()))
}

pub fn serialize_subcomplex(w: &Subcomplex) -> Value {
    let mut blocks = Map::new();
    for g in w.ambient().degrees() {
        if w.dim(g) > 0 {
            blocks.insert(g.to_string(), matrix_to_json(&w.inclusion_block(g)));
        }
    }
    json!({ "format": "subcomplex", "blocks": Value::Object(blocks) })
}

pub fn parse_subcomplex(
    value: &Value,
    ambient: &std::sync::Arc<GradedVectorSpace>,
) -> Result<Subcomplex> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("subcomplex must be a JSON object".into()))?;
    if obj.get("format").and_then(Value::as_str) != Some("subcomplex") {
        return Err(Error::Parse("missing `format: subcomplex` marker".into()));
    }
    let mut blocks = BTreeMap::new();
    if let Some(block_obj) = obj.get("blocks").and_then(Value::as_object) {
        for (key, block) in block_obj {
            let g = parse_degree(key)?;
            let rows = ambient.dim(g);
            let cols = block.as_array().and_then(|a| a.first()).map_or(0, |r| {
                r.as_array().map_or(0, Vec::len)
            });
            blocks.insert(g, json_to_matrix(block, rows, cols)?);
        }
    }
    Subcomplex::new(ambient.clone(), blocks)
}

// ---------------------------------------------------------------------
// μ tables

fn w_element_to_json(w: &WElement) -> Value {
    json!({ "degree": w.degree, "coords": scalars_to_json(&w.coords) })
}

fn config_to_json(config: &VerifyConfig) -> Value {
    json!({
        "mode": match config.mode {
            VerifyMode::Exhaustive => "exhaustive",
            VerifyMode::Random => "random",
        },
        "trials": config.trials,
        "seed": config.seed,
        "budget": config.budget,
    })
}

fn json_to_config(value: &Value) -> Result<VerifyConfig> {
    let mode = match value.get("mode").and_then(Value::as_str) {
        Some("exhaustive") => VerifyMode::Exhaustive,
        Some("random") => VerifyMode::Random,
        _ => return Err(Error::Parse("bad verification mode".into())),
    };
    Ok(VerifyConfig {
        mode,
        trials: value.get("trials").and_then(Value::as_u64).unwrap_or(1000) as usize,
        seed: value.get("seed").and_then(Value::as_u64).unwrap_or(0),
        budget: value.get("budget").and_then(Value::as_u64).unwrap_or(100_000) as usize,
    })
}

pub fn serialize_mu_table(table: &MuTable) -> Value {
    let mut dims = Map::new();
    for (&g, &n) in &table.w_dims {
        dims.insert(g.to_string(), json!(n));
    }
    let levels: Vec<Value> = table
        .levels
        .iter()
        .map(|(n, mode, tuples, failures)| {
            json!({ "n": n, "mode": mode, "tuples": tuples, "failures": failures })
        })
        .collect();
    let mut tables = Map::new();
    for (arity, entries) in &table.tables {
        let rows: Vec<Value> = entries
            .iter()
            .map(|(args, value)| {
                json!({
                    "args": args,
                    "degree": value.degree,
                    "value": scalars_to_json(&value.coords),
                })
            })
            .collect();
        tables.insert(arity.to_string(), Value::Array(rows));
    }
    json!({
        "format": "mu-table",
        "algebra_hash": table.algebra_hash,
        "q_hash": table.q_hash,
        "w_dims": Value::Object(dims),
        "max_order": table.max_order,
        "config": config_to_json(&table.config),
        "levels": levels,
        "all_zero": table.all_zero,
        "tables": Value::Object(tables),
    })
}

pub fn parse_mu_table(value: &Value) -> Result<MuTable> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("μ table must be a JSON object".into()))?;
    if obj.get("format").and_then(Value::as_str) != Some("mu-table") {
        return Err(Error::Parse("missing `format: mu-table` marker".into()));
    }
    let text = |key: &str| -> Result<String> {
        obj.get(key)
            .and_then(Value::as_str)
            .map(String::from)
            .ok_or_else(|| Error::Parse(format!("missing `{key}`")))
    };
    let mut w_dims = BTreeMap::new();
    for (key, dim) in obj
        .get("w_dims")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("missing w_dims".into()))?
    {
        w_dims.insert(
            parse_degree(key)?,
            dim.as_u64().ok_or_else(|| Error::Parse("bad dimension".into()))? as usize,
        );
    }
    let levels = obj
        .get("levels")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing levels".into()))?
        .iter()
        .map(|l| {
            Ok((
                l.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Parse("bad level".into()))?
                    as usize,
                l.get("mode").and_then(Value::as_str).unwrap_or("exhaustive").to_string(),
                l.get("tuples").and_then(Value::as_u64).unwrap_or(0) as usize,
                l.get("failures").and_then(Value::as_u64).unwrap_or(0) as usize,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let total_dim: usize = w_dims.values().sum();
    let mut tables: BTreeMap<usize, BTreeMap<Vec<u32>, WElement>> = BTreeMap::new();
    for (arity, rows) in obj
        .get("tables")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("missing tables".into()))?
    {
        let arity: usize = arity
            .parse()
            .map_err(|_| Error::Parse(format!("bad arity key `{arity}`")))?;
        let mut entries = BTreeMap::new();
        for row in rows.as_array().ok_or_else(|| Error::Parse("bad table".into()))? {
            let args: Vec<u32> = serde_json::from_value(
                row.get("args")
                    .cloned()
                    .ok_or_else(|| Error::Parse("entry missing args".into()))?,
            )
            .map_err(|e| Error::Parse(format!("bad args: {e}")))?;
            if args.len() != arity {
                return Err(Error::Parse("entry arity mismatch".into()));
            }
            if args.iter().any(|&i| i as usize >= total_dim) {
                return Err(Error::Parse(format!(
                    "entry index out of range for a {total_dim}-dimensional subcomplex"
                )));
            }
            let degree = row
                .get("degree")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Parse("entry missing degree".into()))?;
            let coords = json_to_scalars(
                row.get("value")
                    .ok_or_else(|| Error::Parse("entry missing value".into()))?,
            )?;
            if coords.len() != w_dims.get(&degree).copied().unwrap_or(0) {
                return Err(Error::Parse(format!(
                    "entry value has {} coordinates for degree {degree}",
                    coords.len()
                )));
            }
            entries.insert(args, WElement::new(degree, coords));
        }
        tables.insert(arity, entries);
    }
    Ok(MuTable {
        algebra_hash: text("algebra_hash")?,
        q_hash: text("q_hash")?,
        w_dims,
        max_order: obj
            .get("max_order")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing max_order".into()))? as usize,
        config: json_to_config(
            obj.get("config").ok_or_else(|| Error::Parse("missing config".into()))?,
        )?,
        levels,
        all_zero: obj.get("all_zero").and_then(Value::as_bool).unwrap_or(false),
        tables,
    })
}

// ---------------------------------------------------------------------
// reports

pub fn validation_report_to_json(report: &ValidationReport) -> Value {
    let failure = report.first_failure.as_ref().map(|f| {
        json!({
            "rule": f.rule,
            "degrees": f.degrees,
            "indices": f.indices,
            "residual": { "degree": f.residual.degree, "coords": scalars_to_json(&f.residual.coords) },
        })
    });
    json!({
        "d_squared_ok": report.d_squared_ok,
        "leibniz_ok": report.leibniz_ok,
        "assoc_ok": report.assoc_ok,
        "first_failure": failure,
    })
}

fn level_to_json(level: &LevelReport) -> Value {
    let failure = level.first_failure.as_ref().map(|f| {
        json!({
            "n": f.n,
            "args": f.args.iter().map(w_element_to_json).collect::<Vec<_>>(),
            "residual": w_element_to_json(&f.residual),
        })
    });
    json!({
        "n": level.n,
        "mode": level.mode,
        "tuples": level.tuples,
        "failures": level.failures,
        "first_failure": failure,
    })
}

pub fn verification_report_to_json(report: &VerificationReport) -> Value {
    json!({
        "all_zero": report.all_zero(),
        "levels": report.levels.iter().map(level_to_json).collect::<Vec<_>>(),
    })
}

pub fn hodge_report_to_json(pkg: &HodgePackage, gram_description: &str) -> Value {
    let space = pkg.space();
    let mut dims = Map::new();
    let mut betti = Map::new();
    for g in space.degrees() {
        if space.dim(g) > 0 {
            dims.insert(g.to_string(), json!(space.dim(g)));
            betti.insert(g.to_string(), json!(pkg.harmonic_dim(g)));
        }
    }
    let mut checks = Map::new();
    for (name, residual) in pkg.spot_check_residuals() {
        checks.insert(name, Value::String(format_scalar(&residual)));
    }
    json!({
        "format": "hodge-report",
        "dims": Value::Object(dims),
        "betti": Value::Object(betti),
        "gram": gram_description,
        "residuals": Value::Object(checks),
    })
}

// ---------------------------------------------------------------------
// hashing

/// SHA-256 of the canonical (compact, sorted-keys) JSON form.
pub fn content_hash(value: &Value) -> String {
    let canonical = serde_json::to_string(value).expect("JSON serialization cannot fail");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the mathematical content: the display name is stripped, so
/// the same algebra hashes equally no matter how it was loaded.
pub fn dga_hash(dga: &Dga) -> String {
    let mut value = serialize_dga(dga);
    value.as_object_mut().expect("DGA serializes to an object").remove("name");
    content_hash(&value)
}

pub fn graded_map_hash(map: &GradedMap) -> String {
    content_hash(&serialize_graded_map(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{builtin_dga, random_dga, RandomDgaProfile};
    use crate::linalg::scalar_ratio;

    #[test]
    fn scalar_round_trip() {
        for text in ["0", "3", "-3", "1/2", "-7/3"] {
            let s = parse_scalar(text).unwrap();
            assert_eq!(format_scalar(&s), text);
        }
        // normalization to lowest terms with positive denominator
        assert_eq!(format_scalar(&parse_scalar("2/4").unwrap()), "1/2");
        assert_eq!(format_scalar(&parse_scalar("1/-2").unwrap()), "-1/2");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("1.5").is_err());
    }

    #[test]
    fn complex_text_parsing() {
        let interval = parse_complex("a b\n").unwrap();
        assert_eq!(interval.num_simplices(), 3);

        let sphere = parse_complex(
            "# boundary of the 3-simplex\na b c\na b d\na c d\nb c d\n",
        )
        .unwrap();
        assert_eq!(sphere.num_simplices(), 14);

        assert!(parse_complex("a a\n").is_err());
        assert!(parse_complex("# only comments\n").is_err());
    }

    #[test]
    fn vertex_order_header() {
        let c = parse_complex("vertices: z y x\nx y\ny z\n").unwrap();
        assert_eq!(c.vertices(), &["z", "y", "x"]);
        // unknown vertex when order is fixed
        assert!(parse_complex("vertices: a b\na c\n").is_err());
    }

    #[test]
    fn dga_round_trip_builtins() {
        for name in crate::dga::BUILTIN_NAMES {
            let dga = builtin_dga(name).unwrap();
            let value = serialize_dga(&dga);
            let back = parse_dga(&value).unwrap();
            assert_eq!(back, dga, "{name}");
        }
    }

    #[test]
    fn dga_round_trip_random() {
        let dga = random_dga(7, &RandomDgaProfile::default()).unwrap();
        let value = serialize_dga(&dga);
        let back = parse_dga(&value).unwrap();
        assert_eq!(back, dga);
        assert_eq!(serialize_dga(&back), value);
    }

    #[test]
    fn malformed_rational_in_dga_rejected() {
        let dga = builtin_dga("interval").unwrap();
        let mut value = serialize_dga(&dga);
        value["d"]["0"][0][0] = Value::String("1/0".into());
        assert!(parse_dga(&value).is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = builtin_dga("sphere2").unwrap();
        let h1 = dga_hash(&a);
        let h2 = dga_hash(&parse_dga(&serialize_dga(&a)).unwrap());
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 64);

        // flipping one structure constant changes the hash
        let mut value = serialize_dga(&a);
        value["mult"]["0,0"][0][0][0] = Value::String("1/2".into());
        let b = parse_dga(&value).unwrap();
        assert_ne!(dga_hash(&a), dga_hash(&b));
    }

    #[test]
    fn hash_ignores_the_display_name() {
        // the same cochain algebra reached through a complex file and
        // through the builtin catalog must hash equally
        let built = builtin_dga("sphere2").unwrap();
        let complex = parse_complex("a b c\na b d\na c d\nb c d\n").unwrap();
        let from_file = crate::dga::build_simplicial_cochain_dga(&complex).unwrap();
        assert_ne!(built.name(), from_file.name());
        assert_eq!(dga_hash(&built), dga_hash(&from_file));
    }

    #[test]
    fn mu_table_round_trip_and_length_validation() {
        use crate::hodge::{build_hodge, identity_gram};
        use crate::transfer::{AInftyStructure, VerifyConfig};
        use std::sync::Arc;

        let dga = Arc::new(builtin_dga("sphere2").unwrap());
        let pkg = build_hodge(dga.clone(), identity_gram(dga.space())).unwrap();
        let structure = AInftyStructure::new(pkg.datum_harmonic().unwrap(), 3);
        let report = structure.verify(3, &VerifyConfig::default()).unwrap();
        let table = MuTable::from_structure(
            &structure,
            &report,
            VerifyConfig::default(),
            dga_hash(&dga),
            "q".into(),
        );
        let value = serialize_mu_table(&table);
        let back = parse_mu_table(&value).unwrap();
        assert_eq!(back.algebra_hash, table.algebra_hash);
        assert_eq!(back.w_dims, table.w_dims);
        assert_eq!(back.tables, table.tables);
        assert_eq!(back.levels, table.levels);
        assert!(back.verify_stored().unwrap().all_zero());

        // dropping a coordinate from a stored value is caught at parse
        let mut bad = value.clone();
        let rows = bad["tables"]["2"].as_array_mut().unwrap();
        let row = rows
            .iter_mut()
            .find(|r| !r["value"].as_array().unwrap().is_empty())
            .unwrap();
        row["value"].as_array_mut().unwrap().pop();
        assert!(parse_mu_table(&bad).is_err());

        // an out-of-range basis index is caught at parse
        let mut bad = value;
        bad["tables"]["1"][0]["args"][0] = json!(999);
        assert!(parse_mu_table(&bad).is_err());
    }

    #[test]
    fn graded_map_round_trip() {
        let dga = builtin_dga("sphere2").unwrap();
        let map = dga.differential();
        let value = serialize_graded_map(map);
        let back = parse_graded_map(&value, dga.space()).unwrap();
        assert_eq!(&back, map);
    }

    #[test]
    fn scalar_strings_in_matrices() {
        let m = Matrix::from_rows(vec![vec![scalar_ratio(-3, 2), scalar_ratio(4, 1)]]);
        let v = matrix_to_json(&m);
        assert_eq!(v[0][0], Value::String("-3/2".into()));
        assert_eq!(v[0][1], Value::String("4".into()));
    }
}
