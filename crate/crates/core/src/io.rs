//! Text formats: observation and truth CSVs, chain and curve draws, summary
//! tables, and the priors file.
//!
//! Floating-point values are written with 17 significant digits so that a
//! write followed by a read reproduces every value exactly.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::diagnostics::Summary;
use crate::error::{Error, Result};
use crate::gibbs::ParameterTable;
use crate::mixture::{MixturePriors, COMPONENTS};
use crate::poly_dlm::DlmPriors;

/// Round-trippable decimal form of `v`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str, line: u64) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::Data(format!("line {line}: '{field}' is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Data(format!("line {line}: value {v} is not finite")))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Data(e.to_string())
}

fn io_error(e: std::io::Error) -> Error {
    Error::Data(e.to_string())
}

fn raw_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r)
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// Reads a series from a one-column (`value`) or two-column
/// (`index,value`) CSV. A first row whose value is not numeric is taken as
/// a header.
pub fn read_series<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut width = None;
    for (i, rec) in raw_reader(r).records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if !(1..=2).contains(&rec.len()) {
            return Err(Error::Data(format!(
                "line {line}: expected 1 or 2 columns, found {}",
                rec.len()
            )));
        }
        if *width.get_or_insert(rec.len()) != rec.len() {
            return Err(Error::Data(format!(
                "line {line}: inconsistent column count"
            )));
        }
        let field = &rec[rec.len() - 1];
        if i == 0 && field.parse::<f64>().is_err() {
            continue;
        }
        out.push(parse_f64(field, line)?);
    }
    if out.is_empty() {
        return Err(Error::Data("no observations found".into()));
    }
    Ok(out)
}

/// Writes `index,<name>` rows with 1-based indices.
pub fn write_series<W: Write>(mut w: W, name: &str, values: &[f64]) -> Result<()> {
    writeln!(w, "index,{name}").map_err(io_error)?;
    for (t, v) in values.iter().enumerate() {
        writeln!(w, "{},{}", t + 1, format_f64(*v)).map_err(io_error)?;
    }
    Ok(())
}

/// True weights and, for mixture designs, allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub alpha: Vec<f64>,
    pub z: Option<Vec<bool>>,
}

pub fn write_truth<W: Write>(mut w: W, alpha: &[f64], z: Option<&[bool]>) -> Result<()> {
    match z {
        Some(z) => {
            if z.len() != alpha.len() {
                return Err(Error::Data(
                    "allocations and weights differ in length".into(),
                ));
            }
            writeln!(w, "index,alpha,z").map_err(io_error)?;
            for (t, (a, z)) in alpha.iter().zip(z).enumerate() {
                writeln!(w, "{},{},{}", t + 1, format_f64(*a), u8::from(*z)).map_err(io_error)?;
            }
        }
        None => {
            writeln!(w, "index,alpha").map_err(io_error)?;
            for (t, a) in alpha.iter().enumerate() {
                writeln!(w, "{},{}", t + 1, format_f64(*a)).map_err(io_error)?;
            }
        }
    }
    Ok(())
}

fn header_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r)
}

pub fn read_truth<R: Read>(r: R) -> Result<Truth> {
    let mut rdr = header_reader(r);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let has_z = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["index", "alpha"] => false,
        ["index", "alpha", "z"] => true,
        other => {
            return Err(Error::Data(format!(
                "truth header must be index,alpha[,z], found {}",
                other.join(",")
            )))
        }
    };
    let mut alpha = Vec::new();
    let mut z = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        let a = parse_f64(&rec[1], line)?;
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Data(format!(
                "line {line}: weight {a} outside [0, 1]"
            )));
        }
        alpha.push(a);
        if has_z {
            z.push(match &rec[2] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Data(format!(
                        "line {line}: allocation '{other}' is not 0 or 1"
                    )))
                }
            });
        }
    }
    if alpha.is_empty() {
        return Err(Error::Data("truth file has no rows".into()));
    }
    Ok(Truth {
        alpha,
        z: has_z.then_some(z),
    })
}

fn write_matrix<W: Write>(mut w: W, names: &[String], rows: &[Vec<f64>]) -> Result<()> {
    writeln!(w, "{}", names.join(",")).map_err(io_error)?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
        writeln!(w, "{}", line.join(",")).map_err(io_error)?;
    }
    Ok(())
}

fn read_matrix<R: Read>(r: R, what: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = header_reader(r);
    let names: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(String::from)
        .collect();
    if names.is_empty() || names.iter().any(String::is_empty) {
        return Err(Error::Data(format!(
            "{what}: missing or blank column names"
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        rows.push(
            rec.iter()
                .map(|f| parse_f64(f, line))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{what}: no draws")));
    }
    Ok((names, rows))
}

/// One row per kept draw, one column per named scalar.
pub fn write_chain<W: Write>(w: W, table: &ParameterTable) -> Result<()> {
    write_matrix(w, &table.names, &table.rows)
}

pub fn read_chain<R: Read>(r: R) -> Result<ParameterTable> {
    let (names, rows) = read_matrix(r, "chain")?;
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
        return Err(Error::Data(format!("chain: duplicate column '{dup}'")));
    }
    Ok(ParameterTable { names, rows })
}

/// Column name of time `t` (zero-based) in a curve file.
pub fn curve_column(t: usize) -> String {
    format!("alpha_{}", t + 1)
}

/// Full curve draws: one row per kept draw, columns `alpha_1..alpha_T`.
pub fn write_curve_draws<W: Write>(w: W, rows: &[Vec<f64>]) -> Result<()> {
    let len = rows.first().map_or(0, Vec::len);
    let names: Vec<String> = (0..len).map(curve_column).collect();
    write_matrix(w, &names, rows)
}

pub fn read_curve_draws<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let (names, rows) = read_matrix(r, "curve draws")?;
    if let Some((t, n)) = names
        .iter()
        .enumerate()
        .find(|(t, n)| **n != curve_column(*t))
    {
        return Err(Error::Data(format!(
            "curve draws: column {} is '{n}', expected '{}'",
            t + 1,
            curve_column(t)
        )));
    }
    Ok(rows)
}

/// Per-time `index,median,lower,upper`.
pub fn write_curve_summary<W: Write>(mut w: W, curve: &[Summary]) -> Result<()> {
    writeln!(w, "index,median,lower,upper").map_err(io_error)?;
    for (t, s) in curve.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            t + 1,
            format_f64(s.point),
            format_f64(s.lower),
            format_f64(s.upper)
        )
        .map_err(io_error)?;
    }
    Ok(())
}

/// `quantity,median,lower,upper` rows: scalar parameters first, then the
/// curve as `alpha_1..alpha_T`.
pub fn write_summary<W: Write>(
    mut w: W,
    parameters: &[(String, Summary)],
    curve: Option<&[Summary]>,
) -> Result<()> {
    writeln!(w, "quantity,median,lower,upper").map_err(io_error)?;
    let curve_rows = curve
        .unwrap_or(&[])
        .iter()
        .enumerate()
        .map(|(t, s)| (curve_column(t), s));
    for (name, s) in parameters
        .iter()
        .map(|(n, s)| (n.clone(), s))
        .chain(curve_rows)
    {
        writeln!(
            w,
            "{name},{},{},{}",
            format_f64(s.point),
            format_f64(s.lower),
            format_f64(s.upper)
        )
        .map_err(io_error)?;
    }
    Ok(())
}

pub fn read_summary<R: Read>(r: R) -> Result<Vec<(String, Summary)>> {
    let mut rdr = header_reader(r);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["quantity", "median", "lower", "upper"] {
        return Err(Error::Data(
            "summary header must be quantity,median,lower,upper".into(),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        out.push((
            rec[0].to_string(),
            Summary {
                point: parse_f64(&rec[1], line)?,
                lower: parse_f64(&rec[2], line)?,
                upper: parse_f64(&rec[3], line)?,
            },
        ));
    }
    Ok(out)
}

/// Hyperparameter overrides from a priors file.
///
/// The file is TOML with flat numeric keys:
///
/// ```text
/// theta0_1_mean = 0.0    # N(mean, var) prior of θ0_k
/// theta0_1_var = 1.0
/// w_1_shape = 0.01       # Γ(shape, rate) prior of 1/W_k
/// w_1_rate = 0.01
/// v_shape = 0.01         # Γ(shape, rate) prior of 1/V
/// v_rate = 0.01
/// mu1_mean = -0.5        # N(mean, var) prior of μ_k
/// mu1_var = 2.0
/// phi1_shape = 0.01      # Γ(shape, rate) prior of φ_k
/// phi1_rate = 0.01
/// ```
///
/// Keys that are absent keep their defaults.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PriorOverrides {
    values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PriorKey {
    Theta0 { k: usize, mean: bool },
    W { k: usize, shape: bool },
    V { shape: bool },
    Mu { k: usize, mean: bool },
    Phi { k: usize, shape: bool },
}

fn parse_prior_key(key: &str, order: usize) -> Option<PriorKey> {
    let index = |s: &str, limit: usize| -> Option<usize> {
        let k: usize = s.parse().ok()?;
        (1..=limit).contains(&k).then_some(k - 1)
    };
    if let Some(rest) = key.strip_prefix("theta0_") {
        let (k, field) = rest.split_once('_')?;
        let mean = match field {
            "mean" => true,
            "var" => false,
            _ => return None,
        };
        return Some(PriorKey::Theta0 {
            k: index(k, order)?,
            mean,
        });
    }
    if let Some(rest) = key.strip_prefix("w_") {
        let (k, field) = rest.split_once('_')?;
        let shape = match field {
            "shape" => true,
            "rate" => false,
            _ => return None,
        };
        return Some(PriorKey::W {
            k: index(k, order)?,
            shape,
        });
    }
    match key {
        "v_shape" => return Some(PriorKey::V { shape: true }),
        "v_rate" => return Some(PriorKey::V { shape: false }),
        _ => {}
    }
    if let Some(rest) = key.strip_prefix("mu") {
        let (k, field) = rest.split_once('_')?;
        let mean = match field {
            "mean" => true,
            "var" => false,
            _ => return None,
        };
        return Some(PriorKey::Mu {
            k: index(k, COMPONENTS)?,
            mean,
        });
    }
    if let Some(rest) = key.strip_prefix("phi") {
        let (k, field) = rest.split_once('_')?;
        let shape = match field {
            "shape" => true,
            "rate" => false,
            _ => return None,
        };
        return Some(PriorKey::Phi {
            k: index(k, COMPONENTS)?,
            shape,
        });
    }
    None
}

impl PriorOverrides {
    /// Parses a priors file for a model of order `order`.
    pub fn parse(text: &str, order: usize) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(format!("priors file: {}", e.message())))?;
        let mut values = BTreeMap::new();
        for (key, value) in table {
            if parse_prior_key(&key, order).is_none() {
                return Err(Error::Config(format!(
                    "priors file: unknown key '{key}' for model order {order}"
                )));
            }
            let v = match value {
                toml::Value::Float(f) => f,
                toml::Value::Integer(i) => i as f64,
                _ => {
                    return Err(Error::Config(format!(
                        "priors file: '{key}' must be a number"
                    )))
                }
            };
            if !v.is_finite() {
                return Err(Error::Config(format!("priors file: '{key}' is not finite")));
            }
            values.insert(key, v);
        }
        Ok(Self { values })
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when any component-prior key is present.
    pub fn has_mixture_keys(&self) -> bool {
        self.values
            .keys()
            .any(|k| k.starts_with("mu") || k.starts_with("phi"))
    }

    fn entries(&self, order: usize) -> impl Iterator<Item = (PriorKey, f64)> + '_ {
        self.values
            .iter()
            .filter_map(move |(k, v)| parse_prior_key(k, order).map(|key| (key, *v)))
    }

    /// Applies the dynamic-model keys and validates the result.
    pub fn apply_dlm(&self, priors: &mut DlmPriors) -> Result<()> {
        let order = priors.order();
        for (key, v) in self.entries(order) {
            match key {
                PriorKey::Theta0 { k, mean: true } => priors.theta0[k].mean = v,
                PriorKey::Theta0 { k, mean: false } => priors.theta0[k].var = v,
                PriorKey::W { k, shape: true } => priors.w_precision[k].shape = v,
                PriorKey::W { k, shape: false } => priors.w_precision[k].rate = v,
                PriorKey::V { shape: true } => priors.v_precision.shape = v,
                PriorKey::V { shape: false } => priors.v_precision.rate = v,
                PriorKey::Mu { .. } | PriorKey::Phi { .. } => {}
            }
        }
        priors.validate(order)
    }

    /// Applies the component keys and validates the result.
    pub fn apply_mixture(&self, priors: &mut MixturePriors) -> Result<()> {
        for (key, v) in self.entries(usize::MAX) {
            match key {
                PriorKey::Mu { k, mean: true } => priors.mean[k].mean = v,
                PriorKey::Mu { k, mean: false } => priors.mean[k].var = v,
                PriorKey::Phi { k, shape: true } => priors.precision[k].shape = v,
                PriorKey::Phi { k, shape: false } => priors.precision[k].rate = v,
                _ => {}
            }
        }
        priors.validate()
    }
}
