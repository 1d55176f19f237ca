//! Free-form `--key value` parameters that follow the positional name.

use std::collections::BTreeMap;

use qbessel::identities::Params;

/// Keys that configure the run rather than the function or identity.
const CONFIG_KEYS: &[&str] = &[
    "q",
    "tol",
    "eps-term",
    "eps-tail",
    "max-terms",
    "format",
    "out",
    "seed",
    "form",
    "indices",
    "sweep",
    "count",
];

#[derive(Debug, Default)]
pub struct KeyValues {
    pub config: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
}

/// Splits `--key value` / `--key=value` tokens into run configuration and
/// numeric parameters. Values may start with `-`.
pub fn split(tokens: &[String]) -> Result<KeyValues, String> {
    let mut out = KeyValues::default();
    let mut it = tokens.iter();
    while let Some(tok) = it.next() {
        let key = tok
            .strip_prefix("--")
            .ok_or_else(|| format!("unexpected argument '{tok}' (expected --name value)"))?;
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| format!("missing value for --{key}"))?;
                (key.to_string(), v.clone())
            }
        };
        if key.is_empty() {
            return Err("empty parameter name".into());
        }
        let normalized = key.replace('_', "-");
        let target = if CONFIG_KEYS.contains(&normalized.as_str()) {
            (&mut out.config, normalized)
        } else {
            (&mut out.params, key)
        };
        if target.0.insert(target.1.clone(), value).is_some() {
            return Err(format!("--{} given twice", target.1));
        }
    }
    Ok(out)
}

pub fn parse_f64(key: &str, s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("parameter '{key}' is not a number: '{s}'"))
}

/// Parses numeric parameters; `<name>_im` carries an imaginary part.
pub fn numeric(params: &BTreeMap<String, String>) -> Result<Params, String> {
    params.iter().map(|(k, v)| Ok((k.clone(), parse_f64(k, v)?))).collect()
}

/// `lo:hi` (inclusive) or a single integer.
pub fn parse_range(key: &str, s: &str) -> Result<(i64, i64), String> {
    let bad = || format!("bad range for --{key}: '{s}' (expected lo:hi)");
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn parse_indices(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad index '{t}' in --indices"))
        })
        .collect()
}
