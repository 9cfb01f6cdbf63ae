//! Model description files.
//!
//! ```toml
//! [filter]
//! k_min = 0               # optional, defaults to 0
//! values = [1.0, 0.5]     # c(k_min), c(k_min + 1), ...
//!
//! [innovations]
//! kind = "centered_exponential"
//! params = { rate = 1.0 }
//! ```
//!
//! `kind` and its `params`:
//!
//! | kind                   | params                                   |
//! |------------------------|------------------------------------------|
//! | `gaussian`             | `sigma`                                  |
//! | `centered_exponential` | `rate`, optional `negated = false`       |
//! | `centered_gamma`       | `shape`, `scale`, optional `negated`     |
//! | `two_point`            | `p`                                      |
//!
//! Numbers use the TOML grammar, so the decimal separator is always `.`.

use std::collections::BTreeMap;
use std::ops::Range;

use bispec_core::linmodel::Innovations;
use bispec_core::{FilterCoefficients, InnovationSpec, LinearModel};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{CliError, CliResult, Location};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    filter: Spanned<RawFilter>,
    innovations: Spanned<RawInnovations>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    k_min: Option<Spanned<i64>>,
    values: Spanned<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInnovations {
    kind: Spanned<String>,
    #[serde(default)]
    params: Option<Spanned<BTreeMap<String, Spanned<toml::Value>>>>,
}

struct Ctx<'a> {
    origin: &'a str,
    source: &'a str,
}

impl Ctx<'_> {
    fn error(&self, key: &str, span: Range<usize>, message: impl Into<String>) -> CliError {
        CliError::Parse {
            origin: self.origin.to_string(),
            key: key.to_string(),
            location: Location::of_offset(self.source, span.start),
            message: message.into(),
        }
    }

    /// Dotted key path of the assignment or header around byte `offset`.
    fn key_at(&self, offset: usize) -> String {
        let offset = offset.min(self.source.len());
        let line_start = self.source[..offset].rfind('\n').map_or(0, |i| i + 1);
        let line_end = self.source[offset..]
            .find('\n')
            .map_or(self.source.len(), |i| offset + i);
        let line = self.source[line_start..line_end].trim();
        if let Some(header) = line.strip_prefix('[') {
            return header.trim_end_matches(']').trim().to_string();
        }
        let table = self.source[..line_start]
            .lines()
            .rev()
            .map(str::trim)
            .find_map(|l| l.strip_prefix('[').map(|h| h.trim_end_matches(']').trim()))
            .unwrap_or("");
        match line.split_once('=') {
            Some((k, _)) if table.is_empty() => k.trim().to_string(),
            Some((k, _)) => format!("{table}.{}", k.trim()),
            None if table.is_empty() => "<document>".to_string(),
            None => table.to_string(),
        }
    }

    fn toml_error(&self, e: toml::de::Error) -> CliError {
        let span = e.span().unwrap_or(0..0);
        let message = e.message().to_string();
        let key = match missing_field(&message) {
            Some(field) => {
                let table = self.key_at(span.start);
                if table == "<document>" {
                    field.to_string()
                } else {
                    format!("{table}.{field}")
                }
            }
            None => self.key_at(span.start),
        };
        self.error(&key, span, message)
    }
}

fn missing_field(message: &str) -> Option<&str> {
    message
        .strip_prefix("missing field `")
        .and_then(|rest| rest.split('`').next())
}

fn param_f64(
    ctx: &Ctx<'_>,
    params: &BTreeMap<String, Spanned<toml::Value>>,
    name: &str,
    whole: Range<usize>,
) -> CliResult<f64> {
    let key = format!("innovations.params.{name}");
    let v = params
        .get(name)
        .ok_or_else(|| ctx.error(&key, whole, format!("missing parameter `{name}`")))?;
    match v.get_ref() {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(ctx.error(
            &key,
            v.span(),
            format!("expected a number, found {}", other.type_str()),
        )),
    }
}

fn param_bool(
    ctx: &Ctx<'_>,
    params: &BTreeMap<String, Spanned<toml::Value>>,
    name: &str,
) -> CliResult<bool> {
    match params.get(name) {
        None => Ok(false),
        Some(v) => v.get_ref().as_bool().ok_or_else(|| {
            ctx.error(
                &format!("innovations.params.{name}"),
                v.span(),
                "expected true or false",
            )
        }),
    }
}

fn innovations(ctx: &Ctx<'_>, raw: &Spanned<RawInnovations>) -> CliResult<InnovationSpec> {
    let inner = raw.get_ref();
    let empty = BTreeMap::new();
    let (params, params_span) = match &inner.params {
        Some(p) => (p.get_ref(), p.span()),
        None => (&empty, raw.span()),
    };
    let allowed: &[&str] = match inner.kind.get_ref().as_str() {
        "gaussian" => &["sigma"],
        "centered_exponential" => &["rate", "negated"],
        "centered_gamma" => &["shape", "scale", "negated"],
        "two_point" => &["p"],
        other => {
            return Err(ctx.error(
                "innovations.kind",
                inner.kind.span(),
                format!(
                    "unknown kind `{other}`; expected gaussian, centered_exponential, \
                     centered_gamma or two_point"
                ),
            ))
        }
    };
    if let Some((name, v)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(ctx.error(
            &format!("innovations.params.{name}"),
            v.span(),
            format!("unknown parameter for kind `{}`", inner.kind.get_ref()),
        ));
    }
    let num = |name| param_f64(ctx, params, name, params_span.clone());
    let family = match inner.kind.get_ref().as_str() {
        "gaussian" => Innovations::Gaussian { sigma: num("sigma")? },
        "centered_exponential" => Innovations::CenteredExponential {
            rate: num("rate")?,
            negated: param_bool(ctx, params, "negated")?,
        },
        "centered_gamma" => Innovations::CenteredGamma {
            shape: num("shape")?,
            scale: num("scale")?,
            negated: param_bool(ctx, params, "negated")?,
        },
        _ => Innovations::TwoPoint { p: num("p")? },
    };
    InnovationSpec::new(family)
        .map_err(|e| ctx.error("innovations.params", params_span, e.to_string()))
}

/// Parses a model description; `origin` names the input in error messages.
pub fn parse_model(source: &str, origin: &str) -> CliResult<LinearModel> {
    let ctx = Ctx { origin, source };
    let raw: RawModel = toml::from_str(source).map_err(|e| ctx.toml_error(e))?;
    let f = raw.filter.get_ref();
    let k_min = f.k_min.as_ref().map_or(0, |k| *k.get_ref());
    let filter = FilterCoefficients::new(k_min, f.values.get_ref().clone())
        .map_err(|e| ctx.error("filter.values", f.values.span(), e.to_string()))?;
    Ok(LinearModel::new(filter, innovations(&ctx, &raw.innovations)?))
}

/// Parses an inline model: the file grammar with `;` allowed as line separator.
pub fn parse_inline_model(text: &str) -> CliResult<LinearModel> {
    parse_model(&text.replace(';', "\n"), "<inline model>")
}

#[derive(Serialize)]
struct OutModel<'a> {
    filter: OutFilter<'a>,
    innovations: OutInnovations,
}

#[derive(Serialize)]
struct OutFilter<'a> {
    k_min: i64,
    values: &'a [f64],
}

#[derive(Serialize)]
struct OutInnovations {
    kind: &'static str,
    params: BTreeMap<&'static str, toml::Value>,
}

/// Model description text that [`parse_model`] reads back unchanged.
pub fn model_to_toml(model: &LinearModel) -> CliResult<String> {
    let mut params = BTreeMap::new();
    match model.innovations.family() {
        Innovations::Gaussian { sigma } => {
            params.insert("sigma", toml::Value::Float(sigma));
        }
        Innovations::CenteredExponential { rate, negated } => {
            params.insert("rate", toml::Value::Float(rate));
            params.insert("negated", toml::Value::Boolean(negated));
        }
        Innovations::CenteredGamma {
            shape,
            scale,
            negated,
        } => {
            params.insert("shape", toml::Value::Float(shape));
            params.insert("scale", toml::Value::Float(scale));
            params.insert("negated", toml::Value::Boolean(negated));
        }
        Innovations::TwoPoint { p } => {
            params.insert("p", toml::Value::Float(p));
        }
    }
    let out = OutModel {
        filter: OutFilter {
            k_min: model.filter.k_min(),
            values: model.filter.values(),
        },
        innovations: OutInnovations {
            kind: model.innovations.kind_name(),
            params,
        },
    };
    toml::to_string(&out).map_err(|e| CliError::Serialize(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "[filter]\nk_min = -1\nvalues = [1.0, 2, 1.0]\n\n\
                        [innovations]\nkind = \"centered_exponential\"\nparams = { rate = 2.0 }\n";

    fn key_of(e: CliError) -> (String, Location) {
        match e {
            CliError::Parse { key, location, .. } => (key, location),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn parses_documented_example() {
        let m = parse_model(GOOD, "t").unwrap();
        assert_eq!(m.filter.k_min(), -1);
        assert_eq!(m.filter.values(), &[1.0, 2.0, 1.0]);
        assert_eq!(m.innovations.kind_name(), "centered_exponential");
        assert_eq!(m.innovations.cum3(), 2.0 / 8.0);
    }

    #[test]
    fn round_trips_through_text() {
        for m in [
            parse_model(GOOD, "t").unwrap(),
            parse_inline_model(
                "filter.values=[0.1, -0.3];innovations.kind=\"centered_gamma\";\
                 innovations.params={shape=0.7,scale=3.0,negated=true}",
            )
            .unwrap(),
            parse_inline_model(
                "filter.values=[1];innovations.kind=\"two_point\";innovations.params={p=0.2}",
            )
            .unwrap(),
        ] {
            let text = model_to_toml(&m).unwrap();
            assert_eq!(parse_model(&text, "rt").unwrap(), m, "{text}");
        }
    }

    #[test]
    fn names_offending_keys() {
        let bad = GOOD.replace("[1.0, 2, 1.0]", "\"oops\"");
        let (key, loc) = key_of(parse_model(&bad, "t").unwrap_err());
        assert_eq!(key, "filter.values");
        assert_eq!(loc, Location { line: 3, column: 10 });

        let bad = GOOD.replace("rate = 2.0", "rte = 2.0");
        assert_eq!(key_of(parse_model(&bad, "t").unwrap_err()).0, "innovations.params.rte");

        let bad = GOOD.replace("rate = 2.0", "rate = -2.0");
        assert_eq!(key_of(parse_model(&bad, "t").unwrap_err()).0, "innovations.params");

        let bad = GOOD.replace("centered_exponential", "cauchy");
        let (key, loc) = key_of(parse_model(&bad, "t").unwrap_err());
        assert_eq!(key, "innovations.kind");
        assert_eq!(loc.line, 6);

        let bad = GOOD.replace("values = [1.0, 2, 1.0]\n", "");
        assert_eq!(key_of(parse_model(&bad, "t").unwrap_err()).0, "filter.values");

        let bad = GOOD.replace("[1.0, 2, 1.0]", "[0.0, 1.0]");
        assert_eq!(key_of(parse_model(&bad, "t").unwrap_err()).0, "filter.values");

        let bad = GOOD.replace("k_min", "kmin");
        assert_eq!(key_of(parse_model(&bad, "t").unwrap_err()).0, "filter.kmin");
    }

    #[test]
    fn location_counts_characters() {
        assert_eq!(Location::of_offset("ab\ncd", 4), Location { line: 2, column: 2 });
        assert_eq!(Location::of_offset("", 0), Location { line: 1, column: 1 });
    }
}
