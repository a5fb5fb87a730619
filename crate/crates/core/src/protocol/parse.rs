use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde_json::{Map, Value};

use super::actions::{to_command, AgentAction, AgentCommand, ParamValue};
use super::{WireError, WireErrorCode};
use crate::world::Camera;

/// Parameters that carry coordinates and are coerced from numeric strings.
const NUMERIC_KEYS: [&str; 3] = ["x", "y", "zoom"];

/// Byte span of the balanced `{...}` starting at `start`, honouring JSON
/// string literals.
fn balanced_end(s: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (i, &c) in s.iter().enumerate().skip(start) {
        if in_str {
            match c {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            b'"' => in_str = true,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// Drops commas that directly precede a closing brace or bracket.
fn strip_trailing_commas(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut in_str = false;
    let mut escaped = false;
    for (i, &c) in chars.iter().enumerate() {
        if in_str {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_str = false;
            }
        } else if c == '"' {
            in_str = true;
        } else if c == ',' {
            let next = chars[i + 1..].iter().find(|c| !c.is_whitespace());
            if matches!(next, Some('}') | Some(']')) {
                continue;
            }
        }
        out.push(c);
    }
    out
}

fn parse_object(candidate: &str) -> Option<Map<String, Value>> {
    let v = serde_json::from_str::<Value>(candidate)
        .or_else(|_| serde_json::from_str::<Value>(&strip_trailing_commas(candidate)))
        .ok()?;
    match v {
        Value::Object(m) => Some(m),
        _ => None,
    }
}

fn param_value(key: &str, v: &Value) -> Option<ParamValue> {
    match v {
        Value::Bool(b) => Some(ParamValue::Bool(*b)),
        Value::Number(n) => n.as_f64().map(ParamValue::Number),
        Value::String(t) if NUMERIC_KEYS.contains(&key) => Some(
            t.trim()
                .parse::<f64>()
                .map(ParamValue::Number)
                .unwrap_or_else(|_| ParamValue::Text(t.clone())),
        ),
        Value::String(t) => Some(ParamValue::Text(t.clone())),
        _ => None,
    }
}

fn shape(m: &Map<String, Value>) -> Option<AgentAction> {
    let name = m.get("action_name")?.as_str()?.trim().to_lowercase();
    if name.is_empty() {
        return None;
    }
    let mut params = BTreeMap::new();
    match m.get("params") {
        None | Some(Value::Null) => {}
        Some(Value::Object(p)) => {
            for (k, v) in p {
                params.insert(k.clone(), param_value(k, v)?);
            }
        }
        Some(_) => return None,
    }
    let analysis = match m.get("analysis") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(v @ (Value::Number(_) | Value::Bool(_))) => v.to_string(),
        Some(_) => return None,
    };
    Some(AgentAction {
        action_name: name,
        params,
        analysis,
    })
}

/// Extracts the first JSON object shaped like an action from free text.
///
/// Tolerates code fences, surrounding prose and trailing commas. This is a
/// structural parse only; registry checks happen in [`to_command`].
pub fn parse_agent_reply(text: &str) -> Result<AgentAction, WireError> {
    let bytes = text.as_bytes();
    let mut saw_object = false;
    for start in (0..bytes.len()).filter(|&i| bytes[i] == b'{') {
        let Some(end) = balanced_end(bytes, start) else {
            continue;
        };
        let Some(obj) = parse_object(&text[start..end]) else {
            continue;
        };
        if let Some(a) = shape(&obj) {
            return Ok(a);
        }
        saw_object = true;
    }
    Err(if saw_object {
        WireError::new(
            WireErrorCode::BadParams,
            "reply JSON does not have the action shape",
        )
    } else {
        WireError::new(WireErrorCode::ParseFailure, "no JSON object in reply")
    })
}

pub fn parse_and_validate(
    text: &str,
    active: Camera,
) -> Result<(AgentAction, AgentCommand), WireError> {
    let a = parse_agent_reply(text)?;
    let cmd = to_command(&a, active)?;
    Ok((a, cmd))
}
