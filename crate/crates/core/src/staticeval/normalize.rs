use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{CanonicalAnswer, QType};
use crate::world::EntityClass;

const NUMBER_WORDS: [&str; 12] = [
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve",
];

/// Extra surface forms accepted for each class noun. Multi-word forms
/// win over their single-word prefixes.
fn class_forms(c: EntityClass) -> &'static [&'static str] {
    match c {
        EntityClass::Vessel => &["vessel", "ship", "boat", "freighter", "tugboat", "cargo ship"],
        EntityClass::Container => &["container", "shipping container"],
        EntityClass::Crane => &["crane", "gantry crane"],
        EntityClass::Building => &["building", "tower", "skyscraper"],
        EntityClass::FireSource => &["fire", "flame", "flames", "blaze"],
        EntityClass::Vehicle => &["vehicle", "car", "sedan"],
        EntityClass::FireTruck => &["fire truck", "fire engine", "ladder truck", "firetruck"],
        EntityClass::RoadNode => &["road intersection", "intersection", "crossroad"],
        EntityClass::PortMarker => &["port marker", "port"],
    }
}

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

fn number(w: &str) -> Option<u32> {
    w.parse::<u32>().ok().or_else(|| {
        NUMBER_WORDS
            .iter()
            .position(|n| *n == w)
            .map(|i| i as u32 + 1)
    })
}

fn clock(ws: &[String]) -> Option<u8> {
    let hour = |n: u32| (1..=12).contains(&n).then_some(n as u8);
    // "5 o'clock" splits into 5, o, clock
    let marked = ws.iter().enumerate().find_map(|(i, w)| {
        let n = number(w)?;
        let rest = &ws[i + 1..];
        let tagged = rest.first().is_some_and(|r| r == "oclock")
            || (rest.len() >= 2 && rest[0] == "o" && rest[1] == "clock");
        tagged.then_some(n)
    });
    match marked {
        Some(n) => hour(n),
        None => ws.iter().find_map(|w| number(w)).and_then(hour),
    }
}

fn region_set(ws: &[String]) -> BTreeSet<u32> {
    let mut ids = BTreeSet::new();
    let mut collecting = false;
    let keyed = ws.iter().any(|w| w == "region" || w == "regions");
    for w in ws {
        match w.as_str() {
            "region" | "regions" => collecting = true,
            "and" => {}
            _ => match number(w) {
                Some(n) if collecting || !keyed => {
                    ids.insert(n);
                }
                _ => collecting = false,
            },
        }
    }
    ids
}

fn class_label(ws: &[String]) -> Option<&'static str> {
    let mut best: Option<(usize, usize, &'static str)> = None;
    for c in EntityClass::ALL {
        for form in class_forms(c) {
            let needle = words(form);
            let Some(at) = (0..ws.len().saturating_sub(needle.len() - 1))
                .find(|&i| ws[i..i + needle.len()] == needle[..])
            else {
                continue;
            };
            // earliest mention wins; on ties the longer phrase
            let better = match best {
                None => true,
                Some((b_at, b_len, _)) => at < b_at || (at == b_at && needle.len() > b_len),
            };
            if better {
                best = Some((at, needle.len(), c.noun()));
            }
        }
    }
    best.map(|b| b.2)
}

fn yes_no(ws: &[String]) -> Option<bool> {
    match ws.first()?.as_str() {
        "yes" | "yeah" | "yep" | "affirmative" | "correct" | "true" => Some(true),
        "no" | "nope" | "negative" | "false" | "not" => Some(false),
        _ => None,
    }
}

/// Reads a free-text reply in the form the question type expects.
pub fn normalize_answer(text: &str, qtype: QType) -> CanonicalAnswer {
    let ws = words(text);
    let parsed = match qtype {
        QType::InfoDis => class_label(&ws).map(|l| CanonicalAnswer::Class { label: l.into() }),
        QType::InfoDet | QType::RelDisRelDis => {
            let ids = region_set(&ws);
            (!ids.is_empty()).then_some(CanonicalAnswer::Regions { ids })
        }
        QType::PosRelDis => clock(&ws).map(|hour| CanonicalAnswer::Clock { hour }),
        QType::Tool => yes_no(&ws).map(|yes| CanonicalAnswer::YesNo { yes }),
        QType::InfoDes | QType::Motion | QType::Plan => {
            (!text.trim().is_empty()).then(|| CanonicalAnswer::Text {
                text: text.trim().into(),
                rubric: None,
            })
        }
    };
    parsed.unwrap_or(CanonicalAnswer::Unparseable)
}

/// Renders an answer so that [`normalize_answer`] reads it back.
pub fn render_answer(a: &CanonicalAnswer) -> String {
    match a {
        CanonicalAnswer::Class { label } => format!("It is a {label}."),
        CanonicalAnswer::Regions { ids } => {
            let v: Vec<String> = ids.iter().map(|i| format!("{i}")).collect();
            match v.as_slice() {
                [one] => format!("Region {one}"),
                [init @ .., last] => format!("Regions {} and {last}", init.join(", ")),
                [] => String::new(),
            }
        }
        CanonicalAnswer::Clock { hour } => format!("{hour} o'clock"),
        CanonicalAnswer::YesNo { yes: true } => "Yes".into(),
        CanonicalAnswer::YesNo { yes: false } => "No".into(),
        CanonicalAnswer::Text { text, .. } => text.clone(),
        CanonicalAnswer::Unparseable => String::new(),
    }
}
