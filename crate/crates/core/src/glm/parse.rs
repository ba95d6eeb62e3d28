use serde::{Deserialize, Serialize};

/// One practice extracted from a generated completion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedPractice {
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// Body of a numbered line (`12. text` or `3) text`), if it is one.
fn numbered_body(line: &str) -> Option<&str> {
    let s = line.trim_start();
    let digits = s.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    let rest = &s[digits..];
    let rest = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')'))?;
    rest.starts_with(char::is_whitespace).then(|| rest.trim())
}

/// Splits at the first `:` or ` - `, whichever comes first.
fn split_title(body: &str) -> (&str, Option<&str>) {
    let colon = body.find(':').map(|i| (i, 1));
    let dash = body.find(" - ").map(|i| (i, 3));
    let cut = match (colon, dash) {
        (Some(c), Some(d)) => Some(if c.0 <= d.0 { c } else { d }),
        (c, d) => c.or(d),
    };
    match cut {
        Some((at, len)) => (body[..at].trim(), Some(body[at + len..].trim())),
        None => (body.trim(), None),
    }
}

struct Item {
    title: String,
    description: Vec<String>,
}

impl Item {
    fn finish(self) -> Option<GeneratedPractice> {
        let description = self.description.join(" ");
        let description = (!description.is_empty()).then_some(description);
        match (self.title.is_empty(), description) {
            (false, description) => Some(GeneratedPractice { title: self.title, description }),
            (true, Some(d)) => Some(GeneratedPractice { title: d, description: None }),
            (true, None) => None,
        }
    }
}

/// Extracts practices from an enumerated-list completion.
///
/// A practice starts on a line beginning with an integer followed by `.` or
/// `)` and whitespace. Its title runs up to the first `:` or ` - `; the rest
/// of the line and any following unnumbered lines form the description.
/// Lines before the first numbered line are ignored. Never fails: text
/// without a numbered line yields an empty list.
pub fn parse_practices(raw: &str) -> Vec<GeneratedPractice> {
    let mut items = Vec::new();
    let mut current: Option<Item> = None;
    for line in raw.lines() {
        if let Some(body) = numbered_body(line) {
            if let Some(item) = current.take() {
                items.push(item);
            }
            let (title, desc) = split_title(body);
            current = Some(Item {
                title: title.to_string(),
                description: desc.filter(|d| !d.is_empty()).map(str::to_string).into_iter().collect(),
            });
        } else if let Some(item) = current.as_mut() {
            let text = line.trim();
            if !text.is_empty() {
                item.description.push(text.to_string());
            }
        }
    }
    items.extend(current);
    items.into_iter().filter_map(Item::finish).collect()
}
