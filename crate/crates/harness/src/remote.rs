//! Blocking HTTP clients: a static-question agent and a remote judge.

use std::time::Duration;

use dronebench_core::metrics::{Judge, JudgeError, JudgeRequest};
use dronebench_core::protocol::RegionView;
use dronebench_core::staticeval::{QAItem, StaticAgent};
use serde_json::{json, Value};

fn agent(timeout: Duration) -> ureq::Agent {
    ureq::AgentBuilder::new().timeout(timeout).build()
}

/// Posts each question as JSON and takes the answer from `{"answer": ...}`
/// or, failing that, the raw body text.
#[derive(Debug, Clone)]
pub struct HttpAgent {
    url: String,
    client: ureq::Agent,
}

impl HttpAgent {
    pub fn new(url: &str, timeout: Duration) -> Self {
        HttpAgent {
            url: url.into(),
            client: agent(timeout),
        }
    }
}

pub fn question_payload(item: &QAItem) -> Value {
    json!({
        "id": item.id,
        "qtype": item.qtype,
        "question": item.question,
        "image_ref": item.image_ref,
        "regions": item.regions.iter().map(RegionView::from).collect::<Vec<_>>(),
    })
}

impl StaticAgent for HttpAgent {
    fn answer(&mut self, item: &QAItem) -> Result<String, String> {
        let resp = self
            .client
            .post(&self.url)
            .send_json(question_payload(item))
            .map_err(|e| e.to_string())?;
        let body = resp.into_string().map_err(|e| e.to_string())?;
        Ok(match serde_json::from_str::<Value>(&body) {
            Ok(Value::Object(m)) => match m.get("answer") {
                Some(Value::String(s)) => s.clone(),
                _ => body,
            },
            _ => body,
        })
    }
}

/// Judge service speaking `{"prompt","reference","candidate","rubric"}` in,
/// `{"score": <0..=10>}` out.
#[derive(Debug, Clone)]
pub struct RemoteJudge {
    url: String,
    client: ureq::Agent,
}

impl RemoteJudge {
    pub fn new(url: &str, timeout: Duration) -> Self {
        RemoteJudge {
            url: url.into(),
            client: agent(timeout),
        }
    }
}

impl Judge for RemoteJudge {
    fn score(&mut self, req: &JudgeRequest<'_>) -> Result<f64, JudgeError> {
        let payload = json!({
            "prompt": req.prompt,
            "reference": req.reference,
            "candidate": req.candidate,
            "rubric": req.rubric,
        });
        let resp = match self.client.post(&self.url).send_json(payload) {
            Ok(r) => r,
            Err(ureq::Error::Status(code, _)) if code >= 500 => {
                return Err(JudgeError::Transport(format!("status {code}")))
            }
            Err(ureq::Error::Status(code, _)) => return Err(JudgeError::Malformed(format!("status {code}"))),
            Err(e) => return Err(JudgeError::Transport(e.to_string())),
        };
        let v: Value = resp
            .into_json()
            .map_err(|e| JudgeError::Malformed(e.to_string()))?;
        v.get("score")
            .and_then(Value::as_f64)
            .ok_or_else(|| JudgeError::Malformed(format!("no numeric score in {v}")))
    }
}
