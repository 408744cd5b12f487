//! Optional text-completion backend.
//!
//! Requests and responses are small JSON documents; every exchange is
//! appended verbatim to an audit file so a run can be replayed offline with
//! [`ReplayTransport`].

use std::collections::VecDeque;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Plan, PlannerError};
use crate::world::SkillAction;

pub const ENDPOINT_VAR: &str = "EMAC_WIRE_ENDPOINT";
pub const TOKEN_VAR: &str = "EMAC_WIRE_TOKEN";
pub const REPLAN_MARKER: &str = "Replanned Action Sequence:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    pub prompt: String,
    pub max_tokens: u32,
    pub temperature: f64,
    pub stop: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireResponse {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WireConfig {
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub temperature: f64,
    pub max_tokens: u32,
    pub audit_path: Option<PathBuf>,
}

impl Default for WireConfig {
    fn default() -> Self {
        WireConfig { timeout_secs: 30, max_retries: 3, temperature: 0.0, max_tokens: 256, audit_path: None }
    }
}

pub trait Transport: Send + Sync {
    fn complete(&self, request: &WireRequest) -> Result<WireResponse, PlannerError>;
}

pub struct HttpTransport {
    endpoint: String,
    token: Option<String>,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(endpoint: String, token: Option<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        HttpTransport { endpoint, token, agent }
    }

    /// Reads the endpoint and credential from the environment.
    pub fn from_env(timeout: Duration) -> Result<Self, PlannerError> {
        let endpoint = std::env::var(ENDPOINT_VAR).map_err(|_| PlannerError::MissingEndpoint(ENDPOINT_VAR.into()))?;
        Ok(Self::new(endpoint, std::env::var(TOKEN_VAR).ok(), timeout))
    }
}

impl Transport for HttpTransport {
    fn complete(&self, request: &WireRequest) -> Result<WireResponse, PlannerError> {
        let body = serde_json::to_string(request).map_err(|e| PlannerError::Transport(e.to_string()))?;
        let mut call = self.agent.post(&self.endpoint).header("Content-Type", "application/json");
        if let Some(token) = &self.token {
            call = call.header("Authorization", &format!("Bearer {token}"));
        }
        let response = call.send(body.as_str()).map_err(|e| match e {
            ureq::Error::Timeout(_) => PlannerError::Timeout,
            other => PlannerError::Transport(other.to_string()),
        })?;
        let text = response
            .into_body()
            .read_to_string()
            .map_err(|e| PlannerError::Transport(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| PlannerError::Transport(format!("bad response body: {e}")))
    }
}

/// One line of the audit log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub request: WireRequest,
    pub response: Option<WireResponse>,
    pub error: Option<String>,
}

/// Serves canned responses in order, ignoring the request contents.
pub struct ReplayTransport {
    responses: Mutex<VecDeque<String>>,
}

impl ReplayTransport {
    pub fn new<I: IntoIterator<Item = String>>(responses: I) -> Self {
        ReplayTransport { responses: Mutex::new(responses.into_iter().collect()) }
    }

    /// Loads the responses recorded in an audit file.
    pub fn from_audit(path: &Path) -> Result<Self, PlannerError> {
        let text = std::fs::read_to_string(path)?;
        let mut responses = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let entry: AuditEntry =
                serde_json::from_str(line).map_err(|e| PlannerError::Transport(format!("bad audit line: {e}")))?;
            if let Some(r) = entry.response {
                responses.push(r.text);
            }
        }
        Ok(Self::new(responses))
    }

    pub fn remaining(&self) -> usize {
        self.responses.lock().expect("replay lock").len()
    }
}

impl Transport for ReplayTransport {
    fn complete(&self, _request: &WireRequest) -> Result<WireResponse, PlannerError> {
        let next = self.responses.lock().expect("replay lock").pop_front();
        next.map(|text| WireResponse { text })
            .ok_or_else(|| PlannerError::Transport("replay transcript exhausted".into()))
    }
}

pub struct WireClient {
    transport: Box<dyn Transport>,
    pub config: WireConfig,
    audit: Mutex<()>,
}

/// Outcome of asking for a plan: the plan (if any attempt parsed) and how
/// many responses were malformed along the way.
pub struct WireAnswer {
    pub plan: Result<Plan, PlannerError>,
    pub malformed: u32,
}

impl WireClient {
    pub fn new(transport: Box<dyn Transport>, config: WireConfig) -> Self {
        WireClient { transport, config, audit: Mutex::new(()) }
    }

    fn log(&self, entry: &AuditEntry) -> Result<(), PlannerError> {
        let Some(path) = &self.config.audit_path else { return Ok(()) };
        let _guard = self.audit.lock().expect("audit lock");
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        let line = serde_json::to_string(entry).map_err(|e| PlannerError::Transport(e.to_string()))?;
        writeln!(file, "{line}")?;
        Ok(())
    }

    /// Sends a raw prompt once and returns the completion text.
    pub fn complete(&self, prompt: &str) -> Result<String, PlannerError> {
        let request = WireRequest {
            prompt: prompt.to_string(),
            max_tokens: self.config.max_tokens,
            temperature: self.config.temperature,
            stop: vec!["\n\n".to_string()],
        };
        let result = self.transport.complete(&request);
        let entry = AuditEntry {
            request,
            response: result.as_ref().ok().cloned(),
            error: result.as_ref().err().map(|e| e.to_string()),
        };
        self.log(&entry)?;
        result.map(|r| r.text)
    }

    /// Asks for a plan, retrying on unparseable answers.
    pub fn request_plan(&self, prompt: &str, replan: bool) -> WireAnswer {
        let mut malformed = 0;
        for _ in 0..=self.config.max_retries {
            let text = match self.complete(prompt) {
                Ok(t) => t,
                Err(e) => return WireAnswer { plan: Err(e), malformed },
            };
            match parse_plan(&text, replan) {
                Some(plan) => return WireAnswer { plan: Ok(plan), malformed },
                None => malformed += 1,
            }
        }
        WireAnswer { plan: Err(PlannerError::ParseFailure { attempts: malformed }), malformed }
    }
}

/// Extracts "> step k: ..." lines. For replans, lines after the
/// "Replanned Action Sequence:" marker take precedence when present.
/// `think` lines become the rationale. Returns `None` if no step parses.
pub fn parse_plan(text: &str, replan: bool) -> Option<Plan> {
    let body = match (replan, text.find(REPLAN_MARKER)) {
        (true, Some(at)) => &text[at + REPLAN_MARKER.len()..],
        _ => text,
    };
    let mut steps = Vec::new();
    let mut rationale = Vec::new();
    for line in text.lines() {
        if let Some(t) = line.trim().strip_prefix("> think:") {
            rationale.push(t.trim().to_string());
        }
    }
    for line in body.lines() {
        let line = line.trim().trim_start_matches('>').trim();
        let Some(rest) = line.strip_prefix("step ") else { continue };
        let Some((num, action)) = rest.split_once(':') else { continue };
        if num.trim().parse::<u32>().is_err() {
            continue;
        }
        if let Ok(a) = SkillAction::parse(action) {
            steps.push(a);
        }
    }
    if steps.is_empty() {
        return None;
    }
    let mut plan = Plan::new(steps);
    plan.rationale = rationale;
    Some(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPRAYBOTTLE_PLAN: &str = "> think: To solve the task, I need to find and take a sparybottle, then put it on toilet.\n\
Action Sequence:\n\
> step 1: go to cabinet 1\n\
> step 2: go to cabinet 2\n\
> step 3: take spraybottle 2 from cabinet 2\n\
> step 4: go to toilet 1\n\
> step 5: put spraybottle 2 in/on toilet 1\n";

    #[test]
    fn five_step_lines_give_five_steps() {
        let plan = parse_plan(SPRAYBOTTLE_PLAN, false).unwrap();
        assert_eq!(plan.steps.len(), 5);
        assert_eq!(plan.steps[4], SkillAction::put("spraybottle 2", "toilet 1"));
        assert_eq!(plan.rationale.len(), 1);
    }

    #[test]
    fn replan_marker_wins() {
        let text = format!("{SPRAYBOTTLE_PLAN}> Q: Was the planned action executed successfully?\n> No.\n{REPLAN_MARKER}\n> step 1: open cabinet 2\n");
        let plan = parse_plan(&text, true).unwrap();
        assert_eq!(plan.steps, vec![SkillAction::open("cabinet 2")]);
    }

    #[test]
    fn zero_step_lines_fail_after_retries() {
        let client = WireClient::new(
            Box::new(ReplayTransport::new(vec!["no plan here".to_string(); 4])),
            WireConfig { max_retries: 3, ..WireConfig::default() },
        );
        let answer = client.request_plan("prompt", false);
        assert_eq!(answer.malformed, 4);
        assert!(matches!(answer.plan, Err(PlannerError::ParseFailure { attempts: 4 })));
    }
}
