//! Local stand-in for a chat-completion endpoint.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use serde_json::{json, Value};

pub struct Reply {
    pub status: u16,
    pub body: String,
    pub retry_after: Option<String>,
}

impl Reply {
    pub fn answer(text: &str) -> Reply {
        Reply {
            status: 200,
            body: json!({
                "id": "stub",
                "object": "chat.completion",
                "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}]
            })
            .to_string(),
            retry_after: None,
        }
    }

    pub fn status(status: u16) -> Reply {
        Reply {
            status,
            body: json!({"error": {"message": format!("stub status {status}")}}).to_string(),
            retry_after: None,
        }
    }

    pub fn throttled(retry_after: &str) -> Reply {
        Reply {
            retry_after: Some(retry_after.to_string()),
            ..Reply::status(429)
        }
    }
}

/// What the stub saw for one request.
#[derive(Clone, Debug)]
pub struct Seen {
    pub authorization: Option<String>,
    pub body: Value,
}

type Responder = dyn Fn(usize, &Value) -> Reply + Send + Sync;

pub struct StubServer {
    pub url: String,
    hits: Arc<AtomicUsize>,
    seen: Arc<std::sync::Mutex<Vec<Seen>>>,
    server: Arc<tiny_http::Server>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    /// `respond(n, body)` answers the n-th request (0-based).
    pub fn start(respond: impl Fn(usize, &Value) -> Reply + Send + Sync + 'static) -> StubServer {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
        let port = server.server_addr().to_ip().unwrap().port();
        let hits = Arc::new(AtomicUsize::new(0));
        let seen = Arc::new(std::sync::Mutex::new(Vec::new()));
        let respond: Arc<Responder> = Arc::new(respond);
        let handle = {
            let (server, hits, seen) = (Arc::clone(&server), Arc::clone(&hits), Arc::clone(&seen));
            std::thread::spawn(move || {
                for mut req in server.incoming_requests() {
                    let n = hits.fetch_add(1, Ordering::SeqCst);
                    let mut raw = String::new();
                    let _ = req.as_reader().read_to_string(&mut raw);
                    let body: Value = serde_json::from_str(&raw).unwrap_or(Value::Null);
                    let authorization = req
                        .headers()
                        .iter()
                        .find(|h| h.field.equiv("Authorization"))
                        .map(|h| h.value.to_string());
                    seen.lock().unwrap().push(Seen {
                        authorization,
                        body: body.clone(),
                    });
                    let reply = respond(n, &body);
                    let mut resp = tiny_http::Response::from_string(reply.body)
                        .with_status_code(reply.status)
                        .with_header("Content-Type: application/json".parse::<tiny_http::Header>().unwrap());
                    if let Some(ra) = reply.retry_after {
                        resp = resp.with_header(format!("Retry-After: {ra}").parse::<tiny_http::Header>().unwrap());
                    }
                    let _ = req.respond(resp);
                }
            })
        };
        StubServer {
            url: format!("http://127.0.0.1:{port}/v1"),
            hits,
            seen,
            server,
            handle: Some(handle),
        }
    }

    /// Answers from a fixed script; requests past its end get HTTP 500.
    pub fn scripted(script: Vec<Reply>) -> StubServer {
        let script = std::sync::Mutex::new(script.into_iter().map(Some).collect::<Vec<_>>());
        StubServer::start(move |n, _| {
            script
                .lock()
                .unwrap()
                .get_mut(n)
                .and_then(Option::take)
                .unwrap_or_else(|| Reply::status(500))
        })
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    pub fn seen(&self) -> Vec<Seen> {
        self.seen.lock().unwrap().clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

/// Prompt text of a recorded chat request.
pub fn prompt_of(body: &Value) -> &str {
    body.pointer("/messages/0/content").and_then(Value::as_str).unwrap_or("")
}
