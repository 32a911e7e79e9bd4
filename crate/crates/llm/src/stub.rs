//! In-process fake of a chat-completion endpoint, used by the test suite
//! so no run ever needs a real model behind it.
//!
//! The server listens on an ephemeral localhost port, answers each POST
//! according to its script, and records every request for inspection.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

#[derive(Debug, Clone)]
pub enum StubReply {
    /// 200 with a well-formed chat completion whose message is this text.
    Content(String),
    /// Arbitrary status code with a raw body.
    Status(u16, String),
}

/// One recorded request: the raw header block and the body text.
#[derive(Debug, Clone)]
pub struct RecordedRequest {
    pub head: String,
    pub body: String,
}

enum Script {
    Fixed(StubReply),
    Sequence(VecDeque<StubReply>),
}

impl Script {
    fn next(&mut self) -> StubReply {
        match self {
            Script::Fixed(reply) => reply.clone(),
            Script::Sequence(replies) => replies
                .pop_front()
                .unwrap_or(StubReply::Status(500, "stub script exhausted".to_string())),
        }
    }
}

pub struct StubServer {
    endpoint: String,
    requests: Arc<Mutex<Vec<RecordedRequest>>>,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Serve the same reply to every request.
    pub fn fixed(reply: StubReply) -> StubServer {
        StubServer::start(Script::Fixed(reply))
    }

    /// Serve the replies in order; further requests get a 500.
    pub fn sequence(replies: Vec<StubReply>) -> StubServer {
        StubServer::start(Script::Sequence(replies.into()))
    }

    fn start(script: Script) -> StubServer {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind ephemeral port");
        listener.set_nonblocking(true).expect("nonblocking listener");
        let endpoint = format!("http://{}/v1", listener.local_addr().expect("local addr"));
        let requests = Arc::new(Mutex::new(Vec::new()));
        let shutdown = Arc::new(AtomicBool::new(false));

        let worker_requests = Arc::clone(&requests);
        let worker_shutdown = Arc::clone(&shutdown);
        let handle = std::thread::spawn(move || {
            let mut script = script;
            while !worker_shutdown.load(Ordering::Relaxed) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        let reply = script.next();
                        if let Err(e) = handle_connection(stream, reply, &worker_requests) {
                            eprintln!("stub server connection error: {e}");
                        }
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                        std::thread::sleep(Duration::from_millis(2));
                    }
                    Err(_) => break,
                }
            }
        });

        StubServer {
            endpoint,
            requests,
            shutdown,
            handle: Some(handle),
        }
    }

    /// Base URL to hand to a client config, ending in /v1.
    pub fn endpoint(&self) -> String {
        self.endpoint.clone()
    }

    pub fn calls(&self) -> usize {
        self.requests.lock().unwrap().len()
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.requests.lock().unwrap().clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::Relaxed);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(
    stream: TcpStream,
    reply: StubReply,
    requests: &Mutex<Vec<RecordedRequest>>,
) -> std::io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);

    let mut head = String::new();
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Ok(());
        }
        if line == "\r\n" || line == "\n" {
            break;
        }
        head.push_str(&line);
    }
    let content_length = head
        .lines()
        .find_map(|line| {
            let (name, value) = line.split_once(':')?;
            name.eq_ignore_ascii_case("content-length")
                .then(|| value.trim().parse::<usize>().ok())?
        })
        .unwrap_or(0);
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let body = String::from_utf8_lossy(&body).into_owned();
    requests.lock().unwrap().push(RecordedRequest { head, body });

    let (status, payload) = match reply {
        StubReply::Content(content) => (
            200,
            serde_json::json!({
                "id": "stub",
                "object": "chat.completion",
                "model": "stub",
                "choices": [{
                    "index": 0,
                    "message": {"role": "assistant", "content": content},
                    "finish_reason": "stop",
                }],
            })
            .to_string(),
        ),
        StubReply::Status(code, body) => (code, body),
    };
    let reason = if status == 200 { "OK" } else { "Error" };
    write!(
        writer,
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    )?;
    writer.flush()
}
