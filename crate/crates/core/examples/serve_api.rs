//! Start the HTTP service on an ephemeral loopback port, make a few requests
//! against it, and shut it down.
//!
//! To keep a server running instead, use the binary:
//!
//! ```text
//! cargo run -- serve --bind 127.0.0.1:8080
//! ```

use std::sync::Arc;

use gridobs::ahp::WeightTables;
use gridobs::service::{serve_on, AppState};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::TcpStream;

async fn request(addr: std::net::SocketAddr, method: &str, path: &str, body: &str) -> std::io::Result<String> {
    let mut stream = TcpStream::connect(addr).await?;
    let head = format!(
        "{method} {path} HTTP/1.1\r\nhost: {addr}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(head.as_bytes()).await?;
    stream.write_all(body.as_bytes()).await?;
    let mut raw = String::new();
    stream.read_to_string(&mut raw).await?;
    let status = raw.lines().next().unwrap_or_default().to_string();
    let payload = raw.split("\r\n\r\n").nth(1).unwrap_or_default().to_string();
    Ok(format!("{status}\n{payload}"))
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let questionnaires = tempfile::tempdir()?;
    let state = Arc::new(AppState::new(WeightTables::reference(), questionnaires.path(), None));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    let server = tokio::spawn(serve_on(listener, state));
    println!("listening on {addr}\n");

    let matrix = r#"{"items":["MW","MVAR","STATUS"],"judgments":[{"row":0,"col":1,"value":3},{"row":0,"col":2,"value":5},{"row":1,"col":2,"value":2}]}"#;
    println!("POST /api/matrix/evaluate\n{}\n", request(addr, "POST", "/api/matrix/evaluate", matrix).await?);

    let bad = r#"{"items":["a","b"],"judgments":[{"row":0,"col":1,"value":0}]}"#;
    println!("POST /api/matrix/evaluate (zero judgment)\n{}\n", request(addr, "POST", "/api/matrix/evaluate", bad).await?);

    let taxonomy = request(addr, "GET", "/api/taxonomy", "").await?;
    println!("GET /api/taxonomy\n{}...\n", &taxonomy[..taxonomy.len().min(160)]);

    println!("GET /api/reports/latest\n{}\n", request(addr, "GET", "/api/reports/latest", "").await?);

    server.abort();
    Ok(())
}
