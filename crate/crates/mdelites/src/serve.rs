//! Minimal read-only static file server over a run directory.

use std::fs;
use std::path::{Component, Path, PathBuf};

use tiny_http::{Header, Method, Response, Server};

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => "application/json",
        Some("csv") => "text/csv; charset=utf-8",
        Some("html") => "text/html; charset=utf-8",
        Some("js") => "text/javascript",
        Some("css") => "text/css",
        Some("log" | "txt" | "tsv") => "text/plain; charset=utf-8",
        _ => "application/octet-stream",
    }
}

/// Maps a request URL to a file under `root`, refusing anything that
/// would leave it. `/` serves `index.html` when present, else `map.json`.
pub fn resolve(root: &Path, url: &str) -> Option<PathBuf> {
    let path = url.split(['?', '#']).next().unwrap_or("");
    let rel = Path::new(path.trim_start_matches('/'));
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return None;
    }
    if rel.as_os_str().is_empty() {
        let index = root.join("index.html");
        return Some(if index.is_file() { index } else { root.join("map.json") });
    }
    Some(root.join(rel))
}

pub fn bind(addr: &str) -> Result<Server, String> {
    Server::http(addr).map_err(|e| format!("cannot listen on {addr}: {e}"))
}

/// Answers requests until the server is dropped or `limit` requests have
/// been handled.
pub fn serve(server: &Server, root: &Path, limit: Option<usize>) {
    for (i, request) in server.incoming_requests().enumerate() {
        let file = match request.method() {
            Method::Get | Method::Head => resolve(root, request.url()),
            _ => None,
        };
        let result = match file.and_then(|p| fs::read(&p).ok().map(|bytes| (p, bytes))) {
            Some((path, bytes)) => {
                let header = Header::from_bytes("Content-Type", content_type(&path)).expect("static header");
                request.respond(Response::from_data(bytes).with_header(header))
            }
            None => request.respond(Response::from_string("not found").with_status_code(404)),
        };
        if let Err(e) = result {
            eprintln!("serve: {e}");
        }
        if limit.is_some_and(|n| i + 1 >= n) {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpStream;

    #[test]
    fn resolve_stays_inside_root() {
        let root = Path::new("/srv/run");
        assert_eq!(resolve(root, "/archive.csv"), Some(root.join("archive.csv")));
        assert_eq!(resolve(root, "/map.json?x=1"), Some(root.join("map.json")));
        assert_eq!(resolve(root, "/"), Some(root.join("map.json")));
        assert_eq!(resolve(root, "/../etc/passwd"), None);
        assert_eq!(resolve(root, "/a/./b"), Some(root.join("a/b")));
    }

    #[test]
    fn serves_files_and_404s() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("map.json"), "{}").unwrap();
        let server = bind("127.0.0.1:0").unwrap();
        let addr = server.server_addr().to_ip().unwrap();
        let root = dir.path().to_path_buf();
        let handle = std::thread::spawn(move || serve(&server, &root, Some(2)));

        let get = |path: &str| {
            let mut s = TcpStream::connect(addr).unwrap();
            write!(s, "GET {path} HTTP/1.0\r\nHost: x\r\n\r\n").unwrap();
            let mut out = String::new();
            s.read_to_string(&mut out).unwrap();
            out
        };
        let ok = get("/map.json");
        assert!(ok.starts_with("HTTP/1.0 200") || ok.starts_with("HTTP/1.1 200"), "{ok}");
        assert!(ok.contains("application/json") && ok.ends_with("{}"));
        let missing = get("/nope.csv");
        assert!(missing.contains(" 404 "), "{missing}");
        handle.join().unwrap();
    }
}
