use std::io::{Read, Write};
use std::net::TcpStream;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use tower::ServiceExt;

use tandelbrot::service::router;

async fn get(uri: &str) -> (StatusCode, String, Vec<u8>) {
    let resp = router(None).oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = resp.status();
    let ct = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_owned())
        .unwrap_or_default();
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, ct, body)
}

#[tokio::test]
async fn tile_content_types() {
    let (s, ct, body) = get("/api/v1/tile?px=3&py=2").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(ct, "application/octet-stream");
    assert_eq!(body.len(), 28 + 9 * 6);
    assert_eq!(&body[..4], b"TNDL");
    let (s, ct, body) = get("/api/v1/tile?px=3&py=2&format=png").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(ct, "image/png");
    assert_eq!(&body[..4], b"\x89PNG");
}

#[tokio::test]
async fn dynamical_and_mask_tiles() {
    let (s, _, body) = get("/api/v1/tile?plane=dyn&family=tangent&alpha_re=-0.021&alpha_im=0.009&center_re=-30&width=120&px=8").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body.len(), 28 + 9 * 64);
    let (s, _, _) = get("/api/v1/tile?plane=dyn&family=newton&a_re=-1.1627&a_im=0.1143&px=4&center_re=0").await;
    assert_eq!(s, StatusCode::OK);
    let (s, _, _) = get("/api/v1/tile?family=an_mask&n=3&k=64&center_re=0&width=0.5&px=8").await;
    assert_eq!(s, StatusCode::OK);
}

#[tokio::test]
async fn error_statuses() {
    for (uri, want) in [
        ("/api/v1/analyze?alpha_re=abc", 400),
        ("/api/v1/analyze", 400),
        ("/api/v1/analyze?alpha_re=1&alpha_im=0", 422),
        ("/api/v1/analyze?alpha_re=0.9&alpha_im=0.9", 422),
        ("/api/v1/tile?px=0", 400),
        ("/api/v1/tile?width=-1", 400),
        ("/api/v1/tile?plane=dyn&alpha_re=1", 422),
        ("/api/v1/tile?family=an_mask&n=2&center_re=0.45&width=0.2", 422),
        ("/api/v1/orbit?alpha_re=0&alpha_im=0", 422),
        ("/api/v1/orbit?family=newton&a_re=0", 422),
        ("/api/v1/orbit?alpha_re=0.1&n=-3", 400),
    ] {
        let (s, ct, body) = get(uri).await;
        assert_eq!(s.as_u16(), want, "{uri}: {}", String::from_utf8_lossy(&body));
        assert_eq!(ct, "application/json");
        let v: serde_json::Value = serde_json::from_slice(&body).unwrap();
        assert!(v["error"].is_string());
    }
}

#[tokio::test]
async fn constants_and_outside_parameter_report() {
    let (s, _, body) = get("/api/v1/constants").await;
    assert_eq!(s, StatusCode::OK);
    let v: serde_json::Value = serde_json::from_slice(&body).unwrap();
    assert!((v["p_star"].as_f64().unwrap() - 0.01484107990673594).abs() < 1e-15);
    let (s, _, body) = get("/api/v1/analyze?alpha_re=0.8&alpha_im=0").await;
    assert_eq!(s, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains(r#""membership":"NotInT""#));
}

#[tokio::test]
async fn static_assets_are_served() {
    let dir = std::env::temp_dir().join(format!("tandelbrot-static-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("index.html"), "<html>explorer</html>").unwrap();
    let resp = router(Some(dir.clone()))
        .oneshot(Request::get("/index.html").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let body = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(&body[..], b"<html>explorer</html>");
    std::fs::remove_dir_all(dir).unwrap();
}

/// Full HTTP/1.1 round trip over a socket, twice, for byte identity.
#[test]
fn real_socket_round_trip() {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap();
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let addr = listener.local_addr().unwrap();
    rt.spawn(async move { axum::serve(listener, router(None)).await.unwrap() });
    let fetch = |path: &str| -> Vec<u8> {
        let mut s = TcpStream::connect(addr).unwrap();
        write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
        let mut raw = Vec::new();
        s.read_to_end(&mut raw).unwrap();
        let split = raw.windows(4).position(|w| w == b"\r\n\r\n").unwrap();
        let head = String::from_utf8_lossy(&raw[..split]).to_string();
        assert!(head.starts_with("HTTP/1.1 200"), "{head}");
        raw[split + 4..].to_vec()
    };
    let path = "/api/v1/analyze?alpha_re=-0.021&alpha_im=0.009";
    let a = fetch(path);
    let b = fetch(path);
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().contains(r#""membership":"InT","period":3"#));
    let tile = fetch("/api/v1/tile?px=1");
    assert_eq!(tile.len(), 37);
}
