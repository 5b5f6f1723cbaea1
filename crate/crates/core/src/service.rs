//! HTTP backend for the explorer: a thin adapter over the library.
//!
//! Every body is a pure function of the parsed request, so responses are
//! cached by the request's canonical form and repeated queries return the
//! same bytes.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use lru::LruCache;
use num_complex::Complex64;
use tower_http::services::ServeDir;

use crate::analysis::analyze_parameter;
use crate::conjugacy::ModelConstants;
use crate::error::TandelbrotError;
use crate::model::TangentParam;
use crate::newton::NewtonParam;
use crate::orbit::{orbit_points, IterationSettings};
use crate::rational::AnSpec;
use crate::render::{
    colorize, encode_png, encode_ppm, encode_tile, render_dynamical_plane, render_parameter_plane, DynInstance,
    PaletteSpec, ParamFamily, TileGrid, Viewport,
};

/// Largest pixel count a single request may ask for.
pub const MAX_PIXELS: u64 = 4096 * 4096;
pub const MAX_ORBIT_POINTS: usize = 100_000;
const CACHE_ENTRIES: usize = 256;

/// A rejected request: `status` is 400 for malformed input and 422 for
/// parameters outside the domain of the maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: u16,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: 400, message: message.into() }
    }
}

impl From<TandelbrotError> for ApiError {
    fn from(e: TandelbrotError) -> Self {
        let status = match e {
            TandelbrotError::InvalidArgument(_)
            | TandelbrotError::ZeroPixelViewport
            | TandelbrotError::MalformedTile(_) => 400,
            _ => 422,
        };
        ApiError { status, message: e.to_string() }
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.message, self.status)
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plane {
    Param,
    Dyn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Tangent,
    Newton,
    AnMask,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tangent" => Ok(Family::Tangent),
            "newton" => Ok(Family::Newton),
            "an_mask" | "an-mask" => Ok(Family::AnMask),
            other => Err(format!("unknown family '{other}' (expected tangent, newton or an_mask)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Tile,
    Png,
    Ppm,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tile" => Ok(OutputFormat::Tile),
            "png" => Ok(OutputFormat::Png),
            "ppm" => Ok(OutputFormat::Ppm),
            other => Err(format!("unknown format '{other}' (expected png, ppm or tile)")),
        }
    }
}

impl OutputFormat {
    pub fn content_type(self) -> &'static str {
        match self {
            OutputFormat::Tile => "application/octet-stream",
            OutputFormat::Png => "image/png",
            OutputFormat::Ppm => "image/x-portable-pixmap",
        }
    }
}

/// Everything that determines one rendered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderRequest {
    pub plane: Plane,
    pub family: Family,
    pub viewport: Viewport,
    pub max_iter: u32,
    pub alpha: Option<Complex64>,
    pub a: Option<Complex64>,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub delta: Option<f64>,
}

impl RenderRequest {
    pub fn settings(&self) -> IterationSettings {
        IterationSettings::rendering().with_max_iter(self.max_iter)
    }

    /// Structural checks that do not need any dynamics.
    pub fn validate(&self) -> ApiResult<()> {
        self.viewport.validate()?;
        if self.viewport.px as u64 * self.viewport.py as u64 > MAX_PIXELS {
            return Err(ApiError::bad_request(format!("at most {MAX_PIXELS} pixels per request")));
        }
        if self.max_iter == 0 {
            return Err(ApiError::bad_request("max_iter must be positive"));
        }
        match (self.plane, self.family) {
            (Plane::Param, Family::AnMask) if self.n.is_none() => {
                Err(ApiError::bad_request("an_mask needs n"))
            }
            (Plane::Dyn, Family::Tangent) if self.alpha.is_none() => {
                Err(ApiError::bad_request("a tangent dynamical plane needs alpha"))
            }
            (Plane::Dyn, Family::Newton) if self.a.is_none() => {
                Err(ApiError::bad_request("a Newton dynamical plane needs a"))
            }
            (Plane::Dyn, Family::AnMask) => Err(ApiError::bad_request("an_mask has no dynamical plane")),
            _ => Ok(()),
        }
    }

    pub fn render(&self) -> ApiResult<TileGrid> {
        self.validate()?;
        let s = self.settings();
        let grid = match (self.plane, self.family) {
            (Plane::Param, Family::Tangent) => render_parameter_plane(ParamFamily::Tangent, &self.viewport, &s)?,
            (Plane::Param, Family::Newton) => render_parameter_plane(ParamFamily::Newton, &self.viewport, &s)?,
            (Plane::Param, Family::AnMask) => {
                let spec = AnSpec { n: self.n.unwrap_or(0), k: self.k, delta: self.delta };
                render_parameter_plane(ParamFamily::AnMask(spec), &self.viewport, &s)?
            }
            (Plane::Dyn, Family::Tangent) => {
                let p = TangentParam::new(self.alpha.unwrap_or_default())?;
                render_dynamical_plane(DynInstance::Tangent(p), &self.viewport, &s)?
            }
            (Plane::Dyn, Family::Newton) => {
                let p = NewtonParam::new(self.a.unwrap_or_default())?;
                render_dynamical_plane(DynInstance::Newton(p), &self.viewport, &s)?
            }
            (Plane::Dyn, Family::AnMask) => unreachable!("rejected by validate"),
        };
        Ok(grid)
    }

    /// Canonical text form: two requests that render the same grid have
    /// the same key. Floats are written by their bit patterns.
    pub fn cache_key(&self) -> String {
        let c = |z: Option<Complex64>| z.map(|z| format!("{:x},{:x}", z.re.to_bits(), z.im.to_bits()));
        let mut key = format!(
            "{:?}|{:?}|{:x},{:x}|{:x}|{}x{}|{}",
            self.plane,
            self.family,
            self.viewport.center.re.to_bits(),
            self.viewport.center.im.to_bits(),
            self.viewport.width.to_bits(),
            self.viewport.px,
            self.viewport.py,
            self.max_iter
        );
        // parameters that the selected plane ignores are left out
        match (self.plane, self.family) {
            (Plane::Dyn, Family::Tangent) => key += &format!("|alpha={:?}", c(self.alpha)),
            (Plane::Dyn, Family::Newton) => key += &format!("|a={:?}", c(self.a)),
            (Plane::Param, Family::AnMask) => {
                key += &format!("|n={:?}|k={:?}|delta={:?}", self.n, self.k, self.delta.map(f64::to_bits))
            }
            _ => {}
        }
        key
    }
}

pub fn encode_output(grid: &TileGrid, format: OutputFormat) -> ApiResult<Vec<u8>> {
    Ok(match format {
        OutputFormat::Tile => encode_tile(grid),
        OutputFormat::Png => encode_png(&colorize(grid, &PaletteSpec::default()))?,
        OutputFormat::Ppm => encode_ppm(&colorize(grid, &PaletteSpec::default())),
    })
}

// ---- query parsing ---------------------------------------------------------

struct Params<'a>(&'a HashMap<String, String>);

impl Params<'_> {
    fn get<T: std::str::FromStr>(&self, key: &str) -> ApiResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .trim()
                .parse()
                .map(Some)
                .map_err(|e| ApiError::bad_request(format!("parameter '{key}': {e}"))),
        }
    }

    fn float(&self, key: &str) -> ApiResult<Option<f64>> {
        match self.get::<f64>(key)? {
            Some(x) if !x.is_finite() => Err(ApiError::bad_request(format!("parameter '{key}' must be finite"))),
            other => Ok(other),
        }
    }

    fn float_or(&self, key: &str, default: f64) -> ApiResult<f64> {
        Ok(self.float(key)?.unwrap_or(default))
    }

    /// `{prefix}_re` and `{prefix}_im`; either may be omitted (as 0) but
    /// not both.
    fn complex(&self, prefix: &str) -> ApiResult<Option<Complex64>> {
        let re = self.float(&format!("{prefix}_re"))?;
        let im = self.float(&format!("{prefix}_im"))?;
        Ok(match (re, im) {
            (None, None) => None,
            (re, im) => Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
        })
    }

    fn require_complex(&self, prefix: &str) -> ApiResult<Complex64> {
        self.complex(prefix)?
            .ok_or_else(|| ApiError::bad_request(format!("missing {prefix}_re / {prefix}_im")))
    }
}

/// Parses the `/api/v1/tile` query. Returns the request and the output
/// format (tile unless `format` says otherwise).
pub fn parse_render_query(q: &HashMap<String, String>) -> ApiResult<(RenderRequest, OutputFormat)> {
    let p = Params(q);
    let plane = match q.get("plane").map(String::as_str) {
        None | Some("param") => Plane::Param,
        Some("dyn") => Plane::Dyn,
        Some(other) => return Err(ApiError::bad_request(format!("parameter 'plane': unknown plane '{other}'"))),
    };
    let family = p.get::<Family>("family")?.unwrap_or(Family::Tangent);
    let format = p.get::<OutputFormat>("format")?.unwrap_or(OutputFormat::Tile);
    let px = p.get::<u32>("px")?.unwrap_or(256);
    let py = p.get::<u32>("py")?.unwrap_or(px);
    let center = Complex64::new(p.float_or("center_re", -0.05)?, p.float_or("center_im", 0.0)?);
    let width = p.float_or("width", 1.2)?;
    let req = RenderRequest {
        plane,
        family,
        viewport: Viewport { center, width, px, py },
        max_iter: p.get::<u32>("max_iter")?.unwrap_or(IterationSettings::rendering().max_iter),
        alpha: p.complex("alpha")?,
        a: p.complex("a")?,
        n: p.get("n")?,
        k: p.get("k")?,
        delta: p.float("delta")?,
    };
    req.validate()?;
    Ok((req, format))
}

/// Body of `/api/v1/analyze`.
pub fn analyze_body(q: &HashMap<String, String>) -> ApiResult<String> {
    let alpha = Params(q).require_complex("alpha")?;
    let report = analyze_parameter(alpha, &IterationSettings::analysis())?;
    Ok(report.to_json())
}

/// Body of `/api/v1/orbit`: the first `n` points of the orbit of the free
/// singular value (`1/α` for the tangent family, `0` for Newton), with a
/// pole hit written as `null`.
pub fn orbit_body(q: &HashMap<String, String>) -> ApiResult<String> {
    let p = Params(q);
    let family = p.get::<Family>("family")?.unwrap_or(Family::Tangent);
    let n: usize = p.get("n")?.unwrap_or(100);
    if n > MAX_ORBIT_POINTS {
        return Err(ApiError::bad_request(format!("n must be at most {MAX_ORBIT_POINTS}")));
    }
    let points = match family {
        Family::Tangent => {
            let alpha = p.require_complex("alpha")?;
            if alpha == Complex64::new(0.0, 0.0) {
                return Err(TandelbrotError::AlphaZero.into());
            }
            let map = TangentParam::new(alpha)?;
            orbit_points(&map, alpha.inv(), n)
        }
        Family::Newton => {
            let map = NewtonParam::new(p.require_complex("a")?)?;
            orbit_points(&map, Complex64::new(0.0, 0.0), n)
        }
        Family::AnMask => return Err(ApiError::bad_request("parameter 'family': an_mask has no orbit")),
    };
    Ok(crate::json::to_json(&points))
}

pub fn constants_body() -> String {
    crate::json::to_json(ModelConstants::get())
}

// ---- HTTP ------------------------------------------------------------------

#[derive(Clone)]
struct Cached {
    content_type: &'static str,
    body: Bytes,
}

pub struct AppState {
    cache: Mutex<LruCache<String, Cached>>,
}

impl Default for AppState {
    fn default() -> Self {
        AppState { cache: Mutex::new(LruCache::new(NonZeroUsize::new(CACHE_ENTRIES).expect("nonzero"))) }
    }
}

impl AppState {
    fn lookup(&self, key: &str) -> Option<Cached> {
        self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(key).cloned()
    }

    fn store(&self, key: String, value: Cached) {
        self.cache.lock().unwrap_or_else(|e| e.into_inner()).put(key, value);
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::BAD_REQUEST);
        let body = crate::json::to_json(&serde_json::json!({ "error": self.message }));
        (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

fn ok(c: Cached) -> Response {
    (StatusCode::OK, [(header::CONTENT_TYPE, c.content_type)], c.body).into_response()
}

/// Runs `work` off the async executor unless the key is already cached.
async fn cached<F>(state: Arc<AppState>, key: String, content_type: &'static str, work: F) -> Response
where
    F: FnOnce() -> ApiResult<Vec<u8>> + Send + 'static,
{
    if let Some(hit) = state.lookup(&key) {
        return ok(hit);
    }
    match tokio::task::spawn_blocking(work).await {
        Ok(Ok(body)) => {
            let c = Cached { content_type, body: Bytes::from(body) };
            state.store(key, c.clone());
            ok(c)
        }
        Ok(Err(e)) => e.into_response(),
        Err(join) => {
            (StatusCode::INTERNAL_SERVER_ERROR, format!("worker failed: {join}")).into_response()
        }
    }
}

async fn tile(State(state): State<Arc<AppState>>, Query(q): Query<HashMap<String, String>>) -> Response {
    let (req, format) = match parse_render_query(&q) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    let key = format!("tile|{format:?}|{}", req.cache_key());
    cached(state, key, format.content_type(), move || encode_output(&req.render()?, format)).await
}

/// Canonical key for small query-driven endpoints: sorted key=value pairs.
fn query_key(route: &str, q: &HashMap<String, String>) -> String {
    let mut pairs: Vec<_> = q.iter().collect();
    pairs.sort();
    let mut key = route.to_string();
    for (k, v) in pairs {
        key.push('|');
        key.push_str(k);
        key.push('=');
        key.push_str(v);
    }
    key
}

async fn analyze(State(state): State<Arc<AppState>>, Query(q): Query<HashMap<String, String>>) -> Response {
    let key = query_key("analyze", &q);
    cached(state, key, "application/json", move || analyze_body(&q).map(String::into_bytes)).await
}

async fn orbit(State(state): State<Arc<AppState>>, Query(q): Query<HashMap<String, String>>) -> Response {
    let key = query_key("orbit", &q);
    cached(state, key, "application/json", move || orbit_body(&q).map(String::into_bytes)).await
}

async fn constants() -> Response {
    ok(Cached { content_type: "application/json", body: Bytes::from(constants_body()) })
}

/// The API routes, plus static files from `static_dir` for every other
/// path when given.
pub fn router(static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/v1/tile", get(tile))
        .route("/api/v1/analyze", get(analyze))
        .route("/api/v1/orbit", get(orbit))
        .route("/api/v1/constants", get(constants))
        .with_state(Arc::new(AppState::default()));
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves on an already bound listener until ctrl-c.
pub async fn serve_on(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

pub async fn serve(port: u16, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    serve_on(listener, router(static_dir)).await
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(pairs: &[(&str, &str)]) -> HashMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn analyze_three_cycle_parameter() {
        let body = analyze_body(&q(&[("alpha_re", "-0.021"), ("alpha_im", "0.009")])).unwrap();
        assert!(body.contains(r#""membership":"InT","period":3"#), "{body}");
    }

    #[test]
    fn analyze_errors() {
        assert_eq!(analyze_body(&q(&[("alpha_re", "x")])).unwrap_err().status, 400);
        assert_eq!(analyze_body(&q(&[])).unwrap_err().status, 400);
        assert_eq!(analyze_body(&q(&[("alpha_re", "1")])).unwrap_err().status, 422);
        assert_eq!(analyze_body(&q(&[("alpha_re", "nan")])).unwrap_err().status, 400);
    }

    #[test]
    fn single_pixel_tile_is_37_bytes() {
        let (req, fmt) = parse_render_query(&q(&[("px", "1"), ("py", "1")])).unwrap();
        assert_eq!(encode_output(&req.render().unwrap(), fmt).unwrap().len(), 37);
    }

    #[test]
    fn render_query_validation() {
        assert_eq!(parse_render_query(&q(&[("px", "0")])).unwrap_err().status, 400);
        assert_eq!(parse_render_query(&q(&[("plane", "dyn")])).unwrap_err().status, 400);
        assert_eq!(parse_render_query(&q(&[("family", "mandel")])).unwrap_err().status, 400);
        assert_eq!(parse_render_query(&q(&[("family", "an_mask")])).unwrap_err().status, 400);
        let (req, _) = parse_render_query(&q(&[("plane", "dyn"), ("alpha_re", "1"), ("px", "2")])).unwrap();
        assert_eq!(req.render().unwrap_err().status, 422);
        let (req, _) =
            parse_render_query(&q(&[("family", "an_mask"), ("n", "2"), ("center_re", "0.4"), ("px", "2")])).unwrap();
        assert_eq!(req.render().unwrap_err().status, 422);
    }

    #[test]
    fn cache_key_ignores_unused_parameters() {
        let (a, _) = parse_render_query(&q(&[("px", "4"), ("alpha_re", "0.3")])).unwrap();
        let (b, _) = parse_render_query(&q(&[("px", "4"), ("py", "4")])).unwrap();
        assert_eq!(a.cache_key(), b.cache_key());
        let (c, _) = parse_render_query(&q(&[("px", "4"), ("width", "1.1")])).unwrap();
        assert_ne!(a.cache_key(), c.cache_key());
    }

    #[test]
    fn orbit_starts_at_free_value() {
        let body = orbit_body(&q(&[("alpha_re", "-0.021"), ("alpha_im", "0.009"), ("n", "1")])).unwrap();
        let pts: Vec<serde_json::Value> = serde_json::from_str(&body).unwrap();
        let inv = Complex64::new(-0.021, 0.009).inv();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0]["re"].as_f64().unwrap(), inv.re);
        assert_eq!(pts[0]["im"].as_f64().unwrap(), inv.im);
        let newton = orbit_body(&q(&[("family", "newton"), ("a_re", "-0.2"), ("n", "3")])).unwrap();
        assert!(newton.starts_with(r#"[{"re":0.0,"im":0.0}"#), "{newton}");
        assert_eq!(orbit_body(&q(&[("alpha_re", "0")])).unwrap_err().status, 422);
    }

    #[test]
    fn constants_json() {
        let v: serde_json::Value = serde_json::from_str(&constants_body()).unwrap();
        let p = v["p_star"].as_f64().unwrap();
        assert!(p > 0.01 && p < 0.02);
        assert!(v["C"].as_f64().is_some() && v["t"].as_f64().is_some());
    }
}
