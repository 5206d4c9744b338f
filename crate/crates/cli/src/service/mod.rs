//! HTTP session service. Each session holds one [`EditState`]; requests
//! against a session are serialized by its mutex, and long computations
//! run on a snapshot taken under that lock.

mod demo;
mod error;
mod views;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use vocmorph_core::persistence::{
    morph_object_from_bytes, morph_object_to_bytes, restore_edit_state, save_edit_state,
    vocp_from_bytes, VOCP_MAGIC,
};
use vocmorph_core::wav::{wav_from_bytes, wav_to_bytes};
use vocmorph_core::{
    analyze, morph::morph_with, morph::MorphOptions, rate_to_weights, rebase, synthesize,
    AnalysisConfig, AnchorEdit, AnchorSet, DistanceTrajectory, EditState, MorphObject, NamedParams,
    ViewState, VocoderParams, WavEncoding, Waveform, WeightMatrix,
};

pub use demo::{Demo, Knob, Pattern, PatternEntry, DEFAULT_TRIANGLE};
pub use error::{ApiError, ApiResult};
pub use views::{Axis, InstanceInfo, SessionView, Spectrogram, WaveformView};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(60 * 60);
const BODY_LIMIT: usize = 512 * 1024 * 1024;

pub struct Session {
    pub edit: EditState,
    /// Uploaded or synthesized audio per axis, dropped when an instance changes.
    audio: HashMap<Axis, Arc<Waveform>>,
    last_used: Instant,
}

impl Session {
    fn new(edit: EditState) -> Self {
        Self {
            edit,
            audio: HashMap::new(),
            last_used: Instant::now(),
        }
    }
}

type SessionRef = Arc<tokio::sync::Mutex<Session>>;

pub struct AppState {
    sessions: Mutex<HashMap<String, SessionRef>>,
    objects: Mutex<HashMap<String, Arc<MorphObject>>>,
    demo: Mutex<Option<Arc<Demo>>>,
    idle_timeout: Duration,
    analysis: AnalysisConfig,
}

impl AppState {
    pub fn new(idle_timeout: Duration) -> Self {
        Self {
            sessions: Mutex::new(HashMap::new()),
            objects: Mutex::new(HashMap::new()),
            demo: Mutex::new(None),
            idle_timeout,
            analysis: AnalysisConfig::default(),
        }
    }

    fn insert_session(&self, edit: EditState) -> (String, SessionRef) {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let s = Arc::new(tokio::sync::Mutex::new(Session::new(edit)));
        self.sessions.lock().unwrap().insert(id.clone(), s.clone());
        (id, s)
    }

    async fn session(&self, id: &str) -> ApiResult<tokio::sync::OwnedMutexGuard<Session>> {
        let s = self
            .sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session", id))?;
        let mut guard = s.lock_owned().await;
        if guard.last_used.elapsed() > self.idle_timeout {
            drop(guard);
            self.sessions.lock().unwrap().remove(id);
            return Err(ApiError::not_found("session", id));
        }
        guard.last_used = Instant::now();
        Ok(guard)
    }

    /// Drops sessions idle for longer than the timeout. Sessions that are
    /// busy right now are kept.
    pub fn sweep(&self) -> usize {
        let mut map = self.sessions.lock().unwrap();
        let before = map.len();
        map.retain(|_, s| match s.try_lock() {
            Ok(g) => g.last_used.elapsed() <= self.idle_timeout,
            Err(_) => true,
        });
        before - map.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    fn object(&self, id: &str) -> ApiResult<Arc<MorphObject>> {
        self.objects
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("morphing object", id))
    }

    fn insert_object(&self, obj: MorphObject) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.objects
            .lock()
            .unwrap()
            .insert(id.clone(), Arc::new(obj));
        id
    }
}

impl Default for AppState {
    fn default() -> Self {
        Self::new(DEFAULT_IDLE_TIMEOUT)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/instance", post(load_instance))
        .route(
            "/sessions/{id}/anchors",
            get(get_anchors).put(put_anchors).patch(patch_anchors),
        )
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/redo", post(redo))
        .route("/sessions/{id}/clear", post(clear))
        .route("/sessions/{id}/view", put(put_view))
        .route("/sessions/{id}/distance", get(distance))
        .route("/sessions/{id}/spectrogram", get(spectrogram))
        .route("/sessions/{id}/waveform", get(waveform))
        .route("/sessions/{id}/audio", get(audio))
        .route("/sessions/{id}/morph", post(morph_session))
        .route("/sessions/{id}/save-object", post(save_object))
        .route("/sessions/{id}/save-edit", post(save_edit))
        .route("/sessions/{id}/restore-edit", post(restore_edit))
        .route("/morphobjects", post(upload_object))
        .route("/morphobjects/{id}", get(object_info))
        .route("/morphobjects/{id}/rebase", post(rebase_object))
        .route("/demo/load", post(demo_load))
        .route("/demo/morph", post(demo_morph))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

/// Parses a JSON body. Only `application/json` is accepted; malformed or
/// mistyped payloads are 400.
fn json_body<T: DeserializeOwned>(headers: &HeaderMap, body: &[u8]) -> ApiResult<T> {
    let ok = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(|v| {
            v.split(';')
                .next()
                .unwrap_or("")
                .trim()
                .eq_ignore_ascii_case("application/json")
        })
        .unwrap_or(false);
    if !ok {
        return Err(ApiError::new(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            "unsupported_media_type",
            "expected content-type application/json",
        ));
    }
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("invalid JSON payload: {e}")))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> vocmorph_core::Result<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

fn wav_response(w: &Waveform, extra: Option<(&'static str, String)>) -> ApiResult<Response> {
    let bytes = wav_to_bytes(w, WavEncoding::Float32)?;
    let mut resp = ([(header::CONTENT_TYPE, "audio/wav")], bytes).into_response();
    if let Some((name, value)) = extra {
        if let Ok(v) = HeaderValue::from_str(&value) {
            resp.headers_mut().insert(name, v);
        }
    }
    Ok(resp)
}

fn file_response(bytes: Vec<u8>, name: &str) -> Response {
    (
        [
            (header::CONTENT_TYPE, "application/json".to_string()),
            (
                header::CONTENT_DISPOSITION,
                format!("attachment; filename=\"{name}\""),
            ),
        ],
        bytes,
    )
        .into_response()
}

/// Decodes an instance upload: `.vocp` bytes directly, WAV through analysis.
async fn decode_instance(body: Bytes, cfg: AnalysisConfig) -> ApiResult<VocoderParams> {
    if body.starts_with(&VOCP_MAGIC) {
        Ok(vocp_from_bytes(&body)?)
    } else if body.starts_with(b"RIFF") {
        blocking(move || analyze(&wav_from_bytes(&body)?, &cfg)).await
    } else {
        Err(ApiError::bad_request(
            "body is neither a vocp file nor a WAV file",
        ))
    }
}

fn view(id: &str, s: &Session) -> Json<SessionView> {
    Json(SessionView::of(id, &s.edit))
}

async fn create_session(State(app): State<Arc<AppState>>) -> (StatusCode, Json<SessionView>) {
    let (id, s) = app.insert_session(EditState::default());
    let s = s.lock().await;
    (StatusCode::CREATED, view(&id, &s))
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    let s = app.session(&id).await?;
    Ok(view(&id, &s))
}

async fn delete_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<StatusCode> {
    match app.sessions.lock().unwrap().remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::not_found("session", &id)),
    }
}

#[derive(Deserialize)]
struct InstanceQuery {
    axis: Axis,
    label: Option<String>,
}

async fn load_instance(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<InstanceQuery>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let canonical = match q.axis {
        Axis::Canonical => true,
        Axis::Nonlinear => false,
        Axis::Warped => {
            return Err(ApiError::bad_request(
                "instances load onto canonical or nonlinear",
            ))
        }
    };
    // fail fast on unknown sessions before analysing the upload
    drop(app.session(&id).await?);
    let wave = if body.starts_with(b"RIFF") {
        Some(Arc::new(wav_from_bytes(&body)?))
    } else {
        None
    };
    let params = decode_instance(body, app.analysis).await?;
    let label = q.label.unwrap_or_else(|| {
        if canonical {
            "canonical".into()
        } else {
            "nonlinear".into()
        }
    });
    let mut s = app.session(&id).await?;
    s.edit.load(canonical, NamedParams::new(label, params))?;
    s.audio.clear();
    if let Some(w) = wave {
        s.audio.insert(q.axis, w);
    }
    Ok(view(&id, &s))
}

async fn get_anchors(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<AnchorSet>> {
    let s = app.session(&id).await?;
    let e = s
        .edit
        .editor
        .as_ref()
        .ok_or_else(|| ApiError::bad_request("both instances must be loaded"))?;
    Ok(Json(e.anchors().clone()))
}

fn editor(s: &mut Session) -> ApiResult<&mut vocmorph_core::AnchorEditor> {
    s.edit
        .editor
        .as_mut()
        .ok_or_else(|| ApiError::bad_request("both instances must be loaded"))
}

async fn put_anchors(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let anchors: AnchorSet = json_body(&headers, &body)?;
    let mut s = app.session(&id).await?;
    editor(&mut s)?.replace(anchors)?;
    s.audio.remove(&Axis::Warped);
    Ok(view(&id, &s))
}

async fn patch_anchors(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let edit: AnchorEdit = json_body(&headers, &body)?;
    let mut s = app.session(&id).await?;
    editor(&mut s)?.apply(&edit)?;
    s.audio.remove(&Axis::Warped);
    Ok(view(&id, &s))
}

async fn history(
    app: Arc<AppState>,
    id: String,
    f: fn(&mut vocmorph_core::AnchorEditor) -> bool,
) -> ApiResult<Json<SessionView>> {
    let mut s = app.session(&id).await?;
    f(editor(&mut s)?);
    s.audio.remove(&Axis::Warped);
    Ok(view(&id, &s))
}

async fn undo(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    history(app, id, |e| e.undo()).await
}

async fn redo(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    history(app, id, |e| e.redo()).await
}

async fn clear(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    history(app, id, |e| e.clear()).await
}

async fn put_view(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let v: ViewState = json_body(&headers, &body)?;
    let mut s = app.session(&id).await?;
    let nyquist = s
        .edit
        .canonical
        .as_ref()
        .map_or(f64::INFINITY, |c| c.params.nyquist());
    if !(v.frequency_limit.is_finite() && v.frequency_limit > 0.0 && v.frequency_limit <= nyquist) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "out_of_range",
            format!(
                "frequency limit {} outside (0, {nyquist}]",
                v.frequency_limit
            ),
        ));
    }
    s.edit.view = v;
    Ok(view(&id, &s))
}

#[derive(Deserialize)]
struct DistanceQuery {
    fmax: Option<f64>,
}

async fn distance(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<DistanceQuery>,
) -> ApiResult<Json<DistanceTrajectory>> {
    let s = app.session(&id).await?;
    let st = &s.edit;
    match q.fmax {
        None => Ok(Json(st.distance()?)),
        Some(f) => {
            let c = st
                .canonical
                .as_ref()
                .ok_or_else(|| ApiError::bad_request("both instances must be loaded"))?;
            let w = st.warped_nonlinear()?;
            Ok(Json(vocmorph_core::alignment_distance(&c.params, &w, f)?))
        }
    }
}

fn axis_params(st: &EditState, axis: Axis) -> ApiResult<VocoderParams> {
    let missing = || ApiError::bad_request(format!("no instance loaded on the {axis:?} axis"));
    Ok(match axis {
        Axis::Canonical => st.canonical.as_ref().ok_or_else(missing)?.params.clone(),
        Axis::Nonlinear => st.nonlinear.as_ref().ok_or_else(missing)?.params.clone(),
        Axis::Warped => st.warped_nonlinear()?,
    })
}

#[derive(Deserialize)]
struct SpectrogramQuery {
    axis: Axis,
    fmax: Option<f64>,
}

async fn spectrogram(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SpectrogramQuery>,
) -> ApiResult<Json<Spectrogram>> {
    let s = app.session(&id).await?;
    let p = axis_params(&s.edit, q.axis)?;
    let fmax = q
        .fmax
        .unwrap_or(s.edit.view.frequency_limit.min(p.nyquist()));
    if !(fmax.is_finite() && fmax > 0.0 && fmax <= p.nyquist()) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "out_of_range",
            format!("fmax {fmax} outside (0, {}]", p.nyquist()),
        ));
    }
    Ok(Json(views::spectrogram(q.axis, &p, fmax)))
}

#[derive(Deserialize)]
struct AudioQuery {
    axis: Axis,
    columns: Option<usize>,
    seed: Option<u64>,
}

/// Audio for an axis: the uploaded recording when there is one, otherwise
/// a synthesis of the parameters (cached for the default seed).
async fn axis_audio(
    app: &AppState,
    id: &str,
    axis: Axis,
    seed: Option<u64>,
) -> ApiResult<Arc<Waveform>> {
    let p = {
        let s = app.session(id).await?;
        if seed.is_none() {
            if let Some(w) = s.audio.get(&axis) {
                return Ok(w.clone());
            }
        }
        axis_params(&s.edit, axis)?
    };
    let w = Arc::new(blocking(move || synthesize(&p, seed.unwrap_or(0))).await?);
    if seed.is_none() {
        let mut s = app.session(id).await?;
        s.audio.entry(axis).or_insert_with(|| w.clone());
    }
    Ok(w)
}

async fn waveform(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<AudioQuery>,
) -> ApiResult<Json<WaveformView>> {
    let w = axis_audio(&app, &id, q.axis, q.seed).await?;
    Ok(Json(views::waveform(q.axis, &w, q.columns.unwrap_or(1024))))
}

async fn audio(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<AudioQuery>,
) -> ApiResult<Response> {
    let w = axis_audio(&app, &id, q.axis, q.seed).await?;
    wav_response(&w, None)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphRequest {
    rate: Option<f64>,
    weights: Option<WeightMatrix>,
    #[serde(default)]
    seed: u64,
}

async fn morph_and_render(
    obj: MorphObject,
    w: WeightMatrix,
    seed: u64,
    extra: Option<(&'static str, String)>,
) -> ApiResult<Response> {
    let (wave, clamped) = blocking(move || {
        let out = morph_with(&obj, &w, &MorphOptions::default())?;
        Ok((synthesize(&out.params, seed)?, out.clamped))
    })
    .await?;
    let mut resp = wav_response(&wave, extra)?;
    resp.headers_mut()
        .insert("x-vocmorph-clamped", HeaderValue::from(clamped as u64));
    Ok(resp)
}

async fn morph_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let req: MorphRequest = json_body(&headers, &body)?;
    let w = match (req.rate, req.weights) {
        (Some(r), None) if r.is_finite() => rate_to_weights(r),
        (None, Some(w)) => w,
        (Some(_), None) => return Err(ApiError::bad_request("rate must be finite")),
        _ => return Err(ApiError::bad_request("give exactly one of rate or weights")),
    };
    // snapshot at receipt; the lock is released before rendering
    let obj = {
        let s = app.session(&id).await?;
        s.edit.to_morph_object()?
    };
    morph_and_render(obj, w, req.seed, None).await
}

async fn save_object(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let obj = {
        let s = app.session(&id).await?;
        s.edit.to_morph_object()?
    };
    let bytes = morph_object_to_bytes(&obj)?;
    let oid = app.insert_object(obj);
    let mut resp = file_response(bytes, "object.morb");
    resp.headers_mut().insert(
        "x-vocmorph-object-id",
        HeaderValue::from_str(&oid).expect("hex id"),
    );
    Ok(resp)
}

async fn save_edit(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let s = app.session(&id).await?;
    Ok(file_response(save_edit_state(&s.edit)?, "session.medit"))
}

async fn restore_edit(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let restored = restore_edit_state(&body)?;
    let mut s = app.session(&id).await?;
    s.edit = restored;
    s.audio.clear();
    Ok(view(&id, &s))
}

#[derive(Serialize, Deserialize)]
pub struct ObjectInfo {
    pub id: String,
    pub labels: Vec<String>,
    pub canonical_index: usize,
}

fn object_info_of(id: String, obj: &MorphObject) -> ObjectInfo {
    ObjectInfo {
        id,
        labels: obj.instances.iter().map(|i| i.label.clone()).collect(),
        canonical_index: obj.canonical_index,
    }
}

async fn upload_object(
    State(app): State<Arc<AppState>>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<ObjectInfo>)> {
    let obj = morph_object_from_bytes(&body)?;
    let info = object_info_of(String::new(), &obj);
    let id = app.insert_object(obj);
    Ok((StatusCode::CREATED, Json(ObjectInfo { id, ..info })))
}

async fn object_info(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<ObjectInfo>> {
    let obj = app.object(&id)?;
    Ok(Json(object_info_of(id, &obj)))
}

#[derive(Deserialize)]
struct RebaseQuery {
    label: Option<String>,
}

async fn rebase_object(
    State(app): State<Arc<AppState>>,
    Path(oid): Path<String>,
    Query(q): Query<RebaseQuery>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let obj = app.object(&oid)?;
    let params = decode_instance(body, app.analysis).await?;
    let st = rebase(
        NamedParams::new(q.label.unwrap_or_else(|| "canonical".into()), params),
        &obj,
    )?;
    let (id, s) = app.insert_session(st);
    let s = s.lock().await;
    Ok((StatusCode::CREATED, view(&id, &s)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoLoad {
    /// One three-instance object, or three two-instance objects sharing a
    /// canonical instance (ids from `POST /morphobjects`).
    objects: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub struct DemoInfo {
    pub labels: Vec<String>,
    pub vertices: [usize; 3],
    pub vertex_labels: Vec<String>,
}

async fn demo_load(
    State(app): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<DemoInfo>> {
    let req: DemoLoad = json_body(&headers, &body)?;
    let objects = req
        .objects
        .iter()
        .map(|id| app.object(id))
        .collect::<ApiResult<Vec<_>>>()?;
    let demo = match objects.len() {
        1 => Demo::from_object((*objects[0]).clone())?,
        3 => Demo::from_pairs(&objects.iter().map(|o| (**o).clone()).collect::<Vec<_>>())?,
        n => {
            return Err(ApiError::bad_request(format!(
                "expected one or three objects, got {n}"
            )))
        }
    };
    let info = DemoInfo {
        labels: demo
            .object
            .instances
            .iter()
            .map(|i| i.label.clone())
            .collect(),
        vertices: demo.vertices,
        vertex_labels: demo
            .vertices
            .iter()
            .map(|&v| demo.object.instances[v].label.clone())
            .collect(),
    };
    *app.demo.lock().unwrap() = Some(Arc::new(demo));
    Ok(Json(info))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoMorph {
    point: [f64; 2],
    triangle: Option<[[f64; 2]; 3]>,
    #[serde(default)]
    pattern: Pattern,
    #[serde(default)]
    seed: u64,
}

async fn demo_morph(
    State(app): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let req: DemoMorph = json_body(&headers, &body)?;
    let demo = app
        .demo
        .lock()
        .unwrap()
        .clone()
        .ok_or_else(|| ApiError::bad_request("no demo objects loaded"))?;
    let (coords, w) = demo.weights(
        req.point,
        req.triangle.unwrap_or(DEFAULT_TRIANGLE),
        &req.pattern,
    )?;
    let header = serde_json::to_string(&coords).expect("weights serialize");
    morph_and_render(
        demo.object.clone(),
        w,
        req.seed,
        Some(("x-vocmorph-weights", header)),
    )
    .await
}

/// Serves until the process ends, sweeping idle sessions once a minute.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            let n = sweeper.sweep();
            if n > 0 {
                tracing::info!(expired = n, "dropped idle sessions");
            }
        }
    });
    axum::serve(listener, router(state)).await
}
