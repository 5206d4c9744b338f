#![allow(dead_code)]

use std::sync::Arc;
use std::time::Duration;

use axum::body::{Body, Bytes};
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;
use vocmorph_cli::service::{router, AppState};
use vocmorph_core::persistence::vocp_to_bytes;
use vocmorph_core::signal::sawtooth;
use vocmorph_core::wav::wav_to_bytes;
use vocmorph_core::{analyze, AnalysisConfig, VocoderParams, WavEncoding};

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Bytes,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| {
            panic!("{e}: {}", String::from_utf8_lossy(&self.body));
        })
    }
}

#[derive(Clone)]
pub struct Api {
    router: Router,
    pub state: Arc<AppState>,
}

impl Api {
    pub fn new() -> Self {
        Self::with_timeout(Duration::from_secs(3600))
    }

    pub fn with_timeout(idle: Duration) -> Self {
        let state = Arc::new(AppState::new(idle));
        Self {
            router: router(state.clone()),
            state,
        }
    }

    pub async fn send(
        &self,
        method: Method,
        uri: &str,
        body: Vec<u8>,
        content_type: Option<&str>,
    ) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(ct) = content_type {
            req = req.header("content-type", ct);
        }
        let resp = self
            .router
            .clone()
            .oneshot(req.body(Body::from(body)).unwrap())
            .await
            .unwrap();
        let status = resp.status();
        let headers = resp.headers().clone();
        let body = resp.into_body().collect().await.unwrap().to_bytes();
        Reply {
            status,
            headers,
            body,
        }
    }

    pub async fn get(&self, uri: &str) -> Reply {
        self.send(Method::GET, uri, Vec::new(), None).await
    }

    pub async fn post(&self, uri: &str) -> Reply {
        self.send(Method::POST, uri, Vec::new(), None).await
    }

    pub async fn json(&self, method: Method, uri: &str, v: Value) -> Reply {
        self.send(
            method,
            uri,
            serde_json::to_vec(&v).unwrap(),
            Some("application/json"),
        )
        .await
    }

    pub async fn bytes(&self, uri: &str, body: Vec<u8>) -> Reply {
        self.send(Method::POST, uri, body, Some("application/octet-stream"))
            .await
    }

    pub async fn new_session(&self) -> String {
        let r = self.post("/sessions").await;
        assert_eq!(r.status, StatusCode::CREATED);
        r.json()["id"].as_str().unwrap().to_string()
    }

    /// Session with a canonical (vocp upload) and a non-linear (WAV upload)
    /// instance loaded.
    pub async fn loaded_session(&self) -> String {
        let id = self.new_session().await;
        let (a, _) = voice(150.0, 0.6);
        let r = self
            .bytes(
                &format!("/sessions/{id}/instance?axis=canonical&label=a"),
                vocp_to_bytes(&a).unwrap(),
            )
            .await;
        assert_eq!(
            r.status,
            StatusCode::OK,
            "{}",
            String::from_utf8_lossy(&r.body)
        );
        let (_, wav) = voice(180.0, 0.7);
        let r = self
            .bytes(
                &format!("/sessions/{id}/instance?axis=nonlinear&label=b"),
                wav,
            )
            .await;
        assert_eq!(
            r.status,
            StatusCode::OK,
            "{}",
            String::from_utf8_lossy(&r.body)
        );
        id
    }
}

/// Analyzed sawtooth plus its WAV bytes, 16 kHz.
pub fn voice(fo: f64, seconds: f64) -> (VocoderParams, Vec<u8>) {
    let w = sawtooth(fo, seconds, 16000, 0.4);
    let p = analyze(&w, &AnalysisConfig::default()).unwrap();
    (p, wav_to_bytes(&w, WavEncoding::Float32).unwrap())
}
