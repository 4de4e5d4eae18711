#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use dpar_core::model::TrainOptions;
use dpar_core::{train, Engine, L33tTable, Model};
use flate2::read::GzDecoder;
use http_body_util::BodyExt;
use tower::ServiceExt;

pub fn corpus(limit: usize) -> Vec<String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/xato_top100k.txt.gz");
    BufReader::new(GzDecoder::new(std::fs::File::open(path).unwrap())).lines().take(limit).map(|l| l.unwrap()).collect()
}

pub fn model() -> Model {
    static MODEL: OnceLock<Model> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            train(corpus(20_000).into_iter().map(Ok), &L33tTable::default(), &TrainOptions::default()).unwrap()
        })
        .clone()
}

pub fn engine() -> Engine {
    Engine::new(model(), L33tTable::default()).unwrap()
}

pub async fn call(app: &Router, method: &str, path: &str, body: &str) -> (StatusCode, String) {
    let request = Request::builder()
        .method(method)
        .uri(path)
        .header("content-type", "application/json")
        .body(Body::from(body.to_owned()))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

pub fn ready_app() -> Router {
    dpar_service::router(dpar_service::AppState::ready(engine(), Default::default(), Default::default()))
}

pub type Shared<T> = Arc<T>;
