//! wasm-bindgen exports for the static demo page in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(e: micromaser::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Flattened rows of `f, E0..E3, t01, t02, t12`; see [`demo::level_rows`].
#[wasm_bindgen]
pub fn levels(f_s: f64, f_start: f64, f_stop: f64, step: f64, n_p: usize, n_q: usize) -> Result<Vec<f64>, JsError> {
    demo::level_rows(f_s, f_start, f_stop, step, n_p, n_q).map_err(js)
}

#[wasm_bindgen]
pub struct PhotonStatistics(demo::Statistics);

#[wasm_bindgen]
impl PhotonStatistics {
    #[wasm_bindgen(getter)]
    pub fn sqc(&self) -> Vec<f64> {
        self.0.sqc.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn atomic(&self) -> Vec<f64> {
        self.0.atomic.clone()
    }

    /// `[mean, variance, fano]` under regular pumping.
    #[wasm_bindgen(getter, js_name = sqcMoments)]
    pub fn sqc_moments(&self) -> Vec<f64> {
        self.0.sqc_moments.to_vec()
    }

    #[wasm_bindgen(getter, js_name = atomicMoments)]
    pub fn atomic_moments(&self) -> Vec<f64> {
        self.0.atomic_moments.to_vec()
    }
}

#[wasm_bindgen(js_name = photonStatistics)]
pub fn photon_statistics(n_th: f64, n_t: f64, tau_over_pi: f64) -> Result<PhotonStatistics, JsError> {
    demo::photon_statistics(n_th, n_t, tau_over_pi)
        .map(PhotonStatistics)
        .map_err(js)
}

#[wasm_bindgen(js_name = deviceTable)]
pub fn device_table(gap_over_ej: f64, t01: f64, n_t: f64, tau_over_pi: f64) -> Result<String, JsError> {
    demo::device_table(gap_over_ej, t01, n_t, tau_over_pi).map_err(js)
}
