//! Symbolic raster standing in for the camera image.
//!
//! Code table, base layer:
//!
//! | code        | meaning                                   |
//! |-------------|-------------------------------------------|
//! | 0           | floor                                     |
//! | 1           | agent standing on floor                   |
//! | 2 + 2k      | closed receptacle of kind k               |
//! | 3 + 2k      | open (or non-openable) receptacle kind k  |
//!
//! Overlay layer: 0 for nothing visible, 1 + j for an accessible receptacle
//! whose topmost content is object kind j. Closed receptacles never show an
//! overlay.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kinds::{ObjectKind, ReceptacleKind};
use super::state::WorldState;

pub const BASE_CODES: u8 = 2 + 2 * ReceptacleKind::ALL.len() as u8;
pub const OVERLAY_CODES: u8 = 1 + ObjectKind::ALL.len() as u8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VisualObs {
    pub rows: usize,
    pub cols: usize,
    pub base: Vec<u8>,
    pub overlay: Vec<u8>,
}

impl VisualObs {
    pub fn base_at(&self, r: usize, c: usize) -> u8 {
        self.base[r * self.cols + c]
    }

    pub fn overlay_at(&self, r: usize, c: usize) -> u8 {
        self.overlay[r * self.cols + c]
    }

    pub fn digest(&self) -> String {
        let mut bytes = Vec::with_capacity(self.base.len() * 2 + 2);
        bytes.push(self.rows as u8);
        bytes.push(self.cols as u8);
        bytes.extend_from_slice(&self.base);
        bytes.extend_from_slice(&self.overlay);
        crate::seed::sha256_hex(&bytes)
    }

    /// Two-character-per-cell dump, one row per line, base then overlay.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for layer in [&self.base, &self.overlay] {
            for r in 0..self.rows {
                let row: Vec<String> = (0..self.cols).map(|c| format!("{:2}", layer[r * self.cols + c])).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }

    pub fn hamming(&self, other: &VisualObs) -> usize {
        let b = self.base.iter().zip(&other.base).filter(|(a, b)| a != b).count();
        let o = self.overlay.iter().zip(&other.overlay).filter(|(a, b)| a != b).count();
        b + o
    }
}

pub fn receptacle_code(kind: ReceptacleKind, accessible: bool) -> u8 {
    2 + 2 * kind.index() as u8 + u8::from(accessible)
}

/// Inverse of [`receptacle_code`] for base codes ≥ 2.
pub fn kind_of_code(code: u8) -> Option<ReceptacleKind> {
    if !(2..BASE_CODES).contains(&code) {
        return None;
    }
    Some(ReceptacleKind::ALL[((code - 2) / 2) as usize])
}

pub fn render_visual(state: &WorldState) -> VisualObs {
    let (rows, cols) = state.grid_dims;
    let mut base = vec![0u8; rows * cols];
    let mut overlay = vec![0u8; rows * cols];
    for rec in &state.receptacles {
        let cell = rec.grid_pos.0 * cols + rec.grid_pos.1;
        base[cell] = receptacle_code(rec.kind, rec.accessible());
        if rec.accessible() {
            if let Some(top) = rec.contents.last() {
                overlay[cell] = 1 + state.objects[top].kind.index() as u8;
            }
        }
    }
    let agent = state.agent_pos.0 * cols + state.agent_pos.1;
    if base[agent] == 0 {
        base[agent] = 1;
    }
    VisualObs { rows, cols, base, overlay }
}

/// Side lengths of the occluding rectangle for a given rate.
pub fn noise_rect(rows: usize, cols: usize, rate: f64) -> (usize, usize) {
    let area = rate * (rows * cols) as f64;
    let h = (area.sqrt().round() as usize).clamp(1, rows);
    let w = ((area / h as f64).round() as usize).clamp(1, cols);
    (h, w)
}

/// Replaces a random axis-aligned rectangle covering roughly `rate` of the
/// cells with uniformly random codes on both layers.
pub fn apply_visual_noise(obs: &VisualObs, rate: f64, seed: u64) -> VisualObs {
    assert!((0.0..=1.0).contains(&rate), "noise rate must lie in [0, 1]");
    if rate == 0.0 {
        return obs.clone();
    }
    let mut rng = crate::seed::rng(seed);
    let (h, w) = noise_rect(obs.rows, obs.cols, rate);
    let r0 = rng.random_range(0..=obs.rows - h);
    let c0 = rng.random_range(0..=obs.cols - w);
    let mut out = obs.clone();
    for r in r0..r0 + h {
        for c in c0..c0 + w {
            let i = r * obs.cols + c;
            out.base[i] = rng.random_range(0..BASE_CODES);
            out.overlay[i] = rng.random_range(0..OVERLAY_CODES);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_table_sizes() {
        assert_eq!(BASE_CODES, 32);
        assert_eq!(OVERLAY_CODES, 25);
        for k in ReceptacleKind::ALL {
            assert_eq!(kind_of_code(receptacle_code(k, true)), Some(k));
            assert_eq!(kind_of_code(receptacle_code(k, false)), Some(k));
        }
    }

    #[test]
    fn rect_sizes_track_rate() {
        assert_eq!(noise_rect(7, 7, 1.0), (7, 7));
        for rate in [0.1, 0.2, 0.3, 0.4, 0.5] {
            let (h, w) = noise_rect(7, 7, rate);
            let frac = (h * w) as f64 / 49.0;
            assert!((frac - rate).abs() < 0.1, "rate {rate}: {h}x{w}");
        }
    }
}
