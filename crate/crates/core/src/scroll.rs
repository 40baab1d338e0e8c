//! The long horizontal scroll that panels are appended to.
//!
//! Panels are laid out left to right, the newest at the right edge, each
//! overlapping its predecessor by `overlap_px`. Inside an overlap the two
//! panels are cross-faded linearly. Only curated panels take part in the
//! layout; when none are curated the scroll shows a neutral placeholder.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::{vertical_gradient, RgbaImage};
use crate::prompt::PromptSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScrollError {
    #[error("panel is {got_w}x{got_h}, scroll expects {want_w}x{want_h}")]
    DimensionMismatch {
        want_w: u32,
        want_h: u32,
        got_w: u32,
        got_h: u32,
    },
    #[error("viewport {offset}+{width} outside scroll of width {total}")]
    OutOfRange { offset: u64, width: u64, total: u64 },
    #[error("no panel with index {0}")]
    UnknownPanel(u64),
    #[error("panel index {index} does not follow {last}")]
    IndexOrder { index: u64, last: u64 },
    #[error("invalid scroll geometry: {0}")]
    Geometry(String),
    #[error("cannot decode panel image: {0}")]
    Decode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScrollConfig {
    pub overlap_px: u32,
    pub max_panels: usize,
}

impl Default for ScrollConfig {
    fn default() -> Self {
        ScrollConfig {
            overlap_px: 64,
            max_panels: 64,
        }
    }
}

const PLACEHOLDER_TOP: [u8; 3] = [236, 232, 222];
const PLACEHOLDER_BOTTOM: [u8; 3] = [198, 194, 184];

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub index: u64,
    pub utterance_id: String,
    /// Engine-1 output as PNG.
    pub base_png: Arc<Vec<u8>>,
    pub prompt: PromptSpec,
    /// Stylized result as PNG.
    pub result_png: Arc<Vec<u8>>,
    pub result: Arc<RgbaImage>,
    pub created_at: u64,
    pub curated: bool,
}

impl Panel {
    /// Decodes `result_png` once so viewports can be rendered from memory.
    pub fn new(
        index: u64,
        utterance_id: impl Into<String>,
        base_png: Vec<u8>,
        prompt: PromptSpec,
        result_png: Vec<u8>,
        created_at: u64,
    ) -> Result<Self, ScrollError> {
        let result = RgbaImage::from_png(&result_png).map_err(|e| ScrollError::Decode(e.to_string()))?;
        Ok(Panel {
            index,
            utterance_id: utterance_id.into(),
            base_png: Arc::new(base_png),
            prompt,
            result_png: Arc::new(result_png),
            result: Arc::new(result),
            created_at,
            curated: true,
        })
    }

    /// A panel whose image is gone; kept for bookkeeping, never composed.
    pub fn missing(index: u64, utterance_id: impl Into<String>, prompt: PromptSpec, created_at: u64) -> Self {
        Panel {
            index,
            utterance_id: utterance_id.into(),
            base_png: Arc::new(Vec::new()),
            prompt,
            result_png: Arc::new(Vec::new()),
            result: Arc::new(RgbaImage::new(0, 0)),
            created_at,
            curated: false,
        }
    }

    pub fn is_missing(&self) -> bool {
        self.result_png.is_empty()
    }
}

/// Ring of the most recent panels plus layout parameters. Clones share the
/// panel images.
#[derive(Debug, Clone)]
pub struct Scroll {
    panels: VecDeque<Panel>,
    panel_width: u32,
    panel_height: u32,
    overlap_px: u32,
    max_panels: usize,
}

impl Scroll {
    pub fn new(panel_width: u32, panel_height: u32, config: ScrollConfig) -> Result<Self, ScrollError> {
        if panel_width == 0 || panel_height == 0 {
            return Err(ScrollError::Geometry("panel size must be positive".into()));
        }
        if config.overlap_px >= panel_width {
            return Err(ScrollError::Geometry(format!(
                "overlap {} must be smaller than panel width {panel_width}",
                config.overlap_px
            )));
        }
        if config.max_panels == 0 {
            return Err(ScrollError::Geometry("max_panels must be at least 1".into()));
        }
        Ok(Scroll {
            panels: VecDeque::new(),
            panel_width,
            panel_height,
            overlap_px: config.overlap_px,
            max_panels: config.max_panels,
        })
    }

    pub fn panel_width(&self) -> u32 {
        self.panel_width
    }

    pub fn panel_height(&self) -> u32 {
        self.panel_height
    }

    pub fn overlap_px(&self) -> u32 {
        self.overlap_px
    }

    pub fn max_panels(&self) -> usize {
        self.max_panels
    }

    pub fn panels(&self) -> impl ExactSizeIterator<Item = &Panel> {
        self.panels.iter()
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn get(&self, index: u64) -> Option<&Panel> {
        self.panels.iter().find(|p| p.index == index)
    }

    pub fn next_index(&self) -> u64 {
        self.panels.back().map_or(0, |p| p.index + 1)
    }

    fn curated(&self) -> Vec<&Panel> {
        self.panels.iter().filter(|p| p.curated && !p.is_missing()).collect()
    }

    /// Width of the composed strip. With no curated panels this is the
    /// width of the single placeholder panel.
    pub fn total_width(&self) -> u64 {
        let n = self.curated().len() as u64;
        if n == 0 {
            return u64::from(self.panel_width);
        }
        n * u64::from(self.panel_width) - u64::from(self.overlap_px) * (n - 1)
    }

    fn check_dims(&self, img: &RgbaImage) -> Result<(), ScrollError> {
        if (img.width(), img.height()) != (self.panel_width, self.panel_height) {
            return Err(ScrollError::DimensionMismatch {
                want_w: self.panel_width,
                want_h: self.panel_height,
                got_w: img.width(),
                got_h: img.height(),
            });
        }
        Ok(())
    }

    /// Append at the right edge; returns the evicted panel when the ring
    /// was full.
    pub fn append_panel(&mut self, panel: Panel) -> Result<Option<Panel>, ScrollError> {
        if !panel.is_missing() {
            self.check_dims(&panel.result)?;
        }
        if let Some(last) = self.panels.back() {
            if panel.index <= last.index {
                return Err(ScrollError::IndexOrder {
                    index: panel.index,
                    last: last.index,
                });
            }
        }
        self.panels.push_back(panel);
        Ok(if self.panels.len() > self.max_panels {
            self.panels.pop_front()
        } else {
            None
        })
    }

    pub fn set_curated(&mut self, index: u64, curated: bool) -> Result<(), ScrollError> {
        let panel = self
            .panels
            .iter_mut()
            .find(|p| p.index == index)
            .ok_or(ScrollError::UnknownPanel(index))?;
        panel.curated = curated && !panel.is_missing();
        Ok(())
    }

    /// Swap in a new stylized result, keeping everything else.
    pub fn replace_result(&mut self, index: u64, result_png: Vec<u8>, prompt: PromptSpec) -> Result<(), ScrollError> {
        let result = RgbaImage::from_png(&result_png).map_err(|e| ScrollError::Decode(e.to_string()))?;
        self.check_dims(&result)?;
        let panel = self
            .panels
            .iter_mut()
            .find(|p| p.index == index)
            .ok_or(ScrollError::UnknownPanel(index))?;
        panel.result_png = Arc::new(result_png);
        panel.result = Arc::new(result);
        panel.prompt = prompt;
        Ok(())
    }

    /// The neutral panel shown when nothing is curated.
    pub fn placeholder(width: u32, height: u32) -> RgbaImage {
        vertical_gradient(PLACEHOLDER_TOP, PLACEHOLDER_BOTTOM, width, height)
    }

    /// Crop `[offset, offset + width)` of the composed strip.
    ///
    /// Inside the overlap between panels `k-1` and `k`, column `j` (0-based
    /// from the start of panel `k`) mixes `left * (O - j) / O + right * j / O`,
    /// rounded to nearest. With nothing curated the placeholder gradient is
    /// returned at the requested size.
    pub fn render_viewport(&self, offset: u64, width: u64) -> Result<RgbaImage, ScrollError> {
        let total = self.total_width();
        let curated = self.curated();
        let out_of_range = ScrollError::OutOfRange { offset, width, total };
        if width == 0 || width > u64::from(u32::MAX) {
            return Err(out_of_range);
        }
        if curated.is_empty() {
            return Ok(Self::placeholder(width as u32, self.panel_height));
        }
        if offset.checked_add(width).is_none_or(|end| end > total) {
            return Err(out_of_range);
        }
        let w = width as u32;
        let overlap = u64::from(self.overlap_px);
        let stride = u64::from(self.panel_width) - overlap;
        let mut out = RgbaImage::new(w, self.panel_height);
        for i in 0..w {
            let x = offset + u64::from(i);
            let k = ((x / stride) as usize).min(curated.len() - 1);
            let local = x - k as u64 * stride;
            for y in 0..self.panel_height {
                let px = if k > 0 && local < overlap {
                    let left = curated[k - 1].result.get((stride + local) as u32, y);
                    let right = curated[k].result.get(local as u32, y);
                    blend(left, right, local, overlap)
                } else {
                    curated[k].result.get(local as u32, y)
                };
                out.put(i, y, px);
            }
        }
        Ok(out)
    }
}

fn blend(left: [u8; 4], right: [u8; 4], j: u64, overlap: u64) -> [u8; 4] {
    let mut out = [0u8; 4];
    for c in 0..4 {
        out[c] = ((u64::from(left[c]) * (overlap - j) + u64::from(right[c]) * j + overlap / 2) / overlap) as u8;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prompt() -> PromptSpec {
        PromptSpec {
            positive: "p".into(),
            negative: String::new(),
            strength: 0.5,
            steps: 1,
            seed: 0,
        }
    }

    fn panel(index: u64, w: u32, h: u32, color: [u8; 4]) -> Panel {
        let png = RgbaImage::filled(w, h, color).to_png().unwrap();
        Panel::new(index, format!("u{index}"), Vec::new(), prompt(), png, 0).unwrap()
    }

    fn scroll(n: u64, overlap: u32) -> Scroll {
        let mut s = Scroll::new(512, 8, ScrollConfig { overlap_px: overlap, max_panels: 64 }).unwrap();
        for i in 0..n {
            s.append_panel(panel(i, 512, 8, [i as u8, 0, 0, 255])).unwrap();
        }
        s
    }

    #[test]
    fn widths() {
        assert_eq!(scroll(1, 64).total_width(), 512);
        assert_eq!(scroll(3, 64).total_width(), 1408);
        assert_eq!(scroll(0, 64).total_width(), 512);
    }

    #[test]
    fn curation() {
        let mut s = scroll(3, 64);
        s.set_curated(1, false).unwrap();
        assert_eq!(s.total_width(), 512 * 2 - 64);
        s.set_curated(1, true).unwrap();
        assert_eq!(s.total_width(), 1408);
        assert_eq!(s.set_curated(9, false), Err(ScrollError::UnknownPanel(9)));
        for i in 0..3 {
            s.set_curated(i, false).unwrap();
        }
        assert_eq!(s.total_width(), 512);
        assert_eq!(s.render_viewport(0, 512).unwrap(), Scroll::placeholder(512, 8));
    }

    #[test]
    fn ring_eviction() {
        let mut s = Scroll::new(16, 8, ScrollConfig { overlap_px: 4, max_panels: 3 }).unwrap();
        for i in 0..3 {
            assert!(s.append_panel(panel(i, 16, 8, [0; 4])).unwrap().is_none());
        }
        let evicted = s.append_panel(panel(3, 16, 8, [0; 4])).unwrap().unwrap();
        assert_eq!(evicted.index, 0);
        let kept: Vec<u64> = s.panels().map(|p| p.index).collect();
        assert_eq!(kept, vec![1, 2, 3]);
        assert_eq!(s.next_index(), 4);
    }

    #[test]
    fn append_checks_dimensions_and_order() {
        let mut s = scroll(1, 64);
        assert!(matches!(
            s.append_panel(panel(1, 256, 8, [0; 4])),
            Err(ScrollError::DimensionMismatch { .. })
        ));
        assert!(matches!(s.append_panel(panel(0, 512, 8, [0; 4])), Err(ScrollError::IndexOrder { .. })));
    }

    #[test]
    fn red_blue_midpoint() {
        let mut s = Scroll::new(512, 4, ScrollConfig::default()).unwrap();
        s.append_panel(panel(0, 512, 4, [255, 0, 0, 255])).unwrap();
        s.append_panel(panel(1, 512, 4, [0, 0, 255, 255])).unwrap();
        let img = s.render_viewport(0, s.total_width()).unwrap();
        let mid = img.get(448 + 32, 2);
        assert!(mid[0].abs_diff(128) <= 1 && mid[1] == 0 && mid[2].abs_diff(127) <= 1, "{mid:?}");
        assert_eq!(img.get(447, 0), [255, 0, 0, 255]);
        assert_eq!(img.get(448, 0), [255, 0, 0, 255]);
        assert_eq!(img.get(512, 0), [0, 0, 255, 255]);
    }

    #[test]
    fn viewport_inside_one_panel_is_a_crop() {
        let mut s = Scroll::new(16, 4, ScrollConfig { overlap_px: 4, max_panels: 8 }).unwrap();
        let mut img = RgbaImage::new(16, 4);
        for x in 0..16 {
            for y in 0..4 {
                img.put(x, y, [x as u8 * 10, y as u8, 7, 255]);
            }
        }
        s.append_panel(Panel::new(0, "u", vec![], prompt(), img.to_png().unwrap(), 0).unwrap())
            .unwrap();
        s.append_panel(panel(1, 16, 4, [0; 4])).unwrap();
        let crop = s.render_viewport(2, 8).unwrap();
        for x in 0..8 {
            for y in 0..4 {
                assert_eq!(crop.get(x, y), img.get(x + 2, y));
            }
        }
    }

    #[test]
    fn out_of_range() {
        let s = scroll(2, 64);
        assert!(matches!(s.render_viewport(0, 0), Err(ScrollError::OutOfRange { .. })));
        assert!(matches!(s.render_viewport(961, 1), Err(ScrollError::OutOfRange { .. })));
        assert!(s.render_viewport(959, 1).is_ok());
    }

    #[test]
    fn geometry_validation() {
        assert!(Scroll::new(64, 8, ScrollConfig { overlap_px: 64, max_panels: 1 }).is_err());
        assert!(Scroll::new(64, 8, ScrollConfig { overlap_px: 0, max_panels: 0 }).is_err());
    }
}
