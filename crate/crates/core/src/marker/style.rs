use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius of the default marker, in pixels.
pub const DEFAULT_RADIUS: u32 = 5;
/// Radius of the "large" variant.
pub const LARGE_RADIUS: u32 = 10;
pub const DEFAULT_FONT_SIZE: u32 = 12;
pub const SMALL_FONT_SIZE: u32 = 8;

pub const RED: [u8; 3] = [255, 0, 0];
pub const BLUE: [u8; 3] = [0, 0, 255];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Circle,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelScheme {
    Letters,
    Numbers,
}

impl LabelScheme {
    /// Text drawn for the `index`-th candidate (0-based).
    pub fn candidate_text(self, index: usize) -> String {
        match self {
            LabelScheme::Letters => {
                let mut n = index;
                let mut s = Vec::new();
                loop {
                    s.push(b'A' + (n % 26) as u8);
                    if n < 26 {
                        break;
                    }
                    n = n / 26 - 1;
                }
                s.reverse();
                String::from_utf8(s).expect("ascii")
            }
            LabelScheme::Numbers => (index + 1).to_string(),
        }
    }

    /// Text drawn for the reference point of a correspondence item.
    pub fn reference_text(self) -> &'static str {
        match self {
            LabelScheme::Letters => "REF",
            LabelScheme::Numbers => "0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelPosition {
    Above,
    Below,
}

/// Full parameter vector of one marker variant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkerStyle {
    pub style_id: String,
    pub shape: Shape,
    pub fill_color: [u8; 3],
    /// Circle radius, or half the side of a square.
    pub radius: u32,
    pub label_scheme: LabelScheme,
    pub label_position: LabelPosition,
    pub font_size: u32,
    pub label_color: [u8; 3],
    /// Width of a black rim drawn inside the shape; 0 disables it.
    pub outline_width: u32,
}

impl MarkerStyle {
    pub fn validate(&self) -> Result<()> {
        if self.style_id.is_empty() {
            return Err(Error::ConfigInvalid("style with empty style_id".into()));
        }
        if self.radius < 1 {
            return Err(Error::ConfigInvalid(format!("style {}: radius must be >= 1", self.style_id)));
        }
        if self.font_size < 4 {
            return Err(Error::ConfigInvalid(format!("style {}: font_size must be >= 4", self.style_id)));
        }
        if self.outline_width > self.radius {
            return Err(Error::ConfigInvalid(format!(
                "style {}: outline_width exceeds radius",
                self.style_id
            )));
        }
        Ok(())
    }

    /// Chebyshev distance from a point beyond which this style never draws.
    pub fn reach(&self) -> u32 {
        self.radius + self.font_size + 4
    }
}

/// The baseline marker: small red circle with a numeric label above.
pub fn default_style() -> MarkerStyle {
    MarkerStyle {
        style_id: "default".into(),
        shape: Shape::Circle,
        fill_color: RED,
        radius: DEFAULT_RADIUS,
        label_scheme: LabelScheme::Numbers,
        label_position: LabelPosition::Above,
        font_size: DEFAULT_FONT_SIZE,
        label_color: RED,
        outline_width: 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StyleSet {
    pub default: MarkerStyle,
    pub variants: Vec<MarkerStyle>,
}

impl StyleSet {
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for s in self.all() {
            s.validate()?;
            if !ids.insert(s.style_id.as_str()) {
                return Err(Error::ConfigInvalid(format!("duplicate style id {}", s.style_id)));
            }
        }
        Ok(())
    }

    /// Default first, then variants in order.
    pub fn all(&self) -> impl Iterator<Item = &MarkerStyle> {
        std::iter::once(&self.default).chain(self.variants.iter())
    }

    pub fn get(&self, style_id: &str) -> Option<&MarkerStyle> {
        self.all().find(|s| s.style_id == style_id)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::UnreadableSource {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let set: StyleSet = serde_json::from_str(&text)
            .map_err(|e| Error::ConfigInvalid(format!("style set {}: {e}", path.display())))?;
        set.validate()?;
        Ok(set)
    }
}

/// Default marker plus sixteen variants.
///
/// Fifteen variants are the non-default cells of the 2×2×2×2 factorial over
/// colour (red/blue), shape (circle/square), size (radius 5/10) and label
/// position (above/below), ordered by number of changed axes. The sixteenth
/// shrinks the label font.
pub fn canonical_style_set() -> StyleSet {
    let base = default_style();
    let mut cells: Vec<u8> = (1u8..16).collect();
    cells.sort_by_key(|m| (m.count_ones(), *m));
    let mut variants: Vec<MarkerStyle> = cells
        .into_iter()
        .map(|mask| {
            let mut s = base.clone();
            let mut parts = Vec::new();
            if mask & 1 != 0 {
                s.fill_color = BLUE;
                s.label_color = BLUE;
                parts.push("blue");
            }
            if mask & 2 != 0 {
                s.shape = Shape::Square;
                parts.push("square");
            }
            if mask & 4 != 0 {
                s.radius = LARGE_RADIUS;
                parts.push("large");
            }
            if mask & 8 != 0 {
                s.label_position = LabelPosition::Below;
                parts.push("below");
            }
            s.style_id = parts.join("_");
            s
        })
        .collect();
    let mut small = base.clone();
    small.style_id = "small_font".into();
    small.font_size = SMALL_FONT_SIZE;
    variants.push(small);
    StyleSet { default: base, variants }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_baseline_marker() {
        let s = default_style();
        assert_eq!(s.shape, Shape::Circle);
        assert_eq!(s.label_position, LabelPosition::Above);
        assert_eq!(s.fill_color, [255, 0, 0]);
        assert_eq!(s.label_scheme, LabelScheme::Numbers);
    }

    #[test]
    fn canonical_set_shape() {
        let set = canonical_style_set();
        set.validate().unwrap();
        assert_eq!(set.variants.len(), 16);
        assert!(set.variants.iter().all(|v| v.style_id != set.default.style_id));
        let blue = set.get("blue").unwrap();
        let mut expect = default_style();
        expect.style_id = "blue".into();
        expect.fill_color = BLUE;
        expect.label_color = BLUE;
        assert_eq!(blue, &expect);
        assert_eq!(set.get("large").unwrap().radius, 10);
        assert!(set.get("blue_square_large_below").is_some());
    }

    #[test]
    fn label_texts() {
        assert_eq!(LabelScheme::Letters.candidate_text(0), "A");
        assert_eq!(LabelScheme::Letters.candidate_text(25), "Z");
        assert_eq!(LabelScheme::Letters.candidate_text(26), "AA");
        assert_eq!(LabelScheme::Numbers.candidate_text(1), "2");
        assert_eq!(LabelScheme::Letters.reference_text(), "REF");
        assert_eq!(LabelScheme::Numbers.reference_text(), "0");
    }

    #[test]
    fn invalid_styles_rejected() {
        let mut s = default_style();
        s.radius = 0;
        assert!(s.validate().is_err());
        let mut s = default_style();
        s.font_size = 3;
        assert!(s.validate().is_err());
        let mut set = canonical_style_set();
        set.variants[0].style_id = "default".into();
        assert!(set.validate().is_err());
    }

    #[test]
    fn style_set_json_round_trip() {
        let set = canonical_style_set();
        let text = serde_json::to_string(&set).unwrap();
        assert!(text.contains("\"fill_color\":[0,0,255]"));
        assert_eq!(serde_json::from_str::<StyleSet>(&text).unwrap(), set);
    }
}
