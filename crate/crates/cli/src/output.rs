//! Contour JSON and SVG overlay formats.

use std::fmt::Write as _;

use base64::Engine;
use hcontour_core::{write_pgm, Contour, GrayImage, Point};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Parameters recorded next to a detected contour. Keys appear in field
/// order; absent options are skipped.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ContourParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_threshold: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_mode: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_limit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fill_threshold: Option<u8>,
}

#[derive(Serialize)]
struct ContourDoc<'a> {
    algorithm: &'a str,
    points: Vec<[i64; 2]>,
    closed: bool,
    params: &'a ContourParams,
}

/// `{"algorithm":..,"points":[[x,y],..],"closed":true,"params":{..}}` plus a
/// trailing newline.
pub fn contour_json(algorithm: &str, contour: &Contour, params: &ContourParams) -> String {
    let doc = ContourDoc {
        algorithm,
        points: contour.points.iter().map(|p| [p.x, p.y]).collect(),
        closed: true,
        params,
    };
    let mut s = serde_json::to_string(&doc).expect("contour serializes");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsDoc {
    Bare(Vec<[i64; 2]>),
    Wrapped { points: Vec<[i64; 2]> },
}

/// Reads the points of a contour JSON document, or a bare `[[x,y],...]`
/// array.
pub fn parse_points(text: &str) -> Result<Vec<Point>, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let doc: PointsDoc = serde_json::from_value(value)
        .map_err(|_| "expected {\"points\": [[x,y],...]} or [[x,y],...]".to_string())?;
    let pts = match doc {
        PointsDoc::Bare(p) | PointsDoc::Wrapped { points: p } => p,
    };
    Ok(pts.into_iter().map(|[x, y]| Point::new(x, y)).collect())
}

/// SVG with the raster underneath and the contour as a closed red path
/// through pixel centres. The raster is embedded as a base64 PGM data URI
/// unless `href` is given.
pub fn svg_overlay(image: &GrayImage, contour: &Contour, href: Option<&str>) -> String {
    let (w, h) = (image.width(), image.height());
    let href = match href {
        Some(h) => xml_escape(h),
        None => format!(
            "data:image/x-portable-graymap;base64,{}",
            base64::engine::general_purpose::STANDARD.encode(write_pgm(image))
        ),
    };
    let mut path = String::new();
    for (i, p) in contour.points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(path, "{}{}.5 {}.5 ", cmd, p.x, p.y);
    }
    path.push('Z');
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <image href=\"{href}\" x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\"/>\n\
         <path d=\"{path}\" fill=\"none\" stroke=\"#ff0000\" stroke-width=\"1\"/>\n\
         </svg>\n"
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('"', "&quot;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
