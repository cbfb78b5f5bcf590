//! Layout detection: region classes, the rule-based XY-cut backend, the
//! ONNX model adapter, and run-to-region assignment.
//!
//! All coordinates stay in PDF user space (bottom-left origin); detector
//! image coordinates (top-left origin) are converted at this module's
//! boundary and nowhere else.

pub mod model;
pub mod raster;
pub mod rules;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::geom::BBox;
use crate::ir::TextRun;

/// Region classes detected on a page. `Abandon` regions (headers, footers,
/// page numbers) are never translated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutClass {
    PlainText,
    Title,
    Figure,
    FigureCaption,
    Table,
    TableCaption,
    TableFootnote,
    IsolateFormula,
    FormulaCaption,
    Abandon,
}

impl LayoutClass {
    /// Detector class index, mirroring the ten-class document-structure
    /// taxonomy the bundled model family is trained on.
    pub fn from_index(idx: usize) -> Option<LayoutClass> {
        use LayoutClass::*;
        [
            Title,
            PlainText,
            Abandon,
            Figure,
            FigureCaption,
            Table,
            TableCaption,
            TableFootnote,
            IsolateFormula,
            FormulaCaption,
        ]
        .get(idx)
        .copied()
    }

    /// Regions whose text is routed to the translator.
    pub fn translatable(self) -> bool {
        !matches!(
            self,
            LayoutClass::Figure
                | LayoutClass::Table
                | LayoutClass::IsolateFormula
                | LayoutClass::Abandon
        )
    }
}

/// A detected region with class and confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutBox {
    pub class: LayoutClass,
    pub bbox: BBox,
    pub confidence: f64,
}

/// Detector backend selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutBackend {
    Rules,
    Model,
}

/// Configuration of the model backend.
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    /// Square letterbox edge in pixels.
    pub input_size: u32,
    pub confidence_threshold: f64,
    pub nms_iou_threshold: f64,
    pub model_path: PathBuf,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            input_size: 1024,
            confidence_threshold: 0.25,
            nms_iou_threshold: 0.45,
            model_path: PathBuf::new(),
        }
    }
}

/// Assigns each run to the overlapping box with maximal overlap area.
///
/// Ties break toward higher confidence, then smaller box area, then earlier
/// box index. `Abandon` boxes are only eligible when nothing else overlaps
/// the run. Runs overlapping no box map to `None` and are rendered verbatim.
pub fn assign_runs(runs: &[TextRun], boxes: &[LayoutBox]) -> Vec<Option<usize>> {
    runs.iter()
        .map(|run| {
            let pick = |want_abandon: bool| -> Option<usize> {
                let mut best: Option<(usize, f64)> = None;
                for (i, b) in boxes.iter().enumerate() {
                    if (b.class == LayoutClass::Abandon) != want_abandon {
                        continue;
                    }
                    let overlap = run.bbox.overlap_area(&b.bbox);
                    if overlap <= 0.0 {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((j, prev)) => {
                            let pb = &boxes[j];
                            overlap > prev
                                || (overlap == prev
                                    && (b.confidence > pb.confidence
                                        || (b.confidence == pb.confidence
                                            && b.bbox.area() < pb.bbox.area())))
                        }
                    };
                    if better {
                        best = Some((i, overlap));
                    }
                }
                best.map(|(i, _)| i)
            };
            pick(false).or_else(|| pick(true))
        })
        .collect()
}

#[cfg(test)]
pub(crate) fn run_at(bbox: BBox) -> TextRun {
    use crate::ir::ShowPiece;
    TextRun {
        text: "x".into(),
        bbox,
        font: "f".into(),
        size: 10.0,
        page_index: 0,
        pieces: vec![ShowPiece::Bytes(b"x".to_vec())],
        raw_bytes: b"x".to_vec(),
        rise: 0.0,
        tm: [1.0, 0.0, 0.0, 1.0, bbox.x0, bbox.y0],
        advance: bbox.width(),
        char_spacing: 0.0,
        word_spacing: 0.0,
        h_scale: 1.0,
        rotated: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lbox(class: LayoutClass, bbox: BBox, confidence: f64) -> LayoutBox {
        LayoutBox {
            class,
            bbox,
            confidence,
        }
    }

    #[test]
    fn run_inside_single_box() {
        let runs = [run_at(BBox::new(10.0, 10.0, 20.0, 20.0))];
        let boxes = [lbox(
            LayoutClass::PlainText,
            BBox::new(0.0, 0.0, 100.0, 100.0),
            0.9,
        )];
        assert_eq!(assign_runs(&runs, &boxes), vec![Some(0)]);
    }

    #[test]
    fn straddling_run_goes_to_larger_overlap() {
        // overlaps 30 vs 20; the lower-confidence box still wins on area
        let runs = [run_at(BBox::new(0.0, 0.0, 10.0, 10.0))];
        let boxes = [
            lbox(LayoutClass::PlainText, BBox::new(0.0, 0.0, 3.0, 10.0), 0.5),
            lbox(LayoutClass::PlainText, BBox::new(3.0, 0.0, 5.0, 10.0), 0.99),
        ];
        assert_eq!(assign_runs(&runs, &boxes), vec![Some(0)]);
    }

    #[test]
    fn no_overlap_is_none() {
        let runs = [run_at(BBox::new(500.0, 500.0, 510.0, 510.0))];
        let boxes = [lbox(
            LayoutClass::PlainText,
            BBox::new(0.0, 0.0, 100.0, 100.0),
            0.9,
        )];
        assert_eq!(assign_runs(&runs, &boxes), vec![None]);
    }

    #[test]
    fn abandon_only_when_nothing_else_overlaps() {
        let runs = [run_at(BBox::new(10.0, 10.0, 20.0, 20.0))];
        let boxes = [
            lbox(LayoutClass::Abandon, BBox::new(0.0, 0.0, 100.0, 100.0), 1.0),
            lbox(LayoutClass::PlainText, BBox::new(10.0, 10.0, 15.0, 20.0), 0.3),
        ];
        assert_eq!(assign_runs(&runs, &boxes), vec![Some(1)]);
        let only_abandon = [boxes[0].clone()];
        assert_eq!(assign_runs(&runs, &only_abandon), vec![Some(0)]);
    }

    // brute-force oracle mirroring the documented tie-break exactly
    fn oracle_assign(run: &TextRun, boxes: &[LayoutBox]) -> Option<usize> {
        let overlaps: Vec<(usize, f64)> = boxes
            .iter()
            .enumerate()
            .map(|(i, b)| (i, run.bbox.overlap_area(&b.bbox)))
            .filter(|&(_, o)| o > 0.0)
            .collect();
        let non_abandon: Vec<(usize, f64)> = overlaps
            .iter()
            .copied()
            .filter(|&(i, _)| boxes[i].class != LayoutClass::Abandon)
            .collect();
        let pool = if non_abandon.is_empty() {
            overlaps
        } else {
            non_abandon
        };
        pool.into_iter()
            .min_by(|&(i, oi), &(j, oj)| {
                oj.partial_cmp(&oi)
                    .unwrap()
                    .then(boxes[j].confidence.partial_cmp(&boxes[i].confidence).unwrap())
                    .then(boxes[i].bbox.area().partial_cmp(&boxes[j].bbox.area()).unwrap())
                    .then(i.cmp(&j))
            })
            .map(|(i, _)| i)
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (0.0..300.0f64, 0.0..300.0f64, 5.0..120.0f64, 5.0..120.0f64)
            .prop_map(|(x, y, w, h)| BBox::new(x, y, x + w, y + h))
    }

    proptest! {
        #[test]
        fn assignment_matches_bruteforce_argmax(
            run_boxes in prop::collection::vec(arb_box(), 1..8),
            det_boxes in prop::collection::vec((arb_box(), 0.0..1.0f64, 0..10usize), 1..8),
        ) {
            let runs: Vec<TextRun> = run_boxes.into_iter().map(run_at).collect();
            let boxes: Vec<LayoutBox> = det_boxes
                .into_iter()
                .map(|(b, c, cls)| LayoutBox {
                    class: LayoutClass::from_index(cls).unwrap(),
                    bbox: b,
                    confidence: c,
                })
                .collect();
            let got = assign_runs(&runs, &boxes);
            for (run, assigned) in runs.iter().zip(&got) {
                prop_assert_eq!(*assigned, oracle_assign(run, &boxes));
            }
        }
    }
}
