//! Object-detection backend: letterbox geometry, prediction decoding,
//! class-wise non-maximum suppression, and the ONNX session adapter.
//!
//! The heavy runtime sits behind the [`DetectionModel`] trait so every piece
//! of the geometry pipeline is testable without a model file.

use crate::error::LayoutError;
use crate::geom::BBox;
use crate::layout::raster::PageImage;
use crate::layout::{DetectorConfig, LayoutBox, LayoutClass};

/// Letterbox mapping between a source bitmap and a square model input.
#[derive(Debug, Clone, Copy)]
pub struct Letterbox {
    /// Source-to-input scale factor.
    pub scale: f64,
    /// Horizontal padding in input pixels.
    pub dx: f64,
    /// Vertical padding in input pixels.
    pub dy: f64,
}

impl Letterbox {
    pub fn new(src_w: f64, src_h: f64, input_size: u32) -> Self {
        let input = f64::from(input_size);
        let scale = (input / src_w).min(input / src_h);
        Self {
            scale,
            dx: (input - src_w * scale) / 2.0,
            dy: (input - src_h * scale) / 2.0,
        }
    }

    pub fn to_input(&self, x: f64, y: f64) -> (f64, f64) {
        (x * self.scale + self.dx, y * self.scale + self.dy)
    }

    pub fn from_input(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.dx) / self.scale, (y - self.dy) / self.scale)
    }
}

/// Mapping chain: PDF user space <-> page bitmap <-> letterboxed input.
#[derive(Debug, Clone, Copy)]
pub struct PageMapper {
    media_box: BBox,
    /// Bitmap pixels per point.
    raster_scale: f64,
    pub letterbox: Letterbox,
}

impl PageMapper {
    pub fn new(media_box: BBox, image_w: u32, image_h: u32, input_size: u32) -> Self {
        let raster_scale = f64::from(image_w) / media_box.width().max(1e-9);
        Self {
            media_box,
            raster_scale,
            letterbox: Letterbox::new(f64::from(image_w), f64::from(image_h), input_size),
        }
    }

    /// User-space point to letterboxed input pixels (origin top-left).
    pub fn user_to_input(&self, x: f64, y: f64) -> (f64, f64) {
        let px = (x - self.media_box.x0) * self.raster_scale;
        let py = (self.media_box.y1 - y) * self.raster_scale;
        self.letterbox.to_input(px, py)
    }

    /// Letterboxed input pixels back to user space.
    pub fn input_to_user(&self, x: f64, y: f64) -> (f64, f64) {
        let (px, py) = self.letterbox.from_input(x, y);
        (
            self.media_box.x0 + px / self.raster_scale,
            self.media_box.y1 - py / self.raster_scale,
        )
    }

    /// Input-pixel xyxy box (top-left origin) to a user-space [`BBox`].
    pub fn box_to_user(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> BBox {
        let (ux0, uy1) = self.input_to_user(x0, y0);
        let (ux1, uy0) = self.input_to_user(x1, y1);
        BBox::new(ux0, uy0, ux1, uy1)
    }
}

/// One decoded model prediction in letterboxed input pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawDetection {
    /// xyxy, top-left origin.
    pub bbox: [f64; 4],
    pub confidence: f64,
    pub class_index: usize,
}

/// Decodes a raw output tensor into detections.
///
/// Two layouts are understood: `[N, 6]` rows of `x0 y0 x1 y1 conf class`
/// (post-NMS detection heads) and `[4 + nc, N]` columns of `cx cy w h` plus
/// per-class scores (anchor-free heads).
pub fn decode_predictions(data: &[f32], dims: &[usize]) -> Result<Vec<RawDetection>, LayoutError> {
    match dims {
        [_, n, 6] | [n, 6] => {
            let n = *n;
            let mut out = Vec::with_capacity(n);
            for row in 0..n {
                let r = &data[row * 6..row * 6 + 6];
                out.push(RawDetection {
                    bbox: [r[0] as f64, r[1] as f64, r[2] as f64, r[3] as f64],
                    confidence: r[4] as f64,
                    class_index: r[5] as usize,
                });
            }
            Ok(out)
        }
        [_, ch, n] | [ch, n] if *ch > 4 => {
            let (ch, n) = (*ch, *n);
            let nc = ch - 4;
            let at = |c: usize, i: usize| data[c * n + i] as f64;
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let (cx, cy, w, h) = (at(0, i), at(1, i), at(2, i), at(3, i));
                let (mut best, mut best_c) = (0.0f64, 0usize);
                for c in 0..nc {
                    let s = at(4 + c, i);
                    if s > best {
                        best = s;
                        best_c = c;
                    }
                }
                out.push(RawDetection {
                    bbox: [cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0],
                    confidence: best,
                    class_index: best_c,
                });
            }
            Ok(out)
        }
        other => Err(LayoutError::Inference(format!(
            "unrecognized output shape {other:?}"
        ))),
    }
}

fn iou_xyxy(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    BBox::new(a[0], a[1], a[2], a[3]).iou(&BBox::new(b[0], b[1], b[2], b[3]))
}

/// Greedy class-wise non-maximum suppression; input order does not matter,
/// output is sorted by descending confidence.
pub fn class_wise_nms(mut dets: Vec<RawDetection>, iou_threshold: f64) -> Vec<RawDetection> {
    dets.sort_by(|a, b| {
        b.confidence
            .partial_cmp(&a.confidence)
            .unwrap()
            .then(a.class_index.cmp(&b.class_index))
            .then(a.bbox[0].partial_cmp(&b.bbox[0]).unwrap())
    });
    let mut kept: Vec<RawDetection> = Vec::new();
    for det in dets {
        let suppressed = kept.iter().any(|k| {
            k.class_index == det.class_index && iou_xyxy(&k.bbox, &det.bbox) > iou_threshold
        });
        if !suppressed {
            kept.push(det);
        }
    }
    kept
}

/// Confidence filter, NMS, and coordinate mapping back to user space;
/// result sorted by descending confidence.
pub fn postprocess(
    raw: Vec<RawDetection>,
    cfg: &DetectorConfig,
    mapper: &PageMapper,
) -> Vec<LayoutBox> {
    let filtered: Vec<RawDetection> = raw
        .into_iter()
        .filter(|d| d.confidence >= cfg.confidence_threshold && d.confidence > 0.0)
        .collect();
    let kept = class_wise_nms(filtered, cfg.nms_iou_threshold);
    kept.into_iter()
        .filter_map(|d| {
            LayoutClass::from_index(d.class_index).map(|class| LayoutBox {
                class,
                bbox: mapper.box_to_user(d.bbox[0], d.bbox[1], d.bbox[2], d.bbox[3]),
                confidence: d.confidence,
            })
        })
        .collect()
}

/// CHW float tensor of a letterboxed image, gray-padded, values in [0, 1].
pub fn letterbox_tensor(image: &PageImage, input_size: u32) -> Vec<f32> {
    let input = input_size as usize;
    let lb = Letterbox::new(f64::from(image.width), f64::from(image.height), input_size);
    let mut tensor = vec![114.0 / 255.0; 3 * input * input];
    for oy in 0..input {
        for ox in 0..input {
            let (sx, sy) = lb.from_input(ox as f64 + 0.5, oy as f64 + 0.5);
            let (sx, sy) = (sx.floor() as i64, sy.floor() as i64);
            if sx < 0 || sy < 0 || sx >= i64::from(image.width) || sy >= i64::from(image.height) {
                continue;
            }
            let i = ((sy as u32 * image.width + sx as u32) * 3) as usize;
            for c in 0..3 {
                tensor[c * input * input + oy * input + ox] =
                    f32::from(image.pixels[i + c]) / 255.0;
            }
        }
    }
    tensor
}

/// Inference backend seam.
pub trait DetectionModel: Send + Sync {
    /// Runs inference on a CHW tensor of shape `[3, input, input]` and
    /// returns decoded detections in input-pixel coordinates.
    fn infer(&self, chw: &[f32], input_size: u32) -> Result<Vec<RawDetection>, LayoutError>;
}

/// Detects layout regions on one page image through a model backend.
///
/// Boxes come back in user space, confidence-filtered, class-wise
/// NMS-deduplicated, sorted by descending confidence.
pub fn detect_layout_model(
    model: &dyn DetectionModel,
    image: &PageImage,
    media_box: BBox,
    cfg: &DetectorConfig,
) -> Result<Vec<LayoutBox>, LayoutError> {
    if image.width == 0 || image.height == 0 {
        return Err(LayoutError::Inference("empty page image".into()));
    }
    let tensor = letterbox_tensor(image, cfg.input_size);
    let raw = model.infer(&tensor, cfg.input_size)?;
    let mapper = PageMapper::new(media_box, image.width, image.height, cfg.input_size);
    Ok(postprocess(raw, cfg, &mapper))
}

/// Loads the ONNX detector from `cfg.model_path`.
#[cfg(feature = "onnx")]
pub fn load_onnx_model(cfg: &DetectorConfig) -> Result<Box<dyn DetectionModel>, LayoutError> {
    Ok(Box::new(onnx::OnnxModel::load(cfg)?))
}

/// Without the `onnx` feature only the rule backend is available.
#[cfg(not(feature = "onnx"))]
pub fn load_onnx_model(_cfg: &DetectorConfig) -> Result<Box<dyn DetectionModel>, LayoutError> {
    Err(LayoutError::ModelLoad(
        "this build does not include the onnx feature; use the rules backend".into(),
    ))
}

#[cfg(feature = "onnx")]
mod onnx {
    use super::{decode_predictions, DetectionModel, RawDetection};
    use crate::error::LayoutError;
    use crate::layout::DetectorConfig;
    use tract_onnx::prelude::*;

    type RunnableOnnx = SimplePlan<TypedFact, Box<dyn TypedOp>, Graph<TypedFact, Box<dyn TypedOp>>>;

    pub struct OnnxModel {
        plan: RunnableOnnx,
    }

    impl OnnxModel {
        pub fn load(cfg: &DetectorConfig) -> Result<Self, LayoutError> {
            let input = cfg.input_size as usize;
            let plan = onnx()
                .model_for_path(&cfg.model_path)
                .and_then(|m| {
                    m.with_input_fact(0, f32::fact([1, 3, input, input]).into())
                })
                .and_then(|m| m.into_optimized())
                .and_then(|m| m.into_runnable())
                .map_err(|e| LayoutError::ModelLoad(e.to_string()))?;
            Ok(Self { plan })
        }
    }

    impl DetectionModel for OnnxModel {
        fn infer(&self, chw: &[f32], input_size: u32) -> Result<Vec<RawDetection>, LayoutError> {
            let input = input_size as usize;
            let tensor = tract_ndarray::Array4::from_shape_vec(
                (1, 3, input, input),
                chw.to_vec(),
            )
            .map_err(|e| LayoutError::Inference(e.to_string()))?;
            let outputs = self
                .plan
                .run(tvec!(Tensor::from(tensor).into()))
                .map_err(|e| LayoutError::Inference(e.to_string()))?;
            let out = outputs
                .first()
                .ok_or_else(|| LayoutError::Inference("model produced no outputs".into()))?;
            let dims: Vec<usize> = out.shape().to_vec();
            let data = out
                .to_array_view::<f32>()
                .map_err(|e| LayoutError::Inference(e.to_string()))?;
            let flat: Vec<f32> = data.iter().copied().collect();
            decode_predictions(&flat, &dims)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Test backend returning scripted detections.
    pub struct ScriptedModel(pub Vec<RawDetection>);

    impl DetectionModel for ScriptedModel {
        fn infer(&self, _chw: &[f32], _input: u32) -> Result<Vec<RawDetection>, LayoutError> {
            Ok(self.0.clone())
        }
    }

    fn det(b: [f64; 4], conf: f64, class: usize) -> RawDetection {
        RawDetection {
            bbox: b,
            confidence: conf,
            class_index: class,
        }
    }

    #[test]
    fn threshold_one_excludes_all() {
        let img = PageImage::blank(64, 64);
        let cfg = DetectorConfig {
            confidence_threshold: 1.0,
            ..DetectorConfig::default()
        };
        let model = ScriptedModel(vec![det([10.0, 10.0, 50.0, 50.0], 0.99, 1)]);
        let boxes =
            detect_layout_model(&model, &img, BBox::new(0.0, 0.0, 612.0, 792.0), &cfg).unwrap();
        assert!(boxes.is_empty());
    }

    #[test]
    fn identical_boxes_same_class_one_survivor() {
        let b = [100.0, 100.0, 300.0, 200.0];
        let kept = class_wise_nms(vec![det(b, 0.9, 1), det(b, 0.8, 1)], 0.45);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].confidence, 0.9);
    }

    #[test]
    fn different_class_overlaps_survive() {
        let b = [100.0, 100.0, 300.0, 200.0];
        let kept = class_wise_nms(vec![det(b, 0.9, 1), det(b, 0.8, 3)], 0.45);
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn nms_invariant_no_pair_above_threshold() {
        // dense grid of overlapping candidates
        let mut dets = Vec::new();
        for i in 0..6 {
            for j in 0..4 {
                let x = 50.0 * i as f64;
                let y = 40.0 * j as f64;
                dets.push(det([x, y, x + 120.0, y + 90.0], 0.3 + 0.02 * (i + j) as f64, (i % 3) as usize));
            }
        }
        let kept = class_wise_nms(dets, 0.45);
        for (i, a) in kept.iter().enumerate() {
            for b in kept.iter().skip(i + 1) {
                if a.class_index == b.class_index {
                    assert!(iou_xyxy(&a.bbox, &b.bbox) <= 0.45);
                }
            }
        }
    }

    #[test]
    fn coordinate_round_trip_within_half_pixel() {
        let media = BBox::new(0.0, 0.0, 612.0, 792.0);
        let mapper = PageMapper::new(media, 612, 792, 1024);
        for &(x, y) in &[(0.0, 0.0), (612.0, 792.0), (72.5, 713.2), (300.0, 400.0)] {
            let (ix, iy) = mapper.user_to_input(x, y);
            // simulate integer pixel quantization in the detector
            let (qx, qy) = (ix.round(), iy.round());
            let (bx, by) = mapper.input_to_user(qx, qy);
            // 0.51 px in input space, expressed in user units
            let tol = 0.51 / (mapper.raster_scale * mapper.letterbox.scale);
            assert!((bx - x).abs() <= tol, "x {x} -> {bx}, tol {tol}");
            assert!((by - y).abs() <= tol, "y {y} -> {by}, tol {tol}");
        }
    }

    #[test]
    fn detections_map_back_to_user_space() {
        let media = BBox::new(0.0, 0.0, 612.0, 792.0);
        let img = PageImage::blank(612, 792);
        let mapper = PageMapper::new(media, 612, 792, 1024);
        // a box covering user-space (100,600)-(300,700)
        let (x0, y0) = mapper.user_to_input(100.0, 700.0);
        let (x1, y1) = mapper.user_to_input(300.0, 600.0);
        let model = ScriptedModel(vec![det([x0, y0, x1, y1], 0.8, 1)]);
        let boxes = detect_layout_model(&model, &img, media, &DetectorConfig::default()).unwrap();
        assert_eq!(boxes.len(), 1);
        assert_eq!(boxes[0].class, LayoutClass::PlainText);
        let b = boxes[0].bbox;
        assert!((b.x0 - 100.0).abs() < 0.01 && (b.x1 - 300.0).abs() < 0.01);
        assert!((b.y0 - 600.0).abs() < 0.01 && (b.y1 - 700.0).abs() < 0.01);
    }

    #[test]
    fn decode_rows_and_columns_layouts() {
        // [1, 2, 6] rows
        let rows = [
            1.0f32, 2.0, 11.0, 22.0, 0.9, 1.0, //
            5.0, 6.0, 15.0, 26.0, 0.7, 2.0,
        ];
        let dets = decode_predictions(&rows, &[1, 2, 6]).unwrap();
        assert_eq!(dets.len(), 2);
        assert_eq!(dets[0].class_index, 1);
        // [1, 6, 3] columns: cx cy w h + 2 class scores, 3 anchors
        let cols = [
            10.0f32, 20.0, 30.0, // cx
            10.0, 20.0, 30.0, // cy
            4.0, 4.0, 4.0, // w
            6.0, 6.0, 6.0, // h
            0.1, 0.8, 0.3, // class 0
            0.2, 0.1, 0.9, // class 1
        ];
        let dets = decode_predictions(&cols, &[1, 6, 3]).unwrap();
        assert_eq!(dets.len(), 3);
        assert_eq!(dets[1].class_index, 0);
        assert!((dets[1].confidence - 0.8).abs() < 1e-6);
        assert_eq!(dets[2].class_index, 1);
        assert_eq!(dets[0].bbox, [8.0, 7.0, 12.0, 13.0]);
        assert!(decode_predictions(&rows, &[7]).is_err());
    }
}
