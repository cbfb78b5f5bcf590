//! Rule-based layout detection: recursive XY-cut over text-run geometry.
//!
//! Deterministic and model-free, so the whole pipeline can run (and be
//! tested) hermetically. Emits plain-text leaves, a title box when one leaf
//! is set in clearly larger type, and abandon boxes for header/footer
//! margin bands.

use crate::geom::{union_all, BBox};
use crate::ir::TextRun;
use crate::layout::{LayoutBox, LayoutClass};

/// Vertical whitespace wider than this multiple of the median line height
/// splits regions.
const V_GAP_FACTOR: f64 = 1.5;
/// Horizontal whitespace wider than this multiple of the median char width
/// splits regions.
const H_GAP_FACTOR: f64 = 3.0;
/// Header/footer band depth, from the top and bottom page edges.
const MARGIN_BAND: f64 = 36.0;
/// A leaf whose mean font size reaches this multiple of the page median is
/// promoted to a title box.
const TITLE_SIZE_FACTOR: f64 = 1.3;

/// Detects layout regions from run geometry alone. Deterministic for fixed
/// input and invariant under permutation of `runs`.
pub fn detect_layout_rules(runs: &[TextRun], media_box: &BBox) -> Vec<LayoutBox> {
    if runs.is_empty() {
        return Vec::new();
    }
    // work over indices sorted by geometry so input order is irrelevant
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&runs[a].bbox, &runs[b].bbox);
        rb.y1
            .partial_cmp(&ra.y1)
            .unwrap()
            .then(ra.x0.partial_cmp(&rb.x0).unwrap())
            .then(a.cmp(&b))
    });

    let header_limit = media_box.y1 - MARGIN_BAND;
    let footer_limit = media_box.y0 + MARGIN_BAND;
    let mut header = Vec::new();
    let mut footer = Vec::new();
    let mut body = Vec::new();
    for &i in &order {
        let b = &runs[i].bbox;
        if b.y0 >= header_limit {
            header.push(i);
        } else if b.y1 <= footer_limit {
            footer.push(i);
        } else {
            body.push(i);
        }
    }

    let line_height = median(body.iter().map(|&i| runs[i].bbox.height()));
    let char_width = median(body.iter().map(|&i| {
        let n = runs[i].text.chars().count().max(1);
        runs[i].bbox.width() / n as f64
    }));
    let v_threshold = V_GAP_FACTOR * line_height;
    let h_threshold = H_GAP_FACTOR * char_width;

    let mut leaves = Vec::new();
    xy_cut(runs, &body, v_threshold, h_threshold, 0, &mut leaves);

    let mut boxes = Vec::new();
    // title promotion: the largest-type leaf, when clearly above body size
    let body_median_size = median(body.iter().map(|&i| runs[i].size));
    let leaf_mean_size = |leaf: &Vec<usize>| {
        leaf.iter().map(|&i| runs[i].size).sum::<f64>() / leaf.len() as f64
    };
    let title_leaf = leaves
        .iter()
        .enumerate()
        .filter(|(_, l)| leaf_mean_size(l) >= TITLE_SIZE_FACTOR * body_median_size)
        .max_by(|(_, a), (_, b)| leaf_mean_size(a).partial_cmp(&leaf_mean_size(b)).unwrap())
        .map(|(i, _)| i);

    for (li, leaf) in leaves.iter().enumerate() {
        let bbox = union_all(&leaf.iter().map(|&i| runs[i].bbox).collect::<Vec<_>>())
            .expect("leaves are non-empty");
        boxes.push(LayoutBox {
            class: if Some(li) == title_leaf {
                LayoutClass::Title
            } else {
                LayoutClass::PlainText
            },
            bbox,
            confidence: 1.0,
        });
    }
    for band in [header, footer] {
        if !band.is_empty() {
            let bbox = union_all(&band.iter().map(|&i| runs[i].bbox).collect::<Vec<_>>())
                .expect("band is non-empty");
            boxes.push(LayoutBox {
                class: LayoutClass::Abandon,
                bbox,
                confidence: 1.0,
            });
        }
    }
    boxes.sort_by(|a, b| {
        b.bbox
            .y1
            .partial_cmp(&a.bbox.y1)
            .unwrap()
            .then(a.bbox.x0.partial_cmp(&b.bbox.x0).unwrap())
    });
    boxes
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

fn xy_cut(
    runs: &[TextRun],
    group: &[usize],
    v_threshold: f64,
    h_threshold: f64,
    depth: usize,
    leaves: &mut Vec<Vec<usize>>,
) {
    if group.is_empty() {
        return;
    }
    if group.len() == 1 || depth > 32 {
        leaves.push(group.to_vec());
        return;
    }
    // best qualifying gap on each axis; vertical intervals are (y0, y1)
    let v_gap = widest_gap(group.iter().map(|&i| (runs[i].bbox.y0, runs[i].bbox.y1)))
        .filter(|g| g.width > v_threshold && v_threshold > 0.0);
    let h_gap = widest_gap(group.iter().map(|&i| (runs[i].bbox.x0, runs[i].bbox.x1)))
        .filter(|g| g.width > h_threshold && h_threshold > 0.0);

    let (axis, gap) = match (v_gap, h_gap) {
        (Some(v), Some(h)) => {
            if v.width >= h.width {
                (Axis::Y, v)
            } else {
                (Axis::X, h)
            }
        }
        (Some(v), None) => (Axis::Y, v),
        (None, Some(h)) => (Axis::X, h),
        (None, None) => {
            leaves.push(group.to_vec());
            return;
        }
    };

    let mid = (gap.start + gap.end) / 2.0;
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for &i in group {
        let b = &runs[i].bbox;
        let below_mid = match axis {
            Axis::Y => (b.y0 + b.y1) / 2.0 < mid,
            Axis::X => (b.x0 + b.x1) / 2.0 < mid,
        };
        if below_mid {
            second.push(i);
        } else {
            first.push(i);
        }
    }
    // reading order: top group first on Y; for X the smaller coordinates
    // (left column) come first
    let (a, b) = match axis {
        Axis::Y => (first, second),
        Axis::X => (second, first),
    };
    if a.is_empty() || b.is_empty() {
        leaves.push(group.to_vec());
        return;
    }
    xy_cut(runs, &a, v_threshold, h_threshold, depth + 1, leaves);
    xy_cut(runs, &b, v_threshold, h_threshold, depth + 1, leaves);
}

enum Axis {
    X,
    Y,
}

struct Gap {
    start: f64,
    end: f64,
    width: f64,
}

/// Widest uncovered gap in the union of intervals.
fn widest_gap(intervals: impl Iterator<Item = (f64, f64)>) -> Option<Gap> {
    let mut v: Vec<(f64, f64)> = intervals.collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut best: Option<Gap> = None;
    let mut covered_to = v.first()?.1;
    for &(start, end) in v.iter().skip(1) {
        if start > covered_to {
            let width = start - covered_to;
            if best.as_ref().is_none_or(|g| width > g.width) {
                best = Some(Gap {
                    start: covered_to,
                    end: start,
                    width,
                });
            }
        }
        covered_to = covered_to.max(end);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::run_at;
    use proptest::prelude::*;

    fn media() -> BBox {
        BBox::new(0.0, 0.0, 612.0, 792.0)
    }

    fn line(x: f64, y: f64, w: f64) -> crate::ir::TextRun {
        // 12pt-high line boxes
        run_at(BBox::new(x, y, x + w, y + 12.0))
    }

    #[test]
    fn empty_input_empty_output() {
        assert!(detect_layout_rules(&[], &media()).is_empty());
    }

    #[test]
    fn single_run_single_box() {
        let runs = vec![line(100.0, 400.0, 200.0)];
        let boxes = detect_layout_rules(&runs, &media());
        assert_eq!(boxes.len(), 1);
        assert_eq!(boxes[0].bbox, runs[0].bbox);
        assert_eq!(boxes[0].class, LayoutClass::PlainText);
        assert_eq!(boxes[0].confidence, 1.0);
    }

    #[test]
    fn vertical_gap_splits_two_clusters() {
        // two clusters of 12pt lines separated by ~50pt; median line height
        // 12 so the threshold is 18
        let mut runs = Vec::new();
        for i in 0..4 {
            runs.push(line(72.0, 700.0 - 14.0 * i as f64, 300.0));
        }
        for i in 0..4 {
            runs.push(line(72.0, 590.0 - 14.0 * i as f64, 300.0));
        }
        let boxes = detect_layout_rules(&runs, &media());
        assert_eq!(boxes.len(), 2);
        assert!(boxes[0].bbox.y0 > boxes[1].bbox.y1);
    }

    fn two_column_runs() -> Vec<crate::ir::TextRun> {
        // columns at x in [50, 280] and [320, 550]
        let mut runs = Vec::new();
        for i in 0..10 {
            runs.push(line(50.0, 700.0 - 14.0 * i as f64, 230.0));
            runs.push(line(320.0, 700.0 - 14.0 * i as f64, 230.0));
        }
        runs
    }

    /// Brute-force column oracle: cluster run centroids at the largest
    /// x-centroid gap.
    fn centroid_columns(runs: &[crate::ir::TextRun]) -> Vec<Vec<usize>> {
        let mut idx: Vec<usize> = (0..runs.len()).collect();
        idx.sort_by(|&a, &b| {
            runs[a]
                .bbox
                .center()
                .0
                .partial_cmp(&runs[b].bbox.center().0)
                .unwrap()
        });
        let mut split_at = None;
        let mut widest = 0.0;
        for w in idx.windows(2) {
            let gap = runs[w[1]].bbox.center().0 - runs[w[0]].bbox.center().0;
            if gap > widest {
                widest = gap;
                split_at = Some(w[1]);
            }
        }
        match split_at {
            Some(s) => {
                let pos = idx.iter().position(|&i| i == s).unwrap();
                vec![idx[..pos].to_vec(), idx[pos..].to_vec()]
            }
            None => vec![idx],
        }
    }

    #[test]
    fn two_columns_detected_and_match_centroid_oracle() {
        let runs = two_column_runs();
        let boxes = detect_layout_rules(&runs, &media());
        assert_eq!(boxes.len(), 2, "boxes: {boxes:?}");
        let oracle = centroid_columns(&runs);
        assert_eq!(oracle.len(), 2);
        for cluster in oracle {
            // every oracle cluster maps into exactly one detected box
            let parents: Vec<usize> = cluster
                .iter()
                .map(|&i| {
                    boxes
                        .iter()
                        .position(|b| b.bbox.contains(&runs[i].bbox))
                        .unwrap()
                })
                .collect();
            assert!(parents.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn margin_bands_become_abandon() {
        let mut runs = two_column_runs();
        runs.push(line(300.0, 14.0, 12.0)); // page number at y=14
        runs.push(line(200.0, 770.0, 180.0)); // running header
        let boxes = detect_layout_rules(&runs, &media());
        let abandons: Vec<_> = boxes
            .iter()
            .filter(|b| b.class == LayoutClass::Abandon)
            .collect();
        assert_eq!(abandons.len(), 2);
    }

    #[test]
    fn larger_type_leaf_becomes_title() {
        let mut runs = vec![];
        let mut title = line(150.0, 700.0, 300.0);
        title.size = 18.0;
        title.bbox = BBox::new(150.0, 700.0, 450.0, 718.0);
        runs.push(title);
        for i in 0..6 {
            runs.push(line(72.0, 640.0 - 14.0 * i as f64, 400.0));
        }
        let boxes = detect_layout_rules(&runs, &media());
        assert_eq!(boxes[0].class, LayoutClass::Title);
        assert!(boxes[1..].iter().all(|b| b.class == LayoutClass::PlainText));
    }

    proptest! {
        #[test]
        fn permutation_invariant(seed in any::<u64>()) {
            let mut runs = two_column_runs();
            runs.push(line(300.0, 20.0, 12.0));
            let baseline = detect_layout_rules(&runs, &media());
            let n = runs.len();
            for i in 0..n {
                let j = ((seed as usize).wrapping_mul(2654435761).wrapping_add(i * 40503)) % n;
                runs.swap(i, j);
            }
            let shuffled = detect_layout_rules(&runs, &media());
            prop_assert_eq!(baseline, shuffled);
        }
    }
}
