//! Page rasterization seam for the model backend.
//!
//! The detector consumes page bitmaps. Production deployments can plug in a
//! real renderer; the built-in [`RunBoxRasterizer`] paints text-run boxes,
//! which is geometry-faithful and keeps the pipeline hermetic.

use std::path::Path;

use crate::ir::PageIR;

/// An 8-bit RGB bitmap, rows top-to-bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageImage {
    pub width: u32,
    pub height: u32,
    /// RGB triples, `width * height * 3` bytes.
    pub pixels: Vec<u8>,
}

impl PageImage {
    pub fn blank(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            pixels: vec![0xff; (width * height * 3) as usize],
        }
    }

    pub fn fill_rect(&mut self, x0: u32, y0: u32, x1: u32, y1: u32, rgb: [u8; 3]) {
        for y in y0..y1.min(self.height) {
            for x in x0..x1.min(self.width) {
                let i = ((y * self.width + x) * 3) as usize;
                self.pixels[i..i + 3].copy_from_slice(&rgb);
            }
        }
    }

    pub fn save_png(&self, path: &Path) -> Result<(), String> {
        let img: image::RgbImage =
            image::ImageBuffer::from_raw(self.width, self.height, self.pixels.clone())
                .ok_or("pixel buffer size mismatch")?;
        img.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| e.to_string())
    }

    pub fn load_png(path: &Path) -> Result<Self, String> {
        let img = image::open(path).map_err(|e| e.to_string())?.to_rgb8();
        Ok(Self {
            width: img.width(),
            height: img.height(),
            pixels: img.into_raw(),
        })
    }
}

/// Renders a page to a bitmap at `scale` pixels per point.
pub trait Rasterizer {
    fn rasterize(&self, page: &PageIR, scale: f64) -> PageImage;
}

/// Paints each text run's box dark gray on white. Crude but faithful to the
/// geometry the layout stage cares about.
pub struct RunBoxRasterizer;

impl Rasterizer for RunBoxRasterizer {
    fn rasterize(&self, page: &PageIR, scale: f64) -> PageImage {
        let w = (page.media_box.width() * scale).ceil().max(1.0) as u32;
        let h = (page.media_box.height() * scale).ceil().max(1.0) as u32;
        let mut img = PageImage::blank(w, h);
        for run in &page.runs {
            let b = &run.bbox;
            // flip to top-left origin
            let x0 = ((b.x0 - page.media_box.x0) * scale).floor().max(0.0) as u32;
            let x1 = ((b.x1 - page.media_box.x0) * scale).ceil().max(0.0) as u32;
            let y0 = ((page.media_box.y1 - b.y1) * scale).floor().max(0.0) as u32;
            let y1 = ((page.media_box.y1 - b.y0) * scale).ceil().max(0.0) as u32;
            img.fill_rect(x0, y0, x1, y1, [0x30, 0x30, 0x30]);
        }
        img
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::parse_document;

    #[test]
    fn rasterize_marks_run_areas() {
        let doc = parse_document(&crate::corpus::single_column()).unwrap();
        let img = RunBoxRasterizer.rasterize(&doc.pages[0], 1.0);
        assert_eq!(img.width, 612);
        assert_eq!(img.height, 792);
        let dark = img.pixels.chunks(3).filter(|p| p[0] < 0x80).count();
        assert!(dark > 1000, "painted {dark} dark pixels");
    }

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("page.png");
        let mut img = PageImage::blank(40, 30);
        img.fill_rect(5, 5, 20, 12, [10, 200, 30]);
        img.save_png(&path).unwrap();
        let back = PageImage::load_png(&path).unwrap();
        assert_eq!(img, back);
    }
}
