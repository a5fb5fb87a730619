use alloc::format;
use alloc::vec::Vec;

use super::{Color, EntityClass, Observation, Scenario};

/// RGB8 image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn new(width: u32, height: u32, fill: [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            pixels.extend_from_slice(&fill);
        }
        Raster {
            width,
            height,
            pixels,
        }
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn fill_rect(&mut self, x0: u32, y0: u32, x1: u32, y1: u32, rgb: [u8; 3]) {
        for y in y0.min(self.height)..y1.min(self.height) {
            for x in x0.min(self.width)..x1.min(self.width) {
                let i = ((y * self.width + x) * 3) as usize;
                self.pixels[i..i + 3].copy_from_slice(&rgb);
            }
        }
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

fn background(s: Scenario) -> [u8; 3] {
    match s {
        Scenario::CargoPort => [46, 84, 120],
        Scenario::UrbanFire => [96, 96, 102],
        Scenario::Tracking => [70, 74, 70],
    }
}

fn rgb(c: Color) -> [u8; 3] {
    match c {
        Color::Red => [200, 30, 30],
        Color::Orange => [240, 140, 20],
        Color::Yellow => [230, 210, 40],
        Color::Green => [40, 160, 60],
        Color::Blue => [40, 70, 200],
        Color::White => [235, 235, 235],
        Color::Gray => [140, 140, 140],
        Color::Black => [20, 20, 20],
    }
}

fn shade(c: [u8; 3], class: EntityClass) -> [u8; 3] {
    // a small per-class tint keeps same-colored classes apart
    let k = class as u8;
    [
        c[0].saturating_sub(k * 3),
        c[1].saturating_sub(k * 2),
        c[2].saturating_add(k),
    ]
}

const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

fn draw_number(r: &mut Raster, x: u32, y: u32, n: usize) {
    let text = format!("{n}");
    for (k, ch) in text.bytes().enumerate() {
        let glyph = DIGITS[(ch - b'0') as usize];
        let gx = x + 4 * k as u32;
        for (row, bits) in glyph.iter().enumerate() {
            for col in 0..3u32 {
                if bits & (0b100 >> col) != 0 {
                    let (px, py) = (gx + col, y + row as u32);
                    r.fill_rect(px, py, px + 1, py + 1, [0, 0, 0]);
                }
            }
        }
    }
}

/// Paints the observation's regions far to near, each with a white label
/// band carrying its region index.
pub fn rasterize(obs: &Observation, scenario: Scenario, width: u32, height: u32) -> Raster {
    let mut r = Raster::new(width, height, background(scenario));
    let mut order: Vec<usize> = (0..obs.regions.len()).collect();
    order.sort_by(|&a, &b| {
        obs.regions[b]
            .range_m
            .total_cmp(&obs.regions[a].range_m)
            .then(a.cmp(&b))
    });
    for i in order {
        let reg = &obs.regions[i];
        let [x0, y0, x1, y1] = reg.bbox;
        r.fill_rect(x0, y0, x1, y1, shade(rgb(reg.color), reg.class));
        let band_bottom = (y0 + 7).min(y1);
        r.fill_rect(x0, y0, x1, band_bottom, [255, 255, 255]);
        if x1 - x0 >= 4 && band_bottom - y0 >= 6 {
            draw_number(&mut r, x0 + 1, y0 + 1, reg.index);
        }
    }
    r
}
