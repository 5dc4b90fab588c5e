//! Log-polar raster images of the tiling, escape speed and the disk chain.
//!
//! Columns sweep `s = log(|z|/R_n)` left to right; rows sweep the argument
//! from `θ_max` at the top to `θ_min` at the bottom. Pixels are sampled at
//! their centres.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::Construction;
use crate::dynamics::{iterate, StopReason};
use crate::error::{Error, Result};
use crate::logplane::{LPoint, LValue};
use crate::qgmap::{classify, RegionTag};

pub type Rgb = [u8; 3];

/// Tile colours for [`Coloring::RegionTag`].
pub const PALETTE_INNER_CORE: Rgb = [0x30, 0x30, 0x30];
pub const PALETTE_INTERP_LOWER: Rgb = [0x2b, 0x83, 0xba];
pub const PALETTE_CRITICAL_BAND: Rgb = [0xd7, 0x19, 0x1c];
pub const PALETTE_INTERP_UPPER: Rgb = [0xfd, 0xae, 0x61];
pub const PALETTE_CORE: Rgb = [0xab, 0xdd, 0xa4];

/// Pixels whose orbit leaves the tabulated levels.
pub const PALETTE_BEYOND: Rgb = [0xff, 0xff, 0xff];
/// Disk and critical-point overlay colour.
pub const PALETTE_DISK: Rgb = [0xff, 0x00, 0xff];

pub const MAX_DIMENSION: usize = 1 << 16;

pub fn tag_color(tag: RegionTag) -> Rgb {
    match tag {
        RegionTag::InnerCore => PALETTE_INNER_CORE,
        RegionTag::InterpLower(_) => PALETTE_INTERP_LOWER,
        RegionTag::CriticalBand(_) => PALETTE_CRITICAL_BAND,
        RegionTag::InterpUpper(_) => PALETTE_INTERP_UPPER,
        RegionTag::Core(_) => PALETTE_CORE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coloring {
    RegionTag,
    /// Levels gained after `steps` iterations.
    LevelsAdvanced { steps: usize },
    /// Tiles dimmed, with `D_n` and `ξ_n` overlaid.
    DiskChain { delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterSpec {
    pub level: usize,
    /// `s` range relative to `R_level`; `None` means `[log P_n, log P_{n+1}]`.
    pub s_range: Option<(f64, f64)>,
    pub theta_range: (f64, f64),
    pub width: usize,
    pub height: usize,
    pub coloring: Coloring,
}

impl RasterSpec {
    pub fn new(level: usize, width: usize, height: usize, coloring: Coloring) -> Self {
        RasterSpec {
            level,
            s_range: None,
            theta_range: (-PI, PI),
            width,
            height,
            coloring,
        }
    }

    /// The effective `s` range.
    pub fn s_bounds(&self, ctx: &Construction) -> (f64, f64) {
        self.s_range.unwrap_or_else(|| {
            let n = self.level;
            let lo = -2.0 * ctx.half_width_f64(n);
            let hi = ctx.log_r_gap(n + 1, n).to_f64() - 2.0 * ctx.half_width_f64(n + 1);
            (lo, hi)
        })
    }

    /// `s` at the centre of column `x`.
    pub fn column_s(&self, ctx: &Construction, x: usize) -> f64 {
        let (lo, hi) = self.s_bounds(ctx);
        lo + (x as f64 + 0.5) * (hi - lo) / self.width as f64
    }

    /// `θ` at the centre of row `y` (row 0 is the top).
    pub fn row_theta(&self, y: usize) -> f64 {
        let (lo, hi) = self.theta_range;
        hi - (y as f64 + 0.5) * (hi - lo) / self.height as f64
    }

    fn validate(&self, ctx: &Construction) -> Result<()> {
        let dim_ok = |d: usize| (1..=MAX_DIMENSION).contains(&d);
        if !dim_ok(self.width) || !dim_ok(self.height) {
            return Err(Error::InvalidParameter {
                name: "size",
                reason: format!("width and height must be in 1..={MAX_DIMENSION}"),
            });
        }
        let (lo, hi) = self.s_bounds(ctx);
        if !(hi > lo) || !(self.theta_range.1 > self.theta_range.0) {
            return Err(Error::InvalidParameter {
                name: "range",
                reason: "s and theta ranges must be nondegenerate".into(),
            });
        }
        let steps = match self.coloring {
            Coloring::LevelsAdvanced { steps } => steps,
            _ => 0,
        };
        if self.level < 1 || self.level + steps > ctx.max_level() {
            return Err(Error::BeyondMaxLevel {
                max_level: ctx.max_level(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major.
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        Image {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    /// Binary PPM (`P6`) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(3 * self.pixels.len());
        for px in &self.pixels {
            out.extend_from_slice(px);
        }
        out
    }
}

pub fn write_ppm(img: &Image, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&img.to_ppm())?;
    w.flush()?;
    Ok(())
}

/// Renders the band; identical inputs give identical pixels.
pub fn render_band(ctx: &Construction, spec: &RasterSpec) -> Result<Image> {
    spec.validate(ctx)?;
    let columns: Vec<f64> = (0..spec.width).map(|x| spec.column_s(ctx, x)).collect();
    if !matches!(spec.coloring, Coloring::LevelsAdvanced { .. }) {
        // Tiles depend on the modulus alone: one row serves every argument.
        let row = columns
            .par_iter()
            .map(|&s| pixel_color(ctx, spec, s, 0.0))
            .collect::<Result<Vec<Rgb>>>()?;
        let mut img = Image {
            width: spec.width,
            height: spec.height,
            pixels: row.repeat(spec.height),
        };
        if let Coloring::DiskChain { delta } = spec.coloring {
            overlay_disk(ctx, spec, delta, &mut img);
        }
        return Ok(img);
    }
    let rows: Vec<Vec<Rgb>> = (0..spec.height)
        .into_par_iter()
        .map(|y| {
            let theta = spec.row_theta(y);
            columns
                .iter()
                .map(|&s| pixel_color(ctx, spec, s, theta))
                .collect::<Result<Vec<Rgb>>>()
        })
        .collect::<Result<_>>()?;
    Ok(Image {
        width: spec.width,
        height: spec.height,
        pixels: rows.into_iter().flatten().collect(),
    })
}

fn pixel_color(ctx: &Construction, spec: &RasterSpec, s: f64, theta: f64) -> Result<Rgb> {
    let p = LPoint::new(spec.level, s, theta);
    let tag = match classify(&p, ctx) {
        Ok(t) => t,
        Err(Error::BeyondMaxLevel { .. }) => return Ok(PALETTE_BEYOND),
        Err(e) => return Err(e),
    };
    match spec.coloring {
        Coloring::RegionTag => Ok(tag_color(tag)),
        Coloring::DiskChain { .. } => Ok(dim(tag_color(tag))),
        Coloring::LevelsAdvanced { steps } => {
            let orbit = iterate(&p.into(), ctx, steps);
            if orbit.stopped == StopReason::BeyondMaxLevel {
                return Ok(PALETTE_BEYOND);
            }
            let gained = match orbit.points.last() {
                Some(LValue::Point(q)) => q.normalized(ctx).level as f64 - spec.level as f64,
                _ => -(spec.level as f64),
            };
            Ok(ramp(gained, steps as f64))
        }
    }
}

fn dim(c: Rgb) -> Rgb {
    [c[0] / 3, c[1] / 3, c[2] / 3]
}

/// Blue (no gain or loss) through yellow (one level per step).
fn ramp(gained: f64, steps: f64) -> Rgb {
    let t = if steps > 0.0 { (gained / steps).clamp(0.0, 1.0) } else { 0.0 };
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    [lerp(20.0, 250.0), lerp(40.0, 220.0), lerp(160.0, 30.0)]
}

/// Marks the pixels of `D_n` and the pixel containing `ξ_n` (at least one
/// pixel even when the disk is narrower than a column).
fn overlay_disk(ctx: &Construction, spec: &RasterSpec, delta: f64, img: &mut Image) {
    let n = spec.level;
    if n < 2 {
        return;
    }
    let nf = n as f64;
    let centre = nf / (nf + 1.0);
    let radius = delta / nf.powi(4);
    let (lo, hi) = spec.s_bounds(ctx);
    let (tlo, thi) = spec.theta_range;
    let col = |s: f64| ((s - lo) / (hi - lo) * spec.width as f64).floor();
    let row = |t: f64| ((thi - t) / (thi - tlo) * spec.height as f64).floor();
    // Log-coordinate bounding box of the disk.
    let s_min = (centre - radius).ln();
    let s_max = (centre + radius).ln();
    let t_max = (radius / centre).asin();
    let (x0, x1) = (col(s_min), col(s_max));
    let (y0, y1) = (row(t_max), row(-t_max));
    for y in y0.max(0.0) as i64..=y1.min(spec.height as f64 - 1.0) as i64 {
        for x in x0.max(0.0) as i64..=x1.min(spec.width as f64 - 1.0) as i64 {
            let (x, y) = (x as usize, y as usize);
            let w = num_complex::Complex64::from_polar(spec.column_s(ctx, x).exp(), spec.row_theta(y));
            let inside = (w - centre).norm() <= radius;
            let is_centre_px = x as f64 == col(centre.ln()) && y as f64 == row(0.0);
            if inside || is_centre_px {
                img.pixels[y * spec.width + x] = PALETTE_DISK;
            }
        }
    }
    let (cx, cy) = (col(centre.ln()), row(0.0));
    if cx >= 0.0 && cy >= 0.0 && (cx as usize) < spec.width && (cy as usize) < spec.height {
        img.pixels[cy as usize * spec.width + cx as usize] = PALETTE_DISK;
    }
}

/// Per-pixel tile dump with header `x,y,level,s,theta,tag`.
pub fn tag_csv(ctx: &Construction, spec: &RasterSpec) -> Result<String> {
    spec.validate(ctx)?;
    let mut out = String::from("x,y,level,s,theta,tag\n");
    for y in 0..spec.height {
        let theta = spec.row_theta(y);
        for x in 0..spec.width {
            let s = spec.column_s(ctx, x);
            let tag = match classify(&LPoint::new(spec.level, s, theta), ctx) {
                Ok(t) => t.to_string(),
                Err(Error::BeyondMaxLevel { .. }) => "Beyond".to_string(),
                Err(e) => return Err(e),
            };
            out.push_str(&format!("{x},{y},{},{s:.16e},{theta:.16e},{tag}\n", spec.level));
        }
    }
    Ok(out)
}
