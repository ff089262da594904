//! SVG figures in the disk model.

use std::fmt::Write;
use std::path::Path;

use carleson_core::beltrami::BeltramiField;
use carleson_core::fundomain::FundamentalDomainView;
use carleson_core::group::{boundary_to_disk, limit_set_sample};
use carleson_core::moebius::{Model, C64};

use crate::config::{ConfigResult, RenderSpec, RunConfig};
use crate::report::{Record, Report, Status};

const PAD: f64 = 10.0;
/// Points per unit of parameter along drawn arcs.
const ARC_DENSITY: f64 = 64.0;

struct Canvas {
    size: f64,
    body: String,
}

impl Canvas {
    fn new(size: u32) -> Self {
        Self {
            size: size as f64,
            body: String::new(),
        }
    }

    fn px(&self, z: C64) -> (f64, f64) {
        let h = 0.5 * (self.size - 2.0 * PAD);
        (PAD + h * (1.0 + z.re), PAD + h * (1.0 - z.im))
    }

    fn unit_circle(&mut self, stroke: &str) {
        let c = 0.5 * self.size;
        let r = c - PAD;
        let _ = writeln!(
            self.body,
            r#"<circle cx="{c:.2}" cy="{c:.2}" r="{r:.2}" fill="none" stroke="{stroke}" stroke-width="1"/>"#
        );
    }

    /// Polyline through `f(t)` for `t ∈ [a, b]`, skipping non-finite points.
    fn curve(&mut self, f: impl Fn(f64) -> Option<C64>, a: f64, b: f64, stroke: &str, width: f64) {
        let n = ((b - a).abs() * ARC_DENSITY).ceil().max(8.0) as usize;
        let mut d = String::new();
        let mut pen_down = false;
        for k in 0..=n {
            match f(a + (b - a) * k as f64 / n as f64)
                .filter(|z| z.re.is_finite() && z.im.is_finite() && z.norm() <= 1.0 + 1e-9)
            {
                Some(z) => {
                    let (x, y) = self.px(z);
                    let _ = write!(d, "{}{x:.2} {y:.2} ", if pen_down { "L" } else { "M" });
                    pen_down = true;
                }
                None => pen_down = false,
            }
        }
        if !d.is_empty() {
            let _ = writeln!(
                self.body,
                r#"<path d="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
                d.trim_end()
            );
        }
    }

    fn dot(&mut self, z: C64, r: f64, fill: &str) {
        let (x, y) = self.px(z);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#
        );
    }

    fn finish(self) -> String {
        let s = self.size;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn color(word_len: usize) -> String {
    format!("hsl({},70%,45%)", (word_len * 47) % 360)
}

/// Sides of the domain, free arcs of its boundary at infinity and cusps.
pub fn domain_svg(fd: &FundamentalDomainView, spec: &RenderSpec, resolution: f64) -> String {
    let mut cv = Canvas::new(spec.size);
    cv.unit_circle("#bbbbbb");
    for s in fd.sides() {
        for &(a, b) in &s.visible {
            cv.curve(|t| Some(s.circle.point(t)), a, b, "black", 1.5);
        }
    }
    if let Ok(ib) = fd.infinite_boundary(resolution) {
        for &(a, b) in &ib.arcs {
            cv.curve(|t| Some(C64::from_polar(1.0, t)), a, b, "#1f77b4", 3.0);
        }
        for c in &ib.cusps {
            cv.dot(c.point, 4.0, "#d62728");
        }
    }
    cv.finish()
}

/// Images of the domain's boundary under the first `max_tiles` elements,
/// colored by word length.
pub fn tiles_svg(fd: &FundamentalDomainView, spec: &RenderSpec) -> String {
    let mut cv = Canvas::new(spec.size);
    cv.unit_circle("#888888");
    let pieces = fd.boundary_pieces();
    for e in fd.table().entries.iter().take(spec.max_tiles) {
        let stroke = color(e.word_len());
        let g = e.disk_map;
        for p in &pieces {
            cv.curve(
                |t| g.apply(p.circle.point(t)).ok(),
                p.start,
                p.end,
                &stroke,
                0.8,
            );
        }
    }
    cv.finish()
}

/// `|μ|²` on a square grid over the disk, darker for larger values.
pub fn field_svg(field: &BeltramiField, spec: &RenderSpec) -> String {
    let mut cv = Canvas::new(spec.size);
    let n = spec.heatmap.max(2);
    let cell = (cv.size - 2.0 * PAD) / n as f64;
    for j in 0..n {
        for i in 0..n {
            let z = C64::new(
                -1.0 + (2.0 * i as f64 + 1.0) / n as f64,
                1.0 - (2.0 * j as f64 + 1.0) / n as f64,
            );
            if z.norm() >= 1.0 {
                continue;
            }
            let v = field.evaluate(z).norm_sqr();
            if v <= 0.0 {
                continue;
            }
            let level = (255.0 * (1.0 - v.sqrt().min(1.0))).round() as u8;
            let (x, y) = (PAD + i as f64 * cell, PAD + j as f64 * cell);
            let _ = writeln!(
                cv.body,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="rgb({level},{level},255)"/>"#,
                cell + 0.05,
                cell + 0.05
            );
        }
    }
    cv.unit_circle("black");
    cv.finish()
}

pub fn limit_set_svg(points: &[C64], spec: &RenderSpec) -> String {
    let mut cv = Canvas::new(spec.size);
    cv.unit_circle("#bbbbbb");
    for &p in points {
        cv.dot(p, 1.5, "black");
    }
    cv.finish()
}

/// All figures for a run, as `(file name, contents)`.
pub fn render(cfg: &RunConfig, base_dir: &Path) -> ConfigResult<(Report, Vec<(String, String)>)> {
    let depth = cfg.depth.word_length;
    let mut report = Report::new("render", cfg.seed, Some(depth));
    let table = cfg.table()?;
    let native = table.model();
    let fd = crate::harness::domain_of(table, &mut report);
    let field = cfg.field.build(
        Some(&fd),
        cfg.field.model.map(Into::into).unwrap_or(native),
        base_dir,
    )?;
    let field = if field.model == Model::Halfplane {
        BeltramiField::cayley_pullback(field)?
    } else {
        field
    };
    let seeds: Vec<C64> = match native {
        Model::Disk => cfg
            .group
            .seeds
            .iter()
            .map(|&t| C64::from_polar(1.0, t))
            .collect(),
        _ => cfg.group.seeds.iter().map(|&t| C64::new(t, 0.0)).collect(),
    };
    let sample = limit_set_sample(fd.table(), &seeds);
    let sample = if native == Model::Halfplane {
        boundary_to_disk(&sample)
    } else {
        sample
    };
    let files = vec![
        (
            "domain.svg".to_string(),
            domain_svg(&fd, &cfg.render, cfg.tolerance.resolution),
        ),
        ("tiles.svg".to_string(), tiles_svg(&fd, &cfg.render)),
        ("field.svg".to_string(), field_svg(&field, &cfg.render)),
        (
            "limit_set.svg".to_string(),
            limit_set_svg(&sample, &cfg.render),
        ),
    ];
    report.push(
        Record::new("figures", "svg_rendering", Some(depth), Status::Diagnostic)
            .value(
                "files",
                files.iter().map(|f| f.0.clone()).collect::<Vec<_>>(),
            )
            .value("sides", fd.sides().len())
            .value("tiles", fd.table().len().min(cfg.render.max_tiles))
            .value("limit_points", sample.len()),
    );
    report.finish();
    Ok((report, files))
}
