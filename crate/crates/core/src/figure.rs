//! Edge-versus-iteration plots as standalone SVG.
//!
//! The plotted values are embedded in a comment as `t,edge` lines so the
//! figure can be audited without re-running anything.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FigureError {
    #[error("nothing to plot: the series is empty")]
    EmptySeries,
    #[error("series has {iterations} iterations but {values} values")]
    LengthMismatch { iterations: usize, values: usize },
    #[error("figure size must be positive")]
    BadSize,
}

/// A labeled horizontal line, such as the golden-ratio fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLine {
    pub value: f64,
    pub label: String,
}

impl ReferenceLine {
    pub fn golden() -> Self {
        ReferenceLine {
            value: (5f64.sqrt() - 1.0) / 2.0,
            label: "(sqrt(5)-1)/2".into(),
        }
    }

    pub fn sqrt2_pair() -> [Self; 2] {
        [
            ReferenceLine {
                value: 2f64.sqrt() - 1.0,
                label: "sqrt(2)-1".into(),
            },
            ReferenceLine {
                value: 0.5f64.sqrt(),
                label: "sqrt(2)/2".into(),
            },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub title: String,
    pub width: u32,
    pub height: u32,
    pub iterations: Vec<usize>,
    pub values: Vec<f64>,
    pub references: Vec<ReferenceLine>,
}

impl FigureSpec {
    /// Edge series numbered from `first_iteration`, 800x400 and untitled.
    pub fn edges(first_iteration: usize, values: Vec<f64>) -> Self {
        FigureSpec {
            title: String::new(),
            width: 800,
            height: 400,
            iterations: (first_iteration..first_iteration + values.len()).collect(),
            values,
            references: Vec::new(),
        }
    }
}

const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders the figure. Identical specs give identical bytes.
pub fn render_svg(spec: &FigureSpec) -> Result<String, FigureError> {
    if spec.values.is_empty() {
        return Err(FigureError::EmptySeries);
    }
    if spec.iterations.len() != spec.values.len() {
        return Err(FigureError::LengthMismatch {
            iterations: spec.iterations.len(),
            values: spec.values.len(),
        });
    }
    if spec.width == 0 || spec.height == 0 {
        return Err(FigureError::BadSize);
    }
    let (w, h) = (spec.width as f64, spec.height as f64);
    let plot_w = (w - MARGIN_LEFT - MARGIN_RIGHT).max(1.0);
    let plot_h = (h - MARGIN_TOP - MARGIN_BOTTOM).max(1.0);
    let x0 = spec.iterations[0] as f64;
    let x1 = (*spec.iterations.last().unwrap() as f64).max(x0 + 1.0);
    let sx = |t: usize| MARGIN_LEFT + (t as f64 - x0) / (x1 - x0) * plot_w;
    let sy = |v: f64| MARGIN_TOP + (1.0 - v.clamp(0.0, 1.0)) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    out.push_str("<!-- data\nt,edge\n");
    for (t, v) in spec.iterations.iter().zip(&spec.values) {
        let _ = writeln!(out, "{t},{v:?}");
    }
    out.push_str("-->\n");
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    if !spec.title.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="18" font-size="14" text-anchor="middle">{}</text>"#,
            w / 2.0,
            escape(&spec.title)
        );
    }
    // Axes and ticks on the edge axis at 0, 0.25, ..., 1.
    let _ = writeln!(
        out,
        r#"<path d="M{l:.2},{t:.2} V{b:.2} H{r:.2}" fill="none" stroke="black"/>"#,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w
    );
    for q in 0..=4 {
        let v = q as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{v}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(v) + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">iteration {}..{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        h - 10.0,
        spec.iterations[0],
        spec.iterations.last().unwrap()
    );
    for line in &spec.references {
        let y = sy(line.value);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end" fill="gray">{}</text>"#,
            MARGIN_LEFT + plot_w,
            y - 3.0,
            escape(&line.label)
        );
    }
    out.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points=""#);
    for (k, (t, v)) in spec.iterations.iter().zip(&spec.values).enumerate() {
        if k > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", sx(*t), sy(*v));
    }
    out.push_str("\"/>\n</svg>\n");
    Ok(out)
}

/// Reads back the `t,edge` pairs embedded by [`render_svg`].
pub fn embedded_data(svg: &str) -> Option<Vec<(usize, f64)>> {
    let start = svg.find("<!-- data\nt,edge\n")? + "<!-- data\nt,edge\n".len();
    let end = start + svg[start..].find("-->")?;
    svg[start..end]
        .lines()
        .map(|line| {
            let (t, v) = line.split_once(',')?;
            Some((t.parse().ok()?, v.parse().ok()?))
        })
        .collect()
}
