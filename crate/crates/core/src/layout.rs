//! Nested-shape maps of a form annotated with mutant kill information.
//!
//! Each mark becomes a closed shape holding its content row; atoms become
//! text labels; siblings sit left to right without overlap. A deletion
//! mutant styles the shape of the mark it deletes. A wrap mutant adds an
//! annotation ring around its target, dashed while the mutant survives.
//!
//! Geometry is in abstract units. Every item reserves a ring margin whether
//! or not it is annotated, so annotations never move other shapes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::form::{Form, Item, NodePath, NodeRef, Space};
use crate::logic::print_logic;
use crate::mutation::{Classification, Mutant, Operator};
use crate::testbase::KillReport;
use crate::translate::{item_to_logic, to_logic};

/// Smallest gap the containment invariant accepts between a shape and the
/// mark holding it.
pub const MIN_PADDING: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("mutant `{0}` does not reference a node of the displayed form")]
    DanglingMutantRef(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GroupingMode {
    #[default]
    Document,
    ByVariables,
    ByDepth,
    ByKillSector,
    ByKillCount,
}

impl GroupingMode {
    pub const ALL: [GroupingMode; 5] = [
        GroupingMode::Document,
        GroupingMode::ByVariables,
        GroupingMode::ByDepth,
        GroupingMode::ByKillSector,
        GroupingMode::ByKillCount,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupingMode::Document => "document",
            GroupingMode::ByVariables => "byVariables",
            GroupingMode::ByDepth => "byDepth",
            GroupingMode::ByKillSector => "byKillSector",
            GroupingMode::ByKillCount => "byKillCount",
        }
    }
}

impl FromStr for GroupingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupingMode::ALL
            .into_iter()
            .find(|mode| mode.as_str() == s)
            .ok_or_else(|| {
                format!("unknown grouping `{s}` (expected document, byVariables, byDepth, byKillSector or byKillCount)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ShapeKind {
    Mark,
    AtomLabel,
    RootFrame,
    WrapAnnotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StrokeKind {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FillClass {
    None,
    Killed,
    NotKilled,
    Equivalent,
    Unknown,
}

impl FillClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FillClass::None => "none",
            FillClass::Killed => "killed",
            FillClass::NotKilled => "notKilled",
            FillClass::Equivalent => "equivalent",
            FillClass::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ShapeClass {
    Ellipse,
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Geometry {
    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.width / 2.0, self.y + self.height / 2.0)
    }

    /// Smallest distance from `inner`'s edges to this box's edges; negative
    /// when `inner` sticks out.
    pub fn margin_around(&self, inner: &Geometry) -> f64 {
        (inner.x - self.x)
            .min(inner.y - self.y)
            .min(self.right() - inner.right())
            .min(self.bottom() - inner.bottom())
    }

    pub fn overlaps(&self, other: &Geometry) -> bool {
        self.x < other.right()
            && other.x < self.right()
            && self.y < other.bottom()
            && other.y < self.bottom()
    }

    fn inflate(&self, by: f64) -> Geometry {
        Geometry {
            x: self.x - by,
            y: self.y - by,
            width: self.width + 2.0 * by,
            height: self.height + 2.0 * by,
        }
    }

    /// True when every corner of `inner` lies inside the ellipse inscribed in
    /// this box.
    pub fn ellipse_contains(&self, inner: &Geometry) -> bool {
        let (cx, cy) = self.center();
        let (rx, ry) = (self.width / 2.0, self.height / 2.0);
        [
            (inner.x, inner.y),
            (inner.right(), inner.y),
            (inner.x, inner.bottom()),
            (inner.right(), inner.bottom()),
        ]
        .iter()
        .all(|&(x, y)| ((x - cx) / rx).powi(2) + ((y - cy) / ry).powi(2) <= 1.0 + 1e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShapeStyle {
    pub stroke_kind: StrokeKind,
    pub fill_class: FillClass,
    pub shape_class: ShapeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShapeNode {
    pub id: String,
    pub path: NodePath,
    pub kind: ShapeKind,
    pub geometry: Geometry,
    pub style: ShapeStyle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutant_ref: Option<String>,
    /// Conventional-logic reading of the node (or of the mutant, for rings).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tooltip: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SceneGraph {
    pub width: f64,
    pub height: f64,
    pub grouping: GroupingMode,
    pub shapes: Vec<ShapeNode>,
}

impl SceneGraph {
    pub fn shapes_of(&self, kind: ShapeKind) -> impl Iterator<Item = &ShapeNode> {
        self.shapes.iter().filter(move |s| s.kind == kind)
    }

    pub fn shape_for_mutant(&self, id: &str) -> Option<&ShapeNode> {
        self.shapes
            .iter()
            .find(|s| s.mutant_ref.as_deref() == Some(id))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Palette {
    pub killed: String,
    pub not_killed: String,
    pub equivalent: String,
    pub unknown: String,
    pub stroke: String,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            killed: "#2e7d32".into(),
            not_killed: "#c62828".into(),
            equivalent: "#9e9e9e".into(),
            unknown: "#ff8f00".into(),
            stroke: "#263238".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LayoutConfig {
    /// Space between a mark's edge and its content.
    pub padding: f64,
    /// Margin reserved around every item for an annotation ring.
    pub ring_gap: f64,
    pub sibling_gap: f64,
    /// Extra separation between the killed and not-killed sectors.
    pub sector_gutter: f64,
    pub atom_height: f64,
    pub char_width: f64,
    pub min_mark: f64,
    pub palette: Palette,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            padding: 8.0,
            ring_gap: 4.0,
            sibling_gap: 6.0,
            sector_gutter: 24.0,
            atom_height: 20.0,
            char_width: 9.0,
            min_mark: 16.0,
            palette: Palette::default(),
        }
    }
}

impl LayoutConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let config: LayoutConfig = serde_json::from_str(text)?;
        Ok(config.sanitized())
    }

    fn sanitized(mut self) -> Self {
        self.padding = self.padding.max(MIN_PADDING);
        self.ring_gap = self.ring_gap.max(1.0);
        self.sibling_gap = self.sibling_gap.max(1.0);
        self.sector_gutter = self.sector_gutter.max(0.0);
        self.atom_height = self.atom_height.max(1.0);
        self.char_width = self.char_width.max(1.0);
        self.min_mark = self.min_mark.max(1.0);
        self
    }
}

/// Display status of one mutant.
pub fn mutant_fill(mutant: &Mutant) -> FillClass {
    match mutant.classification {
        Some(Classification::Equivalent) => FillClass::Equivalent,
        Some(Classification::Unknown) => FillClass::Unknown,
        _ => match &mutant.info {
            None => FillClass::None,
            Some(info) if info.killed => FillClass::Killed,
            Some(info) if info.tests_unknown > 0 => FillClass::Unknown,
            Some(_) => FillClass::NotKilled,
        },
    }
}

fn is_surviving(mutant: &Mutant) -> bool {
    mutant_fill(mutant) == FillClass::NotKilled
}

struct Ctx<'a> {
    config: &'a LayoutConfig,
    grouping: GroupingMode,
    deletions: HashMap<NodePath, &'a Mutant>,
    wraps: HashMap<NodePath, &'a Mutant>,
    mutants: &'a [Mutant],
    /// Core shape size per item path.
    sizes: HashMap<NodePath, (f64, f64)>,
    /// Row size per space path.
    rows: HashMap<NodePath, (f64, f64)>,
    geometry: HashMap<NodePath, Geometry>,
}

#[derive(Clone, Copy)]
struct Size(f64, f64);

impl<'a> Ctx<'a> {
    fn mark_class(&self, path: &NodePath) -> ShapeClass {
        match self.deletions.get(path) {
            Some(m) if is_surviving(m) => ShapeClass::Rectangle,
            _ => ShapeClass::Ellipse,
        }
    }

    fn surviving_within(&self, path: &NodePath) -> usize {
        self.mutants
            .iter()
            .filter(|m| is_surviving(m) && (m.target == *path || path.is_ancestor_of(&m.target)))
            .count()
    }

    /// Sibling order for the space at `path`, and the index where the
    /// not-killed sector starts (root row under `ByKillSector` only).
    fn order(&self, space: &Space, path: &NodePath) -> (Vec<usize>, Option<usize>) {
        let mut order: Vec<usize> = (0..space.items.len()).collect();
        match self.grouping {
            GroupingMode::Document => {}
            GroupingMode::ByVariables => {
                let keys: Vec<String> = space
                    .items
                    .iter()
                    .map(|item| {
                        let vars = Form::new(vec![item.clone()]).variables();
                        vars.into_iter().collect::<Vec<_>>().join(",")
                    })
                    .collect();
                order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
            }
            GroupingMode::ByDepth => order.sort_by_key(|&i| space.items[i].depth()),
            GroupingMode::ByKillCount => {
                let counts: Vec<usize> = (0..space.items.len())
                    .map(|i| self.surviving_within(&path.child(i)))
                    .collect();
                order.sort_by(|&a, &b| counts[b].cmp(&counts[a]));
            }
            GroupingMode::ByKillSector if path.is_root() => {
                let (killed, surviving): (Vec<usize>, Vec<usize>) = order
                    .into_iter()
                    .partition(|&i| self.surviving_within(&path.child(i)) == 0);
                let split = (!killed.is_empty() && !surviving.is_empty()).then_some(killed.len());
                let mut order = killed;
                order.extend(surviving);
                return (order, split);
            }
            GroupingMode::ByKillSector => {}
        }
        (order, None)
    }

    fn slot(&self, core: (f64, f64)) -> Size {
        let g = self.config.ring_gap;
        Size(core.0 + 2.0 * g, core.1 + 2.0 * g)
    }

    fn measure_space(&mut self, space: &Space, path: &NodePath) -> (f64, f64) {
        let (order, split) = self.order(space, path);
        let mut width = 0.0;
        let mut height: f64 = 0.0;
        for (n, &i) in order.iter().enumerate() {
            let core = self.measure_item(&space.items[i], &path.child(i));
            let Size(w, h) = self.slot(core);
            if n > 0 {
                width += self.config.sibling_gap;
            }
            if split == Some(n) {
                width += self.config.sector_gutter;
            }
            width += w;
            height = height.max(h);
        }
        self.rows.insert(path.clone(), (width, height));
        (width, height)
    }

    fn measure_item(&mut self, item: &Item, path: &NodePath) -> (f64, f64) {
        let c = self.config;
        let size = match item {
            Item::Atom(name) => (
                (name.chars().count() as f64 * c.char_width + c.padding).max(c.atom_height),
                c.atom_height,
            ),
            Item::Mark(content) => {
                let (w, h) = self.measure_space(content, path);
                let inner = (
                    (w + 2.0 * c.padding).max(c.min_mark),
                    (h + 2.0 * c.padding).max(c.min_mark),
                );
                match self.mark_class(path) {
                    ShapeClass::Rectangle => inner,
                    ShapeClass::Ellipse => (
                        inner.0 * std::f64::consts::SQRT_2,
                        inner.1 * std::f64::consts::SQRT_2,
                    ),
                }
            }
        };
        self.sizes.insert(path.clone(), size);
        size
    }

    /// Places the row of `space` with its top-left corner at (x, y).
    fn place_space(&mut self, space: &Space, path: &NodePath, x: f64, y: f64) {
        let (order, split) = self.order(space, path);
        let row_height = self.rows[path].1;
        let g = self.config.ring_gap;
        let mut cursor = x;
        for (n, &i) in order.iter().enumerate() {
            let child = path.child(i);
            let core = self.sizes[&child];
            let Size(w, h) = self.slot(core);
            if n > 0 {
                cursor += self.config.sibling_gap;
            }
            if split == Some(n) {
                cursor += self.config.sector_gutter;
            }
            let top = y + (row_height - h) / 2.0;
            let geometry = Geometry {
                x: cursor + g,
                y: top + g,
                width: core.0,
                height: core.1,
            };
            self.geometry.insert(child.clone(), geometry);
            if let Item::Mark(content) = &space.items[i] {
                let (rw, rh) = self.rows[&child];
                let (cx, cy) = geometry.center();
                self.place_space(content, &child, cx - rw / 2.0, cy - rh / 2.0);
            }
            cursor += w;
        }
    }
}

/// Lays out `expr` with the given mutants (evaluated or not). Mutant targets
/// must address nodes of `expr`: deletions a mark, wraps an item or the root.
pub fn build_scene(
    expr: &Form,
    mutants: &[Mutant],
    grouping: GroupingMode,
    config: &LayoutConfig,
) -> Result<SceneGraph, LayoutError> {
    let mut deletions = HashMap::new();
    let mut wraps = HashMap::new();
    for mutant in mutants {
        let node = expr
            .node_at(&mutant.target)
            .map_err(|_| LayoutError::DanglingMutantRef(mutant.id.clone()))?;
        let slot = match (mutant.operator, node) {
            (Operator::Delete, NodeRef::Item(Item::Mark(_))) => &mut deletions,
            (Operator::Wrap, _) => &mut wraps,
            _ => return Err(LayoutError::DanglingMutantRef(mutant.id.clone())),
        };
        if slot.insert(mutant.target.clone(), mutant).is_some() {
            return Err(LayoutError::DanglingMutantRef(mutant.id.clone()));
        }
    }

    let mut ctx = Ctx {
        config,
        grouping,
        deletions,
        wraps,
        mutants,
        sizes: HashMap::new(),
        rows: HashMap::new(),
        geometry: HashMap::new(),
    };
    let root = NodePath::root();
    let (rw, rh) = ctx.measure_space(&expr.root, &root);
    let inset = config.padding + config.ring_gap;
    let frame = Geometry {
        x: 0.0,
        y: 0.0,
        width: (rw + 2.0 * inset).max(config.min_mark + 2.0 * inset),
        height: (rh + 2.0 * inset).max(config.atom_height + 2.0 * inset),
    };
    let (fx, fy) = frame.center();
    ctx.place_space(&expr.root, &root, fx - rw / 2.0, fy - rh / 2.0);

    let mut shapes = Vec::new();
    let mut push = |shapes: &mut Vec<ShapeNode>, mut shape: ShapeNode| {
        shape.id = format!("s{}", shapes.len());
        shapes.push(shape);
    };
    push(
        &mut shapes,
        ShapeNode {
            id: String::new(),
            path: root.clone(),
            kind: ShapeKind::RootFrame,
            geometry: frame,
            style: ShapeStyle {
                stroke_kind: StrokeKind::Solid,
                fill_class: FillClass::None,
                shape_class: ShapeClass::Rectangle,
            },
            label: None,
            mutant_ref: None,
            logic: Some(print_logic(&to_logic(expr))),
            tooltip: None,
        },
    );
    if let Some(mutant) = ctx.wraps.get(&root) {
        let row = Geometry {
            x: fx - rw / 2.0,
            y: fy - rh / 2.0,
            width: rw,
            height: rh,
        };
        push(
            &mut shapes,
            ring(mutant, row.inflate(config.ring_gap), ShapeClass::Rectangle),
        );
    }
    emit_space(&ctx, &expr.root, &root, &mut shapes, &mut push);

    for shape in &mut shapes {
        shape.tooltip = Some(tooltip(shape, mutants));
    }
    Ok(SceneGraph {
        width: frame.width,
        height: frame.height,
        grouping,
        shapes,
    })
}

/// Scene for the form a report's mutants were generated from.
pub fn scene_from_report(
    report: &KillReport,
    grouping: GroupingMode,
    config: &LayoutConfig,
) -> Result<SceneGraph, LayoutError> {
    build_scene(&report.origin, &report.mutants, grouping, config)
}

fn ring(mutant: &Mutant, geometry: Geometry, shape_class: ShapeClass) -> ShapeNode {
    let fill = mutant_fill(mutant);
    ShapeNode {
        id: String::new(),
        path: mutant.target.clone(),
        kind: ShapeKind::WrapAnnotation,
        geometry,
        style: ShapeStyle {
            stroke_kind: if fill == FillClass::NotKilled {
                StrokeKind::Dashed
            } else {
                StrokeKind::Solid
            },
            fill_class: fill,
            shape_class,
        },
        label: None,
        mutant_ref: Some(mutant.id.clone()),
        logic: Some(print_logic(&to_logic(&mutant.mutated))),
        tooltip: None,
    }
}

fn emit_space(
    ctx: &Ctx<'_>,
    space: &Space,
    path: &NodePath,
    shapes: &mut Vec<ShapeNode>,
    push: &mut impl FnMut(&mut Vec<ShapeNode>, ShapeNode),
) {
    for (i, item) in space.items.iter().enumerate() {
        let child = path.child(i);
        let geometry = ctx.geometry[&child];
        let item_class = match item {
            Item::Mark(_) => ctx.mark_class(&child),
            Item::Atom(_) => ShapeClass::Rectangle,
        };
        if let Some(mutant) = ctx.wraps.get(&child) {
            push(
                shapes,
                ring(mutant, geometry.inflate(ctx.config.ring_gap), item_class),
            );
        }
        let logic = Some(print_logic(&item_to_logic(item)));
        match item {
            Item::Atom(name) => push(
                shapes,
                ShapeNode {
                    id: String::new(),
                    path: child.clone(),
                    kind: ShapeKind::AtomLabel,
                    geometry,
                    style: ShapeStyle {
                        stroke_kind: StrokeKind::Solid,
                        fill_class: FillClass::None,
                        shape_class: ShapeClass::Rectangle,
                    },
                    label: Some(name.clone()),
                    mutant_ref: None,
                    logic,
                    tooltip: None,
                },
            ),
            Item::Mark(content) => {
                let deletion = ctx.deletions.get(&child);
                let fill = deletion.map_or(FillClass::None, |m| mutant_fill(m));
                push(
                    shapes,
                    ShapeNode {
                        id: String::new(),
                        path: child.clone(),
                        kind: ShapeKind::Mark,
                        geometry,
                        style: ShapeStyle {
                            stroke_kind: if fill == FillClass::NotKilled {
                                StrokeKind::Dashed
                            } else {
                                StrokeKind::Solid
                            },
                            fill_class: fill,
                            shape_class: item_class,
                        },
                        label: None,
                        mutant_ref: deletion.map(|m| m.id.clone()),
                        logic,
                        tooltip: None,
                    },
                );
                emit_space(ctx, content, &child, shapes, push);
            }
        }
    }
}

fn tooltip(shape: &ShapeNode, mutants: &[Mutant]) -> String {
    let mut text = format!("{}", shape.path);
    if let Some(logic) = &shape.logic {
        let _ = write!(text, ": {logic}");
    }
    if let Some(mutant) = shape
        .mutant_ref
        .as_ref()
        .and_then(|id| mutants.iter().find(|m| &m.id == id))
    {
        let _ = write!(text, " | {} {}", mutant.id, mutant_fill(mutant).as_str());
        if let Some(info) = &mutant.info {
            let _ = write!(
                text,
                " ({}/{} tests failing, {:.0}%)",
                info.tests_failing,
                info.tests_total,
                info.percent_failing * 100.0
            );
        }
    }
    text
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// SVG 1.1 document. Output depends only on the scene and palette.
pub fn render_svg(scene: &SceneGraph, palette: &Palette) -> String {
    let mut svg = String::new();
    let (w, h) = (scene.width, scene.height);
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}" data-grouping="{}">"#,
        scene.grouping.as_str()
    );
    let _ = writeln!(svg, "<style>");
    let _ = writeln!(
        svg,
        "  .shape {{ stroke: {}; stroke-width: 1.5; fill: none; }}",
        palette.stroke
    );
    let _ = writeln!(
        svg,
        "  .rootFrame {{ stroke-width: 1; stroke-opacity: 0.4; }}"
    );
    let _ = writeln!(svg, "  .wrapAnnotation {{ stroke-width: 1; }}");
    let _ = writeln!(
        svg,
        "  .dashed {{ stroke-dasharray: 6 4; stroke-width: 2; }}"
    );
    for (class, color) in [
        ("killed", &palette.killed),
        ("notKilled", &palette.not_killed),
        ("equivalent", &palette.equivalent),
        ("unknown", &palette.unknown),
    ] {
        let _ = writeln!(
            svg,
            "  .mark.fill-{class} {{ fill: {color}; fill-opacity: 0.25; stroke: {color}; }}"
        );
        let _ = writeln!(svg, "  .wrapAnnotation.fill-{class} {{ stroke: {color}; }}");
    }
    let _ = writeln!(svg, "  .atomLabel {{ font-family: monospace; font-size: 14px; text-anchor: middle; dominant-baseline: central; }}");
    let _ = writeln!(svg, "</style>");

    for shape in &scene.shapes {
        let g = &shape.geometry;
        let kind = match shape.kind {
            ShapeKind::Mark => "mark",
            ShapeKind::AtomLabel => "atomLabel",
            ShapeKind::RootFrame => "rootFrame",
            ShapeKind::WrapAnnotation => "wrapAnnotation",
        };
        let stroke = match shape.style.stroke_kind {
            StrokeKind::Solid => "solid",
            StrokeKind::Dashed => "dashed",
        };
        let class = format!("{kind} fill-{} {stroke}", shape.style.fill_class.as_str());
        let mut attrs = format!(r#"id="{}" data-path="{}""#, shape.id, shape.path);
        if let Some(mutant) = &shape.mutant_ref {
            let _ = write!(attrs, r#" data-mutant="{}""#, escape(mutant));
        }
        let title = shape
            .tooltip
            .as_ref()
            .map(|t| format!("<title>{}</title>", escape(t)))
            .unwrap_or_default();
        let (cx, cy) = g.center();
        match (shape.kind, shape.style.shape_class) {
            (ShapeKind::AtomLabel, _) => {
                let label = escape(shape.label.as_deref().unwrap_or(""));
                let _ = writeln!(
                    svg,
                    r#"<text {attrs} class="{class}" x="{cx:.2}" y="{cy:.2}">{label}{title}</text>"#
                );
            }
            (_, ShapeClass::Ellipse) => {
                let _ = writeln!(
                    svg,
                    r#"<ellipse {attrs} class="shape {class}" cx="{cx:.2}" cy="{cy:.2}" rx="{:.2}" ry="{:.2}">{title}</ellipse>"#,
                    g.width / 2.0,
                    g.height / 2.0
                );
            }
            (_, ShapeClass::Rectangle) => {
                let radius = (g.width.min(g.height) / 4.0).min(8.0);
                let _ = writeln!(
                    svg,
                    r#"<rect {attrs} class="shape {class}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" rx="{radius:.2}">{title}</rect>"#,
                    g.x, g.y, g.width, g.height
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Checks the geometric contract of a scene against the form it displays:
/// one shape per mark, containment with at least [`MIN_PADDING`], pairwise
/// disjoint siblings, and rings enclosing their targets.
pub fn check_scene(scene: &SceneGraph, expr: &Form) -> Result<(), String> {
    let frame = scene
        .shapes_of(ShapeKind::RootFrame)
        .next()
        .ok_or("scene has no root frame")?;
    let mut cores: HashMap<&NodePath, &ShapeNode> = HashMap::new();
    let mut rings: HashMap<&NodePath, &ShapeNode> = HashMap::new();
    for shape in &scene.shapes {
        let bucket = match shape.kind {
            ShapeKind::Mark | ShapeKind::AtomLabel => &mut cores,
            ShapeKind::WrapAnnotation => &mut rings,
            ShapeKind::RootFrame => continue,
        };
        if bucket.insert(&shape.path, shape).is_some() {
            return Err(format!("two shapes of the same kind at {}", shape.path));
        }
    }
    let nodes = expr.enumerate_nodes();
    if cores.len() != nodes.len() - 1 {
        return Err(format!(
            "{} node shapes for {} items",
            cores.len(),
            nodes.len() - 1
        ));
    }

    // Outer extent of an item: its ring when annotated, else its core shape.
    let outer = |path: &NodePath| rings.get(path).unwrap_or(&cores[path]).geometry;
    for (path, kind) in &nodes {
        if path.is_root() {
            continue;
        }
        let core = cores
            .get(path)
            .ok_or_else(|| format!("no shape for {path}"))?;
        let expected = match kind {
            crate::form::NodeKind::Mark => ShapeKind::Mark,
            _ => ShapeKind::AtomLabel,
        };
        if core.kind != expected {
            return Err(format!("shape at {path} has kind {:?}", core.kind));
        }
        let parent = path.parent().unwrap_or_default();
        let container = if parent.is_root() {
            frame
        } else {
            cores[&parent]
        };
        for (what, inner) in [("shape", core.geometry), ("extent", outer(path))] {
            let margin = container.geometry.margin_around(&inner);
            if margin < MIN_PADDING - 1e-9 {
                return Err(format!(
                    "{what} at {path} is {margin:.3} from its container"
                ));
            }
            if container.kind == ShapeKind::Mark
                && container.style.shape_class == ShapeClass::Ellipse
                && !container.geometry.ellipse_contains(&inner)
            {
                return Err(format!("{what} at {path} leaves the ellipse of {parent}"));
            }
        }
        if let Some(ring) = rings.get(path) {
            if ring.geometry.margin_around(&core.geometry) <= 0.0 {
                return Err(format!("ring at {path} does not enclose its target"));
            }
        }
    }
    for (path, kind) in &nodes {
        let count = match kind {
            crate::form::NodeKind::Atom => continue,
            _ => match expr.node_at(path) {
                Ok(NodeRef::Space(space)) => space.len(),
                Ok(NodeRef::Item(Item::Mark(content))) => content.len(),
                _ => continue,
            },
        };
        for a in 0..count {
            for b in a + 1..count {
                let (pa, pb) = (path.child(a), path.child(b));
                if outer(&pa).overlaps(&outer(&pb)) {
                    return Err(format!("siblings {pa} and {pb} overlap"));
                }
            }
        }
    }
    if let Some(ring) = rings.get(&NodePath::root()) {
        for i in 0..expr.root.len() {
            if ring.geometry.margin_around(&outer(&NodePath(vec![i]))) < 0.0 {
                return Err(format!("root ring does not enclose item {i}"));
            }
        }
        if frame.geometry.margin_around(&ring.geometry) < MIN_PADDING {
            return Err("root ring leaves the frame".into());
        }
    }
    Ok(())
}
