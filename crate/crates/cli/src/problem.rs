//! Semantic checks turning a parsed [`Document`] into an algebra and its
//! named elements.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use toml::Spanned;
use twistalg::cocycle::{coboundary, extend_group_cocycle};
use twistalg::group::FiniteGroup;
use twistalg::groupoid::{TableGroupoid, TransformationGroupoid};
use twistalg::{Algebra, AlgebraElement, Arrow, Cocycle, GroupCocycle, GroupSpec, Groupoid, Phase};

use crate::format::{parse_document, to_toml, Diagnostic, Document, Positions, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum LoadError {
    /// The text is not a well-formed problem file.
    Parse(Vec<Diagnostic>),
    /// The file is well formed but describes an inconsistent problem.
    Semantic(Vec<Diagnostic>),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, diags) = match self {
            LoadError::Parse(d) => ("parse error", d),
            LoadError::Semantic(d) => ("semantic error", d),
        };
        for (i, d) in diags.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{kind} at {d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for LoadError {}

/// A validated problem: the document it came from, the algebra it
/// describes and its named elements.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub document: Document,
    pub algebra: Arc<Algebra>,
    pub elements: BTreeMap<String, AlgebraElement>,
}

impl PartialEq for ProblemFile {
    fn eq(&self, other: &Self) -> bool {
        self.document == other.document
            && self.elements.len() == other.elements.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|((n, a), (m, b))| n == m && a.terms() == b.terms())
    }
}

impl ProblemFile {
    pub fn to_toml(&self) -> String {
        to_toml(&self.document)
    }

    pub fn element(&self, name: &str) -> Option<&AlgebraElement> {
        self.elements.get(name)
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, LoadError> {
    let document = parse_document(text).map_err(LoadError::Parse)?;
    let mut b = Builder { pos: Positions::new(text), errors: Vec::new() };
    let built = b.build(&document);
    match built {
        Some((algebra, elements)) if b.errors.is_empty() => Ok(ProblemFile { document, algebra, elements }),
        _ => Err(LoadError::Semantic(b.errors)),
    }
}

/// Parses `q/n`, an integer, a decimal, or `inf`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if let Some((q, n)) = t.split_once('/') {
        let q: f64 = q.trim().parse().map_err(|_| format!("bad numerator in `{t}`"))?;
        let n: f64 = n.trim().parse().map_err(|_| format!("bad denominator in `{t}`"))?;
        if n == 0.0 {
            return Err(format!("zero denominator in `{t}`"));
        }
        return Ok(q / n);
    }
    match t {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        _ => t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")),
    }
}

pub fn scalar_real(s: &Scalar) -> Result<f64, String> {
    match s {
        Scalar::Int(i) => Ok(*i as f64),
        Scalar::Float(x) => Ok(*x),
        Scalar::Text(t) => parse_real(t),
    }
}

fn scalar_phase(s: &Scalar) -> Result<Phase, String> {
    match s {
        Scalar::Int(i) => Ok(Phase::turn(*i, 1)),
        Scalar::Float(x) => Ok(Phase::from_turns_f64(*x)),
        Scalar::Text(t) => Phase::parse(t),
    }
}

fn scalar_ratio(s: &Scalar) -> Result<Ratio<i64>, String> {
    let exact = |t: &str| -> Result<Ratio<i64>, String> {
        let t = t.trim();
        let body = t.strip_prefix("turn").map(str::trim).unwrap_or(t);
        let (q, n) = body.split_once('/').unwrap_or((body, "1"));
        let q: i64 = q.trim().parse().map_err(|_| format!("`{t}` is not an exact fraction"))?;
        let n: i64 = n.trim().parse().map_err(|_| format!("`{t}` is not an exact fraction"))?;
        if n == 0 {
            return Err(format!("zero denominator in `{t}`"));
        }
        Ok(Ratio::new(q, n))
    };
    match s {
        Scalar::Int(i) => Ok(Ratio::from_integer(*i)),
        Scalar::Float(x) => Err(format!("{x} is not an exact fraction; write it as \"q/n\"")),
        Scalar::Text(t) => exact(t),
    }
}

fn names_index(names: &[Spanned<String>]) -> BTreeMap<&str, usize> {
    names.iter().enumerate().map(|(i, n)| (n.get_ref().as_str(), i)).collect()
}

struct Builder<'a> {
    pos: Positions<'a>,
    errors: Vec<Diagnostic>,
}

type Built = (Arc<Algebra>, BTreeMap<String, AlgebraElement>);

impl Builder<'_> {
    fn err<T>(&mut self, span: std::ops::Range<usize>, msg: impl Into<String>) -> Option<T> {
        self.errors.push(self.pos.at(span, msg));
        None
    }

    fn check_distinct(&mut self, what: &str, names: &[Spanned<String>], section: std::ops::Range<usize>) -> Option<()> {
        if names.is_empty() {
            return self.err(section, format!("no {what}s declared"));
        }
        let mut seen = BTreeMap::new();
        for n in names {
            if seen.insert(n.get_ref().as_str(), ()).is_some() {
                return self.err(n.span(), format!("duplicate {what} `{}`", n.get_ref()));
            }
        }
        Some(())
    }

    fn build(&mut self, doc: &Document) -> Option<Built> {
        let groupoid = self.groupoid(doc)?;
        let cocycle = self.cocycle(doc, &groupoid)?;
        let algebra = Algebra::new(groupoid, cocycle);
        let elements = self.elements(doc, &algebra)?;
        if let Some(run) = &doc.run {
            if let Some(e) = &run.get_ref().element {
                if !elements.contains_key(e) {
                    return self.err(run.span(), format!("[run] names unknown element `{e}`"));
                }
            }
            if let Some(p) = &run.get_ref().p {
                if let Err(m) = scalar_real(p) {
                    return self.err(run.span(), m);
                }
            }
        }
        Some((algebra, elements))
    }

    fn groupoid(&mut self, doc: &Document) -> Option<Groupoid> {
        let sec = doc.groupoid.get_ref();
        match sec.kind.get_ref().as_str() {
            "transformation" => {
                for (present, key) in [
                    (sec.units.is_some(), "units"),
                    (sec.arrows.is_some(), "arrows"),
                    (sec.products.is_some(), "products"),
                ] {
                    if present {
                        return self.err(doc.groupoid.span(), format!("`{key}` belongs to table groupoids"));
                    }
                }
                self.transformation(doc).map(Groupoid::Action)
            }
            "table" => {
                for (present, what) in [
                    (doc.group.is_some(), "[group]"),
                    (doc.space.is_some(), "[space]"),
                    (doc.action.is_some(), "[action]"),
                ] {
                    if present {
                        return self.err(doc.groupoid.span(), format!("{what} belongs to transformation groupoids"));
                    }
                }
                self.table(doc).map(Groupoid::Table)
            }
            other => self.err(
                sec.kind.span(),
                format!("unknown groupoid kind `{other}`; expected `transformation` or `table`"),
            ),
        }
    }

    fn table(&mut self, doc: &Document) -> Option<TableGroupoid> {
        let sec = doc.groupoid.get_ref();
        let Some(units) = &sec.units else {
            return self.err(doc.groupoid.span(), "table groupoids need `units`");
        };
        self.check_distinct("unit", units, doc.groupoid.span())?;
        let unit_index = names_index(units);
        let mut arrows = Vec::new();
        for a in sec.arrows.iter().flatten() {
            let d = a.get_ref();
            let (Some(&s), Some(&t)) = (unit_index.get(d.src.as_str()), unit_index.get(d.tgt.as_str())) else {
                return self.err(a.span(), format!("arrow `{}` refers to an undeclared unit", d.name));
            };
            arrows.push((d.name.clone(), s, t));
        }
        let mut products = Vec::new();
        for p in sec.products.iter().flatten() {
            let [a, b, c] = p.get_ref().as_slice() else {
                return self.err(p.span(), "a product is a triple [a, b, ab]");
            };
            products.push((a.clone(), b.clone(), c.clone()));
        }
        match TableGroupoid::new(units.iter().map(|u| u.get_ref().clone()).collect(), arrows, &products) {
            Ok(t) => Some(t),
            Err(e) => self.err(doc.groupoid.span(), e.to_string()),
        }
    }

    fn group(&mut self, doc: &Document) -> Option<GroupSpec> {
        let Some(gs) = &doc.group else {
            return self.err(doc.groupoid.span(), "transformation groupoids need a [group] section");
        };
        let sec = gs.get_ref();
        let kind = sec.kind.get_ref().as_str();
        match kind {
            "free" | "free-abelian" => {
                if sec.preset.is_some() || sec.elements.is_some() || sec.table.is_some() {
                    return self.err(gs.span(), format!("a {kind} group takes only `generators`"));
                }
                let Some(gens) = &sec.generators else {
                    return self.err(gs.span(), format!("a {kind} group needs `generators`"));
                };
                self.check_distinct("generator", gens, gs.span())?;
                for g in gens {
                    let n = g.get_ref();
                    let ok = !n.is_empty()
                        && n != "e"
                        && n.chars().all(|c| c.is_alphanumeric() || c == '_')
                        && !n.chars().all(|c| c.is_ascii_digit());
                    if !ok {
                        return self.err(g.span(), format!("`{n}` is not a valid generator name"));
                    }
                }
                let names: Vec<&str> = gens.iter().map(|g| g.get_ref().as_str()).collect();
                Some(if kind == "free" { GroupSpec::free(&names) } else { GroupSpec::free_abelian(&names) })
            }
            "finite" => {
                if sec.generators.is_some() {
                    return self.err(gs.span(), "finite groups list `elements`, not `generators`");
                }
                match (&sec.preset, &sec.elements, &sec.table) {
                    (Some(p), None, None) => {
                        let text = p.get_ref().trim();
                        let group = match text.split_whitespace().collect::<Vec<_>>().as_slice() {
                            ["klein"] => FiniteGroup::klein_four(),
                            ["s3"] => FiniteGroup::symmetric3(),
                            ["cyclic", n] => match n.parse::<usize>() {
                                Ok(n) if (1..=u16::MAX as usize).contains(&n) => FiniteGroup::cyclic(n),
                                _ => return self.err(p.span(), format!("bad cyclic order `{n}`")),
                            },
                            _ => {
                                return self.err(
                                    p.span(),
                                    format!("unknown preset `{text}`; expected `cyclic N`, `klein` or `s3`"),
                                )
                            }
                        };
                        Some(GroupSpec::finite(group))
                    }
                    (None, Some(elements), Some(table)) => {
                        self.check_distinct("element", elements, gs.span())?;
                        let index = names_index(elements);
                        let mut rows = Vec::new();
                        for row in table {
                            let mut r = Vec::new();
                            for cell in row {
                                let Some(&i) = index.get(cell.get_ref().as_str()) else {
                                    return self.err(cell.span(), format!("undeclared element `{}`", cell.get_ref()));
                                };
                                r.push(i);
                            }
                            rows.push(r);
                        }
                        let names = elements.iter().map(|e| e.get_ref().clone()).collect();
                        match FiniteGroup::from_table(names, rows) {
                            Ok(g) => Some(GroupSpec::finite(g)),
                            Err(e) => self.err(gs.span(), e.to_string()),
                        }
                    }
                    _ => self.err(gs.span(), "a finite group needs either `preset` or both `elements` and `table`"),
                }
            }
            other => self.err(
                sec.kind.span(),
                format!("unknown group kind `{other}`; expected `free`, `free-abelian` or `finite`"),
            ),
        }
    }

    fn transformation(&mut self, doc: &Document) -> Option<TransformationGroupoid> {
        let group = self.group(doc)?;
        let Some(space) = &doc.space else {
            return self.err(doc.groupoid.span(), "transformation groupoids need a [space] section");
        };
        let points = &space.get_ref().points;
        self.check_distinct("point", points, space.span())?;
        let point_index = names_index(points);
        let n = points.len();
        let identity: Vec<usize> = (0..n).collect();
        let labels: Vec<String> = match &group {
            GroupSpec::Finite(g) => g.names().to_vec(),
            _ => group.generator_names().to_vec(),
        };
        let mut perms = vec![None; labels.len()];
        if let Some(action) = &doc.action {
            for (key, images) in action.get_ref() {
                let Some(i) = labels.iter().position(|l| l == key) else {
                    return self.err(action.span(), format!("[action] names undeclared group element `{key}`"));
                };
                if images.len() != n {
                    return self.err(action.span(), format!("`{key}` must list {n} image points"));
                }
                let mut perm = Vec::with_capacity(n);
                for img in images {
                    let Some(&j) = point_index.get(img.get_ref().as_str()) else {
                        return self.err(img.span(), format!("undeclared point `{}`", img.get_ref()));
                    };
                    perm.push(j);
                }
                let mut seen = vec![false; n];
                if let Some(k) = perm.iter().position(|&j| std::mem::replace(&mut seen[j], true)) {
                    let img = &images[k];
                    return self.err(img.span(), format!("`{key}` is not a permutation: `{}` is hit twice", img.get_ref()));
                }
                perms[i] = Some(perm);
            }
        }
        let explicit = doc.action.is_some();
        let mut resolved = Vec::with_capacity(labels.len());
        for (i, p) in perms.into_iter().enumerate() {
            match p {
                Some(p) => resolved.push(p),
                None => {
                    let is_identity = matches!(&group, GroupSpec::Finite(g) if g.identity() as usize == i);
                    if explicit && matches!(group, GroupSpec::Finite(_)) && !is_identity {
                        let span = doc.action.as_ref().map(|a| a.span()).unwrap_or(0..0);
                        return self.err(span, format!("the action of `{}` is not given", labels[i]));
                    }
                    resolved.push(identity.clone());
                }
            }
        }
        let names = points.iter().map(|p| p.get_ref().clone()).collect();
        match TransformationGroupoid::new(names, group, resolved) {
            Ok(t) => Some(t),
            Err(e) => {
                let span = doc.action.as_ref().map(|a| a.span()).unwrap_or(space.span());
                self.err(span, e.to_string())
            }
        }
    }

    fn phase(&mut self, s: &Spanned<Scalar>) -> Option<Phase> {
        match scalar_phase(s.get_ref()) {
            Ok(p) => Some(p),
            Err(m) => self.err(s.span(), m),
        }
    }

    fn cocycle(&mut self, doc: &Document, g: &Groupoid) -> Option<Cocycle> {
        let Some(cs) = &doc.cocycle else { return Some(Cocycle::Trivial) };
        let sec = cs.get_ref();
        let kind = sec.kind.get_ref().as_str();
        let keys = [
            ("values", sec.values.is_some()),
            ("entries", sec.entries.is_some()),
            ("theta", sec.theta.is_some()),
            ("b", sec.b.is_some()),
        ];
        let wanted: &[&str] = match kind {
            "trivial" => &[],
            "table" => &["values", "entries"],
            "bilinear" => &["theta"],
            "coboundary" => &["b"],
            other => {
                return self.err(
                    sec.kind.span(),
                    format!("unknown cocycle kind `{other}`; expected `trivial`, `table`, `bilinear` or `coboundary`"),
                )
            }
        };
        for (k, present) in keys {
            if present && !wanted.contains(&k) {
                return self.err(cs.span(), format!("`{k}` does not belong to a {kind} cocycle"));
            }
        }
        let finite_group = match g {
            Groupoid::Action(t) => match t.group() {
                GroupSpec::Finite(fg) => Some(fg.clone()),
                _ => None,
            },
            _ => None,
        };
        let mismatch = |b: &mut Self, what: &str| b.err(sec.kind.span(), format!("{what} does not fit a {} groupoid", g.kind_name()));
        let group_cocycle: GroupCocycle = match kind {
            "trivial" => return Some(Cocycle::Trivial),
            "table" => match (g, &sec.values, &sec.entries) {
                (Groupoid::Table(t), None, Some(entries)) => {
                    let mut map = BTreeMap::new();
                    for e in entries {
                        let d = e.get_ref();
                        let (Some(a), Some(b)) = (t.arrow_index(&d.a), t.arrow_index(&d.b)) else {
                            return self.err(e.span(), format!("entry names an undeclared arrow in ({}, {})", d.a, d.b));
                        };
                        let (a, b) = (Arrow::Table(a), Arrow::Table(b));
                        if g.try_compose(&a, &b).is_none() {
                            return self.err(e.span(), format!("({}, {}) is not a composable pair", d.a, d.b));
                        }
                        let p = match scalar_phase(&d.phase) {
                            Ok(p) => p,
                            Err(m) => return self.err(e.span(), m),
                        };
                        map.insert((a, b), p);
                    }
                    return Some(Cocycle::Table(map));
                }
                (Groupoid::Action(_), Some(values), None) => {
                    let Some(fg) = &finite_group else { return mismatch(self, "a table cocycle") };
                    let mut rows = Vec::new();
                    for row in values {
                        let mut r = Vec::new();
                        for v in row {
                            r.push(self.phase(v)?);
                        }
                        rows.push(r);
                    }
                    match GroupCocycle::table(fg, rows) {
                        Ok(c) => c,
                        Err(e) => return self.err(cs.span(), e.to_string()),
                    }
                }
                (Groupoid::Table(_), _, _) => return self.err(cs.span(), "table groupoid cocycles list `entries`"),
                _ => return self.err(cs.span(), "group cocycle tables list `values`"),
            },
            "bilinear" => {
                let Some(theta) = &sec.theta else { return self.err(cs.span(), "bilinear cocycles need `theta`") };
                let mut rows = Vec::new();
                for row in theta {
                    let mut r = Vec::new();
                    for v in row {
                        match scalar_ratio(v.get_ref()) {
                            Ok(x) => r.push(x),
                            Err(m) => return self.err(v.span(), m),
                        }
                    }
                    rows.push(r);
                }
                match GroupCocycle::bilinear(rows) {
                    Ok(c) => c,
                    Err(e) => return self.err(cs.span(), e.to_string()),
                }
            }
            _ => {
                let Some(b) = &sec.b else { return self.err(cs.span(), "coboundary cocycles need `b`") };
                match g {
                    Groupoid::Table(t) => {
                        let mut map = BTreeMap::new();
                        for (name, v) in b {
                            let Some(a) = t.arrow_index(name) else {
                                return self.err(v.span(), format!("undeclared arrow `{name}`"));
                            };
                            map.insert(Arrow::Table(a), self.phase(v)?);
                        }
                        return match coboundary(map, g) {
                            Ok(c) => Some(c),
                            Err(e) => self.err(cs.span(), e.to_string()),
                        };
                    }
                    _ => {
                        let Some(fg) = &finite_group else { return mismatch(self, "a coboundary cocycle") };
                        let mut vals = vec![Phase::ONE; fg.order()];
                        for (name, v) in b {
                            let Some(i) = fg.index_of(name) else {
                                return self.err(v.span(), format!("undeclared group element `{name}`"));
                            };
                            vals[i as usize] = self.phase(v)?;
                        }
                        match GroupCocycle::table_coboundary(fg, &vals) {
                            Ok(c) => c,
                            Err(e) => return self.err(cs.span(), e.to_string()),
                        }
                    }
                }
            }
        };
        match extend_group_cocycle(&group_cocycle, g) {
            Ok(c) => Some(c),
            Err(e) => self.err(sec.kind.span(), e.to_string()),
        }
    }

    fn elements(&mut self, doc: &Document, alg: &Arc<Algebra>) -> Option<BTreeMap<String, AlgebraElement>> {
        let g = alg.groupoid();
        let mut out = BTreeMap::new();
        for (name, sec) in &doc.element {
            let mut terms = Vec::new();
            for t in &sec.get_ref().terms {
                let d = t.get_ref();
                if !(d.re.is_finite() && d.im.is_finite()) {
                    self.err::<()>(t.span(), "coefficients must be finite");
                    continue;
                }
                let arrow = match g {
                    Groupoid::Table(tab) => {
                        if d.word.is_some() || d.point.is_some() {
                            self.err::<()>(t.span(), "table groupoid terms name an `arrow`");
                            continue;
                        }
                        let Some(a) = d.arrow.as_deref() else {
                            self.err::<()>(t.span(), "term needs an `arrow`");
                            continue;
                        };
                        match tab.arrow_index(a) {
                            Some(i) => Arrow::Table(i),
                            None => {
                                self.err::<()>(t.span(), format!("undeclared arrow `{a}`"));
                                continue;
                            }
                        }
                    }
                    Groupoid::Action(tr) => {
                        if d.arrow.is_some() {
                            self.err::<()>(t.span(), "transformation groupoid terms give a `word` and a `point`");
                            continue;
                        }
                        let elem = match tr.group().parse(d.word.as_deref().unwrap_or("e")) {
                            Ok(e) => e,
                            Err(m) => {
                                self.err::<()>(t.span(), m);
                                continue;
                            }
                        };
                        let point = match (&d.point, tr.points().len()) {
                            (None, 1) => 0,
                            (None, _) => {
                                self.err::<()>(t.span(), "term needs a `point` when the space has several");
                                continue;
                            }
                            (Some(p), _) => match g.unit_index(p) {
                                Some(x) => x,
                                None => {
                                    self.err::<()>(t.span(), format!("undeclared point `{p}`"));
                                    continue;
                                }
                            },
                        };
                        Arrow::action(point, elem)
                    }
                    Groupoid::Twist(_) => unreachable!("files never describe twisted groupoids"),
                };
                terms.push((arrow, Complex64::new(d.re, d.im)));
            }
            match AlgebraElement::new(alg, terms) {
                Ok(e) => {
                    out.insert(name.clone(), e);
                }
                Err(e) => {
                    self.err::<()>(sec.span(), e.to_string());
                }
            }
        }
        Some(out)
    }
}
