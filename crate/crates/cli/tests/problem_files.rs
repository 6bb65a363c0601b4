use proptest::prelude::*;
use twistalg::{Cocycle, GroupCocycle, Groupoid, Phase};
use twistalg_cli::problem::{parse_problem, LoadError};

const MINIMAL: &str = r#"
[groupoid]
kind = "transformation"

[group]
kind = "free"
generators = ["a", "b"]

[space]
points = ["pt"]

[cocycle]
kind = "trivial"

[[element.f.terms]]
word = "a"
re = 1
"#;

fn problems() -> Vec<(String, String)> {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../problems");
    let mut out: Vec<(String, String)> = [root.to_string(), format!("{root}/fixtures")]
        .iter()
        .flat_map(|dir| std::fs::read_dir(dir).unwrap())
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| (p.display().to_string(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn semantic(text: &str) -> Vec<(usize, String)> {
    match parse_problem(text) {
        Err(LoadError::Semantic(d)) => d.into_iter().map(|d| (d.line, d.message)).collect(),
        other => panic!("expected a semantic error, got {other:?}"),
    }
}

#[test]
fn minimal_free_group_file() {
    let pf = parse_problem(MINIMAL).unwrap();
    let Groupoid::Action(t) = pf.algebra.groupoid() else { panic!("transformation groupoid") };
    assert_eq!(t.group().kind_name(), "free");
    assert_eq!(t.group().num_generators(), 2);
    assert_eq!(t.points().len(), 1);
    let f = pf.element("f").unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f.i_norm(), 1.0);
}

#[test]
fn bilinear_theta_gives_rational_turns() {
    let text = r#"
[groupoid]
kind = "transformation"
[group]
kind = "free-abelian"
generators = ["u", "v"]
[space]
points = ["pt"]
[cocycle]
kind = "bilinear"
theta = [["0", "1/2"], ["0", "0"]]
[[element.f.terms]]
word = "u v"
re = 1
"#;
    let pf = parse_problem(text).unwrap();
    assert!(matches!(pf.algebra.cocycle(), Cocycle::Group(GroupCocycle::Bilinear(_))));
    let g = pf.algebra.groupoid();
    let arrows = g.arrows_within(Some(1)).unwrap();
    let u = arrows.iter().find(|a| g.format_arrow(a).contains('u') && !g.format_arrow(a).contains('-')).unwrap();
    let v = arrows.iter().find(|a| g.format_arrow(a).contains('v') && !g.format_arrow(a).contains('-')).unwrap();
    let (uv, vu) = (pf.algebra.cocycle().eval(g, u, v), pf.algebra.cocycle().eval(g, v, u));
    assert!(matches!(uv, Phase::Turn(_)) && matches!(vu, Phase::Turn(_)));
    assert_eq!([uv, vu].iter().filter(|p| **p == Phase::turn(1, 2)).count(), 1);
    assert_eq!([uv, vu].iter().filter(|p| **p == Phase::ONE).count(), 1);
}

#[test]
fn undeclared_generator_is_reported_at_its_line() {
    let text = MINIMAL.replace("word = \"a\"", "word = \"a c\"");
    let errs = semantic(&text);
    let line = text.lines().position(|l| l.starts_with("[[element.f.terms]]")).unwrap() + 1;
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].0, line);
    assert!(errs[0].1.contains('c'), "{}", errs[0].1);
}

#[test]
fn malformed_toml_is_a_positioned_parse_error() {
    let text = "[groupoid]\nkind = \"table\"\nunits = [\"p\"\n";
    match parse_problem(text) {
        Err(LoadError::Parse(d)) => assert!(d[0].line >= 3, "{d:?}"),
        other => panic!("{other:?}"),
    }
    match parse_problem("[groupoid]\nkind = \"table\"\ncolour = 1\n") {
        Err(LoadError::Parse(d)) => assert_eq!(d[0].line, 3, "{d:?}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn semantic_errors() {
    let cases: [(&str, &str, &str); 6] = [
        ("kind = \"free\"\ngenerators", "kind = \"finite\"\ngenerators", "elements"),
        ("kind = \"trivial\"", "kind = \"bilinear\"\ntheta = [[\"0\"]]", "bilinear"),
        ("kind = \"trivial\"", "kind = \"table\"\nvalues = [[\"0\"]]", "table cocycle"),
        ("re = 1", "re = inf", "finite"),
        ("points = [\"pt\"]", "points = [\"pt\", \"pt\"]", "duplicate point"),
        ("kind = \"transformation\"", "kind = \"tree\"", "groupoid kind"),
    ];
    for (from, to, needle) in cases {
        let text = MINIMAL.replacen(from, to, 1);
        let errs = semantic(&text);
        assert!(errs.iter().any(|(_, m)| m.contains(needle)), "{needle}: {errs:?}");
    }
}

#[test]
fn non_permutation_action_is_rejected() {
    let text = r#"
[groupoid]
kind = "transformation"
[group]
kind = "finite"
preset = "cyclic 2"
[space]
points = ["x", "y"]
[action]
g1 = ["x", "x"]
[cocycle]
kind = "trivial"
"#;
    let errs = semantic(text);
    assert_eq!(errs[0].0, 10, "{errs:?}");
}

#[test]
fn shipped_problems_round_trip() {
    for (path, text) in problems() {
        let pf = parse_problem(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
        let again = parse_problem(&pf.to_toml()).unwrap_or_else(|e| panic!("{path} reserialized: {e}"));
        assert_eq!(pf, again, "{path}");
        assert_eq!(pf.to_toml(), again.to_toml(), "{path}");
    }
}

fn arb_term() -> impl Strategy<Value = (String, f64, f64)> {
    let word = prop::collection::vec((prop::sample::select(vec!["a", "b"]), any::<bool>()), 0..5).prop_map(|w| {
        if w.is_empty() {
            "e".to_string()
        } else {
            w.iter().map(|(g, inv)| if *inv { format!("{g}^-1") } else { g.to_string() }).collect::<Vec<_>>().join(" ")
        }
    });
    (word, -1e3..1e3f64, -1e3..1e3f64)
}

proptest! {
    #[test]
    fn generated_files_round_trip(
        elements in prop::collection::btree_map("[a-z][a-z0-9_]{0,5}", prop::collection::vec(arb_term(), 0..6), 0..4),
        theta in (-5i64..5, 1i64..9),
    ) {
        let mut text = String::from(
            "[groupoid]\nkind = \"transformation\"\n[group]\nkind = \"free\"\ngenerators = [\"a\", \"b\"]\n\
             [space]\npoints = [\"pt\"]\n[cocycle]\nkind = \"trivial\"\n",
        );
        for (name, terms) in &elements {
            if terms.is_empty() {
                text.push_str(&format!("[element.{name}]\n"));
            }
            for (w, re, im) in terms {
                text.push_str(&format!("[[element.{name}.terms]]\nword = \"{w}\"\nre = {re:?}\nim = {im:?}\n"));
            }
        }
        text.push_str(&format!("[run]\np = \"{}/{}\"\n", theta.0.abs() + theta.1, theta.1));
        let pf = parse_problem(&text).unwrap();
        let again = parse_problem(&pf.to_toml()).unwrap();
        prop_assert_eq!(&pf, &again);
        for (name, f) in &pf.elements {
            prop_assert_eq!(f.terms(), again.elements[name].terms());
        }
    }
}
