//! Bundled example nets and the Table-1 style firing table.

use crate::jackson::ClassicalNet;
use crate::model::Net;

/// Two types l1 (variable x) and l2 (variable y); a emits x, c emits y, d collects y, b collects x.
pub fn fig5a() -> Net {
    Net::new()
        .with_var("x", "l1")
        .with_var("y", "l2")
        .with_place("p1", &["l1"])
        .with_place("p2", &["l1"])
        .with_place("p3", &["l1", "l2"])
        .with_place("p4", &["l1"])
        .with_place("p5", &["l2"])
        .with_place("p6", &["l2"])
        .with_transition("a")
        .with_transition("b")
        .with_transition("c")
        .with_transition("d")
        .with_transition("e")
        .with_arc("a", "p1", &["x"])
        .with_arc("a", "p2", &["x"])
        .with_arc("p1", "c", &["x"])
        .with_arc("p2", "b", &["x"])
        .with_arc("p4", "b", &["x"])
        .with_arc("d", "p4", &["x"])
        .with_arc("c", "p3", &["x", "y"])
        .with_arc("p3", "d", &["x", "y"])
        .with_arc("c", "p5", &["y"])
        .with_arc("p5", "e", &["y"])
        .with_arc("e", "p6", &["y"])
        .with_arc("p6", "d", &["y"])
}

/// Expected projection of `fig5a` on {l1}.
pub fn fig5b() -> Net {
    Net::new()
        .with_var("x", "l1")
        .with_place("p1", &["l1"])
        .with_place("p2", &["l1"])
        .with_place("p_x", &["l1"])
        .with_place("p4", &["l1"])
        .with_transition("a")
        .with_transition("b")
        .with_transition("c")
        .with_transition("d")
        .with_arc("a", "p1", &["x"])
        .with_arc("a", "p2", &["x"])
        .with_arc("p1", "c", &["x"])
        .with_arc("p2", "b", &["x"])
        .with_arc("p4", "b", &["x"])
        .with_arc("d", "p4", &["x"])
        .with_arc("c", "p_x", &["x"])
        .with_arc("p_x", "d", &["x"])
}

/// Expected projection of `fig5a` on {l2}.
pub fn fig5c() -> Net {
    Net::new()
        .with_var("y", "l2")
        .with_place("p_y", &["l2"])
        .with_place("p5", &["l2"])
        .with_place("p6", &["l2"])
        .with_transition("c")
        .with_transition("d")
        .with_transition("e")
        .with_arc("c", "p_y", &["y"])
        .with_arc("p_y", "d", &["y"])
        .with_arc("c", "p5", &["y"])
        .with_arc("p5", "e", &["y"])
        .with_arc("e", "p6", &["y"])
        .with_arc("p6", "d", &["y"])
}

/// Expected projection of `fig5a` on {l1, l2}.
pub fn fig6a() -> Net {
    Net::new()
        .with_var("x", "l1")
        .with_var("y", "l2")
        .with_place("p_xy", &["l1", "l2"])
        .with_transition("c")
        .with_transition("d")
        .with_arc("c", "p_xy", &["x", "y"])
        .with_arc("p_xy", "d", &["x", "y"])
}

/// Expected union of the two singleton projections of `fig5a`.
pub fn fig5d() -> Net {
    let mut n = fig5b();
    let c = fig5c();
    n.types.extend(c.types);
    n.variables.extend(c.variables);
    n.places.extend(c.places);
    n.transitions.extend(c.transitions);
    n.arcs.extend(c.arcs);
    n
}

/// Expected union of all three projections of `fig5a`.
pub fn fig6b() -> Net {
    let mut n = fig5d();
    let i = fig6a();
    n.places.extend(i.places);
    n.arcs.extend(i.arcs);
    n
}

fn chain(places: &[&str], transitions: &[&str], arcs: &[(&str, &str)]) -> Net {
    let mut n = Net::new().with_var("x", "l1");
    for p in places {
        n = n.with_place(p, &["l1"]);
    }
    for t in transitions {
        n = n.with_transition(t);
    }
    for (f, t) in arcs {
        n = n.with_arc(f, t, &["x"]);
    }
    n
}

/// Sequence a;p;c;q;b;r;d over one type.
pub fn fig3a() -> Net {
    chain(&["p", "q", "r"], &["a", "b", "c", "d"], &[("a", "p"), ("p", "c"), ("c", "q"), ("q", "b"), ("b", "r"), ("r", "d")])
}

/// Sequence a;p;b;s;c;r;d over one type.
pub fn fig3b() -> Net {
    chain(&["p", "s", "r"], &["a", "b", "c", "d"], &[("a", "p"), ("p", "b"), ("b", "s"), ("s", "c"), ("c", "r"), ("r", "d")])
}

/// a emits ⟨x,y⟩ into p; b and c both move it to q; d collects it.
pub fn fig4() -> Net {
    Net::new()
        .with_var("x", "l1")
        .with_var("y", "l2")
        .with_place("p", &["l1", "l2"])
        .with_place("q", &["l1", "l2"])
        .with_transition("a")
        .with_transition("b")
        .with_transition("c")
        .with_transition("d")
        .with_tarc("a", "p")
        .with_tarc("p", "b")
        .with_tarc("p", "c")
        .with_tarc("b", "q")
        .with_tarc("c", "q")
        .with_tarc("q", "d")
}

/// Product (x), order (y) and customer (z) processes of the running example.
pub fn running_example() -> Net {
    let mut n = Net::new().with_var("x", "x").with_var("y", "y").with_var("z", "z");
    n = n
        .with_place("product", &["x"])
        .with_place("inspection", &["x"])
        .with_place("customer", &["z"])
        .with_place("assignment", &["y", "z"]);
    for q in ["o1", "o2", "o3", "o4", "o5", "o6"] {
        n = n.with_place(q, &["y"]);
    }
    for t in ["A", "B", "C", "D", "E", "G", "H", "J", "K", "L", "N", "O", "T", "V", "Z"] {
        n = n.with_transition(t);
    }
    let arcs = [
        ("A", "product"),
        ("product", "B"),
        ("product", "C"),
        ("C", "inspection"),
        ("inspection", "D"),
        ("D", "product"),
        ("product", "E"),
        ("E", "product"),
        ("T", "customer"),
        ("customer", "V"),
        ("customer", "G"),
        ("Z", "customer"),
        ("G", "assignment"),
        ("assignment", "Z"),
        ("G", "o1"),
        ("o1", "E"),
        ("E", "o1"),
        ("o1", "H"),
        ("H", "o2"),
        ("o2", "L"),
        ("L", "o3"),
        ("o3", "J"),
        ("J", "o4"),
        ("o4", "N"),
        ("N", "o2"),
        ("o4", "O"),
        ("O", "o5"),
        ("o5", "K"),
        ("K", "o6"),
        ("o6", "Z"),
    ];
    for (f, t) in arcs {
        n = n.with_tarc(f, t);
    }
    n
}

/// The 18-row firing table of the running example.
pub const TABLE1_CSV: &str = "transition,x,y,z
A,p1,,
A,p2,,
T,,,c1
G,,o1,c1
C,p1,,
E,p2,o1,
T,,,c2
H,,o1,
L,,o1,
J,,o1,
B,p2,,
O,,o1,
D,p1,,
V,,,c2
K,,o1,
Z,,o1,c1
V,,,c1
B,p1,,
";

/// The block-structured workflow net with a choice inside a loop.
pub fn fig2() -> ClassicalNet {
    ClassicalNet::from_arcs(
        &["p1", "p2", "p3", "p4"],
        &["t1", "t2", "t3", "t4", "t5"],
        &[
            ("p1", "t1"),
            ("t1", "p2"),
            ("p2", "t2"),
            ("t2", "p3"),
            ("p2", "t3"),
            ("t3", "p3"),
            ("p3", "t4"),
            ("t4", "p2"),
            ("p3", "t5"),
            ("t5", "p4"),
        ],
    )
    .with_border("p1", "p4")
}

/// Looped expression as written with a prefix loop marker.
pub const FIG2_EXPR_A: &str = "p1;(t1;(((#((p2;((t2+t3);p3)));t4));(t5;p4)))";
/// The same net with the first brackets shifted left.
pub const FIG2_EXPR_B: &str = "((p1;t1);(((p2;((t2+t3);p3))#t4);(t5;p4)))";

/// All bundled nets by file stem.
pub fn all_nets() -> Vec<(&'static str, Net)> {
    vec![("fig3a", fig3a()), ("fig3b", fig3b()), ("fig4", fig4()), ("fig5a", fig5a()), ("running_example", running_example())]
}
