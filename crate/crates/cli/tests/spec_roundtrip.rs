use flatkahler_cli::spec_file::{load_manifold_spec, parse_manifold_spec, to_toml};
use proptest::prelude::*;

fn unit_entry() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u64..6).prop_map(|e| e.to_string()),
        prop::collection::vec(0u64..4, 0..3).prop_map(|v| format!("{v:?}")),
        prop::sample::select(vec!["1", "-1", "i", "xi", "-xi^2"]).prop_map(|s| format!("{s:?}")),
    ]
}

/// Spec texts that parse, whether or not they describe a valid action.
fn spec_text() -> impl Strategy<Value = String> {
    let factor = prop_oneof![
        (prop::sample::select(vec!["generic", "gauss", "eisenstein"]), prop::option::of("[a-z]{1,4}")).prop_map(
            |(p, tag)| match tag {
                Some(t) => format!("[[torus.factor]]\npreset = \"{p}\"\niso_tag = \"{t}\"\n"),
                None => format!("[[torus.factor]]\npreset = \"{p}\"\n"),
            }
        ),
        any::<bool>().prop_map(|inf| format!(
            "[[torus.factor]]\nrank = 2\nunits = [[[-1, 0], [0, -1]]]\naut0_infinite = {inf}\n"
        )),
    ];
    (
        prop::collection::vec(factor, 1..4),
        any::<bool>(),
        prop::collection::vec(1u64..5, 1..3),
        prop::collection::vec(prop::collection::vec(unit_entry(), 1..4), 1..3),
        prop::option::of((1u64..5, prop::collection::vec(prop::collection::vec(-3i64..3, 2), 1..3))),
        prop::option::of((0u64..30, prop::option::of(0u64..5000))),
    )
        .prop_map(|(factors, non_iso, orders, gens, cocycle, expected)| {
            let mut s = format!("[torus]\nnon_isogenous = {non_iso}\n\n");
            for f in factors {
                s.push_str(&f);
                s.push('\n');
            }
            let rows: Vec<String> = gens.iter().map(|r| format!("[{}]", r.join(", "))).collect();
            s.push_str(&format!("[group]\norders = {orders:?}\ngenerators = [{}]\n", rows.join(", ")));
            if let Some((m, values)) = cocycle {
                s.push_str(&format!("\n[cocycle]\nmodulus = {m}\nvalues = {values:?}\n"));
            }
            if let Some((m, aut)) = expected {
                s.push_str(&format!("\n[expected]\nm = {m}\n"));
                if let Some(a) = aut {
                    s.push_str(&format!("aut_order = {a}\n"));
                } else {
                    s.push_str("aut_order = \"infinite\"\n");
                }
            }
            s
        })
}

proptest! {
    #[test]
    fn parse_serialize_parse_is_identity(text in spec_text()) {
        let file = parse_manifold_spec(&text).unwrap();
        let again = parse_manifold_spec(&to_toml(&file)).unwrap();
        prop_assert_eq!(&again, &file);
        // Validation sees the same data either way.
        let a = load_manifold_spec(&text).map(|s| s.action.matrices().to_vec()).map_err(|e| e.to_string());
        let b = load_manifold_spec(&to_toml(&file)).map(|s| s.action.matrices().to_vec()).map_err(|_| ());
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(x), Ok(y)) = (a, b) {
            prop_assert_eq!(x, y);
        }
    }
}
