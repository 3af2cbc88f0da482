//! The JSON and CSV files under `fixtures/` are the bundled nets serialized.
//! Run with `UPDATE_FIXTURES=1` to rewrite them.

use std::path::PathBuf;

use tjn::fixtures;
use tjn::projection::{compose, parse_type_set, project};

fn files() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fixtures::all_nets().into_iter().map(|(name, n)| (format!("{name}.json"), n.to_json())).collect();
    let union = compose(&fixtures::fig3a(), &fixtures::fig3b()).unwrap();
    out.push(("fig3_union.json".into(), union.to_json()));
    let f4 = fixtures::fig4();
    let singles = compose(&project(&f4, &parse_type_set("l1")).unwrap(), &project(&f4, &parse_type_set("l2")).unwrap()).unwrap();
    out.push(("fig4_singletons.json".into(), singles.to_json()));
    out.push(("table1.csv".into(), fixtures::TABLE1_CSV.to_string()));
    out
}

#[test]
fn fixture_files_match_the_bundled_nets() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let update = std::env::var_os("UPDATE_FIXTURES").is_some();
    for (name, text) in files() {
        let path = dir.join(&name);
        if update {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &text).unwrap();
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(on_disk, text, "{name} is stale; rerun with UPDATE_FIXTURES=1");
    }
}

#[test]
fn fixture_files_parse_back() {
    for (name, n) in fixtures::all_nets() {
        assert_eq!(tjn::Net::from_json(&n.to_json()).unwrap(), n, "{name}");
    }
}
