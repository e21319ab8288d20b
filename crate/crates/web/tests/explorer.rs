use bicolor_web::{count_curve_rows, LoopExplorer};
use serde_json::Value;

#[test]
fn face_moves_keep_loops_closed() {
    let mut ex = LoopExplorer::try_new("square", 3, 3).unwrap();
    assert!(ex.try_face_move(4, 1).unwrap());
    // face 5 shares a red edge with face 4, which X^(2) annihilates
    assert!(!ex.try_face_move(5, 2).unwrap());
    assert!(ex.try_face_move(0, 2).unwrap());
    assert!(ex.status_text().contains("closed: true"));
    assert!(ex.status_text().contains("moves applied: 2"));
    let svg = ex.render_svg().unwrap();
    assert_eq!(svg.matches("data-face=").count(), 9);
    assert!(svg.contains("edge red") && svg.contains("edge blue"));
}

#[test]
fn sectors_and_component_loading() {
    let mut ex = LoopExplorer::try_new("square", 2, 2).unwrap();
    let v: Value = serde_json::from_str(&ex.try_sectors("B,C").unwrap()).unwrap();
    assert_eq!(v["num_components"], 16);
    assert_eq!(v["total_configs"], 129);
    let idx = v["current"].as_u64().unwrap() as usize;
    let other = (idx + 1) % 16;
    ex.try_load_component("B,C", other).unwrap();
    let w: Value = serde_json::from_str(&ex.try_sectors("B,C").unwrap()).unwrap();
    assert_eq!(w["current"].as_u64().unwrap() as usize, other);
    assert!(ex.try_load_component("B,C", 99).is_err());
}

#[test]
fn hex_and_pair_moves() {
    let mut ex = LoopExplorer::try_new("hex", 2, 2).unwrap();
    assert!(ex.try_face_move(0, 2).unwrap());
    assert!(ex.try_face_move(0, 3).is_err());
    assert!(ex.try_pair_move(0, 1, 1).is_err());
    let mut sq = LoopExplorer::try_new("square", 3, 3).unwrap();
    assert!(sq.try_pair_move(0, 1, 1).unwrap());
    assert!(LoopExplorer::try_new("square", 2, 3).is_err());
}

#[test]
fn count_curves() {
    let rows: Value = serde_json::from_str(&count_curve_rows("Ni", 6, "1").unwrap()).unwrap();
    assert_eq!(rows[1]["exact"], "21");
    let fpl: Value = serde_json::from_str(&count_curve_rows("FPL", 4, "1").unwrap()).unwrap();
    assert_eq!(fpl.as_array().unwrap().len(), 4);
    assert!(count_curve_rows("BLC", 3, "0").is_err());
    assert!(count_curve_rows("XX", 3, "1").is_err());
}
