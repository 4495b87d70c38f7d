use super::*;

fn pt(s: &str) -> PlaneTree {
    parse_plane_tree(s).unwrap()
}

fn st(s: &str) -> RootedSubtree {
    parse_subtree(s).unwrap()
}

#[test]
fn children_counts() {
    assert_eq!(pt("e").children_count(&Word::root()).unwrap(), 0);
    assert_eq!(pt("e,1,2,1.1").children_count(&Word::root()).unwrap(), 2);
    assert_eq!(st("e,2,5,2.3").children_count(&Word::root()).unwrap(), 2);
    assert!(pt("e,1").children_count(&Word::of(&[3])).is_err());
    assert_eq!(st("e,2,5,2.3").children_positions(&Word::root()), vec![2, 5]);
}

#[test]
fn leaf_additions() {
    assert!(is_right_leaning_leaf_addition(&pt("e"), &pt("e,1")));
    assert!(is_right_leaning_leaf_addition(&pt("e,1"), &pt("e,1,2")));
    assert!(!is_right_leaning_leaf_addition(&pt("e,1,2"), &pt("e,1,2,3,1.1")));
    assert!(!is_right_leaning_leaf_addition(&pt("e,1"), &pt("e,1")));
    assert!(!is_right_leaning_leaf_addition(&pt("e,1,2"), &pt("e,1")));
}

#[test]
fn bouquets() {
    assert!(is_bouquet_addition(&pt("e"), &pt("e,1,2"), 2));
    assert!(is_bouquet_addition(&pt("e,1,2"), &pt("e,1,2,1.1,1.2"), 2));
    assert!(!is_bouquet_addition(&pt("e"), &pt("e,1"), 2));
    assert!(!is_bouquet_addition(&pt("e,1,2"), &pt("e,1,2,1.1,2.1"), 2));
}

#[test]
fn root_decomposition() {
    let (subs, c) = decompose_root(&pt("e"));
    assert!(subs.is_empty());
    assert!(c.is_empty());
    let (subs, c) = decompose_root(&pt("e,1,2,1.1"));
    assert_eq!(subs, vec![pt("e,1"), pt("e")]);
    assert_eq!(c.to_string(), "2 1");
    let (subs, c) = decompose_root(&pt("e,1,1.1,1.1.1"));
    assert_eq!(subs, vec![pt("e,1,1.1")]);
    assert_eq!(c.to_string(), "3");
}

#[test]
fn root_composition() {
    assert_eq!(compose_root(&[]), pt("e"));
    assert_eq!(compose_root(&[pt("e"), pt("e")]), pt("e,1,2"));
    assert_eq!(compose_root(&[pt("e,1")]), pt("e,1,1.1"));
}

#[test]
fn completion() {
    assert_eq!(complete_d_ary(&st("e"), 2).unwrap(), pt("e,1,2"));
    assert_eq!(complete_d_ary(&st("e,1"), 2).unwrap(), pt("e,1,2,1.1,1.2"));
    assert_eq!(complete_d_ary(&st("e,2"), 3).unwrap(), pt("e,1,2,3,2.1,2.2,2.3"));
    assert!(complete_d_ary(&st("e,3"), 2).is_err());
}

#[test]
fn parsing() {
    assert_eq!(pt("0"), PlaneTree::root_only());
    assert_eq!(pt("e"), PlaneTree::root_only());
    assert_eq!(pt("e,1,2,1.1").len(), 4);
    match parse_plane_tree("e,2") {
        Err(crate::Error::Parse { token, .. }) => assert_eq!(token, "2"),
        other => panic!("{other:?}"),
    }
    assert!(parse_subtree("e,2").is_ok());
    assert!(parse_subtree("e,1.1").is_err());
    assert!(parse_plane_tree("1").is_err());
    assert!(parse_plane_tree("e,1,1").is_err());
    assert!(parse_plane_tree("e,x").is_err());
}

#[test]
fn dot_export() {
    let dot = to_dot(&pt("e,1,2"), "t");
    assert!(dot.contains("\"e\" -> \"1\""));
    assert!(dot.contains("\"e\" -> \"2\""));
}

#[test]
fn fringe_and_sizes() {
    let t = pt("e,1,2,1.1,1.2");
    assert_eq!(t.fringe(&Word::of(&[1])), pt("e,1,2"));
    let sizes = t.subtree_sizes();
    assert_eq!(sizes[&Word::root()], 5);
    assert_eq!(sizes[&Word::of(&[1])], 3);
    let (t2, new) = t.with_bouquet(&Word::of(&[2]), 2).unwrap();
    assert_eq!(new, vec![Word::of(&[2, 1]), Word::of(&[2, 2])]);
    assert!(is_bouquet_addition(&t, &t2, 2));
}
