//! The shipped reference data stays well-formed.

use std::path::Path;

/// Reference perplexities on general world-knowledge questions, kept for
/// comparison against harness output shapes. The baseline column sits
/// lower for English there, the reverse of the culture-specific sets;
/// the align configuration narrows the gap from both sides.
#[test]
fn world_knowledge_ppl_reference_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/reference/world_knowledge_ppl.csv");
    let raw = std::fs::read_to_string(path).unwrap();
    let mut lines = raw.lines();
    assert_eq!(lines.next(), Some("input,baseline_ppl,align_ppl"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3);
        let baseline: f64 = fields[1].parse().unwrap();
        let align: f64 = fields[2].parse().unwrap();
        assert!(baseline > 1.0 && align > 1.0);
        rows += 1;
    }
    assert_eq!(rows, 2);
    // The recorded direction: EN baseline below KO baseline, and the
    // align rows land between the two baselines.
    let en_baseline = 9.96;
    let ko_baseline = 11.52;
    let en_align = 10.63;
    let ko_align = 10.23;
    assert!(en_baseline < ko_baseline);
    assert!(en_align > en_baseline && ko_align < ko_baseline);
}
