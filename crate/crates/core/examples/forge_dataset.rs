//! Builds relative-depth and correspondence items from raw JSONL corpora.

use std::io::Write;

use vpeval::forge::{export_dataset, forge_rd, forge_sc, import_correspondence_corpus, import_depth_corpus};
use vpeval::marker::encode_png;
use vpeval::synth::photo_like;

fn main() -> vpeval::Result<()> {
    let dir = tempfile::tempdir().expect("tempdir");
    for k in 0..2 {
        std::fs::write(dir.path().join(format!("scene{k}.png")), encode_png(&photo_like(128, 96, k))?).unwrap();
    }
    let depth = dir.path().join("depth.jsonl");
    let mut f = std::fs::File::create(&depth).unwrap();
    writeln!(f, r#"{{"source_id":"d0","image":"scene0.png","image_size":[128,96],"point_a":[20,30],"point_b":[90,60],"depth_a":2.0,"depth_b":5.5}}"#).unwrap();
    writeln!(f, r#"{{"source_id":"d1","image":"scene1.png","image_size":[128,96],"point_a":[40,40],"point_b":[80,20],"depth_a":3.0,"depth_b":3.05}}"#).unwrap();
    writeln!(f, "not json").unwrap();

    let imported = import_depth_corpus(&depth)?;
    println!("depth: {} records, {} skipped lines", imported.records.len(), imported.skipped.len());
    let rd = forge_rd("depth-demo", &imported.records, 0.05);
    for r in &rd.rejected {
        println!("  rejected {}: {}", r.source_id, r.reason);
    }
    for item in &rd.dataset.items {
        println!("  {} gold={} choices={:?}", item.id, item.gold_label, item.choice_labels);
    }

    let corr = dir.path().join("corr.jsonl");
    let kps: Vec<String> = (0..5)
        .map(|i| format!(r#"{{"name":"kp{i}","source":[{},{}],"target":[{},{}]}}"#, 10 + 20 * i, 20 + 10 * i, 15 + 18 * i, 70 - 9 * i))
        .collect();
    std::fs::write(
        &corr,
        format!(r#"{{"source_id":"c0","source_image":"scene0.png","source_size":[128,96],"target_image":"scene1.png","target_size":[128,96],"keypoints":[{}]}}"#, kps.join(",")) + "\n",
    )
    .unwrap();
    let sc = forge_sc("corr-demo", &import_correspondence_corpus(&corr)?.records, 3, 11);
    for item in &sc.dataset.items {
        println!("  {} gold={} choices={:?}", item.id, item.gold_label, item.choice_labels);
    }
    let manifest = export_dataset(&rd.dataset, dir.path(), &dir.path().join("out"))?;
    println!("exported {}", manifest.display());
    Ok(())
}
