//! Dense-matrix verification of the exact two-period and pumping
//! identities on small clusters.

fn main() {
    let records = floquet_dtc::theory::run_suite();
    let mut worst: std::collections::BTreeMap<&str, f64> = Default::default();
    for r in &records {
        let e = worst.entry(r.check.as_str()).or_default();
        *e = e.max(r.distance.unwrap_or(0.0));
    }
    for (check, d) in &worst {
        println!("{check:<28} max distance {d:.2e}");
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    println!("{} records, {failed} failed", records.len());
}
