use expander_forge_core::catalog::{shipped_catalog, verify_catalog, VerifySettings};
use expander_forge_core::kazhdan::{kazhdan_interval, kazhdan_upper_opt};

#[test]
fn shipped_catalog_has_no_falsifications() {
    let catalog = shipped_catalog().unwrap();
    let reports = verify_catalog(&catalog, &VerifySettings::default()).unwrap();
    assert_eq!(reports.len(), catalog.len());
    for r in &reports {
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.holds).collect();
        assert!(failed.is_empty(), "{}: {failed:#?}", r.subject);
        assert!(r.checks.len() >= 8, "{}", r.subject);
    }
}

#[test]
fn optimizer_reaches_the_sandwich_window() {
    for group in shipped_catalog().unwrap() {
        let gens = group.generator_indices();
        let interval = kazhdan_interval(&group.table, &gens).unwrap();
        assert!(interval.lower <= interval.upper, "{}", group.name);
        let opt = kazhdan_upper_opt(&group.table, &gens, 20, 9).unwrap();
        assert!(opt.value >= interval.lower - 1e-9, "{}", group.name);
        assert!(
            opt.value <= (2.0 * gens.len() as f64 * interval.gap).sqrt() + 0.05,
            "{}: {} vs {:?}",
            group.name,
            opt.value,
            interval
        );
    }
}
