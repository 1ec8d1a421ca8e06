use findnet_core::keys::KeyId;
use findnet_core::store::{ReportStore, StoredReport, DAY_MS, RETENTION_MS};
use findnet_core::wire::FetchRequest;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Op {
    Insert { key: u8, age_ms: i64 },
    Advance(i64),
    Purge,
    Fetch { key: u8 },
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0u8..4, 0i64..14 * DAY_MS).prop_map(|(key, age_ms)| Op::Insert { key, age_ms }),
        (0i64..2 * DAY_MS).prop_map(Op::Advance),
        Just(Op::Purge),
        (0u8..4).prop_map(|key| Op::Fetch { key }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn interleavings_respect_retention(ops in proptest::collection::vec(op(), 1..60)) {
        let store = ReportStore::default();
        let mut model: Vec<(u8, i64)> = Vec::new();
        let mut now = 30 * DAY_MS;
        for op in ops {
            match op {
                Op::Insert { key, age_ms } => {
                    let dp = now - age_ms;
                    store.insert_raw(StoredReport {
                        key_id: KeyId([key; 32]),
                        payload: [key; 88],
                        date_published: dp,
                        finder_id: "f".into(),
                        status_code: 0,
                    });
                    model.push((key, dp));
                }
                Op::Advance(ms) => now += ms,
                Op::Purge => {
                    let expected = model.iter().filter(|(_, dp)| *dp < now - RETENTION_MS).count();
                    model.retain(|(_, dp)| *dp >= now - RETENTION_MS);
                    prop_assert_eq!(store.purge_expired(now), expected);
                }
                Op::Fetch { key } => {
                    let resp = store.fetch(&FetchRequest::single(i64::MIN, i64::MAX, [KeyId([key; 32])]), None, now);
                    for r in &resp.results {
                        prop_assert!(now - r.date_published <= RETENTION_MS);
                    }
                    let expected = model.iter().filter(|(k, dp)| *k == key && now - dp <= RETENTION_MS).count();
                    prop_assert_eq!(resp.results.len(), expected);
                }
            }
        }
        prop_assert_eq!(store.len(), model.len());
    }
}
