// SPDX-License-Identifier: Apache-2.0

mod common;

use miterscan::fanout::{compute_partition, default_analysis_inputs, get_fanout, SignalSet};
use miterscan::flow::{cross_check_decomposition, run_detection, FlowConfig};
use miterscan::miter::{check_property, check_property_with, MiterConfig, Verdict};
use miterscan::netlist::parse_netlist;
use miterscan::oracle::exhaustive_check_property;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let n = common::corpus_netlist(seed, 8);
        let text = n.to_snl();
        let back = parse_netlist(&text).unwrap();
        prop_assert_eq!(&back, &n);
        prop_assert_eq!(back.to_snl(), text);
    }

    #[test]
    fn partition_matches_bfs(seed in any::<u64>()) {
        let n = common::corpus_netlist(seed, 8);
        let inputs = default_analysis_inputs(&n, None);
        let p = compute_partition(&n, &inputs).unwrap();
        let bfs = common::bfs_distances(&n, &inputs);
        for s in n.state_and_outputs() {
            prop_assert_eq!(p.distance(s), bfs.get(&s).copied(), "{}", n.id(s));
        }
        prop_assert!(p.iterations() <= n.registers().len() + 1);
        let mut seen = p.level0.clone();
        for level in &p.first_seen {
            prop_assert!(level.is_disjoint(&seen));
            seen.extend(level.iter().copied());
        }
        prop_assert_eq!(seen, p.union());
    }

    #[test]
    fn fanout_is_monotone(seed in any::<u64>(), pick in any::<u64>()) {
        let n = common::corpus_netlist(seed, 8);
        let all: Vec<_> = n.state_and_outputs().chain(n.inputs().iter().copied()).collect();
        let small: SignalSet = all.iter().enumerate().filter(|(i, _)| (pick >> (i % 64)) & 1 == 1).map(|(_, &s)| s).collect();
        let mut big = small.clone();
        big.extend(all.iter().step_by(3).copied());
        let fs = get_fanout(&n, &small).unwrap();
        let fb = get_fanout(&n, &big).unwrap();
        prop_assert!(fs.is_subset(&fb));
    }

    #[test]
    fn engine_agrees_with_oracle(seed in any::<u64>()) {
        let n = common::small_netlist(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_property(&n, &mut rng);
        let sat = check_property(&n, &p).unwrap();
        let brute = exhaustive_check_property(&n, &p).unwrap();
        prop_assert_eq!(sat.holds(), brute.holds(), "{}", p.to_text(&n));
        for v in [&sat, &brute] {
            if let Verdict::Fails(c) = v {
                prop_assert!(c.replay(&n).is_ok());
                prop_assert!(c.swapped().replay(&n).is_ok());
            }
        }
    }

    #[test]
    fn maximal_cex_still_replays(seed in any::<u64>()) {
        let n = common::small_netlist(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_property(&n, &mut rng);
        let cfg = MiterConfig { maximal_cex: true, ..MiterConfig::default() };
        let plain = check_property(&n, &p).unwrap();
        let maximal = check_property_with(&n, &p, &cfg).unwrap();
        prop_assert_eq!(plain.holds(), maximal.holds());
        if let (Some(a), Some(b)) = (plain.counterexample(), maximal.counterexample()) {
            prop_assert!(b.replay(&n).is_ok());
            prop_assert!(b.violated().len() >= a.violated().len());
        }
    }

    #[test]
    fn checks_are_deterministic(seed in any::<u64>()) {
        let n = common::small_netlist(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_property(&n, &mut rng);
        prop_assert_eq!(check_property(&n, &p).unwrap(), check_property(&n, &p).unwrap());
    }

    #[test]
    fn flow_verdicts_are_sound(seed in any::<u64>()) {
        let n = common::corpus_netlist(seed, 6);
        let run = run_detection(&n, &FlowConfig::default()).unwrap();
        if let Some(d) = run.verdict.detection() {
            prop_assert!(d.cex.replay(&n).is_ok());
        }
        if run.verdict.is_secure() {
            prop_assert!(cross_check_decomposition(&n, &FlowConfig::paper_literal()).unwrap().aggregate_holds);
        }
    }

    #[test]
    fn decomposition_agrees_with_aggregate(seed in any::<u64>()) {
        let n = common::corpus_netlist(seed, 8);
        let c = cross_check_decomposition(&n, &FlowConfig::paper_literal()).unwrap();
        prop_assert!(c.consistent(), "{:?}\n{}", c, n.to_snl());
    }
}

/// A register that is semantically constant but structurally fed by the
/// inputs breaks the agreement: the aggregate property sees the constant,
/// while the one-cycle properties start from states where it differs.
#[test]
fn semantic_constant_splits_decomposed_and_aggregate() {
    let n = parse_netlist(
        "module konst\ninput a\nreg r0 next=a\nreg c next=OR(r0, NOT(r0))\nreg k next=NOT(c)\nreg h next=AND(k, h)\noutput y = h\n",
    )
    .unwrap();
    let c = cross_check_decomposition(&n, &FlowConfig::paper_literal()).unwrap();
    assert!(c.aggregate_holds);
    assert!(c.decomposed_fails());
    assert!(!c.consistent());
}
