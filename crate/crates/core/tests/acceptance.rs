// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test -p miterscan-core --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use miterscan::bench::{gen_host_cipher, generate, gen_random_shaped, BenchSpec, Benchmark, RandomShape, RESET_INPUT};
use miterscan::fanout::{compute_partition, default_analysis_inputs, SignalSet};
use miterscan::flow::{
    cross_check_decomposition, partition, refine_on_cex, run_detection, schedule, DetectionRun, FlowConfig, FlowVerdict,
    Refinement, Scenario,
};
use miterscan::miter::{check_property, Counterexample, Verdict};
use miterscan::netlist::{parse_netlist, Netlist};
use miterscan::oracle::exhaustive_check_property;
use miterscan::property::PropertyId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Suite {
    failed: usize,
    /// Every counterexample emitted anywhere in the suite, for replay.
    cexes: Vec<(Netlist, Counterexample)>,
}

impl Suite {
    fn report(&mut self, id: &str, title: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {title}: {detail}");
        if !ok {
            self.failed += 1;
        }
    }

    fn keep(&mut self, n: &Netlist, run: &DetectionRun) {
        if let Some(d) = run.verdict.detection() {
            self.cexes.push((n.clone(), d.cex.clone()));
        }
    }
}

fn bench(rounds: usize, width: usize, trigger: &str, payload: &str, seed: u64) -> (Benchmark, FlowConfig) {
    let b = generate(&BenchSpec::parse(rounds, width, trigger, payload, seed).expect("valid spec")).expect("generates");
    let mut cfg = FlowConfig::default();
    if b.manifest.injected.reset.is_some() {
        cfg = cfg.with_reset(RESET_INPUT, false);
    }
    (b, cfg)
}

fn c1_families(s: &mut Suite) {
    let mut triggers: Vec<String> = [2, 4, 8].iter().map(|d| format!("seq:{d}")).collect();
    triggers.extend([4, 8, 16, 32, 64].iter().map(|w| format!("event:{w}")));
    triggers.push("cycle:4".into());
    let (mut caught, mut total, mut slowest) = (0, 0, Duration::ZERO);
    let mut missed = Vec::new();
    for t in &triggers {
        for p in ["flip:0", "shift:8", "leak"] {
            total += 1;
            let (b, cfg) = bench(3, 8, t, p, 17);
            let start = Instant::now();
            let run = run_detection(&b.netlist, &cfg).expect("detection runs");
            slowest = slowest.max(start.elapsed());
            s.keep(&b.netlist, &run);
            if matches!(run.verdict, FlowVerdict::Cex(_)) {
                caught += 1;
            } else {
                missed.push(format!("{t}+{p}"));
            }
        }
    }
    let ok = caught == total && slowest < Duration::from_secs(10);
    s.report(
        "C1",
        "detection of every generated Trojan family",
        ok,
        format!("{caught}/{total} Cex, slowest {:.3} s, missed {missed:?}", slowest.as_secs_f64()),
    );
}

fn c2_routes(s: &mut Suite) {
    let (b, cfg) = bench(3, 4, "seq:4", "shift:4", 3);
    let run = run_detection(&b.netlist, &cfg).expect("runs");
    s.keep(&b.netlist, &run);
    let n = &b.netlist;
    let t1400 = run.verdict.detection().is_some_and(|d| {
        let sr_differs = d.cex.proven.iter().any(|v| v.differs() && n.id(v.sig).name == "ht_sr");
        d.property.id == PropertyId::Init && sr_differs
    });

    let rounds = 3;
    let (b, cfg) = bench(rounds, 4, "cycle:4", "flip:0", 3);
    let run = run_detection(&b.netlist, &cfg).expect("runs");
    s.keep(&b.netlist, &run);
    let ct0 = b.netlist.find("ct.0").expect("ciphertext");
    let depth = run.partition.distance(ct0).expect("ct in fanout");
    // the property proving level `depth` is fanout_property_{depth-1},
    // i.e. the pipeline stage index of the ciphertext register
    let got = run.verdict.detection().map(|d| d.property.id.clone());
    let t2500 = got == Some(PropertyId::Fanout(depth - 1)) && depth - 1 == rounds;

    let (b, cfg) = bench(3, 4, "cycle:4", "dos:4", 3);
    let run = run_detection(&b.netlist, &cfg).expect("runs");
    let mut injected: Vec<String> = b.manifest.injected.trigger_registers.clone();
    injected.extend(b.manifest.injected.payload_registers.iter().cloned());
    injected.sort();
    let ucs = match &run.verdict {
        FlowVerdict::Uncovered(u) => b.netlist.names(u),
        _ => Vec::new(),
    };
    let t1900 = ucs == injected;
    s.report(
        "C2",
        "detection routes on the AES-T analogs",
        t1400 && t2500 && t1900,
        format!(
            "T1400 init+shift-register difference {t1400}; T2500 {:?} at ciphertext depth {depth} {t2500}; T1900 UCS {} bits = injected {t1900}",
            got.map(|p| p.to_string()),
            ucs.len()
        ),
    );
}

fn c3_hosts(s: &mut Suite) {
    let mut secure = 0;
    let mut total = 0;
    for r in 1..=3 {
        for w in [4, 8] {
            total += 1;
            let n = gen_host_cipher(r, w);
            let run = run_detection(&n, &FlowConfig::default()).expect("runs");
            s.keep(&n, &run);
            if run.verdict.is_secure() && run.strengthenings.is_empty() {
                secure += 1;
            }
        }
    }
    s.report(
        "C3",
        "Trojan-free hosts are secure",
        secure == total,
        format!("{secure}/{total} secure, no strengthening needed"),
    );
}

fn c4_decomposition(s: &mut Suite) {
    let start = Instant::now();
    let (mut bad, mut fails, total) = (0, 0, 200);
    for seed in 0..total {
        let n = common::corpus_netlist(seed, 8);
        let c = cross_check_decomposition(&n, &FlowConfig::paper_literal()).expect("checks");
        fails += usize::from(!c.aggregate_holds);
        bad += usize::from(!c.consistent());
    }
    let elapsed = start.elapsed();
    s.report(
        "C4",
        "decomposed properties agree with the aggregate property",
        bad == 0 && elapsed < Duration::from_secs(300),
        format!("{bad} inconsistencies on {total} random netlists ({fails} failing), {:.2} s", elapsed.as_secs_f64()),
    );
    // informational: pipeline-shaped corpus with reconvergent logic
    let mut layered_bad = 0;
    for seed in 0..total {
        let mut shape = RandomShape::new(1 + (seed % 8) as usize, 1 + (seed % 3) as usize, 4 + (seed % 17) as usize);
        shape.layered = true;
        let n = gen_random_shaped(seed, shape);
        let c = cross_check_decomposition(&n, &FlowConfig::paper_literal()).expect("checks");
        layered_bad += usize::from(!c.consistent());
    }
    println!("       note: layered corpus {layered_bad}/{total} inconsistent (semantically constant registers)");
}

fn c5_oracle(s: &mut Suite) {
    let (mut disagree, mut failing, total) = (0, 0, 500);
    for seed in 0..total {
        let n = common::small_netlist(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_property(&n, &mut rng);
        let sat = check_property(&n, &p).expect("engine");
        let brute = exhaustive_check_property(&n, &p).expect("in bound");
        disagree += usize::from(sat.holds() != brute.holds());
        for v in [sat, brute] {
            if let Verdict::Fails(c) = v {
                failing += 1;
                s.cexes.push((n.clone(), *c));
            }
        }
    }
    s.report(
        "C5",
        "SAT engine agrees with exhaustive enumeration",
        disagree == 0,
        format!("{disagree} disagreements on {total} instances ({} failing)", failing / 2),
    );
}

fn per_property(run: &DetectionRun) -> Duration {
    let checked: Vec<Duration> = run.records.iter().filter(|r| r.stats.variables > 0).map(|r| r.elapsed).collect();
    checked.iter().sum::<Duration>() / checked.len().max(1) as u32
}

fn c6_depth(s: &mut Suite) {
    let widths = [4, 8, 16, 32, 64];
    let mut times = Vec::new();
    let mut detected = true;
    let mut sizes = Vec::new();
    for w in widths {
        // a 64-bit block host, so the counter is a realistic fraction of the design
        let (b, mut cfg) = bench(3, 64, &format!("event:{w}"), "flip:0", 9);
        cfg.jobs = 1;
        let mut samples = Vec::new();
        for _ in 0..5 {
            let run = run_detection(&b.netlist, &cfg).expect("runs");
            detected &= matches!(run.verdict, FlowVerdict::Cex(_));
            samples.push(per_property(&run));
            s.keep(&b.netlist, &run);
            if samples.len() == 1 {
                let clauses = run.records.iter().map(|r| r.stats.clauses).max().unwrap_or(0);
                sizes.push((b.netlist.len(), clauses));
            }
        }
        samples.sort();
        times.push(samples[2]);
    }
    let ratio = times.last().unwrap().as_secs_f64() / times[0].as_secs_f64().max(1e-9);
    // linear encoding: each extra counter bit costs the same number of clauses
    let per_bit: Vec<f64> = sizes
        .windows(2)
        .zip(widths.windows(2))
        .map(|(c, w)| (c[1].1 as f64 - c[0].1 as f64) / (w[1] - w[0]) as f64)
        .collect();
    let spread = per_bit.iter().cloned().fold(0.0, f64::max) / per_bit.iter().cloned().fold(f64::MAX, f64::min).max(1e-9);
    let ms: Vec<String> = times.iter().map(|t| format!("{:.2}", t.as_secs_f64() * 1e3)).collect();
    s.report(
        "C6",
        "trigger-depth independence",
        detected && ratio < 5.0 && spread < 1.5,
        format!(
            "counter widths {widths:?}: per-property ms {ms:?}, growth {ratio:.2}x; clauses per counter bit {per_bit:?}"
        ),
    );
}

fn c7_spurious(s: &mut Suite) {
    let reuse = parse_netlist("module reuse\ninput a\nreg x next=a\nreg w next=x\nreg z next=XOR(w,x)\noutput y = z\n").unwrap();
    let cfg = FlowConfig::paper_literal();
    let part = partition(&reuse, &cfg).expect("partition");
    let props = schedule(&part, false, None).expect("schedule");
    let fp2 = &props[2];
    let init_proven: SignalSet = props[0].prove.iter().flat_map(|t| t.signals.iter().copied()).collect();
    let scenario1 = match check_property(&reuse, fp2).expect("engine") {
        Verdict::Fails(cex) => {
            s.cexes.push((reuse.clone(), (*cex).clone()));
            matches!(
                refine_on_cex(&reuse, fp2, &cex, &cfg, &init_proven).expect("refines"),
                Refinement::Resolved { ref added, .. } if added.iter().all(|a| a.scenario == Scenario::ProvenElsewhere)
            )
        }
        Verdict::Holds => false,
    };
    let acc = parse_netlist("module acc\ninput a\nreg x next=a\nreg acc next=XOR(acc, x)\noutput y = acc\n").unwrap();
    let plain = run_detection(&acc, &FlowConfig::default()).expect("runs");
    s.keep(&acc, &plain);
    let listed = FlowConfig {
        assume_equal: vec!["acc".into()],
        ..FlowConfig::default()
    };
    let resolved = run_detection(&acc, &listed).expect("runs");
    let scenario2 = matches!(plain.verdict, FlowVerdict::Cex(_))
        && resolved.verdict.is_secure()
        && resolved.strengthenings.iter().all(|st| st.scenario == Scenario::AssumeEqual);
    s.report(
        "C7",
        "spurious counterexample handling",
        scenario1 && scenario2,
        format!("reuse fanout_property_2 resolved by proven x {scenario1}; accumulator resolved by assume-equal {scenario2}"),
    );
}

fn c8_replay(s: &mut Suite) {
    let bad = s.cexes.iter().filter(|(n, c)| c.replay(n).is_err()).count();
    let total = s.cexes.len();
    s.report(
        "C8",
        "counterexamples replay under simulation",
        bad == 0 && total > 0,
        format!("{}/{total} replay exactly", total - bad),
    );
}

fn c9_partition(s: &mut Suite) {
    let (mut bad, mut over, total) = (0, 0, 200);
    for seed in 0..total {
        let n = common::corpus_netlist(seed + 10_000, 8);
        let inputs = default_analysis_inputs(&n, None);
        let p = compute_partition(&n, &inputs).expect("partition");
        let bfs = common::bfs_distances(&n, &inputs);
        if n.state_and_outputs().any(|sig| p.distance(sig) != bfs.get(&sig).copied()) {
            bad += 1;
        }
        over += usize::from(p.iterations() > n.registers().len() + 1);
    }
    s.report(
        "C9",
        "partition matches breadth-first search",
        bad == 0 && over == 0,
        format!("{bad} mismatches, {over} over the iteration bound, on {total} random netlists"),
    );
}

fn main() {
    let mut s = Suite {
        failed: 0,
        cexes: Vec::new(),
    };
    c1_families(&mut s);
    c2_routes(&mut s);
    c3_hosts(&mut s);
    c4_decomposition(&mut s);
    c5_oracle(&mut s);
    c6_depth(&mut s);
    c7_spurious(&mut s);
    c9_partition(&mut s);
    c8_replay(&mut s);
    if s.failed > 0 {
        println!("{} criteria failed", s.failed);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
