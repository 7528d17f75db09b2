//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{all_words, corpus, word_labels, word_strings, words_of, Case, Oracle};
use fles_core::benchgen::{allpar, ccnfs, random_structure, RandomParams};
use fles_core::decision::{check_inclusion, check_inclusion_with, membership, membership_with, DecisionOptions, MembershipChecker};
use fles_core::embedding::{check_sufficient, find_necessary, Embedding, Sufficiency};
use fles_core::nfa::{encode, nfa_inclusion, nfa_language, DEFAULT_SUBSET_CAP};
use fles_core::reductions::{
    brute_dhc, brute_hc, dhc_pair, hc_structure, random_digraph, random_ugraph, DiGraph,
};
use fles_core::semantics::{count_words, language, maximal_configurations};
use fles_core::{Configuration, Error, EventStructure, Label, Limits, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// A non-inclusion verdict to re-check by membership.
struct Witness {
    source: &'static str,
    name: String,
    word: Vec<Label>,
    left: EventStructure,
    right: EventStructure,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion1(cases: &[Case], witnesses: &mut Vec<Witness>) -> Outcome {
    let start = Instant::now();
    let mut included = 0;
    for case in cases {
        let expected = {
            let l = Oracle::new(&case.left).language();
            let r = Oracle::new(&case.right).language();
            l.is_subset(&r)
        };
        let verdict = check_inclusion(&case.left, &case.right).map_err(|e| format!("{}: {e}", case.name))?;
        ensure(verdict.included == expected, || {
            format!("{}: decision says {}, oracle says {}", case.name, verdict.included, expected)
        })?;
        let a1 = encode(&case.left, 1 << 20).map_err(|e| e.to_string())?;
        let a2 = encode(&case.right, 1 << 20).map_err(|e| e.to_string())?;
        let by_nfa = nfa_inclusion(&a1, &a2, 1 << 20).map_err(|e| e.to_string())?;
        ensure(by_nfa.included == expected, || {
            format!("{}: automaton says {}, oracle says {}", case.name, by_nfa.included, expected)
        })?;
        if verdict.included {
            included += 1;
        } else {
            let cex = verdict.counterexample.expect("non-inclusion carries a counterexample");
            witnesses.push(Witness {
                source: "inclusion corpus",
                name: case.name.clone(),
                word: cex.word.symbols().to_vec(),
                left: case.left.clone(),
                right: case.right.clone(),
            });
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} pairs ({} included, {} not), {:.1?}",
        cases.len(),
        included,
        cases.len() - included,
        elapsed
    ))
}

fn criterion2(cases: &[Case]) -> Outcome {
    let mut checked = 0usize;
    for case in cases {
        for s in [&case.left, &case.right] {
            let lang = Oracle::new(s).language();
            let alphabet: Vec<String> = s.alphabet().iter().map(|l| l.as_str().to_string()).collect();
            let checker = MembershipChecker::new(s, Limits::default()).map_err(|e| e.to_string())?;
            for w in all_words(&alphabet, 5) {
                let got = checker.check(&word_labels(&w)).map_err(|e| e.to_string())?.member;
                ensure(got == lang.contains(&w), || {
                    format!("{}: membership of {:?} is {}, oracle disagrees", case.name, w, got)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} membership queries"))
}

fn criterion3(cases: &[Case]) -> Outcome {
    let mut count = 0;
    for case in cases {
        for s in [&case.left, &case.right] {
            let direct = language(s, Limits::default()).map_err(|e| e.to_string())?;
            let a = encode(s, 1 << 20).map_err(|e| e.to_string())?;
            let via = nfa_language(&a, 1 << 22).map_err(|e| e.to_string())?;
            ensure(direct == via, || format!("{}: languages differ", case.name))?;
            count += 1;
        }
    }
    Ok(format!("{count} structures"))
}

fn criterion4() -> Outcome {
    let mut factorial: u128 = 1;
    for n in 1..=10usize {
        factorial *= n as u128;
        let s = allpar(n).map_err(|e| e.to_string())?;
        let words = count_words(&s, 1 << 20).map_err(|e| e.to_string())?;
        ensure(words == factorial, || format!("|L(allpar({n}))| = {words}, expected {factorial}"))?;
        let a = encode(&s, 1 << 20).map_err(|e| e.to_string())?;
        ensure(a.state_count == (1 << n) + 1, || {
            format!("allpar({n}) has {} states", a.state_count)
        })?;
        ensure(a.reachable_count() == 1 << n, || {
            format!("allpar({n}) has {} reachable states", a.reachable_count())
        })?;
    }
    Ok("n = 1..10: n! words, 2^n + 1 states, 2^n reachable".into())
}

fn criterion5() -> Outcome {
    for n in [2usize, 4, 6, 8, 10] {
        let s = ccnfs(n).map_err(|e| e.to_string())?;
        let count = maximal_configurations(&s, 1 << 20).map_err(|e| e.to_string())?.len();
        ensure(count == 1 << (n / 2), || format!("ccnfs({n}) has {count} maximal configurations"))?;
    }
    Ok("ccnfs(2..10): 2^(n/2) maximal configurations".into())
}

fn hc_member(g: &DiGraph, witnesses: &mut Vec<Witness>) -> Result<bool, String> {
    let s = hc_structure(g).map_err(|e| e.to_string())?;
    let xs = vec![Label::new("x"); g.n];
    let m = membership(&xs, &s).map_err(|e| e.to_string())?;
    let expected = brute_hc(g).map_err(|e| e.to_string())?;
    ensure(m.member == expected, || {
        format!("graph {g:?}: membership {} but brute force {}", m.member, expected)
    })?;
    if let Some(trace) = m.witness {
        // Membership witnesses are re-validated in criterion 11.
        witnesses.push(Witness {
            source: "hc reduction",
            name: format!("{g:?} trace {trace:?}"),
            word: xs,
            left: s.clone(),
            right: s,
        });
    }
    Ok(expected)
}

fn criterion6(witnesses: &mut Vec<Witness>) -> Outcome {
    let start = Instant::now();
    let mut graphs = 0;
    let mut hamiltonian = 0;
    for n in [3usize, 4] {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges = (0..pairs.len()).filter(|i| mask & (1 << i) != 0).map(|i| pairs[i]).collect();
            let g = DiGraph::new(n, edges);
            graphs += 1;
            hamiltonian += hc_member(&g, witnesses)? as usize;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let p = rng.gen_range(0.2..0.7);
        let g = random_digraph(&mut rng, 5, p);
        graphs += 1;
        hamiltonian += hc_member(&g, witnesses)? as usize;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("{graphs} digraphs ({hamiltonian} Hamiltonian), {elapsed:.1?}"))
}

/// Dense DHC instances on five vertices exceed the default enumeration cap.
fn wide_limits() -> Limits {
    Limits {
        max_configurations: 1 << 22,
        ..Limits::default()
    }
}

fn wide() -> DecisionOptions {
    DecisionOptions {
        limits: wide_limits(),
        ..DecisionOptions::default()
    }
}

fn criterion7(witnesses: &mut Vec<Witness>) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut holds = 0;
    for i in 0..200 {
        let n = rng.gen_range(2..=5);
        let p = rng.gen_range(0.3..0.9);
        let g = random_ugraph(&mut rng, n, p, 4);
        let expected = brute_dhc(&g).map_err(|e| e.to_string())?;
        let (e1, e2) = dhc_pair(&g).map_err(|e| e.to_string())?;
        let v = check_inclusion_with(&e1, &e2, wide())
            .map_err(|e| format!("graph {i} {g:?}: {e}"))?;
        ensure(v.included == expected, || {
            format!("graph {g:?}: inclusion {} but brute force {}", v.included, expected)
        })?;
        if expected {
            holds += 1;
        } else {
            witnesses.push(Witness {
                source: "dhc reduction",
                name: format!("{g:?}"),
                word: v.counterexample.unwrap().word.symbols().to_vec(),
                left: e1,
                right: e2,
            });
        }
    }
    Ok(format!("200 graphs ({holds} DHC instances), {:.1?}", start.elapsed()))
}

/// Random configuration of a random structure with at most `max_events` events.
fn random_configuration(rng: &mut ChaCha8Rng, unique: bool, max_events: usize) -> Configuration {
    loop {
        let events = rng.gen_range(2..max_events);
        let params = RandomParams {
            events,
            labels: if unique { events } else { rng.gen_range(1..=3) },
            cause_prob: rng.gen_range(0.0..0.4),
            conflict_prob: 0.2,
            epsilon_prob: 0.0,
        };
        let s = random_structure(rng, params);
        let mut configs = maximal_configurations(&s, 1 << 20).unwrap();
        let c = configs.swap_remove(rng.gen_range(0..configs.len()));
        let distinct: BTreeSet<Label> = c.labels().iter().copied().collect();
        if unique && distinct.len() != c.len() {
            continue;
        }
        if c.concurrent_pairs() > 0 {
            return c;
        }
    }
}

fn criterion8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut unique_samples = 0;
    for i in 0..500 {
        let unique = i % 2 == 0;
        let c = random_configuration(&mut rng, unique, 9);
        let pairs: Vec<(usize, usize)> = (0..c.len())
            .flat_map(|a| (0..c.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| c.concurrent(a, b))
            .collect();
        let &(a, b) = pairs.choose(&mut rng).unwrap();
        let whole = c.language(1 << 22).unwrap();
        let ab = c.split_local(a, b).unwrap().language(1 << 22).unwrap();
        let ba = c.split_local(b, a).unwrap().language(1 << 22).unwrap();
        let union: BTreeSet<Word> = ab.union(&ba).cloned().collect();
        ensure(union == whole, || format!("sample {i}: union differs from L(C)"))?;
        if unique {
            unique_samples += 1;
            ensure(ab.is_disjoint(&ba), || format!("sample {i}: split languages overlap"))?;
        }
    }
    Ok(format!("500 samples ({unique_samples} uniquely labeled)"))
}

/// A random order on the given labels; `extra` refines a base order.
fn random_dag(rng: &mut ChaCha8Rng, labels: &[Label], density: f64) -> Vec<(usize, usize)> {
    let k = labels.len();
    let mut perm: Vec<usize> = (1..k).collect();
    perm.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if rng.gen_bool(density) {
                pairs.push((perm[i], perm[j]));
            }
        }
    }
    pairs
}

fn is_maximal_event(c: &Configuration, i: usize) -> bool {
    c.succs(i).count_ones(..) == 0
}

fn criterion9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut sufficient, mut converse) = (0, 0);
    for i in 0..500 {
        let k = rng.gen_range(1..8);
        let unique = i % 2 == 0;
        let alphabet = if unique { k } else { rng.gen_range(1..=3) };
        let mut labels = vec![Label::EPSILON];
        labels.extend((0..k).map(|j| Label::new(&format!("l{}", if unique { j } else { rng.gen_range(0..alphabet) }))));
        let (d1, d2) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
        let base = random_dag(&mut rng, &labels, d1);
        let mut other = random_dag(&mut rng, &labels, d2);
        // A third of the samples refine one side of the other.
        if i % 3 == 1 {
            other.extend(base.iter().copied());
        }
        let mut l2 = labels.clone();
        if !unique && i % 3 == 2 {
            l2[1..].shuffle(&mut rng);
        }
        let c1 = Configuration::from_order(labels.clone(), &other).map_err(|e| e.to_string());
        let c2 = Configuration::from_order(l2, &base).map_err(|e| e.to_string());
        let (c1, c2) = match (c1, c2) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let l1 = c1.language(1 << 22).unwrap();
        let l2 = c2.language(1 << 22).unwrap();
        let phi = find_necessary(&c1, &c2);
        ensure(phi.is_some() == !l1.is_disjoint(&l2), || {
            format!("sample {i}: necessary embedding {} but common words {}", phi.is_some(), !l1.is_disjoint(&l2))
        })?;
        if let Some(phi) = &phi {
            if check_sufficient(&c1, &c2, phi).unwrap() == Sufficiency::Sufficient {
                sufficient += 1;
                ensure(l1.is_subset(&l2), || format!("sample {i}: sufficient but not included"))?;
                for e in 0..c1.len() {
                    if is_maximal_event(&c1, e) {
                        ensure(is_maximal_event(&c2, phi.image(e)), || {
                            format!("sample {i}: maximal event {e} maps to a non-maximal one")
                        })?;
                    }
                }
            }
        }
        if unique && l1.is_subset(&l2) {
            converse += 1;
            // Unique labels fix the only candidate bijection.
            let map = (0..c1.len())
                .map(|e| (0..c2.len()).find(|&t| c2.label(t) == c1.label(e)).unwrap())
                .collect();
            let only = Embedding::from_map(map);
            ensure(matches!(check_sufficient(&c1, &c2, &only), Ok(Sufficiency::Sufficient)), || {
                format!("sample {i}: inclusion without a sufficient embedding")
            })?;
        }
    }
    Ok(format!("500 samples ({sufficient} sufficient embeddings, {converse} unique-label inclusions)"))
}

fn criterion10() -> Outcome {
    let s = allpar(50).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let v = check_inclusion(&s, &s).map_err(|e| e.to_string())?;
    let es_time = start.elapsed();
    ensure(v.included, || "allpar(50) not included in itself".into())?;
    ensure(es_time < Duration::from_secs(1), || format!("allpar(50) took {es_time:?}"))?;
    let mut largest_ok = 0;
    let mut capped_at = None;
    for n in 10..=16 {
        let a = encode(&allpar(n).unwrap(), 1 << 20).map_err(|e| e.to_string())?;
        match nfa_inclusion(&a, &a, DEFAULT_SUBSET_CAP) {
            Ok(r) if r.included => largest_ok = n,
            Ok(_) => return Err(format!("allpar({n}) not included in itself by automaton")),
            Err(Error::SubsetCap(_)) => {
                capped_at = Some(n);
                break;
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    let capped = capped_at.ok_or("automaton path never hit the subset cap")?;
    ensure((14..=16).contains(&capped), || format!("automaton capped at n = {capped}"))?;
    Ok(format!(
        "allpar(50) decided in {es_time:.1?}; automaton path succeeds up to n = {largest_ok}, capped at n = {capped}"
    ))
}

fn criterion11(witnesses: &[Witness]) -> Outcome {
    let mut checked = 0;
    for w in witnesses {
        if w.source == "hc reduction" {
            // Positive membership: the witness must be a trace spelling the word.
            let m = membership(&w.word, &w.left).map_err(|e| e.to_string())?;
            let trace = m.witness.ok_or_else(|| format!("{}: witness missing", w.name))?;
            let ok = fles_core::semantics::is_trace(&w.left, &trace).map_err(|e| e.to_string())?;
            let spelled = Word::from_labels(trace.iter().map(|&e| w.left.label(e)));
            ensure(ok && spelled.symbols() == w.word.as_slice(), || format!("{}: bad trace", w.name))?;
        } else {
            let in_left = membership_with(&w.word, &w.left, wide_limits())
                .map_err(|e| e.to_string())?
                .member;
            let in_right = membership_with(&w.word, &w.right, wide_limits())
                .map_err(|e| e.to_string())?
                .member;
            ensure(in_left && !in_right, || {
                format!(
                    "{} ({}): witness {:?} in left {}, in right {}",
                    w.name,
                    w.source,
                    word_strings(&Word::from_labels(w.word.iter().copied())),
                    in_left,
                    in_right
                )
            })?;
        }
        checked += 1;
    }
    Ok(format!("{checked} witnesses confirmed"))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("criterion {n:>2} {name}: PASS ({detail})"),
        Err(why) => {
            failed += 1;
            println!("criterion {n:>2} {name}: FAIL ({why})");
        }
    };
    let cases = corpus();
    let mut witnesses = Vec::new();
    report(1, "inclusion oracle agreement", criterion1(&cases, &mut witnesses));
    report(2, "membership oracle agreement", criterion2(&cases));
    report(3, "automaton language preservation", criterion3(&cases));
    report(4, "permutation family", criterion4());
    report(5, "ccnfs counting", criterion5());
    report(6, "hc reduction soundness", criterion6(&mut witnesses));
    report(7, "dhc reduction soundness", criterion7(&mut witnesses));
    report(8, "split language partition", criterion8());
    report(9, "embedding properties", criterion9());
    report(10, "qualitative performance", criterion10());
    report(11, "counterexample validity", criterion11(&witnesses));
    let _ = words_of;
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
