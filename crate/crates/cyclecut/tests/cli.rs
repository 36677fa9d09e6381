//! End-to-end tests against the built binary: output shapes and exit
//! codes for every subcommand.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use cyclecut::Report;
use cyclecut_core::{parse_graph, validate_decomposition, CycleDecomposition, EdgeId};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclecut"))
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("cyclecut-test-{name}-{}", std::process::id()));
    fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const QUAD: &str = "2 4\n0 1\n0 1\n0 1\n0 1\n";
const HOUSE: &str = "5 6\n0 1\n0 2\n1 2\n0 3\n1 4\n3 4\n";
const BOWTIE: &str = "5 6\n0 1\n1 2\n2 0\n0 3\n3 4\n4 0\n";

#[test]
fn decompose_exit_codes_and_text() {
    let quad = write_temp("quad", QUAD);
    let out = bin().arg("decompose").arg(&quad).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "decomposable c=2");

    let house = write_temp("house", HOUSE);
    let out = bin().arg("decompose").arg(&house).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("degree 3 at node 0"), "{}", stdout(&out));

    let out = bin().arg("decompose").arg("/no/such/file").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decompose_json_report_with_cycles_and_ears() {
    let dt = write_temp("dt", "3 6\n0 1\n0 1\n1 2\n1 2\n2 0\n2 0\n");
    let out = bin()
        .args(["decompose", "--json", "--cycles", "--ears"])
        .arg(&dt)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.status, "decomposable");
    assert_eq!(report.c, Some(2));
    let g = parse_graph("3 6\n0 1\n0 1\n1 2\n1 2\n2 0\n2 0").unwrap();
    // reconstruct orientations from the id lists and revalidate
    let cycles = report.cycles.unwrap();
    assert_eq!(cycles.len(), 2);
    let mut ids: Vec<u32> = cycles.iter().flatten().copied().collect();
    ids.sort_unstable();
    assert_eq!(ids, [0, 1, 2, 3, 4, 5]);
    let scripts = report.ears.unwrap();
    assert_eq!(scripts.len(), 1);
    assert_eq!(scripts[0].expected_c, 2);
    let (rebuilt, c) = cyclecut_core::apply_script(&scripts[0].clone().into_script()).unwrap();
    assert_eq!(c, 2);
    assert_eq!(rebuilt.degree_multiset(), g.degree_multiset());
}

#[test]
fn decompose_sums_components() {
    // doubled triangle plus C3, disjoint
    let both = write_temp("both", "6 9\n0 1\n0 1\n1 2\n1 2\n2 0\n2 0\n3 4\n4 5\n5 3\n");
    let out = bin().arg("decompose").arg(&both).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "decomposable c=3");
}

#[test]
fn decompose_cycles_survive_validation() {
    let bowtie = write_temp("bowtie-val", BOWTIE);
    let out = bin().args(["decompose", "--json", "--cycles"]).arg(&bowtie).output().unwrap();
    let report: Report = serde_json::from_str(&stdout(&out)).unwrap();
    let g = parse_graph(BOWTIE).unwrap();
    // id lists plus graph endpoints determine the walks up to direction;
    // rebuild oriented cycles by chaining shared endpoints
    let cycles = report.cycles.unwrap();
    let oriented: Vec<Vec<(EdgeId, _, _)>> = cycles
        .iter()
        .map(|ids| {
            let mut walk = Vec::new();
            let first = g.endpoints(EdgeId(ids[0]));
            let mut at = if ids.len() == 1 {
                first.0
            } else {
                let second = g.endpoints(EdgeId(ids[1]));
                if first.1 == second.0 || first.1 == second.1 { first.0 } else { first.1 }
            };
            for &e in ids {
                let (u, v) = g.endpoints(EdgeId(e));
                let next = if u == at { v } else { u };
                walk.push((EdgeId(e), at, next));
                at = next;
            }
            walk
        })
        .collect();
    validate_decomposition(&g, &CycleDecomposition { cycles: oriented }).unwrap();
}

#[test]
fn check_outputs() {
    let dt = write_temp("check-dt", "3 6\n0 1\n0 1\n1 2\n1 2\n2 0\n2 0\n");
    let out = bin().arg("check").arg(&dt).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "yes");

    let k4 = write_temp("check-k4", "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let out = bin().arg("check").arg(&k4).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("degree 3"), "{}", stdout(&out));

    let loops = write_temp("check-loops", "2 2\n0 0\n1 1\n");
    let out = bin().arg("check").arg(&loops).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out).trim(), "no: disconnected");

    // 4-regular, connected, treewidth above 2
    let k5 = write_temp("check-k5", "5 10\n0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n");
    let out = bin().arg("check").arg(&k5).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out).trim(), "no: treewidth > 2");
}

#[test]
fn gen_is_deterministic_and_replayable() {
    let dir = std::env::temp_dir();
    let pid = std::process::id();
    let g1 = dir.join(format!("cyclecut-gen1-{pid}.graph"));
    let s1 = dir.join(format!("cyclecut-gen1-{pid}.json"));
    let g2 = dir.join(format!("cyclecut-gen2-{pid}.graph"));
    let s2 = dir.join(format!("cyclecut-gen2-{pid}.json"));
    for (g, s) in [(&g1, &s1), (&g2, &s2)] {
        let out = bin()
            .args(["gen", "--seed", "7", "--ears", "3", "--subdivisions", "5"])
            .arg("--out")
            .arg(g)
            .arg("--script")
            .arg(s)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out).trim(), "expected_c = 4");
    }
    assert_eq!(fs::read(&g1).unwrap(), fs::read(&g2).unwrap());
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());

    // the written graph decomposes with the promised c
    let out = bin().arg("decompose").arg(&g1).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "decomposable c=4");
}

#[test]
fn oracle_values_and_bounds() {
    let bowtie = write_temp("oracle-bowtie", BOWTIE);
    let out = bin().arg("oracle").arg(&bowtie).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "c_min = 2");

    let c5 = write_temp("oracle-c5", "5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n");
    let out = bin().arg("oracle").arg(&c5).output().unwrap();
    assert_eq!(stdout(&out).trim(), "c_min = 1");

    // 20 edges: over the default bound
    let mut big = String::from("20 20\n");
    for i in 0..20 {
        big.push_str(&format!("{} {}\n", i, (i + 1) % 20));
    }
    let big_file = write_temp("oracle-big", &big);
    let out = bin().arg("oracle").arg(&big_file).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("exceeds max-edges"));

    // flag and env raise the bound; flag wins over env
    let out = bin().args(["oracle", "--max-edges", "20"]).arg(&big_file).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "c_min = 1");
    let out = bin()
        .arg("oracle")
        .arg(&big_file)
        .env("CYCLECUT_MAX_ORACLE_EDGES", "20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin()
        .args(["oracle", "--max-edges", "4"])
        .arg(&big_file)
        .env("CYCLECUT_MAX_ORACLE_EDGES", "30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_emits_csv() {
    let out = bin().args(["bench", "--sizes", "200,400", "--seed", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,seconds");
    assert_eq!(lines.len(), 3);
    for (line, m) in lines[1..].iter().zip(["200", "400"]) {
        let (size, secs) = line.split_once(',').unwrap();
        assert_eq!(size, m);
        secs.parse::<f64>().unwrap();
    }
}
