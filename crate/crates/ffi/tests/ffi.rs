use std::ffi::{CStr, CString};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use freight_assign::io::{write_demand_csv, write_network_csv};
use freight_assign::{synthetic, ClassDemand, DemandTable, Network};
use freight_assign_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn c_path(p: &Path) -> CString {
    c(p.to_str().unwrap())
}

fn last_error() -> String {
    let p = fa_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Staged {
    _dir: tempfile::TempDir,
    net: PathBuf,
    demand: PathBuf,
}

fn stage(net: &Network, demand: &DemandTable) -> Staged {
    let dir = tempfile::tempdir().unwrap();
    let n = dir.path().join("net");
    let d = dir.path().join("demand.csv");
    write_network_csv(&n, net).unwrap();
    write_demand_csv(&d, demand).unwrap();
    Staged { _dir: dir, net: n, demand: d }
}

unsafe fn load(s: &Staged) -> (*mut FaNetwork, *mut FaDemand) {
    let mut net = ptr::null_mut();
    let mut demand = ptr::null_mut();
    assert_eq!(fa_network_load(c_path(&s.net).as_ptr(), &mut net), FaStatus::Ok);
    assert_eq!(fa_demand_load(c_path(&s.demand).as_ptr(), &mut demand), FaStatus::Ok);
    (net, demand)
}

#[test]
fn two_links_solve_through_handles() {
    let (net, demand) = synthetic::two_parallel_links();
    let s = stage(&net, &demand);
    unsafe {
        let (n, d) = load(&s);
        let mut cfg = fa_solver_config_default();
        cfg.rel_gap_tol = 1e-12;
        cfg.max_iterations = 2000;
        for alg in [FaAlgorithm::GradientProjection, FaAlgorithm::FrankWolfe] {
            let mut r = ptr::null_mut();
            assert_eq!(fa_solve(n, d, &cfg, alg, &mut r), FaStatus::Ok);
            assert_eq!(fa_result_algorithm(r), alg);
            assert!(fa_result_iterations(r) > 0);
            let len = fa_network_link_count(n);
            assert_eq!(len, net.links().len());
            let mut flows = vec![f64::NAN; len];
            assert_eq!(fa_result_link_flows(r, flows.as_mut_ptr(), len), FaStatus::Ok);
            let mut ix = usize::MAX;
            assert_eq!(fa_network_link_index(n, c("1").as_ptr(), &mut ix), FaStatus::Ok);
            let mut x2 = 0.0;
            assert_eq!(fa_result_link_flow(r, c("2").as_ptr(), &mut x2), FaStatus::Ok);
            assert!((flows[ix] - 20.0).abs() < 1e-4, "{alg:?}: {}", flows[ix]);
            assert!((x2 - 10.0).abs() < 1e-4, "{alg:?}: {x2}");
            let (mut raw, mut norm) = (0.0, 0.0);
            assert_eq!(fa_result_objective(r, &mut raw, &mut norm), FaStatus::Ok);
            assert!((norm - raw / 30.0).abs() < 1e-12);
            fa_result_free(r);
        }
        fa_demand_free(d);
        fa_network_free(n);
    }
}

#[test]
fn default_config_mirrors_the_library() {
    let cfg = fa_solver_config_default();
    let lib = freight_assign::SolverConfig::default();
    assert_eq!(cfg.rel_gap_tol, lib.rel_gap_tol);
    assert_eq!(cfg.max_iterations, lib.max_iterations as u64);
    assert_eq!(cfg.beta, lib.beta);
    assert_eq!(cfg.normalization, lib.normalization);
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(fa_network_load(ptr::null(), &mut net), FaStatus::NullPointer);
        assert!(last_error().contains("path"));
        assert_eq!(fa_network_load(c("x").as_ptr(), ptr::null_mut()), FaStatus::NullPointer);
        let mut out = ptr::null_mut();
        let cfg = fa_solver_config_default();
        assert_eq!(
            fa_solve(ptr::null(), ptr::null(), &cfg, FaAlgorithm::GradientProjection, &mut out),
            FaStatus::NullPointer
        );
        assert!(out.is_null());
        assert_eq!(fa_network_link_count(ptr::null()), 0);
        assert!(!fa_result_converged(ptr::null()));
        fa_network_free(ptr::null_mut());
        fa_demand_free(ptr::null_mut());
        fa_result_free(ptr::null_mut());
    }
}

#[test]
fn load_failures_carry_status_and_message() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(fa_network_load(c_path(&dir.path().join("missing.json")).as_ptr(), &mut net), FaStatus::Io);
        assert!(net.is_null());
        assert!(last_error().contains("missing.json"));

        let bad = dir.path().join("bad");
        fs::create_dir(&bad).unwrap();
        fs::write(bad.join("nodes.csv"), "id,kind,lon,lat\nA,centroid,,\nr1,road_junction,,\nr2,road_junction,,\n")
            .unwrap();
        fs::write(
            bad.join("links.csv"),
            "id,from,to,kind,length,free_flow_time,capacity,twin_id\nc1,A,r1,road_connector,0,0,,\nx,r1,r2,terminal,0,0.5,,\n",
        )
        .unwrap();
        assert_eq!(fa_network_load(c_path(&bad).as_ptr(), &mut net), FaStatus::InvalidNetwork);
        assert!(last_error().contains("link x"), "{}", last_error());

        let invalid = [0xffu8, 0];
        assert_eq!(fa_network_load(invalid.as_ptr().cast(), &mut net), FaStatus::InvalidUtf8);
    }
}

#[test]
fn solve_failures_carry_status() {
    let (net, _) = synthetic::two_parallel_links();
    let mut demand = DemandTable::new();
    demand.add("A", "B", ClassDemand::new(30.0, 2.0, 0.0)).unwrap();
    let s = stage(&net, &demand);
    unsafe {
        let (n, d) = load(&s);
        let mut r = ptr::null_mut();
        assert_eq!(fa_solve(n, d, ptr::null(), FaAlgorithm::GradientProjection, &mut r), FaStatus::Unreachable);
        assert!(r.is_null());
        assert!(last_error().contains("A -> B (rail)"), "{}", last_error());

        let mut cfg = fa_solver_config_default();
        cfg.step_size = -1.0;
        assert_eq!(fa_solve(n, d, &cfg, FaAlgorithm::GradientProjection, &mut r), FaStatus::InvalidConfig);
        fa_demand_free(d);
        fa_network_free(n);
    }
}

#[test]
fn result_accessors_check_arguments() {
    let (net, demand) = synthetic::two_parallel_links();
    let s = stage(&net, &demand);
    unsafe {
        let (n, d) = load(&s);
        let mut r = ptr::null_mut();
        assert_eq!(fa_solve(n, d, ptr::null(), FaAlgorithm::FrankWolfe, &mut r), FaStatus::Ok);
        let mut small = [0.0; 2];
        assert_eq!(fa_result_link_flows(r, small.as_mut_ptr(), small.len()), FaStatus::BufferTooSmall);
        let mut x = 0.0;
        assert_eq!(fa_result_link_flow(r, c("nope").as_ptr(), &mut x), FaStatus::NotFound);
        assert!(last_error().contains("'nope'"));
        let mut ix = 0;
        assert_eq!(fa_network_link_index(n, c("nope").as_ptr(), &mut ix), FaStatus::NotFound);
        assert_eq!(fa_result_objective(r, ptr::null_mut(), ptr::null_mut()), FaStatus::Ok);
        fa_result_free(r);
        fa_demand_free(d);
        fa_network_free(n);
    }
}

#[test]
fn lpf_entry_points() {
    let mut t = 0.0;
    unsafe {
        assert_eq!(fa_road_time(1.0, 100.0, 100.0, &mut t), FaStatus::Ok);
        assert!((t - 1.15).abs() < 1e-12);
        assert_eq!(fa_road_time_integral(1.0, 100.0, 100.0, &mut t), FaStatus::Ok);
        assert!((t - 103.0).abs() < 1e-12);
        assert_eq!(fa_rail_time(1.0, 10.0, 4.0, 6.0, 4.0, &mut t), FaStatus::Ok);
        assert!((t - 2.0).abs() < 1e-12);
        assert_eq!(fa_rail_time_integral(1.0, 10.0, 4.0, 10.0, &mut t), FaStatus::Ok);
        assert!((t - 12.0).abs() < 1e-12);
        assert_eq!(fa_road_time(1.0, 0.0, 1.0, &mut t), FaStatus::InvalidArgument);
        assert_eq!(fa_rail_time(1.0, 10.0, 4.0, -1.0, 0.0, &mut t), FaStatus::InvalidArgument);
        assert_eq!(fa_road_time(1.0, 100.0, 1.0, ptr::null_mut()), FaStatus::NullPointer);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let src = fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let header = fs::read_to_string(crate_dir().join("include/freight_assign.h")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(Path::parent).unwrap();
    assert!(lib_dir.join("libfreight_assign_ffi.so").exists(), "shared library not built in {}", lib_dir.display());
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg("-L")
        .arg(lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-lfreight_assign_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .expect("C compiler runs");
    assert!(status.success());

    let (net, demand) = synthetic::two_parallel_links();
    let s = stage(&net, &demand);
    let out = Command::new(&bin).arg(&s.net).arg(&s.demand).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{}{}", stdout, String::from_utf8_lossy(&out.stderr));
    let value = |key: &str| -> f64 {
        let line = stdout.lines().find(|l| l.starts_with(key)).unwrap();
        line[key.len()..].trim().split(' ').next().unwrap().parse().unwrap()
    };
    assert_eq!(value("links"), net.links().len() as f64);
    assert!((value("flow 1") - 20.0).abs() < 1e-6);
    assert!((value("flow 2") - 10.0).abs() < 1e-6);
    assert_eq!(value("converged"), 1.0);
    assert_eq!(value("road time"), 1.15);
    assert_eq!(value("rail integral"), 12.0);
}
