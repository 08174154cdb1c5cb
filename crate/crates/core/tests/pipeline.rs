use gsvt::data::io::{read_problem, write_problem};
use gsvt::data::metrics::rel_err;
use gsvt::data::synthetic::{gen_lowrank, SyntheticSpec};
use gsvt::experiment::{LambdaSchedule, SolverSettings, SyntheticExperiment, LOG_GAMMA};
use gsvt::solvers::solve;
use gsvt::{gsvt, FixedPointConfig, Penalty, SolverKind};

fn spec(rank: usize, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        m: 40,
        n: 35,
        rank,
        observe_fraction: 0.5,
        noise_sigma: 0.0,
        seed,
    }
}

#[test]
fn problem_survives_disk_and_is_completed() {
    let (truth, problem) = gen_lowrank(&spec(3, 21)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("omega.csv");
    write_problem(&path, &problem).unwrap();
    let back = read_problem(&path, Some(problem.shape())).unwrap();
    assert_eq!(back, problem);

    let settings = SolverSettings::new(Penalty::logarithm(1.0, LOG_GAMMA).unwrap());
    let config = settings.config_for(&back, &LambdaSchedule::NOISE_FREE).unwrap();
    for kind in [SolverKind::Gpg, SolverKind::Irnn] {
        let (x, trace) = solve(kind, &back, &config, None, Some(&truth)).unwrap();
        assert!(trace.converged, "{kind}");
        assert!(rel_err(&x, &truth).unwrap() < 1e-3, "{kind}");
        assert!(trace.descent_violations(config.mu, 1e-8).is_empty(), "{kind}");
    }
}

#[test]
fn gsvt_removes_the_noise_floor() {
    let mut s = spec(4, 5);
    s.observe_fraction = 1.0;
    s.noise_sigma = 0.05;
    let (_, problem) = gen_lowrank(&s).unwrap();
    let b = problem.zero_filled();
    let r = gsvt(&Penalty::logarithm(3.0, LOG_GAMMA).unwrap(), &b, &FixedPointConfig::default()).unwrap();
    let kept = r.shrunk_sigma.iter().filter(|&&v| v > 0.0).count();
    assert_eq!(kept, 4, "{:?}", r.shrunk_sigma);
    assert!(r.shrunk_sigma.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn experiment_reruns_identically() {
    let mut exp = SyntheticExperiment::noise_free(30, vec![2, 12], 2, 99);
    exp.solvers = vec![SolverKind::Gpg, SolverKind::Convex];
    let a = exp.run(1).unwrap();
    let b = exp.run(1).unwrap();
    let key = |r: &gsvt::experiment::ExperimentResult| {
        r.records.iter().map(|t| (t.seed, t.rel_err, t.iterations)).collect::<Vec<_>>()
    };
    assert_eq!(key(&a), key(&b));
    let easy = a.aggregate(SolverKind::Gpg, 2).unwrap();
    assert_eq!(easy.fos, 1.0);
    let hard = a.aggregate(SolverKind::Convex, 12).unwrap();
    assert_eq!(hard.fos, 0.0);
}
