use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ewf_core::feasibility::{
    fine_membership, guerin_marginal_check, pairwise_marginal_feasibility, povm_sweep, CertificateFile, MarginalSpec,
    QubitMeasurementPair,
};
use ewf_core::qcore::random::{random_basis, random_density};
use ewf_core::scenario::{gao_run, lookup, Assignment, Behavior, GaoPolicy};
use ewf_core::Exec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn gao_trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("gao_independent_born_k3_1e5");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| gao_run(GaoPolicy::IndependentBorn, 3, 100_000, 1, exec).unwrap()));
    }
    g.finish();
}

fn rho_sweep(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let states: Vec<_> = (0..200).map(|_| random_density(&mut rng, "S")).collect();
    let mut g = c.benchmark_group("guerin_random_rho_200");
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| exec.map(states.iter().collect(), |r| guerin_marginal_check(r).unwrap().holds))
        });
    }
    g.finish();
}

fn povm_grid(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pairs: Vec<_> = (0..200)
        .map(|_| QubitMeasurementPair::new(random_basis(&mut rng), random_basis(&mut rng)).unwrap())
        .collect();
    let mut g = c.benchmark_group("povm_oracle_200_pairs");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &pairs, |b, p| b.iter(|| povm_sweep(p, exec).unwrap()));
    }
    g.finish();
}

fn report_fan_out(c: &mut Criterion) {
    let pairs = [("c", "d"), ("c", "b"), ("a", "d"), ("a", "b")];
    let spec = MarginalSpec::from_scenario(&lookup("pusey_masanes_fr").unwrap(), &Assignment::new(), &pairs).unwrap();
    let mut files = vec![CertificateFile::new("pm", &pairwise_marginal_feasibility(&spec).unwrap())];
    for (u, v) in pairs {
        let r = pairwise_marginal_feasibility(&spec.without_pair(u, v)).unwrap();
        files.push(CertificateFile::new(&format!("pm-without-{u}{v}"), &r));
    }
    files.push(CertificateFile::new("hardy", &fine_membership(&Behavior::hardy()).unwrap()));
    files.push(CertificateFile::new("pr_box", &fine_membership(&Behavior::pr_box()).unwrap()));
    let texts: Vec<String> = files.iter().map(CertificateFile::to_json).collect();
    let mut g = c.benchmark_group("report_certificates");
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| exec.map(texts.iter().collect(), |t| CertificateFile::from_json(t).unwrap().verify()))
        });
    }
    g.finish();
}

criterion_group!(benches, gao_trials, rho_sweep, povm_grid, report_fan_out);
criterion_main!(benches);
