from costnet.benchmark import BenchmarkSettings, run_benchmark
from costnet.models import scaled_dims


def test_benchmark_plumbing_small():
    # miniature run: checks determinism of the summary and its shape, not
    # the recall ordering (that is the acceptance benchmark's job)
    settings = BenchmarkSettings(
        n_legit_train=300,
        n_malicious_train=30,
        n_test_per_class=60,
        epochs=2,
        seeds=(0,),
        max_len=24,
    )
    a = run_benchmark(settings)
    b = run_benchmark(settings)
    assert a == b
    assert a["n_seeds"] == 1
    assert set(a["runs"][0]) == {"seed", "recall_gamma0", "recall_gamma1", "difference"}
    assert 0 <= a["runs"][0]["recall_gamma0"] <= 100
