"""Smoke test for the lhmatch Python extension.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""

import json
import tempfile

import lhmatch


def main():
    market = lhmatch.Market.example()
    sosm = market.deferred_acceptance()
    assert sosm == [1, 2, 2, 3, 3], sosm
    assert market.classify(sosm) == "Stable"
    assert market.rank_difference() == 4
    assert sosm in market.stable_matchings()

    perturbed = lhmatch.Market.example(perturbed=True)
    assert perturbed.deferred_acceptance() == [2, 3, 3, 1, 2]
    slack = market.with_quotas([1, 3, 2]).deferred_acceptance()
    slack_p = perturbed.with_quotas([1, 3, 2]).deferred_acceptance()
    assert sum(a != b for a, b in zip(slack, slack_p)) == 1

    real = lhmatch.Realization.sample(200, 3, seed=4, sigma=0.0)
    mu = real.match_students()
    assert len(mu) == 200
    assert real.rank_difference() == 0
    rho = lhmatch.spearman_rho_hat(mu, real.x, real.z) if sum(j > 0 for j in mu) >= 3 else None
    assert rho is None or abs(rho) < 4.0

    assert lhmatch.theorem_bound(100, 5, 0.0, 1.0, 0.0, 1.0, 0.0) == 4.0

    fixtures = json.loads(lhmatch.example_fixtures())
    assert fixtures["tight"] == [1, 2, 2, 3, 3]

    with tempfile.TemporaryDirectory() as out:
        config = "replications = 50\nsigma_grid = [0.0]\n[model]\nn = 30\nm = 3\nseed = 1\n"
        manifest = json.loads(lhmatch.run_experiment("audit-bdc", config, out))
        assert manifest["total_violations"] == 0
    print("python smoke test passed")


if __name__ == "__main__":
    main()
