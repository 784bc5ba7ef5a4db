"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import time
from functools import lru_cache

import numpy as np
import pytest

from maxconf import linalg, optimizer, oracle
from maxconf.confidence import baseline_mcm_measurement, is_mcm, max_confidences, success_probability
from maxconf.ensemble import Ensemble, average_state, random_ensemble, tensor
from maxconf.sequence import product_measurement, sequence_max_confidence, sequence_p_g

from conftest import ACCEPTANCE_LINES, ensemble_a


def verdict(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[acceptance {number:02d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert ok, line


def corpus_params(seed: int, max_dim: int = 6, max_n: int = 5):
    rng = np.random.default_rng(10_000 + seed)
    dim = int(rng.integers(1, max_dim + 1))
    return dim, int(rng.integers(1, max_n + 1)), int(rng.integers(1, dim + 1))


@lru_cache(maxsize=None)
def corpus(seed: int) -> Ensemble:
    dim, n, rank = corpus_params(seed)
    return random_ensemble(dim, n, rank, seed=seed)


@lru_cache(maxsize=None)
def certified(seed: int):
    return optimizer.certify(corpus(seed))


def qubit_sequence(seed: int, length: int):
    rng = np.random.default_rng(20_000 + seed)
    steps = [random_ensemble(2, int(rng.integers(1, 4)), int(rng.integers(1, 3)), seed=int(rng.integers(2**31)))
             for _ in range(length)]
    return tensor(steps)


def test_01_fixture_exactness():
    start = time.perf_counter()
    e = ensemble_a()
    c = [r.value for r in max_confidences(e)]
    cert = optimizer.certify(e)
    bound = optimizer.lower_bound(e)
    base = success_probability(e, baseline_mcm_measurement(e))
    elapsed = time.perf_counter() - start
    ok = (
        abs(c[0] - 2 / 3) <= 1e-9 and abs(c[1] - 1) <= 1e-9
        and abs(cert.p_g - 0.75) <= 1e-6 and abs(cert.q_g - 0.75) <= 1e-6
        and bound == 1 / 8 and abs(base - 5 / 16) <= 1e-9 and elapsed < 1.0
    )
    verdict(1, "fixture exactness", ok,
            f"C=({c[0]:.12f}, {c[1]:.12f}) p_G={cert.p_g:.10f} q_G={cert.q_g:.10f} "
            f"lambda/n={bound} baseline={base:.12f} time={elapsed:.3f}s")


def test_02_lemma_one_bound():
    start = time.perf_counter()
    worst_bound = worst_norm = worst_value = 0.0
    for seed in range(200):
        e = corpus(seed)
        rho0 = average_state(e)
        for x, r in enumerate(max_confidences(e)):
            worst_bound = max(worst_bound, e.priors[x] - r.value)
            worst_norm = max(worst_norm, abs(np.trace(rho0 @ r.witness).real - 1))
            worst_value = max(worst_value, abs(e.priors[x] * np.trace(e.states[x] @ r.witness).real - r.raw_value))
    elapsed = time.perf_counter() - start
    ok = worst_bound <= 1e-9 and worst_norm <= 1e-9 and worst_value <= 1e-8 and elapsed < 30
    verdict(2, "maximum confidence at least the prior", ok,
            f"200 ensembles, max(eta-C)={worst_bound:.1e} max|Tr(rho0 E*)-1|={worst_norm:.1e} "
            f"max|eta Tr(rho E*)-C|={worst_value:.1e} time={elapsed:.1f}s")


def test_03_positive_lower_bound():
    worst_pg = worst_res = worst_base = -np.inf
    for seed in range(200):
        e = corpus(seed)
        bound = optimizer.lower_bound(e)
        m = baseline_mcm_measurement(e)
        worst_pg = max(worst_pg, bound - certified(seed).p_g)
        worst_res = max(worst_res, max(is_mcm(e, m).residuals))
        worst_base = max(worst_base, bound - success_probability(e, m))
    ok = worst_pg <= 1e-9 and worst_res <= 1e-8 and worst_base <= 1e-9
    verdict(3, "success bounded below by lambda/n", ok,
            f"200 ensembles, max(lambda/n - p_G)={worst_pg:.2e} max baseline residual={worst_res:.1e} "
            f"max(lambda/n - baseline)={worst_base:.2e}")


def test_04_strong_duality():
    start = time.perf_counter()
    worst_gap, worst_weak = 0.0, -np.inf
    for seed in range(50):
        # solved fresh so the runtime covers the solves
        cert = optimizer.certify(corpus(seed))
        worst_gap = max(worst_gap, abs(cert.p_g - cert.q_g))
        # every primal iterate below every dual iterate
        worst_weak = max(worst_weak, max(cert.primal.history) - min(cert.dual.history))
    elapsed = time.perf_counter() - start
    ok = worst_gap <= 1e-6 and worst_weak <= 1e-7 and elapsed < 300
    verdict(4, "strong duality", ok,
            f"50 ensembles, max|p_G-q_G|={worst_gap:.1e} max(primal iterate - dual iterate)={worst_weak:.1e} time={elapsed:.1f}s")


def test_05_slackness_biconditional():
    rng = np.random.default_rng(5)
    worst_slack = 0.0
    min_shift = np.inf
    all_detected = True
    for seed in range(50):
        e, cert = corpus(seed), certified(seed)
        worst_slack = max(worst_slack, max(abs(s) for s in cert.slackness))
        g = rng.standard_normal((e.dim, e.dim)) + 1j * rng.standard_normal((e.dim, e.dim))
        g = g @ g.conj().T
        h = cert.dual.certificate + 0.1 * g / np.trace(g).real
        min_shift = min(min_shift, np.trace(h).real - cert.q_g)
        chk = optimizer.check_certificate(e, cert.primal.measurement, h)
        all_detected &= not chk.passed and "gap" in chk.failed
    ok = worst_slack <= 1e-7 and min_shift > 1e-3 and all_detected
    verdict(5, "complementary slackness", ok,
            f"50 certified pairs, max residual={worst_slack:.1e}; perturbed H: min trace shift={min_shift:.3f}, "
            f"all flagged={all_detected}")


def test_06_dual_support():
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(600 + seed)
        dim = int(rng.integers(3, 5))
        small = random_ensemble(2, int(rng.integers(1, 4)), int(rng.integers(1, 3)), seed=seed)
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        e = Ensemble(small.priors, tuple(q @ s @ q.conj().T for s in small.embed(dim).states))
        h = optimizer.solve_dual(e).certificate
        p = linalg.support_projector(average_state(e)).operator
        worst = max(worst, float(np.max(np.abs(p @ h @ p - h))))
    verdict(6, "dual certificate supported on the average state", worst <= 1e-8,
            f"20 rank-deficient ensembles (dim 3-4), max|PHP-H|={worst:.1e}")


def test_07_confidence_factorization():
    worst = 0.0
    count = 0
    for seed, length in [(s, 2) for s in range(30)] + [(100 + s, 3) for s in range(10)]:
        seq = qubit_sequence(seed, length)
        for idx in seq.indices():
            worst = max(worst, sequence_max_confidence(seq, idx, "both").deviation)
            count += 1
    verdict(7, "maximum confidence factorizes", worst <= 1e-8,
            f"40 sequences, {count} joint indices, max deviation={worst:.1e}")


def test_08_product_measurement():
    worst_res = worst_succ = 0.0
    for seed, length in [(s, 2) for s in range(30)] + [(100 + s, 3) for s in range(10)]:
        seq = qubit_sequence(seed, length)
        for parts in ([baseline_mcm_measurement(s) for s in seq.steps],
                      [optimizer.solve_primal(s).measurement for s in seq.steps]):
            joint = product_measurement(parts)
            worst_res = max(worst_res, max(is_mcm(seq.joint, joint).residuals))
            expected = np.prod([success_probability(s, m) for s, m in zip(seq.steps, parts)])
            worst_succ = max(worst_succ, abs(success_probability(seq.joint, joint) - expected))
    ok = worst_res <= 1e-8 and worst_succ <= 1e-10
    verdict(8, "product of per-step MCMs", ok,
            f"40 sequences x 2 measurement choices, max joint residual={worst_res:.1e} "
            f"max success deviation={worst_succ:.1e}")


def test_09_success_factorization():
    start = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rep = sequence_p_g(qubit_sequence(200 + seed, 2), mode="both")
        worst = max(worst, rep.deviation)
    aa = sequence_p_g(tensor([ensemble_a(), ensemble_a()]), mode="both")
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-5 and abs(aa.direct - 9 / 16) <= 1e-5 and abs(aa.product - 9 / 16) <= 1e-5 and elapsed < 300
    verdict(9, "optimal success factorizes", ok,
            f"20 sequences, max|joint-product|={worst:.1e}; A x A direct={aa.direct:.8f} "
            f"product={aa.product:.8f} time={elapsed:.1f}s")


def test_10_plus_minus_identity():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        length = int(rng.integers(1, 5))
        dims = rng.integers(1, 4, size=length)
        xs = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for d in dims]
        ys = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for d in dims]
        for parity in (0, 1):
            expected = linalg.kron(*xs) + (-1) ** parity * linalg.kron(*ys)
            worst = max(worst, float(np.max(np.abs(linalg.plus_minus_decomposition(xs, ys, parity) - expected))))
    verdict(10, "sum/difference tensor identity", worst <= 1e-10,
            f"100 operator lists x 2 parities, max deviation={worst:.1e}")


def test_11_oracle_sandwich():
    cases = [(f.name, f.ensemble, 0) for f in oracle.fixture_suite()]
    for seed in range(20):
        rng = np.random.default_rng(1100 + seed)
        dim = int(rng.integers(2, 4))
        e = random_ensemble(dim, int(rng.integers(1, 4)), int(rng.integers(1, dim + 1)), seed=1100 + seed)
        cases.append((f"random-{seed}", e, seed))
    worst_width = 0.0
    outside = []
    for name, e, seed in cases:
        b = oracle.oracle_bounds(e, 2000, seed=seed)
        p = optimizer.certify(e).p_g
        worst_width = max(worst_width, b.width)
        if not b.contains(p):
            outside.append(name)
    ok = not outside and worst_width <= 0.02
    verdict(11, "oracle sandwich", ok,
            f"{len(cases)} ensembles at 2000 samples, max width={worst_width:.1e}, outside={outside or 'none'}")


def test_12_unambiguous_sequences():
    rng = np.random.default_rng(12)
    worst_c = worst_pg = 0.0
    thetas_list = [[np.pi / 3, np.pi / 3]] + [list(rng.uniform(0.2, np.pi / 2, size=int(rng.integers(1, 4))))
                                              for _ in range(6)]
    for thetas in thetas_list:
        seq = tensor([oracle.theta_pair(t) for t in thetas])
        for idx in seq.indices():
            worst_c = max(worst_c, abs(sequence_max_confidence(seq, idx, "direct").direct - 1))
        expected = float(np.prod([1 - np.cos(t) for t in thetas]))
        direct = sequence_p_g(seq, mode="direct").direct
        worst_pg = max(worst_pg, abs(direct - expected))
    pair = sequence_p_g(tensor([oracle.theta_pair(np.pi / 3)] * 2), mode="direct").direct
    ok = worst_c <= 1e-8 and worst_pg <= 1e-5 and abs(pair - 0.25) <= 1e-5
    verdict(12, "unambiguous sequences", ok,
            f"{len(thetas_list)} pure-pair sequences, max|C-1|={worst_c:.1e} "
            f"max|p_G - prod(1-cos)|={worst_pg:.1e}; pi/3 twice={pair:.8f}")
