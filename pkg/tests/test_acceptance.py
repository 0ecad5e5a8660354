"""
Acceptance criteria 1-14.

Each test prints one ``PASS``/``FAIL`` line (also collected into the
terminal summary) and asserts the criterion at its stated tolerance.
Criteria 7-13 read the seeded n = 2000 Monte-Carlo runs shared through the
``mc`` fixture; criterion 14 drives the ``verify`` command directly.
"""

import json
import math
import statistics

import numpy
import pytest
from scipy import integrate, optimize

import conftest
from conftest import MC_SEED
from spikedwigner.cli import EXIT_OK, main
from spikedwigner.measure import Measure, stieltjes
from spikedwigner.spectra import check_inclusion, check_outliers, check_separation, ks_distance
from spikedwigner.subord import SubordModel


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    return ok


# analytic fixtures

def test_criterion_01_semicircle(delta0):
    (lo, hi), = delta0.free_support()
    dens = delta0.free_density(0.0)
    err_s = max(abs(lo + 2), abs(hi - 2))
    err_d = abs(dens - 1 / math.pi)
    ok = err_s <= 1e-9 and err_d <= 1e-8
    assert record(1, ok, f'support [{lo:.12f}, {hi:.12f}] (err {err_s:.1e} <= 1e-9), '
                         f'density(0) err {err_d:.1e} <= 1e-8')


def test_criterion_02_uniform_edge(unif):
    (s, t), = unif.u_components
    (lo, hi), = unif.free_support()
    edge = math.sqrt(2) + math.log(1 + math.sqrt(2))
    err_u = max(abs(s + math.sqrt(2)), abs(t - math.sqrt(2)))
    err_e = max(abs(hi - edge), abs(lo + edge))
    ok = err_u <= 1e-9 and err_e <= 1e-8
    assert record(2, ok, f'closure(U) err {err_u:.1e} <= 1e-9, edge {hi:.9f} vs '
                         f'{edge:.9f} (err {err_e:.1e} <= 1e-8)')


def _two_atom_root(sigma):
    # independent oracle: brentq on 1/2 (1/(s-1)^2 + 1/(s+1)^2) = 1/sigma^2
    f = lambda s: 0.5 * (1 / (s - 1) ** 2 + 1 / (s + 1) ** 2) - 1 / sigma ** 2
    return optimize.brentq(f, 1 + 1e-12, 2 + sigma, xtol=1e-15, rtol=1e-15)


def test_criterion_03_two_atom_component(two_atom):
    # sigma = 2 turns the defining equation into y^2 - 6y - 3 = 0 (y = s^2)
    (s, t), = two_atom.u_components
    expect = math.sqrt(3 + 2 * math.sqrt(3))
    oracle = _two_atom_root(2.0)
    err = max(abs(t - expect), abs(s + expect))
    ok = err <= 1e-8 and abs(oracle - expect) <= 1e-12
    assert record(3, ok, f'sigma=2: s = {t:.12f}, root of the defining equation '
                         f'{expect:.12f} (err {err:.1e} <= 1e-8)')


def test_criterion_03_stated_value_at_sigma_sqrt2():
    # the stated closed form sqrt(2 + sqrt 5) solves y^2 - 4y - 1 = 0, which is
    # the same equation at sigma^2 = 2
    m = SubordModel.build(Measure.atoms([-1.0, 1.0]), math.sqrt(2.0))
    (s, t), = m.u_components
    expect = math.sqrt(2 + math.sqrt(5))
    err = max(abs(t - expect), abs(s + expect))
    ok = err <= 1e-8
    assert record(3, ok, f'sigma=sqrt2: s = {t:.12f} vs sqrt(2+sqrt5) = {expect:.12f} '
                         f'(err {err:.1e} <= 1e-8)')


@pytest.mark.xfail(strict=True, reason='stated value sqrt(2+sqrt5) belongs to sigma^2 = 2, '
                                       'not sigma = 2; see the decisions ledger')
def test_criterion_03_literal(two_atom):
    (s, t), = two_atom.u_components
    expect = math.sqrt(2 + math.sqrt(5))
    ok = abs(t - expect) <= 1e-8
    record(3, ok, f'literal reading (sigma=2, s=sqrt(2+sqrt5)): s = {t:.6f} vs '
                  f'{expect:.6f} [known defect in the stated value, expected to fail]')
    assert ok


def test_criterion_04_oracle_equivalence(delta0, unif, two_atom):
    worst = 0.0
    for m in (delta0, unif, two_atom):
        for lo, hi in m.free_support():
            x = numpy.linspace(lo, hi, 202)[1:-1]
            g = numpy.asarray(m.fixed_point_g(x + 1e-4j))
            worst = max(worst, float(numpy.max(numpy.abs(m.free_density(x) + g.imag / math.pi))))
    ok = worst <= 2e-3
    assert record(4, ok, f'max |density - (-Im g/pi)| on 3 x 200 points = {worst:.2e} <= 2e-3')


def test_criterion_05_mass_identity(skewed):
    masses = skewed.component_masses
    assert len(masses) == 2
    # independent route: integrate the density over each support interval
    quad = []
    for lo, hi in skewed.free_support():
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        f = lambda phi: float(skewed.free_density(c - r * math.cos(phi))) * r * math.sin(phi)
        quad.append(integrate.quad(f, 0, math.pi, epsabs=1e-12, limit=200)[0])
    cdf_mid = float(skewed.free_cdf(0.5 * (skewed.free_support()[0][1]
                                           + skewed.free_support()[1][0])))
    err = max(abs(masses[0] - 0.25), abs(masses[1] - 0.75),
              abs(quad[0] - 0.25), abs(quad[1] - 0.75), abs(cdf_mid - 0.25))
    ok = err <= 1e-6
    assert record(5, ok, f'masses {masses[0]:.8f}, {masses[1]:.8f}; integrated density '
                         f'{quad[0]:.8f}, {quad[1]:.8f} (max err {err:.1e} <= 1e-6)')


def test_criterion_06_roundtrips(delta0, unif, two_atom, skewed):
    rng = numpy.random.default_rng(6)
    worst_inv, worst_fp = 0.0, 0.0
    for m in (delta0, unif, two_atom, skewed):
        comps = m.u_components
        u = []
        while len(u) < 100:
            x = rng.uniform(comps[0][0] - 5, comps[-1][1] + 5)
            if all(not s - 1e-3 <= x <= t + 1e-3 for s, t in comps):
                u.append(x)
        u = numpy.array(u)
        back = numpy.asarray(m.f_inverse(m.big_h(u)))
        worst_inv = max(worst_inv, float(numpy.max(numpy.abs(back - u))))
        z = rng.uniform(-5, 5, 20) + 1j * rng.uniform(1e-3, 3, 20)
        g = numpy.asarray(m.fixed_point_g(z))
        res = numpy.abs(g - stieltjes(m.nu, z - m.sigma ** 2 * g))
        worst_fp = max(worst_fp, float(res.max()))
    ok = worst_inv <= 1e-10 and worst_fp <= 1e-12
    assert record(6, ok, f'max |f_inverse(H(u)) - u| = {worst_inv:.1e} <= 1e-10, '
                         f'max fixed-point residual = {worst_fp:.1e} <= 1e-12')


# Monte-Carlo, n = 2000, 10 seeds

def test_criterion_07_outlier(mc):
    run = mc('delta0_spiked')
    errs = [abs(e[0] - 2.5) for e in run['eigs']]
    med = statistics.median(errs)
    ok = med <= 0.1 and len(errs) == 10
    assert record(7, ok, f'median |lambda_1 - 2.5| = {med:.4f} <= 0.1 '
                         f'(max {max(errs):.4f}, seeds {MC_SEED}..{MC_SEED + 9})')


def test_criterion_08_edge_sticking(mc):
    run = mc('delta0_spiked')
    edge = [p for p in run['predictions'] if p.theta == 0.5][0]
    assert edge.ranks == [2] and edge.case_tag.kind == 'edge_right'
    errs = [abs(e[1] - 2.0) for e in run['eigs']]
    med = statistics.median(errs)
    ok = med <= 0.15
    assert record(8, ok, f'median |lambda_2 - 2| = {med:.4f} <= 0.15 (max {max(errs):.4f})')


def test_criterion_09_bulk_quantile(mc):
    run = mc('two_atom_bulk')
    p, = run['predictions']
    assert p.case_tag.kind == 'bulk_quantile' and p.case_tag.alpha == 0.5
    rank = p.ranks[0]
    errs = [abs(e[rank - 1] - 0.0) for e in run['eigs']]
    med = statistics.median(errs)
    ok = max(errs) <= 0.15
    assert record(9, ok, f'eigenvalue at rank {rank}: max |lambda - 0| over 10 seeds = '
                         f'{max(errs):.4f} <= 0.15 (median {med:.4f}, limit {p.limit:.1e})')


def test_criterion_10_exact_separation(mc):
    run = mc('delta0_spiked')
    hits = 0
    for eigs in run['eigs']:
        sep, = check_separation(eigs, run['a'], run['model'], [(2.1, 2.4)], run['spikes'])
        hits += sep.count_m_above_b == sep.count_a_above_b_prime
    b_prime = run['model'].f_inverse(2.4)
    ok = hits >= 9
    assert record(10, ok, f'#M-eigs > 2.4 equals #A-eigs > f_inverse(2.4) = {b_prime:.4f} '
                          f'in {hits}/10 seeds (>= 9)')


def test_criterion_11_inclusion(mc):
    parts, ok = [], True
    for name in ('delta0_spiked', 'uniform_plain'):
        run = mc(name)
        clean = sum(check_inclusion(e, run['model'], run['predictions'], 0.2) == 0
                    for e in run['eigs'])
        ok &= clean >= 9
        parts.append(f'{name} {clean}/10')
    assert record(11, ok, 'seeds with no eigenvalue farther than 0.2 from support '
                          'and outliers: ' + ', '.join(parts) + ' (>= 9 each)')


def test_criterion_12_global_law(mc):
    run = mc('uniform_plain')
    ks = [ks_distance(e, run['model']) for e in run['eigs']]
    plain = mc('delta0_plain')
    ks0 = ks_distance(plain['eigs'][0], plain['model'])
    ok = max(ks) <= 0.05 and ks0 <= 0.05
    assert record(12, ok, f'KS distance, Uniform[-1,1]: max over 10 seeds {max(ks):.4f}; '
                          f'delta_0: {ks0:.4f} (<= 0.05)')


def test_criterion_13_unspiked_extremes(mc):
    run = mc('uniform_plain')
    edge = math.sqrt(2) + math.log(1 + math.sqrt(2))
    errs = [abs(e[0] - edge) for e in run['eigs']]
    low = [abs(e[-1] + edge) for e in run['eigs']]
    med = statistics.median(errs)
    ok = med <= 0.15
    assert record(13, ok, f'median |lambda_1 - 2.295587| = {med:.4f} <= 0.15 '
                          f'(lambda_N: median {statistics.median(low):.4f})')


def test_criterion_14_determinism(tmp_path):
    cfg = {'n': 300, 'dist': {'tag': 'gaussian', 'variance': 1.0},
           'measure': {'pieces': [{'kind': 'atom', 'x': 0.0, 'w': 1.0}]},
           'spikes': [[2.0, 1], [0.5, 1]], 'seed': 42, 'trials': 3,
           'gaps': [[2.1, 2.4]]}
    path = tmp_path / 'cfg.json'
    path.write_text(json.dumps(cfg))
    texts = []
    for i, extra in enumerate(([], ['--workers', '3'], [])):
        out = tmp_path / f'r{i}.json'
        main(['verify', '--config', str(path), '--out', str(out), *extra])
        texts.append(out.read_text())

    def strip(text):
        return ''.join(l for l in text.splitlines(True) if not l.lstrip().startswith('"created"'))

    stripped = [strip(t) for t in texts]
    ok = stripped[0] == stripped[1] == stripped[2] and texts[0] != stripped[0]
    assert record(14, ok, f'3 verify runs (seed 42, 1 and 3 workers) byte-identical '
                          f'apart from the timestamp ({len(stripped[0])} bytes)')


def test_cli_acceptance_scenario_passes(mc):
    # the delta_0 scenario of criteria 7, 8, 10, 11 through `verify` exits 0
    run = mc('delta0_spiked')
    assert run['exit_code'] == EXIT_OK, run['report']['checks']
    assert run['report']['passed']
    assert run['report']['seeds'] == list(range(MC_SEED, MC_SEED + 10))
