"""
Command-line front end.

Matrices are read from JSON documents ``{"dim": n, "data": [[re, im], ...]}``
with ``n*n`` row-major entries. Results are written to standard output as
JSON with floats rounded to 12 significant digits; curves are CSV.

Exit status: 0 on success, 1 on a domain error or failed check, 2 on a
usage or parse error.
"""
import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from .conditional import factorization_check, fit_conditional, joint_fit
from .errors import LazyEnsembleError, ParseError
from .inverse import Gauge, ensemble_from_temperature, fit_temperature
from .partition import log_partition, mean_occupations, partition_contour
from .qubit import qubit_delta, qubit_inverse_delta, qubit_log_partition
from .sampler import (RandomStream, empirical_density_matrix, estimate_entropy,
                      predicted_acceptance, sample_haar, sample_lazy)
from .spectra import as_hermitian, expectation, validate_density

DIGITS = 12


def parse_matrix(text, density=False):
    """Parse a matrix document; validate as Hermitian or as a density matrix.

    A document carrying a nested ``temperature`` matrix (the output of
    ``fit``) is read through to that matrix.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError('not a JSON document: %s' % e) from None
    if isinstance(doc, dict) and isinstance(doc.get('temperature'), dict):
        doc = doc['temperature']
    if not isinstance(doc, dict) or 'dim' not in doc or 'data' not in doc:
        raise ParseError('matrix document needs "dim" and "data" fields')
    n, data = doc['dim'], doc['data']
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError('"dim" must be a positive integer, got %r' % (n,))
    if not isinstance(data, list) or len(data) != n * n:
        raise ParseError('"data" must hold %d [re, im] pairs' % (n * n))
    entries = []
    for k, pair in enumerate(data):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
            raise ParseError('entry (%d, %d) is not a [re, im] pair of numbers: %r'
                             % (k // n, k % n, pair))
        entries.append(complex(pair[0], pair[1]))
    m = np.array(entries, dtype=complex).reshape(n, n)
    return validate_density(m) if density else as_hermitian(m)


def matrix_document(m):
    m = np.asarray(m, dtype=complex)
    return {'dim': int(m.shape[0]),
            'data': [[z.real, z.imag] for z in m.ravel()]}


def _fmt(x):
    return float('%.*g' % (DIGITS, x))


def render(obj):
    """Round floats recursively for deterministic output."""
    if isinstance(obj, dict):
        return {k: render(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [render(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return render(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _fmt(x) if math.isfinite(x) else str(x)
    if isinstance(obj, Gauge):
        return obj.value
    return obj


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise ParseError('cannot read %s: %s' % (path, e.strerror)) from None


def _ensemble_summary(ens):
    return {
        'dim': ens.dim,
        'gauge': ens.gauge.value if ens.gauge else None,
        'temperature': matrix_document(ens.temperature),
        'nodes': ens.nodes,
        'occupations': ens.occupations,
        'log_z': ens.log_z,
        'entropy': ens.entropy,
    }


def cmd_fit(args):
    rho = parse_matrix(_read(args.rho), density=True)
    ens = fit_temperature(rho, Gauge(args.gauge), args.tol)
    out = {'command': 'fit'}
    out.update(_ensemble_summary(ens))
    out.update(iterations=ens.iterations, residual=ens.residual, tol=args.tol)
    return out, 0


def cmd_eval(args):
    ens = ensemble_from_temperature(parse_matrix(_read(args.temperature)))
    out = {'command': 'eval'}
    out.update(_ensemble_summary(ens))
    out['density_matrix'] = matrix_document(ens.target.matrix)
    return out, 0


def cmd_sample(args):
    rho = parse_matrix(_read(args.rho), density=True)
    ens = fit_temperature(rho)
    stream = RandomStream(args.seed)
    batch = sample_lazy(ens, args.count, stream)
    emp = empirical_density_matrix(batch)
    # entrywise standard error of the projector average
    s = batch.states
    proj = np.einsum('ki,kj->kij', s, s.conj())
    se = np.max(np.std(proj, axis=0, ddof=1)) / math.sqrt(batch.accepted) if batch.accepted > 1 else float('inf')
    p = predicted_acceptance(ens)
    est, est_se = estimate_entropy(batch, ens)
    if args.out:
        with open(args.out, 'w', newline='') as fh:
            w = csv.writer(fh)
            for psi in batch.states:
                w.writerow(['%.17g' % v for v in np.column_stack([psi.real, psi.imag]).ravel()])
    return {
        'command': 'sample',
        'dim': ens.dim,
        'seed': args.seed,
        'acceptance': {
            'proposed': batch.proposed,
            'accepted': batch.accepted,
            'rate': batch.acceptance_rate,
            'predicted': p,
            'binomial_sigma': math.sqrt(p * (1 - p) / batch.proposed),
        },
        'empirical_density_matrix': matrix_document(emp.matrix),
        'max_deviation': float(np.max(np.abs(emp.matrix - rho.matrix))),
        'max_standard_error': se,
        'entropy': {'estimate': est, 'standard_error': est_se, 'analytic': ens.entropy},
        'states_file': args.out,
    }, 0


def _check(name, value, tolerance, **extra):
    d = {'name': name, 'value': value, 'tolerance': tolerance,
         'passed': bool(value <= tolerance)}
    d.update(extra)
    return d


def verify_temperature(b_matrix, mc_samples=100000, contour_points=512, seed=0):
    """Run every oracle on a temperature matrix; returns a list of checks."""
    h = as_hermitian(b_matrix)
    nodes = np.linalg.eigvalsh(h)
    n = nodes.size
    log_z = log_partition(nodes)
    lam = mean_occupations(nodes)
    checks = []

    zc = partition_contour(nodes, contour_points)
    checks.append(_check('contour_vs_divided_difference',
                         abs(math.log(zc) - log_z) if zc > 0 else float('inf'), 1e-8,
                         contour_z=zc, log_z=log_z))

    step = 1e-5
    grad = np.array([-(log_partition(nodes + step * e) - log_partition(nodes - step * e))
                     / (2 * step) for e in np.eye(n)])
    checks.append(_check('occupations_vs_finite_differences',
                         float(np.max(np.abs(grad - lam))), 1e-6))

    checks.append(_check('occupations_sum', abs(float(lam.sum()) - 1.0), 1e-10))

    if mc_samples:
        # Z(b - b_min) = E_haar[exp(-(<psi|B|psi> - b_min))]
        psi = sample_haar(n, RandomStream(seed), mc_samples)
        w = np.exp(-(expectation(h, psi) - nodes[0]))
        est = float(w.mean())
        se = float(w.std(ddof=1) / math.sqrt(mc_samples))
        exact = math.exp(log_z + nodes[0])
        dev = abs(est - exact) / se if se > 0 else (0.0 if abs(est - exact) < 1e-12 else float('inf'))
        checks.append(_check('monte_carlo_partition_sigmas', dev, 4.0,
                             estimate=est, standard_error=se, exact=exact))

    if n == 2:
        beta = 0.5 * (nodes[1] - nodes[0])
        shift = 0.5 * (nodes[1] + nodes[0])
        ref = qubit_log_partition(beta) - shift
        checks.append(_check('qubit_log_partition', abs(ref - log_z), 1e-10 * max(1.0, abs(ref))))
        d = qubit_delta(beta)
        checks.append(_check('qubit_occupations',
                             float(np.max(np.abs(lam - [0.5 + d, 0.5 - d]))), 1e-10))
    return checks


def cmd_verify(args):
    b = parse_matrix(_read(args.temperature))
    checks = verify_temperature(b, args.mc_samples, args.contour_points, args.seed)
    ok = all(c['passed'] for c in checks)
    return {'command': 'verify', 'dim': b.shape[0], 'checks': checks, 'passed': ok}, 0 if ok else 1


def qubit_curve(lo=-6.0, hi=6.0, steps=241, inverse=False):
    """Rows of ``(beta, delta(beta))`` or, inverted, ``(delta, f(delta))``."""
    if steps < 2 or not lo < hi:
        raise ValueError('need steps >= 2 and min < max')
    grid = np.linspace(lo, hi, steps)
    if inverse:
        if max(abs(lo), abs(hi)) >= 0.5:
            raise ValueError('inverse curve needs |delta| < 1/2')
        return ('delta', 'beta'), [(x, qubit_inverse_delta(x)) for x in grid]
    return ('beta', 'delta'), [(x, qubit_delta(x)) for x in grid]


def cmd_qubit_curve(args):
    lo = args.min if args.min is not None else (-0.49 if args.inverse else -6.0)
    hi = args.max if args.max is not None else (0.49 if args.inverse else 6.0)
    header, rows = qubit_curve(lo, hi, args.steps, args.inverse)
    w = csv.writer(args.stdout, lineterminator='\n')
    w.writerow(header)
    for x, y in rows:
        w.writerow(['%.*g' % (DIGITS, x), '%.*g' % (DIGITS, y)])
    return None, 0


def cmd_conditional(args):
    h = parse_matrix(_read(args.observable))
    ens = fit_conditional(h, args.target, args.tol)
    return {'command': 'conditional', 'dim': ens.observable.dim,
            'spectrum': ens.observable.spectrum, 'target': args.target,
            'beta': ens.beta, 'log_z': ens.log_z, 'mean': ens.mean}, 0


def cmd_equalize(args):
    a = fit_conditional(parse_matrix(_read(args.observable_a)), args.target_a, args.tol)
    b = fit_conditional(parse_matrix(_read(args.observable_b)), args.target_b, args.tol)
    joint = joint_fit(a, b, args.tol)
    lo, hi = sorted((a.beta, b.beta))
    between = bool(lo - 1e-9 <= joint.beta <= hi + 1e-9)
    rep = factorization_check(a.observable, b.observable, joint.beta,
                              args.mc_samples, RandomStream(args.seed))
    fact = {'residual': rep.residual, 'log_z': rep.log_z}
    if rep.mc_samples:
        fact.update(mc_estimate=rep.mc_estimate, mc_standard_error=rep.mc_stderr,
                    mc_samples=rep.mc_samples, mc_sigmas=rep.mc_deviation)
    fact['passed'] = rep.passed()
    ok = between and fact['passed']
    return {'command': 'equalize', 'beta_a': a.beta, 'beta_b': b.beta,
            'beta_joint': joint.beta, 'mean_a': a.mean, 'mean_b': b.mean,
            'joint_mean': joint.mean, 'joint_log_z': joint.log_z,
            'between': between, 'factorization': fact, 'passed': ok}, 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog='lazy-ensembles',
                                description='Lazy continuous ensembles of pure states.')
    p.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = p.add_subparsers(dest='command', required=True)

    s = sub.add_parser('fit', help='fit the temperature matrix to a density matrix')
    s.add_argument('rho')
    s.add_argument('--gauge', choices=[g.value for g in Gauge], default=Gauge.TRACE_ZERO.value)
    s.add_argument('--tol', type=float, default=1e-10)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser('eval', help='partition function and occupations of a temperature matrix')
    s.add_argument('temperature')
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser('sample', help='sample the lazy ensemble of a density matrix')
    s.add_argument('rho')
    s.add_argument('--count', type=int, required=True)
    s.add_argument('--seed', type=int, required=True)
    s.add_argument('--out')
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser('verify', help='cross-check the partition function oracles')
    s.add_argument('temperature')
    s.add_argument('--mc-samples', type=int, default=100000)
    s.add_argument('--contour-points', type=int, default=512)
    s.add_argument('--seed', type=int, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser('qubit-curve', help='tabulate delta(beta) or its inverse as CSV')
    s.add_argument('--min', type=float)
    s.add_argument('--max', type=float)
    s.add_argument('--steps', type=int, default=241)
    s.add_argument('--inverse', action='store_true')
    s.set_defaults(func=cmd_qubit_curve)

    s = sub.add_parser('conditional', help='fit beta for a scalar mean constraint')
    s.add_argument('observable')
    s.add_argument('--target', type=float, required=True)
    s.add_argument('--tol', type=float, default=1e-10)
    s.set_defaults(func=cmd_conditional)

    s = sub.add_parser('equalize', help='joint beta of two non-interacting systems')
    s.add_argument('observable_a')
    s.add_argument('observable_b')
    s.add_argument('--target-a', type=float, required=True)
    s.add_argument('--target-b', type=float, required=True)
    s.add_argument('--tol', type=float, default=1e-10)
    s.add_argument('--mc-samples', type=int, default=100000)
    s.add_argument('--seed', type=int, default=0)
    s.set_defaults(func=cmd_equalize)
    return p


def run(argv=None, stdout=None):
    """Dispatch one invocation; returns the exit status."""
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    args.stdout = stdout
    try:
        doc, status = args.func(args)
    except ParseError as e:
        doc, status = {'error': 'ParseError', 'message': str(e)}, 2
    except (ValueError, LazyEnsembleError) as e:
        doc, status = {'error': type(e).__name__, 'message': str(e)}, 1
    if doc is not None:
        json.dump(render(doc), stdout, indent=2)
        stdout.write('\n')
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == '__main__':
    main()
