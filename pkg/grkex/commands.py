#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Command handlers for grkex.

Each handler receives the parsed arguments, the loaded configuration and the
run seed, writes its report and returns the process exit code.
"""

import os
import csv
import json
import logging
import tempfile
from argparse import Namespace
from typing import Any, Dict, List, Tuple

from .errors import EncodingError, ParameterError
from .config import exponent_range
from .utils import artifact_header, format_float, make_rng, open_output, read_bytes
from .algebra.group_ring import get_context
from .algebra.matrix_semigroup import (
    MatrixGR,
    exponent_value,
    mat_pow,
    mat_random,
    mat_random_invertible,
    mat_scalar_S,
    mat_support_sizes,
)
from .kex_protocol import (
    KEY_MAGIC,
    KexParams,
    KexSession,
    base_random,
    base_structured,
    kex_shared,
    key_decode,
    key_encode,
    key_fingerprint,
    key_from_hex,
    key_to_hex,
    sample_range,
)
from . import analysis
from .bench import bench_grid, bench_pow
from .orbit_search import bsgs_search, orbit_detect, order_scan
from .challenge_io import challenge_format_matrix, challenge_load, challenge_parse_matrix, challenge_save

# Initialize logger
logger = logging.getLogger("grkex.commands")

STREAM_KEYGEN = 21
STREAM_EXPONENT = 22
STREAM_DEMO = 23
STREAM_ORBIT = 24
STREAM_ORDER = 25
STREAM_BSGS = 26
STREAM_SUPPORT = 27


def _params(args: Namespace, config: Dict[str, Any], exponents: bool = False) -> KexParams:
    """KexParams from flags, falling back to the configuration."""
    section = config['params']
    n = args.n if args.n is not None else section['n']
    m = args.m if args.m is not None else section['m']
    k = args.k if getattr(args, 'k', None) is not None else section['k']
    if not exponents:
        return KexParams(n=n, m=m, k=k)
    lo, hi = exponent_range(config, getattr(args, 'fast', False), 'private')
    if getattr(args, 'exp_lo', None) is not None:
        lo = exponent_value(args.exp_lo)
    if getattr(args, 'exp_hi', None) is not None:
        hi = exponent_value(args.exp_hi)
    return KexParams(n=n, m=m, k=k, exp_lo=lo, exp_hi=hi)


def _header(params: KexParams, **extra) -> Dict[str, Any]:
    fields = {'n': params.n, 'm': params.m, 'k': params.k}
    fields.update(extra)
    return fields


def _flag(value: Any, default: Any) -> Any:
    """The flag value if it was given, else the configured default; 0 counts as given."""
    return value if value is not None else default


def _print_seed(seed: int) -> None:
    print(f"seed: {seed}")


def _emit_records(args: Namespace, seed: int, header: Dict[str, Any],
                  records: List[Dict[str, Any]]) -> None:
    """Write result records as JSON lines or CSV, preceded by the artifact header."""
    with open_output(args.out) as handle:
        handle.write(artifact_header(seed, header) + "\n")
        if args.format == 'json':
            for record in records:
                handle.write(json.dumps(record, sort_keys=True) + "\n")
            return
        if not records:
            return
        writer = csv.writer(handle, lineterminator="\n")
        columns = list(dict.fromkeys(c for record in records for c in record))
        writer.writerow(columns)
        for record in records:
            writer.writerow([format_float(v) if isinstance(v, float) else v
                             for v in (record.get(c, "") for c in columns)])


def _write_key(path: str, data: bytes, armor: bool) -> None:
    if armor or path in (None, "-"):
        with open_output(path) as handle:
            handle.write(key_to_hex(data) + "\n")
    else:
        with open_output(path, binary=True) as handle:
            handle.write(data)


def _read_key(path: str) -> Tuple[MatrixGR, KexParams]:
    data = read_bytes(path)
    if not data.startswith(KEY_MAGIC):
        data = key_from_hex(data.decode('ascii', errors='replace'))
    return key_decode(data)


def _sample_base(params: KexParams, rng, structured: bool) -> MatrixGR:
    return base_structured(params, rng) if structured else base_random(params, rng)


def cmd_keygen(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Write a fresh base matrix M as a key file."""
    params = _params(args, config)
    _print_seed(seed)
    base = _sample_base(params, make_rng(seed, STREAM_KEYGEN), args.structured)
    _write_key(args.out, key_encode(base, params), args.armor)
    print(f"base: {key_fingerprint(base)}")
    return 0


def cmd_pubkey(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Draw a private exponent for a base matrix and write the public key M^a."""
    base, key_params = _read_key(args.base)
    flags = _params(args, config, exponents=True)
    params = key_params.with_range(flags.exp_lo, flags.exp_hi)
    _print_seed(seed)
    session = KexSession.start(params, base, make_rng(seed, STREAM_EXPONENT))
    with open(args.secret_out, 'w', encoding='utf-8') as f:
        f.write(f"{session.my_exponent}\n")
    _write_key(args.out, key_encode(session.my_public, params), args.armor)
    print(f"public: {key_fingerprint(session.my_public)}")
    return 0


def cmd_shared(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Derive K from a peer public key and our private exponent."""
    peer, params = _read_key(args.peer)
    with open(args.secret, 'r', encoding='utf-8') as f:
        exponent = exponent_value(f.read())
    _print_seed(seed)
    shared = kex_shared(peer, exponent, params)
    if args.out:
        _write_key(args.out, key_encode(shared, params), args.armor)
    print(f"shared: {key_fingerprint(shared)}")
    return 0


def cmd_demo(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Alice and Bob in one process; both secrets must agree."""
    params = _params(args, config, exponents=True)
    _print_seed(seed)
    print(f"params: n={params.n} m={params.m} k={params.k} "
          f"exponents=[{params.exp_lo}, {params.exp_hi}]")
    base = _sample_base(params, make_rng(seed, STREAM_DEMO, 0), args.structured)
    alice = KexSession.start(params, base, make_rng(seed, STREAM_DEMO, 1))
    bob = KexSession.start(params, base, make_rng(seed, STREAM_DEMO, 2))
    print(f"base:         {key_fingerprint(base)}")
    print(f"alice public: {key_fingerprint(alice.my_public)}")
    print(f"bob public:   {key_fingerprint(bob.my_public)}")
    alice_shared = alice.complete(bob.my_public)
    bob_shared = bob.complete(alice.my_public)
    print(f"alice shared: {key_fingerprint(alice_shared)}")
    print(f"bob shared:   {key_fingerprint(bob_shared)}")
    if alice_shared != bob_shared:
        logger.error("Shared secrets differ")
        return 1
    print("shared secrets match")
    return 0


def cmd_bench_pow(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Mean and spread of exponentiation time, with key sizes."""
    params = _params(args, config)
    digits = _flag(args.exp_digits, config['bench']['exp_digits'])
    reps = _flag(args.reps, config['bench']['reps'])
    _print_seed(seed)
    if args.grid:
        results = bench_grid((2, 3), (2, 3, 5, 7), (digits,), params.m, reps, seed)
    else:
        results = [bench_pow(params.n, params.m, params.k, digits, reps, seed)]
    _emit_records(args, seed, _header(params, exp_digits=digits, reps=reps),
                  [r.to_record() for r in results])
    return 0


def _chi_square(table) -> Dict[str, Any]:
    try:
        result = analysis.chi_square_uniform(table.counts)
    except ParameterError as e:
        logger.warning(f"Chi-square test skipped: {e}")
        return {'statistic': None, 'dof': None, 'p_value': None}
    return result._asdict()


def cmd_ddh(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Run one of the three decision Diffie-Hellman experiments."""
    params = _params(args, config, exponents=True)
    experiments = config['experiments']
    trials = _flag(args.trials, experiments[f"{args.experiment}_trials"])
    workers = _flag(args.workers, experiments['workers'])
    wide = exponent_range(config, args.fast, 'wide')
    p_threshold = experiments['p_threshold']
    _print_seed(seed)
    header = _header(params, experiment=args.experiment, trials=trials)

    if args.experiment == 'exp3':
        batches = _flag(args.batches, experiments['batches'])
        tables = analysis.exp_triples_batches(params, trials, seed, batches=batches,
                                              fixed_base=not args.refresh_base, workers=workers)
        named = {f"batch{i}": t for i, t in enumerate(tables)}
        if args.tables_out:
            with open_output(args.tables_out) as handle:
                analysis.write_triples_csv(handle, tables, seed, header)
        qq = None
    else:
        if args.experiment == 'exp1':
            first, second = analysis.exp_ddh_product(params, trials, seed, wide, workers)
            named = {'M^ab': first, 'M^c': second}
        else:
            first, second = analysis.exp_uniformity(params, trials, seed, wide, workers)
            named = {'M^a': first, 'N': second}
        if args.tables_out:
            with open_output(args.tables_out) as handle:
                analysis.write_frequency_csv(handle, named, seed, header)
        pairs = analysis.qq_pairs(first, second)
        if args.qq_out:
            with open_output(args.qq_out) as handle:
                analysis.write_qq_csv(handle, pairs, seed, header)
        qq = analysis.qq_max_deviation(pairs)

    records = []
    for name, table in named.items():
        record = {'table': name, 'trials': table.trials}
        record.update(_chi_square(table))
        record['passed'] = None if record['p_value'] is None else record['p_value'] >= p_threshold
        records.append(record)
    if qq is not None:
        records.append({'table': 'qq', 'trials': trials, 'max_deviation': qq,
                        'passed': qq <= experiments['qq_threshold']})
    _emit_records(args, seed, header, records)
    return 0


def cmd_support_prob(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Exact (and optionally sampled) support-size probability; defaults to Z_2[S_5]."""
    n = args.n if args.n is not None else 2
    m = args.m if args.m is not None else 5
    exact = analysis.binom_support_prob(m, n, args.lo, args.hi)
    record = {'n': n, 'm': m, 'lo': args.lo, 'hi': args.hi, 'exact': exact}
    if args.samples:
        rng = make_rng(seed, STREAM_SUPPORT)
        record['samples'] = args.samples
        record['monte_carlo'] = analysis.support_monte_carlo(get_context(n, m), args.samples,
                                                             rng, args.lo, args.hi)
    _print_seed(seed)
    _emit_records(args, seed, {'n': n, 'm': m}, [record])
    return 0


def _search_limits(args: Namespace, config: Dict[str, Any]) -> Tuple[int, float]:
    budget = _flag(args.budget, config['search']['budget'])
    wall = args.wall if args.wall is not None else config['search']['wall_seconds']
    return budget, wall


def cmd_orbit_scan(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Floyd search on the powers of one sampled matrix."""
    params = _params(args, config)
    budget, wall = _search_limits(args, config)
    rng = make_rng(seed, STREAM_ORBIT)
    ctx = params.context()
    if args.kind == 'invertible':
        matrix, _ = mat_random_invertible(ctx, params.k, rng)
    elif args.kind == 'structured':
        matrix = base_structured(params, rng)
    elif args.kind == 'scalar':
        matrix = mat_scalar_S(ctx, params.k)
    else:
        matrix = mat_random(ctx, params.k, rng)
    _print_seed(seed)
    result = orbit_detect(matrix, budget, wall)
    _emit_records(args, seed, _header(params, kind=args.kind, budget=budget), [result.to_record()])
    return 0


def cmd_order(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Order (and first diagonal power) of a sampled invertible matrix."""
    params = _params(args, config)
    budget, wall = _search_limits(args, config)
    matrix, _ = mat_random_invertible(params.context(), params.k, make_rng(seed, STREAM_ORDER),
                                      args.factors)
    _print_seed(seed)
    result = order_scan(matrix, budget, wall)
    _emit_records(args, seed, _header(params, budget=budget, factors=args.factors),
                  [result.to_record()])
    return 0


def cmd_bsgs(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Solve M^x = A for a random M and a hidden x in [1, bound]."""
    params = _params(args, config)
    cap = _flag(args.entry_cap, config['search']['bsgs_entry_cap'])
    rng = make_rng(seed, STREAM_BSGS)
    base = mat_random(params.context(), params.k, rng)
    target = mat_pow(base, sample_range(1, args.bound, rng))
    _print_seed(seed)
    result = bsgs_search(base, target, args.bound, cap)
    record = result.to_record()
    record['bound'] = args.bound
    record['verified'] = result.found and mat_pow(base, result.exponent) == target
    _emit_records(args, seed, _header(params, bound=args.bound), [record])
    return 0


def _challenge_report(challenge) -> Dict[str, Any]:
    report: Dict[str, Any] = {'duplicates': [list(pair) for pair in challenge.duplicate_pairs()]}
    roundtrip = True
    for name in ('M', 'Ma', 'Mb'):
        matrix = getattr(challenge, name)
        again = challenge_parse_matrix(challenge_format_matrix(matrix))
        roundtrip = roundtrip and again == matrix
        report[f"{name}_support"] = mat_support_sizes(matrix).tolist()
    report['roundtrip'] = roundtrip
    return report


def cmd_challenge_check(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Load the three challenge matrices and check they round-trip."""
    challenge = challenge_load(args.m_path, args.ma_path, args.mb_path)
    _print_seed(seed)
    report = _challenge_report(challenge)
    _emit_records(args, seed, {'files': 3}, [report])
    return 0 if report['roundtrip'] else 1


def cmd_challenge_roundtrip(args: Namespace, config: Dict[str, Any], seed: int) -> int:
    """Write canonical challenge files, reload them and compare."""
    challenge = challenge_load(args.m_path, args.ma_path, args.mb_path)
    _print_seed(seed)
    with tempfile.TemporaryDirectory() as scratch:
        directory = args.out_dir or scratch
        os.makedirs(directory, exist_ok=True)
        paths = [os.path.join(directory, name) for name in ('M.txt', 'Ma.txt', 'Mb.txt')]
        challenge_save(challenge, *paths)
        reloaded = challenge_load(*paths)
    same = (reloaded.M, reloaded.Ma, reloaded.Mb) == (challenge.M, challenge.Ma, challenge.Mb)
    if not same:
        raise EncodingError("reloaded challenge matrices differ from the originals")
    _emit_records(args, seed, {'files': 3}, [{'roundtrip': same, 'out_dir': args.out_dir}])
    return 0
