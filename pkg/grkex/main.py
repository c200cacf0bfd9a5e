#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Main entry point for grkex.

This module provides command-line argument parsing, logging setup and the
dispatch from subcommands to their handlers in commands.py.
"""

import sys
import logging
import argparse
from typing import List, Optional

from . import commands
from .config import load_config
from .errors import GRKexError
from .utils import resolve_seed

# Initialize logger
logger = logging.getLogger("grkex")


def setup_logging(level_name: str, log_file: Optional[str] = None) -> None:
    """
    Set up logging configuration.

    Args:
        level_name (str): Logging level name
        log_file (str, optional): Also log to this file
    """
    level_map = {
        'debug': logging.DEBUG,
        'info': logging.INFO,
        'warning': logging.WARNING,
        'error': logging.ERROR,
        'critical': logging.CRITICAL
    }

    level = level_map.get(str(level_name).lower(), logging.INFO)

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True
    )


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--seed', type=int,
                        help='Random seed (default: GRKEX_SEED, else fresh entropy)')
    parent.add_argument('-c', '--config', type=str,
                        help='Path to configuration file')
    parent.add_argument('-v', '--verbose', action='store_true',
                        help='Enable verbose logging')
    parent.add_argument('--out', type=str,
                        help='Output file (default: stdout)')
    parent.add_argument('--format', choices=['csv', 'json'], default='json',
                        help='Report format (default: json)')
    return parent


def _params_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--n', type=int, help='Coefficient modulus n (default: 7)')
    parent.add_argument('--m', type=int, help='Symmetric group degree m (default: 5)')
    parent.add_argument('--k', type=int, help='Matrix dimension k (default: 3)')
    return parent


def _exponent_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--exp-lo', type=str,
                        help='Smallest private exponent (default: 10^22)')
    parent.add_argument('--exp-hi', type=str,
                        help='Largest private exponent (default: 10^28)')
    parent.add_argument('--fast', action='store_true',
                        help='Use the shrunk exponent ranges for quick runs')
    return parent


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with all subcommands.

    Returns:
        argparse.ArgumentParser: The parser
    """
    common = _common_parent()
    params = _params_parent()
    exponents = _exponent_parent()

    parser = argparse.ArgumentParser(
        prog='grkex',
        description='grkex - key exchange over matrices over the group ring Z_n[S_m]'
    )
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('keygen', parents=[common, params],
                       help='Generate a public base matrix M')
    p.add_argument('--structured', action='store_true',
                   help='Use M = M1*S instead of a uniformly random matrix')
    p.add_argument('--armor', action='store_true', help='Write lowercase hex instead of binary')
    p.set_defaults(handler=commands.cmd_keygen)

    p = sub.add_parser('pubkey', parents=[common, params, exponents],
                       help='Draw a private exponent and compute the public key M^a')
    p.add_argument('--base', required=True, help='Key file holding the base matrix M')
    p.add_argument('--secret-out', required=True, help='File receiving the private exponent')
    p.add_argument('--armor', action='store_true', help='Write lowercase hex instead of binary')
    p.set_defaults(handler=commands.cmd_pubkey)

    p = sub.add_parser('shared', parents=[common],
                       help='Derive the shared secret from a peer public key')
    p.add_argument('--peer', required=True, help="Key file holding the peer's public key")
    p.add_argument('--secret', required=True, help='File holding our private exponent')
    p.add_argument('--armor', action='store_true', help='Write lowercase hex instead of binary')
    p.set_defaults(handler=commands.cmd_shared)

    p = sub.add_parser('demo', parents=[common, params, exponents],
                       help='Run a two-party exchange in one process')
    p.add_argument('--structured', action='store_true',
                   help='Use M = M1*S instead of a uniformly random matrix')
    p.set_defaults(handler=commands.cmd_demo)

    bench = sub.add_parser('bench', help='Benchmarks').add_subparsers(dest='bench_command',
                                                                      metavar='BENCH')
    bench.required = True
    p = bench.add_parser('pow', parents=[common, params], help='Time matrix exponentiation')
    p.add_argument('--exp-digits', type=int, help='Decimal digits of the exponent (default: 100)')
    p.add_argument('--reps', type=int, help='Repetitions (default: 250)')
    p.add_argument('--grid', action='store_true',
                   help='Sweep k in {2,3} and n in {2,3,5,7}')
    p.set_defaults(handler=commands.cmd_bench_pow)

    ddh = sub.add_parser('ddh', help='Decision Diffie-Hellman experiments').add_subparsers(
        dest='ddh_command', metavar='EXPERIMENT')
    ddh.required = True
    for name, help_text in (('exp1', 'Compare M^ab with M^c'),
                            ('exp2', 'Compare M^a with a random matrix N'),
                            ('exp3', 'Residue triples of (M^a, M^b, M^ab)')):
        p = ddh.add_parser(name, parents=[common, params, exponents], help=help_text)
        p.add_argument('--trials', type=int, help='Number of trials')
        p.add_argument('--workers', type=int, help='Worker processes (default: 1)')
        p.add_argument('--tables-out', type=str, help='CSV file for the count tables')
        if name == 'exp3':
            p.add_argument('--batches', type=int, help='Independent batches (default: 1)')
            p.add_argument('--refresh-base', action='store_true',
                           help='Draw a new base matrix for every batch')
        else:
            p.add_argument('--qq-out', type=str, help='CSV file for the Q-Q pairs')
        p.set_defaults(handler=commands.cmd_ddh, experiment=name)

    p = sub.add_parser('support-prob', parents=[common, params],
                       help='Probability that a random element has support in [lo, hi]')
    p.add_argument('--lo', type=int, default=50, help='Smallest support size (default: 50)')
    p.add_argument('--hi', type=int, default=70, help='Largest support size (default: 70)')
    p.add_argument('--samples', type=int, default=0,
                   help='Also estimate by sampling this many elements')
    p.set_defaults(handler=commands.cmd_support_prob)

    orbit = sub.add_parser('orbit', help='Orbit searches').add_subparsers(dest='orbit_command',
                                                                          metavar='ORBIT')
    orbit.required = True
    p = orbit.add_parser('scan', parents=[common, params],
                         help='Floyd cycle detection on the powers of a sampled matrix')
    p.add_argument('--kind', choices=['random', 'invertible', 'structured', 'scalar'],
                   default='random',
                   help='How to sample the matrix (default: random)')
    p.add_argument('--budget', type=int, help='Maximum matrix products')
    p.add_argument('--wall', type=float, help='Wall-clock cap in seconds')
    p.set_defaults(handler=commands.cmd_orbit_scan)

    p = sub.add_parser('order', parents=[common, params],
                       help='Order of a sampled invertible matrix')
    p.add_argument('--budget', type=int, help='Largest exponent to try')
    p.add_argument('--wall', type=float, help='Wall-clock cap in seconds')
    p.add_argument('--factors', type=int, default=20,
                   help='Triangular factors in the sampled matrix (default: 20)')
    p.set_defaults(handler=commands.cmd_order)

    p = sub.add_parser('bsgs', parents=[common, params],
                       help='Baby-step giant-step on a random toy instance')
    p.add_argument('--bound', type=int, required=True, help='Largest exponent searched')
    p.add_argument('--entry-cap', type=int, help='Largest baby-step table allowed')
    p.set_defaults(handler=commands.cmd_bsgs)

    challenge = sub.add_parser('challenge', help='Challenge matrix files').add_subparsers(
        dest='challenge_command', metavar='ACTION')
    challenge.required = True
    for name, handler, help_text in (
            ('check', commands.cmd_challenge_check, 'Load and validate the three matrices'),
            ('roundtrip', commands.cmd_challenge_roundtrip,
             'Write canonical files and reload them')):
        p = challenge.add_parser(name, parents=[common], help=help_text)
        p.add_argument('--m', dest='m_path', required=True, help='File holding M')
        p.add_argument('--ma', dest='ma_path', required=True, help='File holding M^a')
        p.add_argument('--mb', dest='mb_path', required=True, help='File holding M^b')
        if name == 'roundtrip':
            p.add_argument('--out-dir', type=str,
                           help='Directory for the canonical files (default: temporary)')
        p.set_defaults(handler=handler)

    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command line arguments.

    Returns:
        argparse.Namespace: Parsed arguments
    """
    return build_parser().parse_args(argv)


def run(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        int: 0 on success, 1 on a domain or I/O error, 2 on a usage error
    """
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    config = load_config(args.config)
    log_level = 'debug' if args.verbose else config['logging']['level']
    setup_logging(log_level, config['logging'].get('file'))

    try:
        seed = resolve_seed(args.seed)
        return args.handler(args, config, seed)
    except (GRKexError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    """Main entry point for the command-line tool."""
    try:
        sys.exit(run(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(130)
