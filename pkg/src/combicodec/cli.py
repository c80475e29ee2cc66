"""Command-line interface: encode, decode, info, selftest.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 selftest failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from gmpy2 import mpq

from . import codecs, container
from .codecs import MODEL_NAMES, CodingContext
from .errors import CombicodecError, ValidationError
from .models import Alphabet, DirichletParams, Multiset, SourceDistribution
from .selftest import run_selftest

_SEQUENCE_MODELS = ("seq", "adaptive_seq", "perm", "trunc_perm")
_MULTISET_MODELS = ("multiset", "uniform_ms", "adaptive_ms", "comb")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read_tokens(path: str) -> list[str]:
    return Path(path).read_text(encoding="utf-8").split()


def _read_alphabet(path: str) -> Alphabet:
    return Alphabet(_read_tokens(path))


def _read_dist(path: str, alphabet: Alphabet) -> SourceDistribution:
    weights = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            token, weight = line.split()
            weights[token] = int(weight)
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: expected 'token weight'") from None
        if weights[token] <= 0:
            raise ValidationError(f"{path}:{lineno}: weight must be positive")
        alphabet.index(token)
    return SourceDistribution.from_weights(weights)


def _read_alpha(path: str, alphabet: Alphabet) -> DirichletParams:
    alpha = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            token, value = line.split()
            alpha[token] = mpq(value)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(
                f"{path}:{lineno}: expected 'token value' with value 'p/q' or integer"
            ) from None
        alphabet.index(token)
    return DirichletParams(alpha)


def _check_tokens(tokens, alphabet: Alphabet) -> None:
    for t in tokens:
        if t not in alphabet:
            raise ValidationError(f"token {t!r} is not in the alphabet")


def _object_from_tokens(model: str, tokens):
    return tuple(tokens) if model in _SEQUENCE_MODELS else Multiset.from_elements(tokens)


def _object_to_tokens(model: str, obj, alphabet: Alphabet):
    if model in _SEQUENCE_MODELS:
        return list(obj)
    return obj.elements(alphabet)


def _build_context(args, n: Optional[int], k: Optional[int]) -> CodingContext:
    alphabet = _read_alphabet(args.alphabet)
    model = args.model
    kwargs = {"alphabet": alphabet, "model": model, "freq_bits": args.freq_bits}
    if model in ("seq", "multiset"):
        if not args.dist:
            raise ValidationError(f"model {model!r} requires --dist")
        kwargs["source"] = _read_dist(args.dist, alphabet)
        kwargs["n"] = n
    elif model in ("adaptive_seq", "adaptive_ms"):
        if not args.alpha:
            raise ValidationError(f"model {model!r} requires --alpha")
        kwargs["prior"] = _read_alpha(args.alpha, alphabet)
        kwargs["n"] = n
    elif model == "uniform_ms":
        kwargs["n"] = n
    else:  # perm, trunc_perm, comb
        if not args.given_multiset:
            raise ValidationError(f"model {model!r} requires --given-multiset")
        tokens = _read_tokens(args.given_multiset)
        _check_tokens(tokens, alphabet)
        kwargs["given_multiset"] = Multiset.from_elements(tokens)
        if model in ("trunc_perm", "comb"):
            if k is None:
                raise ValidationError(f"model {model!r} requires --k")
            kwargs["k"] = k
    return CodingContext(**kwargs)


def _load_object(args):
    tokens = _read_tokens(args.input)
    n = len(tokens)
    k = args.k
    if args.model in ("trunc_perm", "comb"):
        if k is None:
            k = n
        elif k != n:
            raise ValidationError(f"--k {k} does not match the {n} input tokens")
    return tokens, n, k


def cmd_encode(args) -> int:
    tokens, n, k = _load_object(args)
    ctx = _build_context(args, n, k)
    _check_tokens(tokens, ctx.alphabet)
    obj = _object_from_tokens(args.model, tokens)
    blob = codecs.encode(ctx, obj)
    ic = codecs.information_content(ctx, obj)
    Path(args.output).write_bytes(container.pack(ctx, blob).to_bytes())
    print(f"bits={blob.bit_length} ic={ic}")
    return 0


def cmd_decode(args) -> int:
    box = container.Container.from_bytes(Path(args.input).read_bytes())
    if args.model != box.model:
        raise ValidationError(
            f"model mismatch: container holds {box.model!r}, --model says {args.model!r}"
        )
    if args.k is not None and box.k is not None and args.k != box.k:
        raise ValidationError(f"--k {args.k} does not match the container ({box.k})")
    n = box.n if box.model not in ("perm",) else None
    ctx = _build_context(args, n, box.k)
    box.check_context(ctx)
    obj = codecs.decode(ctx, box.blob)
    text = " ".join(_object_to_tokens(box.model, obj, ctx.alphabet))
    Path(args.output).write_text(text + "\n" if text else "", encoding="utf-8")
    return 0


def cmd_info(args) -> int:
    tokens, n, k = _load_object(args)
    ctx = _build_context(args, n, k)
    _check_tokens(tokens, ctx.alphabet)
    obj = _object_from_tokens(args.model, tokens)
    print(f"ic={codecs.information_content(ctx, obj)}")
    return 0


def cmd_selftest(args) -> int:
    ok = run_selftest(
        max_alphabet=args.max_alphabet,
        max_n=args.max_n,
        trials=args.trials,
        inject_fault=args.inject_fault,
    )
    return 0 if ok else 3


def _add_context_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=MODEL_NAMES)
    p.add_argument("--alphabet", required=True, metavar="FILE")
    p.add_argument("--dist", metavar="FILE", help="token + integer weight per line")
    p.add_argument("--alpha", metavar="FILE", help="token + pseudocount per line")
    p.add_argument("--given-multiset", metavar="FILE", dest="given_multiset")
    p.add_argument("--k", type=int, default=None, help="draw size (trunc_perm, comb)")
    p.add_argument("--freq-bits", type=int, default=32, dest="freq_bits")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="combicodec", description="Compress combinatorial objects.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, needs_io in (
        ("encode", cmd_encode, True),
        ("decode", cmd_decode, True),
        ("info", cmd_info, False),
    ):
        p = sub.add_parser(name)
        _add_context_flags(p)
        p.add_argument("--input", required=True, metavar="FILE")
        if needs_io:
            p.add_argument("--output", required=True, metavar="FILE")
        p.set_defaults(func=fn)

    p = sub.add_parser("selftest")
    p.add_argument("--max-n", type=int, default=5, dest="max_n")
    p.add_argument("--max-alphabet", type=int, default=3, dest="max_alphabet")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CombicodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
