"""Command-line front end.

Exit status: 0 on success, 1 when an analysis fails (theorem discrepancy
above tolerance, candidate state not an equilibrium, numerical failure),
2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .errors import ConvergenceError, NumericalConsistencyError, RejectedInput
from .equilibrium import (
    best_response_full,
    best_response_unitary,
    ges_search,
    ne_family_scan,
    reduced_payoff,
    spectrum,
    verify_ne,
)
from .game import (
    GameDefinition,
    build_payoff_tensor,
    canonical_pd,
    classical_submatrix,
    payoff_operator_form,
    payoff_state_form,
    product_state,
    pure_density,
)
from .strategy import BASIS_NAMES, base_operator, expand, is_unitary, parse_params, reconstruct, unitary_general

DEFAULT_TOLERANCES = {
    "eq": 1e-10,
    "theorem": 1e-10,
    "ne": 1e-9,
    "cluster": 1e-9,
    "ges": 1e-8,
    "unitary": 1e-10,
}


class UsageError(Exception):
    pass


class AnalysisFailure(Exception):
    """Carries a report that should still be written before exiting with status 1."""

    def __init__(self, message, payload):
        super().__init__(message)
        self.payload = payload


def _split_tolerances(argv):
    """Pull ``--tol.<name> VALUE`` / ``--tol.<name>=VALUE`` out of ``argv``."""
    tols = dict(DEFAULT_TOLERANCES)
    rest = []
    it = iter(argv)
    for tok in it:
        if not tok.startswith("--tol."):
            rest.append(tok)
            continue
        name, sep, raw = tok[len("--tol."):].partition("=")
        if not sep:
            raw = next(it, None)
            if raw is None:
                raise UsageError(f"--tol.{name} needs a value")
        if name not in tols:
            raise UsageError(f"unknown tolerance {name!r}; known: {', '.join(sorted(tols))}")
        try:
            value = float(raw)
        except ValueError:
            raise UsageError(f"--tol.{name}: not a number: {raw!r}") from None
        if not value > 0:
            raise UsageError(f"--tol.{name} must be positive")
        tols[name] = value
    return rest, tols


def _grid(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("grid resolution must be >= 2")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("game")
    g.add_argument("--game", type=Path, help="JSON game file ({r,s,t,p} or {rho0,P1,P2})")
    for name in "rstp":
        g.add_argument(f"--{name}", type=float, help=f"Prisoner's Dilemma payoff {name}")
    o = common.add_argument_group("output")
    o.add_argument("--output", "-o", type=Path, help="write the report here instead of stdout")
    o.add_argument("--format", choices=("json", "csv", "text"), default="json")

    parser = argparse.ArgumentParser(
        prog="hilbertgame",
        description="Payoff tensors and equilibria of two-player quantum games.",
        epilog="Tolerances: --tol.<name> VALUE with name in " + ", ".join(sorted(DEFAULT_TOLERANCES)),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common], help="emit H1, H2 and their classical sub-matrices")

    p = sub.add_parser("spectrum", parents=[common], help="eigen-spectrum of a payoff tensor")
    p.add_argument("--player", type=int, choices=(1, 2))

    p = sub.add_parser("payoff", parents=[common], help="payoffs of a product strategy profile")
    p.add_argument("--u1", required=True, help="theta=..,phi=.. | alpha=..,beta=..,gamma=.. | Nc|Fc|Nq|Fq")
    p.add_argument("--u2", required=True)

    p = sub.add_parser("best-response", parents=[common], help="best replies to a fixed unitary opponent")
    p.add_argument("--player", type=int, choices=(1, 2), default=1)
    p.add_argument("--opponent", required=True, help="opponent strategy, same syntax as --u1")
    p.add_argument("--grid", type=_grid, default=16)

    p = sub.add_parser("ne-scan", parents=[common], help="grid scan for product-profile equilibria")
    p.add_argument("--grid", type=_grid, default=16)
    p.add_argument("--set", dest="strategy_set", choices=("unitary", "classical"), default="unitary")

    sub.add_parser("ges", parents=[common], help="search for a global equilibrium state")

    p = sub.add_parser("verify-theorem", parents=[common], help="operator form vs tensor form on random profiles")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unitary-only", action="store_true")

    p = sub.add_parser("verify-ne", parents=[common], help="check a candidate strategy density")
    p.add_argument("--state", type=Path, required=True, help='JSON file {"rho": 16x16} or {"vector": 16}')
    p.add_argument("--set", dest="strategy_set", choices=("full", "unitary", "classical"), default="full")
    p.add_argument("--samples", type=int, default=0)
    return parser


def _game(args) -> GameDefinition:
    given = [getattr(args, k) for k in "rstp"]
    if args.game is not None:
        if any(v is not None for v in given):
            raise UsageError("use either --game or --r/--s/--t/--p, not both")
        return serialize.load_game(args.game)
    if any(v is None for v in given):
        raise UsageError("a game is required: --game FILE or all of --r --s --t --p")
    return canonical_pd(*given)


def _operator(text: str) -> np.ndarray:
    text = text.strip()
    if text in BASIS_NAMES:
        return base_operator(text)
    return parse_params(text).operator()


def _fmt(x: float) -> str:
    """Text-report number: 12 significant digits, roundoff-level values shown as 0."""
    return format(0.0 if abs(x) < 1e-12 else x, ".12g")


# -- commands -----------------------------------------------------------------


def cmd_build(args, g, tols):
    h1, h2 = build_payoff_tensor(g, 1), build_payoff_tensor(g, 2)
    data = {
        "game": serialize.game_to_json(g),
        "H1": serialize.matrix_to_json(h1),
        "H2": serialize.matrix_to_json(h2),
        "H1_classical": serialize.matrix_to_json(classical_submatrix(h1)),
        "H2_classical": serialize.matrix_to_json(classical_submatrix(h2)),
    }
    lines = []
    for name, m in (("H1", h1), ("H2", h2), ("H1 classical", classical_submatrix(h1)), ("H2 classical", classical_submatrix(h2))):
        lines.append(f"{name}:")
        lines.append(np.array2string(np.round(m, 12), max_line_width=250))
    return data, "\n".join(lines) + "\n"


def cmd_spectrum(args, g, tols):
    players = (args.player,) if args.player else (1, 2)
    data, lines = {}, []
    for player in players:
        rep = spectrum(g.tensor(player), tols["cluster"])
        data[f"player{player}"] = serialize.spectrum_to_json(rep)
        parts = [f"{_fmt(v)} x{m}" for v, m in zip(rep.values, rep.multiplicities)]
        lines.append(f"H{player}: " + ", ".join(parts))
    return data, "\n".join(lines) + "\n"


def cmd_payoff(args, g, tols):
    u1, u2 = _operator(args.u1), _operator(args.u2)
    state = product_state(expand(u1), expand(u2))
    op = [payoff_operator_form(g, u1, u2, p, tols["eq"]) for p in (1, 2)]
    st = [payoff_state_form(g.tensor(p), state, tols["eq"]) for p in (1, 2)]
    data = {
        "operator_form": op,
        "state_form": st,
        "unitary": [is_unitary(u1, tols["unitary"]), is_unitary(u2, tols["unitary"])],
    }
    return data, f"E1 = {op[0]:.12g}\nE2 = {op[1]:.12g}\n"


def cmd_best_response(args, g, tols):
    opponent = parse_params(args.opponent)
    params, value = best_response_unitary(g, opponent, args.player, args.grid, tols["ne"])
    hr = reduced_payoff(g.tensor(args.player), pure_density(expand(opponent.operator())), args.player)
    vec, full_value = best_response_full(hr)
    data = {
        "player": args.player,
        "opponent": opponent.as_dict(),
        "unitary": {"params": params.as_dict(), "payoff": value},
        "full": {
            "vector": serialize.vector_to_json(vec),
            "operator": serialize.matrix_to_json(reconstruct(vec)),
            "payoff": full_value,
            "is_unitary": is_unitary(reconstruct(vec), tols["unitary"]),
        },
    }
    text = (
        f"unitary best response: gamma={params.gamma:.12g} alpha={params.alpha:.12g} "
        f"beta={params.beta:.12g} payoff={value:.12g}\n"
        f"unrestricted best response payoff={full_value:.12g} (unitary: {data['full']['is_unitary']})\n"
    )
    return data, text


def cmd_ne_scan(args, g, tols):
    reports = ne_family_scan(g, args.grid, tols["ne"], args.strategy_set)
    data = {
        "strategy_set": args.strategy_set,
        "grid": args.grid,
        "count": len(reports),
        "profiles": [serialize.report_to_json(r, include_state=False) for r in reports],
    }
    if args.strategy_set == "unitary":
        summary = sorted({(round(r.profile[0].gamma, 9), round(r.profile[1].gamma, 9), round(r.payoffs[0], 9), round(r.payoffs[1], 9)) for r in reports})
        lines = [f"{len(reports)} equilibrium profiles on a {args.grid}^3 grid per player"]
        lines += [f"  gamma1={a:.9g} gamma2={b:.9g} E1={c:.9g} E2={d:.9g}" for a, b, c, d in summary]
    else:
        lines = [f"{len(reports)} classical equilibrium profiles"]
        lines += [f"  p_nc1={r.profile[0]['p_nc']:.9g} p_nc2={r.profile[1]['p_nc']:.9g} E1={r.payoffs[0]:.9g} E2={r.payoffs[1]:.9g}" for r in reports]
    return data, "\n".join(lines) + "\n", serialize.scan_to_csv(reports)


def cmd_ges(args, g, tols):
    rep = ges_search(g.tensor(1), g.tensor(2), tols["ges"], tols["cluster"])
    lines = [f"GES: {'found' if rep.kind == 'GES' else 'none'} (top eigenvalues {_fmt(rep.payoffs[0])}, {_fmt(rep.payoffs[1])})"]
    for c in rep.common_states:
        lines.append(f"  common eigenstate payoffs=({_fmt(c.payoffs[0])}, {_fmt(c.payoffs[1])}) unitary={c.unitary_flags}")
    return serialize.report_to_json(rep), "\n".join(lines) + "\n"


def _random_operators(rng, n, unitary):
    if unitary:
        angles = rng.uniform([-np.pi, -np.pi, 0.0], [np.pi, np.pi, np.pi], size=(n, 3))
        return np.array([unitary_general(*a) for a in angles])
    return rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))


def cmd_verify_theorem(args, g, tols):
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    rng = np.random.default_rng(args.seed)
    u1 = _random_operators(rng, args.samples, args.unitary_only)
    u2 = _random_operators(rng, args.samples, args.unitary_only)
    states = np.einsum("na,nb->nab", expand(u1), expand(u2)).reshape(-1, 16)
    data = {"samples": args.samples, "seed": args.seed, "unitary_only": args.unitary_only}
    worst = 0.0
    for player in (1, 2):
        op = payoff_operator_form(g, u1, u2, player)
        st = payoff_state_form(g.tensor(player), states)
        diff = np.abs(op - st)
        rel = diff / np.maximum(1.0, np.abs(op))
        data[f"player{player}"] = {"max_abs": float(diff.max()), "max_rel": float(rel.max())}
        worst = max(worst, float(rel.max()))
    data["tolerance"] = tols["theorem"]
    data["passed"] = worst <= tols["theorem"]
    text = f"max relative discrepancy {worst:.3g} (tolerance {tols['theorem']:.3g}): {'ok' if data['passed'] else 'FAILED'}\n"
    if not data["passed"]:
        raise AnalysisFailure("theorem check failed", (data, text))
    return data, text


def cmd_verify_ne(args, g, tols):
    rho = serialize.load_state(args.state)
    rep = verify_ne(g, rho, args.strategy_set, tols["ne"], samples=args.samples)
    data = serialize.report_to_json(rep, include_state=False)
    text = (
        f"{rep.kind}: payoffs=({rep.payoffs[0]:.12g}, {rep.payoffs[1]:.12g}) "
        f"margin={rep.deviation_margin:.3g} unitary={rep.unitary_flags}\n"
    )
    if not rep.is_equilibrium:
        raise AnalysisFailure("candidate is not an equilibrium", (data, text))
    return data, text


HANDLERS = {
    "build": cmd_build,
    "spectrum": cmd_spectrum,
    "payoff": cmd_payoff,
    "best-response": cmd_best_response,
    "ne-scan": cmd_ne_scan,
    "ges": cmd_ges,
    "verify-theorem": cmd_verify_theorem,
    "verify-ne": cmd_verify_ne,
}


def _emit(args, result):
    data, text, *extra = result
    if args.format == "json":
        out = serialize.dumps(data)
    elif args.format == "text":
        out = text
    elif extra:
        out = extra[0]
    else:
        raise UsageError(f"csv output is only available for ne-scan, not {args.command}")
    if args.output is None:
        sys.stdout.write(out)
    else:
        args.output.write_text(out)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv, tols = _split_tolerances(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hilbertgame: error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        g = _game(args)
        result = HANDLERS[args.command](args, g, tols)
        _emit(args, result)
    except AnalysisFailure as exc:
        try:
            _emit(args, exc.payload)
        except UsageError:
            pass
        print(f"hilbertgame: {exc}", file=sys.stderr)
        return 1
    except (UsageError, RejectedInput, OSError) as exc:
        print(f"hilbertgame: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalConsistencyError, ConvergenceError) as exc:
        print(f"hilbertgame: analysis failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
