"""``angcurv`` command line: one subcommand per computation, one JSON report per run.

Exit status is 0 when every check in the report passes, 2 when a check
fails and 1 on usage or input errors.  Monte Carlo work needs ``--seed``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import _mc, acceptance
from .cones import EXACT_MAX_DIM, PolyCone, _reduce, external_angle_estimate
from .crofton import crofton_estimate, vk_action
from .curvmeas import (
    ConstCoeff,
    direct_constcoeff,
    evaluate,
    intrinsic_volume_estimate,
    steiner_check,
    weight_from_json,
)
from .exterior import BiGradedForm
from .grassrank import (
    HighestWeightSpec,
    constcoeff_weight_rank,
    fit_quadratic,
    obstruction_family_check,
    restriction_rank,
    strichartz_vector,
    obstruction_frame,
)
from .polytope import BorelBox, Polytope
from .repcomb import (
    lemma22_dim_check,
    littlewood_restrict,
    lr_coefficient,
    so_branch_dim_check,
    tensor_decompose,
    weyl_dim_sl,
    weyl_dim_so,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "()"):
        return ()
    try:
        return tuple(int(x) for x in text.strip("()[]").split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _count(text: str) -> int:
    # accepts 1e6 as well as 1000000
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if v < 1 or v != int(v):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


class Inputs:
    """Loads JSON files, remembering their bytes for the report digest."""

    def __init__(self):
        self.blobs: list[bytes] = []

    def load(self, path: str | None, parse, what: str):
        if path is None:
            return None
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise UsageError(f"{path}: cannot read {what}: {exc.strerror}") from exc
        self.blobs.append(raw)
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        try:
            return parse(data)
        except KeyError as exc:
            raise UsageError(f"{path}: {exc.args[0]}: missing") from exc
        except (ValueError, TypeError, IndexError) as exc:
            raise UsageError(f"{path}: {exc}") from exc

    def digest(self, args: argparse.Namespace) -> str:
        h = hashlib.sha256()
        skip = {"json_out", "threads", "func"}
        h.update(json.dumps({k: v for k, v in sorted(vars(args).items()) if k not in skip}, sort_keys=True, default=str).encode())
        for b in self.blobs:
            h.update(b)
        return h.hexdigest()


def _need_seed(args, why: str):
    if args.seed is None:
        raise UsageError(f"{args.command}: --seed is required ({why})")


def _nsigma(args) -> float:
    return 3.0 if args.tol is None else args.tol


def _agree(diff: float, sigma: float, args) -> bool:
    return abs(diff) < _nsigma(args) * sigma + 1e-9


def _polytope_needs_mc(P: Polytope) -> bool:
    return any(P.dim - F.dim > EXACT_MAX_DIM for F in P.faces)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


# -- subcommands: each returns (results, verdicts) ----------------------------


def cmd_angle(args, inp: Inputs):
    c = inp.load(args.cone, PolyCone.from_json, "cone")
    if _reduce(c).span.shape[0] > EXACT_MAX_DIM:
        _need_seed(args, "this cone needs Monte Carlo")
    a = external_angle_estimate(c, args.samples or 200_000, args.seed)
    return {"angle": a.value, "sigma": a.sigma, "exact": a.exact}, {}


def cmd_faces(args, inp: Inputs):
    P = inp.load(args.polytope, Polytope.from_json, "polytope")
    faces = [{"dim": F.dim, "vertices": list(F.vertex_indices)} for F in P.faces]
    return {"dim": P.dim, "f_vector": list(P.f_vector()), "faces": faces}, {}


def cmd_intrinsic(args, inp: Inputs):
    P = inp.load(args.polytope, Polytope.from_json, "polytope")
    if _polytope_needs_mc(P):
        _need_seed(args, "external angles of this polytope need Monte Carlo")
    ev = [intrinsic_volume_estimate(P, k, args.samples or 200_000, args.seed) for k in range(P.n + 1)]
    return {"V": [e.total for e in ev], "sigma": [e.sigma for e in ev]}, {}


def cmd_steiner(args, inp: Inputs):
    _need_seed(args, "tube volumes are sampled")
    P = inp.load(args.polytope, Polytope.from_json, "polytope")
    rows, verdicts = [], {}
    for eps in args.eps:
        r = steiner_check(P, eps, args.samples or 1_000_000, args.seed)
        ok = _agree(r.mc - r.target, r.sigma, args)
        rows.append({"eps": eps, "mc": r.mc, "mc_sigma": r.mc_sigma, "target": r.target, "target_sigma": r.target_sigma, "residual": r.residual})
        verdicts[f"eps={eps}"] = ok
    return {"checks": rows}, verdicts


def _load_box(args, inp: Inputs) -> BorelBox:
    return inp.load(args.box, BorelBox.from_json, "box") if args.box else BorelBox.all()


def cmd_evaluate(args, inp: Inputs):
    w = inp.load(args.weight, weight_from_json, "weight")
    P = inp.load(args.polytope, Polytope.from_json, "polytope")
    U = _load_box(args, inp)
    if _polytope_needs_mc(P):
        _need_seed(args, "external angles of this polytope need Monte Carlo")
    ev = evaluate(w, P, U, args.samples or 200_000, args.seed)
    return ev.to_json(), {}


def cmd_direct_cc(args, inp: Inputs):
    _need_seed(args, "the normal disc integral is sampled")
    om = inp.load(args.form, BiGradedForm.from_json, "form")
    P = inp.load(args.polytope, Polytope.from_json, "polytope")
    U = _load_box(args, inp)
    if om.n != P.n:
        raise UsageError(f"{args.form}: n: form lives in R^{om.n}, polytope in R^{P.n}")
    d = direct_constcoeff(om, P, U, args.samples or 100_000, args.seed)
    f = evaluate(ConstCoeff(om), P, U, seed=args.seed)
    ok = _agree(d.total - f.total, math.hypot(d.sigma, f.sigma), args)
    return {"direct": d.to_json(), "face_sum": f.to_json()}, {"angular": ok}


def cmd_classify_rank(args, inp: Inputs):
    _need_seed(args, "planes are sampled")
    r = restriction_rank(args.n, args.k, args.samples, args.seed)
    out = r.to_json()
    verdicts = {"rank": r.verdict == "pass"}
    if args.constcoeff:
        cc = constcoeff_weight_rank(args.n, args.k, sample_count=args.samples, seed=args.seed)
        out["constcoeff"] = cc.to_json()
        verdicts["constcoeff"] = cc.stable and cc.rank == r.rank and cc.max_residual < 1e-8
    return out, verdicts


def cmd_strichartz(args, inp: Inputs):
    spec = HighestWeightSpec(args.m, args.n, args.k)
    if args.frame:
        frame = inp.load(args.frame, lambda d: np.asarray(d["frame"] if isinstance(d, dict) else d, float), "frame")
    else:
        frame = obstruction_frame(args.n, args.k, args.phi)
    v = strichartz_vector(spec, frame)
    out = {"m": list(spec.m), "value": v}
    if not args.frame:
        out["phi"] = args.phi
        if len(args.m) == 1:
            out["expected"] = math.cos(args.phi) ** (2 * args.m[0])
    return out, {}


def cmd_fit_quadratic(args, inp: Inputs):
    if args.data:
        data = inp.load(args.data, lambda d: (np.asarray(d["frames"], float), np.asarray(d["values"], float)), "data")
        fit = fit_quadratic(*data)
        return {"residual": fit.residual, "rank": fit.rank, "condition": fit.condition, "coefficients": fit.coefficients}, {}
    if args.n is None or args.k is None or args.m1 is None:
        raise UsageError("fit-quadratic: give --data FILE or all of --n, --k, --m1")
    r = obstruction_family_check(args.n, args.k, args.m1)
    expect_fit = args.m1 <= 1
    ok = r.max_error < 1e-10 and (r.fit_residual < 1e-8 if expect_fit else r.fit_residual > 0.01)
    return {"n": r.n, "k": r.k, "m1": r.m1, "max_error": r.max_error, "fit_residual": r.fit_residual, "quadratic": r.fit_residual < 1e-8}, {"family": ok}


def cmd_lr(args, inp: Inputs):
    if args.nu is not None:
        return {"lambda": args.lam, "mu": args.mu, "nu": args.nu, "coefficient": lr_coefficient(args.lam, args.mu, args.nu)}, {}
    n = args.n or max(1, len(args.lam) + len(args.mu))
    dec = tensor_decompose(args.lam, args.mu, n, sl=args.sl)
    return {"lambda": args.lam, "mu": args.mu, "n": n, "decomposition": [{"nu": list(k), "multiplicity": v} for k, v in dec.items()]}, {}


def cmd_weyl_dim(args, inp: Inputs):
    if args.group == "sl":
        return {"group": "sl", "n": args.n, "weight": args.weight, "dim": weyl_dim_sl(args.weight, args.n)}, {}
    return {"group": "so", "n": args.n, "weight": args.weight, "dim": weyl_dim_so(args.weight, args.n)}, {}


def cmd_branch(args, inp: Inputs):
    res = littlewood_restrict(args.lam, args.n)
    r = args.n // 2
    rows = []
    for mu, mult in res.items():
        w = tuple(mu) + (0,) * (r - len(mu))
        rows.append({"mu": list(mu), "multiplicity": mult, "dim": weyl_dim_so(w, args.n)})
    return {"lambda": list(args.lam), "n": args.n, "gl_dim": weyl_dim_sl(args.lam, args.n), "constituents": rows}, {}


def cmd_lemma_checks(args, inp: Inputs):
    tensor = {f"{n},{k}": lemma22_dim_check(n, k) for n in range(2, args.nmax + 1) for k in range(1, n)}
    branch = {f"{n},{k}": so_branch_dim_check(k, n) for n in range(3, args.nmax + 1) for k in range(n // 2 + 1)}
    restr = {
        f"{n},{k}": littlewood_restrict((2,) * k, n) == {(2,) * i: 1 for i in range(k + 1)}
        for n in range(2, args.nmax + 1)
        for k in range(n // 2 + 1)
    }
    verdicts = {"tensor": not any(tensor.values()), "branch": not any(branch.values()), "restriction": all(restr.values())}
    return {"tensor_residuals": tensor, "branch_residuals": branch, "restriction_ok": restr}, verdicts


def cmd_crofton(args, inp: Inputs):
    _need_seed(args, "flats are sampled")
    P = inp.load(args.polytope, Polytope.from_json, "polytope")
    if not 0 <= args.k <= P.n:
        raise UsageError(f"crofton: --k must lie in 0..{P.n}")
    r = crofton_estimate(P, args.k, samples=args.samples or 1_000_000, seed=args.seed)
    return r.to_json(), {}


def cmd_vk_action(args, inp: Inputs):
    _need_seed(args, "flats are sampled")
    w = inp.load(args.weight, weight_from_json, "weight")
    P = inp.load(args.polytope, Polytope.from_json, "polytope")
    U = _load_box(args, inp)
    if not 1 <= args.k <= P.n:
        raise UsageError(f"vk-action: --k must lie in 1..{P.n}")
    r = vk_action(w, P, U, k=args.k, samples=args.samples or 1_000_000, seed=args.seed)
    return r.to_json(), {}


def cmd_verify_all(args, inp: Inputs):
    which = list(args.only) if args.only else None
    bad = [i for i in which or [] if i not in acceptance.CRITERIA]
    if bad:
        raise UsageError(f"verify-all: unknown criteria {bad}")
    res = acceptance.run_all(which, _nsigma(args), report=lambda s: print(s, file=sys.stderr, flush=True))
    return {"criteria": [r.to_json() for r in res], "seeds": acceptance.SEEDS}, {f"criterion {r.number}": r.passed for r in res}


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--samples", type=_count, help="Monte Carlo sample count (accepts 1e6)")
    common.add_argument("--seed", type=int, help="seed for every random draw; required for Monte Carlo work")
    common.add_argument("--tol", type=float, help="tolerance in standard errors for statistical checks (default 3)")
    common.add_argument("--json-out", metavar="FILE", help="also write the report to FILE")
    common.add_argument("--threads", type=int, help="Monte Carlo worker threads (results do not depend on it)")

    p = _Parser(prog="angcurv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("angle", cmd_angle, "external angle of a cone").add_argument("--cone", required=True)
    add("faces", cmd_faces, "face lattice of a polytope").add_argument("--polytope", required=True)
    add("intrinsic", cmd_intrinsic, "intrinsic volumes V_0..V_n").add_argument("--polytope", required=True)
    sp = add("steiner", cmd_steiner, "tube volume vs Steiner polynomial")
    sp.add_argument("--polytope", required=True)
    sp.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.5, 1.0])
    for name, func, help_ in (("evaluate", cmd_evaluate, "face-sum curvature measure"), ("vk-action", cmd_vk_action, "V_k action on a curvature measure")):
        sp = add(name, func, help_)
        sp.add_argument("--weight", required=True)
        sp.add_argument("--polytope", required=True)
        sp.add_argument("--box", help="Borel box JSON {lo, hi}; default all of R^n")
        if name == "vk-action":
            sp.add_argument("--k", type=int, default=1)
    sp = add("direct-cc", cmd_direct_cc, "constant-coefficient measure by direct integration, with the face sum")
    sp.add_argument("--form", required=True)
    sp.add_argument("--polytope", required=True)
    sp.add_argument("--box")
    sp = add("classify-rank", cmd_classify_rank, "rank of quadratic Plücker restrictions")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--constcoeff", action="store_true", help="also compare with constant-coefficient weights")
    sp = add("strichartz", cmd_strichartz, "highest weight vector at a plane")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--m", type=_ints, required=True, help="highest weight, e.g. 2,1")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--frame", help="JSON n×k matrix (or {frame: ...})")
    g.add_argument("--phi", type=float, default=0.0, help="angle on the test family")
    sp = add("fit-quadratic", cmd_fit_quadratic, "least-squares fit by quadratic Plücker monomials")
    sp.add_argument("--data", help="JSON {frames, values}")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--m1", type=int)
    sp = add("lr", cmd_lr, "Littlewood-Richardson coefficient or tensor decomposition")
    sp.add_argument("--lam", type=_ints, required=True)
    sp.add_argument("--mu", type=_ints, required=True)
    sp.add_argument("--nu", type=_ints)
    sp.add_argument("--n", type=int)
    sp.add_argument("--sl", action="store_true", help="reduce labels modulo full columns")
    sp = add("weyl-dim", cmd_weyl_dim, "Weyl dimension")
    sp.add_argument("--group", choices=["sl", "so"], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--weight", type=_ints, required=True)
    sp = add("branch", cmd_branch, "restriction GL(n) → O(n) in the stable range")
    sp.add_argument("--lam", type=_ints, required=True)
    sp.add_argument("--n", type=int, required=True)
    add("lemma-checks", cmd_lemma_checks, "exact representation identities").add_argument("--nmax", type=int, default=8)
    sp = add("crofton", cmd_crofton, "intrinsic volume by random flats")
    sp.add_argument("--polytope", required=True)
    sp.add_argument("--k", type=int, required=True)
    add("verify-all", cmd_verify_all, "run the acceptance suite").add_argument("--only", type=_ints, help="criterion numbers, e.g. 1,3")
    return p


def run(argv=None) -> tuple[int, dict | None]:
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if args.threads is not None:
            if args.threads < 1:
                raise UsageError("--threads must be >= 1")
            _mc.set_threads(args.threads)
        inp = Inputs()
        results, verdicts = args.func(args, inp)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, None
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 1, None
    report = {
        "command": args.command,
        "inputs_digest": inp.digest(args),
        "seed": args.seed,
        "results": _jsonable(results),
        "verdicts": verdicts,
        "passed": all(verdicts.values()),
        "wall_time": time.perf_counter() - t0,
    }
    text = json.dumps(report, indent=2)
    print(text)
    if args.json_out:
        Path(args.json_out).write_text(text + "\n")
    return (0 if report["passed"] else 2), report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
