"""``bicap`` command line: eval, transform, validate, reduce, crosscheck.

Data goes to stdout, diagnostics to stderr. Exit codes: 0 success, 1
crosscheck residual above tolerance, 2 unreadable input, 3 validation
failure, 4 model kind unsuitable for the request, 5 input not 2-additive.
"""

import argparse
import itertools
import os
import sys

import numpy as np

from . import io
from .integrals import (
    CptModel,
    EbViolationError,
    InadmissiblePermutationError,
    bicap_choquet,
    bicap_choquet_2additive,
    bicap_choquet_batch,
    bicap_choquet_mobius,
    bipolar_choquet,
    check_eb,
    choquet,
    choquet_asymmetric,
    choquet_asymmetric_2additive,
    choquet_symmetric,
    choquet_symmetric_2additive,
    cpt,
    cpt_2additive,
    reduce_bipolar,
)
from .oracle import choquet_levelset_oracle, exhaustive_permutation_oracle
from .setfn import (
    DEFAULT_TOL,
    BiCapacity,
    BiGame,
    BipolarCapacity,
    Capacity,
    Game,
    conjugate,
    cpt_bicapacity,
    pair_masks,
    popcount_table,
    pow3_table,
    validate_bicapacity,
    validate_bipolar,
    validate_capacity,
    zero_offset,
)
from .transforms import (
    InteractionRep,
    MobiusRep,
    NotTwoAdditiveError,
    bimobius,
    biinteraction,
    check_interaction_validity,
    check_mobius_validity,
    comobius,
    interaction,
    mobius,
    twoadd_I_from_m,
    twoadd_m_from_I,
    twoadditive_violation,
    zeta,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_KIND = 4
EXIT_NOT_2ADD = 5

SEED_ENV = "BICAP_SEED"
CROSSCHECK_TOL = 1e-9

METHODS = ("choquet", "symmetric", "asymmetric", "cpt", "bicap", "bicap-mobius", "bicap-2add", "bipolar")
TARGETS = ("mobius", "comobius", "interaction", "2add-I", "2add-m", "zeta")


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def fmt(x) -> str:
    return f"{float(x):.15g}"


def _kind_name(obj):
    return io.to_dict(obj)["kind"] if not isinstance(obj, np.ndarray) else "act"


def _load(path):
    try:
        return io.load(path)
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}")
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}")


def _load_model(path):
    obj = _load(path)
    if isinstance(obj, np.ndarray):
        raise CliError(EXIT_KIND, f"{path} holds an act, expected a model")
    return obj


def _load_act(path, n):
    f = _load(path)
    if not isinstance(f, np.ndarray):
        raise CliError(EXIT_KIND, f"{path} holds a model, expected an act")
    if f.shape[0] != n:
        raise CliError(EXIT_KIND, f"act has {f.shape[0]} entries but the model has n={n}")
    return f


def _reports_for(obj, tol):
    """Structural validation reports applicable to a model."""
    if isinstance(obj, Capacity):
        return [validate_capacity(obj, tol)]
    if isinstance(obj, BiCapacity):
        return [validate_bicapacity(obj, tol)]
    if isinstance(obj, BipolarCapacity):
        return [validate_bipolar(obj, tol)]
    if isinstance(obj, CptModel):
        return [validate_capacity(obj.nu_plus, tol), validate_capacity(obj.nu_minus, tol)]
    return []


def _require_valid(obj, tol):
    bad = [r for r in _reports_for(obj, tol) if not r.ok]
    if bad:
        raise CliError(EXIT_INVALID, "\n".join(str(r) for r in bad))


def _kind_error(method, obj):
    return CliError(EXIT_KIND, f"method {method!r} does not apply to a {_kind_name(obj)} model")


def _wrap_2add(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except NotTwoAdditiveError as exc:
        raise CliError(EXIT_NOT_2ADD, str(exc))


# ---------------------------------------------------------------------------
# eval


def _parse_sigma(text, n):
    try:
        sigma = [int(tok) - 1 for tok in text.replace(",", " ").split()]
    except ValueError:
        raise CliError(EXIT_PARSE, f"--sigma must list 1-based criteria, got {text!r}")
    if sorted(sigma) != list(range(n)):
        raise CliError(EXIT_PARSE, f"--sigma must be a permutation of 1..{n}")
    return sigma


def cmd_eval(args, out):
    model = _load_model(args.model)
    n = model.n
    f = _load_act(args.act, n)
    method = args.method
    if not args.no_validate:
        _require_valid(model, DEFAULT_TOL)
    if method == "bipolar":
        if not isinstance(model, BipolarCapacity):
            raise _kind_error(method, model)
        sigma = _parse_sigma(args.sigma, n) if args.sigma else None
        try:
            res = bipolar_choquet(model, f, sigma)
        except InadmissiblePermutationError as exc:
            raise CliError(EXIT_PARSE, str(exc))
        out.write(f"{fmt(res.total)} {fmt(res.plus)} {fmt(res.minus)}\n")
        return EXIT_OK
    if args.sigma:
        raise CliError(EXIT_PARSE, "--sigma only applies to --method bipolar")
    if method == "choquet":
        if not isinstance(model, Game):
            raise _kind_error(method, model)
        if np.any(f < 0):
            raise CliError(EXIT_INVALID, "choquet needs a nonnegative act")
        value = choquet(model, f)
    elif method in ("symmetric", "asymmetric"):
        if not isinstance(model, Game):
            raise _kind_error(method, model)
        value = (choquet_symmetric if method == "symmetric" else choquet_asymmetric)(model, f)
    elif method == "cpt":
        if not isinstance(model, CptModel):
            raise _kind_error(method, model)
        value = cpt(model, f)
    elif method == "bicap":
        if not isinstance(model, BiGame):
            raise _kind_error(method, model)
        value = bicap_choquet(model, f)
    elif method == "bicap-mobius":
        if isinstance(model, BiGame):
            model = bimobius(model)
        if not (isinstance(model, MobiusRep) and model.family == "bi"):
            raise _kind_error(method, model)
        value = bicap_choquet_mobius(model, f)
    elif method == "bicap-2add":
        if isinstance(model, BiGame):
            model = biinteraction(model)
        if isinstance(model, MobiusRep) and model.family == "bi":
            value = _wrap_2add(bicap_choquet_2additive, model, f, "mobius2")
        elif isinstance(model, InteractionRep) and model.family == "bi":
            value = _wrap_2add(bicap_choquet_2additive, model, f, "interaction_b")
        else:
            raise _kind_error(method, model)
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(EXIT_PARSE, f"unknown method {method}")
    out.write(fmt(value) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# transform


def cmd_transform(args, out):
    model = _load_model(args.model)
    to = args.to
    if to == "mobius":
        if isinstance(model, BiGame):
            res = bimobius(model)
        elif isinstance(model, Game):
            res = mobius(model)
        else:
            raise _kind_error(to, model)
    elif to == "comobius":
        if not isinstance(model, Game):
            raise _kind_error(to, model)
        res = comobius(model)
    elif to == "interaction":
        if isinstance(model, BiGame):
            res = biinteraction(model)
        elif isinstance(model, Game):
            res = interaction(model)
        else:
            raise _kind_error(to, model)
    elif to == "2add-I":
        if isinstance(model, BiGame):
            model = bimobius(model)
        if not (type(model) is MobiusRep and model.family == "bi"):
            raise _kind_error(to, model)
        res = _wrap_2add(twoadd_I_from_m, model)
    elif to == "2add-m":
        if isinstance(model, BiGame):
            model = biinteraction(model)
        if not (type(model) is InteractionRep and model.family == "bi"):
            raise _kind_error(to, model)
        res = _wrap_2add(twoadd_m_from_I, model)
    elif to == "zeta":
        if type(model) is not MobiusRep:
            raise _kind_error(to, model)
        res = zeta(model)
    else:  # pragma: no cover
        raise CliError(EXIT_PARSE, f"unknown target {to}")
    out.write(io.dumps(res))
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate / reduce


def cmd_validate(args, out):
    model = _load_model(args.model)
    tol = args.tol
    reports = _reports_for(model, tol)
    if isinstance(model, BipolarCapacity):
        reports.append(check_eb(model, tol))
    elif type(model) is MobiusRep and model.family == "bi":
        reports.append(_wrap_2add(check_mobius_validity, model, tol))
    elif type(model) is InteractionRep and model.family == "bi":
        reports.append(_wrap_2add(check_interaction_validity, model, tol))
    elif type(model) is BiGame or type(model) is Game:
        base = model.values[zero_offset(model.n)] if isinstance(model, BiGame) else model.values[0]
        out.write(f"{_kind_name(model)}: empty-set value {fmt(base)}\n")
        return EXIT_OK if abs(base) <= tol else EXIT_INVALID
    if not reports:
        raise CliError(EXIT_KIND, f"nothing to validate for a {_kind_name(model)} model")
    for r in reports:
        out.write(str(r) + "\n")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_INVALID


def cmd_reduce(args, out):
    model = _load_model(args.model)
    if not isinstance(model, BipolarCapacity):
        raise _kind_error("reduce", model)
    try:
        v = reduce_bipolar(model, args.tol)
    except EbViolationError:
        raise CliError(EXIT_INVALID, str(check_eb(model, args.tol)))
    out.write(io.dumps(v))
    return EXIT_OK


# ---------------------------------------------------------------------------
# crosscheck


def _random_acts(n, k, rng):
    """Random acts with a share of ties, zeros and ternary patterns mixed in."""
    acts = rng.normal(scale=2.0, size=(k, n))
    for r in range(k):
        kind = r % 4
        if kind == 1 and n > 1:
            i, j = rng.choice(n, size=2, replace=False)
            acts[r, j] = acts[r, i] * rng.choice([-1.0, 1.0])
        elif kind == 2:
            acts[r, rng.integers(n)] = 0.0
        elif kind == 3:
            acts[r] = rng.integers(-1, 2, size=n).astype(float)
    return acts


def _is_cpt_type(v, tol):
    pos, neg = pair_masks(v.n)
    P = pow3_table(v.n)
    Z = zero_offset(v.n)
    parts = v.values[Z + P[pos]] + v.values[Z - P[neg]]
    return float(np.max(np.abs(v.values - parts))) <= tol


def _set_2additive(c, tol):
    I = interaction(c)
    pc = popcount_table(c.n)
    return I if float(np.max(np.abs(I.values[pc > 2]), initial=0.0)) <= tol else None


def _paths_for(model, tol):
    """``{name: callable(f)}`` of every formula applicable to ``model``."""
    paths = {}
    if isinstance(model, Capacity) or type(model) is Game:
        c = model
        cbar = conjugate(c)
        paths["symmetric"] = lambda f: choquet_symmetric(c, f)
        paths["symmetric/cpt-explicit"] = lambda f: cpt(CptModel(c, c), f, "explicit")
        paths["symmetric/cpt-mobius"] = lambda f: cpt(CptModel(c, c), f, "mobius")
        paths["symmetric/cpt-comobius"] = lambda f: cpt(CptModel(c, c), f, "comobius")
        I = _set_2additive(c, tol)
        if I is not None:
            paths["symmetric/2add"] = lambda f: choquet_symmetric_2additive(I, f)
        groups = {"symmetric": paths}
        asym = {
            "asymmetric": lambda f: choquet_asymmetric(c, f),
            "asymmetric/cpt": lambda f: cpt(CptModel(c, cbar), f, "explicit"),
            "asymmetric/bicap": lambda f: bicap_choquet(cpt_bicapacity(c, cbar), f),
        }
        if I is not None:
            asym["asymmetric/2add"] = lambda f: choquet_asymmetric_2additive(I, f)
        groups["asymmetric"] = asym
        groups["nonnegative"] = {
            "choquet/differences": lambda f: choquet(c, np.abs(f), "differences"),
            "choquet/increments": lambda f: choquet(c, np.abs(f), "increments"),
            "choquet/level-set oracle": lambda f: choquet_levelset_oracle(c, np.abs(f)),
        }
        return groups
    if isinstance(model, CptModel):
        paths = {p: (lambda f, p=p: cpt(model, f, p)) for p in ("definition", "explicit", "mobius", "comobius")}
        v = cpt_bicapacity(model.nu_plus, model.nu_minus)
        paths["bicap"] = lambda f: bicap_choquet(v, f)
        Ip, Im = _set_2additive(model.nu_plus, tol), _set_2additive(model.nu_minus, tol)
        if Ip is not None and Im is not None:
            paths["2add"] = lambda f: cpt_2additive(model, f)
        return {"cpt": paths}
    if isinstance(model, BiGame):
        v = model
        m = bimobius(v)
        paths["definition"] = lambda f: bicap_choquet(v, f, "definition")
        paths["telescoping"] = lambda f: bicap_choquet(v, f, "telescoping")
        paths["batch kernel"] = lambda f: float(bicap_choquet_batch(v, f)[0])
        paths["mobius"] = lambda f: bicap_choquet_mobius(m, f)
        if twoadditive_violation(m) <= tol:
            I = biinteraction(m)
            paths["2add/mobius2"] = lambda f: bicap_choquet_2additive(m, f, "mobius2", tol)
            paths["2add/interaction_a"] = lambda f: bicap_choquet_2additive(I, f, "interaction_a", tol)
            paths["2add/interaction_b"] = lambda f: bicap_choquet_2additive(I, f, "interaction_b", tol)
        if _is_cpt_type(v, tol):
            pos, _ = pair_masks(v.n)
            P = pow3_table(v.n)
            Z = zero_offset(v.n)
            masks = np.arange(1 << v.n)
            plus = Capacity(v.n, v.values[Z + P[masks]])
            minus = Capacity(v.n, -v.values[Z - P[masks]])
            paths["cpt-type/cpt"] = lambda f: cpt(CptModel(plus, minus), f)
        return {"bicap": paths}
    if isinstance(model, BipolarCapacity):
        z = model
        if check_eb(z, tol).ok:
            v = reduce_bipolar(z, tol)
            paths["bipolar"] = lambda f: bipolar_choquet(z, f).total
            paths["reduced bicap"] = lambda f: bicap_choquet(v, f)
            if z.n <= 6:
                paths["all permutations"] = lambda f: _spread_or_nan(exhaustive_permutation_oracle(z, f))
        return {"bipolar": paths}
    return {}


def _spread_or_nan(values):
    return values[0] if len(values) == 1 else float("nan")


def cmd_crosscheck(args, out, err):
    model = _load_model(args.model)
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env is not None else 0
        except ValueError:
            raise CliError(EXIT_PARSE, f"{SEED_ENV} must be an integer, got {env!r}")
    if args.acts < 1:
        raise CliError(EXIT_PARSE, "--acts must be positive")
    groups = _paths_for(model, CROSSCHECK_TOL)
    if not any(len(p) > 1 for p in groups.values()):
        if isinstance(model, BipolarCapacity):
            raise CliError(EXIT_INVALID, "bipolar capacity violates the permutation-invariance condition:\n"
                           + str(check_eb(model, CROSSCHECK_TOL)))
        raise CliError(EXIT_KIND, f"fewer than two formula paths apply to a {_kind_name(model)} model")
    acts = _random_acts(model.n, args.acts, np.random.default_rng(seed))
    worst_all = 0.0
    out.write(f"model: {_kind_name(model)} n={model.n} acts={args.acts} seed={seed}\n")
    for group, paths in groups.items():
        names = list(paths)
        worst = 0.0
        for f in acts:
            vals = [paths[name](f) for name in names]
            for a, b in itertools.combinations(vals, 2):
                d = abs(a - b)
                worst = max(worst, d) if np.isfinite(d) else float("inf")
        worst_all = max(worst_all, worst)
        out.write(f"{group}: {len(names)} paths [{', '.join(names)}] max residual {worst:.3e}\n")
    ok = worst_all <= CROSSCHECK_TOL
    out.write(("ok" if ok else "FAIL") + f" (tolerance {CROSSCHECK_TOL:g})\n")
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="bicap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an integral of an act")
    p.add_argument("model")
    p.add_argument("act")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--sigma", help="1-based permutation for --method bipolar, e.g. 1,3,2")
    p.add_argument("--no-validate", action="store_true", help="skip structural validation of the model")

    p = sub.add_parser("transform", help="print a transform of a model as JSON")
    p.add_argument("model")
    p.add_argument("--to", choices=TARGETS, required=True)

    p = sub.add_parser("validate", help="check a model's defining conditions")
    p.add_argument("model")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("reduce", help="reduce a bipolar capacity to a bi-capacity")
    p.add_argument("model")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("crosscheck", help="compare every applicable formula on random acts")
    p.add_argument("model")
    p.add_argument("--acts", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV}, then 0")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "eval":
            return cmd_eval(args, out)
        if args.command == "transform":
            return cmd_transform(args, out)
        if args.command == "validate":
            return cmd_validate(args, out)
        if args.command == "reduce":
            return cmd_reduce(args, out)
        return cmd_crosscheck(args, out, err)
    except CliError as exc:
        err.write(f"bicap {args.command}: {exc}\n")
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
