"""Command-line interface and JSON reports.

Every command resolves a :class:`RunConfig` (defaults, then an optional JSON
config file, then flags), runs deterministic computations seeded from
``seed`` and emits a JSON report.  Exit codes: 0 when every check passes, 1
when a mathematical property fails, 2 on invalid input.
"""

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, coeff_systems as cs
from . import ld_abelian, ld_nilpotent, obstruction, unipotent_groups, zmod
from .errors import InvalidInputError
from .free_group import build_relator

SYSTEMS = ("g2-short", "g2-long-heisenberg", "custom", "trivial", "sym-power")
LEVI_KINDS = ("auto", "random", "mildly-regular", "trivial")

CONVENTIONS = {
    "commutator": "(x, y) = x^-1 y^-1 x y",
    "relator": "x0^q (x0, x1) (x2, x3) ... (xn, xn+1)",
    "d1": "d1(v)_i = (rho(x_i) - 1) v",
    "d2": "d2(c) = sum_i rho(dR/dx_i) c_i",
    "cochain_extension": "c(gh) = c(g) + g.c(h) + 1/2 [c(g), g.c(h)]",
    "gram_basis_order": "index j*(n+2) + i for coordinate j on generator x_i",
    "power_formula": dict(unipotent_groups.POWER_CONVENTIONS),
    "precision": "all lifts are to Z/p^s for finite s; no characteristic-0 claim",
}


@dataclass
class RunConfig:
    """Resolved run parameters.

    Attributes:
        p: Odd prime.
        s: Working precision.
        n: Even rank parameter; there are ``n + 2`` generators.
        q_exponent: ``q = p ** q_exponent``.
        levi: A keyword from ``LEVI_KINDS`` or ``n + 2`` integers ``l_i``.
        system: One of ``SYSTEMS``.
        rank: Rank of the trivial module.
        sym_k: Symmetric power for ``sym-power``.
        sym_d: Determinant twist for ``sym-power``.
        b03: Short-root bracket constant on ``(E0, E3)``.
        b12: Short-root bracket constant on ``(E1, E2)``.
        custom: Payload with ``m_a``, ``bracket``, ``ad_actions`` and
            ``z_actions`` for the ``custom`` system.
        check_ld: Validate systems before use.
        seed: Master seed.
        trials: Sample or instance count.
        target_precision: Lifting target or probe depth.
        sweep_p: Primes for sweeps; defaults to ``[p]``.
    """

    p: int = 5
    s: int = 1
    n: int = 2
    q_exponent: int = 1
    levi: object = "auto"
    system: str = "g2-short"
    rank: int = 1
    sym_k: int = 3
    sym_d: int = 0
    b03: int = cs.DEFAULT_B03
    b12: int = cs.DEFAULT_B12
    custom: dict = field(default_factory=dict)
    check_ld: bool = True
    seed: int = 0
    trials: int = None
    target_precision: int = None
    sweep_p: list = None

    def validate(self):
        """Raise :class:`InvalidInputError` on inconsistent parameters."""
        if self.system not in SYSTEMS:
            raise InvalidInputError(f"unknown system {self.system!r}; choose from {', '.join(SYSTEMS)}")
        for name in ("p", "s", "n", "q_exponent", "rank", "seed"):
            if not isinstance(getattr(self, name), int):
                raise InvalidInputError(f"{name} must be an integer")
        if self.n < 2 or self.n % 2:
            raise InvalidInputError(f"n must be even and at least 2, got {self.n}")
        if self.s < 1 or self.q_exponent < 1 or self.rank < 1:
            raise InvalidInputError("s, q_exponent and rank must be positive")
        primes = self.sweep_p or [self.p]
        for p in primes:
            zmod.RingModulus(p, 1)
            if self.system.startswith("g2") and p < 5:
                raise InvalidInputError(f"G2 systems need p >= 5, got {p}")
        if isinstance(self.levi, str):
            if self.levi not in LEVI_KINDS:
                raise InvalidInputError(f"unknown levi kind {self.levi!r}")
        else:
            if len(self.levi) != self.n + 2:
                raise InvalidInputError(f"levi must have n + 2 = {self.n + 2} entries, got {len(self.levi)}")
        if self.system == "custom":
            for key in ("m_a", "bracket", "ad_actions", "z_actions"):
                if key not in self.custom:
                    raise InvalidInputError(f"custom system needs {key!r}")
            if len(self.custom["ad_actions"]) != self.n + 2 or len(self.custom["z_actions"]) != self.n + 2:
                raise InvalidInputError("custom actions must have one entry per generator")
        return self


def _parse_levi(text):
    if text in LEVI_KINDS:
        return text
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise InvalidInputError(f"levi must be a keyword or comma-separated integers, got {text!r}") from None


def _parse_primes(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise InvalidInputError(f"sweep list must be comma-separated integers, got {text!r}") from None


def resolve_config(args):
    """Merge defaults, the JSON config file and explicit flags."""
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidInputError("config must be a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        known = set(RunConfig.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidInputError(f"unknown config keys: {', '.join(unknown)}")
    for name in ("p", "s", "n", "q_exponent", "system", "rank", "seed", "trials", "target_precision"):
        val = getattr(args, name)
        if val is not None:
            data[name] = val
    if args.levi is not None:
        data["levi"] = _parse_levi(args.levi)
    if args.sweep_p is not None:
        data["sweep_p"] = _parse_primes(args.sweep_p)
    return RunConfig(**data).validate()


def instance_rng(cfg, *tags):
    """Generator seeded from the master seed and instance tags."""
    return np.random.default_rng([cfg.seed, *[int(t) for t in tags]])


def build_levi(cfg, ring, rng):
    G = cfg.n + 2
    kind = cfg.levi
    if kind == "auto":
        kind = "mildly-regular" if ring.s > 1 else "random"
    if kind == "random":
        return cs.random_unipotent_levi(ring, G, rng)
    if kind == "mildly-regular":
        return cs.mildly_regular_levi(ring, cfg.n, rng)
    if kind == "trivial":
        return cs.unipotent_levi(ring, [0] * G)
    return cs.unipotent_levi(ring, cfg.levi)


def build_system(cfg, ring, rng):
    """The coefficient system named by the config, over ``ring``."""
    G = cfg.n + 2
    if cfg.system == "trivial":
        return cs.trivial_system(ring, G, cfg.rank)
    if cfg.system == "custom":
        c = cfg.custom
        return cs.generic_heisenberg(
            int(c["m_a"]), np.array(c["bracket"], dtype=object),
            [np.array(a, dtype=object) for a in c["ad_actions"]], [int(z) for z in c["z_actions"]], ring,
        )
    levi = build_levi(cfg, ring, rng)
    if cfg.system == "sym-power":
        return cs.sym_power_twist(levi, cfg.sym_k, cfg.sym_d)
    if cfg.system == "g2-short":
        return cs.g2_short_root(levi, cfg.b03, cfg.b12)
    return cs.g2_long_heisenberg(levi)


def _checked(cfg, sys_, pres):
    if cfg.check_ld:
        rep = cs.validate_system(sys_, pres)
        if not rep.ok:
            raise InvalidInputError("system failed validation: " + "; ".join(rep.messages))
    return sys_


def _levi_record(sys_):
    levi = getattr(sys_, "levi", None)
    if levi is None:
        return None
    return {"l": [int(v) for v in levi.l], "diag": None if levi.diag is None else [list(d) for d in levi.diag]}


def cmd_cohomology(cfg):
    R = zmod.RingModulus(cfg.p, cfg.s)
    pres = build_relator(cfg.n, cfg.p**cfg.q_exponent)
    sys_ = build_system(cfg, R, instance_rng(cfg, cfg.p))
    pieces = {"module": sys_} if isinstance(sys_, cs.AbelianSystem) else {
        "ad": sys_.ad_system(), "center": sys_.center_system()}
    out, ok = {}, True
    for name, piece in pieces.items():
        cx = ld_abelian.build_complex(pres, piece, check_ld=cfg.check_ld)
        h = ld_abelian.cohomology(cx)
        expected = -cfg.n * piece.rank * cfg.s
        passed = h.euler_length == expected
        ok &= passed
        out[name] = {"cohomology": h.as_dict(), "euler_length": h.euler_length, "euler_expected": expected,
                     "euler_ok": passed}
    lines = [f"{k}: dims {v['cohomology']['dims']} euler {v['euler_length']} ({'ok' if v['euler_ok'] else 'FAIL'})"
             for k, v in out.items()]
    return ok, {"pieces": out, "levi": _levi_record(sys_)}, lines


def _gram_instance(cfg, p, idx):
    R = zmod.RingModulus(p, 1)
    pres = build_relator(cfg.n, p**cfg.q_exponent)
    sys_ = _checked(cfg, build_system(cfg, R, instance_rng(cfg, p, idx)), pres)
    return sys_, pres, ld_nilpotent.gram_matrix(sys_, pres)


def cmd_mr2(cfg):
    primes = cfg.sweep_p or [cfg.p]
    trials = cfg.trials or 1
    rows, ok = [], True
    for p in primes:
        for idx in range(trials):
            sys_, _, rep = _gram_instance(cfg, p, idx)
            ok &= rep.mr2_verdict
            rows.append({"p": p, "instance": idx, "levi": _levi_record(sys_), **rep.as_dict()})
    good = sum(r["mr2"] for r in rows)
    anti = sum(r["anti_triangular"] for r in rows)
    lines = [f"mr2 true on {good}/{len(rows)} instances; anti-triangular on {anti}/{len(rows)}"]
    return ok, {"instances": rows}, lines


def cmd_gram(cfg):
    sys_, _, rep = _gram_instance(cfg, cfg.p, 0)
    payload = {"levi": _levi_record(sys_), "matrix": np.asarray(rep.matrix).tolist(), **rep.as_dict()}
    lines = ["block map (1 = nonzero):"]
    lines += ["  " + " ".join(str(int(b)) for b in row) for row in rep.block_structure]
    lines.append(f"anti-triangular {rep.anti_triangular}, det {rep.determinant}, mr2 {rep.mr2_verdict}")
    return rep.mr2_verdict, payload, lines


def cmd_power_check(cfg):
    kind = cfg.system if cfg.system in ("g2-short", "g2-long-heisenberg") else "g2-short"
    primes = cfg.sweep_p or [cfg.p]
    trials = cfg.trials or 100
    rows, ok = [], True
    for p in primes:
        R = zmod.RingModulus(p, cfg.s)
        F = R.at(1)
        grp = unipotent_groups.ParabolicGroup(kind, R, cfg.b03, cfg.b12)
        low = unipotent_groups.ParabolicGroup(kind, F, cfg.b03, cfg.b12)
        rng = instance_rng(cfg, p)
        mismatch = not_id = 0
        for _ in range(trials):
            g = grp.random(rng)
            if kind == "g2-short":
                q = int(rng.integers(1, 101))
                if unipotent_groups.power_closed_form(grp, g, q) != unipotent_groups.power_iterated(grp, g, q):
                    mismatch += 1
            gl = low.element(g.l, g.u.ad, g.u.z)
            routes = [unipotent_groups.power_iterated(low, gl, p)]
            if kind == "g2-short":
                routes.append(unipotent_groups.power_closed_form(low, gl, p))
            if any(r != low.identity() for r in routes):
                not_id += 1
        passed = mismatch == 0 and not_id == 0
        ok &= passed
        rows.append({"p": p, "s": cfg.s, "trials": trials, "closed_form_mismatches": mismatch,
                     "g_to_p_not_identity": not_id, "ok": passed})
    lines = [f"p={r['p']}: closed-form mismatches {r['closed_form_mismatches']}, "
             f"g^p != id in {r['g_to_p_not_identity']}/{r['trials']}" for r in rows]
    return ok, {"group": kind, "results": rows}, lines


def _brute_force_budget(p, G, dims=2):
    return p ** (dims + G) <= 5**6


def cmd_lift(cfg):
    target = cfg.target_precision or obstruction.DEFAULT_TARGET
    trials = cfg.trials if cfg.trials is not None else 50
    R = zmod.RingModulus(cfg.p, max(cfg.s, target))
    pres = build_relator(cfg.n, cfg.p**cfg.q_exponent)
    rng = instance_rng(cfg, cfg.p)
    sys_ = _checked(cfg, build_system(cfg, R, rng), pres)
    case = obstruction.classify(sys_, pres)
    rows = []
    lifted = verified = 0
    G = pres.n_generators
    ad_basis = [np.eye(G * sys_.m_a, dtype=object)[k] for k in range(min(2, sys_.m_a))]
    for idx in range(trials):
        cbar = obstruction.sample_mod_p_cocycle(sys_, pres, rng, ad_precision=target)
        res = obstruction.lift_to_precision(sys_, pres, cbar, target, seed=cfg.seed + idx)
        if isinstance(res, obstruction.LiftState):
            sound = obstruction.verify_lift(sys_, pres, res)
            independent = unipotent_groups.relator_is_identity(sys_.at(res.precision), pres,
                                                               res.cocycle.reduce(R.at(res.precision)))
            lifted += sound and independent
            rows.append({"sample": idx, "outcome": "lifted", "precision": res.precision, "sound": sound,
                         "independent_check": independent, "used_quadratic": res.used_quadratic})
        else:
            row = {"sample": idx, "outcome": "obstructed", **res.as_dict()}
            if _brute_force_budget(cfg.p, G) and res.state is not None:
                nonliftable = not obstruction.brute_force_liftable(sys_, pres, res.state, ad_basis, res.level)
                row["brute_force_nonliftable"] = nonliftable
                verified += nonliftable
            rows.append(row)
    failures = trials - lifted
    predicted = case.tag == "outside-theorem-hypotheses"
    ok = failures == 0 or (predicted and verified == failures)
    lines = [f"classification: {case.tag}", f"lifted {lifted}/{trials} to precision p^{target}"]
    if failures:
        lines.append(f"obstructed {failures}, brute-force verified {verified}")
    payload = {"classification": case.as_dict(), "target_precision": target, "levi": _levi_record(sys_),
               "samples": rows, "lifted": lifted, "obstructed": failures, "verified_obstructions": verified,
               "note": "finite precision only; the Galois-equivariant averaging step is not modelled"}
    return ok, payload, lines


def cmd_delta_probe(cfg):
    S = cfg.target_precision or 3
    R = zmod.RingModulus(cfg.p, max(cfg.s, S))
    pres = build_relator(cfg.n, cfg.p**cfg.q_exponent)
    sys_ = _checked(cfg, build_system(cfg, R, instance_rng(cfg, cfg.p)), pres)
    levels = [ld_nilpotent.kernel_and_kld(sys_, pres, s).as_dict() for s in range(1, S + 1)]
    bound_ok = all(r["ker_dim"] <= sys_.m_a for r in levels)
    whole = all(r["ker_dim"] == r["z_dim"] for r in levels)
    stabilized = None if whole else (len(levels) >= 2 and levels[-1]["kld_dim"] == levels[-2]["kld_dim"])
    probe = ld_abelian.h0_torsion_probe(pres, sys_.ad_system(), max(S, 2)) if R.s >= 2 else None
    mr1 = None if probe is None else probe.verdict == "no-free-fixed-vectors"
    ok = bound_ok and mr1 is not False
    lines = [f"s={r['s']}: Z dim {r['z_dim']}, radical dim {r['ker_dim']}, K_LD dim {r['kld_dim']}" for r in levels]
    lines.append(f"radical bound <= {sys_.m_a}: {bound_ok}; MR1 proxy: {mr1}; stabilized: {stabilized}")
    payload = {"levels": levels, "radical_bound_ok": bound_ok, "radical_is_all_of_z": whole,
               "stabilized": stabilized, "mr1_proxy": mr1, "h0_probe": None if probe is None else probe.as_dict(),
               "levi": _levi_record(sys_)}
    return ok, payload, lines


def cmd_validate(cfg):
    R = zmod.RingModulus(cfg.p, cfg.s)
    pres = build_relator(cfg.n, cfg.p**cfg.q_exponent)
    sys_ = build_system(cfg, R, instance_rng(cfg, cfg.p))
    rep = cs.validate_system(sys_, pres)
    lines = [f"validation {'passed' if rep.ok else 'failed'}"] + [f"  {m}" for m in rep.messages]
    return rep.ok, {"validation": rep.as_dict(), "levi": _levi_record(sys_)}, lines


COMMANDS = {
    "cohomology": cmd_cohomology,
    "mr2": cmd_mr2,
    "gram": cmd_gram,
    "power-check": cmd_power_check,
    "lift": cmd_lift,
    "delta-probe": cmd_delta_probe,
    "validate": cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="demuskin", description="Lyndon-Demuskin cohomology checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--p", type=int)
        sp.add_argument("--s", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--q-exponent", dest="q_exponent", type=int)
        sp.add_argument("--levi", help="comma-separated l_i or one of " + ", ".join(LEVI_KINDS))
        sp.add_argument("--system", choices=SYSTEMS)
        sp.add_argument("--rank", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--target-precision", dest="target_precision", type=int)
        sp.add_argument("--sweep-p", dest="sweep_p", help="comma-separated primes")
        sp.add_argument("--out", help="write the JSON report here ('-' for stdout)")
        sp.add_argument("--quiet", action="store_true")
    return parser


def render(report):
    """Canonical JSON text of a report."""
    return json.dumps(report, indent=2, sort_keys=True, default=int)


def run(argv=None):
    """Parse, execute and return ``(exit_code, report)``."""
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = resolve_config(args)
        ok, payload, lines = COMMANDS[args.command](cfg)
    except (InvalidInputError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None, args
    report = {
        "command": args.command,
        "tool_version": __version__,
        "config": asdict(cfg),
        "conventions": {**CONVENTIONS, "bracket_constants": {"b03": cfg.b03, "b12": cfg.b12}},
        "passed": bool(ok),
        "result": payload,
        "timing": {"seconds": round(time.perf_counter() - start, 4)},
    }
    if not args.quiet and args.out != "-":
        for line in lines:
            print(line)
        print("PASS" if ok else "FAIL")
    return (0 if ok else 1), report, args


def main(argv=None):
    code, report, args = run(argv)
    if report is not None and args.out:
        text = render(report)
        if args.out == "-":
            print(text)
        else:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
