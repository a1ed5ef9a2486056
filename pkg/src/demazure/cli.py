"""Command-line interface: one computation per invocation, JSON on stdout.

Exit codes: 0 success, 2 configuration error, 3 failed hypothesis (an element
not in S, a failed division or verification), 4 precision exhausted.  Timing
goes to stderr so that stdout is byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field, fields

from .coeffring import parse_ring
from .demazurealgebra import DemazureAlgebra, braid_words
from .dualalgebra import DualAlgebra
from .errors import ConfigError, DemazureError, HypothesisFailure, ParseError, PrecisionExhausted
from .expr import evaluate_expression
from .formalgroupalgebra import AlgebraConfig, regularity_report
from .powerseries import DIVISION_LEDGER
from .rootdata import build
from .suites import SUITES, run_suite

log = logging.getLogger("demazure")

COMMANDS = ("roots", "weyl", "rebase", "mul", "coproduct", "dual-mult-table", "eta", "kappa", "torsion",
            "charmap", "verify")


@dataclass
class JobConfig:
    type: str = "A2"
    lattice: object = "adj"
    ring: str = "Z"
    fgl: object = "additive"
    prec: int = 6
    slack: int | None = None
    words: list = field(default_factory=list)
    seed: int = 0
    threads: int = 1
    adaptive: bool = True
    command: str = ""
    args: list = field(default_factory=list)

    def algebra_config(self) -> AlgebraConfig:
        return AlgebraConfig(type=self.type, lattice=self.lattice, ring=self.ring, fgl=self.fgl,
                             prec=self.prec, slack=self.slack, adaptive=self.adaptive)

    def echo(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "JobConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**data)


def parse_word(text: str) -> tuple[int, ...]:
    """``"1,2,1"``, ``"[1,2,1]"``, ``"121"`` or ``"e"``/``""`` for the empty word."""
    t = text.strip().strip("[]()").strip()
    if t in ("", "e"):
        return ()
    try:
        if "," in t or " " in t:
            return tuple(int(p) for p in t.replace(",", " ").split())
        return tuple(int(c) for c in t)
    except ValueError:
        raise ParseError(f"cannot read a word from {text!r}") from None


def _parse_lattice(text):
    if isinstance(text, str) and text.strip().startswith(("{", "[")):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"lattice is not valid JSON: {exc.msg}", column=exc.colno) from None
        return data["basis"] if isinstance(data, dict) else data
    return text


def _parse_fgl(text):
    if isinstance(text, str) and text.strip().startswith("{"):
        return json.loads(text)
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="demazure", description="Formal affine Demazure algebras and their duals.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("args", nargs="*", help="command arguments (word, expressions, suite name, ...)")
    p.add_argument("--type")
    p.add_argument("--lattice", help="adj, sc, or a JSON basis in weight coordinates")
    p.add_argument("--ring", help="Z, Z/m, Z[1/p], Z[a,b], Z/m[t], ...")
    p.add_argument("--fgl", help="additive, multiplicative:beta=b, hyperbolic:mu1=a,mu2=b or custom:<F(u,v)>")
    p.add_argument("--prec", type=int)
    p.add_argument("--slack", type=int)
    p.add_argument("--words", help="reduced words replacing canonical ones, e.g. '2,1,2;2,1'")
    p.add_argument("--no-adapt", dest="adaptive", action="store_false", default=None,
                   help="keep the working precision fixed instead of raising it until results are certified")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--config", help="JSON file with any of the options; flags win")
    p.add_argument("--human", action="store_true", help="short readable summary instead of JSON")
    p.add_argument("--emit-fixture", metavar="PATH", help="also write the JSON document to PATH")
    return p


def job_from_args(ns: argparse.Namespace) -> JobConfig:
    data: dict = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ParseError(f"config file is not valid JSON: {exc.msg}", column=exc.colno) from None
    for key in ("type", "lattice", "ring", "fgl", "prec", "slack", "seed", "threads", "adaptive"):
        value = getattr(ns, key)
        if value is not None:
            data[key] = value
    if ns.words is not None:
        data["words"] = [list(parse_word(w)) for w in ns.words.split(";") if w.strip()]
    data["command"] = ns.command
    data["args"] = list(ns.args)
    job = JobConfig.from_dict(data)
    job.lattice = _parse_lattice(job.lattice)
    job.fgl = _parse_fgl(job.fgl)
    if job.prec < 0:
        raise ConfigError("precision must be nonnegative")
    return job


# -- commands ------------------------------------------------------------------------------------
def _algebra(job: JobConfig) -> DemazureAlgebra:
    D = DemazureAlgebra(job.algebra_config())
    if job.words:
        W = D.W
        overrides = {}
        for word in job.words:
            word = tuple(word)
            if not W.is_reduced(word):
                raise ConfigError(f"override word {list(word)} is not reduced")
            overrides[W.word_to_element(word)] = word
        D = DemazureAlgebra(job.algebra_config(), overrides)
    return D


def _need(job: JobConfig, n: int, usage: str) -> list[str]:
    if len(job.args) != n:
        raise ConfigError(f"usage: {job.command} {usage}")
    return job.args


def _series_map(D: DemazureAlgebra, coeffs: dict) -> list[dict]:
    return [{"w": list(D.words[w]), "coeff": s.to_json()} for w, s in sorted(coeffs.items())]


def cmd_roots(job):
    from .rootdata import build

    d = build(job.type, job.lattice)
    out = d.describe()
    out.update(npos=d.npos, cartan_determinant=d.cartan_determinant(), expected_determinant=d.expected_determinant(),
               torsion_primes=list(d.torsion_primes()))
    return out


def cmd_weyl(job):
    from .rootdata import build, enumerate_weyl

    d = build(job.type, job.lattice)
    W = enumerate_weyl(d)
    out = W.describe()
    for item in out["elements"]:
        k = item["index"]
        item["inversions"] = sorted(W.inversion_set(k))
        item["bruhat_below"] = [list(W.word(v)) for v in W.bruhat_below(k)]
    return out


def cmd_rebase(job):
    (text,) = _need(job, 1, "<word>")
    D = _algebra(job)
    d = D.rebase_word(parse_word(text))
    return {"word": list(parse_word(text)), "terms": _series_map(D, d.coeffs), "certified_prec": d.prec}


def _qw_from_expression(alg: DemazureAlgebra, text: str):
    A, ctx = alg.A, alg.ctx
    names = {f"x{i + 1}": A.scalar(ctx.coord(i)) for i in range(ctx.n)}
    for name in getattr(ctx.ring, "vars", ()):
        names[name] = A.scalar(ctx.const(ctx.ring.parse(name)))
    return evaluate_expression(text, names, lambda n: A.scalar(n),
                               calls={"x": lambda lam: A.scalar(ctx.x_of(lam))},
                               indexers={"X": lambda word: A.x_word(tuple(word)),
                                         "delta": lambda word: A.delta(ctx.W.word_to_element(word))})


def cmd_mul(job):
    left, right = _need(job, 2, "<expr> <expr>")
    D = _algebra(job)

    def compute(alg):
        a = _qw_from_expression(alg, left)
        b = _qw_from_expression(alg, right)
        return alg.A.rebase_certified(a * b)

    coeffs = {w: s for w, s in D.certified(compute).items() if not s.is_zero()}
    low = min((s.prec for s in coeffs.values()), default=None)
    return {"left": left, "right": right, "terms": _series_map(D, coeffs), "certified_prec": low}


def cmd_coproduct(job):
    (text,) = _need(job, 1, "<word>")
    D = _algebra(job)
    word = parse_word(text)
    col = D.coproduct_word(word)
    terms = [{"u": list(D.words[u]), "v": list(D.words[v]), "coeff": s.to_json()} for (u, v), s in sorted(col.items())]
    return {"word": list(word), "terms": terms,
            "certified_prec": min((s.prec for s in col.values()), default=None)}


def cmd_dual_mult_table(job):
    D = _algebra(job)
    X = DualAlgebra(D)
    table = X.multiplication_table()
    rows = [{"u": list(D.words[u]), "v": list(D.words[v]),
             "product": [{"w": list(D.words[w]), "coeff": c.to_json()} for w, c in sorted(p.coords.items())]}
            for (u, v), p in sorted(table.items())]
    return {"words": {str(w): list(D.words[w]) for w in range(len(D.W))}, "products": rows,
            "certified_prec": X.table.certified_prec()}


def cmd_eta(job):
    i, j = (int(a) for a in _need(job, 2, "<i> <j>"))
    D = _algebra(job)
    eta = D.eta_coeffs(i, j)
    residual = D.eta_residual(i, j, eta)
    left, right = braid_words(i, j, D.braid_order(i, j))
    return {"i": i, "j": j, "m": D.braid_order(i, j), "left": list(left), "right": list(right),
            "eta": _series_map(D, eta.coeffs), "certified_prec": eta.prec, "residual_zero": residual.is_zero()}


def _root_from_text(D: DemazureAlgebra, text: str) -> int:
    datum = D.ctx.datum
    t = text.strip()
    if "," not in t:
        return datum.simple_index(int(t))
    coords = [int(c) for c in t.split(",")]
    for r in datum.roots:
        if list(r.simple_coords) == coords:
            return r.index
    from .errors import NotARoot

    raise NotARoot(f"{coords} (simple-root coordinates) is not a root")


def cmd_kappa(job):
    D = _algebra(job)
    ctx = D.ctx
    if job.args:
        indices = [_root_from_text(D, a) for a in job.args]
    else:
        indices = [r.index for r in ctx.datum.positive_roots]
    out = []
    for k in indices:
        s = ctx.kappa(k).truncate(job.prec)
        out.append({"root": k, "simple_coords": list(ctx.datum.roots[k].simple_coords), "kappa": s.to_json(),
                    "constant": all(sum(e) == 0 for e in s.terms)})
    return {"kappa": out}


def cmd_torsion(job):
    return DualAlgebra(_algebra(job)).torsion_gcd()


def cmd_charmap(job):
    X = DualAlgebra(_algebra(job))
    out = X.charmap_surjectivity()
    if out["surjective"]:
        out["borel_presentation"] = X.borel_presentation_check()
    return out


def cmd_verify(job):
    (name,) = _need(job, 1, "<suite>")
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    DIVISION_LEDGER.reset()
    report = run_suite(name, job.algebra_config(), seed=job.seed)
    report["divisions"] = DIVISION_LEDGER.snapshot()
    return report


HANDLERS = {"roots": cmd_roots, "weyl": cmd_weyl, "rebase": cmd_rebase, "mul": cmd_mul, "coproduct": cmd_coproduct,
            "dual-mult-table": cmd_dual_mult_table, "eta": cmd_eta, "kappa": cmd_kappa, "torsion": cmd_torsion,
            "charmap": cmd_charmap, "verify": cmd_verify}


def run(job: JobConfig) -> dict:
    """The JSON document for one job (without timing)."""
    result = HANDLERS[job.command](job)
    doc = {"command": job.command, "config": job.echo(), "result": result}
    cfg = job.algebra_config()
    weak = [r for r in regularity_report(build(cfg.type, cfg.lattice), parse_ring(cfg.ring)) if not r["regular"]]
    if weak:
        # quotients by these roots are canonical choices, not unique ones
        doc["advisories"] = [{"reason": "root_not_regular", **r} for r in weak]
    return doc


def _human(doc: dict) -> str:
    res = doc["result"]
    lines = [f"{doc['command']} on {doc['config']['type']} ({doc['config']['lattice']}), "
             f"fgl {doc['config']['fgl']}, ring {doc['config']['ring']}"]
    if "ok" in res:
        lines.append(f"suite {res.get('suite')}: {'pass' if res['ok'] else 'FAIL'} ({len(res['checks'])} checks)")
        lines += [f"  failed: {c}" for c in res["checks"] if not c["ok"]][:10]
    for key in ("gcd", "surjective", "obstruction", "certified_prec", "residual_zero"):
        if key in res:
            lines.append(f"{key}: {res[key]}")
    if "terms" in res:
        lines.append(f"{len(res['terms'])} nonzero terms")
    return "\n".join(lines)


def _error_doc(exc: DemazureError) -> dict:
    return {"error": exc.to_json()}


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, PrecisionExhausted):
        return 4
    if isinstance(exc, HypothesisFailure):
        return 3
    if isinstance(exc, (ConfigError, KeyError, ValueError)):
        return 2
    return 1


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(message)s")
    parser = build_parser()
    ns = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        job = job_from_args(ns)
        doc = run(job)
    except DemazureError as exc:
        print(json.dumps(_error_doc(exc)))
        return exit_code(exc)
    except (KeyError, ValueError) as exc:
        print(json.dumps({"error": {"reason": "config_error", "message": str(exc)}}))
        return 2
    text = json.dumps(doc, separators=(",", ":"))
    if ns.emit_fixture:
        with open(ns.emit_fixture, "w") as fh:
            fh.write(text + "\n")
    print(_human(doc) if ns.human else text)
    print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    res = doc["result"]
    if job.command == "verify" and not res.get("ok", True):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
