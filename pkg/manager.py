"""
manager.py
───────────
Routes one CLI command to its handler and returns a JSON-ready report.

Routing table
─────────────
  analyze       full pipeline (Coordinator)
  condense      condensed pattern
  termrank      term rank + matching witness
  mr1           does some member have rank one?          (predicate)
  det2          exact determinant of a dimension-2 tensor
  rank222       real rank and Δ of a 2×2×2 tensor
  rank-bounds   mr / Mr bounds with certificates
  sns-check     necessary SNS test + singular-member sampling (predicate)
  sign-inverse  order-2 sign left/right inverse decision    (predicate)
  product       general product A·B
  apply         Ax^{k−1}
  sample        write members of Q(S) to disk

Pattern commands accept any tensor file and use its sign pattern.
Predicates report their decision so main.py can honour --strict.

Output folder (sample)
──────────────────────
{out}/
├── {stem}_member_001.json
├── {stem}_member_002.json
└── ...
"""

from __future__ import annotations

import argparse
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

from coordinator import Coordinator
from qualtensor.combinatorics import sns_tensor_necessary, term_rank
from qualtensor.config import SamplingConfig, SearchConfig
from qualtensor.determinant import det_dim2, sns_falsify_sample
from qualtensor.errors import UnsupportedShapeError
from qualtensor.inverse import (
    has_sign_left_inverse_order2,
    has_sign_right_inverse_order2,
    left_inverse_order2,
    right_inverse_order2,
)
from qualtensor.qualitative import SignTensor, as_generator, condense, is_mr1, probe_member, sample_member, sign_pattern
from qualtensor.rank import bounds_report, hyperdet_222, multilinear_rank, rank_222_exact
from qualtensor.tensor import DenseTensor, apply_power, shao_product
from qualtensor.tensor_io import (
    dump_tensor,
    format_rational,
    load_tensor,
    matrix_to_list,
    parse_vector,
    tensor_to_dict,
)
from settings import Settings

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    report: dict[str, Any]
    predicate: Optional[bool] = None      # set by decision commands only


class Manager:
    """
    Holds the command routing table. One Manager per CLI invocation.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self._session_id = "default"
        self.routes: dict[str, Callable[[argparse.Namespace], CommandResult]] = {
            "analyze":      self._analyze,
            "condense":     self._condense,
            "termrank":     self._termrank,
            "mr1":          self._mr1,
            "det2":         self._det2,
            "rank222":      self._rank222,
            "rank-bounds":  self._rank_bounds,
            "sns-check":    self._sns_check,
            "sign-inverse": self._sign_inverse,
            "product":      self._product,
            "apply":        self._apply,
            "sample":       self._sample,
        }

        logger.debug("[manager] manager.initialised")

    # ── Public API ─────────────────────────────────────────────────────────────

    def dispatch(self, args: argparse.Namespace, session_id: str = "default") -> CommandResult:
        handler = self.routes.get(args.command)
        if handler is None:
            raise UnsupportedShapeError(f"unknown command {args.command!r}")

        started = time.monotonic()
        logger.info(f"[manager] command.started | session={session_id} | command={args.command}")
        self._session_id = session_id
        result = handler(args)
        duration = round(time.monotonic() - started, 3)
        logger.info(
            f"[manager] command.complete | session={session_id} | command={args.command} | "
            f"predicate={result.predicate} | duration={duration}s"
        )
        return result

    # ── Option merging ─────────────────────────────────────────────────────────

    def _search(self, args: argparse.Namespace) -> SearchConfig:
        return self.settings.search.with_overrides(
            restarts=getattr(args, "restarts", None),
            iterations=getattr(args, "iterations", None),
            seed=getattr(args, "seed", None),
            r_max=getattr(args, "r_max", None),
        )

    def _sampling(self, args: argparse.Namespace) -> SamplingConfig:
        return self.settings.sampling.with_overrides(
            trials=getattr(args, "trials", None),
            samples=getattr(args, "samples", None),
            seed=getattr(args, "seed", None),
        )

    @staticmethod
    def _pattern(path: str) -> SignTensor:
        return sign_pattern(load_tensor(path))

    # ── Handlers ───────────────────────────────────────────────────────────────

    def _analyze(self, args: argparse.Namespace) -> CommandResult:
        coordinator = Coordinator(self._search(args), self._sampling(args))
        return CommandResult(coordinator.analyze(self._pattern(args.file), self._session_id))

    def _condense(self, args: argparse.Namespace) -> CommandResult:
        S = self._pattern(args.file)
        C = condense(S)
        return CommandResult({"shape": list(C.dims), "condensed": tensor_to_dict(C)})

    def _termrank(self, args: argparse.Namespace) -> CommandResult:
        result = term_rank(self._pattern(args.file))
        return CommandResult({"term_rank": result.value, "witness": result.matching.to_list()})

    def _mr1(self, args: argparse.Namespace) -> CommandResult:
        decision = is_mr1(self._pattern(args.file))
        return CommandResult({"mr1": decision}, predicate=decision)

    def _det2(self, args: argparse.Namespace) -> CommandResult:
        return CommandResult({"det": format_rational(det_dim2(load_tensor(args.file)))})

    def _rank222(self, args: argparse.Namespace) -> CommandResult:
        A = load_tensor(args.file)
        return CommandResult({
            "rank": rank_222_exact(A),
            "hyperdet": format_rational(hyperdet_222(A)),
            "multilinear_rank": multilinear_rank(A).to_list(),
        })

    def _rank_bounds(self, args: argparse.Namespace) -> CommandResult:
        search, sampling = self._search(args), self._sampling(args)
        report = bounds_report(self._pattern(args.file), search, sampling).to_dict()
        report["options"] = {"search": search.to_dict(), "sampling": sampling.to_dict()}
        return CommandResult(report)

    def _sns_check(self, args: argparse.Namespace) -> CommandResult:
        S = self._pattern(args.file)
        sampling = self._sampling(args)
        necessary = sns_tensor_necessary(S)
        report: dict[str, Any] = {"sns_necessary": necessary.to_dict(), "sample": None}
        refuted = False

        if S.dims[0] == 2 and S.order >= 2:
            sample = sns_falsify_sample(S, sampling.trials, sampling.seed, sampling.magnitude_range)
            refuted = sample.refuted
            report["sample"] = {
                "trials": sample.trials,
                "refuted": sample.refuted,
                "counterexample": tensor_to_dict(sample.counterexample) if sample.refuted else None,
                "min_abs_det": format_rational(sample.min_abs_det) if sample.min_abs_det is not None else None,
            }
        report["seed"] = sampling.seed
        report["options"] = {"sampling": sampling.to_dict()}
        return CommandResult(report, predicate=necessary.overall and not refuted)

    def _sign_inverse(self, args: argparse.Namespace) -> CommandResult:
        S = self._pattern(args.file)
        if args.side == "left":
            decision, build = has_sign_left_inverse_order2(S), left_inverse_order2
        else:
            decision, build = has_sign_right_inverse_order2(S), right_inverse_order2

        report = {"side": args.side, **decision.to_dict()}
        if decision.decision:
            inverse = build(probe_member(S))
            report["probe_inverse"] = matrix_to_list(inverse) if inverse is not None else None
        return CommandResult(report, predicate=decision.decision)

    def _product(self, args: argparse.Namespace) -> CommandResult:
        A, B = load_tensor(args.a), load_tensor(args.b)
        return CommandResult({"product": tensor_to_dict(shao_product(A, B))})

    def _apply(self, args: argparse.Namespace) -> CommandResult:
        A = load_tensor(args.file)
        result = apply_power(A, parse_vector(args.x))
        return CommandResult({"result": [format_rational(v) for v in result]})

    def _sample(self, args: argparse.Namespace) -> CommandResult:
        """Write members of Q(S), one tensor file each."""
        S = self._pattern(args.file)
        sampling = self._sampling(args)
        out_dir = Path(args.out)
        stem = Path(args.file).stem
        rng = as_generator(sampling.seed)

        written: list[str] = []
        failed: list[str] = []
        for i in range(1, args.count + 1):
            member: DenseTensor = sample_member(S, rng, sampling.magnitude_range)
            path = out_dir / f"{stem}_member_{i:03d}.json"
            try:
                dump_tensor(member, path)
                written.append(str(path))
            except OSError as exc:
                logger.error(f"[manager] sample.failed | path={path} | error={exc}")
                failed.append(str(path))

        logger.info(
            f"[manager] sample.complete | written={len(written)} | failed={len(failed)} | out={out_dir}"
        )
        return CommandResult({"files_written": written, "files_failed": failed, "seed": sampling.seed})
