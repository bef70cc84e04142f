"""
coordinator.py
───────────────
Runs the full analysis of one sign pattern:
  1. Shape and sign statistics
  2. Term rank with its matching witness
  3. Condensation and the mr = 1 decision
  4. Necessary SNS test (cubical patterns only)
  5. Rank bounds over the qualitative class

Every step is logged.
"""

from __future__ import annotations

import logging
import time
from typing import Any, Optional

from qualtensor.combinatorics import MAX_L_ROWS, sns_tensor_necessary, term_rank
from qualtensor.config import SamplingConfig, SearchConfig
from qualtensor.qualitative import SignTensor, condense, is_mr1
from qualtensor.rank import bounds_report

logger = logging.getLogger(__name__)


class Coordinator:

    def __init__(self, search: Optional[SearchConfig] = None, sampling: Optional[SamplingConfig] = None):
        self.search   = search or SearchConfig()
        self.sampling = sampling or SamplingConfig()

        logger.debug("[coordinator] coordinator.initialised")

    def analyze(self, S: SignTensor, session_id: str = "default") -> dict[str, Any]:
        started = time.monotonic()

        # ── EVENT: analysis started ───────────────────────────────────────────
        logger.info(
            f"[coordinator] analysis.started | session={session_id} | "
            f"shape={S.shape} | nnz={S.nnz}"
        )

        # ── Step 1: Shape and sign statistics ─────────────────────────────────
        report: dict[str, Any] = {"shape": list(S.dims), "signs": S.counts()}

        # ── Step 2: Term rank ─────────────────────────────────────────────────
        rho = term_rank(S)
        report["term_rank"] = rho.value
        report["witness"] = rho.matching.to_list()
        logger.info(f"[coordinator] term_rank.ready | value={rho.value} | nodes={rho.nodes}")

        # ── Step 3: Condensation and mr = 1 ───────────────────────────────────
        condensed = condense(S)
        report["condensed_shape"] = list(condensed.dims)
        report["mr1"] = is_mr1(S)
        logger.info(
            f"[coordinator] condense.ready | condensed={condensed.shape} | mr1={report['mr1']}"
        )

        # ── Step 4: Necessary SNS test ────────────────────────────────────────
        if S.shape.is_cubical and S.dims[0] <= MAX_L_ROWS:
            report["sns_necessary"] = sns_tensor_necessary(S).to_dict()
        else:
            report["sns_necessary"] = None
            logger.info(f"[coordinator] sns_necessary.skipped | shape={S.shape}")

        # ── Step 5: Rank bounds ───────────────────────────────────────────────
        if S.order >= 2:
            report["bounds"] = bounds_report(S, self.search, self.sampling).to_dict()
        else:
            report["bounds"] = None
            logger.info(f"[coordinator] bounds.skipped | order={S.order}")
        report["seed"] = self.search.seed
        report["options"] = {"search": self.search.to_dict(), "sampling": self.sampling.to_dict()}

        duration = round(time.monotonic() - started, 3)

        # ── EVENT: analysis complete ──────────────────────────────────────────
        logger.info(
            f"[coordinator] analysis.complete | session={session_id} | duration={duration}s"
        )
        return report
