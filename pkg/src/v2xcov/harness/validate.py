"""Analytic-vs-Monte-Carlo agreement grid used by ``v2xcov validate`` and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..analytic import coverage
from ..channel import Carrier, db_to_linear
from ..config import RoadCase, ScenarioConfig, VehicleModel
from ..montecarlo import CoverageEstimate, estimate_coverage
from ..quadrature import QuadratureSpec

GRID_THRESHOLDS_DB = (-10.0, 0.0, 10.0)


@dataclass(frozen=True)
class GridCell:
    road_case: RoadCase
    model: VehicleModel
    frequency: Carrier
    threshold_db: float
    p_cov: float
    estimate: CoverageEstimate

    @property
    def agrees(self) -> bool:
        """Analytic value inside the MC 99% Wilson interval."""
        return self.estimate.wilson_contains(self.p_cov)

    @property
    def agrees_wald(self) -> bool:
        return self.estimate.wald_contains(self.p_cov)

    def label(self) -> str:
        return f"{self.road_case.value}/{self.model.value}/{self.frequency.value}/T={self.threshold_db:+g}dB"


def oracle_grid(config: ScenarioConfig = ScenarioConfig(), trials: int = 100_000, seed: int = 2024,
                thresholds_db: Sequence[float] = GRID_THRESHOLDS_DB,
                quad: QuadratureSpec = QuadratureSpec()) -> List[GridCell]:
    """road_case x model x frequency x threshold; each cell gets its own MC stream."""
    cells = []
    idx = 0
    for case in RoadCase:
        for model in VehicleModel:
            for freq in Carrier:
                for t_db in thresholds_db:
                    cfg = config.replace(frequency=freq, threshold=db_to_linear(t_db))
                    p = coverage(cfg, model, case, quad).p_cov
                    est = estimate_coverage(cfg, model, case, trials,
                                            seed=np.random.SeedSequence(entropy=seed, spawn_key=(idx,)))
                    cells.append(GridCell(case, model, freq, t_db, p, est))
                    idx += 1
    return cells
