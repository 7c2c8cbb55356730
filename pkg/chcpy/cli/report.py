from dataclasses import asdict, dataclass
from typing import Sequence

import pandas as pd

from ..core.constraints import SAT
from ..core.system_helpers import get_logger

logger = get_logger(__name__)

FAILED = 'failed'
REPORT_COLUMNS = ['goal', 'verdict', 'iterations', 'definitions', 'clauses', 'wall_time', 'detail']


@dataclass
class GoalOutcome:
    goal: str
    verdict: str
    iterations: int = 0
    definitions: int = 0
    clauses: int = 0
    wall_time: float = 0.0
    detail: str = ''

    @property
    def verified(self) -> bool:
        return self.verdict == SAT


def report_frame(outcomes: Sequence[GoalOutcome]) -> pd.DataFrame:
    return pd.DataFrame([asdict(o) for o in outcomes], columns=REPORT_COLUMNS)


def write_report(outcomes: Sequence[GoalOutcome], path: str):
    report_frame(outcomes).to_csv(path, index=False)
    logger.info('Wrote report for {} goals to {}'.format(len(outcomes), path))


def format_summary(outcomes: Sequence[GoalOutcome]) -> str:
    df = report_frame(outcomes)
    df['wall_time'] = df['wall_time'].round(2)
    verified = sum(1 for o in outcomes if o.verified)
    return '{}\n{} of {} goals verified'.format(df.to_string(index=False), verified, len(outcomes))
