"""
Table 1 Generator

Recomputes the six-row table of CRE, its HDG bound, CRE + CE and its range
bound for the catalog distributions, and compares every cell with the
published figures. Rows can be evaluated in parallel via ThreadPoolExecutor;
output order is always by row index.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from analytics.bounds import cre_upper_hdg, sum_upper
from config.settings import Config
from core.distributions import moments, table1_row
from core.exceptions import EntropyToolkitError
from core.quadrature import DEFAULT_TOLERANCE, Tolerance
from core.reference_values import TABLE1, TABLE1_COLUMNS
from processors.entropies import ce, cre
from utils.logging_config import get_logger

logger = get_logger("generators.table1")


@dataclass
class Table1RowResult:
    row: int
    cdf: str
    label: str
    sigma: Optional[float] = None
    computed: Dict[str, float] = field(default_factory=dict)
    published: Dict[str, float] = field(default_factory=dict)
    deltas: Dict[str, float] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def delta_max(self) -> Optional[float]:
        if not self.deltas:
            return None
        return max(abs(d) for d in self.deltas.values())

    @property
    def within_tolerance(self) -> bool:
        if self.error is not None or len(self.deltas) != len(TABLE1_COLUMNS):
            return False
        return all(abs(self.deltas[c]) <= self.tolerances[c] for c in TABLE1_COLUMNS)


@dataclass
class Table1Result:
    rows: List[Table1RowResult]

    @property
    def all_within_tolerance(self) -> bool:
        return all(r.within_tolerance for r in self.rows)

    @property
    def warnings(self) -> List[str]:
        return [w for r in self.rows for w in r.warnings]


class Table1Generator:
    """Recompute all 24 numeric cells of Table 1."""

    def __init__(self, tol: Tolerance = DEFAULT_TOLERANCE, workers: int = Config.TABLE1_WORKERS):
        """
        Args:
            tol: Quadrature tolerance for CRE and CE
            workers: Number of parallel row workers. Sequential if None or 1.
        """
        self.tol = tol
        self.workers = workers

    def generate_all(self, rows: Optional[List[int]] = None) -> Table1Result:
        """
        Compute the requested rows (default: all six).

        Returns:
            Table1Result with rows ordered by row index
        """
        rows = sorted(rows or TABLE1.keys())
        logger.info(f"Recomputing Table 1 ({len(rows)} rows)...")

        if self.workers and self.workers > 1:
            results = self._generate_parallel(rows)
        else:
            results = self._generate_sequential(rows)

        result = Table1Result(rows=sorted(results, key=lambda r: r.row))
        passed = sum(1 for r in result.rows if r.within_tolerance)
        marker = "✓" if result.all_within_tolerance else "⚠"
        logger.info(f"{marker} Table 1: {passed}/{len(result.rows)} rows within tolerance")
        return result

    def _generate_single_row(self, row: int) -> Table1RowResult:
        """Compute one row. Thread-safe: distributions are immutable."""
        published = TABLE1[row]
        dist = table1_row(row)
        result = Table1RowResult(row=row, cdf=published.cdf, label=dist.label)
        try:
            sigma = moments(dist).sigma
            cre_value = cre(dist, self.tol)
            ce_value = ce(dist, self.tol)
        except EntropyToolkitError as exc:
            result.error = str(exc)
            logger.warning(f"  ✗ Table 1 row {row} failed: {exc}")
            return result

        result.sigma = sigma
        result.warnings.extend(cre_value.warnings + ce_value.warnings)
        result.computed = {
            "cre": cre_value.value,
            "cre_bound": cre_upper_hdg(sigma),
            "sum": cre_value.value + ce_value.value,
            "sum_bound": sum_upper(sigma),
        }
        for column in TABLE1_COLUMNS:
            result.published[column] = published.cell(column)
            result.deltas[column] = result.computed[column] - published.cell(column)
            result.tolerances[column] = published.tolerance(column, sigma)

        if not result.within_tolerance:
            logger.warning(f"  ⚠ Table 1 row {row}: max delta {result.delta_max:.2e} exceeds tolerance")
        else:
            logger.debug("row %d: max delta %.2e", row, result.delta_max)
        return result

    @staticmethod
    def _failed_row(row: int, exc: Exception) -> Table1RowResult:
        logger.warning(f"  ✗ Table 1 row {row} failed: {exc}")
        return Table1RowResult(row=row, cdf=TABLE1[row].cdf, label=f"table1:row{row}", error=str(exc))

    def _generate_sequential(self, rows: List[int]) -> List[Table1RowResult]:
        results = []
        for row in rows:
            try:
                results.append(self._generate_single_row(row))
            except Exception as exc:
                results.append(self._failed_row(row, exc))
        return results

    def _generate_parallel(self, rows: List[int]) -> List[Table1RowResult]:
        results = []
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = {executor.submit(self._generate_single_row, row): row for row in rows}
            for future in as_completed(futures):
                try:
                    results.append(future.result())
                except Exception as exc:
                    results.append(self._failed_row(futures[future], exc))
        return results
