import csv
import logging

import pytest

from src.metrics import (
    METRICS_COLUMNS,
    SPEEDUP_COLUMNS,
    MetricsCollector,
    export_speedup_csv,
    log_metrics_summary,
)
from src.models import RoundRecord, SpeedupRow


def _record(round_index, returns, wall_ms=None, moving_average=0.5):
    return RoundRecord(
        round_index=round_index,
        agent_returns=tuple(returns),
        agent_lengths=tuple(20.0 for _ in returns),
        agent_grad_norms=tuple(0.25 for _ in returns),
        mean_return=sum(returns) / len(returns),
        moving_average=moving_average,
        grad_norm=0.125,
        wall_ms=wall_ms,
        episodes_per_agent=round_index,
    )


def _read(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


class TestMetricsCollector:
    """Test round collection and counters"""

    @pytest.mark.asyncio
    async def test_record_round(self):
        """Test counters after two rounds"""
        collector = MetricsCollector()
        await collector.record_round(_record(1, [0.0, 0.9], wall_ms=12.0, moving_average=0.45))
        await collector.record_round(_record(2, [0.9, 0.9], wall_ms=8.0, moving_average=0.675))
        summary = await collector.get_metrics_summary()
        assert summary["rounds"] == 2
        assert summary["episodes"] == 4
        assert summary["best_moving_average"] == pytest.approx(0.675)
        assert summary["total_wall_ms"] == 20.0
        assert summary["last_mean_return"] == pytest.approx(0.9)
        assert summary["target_round"] is None

    @pytest.mark.asyncio
    async def test_empty_summary(self):
        """Test the summary before any round"""
        summary = await MetricsCollector().get_metrics_summary()
        assert summary["rounds"] == 0
        assert summary["last_mean_return"] is None

    @pytest.mark.asyncio
    async def test_first_target_round_is_kept(self):
        """Test only the first target round is kept"""
        collector = MetricsCollector()
        await collector.record_target(7)
        await collector.record_target(9)
        assert collector.metrics.target_round == 7

    @pytest.mark.asyncio
    async def test_log_summary(self, caplog):
        """Test the summary is logged"""
        collector = MetricsCollector()
        await collector.record_round(_record(1, [0.5]))
        with caplog.at_level(logging.INFO, logger="src.metrics"):
            await log_metrics_summary(collector)
        assert "Rounds: 1" in caplog.text


class TestCsvExport:
    """Test metrics.csv and speedup.csv"""

    def test_header_only_for_empty_run(self, tmp_path):
        """Test an empty run writes only the header"""
        path = MetricsCollector().export_csv(tmp_path / "out" / "metrics.csv")
        assert _read(path) == [list(METRICS_COLUMNS)]

    @pytest.mark.asyncio
    async def test_rows_per_agent_and_mean(self, tmp_path):
        """Test one row per agent plus a mean row"""
        collector = MetricsCollector()
        await collector.record_round(_record(1, [0.0, 0.955]))
        rows = _read(collector.export_csv(tmp_path / "metrics.csv"))
        assert rows[0] == list(METRICS_COLUMNS)
        assert rows[1] == ["1", "1", "0", "0.0", "20.0", "", "0.25", ""]
        assert rows[2] == ["1", "1", "1", "0.955", "20.0", "", "0.25", ""]
        assert rows[3] == ["1", "1", "mean", "0.4775", "20.0", "0.5", "0.125", ""]

    @pytest.mark.asyncio
    async def test_wall_time_formatted(self):
        """Test wall time is printed to three decimals"""
        collector = MetricsCollector()
        await collector.record_round(_record(1, [0.1], wall_ms=3.14159))
        assert collector.rows()[0][-1] == "3.142"

    def test_speedup_csv(self, tmp_path):
        """Test speedup rows with blanks for missing values"""
        rows = [
            SpeedupRow("Centric QTRL-3", 1, 3, 100, 100, 1.0, 1.0, None),
            SpeedupRow("Distributed QTRL-3 (2 agents)", 2, 3, None, None, None, None, 2.06),
        ]
        out = _read(export_speedup_csv(rows, tmp_path / "speedup.csv"))
        assert out[0] == list(SPEEDUP_COLUMNS)
        assert out[1] == ["1", "Centric QTRL-3", "1", "3", "100", "100", "1.0", "1.0", ""]
        assert out[2] == ["1", "Distributed QTRL-3 (2 agents)", "2", "3", "", "", "", "", "2.06"]
