"""Text formatting for command output."""

from .models import CheckResult, EvalSummary, SpeedupRow, TrainingHistory
from .policy import PolicyTopology
from .qtgen import ParameterCounts


def _opt(value: float | int | None, fmt: str = "") -> str:
    return "n/a" if value is None else format(value, fmt)


def format_parameter_table(
    classical: PolicyTopology,
    counts: list[ParameterCounts],
    reference_sizes: dict[str, int] | None = None,
) -> str:
    """Trainable versus generated parameter counts, one row per model.

    Args:
        classical: Topology of the directly trained baseline
        counts: QTRL accounting, one entry per layer count
        reference_sizes: Published totals keyed by preset name, shown for comparison

    Returns:
        Formatted table
    """
    refs = reference_sizes or {}
    header = f"{'Model':<16}{'Topology':<20}{'Trainable':>10}{'Generated':>11}{'Reported':>10}"
    lines = [
        "🧮 Parameter accounting",
        header,
        "─" * len(header),
        f"{'Classical':<16}{classical.describe():<20}{classical.size:>10}"
        f"{classical.size:>11}{_opt(refs.get('classical')):>10}",
    ]
    for c in counts:
        name = f"QTRL-{c.layers}"
        shape = f"n={c.n}, {c.quantum}+{c.mapping}"
        lines.append(
            f"{name:<16}{shape:<20}{c.trainable:>10}{c.generated:>11}"
            f"{_opt(refs.get(f'centric-{c.layers}')):>10}"
        )
    return "\n".join(lines)


def format_speedup_table(rows: list[SpeedupRow]) -> str:
    """Speedup report with measured and reported values side by side."""
    header = (
        f"{'Model':<22}{'Rounds':>8}{'Episodes':>10}"
        f"{'Speedup':>10}{'Speedup/ep':>12}{'Reported':>10}"
    )
    lines = ["🚀 Speedup to target", header, "─" * len(header)]
    for row in rows:
        lines.append(
            f"{row.label:<22}{_opt(row.rounds_to_target):>8}"
            f"{_opt(row.episodes_to_target):>10}"
            f"{_opt(row.speedup_rounds, '.2f'):>10}"
            f"{_opt(row.speedup_episodes, '.2f'):>12}"
            f"{_opt(row.reference, '.2f'):>10}"
        )
    return "\n".join(lines)


def format_eval_summary(
    label: str, summary: EvalSummary, reference: float | None = None
) -> str:
    lines = [
        f"🎯 Evaluation of {label} over {summary.episodes} episodes",
        f"Mean reward: {summary.mean_reward:.4f} ± {summary.std_reward:.4f}",
        f"Success rate: {summary.success_rate:.1%}",
    ]
    if reference is not None:
        lines.append(f"Reported reward: {reference:.4f}")
    return "\n".join(lines)


def format_verify_report(results: list[CheckResult]) -> str:
    passed = sum(r.passed for r in results)
    lines = [str(r) for r in results]
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)


def format_training_summary(
    label: str, history: TrainingHistory, target_round: int | None
) -> str:
    if not history.records:
        return f"🏁 {label}: no rounds run"
    last = history.records[-1]
    reached = (
        f"target reached at round {target_round}"
        if target_round is not None
        else "target not reached"
    )
    return (
        f"🏁 {label}: {history.rounds} rounds, "
        f"final moving avg {last.moving_average:.4f}, {reached}"
    )
