from typing import List, Optional

from radicli import Radicli
from wasabi import Printer

from wnncheck.scenario import ReportBundle
from wnncheck.types import CheckStatus

cli = Radicli()

STATUS_ICONS = {
    CheckStatus.PASS: "✔",
    CheckStatus.FAIL: "✘",
    CheckStatus.WITNESSED: "◆",
    CheckStatus.NOT_APPLICABLE: "-",
    CheckStatus.INCONCLUSIVE: "?",
}


def split_names(value: Optional[str]) -> Optional[List[str]]:
    """Split a comma-separated flag value, None if nothing is left"""
    if not value:
        return None
    names = [v.strip() for v in value.split(",") if v.strip()]
    return names or None


def print_summary(bundle: ReportBundle, msg: Printer) -> None:
    """Print one line per report plus every violated residual"""
    msg.divider(f"Scenario {bundle.scenario} (seed {bundle.seed})")
    rows = [
        (
            STATUS_ICONS[r.status],
            r.name,
            r.status.value,
            r.verdict or "",
            ", ".join(f"{k}={v:.3e}" for k, v in r.residuals.items()),
        )
        for r in bundle.reports
    ]
    msg.table(rows, header=("", "check", "status", "verdict", "residuals"))
    for report in bundle.reports:
        for name in report.violations():
            msg.fail(
                f"{report.name}: {name}={report.residuals[name]:.3e} exceeds "
                f"{report.tolerances[name]:.1e}"
            )
    if bundle.exit_code == 0:
        msg.good("All requested checks passed, were witnessed or do not apply")
    else:
        msg.fail(f"Some checks failed (exit code {bundle.exit_code})")


__all__ = ["cli", "print_summary", "split_names"]
