"""Runs selected checks from a RunConfig and writes the report bundle."""
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import List
import csv
import hashlib
import json
import logging
import os

from ._suite.run import ExecConf, runners
from ._suite.runconf import RunConfig
from .codec import validate_report
from .exception import IoError
from .result import CheckReport, CheckResult, Level

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['check', 'n', 'param_hash', 'rel_err', 'tol', 'pass']


@dataclass
class ReportBundle:
    reports: List[CheckReport] = field(default_factory=list)

    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def exit_status(self) -> int:
        return 0 if self.passed() else 1

    def to_result(self) -> CheckResult:
        result = CheckResult('Suite', '', Level.INFO)
        for report in self.reports:
            result.append(report.to_result())
        return result

    def summary(self) -> dict:
        return {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'pass': self.passed(),
            'checks': [{'check': r.check, 'n': r.n, 'pass': r.passed} for r in self.reports],
        }


def run_suite(config: RunConfig) -> ReportBundle:
    """Executes the configured checks; failures are recorded in the bundle, never raised."""
    bundle = ReportBundle()
    if not config.suite:
        return bundle
    rng = config.rng()
    params = config.parameters.to_params(rng)
    params.check_domain()
    conf = ExecConf(params, config.quadrature.to_spec(), rng, config.workers, tuple(config.scales))
    for check in config.suite:
        logger.info("running %s at n=%d (%s)", check, params.n, params.param_hash())
        bundle.reports.extend(runners[check](conf))
    if config.output:
        write_bundle(bundle, config.output)
    return bundle


def param_hash(params: dict) -> str:
    return hashlib.sha1(json.dumps(params, sort_keys=True).encode()).hexdigest()[:12]


def _file_name(report: CheckReport, index: int) -> str:
    return f"{index:03d}_{report.check}.json"


def write_bundle(bundle: ReportBundle, directory: str):
    """One JSON file per report plus summary.json; reports must match the bundled schema."""
    try:
        os.makedirs(directory, exist_ok=True)
        for index, report in enumerate(bundle.reports):
            data = report.to_dict()
            result = validate_report(data)
            if not result.ok():
                raise IoError(f"Report {report.check} does not match the report schema: "
                              + "; ".join(r.message for r in result.sub_results))
            with open(os.path.join(directory, _file_name(report, index)), 'w') as f:
                json.dump(data, f, indent=2, sort_keys=True)
        with open(os.path.join(directory, 'summary.json'), 'w') as f:
            json.dump(bundle.summary(), f, indent=2)
    except OSError as e:
        raise IoError(f"Cannot write reports to {directory}: {e}")


def _rows(report: CheckReport):
    hash_ = param_hash(report.params)
    if report.sweep:
        for row in report.sweep:
            yield [report.check, report.n, hash_, row.get('rel_err', report.rel_err), report.tol,
                   row.get('pass', report.passed)]
    else:
        yield [report.check, report.n, hash_, report.rel_err, report.tol, report.passed]


def emit_csv(bundle: ReportBundle, directory: str) -> List[str]:
    """Writes <check>.csv per check with columns check, n, param_hash, rel_err, tol, pass."""
    by_check = {}
    for report in bundle.reports:
        by_check.setdefault(report.check, []).append(report)
    paths = []
    try:
        os.makedirs(directory, exist_ok=True)
        for check, reports in by_check.items():
            path = os.path.join(directory, f"{check}.csv")
            with open(path, 'w', newline='') as f:
                writer = csv.writer(f)
                writer.writerow(CSV_COLUMNS)
                for report in reports:
                    writer.writerows(_rows(report))
            paths.append(path)
    except OSError as e:
        raise IoError(f"Cannot write tables to {directory}: {e}")
    return paths


def load_bundle(directory: str) -> ReportBundle:
    bundle = ReportBundle()
    try:
        names = sorted(i for i in os.listdir(directory) if i.endswith('.json') and i != 'summary.json')
        for name in names:
            with open(os.path.join(directory, name)) as f:
                bundle.reports.append(CheckReport.from_dict(json.load(f)))
    except (OSError, json.decoder.JSONDecodeError) as e:
        raise IoError(f"Cannot read reports from {directory}: {e}")
    return bundle

