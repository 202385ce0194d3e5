from .report import CaseRecord, SuiteReport, export_report
from .suites import SUITES, list_suites, run_suite

__all__ = ["CaseRecord", "SuiteReport", "export_report", "SUITES",
           "list_suites", "run_suite"]
