from typing import Dict, List

from loguru import logger

from core.constants import WARNING_MASTER
from core.schemas import Dataset, ValidationReport, ValidationWarning
from services.helpers.time_utils import to_iso


def describe_warnings(dataset: Dataset) -> ValidationReport:
    """ Describe all warnings in a parsed dataset. Never changes the data.

    We build `warnings`, a dict of lists keyed by warning kind (see WARNING_MASTER in
    constants.py). Each list holds the elements affected: outage ids, or gap spans for crew
    coverage. The message for each kind is built from the master entry and its elements,
    e.g. "Outage affects zero customers (outage(s) O7, O9)."
    """
    def add_to_warning_list(kind: str, element: str):
        """ Add an element to the list of a warning kind """
        warnings[kind].append(str(element))
        return element

    def new_warning_msg(kind: str) -> str:
        """ Message for one warning kind: description + list of elements"""
        master = WARNING_MASTER[kind]
        if master['element_type'] == 'general':
            return master['message'] + "."
        return master['message'] + " (" + master['element_type'] + " " + ', '.join(warnings[kind]) + ")."

    warnings: Dict[str, List[str]] = {kind: [] for kind in WARNING_MASTER}

    # Outage-level warnings
    for rec in dataset.outages:
        if rec.restore == rec.start:
            add_to_warning_list("zero_duration", rec.id)
        if rec.customers == 0:
            add_to_warning_list("zero_customers", rec.id)

    # Crew coverage of the span [first outage, last restore]
    if dataset.outages:
        span_start = min(rec.start for rec in dataset.outages)
        span_end = max(rec.restore for rec in dataset.outages)
        crew = dataset.crew
        if crew.is_empty:
            add_to_warning_list("crew_missing", "crew")
        else:
            if crew.start > span_start:
                add_to_warning_list("crew_coverage", f"{to_iso(span_start)}..{to_iso(crew.start)}")
            if crew.end < span_end:
                add_to_warning_list("crew_coverage", f"{to_iso(crew.end)}..{to_iso(span_end)}")

    report = []
    for kind, elements in warnings.items():
        if len(elements) > 0:
            report.append(ValidationWarning(kind=kind, message=new_warning_msg(kind), elements=tuple(elements)))
            logger.warning(report[-1].message)

    return ValidationReport(
        warnings=tuple(report),
        counts={kind: len(elements) for kind, elements in warnings.items()},
        n_outages=len(dataset.outages),
        n_crew_samples=len(dataset.crew.samples),
    )
