# Canonical CSV headers
OUTAGE_COLUMNS = ["id", "start", "restore", "customers"]
CREW_COLUMNS = ["hour_start", "fte"]
CREW_ACTIVITY_COLUMN = "activity"
WORK_COLUMNS = ["id", "repair_work"]

# Default column map for outage logs (canonical name -> column in the file)
DEFAULT_OUTAGE_SCHEMA = {name: name for name in OUTAGE_COLUMNS}

# Timestamps are rendered at minute precision
ISO_MINUTE_FORMAT = "%Y-%m-%dT%H:%M"

MINUTES_PER_HOUR = 60

# Named bit generator behind every synthetic storm; seed -> stream is numpy's PCG64 contract
RNG_ALGORITHM = "PCG64"

# Exit codes of the command line
EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_CONFIG = 4

# Accepted --scenario grammar, listed to the user on a bad scenario string
SCENARIO_GRAMMAR = [
    "speedup:<s>                       0 <= s < 1",
    "crewscale:<a>[:exact|paper]       a >= 0, a < 1",
    "shift:<delta_h>[:chrono|largest]  delta_h > 0",
]

# Metric rows in the order of the resilience metric table: (field, label, symbol)
METRIC_TABLE_ROWS = [
    ("OUTAGE PROCESS METRICS", None, None),
    ("n", "number of outages", "n"),
    ("n_cust", "number of customers out", "n^cust"),
    ("outage_duration_h", "outage duration (storm duration)", "o_n-o_1"),
    ("outage_rate", "outage rate", "n/(o_n-o_1)"),
    ("RESTORE PROCESS METRICS", None, None),
    ("restore_delay_h", "delay before start of restore", "r_1-o_1"),
    ("restore_duration_h", "restore duration", "r_n-r_1"),
    ("d95_h", "duration to 95% restore", "D95"),
    ("cust_restore_rate", "customer restore rate", "n^cust/(r_n-r_1)"),
    ("outage_restore_rate", "outage restore rate", "n/(r_n-r_1)"),
    ("crew_hours", "crew hours for restoration", "C^crew"),
    ("re", "Restoration Efficiency RE", "log10[C^crew/n]"),
    ("PERFORMANCE CURVE METRICS", None, None),
    ("event_duration_h", "event duration", "r_n-o_1"),
    ("max_cust_out", "max customers simultaneously out", "max P^cust"),
    ("max_outages_out", "max number simultaneous outages", "max P"),
    ("a_cust", "customer hours out and P(t) area", "A^cust"),
    ("air", "Area Index of Resilience AIR", "log10[A^cust/n^cust]"),
    ("repair", "REPAIR = RE Plus AIR", "RE + AIR"),
]

# Rows of the rerun comparison table
RERUN_TABLE_ROWS = [("re", "RE"), ("air", "AIR"), ("repair", "REPAIR")]

# Dictionary with the different validation warnings
WARNING_MASTER = {
    'zero_duration': {
        "message": "Outage restored at the same minute it started",
        "element_type": "outage(s)"},
    'zero_customers': {
        "message": "Outage affects zero customers",
        "element_type": "outage(s)"},
    'crew_coverage': {
        "message": "Crew profile does not cover the outage span",
        "element_type": "gap(s)"},
    'crew_missing': {
        "message": "No crew profile; crew-dependent metrics will be unavailable",
        "element_type": "general"},
}
