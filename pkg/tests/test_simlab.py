import itertools
import json

import numpy as np
import pytest

from core.exceptions.errors import ConfigError, UnfinishedTicketsError
from core.schemas import (
    CrewProfile,
    CrewSegment,
    DispatchPolicy,
    FixedCustomers,
    FixedWork,
    GammaWork,
    IntensitySegment,
    StormModel,
    StormOutage,
    UniformCustomers,
    ZipfCustomers,
)
from services.events import extract_events
from services.metrics import compute_metrics
from services.simlab import (
    build_crew_profile,
    generate_storm,
    load_synth_config,
    replicate_seeds,
    simulate_restoration,
    simulate_schedule,
    synthesize,
)
from tests.conftest import BASE, HOUR, flat_crew


def ticket(tid, customers=1, work=1.0, start=0):
    return StormOutage(id=tid, start=BASE + start, customers=customers, repair_work=work)


def storm_model(rate=10.0, hours=10, seed=1, **kwargs):
    return StormModel(
        intensity=(IntensitySegment(hours=hours, rate=rate),),
        customer_dist=kwargs.get("customer_dist", FixedCustomers(value=5)),
        repair_dist=kwargs.get("repair_dist", FixedWork(value=1.0)),
        seed=seed,
    )


def test_same_seed_same_storm():
    model = storm_model(customer_dist=ZipfCustomers(a=2.0, scale=3), repair_dist=GammaWork(shape=2, scale=1))
    assert generate_storm(model) == generate_storm(model)
    assert generate_storm(model) != generate_storm(model.model_copy(update={"seed": 2}))


def test_zero_intensity_is_empty():
    assert generate_storm(storm_model(rate=0.0)) == []


def test_storm_starts_and_ids():
    storm = generate_storm(storm_model(customer_dist=UniformCustomers(low=3, high=4)))
    assert [tk.start for tk in storm] == sorted(tk.start for tk in storm)
    assert all(BASE <= tk.start < BASE + 10 * HOUR for tk in storm)
    assert all(tk.customers in (3, 4) for tk in storm)
    assert storm[0].id == "O00001"


def test_mean_count_matches_poisson_rate():
    counts = [len(generate_storm(storm_model(seed=seed))) for seed in replicate_seeds(42, 1000)]
    standard_error = np.sqrt(100 / 1000)
    assert abs(np.mean(counts) - 100) < 3 * standard_error


def test_quiet_segments_get_no_outages():
    model = StormModel(
        intensity=(IntensitySegment(hours=2, rate=20), IntensitySegment(hours=3, rate=0), IntensitySegment(hours=1, rate=20)),
        customer_dist=FixedCustomers(value=1),
        repair_dist=FixedWork(value=1),
        seed=5,
    )
    hours = [(tk.start - BASE) / HOUR for tk in generate_storm(model)]
    assert hours and not any(2 <= h < 5 for h in hours)


def test_replicate_seeds_are_distinct_and_stable():
    seeds = replicate_seeds(7, 5)
    assert seeds == replicate_seeds(7, 5)
    assert len(set(seeds)) == 5


def test_single_ticket_two_hours_of_work():
    records = simulate_restoration([ticket("A", work=2.0)], flat_crew(1, 4))
    assert records[0].restore == BASE + 2 * HOUR


def test_largest_customers_first():
    tickets = [ticket("A", customers=1), ticket("B", customers=100)]
    crew = flat_crew(1, 4)
    largest = {rec.id: rec for rec in simulate_restoration(tickets, crew, DispatchPolicy.LARGEST_CUSTOMERS_FIRST)}
    assert largest["B"].restore == BASE + HOUR
    assert largest["A"].restore == BASE + 2 * HOUR
    chrono = extract_events(simulate_restoration(tickets, crew, DispatchPolicy.CHRONOLOGICAL)).events[0]
    best = extract_events(list(largest.values())).events[0]
    assert compute_metrics(best, crew).a_cust == 102
    assert compute_metrics(chrono, crew).a_cust == 201


def test_chronological_completions():
    tickets = [ticket(f"T{k}", start=k) for k in range(5)]
    records = simulate_restoration(tickets, flat_crew(1, 8))
    assert [rec.restore - BASE for rec in records] == [60, 120, 180, 240, 300]


def test_spare_crews_flow_down_the_queue():
    tickets = [ticket("A", work=1.0), ticket("B", work=1.0)]
    records = simulate_restoration(tickets, flat_crew(1.5, 4))
    restores = {rec.id: rec.restore - BASE for rec in records}
    # B works at half speed for the first hour, then at full speed
    assert restores == {"A": 60, "B": 90}


def test_preempted_ticket_keeps_progress():
    tickets = [ticket("small", customers=1, work=1.0), ticket("big", customers=50, work=1.0, start=30)]
    records = simulate_restoration(tickets, flat_crew(1, 4), DispatchPolicy.LARGEST_CUSTOMERS_FIRST)
    restores = {rec.id: rec.restore - BASE for rec in records}
    assert restores == {"big": 90, "small": 120}


def test_work_is_conserved():
    tickets = generate_storm(storm_model(repair_dist=GammaWork(shape=2.0, scale=0.7)))
    schedule = simulate_schedule(tickets, flat_crew(3, 200))
    assert sum(schedule.allocated.values()) == pytest.approx(sum(tk.repair_work for tk in tickets))


def test_capacity_runs_out():
    with pytest.raises(UnfinishedTicketsError) as exc:
        simulate_restoration([ticket("A", work=1.0), ticket("B", work=5.0)], flat_crew(1, 3))
    assert exc.value.ticket_ids == ["B"]
    with pytest.raises(UnfinishedTicketsError):
        simulate_restoration([ticket("A")], CrewProfile())


def test_largest_first_is_optimal_for_equal_work():
    rng = np.random.default_rng(8)
    crew = flat_crew(1, 10)
    for _ in range(60):
        n = int(rng.integers(1, 8))
        customers = rng.integers(1, 500, size=n)
        tickets = [ticket(f"T{k}", customers=int(c)) for k, c in enumerate(customers)]
        records = simulate_restoration(tickets, crew, DispatchPolicy.LARGEST_CUSTOMERS_FIRST)
        achieved = sum(rec.customers * rec.duration for rec in records)
        best = min(
            sum(int(c) * HOUR * (position + 1) for position, c in enumerate(order))
            for order in itertools.permutations(customers)
        )
        assert achieved == best


def test_simulated_records_feed_the_pipeline():
    model = storm_model(rate=6, hours=8, seed=3, customer_dist=UniformCustomers(low=1, high=200))
    tickets = generate_storm(model)
    records = simulate_restoration(tickets, build_crew_profile([CrewSegment(hours=100, fte=4)], BASE))
    event_set = extract_events(records)
    assert sum(e.n for e in event_set.events) == len(tickets)
    assert sum(e.n_cust for e in event_set.events) == sum(tk.customers for tk in tickets)


def test_load_synth_config(tmp_path):
    config = {
        "storm": {
            "intensity": [{"hours": 4, "rate": 5}],
            "customer_dist": {"kind": "fixed", "value": 10},
            "repair_dist": {"kind": "uniform", "low": 0.5, "high": 2},
            "seed": 9,
        },
        "crew": [{"hours": 48, "fte": 6}],
        "policy": "largest",
    }
    path = tmp_path / "storm.json"
    path.write_text(json.dumps(config))
    synth = load_synth_config(path)
    assert synth.policy == DispatchPolicy.LARGEST_CUSTOMERS_FIRST
    records, profile, work = synthesize(synth)
    assert len(records) == len(work)
    assert profile.total_crew_hours == 288

    path.write_text(json.dumps({**config, "crew": "lots"}))
    with pytest.raises(ConfigError):
        load_synth_config(path)


def test_bundled_toml_config():
    from core.templates import TEMPLATES_DIR
    synth = load_synth_config(TEMPLATES_DIR.parent / "configs" / "toy_storm.toml")
    records, profile, _ = synthesize(synth)
    assert records
    assert profile.start == BASE + 2 * HOUR
