"""
Shared fixtures: the running race example and the small global models
"""
from pathlib import Path

import pytest

from teamata.core.config import config
from teamata.models.automata import ComponentAutomaton
from teamata.models.sync import SyncTypeSpec, sync_type
from teamata.models.system import Interaction, System
from teamata.services.comm import closure_cache
from teamata.services.realise import GlobalModel, SystemSignature

SAMPLES = Path(__file__).parent.parent / "samples"


def ia(senders, action, receivers=()):
    """Interaction shorthand: ia("Ctrl", "start", "R1 R2")"""
    return Interaction(frozenset(senders.split()), action, frozenset(receivers.split() if receivers else ()))


def runner() -> ComponentAutomaton:
    return ComponentAutomaton.build(
        0,
        [(0, "start", 1), (1, "run", 2), (2, "finish", 0)],
        inputs={"start"}, outputs={"finish"}, internals={"run"},
    )


def controller() -> ComponentAutomaton:
    return ComponentAutomaton.build(
        0,
        [(0, "start", 1), (1, "finish", 2), (2, "finish", 0)],
        inputs={"finish"}, outputs={"start"},
    )


def race_spec() -> SyncTypeSpec:
    return SyncTypeSpec({
        "start": sync_type((1, 1), (2, 2)),
        "finish": sync_type((1, 1), (1, 1)),
    })


@pytest.fixture(autouse=True)
def fresh_state():
    """Sequential checks and an empty closure memo for every test"""
    workers = config.analysis.max_workers
    config.analysis.max_workers = 1
    closure_cache.clear()
    yield
    config.analysis.max_workers = workers
    closure_cache.clear()


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture
def race() -> System:
    return System.of({"Ctrl": controller(), "R1": runner(), "R2": runner()})


@pytest.fixture
def spec() -> SyncTypeSpec:
    return race_spec()


@pytest.fixture
def race_signature() -> SystemSignature:
    return SystemSignature.of({
        "Ctrl": ({"finish"}, {"start"}),
        "R1": ({"start"}, {"finish"}),
        "R2": ({"start"}, {"finish"}),
    })


@pytest.fixture
def mrace(race_signature) -> GlobalModel:
    """Global race: after start, the runners finish in either order"""
    return GlobalModel.build(
        race_signature,
        race_spec(),
        0,
        [
            (0, ia("Ctrl", "start", "R1 R2"), 1),
            (1, ia("R1", "finish", "Ctrl"), 2),
            (1, ia("R2", "finish", "Ctrl"), 3),
            (2, ia("R2", "finish", "Ctrl"), 0),
            (3, ia("R1", "finish", "Ctrl"), 0),
        ],
    )


@pytest.fixture
def pq_model() -> GlobalModel:
    """Two independent senders of a: realisable, but not isomorphically"""
    sig = SystemSignature.of({"p": ((), {"a"}), "q": ((), {"a"})})
    return GlobalModel.build(
        sig,
        SyncTypeSpec({"a": sync_type((1, 1), (0, 0))}),
        0,
        [(0, ia("p", "a"), 1), (0, ia("q", "a"), 2), (1, ia("q", "a"), 3), (2, ia("p", "a"), 4)],
    )


@pytest.fixture
def pair_model() -> GlobalModel:
    """Any two of three senders, once"""
    sig = SystemSignature.of({n: ((), {"a"}) for n in ("p", "q", "r")})
    return GlobalModel.build(
        sig,
        SyncTypeSpec({"a": sync_type((2, 2), (0, 0))}),
        0,
        [(0, ia("p q", "a"), 1), (0, ia("q r", "a"), 1), (0, ia("p r", "a"), 1)],
    )
