import pytest
from hypothesis import strategies as st

from adaptscaffold.logic import load_bank
from adaptscaffold.logic.formula import And, Iff, Imp, Not, Or, Var


@pytest.fixture(scope="session")
def bank():
    return load_bank()


def formulas(letters="ABCD", max_leaves=6):
    atoms = st.sampled_from(letters).map(Var)

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.tuples(st.sampled_from([And, Or, Imp, Iff]), children, children).map(
                lambda t: t[0](t[1], t[2])
            ),
        )

    return st.recursive(atoms, extend, max_leaves=max_leaves)


@pytest.fixture(scope="session")
def curriculum(bank):
    from adaptscaffold.sim import Curriculum

    return Curriculum.from_bank(bank)


@pytest.fixture(scope="session")
def world(curriculum):
    """A small seeded history corpus with its time bounds and thresholds."""
    from adaptscaffold.sim import PopulationConfig, VariantPool, history_phase, thresholds_from_logs

    pop = PopulationConfig()
    pool = VariantPool(pop)
    logs, bounds = history_phase(80, 11, curriculum, pop, pool)
    return {"pop": pop, "pool": pool, "logs": logs, "bounds": bounds, "thresholds": thresholds_from_logs(logs)}


# ---- acceptance summary -----------------------------------------------------

ACCEPTANCE = {
    1: "BKT update fidelity",
    2: "DDQN double-Q target, gradients, toy MDP",
    3: "reward formula",
    4: "chi-square, gap and Bonferroni against published aggregates",
    5: "normalized learning gain",
    6: "proof kernel soundness and variant round trips",
    7: "curriculum invariants and adaptive >= Control on the seeded trial",
    8: "byte-identical pipeline reruns",
    9: "Mann-Whitney, Kruskal-Wallis and effect-size oracles",
}
_outcomes: dict[int, list[bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    report = (yield).get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _outcomes.setdefault(mark.args[0], []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in ACCEPTANCE.items():
        results = _outcomes.get(n)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status:7s} {title}")
