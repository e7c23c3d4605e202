import pytest

from circunits.abfield import RATIONALS, character_field, cubic_fields_two_primes, make_field

# lines collected by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def cubic(ell):
    """The cubic subfield of Q(zeta_ell)."""
    return character_field(3, {ell: 1})


@pytest.fixture(scope="session")
def fields():
    F, D = cubic_fields_two_primes(7, 13)
    return {"Q": RATIONALS, "7": make_field(7, [6]), "13": cubic(13), "F": F, "D": D}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
