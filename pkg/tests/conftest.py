import sys
from fractions import Fraction

from hypothesis import settings, strategies as st

from linea.scalar import FieldDescriptor, FieldElement

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIELDS = [
    FieldDescriptor.rational(),
    FieldDescriptor.cyclotomic(3),
    FieldDescriptor.cyclotomic(4),
    FieldDescriptor.cyclotomic(5),
    FieldDescriptor.cyclotomic(8),
    FieldDescriptor.cyclotomic(12),
    FieldDescriptor.prime(2),
    FieldDescriptor.prime(7),
    FieldDescriptor.prime(2**31 - 1),
]

small_fractions = st.builds(
    Fraction, st.integers(-30, 30), st.integers(1, 12)
)


def elements(field):
    if field.kind == "rational":
        return small_fractions.map(field.element)
    if field.kind == "cyclotomic":
        return st.tuples(*[small_fractions] * field.degree).map(lambda v: FieldElement(field, v))
    return st.integers(0, field.order - 1).map(field.element)


def field_and(n):
    """A field together with n of its elements."""
    return st.sampled_from(FIELDS).flatmap(
        lambda f: st.tuples(st.just(f), *[elements(f)] * n)
    )


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
