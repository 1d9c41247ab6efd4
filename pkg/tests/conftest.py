import os
import random

from hypothesis import HealthCheck, settings

from tjoin.generate import gen_random_metric

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def small_metric(seed, n_range=(4, 8), t_choices=(2, 4, 6)):
    """A seeded random metric instance with a valid terminal count."""
    rng = random.Random(seed)
    n = rng.randint(*n_range)
    t = rng.choice([t for t in t_choices if t <= n])
    return gen_random_metric(n, t, seed)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[num])
