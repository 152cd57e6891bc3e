from hypothesis import settings

# deterministic examples, so reruns see the same cases
settings.register_profile("repro", derandomize=True, database=None)
settings.load_profile("repro")
