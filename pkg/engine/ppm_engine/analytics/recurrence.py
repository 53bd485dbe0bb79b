import numpy as np

from ppm_engine.models import RecurrenceMap, Trajectory


def recurrence_map(tr: Trajectory, burn_in: float = 480.0, min_mean: float = 1.0) -> RecurrenceMap:
    """Mean time between successive entries into each (n, m), for states entered at least twice.

    Entries are the post-event states at event times >= burn_in, plus the initial state when
    burn_in is 0. States with a mean below ``min_mean`` are dropped.
    """
    tr.require_exact()
    keep = tr.times >= burn_in
    times, n, m = tr.times[keep], tr.n[keep].astype(np.int64), tr.m[keep].astype(np.int64)
    if burn_in <= 0:
        times = np.concatenate(([0.0], times))
        n = np.concatenate(([tr.init.n], n))
        m = np.concatenate(([tr.init.m], m))

    keys = n * (tr.N + 1) + m
    order = np.lexsort((times, keys))
    keys, times = keys[order], times[order]
    unique, first, counts = np.unique(keys, return_index=True, return_counts=True)

    repeated = counts >= 2
    unique, first, counts = unique[repeated], first[repeated], counts[repeated]
    mean = (times[first + counts - 1] - times[first]) / (counts - 1)

    result = RecurrenceMap(n=unique // (tr.N + 1), m=unique % (tr.N + 1), visits=counts, mean_recurrence=mean)
    return result.filtered(min_mean) if min_mean > 0 else result
