"""Pure-Python scoring kernel.

Fallback used when the compiled extension is unavailable (or when
GRIDOBS_PURE is set). Accumulates in the same sequential order as the
compiled kernel, so both produce bit-identical totals.
"""
import numpy as np

BACKEND = "pure"


def accumulate_group_totals(group, weight, mult, in_scope, invalid, n_groups):
    """Per-group raw counts and weighted totals over coded signal arrays.

    group[i] indexes the group (area or station) of signal i; weight[i] is
    its table weight; mult[i] the instruction multiplier; in_scope / invalid
    are 0/1 flags. Raw counts cover every signal; weighted sums only
    in-scope ones.
    """
    total_raw = np.zeros(n_groups, dtype=np.int64)
    invalid_raw = np.zeros(n_groups, dtype=np.int64)
    total_weighted = np.zeros(n_groups, dtype=np.float64)
    invalid_weighted = np.zeros(n_groups, dtype=np.float64)

    tr = total_raw.tolist()
    ir = invalid_raw.tolist()
    tw = total_weighted.tolist()
    iw = invalid_weighted.tolist()

    g_list = np.asarray(group).tolist()
    w_list = np.asarray(weight, dtype=np.float64).tolist()
    m_list = np.asarray(mult, dtype=np.float64).tolist()
    s_list = np.asarray(in_scope).tolist()
    b_list = np.asarray(invalid).tolist()

    for i in range(len(g_list)):
        g = g_list[i]
        tr[g] += 1
        bad = b_list[i]
        if bad:
            ir[g] += 1
        if s_list[i]:
            contrib = w_list[i] * m_list[i]
            tw[g] += contrib
            if bad:
                iw[g] += contrib

    total_raw[:] = tr
    invalid_raw[:] = ir
    total_weighted[:] = tw
    invalid_weighted[:] = iw
    return total_raw, invalid_raw, total_weighted, invalid_weighted
