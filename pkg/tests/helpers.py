"""Independent oracles shared by several test modules."""

import numpy as np


def realign_by_loops(x, m, n):
    """Entry [(i,i'),(k,k')] = <i k|X|i' k'> by explicit index arithmetic."""
    out = np.zeros((m * m, n * n), dtype=complex)
    for i in range(m):
        for ip in range(m):
            for k in range(n):
                for kp in range(n):
                    out[i * m + ip, k * n + kp] = x[i * n + k, ip * n + kp]
    return out


def visibility_closed_form(wr, ws):
    return ws / (ws - wr)


# filled by the acceptance tests, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []
