"""A PPT bound entangled state detected by an optimized witness.

The start is a random density matrix; the optimizer reaches the CCNR
witness performance without being told about it.
"""

import oswit as ow
from oswit.reproduce import UPB_CONFIG

st = ow.make_state("upb")
white = ow.maximally_mixed(st.dims)
ccnr = ow.visibility(ow.ccnr_witness(st.rho), st.rho, white)
trace = ow.optimize_bipartite(ow.random_start(st.dims, UPB_CONFIG.seed), st.rho, white, UPB_CONFIG)

first = trace.first_iteration_below(1.0)
print("detecting from iteration", first)
print(f"optimized p = {float(trace.best_p):.5f}   CCNR witness p = {ccnr:.5f}")
