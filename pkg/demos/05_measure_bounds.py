"""Lower bounds on entanglement measures from a witness value."""

import oswit as ow

for name in ["bell", "phi3", "psi3"]:
    st = ow.make_state(name)
    rep = ow.bipartite_bounds(st.rho, st.rho)
    exact = ow.pure_state_oracle(st.vector, st.dims)
    print(f"{name:5s} S = {rep.S:.4f}  concurrence >= {rep.bounds['Concurrence']:.4f}  (exact {exact:.4f})")

for name in ["ghz3", "w3"]:
    st = ow.make_state(name)
    rep = ow.gme_bounds(st.rho, st.rho)
    print(f"{name:5s} GME bounds", {k: round(v, 4) for k, v in rep.bounds.items()})
