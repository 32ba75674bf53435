"""Schmidt-number witnesses where the extended CCNR test is silent."""

import numpy as np

import oswit as ow

psi = ow.make_state("psi3")
mu = ow.osd(psi.rho).mu
print("coefficient sum", round(float(np.sum(mu)), 5), "needs > 2 for SN 3")
print("extended CCNR certifies SN 3:", ow.extended_ccnr_sn_check(psi.rho, None, 3))

w = ow.sn_witness(psi.rho, None, 3)
print(f"SN-3 witness offset {w.offset:.5f}, Tr(W psi) = {ow.evaluate(w, psi.rho):.5f}")

for k in (2, 3, 4):
    c = ow.lambda_k(mu, k)
    print(f"lambda_{k} = {c.value:.5f} ({c.method.value})")
