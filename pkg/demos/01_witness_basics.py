"""Fidelity, OSD and CCNR witnesses for a few standard states."""

import oswit as ow

for name in ["bell", "ghz3", "w3", "w4"]:
    st = ow.make_state(name)
    white = ow.maximally_mixed(st.dims)
    fid = ow.fidelity_witness(st.vector, st.dims)
    osd_w = ow.gme_witness(st.rho) if len(st.dims) > 2 else ow.osd_witness(st.rho)
    print(f"{name:5s} fidelity offset {fid.offset:.4f}  p = {ow.visibility(fid, st.rho, white):.4f}"
          f"   OSD offset {osd_w.offset:.4f}  p = {ow.visibility(osd_w, st.rho, white):.4f}")

# the W state has the same leading coefficient on every cut
print(ow.gme_witness(ow.make_state("w3").rho).certificate.per_bipartition_mu1)

# CCNR: sum of coefficients above one certifies entanglement
upb = ow.make_state("upb").rho
print("UPB CCNR sum", round(ow.ccnr_value(upb), 5))
