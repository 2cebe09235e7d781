"""Regenerate the curve fixtures in src/twistfact/data/curves.

Development aid only: needs cypari2, which the package itself never imports.
Minimal models, conductors, local reduction types, torsion and CM
discriminants are read off PARI and written as JSON.
"""
import json
import pathlib
import sys

import cypari2

pari = cypari2.Pari()
OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "twistfact" / "data" / "curves"

MODELS = {
    "9450.du1": [1, -1, 1, -271946810, -1733074051463],
    "9450.dr1": [1, -1, 1, -5, 7],
    "c291": [0, -1, 1, 0, -1],
    "c139": [1, 1, 0, -3, -4],
    "5776.i1": [0, 0, 0, -219488, 39617584],
    "6400.a1": [0, 1, 0, -333, 1963],
    "7056.bg1": [0, 0, 0, -262395, 51731946],
    "16641.g1": [0, 0, 1, -14311260, 20838446795],
    "57600.ch1": [0, 0, 0, -3000, 56000],
    "90601.c1": [0, 0, 1, -77916860, 264725453732],
    "215296.c1": [0, 1, 0, -11213, 400939],
    "461041.h1": [1, -1, 0, -17144962, 27327405657],
    "499849.d1": [1, -1, 1, -18588135, 30849251024],
    "207025.by1": [1, -1, 0, -7698742, 8223502041],
}
# j-invariants of the thirteen class-number-one CM orders
CM_J = {0: -3, 54000: -12, -12288000: -27, 1728: -4, 287496: -16, -3375: -7,
        16581375: -28, 8000: -8, -32768: -11, -884736: -19, -884736000: -43,
        -147197952000: -67, -262537412640768000: -163}
# quantities quoted alongside the models (Magma computations, not rederived here)
EXTRAS = {
    "9450.du1": {"rank_Q": 0, "rank_K": 0, "sha_an_Q": 1, "sha_an_K": 2**4 * 5**2 * 11**4 * 59**2,
                 "tamagawa_ratio_trivial": True, "torsion_K": 1, "irreducible_mod_p": True},
    "9450.dr1": {"rank_Q": 0, "rank_K": 4, "sha_an_Q": 1, "sha_an_K": 1,
                 "tamagawa_ratio_trivial": True, "torsion_K": 1, "irreducible_mod_p": True},
    "7056.bg1": {"rank_Q": 0, "rank_K": 0, "sha_an_Q": 1, "sha_an_K": 11**2 * 31**2,
                 "tamagawa_ratio_trivial": True, "torsion_K": 2},
}
KIND = {1: "split", -1: "nonsplit", 0: "additive"}


def fixture(label, ainvs):
    E = pari.ellinit(ainvs)
    Em = pari.ellminimalmodel(E)
    gr = pari.ellglobalred(Em)
    N = int(gr[0])
    red = {}
    for ell in pari.factor(N)[0]:
        red[str(int(ell))] = KIND[int(pari.ellap(Em, ell))]
    out = {
        "label": label,
        "ainvs": [int(a) for a in Em[:5]],
        "conductor": N,
        "reduction": red,
        "torsion_Q": int(pari.elltors(Em)[0]),
    }
    cm = CM_J.get(int(Em.j())) if str(pari.type(Em.j())) == "t_INT" else None
    if cm:
        out["cm_disc"] = cm
    if [int(a) for a in Em[:5]] != ainvs:
        out["input_model"] = ainvs
    out.update(EXTRAS.get(label, {}))
    return out


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for label, ainvs in MODELS.items():
        fx = fixture(label, ainvs)
        name = OUT / (label.replace(".", "_") + ".json")
        name.write_text(json.dumps(fx, indent=1) + "\n")
        print(name, file=sys.stderr)
